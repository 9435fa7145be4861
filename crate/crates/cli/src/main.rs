use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use liftforge_cli::{run, server, Cli, Command, Failure, Format};

fn serve(host: &str, port: u16) -> anyhow::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        server::serve(listener).await?;
        Ok(())
    })
}

fn report(f: &Failure, format: Format) {
    match format {
        Format::Json => {
            let _ = writeln!(std::io::stdout(), "{}", f.to_json());
        }
        _ => eprintln!("error [{}]: {}", f.code, f.message),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Serve { host, port } = &cli.command {
        return match serve(host, *port) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                report(&Failure::input(e.to_string()), cli.format);
                ExitCode::from(3)
            }
        };
    }
    match run(&cli) {
        Ok((out, code)) => {
            let _ = writeln!(std::io::stdout(), "{}", out.trim_end());
            ExitCode::from(code)
        }
        Err(f) => {
            report(&f, cli.format);
            ExitCode::from(f.exit)
        }
    }
}
