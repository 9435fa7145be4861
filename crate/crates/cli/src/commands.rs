use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use liftforge_core::bank::BankJson;
use liftforge_core::cca::run_schema_traced;
use liftforge_core::eea::equivalent_schema;
use liftforge_core::pmat::CascadeJson;
use liftforge_core::signatures::is_left_degree_lifting;
use liftforge_core::{
    builtin, cascade_conditioning, complexity_report, eea_factor, enumerate_left, lifting_signature, Axis, Cascade,
    CascadeFactor, Error, FieldContext, FilterBank, OpCounter, PolyMatrix2, Schema,
};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "liftforge", version, about = "Lifting factorization of two-channel FIR PR filter banks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Coefficient field for JSON inputs without a `field` entry.
    #[arg(long, global = true, env = "LIFTFORGE_FIELD", default_value = "rational")]
    pub field: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Builtin bank: cdf75, daub44, lgt53, nondoublejust.
    #[arg(long)]
    pub bank: Option<String>,
    /// Bank file {"h0": [...], "h1": [...], "field"?}.
    #[arg(long)]
    pub bank_json: Option<PathBuf>,
    /// Polyphase matrix file: a 2×2 string array or {"matrix": ..., "field"?}.
    #[arg(long)]
    pub matrix_json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Factor by a CCA schema or by the causal EEA.
    Factor {
        #[command(flatten)]
        source: Source,
        #[arg(long, conflicts_with = "eea", required_unless_present = "eea")]
        schema: Option<String>,
        /// AXIS INDEX, e.g. `col 0` or `row 1`.
        #[arg(long, num_args = 2, value_names = ["AXIS", "INDEX"])]
        eea: Option<Vec<String>>,
    },
    /// All left degree-lifting cascades.
    Enumerate {
        #[command(flatten)]
        source: Source,
    },
    /// Exit 0 iff the cascade expands to the bank's polyphase matrix.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        cascade: PathBuf,
    },
    /// Conditioning report of a cascade file.
    Condition {
        #[arg(long)]
        cascade: PathBuf,
    },
    /// Operation counts, CCA rows; `--all` adds EEA.
    Count {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        all: bool,
    },
    /// HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8731)]
        port: u16,
    },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub code: String,
    pub message: String,
    pub step_index: Option<usize>,
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure { exit: 3, code: "InvalidInput".into(), message: msg.into(), step_index: None }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "code": self.code, "message": self.message });
        if let Some(n) = self.step_index {
            v["step_index"] = json!(n);
        }
        v
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            exit: if e.is_schema_error() { 2 } else { 3 },
            code: e.code().into(),
            message: e.to_string(),
            step_index: e.step_index(),
        }
    }
}

/// Output text with its exit code (0, or 1 for a failed verification).
pub type Outcome = Result<(String, u8), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(Vec<Vec<String>>),
    Tagged { matrix: Vec<Vec<String>>, field: Option<String> },
}

fn load(source: &Source, ctx: FieldContext) -> Result<PolyMatrix2, Failure> {
    let h = if let Some(name) = &source.bank {
        builtin(name)?.to_polyphase()
    } else if let Some(p) = &source.bank_json {
        FilterBank::from_json(&parse_json::<BankJson>(p)?, ctx)?.to_polyphase()
    } else if let Some(p) = &source.matrix_json {
        let (m, ctx) = match parse_json::<MatrixFile>(p)? {
            MatrixFile::Bare(m) => (m, ctx),
            MatrixFile::Tagged { matrix, field: Some(f) } => (matrix, f.parse().map_err(Error::from)?),
            MatrixFile::Tagged { matrix, field: None } => (matrix, ctx),
        };
        PolyMatrix2::from_strings(&m, ctx)?
    } else {
        return Err(Failure::input("no bank source"));
    };
    h.pr_check()?;
    Ok(h)
}

fn load_cascade(path: &Path, ctx: FieldContext) -> Result<Cascade, Failure> {
    Ok(Cascade::from_json(&parse_json::<CascadeJson>(path)?, ctx)?)
}

fn parse_axis(text: &str) -> Result<Axis, Failure> {
    match text {
        "col" | "column" => Ok(Axis::Column),
        "row" => Ok(Axis::Row),
        other => Err(Failure::input(format!("axis must be col or row, got '{other}'"))),
    }
}

fn factor_csv(c: &Cascade) -> String {
    let mut s = String::from("kind,chi,value\n");
    for f in c.factors() {
        let _ = match f {
            CascadeFactor::Gain(a, b) => writeln!(s, "gain,,\"{a}; {b}\""),
            CascadeFactor::Delay { chi, m } => writeln!(s, "delay,{chi},{m}"),
            CascadeFactor::Lift { chi, filter } => writeln!(s, "lift,{chi},\"{filter}\""),
            CascadeFactor::Perm(p) => writeln!(s, "perm,,{p:?}"),
        };
    }
    s
}

fn render_factorization(c: &Cascade, schema: &Schema, counts: OpCounter, format: Format) -> String {
    let signature = lifting_signature(c);
    let report = cascade_conditioning(c);
    match format {
        Format::Json => json!({
            "schema": schema.to_string(),
            "cascade": c.to_json(),
            "display": c.display_product(),
            "signature": signature.to_string(),
            "degree_lifting": is_left_degree_lifting(c),
            "conditioning": report,
            "op_counts": counts,
        })
        .to_string(),
        Format::Csv => factor_csv(c),
        Format::Text => format!(
            "schema     {schema}\ncascade    {}\nsignature  {signature}\nop counts  {counts}\n\n{report}",
            c.display_product()
        ),
    }
}

fn factor(h: &PolyMatrix2, schema: Option<&str>, eea: Option<&[String]>, format: Format) -> Outcome {
    let out = match (schema, eea) {
        (Some(text), _) => {
            let s: Schema = text.parse().map_err(|e: Error| Failure { exit: 2, ..e.into() })?;
            let run = run_schema_traced(h, &s)?;
            render_factorization(&run.cascade, &s, run.counts, format)
        }
        (None, Some([axis, index])) => {
            let index: usize = match index.as_str() {
                "0" => 0,
                "1" => 1,
                other => return Err(Failure::input(format!("index must be 0 or 1, got '{other}'"))),
            };
            let t = eea_factor(h, parse_axis(axis)?, index)?;
            render_factorization(&t.cascade, &equivalent_schema(&t), t.counts, format)
        }
        _ => return Err(Failure::input("give --schema or --eea AXIS INDEX")),
    };
    Ok((out, 0))
}

fn enumerate(h: &PolyMatrix2, format: Format) -> Outcome {
    let found = enumerate_left(h)?;
    let out = match format {
        Format::Json => Value::Array(
            found
                .iter()
                .map(|e| {
                    json!({
                        "schema": e.schema.to_string(),
                        "signature": e.signature.to_string(),
                        "cascade": e.cascade.to_json(),
                        "display": e.cascade.display_product(),
                    })
                })
                .collect(),
        )
        .to_string(),
        Format::Csv => {
            let mut s = String::from("schema,signature,cascade\n");
            for e in &found {
                let _ = writeln!(s, "\"{}\",\"{}\",\"{}\"", e.schema, e.signature, e.cascade.display_product());
            }
            s
        }
        Format::Text => {
            let mut s = format!("{} cascade(s)\n", found.len());
            for (n, e) in found.iter().enumerate() {
                let _ = write!(s, "\n{}. {}\n   {}\n   {}\n", n + 1, e.schema, e.signature, e.cascade.display_product());
            }
            s
        }
    };
    Ok((out, 0))
}

fn verify(h: &PolyMatrix2, c: &Cascade, format: Format) -> Outcome {
    let got = c.expand();
    let mismatch = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .find(|&(i, j)| got.get(i, j) != h.get(i, j));
    let out = match (mismatch, format) {
        (None, Format::Json) => json!({ "ok": true }).to_string(),
        (None, _) => "ok: cascade expands to the bank matrix".into(),
        (Some((i, j)), Format::Json) => json!({
            "ok": false,
            "entry": [i, j],
            "expected": h.get(i, j).to_string(),
            "got": got.get(i, j).to_string(),
        })
        .to_string(),
        (Some((i, j)), _) => format!("mismatch at ({i},{j}): expected {}, got {}", h.get(i, j), got.get(i, j)),
    };
    Ok((out, if mismatch.is_some() { 1 } else { 0 }))
}

fn condition(c: &Cascade, format: Format) -> Outcome {
    let r = cascade_conditioning(c);
    let out = match format {
        Format::Json => serde_json::to_string(&r).expect("serializable"),
        Format::Csv => {
            let mut s = String::from("index,chi,norm_sq,cond,filter\n");
            for st in &r.steps {
                let _ = writeln!(s, "{},{},{},{},\"{}\"", st.index, st.chi, st.norm_sq, st.cond, st.filter);
            }
            let _ = writeln!(s, "gain,,,{},", r.gain_cond);
            let _ = writeln!(s, "product,,,{},", r.product);
            s
        }
        Format::Text => r.to_string(),
    };
    Ok((out, 0))
}

fn count(h: &PolyMatrix2, all: bool, format: Format) -> Outcome {
    let mut r = complexity_report(h)?;
    if !all {
        r.rows.retain(|row| row.method == "CCA");
    }
    let out = match format {
        Format::Json => serde_json::to_string(&r).expect("serializable"),
        Format::Csv => r.to_csv(),
        Format::Text => r.to_string(),
    };
    Ok((out, 0))
}

/// Runs every subcommand except `serve`.
pub fn run(cli: &Cli) -> Outcome {
    let ctx: FieldContext = cli.field.parse().map_err(|e: liftforge_core::field::ParseError| {
        Failure::input(format!("LIFTFORGE_FIELD: {e}"))
    })?;
    match &cli.command {
        Command::Factor { source, schema, eea } => factor(&load(source, ctx)?, schema.as_deref(), eea.as_deref(), cli.format),
        Command::Enumerate { source } => enumerate(&load(source, ctx)?, cli.format),
        Command::Verify { source, cascade } => verify(&load(source, ctx)?, &load_cascade(cascade, ctx)?, cli.format),
        Command::Condition { cascade } => condition(&load_cascade(cascade, ctx)?, cli.format),
        Command::Count { source, all } => count(&load(source, ctx)?, *all, cli.format),
        Command::Serve { .. } => Err(Failure::input("serve is handled by the binary")),
    }
}
