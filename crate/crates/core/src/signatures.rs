//! Left degree-lifting cascades: partial products, signatures, enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cca::{
    assemble, coalesced_schema, extract_step, run_schema_traced, terminate, Extraction, Handed, Schema, SchemaStep,
    StepChoice,
};
use crate::error::{Error, Result};
use crate::field::ParseError;
use crate::pmat::{coprimify, normalize, Cascade, CascadeFactor, Coprimification, PolyMatrix2};
use crate::poly::{Degree, OpCounter};

const MAX_DEPTH: usize = 64;

/// A subset of {0,1}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColSet {
    pub has0: bool,
    pub has1: bool,
}

impl ColSet {
    pub fn single(j: u8) -> Self {
        ColSet { has0: j == 0, has1: j == 1 }
    }

    pub fn is_empty(&self) -> bool {
        !self.has0 && !self.has1
    }

    pub fn contains(&self, j: usize) -> bool {
        if j == 0 {
            self.has0
        } else {
            self.has1
        }
    }
}

impl fmt::Display for ColSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.has0, self.has1) {
            (true, true) => write!(f, "{{0,1}}"),
            (true, false) => write!(f, "0"),
            (false, true) => write!(f, "1"),
            (false, false) => write!(f, "{{}}"),
        }
    }
}

/// Degree signature of `p` given the update characteristic χ of the last
/// step; `None` when `p` lacks coprime rows.
pub fn degree_signature(p: &PolyMatrix2, chi: u8) -> Option<ColSet> {
    for i in 0..2 {
        if p.row_gcd(i).map(|g| g > 0).unwrap_or(true) {
            return None;
        }
    }
    let (a, b) = (chi as usize, 1 - chi as usize);
    let deg = p.degrees();
    let lifts = |j: usize| match (deg[a][j], deg[b][j]) {
        (Degree::Fin(x), Degree::Fin(y)) => x > y,
        (Degree::Fin(_), Degree::Bottom) => true,
        _ => false,
    };
    Some(ColSet { has0: lifts(0), has1: lifts(1) })
}

/// [P₀, P₁, …, P_N] with Pₙ = U_{n−1}Λ_{n−1}P_{n−1}.
pub fn partial_products(c: &Cascade) -> Vec<PolyMatrix2> {
    let ctx = c.ctx;
    let mut out = vec![c.p0.matrix(ctx)];
    for s in &c.steps {
        let lift = CascadeFactor::Lift { chi: s.chi, filter: s.filter.clone() }.matrix(ctx);
        let delay = CascadeFactor::Delay { chi: s.chi, m: s.delay_m }.matrix(ctx);
        let prev = out.last().expect("nonempty");
        out.push(lift.mul(&delay).mul(prev));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LiftingSignature {
    /// (ρ₀, ρ₁, c₀, c₁)
    pub coprime: [usize; 4],
    /// sig(Pₙ) for n = 0 … N−1.
    pub sigs: Vec<ColSet>,
    /// deg|Λₙ| for n = 0 … N−1; Λ₀ = I.
    pub delays: Vec<usize>,
    pub chi0: Option<u8>,
}

/// Lifting signature; levels where Pₙ lacks coprime rows get the empty set.
pub fn lifting_signature(c: &Cascade) -> LiftingSignature {
    let ps = partial_products(c);
    let n = c.steps.len();
    let mut sigs = Vec::with_capacity(n);
    for (k, p) in ps.iter().take(n).enumerate() {
        let chi = if k == 0 { 1 - c.steps[0].chi } else { c.steps[k - 1].chi };
        sigs.push(degree_signature(p, chi).unwrap_or_default());
    }
    LiftingSignature {
        coprime: [c.row_delays.0, c.row_delays.1, c.col_delays.0, c.col_delays.1],
        sigs,
        delays: c.steps.iter().map(|s| s.delay_m).collect(),
        chi0: c.chi0(),
    }
}

/// sig(Pₙ) ≠ ∅ for 0 ≤ n ≤ N−1.
pub fn is_left_degree_lifting(c: &Cascade) -> bool {
    lifting_signature(c).sigs.iter().all(|s| !s.is_empty())
}

impl fmt::Display for LiftingSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = if self.coprime == [0; 4] {
            String::new()
        } else {
            let d = self.coprime;
            format!("{},{},{},{}", d[0], d[1], d[2], d[3])
        };
        let n = self.sigs.len();
        if n == 0 {
            return if prefix.is_empty() { write!(f, "[ ]") } else { write!(f, "[{prefix}]") };
        }
        write!(f, "[")?;
        if !prefix.is_empty() {
            write!(f, "{prefix}: ")?;
        }
        let mut parts = vec![self.sigs[n - 1].to_string()];
        for k in (1..n - 1).rev() {
            parts.push(format!("{},{}", self.delays[k], self.sigs[k]));
        }
        if n >= 2 {
            parts.push(self.sigs[0].to_string());
        }
        write!(f, "{} : {}]", parts.join("; "), self.chi0.unwrap_or(0))
    }
}

fn parse_set(s: &str, at: usize) -> Result<ColSet> {
    match s {
        "0" => Ok(ColSet::single(0)),
        "1" => Ok(ColSet::single(1)),
        "{0,1}" | "{1,0}" => Ok(ColSet { has0: true, has1: true }),
        _ => Err(ParseError::new(at, format!("expected 0, 1 or {{0,1}}, got '{s}'")).into()),
    }
}

impl FromStr for LiftingSignature {
    type Err = Error;

    /// Parses the display form; deg|Λ_{N−1}| is not recoverable from text
    /// alone and is left as 0.
    fn from_str(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::from(ParseError::new(0, "signature must be bracketed")))?;
        let mut coprime = [0usize; 4];
        let nums = |s: &str| -> Result<[usize; 4]> {
            let v: Vec<usize> = s.split(',').map(|x| x.parse()).collect::<std::result::Result<_, _>>().map_err(
                |_| Error::from(ParseError::new(1, "expected four delays")),
            )?;
            v.try_into().map_err(|_| ParseError::new(1, "expected four delays").into())
        };
        if inner.is_empty() {
            return Ok(LiftingSignature { coprime, sigs: vec![], delays: vec![], chi0: None });
        }
        let colons: Vec<&str> = inner.split(':').collect();
        let body = match colons.len() {
            1 => {
                coprime = nums(colons[0])?;
                return Ok(LiftingSignature { coprime, sigs: vec![], delays: vec![], chi0: None });
            }
            2 => inner,
            3 => {
                coprime = nums(colons[0])?;
                &inner[colons[0].len() + 1..]
            }
            _ => return Err(ParseError::new(0, "too many ':'").into()),
        };
        let (levels, chi) = body.rsplit_once(':').expect("has colon");
        let chi0 = match chi {
            "0" => 0,
            "1" => 1,
            _ => return Err(ParseError::new(text.len() - 1, "χ₀ must be 0 or 1").into()),
        };
        let parts: Vec<&str> = levels.split(';').collect();
        let mut sigs_rev = vec![parse_set(parts[0], 1)?];
        let mut delays_rev = vec![0];
        if parts.len() >= 2 {
            for p in &parts[1..parts.len() - 1] {
                let (d, s) = p
                    .split_once(',')
                    .ok_or_else(|| Error::from(ParseError::new(1, format!("expected 'deg,set', got '{p}'"))))?;
                delays_rev.push(d.parse().map_err(|_| Error::from(ParseError::new(1, "bad degree")))?);
                sigs_rev.push(parse_set(s, 1)?);
            }
            sigs_rev.push(parse_set(parts[parts.len() - 1], 1)?);
            delays_rev.push(0);
        }
        sigs_rev.reverse();
        delays_rev.reverse();
        Ok(LiftingSignature { coprime, sigs: sigs_rev, delays: delays_rev, chi0: Some(chi0) })
    }
}

impl LiftingSignature {
    /// Equality ignoring the redundant deg|Λ_{N−1}|.
    pub fn same_display(&self, o: &LiftingSignature) -> bool {
        self.to_string() == o.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct Enumerated {
    pub cascade: Cascade,
    pub schema: Schema,
    pub signature: LiftingSignature,
}

/// All left CCA factorizations of `h` (rows-first coprimification),
/// deduplicated by cascade equality.
pub fn enumerate_left(h: &PolyMatrix2) -> Result<Vec<Enumerated>> {
    h.pr_check()?;
    let (d, q0) = coprimify(h, Coprimification::default())?;
    let mut out: Vec<Enumerated> = Vec::new();
    let mut path: Vec<(StepChoice, Extraction)> = Vec::new();
    dfs(h, d, &q0, &mut path, &mut out)?;
    Ok(out)
}

fn dfs(
    h: &PolyMatrix2,
    d: [usize; 4],
    q: &PolyMatrix2,
    path: &mut Vec<(StepChoice, Extraction)>,
    out: &mut Vec<Enumerated>,
) -> Result<()> {
    if !q.is_zero_free() {
        let terminal = terminate(q, &mut OpCounter::new())?;
        let etas = vec![Handed::L; path.len()];
        let xs: Vec<Extraction> = path.iter().map(|(_, x)| x.clone()).collect();
        let cascade = normalize(&assemble(d, &etas, &xs, terminal), h.ctx())?;
        if !out.iter().any(|e| e.cascade == cascade) {
            let coprime = if d == [0; 4] { None } else { Some(d) };
            let choices: Vec<StepChoice> = path.iter().map(|(c, _)| *c).collect();
            let raw = Schema { coprime, steps: choices.iter().map(|c| SchemaStep::from(*c)).collect() };
            let schema = coalesced_schema(h, &run_schema_traced(h, &raw)?, &choices)?;
            let signature = lifting_signature(&cascade);
            out.push(Enumerated { cascade, schema, signature });
        }
        return Ok(());
    }
    if path.len() >= MAX_DEPTH {
        return Err(Error::PreconditionViolated("enumeration depth limit reached".into()));
    }
    let deltas: Vec<u8> = match path.last() {
        None => vec![0, 1],
        Some((c, _)) => vec![1 - c.delta],
    };
    let d_hat = q.det_degree()?;
    for delta in deltas {
        for m in 0..=d_hat {
            for ell in 0..2 {
                let choice = StepChoice::new(Handed::L, m, delta, ell);
                let Ok(x) = extract_step(q, choice, &mut OpCounter::new()) else { continue };
                let next = x.quotient.clone();
                path.push((choice, x));
                dfs(h, d, &next, path, out)?;
                path.pop();
            }
        }
    }
    Ok(())
}

/// True iff distinct cascades carry distinct signatures.
pub fn uniqueness_check(cs: &[Cascade]) -> Result<bool> {
    let Some(first) = cs.first() else { return Ok(true) };
    let target = first.expand();
    if cs.iter().any(|c| c.expand() != target) {
        return Err(Error::MixedSources);
    }
    let sigs: Vec<String> = cs.iter().map(|c| lifting_signature(c).to_string()).collect();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            if sigs[i] == sigs[j] && cs[i] != cs[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;
    use crate::pmat::Perm;
    use crate::poly::CausalPoly;

    fn q() -> FieldContext {
        FieldContext::rational()
    }

    fn p(s: &str) -> CausalPoly {
        CausalPoly::parse(s, q()).unwrap()
    }

    fn one_step(p0: Perm, filter: &str) -> Cascade {
        let mut c = Cascade::trivial(q());
        c.p0 = p0;
        c.steps.push(crate::pmat::Step { chi: 0, filter: p(filter), delay_m: 0 });
        c
    }

    #[test]
    fn first_partial_products() {
        let c = one_step(Perm::I, "2+z^-1");
        let ps = partial_products(&c);
        assert_eq!(ps[1], PolyMatrix2::parse([["1", "2+z^-1"], ["0", "1"]], q()).unwrap());
        let c = one_step(Perm::J, "2+z^-1");
        assert_eq!(partial_products(&c)[1], PolyMatrix2::parse([["2+z^-1", "1"], ["1", "0"]], q()).unwrap());
    }

    #[test]
    fn degree_signatures() {
        let i = PolyMatrix2::identity(q());
        assert_eq!(degree_signature(&i, 0), Some(ColSet::single(0)));
        assert_eq!(degree_signature(&PolyMatrix2::swap(q()), 1), Some(ColSet::single(0)));
        let p1 = PolyMatrix2::parse([["1", "3"], ["0", "1"]], q()).unwrap();
        assert_eq!(degree_signature(&p1, 0), Some(ColSet::single(0)));
        let p1 = PolyMatrix2::parse([["1", "3+z^-1"], ["0", "1"]], q()).unwrap();
        assert_eq!(degree_signature(&p1, 0), Some(ColSet { has0: true, has1: true }));
        let shared = PolyMatrix2::parse([["z^-1", "z^-2"], ["1", "1"]], q()).unwrap();
        assert_eq!(degree_signature(&shared, 0), None);
    }

    #[test]
    fn signature_text() {
        for s in ["[{0,1}; 0,0; 1,0; 1 : 1]", "[{0,1}; 1,0; 1 : 0]", "[ ]", "[1,0,0,2]", "[1,0,0,0: 0; 1 : 1]"] {
            let sig: LiftingSignature = s.parse().unwrap();
            assert_eq!(sig.to_string(), s);
        }
        assert!("[{0,1}; x,0; 1 : 1]".parse::<LiftingSignature>().is_err());
        assert!("{0,1}; 1 : 1".parse::<LiftingSignature>().is_err());
        assert_eq!(lifting_signature(&Cascade::trivial(q())).to_string(), "[ ]");
    }

    #[test]
    fn identity_has_only_the_trivial_factorization() {
        let all = enumerate_left(&PolyMatrix2::identity(q())).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].cascade, Cascade::trivial(q()));
    }
}
