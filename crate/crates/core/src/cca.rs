//! Causal Complementation Algorithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ParseError;
use crate::pmat::{coprimify, normalize_counted, Cascade, CascadeFactor, Coprimification, Perm, PolyMatrix2};
use crate::poly::{counted_mul, counted_sub, monomial_gcd, sgda_divide, CausalPoly, Degree, OpCounter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Handed {
    L,
    R,
}

impl fmt::Display for Handed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Handed::L => write!(f, "L"),
            Handed::R => write!(f, "R"),
        }
    }
}

/// (η, M, δ, ℓ): handedness, minimum multiplicity, dividend row/column,
/// divisor column/row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepChoice {
    pub eta: Handed,
    pub m: usize,
    pub delta: u8,
    pub ell: u8,
}

impl StepChoice {
    pub fn new(eta: Handed, m: usize, delta: u8, ell: u8) -> Self {
        StepChoice { eta, m, delta, ell }
    }
}

impl fmt::Display for StepChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.eta, self.m, self.delta, self.ell)
    }
}

/// A schema step whose fields may be brace-sets; the first member of each set
/// is the one executed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaStep {
    pub eta: Handed,
    pub ms: Vec<usize>,
    pub deltas: Vec<u8>,
    pub ells: Vec<u8>,
}

impl SchemaStep {
    pub fn canonical(&self) -> StepChoice {
        StepChoice { eta: self.eta, m: self.ms[0], delta: self.deltas[0], ell: self.ells[0] }
    }

    pub fn members(&self) -> Vec<StepChoice> {
        let mut out = Vec::new();
        for &m in &self.ms {
            for &delta in &self.deltas {
                for &ell in &self.ells {
                    out.push(StepChoice { eta: self.eta, m, delta, ell });
                }
            }
        }
        out
    }
}

impl From<StepChoice> for SchemaStep {
    fn from(c: StepChoice) -> Self {
        SchemaStep { eta: c.eta, ms: vec![c.m], deltas: vec![c.delta], ells: vec![c.ell] }
    }
}

fn fmt_set<T: fmt::Display>(v: &[T]) -> String {
    if v.len() == 1 {
        v[0].to_string()
    } else {
        format!("{{{}}}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
    }
}

impl fmt::Display for SchemaStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.eta, fmt_set(&self.ms), fmt_set(&self.deltas), fmt_set(&self.ells))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schema {
    /// (ρ₀, ρ₁, c₀, c₁)
    pub coprime: Option<[usize; 4]>,
    pub steps: Vec<SchemaStep>,
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        if let Some(d) = self.coprime {
            write!(f, "{},{},{},{}: ", d[0], d[1], d[2], d[3])?;
        }
        let steps: Vec<String> = self.steps.iter().map(|s| s.to_string()).collect();
        write!(f, "{})", steps.join("; "))
    }
}

impl FromStr for Schema {
    type Err = Error;
    fn from_str(s: &str) -> Result<Schema> {
        parse_schema(s)
    }
}

struct SchemaParser<'a> {
    s: Vec<(usize, char)>,
    i: usize,
    _src: &'a str,
}

impl<'a> SchemaParser<'a> {
    fn pos(&self) -> usize {
        self.s.get(self.i).map(|p| p.0).unwrap_or_else(|| self.s.last().map(|p| p.0 + 1).unwrap_or(0))
    }

    fn peek(&self) -> Option<char> {
        self.s.get(self.i).map(|p| p.1)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        ParseError::new(self.pos(), msg).into()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn nat(&mut self) -> Result<usize> {
        let mut n = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                n.push(c);
                self.i += 1;
            } else {
                break;
            }
        }
        n.parse().map_err(|_| self.err("expected a natural number"))
    }

    fn nat_or_brace(&mut self) -> Result<Vec<usize>> {
        if self.peek() != Some('{') {
            return Ok(vec![self.nat()?]);
        }
        self.i += 1;
        let mut out = vec![self.nat()?];
        while self.peek() == Some(',') {
            self.i += 1;
            out.push(self.nat()?);
        }
        self.expect('}')?;
        let mut seen = out.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != out.len() {
            return Err(self.err("repeated brace member"));
        }
        Ok(out)
    }

    fn bits(&mut self) -> Result<Vec<u8>> {
        let at = self.pos();
        let v = self.nat_or_brace()?;
        if v.iter().any(|b| *b > 1) {
            return Err(ParseError::new(at, "expected 0 or 1").into());
        }
        Ok(v.into_iter().map(|b| b as u8).collect())
    }

    fn step(&mut self) -> Result<SchemaStep> {
        let eta = match self.peek() {
            Some('L') => Handed::L,
            Some('R') => Handed::R,
            _ => return Err(self.err("expected L or R")),
        };
        self.i += 1;
        self.expect(',')?;
        let ms = self.nat_or_brace()?;
        self.expect(',')?;
        let deltas = self.bits()?;
        self.expect(',')?;
        let ells = self.bits()?;
        Ok(SchemaStep { eta, ms, deltas, ells })
    }
}

/// `schema := "(" [nat "," nat "," nat "," nat ":"] step (";" step)* ")"`;
/// whitespace is insignificant.
pub fn parse_schema(text: &str) -> Result<Schema> {
    let s: Vec<(usize, char)> = text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = SchemaParser { s, i: 0, _src: text };
    p.expect('(')?;
    let mut coprime = None;
    let has_prefix = p.s[p.i..].iter().take_while(|(_, c)| *c != ';' && *c != ')').any(|(_, c)| *c == ':');
    if has_prefix {
        let mut d = [0usize; 4];
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = p.nat()?;
            p.expect(if k < 3 { ',' } else { ':' })?;
        }
        coprime = Some(d);
    }
    let mut steps = vec![p.step()?];
    while p.peek() == Some(';') {
        p.i += 1;
        steps.push(p.step()?);
    }
    p.expect(')')?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after schema"));
    }
    Ok(Schema { coprime, steps })
}

/// Degree-reducing causal complement: S and (R₀,R₁) = (E₀,E₁) − S·(F̃₀,F̃₁)
/// with F̃ⱼ = z^{d_F}Fⱼ, z⁻ᴹ | R₀,R₁ and deg R_ℓ < deg F_ℓ − d_F + M.
pub fn causal_complement(
    e: [&CausalPoly; 2],
    f: [&CausalPoly; 2],
    ell: u8,
    m: usize,
    counter: &mut OpCounter,
) -> Result<(CausalPoly, CausalPoly, CausalPoly)> {
    let det = f[0].mul(e[1]).sub(&f[1].mul(e[0]));
    if det.is_zero() || !det.is_monomial() {
        return Err(Error::PreconditionViolated("F₀E₁ − F₁E₀ is not a nonzero monomial".into()));
    }
    let d_hat = det.multiplicity()?;
    let d_f = monomial_gcd(&[f[0], f[1]])?;
    if m + d_f > d_hat {
        return Err(Error::PreconditionViolated(format!("M = {m} exceeds the bound {}", d_hat - d_f)));
    }
    let ft = [f[0].unshift(d_f)?, f[1].unshift(d_f)?];
    let l = ell as usize;
    let lp = 1 - l;
    if ft[l].is_zero() {
        return Err(Error::PreconditionViolated(format!("divisor F{l} is zero")));
    }
    let (s, r_l) = sgda_divide(e[l], &ft[l], m, counter).map_err(|err| match err {
        Error::DivisorNotLeftJustified => {
            Error::PreconditionViolated(format!("divisor F{l} is not left-justified but M = {m}"))
        }
        other => other,
    })?;
    let prod = counted_mul(&s, &ft[lp], counter);
    let r_lp = counted_sub(e[lp], &prod, counter);
    Ok(if l == 0 { (s, r_l, r_lp) } else { (s, r_lp, r_l) })
}

/// d̂ < deg F₀ + deg F₁ − d_F + M: both divisor choices give the same complement.
pub fn divisors_agree(f: [&CausalPoly; 2], d_hat: usize, m: usize) -> bool {
    let (Some(a), Some(b)) = (f[0].degree().finite(), f[1].degree().finite()) else {
        return false;
    };
    let Ok(d_f) = monomial_gcd(&[f[0], f[1]]) else {
        return false;
    };
    d_hat + d_f < a + b + m
}

/// One downlift: Q = V·Δ·Q′ (left) or Q = Q′·Δ·V (right).
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub v: CascadeFactor,
    pub delay: CascadeFactor,
    pub quotient: PolyMatrix2,
    pub filter: CausalPoly,
    /// Achieved multiplicity m ≥ M.
    pub m: usize,
}

impl Extraction {
    pub fn same_step(&self, o: &Extraction) -> bool {
        self.v == o.v && self.delay == o.delay && self.quotient == o.quotient
    }
}

pub fn extract_step(q: &PolyMatrix2, choice: StepChoice, counter: &mut OpCounter) -> Result<Extraction> {
    if !q.is_zero_free() {
        return Err(Error::QuotientHasZero);
    }
    if !q.is_coprime() {
        return Err(Error::PreconditionViolated("quotient rows or columns are not coprime".into()));
    }
    if choice.delta > 1 || choice.ell > 1 {
        return Err(Error::PreconditionViolated("δ and ℓ must be 0 or 1".into()));
    }
    match choice.eta {
        Handed::L => extract_left(q, choice, counter),
        Handed::R => {
            let t = extract_left(&q.transpose(), choice, counter)?;
            let v = match t.v {
                CascadeFactor::Lift { chi, filter } => CascadeFactor::Lift { chi: 1 - chi, filter },
                other => other,
            };
            Ok(Extraction { v, delay: t.delay, quotient: t.quotient.transpose(), filter: t.filter, m: t.m })
        }
    }
}

fn extract_left(q: &PolyMatrix2, c: StepChoice, counter: &mut OpCounter) -> Result<Extraction> {
    let d = c.delta as usize;
    let e = [&q.e[d][0], &q.e[d][1]];
    let f = [&q.e[1 - d][0], &q.e[1 - d][1]];
    let (s, r0, r1) = causal_complement(e, f, c.ell, c.m, counter)?;
    if s.is_zero() {
        return Err(Error::PreconditionViolated("trivial lifting step (S = 0)".into()));
    }
    let m = monomial_gcd(&[&r0, &r1])?;
    let rt = [r0.unshift(m)?, r1.unshift(m)?];
    let fr = [f[0].clone(), f[1].clone()];
    let quotient = if d == 0 {
        PolyMatrix2 { e: [rt, fr] }
    } else {
        PolyMatrix2 { e: [fr, rt] }
    };
    let v = CascadeFactor::Lift { chi: c.delta, filter: s.clone() };
    let delay = CascadeFactor::Delay { chi: c.delta, m };
    Ok(Extraction { v, delay, quotient, filter: s, m })
}

/// Which unit the lifting filter is divided by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitPath {
    /// Row partner: Q = D·V.
    Row,
    /// Column partner: Q = V·D, then D is moved left.
    Column,
}

/// Factors a matrix with a zero into [Gain, Lift?, J?].
pub fn terminate(q: &PolyMatrix2, counter: &mut OpCounter) -> Result<Vec<CascadeFactor>> {
    terminate_via(q, UnitPath::Row, counter)
}

fn unit_of(p: &CausalPoly) -> Result<crate::field::Scalar> {
    if p.is_unit() {
        Ok(p.coeff(0))
    } else {
        Err(Error::PreconditionViolated(format!("{p} is not a unit")))
    }
}

pub fn terminate_via(q: &PolyMatrix2, path: UnitPath, counter: &mut OpCounter) -> Result<Vec<CascadeFactor>> {
    let zeros = q.zero_positions();
    let e = &q.e;
    let ctx = q.ctx();
    match zeros.as_slice() {
        [] => Err(Error::NoZero),
        [(0, 1), (1, 0)] => Ok(vec![CascadeFactor::Gain(unit_of(&e[0][0])?, unit_of(&e[1][1])?)]),
        [(0, 0), (1, 1)] => {
            Ok(vec![CascadeFactor::Gain(unit_of(&e[0][1])?, unit_of(&e[1][0])?), CascadeFactor::Perm(Perm::J)])
        }
        [_, _, ..] => Err(Error::MultipleZeros),
        [(zi, zj)] => {
            // Work on Q·J when the zero is on the diagonal, so the zero sits off it.
            let (w, swapped) = if zi == zj { (q.mul(&PolyMatrix2::swap(ctx)), true) } else { (q.clone(), false) };
            let (k0, k1) = (unit_of(&w.e[0][0])?, unit_of(&w.e[1][1])?);
            let upper = w.e[1][0].is_zero();
            let f = if upper { &w.e[0][1] } else { &w.e[1][0] };
            // Row path divides by the diagonal unit in the filter's row.
            let row_unit = if upper { &k0 } else { &k1 };
            let col_unit = if upper { &k1 } else { &k0 };
            let chi = if upper { 0 } else { 1 };
            let filter = match path {
                UnitPath::Row => {
                    let inv = CausalPoly::constant(row_unit.try_recip()?, ctx);
                    counted_mul(f, &inv, counter)
                }
                UnitPath::Column => {
                    let inv = CausalPoly::constant(col_unit.try_recip()?, ctx);
                    let lifted = counted_mul(f, &inv, counter);
                    // V·D = D·V′ with V′ = V scaled by κ_col/κ_row
                    let ratio = CausalPoly::constant(col_unit / row_unit, ctx);
                    counted_mul(&lifted, &ratio, counter)
                }
            };
            let mut out = vec![CascadeFactor::Gain(k0, k1)];
            if !filter.is_zero() {
                out.push(CascadeFactor::Lift { chi, filter });
            }
            if swapped {
                out.push(CascadeFactor::Perm(Perm::J));
            }
            Ok(out)
        }
    }
}

/// A schema execution with its quotient chain.
#[derive(Clone, Debug)]
pub struct SchemaRun {
    pub cascade: Cascade,
    pub coprime: [usize; 4],
    pub quotients: Vec<PolyMatrix2>,
    pub extractions: Vec<Extraction>,
    pub counts: OpCounter,
}

/// Runs a schema with brace members checked eagerly.
pub fn run_schema(h: &PolyMatrix2, schema: &Schema) -> Result<Cascade> {
    Ok(run_schema_traced(h, schema)?.cascade)
}

pub fn run_schema_traced(h: &PolyMatrix2, schema: &Schema) -> Result<SchemaRun> {
    let how = schema.coprime.map(Coprimification::Explicit).unwrap_or_default();
    let (d, q0) = coprimify(h, how)?;
    let mut counter = OpCounter::new();
    let mut q = q0.clone();
    let mut quotients = vec![q0];
    let mut extractions = Vec::new();
    for (n, step) in schema.steps.iter().enumerate() {
        if step.ms.is_empty() || step.deltas.is_empty() || step.ells.is_empty() {
            return Err(Error::Schema("empty brace".into()).at_step(n));
        }
        if !q.is_zero_free() {
            return Err(Error::Schema("quotient already has a zero; too many steps".into()).at_step(n));
        }
        let x = extract_step(&q, step.canonical(), &mut counter).map_err(|e| e.at_step(n))?;
        for member in step.members().into_iter().skip(1) {
            let alt = extract_step(&q, member, &mut OpCounter::new())
                .map_err(|e| Error::BraceMismatch(format!("member ({member}) fails: {e}")).at_step(n))?;
            if !alt.same_step(&x) {
                return Err(Error::BraceMismatch(format!("member ({member}) yields a different step")).at_step(n));
            }
        }
        q = x.quotient.clone();
        quotients.push(q.clone());
        extractions.push(x);
    }
    if q.is_zero_free() {
        return Err(Error::Schema("quotient has no zero after the last step".into()).at_step(schema.steps.len()));
    }
    let terminal = terminate(&q, &mut counter).map_err(|e| e.at_step(schema.steps.len()))?;
    let factors = assemble(d, &schema.steps.iter().map(|s| s.eta).collect::<Vec<_>>(), &extractions, terminal);
    let cascade = normalize_counted(&factors, h.ctx(), &mut counter)?;
    Ok(SchemaRun { cascade, coprime: d, quotients, extractions, counts: counter })
}

/// Orders downlift factors around the terminal factors: left steps append,
/// right steps prepend on the right.
pub fn assemble(
    d: [usize; 4],
    etas: &[Handed],
    extractions: &[Extraction],
    terminal: Vec<CascadeFactor>,
) -> Vec<CascadeFactor> {
    let mut left = vec![CascadeFactor::Delay { chi: 0, m: d[0] }, CascadeFactor::Delay { chi: 1, m: d[1] }];
    let mut right: Vec<CascadeFactor> = vec![CascadeFactor::Delay { chi: 0, m: d[2] }, CascadeFactor::Delay { chi: 1, m: d[3] }];
    for (eta, x) in etas.iter().zip(extractions) {
        match eta {
            Handed::L => {
                left.push(x.v.clone());
                left.push(x.delay.clone());
            }
            Handed::R => {
                let mut r = vec![x.delay.clone(), x.v.clone()];
                r.extend(right);
                right = r;
            }
        }
    }
    left.extend(terminal);
    left.extend(right);
    left
}

/// The choice with M and ℓ expanded to every value yielding the identical step.
pub fn coalesce_options(q: &PolyMatrix2, choice: StepChoice) -> Result<SchemaStep> {
    let base = extract_step(q, choice, &mut OpCounter::new())?;
    let d_hat = q.det_degree()?;
    let same = |c: StepChoice| extract_step(q, c, &mut OpCounter::new()).map(|x| x.same_step(&base)).unwrap_or(false);
    let mut ms = vec![choice.m];
    for m in 0..=d_hat {
        if m != choice.m && same(StepChoice { m, ..choice }) {
            ms.push(m);
        }
    }
    let other = StepChoice { ell: 1 - choice.ell, ..choice };
    let mut ells = vec![choice.ell];
    if ms.iter().all(|&m| same(StepChoice { m, ..other })) {
        ells.push(other.ell);
    }
    ms[1..].sort_unstable();
    let first = ms[0];
    ms.sort_unstable();
    if ms[0] != first {
        ms.retain(|&m| m != first);
        ms.insert(0, first);
    }
    ells.sort_unstable();
    if ells[0] != choice.ell {
        ells.reverse();
    }
    Ok(SchemaStep { eta: choice.eta, ms, deltas: vec![choice.delta], ells })
}

/// Sorted brace display with the executed member first only when it is also
/// the smallest; used for printing schemas.
pub fn coalesced_schema(h: &PolyMatrix2, run: &SchemaRun, etas: &[StepChoice]) -> Result<Schema> {
    let mut steps = Vec::new();
    for (n, c) in etas.iter().enumerate() {
        let mut s = coalesce_options(&run.quotients[n], *c).map_err(|e| e.at_step(n))?;
        s.ms.sort_unstable();
        s.ells.sort_unstable();
        steps.push(s);
    }
    let coprime = if run.coprime == [0; 4] && coprimify(h, Coprimification::default())?.0 == [0; 4] {
        None
    } else {
        Some(run.coprime)
    };
    Ok(Schema { coprime, steps })
}

/// Degree table of a matrix, `Bottom` shown as ⊥.
pub fn degree_grid(q: &PolyMatrix2) -> [[Degree; 2]; 2] {
    q.degrees()
}
