//! 2×2 causal transfer matrices, cascade factors, and the standard causal
//! lifting form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldContext, Scalar};
use crate::poly::{counted_mul, monomial_gcd, CausalPoly, Degree, OpCounter};

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix2 {
    pub e: [[CausalPoly; 2]; 2],
}

impl PolyMatrix2 {
    pub fn new(h00: CausalPoly, h01: CausalPoly, h10: CausalPoly, h11: CausalPoly) -> Self {
        PolyMatrix2 { e: [[h00, h01], [h10, h11]] }
    }

    pub fn ctx(&self) -> FieldContext {
        self.e[0][0].ctx()
    }

    pub fn identity(ctx: FieldContext) -> Self {
        PolyMatrix2::diag(CausalPoly::one(ctx), CausalPoly::one(ctx))
    }

    pub fn swap(ctx: FieldContext) -> Self {
        let (z, o) = (CausalPoly::zero(ctx), CausalPoly::one(ctx));
        PolyMatrix2::new(z.clone(), o.clone(), o, z)
    }

    pub fn diag(a: CausalPoly, b: CausalPoly) -> Self {
        let z = CausalPoly::zero(a.ctx());
        PolyMatrix2::new(a, z.clone(), z, b)
    }

    /// Parses the four entries in row-major order.
    pub fn parse(entries: [[&str; 2]; 2], ctx: FieldContext) -> Result<Self> {
        let p = |s: &str| CausalPoly::parse(s, ctx);
        Ok(PolyMatrix2::new(p(entries[0][0])?, p(entries[0][1])?, p(entries[1][0])?, p(entries[1][1])?))
    }

    pub fn from_strings(entries: &[Vec<String>], ctx: FieldContext) -> Result<Self> {
        if entries.len() != 2 || entries.iter().any(|r| r.len() != 2) {
            return Err(Error::Invalid("matrix must be 2×2".into()));
        }
        PolyMatrix2::parse([[&entries[0][0], &entries[0][1]], [&entries[1][0], &entries[1][1]]], ctx)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.e.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> &CausalPoly {
        &self.e[i][j]
    }

    pub fn mul(&self, o: &PolyMatrix2) -> PolyMatrix2 {
        let m = |i: usize, j: usize| self.e[i][0].mul(&o.e[0][j]).add(&self.e[i][1].mul(&o.e[1][j]));
        PolyMatrix2::new(m(0, 0), m(0, 1), m(1, 0), m(1, 1))
    }

    pub fn transpose(&self) -> PolyMatrix2 {
        let e = &self.e;
        PolyMatrix2::new(e[0][0].clone(), e[1][0].clone(), e[0][1].clone(), e[1][1].clone())
    }

    pub fn scale(&self, s: &Scalar) -> PolyMatrix2 {
        let e = &self.e;
        PolyMatrix2::new(e[0][0].scale(s), e[0][1].scale(s), e[1][0].scale(s), e[1][1].scale(s))
    }

    pub fn determinant(&self) -> CausalPoly {
        self.e[0][0].mul(&self.e[1][1]).sub(&self.e[0][1].mul(&self.e[1][0]))
    }

    /// (â, d̂) with det = â·z^{-d̂}.
    pub fn pr_check(&self) -> Result<(Scalar, usize)> {
        let det = self.determinant();
        if det.is_zero() {
            return Err(Error::NotPerfectReconstruction("determinant is zero".into()));
        }
        if !det.is_monomial() {
            return Err(Error::NotPerfectReconstruction(format!("determinant {det} is not a monomial")));
        }
        let d = det.multiplicity()?;
        Ok((det.coeff(d), d))
    }

    /// d̂, the determinantal degree.
    pub fn det_degree(&self) -> Result<usize> {
        Ok(self.pr_check()?.1)
    }

    pub fn zero_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                if self.e[i][j].is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_zero_free(&self) -> bool {
        self.zero_positions().is_empty()
    }

    pub fn row_gcd(&self, i: usize) -> Result<usize> {
        monomial_gcd(&[&self.e[i][0], &self.e[i][1]])
    }

    pub fn col_gcd(&self, j: usize) -> Result<usize> {
        monomial_gcd(&[&self.e[0][j], &self.e[1][j]])
    }

    pub fn is_coprime(&self) -> bool {
        (0..2).all(|k| self.row_gcd(k) == Ok(0) && self.col_gcd(k) == Ok(0))
    }

    pub fn degrees(&self) -> [[Degree; 2]; 2] {
        [[self.e[0][0].degree(), self.e[0][1].degree()], [self.e[1][0].degree(), self.e[1][1].degree()]]
    }

    pub fn coerce(&self, ctx: FieldContext) -> Result<PolyMatrix2> {
        let c = |i: usize, j: usize| self.e[i][j].coerce(ctx);
        Ok(PolyMatrix2::new(c(0, 0)?, c(0, 1)?, c(1, 0)?, c(1, 1)?))
    }

    fn map(&self, f: impl Fn(usize, usize, &CausalPoly) -> Result<CausalPoly>) -> Result<PolyMatrix2> {
        Ok(PolyMatrix2::new(
            f(0, 0, &self.e[0][0])?,
            f(0, 1, &self.e[0][1])?,
            f(1, 0, &self.e[1][0])?,
            f(1, 1, &self.e[1][1])?,
        ))
    }
}

impl fmt::Display for PolyMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoprimeOrder {
    RowsFirst,
    ColsFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coprimification {
    Order(CoprimeOrder),
    /// (ρ₀, ρ₁, c₀, c₁)
    Explicit([usize; 4]),
}

impl Default for Coprimification {
    fn default() -> Self {
        Coprimification::Order(CoprimeOrder::RowsFirst)
    }
}

/// Strips monomial common divisors from rows and columns. Every common divisor
/// of a row or column divides the monomial determinant, so it is itself a
/// monomial and removing minimum multiplicities suffices.
pub fn coprimify(h: &PolyMatrix2, how: Coprimification) -> Result<([usize; 4], PolyMatrix2)> {
    h.pr_check()?;
    let strip = |q: &PolyMatrix2, rows: bool, d: &mut [usize; 4]| -> Result<PolyMatrix2> {
        let k: [usize; 2] = if rows { [q.row_gcd(0)?, q.row_gcd(1)?] } else { [q.col_gcd(0)?, q.col_gcd(1)?] };
        if rows {
            d[0] += k[0];
            d[1] += k[1];
        } else {
            d[2] += k[0];
            d[3] += k[1];
        }
        q.map(|i, j, p| p.unshift(if rows { k[i] } else { k[j] }))
    };
    match how {
        Coprimification::Explicit(d) => {
            let q = h
                .map(|i, j, p| p.unshift(d[i] + d[2 + j]))
                .map_err(|_| Error::InvalidCoprimification(format!("delays {d:?} leave a noncausal matrix")))?;
            if !q.is_coprime() {
                return Err(Error::InvalidCoprimification(format!("delays {d:?} leave a non-coprime matrix")));
            }
            Ok((d, q))
        }
        Coprimification::Order(order) => {
            let mut d = [0usize; 4];
            let mut q = h.clone();
            let rows_first = order == CoprimeOrder::RowsFirst;
            while !q.is_coprime() {
                q = strip(&q, rows_first, &mut d)?;
                q = strip(&q, !rows_first, &mut d)?;
            }
            Ok((d, q))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Perm {
    I,
    J,
}

impl Perm {
    pub fn compose(self, o: Perm) -> Perm {
        if self == o {
            Perm::I
        } else {
            Perm::J
        }
    }

    pub fn matrix(self, ctx: FieldContext) -> PolyMatrix2 {
        match self {
            Perm::I => PolyMatrix2::identity(ctx),
            Perm::J => PolyMatrix2::swap(ctx),
        }
    }
}

/// One elementary matrix. χ = 0 is upper (υ) for lifts and diag(z⁻ᵐ,1) for
/// delays; χ = 1 is lower (λ) and diag(1,z⁻ᵐ).
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum CascadeFactor {
    Lift { chi: u8, filter: CausalPoly },
    Delay { chi: u8, m: usize },
    Gain(Scalar, Scalar),
    Perm(Perm),
}

impl CascadeFactor {
    pub fn upper(filter: CausalPoly) -> Self {
        CascadeFactor::Lift { chi: 0, filter }
    }

    pub fn lower(filter: CausalPoly) -> Self {
        CascadeFactor::Lift { chi: 1, filter }
    }

    pub fn matrix(&self, ctx: FieldContext) -> PolyMatrix2 {
        let (z, o) = (CausalPoly::zero(ctx), CausalPoly::one(ctx));
        match self {
            CascadeFactor::Lift { chi: 0, filter } => PolyMatrix2::new(o.clone(), filter.clone(), z, o),
            CascadeFactor::Lift { filter, .. } => PolyMatrix2::new(o.clone(), z, filter.clone(), o),
            CascadeFactor::Delay { chi, m } => {
                let w = CausalPoly::monomial(ctx.one(), *m, ctx);
                if *chi == 0 {
                    PolyMatrix2::diag(w, o)
                } else {
                    PolyMatrix2::diag(o, w)
                }
            }
            CascadeFactor::Gain(k0, k1) => {
                PolyMatrix2::diag(CausalPoly::constant(k0.clone(), ctx), CausalPoly::constant(k1.clone(), ctx))
            }
            CascadeFactor::Perm(p) => p.matrix(ctx),
        }
    }
}

/// V′ with D_κ·V′ = V·D_κ: the filter is scaled by κ_{1−χ}/κ_χ.
pub fn gain_intertwine(v: &CascadeFactor, k0: &Scalar, k1: &Scalar) -> CascadeFactor {
    gain_intertwine_counted(v, k0, k1, &mut OpCounter::new())
}

fn gain_intertwine_counted(v: &CascadeFactor, k0: &Scalar, k1: &Scalar, counter: &mut OpCounter) -> CascadeFactor {
    match v {
        CascadeFactor::Lift { chi, filter } => {
            let ratio = if *chi == 0 { k1 / k0 } else { k0 / k1 };
            let r = CausalPoly::constant(ratio, filter.ctx());
            CascadeFactor::Lift { chi: *chi, filter: counted_mul(filter, &r, counter) }
        }
        other => other.clone(),
    }
}

/// J·f·J.
pub fn swap_conjugate(f: &CascadeFactor) -> CascadeFactor {
    match f {
        CascadeFactor::Lift { chi, filter } => CascadeFactor::Lift { chi: 1 - chi, filter: filter.clone() },
        CascadeFactor::Delay { chi, m } => CascadeFactor::Delay { chi: 1 - chi, m: *m },
        CascadeFactor::Gain(a, b) => CascadeFactor::Gain(b.clone(), a.clone()),
        CascadeFactor::Perm(p) => CascadeFactor::Perm(*p),
    }
}

/// Uₙ with the delay Λₙ to its right (χ(Λₙ) = χ(Uₙ)).
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub chi: u8,
    pub filter: CausalPoly,
    pub delay_m: usize,
}

/// diag(κ₀z^{-ρ₀}, κ₁z^{-ρ₁})·U_{N-1}Λ_{N-1}⋯U₁Λ₁U₀·P₀·diag(z^{-c₀}, z^{-c₁}).
/// `steps[n]` holds (Uₙ, Λₙ); `steps[0].delay_m` is always 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Cascade {
    pub ctx: FieldContext,
    pub gains: (Scalar, Scalar),
    pub row_delays: (usize, usize),
    pub col_delays: (usize, usize),
    pub steps: Vec<Step>,
    pub p0: Perm,
}

impl Cascade {
    pub fn trivial(ctx: FieldContext) -> Self {
        Cascade {
            ctx,
            gains: (ctx.one(), ctx.one()),
            row_delays: (0, 0),
            col_delays: (0, 0),
            steps: Vec::new(),
            p0: Perm::I,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// χ₀, the update characteristic of U₀.
    pub fn chi0(&self) -> Option<u8> {
        self.steps.first().map(|s| s.chi)
    }

    /// Left-to-right factor list, gains and delays included.
    pub fn factors(&self) -> Vec<CascadeFactor> {
        let mut out = vec![CascadeFactor::Gain(self.gains.0.clone(), self.gains.1.clone())];
        if self.row_delays.0 > 0 {
            out.push(CascadeFactor::Delay { chi: 0, m: self.row_delays.0 });
        }
        if self.row_delays.1 > 0 {
            out.push(CascadeFactor::Delay { chi: 1, m: self.row_delays.1 });
        }
        for s in self.steps.iter().rev() {
            out.push(CascadeFactor::Lift { chi: s.chi, filter: s.filter.clone() });
            if s.delay_m > 0 {
                out.push(CascadeFactor::Delay { chi: s.chi, m: s.delay_m });
            }
        }
        if self.p0 == Perm::J {
            out.push(CascadeFactor::Perm(Perm::J));
        }
        if self.col_delays.0 > 0 {
            out.push(CascadeFactor::Delay { chi: 0, m: self.col_delays.0 });
        }
        if self.col_delays.1 > 0 {
            out.push(CascadeFactor::Delay { chi: 1, m: self.col_delays.1 });
        }
        out
    }

    pub fn expand(&self) -> PolyMatrix2 {
        expand_factors(&self.factors(), self.ctx)
    }

    /// The product without outer gains and delays: U_{N-1}Λ_{N-1}⋯U₀·P₀.
    pub fn core_matrix(&self) -> PolyMatrix2 {
        let mut m = PolyMatrix2::identity(self.ctx);
        for s in self.steps.iter().rev() {
            m = m.mul(&CascadeFactor::Lift { chi: s.chi, filter: s.filter.clone() }.matrix(self.ctx));
            if s.delay_m > 0 {
                m = m.mul(&CascadeFactor::Delay { chi: s.chi, m: s.delay_m }.matrix(self.ctx));
            }
        }
        m.mul(&self.p0.matrix(self.ctx))
    }

    /// Checks alternation, nonzero filters, and nonzero gains.
    pub fn validate(&self) -> Result<()> {
        let ctx = self.ctx;
        if ctx.is_zero(&self.gains.0) || ctx.is_zero(&self.gains.1) {
            return Err(Error::Invalid("zero gain".into()));
        }
        for (n, s) in self.steps.iter().enumerate() {
            if s.chi > 1 {
                return Err(Error::Invalid(format!("step {n}: chi must be 0 or 1")));
            }
            if s.filter.is_zero() {
                return Err(Error::Invalid(format!("step {n}: zero lifting filter")));
            }
            if n == 0 && s.delay_m != 0 {
                return Err(Error::Invalid("step 0 cannot carry a delay".into()));
            }
            if n > 0 && s.chi == self.steps[n - 1].chi {
                return Err(Error::Invalid(format!("step {n}: update characteristics must alternate")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> CascadeJson {
        CascadeJson {
            field: Some(self.ctx.to_string()),
            gains: [self.gains.0.to_string(), self.gains.1.to_string()],
            row_delays: [self.row_delays.0, self.row_delays.1],
            col_delays: [self.col_delays.0, self.col_delays.1],
            p0: match self.p0 {
                Perm::I => "I".into(),
                Perm::J => "J".into(),
            },
            steps: self
                .steps
                .iter()
                .map(|s| StepJson { chi: s.chi, filter: s.filter.to_coeff_strings(), delay_m: s.delay_m })
                .collect(),
        }
    }

    /// `ctx` is used when the JSON carries no `field`.
    pub fn from_json(j: &CascadeJson, ctx: FieldContext) -> Result<Cascade> {
        let ctx = match &j.field {
            Some(f) => f.parse()?,
            None => ctx,
        };
        let p0 = match j.p0.as_str() {
            "I" => Perm::I,
            "J" => Perm::J,
            other => return Err(Error::Invalid(format!("p0 must be I or J, got {other}"))),
        };
        let steps = j
            .steps
            .iter()
            .map(|s| {
                Ok(Step { chi: s.chi, filter: CausalPoly::from_coeff_strings(&s.filter, ctx)?, delay_m: s.delay_m })
            })
            .collect::<Result<Vec<_>>>()?;
        let c = Cascade {
            ctx,
            gains: (ctx.parse(&j.gains[0])?, ctx.parse(&j.gains[1])?),
            row_delays: (j.row_delays[0], j.row_delays[1]),
            col_delays: (j.col_delays[0], j.col_delays[1]),
            steps,
            p0,
        };
        c.validate()?;
        Ok(c)
    }

    /// Product display, left to right.
    pub fn display_product(&self) -> String {
        let mut parts = Vec::new();
        for f in self.factors() {
            parts.push(match f {
                CascadeFactor::Gain(a, b) => format!("diag({a}, {b})"),
                CascadeFactor::Delay { chi: 0, m } => format!("diag(z^-{m}, 1)"),
                CascadeFactor::Delay { m, .. } => format!("diag(1, z^-{m})"),
                CascadeFactor::Lift { chi: 0, filter } => format!("[1, {filter}; 0, 1]"),
                CascadeFactor::Lift { filter, .. } => format!("[1, 0; {filter}, 1]"),
                CascadeFactor::Perm(Perm::J) => "J".into(),
                CascadeFactor::Perm(Perm::I) => continue,
            });
        }
        parts.join(" · ")
    }
}

impl fmt::Display for Cascade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_product())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub chi: u8,
    pub filter: Vec<String>,
    pub delay_m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub gains: [String; 2],
    pub row_delays: [usize; 2],
    pub col_delays: [usize; 2],
    pub p0: String,
    pub steps: Vec<StepJson>,
}

pub fn expand_factors(factors: &[CascadeFactor], ctx: FieldContext) -> PolyMatrix2 {
    factors.iter().fold(PolyMatrix2::identity(ctx), |acc, f| acc.mul(&f.matrix(ctx)))
}

/// Rewrites an arbitrary factor list into standard causal lifting form.
pub fn normalize(factors: &[CascadeFactor], ctx: FieldContext) -> Result<Cascade> {
    normalize_counted(factors, ctx, &mut OpCounter::new())
}

/// As [`normalize`], charging one SP mult per gain-lift intertwining.
pub fn normalize_counted(factors: &[CascadeFactor], ctx: FieldContext, counter: &mut OpCounter) -> Result<Cascade> {
    let (mut k0, mut k1) = (ctx.one(), ctx.one());
    let mut body: Vec<CascadeFactor> = Vec::new();
    for f in factors {
        match f {
            CascadeFactor::Gain(a, b) => {
                if ctx.is_zero(a) || ctx.is_zero(b) {
                    return Err(Error::NotPerfectReconstruction("zero gain".into()));
                }
                let (mut g0, mut g1) = (a.clone(), b.clone());
                for r in body.iter_mut().rev() {
                    match r {
                        CascadeFactor::Perm(Perm::J) => std::mem::swap(&mut g0, &mut g1),
                        CascadeFactor::Lift { .. } => *r = gain_intertwine_counted(r, &g0, &g1, counter),
                        _ => {}
                    }
                }
                k0 = &k0 * &g0;
                k1 = &k1 * &g1;
            }
            CascadeFactor::Perm(Perm::I) => {}
            other => body.push(other.clone()),
        }
    }

    let mut p0 = Perm::I;
    let mut lin: Vec<CascadeFactor> = Vec::new();
    for f in body.into_iter().rev() {
        match f {
            CascadeFactor::Perm(Perm::J) => {
                p0 = p0.compose(Perm::J);
                for r in lin.iter_mut() {
                    *r = swap_conjugate(r);
                }
            }
            other => lin.push(other),
        }
    }
    lin.reverse();

    let mut rho = [0usize; 2];
    let mut col = [0usize; 2];
    loop {
        let before = lin.clone();
        lin.retain(|f| !matches!(f, CascadeFactor::Lift { filter, .. } if filter.is_zero()));
        lin.retain(|f| !matches!(f, CascadeFactor::Delay { m: 0, .. }));
        while let Some(CascadeFactor::Delay { chi, m }) = lin.first().cloned() {
            rho[chi as usize] += m;
            lin.remove(0);
        }
        while let Some(CascadeFactor::Delay { chi, m }) = lin.last().cloned() {
            let c = if p0 == Perm::J { 1 - chi } else { chi };
            col[c as usize] += m;
            lin.pop();
        }
        let mut i = 0;
        while i + 1 < lin.len() {
            let next = lin.get(i + 2).cloned();
            match (lin[i].clone(), lin[i + 1].clone()) {
                (CascadeFactor::Lift { chi: a, filter: u }, CascadeFactor::Lift { chi: b, filter: v }) if a == b => {
                    lin[i] = CascadeFactor::Lift { chi: a, filter: u.add(&v) };
                    lin.remove(i + 1);
                    continue;
                }
                (CascadeFactor::Delay { chi: a, m }, CascadeFactor::Delay { chi: b, m: n }) if a == b => {
                    lin[i] = CascadeFactor::Delay { chi: a, m: m + n };
                    lin.remove(i + 1);
                    continue;
                }
                (CascadeFactor::Lift { chi: a, filter: u }, CascadeFactor::Delay { chi: b, m }) => {
                    if a != b {
                        // U(V)·Δ = Δ·U(z⁻ᵐV) when χ(Δ) ≠ χ(U)
                        lin[i] = CascadeFactor::Delay { chi: b, m };
                        lin[i + 1] = CascadeFactor::Lift { chi: a, filter: u.shift(m) };
                        i = i.saturating_sub(1);
                        continue;
                    }
                    if let Some(CascadeFactor::Lift { chi: c, filter: v }) = next {
                        if c == a {
                            // U(V)·Δ·U(V′) = U(V + z⁻ᵐV′)·Δ
                            lin[i] = CascadeFactor::Lift { chi: a, filter: u.add(&v.shift(m)) };
                            lin[i + 1] = CascadeFactor::Delay { chi: a, m };
                            lin.remove(i + 2);
                            continue;
                        }
                    }
                }
                _ => {}
            }
            i += 1;
        }
        if lin == before {
            break;
        }
    }

    // Delays between lifts now carry the χ of their left lift.
    let mut steps: Vec<Step> = Vec::new();
    let mut pending = 0usize;
    for f in lin.iter().rev() {
        match f {
            CascadeFactor::Delay { m, .. } => pending += m,
            CascadeFactor::Lift { chi, filter } => {
                steps.push(Step { chi: *chi, filter: filter.clone(), delay_m: pending });
                pending = 0;
            }
            _ => unreachable!("gains and permutations were removed"),
        }
    }
    let c = Cascade {
        ctx,
        gains: (k0, k1),
        row_delays: (rho[0], rho[1]),
        col_delays: (col[0], col[1]),
        steps,
        p0,
    };
    c.validate().map_err(|e| Error::NotPerfectReconstruction(e.to_string()))?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldContext {
        FieldContext::rational()
    }

    fn p(s: &str) -> CausalPoly {
        CausalPoly::parse(s, q()).unwrap()
    }

    fn cdf75() -> PolyMatrix2 {
        PolyMatrix2::parse(
            [["(3+5z^-1+5z^-2+3z^-3)/32", "(-3+10z^-1-3z^-2)/8"], ["(1+6z^-1+z^-2)/8", "-(1+z^-1)/2"]],
            q(),
        )
        .unwrap()
    }

    #[test]
    fn determinants() {
        let (a, d) = cdf75().pr_check().unwrap();
        assert_eq!((a, d), (q().from_int(-1), 2));
        assert_eq!(PolyMatrix2::identity(q()).pr_check().unwrap(), (q().one(), 0));
        let bad = PolyMatrix2::parse([["1", "1"], ["1", "1+z^-1"]], q()).unwrap();
        assert!(bad.pr_check().is_ok());
        let bad = PolyMatrix2::parse([["1+z^-1", "1"], ["1", "1+z^-1"]], q()).unwrap();
        assert!(matches!(bad.pr_check(), Err(Error::NotPerfectReconstruction(_))));
    }

    #[test]
    fn coprimifications() {
        let h = PolyMatrix2::parse([["z^-1", "z^-1"], ["z^-2", "1+z^-2"]], q()).unwrap();
        let (d, q0) = coprimify(&h, Coprimification::Order(CoprimeOrder::RowsFirst)).unwrap();
        assert_eq!(d, [1, 0, 0, 0]);
        assert_eq!(q0, PolyMatrix2::parse([["1", "1"], ["z^-2", "1+z^-2"]], q()).unwrap());
        let (d, q0) = coprimify(&h, Coprimification::Order(CoprimeOrder::ColsFirst)).unwrap();
        assert_eq!(d, [0, 0, 1, 0]);
        assert_eq!(q0, PolyMatrix2::parse([["1", "z^-1"], ["z^-1", "1+z^-2"]], q()).unwrap());
        assert_eq!(coprimify(&cdf75(), Coprimification::default()).unwrap(), ([0; 4], cdf75()));
        assert!(matches!(
            coprimify(&h, Coprimification::Explicit([0, 0, 0, 0])),
            Err(Error::InvalidCoprimification(_))
        ));
        assert!(coprimify(&h, Coprimification::Explicit([0, 0, 1, 0])).is_ok());
    }

    #[test]
    fn intertwining_identity() {
        let v = CascadeFactor::lower(p("4(-1+5z^-1)"));
        let (k0, k1) = (q().from_int(-50), q().from_ratio(-1, 50));
        let v2 = gain_intertwine(&v, &k0, &k1);
        let d = CascadeFactor::Gain(k0.clone(), k1.clone());
        assert_eq!(expand_factors(&[d.clone(), v2.clone()], q()), expand_factors(&[v, d], q()));
        assert_eq!(v2, CascadeFactor::lower(p("10000(-1+5z^-1)")));
        let u = CascadeFactor::upper(p("1+z^-1"));
        assert_eq!(gain_intertwine(&u, &k0, &k0), u);
    }

    #[test]
    fn swap_conjugates() {
        let j = CascadeFactor::Perm(Perm::J);
        for f in [
            CascadeFactor::lower(p("2-z^-1")),
            CascadeFactor::Delay { chi: 0, m: 2 },
            CascadeFactor::Gain(q().from_int(3), q().from_int(5)),
        ] {
            let lhs = expand_factors(&[j.clone(), f.clone(), j.clone()], q());
            assert_eq!(lhs, swap_conjugate(&f).matrix(q()));
        }
        assert_eq!(swap_conjugate(&CascadeFactor::Delay { chi: 0, m: 1 }), CascadeFactor::Delay { chi: 1, m: 1 });
    }

    #[test]
    fn normalize_merges_same_chi_through_delay() {
        let list = vec![
            CascadeFactor::upper(p("1+z^-1")),
            CascadeFactor::Delay { chi: 0, m: 1 },
            CascadeFactor::upper(p("3")),
            CascadeFactor::Delay { chi: 0, m: 2 },
            CascadeFactor::lower(p("1")),
        ];
        let c = normalize(&list, q()).unwrap();
        assert_eq!(c.steps.len(), 2);
        assert_eq!(c.steps[1].filter, p("1+4z^-1"));
        assert_eq!(c.steps[1].delay_m, 3);
        assert_eq!(c.expand(), expand_factors(&list, q()));
    }

    #[test]
    fn normalize_moves_opposite_delay_left() {
        let list = vec![
            CascadeFactor::upper(p("2")),
            CascadeFactor::Delay { chi: 1, m: 1 },
            CascadeFactor::upper(p("5")),
        ];
        let c = normalize(&list, q()).unwrap();
        assert_eq!(c.row_delays, (0, 1));
        assert_eq!(c.steps.len(), 1);
        assert_eq!(c.steps[0].filter, p("2z^-1 + 5"));
        assert_eq!(c.expand(), expand_factors(&list, q()));
    }

    #[test]
    fn normalize_is_idempotent_and_exact() {
        let list = vec![
            CascadeFactor::upper(p("(-13+3z^-1)/4")),
            CascadeFactor::lower(p("(29+5z^-1)/100")),
            CascadeFactor::Gain(q().from_int(2), q().from_ratio(1, 2)),
            CascadeFactor::Perm(Perm::J),
            CascadeFactor::lower(p("1-z^-1")),
            CascadeFactor::Delay { chi: 1, m: 2 },
        ];
        let c = normalize(&list, q()).unwrap();
        assert_eq!(c.expand(), expand_factors(&list, q()));
        assert_eq!(normalize(&c.factors(), q()).unwrap(), c);
        assert_eq!(Cascade::trivial(q()).expand(), PolyMatrix2::identity(q()));
    }

    #[test]
    fn json_round_trip() {
        let list = vec![
            CascadeFactor::Gain(q().from_int(-50), q().from_ratio(-1, 50)),
            CascadeFactor::upper(p("(-13+3z^-1)/10000")),
            CascadeFactor::Delay { chi: 0, m: 2 },
            CascadeFactor::lower(p("-4+20z^-1")),
            CascadeFactor::Perm(Perm::J),
        ];
        let c = normalize(&list, q()).unwrap();
        let text = serde_json::to_string(&c.to_json()).unwrap();
        let back: CascadeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Cascade::from_json(&back, q()).unwrap(), c);
    }
}
