//! Causal polynomials in z⁻¹ and the counted polynomial operations.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldContext, ParseError, Scalar, ScalarParser};

/// Polynomial degree; `Bottom` is the degree of the zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    Bottom,
    Fin(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Bottom => None,
            Degree::Fin(n) => Some(n),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Bottom => write!(f, "⊥"),
            Degree::Fin(n) => write!(f, "{n}"),
        }
    }
}

/// F(z) = Σ f(n) z⁻ⁿ; `coeffs[n]` is f(n). Always trimmed.
#[derive(Clone, Debug)]
pub struct CausalPoly {
    coeffs: Vec<Scalar>,
    ctx: FieldContext,
}

impl PartialEq for CausalPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl CausalPoly {
    pub fn new(coeffs: Vec<Scalar>, ctx: FieldContext) -> Self {
        let mut p = CausalPoly { coeffs, ctx };
        p.trim();
        p
    }

    /// Coerces every coefficient into `ctx`.
    pub fn try_new(coeffs: Vec<Scalar>, ctx: FieldContext) -> Result<Self> {
        let coeffs = coeffs.iter().map(|c| ctx.coerce(c)).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CausalPoly::new(coeffs, ctx))
    }

    fn trim(&mut self) {
        while let Some(last) = self.coeffs.last() {
            if self.ctx.is_zero(last) {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn zero(ctx: FieldContext) -> Self {
        CausalPoly { coeffs: Vec::new(), ctx }
    }

    pub fn one(ctx: FieldContext) -> Self {
        CausalPoly::constant(ctx.one(), ctx)
    }

    pub fn constant(c: Scalar, ctx: FieldContext) -> Self {
        CausalPoly::new(vec![c], ctx)
    }

    /// c·z⁻ᵐ
    pub fn monomial(c: Scalar, m: usize, ctx: FieldContext) -> Self {
        let mut coeffs = vec![ctx.zero(); m];
        coeffs.push(c);
        CausalPoly::new(coeffs, ctx)
    }

    pub fn from_ints(vals: &[i64], ctx: FieldContext) -> Self {
        CausalPoly::new(vals.iter().map(|v| ctx.from_int(*v)).collect(), ctx)
    }

    /// Rationals given as (numerator, denominator) pairs.
    pub fn from_ratios(vals: &[(i64, i64)], ctx: FieldContext) -> Self {
        CausalPoly::new(vals.iter().map(|(p, q)| ctx.from_ratio(*p, *q)).collect(), ctx)
    }

    /// Compact coefficient-array form, e.g. `["3/32","5/32"]`.
    pub fn from_coeff_strings<S: AsRef<str>>(vals: &[S], ctx: FieldContext) -> Result<Self> {
        let coeffs = vals.iter().map(|s| ctx.parse(s.as_ref())).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CausalPoly::new(coeffs, ctx))
    }

    pub fn to_coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn parse(text: &str, ctx: FieldContext) -> Result<Self> {
        parse_poly(text, &ctx)
    }

    pub fn ctx(&self) -> FieldContext {
        self.ctx
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Scalar {
        self.coeffs.get(n).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn degree(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::Bottom
        } else {
            Degree::Fin(self.coeffs.len() - 1)
        }
    }

    /// Degree as an integer; callers must have ruled out zero.
    fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest M with z⁻ᴹ | F.
    pub fn multiplicity(&self) -> Result<usize> {
        self.coeffs.iter().position(|c| !self.ctx.is_zero(c)).ok_or(Error::ZeroPolynomial)
    }

    pub fn is_left_justified(&self) -> bool {
        self.multiplicity() == Ok(0)
    }

    /// Nonzero with a single nonzero coefficient.
    pub fn is_monomial(&self) -> bool {
        !self.is_zero() && self.coeffs.iter().filter(|c| !self.ctx.is_zero(c)).count() == 1
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.coeffs.len() {
            0 => Some(self.ctx.zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn is_plus_minus_one(&self) -> bool {
        self.coeffs.len() == 1 && (self.coeffs[0].is_one() || self.coeffs[0].is_minus_one())
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    /// z⁻ᵐ·F
    pub fn shift(&self, m: usize) -> Self {
        if self.is_zero() || m == 0 {
            return self.clone();
        }
        let mut coeffs = vec![self.ctx.zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        CausalPoly { coeffs, ctx: self.ctx }
    }

    /// zᵐ·F; requires z⁻ᵐ | F.
    pub fn unshift(&self, m: usize) -> Result<Self> {
        if self.is_zero() || m == 0 {
            return Ok(self.clone());
        }
        if self.multiplicity()? < m {
            return Err(Error::InexactDivision);
        }
        Ok(CausalPoly { coeffs: self.coeffs[m..].to_vec(), ctx: self.ctx })
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        CausalPoly::new(self.coeffs.iter().map(|c| c * s).collect(), self.ctx)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        CausalPoly::new(coeffs, self.ctx)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect();
        CausalPoly::new(coeffs, self.ctx)
    }

    pub fn neg(&self) -> Self {
        CausalPoly { coeffs: self.coeffs.iter().map(|c| -c).collect(), ctx: self.ctx }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return CausalPoly::zero(self.ctx);
        }
        let mut coeffs = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.ctx.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        CausalPoly::new(coeffs, self.ctx)
    }

    /// Division known to be exact; fails with `InexactDivision` otherwise.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = divide(self, divisor, 0)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// Value at z = e^{jω}, as (re, im).
    pub fn eval_unit_circle(&self, omega: f64) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64();
            let t = -(n as f64) * omega;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }

    /// Exact value at z⁻¹ = x.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(Scalar::to_f64).collect()
    }

    pub fn coerce(&self, ctx: FieldContext) -> Result<Self> {
        CausalPoly::try_new(self.coeffs.clone(), ctx)
    }
}

fn needs_parens(c: &Scalar) -> bool {
    use num_traits::Zero;
    matches!(c, Scalar::Quadratic { a, b, .. } if !a.is_zero() && !b.is_zero())
}

impl fmt::Display for CausalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if self.ctx.is_zero(c) {
                continue;
            }
            let body = if n == 0 {
                if needs_parens(c) {
                    format!("({c})")
                } else {
                    c.to_string()
                }
            } else if c.is_one() {
                format!("z^-{n}")
            } else if c.is_minus_one() {
                format!("-z^-{n}")
            } else if needs_parens(c) {
                format!("({c})*z^-{n}")
            } else {
                format!("{c}*z^-{n}")
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// Parses polynomial text: sums and products of scalars and powers of z⁻¹,
/// e.g. `(1 + 6z^-1 + z^-2)/8`, `-z^-1(1+z^-1)/2`, `725 + 125*z^-1`.
/// Division is by nonzero constants only.
pub fn parse_poly(text: &str, ctx: &FieldContext) -> Result<CausalPoly> {
    let chars: Vec<char> = text
        .chars()
        .map(|c| match c {
            '−' | '–' => '-',
            '·' | '×' => '*',
            c => c,
        })
        .collect();
    let mut p = PolyParser { s: &chars, pos: 0, ctx };
    p.skip_ws();
    if p.pos >= chars.len() {
        return Err(ParseError::new(0, "empty polynomial").into());
    }
    let v = p.sum()?;
    p.skip_ws();
    if p.pos < chars.len() {
        return Err(ParseError::new(p.pos, format!("unexpected '{}'", chars[p.pos])).into());
    }
    Ok(v)
}

struct PolyParser<'a> {
    s: &'a [char],
    pos: usize,
    ctx: &'a FieldContext,
}

const SUPERSCRIPT_DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

impl<'a> PolyParser<'a> {
    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn err(&self, at: usize, msg: impl Into<String>) -> Error {
        ParseError::new(at, msg).into()
    }

    fn sum(&mut self) -> Result<CausalPoly> {
        self.skip_ws();
        let mut negate = false;
        match self.peek() {
            Some('-') => {
                negate = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.product()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn scalar_parser(&self) -> ScalarParser<'a> {
        ScalarParser { s: self.s, pos: self.pos, ctx: self.ctx }
    }

    fn starts_radical(&self) -> bool {
        self.scalar_parser().starts_radical()
    }

    fn product(&mut self) -> Result<CausalPoly> {
        let mut acc = self.atom()?;
        loop {
            self.skip_ws();
            let at = self.pos;
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.atom()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.atom()?;
                    let c = rhs.as_constant().ok_or_else(|| self.err(at, "division by a non-constant"))?;
                    if self.ctx.is_zero(&c) {
                        return Err(self.err(at, "division by zero"));
                    }
                    let inv = c.try_recip()?;
                    acc = acc.scale(&inv);
                }
                Some('(' | 'z') => acc = acc.mul(&self.atom()?),
                _ if self.starts_radical() => acc = acc.mul(&self.atom()?),
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<CausalPoly> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.err(start, "unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            Some('z') => {
                self.pos += 1;
                let m = self.z_exponent(start)?;
                Ok(CausalPoly::monomial(self.ctx.one(), m, *self.ctx))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut sp = self.scalar_parser();
                let v = sp.number()?;
                self.pos = sp.pos;
                Ok(CausalPoly::constant(v, *self.ctx))
            }
            _ if self.starts_radical() => {
                let mut sp = self.scalar_parser();
                let v = sp.radical()?;
                self.pos = sp.pos;
                Ok(CausalPoly::constant(v, *self.ctx))
            }
            Some(c) => Err(self.err(start, format!("unexpected '{c}'"))),
        }
    }

    /// After `z`: `^-n`, `^(-n)`, `^{-n}`, `⁻ⁿ`, or `^0`.
    fn z_exponent(&mut self, start: usize) -> Result<usize> {
        if self.peek() == Some('⁻') {
            self.pos += 1;
            let mut n = String::new();
            while let Some(c) = self.peek() {
                match SUPERSCRIPT_DIGITS.iter().position(|d| *d == c) {
                    Some(d) => {
                        n.push(char::from(b'0' + d as u8));
                        self.pos += 1;
                    }
                    None => break,
                }
            }
            return n.parse().map_err(|_| self.err(start, "bad exponent"));
        }
        if self.peek() != Some('^') {
            return Err(self.err(start, "noncausal term z (use z^-n)"));
        }
        self.pos += 1;
        let close = match self.peek() {
            Some('(') => Some(')'),
            Some('{') => Some('}'),
            _ => None,
        };
        if close.is_some() {
            self.pos += 1;
        }
        let neg = self.peek() == Some('-');
        if neg {
            self.pos += 1;
        }
        let mut n = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                n.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        let m: usize = n.parse().map_err(|_| self.err(start, "bad exponent"))?;
        if let Some(c) = close {
            if self.peek() != Some(c) {
                return Err(self.err(self.pos, format!("expected '{c}'")));
            }
            self.pos += 1;
        }
        if !neg && m != 0 {
            return Err(self.err(start, "noncausal term z^n"));
        }
        Ok(m)
    }
}

/// Tallies of polynomial operations in the Table-1 categories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounter {
    pub pp_add: u64,
    pub sp_mult: u64,
    pub pp_mult: u64,
    pub p_div: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        OpCounter::default()
    }

    pub fn as_tuple(&self) -> (u64, u64, u64, u64) {
        (self.pp_add, self.sp_mult, self.pp_mult, self.p_div)
    }
}

impl fmt::Display for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.pp_add, self.sp_mult, self.pp_mult, self.p_div)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    PpAdd,
    PpMult,
    SpMult,
}

/// Product charged by operand shape: free when either side is 0 or ±1 or both
/// are monomials, SP when exactly one is a monomial, PP otherwise.
pub fn counted_mul(a: &CausalPoly, b: &CausalPoly, counter: &mut OpCounter) -> CausalPoly {
    if a.is_zero() || b.is_zero() || a.is_plus_minus_one() || b.is_plus_minus_one() {
    } else {
        match (a.is_monomial(), b.is_monomial()) {
            (true, true) => {}
            (true, false) | (false, true) => counter.sp_mult += 1,
            (false, false) => counter.pp_mult += 1,
        }
    }
    a.mul(b)
}

fn charge_add(a: &CausalPoly, b: &CausalPoly, counter: &mut OpCounter) {
    let poly_like = |p: &CausalPoly| !p.is_zero() && !p.is_monomial();
    if poly_like(a) && poly_like(b) {
        counter.pp_add += 1;
    }
}

/// Sum; a PP add only when both operands are non-monomial.
pub fn counted_add(a: &CausalPoly, b: &CausalPoly, counter: &mut OpCounter) -> CausalPoly {
    charge_add(a, b, counter);
    a.add(b)
}

pub fn counted_sub(a: &CausalPoly, b: &CausalPoly, counter: &mut OpCounter) -> CausalPoly {
    charge_add(a, b, counter);
    a.sub(b)
}

/// Explicitly classified operation; `SpMult` needs a unit or monomial operand.
pub fn counted_arith(a: &CausalPoly, b: &CausalPoly, kind: OpKind, counter: &mut OpCounter) -> Result<CausalPoly> {
    match kind {
        OpKind::PpAdd => {
            counter.pp_add += 1;
            Ok(a.add(b))
        }
        OpKind::PpMult => {
            counter.pp_mult += 1;
            Ok(a.mul(b))
        }
        OpKind::SpMult => {
            if !(a.is_monomial() || b.is_monomial()) {
                return Err(Error::PreconditionViolated("SP mult needs a unit or monomial operand".into()));
            }
            counter.sp_mult += 1;
            Ok(a.mul(b))
        }
    }
}

fn charge_div(f: &CausalPoly, counter: &mut OpCounter) {
    if f.is_monomial() {
        counter.sp_mult += 1;
    } else {
        counter.p_div += 1;
    }
}

/// E = F·S + R with deg R < deg F.
pub fn classical_divide(e: &CausalPoly, f: &CausalPoly, counter: &mut OpCounter) -> Result<(CausalPoly, CausalPoly)> {
    let out = divide(e, f, 0)?;
    charge_div(f, counter);
    Ok(out)
}

/// Slightly generalized division: the unique (S, R) with E = F·S + R,
/// z⁻ᴹ | R and deg R < deg F + M.
pub fn sgda_divide(
    e: &CausalPoly,
    f: &CausalPoly,
    m: usize,
    counter: &mut OpCounter,
) -> Result<(CausalPoly, CausalPoly)> {
    let out = divide(e, f, m)?;
    charge_div(f, counter);
    Ok(out)
}

/// Two-ended elimination: low quotient coefficients bottom-up through f(0),
/// the rest top-down through the leading coefficient.
#[allow(clippy::needless_range_loop)]
fn divide(e: &CausalPoly, f: &CausalPoly, m: usize) -> Result<(CausalPoly, CausalPoly)> {
    if f.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let ctx = f.ctx;
    let df = f.deg();
    if m > 0 && ctx.is_zero(&f.coeffs[0]) {
        return Err(Error::DivisorNotLeftJustified);
    }
    let de = if e.is_zero() { None } else { Some(e.deg()) };
    let s_len = match de {
        Some(de) if de >= df + m => de - df + 1,
        _ => m,
    };
    let mut s = vec![ctx.zero(); s_len];
    if m > 0 {
        let f0 = f.coeffs[0].try_recip()?;
        for k in 0..m.min(s_len) {
            let mut acc = e.coeff(k);
            for j in 0..k {
                acc = &acc - &(&s[j] * &f.coeff(k - j));
            }
            s[k] = &acc * &f0;
        }
    }
    if let Some(de) = de {
        if de >= df + m {
            let lead = f.coeffs[df].try_recip()?;
            for k in (m..s_len).rev() {
                let mut acc = e.coeff(k + df);
                for j in (k + 1)..s_len {
                    if j <= k + df {
                        acc = &acc - &(&s[j] * &f.coeff(k + df - j));
                    }
                }
                s[k] = &acc * &lead;
            }
        }
    }
    let s = CausalPoly::new(s, ctx);
    let r = e.sub(&f.mul(&s));
    let mut rc = r.coeffs;
    let bound = df + m;
    for (k, c) in rc.iter_mut().enumerate() {
        if k < m || k >= bound {
            *c = ctx.zero();
        }
    }
    Ok((s, CausalPoly::new(rc, ctx)))
}

/// min multiplicity over the nonzero entries.
pub fn monomial_gcd(fs: &[&CausalPoly]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for f in fs.iter().filter(|f| !f.is_zero()) {
        let m = f.multiplicity()?;
        best = Some(best.map_or(m, |b| b.min(m)));
    }
    best.ok_or(Error::AllZero)
}

/// Orders by degree with `Bottom` least.
pub fn cmp_degree(a: &CausalPoly, b: &CausalPoly) -> Ordering {
    a.degree().cmp(&b.degree())
}
