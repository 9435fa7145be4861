//! Coefficient fields: exact rationals, a quadratic extension Q(√d) with one
//! radicand per context, and floating point with an explicit zero tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default zero tolerance for the float realization.
pub const DEFAULT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed realizations: {0} and {1}")]
    MixedRealizations(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Realization {
    Rational,
    Quadratic(u64),
    Float,
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realization::Rational => write!(f, "rational"),
            Realization::Quadratic(d) => write!(f, "quadratic:{d}"),
            Realization::Float => write!(f, "float"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldContext {
    pub realization: Realization,
    /// Zero tolerance; always 0 for exact realizations.
    pub eps: f64,
}

impl Default for FieldContext {
    fn default() -> Self {
        FieldContext::rational()
    }
}

fn is_squarefree(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl FieldContext {
    pub fn rational() -> Self {
        FieldContext { realization: Realization::Rational, eps: 0.0 }
    }

    /// Q(√d); `d` must be square-free and at least 2.
    pub fn quadratic(d: u64) -> Result<Self, ParseError> {
        if d < 2 || !is_squarefree(d) {
            return Err(ParseError::new(0, format!("radicand {d} is not a square-free integer > 1")));
        }
        Ok(FieldContext { realization: Realization::Quadratic(d), eps: 0.0 })
    }

    pub fn float(eps: f64) -> Self {
        FieldContext { realization: Realization::Float, eps: eps.max(0.0) }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.realization, Realization::Float)
    }

    pub fn zero(&self) -> Scalar {
        self.from_rational(BigRational::zero())
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(BigRational::one())
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(&self, p: i64, q: i64) -> Scalar {
        self.from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(&self, r: BigRational) -> Scalar {
        match self.realization {
            Realization::Rational => Scalar::Rational(r),
            Realization::Quadratic(d) => Scalar::Quadratic { a: r, b: BigRational::zero(), d },
            Realization::Float => Scalar::Float(r.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Moves a scalar into this context; fails when it cannot be represented.
    pub fn coerce(&self, s: &Scalar) -> Result<Scalar, FieldError> {
        match (self.realization, s) {
            (Realization::Float, x) => Ok(Scalar::Float(x.to_f64())),
            (_, Scalar::Rational(r)) => Ok(self.from_rational(r.clone())),
            (Realization::Quadratic(d), Scalar::Quadratic { a, b, d: e }) if d == *e || b.is_zero() => {
                Ok(Scalar::Quadratic { a: a.clone(), b: b.clone(), d })
            }
            (Realization::Rational, Scalar::Quadratic { a, b, .. }) if b.is_zero() => {
                Ok(Scalar::Rational(a.clone()))
            }
            (r, x) => Err(FieldError::MixedRealizations(r.to_string(), x.realization().to_string())),
        }
    }

    pub fn is_zero(&self, s: &Scalar) -> bool {
        match s {
            Scalar::Float(v) => v.abs() <= self.eps,
            other => other.is_exact_zero(),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Scalar, ParseError> {
        parse_scalar(text, self)
    }
}

impl fmt::Display for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.realization {
            Realization::Float if self.eps != DEFAULT_EPS => write!(f, "float:{}", self.eps),
            r => write!(f, "{r}"),
        }
    }
}

impl FromStr for FieldContext {
    type Err = ParseError;

    /// Accepts `rational`, `quadratic:d`, `float` and `float:eps`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "rational" {
            return Ok(FieldContext::rational());
        }
        if s == "float" {
            return Ok(FieldContext::float(DEFAULT_EPS));
        }
        if let Some(rest) = s.strip_prefix("float:") {
            let eps: f64 = rest.trim().parse().map_err(|_| ParseError::new(6, "bad tolerance"))?;
            return Ok(FieldContext::float(eps));
        }
        if let Some(rest) = s.strip_prefix("quadratic:") {
            let d: u64 = rest.trim().parse().map_err(|_| ParseError::new(10, "bad radicand"))?;
            return FieldContext::quadratic(d);
        }
        Err(ParseError::new(0, format!("unknown field '{s}'")))
    }
}

/// A field element in one of the three realizations.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(BigRational),
    /// a + b√d
    Quadratic { a: BigRational, b: BigRational, d: u64 },
    Float(f64),
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        use Scalar::*;
        match (self, other) {
            (Rational(x), Rational(y)) => x == y,
            (Rational(x), Quadratic { a, b, .. }) | (Quadratic { a, b, .. }, Rational(x)) => b.is_zero() && a == x,
            (Quadratic { a, b, d }, Quadratic { a: a2, b: b2, d: d2 }) => {
                a == a2 && b == b2 && (d == d2 || b.is_zero())
            }
            (Float(x), Float(y)) => x == y,
            _ => false,
        }
    }
}

impl Scalar {
    pub fn realization(&self) -> Realization {
        match self {
            Scalar::Rational(_) => Realization::Rational,
            Scalar::Quadratic { d, .. } => Realization::Quadratic(*d),
            Scalar::Float(_) => Realization::Float,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Quadratic { a, b, .. } => a.is_zero() && b.is_zero(),
            Scalar::Float(v) => *v == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Quadratic { a, b, .. } => a.is_one() && b.is_zero(),
            Scalar::Float(v) => *v == 1.0,
        }
    }

    pub fn is_minus_one(&self) -> bool {
        (-self).is_one()
    }

    /// Embedding into double precision (quadratic elements evaluated at √d).
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Quadratic { a, b, d } => {
                a.to_f64().unwrap_or(f64::NAN) + b.to_f64().unwrap_or(f64::NAN) * (*d as f64).sqrt()
            }
            Scalar::Float(v) => *v,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Quadratic { a, b, .. } if b.is_zero() => Some(a),
            _ => None,
        }
    }

    fn mixed(&self, other: &Scalar) -> FieldError {
        FieldError::MixedRealizations(self.realization().to_string(), other.realization().to_string())
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        use Scalar::*;
        match (self, other) {
            (Rational(x), Rational(y)) => Ok(Rational(x + y)),
            (Quadratic { a, b, d }, Quadratic { a: a2, b: b2, d: d2 }) if d == d2 => {
                Ok(Quadratic { a: a + a2, b: b + b2, d: *d })
            }
            (Float(x), Float(y)) => Ok(Float(x + y)),
            _ => Err(self.mixed(other)),
        }
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        use Scalar::*;
        match (self, other) {
            (Rational(x), Rational(y)) => Ok(Rational(x * y)),
            (Quadratic { a, b, d }, Quadratic { a: a2, b: b2, d: d2 }) if d == d2 => {
                let dd = BigRational::from_integer(BigInt::from(*d));
                Ok(Quadratic { a: a * a2 + b * b2 * dd, b: a * b2 + a2 * b, d: *d })
            }
            (Float(x), Float(y)) => Ok(Float(x * y)),
            _ => Err(self.mixed(other)),
        }
    }

    pub fn try_recip(&self) -> Result<Scalar, FieldError> {
        use Scalar::*;
        if self.is_exact_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match self {
            Rational(x) => Ok(Rational(x.recip())),
            Quadratic { a, b, d } => {
                let dd = BigRational::from_integer(BigInt::from(*d));
                let norm = a * a - b * b * dd;
                Ok(Quadratic { a: a / &norm, b: -(b / &norm), d: *d })
            }
            Float(x) => Ok(Float(1.0 / x)),
        }
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        if self.realization() != other.realization() {
            return Err(self.mixed(other));
        }
        self.try_mul(&other.try_recip()?)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl std::ops::$tr<&Scalar> for &Scalar {
            type Output = Scalar;
            /// Panics when the operands come from different realizations; use
            /// the `try_` form when that is not already guaranteed.
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$try(rhs).expect("scalar arithmetic")
            }
        }
        impl std::ops::$tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$try(&rhs).expect("scalar arithmetic")
            }
        }
    };
}

scalar_binop!(Add, add, try_add);
scalar_binop!(Sub, sub, try_sub);
scalar_binop!(Mul, mul, try_mul);
scalar_binop!(Div, div, try_div);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(x) => Scalar::Rational(-x),
            Scalar::Quadratic { a, b, d } => Scalar::Quadratic { a: -a, b: -b, d: *d },
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", fmt_rational(r)),
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Quadratic { a, b, d } => {
                if b.is_zero() {
                    return write!(f, "{}", fmt_rational(a));
                }
                let mag = b.abs();
                let coef = if mag.is_one() { String::new() } else { fmt_rational(&mag) };
                let radical = format!("{coef}√{d}");
                if a.is_zero() {
                    if b.is_negative() {
                        write!(f, "-{radical}")
                    } else {
                        write!(f, "{radical}")
                    }
                } else {
                    let sign = if b.is_negative() { '-' } else { '+' };
                    write!(f, "{}{sign}{radical}", fmt_rational(a))
                }
            }
        }
    }
}

/// Same as `format!("{s}")`.
pub fn format_scalar(s: &Scalar) -> String {
    s.to_string()
}

/// Parses the scalar grammar: `p/q`, `a`, `a+b√d`, `a-b√d`, decimals, and
/// parenthesized forms such as `(3+√3)/2`. `sqrt(d)` is accepted for `√d`
/// and the Unicode minus for `-`.
pub fn parse_scalar(text: &str, ctx: &FieldContext) -> Result<Scalar, ParseError> {
    let chars: Vec<char> = text
        .chars()
        .map(|c| match c {
            '−' | '–' => '-',
            '·' | '×' => '*',
            c => c,
        })
        .collect();
    let mut p = ScalarParser { s: &chars, pos: 0, ctx };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::new(0, "empty scalar"));
    }
    let v = p.sum()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(ParseError::new(p.pos, format!("unexpected '{}'", chars[p.pos])));
    }
    Ok(v)
}

pub(crate) struct ScalarParser<'a> {
    pub s: &'a [char],
    pub pos: usize,
    pub ctx: &'a FieldContext,
}

impl<'a> ScalarParser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).copied()
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn arith(&self, r: Result<Scalar, FieldError>, at: usize) -> Result<Scalar, ParseError> {
        r.map_err(|e| ParseError::new(at, e.to_string()))
    }

    pub fn sum(&mut self) -> Result<Scalar, ParseError> {
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
            acc = -acc;
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(op @ ('+' | '-')) => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.product()?;
                    acc = if op == '+' {
                        self.arith(acc.try_add(&rhs), at)?
                    } else {
                        self.arith(acc.try_sub(&rhs), at)?
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    pub(crate) fn starts_radical(&self) -> bool {
        match self.peek() {
            Some('√') => true,
            Some('s') => self.s[self.pos..].starts_with(&['s', 'q', 'r', 't']),
            _ => false,
        }
    }

    fn product(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.atom()?;
        loop {
            self.skip_ws();
            let at = self.pos;
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let rhs = self.atom()?;
                    acc = self.arith(acc.try_mul(&rhs), at)?;
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.atom()?;
                    if self.ctx.is_zero(&rhs) {
                        return Err(ParseError::new(at, "division by zero"));
                    }
                    acc = self.arith(acc.try_div(&rhs), at)?;
                }
                Some('(') => {
                    let rhs = self.atom()?;
                    acc = self.arith(acc.try_mul(&rhs), at)?;
                }
                _ if self.starts_radical() => {
                    let rhs = self.atom()?;
                    acc = self.arith(acc.try_mul(&rhs), at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<Scalar, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::new(start, "unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(ParseError::new(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some('-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            _ if self.starts_radical() => self.radical(),
            Some(c) => Err(ParseError::new(start, format!("unexpected '{c}'"))),
        }
    }

    fn digits(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                out.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        out
    }

    pub(crate) fn number(&mut self) -> Result<Scalar, ParseError> {
        let start = self.pos;
        let int_part = self.digits();
        let mut frac_part = String::new();
        if self.peek() == Some('.') {
            self.pos += 1;
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseError::new(start, "expected a number"));
        }
        let mut exp: i64 = 0;
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.peek() {
                Some('-') => {
                    self.pos += 1;
                    true
                }
                Some('+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let e = self.digits();
            if e.is_empty() {
                self.pos = save;
            } else {
                exp = e.parse().map_err(|_| ParseError::new(save, "exponent out of range"))?;
                if neg {
                    exp = -exp;
                }
            }
        }
        if !self.ctx.is_exact() {
            let text: String = self.s[start..self.pos].iter().collect();
            let v: f64 = text.parse().map_err(|_| ParseError::new(start, "bad decimal"))?;
            return Ok(Scalar::Float(v));
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}")
            .parse()
            .map_err(|_| ParseError::new(start, "bad number"))?;
        let scale = exp - frac_part.len() as i64;
        let ten = BigInt::from(10);
        let r = if scale >= 0 {
            BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(self.ctx.from_rational(r))
    }

    pub(crate) fn radical(&mut self) -> Result<Scalar, ParseError> {
        let start = self.pos;
        let n: u64 = if self.peek() == Some('√') {
            self.pos += 1;
            self.skip_ws();
            let paren = self.peek() == Some('(');
            if paren {
                self.pos += 1;
            }
            let d = self.digits();
            if paren {
                if self.peek() != Some(')') {
                    return Err(ParseError::new(self.pos, "expected ')'"));
                }
                self.pos += 1;
            }
            d.parse().map_err(|_| ParseError::new(start, "expected radicand"))?
        } else {
            self.pos += 4;
            self.skip_ws();
            let paren = self.peek() == Some('(');
            if paren {
                self.pos += 1;
            }
            let d = self.digits();
            if paren {
                if self.peek() != Some(')') {
                    return Err(ParseError::new(self.pos, "expected ')'"));
                }
                self.pos += 1;
            }
            d.parse().map_err(|_| ParseError::new(start, "expected radicand"))?
        };
        match self.ctx.realization {
            Realization::Float => Ok(Scalar::Float((n as f64).sqrt())),
            Realization::Rational => {
                let r = n.sqrt();
                if r * r == n {
                    Ok(self.ctx.from_int(r as i64))
                } else {
                    Err(ParseError::new(start, format!("√{n} is not in the rational field")))
                }
            }
            Realization::Quadratic(d) => {
                let r = n.sqrt();
                if r * r == n {
                    return Ok(self.ctx.from_int(r as i64));
                }
                if n.is_multiple_of(d) {
                    let k = n / d;
                    let kr = k.sqrt();
                    if kr * kr == k {
                        return Ok(Scalar::Quadratic {
                            a: BigRational::zero(),
                            b: BigRational::from_integer(BigInt::from(kr)),
                            d,
                        });
                    }
                }
                Err(ParseError::new(start, format!("√{n} is not in Q(√{d})")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> FieldContext {
        FieldContext::quadratic(3).unwrap()
    }

    #[test]
    fn rational_add() {
        let c = FieldContext::rational();
        assert_eq!(c.from_ratio(1, 8) + c.from_ratio(6, 8), c.from_ratio(7, 8));
    }

    #[test]
    fn conjugate_product() {
        let c = q3();
        let x = c.parse("1+√3").unwrap();
        let y = c.parse("√3-1").unwrap();
        assert_eq!(&x * &y, c.from_int(2));
    }

    #[test]
    fn gain_pair_product() {
        // (a + b√3)(a' + b'√3) = (aa' + 3bb') + (ab' + a'b)√3 with a=3/2, b=1/2, a'=1, b'=-1/3
        let c = q3();
        let x = c.parse("(3+√3)/2").unwrap();
        let y = c.parse("(3-√3)/3").unwrap();
        let (a, b, a2, b2) = (1.5f64, 0.5, 1.0, -1.0 / 3.0);
        assert!((a * a2 + 3.0 * b * b2 - 1.0).abs() < 1e-15 && (a * b2 + a2 * b).abs() < 1e-15);
        assert_eq!(&x * &y, c.one());
    }

    #[test]
    fn zero_predicates() {
        assert!(FieldContext::rational().is_zero(&FieldContext::rational().from_ratio(0, 1)));
        let f = FieldContext::float(1e-12);
        assert!(f.is_zero(&Scalar::Float(1e-15)));
        assert!(!f.is_zero(&Scalar::Float(1e-9)));
        let c = q3();
        let v = &c.one() - &(&c.parse("√3").unwrap() * &c.parse("√3/3").unwrap());
        assert!(c.is_zero(&v));
    }

    #[test]
    fn parse_forms() {
        let r = FieldContext::rational();
        assert_eq!(r.parse("-13/4").unwrap(), r.from_ratio(-13, 4));
        assert_eq!(r.parse("725").unwrap().to_string(), "725");
        assert_eq!(r.parse("0.06").unwrap(), r.from_ratio(3, 50));
        assert_eq!(r.parse("2.56e-6").unwrap(), r.from_ratio(256, 100_000_000));
        assert_eq!(r.parse("−(1 + 5)/4").unwrap(), r.from_ratio(-3, 2));
        let c = q3();
        let g = c.parse("(3+√3)/2").unwrap();
        assert_eq!(g, c.parse("3/2+1/2√3").unwrap());
        match &g {
            Scalar::Quadratic { a, b, d } => {
                assert_eq!(*d, 3);
                assert_eq!(a, &BigRational::new(3.into(), 2.into()));
                assert_eq!(b, &BigRational::new(1.into(), 2.into()));
            }
            _ => panic!("expected quadratic"),
        }
        assert_eq!(g.to_string(), "3/2+1/2√3");
        assert_eq!(c.parse("sqrt(12)").unwrap(), c.parse("2√3").unwrap());
        assert_eq!(c.parse("-√3").unwrap().to_string(), "-√3");
        assert_eq!(c.parse("1-√3").unwrap().to_string(), "1-√3");
    }

    #[test]
    fn parse_errors_carry_position() {
        let r = FieldContext::rational();
        assert_eq!(r.parse("1/2 +").unwrap_err().pos, 5);
        assert_eq!(r.parse("√3").unwrap_err().pos, 0);
        assert_eq!(r.parse("3 x").unwrap_err().pos, 2);
        assert!(r.parse("1/0").is_err());
    }

    #[test]
    fn mixing_is_an_error() {
        let a = FieldContext::rational().one();
        let b = Scalar::Float(1.0);
        assert!(matches!(a.try_add(&b), Err(FieldError::MixedRealizations(..))));
        let q = q3().parse("√3").unwrap();
        assert!(a.try_mul(&q).is_err());
        assert_eq!(a, q3().one());
    }

    #[test]
    fn context_strings() {
        assert_eq!("quadratic:3".parse::<FieldContext>().unwrap(), q3());
        assert!("quadratic:12".parse::<FieldContext>().is_err());
        assert_eq!("float".parse::<FieldContext>().unwrap().eps, DEFAULT_EPS);
        assert_eq!(FieldContext::float(1e-9).to_string(), "float:0.000000001");
    }
}
