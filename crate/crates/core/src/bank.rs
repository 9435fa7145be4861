//! Filter banks, the polyphase-with-delay representation, and signal-domain
//! analysis/synthesis through lifting cascades.
//!
//! Convention: Hᵢ(z) = Hᵢ₀(z²) + z⁻¹Hᵢ₁(z²), so the subband outputs are
//! (y₀, y₁)ᵀ = H·(x_e, x_o)ᵀ with x_e(n) = x(2n) and x_o(n) = x(2n−1).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldContext, Scalar};
use crate::pmat::{Cascade, CascadeFactor, Perm, PolyMatrix2};
use crate::poly::CausalPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    pub h0: CausalPoly,
    pub h1: CausalPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Cdf75,
    Daub44,
    Lgt53,
    NonDoubleJust,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Cdf75, Builtin::Daub44, Builtin::Lgt53, Builtin::NonDoubleJust];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Cdf75 => "cdf75",
            Builtin::Daub44 => "daub44",
            Builtin::Lgt53 => "lgt53",
            Builtin::NonDoubleJust => "nondoublejust",
        }
    }

    pub fn ctx(self) -> FieldContext {
        match self {
            Builtin::Daub44 => FieldContext::quadratic(3).expect("3 is square-free"),
            _ => FieldContext::rational(),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Builtin> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Builtin::ALL.into_iter().find(|b| b.name() == key).ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

pub fn builtin(name: &str) -> Result<FilterBank> {
    Ok(builtin_bank(name.parse()?))
}

pub fn builtin_bank(b: Builtin) -> FilterBank {
    let ctx = b.ctx();
    let taps = |h0: &[&str], h1: &[&str]| FilterBank {
        h0: CausalPoly::from_coeff_strings(h0, ctx).expect("builtin taps"),
        h1: CausalPoly::from_coeff_strings(h1, ctx).expect("builtin taps"),
    };
    match b {
        Builtin::Cdf75 => taps(&["3/32", "-3/8", "5/32", "5/4", "5/32", "-3/8", "3/32"], &["1/8", "-1/2", "3/4", "-1/2", "1/8"]),
        Builtin::Daub44 => taps(
            &["(1+√3)/8", "(3+√3)/8", "(3-√3)/8", "(1-√3)/8"],
            &["(√3-1)/4", "(3-√3)/4", "-(3+√3)/4", "(1+√3)/4"],
        ),
        Builtin::Lgt53 => taps(&["-1/8", "2/8", "6/8", "2/8", "-1/8"], &["-1/2", "1", "-1/2"]),
        Builtin::NonDoubleJust => taps(&["2", "1", "1"], &["0", "1", "1"]),
    }
}

fn phases(h: &CausalPoly) -> (CausalPoly, CausalPoly) {
    let ctx = h.ctx();
    let c = h.coeffs();
    let even = c.iter().step_by(2).cloned().collect();
    let odd = c.iter().skip(1).step_by(2).cloned().collect();
    (CausalPoly::new(even, ctx), CausalPoly::new(odd, ctx))
}

fn interleave(e: &CausalPoly, o: &CausalPoly) -> CausalPoly {
    let ctx = e.ctx();
    let n = (e.coeffs().len() * 2).max(o.coeffs().len() * 2);
    let c = (0..n).map(|k| if k % 2 == 0 { e.coeff(k / 2) } else { o.coeff(k / 2) }).collect();
    CausalPoly::new(c, ctx)
}

impl FilterBank {
    pub fn ctx(&self) -> FieldContext {
        self.h0.ctx()
    }

    pub fn to_polyphase(&self) -> PolyMatrix2 {
        let (a, b) = phases(&self.h0);
        let (c, d) = phases(&self.h1);
        PolyMatrix2::new(a, b, c, d)
    }

    pub fn from_polyphase(h: &PolyMatrix2) -> Result<FilterBank> {
        h.pr_check()?;
        Ok(FilterBank { h0: interleave(&h.e[0][0], &h.e[0][1]), h1: interleave(&h.e[1][0], &h.e[1][1]) })
    }

    pub fn to_json(&self) -> BankJson {
        BankJson { h0: self.h0.to_coeff_strings(), h1: self.h1.to_coeff_strings(), field: Some(self.ctx().to_string()) }
    }

    /// `ctx` applies when the JSON carries no `field`.
    pub fn from_json(j: &BankJson, ctx: FieldContext) -> Result<FilterBank> {
        let ctx = match &j.field {
            Some(f) => f.parse()?,
            None => ctx,
        };
        let b = FilterBank {
            h0: CausalPoly::from_coeff_strings(&j.h0, ctx)?,
            h1: CausalPoly::from_coeff_strings(&j.h1, ctx)?,
        };
        b.to_polyphase().pr_check()?;
        Ok(b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankJson {
    pub h0: Vec<String>,
    pub h1: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

/// Finite-support sequence; `samples[k]` sits at time `origin + k`.
#[derive(Clone, Debug)]
pub struct Signal {
    pub ctx: FieldContext,
    pub origin: i64,
    pub samples: Vec<Scalar>,
}

impl PartialEq for Signal {
    fn eq(&self, o: &Signal) -> bool {
        let (a, b) = (self.trimmed(), o.trimmed());
        (a.samples.is_empty() && b.samples.is_empty()) || (a.origin == b.origin && a.samples == b.samples)
    }
}

impl Signal {
    pub fn new(samples: Vec<Scalar>, origin: i64, ctx: FieldContext) -> Self {
        Signal { ctx, origin, samples }
    }

    pub fn zero(ctx: FieldContext) -> Self {
        Signal { ctx, origin: 0, samples: Vec::new() }
    }

    pub fn from_strings<S: AsRef<str>>(vals: &[S], origin: i64, ctx: FieldContext) -> Result<Self> {
        let samples = vals.iter().map(|s| ctx.parse(s.as_ref())).collect::<std::result::Result<_, _>>()?;
        Ok(Signal { ctx, origin, samples })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.samples.iter().map(|s| s.to_string()).collect()
    }

    pub fn at(&self, n: i64) -> Scalar {
        let k = n - self.origin;
        if k < 0 || k as usize >= self.samples.len() {
            self.ctx.zero()
        } else {
            self.samples[k as usize].clone()
        }
    }

    pub fn trimmed(&self) -> Signal {
        let nz = |s: &Scalar| !self.ctx.is_zero(s);
        let Some(first) = self.samples.iter().position(nz) else {
            return Signal::zero(self.ctx);
        };
        let last = self.samples.iter().rposition(nz).expect("nonzero exists");
        Signal { ctx: self.ctx, origin: self.origin + first as i64, samples: self.samples[first..=last].to_vec() }
    }

    /// Multiplication by z⁻ᵐ (negative m advances).
    pub fn delay(&self, m: i64) -> Signal {
        Signal { ctx: self.ctx, origin: self.origin + m, samples: self.samples.clone() }
    }

    pub fn scale(&self, s: &Scalar) -> Signal {
        Signal { ctx: self.ctx, origin: self.origin, samples: self.samples.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, o: &Signal) -> Signal {
        if self.samples.is_empty() {
            return o.clone();
        }
        if o.samples.is_empty() {
            return self.clone();
        }
        let lo = self.origin.min(o.origin);
        let hi = (self.origin + self.samples.len() as i64).max(o.origin + o.samples.len() as i64);
        let samples = (lo..hi).map(|n| &self.at(n) + &o.at(n)).collect();
        Signal { ctx: self.ctx, origin: lo, samples }
    }

    pub fn filter(&self, f: &CausalPoly) -> Signal {
        if f.is_zero() || self.samples.is_empty() {
            return Signal::zero(self.ctx);
        }
        let fc = f.coeffs();
        let len = self.samples.len() + fc.len() - 1;
        let mut out = vec![self.ctx.zero(); len];
        for (i, x) in self.samples.iter().enumerate() {
            for (j, c) in fc.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * c);
            }
        }
        Signal { ctx: self.ctx, origin: self.origin, samples: out }
    }

    /// (x(2n), x(2n−1)).
    pub fn split(&self) -> (Signal, Signal) {
        if self.samples.is_empty() {
            return (Signal::zero(self.ctx), Signal::zero(self.ctx));
        }
        let lo = self.origin.div_euclid(2);
        let hi = (self.origin + self.samples.len() as i64).div_euclid(2) + 1;
        let even = (lo..=hi).map(|n| self.at(2 * n)).collect();
        let odd = (lo..=hi).map(|n| self.at(2 * n - 1)).collect();
        (Signal::new(even, lo, self.ctx), Signal::new(odd, lo, self.ctx))
    }

    pub fn merge(e: &Signal, o: &Signal) -> Signal {
        let ctx = e.ctx;
        let (e, o) = (e.trimmed(), o.trimmed());
        let bounds = |s: &Signal| (s.origin, s.origin + s.samples.len() as i64);
        let spans: Vec<(i64, i64)> = [&e, &o].iter().filter(|s| !s.samples.is_empty()).map(|s| bounds(s)).collect();
        if spans.is_empty() {
            return Signal::zero(ctx);
        }
        let lo = spans.iter().map(|s| s.0).min().expect("nonempty");
        let hi = spans.iter().map(|s| s.1).max().expect("nonempty");
        let samples = (2 * lo - 1..2 * hi).map(|t| if t % 2 == 0 { e.at(t / 2) } else { o.at((t + 1) / 2) }).collect();
        Signal::new(samples, 2 * lo - 1, ctx).trimmed()
    }

    /// y(n) = x(2n).
    pub fn downsample(&self) -> Signal {
        self.split().0
    }
}

type Pair = (Signal, Signal);

fn apply_factor(f: &CascadeFactor, v: Pair) -> Pair {
    let (a, b) = v;
    match f {
        CascadeFactor::Lift { chi: 0, filter } => (a.add(&b.filter(filter)), b),
        CascadeFactor::Lift { filter, .. } => {
            let nb = b.add(&a.filter(filter));
            (a, nb)
        }
        CascadeFactor::Delay { chi: 0, m } => (a.delay(*m as i64), b),
        CascadeFactor::Delay { m, .. } => (a, b.delay(*m as i64)),
        CascadeFactor::Gain(k0, k1) => (a.scale(k0), b.scale(k1)),
        CascadeFactor::Perm(Perm::J) => (b, a),
        CascadeFactor::Perm(Perm::I) => (a, b),
    }
}

fn invert_factor(f: &CascadeFactor, v: Pair) -> Pair {
    let (a, b) = v;
    match f {
        CascadeFactor::Lift { chi: 0, filter } => (a.add(&b.filter(&filter.neg())), b),
        CascadeFactor::Lift { filter, .. } => {
            let nb = b.add(&a.filter(&filter.neg()));
            (a, nb)
        }
        CascadeFactor::Delay { chi: 0, m } => (a.delay(-(*m as i64)), b),
        CascadeFactor::Delay { m, .. } => (a, b.delay(-(*m as i64))),
        CascadeFactor::Gain(k0, k1) => {
            let inv = |k: &Scalar| k.try_recip().expect("cascade gains are nonzero");
            (a.scale(&inv(k0)), b.scale(&inv(k1)))
        },
        CascadeFactor::Perm(Perm::J) => (b, a),
        CascadeFactor::Perm(Perm::I) => (a, b),
    }
}

/// Lifting-implemented analysis: factors applied right to left.
pub fn analyze(c: &Cascade, x: &Signal) -> Pair {
    let mut v = x.split();
    for f in c.factors().iter().rev() {
        v = apply_factor(f, v);
    }
    (v.0.trimmed(), v.1.trimmed())
}

/// Exact inverse of [`analyze`].
pub fn synthesize(c: &Cascade, y0: &Signal, y1: &Signal) -> Signal {
    let mut v = (y0.clone(), y1.clone());
    for f in c.factors().iter() {
        v = invert_factor(f, v);
    }
    Signal::merge(&v.0, &v.1)
}

/// Subbands by direct polyphase-matrix application.
pub fn analyze_polyphase(h: &PolyMatrix2, x: &Signal) -> Pair {
    let (xe, xo) = x.split();
    let y0 = xe.filter(&h.e[0][0]).add(&xo.filter(&h.e[0][1]));
    let y1 = xe.filter(&h.e[1][0]).add(&xo.filter(&h.e[1][1]));
    (y0.trimmed(), y1.trimmed())
}

/// Subbands by convolution and downsampling.
pub fn analyze_direct(b: &FilterBank, x: &Signal) -> Pair {
    (x.filter(&b.h0).downsample().trimmed(), x.filter(&b.h1).downsample().trimmed())
}
