//! Condition numbers of lifting steps, gain matrices, and cascades.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::Scalar;
use crate::pmat::Cascade;
use crate::poly::{CausalPoly, Degree};

pub const SAMPLES: usize = 4096;

fn modulus(p: &CausalPoly, w: f64) -> f64 {
    let (re, im) = p.eval_unit_circle(w);
    re.hypot(im)
}

/// Σ|sₙ|, an upper bound on ‖S‖∞ attained for degree ≤ 1.
pub fn coefficient_bound(s: &CausalPoly) -> f64 {
    s.to_f64_coeffs().iter().map(|c| c.abs()).sum()
}

/// sup_{|z|=1} |S(z)|.
pub fn linf_norm(s: &CausalPoly) -> f64 {
    match s.degree() {
        Degree::Bottom => 0.0,
        Degree::Fin(d) if d <= 1 => coefficient_bound(s),
        Degree::Fin(_) => {
            let step = 2.0 * PI / SAMPLES as f64;
            let (best_k, mut best) = (0..SAMPLES)
                .map(|k| (k, modulus(s, k as f64 * step)))
                .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
            // golden-section refinement on the bracketing interval
            let g = (5f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = ((best_k as f64 - 1.0) * step, (best_k as f64 + 1.0) * step);
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            for _ in 0..80 {
                if modulus(s, c) > modulus(s, d) {
                    b = d;
                } else {
                    a = c;
                }
                c = b - g * (b - a);
                d = a + g * (b - a);
            }
            best = best.max(modulus(s, (a + b) / 2.0));
            best.min(coefficient_bound(s))
        }
    }
}

/// 1 + s²/2 + √(s² + s⁴/4) for s = ‖S‖∞.
pub fn cond_from_norm_sq(s2: f64) -> f64 {
    1.0 + s2 / 2.0 + (s2 + s2 * s2 / 4.0).sqrt()
}

pub fn lifting_cond(s: &CausalPoly) -> f64 {
    let n = linf_norm(s);
    cond_from_norm_sq(n * n)
}

pub fn gain_cond(k0: &Scalar, k1: &Scalar) -> f64 {
    let (a, b) = (k0.to_f64().abs(), k1.to_f64().abs());
    a.max(b) / a.min(b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCondition {
    pub index: usize,
    pub chi: u8,
    pub filter: String,
    pub norm_sq: f64,
    pub cond: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub steps: Vec<StepCondition>,
    pub gain_cond: f64,
    pub product: f64,
}

/// cond(D)·Πcond(Uₙ); delays and J contribute 1.
pub fn cascade_conditioning(c: &Cascade) -> ConditionReport {
    let steps: Vec<StepCondition> = c
        .steps
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let n = linf_norm(&s.filter);
            let norm_sq = n * n;
            StepCondition { index, chi: s.chi, filter: s.filter.to_string(), norm_sq, cond: cond_from_norm_sq(norm_sq) }
        })
        .collect();
    let gain_cond = gain_cond(&c.gains.0, &c.gains.1);
    let product = steps.iter().map(|s| s.cond).product::<f64>() * gain_cond;
    ConditionReport { steps, gain_cond, product }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>4}  {:>3}  {:>14}  {:>14}  filter", "n", "chi", "|S|^2", "cond")?;
        for s in &self.steps {
            writeln!(f, "{:>4}  {:>3}  {:>14.6e}  {:>14.6}  {}", s.index, s.chi, s.norm_sq, s.cond, s.filter)?;
        }
        writeln!(f, "gain cond  {:.6}", self.gain_cond)?;
        write!(f, "product    {:.4e}", self.product)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;

    fn p(s: &str) -> CausalPoly {
        CausalPoly::parse(s, FieldContext::rational()).unwrap()
    }

    #[test]
    fn first_order_norms() {
        assert_eq!(linf_norm(&p("-4+20z^-1")), 24.0);
        assert_eq!(linf_norm(&p("-7/2")), 3.5);
        assert!((linf_norm(&p("169(3-13z^-1)/144")) - 169.0 * 16.0 / 144.0).abs() < 1e-12);
        assert_eq!(linf_norm(&p("0")), 0.0);
    }

    #[test]
    fn sampled_norms() {
        // |1 + z^-2| peaks at 2; |1 - z^-1 + z^-2| peaks at 3 (z = -1)
        assert!((linf_norm(&p("1+z^-2")) - 2.0).abs() < 1e-9);
        assert!((linf_norm(&p("1-z^-1+z^-2")) - 3.0).abs() < 1e-9);
        // 1 + z^-1/2 + z^-3/4: bounded by 1.75, attained at z = 1
        assert!((linf_norm(&p("1+z^-1/2+z^-3/4")) - 1.75).abs() < 1e-9);
    }

    #[test]
    fn condition_formula() {
        assert!((cond_from_norm_sq(576.0) - 577.998).abs() < 1e-3);
        assert!((cond_from_norm_sq(722500.0) - 722502.0).abs() < 1e-3);
        assert!((cond_from_norm_sq(0.0036) - 1.06183).abs() < 1e-5);
        assert_eq!(cond_from_norm_sq(0.0), 1.0);
        let q = FieldContext::rational();
        assert_eq!(gain_cond(&q.from_int(-50), &q.from_ratio(-1, 50)), 2500.0);
    }
}
