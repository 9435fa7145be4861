//! Causal Extended Euclidean Algorithm factorization and the operation-count
//! comparison against the CCA.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cca::{run_schema_traced, Handed, Schema, SchemaStep};
use crate::error::{Error, Result};
use crate::pmat::{coprimify, normalize_counted, Cascade, CascadeFactor, Coprimification, Perm, PolyMatrix2};
use crate::poly::{classical_divide, counted_add, counted_mul, counted_sub, CausalPoly, OpCounter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Row => write!(f, "row"),
            Axis::Column => write!(f, "col"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EeaTrace {
    pub axis: Axis,
    pub index: usize,
    pub coprime: [usize; 4],
    /// r₀, r₁, …, r_k (the last is the unit gcd).
    pub remainders: Vec<CausalPoly>,
    pub quotients: Vec<CausalPoly>,
    /// Augmentation entry ±|H|/r_k.
    pub augment: CausalPoly,
    pub h_prime: PolyMatrix2,
    pub lift: CascadeFactor,
    pub cascade: Cascade,
    pub counts: OpCounter,
}

fn charge_div(divisor: &CausalPoly, counter: &mut OpCounter) {
    if divisor.is_monomial() {
        counter.sp_mult += 1;
    } else {
        counter.p_div += 1;
    }
}

/// Index sequences of the expanded continuant K(q_a, …, q_{b−1}).
fn continuant_terms(a: usize, b: usize) -> Vec<Vec<usize>> {
    if a >= b {
        return vec![vec![]];
    }
    if b == a + 1 {
        return vec![vec![a]];
    }
    let mut out: Vec<Vec<usize>> = continuant_terms(a + 1, b)
        .into_iter()
        .map(|t| {
            let mut v = vec![a];
            v.extend(t);
            v
        })
        .collect();
    out.extend(continuant_terms(a + 2, b));
    out
}

struct ProductMemo<'a> {
    q: &'a [CausalPoly],
    memo: HashMap<Vec<usize>, CausalPoly>,
}

impl ProductMemo<'_> {
    fn product(&mut self, t: &[usize], counter: &mut OpCounter) -> CausalPoly {
        match t {
            [] => CausalPoly::one(self.q[0].ctx()),
            [i] => self.q[*i].clone(),
            _ => {
                if let Some(p) = self.memo.get(t) {
                    return p.clone();
                }
                let (last, prefix) = t.split_last().expect("nonempty");
                let pre = self.product(prefix, counter);
                let p = counted_mul(&pre, &self.q[*last], counter);
                self.memo.insert(t.to_vec(), p.clone());
                p
            }
        }
    }

    fn continuant(&mut self, a: usize, b: usize, counter: &mut OpCounter) -> CausalPoly {
        let mut acc: Option<CausalPoly> = None;
        for t in continuant_terms(a, b) {
            let p = self.product(&t, counter);
            acc = Some(match acc {
                None => p,
                Some(s) => counted_add(&s, &p, counter),
            });
        }
        acc.expect("at least one term")
    }
}

/// M₀⋯M_{k−1} with Mᵢ = [[qᵢ,1],[1,0]], entries as expanded continuants.
pub fn quotient_product(q: &[CausalPoly], counter: &mut OpCounter) -> PolyMatrix2 {
    let k = q.len();
    let mut memo = ProductMemo { q, memo: HashMap::new() };
    let p00 = memo.continuant(0, k, counter);
    let p01 = memo.continuant(0, k - 1, counter);
    let p10 = memo.continuant(1, k, counter);
    let p11 = if k >= 2 { memo.continuant(1, k - 1, counter) } else { CausalPoly::zero(q[0].ctx()) };
    PolyMatrix2::new(p00, p01, p10, p11)
}

/// Runs the causal EEA along one row or column.
pub fn eea_factor(h: &PolyMatrix2, axis: Axis, index: usize) -> Result<EeaTrace> {
    if index > 1 {
        return Err(Error::Invalid(format!("{axis} index must be 0 or 1")));
    }
    h.pr_check()?;
    let ctx = h.ctx();
    let (d, q0) = coprimify(h, Coprimification::default())?;
    let mut counter = OpCounter::new();
    let (a, b) = match axis {
        Axis::Column => (q0.e[0][index].clone(), q0.e[1][index].clone()),
        Axis::Row => (q0.e[index][0].clone(), q0.e[index][1].clone()),
    };
    if a.is_zero() || b.is_zero() {
        return Err(Error::PreconditionViolated(format!("{axis} {index} has a zero entry")));
    }
    let mut remainders = vec![a, b];
    let mut quotients = Vec::new();
    loop {
        let n = remainders.len();
        let (e, f) = (&remainders[n - 2], &remainders[n - 1]);
        let (q, r) = classical_divide(e, f, &mut counter)?;
        quotients.push(q);
        if r.is_zero() {
            break;
        }
        remainders.push(r);
        if quotients.len() > 4 * (h.det_degree()? + 8) {
            return Err(Error::PreconditionViolated("remainder chain does not terminate".into()));
        }
    }
    let gcd = remainders.last().expect("nonempty").clone();
    if !gcd.is_unit() {
        return Err(Error::NotCoprime);
    }
    let k = quotients.len();
    let det = q0.determinant();
    let mut x = det.exact_div(&gcd)?;
    if (k + index) % 2 == 1 {
        x = x.neg();
    }
    let c = quotient_product(&quotients, &mut counter);
    let rk = &gcd;
    let h_prime = match axis {
        Axis::Column => {
            let m = PolyMatrix2::new(
                counted_mul(&c.e[0][0], rk, &mut counter),
                counted_mul(&c.e[0][1], &x, &mut counter),
                counted_mul(&c.e[1][0], rk, &mut counter),
                counted_mul(&c.e[1][1], &x, &mut counter),
            );
            if index == 1 {
                m.mul(&PolyMatrix2::swap(ctx))
            } else {
                m
            }
        }
        Axis::Row => {
            let m = PolyMatrix2::new(
                counted_mul(rk, &c.e[0][0], &mut counter),
                counted_mul(rk, &c.e[1][0], &mut counter),
                counted_mul(&x, &c.e[0][1], &mut counter),
                counted_mul(&x, &c.e[1][1], &mut counter),
            );
            if index == 1 {
                PolyMatrix2::swap(ctx).mul(&m)
            } else {
                m
            }
        }
    };
    let lift = lifting_theorem_solve(&q0, &h_prime, axis, index, &mut counter)?;

    let xm = x.multiplicity()?;
    let gain = CascadeFactor::Gain(rk.coeff(0), x.coeff(xm));
    let delay = CascadeFactor::Delay { chi: 1, m: xm };
    let mut ms = Vec::new();
    for q in &quotients {
        ms.push(CascadeFactor::upper(q.clone()));
        ms.push(CascadeFactor::Perm(Perm::J));
    }
    let mut factors = vec![CascadeFactor::Delay { chi: 0, m: d[0] }, CascadeFactor::Delay { chi: 1, m: d[1] }];
    match axis {
        Axis::Column => {
            factors.extend(ms);
            factors.extend([gain, delay]);
            if index == 1 {
                factors.push(CascadeFactor::Perm(Perm::J));
            }
            factors.push(lift.clone());
        }
        Axis::Row => {
            factors.push(lift.clone());
            if index == 1 {
                factors.push(CascadeFactor::Perm(Perm::J));
            }
            factors.extend([gain, delay]);
            // M_{k−1}⋯M₀
            for q in quotients.iter().rev() {
                factors.push(CascadeFactor::upper(q.clone()));
                factors.push(CascadeFactor::Perm(Perm::J));
            }
        }
    }
    factors.extend([CascadeFactor::Delay { chi: 0, m: d[2] }, CascadeFactor::Delay { chi: 1, m: d[3] }]);
    let cascade = normalize_counted(&factors, ctx, &mut counter)?;
    Ok(EeaTrace { axis, index, coprime: d, remainders, quotients, augment: x, h_prime, lift, cascade, counts: counter })
}

/// Solves H = H′·S (column) or H = S·H′ (row) for the lifting factor when H
/// and H′ agree in the given column or row and have equal determinants.
pub fn lifting_theorem_solve(
    h: &PolyMatrix2,
    h_prime: &PolyMatrix2,
    axis: Axis,
    index: usize,
    counter: &mut OpCounter,
) -> Result<CascadeFactor> {
    if h.determinant() != h_prime.determinant() {
        return Err(Error::PreconditionViolated("determinants differ".into()));
    }
    let j = index;
    let o = 1 - j;
    let (target, current, pivot, chi) = match axis {
        Axis::Column => {
            if h.e[0][j] != h_prime.e[0][j] || h.e[1][j] != h_prime.e[1][j] {
                return Err(Error::PreconditionViolated(format!("column {j} differs")));
            }
            let i = if h_prime.e[0][j].is_zero() { 1 } else { 0 };
            (&h.e[i][o], &h_prime.e[i][o], &h_prime.e[i][j], o as u8)
        }
        Axis::Row => {
            if h.e[j][0] != h_prime.e[j][0] || h.e[j][1] != h_prime.e[j][1] {
                return Err(Error::PreconditionViolated(format!("row {j} differs")));
            }
            let i = if h_prime.e[j][0].is_zero() { 1 } else { 0 };
            (&h.e[o][i], &h_prime.e[o][i], &h_prime.e[j][i], j as u8)
        }
    };
    let diff = counted_sub(target, current, counter);
    charge_div(pivot, counter);
    let s = diff.exact_div(pivot)?;
    Ok(CascadeFactor::Lift { chi: 1 - chi, filter: s })
}

/// CCA schema reproducing the EEA run along the same row or column.
pub fn equivalent_schema(trace: &EeaTrace) -> Schema {
    let eta = match trace.axis {
        Axis::Column => Handed::L,
        Axis::Row => Handed::R,
    };
    let steps = (0..trace.quotients.len())
        .filter(|&n| !(n == 0 && trace.quotients[0].is_zero()))
        .map(|n| SchemaStep { eta, ms: vec![0], deltas: vec![(n % 2) as u8], ells: vec![trace.index as u8] })
        .collect();
    let coprime = if trace.coprime == [0; 4] { None } else { Some(trace.coprime) };
    Schema { coprime, steps }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub label: String,
    pub method: String,
    pub schema: Option<String>,
    pub counts: OpCounter,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub rows: Vec<ComplexityRow>,
}

/// EEA vs CCA counts in both columns and both rows.
pub fn complexity_report(h: &PolyMatrix2) -> Result<ComplexityReport> {
    let mut rows = Vec::new();
    for (axis, index) in [(Axis::Column, 0), (Axis::Column, 1), (Axis::Row, 0), (Axis::Row, 1)] {
        let label = format!("{axis} {index}");
        let t = eea_factor(h, axis, index)?;
        let schema = equivalent_schema(&t);
        let run = run_schema_traced(h, &schema)?;
        if run.cascade != t.cascade {
            return Err(Error::PreconditionViolated(format!("CCA does not reproduce the EEA cascade in {label}")));
        }
        rows.push(ComplexityRow { label: label.clone(), method: "EEA".into(), schema: None, counts: t.counts });
        rows.push(ComplexityRow { label, method: "CCA".into(), schema: Some(schema.to_string()), counts: run.counts });
    }
    Ok(ComplexityReport { rows })
}

impl ComplexityReport {
    pub fn find(&self, label: &str, method: &str) -> Option<&OpCounter> {
        self.rows.iter().find(|r| r.label == label && r.method == method).map(|r| &r.counts)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("factorization,method,pp_adds,sp_mults,pp_mults,p_divs\n");
        for r in &self.rows {
            let c = r.counts;
            s.push_str(&format!("{},{},{},{},{},{}\n", r.label, r.method, c.pp_add, c.sp_mult, c.pp_mult, c.p_div));
        }
        s
    }
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14}{:>9}{:>9}{:>9}{:>9}", "factorization", "PP adds", "SP mults", "PP mults", "P divs")?;
        for r in &self.rows {
            let c = r.counts;
            let name = format!("{} {}", r.label, r.method);
            writeln!(f, "{:<14}{:>9}{:>9}{:>9}{:>9}", name, c.pp_add, c.sp_mult, c.pp_mult, c.p_div)?;
        }
        Ok(())
    }
}
