use liftforge_core::analysis::{cond_from_norm_sq, lifting_cond, linf_norm};
use liftforge_core::bank::{analyze, analyze_direct, synthesize};
use liftforge_core::cca::{causal_complement, divisors_agree};
use liftforge_core::pmat::{coprimify, expand_factors, normalize};
use liftforge_core::poly::{monomial_gcd, sgda_divide};
use liftforge_core::session::Session;
use liftforge_core::{
    builtin_bank, eea_factor, enumerate_left, run_schema, Axis, Builtin, Cascade, CascadeFactor, CausalPoly,
    Coprimification, FilterBank, OpCounter, Perm, PolyMatrix2, Signal, StepChoice,
};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::q;

pub type Check = Result<(), TestCaseError>;

pub fn poly(cs: &[i64]) -> CausalPoly {
    CausalPoly::from_ints(cs, q())
}

fn rationals(p: &CausalPoly, len: usize) -> Vec<BigRational> {
    (0..len).map(|k| p.coeff(k).as_rational().unwrap().clone()).collect()
}

/// Unique solution of a square system, or None if singular.
#[allow(clippy::needless_range_loop)]
pub fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// S from the square system coeff_k(E − F·S) = 0 for k < M and k ≥ deg F + M.
pub fn sgda_oracle(e: &CausalPoly, f: &CausalPoly, m: usize) -> CausalPoly {
    let de = e.degree().finite().unwrap_or(0);
    let df = f.degree().finite().unwrap();
    let n = de + m + 1;
    let fc = rationals(f, df + 1);
    let ec = rationals(e, df + n);
    let rows: Vec<usize> = (0..m).chain(df + m..df + n).collect();
    let a = rows
        .iter()
        .map(|&k| (0..n).map(|j| if k >= j && k - j <= df { fc[k - j].clone() } else { BigRational::zero() }).collect())
        .collect();
    let b = rows.iter().map(|&k| ec[k].clone()).collect();
    let s = solve(a, b).expect("nonsingular");
    CausalPoly::new(s.into_iter().map(|r| q().from_rational(r)).collect(), q())
}

pub fn nonzero_coeffs(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, 1..=max_len).prop_filter("nonzero ends", |v| v[0] != 0 && v[v.len() - 1] != 0)
}

/// Random PR matrix from a product of lifts, delays, a gain and J.
pub fn pr_matrix() -> impl Strategy<Value = PolyMatrix2> {
    let lift = (0u8..2, prop::collection::vec(-4i64..=4, 1..=3), 0usize..=1);
    (prop::collection::vec(lift, 1..=4), any::<bool>(), 1i64..=3, 0usize..=1).prop_map(|(lifts, swap, k, rho)| {
        let ctx = q();
        let mut fs = vec![
            CascadeFactor::Gain(ctx.from_int(k), ctx.from_ratio(1, k)),
            CascadeFactor::Delay { chi: 0, m: rho },
        ];
        for (chi, cs, m) in lifts {
            fs.push(CascadeFactor::Lift { chi, filter: poly(&cs) });
            fs.push(CascadeFactor::Delay { chi, m });
        }
        if swap {
            fs.push(CascadeFactor::Perm(Perm::J));
        }
        expand_factors(&fs, ctx)
    })
}

pub fn signal_samples() -> impl Strategy<Value = (Vec<(i64, i64)>, i64)> {
    (prop::collection::vec((-50i64..=50, 1i64..=7), 64), -8i64..=8)
}

/// (Σ degrees, nonzero entries), decreasing along any reducing walk.
pub fn total_degree(m: &PolyMatrix2) -> (usize, usize) {
    let ds: Vec<usize> = m.degrees().iter().flatten().filter_map(|d| d.finite()).collect();
    (ds.iter().sum(), ds.len())
}

/// Random session walk over degree-reducing options: `picks[n] mod count` at step n.
pub fn walk(h: &PolyMatrix2, picks: &[usize]) -> Session {
    let mut s = Session::new("p", h.clone(), Coprimification::default()).unwrap();
    let mut n = 0;
    while !s.terminated() {
        let now = total_degree(&s.q);
        let opts: Vec<_> = s
            .options()
            .unwrap()
            .into_iter()
            .filter(|o| {
                let q = PolyMatrix2::from_strings(&o.preview.quotient, q()).unwrap();
                total_degree(&q) < now
            })
            .collect();
        assert!(!opts.is_empty(), "no degree-reducing step from {}", s.q);
        let o = &opts[picks.get(n).copied().unwrap_or(0) % opts.len()];
        s.apply(StepChoice::new(o.eta, o.ms[0], o.delta, o.ell[0])).unwrap();
        n += 1;
        assert!(n < 64, "{}", s.schema());
    }
    s
}

pub fn check_sgda(e: &[i64], f: &[i64], m: usize) -> Check {
    let (e, f) = (poly(e), poly(f));
    let (s, r) = sgda_divide(&e, &f, m, &mut OpCounter::new()).unwrap();
    prop_assert_eq!(&s, &sgda_oracle(&e, &f, m));
    prop_assert_eq!(e.clone(), f.mul(&s).add(&r));
    if !r.is_zero() {
        prop_assert!(r.multiplicity().unwrap() >= m);
        prop_assert!(r.degree().finite().unwrap() < f.degree().finite().unwrap() + m);
    }
    Ok(())
}

/// Diophantine identity, multiplicity, degree bound and cross-divisor agreement.
pub fn check_complement(h: &PolyMatrix2, delta: usize, ell: u8, m: usize) -> Check {
    let (_, qm) = coprimify(h, Coprimification::default()).unwrap();
    let e = [qm.get(delta, 0), qm.get(delta, 1)];
    let f = [qm.get(1 - delta, 0), qm.get(1 - delta, 1)];
    let Ok((s, r0, r1)) = causal_complement(e, f, ell, m, &mut OpCounter::new()) else {
        return Ok(());
    };
    let d_f = monomial_gcd(&[f[0], f[1]]).unwrap();
    let ft = [f[0].unshift(d_f).unwrap(), f[1].unshift(d_f).unwrap()];
    prop_assert_eq!(&r0, &e[0].sub(&s.mul(&ft[0])));
    prop_assert_eq!(&r1, &e[1].sub(&s.mul(&ft[1])));
    for r in [&r0, &r1] {
        if !r.is_zero() {
            prop_assert!(r.multiplicity().unwrap() >= m);
        }
    }
    let rl = if ell == 0 { &r0 } else { &r1 };
    if !rl.is_zero() {
        prop_assert!(rl.degree().finite().unwrap() < ft[ell as usize].degree().finite().unwrap() + m);
    }
    let d_hat = qm.determinant().multiplicity().unwrap();
    if divisors_agree(f, d_hat, m) {
        let other = causal_complement(e, f, 1 - ell, m, &mut OpCounter::new());
        prop_assert_eq!(other.ok(), Some((s, r0, r1)));
    }
    Ok(())
}

/// Session replay, batch schema and normal form agree and reconstruct H.
pub fn check_walk(h: &PolyMatrix2, picks: &[usize]) -> Check {
    let mut s = walk(h, picks);
    let fin = s.finalize().unwrap();
    let c = Cascade::from_json(&fin.cascade, q()).unwrap();
    prop_assert_eq!(c.expand(), h.clone());
    prop_assert_eq!(&run_schema(h, &s.schema()).unwrap(), &c);
    prop_assert_eq!(&normalize(&c.factors(), q()).unwrap(), &c);
    check_sandwich(&c)
}

/// Each builtin bank with all of its enumerated and EEA cascades.
pub fn bank_cascades() -> Vec<(FilterBank, Vec<Cascade>)> {
    Builtin::ALL
        .iter()
        .map(|&b| {
            let bank = builtin_bank(b);
            let h = bank.to_polyphase();
            let mut cs: Vec<Cascade> = enumerate_left(&h).unwrap().into_iter().map(|e| e.cascade).collect();
            for axis in [Axis::Column, Axis::Row] {
                for index in 0..2 {
                    if let Ok(t) = eea_factor(&h, axis, index) {
                        cs.push(t.cascade);
                    }
                }
            }
            (bank, cs)
        })
        .collect()
}

/// Every enumerated and EEA cascade of every builtin bank.
pub fn every_known_cascade() -> Vec<Cascade> {
    bank_cascades().into_iter().flat_map(|(_, cs)| cs).collect()
}

/// Lifting analysis equals direct filtering and synthesis inverts it.
pub fn check_round_trip(banks: &[(FilterBank, Vec<Cascade>)], samples: &[(i64, i64)], origin: i64) -> Check {
    for (bank, cascades) in banks {
        let ctx = bank.ctx();
        let x = Signal::new(samples.iter().map(|&(p, d)| ctx.from_ratio(p, d)).collect(), origin, ctx);
        let direct = analyze_direct(bank, &x);
        for c in cascades {
            let (y0, y1) = analyze(c, &x);
            prop_assert_eq!(&(y0.clone(), y1.clone()), &direct);
            prop_assert_eq!(&synthesize(c, &y0, &y1), &x);
        }
    }
    Ok(())
}

fn sandwiched(n: f64, cond: f64) -> bool {
    1.0 + n * n <= cond * (1.0 + 1e-12) && cond <= (2.0 + n * n) * (1.0 + 1e-12)
}

pub fn check_sandwich(c: &Cascade) -> Check {
    for s in &c.steps {
        let n = linf_norm(&s.filter);
        prop_assert!(sandwiched(n, lifting_cond(&s.filter)), "{}", s.filter);
    }
    Ok(())
}

pub fn check_filter_sandwich(cs: &[i64]) -> Check {
    let n = linf_norm(&poly(cs));
    prop_assert!(n <= cs.iter().map(|c| c.abs() as f64).sum::<f64>() + 1e-9);
    prop_assert!(sandwiched(n, cond_from_norm_sq(n * n)));
    Ok(())
}
