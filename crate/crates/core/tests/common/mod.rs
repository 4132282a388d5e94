#![allow(dead_code)]

use num::{Signed, Zero};
use privsig::belief::{BeliefDistribution, Posterior, StateSpace};
use privsig::blackwell::Garbling;
use privsig::lp::LinearSystem;
use privsig::rational::{frac, int, one, zero, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn post(xs: &[Rational]) -> Posterior {
    Posterior::new(xs.to_vec()).unwrap()
}

pub fn two_by_two_space() -> StateSpace {
    StateSpace::new(
        vec!["x1t1".into(), "x1t2".into(), "x2t1".into(), "x2t2".into()],
        vec!["t1".into(), "t2".into()],
        vec![0, 1, 0, 1],
        vec![frac(1, 4); 4],
    )
    .unwrap()
}

pub fn nu1() -> Posterior {
    post(&[frac(3, 4), frac(1, 4)])
}

pub fn nu2() -> Posterior {
    post(&[frac(1, 4), frac(3, 4)])
}

pub fn gamma_bar() -> BeliefDistribution {
    BeliefDistribution::new(vec![(nu1(), frac(1, 2)), (nu2(), frac(1, 2))]).unwrap()
}

pub fn half() -> Posterior {
    post(&[frac(1, 2), frac(1, 2)])
}

/// Random probability vector with small-integer numerators; zeros allowed
/// when `allow_zero`.
pub fn random_simplex(r: &mut impl Rng, k: usize, allow_zero: bool) -> Vec<Rational> {
    loop {
        let lo = if allow_zero { 0 } else { 1 };
        let raw: Vec<i64> = (0..k).map(|_| r.gen_range(lo..=6)).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return raw.into_iter().map(|x| frac(x, total)).collect();
        }
    }
}

/// Random space with `k` privacy labels and `n` states (`n >= k`), every
/// label used at least once, and the given privacy prior.
pub fn random_space_with_prior(r: &mut impl Rng, n: usize, prior_theta: &[Rational]) -> StateSpace {
    let k = prior_theta.len();
    let mut map: Vec<usize> = (0..k).collect();
    map.extend((k..n).map(|_| r.gen_range(0..k)));
    map.shuffle(r);
    let mut prior = vec![zero(); n];
    for t in 0..k {
        let block: Vec<usize> = (0..n).filter(|&w| map[w] == t).collect();
        let c = random_simplex(r, block.len(), false);
        for (w, c) in block.into_iter().zip(c) {
            prior[w] = &prior_theta[t] * c;
        }
    }
    StateSpace::new(
        (0..n).map(|w| format!("w{w}")).collect(),
        (0..k).map(|t| format!("t{t}")).collect(),
        map,
        prior,
    )
    .unwrap()
}

/// A Bayes-plausible distribution over privacy posteriors and a space whose
/// prior it averages to: `|Θ| ∈ [2, max_theta]`, `|Ω| ≤ max_omega`, at most
/// `max_atoms` atoms.
pub fn random_instance(
    r: &mut impl Rng,
    max_theta: usize,
    max_omega: usize,
    max_atoms: usize,
) -> (StateSpace, BeliefDistribution) {
    loop {
        let k = r.gen_range(2..=max_theta);
        let n = r.gen_range(k..=max_omega);
        let m = r.gen_range(1..=max_atoms);
        let weights = random_simplex(r, m, false);
        let atoms: Vec<Posterior> = (0..m).map(|_| post(&random_simplex(r, k, true))).collect();
        let mut mean = vec![zero(); k];
        for (a, w) in atoms.iter().zip(&weights) {
            for (x, y) in mean.iter_mut().zip(a.weights()) {
                *x += w * y;
            }
        }
        if mean.iter().any(|x| x.is_zero()) {
            continue;
        }
        let gamma = BeliefDistribution::new(atoms.into_iter().zip(weights).collect()).unwrap();
        let space = random_space_with_prior(r, n, &mean);
        return (space, gamma);
    }
}

pub fn random_garbling(r: &mut impl Rng, inputs: usize, max_outputs: usize) -> Garbling {
    let outputs = r.gen_range(1..=max_outputs);
    Garbling { rows: (0..inputs).map(|_| random_simplex(r, outputs, true)).collect() }
}

/// Gaussian elimination over the rationals. Returns the unique solution of
/// `rows` (each `(coeffs, rhs)`), or `None` when there is none or many.
pub fn solve_unique(rows: &[(Vec<Rational>, Rational)], n: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(c, b)| {
            let mut r = c.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x /= &lead;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=n {
                    let v = &f * &m[row][j];
                    m[i][j] -= v;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) || pivot_cols.len() < n {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Every vertex of `sys`, found by trying each set of `n` constraints from
/// the inequality rows and bounds together with all equality rows.
pub fn brute_force_vertices(sys: &LinearSystem) -> Vec<Vec<Rational>> {
    let n = sys.num_vars;
    let mut ineq: Vec<(Vec<Rational>, Rational)> = sys.ineq_rows.iter().map(|r| (r.coeffs.clone(), r.rhs.clone())).collect();
    for (i, b) in sys.bounds.iter().enumerate() {
        let e = |s: i64| {
            let mut c = vec![zero(); n];
            c[i] = int(s);
            c
        };
        if let Some(l) = &b.lower {
            ineq.push((e(-1), -l.clone()));
        }
        if let Some(u) = &b.upper {
            ineq.push((e(1), u.clone()));
        }
    }
    let eq: Vec<(Vec<Rational>, Rational)> = sys.eq_rows.iter().map(|r| (r.coeffs.clone(), r.rhs.clone())).collect();
    let mut out = std::collections::BTreeSet::new();
    let m = ineq.len();
    for mask in 0u64..(1u64 << m) {
        if mask.count_ones() as usize > n {
            continue;
        }
        let mut rows = eq.clone();
        rows.extend((0..m).filter(|i| mask >> i & 1 == 1).map(|i| ineq[i].clone()));
        if let Some(x) = solve_unique(&rows, n) {
            if sys.satisfies(&x) {
                out.insert(x);
            }
        }
    }
    out.into_iter().collect()
}

/// Probability vector check used by oracles that must not rely on the
/// library's own constructors.
pub fn is_distribution(v: &[Rational]) -> bool {
    v.iter().all(|x| !x.is_negative()) && v.iter().fold(zero(), |a, x| a + x) == one()
}
