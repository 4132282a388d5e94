//! Blackwell dominance between finite belief distributions, decided by exact
//! dilation feasibility, plus garbling and the one-dimensional
//! mean-preserving-spread test used for posterior-mean constraints.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::belief::{BeliefDistribution, Posterior};
use crate::error::{Error, Result};
use crate::lp::{feasible_point, LinearSystem};
use crate::rational::{one, sum, zero, Rational};

/// A Markov kernel from the atoms of a contraction to the atoms of a spread.
/// `rows[s]` lists `(target, weight)` pairs with positive weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dilation {
    pub rows: Vec<Vec<(usize, Rational)>>,
}

impl Dilation {
    pub fn identity(n: usize) -> Self {
        Dilation { rows: (0..n).map(|i| vec![(i, one())]).collect() }
    }

    /// Checks every dilation property exactly: stochastic rows,
    /// barycenter preservation, and that mixing the rows by the contraction
    /// reproduces the spread.
    pub fn verify(&self, spread: &BeliefDistribution, contraction: &BeliefDistribution) -> bool {
        if self.rows.len() != contraction.len() || spread.dim() != contraction.dim() {
            return false;
        }
        let dim = spread.dim();
        let mut pushed = vec![zero(); spread.len()];
        for (row, (src, p)) in self.rows.iter().zip(contraction.atoms()) {
            if row.iter().any(|(t, w)| *t >= spread.len() || w.is_negative()) {
                return false;
            }
            if sum(row.iter().map(|(_, w)| w)) != one() {
                return false;
            }
            let mut bary = vec![zero(); dim];
            for (t, w) in row {
                for (b, x) in bary.iter_mut().zip(spread.atoms()[*t].0.weights()) {
                    *b += w * x;
                }
                pushed[*t] += p * w;
            }
            if bary != src.weights() {
                return false;
            }
        }
        pushed.iter().zip(spread.atoms()).all(|(m, (_, q))| m == q)
    }

    /// Kernel composition: `self` maps atoms of `b` into `a`, `inner` maps
    /// atoms of `c` into `b`; the result maps `c` into `a`.
    pub fn compose(&self, inner: &Dilation) -> Dilation {
        let rows = inner
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (mid, w) in row {
                    for (t, v) in &self.rows[*mid] {
                        *acc.entry(*t).or_insert_with(zero) += w * v;
                    }
                }
                acc.into_iter().filter(|(_, w)| !w.is_zero()).collect()
            })
            .collect();
        Dilation { rows }
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.len() == 1 && r[0].0 == i && r[0].1 == one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// First argument strictly dominates the second.
    Dominates,
    /// Second argument strictly dominates the first.
    Dominated,
    Equivalent,
    Incomparable,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::Dominates => "dominates",
            Relation::Dominated => "dominated",
            Relation::Equivalent => "equivalent",
            Relation::Incomparable => "incomparable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceResult {
    pub relation: Relation,
    /// Spreads the second argument into the first, when `a ⪰ b`.
    pub witness_forward: Option<Dilation>,
    /// Spreads the first argument into the second, when `b ⪰ a`.
    pub witness_backward: Option<Dilation>,
}

/// Looks for a dilation that spreads `contraction` into `spread`. The
/// returned kernel is the lexicographically least feasible one, with
/// variables ordered source-major.
pub fn check_mps(spread: &BeliefDistribution, contraction: &BeliefDistribution) -> Result<Option<Dilation>> {
    if spread.dim() != contraction.dim() {
        return Err(Error::input(format!(
            "cannot compare distributions over simplices of dimension {} and {}",
            spread.dim(),
            contraction.dim()
        )));
    }
    let targets = spread.len();
    let sources = contraction.len();
    let dim = spread.dim();
    let var = |s: usize, t: usize| s * targets + t;
    let nv = sources * targets;
    let mut sys = LinearSystem::nonnegative(nv);

    for (s, (src, _)) in contraction.atoms().iter().enumerate() {
        let mut row = vec![zero(); nv];
        for t in 0..targets {
            row[var(s, t)] = one();
        }
        sys.add_eq(row, one());
        // The last coordinate follows from the others and the row sum.
        for k in 0..dim.saturating_sub(1) {
            let mut row = vec![zero(); nv];
            for (t, (tgt, _)) in spread.atoms().iter().enumerate() {
                row[var(s, t)] = tgt.get(k).clone();
            }
            sys.add_eq(row, src.get(k).clone());
        }
    }
    for (t, (_, q)) in spread.atoms().iter().enumerate() {
        let mut row = vec![zero(); nv];
        for (s, (_, p)) in contraction.atoms().iter().enumerate() {
            row[var(s, t)] = p.clone();
        }
        sys.add_eq(row, q.clone());
    }

    let Some(x) = feasible_point(&sys)? else {
        return Ok(None);
    };
    let rows = (0..sources)
        .map(|s| {
            (0..targets)
                .filter_map(|t| {
                    let w = &x[var(s, t)];
                    (!w.is_zero()).then(|| (t, w.clone()))
                })
                .collect()
        })
        .collect();
    Ok(Some(Dilation { rows }))
}

/// Runs [`check_mps`] in both directions.
pub fn compare(a: &BeliefDistribution, b: &BeliefDistribution) -> Result<DominanceResult> {
    let forward = check_mps(a, b)?;
    let backward = check_mps(b, a)?;
    let relation = match (&forward, &backward) {
        (Some(_), Some(_)) => Relation::Equivalent,
        (Some(_), None) => Relation::Dominates,
        (None, Some(_)) => Relation::Dominated,
        (None, None) => Relation::Incomparable,
    };
    Ok(DominanceResult { relation, witness_forward: forward, witness_backward: backward })
}

/// Reverse kernel used to coarsen a distribution: `rows[i][k]` is the
/// probability that input atom `i` is reported as output `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Garbling {
    pub rows: Vec<Vec<Rational>>,
}

impl Garbling {
    pub fn identity(n: usize) -> Self {
        Garbling {
            rows: (0..n).map(|i| (0..n).map(|k| if i == k { one() } else { zero() }).collect()).collect(),
        }
    }

    /// Sends every atom to a single output.
    pub fn collapse(n: usize) -> Self {
        Garbling { rows: vec![vec![one()]; n] }
    }
}

/// Applies a garbling: output atoms are the barycenters of the inputs that
/// feed them.
pub fn garble(tau: &BeliefDistribution, g: &Garbling) -> Result<BeliefDistribution> {
    if g.rows.len() != tau.len() {
        return Err(Error::input(format!(
            "garbling has {} rows for {} atoms",
            g.rows.len(),
            tau.len()
        )));
    }
    let outputs = g.rows.first().map(|r| r.len()).unwrap_or(0);
    for (i, row) in g.rows.iter().enumerate() {
        if row.len() != outputs || row.iter().any(|w| w.is_negative()) || sum(row) != one() {
            return Err(Error::input(format!("garbling row {i} is not a probability vector")));
        }
    }
    let dim = tau.dim();
    let mut atoms = Vec::new();
    for k in 0..outputs {
        let mut mass = vec![zero(); dim];
        let mut prob = zero();
        for ((mu, p), row) in tau.atoms().iter().zip(&g.rows) {
            let w = p * &row[k];
            if w.is_zero() {
                continue;
            }
            for (m, x) in mass.iter_mut().zip(mu.weights()) {
                *m += &w * x;
            }
            prob += w;
        }
        if prob.is_zero() {
            continue;
        }
        atoms.push((Posterior::normalized(mass)?, prob));
    }
    let out = BeliefDistribution::new(atoms)?;
    debug_assert!(
        check_mps(tau, &out).map(|d| d.is_some()).unwrap_or(false),
        "garbling must be dominated by its input"
    );
    Ok(out)
}

/// Distribution over real values with strictly increasing support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarDistribution {
    atoms: Vec<(Rational, Rational)>,
}

impl ScalarDistribution {
    /// Canonicalizes: zero-probability values dropped, duplicates merged,
    /// values sorted.
    pub fn new(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        let mut total = zero();
        for (v, p) in atoms {
            if p.is_negative() {
                return Err(Error::input("scalar distribution has a negative probability"));
            }
            total += &p;
            if p.is_zero() {
                continue;
            }
            *merged.entry(v).or_insert_with(zero) += p;
        }
        if total != one() || merged.is_empty() {
            return Err(Error::input("scalar distribution probabilities do not sum to 1"));
        }
        Ok(ScalarDistribution { atoms: merged.into_iter().collect() })
    }

    pub fn dirac(v: Rational) -> Self {
        ScalarDistribution { atoms: vec![(v, one())] }
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> Rational {
        self.atoms.iter().fold(zero(), |acc, (v, p)| acc + v * p)
    }

    /// `E[(t - X)^+]`, the integrated CDF evaluated at `t`.
    pub fn integrated_cdf(&self, t: &Rational) -> Rational {
        self.atoms
            .iter()
            .filter(|(v, _)| v < t)
            .fold(zero(), |acc, (v, p)| acc + (t - v) * p)
    }
}

/// Second-order test: `spread` is a mean-preserving spread of `contraction`
/// iff the means agree and the integrated CDF of `spread` is pointwise at
/// least that of `contraction`. Both are piecewise linear with kinks only at
/// atoms, so checking the union of atom values is exact.
pub fn mps_1d_check(spread: &ScalarDistribution, contraction: &ScalarDistribution) -> bool {
    if spread.mean() != contraction.mean() {
        return false;
    }
    spread
        .atoms()
        .iter()
        .chain(contraction.atoms())
        .all(|(t, _)| spread.integrated_cdf(t) >= contraction.integrated_cdf(t))
}

/// Embeds two scalar distributions as belief distributions on the
/// one-dimensional simplex through the affine map `y -> ((hi-y)/(hi-lo),
/// (y-lo)/(hi-lo))`, with `lo`/`hi` the extreme values across both inputs.
/// Barycenters are preserved, so dilation feasibility between the images is
/// the same question as a one-dimensional mean-preserving spread.
pub fn embed_scalar_pair(
    a: &ScalarDistribution,
    b: &ScalarDistribution,
) -> (BeliefDistribution, BeliefDistribution) {
    let values = a.atoms().iter().chain(b.atoms()).map(|(v, _)| v);
    let lo = values.clone().min().cloned().unwrap_or_else(zero);
    let hi = values.max().cloned().unwrap_or_else(zero);
    let width = &hi - &lo;
    let embed = |d: &ScalarDistribution| {
        let atoms = d
            .atoms()
            .iter()
            .map(|(v, p)| {
                let post = if width.is_zero() {
                    Posterior::point_mass(2, 0)
                } else {
                    let up = (v - &lo) / &width;
                    Posterior::new(vec![one() - &up, up]).expect("embedded point lies on the simplex")
                };
                (post, p.clone())
            })
            .collect();
        BeliefDistribution::new(atoms).expect("embedding preserves probabilities")
    };
    (embed(a), embed(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn post(xs: &[Rational]) -> Posterior {
        Posterior::new(xs.to_vec()).unwrap()
    }

    fn bd(atoms: &[(&[Rational], Rational)]) -> BeliefDistribution {
        BeliefDistribution::new(atoms.iter().map(|(p, w)| (post(p), w.clone())).collect()).unwrap()
    }

    fn gamma_bar() -> BeliefDistribution {
        bd(&[(&[frac(3, 4), frac(1, 4)], frac(1, 2)), (&[frac(1, 4), frac(3, 4)], frac(1, 2))])
    }

    fn null() -> BeliefDistribution {
        BeliefDistribution::dirac(post(&[frac(1, 2), frac(1, 2)]))
    }

    #[test]
    fn reflexive_identity_witness() {
        let g = gamma_bar();
        let d = check_mps(&g, &g).unwrap().unwrap();
        assert!(d.is_identity());
        assert_eq!(compare(&g, &g).unwrap().relation, Relation::Equivalent);
    }

    #[test]
    fn full_revelation_dominates_null() {
        let full = bd(&[(&[int(1), int(0)], frac(1, 2)), (&[int(0), int(1)], frac(1, 2))]);
        let d = check_mps(&full, &null()).unwrap().unwrap();
        assert_eq!(d.rows, vec![vec![(0, frac(1, 2)), (1, frac(1, 2))]]);
        assert!(d.verify(&full, &null()));
        assert!(check_mps(&null(), &full).unwrap().is_none());
    }

    #[test]
    fn gamma_bar_dominates_null() {
        let r = compare(&gamma_bar(), &null()).unwrap();
        assert_eq!(r.relation, Relation::Dominates);
        let w = r.witness_forward.unwrap();
        assert_eq!(w.rows, vec![vec![(0, frac(1, 2)), (1, frac(1, 2))]]);
        assert!(r.witness_backward.is_none());
        assert_eq!(compare(&null(), &gamma_bar()).unwrap().relation, Relation::Dominated);
    }

    #[test]
    fn crossing_supports() {
        // Two-state beliefs are determined by their first coordinate, so the
        // LP answer must agree with the one-dimensional test.
        let a = gamma_bar();
        let b = bd(&[
            (&[frac(9, 10), frac(1, 10)], frac(1, 3)),
            (&[frac(1, 2), frac(1, 2)], frac(1, 3)),
            (&[frac(1, 10), frac(9, 10)], frac(1, 3)),
        ]);
        let r = compare(&a, &b).unwrap();
        let sa = ScalarDistribution::new(vec![(frac(3, 4), frac(1, 2)), (frac(1, 4), frac(1, 2))]).unwrap();
        let sb = ScalarDistribution::new(vec![
            (frac(9, 10), frac(1, 3)),
            (frac(1, 2), frac(1, 3)),
            (frac(1, 10), frac(1, 3)),
        ])
        .unwrap();
        let expected = match (mps_1d_check(&sa, &sb), mps_1d_check(&sb, &sa)) {
            (true, true) => Relation::Equivalent,
            (true, false) => Relation::Dominates,
            (false, true) => Relation::Dominated,
            (false, false) => Relation::Incomparable,
        };
        assert_eq!(r.relation, expected);
        // Integrated CDFs at 1/4: a gives 0, b gives (1/4-1/10)/3 = 1/20 > 0;
        // at 1/2: a gives 1/8, b gives 2/15 > 1/8. b spreads a.
        assert_eq!(r.relation, Relation::Dominated);
    }

    #[test]
    fn dimension_mismatch() {
        let three = BeliefDistribution::dirac(post(&[frac(1, 3), frac(1, 3), frac(1, 3)]));
        assert!(matches!(check_mps(&three, &null()), Err(Error::Input(_))));
    }

    #[test]
    fn garbling_examples() {
        let g = gamma_bar();
        assert_eq!(garble(&g, &Garbling::collapse(2)).unwrap(), null());
        assert_eq!(garble(&g, &Garbling::identity(2)).unwrap(), g);
        let half = Garbling { rows: vec![vec![frac(1, 2), frac(1, 2)], vec![frac(1, 2), frac(1, 2)]] };
        assert_eq!(garble(&g, &half).unwrap(), null());
        let bad = Garbling { rows: vec![vec![frac(1, 2)], vec![int(1)]] };
        assert!(garble(&g, &bad).is_err());
    }

    #[test]
    fn scalar_mps() {
        let kbar = ScalarDistribution::new(vec![(frac(1, 4), frac(1, 2)), (frac(3, 4), frac(1, 2))]).unwrap();
        let mid = ScalarDistribution::dirac(frac(1, 2));
        assert!(mps_1d_check(&kbar, &kbar));
        assert!(mps_1d_check(&kbar, &mid));
        assert!(!mps_1d_check(&mid, &kbar));
        let shifted = ScalarDistribution::dirac(frac(1, 3));
        assert!(!mps_1d_check(&kbar, &shifted));
    }

    #[test]
    fn embedding_agrees_on_examples() {
        let kbar = ScalarDistribution::new(vec![(frac(1, 4), frac(1, 2)), (frac(3, 4), frac(1, 2))]).unwrap();
        let mid = ScalarDistribution::dirac(frac(1, 2));
        let (a, b) = embed_scalar_pair(&kbar, &mid);
        assert!(check_mps(&a, &b).unwrap().is_some());
        assert!(check_mps(&b, &a).unwrap().is_none());
    }

    #[test]
    fn compose_witnesses() {
        let full = bd(&[(&[int(1), int(0)], frac(1, 2)), (&[int(0), int(1)], frac(1, 2))]);
        let g = gamma_bar();
        let n = null();
        let ab = check_mps(&full, &g).unwrap().unwrap();
        let bc = check_mps(&g, &n).unwrap().unwrap();
        let ac = ab.compose(&bc);
        assert!(ac.verify(&full, &n));
    }
}
