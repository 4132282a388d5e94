//! Privacy-permissible sets and their Blackwell frontiers for single-bound,
//! ex-post, inferential and posterior-mean privacy.

use num::Signed;

use crate::belief::{bayes_plausible, BeliefDistribution, Posterior};
use crate::blackwell::{check_mps, compare, mps_1d_check, Relation, ScalarDistribution};
use crate::error::{Error, Result};
use crate::lp::{enumerate_vertices, feasible_point, LinearSystem};
use crate::rational::{dot, frac, one, sum, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivacySpec {
    SingleBound { bound: BeliefDistribution },
    /// Region of allowed privacy posteriors; simplex rows are included.
    ExPost { constraints: LinearSystem },
    /// `lambda` stands for `e^ε`.
    Inferential { lambda: Rational },
    PosteriorMean { f_values: Vec<Rational>, kappa_bar: ScalarDistribution },
}

impl PrivacySpec {
    pub fn single_bound(bound: BeliefDistribution, prior_theta: &Posterior) -> Result<Self> {
        if !bayes_plausible(&bound, prior_theta)? {
            return Err(Error::input("privacy bound does not average to the prior"));
        }
        Ok(PrivacySpec::SingleBound { bound })
    }

    /// Appends nonnegativity and the unit-sum row, then checks that the
    /// prior lies in the region.
    pub fn ex_post(mut constraints: LinearSystem, prior_theta: &Posterior) -> Result<Self> {
        let k = prior_theta.dim();
        if constraints.num_vars != k {
            return Err(Error::input(format!(
                "ex-post constraints have {} coefficients per row but there are {} privacy labels",
                constraints.num_vars, k
            )));
        }
        constraints.validate()?;
        for i in 0..k {
            let lower = match &constraints.bounds[i].lower {
                Some(l) if l.is_positive() => l.clone(),
                _ => zero(),
            };
            constraints.set_lower(i, lower);
        }
        constraints.add_eq(vec![one(); k], one());
        if !constraints.satisfies(prior_theta.weights()) {
            return Err(Error::input("ex-post region does not contain the prior"));
        }
        Ok(PrivacySpec::ExPost { constraints })
    }

    pub fn inferential(lambda: Rational) -> Result<Self> {
        if lambda < one() {
            return Err(Error::input("inferential bound must be at least 1"));
        }
        Ok(PrivacySpec::Inferential { lambda })
    }

    pub fn posterior_mean(f_values: Vec<Rational>, kappa_bar: ScalarDistribution, prior_theta: &Posterior) -> Result<Self> {
        if f_values.len() != prior_theta.dim() {
            return Err(Error::input("statistic must assign one value per privacy label"));
        }
        let revealed = ScalarDistribution::new(
            f_values.iter().cloned().zip(prior_theta.weights().iter().cloned()).collect(),
        )?;
        if !mps_1d_check(&revealed, &kappa_bar) {
            return Err(Error::input(
                "posterior-mean cap is not a mean-preserving contraction of the fully revealed statistic",
            ));
        }
        Ok(PrivacySpec::PosteriorMean { f_values, kappa_bar })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PrivacySpec::SingleBound { .. } => "single_bound",
            PrivacySpec::ExPost { .. } => "ex_post",
            PrivacySpec::Inferential { .. } => "inferential",
            PrivacySpec::PosteriorMean { .. } => "posterior_mean",
        }
    }
}

/// Distribution of posterior means of `f`; equal means merge.
pub fn kappa_of(gamma: &BeliefDistribution, f_values: &[Rational]) -> ScalarDistribution {
    ScalarDistribution::new(
        gamma.atoms().iter().map(|(nu, p)| (dot(nu.weights(), f_values), p.clone())).collect(),
    )
    .expect("probabilities come from a valid distribution")
}

/// `max r ≤ λ min r` with `r = ν / μ0^θ`.
pub fn ratio_test(nu: &Posterior, prior_theta: &Posterior, lambda: &Rational) -> bool {
    let r: Vec<Rational> = nu.weights().iter().zip(prior_theta.weights()).map(|(a, b)| a / b).collect();
    let max = r.iter().max().cloned().unwrap_or_else(zero);
    let min = r.iter().min().cloned().unwrap_or_else(zero);
    max <= lambda * min
}

/// The region of privacy posteriors passing the ratio test, as pairwise
/// linear inequalities `ν(a)/μ0(a) ≤ λ ν(b)/μ0(b)` plus the simplex.
pub fn inferential_region(prior_theta: &Posterior, lambda: &Rational) -> LinearSystem {
    let k = prior_theta.dim();
    let mut sys = LinearSystem::nonnegative(k);
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let mut row = vec![zero(); k];
            row[a] = one() / prior_theta.get(a);
            row[b] = -(lambda / prior_theta.get(b));
            sys.add_le(row, zero());
        }
    }
    sys.add_eq(vec![one(); k], one());
    sys
}

fn check_dim(gamma: &BeliefDistribution, prior_theta: &Posterior) -> Result<()> {
    if gamma.dim() != prior_theta.dim() {
        return Err(Error::input(format!(
            "belief distribution is over {} privacy labels but the prior has {}",
            gamma.dim(),
            prior_theta.dim()
        )));
    }
    Ok(())
}

pub fn permissible(gamma: &BeliefDistribution, spec: &PrivacySpec, prior_theta: &Posterior) -> Result<bool> {
    check_dim(gamma, prior_theta)?;
    Ok(first_violation(gamma, spec, prior_theta)?.is_none())
}

/// Description of the first failed privacy check, if any.
pub fn first_violation(gamma: &BeliefDistribution, spec: &PrivacySpec, prior_theta: &Posterior) -> Result<Option<String>> {
    check_dim(gamma, prior_theta)?;
    Ok(match spec {
        PrivacySpec::SingleBound { bound } => {
            if check_mps(bound, gamma)?.is_some() {
                None
            } else {
                Some("distribution is not dominated by the privacy bound".into())
            }
        }
        PrivacySpec::ExPost { constraints } => gamma
            .atoms()
            .iter()
            .position(|(nu, _)| !constraints.satisfies(nu.weights()))
            .map(|i| format!("atom {i} {} lies outside the ex-post region", gamma.atoms()[i].0)),
        PrivacySpec::Inferential { lambda } => gamma
            .atoms()
            .iter()
            .position(|(nu, _)| !ratio_test(nu, prior_theta, lambda))
            .map(|i| format!("atom {i} {} violates the inferential ratio bound", gamma.atoms()[i].0)),
        PrivacySpec::PosteriorMean { f_values, kappa_bar } => {
            if f_values.len() != gamma.dim() {
                return Err(Error::input("statistic must assign one value per privacy label"));
            }
            if mps_1d_check(kappa_bar, &kappa_of(gamma, f_values)) {
                None
            } else {
                Some("posterior-mean distribution is not a contraction of the cap".into())
            }
        }
    })
}

/// Vertices of an ex-post region.
pub fn expost_frontier_support(constraints: &LinearSystem) -> Result<Vec<Posterior>> {
    let verts = enumerate_vertices(constraints)?;
    if verts.is_empty() {
        return Err(Error::input("ex-post region is empty"));
    }
    verts.into_iter().map(Posterior::new).collect()
}

/// Bayes-plausible distribution on `support` with lexicographically least
/// weights.
pub fn frontier_distribution(support: &[Posterior], prior_theta: &Posterior) -> Result<BeliefDistribution> {
    let n = support.len();
    let k = prior_theta.dim();
    if support.iter().any(|p| p.dim() != k) {
        return Err(Error::input("support points and prior have different dimensions"));
    }
    let mut sys = LinearSystem::nonnegative(n);
    sys.add_eq(vec![one(); n], one());
    for t in 0..k.saturating_sub(1) {
        sys.add_eq(support.iter().map(|p| p.get(t).clone()).collect(), prior_theta.get(t).clone());
    }
    let w = feasible_point(&sys)?
        .ok_or_else(|| Error::infeasible("prior is not representable on the frontier support"))?;
    BeliefDistribution::new(support.iter().cloned().zip(w).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferentialExtremePoint {
    pub subset_e: Vec<usize>,
    pub posterior: Posterior,
}

/// The dichotomy point for subset `e`: `λ μ0` on `e`, `μ0` elsewhere,
/// normalized.
pub fn dichotomy_point(prior_theta: &Posterior, lambda: &Rational, e: &[usize]) -> Posterior {
    let mut w = prior_theta.weights().to_vec();
    for &t in e {
        w[t] *= lambda;
    }
    Posterior::normalized(w).expect("prior is interior")
}

/// One extreme point per proper nonempty subset, subsets ordered by their
/// bitmask with label 0 as the lowest bit.
pub fn inferential_frontier_support(prior_theta: &Posterior, lambda: &Rational) -> Result<Vec<InferentialExtremePoint>> {
    if *lambda <= one() {
        return Err(Error::input("inferential frontier needs a bound strictly above 1"));
    }
    let k = prior_theta.dim();
    if k >= usize::BITS as usize - 1 {
        return Err(Error::input("too many privacy labels for subset enumeration"));
    }
    Ok((1..(1usize << k) - 1)
        .map(|mask| {
            let subset_e: Vec<usize> = (0..k).filter(|t| mask >> t & 1 == 1).collect();
            let posterior = dichotomy_point(prior_theta, lambda, &subset_e);
            InferentialExtremePoint { subset_e, posterior }
        })
        .collect())
}

/// Recovers the dichotomy subset of `nu`, if it has that form.
pub fn dichotomy_subset(nu: &Posterior, prior_theta: &Posterior, lambda: &Rational) -> Option<Vec<usize>> {
    let r: Vec<Rational> = nu.weights().iter().zip(prior_theta.weights()).map(|(a, b)| a / b).collect();
    let max = r.iter().max()?.clone();
    let e: Vec<usize> = (0..r.len()).filter(|&t| r[t] == max).collect();
    if e.len() == r.len() || *lambda <= one() {
        return None;
    }
    (dichotomy_point(prior_theta, lambda, &e) == *nu).then_some(e)
}

pub fn inferential_frontier_membership(gamma: &BeliefDistribution, prior_theta: &Posterior, lambda: &Rational) -> Result<bool> {
    check_dim(gamma, prior_theta)?;
    Ok(gamma.atoms().iter().all(|(nu, _)| dichotomy_subset(nu, prior_theta, lambda).is_some()))
}

/// The two-piece split of `nu` that scales the mass on `f` by `1 ± δ`.
/// Returns `((ν1, weight1), (ν2, weight2))` with weights summing to 1 and
/// barycenter `nu`. Requires `0 < δ < 1/ν(F)` and `δ ≤ 1`.
pub fn ratio_split(nu: &Posterior, f: &[usize], delta: &Rational) -> Result<((Posterior, Rational), (Posterior, Rational))> {
    let nu_f = sum(f.iter().map(|&t| nu.get(t)));
    if !delta.is_positive() || delta * &nu_f >= one() || *delta > one() {
        return Err(Error::input("split parameter out of range"));
    }
    let scaled = |s: Rational| {
        let mut w = nu.weights().to_vec();
        for &t in f {
            w[t] *= &s;
        }
        Posterior::normalized(w).expect("split keeps positive mass")
    };
    let half = frac(1, 2);
    let p1 = &half * (one() + delta * &nu_f);
    let p2 = &half * (one() - delta * &nu_f);
    Ok(((scaled(one() + delta), p1), (scaled(one() - delta), p2)))
}

/// Replaces atom `atom` of `gamma` by a ratio split.
pub fn apply_split(gamma: &BeliefDistribution, atom: usize, f: &[usize], delta: &Rational) -> Result<BeliefDistribution> {
    let (nu, p) = gamma.atoms().get(atom).ok_or_else(|| Error::input("atom index out of range"))?;
    let ((a, pa), (b, pb)) = ratio_split(nu, f, delta)?;
    let mut atoms: Vec<_> = gamma.atoms().iter().enumerate().filter(|(i, _)| *i != atom).map(|(_, x)| x.clone()).collect();
    atoms.push((a, p * pa));
    atoms.push((b, p * pb));
    BeliefDistribution::new(atoms)
}

/// For a permissible `gamma` off the inferential frontier, a permissible
/// distribution strictly dominating it, built by splitting the first atom
/// that is not of dichotomy form.
pub fn inferential_split_witness(
    gamma: &BeliefDistribution,
    prior_theta: &Posterior,
    lambda: &Rational,
) -> Result<Option<BeliefDistribution>> {
    check_dim(gamma, prior_theta)?;
    let k = prior_theta.dim();
    for (i, (nu, _)) in gamma.atoms().iter().enumerate() {
        if !ratio_test(nu, prior_theta, lambda) || dichotomy_subset(nu, prior_theta, lambda).is_some() {
            continue;
        }
        let r: Vec<Rational> = nu.weights().iter().zip(prior_theta.weights()).map(|(a, b)| a / b).collect();
        let max = r.iter().max().expect("nonempty").clone();
        let min = r.iter().min().expect("nonempty").clone();
        let middle: Vec<usize> = (0..k).filter(|&t| r[t] != max && r[t] != min).collect();
        let mut candidates: Vec<Vec<usize>> = (0..k).map(|t| vec![t]).collect();
        if !middle.is_empty() {
            candidates.insert(0, middle);
        }
        for f in candidates {
            let nu_f = sum(f.iter().map(|&t| nu.get(t)));
            if !nu_f.is_positive() || nu_f >= one() {
                continue;
            }
            let mut delta = frac(1, 2);
            for _ in 0..64 {
                let ((a, _), (b, _)) = ratio_split(nu, &f, &delta)?;
                if ratio_test(&a, prior_theta, lambda) && ratio_test(&b, prior_theta, lambda) {
                    return Ok(Some(apply_split(gamma, i, &f, &delta)?));
                }
                delta /= Rational::from_integer(2.into());
            }
        }
    }
    Ok(None)
}

/// True iff every atom has at most two support points, two-point atoms have
/// distinct statistic values, and the posterior-mean distribution is the cap.
pub fn posterior_mean_frontier_check(gamma: &BeliefDistribution, f_values: &[Rational], kappa_bar: &ScalarDistribution) -> bool {
    if f_values.len() != gamma.dim() {
        return false;
    }
    let two_point = gamma.atoms().iter().all(|(nu, _)| match nu.support().as_slice() {
        [_] => true,
        [a, b] => f_values[*a] != f_values[*b],
        _ => false,
    });
    two_point && kappa_of(gamma, f_values) == *kappa_bar
}

/// The menu of posteriors with mean `y`: point masses where `f = y` and
/// two-point posteriors on pairs bracketing `y`.
fn mean_menu(f_values: &[Rational], y: &Rational) -> Vec<Posterior> {
    let k = f_values.len();
    let mut menu: Vec<Posterior> = (0..k).filter(|&t| f_values[t] == *y).map(|t| Posterior::point_mass(k, t)).collect();
    for a in 0..k {
        for b in a + 1..k {
            let (lo, hi) = if f_values[a] < f_values[b] { (a, b) } else { (b, a) };
            if !(f_values[lo] < *y && *y < f_values[hi]) {
                continue;
            }
            let alpha = (&f_values[hi] - y) / (&f_values[hi] - &f_values[lo]);
            let mut w = vec![zero(); k];
            w[lo] = alpha.clone();
            w[hi] = one() - alpha;
            menu.push(Posterior::new(w).expect("two-point weights are a distribution"));
        }
    }
    menu
}

pub fn posterior_mean_frontier_construct(
    f_values: &[Rational],
    kappa_bar: &ScalarDistribution,
    prior_theta: &Posterior,
) -> Result<BeliefDistribution> {
    let k = prior_theta.dim();
    if f_values.len() != k {
        return Err(Error::input("statistic must assign one value per privacy label"));
    }
    let mut menu: Vec<(usize, Posterior)> = Vec::new();
    for (j, (y, _)) in kappa_bar.atoms().iter().enumerate() {
        menu.extend(mean_menu(f_values, y).into_iter().map(|p| (j, p)));
    }
    let n = menu.len();
    let mut sys = LinearSystem::nonnegative(n);
    for (j, (_, q)) in kappa_bar.atoms().iter().enumerate() {
        sys.add_eq(menu.iter().map(|(i, _)| if *i == j { one() } else { zero() }).collect(), q.clone());
    }
    for t in 0..k {
        sys.add_eq(menu.iter().map(|(_, p)| p.get(t).clone()).collect(), prior_theta.get(t).clone());
    }
    let w = feasible_point(&sys)?
        .ok_or_else(|| Error::infeasible("frontier not attainable with two-point menu"))?;
    let gamma = BeliefDistribution::new(menu.into_iter().map(|(_, p)| p).zip(w).collect())?;
    debug_assert!(posterior_mean_frontier_check(&gamma, f_values, kappa_bar));
    Ok(gamma)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub on_frontier: bool,
    pub diagnostic: Option<String>,
}

impl Membership {
    fn yes() -> Self {
        Membership { on_frontier: true, diagnostic: None }
    }

    fn no(msg: impl Into<String>) -> Self {
        Membership { on_frontier: false, diagnostic: Some(msg.into()) }
    }
}

/// Frontier membership under any spec, naming the first failing check.
pub fn frontier_membership(gamma: &BeliefDistribution, spec: &PrivacySpec, prior_theta: &Posterior) -> Result<Membership> {
    check_dim(gamma, prior_theta)?;
    if !bayes_plausible(gamma, prior_theta)? {
        return Ok(Membership::no("bayes_plausible: distribution does not average to the prior"));
    }
    if let Some(msg) = first_violation(gamma, spec, prior_theta)? {
        return Ok(Membership::no(format!("permissible: {msg}")));
    }
    Ok(match spec {
        PrivacySpec::SingleBound { bound } => {
            if compare(gamma, bound)?.relation == Relation::Equivalent {
                Membership::yes()
            } else {
                Membership::no("frontier: distribution is strictly less informative than the bound")
            }
        }
        PrivacySpec::ExPost { constraints } => {
            let verts = expost_frontier_support(constraints)?;
            match gamma.atoms().iter().position(|(nu, _)| !verts.contains(nu)) {
                None => Membership::yes(),
                Some(i) => Membership::no(format!("frontier: atom {i} is not a vertex of the ex-post region")),
            }
        }
        PrivacySpec::Inferential { lambda } => {
            match gamma.atoms().iter().position(|(nu, _)| dichotomy_subset(nu, prior_theta, lambda).is_none()) {
                None => Membership::yes(),
                Some(i) => Membership::no(format!("frontier: atom {i} is not of dichotomy form")),
            }
        }
        PrivacySpec::PosteriorMean { f_values, kappa_bar } => {
            if posterior_mean_frontier_check(gamma, f_values, kappa_bar) {
                Membership::yes()
            } else {
                Membership::no("frontier: two-point condition or posterior-mean distribution fails")
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    pub support: Vec<Posterior>,
    /// Dichotomy subsets, aligned with `support`, for inferential specs.
    pub subsets: Option<Vec<Vec<usize>>>,
    pub gamma: BeliefDistribution,
}

/// Frontier support points and a canonical frontier distribution.
pub fn frontier(spec: &PrivacySpec, prior_theta: &Posterior) -> Result<Frontier> {
    Ok(match spec {
        PrivacySpec::SingleBound { bound } => Frontier {
            support: bound.atoms().iter().map(|(p, _)| p.clone()).collect(),
            subsets: None,
            gamma: bound.clone(),
        },
        PrivacySpec::ExPost { constraints } => {
            let support = expost_frontier_support(constraints)?;
            let gamma = frontier_distribution(&support, prior_theta)?;
            Frontier { support, subsets: None, gamma }
        }
        PrivacySpec::Inferential { lambda } => {
            let points = inferential_frontier_support(prior_theta, lambda)?;
            let support: Vec<Posterior> = points.iter().map(|p| p.posterior.clone()).collect();
            let gamma = frontier_distribution(&support, prior_theta)?;
            Frontier { support, subsets: Some(points.into_iter().map(|p| p.subset_e).collect()), gamma }
        }
        PrivacySpec::PosteriorMean { f_values, kappa_bar } => {
            let gamma = posterior_mean_frontier_construct(f_values, kappa_bar, prior_theta)?;
            Frontier { support: gamma.atoms().iter().map(|(p, _)| p.clone()).collect(), subsets: None, gamma }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(xs: &[Rational]) -> Posterior {
        Posterior::new(xs.to_vec()).unwrap()
    }

    fn half() -> Posterior {
        p(&[frac(1, 2), frac(1, 2)])
    }

    fn c2_gamma() -> BeliefDistribution {
        BeliefDistribution::new(vec![(p(&[frac(2, 3), frac(1, 3)]), frac(1, 2)), (p(&[frac(1, 3), frac(2, 3)]), frac(1, 2))])
            .unwrap()
    }

    #[test]
    fn inferential_examples() {
        let spec = PrivacySpec::inferential(int(2)).unwrap();
        assert!(permissible(&c2_gamma(), &spec, &half()).unwrap());
        assert!(permissible(&BeliefDistribution::dirac(half()), &spec, &half()).unwrap());
        let bad = BeliefDistribution::new(vec![(p(&[frac(3, 4), frac(1, 4)]), frac(1, 2)), (p(&[frac(1, 4), frac(3, 4)]), frac(1, 2))])
            .unwrap();
        assert!(!permissible(&bad, &spec, &half()).unwrap());

        let pts = inferential_frontier_support(&half(), &int(2)).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].subset_e, vec![0]);
        assert_eq!(pts[0].posterior, p(&[frac(2, 3), frac(1, 3)]));
        assert_eq!(pts[1].posterior, p(&[frac(1, 3), frac(2, 3)]));
        assert!(inferential_frontier_membership(&c2_gamma(), &half(), &int(2)).unwrap());
        assert!(!inferential_frontier_membership(&BeliefDistribution::dirac(half()), &half(), &int(2)).unwrap());
        assert!(inferential_frontier_support(&half(), &int(1)).is_err());
    }

    #[test]
    fn ternary_dichotomy() {
        let u = p(&[frac(1, 3), frac(1, 3), frac(1, 3)]);
        let pts = inferential_frontier_support(&u, &int(2)).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0].posterior, p(&[frac(1, 2), frac(1, 4), frac(1, 4)]));
        assert_eq!(pts[2].subset_e, vec![0, 1]);
        assert_eq!(pts[2].posterior, p(&[frac(2, 5), frac(2, 5), frac(1, 5)]));
    }

    #[test]
    fn split_witness_for_interior_atom() {
        let g = BeliefDistribution::dirac(half());
        let w = inferential_split_witness(&g, &half(), &int(2)).unwrap().unwrap();
        assert!(permissible(&w, &PrivacySpec::Inferential { lambda: int(2) }, &half()).unwrap());
        assert_eq!(compare(&w, &g).unwrap().relation, Relation::Dominates);
        assert!(inferential_split_witness(&c2_gamma(), &half(), &int(2)).unwrap().is_none());
    }

    #[test]
    fn expost_examples() {
        let simplex = PrivacySpec::ex_post(LinearSystem::new(2), &half()).unwrap();
        let PrivacySpec::ExPost { constraints } = &simplex else { unreachable!() };
        assert_eq!(expost_frontier_support(constraints).unwrap(), vec![Posterior::point_mass(2, 1), Posterior::point_mass(2, 0)]);

        let mut sys = LinearSystem::new(2);
        sys.add_le(vec![int(1), int(0)], frac(2, 3));
        sys.add_ge(vec![int(1), int(0)], frac(1, 3));
        let spec = PrivacySpec::ex_post(sys, &half()).unwrap();
        let PrivacySpec::ExPost { constraints } = &spec else { unreachable!() };
        let support = expost_frontier_support(constraints).unwrap();
        assert_eq!(support, vec![p(&[frac(1, 3), frac(2, 3)]), p(&[frac(2, 3), frac(1, 3)])]);
        assert_eq!(frontier_distribution(&support, &half()).unwrap(), c2_gamma());

        let mut point = LinearSystem::new(2);
        point.add_eq(vec![int(1), int(0)], frac(1, 2));
        let PrivacySpec::ExPost { constraints } = PrivacySpec::ex_post(point, &half()).unwrap() else { unreachable!() };
        assert_eq!(expost_frontier_support(&constraints).unwrap(), vec![half()]);

        let mut away = LinearSystem::new(2);
        away.add_ge(vec![int(1), int(0)], frac(3, 4));
        assert!(PrivacySpec::ex_post(away, &half()).is_err());
    }

    #[test]
    fn frontier_distribution_examples() {
        let prior = p(&[frac(1, 5), frac(3, 10), frac(1, 2)]);
        let verts: Vec<_> = (0..3).map(|i| Posterior::point_mass(3, i)).collect();
        let g = frontier_distribution(&verts, &prior).unwrap();
        for i in 0..3 {
            assert_eq!(g.prob_of(&verts[i]), *prior.get(i));
        }
        assert_eq!(frontier_distribution(&[prior.clone()], &prior).unwrap(), BeliefDistribution::dirac(prior.clone()));
        assert!(matches!(frontier_distribution(&[half()], &p(&[frac(1, 3), frac(2, 3)])), Err(Error::Infeasible(_))));
    }

    fn c3() -> (Vec<Rational>, ScalarDistribution) {
        (
            vec![int(0), int(1)],
            ScalarDistribution::new(vec![(frac(1, 4), frac(1, 2)), (frac(3, 4), frac(1, 2))]).unwrap(),
        )
    }

    #[test]
    fn posterior_mean_examples() {
        let (f, kbar) = c3();
        let g = posterior_mean_frontier_construct(&f, &kbar, &half()).unwrap();
        let expected = BeliefDistribution::new(vec![(p(&[frac(3, 4), frac(1, 4)]), frac(1, 2)), (p(&[frac(1, 4), frac(3, 4)]), frac(1, 2))])
            .unwrap();
        assert_eq!(g, expected);
        assert!(posterior_mean_frontier_check(&g, &f, &kbar));
        assert!(!posterior_mean_frontier_check(&BeliefDistribution::dirac(half()), &f, &kbar));
        assert_eq!(kappa_of(&BeliefDistribution::dirac(half()), &f), ScalarDistribution::dirac(frac(1, 2)));
        assert_eq!(kappa_of(&g, &f), kbar);

        let null = posterior_mean_frontier_construct(&f, &ScalarDistribution::dirac(frac(1, 2)), &half()).unwrap();
        assert_eq!(null, BeliefDistribution::dirac(half()));
    }

    #[test]
    fn posterior_mean_ternary() {
        let f = vec![int(0), int(1), int(2)];
        let u = p(&[frac(1, 3), frac(1, 3), frac(1, 3)]);
        let kbar = ScalarDistribution::new(vec![(frac(1, 2), frac(1, 2)), (frac(3, 2), frac(1, 2))]).unwrap();
        let spec = PrivacySpec::posterior_mean(f.clone(), kbar.clone(), &u).unwrap();
        let g = posterior_mean_frontier_construct(&f, &kbar, &u).unwrap();
        assert!(posterior_mean_frontier_check(&g, &f, &kbar));
        assert!(bayes_plausible(&g, &u).unwrap());
        assert!(frontier_membership(&g, &spec, &u).unwrap().on_frontier);
        assert_eq!(g.prob_of(&p(&[frac(1, 2), frac(1, 2), int(0)])), frac(1, 6));
        assert_eq!(g.prob_of(&p(&[frac(3, 4), int(0), frac(1, 4)])), frac(1, 3));
        assert_eq!(g.prob_of(&p(&[int(0), frac(1, 2), frac(1, 2)])), frac(1, 2));
        assert_eq!(g.len(), 3);

        let three = BeliefDistribution::dirac(u.clone());
        assert!(!posterior_mean_frontier_check(&three, &f, &ScalarDistribution::dirac(int(1))));
    }

    #[test]
    fn single_bound_membership() {
        let bound = BeliefDistribution::new(vec![(p(&[frac(3, 4), frac(1, 4)]), frac(1, 2)), (p(&[frac(1, 4), frac(3, 4)]), frac(1, 2))])
            .unwrap();
        let spec = PrivacySpec::single_bound(bound.clone(), &half()).unwrap();
        assert!(frontier_membership(&bound, &spec, &half()).unwrap().on_frontier);
        let m = frontier_membership(&c2_gamma(), &spec, &half()).unwrap();
        assert!(!m.on_frontier);
        assert!(permissible(&c2_gamma(), &spec, &half()).unwrap());
    }
}
