//! Finite probability objects: state spaces with a privacy map, posteriors,
//! distributions over posteriors, and signal kernels.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{one, sum, zero, Rational};

/// A probability vector over a finite index set. Entries are nonnegative and
/// sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Posterior(Vec<Rational>);

impl Posterior {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::input("posterior over an empty set"));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::input("posterior has a negative weight"));
        }
        if sum(&weights) != one() {
            return Err(Error::input("posterior weights do not sum to 1"));
        }
        Ok(Posterior(weights))
    }

    /// Normalizes a nonnegative mass vector with positive total.
    pub fn normalized(mass: Vec<Rational>) -> Result<Self> {
        let total = sum(&mass);
        if !total.is_positive() {
            return Err(Error::input("cannot normalize a zero mass vector"));
        }
        Posterior::new(mass.into_iter().map(|m| m / &total).collect())
    }

    pub fn point_mass(dim: usize, at: usize) -> Self {
        let mut w = vec![zero(); dim];
        w[at] = one();
        Posterior(w)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    /// Indices carrying positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i].is_positive()).collect()
    }

    pub fn into_weights(self) -> Vec<Rational> {
        self.0
    }
}

impl std::fmt::Display for Posterior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(crate::rational::render).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A finite-support distribution over posteriors, kept canonical: strictly
/// positive probabilities summing to one, no repeated posterior, atoms sorted
/// lexicographically by weight vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeliefDistribution {
    atoms: Vec<(Posterior, Rational)>,
}

impl BeliefDistribution {
    /// Builds the canonical form: zero-probability atoms are dropped and equal
    /// posteriors merged.
    pub fn new(atoms: Vec<(Posterior, Rational)>) -> Result<Self> {
        let Some(dim) = atoms.first().map(|(p, _)| p.dim()) else {
            return Err(Error::input("belief distribution without atoms"));
        };
        let mut merged: BTreeMap<Posterior, Rational> = BTreeMap::new();
        let mut total = zero();
        for (p, w) in atoms {
            if p.dim() != dim {
                return Err(Error::input("belief distribution mixes posterior dimensions"));
            }
            if w.is_negative() {
                return Err(Error::input("belief distribution has a negative probability"));
            }
            total += &w;
            if w.is_zero() {
                continue;
            }
            *merged.entry(p).or_insert_with(zero) += w;
        }
        if total != one() {
            return Err(Error::input("belief distribution probabilities do not sum to 1"));
        }
        Ok(BeliefDistribution { atoms: merged.into_iter().collect() })
    }

    pub fn dirac(p: Posterior) -> Self {
        BeliefDistribution { atoms: vec![(p, one())] }
    }

    pub fn atoms(&self) -> &[(Posterior, Rational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.dim()
    }

    /// Barycenter `sum prob * posterior`.
    pub fn mean(&self) -> Vec<Rational> {
        let mut m = vec![zero(); self.dim()];
        for (p, w) in &self.atoms {
            for (mi, pi) in m.iter_mut().zip(p.weights()) {
                *mi += w * pi;
            }
        }
        m
    }

    pub fn prob_of(&self, p: &Posterior) -> Rational {
        self.atoms
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(zero)
    }
}

/// Finite state space `Ω`, privacy labels `Θ`, the privacy map and an
/// interior prior over `Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    omega_labels: Vec<String>,
    theta_labels: Vec<String>,
    theta_map: Vec<usize>,
    prior: Posterior,
}

impl StateSpace {
    pub fn new(
        omega_labels: Vec<String>,
        theta_labels: Vec<String>,
        theta_map: Vec<usize>,
        prior: Vec<Rational>,
    ) -> Result<Self> {
        if omega_labels.is_empty() || theta_labels.is_empty() {
            return Err(Error::input("state space needs at least one state and one privacy label"));
        }
        if theta_map.len() != omega_labels.len() {
            return Err(Error::input("privacy map must assign every state"));
        }
        if theta_map.iter().any(|&t| t >= theta_labels.len()) {
            return Err(Error::input("privacy map points outside the privacy labels"));
        }
        for t in 0..theta_labels.len() {
            if !theta_map.contains(&t) {
                return Err(Error::input(format!(
                    "privacy label {:?} is not the image of any state",
                    theta_labels[t]
                )));
            }
        }
        if prior.len() != omega_labels.len() {
            return Err(Error::input("prior length differs from the number of states"));
        }
        if prior.iter().any(|p| !p.is_positive()) {
            return Err(Error::input("prior must be interior (every state positive)"));
        }
        let prior = Posterior::new(prior)?;
        Ok(StateSpace { omega_labels, theta_labels, theta_map, prior })
    }

    /// Space where the state is the privacy variable itself.
    pub fn identity(labels: Vec<String>, prior: Vec<Rational>) -> Result<Self> {
        let map = (0..labels.len()).collect();
        StateSpace::new(labels.clone(), labels, map, prior)
    }

    pub fn omega_labels(&self) -> &[String] {
        &self.omega_labels
    }

    pub fn theta_labels(&self) -> &[String] {
        &self.theta_labels
    }

    pub fn num_omega(&self) -> usize {
        self.omega_labels.len()
    }

    pub fn num_theta(&self) -> usize {
        self.theta_labels.len()
    }

    pub fn theta_of(&self, omega: usize) -> usize {
        self.theta_map[omega]
    }

    pub fn theta_map(&self) -> &[usize] {
        &self.theta_map
    }

    pub fn prior(&self) -> &Posterior {
        &self.prior
    }

    /// States mapped to `theta`, in declaration order.
    pub fn block(&self, theta: usize) -> Vec<usize> {
        (0..self.num_omega()).filter(|&w| self.theta_map[w] == theta).collect()
    }

    pub fn prior_theta(&self) -> Posterior {
        marginal_theta(&self.prior, self).expect("prior matches its own space")
    }

    /// `μ0(ω | θ̃(ω))`.
    pub fn prior_conditional(&self, omega: usize) -> Rational {
        let theta = self.theta_of(omega);
        let mass: Rational = self.block(theta).iter().map(|&w| self.prior.get(w)).sum();
        self.prior.get(omega) / mass
    }
}

/// Push-forward of a state posterior onto the privacy labels.
pub fn marginal_theta(mu: &Posterior, space: &StateSpace) -> Result<Posterior> {
    if mu.dim() != space.num_omega() {
        return Err(Error::input(format!(
            "posterior has {} entries but the space has {} states",
            mu.dim(),
            space.num_omega()
        )));
    }
    let mut nu = vec![zero(); space.num_theta()];
    for (w, m) in mu.weights().iter().enumerate() {
        nu[space.theta_of(w)] += m;
    }
    Ok(Posterior(nu))
}

/// Push-forward of a distribution over state posteriors; atoms with equal
/// privacy marginals merge.
pub fn marginal_theta_belief(tau: &BeliefDistribution, space: &StateSpace) -> Result<BeliefDistribution> {
    let atoms = tau
        .atoms()
        .iter()
        .map(|(mu, w)| Ok((marginal_theta(mu, space)?, w.clone())))
        .collect::<Result<Vec<_>>>()?;
    BeliefDistribution::new(atoms)
}

/// Exact Bayes plausibility: the barycenter equals `reference`.
pub fn bayes_plausible(gamma: &BeliefDistribution, reference: &Posterior) -> Result<bool> {
    if gamma.dim() != reference.dim() {
        return Err(Error::input("belief distribution and reference have different dimensions"));
    }
    Ok(gamma.mean() == reference.weights())
}

/// A finite signal: `cond[ω][s] = p(s | ω)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalKernel {
    realizations: Vec<String>,
    cond: Vec<Vec<Rational>>,
}

impl SignalKernel {
    pub fn new(realizations: Vec<String>, cond: Vec<Vec<Rational>>) -> Result<Self> {
        for (i, row) in cond.iter().enumerate() {
            if row.len() != realizations.len() {
                return Err(Error::input(format!("kernel row {i} has the wrong length")));
            }
            if row.iter().any(|p| p.is_negative()) || sum(row) != one() {
                return Err(Error::input(format!("kernel row {i} is not a probability vector")));
            }
        }
        Ok(SignalKernel { realizations, cond })
    }

    pub fn realizations(&self) -> &[String] {
        &self.realizations
    }

    pub fn cond(&self) -> &[Vec<Rational>] {
        &self.cond
    }
}

/// Bayes-updates the prior on every positive-probability realization.
pub fn induced_belief_distribution(k: &SignalKernel, space: &StateSpace) -> Result<BeliefDistribution> {
    induced_by_kernel(k.cond(), space.prior())
}

/// Same as [`induced_belief_distribution`] against an arbitrary prior.
pub fn induced_by_kernel(cond: &[Vec<Rational>], prior: &Posterior) -> Result<BeliefDistribution> {
    if cond.len() != prior.dim() {
        return Err(Error::input("kernel rows do not match the prior dimension"));
    }
    let n_sig = cond.first().map(|r| r.len()).unwrap_or(0);
    let mut atoms = Vec::new();
    for s in 0..n_sig {
        let joint: Vec<Rational> = (0..prior.dim()).map(|w| prior.get(w) * &cond[w][s]).collect();
        let p = sum(&joint);
        if p.is_zero() {
            continue;
        }
        atoms.push((Posterior::normalized(joint)?, p));
    }
    BeliefDistribution::new(atoms)
}
