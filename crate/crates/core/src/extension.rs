//! Minimum-informative extensions: lifting a distribution over privacy
//! posteriors to one over full-state posteriors, one state posterior per
//! privacy posterior, without adding information beyond what the privacy
//! marginal forces.

use num::{Signed, Zero};

use crate::belief::{bayes_plausible, marginal_theta, marginal_theta_belief, BeliefDistribution, Posterior, StateSpace};
use crate::error::{Error, Result};
use crate::lp::{enumerate_vertices, feasible_point, LinearSystem};
use crate::rational::{clear_denominators, one, sum, zero, Rational};

/// The extension polytope together with the meaning of each variable.
#[derive(Debug, Clone)]
pub struct ExtensionSystem {
    pub system: LinearSystem,
    /// `variables[k] = (n, ω)`: variable `k` is `μ_n(ω | θ̃(ω))`.
    pub variables: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinExtension {
    pub gamma: BeliefDistribution,
    pub space: StateSpace,
    /// `cond[n][ω] = μ_n(ω | θ̃(ω))`. Where `ν_n(θ̃(ω)) = 0` the entry
    /// carries the prior conditional, which does not affect the atom.
    pub cond: Vec<Vec<Rational>>,
    pub extended_atoms: Vec<Posterior>,
}

/// Exact residuals of the defining equations; all zero for a valid extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionResiduals {
    /// Per state: `μ0(ω) - Σ_n γ_n ν_n(θ̃ω) μ_n(ω|θ̃ω)`.
    pub prior: Vec<Rational>,
    /// Per atom and privacy label with positive mass: `1 - Σ_{ω∈θ} μ_n(ω|θ)`.
    pub row_sums: Vec<Vec<Rational>>,
    /// Per atom and privacy label: `ν_n(θ) - (marginal of the atom)(θ)`.
    pub marginal: Vec<Vec<Rational>>,
}

impl ExtensionResiduals {
    pub fn all_zero(&self) -> bool {
        self.prior
            .iter()
            .chain(self.row_sums.iter().flatten())
            .chain(self.marginal.iter().flatten())
            .all(Zero::is_zero)
    }
}

fn check_inputs(gamma: &BeliefDistribution, space: &StateSpace) -> Result<()> {
    if gamma.dim() != space.num_theta() {
        return Err(Error::input(format!(
            "belief distribution is over {} privacy labels but the space has {}",
            gamma.dim(),
            space.num_theta()
        )));
    }
    if !bayes_plausible(gamma, &space.prior_theta())? {
        return Err(Error::infeasible(
            "no extension exists: the belief distribution does not average to the prior over privacy labels",
        ));
    }
    Ok(())
}

pub fn build_extension_system(gamma: &BeliefDistribution, space: &StateSpace) -> Result<ExtensionSystem> {
    check_inputs(gamma, space)?;
    let mut variables = Vec::new();
    for (n, (nu, _)) in gamma.atoms().iter().enumerate() {
        for w in 0..space.num_omega() {
            if nu.get(space.theta_of(w)).is_positive() {
                variables.push((n, w));
            }
        }
    }
    let nv = variables.len();
    let mut system = LinearSystem::nonnegative(nv);

    for w in 0..space.num_omega() {
        let theta = space.theta_of(w);
        let mut row = vec![zero(); nv];
        for (k, &(n, v)) in variables.iter().enumerate() {
            if v == w {
                let (nu, p) = &gamma.atoms()[n];
                row[k] = p * nu.get(theta);
            }
        }
        let mut rhs = space.prior().get(w).clone();
        clear_denominators(&mut row, &mut rhs);
        system.add_eq(row, rhs);
    }
    for (n, (nu, _)) in gamma.atoms().iter().enumerate() {
        for theta in 0..space.num_theta() {
            if !nu.get(theta).is_positive() {
                continue;
            }
            let mut row = vec![zero(); nv];
            for (k, &(m, w)) in variables.iter().enumerate() {
                if m == n && space.theta_of(w) == theta {
                    row[k] = one();
                }
            }
            system.add_eq(row, one());
        }
    }
    Ok(ExtensionSystem { system, variables })
}

impl ExtensionSystem {
    fn assemble(&self, gamma: &BeliefDistribution, space: &StateSpace, x: &[Rational]) -> Result<MinExtension> {
        let mut cond: Vec<Vec<Rational>> = (0..gamma.len())
            .map(|_| (0..space.num_omega()).map(|w| space.prior_conditional(w)).collect())
            .collect();
        for (&(n, w), v) in self.variables.iter().zip(x) {
            cond[n][w] = v.clone();
        }
        MinExtension::from_cond(gamma.clone(), space.clone(), cond)
    }
}

impl MinExtension {
    /// Builds an extension from explicit conditionals and checks every
    /// defining equation exactly.
    pub fn from_cond(gamma: BeliefDistribution, space: StateSpace, cond: Vec<Vec<Rational>>) -> Result<Self> {
        let ext = Self::from_cond_unchecked(gamma, space, cond)?;
        ext.check_invariants()?;
        Ok(ext)
    }

    /// Like [`MinExtension::from_cond`] but only checks shapes, so that a
    /// broken table can still be loaded and reported on.
    pub fn from_cond_unchecked(gamma: BeliefDistribution, space: StateSpace, cond: Vec<Vec<Rational>>) -> Result<Self> {
        if cond.len() != gamma.len() || cond.iter().any(|r| r.len() != space.num_omega()) {
            return Err(Error::input("conditional table does not match the atoms and states"));
        }
        if cond.iter().flatten().any(|v| v.is_negative()) {
            return Err(Error::input("conditional table has a negative entry"));
        }
        let mut extended_atoms = Vec::with_capacity(gamma.len());
        for ((nu, _), row) in gamma.atoms().iter().zip(&cond) {
            let mass = (0..space.num_omega()).map(|w| nu.get(space.theta_of(w)) * &row[w]).collect();
            extended_atoms.push(Posterior::normalized(mass)?);
        }
        Ok(MinExtension { gamma, space, cond, extended_atoms })
    }

    pub fn residuals(&self) -> ExtensionResiduals {
        let space = &self.space;
        let prior = (0..space.num_omega())
            .map(|w| {
                let theta = space.theta_of(w);
                let avg = self
                    .gamma
                    .atoms()
                    .iter()
                    .zip(&self.cond)
                    .fold(zero(), |acc, ((nu, p), row)| acc + p * nu.get(theta) * &row[w]);
                space.prior().get(w) - avg
            })
            .collect();
        let row_sums = self
            .gamma
            .atoms()
            .iter()
            .zip(&self.cond)
            .map(|((nu, _), row)| {
                (0..space.num_theta())
                    .map(|theta| {
                        if nu.get(theta).is_positive() {
                            one() - sum(space.block(theta).iter().map(|&w| &row[w]))
                        } else {
                            zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let marginal = self
            .gamma
            .atoms()
            .iter()
            .zip(&self.extended_atoms)
            .map(|((nu, _), mu)| {
                let m = marginal_theta(mu, space).expect("extended atom lives on the state space");
                nu.weights().iter().zip(m.weights()).map(|(a, b)| a - b).collect()
            })
            .collect();
        ExtensionResiduals { prior, row_sums, marginal }
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.cond.iter().flatten().any(|v| v.is_negative()) {
            return Err(Error::invariant("extension.nonnegative"));
        }
        let r = self.residuals();
        if r.row_sums.iter().flatten().any(|v| !v.is_zero()) {
            return Err(Error::invariant("extension.row_sums"));
        }
        if r.prior.iter().any(|v| !v.is_zero()) {
            return Err(Error::invariant("extension.prior_conditional"));
        }
        if r.marginal.iter().flatten().any(|v| !v.is_zero()) {
            return Err(Error::invariant("extension.theta_marginal"));
        }
        Ok(())
    }

    /// The extension as a distribution over state posteriors.
    pub fn tau(&self) -> BeliefDistribution {
        BeliefDistribution::new(
            self.extended_atoms
                .iter()
                .cloned()
                .zip(self.gamma.atoms().iter().map(|(_, p)| p.clone()))
                .collect(),
        )
        .expect("extension weights come from a valid distribution")
    }

    /// Convex combination of extensions of the same distribution.
    pub fn mixture(parts: &[MinExtension], weights: &[Rational]) -> Result<MinExtension> {
        let first = parts.first().ok_or_else(|| Error::input("mixture of no extensions"))?;
        if parts.len() != weights.len() {
            return Err(Error::input("mixture weights do not match the extensions"));
        }
        if weights.iter().any(|w| w.is_negative()) || sum(weights) != one() {
            return Err(Error::input("mixture weights must be nonnegative and sum to 1"));
        }
        if parts.iter().any(|p| p.gamma != first.gamma || p.space != first.space) {
            return Err(Error::input("mixed extensions must share the distribution and space"));
        }
        let mut cond = vec![vec![zero(); first.space.num_omega()]; first.gamma.len()];
        for (part, w) in parts.iter().zip(weights) {
            for (acc, row) in cond.iter_mut().zip(&part.cond) {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += w * v;
                }
            }
        }
        MinExtension::from_cond(first.gamma.clone(), first.space.clone(), cond)
    }
}

/// One extension: the lexicographically least point of the polytope.
pub fn solve_min_extension(gamma: &BeliefDistribution, space: &StateSpace) -> Result<MinExtension> {
    let es = build_extension_system(gamma, space)?;
    let x = feasible_point(&es.system)?.ok_or_else(|| Error::infeasible("no extension exists"))?;
    es.assemble(gamma, space, &x)
}

/// Every vertex of the extension polytope, in lexicographic order of the
/// variable vector.
pub fn enumerate_min_extensions(gamma: &BeliefDistribution, space: &StateSpace) -> Result<Vec<MinExtension>> {
    let es = build_extension_system(gamma, space)?;
    let vertices = enumerate_vertices(&es.system)?;
    if vertices.is_empty() {
        return Err(Error::infeasible("no extension exists"));
    }
    vertices.iter().map(|x| es.assemble(gamma, space, x)).collect()
}

/// True iff `tau` has privacy marginal `gamma` and no two of its atoms share
/// a privacy marginal.
pub fn verify_min_extension(tau: &BeliefDistribution, gamma: &BeliefDistribution, space: &StateSpace) -> bool {
    if tau.dim() != space.num_omega() || gamma.dim() != space.num_theta() {
        return false;
    }
    let Ok(marg) = marginal_theta_belief(tau, space) else {
        return false;
    };
    marg == *gamma && marg.len() == tau.len()
}

/// Splits atom `atom` of `tau` into two posteriors with the same privacy
/// marginal by moving mass between the first two positive-mass states of
/// block `theta`. Returns `None` when the block has fewer than two such
/// states.
pub fn split_atom(tau: &BeliefDistribution, space: &StateSpace, atom: usize, theta: usize) -> Option<BeliefDistribution> {
    let (mu, p) = tau.atoms().get(atom)?;
    let pos: Vec<usize> = space.block(theta).into_iter().filter(|&w| mu.get(w).is_positive()).collect();
    let (&a, &b) = (pos.first()?, pos.get(1)?);
    let eta = mu.get(a).clone().min(mu.get(b).clone()) / Rational::from_integer(2.into());
    let shift = |sign: bool| {
        let mut w = mu.weights().to_vec();
        if sign {
            w[a] += &eta;
            w[b] -= &eta;
        } else {
            w[a] -= &eta;
            w[b] += &eta;
        }
        Posterior::new(w).expect("shift stays on the simplex")
    };
    let half = p / Rational::from_integer(2.into());
    let mut atoms: Vec<(Posterior, Rational)> = tau
        .atoms()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != atom)
        .map(|(_, x)| x.clone())
        .collect();
    atoms.push((shift(true), half.clone()));
    atoms.push((shift(false), half));
    BeliefDistribution::new(atoms).ok()
}

/// Every split obtainable by [`split_atom`].
pub fn all_splits(tau: &BeliefDistribution, space: &StateSpace) -> Vec<BeliefDistribution> {
    (0..tau.len())
        .flat_map(|n| (0..space.num_theta()).filter_map(move |t| split_atom(tau, space, n, t)))
        .collect()
}
