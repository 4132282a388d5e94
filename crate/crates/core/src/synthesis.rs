//! Two-stage construction of undominated privacy-constrained signals: a
//! minimum-informative extension followed, on each branch, by a quantile
//! signal on `[0, 1]` that reveals the state given the privacy label without
//! moving the privacy posterior.

use num::{Signed, Zero};

use crate::belief::{marginal_theta, marginal_theta_belief, BeliefDistribution, Posterior, StateSpace};
use crate::error::{Error, Result};
use crate::extension::{enumerate_min_extensions, verify_min_extension, MinExtension};
use crate::frontier::{frontier_membership, PrivacySpec};
use crate::rational::{one, sum, zero, Rational};

pub type Interval = (Rational, Rational);

/// Realization on `[0, 1]` with piecewise-constant conditional densities on
/// a shared grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantileSignal {
    pub space: StateSpace,
    pub breakpoints: Vec<Rational>,
    /// `density[ω][k]` on cell `[breakpoints[k], breakpoints[k+1]]`.
    pub density: Vec<Vec<Rational>>,
}

fn block_mass(mu: &Posterior, space: &StateSpace, theta: usize) -> Rational {
    sum(space.block(theta).iter().map(|&w| mu.get(w)))
}

/// `μ(ω | θ̃(ω))`, zero when the block has no mass.
fn conditional(mu: &Posterior, space: &StateSpace, w: usize) -> Rational {
    let m = block_mass(mu, space, space.theta_of(w));
    if m.is_zero() {
        zero()
    } else {
        mu.get(w) / m
    }
}

impl QuantileSignal {
    pub fn num_cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn cell_length(&self, k: usize) -> Rational {
        &self.breakpoints[k + 1] - &self.breakpoints[k]
    }

    /// Shape checks and, for every state with positive mass under `mu`,
    /// that its density integrates to 1.
    pub fn validate(&self, mu: &Posterior) -> Result<()> {
        let bp = &self.breakpoints;
        if bp.len() < 2 || !bp[0].is_zero() || bp[bp.len() - 1] != one() || bp.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("breakpoints must increase strictly from 0 to 1"));
        }
        if self.density.len() != self.space.num_omega() || self.density.iter().any(|r| r.len() != self.num_cells()) {
            return Err(Error::input("density table does not match the states and cells"));
        }
        if self.density.iter().flatten().any(|d| d.is_negative()) {
            return Err(Error::input("density table has a negative entry"));
        }
        for (w, row) in self.density.iter().enumerate() {
            let total = row.iter().enumerate().fold(zero(), |acc, (k, d)| acc + d * self.cell_length(k));
            if mu.get(w).is_positive() && total != one() {
                return Err(Error::input(format!(
                    "density of state {} does not integrate to 1",
                    self.space.omega_labels()[w]
                )));
            }
        }
        Ok(())
    }

    /// Marginal density of the realization given `theta` on cell `k`.
    pub fn theta_density(&self, mu: &Posterior, theta: usize, k: usize) -> Rational {
        self.space
            .block(theta)
            .iter()
            .fold(zero(), |acc, &w| acc + conditional(mu, &self.space, w) * &self.density[w][k])
    }

    /// Maximal intervals on which state `w` has positive density.
    pub fn intervals_of(&self, w: usize) -> Vec<Interval> {
        let mut out: Vec<Interval> = Vec::new();
        for k in 0..self.num_cells() {
            if !self.density[w][k].is_positive() {
                continue;
            }
            let (lo, hi) = (self.breakpoints[k].clone(), self.breakpoints[k + 1].clone());
            match out.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => out.push((lo, hi)),
            }
        }
        out
    }

    /// Every positive-mass state spread uniformly over all of `[0, 1]`.
    pub fn fully_garbled(&self, mu: &Posterior) -> QuantileSignal {
        let density = (0..self.space.num_omega())
            .map(|w| vec![if mu.get(w).is_positive() { one() } else { zero() }; self.num_cells()])
            .collect();
        QuantileSignal { space: self.space.clone(), breakpoints: self.breakpoints.clone(), density }
    }
}

fn from_intervals(mu: &Posterior, space: &StateSpace, intervals: &[Vec<Interval>]) -> QuantileSignal {
    let mut cuts: Vec<Rational> = vec![zero(), one()];
    for (lo, hi) in intervals.iter().flatten() {
        cuts.push(lo.clone());
        cuts.push(hi.clone());
    }
    cuts.sort();
    cuts.dedup();
    let cells = cuts.len() - 1;
    let density = (0..space.num_omega())
        .map(|w| {
            let c = conditional(mu, space, w);
            (0..cells)
                .map(|k| {
                    let inside = intervals[w].iter().any(|(lo, hi)| *lo <= cuts[k] && cuts[k + 1] <= *hi);
                    if inside && c.is_positive() {
                        one() / &c
                    } else {
                        zero()
                    }
                })
                .collect()
        })
        .collect();
    QuantileSignal { space: space.clone(), breakpoints: cuts, density }
}

/// Within each privacy block, states take consecutive subintervals of
/// `[0, 1]` in declaration order with lengths `μ(ω | θ)`.
pub fn quantile_signal(mu: &Posterior, space: &StateSpace) -> Result<QuantileSignal> {
    if mu.dim() != space.num_omega() {
        return Err(Error::input("posterior does not match the state space"));
    }
    let mut intervals = vec![Vec::new(); space.num_omega()];
    for theta in 0..space.num_theta() {
        let mut start = zero();
        for w in space.block(theta) {
            let len = conditional(mu, space, w);
            if len.is_positive() {
                let end = &start + &len;
                intervals[w].push((start.clone(), end.clone()));
                start = end;
            }
        }
    }
    Ok(from_intervals(mu, space, &intervals))
}

/// New interval assignments for some states; unlisted states keep theirs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Reordering {
    pub intervals: Vec<(usize, Vec<Interval>)>,
}

/// Moves states to new subsets of `[0, 1]`. Within every block with
/// positive mass the assigned sets must partition `[0, 1]` and each state's
/// total length must equal `μ(ω | θ)`.
pub fn reorder(q: &QuantileSignal, mu: &Posterior, assignment: &Reordering) -> Result<QuantileSignal> {
    let space = &q.space;
    q.validate(mu)?;
    for (w, row) in q.density.iter().enumerate() {
        let c = conditional(mu, space, w);
        let quantile_form = row.iter().all(|d| d.is_zero() || (c.is_positive() && *d == one() / &c));
        if !quantile_form {
            return Err(Error::input("signal is not in quantile form"));
        }
    }
    let mut intervals: Vec<Vec<Interval>> = (0..space.num_omega()).map(|w| q.intervals_of(w)).collect();
    for (w, ivs) in &assignment.intervals {
        let slot = intervals
            .get_mut(*w)
            .ok_or_else(|| Error::input(format!("reordering names unknown state index {w}")))?;
        *slot = ivs.clone();
    }
    for (w, ivs) in intervals.iter().enumerate() {
        if ivs.iter().any(|(lo, hi)| lo.is_negative() || *hi > one() || lo >= hi) {
            return Err(Error::input(format!(
                "reordering gives state {} an interval outside [0, 1] or empty",
                space.omega_labels()[w]
            )));
        }
        let total = sum(ivs.iter().map(|(lo, hi)| hi - lo).collect::<Vec<_>>().iter());
        if total != conditional(mu, space, w) {
            return Err(Error::input(format!(
                "reordering gives state {} total length {} instead of its conditional probability",
                space.omega_labels()[w],
                crate::rational::render(&total)
            )));
        }
    }
    for theta in 0..space.num_theta() {
        if !block_mass(mu, space, theta).is_positive() {
            continue;
        }
        let mut ivs: Vec<&Interval> = space.block(theta).iter().flat_map(|&w| intervals[w].iter()).collect();
        ivs.sort();
        if ivs.windows(2).any(|p| p[0].1 > p[1].0) {
            return Err(Error::input(format!(
                "reordering overlaps states under {}",
                space.theta_labels()[theta]
            )));
        }
    }
    let out = from_intervals(mu, space, &intervals);
    out.validate(mu)?;
    Ok(out)
}

/// On every cell, the realization's density given the privacy label is the
/// same for all labels with positive mass.
pub fn conditional_privacy_check(q: &QuantileSignal, mu: &Posterior) -> bool {
    let live: Vec<usize> = (0..q.space.num_theta()).filter(|&t| block_mass(mu, &q.space, t).is_positive()).collect();
    (0..q.num_cells()).all(|k| {
        let mut dens = live.iter().map(|&t| q.theta_density(mu, t, k));
        match dens.next() {
            Some(first) => dens.all(|d| d == first),
            None => true,
        }
    })
}

/// The stronger property produced by construction: the density given each
/// live privacy label is exactly 1 on every cell.
pub fn uniform_marginal_check(q: &QuantileSignal, mu: &Posterior) -> bool {
    (0..q.space.num_theta())
        .filter(|&t| block_mass(mu, &q.space, t).is_positive())
        .all(|t| (0..q.num_cells()).all(|k| q.theta_density(mu, t, k) == one()))
}

/// On every cell, at most one state per live privacy label has positive
/// density.
pub fn conditionally_revealing_check(q: &QuantileSignal, mu: &Posterior) -> bool {
    (0..q.space.num_theta())
        .filter(|&t| block_mass(mu, &q.space, t).is_positive())
        .all(|t| {
            (0..q.num_cells()).all(|k| {
                q.space.block(t).iter().filter(|&&w| mu.get(w).is_positive() && q.density[w][k].is_positive()).count() <= 1
            })
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSignal {
    pub extension: MinExtension,
    pub branch_signals: Vec<QuantileSignal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionChoice {
    /// Index into the enumerated vertex extensions.
    Vertex(usize),
    /// Convex weights over the enumerated vertex extensions.
    Mixture(Vec<Rational>),
    Explicit(MinExtension),
}

/// One cell of one branch with its posterior and probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellPosterior {
    pub branch: usize,
    pub cell: usize,
    pub interval: Interval,
    pub posterior: Posterior,
    pub prob: Rational,
}

impl CompositeSignal {
    pub fn branch_prob(&self, n: usize) -> &Rational {
        &self.extension.gamma.atoms()[n].1
    }

    /// First-stage kernel `p(n | ω) = τ(n) μ_n(ω) / μ0(ω)`.
    pub fn first_stage_kernel(&self) -> Vec<Vec<Rational>> {
        let space = &self.extension.space;
        (0..space.num_omega())
            .map(|w| {
                self.extension
                    .extended_atoms
                    .iter()
                    .enumerate()
                    .map(|(n, mu)| self.branch_prob(n) * mu.get(w) / space.prior().get(w))
                    .collect()
            })
            .collect()
    }

    pub fn check_invariants(&self) -> Result<()> {
        self.extension.check_invariants()?;
        if self.branch_signals.len() != self.extension.extended_atoms.len() {
            return Err(Error::invariant("composite.branch_count"));
        }
        for (q, mu) in self.branch_signals.iter().zip(&self.extension.extended_atoms) {
            q.validate(mu).map_err(|_| Error::invariant("composite.branch_density"))?;
            if !conditional_privacy_check(q, mu) {
                return Err(Error::invariant("composite.conditional_privacy"));
            }
        }
        if self.first_stage_kernel().iter().any(|row| sum(row) != one()) {
            return Err(Error::invariant("composite.first_stage_kernel"));
        }
        Ok(())
    }

    /// Posterior and probability of every cell with positive probability.
    pub fn cell_posteriors(&self) -> Vec<CellPosterior> {
        let mut out = Vec::new();
        for (n, (q, mu)) in self.branch_signals.iter().zip(&self.extension.extended_atoms).enumerate() {
            for k in 0..q.num_cells() {
                let mass: Vec<Rational> = (0..mu.dim()).map(|w| mu.get(w) * &q.density[w][k]).collect();
                let total = sum(&mass);
                if total.is_zero() {
                    continue;
                }
                let len = q.cell_length(k);
                out.push(CellPosterior {
                    branch: n,
                    cell: k,
                    interval: (q.breakpoints[k].clone(), q.breakpoints[k + 1].clone()),
                    posterior: Posterior::normalized(mass).expect("positive mass"),
                    prob: self.branch_prob(n) * len * total,
                });
            }
        }
        out
    }
}

pub fn composite_belief_distribution(c: &CompositeSignal) -> Result<BeliefDistribution> {
    BeliefDistribution::new(c.cell_posteriors().into_iter().map(|cp| (cp.posterior, cp.prob)).collect())
}

fn resolve_extension(
    gamma: &BeliefDistribution,
    space: &StateSpace,
    choice: &ExtensionChoice,
) -> Result<MinExtension> {
    match choice {
        ExtensionChoice::Vertex(i) => {
            let verts = enumerate_min_extensions(gamma, space)?;
            let count = verts.len();
            verts.into_iter().nth(*i).ok_or_else(|| {
                Error::input(format!("extension index {i} out of range; there are {count} vertex extensions"))
            })
        }
        ExtensionChoice::Mixture(weights) => MinExtension::mixture(&enumerate_min_extensions(gamma, space)?, weights),
        ExtensionChoice::Explicit(ext) => {
            if ext.gamma != *gamma || ext.space != *space {
                return Err(Error::input("explicit extension is for a different distribution or space"));
            }
            ext.check_invariants().map_err(|e| Error::input(format!("explicit extension is invalid: {e}")))?;
            Ok(ext.clone())
        }
    }
}

/// Builds the composite for a frontier distribution. `reorderings`, when
/// given, holds one optional reordering per branch.
pub fn synthesize(
    gamma: &BeliefDistribution,
    spec: &PrivacySpec,
    space: &StateSpace,
    choice: &ExtensionChoice,
    reorderings: Option<&[Option<Reordering>]>,
) -> Result<CompositeSignal> {
    let membership = frontier_membership(gamma, spec, &space.prior_theta())?;
    if !membership.on_frontier {
        return Err(Error::refused(format!(
            "distribution is not on the privacy frontier ({})",
            membership.diagnostic.unwrap_or_default()
        )));
    }
    let extension = resolve_extension(gamma, space, choice)?;
    if let Some(r) = reorderings {
        if r.len() != extension.extended_atoms.len() {
            return Err(Error::input(format!(
                "{} reorderings given for {} branches",
                r.len(),
                extension.extended_atoms.len()
            )));
        }
    }
    let mut branch_signals = Vec::with_capacity(extension.extended_atoms.len());
    for (n, mu) in extension.extended_atoms.iter().enumerate() {
        let q = quantile_signal(mu, space)?;
        let q = match reorderings.and_then(|r| r[n].as_ref()) {
            Some(a) => reorder(&q, mu, a)?,
            None => q,
        };
        branch_signals.push(q);
    }
    let c = CompositeSignal { extension, branch_signals };
    c.check_invariants()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, detail: Option<String>) -> Self {
        CheckResult { name: name.into(), passed, detail }
    }
}

/// Undominatedness report for a composite: minimal first stage, revealing
/// and privacy-preserving branches, and a frontier privacy marginal.
pub fn verify_undominated(c: &CompositeSignal, spec: &PrivacySpec) -> Result<Vec<CheckResult>> {
    let ext = &c.extension;
    let space = &ext.space;
    let mut checks = vec![CheckResult::new("min_extension", verify_min_extension(&ext.tau(), &ext.gamma, space), None)];
    for (n, (q, mu)) in c.branch_signals.iter().zip(&ext.extended_atoms).enumerate() {
        checks.push(CheckResult::new(format!("branch[{n}].uniform_marginal"), uniform_marginal_check(q, mu), None));
        checks.push(CheckResult::new(format!("branch[{n}].conditional_privacy"), conditional_privacy_check(q, mu), None));
        checks.push(CheckResult::new(
            format!("branch[{n}].conditionally_revealing"),
            conditionally_revealing_check(q, mu),
            None,
        ));
    }
    let tau = composite_belief_distribution(c)?;
    let marginal = marginal_theta_belief(&tau, space)?;
    let membership = frontier_membership(&marginal, spec, &space.prior_theta())?;
    checks.push(CheckResult::new("frontier", membership.on_frontier, membership.diagnostic));
    Ok(checks)
}

/// Every cell posterior has its branch's privacy marginal.
pub fn privacy_safety_check(c: &CompositeSignal) -> bool {
    c.cell_posteriors().iter().all(|cp| {
        marginal_theta(&cp.posterior, &c.extension.space).ok().as_ref() == Some(&c.extension.gamma.atoms()[cp.branch].0)
    })
}
