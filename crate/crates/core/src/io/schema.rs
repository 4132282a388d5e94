//! JSON problem and result files.
//!
//! Rationals travel as `"p/q"` strings. When decimal output is switched on
//! they serialize as `{"exact": "p/q", "decimal": "0.333"}`; both forms
//! parse back to the same value.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::belief::{BeliefDistribution, Posterior, StateSpace};
use crate::blackwell::{Dilation, ScalarDistribution};
use crate::error::{Error, Result};
use crate::extension::MinExtension;
use crate::frontier::PrivacySpec;
use crate::lp::LinearSystem;
use crate::rational::{parse, render, render_decimal, Rational};
use crate::synthesis::{CompositeSignal, QuantileSignal, Reordering};

pub const SCHEMA_VERSION: u32 = 1;

thread_local! {
    static DECIMALS: Cell<Option<usize>> = const { Cell::new(None) };
}

/// Runs `f` with decimal renderings added to every serialized rational.
pub fn with_decimals<T>(digits: Option<usize>, f: impl FnOnce() -> T) -> T {
    let prev = DECIMALS.with(|d| d.replace(digits));
    let out = f();
    DECIMALS.with(|d| d.set(prev));
    out
}

pub fn decimals() -> Option<usize> {
    DECIMALS.with(|d| d.get())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match decimals() {
            None => s.serialize_str(&render(&self.0)),
            Some(d) => {
                use serde::ser::SerializeStruct;
                let mut st = s.serialize_struct("Q", 2)?;
                st.serialize_field("exact", &render(&self.0))?;
                st.serialize_field("decimal", &render_decimal(&self.0, d))?;
                st.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string such as \"3/8\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
                parse(v).map(Q).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Q, A::Error> {
                let mut exact = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "exact" => exact = Some(map.next_value::<String>()?),
                        "decimal" => {
                            map.next_value::<String>()?;
                        }
                        other => return Err(de::Error::unknown_field(other, &["exact", "decimal"])),
                    }
                }
                let exact = exact.ok_or_else(|| de::Error::missing_field("exact"))?;
                parse(&exact).map(Q).map_err(de::Error::custom)
            }
        }
        d.deserialize_any(V)
    }
}

fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn rs(v: &[Q]) -> Vec<Rational> {
    v.iter().map(|q| q.0.clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub omega: Vec<String>,
    pub theta: Vec<String>,
    pub theta_map: BTreeMap<String, String>,
    pub prior: Vec<Q>,
}

impl SpaceJson {
    pub fn from_space(s: &StateSpace) -> Self {
        SpaceJson {
            omega: s.omega_labels().to_vec(),
            theta: s.theta_labels().to_vec(),
            theta_map: (0..s.num_omega())
                .map(|w| (s.omega_labels()[w].clone(), s.theta_labels()[s.theta_of(w)].clone()))
                .collect(),
            prior: qs(s.prior().weights()),
        }
    }

    pub fn to_space(&self) -> Result<StateSpace> {
        if self.theta_map.len() != self.omega.len() {
            return Err(Error::input("theta_map must assign every state exactly once"));
        }
        let map = self
            .omega
            .iter()
            .map(|w| {
                let t = self
                    .theta_map
                    .get(w)
                    .ok_or_else(|| Error::input(format!("theta_map has no entry for state {w}")))?;
                self.theta
                    .iter()
                    .position(|x| x == t)
                    .ok_or_else(|| Error::input(format!("theta_map sends {w} to unknown label {t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        StateSpace::new(self.omega.clone(), self.theta.clone(), map, rs(&self.prior))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub posterior: Vec<Q>,
    pub prob: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefJson {
    pub atoms: Vec<AtomJson>,
}

impl BeliefJson {
    pub fn from_dist(d: &BeliefDistribution) -> Self {
        BeliefJson {
            atoms: d
                .atoms()
                .iter()
                .map(|(p, w)| AtomJson { posterior: qs(p.weights()), prob: Q(w.clone()) })
                .collect(),
        }
    }

    /// Rejects repeated posteriors instead of merging them.
    pub fn to_dist(&self) -> Result<BeliefDistribution> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let p = Posterior::new(rs(&a.posterior))?;
            if atoms.iter().any(|(q, _)| *q == p) {
                return Err(Error::input("belief distribution lists the same posterior twice"));
            }
            atoms.push((p, a.prob.0.clone()));
        }
        BeliefDistribution::new(atoms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowJson {
    pub coeffs: Vec<Q>,
    pub op: String,
    pub rhs: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarAtomJson {
    pub value: Q,
    pub prob: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PrivacyJson {
    SingleBound { atoms: Vec<AtomJson> },
    ExPost { rows: Vec<RowJson> },
    Inferential { lambda: Q },
    PosteriorMean { f: Vec<Q>, kappa_bar: Vec<ScalarAtomJson> },
}

impl PrivacyJson {
    pub fn to_spec(&self, prior_theta: &Posterior) -> Result<PrivacySpec> {
        match self {
            PrivacyJson::SingleBound { atoms } => {
                PrivacySpec::single_bound(BeliefJson { atoms: atoms.clone() }.to_dist()?, prior_theta)
            }
            PrivacyJson::ExPost { rows } => {
                let mut sys = LinearSystem::new(prior_theta.dim());
                for (i, r) in rows.iter().enumerate() {
                    if r.coeffs.len() != prior_theta.dim() {
                        return Err(Error::input(format!("ex-post row {i} has the wrong number of coefficients")));
                    }
                    let (c, b) = (rs(&r.coeffs), r.rhs.0.clone());
                    match r.op.as_str() {
                        "<=" => sys.add_le(c, b),
                        ">=" => sys.add_ge(c, b),
                        "=" | "==" => sys.add_eq(c, b),
                        other => return Err(Error::input(format!("ex-post row {i} has unknown operator {other:?}"))),
                    };
                }
                PrivacySpec::ex_post(sys, prior_theta)
            }
            PrivacyJson::Inferential { lambda } => PrivacySpec::inferential(lambda.0.clone()),
            PrivacyJson::PosteriorMean { f, kappa_bar } => {
                let kb = ScalarDistribution::new(kappa_bar.iter().map(|a| (a.value.0.clone(), a.prob.0.clone())).collect())?;
                PrivacySpec::posterior_mean(rs(f), kb, prior_theta)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionJson {
    pub gamma: BeliefJson,
    /// `cond[n][ω] = μ_n(ω | θ̃(ω))`.
    pub cond: Vec<Vec<Q>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extended_atoms: Option<Vec<Vec<Q>>>,
}

impl ExtensionJson {
    pub fn from_ext(e: &MinExtension) -> Self {
        ExtensionJson {
            gamma: BeliefJson::from_dist(&e.gamma),
            cond: e.cond.iter().map(|r| qs(r)).collect(),
            extended_atoms: Some(e.extended_atoms.iter().map(|p| qs(p.weights())).collect()),
        }
    }

    /// Loads without checking the defining equations; a listed
    /// `extended_atoms` must agree with the conditionals.
    pub fn to_ext(&self, space: &StateSpace) -> Result<MinExtension> {
        let gamma = self.gamma.to_dist()?;
        if gamma.atoms().iter().zip(&self.gamma.atoms).any(|((p, _), a)| *p.weights() != *rs(&a.posterior)) {
            return Err(Error::input("extension atoms must be listed in canonical order"));
        }
        let ext = MinExtension::from_cond_unchecked(gamma, space.clone(), self.cond.iter().map(|r| rs(r)).collect())?;
        if let Some(atoms) = &self.extended_atoms {
            let listed: Vec<Vec<Rational>> = atoms.iter().map(|a| rs(a)).collect();
            let computed: Vec<Vec<Rational>> = ext.extended_atoms.iter().map(|p| p.weights().to_vec()).collect();
            if listed != computed {
                return Err(Error::input("extended_atoms do not match the conditional table"));
            }
        }
        Ok(ext)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchJson {
    pub breakpoints: Vec<Q>,
    /// One row per state.
    pub density: Vec<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeJson {
    pub extension: ExtensionJson,
    pub branches: Vec<BranchJson>,
}

impl CompositeJson {
    pub fn from_composite(c: &CompositeSignal) -> Self {
        CompositeJson {
            extension: ExtensionJson::from_ext(&c.extension),
            branches: c
                .branch_signals
                .iter()
                .map(|q| BranchJson { breakpoints: qs(&q.breakpoints), density: q.density.iter().map(|r| qs(r)).collect() })
                .collect(),
        }
    }

    /// Shape checks only; semantic checks are left to verification.
    pub fn to_composite(&self, space: &StateSpace) -> Result<CompositeSignal> {
        let extension = self.extension.to_ext(space)?;
        if self.branches.len() != extension.extended_atoms.len() {
            return Err(Error::input("composite needs one branch per extension atom"));
        }
        let branch_signals = self
            .branches
            .iter()
            .enumerate()
            .map(|(n, b)| {
                let breakpoints = rs(&b.breakpoints);
                let cells = breakpoints.len().saturating_sub(1);
                if cells == 0 || b.density.len() != space.num_omega() || b.density.iter().any(|r| r.len() != cells) {
                    return Err(Error::input(format!("branch {n} density table has the wrong shape")));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::input(format!("branch {n} breakpoints are not increasing")));
                }
                Ok(QuantileSignal { space: space.clone(), breakpoints, density: b.density.iter().map(|r| rs(r)).collect() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompositeSignal { extension, branch_signals })
    }
}

/// Dense dilation: `kernel[s][t]` is the weight from atom `s` of the
/// contraction to atom `t` of the spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationJson {
    pub kernel: Vec<Vec<Q>>,
}

impl DilationJson {
    pub fn from_dilation(d: &Dilation, targets: usize) -> Self {
        DilationJson {
            kernel: d
                .rows
                .iter()
                .map(|row| {
                    let mut dense = vec![Q(crate::rational::zero()); targets];
                    for (t, w) in row {
                        dense[*t] = Q(w.clone());
                    }
                    dense
                })
                .collect(),
        }
    }

    pub fn to_dilation(&self) -> Dilation {
        use num::Zero;
        Dilation {
            rows: self
                .kernel
                .iter()
                .map(|r| r.iter().enumerate().filter(|(_, q)| !q.0.is_zero()).map(|(t, q)| (t, q.0.clone())).collect())
                .collect(),
        }
    }
}

/// Per-branch reorderings keyed by state label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReorderFile {
    pub branches: Vec<Option<BTreeMap<String, Vec<[Q; 2]>>>>,
}

impl ReorderFile {
    pub fn to_reorderings(&self, space: &StateSpace) -> Result<Vec<Option<Reordering>>> {
        self.branches
            .iter()
            .map(|b| {
                b.as_ref()
                    .map(|m| {
                        let intervals = m
                            .iter()
                            .map(|(label, ivs)| {
                                let w = space
                                    .omega_labels()
                                    .iter()
                                    .position(|x| x == label)
                                    .ok_or_else(|| Error::input(format!("reordering names unknown state {label}")))?;
                                Ok((w, ivs.iter().map(|[a, b]| (a.0.clone(), b.0.clone())).collect()))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Reordering { intervals })
                    })
                    .transpose()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub space: SpaceJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub privacy: Option<PrivacyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<BeliefJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_b: Option<BeliefJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<BeliefJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composite: Option<CompositeJson>,
}

/// A parsed problem with validated domain objects.
#[derive(Debug, Clone)]
pub struct Problem {
    pub space: StateSpace,
    pub privacy: Option<PrivacySpec>,
    pub gamma: Option<BeliefDistribution>,
    pub gamma_b: Option<BeliefDistribution>,
    pub tau: Option<BeliefDistribution>,
    pub composite: Option<CompositeSignal>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let pf: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::input(format!("invalid problem file: {e}")))?;
        if pf.version != SCHEMA_VERSION {
            return Err(Error::input(format!("unsupported problem file version {}", pf.version)));
        }
        Ok(pf)
    }

    pub fn load(&self) -> Result<Problem> {
        let space = self.space.to_space()?;
        let prior_theta = space.prior_theta();
        let privacy = self.privacy.as_ref().map(|p| p.to_spec(&prior_theta)).transpose()?;
        let dist = |b: &Option<BeliefJson>| b.as_ref().map(BeliefJson::to_dist).transpose();
        let composite = self.composite.as_ref().map(|c| c.to_composite(&space)).transpose()?;
        Ok(Problem {
            privacy,
            gamma: dist(&self.gamma)?,
            gamma_b: dist(&self.gamma_b)?,
            tau: dist(&self.tau)?,
            composite,
            space,
        })
    }
}

/// Outcome of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub command: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub payload: serde_json::Value,
}

impl ResultFile {
    pub fn ok(command: &str, payload: serde_json::Value) -> Self {
        ResultFile { command: command.into(), status: "ok".into(), reason: None, payload }
    }

    pub fn from_error(command: &str, e: &Error) -> Self {
        let status = match e {
            Error::Input(_) => "input_error",
            Error::Infeasible(_) => "infeasible",
            Error::Refused(_) => "refused",
            Error::Contract(_) => "contract_violation",
            Error::Invariant(_) => "invariant_breach",
        };
        ResultFile {
            command: command.into(),
            status: status.into(),
            reason: Some(e.to_string()),
            payload: serde_json::Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result files serialize");
        s.push('\n');
        s
    }
}
