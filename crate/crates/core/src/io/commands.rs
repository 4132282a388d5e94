//! The command verbs behind the CLI. Each takes problem-file text and
//! returns the exact bytes to print plus an exit status.

use serde_json::{json, Value};

use crate::belief::{bayes_plausible, marginal_theta_belief, BeliefDistribution};
use crate::blackwell::compare;
use crate::error::{Error, Result};
use crate::extension::{enumerate_min_extensions, solve_min_extension, verify_min_extension, MinExtension};
use crate::frontier::{first_violation, frontier, frontier_membership, PrivacySpec};
use crate::rational::{render, render_decimal, Rational};
use crate::synthesis::{
    composite_belief_distribution, privacy_safety_check, synthesize, verify_undominated, CheckResult, CompositeSignal,
    ExtensionChoice,
};

use super::schema::{
    decimals, with_decimals, BeliefJson, CompositeJson, DilationJson, ExtensionJson, Problem, ProblemFile, ReorderFile,
    ResultFile, Q,
};

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// `one` or `vertices` for `min-extension`.
    pub mode: Option<String>,
    pub extension_index: Option<usize>,
    pub extension_weights: Option<Vec<Rational>>,
    /// Contents of a reordering file.
    pub reorder: Option<String>,
    pub decimals: Option<usize>,
    /// `gamma`, `gamma_b`, `tau` or `composite`.
    pub artifact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub exit_code: i32,
}

pub const VERBS: [&str; 6] = ["check-dominance", "min-extension", "frontier", "synthesize", "verify", "plot-data"];

/// Runs one verb on problem-file text.
pub fn execute(verb: &str, problem_text: &str, opts: &Options) -> Output {
    with_decimals(opts.decimals, || {
        let result = ProblemFile::parse(problem_text).and_then(|pf| pf.load()).and_then(|p| dispatch(verb, &p, opts));
        match result {
            Ok(Body::Json(payload)) => Output { stdout: ResultFile::ok(verb, payload).to_json(), exit_code: 0 },
            Ok(Body::Csv(text)) => Output { stdout: text, exit_code: 0 },
            Err(e) => Output { stdout: ResultFile::from_error(verb, &e).to_json(), exit_code: e.exit_code() },
        }
    })
}

enum Body {
    Json(Value),
    Csv(String),
}

fn dispatch(verb: &str, p: &Problem, opts: &Options) -> Result<Body> {
    Ok(match verb {
        "check-dominance" => Body::Json(cmd_check_dominance(p)?),
        "min-extension" => Body::Json(cmd_min_extension(p, opts.mode.as_deref().unwrap_or("one"))?),
        "frontier" => Body::Json(cmd_frontier(p)?),
        "synthesize" => Body::Json(cmd_synthesize(p, opts)?),
        "verify" => Body::Json(cmd_verify(p, opts.artifact.as_deref())?),
        "plot-data" => Body::Csv(cmd_plot_data(p, opts.artifact.as_deref())?),
        other => return Err(Error::input(format!("unknown command {other:?}"))),
    })
}

fn require<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T> {
    x.as_ref().ok_or_else(|| Error::input(format!("problem file has no {what}")))
}

pub fn cmd_check_dominance(p: &Problem) -> Result<Value> {
    let a = require(&p.gamma, "gamma")?;
    let b = require(&p.gamma_b, "gamma_b")?;
    let r = compare(a, b)?;
    Ok(json!({
        "a": BeliefJson::from_dist(a),
        "b": BeliefJson::from_dist(b),
        "relation": r.relation.as_str(),
        "witness_a_spreads_b": r.witness_forward.as_ref().map(|d| DilationJson::from_dilation(d, a.len())),
        "witness_b_spreads_a": r.witness_backward.as_ref().map(|d| DilationJson::from_dilation(d, b.len())),
    }))
}

fn extension_value(e: &MinExtension) -> Value {
    let r = e.residuals();
    let qv = |v: &[Rational]| v.iter().cloned().map(Q).collect::<Vec<_>>();
    json!({
        "extension": ExtensionJson::from_ext(e),
        "tau": BeliefJson::from_dist(&e.tau()),
        "residuals": {
            "prior": qv(&r.prior),
            "row_sums": r.row_sums.iter().map(|x| qv(x)).collect::<Vec<_>>(),
            "marginal": r.marginal.iter().map(|x| qv(x)).collect::<Vec<_>>(),
            "all_zero": r.all_zero(),
        },
    })
}

pub fn cmd_min_extension(p: &Problem, mode: &str) -> Result<Value> {
    let gamma = require(&p.gamma, "gamma")?;
    let exts = match mode {
        "one" => vec![solve_min_extension(gamma, &p.space)?],
        "vertices" => enumerate_min_extensions(gamma, &p.space)?,
        other => return Err(Error::input(format!("unknown mode {other:?}; expected one or vertices"))),
    };
    Ok(json!({
        "mode": mode,
        "count": exts.len(),
        "extensions": exts.iter().map(extension_value).collect::<Vec<_>>(),
    }))
}

pub fn cmd_frontier(p: &Problem) -> Result<Value> {
    let spec = require(&p.privacy, "privacy")?;
    let f = frontier(spec, &p.space.prior_theta())?;
    let labels = p.space.theta_labels();
    let support: Vec<Value> = f
        .support
        .iter()
        .enumerate()
        .map(|(i, post)| {
            let mut v = json!({ "posterior": post.weights().iter().cloned().map(Q).collect::<Vec<_>>() });
            if let Some(subsets) = &f.subsets {
                v["subset_e"] = json!(subsets[i].iter().map(|&t| labels[t].clone()).collect::<Vec<_>>());
            }
            v
        })
        .collect();
    Ok(json!({
        "kind": spec.kind(),
        "support": support,
        "gamma": BeliefJson::from_dist(&f.gamma),
    }))
}

fn checks_value(checks: &[CheckResult]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                let mut v = json!({ "name": c.name, "passed": c.passed });
                if let Some(d) = &c.detail {
                    v["detail"] = json!(d);
                }
                v
            })
            .collect(),
    )
}

pub fn cmd_synthesize(p: &Problem, opts: &Options) -> Result<Value> {
    let gamma = require(&p.gamma, "gamma")?;
    let spec = require(&p.privacy, "privacy")?;
    let (choice, choice_value) = match (&opts.extension_weights, opts.extension_index) {
        (Some(_), Some(_)) => return Err(Error::input("give either an extension index or extension weights, not both")),
        (Some(w), None) => (
            ExtensionChoice::Mixture(w.clone()),
            json!({ "weights": w.iter().cloned().map(Q).collect::<Vec<_>>() }),
        ),
        (None, i) => {
            let i = i.unwrap_or(0);
            (ExtensionChoice::Vertex(i), json!({ "index": i }))
        }
    };
    let reorderings = match &opts.reorder {
        Some(text) => {
            let rf: ReorderFile =
                serde_json::from_str(text).map_err(|e| Error::input(format!("invalid reordering file: {e}")))?;
            Some(rf.to_reorderings(&p.space)?)
        }
        None => None,
    };
    let c = synthesize(gamma, spec, &p.space, &choice, reorderings.as_deref())?;
    let checks = verify_undominated(&c, spec)?;
    let marginal = marginal_theta_belief(&composite_belief_distribution(&c)?, &p.space)?;
    Ok(json!({
        "extension_choice": choice_value,
        "composite": CompositeJson::from_composite(&c),
        "theta_marginal": BeliefJson::from_dist(&marginal),
        "checks": checks_value(&checks),
        "verified": checks.iter().all(|r| r.passed),
    }))
}

fn gamma_checks(gamma: &BeliefDistribution, p: &Problem, out: &mut Vec<CheckResult>) -> Result<()> {
    let prior = p.space.prior_theta();
    if gamma.dim() != prior.dim() {
        return Err(Error::input("gamma must be a distribution over privacy posteriors"));
    }
    out.push(CheckResult::new("bayes_plausible", bayes_plausible(gamma, &prior)?, None));
    if let Some(spec) = &p.privacy {
        let violation = first_violation(gamma, spec, &prior)?;
        out.push(CheckResult::new("permissible", violation.is_none(), violation));
        let m = frontier_membership(gamma, spec, &prior)?;
        out.push(CheckResult::new("frontier", m.on_frontier, m.diagnostic));
    }
    Ok(())
}

fn composite_checks(c: &CompositeSignal, spec: Option<&PrivacySpec>, out: &mut Vec<CheckResult>) -> Result<()> {
    let ext = &c.extension;
    let r = ext.residuals();
    let nonneg = ext.cond.iter().flatten().all(|v| *v >= crate::rational::zero());
    out.push(CheckResult::new("extension.residuals", r.all_zero() && nonneg, None));
    out.push(CheckResult::new("min_extension", verify_min_extension(&ext.tau(), &ext.gamma, &ext.space), None));
    for (n, (q, mu)) in c.branch_signals.iter().zip(&ext.extended_atoms).enumerate() {
        let shape = q.validate(mu);
        out.push(CheckResult::new(format!("branch[{n}].density"), shape.is_ok(), shape.err().map(|e| e.to_string())));
    }
    match spec {
        Some(spec) => match verify_undominated(c, spec) {
            Ok(rs) => out.extend(rs.into_iter().filter(|r| r.name != "min_extension")),
            Err(e) => out.push(CheckResult::new("undominated", false, Some(e.to_string()))),
        },
        None => {
            for (n, (q, mu)) in c.branch_signals.iter().zip(&ext.extended_atoms).enumerate() {
                use crate::synthesis::{conditional_privacy_check, conditionally_revealing_check, uniform_marginal_check};
                out.push(CheckResult::new(format!("branch[{n}].uniform_marginal"), uniform_marginal_check(q, mu), None));
                out.push(CheckResult::new(format!("branch[{n}].conditional_privacy"), conditional_privacy_check(q, mu), None));
                out.push(CheckResult::new(
                    format!("branch[{n}].conditionally_revealing"),
                    conditionally_revealing_check(q, mu),
                    None,
                ));
            }
        }
    }
    out.push(CheckResult::new("privacy_safety", privacy_safety_check(c), None));
    let round_trip = composite_belief_distribution(c)
        .and_then(|tau| marginal_theta_belief(&tau, &ext.space))
        .map(|m| m == ext.gamma)
        .unwrap_or(false);
    out.push(CheckResult::new("theta_marginal_round_trip", round_trip, None));
    Ok(())
}

fn pick_artifact<'a>(p: &Problem, requested: Option<&'a str>) -> Result<Option<&'a str>> {
    match requested {
        Some(a @ ("gamma" | "gamma_b" | "tau" | "composite")) => Ok(Some(a)),
        Some(other) => Err(Error::input(format!("unknown artifact {other:?}"))),
        None => Ok(if p.composite.is_some() {
            Some("composite")
        } else if p.tau.is_some() {
            Some("tau")
        } else if p.gamma.is_some() {
            Some("gamma")
        } else {
            None
        }),
    }
}

pub fn cmd_verify(p: &Problem, artifact: Option<&str>) -> Result<Value> {
    let artifact = pick_artifact(p, artifact)?.ok_or_else(|| Error::input("problem file has nothing to verify"))?;
    let mut checks = Vec::new();
    match artifact {
        "gamma" => gamma_checks(require(&p.gamma, "gamma")?, p, &mut checks)?,
        "gamma_b" => gamma_checks(require(&p.gamma_b, "gamma_b")?, p, &mut checks)?,
        "tau" => {
            let tau = require(&p.tau, "tau")?;
            let gamma = require(&p.gamma, "gamma")?;
            checks.push(CheckResult::new("min_extension", verify_min_extension(tau, gamma, &p.space), None));
            gamma_checks(gamma, p, &mut checks)?;
        }
        _ => {
            let c = require(&p.composite, "composite")?;
            composite_checks(c, p.privacy.as_ref(), &mut checks)?;
        }
    }
    Ok(json!({
        "artifact": artifact,
        "checks": checks_value(&checks),
        "all_passed": checks.iter().all(|r| r.passed),
    }))
}

fn numeric_columns(rows: &[Vec<Rational>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            let mut out: Vec<String> = r.iter().map(render).collect();
            if let Some(d) = decimals() {
                out.extend(r.iter().map(|x| render_decimal(x, d)));
            }
            out
        })
        .collect()
}

fn write_csv(lead: &[&str], names: &[String], leads: &[Vec<String>], numbers: &[Vec<Rational>]) -> Result<String> {
    let mut header: Vec<String> = lead.iter().map(|s| s.to_string()).collect();
    header.extend(names.iter().cloned());
    if decimals().is_some() {
        header.extend(names.iter().map(|n| format!("{n}_decimal")));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::invariant(format!("csv output: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for (l, n) in leads.iter().zip(numeric_columns(numbers)) {
        w.write_record(l.iter().chain(n.iter())).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invariant(format!("csv output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::invariant(format!("csv output: {e}")))
}

fn dist_csv(d: Option<&BeliefDistribution>, labels: &[String]) -> Result<String> {
    let mut names = vec!["prob".to_string()];
    names.extend(labels.iter().map(|l| format!("p_{l}")));
    let (leads, numbers): (Vec<_>, Vec<_>) = d
        .map(|d| d.atoms().to_vec())
        .unwrap_or_default()
        .into_iter()
        .enumerate()
        .map(|(i, (post, prob))| {
            let mut nums = vec![prob];
            nums.extend(post.into_weights());
            (vec![i.to_string()], nums)
        })
        .unzip();
    write_csv(&["atom"], &names, &leads, &numbers)
}

pub fn cmd_plot_data(p: &Problem, artifact: Option<&str>) -> Result<String> {
    let theta = p.space.theta_labels();
    let omega = p.space.omega_labels();
    match pick_artifact(p, artifact)? {
        None | Some("gamma") => dist_csv(p.gamma.as_ref(), theta),
        Some("gamma_b") => dist_csv(p.gamma_b.as_ref(), theta),
        Some("tau") => dist_csv(p.tau.as_ref(), omega),
        _ => {
            let mut names = vec!["lo".to_string(), "hi".to_string(), "prob".to_string()];
            names.extend(omega.iter().map(|l| format!("p_{l}")));
            let cells = p.composite.as_ref().map(|c| c.cell_posteriors()).unwrap_or_default();
            let (leads, numbers): (Vec<_>, Vec<_>) = cells
                .into_iter()
                .map(|cp| {
                    let mut nums = vec![cp.interval.0, cp.interval.1, cp.prob];
                    nums.extend(cp.posterior.into_weights());
                    (vec![cp.branch.to_string(), cp.cell.to_string()], nums)
                })
                .unzip();
            write_csv(&["branch", "cell"], &names, &leads, &numbers)
        }
    }
}
