//! Exact rational linear feasibility, optimization and vertex enumeration.
//!
//! Every system is rewritten into standard form `A y = b, y >= 0` and solved
//! with a dense two-phase tableau simplex using Bland's rule, so pivoting
//! terminates without any tolerance parameter. Deterministic outputs use the
//! lexicographically least point of the relevant face: after minimizing
//! `x_0`, every column with a positive reduced cost is frozen at zero (that is
//! exactly the optimal face), then `x_1` is minimized on what remains, and so
//! on.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dot, one, zero, Rational};

/// One linear row `coeffs · x (op) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Row {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Row { coeffs, rhs }
    }

    fn lhs(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }
}

/// Optional box bounds on a single variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

/// `eq_rows` hold `coeffs · x = rhs`, `ineq_rows` hold `coeffs · x <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub eq_rows: Vec<Row>,
    pub ineq_rows: Vec<Row>,
    pub bounds: Vec<Bounds>,
}

impl LinearSystem {
    /// System over `num_vars` free variables with no rows.
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            eq_rows: Vec::new(),
            ineq_rows: Vec::new(),
            bounds: vec![Bounds::default(); num_vars],
        }
    }

    /// System over `num_vars` variables, each constrained to be `>= 0`.
    pub fn nonnegative(num_vars: usize) -> Self {
        let mut sys = Self::new(num_vars);
        for b in &mut sys.bounds {
            b.lower = Some(zero());
        }
        sys
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.eq_rows.push(Row::new(coeffs, rhs));
        self
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.ineq_rows.push(Row::new(coeffs, rhs));
        self
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        let coeffs = coeffs.into_iter().map(|c| -c).collect();
        self.ineq_rows.push(Row::new(coeffs, -rhs));
        self
    }

    pub fn set_lower(&mut self, var: usize, lower: Rational) -> &mut Self {
        self.bounds[var].lower = Some(lower);
        self
    }

    pub fn set_upper(&mut self, var: usize, upper: Rational) -> &mut Self {
        self.bounds[var].upper = Some(upper);
        self
    }

    /// Checks that every row has exactly `num_vars` coefficients.
    pub fn validate(&self) -> Result<()> {
        if self.bounds.len() != self.num_vars {
            return Err(Error::input(format!(
                "system declares {} variables but carries {} bounds",
                self.num_vars,
                self.bounds.len()
            )));
        }
        for (kind, rows) in [("equality", &self.eq_rows), ("inequality", &self.ineq_rows)] {
            for (i, row) in rows.iter().enumerate() {
                if row.coeffs.len() != self.num_vars {
                    return Err(Error::input(format!(
                        "{kind} row {i} has {} coefficients, expected {}",
                        row.coeffs.len(),
                        self.num_vars
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact membership test.
    pub fn satisfies(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        self.eq_rows.iter().all(|r| r.lhs(x) == r.rhs)
            && self.ineq_rows.iter().all(|r| r.lhs(x) <= r.rhs)
            && self.bounds.iter().zip(x).all(|(b, v)| {
                b.lower.as_ref().is_none_or(|l| v >= l) && b.upper.as_ref().is_none_or(|u| v <= u)
            })
    }

    /// Residuals `lhs - rhs` of the equality rows, in row order.
    pub fn eq_residuals(&self, x: &[Rational]) -> Vec<Rational> {
        self.eq_rows.iter().map(|r| r.lhs(x) - &r.rhs).collect()
    }
}

/// Returns a point satisfying every row exactly, or `None` when the system
/// is infeasible. The point is the lexicographically least feasible vector
/// whenever each coordinate is bounded below on the feasible set; otherwise
/// the lexicographic descent stops at the first unbounded coordinate and the
/// current basic solution is returned.
pub fn feasible_point(sys: &LinearSystem) -> Result<Option<Vec<Rational>>> {
    sys.validate()?;
    let sf = StandardForm::build(sys);
    let Some(mut tab) = sf.phase_one() else {
        return Ok(None);
    };
    tab.lexmin(&sf.maps);
    Ok(Some(sf.recover(&tab.solution())))
}

/// Maximizes `objective · x`. Returns `None` when infeasible and a contract
/// error when the objective is unbounded above. Among optimal points the
/// lexicographically least is returned.
pub fn maximize(sys: &LinearSystem, objective: &[Rational]) -> Result<Option<(Rational, Vec<Rational>)>> {
    sys.validate()?;
    if objective.len() != sys.num_vars {
        return Err(Error::input(format!(
            "objective has {} coefficients, expected {}",
            objective.len(),
            sys.num_vars
        )));
    }
    let sf = StandardForm::build(sys);
    let Some(mut tab) = sf.phase_one() else {
        return Ok(None);
    };
    let neg: Vec<Rational> = objective.iter().map(|c| -c).collect();
    let cost = sf.cost_for(&neg);
    let mut obj = tab.reduced_costs(&cost);
    if tab.simplex(&mut obj).is_err() {
        return Err(Error::contract("objective is unbounded above on the feasible region"));
    }
    tab.freeze_positive(&obj);
    tab.lexmin(&sf.maps);
    let x = sf.recover(&tab.solution());
    Ok(Some((dot(objective, &x), x)))
}

/// Minimizes `objective · x`; mirror image of [`maximize`].
pub fn minimize(sys: &LinearSystem, objective: &[Rational]) -> Result<Option<(Rational, Vec<Rational>)>> {
    let neg: Vec<Rational> = objective.iter().map(|c| -c).collect();
    match maximize(sys, &neg) {
        Ok(r) => Ok(r.map(|(v, x)| (-v, x))),
        Err(Error::Contract(_)) => Err(Error::contract("objective is unbounded below on the feasible region")),
        Err(e) => Err(e),
    }
}

/// Every vertex of a bounded polyhedron, exactly once, sorted
/// lexicographically. An empty region yields an empty list; an unbounded one
/// is a contract violation.
///
/// Vertices are basic feasible solutions of the standard form. They are
/// collected by a breadth-first walk over feasible bases, where neighbours
/// differ by one (possibly degenerate) ratio-test pivot.
pub fn enumerate_vertices(sys: &LinearSystem) -> Result<Vec<Vec<Rational>>> {
    sys.validate()?;
    if feasible_point(sys)?.is_none() {
        return Ok(Vec::new());
    }
    // Bound every coordinate from below so the standard form has no split
    // variables; the implied bounds leave the region itself unchanged.
    let mut tight = sys.clone();
    for i in 0..sys.num_vars {
        let mut e = vec![zero(); sys.num_vars];
        e[i] = one();
        let lo = minimize(sys, &e).map_err(|_| Error::contract("region is unbounded"))?;
        maximize(sys, &e).map_err(|_| Error::contract("region is unbounded"))?;
        if let Some((v, _)) = lo {
            tight.bounds[i].lower = Some(v);
        }
    }
    let sf = StandardForm::build(&tight);
    let Some(start) = sf.phase_one() else {
        return Ok(Vec::new());
    };

    let mut vertices = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.basis_key());
    queue.push_back(start);
    while let Some(tab) = queue.pop_front() {
        vertices.insert(sf.recover(&tab.solution()));
        for col in 0..tab.n {
            if tab.basis.contains(&col) {
                continue;
            }
            let rows = tab.min_ratio_rows(col);
            if rows.is_empty() {
                // A nonbasic column with no positive entry is a ray.
                return Err(Error::contract("region is unbounded"));
            }
            for r in rows {
                let mut next = tab.clone();
                next.pivot(r, col, None);
                if seen.insert(next.basis_key()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(vertices.into_iter().collect())
}

/// Original variable `x_i = offset + sum(sign * y_col)`.
#[derive(Debug, Clone)]
struct VarMap {
    offset: Rational,
    cols: Vec<(usize, bool)>,
}

struct StandardForm {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    n: usize,
    maps: Vec<VarMap>,
}

impl StandardForm {
    fn build(sys: &LinearSystem) -> Self {
        let mut maps = Vec::with_capacity(sys.num_vars);
        let mut n = 0usize;
        // Upper bounds that need a row of their own: (column, bound).
        let mut extra_upper = Vec::new();
        for b in &sys.bounds {
            match (&b.lower, &b.upper) {
                (Some(l), u) => {
                    if let Some(u) = u {
                        extra_upper.push((n, u - l));
                    }
                    maps.push(VarMap { offset: l.clone(), cols: vec![(n, false)] });
                    n += 1;
                }
                (None, Some(u)) => {
                    maps.push(VarMap { offset: u.clone(), cols: vec![(n, true)] });
                    n += 1;
                }
                (None, None) => {
                    maps.push(VarMap { offset: zero(), cols: vec![(n, false), (n + 1, true)] });
                    n += 2;
                }
            }
        }
        let structural = n;
        let n_slack = sys.ineq_rows.len() + extra_upper.len();
        let total = structural + n_slack;

        let lift = |row: &Row| -> (Vec<Rational>, Rational) {
            let mut out = vec![zero(); total];
            let mut rhs = row.rhs.clone();
            for (coef, map) in row.coeffs.iter().zip(&maps) {
                if coef.is_zero() {
                    continue;
                }
                rhs -= coef * &map.offset;
                for &(col, neg) in &map.cols {
                    if neg {
                        out[col] -= coef;
                    } else {
                        out[col] += coef;
                    }
                }
            }
            (out, rhs)
        };

        let mut a = Vec::new();
        let mut b = Vec::new();
        for row in &sys.eq_rows {
            let (r, rhs) = lift(row);
            a.push(r);
            b.push(rhs);
        }
        let mut slack = structural;
        for row in &sys.ineq_rows {
            let (mut r, rhs) = lift(row);
            r[slack] = one();
            slack += 1;
            a.push(r);
            b.push(rhs);
        }
        for (col, ub) in extra_upper {
            let mut r = vec![zero(); total];
            r[col] = one();
            r[slack] = one();
            slack += 1;
            a.push(r);
            b.push(ub);
        }
        StandardForm { a, b, n: total, maps }
    }

    fn cost_for(&self, objective: &[Rational]) -> Vec<Rational> {
        let mut cost = vec![zero(); self.n];
        for (c, map) in objective.iter().zip(&self.maps) {
            for &(col, neg) in &map.cols {
                if neg {
                    cost[col] -= c;
                } else {
                    cost[col] += c;
                }
            }
        }
        cost
    }

    fn recover(&self, y: &[Rational]) -> Vec<Rational> {
        self.maps
            .iter()
            .map(|m| {
                let mut v = m.offset.clone();
                for &(col, neg) in &m.cols {
                    if neg {
                        v -= &y[col];
                    } else {
                        v += &y[col];
                    }
                }
                v
            })
            .collect()
    }

    /// Phase one with one artificial per row. Returns a feasible tableau with
    /// artificials removed and redundant rows dropped, or `None`.
    fn phase_one(&self) -> Option<Tableau> {
        let m = self.a.len();
        let n = self.n;
        let mut rows = Vec::with_capacity(m);
        for (i, (ai, bi)) in self.a.iter().zip(&self.b).enumerate() {
            let flip = bi.is_negative();
            let mut row = Vec::with_capacity(n + m + 1);
            for v in ai {
                row.push(if flip { -v } else { v.clone() });
            }
            for k in 0..m {
                row.push(if k == i { one() } else { zero() });
            }
            row.push(if flip { -bi } else { bi.clone() });
            rows.push(row);
        }
        let mut tab = Tableau {
            rows,
            basis: (n..n + m).collect(),
            active: vec![true; n + m],
            n: n + m,
        };
        let mut cost = vec![zero(); n + m];
        for c in cost.iter_mut().skip(n) {
            *c = one();
        }
        let mut obj = tab.reduced_costs(&cost);
        tab.simplex(&mut obj).expect("phase one objective is bounded below by zero");
        if !obj[n + m].is_zero() {
            return None;
        }

        // Drive remaining artificials out of the basis; a row with no
        // structural entry is redundant and is dropped.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n {
                match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j, None);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for row in &mut tab.rows {
            let rhs = row.pop().expect("row carries a rhs");
            row.truncate(n);
            row.push(rhs);
        }
        tab.active.truncate(n);
        tab.n = n;
        Some(tab)
    }
}

#[derive(Debug, Clone)]
struct Tableau {
    /// Each row holds `n` column entries followed by the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Columns still allowed to enter; frozen columns stay at zero.
    active: Vec<bool>,
    n: usize,
}

#[derive(Debug)]
struct Unbounded;

impl Tableau {
    /// Reduced-cost row for `cost`; the last entry is minus the objective value.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.push(zero());
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                *o -= cb * v;
            }
        }
        obj
    }

    fn pivot(&mut self, r: usize, c: usize, obj: Option<&mut Vec<Rational>>) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if let Some(obj) = obj {
            if !obj[c].is_zero() {
                let f = obj[c].clone();
                for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Rows attaining the minimum ratio for entering column `c`.
    fn min_ratio_rows(&self, c: usize) -> Vec<usize> {
        let mut best: Option<Rational> = None;
        let mut rows = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if !row[c].is_positive() {
                continue;
            }
            let ratio = &row[self.n] / &row[c];
            match &best {
                Some(b) if ratio > *b => {}
                Some(b) if ratio == *b => rows.push(i),
                _ => {
                    best = Some(ratio);
                    rows.clear();
                    rows.push(i);
                }
            }
        }
        rows
    }

    /// Minimizes with Bland's rule: smallest eligible entering index, ties in
    /// the ratio test broken by smallest basic variable index.
    fn simplex(&mut self, obj: &mut Vec<Rational>) -> std::result::Result<(), Unbounded> {
        loop {
            let Some(c) = (0..self.n).find(|&j| self.active[j] && obj[j].is_negative()) else {
                return Ok(());
            };
            let rows = self.min_ratio_rows(c);
            let Some(&r) = rows.iter().min_by_key(|&&i| self.basis[i]) else {
                return Err(Unbounded);
            };
            self.pivot(r, c, Some(obj));
        }
    }

    fn freeze_positive(&mut self, obj: &[Rational]) {
        for j in 0..self.n {
            if obj[j].is_positive() {
                self.active[j] = false;
            }
        }
    }

    fn lexmin(&mut self, maps: &[VarMap]) {
        for map in maps {
            let mut cost = vec![zero(); self.n];
            for &(col, neg) in &map.cols {
                cost[col] = if neg { -one() } else { one() };
            }
            let mut obj = self.reduced_costs(&cost);
            if self.simplex(&mut obj).is_err() {
                break;
            }
            self.freeze_positive(&obj);
        }
    }

    fn solution(&self) -> Vec<Rational> {
        let mut y = vec![zero(); self.n];
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            y[bv] = row[self.n].clone();
        }
        y
    }

    fn basis_key(&self) -> Vec<usize> {
        let mut k = self.basis.clone();
        k.sort_unstable();
        k
    }
}
