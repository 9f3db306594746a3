//! Deterministic dense linear programming for small problems.
//!
//! A two-phase tableau simplex with Bland's rule: deterministic (same input,
//! bitwise-same output), anti-cycling, and certificate-producing. Sized for the
//! problems in this crate (tens of rows or tens of columns; the CHSH inner LPs
//! are solved in a 9-row dual orientation with a few thousand columns).

use crate::{Error, Result, TAU_GAP};

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// A single linear constraint `coeffs · x REL rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A dense linear program. Variables are free unless marked nonnegative.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub nonneg: Vec<bool>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            constraints: Vec::new(),
            nonneg: vec![false; n],
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    /// Mark every variable as nonnegative.
    pub fn with_all_nonneg(mut self) -> Self {
        self.nonneg.iter_mut().for_each(|b| *b = true);
        self
    }

    pub fn variable_count(&self) -> usize {
        self.objective.len()
    }

    pub fn push_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    fn validate(&self) -> Result<()> {
        let n = self.variable_count();
        if self.nonneg.len() != n {
            return Err(Error::Domain(format!(
                "nonneg mask has length {}, expected {n}",
                self.nonneg.len()
            )));
        }
        if !self.objective.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("non-finite objective coefficient".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Domain(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.coeffs.iter().all(|v| v.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::Domain(format!("non-finite data in constraint {i}")));
            }
        }
        Ok(())
    }
}

/// Solver verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution with certificates.
///
/// For `Optimal`, `primal` attains `value`, `dual` contains one multiplier per
/// constraint with `value = Σ dual[i] · rhs[i]` up to `duality_gap`. For
/// `Unbounded`, `certificate` is an improving primal ray; for `Infeasible`, it
/// is a Farkas combination of the constraints.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub duality_gap: f64,
    pub certificate: Option<Vec<f64>>,
}

const EPS_OPT: f64 = 1e-9;
const EPS_PIV: f64 = 1e-9;
const EPS_PHASE1: f64 = 1e-7;

struct Tableau {
    rows: usize,
    cols: usize, // structural + slack + artificial columns, excluding rhs
    /// (rows + 1) x (cols + 1) matrix; last row = reduced costs, last col = rhs.
    a: Vec<f64>,
    basis: Vec<usize>,
    artificial_start: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.a[r * (self.cols + 1) + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let piv = self.at(pr, pc);
        let inv = 1.0 / piv;
        for c in 0..w {
            self.a[pr * w + c] *= inv;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    self.a[r * w + c] -= f * self.a[pr * w + c];
                }
                self.a[r * w + pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Recompute the reduced-cost row for costs `cost` from the current basis.
    fn install_costs(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        for c in 0..w {
            self.a[self.rows * w + c] = if c < self.cols { cost[c] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.a[self.rows * w + c] -= cb * self.a[r * w + c];
                }
            }
        }
    }

    /// Objective value of the current basis under the installed cost row.
    fn objective(&self) -> f64 {
        -self.at(self.rows, self.cols)
    }

    /// Run Bland-rule simplex on the installed cost row. Columns at or past
    /// `ban_from` may not enter. With `evict_artificials` (phase 2), rows whose
    /// basic variable is a zero-valued artificial take pivot priority so no
    /// artificial can ever rise above zero. Returns `Ok(None)` at optimality or
    /// `Ok(Some(entering))` when the problem is unbounded in column `entering`.
    fn run(
        &mut self,
        cost: &[f64],
        ban_from: usize,
        evict_artificials: bool,
        iteration_cap: usize,
    ) -> Result<Option<usize>> {
        self.install_costs(cost);
        // Pricing: Dantzig (most negative reduced cost) for speed, switching
        // permanently to Bland's rule once the objective stalls; the eventual
        // Bland phase guarantees termination, and both rules break ties by
        // smallest index, so the path is deterministic.
        let mut bland = false;
        let mut stall = 0usize;
        let mut last_obj = f64::INFINITY;
        for iter in 0..iteration_cap {
            // The incrementally updated cost row accumulates rounding error;
            // refresh it periodically so drift cannot fabricate entering
            // columns (or hide optimality).
            if iter > 0 && iter % 256 == 0 {
                self.install_costs(cost);
            }
            let obj = self.objective();
            if obj < last_obj - 1e-12 {
                last_obj = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall > 64 {
                    bland = true;
                }
            }
            let mut entering = None;
            if bland {
                for c in 0..ban_from {
                    if self.at(self.rows, c) < -EPS_OPT {
                        entering = Some(c);
                        break;
                    }
                }
            } else {
                let mut best = -EPS_OPT;
                for c in 0..ban_from {
                    let r = self.at(self.rows, c);
                    if r < best {
                        best = r;
                        entering = Some(c);
                    }
                }
            }
            let Some(pc) = entering else {
                return Ok(None);
            };

            // Degenerate artificial rows leave first (keeps them at zero).
            let mut pr = None;
            for r in 0..self.rows {
                if evict_artificials
                    && self.basis[r] >= self.artificial_start
                    && self.at(r, self.cols).abs() <= EPS_PIV
                    && self.at(r, pc).abs() > EPS_PIV
                {
                    pr = Some(r);
                    break;
                }
            }
            if pr.is_none() {
                // Ratio test at the standard pivot threshold; if every
                // positive entry is below it, retry with a looser threshold
                // before concluding unboundedness (tiny positive pivots occur
                // in degenerate bases and must not be mistaken for a ray).
                for threshold in [EPS_PIV, 1e-13] {
                    let mut best: Option<(f64, usize, usize)> = None; // (ratio, basis var, row)
                    for r in 0..self.rows {
                        let a = self.at(r, pc);
                        if a > threshold {
                            let ratio = self.at(r, self.cols) / a;
                            let key = (ratio, self.basis[r]);
                            match best {
                                Some((br, bv, _)) if (br, bv) <= key => {}
                                _ => best = Some((ratio, self.basis[r], r)),
                            }
                        }
                    }
                    pr = best.map(|(_, _, r)| r);
                    if pr.is_some() {
                        break;
                    }
                }
            }
            match pr {
                Some(r) => self.pivot(r, pc),
                None => {
                    // Before declaring a ray, recompute the reduced cost of
                    // the entering column exactly; a stale slightly-negative
                    // value plus an all-nonpositive column would otherwise be
                    // mistaken for unboundedness.
                    self.install_costs(cost);
                    if self.at(self.rows, pc) < -EPS_OPT {
                        return Ok(Some(pc));
                    }
                }
            }
        }
        Err(Error::Solver(format!(
            "simplex iteration cap {iteration_cap} exceeded ({} rows, {} cols)",
            self.rows, self.cols
        )))
    }
}

/// Solve a linear program deterministically, with certificates.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.variable_count();
    let m = lp.constraints.len();
    let flip = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };

    // Column layout: structural (split free variables), then one slack per
    // inequality, then one artificial per row lacking an identity column.
    let mut col_var: Vec<(usize, f64)> = Vec::new();
    let mut var_cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    for j in 0..n {
        let plus = col_var.len();
        col_var.push((j, 1.0));
        if lp.nonneg[j] {
            var_cols.push((plus, None));
        } else {
            col_var.push((j, -1.0));
            var_cols.push((plus, Some(plus + 1)));
        }
    }
    let nstruct = col_var.len();

    // Normalize rows to nonnegative rhs, tracking the sign flip per row.
    let mut row_sign = vec![1.0f64; m];
    let mut relations = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut rel = c.relation;
        if c.rhs < 0.0 {
            row_sign[i] = -1.0;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
                Relation::Ge => Relation::Le,
            };
        }
        relations.push(rel);
    }
    let nslack = relations
        .iter()
        .filter(|r| !matches!(r, Relation::Eq))
        .count();
    let nart = relations
        .iter()
        .filter(|r| !matches!(r, Relation::Le))
        .count();
    let cols = nstruct + nslack + nart;
    let artificial_start = nstruct + nslack;

    let mut tab = Tableau {
        rows: m,
        cols,
        a: vec![0.0; (m + 1) * (cols + 1)],
        basis: vec![0; m],
        artificial_start,
    };

    // `dual_col[i]`: the initial identity column of row i, whose reduced cost
    // exposes the dual multiplier y_i.
    let mut dual_col = vec![0usize; m];
    let mut next_slack = nstruct;
    let mut next_art = artificial_start;
    for i in 0..m {
        let c = &lp.constraints[i];
        let s = row_sign[i];
        for (col, &(j, sign)) in col_var.iter().enumerate() {
            *tab.at_mut(i, col) = s * c.coeffs[j] * sign;
        }
        *tab.at_mut(i, cols) = s * c.rhs;
        match relations[i] {
            Relation::Le => {
                *tab.at_mut(i, next_slack) = 1.0;
                tab.basis[i] = next_slack;
                dual_col[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                *tab.at_mut(i, next_slack) = -1.0;
                next_slack += 1;
                *tab.at_mut(i, next_art) = 1.0;
                tab.basis[i] = next_art;
                dual_col[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                *tab.at_mut(i, next_art) = 1.0;
                tab.basis[i] = next_art;
                dual_col[i] = next_art;
                next_art += 1;
            }
        }
    }

    let iteration_cap = 20_000 + 50 * (m + cols);

    // Phase 1: minimize the artificial sum.
    if nart > 0 {
        let mut cost1 = vec![0.0; cols];
        for c in artificial_start..cols {
            cost1[c] = 1.0;
        }
        // Artificials may not re-enter: dropping a nonbasic artificial keeps
        // every genuinely feasible point available, so the restricted phase-1
        // minimum is still zero exactly when the program is feasible.
        let unbounded = tab.run(&cost1, artificial_start, false, iteration_cap)?;
        if unbounded.is_some() {
            return Err(Error::Solver(
                "phase 1 reported unbounded; numerical breakdown".into(),
            ));
        }
        if tab.objective() > EPS_PHASE1 {
            // Farkas certificate: y with yᵀA ≤ 0 (on structural columns) and
            // yᵀb > 0, mapped back to the original row orientation.
            let mut farkas = vec![0.0; m];
            for i in 0..m {
                let y = cost1[dual_col[i]] - tab.at(m, dual_col[i]);
                farkas[i] = y * row_sign[i];
            }
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                primal: vec![],
                dual: vec![],
                duality_gap: f64::NAN,
                certificate: Some(farkas),
            });
        }
    }

    // Phase 2: minimize the (sign-normalized) objective; artificials banned.
    let mut cost2 = vec![0.0; cols];
    for (col, &(j, sign)) in col_var.iter().enumerate() {
        cost2[col] = flip * lp.objective[j] * sign;
    }
    let unbounded = tab.run(&cost2, artificial_start, true, iteration_cap)?;

    let extract_primal = |tab: &Tableau| -> Vec<f64> {
        let mut xstd = vec![0.0; cols];
        for r in 0..m {
            xstd[tab.basis[r]] = tab.at(r, cols);
        }
        var_cols
            .iter()
            .map(|&(p, q)| xstd[p] - q.map_or(0.0, |q| xstd[q]))
            .collect()
    };

    if let Some(pc) = unbounded {
        // Improving ray: entering column with its basic adjustments.
        let mut dstd = vec![0.0; cols];
        dstd[pc] = 1.0;
        for r in 0..m {
            dstd[tab.basis[r]] = -tab.at(r, pc);
        }
        let ray: Vec<f64> = var_cols
            .iter()
            .map(|&(p, q)| dstd[p] - q.map_or(0.0, |q| dstd[q]))
            .collect();
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: if lp.sense == Sense::Maximize {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            primal: extract_primal(&tab),
            dual: vec![],
            duality_gap: f64::NAN,
            certificate: Some(ray),
        });
    }

    let primal = extract_primal(&tab);
    let value = flip * tab.objective();
    let mut dual = vec![0.0; m];
    for i in 0..m {
        let y = cost2[dual_col[i]] - tab.at(m, dual_col[i]);
        dual[i] = flip * y * row_sign[i];
    }
    let dual_value: f64 = (0..m).map(|i| dual[i] * lp.constraints[i].rhs).sum();
    let duality_gap = (value - dual_value).abs();
    if duality_gap > TAU_GAP {
        return Err(Error::Solver(format!(
            "duality gap {duality_gap:.3e} exceeds tolerance at reported optimum"
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        primal,
        dual,
        duality_gap,
        certificate: None,
    })
}

/// Maximum of `objective · x` over the convex hull of `vertices`.
///
/// Encoded as an LP over hull weights; returns the value and the optimal
/// weights. Used for polytope-encoded maximizations (local polytope, minimal
/// tensor product).
pub fn hull_maximize(vertices: &[Vec<f64>], objective: &[f64]) -> Result<(f64, Vec<f64>)> {
    if vertices.is_empty() {
        return Err(Error::Domain("empty vertex list".into()));
    }
    let scores: Vec<f64> = vertices
        .iter()
        .map(|v| {
            if v.len() != objective.len() {
                return f64::NAN;
            }
            v.iter().zip(objective).map(|(a, b)| a * b).sum()
        })
        .collect();
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Domain(
            "vertex/objective dimension mismatch or non-finite data".into(),
        ));
    }
    let mut lp = LinearProgram::maximize(scores).with_all_nonneg();
    lp.push_constraint(vec![1.0; vertices.len()], Relation::Eq, 1.0);
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver("hull maximization did not solve".into()));
    }
    Ok((sol.value, sol.primal))
}

/// Test whether `point` lies in the convex hull of `vertices`.
///
/// Feasibility LP over hull weights; returns membership and the phase-1 style
/// infeasibility measure is hidden behind the boolean (tolerance `TAU_FEAS`
/// scaled through the solver's phase-1 threshold).
pub fn hull_membership(vertices: &[Vec<f64>], point: &[f64]) -> Result<bool> {
    if vertices.is_empty() {
        return Err(Error::Domain("empty vertex list".into()));
    }
    let dim = point.len();
    if vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::Domain("vertex dimension mismatch".into()));
    }
    let k = vertices.len();
    let mut lp = LinearProgram::minimize(vec![0.0; k]).with_all_nonneg();
    lp.push_constraint(vec![1.0; k], Relation::Eq, 1.0);
    for d in 0..dim {
        let row: Vec<f64> = vertices.iter().map(|v| v[d]).collect();
        lp.push_constraint(row, Relation::Eq, point[d]);
    }
    let sol = solve(&lp)?;
    Ok(sol.status == LpStatus::Optimal)
}

/// Residuals of a claimed optimal solution against its program: maximum primal
/// constraint violation. Exposed for certificate-soundness tests.
pub fn primal_residual(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        let viol = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Ge => c.rhs - lhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    for (j, &nn) in lp.nonneg.iter().enumerate() {
        if nn {
            worst = worst.max(-x[j]);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounded_var(lp: &mut LinearProgram, j: usize, lo: f64, hi: f64) {
        let n = lp.variable_count();
        let mut row = vec![0.0; n];
        row[j] = 1.0;
        lp.push_constraint(row.clone(), Relation::Ge, lo);
        lp.push_constraint(row, Relation::Le, hi);
    }

    #[test]
    fn unit_interval_maximum() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        bounded_var(&mut lp, 0, 0.0, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert!((sol.primal[0] - 1.0).abs() < 1e-12);
        assert!(sol.duality_gap <= TAU_GAP);
    }

    #[test]
    fn box_maximum() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        bounded_var(&mut lp, 0, 0.0, 1.0);
        bounded_var(&mut lp, 1, 0.0, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 2.0).abs() < 1e-12);
        assert!((sol.primal[0] - 1.0).abs() < 1e-12);
        assert!((sol.primal[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_free_variables() {
        // max x - y s.t. x + y = 1, x - 2y <= 4 (free vars).
        let mut lp = LinearProgram::maximize(vec![1.0, -1.0]);
        lp.push_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.push_constraint(vec![1.0, -2.0], Relation::Le, 4.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // optimum at x = 2, y = -1: value 3.
        assert!((sol.value - 3.0).abs() < 1e-9, "value {}", sol.value);
        assert!(sol.duality_gap <= TAU_GAP);
    }

    #[test]
    fn detects_infeasible_with_certificate() {
        let mut lp = LinearProgram::maximize(vec![0.0]);
        bounded_var(&mut lp, 0, 1.0, 0.0); // x >= 1 and x <= 0
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let y = sol.certificate.unwrap();
        // Farkas in original row orientation: y ≥ 0 on ≥-rows, y ≤ 0 on
        // ≤-rows, Σ y_i a_i = 0 on the free variable, Σ y_i b_i > 0.
        assert!(y[0] >= -1e-12 && y[1] <= 1e-12, "signs {y:?}");
        let combo = y[0] * 1.0 + y[1] * 1.0; // both rows have coefficient +1
        let rhs = y[0] * 1.0 + y[1] * 0.0;
        assert!(combo.abs() < 1e-9 && rhs > 1e-9, "combo {combo} rhs {rhs}");
    }

    #[test]
    fn detects_unbounded_with_ray() {
        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.push_constraint(vec![0.0, 1.0], Relation::Le, 1.0);
        lp.push_constraint(vec![1.0, 0.0], Relation::Ge, 0.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        let ray = sol.certificate.unwrap();
        assert!(ray[0] > 1e-9, "ray should improve the objective: {ray:?}");
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Klee-Minty-flavored degenerate LP; Bland's rule must terminate.
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0, 1.0]).with_all_nonneg();
        lp.push_constraint(vec![1.0, 0.0, 0.0], Relation::Le, 0.0);
        lp.push_constraint(vec![1.0, 1.0, 0.0], Relation::Le, 0.0);
        lp.push_constraint(vec![1.0, 1.0, 1.0], Relation::Le, 1.0);
        lp.push_constraint(vec![0.0, 1.0, 1.0], Relation::Le, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn determinism_bitwise() {
        let mut lp = LinearProgram::maximize(vec![0.3, -0.7, 0.1]);
        for j in 0..3 {
            bounded_var(&mut lp, j, -1.0, 2.0);
        }
        lp.push_constraint(vec![1.0, 1.0, 1.0], Relation::Le, 1.5);
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        for (x, y) in a.primal.iter().zip(&b.primal) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (x, y) in a.dual.iter().zip(&b.dual) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    /// The CHSH score over the 16-vertex local deterministic polytope is 3/4.
    #[test]
    fn chsh_local_polytope_value() {
        // Distribution coordinates: P(a,b|x,y) indexed by (x,y,a,b).
        let idx = |x: usize, y: usize, a: usize, b: usize| ((x * 2 + y) * 2 + a) * 2 + b;
        let mut vertices = Vec::new();
        for bits in 0..16u32 {
            // deterministic a = f(x), b = g(y), each of the 4x4 function pairs
            let f = [(bits & 1) as usize, ((bits >> 1) & 1) as usize];
            let g = [((bits >> 2) & 1) as usize, ((bits >> 3) & 1) as usize];
            let mut v = vec![0.0; 16];
            for x in 0..2 {
                for y in 0..2 {
                    v[idx(x, y, f[x], g[y])] = 1.0;
                }
            }
            vertices.push(v);
        }
        let mut objective = vec![0.0; 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        if (a ^ b) == x * y {
                            objective[idx(x, y, a, b)] = 0.25;
                        }
                    }
                }
            }
        }
        let (value, _) = hull_maximize(&vertices, &objective).unwrap();
        assert!((value - 0.75).abs() < 1e-10, "value {value}");
        // Oracle: direct enumeration over the vertices.
        let oracle = vertices
            .iter()
            .map(|v| v.iter().zip(&objective).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::MIN, f64::max);
        assert!((value - oracle).abs() < 1e-10);
    }

    #[test]
    fn hull_membership_examples() {
        let square = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ];
        assert!(hull_membership(&square, &[0.5, 0.5]).unwrap());
        assert!(hull_membership(&square, &[1.0, 1.0]).unwrap());
        assert!(!hull_membership(&square, &[1.2, 0.5]).unwrap());
        assert!(!hull_membership(&square, &[-0.01, 0.5]).unwrap());
    }

    #[test]
    fn rejects_malformed_program() {
        let mut lp = LinearProgram::maximize(vec![1.0, 2.0]);
        lp.push_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve(&lp), Err(Error::Domain(_))));
        let mut lp2 = LinearProgram::maximize(vec![f64::NAN]);
        bounded_var(&mut lp2, 0, 0.0, 1.0);
        assert!(matches!(solve(&lp2), Err(Error::Domain(_))));
    }
}
