//! Dense linear programming kernel.
//!
//! A two-phase primal simplex solver over dense tableaus, returning both the
//! primal solution and the row duals. Problem sizes in this crate are tens to
//! low thousands of rows, which a dense tableau handles comfortably; there is
//! deliberately no sparse or revised simplex here.
//!
//! Determinism: the pivot rule is Dantzig's (most negative reduced cost,
//! lowest index on ties) with a permanent switch to Bland's rule once a run
//! of degenerate pivots is detected, so every solve of the same problem takes
//! the same path and cycling is impossible.
//!
//! Dual sign convention: in a `Max` problem, `<=` rows have nonnegative
//! duals; in a `Min` problem, `>=` rows have nonnegative duals. Equality rows
//! are unrestricted. At optimality the solver audits primal feasibility and
//! complementary slackness internally and reports `NumericalFailure` rather
//! than returning a silently inconsistent solution.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// One linear constraint row.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Row {
            coeffs,
            relation,
            rhs,
        }
    }
}

/// A dense linear program. Variable bounds default to `[0, +inf)`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-variable `[lo, hi]`; `f64::NEG_INFINITY` / `f64::INFINITY` allowed.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push(Row::new(coeffs, relation, rhs));
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    pub fn free_var(&mut self, var: usize) {
        self.bounds[var] = (f64::NEG_INFINITY, f64::INFINITY);
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch {
                context: "LinearProgram bounds",
                expected: n,
                actual: self.bounds.len(),
            });
        }
        for row in &self.rows {
            if row.coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "LinearProgram row",
                    expected: n,
                    actual: row.coeffs.len(),
                });
            }
            if !row.rhs.is_finite() {
                return Err(Error::NumericalFailure("row rhs is not finite".into()));
            }
        }
        for &(lo, hi) in &self.bounds {
            if lo > hi {
                return Err(Error::NumericalFailure(format!(
                    "variable bounds crossed: [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Primal/dual solution of a [`LinearProgram`].
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values in the original variable space (empty unless Optimal).
    pub x: Vec<f64>,
    /// One dual per original row (empty unless Optimal).
    pub duals: Vec<f64>,
    pub value: f64,
}

/// Solver tolerances. The defaults match the rest of the crate.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Pivot elements smaller than this are rejected.
    pub pivot_tol: f64,
    /// Degenerate-pivot streak length that triggers Bland's rule.
    pub bland_trigger: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feas_tol: 1e-8,
            opt_tol: 1e-9,
            pivot_tol: 1e-11,
            bland_trigger: 40,
        }
    }
}

/// Solve with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, &SolverOptions::default())
}

/// How an original variable maps into the standard-form tableau.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lo + x'` (column `col`).
    Shifted { col: usize, lo: f64 },
    /// `x = hi - x'` (column `col`).
    Flipped { col: usize, hi: f64 },
    /// `x = x+ - x-` (columns `pos`, `neg`).
    Split { pos: usize, neg: usize },
}

/// Solve with explicit options.
pub fn solve_lp_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.objective.len();
    let m_orig = lp.rows.len();

    // --- Transform to standard form: min c'x', A x' = b (b >= 0), x' >= 0. ---
    let mut var_map = Vec::with_capacity(n);
    let mut n_std = 0usize;
    for &(lo, hi) in &lp.bounds {
        if lo.is_finite() {
            var_map.push(VarMap::Shifted { col: n_std, lo });
            n_std += 1;
        } else if hi.is_finite() {
            var_map.push(VarMap::Flipped { col: n_std, hi });
            n_std += 1;
        } else {
            var_map.push(VarMap::Split {
                pos: n_std,
                neg: n_std + 1,
            });
            n_std += 2;
        }
    }

    struct StdRow {
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    }
    // Original rows first, then synthetic upper-bound rows (duals dropped).
    let mut std_rows = Vec::with_capacity(m_orig);
    for row in &lp.rows {
        let mut rhs = row.rhs;
        let mut coeffs = Vec::new();
        for (j, &a) in row.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match var_map[j] {
                VarMap::Shifted { col, lo } => {
                    coeffs.push((col, a));
                    rhs -= a * lo;
                }
                VarMap::Flipped { col, hi } => {
                    coeffs.push((col, -a));
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        std_rows.push(StdRow {
            coeffs,
            relation: row.relation,
            rhs,
        });
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        if lo.is_finite() && hi.is_finite() {
            if let VarMap::Shifted { col, .. } = var_map[j] {
                // hi == lo pins the shifted variable at zero via an Eq row.
                let rel = if hi > lo { Relation::Le } else { Relation::Eq };
                std_rows.push(StdRow {
                    coeffs: vec![(col, 1.0)],
                    relation: rel,
                    rhs: hi - lo,
                });
            }
        }
    }
    let m = std_rows.len();

    // Equilibration: scale rows and columns by powers of two (exact in
    // floating point) so coefficient magnitudes land near one. Revenue cuts
    // can carry coefficients around 1e6 next to unit simplex rows; without
    // scaling the dense tableau loses the duals to roundoff.
    let pow2 = |v: f64| -> f64 {
        if v > 0.0 && v.is_finite() {
            (-v.log2().round()).exp2()
        } else {
            1.0
        }
    };
    let mut row_scale = vec![1.0; m];
    for (i, r) in std_rows.iter().enumerate() {
        let mx = r
            .coeffs
            .iter()
            .map(|(_, a)| a.abs())
            .fold(0.0f64, f64::max);
        row_scale[i] = pow2(mx);
    }
    let mut col_max = vec![0.0f64; n_std];
    for (i, r) in std_rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            col_max[j] = col_max[j].max((row_scale[i] * a).abs());
        }
    }
    let col_scale: Vec<f64> = col_max.iter().map(|&v| pow2(v)).collect();

    // Objective in standard variables (Min convention).
    let obj_sign = match lp.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let mut c_struct = vec![0.0; n_std];
    let mut obj_const = 0.0;
    for (j, &cj) in lp.objective.iter().enumerate() {
        let cj = cj * obj_sign;
        if cj == 0.0 {
            continue;
        }
        match var_map[j] {
            VarMap::Shifted { col, lo } => {
                c_struct[col] += cj;
                obj_const += cj * lo;
            }
            VarMap::Flipped { col, hi } => {
                c_struct[col] -= cj;
                obj_const += cj * hi;
            }
            VarMap::Split { pos, neg } => {
                c_struct[pos] += cj;
                c_struct[neg] -= cj;
            }
        }
    }

    // Column layout: [structural | slack/surplus | one marker per row].
    // The marker block is an identity at start, so at optimality the duals
    // can be read from its reduced costs. Markers are never entering
    // candidates; those markers that start basic act as the phase-1
    // artificial variables.
    let n_slack = std_rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let n_total = n_std + n_slack + m;
    let marker0 = n_std + n_slack;

    let mut tab = Tableau::new(m, n_total, opts);
    let mut row_flip = vec![false; m];
    let mut marker_artificial = vec![false; m];

    let mut slack_idx = n_std;
    for (i, r) in std_rows.iter().enumerate() {
        let flip = r.rhs < 0.0;
        row_flip[i] = flip;
        let s = if flip { -1.0 } else { 1.0 };
        for &(col, a) in &r.coeffs {
            tab.add(i, col, s * row_scale[i] * a * col_scale[col]);
        }
        tab.set_rhs(i, s * row_scale[i] * r.rhs);
        let marker = marker0 + i;
        tab.add(i, marker, 1.0);
        let slack_basic = match r.relation {
            Relation::Le | Relation::Ge => {
                // Slack +1 for Le, -1 for Ge, times the row flip.
                let base = if r.relation == Relation::Le { 1.0 } else { -1.0 };
                let sc = s * base;
                tab.add(i, slack_idx, sc);
                let ok = sc > 0.0;
                if ok {
                    tab.basis[i] = slack_idx;
                }
                slack_idx += 1;
                ok
            }
            Relation::Eq => false,
        };
        if !slack_basic {
            tab.basis[i] = marker;
            marker_artificial[i] = true;
        }
    }
    tab.marker0 = marker0;
    tab.marker_artificial = marker_artificial;

    // Phase 1: minimize the sum of artificial markers.
    if tab.marker_artificial.iter().any(|&a| a) {
        let mut c1 = vec![0.0; n_total];
        for i in 0..m {
            if tab.marker_artificial[i] {
                c1[marker0 + i] = 1.0;
            }
        }
        tab.install_cost_row(&c1);
        if !tab.run()? {
            return Err(Error::NumericalFailure(
                "phase-1 subproblem reported unbounded".into(),
            ));
        }
        if tab.objective_value() > opts.feas_tol * tab.rhs_scale() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                duals: Vec::new(),
                value: f64::NAN,
            });
        }
        tab.pivot_out_artificials()?;
    }

    // Phase 2 (objective in column-scaled units).
    let mut c2 = vec![0.0; n_total];
    for j in 0..n_std {
        c2[j] = c_struct[j] * col_scale[j];
    }
    tab.install_cost_row(&c2);
    if !tab.run()? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            duals: Vec::new(),
            value: f64::NAN,
        });
    }

    // --- Recover primal values (undoing the column scaling). ---
    let mut x_std = vec![0.0; n_total];
    for i in 0..m {
        x_std[tab.basis[i]] = tab.rhs(i);
    }
    for (j, &s) in col_scale.iter().enumerate() {
        x_std[j] *= s;
    }
    let mut x = vec![0.0; n];
    for (j, vm) in var_map.iter().enumerate() {
        x[j] = match *vm {
            VarMap::Shifted { col, lo } => lo + x_std[col],
            VarMap::Flipped { col, hi } => hi - x_std[col],
            VarMap::Split { pos, neg } => x_std[pos] - x_std[neg],
        };
    }
    let value_std: f64 = (0..n_std).map(|j| c_struct[j] * x_std[j]).sum::<f64>() + obj_const;
    let value = obj_sign * value_std;

    // --- Recover duals from the marker-column reduced costs. ---
    // In the standard-form min problem, y_i = c_B B^-1 e_i equals minus the
    // reduced cost of marker i (marker cost is zero in phase 2). Undo the
    // row flip, then map back to the caller's sense: the reported dual is
    // d(value)/d(rhs_i), which gives Le rows of a Max problem nonnegative
    // duals.
    let mut duals = vec![0.0; m_orig];
    for (i, d) in duals.iter_mut().enumerate() {
        let mut y = -tab.cost(marker0 + i) * row_scale[i];
        if row_flip[i] {
            y = -y;
        }
        *d = obj_sign * y;
    }

    audit(lp, &x, &duals, value, opts)?;

    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        duals,
        value,
    })
}

fn audit(
    lp: &LinearProgram,
    x: &[f64],
    duals: &[f64],
    value: f64,
    opts: &SolverOptions,
) -> Result<()> {
    let scale = 1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let resid = match row.relation {
            Relation::Le => lhs - row.rhs,
            Relation::Ge => row.rhs - lhs,
            Relation::Eq => (lhs - row.rhs).abs(),
        };
        let row_scale = 1.0 + row.coeffs.iter().map(|a| a.abs()).fold(0.0, f64::max) * scale;
        if resid > 100.0 * opts.feas_tol * row_scale {
            return Err(Error::NumericalFailure(format!(
                "primal residual {resid:.3e} on row {i} exceeds tolerance"
            )));
        }
        let slack = match row.relation {
            Relation::Le => row.rhs - lhs,
            Relation::Ge => lhs - row.rhs,
            Relation::Eq => 0.0,
        };
        let cs = duals[i].abs() * slack.max(0.0);
        let cs_scale = (1.0 + duals[i].abs()) * (1.0 + slack.abs()) * scale;
        if cs > 1e-5 * cs_scale {
            return Err(Error::NumericalFailure(format!(
                "complementary slackness violated on row {i}: {cs:.3e}"
            )));
        }
    }
    let recomputed: f64 = lp.objective.iter().zip(x).map(|(c, v)| c * v).sum();
    let denom = 1.0 + value.abs().max(recomputed.abs());
    if (recomputed - value).abs() > 1e-6 * denom {
        return Err(Error::NumericalFailure(format!(
            "objective mismatch: {recomputed} vs {value}"
        )));
    }
    Ok(())
}

/// Full tableau with an embedded reduced-cost row (row index `m`).
struct Tableau {
    t: Vec<f64>,
    basis: Vec<usize>,
    m: usize,
    width: usize,
    n_total: usize,
    marker0: usize,
    marker_artificial: Vec<bool>,
    opts: SolverOptions,
    bland: bool,
    /// 1 + max |c_j| of the installed objective; reduced-cost tolerances are
    /// relative to it.
    cost_scale: f64,
}

impl Tableau {
    fn new(m: usize, n_total: usize, opts: &SolverOptions) -> Self {
        let width = n_total + 1;
        Tableau {
            t: vec![0.0; (m + 1) * width],
            basis: vec![0; m],
            m,
            width,
            n_total,
            marker0: 0,
            marker_artificial: Vec::new(),
            opts: *opts,
            bland: false,
            cost_scale: 1.0,
        }
    }

    /// 1 + max |rhs|, used to scale feasibility checks.
    fn rhs_scale(&self) -> f64 {
        1.0 + (0..self.m).map(|i| self.rhs(i).abs()).fold(0.0, f64::max)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }
    #[inline]
    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.t[i * self.width + j] += v;
    }
    #[inline]
    fn set_rhs(&mut self, i: usize, v: f64) {
        self.t[i * self.width + self.n_total] = v;
    }
    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.n_total]
    }
    /// Reduced cost of column `j` under the currently installed objective.
    #[inline]
    fn cost(&self, j: usize) -> f64 {
        self.t[self.m * self.width + j]
    }
    /// Negated objective value sits in the cost row's RHS cell.
    fn objective_value(&self) -> f64 {
        -self.t[self.m * self.width + self.n_total]
    }

    /// (Re)build the cost row `c_j - z_j` for objective `c`.
    fn install_cost_row(&mut self, c: &[f64]) {
        let base = self.m * self.width;
        self.t[base..base + self.n_total].copy_from_slice(c);
        self.t[base + self.n_total] = 0.0;
        for i in 0..self.m {
            let cb = c[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = i * self.width;
            for j in 0..self.width {
                self.t[base + j] -= cb * self.t[row + j];
            }
        }
        // Basic columns: force exact zeros.
        for &b in &self.basis {
            self.t[base + b] = 0.0;
        }
        self.cost_scale = 1.0 + c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.width;
        let pv = self.t[row * width + col];
        let inv = 1.0 / pv;
        for j in 0..width {
            self.t[row * width + j] *= inv;
        }
        self.t[row * width + col] = 1.0;
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let factor = self.t[i * width + col];
            if factor == 0.0 {
                continue;
            }
            let (head, tail) = self.t.split_at_mut(row.max(i) * width);
            let (src, dst) = if i > row {
                (&head[row * width..row * width + width], &mut tail[..width])
            } else {
                (&tail[..width], &mut head[i * width..i * width + width])
            };
            for (d, s) in dst.iter_mut().zip(src) {
                *d -= factor * s;
            }
            self.t[i * width + col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn enterable(&self, j: usize) -> bool {
        j < self.marker0
    }

    /// Run to optimality for the installed cost row. Returns `Ok(true)` at
    /// optimality, `Ok(false)` on unboundedness.
    fn run(&mut self) -> Result<bool> {
        let max_pivots = 200 * (self.m + self.n_total) + 20_000;
        let mut pivots = 0usize;
        let mut degenerate_streak = 0usize;
        let mut tiny_pivot_strikes = 0usize;
        let enter_thr = -self.opts.opt_tol * self.cost_scale;
        loop {
            // Entering column.
            let mut enter: Option<usize> = None;
            if self.bland {
                for j in 0..self.n_total {
                    if self.cost(j) < enter_thr && self.enterable(j) {
                        enter = Some(j);
                        break;
                    }
                }
            } else {
                let mut best = enter_thr;
                for j in 0..self.n_total {
                    let r = self.cost(j);
                    if r < best && self.enterable(j) {
                        best = r;
                        enter = Some(j);
                    }
                }
            }
            let Some(col) = enter else {
                return Ok(true);
            };

            // Ratio test. The tableau is equilibrated, so elements well
            // below one are noise; pivoting on them amplifies error by
            // their reciprocal. Two passes: find the minimum ratio among
            // eligible elements, then pivot on the largest element within a
            // small window of that ratio. Under Bland's rule the leaving
            // choice reverts to lowest basis index, which the anti-cycling
            // argument needs.
            let elig = self.opts.pivot_tol.max(1e-9);
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, col);
                if a > elig {
                    let ratio = self.rhs(i) / a;
                    if ratio < best_ratio {
                        best_ratio = ratio;
                    }
                }
            }
            if best_ratio.is_infinite() {
                return Ok(false);
            }
            let window = 1e-9 * (1.0 + best_ratio.abs());
            let mut leave: Option<usize> = None;
            let mut best_piv = 0.0;
            for i in 0..self.m {
                let a = self.at(i, col);
                if a > elig && self.rhs(i) / a <= best_ratio + window {
                    let better = if self.bland {
                        leave.is_none_or(|l| self.basis[i] < self.basis[l])
                    } else {
                        a > best_piv
                            || (a == best_piv
                                && leave.is_some_and(|l| self.basis[i] < self.basis[l]))
                    };
                    if better {
                        best_piv = a;
                        leave = Some(i);
                    }
                }
            }
            let row = leave.expect("eligible pivot row exists at finite ratio");

            let pv = self.at(row, col).abs();
            if pv < elig * 10.0 {
                tiny_pivot_strikes += 1;
                if tiny_pivot_strikes > 5 {
                    return Err(Error::NumericalFailure(format!(
                        "pivot magnitude {pv:.3e} below tolerance repeatedly"
                    )));
                }
            } else {
                tiny_pivot_strikes = 0;
            }

            if best_ratio.abs() <= 1e-12 {
                degenerate_streak += 1;
                if degenerate_streak >= self.opts.bland_trigger {
                    self.bland = true;
                }
            } else {
                degenerate_streak = 0;
            }

            self.pivot(row, col);
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::NumericalFailure(format!(
                    "simplex did not terminate within {max_pivots} pivots"
                )));
            }
        }
    }

    /// After phase 1, drive basic artificial markers out of the basis where
    /// possible. Rows that admit no pivot are redundant; their marker stays
    /// basic at level zero and can never be disturbed because markers are
    /// not entering candidates.
    fn pivot_out_artificials(&mut self) -> Result<()> {
        for i in 0..self.m {
            let b = self.basis[i];
            if b >= self.marker0 && self.marker_artificial[b - self.marker0] {
                if self.rhs(i).abs() > self.opts.feas_tol {
                    return Err(Error::NumericalFailure(
                        "artificial variable basic at nonzero level after phase 1".into(),
                    ));
                }
                for j in 0..self.marker0 {
                    if self.at(i, j).abs() > self.opts.pivot_tol * 100.0 {
                        self.pivot(i, j);
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Solution of a finite zero-sum matrix game.
#[derive(Debug, Clone)]
pub struct ZeroSumSolution {
    pub value: f64,
    /// Maximizing mixture over rows.
    pub row_mixture: Vec<f64>,
    /// Minimizing mixture over columns (from the row LP's duals).
    pub col_mixture: Vec<f64>,
}

/// Value and optimal mixtures of the zero-sum game `max_rows min_cols` on a
/// payoff matrix, via the epigraph LP. The column player's mixture comes out
/// of the payoff-row duals.
pub fn solve_zero_sum_game(payoff: &[Vec<f64>]) -> Result<ZeroSumSolution> {
    if payoff.is_empty() || payoff[0].is_empty() {
        return Err(Error::EmptyInput("zero-sum payoff matrix"));
    }
    let rows = payoff.len();
    let cols = payoff[0].len();
    if payoff.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            context: "zero-sum payoff matrix",
            expected: cols,
            actual: payoff.iter().map(|r| r.len()).find(|&l| l != cols).unwrap_or(cols),
        });
    }
    // Variables (t, pi_1..pi_rows): max t s.t. t <= sum_i pi_i payoff[i][j].
    let mut obj = vec![0.0; rows + 1];
    obj[0] = 1.0;
    let mut lp = LinearProgram::new(Sense::Max, obj);
    lp.free_var(0);
    for j in 0..cols {
        let mut coeffs = vec![0.0; rows + 1];
        coeffs[0] = 1.0;
        for (i, row) in payoff.iter().enumerate() {
            coeffs[i + 1] = -row[j];
        }
        lp.push_row(coeffs, Relation::Le, 0.0);
    }
    let mut simplex_row = vec![1.0; rows + 1];
    simplex_row[0] = 0.0;
    lp.push_row(simplex_row, Relation::Eq, 1.0);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure(format!(
            "zero-sum game LP ended {:?}",
            sol.status
        )));
    }
    let row_mixture = sol.x[1..].to_vec();
    let col_mixture = sol.duals[..cols].to_vec();
    Ok(ZeroSumSolution {
        value: sol.value,
        row_mixture,
        col_mixture,
    })
}
