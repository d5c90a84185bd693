//! Dense bounded-variable primal simplex.
//!
//! Solves `maximize c·x  s.t.  A·x = b,  l ≤ x ≤ u` where any bound may be
//! infinite. Problems here are tiny (a few dozen variables), so the solver
//! keeps a full dense tableau and favours determinism over speed: pricing is
//! Dantzig's rule with lowest-index tie-breaking, switching to Bland's rule
//! after a run of degenerate pivots.
//!
//! Every optimal answer is re-derived from the original data and checked
//! against the residual and bound tolerances before it is returned.

use crate::error::{Error, Result};

/// Tolerance on `A·x − b` and on bound violations of returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Reduced-cost threshold below which a variable is not considered improving.
pub const OPTIMALITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// A program over `num_vars` variables with zero objective, no equality
    /// rows and every variable in `[0, +∞)`.
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn from_parts(
        objective: Vec<f64>,
        rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let lp = Self {
            objective,
            rows,
            rhs,
            lower,
            upper,
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) -> &mut Self {
        self.objective[var] = coeff;
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    /// Appends the row `Σ coeffs[k].1 · x[coeffs[k].0] = rhs`.
    pub fn add_equality(&mut self, coeffs: &[(usize, f64)], rhs: f64) -> &mut Self {
        let mut row = vec![0.0; self.num_vars()];
        for &(var, c) in coeffs {
            row[var] += c;
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        self
    }

    /// Same program with every objective coefficient multiplied by `factor`.
    pub fn scaled_objective(&self, factor: f64) -> Self {
        let mut lp = self.clone();
        lp.objective.iter_mut().for_each(|c| *c *= factor);
        lp
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::param(format!(
                "bounds have lengths {}/{} but there are {n} variables",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.rows.len() != self.rhs.len() {
            return Err(Error::param(format!(
                "{} constraint rows but {} right-hand sides",
                self.rows.len(),
                self.rhs.len()
            )));
        }
        if let Some((i, row)) = self.rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::param(format!(
                "row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return Err(Error::param(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        let finite = self
            .objective
            .iter()
            .chain(self.rhs.iter())
            .chain(self.rows.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("non-finite coefficient in objective, rows or rhs"));
        }
        Ok(())
    }

    /// Largest violation of `A·x = b`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| (dot(row, x) - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of the variable bounds.
    pub fn bound_violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal values; empty unless `status` is `Optimal`.
    pub values: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn without_values(status: LpStatus) -> Self {
        let objective_value = match status {
            LpStatus::Unbounded => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        };
        Self {
            status,
            values: Vec::new(),
            objective_value,
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let mut tableau = Tableau::new(lp);

    // Phase 1: maximize −Σ artificials.
    let phase1: Vec<f64> = (0..tableau.num_cols)
        .map(|j| if j >= tableau.n { -1.0 } else { 0.0 })
        .collect();
    match tableau.run(&phase1)? {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded => return Err(Error::internal("phase 1 reported unbounded")),
    }
    let infeasibility: f64 = tableau.x[tableau.n..].iter().sum();
    let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    if infeasibility > FEASIBILITY_TOL * scale {
        return Ok(LpSolution::without_values(LpStatus::Infeasible));
    }
    tableau.retire_artificials();

    // Phase 2.
    let mut phase2 = lp.objective.clone();
    phase2.resize(tableau.num_cols, 0.0);
    if tableau.run(&phase2)? == PhaseOutcome::Unbounded {
        return Ok(LpSolution::without_values(LpStatus::Unbounded));
    }

    let mut values = tableau.x[..tableau.n].to_vec();
    tableau.refine_basic_values(lp, &mut values);
    for (j, v) in values.iter_mut().enumerate() {
        // snap values within tolerance onto the bound they sit on
        if (*v - lp.lower[j]).abs() <= 1e-12 {
            *v = lp.lower[j];
        } else if (*v - lp.upper[j]).abs() <= 1e-12 {
            *v = lp.upper[j];
        }
    }

    let residual = lp.residual(&values);
    let violation = lp.bound_violation(&values);
    if residual > FEASIBILITY_TOL || violation > FEASIBILITY_TOL {
        return Err(Error::internal(format!(
            "simplex solution fails certification: residual {residual:e}, bound violation {violation:e}"
        )));
    }
    let objective_value = dot(&lp.objective, &values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NonBasic {
    AtLower,
    AtUpper,
    /// Free variable parked at zero.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    NonBasic(NonBasic),
}

#[derive(Debug, PartialEq, Eq)]
enum PhaseOutcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    /// Structural variable count; columns `n..n+m` are artificials.
    n: usize,
    num_cols: usize,
    /// `B⁻¹·A` over all columns, one `Vec` per row.
    t: Vec<Vec<f64>>,
    basic: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    max_iterations: usize,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let num_cols = n + m;

        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.resize(num_cols, 0.0);
        upper.resize(num_cols, f64::INFINITY);

        let mut x = vec![0.0; num_cols];
        let mut state = vec![VarState::NonBasic(NonBasic::AtLower); num_cols];
        for j in 0..n {
            let (lo, hi) = (lower[j], upper[j]);
            let (value, position) = if lo.is_finite() {
                (lo, NonBasic::AtLower)
            } else if hi.is_finite() {
                (hi, NonBasic::AtUpper)
            } else {
                (0.0, NonBasic::Free)
            };
            x[j] = value;
            state[j] = VarState::NonBasic(position);
        }

        let mut t = Vec::with_capacity(m);
        let mut basic = Vec::with_capacity(m);
        for (i, (row, &b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let residual = b - dot(row, &x[..n]);
            let sign = if residual >= 0.0 { 1.0 } else { -1.0 };
            let mut tr: Vec<f64> = row.iter().map(|a| sign * a).collect();
            tr.resize(num_cols, 0.0);
            tr[n + i] = 1.0;
            t.push(tr);
            basic.push(n + i);
            state[n + i] = VarState::Basic(i);
            x[n + i] = residual.abs();
        }

        Self {
            n,
            num_cols,
            t,
            basic,
            state,
            x,
            lower,
            upper,
            max_iterations: 1000 + 50 * num_cols,
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (row, &b) in self.t.iter().zip(&self.basic) {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Direction (+1 increase / −1 decrease) in which nonbasic `j` may move
    /// profitably, if any.
    fn improving_direction(&self, j: usize, dj: f64) -> Option<f64> {
        let VarState::NonBasic(position) = self.state[j] else {
            return None;
        };
        if self.lower[j] == self.upper[j] {
            return None;
        }
        match position {
            NonBasic::AtLower if dj > OPTIMALITY_TOL => Some(1.0),
            NonBasic::AtUpper if dj < -OPTIMALITY_TOL => Some(-1.0),
            NonBasic::Free if dj > OPTIMALITY_TOL => Some(1.0),
            NonBasic::Free if dj < -OPTIMALITY_TOL => Some(-1.0),
            _ => None,
        }
    }

    fn choose_entering(&self, d: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for (j, &dj) in d.iter().enumerate() {
            let Some(dir) = self.improving_direction(j, dj) else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            // strict comparison keeps the lowest index on ties
            if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn run(&mut self, cost: &[f64]) -> Result<PhaseOutcome> {
        let mut degenerate_run = 0;
        for _ in 0..self.max_iterations {
            let d = self.reduced_costs(cost);
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let Some((entering, dir)) = self.choose_entering(&d, bland) else {
                return Ok(PhaseOutcome::Optimal);
            };
            let Some(step) = self.ratio_test(entering, dir, bland) else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if step.theta <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.apply(entering, dir, step);
        }
        Err(Error::internal(format!(
            "simplex did not converge within {} iterations",
            self.max_iterations
        )))
    }

    fn ratio_test(&self, entering: usize, dir: f64, bland: bool) -> Option<Step> {
        let mut theta = self.upper[entering] - self.lower[entering];
        let mut leave: Option<(usize, bool)> = None; // (row, hits_upper)
        let mut leave_alpha = 0.0;

        for (i, row) in self.t.iter().enumerate() {
            let alpha = dir * row[entering];
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basic[i];
            let (limit, hits_upper) = if alpha > 0.0 {
                // basic variable decreases toward its lower bound
                if !self.lower[b].is_finite() {
                    continue;
                }
                (((self.x[b] - self.lower[b]) / alpha).max(0.0), false)
            } else {
                if !self.upper[b].is_finite() {
                    continue;
                }
                (((self.upper[b] - self.x[b]) / -alpha).max(0.0), true)
            };

            let replace = match leave {
                _ if limit < theta - 1e-12 => true,
                None => false,
                Some((cur, _)) if limit <= theta + 1e-12 => {
                    if bland {
                        b < self.basic[cur]
                    } else {
                        alpha.abs() > leave_alpha * (1.0 + 1e-9)
                            || (alpha.abs() >= leave_alpha * (1.0 - 1e-9) && b < self.basic[cur])
                    }
                }
                Some(_) => false,
            };
            if replace {
                theta = limit.min(theta);
                leave = Some((i, hits_upper));
                leave_alpha = alpha.abs();
            }
        }

        if !theta.is_finite() {
            return None;
        }
        Some(Step { theta, leave })
    }

    fn apply(&mut self, entering: usize, dir: f64, step: Step) {
        let Step { theta, leave } = step;
        self.x[entering] += dir * theta;
        for (row, &b) in self.t.iter().zip(&self.basic) {
            self.x[b] -= dir * row[entering] * theta;
        }

        match leave {
            None => {
                // bound flip
                let (value, position) = if dir > 0.0 {
                    (self.upper[entering], NonBasic::AtUpper)
                } else {
                    (self.lower[entering], NonBasic::AtLower)
                };
                self.x[entering] = value;
                self.state[entering] = VarState::NonBasic(position);
            }
            Some((r, hits_upper)) => {
                let leaving = self.basic[r];
                let (value, position) = if hits_upper {
                    (self.upper[leaving], NonBasic::AtUpper)
                } else {
                    (self.lower[leaving], NonBasic::AtLower)
                };
                self.x[leaving] = value;
                self.state[leaving] = VarState::NonBasic(position);
                self.pivot(r, entering);
            }
        }
    }

    fn pivot(&mut self, r: usize, entering: usize) {
        let p = self.t[r][entering];
        for a in self.t[r].iter_mut() {
            *a /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[entering];
            if f != 0.0 {
                for (a, pr) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * pr;
                }
                row[entering] = 0.0;
            }
        }
        self.basic[r] = entering;
        self.state[entering] = VarState::Basic(r);
    }

    /// Pivots zero-valued artificials out of the basis where possible and pins
    /// every artificial to zero for phase 2.
    fn retire_artificials(&mut self) {
        for r in 0..self.basic.len() {
            let b = self.basic[r];
            if b < self.n {
                continue;
            }
            let candidate = (0..self.n).find(|&j| {
                matches!(self.state[j], VarState::NonBasic(_)) && self.t[r][j].abs() > 1e-7
            });
            if let Some(j) = candidate {
                self.x[b] = 0.0;
                self.state[b] = VarState::NonBasic(NonBasic::AtLower);
                self.pivot(r, j);
            }
            // otherwise the row is redundant; the artificial stays basic at zero
        }
        for j in self.n..self.num_cols {
            self.upper[j] = 0.0;
            if !matches!(self.state[j], VarState::Basic(_)) {
                self.x[j] = 0.0;
            }
        }
    }

    /// Recomputes basic structural values by solving `B·x_B = b − N·x_N`
    /// against the original rows, removing drift accumulated by pivoting.
    fn refine_basic_values(&self, lp: &LinearProgram, values: &mut [f64]) {
        let basic_structural: Vec<usize> = self.basic.iter().copied().filter(|&b| b < self.n).collect();
        if basic_structural.is_empty() {
            return;
        }
        let m = lp.num_rows();
        let k = basic_structural.len();
        let mut rhs: Vec<f64> = lp
            .rows
            .iter()
            .zip(&lp.rhs)
            .map(|(row, b)| {
                b - row
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !basic_structural.contains(j))
                    .map(|(j, a)| a * values[j])
                    .sum::<f64>()
            })
            .collect();
        let mut mat: Vec<Vec<f64>> = lp
            .rows
            .iter()
            .map(|row| basic_structural.iter().map(|&j| row[j]).collect())
            .collect();

        // least-squares-free elimination: pick k independent rows by partial pivoting
        let mut used = vec![false; m];
        let mut order = Vec::with_capacity(k);
        for col in 0..k {
            let pick = (0..m)
                .filter(|&i| !used[i])
                .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()).then(b.cmp(&a)));
            let Some(p) = pick else { return };
            if mat[p][col].abs() < 1e-12 {
                return;
            }
            used[p] = true;
            order.push(p);
            for i in 0..m {
                if i == p {
                    continue;
                }
                let f = mat[i][col] / mat[p][col];
                if f != 0.0 {
                    for c in col..k {
                        mat[i][c] -= f * mat[p][c];
                    }
                    rhs[i] -= f * rhs[p];
                }
            }
        }
        let refined: Vec<f64> = order
            .iter()
            .enumerate()
            .map(|(col, &p)| rhs[p] / mat[p][col])
            .collect();
        let mut candidate = values.to_vec();
        for (&j, v) in basic_structural.iter().zip(refined) {
            candidate[j] = v;
        }
        if lp.residual(&candidate) <= lp.residual(values) {
            values.copy_from_slice(&candidate);
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    theta: f64,
    leave: Option<(usize, bool)>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
