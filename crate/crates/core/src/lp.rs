//! Dense bounded-variable primal simplex.
//!
//! Solves `maximize c.x` subject to linear rows (`<=`, `>=`, `=`) and per-variable
//! bounds, with a two-phase method. Rows whose slack can absorb the starting
//! residual get no artificial variable, so problems that are feasible at their
//! lower bounds skip most of phase one. Dantzig pricing switches to Bland's rule
//! after a run of degenerate pivots.

use alloc::vec;
use alloc::vec::Vec;

const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    lower: Vec<f64>,
    upper: Vec<f64>,
    objective: Vec<f64>,
    rows: Vec<Row>,
    iteration_limit: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// `vars` variables with bounds `[0, +inf)` and a zero objective.
    pub fn new(vars: usize) -> Self {
        LinearProgram {
            lower: vec![0.0; vars],
            upper: vec![f64::INFINITY; vars],
            objective: vec![0.0; vars],
            rows: Vec::new(),
            iteration_limit: 50_000,
        }
    }

    pub fn var_count(&self) -> usize {
        self.lower.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn set_objective(&mut self, var: usize, coef: f64) {
        self.objective[var] = coef;
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row { terms, sense, rhs });
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn solve(&self) -> LpOutcome {
        if self.lower.iter().zip(&self.upper).any(|(l, u)| l > &(u + FEAS_TOL)) {
            return LpOutcome::Infeasible;
        }
        Simplex::build(self).run(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

struct Simplex {
    m: usize,
    cols: usize,
    structural: usize,
    first_artificial: usize,
    /// `m` rows of `B^-1 A`, row-major with `cols` columns.
    tableau: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    status: Vec<Status>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    bland: bool,
    degenerate_run: usize,
    iterations: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.lower.len();
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        let mut value = vec![0.0; n];
        let mut status = vec![Status::Free; n];
        for j in 0..n {
            if lower[j].is_finite() {
                value[j] = lower[j];
                status[j] = Status::AtLower;
            } else if upper[j].is_finite() {
                value[j] = upper[j];
                status[j] = Status::AtUpper;
            }
        }

        // slack bounds
        for row in &lp.rows {
            let (lo, hi) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
        }

        let residual: Vec<f64> = lp
            .rows
            .iter()
            .map(|row| row.rhs - row.terms.iter().map(|&(j, a)| a * value[j]).sum::<f64>())
            .collect();
        let needs_artificial: Vec<bool> = (0..m)
            .map(|i| residual[i] < lower[n + i] - FEAS_TOL || residual[i] > upper[n + i] + FEAS_TOL)
            .collect();
        let artificials = needs_artificial.iter().filter(|&&a| a).count();
        let first_artificial = n + m;
        let cols = n + m + artificials;
        for _ in 0..artificials {
            lower.push(0.0);
            upper.push(f64::INFINITY);
        }

        let mut tableau = vec![0.0; m * cols];
        let mut basis = vec![0; m];
        let mut next_art = first_artificial;
        value.resize(cols, 0.0);
        status.resize(cols, Status::AtLower);
        for (i, row) in lp.rows.iter().enumerate() {
            let base = i * cols;
            for &(j, a) in &row.terms {
                tableau[base + j] += a;
            }
            tableau[base + n + i] = 1.0;
            let slack = n + i;
            if needs_artificial[i] {
                // slack rests at its bound nearest the residual, artificial covers the rest
                let s = if residual[i] < lower[slack] { lower[slack] } else { upper[slack] };
                value[slack] = s;
                status[slack] = if s == lower[slack] { Status::AtLower } else { Status::AtUpper };
                let r = residual[i] - s;
                let sign = if r >= 0.0 { 1.0 } else { -1.0 };
                tableau[base + next_art] = sign;
                if sign < 0.0 {
                    for c in &mut tableau[base..base + cols] {
                        *c = -*c;
                    }
                }
                value[next_art] = r.abs();
                status[next_art] = Status::Basic;
                basis[i] = next_art;
                next_art += 1;
            } else {
                value[slack] = residual[i];
                status[slack] = Status::Basic;
                basis[i] = slack;
            }
        }

        Simplex {
            m,
            cols,
            structural: n,
            first_artificial,
            tableau,
            lower,
            upper,
            value,
            status,
            basis,
            reduced: vec![0.0; cols],
            bland: false,
            degenerate_run: 0,
            iterations: 0,
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        if self.cols > self.first_artificial {
            let mut cost = vec![0.0; self.cols];
            for c in &mut cost[self.first_artificial..] {
                *c = -1.0;
            }
            self.price(&cost);
            // phase one is bounded below by zero, so only optimality or the limit can end it
            if !matches!(self.iterate(lp.iteration_limit, true), Some(Step::Optimal)) {
                return LpOutcome::IterationLimit;
            }
            let infeasibility: f64 = self.value[self.first_artificial..].iter().sum();
            let scale = lp.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
            if infeasibility > 1e-7 * scale {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
            for j in self.first_artificial..self.cols {
                self.lower[j] = 0.0;
                self.upper[j] = 0.0;
                if self.status[j] != Status::Basic {
                    self.value[j] = 0.0;
                    self.status[j] = Status::AtLower;
                }
            }
        }

        let mut cost = vec![0.0; self.cols];
        cost[..self.structural].copy_from_slice(&lp.objective);
        self.price(&cost);
        self.bland = false;
        self.degenerate_run = 0;
        match self.iterate(lp.iteration_limit, false) {
            Some(Step::Optimal) => {}
            Some(Step::Unbounded) => return LpOutcome::Unbounded,
            _ => return LpOutcome::IterationLimit,
        }
        let x: Vec<f64> = (0..self.structural)
            .map(|j| self.value[j].clamp(lp.lower[j], lp.upper[j]))
            .collect();
        let objective = x.iter().zip(&lp.objective).map(|(v, c)| v * c).sum();
        LpOutcome::Optimal(LpSolution { x, objective })
    }

    fn price(&mut self, cost: &[f64]) {
        self.reduced.copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.tableau[i * self.cols..(i + 1) * self.cols];
                for (d, &t) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * t;
                }
            }
        }
    }

    /// Returns `None` on the iteration limit.
    fn iterate(&mut self, limit: usize, phase_one: bool) -> Option<Step> {
        loop {
            if self.iterations >= limit {
                return None;
            }
            self.iterations += 1;
            match self.step(phase_one) {
                Step::Continue => {}
                other => return Some(other),
            }
        }
    }

    fn entering(&self, phase_one: bool) -> Option<(usize, f64)> {
        let limit = if phase_one { self.cols } else { self.first_artificial };
        let mut best: Option<(usize, f64)> = None;
        for j in 0..limit {
            let d = self.reduced[j];
            let dir = match self.status[j] {
                Status::Basic => continue,
                Status::AtLower if d > OPT_TOL => 1.0,
                Status::AtUpper if d < -OPT_TOL => -1.0,
                Status::Free if d.abs() > OPT_TOL => d.signum(),
                _ => continue,
            };
            if self.lower[j] == self.upper[j] {
                continue;
            }
            if self.bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(b, _)| d.abs() > self.reduced[b].abs()) {
                best = Some((j, dir));
            }
        }
        best
    }

    fn step(&mut self, phase_one: bool) -> Step {
        let Some((enter, dir)) = self.entering(phase_one) else {
            return Step::Optimal;
        };
        let cols = self.cols;

        let mut theta = self.upper[enter] - self.lower[enter];
        let mut leave: Option<(usize, bool)> = None;
        let mut leave_pivot = 0.0;
        for i in 0..self.m {
            let alpha = self.tableau[i * cols + enter];
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[i];
            let rate = -dir * alpha;
            let (limit, to_upper) = if rate < 0.0 {
                if !self.lower[b].is_finite() {
                    continue;
                }
                (((self.value[b] - self.lower[b]) / -rate).max(0.0), false)
            } else {
                if !self.upper[b].is_finite() {
                    continue;
                }
                (((self.upper[b] - self.value[b]) / rate).max(0.0), true)
            };
            let better = if limit < theta - 1e-12 {
                true
            } else if limit <= theta + 1e-12 {
                match leave {
                    Some((r, _)) if self.bland => b < self.basis[r],
                    Some(_) => alpha.abs() > leave_pivot,
                    None => false,
                }
            } else {
                false
            };
            if better {
                theta = limit;
                leave = Some((i, to_upper));
                leave_pivot = alpha.abs();
            }
        }
        if !theta.is_finite() {
            return Step::Unbounded;
        }

        if theta <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run > DEGENERATE_RUN {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }

        for i in 0..self.m {
            let alpha = self.tableau[i * cols + enter];
            if alpha != 0.0 {
                self.value[self.basis[i]] -= dir * theta * alpha;
            }
        }
        self.value[enter] += dir * theta;

        match leave {
            None => {
                // bound flip
                self.status[enter] = if dir > 0.0 { Status::AtUpper } else { Status::AtLower };
                self.value[enter] = if dir > 0.0 { self.upper[enter] } else { self.lower[enter] };
            }
            Some((r, to_upper)) => {
                let out = self.basis[r];
                self.status[out] = if to_upper { Status::AtUpper } else { Status::AtLower };
                self.value[out] = if to_upper { self.upper[out] } else { self.lower[out] };
                self.pivot(r, enter);
            }
        }
        Step::Continue
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let cols = self.cols;
        let p = self.tableau[r * cols + enter];
        for c in &mut self.tableau[r * cols..(r + 1) * cols] {
            *c /= p;
        }
        let pivot_row: Vec<f64> = self.tableau[r * cols..(r + 1) * cols].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tableau[i * cols + enter];
            if f != 0.0 {
                let row = &mut self.tableau[i * cols..(i + 1) * cols];
                for (c, &pv) in row.iter_mut().zip(&pivot_row) {
                    *c -= f * pv;
                }
                row[enter] = 0.0;
            }
        }
        let f = self.reduced[enter];
        if f != 0.0 {
            for (d, &pv) in self.reduced.iter_mut().zip(&pivot_row) {
                *d -= f * pv;
            }
            self.reduced[enter] = 0.0;
        }
        self.basis[r] = enter;
        self.status[enter] = Status::Basic;
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            let row = &self.tableau[r * self.cols..(r + 1) * self.cols];
            let candidate = (0..self.first_artificial)
                .filter(|&j| self.status[j] != Status::Basic)
                .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()));
            if let Some(j) = candidate {
                if row[j].abs() > PIVOT_TOL {
                    let out = self.basis[r];
                    self.value[out] = 0.0;
                    self.status[out] = Status::AtLower;
                    self.pivot(r, j);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(lp: &LinearProgram) -> LpSolution {
        lp.solve().optimal().expect("optimal")
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 3.0);
        lp.set_objective(1, 5.0);
        lp.add_row(vec![(0, 1.0)], Sense::Le, 4.0);
        lp.add_row(vec![(1, 2.0)], Sense::Le, 12.0);
        lp.add_row(vec![(0, 3.0), (1, 2.0)], Sense::Le, 18.0);
        let s = solve(&lp);
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows_need_phase_one() {
        // min x + y s.t. x + y >= 2, x - y = 1 -> x = 1.5, y = 0.5
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, -1.0);
        lp.set_objective(1, -1.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 2.0);
        lp.add_row(vec![(0, 1.0), (1, -1.0)], Sense::Eq, 1.0);
        let s = solve(&lp);
        assert!((s.x[0] - 1.5).abs() < 1e-9 && (s.x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_flip() {
        // max x + y with x, y in [0, 1] and no rows
        let mut lp = LinearProgram::new(2);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        assert!((solve(&lp).objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, 0.0, 1.0);
        lp.add_row(vec![(0, 1.0)], Sense::Ge, 2.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);

        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, 2.0, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn negative_lower_bounds_and_free_variables() {
        // max -|x - 3| style: max y, y <= x - 3, y <= 3 - x, x free
        let mut lp = LinearProgram::new(2);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, -10.0, f64::INFINITY);
        lp.set_objective(1, 1.0);
        lp.add_row(vec![(1, 1.0), (0, -1.0)], Sense::Le, -3.0);
        lp.add_row(vec![(1, 1.0), (0, 1.0)], Sense::Le, 3.0);
        let s = solve(&lp);
        assert!((s.x[0] - 3.0).abs() < 1e-9);
        assert!(s.x[1].abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Sense::Eq, 4.0);
        lp.add_row(vec![(0, 2.0), (1, 2.0)], Sense::Eq, 8.0);
        let s = solve(&lp);
        assert!((s.x[0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_vertex_does_not_cycle() {
        // Beale's cycling example
        let mut lp = LinearProgram::new(4);
        for (j, c) in [0.75, -150.0, 0.02, -6.0].into_iter().enumerate() {
            lp.set_objective(j, c);
        }
        lp.add_row(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Sense::Le, 0.0);
        lp.add_row(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Sense::Le, 0.0);
        lp.add_row(vec![(2, 1.0)], Sense::Le, 1.0);
        let s = solve(&lp);
        assert!((s.objective - 0.05).abs() < 1e-9, "{}", s.objective);
    }
}
