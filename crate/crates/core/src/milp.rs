//! Generic mixed-integer linear programs and a depth-first branch and bound.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::lp::{LinearProgram, LpOutcome, Sense};

const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs + tol,
            Sense::Ge => lhs >= self.rhs - tol,
            Sense::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

/// A maximization problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Model {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
}

impl Model {
    pub fn add_variable(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> usize {
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            _ => (lower, upper),
        };
        self.variables.push(Variable { name: name.into(), kind, lower, upper });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { name: name.into(), terms, sense, rhs });
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * values[j]).sum()
    }

    fn relaxation(&self, lower: &[f64], upper: &[f64]) -> LinearProgram {
        let mut lp = LinearProgram::new(self.variables.len());
        for j in 0..self.variables.len() {
            lp.set_bounds(j, lower[j], upper[j]);
        }
        for &(j, c) in &self.objective {
            lp.set_objective(j, c);
        }
        for c in &self.constraints {
            lp.add_row(c.terms.clone(), c.sense, c.rhs);
        }
        lp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MilpOutcome {
    Optimal { solution: MilpSolution, nodes: u64 },
    /// Node limit reached; best solution so far and an upper bound on the optimum.
    NodeLimit { incumbent: Option<MilpSolution>, bound: f64, nodes: u64 },
    Infeasible { nodes: u64 },
    Unbounded,
}

pub fn branch_and_bound(model: &Model, node_limit: u64) -> MilpOutcome {
    let n = model.variables.len();
    let lower: Vec<f64> = model.variables.iter().map(|v| integral_bound(v, v.lower, true)).collect();
    let upper: Vec<f64> = model.variables.iter().map(|v| integral_bound(v, v.upper, false)).collect();
    let mut stack = vec![(lower, upper, f64::INFINITY)];
    let mut incumbent: Option<MilpSolution> = None;
    let mut nodes = 0u64;

    while let Some((lo, hi, parent_bound)) = stack.pop() {
        if let Some(inc) = &incumbent {
            if parent_bound <= inc.objective + 1e-9 {
                continue;
            }
        }
        if nodes >= node_limit {
            let bound = stack
                .iter()
                .map(|n| n.2)
                .fold(parent_bound, f64::max)
                .max(incumbent.as_ref().map_or(f64::NEG_INFINITY, |s| s.objective));
            return MilpOutcome::NodeLimit { incumbent, bound, nodes };
        }
        nodes += 1;
        let sol = match model.relaxation(&lo, &hi).solve() {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Unbounded if incumbent.is_none() && nodes == 1 => return MilpOutcome::Unbounded,
            _ => continue,
        };
        if let Some(inc) = &incumbent {
            if sol.objective <= inc.objective + 1e-9 {
                continue;
            }
        }
        let branch = (0..n)
            .filter(|&j| model.variables[j].kind != VarKind::Continuous)
            .map(|j| (j, sol.x[j] - libm::floor(sol.x[j])))
            .filter(|&(_, frac)| frac > INT_TOL && frac < 1.0 - INT_TOL)
            .max_by(|a, b| {
                let da = (a.1 - 0.5).abs();
                let db = (b.1 - 0.5).abs();
                db.total_cmp(&da).then(b.0.cmp(&a.0))
            });
        match branch {
            None => {
                let mut values = sol.x;
                for (v, var) in values.iter_mut().zip(&model.variables) {
                    if var.kind != VarKind::Continuous {
                        *v = libm::round(*v);
                    }
                }
                let objective = model.objective_value(&values);
                incumbent = Some(MilpSolution { values, objective });
            }
            Some((j, _)) => {
                let down = libm::floor(sol.x[j]);
                let mut down_hi = hi.clone();
                down_hi[j] = down;
                let mut up_lo = lo.clone();
                up_lo[j] = down + 1.0;
                stack.push((lo, down_hi, sol.objective));
                stack.push((up_lo, hi, sol.objective));
            }
        }
    }
    match incumbent {
        Some(solution) => MilpOutcome::Optimal { solution, nodes },
        None => MilpOutcome::Infeasible { nodes },
    }
}

fn integral_bound(v: &Variable, b: f64, lower: bool) -> f64 {
    if v.kind == VarKind::Continuous || !b.is_finite() {
        b
    } else if lower {
        libm::ceil(b - INT_TOL)
    } else {
        libm::floor(b + INT_TOL)
    }
}
