//! Optimal placements and the survivability / latency frontier.
//!
//! The objective `(1 - beta) * s - beta * l / l_max` only depends on a
//! placement through `(s, l)`, and `l` is always one of the pairwise delays.
//! For every candidate latency `L` let `s*(L)` be the best survivability of a
//! placement whose active sites are pairwise within `L`. `s*` is a
//! non-decreasing staircase, and every weighted-sum optimum sits on one of its
//! corners. [`Frontier::compute`] finds all corners exactly with the search in
//! the `search` module (binary search over `L` for the next step up, then a
//! maximization at that `L`). Selecting a `beta` is then a scan over corners,
//! and the chosen corner is refined to the canonical placement: fewest active
//! sites, then lexicographically smallest rack vector.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::failures::{disconnection_matrix, DisconnectionMatrix, SrgCatalog};
use crate::metrics::{self, normalized_latency, objective, MetricReport, Placement};
use crate::milp::{branch_and_bound, MilpOutcome};
use crate::model::build_model;
use crate::search::{self, Context, Goal, Outcome, Query};
use crate::topology::{delay_matrix, DelayMatrix, Topology};
use crate::{DELAY_TOLERANCE_MS, OBJECTIVE_TOLERANCE};

/// Everything the solver needs: the network, its derived matrices, the rack
/// count and per-site capacities.
#[derive(Debug, Clone)]
pub struct DesignInstance {
    topology: Topology,
    delays: DelayMatrix,
    catalog: SrgCatalog,
    matrix: DisconnectionMatrix,
    racks: u32,
    capacities: Vec<u32>,
}

impl DesignInstance {
    pub fn new(
        topology: Topology,
        delays: DelayMatrix,
        catalog: SrgCatalog,
        racks: u32,
        capacities: Vec<u32>,
    ) -> Result<Self> {
        if racks == 0 {
            return Err(Error::ZeroRacks);
        }
        let n = topology.site_count();
        if delays.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: delays.len() });
        }
        if capacities.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: capacities.len() });
        }
        let matrix = disconnection_matrix(&topology, &catalog);
        Ok(DesignInstance { topology, delays, catalog, matrix, racks, capacities })
    }

    /// Single-failure groups, delays at `speed_mps`. Capacities come from
    /// `uniform_capacity` when set, else from each site, else default to `racks`.
    pub fn single_failures(
        topology: Topology,
        speed_mps: f64,
        racks: u32,
        uniform_capacity: Option<u32>,
    ) -> Result<Self> {
        let catalog = SrgCatalog::single_failures(&topology);
        Self::with_catalog(topology, catalog, speed_mps, racks, uniform_capacity)
    }

    pub fn with_catalog(
        topology: Topology,
        catalog: SrgCatalog,
        speed_mps: f64,
        racks: u32,
        uniform_capacity: Option<u32>,
    ) -> Result<Self> {
        let delays = delay_matrix(&topology, speed_mps)?;
        let capacities = topology
            .sites()
            .iter()
            .map(|s| uniform_capacity.or(s.capacity).unwrap_or(racks))
            .collect();
        Self::new(topology, delays, catalog, racks, capacities)
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn delays(&self) -> &DelayMatrix {
        &self.delays
    }

    pub fn catalog(&self) -> &SrgCatalog {
        &self.catalog
    }

    pub fn matrix(&self) -> &DisconnectionMatrix {
        &self.matrix
    }

    pub fn racks(&self) -> u32 {
        self.racks
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }

    pub fn site_count(&self) -> usize {
        self.topology.site_count()
    }

    pub fn l_max(&self) -> f64 {
        self.delays.l_max()
    }

    pub fn total_capacity(&self) -> u64 {
        self.capacities.iter().map(|&z| z as u64).sum()
    }

    pub fn check_feasible(&self) -> Result<()> {
        if self.total_capacity() < self.racks as u64 {
            Err(Error::Infeasible { capacity: self.total_capacity(), racks: self.racks })
        } else {
            Ok(())
        }
    }

    /// Placement metrics, after checking the rack total and capacities.
    pub fn evaluate(&self, p: &Placement) -> Result<MetricReport> {
        if p.len() != self.site_count() {
            return Err(Error::DimensionMismatch { expected: self.site_count(), found: p.len() });
        }
        for (site, (&x, &z)) in p.racks().iter().zip(&self.capacities).enumerate() {
            if x > z {
                return Err(Error::CapacityExceeded { site, racks: x, capacity: z });
            }
        }
        metrics::evaluate(p, &self.delays, &self.matrix, self.racks as u64)
    }

    /// Sites cut off from every gateway by each group.
    pub fn loss_sets(&self) -> Vec<Vec<usize>> {
        self.matrix
            .rows()
            .map(|row| (0..row.len()).filter(|&i| !row[i]).collect())
            .collect()
    }

    fn context(&self) -> Context<'_> {
        Context::new(self.racks, &self.capacities, &self.delays, &self.loss_sets())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Accepted absolute objective gap; zero asks for a certified optimum.
    pub gap: f64,
    /// Branch-and-bound nodes allowed per phase (frontier, and each refinement).
    pub budget_nodes: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { gap: 0.0, budget_nodes: 5_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimalityStatus {
    CertifiedOptimal,
    /// The optimum is at most `gap` above the reported objective.
    GapBounded { gap: f64 },
}

impl OptimalityStatus {
    pub fn is_certified(&self) -> bool {
        matches!(self, OptimalityStatus::CertifiedOptimal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub beta: f64,
    pub placement: Placement,
    pub active: Vec<bool>,
    pub survivability: f64,
    pub accessible_racks: u64,
    pub latency_ms: f64,
    pub normalized_latency: f64,
    pub objective: f64,
    pub status: OptimalityStatus,
    /// The placement is the canonical tie-broken one among the optima.
    pub canonical: bool,
    pub nodes: u64,
}

impl DesignResult {
    pub fn active_sites(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub beta: f64,
    pub survivability: f64,
    pub latency_ms: f64,
    pub normalized_latency: f64,
    pub active_sites: usize,
    pub status: OptimalityStatus,
}

impl From<&DesignResult> for ParetoPoint {
    fn from(r: &DesignResult) -> Self {
        ParetoPoint {
            beta: r.beta,
            survivability: r.survivability,
            latency_ms: r.latency_ms,
            normalized_latency: r.normalized_latency,
            active_sites: r.active_sites(),
            status: r.status,
        }
    }
}

/// Ranking data of a candidate placement: larger objective wins; within
/// [`OBJECTIVE_TOLERANCE`], higher survivability, then lower latency, then
/// fewer active sites, then the lexicographically smaller rack vector.
#[derive(Debug, Clone, Copy)]
pub struct Ranked<'a> {
    pub objective: f64,
    pub accessible: u64,
    pub latency_ms: f64,
    pub racks: &'a [u32],
}

impl Ranked<'_> {
    fn active(&self) -> usize {
        self.racks.iter().filter(|&&x| x > 0).count()
    }

    /// Tie-break among candidates whose objectives are already within tolerance.
    pub fn tie_break_before(&self, other: &Ranked<'_>) -> bool {
        other
            .accessible
            .cmp(&self.accessible)
            .then(self.latency_ms.total_cmp(&other.latency_ms))
            .then(self.active().cmp(&other.active()))
            .then(self.racks.cmp(other.racks))
            .is_lt()
    }
}

/// A step of the staircase: the best survivability reachable within
/// `latency_ms`, and no smaller latency reaches it.
#[derive(Debug, Clone, PartialEq)]
pub struct Corner {
    pub accessible: u64,
    pub latency_ms: f64,
    pub witness: Placement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    corners: Vec<Corner>,
    racks: u32,
    l_max: f64,
    exact: bool,
    nodes: u64,
    slack: u64,
    /// Valid bounds on any placement, for reporting gaps of inexact frontiers.
    accessible_upper: u64,
    latency_lower: f64,
}

/// Outcome of refining a corner to its canonical placement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub placement: Placement,
    pub canonical: bool,
    pub nodes: u64,
}

struct Budgeted<'a> {
    ctx: Context<'a>,
    limit: u64,
    used: u64,
    exhausted: bool,
}

impl<'a> Budgeted<'a> {
    fn run(&mut self, query: &Query) -> Outcome {
        let mut left = self.limit.saturating_sub(self.used);
        let before = left;
        let out = search::search(&self.ctx, query, &mut left);
        self.used += before - left;
        if matches!(out, Outcome::Exhausted(_)) {
            self.exhausted = true;
        }
        out
    }
}

impl Frontier {
    pub fn compute(inst: &DesignInstance, cfg: &SolveConfig) -> Result<Frontier> {
        inst.check_feasible()?;
        let ctx = inst.context();
        let racks = inst.racks();
        let thresholds = inst.delays().distinct_values();
        let last = thresholds.len() - 1;
        let slack = if cfg.gap > 0.0 { libm::floor(cfg.gap * racks as f64) as u64 } else { 0 };
        let accessible_upper = ctx.relaxed_accessible_bound();
        let mut run = Budgeted { ctx, limit: cfg.budget_nodes, used: 0, exhausted: false };

        let feasible = |run: &mut Budgeted<'_>, idx: usize, target: u64| -> Option<Vec<u32>> {
            match run.run(&Query::new(thresholds[idx], target, Goal::Feasible)) {
                Outcome::Found(x) => Some(x),
                _ => None,
            }
        };
        let maximize = |run: &mut Budgeted<'_>, idx: usize, target: u64| -> Option<Vec<u32>> {
            let mut q = Query::new(thresholds[idx], target, Goal::MaxAccessible);
            q.slack = slack;
            match run.run(&q) {
                Outcome::Found(x) | Outcome::Exhausted(Some(x)) => Some(x),
                _ => None,
            }
        };

        // smallest threshold admitting any placement; the full one always does
        let (mut lo, mut hi) = (0, last);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if feasible(&mut run, mid, 0).is_some() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let latency_lower = if run.exhausted { 0.0 } else { thresholds[lo] };

        let global = maximize(&mut run, last, 0).unwrap_or_else(|| round_robin(&run.ctx.caps, racks));
        let global_best = run.ctx.accessible(&global);

        let mut corners: Vec<Corner> = Vec::new();
        let mut idx = lo;
        let mut x = maximize(&mut run, idx, 0).unwrap_or_else(|| global.clone());
        loop {
            let accessible = run.ctx.accessible(&x);
            let placement = Placement::new(x);
            let latency_ms = metrics::latency(&placement, inst.delays())?.ms;
            corners.push(Corner { accessible, latency_ms, witness: placement });
            if accessible >= global_best || idx == last {
                break;
            }
            let want = accessible + 1;
            let (mut a, mut b) = (idx + 1, last);
            let mut found = None;
            while a < b {
                let mid = (a + b) / 2;
                match feasible(&mut run, mid, want) {
                    Some(w) => {
                        b = mid;
                        found = Some(w);
                    }
                    None => a = mid + 1,
                }
            }
            idx = a;
            let fallback = if idx == last { global.clone() } else { found.unwrap_or_else(|| global.clone()) };
            x = maximize(&mut run, idx, want).unwrap_or(fallback);
        }
        // an inexact run can leave dominated points; keep the clean staircase
        let mut clean: Vec<Corner> = Vec::new();
        for c in corners {
            while clean.last().is_some_and(|p| p.accessible <= c.accessible && p.latency_ms >= c.latency_ms) {
                clean.pop();
            }
            if clean.last().is_none_or(|p| c.accessible > p.accessible) {
                clean.push(c);
            }
        }

        Ok(Frontier {
            corners: clean,
            racks,
            l_max: inst.l_max(),
            exact: !run.exhausted,
            nodes: run.used,
            slack,
            accessible_upper: accessible_upper.max(global_best),
            latency_lower,
        })
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    /// Every search finished within budget.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn corner_objective(&self, c: &Corner, beta: f64) -> f64 {
        objective(c.accessible as f64 / self.racks as f64, c.latency_ms, beta, self.l_max)
    }

    /// Index of the corner optimal for `beta`, ties to higher survivability.
    pub fn select(&self, beta: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidBeta(beta));
        }
        let best = self
            .corners
            .iter()
            .map(|c| self.corner_objective(c, beta))
            .fold(f64::NEG_INFINITY, f64::max);
        // corners ascend in survivability and latency
        Ok(self
            .corners
            .iter()
            .rposition(|c| self.corner_objective(c, beta) >= best - OBJECTIVE_TOLERANCE)
            .expect("frontier has at least one corner"))
    }

    /// Canonical placement of corner `idx`: fewest active sites, then the
    /// lexicographically smallest rack vector.
    pub fn refine(&self, inst: &DesignInstance, idx: usize, cfg: &SolveConfig) -> Refinement {
        let corner = &self.corners[idx];
        let mut run = Budgeted { ctx: inst.context(), limit: cfg.budget_nodes, used: 0, exhausted: false };
        let n = inst.site_count();
        let threshold = corner.latency_ms;
        let target = corner.accessible;
        let mut current = corner.witness.racks().to_vec();

        let upper = current.iter().filter(|&&v| v > 0).count();
        let mut active = upper;
        for k in run.ctx.min_active_bound(target)..upper {
            let mut q = Query::new(threshold, target, Goal::Feasible);
            q.max_active = Some(k);
            match run.run(&q) {
                Outcome::Found(x) => {
                    current = x;
                    active = k;
                    break;
                }
                Outcome::None => {}
                Outcome::Exhausted(_) => break,
            }
        }

        let mut lo = vec![0u32; n];
        let mut hi = run.ctx.caps.clone();
        for i in 0..n {
            if run.exhausted {
                break;
            }
            if current[i] > 0 {
                let mut q = Query::new(threshold, target, Goal::MinRacks(i));
                q.max_active = Some(active);
                q.lo = Some(lo.clone());
                q.hi = Some(hi.clone());
                q.incumbent = Some(current.clone());
                match run.run(&q) {
                    Outcome::Found(x) | Outcome::Exhausted(Some(x)) => current = x,
                    Outcome::None | Outcome::Exhausted(None) => {}
                }
            }
            lo[i] = current[i];
            hi[i] = current[i];
        }
        Refinement { placement: Placement::new(current), canonical: !run.exhausted, nodes: run.used }
    }

    /// Assembles and re-verifies the result for `beta` from a refined corner.
    pub fn result(
        &self,
        inst: &DesignInstance,
        beta: f64,
        idx: usize,
        refinement: &Refinement,
    ) -> Result<DesignResult> {
        let corner = &self.corners[idx];
        let report = inst.evaluate(&refinement.placement)?;
        if report.accessible_racks < corner.accessible
            || report.latency_ms > corner.latency_ms + DELAY_TOLERANCE_MS
        {
            return Err(Error::Inconsistent(alloc::format!(
                "refined placement scores ({}, {}) below its corner ({}, {})",
                report.accessible_racks,
                report.latency_ms,
                corner.accessible,
                corner.latency_ms
            )));
        }
        let value = objective(report.survivability, report.latency_ms, beta, self.l_max);
        let status = if self.exact && self.slack == 0 {
            OptimalityStatus::CertifiedOptimal
        } else {
            let upper = objective(
                self.accessible_upper as f64 / self.racks as f64,
                self.latency_lower,
                beta,
                self.l_max,
            );
            let gap = if self.exact { (self.slack as f64 / self.racks as f64) * (1.0 - beta) } else { upper - value };
            OptimalityStatus::GapBounded { gap: gap.max(0.0) }
        };
        Ok(DesignResult {
            beta,
            active: (0..inst.site_count()).map(|i| refinement.placement.is_active(i)).collect(),
            placement: refinement.placement.clone(),
            survivability: report.survivability,
            accessible_racks: report.accessible_racks,
            latency_ms: report.latency_ms,
            normalized_latency: report.normalized_latency,
            objective: value,
            status,
            canonical: refinement.canonical,
            nodes: self.nodes + refinement.nodes,
        })
    }
}

/// One rack per site with room left, in id order, until all are placed.
fn round_robin(caps: &[u32], racks: u32) -> Vec<u32> {
    let mut x = vec![0u32; caps.len()];
    let mut left = racks;
    while left > 0 {
        for (xi, &z) in x.iter_mut().zip(caps) {
            if left > 0 && *xi < z {
                *xi += 1;
                left -= 1;
            }
        }
    }
    x
}

/// Optimal placement for one `beta`.
pub fn solve(inst: &DesignInstance, beta: f64, cfg: &SolveConfig) -> Result<DesignResult> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidBeta(beta));
    }
    let frontier = Frontier::compute(inst, cfg)?;
    let idx = frontier.select(beta)?;
    let refinement = frontier.refine(inst, idx, cfg);
    frontier.result(inst, beta, idx, &refinement)
}

/// `start, start + step, ..., end` with each value computed as `start + k * step`.
pub fn beta_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    let ok = (0.0..=1.0).contains(&start) && (0.0..=1.0).contains(&end) && start <= end && step > 0.0;
    if !ok || !step.is_finite() {
        return Err(Error::InvalidGrid { start, end, step });
    }
    let count = libm::floor((end - start) / step + 1e-9) as usize;
    let mut grid: Vec<f64> = (0..=count).map(|k| (start + k as f64 * step).min(end)).collect();
    if let Some(lastv) = grid.last_mut() {
        if (end - *lastv).abs() < 1e-9 {
            *lastv = end;
        }
    }
    Ok(grid)
}

/// One optimal design per grid value, sharing a single frontier.
pub fn sweep_results(inst: &DesignInstance, grid: &[f64], cfg: &SolveConfig) -> Result<Vec<DesignResult>> {
    let frontier = Frontier::compute(inst, cfg)?;
    let picks = grid.iter().map(|&b| frontier.select(b)).collect::<Result<Vec<_>>>()?;
    let mut refined: Vec<Option<Refinement>> = vec![None; frontier.corners().len()];
    let mut out = Vec::with_capacity(grid.len());
    for (&beta, &idx) in grid.iter().zip(&picks) {
        if refined[idx].is_none() {
            refined[idx] = Some(frontier.refine(inst, idx, cfg));
        }
        let r = refined[idx].as_ref().expect("refined above");
        out.push(frontier.result(inst, beta, idx, r)?);
    }
    Ok(out)
}

pub fn sweep(inst: &DesignInstance, grid: &[f64], cfg: &SolveConfig) -> Result<Vec<ParetoPoint>> {
    Ok(sweep_results(inst, grid, cfg)?.iter().map(ParetoPoint::from).collect())
}

/// Solves the full MILP with the generic branch and bound. Exponential in the
/// number of sites; meant for cross-checking small instances. The returned
/// placement is an optimum, not necessarily the canonical one.
pub fn solve_full_model(inst: &DesignInstance, beta: f64, cfg: &SolveConfig) -> Result<DesignResult> {
    inst.check_feasible()?;
    let (model, layout) = build_model(inst, beta)?;
    let (solution, nodes, status) = match branch_and_bound(&model, cfg.budget_nodes) {
        MilpOutcome::Optimal { solution, nodes } => (solution, nodes, OptimalityStatus::CertifiedOptimal),
        MilpOutcome::NodeLimit { incumbent: Some(solution), bound, nodes } => {
            let gap = (bound - solution.objective).max(0.0);
            (solution, nodes, OptimalityStatus::GapBounded { gap })
        }
        MilpOutcome::NodeLimit { incumbent: None, .. } | MilpOutcome::Unbounded => {
            return Err(Error::Inconsistent("full model produced no placement".into()))
        }
        MilpOutcome::Infeasible { .. } => {
            return Err(Error::Infeasible { capacity: inst.total_capacity(), racks: inst.racks() })
        }
    };
    let racks: Vec<u32> = (0..inst.site_count())
        .map(|i| solution.values[layout.racks(i)] as u32)
        .collect();
    let placement = Placement::new(racks);
    let report = inst.evaluate(&placement)?;
    Ok(DesignResult {
        beta,
        active: (0..inst.site_count()).map(|i| placement.is_active(i)).collect(),
        placement,
        survivability: report.survivability,
        accessible_racks: report.accessible_racks,
        latency_ms: report.latency_ms,
        normalized_latency: normalized_latency(report.latency_ms, inst.l_max()),
        objective: objective(report.survivability, report.latency_ms, beta, inst.l_max()),
        status,
        canonical: false,
        nodes,
    })
}
