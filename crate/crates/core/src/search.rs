//! Exact placement search under a latency threshold.
//!
//! For a threshold `L`, a placement is admissible when every pair of active
//! sites is at most `L` apart. The search is a depth-first branch and bound on
//! per-site rack bounds `lo <= x <= hi`. Each node solves the LP relaxation
//!
//! ```text
//! maximize  -v            (or -x[i] when minimizing a single site)
//!   sum x = R
//!   sum_{j in loss(f)} x[j] - v <= 0       for every failure f
//!   sum_{free j} x[j] / hi[j] <= k - |in|  when the active count is capped
//!   lo <= x <= hi,  0 <= v <= R - target
//! ```
//!
//! where `loss(f)` is the set of sites cut off from every gateway by `f`. Sites
//! forced in (`lo >= 1`) exclude every site farther than `L` from them. When
//! the LP support violates the threshold or the active cap, the node branches
//! on a site. Otherwise it rounds, and branches on a fractional rack count if
//! rounding does not close the node.

use alloc::vec;
use alloc::vec::Vec;

use crate::topology::DelayMatrix;
use crate::DELAY_TOLERANCE_MS;
use crate::lp::{LinearProgram, LpOutcome, Sense};

const EPS: f64 = 1e-6;

/// Per-instance data shared by every search.
#[derive(Debug, Clone)]
pub(crate) struct Context<'a> {
    pub racks: u32,
    pub caps: Vec<u32>,
    pub delays: &'a DelayMatrix,
    /// Maximal loss sets; a subset of another set adds no constraint.
    pub loss_rows: Vec<Vec<usize>>,
    rows_of: Vec<Vec<usize>>,
    /// Site lies in at least one loss set, so it can hold at most `R - target` racks.
    vulnerable: Vec<bool>,
}

impl<'a> Context<'a> {
    pub fn new(racks: u32, caps: &[u32], delays: &'a DelayMatrix, loss: &[Vec<usize>]) -> Self {
        let n = caps.len();
        let mut rows: Vec<Vec<usize>> = loss.iter().filter(|r| !r.is_empty()).cloned().collect();
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        rows.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        rows.dedup();
        let mut kept: Vec<Vec<usize>> = Vec::new();
        for r in rows {
            if !kept.iter().any(|k| is_subset(&r, k)) {
                kept.push(r);
            }
        }
        kept.sort();
        let mut rows_of = vec![Vec::new(); n];
        let mut vulnerable = vec![false; n];
        for (f, r) in kept.iter().enumerate() {
            for &j in r {
                rows_of[j].push(f);
                vulnerable[j] = true;
            }
        }
        Context {
            racks,
            caps: caps.iter().map(|&z| z.min(racks)).collect(),
            delays,
            loss_rows: kept,
            rows_of,
            vulnerable,
        }
    }

    pub fn sites(&self) -> usize {
        self.caps.len()
    }

    /// Accessible racks in the worst failure.
    pub fn accessible(&self, x: &[u32]) -> u64 {
        self.racks as u64 - self.max_loss(x)
    }

    fn max_loss(&self, x: &[u32]) -> u64 {
        self.loss_rows
            .iter()
            .map(|r| r.iter().map(|&j| x[j] as u64).sum::<u64>())
            .max()
            .unwrap_or(0)
    }

    /// Upper cap on a site's racks when `target` racks must stay accessible.
    pub fn cap_for_target(&self, site: usize, target: u64) -> u32 {
        let cap = self.caps[site];
        if self.vulnerable[site] {
            cap.min((self.racks as u64).saturating_sub(target) as u32)
        } else {
            cap
        }
    }

    /// Fewest active sites able to hold all racks with `target` still accessible.
    pub fn min_active_bound(&self, target: u64) -> usize {
        let mut caps: Vec<u32> = (0..self.sites()).map(|j| self.cap_for_target(j, target)).collect();
        caps.sort_unstable_by(|a, b| b.cmp(a));
        let mut sum = 0u64;
        for (k, c) in caps.iter().enumerate() {
            sum += *c as u64;
            if sum >= self.racks as u64 {
                return k + 1;
            }
        }
        self.sites() + 1
    }

    /// LP bound on accessible racks with no latency restriction.
    pub fn relaxed_accessible_bound(&self) -> u64 {
        let node = Node { lo: vec![0; self.sites()], hi: self.caps.clone() };
        let query = Query::new(f64::INFINITY, 0, Goal::MaxAccessible);
        match Search::new(self, &query).relax(&node) {
            Relaxed::Solved { loss, .. } => self.racks as u64 - ceil_tol(loss) as u64,
            _ => 0,
        }
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|s| big.binary_search(s).is_ok())
}

fn ceil_tol(v: f64) -> f64 {
    libm::ceil(v - EPS).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    /// Any admissible placement meeting the target.
    Feasible,
    /// Most accessible racks, at least the target.
    MaxAccessible,
    /// Fewest racks on one site, target met.
    MinRacks(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Query {
    pub threshold: f64,
    pub target: u64,
    pub max_active: Option<usize>,
    pub lo: Option<Vec<u32>>,
    pub hi: Option<Vec<u32>>,
    pub goal: Goal,
    /// Known admissible placement; searches only look for strict improvements.
    pub incumbent: Option<Vec<u32>>,
    /// Accept solutions this many racks short of the best possible.
    pub slack: u64,
}

impl Query {
    pub fn new(threshold: f64, target: u64, goal: Goal) -> Self {
        Query { threshold, target, max_active: None, lo: None, hi: None, goal, incumbent: None, slack: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    /// Best placement found, proven optimal for the goal.
    Found(Vec<u32>),
    /// No admissible placement (or none better than the incumbent).
    None,
    /// Node budget ran out; best placement so far, if any.
    Exhausted(Option<Vec<u32>>),
}

#[derive(Debug, Clone)]
struct Node {
    lo: Vec<u32>,
    hi: Vec<u32>,
}

enum Relaxed {
    Pruned,
    Solved { x: Vec<f64>, loss: f64, hi: Vec<u32> },
}

struct Search<'c, 'a> {
    ctx: &'c Context<'a>,
    query: &'c Query,
    target: u64,
    best: Option<Vec<u32>>,
    /// For `MinRacks`, racks on the site in `best`.
    best_racks: u32,
}

impl<'c, 'a> Search<'c, 'a> {
    fn new(ctx: &'c Context<'a>, query: &'c Query) -> Self {
        let mut s = Search { ctx, query, target: query.target, best: None, best_racks: u32::MAX };
        if let Some(inc) = &query.incumbent {
            s.accept(inc.clone());
        }
        s
    }

    fn conflicts(&self, a: usize, b: usize) -> bool {
        self.ctx.delays.get(a, b) > self.query.threshold + DELAY_TOLERANCE_MS
    }

    fn accept(&mut self, x: Vec<u32>) {
        match self.query.goal {
            Goal::Feasible => {}
            Goal::MaxAccessible => self.target = self.ctx.accessible(&x) + 1 + self.query.slack,
            Goal::MinRacks(i) => self.best_racks = x[i],
        }
        self.best = Some(x);
    }

    fn done(&self) -> bool {
        match self.query.goal {
            Goal::Feasible => self.best.is_some(),
            Goal::MaxAccessible => self.target > self.ctx.racks as u64,
            Goal::MinRacks(_) => self.best_racks == 0,
        }
    }

    /// Tightens bounds for forced-in sites. `None` when the node is empty.
    fn propagate(&self, node: &mut Node) -> Option<usize> {
        let n = self.ctx.sites();
        let forced: Vec<usize> = (0..n).filter(|&j| node.lo[j] > 0).collect();
        for (k, &a) in forced.iter().enumerate() {
            if forced[k + 1..].iter().any(|&b| self.conflicts(a, b)) {
                return None;
            }
        }
        if let Some(k) = self.query.max_active {
            if forced.len() > k {
                return None;
            }
        }
        for j in 0..n {
            if node.lo[j] == 0 && node.hi[j] > 0 && forced.iter().any(|&a| self.conflicts(a, j)) {
                node.hi[j] = 0;
            }
            let cap = self.ctx.cap_for_target(j, self.target).min(node.hi[j]);
            node.hi[j] = cap;
            if let Goal::MinRacks(i) = self.query.goal {
                if i == j && self.best.is_some() {
                    node.hi[j] = node.hi[j].min(self.best_racks.saturating_sub(1));
                    if self.best_racks == 0 {
                        return None;
                    }
                }
            }
            if node.lo[j] > node.hi[j] {
                return None;
            }
        }
        let lo_sum: u64 = node.lo.iter().map(|&v| v as u64).sum();
        let hi_sum: u64 = node.hi.iter().map(|&v| v as u64).sum();
        let r = self.ctx.racks as u64;
        if lo_sum > r || hi_sum < r {
            return None;
        }
        Some(forced.len())
    }

    fn relax(&self, node: &Node) -> Relaxed {
        let mut node = node.clone();
        let Some(forced) = self.propagate(&mut node) else {
            return Relaxed::Pruned;
        };
        let n = self.ctx.sites();
        let r = self.ctx.racks as f64;
        let cols: Vec<usize> = (0..n).filter(|&j| node.hi[j] > 0).collect();
        let mut col_of = vec![usize::MAX; n];
        for (c, &j) in cols.iter().enumerate() {
            col_of[j] = c;
        }
        let v = cols.len();
        let mut lp = LinearProgram::new(v + 1);
        for (c, &j) in cols.iter().enumerate() {
            lp.set_bounds(c, node.lo[j] as f64, node.hi[j] as f64);
        }
        let loss_cap = (self.ctx.racks as u64).saturating_sub(self.target) as f64;
        lp.set_bounds(v, 0.0, loss_cap);
        match self.query.goal {
            Goal::MinRacks(i) if col_of[i] != usize::MAX => lp.set_objective(col_of[i], -1.0),
            Goal::MinRacks(_) => {}
            _ => lp.set_objective(v, -1.0),
        }
        lp.add_row((0..v).map(|c| (c, 1.0)).collect(), Sense::Eq, r);
        for row in &self.ctx.loss_rows {
            let mut terms: Vec<(usize, f64)> =
                row.iter().filter(|&&j| col_of[j] != usize::MAX).map(|&j| (col_of[j], 1.0)).collect();
            if terms.is_empty() {
                continue;
            }
            terms.push((v, -1.0));
            lp.add_row(terms, Sense::Le, 0.0);
        }
        if let Some(k) = self.query.max_active {
            let free: Vec<(usize, f64)> = cols
                .iter()
                .filter(|&&j| node.lo[j] == 0)
                .map(|&j| (col_of[j], 1.0 / node.hi[j] as f64))
                .collect();
            if !free.is_empty() {
                lp.add_row(free, Sense::Le, (k - forced) as f64);
            }
        }
        match lp.solve() {
            LpOutcome::Optimal(sol) => {
                let mut x = vec![0.0; n];
                for (c, &j) in cols.iter().enumerate() {
                    x[j] = sol.x[c];
                }
                Relaxed::Solved { x, loss: sol.x[v], hi: node.hi }
            }
            _ => Relaxed::Pruned,
        }
    }

    /// Integer placement near `x` inside the bounds, using only `support`.
    fn round(&self, x: &[f64], support: &[usize], lo: &[u32], hi: &[u32]) -> Option<Vec<u32>> {
        let n = self.ctx.sites();
        let mut out = vec![0u32; n];
        for &j in support {
            out[j] = (libm::floor(x[j] + EPS).max(0.0) as u32).clamp(lo[j], hi[j]);
        }
        let mut sum: u64 = out.iter().map(|&v| v as u64).sum();
        let r = self.ctx.racks as u64;
        while sum > r {
            let j = *support
                .iter()
                .filter(|&&j| out[j] > lo[j])
                .max_by(|&&a, &&b| (out[a] as f64 - x[a]).total_cmp(&(out[b] as f64 - x[b])).then(b.cmp(&a)))?;
            out[j] -= 1;
            sum -= 1;
        }
        let mut load: Vec<u64> = self
            .ctx
            .loss_rows
            .iter()
            .map(|row| row.iter().map(|&j| out[j] as u64).sum())
            .collect();
        while sum < r {
            let score = |j: usize| self.ctx.rows_of[j].iter().map(|&f| load[f] + 1).max().unwrap_or(0);
            let j = *support.iter().filter(|&&j| out[j] < hi[j]).min_by(|&&a, &&b| {
                score(a)
                    .cmp(&score(b))
                    .then((x[b] - out[b] as f64).total_cmp(&(x[a] - out[a] as f64)))
                    .then(a.cmp(&b))
            })?;
            out[j] += 1;
            sum += 1;
            for &f in &self.ctx.rows_of[j] {
                load[f] += 1;
            }
        }
        Some(out)
    }

    fn meets_target(&self, x: &[u32]) -> bool {
        if self.ctx.accessible(x) < self.target {
            return false;
        }
        match self.query.goal {
            Goal::MinRacks(i) => self.best.is_none() || x[i] < self.best_racks,
            _ => true,
        }
    }

    fn run(mut self, budget: &mut u64) -> Outcome {
        let n = self.ctx.sites();
        let root = Node {
            lo: self.query.lo.clone().unwrap_or_else(|| vec![0; n]),
            hi: self.query.hi.clone().unwrap_or_else(|| self.ctx.caps.clone()),
        };
        let had_incumbent = self.best.is_some();
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if self.done() {
                break;
            }
            if *budget == 0 {
                return Outcome::Exhausted(self.best);
            }
            *budget -= 1;
            let (x, loss, hi) = match self.relax(&node) {
                Relaxed::Pruned => continue,
                Relaxed::Solved { x, loss, hi } => (x, loss, hi),
            };
            let lo = &node.lo;
            let support: Vec<usize> = (0..n).filter(|&j| x[j] > EPS || lo[j] > 0).collect();

            if let Some(site) = self.conflict_site(&support, lo, &x) {
                let (inn, out) = split_on_site(&node, &hi, site);
                stack.push(out);
                stack.push(inn);
                continue;
            }
            if let Some(k) = self.query.max_active {
                if support.len() > k {
                    let site = *support
                        .iter()
                        .filter(|&&j| lo[j] == 0)
                        .min_by(|&&a, &&b| x[a].total_cmp(&x[b]).then(a.cmp(&b)))
                        .expect("more supported sites than forced ones");
                    let (inn, out) = split_on_site(&node, &hi, site);
                    stack.push(inn);
                    stack.push(out);
                    continue;
                }
            }

            let node_bound_hit = |s: &Self, p: &[u32]| match s.query.goal {
                Goal::Feasible => true,
                Goal::MaxAccessible => {
                    s.ctx.accessible(p) + s.query.slack >= s.ctx.racks as u64 - ceil_tol(loss) as u64
                }
                Goal::MinRacks(i) => p[i] as f64 <= ceil_tol(x[i]),
            };
            if let Some(p) = self.round(&x, &support, lo, &hi) {
                if self.meets_target(&p) {
                    let closes = node_bound_hit(&self, &p);
                    self.accept(p);
                    if closes {
                        continue;
                    }
                }
            }

            let frac = support
                .iter()
                .map(|&j| (j, x[j] - libm::floor(x[j])))
                .filter(|&(_, f)| f > EPS && f < 1.0 - EPS)
                .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()).then(a.0.cmp(&b.0)));
            let Some((j, _)) = frac else {
                // integral relaxation whose rounding missed the target: nothing to split
                continue;
            };
            let down = libm::floor(x[j]) as u32;
            let mut below = Node { lo: node.lo.clone(), hi: hi.clone() };
            below.hi[j] = down;
            let mut above = Node { lo: node.lo.clone(), hi };
            above.lo[j] = down + 1;
            stack.push(below);
            stack.push(above);
        }
        match self.best {
            Some(b) if !had_incumbent || self.query.incumbent.as_ref() != Some(&b) => Outcome::Found(b),
            Some(_) => Outcome::None,
            None => Outcome::None,
        }
    }

    /// Free site of the support involved in the most threshold violations.
    fn conflict_site(&self, support: &[usize], lo: &[u32], x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for &a in support {
            if lo[a] > 0 {
                continue;
            }
            let count = support.iter().filter(|&&b| b != a && self.conflicts(a, b)).count();
            if count == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, c)) => count > c || (count == c && x[a] > x[b] + EPS),
            };
            if better {
                best = Some((a, count));
            }
        }
        best.map(|(a, _)| a)
    }
}

fn split_on_site(node: &Node, hi: &[u32], site: usize) -> (Node, Node) {
    let mut inn = Node { lo: node.lo.clone(), hi: hi.to_vec() };
    inn.lo[site] = inn.lo[site].max(1);
    let mut out = Node { lo: node.lo.clone(), hi: hi.to_vec() };
    out.hi[site] = 0;
    (inn, out)
}

pub(crate) fn search(ctx: &Context<'_>, query: &Query, budget: &mut u64) -> Outcome {
    Search::new(ctx, query).run(budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_delays(n: usize) -> DelayMatrix {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = (i as f64 - j as f64).abs();
            }
        }
        DelayMatrix::from_rows(n, d).unwrap()
    }

    fn own_failures(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|i| vec![i]).collect()
    }

    #[test]
    fn dominated_rows_are_dropped() {
        let d = line_delays(3);
        let ctx = Context::new(4, &[4, 4, 4], &d, &[vec![0], vec![0, 1], vec![], vec![1, 0], vec![2]]);
        assert_eq!(ctx.loss_rows, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn spread_over_everything_without_threshold() {
        let d = line_delays(4);
        let ctx = Context::new(8, &[8; 4], &d, &own_failures(4));
        let q = Query::new(f64::INFINITY, 0, Goal::MaxAccessible);
        let Outcome::Found(x) = search(&ctx, &q, &mut 10_000) else { panic!() };
        assert_eq!(ctx.accessible(&x), 6);
    }

    #[test]
    fn threshold_limits_the_spread() {
        let d = line_delays(4);
        let ctx = Context::new(8, &[8; 4], &d, &own_failures(4));
        // only neighbors may be co-active: best is 4 + 4 on two adjacent sites
        let q = Query::new(1.0, 0, Goal::MaxAccessible);
        let Outcome::Found(x) = search(&ctx, &q, &mut 10_000) else { panic!() };
        assert_eq!(ctx.accessible(&x), 4);
        let active: Vec<usize> = (0..4).filter(|&j| x[j] > 0).collect();
        assert_eq!(active.len(), 2);
        assert_eq!(active[1] - active[0], 1);
    }

    #[test]
    fn odd_racks_need_integer_branching() {
        let d = line_delays(2);
        let ctx = Context::new(5, &[5, 5], &d, &own_failures(2));
        let q = Query::new(f64::INFINITY, 0, Goal::MaxAccessible);
        let Outcome::Found(x) = search(&ctx, &q, &mut 10_000) else { panic!() };
        assert_eq!(ctx.accessible(&x), 2);
    }

    #[test]
    fn infeasible_target_and_active_cap() {
        let d = line_delays(3);
        let ctx = Context::new(6, &[6; 3], &d, &own_failures(3));
        let q = Query::new(f64::INFINITY, 5, Goal::Feasible);
        assert_eq!(search(&ctx, &q, &mut 10_000), Outcome::None);
        let mut q = Query::new(f64::INFINITY, 3, Goal::Feasible);
        q.max_active = Some(2);
        let Outcome::Found(x) = search(&ctx, &q, &mut 10_000) else { panic!() };
        assert_eq!(x.iter().filter(|&&v| v > 0).count(), 2);
        let mut q = Query::new(f64::INFINITY, 4, Goal::Feasible);
        q.max_active = Some(2);
        assert_eq!(search(&ctx, &q, &mut 10_000), Outcome::None);
        assert_eq!(ctx.min_active_bound(4), 3);
    }

    #[test]
    fn min_racks_improves_on_incumbent() {
        let d = line_delays(3);
        let ctx = Context::new(6, &[6; 3], &d, &own_failures(3));
        let mut q = Query::new(f64::INFINITY, 3, Goal::MinRacks(0));
        q.incumbent = Some(vec![3, 3, 0]);
        let Outcome::Found(x) = search(&ctx, &q, &mut 10_000) else { panic!() };
        assert_eq!(x[0], 0);
        q.incumbent = Some(x);
        assert_eq!(search(&ctx, &q, &mut 10_000), Outcome::None);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let d = line_delays(6);
        let ctx = Context::new(7, &[7; 6], &d, &own_failures(6));
        let q = Query::new(2.0, 0, Goal::MaxAccessible);
        assert!(matches!(search(&ctx, &q, &mut 1), Outcome::Exhausted(_)));
    }
}
