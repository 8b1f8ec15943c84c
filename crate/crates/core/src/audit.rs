//! Independent feasibility check of a design against the placement MILP.
//!
//! Works from the raw matrices and the claimed `(x, u, s, l)`; it shares no
//! code with the solver or the metrics module.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::optimizer::{DesignInstance, DesignResult};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: &'static str,
    pub detail: String,
}

/// Every violated row, bound or claim. Empty when the design is consistent.
pub fn check_constraints(inst: &DesignInstance, result: &DesignResult) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut fail = |constraint: &'static str, detail: String| out.push(Violation { constraint, detail });
    let n = inst.site_count();
    let x = result.placement.racks();
    if x.len() != n || result.active.len() != n {
        fail("dimensions", format!("{} racks, {} flags for {} sites", x.len(), result.active.len(), n));
        return out;
    }
    let r = inst.racks() as f64;
    let s = result.survivability;
    let l = result.latency_ms;
    let u: Vec<f64> = result.active.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();

    if !(s.is_finite() && s >= 0.0 && l.is_finite() && l >= 0.0) {
        fail("bounds", format!("s = {s}, l = {l}"));
    }
    let m = inst.matrix();
    let mut tightest = f64::INFINITY;
    for f in 0..m.srg_count() {
        let up: f64 = (0..n).filter(|&i| m.accessible(f, i)).map(|i| x[i] as f64).sum();
        tightest = tightest.min(up);
        if up - s * r < -TOL * r {
            fail("survivability", format!("group {f}: {up} accessible racks < s * R = {}", s * r));
        }
    }
    let d = inst.delays();
    let mut widest: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dij = d.get(i, j);
            if u[i] * u[j] > 0.0 {
                widest = widest.max(dij);
            }
            if l - dij * u[i] - dij * u[j] < -dij - TOL {
                fail("latency", format!("pair ({i}, {j}): l = {l} below {dij}"));
            }
        }
    }
    for i in 0..n {
        let xi = x[i] as f64;
        if r * u[i] - xi < 0.0 {
            fail("activation_upper", format!("site {i}: {xi} racks on an inactive site"));
        }
        if u[i] > xi {
            fail("activation_lower", format!("site {i}: active with no racks"));
        }
        if xi > inst.capacities()[i] as f64 {
            fail("capacity", format!("site {i}: {xi} racks > {}", inst.capacities()[i]));
        }
    }
    let total: f64 = x.iter().map(|&v| v as f64).sum();
    if total != r {
        fail("total_racks", format!("{total} racks placed, {r} required"));
    }

    // the solver claims the metric values, not just any feasible (s, l)
    let exact_s = if m.srg_count() == 0 { 1.0 } else { tightest / r };
    if (exact_s - s).abs() > TOL {
        fail("survivability_claim", format!("claimed s = {s}, worst group keeps {exact_s}"));
    }
    if (widest - l).abs() > TOL {
        fail("latency_claim", format!("claimed l = {l}, widest active pair is {widest}"));
    }
    let beta = result.beta;
    let expected = if d.l_max() > 0.0 { (1.0 - beta) * s - beta * l / d.l_max() } else { (1.0 - beta) * s };
    if (expected - result.objective).abs() > TOL {
        fail("objective", format!("claimed {} but (s, l) give {expected}", result.objective));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::optimizer::{solve, SolveConfig};
    use crate::topology::{Link, Site, Topology, DEFAULT_SPEED_MPS};

    fn solved() -> (DesignInstance, DesignResult) {
        let sites = (0..4).map(|i| Site::new(i, "r", 0.0, i as f64, i != 3)).collect();
        let links = (0..4).map(|i| Link::new(i, (i + 1) % 4)).collect();
        let t = Topology::new(sites, links).unwrap();
        let inst = DesignInstance::single_failures(t, DEFAULT_SPEED_MPS, 6, Some(3)).unwrap();
        let r = solve(&inst, 0.4, &SolveConfig::default()).unwrap();
        (inst, r)
    }

    fn names(v: &[Violation]) -> Vec<&'static str> {
        v.iter().map(|v| v.constraint).collect()
    }

    #[test]
    fn solver_output_passes() {
        let (inst, r) = solved();
        assert_eq!(check_constraints(&inst, &r), vec![]);
    }

    #[test]
    fn overclaimed_survivability_is_caught() {
        let (inst, mut r) = solved();
        r.survivability += 0.2;
        let v = check_constraints(&inst, &r);
        assert!(names(&v).contains(&"survivability"), "{v:?}");
    }

    #[test]
    fn underclaimed_latency_is_caught() {
        let (inst, mut r) = solved();
        r.latency_ms /= 2.0;
        assert!(names(&check_constraints(&inst, &r)).contains(&"latency"));
    }

    #[test]
    fn activation_capacity_and_total_rows() {
        let (inst, mut r) = solved();
        r.placement = crate::metrics::Placement::new(vec![4, 2, 0, 1]);
        r.active = vec![true, false, true, true];
        let v = names(&check_constraints(&inst, &r));
        for want in ["capacity", "activation_upper", "activation_lower", "total_racks"] {
            assert!(v.contains(&want), "{want} missing from {v:?}");
        }
    }
}
