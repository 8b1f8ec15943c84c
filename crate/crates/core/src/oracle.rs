//! Exhaustive reference solver for desk-size instances.
//!
//! Enumerates every composition of the racks over the sites within the
//! capacities, scores each one with the metrics module, and keeps the best
//! under the same ranking the optimizer uses.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metrics::{objective, Placement};
use crate::optimizer::{DesignInstance, DesignResult, OptimalityStatus, Ranked};
use crate::OBJECTIVE_TOLERANCE;

pub const MAX_SITES: usize = 10;
pub const MAX_COMPOSITIONS: u128 = 10_000_000;

/// Number of placements of `racks` racks with `x[i] <= caps[i]`, saturating
/// at `u128::MAX`.
pub fn composition_count(caps: &[u32], racks: u32) -> u128 {
    let r = racks as usize;
    let mut ways = vec![0u128; r + 1];
    ways[0] = 1;
    for &cap in caps {
        let cap = (cap as usize).min(r);
        let next = (0..=r)
            .map(|total| {
                let from = total.saturating_sub(cap);
                ways[from..=total].iter().fold(0u128, |acc, &w| acc.saturating_add(w))
            })
            .collect();
        ways = next;
    }
    ways[r]
}

/// Calls `visit` with every capacity-respecting composition of `racks`.
pub fn for_each_composition(caps: &[u32], racks: u32, mut visit: impl FnMut(&[u32])) {
    let n = caps.len();
    let mut suffix = vec![0u64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + caps[i].min(racks) as u64;
    }
    let mut x = vec![0u32; n];
    fn rec(i: usize, left: u32, caps: &[u32], suffix: &[u64], x: &mut [u32], visit: &mut dyn FnMut(&[u32])) {
        if i == caps.len() {
            if left == 0 {
                visit(x);
            }
            return;
        }
        let most = caps[i].min(left);
        for v in 0..=most {
            if suffix[i + 1] < (left - v) as u64 {
                continue;
            }
            x[i] = v;
            rec(i + 1, left - v, caps, suffix, x, visit);
        }
        x[i] = 0;
    }
    if n > 0 {
        rec(0, racks, caps, &suffix, &mut x, &mut visit);
    }
}

pub fn oracle_solve(inst: &DesignInstance, beta: f64) -> Result<DesignResult> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidBeta(beta));
    }
    let n = inst.site_count();
    let caps = inst.capacities();
    let count = composition_count(caps, inst.racks());
    if n > MAX_SITES || count > MAX_COMPOSITIONS {
        return Err(Error::InstanceTooLarge { sites: n, compositions: count, limit: MAX_COMPOSITIONS });
    }
    inst.check_feasible()?;
    let l_max = inst.l_max();

    let score = |x: &[u32]| -> (f64, u64, f64) {
        let report = inst.evaluate(&Placement::new(x.to_vec())).expect("composition is a valid placement");
        let obj = objective(report.survivability, report.latency_ms, beta, l_max);
        (obj, report.accessible_racks, report.latency_ms)
    };

    let mut best_obj = f64::NEG_INFINITY;
    for_each_composition(caps, inst.racks(), |x| best_obj = best_obj.max(score(x).0));

    let mut best: Option<(f64, u64, f64, Vec<u32>)> = None;
    for_each_composition(caps, inst.racks(), |x| {
        let (obj, acc, lat) = score(x);
        if obj < best_obj - OBJECTIVE_TOLERANCE {
            return;
        }
        let take = match &best {
            None => true,
            Some((bo, ba, bl, bx)) => Ranked { objective: obj, accessible: acc, latency_ms: lat, racks: x }
                .tie_break_before(&Ranked { objective: *bo, accessible: *ba, latency_ms: *bl, racks: bx }),
        };
        if take {
            best = Some((obj, acc, lat, x.to_vec()));
        }
    });
    let (_, _, _, racks) = best.ok_or(Error::Infeasible { capacity: inst.total_capacity(), racks: inst.racks() })?;
    let placement = Placement::new(racks);
    let report = inst.evaluate(&placement)?;
    Ok(DesignResult {
        beta,
        active: (0..n).map(|i| placement.is_active(i)).collect(),
        placement,
        survivability: report.survivability,
        accessible_racks: report.accessible_racks,
        latency_ms: report.latency_ms,
        normalized_latency: report.normalized_latency,
        objective: objective(report.survivability, report.latency_ms, beta, l_max),
        status: OptimalityStatus::CertifiedOptimal,
        canonical: true,
        nodes: count as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{Link, Site, Topology, DEFAULT_SPEED_MPS};
    use crate::ErrorKind;

    #[test]
    fn counts_match_enumeration() {
        for (caps, r) in [(vec![2, 2, 2], 2), (vec![1, 3, 2], 4), (vec![6; 4], 6), (vec![0, 5], 3)] {
            let mut seen = 0u128;
            for_each_composition(&caps, r, |x| {
                assert_eq!(x.iter().sum::<u32>(), r);
                assert!(x.iter().zip(&caps).all(|(v, c)| v <= c));
                seen += 1;
            });
            assert_eq!(seen, composition_count(&caps, r), "{caps:?} {r}");
        }
        // stars and bars: C(6 + 3, 3)
        assert_eq!(composition_count(&[6; 4], 6), 84);
        assert_eq!(composition_count(&[1024; 40], 1024), u128::MAX);
    }

    fn path(n: usize, racks: u32) -> DesignInstance {
        let sites = (0..n).map(|i| Site::new(i, "v", 0.0, i as f64, true)).collect();
        let links = (1..n).map(|i| Link::new(i - 1, i)).collect();
        let t = Topology::new(sites, links).unwrap();
        DesignInstance::single_failures(t, DEFAULT_SPEED_MPS, racks, None).unwrap()
    }

    #[test]
    fn single_rack_has_no_latency() {
        for beta in [0.0, 0.5, 1.0] {
            let r = oracle_solve(&path(4, 1), beta).unwrap();
            assert_eq!(r.latency_ms, 0.0);
            assert_eq!(r.active_sites(), 1);
            assert_eq!(r.survivability, 0.0);
        }
    }

    #[test]
    fn refuses_oversized_instances() {
        let e = oracle_solve(&path(11, 2), 0.5).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::TooLarge);
        let e = oracle_solve(&path(10, 1024), 0.5).unwrap_err();
        assert!(matches!(e, Error::InstanceTooLarge { .. }));
    }

    #[test]
    fn optimum_dominates_every_composition() {
        let inst = path(4, 4);
        let r = oracle_solve(&inst, 0.4).unwrap();
        for_each_composition(inst.capacities(), inst.racks(), |x| {
            let rep = inst.evaluate(&Placement::new(x.to_vec())).unwrap();
            let o = crate::metrics::objective(rep.survivability, rep.latency_ms, 0.4, inst.l_max());
            assert!(o <= r.objective + 1e-12);
        });
    }
}
