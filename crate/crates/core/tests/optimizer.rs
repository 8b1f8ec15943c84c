mod common;

use common::*;
use geodc_core::audit::check_constraints;
use geodc_core::optimizer::solve_full_model;
use geodc_core::{oracle_solve, solve, DesignInstance, Link, SolveConfig, Topology, DEFAULT_SPEED_MPS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_agreement_on_random_tiny_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SolveConfig::default();
    for case in 0..100 {
        let inst = random_tiny_instance(&mut rng);
        for beta in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let got = solve(&inst, beta, &cfg).unwrap();
            let want = oracle_solve(&inst, beta).unwrap();
            assert!(
                (got.objective - want.objective).abs() <= 1e-9,
                "case {case} beta {beta}: {} vs {}",
                got.objective,
                want.objective
            );
            assert_eq!(got.placement, want.placement, "case {case} beta {beta}");
            assert!(got.status.is_certified() && got.canonical);
            assert!(check_constraints(&inst, &got).is_empty());
        }
    }
}

#[test]
fn full_model_matches_the_oracle_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = SolveConfig::default();
    for case in 0..25 {
        let inst = random_tiny_instance(&mut rng);
        for beta in [0.0, 0.5, 1.0] {
            let got = solve_full_model(&inst, beta, &cfg).unwrap();
            let want = oracle_solve(&inst, beta).unwrap();
            assert!((got.objective - want.objective).abs() <= 1e-9, "case {case} beta {beta}");
            assert!(check_constraints(&inst, &got).is_empty(), "case {case}");
        }
    }
}

fn triangle_all_gateways() -> DesignInstance {
    let sites = vec![site(0, 0.0, 0.0, true), site(1, 0.0, 4.0, true), site(2, 3.0, 2.0, true)];
    let links = vec![Link::new(0, 1), Link::new(1, 2), Link::new(0, 2)];
    let t = Topology::new(sites, links).unwrap();
    DesignInstance::single_failures(t, DEFAULT_SPEED_MPS, 2, Some(2)).unwrap()
}

#[test]
fn triangle_splits_racks_in_half() {
    let inst = triangle_all_gateways();
    let r = solve(&inst, 0.0, &SolveConfig::default()).unwrap();
    assert_eq!(r.survivability, 0.5);
    assert_eq!(r.active_sites(), 2);
    // the nearest pair wins the latency tie-break
    let d = inst.delays();
    let nearest = [(0, 1), (1, 2), (0, 2)]
        .into_iter()
        .min_by(|a, b| d.get(a.0, a.1).total_cmp(&d.get(b.0, b.1)))
        .unwrap();
    assert!(r.placement.is_active(nearest.0) && r.placement.is_active(nearest.1));
}

#[test]
fn line_with_single_gateway_cannot_survive() {
    // every composition loses everything when g fails; the oracle picks the
    // zero-latency, single-site, lexicographically smallest placement
    let sites = vec![site(0, 0.0, 0.0, true), site(1, 0.0, 1.0, false), site(2, 0.0, 2.0, false)];
    let t = Topology::new(sites, vec![Link::new(0, 1), Link::new(1, 2)]).unwrap();
    let inst = DesignInstance::single_failures(t, DEFAULT_SPEED_MPS, 2, Some(2)).unwrap();
    let r = solve(&inst, 0.0, &SolveConfig::default()).unwrap();
    assert_eq!(r.survivability, 0.0);
    assert_eq!(r.placement.racks(), &[0, 0, 2]);
    assert_eq!(oracle_solve(&inst, 0.0).unwrap().placement, r.placement);
}

#[test]
fn full_weight_on_latency_uses_one_site() {
    let inst = triangle_all_gateways();
    let inst = DesignInstance::new(
        inst.topology().clone(),
        inst.delays().clone(),
        inst.catalog().clone(),
        2,
        vec![2; 3],
    )
    .unwrap();
    let r = solve(&inst, 1.0, &SolveConfig::default()).unwrap();
    assert_eq!(r.latency_ms, 0.0);
    assert_eq!(r.active_sites(), 1);
}

#[test]
fn infeasible_capacity_is_reported() {
    let sites = vec![site(0, 0.0, 0.0, true), site(1, 0.0, 1.0, true)];
    let t = Topology::new(sites, vec![Link::new(0, 1)]).unwrap();
    let inst = DesignInstance::single_failures(t, DEFAULT_SPEED_MPS, 5, Some(2)).unwrap();
    let err = solve(&inst, 0.5, &SolveConfig::default()).unwrap_err();
    assert_eq!(err.kind(), geodc_core::ErrorKind::Infeasible);
}
