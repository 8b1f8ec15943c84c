//! Sweeps that refine distinct frontier corners on several threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;
use std::thread;

use geodc_core::optimizer::Refinement;
use geodc_core::{DesignInstance, DesignResult, Frontier, ParetoPoint, SolveConfig};

use crate::error::Result;

/// Same output as the single-threaded core sweep for every `threads` value.
pub fn sweep_results(
    inst: &DesignInstance,
    grid: &[f64],
    cfg: &SolveConfig,
    threads: usize,
) -> Result<Vec<DesignResult>> {
    let frontier = Frontier::compute(inst, cfg)?;
    let picks = grid.iter().map(|&b| frontier.select(b)).collect::<geodc_core::error::Result<Vec<_>>>()?;
    let mut wanted = picks.clone();
    wanted.sort_unstable();
    wanted.dedup();

    let refined = refine_all(&frontier, inst, &wanted, cfg, threads);
    let mut out = Vec::with_capacity(grid.len());
    for (&beta, &idx) in grid.iter().zip(&picks) {
        let k = wanted.binary_search(&idx).expect("pick among wanted corners");
        out.push(frontier.result(inst, beta, idx, &refined[k])?);
    }
    Ok(out)
}

pub fn sweep(inst: &DesignInstance, grid: &[f64], cfg: &SolveConfig, threads: usize) -> Result<Vec<ParetoPoint>> {
    Ok(sweep_results(inst, grid, cfg, threads)?.iter().map(ParetoPoint::from).collect())
}

fn refine_all(
    frontier: &Frontier,
    inst: &DesignInstance,
    corners: &[usize],
    cfg: &SolveConfig,
    threads: usize,
) -> Vec<Refinement> {
    let workers = threads.clamp(1, corners.len().max(1));
    if workers == 1 {
        return corners.iter().map(|&i| frontier.refine(inst, i, cfg)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<OnceLock<Refinement>> = corners.iter().map(|_| OnceLock::new()).collect();
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&corner) = corners.get(k) else { break };
                let _ = slots[k].set(frontier.refine(inst, corner, cfg));
            });
        }
    });
    slots.into_iter().map(|s| s.into_inner().expect("every corner refined")).collect()
}
