//! Survivability and interconnection latency of a given placement.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::failures::DisconnectionMatrix;
use crate::topology::DelayMatrix;

/// Rack count per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    racks: Vec<u32>,
}

impl Placement {
    pub fn new(racks: Vec<u32>) -> Self {
        Placement { racks }
    }

    /// All `racks` on `site`, none elsewhere.
    pub fn single_site(sites: usize, site: usize, racks: u32) -> Self {
        let mut v = alloc::vec![0; sites];
        v[site] = racks;
        Placement { racks: v }
    }

    pub fn racks(&self) -> &[u32] {
        &self.racks
    }

    pub fn len(&self) -> usize {
        self.racks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.racks.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.racks.iter().map(|&x| x as u64).sum()
    }

    pub fn is_active(&self, site: usize) -> bool {
        self.racks[site] > 0
    }

    pub fn active_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.racks.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i)
    }

    pub fn active_count(&self) -> usize {
        self.racks.iter().filter(|&&x| x > 0).count()
    }

    pub fn into_racks(self) -> Vec<u32> {
        self.racks
    }
}

/// Worst-case accessible racks, kept as an exact integer ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Survivability {
    pub accessible: u64,
    pub total: u64,
    /// Group attaining the minimum, smallest id on ties. `None` for an empty catalog.
    pub worst_srg: Option<usize>,
}

impl Survivability {
    pub fn value(&self) -> f64 {
        self.accessible as f64 / self.total as f64
    }
}

pub fn survivability(p: &Placement, m: &DisconnectionMatrix, total_racks: u64) -> Result<Survivability> {
    if total_racks == 0 {
        return Err(Error::ZeroRacks);
    }
    if p.len() != m.site_count() {
        return Err(Error::DimensionMismatch { expected: m.site_count(), found: p.len() });
    }
    if p.total() != total_racks {
        return Err(Error::RackTotalMismatch { expected: total_racks, found: p.total() });
    }
    let mut worst: Option<(u64, usize)> = None;
    for (f, row) in m.rows().enumerate() {
        let up: u64 = row
            .iter()
            .zip(p.racks())
            .filter(|(&acc, _)| acc)
            .map(|(_, &x)| x as u64)
            .sum();
        if worst.is_none_or(|(w, _)| up < w) {
            worst = Some((up, f));
        }
    }
    Ok(match worst {
        Some((accessible, f)) => Survivability { accessible, total: total_racks, worst_srg: Some(f) },
        None => Survivability { accessible: total_racks, total: total_racks, worst_srg: None },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Latency {
    pub ms: f64,
    /// Active pair attaining the maximum, lexicographically smallest on ties.
    /// `(i, i)` when a single site is active.
    pub worst_pair: (usize, usize),
}

pub fn latency(p: &Placement, d: &DelayMatrix) -> Result<Latency> {
    if p.len() != d.len() {
        return Err(Error::DimensionMismatch { expected: d.len(), found: p.len() });
    }
    let active: Vec<usize> = p.active_sites().collect();
    let first = *active.first().ok_or(Error::NoActiveSite)?;
    let mut best = Latency { ms: 0.0, worst_pair: (first, first) };
    for (k, &i) in active.iter().enumerate() {
        for &j in &active[k + 1..] {
            if d.get(i, j) > best.ms {
                best = Latency { ms: d.get(i, j), worst_pair: (i, j) };
            }
        }
    }
    Ok(best)
}

/// `(1 - beta) * s - beta * l / l_max`, with the latency term dropped when `l_max` is zero.
pub fn objective(s: f64, l: f64, beta: f64, l_max: f64) -> f64 {
    if l_max > 0.0 {
        (1.0 - beta) * s - beta * (l / l_max)
    } else {
        (1.0 - beta) * s
    }
}

/// `l / l_max`, zero when `l_max` is zero.
pub fn normalized_latency(l: f64, l_max: f64) -> f64 {
    if l_max > 0.0 {
        l / l_max
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub survivability: f64,
    /// Numerator of `survivability` over the total rack count.
    pub accessible_racks: u64,
    pub total_racks: u64,
    pub latency_ms: f64,
    pub normalized_latency: f64,
    pub worst_srg: Option<usize>,
    pub worst_pair: (usize, usize),
    pub active_sites: usize,
}

pub fn evaluate(p: &Placement, d: &DelayMatrix, m: &DisconnectionMatrix, total_racks: u64) -> Result<MetricReport> {
    let s = survivability(p, m, total_racks)?;
    let l = latency(p, d)?;
    Ok(MetricReport {
        survivability: s.value(),
        accessible_racks: s.accessible,
        total_racks,
        latency_ms: l.ms,
        normalized_latency: normalized_latency(l.ms, d.l_max()),
        worst_srg: s.worst_srg,
        worst_pair: l.worst_pair,
        active_sites: p.active_count(),
    })
}
