//! The placement MILP written out row by row.
//!
//! Variables, in order: `s`, `l`, `u[0..n]`, `x[0..n]`. Rows, in order: one
//! survivability row per group, one latency row per site pair `i < j`, the two
//! activation rows per site, the total rack row and one capacity row per site.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::Sense;
use crate::milp::{Model, VarKind};
use crate::optimizer::DesignInstance;

/// Position of each variable family inside a built [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelLayout {
    pub sites: usize,
}

impl ModelLayout {
    pub const SURVIVABILITY: usize = 0;
    pub const LATENCY: usize = 1;

    pub fn active(&self, site: usize) -> usize {
        2 + site
    }

    pub fn racks(&self, site: usize) -> usize {
        2 + self.sites + site
    }
}

pub fn build_model(inst: &DesignInstance, beta: f64) -> Result<(Model, ModelLayout)> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidBeta(beta));
    }
    let n = inst.site_count();
    let racks = inst.racks() as f64;
    let delays = inst.delays();
    let layout = ModelLayout { sites: n };
    let mut m = Model::default();

    // s is capped at 1 so an empty catalog stays bounded
    let s = m.add_variable("s", VarKind::Continuous, 0.0, 1.0);
    let l = m.add_variable("l", VarKind::Continuous, 0.0, f64::INFINITY);
    for i in 0..n {
        m.add_variable(format!("u[{i}]"), VarKind::Binary, 0.0, 1.0);
    }
    for i in 0..n {
        m.add_variable(format!("x[{i}]"), VarKind::Integer, 0.0, f64::INFINITY);
    }

    m.objective.push((s, 1.0 - beta));
    if delays.l_max() > 0.0 {
        m.objective.push((l, -beta / delays.l_max()));
    }

    for (f, row) in inst.matrix().rows().enumerate() {
        let mut terms: Vec<(usize, f64)> = (0..n)
            .filter(|&i| row[i])
            .map(|i| (layout.racks(i), 1.0))
            .collect();
        terms.push((s, -racks));
        m.add_constraint(format!("surv[{f}]"), terms, Sense::Ge, 0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = delays.get(i, j);
            m.add_constraint(
                format!("lat[{i},{j}]"),
                vec![(l, 1.0), (layout.active(i), -d), (layout.active(j), -d)],
                Sense::Ge,
                -d,
            );
        }
    }
    for i in 0..n {
        m.add_constraint(
            format!("act_hi[{i}]"),
            vec![(layout.active(i), racks), (layout.racks(i), -1.0)],
            Sense::Ge,
            0.0,
        );
    }
    for i in 0..n {
        m.add_constraint(
            format!("act_lo[{i}]"),
            vec![(layout.active(i), 1.0), (layout.racks(i), -1.0)],
            Sense::Le,
            0.0,
        );
    }
    m.add_constraint("total", (0..n).map(|i| (layout.racks(i), 1.0)).collect(), Sense::Eq, racks);
    for i in 0..n {
        m.add_constraint(
            format!("cap[{i}]"),
            vec![(layout.racks(i), 1.0)],
            Sense::Le,
            inst.capacities()[i] as f64,
        );
    }
    Ok((m, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{Link, Site, Topology, DEFAULT_SPEED_MPS};

    fn pentagon_with_chord() -> DesignInstance {
        let sites = (0..5).map(|i| Site::new(i, "p", 0.0, i as f64, i % 2 == 0)).collect();
        let mut links: Vec<Link> = (0..5).map(|i| Link::new(i, (i + 1) % 5)).collect();
        links.push(Link::new(0, 2));
        let t = Topology::new(sites, links).unwrap();
        DesignInstance::single_failures(t, DEFAULT_SPEED_MPS, 8, Some(4)).unwrap()
    }

    #[test]
    fn row_count_per_family() {
        let inst = pentagon_with_chord();
        assert_eq!(inst.catalog().len(), 11);
        let (m, layout) = build_model(&inst, 0.3).unwrap();
        assert_eq!(m.constraints.len(), 11 + 10 + 5 + 5 + 1 + 5);
        assert_eq!(m.variables.len(), 2 + 2 * 5);
        assert_eq!(m.variables[layout.active(4)].kind, VarKind::Binary);
        assert_eq!(m.variables[layout.racks(0)].kind, VarKind::Integer);
    }

    #[test]
    fn objective_at_the_extremes() {
        let inst = pentagon_with_chord();
        let (m, _) = build_model(&inst, 0.0).unwrap();
        assert_eq!(m.objective[0], (ModelLayout::SURVIVABILITY, 1.0));
        assert!(m.objective[1..].iter().all(|&(_, c)| c == 0.0));
        let (m, _) = build_model(&inst, 1.0).unwrap();
        assert_eq!(m.objective[0], (ModelLayout::SURVIVABILITY, 0.0));
        assert_eq!(m.objective[1], (ModelLayout::LATENCY, -1.0 / inst.l_max()));
        assert!(matches!(build_model(&inst, 1.5), Err(Error::InvalidBeta(_))));
    }
}
