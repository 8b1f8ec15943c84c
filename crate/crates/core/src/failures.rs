//! Shared risk groups and post-failure gateway accessibility.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::topology::Topology;

/// A group of sites and links that fail together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Srg {
    pub id: usize,
    /// Sorted, de-duplicated site ids.
    pub nodes: Vec<usize>,
    /// Sorted, de-duplicated link indices.
    pub links: Vec<usize>,
}

impl Srg {
    pub fn new(id: usize, mut nodes: Vec<usize>, mut links: Vec<usize>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        links.sort_unstable();
        links.dedup();
        Srg { id, nodes, links }
    }

    pub fn contains_site(&self, site: usize) -> bool {
        self.nodes.binary_search(&site).is_ok()
    }

    pub fn contains_link(&self, link: usize) -> bool {
        self.links.binary_search(&link).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.links.is_empty()
    }
}

/// The ordered set of failure scenarios considered by the design.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SrgCatalog {
    srgs: Vec<Srg>,
}

impl SrgCatalog {
    /// One group per site (by site id) followed by one group per link (by link index).
    pub fn single_failures(t: &Topology) -> Self {
        let nodes = (0..t.site_count()).map(|s| (vec![s], vec![]));
        let links = (0..t.link_count()).map(|l| (vec![], vec![l]));
        let srgs = nodes
            .chain(links)
            .enumerate()
            .map(|(id, (n, l))| Srg::new(id, n, l))
            .collect();
        SrgCatalog { srgs }
    }

    /// Custom risk model, one `(sites, links)` pair per group. Ids follow input order.
    pub fn from_groups(t: &Topology, groups: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        let mut srgs = Vec::with_capacity(groups.len());
        for (id, (nodes, links)) in groups.into_iter().enumerate() {
            let srg = Srg::new(id, nodes, links);
            if srg.is_empty() {
                return Err(Error::EmptySrg(id));
            }
            if let Some(&s) = srg.nodes.iter().find(|&&s| s >= t.site_count()) {
                return Err(Error::UnknownSite(s));
            }
            if let Some(&l) = srg.links.iter().find(|&&l| l >= t.link_count()) {
                return Err(Error::UnknownLink(l));
            }
            srgs.push(srg);
        }
        Ok(SrgCatalog { srgs })
    }

    pub fn empty() -> Self {
        SrgCatalog::default()
    }

    pub fn srgs(&self) -> &[Srg] {
        &self.srgs
    }

    pub fn len(&self) -> usize {
        self.srgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.srgs.is_empty()
    }

    /// Catalog without the group at position `idx`; remaining ids are renumbered.
    pub fn without(&self, idx: usize) -> Self {
        let srgs = self
            .srgs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .enumerate()
            .map(|(id, (_, s))| Srg { id, ..s.clone() })
            .collect();
        SrgCatalog { srgs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Sorted site ids.
    pub sites: Vec<usize>,
    /// Holds at least one surviving gateway.
    pub accessible: bool,
}

/// Connected components of the network left after a failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessibleSubnetworks {
    pub components: Vec<Component>,
}

impl AccessibleSubnetworks {
    /// Whether `site` survived and sits in a component with a gateway.
    pub fn is_accessible(&self, site: usize) -> bool {
        self.components
            .iter()
            .any(|c| c.accessible && c.sites.binary_search(&site).is_ok())
    }
}

/// Components of the graph with `srg`'s sites and links removed, ordered by
/// their smallest site id.
pub fn accessible_subnetworks(t: &Topology, srg: &Srg) -> AccessibleSubnetworks {
    let n = t.site_count();
    let mut seen = vec![false; n];
    for &s in &srg.nodes {
        seen[s] = true;
    }
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut sites = Vec::new();
        while let Some(v) = stack.pop() {
            sites.push(v);
            for &(w, link) in t.neighbors(v) {
                if !seen[w] && !srg.contains_link(link) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        sites.sort_unstable();
        let accessible = sites.iter().any(|&s| t.is_gateway(s));
        components.push(Component { sites, accessible });
    }
    AccessibleSubnetworks { components }
}

/// `|F| x |D|` matrix whose entry `(f, i)` is true when site `i` is still
/// reachable from a gateway after group `f` fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisconnectionMatrix {
    srgs: usize,
    sites: usize,
    cells: Vec<bool>,
}

impl DisconnectionMatrix {
    pub fn from_rows(sites: usize, rows: &[Vec<bool>]) -> Result<Self> {
        let mut cells = Vec::with_capacity(rows.len() * sites);
        for row in rows {
            if row.len() != sites {
                return Err(Error::DimensionMismatch { expected: sites, found: row.len() });
            }
            cells.extend_from_slice(row);
        }
        Ok(DisconnectionMatrix { srgs: rows.len(), sites, cells })
    }

    pub fn srg_count(&self) -> usize {
        self.srgs
    }

    pub fn site_count(&self) -> usize {
        self.sites
    }

    pub fn accessible(&self, srg: usize, site: usize) -> bool {
        self.cells[srg * self.sites + site]
    }

    pub fn row(&self, srg: usize) -> &[bool] {
        &self.cells[srg * self.sites..(srg + 1) * self.sites]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        (0..self.srgs).map(move |f| self.row(f))
    }
}

pub fn disconnection_matrix(t: &Topology, catalog: &SrgCatalog) -> DisconnectionMatrix {
    let n = t.site_count();
    let mut cells = vec![false; catalog.len() * n];
    for (f, srg) in catalog.srgs().iter().enumerate() {
        let parts = accessible_subnetworks(t, srg);
        for c in parts.components.iter().filter(|c| c.accessible) {
            for &s in &c.sites {
                cells[f * n + s] = true;
            }
        }
    }
    DisconnectionMatrix { srgs: catalog.len(), sites: n, cells }
}
