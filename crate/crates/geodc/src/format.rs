//! JSON topology and placement files, CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use geodc_core::{
    DelayMatrix, DisconnectionMatrix, Link, MetricReport, ParetoPoint, Placement, Site, SrgCatalog,
    Topology,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteRecord {
    pub id: usize,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub gateway: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRecord {
    pub a: usize,
    pub b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_km: Option<f64>,
}

/// Nodes are site ids; links are positions in the file's link list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrgRecord {
    #[serde(default)]
    pub nodes: Vec<usize>,
    #[serde(default)]
    pub links: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrgFile {
    pub srgs: Vec<SrgRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyFile {
    pub sites: Vec<SiteRecord>,
    pub links: Vec<LinkRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub srgs: Option<Vec<SrgRecord>>,
}

impl TopologyFile {
    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?).map_err(|source| Error::Parse { path: path.into(), source })
    }

    pub fn topology(&self) -> Result<Topology> {
        let sites = self
            .sites
            .iter()
            .map(|s| {
                let site = Site::new(s.id, s.name.clone(), s.lat, s.lon, s.gateway);
                match s.capacity {
                    Some(z) => site.with_capacity(z),
                    None => site,
                }
            })
            .collect();
        let links = self
            .links
            .iter()
            .map(|l| match l.length_km {
                Some(km) => Link::with_length(l.a, l.b, km),
                None => Link::new(l.a, l.b),
            })
            .collect();
        Ok(Topology::new(sites, links)?)
    }

    /// The file's own groups, if it has any.
    pub fn catalog(&self, t: &Topology) -> Result<Option<SrgCatalog>> {
        self.srgs.as_deref().map(|groups| srg_catalog(t, groups)).transpose()
    }
}

impl From<&Topology> for TopologyFile {
    fn from(t: &Topology) -> Self {
        TopologyFile {
            sites: t
                .sites()
                .iter()
                .map(|s| SiteRecord {
                    id: s.id,
                    name: s.name.clone(),
                    lat: s.lat,
                    lon: s.lon,
                    gateway: s.gateway,
                    capacity: s.capacity,
                })
                .collect(),
            links: t.links().iter().map(|l| LinkRecord { a: l.a, b: l.b, length_km: l.length_km }).collect(),
            srgs: None,
        }
    }
}

pub fn srg_catalog(t: &Topology, groups: &[SrgRecord]) -> Result<SrgCatalog> {
    let groups = groups.iter().map(|g| (g.nodes.clone(), g.links.clone())).collect();
    Ok(SrgCatalog::from_groups(t, groups)?)
}

pub fn load_srg_file(path: &Path, t: &Topology) -> Result<SrgCatalog> {
    let file: SrgFile =
        serde_json::from_str(&read(path)?).map_err(|source| Error::Parse { path: path.into(), source })?;
    srg_catalog(t, &file.srgs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementFile {
    pub racks: BTreeMap<usize, u32>,
}

impl PlacementFile {
    /// Active sites only, in ascending id order.
    pub fn from_placement(p: &Placement) -> Self {
        PlacementFile { racks: p.active_sites().map(|i| (i, p.racks()[i])).collect() }
    }

    pub fn placement(&self, sites: usize) -> Result<Placement> {
        let mut racks = vec![0; sites];
        for (&id, &count) in &self.racks {
            *racks.get_mut(id).ok_or(Error::UnknownPlacementSite(id))? = count;
        }
        Ok(Placement::new(racks))
    }

    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read(path)?).map_err(|source| Error::Parse { path: path.into(), source })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("placement serializes");
        s.push('\n');
        s
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.into(), source })
}

/// Six fractional digits, never a negative zero.
pub fn decimal(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub const PARETO_HEADER: &str = "beta,survivability,latency_ms,normalized_latency,active_sites";

pub fn pareto_csv(points: &[ParetoPoint]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Invalid("no Pareto points to emit".into()));
    }
    let mut points: Vec<&ParetoPoint> = points.iter().collect();
    points.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(PARETO_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            decimal(p.beta),
            decimal(p.survivability),
            decimal(p.latency_ms),
            decimal(p.normalized_latency),
            p.active_sites
        );
    }
    Ok(out)
}

pub fn delays_csv(t: &Topology, d: &DelayMatrix) -> String {
    let mut out = String::from("site");
    for s in t.sites() {
        let _ = write!(out, ",{}", s.id);
    }
    out.push('\n');
    for i in 0..d.len() {
        out.push_str(&i.to_string());
        for &v in d.row(i) {
            out.push(',');
            out.push_str(&decimal(v));
        }
        out.push('\n');
    }
    out
}

/// One row per group, one column per site; 1 means the site stays accessible.
pub fn disconnection_csv(m: &DisconnectionMatrix) -> String {
    let mut out = String::from("srg");
    for i in 0..m.site_count() {
        let _ = write!(out, ",{i}");
    }
    out.push('\n');
    for (f, row) in m.rows().enumerate() {
        out.push_str(&f.to_string());
        for &ok in row {
            out.push_str(if ok { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub survivability: f64,
    pub accessible_racks: u64,
    pub total_racks: u64,
    pub latency_ms: f64,
    pub normalized_latency: f64,
    pub worst_srg: Option<usize>,
    pub worst_pair: [usize; 2],
    pub active_sites: usize,
}

impl From<&MetricReport> for ReportJson {
    fn from(r: &MetricReport) -> Self {
        ReportJson {
            survivability: r.survivability,
            accessible_racks: r.accessible_racks,
            total_racks: r.total_racks,
            latency_ms: r.latency_ms,
            normalized_latency: r.normalized_latency,
            worst_srg: r.worst_srg,
            worst_pair: [r.worst_pair.0, r.worst_pair.1],
            active_sites: r.active_sites,
        }
    }
}

pub const REPORT_CSV_HEADER: &str = "survivability,latency_ms,normalized_latency,active_sites";

pub fn report_csv_line(r: &MetricReport) -> String {
    format!(
        "{},{},{},{}\n",
        decimal(r.survivability),
        decimal(r.latency_ms),
        decimal(r.normalized_latency),
        r.active_sites
    )
}
