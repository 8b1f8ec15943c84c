//! Candidate sites, WAN links and propagation delays.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Propagation speed in optical fiber, meters per second.
pub const DEFAULT_SPEED_MPS: f64 = 2.0e8;

#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub id: usize,
    pub name: String,
    /// Decimal degrees.
    pub lat: f64,
    pub lon: f64,
    pub gateway: bool,
    /// Maximum number of racks the site supports, when the input sets one.
    pub capacity: Option<u32>,
}

impl Site {
    pub fn new(id: usize, name: impl Into<String>, lat: f64, lon: f64, gateway: bool) -> Self {
        Site { id, name: name.into(), lat, lon, gateway, capacity: None }
    }

    pub fn with_capacity(mut self, capacity: u32) -> Self {
        self.capacity = Some(capacity);
        self
    }

    fn check_coordinates(&self) -> Result<()> {
        let ok = self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCoordinates { site: self.id, lat: self.lat, lon: self.lon })
        }
    }
}

/// Undirected link between two sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    /// Explicit length; when absent the great-circle distance between the
    /// endpoints is used.
    pub length_km: Option<f64>,
}

impl Link {
    pub fn new(a: usize, b: usize) -> Self {
        Link { a, b, length_km: None }
    }

    pub fn with_length(a: usize, b: usize, length_km: f64) -> Self {
        Link { a, b, length_km: Some(length_km) }
    }

    pub fn other(&self, site: usize) -> usize {
        if self.a == site {
            self.b
        } else {
            self.a
        }
    }
}

/// Great-circle distance in kilometers on a sphere of radius [`EARTH_RADIUS_KM`].
pub fn haversine_km(lat_a: f64, lon_a: f64, lat_b: f64, lon_b: f64) -> f64 {
    let (phi_a, phi_b) = (lat_a.to_radians(), lat_b.to_radians());
    let d_phi = phi_b - phi_a;
    let d_lambda = (lon_b - lon_a).to_radians();
    let h = libm::pow(libm::sin(d_phi / 2.0), 2.0)
        + libm::cos(phi_a) * libm::cos(phi_b) * libm::pow(libm::sin(d_lambda / 2.0), 2.0);
    // rounding can push h marginally above 1 for antipodal points
    let h = h.clamp(0.0, 1.0);
    2.0 * EARTH_RADIUS_KM * libm::asin(libm::sqrt(h))
}

/// Straight-line link length between two sites, in kilometers.
pub fn link_length(a: &Site, b: &Site) -> Result<f64> {
    a.check_coordinates()?;
    b.check_coordinates()?;
    Ok(haversine_km(a.lat, a.lon, b.lat, b.lon))
}

/// Propagation delay in milliseconds for `length_km` at `speed_mps`.
pub fn delay_of_length(length_km: f64, speed_mps: f64) -> Result<f64> {
    if !(speed_mps.is_finite() && speed_mps > 0.0) {
        return Err(Error::InvalidSpeed(speed_mps));
    }
    if !(length_km.is_finite() && length_km >= 0.0) {
        return Err(Error::InvalidLength(length_km));
    }
    Ok(length_km * 1.0e6 / speed_mps)
}

/// A validated WAN: dense site ids, existing distinct link endpoints, at least
/// one gateway, and every site able to reach a gateway.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    sites: Vec<Site>,
    links: Vec<Link>,
    lengths_km: Vec<f64>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Topology {
    pub fn new(mut sites: Vec<Site>, links: Vec<Link>) -> Result<Self> {
        sites.sort_by_key(|s| s.id);
        for (expected, site) in sites.iter().enumerate() {
            if expected > 0 && sites[expected - 1].id == site.id {
                return Err(Error::DuplicateSiteId(site.id));
            }
            if site.id != expected {
                return Err(Error::SiteIdsNotDense { expected, found: site.id });
            }
            site.check_coordinates()?;
        }

        let n = sites.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut lengths_km = Vec::with_capacity(links.len());
        let mut seen = Vec::with_capacity(links.len());
        for (idx, link) in links.iter().enumerate() {
            for end in [link.a, link.b] {
                if end >= n {
                    return Err(Error::UnknownSite(end));
                }
            }
            if link.a == link.b {
                return Err(Error::SelfLoop { link: idx, site: link.a });
            }
            let key = (link.a.min(link.b), link.a.max(link.b));
            seen.push(key);
            let length = match link.length_km {
                Some(len) if len.is_finite() && len >= 0.0 => len,
                Some(len) => return Err(Error::InvalidLinkLength { link: idx, length_km: len }),
                None => link_length(&sites[link.a], &sites[link.b])?,
            };
            lengths_km.push(length);
            adjacency[link.a].push((link.b, idx));
            adjacency[link.b].push((link.a, idx));
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLink { a: w[0].0, b: w[0].1 });
        }

        let topology = Topology { sites, links, lengths_km, adjacency };
        topology.check_gateway_reachability()?;
        Ok(topology)
    }

    fn check_gateway_reachability(&self) -> Result<()> {
        let n = self.sites.len();
        if !self.sites.iter().any(|s| s.gateway) {
            return Err(Error::NoGateway);
        }
        let mut reached = vec![false; n];
        let mut queue: Vec<usize> = self.sites.iter().filter(|s| s.gateway).map(|s| s.id).collect();
        for &g in &queue {
            reached[g] = true;
        }
        while let Some(v) = queue.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !reached[w] {
                    reached[w] = true;
                    queue.push(w);
                }
            }
        }
        match reached.iter().position(|r| !r) {
            Some(site) => Err(Error::GatewayUnreachable { site, name: self.sites[site].name.clone() }),
            None => Ok(()),
        }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Length of link `idx` in kilometers, explicit or derived.
    pub fn link_length_km(&self, idx: usize) -> f64 {
        self.lengths_km[idx]
    }

    /// `(neighbor, link index)` pairs incident to `site`.
    pub fn neighbors(&self, site: usize) -> &[(usize, usize)] {
        &self.adjacency[site]
    }

    pub fn is_gateway(&self, site: usize) -> bool {
        self.sites[site].gateway
    }
}

/// All-pairs shortest-path propagation delays in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayMatrix {
    n: usize,
    delays: Vec<f64>,
    l_max: f64,
}

impl DelayMatrix {
    /// Builds a matrix from a row-major `n * n` buffer. The buffer must already
    /// be symmetric with a zero diagonal.
    pub fn from_rows(n: usize, delays: Vec<f64>) -> Result<Self> {
        if delays.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: delays.len() });
        }
        let l_max = delays.iter().copied().fold(0.0, f64::max);
        Ok(DelayMatrix { n, delays, l_max })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.delays[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.delays[i * self.n..(i + 1) * self.n]
    }

    /// Largest delay between any two sites, active or not.
    pub fn l_max(&self) -> f64 {
        self.l_max
    }

    /// Sorted, de-duplicated delay values of all pairs, including zero.
    pub fn distinct_values(&self) -> Vec<f64> {
        let mut values = vec![0.0];
        for i in 0..self.n {
            for j in i + 1..self.n {
                values.push(self.get(i, j));
            }
        }
        values.sort_by(f64::total_cmp);
        values.dedup_by(|b, a| *b - *a <= crate::DELAY_TOLERANCE_MS);
        values
    }
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(t: &Topology, link_delay: &[f64], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; t.site_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier(0.0, source));
    while let Some(Frontier(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, link) in t.neighbors(v) {
            let nd = d + link_delay[link];
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Frontier(nd, w));
            }
        }
    }
    dist
}

/// Shortest-path delays between every pair of sites, Dijkstra from each source.
pub fn delay_matrix(t: &Topology, speed_mps: f64) -> Result<DelayMatrix> {
    let link_delay = (0..t.link_count())
        .map(|l| delay_of_length(t.link_length_km(l), speed_mps))
        .collect::<Result<Vec<_>>>()?;
    let n = t.site_count();
    let mut delays = vec![0.0; n * n];
    for i in 0..n {
        let dist = dijkstra(t, &link_delay, i);
        for (j, d) in dist.into_iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::Disconnected { a: i.min(j), b: i.max(j) });
            }
            delays[i * n + j] = d;
        }
    }
    // force exact symmetry; both directions agree up to summation order
    for i in 0..n {
        for j in i + 1..n {
            let d = delays[i * n + j].min(delays[j * n + i]);
            delays[i * n + j] = d;
            delays[j * n + i] = d;
        }
        delays[i * n + i] = 0.0;
    }
    DelayMatrix::from_rows(n, delays)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(id: usize, lat: f64, lon: f64, gateway: bool) -> Site {
        Site::new(id, alloc::format!("s{id}"), lat, lon, gateway)
    }

    #[test]
    fn zero_distance_for_identical_coordinates() {
        assert_eq!(haversine_km(48.85, 2.35, 48.85, 2.35), 0.0);
    }

    #[test]
    fn half_circumference_along_equator() {
        // pi * 6371 km
        let expected = 20_015.086_796_020_572;
        let d = haversine_km(0.0, 0.0, 0.0, 180.0);
        assert!((d - expected).abs() < 1e-6, "{d}");
    }

    #[test]
    fn distance_is_symmetric() {
        let a = site(0, 50.11, 8.68, true);
        let b = site(1, 35.17, 33.36, false);
        assert_eq!(link_length(&a, &b).unwrap(), link_length(&b, &a).unwrap());
    }

    #[test]
    fn link_length_rejects_bad_coordinates() {
        let a = site(0, 91.0, 0.0, true);
        let b = site(1, 0.0, 0.0, false);
        assert!(matches!(link_length(&a, &b), Err(Error::InvalidCoordinates { site: 0, .. })));
    }

    #[test]
    fn delays_from_lengths() {
        assert!((delay_of_length(5581.0, DEFAULT_SPEED_MPS).unwrap() - 27.905).abs() < 1e-12);
        assert!((delay_of_length(2267.0, DEFAULT_SPEED_MPS).unwrap() - 11.335).abs() < 1e-12);
        assert_eq!(delay_of_length(0.0, DEFAULT_SPEED_MPS).unwrap(), 0.0);
        assert_eq!(delay_of_length(1.0, 0.0), Err(Error::InvalidSpeed(0.0)));
        assert_eq!(delay_of_length(1.0, -3.0), Err(Error::InvalidSpeed(-3.0)));
    }

    #[test]
    fn single_site_matrix() {
        let t = Topology::new(vec![site(0, 0.0, 0.0, true)], vec![]).unwrap();
        let d = delay_matrix(&t, DEFAULT_SPEED_MPS).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0, 0), 0.0);
        assert_eq!(d.l_max(), 0.0);
    }

    #[test]
    fn triangle_takes_the_detour() {
        let sites = vec![site(0, 0.0, 0.0, true), site(1, 0.0, 1.0, false), site(2, 0.0, 2.0, false)];
        let links = vec![
            Link::with_length(0, 1, 1000.0),
            Link::with_length(1, 2, 1000.0),
            Link::with_length(0, 2, 3000.0),
        ];
        let t = Topology::new(sites, links).unwrap();
        let d = delay_matrix(&t, DEFAULT_SPEED_MPS).unwrap();
        assert!((d.get(0, 2) - 10.0).abs() < 1e-9);
        assert!((d.l_max() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_path_sums_link_delays() {
        let sites = vec![site(0, 0.0, 0.0, true), site(1, 0.0, 1.0, false), site(2, 0.0, 3.0, false)];
        let t = Topology::new(sites, vec![Link::new(0, 1), Link::new(1, 2)]).unwrap();
        let d = delay_matrix(&t, DEFAULT_SPEED_MPS).unwrap();
        assert!((d.get(0, 2) - (d.get(0, 1) + d.get(1, 2))).abs() < 1e-9);
    }

    #[test]
    fn validation_errors() {
        let two = || vec![site(0, 0.0, 0.0, true), site(1, 1.0, 1.0, false)];
        assert_eq!(
            Topology::new(two(), vec![Link::new(0, 0)]).unwrap_err(),
            Error::SelfLoop { link: 0, site: 0 }
        );
        assert_eq!(
            Topology::new(two(), vec![Link::new(0, 1), Link::new(1, 0)]).unwrap_err(),
            Error::DuplicateLink { a: 0, b: 1 }
        );
        assert_eq!(Topology::new(two(), vec![Link::new(0, 5)]).unwrap_err(), Error::UnknownSite(5));
        assert!(matches!(
            Topology::new(two(), vec![]).unwrap_err(),
            Error::GatewayUnreachable { site: 1, .. }
        ));
        let no_gw = vec![site(0, 0.0, 0.0, false)];
        assert_eq!(Topology::new(no_gw, vec![]).unwrap_err(), Error::NoGateway);
        let gap = vec![site(0, 0.0, 0.0, true), site(2, 0.0, 0.0, true)];
        assert_eq!(
            Topology::new(gap, vec![]).unwrap_err(),
            Error::SiteIdsNotDense { expected: 1, found: 2 }
        );
        let dup = vec![site(0, 0.0, 0.0, true), site(0, 0.0, 0.0, true)];
        assert_eq!(Topology::new(dup, vec![]).unwrap_err(), Error::DuplicateSiteId(0));
        assert!(matches!(
            Topology::new(two(), vec![Link::with_length(0, 1, -1.0)]).unwrap_err(),
            Error::InvalidLinkLength { link: 0, .. }
        ));
    }

    #[test]
    fn two_islands_with_gateways_are_rejected_by_delays() {
        let sites = vec![site(0, 0.0, 0.0, true), site(1, 1.0, 1.0, true)];
        let t = Topology::new(sites, vec![]).unwrap();
        assert_eq!(delay_matrix(&t, DEFAULT_SPEED_MPS).unwrap_err(), Error::Disconnected { a: 0, b: 1 });
    }

    #[test]
    fn colocated_sites_keep_zero_delay() {
        let sites = vec![site(0, 43.3, 5.37, true), site(1, 43.3, 5.37, false)];
        let t = Topology::new(sites, vec![Link::new(0, 1)]).unwrap();
        let d = delay_matrix(&t, DEFAULT_SPEED_MPS).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.distinct_values(), vec![0.0]);
    }
}
