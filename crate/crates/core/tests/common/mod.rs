#![allow(dead_code)]

use geodc_core::{DesignInstance, Link, Site, Topology, DEFAULT_SPEED_MPS};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn site(id: usize, lat: f64, lon: f64, gateway: bool) -> Site {
    Site::new(id, format!("s{id}"), lat, lon, gateway)
}

/// Connected topology with `n` sites and up to `max_links` links, at least one gateway.
pub fn random_topology(rng: &mut ChaCha8Rng, n: usize, max_links: usize) -> Topology {
    let sites: Vec<Site> = (0..n)
        .map(|i| site(i, rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_bool(0.4)))
        .collect();
    let mut sites = sites;
    let g = rng.gen_range(0..n);
    sites[g].gateway = true;

    // random spanning tree, then extra links
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut links: Vec<Link> = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        links.push(Link::new(parent, order[k]));
    }
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    for (a, b) in pairs {
        if links.len() >= max_links.max(n.saturating_sub(1)) {
            break;
        }
        if links.iter().any(|l| (l.a.min(l.b), l.a.max(l.b)) == (a, b)) {
            continue;
        }
        if rng.gen_bool(0.5) {
            links.push(Link::new(a, b));
        }
    }
    Topology::new(sites, links).expect("generated topology is valid")
}

/// Tiny instance: up to 7 sites, 12 links, 6 racks, uniform capacity in {1, 2, 3, 6}.
pub fn random_tiny_instance(rng: &mut ChaCha8Rng) -> DesignInstance {
    loop {
        let n = rng.gen_range(1..=7);
        let racks = rng.gen_range(1..=6);
        let cap = *[1u32, 2, 3, 6].choose(rng).unwrap();
        if (n as u32) * cap < racks {
            continue;
        }
        let t = random_topology(rng, n, 12);
        return DesignInstance::single_failures(t, DEFAULT_SPEED_MPS, racks, Some(cap)).unwrap();
    }
}

/// Exhaustive simple-path enumeration; minimum total length between every pair, km.
pub fn brute_force_distances(t: &Topology) -> Vec<Vec<f64>> {
    let n = t.site_count();
    let mut best = vec![vec![f64::INFINITY; n]; n];
    fn walk(t: &Topology, start: usize, v: usize, len: f64, seen: &mut Vec<bool>, best: &mut Vec<Vec<f64>>) {
        if len < best[start][v] {
            best[start][v] = len;
        }
        for &(w, l) in t.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                walk(t, start, w, len + t.link_length_km(l), seen, best);
                seen[w] = false;
            }
        }
    }
    for s in 0..n {
        let mut seen = vec![false; n];
        seen[s] = true;
        walk(t, s, s, 0.0, &mut seen, &mut best);
    }
    best
}
