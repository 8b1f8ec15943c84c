#![allow(dead_code)]

use std::path::PathBuf;

use geodc::format::TopologyFile;
use geodc_core::{DesignInstance, Link, Site, Topology, DEFAULT_SPEED_MPS};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SAMPLES: [&str; 3] = ["rnp", "renater", "geant"];

pub fn sample_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(format!("{name}.json"))
}

pub fn sample_topology(name: &str) -> Topology {
    TopologyFile::load(&sample_path(name)).unwrap().topology().unwrap()
}

pub fn sample_instance(name: &str, racks: u32, capacity: u32) -> DesignInstance {
    DesignInstance::single_failures(sample_topology(name), DEFAULT_SPEED_MPS, racks, Some(capacity)).unwrap()
}

/// Connected topology on `n` sites with at most `max_links` links and at least one gateway.
pub fn random_topology(rng: &mut ChaCha8Rng, n: usize, max_links: usize) -> Topology {
    let mut sites: Vec<Site> = (0..n)
        .map(|i| Site::new(i, format!("s{i}"), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_bool(0.4)))
        .collect();
    let g = rng.gen_range(0..n);
    sites[g].gateway = true;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut links: Vec<Link> = (1..n).map(|k| Link::new(order[rng.gen_range(0..k)], order[k])).collect();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    for (a, b) in pairs {
        if links.len() >= max_links {
            break;
        }
        let taken = links.iter().any(|l| (l.a.min(l.b), l.a.max(l.b)) == (a, b));
        if !taken && rng.gen_bool(0.5) {
            links.push(Link::new(a, b));
        }
    }
    Topology::new(sites, links).unwrap()
}

/// Up to 7 sites, 12 links, 6 racks; uniform capacity in {1, 2, 3, 6}.
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
