//! Seeded instance generators.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, Kind, MultiwayInstance};
use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::exact_kl::MulticutInstance;
use crate::multiway::encode_multiway;

/// Each ordered pair `u != v` becomes an arc with probability `p`.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Digraph {
    let p = p.clamp(0.0, 1.0);
    let mut arcs = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u != v && rng.gen_bool(p) {
                arcs.push((Vertex(u), Vertex(v)));
            }
        }
    }
    Digraph::new((0..n as u32).map(Vertex), arcs).expect("endpoints in range")
}

/// `count` distinct ordered pairs `(s, t)`, `s != t`, sorted.
pub fn random_pairs(rng: &mut ChaCha8Rng, pool: &[(Vertex, Vertex)], count: usize) -> Vec<(Vertex, Vertex)> {
    let mut picked: Vec<(Vertex, Vertex)> = sample(rng, pool.len(), count.min(pool.len()))
        .into_iter()
        .map(|i| pool[i])
        .collect();
    picked.sort();
    picked
}

fn all_pairs(n: usize) -> Vec<(Vertex, Vertex)> {
    let mut pool = Vec::new();
    for s in 0..n as u32 {
        for t in 0..n as u32 {
            if s != t {
                pool.push((Vertex(s), Vertex(t)));
            }
        }
    }
    pool
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, count: usize) -> VertexSet {
    sample(rng, n, count.min(n)).into_iter().map(|i| Vertex(i as u32)).collect()
}

/// A random instance of the given kind. `count` is the number of requests,
/// terminals or arc sets.
pub fn gen_random(kind: Kind, n: usize, p: f64, count: usize, k: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_digraph(&mut rng, n, p);
    match kind {
        Kind::Multicut => {
            let requests = random_pairs(&mut rng, &all_pairs(n), count);
            Instance::Multicut(MulticutInstance::new(graph, requests, k).expect("pairs are distinct vertices"))
        }
        Kind::Multiway => {
            let terminals = random_subset(&mut rng, n, count);
            Instance::Multiway(MultiwayInstance { graph, terminals, k })
        }
        Kind::ArcTerminal => {
            let terminals = random_subset(&mut rng, n, count);
            Instance::ArcTerminal(encode_multiway(&graph, &terminals, k).expect("terminals are vertices"))
        }
    }
}

/// An instance on which a planted set of `k_true` vertices is a solution.
///
/// The other vertices are split into layers; arcs inside a layer are
/// arbitrary, arcs between layers only go forward, and requests or terminals
/// sit in distinct layers. Arcs into and out of the planted set are then
/// added freely, so the planted set meets every cycle that crosses layers.
pub fn gen_planted(kind: Kind, n: usize, k_true: usize, count: usize, seed: u64) -> (Instance, VertexSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_true = k_true.min(n);
    let planted = random_subset(&mut rng, n, k_true);
    let mut rest: Vec<Vertex> = (0..n as u32).map(Vertex).filter(|v| !planted.contains(v)).collect();
    rest.shuffle(&mut rng);
    let layers = count.max(2) + rng.gen_range(0..=1);
    let mut layer = vec![usize::MAX; n];
    for (i, v) in rest.iter().enumerate() {
        layer[v.0 as usize] = if i < layers { i } else { rng.gen_range(0..layers) };
    }
    let mut arcs = Vec::new();
    for &u in &rest {
        for &v in &rest {
            let (lu, lv) = (layer[u.0 as usize], layer[v.0 as usize]);
            let p = if u == v {
                0.0
            } else if lu == lv {
                0.5
            } else if lu < lv {
                0.25
            } else {
                0.0
            };
            if rng.gen_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    for &x in &planted {
        for v in 0..n as u32 {
            let v = Vertex(v);
            if v == x {
                continue;
            }
            if rng.gen_bool(0.4) {
                arcs.push((x, v));
            }
            if rng.gen_bool(0.4) {
                arcs.push((v, x));
            }
        }
    }
    let graph = Digraph::new((0..n as u32).map(Vertex), arcs).expect("endpoints in range");
    let inst = match kind {
        Kind::Multicut => {
            let pool: Vec<(Vertex, Vertex)> = all_pairs(n)
                .into_iter()
                .filter(|&(s, t)| {
                    let (ls, lt) = (layer[s.0 as usize], layer[t.0 as usize]);
                    ls != usize::MAX && lt != usize::MAX && ls != lt
                })
                .collect();
            let requests = random_pairs(&mut rng, &pool, count);
            Instance::Multicut(MulticutInstance::new(graph, requests, k_true).expect("pairs are distinct vertices"))
        }
        Kind::Multiway | Kind::ArcTerminal => {
            // one terminal in each of the first `count` layers
            let mut terminals = VertexSet::new();
            for l in 0..count.min(layers) {
                let members: Vec<Vertex> = rest.iter().copied().filter(|v| layer[v.0 as usize] == l).collect();
                if let Some(&t) = members.choose(&mut rng) {
                    terminals.insert(t);
                }
            }
            if kind == Kind::Multiway {
                Instance::Multiway(MultiwayInstance { graph, terminals, k: k_true })
            } else {
                Instance::ArcTerminal(encode_multiway(&graph, &terminals, k_true).expect("terminals are vertices"))
            }
        }
    };
    (inst, planted)
}
