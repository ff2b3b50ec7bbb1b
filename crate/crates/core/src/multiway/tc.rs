//! Candidate pairs `(I, T_c)`: a small set of arc-set indices containing the
//! one strongly connected to `y_r`, and a small vertex set containing every
//! head set that the optimum must delete entirely.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{ArcTerminalInstance, ShadowMode};
use crate::cuts::important_cut_sets;
use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::search::SearchCtx;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TcPair {
    pub indices: BTreeSet<usize>,
    pub tc: VertexSet,
}

/// Upper bound on `|I| + |T_c|` for budget `k`.
pub fn tc_size_bound(k: usize) -> u128 {
    (2 * k as u128 + 1) * 4u128.saturating_pow(2 * k as u32 + 1)
}

/// One pair per sampled set `U` of protected heads. Exhaustive mode uses
/// `U = ∅` and every singleton head; random mode keeps each vertex with
/// probability `1/(k+1)` in each of `samples` draws.
pub fn candidate_tc_pairs(
    inst: &ArcTerminalInstance,
    mode: ShadowMode,
    samples: usize,
    ctx: &SearchCtx,
) -> Vec<TcPair> {
    let Some(&pivot) = inst.y().last() else {
        return Vec::new();
    };
    let heads: VertexSet = inst.sets().iter().flat_map(|s| s.heads.iter().copied()).collect();
    let mut family: Vec<VertexSet> = vec![VertexSet::new()];
    if mode == ShadowMode::Exhaustive {
        family.extend(heads.iter().map(|&v| VertexSet::from([v])));
    } else {
        let p = 1.0 / (inst.k() as f64 + 1.0);
        ctx.with_rng(|rng| {
            for _ in 0..samples {
                family.push(inst.graph().vertices().filter(|_| rng.gen_bool(p)).collect());
            }
        });
    }
    let mut pairs: Vec<TcPair> = Vec::new();
    for u in family {
        ctx.count_cut_enumeration();
        let pair = tc_pair_for(inst, pivot, &u);
        debug_assert!((pair.indices.len() + pair.tc.len()) as u128 <= tc_size_bound(inst.k()));
        if !pairs.contains(&pair) {
            pairs.push(pair);
        }
    }
    pairs
}

/// Builds the auxiliary graph for one `U` and collects the union of its
/// important `(s, t)`-cuts of size at most `2k + 1`.
fn tc_pair_for(inst: &ArcTerminalInstance, pivot: Vertex, u: &VertexSet) -> TcPair {
    let graph = inst.graph();
    let k = inst.k();
    let n = graph.vertex_count() as u32;
    let ell = inst.sets().len() as u32;
    let s = Vertex(0);
    let t = Vertex(1);
    let plus = |i: usize| Vertex(2 + 2 * i as u32);
    let minus = |i: usize| Vertex(3 + 2 * i as u32);
    let z = |i: usize| Vertex(2 + 2 * n + i as u32);
    let mut next = 2 + 2 * n + ell;
    // local index of the vertex owning each v^- copy
    let mut minus_copies: Vec<Vec<Vertex>> = (0..graph.vertex_count()).map(|i| vec![minus(i)]).collect();
    let mut owner: BTreeMap<Vertex, usize> = (0..graph.vertex_count()).map(|i| (minus(i), i)).collect();
    for &v in u {
        let Some(i) = graph.index_of(v) else { continue };
        for _ in 1..2 * k + 2 {
            let twin = Vertex(next);
            next += 1;
            minus_copies[i].push(twin);
            owner.insert(twin, i);
        }
    }
    let mut arcs = vec![(s, plus(graph.index_of(pivot).expect("pivot is a vertex")))];
    for (a, copies) in minus_copies.iter().enumerate() {
        for &b in graph.succ(a) {
            arcs.push((plus(a), plus(b)));
        }
        for &copy in copies {
            arcs.push((copy, t));
        }
    }
    for (j, set) in inst.sets().iter().enumerate() {
        for &v in &set.tails {
            arcs.push((plus(graph.index_of(v).expect("tail is a vertex")), z(j)));
        }
        for &v in &set.heads {
            for &copy in &minus_copies[graph.index_of(v).expect("head is a vertex")] {
                arcs.push((z(j), copy));
            }
        }
    }
    let aux = Digraph::new((0..next).map(Vertex), arcs).expect("arcs use fresh ids");
    let mut indices = BTreeSet::new();
    let mut tc = VertexSet::new();
    for cut in important_cut_sets(&aux, &[s].into(), &[t].into(), &VertexSet::new(), 2 * k + 1) {
        for w in cut {
            if let Some(&i) = owner.get(&w) {
                tc.insert(graph.id(i));
            } else if w.0 >= 2 + 2 * n && w.0 < 2 + 2 * n + ell {
                indices.insert((w.0 - 2 - 2 * n) as usize);
            }
        }
    }
    TcPair { indices, tc }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::vset;
    use crate::multiway::ArcSet;

    #[test]
    fn no_terminal_arcs_give_empty_pairs() {
        let g = Digraph::from_arcs(2, &[(0, 1), (1, 0)]);
        let inst = ArcTerminalInstance::new(g, vec![], 1)
            .unwrap()
            .with_compression(vec![Vertex(0)])
            .unwrap();
        let pairs = candidate_tc_pairs(&inst, ShadowMode::Exhaustive, 0, &SearchCtx::new(0));
        assert_eq!(pairs, vec![TcPair { indices: BTreeSet::new(), tc: VertexSet::new() }]);
    }

    #[test]
    fn pivot_set_index_is_found() {
        // y = 0 owns A_0 = {0} x {1}; 1 -> 2 leads into A_1 = {2} x {0}
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]);
        let sets = vec![
            ArcSet { tails: vset([0]), heads: vset([1]) },
            ArcSet { tails: vset([2]), heads: vset([0]) },
        ];
        let inst = ArcTerminalInstance::new(g, sets, 1).unwrap();
        let inst = ArcTerminalInstance::from_parts(inst.graph().clone(), inst.sets().to_vec(), 1, vec![Vertex(0)]);
        let pairs = candidate_tc_pairs(&inst, ShadowMode::Exhaustive, 0, &SearchCtx::new(0));
        assert!(pairs.iter().any(|p| p.indices.contains(&0)));
        for p in &pairs {
            assert!((p.indices.len() + p.tc.len()) as u128 <= tc_size_bound(1));
        }
    }
}
