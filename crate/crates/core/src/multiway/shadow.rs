//! Shadows and the torso contraction `I/Z`.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use thiserror::Error;

use super::{ArcSet, ArcTerminalInstance, ShadowMode, EXHAUSTIVE_LIMIT};
use crate::digraph::{Digraph, VertexSet};
use crate::search::SearchCtx;

/// Vertices outside `T ∪ X` that cannot reach `T` or cannot be reached
/// from `T` in `D - X`.
pub fn shadow_of(graph: &Digraph, t: &VertexSet, x: &VertexSet) -> VertexSet {
    let rest = graph.remove(x);
    let from = rest.reachable_from(t);
    let to = rest.reaching(t);
    rest.vertices()
        .filter(|v| !t.contains(v) && !(from.contains(v) && to.contains(v)))
        .collect()
}

/// Candidate sets `Z` disjoint from `y`. In exhaustive mode with at most
/// [`EXHAUSTIVE_LIMIT`] free vertices this is every subset, by size and
/// then lexicographically. Otherwise `Z = ∅` followed by `rounds` samples,
/// each drawing an inclusion probability from `1/2, 1/4, ..., 2^-(k+1)`.
pub fn candidate_shadow_sets(
    graph: &Digraph,
    y: &VertexSet,
    k: usize,
    mode: ShadowMode,
    rounds: usize,
    ctx: &SearchCtx,
) -> Vec<VertexSet> {
    let free: Vec<_> = graph.vertices().filter(|v| !y.contains(v)).collect();
    if mode == ShadowMode::Exhaustive && free.len() <= EXHAUSTIVE_LIMIT {
        let mut all: Vec<VertexSet> = (0u32..1 << free.len())
            .map(|mask| {
                free.iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        return all;
    }
    let mut seen = HashSet::new();
    let mut out = vec![VertexSet::new()];
    seen.insert(VertexSet::new());
    ctx.with_rng(|rng| {
        for _ in 0..rounds {
            let exponent = rng.gen_range(1..=k as i32 + 1);
            let p = 0.5f64.powi(exponent);
            let z: VertexSet = free.iter().copied().filter(|_| rng.gen_bool(p)).collect();
            if seen.insert(z.clone()) {
                out.push(z);
            }
        }
    });
    out
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("Z contains a closed walk through two arc sets")]
pub struct RejectZ;

/// The torso contraction: vertices of `Z` are removed, `u -> v` becomes an
/// arc when a walk from `u` to `v` with all inner vertices in `Z` exists,
/// and such an arc joins `A_i` when one of these walks uses an arc of `A_i`.
pub fn contract_shadow(inst: &ArcTerminalInstance, z: &VertexSet) -> Result<ArcTerminalInstance, RejectZ> {
    let graph = inst.graph();
    if z.is_empty() {
        return Ok(inst.clone());
    }
    let inner = graph.induced(z);
    if super::has_conflict(&inner, &restricted(inst.sets(), &inner), &VertexSet::new()) {
        return Err(RejectZ);
    }
    let n = graph.vertex_count();
    let in_z = graph.mask(z);
    let keep: Vec<usize> = (0..n).filter(|&i| !in_z[i]).collect();
    // forward[u]: u plus the Z-vertices reachable from u through Z only
    let closure = |u: usize, backward: bool| -> Vec<usize> {
        let mut seen = vec![false; n];
        let mut stack = vec![u];
        let mut out = vec![u];
        seen[u] = true;
        while let Some(a) = stack.pop() {
            let next = if backward { graph.pred(a) } else { graph.succ(a) };
            for &b in next {
                if in_z[b] && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                    out.push(b);
                }
            }
        }
        out
    };
    let forward: Vec<Vec<usize>> = keep.iter().map(|&u| closure(u, false)).collect();
    let backward: Vec<Vec<usize>> = keep.iter().map(|&v| closure(v, true)).collect();
    let mut local = vec![usize::MAX; n];
    for (j, &u) in keep.iter().enumerate() {
        local[u] = j;
    }
    let out: Vec<Vec<usize>> = forward
        .iter()
        .map(|fwd| {
            let targets: BTreeSet<usize> = fwd
                .iter()
                .flat_map(|&a| graph.succ(a).iter().copied())
                .filter(|&b| !in_z[b])
                .map(|b| local[b])
                .collect();
            targets.into_iter().collect()
        })
        .collect();
    let ids = keep.iter().map(|&i| graph.id(i)).collect();
    let contracted = Digraph::from_local(ids, out);
    let sets = inst
        .sets()
        .iter()
        .map(|set| {
            let tails = graph.mask(&set.tails);
            let heads = graph.mask(&set.heads);
            ArcSet {
                tails: keep
                    .iter()
                    .zip(&forward)
                    .filter(|(_, fwd)| fwd.iter().any(|&a| tails[a]))
                    .map(|(&u, _)| graph.id(u))
                    .collect(),
                heads: keep
                    .iter()
                    .zip(&backward)
                    .filter(|(_, back)| back.iter().any(|&b| heads[b]))
                    .map(|(&v, _)| graph.id(v))
                    .collect(),
            }
        })
        .collect();
    Ok(ArcTerminalInstance::from_parts(contracted, sets, inst.k(), inst.y().to_vec()))
}

fn restricted(sets: &[ArcSet], graph: &Digraph) -> Vec<ArcSet> {
    sets.iter().map(|s| s.restrict(graph)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{vset, Vertex};

    #[test]
    fn shadow_examples() {
        let path = Digraph::from_arcs(2, &[(0, 1)]);
        assert_eq!(shadow_of(&path, &vset([0]), &VertexSet::new()), vset([1]));
        let both = Digraph::from_arcs(2, &[(0, 1), (1, 0)]);
        assert_eq!(shadow_of(&both, &vset([0]), &VertexSet::new()), VertexSet::new());
        let line = Digraph::from_arcs(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert_eq!(shadow_of(&line, &vset([0]), &vset([1])), vset([2]));
    }

    #[test]
    fn exhaustive_family_is_the_powerset() {
        let g = Digraph::from_arcs(4, &[]);
        let family = candidate_shadow_sets(&g, &vset([0]), 2, ShadowMode::Exhaustive, 0, &SearchCtx::new(1));
        assert_eq!(family.len(), 8);
        assert_eq!(family[0], VertexSet::new());
        assert!(family.iter().all(|z| !z.contains(&Vertex(0))));
    }

    #[test]
    fn random_family_is_seeded() {
        let g = Digraph::from_arcs(20, &[]);
        let a = candidate_shadow_sets(&g, &vset([0]), 2, ShadowMode::Random, 30, &SearchCtx::new(7));
        let b = candidate_shadow_sets(&g, &vset([0]), 2, ShadowMode::Random, 30, &SearchCtx::new(7));
        assert_eq!(a, b);
        assert_eq!(a[0], VertexSet::new());
    }

    #[test]
    fn contraction_bridges_z() {
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 2)]);
        let inst = ArcTerminalInstance::new(g, vec![ArcSet { tails: vset([0]), heads: vset([1]) }], 1).unwrap();
        assert_eq!(contract_shadow(&inst, &VertexSet::new()).unwrap(), inst);
        let c = contract_shadow(&inst, &vset([1])).unwrap();
        assert!(c.graph().has_arc(Vertex(0), Vertex(2)));
        assert_eq!(c.sets()[0], ArcSet { tails: vset([0]), heads: vset([2]) });
    }

    #[test]
    fn conflicting_z_is_rejected() {
        let g = Digraph::from_arcs(2, &[(0, 1), (1, 0)]);
        let sets = vec![
            ArcSet { tails: vset([0]), heads: vset([1]) },
            ArcSet { tails: vset([1]), heads: vset([0]) },
        ];
        let inst = ArcTerminalInstance::new(g, sets, 1).unwrap();
        assert_eq!(contract_shadow(&inst, &vset([0, 1])), Err(RejectZ));
        assert!(contract_shadow(&inst, &vset([1])).is_ok());
    }
}
