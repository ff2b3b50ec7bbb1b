//! Skew vertex multicut.
//!
//! Pairs `(s_1, t_1), ..., (s_r, t_r)` are given in order and every
//! `(s_j, t_i)`-path with `j >= i` must be cut. Terminals are never deleted.
//!
//! The solver branches on the last pair: some optimal solution contains an
//! important `(s_r, {t_1, ..., t_r})`-cut, since pushing that part of a
//! solution away from `s_r` cannot reopen a path between earlier pairs.

use crate::cuts::important_cut_sets;
use crate::digraph::{Digraph, GraphError, Vertex, VertexSet};
use crate::search::{SearchCtx, SearchResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewInstance {
    graph: Digraph,
    pairs: Vec<(Vertex, Vertex)>,
    k: usize,
}

impl SkewInstance {
    pub fn new(graph: Digraph, pairs: Vec<(Vertex, Vertex)>, k: usize) -> Result<Self, GraphError> {
        for &(s, t) in &pairs {
            for v in [s, t] {
                if !graph.contains(v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
        }
        Ok(SkewInstance { graph, pairs, k })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.pairs
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terminals(&self) -> VertexSet {
        self.pairs.iter().flat_map(|&(s, t)| [s, t]).collect()
    }

    /// Whether `x` avoids the terminals, fits the budget, and cuts every
    /// forbidden path.
    pub fn is_solution(&self, x: &VertexSet) -> bool {
        x.len() <= self.k && x.is_disjoint(&self.terminals()) && skew_paths_cut(&self.graph, &self.pairs, x)
    }
}

/// No `(s_j, t_i)`-path with `j >= i` survives in `D - x`.
pub fn skew_paths_cut(graph: &Digraph, pairs: &[(Vertex, Vertex)], x: &VertexSet) -> bool {
    let rest = graph.remove(x);
    pairs.iter().enumerate().all(|(j, &(s, _))| {
        if x.contains(&s) {
            return true;
        }
        let reach = rest.reachable_from(&[s].into());
        pairs[..=j].iter().all(|(_, t)| !reach.contains(t))
    })
}

pub fn solve_skew(inst: &SkewInstance) -> Option<VertexSet> {
    solve_skew_with(inst, &SearchCtx::default()).expect("no deadline set")
}

pub fn solve_skew_with(inst: &SkewInstance, ctx: &SearchCtx) -> SearchResult<Option<VertexSet>> {
    skew_search(&inst.graph, &inst.pairs, inst.k, ctx)
}

/// Smallest solution, found by raising the budget from zero.
pub fn solve_skew_min(inst: &SkewInstance) -> Option<VertexSet> {
    (0..=inst.k).find_map(|k| skew_search(&inst.graph, &inst.pairs, k, &SearchCtx::default()).expect("no deadline set"))
}

/// Branching search shared with the multicut solvers. Pair endpoints must be
/// vertices of `graph`.
pub(crate) fn skew_search(
    graph: &Digraph,
    pairs: &[(Vertex, Vertex)],
    k: usize,
    ctx: &SearchCtx,
) -> SearchResult<Option<VertexSet>> {
    let terminals: VertexSet = pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
    for (j, &(s, _)) in pairs.iter().enumerate() {
        if pairs[..=j].iter().any(|&(_, t)| t == s) {
            return Ok(None);
        }
    }
    branch(graph, pairs, &terminals, k, ctx, 0)
}

fn branch(
    graph: &Digraph,
    pairs: &[(Vertex, Vertex)],
    terminals: &VertexSet,
    k: usize,
    ctx: &SearchCtx,
    depth: usize,
) -> SearchResult<Option<VertexSet>> {
    ctx.tick()?;
    ctx.record_depth(depth);
    let Some((&(s, _), earlier)) = pairs.split_last() else {
        return Ok(Some(VertexSet::new()));
    };
    let sinks: VertexSet = pairs.iter().map(|&(_, t)| t).collect();
    let reach = graph.reachable_from(&[s].into());
    if reach.is_disjoint(&sinks) {
        return branch(graph, earlier, terminals, k, ctx, depth + 1);
    }
    ctx.count_cut_enumeration();
    for cut in important_cut_sets(graph, &[s].into(), &sinks, terminals, k) {
        let rest = graph.remove(&cut);
        if let Some(mut x) = branch(&rest, earlier, terminals, k - cut.len(), ctx, depth + 1)? {
            x.extend(cut);
            return Ok(Some(x));
        }
    }
    Ok(None)
}
