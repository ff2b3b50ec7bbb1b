//! 2-approximation for Symmetric Directed Vertex Multicut.
//!
//! Iterative compression reduces the problem to improving a known solution
//! `Y`. The compression step guesses how `Y` sits in an optimal solution
//! (deleted part `Y_0`, strongly connected groups `Y_1, ..., Y_r` in
//! topological order), cuts all back-paths between the groups with a skew
//! multicut `X_0`, and then solves every remaining strongly connected
//! component exactly around its single center `y_i`. Both `X_0` and the
//! component solutions are bounded by `k`, which gives the factor two.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::cuts::{enumerate_anti_important, enumerate_important};
use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::exact_kl::{separates_requests, validate_solution, visit_partitions, MulticutInstance};
use crate::search::{SearchCtx, SearchResult};
use crate::skew::{skew_paths_cut, skew_search};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApproxOutcome {
    Solution(VertexSet),
    NoSolutionAtMostK,
}

impl ApproxOutcome {
    pub fn solution(&self) -> Option<&VertexSet> {
        match self {
            ApproxOutcome::Solution(x) => Some(x),
            ApproxOutcome::NoSolutionAtMostK => None,
        }
    }
}

/// A problem that iterative compression can be run on.
pub trait Compressible: Sized {
    fn graph(&self) -> &Digraph;
    fn budget(&self) -> usize;
    /// The instance induced by `keep`; constraints that mention a vertex
    /// outside `keep` are dropped.
    fn restrict(&self, keep: &VertexSet) -> Self;
    /// Whether `x` satisfies every constraint, ignoring its size.
    fn accepts(&self, x: &VertexSet) -> bool;
}

impl Compressible for MulticutInstance {
    fn graph(&self) -> &Digraph {
        MulticutInstance::graph(self)
    }

    fn budget(&self) -> usize {
        self.k()
    }

    fn restrict(&self, keep: &VertexSet) -> Self {
        let requests = self
            .requests()
            .iter()
            .copied()
            .filter(|(s, t)| keep.contains(s) && keep.contains(t))
            .collect();
        MulticutInstance::new(self.graph().induced(keep), requests, self.k()).expect("restriction keeps endpoints")
    }

    fn accepts(&self, x: &VertexSet) -> bool {
        separates_requests(MulticutInstance::graph(self), self.requests(), x)
    }
}

/// Adds vertices one at a time in id order, keeping a solution of size at
/// most `alpha * k` for the induced prefix. When the previous solution plus
/// the new vertex is too large, `compress` is asked to shrink it; `None`
/// from `compress` means the prefix, and so the whole instance, has no
/// solution of size at most `k`.
pub fn iterative_compression<P: Compressible>(
    inst: &P,
    alpha: usize,
    ctx: &SearchCtx,
    mut compress: impl FnMut(&P, &[Vertex]) -> SearchResult<Option<VertexSet>>,
) -> SearchResult<ApproxOutcome> {
    let bound = alpha * inst.budget();
    let mut keep = VertexSet::new();
    let mut x = VertexSet::new();
    for v in inst.graph().vertices() {
        ctx.tick()?;
        keep.insert(v);
        let prefix = inst.restrict(&keep);
        if prefix.accepts(&x) {
            continue;
        }
        x.insert(v);
        if x.len() <= bound {
            continue;
        }
        let y: Vec<Vertex> = x.iter().copied().collect();
        match compress(&prefix, &y)? {
            Some(smaller) => {
                debug_assert!(smaller.len() <= bound && prefix.accepts(&smaller));
                x = smaller;
            }
            None => return Ok(ApproxOutcome::NoSolutionAtMostK),
        }
    }
    Ok(ApproxOutcome::Solution(x))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompressionError {
    #[error("vertex {0} of Y is not in the graph")]
    UnknownVertex(Vertex),
    #[error("Y does not separate every request")]
    NotASolution,
    #[error("Y has {0} vertices, more than 2k + 1")]
    TooLarge(usize),
}

/// A multicut instance together with a known solution `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionInstance {
    inst: MulticutInstance,
    y: Vec<Vertex>,
}

impl CompressionInstance {
    pub fn new(inst: MulticutInstance, y: Vec<Vertex>) -> Result<Self, CompressionError> {
        if let Some(&v) = y.iter().find(|&&v| !inst.graph().contains(v)) {
            return Err(CompressionError::UnknownVertex(v));
        }
        if y.len() > 2 * inst.k() + 1 {
            return Err(CompressionError::TooLarge(y.len()));
        }
        if !inst.accepts(&y.iter().copied().collect()) {
            return Err(CompressionError::NotASolution);
        }
        Ok(CompressionInstance { inst, y })
    }

    pub fn instance(&self) -> &MulticutInstance {
        &self.inst
    }

    pub fn y(&self) -> &[Vertex] {
        &self.y
    }
}

pub fn compress_2approx(ci: &CompressionInstance) -> ApproxOutcome {
    match compress_2approx_with(&ci.inst, &ci.y, &SearchCtx::default()).expect("no deadline set") {
        Some(x) => ApproxOutcome::Solution(x),
        None => ApproxOutcome::NoSolutionAtMostK,
    }
}

/// A solution of size at most `2k`, or `None` when no solution of size at
/// most `k` exists.
pub(crate) fn compress_2approx_with(
    inst: &MulticutInstance,
    y: &[Vertex],
    ctx: &SearchCtx,
) -> SearchResult<Option<VertexSet>> {
    let k = inst.k();
    let y_requests: Vec<(Vertex, Vertex)> = inst.requests().to_vec();
    visit_partitions(y, &y_requests, k, |blocks| {
        ctx.tick()?;
        let deleted = &blocks[0];
        let budget = k - deleted.len();
        let rest = inst.graph().remove(deleted);
        let (contracted, map) = rest.contract(&blocks[1..]).expect("blocks are disjoint");
        let centers: Vec<Vertex> = blocks[1..].iter().map(|b| *b.iter().next().expect("nonempty block")).collect();
        let Some(x0) = skew_cut_of_y_with(&contracted, &centers, budget, ctx)? else {
            return Ok(ControlFlow::Continue(()));
        };
        let cut = contracted.remove(&x0);
        let requests: Vec<(Vertex, Vertex)> = inst
            .requests()
            .iter()
            .filter_map(|&(s, t)| Some((map.image_of(s)?, map.image_of(t)?)))
            .filter(|&(s, t)| s != t && cut.contains(s) && cut.contains(t))
            .collect();
        let mut spent = 0;
        let mut x1 = VertexSet::new();
        for comp in simplify_components(&cut, &requests, &centers) {
            let mut found = None;
            for ki in 0..=budget - spent {
                if let Some(part) = solve_single_center_with(&comp.graph, comp.center, &comp.requests, ki, ctx)? {
                    found = Some(part);
                    break;
                }
            }
            match found {
                Some(part) => {
                    spent += part.len();
                    x1.extend(part);
                }
                None => return Ok(ControlFlow::Continue(())),
            }
        }
        let mut x: VertexSet = deleted.clone();
        x.extend(x0);
        x.extend(x1);
        ctx.count_oracle_call();
        if x.len() <= 2 * k && inst.accepts(&x) {
            Ok(ControlFlow::Break(x))
        } else {
            debug_assert!(false, "compression produced an invalid set");
            Ok(ControlFlow::Continue(()))
        }
    })
}

/// At most `k` vertices outside `Y` whose deletion leaves no path from
/// `y_j` to `y_i` for `j > i`.
pub fn skew_cut_of_y(graph: &Digraph, y: &[Vertex], k: usize) -> Option<VertexSet> {
    skew_cut_of_y_with(graph, y, k, &SearchCtx::default()).expect("no deadline set")
}

fn skew_cut_of_y_with(graph: &Digraph, y: &[Vertex], k: usize, ctx: &SearchCtx) -> SearchResult<Option<VertexSet>> {
    let pairs: Vec<(Vertex, Vertex)> = y.windows(2).map(|w| (w[1], w[0])).collect();
    let x0 = if pairs.is_empty() {
        Some(VertexSet::new())
    } else {
        skew_search(graph, &pairs, k, ctx)?
    };
    if let Some(x0) = &x0 {
        debug_assert!(skew_paths_cut(graph, &pairs, x0));
    }
    Ok(x0)
}

/// A strongly connected piece of the simplified instance with its center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub graph: Digraph,
    pub center: Vertex,
    pub requests: Vec<(Vertex, Vertex)>,
}

/// Deletes every vertex strongly connected to no vertex of `y`, together
/// with the requests that mention it.
pub fn drop_unanchored(graph: &Digraph, requests: &[(Vertex, Vertex)], y: &VertexSet) -> (Digraph, Vec<(Vertex, Vertex)>) {
    let alive = vec![true; graph.vertex_count()];
    let (label, count) = graph.scc_labels(&alive);
    let mut anchored = vec![false; count];
    for &v in y {
        if let Some(i) = graph.index_of(v) {
            anchored[label[i]] = true;
        }
    }
    let keep: Vec<bool> = label.iter().map(|&l| anchored[l]).collect();
    let kept = graph.retain_mask(&keep);
    let requests = requests
        .iter()
        .copied()
        .filter(|&(s, t)| kept.contains(s) && kept.contains(t))
        .collect();
    (kept, requests)
}

/// Drops requests whose endpoints already lie in different strongly
/// connected components.
pub fn drop_split_requests(graph: &Digraph, requests: &[(Vertex, Vertex)]) -> Vec<(Vertex, Vertex)> {
    let alive = vec![true; graph.vertex_count()];
    let (label, _) = graph.scc_labels(&alive);
    requests
        .iter()
        .copied()
        .filter(|&(s, t)| match (graph.index_of(s), graph.index_of(t)) {
            (Some(i), Some(j)) => label[i] == label[j],
            _ => false,
        })
        .collect()
}

/// Deletes every arc between different strongly connected components.
pub fn drop_cross_arcs(graph: &Digraph) -> Digraph {
    let alive = vec![true; graph.vertex_count()];
    let (label, _) = graph.scc_labels(&alive);
    let out = (0..graph.vertex_count())
        .map(|u| graph.succ(u).iter().copied().filter(|&v| label[u] == label[v]).collect())
        .collect();
    Digraph::from_local(graph.ids().to_vec(), out)
}

/// Applies the three reductions in order and splits the result into its
/// strongly connected components, each around one center of `y`.
pub fn simplify_components(graph: &Digraph, requests: &[(Vertex, Vertex)], y: &[Vertex]) -> Vec<Component> {
    let centers: VertexSet = y.iter().copied().collect();
    let (graph, requests) = drop_unanchored(graph, requests, &centers);
    let requests = drop_split_requests(&graph, &requests);
    let graph = drop_cross_arcs(&graph);
    graph
        .scc_decompose()
        .into_iter()
        .map(|members| {
            let center = *members.intersection(&centers).next().expect("every component is anchored");
            debug_assert_eq!(members.intersection(&centers).count(), 1);
            Component {
                graph: graph.induced(&members),
                center,
                requests: requests
                    .iter()
                    .copied()
                    .filter(|(s, _)| members.contains(s))
                    .collect(),
            }
        })
        .collect()
}

/// Exact solver for a strongly connected graph in which every request
/// closes through the undeletable center `y`.
pub fn solve_single_center(graph: &Digraph, y: Vertex, requests: &[(Vertex, Vertex)], k: usize) -> Option<VertexSet> {
    solve_single_center_with(graph, y, requests, k, &SearchCtx::default()).expect("no deadline set")
}

/// [`solve_single_center`] with counters; records the leaf count of the
/// branching tree in `ctx`.
pub fn solve_single_center_with(
    graph: &Digraph,
    y: Vertex,
    requests: &[(Vertex, Vertex)],
    k: usize,
    ctx: &SearchCtx,
) -> SearchResult<Option<VertexSet>> {
    let mut leaves = 0;
    let mut chosen = VertexSet::new();
    let found = center_rec(graph, y, requests, k, &mut chosen, &mut leaves, ctx)?;
    ctx.record_single_center(leaves, k);
    Ok(found.then_some(chosen))
}

fn center_rec(
    graph: &Digraph,
    y: Vertex,
    requests: &[(Vertex, Vertex)],
    k: usize,
    chosen: &mut VertexSet,
    leaves: &mut u64,
    ctx: &SearchCtx,
) -> SearchResult<bool> {
    ctx.tick()?;
    let rest = graph.remove(chosen);
    let live = requests.iter().copied().find(|&(s, t)| {
        !chosen.contains(&s) && !chosen.contains(&t) && !separates_requests(&rest, &[(s, t)], &VertexSet::new())
    });
    let Some((s, t)) = live else {
        *leaves += 1;
        return Ok(true);
    };
    let mut branched = false;
    for (a, b) in [(s, y), (y, s), (t, y), (y, t)] {
        if a == b {
            continue;
        }
        let (from, to) = (VertexSet::from([a]), VertexSet::from([b]));
        ctx.count_cut_enumeration();
        let cuts = if a == y {
            enumerate_anti_important(&rest, &from, &to, k)
        } else {
            enumerate_important(&rest, &from, &to, k)
        }
        .expect("a and b are distinct live vertices");
        for cut in cuts {
            branched = true;
            let added: Vec<Vertex> = cut.vertices.into_iter().collect();
            chosen.extend(added.iter().copied());
            if center_rec(graph, y, requests, k - added.len(), chosen, leaves, ctx)? {
                return Ok(true);
            }
            for v in &added {
                chosen.remove(v);
            }
        }
    }
    // or delete an endpoint of the request
    if k > 0 {
        for v in [s, t] {
            if v == y {
                continue;
            }
            branched = true;
            chosen.insert(v);
            if center_rec(graph, y, requests, k - 1, chosen, leaves, ctx)? {
                return Ok(true);
            }
            chosen.remove(&v);
        }
    }
    if !branched {
        *leaves += 1;
    }
    Ok(false)
}

pub fn approx2_solve(inst: &MulticutInstance) -> ApproxOutcome {
    approx2_solve_with(inst, &SearchCtx::default()).expect("no deadline set")
}

/// Runs the compression pipeline for budgets `0, 1, ..., k` and returns the
/// first solution, so its size is at most twice the optimum.
pub fn approx2_solve_with(inst: &MulticutInstance, ctx: &SearchCtx) -> SearchResult<ApproxOutcome> {
    for budget in 0..=inst.k() {
        let sub = inst.with_k(budget);
        let outcome = iterative_compression(&sub, 2, ctx, |prefix, y| compress_2approx_with(prefix, y, ctx))?;
        if let ApproxOutcome::Solution(x) = outcome {
            debug_assert!(validate_solution(&inst.with_k(2 * budget), &x));
            return Ok(ApproxOutcome::Solution(x));
        }
    }
    Ok(ApproxOutcome::NoSolutionAtMostK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::vset;

    fn inst(n: u32, arcs: &[(u32, u32)], req: &[(u32, u32)], k: usize) -> MulticutInstance {
        let g = Digraph::from_arcs(n, arcs);
        MulticutInstance::new(g, req.iter().map(|&(s, t)| (Vertex(s), Vertex(t))).collect(), k).unwrap()
    }

    #[test]
    fn empty_instances_need_nothing() {
        let g = inst(0, &[], &[], 1);
        assert_eq!(approx2_solve(&g), ApproxOutcome::Solution(VertexSet::new()));
        let free = inst(3, &[(0, 1), (1, 0)], &[], 0);
        assert_eq!(approx2_solve(&free), ApproxOutcome::Solution(VertexSet::new()));
    }

    #[test]
    fn bidirected_edge() {
        let edge = inst(2, &[(0, 1), (1, 0)], &[(0, 1)], 1);
        let x = approx2_solve(&edge).solution().cloned().unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(approx2_solve(&edge.with_k(0)), ApproxOutcome::NoSolutionAtMostK);
    }

    #[test]
    fn skew_cut_examples() {
        let g = Digraph::from_arcs(3, &[(1, 2), (2, 0)]);
        assert_eq!(skew_cut_of_y(&g, &[Vertex(0), Vertex(1)], 1), Some(vset([2])));
        let free = Digraph::from_arcs(2, &[(0, 1)]);
        assert_eq!(skew_cut_of_y(&free, &[Vertex(0), Vertex(1)], 0), Some(VertexSet::new()));
    }

    #[test]
    fn simplification_drops_one_way_vertices() {
        // two centers 0 and 2 in separate cycles, joined through 4 one way
        let g = Digraph::from_arcs(5, &[(0, 1), (1, 0), (2, 3), (3, 2), (1, 4), (4, 3)]);
        let requests = [(Vertex(1), Vertex(3)), (Vertex(0), Vertex(4)), (Vertex(0), Vertex(1))];
        let comps = simplify_components(&g, &requests, &[Vertex(0), Vertex(2)]);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].graph.vertex_set(), vset([0, 1]));
        assert_eq!(comps[0].requests, vec![(Vertex(0), Vertex(1))]);
        assert_eq!(comps[1].graph.vertex_set(), vset([2, 3]));
        assert!(comps[1].requests.is_empty());
    }

    #[test]
    fn single_center_cycle() {
        // y=0 -> s=1 -> t=2 -> y
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]);
        let x = solve_single_center(&g, Vertex(0), &[(Vertex(1), Vertex(2))], 1).unwrap();
        assert_eq!(x.len(), 1);
        assert!(!x.contains(&Vertex(0)));
        assert!(solve_single_center(&g, Vertex(0), &[(Vertex(1), Vertex(2))], 0).is_none());
        assert_eq!(solve_single_center(&g, Vertex(0), &[], 0), Some(VertexSet::new()));
    }

    #[test]
    fn single_center_may_delete_an_endpoint() {
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]);
        let x = solve_single_center(&g, Vertex(0), &[(Vertex(1), Vertex(2))], 1).unwrap();
        assert_eq!(x.len(), 1);
    }

    #[test]
    fn compression_shrinks_a_redundant_solution() {
        let tri = inst(3, &[(0, 1), (1, 2), (2, 0)], &[(0, 1)], 1);
        let ci = CompressionInstance::new(tri, vec![Vertex(0), Vertex(1), Vertex(2)]).unwrap();
        let x = compress_2approx(&ci).solution().cloned().unwrap();
        assert!(x.len() <= 2);
        assert!(CompressionInstance::new(ci.instance().clone(), vec![]).is_err());
    }
}
