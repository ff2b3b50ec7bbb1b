//! Exact algorithm parameterized by the budget and the number of requests.
//!
//! Guess which terminals an optimal solution `X` deletes (`T_0`) and how the
//! remaining terminals fall into strongly connected components of `D - X`,
//! together with a topological order of those components (`T_1, ..., T_r`).
//! After deleting `T_0` and merging every `T_i` into one vertex `t_i`, what is
//! left is a skew multicut instance forbidding paths from later to earlier
//! blocks.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::search::{SearchCtx, SearchResult};
use crate::skew::skew_search;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("request ({0}, {0}) has equal endpoints")]
    TrivialRequest(Vertex),
}

/// A Symmetric Directed Vertex Multicut instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulticutInstance {
    graph: Digraph,
    requests: Vec<(Vertex, Vertex)>,
    k: usize,
}

impl MulticutInstance {
    pub fn new(graph: Digraph, requests: Vec<(Vertex, Vertex)>, k: usize) -> Result<Self, InstanceError> {
        for &(s, t) in &requests {
            if s == t {
                return Err(InstanceError::TrivialRequest(s));
            }
            for v in [s, t] {
                if !graph.contains(v) {
                    return Err(InstanceError::UnknownVertex(v));
                }
            }
        }
        Ok(MulticutInstance { graph, requests, k })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn requests(&self) -> &[(Vertex, Vertex)] {
        &self.requests
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn with_k(&self, k: usize) -> Self {
        MulticutInstance { k, ..self.clone() }
    }

    pub fn terminals(&self) -> VertexSet {
        self.requests.iter().flat_map(|&(s, t)| [s, t]).collect()
    }
}

/// `|x| <= k` and every request is split across components of `D - x`.
pub fn validate_solution(inst: &MulticutInstance, x: &VertexSet) -> bool {
    x.len() <= inst.k && separates_requests(&inst.graph, &inst.requests, x)
}

pub(crate) fn separates_requests(graph: &Digraph, requests: &[(Vertex, Vertex)], x: &VertexSet) -> bool {
    let alive: Vec<bool> = graph.ids().iter().map(|v| !x.contains(v)).collect();
    let (label, _) = graph.scc_labels(&alive);
    requests.iter().all(|&(s, t)| {
        match (graph.index_of(s), graph.index_of(t)) {
            (Some(i), Some(j)) => !alive[i] || !alive[j] || label[i] != label[j],
            _ => true,
        }
    })
}

/// An ordered partition `T_0, T_1, ..., T_r` of the terminals. `T_0` holds
/// the deleted terminals and may be empty; the other blocks are nonempty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TerminalPartition {
    pub blocks: Vec<VertexSet>,
}

impl TerminalPartition {
    pub fn deleted(&self) -> &VertexSet {
        &self.blocks[0]
    }

    pub fn ordered(&self) -> &[VertexSet] {
        &self.blocks[1..]
    }
}

/// Every ordered partition of the request terminals in which no request has
/// both endpoints in one block `T_i`, `i >= 1`.
pub fn enumerate_partitions(terminals: &VertexSet, requests: &[(Vertex, Vertex)]) -> Vec<TerminalPartition> {
    let items: Vec<Vertex> = terminals.iter().copied().collect();
    let mut out = Vec::new();
    let _ = visit_partitions(&items, requests, items.len(), |blocks| {
        out.push(TerminalPartition { blocks: blocks.to_vec() });
        Ok(ControlFlow::<()>::Continue(()))
    });
    out
}

/// Calls `f` on every ordered partition of `items` (blocks as in
/// [`TerminalPartition`]) with `|T_0| <= max_deleted` and no pair of
/// `separate` inside a positive block. Stops early on `Break`.
///
/// Partitions are produced as labelings `items -> {0, ..., n}` whose used
/// positive labels are exactly `1..=r`, in lexicographic order of labels.
pub(crate) fn visit_partitions<T>(
    items: &[Vertex],
    separate: &[(Vertex, Vertex)],
    max_deleted: usize,
    mut f: impl FnMut(&[VertexSet]) -> SearchResult<ControlFlow<T>>,
) -> SearchResult<Option<T>> {
    let n = items.len();
    let index = |v: Vertex| items.iter().position(|&w| w == v);
    let mut conflicts = vec![Vec::new(); n];
    for &(s, t) in separate {
        if let (Some(a), Some(b)) = (index(s), index(t)) {
            conflicts[a.max(b)].push(a.min(b));
        }
    }
    let mut walker = Walker {
        n,
        conflicts,
        labels: vec![0; n],
        used: vec![0; n + 1],
        max_deleted,
    };
    walker.rec(0, &mut |labels: &[usize]| {
        let r = labels.iter().copied().max().unwrap_or(0);
        let mut blocks = vec![VertexSet::new(); r + 1];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l].insert(items[i]);
        }
        f(&blocks)
    })
}

struct Walker {
    n: usize,
    conflicts: Vec<Vec<usize>>,
    labels: Vec<usize>,
    used: Vec<usize>,
    max_deleted: usize,
}

impl Walker {
    fn missing_labels(&self) -> usize {
        let top = (1..=self.n).rev().find(|&l| self.used[l] > 0).unwrap_or(0);
        (1..top).filter(|&l| self.used[l] == 0).count()
    }

    fn rec<T>(
        &mut self,
        i: usize,
        emit: &mut dyn FnMut(&[usize]) -> SearchResult<ControlFlow<T>>,
    ) -> SearchResult<Option<T>> {
        if self.missing_labels() > self.n - i {
            return Ok(None);
        }
        if i == self.n {
            return Ok(match emit(&self.labels)? {
                ControlFlow::Break(t) => Some(t),
                ControlFlow::Continue(()) => None,
            });
        }
        for label in 0..=self.n {
            if label == 0 && self.used[0] >= self.max_deleted {
                continue;
            }
            if label > 0 && self.conflicts[i].iter().any(|&j| self.labels[j] == label) {
                continue;
            }
            self.labels[i] = label;
            self.used[label] += 1;
            let found = self.rec(i + 1, emit)?;
            self.used[label] -= 1;
            if found.is_some() {
                return Ok(found);
            }
        }
        self.labels[i] = 0;
        Ok(None)
    }
}

pub fn solve_exact_kl(inst: &MulticutInstance) -> Option<VertexSet> {
    solve_exact_kl_with(inst, &SearchCtx::default()).expect("no deadline set")
}

/// A solution of size at most `k`, or `None` if there is none.
pub fn solve_exact_kl_with(inst: &MulticutInstance, ctx: &SearchCtx) -> SearchResult<Option<VertexSet>> {
    let terminals: Vec<Vertex> = inst.terminals().into_iter().collect();
    visit_partitions(&terminals, &inst.requests, inst.k, |blocks| {
        ctx.tick()?;
        let deleted = &blocks[0];
        let rest = inst.graph.remove(deleted);
        let (contracted, _) = rest.contract(&blocks[1..]).expect("blocks are disjoint terminals");
        let reps: Vec<Vertex> = blocks[1..].iter().map(|b| *b.iter().next().expect("nonempty block")).collect();
        let pairs: Vec<(Vertex, Vertex)> = reps.windows(2).map(|w| (w[1], w[0])).collect();
        let budget = inst.k - deleted.len();
        let cut = if pairs.is_empty() {
            Some(VertexSet::new())
        } else {
            skew_search(&contracted, &pairs, budget, ctx)?
        };
        Ok(match cut {
            Some(mut x) => {
                x.extend(deleted.iter().copied());
                ctx.count_oracle_call();
                if validate_solution(inst, &x) {
                    ControlFlow::Break(x)
                } else {
                    debug_assert!(false, "lifted skew solution does not separate the requests");
                    ControlFlow::Continue(())
                }
            }
            None => ControlFlow::Continue(()),
        })
    })
}

/// Minimum solution of size at most `inst.k()`.
pub fn solve_exact_kl_min(inst: &MulticutInstance, ctx: &SearchCtx) -> SearchResult<Option<VertexSet>> {
    for k in 0..=inst.k {
        if let Some(x) = solve_exact_kl_with(&inst.with_k(k), ctx)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
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
    fn validation_examples() {
        let edge = inst(2, &[(0, 1), (1, 0)], &[(0, 1)], 1);
        assert!(validate_solution(&edge, &vset([0])));
        let tri = inst(3, &[(0, 1), (1, 2), (2, 0)], &[(0, 1)], 1);
        assert!(validate_solution(&tri, &vset([2])));
        assert!(!validate_solution(&tri, &VertexSet::new()));
        assert!(!validate_solution(&tri.with_k(0), &vset([2])));
    }

    #[test]
    fn partitions_of_a_request_pair() {
        let parts = enumerate_partitions(&vset([0, 1]), &[(Vertex(0), Vertex(1))]);
        let as_lists: Vec<Vec<VertexSet>> = parts.iter().map(|p| p.blocks.clone()).collect();
        assert!(as_lists.contains(&vec![vset([0, 1])]));
        assert!(as_lists.contains(&vec![vset([0]), vset([1])]));
        assert!(as_lists.contains(&vec![VertexSet::new(), vset([0]), vset([1])]));
        assert!(as_lists.contains(&vec![VertexSet::new(), vset([1]), vset([0])]));
        assert!(!as_lists.contains(&vec![VertexSet::new(), vset([0, 1])]));
        assert_eq!(parts.len(), 5);
        assert!(parts.len() <= 9);
    }

    #[test]
    fn partitions_of_nothing() {
        let parts = enumerate_partitions(&VertexSet::new(), &[]);
        assert_eq!(parts, vec![TerminalPartition { blocks: vec![VertexSet::new()] }]);
    }

    #[test]
    fn partitions_are_ordered_set_partitions() {
        // sum over the deleted subset of the ordered partitions of the rest
        let parts = enumerate_partitions(&vset([0, 1, 2]), &[]);
        assert_eq!(parts.len(), 13 + 3 * 3 + 3 + 1);
        let mut sorted = parts.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), parts.len());
    }

    #[test]
    fn bidirected_edge_needs_one_vertex() {
        let edge = inst(2, &[(0, 1), (1, 0)], &[(0, 1)], 1);
        let x = solve_exact_kl(&edge).unwrap();
        assert_eq!(x.len(), 1);
        assert!(solve_exact_kl(&edge.with_k(0)).is_none());
    }

    #[test]
    fn bidirected_triangle_all_pairs() {
        let arcs = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)];
        let tri = inst(3, &arcs, &[(0, 1), (1, 2), (0, 2)], 1);
        assert!(solve_exact_kl(&tri).is_none());
        assert_eq!(solve_exact_kl(&tri.with_k(2)).map(|x| x.len()), Some(2));
    }

    #[test]
    fn cycle_through_non_terminal() {
        let tri = inst(3, &[(0, 1), (1, 2), (2, 0)], &[(0, 1)], 1);
        let x = solve_exact_kl_min(&tri, &SearchCtx::default()).unwrap().unwrap();
        assert_eq!(x.len(), 1);
        assert!(validate_solution(&tri, &x));
    }
}
