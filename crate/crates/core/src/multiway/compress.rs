//! The compression branching: shadow removal, `(I, T_c)` guesses and an
//! important cut around the last vertex `y_r` of `Y`.

use std::collections::{HashMap, HashSet};

use super::shadow::{candidate_shadow_sets, contract_shadow};
use super::tc::candidate_tc_pairs;
use super::{has_back_path, has_conflict, ArcTerminalInstance, MultiwayOptions};
use crate::cuts::important_cut_sets;
use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::search::{SearchCtx, SearchResult};

/// Solves a compression instance: at most `k` vertices disjoint from `Y`
/// meeting every conflicting closed walk and every back-path inside `Y`.
pub fn solve_arc_terminal_compression(
    inst: &ArcTerminalInstance,
    opts: MultiwayOptions,
    ctx: &SearchCtx,
) -> SearchResult<Option<VertexSet>> {
    Solver::new(opts, ctx).solve(inst)
}

type MemoKey = (ArcTerminalInstance, VertexSet);

pub(crate) struct Solver<'c> {
    opts: MultiwayOptions,
    ctx: &'c SearchCtx,
    /// Largest budget known to fail for an instance.
    failed: HashMap<MemoKey, usize>,
}

impl<'c> Solver<'c> {
    pub(crate) fn new(opts: MultiwayOptions, ctx: &'c SearchCtx) -> Self {
        Solver {
            opts,
            ctx,
            failed: HashMap::new(),
        }
    }

    pub(crate) fn solve(&mut self, inst: &ArcTerminalInstance) -> SearchResult<Option<VertexSet>> {
        let fixed: VertexSet = inst.y().iter().copied().collect();
        let found = self.branch(inst, &fixed, 0)?;
        if let Some(x) = &found {
            debug_assert!(inst.is_solution(x));
        }
        Ok(found)
    }

    /// `fixed` holds every vertex that belonged to `Y` at some level; the
    /// answer must avoid all of them.
    fn branch(&mut self, inst: &ArcTerminalInstance, fixed: &VertexSet, depth: usize) -> SearchResult<Option<VertexSet>> {
        self.ctx.tick()?;
        let empty = VertexSet::new();
        if !has_conflict(inst.graph(), inst.sets(), &empty) && !has_back_path(inst.graph(), inst.y(), &empty) {
            return Ok(Some(empty));
        }
        let k = inst.k();
        let Some((&pivot, rest_y)) = inst.y().split_last() else {
            return Ok(None);
        };
        if k == 0 {
            return Ok(None);
        }
        self.ctx.record_depth(depth);
        let key = (inst.clone(), fixed.clone());
        if self.failed.get(&key).is_some_and(|&bad| bad >= k) {
            return Ok(None);
        }
        let yset: VertexSet = inst.y().iter().copied().collect();
        let mode = self.opts.shadow_mode;
        let zs = candidate_shadow_sets(inst.graph(), &yset, k, mode, self.opts.rounds, self.ctx);
        let samples = tc_samples(k, self.opts.rounds);
        for z in zs {
            self.ctx.tick()?;
            let Ok(torso) = contract_shadow(inst, &z) else { continue };
            let mut tried: HashSet<(Option<usize>, VertexSet)> = HashSet::new();
            for pair in candidate_tc_pairs(&torso, mode, samples, self.ctx) {
                let choices: Vec<Option<usize>> =
                    std::iter::once(None).chain(pair.indices.iter().map(|&i| Some(i))).collect();
                let free: Vec<Vertex> = pair.tc.iter().copied().filter(|v| !fixed.contains(v)).collect();
                for xc in subsets_up_to(&free, k) {
                    for &i0 in &choices {
                        if !tried.insert((i0, xc.clone())) {
                            continue;
                        }
                        if let Some(x) = self.try_guess(&torso, fixed, pivot, rest_y, i0, &xc, depth)? {
                            if inst.is_solution(&x) {
                                return Ok(Some(x));
                            }
                            debug_assert!(false, "branch produced an invalid set");
                        }
                    }
                }
            }
        }
        let entry = self.failed.entry(key).or_insert(0);
        *entry = (*entry).max(k);
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn try_guess(
        &mut self,
        torso: &ArcTerminalInstance,
        fixed: &VertexSet,
        pivot: Vertex,
        rest_y: &[Vertex],
        i0: Option<usize>,
        xc: &VertexSet,
        depth: usize,
    ) -> SearchResult<Option<VertexSet>> {
        let budget = torso.k() - xc.len();
        let cut_graph = torso.delete(xc, budget);
        let mut sinks: VertexSet = rest_y.iter().copied().collect();
        let mut tails = VertexSet::new();
        for (i, set) in cut_graph.sets().iter().enumerate() {
            if Some(i) != i0 && !set.is_empty() {
                tails.extend(set.tails.iter().copied());
            }
        }
        if tails.contains(&pivot) {
            return Ok(None);
        }
        // tails may be deleted, so each one gets an undeletable copy as sink
        let graph = cut_graph.graph();
        let next = graph.vertices().map(|v| v.0 + 1).max().unwrap_or(0);
        let copies: Vec<(Vertex, Vertex)> = tails
            .iter()
            .enumerate()
            .map(|(j, &v)| (v, Vertex(next + j as u32)))
            .collect();
        sinks.extend(copies.iter().map(|&(_, c)| c));
        let mut search_graph = Digraph::new(
            graph.vertices().chain(copies.iter().map(|&(_, c)| c)),
            graph.arcs().chain(copies.iter().copied()),
        )
        .expect("copies use fresh ids");
        if let Some(i) = i0 {
            let heads = &cut_graph.sets()[i].heads;
            if heads.is_empty() {
                return Ok(None);
            }
            search_graph = search_graph
                .with_arcs(heads.iter().map(|&v| (pivot, v)))
                .expect("heads survive the deletion");
        }
        self.ctx.count_cut_enumeration();
        let cuts = important_cut_sets(&search_graph, &[pivot].into(), &sinks, fixed, budget);
        let mut below = fixed.clone();
        below.insert(pivot);
        for s in cuts {
            let mut next = cut_graph.delete(&s, budget - s.len());
            next = ArcTerminalInstance::from_parts(next.graph().clone(), next.sets().to_vec(), next.k(), rest_y.to_vec());
            if let Some(mut x) = self.branch(&next, &below, depth + 1)? {
                x.extend(s);
                x.extend(xc.iter().copied());
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

/// Number of `U` samples in random mode: enough for a per-call success
/// rate of `1 - 1/rounds` when each sample works with probability `1/(e(k+1))`.
fn tc_samples(k: usize, rounds: usize) -> usize {
    let rate = std::f64::consts::E * (k as f64 + 1.0);
    (rate * (rounds.max(2) as f64).ln()).ceil() as usize
}

/// Subsets of `items` of size at most `k`, smallest first.
fn subsets_up_to(items: &[Vertex], k: usize) -> Vec<VertexSet> {
    let mut out = vec![VertexSet::new()];
    let mut layer = vec![(VertexSet::new(), 0usize)];
    for _ in 0..k.min(items.len()) {
        let mut next = Vec::new();
        for (set, start) in &layer {
            for (i, &v) in items.iter().enumerate().skip(*start) {
                let mut bigger = set.clone();
                bigger.insert(v);
                next.push((bigger, i + 1));
            }
        }
        out.extend(next.iter().map(|(s, _)| s.clone()));
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{vset, Digraph};
    use crate::multiway::ArcSet;

    #[test]
    fn subsets_by_size() {
        let items = [Vertex(1), Vertex(2), Vertex(3)];
        let subs = subsets_up_to(&items, 2);
        assert_eq!(subs.len(), 1 + 3 + 3);
        assert_eq!(subs[0], VertexSet::new());
        assert_eq!(subs[4], vset([1, 2]));
    }

    #[test]
    fn nothing_to_cut() {
        let g = Digraph::from_arcs(3, &[(0, 1)]);
        let inst = ArcTerminalInstance::new(g, vec![], 0).unwrap();
        let x = solve_arc_terminal_compression(&inst, MultiwayOptions::default(), &SearchCtx::new(0)).unwrap();
        assert_eq!(x, Some(VertexSet::new()));
    }

    #[test]
    fn cycle_through_two_sets_is_cut() {
        // y = 0; cycle 0 -> 1 -> 2 -> 3 -> 0 with A_0 = {1}x{2}, A_1 = {3}x{0}
        let g = Digraph::from_arcs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let sets = vec![
            ArcSet { tails: vset([1]), heads: vset([2]) },
            ArcSet { tails: vset([3]), heads: vset([0]) },
        ];
        let base = ArcTerminalInstance::new(g, sets, 1).unwrap();
        let inst = ArcTerminalInstance::from_parts(base.graph().clone(), base.sets().to_vec(), 1, vec![Vertex(0)]);
        let x = solve_arc_terminal_compression(&inst, MultiwayOptions::default(), &SearchCtx::new(0)).unwrap();
        let x = x.unwrap();
        assert_eq!(x.len(), 1);
        assert!(inst.is_solution(&x));
        let none = solve_arc_terminal_compression(&inst.with_k(0), MultiwayOptions::default(), &SearchCtx::new(0));
        assert_eq!(none.unwrap(), None);
    }
}
