//! Symmetric Directed Multiway Cut.
//!
//! Terminals must end up in pairwise distinct strongly connected components.
//! The solver works on the arc-terminal generalization: arc sets
//! `A_i = S_i x T_i`, and no closed walk of `D - X` may meet two of them.
//! Iterative compression hands a solution `Y` of size `k + 1` to the
//! compression step, which guesses how `Y` survives in the optimum and then
//! runs the shadow-removal based branching of [`compress`].

mod compress;
mod shadow;
mod tc;

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::approx2::{iterative_compression, ApproxOutcome, Compressible};
use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::exact_kl::visit_partitions;
use crate::search::{SearchCtx, SearchResult};

pub use compress::solve_arc_terminal_compression;
pub use shadow::{candidate_shadow_sets, contract_shadow, shadow_of, RejectZ};
pub use tc::{candidate_tc_pairs, TcPair};

/// Above this many candidate vertices the exhaustive shadow family is
/// replaced by random sampling.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Default round count for random mode, calibrated on planted instances.
pub const CALIBRATED_ROUNDS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShadowMode {
    /// Every subset when small enough, random sampling otherwise.
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiwayOptions {
    pub shadow_mode: ShadowMode,
    /// Sampling rounds for the randomized constructions.
    pub rounds: usize,
}

impl Default for MultiwayOptions {
    fn default() -> Self {
        MultiwayOptions {
            shadow_mode: ShadowMode::Exhaustive,
            rounds: CALIBRATED_ROUNDS,
        }
    }
}

/// The arc set `S x T`. Every such pair must be an arc of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcSet {
    pub tails: VertexSet,
    pub heads: VertexSet,
}

impl ArcSet {
    pub fn is_empty(&self) -> bool {
        self.tails.is_empty() || self.heads.is_empty()
    }

    fn restrict(&self, graph: &Digraph) -> ArcSet {
        ArcSet {
            tails: self.tails.iter().copied().filter(|&v| graph.contains(v)).collect(),
            heads: self.heads.iter().copied().filter(|&v| graph.contains(v)).collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArcTerminalError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("arc set {index} misses the arc ({u}, {v})")]
    NotBiclique { index: usize, u: Vertex, v: Vertex },
    #[error("Y does not meet every closed walk through two arc sets")]
    YNotASolution,
    #[error("Y lacks the arc ({0}, {1})")]
    MissingOrderArc(Vertex, Vertex),
}

/// Arc Terminal Symmetric Multiway Cut, optionally with a compression
/// context `Y = (y_1, ..., y_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcTerminalInstance {
    graph: Digraph,
    sets: Vec<ArcSet>,
    k: usize,
    y: Vec<Vertex>,
}

impl ArcTerminalInstance {
    pub fn new(graph: Digraph, sets: Vec<ArcSet>, k: usize) -> Result<Self, ArcTerminalError> {
        for (index, set) in sets.iter().enumerate() {
            for &v in set.tails.iter().chain(&set.heads) {
                if !graph.contains(v) {
                    return Err(ArcTerminalError::UnknownVertex(v));
                }
            }
            for &u in &set.tails {
                for &v in &set.heads {
                    if !graph.has_arc(u, v) {
                        return Err(ArcTerminalError::NotBiclique { index, u, v });
                    }
                }
            }
        }
        Ok(ArcTerminalInstance {
            graph,
            sets,
            k,
            y: Vec::new(),
        })
    }

    /// Adds the compression context and checks its invariants.
    pub fn with_compression(mut self, y: Vec<Vertex>) -> Result<Self, ArcTerminalError> {
        for &v in &y {
            if !self.graph.contains(v) {
                return Err(ArcTerminalError::UnknownVertex(v));
            }
        }
        for (i, &a) in y.iter().enumerate() {
            for &b in &y[i + 1..] {
                if !self.graph.has_arc(a, b) {
                    return Err(ArcTerminalError::MissingOrderArc(a, b));
                }
            }
        }
        let yset: VertexSet = y.iter().copied().collect();
        if has_conflict(&self.graph, &self.sets, &yset) {
            return Err(ArcTerminalError::YNotASolution);
        }
        self.y = y;
        Ok(self)
    }

    pub(crate) fn from_parts(graph: Digraph, sets: Vec<ArcSet>, k: usize, y: Vec<Vertex>) -> Self {
        ArcTerminalInstance { graph, sets, k, y }
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn sets(&self) -> &[ArcSet] {
        &self.sets
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn y(&self) -> &[Vertex] {
        &self.y
    }

    pub fn with_k(&self, k: usize) -> Self {
        ArcTerminalInstance { k, ..self.clone() }
    }

    /// Checks size, the closed-walk condition and, with a compression
    /// context, that `x` avoids `Y` and leaves no path from `y_j` to `y_i`, `j > i`.
    pub fn is_solution(&self, x: &VertexSet) -> bool {
        x.len() <= self.k && self.accepts(x)
    }

    /// The instance after deleting `x`.
    pub(crate) fn delete(&self, x: &VertexSet, k: usize) -> ArcTerminalInstance {
        let graph = self.graph.remove(x);
        let sets = self.sets.iter().map(|s| s.restrict(&graph)).collect();
        ArcTerminalInstance {
            graph,
            sets,
            k,
            y: self.y.clone(),
        }
    }
}

impl Compressible for ArcTerminalInstance {
    fn graph(&self) -> &Digraph {
        &self.graph
    }

    fn budget(&self) -> usize {
        self.k
    }

    fn restrict(&self, keep: &VertexSet) -> Self {
        let graph = self.graph.induced(keep);
        let sets = self.sets.iter().map(|s| s.restrict(&graph)).collect();
        ArcTerminalInstance {
            graph,
            sets,
            k: self.k,
            y: self.y.iter().copied().filter(|v| keep.contains(v)).collect(),
        }
    }

    fn accepts(&self, x: &VertexSet) -> bool {
        if self.y.iter().any(|v| x.contains(v)) {
            return false;
        }
        !has_conflict(&self.graph, &self.sets, x) && !has_back_path(&self.graph, &self.y, x)
    }
}

/// Some strongly connected component of `D - x` holds arcs of two
/// different arc sets. Arc `uv` of `A_i` lies on a closed walk exactly when
/// `u` and `v` share a component.
pub(crate) fn has_conflict(graph: &Digraph, sets: &[ArcSet], x: &VertexSet) -> bool {
    let alive: Vec<bool> = graph.ids().iter().map(|v| !x.contains(v)).collect();
    let (label, count) = graph.scc_labels(&alive);
    let mut owner: Vec<Option<usize>> = vec![None; count];
    for (i, set) in sets.iter().enumerate() {
        let labels = |side: &VertexSet| -> BTreeSet<usize> {
            side.iter()
                .filter_map(|&v| graph.index_of(v))
                .filter(|&j| alive[j])
                .map(|j| label[j])
                .collect()
        };
        let tails = labels(&set.tails);
        for c in labels(&set.heads).intersection(&tails) {
            match owner[*c] {
                Some(j) if j != i => return true,
                _ => owner[*c] = Some(i),
            }
        }
    }
    false
}

/// A path from `y_j` to `y_i` with `j > i` survives in `D - x`.
pub(crate) fn has_back_path(graph: &Digraph, y: &[Vertex], x: &VertexSet) -> bool {
    if y.len() < 2 {
        return false;
    }
    let rest = graph.remove(x);
    y.iter().enumerate().skip(1).any(|(j, &yj)| {
        let reach = rest.reachable_from(&[yj].into());
        y[..j].iter().any(|yi| reach.contains(yi))
    })
}

/// One arc set per terminal: the arcs leaving it.
pub fn encode_multiway(graph: &Digraph, terminals: &VertexSet, k: usize) -> Result<ArcTerminalInstance, ArcTerminalError> {
    let sets = terminals
        .iter()
        .map(|&t| {
            if !graph.contains(t) {
                return Err(ArcTerminalError::UnknownVertex(t));
            }
            Ok(ArcSet {
                tails: [t].into(),
                heads: graph.out_neighbors(t).collect(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    ArcTerminalInstance::new(graph.clone(), sets, k)
}

/// No two surviving terminals share a strongly connected component of `D - x`.
pub fn multiway_valid(graph: &Digraph, terminals: &VertexSet, k: usize, x: &VertexSet) -> bool {
    if x.len() > k {
        return false;
    }
    let alive: Vec<bool> = graph.ids().iter().map(|v| !x.contains(v)).collect();
    let (label, _) = graph.scc_labels(&alive);
    let mut seen = BTreeSet::new();
    terminals
        .iter()
        .filter_map(|&t| graph.index_of(t))
        .filter(|&i| alive[i])
        .all(|i| seen.insert(label[i]))
}

pub fn solve_multiway(graph: &Digraph, terminals: &VertexSet, k: usize) -> Result<Option<VertexSet>, ArcTerminalError> {
    Ok(solve_multiway_with(graph, terminals, k, MultiwayOptions::default(), &SearchCtx::default())?
        .expect("no deadline set"))
}

pub fn solve_multiway_with(
    graph: &Digraph,
    terminals: &VertexSet,
    k: usize,
    opts: MultiwayOptions,
    ctx: &SearchCtx,
) -> Result<SearchResult<Option<VertexSet>>, ArcTerminalError> {
    if terminals.len() <= 1 {
        for &t in terminals {
            if !graph.contains(t) {
                return Err(ArcTerminalError::UnknownVertex(t));
            }
        }
        return Ok(Ok(Some(VertexSet::new())));
    }
    let inst = encode_multiway(graph, terminals, k)?;
    Ok(solve_arc_terminal_with(&inst, opts, ctx).map(|found| {
        found.inspect(|x| debug_assert!(multiway_valid(graph, terminals, k, x)))
    }))
}

/// Smallest solution of size at most `k`.
pub fn solve_multiway_min(
    graph: &Digraph,
    terminals: &VertexSet,
    k: usize,
    opts: MultiwayOptions,
    ctx: &SearchCtx,
) -> Result<SearchResult<Option<VertexSet>>, ArcTerminalError> {
    for budget in 0..=k {
        match solve_multiway_with(graph, terminals, budget, opts, ctx)? {
            Ok(None) => continue,
            other => return Ok(other),
        }
    }
    Ok(Ok(None))
}

/// Exact solver for the arc-terminal problem (without compression context).
pub fn solve_arc_terminal_with(
    inst: &ArcTerminalInstance,
    opts: MultiwayOptions,
    ctx: &SearchCtx,
) -> SearchResult<Option<VertexSet>> {
    let plain = ArcTerminalInstance { y: Vec::new(), ..inst.clone() };
    let mut solver = compress::Solver::new(opts, ctx);
    let outcome = iterative_compression(&plain, 1, ctx, |prefix, y| compression_step(prefix, y, &mut solver, ctx))?;
    Ok(match outcome {
        ApproxOutcome::Solution(x) => Some(x),
        ApproxOutcome::NoSolutionAtMostK => None,
    })
}

/// Guesses `Y ∩ X`, merges the parts of `Y` that stay strongly connected and
/// fixes their topological order, then solves the compression instance.
fn compression_step(
    inst: &ArcTerminalInstance,
    y: &[Vertex],
    solver: &mut compress::Solver<'_>,
    ctx: &SearchCtx,
) -> SearchResult<Option<VertexSet>> {
    visit_partitions(y, &[], inst.k, |blocks| {
        ctx.tick()?;
        let deleted = &blocks[0];
        let rest = inst.graph.remove(deleted);
        let (contracted, map) = rest.contract(&blocks[1..]).expect("blocks are disjoint");
        let centers: Vec<Vertex> = blocks[1..].iter().map(|b| *b.iter().next().expect("nonempty block")).collect();
        let order_arcs: Vec<(Vertex, Vertex)> = centers
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| centers[i + 1..].iter().map(move |&b| (a, b)))
            .collect();
        let graph = contracted.with_arcs(order_arcs).expect("centers are vertices");
        let sets = inst
            .sets
            .iter()
            .map(|s| ArcSet {
                tails: map.project(&s.tails),
                heads: map.project(&s.heads),
            })
            .collect();
        let sub = ArcTerminalInstance::from_parts(graph, sets, inst.k - deleted.len(), centers);
        if has_conflict(&sub.graph, &sub.sets, &sub.y.iter().copied().collect()) {
            return Ok(ControlFlow::Continue(()));
        }
        Ok(match solver.solve(&sub)? {
            Some(mut x) => {
                x.extend(deleted.iter().copied());
                ctx.count_oracle_call();
                if inst.is_solution(&x) {
                    ControlFlow::Break(x)
                } else {
                    debug_assert!(false, "compression returned an invalid set");
                    ControlFlow::Continue(())
                }
            }
            None => ControlFlow::Continue(()),
        })
    })
}
