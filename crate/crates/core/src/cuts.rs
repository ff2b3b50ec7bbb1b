//! Vertex cuts and important cuts.
//!
//! An `(X, Y)`-cut is a vertex set disjoint from `X ∪ Y` whose removal leaves
//! no path from `X` to `Y`. Vertex capacities are handled by splitting every
//! vertex `v` into `v_in -> v_out`; arcs and terminals get unbounded capacity.
//!
//! Important cuts are enumerated by the classic branching on the furthest
//! minimum cut: pick the smallest vertex `v` of that cut and either delete
//! `v` (budget drops by one) or add `v` and the whole furthest reach set to
//! the source side (the min-cut value strictly grows). The candidates are
//! then filtered through the polynomial importance test.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::digraph::{Digraph, Vertex, VertexSet};

const INF: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutError {
    #[error("vertex {0} is on both sides of the query")]
    Overlap(Vertex),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("the given set is not a separator for the query")]
    NotACut,
    #[error("cut vertex {0} belongs to a terminal side")]
    CutMeetsTerminals(Vertex),
}

/// A vertex `(X, Y)`-cut together with the set `reach` of vertices reachable
/// from `X` once the cut is removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut {
    pub vertices: VertexSet,
    pub source: VertexSet,
    pub sink: VertexSet,
    pub reach: VertexSet,
}

impl Cut {
    /// Checks that `vertices` separates `source` from `sink` and records its reach.
    pub fn new(graph: &Digraph, source: &VertexSet, sink: &VertexSet, vertices: &VertexSet) -> Result<Cut, CutError> {
        check_query(graph, source, sink)?;
        for &v in vertices {
            if !graph.contains(v) {
                return Err(CutError::UnknownVertex(v));
            }
            if source.contains(&v) || sink.contains(&v) {
                return Err(CutError::CutMeetsTerminals(v));
            }
        }
        let reach = graph.remove(vertices).reachable_from(source);
        if reach.iter().any(|v| sink.contains(v)) {
            return Err(CutError::NotACut);
        }
        Ok(Cut {
            vertices: vertices.clone(),
            source: source.clone(),
            sink: sink.clone(),
            reach,
        })
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinCut {
    Cut(Cut),
    /// Some source has an arc straight into the sink side.
    Infeasible,
    BudgetExceeded,
}

fn check_query(graph: &Digraph, x: &VertexSet, y: &VertexSet) -> Result<(), CutError> {
    for &v in x.iter().chain(y.iter()) {
        if !graph.contains(v) {
            return Err(CutError::UnknownVertex(v));
        }
    }
    match x.intersection(y).next() {
        Some(&v) => Err(CutError::Overlap(v)),
        None => Ok(()),
    }
}

/// Minimum-weight vertex `(X, Y)`-cut. Among all minimum cuts the one
/// furthest from `X` (largest reach) is returned. Vertices without an
/// entry in `capacities` have capacity one.
pub fn min_vertex_cut(
    graph: &Digraph,
    x: &VertexSet,
    y: &VertexSet,
    budget: u64,
    capacities: Option<&BTreeMap<Vertex, u64>>,
) -> Result<MinCut, CutError> {
    check_query(graph, x, y)?;
    let mut spec = CutSpec::new(graph, x, y, &VertexSet::new());
    if let Some(caps) = capacities {
        let mut c = vec![1u64; graph.vertex_count()];
        for (&v, &w) in caps {
            let i = graph.index_of(v).ok_or(CutError::UnknownVertex(v))?;
            c[i] = w.max(1);
        }
        spec.capacity = Some(c);
    }
    Ok(match spec.min_cut(budget) {
        LocalMinCut::Infeasible => MinCut::Infeasible,
        LocalMinCut::TooLarge => MinCut::BudgetExceeded,
        LocalMinCut::Found { cut, reach, .. } => MinCut::Cut(Cut {
            vertices: cut.iter().map(|&i| graph.id(i)).collect(),
            source: x.clone(),
            sink: y.clone(),
            reach: graph.set_from_mask(&reach),
        }),
    })
}

/// Whether `s` is an important `(X, Y)`-cut.
pub fn is_important(graph: &Digraph, x: &VertexSet, y: &VertexSet, s: &VertexSet) -> Result<bool, CutError> {
    Cut::new(graph, x, y, s)?;
    let spec = CutSpec::new(graph, x, y, &VertexSet::new());
    let local: Vec<usize> = s.iter().map(|&v| graph.index_of(v).expect("checked")).collect();
    Ok(spec.is_important(&local))
}

/// An important cut no larger than `cut` whose reach contains `cut.reach`.
pub fn push_to_important(graph: &Digraph, cut: &Cut) -> Result<Cut, CutError> {
    let checked = Cut::new(graph, &cut.source, &cut.sink, &cut.vertices)?;
    let mut spec = CutSpec::new(graph, &checked.source, &checked.sink, &VertexSet::new());
    spec.source = graph.mask(&checked.reach);
    match spec.min_cut(checked.size() as u64) {
        LocalMinCut::Found { cut: pushed, .. } => {
            let vertices: VertexSet = pushed.iter().map(|&i| graph.id(i)).collect();
            Cut::new(graph, &checked.source, &checked.sink, &vertices)
        }
        _ => unreachable!("pushing a valid cut cannot fail"),
    }
}

/// All important `(X, Y)`-cuts of size at most `k`, sorted by vertex list.
pub fn enumerate_important(graph: &Digraph, x: &VertexSet, y: &VertexSet, k: usize) -> Result<Vec<Cut>, CutError> {
    enumerate_important_avoiding(graph, x, y, &VertexSet::new(), k)
}

/// Important cuts that may not use any vertex of `avoid`.
pub fn enumerate_important_avoiding(
    graph: &Digraph,
    x: &VertexSet,
    y: &VertexSet,
    avoid: &VertexSet,
    k: usize,
) -> Result<Vec<Cut>, CutError> {
    check_query(graph, x, y)?;
    let sets = important_cut_sets(graph, x, y, avoid, k);
    Ok(sets
        .into_iter()
        .map(|vertices| {
            let reach = graph.remove(&vertices).reachable_from(x);
            Cut {
                vertices,
                source: x.clone(),
                sink: y.clone(),
                reach,
            }
        })
        .collect())
}

/// Important `(Y, X)`-cuts of the reversed graph, reported as `(X, Y)`-cuts.
pub fn enumerate_anti_important(graph: &Digraph, x: &VertexSet, y: &VertexSet, k: usize) -> Result<Vec<Cut>, CutError> {
    check_query(graph, x, y)?;
    let sets = important_cut_sets(&graph.reverse(), y, x, &VertexSet::new(), k);
    Ok(sets
        .into_iter()
        .map(|vertices| {
            let reach = graph.remove(&vertices).reachable_from(x);
            Cut {
                vertices,
                source: x.clone(),
                sink: y.clone(),
                reach,
            }
        })
        .collect())
}

/// Vertex sets of the important cuts, no validation of the query. An
/// overlapping query yields no cuts.
pub(crate) fn important_cut_sets(
    graph: &Digraph,
    x: &VertexSet,
    y: &VertexSet,
    avoid: &VertexSet,
    k: usize,
) -> Vec<VertexSet> {
    if x.intersection(y).next().is_some() {
        return Vec::new();
    }
    let mut spec = CutSpec::new(graph, x, y, avoid);
    spec.enumerate_important(k)
        .into_iter()
        .map(|c| c.into_iter().map(|i| graph.id(i)).collect())
        .collect()
}

pub(crate) enum LocalMinCut {
    Infeasible,
    TooLarge,
    Found { cut: Vec<usize>, reach: Vec<bool> },
}

/// A cut query over local vertex indices. `blocked` vertices may not be cut,
/// `alive == false` vertices are treated as deleted.
pub(crate) struct CutSpec<'g> {
    graph: &'g Digraph,
    pub(crate) source: Vec<bool>,
    pub(crate) sink: Vec<bool>,
    pub(crate) blocked: Vec<bool>,
    pub(crate) alive: Vec<bool>,
    pub(crate) capacity: Option<Vec<u64>>,
}

impl<'g> CutSpec<'g> {
    pub(crate) fn new(graph: &'g Digraph, x: &VertexSet, y: &VertexSet, avoid: &VertexSet) -> Self {
        CutSpec {
            graph,
            source: graph.mask(x),
            sink: graph.mask(y),
            blocked: graph.mask(avoid),
            alive: vec![true; graph.vertex_count()],
            capacity: None,
        }
    }

    fn fixed(&self, i: usize) -> bool {
        self.source[i] || self.sink[i] || self.blocked[i]
    }

    /// Whether some source reaches a sink through fixed vertices only.
    fn trivially_connected(&self) -> bool {
        let n = self.graph.vertex_count();
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| self.alive[i] && self.source[i]).collect();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(u) = stack.pop() {
            if self.sink[u] {
                return true;
            }
            for &w in self.graph.succ(u) {
                if self.alive[w] && !seen[w] && self.fixed(w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    pub(crate) fn min_cut(&self, budget: u64) -> LocalMinCut {
        if self.trivially_connected() {
            return LocalMinCut::Infeasible;
        }
        let mut net = FlowNet::build(self);
        if !net.max_flow(budget) {
            return LocalMinCut::TooLarge;
        }
        let sink_side = net.sink_side();
        let n = self.graph.vertex_count();
        let cut: Vec<usize> = (0..n)
            .filter(|&i| self.alive[i] && !sink_side[2 * i] && sink_side[2 * i + 1])
            .collect();
        let mut alive = self.alive.clone();
        for &i in &cut {
            alive[i] = false;
        }
        let reach = self.graph.reach_mask(&self.source, &alive, false);
        LocalMinCut::Found { cut, reach }
    }

    pub(crate) fn enumerate_important(&mut self, k: usize) -> Vec<Vec<usize>> {
        let mut candidates = Vec::new();
        let mut forced = Vec::new();
        let base_source = self.source.clone();
        let base_alive = self.alive.clone();
        self.enumerate_rec(k, &mut forced, &mut candidates);
        self.source = base_source;
        self.alive = base_alive;
        let mut result: Vec<Vec<usize>> = candidates
            .into_iter()
            .filter(|c| self.is_important(c))
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        result.sort();
        result
    }

    fn enumerate_rec(&mut self, k: usize, forced: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let (cut, reach) = match self.min_cut(k as u64) {
            LocalMinCut::Found { cut, reach, .. } => (cut, reach),
            _ => return,
        };
        if cut.is_empty() {
            out.push(forced.clone());
            return;
        }
        let v = cut[0];
        if k > 0 {
            self.alive[v] = false;
            forced.push(v);
            self.enumerate_rec(k - 1, forced, out);
            forced.pop();
            self.alive[v] = true;
        }
        let saved = self.source.clone();
        for (i, &r) in reach.iter().enumerate() {
            if r {
                self.source[i] = true;
            }
        }
        self.source[v] = true;
        self.enumerate_rec(k, forced, out);
        self.source = saved;
    }

    /// Importance test: the set must separate, be inclusion-minimal, and be
    /// the unique minimum cut between its own reach set and the sinks.
    pub(crate) fn is_important(&self, cut: &[usize]) -> bool {
        if cut.iter().any(|&i| self.fixed(i) || !self.alive[i]) {
            return false;
        }
        let mut alive = self.alive.clone();
        for &i in cut {
            alive[i] = false;
        }
        let reach = self.graph.reach_mask(&self.source, &alive, false);
        if reach.iter().zip(&self.sink).any(|(&r, &s)| r && s) {
            return false;
        }
        for &v in cut {
            alive[v] = true;
            let r = self.graph.reach_mask(&self.source, &alive, false);
            alive[v] = false;
            if !r.iter().zip(&self.sink).any(|(&a, &s)| a && s) {
                return false;
            }
        }
        let pushed = CutSpec {
            graph: self.graph,
            source: reach,
            sink: self.sink.clone(),
            blocked: self.blocked.clone(),
            alive: self.alive.clone(),
            capacity: None,
        };
        match pushed.min_cut(cut.len() as u64) {
            LocalMinCut::Found { cut: furthest, .. } => {
                let mut mine = cut.to_vec();
                mine.sort_unstable();
                furthest == mine
            }
            _ => false,
        }
    }
}

/// Residual network on the split graph: vertex `i` becomes `2i -> 2i+1`,
/// plus a super source and super sink.
struct FlowNet {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    source: usize,
    sink: usize,
}

impl FlowNet {
    fn build(spec: &CutSpec<'_>) -> FlowNet {
        let g = spec.graph;
        let n = g.vertex_count();
        let mut net = FlowNet {
            adj: vec![Vec::new(); 2 * n + 2],
            to: Vec::new(),
            cap: Vec::new(),
            source: 2 * n,
            sink: 2 * n + 1,
        };
        for i in 0..n {
            if !spec.alive[i] {
                continue;
            }
            let c = if spec.fixed(i) {
                INF
            } else {
                spec.capacity.as_ref().map_or(1, |c| c[i])
            };
            net.add_edge(2 * i, 2 * i + 1, c);
            for &j in g.succ(i) {
                if spec.alive[j] && j != i {
                    net.add_edge(2 * i + 1, 2 * j, INF);
                }
            }
            if spec.source[i] {
                net.add_edge(net.source, 2 * i, INF);
            }
            if spec.sink[i] {
                net.add_edge(2 * i + 1, net.sink, INF);
            }
        }
        net
    }

    fn add_edge(&mut self, a: usize, b: usize, c: u64) {
        self.adj[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.adj[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    /// Augments until no path remains; returns false as soon as the flow exceeds `budget`.
    fn max_flow(&mut self, budget: u64) -> bool {
        let mut flow = 0u64;
        let nodes = self.adj.len();
        let mut prev_edge = vec![usize::MAX; nodes];
        loop {
            prev_edge.iter_mut().for_each(|p| *p = usize::MAX);
            let mut queue = VecDeque::from([self.source]);
            let mut found = false;
            'bfs: while let Some(a) = queue.pop_front() {
                for &e in &self.adj[a] {
                    let b = self.to[e];
                    if self.cap[e] > 0 && b != self.source && prev_edge[b] == usize::MAX {
                        prev_edge[b] = e;
                        if b == self.sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(b);
                    }
                }
            }
            if !found {
                return true;
            }
            let mut bottleneck = u64::MAX;
            let mut b = self.sink;
            while b != self.source {
                let e = prev_edge[b];
                bottleneck = bottleneck.min(self.cap[e]);
                b = self.to[e ^ 1];
            }
            let mut b = self.sink;
            while b != self.source {
                let e = prev_edge[b];
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                b = self.to[e ^ 1];
            }
            flow = flow.saturating_add(bottleneck);
            if flow > budget {
                return false;
            }
        }
    }

    /// Nodes that can still reach the sink in the residual network.
    fn sink_side(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[self.sink] = true;
        let mut stack = vec![self.sink];
        while let Some(b) = stack.pop() {
            for &e in &self.adj[b] {
                // e: b -> a, its twin a -> b carries the residual we need
                let a = self.to[e];
                if !seen[a] && self.cap[e ^ 1] > 0 {
                    seen[a] = true;
                    stack.push(a);
                }
            }
        }
        seen
    }
}
