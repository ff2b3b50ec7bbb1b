//! Directed graphs with stable vertex identities.
//!
//! A [`Digraph`] is immutable once built. Every derived graph (vertex removal,
//! block contraction, arc reversal) keeps the original [`Vertex`] ids of the
//! vertices that survive, so a vertex set computed on a derived graph can be
//! mapped back to the input through a [`ContractionMap`].
//!
//! Internally vertices are stored in ascending id order and adjacency is kept
//! as sorted lists of local indices. Local index order therefore coincides with
//! id order, which the rest of the crate relies on for deterministic branching.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fmt;

use thiserror::Error;

/// Opaque vertex identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Vertex(pub u32);

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Vertex {
    fn from(v: u32) -> Self {
        Vertex(v)
    }
}

pub type VertexSet = BTreeSet<Vertex>;

/// Builds a [`VertexSet`] from raw ids.
pub fn vset<I: IntoIterator<Item = u32>>(ids: I) -> VertexSet {
    ids.into_iter().map(Vertex).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc ({0}, {1}) has an endpoint that is not a vertex of the graph")]
    DanglingArc(Vertex, Vertex),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("contraction blocks overlap at vertex {0}")]
    ContractOverlap(Vertex),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Digraph {
    ids: Vec<Vertex>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("vertices", &self.ids.iter().map(|v| v.0).collect::<Vec<_>>())
            .field("arcs", &self.arcs().map(|(u, v)| (u.0, v.0)).collect::<Vec<_>>())
            .finish()
    }
}

impl Digraph {
    /// Builds a graph from a vertex collection and an arc list. Duplicate arcs
    /// are collapsed; loops are kept.
    pub fn new<V, A>(vertices: V, arcs: A) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = Vertex>,
        A: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut ids: Vec<Vertex> = vertices.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        let n = ids.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (u, v) in arcs {
            let iu = ids.binary_search(&u).map_err(|_| GraphError::DanglingArc(u, v))?;
            let iv = ids.binary_search(&v).map_err(|_| GraphError::DanglingArc(u, v))?;
            out[iu].push(iv);
            inn[iv].push(iu);
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Digraph { ids, out, inn })
    }

    /// Graph on vertices `0..n` with the given arcs.
    ///
    /// Panics if an arc endpoint is out of range.
    pub fn from_arcs(n: u32, arcs: &[(u32, u32)]) -> Self {
        Digraph::new(
            (0..n).map(Vertex),
            arcs.iter().map(|&(u, v)| (Vertex(u), Vertex(v))),
        )
        .expect("arc endpoint out of range")
    }

    /// Local-index constructor; `out` lists may be unsorted or contain repeats.
    pub(crate) fn from_local(ids: Vec<Vertex>, mut out: Vec<Vec<usize>>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let n = ids.len();
        let mut inn = vec![Vec::new(); n];
        for (u, list) in out.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            for &v in list.iter() {
                inn[v].push(u);
            }
        }
        Digraph { ids, out, inn }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.ids.iter().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.ids.iter().copied().collect()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(move |(u, list)| list.iter().map(move |&v| (self.ids[u], self.ids[v])))
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index_of(v).is_some()
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(iu), Some(iv)) => self.out[iu].binary_search(&iv).is_ok(),
            _ => false,
        }
    }

    pub fn out_neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let list: &[usize] = match self.index_of(v) {
            Some(i) => &self.out[i],
            None => &[],
        };
        list.iter().map(move |&j| self.ids[j])
    }

    pub fn in_neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let list: &[usize] = match self.index_of(v) {
            Some(i) => &self.inn[i],
            None => &[],
        };
        list.iter().map(move |&j| self.ids[j])
    }

    pub(crate) fn index_of(&self, v: Vertex) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    pub(crate) fn id(&self, i: usize) -> Vertex {
        self.ids[i]
    }

    pub(crate) fn ids(&self) -> &[Vertex] {
        &self.ids
    }

    pub(crate) fn succ(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub(crate) fn pred(&self, i: usize) -> &[usize] {
        &self.inn[i]
    }

    /// Local membership mask for a vertex set; ids absent from the graph are ignored.
    pub(crate) fn mask(&self, set: &VertexSet) -> Vec<bool> {
        let mut m = vec![false; self.ids.len()];
        for &v in set {
            if let Some(i) = self.index_of(v) {
                m[i] = true;
            }
        }
        m
    }

    pub(crate) fn set_from_mask(&self, mask: &[bool]) -> VertexSet {
        mask.iter()
            .enumerate()
            .filter(|&(_, &b)| b)
            .map(|(i, _)| self.ids[i])
            .collect()
    }

    /// Strongly connected components in topological order: for every arc
    /// `uv` with `u` in block `i` and `v` in block `j`, `i <= j`. Among
    /// the valid orders the one that always emits the available component
    /// with the smallest vertex id is chosen.
    pub fn scc_decompose(&self) -> Vec<VertexSet> {
        let alive = vec![true; self.ids.len()];
        let (comp, count) = self.scc_labels(&alive);
        self.topo_order_components(&comp, count, &alive)
            .into_iter()
            .map(|members| members.into_iter().map(|i| self.ids[i]).collect())
            .collect()
    }

    /// Tarjan's algorithm restricted to `alive` vertices. Returns a label per
    /// vertex (`usize::MAX` for dead vertices) and the number of components.
    pub(crate) fn scc_labels(&self, alive: &[bool]) -> (Vec<usize>, usize) {
        const UNSEEN: usize = usize::MAX;
        let n = self.ids.len();
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNSEEN; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut call: Vec<(usize, usize)> = Vec::new();
        let mut next_index = 0;
        let mut count = 0;

        for root in 0..n {
            if !alive[root] || index[root] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let succ = &self.out[v];
                if *pos < succ.len() {
                    let w = succ[*pos];
                    *pos += 1;
                    if !alive[w] {
                        continue;
                    }
                    if index[w] == UNSEEN {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp[w] = count;
                            if w == v {
                                break;
                            }
                        }
                        count += 1;
                    }
                }
            }
        }
        (comp, count)
    }

    /// Orders component labels topologically, breaking ties by smallest member.
    fn topo_order_components(&self, comp: &[usize], count: usize, alive: &[bool]) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); count];
        for (i, &c) in comp.iter().enumerate() {
            if alive[i] {
                members[c].push(i);
            }
        }
        let mut indeg = vec![0usize; count];
        let mut dag: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
        for u in 0..self.ids.len() {
            if !alive[u] {
                continue;
            }
            for &v in &self.out[u] {
                if alive[v] && comp[u] != comp[v] && dag[comp[u]].insert(comp[v]) {
                    indeg[comp[v]] += 1;
                }
            }
        }
        // members are pushed in increasing index order, so members[c][0] is the minimum
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..count)
            .filter(|&c| indeg[c] == 0)
            .map(|c| Reverse((members[c][0], c)))
            .collect();
        let mut order = Vec::with_capacity(count);
        while let Some(Reverse((_, c))) = heap.pop() {
            for &d in &dag[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    heap.push(Reverse((members[d][0], d)));
                }
            }
            order.push(std::mem::take(&mut members[c]));
        }
        order
    }

    /// Everything reachable from `sources` along arcs, sources included.
    /// Ids not present in the graph are ignored.
    pub fn reachable_from(&self, sources: &VertexSet) -> VertexSet {
        let alive = vec![true; self.ids.len()];
        let start = self.mask(sources);
        self.set_from_mask(&self.reach_mask(&start, &alive, false))
    }

    /// Vertices that can reach `targets`, targets included.
    pub fn reaching(&self, targets: &VertexSet) -> VertexSet {
        let alive = vec![true; self.ids.len()];
        let start = self.mask(targets);
        self.set_from_mask(&self.reach_mask(&start, &alive, true))
    }

    /// Forward (or backward) closure of `start` inside the `alive` vertices.
    pub(crate) fn reach_mask(&self, start: &[bool], alive: &[bool], backward: bool) -> Vec<bool> {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut queue: Vec<usize> = Vec::new();
        for i in 0..n {
            if start[i] && alive[i] {
                seen[i] = true;
                queue.push(i);
            }
        }
        while let Some(u) = queue.pop() {
            let next = if backward { &self.inn[u] } else { &self.out[u] };
            for &w in next {
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        seen
    }

    /// The arc-reversed graph.
    pub fn reverse(&self) -> Digraph {
        Digraph {
            ids: self.ids.clone(),
            out: self.inn.clone(),
            inn: self.out.clone(),
        }
    }

    /// Induced subgraph on `V(D) \ X`. Ids of `X` not in the graph are ignored.
    pub fn remove(&self, x: &VertexSet) -> Digraph {
        let dead = self.mask(x);
        self.retain_mask(&dead.iter().map(|d| !d).collect::<Vec<_>>())
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &VertexSet) -> Digraph {
        self.retain_mask(&self.mask(keep))
    }

    pub(crate) fn retain_mask(&self, keep: &[bool]) -> Digraph {
        let mut new_index = vec![usize::MAX; self.ids.len()];
        let mut ids = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = ids.len();
                ids.push(self.ids[i]);
            }
        }
        let mut out = vec![Vec::new(); ids.len()];
        for (u, list) in self.out.iter().enumerate() {
            if !keep[u] {
                continue;
            }
            out[new_index[u]] = list.iter().filter(|&&v| keep[v]).map(|&v| new_index[v]).collect();
        }
        Digraph::from_local(ids, out)
    }

    /// Adds arcs between existing vertices.
    pub fn with_arcs<I: IntoIterator<Item = (Vertex, Vertex)>>(&self, arcs: I) -> Result<Digraph, GraphError> {
        let mut out = self.out.clone();
        for (u, v) in arcs {
            let iu = self.index_of(u).ok_or(GraphError::DanglingArc(u, v))?;
            let iv = self.index_of(v).ok_or(GraphError::DanglingArc(u, v))?;
            out[iu].push(iv);
        }
        Ok(Digraph::from_local(self.ids.clone(), out))
    }

    /// Merges each block into its smallest member. An arc between two
    /// classes exists iff some arc existed between their members; an arc
    /// inside a block becomes a loop on the representative.
    pub fn contract(&self, blocks: &[VertexSet]) -> Result<(Digraph, ContractionMap), GraphError> {
        let n = self.ids.len();
        let mut rep: Vec<usize> = (0..n).collect();
        let mut claimed = vec![false; n];
        for block in blocks {
            let Some(&first) = block.iter().next() else { continue };
            let r = self.index_of(first).ok_or(GraphError::UnknownVertex(first))?;
            for &v in block {
                let i = self.index_of(v).ok_or(GraphError::UnknownVertex(v))?;
                if claimed[i] {
                    return Err(GraphError::ContractOverlap(v));
                }
                claimed[i] = true;
                rep[i] = r;
            }
        }
        let mut new_index = vec![usize::MAX; n];
        let mut ids = Vec::new();
        for i in 0..n {
            if rep[i] == i {
                new_index[i] = ids.len();
                ids.push(self.ids[i]);
            }
        }
        let mut out = vec![Vec::new(); ids.len()];
        for u in 0..n {
            for &v in &self.out[u] {
                out[new_index[rep[u]]].push(new_index[rep[v]]);
            }
        }
        let image = (0..n).map(|i| (self.ids[i], Some(self.ids[rep[i]]))).collect();
        Ok((Digraph::from_local(ids, out), ContractionMap { image }))
    }
}

/// Maps vertices of an original graph to their representatives in a derived
/// graph, or to `None` when the vertex was deleted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ContractionMap {
    image: BTreeMap<Vertex, Option<Vertex>>,
}

impl ContractionMap {
    pub fn identity(graph: &Digraph) -> Self {
        ContractionMap {
            image: graph.vertices().map(|v| (v, Some(v))).collect(),
        }
    }

    /// The map describing `graph.remove(x)`.
    pub fn deleting(graph: &Digraph, x: &VertexSet) -> Self {
        ContractionMap {
            image: graph
                .vertices()
                .map(|v| (v, if x.contains(&v) { None } else { Some(v) }))
                .collect(),
        }
    }

    pub fn image_of(&self, v: Vertex) -> Option<Vertex> {
        self.image.get(&v).copied().flatten()
    }

    pub fn deleted(&self) -> VertexSet {
        self.image.iter().filter(|(_, im)| im.is_none()).map(|(&v, _)| v).collect()
    }

    /// `self` followed by `next`. Vertices of the original graph whose image
    /// is not in `next`'s domain are treated as deleted.
    pub fn compose(&self, next: &ContractionMap) -> ContractionMap {
        ContractionMap {
            image: self
                .image
                .iter()
                .map(|(&v, im)| (v, im.and_then(|w| next.image_of(w))))
                .collect(),
        }
    }

    /// Forward image of a set of original vertices, deleted ones dropped.
    pub fn project(&self, set: &VertexSet) -> VertexSet {
        set.iter().filter_map(|&v| self.image_of(v)).collect()
    }

    /// All original vertices whose image lies in `set`.
    pub fn lift(&self, set: &VertexSet) -> VertexSet {
        self.image
            .iter()
            .filter(|(_, im)| im.is_some_and(|w| set.contains(&w)))
            .map(|(&v, _)| v)
            .collect()
    }
}
