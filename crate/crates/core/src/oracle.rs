//! Brute-force reference solvers.
//!
//! Every oracle enumerates vertex subsets by increasing size and checks a
//! direct transcription of the problem's predicate. Only graph primitives
//! (reachability, strongly connected components) are shared with the
//! solvers.

use std::collections::{BTreeMap, BTreeSet};

use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::exact_kl::MulticutInstance;
use crate::multiway::ArcTerminalInstance;

/// Instances above this many vertices are still solved but flagged.
pub const LARGE_INSTANCE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub feasible: bool,
    pub optimum: Option<usize>,
    pub witness: Option<VertexSet>,
    /// Every solution of size at most `k`, when requested.
    pub solutions: Option<Vec<VertexSet>>,
    pub large_instance_warning: bool,
}

/// All subsets of `items` with at most `k` elements, by size and then
/// lexicographically.
pub fn subsets_by_size(items: &[Vertex], k: usize) -> Vec<VertexSet> {
    let mut items = items.to_vec();
    items.sort();
    let mut out = Vec::new();
    for size in 0..=k.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            let mut pos = size;
            while pos > 0 && idx[pos - 1] == items.len() - size + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for j in pos..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

fn minimize(n: usize, candidates: &[Vertex], k: usize, valid: impl Fn(&VertexSet) -> bool) -> OracleReport {
    let witness = subsets_by_size(candidates, k).into_iter().find(|x| valid(x));
    OracleReport {
        feasible: witness.is_some(),
        optimum: witness.as_ref().map(|x| x.len()),
        witness,
        solutions: None,
        large_instance_warning: n > LARGE_INSTANCE,
    }
}

fn all_valid(candidates: &[Vertex], k: usize, valid: impl Fn(&VertexSet) -> bool) -> Vec<VertexSet> {
    subsets_by_size(candidates, k).into_iter().filter(|x| valid(x)).collect()
}

fn vertices(graph: &Digraph) -> Vec<Vertex> {
    graph.vertices().collect()
}

/// Component index of every vertex of `D - x`.
fn components(graph: &Digraph, x: &VertexSet) -> BTreeMap<Vertex, usize> {
    graph
        .remove(x)
        .scc_decompose()
        .into_iter()
        .enumerate()
        .flat_map(|(i, c)| c.into_iter().map(move |v| (v, i)))
        .collect()
}

/// Every request has an endpoint in `x` or its endpoints lie in different
/// strongly connected components of `D - x`.
pub fn multicut_valid(graph: &Digraph, requests: &[(Vertex, Vertex)], x: &VertexSet) -> bool {
    let comp = components(graph, x);
    requests.iter().all(|(s, t)| match (comp.get(s), comp.get(t)) {
        (Some(a), Some(b)) => a != b,
        _ => true,
    })
}

pub fn brute_force_opt(inst: &MulticutInstance) -> OracleReport {
    let g = inst.graph();
    minimize(g.vertex_count(), &vertices(g), inst.k(), |x| multicut_valid(g, inst.requests(), x))
}

/// All solutions of size at most `k`, canonically ordered.
pub fn enumerate_all_solutions(inst: &MulticutInstance, k: usize) -> Vec<VertexSet> {
    enumerate_solutions_avoiding(inst, k, &VertexSet::new())
}

/// All solutions of size at most `k` disjoint from `avoid`.
pub fn enumerate_solutions_avoiding(inst: &MulticutInstance, k: usize, avoid: &VertexSet) -> Vec<VertexSet> {
    let g = inst.graph();
    let free: Vec<Vertex> = g.vertices().filter(|v| !avoid.contains(v)).collect();
    all_valid(&free, k, |x| multicut_valid(g, inst.requests(), x))
}

/// Arcs of `A_i`: the pairs of `S_i x T_i` present in the graph.
fn terminal_arcs(inst: &ArcTerminalInstance) -> Vec<(Vertex, Vertex, usize)> {
    let g = inst.graph();
    let mut arcs = Vec::new();
    for (i, set) in inst.sets().iter().enumerate() {
        for &u in &set.tails {
            for &v in &set.heads {
                if g.has_arc(u, v) {
                    arcs.push((u, v, i));
                }
            }
        }
    }
    arcs
}

/// No strongly connected component of `D - x` contains arcs of two arc
/// sets; with a compression context also `x ∩ Y = ∅` and no path from
/// `y_j` to `y_i` for `j > i` survives.
pub fn arc_terminal_valid(inst: &ArcTerminalInstance, x: &VertexSet) -> bool {
    let g = inst.graph();
    let y = inst.y();
    if y.iter().any(|v| x.contains(v)) {
        return false;
    }
    let comp = components(g, x);
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (u, v, i) in terminal_arcs(inst) {
        let (Some(&a), Some(&b)) = (comp.get(&u), comp.get(&v)) else { continue };
        if a != b {
            continue;
        }
        if *owner.entry(a).or_insert(i) != i {
            return false;
        }
    }
    let rest = g.remove(x);
    for (j, &yj) in y.iter().enumerate() {
        let reach = rest.reachable_from(&[yj].into());
        if y[..j].iter().any(|yi| reach.contains(yi)) {
            return false;
        }
    }
    true
}

pub fn brute_force_arc_terminal(inst: &ArcTerminalInstance) -> OracleReport {
    let g = inst.graph();
    minimize(g.vertex_count(), &vertices(g), inst.k(), |x| arc_terminal_valid(inst, x))
}

pub fn enumerate_arc_terminal_solutions(inst: &ArcTerminalInstance, k: usize) -> Vec<VertexSet> {
    all_valid(&vertices(inst.graph()), k, |x| arc_terminal_valid(inst, x))
}

/// Vertices outside `t ∪ x` that cannot reach `t`, or cannot be reached
/// from `t`, in `D - x`.
pub fn shadow(graph: &Digraph, t: &VertexSet, x: &VertexSet) -> VertexSet {
    let rest = graph.remove(x);
    rest.vertices()
        .filter(|v| !t.contains(v))
        .filter(|&v| {
            let from_v = rest.reachable_from(&[v].into());
            let to_v = t.iter().any(|&s| rest.reachable_from(&[s].into()).contains(&v));
            from_v.is_disjoint(t) || !to_v
        })
        .collect()
}

/// Literal closed-walk search: does `D - x` have a closed walk using arcs of
/// two different arc sets? Explores states (start, current, sets used).
pub fn closed_walk_conflict(inst: &ArcTerminalInstance, x: &VertexSet) -> bool {
    let g = inst.graph().remove(x);
    let arcs = terminal_arcs(inst);
    let label = |u: Vertex, v: Vertex| -> Vec<usize> {
        arcs.iter().filter(|&&(a, b, _)| a == u && b == v).map(|&(_, _, i)| i).collect()
    };
    for start in g.vertices() {
        let mut seen: BTreeSet<(Vertex, BTreeSet<usize>)> = BTreeSet::new();
        let mut stack = vec![(start, BTreeSet::new())];
        while let Some((v, used)) = stack.pop() {
            if !seen.insert((v, used.clone())) {
                continue;
            }
            for w in g.out_neighbors(v) {
                let labels = label(v, w);
                let mut options: Vec<BTreeSet<usize>> = Vec::new();
                if labels.is_empty() {
                    options.push(used.clone());
                }
                for i in labels {
                    let mut next = used.clone();
                    next.insert(i);
                    // keep at most two witnesses
                    while next.len() > 2 {
                        let last = *next.iter().next_back().expect("nonempty");
                        next.remove(&last);
                    }
                    options.push(next);
                }
                for next in options {
                    if w == start && next.len() >= 2 {
                        return true;
                    }
                    stack.push((w, next));
                }
            }
        }
    }
    false
}

/// No two surviving terminals are strongly connected in `D - x`.
pub fn multiway_oracle_valid(graph: &Digraph, terminals: &VertexSet, x: &VertexSet) -> bool {
    let rest = graph.remove(x);
    let alive: Vec<Vertex> = terminals.iter().copied().filter(|t| rest.contains(*t)).collect();
    alive.iter().all(|&a| {
        let reach = rest.reachable_from(&[a].into());
        alive
            .iter()
            .all(|&b| a == b || !reach.contains(&b) || !rest.reachable_from(&[b].into()).contains(&a))
    })
}

pub fn brute_force_multiway(graph: &Digraph, terminals: &VertexSet, k: usize) -> OracleReport {
    minimize(graph.vertex_count(), &vertices(graph), k, |x| {
        multiway_oracle_valid(graph, terminals, x)
    })
}

/// Skew multicut with undeletable terminals: no `(s_j, t_i)`-path, `j >= i`.
pub fn brute_force_skew(graph: &Digraph, pairs: &[(Vertex, Vertex)], k: usize) -> OracleReport {
    let terminals: VertexSet = pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
    let free: Vec<Vertex> = graph.vertices().filter(|v| !terminals.contains(v)).collect();
    minimize(graph.vertex_count(), &free, k, |x| {
        let rest = graph.remove(x);
        pairs.iter().enumerate().all(|(j, &(s, _))| {
            let reach = rest.reachable_from(&[s].into());
            pairs[..=j].iter().all(|(_, t)| !reach.contains(t))
        })
    })
}

/// Vertices reachable from `x` in `D - s`.
fn reach_set(graph: &Digraph, x: &VertexSet, s: &VertexSet) -> VertexSet {
    graph.remove(s).reachable_from(x)
}

/// Important `(X, Y)`-cuts of size at most `k`, by the definition: cuts
/// disjoint from `X ∪ Y`, inclusion-minimal, and with no cut `S'`,
/// `|S'| <= |S|`, whose reach strictly contains the reach of `S`.
pub fn brute_force_important(graph: &Digraph, x: &VertexSet, y: &VertexSet, k: usize) -> BTreeSet<VertexSet> {
    let free: Vec<Vertex> = graph.vertices().filter(|v| !x.contains(v) && !y.contains(v)).collect();
    let is_cut = |s: &VertexSet| reach_set(graph, x, s).is_disjoint(y);
    let cuts: Vec<(VertexSet, VertexSet)> = subsets_by_size(&free, k)
        .into_iter()
        .filter(|s| is_cut(s))
        .map(|s| {
            let r = reach_set(graph, x, &s);
            (s, r)
        })
        .collect();
    cuts.iter()
        .filter(|(s, _)| {
            s.iter().all(|v| {
                let mut smaller = s.clone();
                smaller.remove(v);
                !is_cut(&smaller)
            })
        })
        .filter(|(s, r)| {
            !cuts
                .iter()
                .any(|(s2, r2)| s2.len() <= s.len() && r2.len() > r.len() && r.is_subset(r2))
        })
        .map(|(s, _)| s.clone())
        .collect()
}

/// Undirected graph for the vertex multicut oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    pub vertices: VertexSet,
    pub edges: Vec<(Vertex, Vertex)>,
}

/// Requests with both endpoints alive end up in different connected
/// components of `G - x`.
pub fn undirected_multicut_valid(g: &UndirectedGraph, requests: &[(Vertex, Vertex)], x: &VertexSet) -> bool {
    let mut parent: BTreeMap<Vertex, Vertex> = g.vertices.iter().filter(|v| !x.contains(v)).map(|&v| (v, v)).collect();
    fn find(parent: &mut BTreeMap<Vertex, Vertex>, v: Vertex) -> Vertex {
        let p = parent[&v];
        if p == v {
            return v;
        }
        let root = find(parent, p);
        parent.insert(v, root);
        root
    }
    for &(a, b) in &g.edges {
        if x.contains(&a) || x.contains(&b) {
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent.insert(ra, rb);
    }
    requests.iter().all(|&(s, t)| {
        x.contains(&s) || x.contains(&t) || find(&mut parent, s) != find(&mut parent, t)
    })
}

pub fn brute_force_undirected_multicut(g: &UndirectedGraph, requests: &[(Vertex, Vertex)], k: usize) -> OracleReport {
    let vs: Vec<Vertex> = g.vertices.iter().copied().collect();
    minimize(vs.len(), &vs, k, |x| undirected_multicut_valid(g, requests, x))
}

/// Some simple cycle of `D - x` uses one of the arcs in `marked`.
fn cycle_through(graph: &Digraph, marked: &[(Vertex, Vertex)], x: &VertexSet) -> bool {
    let rest = graph.remove(x);
    marked.iter().any(|&(u, v)| {
        if !rest.has_arc(u, v) {
            return false;
        }
        // a simple path v ~> u closes the cycle
        let mut stack = vec![v];
        let mut seen = VertexSet::from([v]);
        while let Some(a) = stack.pop() {
            if a == u {
                return true;
            }
            for b in rest.out_neighbors(a) {
                if seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        false
    })
}

/// Every cycle through an arc of `marked` meets `x`.
pub fn subset_fvs_valid(graph: &Digraph, marked: &[(Vertex, Vertex)], x: &VertexSet) -> bool {
    !cycle_through(graph, marked, x)
}

pub fn brute_force_subset_fvs(graph: &Digraph, marked: &[(Vertex, Vertex)], k: usize) -> OracleReport {
    minimize(graph.vertex_count(), &vertices(graph), k, |x| subset_fvs_valid(graph, marked, x))
}

fn acyclic(graph: &Digraph) -> bool {
    // Kahn's algorithm
    let mut indeg: BTreeMap<Vertex, usize> = graph.vertices().map(|v| (v, graph.in_neighbors(v).count())).collect();
    let mut ready: Vec<Vertex> = indeg.iter().filter(|&(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut removed = 0;
    while let Some(v) = ready.pop() {
        removed += 1;
        for w in graph.out_neighbors(v) {
            let d = indeg.get_mut(&w).expect("known vertex");
            *d -= 1;
            if *d == 0 {
                ready.push(w);
            }
        }
    }
    removed == graph.vertex_count()
}

/// Directed Feedback Vertex Set.
pub fn brute_force_dfvs(graph: &Digraph, k: usize) -> OracleReport {
    minimize(graph.vertex_count(), &vertices(graph), k, |x| acyclic(&graph.remove(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::vset;
    use crate::multiway::ArcSet;

    #[test]
    fn subset_order() {
        let items = [Vertex(3), Vertex(1), Vertex(2)];
        let subs = subsets_by_size(&items, 3);
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[1], vset([1]));
        assert_eq!(subs[4], vset([1, 2]));
        assert_eq!(subs[7], vset([1, 2, 3]));
        assert_eq!(subsets_by_size(&[], 2), vec![VertexSet::new()]);
    }

    #[test]
    fn multicut_examples() {
        let edge = MulticutInstance::new(Digraph::from_arcs(2, &[(0, 1), (1, 0)]), vec![(Vertex(0), Vertex(1))], 1).unwrap();
        assert_eq!(brute_force_opt(&edge).optimum, Some(1));
        assert!(!brute_force_opt(&edge.with_k(0)).feasible);
        let one_way = MulticutInstance::new(Digraph::from_arcs(2, &[(0, 1)]), vec![(Vertex(0), Vertex(1))], 3).unwrap();
        assert_eq!(brute_force_opt(&one_way).optimum, Some(0));
        let dag = Digraph::from_arcs(4, &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        let reqs = vec![(Vertex(0), Vertex(2)), (Vertex(1), Vertex(3))];
        assert_eq!(brute_force_opt(&MulticutInstance::new(dag, reqs, 0).unwrap()).optimum, Some(0));
    }

    #[test]
    fn enumerate_examples() {
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 0)]);
        let free = MulticutInstance::new(g.clone(), vec![], 2).unwrap();
        assert_eq!(enumerate_all_solutions(&free, 2).len(), 1 + 3 + 3);
        let stuck = MulticutInstance::new(g, vec![(Vertex(0), Vertex(1))], 0).unwrap();
        assert!(enumerate_all_solutions(&stuck, 0).is_empty());
    }

    #[test]
    fn important_examples() {
        let path = Digraph::from_arcs(4, &[(0, 1), (1, 2), (2, 3)]);
        let found = brute_force_important(&path, &vset([0]), &vset([3]), 1);
        assert_eq!(found, BTreeSet::from([vset([2])]));
        let direct = Digraph::from_arcs(2, &[(0, 1)]);
        assert!(brute_force_important(&direct, &vset([0]), &vset([1]), 2).is_empty());
        let apart = Digraph::from_arcs(2, &[]);
        assert_eq!(
            brute_force_important(&apart, &vset([0]), &vset([1]), 2),
            BTreeSet::from([VertexSet::new()])
        );
    }

    #[test]
    fn arc_terminal_examples() {
        let g = Digraph::from_arcs(2, &[(0, 1), (1, 0)]);
        let single = ArcTerminalInstance::new(g, vec![ArcSet { tails: vset([0]), heads: vset([1]) }], 0).unwrap();
        assert_eq!(brute_force_arc_terminal(&single).optimum, Some(0));
        let loops = Digraph::new([Vertex(0)], [(Vertex(0), Vertex(0))]).unwrap();
        let set = ArcSet { tails: vset([0]), heads: vset([0]) };
        let two = ArcTerminalInstance::new(loops, vec![set.clone(), set], 1).unwrap();
        let report = brute_force_arc_terminal(&two);
        assert_eq!(report.witness, Some(vset([0])));
        assert!(closed_walk_conflict(&two, &VertexSet::new()));
        assert!(!closed_walk_conflict(&two, &vset([0])));
    }

    #[test]
    fn reduction_oracles() {
        let tri = UndirectedGraph {
            vertices: vset([0, 1, 2]),
            edges: vec![(Vertex(0), Vertex(1)), (Vertex(1), Vertex(2)), (Vertex(0), Vertex(2))],
        };
        assert_eq!(brute_force_undirected_multicut(&tri, &[(Vertex(0), Vertex(1))], 2).optimum, Some(1));
        let cycle = Digraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(brute_force_dfvs(&cycle, 1).optimum, Some(1));
        assert_eq!(brute_force_subset_fvs(&cycle, &[(Vertex(0), Vertex(1))], 1).optimum, Some(1));
        assert_eq!(brute_force_subset_fvs(&cycle, &[], 1).optimum, Some(0));
        let star = Digraph::from_arcs(4, &[(1, 0), (0, 1), (2, 0), (0, 2), (3, 0), (0, 3)]);
        assert_eq!(brute_force_multiway(&star, &vset([1, 2, 3]), 1).witness, Some(vset([0])));
    }

    #[test]
    fn large_instances_are_flagged() {
        let g = Digraph::from_arcs(17, &[]);
        let inst = MulticutInstance::new(g, vec![], 0).unwrap();
        assert!(brute_force_opt(&inst).large_instance_warning);
    }
}
