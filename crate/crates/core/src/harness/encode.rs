//! Encodings of related problems as symmetric multicut instances.

use thiserror::Error;

use crate::digraph::{Digraph, Vertex};
use crate::exact_kl::{InstanceError, MulticutInstance};
use crate::oracle::UndirectedGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("vertex {0} carries a loop")]
    Loop(Vertex),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Undirected vertex multicut: every edge becomes two opposite arcs.
pub fn encode_undirected(g: &UndirectedGraph, requests: &[(Vertex, Vertex)], k: usize) -> Result<MulticutInstance, EncodeError> {
    let arcs = g.edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]);
    let graph = Digraph::new(g.vertices.iter().copied(), arcs).map_err(|e| match e {
        crate::digraph::GraphError::DanglingArc(u, _) => InstanceError::UnknownVertex(u),
        _ => unreachable!("construction only reports dangling arcs"),
    })?;
    Ok(MulticutInstance::new(graph, requests.to_vec(), k)?)
}

/// Directed Subset FVS: the marked arcs are the requests.
pub fn encode_subset_fvs(graph: &Digraph, marked: &[(Vertex, Vertex)], k: usize) -> Result<MulticutInstance, EncodeError> {
    if let Some(&(v, _)) = marked.iter().find(|(u, v)| u == v) {
        return Err(EncodeError::Loop(v));
    }
    Ok(MulticutInstance::new(graph.clone(), marked.to_vec(), k)?)
}

/// Directed FVS: a request for every pair of vertices.
pub fn encode_dfvs(graph: &Digraph, k: usize) -> Result<MulticutInstance, EncodeError> {
    if let Some(v) = graph.vertices().find(|&v| graph.has_arc(v, v)) {
        return Err(EncodeError::Loop(v));
    }
    let vs: Vec<Vertex> = graph.vertices().collect();
    let requests = vs
        .iter()
        .enumerate()
        .flat_map(|(i, &u)| vs[i + 1..].iter().map(move |&v| (u, v)))
        .collect();
    Ok(MulticutInstance::new(graph.clone(), requests, k)?)
}

/// Makes `t` undeletable by adding `k` false twins with fresh ids; the
/// twins copy every arc and request of `t`. Returns the new instance and
/// the twin ids.
pub fn pin_vertex(inst: &MulticutInstance, t: Vertex) -> Result<(MulticutInstance, Vec<Vertex>), EncodeError> {
    let graph = inst.graph();
    if !graph.contains(t) {
        return Err(InstanceError::UnknownVertex(t).into());
    }
    let next = graph.vertices().map(|v| v.0 + 1).max().unwrap_or(0);
    let twins: Vec<Vertex> = (0..inst.k() as u32).map(|i| Vertex(next + i)).collect();
    let copy = |v: Vertex, w: Vertex| if v == t { w } else { v };
    let mut arcs: Vec<(Vertex, Vertex)> = graph.arcs().collect();
    let mut requests = inst.requests().to_vec();
    for &w in &twins {
        arcs.extend(graph.arcs().filter(|&(a, b)| a == t || b == t).map(|(a, b)| (copy(a, w), copy(b, w))));
        requests.extend(
            inst.requests()
                .iter()
                .filter(|&&(s, u)| s == t || u == t)
                .map(|&(s, u)| (copy(s, w), copy(u, w))),
        );
    }
    let vertices = graph.vertices().chain(twins.iter().copied());
    let graph = Digraph::new(vertices, arcs).expect("twin arcs use known ids");
    Ok((MulticutInstance::new(graph, requests, inst.k())?, twins))
}
