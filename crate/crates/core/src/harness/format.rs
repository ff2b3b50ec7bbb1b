//! The line-oriented instance format.
//!
//! ```text
//! p <kind> n m <requests|terminals|arc sets> k
//! a u v        arc
//! c s t        cut request (symdicut)
//! t v          terminal (symdimw)
//! A i          arc set i (arcterm), followed by
//! S i v        tail of arc set i
//! T i v        head of arc set i
//! # comment
//! ```
//!
//! Vertices are numbered from 1 in files and from 0 in memory.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Instance, Kind, MultiwayInstance};
use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::exact_kl::MulticutInstance;
use crate::multiway::{ArcSet, ArcTerminalInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("directive `{0}` is not allowed in a {1} file")]
    WrongKind(String, Kind),
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("missing header")]
    MissingHeader,
    #[error("vertex {0} is out of range 1..={1}")]
    VertexOutOfRange(u64, usize),
    #[error("arc set {0} is out of range or undeclared")]
    BadArcSet(u64),
    #[error("expected {0} fields")]
    FieldCount(usize),
    #[error("`{0}` is not a nonnegative integer")]
    BadNumber(String),
    #[error("{0}")]
    BadKind(String),
    #[error("header declares {expected} {what} but {found} were given")]
    CountMismatch { what: &'static str, expected: usize, found: usize },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

struct Header {
    line: usize,
    kind: Kind,
    n: usize,
    m: usize,
    count: usize,
    k: usize,
}

fn number(tok: &str, line: usize) -> Result<u64, ParseError> {
    tok.parse().map_err(|_| err(line, ParseErrorKind::BadNumber(tok.to_string())))
}

fn fields(toks: &[&str], want: usize, line: usize) -> Result<(), ParseError> {
    if toks.len() != want {
        return Err(err(line, ParseErrorKind::FieldCount(want)));
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<Header> = None;
    let mut arcs = Vec::new();
    let mut requests = Vec::new();
    let mut terminals = Vec::new();
    let mut sets: BTreeMap<u64, (usize, ArcSet)> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let directive = toks[0];
        if directive == "p" {
            if header.is_some() {
                return Err(err(line, ParseErrorKind::DuplicateHeader));
            }
            fields(&toks, 6, line)?;
            let kind: Kind = toks[1].parse().map_err(|e| err(line, ParseErrorKind::BadKind(e)))?;
            header = Some(Header {
                line,
                kind,
                n: number(toks[2], line)? as usize,
                m: number(toks[3], line)? as usize,
                count: number(toks[4], line)? as usize,
                k: number(toks[5], line)? as usize,
            });
            continue;
        }
        if !["a", "c", "t", "A", "S", "T"].contains(&directive) {
            return Err(err(line, ParseErrorKind::UnknownDirective(directive.to_string())));
        }
        let Some(h) = &header else {
            return Err(err(line, ParseErrorKind::MissingHeader));
        };
        let vertex = |tok: &str| -> Result<Vertex, ParseError> {
            let v = number(tok, line)?;
            if v == 0 || v > h.n as u64 {
                return Err(err(line, ParseErrorKind::VertexOutOfRange(v, h.n)));
            }
            Ok(Vertex(v as u32 - 1))
        };
        let allowed = match directive {
            "a" => true,
            "c" => h.kind == Kind::Multicut,
            "t" => h.kind == Kind::Multiway,
            _ => h.kind == Kind::ArcTerminal,
        };
        if !allowed {
            return Err(err(line, ParseErrorKind::WrongKind(directive.to_string(), h.kind)));
        }
        match directive {
            "a" => {
                fields(&toks, 3, line)?;
                arcs.push((vertex(toks[1])?, vertex(toks[2])?));
            }
            "c" => {
                fields(&toks, 3, line)?;
                let (s, t) = (vertex(toks[1])?, vertex(toks[2])?);
                if s == t {
                    return Err(err(line, ParseErrorKind::Invalid(format!("request ({}, {}) has equal endpoints", s.0 + 1, t.0 + 1))));
                }
                requests.push((s, t));
            }
            "t" => {
                fields(&toks, 2, line)?;
                terminals.push(vertex(toks[1])?);
            }
            "A" => {
                fields(&toks, 2, line)?;
                let i = number(toks[1], line)?;
                if i == 0 || i > h.count as u64 || sets.contains_key(&i) {
                    return Err(err(line, ParseErrorKind::BadArcSet(i)));
                }
                sets.insert(i, (line, ArcSet { tails: VertexSet::new(), heads: VertexSet::new() }));
            }
            _ => {
                fields(&toks, 3, line)?;
                let i = number(toks[1], line)?;
                let v = vertex(toks[2])?;
                let Some((_, set)) = sets.get_mut(&i) else {
                    return Err(err(line, ParseErrorKind::BadArcSet(i)));
                };
                if directive == "S" {
                    set.tails.insert(v);
                } else {
                    set.heads.insert(v);
                }
            }
        }
    }

    let Some(h) = header else {
        return Err(err(text.lines().count().max(1), ParseErrorKind::MissingHeader));
    };
    let mismatch = |what, found| err(h.line, ParseErrorKind::CountMismatch { what, expected: h.count, found });
    if arcs.len() != h.m {
        return Err(err(h.line, ParseErrorKind::CountMismatch { what: "arcs", expected: h.m, found: arcs.len() }));
    }
    let graph = Digraph::new((0..h.n as u32).map(Vertex), arcs).expect("arc endpoints are range-checked");
    let invalid = |line: usize, e: &dyn std::fmt::Display| err(line, ParseErrorKind::Invalid(e.to_string()));
    Ok(match h.kind {
        Kind::Multicut => {
            if requests.len() != h.count {
                return Err(mismatch("requests", requests.len()));
            }
            Instance::Multicut(MulticutInstance::new(graph, requests, h.k).map_err(|e| invalid(h.line, &e))?)
        }
        Kind::Multiway => {
            let set: VertexSet = terminals.iter().copied().collect();
            if terminals.len() != h.count || set.len() != terminals.len() {
                return Err(mismatch("distinct terminals", set.len()));
            }
            Instance::Multiway(MultiwayInstance { graph, terminals: set, k: h.k })
        }
        Kind::ArcTerminal => {
            if sets.len() != h.count {
                return Err(mismatch("arc sets", sets.len()));
            }
            let first_line = sets.values().map(|(l, _)| *l).min().unwrap_or(h.line);
            let list: Vec<ArcSet> = sets.into_values().map(|(_, s)| s).collect();
            Instance::ArcTerminal(ArcTerminalInstance::new(graph, list, h.k).map_err(|e| invalid(first_line, &e))?)
        }
    })
}

/// Canonical text: header, sorted arcs, then requests in order, sorted
/// terminals or arc-set blocks.
pub fn write_instance(inst: &Instance) -> String {
    let graph = inst.graph();
    let count = match inst {
        Instance::Multicut(m) => m.requests().len(),
        Instance::Multiway(m) => m.terminals.len(),
        Instance::ArcTerminal(a) => a.sets().len(),
    };
    let mut out = String::new();
    let n = graph.vertices().map(|v| v.0 as usize + 1).max().unwrap_or(0);
    let _ = writeln!(out, "p {} {} {} {} {}", inst.kind(), n, graph.arc_count(), count, inst.k());
    for (u, v) in graph.arcs() {
        let _ = writeln!(out, "a {} {}", u.0 + 1, v.0 + 1);
    }
    match inst {
        Instance::Multicut(m) => {
            for (s, t) in m.requests() {
                let _ = writeln!(out, "c {} {}", s.0 + 1, t.0 + 1);
            }
        }
        Instance::Multiway(m) => {
            for t in &m.terminals {
                let _ = writeln!(out, "t {}", t.0 + 1);
            }
        }
        Instance::ArcTerminal(a) => {
            for (i, set) in a.sets().iter().enumerate() {
                let _ = writeln!(out, "A {}", i + 1);
                for v in &set.tails {
                    let _ = writeln!(out, "S {} {}", i + 1, v.0 + 1);
                }
                for v in &set.heads {
                    let _ = writeln!(out, "T {} {}", i + 1, v.0 + 1);
                }
            }
        }
    }
    out
}

/// Reads a solution: either a JSON report with a `solution` array or
/// whitespace-separated vertex numbers. Vertices are 1-indexed.
pub fn parse_solution(text: &str) -> Result<VertexSet, ParseError> {
    let trimmed = text.trim_start();
    let numbers: Vec<(usize, u64)> = if trimmed.starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(trimmed).map_err(|e| err(e.line(), ParseErrorKind::Invalid(e.to_string())))?;
        let list = value
            .get("solution")
            .and_then(|s| s.as_array())
            .ok_or_else(|| err(1, ParseErrorKind::Invalid("report has no solution array".into())))?;
        list.iter()
            .map(|v| {
                v.as_u64()
                    .map(|x| (1, x))
                    .ok_or_else(|| err(1, ParseErrorKind::BadNumber(v.to_string())))
            })
            .collect::<Result<_, _>>()?
    } else {
        let mut out = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("");
            for tok in content.split_whitespace() {
                out.push((idx + 1, number(tok, idx + 1)?));
            }
        }
        out
    };
    numbers
        .into_iter()
        .map(|(line, v)| {
            if v == 0 || v > u32::MAX as u64 {
                Err(err(line, ParseErrorKind::VertexOutOfRange(v, u32::MAX as usize)))
            } else {
                Ok(Vertex(v as u32 - 1))
            }
        })
        .collect()
}
