//! Instance files, generators, reduction encoders and solve reports.

pub mod encode;
pub mod format;
pub mod gen;
pub mod report;

use std::fmt;
use std::str::FromStr;

use crate::approx2::Compressible;
use crate::digraph::{Digraph, VertexSet};
use crate::exact_kl::{validate_solution, MulticutInstance};
use crate::multiway::{multiway_valid, ArcTerminalInstance};

pub use format::{parse_instance, parse_solution, write_instance, ParseError, ParseErrorKind};
pub use gen::{gen_planted, gen_random};
pub use report::{solve, Algo, SolveConfig, SolveError, SolveReport, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// Symmetric directed multicut with requests.
    Multicut,
    /// Symmetric directed multiway cut with terminals.
    Multiway,
    /// The arc-terminal generalization of multiway cut.
    ArcTerminal,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Multicut => "symdicut",
            Kind::Multiway => "symdimw",
            Kind::ArcTerminal => "arcterm",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symdicut" => Ok(Kind::Multicut),
            "symdimw" => Ok(Kind::Multiway),
            "arcterm" => Ok(Kind::ArcTerminal),
            other => Err(format!("unknown problem kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiwayInstance {
    pub graph: Digraph,
    pub terminals: VertexSet,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Multicut(MulticutInstance),
    Multiway(MultiwayInstance),
    ArcTerminal(ArcTerminalInstance),
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::Multicut(_) => Kind::Multicut,
            Instance::Multiway(_) => Kind::Multiway,
            Instance::ArcTerminal(_) => Kind::ArcTerminal,
        }
    }

    pub fn graph(&self) -> &Digraph {
        match self {
            Instance::Multicut(m) => m.graph(),
            Instance::Multiway(m) => &m.graph,
            Instance::ArcTerminal(a) => a.graph(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Instance::Multicut(m) => m.k(),
            Instance::Multiway(m) => m.k,
            Instance::ArcTerminal(a) => a.k(),
        }
    }

    pub fn with_k(&self, k: usize) -> Instance {
        match self {
            Instance::Multicut(m) => Instance::Multicut(m.with_k(k)),
            Instance::Multiway(m) => Instance::Multiway(MultiwayInstance { k, ..m.clone() }),
            Instance::ArcTerminal(a) => Instance::ArcTerminal(a.with_k(k)),
        }
    }

    /// Whether `x` is a solution of size at most `budget`.
    pub fn is_solution(&self, x: &VertexSet, budget: usize) -> bool {
        if !x.iter().all(|&v| self.graph().contains(v)) {
            return false;
        }
        match self {
            Instance::Multicut(m) => validate_solution(&m.with_k(budget), x),
            Instance::Multiway(m) => multiway_valid(&m.graph, &m.terminals, budget, x),
            Instance::ArcTerminal(a) => x.len() <= budget && a.accepts(x),
        }
    }
}
