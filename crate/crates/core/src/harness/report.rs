//! Running a solver on an instance and reporting the outcome as JSON.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use super::{Instance, Kind};
use crate::approx2::{approx2_solve_with, ApproxOutcome};
use crate::digraph::VertexSet;
use crate::exact_kl::solve_exact_kl_min;
use crate::multiway::{solve_arc_terminal_with, solve_multiway_min, MultiwayOptions, ShadowMode};
use crate::oracle::{brute_force_arc_terminal, brute_force_multiway, brute_force_opt};
use crate::search::{SearchCtx, SearchStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    ExactKl,
    Approx2,
    Multiway,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "solution")]
    Solution,
    #[serde(rename = "no-solution-at-k")]
    NoSolutionAtK,
    /// The 2-approximation proved that no solution of size at most `k` exists.
    #[serde(rename = "no-solution-at-2k-approx")]
    NoSolutionApprox,
    #[serde(rename = "timeout")]
    Timeout,
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub algo: Algo,
    pub seed: u64,
    pub shadow_mode: ShadowMode,
    pub rounds: usize,
    pub timeout: Option<Duration>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let opts = MultiwayOptions::default();
        SolveConfig {
            algo: Algo::ExactKl,
            seed: 0,
            shadow_mode: opts.shadow_mode,
            rounds: opts.rounds,
            timeout: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportStats {
    #[serde(flatten)]
    pub search: SearchStats,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub status: Status,
    /// 1-indexed, sorted.
    pub solution: Vec<u32>,
    pub size: usize,
    pub kind: String,
    pub algo: Algo,
    pub k: usize,
    pub seed: u64,
    pub shadow_mode: ShadowMode,
    pub rounds: usize,
    pub stats: ReportStats,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("algorithm {algo:?} does not accept {kind} instances")]
    Unsupported { algo: Algo, kind: Kind },
    #[error("{0}")]
    Instance(String),
}

/// Runs the configured algorithm. Exact algorithms and the brute-force
/// oracle report a minimum solution; the approximation reports a solution
/// of size at most twice the optimum.
pub fn solve(inst: &Instance, config: &SolveConfig) -> Result<SolveReport, SolveError> {
    let ctx = SearchCtx::new(config.seed).with_timeout(config.timeout);
    let opts = MultiwayOptions {
        shadow_mode: config.shadow_mode,
        rounds: config.rounds,
    };
    let start = Instant::now();
    let unsupported = || SolveError::Unsupported {
        algo: config.algo,
        kind: inst.kind(),
    };
    let outcome: Result<Option<VertexSet>, ()> = match (config.algo, inst) {
        (Algo::ExactKl, Instance::Multicut(m)) => solve_exact_kl_min(m, &ctx).map_err(drop),
        (Algo::Approx2, Instance::Multicut(m)) => approx2_solve_with(m, &ctx)
            .map(|o| match o {
                ApproxOutcome::Solution(x) => Some(x),
                ApproxOutcome::NoSolutionAtMostK => None,
            })
            .map_err(drop),
        (Algo::Multiway, Instance::Multiway(m)) => solve_multiway_min(&m.graph, &m.terminals, m.k, opts, &ctx)
            .map_err(|e| SolveError::Instance(e.to_string()))?
            .map_err(drop),
        (Algo::Multiway, Instance::ArcTerminal(a)) => {
            let mut found = Ok(None);
            for budget in 0..=a.k() {
                found = solve_arc_terminal_with(&a.with_k(budget), opts, &ctx).map_err(drop);
                if !matches!(found, Ok(None)) {
                    break;
                }
            }
            found
        }
        (Algo::Brute, Instance::Multicut(m)) => Ok(brute_force_opt(m).witness),
        (Algo::Brute, Instance::Multiway(m)) => Ok(brute_force_multiway(&m.graph, &m.terminals, m.k).witness),
        (Algo::Brute, Instance::ArcTerminal(a)) => Ok(brute_force_arc_terminal(a).witness),
        _ => return Err(unsupported()),
    };
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let (status, solution) = match outcome {
        Ok(Some(x)) => (Status::Solution, x),
        Ok(None) if config.algo == Algo::Approx2 => (Status::NoSolutionApprox, VertexSet::new()),
        Ok(None) => (Status::NoSolutionAtK, VertexSet::new()),
        Err(()) => (Status::Timeout, VertexSet::new()),
    };
    Ok(SolveReport {
        status,
        size: solution.len(),
        solution: solution.iter().map(|v| v.0 + 1).collect(),
        kind: inst.kind().to_string(),
        algo: config.algo,
        k: inst.k(),
        seed: config.seed,
        shadow_mode: config.shadow_mode,
        rounds: config.rounds,
        stats: ReportStats {
            search: ctx.stats(),
            elapsed_ms,
        },
    })
}
