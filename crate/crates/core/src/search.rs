//! Per-solve bookkeeping shared by the branching solvers.

use std::cell::{Cell, RefCell};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Raised when a solve runs past its deadline.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("search budget exhausted")]
pub struct Interrupted;

pub type SearchResult<T> = Result<T, Interrupted>;

/// Counters reported alongside a solve.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub branch_nodes: u64,
    pub oracle_calls: u64,
    pub cut_enumerations: u64,
    /// Largest leaf count observed in a single-center subcall, paired with its budget.
    pub max_single_center_leaves: u64,
    pub single_center_bound_violations: u64,
    pub max_depth: u64,
}

/// Mutable context threaded through a solve: counters, an optional deadline,
/// and the single seeded RNG that drives every randomized construction.
pub struct SearchCtx {
    deadline: Option<Instant>,
    branch_nodes: Cell<u64>,
    oracle_calls: Cell<u64>,
    cut_enumerations: Cell<u64>,
    max_single_center_leaves: Cell<u64>,
    single_center_bound_violations: Cell<u64>,
    max_depth: Cell<u64>,
    rng: RefCell<ChaCha8Rng>,
    seed: u64,
}

impl Default for SearchCtx {
    fn default() -> Self {
        SearchCtx::new(0)
    }
}

impl SearchCtx {
    pub fn new(seed: u64) -> Self {
        SearchCtx {
            deadline: None,
            branch_nodes: Cell::new(0),
            oracle_calls: Cell::new(0),
            cut_enumerations: Cell::new(0),
            max_single_center_leaves: Cell::new(0),
            single_center_bound_violations: Cell::new(0),
            max_depth: Cell::new(0),
            rng: RefCell::new(ChaCha8Rng::seed_from_u64(seed)),
            seed,
        }
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.deadline = timeout.map(|t| Instant::now() + t);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Counts a branch node and checks the deadline.
    pub fn tick(&self) -> SearchResult<()> {
        let n = self.branch_nodes.get() + 1;
        self.branch_nodes.set(n);
        match self.deadline {
            Some(d) if n.is_multiple_of(64) && Instant::now() >= d => Err(Interrupted),
            _ => Ok(()),
        }
    }

    pub fn count_oracle_call(&self) {
        self.oracle_calls.set(self.oracle_calls.get() + 1);
    }

    pub fn count_cut_enumeration(&self) {
        self.cut_enumerations.set(self.cut_enumerations.get() + 1);
    }

    pub(crate) fn record_single_center(&self, leaves: u64, budget: usize) {
        if leaves > self.max_single_center_leaves.get() {
            self.max_single_center_leaves.set(leaves);
        }
        let bound = 8u64.saturating_pow(budget as u32);
        if leaves > bound {
            self.single_center_bound_violations
                .set(self.single_center_bound_violations.get() + 1);
        }
    }

    pub(crate) fn record_depth(&self, depth: usize) {
        if depth as u64 > self.max_depth.get() {
            self.max_depth.set(depth as u64);
        }
    }

    pub(crate) fn with_rng<T>(&self, f: impl FnOnce(&mut ChaCha8Rng) -> T) -> T {
        f(&mut self.rng.borrow_mut())
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            branch_nodes: self.branch_nodes.get(),
            oracle_calls: self.oracle_calls.get(),
            cut_enumerations: self.cut_enumerations.get(),
            max_single_center_leaves: self.max_single_center_leaves.get(),
            single_center_bound_violations: self.single_center_bound_violations.get(),
            max_depth: self.max_depth.get(),
        }
    }
}
