//! Satisfiability of CNF-XOR formulas: DPLL search with unit propagation on
//! CNF clauses plus GF(2) reasoning on XOR clauses.
//!
//! The XOR subsystem is fully Gaussian-eliminated up front. During search
//! the reduced rows propagate like clauses: a row with a single unassigned
//! variable forces it, a fully assigned row with the wrong parity is a
//! conflict. Branching picks the lowest-numbered unassigned non-pivot
//! variable with a seeded coin for the sign, so a run is reproducible from
//! `(formula, seed)` alone. Restricting decisions to non-pivot columns keeps
//! pure-XOR formulas conflict-free: every pivot is implied by its row once
//! the row's free variables are set.
//!
//! Backtracking is chronological. There is no clause learning, no restarts
//! and no preprocessing beyond the XOR elimination; the solver exists to
//! measure scaling shape, not to compete.

pub mod gf2;

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::formula::{Assignment, CnfXorFormula};
use gf2::XorSystem;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SolveStatus {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "TIMEOUT")]
    Timeout,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub wall_time_s: f64,
}

/// Outcome of a solve call. `witness` is present exactly when the status is
/// [`SolveStatus::Sat`] and satisfies the formula.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub witness: Option<Assignment>,
    pub stats: SolveStats,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Wall-clock budget; `None` never times out. Checked before every
    /// decision and every 256 search steps, so the overshoot is bounded by
    /// the propagation work of one check interval — microseconds at desk
    /// scale, well under a millisecond.
    pub timeout: Option<Duration>,
    /// Seed for the branching-sign coin.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            timeout: Some(Duration::from_secs(10)),
            seed: 0,
        }
    }
}

/// Decide satisfiability of `formula`.
pub fn solve(formula: &CnfXorFormula, config: &SolverConfig) -> SolveResult {
    let start = Instant::now();
    let deadline = config.timeout.map(|t| start + t);

    let sys = XorSystem::eliminate(formula.xors(), formula.n());
    if !sys.is_consistent() {
        return finish(SolveStatus::Unsat, None, SolveStats::default(), start, formula);
    }
    if formula.cnf().is_empty() {
        // Pure XOR: read a solution straight off the reduced system.
        let witness = sys
            .particular_solution()
            .expect("consistent system has a particular solution");
        return finish(
            SolveStatus::Sat,
            Some(witness),
            SolveStats::default(),
            start,
            formula,
        );
    }
    if formula.cnf().iter().any(|c| c.is_empty()) {
        return finish(SolveStatus::Unsat, None, SolveStats::default(), start, formula);
    }

    let mut searcher = Searcher::new(formula, &sys, config.seed);
    let (status, witness) = searcher.run(deadline);
    finish(status, witness, searcher.stats, start, formula)
}

fn finish(
    status: SolveStatus,
    witness: Option<Assignment>,
    mut stats: SolveStats,
    start: Instant,
    formula: &CnfXorFormula,
) -> SolveResult {
    stats.wall_time_s = start.elapsed().as_secs_f64();
    if let Some(w) = &witness {
        debug_assert_eq!(formula.evaluate(w), Ok(true), "unsound witness");
    }
    SolveResult {
        status,
        witness,
        stats,
    }
}

struct ClauseState {
    lits: Vec<(u32, bool)>, // (variable index, negated)
    n_sat: u32,
    n_unassigned: u32,
}

struct RowState {
    cols: Vec<u32>,
    rhs: bool,
    parity: bool, // xor of assigned variable values in this row
    n_unassigned: u32,
}

#[derive(Clone, Copy)]
struct TrailEntry {
    var: u32,
    decision: bool,
    flipped: bool,
}

struct Searcher {
    n: usize,
    value: Vec<Option<bool>>,
    unassigned: Vec<u64>,
    branchable_mask: Vec<u64>, // non-pivot columns
    clauses: Vec<ClauseState>,
    rows: Vec<RowState>,
    occ_cnf: Vec<Vec<(u32, bool)>>,
    occ_xor: Vec<Vec<u32>>,
    trail: Vec<TrailEntry>,
    queue: VecDeque<(u32, bool)>,
    rng: ChaCha12Rng,
    stats: SolveStats,
}

struct Conflict;

impl Searcher {
    fn new(formula: &CnfXorFormula, sys: &XorSystem, seed: u64) -> Searcher {
        let n = formula.n() as usize;
        let words = n.div_ceil(64);
        let mut unassigned = vec![u64::MAX; words];
        if !n.is_multiple_of(64) && words > 0 {
            unassigned[words - 1] = (1u64 << (n % 64)) - 1;
        }
        let mut branchable_mask = unassigned.clone();
        for &col in sys.pivot_cols() {
            branchable_mask[col / 64] &= !(1u64 << (col % 64));
        }

        let mut occ_cnf: Vec<Vec<(u32, bool)>> = vec![Vec::new(); n];
        let clauses: Vec<ClauseState> = formula
            .cnf()
            .iter()
            .enumerate()
            .map(|(ci, clause)| {
                let lits: Vec<(u32, bool)> = clause
                    .literals()
                    .iter()
                    .map(|l| (l.var().index() as u32, l.is_negated()))
                    .collect();
                for &(v, neg) in &lits {
                    occ_cnf[v as usize].push((ci as u32, neg));
                }
                ClauseState {
                    n_sat: 0,
                    n_unassigned: lits.len() as u32,
                    lits,
                }
            })
            .collect();

        let mut occ_xor: Vec<Vec<u32>> = vec![Vec::new(); n];
        let rows: Vec<RowState> = (0..sys.rank() as usize)
            .map(|ri| {
                let cols: Vec<u32> = sys.row_cols(ri).iter().map(|&c| c as u32).collect();
                for &c in &cols {
                    occ_xor[c as usize].push(ri as u32);
                }
                RowState {
                    rhs: sys.row_rhs(ri),
                    parity: false,
                    n_unassigned: cols.len() as u32,
                    cols,
                }
            })
            .collect();

        let mut searcher = Searcher {
            n,
            value: vec![None; n],
            unassigned,
            branchable_mask,
            clauses,
            rows,
            occ_cnf,
            occ_xor,
            trail: Vec::with_capacity(n),
            queue: VecDeque::new(),
            rng: ChaCha12Rng::seed_from_u64(seed),
            stats: SolveStats::default(),
        };
        searcher.seed_units();
        searcher
    }

    /// Queue implications visible before any decision: unit clauses and
    /// single-variable rows.
    fn seed_units(&mut self) {
        for clause in &self.clauses {
            if let [(v, neg)] = clause.lits[..] {
                self.queue.push_back((v, !neg));
            }
        }
        for row in &self.rows {
            if let [col] = row.cols[..] {
                self.queue.push_back((col, row.rhs));
            }
        }
    }

    fn run(&mut self, deadline: Option<Instant>) -> (SolveStatus, Option<Assignment>) {
        let mut tick: u32 = 0;
        loop {
            if self.propagate().is_some() {
                if !self.resolve_conflict() {
                    return (SolveStatus::Unsat, None);
                }
                continue;
            }
            tick = tick.wrapping_add(1);
            if tick & 0xff == 0 {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return (SolveStatus::Timeout, None);
                    }
                }
            }
            match self.next_branch_var() {
                Some(var) => {
                    if let Some(d) = deadline {
                        if Instant::now() >= d {
                            return (SolveStatus::Timeout, None);
                        }
                    }
                    self.stats.decisions += 1;
                    let sign = self.rng.random_bool(0.5);
                    if self.apply(var, sign, true, false).is_some()
                        && !self.resolve_conflict()
                    {
                        return (SolveStatus::Unsat, None);
                    }
                }
                None => {
                    debug_assert!(self.value.iter().all(|v| v.is_some()));
                    let mut witness = Assignment::all_false(self.n as u32);
                    for (i, v) in self.value.iter().enumerate() {
                        witness.set_bit(i, v.unwrap_or(false));
                    }
                    return (SolveStatus::Sat, Some(witness));
                }
            }
        }
    }

    fn propagate(&mut self) -> Option<Conflict> {
        while let Some((var, val)) = self.queue.pop_front() {
            match self.value[var as usize] {
                Some(v) if v == val => continue,
                Some(_) => {
                    self.queue.clear();
                    return Some(Conflict);
                }
                None => {
                    self.stats.propagations += 1;
                    if self.apply(var, val, false, false).is_some() {
                        self.queue.clear();
                        return Some(Conflict);
                    }
                }
            }
        }
        None
    }

    /// Assign `var := val`, update clause and row counters, and queue any
    /// implications. Returns a conflict if a clause ran out of literals or a
    /// row closed with the wrong parity.
    fn apply(&mut self, var: u32, val: bool, decision: bool, flipped: bool) -> Option<Conflict> {
        debug_assert!(self.value[var as usize].is_none());
        self.value[var as usize] = Some(val);
        self.unassigned[var as usize / 64] &= !(1u64 << (var % 64));
        self.trail.push(TrailEntry {
            var,
            decision,
            flipped,
        });

        let mut conflict = None;
        for &(ci, neg) in &self.occ_cnf[var as usize] {
            let clause = &mut self.clauses[ci as usize];
            clause.n_unassigned -= 1;
            if val != neg {
                clause.n_sat += 1;
            } else if clause.n_sat == 0 {
                if clause.n_unassigned == 0 {
                    conflict = Some(Conflict);
                } else if clause.n_unassigned == 1 {
                    let value = &self.value;
                    if let Some(&(v, n)) = clause
                        .lits
                        .iter()
                        .find(|&&(v, _)| value[v as usize].is_none())
                    {
                        self.queue.push_back((v, !n));
                    }
                }
            }
        }
        for &ri in &self.occ_xor[var as usize] {
            let row = &mut self.rows[ri as usize];
            row.n_unassigned -= 1;
            row.parity ^= val;
            if row.n_unassigned == 0 {
                if row.parity != row.rhs {
                    conflict = Some(Conflict);
                }
            } else if row.n_unassigned == 1 {
                let value = &self.value;
                if let Some(&col) = row.cols.iter().find(|&&c| value[c as usize].is_none()) {
                    self.queue.push_back((col, row.rhs ^ row.parity));
                }
            }
        }
        conflict
    }

    fn unassign(&mut self, var: u32, val: bool) {
        self.value[var as usize] = None;
        self.unassigned[var as usize / 64] |= 1u64 << (var % 64);
        for &(ci, neg) in &self.occ_cnf[var as usize] {
            let clause = &mut self.clauses[ci as usize];
            clause.n_unassigned += 1;
            if val != neg {
                clause.n_sat -= 1;
            }
        }
        for &ri in &self.occ_xor[var as usize] {
            let row = &mut self.rows[ri as usize];
            row.n_unassigned += 1;
            row.parity ^= val;
        }
    }

    /// Chronological backtracking: unwind the trail to the most recent
    /// untried decision and flip it. Returns false when the trail empties,
    /// i.e. the search space is exhausted.
    fn resolve_conflict(&mut self) -> bool {
        loop {
            self.queue.clear();
            let Some(entry) = self.trail.pop() else {
                return false;
            };
            let val = self.value[entry.var as usize].expect("trail entry is assigned");
            self.unassign(entry.var, val);
            if entry.decision && !entry.flipped {
                self.stats.decisions += 1;
                if self.apply(entry.var, !val, true, true).is_none() {
                    return true;
                }
                // The flip conflicts immediately; keep unwinding.
            }
        }
    }

    fn next_branch_var(&self) -> Option<u32> {
        for (wi, (&u, &b)) in self.unassigned.iter().zip(&self.branchable_mask).enumerate() {
            let open = u & b;
            if open != 0 {
                return Some((wi * 64) as u32 + open.trailing_zeros());
            }
        }
        None
    }
}
