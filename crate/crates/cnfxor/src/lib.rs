//! A toolkit for random CNF-XOR formulas: the joint random model over
//! fixed-width CNF clauses and variable-width XOR clauses, an XOR-aware
//! DPLL solver, solution-space geometry measurements, the closed-form
//! separation theory, and the runtime-scaling experiment pipeline.

pub mod dimacs;
pub mod experiments;
pub mod formula;
pub mod geometry;
pub mod report;
pub mod sampler;
pub mod solver;
pub mod theory;

pub use formula::{Assignment, CnfClause, CnfXorFormula, FormulaError, Literal, Var, XorClause};
pub use sampler::{sample_formula, ModelParams, RngStream};
pub use solver::gf2::{count_solutions_xor, XorSystem};
pub use solver::{solve, SolveResult, SolveStats, SolveStatus, SolverConfig};
