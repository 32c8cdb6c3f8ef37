//! Solution-space structure of small formulas: exhaustive enumeration,
//! d-cluster decomposition, separation, and the XOR null-space cross-check.
//!
//! Everything here is an oracle for desk-scale formulas. Enumeration walks
//! all 2^n assignments, clustering builds connected components of the
//! pairwise Hamming graph with union-find, and for XOR-only formulas the
//! minimum null-space weight gives the separation by an independent route:
//! two solutions of an XOR system differ exactly by a null-space vector.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formula::{Assignment, CnfXorFormula};
use crate::solver::gf2::XorSystem;

/// Variables beyond this make exhaustive enumeration unreasonable.
pub const MAX_ENUMERATION_VARS: u32 = 30;

/// Null-space dimensions beyond this make the min-weight sweep unreasonable.
pub const MAX_KERNEL_DIM: u32 = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("{n} variables exceed the exhaustive-enumeration limit of {MAX_ENUMERATION_VARS}")]
    TooManyVariables { n: u32 },
    #[error("solution cap must be at least 1")]
    ZeroCap,
    #[error("solution set was truncated at the cap; rerun with a larger cap")]
    Truncated,
    #[error("null-space dimension {dim} exceeds the sweep limit of {MAX_KERNEL_DIM}")]
    NullSpaceTooLarge { dim: u32 },
    #[error("XOR system is inconsistent; it has no solutions")]
    Inconsistent,
}

/// A minimum Hamming distance. `Infinite` stands in when fewer than two
/// solutions (or no nonzero null-space vector) exist.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Separation {
    Finite(u32),
    Infinite,
}

impl Separation {
    pub fn as_finite(self) -> Option<u32> {
        match self {
            Separation::Finite(d) => Some(d),
            Separation::Infinite => None,
        }
    }

    pub fn is_at_most(self, w: u32) -> bool {
        matches!(self, Separation::Finite(d) if d <= w)
    }
}

impl Serialize for Separation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Separation::Finite(d) => serializer.serialize_some(d),
            Separation::Infinite => serializer.serialize_none(),
        }
    }
}

impl std::fmt::Display for Separation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Separation::Finite(d) => write!(f, "{d}"),
            Separation::Infinite => write!(f, "inf"),
        }
    }
}

/// All satisfying assignments of a formula, sorted by bit-vector value,
/// with a flag telling whether the cap cut the enumeration short.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    n: u32,
    solutions: Vec<Assignment>,
    truncated: bool,
}

impl SolutionSet {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn solutions(&self) -> &[Assignment] {
        &self.solutions
    }

    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }
}

/// Exhaustively enumerate satisfying assignments, keeping at most `cap`.
pub fn enumerate_solutions(
    formula: &CnfXorFormula,
    cap: usize,
) -> Result<SolutionSet, GeometryError> {
    let n = formula.n();
    if n > MAX_ENUMERATION_VARS {
        return Err(GeometryError::TooManyVariables { n });
    }
    if cap == 0 {
        return Err(GeometryError::ZeroCap);
    }
    let mut solutions = Vec::new();
    let mut truncated = false;
    for index in 0..1u64 << n {
        let a = Assignment::from_index(n, index);
        if formula.evaluate(&a).expect("enumeration length matches") {
            if solutions.len() == cap {
                truncated = true;
                break;
            }
            solutions.push(a);
        }
    }
    Ok(SolutionSet {
        n,
        solutions,
        truncated,
    })
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(len: usize) -> UnionFind {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
            components: len,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.components -= 1;
    }
}

/// Maximal d-clusters: connected components of the graph joining solutions
/// at Hamming distance ≤ d. Components are returned as sorted index lists
/// into `sols.solutions()`; any two distinct components are d-separated.
pub fn cluster_decomposition(
    sols: &SolutionSet,
    d: u32,
) -> Result<Vec<Vec<usize>>, GeometryError> {
    if sols.is_truncated() {
        return Err(GeometryError::Truncated);
    }
    let items = sols.solutions();
    let mut uf = UnionFind::new(items.len());
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if items[i].hamming(&items[j]).expect("equal lengths") <= d {
                uf.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..items.len() {
        let root = uf.find(i);
        groups.entry(root).or_default().push(i);
    }
    Ok(groups.into_values().collect())
}

/// Minimum pairwise Hamming distance over the set; `Infinite` with fewer
/// than two solutions.
pub fn separation(sols: &SolutionSet) -> Separation {
    let items = sols.solutions();
    let mut best: Option<u32> = None;
    'outer: for i in 0..items.len() {
        for j in i + 1..items.len() {
            let d = items[i].hamming(&items[j]).expect("equal lengths");
            if best.is_none_or(|b| d < b) {
                best = Some(d);
                if d <= 1 {
                    break 'outer; // distinct solutions cannot get closer
                }
            }
        }
    }
    match best {
        Some(d) => Separation::Finite(d),
        None => Separation::Infinite,
    }
}

/// Minimum Hamming weight over nonzero null-space vectors of a consistent
/// XOR system, found by a Gray-code sweep over all basis combinations.
/// Equals the separation of the system's solution set.
pub fn kernel_min_weight(sys: &XorSystem) -> Result<Separation, GeometryError> {
    if !sys.is_consistent() {
        return Err(GeometryError::Inconsistent);
    }
    let dim = sys.null_space_dim();
    if dim > MAX_KERNEL_DIM {
        return Err(GeometryError::NullSpaceTooLarge { dim });
    }
    if dim == 0 {
        return Ok(Separation::Infinite);
    }
    let basis = sys.null_space_basis();
    let mut current = Assignment::all_false(sys.n());
    let mut best = u32::MAX;
    for code in 1u64..1 << dim {
        // Gray-code step: flipping one basis vector moves between adjacent
        // combinations, visiting every nonzero combination exactly once.
        let flip = code.trailing_zeros() as usize;
        current.xor_in_place(&basis[flip]);
        let w = current.weight();
        if w < best {
            best = w;
            if best == 1 {
                break;
            }
        }
    }
    Ok(Separation::Finite(best))
}

/// Summary of the solution-space structure of one formula.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub solution_count: usize,
    pub min_pairwise_distance: Separation,
    /// Number of d-clusters for every d from 1 to the solution-set diameter.
    pub clusters_at_d: BTreeMap<u32, usize>,
    /// GF(2) rank of the XOR subsystem; only for XOR-only formulas.
    pub kernel_rank: Option<u32>,
    /// Minimum nonzero null-space weight; only for XOR-only formulas with a
    /// null space small enough to sweep.
    pub kernel_min_weight: Option<Separation>,
}

impl SeparationReport {
    /// Enumerate the formula's solutions and measure their structure. Errors
    /// if enumeration exceeds `cap` so a partial set never masquerades as
    /// the full geometry.
    pub fn for_formula(formula: &CnfXorFormula, cap: usize) -> Result<SeparationReport, GeometryError> {
        let sols = enumerate_solutions(formula, cap)?;
        if sols.is_truncated() {
            return Err(GeometryError::Truncated);
        }

        let min_pairwise_distance = separation(&sols);
        let mut clusters_at_d = BTreeMap::new();
        let items = sols.solutions();
        if items.len() >= 2 {
            let mut diameter = 0;
            for i in 0..items.len() {
                for j in i + 1..items.len() {
                    diameter = diameter.max(items[i].hamming(&items[j]).expect("equal lengths"));
                }
            }
            for d in 1..=diameter {
                let clusters = cluster_decomposition(&sols, d)?;
                clusters_at_d.insert(d, clusters.len());
            }
        }

        let (kernel_rank, kernel_min_weight) = if formula.cnf().is_empty() {
            let sys = XorSystem::eliminate(formula.xors(), formula.n());
            if sys.is_consistent() {
                let weight = kernel_min_weight(&sys).ok();
                (Some(sys.rank()), weight)
            } else {
                (Some(sys.rank()), None)
            }
        } else {
            (None, None)
        };

        Ok(SeparationReport {
            solution_count: sols.count(),
            min_pairwise_distance,
            clusters_at_d,
            kernel_rank,
            kernel_min_weight,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Var, XorClause};
    use crate::sampler::{sample_xor_clause, RngStream};
    use crate::solver::gf2::count_solutions_xor;

    fn xor(vars: &[u32], rhs: bool) -> XorClause {
        XorClause::new(vars.iter().map(|&v| Var::new(v)).collect(), rhs).unwrap()
    }

    fn set_of(bools: &[&[bool]]) -> SolutionSet {
        let solutions: Vec<Assignment> = bools.iter().map(|b| Assignment::from_bools(b)).collect();
        SolutionSet {
            n: bools[0].len() as u32,
            solutions,
            truncated: false,
        }
    }

    #[test]
    fn enumeration_basics() {
        let empty = CnfXorFormula::empty(3);
        assert_eq!(enumerate_solutions(&empty, 100).unwrap().count(), 8);

        let chain =
            CnfXorFormula::new(3, vec![], vec![xor(&[1, 2], false), xor(&[2, 3], false)]).unwrap();
        let sols = enumerate_solutions(&chain, 100).unwrap();
        assert_eq!(sols.count(), 2);
        assert_eq!(sols.solutions()[0].to_bools(), vec![false, false, false]);
        assert_eq!(sols.solutions()[1].to_bools(), vec![true, true, true]);

        let falsum = CnfXorFormula::new(2, vec![], vec![xor(&[], true)]).unwrap();
        assert_eq!(enumerate_solutions(&falsum, 100).unwrap().count(), 0);

        assert_eq!(
            enumerate_solutions(&CnfXorFormula::empty(31), 10),
            Err(GeometryError::TooManyVariables { n: 31 })
        );
        let truncated = enumerate_solutions(&empty, 3).unwrap();
        assert!(truncated.is_truncated());
        assert_eq!(truncated.count(), 3);
        assert_eq!(
            cluster_decomposition(&truncated, 1),
            Err(GeometryError::Truncated)
        );
    }

    #[test]
    fn cluster_examples() {
        let two = set_of(&[&[false, false, false], &[true, true, true]]);
        assert_eq!(cluster_decomposition(&two, 1).unwrap().len(), 2);
        assert_eq!(cluster_decomposition(&two, 3).unwrap().len(), 1);

        let chain = set_of(&[
            &[false, false, false],
            &[false, false, true],
            &[false, true, true],
            &[true, true, true],
        ]);
        assert_eq!(cluster_decomposition(&chain, 1).unwrap().len(), 1);
    }

    #[test]
    fn separation_examples() {
        let two = set_of(&[&[false, false, false], &[true, true, true]]);
        assert_eq!(separation(&two), Separation::Finite(3));
        let one = set_of(&[&[true, false]]);
        assert_eq!(separation(&one), Separation::Infinite);
    }

    #[test]
    fn kernel_weight_examples() {
        // Full rank: trivial null space.
        let full = XorSystem::eliminate(&[xor(&[1], false), xor(&[2], true)], 2);
        assert_eq!(kernel_min_weight(&full), Ok(Separation::Infinite));

        // Null space spanned by (1,1,1).
        let chain = XorSystem::eliminate(&[xor(&[1, 2], false), xor(&[2, 3], false)], 3);
        assert_eq!(kernel_min_weight(&chain), Ok(Separation::Finite(3)));

        let bad = XorSystem::eliminate(&[xor(&[], true)], 2);
        assert_eq!(kernel_min_weight(&bad), Err(GeometryError::Inconsistent));
    }

    #[test]
    fn kernel_weight_matches_enumerated_separation() {
        // Dual-path agreement on random 12-row systems over 16 variables.
        for seed in 0..40u64 {
            let mut rng = RngStream::derive(seed, "geometry-test", 16, 0);
            let xors: Vec<XorClause> = (0..12)
                .map(|_| sample_xor_clause(16, 0.5, &mut rng).unwrap())
                .collect();
            let sys = XorSystem::eliminate(&xors, 16);
            if !sys.is_consistent() {
                continue;
            }
            let f = CnfXorFormula::new(16, vec![], xors).unwrap();
            let sols = enumerate_solutions(&f, 1 << 17).unwrap();
            assert!(!sols.is_truncated());
            assert_eq!(separation(&sols), kernel_min_weight(&sys).unwrap());
        }
    }

    #[test]
    fn cluster_counts_bracket_solution_count() {
        let mut rng = RngStream::new(77);
        let xors: Vec<XorClause> = (0..6)
            .map(|_| sample_xor_clause(10, 0.4, &mut rng).unwrap())
            .collect();
        let f = CnfXorFormula::new(10, vec![], xors.clone()).unwrap();
        let sols = enumerate_solutions(&f, 1 << 11).unwrap();
        if sols.count() < 2 {
            return;
        }
        if let Some(log2) = count_solutions_xor(&xors, 10) {
            assert_eq!(sols.count() as u64, 1 << log2);
        }
        let sep = separation(&sols).as_finite().unwrap();
        if sep > 1 {
            let below = cluster_decomposition(&sols, sep - 1).unwrap();
            assert_eq!(below.len(), sols.count());
        }
        let diameter = (0..sols.count())
            .flat_map(|i| {
                let items = sols.solutions();
                (i + 1..sols.count()).map(move |j| items[i].hamming(&items[j]).unwrap())
            })
            .max()
            .unwrap();
        assert_eq!(cluster_decomposition(&sols, diameter).unwrap().len(), 1);
    }

    #[test]
    fn report_on_xor_only_formula() {
        let f =
            CnfXorFormula::new(3, vec![], vec![xor(&[1, 2], false), xor(&[2, 3], false)]).unwrap();
        let report = SeparationReport::for_formula(&f, 100).unwrap();
        assert_eq!(report.solution_count, 2);
        assert_eq!(report.min_pairwise_distance, Separation::Finite(3));
        assert_eq!(report.kernel_rank, Some(2));
        assert_eq!(report.kernel_min_weight, Some(Separation::Finite(3)));
        assert_eq!(report.clusters_at_d.get(&1), Some(&2));
        assert_eq!(report.clusters_at_d.get(&3), Some(&1));
        // Non-increasing in d.
        let counts: Vec<usize> = report.clusters_at_d.values().copied().collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    }
}
