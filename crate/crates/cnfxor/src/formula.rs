//! Formula types shared by every other module: literals, CNF clauses,
//! XOR clauses, CNF-XOR formulas, and packed truth assignments.
//!
//! Variables are numbered `1..=n` (the DIMACS convention) everywhere on the
//! public surface; zero-based indices are used only for bit positions and
//! matrix columns, via [`Var::index`]. Formulas are kept exactly as
//! constructed: duplicate clauses are retained and nothing is normalized or
//! simplified, so a sampled formula round-trips unchanged.

use std::fmt;
use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("assignment over {actual} variables does not match formula over {expected}")]
    LengthMismatch { expected: u32, actual: u32 },
    #[error("duplicate variable {0} within a clause")]
    DuplicateVariable(u32),
    #[error("variable {var} out of range 1..={n}")]
    VariableOutOfRange { var: u32, n: u32 },
}

/// A propositional variable, numbered from 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(NonZeroU32);

impl Var {
    /// # Panics
    ///
    /// Panics if `number` is zero; variable numbering starts at 1.
    pub fn new(number: u32) -> Var {
        Var(NonZeroU32::new(number).expect("variable numbers start at 1"))
    }

    pub fn number(self) -> u32 {
        self.0.get()
    }

    /// Zero-based position, for bit vectors and matrix columns.
    pub fn index(self) -> usize {
        (self.0.get() - 1) as usize
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    var: Var,
    negated: bool,
}

impl Literal {
    pub fn new(var: Var, negated: bool) -> Literal {
        Literal { var, negated }
    }

    pub fn positive(var: Var) -> Literal {
        Literal { var, negated: false }
    }

    pub fn negative(var: Var) -> Literal {
        Literal { var, negated: true }
    }

    /// From a signed DIMACS literal (`-3` is the negation of variable 3).
    ///
    /// # Panics
    ///
    /// Panics if `lit` is zero.
    pub fn from_dimacs(lit: i32) -> Literal {
        assert!(lit != 0, "DIMACS literals are nonzero");
        Literal {
            var: Var::new(lit.unsigned_abs()),
            negated: lit < 0,
        }
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var.number() as i32;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// True iff the literal holds when its variable takes `value`.
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals over distinct variables.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CnfClause {
    literals: Vec<Literal>,
}

impl CnfClause {
    /// Literal order is preserved; duplicate variables are rejected.
    pub fn new(literals: Vec<Literal>) -> Result<CnfClause, FormulaError> {
        let mut seen: Vec<u32> = literals.iter().map(|l| l.var().number()).collect();
        seen.sort_unstable();
        for pair in seen.windows(2) {
            if pair[0] == pair[1] {
                return Err(FormulaError::DuplicateVariable(pair[0]));
            }
        }
        Ok(CnfClause { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// At least one literal is true under `a`. The empty clause is constant false.
    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(a.value(l.var())))
    }
}

/// A parity constraint: the XOR of the listed variables must equal `rhs`.
///
/// `rhs = true` requires an odd number of the included variables to be true,
/// `rhs = false` an even number. The empty clause with `rhs = true` is
/// constant false; with `rhs = false` it is constant true.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct XorClause {
    vars: Vec<Var>,
    rhs: bool,
}

impl XorClause {
    /// Variables are stored sorted ascending; duplicates are rejected.
    pub fn new(mut vars: Vec<Var>, rhs: bool) -> Result<XorClause, FormulaError> {
        vars.sort_unstable();
        for pair in vars.windows(2) {
            if pair[0] == pair[1] {
                return Err(FormulaError::DuplicateVariable(pair[0].number()));
            }
        }
        Ok(XorClause { vars, rhs })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rhs(&self) -> bool {
        self.rhs
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        let parity = self
            .vars
            .iter()
            .fold(false, |acc, &v| acc ^ a.value(v));
        parity == self.rhs
    }
}

/// A conjunction of CNF clauses and XOR clauses over `n` variables.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CnfXorFormula {
    n: u32,
    cnf: Vec<CnfClause>,
    xors: Vec<XorClause>,
}

impl CnfXorFormula {
    /// Every variable in every clause must lie in `1..=n`. Clause lists are
    /// kept verbatim, duplicates included.
    pub fn new(
        n: u32,
        cnf: Vec<CnfClause>,
        xors: Vec<XorClause>,
    ) -> Result<CnfXorFormula, FormulaError> {
        for clause in &cnf {
            for lit in clause.literals() {
                let v = lit.var().number();
                if v > n {
                    return Err(FormulaError::VariableOutOfRange { var: v, n });
                }
            }
        }
        for clause in &xors {
            for var in clause.vars() {
                let v = var.number();
                if v > n {
                    return Err(FormulaError::VariableOutOfRange { var: v, n });
                }
            }
        }
        Ok(CnfXorFormula { n, cnf, xors })
    }

    pub fn empty(n: u32) -> CnfXorFormula {
        CnfXorFormula {
            n,
            cnf: Vec::new(),
            xors: Vec::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cnf(&self) -> &[CnfClause] {
        &self.cnf
    }

    pub fn xors(&self) -> &[XorClause] {
        &self.xors
    }

    /// True iff every CNF clause has a true literal and every XOR clause's
    /// parity condition holds.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, FormulaError> {
        if a.len() != self.n {
            return Err(FormulaError::LengthMismatch {
                expected: self.n,
                actual: a.len(),
            });
        }
        Ok(self.cnf.iter().all(|c| c.is_satisfied_by(a))
            && self.xors.iter().all(|x| x.is_satisfied_by(a)))
    }
}

const WORD_BITS: usize = 64;

fn words_for(n: u32) -> usize {
    (n as usize).div_ceil(WORD_BITS)
}

/// A total truth assignment, packed one bit per variable.
///
/// Bit `i` holds the value of variable `i + 1`. The same type doubles as a
/// plain n-bit vector for GF(2) null-space elements, where only Hamming
/// weight and XOR matter.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: u32,
    words: Vec<u64>,
}

impl Assignment {
    pub fn all_false(n: u32) -> Assignment {
        Assignment {
            n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Assignment {
        let mut a = Assignment::all_false(bits.len() as u32);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                a.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        a
    }

    /// Assignment whose bits are the binary digits of `index` (bit 0 is the
    /// value of variable 1). Used for exhaustive enumeration.
    ///
    /// # Panics
    ///
    /// Panics if `n > 64`.
    pub fn from_index(n: u32, index: u64) -> Assignment {
        assert!(n <= 64, "index form only covers up to 64 variables");
        let mut a = Assignment::all_false(n);
        if n > 0 {
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            a.words[0] = index & mask;
        }
        a
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn value(&self, var: Var) -> bool {
        self.bit(var.index())
    }

    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.n as usize);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.n as usize);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip_bit(&mut self, i: usize) {
        debug_assert!(i < self.n as usize);
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    /// Number of set bits.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// XOR `other` into `self` bitwise. Lengths must match.
    pub fn xor_in_place(&mut self, other: &Assignment) {
        debug_assert_eq!(self.n, other.n);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    /// Count of positions where the two assignments differ.
    pub fn hamming(&self, other: &Assignment) -> Result<u32, FormulaError> {
        if self.n != other.n {
            return Err(FormulaError::LengthMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum())
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.n as usize).map(|i| self.bit(i)).collect()
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Assignment) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Assignment {
    /// Numeric order of the bit vector read as an integer (variable 1 is the
    /// least significant bit).
    fn cmp(&self, other: &Assignment) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n as usize {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(l: i32) -> Literal {
        Literal::from_dimacs(l)
    }

    fn xor(vars: &[u32], rhs: bool) -> XorClause {
        XorClause::new(vars.iter().map(|&v| Var::new(v)).collect(), rhs).unwrap()
    }

    #[test]
    fn empty_formula_is_true() {
        let f = CnfXorFormula::empty(1);
        let a = Assignment::from_bools(&[false]);
        assert_eq!(f.evaluate(&a), Ok(true));
    }

    #[test]
    fn equal_variable_chain_is_true_on_all_ones() {
        let f =
            CnfXorFormula::new(3, vec![], vec![xor(&[1, 2], false), xor(&[2, 3], false)]).unwrap();
        let a = Assignment::from_bools(&[true, true, true]);
        assert_eq!(f.evaluate(&a), Ok(true));
    }

    #[test]
    fn mixed_formula_example() {
        // Enumerating all four assignments of (x1 | -x2) & (x1 + x2 = 1)
        // leaves (1,0) as the unique solution.
        let clause = CnfClause::new(vec![lit(1), lit(-2)]).unwrap();
        let f = CnfXorFormula::new(2, vec![clause], vec![xor(&[1, 2], true)]).unwrap();
        let mut satisfying = Vec::new();
        for idx in 0..4u64 {
            let a = Assignment::from_index(2, idx);
            if f.evaluate(&a).unwrap() {
                satisfying.push(a.to_bools());
            }
        }
        assert_eq!(satisfying, vec![vec![true, false]]);
        assert_eq!(
            f.evaluate(&Assignment::from_bools(&[false, true])),
            Ok(false)
        );
    }

    #[test]
    fn evaluate_rejects_length_mismatch() {
        let f = CnfXorFormula::empty(3);
        let a = Assignment::from_bools(&[true]);
        assert_eq!(
            f.evaluate(&a),
            Err(FormulaError::LengthMismatch {
                expected: 3,
                actual: 1
            })
        );
    }

    #[test]
    fn hamming_examples() {
        let z = Assignment::from_bools(&[false, false, false]);
        let o = Assignment::from_bools(&[true, true, true]);
        assert_eq!(z.hamming(&z), Ok(0));
        assert_eq!(z.hamming(&o), Ok(3));
        let a = Assignment::from_bools(&[true, false, true, true]);
        let b = Assignment::from_bools(&[false, false, true, false]);
        assert_eq!(a.hamming(&b), Ok(2));
        assert!(a.hamming(&z).is_err());
    }

    #[test]
    fn empty_xor_clause_semantics() {
        let constant_false = xor(&[], true);
        let constant_true = xor(&[], false);
        let a = Assignment::from_bools(&[true, false]);
        assert!(!constant_false.is_satisfied_by(&a));
        assert!(constant_true.is_satisfied_by(&a));
    }

    #[test]
    fn clause_rejects_duplicate_variable() {
        assert_eq!(
            CnfClause::new(vec![lit(1), lit(-1)]),
            Err(FormulaError::DuplicateVariable(1))
        );
        assert_eq!(
            XorClause::new(vec![Var::new(2), Var::new(2)], false),
            Err(FormulaError::DuplicateVariable(2))
        );
    }

    #[test]
    fn formula_rejects_out_of_range_variable() {
        let clause = CnfClause::new(vec![lit(4)]).unwrap();
        assert_eq!(
            CnfXorFormula::new(3, vec![clause], vec![]),
            Err(FormulaError::VariableOutOfRange { var: 4, n: 3 })
        );
    }

    #[test]
    fn assignment_order_matches_index_order() {
        let assignments: Vec<Assignment> =
            (0..32).map(|i| Assignment::from_index(5, i)).collect();
        let mut sorted = assignments.clone();
        sorted.sort();
        assert_eq!(assignments, sorted);
    }
}
