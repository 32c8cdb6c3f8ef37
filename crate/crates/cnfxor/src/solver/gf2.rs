//! Bit-packed GF(2) linear algebra for XOR subsystems.
//!
//! Each XOR clause becomes one row of an augmented boolean matrix: one
//! column per variable plus a right-hand-side column. Rows are packed into
//! 64-bit words so elimination stays sub-second up to a few thousand
//! variables.

use crate::formula::{Assignment, XorClause};

const WORD_BITS: usize = 64;

/// An XOR subsystem in reduced row echelon form over GF(2).
///
/// Zero rows are dropped after elimination; inconsistency (a row reading
/// `0 = 1`) is recorded in a flag. Row space is preserved, so the solution
/// set of the stored rows equals that of the original clauses whenever the
/// system is consistent.
#[derive(Clone, Debug)]
pub struct XorSystem {
    n: usize,
    words_per_row: usize,
    rows: Vec<u64>,
    pivot_cols: Vec<usize>,
    consistent: bool,
}

impl XorSystem {
    /// Gaussian elimination of `xors` over variables `1..=n` into reduced
    /// row echelon form.
    pub fn eliminate(xors: &[XorClause], n: u32) -> XorSystem {
        let n = n as usize;
        // n variable columns plus the augmented rhs column
        let words_per_row = (n + 1).div_ceil(WORD_BITS);
        let mut rows: Vec<u64> = Vec::with_capacity(xors.len() * words_per_row);
        for clause in xors {
            let start = rows.len();
            rows.resize(start + words_per_row, 0);
            for var in clause.vars() {
                let col = var.index();
                rows[start + col / WORD_BITS] |= 1 << (col % WORD_BITS);
            }
            if clause.rhs() {
                rows[start + n / WORD_BITS] |= 1 << (n % WORD_BITS);
            }
        }

        let mut sys = XorSystem {
            n,
            words_per_row,
            rows,
            pivot_cols: Vec::new(),
            consistent: true,
        };
        sys.reduce(xors.len());
        sys
    }

    fn reduce(&mut self, row_count: usize) {
        let w = self.words_per_row;
        let mut rank = 0;
        for col in 0..self.n {
            let word = col / WORD_BITS;
            let mask = 1u64 << (col % WORD_BITS);
            let Some(pivot) =
                (rank..row_count).find(|&r| self.rows[r * w + word] & mask != 0)
            else {
                continue;
            };
            if pivot != rank {
                for k in 0..w {
                    self.rows.swap(pivot * w + k, rank * w + k);
                }
            }
            for r in 0..row_count {
                if r != rank && self.rows[r * w + word] & mask != 0 {
                    for k in 0..w {
                        self.rows[r * w + k] ^= self.rows[rank * w + k];
                    }
                }
            }
            self.pivot_cols.push(col);
            rank += 1;
            if rank == row_count {
                break;
            }
        }

        // Any remaining nonzero row can only have its rhs bit set: 0 = 1.
        let rhs_word = self.n / WORD_BITS;
        let rhs_mask = 1u64 << (self.n % WORD_BITS);
        self.consistent = (rank..row_count)
            .all(|r| self.rows[r * w + rhs_word] & rhs_mask == 0);
        self.rows.truncate(rank * w);
    }

    pub fn n(&self) -> u32 {
        self.n as u32
    }

    pub fn rank(&self) -> u32 {
        self.pivot_cols.len() as u32
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Dimension of the null space, `n - rank`.
    pub fn null_space_dim(&self) -> u32 {
        self.n as u32 - self.rank()
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub(crate) fn row_words(&self, row: usize) -> &[u64] {
        &self.rows[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    pub(crate) fn row_var_bit(&self, row: usize, col: usize) -> bool {
        debug_assert!(col < self.n);
        self.row_words(row)[col / WORD_BITS] >> (col % WORD_BITS) & 1 == 1
    }

    pub(crate) fn row_rhs(&self, row: usize) -> bool {
        self.row_words(row)[self.n / WORD_BITS] >> (self.n % WORD_BITS) & 1 == 1
    }

    /// Variables (zero-based columns) of one reduced row, pivot first.
    pub(crate) fn row_cols(&self, row: usize) -> Vec<usize> {
        let mut cols = Vec::new();
        let words = self.row_words(row);
        for (wi, &word) in words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let col = wi * WORD_BITS + bits.trailing_zeros() as usize;
                if col < self.n {
                    cols.push(col);
                }
                bits &= bits - 1;
            }
        }
        cols
    }

    /// A basis of the null space, one vector per free column. The difference
    /// of any two solutions of the system lies in this space.
    pub fn null_space_basis(&self) -> Vec<Assignment> {
        let mut is_pivot = vec![false; self.n];
        for &c in &self.pivot_cols {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.n - self.pivot_cols.len());
        for free in (0..self.n).filter(|&c| !is_pivot[c]) {
            let mut v = Assignment::all_false(self.n as u32);
            v.set_bit(free, true);
            for (row, &pivot) in self.pivot_cols.iter().enumerate() {
                if self.row_var_bit(row, free) {
                    v.set_bit(pivot, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of the system: free variables false, each pivot set to
    /// its row's rhs. `None` if the system is inconsistent.
    pub fn particular_solution(&self) -> Option<Assignment> {
        if !self.consistent {
            return None;
        }
        let mut a = Assignment::all_false(self.n as u32);
        for (row, &pivot) in self.pivot_cols.iter().enumerate() {
            if self.row_rhs(row) {
                a.set_bit(pivot, true);
            }
        }
        Some(a)
    }
}

/// Exact solution count of the XOR subsystem as a power of two:
/// `Some(n - rank)` (the base-2 logarithm) when consistent, `None` when the
/// count is zero.
pub fn count_solutions_xor(xors: &[XorClause], n: u32) -> Option<u32> {
    let sys = XorSystem::eliminate(xors, n);
    sys.is_consistent().then(|| sys.null_space_dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{CnfXorFormula, Var};

    fn xor(vars: &[u32], rhs: bool) -> XorClause {
        XorClause::new(vars.iter().map(|&v| Var::new(v)).collect(), rhs).unwrap()
    }

    fn enumerate_xor_solutions(xors: &[XorClause], n: u32) -> Vec<Assignment> {
        let f = CnfXorFormula::new(n, vec![], xors.to_vec()).unwrap();
        (0..1u64 << n)
            .map(|i| Assignment::from_index(n, i))
            .filter(|a| f.evaluate(a).unwrap())
            .collect()
    }

    #[test]
    fn empty_system() {
        let sys = XorSystem::eliminate(&[], 4);
        assert_eq!(sys.rank(), 0);
        assert!(sys.is_consistent());
        assert_eq!(sys.null_space_dim(), 4);
        assert_eq!(count_solutions_xor(&[], 4), Some(4));
    }

    #[test]
    fn inconsistent_triangle() {
        // The three rows sum to 0 = 1.
        let xors = [xor(&[1, 2], false), xor(&[2, 3], false), xor(&[1, 3], true)];
        let sys = XorSystem::eliminate(&xors, 3);
        assert!(!sys.is_consistent());
        assert!(sys.particular_solution().is_none());
        assert_eq!(count_solutions_xor(&xors, 3), None);
        assert!(enumerate_xor_solutions(&xors, 3).is_empty());
    }

    #[test]
    fn rank_two_chain() {
        let xors = [xor(&[1, 2], false), xor(&[2, 3], false)];
        let sys = XorSystem::eliminate(&xors, 3);
        assert!(sys.is_consistent());
        assert_eq!(sys.rank(), 2);
        let sols = enumerate_xor_solutions(&xors, 3);
        assert_eq!(sols.len(), 2);
        assert_eq!(sols[0].to_bools(), vec![false, false, false]);
        assert_eq!(sols[1].to_bools(), vec![true, true, true]);
        assert_eq!(count_solutions_xor(&xors, 3), Some(1));
    }

    #[test]
    fn unit_clause_count() {
        let xors = [xor(&[1], true)];
        assert_eq!(count_solutions_xor(&xors, 3), Some(2));
    }

    #[test]
    fn particular_solution_satisfies_system() {
        let xors = [xor(&[1, 2, 3], true), xor(&[2, 4], false), xor(&[3], true)];
        let sys = XorSystem::eliminate(&xors, 4);
        let f = CnfXorFormula::new(4, vec![], xors.to_vec()).unwrap();
        let a = sys.particular_solution().unwrap();
        assert_eq!(f.evaluate(&a), Ok(true));
    }

    #[test]
    fn null_space_vectors_connect_solutions() {
        let xors = [xor(&[1, 2, 3], false), xor(&[3, 4, 5], true)];
        let sys = XorSystem::eliminate(&xors, 5);
        let f = CnfXorFormula::new(5, vec![], xors.to_vec()).unwrap();
        let base = sys.particular_solution().unwrap();
        for v in sys.null_space_basis() {
            let mut shifted = base.clone();
            shifted.xor_in_place(&v);
            assert_eq!(f.evaluate(&shifted), Ok(true));
        }
        assert_eq!(sys.null_space_basis().len(), sys.null_space_dim() as usize);
    }

    #[test]
    fn count_matches_enumeration_on_random_systems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(72_016);
        for _ in 0..50 {
            let n = rng.random_range(1..=8u32);
            let m = rng.random_range(0..=6usize);
            let xors: Vec<XorClause> = (0..m)
                .map(|_| {
                    let vars = (1..=n).filter(|_| rng.random_bool(0.4)).map(Var::new);
                    XorClause::new(vars.collect(), rng.random_bool(0.5)).unwrap()
                })
                .collect();
            let enumerated = enumerate_xor_solutions(&xors, n).len() as u64;
            match count_solutions_xor(&xors, n) {
                Some(log2) => assert_eq!(enumerated, 1u64 << log2),
                None => assert_eq!(enumerated, 0),
            }
        }
    }

    #[test]
    fn empty_xor_clauses() {
        // Constant-false clause makes the system inconsistent.
        assert_eq!(count_solutions_xor(&[xor(&[], true)], 3), None);
        // Constant-true clause is a zero row and changes nothing.
        assert_eq!(count_solutions_xor(&[xor(&[], false)], 3), Some(3));
    }
}
