//! Random formula models with a deterministic, seedable generator.
//!
//! Three models are provided through one parameter set: pure random k-CNF
//! (`s = 0`), pure random XOR with per-variable inclusion probability `p`
//! (`r = 0`), and the joint k-CNF-XOR model. All clauses are drawn
//! independently, i.e. with replacement.
//!
//! Randomness comes from ChaCha12 streams. A stream is either seeded
//! directly from a 64-bit value (via rand's SplitMix64 seed expansion) or
//! derived for one trial by hashing `(master seed, label, n, trial)` with
//! SHA-256, so concurrent trials can never reorder each other's draws and
//! identical inputs reproduce byte-identical formulas on every platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::formula::{CnfClause, CnfXorFormula, Literal, Var, XorClause};

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("clause width {k} not in 1..={n}")]
    InvalidClauseWidth { k: u32, n: u32 },
    #[error("clause width must be at least 2, got {0}")]
    ClauseWidthTooSmall(u32),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("density {0} must be nonnegative and finite")]
    InvalidDensity(f64),
    #[error("variable count must be at least 1")]
    NoVariables,
}

/// One sampling configuration: clause width, variable count, the two clause
/// densities, the XOR variable-probability, and the seed.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct ModelParams {
    pub k: u32,
    pub n: u32,
    /// k-clause density; the formula gets ⌈r·n⌉ CNF clauses.
    pub r: f64,
    /// XOR-clause density; the formula gets ⌈s·n⌉ XOR clauses.
    pub s: f64,
    /// Per-variable inclusion probability of a random XOR clause.
    pub p: f64,
    pub seed: u64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.n == 0 {
            return Err(SampleError::NoVariables);
        }
        if self.k < 2 {
            return Err(SampleError::ClauseWidthTooSmall(self.k));
        }
        if self.k > self.n {
            return Err(SampleError::InvalidClauseWidth {
                k: self.k,
                n: self.n,
            });
        }
        for d in [self.r, self.s] {
            if !d.is_finite() || d < 0.0 {
                return Err(SampleError::InvalidDensity(d));
            }
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(SampleError::InvalidProbability(self.p));
        }
        Ok(())
    }
}

/// A single-owner ChaCha12 stream. Identical construction inputs yield
/// identical draws everywhere.
pub struct RngStream {
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> RngStream {
        RngStream {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Stream for one trial of one experiment, independent of execution
    /// order: the ChaCha key is `SHA-256(master seed, label length, label,
    /// n, trial)` with all integers little-endian 64-bit.
    pub fn derive(master_seed: u64, label: &str, n: u32, trial: u32) -> RngStream {
        RngStream {
            rng: ChaCha12Rng::from_seed(derive_key(master_seed, label, n, trial)),
        }
    }

    /// First eight bytes of the same derivation, for APIs that take a
    /// 64-bit seed.
    pub fn derive_seed(master_seed: u64, label: &str, n: u32, trial: u32) -> u64 {
        let key = derive_key(master_seed, label, n, trial);
        u64::from_le_bytes(key[..8].try_into().expect("key is 32 bytes"))
    }
}

fn derive_key(master_seed: u64, label: &str, n: u32, trial: u32) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update((n as u64).to_le_bytes());
    hasher.update((trial as u64).to_le_bytes());
    hasher.finalize().into()
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Number of clauses for density `density` over `n` variables: ⌈density·n⌉
/// in exact arithmetic. Products within 1e-9 of an integer are snapped to it
/// first so binary noise (e.g. `0.3 * 10` evaluating a hair above 3) cannot
/// inflate the count.
pub fn clause_count(density: f64, n: u32) -> usize {
    let x = density * f64::from(n);
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// A uniformly random k-clause: k distinct variables chosen uniformly from
/// the C(n, k) subsets (Floyd's algorithm), stored sorted ascending, each
/// sign an independent fair bit drawn in that order.
pub fn sample_k_clause(n: u32, k: u32, rng: &mut RngStream) -> Result<CnfClause, SampleError> {
    if k == 0 || k > n {
        return Err(SampleError::InvalidClauseWidth { k, n });
    }
    let mut chosen: Vec<u32> = Vec::with_capacity(k as usize);
    for j in (n - k + 1)..=n {
        let t = rng.rng.random_range(1..=j);
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen.sort_unstable();
    let literals = chosen
        .into_iter()
        .map(|v| Literal::new(Var::new(v), rng.rng.random_bool(0.5)))
        .collect();
    Ok(CnfClause::new(literals).expect("Floyd sampling yields distinct variables"))
}

/// A random XOR clause with variable-probability `p`: each variable joins
/// independently with probability `p` (ascending draw order) and the parity
/// target is a fair bit. The clause may be empty.
pub fn sample_xor_clause(n: u32, p: f64, rng: &mut RngStream) -> Result<XorClause, SampleError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SampleError::InvalidProbability(p));
    }
    let vars: Vec<Var> = (1..=n)
        .filter(|_| rng.rng.random_bool(p))
        .map(Var::new)
        .collect();
    let rhs = rng.rng.random_bool(0.5);
    Ok(XorClause::new(vars, rhs).expect("Bernoulli sampling yields distinct variables"))
}

/// Sample one formula: ⌈r·n⌉ k-clauses followed by ⌈s·n⌉ XOR clauses, all
/// independent, from a fresh stream seeded with `params.seed`.
pub fn sample_formula(params: &ModelParams) -> Result<CnfXorFormula, SampleError> {
    params.validate()?;
    let mut rng = RngStream::new(params.seed);
    let cnf: Vec<CnfClause> = (0..clause_count(params.r, params.n))
        .map(|_| sample_k_clause(params.n, params.k, &mut rng))
        .collect::<Result<_, _>>()?;
    let xors: Vec<XorClause> = (0..clause_count(params.s, params.n))
        .map(|_| sample_xor_clause(params.n, params.p, &mut rng))
        .collect::<Result<_, _>>()?;
    Ok(CnfXorFormula::new(params.n, cnf, xors).expect("sampled variables are in range"))
}
