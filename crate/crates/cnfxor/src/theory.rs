//! Closed-form quantities behind the solution-space separation results:
//! the Bernoulli parity probability, the union-bound sum over small
//! difference sets, the binary entropy machinery, and the certified linear
//! separation fraction it yields.
//!
//! All logarithms are natural. The union-bound sum is evaluated entirely in
//! the log domain (log-sum-exp over `ln C(n,w)` plus the clause-count power)
//! so it stays finite for n in the tens of thousands.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("delta must lie strictly inside (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("no root: s·ln(1+delta) = {target} is not inside (0, ln 2)")]
    NoRoot { target: f64 },
    #[error("s·n must exceed 1, got {0}")]
    DensityTooSmall(f64),
    #[error("s must lie strictly inside (0, 1), got {0}")]
    SOutOfRange(f64),
    #[error("rho must exceed 2, got {0}")]
    RhoTooSmall(f64),
}

/// Probability that the sum of `n` independent Bernoulli(p) variables is
/// even: 1/2 + (1 − 2p)^n / 2. The empty sum (n = 0) is even with
/// probability 1.
pub fn parity_even_probability(p: f64, n: u32) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p must be a probability");
    0.5 + 0.5 * (1.0 - 2.0 * p).powi(n as i32)
}

/// Which exponent the union-bound sum raises each parity term to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum XorExponent {
    /// ⌈s·n⌉ — matches the number of clauses actually sampled. The default.
    CeilClauseCount,
    /// s·n — the relaxed real exponent used when taking limits.
    RealDensity,
}

/// Natural log of Σ_{w=1}^{w_max} C(n,w) · (1/2 + (1−2p)^w / 2)^m where m
/// is ⌈s·n⌉ clauses. Bounds the probability that some nonempty variable set
/// of size ≤ w_max overlaps every clause evenly — hence that two solutions
/// lie within Hamming distance w_max. Returns −∞ for the empty sum.
pub fn union_bound_sum(n: u32, s: f64, p: f64, w_max: u32) -> f64 {
    union_bound_sum_with(n, s, p, w_max, XorExponent::CeilClauseCount)
}

pub fn union_bound_sum_with(n: u32, s: f64, p: f64, w_max: u32, exponent: XorExponent) -> f64 {
    assert!(w_max <= n, "w_max cannot exceed n");
    assert!((0.0..=1.0).contains(&p), "p must be a probability");
    let m = match exponent {
        XorExponent::CeilClauseCount => crate::sampler::clause_count(s, n) as f64,
        XorExponent::RealDensity => s * f64::from(n),
    };
    let base = 1.0 - 2.0 * p;
    let mut base_pow = 1.0f64;
    let mut ln_choose = 0.0f64;
    let mut terms: Vec<f64> = Vec::with_capacity(w_max as usize);
    for w in 1..=w_max {
        ln_choose += (f64::from(n - w + 1)).ln() - f64::from(w).ln();
        base_pow *= base;
        let q = 0.5 + 0.5 * base_pow;
        let term = if q > 0.0 {
            ln_choose + m * q.ln()
        } else {
            f64::NEG_INFINITY
        };
        terms.push(term);
    }
    log_sum_exp(&terms)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Binary entropy in nats, H(x) = −x ln x − (1−x) ln(1−x), with the limit
/// convention H(0) = H(1) = 0.
pub fn entropy(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "entropy argument must be in [0, 1]");
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
}

/// a(δ) = −ln(2/(1+δ) − 1) / ln(1+δ) on (0, 1). Tends to 2 as δ → 0 and
/// diverges as δ → 1; any ρ above a(δ) admits δ as a threshold slack.
pub fn a_of_delta(delta: f64) -> Result<f64, TheoryError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TheoryError::DeltaOutOfRange(delta));
    }
    Ok(-(2.0 / (1.0 + delta) - 1.0).ln() / (1.0 + delta).ln())
}

/// The unique λ* in (0, 1/2) with H(λ*) = s·ln(1+δ), by bisection until the
/// defining equation holds to 1e-12.
pub fn lambda_star(s: f64, delta: f64) -> Result<f64, TheoryError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TheoryError::DeltaOutOfRange(delta));
    }
    let target = s * (1.0 + delta).ln();
    if !(target > 0.0 && target < std::f64::consts::LN_2) {
        return Err(TheoryError::NoRoot { target });
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    // H is strictly increasing on [0, 1/2]; 120 halvings drive the interval
    // below f64 resolution.
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    debug_assert!((entropy(root) - target).abs() <= 1e-12);
    Ok(root)
}

/// The lower edge ρ·ln(s·n)/(s·n) of the variable-probability window that
/// guarantees linear separation at this n. When the edge exceeds 1/2 the
/// window [edge, 1/2] is empty.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparationThreshold {
    pub value: f64,
    pub window_empty: bool,
}

pub fn separation_threshold(s: f64, rho: f64, n: u32) -> Result<SeparationThreshold, TheoryError> {
    let sn = s * f64::from(n);
    if sn <= 1.0 {
        return Err(TheoryError::DensityTooSmall(sn));
    }
    let value = rho * sn.ln() / sn;
    Ok(SeparationThreshold {
        value,
        window_empty: value > 0.5,
    })
}

/// Variable probability κ·ln(m)/m, the decay profile under which the
/// union-bound sum still vanishes.
pub fn decaying_variable_probability(kappa: f64, m: f64) -> f64 {
    kappa * m.ln() / m
}

/// A concrete witness that density s and multiplier ρ certify linear
/// separation: a slack δ with a(δ) < ρ and the entropy root λ* for it. The
/// certified fraction is λ*/2 — solution pairs closer than (λ*/2)·n
/// variables eventually have vanishing probability.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparationCertificate {
    pub s: f64,
    pub rho: f64,
    pub delta: f64,
    pub lambda_star: f64,
    pub fraction: f64,
}

/// Pick δ as the midpoint of the feasible interval {δ : a(δ) < ρ} (located
/// by bisection on the increasing function a) and return the certified
/// separation fraction λ*(s, δ)/2.
pub fn guaranteed_separation_fraction(
    s: f64,
    rho: f64,
) -> Result<SeparationCertificate, TheoryError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(TheoryError::SOutOfRange(s));
    }
    if rho <= 2.0 {
        return Err(TheoryError::RhoTooSmall(rho));
    }
    let (mut lo, mut hi) = (1e-12f64, 1.0 - 1e-12f64);
    let delta_max = if a_of_delta(hi)? < rho {
        hi
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if a_of_delta(mid)? < rho {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let delta = 0.5 * delta_max;
    let lambda = lambda_star(s, delta)?;
    Ok(SeparationCertificate {
        s,
        rho,
        delta,
        lambda_star: lambda,
        fraction: 0.5 * lambda,
    })
}
