//! Least-squares fits of runtime-versus-n data: linear, quadratic, cubic,
//! and exponential β·2^(αn), with model selection by raw-scale mean squared
//! error.
//!
//! Polynomials come from the normal equations on x rescaled to [−1, 1]
//! (one iterative-refinement pass keeps cubic coefficients exact to well
//! below 1e-9 on clean data). The exponential is a linear fit on log2 y.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitError {
    #[error("curve fitting needs at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linear,
    Quadratic,
    Cubic,
    Exponential,
}

/// Polynomial fit with coefficients in the conventional high-to-low order:
/// linear [a, b] for an+b, quadratic [a, b, c] for an²+bn+c, and so on.
#[derive(Clone, Debug, Serialize)]
pub struct PolyFit {
    pub coefficients: Vec<f64>,
    pub mse: f64,
}

impl PolyFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Exponential fit y = beta · 2^(alpha · x).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpFit {
    pub alpha: f64,
    pub beta: f64,
    pub mse: f64,
}

impl ExpFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.beta * (self.alpha * x).exp2()
    }
}

/// All four candidate fits plus the winner. `exponential` is `None` — the
/// model was skipped — when some y is nonpositive. `scaling_factor` carries
/// α exactly when the exponential model is selected.
#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub linear: PolyFit,
    pub quadratic: PolyFit,
    pub cubic: PolyFit,
    pub exponential: Option<ExpFit>,
    pub selected: ModelKind,
    pub scaling_factor: Option<f64>,
}

/// Fit all four models to `(x, y)` points and pick the smallest raw-scale
/// MSE; ties go to the model listed first (lowest order).
pub fn fit_curves(points: &[(f64, f64)]) -> Result<FitReport, FitError> {
    const MIN_POINTS: usize = 5;
    if points.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints {
            required: MIN_POINTS,
            actual: points.len(),
        });
    }

    let linear = poly_fit(points, 1);
    let quadratic = poly_fit(points, 2);
    let cubic = poly_fit(points, 3);
    let exponential = points
        .iter()
        .all(|&(_, y)| y > 0.0)
        .then(|| exp_fit(points));

    // MSEs within 1e-12 of the response scale are floating-point ties
    // (e.g. a quadratic reproducing exactly linear data); ties keep the
    // model listed first.
    let y_scale = points.iter().map(|&(_, y)| y * y).sum::<f64>() / points.len() as f64;
    let tie = 1e-12 * y_scale;
    let mut selected = ModelKind::Linear;
    let mut best = linear.mse;
    for (kind, mse) in [
        (ModelKind::Quadratic, quadratic.mse),
        (ModelKind::Cubic, cubic.mse),
        (
            ModelKind::Exponential,
            exponential.as_ref().map_or(f64::INFINITY, |e| e.mse),
        ),
    ] {
        if mse + tie < best {
            best = mse;
            selected = kind;
        }
    }
    let scaling_factor = match (selected, &exponential) {
        (ModelKind::Exponential, Some(e)) => Some(e.alpha),
        _ => None,
    };

    Ok(FitReport {
        linear,
        quadratic,
        cubic,
        exponential,
        selected,
        scaling_factor,
    })
}

fn poly_fit(points: &[(f64, f64)], degree: usize) -> PolyFit {
    let dim = degree + 1;
    let x_scale = points
        .iter()
        .map(|&(x, _)| x.abs())
        .fold(0.0f64, f64::max)
        .max(1.0);

    // Normal equations in the scaled variable u = x / x_scale.
    let mut moments = vec![0.0f64; 2 * degree + 1];
    let mut rhs = vec![0.0f64; dim];
    for &(x, y) in points {
        let u = x / x_scale;
        let mut pw = 1.0;
        for (j, m) in moments.iter_mut().enumerate() {
            *m += pw;
            if j < dim {
                rhs[j] += pw * y;
            }
            pw *= u;
        }
    }
    let matrix: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| moments[i + j]).collect())
        .collect();

    let Some(mut coeffs) = solve_dense(&matrix, &rhs) else {
        return PolyFit {
            coefficients: vec![f64::NAN; dim],
            mse: f64::INFINITY,
        };
    };
    // One refinement pass against the residual of the normal equations.
    let residual: Vec<f64> = (0..dim)
        .map(|i| {
            rhs[i]
                - (0..dim)
                    .map(|j| matrix[i][j] * coeffs[j])
                    .sum::<f64>()
        })
        .collect();
    if let Some(correction) = solve_dense(&matrix, &residual) {
        for (c, d) in coeffs.iter_mut().zip(correction) {
            *c += d;
        }
    }

    // Undo the scaling and flip to high-to-low order.
    let mut coefficients: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| c / x_scale.powi(j as i32))
        .collect();
    coefficients.reverse();

    let fit = PolyFit {
        coefficients,
        mse: 0.0,
    };
    let mse = mean_squared_error(points, |x| fit.predict(x));
    PolyFit { mse, ..fit }
}

/// Linear least squares on log2 y gives the starting (alpha, beta);
/// damped Gauss-Newton then minimizes the raw-scale squared error, the
/// same objective the polynomial fits have. Without the refinement the
/// log-line systematically misses the largest y values, which is where
/// raw MSE concentrates.
fn exp_fit(points: &[(f64, f64)]) -> ExpFit {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_z = points.iter().map(|&(_, y)| y.log2()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        num += (x - mean_x) * (y.log2() - mean_z);
        den += (x - mean_x) * (x - mean_x);
    }
    let mut alpha = if den > 0.0 { num / den } else { 0.0 };
    let mut beta = (mean_z - alpha * mean_x).exp2();

    let sse = |a: f64, b: f64| {
        points
            .iter()
            .map(|&(x, y)| (y - b * (a * x).exp2()).powi(2))
            .sum::<f64>()
    };
    let mut best = sse(alpha, beta);
    for _ in 0..60 {
        // Normal equations of the linearized residual in (alpha, beta).
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in points {
            let model = beta * (alpha * x).exp2();
            let da = model * std::f64::consts::LN_2 * x;
            let db = model / beta;
            let r = y - model;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let det = jaa * jbb - jab * jab;
        if det.abs() < 1e-300 {
            break;
        }
        let step_a = (jbb * ga - jab * gb) / det;
        let step_b = (jaa * gb - jab * ga) / det;
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let (na, nb) = (alpha + scale * step_a, beta + scale * step_b);
            if nb > 0.0 {
                let s = sse(na, nb);
                if s < best {
                    alpha = na;
                    beta = nb;
                    improved = true;
                    let relative_gain = (best - s) / best.max(f64::MIN_POSITIVE);
                    best = s;
                    if relative_gain < 1e-12 {
                        return finish_exp(points, alpha, beta);
                    }
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    finish_exp(points, alpha, beta)
}

fn finish_exp(points: &[(f64, f64)], alpha: f64, beta: f64) -> ExpFit {
    let fit = ExpFit {
        alpha,
        beta,
        mse: 0.0,
    };
    let mse = mean_squared_error(points, |x| fit.predict(x));
    ExpFit { mse, ..fit }
}

fn mean_squared_error(points: &[(f64, f64)], predict: impl Fn(f64) -> f64) -> f64 {
    points
        .iter()
        .map(|&(x, y)| (y - predict(x)).powi(2))
        .sum::<f64>()
        / points.len() as f64
}

/// Gaussian elimination with partial pivoting; `None` on a singular system.
fn solve_dense(matrix: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut b: Vec<f64> = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            let (pivot_rows, tail) = a.split_at_mut(row);
            let pivot_row = &pivot_rows[col];
            for (k, entry) in tail[0].iter_mut().enumerate().skip(col) {
                *entry -= f * pivot_row[k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}
