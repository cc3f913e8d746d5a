//! The BFR map `S = QᵀΛQ ↦ diag(QΛQᵀ)`, its Jacobian along Toda flows, and
//! Newton inversion on a slice.
//!
//! Tangent vectors are expressed in the fixed basis `e_k − e_{k+1}`,
//! `k = 0..n−1`, both for directions `ρ` with zero sum and for displacements
//! inside the trace hyperplane. A zero-sum vector `y` has coordinates
//! `c_k = y_0 + … + y_k`.

use crate::error::{Error, Result};
use crate::flow::{toda_action, Normalization, TodaDirection};
use crate::linalg::{apply_spectral_function, pi_skew, SpectralPair};
use crate::matrix::DenseMatrix;
use crate::polytope::spectral_polytope;

/// A point of the trace hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct BfrPoint(pub Vec<f64>);

impl BfrPoint {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn max_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// `x_i = Σ_j λ_j·q_ij²`.
pub fn bfr(pair: &SpectralPair) -> BfrPoint {
    let q = pair.q();
    let lambda = pair.lambda();
    BfrPoint(
        (0..pair.n())
            .map(|i| q.row(i).iter().zip(lambda).map(|(x, l)| l * x * x).sum())
            .collect(),
    )
}

/// `bfr(Φ(τ, S))`.
pub fn forward(pair: &SpectralPair, tau: &TodaDirection) -> Result<BfrPoint> {
    Ok(bfr(&toda_action(pair, tau)?))
}

/// Derivative of `τ ↦ bfr(Φ(τ, S))` at `τ = 0` along `ρ`:
/// `diag(Q·[Π_A p_ρ(S), Λ]·Qᵀ)`.
pub fn bfr_directional_derivative(pair: &SpectralPair, rho: &[f64]) -> Result<Vec<f64>> {
    let a = pi_skew(&apply_spectral_function(pair, rho)?);
    let lambda = DenseMatrix::from_diag(pair.lambda());
    let q = pair.q();
    let inner = a.commutator(&lambda);
    Ok((&(q * &inner) * &q.transpose()).diagonal())
}

fn difference_basis_vector(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v[k + 1] = -1.0;
    v
}

/// Coordinates of a zero-sum vector in the basis `e_k − e_{k+1}`.
pub fn hyperplane_coordinates(y: &[f64]) -> Vec<f64> {
    y.iter()
        .take(y.len().saturating_sub(1))
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Zero-sum vector with coordinates `c` in the basis `e_k − e_{k+1}`.
pub fn from_hyperplane_coordinates(c: &[f64]) -> Vec<f64> {
    let n = c.len() + 1;
    let mut y = vec![0.0; n];
    for (k, &ck) in c.iter().enumerate() {
        y[k] += ck;
        y[k + 1] -= ck;
    }
    y
}

/// The `(n−1)×(n−1)` Jacobian of `τ ↦ bfr(Φ(τ, S))` at `τ = 0`, in the
/// difference bases for domain and range.
pub fn bfr_jacobian(pair: &SpectralPair) -> Result<DenseMatrix> {
    let n = pair.n();
    let m = n.saturating_sub(1);
    let mut jac = DenseMatrix::zeros(m, m);
    for k in 0..m {
        let y = bfr_directional_derivative(pair, &difference_basis_vector(n, k))?;
        for (i, c) in hyperplane_coordinates(&y).into_iter().enumerate() {
            jac[(i, k)] = c;
        }
    }
    Ok(jac)
}

/// Determinant-based conditioning summary of a square matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    pub determinant: f64,
    pub frobenius: f64,
    /// `|det| / ‖J‖_F^(m−1)`, a lower bound for the smallest singular value.
    pub sigma_min_lower_bound: f64,
}

pub fn conditioning(jac: &DenseMatrix) -> Conditioning {
    let m = jac.rows();
    let determinant = if m == 0 { 1.0 } else { jac.determinant() };
    let frobenius = jac.frobenius_norm();
    let denom = frobenius.powi(m.saturating_sub(1) as i32);
    Conditioning {
        determinant,
        frobenius,
        sigma_min_lower_bound: if denom > 0.0 {
            determinant.abs() / denom
        } else {
            0.0
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Max-norm residual at which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Halvings tried by the backtracking line search.
    pub max_halvings: usize,
    /// Largest max-norm step in `τ` per iteration.
    pub max_step: f64,
    /// Required minimal slack, relative to `λ_1 − λ_n`.
    pub slack_min_rel: f64,
    pub rank_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            max_halvings: 30,
            max_step: 10.0,
            slack_min_rel: 1e-6,
            rank_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    /// Zero-sum direction with `forward(pair, tau) ≈ target`.
    pub tau: TodaDirection,
    /// Max-norm of `forward(pair, tau) − target`.
    pub residual: f64,
    pub iterations: usize,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn residual(image: &BfrPoint, target: &[f64]) -> Vec<f64> {
    target.iter().zip(image.as_slice()).map(|(t, x)| t - x).collect()
}

/// Finds the zero-sum `τ` with `bfr(Φ(τ, S)) = target` by damped Newton
/// iteration, re-centering the Jacobian at the current slice point.
pub fn invert_bfr(pair: &SpectralPair, target: &[f64], opts: &NewtonOptions) -> Result<Inversion> {
    let n = pair.n();
    if target.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.len(),
        });
    }
    if target.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let lambda = pair.lambda();
    let required = opts.slack_min_rel * (lambda[0] - lambda[n - 1]);
    let trace_gap = (target.iter().sum::<f64>() - pair.trace()).abs();
    if trace_gap > 1e-9 * pair.trace().abs().max(1.0) {
        return Err(Error::NotInterior {
            slack: -trace_gap,
            required,
        });
    }
    let polytope = spectral_polytope(pair, opts.rank_tol)?;
    let slack = polytope.min_slack(target);
    if slack < required {
        return Err(Error::NotInterior { slack, required });
    }

    let mut tau = TodaDirection::zeros(n);
    let mut current = pair.clone();
    let mut r = residual(&bfr(&current), target);
    let mut res = max_norm(&r);
    let mut iterations = 0;
    while res > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: res,
            });
        }
        iterations += 1;
        let jac = bfr_jacobian(&current)?;
        let coords = jac
            .solve(&hyperplane_coordinates(&r))
            .ok_or_else(|| Error::NumericalBreakdown("singular BFR Jacobian".into()))?;
        let mut step = from_hyperplane_coordinates(&coords);
        let len = max_norm(&step);
        if len > opts.max_step {
            step.iter_mut().for_each(|s| *s *= opts.max_step / len);
        }
        let step = TodaDirection::new(step)?;

        let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let base = norm2(&r);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = tau.plus(&step.scaled(alpha));
            let moved = toda_action(pair, &trial)?;
            let trial_r = residual(&bfr(&moved), target);
            if norm2(&trial_r) < base {
                accepted = Some((trial, moved, trial_r));
                break;
            }
            alpha *= 0.5;
        }
        let Some((next_tau, moved, next_r)) = accepted else {
            return Err(Error::NoConvergence {
                iterations,
                residual: res,
            });
        };
        tau = next_tau;
        current = moved;
        r = next_r;
        res = max_norm(&r);
    }
    Ok(Inversion {
        tau: tau.normalized(Normalization::ZeroSum),
        residual: res,
        iterations,
    })
}
