//! Dense kernels: QR with positive-diagonal `R`, symmetric eigendecomposition
//! by cyclic Jacobi rotations, spectral functions and the skew/upper
//! projections used by Toda flows.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::tolerance::Tolerances;

/// Orthogonal and upper-triangular factors of a square invertible matrix,
/// with every diagonal entry of `r` strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// QR factorization with `diag(r) > 0`, which makes the factors unique.
///
/// Uses Householder reflections followed by a sign fix. `rank_tol` is relative
/// to the largest column norm of `m`.
pub fn qr_pos(m: &DenseMatrix, rank_tol: f64) -> Result<QrFactors> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let scale = (0..n)
        .map(|j| m.col(j).iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let threshold = rank_tol * scale;

    let mut r = m.clone();
    let mut q = DenseMatrix::identity(n);
    let mut v = vec![0.0; n];
    for k in 0..n {
        let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm <= threshold || norm == 0.0 {
            return Err(Error::SingularInput { column: k, norm });
        }
        if k == n - 1 {
            break;
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // r <- (I - 2vvᵀ/vᵀv) r
        for j in k..n {
            let dot: f64 = (k..n).map(|i| v[i] * r[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..n {
                r[(i, j)] -= f * v[i];
            }
        }
        // q <- q (I - 2vvᵀ/vᵀv)
        for i in 0..n {
            let dot: f64 = (k..n).map(|l| q[(i, l)] * v[l]).sum();
            let f = 2.0 * dot / vnorm2;
            for l in k..n {
                q[(i, l)] -= f * v[l];
            }
        }
        for i in (k + 1)..n {
            r[(i, k)] = 0.0;
        }
    }
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            for j in 0..n {
                r[(k, j)] = -r[(k, j)];
                q[(j, k)] = -q[(j, k)];
            }
        }
    }
    Ok(QrFactors { q, r })
}

/// Solves `x·r = y` for every row of `y`, with `r` upper triangular.
pub(crate) fn right_solve_upper(y: &DenseMatrix, r: &DenseMatrix) -> DenseMatrix {
    let n = r.rows();
    let mut x = DenseMatrix::zeros(y.rows(), n);
    for row in 0..y.rows() {
        for j in 0..n {
            let s: f64 = (0..j).map(|k| x[(row, k)] * r[(k, j)]).sum();
            x[(row, j)] = (y[(row, j)] - s) / r[(j, j)];
        }
    }
    x
}

/// Flips the sign of each row so that its largest-magnitude entry is positive.
/// Near-ties go to the lowest column index.
pub fn canonicalize_row_signs(q: &mut DenseMatrix) {
    for i in 0..q.rows() {
        let row = q.row(i);
        let biggest = row.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if biggest == 0.0 {
            continue;
        }
        let lead = row
            .iter()
            .copied()
            .find(|x| x.abs() >= biggest * (1.0 - 1e-9))
            .unwrap();
        if lead < 0.0 {
            for x in q.row_mut(i) {
                *x = -*x;
            }
        }
    }
}

/// A symmetric matrix `S = qᵀ·diag(lambda)·q` with strictly descending simple
/// spectrum. Rows of `q` are unit eigenvectors, sign-normalized so that the
/// largest-magnitude entry of each row is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    lambda: Vec<f64>,
    q: DenseMatrix,
}

impl SpectralPair {
    /// Validates and canonicalizes a pair.
    pub fn new(lambda: Vec<f64>, q: DenseMatrix, tol: &Tolerances) -> Result<Self> {
        let n = lambda.len();
        if q.rows() != n || q.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.rows(),
            });
        }
        if lambda.iter().any(|x| !x.is_finite()) || !q.is_finite() {
            return Err(Error::NonFinite);
        }
        check_gaps(&lambda, tol.gap)?;
        let defect = (&q * &q.transpose()).max_diff(&DenseMatrix::identity(n));
        if defect > tol.orth {
            return Err(Error::NotOrthogonal { defect });
        }
        Ok(Self::from_parts(lambda, q))
    }

    /// Eigendecomposition of a symmetric matrix.
    pub fn from_symmetric(s: &DenseMatrix, tol: &Tolerances) -> Result<Self> {
        sym_eig(s, tol)
    }

    pub(crate) fn from_parts(lambda: Vec<f64>, mut q: DenseMatrix) -> Self {
        canonicalize_row_signs(&mut q);
        Self { lambda, q }
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn q(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn trace(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// `qᵀ·diag(lambda)·q`.
    pub fn reconstruct(&self) -> DenseMatrix {
        reconstruct(self)
    }
}

fn check_gaps(lambda: &[f64], gap_tol: f64) -> Result<()> {
    for (i, w) in lambda.windows(2).enumerate() {
        let gap = w[0] - w[1];
        if gap.is_nan() || gap < gap_tol {
            return Err(Error::DegenerateSpectrum { index: i, gap });
        }
    }
    Ok(())
}

/// `qᵀ·diag(lambda)·q`, symmetrized.
pub fn reconstruct(pair: &SpectralPair) -> DenseMatrix {
    congruence(pair.q(), pair.lambda())
}

/// `qᵀ·diag(v)·q`, computed entrywise so the result is exactly symmetric.
fn congruence(q: &DenseMatrix, v: &[f64]) -> DenseMatrix {
    let n = q.cols();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..q.rows()).map(|k| q[(k, i)] * v[k] * q[(k, j)]).sum();
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back strictly descending; fails with `DegenerateSpectrum`
/// when two of them are closer than `tol.gap`.
pub fn sym_eig(s: &DenseMatrix, tol: &Tolerances) -> Result<SpectralPair> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: s.cols(),
        });
    }
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = s.asymmetry();
    if defect > tol.symmetry * s.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { defect });
    }
    let n = s.rows();
    let mut a = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let mut v = DenseMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let lambda: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    check_gaps(&lambda, tol.gap)?;
    // Row k of q is the eigenvector of lambda[k], i.e. column order[k] of v.
    let q = DenseMatrix::from_fn(n, n, |k, j| v[(j, order[k])]);
    Ok(SpectralPair::from_parts(lambda, q))
}

/// `p_v(S) = qᵀ·diag(v)·q`: the function taking value `v[i]` on `lambda[i]`.
pub fn apply_spectral_function(pair: &SpectralPair, v: &[f64]) -> Result<DenseMatrix> {
    if v.len() != pair.n() {
        return Err(Error::DimensionMismatch {
            expected: pair.n(),
            found: v.len(),
        });
    }
    Ok(congruence(pair.q(), v))
}

/// `S_ℓ − S_ℓᵀ`, where `S_ℓ` is the strictly lower triangular part.
pub fn pi_skew(m: &DenseMatrix) -> DenseMatrix {
    assert!(m.is_square());
    let n = m.rows();
    DenseMatrix::from_fn(n, n, |i, j| {
        if i > j {
            m[(i, j)]
        } else if i < j {
            -m[(j, i)]
        } else {
            0.0
        }
    })
}

/// `S_u + S_d + S_ℓᵀ`. For any square `m`, `pi_skew(m) + pi_upper(m) = m`.
pub fn pi_upper(m: &DenseMatrix) -> DenseMatrix {
    assert!(m.is_square());
    let n = m.rows();
    DenseMatrix::from_fn(n, n, |i, j| {
        if i < j {
            m[(i, j)] + m[(j, i)]
        } else if i == j {
            m[(i, i)]
        } else {
            0.0
        }
    })
}

/// Directional derivative of the orthogonal QR factor of `m` along `mdot`:
/// `Q·Π_A(Qᵀ·mdot·R⁻¹)`.
pub fn qr_q_derivative(m: &DenseMatrix, mdot: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    if mdot.rows() != m.rows() || mdot.cols() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: mdot.rows(),
        });
    }
    let QrFactors { q, r } = qr_pos(m, rank_tol)?;
    let y = &q.transpose() * mdot;
    let x = right_solve_upper(&y, &r);
    Ok(&q * &pi_skew(&x))
}
