//! Accessible vertices, spectral completeness, Jacobi matrices and the
//! spectral polytope in vertex and half-space form.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{qr_pos, SpectralPair};
use crate::matrix::DenseMatrix;
use crate::sets::{combinations, proper_subsets};
use crate::sieve::j_of_i;

/// Default limit for the `n!` and `2ⁿ` enumerations.
pub const DEFAULT_N_MAX: usize = 8;

/// Largest dimension accepted by [`is_spectrally_complete`].
pub const COMPLETENESS_N_MAX: usize = 12;

/// Largest dimension accepted by [`vertices_from_halfspaces`].
pub const BRUTE_FORCE_N_MAX: usize = 5;

/// A bijection of `0..n`, stored as its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    /// Diagonal of `Λ_π = ΠᵀΛΠ`, i.e. `(λ_{π(0)}, …, λ_{π(n−1)})`.
    pub fn permuted_diagonal(&self, lambda: &[f64]) -> Vec<f64> {
        self.0.iter().map(|&p| lambda[p]).collect()
    }

    /// The permutation matrix with `Π[i][j] = 1` iff `i = π(j)`.
    pub fn matrix(&self) -> DenseMatrix {
        let n = self.0.len();
        DenseMatrix::from_fn(n, n, |i, j| if self.0[j] == i { 1.0 } else { 0.0 })
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self(p.clone()));
            let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
            p.swap(i - 1, j);
            p[i..].reverse();
        }
    }
}

/// Classification of a minor determinant against `rank_tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinorStatus {
    Nonzero,
    Zero,
    /// `|det| ∈ (rank_tol, 10·rank_tol]`: counted as nonzero, but close.
    NearThreshold,
}

impl MinorStatus {
    pub fn classify(det: f64, rank_tol: f64) -> Self {
        let a = det.abs();
        if a <= rank_tol {
            Self::Zero
        } else if a <= 10.0 * rank_tol {
            Self::NearThreshold
        } else {
            Self::Nonzero
        }
    }

    pub fn is_nonzero(self) -> bool {
        self != Self::Zero
    }
}

/// Determinant of `q[rows × {0..|rows|}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorDiagnostic {
    pub rows: Vec<usize>,
    pub det: f64,
    pub status: MinorStatus,
}

fn leading_minor(q: &DenseMatrix, rows: &[usize]) -> f64 {
    let cols: Vec<usize> = (0..rows.len()).collect();
    q.select(rows, &cols).determinant()
}

/// Every minor `q[K × {0..|K|}]` for nonempty row sets `K`, by size then
/// lexicographically.
pub fn leading_column_minors(q: &DenseMatrix, rank_tol: f64) -> Vec<MinorDiagnostic> {
    let n = q.rows();
    (1..=n)
        .flat_map(|k| combinations(n, k))
        .map(|rows| {
            let det = leading_minor(q, &rows);
            MinorDiagnostic {
                status: MinorStatus::classify(det, rank_tol),
                rows,
                det,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccessibilityReport {
    /// Permutations whose nested minors all have `|det| > rank_tol`, in
    /// lexicographic order.
    pub accessible: Vec<Permutation>,
    /// Minors on accessible chains that are within ten times the threshold.
    pub near_threshold: Vec<MinorDiagnostic>,
}

fn square_guard(q: &DenseMatrix, n_max: usize) -> Result<usize> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch {
            expected: q.rows(),
            found: q.cols(),
        });
    }
    let n = q.rows();
    if n > n_max {
        return Err(Error::TooLarge { n, max: n_max });
    }
    Ok(n)
}

/// Permutations `π` for which every minor
/// `q[{π(0),…,π(k−1)} × {0,…,k−1}]` is nonzero.
pub fn accessible_vertices(
    q: &DenseMatrix,
    rank_tol: f64,
    n_max: usize,
) -> Result<AccessibilityReport> {
    let n = square_guard(q, n_max)?;
    // Minor determinants keyed by row bitmask, computed on demand.
    let mut minors: HashMap<u32, f64> = HashMap::new();
    let mut accessible = Vec::new();
    let mut flagged: Vec<u32> = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    extend_chain(q, rank_tol, 0, &mut prefix, &mut minors, &mut flagged, &mut accessible);
    accessible.sort();

    flagged.sort_unstable();
    flagged.dedup();
    let near_threshold = flagged
        .into_iter()
        .map(|mask| {
            let rows: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let det = minors[&mask];
            MinorDiagnostic {
                rows,
                det,
                status: MinorStatus::NearThreshold,
            }
        })
        .collect();
    Ok(AccessibilityReport {
        accessible,
        near_threshold,
    })
}

fn extend_chain(
    q: &DenseMatrix,
    rank_tol: f64,
    mask: u32,
    prefix: &mut Vec<usize>,
    minors: &mut HashMap<u32, f64>,
    flagged: &mut Vec<u32>,
    out: &mut Vec<Permutation>,
) {
    let n = q.rows();
    if prefix.len() == n {
        out.push(Permutation(prefix.clone()));
        return;
    }
    for i in 0..n {
        if mask & (1 << i) != 0 {
            continue;
        }
        let next = mask | (1 << i);
        let det = *minors.entry(next).or_insert_with(|| {
            let rows: Vec<usize> = (0..n).filter(|r| next & (1 << r) != 0).collect();
            leading_minor(q, &rows)
        });
        match MinorStatus::classify(det, rank_tol) {
            MinorStatus::Zero => continue,
            MinorStatus::NearThreshold => flagged.push(next),
            MinorStatus::Nonzero => {}
        }
        prefix.push(i);
        extend_chain(q, rank_tol, next, prefix, minors, flagged, out);
        prefix.pop();
    }
}

/// Coordinate `k` is `λ_{π⁻¹(k)}`.
pub fn extremal_vertex(pi: &Permutation, lambda: &[f64]) -> Result<Vec<f64>> {
    if pi.len() != lambda.len() {
        return Err(Error::DimensionMismatch {
            expected: lambda.len(),
            found: pi.len(),
        });
    }
    let mut x = vec![0.0; lambda.len()];
    for (i, &p) in pi.images().iter().enumerate() {
        x[p] = lambda[i];
    }
    Ok(x)
}

/// True iff every minor `q[K × {0..|K|}]` has `|det| > rank_tol`.
pub fn is_spectrally_complete(q: &DenseMatrix, rank_tol: f64) -> Result<bool> {
    let n = square_guard(q, COMPLETENESS_N_MAX)?;
    Ok((1..=n)
        .flat_map(|k| combinations(n, k))
        .all(|rows| leading_minor(q, &rows).abs() > rank_tol))
}

/// Smallest `|det|` over all minors `q[K × {0..|K|}]`.
pub fn min_leading_column_minor(q: &DenseMatrix) -> Result<f64> {
    let n = square_guard(q, COMPLETENESS_N_MAX)?;
    Ok((1..=n)
        .flat_map(|k| combinations(n, k))
        .map(|rows| leading_minor(q, &rows).abs())
        .fold(f64::INFINITY, f64::min))
}

/// `Σ_{i∈set} x_i ≤ bound`, with `bound = Σ_{j∈J(set)} λ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub set: Vec<usize>,
    pub j_set: Vec<usize>,
    pub bound: f64,
}

impl HalfSpace {
    /// `bound − Σ_{i∈set} x_i`.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.bound - self.set.iter().map(|&i| x[i]).sum::<f64>()
    }

    /// Whether the bound is the one of the full permutohedron, i.e. `J(I)` is
    /// the leading index set.
    pub fn is_permutohedral(&self) -> bool {
        self.j_set.iter().enumerate().all(|(k, &j)| j == k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPolytope {
    pub trace: f64,
    pub lambda: Vec<f64>,
    pub extremal_vertices: Vec<Vec<f64>>,
    pub halfspaces: Vec<HalfSpace>,
    pub accessible_perms: Vec<Permutation>,
    pub near_threshold: Vec<MinorDiagnostic>,
}

impl SpectralPolytope {
    pub fn dimension(&self) -> usize {
        self.lambda.len()
    }

    /// Smallest half-space slack of `x`.
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.slack(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        contains(self, x, tol)
    }

    /// Half-spaces whose boundary contains at least two extremal vertices and
    /// whose bound differs from the permutohedron bound.
    pub fn chopping_constraints(&self, tol: f64) -> Vec<&HalfSpace> {
        self.halfspaces
            .iter()
            .filter(|h| !h.is_permutohedral())
            .filter(|h| {
                self.extremal_vertices
                    .iter()
                    .filter(|v| h.slack(v).abs() <= tol)
                    .count()
                    >= 2
            })
            .collect()
    }
}

/// Vertices from accessible permutations and one half-space per proper
/// subset.
pub fn spectral_polytope(pair: &SpectralPair, rank_tol: f64) -> Result<SpectralPolytope> {
    let n = pair.n();
    let lambda = pair.lambda().to_vec();
    let report = accessible_vertices(pair.q(), rank_tol, DEFAULT_N_MAX)?;
    let extremal_vertices = report
        .accessible
        .iter()
        .map(|pi| extremal_vertex(pi, &lambda))
        .collect::<Result<Vec<_>>>()?;
    let halfspaces = proper_subsets(n)
        .into_iter()
        .map(|set| {
            let j_set = j_of_i(pair.q(), &set, rank_tol)?;
            let bound = j_set.iter().map(|&j| lambda[j]).sum();
            Ok(HalfSpace { set, j_set, bound })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralPolytope {
        trace: pair.trace(),
        lambda,
        extremal_vertices,
        halfspaces,
        accessible_perms: report.accessible,
        near_threshold: report.near_threshold,
    })
}

/// On the trace hyperplane and inside every half-space, up to `tol`.
pub fn contains(p: &SpectralPolytope, x: &[f64], tol: f64) -> bool {
    x.len() == p.dimension()
        && (x.iter().sum::<f64>() - p.trace).abs() <= tol
        && p.halfspaces.iter().all(|h| h.slack(x) >= -tol)
}

/// Brute-force vertex enumeration of the H-representation: solves every
/// choice of `n−1` half-space boundaries together with the trace equation
/// and keeps the feasible, distinct solutions (sorted lexicographically).
pub fn vertices_from_halfspaces(p: &SpectralPolytope, tol: f64) -> Result<Vec<Vec<f64>>> {
    let n = p.dimension();
    if n > BRUTE_FORCE_N_MAX {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_N_MAX,
        });
    }
    if n == 1 {
        return Ok(vec![vec![p.trace]]);
    }
    let mut found: Vec<Vec<f64>> = Vec::new();
    for chosen in combinations(p.halfspaces.len(), n - 1) {
        let mut a = DenseMatrix::zeros(n, n);
        let mut b = vec![0.0; n];
        for (row, &h) in chosen.iter().enumerate() {
            for &i in &p.halfspaces[h].set {
                a[(row, i)] = 1.0;
            }
            b[row] = p.halfspaces[h].bound;
        }
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        b[n - 1] = p.trace;
        // Indicator systems have integer determinants.
        if a.determinant().abs() < 0.5 {
            continue;
        }
        let Some(x) = a.solve(&b) else { continue };
        if p.halfspaces.iter().all(|h| h.slack(&x) >= -tol) {
            found.push(x);
        }
    }
    Ok(dedup_points(found, 1e-8))
}

/// Sorts points lexicographically and merges those equal coordinate-wise to
/// relative tolerance `rel`.
pub fn dedup_points(mut points: Vec<Vec<f64>>, rel: f64) -> Vec<Vec<f64>> {
    let close = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= rel * x.abs().max(y.abs()).max(1.0))
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for p in points {
        if !out.iter().any(|q| close(q, &p)) {
            out.push(p);
        }
    }
    out
}

/// The Jacobi matrix with spectrum `lambda` whose eigenvector matrix has
/// first column `u`.
pub fn jacobi_from_spectral_data(lambda: &[f64], u: &[f64], gap_tol: f64) -> Result<DenseMatrix> {
    Ok(jacobi_pair_from_spectral_data(lambda, u, gap_tol)?.reconstruct())
}

/// Spectral pair `(Λ, Q)` of the Jacobi matrix, where `Q` is the orthogonal
/// factor of the Krylov matrix `[u, Λu, …, Λⁿ⁻¹u]`.
///
/// The Krylov factor is built column by column (Lanczos with full
/// reorthogonalization), which spans the same nested subspaces with the
/// same orientation as the QR factor but stays well conditioned.
pub fn jacobi_pair_from_spectral_data(
    lambda: &[f64],
    u: &[f64],
    gap_tol: f64,
) -> Result<SpectralPair> {
    let n = lambda.len();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    if lambda.iter().chain(u).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if u.iter().any(|&x| x <= 0.0) || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotPositiveVector);
    }
    for (index, w) in lambda.windows(2).enumerate() {
        let gap = w[0] - w[1];
        if gap.is_nan() || gap < gap_tol {
            return Err(Error::DegenerateSpectrum { index, gap });
        }
    }

    let mut basis: Vec<Vec<f64>> = vec![u.iter().map(|x| x / norm).collect()];
    for k in 1..n {
        let mut v: Vec<f64> = basis[k - 1].iter().zip(lambda).map(|(x, l)| l * x).collect();
        for _pass in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            return Err(Error::NumericalBreakdown("Krylov sequence terminated early".into()));
        }
        basis.push(v.into_iter().map(|x| x / len).collect());
    }
    let q = DenseMatrix::from_fn(n, n, |i, k| basis[k][i]);
    Ok(SpectralPair::from_parts(lambda.to_vec(), q))
}

/// Orthogonal factor of the Krylov matrix computed directly by QR; used to
/// cross-check [`jacobi_pair_from_spectral_data`] on small, well-separated
/// inputs.
pub fn krylov_qr_factor(lambda: &[f64], u: &[f64]) -> Result<DenseMatrix> {
    let n = lambda.len();
    let m = DenseMatrix::from_fn(n, n, |i, k| lambda[i].powi(k as i32) * u[i]);
    Ok(qr_pos(&m, 0.0)?.q)
}
