#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toda_polytope::{DenseMatrix, SpectralPair, Tolerances};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_nalgebra(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_nalgebra(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

/// Haar-ish orthogonal matrix from nalgebra's QR of a Gaussian-like matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let m = to_nalgebra(&random_matrix(n, rng));
    from_nalgebra(&m.qr().q())
}

/// Strictly descending spectrum in [-5, 5] with consecutive gaps ≥ `min_gap`.
pub fn random_spectrum(n: usize, min_gap: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut l: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        if l.windows(2).all(|w| w[0] - w[1] >= min_gap) {
            return l;
        }
    }
}

pub fn random_pair(n: usize, rng: &mut impl Rng) -> SpectralPair {
    let lambda = random_spectrum(n, 0.1, rng);
    SpectralPair::new(lambda, random_orthogonal(n, rng), &Tolerances::default()).unwrap()
}

pub fn random_vec(n: usize, bound: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// Eigenvalues in descending order, from nalgebra.
pub fn eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let mut e: Vec<f64> = to_nalgebra(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Random ordered partition of `0..n` with at least two blocks.
pub fn random_proper_partition(n: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    loop {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        let k = rng.gen_range(2..=n);
        let mut blocks = vec![Vec::new(); k];
        for (pos, &i) in idx.iter().enumerate() {
            let b = if pos < k { pos } else { rng.gen_range(0..k) };
            blocks[b].push(i);
        }
        for b in &mut blocks {
            b.sort_unstable();
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            return blocks;
        }
    }
}

/// Lexicographically smallest column set `J` with `|det q[I×J]| > tol`,
/// by exhaustive enumeration.
pub fn brute_force_j(q: &DenseMatrix, set: &[usize], tol: f64) -> Option<Vec<usize>> {
    toda_polytope::sets::combinations(q.cols(), set.len())
        .into_iter()
        .find(|cols| q.select(set, cols).determinant().abs() > tol)
}

/// Random zero-sum direction.
pub fn zero_sum(v: Vec<f64>) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.into_iter().map(|x| x - mean).collect()
}
