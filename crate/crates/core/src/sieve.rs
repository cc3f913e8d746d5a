//! Sieved QR decomposition driven by an ordered row partition, and the exact
//! boundary limits of Toda flows it produces.
//!
//! For an ordered partition `(I_0, …, I_p)` of the rows, the sieve sweeps the
//! columns left to right once per block, orthogonalizing their restrictions to
//! the rows of `I_α`. The columns that survive form `J_α`. The result is
//! `M = Q_I·R_I` with `R_I` upper triangular (positive diagonal), orthogonal
//! blocks `(Q_I)_{I_α×J_α}` and zero blocks `(Q_I)_{I_α×J_β}` for `β > α`.

use crate::error::{Error, Result};
use crate::flow::{toda_action, TodaDirection};
use crate::linalg::{qr_pos, right_solve_upper, SpectralPair};
use crate::matrix::DenseMatrix;
use crate::sets::{complement, validate_proper_subset, validate_subset};
use crate::tolerance::Tolerances;

/// Ordered list of disjoint, nonempty, sorted blocks covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl OrderedPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            validate_subset(n, block).map_err(|e| Error::InvalidPartition(e.to_string()))?;
            for &i in block {
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("index {i} repeated")));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {missing} missing")));
        }
        Ok(Self { n, blocks })
    }

    /// The one-block partition `(0..n)`.
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    /// `(set, complement)`.
    pub fn two_block(n: usize, set: &[usize]) -> Result<Self> {
        validate_proper_subset(n, set)?;
        Ok(Self {
            n,
            blocks: vec![set.to_vec(), complement(n, set)],
        })
    }

    /// `({images[0]}, {images[1]}, …)`.
    pub fn singletons(images: &[usize]) -> Result<Self> {
        Self::new(images.len(), images.iter().map(|&i| vec![i]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// At least two blocks.
    pub fn is_proper(&self) -> bool {
        self.blocks.len() >= 2
    }

    /// Block index of every element.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                out[i] = b;
            }
        }
        out
    }
}

/// Output of [`sieve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SievedDecomposition {
    pub j_partition: OrderedPartition,
    pub q_sieved: DenseMatrix,
    pub r_upper: DenseMatrix,
}

/// Level sets of `sigma`, ordered by decreasing value.
///
/// Indices are grouped with the first (largest) element of the current block
/// when within `tie_tol` of it.
pub fn partition_from_direction(sigma: &TodaDirection, tie_tol: f64) -> OrderedPartition {
    let s = sigma.as_slice();
    let n = s.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut head = f64::NAN;
    for i in order {
        match blocks.last_mut() {
            Some(block) if (head - s[i]).abs() <= tie_tol => block.push(i),
            _ => {
                head = s[i];
                blocks.push(vec![i]);
            }
        }
    }
    for block in &mut blocks {
        block.sort_unstable();
    }
    OrderedPartition { n, blocks }
}

/// The sieved decomposition of an invertible `m` for the row partition.
///
/// A column counts as nonzero on a block when the norm of its restriction
/// exceeds `rank_tol` times the norm of the original column; ratios within a
/// factor of ten above the threshold are reported as indeterminate.
pub fn sieve(
    m: &DenseMatrix,
    partition: &OrderedPartition,
    rank_tol: f64,
) -> Result<SievedDecomposition> {
    let n = partition.n();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows(),
        });
    }
    let col_norms: Vec<f64> = (0..n)
        .map(|j| m.col(j).iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    if let Some(column) = col_norms.iter().position(|&c| c == 0.0) {
        return Err(Error::SingularInput { column, norm: 0.0 });
    }

    let mut w = m.clone();
    // Column operations applied so far: w = m·t.
    let mut t = DenseMatrix::identity(n);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut j_blocks = Vec::with_capacity(partition.blocks().len());

    for (alpha, rows) in partition.blocks().iter().enumerate() {
        let mut chosen: Vec<usize> = Vec::with_capacity(rows.len());
        for pos in 0..remaining.len() {
            if chosen.len() == rows.len() {
                break;
            }
            let k = remaining[pos];
            let norm2: f64 = rows.iter().map(|&i| w[(i, k)] * w[(i, k)]).sum();
            let ratio = norm2.sqrt() / col_norms[k];
            if ratio <= rank_tol {
                continue;
            }
            if ratio <= 10.0 * rank_tol {
                return Err(Error::IndeterminateRank {
                    block: alpha,
                    ratio,
                });
            }
            chosen.push(k);
            for &later in &remaining[pos + 1..] {
                let dot: f64 = rows.iter().map(|&i| w[(i, later)] * w[(i, k)]).sum();
                let c = dot / norm2;
                if c != 0.0 {
                    for i in 0..n {
                        w[(i, later)] -= c * w[(i, k)];
                        t[(i, later)] -= c * t[(i, k)];
                    }
                }
            }
        }
        if chosen.len() < rows.len() {
            return Err(Error::RankDeficiency {
                block: alpha,
                found: chosen.len(),
                expected: rows.len(),
            });
        }
        for &k in &chosen {
            let norm = rows.iter().map(|&i| w[(i, k)] * w[(i, k)]).sum::<f64>().sqrt();
            for i in 0..n {
                w[(i, k)] /= norm;
                t[(i, k)] /= norm;
            }
        }
        remaining.retain(|k| !chosen.contains(k));
        // What is left on these rows is orthogonal to a basis: clear the noise.
        for &k in &remaining {
            for &i in rows {
                w[(i, k)] = 0.0;
            }
        }
        j_blocks.push(chosen);
    }

    let r_upper = right_solve_upper(&DenseMatrix::identity(n), &t);
    Ok(SievedDecomposition {
        j_partition: OrderedPartition {
            n,
            blocks: j_blocks,
        },
        q_sieved: w,
        r_upper,
    })
}

/// `J(I)`: the first block of the column partition produced by sieving `q`
/// with `(I, I^c)`.
pub fn j_of_i(q: &DenseMatrix, set: &[usize], rank_tol: f64) -> Result<Vec<usize>> {
    let partition = OrderedPartition::two_block(q.rows(), set)?;
    let mut dec = sieve(q, &partition, rank_tol)?;
    Ok(dec.j_partition.blocks.swap_remove(0))
}

/// A boundary point together with the column partition of its invariant
/// coordinate subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLimit {
    pub pair: SpectralPair,
    pub j_partition: OrderedPartition,
}

/// Exact limit of `𝒬(D_k·Q)` for diagonal scalings with the given
/// equiasymptotic partition and limiting in-block ratios `weights`.
///
/// Each block `(Q_∞)_{I_α×J_α}` is the orthogonal QR factor of
/// `diag(w)_{I_α}·(Q_I)_{I_α×J_α}`; every other block is zero.
pub fn boundary_limit(
    pair: &SpectralPair,
    partition: &OrderedPartition,
    weights: &[f64],
    tol: &Tolerances,
) -> Result<SpectralPair> {
    boundary_limit_detailed(pair, partition, weights, tol).map(|b| b.pair)
}

pub fn boundary_limit_detailed(
    pair: &SpectralPair,
    partition: &OrderedPartition,
    weights: &[f64],
    tol: &Tolerances,
) -> Result<BoundaryLimit> {
    let n = pair.n();
    if partition.n() != n || weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if weights.iter().any(|&w| !(w > 0.0 && w <= 1.0)) {
        return Err(Error::InvalidWeights("weights must lie in (0, 1]".into()));
    }
    for block in partition.blocks() {
        let top = block.iter().map(|&i| weights[i]).fold(0.0, f64::max);
        if (top - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!(
                "largest weight on block {block:?} is {top}, expected 1"
            )));
        }
    }

    let dec = sieve(pair.q(), partition, tol.rank)?;
    let mut q_inf = DenseMatrix::zeros(n, n);
    for (rows, cols) in partition.blocks().iter().zip(dec.j_partition.blocks()) {
        let w: Vec<f64> = rows.iter().map(|&i| weights[i]).collect();
        let block = dec.q_sieved.select(rows, cols).scale_rows(&w);
        let f = qr_pos(&block, 0.0)?;
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                q_inf[(i, j)] = f.q[(a, b)];
            }
        }
    }
    Ok(BoundaryLimit {
        pair: SpectralPair::from_parts(pair.lambda().to_vec(), q_inf),
        j_partition: dec.j_partition,
    })
}

/// Limit of `Φ(log(base_weights) + t·σ, S)` as `t → ∞`.
///
/// When `σ` is constant (up to `tie_tol`) no boundary is reached and the
/// result is the Toda action by `log(base_weights)`.
pub fn flow_limit(
    pair: &SpectralPair,
    sigma: &TodaDirection,
    base_weights: &[f64],
    tol: &Tolerances,
) -> Result<SpectralPair> {
    flow_limit_detailed(pair, sigma, base_weights, tol).map(|b| b.pair)
}

pub fn flow_limit_detailed(
    pair: &SpectralPair,
    sigma: &TodaDirection,
    base_weights: &[f64],
    tol: &Tolerances,
) -> Result<BoundaryLimit> {
    let n = pair.n();
    if sigma.len() != n || base_weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: base_weights.len(),
        });
    }
    if base_weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidWeights("base weights must be positive".into()));
    }
    let partition = partition_from_direction(sigma, tol.tie);
    if !partition.is_proper() {
        let tau = TodaDirection::new(base_weights.iter().map(|w| w.ln()).collect())?;
        return Ok(BoundaryLimit {
            pair: toda_action(pair, &tau)?,
            j_partition: OrderedPartition::trivial(n),
        });
    }
    let mut weights = base_weights.to_vec();
    for block in partition.blocks() {
        let top = block.iter().map(|&i| base_weights[i]).fold(0.0, f64::max);
        for &i in block {
            weights[i] = base_weights[i] / top;
        }
        // Exact 1 on the block maximum.
        for &i in block {
            if base_weights[i] == top {
                weights[i] = 1.0;
            }
        }
    }
    boundary_limit_detailed(pair, &partition, &weights, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{hexagon, quadrilateral, quadrilateral_q};
    use crate::linalg::qr_pos;

    fn dir(v: &[f64]) -> TodaDirection {
        TodaDirection::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(OrderedPartition::new(3, vec![vec![0], vec![1, 2]]).is_ok());
        assert!(OrderedPartition::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(OrderedPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(OrderedPartition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(!OrderedPartition::trivial(3).is_proper());
    }

    #[test]
    fn partitions_from_directions() {
        let p = partition_from_direction(&dir(&[-1.0, 0.0, -2.0]), 1e-12);
        assert_eq!(p.blocks(), &[vec![1], vec![0], vec![2]]);
        let p = partition_from_direction(&dir(&[0.0, 0.0, 0.0]), 1e-12);
        assert_eq!(p.blocks(), &[vec![0, 1, 2]]);
        let p = partition_from_direction(&dir(&[-1.0, -1.0, 0.0]), 1e-12);
        assert_eq!(p.blocks(), &[vec![2], vec![0, 1]]);
    }

    #[test]
    fn one_block_sieve_is_plain_qr() {
        let m = DenseMatrix::from_rows(&[[2.0, -1.0, 0.5], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]).unwrap();
        let dec = sieve(&m, &OrderedPartition::trivial(3), 1e-9).unwrap();
        let f = qr_pos(&m, 1e-9).unwrap();
        assert!(dec.q_sieved.max_diff(&f.q) < 1e-14);
        assert!(dec.r_upper.max_diff(&f.r) < 1e-13);
        assert_eq!(dec.j_partition.blocks(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn quadrilateral_j_partition() {
        let p = OrderedPartition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let dec = sieve(&quadrilateral_q(), &p, 1e-9).unwrap();
        assert_eq!(dec.j_partition.blocks(), &[vec![0, 2], vec![1]]);
        assert_eq!(j_of_i(&quadrilateral_q(), &[0, 1], 1e-9).unwrap(), vec![0, 2]);
        assert_eq!(j_of_i(&DenseMatrix::identity(3), &[1], 1e-9).unwrap(), vec![1]);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let singular = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let p = OrderedPartition::new(2, vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(
            sieve(&singular, &p, 1e-9),
            Err(Error::RankDeficiency { block: 1, .. })
        ));
    }

    #[test]
    fn weights_are_validated() {
        let tol = Tolerances::default();
        let p = OrderedPartition::new(3, vec![vec![2], vec![0, 1]]).unwrap();
        assert!(matches!(
            boundary_limit(&hexagon(), &p, &[0.5, 0.5, 1.0], &tol),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            boundary_limit(&hexagon(), &p, &[1.0, 0.0, 1.0], &tol),
            Err(Error::InvalidWeights(_))
        ));
    }

    #[test]
    fn hexagon_singleton_limit() {
        let tol = Tolerances::default();
        let p = OrderedPartition::singletons(&[1, 0, 2]).unwrap();
        let lim = boundary_limit(&hexagon(), &p, &[1.0; 3], &tol).unwrap();
        let expected = DenseMatrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(lim.q().max_diff(&expected) < 1e-12, "{:?}", lim.q());
        let s = lim.reconstruct();
        assert!(s.max_diff(&DenseMatrix::from_diag(&[2.0, 4.0, 1.0])) < 1e-12);
    }

    #[test]
    fn quadrilateral_singleton_limit() {
        let tol = Tolerances::default();
        let p = OrderedPartition::singletons(&[1, 0, 2]).unwrap();
        let lim = boundary_limit(&quadrilateral(), &p, &[1.0; 3], &tol).unwrap();
        let s = lim.reconstruct();
        assert!(s.max_diff(&DenseMatrix::from_diag(&[2.0, 1.0, 4.0])) < 1e-12);
    }

    #[test]
    fn non_proper_flow_limit_is_a_toda_action() {
        let tol = Tolerances::default();
        let w = [0.5, 0.25, 1.0];
        let lim = flow_limit(&hexagon(), &TodaDirection::zeros(3), &w, &tol).unwrap();
        let tau = dir(&[0.5f64.ln(), 0.25f64.ln(), 0.0]);
        let direct = toda_action(&hexagon(), &tau).unwrap();
        assert!(lim.q().max_diff(direct.q()) < 1e-13);
    }
}
