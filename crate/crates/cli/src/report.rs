//! Serializable reports. Index sets and permutations are 1-based; matrices are
//! arrays of rows.

use serde::Serialize;
use toda_polytope::bfr::Inversion;
use toda_polytope::polytope::{MinorStatus, SpectralPolytope};
use toda_polytope::sieve::BoundaryLimit;
use toda_polytope::{bfr, DenseMatrix, Permutation, SpectralPair, Tolerances};

use crate::input::Source;

#[derive(Debug, Serialize)]
pub struct Input {
    pub source: Source,
    pub matrix: Vec<Vec<f64>>,
    pub spectrum: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl Input {
    pub fn new(source: &Source, pair: &SpectralPair) -> Self {
        Self {
            source: source.clone(),
            matrix: pair.reconstruct().to_rows(),
            spectrum: pair.lambda().to_vec(),
            eigenvectors: pair.q().to_rows(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ToleranceReport {
    pub orth: f64,
    pub recon: f64,
    pub gap: f64,
    pub rank: f64,
    pub symmetry: f64,
    pub tie: f64,
}

impl From<&Tolerances> for ToleranceReport {
    fn from(t: &Tolerances) -> Self {
        Self {
            orth: t.orth,
            recon: t.recon,
            gap: t.gap,
            rank: t.rank,
            symmetry: t.symmetry,
            tie: t.tie,
        }
    }
}

fn one_based(set: &[usize]) -> Vec<usize> {
    set.iter().map(|i| i + 1).collect()
}

fn one_based_blocks(blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    blocks.iter().map(|b| one_based(b)).collect()
}

/// Compact number for labels: integers without a fractional part, otherwise
/// up to six decimals with trailing zeros removed.
pub fn short_number(x: f64) -> String {
    if (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0) {
        return format!("{}", x.round() as i64);
    }
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn diag_label(d: &[f64]) -> String {
    let parts: Vec<String> = d.iter().map(|&x| short_number(x)).collect();
    format!("diag({})", parts.join(","))
}

pub fn set_label(set: &[usize]) -> String {
    let parts: Vec<String> = set.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

#[derive(Debug, Serialize)]
pub struct Vertex {
    /// `π` as the list `π(1), …, π(n)`.
    pub permutation: Vec<usize>,
    /// Diagonal of `Λ_π`.
    pub diagonal: Vec<f64>,
    pub label: String,
    /// BFR image of `Λ_π`.
    pub extremal_vertex: Vec<f64>,
}

impl Vertex {
    pub fn new(pi: &Permutation, lambda: &[f64], extremal: &[f64]) -> Self {
        let diagonal = pi.permuted_diagonal(lambda);
        Self {
            permutation: one_based(pi.images()),
            label: diag_label(&diagonal),
            diagonal,
            extremal_vertex: extremal.to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct HalfSpace {
    /// `I` in `Σ_{i∈I} x_i ≤ bound`.
    pub set: Vec<usize>,
    /// `J(I)`, with `bound = Σ_{j∈J(I)} λ_j`.
    pub j_set: Vec<usize>,
    pub bound: f64,
    pub permutohedral: bool,
}

#[derive(Debug, Serialize)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
    pub det: f64,
    pub status: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Polytope {
    pub trace: f64,
    pub vertices: Vec<Vec<f64>>,
    pub halfspaces: Vec<HalfSpace>,
    /// Vertices recovered from the half-spaces alone; omitted when `n` is too
    /// large for brute-force enumeration.
    pub vertices_from_halfspaces: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub input: Input,
    pub bfr: Vec<f64>,
    pub accessible_count: usize,
    pub accessible: Vec<Vertex>,
    pub spectrally_complete: bool,
    pub polytope: Polytope,
    pub minors: Vec<Minor>,
    pub near_threshold_minors: usize,
    pub tolerances: ToleranceReport,
}

fn status_name(s: MinorStatus) -> &'static str {
    match s {
        MinorStatus::Nonzero => "nonzero",
        MinorStatus::Zero => "zero",
        MinorStatus::NearThreshold => "near_threshold",
    }
}

pub struct AnalysisParts<'a> {
    pub source: &'a Source,
    pub pair: &'a SpectralPair,
    pub polytope: &'a SpectralPolytope,
    pub complete: bool,
    pub from_halfspaces: Option<Vec<Vec<f64>>>,
    pub minors: &'a [toda_polytope::polytope::MinorDiagnostic],
    pub tol: &'a Tolerances,
}

impl AnalysisReport {
    pub fn new(parts: AnalysisParts<'_>) -> Self {
        let p = parts.polytope;
        let accessible: Vec<Vertex> = p
            .accessible_perms
            .iter()
            .zip(&p.extremal_vertices)
            .map(|(pi, v)| Vertex::new(pi, &p.lambda, v))
            .collect();
        Self {
            input: Input::new(parts.source, parts.pair),
            bfr: bfr(parts.pair).0,
            accessible_count: accessible.len(),
            accessible,
            spectrally_complete: parts.complete,
            polytope: Polytope {
                trace: p.trace,
                vertices: p.extremal_vertices.clone(),
                halfspaces: p
                    .halfspaces
                    .iter()
                    .map(|h| HalfSpace {
                        set: one_based(&h.set),
                        j_set: one_based(&h.j_set),
                        bound: h.bound,
                        permutohedral: h.is_permutohedral(),
                    })
                    .collect(),
                vertices_from_halfspaces: parts.from_halfspaces,
            },
            minors: parts
                .minors
                .iter()
                .map(|m| Minor {
                    rows: one_based(&m.rows),
                    columns: (1..=m.rows.len()).collect(),
                    det: m.det,
                    status: status_name(m.status),
                })
                .collect(),
            near_threshold_minors: p.near_threshold.len(),
            tolerances: parts.tol.into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub matrix: Vec<Vec<f64>>,
    pub bfr: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct FlowReport {
    pub input: Input,
    pub tau: Vec<f64>,
    pub samples: Vec<FlowSample>,
}

#[derive(Debug, Serialize)]
pub struct LimitReport {
    pub input: Input,
    pub sigma: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row partition: level sets of `sigma` in decreasing order.
    pub partition: Vec<Vec<usize>>,
    /// Column partition spanning the invariant coordinate subspaces.
    pub j_partition: Vec<Vec<usize>>,
    pub q_limit: Vec<Vec<f64>>,
    pub matrix: Vec<Vec<f64>>,
    pub bfr: Vec<f64>,
}

impl LimitReport {
    pub fn new(
        input: Input,
        sigma: Vec<f64>,
        weights: Vec<f64>,
        partition: &[Vec<usize>],
        limit: &BoundaryLimit,
    ) -> Self {
        Self {
            input,
            sigma,
            weights,
            partition: one_based_blocks(partition),
            j_partition: one_based_blocks(limit.j_partition.blocks()),
            q_limit: limit.pair.q().to_rows(),
            matrix: limit.pair.reconstruct().to_rows(),
            bfr: bfr(&limit.pair).0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InvertReport {
    pub input: Input,
    pub target: Vec<f64>,
    /// Zero-sum direction with `bfr(Φ(tau, S)) ≈ target`.
    pub tau: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl InvertReport {
    pub fn new(input: Input, target: Vec<f64>, inv: Inversion, moved: &DenseMatrix) -> Self {
        Self {
            input,
            target,
            tau: inv.tau.into_vec(),
            residual: inv.residual,
            iterations: inv.iterations,
            matrix: moved.to_rows(),
        }
    }
}
