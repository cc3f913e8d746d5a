/// Numerical thresholds shared by the kernels.
///
/// `rank` is relative to the scale of the matrix it is applied to; the
/// remaining thresholds are absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub orth: f64,
    pub recon: f64,
    pub gap: f64,
    pub rank: f64,
    pub symmetry: f64,
    /// Level-set tolerance used when grouping direction coordinates.
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orth: 1e-10,
            recon: 1e-10,
            gap: 1e-8,
            rank: 1e-9,
            symmetry: 1e-10,
            tie: 1e-12,
        }
    }
}
