//! The two 3×3 slices used throughout as worked examples, both with spectrum
//! `(4, 2, 1)`.

use crate::linalg::SpectralPair;
use crate::matrix::DenseMatrix;
use crate::tolerance::Tolerances;

pub const EXAMPLE_SPECTRUM: [f64; 3] = [4.0, 2.0, 1.0];

/// Eigenvector matrix of the spectrally complete example (hexagonal slice).
pub fn hexagon_q() -> DenseMatrix {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    DenseMatrix::from_rows(&[
        [s6 / 6.0, -s2 / 2.0, s3 / 3.0],
        [s6 / 3.0, 0.0, -s3 / 3.0],
        [s6 / 6.0, s2 / 2.0, s3 / 3.0],
    ])
    .expect("finite entries")
}

/// Eigenvector matrix of the incomplete example (quadrilateral slice).
pub fn quadrilateral_q() -> DenseMatrix {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    DenseMatrix::from_rows(&[
        [s3 / 3.0, s6 / 6.0, -s2 / 2.0],
        [s3 / 3.0, s6 / 6.0, s2 / 2.0],
        [s3 / 3.0, -s6 / 3.0, 0.0],
    ])
    .expect("finite entries")
}

pub fn hexagon() -> SpectralPair {
    SpectralPair::new(EXAMPLE_SPECTRUM.to_vec(), hexagon_q(), &Tolerances::default())
        .expect("example is a valid pair")
}

pub fn quadrilateral() -> SpectralPair {
    SpectralPair::new(
        EXAMPLE_SPECTRUM.to_vec(),
        quadrilateral_q(),
        &Tolerances::default(),
    )
    .expect("example is a valid pair")
}

/// Looks up an example by its CLI name.
pub fn by_name(name: &str) -> Option<SpectralPair> {
    match name {
        "hexagon" => Some(hexagon()),
        "quadrilateral" => Some(quadrilateral()),
        _ => None,
    }
}
