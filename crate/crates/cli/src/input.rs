//! Matrix sources: built-in examples or JSON files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toda_polytope::{examples, DenseMatrix, SpectralPair, Tolerances};

use crate::UsageError;

/// Accepted file contents: exactly one of the three forms.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputFile {
    matrix: Option<Vec<Vec<f64>>>,
    lambda: Option<Vec<f64>>,
    q: Option<Vec<Vec<f64>>>,
    example: Option<String>,
}

/// Where the pair came from, echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct Source {
    pub kind: &'static str,
    pub name: String,
}

pub struct Loaded {
    pub source: Source,
    pub pair: SpectralPair,
}

fn square(rows: Vec<Vec<f64>>, what: &str) -> anyhow::Result<DenseMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(UsageError(format!("\"{what}\" must be a non-empty square array of rows")).into());
    }
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(DenseMatrix::from_row_major(n, n, data)?)
}

fn example(name: &str) -> anyhow::Result<SpectralPair> {
    examples::by_name(name).ok_or_else(|| {
        UsageError(format!("unknown example {name:?}; expected \"hexagon\" or \"quadrilateral\"")).into()
    })
}

pub fn from_example(name: &str) -> anyhow::Result<Loaded> {
    Ok(Loaded {
        source: Source {
            kind: "example",
            name: name.to_string(),
        },
        pair: example(name)?,
    })
}

pub fn from_file(path: &Path, tol: &Tolerances) -> anyhow::Result<Loaded> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let file: InputFile = serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let pair = match file {
        InputFile {
            matrix: Some(m),
            lambda: None,
            q: None,
            example: None,
        } => SpectralPair::from_symmetric(&square(m, "matrix")?, tol)?,
        InputFile {
            matrix: None,
            lambda: Some(lambda),
            q: Some(q),
            example: None,
        } => SpectralPair::new(lambda, square(q, "q")?, tol)?,
        InputFile {
            matrix: None,
            lambda: None,
            q: None,
            example: Some(name),
        } => example(&name)?,
        _ => {
            return Err(UsageError(format!(
                "{}: expected exactly one of {{\"matrix\"}}, {{\"lambda\", \"q\"}} or {{\"example\"}}",
                path.display()
            ))
            .into())
        }
    };
    Ok(Loaded {
        source: Source {
            kind: "file",
            name: path.display().to_string(),
        },
        pair,
    })
}
