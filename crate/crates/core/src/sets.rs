//! Index-set helpers. Sets are sorted vectors of 0-based indices.

use crate::error::{Error, Result};

/// Checks that `set` is strictly increasing and inside `0..n`.
pub fn validate_subset(n: usize, set: &[usize]) -> Result<()> {
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidIndexSet(format!(
            "{set:?} is not strictly increasing"
        )));
    }
    if let Some(&last) = set.last() {
        if last >= n {
            return Err(Error::InvalidIndexSet(format!("{set:?} exceeds 0..{n}")));
        }
    }
    Ok(())
}

/// Like [`validate_subset`], additionally rejecting the empty and full sets.
pub fn validate_proper_subset(n: usize, set: &[usize]) -> Result<()> {
    validate_subset(n, set)?;
    if set.is_empty() || set.len() == n {
        return Err(Error::EmptyOrFullSet { n });
    }
    Ok(())
}

pub fn complement(n: usize, set: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !set.contains(i)).collect()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for j in (pos + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All proper nonempty subsets of `0..n`, by size then lexicographically.
pub fn proper_subsets(n: usize) -> Vec<Vec<usize>> {
    (1..n).flat_map(|k| combinations(n, k)).collect()
}
