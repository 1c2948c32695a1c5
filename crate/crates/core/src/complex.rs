//! Thresholded level sets `X₀, X₁, X₂` with face maps, and validation of the
//! semi-simplicial identities. There are no degeneracy maps, and levels above
//! dimension 2 are empty.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tensor::{Rank2Tensor, Rank3Tensor, Tensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSet {
    pub delta: f64,
    /// Vertices `0..n`.
    pub x0: Vec<usize>,
    /// Ordered pairs `(i, j)`, `i ≠ j`, with `|A¹ᵢⱼ| ≥ δ`, lexicographic.
    pub x1: Vec<[usize; 2]>,
    /// Ordered triples of distinct nodes with `|A²ᵢⱼₖ| ≥ δ`, lexicographic.
    pub x2: Vec<[usize; 3]>,
}

pub fn extract(a1: &Rank2Tensor, a2: &Rank3Tensor, delta: f64) -> Result<DeltaSet> {
    let n = a1.n();
    if a2.n() != n {
        return Err(Error::ShapeMismatch {
            left: a1.shape_label(),
            right: a2.shape_label(),
        });
    }
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be > 0"));
    }
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && a1.get(i, j).abs() >= delta {
                x1.push([i, j]);
            }
            for k in 0..n {
                if i != j && j != k && i != k && a2.get(i, j, k).abs() >= delta {
                    x2.push([i, j, k]);
                }
            }
        }
    }
    Ok(DeltaSet {
        delta,
        x0: (0..n).collect(),
        x1,
        x2,
    })
}

/// `dᵢ`: drop position `i` of an ordered tuple of length 2 or 3.
pub fn face(simplex: &[usize], i: usize) -> Result<Vec<usize>> {
    if !(2..=3).contains(&simplex.len()) {
        return Err(invalid(
            "simplex",
            format!(
                "faces defined for dimension 1 and 2, got length {}",
                simplex.len()
            ),
        ));
    }
    if i >= simplex.len() {
        return Err(Error::Index(format!(
            "face d{i} on a {}-simplex",
            simplex.len() - 1
        )));
    }
    let mut out = simplex.to_vec();
    out.remove(i);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingFace {
    pub simplex: [usize; 3],
    pub face_index: usize,
    pub face: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub is_semisimplicial: bool,
    pub missing_faces: Vec<MissingFace>,
    /// `dᵢdⱼ = dⱼ₋₁dᵢ` for `i < j` on every element of `x2`.
    pub identities_hold: bool,
}

pub fn validate(ds: &DeltaSet) -> ValidationReport {
    let mut missing = Vec::new();
    let mut identities_hold = true;
    for s in &ds.x2 {
        for fi in 0..3 {
            let f = face(s, fi).expect("triple has three faces");
            let f = [f[0], f[1]];
            if ds.x1.binary_search(&f).is_err() {
                missing.push(MissingFace {
                    simplex: *s,
                    face_index: fi,
                    face: f,
                });
            }
        }
        for j in 1..3 {
            for i in 0..j {
                let lhs = face(&face(s, j).unwrap(), i).unwrap();
                let rhs = face(&face(s, i).unwrap(), j - 1).unwrap();
                identities_hold &= lhs == rhs;
            }
        }
    }
    ValidationReport {
        is_semisimplicial: missing.is_empty(),
        missing_faces: missing,
        identities_hold,
    }
}

impl DeltaSet {
    /// Unordered edges `i < j` with some orientation in `x1`.
    pub fn canonical_edges(&self) -> Vec<[usize; 2]> {
        let mut v: Vec<_> = self.x1.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// One lexicographically minimal (sorted) representative per unordered
    /// triad with some ordering in `x2`.
    pub fn canonical_triads(&self) -> Vec<[usize; 3]> {
        let mut v: Vec<_> = self
            .x2
            .iter()
            .map(|t| {
                let mut s = *t;
                s.sort_unstable();
                s
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}
