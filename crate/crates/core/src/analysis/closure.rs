//! δ-threshold downward-closure checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{sign0, Flavor};
use crate::tensor::{Rank2Tensor, Rank3Tensor, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeFailure {
    /// Edge magnitude below δ.
    Weak,
    /// Magnitude at least δ but the signed coordinate is below δ.
    Misoriented,
}

/// A strong triad with at least one failing edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub triple: [usize; 3],
    pub triad_weight: f64,
    /// Failing edges among `(i,j)`, `(i,k)`, `(j,k)`, in that order.
    pub failures: Vec<([usize; 2], EdgeFailure)>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, k] = self.triple;
        write!(f, "triad ({i},{j},{k}):")?;
        for ([a, b], kind) in &self.failures {
            let label = match kind {
                EdgeFailure::Weak => "below threshold",
                EdgeFailure::Misoriented => "misoriented",
            };
            write!(f, " edge ({a},{b}) {label};")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub flavor: Flavor,
    pub delta: f64,
    pub violations: Vec<Violation>,
    pub in_region: bool,
}

fn assert_shapes(a1: &Rank2Tensor, a2: &Rank3Tensor) {
    assert_eq!(a1.n(), a2.n(), "closure check on tensors of different size");
}

/// Triples examined by `flavor`, in lexicographic order.
pub(crate) fn triples(n: usize, flavor: Flavor) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let keep = match flavor {
                    Flavor::Unoriented | Flavor::Oriented => i < j && j < k,
                    Flavor::SemiSimplicial => i != j && j != k && i != k,
                };
                if keep {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

pub(crate) fn edges_of([i, j, k]: [usize; 3]) -> [[usize; 2]; 3] {
    [[i, j], [i, k], [j, k]]
}

fn check_triple(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    t: [usize; 3],
    delta: f64,
    oriented: bool,
) -> Option<Violation> {
    let w = a2.get(t[0], t[1], t[2]);
    if w.abs() < delta {
        return None;
    }
    let sigma = sign0(w);
    let failures: Vec<_> = edges_of(t)
        .into_iter()
        .filter_map(|[a, b]| {
            let e = a1.get(a, b);
            if e.abs() < delta {
                Some(([a, b], EdgeFailure::Weak))
            } else if oriented && sigma * e < delta {
                Some(([a, b], EdgeFailure::Misoriented))
            } else {
                None
            }
        })
        .collect();
    (!failures.is_empty()).then_some(Violation {
        triple: t,
        triad_weight: w,
        failures,
    })
}

fn run(a1: &Rank2Tensor, a2: &Rank3Tensor, delta: f64, flavor: Flavor) -> ClosureReport {
    assert_shapes(a1, a2);
    debug_assert!(delta > 0.0);
    let oriented = flavor == Flavor::Oriented;
    let violations: Vec<_> = triples(a1.n(), flavor)
        .into_iter()
        .filter_map(|t| check_triple(a1, a2, t, delta, oriented))
        .collect();
    ClosureReport {
        flavor,
        delta,
        in_region: violations.is_empty(),
        violations,
    }
}

/// Unordered triples `i<j<k`: violation iff `|A²ᵢⱼₖ| ≥ δ` and some edge
/// magnitude is below δ. Callers should pass symmetric tensors.
pub fn check_closure_unoriented(a1: &Rank2Tensor, a2: &Rank3Tensor, delta: f64) -> ClosureReport {
    run(a1, a2, delta, Flavor::Unoriented)
}

/// Unordered triples with edges signed by the triad:
/// `y_ab = sgn(A²ᵢⱼₖ)·A¹_ab`, violation iff `|A²ᵢⱼₖ| ≥ δ` and `min y < δ`.
pub fn check_closure_oriented(a1: &Rank2Tensor, a2: &Rank3Tensor, delta: f64) -> ClosureReport {
    run(a1, a2, delta, Flavor::Oriented)
}

/// Ordered triples of distinct nodes, magnitudes only; no symmetry assumed.
pub fn check_closure_semisimplicial(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    delta: f64,
) -> ClosureReport {
    run(a1, a2, delta, Flavor::SemiSimplicial)
}

pub fn check_closure(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    delta: f64,
    flavor: Flavor,
) -> ClosureReport {
    run(a1, a2, delta, flavor)
}
