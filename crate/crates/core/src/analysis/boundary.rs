//! Boundary faces of the per-triple bad set and the outward-pointing audit.
//!
//! For a triple `(i,j,k)` the audit works in four coordinates: the triad
//! magnitude and one coordinate per edge `(i,j)`, `(i,k)`, `(j,k)`. Edge
//! coordinates are magnitudes, or `sgn(A²ᵢⱼₖ)·A¹_ab` for the oriented flavor.

use serde::{Deserialize, Serialize};

use super::closure::{edges_of, triples};
use super::{sign0, Flavor};
use crate::error::{invalid, Error, Result};
use crate::models::{eval_rhs, ModelSpec, SystemState};
use crate::tensor::{Rank2Tensor, Rank3Tensor, Tensor};
use crate::tolerances::FACE_REL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Face {
    /// Triad magnitude at δ, some edge at or below δ.
    X1,
    /// Edge `(i,j)` at δ, everything else at or above δ.
    X2,
    /// Edge `(i,k)` at δ.
    X3,
    /// Edge `(j,k)` at δ.
    X4,
}

fn validate_triple(n: usize, [i, j, k]: [usize; 3], flavor: Flavor) -> Result<()> {
    if i >= n || j >= n || k >= n {
        return Err(Error::Index(format!("triple ({i},{j},{k}) with n = {n}")));
    }
    let ok = match flavor {
        Flavor::Unoriented | Flavor::Oriented => i < j && j < k,
        Flavor::SemiSimplicial => i != j && j != k && i != k,
    };
    if !ok {
        return Err(invalid(
            "triple",
            format!("({i},{j},{k}) is not a valid {flavor} triple"),
        ));
    }
    Ok(())
}

/// Triad magnitude and the three edge coordinates.
fn coordinates(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    t: [usize; 3],
    flavor: Flavor,
) -> (f64, [f64; 3]) {
    let w = a2.get(t[0], t[1], t[2]);
    let sigma = sign0(w);
    let e = edges_of(t).map(|[a, b]| {
        let v = a1.get(a, b);
        if flavor == Flavor::Oriented {
            sigma * v
        } else {
            v.abs()
        }
    });
    (w.abs(), e)
}

fn faces_from_coordinates(c2: f64, e: [f64; 3], delta: f64, tol: f64) -> Vec<Face> {
    let eq = |v: f64| (v - delta).abs() <= tol;
    let ge = |v: f64| v >= delta - tol;
    let mut out = Vec::new();
    if eq(c2) && e.iter().any(|&v| v <= delta + tol) {
        out.push(Face::X1);
    }
    if ge(c2) {
        for (slot, face) in [Face::X2, Face::X3, Face::X4].into_iter().enumerate() {
            let others_ok = (0..3).filter(|&s| s != slot).all(|s| ge(e[s]));
            if eq(e[slot]) && others_ok {
                out.push(face);
            }
        }
    }
    out
}

/// Active faces for triple `(i,j,k)` with the default tolerance `1e−9·δ`.
#[allow(clippy::too_many_arguments)]
pub fn boundary_faces(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    i: usize,
    j: usize,
    k: usize,
    delta: f64,
    flavor: Flavor,
) -> Result<Vec<Face>> {
    boundary_faces_with_tol(a1, a2, [i, j, k], delta, flavor, FACE_REL)
}

/// Active faces with equality tested to within `face_rel·δ`.
pub fn boundary_faces_with_tol(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    triple: [usize; 3],
    delta: f64,
    flavor: Flavor,
    face_rel: f64,
) -> Result<Vec<Face>> {
    if a1.n() != a2.n() {
        return Err(Error::ShapeMismatch {
            left: a1.shape_label(),
            right: a2.shape_label(),
        });
    }
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be > 0"));
    }
    validate_triple(a1.n(), triple, flavor)?;
    let (c2, e) = coordinates(a1, a2, triple, flavor);
    Ok(faces_from_coordinates(c2, e, delta, face_rel * delta))
}

/// Audit of a single triple at a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceCheck {
    pub triple: [usize; 3],
    pub faces: Vec<Face>,
    /// `sgn(A²)·Ȧ²` followed by the three edge rates (`sgn(A¹)·Ȧ¹`, or `ẏ`
    /// for the oriented flavor).
    pub derivatives: [f64; 4],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointAudit {
    pub t: f64,
    /// False when the point lies on no face of any triple; such points are
    /// left out of the aggregate.
    pub on_boundary: bool,
    pub checks: Vec<FaceCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAudit {
    pub flavor: Flavor,
    pub delta: f64,
    pub points: Vec<PointAudit>,
    /// Number of points on some face.
    pub audited: usize,
    pub failures: usize,
    pub pass: bool,
}

/// Evaluates the vector field at each point and checks the sign condition of
/// every active face. At singular points each active face is checked on its
/// own, which covers the whole normal cone.
pub fn audit_outward_pointing(
    spec: &ModelSpec,
    points: &[SystemState],
    delta: f64,
    flavor: Flavor,
) -> Result<BoundaryAudit> {
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be > 0"));
    }
    let tol = FACE_REL * delta;
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        spec.check_state(p)?;
        let d = eval_rhs(spec, p)?;
        let mut checks = Vec::new();
        for t in triples(p.n(), flavor) {
            let (c2, e) = coordinates(&p.a1, &p.a2, t, flavor);
            let faces = faces_from_coordinates(c2, e, delta, tol);
            if faces.is_empty() {
                continue;
            }
            let w = p.a2.get(t[0], t[1], t[2]);
            let sigma = sign0(w);
            let mut derivatives = [sigma * d.da2.get(t[0], t[1], t[2]), 0.0, 0.0, 0.0];
            for (slot, [a, b]) in edges_of(t).into_iter().enumerate() {
                let s = if flavor == Flavor::Oriented {
                    sigma
                } else {
                    sign0(p.a1.get(a, b))
                };
                derivatives[slot + 1] = s * d.da1.get(a, b);
            }
            let pass = faces.iter().all(|f| match f {
                Face::X1 => derivatives[0] <= 0.0,
                Face::X2 => derivatives[1] >= 0.0,
                Face::X3 => derivatives[2] >= 0.0,
                Face::X4 => derivatives[3] >= 0.0,
            });
            checks.push(FaceCheck {
                triple: t,
                faces,
                derivatives,
                pass,
            });
        }
        let on_boundary = !checks.is_empty();
        let pass = checks.iter().all(|c| c.pass);
        out.push(PointAudit {
            t: p.t,
            on_boundary,
            checks,
            pass,
        });
    }
    let audited = out.iter().filter(|p| p.on_boundary).count();
    let failures = out.iter().filter(|p| p.on_boundary && !p.pass).count();
    Ok(BoundaryAudit {
        flavor,
        delta,
        points: out,
        audited,
        failures,
        pass: failures == 0,
    })
}
