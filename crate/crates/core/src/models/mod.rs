//! The four built-in adaptive triadic models and their right-hand sides.
//!
//! Every model evolves `x` (phases or opinions), a pairwise weight matrix
//! `A¹` and a triadic weight tensor `A²`. Each model also adds the intrinsic
//! term `ωᵢ` to the node equation. For `ConsensusVariance` the presets use
//! `ω = 0`.

pub mod smoothing;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tensor::{levi_civita, Rank2Tensor, Rank3Tensor, Tensor};
pub use smoothing::{
    clamped_exp, smooth_heaviside, smooth_max, smooth_min, smooth_sign, smooth_sign_sym,
};

/// Snapshot of the full state at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub t: f64,
    pub x: Vec<f64>,
    pub a1: Rank2Tensor,
    pub a2: Rank3Tensor,
}

impl SystemState {
    pub fn new(t: f64, x: Vec<f64>, a1: Rank2Tensor, a2: Rank3Tensor) -> Result<Self> {
        let s = Self { t, x, a1, a2 };
        s.validate()?;
        Ok(s)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            t: 0.0,
            x: vec![0.0; n],
            a1: Rank2Tensor::zeros(n),
            a2: Rank3Tensor::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Checks shared dimension and finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.x.len();
        if self.a1.n() != n || self.a2.n() != n {
            return Err(Error::ShapeMismatch {
                left: format!("x has {n} nodes"),
                right: format!("a1 n={}, a2 n={}", self.a1.n(), self.a2.n()),
            });
        }
        if !self.t.is_finite() {
            return Err(Error::NonFinite {
                component: "t",
                index: vec![],
            });
        }
        if let Some(i) = self.x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                component: "x",
                index: vec![i],
            });
        }
        if let Some(o) = self.a1.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                component: "a1",
                index: vec![o / n, o % n],
            });
        }
        if let Some(o) = self.a2.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                component: "a2",
                index: vec![o / (n * n), (o / n) % n, o % n],
            });
        }
        Ok(())
    }
}

/// Time derivative of a [`SystemState`].
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub dx: Vec<f64>,
    pub da1: Rank2Tensor,
    pub da2: Rank3Tensor,
}

/// Parameters of the smoothed closure-reinforcement model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
    /// Take the gate's triad maximum over every placement of the pair
    /// `{i, j}` in `A²` instead of the `A²ᵢⱼ·` slice alone.
    #[serde(default)]
    pub scan_all_slices: bool,
}

impl ClosureParams {
    /// Lower bound on the linear growth rate of a weak edge inside the
    /// reinforcement zone: `−α(δ+1) + βδ·tanh(δ/ζ)/4`.
    pub fn reinforcement_margin(&self) -> f64 {
        -self.alpha * (self.delta + 1.0)
            + self.beta * self.delta * (self.delta / self.zeta).tanh() / 4.0
    }
}

/// Parameters of the consensus model with variance-driven triads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsensusParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default)]
    pub scan_all_slices: bool,
}

impl ConsensusParams {
    pub fn closure(&self) -> ClosureParams {
        ClosureParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            zeta: self.zeta,
            scan_all_slices: self.scan_all_slices,
        }
    }
}

/// Model selector together with its parameter record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    SymmetricCosine { delta1: f64, delta2: f64 },
    AntisymmetricSine { delta1: f64, delta2: f64 },
    SmoothedKuramotoClosure(ClosureParams),
    ConsensusVariance(ConsensusParams),
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::SymmetricCosine { .. } => "symmetric-cosine",
            ModelKind::AntisymmetricSine { .. } => "antisymmetric-sine",
            ModelKind::SmoothedKuramotoClosure(_) => "smoothed-kuramoto-closure",
            ModelKind::ConsensusVariance(_) => "consensus-variance",
        }
    }

    /// Threshold and gate parameters for the two closure-seeking models.
    pub fn closure_params(&self) -> Option<ClosureParams> {
        match self {
            ModelKind::SmoothedKuramotoClosure(p) => Some(*p),
            ModelKind::ConsensusVariance(p) => Some(p.closure()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let mut rates: Vec<(&'static str, f64)> = Vec::new();
        let mut zeta = None;
        match self {
            ModelKind::SymmetricCosine { delta1, delta2 }
            | ModelKind::AntisymmetricSine { delta1, delta2 } => {
                rates.extend([("delta1", *delta1), ("delta2", *delta2)]);
            }
            ModelKind::SmoothedKuramotoClosure(p) => {
                rates.extend([
                    ("alpha", p.alpha),
                    ("beta", p.beta),
                    ("gamma", p.gamma),
                    ("delta", p.delta),
                    ("zeta", p.zeta),
                ]);
                zeta = Some(p.zeta);
            }
            ModelKind::ConsensusVariance(p) => {
                rates.extend([
                    ("alpha", p.alpha),
                    ("beta", p.beta),
                    ("gamma", p.gamma),
                    ("delta", p.delta),
                    ("zeta", p.zeta),
                    ("kappa1", p.kappa1),
                    ("kappa2", p.kappa2),
                    ("lambda1", p.lambda1),
                    ("lambda2", p.lambda2),
                ]);
                zeta = Some(p.zeta);
            }
        }
        for (name, v) in rates {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Some(z) = zeta {
            if z > 0.5 {
                return Err(invalid("zeta", format!("smoothing width {z} exceeds 0.5")));
            }
            if z > 0.1 {
                warn!("smoothing width zeta = {z} is above 0.1; gates will be soft");
            }
        }
        Ok(())
    }
}

/// A validated model: kind, parameters, intrinsic terms and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub omega: Vec<f64>,
    pub rng_seed: u64,
    /// Zero the adaptation of diagonal pairs and repeated-index triples.
    #[serde(default)]
    pub freeze_degenerate: bool,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, omega: Vec<f64>, rng_seed: u64) -> Result<Self> {
        let spec = Self {
            kind,
            omega,
            rng_seed,
            freeze_degenerate: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_freeze_degenerate(mut self, on: bool) -> Self {
        self.freeze_degenerate = on;
        self
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.len() < 3 {
            return Err(invalid(
                "omega",
                "need at least 3 nodes for triadic interactions",
            ));
        }
        if let Some(i) = self.omega.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                component: "omega",
                index: vec![i],
            });
        }
        self.kind.validate()
    }

    /// Confirms that `state` has this spec's dimension.
    pub fn check_state(&self, state: &SystemState) -> Result<()> {
        state.validate()?;
        if state.n() != self.n() {
            return Err(Error::ShapeMismatch {
                left: format!("spec n={}", self.n()),
                right: format!("state n={}", state.n()),
            });
        }
        Ok(())
    }
}

/// `θᵢ + θⱼ + θₖ` summed in ascending index order, so every permutation of
/// `(i, j, k)` yields the same rounded value.
fn ordered_triple_sum(x: &[f64], i: usize, j: usize, k: usize) -> f64 {
    let mut idx = [i, j, k];
    idx.sort_unstable();
    x[idx[0]] + x[idx[1]] + x[idx[2]]
}

/// Variance proxy over the distinct values among `xᵢ, xⱼ, xₖ`:
/// `(1/6)·Σ_{p,q} (x_p − x_q)²` with `p, q` ranging over the index set.
fn triad_variance(x: &[f64], i: usize, j: usize, k: usize) -> f64 {
    let mut idx = vec![i, j, k];
    idx.sort_unstable();
    idx.dedup();
    let mut s = 0.0;
    for &p in &idx {
        for &q in &idx {
            let d = x[p] - x[q];
            s += d * d;
        }
    }
    s / 6.0
}

/// Largest `|A²|` entry feeding the gate for pair `(i, j)`.
fn triad_magnitudes(a2: &Rank3Tensor, i: usize, j: usize, all_slices: bool) -> Vec<f64> {
    let n = a2.n();
    let mut out = Vec::with_capacity(if all_slices { 6 * n } else { n });
    for k in 0..n {
        out.push(a2.get(i, j, k).abs());
        if all_slices {
            out.push(a2.get(j, i, k).abs());
            out.push(a2.get(i, k, j).abs());
            out.push(a2.get(j, k, i).abs());
            out.push(a2.get(k, i, j).abs());
            out.push(a2.get(k, j, i).abs());
        }
    }
    out
}

fn gate_unchecked(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    i: usize,
    j: usize,
    delta: f64,
    zeta: f64,
    all_slices: bool,
) -> f64 {
    let weak = smooth_min(a1.get(i, j).abs(), a1.get(j, i).abs(), zeta);
    let strong = smooth_max(&triad_magnitudes(a2, i, j, all_slices), zeta)
        .expect("triad slice has n >= 1 entries");
    smooth_heaviside(delta - weak, zeta) * smooth_heaviside(strong - delta, zeta)
}

/// Smoothed closure gate `J_ij`: open when the edge `(i, j)` is below `δ`
/// while some triad through `i, j` (on the `A²ᵢⱼ·` slice) is above it.
pub fn closure_gate(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    i: usize,
    j: usize,
    delta: f64,
    zeta: f64,
) -> Result<f64> {
    closure_gate_with(a1, a2, i, j, delta, zeta, false)
}

/// [`closure_gate`] with a choice of triad scan.
pub fn closure_gate_with(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    i: usize,
    j: usize,
    delta: f64,
    zeta: f64,
    scan_all_slices: bool,
) -> Result<f64> {
    let n = a1.n();
    if a2.n() != n {
        return Err(Error::ShapeMismatch {
            left: a1.shape_label(),
            right: a2.shape_label(),
        });
    }
    if i >= n || j >= n {
        return Err(Error::Index(format!("pair ({i}, {j}) with n = {n}")));
    }
    if i == j {
        return Err(invalid(
            "j",
            format!("gate needs distinct nodes, got i = j = {i}"),
        ));
    }
    if !(zeta > 0.0) {
        return Err(invalid("zeta", "must be > 0"));
    }
    Ok(gate_unchecked(a1, a2, i, j, delta, zeta, scan_all_slices))
}

/// Smallest β for which weak edges inside the reinforcement zone are
/// guaranteed to grow: `4α(δ+1)/(δ·tanh(δ/ζ))`.
pub fn beta_lower_bound(alpha: f64, delta: f64, zeta: f64) -> f64 {
    4.0 * alpha * (delta + 1.0) / (delta * (delta / zeta).tanh())
}

/// Evaluates the vector field at `state`.
pub fn eval_rhs(spec: &ModelSpec, state: &SystemState) -> Result<Derivative> {
    let n = spec.n();
    if state.n() != n || state.a1.n() != n || state.a2.n() != n {
        return Err(Error::ShapeMismatch {
            left: format!("spec n={n}"),
            right: format!(
                "state x={}, a1 n={}, a2 n={}",
                state.n(),
                state.a1.n(),
                state.a2.n()
            ),
        });
    }
    let x = &state.x;
    let a1 = &state.a1;
    let a2 = &state.a2;
    let nf = n as f64;
    let inv_n = 1.0 / nf;
    let inv_n2 = 1.0 / (nf * nf);

    let mut dx = vec![0.0; n];
    for i in 0..n {
        let mut pair = 0.0;
        let mut triad = 0.0;
        match &spec.kind {
            ModelKind::SymmetricCosine { .. } | ModelKind::AntisymmetricSine { .. } => {
                for j in 0..n {
                    pair += a1.get(i, j) * (x[i] - x[j]).sin();
                    for k in 0..n {
                        triad += a2.get(i, j, k) * (2.0 * x[i] - x[j] - x[k]).sin();
                    }
                }
            }
            ModelKind::SmoothedKuramotoClosure(_) => {
                for j in 0..n {
                    pair += a1.get(i, j) * (x[j] - x[i]).sin();
                    for k in 0..n {
                        triad += a2.get(i, j, k) * (x[j] + x[k] - 2.0 * x[i]).sin();
                    }
                }
            }
            ModelKind::ConsensusVariance(_) => {
                for j in 0..n {
                    pair += a1.get(i, j) * (x[j] - x[i]);
                    for k in 0..n {
                        triad += a2.get(i, j, k) * (0.5 * (x[j] + x[k]) - x[i]);
                    }
                }
            }
        }
        let v = spec.omega[i] + inv_n * pair + inv_n2 * triad;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                component: "dx",
                index: vec![i],
            });
        }
        dx[i] = v;
    }

    let mut da1 = Rank2Tensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if spec.freeze_degenerate && i == j {
                continue;
            }
            let a = a1.get(i, j);
            let v = match &spec.kind {
                ModelKind::SymmetricCosine { delta1, .. } => -delta1 * (a + (x[i] - x[j]).cos()),
                ModelKind::AntisymmetricSine { delta1, .. } => -delta1 * (a + (x[i] - x[j]).sin()),
                ModelKind::SmoothedKuramotoClosure(p) => {
                    let reinforce = p.beta
                        * p.delta
                        * gate_unchecked(a1, a2, i, j, p.delta, p.zeta, p.scan_all_slices)
                        * smooth_sign_sym(a, a1.get(j, i), p.zeta);
                    -p.alpha * (a - (x[i] - x[j]).cos()) + reinforce
                }
                ModelKind::ConsensusVariance(p) => {
                    let d = x[i] - x[j];
                    let target = p.kappa1 * clamped_exp(-p.lambda1 * d * d);
                    let reinforce = p.beta
                        * p.delta
                        * gate_unchecked(a1, a2, i, j, p.delta, p.zeta, p.scan_all_slices)
                        * smooth_sign_sym(a, a1.get(j, i), p.zeta);
                    -p.alpha * (a - target) + reinforce
                }
            };
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    component: "da1",
                    index: vec![i, j],
                });
            }
            da1.set(i, j, v);
        }
    }

    let mut da2 = Rank3Tensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if spec.freeze_degenerate && (i == j || j == k || i == k) {
                    continue;
                }
                let a = a2.get(i, j, k);
                let v = match &spec.kind {
                    ModelKind::SymmetricCosine { delta2, .. } => {
                        -delta2 * (a + ordered_triple_sum(x, i, j, k).cos())
                    }
                    ModelKind::AntisymmetricSine { delta2, .. } => {
                        let eps = f64::from(levi_civita(i, j, k));
                        -delta2 * (a + eps * ordered_triple_sum(x, i, j, k).sin())
                    }
                    ModelKind::SmoothedKuramotoClosure(p) => {
                        -p.gamma * (a - p.delta * ordered_triple_sum(x, i, j, k).cos())
                    }
                    ModelKind::ConsensusVariance(p) => {
                        let target =
                            p.kappa2 * clamped_exp(-p.lambda2 * triad_variance(x, i, j, k));
                        -p.gamma * (a - target)
                    }
                };
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        component: "da2",
                        index: vec![i, j, k],
                    });
                }
                da2.set(i, j, k, v);
            }
        }
    }

    Ok(Derivative { dx, da1, da2 })
}
