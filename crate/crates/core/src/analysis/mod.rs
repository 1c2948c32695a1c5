//! Regime classification, order parameter and closure certification.

mod boundary;
mod closure;
mod retention;

pub use boundary::{
    audit_outward_pointing, boundary_faces, boundary_faces_with_tol, BoundaryAudit, Face,
    FaceCheck, PointAudit,
};
pub use closure::{
    check_closure, check_closure_oriented, check_closure_semisimplicial, check_closure_unoriented,
    ClosureReport, EdgeFailure, Violation,
};
pub use retention::{scan_retention, Projection, RetentionRecord};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::integrator::Trajectory;
use crate::tensor::{
    alt2, alt3, frobenius_norm, split2, split3, sym2, sym3, Rank2Tensor, Rank3Tensor,
};
use crate::tolerances::{EPSILON_REL, WINDOW_FRACTION};

/// Which closure notion a check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Unordered triples, magnitudes.
    Unoriented,
    /// Unordered triples, edges signed by the triad's orientation.
    Oriented,
    /// Ordered triples of distinct nodes, magnitudes.
    #[serde(rename = "semisimplicial")]
    SemiSimplicial,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Unoriented => "unoriented",
            Flavor::Oriented => "oriented",
            Flavor::SemiSimplicial => "semisimplicial",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unoriented" => Ok(Flavor::Unoriented),
            "oriented" => Ok(Flavor::Oriented),
            "semisimplicial" => Ok(Flavor::SemiSimplicial),
            other => Err(invalid("flavor", format!("unknown flavor `{other}`"))),
        }
    }
}

/// Projects tensors to the representative the flavor expects: symmetric parts
/// for unoriented, alternating parts for oriented, unchanged otherwise.
pub fn project_for_flavor(
    a1: &Rank2Tensor,
    a2: &Rank3Tensor,
    flavor: Flavor,
) -> (Rank2Tensor, Rank3Tensor) {
    match flavor {
        Flavor::Unoriented => (sym2(a1), sym3(a2)),
        Flavor::Oriented => (alt2(a1), alt3(a2)),
        Flavor::SemiSimplicial => (a1.clone(), a2.clone()),
    }
}

/// Hard sign with `sign(0) = 0`.
pub(crate) fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Per-sample Frobenius norms of the isotypic components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub a1_sym: Vec<f64>,
    pub a1_alt: Vec<f64>,
    pub a2_sym: Vec<f64>,
    pub a2_alt: Vec<f64>,
    pub a2_mix: Vec<f64>,
    /// `‖A¹‖` computed directly, not from the components.
    pub a1_total: Vec<f64>,
    /// `‖A²‖` computed directly.
    pub a2_total: Vec<f64>,
}

impl NormSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn norm_series(traj: &Trajectory) -> NormSeries {
    let cap = traj.samples.len();
    let mut ns = NormSeries {
        times: Vec::with_capacity(cap),
        a1_sym: Vec::with_capacity(cap),
        a1_alt: Vec::with_capacity(cap),
        a2_sym: Vec::with_capacity(cap),
        a2_alt: Vec::with_capacity(cap),
        a2_mix: Vec::with_capacity(cap),
        a1_total: Vec::with_capacity(cap),
        a2_total: Vec::with_capacity(cap),
    };
    for s in &traj.samples {
        let p1 = split2(&s.a1);
        let p2 = split3(&s.a2);
        ns.times.push(s.t);
        ns.a1_sym.push(frobenius_norm(&p1.sym));
        ns.a1_alt.push(frobenius_norm(&p1.alt));
        ns.a2_sym.push(frobenius_norm(&p2.sym));
        ns.a2_alt.push(frobenius_norm(&p2.alt));
        ns.a2_mix.push(frobenius_norm(&p2.mix));
        ns.a1_total.push(frobenius_norm(&s.a1));
        ns.a2_total.push(frobenius_norm(&s.a2));
    }
    ns
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Symmetric,
    Antisymmetric,
    Mixed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Symmetric => "Symmetric",
            Regime::Antisymmetric => "Antisymmetric",
            Regime::Mixed => "Mixed",
        })
    }
}

/// Time-averaged component norm over time-averaged total norm, per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRatios {
    pub a1_sym: f64,
    pub a1_alt: f64,
    pub a2_sym: f64,
    pub a2_alt: f64,
    pub a2_mix: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    pub tail_ratios: TailRatios,
    pub epsilon_rel: f64,
    /// `[start, end]` of the averaging window.
    pub window: [f64; 2],
    pub window_fraction: f64,
    /// Both tensors vanish over the window; ratios are reported as 0.
    pub degenerate: bool,
    /// Always true: the verdict is a finite-horizon stand-in for a limit statement.
    pub finite_horizon_proxy: bool,
}

/// Settings for [`classify_regime`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSettings {
    pub epsilon_rel: f64,
    pub window_fraction: f64,
}

impl Default for RegimeSettings {
    fn default() -> Self {
        Self {
            epsilon_rel: EPSILON_REL,
            window_fraction: WINDOW_FRACTION,
        }
    }
}

/// Trapezoidal mean of `v` over `t`; a single point is its own mean.
fn time_average(t: &[f64], v: &[f64]) -> f64 {
    if t.len() == 1 {
        return v[0];
    }
    let span = t[t.len() - 1] - t[0];
    let area: f64 = t
        .windows(2)
        .zip(v.windows(2))
        .map(|(tw, vw)| 0.5 * (tw[1] - tw[0]) * (vw[0] + vw[1]))
        .sum();
    area / span
}

/// Classifies the trailing window of a norm series.
pub fn classify_regime(
    series: &NormSeries,
    epsilon_rel: f64,
    window_fraction: f64,
) -> Result<RegimeVerdict> {
    if series.is_empty() {
        return Err(Error::Empty("norm series"));
    }
    if !(epsilon_rel > 0.0 && epsilon_rel < 1.0) {
        return Err(invalid(
            "epsilon_rel",
            format!("must lie in (0, 1), got {epsilon_rel}"),
        ));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(invalid(
            "window_fraction",
            format!("must lie in (0, 1], got {window_fraction}"),
        ));
    }
    let t = &series.times;
    let t_first = t[0];
    let t_end = t[t.len() - 1];
    if t.len() > 1 && !(t_end > t_first) {
        return Err(invalid("times", "series must span positive time"));
    }
    let t_start = t_end - window_fraction * (t_end - t_first);
    let from = t.iter().position(|&x| x >= t_start).unwrap_or(t.len() - 1);
    let tw = &t[from..];
    let avg = |v: &[f64]| time_average(tw, &v[from..]);
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };

    let a1_total = avg(&series.a1_total);
    let a2_total = avg(&series.a2_total);
    let r = TailRatios {
        a1_sym: ratio(avg(&series.a1_sym), a1_total),
        a1_alt: ratio(avg(&series.a1_alt), a1_total),
        a2_sym: ratio(avg(&series.a2_sym), a2_total),
        a2_alt: ratio(avg(&series.a2_alt), a2_total),
        a2_mix: ratio(avg(&series.a2_mix), a2_total),
    };
    let symmetric = r.a1_alt < epsilon_rel && r.a2_alt < epsilon_rel && r.a2_mix < epsilon_rel;
    let antisymmetric = r.a1_sym < epsilon_rel && r.a2_sym < epsilon_rel && r.a2_mix < epsilon_rel;
    let regime = if symmetric {
        Regime::Symmetric
    } else if antisymmetric {
        Regime::Antisymmetric
    } else {
        Regime::Mixed
    };
    Ok(RegimeVerdict {
        regime,
        tail_ratios: r,
        epsilon_rel,
        window: [tw[0], t_end],
        window_fraction,
        degenerate: symmetric && antisymmetric,
        finite_horizon_proxy: true,
    })
}

/// Kuramoto order parameter `r·e^{iψ} = mean e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParameter {
    pub r: f64,
    /// In `(−π, π]`.
    pub psi: f64,
}

pub fn order_parameter(phases: &[f64]) -> Result<OrderParameter> {
    if phases.is_empty() {
        return Err(Error::Empty("phases"));
    }
    let n = phases.len() as f64;
    let (s, c) = phases
        .iter()
        .fold((0.0, 0.0), |(s, c), th| (s + th.sin(), c + th.cos()));
    let (s, c) = (s / n, c / n);
    let mut psi = s.atan2(c);
    if psi <= -std::f64::consts::PI {
        psi = std::f64::consts::PI;
    }
    Ok(OrderParameter { r: s.hypot(c), psi })
}
