//! Fixed-step classical RK4 over the packed state `[x | A¹ | A²]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::{eval_rhs, ModelSpec, SystemState};
use crate::tensor::{Rank2Tensor, Rank3Tensor, Tensor};

/// Time span, step and number of stored samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationPlan {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub sample_count: usize,
}

impl IntegrationPlan {
    pub fn new(t0: f64, t1: f64, dt: f64, sample_count: usize) -> Result<Self> {
        let p = Self {
            t0,
            t1,
            dt,
            sample_count,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite()) || self.t1 <= self.t0 {
            return Err(invalid(
                "t1",
                format!("need finite t0 < t1, got [{}, {}]", self.t0, self.t1),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(
                "dt",
                format!("must be finite and > 0, got {}", self.dt),
            ));
        }
        if self.dt > self.t1 - self.t0 {
            return Err(invalid(
                "dt",
                format!("{} exceeds the span {}", self.dt, self.t1 - self.t0),
            ));
        }
        if self.sample_count < 2 {
            return Err(invalid("sample_count", "need at least 2 samples"));
        }
        Ok(())
    }

    /// Nominal time of sample `i`, computed as `t0 + i·(t1 − t0)/(count − 1)`.
    pub fn sample_time(&self, i: usize) -> f64 {
        if i + 1 == self.sample_count {
            return self.t1;
        }
        self.t0 + i as f64 * (self.t1 - self.t0) / (self.sample_count - 1) as f64
    }

    pub fn sample_times(&self) -> Vec<f64> {
        (0..self.sample_count)
            .map(|i| self.sample_time(i))
            .collect()
    }
}

/// Sampled solution together with the spec that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub spec: ModelSpec,
    pub samples: Vec<SystemState>,
}

impl Trajectory {
    /// Checks non-emptiness, shared dimension, finiteness and strictly
    /// increasing times.
    pub fn new(spec: ModelSpec, samples: Vec<SystemState>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("trajectory samples"));
        }
        for s in &samples {
            spec.check_state(s)?;
        }
        if samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(invalid("samples", "times must be strictly increasing"));
        }
        Ok(Self { spec, samples })
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &SystemState {
        self.samples.last().expect("trajectory is nonempty")
    }
}

/// Length of the packed vector for `n` nodes.
pub fn packed_len(n: usize) -> usize {
    n + n * n + n * n * n
}

/// Flattens a state to `[x | A¹ row-major | A² row-major]`. Time is dropped.
pub fn pack_state(state: &SystemState) -> Vec<f64> {
    let mut v = Vec::with_capacity(packed_len(state.n()));
    v.extend_from_slice(&state.x);
    v.extend_from_slice(state.a1.as_slice());
    v.extend_from_slice(state.a2.as_slice());
    v
}

/// Inverse of [`pack_state`]. The returned state has `t = 0`.
pub fn unpack_state(v: &[f64], n: usize) -> Result<SystemState> {
    if v.len() != packed_len(n) {
        return Err(Error::ShapeMismatch {
            left: format!("packed length {}", v.len()),
            right: format!("expected {} for n = {n}", packed_len(n)),
        });
    }
    let (x, rest) = v.split_at(n);
    let (a1, a2) = rest.split_at(n * n);
    Ok(SystemState {
        t: 0.0,
        x: x.to_vec(),
        a1: Rank2Tensor::from_vec(n, a1.to_vec())?,
        a2: Rank3Tensor::from_vec(n, a2.to_vec())?,
    })
}

fn packed_rhs(spec: &ModelSpec, y: &[f64]) -> Result<Vec<f64>> {
    let state = unpack_state(y, spec.n())?;
    let d = eval_rhs(spec, &state)?;
    let mut out = d.dx;
    out.extend_from_slice(d.da1.as_slice());
    out.extend_from_slice(d.da2.as_slice());
    Ok(out)
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4_step(spec: &ModelSpec, y: &mut [f64], h: f64) -> Result<()> {
    let k1 = packed_rhs(spec, y)?;
    let k2 = packed_rhs(spec, &axpy(y, 0.5 * h, &k1))?;
    let k3 = packed_rhs(spec, &axpy(y, 0.5 * h, &k2))?;
    let k4 = packed_rhs(spec, &axpy(y, h, &k3))?;
    let w = h / 6.0;
    for (idx, v) in y.iter_mut().enumerate() {
        *v += w * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
    }
    Ok(())
}

fn blowup(t: f64, y: &[f64]) -> Error {
    let mut offset = 0;
    let mut max_magnitude = 0.0f64;
    for (o, v) in y.iter().enumerate() {
        let m = if v.is_finite() {
            v.abs()
        } else {
            f64::INFINITY
        };
        if m > max_magnitude || (m.is_infinite() && max_magnitude.is_finite()) {
            max_magnitude = m;
            offset = o;
        }
    }
    Error::Blowup {
        time: t,
        max_magnitude,
        offset,
    }
}

/// Integrates `spec` from `initial` over `plan`.
///
/// Each sample interval is covered by steps of `dt`; the last step of an
/// interval is shortened so that it lands exactly on the sample time. The
/// first stored sample is `initial` itself with `t = plan.t0`.
pub fn integrate(
    spec: &ModelSpec,
    initial: &SystemState,
    plan: &IntegrationPlan,
) -> Result<Trajectory> {
    spec.validate()?;
    plan.validate()?;
    spec.check_state(initial)?;
    let n = spec.n();
    let mut y = pack_state(initial);
    let mut first = initial.clone();
    first.t = plan.t0;
    let mut samples = Vec::with_capacity(plan.sample_count);
    samples.push(first);

    // Steps shorter than this fraction of dt are absorbed into the previous one.
    let slack = 1e-9 * plan.dt;
    let mut t = plan.t0;
    for s in 1..plan.sample_count {
        let target = plan.sample_time(s);
        loop {
            let remaining = target - t;
            if remaining <= 0.0 {
                break;
            }
            let last = remaining <= plan.dt + slack;
            let h = if last { remaining } else { plan.dt };
            match rk4_step(spec, &mut y, h) {
                Ok(()) => {}
                Err(Error::NonFinite { .. }) => return Err(blowup(t, &y)),
                Err(e) => return Err(e),
            }
            t = if last { target } else { t + h };
            if y.iter().any(|v| !v.is_finite()) {
                return Err(blowup(t, &y));
            }
        }
        let mut state = unpack_state(&y, n)?;
        state.t = target;
        samples.push(state);
    }
    Ok(Trajectory {
        spec: spec.clone(),
        samples,
    })
}
