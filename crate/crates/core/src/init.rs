//! Seeded initial conditions.
//!
//! All randomness comes from one SplitMix64 stream (64-bit state) seeded with
//! the experiment seed. Draws happen in a fixed order: `ω` (n values), `x`
//! (n), `A¹` (n², row-major), `A²` (n³, row-major). Overrides are applied
//! afterwards and consume no randomness.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal, Uniform};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::SystemState;
use crate::tensor::{Rank2Tensor, Rank3Tensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Sampler {
    /// Uniform on `[low, high)`.
    Uniform {
        low: f64,
        high: f64,
    },
    Normal {
        mean: f64,
        std: f64,
    },
    /// `len` points from `low` to `high` inclusive; consumes no randomness.
    EquallySpaced {
        low: f64,
        high: f64,
    },
    Constant {
        value: f64,
    },
    /// Explicit values; the length must match.
    Values {
        values: Vec<f64>,
    },
}

impl Sampler {
    fn draw(&self, len: usize, rng: &mut impl Rng, what: &'static str) -> Result<Vec<f64>> {
        match self {
            Sampler::Uniform { low, high } => {
                let d = Uniform::new(*low, *high)
                    .map_err(|e| invalid(what, format!("uniform [{low}, {high}): {e}")))?;
                Ok((0..len).map(|_| d.sample(rng)).collect())
            }
            Sampler::Normal { mean, std } => {
                // rand_distr accepts a negative std and silently mirrors it.
                if !(*std >= 0.0) {
                    return Err(invalid(what, format!("normal std must be >= 0, got {std}")));
                }
                let d = Normal::new(*mean, *std)
                    .map_err(|e| invalid(what, format!("normal({mean}, {std}): {e}")))?;
                Ok((0..len).map(|_| d.sample(rng)).collect())
            }
            Sampler::EquallySpaced { low, high } => {
                if len == 1 {
                    return Ok(vec![*low]);
                }
                let step = (high - low) / (len - 1) as f64;
                Ok((0..len)
                    .map(|i| {
                        if i + 1 == len {
                            *high
                        } else {
                            low + i as f64 * step
                        }
                    })
                    .collect())
            }
            Sampler::Constant { value } => Ok(vec![*value; len]),
            Sampler::Values { values } => {
                if values.len() != len {
                    return Err(invalid(
                        what,
                        format!("expected {len} values, got {}", values.len()),
                    ));
                }
                Ok(values.clone())
            }
        }
    }
}

/// Fixed entry written after sampling. With `symmetric`, every permutation of
/// the index tuple receives the value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryOverride {
    pub index: Vec<usize>,
    pub value: f64,
    #[serde(default)]
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConditions {
    pub omega: Sampler,
    pub x: Sampler,
    pub a1: Sampler,
    pub a2: Sampler,
    #[serde(default)]
    pub a1_overrides: Vec<EntryOverride>,
    #[serde(default)]
    pub a2_overrides: Vec<EntryOverride>,
}

fn check_index(idx: &[usize], rank: usize, n: usize) -> Result<()> {
    if idx.len() != rank || idx.iter().any(|&i| i >= n) {
        return Err(Error::Index(format!(
            "override index {idx:?} for rank {rank}, n = {n}"
        )));
    }
    Ok(())
}

impl InitialConditions {
    /// Returns `ω` and the initial state at `t0`.
    pub fn generate(&self, n: usize, seed: u64, t0: f64) -> Result<(Vec<f64>, SystemState)> {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let omega = self.omega.draw(n, &mut rng, "omega")?;
        let x = self.x.draw(n, &mut rng, "x")?;
        let mut a1 = Rank2Tensor::from_vec(n, self.a1.draw(n * n, &mut rng, "a1")?)?;
        let mut a2 = Rank3Tensor::from_vec(n, self.a2.draw(n * n * n, &mut rng, "a2")?)?;
        for o in &self.a1_overrides {
            check_index(&o.index, 2, n)?;
            let (i, j) = (o.index[0], o.index[1]);
            a1.set(i, j, o.value);
            if o.symmetric {
                a1.set(j, i, o.value);
            }
        }
        for o in &self.a2_overrides {
            check_index(&o.index, 3, n)?;
            let (i, j, k) = (o.index[0], o.index[1], o.index[2]);
            if o.symmetric {
                a2.set_symmetric(i, j, k, o.value);
            } else {
                a2.set(i, j, k, o.value);
            }
        }
        let state = SystemState::new(t0, x, a1, a2)?;
        if let Some(i) = omega.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                component: "omega",
                index: vec![i],
            });
        }
        Ok((omega, state))
    }
}
