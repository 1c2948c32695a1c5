//! Complete experiment descriptions and the four built-in presets.

use serde::{Deserialize, Serialize};

use crate::analysis::{Flavor, Projection, RegimeSettings};
use crate::error::{invalid, Result};
use crate::init::{EntryOverride, InitialConditions, Sampler};
use crate::integrator::{integrate, IntegrationPlan, Trajectory};
use crate::models::{ClosureParams, ConsensusParams, ModelKind, ModelSpec, SystemState};
use crate::tolerances::DEFAULT_DT;

/// Seed used by every preset unless overridden.
pub const PRESET_SEED: u64 = 42;

pub const PRESET_NAMES: [&str; 4] = [
    "sym-case",
    "antisym-case",
    "kuramoto-closure",
    "consensus-persistent",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureSettings {
    pub delta: f64,
    pub flavor: Flavor,
    pub projection: Projection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub n: usize,
    #[serde(with = "seed_repr")]
    pub seed: u64,
    #[serde(default)]
    pub freeze_degenerate: bool,
    pub model: ModelKind,
    pub initial: InitialConditions,
    pub plan: IntegrationPlan,
    #[serde(default)]
    pub regime: RegimeSettings,
    pub closure: ClosureSettings,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        if !(self.closure.delta > 0.0 && self.closure.delta.is_finite()) {
            return Err(invalid(
                "closure.delta",
                format!("must be finite and > 0, got {}", self.closure.delta),
            ));
        }
        let r = self.regime;
        if !(r.epsilon_rel > 0.0 && r.epsilon_rel < 1.0) {
            return Err(invalid(
                "regime.epsilon_rel",
                format!("must lie in (0, 1), got {}", r.epsilon_rel),
            ));
        }
        if !(r.window_fraction > 0.0 && r.window_fraction <= 1.0) {
            return Err(invalid(
                "regime.window_fraction",
                format!("must lie in (0, 1], got {}", r.window_fraction),
            ));
        }
        Ok(())
    }

    /// Draws the initial condition and assembles the validated spec.
    pub fn build(&self) -> Result<(ModelSpec, SystemState)> {
        self.validate()?;
        let (omega, state) = self.initial.generate(self.n, self.seed, self.plan.t0)?;
        let spec = ModelSpec::new(self.model.clone(), omega, self.seed)?
            .with_freeze_degenerate(self.freeze_degenerate);
        Ok((spec, state))
    }

    pub fn run(&self) -> Result<Trajectory> {
        let (spec, state) = self.build()?;
        integrate(&spec, &state, &self.plan)
    }
}

/// Seeds above `i64::MAX` are written as decimal strings, since TOML integers
/// are signed 64-bit. Either form is accepted on input.
mod seed_repr {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(u64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        if i64::try_from(*seed).is_ok() {
            seed.serialize(s)
        } else {
            seed.to_string().serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(v),
            Repr::Text(t) => t.trim().parse().map_err(serde::de::Error::custom),
        }
    }
}

fn closure_params() -> ClosureParams {
    ClosureParams {
        alpha: 0.5,
        beta: 25.0,
        gamma: 0.8,
        delta: 0.5,
        zeta: 0.05,
        scan_all_slices: false,
    }
}

/// Weak edge (0,1) under the strong triad {0,1,2}, all entries symmetric.
fn seeded_violation(initial: &mut InitialConditions) {
    let sym = |index: Vec<usize>, value| EntryOverride {
        index,
        value,
        symmetric: true,
    };
    initial.a1_overrides = vec![
        sym(vec![0, 2], 0.6),
        sym(vec![1, 2], 0.7),
        sym(vec![0, 1], 0.1),
    ];
    initial.a2_overrides = vec![sym(vec![0, 1, 2], 0.8)];
}

pub fn sym_case() -> Experiment {
    Experiment {
        name: "sym-case".into(),
        n: 5,
        seed: PRESET_SEED,
        freeze_degenerate: false,
        model: ModelKind::SymmetricCosine {
            delta1: 0.1,
            delta2: 0.1,
        },
        initial: InitialConditions {
            omega: Sampler::Normal {
                mean: 0.0,
                std: 1.0,
            },
            x: Sampler::Uniform {
                low: 0.0,
                high: std::f64::consts::TAU,
            },
            a1: Sampler::Uniform {
                low: -1.0,
                high: 1.0,
            },
            a2: Sampler::Uniform {
                low: -1.0,
                high: 1.0,
            },
            a1_overrides: vec![],
            a2_overrides: vec![],
        },
        plan: IntegrationPlan {
            t0: 0.0,
            t1: 50.0,
            dt: DEFAULT_DT,
            sample_count: 500,
        },
        regime: RegimeSettings::default(),
        closure: ClosureSettings {
            delta: 0.5,
            flavor: Flavor::Unoriented,
            projection: Projection::FlavorComponent,
        },
    }
}

pub fn antisym_case() -> Experiment {
    Experiment {
        name: "antisym-case".into(),
        n: 5,
        seed: PRESET_SEED,
        freeze_degenerate: false,
        model: ModelKind::AntisymmetricSine {
            delta1: 0.1,
            delta2: 0.1,
        },
        initial: InitialConditions {
            omega: Sampler::EquallySpaced {
                low: -1.0,
                high: 1.0,
            },
            x: Sampler::Uniform {
                low: 0.0,
                high: 1.0,
            },
            a1: Sampler::Uniform {
                low: -1.0,
                high: 1.0,
            },
            a2: Sampler::Uniform {
                low: -1.0,
                high: 1.0,
            },
            a1_overrides: vec![],
            a2_overrides: vec![],
        },
        plan: IntegrationPlan {
            t0: 0.0,
            t1: 50.0,
            dt: DEFAULT_DT,
            sample_count: 500,
        },
        regime: RegimeSettings::default(),
        closure: ClosureSettings {
            delta: 0.5,
            flavor: Flavor::Oriented,
            projection: Projection::FlavorComponent,
        },
    }
}

pub fn kuramoto_closure() -> Experiment {
    let mut initial = InitialConditions {
        omega: Sampler::Normal {
            mean: 0.0,
            std: 0.5,
        },
        x: Sampler::Uniform {
            low: 0.0,
            high: std::f64::consts::TAU,
        },
        a1: Sampler::Uniform {
            low: -0.25,
            high: 0.25,
        },
        a2: Sampler::Uniform {
            low: -0.25,
            high: 0.25,
        },
        a1_overrides: vec![],
        a2_overrides: vec![],
    };
    seeded_violation(&mut initial);
    Experiment {
        name: "kuramoto-closure".into(),
        n: 4,
        seed: PRESET_SEED,
        freeze_degenerate: false,
        model: ModelKind::SmoothedKuramotoClosure(closure_params()),
        initial,
        plan: IntegrationPlan {
            t0: 0.0,
            t1: 25.0,
            dt: DEFAULT_DT,
            sample_count: 250,
        },
        regime: RegimeSettings::default(),
        closure: ClosureSettings {
            delta: 0.5,
            flavor: Flavor::Unoriented,
            projection: Projection::FlavorComponent,
        },
    }
}

pub fn consensus_persistent() -> Experiment {
    let c = closure_params();
    let mut initial = InitialConditions {
        omega: Sampler::Constant { value: 0.0 },
        x: Sampler::Values {
            values: vec![0.10, 0.15, 0.20, 2.00],
        },
        a1: Sampler::Uniform {
            low: -0.25,
            high: 0.25,
        },
        a2: Sampler::Uniform {
            low: -0.25,
            high: 0.25,
        },
        a1_overrides: vec![],
        a2_overrides: vec![],
    };
    seeded_violation(&mut initial);
    Experiment {
        name: "consensus-persistent".into(),
        n: 4,
        seed: PRESET_SEED,
        freeze_degenerate: false,
        model: ModelKind::ConsensusVariance(ConsensusParams {
            alpha: c.alpha,
            beta: c.beta,
            gamma: c.gamma,
            delta: c.delta,
            zeta: c.zeta,
            kappa1: 1.0,
            kappa2: 1.2,
            lambda1: 2.0,
            lambda2: 5.0,
            scan_all_slices: false,
        }),
        initial,
        plan: IntegrationPlan {
            t0: 0.0,
            t1: 25.0,
            dt: DEFAULT_DT,
            sample_count: 250,
        },
        regime: RegimeSettings::default(),
        closure: ClosureSettings {
            delta: 0.5,
            flavor: Flavor::Unoriented,
            projection: Projection::FlavorComponent,
        },
    }
}

pub fn preset(name: &str) -> Result<Experiment> {
    match name {
        "sym-case" => Ok(sym_case()),
        "antisym-case" => Ok(antisym_case()),
        "kuramoto-closure" => Ok(kuramoto_closure()),
        "consensus-persistent" => Ok(consensus_persistent()),
        other => Err(invalid(
            "preset",
            format!(
                "unknown preset `{other}`; expected one of {}",
                PRESET_NAMES.join(", ")
            ),
        )),
    }
}
