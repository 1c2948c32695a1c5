//! Sample-wise entry and exit scanning of the closure region.

use serde::{Deserialize, Serialize};

use super::{check_closure, project_for_flavor, Flavor};
use crate::error::{Error, Result};
use crate::integrator::Trajectory;

/// What to check at each sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// The stored tensors as they are.
    Raw,
    /// The flavor's representative (see [`project_for_flavor`]).
    FlavorComponent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionRecord {
    pub flavor: Flavor,
    pub delta: f64,
    pub projection: Projection,
    pub times: Vec<f64>,
    pub violation_counts: Vec<usize>,
    /// Earliest sample with no violations.
    pub first_entry_time: Option<f64>,
    /// Earliest sample after entry with violations.
    pub first_exit_after_entry: Option<f64>,
    /// The exit happened somewhere in `(previous sample, exit sample]`.
    pub exit_bracket: Option<[f64; 2]>,
}

pub fn scan_retention(
    traj: &Trajectory,
    delta: f64,
    flavor: Flavor,
    projection: Projection,
) -> Result<RetentionRecord> {
    if traj.samples.is_empty() {
        return Err(Error::Empty("trajectory samples"));
    }
    let mut counts = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let report = match projection {
            Projection::Raw => check_closure(&s.a1, &s.a2, delta, flavor),
            Projection::FlavorComponent => {
                let (a1, a2) = project_for_flavor(&s.a1, &s.a2, flavor);
                check_closure(&a1, &a2, delta, flavor)
            }
        };
        counts.push(report.violations.len());
    }
    let times = traj.times();
    let entry = counts.iter().position(|&c| c == 0);
    let exit = entry.and_then(|e| (e + 1..counts.len()).find(|&s| counts[s] > 0));
    Ok(RetentionRecord {
        flavor,
        delta,
        projection,
        first_entry_time: entry.map(|e| times[e]),
        first_exit_after_entry: exit.map(|x| times[x]),
        exit_bracket: exit.map(|x| [times[x - 1], times[x]]),
        times,
        violation_counts: counts,
    })
}
