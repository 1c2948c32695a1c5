//! Norm-series CSV and JSON reports.
//!
//! Every float is written with 17 significant digits, which round-trips any
//! `f64` exactly.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use triadic_core::analysis::{
    check_closure, check_closure_unoriented, classify_regime, norm_series, order_parameter,
    project_for_flavor, scan_retention, ClosureReport, Flavor, OrderParameter, Projection,
    RegimeVerdict, RetentionRecord,
};
use triadic_core::complex::extract;
use triadic_core::experiment::{ClosureSettings, Experiment};
use triadic_core::integrator::Trajectory;
use triadic_core::models::SystemState;
use triadic_core::tensor::{sym2, sym3, Rank2Tensor, Rank3Tensor};

use crate::error::{CliError, Result};
use crate::GENERATOR;

pub const SNAPSHOT_COUNT: usize = 6;

pub const NORMS_FILE: &str = "norms.csv";
pub const REGIME_FILE: &str = "regime.json";
pub const RETENTION_FILE: &str = "retention.json";
pub const SNAPSHOTS_FILE: &str = "snapshots.json";

const CSV_HEADER: &str =
    "t,a1_sym,a1_alt,a2_sym,a2_alt,a2_mix,r,psi,violations_unoriented,violations_flavored";

/// Pretty JSON with floats in `{:.16e}` form.
struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report serializes");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Provenance block repeated in every JSON report.
#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub generator: &'static str,
    pub experiment: String,
    pub model: &'static str,
    pub n: usize,
    pub seed: u64,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub sample_count: usize,
    pub closure: ClosureSettings,
}

impl RunMeta {
    fn new(e: &Experiment) -> Self {
        Self {
            generator: GENERATOR,
            experiment: e.name.clone(),
            model: e.model.name(),
            n: e.n,
            seed: e.seed,
            dt: e.plan.dt,
            t0: e.plan.t0,
            t1: e.plan.t1,
            sample_count: e.plan.sample_count,
            closure: e.closure,
        }
    }
}

#[derive(Debug, Serialize)]
struct RegimeReport<'a> {
    meta: &'a RunMeta,
    verdict: &'a RegimeVerdict,
}

#[derive(Debug, Serialize)]
pub struct RetentionReport<'a> {
    pub meta: &'a RunMeta,
    pub verdict: &'a RegimeVerdict,
    pub retention: &'a RetentionRecord,
}

#[derive(Debug, Serialize)]
struct Weighted {
    simplex: Vec<usize>,
    weight: f64,
}

#[derive(Debug, Serialize)]
struct Snapshot {
    index: usize,
    t: f64,
    order: OrderParameter,
    edges: Vec<Weighted>,
    triads: Vec<Weighted>,
    closure: ClosureReport,
}

#[derive(Debug, Serialize)]
struct SnapshotReport<'a> {
    meta: &'a RunMeta,
    verdict: &'a RegimeVerdict,
    snapshots: Vec<Snapshot>,
}

/// The four report files, rendered.
#[derive(Debug, Clone, PartialEq)]
pub struct Reports {
    pub verdict: RegimeVerdict,
    pub retention: RetentionRecord,
    pub norms_csv: String,
    pub regime_json: String,
    pub retention_json: String,
    pub snapshots_json: String,
}

impl Reports {
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        for (name, body) in [
            (NORMS_FILE, &self.norms_csv),
            (REGIME_FILE, &self.regime_json),
            (RETENTION_FILE, &self.retention_json),
            (SNAPSHOTS_FILE, &self.snapshots_json),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(CliError::io(&path))?;
        }
        Ok(())
    }
}

/// Tensors the closure checks see under `settings`.
fn checked_tensors(s: &SystemState, settings: &ClosureSettings) -> (Rank2Tensor, Rank3Tensor) {
    match settings.projection {
        Projection::FlavorComponent => project_for_flavor(&s.a1, &s.a2, settings.flavor),
        Projection::Raw => (s.a1.clone(), s.a2.clone()),
    }
}

/// Sample indices `round(m (S-1) / (count-1))`, deduplicated.
pub fn snapshot_indices(samples: usize, count: usize) -> Vec<usize> {
    if samples == 0 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (0..count)
        .map(|m| ((m * (samples - 1)) as f64 / (count - 1) as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

fn snapshot(index: usize, s: &SystemState, settings: &ClosureSettings) -> Result<Snapshot> {
    let (a1, a2) = checked_tensors(s, settings);
    let ds = extract(&a1, &a2, settings.delta)?;
    let (x1, x2) = match settings.flavor {
        Flavor::SemiSimplicial => (ds.x1.clone(), ds.x2.clone()),
        _ => (ds.canonical_edges(), ds.canonical_triads()),
    };
    Ok(Snapshot {
        index,
        t: s.t,
        order: order_parameter(&s.x)?,
        edges: x1
            .into_iter()
            .map(|[i, j]| Weighted {
                simplex: vec![i, j],
                weight: a1.get(i, j),
            })
            .collect(),
        triads: x2
            .into_iter()
            .map(|[i, j, k]| Weighted {
                simplex: vec![i, j, k],
                weight: a2.get(i, j, k),
            })
            .collect(),
        closure: check_closure(&a1, &a2, settings.delta, settings.flavor),
    })
}

/// Runs every analysis on `traj` using the settings carried by `e`.
pub fn analyze(traj: &Trajectory, e: &Experiment) -> Result<Reports> {
    e.validate()?;
    let settings = e.closure;
    let norms = norm_series(traj);
    let verdict = classify_regime(&norms, e.regime.epsilon_rel, e.regime.window_fraction)?;
    let retention = scan_retention(traj, settings.delta, settings.flavor, settings.projection)?;
    let meta = RunMeta::new(e);

    let mut csv = String::with_capacity(traj.samples.len() * 200);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for (idx, s) in traj.samples.iter().enumerate() {
        let op = order_parameter(&s.x)?;
        let unoriented = match settings.projection {
            Projection::FlavorComponent => {
                check_closure_unoriented(&sym2(&s.a1), &sym3(&s.a2), settings.delta)
            }
            Projection::Raw => check_closure_unoriented(&s.a1, &s.a2, settings.delta),
        };
        let row = [
            s.t,
            norms.a1_sym[idx],
            norms.a1_alt[idx],
            norms.a2_sym[idx],
            norms.a2_alt[idx],
            norms.a2_mix[idx],
            op.r,
            op.psi,
        ];
        for v in row {
            write!(csv, "{v:.16e},").expect("write to String");
        }
        writeln!(
            csv,
            "{},{}",
            unoriented.violations.len(),
            retention.violation_counts[idx]
        )
        .expect("write to String");
    }

    let snapshots = snapshot_indices(traj.samples.len(), SNAPSHOT_COUNT)
        .into_iter()
        .map(|i| snapshot(i, &traj.samples[i], &settings))
        .collect::<Result<Vec<_>>>()?;

    Ok(Reports {
        norms_csv: csv,
        regime_json: to_json(&RegimeReport {
            meta: &meta,
            verdict: &verdict,
        }),
        retention_json: to_json(&RetentionReport {
            meta: &meta,
            verdict: &verdict,
            retention: &retention,
        }),
        snapshots_json: to_json(&SnapshotReport {
            meta: &meta,
            verdict: &verdict,
            snapshots,
        }),
        verdict,
        retention,
    })
}
