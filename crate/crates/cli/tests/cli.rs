//! End-to-end runs of the `triadic` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_triadic");
const REPORTS: [&str; 4] = [
    "norms.csv",
    "regime.json",
    "retention.json",
    "snapshots.json",
];

fn triadic(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("spawn triadic")
}

fn ok(args: &[&str]) -> String {
    let out = triadic(args);
    assert!(
        out.status.success(),
        "triadic {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn write_preset_config(name: &str, dir: &Path, edit: impl Fn(String) -> String) -> PathBuf {
    let text = edit(ok(&["preset", name, "--dump-config"]));
    let path = dir.join(format!("{name}.toml"));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn simulate_then_analyze_matches_preset_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["kuramoto-closure", "consensus-persistent"] {
        let direct = tmp.path().join(format!("{name}-preset"));
        let staged = tmp.path().join(format!("{name}-staged"));
        ok(&["preset", name, "--out", p(&direct)]);
        let cfg = write_preset_config(name, tmp.path(), |t| t);
        ok(&["simulate", "--config", p(&cfg), "--out", p(&staged)]);
        ok(&["analyze", p(&staged.join("trajectory.bin"))]);
        for file in REPORTS.iter().chain(&["trajectory.bin"]) {
            let a = std::fs::read(direct.join(file)).unwrap();
            let b = std::fs::read(staged.join(file)).unwrap();
            assert!(a == b, "{name}/{file} differs");
        }
    }
}

/// Decodes the container independently of the binary's own reader.
fn decode(path: &Path) -> (Value, Vec<Vec<f64>>) {
    let bytes = std::fs::read(path).unwrap();
    assert_eq!(&bytes[..8], b"TRIADTRJ");
    let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let header: Value = serde_json::from_slice(&bytes[16..16 + len]).unwrap();
    let n = header["n"].as_u64().unwrap() as usize;
    let rec = 1 + n + n * n + n * n * n;
    let body = &bytes[16 + len..];
    assert_eq!(body.len() % (8 * rec), 0);
    let records = body
        .chunks_exact(8 * rec)
        .map(|r| {
            r.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect()
        })
        .collect();
    (header, records)
}

#[test]
fn trajectory_file_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_preset_config("kuramoto-closure", tmp.path(), |t| {
        t.replace("t1 = 25.0", "t1 = 2.0")
    });
    ok(&[
        "simulate",
        "--config",
        p(&cfg),
        "--out",
        p(tmp.path()),
        "--seed",
        "7",
        "--dt",
        "0.005",
    ]);
    let (header, records) = decode(&tmp.path().join("trajectory.bin"));
    assert_eq!(header["dt"], 0.005);
    assert_eq!(header["experiment"]["seed"], 7);
    let times = header["sample_times"].as_array().unwrap();
    assert_eq!(records.len(), 250);
    assert_eq!(times.len(), 250);
    for (rec, t) in records.iter().zip(times) {
        assert_eq!(rec[0].to_bits(), t.as_f64().unwrap().to_bits());
    }
    assert_eq!(records.last().unwrap()[0], 2.0);
    // Seeded violation entries survive unchanged in the first record.
    let n = 4;
    assert_eq!(records[0][1 + n + 1], 0.1);
    assert_eq!(records[0][1 + n + n * n + n + 2], 0.8);
}

#[test]
fn check_with_huge_delta_is_in_region_everywhere() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_preset_config("kuramoto-closure", tmp.path(), |t| {
        t.replace("t1 = 25.0", "t1 = 5.0")
    });
    ok(&["simulate", "--config", p(&cfg), "--out", p(tmp.path())]);
    let traj = tmp.path().join("trajectory.bin");
    for flavor in ["unoriented", "oriented", "semisimplicial"] {
        let out: Value = serde_json::from_str(&ok(&[
            "check",
            p(&traj),
            "--delta",
            "1e6",
            "--flavor",
            flavor,
        ]))
        .unwrap();
        let counts = out["violation_counts"].as_array().unwrap();
        assert_eq!(counts.len(), 250);
        assert!(counts.iter().all(|c| c == 0), "{flavor}");
        assert_eq!(out["first_entry_time"], 0.0);
        assert!(out["first_exit_after_entry"].is_null());
    }
    ok(&[
        "check",
        p(&traj),
        "--delta",
        "1e6",
        "--flavor",
        "oriented",
        "--raw",
        "--out",
        p(&tmp.path().join("c")),
    ]);
    let written = json(tmp.path().join("c/retention.json"));
    assert_eq!(written["retention"]["projection"], "raw");
}

#[test]
fn sym_case_stays_symmetric_at_looser_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    ok(&["preset", "sym-case", "--out", p(&run)]);
    let loose = tmp.path().join("loose");
    ok(&[
        "analyze",
        p(&run.join("trajectory.bin")),
        "--out",
        p(&loose),
        "--epsilon-rel",
        "0.5",
    ]);
    let v = json(loose.join("regime.json"));
    assert_eq!(v["verdict"]["regime"], "Symmetric");
    assert_eq!(v["verdict"]["epsilon_rel"], 0.5);
    assert_eq!(v["meta"]["dt"], 0.01);
}

#[test]
fn antisym_case_is_antisymmetric() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["preset", "antisym-case", "--out", p(tmp.path())]);
    assert_eq!(
        json(tmp.path().join("regime.json"))["verdict"]["regime"],
        "Antisymmetric"
    );
}

#[test]
fn kuramoto_closure_enters_and_stays() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["preset", "kuramoto-closure", "--out", p(tmp.path())]);
    let r = &json(tmp.path().join("retention.json"))["retention"];
    let entry = r["first_entry_time"].as_f64().unwrap();
    assert!(entry > 0.0 && entry < 25.0);
    assert!(r["first_exit_after_entry"].is_null());

    let csv = std::fs::read_to_string(tmp.path().join("norms.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,a1_sym,a1_alt,a2_sym,a2_alt,a2_mix,r,psi,violations_unoriented,violations_flavored"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 250);
    assert_eq!(rows[0][9], "1");
    for row in &rows {
        let t: f64 = row[0].parse().unwrap();
        if t >= entry {
            assert_eq!(row[9], "0", "violation at t = {t}");
        }
    }

    let snaps = json(tmp.path().join("snapshots.json"));
    let list = snaps["snapshots"].as_array().unwrap();
    assert_eq!(list.len(), 6);
    assert_eq!(list[0]["t"], 0.0);
    assert_eq!(list[5]["t"], 25.0);
    let triads = list[0]["triads"].as_array().unwrap();
    assert!(triads
        .iter()
        .any(|t| t["simplex"] == serde_json::json!([0, 1, 2])));
    assert_eq!(snaps["verdict"]["regime"], "Symmetric");
}

#[test]
fn sweep_runs_each_config_into_its_own_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let short = |t: String| {
        t.replace("t1 = 25.0", "t1 = 1.0")
            .replace("sample_count = 250", "sample_count = 11")
    };
    let a = write_preset_config("kuramoto-closure", tmp.path(), short);
    let b = write_preset_config("consensus-persistent", tmp.path(), short);
    let out = tmp.path().join("sweep");
    ok(&["sweep", "--config", p(&a), p(&b), "--out", p(&out)]);
    for name in ["kuramoto-closure", "consensus-persistent"] {
        for file in REPORTS {
            assert!(out.join(name).join(file).is_file(), "{name}/{file}");
        }
    }
    let dup = triadic(&["sweep", "--config", p(&a), p(&a), "--out", p(&out)]);
    assert_eq!(dup.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();

    let unknown = write_preset_config("sym-case", d, |t| {
        t.replace("[experiment.plan]", "[experiment.plan]\nstep = 2")
    });
    let out = triadic(&["simulate", "--config", p(&unknown), "--out", p(d)]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("step") && msg.contains("plan"), "{msg}");

    let negative = write_preset_config("sym-case", d, |t| {
        t.replace("delta1 = 0.1", "delta1 = -0.1")
    });
    assert_eq!(
        triadic(&["simulate", "--config", p(&negative), "--out", p(d)])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        triadic(&["preset", "sym-case", "--out", p(d), "--delta=-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        triadic(&["preset", "no-such-preset"]).status.code(),
        Some(2)
    );

    let blowup = write_preset_config("sym-case", d, |t| {
        let start = t.find("[experiment.initial.x]").unwrap();
        let end = t.find("[experiment.initial.a2]").unwrap();
        let replaced =
            "[experiment.initial.x]\ndist = \"values\"\nvalues = [0.0, 1.0, 1.0, 1.0, 1.0]\n\n\
                        [experiment.initial.a1]\ndist = \"constant\"\nvalue = 1e308\n\n";
        format!("{}{replaced}{}", &t[..start], &t[end..])
            .replace("t1 = 50.0", "t1 = 1.0")
            .replace("dt = 0.01", "dt = 0.1")
            .replace("sample_count = 500", "sample_count = 3")
    });
    let out = triadic(&["simulate", "--config", p(&blowup), "--out", p(d)]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("t = "), "{msg}");

    let missing = d.join("missing.toml");
    assert_eq!(
        triadic(&["simulate", "--config", p(&missing), "--out", p(d)])
            .status
            .code(),
        Some(4)
    );

    let junk = d.join("junk.bin");
    std::fs::write(&junk, b"not a trajectory").unwrap();
    assert_eq!(triadic(&["analyze", p(&junk)]).status.code(), Some(4));

    ok(&["preset", "--list"]);
}
