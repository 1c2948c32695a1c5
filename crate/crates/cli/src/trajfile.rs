//! Binary trajectory container.
//!
//! Layout: the 8-byte magic `TRIADTRJ`, a little-endian `u64` header length,
//! a UTF-8 JSON header, then one record per sample. A record is `t` followed
//! by the packed state `[x | A¹ | A²]`, all little-endian `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use triadic_core::experiment::Experiment;
use triadic_core::integrator::{pack_state, packed_len, unpack_state, Trajectory};
use triadic_core::models::ModelSpec;

use crate::error::{CliError, Result};
use crate::GENERATOR;

const MAGIC: &[u8; 8] = b"TRIADTRJ";
pub const FORMAT_VERSION: u32 = 1;
const LAYOUT: &str = "t, x[n], a1[n*n] row-major, a2[n*n*n] row-major; f64 little-endian";

/// Refuse absurd header lengths before allocating.
const MAX_HEADER_BYTES: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub format_version: u32,
    pub generator: String,
    pub layout: String,
    pub n: usize,
    pub record_len: usize,
    pub sample_count: usize,
    pub dt: f64,
    pub sample_times: Vec<f64>,
    pub spec: ModelSpec,
    pub experiment: Experiment,
}

pub fn write(path: &Path, traj: &Trajectory, experiment: &Experiment) -> Result<()> {
    let n = traj.n();
    let header = Header {
        format_version: FORMAT_VERSION,
        generator: GENERATOR.to_string(),
        layout: LAYOUT.to_string(),
        n,
        record_len: 1 + packed_len(n),
        sample_count: traj.samples.len(),
        dt: experiment.plan.dt,
        sample_times: traj.times(),
        spec: traj.spec.clone(),
        experiment: experiment.clone(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    let io = |r: std::io::Result<()>| r.map_err(CliError::io(path));
    io(w.write_all(MAGIC))?;
    io(w.write_all(&(json.len() as u64).to_le_bytes()))?;
    io(w.write_all(&json))?;
    for s in &traj.samples {
        io(w.write_all(&s.t.to_le_bytes()))?;
        for v in pack_state(s) {
            io(w.write_all(&v.to_le_bytes()))?;
        }
    }
    io(w.flush())
}

pub fn read(path: &Path) -> Result<(Header, Trajectory)> {
    let bad = |reason: String| CliError::Format {
        path: path.to_path_buf(),
        reason,
    };
    let file = File::open(path).map_err(CliError::io(path))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic, path)?;
    if &magic != MAGIC {
        return Err(bad("not a trajectory file (bad magic)".into()));
    }
    let mut len = [0u8; 8];
    read_exact(&mut r, &mut len, path)?;
    let len = u64::from_le_bytes(len);
    if len > MAX_HEADER_BYTES {
        return Err(bad(format!("header length {len} is implausible")));
    }
    let mut json = vec![0u8; len as usize];
    read_exact(&mut r, &mut json, path)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| bad(format!("header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(bad(format!(
            "unsupported format_version {}",
            header.format_version
        )));
    }
    if header.record_len != 1 + packed_len(header.n) {
        return Err(bad(format!(
            "record_len {} does not match n = {}",
            header.record_len, header.n
        )));
    }

    let mut body = Vec::new();
    r.read_to_end(&mut body).map_err(CliError::io(path))?;
    let expected = header.sample_count * header.record_len * 8;
    if body.len() != expected {
        return Err(bad(format!(
            "body has {} bytes, expected {expected}",
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let mut samples = Vec::with_capacity(header.sample_count);
    for (idx, rec) in values.chunks_exact(header.record_len).enumerate() {
        let mut s = unpack_state(&rec[1..], header.n).map_err(|e| bad(e.to_string()))?;
        s.t = rec[0];
        if header.sample_times.get(idx).map(|t| t.to_bits()) != Some(s.t.to_bits()) {
            return Err(bad(format!("sample {idx} time disagrees with the header")));
        }
        samples.push(s);
    }
    let traj = Trajectory::new(header.spec.clone(), samples).map_err(|e| bad(e.to_string()))?;
    Ok((header, traj))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], path: &Path) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            CliError::Format {
                path: path.to_path_buf(),
                reason: "truncated".into(),
            }
        } else {
            CliError::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })
}
