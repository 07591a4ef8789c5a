//! Trajectory CSV and raw snapshot files.
//!
//! A snapshot is two files sharing a stem: `<stem>.c64` holds the tuple as
//! little-endian complex64 values (f32 real, f32 imaginary), matrix by
//! matrix, each row-major; `<stem>.json` records `m`, `N`, `t` and `seed`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DistanceSeries, Trajectory};
use crate::matmodel::{CMatrix, HermMatrix, MatrixTuple};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub seed: u64,
}

/// Formats with 17 significant digits.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(name: &str) -> String {
    if name.contains([',', '"', '\n']) {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    let mut header = vec!["t".to_string(), "norm_max".to_string()];
    header.extend(traj.observables.iter().map(|o| csv_field(&o.name)));
    writeln!(w, "{}", header.join(","))?;
    for (k, t) in traj.times.iter().enumerate() {
        let mut row = vec![fmt17(*t), fmt17(traj.norm_max[k])];
        row.extend(traj.observables.iter().map(|o| fmt17(o.values[k])));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_distance_csv<W: Write>(mut w: W, d: &DistanceSeries) -> io::Result<()> {
    writeln!(w, "t,op_distance,trace_sq_distance")?;
    for k in 0..d.times.len() {
        writeln!(
            w,
            "{},{},{}",
            fmt17(d.times[k]),
            fmt17(d.op_norm[k]),
            fmt17(d.trace_sq[k])
        )?;
    }
    Ok(())
}

pub fn encode_snapshot(state: &MatrixTuple) -> Vec<u8> {
    let n = state.dim();
    let mut out = Vec::with_capacity(state.len() * n * n * 8);
    for a in state.iter() {
        for i in 0..n {
            for j in 0..n {
                let z = a.matrix()[(i, j)];
                out.extend_from_slice(&(z.re as f32).to_le_bytes());
                out.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
        }
    }
    out
}

pub fn decode_snapshot(meta: &SnapshotMeta, bytes: &[u8]) -> io::Result<MatrixTuple> {
    let (m, n) = (meta.m, meta.n);
    if m == 0 || n == 0 || bytes.len() != m * n * n * 8 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("expected {} bytes for m = {m}, N = {n}, found {}", m * n * n * 8, bytes.len()),
        ));
    }
    let mut values = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64);
    let mut mats = Vec::with_capacity(m);
    for _ in 0..m {
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let re = values.next().expect("length checked");
                let im = values.next().expect("length checked");
                a[(i, j)] = Complex64::new(re, im);
            }
        }
        let h = HermMatrix::try_new(a, 1e-6)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        mats.push(h);
    }
    MatrixTuple::new(mats).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes `<stem>.c64` and `<stem>.json`.
pub fn write_snapshot(stem: &Path, state: &MatrixTuple, t: f64, seed: u64) -> io::Result<()> {
    let meta = SnapshotMeta {
        m: state.len(),
        n: state.dim(),
        t,
        seed,
    };
    fs::write(with_ext(stem, "c64"), encode_snapshot(state))?;
    let json = serde_json::to_string_pretty(&meta)?;
    fs::write(with_ext(stem, "json"), json + "\n")
}

pub fn read_snapshot(stem: &Path) -> io::Result<(SnapshotMeta, MatrixTuple)> {
    let meta: SnapshotMeta = serde_json::from_slice(&fs::read(with_ext(stem, "json"))?)?;
    let bytes = fs::read(with_ext(stem, "c64"))?;
    let state = decode_snapshot(&meta, &bytes)?;
    Ok((meta, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matmodel::{random_selfadjoint_tuple, RngStream};

    #[test]
    fn snapshot_round_trip_to_f32_precision() {
        let dir = tempfile::tempdir().unwrap();
        let x = random_selfadjoint_tuple(2, 5, 2.0, &mut RngStream::new(6)).unwrap();
        let stem = dir.path().join("state");
        write_snapshot(&stem, &x, 1.25, 42).unwrap();
        let (meta, back) = read_snapshot(&stem).unwrap();
        assert_eq!(meta, SnapshotMeta { m: 2, n: 5, t: 1.25, seed: 42 });
        assert!(back.try_sub(&x).unwrap().norm().unwrap() < 1e-6);
        assert_eq!(fs::read(dir.path().join("state.c64")).unwrap().len(), 2 * 25 * 8);
        let sidecar = fs::read_to_string(dir.path().join("state.json")).unwrap();
        assert!(sidecar.contains("\"N\": 5"));
    }

    #[test]
    fn truncated_snapshot_is_rejected() {
        let meta = SnapshotMeta { m: 1, n: 2, t: 0.0, seed: 0 };
        assert!(decode_snapshot(&meta, &[0u8; 31]).is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
