//! Line-oriented checkpoint files.
//!
//! ```text
//! ESF-CKPT v1 n=<n> K=<k_cap(n)>
//! T <k> <num>/<den>        k = 1..=K
//! S1 <i> <num>/<den>       i = 1..=n
//! HIT <n> <i> <k> <num>/<den>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::scan::Hit;
use crate::symfun::{k_cap, row_cap, SFirstColumn, TRow};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &str = "ESF-CKPT";

/// Scan state after a fully completed `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointRecord {
    pub n: u64,
    pub t_row: TRow,
    pub s_col: SFirstColumn,
    pub hits: Vec<Hit>,
}

impl CheckpointRecord {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{MAGIC} v{CHECKPOINT_VERSION} n={} K={}",
            self.n,
            k_cap(self.n)
        )
        .unwrap();
        for (k, v) in self.t_row.values().iter().enumerate() {
            writeln!(out, "T {} {v}", k + 1).unwrap();
        }
        for (i, v) in self.s_col.values().iter().enumerate() {
            writeln!(out, "S1 {} {v}", i + 1).unwrap();
        }
        for h in &self.hits {
            writeln!(out, "HIT {} {} {} {}", h.n, h.i, h.k, h.value).unwrap();
        }
        out
    }

    /// Parses and validates checkpoint text; the error string is a
    /// human-readable diagnostic.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().enumerate().map(|(no, l)| (no + 1, l));
        let (_, header) = lines.next().ok_or("empty file")?;
        let (n, k_header) = parse_header(header)?;

        let t_len = (n as usize).min(row_cap(n));
        let mut t_vals = Vec::with_capacity(t_len);
        let mut s_vals = Vec::with_capacity(n as usize);
        let mut hits = Vec::new();
        for (no, line) in lines {
            let fields: Vec<&str> = line.split(' ').collect();
            let at = |msg: String| format!("line {no}: {msg}");
            match fields.as_slice() {
                ["T", k, v] => {
                    if !s_vals.is_empty() || !hits.is_empty() {
                        return Err(at("T line after S1/HIT section".into()));
                    }
                    expect_index(k, t_vals.len() + 1).map_err(at)?;
                    t_vals.push(parse_value(v).map_err(at)?);
                }
                ["S1", i, v] => {
                    if !hits.is_empty() {
                        return Err(at("S1 line after HIT section".into()));
                    }
                    expect_index(i, s_vals.len() + 1).map_err(at)?;
                    s_vals.push(parse_value(v).map_err(at)?);
                }
                ["HIT", hn, hi, hk, v] => {
                    let hit = Hit {
                        n: parse_u64(hn).map_err(at)?,
                        i: parse_u64(hi).map_err(at)?,
                        k: parse_u64(hk).map_err(at)? as usize,
                        value: parse_value(v).map_err(at)?,
                    };
                    if hit.n > n
                        || hit.i == 0
                        || hit.i > hit.n
                        || hit.k == 0
                        || hit.k as u64 >= hit.n
                    {
                        return Err(at(format!(
                            "hit ({}, {}, {}) out of range",
                            hit.n, hit.i, hit.k
                        )));
                    }
                    if !hit.value.is_integer() {
                        return Err(at(format!("hit value {} is not an integer", hit.value)));
                    }
                    hits.push(hit);
                }
                _ => return Err(at(format!("unrecognised line {line:?}"))),
            }
        }
        if k_header != k_cap(n) {
            return Err(format!("header K={k_header} but k_cap({n}) = {}", k_cap(n)));
        }
        if t_vals.len() != t_len {
            return Err(format!(
                "expected {t_len} T lines, found {} (truncated?)",
                t_vals.len()
            ));
        }
        if s_vals.len() != n as usize {
            return Err(format!(
                "expected {n} S1 lines, found {} (truncated?)",
                s_vals.len()
            ));
        }
        let t_row = TRow::from_values(n, row_cap(n), t_vals).map_err(|e| e.to_string())?;
        // S(n,i,1) = H_n - 1/i ties the two sections together
        for (idx, s) in s_vals.iter().enumerate() {
            let i = idx as u64 + 1;
            let back = s.add_recip(i).map_err(|e| e.to_string())?;
            if &back != t_row.harmonic() {
                return Err(format!("S1 {i} is inconsistent with T 1"));
            }
        }
        let s_col = SFirstColumn::from_values(n, s_vals).map_err(|e| e.to_string())?;
        Ok(CheckpointRecord {
            n,
            t_row,
            s_col,
            hits,
        })
    }
}

fn parse_header(header: &str) -> std::result::Result<(u64, usize), String> {
    let parts: Vec<&str> = header.split(' ').collect();
    let [magic, version, n_field, k_field] = parts.as_slice() else {
        return Err(format!("malformed header {header:?}"));
    };
    if *magic != MAGIC {
        return Err(format!("not a checkpoint file (header {header:?})"));
    }
    let version: u32 = version
        .strip_prefix('v')
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("malformed version {version:?}"))?;
    if version != CHECKPOINT_VERSION {
        return Err(format!(
            "format version {version} is not supported (expected {CHECKPOINT_VERSION})"
        ));
    }
    let n = n_field
        .strip_prefix("n=")
        .and_then(|v| v.parse::<u64>().ok())
        .ok_or_else(|| format!("malformed n field {n_field:?}"))?;
    let k = k_field
        .strip_prefix("K=")
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| format!("malformed K field {k_field:?}"))?;
    if n < 2 {
        return Err(format!("checkpoint n={n} is below 2"));
    }
    Ok((n, k))
}

fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    s.parse().map_err(|_| format!("bad integer {s:?}"))
}

fn expect_index(s: &str, want: usize) -> std::result::Result<(), String> {
    match s.parse::<usize>() {
        Ok(v) if v == want => Ok(()),
        _ => Err(format!("expected index {want}, found {s:?}")),
    }
}

fn parse_value(s: &str) -> std::result::Result<ExactRational, String> {
    ExactRational::parse_canonical(s).map_err(|e| e.to_string())
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes the record atomically (temp file, then rename).
pub fn checkpoint_save(path: &Path, record: &CheckpointRecord) -> Result<()> {
    let tmp = temp_path(path);
    fs::write(&tmp, record.to_text()).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn checkpoint_load(path: &Path) -> Result<CheckpointRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CheckpointRecord::parse(&text).map_err(|reason| Error::Checkpoint {
        path: path.to_owned(),
        reason,
    })
}
