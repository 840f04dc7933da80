//! CSV tables and the run manifest.
//!
//! Floats are written with 17 significant digits in `{:e}` notation, which
//! is locale independent and round-trips every `f64`. Missing values are
//! written as `NaN`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::observables::WavefunctionSlice;
use crate::sweep::SweepRecord;

pub const SWEEP_HEADER: &str = "g,g_over_gc,level,energy,e_pat1,e_pat2,e_pat3,photon,photon_pat1,photon_pat2,photon_pat3,sigmax,sigmax_pat1,sigmax_pat2,sigmax_pat3,d2e";
pub const PATTERNS_HEADER: &str = "g,g_over_gc,lambda1,lambda2,lambda3,u11,u12,u13,u21,u22,u23,u31,u32,u33,dlam1,dlam2,dlam3,d2lam1,d2lam2,d2lam3";
pub const WAVEFUNCTION_HEADER: &str = "g_over_gc,level,m,psi_up,w1_up,w2_up,w3_up,energy";

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(format_float).collect::<Vec<_>>().join(",")
}

/// One row per `(g, level)`. Returns the number of data rows.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], mut out: W) -> io::Result<usize> {
    writeln!(out, "{SWEEP_HEADER}")?;
    let mut rows = 0;
    for r in records {
        for l in &r.levels {
            let o = &l.observables;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                join([r.g, r.g_over_gc]),
                l.level,
                format_float(l.energy),
                join(o.pattern_energies),
                format_float(o.photon_total),
                join(o.photon_by_pattern),
                format_float(o.sigma_x_total),
                join(o.sigma_x_by_pattern),
                format_float(l.d2e.unwrap_or(f64::NAN)),
            )?;
            rows += 1;
        }
    }
    Ok(rows)
}

/// One row per `g` with the pattern basis and its derivatives.
pub fn write_patterns_csv<W: Write>(records: &[SweepRecord], mut out: W) -> io::Result<usize> {
    writeln!(out, "{PATTERNS_HEADER}")?;
    for r in records {
        let b = &r.basis;
        let (dl, d2l) = match &r.derivatives {
            Some(d) => (d.dlambda, d.d2lambda),
            None => ([f64::NAN; 3], [f64::NAN; 3]),
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            join([r.g, r.g_over_gc]),
            join(b.lambdas),
            join(b.rows.iter().flatten().copied()),
            join(dl),
            join(d2l),
        )?;
    }
    Ok(records.len())
}

/// Slices paired with the `g / g_c` they were requested at.
pub fn write_wavefunction_csv<W: Write>(slices: &[(f64, WavefunctionSlice)], mut out: W) -> io::Result<usize> {
    writeln!(out, "{WAVEFUNCTION_HEADER}")?;
    let mut rows = 0;
    for (ratio, s) in slices {
        for (m, psi) in s.amplitudes.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                format_float(*ratio),
                s.level,
                m,
                format_float(*psi),
                join(s.pattern_components.iter().map(|c| c[m])),
                format_float(s.energy),
            )?;
            rows += 1;
        }
    }
    Ok(rows)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub n_max: usize,
    pub timestamp: String,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, n_max: usize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            n_max,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            files: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> crate::Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Render a table in memory, write it to `dir/name` and register it in the
/// manifest.
pub fn emit<F>(manifest: &mut RunManifest, dir: &Path, name: &str, render: F) -> crate::Result<PathBuf>
where
    F: FnOnce(&mut Vec<u8>) -> io::Result<usize>,
{
    let mut buf = Vec::new();
    let rows = render(&mut buf)?;
    let path = dir.join(name);
    fs::write(&path, &buf)?;
    manifest.files.push(FileEntry {
        name: name.to_string(),
        sha256: sha256_hex(&buf),
        bytes: buf.len(),
        rows,
    });
    Ok(path)
}
