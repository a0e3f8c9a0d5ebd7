//! Deterministic artifact writers: CSV tables, JSON summaries and the run
//! manifest.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::Error;

/// Fixed-precision scientific notation so identical runs are byte-identical.
pub fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

/// Write a CSV with a `name_unit` header row and numeric rows.
pub fn write_csv(path: &Path, headers: &[&str], rows: &[Vec<f64>]) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(headers).map_err(csv_err)?;
    for row in rows {
        debug_assert_eq!(row.len(), headers.len());
        w.write_record(row.iter().map(|&x| fmt(x))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let resolved = crate::config::to_toml(config);
    let digest = Sha256::digest(resolved.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// The manifest makes every published number reproducible: the resolved
/// config (defaults filled), its hash, the tool version and the wall time.
pub fn write_manifest(
    out_dir: &Path,
    config: &ExperimentConfig,
    outputs: &[String],
    wall_time_s: f64,
) -> Result<(), Error> {
    let manifest = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config-sha256": config_hash(config),
        "resolved-config": serde_json::to_value(config)?,
        "outputs": outputs,
        "wall-time-s": wall_time_s,
    });
    write_json(&out_dir.join("manifest.json"), &manifest)
}
