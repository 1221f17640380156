//! Cloud CSV format and JSON report persistence.
//!
//! Clouds serialize as one point per row, n decimal columns, preceded by the
//! header line `# dim=<n> resolution=<h> label=<text>`. Floats use Rust's
//! shortest round-trip formatting, so write/read/write is byte-stable.

use crate::geometry::PointCloud;
use crate::{input_error, Error, Result};
use std::fmt::Write as _;
use std::path::Path;

pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# dim={} resolution={} label={}",
        cloud.dim(),
        cloud.resolution(),
        cloud.label()
    );
    for p in cloud.iter_points() {
        let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn cloud_from_csv(text: &str) -> Result<PointCloud> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| input_error!("empty cloud file"))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '# dim=... resolution=... label=...' header".into()))?
        .trim();
    let dim_tok = header
        .split_whitespace()
        .find_map(|t| t.strip_prefix("dim="))
        .ok_or_else(|| Error::Parse("header missing dim=".into()))?;
    let res_tok = header
        .split_whitespace()
        .find_map(|t| t.strip_prefix("resolution="))
        .ok_or_else(|| Error::Parse("header missing resolution=".into()))?;
    let label = header
        .split_once("label=")
        .map(|(_, l)| l.to_string())
        .unwrap_or_default();
    let dim: usize = dim_tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad dim value {dim_tok}")))?;
    let resolution: f64 = res_tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad resolution value {res_tok}")))?;

    let mut coords = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = 0usize;
        for tok in line.split(',') {
            let x: f64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad float {tok}", lineno + 2)))?;
            coords.push(x);
            fields += 1;
        }
        if fields != dim {
            return Err(Error::Parse(format!(
                "line {}: expected {dim} columns, got {fields}",
                lineno + 2
            )));
        }
    }
    PointCloud::from_flat(coords, dim, resolution, label)
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    std::fs::write(path, cloud_to_csv(cloud))?;
    Ok(())
}

pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path)?;
    cloud_from_csv(&text)
}

/// Pretty JSON with a trailing newline; used for every report artifact.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
