//! CSV and JSON emission with atomic writes (temp file + rename).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hotgate_core::optimizer::InfidelityCurve;

use crate::config::RunRecord;

/// Serialize the curve as CSV. Floats use the shortest round-trip
/// representation, so identical runs produce identical bytes.
pub fn curve_to_csv(curve: &InfidelityCurve<f64>) -> String {
    let mut out = String::new();
    out.push_str("delta_t,infidelity_trivial,infidelity_optimized,encoding_a,encoding_b\n");
    for (point, trivial) in curve.points.iter().zip(&curve.trivial_fidelity) {
        let join = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            point.delta_t,
            1.0 - trivial,
            1.0 - point.fidelity,
            join(point.a.entries()),
            join(point.b.entries()),
        );
    }
    out
}

pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

pub fn csv_path(dir: &str, name: &str) -> PathBuf {
    Path::new(dir).join(format!("{name}.csv"))
}

pub fn json_path(dir: &str, name: &str) -> PathBuf {
    Path::new(dir).join(format!("{name}.json"))
}

pub fn write_record(path: &Path, record: &RunRecord) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(record).expect("record serializes");
    write_atomic(path, &json)
}
