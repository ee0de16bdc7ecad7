//! Deterministic artifact formatting and atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QRC_OUT_DIR";

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// CSV cell for an optional value; `None` becomes an empty cell.
pub fn fmt_cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Pretty JSON with lexicographically sorted object keys.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // serde_json::Value objects are BTreeMap-backed, so keys come out sorted.
    let v = serde_json::to_value(value).map_err(|e| CliError::Io(format!("serialize report: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(format!("serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// `--out` if given, else `$QRC_OUT_DIR/<default_name>`, else `./<default_name>`.
pub fn resolve_out(out: Option<&Path>, default_name: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            dir.join(default_name)
        }
    }
}

/// Writes to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let name = path.file_name().ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}
