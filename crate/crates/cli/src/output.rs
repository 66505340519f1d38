//! Per-trial record files and summary files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;

/// Records as CSV (header + one row per trial) or as a JSON array with the
/// same fields, one object per line.
pub fn render_records<R: Serialize>(records: &[R], format: Format) -> std::io::Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r).map_err(std::io::Error::other)?;
            }
            w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))
        }
        Format::Json => {
            let mut buf = b"[\n".to_vec();
            for (i, r) in records.iter().enumerate() {
                serde_json::to_writer(&mut buf, r)?;
                buf.extend_from_slice(if i + 1 < records.len() { b",\n" } else { b"\n" });
            }
            buf.extend_from_slice(b"]\n");
            Ok(buf)
        }
    }
}

/// `<out>.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    f.flush()
}
