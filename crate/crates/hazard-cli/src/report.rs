//! Machine-readable outputs: CSV tables with a fixed column order and JSON
//! mirrors. Every artifact embeds the master seed, a config hash and the
//! tool version; data rows are bit-reproducible, timing metadata lives in
//! comment lines only.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// FNV-1a over the canonical JSON encoding of a config.
pub fn config_hash(value: &impl Serialize) -> String {
    let text = serde_json::to_string(value).expect("config serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("fnv1a:{hash:016x}")
}

/// A CSV artifact: `#`-prefixed metadata lines, one header row and data
/// rows in a stable column order.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn metadata(&mut self, master_seed: u64, config_hash: &str) {
        self.comments
            .push(format!("hazard v{}", crate::experiment::TOOL_VERSION));
        self.comments.push(format!("config_hash: {config_hash}"));
        self.comments.push(format!("master_seed: {master_seed}"));
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.comments.push(format!("generated_unix: {now}"));
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for comment in &self.comments {
            out.push_str("# ");
            out.push_str(comment);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Header plus data rows, excluding comment lines; the reproducibility
    /// contract applies to exactly these bytes.
    pub fn data_rows(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.render().as_bytes())
    }
}

/// Shortest-round-trip float formatting (bit-faithful on reload).
pub fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text)?;
    Ok(())
}
