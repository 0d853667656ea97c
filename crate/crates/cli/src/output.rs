//! CSV tables: one `#` metadata line, a header row, then data rows.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`) so that they
//! parse back to the same `f64`.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// A table ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes `table` to any sink.
pub fn write_table<W: Write>(table: &Table, mut sink: W) -> std::io::Result<()> {
    let meta: Vec<String> = table
        .metadata
        .iter()
        .map(|(k, v)| format!("{k}={}", v.replace(['\n', '\r'], " ")))
        .collect();
    writeln!(sink, "# {}", meta.join("; "))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(sink);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_number(x)))?;
    }
    w.flush()
}

/// Writes `table` to `path`.
pub fn emit_csv(table: &Table, path: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    write_table(table, &mut buf).map_err(io)?;
    buf.flush().map_err(io)
}

/// Reads a table written by [`write_table`].
pub fn read_table(text: &str) -> Result<Table, CliError> {
    let bad = |msg: String| CliError::Config(format!("csv: {msg}"));
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let meta_line = first
        .trim_end_matches('\r')
        .strip_prefix("# ")
        .ok_or_else(|| bad("missing metadata line".into()))?;
    let metadata = meta_line
        .split("; ")
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
            (k.to_string(), v.to_string())
        })
        .collect();
    let mut r = csv::Reader::from_reader(rest.as_bytes());
    let columns = r
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| bad(format!("`{f}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table {
        metadata,
        columns,
        rows,
    })
}
