//! Artifact emission: every run renders one artifact in table, CSV or JSON
//! form, always carrying its full run configuration so the output can be
//! reproduced byte for byte (modulo the timestamp, which --no-timestamp
//! removes).

use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Provenance header embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub workers: usize,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub params: serde_json::Value,
}

impl RunConfig {
    pub fn new(
        command: &str,
        seed: u64,
        workers: usize,
        format: Format,
        with_timestamp: bool,
        params: serde_json::Value,
    ) -> Self {
        let timestamp = with_timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        RunConfig {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            workers,
            format,
            timestamp,
            params,
        }
    }
}

/// One renderable result: a row table for table/CSV output and a JSON value
/// for machine consumption, plus free-form notes (caveats, check outcomes).
pub struct Artifact {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: serde_json::Value,
    pub notes: Vec<String>,
}

impl Artifact {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Artifact {
            title: title.to_string(),
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            json: serde_json::Value::Null,
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

pub struct Emitter {
    format: Format,
    out: Option<PathBuf>,
    config: RunConfig,
}

impl Emitter {
    pub fn new(format: Format, out: Option<PathBuf>, config: RunConfig) -> Self {
        Emitter {
            format,
            out,
            config,
        }
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn emit(&self, artifact: &Artifact) -> anyhow::Result<()> {
        let bytes = match self.format {
            Format::Table => self.render_table(artifact),
            Format::Csv => self.render_csv(artifact)?,
            Format::Json => self.render_json(artifact)?,
        };
        match &self.out {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }

    fn render_table(&self, a: &Artifact) -> Vec<u8> {
        let mut widths: Vec<usize> = a.headers.iter().map(|h| h.len()).collect();
        for row in &a.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut s = String::new();
        s.push_str(&format!(
            "{} (seed {}, v{})\n",
            a.title, self.config.seed, self.config.version
        ));
        let line = |cells: &[String], widths: &[usize]| -> String {
            cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{:<width$}", c, width = w))
                .collect::<Vec<_>>()
                .join("  ")
        };
        s.push_str(&line(&a.headers, &widths));
        s.push('\n');
        s.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        s.push('\n');
        for row in &a.rows {
            s.push_str(&line(row, &widths));
            s.push('\n');
        }
        for note in &a.notes {
            s.push_str(&format!("note: {note}\n"));
        }
        s.into_bytes()
    }

    fn render_csv(&self, a: &Artifact) -> anyhow::Result<Vec<u8>> {
        let mut buf = Vec::new();
        // provenance and notes ride along as comment lines; the table below
        // them is plain RFC 4180
        writeln!(
            buf,
            "# config: {}",
            serde_json::to_string(&self.config)?
        )?;
        for note in &a.notes {
            writeln!(buf, "# note: {note}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(buf);
        w.write_record(&a.headers)?;
        for row in &a.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner()?)
    }

    fn render_json(&self, a: &Artifact) -> anyhow::Result<Vec<u8>> {
        let doc = serde_json::json!({
            "config": self.config,
            "data": a.json,
            "notes": a.notes,
        });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// Format an f64 for table/CSV cells; keeps ±∞ readable.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.12e}")
}
