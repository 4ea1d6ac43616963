//! CSV tables with a `#` metadata preamble.

use std::io::Write;

use crate::config::Config;
use crate::error::CliError;

/// Column names, rows of preformatted cells, and notes for the preamble.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Computed value, nine decimals. Non-finite values print as `inf`,
/// `-inf` or `nan`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let s = format!("{x:.9}");
        // avoid "-0.000000000"
        if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }
}

/// Input value, shortest exact representation.
pub fn exact(x: f64) -> String {
    if x.is_infinite() {
        num(x)
    } else {
        format!("{x}")
    }
}

/// Estimation time in ms for a sample count, exact when `f_s` is a whole
/// number of kHz.
pub fn tau_ms(samples: u64, f_s: f64) -> String {
    exact(samples as f64 * 1e3 / f_s)
}

/// Writes the preamble and the table.
pub fn write_table<W: Write>(mut w: W, title: &str, cfg: &Config, trials: Option<u64>, table: &Table) -> Result<(), CliError> {
    writeln!(w, "# underlay {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# {title}")?;
    writeln!(w, "# seed = {}", cfg.mc.seed)?;
    if let Some(n) = trials {
        writeln!(w, "# trials = {n}")?;
    }
    for n in &table.notes {
        writeln!(w, "# {n}")?;
    }
    writeln!(w, "# config:")?;
    for line in cfg.render().lines() {
        if line.is_empty() {
            writeln!(w, "#")?;
        } else {
            writeln!(w, "#   {line}")?;
        }
    }
    let mut csv = csv::Writer::from_writer(&mut w);
    csv.write_record(&table.header)?;
    for r in &table.rows {
        csv.write_record(r)?;
    }
    csv.flush()?;
    Ok(())
}
