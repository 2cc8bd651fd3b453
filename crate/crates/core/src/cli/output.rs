//! CSV emission: fixed significant digits, atomic writes, plot scripts.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Scientific notation with `digits` significant digits; `-0` prints as `0`.
pub fn format_number(v: f64, digits: usize) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{:.*e}", digits.saturating_sub(1), v)
}

/// Rows of numbers under a header. Integer columns are given as `f64` and
/// printed without a fraction when flagged.
pub struct Table {
    pub header: Vec<&'static str>,
    pub integer_columns: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            integer_columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn with_integer_column(mut self, col: usize) -> Self {
        self.integer_columns.push(col);
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, digits: usize) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            let rec: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    if self.integer_columns.contains(&k) {
                        format!("{}", *v as i64)
                    } else {
                        format_number(*v, digits)
                    }
                })
                .collect();
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
    }
}

/// Write through a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Plot-script flavour for a CSV.
#[derive(Debug, Clone, Copy)]
pub enum PlotStyle {
    Impulses,
    Lines,
}

/// A gnuplot script plotting column `y` against column 1 of each CSV.
pub fn plot_script(title: &str, csvs: &[(String, String)], xlabel: &str, ylabel: &str, y: usize, style: PlotStyle) -> String {
    let with = match style {
        PlotStyle::Impulses => "impulses lw 3",
        PlotStyle::Lines => "lines lw 2",
    };
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"));
    s.push_str("set key outside\n");
    let parts: Vec<String> = csvs
        .iter()
        .map(|(file, label)| format!("'{file}' using 1:{y} skip 1 with {with} title '{label}'"))
        .collect();
    s.push_str("plot ");
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}
