//! Row-ordered CSV tables with deterministic number formatting.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, Result};

/// Shortest round-trip decimal for ordinary magnitudes, scientific notation
/// otherwise, `nan`/`inf` for non-finite values.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if (1e-4..1e7).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// How a companion gnuplot script should scale the y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Number of leading coordinate columns (x first).
    pub key_columns: usize,
    pub y_scale: YScale,
}

impl Table {
    pub fn new(columns: Vec<String>, key_columns: usize, y_scale: YScale) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            key_columns,
            y_scale,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }

    /// A gnuplot script plotting every value column against the first column,
    /// one curve per combination of the remaining key columns.
    pub fn gnuplot_script(&self, data_path: &Path) -> String {
        let mut s = String::new();
        s.push_str("set datafile separator ','\nset key outside right\n");
        s.push_str(&format!("set xlabel '{}'\n", self.columns[0]));
        if self.y_scale == YScale::Log {
            s.push_str("set logscale y\nset format y '10^{%L}'\n");
        }
        let mut groups: Vec<Vec<String>> = Vec::new();
        for row in &self.rows {
            let key: Vec<String> = row[1..self.key_columns].iter().map(Cell::render).collect();
            if !groups.contains(&key) {
                groups.push(key);
            }
        }
        let data = data_path.display();
        let mut series = Vec::new();
        for i in self.key_columns..self.columns.len() {
            let name = &self.columns[i];
            if name == "flags" || name.ends_with("_ci") {
                continue;
            }
            for key in &groups {
                let cond: Vec<String> = key
                    .iter()
                    .enumerate()
                    .map(|(j, v)| format!("strcol({}) eq '{v}'", j + 2))
                    .collect();
                let label: Vec<String> = key
                    .iter()
                    .enumerate()
                    .map(|(j, v)| format!("{}={v}", self.columns[j + 1]))
                    .collect();
                let y = if cond.is_empty() {
                    format!("{}", i + 1)
                } else {
                    format!("({} ? ${} : 1/0)", cond.join(" && "), i + 1)
                };
                let title = std::iter::once(name.clone()).chain(label).collect::<Vec<_>>().join(" ");
                series.push(format!("'{data}' using 1:{y} skip 1 with lines title '{title}'"));
            }
        }
        s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
        s
    }
}

/// Writes `table` to `out` (stdout when `None`), plus `<out>.gp` if asked.
pub fn emit(table: &Table, out: Option<&Path>, gnuplot: bool) -> Result<()> {
    match out {
        None => {
            if gnuplot {
                return Err(CliError::invalid("gnuplot", "a companion script needs --out"));
            }
            let stdout = std::io::stdout();
            table.write_csv(stdout.lock()).map_err(|e| CliError::io("<stdout>", e))
        }
        Some(path) => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf).map_err(|e| CliError::io(path, e))?;
            fs::write(path, buf).map_err(|e| CliError::io(path, e))?;
            if gnuplot {
                let gp = path.with_extension("gp");
                fs::write(&gp, table.gnuplot_script(path)).map_err(|e| CliError::io(&gp, e))?;
            }
            Ok(())
        }
    }
}
