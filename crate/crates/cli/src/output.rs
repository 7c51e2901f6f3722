//! Table rendering: CSV with a leading `# config:` comment, or a JSON
//! document `{config, columns, records}` with one object per row.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{usage, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Num(_) => s.serialize_none(),
            Cell::Int(i) => s.serialize_u64(*i),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Nine significant digits in plain decimal notation; scientific notation
/// only for magnitudes outside `[1e-6, 1e15)`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if !(1e-6..1e15).contains(&mag) {
        return format!("{x:.8e}");
    }
    let exp = mag.log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn render_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_sig9(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(t) => t.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

pub fn render(table: &Table, format: Format, config: &impl Serialize) -> CliResult<String> {
    if table.rows.is_empty() {
        return Err(usage("nothing to write: empty result table"));
    }
    let config_json = serde_json::to_string(config).map_err(|e| CliError::Input(e.to_string()))?;
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record(&table.columns).map_err(|e| CliError::Input(e.to_string()))?;
            for row in &table.rows {
                w.write_record(row.iter().map(render_cell))
                    .map_err(|e| CliError::Input(e.to_string()))?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Input(e.to_string()))?)
                .expect("csv output is UTF-8");
            Ok(format!("# config: {config_json}\n{body}"))
        }
        Format::Json => {
            let doc = serde_json::json!({
                "config": serde_json::from_str::<serde_json::Value>(&config_json).expect("valid JSON"),
                "columns": table.columns,
                "records": table.rows.iter().map(|row| {
                    table.columns.iter().zip(row).map(|(c, v)| (c.to_string(), serde_json::json!(v))).collect::<serde_json::Map<_, _>>()
                }).collect::<Vec<_>>(),
            });
            Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
        }
    }
}

/// Write `table` to `path`, or to `stdout` when no path is given.
pub fn write_output(
    table: &Table,
    format: Format,
    config: &impl Serialize,
    path: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let text = render(table, format, config)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.05), "0.0500000000");
        assert_eq!(format_sig9(0.239026338369), "0.239026338");
        assert_eq!(format_sig9(12.5), "12.5000000");
        assert_eq!(format_sig9(51763412.7), "51763412.7");
        assert_eq!(format_sig9(-3.0), "-3.00000000");
        assert_eq!(format_sig9(1.5e-9), "1.50000000e-9");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["qber", "e_f_upper", "duality_gap"]);
        t.push(vec![Cell::Num(0.0), Cell::Num(0.0), Cell::Num(1e-10)]);
        let out = render(&t, Format::Csv, &serde_json::json!({"d": 4})).unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("# config: {\"d\":4}"));
        assert_eq!(lines.next(), Some("qber,e_f_upper,duality_gap"));
        assert_eq!(lines.next(), Some("0,0,1.00000000e-10"));
    }

    #[test]
    fn empty_table_rejected() {
        let t = Table::new(vec!["a"]);
        assert!(render(&t, Format::Json, &()).is_err());
    }
}
