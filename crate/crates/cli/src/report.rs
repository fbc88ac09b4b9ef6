//! Key/value reports rendered as aligned tables or CSV.

use dyncong::rational::{decimal, show, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone)]
pub enum Value {
    Num(Q),
    Text(String),
}

#[derive(Debug, Default)]
pub struct Report {
    rows: Vec<(String, Value)>,
}

impl Report {
    pub fn num(&mut self, key: impl Into<String>, v: Q) {
        self.rows.push((key.into(), Value::Num(v)));
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl ToString) {
        self.rows.push((key.into(), Value::Text(v.to_string())));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => {
                let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let mut s = String::new();
                for (k, v) in &self.rows {
                    let v = match v {
                        Value::Num(x) => show(*x),
                        Value::Text(t) => t.clone(),
                    };
                    s.push_str(&format!("{k:<width$}  {v}\n"));
                }
                s
            }
            Format::Csv => {
                let mut s = String::from("key,value,rational\n");
                for (k, v) in &self.rows {
                    match v {
                        Value::Num(x) => s.push_str(&format!("{},{},{}\n", csv(k), decimal(*x), x)),
                        Value::Text(t) => s.push_str(&format!("{},{},\n", csv(k), csv(t))),
                    }
                }
                s
            }
        }
    }
}

/// Rows of equal width, either space-aligned or comma-separated.
pub fn grid(header: &[&str], rows: &[Vec<String>], format: Format) -> String {
    let mut all: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    all.extend(rows.iter().cloned());
    match format {
        Format::Csv => all.iter().map(|r| r.iter().map(|c| csv(c)).collect::<Vec<_>>().join(",") + "\n").collect(),
        Format::Table => {
            let widths: Vec<usize> =
                (0..header.len()).map(|i| all.iter().map(|r| r[i].len()).max().unwrap_or(0)).collect();
            all.iter()
                .map(|r| {
                    let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    cells.join("  ").trim_end().to_string() + "\n"
                })
                .collect()
        }
    }
}

fn csv(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
