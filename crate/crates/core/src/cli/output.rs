//! Tabular output: CSV, JSON and a minimal SVG line plot.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::RunConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    /// 17 significant digits, enough to round-trip any f64.
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

#[derive(Serialize)]
pub struct Metadata<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
}

#[derive(Clone, Copy, Debug)]
pub enum Plot {
    /// One polyline, `y` column against `x` column.
    Series { x: usize, y: usize },
    /// Threshold curves grouped by kappa, split at δ = 0.
    Boundary,
}

impl Plot {
    pub fn series(x: usize, y: usize) -> Self {
        Plot::Series { x, y }
    }

    pub fn boundary() -> Self {
        Plot::Boundary
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<Plot>,
}

impl Table {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<Cell>>) -> Self {
        Table { columns, rows, plot: None }
    }

    pub fn with_plot(mut self, plot: Plot) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].clone()).collect())
    }

    pub fn to_csv(&self, meta: &Metadata) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# {} {} {}", meta.tool, meta.version, meta.command).unwrap();
        writeln!(out, "# config: {}", serde_json::to_string(meta.config)?).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        Ok(out)
    }

    pub fn to_json(&self, meta: &Metadata) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), v.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "metadata": meta, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    fn polylines(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        match self.plot {
            None => Vec::new(),
            Some(Plot::Series { x, y }) => {
                let pts = self
                    .rows
                    .iter()
                    .filter_map(|r| Some((r[x].as_f64()?, r[y].as_f64()?)))
                    .filter(|(a, b)| a.is_finite() && b.is_finite())
                    .collect();
                vec![(self.columns[y].clone(), pts)]
            }
            Some(Plot::Boundary) => {
                let mut lines: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
                for r in &self.rows {
                    let (Some(k), Some(d), Some(c)) = (r[0].as_f64(), r[1].as_f64(), r[2].as_f64()) else {
                        continue;
                    };
                    let label = format!("kappa={k} {}", if d < 0.0 { "delta<0" } else { "delta>0" });
                    match lines.iter_mut().find(|(l, _)| *l == label) {
                        Some((_, pts)) => pts.push((d, c)),
                        None => lines.push((label, vec![(d, c)])),
                    }
                }
                lines
            }
        }
    }

    /// Fixed 640×400 viewport, axes scaled to the data.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 50.0;
        const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

        let lines = self.polylines();
        let all = lines.iter().flat_map(|(_, p)| p.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

        let mut s = String::new();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
        writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        )
        .unwrap();
        let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
            writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" font-size="11" text-anchor="{anchor}">{text}</text>"#).unwrap();
        };
        label(&mut s, PAD, H - PAD + 16.0, "start", format!("{x0:.4}"));
        label(&mut s, W - PAD, H - PAD + 16.0, "end", format!("{x1:.4}"));
        label(&mut s, PAD - 4.0, H - PAD, "end", format!("{y0:.4}"));
        label(&mut s, PAD - 4.0, PAD + 4.0, "end", format!("{y1:.4}"));
        for (i, (name, pts)) in lines.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{name}</title></polyline>"#,
                coords.join(" ")
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}
