//! Result tables as CSV and markdown.

use std::io::{Read, Write};
use std::path::Path;

use mhfe::bounds::IndexSet;
use serde::{Deserialize, Serialize};

/// One table line; missing indices are empty CSV fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub t_sec: f64,
    pub minorant: f64,
    pub ieff_minorant: Option<f64>,
    pub majorant: f64,
    pub ieff_majorant: Option<f64>,
    pub ieff_ratio: f64,
    pub ieff_m1: Option<f64>,
}

impl TableRow {
    pub fn new(
        label: String,
        t_sec: f64,
        minorant: f64,
        majorant: f64,
        idx: &IndexSet<f64>,
    ) -> Self {
        Self {
            label,
            t_sec,
            minorant,
            ieff_minorant: idx.ieff_minorant,
            majorant,
            ieff_majorant: idx.ieff_majorant,
            ieff_ratio: idx.ieff_ratio,
            ieff_m1: idx.ieff_m1,
        }
    }
}

pub fn write_csv<W: Write>(w: W, rows: &[TableRow]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> csv::Result<Vec<TableRow>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r)
        .deserialize()
        .collect()
}

pub fn to_csv_string(rows: &[TableRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}"))
}

pub fn to_markdown(rows: &[TableRow]) -> String {
    let mut s =
        String::from("| grid | t_sec | J- | Ieff(J-) | J+ | Ieff(J+) | Ieff(J) | Ieff(M1) |\n");
    s.push_str("|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        s.push_str(&format!(
            "| {} | {:.2} | {:.2e} | {} | {:.2e} | {} | {:.2} | {} |\n",
            r.label,
            r.t_sec,
            r.minorant,
            opt(r.ieff_minorant),
            r.majorant,
            opt(r.ieff_majorant),
            r.ieff_ratio,
            opt(r.ieff_m1)
        ));
    }
    s
}

/// Writes `<path>` as CSV and the same path with extension `md` as markdown.
pub fn write_outputs(path: &Path, rows: &[TableRow]) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, to_csv_string(rows))?;
    std::fs::write(path.with_extension("md"), to_markdown(rows))
}
