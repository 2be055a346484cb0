//! `results.csv`: one row per (channel, algorithm, Eb/N0, iteration).

use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use teq_core::mapdec::Algorithm;

pub use teq_core::sim::{write_csv, CSV_HEADER as HEADER};

/// A parsed CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub run_id: String,
    pub channel: String,
    pub algorithm: String,
    pub ebn0_db: f64,
    pub iteration: usize,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
}

/// Reads a results CSV; errors name the first offending line.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(h) => h.context("line 1: unreadable header")?,
        None => bail!("line 1: empty file"),
    };
    if header.iter().ne(HEADER.iter().copied()) {
        bail!("line 1: header must be {}", HEADER.join(","));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| anyhow!("malformed CSV: {e}"))?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push(parse_row(&rec).map_err(|e| anyhow!("line {line}: {e}"))?);
    }
    if rows.is_empty() {
        bail!("line 2: no data rows");
    }
    Ok(rows)
}

fn parse_row(rec: &csv::StringRecord) -> Result<Row> {
    if rec.len() != HEADER.len() {
        bail!("expected {} fields, found {}", HEADER.len(), rec.len());
    }
    let field = |i: usize| rec.get(i).expect("length checked").trim();
    let num = |i: usize| -> Result<f64> {
        let v: f64 = field(i)
            .parse()
            .map_err(|_| anyhow!("{} '{}' is not a number", HEADER[i], field(i)))?;
        if !v.is_finite() {
            bail!("{} is not finite", HEADER[i]);
        }
        Ok(v)
    };
    let int = |i: usize| -> Result<u64> {
        field(i)
            .parse()
            .map_err(|_| anyhow!("{} '{}' is not a non-negative integer", HEADER[i], field(i)))
    };
    let algorithm = field(2);
    algorithm
        .parse::<Algorithm>()
        .map_err(|e| anyhow!(e))?;
    let ber = num(8)?;
    if !(0.0..=1.0).contains(&ber) {
        bail!("ber {ber} outside [0, 1]");
    }
    let iteration = int(4)? as usize;
    if iteration == 0 {
        bail!("iteration must be 1-based");
    }
    Ok(Row {
        run_id: field(0).to_string(),
        channel: field(1).to_string(),
        algorithm: algorithm.to_string(),
        ebn0_db: num(3)?,
        iteration,
        frames: int(5)?,
        bits: int(6)?,
        bit_errors: int(7)?,
        ber,
    })
}
