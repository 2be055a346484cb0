//! CSV rendering of sweep results.

use std::io::{self, Write};

use super::BerRecord;

pub const CSV_HEADER: [&str; 9] = [
    "run_id",
    "channel",
    "algorithm",
    "ebn0_db",
    "iteration",
    "frames",
    "bits",
    "bit_errors",
    "ber",
];

/// Ten significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.9e}")
}

/// Writes the header and one row per record, `\n`-terminated.
pub fn write_csv<W: Write>(out: W, run_id: &str, records: &[BerRecord]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            run_id.to_string(),
            r.channel.clone(),
            r.algorithm.name().to_string(),
            fmt_float(r.ebn0_db),
            r.iteration.to_string(),
            r.frames.to_string(),
            r.info_bits_counted.to_string(),
            r.bit_errors.to_string(),
            fmt_float(r.ber),
        ])?;
    }
    w.flush()
}
