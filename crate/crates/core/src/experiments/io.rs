//! CSV persistence. Files open with `#` comment lines describing the run,
//! then a header row, then one line per [`MetricsRow`].

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::metrics::{MetricsRow, CSV_COLUMNS};

/// Format with 9 significant digits, printed in the shortest form that
/// reads back to the same rounded value.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("valid float");
    format!("{rounded}")
}

fn opt(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

pub fn write_rows<W: Write>(out: &mut W, comments: &[String], rows: &[MetricsRow]) -> Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.preset.clone(),
            sig9(r.kappa),
            r.policy.clone(),
            r.ack_mode.clone(),
            sig9(r.t_sw),
            opt(r.se_target),
            r.n_tr.to_string(),
            r.n_ac.to_string(),
            r.trials.to_string(),
            opt(r.p_access_mean),
            opt(r.p_access_ci95),
            opt(r.throughput_mean),
            opt(r.throughput_ci95),
            opt(r.se_mean),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, comments: &[String], rows: &[MetricsRow]) -> Result<()> {
    let mut f = File::create(path)?;
    write_rows(&mut f, comments, rows)
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::Config(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    read_rows(BufReader::new(File::open(path)?))
}
