//! CSV encoding of scenario records: fixed column order, 12 significant digits.

use std::io::{Read, Write};

use super::ScenarioRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 12] = [
    "scenario_id",
    "gamma",
    "lambda",
    "f_realistic",
    "f_afy_best",
    "f_afy_worst",
    "f_afy_mean",
    "f_stp",
    "rel_gain_mean",
    "rel_gain_best",
    "rel_gain_worst",
    "seed",
];

const SIGNIFICANT: i32 = 12;

/// Fixed-point rendering with 12 significant digits.
pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".to_string() } else { x.to_string() };
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = |e: i32| (SIGNIFICANT - 1 - e).max(0) as usize;
    let s = format!("{:.*}", decimals(exponent), x);
    // rounding can carry into the next power of ten (9.99… -> 10.0…)
    let rounded: f64 = s.parse().expect("formatted float parses");
    if rounded != 0.0 && rounded.abs().log10().floor() as i32 > exponent {
        return format!("{:.*}", decimals(exponent + 1), x);
    }
    s
}

fn row(r: &ScenarioRecord) -> [String; 12] {
    [
        r.scenario_id.to_string(),
        format_float(r.gamma),
        format_float(r.lambda),
        format_float(r.f_realistic),
        format_float(r.f_afy_best),
        format_float(r.f_afy_worst),
        format_float(r.f_afy_mean),
        format_float(r.f_stp),
        format_float(r.rel_gain_mean),
        format_float(r.rel_gain_best),
        format_float(r.rel_gain_worst),
        r.seed.to_string(),
    ]
}

pub fn write_records<W: Write>(out: W, records: &[ScenarioRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush().map_err(|e| Error::Parse(format!("writing CSV: {e}")))?;
    Ok(())
}

pub fn records_to_csv(records: &[ScenarioRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ScenarioRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("unexpected CSV header: {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn parse_csv(text: &str) -> Result<Vec<ScenarioRecord>> {
    read_records(text.as_bytes())
}
