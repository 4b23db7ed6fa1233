use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{MetricsSummary, ReportError, ResultRow};
use crate::config::Protocol;

pub const CSV_COLUMNS: [&str; 15] = [
    "protocol",
    "buffer_bytes",
    "seed",
    "created",
    "delivered",
    "relayed",
    "dropped_total",
    "dropped_overflow",
    "dropped_ttl",
    "aborted",
    "duplicates",
    "delivery_probability",
    "latency_avg_s",
    "overhead_ratio",
    "hopcount_avg",
];

const SIGNIFICANT: usize = 6;

/// `x` with `SIGNIFICANT` significant digits and no trailing zeros, in
/// plain notation for exponents -5..=15 and scientific otherwise.
pub fn format_float(x: f64) -> String {
    format_sig(x, SIGNIFICANT)
}

pub(super) fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("numeric exponent");
    if !(-5..=15).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let rounded: f64 = sci.parse().expect("formatted float parses");
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{rounded:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sorted(rows: &[ResultRow]) -> Vec<&ResultRow> {
    let mut out: Vec<&ResultRow> = rows.iter().collect();
    out.sort_by(|a, b| {
        a.protocol
            .as_str()
            .cmp(b.protocol.as_str())
            .then(a.buffer_bytes.cmp(&b.buffer_bytes))
            .then(a.seed.cmp(&b.seed))
    });
    out
}

/// Header plus one row per run, ordered by (protocol, buffer, seed).
pub fn write_csv_to<W: Write>(rows: &[ResultRow], w: W) -> Result<(), ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in sorted(rows) {
        let m = &r.metrics;
        out.write_record([
            r.protocol.as_str().to_string(),
            r.buffer_bytes.to_string(),
            r.seed.to_string(),
            m.created.to_string(),
            m.delivered.to_string(),
            m.relayed.to_string(),
            m.dropped.to_string(),
            m.dropped_overflow.to_string(),
            m.dropped_ttl.to_string(),
            m.aborted.to_string(),
            m.duplicates.to_string(),
            format_float(m.delivery_probability),
            format_float(m.latency_avg),
            format_float(m.overhead_ratio),
            format_float(m.hopcount_avg),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<(), ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    write_csv_to(rows, File::create(path)?)
}

/// Parse a results table. Columns may come in any order; extra columns
/// are ignored. Oversize drops are not stored, so they read back as
/// `dropped_total - dropped_overflow - dropped_ttl`.
pub fn read_csv_from<R: Read>(r: R) -> Result<Vec<ResultRow>, ReportError> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers()?.clone();
    let mut index = [0usize; CSV_COLUMNS.len()];
    for (slot, name) in index.iter_mut().zip(CSV_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| ReportError::MissingColumn(name.to_string()))?;
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let row = n + 1;
        let field = |k: usize| record.get(index[k]).unwrap_or("").trim();
        let bad = |k: usize| ReportError::BadValue {
            row,
            column: CSV_COLUMNS[k].to_string(),
            value: field(k).to_string(),
        };
        let int = |k: usize| field(k).parse::<u64>().map_err(|_| bad(k));
        let float = |k: usize| field(k).parse::<f64>().map_err(|_| bad(k));
        let protocol: Protocol = field(0).parse().map_err(|_| bad(0))?;
        let dropped = int(6)?;
        let dropped_overflow = int(7)?;
        let dropped_ttl = int(8)?;
        rows.push(ResultRow {
            protocol,
            buffer_bytes: int(1)?,
            seed: int(2)?,
            metrics: MetricsSummary {
                created: int(3)?,
                delivered: int(4)?,
                relayed: int(5)?,
                dropped,
                dropped_overflow,
                dropped_ttl,
                dropped_oversize: dropped.saturating_sub(dropped_overflow + dropped_ttl),
                aborted: int(9)?,
                duplicates: int(10)?,
                delivery_probability: float(11)?,
                latency_avg: float(12)?,
                overhead_ratio: float(13)?,
                hopcount_avg: float(14)?,
            },
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, ReportError> {
    read_csv_from(File::open(path)?)
}
