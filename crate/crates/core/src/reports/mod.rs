//! Metrics from event logs, CSV result tables and SVG bar charts.

mod chart;
mod table;

use std::collections::HashMap;

use thiserror::Error;

use crate::config::Protocol;
use crate::engine::{Detail, DropReason, EventKind, EventLog};

pub use chart::{aggregate_median, render_bar_chart, ChartMetric, CHART_METRICS};
pub use table::{format_float, read_csv, read_csv_from, write_csv, write_csv_to, CSV_COLUMNS};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no result rows")]
    Empty,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: bad value `{value}` in column `{column}`")]
    BadValue { row: usize, column: String, value: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsSummary {
    pub created: u64,
    /// First arrivals at the destination.
    pub delivered: u64,
    /// Every completed transfer, including deliveries and duplicates.
    pub relayed: u64,
    /// Dropped copies, all reasons.
    pub dropped: u64,
    pub dropped_overflow: u64,
    pub dropped_ttl: u64,
    pub dropped_oversize: u64,
    pub aborted: u64,
    pub duplicates: u64,
    pub delivery_probability: f64,
    /// seconds; NaN without deliveries
    pub latency_avg: f64,
    /// `(relayed - delivered) / delivered`; NaN without deliveries
    pub overhead_ratio: f64,
    /// NaN without deliveries
    pub hopcount_avg: f64,
}

impl MetricsSummary {
    /// Derive the ratios from the counters plus summed latency and hops of
    /// first deliveries.
    pub fn from_counts(mut self, latency_sum: f64, hop_sum: u64) -> MetricsSummary {
        self.delivery_probability = if self.created == 0 {
            0.0
        } else {
            self.delivered as f64 / self.created as f64
        };
        if self.delivered == 0 {
            self.latency_avg = f64::NAN;
            self.overhead_ratio = f64::NAN;
            self.hopcount_avg = f64::NAN;
        } else {
            let d = self.delivered as f64;
            self.latency_avg = latency_sum / d;
            self.overhead_ratio = (self.relayed as f64 - d) / d;
            self.hopcount_avg = hop_sum as f64 / d;
        }
        self
    }
}

pub fn compute_metrics(log: &EventLog) -> MetricsSummary {
    let mut m = MetricsSummary::default();
    let mut created_at = HashMap::new();
    let mut latency_sum = 0.0;
    let mut hop_sum = 0u64;
    for e in log.events() {
        match e.kind {
            EventKind::Created => {
                m.created += 1;
                if let Some(id) = e.msg {
                    created_at.insert(id, e.time);
                }
            }
            EventKind::Delivered => {
                m.delivered += 1;
                m.relayed += 1;
                let born = e.msg.and_then(|id| created_at.get(&id)).copied().unwrap_or(e.time);
                latency_sum += e.time - born;
                hop_sum += u64::from(e.hops.unwrap_or(0));
            }
            EventKind::Duplicate => {
                m.duplicates += 1;
                m.relayed += 1;
            }
            EventKind::Relayed => m.relayed += 1,
            EventKind::Aborted => m.aborted += 1,
            EventKind::Dropped => {
                m.dropped += 1;
                match e.detail {
                    Detail::Drop(DropReason::BufferOverflow) => m.dropped_overflow += 1,
                    Detail::Drop(DropReason::TtlExpiry) => m.dropped_ttl += 1,
                    Detail::Drop(DropReason::Oversize) => m.dropped_oversize += 1,
                    _ => {}
                }
            }
            EventKind::ContactUp | EventKind::ContactDown => {}
        }
    }
    debug_assert!(m.delivered <= m.created);
    m.from_counts(latency_sum, hop_sum)
}

/// One run's outcome, as stored in the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub protocol: Protocol,
    pub buffer_bytes: u64,
    pub seed: u64,
    pub metrics: MetricsSummary,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{AbortReason, Event};
    use crate::net::MessageId;

    fn ev(time: f64, kind: EventKind, msg: u64, hops: Option<u32>, detail: Detail) -> Event {
        let mut e = Event::new(time, kind);
        e.msg = Some(MessageId(msg));
        e.hops = hops;
        e.detail = detail;
        e
    }

    #[test]
    fn hand_written_log() {
        let mut log = EventLog::new(vec![]);
        let drop = |r| Detail::Drop(r);
        for e in [
            ev(0.0, EventKind::Created, 1, Some(0), Detail::None),
            ev(10.0, EventKind::Created, 2, Some(0), Detail::None),
            ev(20.0, EventKind::Relayed, 1, Some(1), Detail::None),
            ev(30.0, EventKind::Delivered, 1, Some(2), Detail::None),
            ev(35.0, EventKind::Relayed, 2, Some(1), Detail::None),
            ev(40.0, EventKind::Duplicate, 1, Some(1), Detail::None),
            ev(50.0, EventKind::Dropped, 2, None, drop(DropReason::BufferOverflow)),
            ev(60.0, EventKind::Aborted, 2, None, Detail::Abort(AbortReason::ContactDown)),
            ev(70.0, EventKind::Delivered, 2, Some(3), Detail::None),
            ev(80.0, EventKind::Dropped, 1, None, drop(DropReason::TtlExpiry)),
        ] {
            log.push(e);
        }
        let m = compute_metrics(&log);
        assert_eq!((m.created, m.delivered, m.relayed), (2, 2, 5));
        assert_eq!((m.dropped, m.dropped_overflow, m.dropped_ttl), (2, 1, 1));
        assert_eq!((m.aborted, m.duplicates), (1, 1));
        assert_eq!(m.delivery_probability, 1.0);
        // (30 - 0 + 70 - 10) / 2
        assert_eq!(m.latency_avg, 45.0);
        assert_eq!(m.overhead_ratio, 1.5);
        assert_eq!(m.hopcount_avg, 2.5);
    }

    #[test]
    fn formula_examples() {
        let m = MetricsSummary {
            created: 200,
            delivered: 50,
            ..Default::default()
        }
        .from_counts(0.0, 0);
        assert_eq!(m.delivery_probability, 0.25);

        let m = MetricsSummary {
            created: 400,
            delivered: 100,
            relayed: 1_000,
            ..Default::default()
        }
        .from_counts(0.0, 0);
        assert_eq!(m.overhead_ratio, 9.0);
    }

    #[test]
    fn no_deliveries_gives_nan() {
        let m = MetricsSummary {
            created: 3,
            relayed: 4,
            ..Default::default()
        }
        .from_counts(0.0, 0);
        assert_eq!(m.delivery_probability, 0.0);
        assert!(m.overhead_ratio.is_nan());
        assert!(m.latency_avg.is_nan());
        assert!(m.hopcount_avg.is_nan());
        let empty = compute_metrics(&EventLog::default());
        assert_eq!(empty.delivery_probability, 0.0);
    }
}
