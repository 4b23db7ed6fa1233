//! Grouped bar charts as standalone SVG: one bar group per buffer size,
//! one bar per protocol, seeds reduced to their median.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use super::table::format_sig;
use super::{MetricsSummary, ReportError, ResultRow};
use crate::config::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartMetric {
    DeliveryProbability,
    LatencyAvg,
    OverheadRatio,
    HopcountAvg,
    Dropped,
}

pub const CHART_METRICS: [ChartMetric; 5] = [
    ChartMetric::DeliveryProbability,
    ChartMetric::LatencyAvg,
    ChartMetric::OverheadRatio,
    ChartMetric::HopcountAvg,
    ChartMetric::Dropped,
];

impl ChartMetric {
    pub fn name(self) -> &'static str {
        match self {
            ChartMetric::DeliveryProbability => "delivery_probability",
            ChartMetric::LatencyAvg => "latency_avg",
            ChartMetric::OverheadRatio => "overhead_ratio",
            ChartMetric::HopcountAvg => "hopcount_avg",
            ChartMetric::Dropped => "dropped",
        }
    }

    fn title(self) -> &'static str {
        match self {
            ChartMetric::DeliveryProbability => "Delivery probability",
            ChartMetric::LatencyAvg => "Average latency (s)",
            ChartMetric::OverheadRatio => "Overhead ratio",
            ChartMetric::HopcountAvg => "Average hop count",
            ChartMetric::Dropped => "Dropped messages",
        }
    }

    pub fn value(self, m: &MetricsSummary) -> f64 {
        match self {
            ChartMetric::DeliveryProbability => m.delivery_probability,
            ChartMetric::LatencyAvg => m.latency_avg,
            ChartMetric::OverheadRatio => m.overhead_ratio,
            ChartMetric::HopcountAvg => m.hopcount_avg,
            ChartMetric::Dropped => m.dropped as f64,
        }
    }
}

impl FromStr for ChartMetric {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "delivery_probability" => ChartMetric::DeliveryProbability,
            "latency_avg" | "latency_avg_s" => ChartMetric::LatencyAvg,
            "overhead_ratio" => ChartMetric::OverheadRatio,
            "hopcount_avg" => ChartMetric::HopcountAvg,
            "dropped" | "dropped_total" => ChartMetric::Dropped,
            other => return Err(ReportError::UnknownMetric(other.to_string())),
        })
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    values.retain(|v| !v.is_nan());
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Median over seeds per (buffer, protocol), ordered by buffer then
/// protocol name. NaN values are skipped; all-NaN groups stay NaN.
pub fn aggregate_median(rows: &[ResultRow], metric: ChartMetric) -> Vec<(u64, Protocol, f64)> {
    let mut groups: BTreeMap<(u64, &'static str), (Protocol, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.buffer_bytes, r.protocol.as_str()))
            .or_insert_with(|| (r.protocol, Vec::new()))
            .1
            .push(metric.value(&r.metrics));
    }
    groups
        .into_iter()
        .map(|((buffer, _), (protocol, values))| (buffer, protocol, median(values)))
        .collect()
}

fn buffer_label(bytes: u64) -> String {
    if bytes >= 1_000_000 && bytes.is_multiple_of(1_000_000) {
        format!("{}M", bytes / 1_000_000)
    } else if bytes >= 1_000 && bytes.is_multiple_of(1_000) {
        format!("{}k", bytes / 1_000)
    } else {
        bytes.to_string()
    }
}

fn color(protocol: Protocol) -> &'static str {
    match protocol {
        Protocol::Epidemic => "#c0392b",
        Protocol::SprayAndWait => "#2471a3",
    }
}

/// Round `x` up to 1, 2, 2.5 or 5 times a power of ten.
fn nice_ceiling(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    let p = 10f64.powf(x.log10().floor());
    for f in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if f * p >= x * (1.0 - 1e-12) {
            return f * p;
        }
    }
    10.0 * p
}

enum Scale {
    Linear { max: f64 },
    Log { lo: i32, hi: i32 },
}

impl Scale {
    fn choose(values: &[f64]) -> Scale {
        let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0 && v.is_finite()).collect();
        let max = positive.iter().copied().fold(0.0, f64::max);
        let min = positive.iter().copied().fold(f64::INFINITY, f64::min);
        if !positive.is_empty() && max / min > 1000.0 {
            let lo = min.log10().floor() as i32;
            let hi = (max.log10().ceil() as i32).max(lo + 1);
            Scale::Log { lo, hi }
        } else {
            Scale::Linear { max: nice_ceiling(max) }
        }
    }

    /// Fraction of the plot height for value `v`.
    fn frac(&self, v: f64) -> f64 {
        match *self {
            Scale::Linear { max } => (v / max).clamp(0.0, 1.0),
            Scale::Log { lo, hi } => {
                if v <= 0.0 {
                    0.0
                } else {
                    ((v.log10() - lo as f64) / (hi - lo) as f64).clamp(0.0, 1.0)
                }
            }
        }
    }

    fn ticks(&self) -> Vec<f64> {
        match *self {
            Scale::Linear { max } => (0..=5).map(|k| max * k as f64 / 5.0).collect(),
            Scale::Log { lo, hi } => (lo..=hi).map(|e| 10f64.powi(e)).collect(),
        }
    }
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

/// Render `metric` (a name such as `delivery_probability` or `dropped`)
/// for the given runs. Output depends only on the input rows.
pub fn render_bar_chart(metric: &str, rows: &[ResultRow]) -> Result<String, ReportError> {
    let metric: ChartMetric = metric.parse()?;
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let bars = aggregate_median(rows, metric);
    let buffers: Vec<u64> = bars.iter().map(|b| b.0).collect::<BTreeSet<_>>().into_iter().collect();
    let protocols: Vec<Protocol> = {
        let mut p: Vec<Protocol> = bars.iter().map(|b| b.1).collect();
        p.sort_by_key(|x| x.as_str());
        p.dedup();
        p
    };
    let values: Vec<f64> = bars.iter().map(|b| b.2).collect();
    let scale = Scale::choose(&values);
    let log = matches!(scale, Scale::Log { .. });

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = TOP + plot_h;
    let group_w = plot_w / buffers.len() as f64;
    let bar_w = group_w * 0.7 / protocols.len() as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + plot_w / 2.0,
        metric.title()
    );

    for t in scale.ticks() {
        let y = base - scale.frac(t) * plot_h;
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>
<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            format_sig(t, 4)
        );
    }

    for (gi, buffer) in buffers.iter().enumerate() {
        let gx = LEFT + gi as f64 * group_w;
        let start = gx + group_w * 0.15;
        for (pi, protocol) in protocols.iter().enumerate() {
            let Some(&(_, _, v)) = bars.iter().find(|b| b.0 == *buffer && b.1 == *protocol) else {
                continue;
            };
            let x = start + pi as f64 * bar_w;
            let h = if v.is_nan() { 0.0 } else { scale.frac(v) * plot_h };
            let label = if v.is_nan() { "n/a".to_string() } else { format_sig(v, 4) };
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="{}"/>
<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{label}</text>"#,
                base - h,
                bar_w * 0.95,
                color(*protocol),
                x + bar_w * 0.475,
                base - h - 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            gx + group_w / 2.0,
            base + 18.0,
            buffer_label(*buffer)
        );
    }

    let y_label = if log {
        format!("{} (log scale)", metric.title())
    } else {
        metric.title().to_string()
    };
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{base}" stroke="black"/>
<line x1="{LEFT}" y1="{base}" x2="{:.2}" y2="{base}" stroke="black"/>
<text x="{:.2}" y="{:.2}" text-anchor="middle">Buffer size (bytes)</text>
<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{y_label}</text>"#,
        LEFT + plot_w,
        LEFT + plot_w / 2.0,
        base + 45.0,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let lx = LEFT + plot_w + 20.0;
    for (pi, protocol) in protocols.iter().enumerate() {
        let ly = TOP + 10.0 + pi as f64 * 22.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="{ly:.2}" width="14" height="14" fill="{}"/>
<text x="{:.2}" y="{:.2}">{}</text>"#,
            color(*protocol),
            lx + 20.0,
            ly + 11.0,
            protocol.as_str()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(protocol: Protocol, buffer: u64, seed: u64, delivery: f64, dropped: u64) -> ResultRow {
        ResultRow {
            protocol,
            buffer_bytes: buffer,
            seed,
            metrics: MetricsSummary {
                delivery_probability: delivery,
                dropped,
                ..Default::default()
            },
        }
    }

    fn sweep() -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for (k, b) in [5, 10, 15, 20].into_iter().enumerate() {
            let buffer = b * 1_000_000;
            rows.push(row(Protocol::Epidemic, buffer, 1, 0.2 + 0.05 * k as f64, 1_200_000));
            rows.push(row(Protocol::SprayAndWait, buffer, 1, 0.6, 1_000 + 1_000 * k as u64));
        }
        rows
    }

    #[test]
    fn one_bar_per_protocol_and_buffer() {
        let svg = render_bar_chart("delivery_probability", &sweep()).unwrap();
        let bars = svg.matches("<rect").count() - 1 - 2; // background, legend
        assert_eq!(bars, 8);
        assert!(svg.contains("20M"));
        assert!(svg.contains("spray-and-wait"));
        assert!(!svg.contains("log scale"));
    }

    #[test]
    fn wide_range_switches_to_log_scale() {
        let svg = render_bar_chart("dropped", &sweep()).unwrap();
        assert!(svg.contains("(log scale)"));
    }

    #[test]
    fn output_is_deterministic() {
        let a = render_bar_chart("dropped", &sweep()).unwrap();
        let b = render_bar_chart("dropped", &sweep()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_metric_rejected() {
        assert!(matches!(
            render_bar_chart("throughput", &sweep()),
            Err(ReportError::UnknownMetric(_))
        ));
    }

    #[test]
    fn median_over_seeds() {
        let rows = vec![
            row(Protocol::Epidemic, 5, 1, 0.1, 0),
            row(Protocol::Epidemic, 5, 2, 0.9, 0),
            row(Protocol::Epidemic, 5, 3, 0.3, 0),
            row(Protocol::Epidemic, 5, 4, f64::NAN, 0),
        ];
        let agg = aggregate_median(&rows, ChartMetric::DeliveryProbability);
        assert_eq!(agg, vec![(5, Protocol::Epidemic, 0.3)]);
        assert_eq!(median(vec![1.0, 4.0]), 2.5);
        assert!(median(vec![f64::NAN]).is_nan());
    }

    #[test]
    fn nice_ceilings() {
        assert_eq!(nice_ceiling(0.62), 1.0);
        assert_eq!(nice_ceiling(4253.0), 5000.0);
        assert_eq!(nice_ceiling(2.2), 2.5);
        assert_eq!(nice_ceiling(0.0), 1.0);
    }
}
