//! Human-readable and JSON renderings of selection ladders and
//! cross-sensor evaluation tables.

use crate::classify::{CrossSensorReport, SelectionReport};
use crate::features::FEATURE_NAMES;

/// Formats a percentage with round-half-away-from-zero at `precision`
/// decimals (so 6.555… prints as 6.56, not banker's 6.55).
pub fn format_percent(value: f64, precision: usize) -> String {
    let scale = 10f64.powi(precision as i32);
    let rounded = if value >= 0.0 {
        (value * scale + 0.5).floor() / scale
    } else {
        (value * scale - 0.5).ceil() / scale
    };
    format!("{rounded:.precision$}")
}

/// Renders the selection ladder: one row per cardinality marking the chosen
/// features, then the overall optimum.
pub fn render_selection_text(report: &SelectionReport, precision: usize) -> String {
    let mut out = String::new();
    out.push_str(" #  ");
    for name in FEATURE_NAMES {
        out.push_str(&format!("{name:>7}"));
    }
    out.push_str("      ACE\n");
    for score in &report.per_cardinality {
        out.push_str(&format!("{:>2}  ", score.subset.cardinality()));
        for i in 0..10 {
            let mark = if score.subset.contains(i) { "x" } else { "" };
            out.push_str(&format!("{mark:>7}"));
        }
        out.push_str(&format!(
            "  {:>7}\n",
            format_percent(score.result.ace, precision)
        ));
    }
    out.push_str(&format!(
        "optimal {} ({})  ACE {}\n",
        report.best.subset,
        report.best.subset.names().join(","),
        format_percent(report.best.result.ace, precision)
    ));
    out
}

/// Renders the cross-sensor table: one row per chosen subset, FAR/FRR/ACE
/// per dataset plus the unweighted TOTAL columns.
pub fn render_cross_sensor_text(report: &CrossSensorReport, precision: usize) -> String {
    let mut out = String::new();
    let label_width = report
        .rows
        .iter()
        .map(|r| r.subset_sensor.len())
        .chain(std::iter::once("subset of".len()))
        .max()
        .unwrap_or(9)
        + 2;
    let cell = 3 * (precision + 6);

    out.push_str(&format!("{:<label_width$}", ""));
    for sensor in &report.dataset_sensors {
        out.push_str(&format!("{sensor:^cell$}"));
    }
    out.push_str(&format!("{:^cell$}\n", "TOTAL"));

    out.push_str(&format!("{:<label_width$}", "subset of"));
    let sub = precision + 6;
    for _ in 0..=report.dataset_sensors.len() {
        out.push_str(&format!("{:>sub$}{:>sub$}{:>sub$}", "FAR", "FRR", "ACE"));
    }
    out.push('\n');

    for row in &report.rows {
        out.push_str(&format!("{:<label_width$}", row.subset_sensor));
        for c in &row.cells {
            out.push_str(&format!(
                "{:>sub$}{:>sub$}{:>sub$}",
                format_percent(c.far, precision),
                format_percent(c.frr, precision),
                format_percent(c.ace, precision)
            ));
        }
        out.push_str(&format!(
            "{:>sub$}{:>sub$}{:>sub$}\n",
            format_percent(row.total_far, precision),
            format_percent(row.total_frr, precision),
            format_percent(row.total_ace, precision)
        ));
    }
    if let Some(mean) = report.own_subset_mean_ace {
        out.push_str(&format!(
            "own-subset mean ACE: {}\n",
            format_percent(mean, precision)
        ));
    }
    out
}

/// Machine-readable mirror of the selection ladder (full precision).
pub fn render_selection_json(report: &SelectionReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Machine-readable mirror of the cross-sensor table (full precision).
pub fn render_cross_sensor_json(report: &CrossSensorReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
