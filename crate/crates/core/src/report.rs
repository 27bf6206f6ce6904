//! Report documents and their fixed text formatting.
//!
//! Floats are rounded to 12 significant digits before they are written, and
//! every struct serializes its fields in declaration order, so the same
//! inputs always produce the same bytes.

use std::io::Write;

use serde::Serialize;

use crate::cluster::Merge;
use crate::dimensions::{Dimension, DimensionScores};
use crate::measures::{MeasureVector, FIELD_NAMES};

pub const TOOL: &str = "behavnet";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        // folds -0.0 into 0.0
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Text form used in CSV cells.
pub fn fmt_float(x: f64) -> String {
    format!("{}", round_sig(x))
}

pub fn rounded_measures(m: &MeasureVector) -> MeasureVector {
    MeasureVector {
        self_loop_ratio: round_sig(m.self_loop_ratio),
        multiple_link_ratio: round_sig(m.multiple_link_ratio),
        speed: round_sig(m.speed),
        active_ratio: round_sig(m.active_ratio),
        anonymity_ratio: round_sig(m.anonymity_ratio),
        gini: round_sig(m.gini),
        pareto_ratio: round_sig(m.pareto_ratio),
        clustering_coefficient: round_sig(m.clustering_coefficient),
        density: round_sig(m.density),
        mean_degree: round_sig(m.mean_degree),
        ..m.clone()
    }
}

pub fn rounded_scores(s: &DimensionScores) -> DimensionScores {
    DimensionScores {
        collectivism: round_sig(s.collectivism),
        extraversion: round_sig(s.extraversion),
        boldness: round_sig(s.boldness),
        egalitarianism: round_sig(s.egalitarianism),
    }
}

#[derive(Debug, Serialize)]
pub struct UnitMeasures {
    pub unit: String,
    pub path: String,
    pub format: String,
    pub pages: usize,
    pub skipped: usize,
    pub measures: MeasureVector,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: C,
    pub units: Vec<UnitMeasures>,
}

#[derive(Debug, Serialize)]
pub struct UnitScores {
    pub unit: String,
    pub scores: DimensionScores,
}

#[derive(Debug, Serialize)]
pub struct Rankings {
    pub collectivism: Vec<String>,
    pub extraversion: Vec<String>,
    pub boldness: Vec<String>,
    pub egalitarianism: Vec<String>,
}

impl Rankings {
    pub fn from_fn(mut f: impl FnMut(Dimension) -> Vec<String>) -> Self {
        Rankings {
            collectivism: f(Dimension::Collectivism),
            extraversion: f(Dimension::Extraversion),
            boldness: f(Dimension::Boldness),
            egalitarianism: f(Dimension::Egalitarianism),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DimensionReport<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: C,
    pub units: Vec<UnitScores>,
    pub rankings: Rankings,
}

#[derive(Debug, Serialize)]
pub struct SilhouetteRow {
    pub k: usize,
    pub width: f64,
}

#[derive(Debug, Serialize)]
pub struct UnitLabel {
    pub unit: String,
    pub label: usize,
}

#[derive(Debug, Serialize)]
pub struct ClusterReport<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: C,
    pub cluster_on: String,
    pub units: Vec<String>,
    pub merges: Vec<Merge>,
    pub silhouette: Vec<SilhouetteRow>,
    pub selected_k: usize,
    pub selected_width: f64,
    pub labels: Vec<UnitLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Leading `#` line carrying tool, version and the resolved config.
fn csv_preamble<C: Serialize>(config: &C) -> String {
    format!(
        "# {TOOL} {VERSION} config={}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

fn csv_body(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).expect("in-memory write");
    for row in rows {
        wtr.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn analyze_csv<C: Serialize>(report: &AnalyzeReport<C>) -> String {
    let mut header = vec!["unit"];
    header.extend(FIELD_NAMES);
    let rows = report.units.iter().map(|u| {
        let m = &u.measures;
        let mut row = vec![u.unit.clone()];
        row.extend(m.columns().iter().map(|&x| fmt_float(x)));
        row.extend([m.editor_count, m.event_count, m.link_count].map(|c| c.to_string()));
        row
    });
    csv_preamble(&report.config) + &csv_body(&header, rows)
}

pub fn dimensions_csv<C: Serialize>(report: &DimensionReport<C>) -> String {
    let header = ["unit", "collectivism", "extraversion", "boldness", "egalitarianism"];
    let rows = report.units.iter().map(|u| {
        let mut row = vec![u.unit.clone()];
        row.extend(u.scores.to_array().iter().map(|&x| fmt_float(x)));
        row
    });
    csv_preamble(&report.config) + &csv_body(&header, rows)
}

pub fn cluster_csv<C: Serialize>(report: &ClusterReport<C>) -> String {
    let rows = report
        .labels
        .iter()
        .map(|l| vec![l.unit.clone(), l.label.to_string()]);
    format!(
        "{}# selected_k={} width={}\n{}",
        csv_preamble(&report.config),
        report.selected_k,
        fmt_float(report.selected_width),
        csv_body(&["unit", "label"], rows)
    )
}

pub fn write_all(out: &mut dyn Write, text: &str) -> std::io::Result<()> {
    out.write_all(text.as_bytes())?;
    out.flush()
}
