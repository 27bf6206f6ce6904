//! Behavioral and structural measures of an interaction network.
//!
//! Behavioral measures are ratios, so they stay comparable across corpora of
//! very different size. An empty denominator gives 0 rather than an error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Strategy};
use crate::ingest::EditStream;
use crate::netbuild::{build_network_with, simple_projection, InteractionNetwork, NetError, SimpleGraph};

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("speed window must be positive")]
    NonPositiveWindow,
    #[error("{0} needs at least one count")]
    EmptyCounts(&'static str),
    #[error("pareto ratio is undefined when every count is zero")]
    ZeroTotal,
    #[error("pareto mass must lie in (0, 1], got {0}")]
    InvalidMass(f64),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    /// Seconds; an edit is "fast" when it follows its predecessor within this.
    pub speed_window: u64,
    /// Editors with strictly more edits than this are active.
    pub active_threshold: u64,
    /// Share of all edits the Pareto prefix must cover.
    pub pareto_mass: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            speed_window: 3600,
            active_threshold: 10,
            pareto_mass: 0.8,
        }
    }
}

impl MeasureConfig {
    pub fn validate(&self) -> Result<(), MeasureError> {
        if self.speed_window == 0 {
            return Err(MeasureError::NonPositiveWindow);
        }
        check_mass(self.pareto_mass)
    }
}

fn check_mass(mass: f64) -> Result<(), MeasureError> {
    if mass > 0.0 && mass <= 1.0 {
        Ok(())
    } else {
        Err(MeasureError::InvalidMass(mass))
    }
}

/// Every measure for one analysis unit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub self_loop_ratio: f64,
    pub multiple_link_ratio: f64,
    pub speed: f64,
    pub active_ratio: f64,
    pub anonymity_ratio: f64,
    pub gini: f64,
    pub pareto_ratio: f64,
    pub clustering_coefficient: f64,
    pub density: f64,
    pub mean_degree: f64,
    pub editor_count: u64,
    pub event_count: u64,
    pub link_count: u64,
}

/// Names of the real-valued measure columns, in field order.
pub const MEASURE_COLUMNS: [&str; 10] = [
    "self_loop_ratio",
    "multiple_link_ratio",
    "speed",
    "active_ratio",
    "anonymity_ratio",
    "gini",
    "pareto_ratio",
    "clustering_coefficient",
    "density",
    "mean_degree",
];

/// All field names, in serialization order.
pub const FIELD_NAMES: [&str; 13] = [
    "self_loop_ratio",
    "multiple_link_ratio",
    "speed",
    "active_ratio",
    "anonymity_ratio",
    "gini",
    "pareto_ratio",
    "clustering_coefficient",
    "density",
    "mean_degree",
    "editor_count",
    "event_count",
    "link_count",
];

impl MeasureVector {
    /// The real-valued measures in [`MEASURE_COLUMNS`] order.
    pub fn columns(&self) -> [f64; 10] {
        [
            self.self_loop_ratio,
            self.multiple_link_ratio,
            self.speed,
            self.active_ratio,
            self.anonymity_ratio,
            self.gini,
            self.pareto_ratio,
            self.clustering_coefficient,
            self.density,
            self.mean_degree,
        ]
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn self_loop_ratio(net: &InteractionNetwork) -> f64 {
    ratio(net.self_loop_count(), net.total_links())
}

/// Share of links that belong to a dyad occurring at least twice. Every
/// occurrence of a repeated dyad counts.
pub fn multiple_link_ratio(net: &InteractionNetwork) -> f64 {
    let repeated: u64 = net
        .pair_multiplicity()
        .values()
        .filter(|&&m| m >= 2)
        .sum();
    ratio(repeated, net.total_links())
}

/// Share of all edits that follow the previous edit on their page within
/// `window` seconds. A page's first edit never qualifies.
pub fn speed(stream: &EditStream, window: u64) -> Result<f64, MeasureError> {
    if window == 0 {
        return Err(MeasureError::NonPositiveWindow);
    }
    let fast: u64 = stream
        .pages()
        .iter()
        .map(|p| {
            p.events
                .windows(2)
                .filter(|w| w[1].timestamp - w[0].timestamp <= window)
                .count() as u64
        })
        .sum();
    Ok(ratio(fast, stream.event_count() as u64))
}

/// Same quantity as [`speed`], read off the link gaps of a built network.
pub fn speed_from_network(net: &InteractionNetwork, window: u64) -> Result<f64, MeasureError> {
    if window == 0 {
        return Err(MeasureError::NonPositiveWindow);
    }
    let fast = net.links().filter(|l| l.gap <= window).count() as u64;
    Ok(ratio(fast, net.event_count()))
}

pub fn active_ratio(net: &InteractionNetwork, threshold: u64) -> f64 {
    let active = net.nodes().values().filter(|n| n.edits > threshold).count() as u64;
    ratio(active, net.editor_count() as u64)
}

pub fn anonymity_ratio(net: &InteractionNetwork) -> f64 {
    let anon = net.nodes().values().filter(|n| n.anonymous).count() as u64;
    ratio(anon, net.editor_count() as u64)
}

/// Population Gini coefficient, `Σᵢ Σⱼ |xᵢ − xⱼ| / (2 n² μ)`.
///
/// Evaluated in the sorted form `Σᵢ (2i − n − 1) x₍ᵢ₎ / (n Σx)` with exact
/// integer accumulation, so the only rounding is the final division.
pub fn gini(counts: &[u64]) -> Result<f64, MeasureError> {
    if counts.is_empty() {
        return Err(MeasureError::EmptyCounts("gini"));
    }
    let n = counts.len() as i128;
    let total: i128 = counts.iter().map(|&c| c as i128).sum();
    if n == 1 || total == 0 {
        return Ok(0.0);
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let weighted: i128 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (2 * (i as i128 + 1) - n - 1) * x as i128)
        .sum();
    Ok(weighted as f64 / (n * total) as f64)
}

/// Smallest fraction of editors (most active first) whose edits reach
/// `mass` of the total.
pub fn pareto_ratio(counts: &[u64], mass: f64) -> Result<f64, MeasureError> {
    if counts.is_empty() {
        return Err(MeasureError::EmptyCounts("pareto_ratio"));
    }
    check_mass(mass)?;
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(MeasureError::ZeroTotal);
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let target = mass * total as f64;
    let mut prefix = 0u64;
    for (k, &c) in sorted.iter().enumerate() {
        prefix += c;
        if prefix as f64 >= target {
            return Ok((k + 1) as f64 / sorted.len() as f64);
        }
    }
    Ok(1.0)
}

/// Number of triangles through each node.
fn triangles_per_node(g: &SimpleGraph, strategy: Strategy) -> Vec<u64> {
    exec::map_range(strategy, g.node_count(), |u| {
        let nu = g.neighbors(u);
        let mut twice = 0u64;
        for &v in nu {
            // sorted-list intersection of N(u) and N(v)
            let nv = g.neighbors(v);
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        twice += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        twice / 2
    })
}

/// Mean local clustering coefficient over all nodes; nodes of degree < 2
/// contribute 0.
pub fn clustering_coefficient(g: &SimpleGraph) -> f64 {
    clustering_coefficient_with(g, Strategy::default())
}

pub fn clustering_coefficient_with(g: &SimpleGraph, strategy: Strategy) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let triangles = triangles_per_node(g, strategy);
    let mut local: Vec<f64> = triangles
        .iter()
        .enumerate()
        .map(|(u, &t)| {
            let d = g.degree(u) as f64;
            if d < 2.0 {
                0.0
            } else {
                2.0 * t as f64 / (d * (d - 1.0))
            }
        })
        .collect();
    // summing in value order makes the result independent of node labels
    local.sort_by(f64::total_cmp);
    local.iter().sum::<f64>() / n as f64
}

/// `(density, mean_degree)` of a simple graph.
pub fn density_and_degree(g: &SimpleGraph) -> (f64, f64) {
    let n = g.node_count() as f64;
    let m = g.edge_count() as f64;
    let density = if n >= 2.0 { 2.0 * m / (n * (n - 1.0)) } else { 0.0 };
    let mean_degree = if n >= 1.0 { 2.0 * m / n } else { 0.0 };
    (density, mean_degree)
}

/// Computes every measure from an already-built network.
pub fn measure_network(
    net: &InteractionNetwork,
    config: &MeasureConfig,
    strategy: Strategy,
) -> Result<MeasureVector, MeasureError> {
    config.validate()?;
    if net.is_empty() {
        return Ok(MeasureVector::default());
    }
    let graph = simple_projection(net);
    let counts = net.edit_counts();
    let (density, mean_degree) = density_and_degree(&graph);
    Ok(MeasureVector {
        self_loop_ratio: self_loop_ratio(net),
        multiple_link_ratio: multiple_link_ratio(net),
        speed: speed_from_network(net, config.speed_window)?,
        active_ratio: active_ratio(net, config.active_threshold),
        anonymity_ratio: anonymity_ratio(net),
        gini: gini(&counts)?,
        pareto_ratio: pareto_ratio(&counts, config.pareto_mass)?,
        clustering_coefficient: clustering_coefficient_with(&graph, strategy),
        density,
        mean_degree,
        editor_count: net.editor_count() as u64,
        event_count: net.event_count(),
        link_count: net.total_links(),
    })
}

/// Builds the network for `stream` and computes every measure.
pub fn measure_all(stream: &EditStream, config: &MeasureConfig) -> Result<MeasureVector, MeasureError> {
    measure_all_with(stream, config, Strategy::default())
}

pub fn measure_all_with(
    stream: &EditStream,
    config: &MeasureConfig,
    strategy: Strategy,
) -> Result<MeasureVector, MeasureError> {
    config.validate()?;
    let net = build_network_with(stream, strategy)?;
    measure_network(&net, config, strategy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::EditEvent;
    use crate::netbuild::build_network;

    fn stream_with_gaps(page: &str, editors: &[&str], gaps: &[u64]) -> EditStream {
        let mut t = 1_000;
        let events = editors.iter().enumerate().map(|(i, e)| {
            if i > 0 {
                t += gaps[i - 1];
            }
            EditEvent::new(page, *e, t, false).unwrap()
        });
        EditStream::from_events(events.collect::<Vec<_>>())
    }

    fn net_of(editors: &[&str]) -> InteractionNetwork {
        build_network(&stream_with_gaps("P", editors, &vec![1; editors.len()])).unwrap()
    }

    fn pairwise_gini(x: &[u64]) -> f64 {
        let n = x.len() as f64;
        let mean = x.iter().sum::<u64>() as f64 / n;
        if mean == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        for a in x {
            for b in x {
                s += (*a as f64 - *b as f64).abs();
            }
        }
        s / (2.0 * n * n * mean)
    }

    #[test]
    fn self_loops() {
        assert_eq!(self_loop_ratio(&net_of(&["A", "A", "B", "A", "B"])), 0.25);
        assert_eq!(self_loop_ratio(&net_of(&["A", "B", "C", "D"])), 0.0);
        assert_eq!(self_loop_ratio(&net_of(&["A"; 5])), 1.0);
        assert_eq!(self_loop_ratio(&InteractionNetwork::new()), 0.0);
    }

    #[test]
    fn multiple_links() {
        assert_eq!(multiple_link_ratio(&net_of(&["A", "A", "B", "A", "B"])), 0.75);
        assert_eq!(multiple_link_ratio(&net_of(&["A", "B", "C", "D"])), 0.0);
        assert_eq!(multiple_link_ratio(&net_of(&["A", "B", "A", "B", "A"])), 1.0);
        // A-B twice, A-C once, C-C loop: 2 of 4
        assert_eq!(multiple_link_ratio(&net_of(&["A", "B", "A", "C", "C"])), 0.5);
        assert_eq!(multiple_link_ratio(&net_of(&["A", "B", "A", "C", "C", "B"])), 0.4);
    }

    #[test]
    fn speed_examples() {
        let s = stream_with_gaps("P", &["A", "B", "C", "D"], &[1800, 5400, 600]);
        assert_eq!(speed(&s, 3600).unwrap(), 0.5);
        let singles = EditStream::from_events(
            (0..4).map(|i| EditEvent::new(format!("P{i}"), "a", 1, false).unwrap()),
        );
        assert_eq!(speed(&singles, 3600).unwrap(), 0.0);
        let burst = stream_with_gaps("P", &["A"; 7], &[0; 6]);
        assert_eq!(speed(&burst, 1).unwrap(), 6.0 / 7.0);
        assert_eq!(speed(&EditStream::default(), 10).unwrap(), 0.0);
        assert_eq!(speed(&s, 0), Err(MeasureError::NonPositiveWindow));
    }

    #[test]
    fn speed_routes_agree() {
        let s = stream_with_gaps("P", &["A", "B", "C", "D", "E"], &[1800, 5400, 600, 3600]);
        let net = build_network(&s).unwrap();
        for w in [1, 600, 1800, 3599, 3600, 5400, 10_000] {
            assert_eq!(speed(&s, w).unwrap(), speed_from_network(&net, w).unwrap());
        }
    }

    #[test]
    fn active() {
        let mut events = Vec::new();
        for (editor, n) in [("a", 12), ("b", 11), ("c", 3), ("d", 1)] {
            for i in 0..n {
                events.push(EditEvent::new(format!("{editor}{i}"), editor, 1, false).unwrap());
            }
        }
        let net = build_network(&EditStream::from_events(events)).unwrap();
        assert_eq!(active_ratio(&net, 10), 0.5);
        assert_eq!(active_ratio(&net, 0), 1.0);
        assert_eq!(active_ratio(&net_of(&["A"; 10]), 10), 0.0);
        assert_eq!(active_ratio(&InteractionNetwork::new(), 10), 0.0);
    }

    #[test]
    fn anonymity() {
        let s = EditStream::from_events(vec![
            EditEvent::new("P", "A", 1, false).unwrap(),
            EditEvent::new("P", "B", 2, true).unwrap(),
            EditEvent::new("P", "C", 3, true).unwrap(),
        ]);
        let net = build_network(&s).unwrap();
        assert_eq!(anonymity_ratio(&net), 2.0 / 3.0);
        assert_eq!(anonymity_ratio(&net_of(&["A", "B"])), 0.0);
        assert_eq!(anonymity_ratio(&InteractionNetwork::new()), 0.0);
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[5, 5, 5, 5]).unwrap(), 0.0);
        assert_eq!(gini(&[0, 0, 0, 1]).unwrap(), 0.75);
        assert_eq!(gini(&[1, 2, 3, 4]).unwrap(), 0.25);
        assert_eq!(pairwise_gini(&[1, 2, 3, 4]), 0.25);
        assert_eq!(gini(&[3, 2]).unwrap(), 0.1);
        assert_eq!(gini(&[7]).unwrap(), 0.0);
        assert_eq!(gini(&[0, 0]).unwrap(), 0.0);
        assert_eq!(gini(&[]), Err(MeasureError::EmptyCounts("gini")));
        for x in [vec![9, 1, 4, 4, 0, 13], vec![1, 1, 2], vec![100, 0, 3]] {
            assert!((gini(&x).unwrap() - pairwise_gini(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn pareto_examples() {
        assert_eq!(pareto_ratio(&[8, 1, 1], 0.8).unwrap(), 1.0 / 3.0);
        assert_eq!(pareto_ratio(&[4; 10], 0.8).unwrap(), 0.8);
        assert_eq!(pareto_ratio(&[1], 0.8).unwrap(), 1.0);
        assert_eq!(pareto_ratio(&[1, 0, 0], 1.0).unwrap(), 1.0 / 3.0);
        assert_eq!(pareto_ratio(&[0, 0], 0.8), Err(MeasureError::ZeroTotal));
        assert!(pareto_ratio(&[], 0.8).is_err());
        assert!(pareto_ratio(&[1], 0.0).is_err());
        assert!(pareto_ratio(&[1], 1.5).is_err());
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> SimpleGraph {
        SimpleGraph::from_edges((0..n).map(|i| format!("n{i}")).collect(), edges.iter().copied())
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(clustering_coefficient(&graph(3, &[(0, 1), (1, 2), (0, 2)])), 1.0);
        assert_eq!(clustering_coefficient(&graph(3, &[(0, 1), (1, 2)])), 0.0);
        // K4 minus edge 2-3
        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!((clustering_coefficient(&g) - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(clustering_coefficient(&graph(0, &[])), 0.0);
        assert_eq!(
            clustering_coefficient_with(&g, Strategy::Sequential),
            clustering_coefficient_with(&g, Strategy::Parallel)
        );
    }

    #[test]
    fn density_examples() {
        assert_eq!(density_and_degree(&graph(3, &[(0, 1), (1, 2), (0, 2)])), (1.0, 2.0));
        assert_eq!(density_and_degree(&graph(5, &[])), (0.0, 0.0));
        assert_eq!(density_and_degree(&graph(4, &[(0, 1), (0, 2), (0, 3)])), (0.5, 1.5));
        assert_eq!(density_and_degree(&graph(1, &[])), (0.0, 0.0));
        assert_eq!(density_and_degree(&graph(0, &[])), (0.0, 0.0));
    }

    #[test]
    fn measure_all_worked_example() {
        let s = stream_with_gaps("P", &["A", "A", "B", "A", "B"], &[600; 4]);
        let m = measure_all(&s, &MeasureConfig::default()).unwrap();
        assert_eq!(m.self_loop_ratio, 0.25);
        assert_eq!(m.multiple_link_ratio, 0.75);
        assert_eq!(m.speed, 0.8);
        assert_eq!(m.anonymity_ratio, 0.0);
        assert_eq!(m.gini, 0.1);
        assert_eq!(m.pareto_ratio, 1.0);
        assert_eq!(m.active_ratio, 0.0);
        assert_eq!((m.density, m.mean_degree), (1.0, 1.0));
        assert_eq!((m.editor_count, m.event_count, m.link_count), (2, 5, 4));
    }

    #[test]
    fn empty_stream_is_all_zero() {
        let m = measure_all(&EditStream::default(), &MeasureConfig::default()).unwrap();
        assert_eq!(m, MeasureVector::default());
    }

    #[test]
    fn bad_config() {
        let cfg = MeasureConfig {
            speed_window: 0,
            ..MeasureConfig::default()
        };
        assert!(measure_all(&EditStream::default(), &cfg).is_err());
    }

    #[test]
    fn json_field_names() {
        let v = serde_json::to_value(MeasureVector::default()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = FIELD_NAMES.to_vec();
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
    }
}
