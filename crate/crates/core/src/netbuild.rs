//! Sequential interaction networks.
//!
//! Each edit links to the edit immediately before it on the same page, from
//! the later editor (source) to the earlier one (target). Self-loops and
//! repeated dyads are kept: the network is a directed multigraph, with
//! dyadic multiplicities tallied on unordered editor pairs.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use thiserror::Error;

use crate::exec::{self, Strategy};
use crate::ingest::{EditEvent, EditStream};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("page {page:?}: event {index} is earlier than its predecessor")]
    Unsorted { page: String, index: usize },
    #[error("page chain mixes pages {expected:?} and {found:?}")]
    MixedPages { expected: String, found: String },
    #[error("cannot merge networks that both contain page {0:?}")]
    OverlappingPage(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Link {
    /// The later editor.
    pub source: String,
    /// The editor of the immediately preceding edit on the page.
    pub target: String,
    pub page_id: String,
    /// Seconds between the two edits.
    pub gap: u64,
}

impl Link {
    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EditorNode {
    pub edits: u64,
    /// Set when any of the editor's events was flagged anonymous.
    pub anonymous: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PageChain {
    pub events: u64,
    pub links: Vec<Link>,
}

/// Unordered editor pair, stored with the lexicographically smaller id first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyad(String, String);

impl Dyad {
    pub fn new(a: &str, b: &str) -> Self {
        if a <= b {
            Dyad(a.to_owned(), b.to_owned())
        } else {
            Dyad(b.to_owned(), a.to_owned())
        }
    }

    pub fn members(&self) -> (&str, &str) {
        (&self.0, &self.1)
    }
}

/// Builds the links for one page's time-ordered events.
pub fn build_page_chain(events: &[EditEvent]) -> Result<Vec<Link>, NetError> {
    let Some(first) = events.first() else {
        return Ok(Vec::new());
    };
    let mut links = Vec::with_capacity(events.len().saturating_sub(1));
    for (i, pair) in events.windows(2).enumerate() {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.page_id != first.page_id {
            return Err(NetError::MixedPages {
                expected: first.page_id.clone(),
                found: next.page_id.clone(),
            });
        }
        if next.timestamp < prev.timestamp {
            return Err(NetError::Unsorted {
                page: first.page_id.clone(),
                index: i + 1,
            });
        }
        links.push(Link {
            source: next.editor_id.clone(),
            target: prev.editor_id.clone(),
            page_id: first.page_id.clone(),
            gap: next.timestamp - prev.timestamp,
        });
    }
    Ok(links)
}

/// Directed interaction multigraph over editors.
///
/// All maps are ordered so that equality, iteration and exports are
/// independent of how the network was assembled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InteractionNetwork {
    nodes: BTreeMap<String, EditorNode>,
    pages: BTreeMap<String, PageChain>,
    pair_multiplicity: BTreeMap<Dyad, u64>,
    self_loop_count: u64,
    total_links: u64,
}

impl InteractionNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one page's history. The page must not already be present.
    pub fn add_page(&mut self, page_id: &str, events: &[EditEvent]) -> Result<(), NetError> {
        let links = build_page_chain(events)?;
        if let Some(e) = events.iter().find(|e| e.page_id != page_id) {
            return Err(NetError::MixedPages {
                expected: page_id.to_owned(),
                found: e.page_id.clone(),
            });
        }
        let slot = match self.pages.entry(page_id.to_owned()) {
            Entry::Occupied(_) => return Err(NetError::OverlappingPage(page_id.to_owned())),
            Entry::Vacant(v) => v,
        };
        for e in events {
            let node = self.nodes.entry(e.editor_id.clone()).or_default();
            node.edits += 1;
            node.anonymous |= e.anonymous;
        }
        for link in &links {
            if link.is_self_loop() {
                self.self_loop_count += 1;
            } else {
                *self
                    .pair_multiplicity
                    .entry(Dyad::new(&link.source, &link.target))
                    .or_insert(0) += 1;
            }
        }
        self.total_links += links.len() as u64;
        slot.insert(PageChain {
            events: events.len() as u64,
            links,
        });
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeMap<String, EditorNode> {
        &self.nodes
    }

    pub fn pages(&self) -> &BTreeMap<String, PageChain> {
        &self.pages
    }

    pub fn pair_multiplicity(&self) -> &BTreeMap<Dyad, u64> {
        &self.pair_multiplicity
    }

    pub fn multiplicity(&self, a: &str, b: &str) -> u64 {
        self.pair_multiplicity
            .get(&Dyad::new(a, b))
            .copied()
            .unwrap_or(0)
    }

    /// All links, grouped by page (pages in id order, links in time order).
    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.pages.values().flat_map(|p| p.links.iter())
    }

    pub fn per_page_event_counts(&self) -> impl Iterator<Item = (&str, u64)> {
        self.pages.iter().map(|(k, v)| (k.as_str(), v.events))
    }

    pub fn self_loop_count(&self) -> u64 {
        self.self_loop_count
    }

    pub fn total_links(&self) -> u64 {
        self.total_links
    }

    pub fn editor_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn event_count(&self) -> u64 {
        self.pages.values().map(|p| p.events).sum()
    }

    pub fn edit_counts(&self) -> Vec<u64> {
        self.nodes.values().map(|n| n.edits).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Combines networks built from disjoint page sets.
pub fn merge(
    mut a: InteractionNetwork,
    b: InteractionNetwork,
) -> Result<InteractionNetwork, NetError> {
    if a.pages.len() < b.pages.len() {
        // iterate the smaller side; the operation is symmetric
        return merge(b, a);
    }
    if let Some(page) = b.pages.keys().find(|k| a.pages.contains_key(*k)) {
        return Err(NetError::OverlappingPage(page.clone()));
    }
    for (id, node) in b.nodes {
        let slot = a.nodes.entry(id).or_default();
        slot.edits += node.edits;
        slot.anonymous |= node.anonymous;
    }
    for (dyad, count) in b.pair_multiplicity {
        *a.pair_multiplicity.entry(dyad).or_insert(0) += count;
    }
    a.pages.extend(b.pages);
    a.self_loop_count += b.self_loop_count;
    a.total_links += b.total_links;
    Ok(a)
}

/// Builds the network with the default execution strategy.
pub fn build_network(stream: &EditStream) -> Result<InteractionNetwork, NetError> {
    build_network_with(stream, Strategy::default())
}

/// Builds the network, fanning page chunks out to workers when `strategy`
/// is parallel. The result is identical for every strategy.
pub fn build_network_with(
    stream: &EditStream,
    strategy: Strategy,
) -> Result<InteractionNetwork, NetError> {
    let partials = exec::map_chunks(strategy, stream.pages(), |pages| {
        let mut net = InteractionNetwork::new();
        for page in pages {
            net.add_page(&page.page_id, &page.events)?;
        }
        Ok(net)
    });
    partials
        .into_iter()
        .try_fold(InteractionNetwork::new(), |acc, part| merge(acc, part?))
}

/// Simple undirected graph with nodes indexed by position in `labels`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    labels: Vec<String>,
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Builds a graph from labels and an edge list; duplicate edges and
    /// self-loops are dropped.
    pub fn from_edges(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut sets = vec![BTreeSet::new(); labels.len()];
        for (u, v) in edges {
            if u != v {
                sets[u].insert(v);
                sets[v].insert(u);
            }
        }
        SimpleGraph {
            labels,
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Sorted neighbor indices of node `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as label pairs, smaller index first.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.adjacency.iter().enumerate().flat_map(move |(u, ns)| {
            ns.iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (self.labels[u].as_str(), self.labels[v].as_str()))
        })
    }
}

/// Collapses the multigraph: one undirected edge per dyad with multiplicity
/// at least one; self-loops are dropped. Every editor remains a node.
pub fn simple_projection(net: &InteractionNetwork) -> SimpleGraph {
    let labels: Vec<String> = net.nodes.keys().cloned().collect();
    let index = |id: &str| {
        labels
            .binary_search_by(|l| l.as_str().cmp(id))
            .expect("dyad member is a node")
    };
    let edges: Vec<(usize, usize)> = net
        .pair_multiplicity
        .keys()
        .map(|d| (index(&d.0), index(&d.1)))
        .collect();
    SimpleGraph::from_edges(labels, edges)
}

/// Writes one `source<TAB>target<TAB>page_id<TAB>gap` line per link.
pub fn write_edge_list<W: Write>(net: &InteractionNetwork, mut out: W) -> io::Result<()> {
    for link in net.links() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            link.source, link.target, link.page_id, link.gap
        )?;
    }
    out.flush()
}

fn dot_quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\r' => {}
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Writes the multigraph as a DOT `digraph`; every link (self-loops
/// included) is its own edge statement.
pub fn write_dot<W: Write>(net: &InteractionNetwork, name: &str, mut out: W) -> io::Result<()> {
    writeln!(out, "digraph {} {{", dot_quote(name))?;
    for (id, node) in &net.nodes {
        writeln!(
            out,
            "  {} [edits={}, anonymous={}];",
            dot_quote(id),
            node.edits,
            node.anonymous
        )?;
    }
    for link in net.links() {
        writeln!(
            out,
            "  {} -> {} [page={}, gap={}];",
            dot_quote(&link.source),
            dot_quote(&link.target),
            dot_quote(&link.page_id),
            link.gap
        )?;
    }
    writeln!(out, "}}")?;
    out.flush()
}
