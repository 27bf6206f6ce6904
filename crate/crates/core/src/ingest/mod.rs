//! Edit-event ingestion.
//!
//! Both input formats normalize into an [`EditStream`]: events grouped by
//! page, each group stably sorted by timestamp so that ties keep their input
//! (document) order.

mod csv;
mod mediawiki;

use std::collections::{HashMap, HashSet};
use std::net::IpAddr;

use chrono::{DateTime, NaiveDateTime};
use thiserror::Error;

pub use self::csv::{parse_csv, write_csv, CsvOptions};
pub use self::mediawiki::{parse_mediawiki_xml, MediaWikiPages};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("XML error at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One revision act.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EditEvent {
    pub page_id: String,
    pub editor_id: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: u64,
    pub anonymous: bool,
}

impl EditEvent {
    pub fn new(
        page_id: impl Into<String>,
        editor_id: impl Into<String>,
        timestamp: u64,
        anonymous: bool,
    ) -> Result<Self, IngestError> {
        let page_id = page_id.into();
        let editor_id = editor_id.into();
        if page_id.is_empty() {
            return Err(IngestError::InvalidEvent("empty page_id".into()));
        }
        if editor_id.is_empty() {
            return Err(IngestError::InvalidEvent("empty editor_id".into()));
        }
        Ok(EditEvent {
            page_id,
            editor_id,
            timestamp,
            anonymous,
        })
    }
}

/// The time-ordered edit history of one page.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageHistory {
    pub page_id: String,
    pub events: Vec<EditEvent>,
}

impl PageHistory {
    fn sort(&mut self) {
        // stable: equal timestamps keep arrival order
        self.events.sort_by_key(|e| e.timestamp);
    }
}

/// Canonical input to network construction.
///
/// Pages are kept in order of first appearance in the input; events within a
/// page are ascending by `(timestamp, arrival order)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EditStream {
    pages: Vec<PageHistory>,
    editor_count: usize,
    event_count: usize,
    skipped: usize,
}

impl EditStream {
    /// Groups and sorts an arbitrary sequence of events.
    pub fn from_events(events: impl IntoIterator<Item = EditEvent>) -> Self {
        let mut builder = StreamBuilder::default();
        for event in events {
            builder.push(event);
        }
        builder.finish()
    }

    /// Concatenates already-grouped streams. Pages sharing an id are joined
    /// in argument order before re-sorting; skip tallies add up.
    pub fn concat(streams: impl IntoIterator<Item = EditStream>) -> Self {
        let mut builder = StreamBuilder::default();
        for stream in streams {
            builder.skipped += stream.skipped;
            for page in stream.pages {
                builder.push_page(page);
            }
        }
        builder.finish()
    }

    pub fn pages(&self) -> &[PageHistory] {
        &self.pages
    }

    pub fn events(&self) -> impl Iterator<Item = &EditEvent> {
        self.pages.iter().flat_map(|p| p.events.iter())
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    pub fn editor_count(&self) -> usize {
        self.editor_count
    }

    pub fn event_count(&self) -> usize {
        self.event_count
    }

    /// Records dropped during parsing (e.g. revisions with a suppressed
    /// contributor).
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn is_empty(&self) -> bool {
        self.event_count == 0
    }

    /// Keeps only the pages for which `keep` returns true.
    pub fn retain_pages(&mut self, mut keep: impl FnMut(&PageHistory) -> bool) {
        self.pages.retain(|p| keep(p));
        self.recount();
    }

    /// Reorders pages; events inside each page are untouched.
    pub fn with_page_order(mut self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.pages.len());
        let mut slots: Vec<Option<PageHistory>> = self.pages.drain(..).map(Some).collect();
        self.pages = order
            .iter()
            .map(|&i| slots[i].take().expect("page order must be a permutation"))
            .collect();
        self
    }

    fn recount(&mut self) {
        let mut editors = HashSet::new();
        let mut events = 0;
        for page in &self.pages {
            events += page.events.len();
            editors.extend(page.events.iter().map(|e| e.editor_id.as_str()));
        }
        self.editor_count = editors.len();
        self.event_count = events;
    }
}

/// Accumulates events into page groups until [`StreamBuilder::finish`].
#[derive(Default)]
pub(crate) struct StreamBuilder {
    index: HashMap<String, usize>,
    pages: Vec<PageHistory>,
    pub(crate) skipped: usize,
}

impl StreamBuilder {
    pub(crate) fn push(&mut self, event: EditEvent) {
        let slot = self.slot(&event.page_id);
        self.pages[slot].events.push(event);
    }

    pub(crate) fn push_page(&mut self, page: PageHistory) {
        let slot = self.slot(&page.page_id);
        self.pages[slot].events.extend(page.events);
    }

    fn slot(&mut self, page_id: &str) -> usize {
        if let Some(&i) = self.index.get(page_id) {
            return i;
        }
        let i = self.pages.len();
        self.index.insert(page_id.to_owned(), i);
        self.pages.push(PageHistory {
            page_id: page_id.to_owned(),
            events: Vec::new(),
        });
        i
    }

    pub(crate) fn finish(self) -> EditStream {
        let mut pages = self.pages;
        pages.retain(|p| !p.events.is_empty());
        for page in &mut pages {
            page.sort();
        }
        let mut stream = EditStream {
            pages,
            editor_count: 0,
            event_count: 0,
            skipped: self.skipped,
        };
        stream.recount();
        stream
    }
}

/// Whether an editor id looks like an unregistered (IP) contributor, the
/// MediaWiki convention. Only used when a source carries no explicit flag.
pub fn infer_anonymous(editor_id: &str) -> bool {
    editor_id.parse::<IpAddr>().is_ok()
}

/// Parses integer epoch seconds or an ISO-8601 / RFC 3339 date-time.
/// Date-times without an offset are taken as UTC.
pub fn parse_timestamp(raw: &str) -> Result<u64, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err("empty timestamp".into());
    }
    if raw.bytes().all(|b| b.is_ascii_digit()) {
        return raw
            .parse::<u64>()
            .map_err(|e| format!("timestamp {raw:?}: {e}"));
    }
    let secs = if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        dt.timestamp()
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S") {
        dt.and_utc().timestamp()
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S") {
        dt.and_utc().timestamp()
    } else {
        return Err(format!("unparsable timestamp {raw:?}"));
    };
    u64::try_from(secs).map_err(|_| format!("timestamp {raw:?} is before the epoch"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(page: &str, editor: &str, ts: u64) -> EditEvent {
        EditEvent::new(page, editor, ts, false).unwrap()
    }

    #[test]
    fn anonymity_heuristic() {
        assert!(infer_anonymous("192.168.1.7"));
        assert!(!infer_anonymous("JWales"));
        assert!(infer_anonymous("2001:db8::1"));
        assert!(!infer_anonymous("300.1.1.1"));
        assert!(!infer_anonymous("1.2.3"));
    }

    #[test]
    fn timestamps() {
        assert_eq!(parse_timestamp("100"), Ok(100));
        assert_eq!(parse_timestamp("1970-01-01T00:01:40Z"), Ok(100));
        assert_eq!(parse_timestamp("2004-01-01T00:00:00Z"), Ok(1_072_915_200));
        assert_eq!(parse_timestamp("2004-01-01T09:00:00+09:00"), Ok(1_072_915_200));
        assert_eq!(parse_timestamp("2004-01-01 00:00:00"), Ok(1_072_915_200));
        assert!(parse_timestamp("2004-13-40T99:99:99Z").is_err());
        assert!(parse_timestamp("1969-12-31T23:59:59Z").is_err());
        assert!(parse_timestamp("-5").is_err());
        assert!(parse_timestamp("").is_err());
    }

    #[test]
    fn empty_ids_rejected() {
        assert!(EditEvent::new("", "a", 0, false).is_err());
        assert!(EditEvent::new("p", "", 0, false).is_err());
    }

    #[test]
    fn grouping_is_stable() {
        let s = EditStream::from_events(vec![
            ev("P1", "a", 100),
            ev("P2", "x", 5),
            ev("P1", "b", 50),
            ev("P1", "c", 100),
        ]);
        assert_eq!(s.page_count(), 2);
        assert_eq!(s.event_count(), 4);
        assert_eq!(s.editor_count(), 4);
        let p1: Vec<_> = s.pages()[0].events.iter().map(|e| e.editor_id.as_str()).collect();
        assert_eq!(p1, ["b", "a", "c"]);
    }

    #[test]
    fn concat_joins_pages() {
        let a = EditStream::from_events(vec![ev("P", "a", 10), ev("Q", "q", 1)]);
        let b = EditStream::from_events(vec![ev("P", "b", 5), ev("P", "c", 10)]);
        let s = EditStream::concat([a, b]);
        let p: Vec<_> = s.pages()[0].events.iter().map(|e| e.editor_id.as_str()).collect();
        assert_eq!(p, ["b", "a", "c"]);
        assert_eq!(s.page_count(), 2);
    }

    #[test]
    fn retain_recounts() {
        let mut s = EditStream::from_events(vec![
            ev("Talk:P", "a", 1),
            ev("P", "b", 2),
            ev("P", "b", 3),
        ]);
        s.retain_pages(|p| !p.page_id.starts_with("Talk:"));
        assert_eq!((s.page_count(), s.event_count(), s.editor_count()), (1, 2, 1));
    }
}
