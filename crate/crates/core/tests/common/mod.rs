#![allow(dead_code)]

use behavnet::ingest::{EditEvent, EditStream};
use chrono::{TimeZone, Utc};
use proptest::prelude::*;

pub const EDITORS: [&str; 8] = ["A", "B", "C", "D", "E", "F", "10.0.0.1", "10.0.0.2"];

/// Random streams over a small editor pool so that loops and repeated
/// dyads are common.
pub fn stream_strategy(max_pages: usize, max_len: usize) -> impl Strategy<Value = EditStream> {
    prop::collection::vec(
        prop::collection::vec((0..EDITORS.len(), 0u64..5_000), 1..=max_len),
        1..=max_pages,
    )
    .prop_map(|pages| {
        let mut events = Vec::new();
        for (p, page) in pages.into_iter().enumerate() {
            let mut t = 1_000_000;
            for (editor, gap) in page {
                t += gap;
                let id = EDITORS[editor];
                events.push(EditEvent::new(format!("P{p}"), id, t, id.starts_with("10.")).unwrap());
            }
        }
        EditStream::from_events(events)
    })
}

pub fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn iso(ts: u64) -> String {
    Utc.timestamp_opt(ts as i64, 0)
        .unwrap()
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

/// One `<page>` element; `None` editors become suppressed contributors.
pub fn page_xml(title: &str, revisions: &[(Option<&str>, u64)]) -> String {
    let mut s = format!("  <page>\n    <title>{}</title>\n    <ns>0</ns>\n", xml_escape(title));
    for (i, (editor, ts)) in revisions.iter().enumerate() {
        s += &format!("    <revision>\n      <id>{i}</id>\n      <timestamp>{}</timestamp>\n", iso(*ts));
        match editor {
            Some(e) if behavnet::ingest::infer_anonymous(e) => {
                s += &format!("      <contributor><ip>{e}</ip></contributor>\n")
            }
            Some(e) => {
                s += &format!("      <contributor><username>{}</username></contributor>\n", xml_escape(e))
            }
            None => s += "      <contributor deleted=\"deleted\" />\n",
        }
        s += "      <text xml:space=\"preserve\">x &lt; y</text>\n    </revision>\n";
    }
    s + "  </page>\n"
}

pub fn wrap_xml(pages: &str) -> String {
    format!("<mediawiki xml:lang=\"en\">\n  <siteinfo><sitename>t</sitename></siteinfo>\n{pages}</mediawiki>\n")
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
