//! Streaming reader for MediaWiki export documents.
//!
//! Only the elements needed for edit networks are interpreted:
//! `page/title`, `revision/timestamp` and `revision/contributor/{username|ip}`.
//! Element names are matched on their local part, so namespace-prefixed
//! exports read the same as bare ones. Everything else (`text`, `comment`,
//! `siteinfo`, ...) is skipped without being buffered.

use std::io::{BufRead, BufReader, Read};

use log::debug;
use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::Event;
use quick_xml::Reader;

use super::{parse_timestamp, EditEvent, EditStream, IngestError, PageHistory, StreamBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Title,
    Timestamp,
    Username,
    Ip,
}

#[derive(Default)]
struct RevisionState {
    timestamp: Option<String>,
    username: Option<String>,
    ip: Option<String>,
}

#[derive(Default)]
struct PageState {
    title: Option<String>,
    // (editor, anonymous, timestamp); the title may follow revisions in
    // hand-made exports, so events are materialized at </page>
    revisions: Vec<(String, bool, u64)>,
}

/// Iterator over the pages of a MediaWiki export, one [`PageHistory`] at a
/// time. Memory is bounded by the revisions of the page being read. Pages
/// left without any usable revision are not yielded.
pub struct MediaWikiPages<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    stack: Vec<String>,
    page: Option<PageState>,
    revision: Option<RevisionState>,
    capture: Option<(Field, String)>,
    skipped: usize,
    done: bool,
}

impl<R: BufRead> MediaWikiPages<R> {
    pub fn new(reader: R) -> Self {
        let mut reader = Reader::from_reader(reader);
        reader.config_mut().check_end_names = true;
        MediaWikiPages {
            reader,
            buf: Vec::new(),
            stack: Vec::new(),
            page: None,
            revision: None,
            capture: None,
            skipped: 0,
            done: false,
        }
    }

    /// Revisions dropped so far because they had no usable contributor or
    /// timestamp.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    fn structural(&self, message: impl Into<String>) -> IngestError {
        IngestError::Xml {
            offset: self.reader.buffer_position(),
            message: message.into(),
        }
    }

    fn parent(&self, depth_from_top: usize) -> Option<&str> {
        self.stack
            .len()
            .checked_sub(depth_from_top + 1)
            .map(|i| self.stack[i].as_str())
    }

    fn open(&mut self, name: &str) -> Result<(), IngestError> {
        let parent = self.parent(0);
        match (name, parent) {
            ("page", _) => {
                if self.page.is_some() {
                    return Err(self.structural("nested <page> element"));
                }
                self.page = Some(PageState::default());
            }
            ("revision", Some("page")) => {
                self.revision = Some(RevisionState::default());
            }
            ("title", Some("page")) => self.capture = Some((Field::Title, String::new())),
            ("timestamp", Some("revision")) => {
                self.capture = Some((Field::Timestamp, String::new()))
            }
            ("username", Some("contributor")) if self.parent(1) == Some("revision") => {
                self.capture = Some((Field::Username, String::new()))
            }
            ("ip", Some("contributor")) if self.parent(1) == Some("revision") => {
                self.capture = Some((Field::Ip, String::new()))
            }
            _ => {}
        }
        self.stack.push(name.to_owned());
        Ok(())
    }

    /// Closes the innermost element; returns a page when `</page>` ends one.
    fn close(&mut self) -> Result<Option<PageHistory>, IngestError> {
        let Some(name) = self.stack.pop() else {
            return Err(self.structural("unbalanced end tag"));
        };
        if let Some((field, text)) = self.capture.take() {
            // titles are kept verbatim; other fields tolerate surrounding whitespace
            let text = match field {
                Field::Title => Some(text),
                _ => Some(text.trim().to_owned()),
            }
            .filter(|t| !t.is_empty());
            match field {
                Field::Title => {
                    if let Some(page) = self.page.as_mut() {
                        page.title = text;
                    }
                }
                Field::Timestamp => {
                    if let Some(rev) = self.revision.as_mut() {
                        rev.timestamp = text;
                    }
                }
                Field::Username => {
                    if let Some(rev) = self.revision.as_mut() {
                        rev.username = text;
                    }
                }
                Field::Ip => {
                    if let Some(rev) = self.revision.as_mut() {
                        rev.ip = text;
                    }
                }
            }
        }
        match name.as_str() {
            "revision" if self.parent(0) == Some("page") => {
                if let Some(rev) = self.revision.take() {
                    self.finish_revision(rev);
                }
                Ok(None)
            }
            "page" => {
                let page = self.page.take().unwrap_or_default();
                let Some(title) = page.title else {
                    return Err(self.structural("<page> without a <title>"));
                };
                if page.revisions.is_empty() {
                    return Ok(None);
                }
                let events = page
                    .revisions
                    .into_iter()
                    .map(|(editor, anonymous, timestamp)| EditEvent {
                        page_id: title.clone(),
                        editor_id: editor,
                        timestamp,
                        anonymous,
                    })
                    .collect();
                let mut history = PageHistory {
                    page_id: title,
                    events,
                };
                history.sort();
                Ok(Some(history))
            }
            _ => Ok(None),
        }
    }

    fn finish_revision(&mut self, rev: RevisionState) {
        let contributor = match (rev.username, rev.ip) {
            (Some(user), _) => Some((user, false)),
            (None, Some(ip)) => Some((ip, true)),
            (None, None) => None,
        };
        let timestamp = rev.timestamp.as_deref().map(parse_timestamp);
        match (contributor, timestamp) {
            (Some((editor, anonymous)), Some(Ok(ts))) => {
                if let Some(page) = self.page.as_mut() {
                    page.revisions.push((editor, anonymous, ts));
                }
            }
            (contributor, timestamp) => {
                debug!(
                    "skipping revision near byte {}: contributor={:?} timestamp={:?}",
                    self.reader.buffer_position(),
                    contributor,
                    timestamp
                );
                self.skipped += 1;
            }
        }
    }

    fn push_text(&mut self, text: &str) {
        if let Some((_, buf)) = self.capture.as_mut() {
            buf.push_str(text);
        }
    }

    fn next_page(&mut self) -> Result<Option<PageHistory>, IngestError> {
        loop {
            self.buf.clear();
            let event = self
                .reader
                .read_event_into(&mut self.buf)
                .map_err(|e| IngestError::Xml {
                    offset: self.reader.error_position(),
                    message: e.to_string(),
                })?;
            match event {
                Event::Start(start) => {
                    let name = start.local_name().as_ref().to_owned();
                    self.open(&name)?;
                }
                Event::Empty(start) => {
                    let name = start.local_name().as_ref().to_owned();
                    self.open(&name)?;
                    if let Some(page) = self.close()? {
                        return Ok(Some(page));
                    }
                }
                Event::End(_) => {
                    if let Some(page) = self.close()? {
                        return Ok(Some(page));
                    }
                }
                Event::Text(text) => {
                    if self.capture.is_some() {
                        let text = text.xml10_content().into_owned();
                        self.push_text(&text);
                    }
                }
                Event::CData(data) => {
                    if self.capture.is_some() {
                        let text = data.xml10_content().into_owned();
                        self.push_text(&text);
                    }
                }
                Event::GeneralRef(reference) => {
                    if self.capture.is_some() {
                        let resolved = if reference.is_char_ref() {
                            reference
                                .resolve_char_ref()
                                .ok()
                                .flatten()
                                .map(String::from)
                        } else {
                            resolve_predefined_entity(&reference).map(str::to_owned)
                        };
                        let Some(resolved) = resolved else {
                            let message =
                                format!("unknown entity reference &{};", &*reference);
                            return Err(self.structural(message));
                        };
                        self.push_text(&resolved);
                    }
                }
                Event::Eof => {
                    if !self.stack.is_empty() {
                        return Err(self.structural(format!(
                            "unexpected end of document inside <{}>",
                            self.stack.last().map(String::as_str).unwrap_or("")
                        )));
                    }
                    return Ok(None);
                }
                Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
            }
        }
    }
}

impl<R: BufRead> Iterator for MediaWikiPages<R> {
    type Item = Result<PageHistory, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_page() {
            Ok(Some(page)) => Some(Ok(page)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Reads a whole MediaWiki export into an [`EditStream`].
///
/// Registered contributors are identified by username, unregistered ones by
/// their IP string (and flagged anonymous). Revisions with neither, or with
/// a missing timestamp, are skipped and tallied in [`EditStream::skipped`].
pub fn parse_mediawiki_xml<R: Read>(reader: R) -> Result<EditStream, IngestError> {
    let mut pages = MediaWikiPages::new(BufReader::new(reader));
    let mut builder = StreamBuilder::default();
    for page in pages.by_ref() {
        builder.push_page(page?);
    }
    builder.skipped = pages.skipped();
    Ok(builder.finish())
}
