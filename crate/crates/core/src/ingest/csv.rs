use std::io::{Read, Write};

use super::{infer_anonymous, parse_timestamp, EditEvent, EditStream, IngestError, StreamBuilder};

const CANONICAL_HEADER: [&str; 4] = ["page_id", "editor_id", "timestamp", "anonymous"];

#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { delimiter: b',' }
    }
}

struct Columns {
    page: usize,
    editor: usize,
    timestamp: usize,
    anonymous: Option<usize>,
}

impl Columns {
    fn locate(header: &::csv::StringRecord) -> Result<Self, IngestError> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let required = |name: &str| {
            find(name).ok_or_else(|| IngestError::Csv {
                line: 1,
                message: format!("header is missing required column {name:?}"),
            })
        };
        Ok(Columns {
            page: required("page_id")?,
            editor: required("editor_id")?,
            timestamp: required("timestamp")?,
            anonymous: find("anonymous"),
        })
    }
}

fn parse_flag(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

/// Reads a CSV edit log with a header row naming at least `page_id`,
/// `editor_id` and `timestamp`; an `anonymous` column is optional.
///
/// Rows missing an explicit anonymity flag fall back to [`infer_anonymous`].
pub fn parse_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<EditStream, IngestError> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() {
        return Ok(EditStream::default());
    }
    let cols = Columns::locate(&header)?;

    let mut builder = StreamBuilder::default();
    let mut record = ::csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| IngestError::Csv { line, message };

        let page = &record[cols.page];
        let editor = &record[cols.editor];
        let timestamp = parse_timestamp(&record[cols.timestamp]).map_err(bad)?;
        let anonymous = match cols.anonymous.map(|i| &record[i]) {
            None => infer_anonymous(editor),
            Some(raw) if raw.trim().is_empty() => infer_anonymous(editor),
            Some(raw) => parse_flag(raw)
                .ok_or_else(|| bad(format!("anonymous flag {raw:?} is not one of 0/1/true/false")))?,
        };
        let event = EditEvent::new(page, editor, timestamp, anonymous).map_err(|e| bad(e.to_string()))?;
        builder.push(event);
    }
    Ok(builder.finish())
}

fn csv_error(e: ::csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        ::csv::ErrorKind::Io(io) => IngestError::Io(io),
        ::csv::ErrorKind::UnequalLengths { expected_len, len, .. } => IngestError::Csv {
            line,
            message: format!("expected {expected_len} columns, found {len}"),
        },
        other => IngestError::Csv {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Writes the canonical four-column form: `page_id,editor_id,timestamp,anonymous`
/// with integer timestamps and `0`/`1` flags, pages in stream order.
pub fn write_csv<W: Write>(stream: &EditStream, writer: W) -> Result<(), IngestError> {
    let mut wtr = ::csv::Writer::from_writer(writer);
    let into_io = |e: ::csv::Error| IngestError::Io(e.into());
    wtr.write_record(CANONICAL_HEADER).map_err(into_io)?;
    for event in stream.events() {
        let ts = event.timestamp.to_string();
        wtr.write_record([
            event.page_id.as_str(),
            event.editor_id.as_str(),
            ts.as_str(),
            if event.anonymous { "1" } else { "0" },
        ])
        .map_err(into_io)?;
    }
    wtr.flush()?;
    Ok(())
}
