//! Text formats.
//!
//! Set streams: one record per line, `<set_id> <elem> <elem> ...`, `#` starts
//! a comment line, and an optional first line `!header m=<m> n=<n>`. Budgeted
//! streams (`.bset`) put a cost after the ID, grouped streams (`.gset`) a
//! group index. Graph streams (`.gstream`) hold one update per line,
//! `+ <u> <v> [<w> ...]` or `- <u> <v> [<w> ...]`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::graph::{EdgeSign, EdgeUpdate};
use super::{SetRecord, SetStream};
use crate::error::{Error, Result};

/// Which per-record attribute, if any, follows the set ID.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordKind {
    Plain,
    Budgeted,
    Grouped,
}

impl RecordKind {
    /// Picks the record layout from a file extension (`.bset`, `.gset`, anything else is plain).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bset") => RecordKind::Budgeted,
            Some("gset") => RecordKind::Grouped,
            _ => RecordKind::Plain,
        }
    }
}

struct Header {
    m: Option<usize>,
    n: Option<u64>,
}

fn parse_header(line_no: usize, rest: &str) -> Result<Header> {
    let mut header = Header { m: None, n: None };
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, format!("bad header field `{field}`")))?;
        match key {
            "m" => header.m = Some(parse_int(line_no, value)? as usize),
            "n" => header.n = Some(parse_int(line_no, value)?),
            _ => return Err(Error::parse(line_no, format!("unknown header key `{key}`"))),
        }
    }
    Ok(header)
}

fn parse_int(line_no: usize, token: &str) -> Result<u64> {
    token
        .parse::<u64>()
        .map_err(|_| Error::parse(line_no, format!("expected non-negative integer, got `{token}`")))
}

fn parse_cost(line_no: usize, token: &str) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(c) if c.is_finite() && c >= 0.0 => Ok(c),
        _ => Err(Error::parse(line_no, format!("expected non-negative cost, got `{token}`"))),
    }
}

/// Parses a set-stream file body.
pub fn parse_set_stream(text: &[u8], kind: RecordKind) -> Result<SetStream> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Format {
        line: None,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut header: Option<Header> = None;
    let mut seen_record = false;
    let mut ids = HashSet::new();
    let mut records = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("!header") {
            if seen_record || header.is_some() {
                return Err(Error::format(line_no, "header must precede all records"));
            }
            header = Some(parse_header(line_no, rest)?);
            continue;
        }
        seen_record = true;

        let mut tokens = line.split_whitespace();
        let id = parse_int(line_no, tokens.next().expect("non-empty line"))?;
        let mut record = SetRecord::new(id, Vec::new());
        match kind {
            RecordKind::Plain => {}
            RecordKind::Budgeted => {
                let token = tokens.next().ok_or_else(|| Error::parse(line_no, "missing cost"))?;
                record.cost = Some(parse_cost(line_no, token)?);
            }
            RecordKind::Grouped => {
                let token = tokens.next().ok_or_else(|| Error::parse(line_no, "missing group"))?;
                record.group = Some(parse_int(line_no, token)? as usize);
            }
        }
        let mut seen = HashSet::new();
        for token in tokens {
            let e = parse_int(line_no, token)?;
            if !seen.insert(e) {
                return Err(Error::format(line_no, format!("duplicate element {e} in record")));
            }
            record.elements.push(e);
        }
        if !ids.insert(id) {
            return Err(Error::format(line_no, format!("duplicate set id {id}")));
        }
        records.push(record);
    }

    let (m, n) = header.map_or((None, None), |h| (h.m, h.n));
    if let Some(m) = m {
        if m != records.len() {
            return Err(Error::Format {
                line: None,
                message: format!("header declares m={m} but found {} records", records.len()),
            });
        }
    }
    SetStream::with_kind(records, n, kind)
}

pub fn read_set_stream(path: &Path) -> Result<SetStream> {
    let bytes = std::fs::read(path)?;
    parse_set_stream(&bytes, RecordKind::from_path(path))
}

/// Writes a stream (with header) in the layout given by its kind.
pub fn write_set_stream<W: Write>(stream: &SetStream, mut out: W) -> Result<()> {
    writeln!(out, "!header m={} n={}", stream.total_sets(), stream.universe_size())?;
    let mut line = String::new();
    for record in stream.audit() {
        line.clear();
        write!(line, "{}", record.id).unwrap();
        match stream.kind() {
            RecordKind::Plain => {}
            RecordKind::Budgeted => write!(line, " {}", record.cost.unwrap_or(0.0)).unwrap(),
            RecordKind::Grouped => write!(line, " {}", record.group.unwrap_or(0)).unwrap(),
        }
        for e in &record.elements {
            write!(line, " {e}").unwrap();
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parses a `.gstream` body into its update sequence.
pub fn parse_graph_stream(text: &[u8]) -> Result<Vec<EdgeUpdate>> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Format {
        line: None,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut updates = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let sign = match tokens.next() {
            Some("+") => EdgeSign::Insert,
            Some("-") => EdgeSign::Delete,
            Some(other) => {
                return Err(Error::parse(line_no, format!("expected `+` or `-`, got `{other}`")))
            }
            None => unreachable!("blank lines skipped"),
        };
        let nodes = tokens.map(|t| parse_int(line_no, t)).collect::<Result<Vec<_>>>()?;
        if nodes.len() < 2 {
            return Err(Error::parse(line_no, "an update needs at least two nodes"));
        }
        let update = EdgeUpdate::new(sign, nodes)
            .map_err(|message| Error::format(line_no, message))?;
        updates.push(update);
    }
    Ok(updates)
}

pub fn read_graph_stream(path: &Path) -> Result<Vec<EdgeUpdate>> {
    let bytes = std::fs::read(path)?;
    parse_graph_stream(&bytes)
}

pub fn write_graph_stream<W: Write>(updates: &[EdgeUpdate], mut out: W) -> Result<()> {
    for update in updates {
        let sign = match update.sign {
            EdgeSign::Insert => '+',
            EdgeSign::Delete => '-',
        };
        write!(out, "{sign}")?;
        for v in &update.nodes {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_records() {
        let stream = parse_set_stream(b"1 1 2\n2 3\n", RecordKind::Plain).unwrap();
        assert_eq!(stream.total_sets(), 2);
        assert_eq!(stream.universe_size(), 4);
        assert_eq!(stream.audit()[0].elements, vec![1, 2]);
        assert_eq!(stream.audit()[1].elements, vec![3]);
    }

    #[test]
    fn empty_input_is_empty_stream() {
        let stream = parse_set_stream(b"", RecordKind::Plain).unwrap();
        assert_eq!(stream.total_sets(), 0);
    }

    #[test]
    fn duplicate_element_is_rejected() {
        let err = parse_set_stream(b"1 1 1 2\n", RecordKind::Plain).unwrap_err();
        assert!(matches!(err, Error::Format { line: Some(1), .. }), "{err}");
    }

    #[test]
    fn duplicate_id_reports_line() {
        let err = parse_set_stream(b"# c\n1 1\n1 2\n", RecordKind::Plain).unwrap_err();
        assert!(matches!(err, Error::Format { line: Some(3), .. }), "{err}");
    }

    #[test]
    fn malformed_token_reports_line() {
        let err = parse_set_stream(b"1 2\n2 x\n", RecordKind::Plain).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_set_stream(b"1 -2\n", RecordKind::Plain).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn header_overrides_universe() {
        let stream = parse_set_stream(b"!header m=1 n=10\n4 1 2\n", RecordKind::Plain).unwrap();
        assert_eq!(stream.universe_size(), 10);
        assert!(parse_set_stream(b"!header m=2\n4 1 2\n", RecordKind::Plain).is_err());
        assert!(parse_set_stream(b"!header n=2\n4 1 2\n", RecordKind::Plain).is_err());
    }

    #[test]
    fn budgeted_and_grouped_layouts() {
        let b = parse_set_stream(b"1 2.5 1 2 3\n2 1 4\n", RecordKind::Budgeted).unwrap();
        assert_eq!(b.audit()[0].cost, Some(2.5));
        assert_eq!(b.audit()[0].elements, vec![1, 2, 3]);
        let g = parse_set_stream(b"1 0 1 2\n2 1 2 3\n", RecordKind::Grouped).unwrap();
        assert_eq!(g.audit()[1].group, Some(1));
        assert_eq!(g.audit()[1].elements, vec![2, 3]);
        assert!(parse_set_stream(b"1\n", RecordKind::Budgeted).is_err());
    }

    #[test]
    fn write_then_parse_round_trips() {
        let text = b"!header m=2 n=9\n3 0.5 1 8\n7 2 2\n";
        let stream = parse_set_stream(text, RecordKind::Budgeted).unwrap();
        let mut out = Vec::new();
        write_set_stream(&stream, &mut out).unwrap();
        assert_eq!(out, text);
    }

    #[test]
    fn graph_lines() {
        let ups = parse_graph_stream(b"+ 1 2\n- 2 1\n+ 1 2 3\n").unwrap();
        assert_eq!(ups.len(), 3);
        assert_eq!(ups[1].sign, EdgeSign::Delete);
        assert!(parse_graph_stream(b"+ 1\n").is_err());
        assert!(parse_graph_stream(b"* 1 2\n").is_err());
        assert!(parse_graph_stream(b"+ 1 1\n").is_err());
        let mut out = Vec::new();
        write_graph_stream(&ups, &mut out).unwrap();
        assert_eq!(out, b"+ 1 2\n- 1 2\n+ 1 2 3\n");
    }
}
