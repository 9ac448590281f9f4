use std::io::{BufRead, Write};

use super::{parse_int, IoError};
use crate::edge_set::EdgeSet;
use crate::graph::{EdgeRecord, GraphError, HeteroGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkFileOptions {
    pub has_weight: bool,
    pub delimiter: char,
    pub comment_prefix: Option<char>,
}

impl Default for LinkFileOptions {
    fn default() -> Self {
        LinkFileOptions { has_weight: false, delimiter: '\t', comment_prefix: None }
    }
}

impl LinkFileOptions {
    pub fn weighted() -> Self {
        LinkFileOptions { has_weight: true, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), IoError> {
        if self.delimiter.is_ascii_digit() {
            return Err(IoError::InvalidDelimiter(self.delimiter));
        }
        Ok(())
    }
}

/// Streaming link-file parser yielding one record per data line.
pub struct LinkReader<R> {
    input: R,
    opts: LinkFileOptions,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> LinkReader<R> {
    pub fn new(input: R, opts: LinkFileOptions) -> Result<Self, IoError> {
        opts.validate()?;
        Ok(LinkReader { input, opts, line_no: 0, buf: String::new() })
    }

    fn parse_line(&self, line: &str) -> Result<EdgeRecord, IoError> {
        let n = self.line_no;
        let fields: Vec<&str> = line.split(self.opts.delimiter).collect();
        match (fields.len(), self.opts.has_weight) {
            (3, true) => return Err(IoError::MissingWeight { line: n }),
            (4, false) => return Err(IoError::UnexpectedWeight { line: n }),
            (3 | 4, _) => {}
            (got, _) => return Err(IoError::FieldCount { line: n, got }),
        }
        let src = parse_int(n, "source id", fields[0])?;
        let dst = parse_int(n, "destination id", fields[1])?;
        let etype = parse_int(n, "edge type", fields[2])?;
        let weight = match fields.get(3) {
            None => None,
            Some(raw) => {
                let w: f64 = raw.parse().map_err(|e: std::num::ParseFloatError| IoError::InvalidField {
                    line: n,
                    field: "weight",
                    value: raw.to_string(),
                    reason: e.to_string(),
                })?;
                if !w.is_finite() {
                    return Err(IoError::InvalidField {
                        line: n,
                        field: "weight",
                        value: raw.to_string(),
                        reason: "not a finite number".into(),
                    });
                }
                Some(w)
            }
        };
        Ok(EdgeRecord { src, dst, etype, weight })
    }
}

impl<R: BufRead> Iterator for LinkReader<R> {
    type Item = Result<EdgeRecord, IoError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line_no += 1;
            let line = self.buf.trim_end_matches(['\n', '\r']);
            if line.is_empty() {
                continue;
            }
            if let Some(prefix) = self.opts.comment_prefix {
                if line.starts_with(prefix) {
                    continue;
                }
            }
            return Some(self.parse_line(line));
        }
    }
}

/// Read every record of a link file in file order.
pub fn read_link_file<R: BufRead>(input: R, opts: &LinkFileOptions) -> Result<Vec<EdgeRecord>, IoError> {
    LinkReader::new(input, opts.clone())?.collect()
}

/// Write the selected edges (all edges when `selected` is `None`) in
/// canonical `(src, dst, etype)` order with original node ids.
pub fn write_link_file<W: Write>(g: &HeteroGraph, selected: Option<&EdgeSet>, mut out: W) -> Result<usize, IoError> {
    if let Some(sel) = selected {
        if sel.universe() != g.m() {
            return Err(GraphError::SelectionMismatch { expected: g.m(), found: sel.universe() }.into());
        }
    }
    let mut written = 0;
    for e in g.edge_ids() {
        if selected.is_some_and(|s| !s.contains(e)) {
            continue;
        }
        let r = g.record(e);
        match r.weight {
            Some(w) => writeln!(out, "{}\t{}\t{}\t{}", r.src, r.dst, r.etype, w)?,
            None => writeln!(out, "{}\t{}\t{}", r.src, r.dst, r.etype)?,
        }
        written += 1;
    }
    out.flush()?;
    Ok(written)
}
