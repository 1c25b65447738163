//! Graph text and JSON formats.
//!
//! The text format has one item per line:
//!
//! ```text
//! # comment
//! edge <id> <tail> <head>
//! vertex <id>
//! ```
//!
//! `vertex` lines are only needed for isolated vertices.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

fn parse_id(tok: Option<&str>, line: usize, what: &str) -> Result<u32> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("line {line}: missing {what}")))?;
    tok.parse().map_err(|_| Error::Parse(format!("line {line}: bad {what} '{tok}'")))
}

/// Parses the text format.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let n = n + 1;
        match toks.next() {
            Some("edge") => {
                let id = parse_id(toks.next(), n, "edge id")?;
                let tail = parse_id(toks.next(), n, "tail")?;
                let head = parse_id(toks.next(), n, "head")?;
                edges.push(Edge { id, tail, head });
            }
            Some("vertex") => vertices.push(parse_id(toks.next(), n, "vertex id")?),
            Some(other) => return Err(Error::Parse(format!("line {n}: unknown keyword '{other}'"))),
            None => unreachable!(),
        }
        if let Some(extra) = toks.next() {
            return Err(Error::Parse(format!("line {n}: unexpected '{extra}'")));
        }
    }
    if edges.is_empty() && vertices.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Graph::new(vertices, edges)
}

/// Writes the text format.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    for &v in g.vertices() {
        if g.degree(v) == 0 {
            let _ = writeln!(out, "vertex {v}");
        }
    }
    for e in g.edges() {
        let _ = writeln!(out, "edge {} {} {}", e.id, e.tail, e.head);
    }
    out
}

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string_pretty(g).expect("graphs always serialize")
}

pub fn from_json(s: &str) -> Result<Graph> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses either format, choosing JSON when the text starts with `{`.
pub fn parse_any(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        parse_graph(text)
    }
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), reason: e.to_string() })?;
    parse_any(&text)
}

/// FNV-1a hash of the text format, for provenance records.
pub fn graph_hash(g: &Graph) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in write_graph(g).bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}
