//! Edge list text format.
//!
//! ```text
//! <num_vertices> <num_edges>
//! <src> <dst> <weight>
//! ...
//! ```
//!
//! Whitespace separated, one edge per line, edges in CSR order. Blank lines
//! and lines starting with `#` are skipped.

use std::io::{BufRead, Write};

use super::CsrGraph;
use crate::{Error, Result, VertexId};

pub fn write_edge_list<W: Write>(g: &CsrGraph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.num_vertices(), g.num_edges())?;
    for (s, d, w) in g.edges() {
        writeln!(out, "{s} {d} {w}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<CsrGraph> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
        Ok(l) => {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        }
        Err(_) => true,
    });

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let header = header?;
    let mut fields = header.split_whitespace();
    let num_vertices: usize = parse_field(fields.next(), 1, "num_vertices")?;
    let num_edges: usize = parse_field(fields.next(), 1, "num_edges")?;

    let mut edges: Vec<(VertexId, VertexId, u32)> = Vec::with_capacity(num_edges.min(1 << 24));
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let mut f = line.split_whitespace();
        let s = parse_field(f.next(), lineno, "src")?;
        let d = parse_field(f.next(), lineno, "dst")?;
        let w = parse_field(f.next(), lineno, "weight")?;
        if f.next().is_some() {
            return Err(Error::Format(format!("line {lineno}: trailing fields")));
        }
        edges.push((s, d, w));
    }
    if edges.len() != num_edges {
        return Err(Error::Format(format!(
            "header declares {num_edges} edges, found {}",
            edges.len()
        )));
    }
    CsrGraph::from_edges(num_vertices, &edges).map_err(|e| Error::Format(e.to_string()))
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, name: &str) -> Result<T> {
    let raw = field.ok_or_else(|| Error::Format(format!("line {line}: missing {name}")))?;
    raw.parse()
        .map_err(|_| Error::Format(format!("line {line}: bad {name} `{raw}`")))
}
