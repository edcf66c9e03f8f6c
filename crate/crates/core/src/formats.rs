//! Instance files.
//!
//! Matrices use Matrix Market coordinate/real/general with a mandatory
//! declaration line carrying the row and column L1 bounds:
//!
//! ```text
//! %%MatrixMarket matrix coordinate real general
//! %%disc R=2 Delta=1
//! 1 2 2
//! 1 1 1.0000000000000000e0
//! 1 2 -1.0000000000000000e0
//! ```
//!
//! Hypergraphs are one `e v1 v2 ...` line per edge with 1-indexed vertices,
//! optionally preceded by `%%disc vertices=<n>`.
//!
//! The emitters are canonical: sorted coordinates, values with 17 significant
//! digits, bounds in shortest round-trip form. Parsing a canonical file and
//! emitting it again reproduces it byte for byte.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Entry, InputMatrix, SparseMatrix, SLACK};
use crate::reduction::HypergraphInstance;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Syntax {
        line,
        column,
        message: message.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    MatrixMarket,
    EdgeList,
}

impl Format {
    /// `.mtx` files are matrices; everything else is read as an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => Format::MatrixMarket,
            _ => Format::EdgeList,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Matrix(InputMatrix),
    Hypergraph(HypergraphInstance),
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (pos, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(pos),
            (true, Some(s)) => {
                out.push((s, &line[s..pos]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

fn parse_index(tok: (usize, &str), line: usize, what: &str, limit: usize) -> Result<usize, FormatError> {
    match tok.1.parse::<usize>() {
        Ok(v) if v >= 1 && v <= limit => Ok(v - 1),
        Ok(v) => syntax(line, tok.0, format!("{what} {v} outside 1..={limit}")),
        Err(_) => syntax(line, tok.0, format!("expected {what}, found {:?}", tok.1)),
    }
}

fn parse_count(tok: (usize, &str), line: usize, what: &str) -> Result<usize, FormatError> {
    tok.1
        .parse::<usize>()
        .or_else(|_| syntax(line, tok.0, format!("expected {what}, found {:?}", tok.1)))
}

fn parse_bound(tok: (usize, &str), key: &str, line: usize) -> Result<f64, FormatError> {
    let Some(raw) = tok.1.strip_prefix(key).and_then(|r| r.strip_prefix('=')) else {
        return syntax(line, tok.0, format!("expected {key}=<number>, found {:?}", tok.1));
    };
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => syntax(
            line,
            tok.0 + key.len() + 1,
            format!("{key} must be a positive number, found {raw:?}"),
        ),
    }
}

pub fn parse_matrix_market(text: &str) -> Result<InputMatrix, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let Some((ln, header)) = lines.next() else {
        return syntax(1, 1, "empty file");
    };
    let head = tokens(header);
    let expected = ["%%matrixmarket", "matrix", "coordinate", "real", "general"];
    if head.len() != expected.len()
        || head
            .iter()
            .zip(expected)
            .any(|((_, t), e)| !t.eq_ignore_ascii_case(e))
    {
        return syntax(
            ln,
            1,
            "header must be '%%MatrixMarket matrix coordinate real general'",
        );
    }

    let mut bounds = None;
    let mut size = None;
    for (ln, line) in lines.by_ref() {
        let toks = tokens(line);
        if let Some(&(col, first)) = toks.first() {
            if first == "%%disc" {
                if toks.len() != 3 {
                    return syntax(ln, col, "expected '%%disc R=<num> Delta=<num>'");
                }
                bounds = Some((parse_bound(toks[1], "R", ln)?, parse_bound(toks[2], "Delta", ln)?));
                continue;
            }
            if first.starts_with('%') {
                continue;
            }
            if toks.len() != 3 {
                return syntax(ln, col, "size line must be '<rows> <cols> <entries>'");
            }
            size = Some((
                parse_count(toks[0], ln, "row count")?,
                parse_count(toks[1], ln, "column count")?,
                parse_count(toks[2], ln, "entry count")?,
            ));
            break;
        }
    }
    let Some((row_bound, col_bound)) = bounds else {
        return Err(FormatError::Invalid(
            "missing '%%disc R=<num> Delta=<num>' header".into(),
        ));
    };
    let Some((rows, cols, nnz)) = size else {
        return Err(FormatError::Invalid("missing size line".into()));
    };
    if rows == 0 || cols == 0 {
        return Err(FormatError::Invalid(format!("empty shape {rows}x{cols}")));
    }

    let mut entries = Vec::with_capacity(nnz);
    let mut seen = HashSet::with_capacity(nnz);
    for (ln, line) in lines {
        let toks = tokens(line);
        let Some(&(col, first)) = toks.first() else {
            continue;
        };
        if first.starts_with('%') {
            continue;
        }
        if toks.len() != 3 {
            return syntax(ln, col, "entry line must be '<row> <col> <value>'");
        }
        let i = parse_index(toks[0], ln, "row", rows)?;
        let j = parse_index(toks[1], ln, "column", cols)?;
        let value = match toks[2].1.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            Ok(_) => return syntax(ln, toks[2].0, "NaN and infinite entries are rejected"),
            Err(_) => {
                return syntax(
                    ln,
                    toks[2].0,
                    format!("expected a real value, found {:?}", toks[2].1),
                )
            }
        };
        if value.abs() > 1.0 {
            return syntax(ln, toks[2].0, format!("|entry| = {} exceeds 1", value.abs()));
        }
        if !seen.insert((i, j)) {
            return syntax(ln, col, format!("duplicate entry ({}, {})", i + 1, j + 1));
        }
        entries.push(Entry {
            row: i,
            col: j,
            value,
        });
    }
    if entries.len() != nnz {
        return Err(FormatError::Invalid(format!(
            "size line declares {nnz} entries, found {}",
            entries.len()
        )));
    }

    let matrix = SparseMatrix::new(rows, cols, entries).map_err(|e| FormatError::Invalid(e.to_string()))?;
    for i in 0..rows {
        let l1 = matrix.row_l1(i);
        if l1 > row_bound * (1.0 + SLACK) {
            return Err(FormatError::Invalid(format!(
                "row {} has L1 norm {l1}, above declared R = {row_bound}",
                i + 1
            )));
        }
    }
    for (j, l1) in matrix.col_l1().into_iter().enumerate() {
        if l1 > col_bound * (1.0 + SLACK) {
            return Err(FormatError::Invalid(format!(
                "column {} has L1 norm {l1}, above declared Delta = {col_bound}",
                j + 1
            )));
        }
    }
    Ok(InputMatrix::new(matrix, row_bound, col_bound))
}

pub fn emit_matrix_market(v: &InputMatrix) -> String {
    let m = v.matrix();
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "%%disc R={} Delta={}", v.row_bound(), v.col_bound());
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz());
    for e in m.entries() {
        let _ = writeln!(out, "{} {} {:.16e}", e.row + 1, e.col + 1, e.value);
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<HypergraphInstance, FormatError> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for (ln, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let toks = tokens(line);
        let Some(&(col, first)) = toks.first() else {
            continue;
        };
        if first == "%%disc" {
            let raw = toks
                .get(1)
                .and_then(|t| t.1.strip_prefix("vertices="))
                .filter(|_| toks.len() == 2);
            match raw.map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => declared = Some(n),
                _ => return syntax(ln, col, "expected '%%disc vertices=<positive integer>'"),
            }
            continue;
        }
        if first.starts_with('%') || first.starts_with('#') {
            continue;
        }
        if first != "e" {
            return syntax(ln, col, format!("expected 'e', found {first:?}"));
        }
        if toks.len() < 2 {
            return syntax(ln, col, "edge has no vertices");
        }
        let mut verts = Vec::with_capacity(toks.len() - 1);
        for &(c, t) in &toks[1..] {
            let v = parse_index((c, t), ln, "vertex", usize::MAX)?;
            verts.push((v, c));
        }
        edges.push((ln, verts));
    }
    if edges.is_empty() {
        return Err(FormatError::Invalid("no edges".into()));
    }
    let max_seen = edges
        .iter()
        .flat_map(|(_, e)| e.iter().map(|(v, _)| v + 1))
        .max()
        .unwrap_or(0);
    let vertices = match declared {
        Some(n) if n < max_seen => {
            let (ln, c) = edges
                .iter()
                .find_map(|(ln, e)| e.iter().find(|(v, _)| *v >= n).map(|(_, c)| (*ln, *c)))
                .expect("some vertex exceeds the declaration");
            return syntax(ln, c, format!("vertex exceeds declared count {n}"));
        }
        Some(n) => n,
        None => max_seen,
    };
    for (ln, e) in &edges {
        let mut vs: Vec<usize> = e.iter().map(|(v, _)| *v).collect();
        vs.sort_unstable();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return syntax(*ln, 1, "edge repeats a vertex");
        }
    }
    let edges = edges
        .into_iter()
        .map(|(_, e)| e.into_iter().map(|(v, _)| v).collect())
        .collect();
    HypergraphInstance::from_edges(vertices, edges).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn emit_edge_list(h: &HypergraphInstance) -> String {
    let mut out = format!("%%disc vertices={}\n", h.vertices());
    for e in h.edges() {
        out.push('e');
        for v in e {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_str(text: &str, format: Format) -> Result<Instance, FormatError> {
    Ok(match format {
        Format::MatrixMarket => Instance::Matrix(parse_matrix_market(text)?),
        Format::EdgeList => Instance::Hypergraph(parse_edge_list(text)?),
    })
}

pub fn parse_reader(mut reader: impl Read, format: Format) -> Result<Instance, FormatError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_str(&text, format)
}

/// Reads an instance file; the format defaults to the one implied by the extension.
pub fn parse_instance(path: &Path, format: Option<Format>) -> Result<Instance, FormatError> {
    let text = fs::read_to_string(path)?;
    parse_str(&text, format.unwrap_or_else(|| Format::from_path(path)))
}

pub fn emit(instance: &Instance) -> String {
    match instance {
        Instance::Matrix(v) => emit_matrix_market(v),
        Instance::Hypergraph(h) => emit_edge_list(h),
    }
}
