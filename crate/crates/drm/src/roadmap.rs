//! `DRMv1`: the line-oriented roadmap file.
//!
//! ```text
//! DRMv1
//! map <map-identifier> <resolution>
//! vertices <n>
//! <id> <x> <y>
//! edges <m>
//! <u> <v> <d>
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing a written file
//! gives back the exact same bits. `#` starts a comment; blank lines are
//! skipped.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use drm_core::drm::Edge;
use drm_core::{Config2, RelaxedDrm};
use thiserror::Error;

pub const MAGIC: &str = "DRMv1";

/// Placeholder written when the roadmap has no map identifier.
const NO_MAP: &str = "-";

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {field}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub field: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    pub graph: RelaxedDrm,
    /// Map identifier, empty if none was recorded.
    pub map_id: String,
    pub resolution: f64,
}

/// Map identifiers are single tokens; whitespace and `#` become `_`.
pub fn sanitize_map_id(id: &str) -> String {
    if id.is_empty() {
        return NO_MAP.to_owned();
    }
    id.chars().map(|c| if c.is_whitespace() || c == '#' { '_' } else { c }).collect()
}

pub fn serialize(g: &RelaxedDrm, resolution: f64) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC}").unwrap();
    writeln!(s, "map {} {}", sanitize_map_id(g.map_ref()), resolution).unwrap();
    writeln!(s, "vertices {}", g.vertex_count()).unwrap();
    for (i, p) in g.vertices().iter().enumerate() {
        writeln!(s, "{i} {} {}", p.x, p.y).unwrap();
    }
    writeln!(s, "edges {}", g.edges().len()).unwrap();
    for e in g.edges() {
        writeln!(s, "{} {} {}", e.u, e.v, e.d).unwrap();
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with comments removed, split into tokens.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, field: &'static str) -> Result<(usize, Vec<&'a str>), ParseError> {
        let line = self.last + 1;
        self.next_tokens().ok_or_else(|| err(line, field, "unexpected end of file"))
    }
}

fn err(line: usize, field: &'static str, message: impl Into<String>) -> ParseError {
    ParseError { line, field, message: message.into() }
}

fn arity(line: usize, tokens: &[&str], n: usize, field: &'static str) -> Result<(), ParseError> {
    if tokens.len() == n {
        Ok(())
    } else {
        Err(err(line, field, format!("expected {n} fields, found {}", tokens.len())))
    }
}

fn keyword(line: usize, tokens: &[&str], key: &'static str, n: usize) -> Result<(), ParseError> {
    if tokens[0] != key {
        return Err(err(line, key, format!("expected `{key}`, found `{}`", tokens[0])));
    }
    arity(line, tokens, n, key)
}

fn int(line: usize, token: &str, field: &'static str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| err(line, field, format!("`{token}` is not a non-negative integer")))
}

fn float(line: usize, token: &str, field: &'static str) -> Result<f64, ParseError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(err(line, field, format!("`{token}` is not finite"))),
        Err(_) => Err(err(line, field, format!("`{token}` is not a number"))),
    }
}

pub fn parse(text: &str) -> Result<Roadmap, ParseError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };

    let (line, t) = lines.expect("magic")?;
    if t != [MAGIC] {
        return Err(err(line, "magic", format!("expected `{MAGIC}`")));
    }

    let (line, t) = lines.expect("map")?;
    keyword(line, &t, "map", 3)?;
    let map_id = if t[1] == NO_MAP { String::new() } else { t[1].to_owned() };
    let resolution = float(line, t[2], "resolution")?;
    if resolution <= 0.0 {
        return Err(err(line, "resolution", "must be positive"));
    }

    let (line, t) = lines.expect("vertices")?;
    keyword(line, &t, "vertices", 2)?;
    let n = int(line, t[1], "vertices")?;
    let mut vertices = Vec::with_capacity(n.min(1 << 20));
    for i in 0..n {
        let (line, t) = lines.expect("vertex")?;
        arity(line, &t, 3, "vertex")?;
        if int(line, t[0], "vertex id")? != i {
            return Err(err(line, "vertex id", format!("expected {i}, found `{}`", t[0])));
        }
        vertices.push(Config2::new(float(line, t[1], "x")?, float(line, t[2], "y")?));
    }

    let (line, t) = lines.expect("edges")?;
    keyword(line, &t, "edges", 2)?;
    let m = int(line, t[1], "edges")?;
    let mut edges = Vec::with_capacity(m.min(1 << 20));
    let mut seen = BTreeSet::new();
    for _ in 0..m {
        let (line, t) = lines.expect("edge")?;
        arity(line, &t, 3, "edge")?;
        let u = int(line, t[0], "u")?;
        let v = int(line, t[1], "v")?;
        if u >= v {
            return Err(err(line, "u", format!("endpoints must satisfy u < v, found {u} {v}")));
        }
        if v >= n {
            return Err(err(line, "v", format!("vertex {v} out of range (n = {n})")));
        }
        if !seen.insert((u, v)) {
            return Err(err(line, "edge", format!("duplicate edge {u} {v}")));
        }
        edges.push(Edge { u, v, d: float(line, t[2], "d")? });
    }

    if let Some((line, _)) = lines.next_tokens() {
        return Err(err(line, "trailing", "content after the last edge"));
    }
    let graph = RelaxedDrm::from_parts(vertices, edges, map_id.clone())
        .map_err(|e| err(lines.last, "graph", e.to_string()))?;
    Ok(Roadmap { graph, map_id, resolution })
}
