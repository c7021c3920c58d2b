//! Line-oriented text format for current graphs.
//!
//! ```text
//! # optional header comments
//! group 21
//! vertices 10
//! edge 0 0 1 7
//! ...
//! rot 0 0+ 14- 3+
//! ...
//! ```
//!
//! `edge <id> <tail> <head> <current>` gives the current on the `+` dart,
//! in `1..n`. Edges are listed by id from 0 and `rot` lines by vertex from
//! 0, one per vertex. Text after `#` is ignored; comment lines before the
//! first directive are kept as the file's header.

use std::fmt::Write as _;

use biembed_core::topology::{Dart, EmbeddedMultigraph};
use biembed_core::CurrentGraph;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CgFile {
    /// Header comment lines without the leading `#`.
    pub header: Vec<String>,
    pub graph: CurrentGraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`{directive}` expects {expected} fields, found {found}")]
    FieldCount {
        directive: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not a non-negative integer")]
    BadNumber(String),
    #[error("`{0}` is not a dart (expected e.g. `3+` or `3-`)")]
    BadDart(String),
    #[error("`{0}` given twice")]
    Repeated(&'static str),
    #[error("`{0}` must come first")]
    OutOfOrder(&'static str),
    #[error("expected edge {expected}, found edge {found}")]
    EdgeOrder { expected: usize, found: usize },
    #[error("expected rotation of vertex {expected}, found vertex {found}")]
    RotOrder { expected: usize, found: usize },
    #[error("current 0 is not allowed")]
    ZeroCurrent,
    #[error("current {value} is outside 1..{modulus}")]
    CurrentOutOfRange { value: u64, modulus: u32 },
    #[error("vertex {vertex} does not exist ({count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("modulus must be a positive multiple of 3 below 2^32, got {0}")]
    BadModulus(u64),
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn number(line: usize, field: &str) -> Result<u64, ParseError> {
    field
        .parse()
        .map_err(|_| err(line, ParseErrorKind::BadNumber(field.to_string())))
}

fn dart(line: usize, field: &str) -> Result<Dart, ParseError> {
    let bad = || err(line, ParseErrorKind::BadDart(field.to_string()));
    let (edge, sign) = field.split_at(field.len().saturating_sub(1));
    let edge: usize = edge.parse().map_err(|_| bad())?;
    match sign {
        "+" => Ok(Dart::plus(edge)),
        "-" => Ok(Dart::minus(edge)),
        _ => Err(bad()),
    }
}

fn fields(
    line: usize,
    directive: &'static str,
    rest: &[&str],
    expected: usize,
) -> Result<(), ParseError> {
    if rest.len() != expected {
        return Err(err(
            line,
            ParseErrorKind::FieldCount {
                directive,
                expected,
                found: rest.len(),
            },
        ));
    }
    Ok(())
}

pub fn parse(text: &str) -> Result<CgFile, ParseError> {
    let mut header = Vec::new();
    let mut modulus: Option<u32> = None;
    let mut vertices: Option<usize> = None;
    let mut edges = Vec::new();
    let mut currents = Vec::new();
    let mut rotations: Vec<Vec<Dart>> = Vec::new();
    // line of each rotation, for reporting errors found after parsing
    let mut rot_lines = Vec::new();
    let mut started = false;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let (body, comment) = match raw.find('#') {
            Some(at) => (&raw[..at], Some(&raw[at + 1..])),
            None => (raw, None),
        };
        let words: Vec<&str> = body.split_whitespace().collect();
        let Some((&directive, rest)) = words.split_first() else {
            if let (false, Some(c)) = (started, comment) {
                header.push(c.to_string());
            }
            continue;
        };
        started = true;
        match directive {
            "group" => {
                fields(line, "group", rest, 1)?;
                if modulus.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("group")));
                }
                let n = number(line, rest[0])?;
                if n == 0 || n % 3 != 0 || n > u32::MAX as u64 {
                    return Err(err(line, ParseErrorKind::BadModulus(n)));
                }
                modulus = Some(n as u32);
            }
            "vertices" => {
                fields(line, "vertices", rest, 1)?;
                if modulus.is_none() {
                    return Err(err(line, ParseErrorKind::OutOfOrder("group")));
                }
                if vertices.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("vertices")));
                }
                vertices = Some(number(line, rest[0])? as usize);
            }
            "edge" => {
                fields(line, "edge", rest, 4)?;
                let (Some(n), Some(count)) = (modulus, vertices) else {
                    return Err(err(line, ParseErrorKind::OutOfOrder("group and vertices")));
                };
                if !rotations.is_empty() {
                    return Err(err(line, ParseErrorKind::OutOfOrder("edge")));
                }
                let id = number(line, rest[0])? as usize;
                if id != edges.len() {
                    return Err(err(
                        line,
                        ParseErrorKind::EdgeOrder {
                            expected: edges.len(),
                            found: id,
                        },
                    ));
                }
                let tail = number(line, rest[1])? as usize;
                let head = number(line, rest[2])? as usize;
                for vertex in [tail, head] {
                    if vertex >= count {
                        return Err(err(line, ParseErrorKind::VertexOutOfRange { vertex, count }));
                    }
                }
                let c = number(line, rest[3])?;
                if c == 0 {
                    return Err(err(line, ParseErrorKind::ZeroCurrent));
                }
                if c >= n as u64 {
                    return Err(err(
                        line,
                        ParseErrorKind::CurrentOutOfRange {
                            value: c,
                            modulus: n,
                        },
                    ));
                }
                edges.push((tail, head));
                currents.push(c as u32);
            }
            "rot" => {
                let Some(count) = vertices else {
                    return Err(err(line, ParseErrorKind::OutOfOrder("vertices")));
                };
                let Some((&v, darts)) = rest.split_first() else {
                    return Err(err(
                        line,
                        ParseErrorKind::FieldCount {
                            directive: "rot",
                            expected: 2,
                            found: 0,
                        },
                    ));
                };
                let v = number(line, v)? as usize;
                if v != rotations.len() {
                    return Err(err(
                        line,
                        ParseErrorKind::RotOrder {
                            expected: rotations.len(),
                            found: v,
                        },
                    ));
                }
                if v >= count {
                    return Err(err(line, ParseErrorKind::VertexOutOfRange { vertex: v, count }));
                }
                let darts = darts
                    .iter()
                    .map(|d| dart(line, d))
                    .collect::<Result<Vec<_>, _>>()?;
                rotations.push(darts);
                rot_lines.push(line);
            }
            other => {
                return Err(err(line, ParseErrorKind::UnknownDirective(other.to_string())));
            }
        }
    }

    let end = last_line + 1;
    let n = modulus.ok_or(err(end, ParseErrorKind::Missing("group")))?;
    let count = vertices.ok_or(err(end, ParseErrorKind::Missing("vertices")))?;
    if rotations.len() != count {
        return Err(err(
            end,
            ParseErrorKind::Invalid(format!(
                "expected rotations for {count} vertices, found {}",
                rotations.len()
            )),
        ));
    }
    let emb = EmbeddedMultigraph::new(count, edges, rotations).map_err(|e| {
        use biembed_core::topology::TopologyError as T;
        let at = match &e {
            T::DartOutOfRange { vertex, .. } | T::DartAtWrongVertex { vertex, .. } => {
                rot_lines[*vertex]
            }
            _ => end,
        };
        err(at, ParseErrorKind::Invalid(e.to_string()))
    })?;
    let graph = CurrentGraph::new(emb, n, currents)
        .map_err(|e| err(end, ParseErrorKind::Invalid(e.to_string())))?;
    Ok(CgFile { header, graph })
}

/// Canonical text of a file: header, `group`, `vertices`, edges by id,
/// rotations by vertex.
pub fn render(file: &CgFile) -> String {
    let mut out = String::new();
    for c in &file.header {
        writeln!(out, "#{c}").unwrap();
    }
    let cg = &file.graph;
    let emb = cg.embedding();
    writeln!(out, "group {}", cg.modulus()).unwrap();
    writeln!(out, "vertices {}", cg.vertex_count()).unwrap();
    for (e, &(t, h)) in emb.edges().iter().enumerate() {
        writeln!(out, "edge {e} {t} {h} {}", cg.currents()[e]).unwrap();
    }
    for (v, rot) in emb.rotations().iter().enumerate() {
        write!(out, "rot {v}").unwrap();
        for d in rot {
            write!(out, " {d}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn render_graph(cg: &CurrentGraph) -> String {
    render(&CgFile {
        header: Vec::new(),
        graph: cg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = "\
# theta graph over Z_3
group 3
vertices 2
edge 0 0 1 1
edge 1 0 1 1
edge 2 0 1 1
rot 0 0+ 1+ 2+
rot 1 0- 1- 2-
";

    #[test]
    fn round_trip() {
        let f = parse(THETA).unwrap();
        assert_eq!(f.header, vec![" theta graph over Z_3".to_string()]);
        assert_eq!(render(&f), THETA);
        assert_eq!(parse(&render(&f)).unwrap(), f);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = THETA.replace("edge 1 0 1 1", "\nedge 1 0 1 1   # middle\n# note");
        let f = parse(&text).unwrap();
        assert_eq!(render(&f), THETA);
    }

    #[test]
    fn zero_current_names_line() {
        let e = parse(&THETA.replace("edge 2 0 1 1", "edge 2 0 1 0")).unwrap_err();
        assert_eq!(e.line, 6);
        assert_eq!(e.kind, ParseErrorKind::ZeroCurrent);
        assert!(e.to_string().starts_with("line 6:"));
    }

    #[test]
    fn structural_errors() {
        let e = parse(&THETA.replace("edge 1 0 1 1", "edge 4 0 1 1")).unwrap_err();
        assert_eq!((e.line, e.kind), (5, ParseErrorKind::EdgeOrder { expected: 1, found: 4 }));
        let e = parse(&THETA.replace("rot 0 0+ 1+ 2+", "rot 0 0+ 1+ 2-")).unwrap_err();
        assert_eq!(e.line, 7);
        let e = parse(&THETA.replace("rot 1 0- 1- 2-\n", "")).unwrap_err();
        assert_eq!(e.line, 8);
        let e = parse(&THETA.replace("group 3", "group 4")).unwrap_err();
        assert_eq!((e.line, e.kind), (2, ParseErrorKind::BadModulus(4)));
        let e = parse(&THETA.replace("rot 1 0- 1- 2-", "rot 1 0- 1- 2x")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BadDart("2x".into()));
        let e = parse("vertices 2\n").unwrap_err();
        assert_eq!(e.line, 1);
    }
}
