//! Rotation files: one line `i: c1 c2 ... cL` per vertex `i`, listing its
//! neighbors in rotation order. Blank lines and `#` comments are skipped.

use std::fmt::Write as _;

use biembed_core::derive::NeighborRotations;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct RotParseError {
    pub line: usize,
    pub message: String,
}

pub fn render(rot: &NeighborRotations) -> String {
    let mut out = String::new();
    for (i, r) in rot.rotations().iter().enumerate() {
        write!(out, "{i}:").unwrap();
        for c in r {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<NeighborRotations, RotParseError> {
    let mut rotations = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fail = |message: String| RotParseError { line, message };
        let (vertex, rest) = body
            .split_once(':')
            .ok_or_else(|| fail("expected `<vertex>: <neighbors>`".into()))?;
        let vertex: usize = vertex
            .trim()
            .parse()
            .map_err(|_| fail(format!("`{}` is not a vertex", vertex.trim())))?;
        if vertex != rotations.len() {
            return Err(fail(format!(
                "expected vertex {}, found vertex {vertex}",
                rotations.len()
            )));
        }
        let neighbors = rest
            .split_whitespace()
            .map(|w| w.parse::<u32>().map_err(|_| fail(format!("`{w}` is not a vertex"))))
            .collect::<Result<Vec<_>, _>>()?;
        rotations.push(neighbors);
    }
    Ok(NeighborRotations::new(rotations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "0: 1 2\n1: 2 0\n2: 0 1\n";
        let rot = parse(text).unwrap();
        assert_eq!(rot.vertex_count(), 3);
        assert_eq!(render(&rot), text);
    }

    #[test]
    fn errors_name_lines() {
        assert_eq!(parse("0: 1\n2: 0\n").unwrap_err().line, 2);
        assert_eq!(parse("# c\n0 1 2\n").unwrap_err().line, 2);
        assert_eq!(parse("0: 1 x\n").unwrap_err().line, 1);
    }
}
