//! Plain-text instance files.
//!
//! ```text
//! # comment
//! gi <n> <m> <num_colors> <start> <quota>
//! p <color> <x> <y> <z>
//! v <vertex> <color> <color> ...
//! e <u> <v> <weight>
//! ```
//!
//! Position lines are optional but, when present, must cover every color.
//! Vertices without a `v` line carry no colors. Repeated edges keep the
//! smallest weight.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Color, Edge, InspectionInstance};

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut col = None;
        for (i, ch) in text.char_indices() {
            match (ch.is_whitespace(), col) {
                (false, None) => col = Some(i),
                (true, Some(start)) => {
                    items.push((start + 1, &text[start..i]));
                    col = None;
                }
                _ => {}
            }
        }
        if let Some(start) = col {
            items.push((start + 1, &text[start..]));
        }
        Tokens { line, items, at: 0 }
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let end = self.items.last().map_or(1, |(c, s)| c + s.len());
        let (col, tok) = *self
            .items
            .get(self.at)
            .ok_or_else(|| Error::parse(self.line, end, format!("missing {what}")))?;
        self.at += 1;
        tok.parse()
            .map_err(|_| Error::parse(self.line, col, format!("invalid {what} '{tok}'")))
    }

    fn rest<T: FromStr>(&mut self, what: &str) -> Result<Vec<T>> {
        let mut out = Vec::new();
        while self.at < self.items.len() {
            out.push(self.next(what)?);
        }
        Ok(out)
    }

    fn finish(&self) -> Result<()> {
        match self.items.get(self.at) {
            Some(&(col, tok)) => Err(Error::parse(self.line, col, format!("unexpected '{tok}'"))),
            None => Ok(()),
        }
    }
}

/// Parses an instance file. Duplicate edges are logged as a warning.
pub fn parse_instance(text: &str) -> Result<InspectionInstance> {
    let mut header: Option<(usize, usize, usize, usize, usize)> = None;
    let mut positions: Vec<Option<[f64; 3]>> = Vec::new();
    let mut any_position = false;
    let mut colors: Vec<Vec<Color>> = Vec::new();
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tok = Tokens::new(line, content);
        let Some(&(col, kind)) = tok.items.first() else {
            continue;
        };
        tok.at = 1;
        if kind != "gi" && header.is_none() {
            return Err(Error::parse(
                line,
                col,
                "expected header 'gi n m colors start quota'",
            ));
        }
        match kind {
            "gi" => {
                if header.is_some() {
                    return Err(Error::parse(line, col, "duplicate header"));
                }
                let h = (
                    tok.next("vertex count")?,
                    tok.next("edge count")?,
                    tok.next("color count")?,
                    tok.next("start vertex")?,
                    tok.next("quota")?,
                );
                colors = vec![Vec::new(); h.0];
                positions = vec![None; h.2];
                header = Some(h);
            }
            "p" => {
                let c: usize = tok.next("color")?;
                let p = [tok.next("x")?, tok.next("y")?, tok.next("z")?];
                let slot = positions.get_mut(c).ok_or(Error::InvalidId {
                    id: c,
                    bound: header.unwrap().2,
                })?;
                *slot = Some(p);
                any_position = true;
            }
            "v" => {
                let v: usize = tok.next("vertex")?;
                let list: Vec<Color> = tok.rest("color")?;
                colors
                    .get_mut(v)
                    .ok_or(Error::InvalidId {
                        id: v,
                        bound: header.unwrap().0,
                    })?
                    .extend(list);
            }
            "e" => {
                let u: usize = tok.next("endpoint")?;
                let v: usize = tok.next("endpoint")?;
                let w: f64 = tok.next("weight")?;
                if w < 0.0 {
                    return Err(Error::NegativeWeight(w));
                }
                edges.push(Edge::new(u, v, w));
            }
            other => return Err(Error::parse(line, col, format!("unknown record '{other}'"))),
        }
        tok.finish()?;
    }

    let (n, m, num_colors, start, quota) =
        header.ok_or_else(|| Error::parse(1, 1, "missing header"))?;
    let lines = text.lines().count().max(1);
    if edges.len() != m {
        return Err(Error::parse(
            lines,
            1,
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    let positions = if any_position {
        let all: Option<Vec<[f64; 3]>> = positions.into_iter().collect();
        Some(all.ok_or_else(|| Error::parse(lines, 1, "positions missing for some colors"))?)
    } else {
        None
    };
    let inst = InspectionInstance::new(n, edges, colors, num_colors, start, quota, positions)?;
    if inst.collapsed_edges() > 0 {
        log::warn!(
            "{} duplicate edges collapsed to their smallest weight",
            inst.collapsed_edges()
        );
    }
    Ok(inst)
}

/// Serializes an instance; parsing the result gives back an equal instance.
pub fn write_instance(inst: &InspectionInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "gi {} {} {} {} {}",
        inst.vertex_count(),
        inst.edges().len(),
        inst.num_colors(),
        inst.start(),
        inst.quota()
    );
    if let Some(pos) = inst.positions() {
        for (c, p) in pos.iter().enumerate() {
            let _ = writeln!(out, "p {c} {} {} {}", p[0], p[1], p[2]);
        }
    }
    for v in 0..inst.vertex_count() {
        let cs = inst.colors(v);
        if cs.is_empty() {
            continue;
        }
        let _ = write!(out, "v {v}");
        for c in cs {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    for e in inst.edges() {
        let _ = writeln!(out, "e {} {} {}", e.u, e.v, e.weight);
    }
    out
}

pub fn read_instance(path: &Path) -> Result<InspectionInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text)
}

pub fn save_instance(inst: &InspectionInstance, path: &Path) -> Result<()> {
    std::fs::write(path, write_instance(inst)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = "\
gi 3 2 2 0 1
p 0 0 0 0
p 1 1.5 -2 0.25
v 1 0
v 2 0 1
e 0 1 1.5
e 1 2 2
";

    #[test]
    fn golden_round_trip() {
        let inst = parse_instance(GOLDEN).unwrap();
        assert_eq!(inst.vertex_count(), 3);
        assert_eq!(inst.colors(2), &[0, 1]);
        assert_eq!(inst.positions().unwrap()[1], [1.5, -2.0, 0.25]);
        assert_eq!(write_instance(&inst), GOLDEN);
    }

    #[test]
    fn comments_and_duplicates() {
        let text = "# header follows\ngi 2 3 1 0 1\nv 1 0 # one color\ne 0 1 3\ne 1 0 2\ne 0 1 5\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.edges(), &[Edge::new(0, 1, 2.0)]);
        assert_eq!(inst.collapsed_edges(), 2);
    }

    #[test]
    fn error_positions() {
        let bad = |t: &str| parse_instance(t).unwrap_err();
        assert!(matches!(
            bad("v 0 1\n"),
            Error::Parse {
                line: 1,
                column: 1,
                ..
            }
        ));
        assert!(matches!(
            bad("gi 2 1 1 0 0\ne 0 x 1\n"),
            Error::Parse {
                line: 2,
                column: 5,
                ..
            }
        ));
        assert!(matches!(
            bad("gi 2 1 1 0 0\ne 0 1\n"),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            bad("gi 2 1 1 0 0\ne 0 1 -1\n"),
            Error::NegativeWeight(_)
        ));
        assert!(matches!(
            bad("gi 2 1 1 0 0\ne 0 7 1\n"),
            Error::InvalidId { id: 7, bound: 2 }
        ));
        assert!(matches!(
            bad("gi 2 1 1 0 0\nv 5 0\ne 0 1 1\n"),
            Error::InvalidId { id: 5, .. }
        ));
        assert!(matches!(
            bad("gi 2 2 1 0 0\ne 0 1 1\n"),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            bad("gi 2 1 1 0 0\ne 0 1 1 9\n"),
            Error::Parse { column: 9, .. }
        ));
        assert!(matches!(
            bad("gi 2 1 1 0 0\nq\n"),
            Error::Parse { line: 2, .. }
        ));
    }
}
