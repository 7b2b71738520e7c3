//! Line-oriented instance files.
//!
//! ```text
//! fpn v1 p=3 n=2
//! X: 0 1 5
//! Y: 2 7
//! Z: 4
//! ```
//!
//! Matched collections use the same header followed by `T: x y z` lines.
//! Blank lines and `#` comments are ignored. Points are little-endian base-p
//! indices.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use removal_lab::{GroupParams, MatchedTriples, Point, PointSet, Triangle, TripleSystem};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_header(line_no: usize, line: &str) -> Result<GroupParams> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("fpn") || parts.next() != Some("v1") {
        bail!("line {line_no}: expected header `fpn v1 p=<p> n=<n>`");
    }
    let (mut p, mut n) = (None, None);
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line_no}: expected key=value, got `{part}`"))?;
        let value: u32 = value
            .parse()
            .map_err(|_| anyhow!("line {line_no}: `{value}` is not a nonnegative integer"))?;
        match key {
            "p" => p = Some(value),
            "n" => n = Some(value),
            _ => bail!("line {line_no}: unknown header key `{key}`"),
        }
    }
    let (p, n) = match (p, n) {
        (Some(p), Some(n)) => (p, n),
        _ => bail!("line {line_no}: header needs both p and n"),
    };
    GroupParams::new(p, n).map_err(|e| anyhow!("line {line_no}: {e}"))
}

fn parse_points(g: &GroupParams, line_no: usize, body: &str) -> Result<Vec<Point>> {
    body.split_whitespace()
        .map(|tok| {
            let idx: u64 = tok
                .parse()
                .map_err(|_| anyhow!("line {line_no}: `{tok}` is not a point index"))?;
            g.point(idx).map_err(|e| anyhow!("line {line_no}: {e}"))
        })
        .collect()
}

pub fn parse_system(text: &str) -> Result<TripleSystem> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| anyhow!("line 1: empty instance file"))?;
    let g = parse_header(first, header)?;
    let mut sets: [Option<PointSet>; 3] = [None, None, None];
    for (line_no, line) in lines {
        let (tag, body) = line
            .split_once(':')
            .ok_or_else(|| anyhow!("line {line_no}: expected `X:`, `Y:` or `Z:`"))?;
        let slot = match tag.trim() {
            "X" => 0,
            "Y" => 1,
            "Z" => 2,
            other => bail!("line {line_no}: unknown section `{other}`"),
        };
        if sets[slot].is_some() {
            bail!("line {line_no}: section `{}` repeated", tag.trim());
        }
        let points = parse_points(&g, line_no, body)?;
        sets[slot] = Some(PointSet::from_points(g, points).map_err(|e| anyhow!("line {line_no}: {e}"))?);
    }
    let [x, y, z] = sets;
    let missing = |name: &str| anyhow!("line {}: missing section `{name}`", text.lines().count() + 1);
    Ok(TripleSystem::new(
        x.ok_or_else(|| missing("X"))?,
        y.ok_or_else(|| missing("Y"))?,
        z.ok_or_else(|| missing("Z"))?,
    )?)
}

pub fn parse_matched(text: &str) -> Result<MatchedTriples> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| anyhow!("line 1: empty matched file"))?;
    let g = parse_header(first, header)?;
    let mut triples = Vec::new();
    for (line_no, line) in lines {
        let body = line
            .strip_prefix("T:")
            .ok_or_else(|| anyhow!("line {line_no}: expected `T: x y z`"))?;
        let pts = parse_points(&g, line_no, body)?;
        let [x, y, z] = pts[..] else {
            bail!("line {line_no}: a triple needs exactly three points");
        };
        triples.push(Triangle::new(&g, x, y, z).map_err(|e| anyhow!("line {line_no}: {e}"))?);
    }
    Ok(MatchedTriples::new(g, triples)?)
}

pub fn read_system(path: &Path) -> Result<TripleSystem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_system(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_matched(path: &Path) -> Result<MatchedTriples> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matched(&text).with_context(|| format!("parsing {}", path.display()))
}

fn header(g: &GroupParams) -> String {
    format!("fpn v1 p={} n={}\n", g.p(), g.n())
}

pub fn format_system(sys: &TripleSystem) -> String {
    let mut out = header(sys.params());
    for (tag, set) in [("X", sys.x()), ("Y", sys.y()), ("Z", sys.z())] {
        out.push_str(tag);
        out.push(':');
        for u in set.iter() {
            write!(out, " {}", u.0).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn format_matched(m: &MatchedTriples) -> String {
    let mut out = header(m.params());
    for t in m.triples() {
        writeln!(out, "T: {} {} {}", t.x.0, t.y.0, t.z.0).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_round_trip() {
        let text = "fpn v1 p=3 n=2\n# comment\nX: 0 1 5\nY: 2 7\n\nZ: 4\n";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.x().to_vec(), vec![Point(0), Point(1), Point(5)]);
        assert_eq!(parse_system(&format_system(&sys)).unwrap(), sys);
    }

    #[test]
    fn empty_sections_are_allowed() {
        let sys = parse_system("fpn v1 p=2 n=1\nX:\nY: 1\nZ: 0 1\n").unwrap();
        assert!(sys.x().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("fpn v2 p=2 n=1\n", "line 1"),
            ("fpn v1 p=4 n=1\n", "line 1"),
            ("fpn v1 p=2 n=2\nX: 1\nY: 9\nZ: 0\n", "line 3"),
            ("fpn v1 p=2 n=2\nX: 1\nW: 1\n", "line 3"),
            ("fpn v1 p=2 n=2\nX: 1\nY: a\n", "line 3"),
            ("fpn v1 p=2 n=2\nX: 1\nX: 2\n", "line 3"),
            ("fpn v1 p=2 n=2\nX: 1\nY: 2\n", "line 4"),
        ];
        for (text, want) in cases {
            let err = format!("{:#}", parse_system(text).unwrap_err());
            assert!(err.contains(want), "{text:?}: {err}");
        }
    }

    #[test]
    fn matched_round_trip_and_validation() {
        let m = parse_matched("fpn v1 p=2 n=2\nT: 0 0 0\nT: 1 2 3\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(parse_matched(&format_matched(&m)).unwrap(), m);
        let err = format!("{:#}", parse_matched("fpn v1 p=2 n=2\nT: 0 0 0\nT: 1 2 2\n").unwrap_err());
        assert!(err.contains("line 3"), "{err}");
        let err = format!("{:#}", parse_matched("fpn v1 p=2 n=2\nT: 0 0\n").unwrap_err());
        assert!(err.contains("line 2"), "{err}");
    }
}
