//! Text graph files: first line `n m`, then `m` lines `u v w`, both directions
//! listed explicitly, `#` lines ignored. Serialization is canonical (arcs
//! sorted by `(from, to)`), so parse -> serialize -> parse is the identity.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{GraphError, ValidateOptions, WeightedDigraph};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("expected {expected} arcs, found {found}")]
    ArcCount { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse(text: &str, opts: ValidateOptions) -> Result<WeightedDigraph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines
        .next()
        .ok_or_else(|| FormatError::Malformed(0, "empty file".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| FormatError::Malformed(ln, "bad node count".into()))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| FormatError::Malformed(ln, "bad arc count".into()))?;
    let mut raw = Vec::with_capacity(m);
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let parse3 = (|| {
            let u: usize = it.next()?.parse().ok()?;
            let v: usize = it.next()?.parse().ok()?;
            let w: u64 = it.next()?.parse().ok()?;
            if it.next().is_some() {
                return None;
            }
            Some((u, v, w))
        })();
        match parse3 {
            Some(arc) => raw.push(arc),
            None => return Err(FormatError::Malformed(ln, format!("bad arc line {line:?}"))),
        }
    }
    if raw.len() != m {
        return Err(FormatError::ArcCount { expected: m, found: raw.len() });
    }
    Ok(WeightedDigraph::validate(n, raw, opts)?)
}

pub fn serialize(g: &WeightedDigraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", g.n(), g.arc_count());
    for a in g.arcs() {
        let _ = writeln!(s, "{} {} {}", a.from, a.to, a.weight);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::triangle3;

    #[test]
    fn roundtrip_is_identity() {
        let g = triangle3();
        let text = serialize(&g);
        let g2 = parse(&text, ValidateOptions::default()).unwrap();
        assert_eq!(serialize(&g2), text);
        assert_eq!(g2.arcs(), g.arcs());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# reference triangle\n3 6\n\n0 1 2\n0 2 6\n1 0 1\n# mid comment\n1 2 3\n2 0 1\n2 1 1\n";
        let g = parse(text, ValidateOptions::default()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.weight(g.find_arc(0, 2).unwrap()), 6);
    }

    #[test]
    fn arc_count_mismatch_is_reported() {
        let text = "2 2\n0 1 1\n";
        assert!(matches!(
            parse(text, ValidateOptions::default()),
            Err(FormatError::ArcCount { expected: 2, found: 1 })
        ));
    }
}
