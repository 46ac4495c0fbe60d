//! Plain-text graph files: a header line `n m`, then `m` lines `u v` with
//! 0-based vertex indices. Loops are written `u u`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::MultiGraph;

impl fmt::Display for MultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n(), self.m())?;
        for (u, v) in self.edges() {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let err = |message: String| Error::Parse {
        line: lineno,
        message,
    };
    let mut fields = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = fields
            .next()
            .ok_or_else(|| err(format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| err(format!("{what} {tok:?} is not a non-negative integer")))
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if fields.next().is_some() {
        return Err(err(format!("expected two fields, got {line:?}")));
    }
    Ok((a, b))
}

pub fn parse_graph(text: &str) -> Result<MultiGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input, expected header \"n m\"".into(),
    })?;
    let (n, m) = parse_pair(header, 1)?;
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "vertex count must be at least 1".into(),
        });
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let Some((lineno, line)) = lines.next() else {
            return Err(Error::Parse {
                line: edges.len() + 2,
                message: format!("expected {m} edges, found {}", edges.len()),
            });
        };
        let (u, v) = parse_pair(line, lineno)?;
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: lineno,
                message: format!("edge ({u}, {v}) out of range for n = {n}"),
            });
        }
        edges.push((u, v));
    }
    if let Some((lineno, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::Parse {
            line: lineno,
            message: format!("unexpected content after {m} edges: {line:?}"),
        });
    }
    MultiGraph::new(n, edges)
}

impl FromStr for MultiGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_graph(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_text_form() {
        let g = MultiGraph::new(3, vec![(0, 1), (2, 2), (1, 0)]).unwrap();
        assert_eq!(g.to_string(), "3 3\n0 1\n2 2\n1 0\n");
        assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            ("", 1),
            ("3\n", 1),
            ("0 0\n", 1),
            ("3 2\n0 1\n", 3),
            ("3 2\n0 1\n1 x\n", 3),
            ("3 1\n0 5\n", 2),
            ("3 1\n0 1 2\n", 2),
            ("3 1\n0 1\n1 2\n", 3),
        ];
        for (text, line) in cases {
            match parse_graph(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn text_round_trip(n in 1usize..12, raw in proptest::collection::vec((0usize..100, 0usize..100), 0..30)) {
            let edges = raw.into_iter().map(|(u, v)| (u % n, v % n)).collect();
            let g = MultiGraph::new(n, edges).unwrap();
            let text = g.to_string();
            let back: MultiGraph = text.parse().unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
