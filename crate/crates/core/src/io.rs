//! Edge-list text format.
//!
//! First line `n m`, then m lines `u v w`; the weight is omitted for
//! unit-weight files. Vertex ids are 0-based.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::GraphError;
use crate::graph::Graph;
use crate::weight::{format_weight, parse_weight, w_one};

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or(GraphError::Parse { line: 0, msg: "empty file".into() })?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| GraphError::Parse { line: line_no, msg: "expected vertex count".into() })?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| GraphError::Parse { line: line_no, msg: "expected edge count".into() })?;
    if it.next().is_some() {
        return Err(GraphError::Parse { line: line_no, msg: "trailing tokens in header".into() });
    }
    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(GraphError::Parse {
                line: line_no,
                msg: format!("expected 'u v' or 'u v w', got {line:?}"),
            });
        }
        let u: u32 = toks[0]
            .parse()
            .map_err(|_| GraphError::Parse { line: line_no, msg: "bad vertex id".into() })?;
        let v: u32 = toks[1]
            .parse()
            .map_err(|_| GraphError::Parse { line: line_no, msg: "bad vertex id".into() })?;
        let w = if toks.len() == 3 {
            parse_weight(toks[2]).map_err(|msg| GraphError::Parse { line: line_no, msg })?
        } else {
            w_one()
        };
        edges.push((u, v, w));
    }
    if edges.len() != m {
        return Err(GraphError::Invalid(format!(
            "header promised {m} edges, file has {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges)
}

pub fn render_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    let unit = g.is_unit_weight();
    for (u, v, w) in g.edges() {
        if unit {
            let _ = writeln!(out, "{u} {v}");
        } else {
            let _ = writeln!(out, "{u} {v} {}", format_weight(&w));
        }
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    Ok(std::fs::write(path, render_graph(g))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_graph, GraphSpec};

    #[test]
    fn parses_small_path() {
        let g = parse_graph("3 2\n0 1 1\n1 2 1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn round_trips() {
        for spec in [
            GraphSpec::GnmRandom { n: 40, m: 90 },
            GraphSpec::RandomWeighted { n: 30, m: 70, w_min: 1, w_max: 9 },
        ] {
            let g = generate_graph(&spec, 5).unwrap();
            assert_eq!(parse_graph(&render_graph(&g)).unwrap(), g);
        }
    }

    #[test]
    fn rejects_zero_weight_and_garbage() {
        assert!(matches!(
            parse_graph("2 1\n0 1 0\n"),
            Err(GraphError::Invalid(_))
        ));
        assert!(matches!(
            parse_graph("2 1\n0 x\n"),
            Err(GraphError::Parse { .. })
        ));
        assert!(matches!(
            parse_graph("4 2\n0 1\n2 3\n"),
            Err(GraphError::Disconnected)
        ));
    }
}
