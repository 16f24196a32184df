//! Edge-list graph files.
//!
//! ```text
//! # comment (or % comment)
//! n m
//! i j [w]      (m lines, 1-based nodes, weight defaults to 1)
//! ```

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::problems::laplacian_from_edges;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub n: usize,
    pub m: usize,
    /// `(i, j, w)` with 1-based node indices, in file order.
    pub edges: Vec<(usize, usize, f64)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#') && !l.starts_with('%'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "missing 'n m' header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(hline, format!("expected 'n m', got '{header}'")));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad node count '{}'", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad edge count '{}'", fields[1])))?;
    if n == 0 {
        return Err(parse_err(hline, "node count must be positive"));
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::new();
    let mut last_line = hline;
    for (ln, line) in lines {
        last_line = ln;
        let f: Vec<&str> = line.split_whitespace().collect();
        if !(f.len() == 2 || f.len() == 3) {
            return Err(parse_err(ln, format!("expected 'i j [w]', got '{line}'")));
        }
        let node = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| parse_err(ln, format!("bad node index '{s}'")))?;
            if v == 0 || v > n {
                return Err(parse_err(ln, format!("node {v} out of range 1..={n}")));
            }
            Ok(v)
        };
        let i = node(f[0])?;
        let j = node(f[1])?;
        if i == j {
            return Err(parse_err(ln, format!("self-loop on node {i}")));
        }
        let w: f64 = match f.get(2) {
            Some(s) => s.parse().map_err(|_| parse_err(ln, format!("bad weight '{s}'")))?,
            None => 1.0,
        };
        if !w.is_finite() {
            return Err(parse_err(ln, "weight must be finite"));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(parse_err(ln, format!("duplicate edge {i}-{j}")));
        }
        edges.push((i, j, w));
    }
    if edges.len() != m {
        return Err(parse_err(
            last_line,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Ok(GraphFile { n, m, edges })
}

/// `L = D - W`, with `D` built from the row sums of `W`.
pub fn laplacian(gf: &GraphFile) -> DMatrix<f64> {
    let edges: Vec<_> = gf.edges.iter().map(|&(i, j, w)| (i - 1, j - 1, w)).collect();
    laplacian_from_edges(gf.n, &edges).expect("GraphFile invariants hold")
}
