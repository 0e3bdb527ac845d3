//! Text formats for instances: DIMACS CNF, edge lists, hypergraph edge
//! lists, gate lists and raw bit strings. Pair instances put the two
//! components on either side of a `%%` line.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::circuit::{Circuit, Gate};
use super::graph::Graph;
use super::hitting::Hypergraph;
use super::pairs::ClauseQuery;
use super::sat::{Cnf3, Lit};
use crate::base::{encode_pair, BinStr};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dimacs,
    EdgeList,
    Hypergraph,
    Gates,
    Raw,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dimacs" => Format::Dimacs,
            "edgelist" => Format::EdgeList,
            "hs" | "hypergraph" => Format::Hypergraph,
            "gates" => Format::Gates,
            "raw" => Format::Raw,
            _ => return Err(Error::malformed(format!("unknown format {s:?}"))),
        })
    }
}

/// The format a problem's instances are written in by default.
pub fn default_format(problem_id: &str) -> Format {
    match problem_id {
        "3sat" | "ci" | "mmc" | "cmi" => Format::Dimacs,
        "hampath" => Format::EdgeList,
        "circuitsat" => Format::Gates,
        id if id.ends_with("hs") => Format::Hypergraph,
        _ => Format::Raw,
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#'))
}

fn int<T: FromStr>(tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::malformed(format!("expected a number, got {tok:?}")))
}

/// Parses DIMACS CNF. Clauses with fewer than three literals are padded by
/// repeating their last literal; variables that never occur are dropped and
/// the rest renumbered in order.
pub fn parse_dimacs(text: &str) -> Result<Cnf3> {
    let mut raw: Vec<Vec<i64>> = Vec::new();
    let mut current = Vec::new();
    for line in content_lines(text) {
        if line.starts_with('p') {
            continue;
        }
        for tok in line.split_whitespace() {
            let v: i64 = int(tok)?;
            if v == 0 {
                raw.push(std::mem::take(&mut current));
            } else {
                current.push(v);
            }
        }
    }
    if !current.is_empty() {
        raw.push(current);
    }
    let mut rename = BTreeMap::new();
    for v in raw.iter().flatten() {
        rename.insert(v.unsigned_abs(), 0u32);
    }
    for (i, slot) in rename.values_mut().enumerate() {
        *slot = i as u32 + 1;
    }
    let mut clauses = Vec::new();
    for c in &raw {
        if c.is_empty() || c.len() > 3 {
            return Err(Error::malformed(format!("clause of width {} in a 3CNF", c.len())));
        }
        let lit = |v: i64| Lit {
            var: rename[&v.unsigned_abs()],
            neg: v < 0,
        };
        let last = *c.last().unwrap();
        let padded = [lit(c[0]), lit(*c.get(1).unwrap_or(&last)), lit(*c.get(2).unwrap_or(&last))];
        clauses.push(padded);
    }
    Ok(Cnf3::new(rename.len(), clauses).canonicalize())
}

pub fn write_dimacs(f: &Cnf3) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
    }
    out
}

/// `p edge N M` followed by `e u v` lines with 1-based nodes.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut g: Option<Graph> = None;
    for line in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["p", "edge", n, _m] => {
                let n: usize = int(n)?;
                if n == 0 || n > 64 {
                    return Err(Error::malformed(format!("graph with {n} nodes")));
                }
                g = Some(Graph::empty(n));
            }
            ["e", u, v] => {
                let g = g.as_mut().ok_or_else(|| Error::malformed("edge before header"))?;
                let (u, v): (usize, usize) = (int(u)?, int(v)?);
                if u == v || u == 0 || v == 0 || u > g.n || v > g.n {
                    return Err(Error::malformed(format!("bad edge {u} {v}")));
                }
                g.add_edge(u - 1, v - 1);
            }
            _ => return Err(Error::malformed(format!("unexpected line {line:?}"))),
        }
    }
    g.ok_or_else(|| Error::malformed("missing 'p edge' header"))
}

pub fn write_edge_list(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("p edge {} {}\n", g.n, edges.len());
    for (u, v) in edges {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

/// `p hs N K` followed by `e v1 v2 ...` lines with 1-based vertices.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for line in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["p", "hs", n, k] => header = Some((int(n)?, int(k)?)),
            ["e", vs @ ..] if !vs.is_empty() => {
                let (n, _) = header.ok_or_else(|| Error::malformed("edge before header"))?;
                let mut mask = 0u64;
                for v in vs {
                    let v: usize = int(v)?;
                    if v == 0 || v > n {
                        return Err(Error::malformed(format!("vertex {v} out of range")));
                    }
                    mask |= 1 << (v - 1);
                }
                edges.push(mask);
            }
            _ => return Err(Error::malformed(format!("unexpected line {line:?}"))),
        }
    }
    let (n, k) = header.ok_or_else(|| Error::malformed("missing 'p hs' header"))?;
    if n > 64 {
        return Err(Error::malformed(format!("hypergraph with {n} vertices")));
    }
    Ok(Hypergraph::new(n, edges, k))
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("p hs {} {}\n", h.n, h.k);
    for &e in &h.edges {
        let vs: Vec<String> = (0..h.n)
            .filter(|v| e >> v & 1 == 1)
            .map(|v| (v + 1).to_string())
            .collect();
        out.push_str(&format!("e {}\n", vs.join(" ")));
    }
    out
}

/// One gate per line: `input`, `not i`, `and i j`, `or i j` (0-based).
pub fn parse_gates(text: &str) -> Result<Circuit> {
    let mut gates = Vec::new();
    for line in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let gate = match toks.as_slice() {
            ["input"] => Gate::Input,
            ["not", i] => Gate::Not(int(i)?),
            ["and", i, j] => {
                let (i, j): (usize, usize) = (int(i)?, int(j)?);
                Gate::And(i.min(j), i.max(j))
            }
            ["or", i, j] => {
                let (i, j): (usize, usize) = (int(i)?, int(j)?);
                Gate::Or(i.min(j), i.max(j))
            }
            _ => return Err(Error::malformed(format!("unexpected line {line:?}"))),
        };
        gates.push(gate);
    }
    let c = Circuit::new(gates);
    c.check()?;
    Ok(c)
}

pub fn write_gates(c: &Circuit) -> String {
    c.gates
        .iter()
        .map(|g| match g {
            Gate::Input => "input\n".to_string(),
            Gate::Not(i) => format!("not {i}\n"),
            Gate::And(i, j) => format!("and {i} {j}\n"),
            Gate::Or(i, j) => format!("or {i} {j}\n"),
        })
        .collect()
}

/// Parses an instance of `problem_id` from text.
pub fn parse_instance(problem_id: &str, text: &str, format: Option<Format>) -> Result<BinStr> {
    if let Some((a, b)) = split_pair(text) {
        return parse_pair(problem_id, a, b, format);
    }
    let format = format.unwrap_or_else(|| default_format(problem_id));
    Ok(match format {
        Format::Dimacs => parse_dimacs(text)?.encode(),
        Format::EdgeList => parse_edge_list(text)?.encode(),
        Format::Hypergraph => parse_hypergraph(text)?.encode(),
        Format::Gates => parse_gates(text)?.encode(),
        Format::Raw => BinStr::parse(&text.split_whitespace().collect::<String>())?,
    })
}

fn split_pair(text: &str) -> Option<(&str, &str)> {
    let pos = text.find("\n%%")?;
    let rest = &text[pos + 3..];
    let rest = rest.find('\n').map_or("", |i| &rest[i + 1..]);
    Some((&text[..pos + 1], rest))
}

fn parse_pair(problem_id: &str, a: &str, b: &str, format: Option<Format>) -> Result<BinStr> {
    match problem_id {
        "ci" | "cmi" => {
            let phi = parse_dimacs(a)?;
            let lits: Vec<i64> = content_lines(b)
                .flat_map(str::split_whitespace)
                .map(int)
                .collect::<Result<_>>()?;
            let mut clause = Vec::new();
            for v in lits.into_iter().filter(|&v| v != 0) {
                let var = v.unsigned_abs() as usize;
                if var == 0 || var > phi.num_vars {
                    return Err(Error::malformed(format!("clause variable {var} not in the formula")));
                }
                clause.push(Lit {
                    var: var as u32,
                    neg: v < 0,
                });
            }
            let q = ClauseQuery::new(clause);
            Ok(encode_pair(&phi.encode(), &q.encode(phi.num_vars)))
        }
        "mmc" => {
            let phi = parse_dimacs(a)?;
            let y = BinStr::parse(&b.split_whitespace().collect::<String>())?;
            Ok(encode_pair(&phi.encode(), &y))
        }
        _ => {
            let fmt = format.unwrap_or(Format::Raw);
            let x = parse_instance(problem_id, a, Some(fmt))?;
            let y = BinStr::parse(&b.split_whitespace().collect::<String>())?;
            Ok(encode_pair(&x, &y))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_pads_and_renumbers() {
        let f = parse_dimacs("c comment\np cnf 5 2\n1 0\n-1 5 0\n").unwrap();
        assert_eq!(f.num_vars, 2);
        assert_eq!(write_dimacs(&f), "p cnf 2 2\n1 1 1 0\n-1 2 2 0\n");
        assert!(f.is_canonical());
        assert!(parse_dimacs("1 2 3 4 0").is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 3)]);
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
        assert!(parse_edge_list("p edge 2 1\ne 1 3\n").is_err());
    }

    #[test]
    fn hypergraph_round_trip() {
        let h = Hypergraph::from_lists(4, &[&[1, 2, 4], &[3]], 2);
        assert_eq!(parse_hypergraph(&write_hypergraph(&h)).unwrap(), h);
    }

    #[test]
    fn gates_round_trip() {
        let c = Circuit::new(vec![Gate::Input, Gate::Not(0), Gate::Or(0, 1)]);
        assert_eq!(parse_gates(&write_gates(&c)).unwrap(), c);
        assert!(parse_gates("not 0\n").is_err());
    }

    #[test]
    fn pair_files() {
        let x = parse_instance("mmc", "p cnf 2 1\n1 2 0\n%%\n10\n", None).unwrap();
        assert!(super::super::problem_by_id("mmc").unwrap().decide(&x).unwrap());
        let y = parse_instance("ci", "1 0\n-1 2 0\n%%\n2 0\n", None).unwrap();
        assert!(super::super::problem_by_id("ci").unwrap().decide(&y).unwrap());
        let raw = parse_instance("parity", " 10 11\n", None).unwrap();
        assert_eq!(raw.to_string(), "1011");
    }
}
