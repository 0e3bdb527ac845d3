use super::{Budget, ClassTag, InstanceStream, Language, Meter};
use crate::base::{encode_unary, BinStr, Parameterization, PolyNat};
use crate::error::{Error, Result};

pub const MAX_HAM_NODES: usize = 11;

/// Simple undirected graph on nodes `0..n`, adjacency as bit rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    pub n: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= 64, "graphs are limited to 64 nodes");
        Graph { n, adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "bad edge ({u},{v})");
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbors(&self, u: usize) -> u64 {
        self.adj[u]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// `1^n 0` followed by the upper triangle, row by row.
    pub fn encode(&self) -> BinStr {
        let mut out = BinStr::with_capacity(encoded_len(self.n));
        out.push_ones(self.n);
        out.push(false);
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(self.has_edge(i, j));
            }
        }
        out
    }

    pub fn decode(x: &BinStr) -> Result<Graph> {
        let mut r = x.reader();
        let n = r
            .read_unary()
            .ok_or_else(|| Error::malformed("graph: missing node header"))?;
        if n == 0 {
            return Err(Error::malformed("graph: no nodes"));
        }
        if n > 64 {
            return Err(Error::scale(format!("graph with {n} nodes")));
        }
        if r.remaining() != n * (n - 1) / 2 {
            return Err(Error::malformed("graph: adjacency length mismatch"));
        }
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if r.read_bit().unwrap() {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }
}

pub fn encoded_len(n: usize) -> usize {
    n + 1 + n * n.saturating_sub(1) / 2
}

fn check_cap(g: &Graph) -> Result<()> {
    if g.n > MAX_HAM_NODES {
        return Err(Error::scale(format!(
            "{} nodes exceed the brute-force cap of {MAX_HAM_NODES}",
            g.n
        )));
    }
    Ok(())
}

/// Scans node permutations in lexicographic order until one is a path.
/// One meter tick per permutation.
pub fn ham_path_by_permutations(g: &Graph, meter: &mut Meter) -> Result<bool> {
    check_cap(g)?;
    let mut perm: Vec<usize> = (0..g.n).collect();
    loop {
        meter.tick(1)?;
        if perm.windows(2).all(|w| g.has_edge(w[0], w[1])) {
            return Ok(true);
        }
        if !next_permutation(&mut perm) {
            return Ok(false);
        }
    }
}

/// Walks node orderings depth first, abandoning a prefix as soon as its last
/// step is not an edge. Disconnected graphs and graphs with more than two
/// nodes of degree at most one are rejected up front. One tick per extension.
pub fn ham_path_by_extension(g: &Graph, meter: &mut Meter) -> Result<bool> {
    check_cap(g)?;
    let n = g.n;
    if n <= 1 {
        return Ok(true);
    }
    let all = (1u64 << n) - 1;
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = g.adj[v] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    if seen != all || (0..n).filter(|&v| g.adj[v].count_ones() <= 1).count() > 2 {
        return Ok(false);
    }
    fn extend(g: &Graph, last: usize, visited: u64, all: u64, meter: &mut Meter) -> Result<bool> {
        if visited == all {
            return Ok(true);
        }
        let mut next = g.adj[last] & !visited;
        while next != 0 {
            let v = next.trailing_zeros() as usize;
            next &= next - 1;
            meter.tick(1)?;
            if extend(g, v, visited | 1 << v, all, meter)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    for start in 0..n {
        meter.tick(1)?;
        if extend(g, start, 1 << start, all, meter)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// HAM-PATH: does the graph have a path visiting every node exactly once?
#[derive(Debug, Clone, Copy, Default)]
pub struct HamPath;

impl Language for HamPath {
    fn id(&self) -> &str {
        "hampath"
    }

    fn class_tag(&self) -> ClassTag {
        ClassTag::NP
    }

    fn validate(&self, x: &BinStr) -> bool {
        Graph::decode(x).is_ok()
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        ham_path_by_extension(&Graph::decode(x)?, meter)
    }

    fn enumerate(&self, budget: &Budget) -> Result<InstanceStream<'_>> {
        if budget.max_size > 8 {
            return Err(Error::scale("graph enumeration beyond 8 nodes"));
        }
        Ok(Box::new(budget.sizes().filter(|&n| n >= 1).flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (0..1u64 << pairs).map(move |bits| {
                let mut out = BinStr::with_capacity(encoded_len(n));
                out.push_ones(n);
                out.push(false);
                out.push_fixed(bits, pairs);
                out
            })
        })))
    }
}

/// `γ(G)`: the number of nodes, in unary.
pub fn gamma() -> Parameterization {
    Parameterization::new("gamma", PolyNat::identity(), |x| {
        Ok(encode_unary(Graph::decode(x)?.n))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // bitmask DP over (visited set, endpoint)
    fn held_karp(g: &Graph) -> bool {
        let n = g.n;
        let mut dp = vec![0u64; 1 << n];
        for v in 0..n {
            dp[1 << v] |= 1 << v;
        }
        for s in 1..(1usize << n) {
            for v in 0..n {
                if dp[s] >> v & 1 == 0 {
                    continue;
                }
                for u in 0..n {
                    if s >> u & 1 == 0 && g.has_edge(v, u) {
                        dp[s | 1 << u] |= 1 << u;
                    }
                }
            }
        }
        dp[(1 << n) - 1] != 0
    }

    #[test]
    fn star_has_no_path() {
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert!(!HamPath.decide(&star.encode()).unwrap());
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(HamPath.decide(&path.encode()).unwrap());
    }

    #[test]
    fn validation() {
        assert!(!HamPath.validate(&BinStr::new()));
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.encode().to_string(), "1110111");
        assert!(HamPath.validate(&tri.encode()));
        assert!(!HamPath.validate(&BinStr::parse("11101").unwrap()));
        assert!(!HamPath.validate(&BinStr::parse("0").unwrap()));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(HamPath.enumerate(&Budget::exactly(3)).unwrap().count(), 8);
        let want: u64 = (1..=5u32).map(|n| 1u64 << (n * (n - 1) / 2)).sum();
        assert_eq!(HamPath.enumerate(&Budget::upto(5)).unwrap().count() as u64, want);
    }

    #[test]
    fn agrees_with_dynamic_programming() {
        for x in HamPath.enumerate(&Budget::upto(5)).unwrap() {
            let g = Graph::decode(&x).unwrap();
            assert_eq!(g.encode(), x);
            assert_eq!(HamPath.decide(&x).unwrap(), held_karp(&g), "graph {x}");
        }
    }

    #[test]
    fn both_searches_agree_on_six_nodes() {
        for x in HamPath.enumerate(&Budget::exactly(6)).unwrap() {
            let g = Graph::decode(&x).unwrap();
            let want = held_karp(&g);
            assert_eq!(ham_path_by_permutations(&g, &mut Meter::unlimited()).unwrap(), want);
            assert_eq!(ham_path_by_extension(&g, &mut Meter::unlimited()).unwrap(), want);
        }
    }

    #[test]
    fn gamma_counts_nodes() {
        let g = Graph::from_edges(5, &[(0, 4)]);
        assert_eq!(gamma().apply(&g.encode()).unwrap().to_string(), "11111");
    }

    #[test]
    fn node_cap() {
        let g = Graph::empty(12);
        assert!(matches!(HamPath.decide(&g.encode()), Err(Error::ScaleExceeded(_))));
    }
}
