use super::{Budget, ClassTag, InstanceStream, Language, Meter};
use crate::base::{encode_pair, encode_unary, pair_len, split_pair, BinStr};
use crate::error::{Error, Result};

/// Cap on the vertex count of decidable hitting-set instances. The decider
/// is a search tree whose depth is bounded by `k`, so the only hard limit is
/// the width of the vertex masks.
pub const MAX_HS_VERTICES: usize = 64;

/// Hypergraph on vertices `1..=n` with a budget `k`. Edge `e` has bit `v-1`
/// set iff vertex `v` belongs to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    pub n: usize,
    pub edges: Vec<u64>,
    pub k: usize,
}

impl Hypergraph {
    pub fn new(n: usize, mut edges: Vec<u64>, k: usize) -> Self {
        assert!(n <= 64, "hypergraphs are limited to 64 vertices");
        edges.sort_unstable();
        edges.dedup();
        Hypergraph { n, edges, k }
    }

    /// Builds from 1-based vertex lists.
    pub fn from_lists(n: usize, lists: &[&[usize]], k: usize) -> Self {
        let edges = lists
            .iter()
            .map(|l| l.iter().fold(0u64, |m, &v| m | 1 << (v - 1)))
            .collect();
        Hypergraph::new(n, edges, k)
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(|e| e.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn is_canonical(&self, d: usize) -> bool {
        let range = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        self.edges.windows(2).all(|w| w[0] < w[1])
            && self
                .edges
                .iter()
                .all(|&e| e != 0 && e & !range == 0 && e.count_ones() as usize <= d)
    }

    pub fn encode_graph_part(&self) -> BinStr {
        let mut out = BinStr::with_capacity(self.n + 1 + self.edges.len() * self.n);
        out.push_ones(self.n);
        out.push(false);
        for &e in &self.edges {
            for v in 0..self.n {
                out.push(e >> v & 1 == 1);
            }
        }
        out
    }

    /// `(encH, un(k))`.
    pub fn encode(&self) -> BinStr {
        encode_pair(&self.encode_graph_part(), &encode_unary(self.k))
    }

    pub fn encoded_len(&self) -> usize {
        encoded_len(self.n, self.edges.len(), self.k)
    }

    /// Decodes without checking edge sizes against a rank bound.
    pub fn decode_raw(x: &BinStr) -> Result<Hypergraph> {
        let (h, k) = split_pair(x)?;
        if !k.iter().all(|&b| b) {
            return Err(Error::malformed("hypergraph: budget is not unary"));
        }
        let n = h.iter().position(|&b| !b).ok_or_else(|| Error::malformed("hypergraph: missing vertex header"))?;
        if n > 64 {
            return Err(Error::scale(format!("hypergraph with {n} vertices")));
        }
        let body = &h[n + 1..];
        if n == 0 && !body.is_empty() || n > 0 && body.len() % n != 0 {
            return Err(Error::malformed("hypergraph: edge list length"));
        }
        let edges = body
            .chunks(n.max(1))
            .map(|bits| bits.iter().rev().fold(0u64, |m, &b| m << 1 | b as u64))
            .collect();
        Ok(Hypergraph { n, edges, k: k.len() })
    }

    pub fn decode(x: &BinStr, d: usize) -> Result<Hypergraph> {
        let h = Hypergraph::decode_raw(x)?;
        if !h.is_canonical(d) {
            return Err(Error::malformed(format!("hypergraph: not a canonical {d}-bounded instance")));
        }
        Ok(h)
    }

    /// Exact decision by a bounded search tree; see [`min_hits`].
    pub fn has_hitting_set(&self, meter: &mut Meter) -> Result<bool> {
        if self.n > MAX_HS_VERTICES {
            return Err(Error::scale(format!(
                "{} vertices exceed the cap of {MAX_HS_VERTICES}",
                self.n
            )));
        }
        search(self.edges.clone(), self.k, meter)
    }
}

/// Length of the encoding of an instance with `n` vertices, `e` edges and budget `k`.
pub fn encoded_len(n: usize, e: usize, k: usize) -> usize {
    pair_len(n + 1 + e * n, k)
}

// Forced vertices first (singleton edges), otherwise branch on a vertex of
// maximum degree: take it, or drop it from every edge.
fn search(mut edges: Vec<u64>, k: usize, meter: &mut Meter) -> Result<bool> {
    meter.tick(edges.len() as u64 + 1)?;
    if edges.is_empty() {
        return Ok(true);
    }
    if edges.contains(&0) || k == 0 {
        return Ok(false);
    }
    if let Some(&single) = edges.iter().find(|e| e.count_ones() == 1) {
        edges.retain(|&e| e & single == 0);
        return search(edges, k - 1, meter);
    }
    let mut best = (0usize, 0u64);
    let union = edges.iter().fold(0u64, |m, &e| m | e);
    let mut rest = union;
    while rest != 0 {
        let v = rest & rest.wrapping_neg();
        rest &= rest - 1;
        let deg = edges.iter().filter(|&&e| e & v != 0).count();
        if deg > best.0 {
            best = (deg, v);
        }
    }
    // k vertices of degree at most `best.0` cannot hit more edges than this
    if edges.len() > k * best.0 || packing_bound(&edges) > k {
        return Ok(false);
    }
    let v = best.1;
    let taken: Vec<u64> = edges.iter().copied().filter(|&e| e & v == 0).collect();
    if search(taken, k - 1, meter)? {
        return Ok(true);
    }
    let mut dropped: Vec<u64> = edges.iter().map(|&e| e & !v).collect();
    dropped.sort_unstable();
    dropped.dedup();
    search(dropped, k, meter)
}

// Vertex-disjoint triangles of 2-edges need two hits each, then any further
// disjoint edge needs one more.
fn packing_bound(edges: &[u64]) -> usize {
    let mut adj = [0u64; 64];
    for &e in edges.iter().filter(|e| e.count_ones() == 2) {
        let (a, b) = (e.trailing_zeros() as usize, 63 - e.leading_zeros() as usize);
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let (mut used, mut bound) = (0u64, 0usize);
    for &e in edges.iter().filter(|e| e.count_ones() == 2) {
        if e & used != 0 {
            continue;
        }
        let (a, b) = (e.trailing_zeros() as usize, 63 - e.leading_zeros() as usize);
        let common = adj[a] & adj[b] & !used;
        if common != 0 {
            used |= e | (common & common.wrapping_neg());
            bound += 2;
        }
    }
    let mut sorted: Vec<u64> = edges.to_vec();
    sorted.sort_by_key(|e| e.count_ones());
    for e in sorted {
        if e & used == 0 {
            used |= e;
            bound += 1;
        }
    }
    bound
}

/// d-HITTING-SET: is there a set of at most `k` vertices meeting every edge?
#[derive(Debug, Clone)]
pub struct HittingSet {
    d: usize,
    id: String,
}

impl HittingSet {
    pub fn new(d: usize) -> Self {
        HittingSet {
            d,
            id: format!("{d}hs"),
        }
    }

    pub fn rank(&self) -> usize {
        self.d
    }
}

/// All nonempty vertex sets of size at most `d` over `n` vertices, ascending.
pub fn candidate_edges(n: usize, d: usize) -> Vec<u64> {
    (1u64..1 << n)
        .filter(|m| m.count_ones() as usize <= d)
        .collect()
}

impl Language for HittingSet {
    fn id(&self) -> &str {
        &self.id
    }

    fn class_tag(&self) -> ClassTag {
        ClassTag::NP
    }

    fn validate(&self, x: &BinStr) -> bool {
        Hypergraph::decode(x, self.d).is_ok()
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        Hypergraph::decode(x, self.d)?.has_hitting_set(meter)
    }

    fn enumerate(&self, budget: &Budget) -> Result<InstanceStream<'_>> {
        let max_k = budget.max_k;
        let d = self.d;
        if candidate_edges(budget.max_size.min(20), d).len() > 26 || budget.max_size > 20 {
            return Err(Error::scale("hypergraph enumeration beyond 2^26 edge families"));
        }
        Ok(Box::new(budget.sizes().flat_map(move |n| {
            let cands = candidate_edges(n, d);
            (0u64..1 << cands.len()).flat_map(move |fam| {
                let edges: Vec<u64> = cands
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| fam >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let graph = Hypergraph::new(n, edges, 0).encode_graph_part();
                (0..=max_k).map(move |k| encode_pair(&graph, &encode_unary(k)))
            })
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_subsets(h: &Hypergraph) -> bool {
        (0u64..1 << h.n)
            .filter(|s| s.count_ones() as usize <= h.k)
            .any(|s| h.edges.iter().all(|&e| e & s != 0))
    }

    #[test]
    fn triangle() {
        let tri = Hypergraph::from_lists(3, &[&[1, 2], &[2, 3], &[1, 3]], 1);
        let hs = HittingSet::new(2);
        assert!(!hs.decide(&tri.encode()).unwrap());
        let tri2 = Hypergraph { k: 2, ..tri };
        assert!(hs.decide(&tri2.encode()).unwrap());
    }

    #[test]
    fn enumeration_example_count() {
        let b = Budget::exactly(2).with_k(2);
        assert_eq!(HittingSet::new(2).enumerate(&b).unwrap().count(), 24);
    }

    #[test]
    fn enumeration_valid_distinct() {
        let hs = HittingSet::new(3);
        let all: Vec<_> = hs.enumerate(&Budget::upto(3).with_k(2)).unwrap().collect();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|x| hs.validate(x)));
        // 1 + 2 + 8 + 128 families, three budgets each
        assert_eq!(all.len(), 3 * (1 + 2 + 8 + 128));
    }

    #[test]
    fn search_matches_subset_scan() {
        for d in 2..=3 {
            let hs = HittingSet::new(d);
            for x in hs.enumerate(&Budget::upto(4).with_k(3)).unwrap() {
                let h = Hypergraph::decode(&x, d).unwrap();
                assert_eq!(hs.decide(&x).unwrap(), by_subsets(&h), "{h:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_encodings() {
        let hs = HittingSet::new(2);
        let big = Hypergraph::from_lists(3, &[&[1, 2, 3]], 1);
        assert!(!hs.validate(&big.encode()));
        assert!(HittingSet::new(3).validate(&big.encode()));
        let mut unsorted = Hypergraph::from_lists(3, &[&[1], &[2]], 1);
        unsorted.edges.reverse();
        assert!(!hs.validate(&unsorted.encode()));
        let empty_edge = Hypergraph { n: 2, edges: vec![0], k: 1 };
        assert!(!hs.validate(&empty_edge.encode()));
        assert!(!hs.validate(&BinStr::parse("1").unwrap()));
    }

    #[test]
    fn length_formula() {
        let h = Hypergraph::from_lists(4, &[&[1, 2], &[3, 4]], 2);
        assert_eq!(h.encode().len(), h.encoded_len());
    }
}
