use crate::error::{Error, Result};
use crate::problems::{Cnf3, Hypergraph};

/// The variable-edge / clause-triangle gadget on the deduplicated formula.
///
/// Variable `i` owns vertices `2i-1` (positive) and `2i` (negative) joined
/// by an edge. Clause `j` (0-based) owns the triangle `2n+3j+1 ..= 2n+3j+3`,
/// whose `t`-th corner is joined to the vertex of the clause's `t`-th
/// literal. The budget is `n + 2m`.
pub fn reduce_3sat_to_vertex_cover(phi: &Cnf3) -> Result<Hypergraph> {
    let phi = phi.dedup();
    let (n, m) = (phi.num_vars, phi.clauses.len());
    let vertices = 2 * n + 3 * m;
    if vertices > 64 {
        return Err(Error::scale(format!("vertex-cover gadget with {vertices} vertices")));
    }
    let bit = |v: usize| 1u64 << (v - 1);
    let mut edges = Vec::with_capacity(n + 6 * m);
    for i in 1..=n {
        edges.push(bit(2 * i - 1) | bit(2 * i));
    }
    for (j, clause) in phi.clauses.iter().enumerate() {
        let corner = |t: usize| 2 * n + 3 * j + 1 + t;
        edges.push(bit(corner(0)) | bit(corner(1)));
        edges.push(bit(corner(1)) | bit(corner(2)));
        edges.push(bit(corner(0)) | bit(corner(2)));
        for (t, lit) in clause.iter().enumerate() {
            let v = 2 * lit.var as usize - 1 + lit.neg as usize;
            edges.push(bit(corner(t)) | bit(v));
        }
    }
    Ok(Hypergraph::new(vertices, edges, n + 2 * m))
}

/// Encoded length of the gadget for `n` variables and `m` distinct clauses.
pub fn vc_gadget_len(n: usize, m: usize) -> usize {
    crate::problems::lengths::hypergraph_len(2 * n + 3 * m, n + 6 * m, n + 2 * m)
}
