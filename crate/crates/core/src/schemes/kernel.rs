use std::sync::Arc;

use super::{ClassClaim, CompilationScheme, CompiledMap, SchemeKind};
use crate::base::{Parameterization, PolyBound};
use crate::problems::{HittingSet, Hypergraph};

/// A yes-instance of every d-HITTING-SET: no edges, budget zero.
pub fn canonical_yes() -> Hypergraph {
    Hypergraph::new(0, Vec::new(), 0)
}

/// A no-instance of every d-HITTING-SET: the edge `{1}` with budget zero.
pub fn canonical_no() -> Hypergraph {
    Hypergraph::new(1, vec![1], 0)
}

fn factorial(d: u64) -> u64 {
    (1..=d).product()
}

/// Bound on the encoded kernel length in terms of the budget `k`.
///
/// For `d = 2` the kernel keeps at most `k²` edges on at most `k² + k`
/// vertices; for `d ≥ 3` at most `E = d!·k^d` edges on at most `d·E`
/// vertices. The constant term covers the canonical instances.
pub fn kernel_bound(d: usize) -> PolyBound {
    if d <= 2 {
        // 2(n + 1 + E·n) + 1 + k with n ≤ k² + k, E ≤ k²
        return PolyBound::of(&[10, 3, 2, 2, 2]);
    }
    let d64 = d as u64;
    let mut e = vec![0u64; d + 1];
    e[d] = factorial(d64);
    let edges = PolyBound::of(&e);
    let vertices = PolyBound::product(PolyBound::of(&[d64 * 2]), edges.clone());
    // 2n + 2En + k + 3, with 2n = 2dE and 2En = 2dE²
    PolyBound::sum(
        PolyBound::of(&[10, 1]),
        PolyBound::sum(
            vertices.clone(),
            PolyBound::product(vertices, edges),
        ),
    )
}

/// Drops vertices outside every edge and renumbers the rest in order.
fn compact(edges: &[u64], k: usize) -> Hypergraph {
    let used = edges.iter().fold(0u64, |m, &e| m | e);
    let squeeze = |e: u64| {
        let (mut out, mut pos, mut rest) = (0u64, 0, used);
        while rest != 0 {
            let v = rest & rest.wrapping_neg();
            if e & v != 0 {
                out |= 1 << pos;
            }
            pos += 1;
            rest &= rest - 1;
        }
        out
    };
    Hypergraph::new(
        used.count_ones() as usize,
        edges.iter().map(|&e| squeeze(e)).collect(),
        k,
    )
}

fn buss(h: &Hypergraph) -> Hypergraph {
    let mut edges = h.edges.clone();
    let mut k = h.k as i64;
    loop {
        if edges.is_empty() {
            break;
        }
        // a singleton edge or a vertex of degree above k must be in every solution
        let forced = edges.iter().copied().find(|e| e.count_ones() == 1).or_else(|| {
            let union = edges.iter().fold(0u64, |m, &e| m | e);
            (0..64)
                .map(|v| 1u64 << v)
                .filter(|&v| union & v != 0)
                .find(|&v| edges.iter().filter(|&&e| e & v != 0).count() as i64 > k)
        });
        match forced {
            Some(v) => {
                edges.retain(|&e| e & v == 0);
                k -= 1;
                if k < 0 {
                    return canonical_no();
                }
            }
            None => break,
        }
    }
    if edges.is_empty() {
        return compact(&edges, k as usize);
    }
    let k = k as usize;
    if k == 0 || edges.len() > k * k {
        return canonical_no();
    }
    let kernel = compact(&edges, k);
    if kernel.n > k * k + k {
        return canonical_no();
    }
    kernel
}

/// Indices of `p` edges forming a sunflower, with its core. Follows the
/// sunflower lemma: a maximal disjoint subfamily either has `p` members
/// (empty core) or its union contains an element shared by many edges, on
/// which we recurse.
fn find_sunflower(family: &[u64], p: usize, depth: usize) -> Option<(Vec<usize>, u64)> {
    let mut used = 0u64;
    let mut chosen = Vec::new();
    for (i, &e) in family.iter().enumerate() {
        if e & used == 0 {
            chosen.push(i);
            used |= e;
            if chosen.len() == p {
                return Some((chosen, 0));
            }
        }
    }
    if depth == 0 {
        return None;
    }
    let mut best = (0usize, 0u64);
    let mut rest = used;
    while rest != 0 {
        let v = rest & rest.wrapping_neg();
        rest &= rest - 1;
        let c = family.iter().filter(|&&e| e & v != 0).count();
        if c > best.0 {
            best = (c, v);
        }
    }
    let u = best.1;
    if best.0 < p {
        return None;
    }
    let idx: Vec<usize> = (0..family.len()).filter(|&i| family[i] & u != 0).collect();
    let sub: Vec<u64> = idx.iter().map(|&i| family[i] & !u).collect();
    let (petals, core) = find_sunflower(&sub, p, depth - 1)?;
    Some((petals.into_iter().map(|i| idx[i]).collect(), core | u))
}

fn sunflower_kernel(h: &Hypergraph, d: usize) -> Hypergraph {
    let mut edges = h.edges.clone();
    let k = h.k;
    if edges.is_empty() {
        return compact(&edges, k);
    }
    if k == 0 {
        return canonical_no();
    }
    let limit = (factorial(d as u64) as u128) * (k as u128).pow(d as u32);
    while edges.len() as u128 > limit {
        let Some((petals, core)) = find_sunflower(&edges, k + 1, d) else {
            break;
        };
        if core == 0 {
            // k + 1 pairwise disjoint edges
            return canonical_no();
        }
        let mut next: Vec<u64> = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !petals.contains(i))
            .map(|(_, &e)| e)
            .collect();
        next.push(core);
        next.sort_unstable();
        next.dedup();
        edges = next;
    }
    compact(&edges, k)
}

/// An equivalent instance of size polynomial in `k`: Buss rules for
/// `d ≤ 2`, sunflower replacement for `d ≥ 3`.
pub fn kernelize_hitting_set(h: &Hypergraph, d: usize) -> Hypergraph {
    if d <= 2 {
        buss(h)
    } else {
        sunflower_kernel(h, d)
    }
}

/// The chopped scheme for `(d-HITTING-SET, π₂)` induced by the kernel:
/// empty offline part, online map `x ↦ K(x)`, target the problem itself.
pub fn kernel_to_chopped(d: usize) -> CompilationScheme {
    let map = CompiledMap::online_only(Parameterization::pi2(), move |x| {
        Ok(kernelize_hitting_set(&Hypergraph::decode(x, d)?, d).encode())
    });
    let lang = Arc::new(HittingSet::new(d));
    CompilationScheme {
        id: format!("{d}hs.pi2.kernel"),
        problem: lang.clone(),
        map,
        target: lang,
        claim: ClassClaim::Chopped(kernel_bound(d)),
        kind: SchemeKind::Kernel,
    }
}
