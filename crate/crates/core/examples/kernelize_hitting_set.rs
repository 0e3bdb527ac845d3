//! Kernels for d-HITTING-SET used as chopped compilation schemes.
//!
//! `d = 2` uses the high-degree rules for vertex cover; `d >= 3` uses the
//! sunflower rule. The kernel size depends on `k` and `d` only.

use compilance::problems::{Budget, Hypergraph, Meter};
use compilance::schemes::{kernel_bound, kernel_to_chopped, kernelize_hitting_set};
use compilance::verify::{scan_kernel, verify_scheme, KernelScan};

fn report(label: &str, h: &Hypergraph, d: usize) -> compilance::Result<()> {
    let kern = kernelize_hitting_set(h, d);
    println!(
        "{label}: n={} |E|={} k={} -> n={} |E|={} k={}  ({} bits, bound {}), answer {}",
        h.n,
        h.edges.len(),
        h.k,
        kern.n,
        kern.edges.len(),
        kern.k,
        kern.encoded_len(),
        kernel_bound(d).eval(h.k as u64)?,
        kern.has_hitting_set(&mut Meter::unlimited())?,
    );
    Ok(())
}

fn main() -> compilance::Result<()> {
    // A star with 12 leaves plus a triangle: the centre is forced
    let mut lists: Vec<Vec<usize>> = (2..=13).map(|v| vec![1, v]).collect();
    lists.extend([vec![14, 15], vec![15, 16], vec![14, 16]]);
    let refs: Vec<&[usize]> = lists.iter().map(Vec::as_slice).collect();
    report("star+triangle", &Hypergraph::from_lists(16, &refs, 3), 2)?;
    report("star+triangle", &Hypergraph::from_lists(16, &refs, 2), 2)?;

    // 60 triples through the core {1, 2}; beyond 3! * k^3 edges the
    // sunflower rule replaces k + 1 petals by their core
    let mut petals: Vec<Vec<usize>> = (3..=62).map(|v| vec![1, 2, v]).collect();
    petals.push(vec![3, 4, 5]);
    let refs: Vec<&[usize]> = petals.iter().map(Vec::as_slice).collect();
    report("sunflower", &Hypergraph::from_lists(62, &refs, 2), 3)?;

    for d in [2, 3] {
        let w = kernel_to_chopped(d);
        println!("{}", verify_scheme(&w, &Budget::upto(4).with_k(3)));
        println!("{}", scan_kernel(KernelScan { d, max_n: 4, max_k: 3 }));
    }
    Ok(())
}
