//! Compile once, query many: HAM-PATH on 10-node graphs answered from a
//! sparse table, timed against the permutation scan.

use std::time::Instant;

use compilance::base::encode_unary;
use compilance::schemes::{compile_chop_table, scheme_by_id, ChopMode};
use compilance::verify::{differential_speed, random_graphs, SEED};

fn main() -> compilance::Result<()> {
    let n = 10;
    let w = scheme_by_id("hampath.gamma.identity")?;
    let queries = random_graphs(n, 40, SEED);

    let t = Instant::now();
    let a = compile_chop_table(&w, &encode_unary(n), ChopMode::Sparse(queries.clone()))?;
    println!("compiled {} graphs on {n} nodes in {:.1} ms", queries.len(), t.elapsed().as_secs_f64() * 1e3);

    let rep = differential_speed(&w, &a, &queries)?;
    println!(
        "brute force {} ns/query, compiled {} ns/query, speedup {:.0}x",
        rep.baseline_ns, rep.compiled_ns, rep.speedup
    );
    Ok(())
}
