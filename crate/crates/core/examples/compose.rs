//! Composing reductions. The composite's offline part chains both offline
//! parts over every parameter in the first reduction's `s` set.

use compilance::problems::Budget;
use compilance::reductions::{compose_reductions, reduction_by_id};
use compilance::verify::verify_reduction;

fn main() -> compilance::Result<()> {
    let r1 = reduction_by_id("hs.2-to-3")?;
    let r2 = reduction_by_id("hs.3-to-4")?;
    let r = compose_reductions(&r1, &r2)?;
    println!("{} : {} -> {}", r.id, r.source.label(), r.target.label());
    println!("{}", verify_reduction(&r, &Budget::upto(4).with_k(2)));

    let len = compose_reductions(&reduction_by_id("3sat.nu-len")?, &reduction_by_id("3sat.len-nu")?)?;
    println!("{}", verify_reduction(&len, &Budget::upto(2).with_clauses(3)));

    // Mismatched endpoints are refused
    match compose_reductions(&r2, &r1) {
        Err(e) => println!("{} after {}: {e}", r1.id, r2.id),
        Ok(_) => println!("unexpected composite"),
    }
    Ok(())
}
