//! Normalizing a chopped scheme so its online part outputs a single bit.
//!
//! The offline part computes the whole chop table; the online part looks
//! up one entry and emits `1` or `0`, so the target is the fixed language
//! of strings starting with `1`.

use compilance::base::{encode_unary, BinStr};
use compilance::problems::Budget;
use compilance::schemes::{
    compile_normalized, normalize_to_chopped_ptime, query_compiled, scheme_by_id, ClassClaim,
};
use compilance::verify::verify_scheme;

fn main() -> compilance::Result<()> {
    let parity = scheme_by_id("parity.len.identity")?;
    let norm = normalize_to_chopped_ptime(&parity)?;
    if let ClassClaim::Chopped(b) = &norm.claim {
        println!("{} -> {} (target {}, chopped bound {b})", parity.id, norm.id, norm.target.id());
    }

    for x in ["", "1", "101", "1111", "0110110"] {
        let x = BinStr::parse(x)?;
        println!("  g({x:>7}) = {}", norm.image(&x)?);
    }

    println!("{}", verify_scheme(&norm, &Budget::upto(10)));

    let a = compile_normalized(&norm, &encode_unary(5))?;
    let x = BinStr::parse("10110")?;
    println!("compiled at length 5: {x} -> {}", query_compiled(&a, &norm, &x)?);
    Ok(())
}
