//! Translating between chopped schemes and mixed witnesses on pair
//! languages, and round-tripping through both.

use compilance::base::{decode_pair, encode_unary, BinStr};
use compilance::mixed::{
    chopped_to_mixed, eps_parity_reduction, hardness_from_epsilon, mixed_to_chopped, pair_grid, toy_parity_pairs,
    toy_witness, z_n,
};
use compilance::problems::all_strings;
use compilance::verify::{verify_agreement, verify_reduction_on, RunOptions};

fn main() -> compilance::Result<()> {
    let toy = toy_parity_pairs();
    let w = toy_witness();
    let chopped = mixed_to_chopped(&toy, &w)?;
    println!("{} -> {} (z_N = {})", w.id, chopped.id, z_n());

    let back = chopped_to_mixed(&toy, &chopped)?;
    let x = BinStr::parse("1101")?;
    println!("f(x, 1^3) = {}", back.f(&x, &encode_unary(3))?);

    let rep = verify_agreement(
        "toy round trip",
        "|x|,|y|<=5",
        pair_grid(5, 5),
        |xy| {
            let (x, y) = decode_pair(xy)?;
            toy.decide_pair(&x, &y)
        },
        |xy| {
            let (x, y) = decode_pair(xy)?;
            back.decide_pair(&x, &y)
        },
    );
    println!("{rep}");

    // A mixed reduction whose instances have an empty first component gives
    // a poly-comp reduction from the second component alone
    let m = eps_parity_reduction();
    let hard = hardness_from_epsilon(&m)?;
    println!("{}", verify_reduction_on(&hard, "len<=8", all_strings(0, 8), RunOptions::default()));
    Ok(())
}
