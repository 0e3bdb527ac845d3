//! From a chopped scheme to a polynomial-advice decider: the advice for
//! length `n` is the scheme's offline output on `1^n`. Parity is
//! decided online outright, so its advice strings are empty.

use compilance::base::{encode_unary, BinStr};
use compilance::problems::all_strings;
use compilance::schemes::{chopped_to_advice, extract_para_witness, scheme_by_id};

fn main() -> compilance::Result<()> {
    let w = scheme_by_id("parity.len.identity")?;
    let advice = chopped_to_advice(&w)?;
    for n in 0..=4 {
        println!("advice(1^{n}) = {} bits", advice.advice(&encode_unary(n))?.len());
    }
    let wrong = (0..=8)
        .flat_map(|n| all_strings(n, n))
        .filter(|x| advice.decide(x).unwrap() != (x.count_ones() % 2 == 1))
        .count();
    println!("disagreements with parity on lengths <= 8: {wrong}");
    println!("non-unary advice argument: {:?}", advice.advice(&BinStr::parse("10")?).err());

    let para = extract_para_witness(&scheme_by_id("3sat.nu.dedup")?);
    let f = compilance::problems::Cnf3::new(
        1,
        vec![[compilance::problems::Lit::pos(1); 3]],
    );
    println!("para witness on x1: {}", para.decide(&f.encode())?);
    Ok(())
}
