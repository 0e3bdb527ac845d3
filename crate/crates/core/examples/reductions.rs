//! Poly-comp reductions: applying one to an instance and checking its
//! contracts over a bounded universe.
//!
//! Every reduction maps `x` to `g(x)` with the same answer, and the target
//! parameter of `g(x)` must lie in the set `s(κ(x))` fixed in advance.

use compilance::problems::{Cnf3, Lit};
use compilance::reductions::{apply_reduction, reduction_by_id, REDUCTION_IDS};
use compilance::verify::{reduction_budget, verify_reduction, BudgetLevel};

fn main() -> compilance::Result<()> {
    // (x1 | x2 | x2) & (-x1 | -x2 | -x2)
    let f = Cnf3::new(
        2,
        vec![
            [Lit::pos(1), Lit::pos(2), Lit::pos(2)],
            [Lit::negative(1), Lit::negative(2), Lit::negative(2)],
        ],
    )
    .canonicalize();
    let r = reduction_by_id("3sat.nu-to-2hs")?;
    let x = f.encode();
    let (y, in_s) = apply_reduction(&r, &x)?;
    println!(
        "{}: |x|={} -> |y|={}, target parameter listed in s: {in_s}, answers {} / {}",
        r.id,
        x.len(),
        y.len(),
        r.source.problem.decide(&x)?,
        r.target.problem.decide(&y)?,
    );

    for id in REDUCTION_IDS {
        let r = reduction_by_id(id)?;
        println!("{}", verify_reduction(&r, &reduction_budget(id, BudgetLevel::Small)));
    }
    Ok(())
}
