use std::sync::Arc;

use super::{
    kernel_to_chopped, normalize_to_chopped_ptime, ClassClaim, CompilationScheme, CompiledMap,
};
use crate::base::{BinStr, Parameterization, PolyBound};
use crate::error::{Error, Result};
use crate::problems::{gamma, munu, nu, CircuitSat, Cnf3, HamPath, LangRef, Parity, ThreeSat};

pub const SCHEME_IDS: &[&str] = &[
    "parity.len.identity",
    "parity.len.normalized",
    "3sat.nu.dedup",
    "3sat.len.identity",
    "hampath.gamma.identity",
    "circuit.munu.identity",
    "2hs.pi2.kernel",
    "3hs.pi2.kernel",
];

fn identity(id: &str, lang: LangRef, param: Parameterization, bound: &[u64]) -> CompilationScheme {
    CompilationScheme::new(
        id,
        lang.clone(),
        CompiledMap::online_only(param, |x| Ok(x.clone())),
        lang,
        ClassClaim::Chopped(PolyBound::of(bound)),
    )
}

/// Deduplicated 3CNF: at most `C(2n+2, 3)` distinct clauses over `n`
/// variables, each `3(1 + w(n))` bits with `w(n) < n`.
fn sat_dedup() -> CompilationScheme {
    let lang: LangRef = Arc::new(ThreeSat);
    CompilationScheme::new(
        "3sat.nu.dedup",
        lang.clone(),
        CompiledMap::online_only(nu(), |x: &BinStr| Ok(Cnf3::decode(x)?.dedup().encode())),
        lang,
        ClassClaim::Chopped(PolyBound::of(&[1, 1, 0, 24, 24])),
    )
}

pub fn scheme_by_id(id: &str) -> Result<CompilationScheme> {
    Ok(match id {
        "parity.len.identity" => identity(id, Arc::new(Parity), Parameterization::len(), &[0, 1]),
        "parity.len.normalized" => normalize_to_chopped_ptime(&scheme_by_id("parity.len.identity")?)?,
        "3sat.nu.dedup" => sat_dedup(),
        "3sat.len.identity" => identity(id, Arc::new(ThreeSat), Parameterization::len(), &[0, 1]),
        // n + 1 + n(n-1)/2 bits
        "hampath.gamma.identity" => identity(id, Arc::new(HamPath), gamma(), &[1, 1, 1]),
        // g + 1 + g(2 + 2w(g)) bits with w(g) ≤ g
        "circuit.munu.identity" => identity(id, Arc::new(CircuitSat), munu(), &[1, 3, 2]),
        "2hs.pi2.kernel" => kernel_to_chopped(2),
        "3hs.pi2.kernel" => kernel_to_chopped(3),
        _ => {
            return Err(Error::UnknownId {
                kind: "scheme",
                id: id.to_string(),
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_resolve() {
        for id in SCHEME_IDS {
            assert_eq!(scheme_by_id(id).unwrap().id, *id);
        }
        assert!(scheme_by_id("nope").is_err());
    }

    #[test]
    fn dedup_collapses_repeats() {
        let s = scheme_by_id("3sat.nu.dedup").unwrap();
        let a = crate::problems::Lit::pos(1);
        let twice = Cnf3::new(1, vec![[a; 3], [a; 3]]);
        let once = Cnf3::new(1, vec![[a; 3]]);
        assert_eq!(s.image(&twice.encode()).unwrap(), once.encode());
    }
}
