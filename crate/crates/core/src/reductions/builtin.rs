use std::sync::Arc;

use super::{
    lift_mreduction, reduce_3sat_to_vertex_cover, unary_range_bound, unary_range_set, Endpoint,
    PolyCompReduction,
};
use crate::base::{BinStr, ParamSet, Parameterization, PolyBound, PolyNat};
use crate::error::{Error, Result};
use crate::problems::{
    gamma, munu, nu, CircuitSat, Cnf3, HamPath, HittingSet, LangRef, ThreeSat,
};
use crate::schemes::CompiledMap;

pub const REDUCTION_IDS: &[&str] = &[
    "hampath.gamma-len",
    "hampath.len-gamma",
    "3sat.nu-len",
    "3sat.len-nu",
    "circuit.munu-len",
    "circuit.len-munu",
    "3sat.nu-to-2hs",
    "hs.2-to-3",
    "hs.2-to-4",
    "hs.3-to-4",
    "3sat.len-to-2hs.len",
    "3sat.len-len.lifted",
];

fn identity_map(param: Parameterization) -> CompiledMap {
    CompiledMap::online_only(param, |x| Ok(x.clone()))
}

/// `κ → len` with `g` the identity: an instance with parameter `un(t)` has
/// length at most `p(t)`.
fn to_len(id: &str, lang: LangRef, param: Parameterization, p: &[u64]) -> PolyCompReduction {
    let p = PolyBound::of(p);
    PolyCompReduction::new(
        id,
        Endpoint::new(lang.clone(), param.clone()),
        Endpoint::new(lang, Parameterization::len()),
        identity_map(param),
        unary_range_bound(&p),
        unary_range_set(p),
    )
}

/// `len → κ` with `g` the identity: `|κ(x)| ≤ |x|`, so `s(ℓ) = {un(0..|ℓ|)}`.
fn from_len(id: &str, lang: LangRef, param: Parameterization) -> PolyCompReduction {
    let p = PolyBound::of(&[0, 1]);
    PolyCompReduction::new(
        id,
        Endpoint::new(lang.clone(), Parameterization::len()),
        Endpoint::new(lang, param),
        identity_map(Parameterization::len()),
        unary_range_bound(&p),
        unary_range_set(p),
    )
}

fn sat_dedup() -> PolyCompReduction {
    let p = PolyBound::of(&[1, 1, 0, 24, 24]);
    let lang: LangRef = Arc::new(ThreeSat);
    PolyCompReduction::new(
        "3sat.nu-len",
        Endpoint::new(lang.clone(), nu()),
        Endpoint::new(lang, Parameterization::len()),
        CompiledMap::online_only(nu(), |x| Ok(Cnf3::decode(x)?.dedup().encode())),
        unary_range_bound(&p),
        unary_range_set(p),
    )
    .with_note("dedup leaves at most C(2n+2,3) clauses; |phi| <= 1 + n + 24n^3 + 24n^4")
}

fn sat_to_hs() -> PolyCompReduction {
    // at most (2n)^3 distinct clauses, so k = n + 2m <= n + 16n^3
    let p = PolyBound::of(&[0, 1, 0, 16]);
    PolyCompReduction::new(
        "3sat.nu-to-2hs",
        Endpoint::new(Arc::new(ThreeSat), nu()),
        Endpoint::new(Arc::new(HittingSet::new(2)), Parameterization::pi2()),
        CompiledMap::online_only(nu(), |x| {
            Ok(reduce_3sat_to_vertex_cover(&Cnf3::decode(x)?)?.encode())
        }),
        unary_range_bound(&p),
        unary_range_set(p),
    )
    .with_note("s(un(n)) = {un(0), ..., un(n + 2(2n)^3)}")
}

fn hs_inclusion(d: usize, d2: usize) -> PolyCompReduction {
    PolyCompReduction::new(
        format!("hs.{d}-to-{d2}"),
        Endpoint::new(Arc::new(HittingSet::new(d)), Parameterization::pi2()),
        Endpoint::new(Arc::new(HittingSet::new(d2)), Parameterization::pi2()),
        identity_map(Parameterization::pi2()),
        PolyBound::of(&[1, 1]),
        |k: &BinStr| Ok(ParamSet::singleton(k.clone())),
    )
}

/// The gadget on len endpoints. With `L = |φ| ≥ n + 1 + 3m` the gadget has
/// at most `2L` vertices, `2L` edges and budget `L`, so its encoding is at
/// most `8L² + 5L + 3` bits.
fn sat_to_hs_len() -> PolyCompReduction {
    lift_mreduction(
        "3sat.len-to-2hs.len",
        Arc::new(ThreeSat),
        Arc::new(HittingSet::new(2)),
        |x| Ok(reduce_3sat_to_vertex_cover(&Cnf3::decode(x)?)?.encode()),
        PolyNat::of(&[3, 5, 8]),
        &[],
    )
    .expect("no audit inputs")
}

/// The identity on 3CNF lifted to len endpoints.
fn sat_lifted_identity() -> PolyCompReduction {
    lift_mreduction(
        "3sat.len-len.lifted",
        Arc::new(ThreeSat),
        Arc::new(ThreeSat),
        |x| Ok(x.clone()),
        PolyNat::of(&[0, 1]),
        &[],
    )
    .expect("no audit inputs")
}

pub fn reduction_by_id(id: &str) -> Result<PolyCompReduction> {
    Ok(match id {
        // n + 1 + n(n-1)/2 bits for n nodes
        "hampath.gamma-len" => to_len(id, Arc::new(HamPath), gamma(), &[1, 1, 1]),
        "hampath.len-gamma" => from_len(id, Arc::new(HamPath), gamma()),
        "3sat.nu-len" => sat_dedup(),
        "3sat.len-nu" => from_len(id, Arc::new(ThreeSat), nu()),
        // g + 1 + g(2 + 2w(g)) bits for g gates
        "circuit.munu-len" => to_len(id, Arc::new(CircuitSat), munu(), &[1, 3, 2]),
        "circuit.len-munu" => from_len(id, Arc::new(CircuitSat), munu()),
        "3sat.nu-to-2hs" => sat_to_hs(),
        "hs.2-to-3" => hs_inclusion(2, 3),
        "hs.2-to-4" => hs_inclusion(2, 4),
        "hs.3-to-4" => hs_inclusion(3, 4),
        "3sat.len-to-2hs.len" => sat_to_hs_len(),
        "3sat.len-len.lifted" => sat_lifted_identity(),
        _ => {
            return Err(Error::UnknownId {
                kind: "reduction",
                id: id.to_string(),
            })
        }
    })
}

pub fn builtin_registry() -> Vec<PolyCompReduction> {
    REDUCTION_IDS
        .iter()
        .map(|id| reduction_by_id(id).expect("registered id"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::encode_unary;

    #[test]
    fn registry_is_complete() {
        let all = builtin_registry();
        assert!(all.len() >= 8);
        for (r, id) in all.iter().zip(REDUCTION_IDS) {
            assert_eq!(r.id, *id);
            assert_eq!(r.g.param.id(), r.source.param.id());
        }
        assert!(reduction_by_id("nope").is_err());
    }

    #[test]
    fn hs_set_bound_is_cubic() {
        let r = reduction_by_id("3sat.nu-to-2hs").unwrap();
        let s = r.s(&encode_unary(2)).unwrap();
        assert_eq!(s.len(), 2 + 2 * 64 + 1);
        assert!(s.contains(&encode_unary(130)));
    }
}
