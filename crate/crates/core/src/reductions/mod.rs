//! Poly-comp reductions `(g, s)`: `x ∈ Q ⟺ g(x) ∈ Q′` (contract A) and
//! `κ′(g(x)) ∈ s(κ(x))` (contract B).

mod builtin;
mod vc;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::base::{
    decode_pair, decode_seq, encode_pair, encode_seq, BinStr, ParamSet, Parameterization,
    PolyBound, PolyNat,
};
use crate::error::{Error, Result};
use crate::problems::LangRef;
use crate::schemes::{ClassClaim, CompilationScheme, CompiledMap, Prepared};

pub use builtin::{builtin_registry, reduction_by_id, REDUCTION_IDS};
pub use vc::{reduce_3sat_to_vertex_cover, vc_gadget_len};

pub type SetFn = Arc<dyn Fn(&BinStr) -> Result<ParamSet> + Send + Sync>;

/// A parameterized problem `(Q, κ)`.
#[derive(Clone)]
pub struct Endpoint {
    pub problem: LangRef,
    pub param: Parameterization,
}

impl Endpoint {
    pub fn new(problem: LangRef, param: Parameterization) -> Self {
        Endpoint { problem, param }
    }

    pub fn same_as(&self, other: &Endpoint) -> bool {
        self.problem.id() == other.problem.id() && self.param.same_as(&other.param)
    }

    pub fn label(&self) -> String {
        format!("({}, {})", self.problem.id(), self.param.id())
    }
}

impl fmt::Debug for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone)]
pub struct PolyCompReduction {
    pub id: String,
    pub source: Endpoint,
    pub target: Endpoint,
    /// `g(x) = f(c(κ(x)), x)` with `κ` the source parameterization.
    pub g: CompiledMap,
    s: SetFn,
    /// Bound on the listed size of `s(k)` in terms of `|k|`.
    pub s_len: PolyBound,
    pub note: String,
}

impl PolyCompReduction {
    pub fn new<S>(
        id: impl Into<String>,
        source: Endpoint,
        target: Endpoint,
        g: CompiledMap,
        s_len: PolyBound,
        s: S,
    ) -> Self
    where
        S: Fn(&BinStr) -> Result<ParamSet> + Send + Sync + 'static,
    {
        PolyCompReduction {
            id: id.into(),
            source,
            target,
            g,
            s: Arc::new(s),
            s_len,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Same reduction with a different map; used for mutants.
    pub fn with_map(&self, id: impl Into<String>, g: CompiledMap) -> Self {
        PolyCompReduction {
            id: id.into(),
            g,
            ..self.clone()
        }
    }

    pub fn s(&self, k: &BinStr) -> Result<ParamSet> {
        (self.s)(k)
    }

    pub fn s_fn(&self) -> SetFn {
        self.s.clone()
    }

    pub fn image(&self, x: &BinStr) -> Result<BinStr> {
        self.g.apply(x)
    }
}

impl fmt::Debug for PolyCompReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PolyCompReduction({}: {} -> {})",
            self.id,
            self.source.label(),
            self.target.label()
        )
    }
}

/// Contract B for one image: is `κ′(y)` listed in `s(κ(x))`? A malformed
/// image has no parameter and fails the check.
pub fn contract_b_holds(r: &PolyCompReduction, s_k: &ParamSet, y: &BinStr) -> bool {
    r.target
        .param
        .apply(y)
        .map(|k2| s_k.contains(&k2))
        .unwrap_or(false)
}

/// `(g(x), κ′(g(x)) ∈ s(κ(x)))`.
pub fn apply_reduction(r: &PolyCompReduction, x: &BinStr) -> Result<(BinStr, bool)> {
    if !r.source.problem.validate(x) {
        return Err(Error::malformed(format!(
            "not a valid {} instance",
            r.source.problem.id()
        )));
    }
    let k = r.source.param.apply(x)?;
    let y = r.image(x)?;
    let held = contract_b_holds(r, &r.s(&k)?, &y);
    Ok((y, held))
}

/// Chains `g1` into `g2` through a table of compiled values. The offline
/// part is `(c1(k), {(k′, c2(k′)) : k′ ∈ s1(k)})`; the online part computes
/// `x′ = f1(d, x)`, looks up `c2(κ′(x′))` and returns `f2(c2(κ′(x′)), x′)`.
fn chain_maps(
    g1: &CompiledMap,
    mid: Parameterization,
    s1: SetFn,
    s1_len: &PolyBound,
    g2: &CompiledMap,
) -> CompiledMap {
    let (c1, c2) = (g1.clone(), g2.clone());
    let offline = move |k: &BinStr| {
        let d = c1.offline(k)?;
        let mut items = Vec::new();
        for k2 in s1(k)?.iter() {
            let d2 = c2.offline(&k2)?;
            items.push(k2);
            items.push(d2);
        }
        Ok(encode_pair(&d, &encode_seq(&items)))
    };
    let (f1, f2) = (g1.clone(), g2.clone());
    let prepare = move |dd: &BinStr| {
        let (d, table) = decode_pair(dd)?;
        let items = decode_seq(&table)?;
        if items.len() % 2 != 0 {
            return Err(Error::malformed("composite table has an odd item count"));
        }
        let p1 = f1.prepare(&d)?;
        let mut lookup: HashMap<BinStr, Prepared> = HashMap::with_capacity(items.len() / 2);
        for pair in items.chunks(2) {
            lookup.insert(pair[0].clone(), f2.prepare(&pair[1])?);
        }
        let mid = mid.clone();
        Ok(Arc::new(move |x: &BinStr| {
            let x2 = p1(x)?;
            let k2 = mid.apply(&x2)?;
            match lookup.get(&k2) {
                Some(p2) => p2(&x2),
                None => Err(Error::MissingTableEntry(k2.to_string())),
            }
        }) as Prepared)
    };
    // |c⁺(k)| ≤ 2|c1(k)| + 1 + 2|s1(k)| + 2|s1(k)|·|c2(k′)| with |k′| ≤ |s1(k)|
    let offline_len = PolyBound::sum(
        PolyBound::sum(
            PolyBound::product(PolyBound::of(&[2]), g1.offline_len.clone()),
            PolyBound::of(&[1]),
        ),
        PolyBound::sum(
            PolyBound::product(PolyBound::of(&[2]), s1_len.clone()),
            PolyBound::product(
                PolyBound::product(PolyBound::of(&[2]), s1_len.clone()),
                PolyBound::compose(g2.offline_len.clone(), s1_len.clone()),
            ),
        ),
    );
    CompiledMap::curried(g1.param.clone(), offline_len, offline, prepare)
}

/// `(g⁺, s⁺)` for `r2 ∘ r1`, with `s⁺(k) = ⋃_{k′ ∈ s1(k)} s2(k′)`.
pub fn compose_reductions(
    r1: &PolyCompReduction,
    r2: &PolyCompReduction,
) -> Result<PolyCompReduction> {
    if !r1.target.same_as(&r2.source) {
        return Err(Error::IncompatibleEndpoints(format!(
            "{} ends at {}, {} starts at {}",
            r1.id,
            r1.target.label(),
            r2.id,
            r2.source.label()
        )));
    }
    let g = chain_maps(&r1.g, r1.target.param.clone(), r1.s.clone(), &r1.s_len, &r2.g);
    let (s1, s2) = (r1.s.clone(), r2.s.clone());
    let s_len = PolyBound::product(
        r1.s_len.clone(),
        PolyBound::compose(r2.s_len.clone(), r1.s_len.clone()),
    );
    Ok(PolyCompReduction::new(
        format!("{}+{}", r1.id, r2.id),
        r1.source.clone(),
        r2.target.clone(),
        g,
        s_len,
        move |k| {
            let sets = s1(k)?
                .iter()
                .map(|k2| s2(&k2))
                .collect::<Result<Vec<_>>>()?;
            Ok(ParamSet::union(&sets))
        },
    ))
}

/// A scheme for the source of `r`, obtained by running `r` and then the
/// scheme `w` for its target. A chopped claim of `w` with bound `p`
/// becomes `p ∘ s_len`.
pub fn pull_witness(r: &PolyCompReduction, w: &CompilationScheme) -> Result<CompilationScheme> {
    let w_end = Endpoint::new(w.problem.clone(), w.param().clone());
    if !r.target.same_as(&w_end) {
        return Err(Error::IncompatibleEndpoints(format!(
            "{} ends at {}, scheme {} is for {}",
            r.id,
            r.target.label(),
            w.id,
            w_end.label()
        )));
    }
    let map = chain_maps(&r.g, r.target.param.clone(), r.s.clone(), &r.s_len, &w.map);
    let claim = match &w.claim {
        ClassClaim::Chopped(p) => {
            ClassClaim::Chopped(PolyBound::compose(p.clone(), r.s_len.clone()))
        }
        ClassClaim::PolyComp => ClassClaim::PolyComp,
        ClassClaim::ExpComp(p) => ClassClaim::ExpComp(p.clone()),
    };
    Ok(CompilationScheme::new(
        format!("{}.via.{}", w.id, r.id),
        r.source.problem.clone(),
        map,
        w.target.clone(),
        claim,
    ))
}

/// Listed size of `{un(0), ..., un(p)}` as a bound in the argument of `p`.
fn unary_range_bound(p: &PolyBound) -> PolyBound {
    PolyBound::product(
        PolyBound::sum(p.clone(), PolyBound::of(&[1])),
        PolyBound::sum(p.clone(), PolyBound::of(&[2])),
    )
}

/// `s(k) = {un(0), ..., un(p(|k|))}` with the evaluation checked.
fn unary_range_set(p: PolyBound) -> impl Fn(&BinStr) -> Result<ParamSet> + Send + Sync {
    move |k| Ok(ParamSet::unary_range(p.eval(k.len() as u64)? as usize))
}

/// From a chopped scheme for `(Q, κ)`: the reduction `(Q, κ) → (Q′, len)`
/// with the same `g` and `s(k) = {un(0), ..., un(p(|k|))}`.
pub fn to_len_characterization(w: &CompilationScheme) -> Result<PolyCompReduction> {
    let p = w
        .chopped_bound()
        .ok_or_else(|| Error::SchemePrecondition(w.id.clone(), "no chopped claim".into()))?
        .clone();
    Ok(PolyCompReduction::new(
        format!("{}.to-len", w.id),
        Endpoint::new(w.problem.clone(), w.param().clone()),
        Endpoint::new(w.target.clone(), Parameterization::len()),
        w.map.clone(),
        unary_range_bound(&p),
        unary_range_set(p),
    ))
}

/// From a reduction into `(Q′, len)`: a chopped scheme with the same `g`.
/// `|g(x)| = |len(g(x))|` is at most the longest member of `s(κ(x))`,
/// which is at most `s_len(|κ(x)|)`.
pub fn from_len_characterization(r: &PolyCompReduction) -> Result<CompilationScheme> {
    if r.target.param.id() != "len" {
        return Err(Error::IncompatibleEndpoints(format!(
            "{} targets {}, not a len endpoint",
            r.id,
            r.target.label()
        )));
    }
    Ok(CompilationScheme::new(
        format!("{}.from-len", r.id),
        r.source.problem.clone(),
        r.g.clone(),
        r.target.problem.clone(),
        ClassClaim::Chopped(r.s_len.clone()),
    ))
}

/// Lifts a many-one map `m: Q′ → Q⁺` with `|m(x)| ≤ p_len(|x|)` to
/// `(Q′, len) → (Q⁺, len)`: empty offline part, `s(un(ℓ)) = {un(0..p_len(ℓ))}`.
/// The length bound is audited on `audit` up front and again on every
/// application.
pub fn lift_mreduction<M>(
    id: impl Into<String>,
    source: LangRef,
    target: LangRef,
    m: M,
    p_len: PolyNat,
    audit: &[BinStr],
) -> Result<PolyCompReduction>
where
    M: Fn(&BinStr) -> Result<BinStr> + Send + Sync + 'static,
{
    let id = id.into();
    let checked = {
        let (p, id) = (p_len.clone(), id.clone());
        move |x: &BinStr| {
            let y = m(x)?;
            let cap = p.eval(x.len() as u64)?;
            if y.len() as u64 > cap {
                return Err(Error::LengthAuditFailure(format!(
                    "{id}: |m(x)| = {} exceeds {cap} for |x| = {}",
                    y.len(),
                    x.len()
                )));
            }
            Ok(y)
        }
    };
    for x in audit {
        checked(x)?;
    }
    let p = PolyBound::poly(p_len);
    Ok(PolyCompReduction::new(
        id,
        Endpoint::new(source, Parameterization::len()),
        Endpoint::new(target, Parameterization::len()),
        CompiledMap::online_only(Parameterization::len(), checked),
        unary_range_bound(&p),
        unary_range_set(p),
    ))
}
