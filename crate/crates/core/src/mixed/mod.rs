//! Languages of pairs `(x, y)` where only `x` is known in advance, and the
//! translators between mixed witnesses/reductions and native schemes and
//! poly-comp reductions.

mod fixtures;

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::base::{
    decode_pair, decode_seq, encode_pair, encode_seq, encode_unary, BinStr, ParamSet,
    Parameterization, PolyBound, PolyNat,
};
use crate::error::{Error, Result};
use crate::problems::{ClassTag, LangRef, Language, Meter, PairKind, PairLang};
use crate::reductions::{compose_reductions, Endpoint, PolyCompReduction};
use crate::schemes::{ClassClaim, CompilationScheme, CompiledMap, Prepared};

pub use fixtures::{
    ci_identity_witness, eps_parity_reduction, pair_grid, toy_parity_pairs, toy_witness,
    unbounded_toy_pairs, FnPairs,
};

/// `(x, y) ↦ f(x, 1^k)`, the unary argument being `un(|y|)`.
pub type MixedFn = Arc<dyn Fn(&BinStr, &BinStr) -> Result<BinStr> + Send + Sync>;
pub type OnlinePairFn = Arc<dyn Fn(&BinStr, &BinStr) -> Result<BinStr> + Send + Sync>;

/// The sentinel `(1, ε)`. Its first component is not a valid formula, and it
/// is outside every shipped pair language; translators check this before
/// relying on it.
pub fn z_n() -> BinStr {
    encode_pair(&BinStr::from_bits(vec![true]), &BinStr::new())
}

/// A language of pairs with an optional slice bound
/// `(x, y) ∈ B ⟹ |(x, y)| ≤ p(|x|)`.
#[derive(Clone)]
pub struct PairLanguage {
    pub lang: LangRef,
    pub slice_poly: Option<PolyNat>,
    /// Set when the language is literally `{ε} × Q⁺`.
    pub eps_of: Option<LangRef>,
}

impl PairLanguage {
    pub fn new(lang: LangRef, slice_poly: Option<PolyNat>) -> Self {
        PairLanguage {
            lang,
            slice_poly,
            eps_of: None,
        }
    }

    pub fn cdls(kind: PairKind) -> Self {
        let l = PairLang::new(kind);
        let p = l.slice_poly();
        PairLanguage::new(Arc::new(l), Some(p))
    }

    pub fn id(&self) -> &str {
        self.lang.id()
    }

    pub fn decide_pair(&self, x: &BinStr, y: &BinStr) -> Result<bool> {
        self.lang.member(&encode_pair(x, y))
    }
}

impl fmt::Debug for PairLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PairLanguage({}, slice={:?})", self.id(), self.slice_poly)
    }
}

/// `(x, y) ∈ B ⟺ (f(x, un(|y|)), y) ∈ B′`.
#[derive(Clone)]
pub struct MixedCWitness {
    pub id: String,
    f: MixedFn,
    /// Bound on `|f(x, 1^k)|` in terms of `|x| + k`.
    pub f_len: PolyBound,
    pub target: PairLanguage,
}

impl MixedCWitness {
    pub fn new<F>(id: impl Into<String>, f_len: PolyBound, target: PairLanguage, f: F) -> Self
    where
        F: Fn(&BinStr, &BinStr) -> Result<BinStr> + Send + Sync + 'static,
    {
        MixedCWitness {
            id: id.into(),
            f: Arc::new(f),
            f_len,
            target,
        }
    }

    pub fn f(&self, x: &BinStr, unary: &BinStr) -> Result<BinStr> {
        (self.f)(x, unary)
    }

    pub fn decide_pair(&self, x: &BinStr, y: &BinStr) -> Result<bool> {
        let a = self.f(x, &encode_unary(y.len()))?;
        self.target.decide_pair(&a, y)
    }
}

/// `(x, y) ∈ A ⟺ (f₁(x, un(|y|)), g(f₂(x, un(|y|)), y)) ∈ B`.
#[derive(Clone)]
pub struct MixedReduction {
    pub id: String,
    pub source: PairLanguage,
    pub target: PairLanguage,
    f1: MixedFn,
    f2: MixedFn,
    g: OnlinePairFn,
    /// Bounds on `|f₁|` and `|f₂|` in terms of `|x| + k`.
    pub f1_len: PolyBound,
    pub f2_len: PolyBound,
}

impl MixedReduction {
    #[allow(clippy::too_many_arguments)]
    pub fn new<F1, F2, G>(
        id: impl Into<String>,
        source: PairLanguage,
        target: PairLanguage,
        f1_len: PolyBound,
        f2_len: PolyBound,
        f1: F1,
        f2: F2,
        g: G,
    ) -> Self
    where
        F1: Fn(&BinStr, &BinStr) -> Result<BinStr> + Send + Sync + 'static,
        F2: Fn(&BinStr, &BinStr) -> Result<BinStr> + Send + Sync + 'static,
        G: Fn(&BinStr, &BinStr) -> Result<BinStr> + Send + Sync + 'static,
    {
        MixedReduction {
            id: id.into(),
            source,
            target,
            f1: Arc::new(f1),
            f2: Arc::new(f2),
            g: Arc::new(g),
            f1_len,
            f2_len,
        }
    }

    /// Same reduction with every output of `g` passed through `post`.
    pub fn map_g<P>(&self, id: impl Into<String>, post: P) -> Self
    where
        P: Fn(BinStr) -> BinStr + Send + Sync + 'static,
    {
        let g = self.g.clone();
        MixedReduction {
            id: id.into(),
            g: Arc::new(move |a, y| g(a, y).map(&post)),
            ..self.clone()
        }
    }

    /// The image pair `(f₁(x, un(|y|)), g(f₂(x, un(|y|)), y))`.
    pub fn image(&self, x: &BinStr, y: &BinStr) -> Result<BinStr> {
        let u = encode_unary(y.len());
        let a2 = (self.f2)(x, &u)?;
        Ok(encode_pair(&(self.f1)(x, &u)?, &(self.g)(&a2, y)?))
    }
}

/// `(B, π₁)` is chopped: `c(x) = (f(x, un(0)), ..., f(x, un(p(|x|))))`;
/// online, `(x, y)` goes to `(c(x)_{|y|}, y)` when `|y| ≤ p(|x|)` and to
/// `z_N` otherwise.
pub fn mixed_to_chopped(b: &PairLanguage, w: &MixedCWitness) -> Result<CompilationScheme> {
    let p = b
        .slice_poly
        .clone()
        .ok_or_else(|| Error::MissingSlicePoly(b.id().to_string()))?;
    let zn = z_n();
    if w.target.lang.member(&zn)? {
        return Err(Error::NoRejectingSentinel(w.target.id().to_string()));
    }
    let (f, pp) = (w.f.clone(), p.clone());
    let offline = move |x: &BinStr| {
        let top = pp.eval(x.len() as u64)? as usize;
        let table = (0..=top)
            .map(|i| f(x, &encode_unary(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(encode_seq(&table))
    };
    let prepare = move |d: &BinStr| {
        let table = decode_seq(d)?;
        let zn = zn.clone();
        Ok(Arc::new(move |xy: &BinStr| {
            let (_, y) = decode_pair(xy)?;
            Ok(match table.get(y.len()) {
                Some(a) => encode_pair(a, &y),
                None => zn.clone(),
            })
        }) as Prepared)
    };
    let p = PolyBound::poly(p);
    let f_at = PolyBound::compose(w.f_len.clone(), PolyBound::sum(PolyBound::of(&[0, 1]), p.clone()));
    let offline_len = PolyBound::product(
        PolyBound::sum(p.clone(), PolyBound::of(&[1])),
        PolyBound::sum(PolyBound::product(PolyBound::of(&[2]), f_at.clone()), PolyBound::of(&[1])),
    );
    let bound = PolyBound::sum(
        PolyBound::sum(PolyBound::product(PolyBound::of(&[2]), f_at), p),
        PolyBound::of(&[3]),
    );
    Ok(CompilationScheme::new(
        format!("{}.chopped", w.id),
        b.lang.clone(),
        CompiledMap::curried(Parameterization::pi1(), offline_len, offline, prepare),
        w.target.lang.clone(),
        ClassClaim::Chopped(bound),
    ))
}

/// `D′ = {((e, x), y) : f(e, (x, y)) ∈ D}` for a scheme's online map `f`
/// and target `D`.
struct ReboundPairs {
    id: String,
    map: CompiledMap,
    target: LangRef,
    // the last decoded offline value; consecutive queries usually share it
    last: Mutex<Option<(BinStr, Prepared)>>,
}

impl ReboundPairs {
    fn prepared(&self, e: &BinStr) -> Result<Prepared> {
        if let Some((d, p)) = self.last.lock().unwrap().as_ref() {
            if d == e {
                return Ok(p.clone());
            }
        }
        let p = self.map.prepare(e)?;
        *self.last.lock().unwrap() = Some((e.clone(), p.clone()));
        Ok(p)
    }
}

impl Language for ReboundPairs {
    fn id(&self) -> &str {
        &self.id
    }

    fn class_tag(&self) -> ClassTag {
        self.target.class_tag()
    }

    fn validate(&self, x: &BinStr) -> bool {
        decode_pair(x).and_then(|(ex, _)| decode_pair(&ex)).is_ok()
    }

    fn decide_metered(&self, xy: &BinStr, meter: &mut Meter) -> Result<bool> {
        let (ex, y) = decode_pair(xy)?;
        let (e, x) = decode_pair(&ex)?;
        let image = self.prepared(&e)?(&encode_pair(&x, &y))?;
        match self.target.decide_metered(&image, meter) {
            Err(Error::MalformedInstance(_)) | Err(Error::MalformedPair) => Ok(false),
            other => other,
        }
    }
}

/// From a chopped scheme for `(B, π₁)`: `f(x, 1^k) = (c(x), x)` into `D′`.
pub fn chopped_to_mixed(b: &PairLanguage, w: &CompilationScheme) -> Result<MixedCWitness> {
    if w.param().id() != "pi1" {
        return Err(Error::SchemePrecondition(
            w.id.clone(),
            format!("parameterization is {}, not pi1", w.param().id()),
        ));
    }
    if w.problem.id() != b.id() {
        return Err(Error::SchemePrecondition(
            w.id.clone(),
            format!("scheme is for {}, not {}", w.problem.id(), b.id()),
        ));
    }
    let target = PairLanguage::new(
        Arc::new(ReboundPairs {
            id: format!("{}.rebound", w.id),
            map: w.map.clone(),
            target: w.target.clone(),
            last: Mutex::new(None),
        }),
        None,
    );
    let map = w.map.clone();
    let f_len = PolyBound::sum(
        PolyBound::product(PolyBound::of(&[2]), w.map.offline_len.clone()),
        PolyBound::of(&[1, 1]),
    );
    Ok(MixedCWitness::new(format!("{}.mixed", w.id), f_len, target, move |x, _| {
        Ok(encode_pair(&map.offline(x)?, x))
    }))
}

/// `(A, μ) → (B, π₁)`: `c(x, 1^k) = (f₁(x, 1^k), f₂(x, 1^k))`,
/// `f((a₁, a₂), (x, y)) = (a₁, g(a₂, y))` and `s(x, 1^k) = {f₁(x, 1^k)}`.
pub fn mixed_reduction_to_polycomp(m: &MixedReduction) -> PolyCompReduction {
    let (f1, f2) = (m.f1.clone(), m.f2.clone());
    let offline = move |k: &BinStr| {
        let (x, u) = decode_pair(k)?;
        Ok(encode_pair(&f1(&x, &u)?, &f2(&x, &u)?))
    };
    let g = m.g.clone();
    let online = move |d: &BinStr, xy: &BinStr| {
        let (a1, a2) = decode_pair(d)?;
        let (_, y) = decode_pair(xy)?;
        Ok(encode_pair(&a1, &g(&a2, &y)?))
    };
    let offline_len = PolyBound::sum(
        PolyBound::product(PolyBound::of(&[2]), m.f1_len.clone()),
        PolyBound::sum(m.f2_len.clone(), PolyBound::of(&[1])),
    );
    let f1 = m.f1.clone();
    PolyCompReduction::new(
        format!("{}.polycomp", m.id),
        Endpoint::new(m.source.lang.clone(), Parameterization::mu()),
        Endpoint::new(m.target.lang.clone(), Parameterization::pi1()),
        CompiledMap::new(Parameterization::mu(), offline_len, offline, online),
        PolyBound::sum(m.f1_len.clone(), PolyBound::of(&[1])),
        move |k| {
            let (x, u) = decode_pair(k)?;
            Ok(ParamSet::singleton(f1(&x, &u)?))
        },
    )
}

/// `(Q⁺, len) → (B, π₁)` for a mixed reduction from `{ε} × Q⁺`: first
/// `x ↦ (ε, x)` with `s(1^m) = {μ(ε, 1^m)}`, then the translated reduction.
pub fn hardness_from_epsilon(m: &MixedReduction) -> Result<PolyCompReduction> {
    let q = m
        .source
        .eps_of
        .clone()
        .ok_or(Error::SourceShapeMismatch)?;
    let inject = PolyCompReduction::new(
        format!("{}.eps", q.id()),
        Endpoint::new(q, Parameterization::len()),
        Endpoint::new(m.source.lang.clone(), Parameterization::mu()),
        CompiledMap::online_only(Parameterization::len(), |x| Ok(encode_pair(&BinStr::new(), x))),
        PolyBound::of(&[2, 1]),
        |k: &BinStr| Ok(ParamSet::singleton(encode_pair(&BinStr::new(), k))),
    );
    compose_reductions(&inject, &mixed_reduction_to_polycomp(m))
}

/// `(A, π₁) → (A, μ)` for `A` with poly-bounded slices: pairs within the
/// slice bound pass unchanged, the rest go to `z_N`;
/// `s(x) = {(x, un(0)), ..., (x, un(p(|x|)))} ∪ {μ(z_N)}`.
pub fn slices_to_mu_reduction(a: &PairLanguage) -> Result<PolyCompReduction> {
    let p = a
        .slice_poly
        .clone()
        .ok_or_else(|| Error::MissingSlicePoly(a.id().to_string()))?;
    let zn = z_n();
    if a.lang.member(&zn)? {
        return Err(Error::NoRejectingSentinel(a.id().to_string()));
    }
    let mu_zn = Parameterization::mu().apply(&zn)?;
    let (pg, zg) = (p.clone(), zn.clone());
    let g = CompiledMap::online_only(Parameterization::pi1(), move |xy| {
        let (x, y) = decode_pair(xy)?;
        Ok(if y.len() as u64 <= pg.eval(x.len() as u64)? {
            xy.clone()
        } else {
            zg.clone()
        })
    });
    let ps = PolyBound::poly(p.clone());
    // (p + 1) members of size at most 2t + 1 + p, plus μ(z_N)
    let s_len = PolyBound::sum(
        PolyBound::product(
            PolyBound::sum(ps.clone(), PolyBound::of(&[1])),
            PolyBound::sum(ps, PolyBound::of(&[2, 2])),
        ),
        PolyBound::of(&[mu_zn.len() as u64 + 1]),
    );
    Ok(PolyCompReduction::new(
        format!("{}.slices-to-mu", a.id()),
        Endpoint::new(a.lang.clone(), Parameterization::pi1()),
        Endpoint::new(a.lang.clone(), Parameterization::mu()),
        g,
        s_len,
        move |x| {
            let top = p.eval(x.len() as u64)? as usize;
            let mut members: Vec<BinStr> =
                (0..=top).map(|i| encode_pair(x, &encode_unary(i))).collect();
            members.push(mu_zn.clone());
            Ok(ParamSet::new(members))
        },
    ))
}

/// Outcome of a slice-bound scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceAudit {
    pub language: String,
    pub bound: PolyNat,
    pub checked: u64,
    pub members: u64,
    /// Smallest `p(|x|) - |(x, y)|` over members; negative means violated.
    pub min_margin: Option<i64>,
    pub counterexample: Option<BinStr>,
}

impl SliceAudit {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.members > 0
    }
}

/// Checks `|(x, y)| ≤ p(|x|)` for every member among `instances`.
pub fn check_poly_bounded_slices<I>(a: &PairLanguage, p: &PolyNat, instances: I) -> Result<SliceAudit>
where
    I: IntoIterator<Item = BinStr>,
{
    let mut audit = SliceAudit {
        language: a.id().to_string(),
        bound: p.clone(),
        checked: 0,
        members: 0,
        min_margin: None,
        counterexample: None,
    };
    for xy in instances {
        audit.checked += 1;
        if !a.lang.member(&xy)? {
            continue;
        }
        audit.members += 1;
        let (x, _) = decode_pair(&xy)?;
        let margin = p.eval(x.len() as u64)? as i64 - xy.len() as i64;
        if audit.min_margin.is_none_or(|m| margin < m) {
            audit.min_margin = Some(margin);
            if margin < 0 {
                audit.counterexample = Some(xy.clone());
            }
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{all_strings, Budget, Parity};

    #[test]
    fn sentinel_is_rejected_everywhere() {
        let zn = z_n();
        assert_eq!(zn.to_string(), "101");
        for b in [
            toy_parity_pairs(),
            PairLanguage::cdls(PairKind::Ci),
            PairLanguage::cdls(PairKind::Mmc),
            PairLanguage::cdls(PairKind::Cmi),
        ] {
            assert!(!b.lang.member(&zn).unwrap(), "{}", b.id());
        }
    }

    #[test]
    fn toy_scheme_matches_oracle() {
        let b = toy_parity_pairs();
        let s = mixed_to_chopped(&b, &toy_witness()).unwrap();
        let bound = s.chopped_bound().unwrap().clone();
        for xy in pair_grid(5, 5) {
            let (x, y) = decode_pair(&xy).unwrap();
            assert_eq!(s.decide_via(&xy).unwrap(), b.decide_pair(&x, &y).unwrap(), "{xy}");
            let out = s.image(&xy).unwrap();
            assert!(out.len() as u64 <= bound.eval(x.len() as u64).unwrap());
        }
        // y longer than the slice: z_N
        let x = encode_unary(1);
        let y = BinStr::parse("1111111").unwrap();
        assert_eq!(s.image(&encode_pair(&x, &y)).unwrap(), z_n());
    }

    #[test]
    fn round_trip_on_toy() {
        let b = toy_parity_pairs();
        let s = mixed_to_chopped(&b, &toy_witness()).unwrap();
        let back = chopped_to_mixed(&b, &s).unwrap();
        for xy in pair_grid(4, 4) {
            let (x, y) = decode_pair(&xy).unwrap();
            assert_eq!(back.decide_pair(&x, &y).unwrap(), b.decide_pair(&x, &y).unwrap());
        }
        let x = encode_unary(2);
        assert_eq!(back.f(&x, &encode_unary(0)).unwrap(), back.f(&x, &encode_unary(7)).unwrap());
    }

    #[test]
    fn eps_reduction_translates() {
        let m = eps_parity_reduction();
        let r = mixed_reduction_to_polycomp(&m);
        for xy in pair_grid(2, 6) {
            let (y_img, held) = crate::reductions::apply_reduction(&r, &xy).unwrap();
            assert!(held);
            assert_eq!(
                m.source.lang.member(&xy).unwrap(),
                m.target.lang.member(&y_img).unwrap()
            );
        }
        let h = hardness_from_epsilon(&m).unwrap();
        for x in all_strings(0, 6) {
            let (img, held) = crate::reductions::apply_reduction(&h, &x).unwrap();
            assert!(held);
            assert_eq!(Parity.decide(&x).unwrap(), m.target.lang.member(&img).unwrap());
        }
        let not_eps = MixedReduction { source: toy_parity_pairs(), ..m };
        assert!(matches!(
            hardness_from_epsilon(&not_eps),
            Err(Error::SourceShapeMismatch)
        ));
    }

    #[test]
    fn slices_to_mu_on_toy() {
        let a = toy_parity_pairs();
        let r = slices_to_mu_reduction(&a).unwrap();
        let inside = encode_pair(&encode_unary(2), &BinStr::parse("1").unwrap());
        assert_eq!(r.image(&inside).unwrap(), inside);
        let outside = encode_pair(&encode_unary(1), &BinStr::parse("10000").unwrap());
        assert_eq!(r.image(&outside).unwrap(), z_n());
        assert!(crate::reductions::apply_reduction(&r, &outside).unwrap().1);
        assert!(matches!(
            slices_to_mu_reduction(&unbounded_toy_pairs()),
            Err(Error::MissingSlicePoly(_))
        ));
    }

    #[test]
    fn slice_audits() {
        let ci = PairLanguage::cdls(PairKind::Ci);
        let grid = ci.lang.enumerate(&Budget::upto(2).with_clauses(2)).unwrap();
        let audit = check_poly_bounded_slices(&ci, &ci.slice_poly.clone().unwrap(), grid).unwrap();
        assert!(audit.passed(), "{audit:?}");
        let toy = unbounded_toy_pairs();
        let audit = check_poly_bounded_slices(&toy, &PolyNat::constant(3), pair_grid(3, 3)).unwrap();
        assert!(!audit.passed());
        assert!(audit.min_margin.unwrap() < 0);
    }
}
