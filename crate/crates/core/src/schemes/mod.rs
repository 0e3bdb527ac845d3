//! Compilation schemes: an offline compiler over parameter values paired
//! with an online map into a target language, plus the constructions that
//! turn one kind of scheme into another.

mod chop;
mod kernel;
mod registry;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::base::{decode_pair, encode_pair, BinStr, Parameterization, PolyBound};
use crate::error::{Error, Result};
use crate::problems::{ClassTag, LangRef, Language, Meter};

pub use chop::{
    compile_chop_table, compile_normalized, fnv1a, query_compiled, ChopMode, ChopTable,
    CompiledArtifact, Payload, PayloadKind, SparseTable, LITERAL_CAP, PER_STRING_STEPS,
};
pub use kernel::{
    canonical_no, canonical_yes, kernel_bound, kernel_to_chopped, kernelize_hitting_set,
};
pub use registry::{scheme_by_id, SCHEME_IDS};

pub type OfflineFn = Arc<dyn Fn(&BinStr) -> Result<BinStr> + Send + Sync>;
/// `f(d, ·)` with the compiled value `d` already fixed.
pub type Prepared = Arc<dyn Fn(&BinStr) -> Result<BinStr> + Send + Sync>;
/// `d ↦ f(d, ·)`. Splitting the online map this way lets an evaluator decode
/// a compiled value once and reuse it for many instances.
pub type OnlineFn = Arc<dyn Fn(&BinStr) -> Result<Prepared> + Send + Sync>;

/// `g(x) = f(c(κ(x)), x)`. Calls to `c` are counted so callers can check
/// that an online path never reaches the offline compiler.
#[derive(Clone)]
pub struct CompiledMap {
    pub param: Parameterization,
    offline: OfflineFn,
    /// Bound on `|c(k)|` in terms of `|k|`.
    pub offline_len: PolyBound,
    online: OnlineFn,
    offline_calls: Arc<AtomicU64>,
}

impl CompiledMap {
    pub fn new<C, F>(param: Parameterization, offline_len: PolyBound, offline: C, online: F) -> Self
    where
        C: Fn(&BinStr) -> Result<BinStr> + Send + Sync + 'static,
        F: Fn(&BinStr, &BinStr) -> Result<BinStr> + Send + Sync + 'static,
    {
        let online = Arc::new(online);
        CompiledMap::curried(param, offline_len, offline, move |d: &BinStr| {
            let (d, online) = (d.clone(), online.clone());
            Ok(Arc::new(move |x: &BinStr| online(&d, x)) as Prepared)
        })
    }

    /// Like [`CompiledMap::new`], with the online map given as `d ↦ f(d, ·)`.
    pub fn curried<C, F>(param: Parameterization, offline_len: PolyBound, offline: C, prepare: F) -> Self
    where
        C: Fn(&BinStr) -> Result<BinStr> + Send + Sync + 'static,
        F: Fn(&BinStr) -> Result<Prepared> + Send + Sync + 'static,
    {
        CompiledMap {
            param,
            offline: Arc::new(offline),
            offline_len,
            online: Arc::new(prepare),
            offline_calls: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Empty offline part; the online map sees only the instance.
    pub fn online_only<F>(param: Parameterization, online: F) -> Self
    where
        F: Fn(&BinStr) -> Result<BinStr> + Send + Sync + 'static,
    {
        CompiledMap::new(
            param,
            PolyBound::of(&[0]),
            |_| Ok(BinStr::new()),
            move |_, x| online(x),
        )
    }

    pub fn offline(&self, k: &BinStr) -> Result<BinStr> {
        self.offline_calls.fetch_add(1, Ordering::Relaxed);
        (self.offline)(k)
    }

    pub fn online(&self, d: &BinStr, x: &BinStr) -> Result<BinStr> {
        (self.online)(d)?(x)
    }

    pub fn prepare(&self, d: &BinStr) -> Result<Prepared> {
        (self.online)(d)
    }

    pub fn apply(&self, x: &BinStr) -> Result<BinStr> {
        let k = self.param.apply(x)?;
        let d = self.offline(&k)?;
        self.online(&d, x)
    }

    pub fn offline_calls(&self) -> u64 {
        self.offline_calls.load(Ordering::Relaxed)
    }

    pub(crate) fn offline_fn(&self) -> OfflineFn {
        self.offline.clone()
    }

    pub(crate) fn online_fn(&self) -> OnlineFn {
        self.online.clone()
    }

    /// Same map with every online output passed through `post`.
    pub fn map_output<P>(&self, post: P) -> CompiledMap
    where
        P: Fn(BinStr) -> BinStr + Send + Sync + 'static,
    {
        let online = self.online.clone();
        let post = Arc::new(post);
        CompiledMap {
            param: self.param.clone(),
            offline: self.offline.clone(),
            offline_len: self.offline_len.clone(),
            online: Arc::new(move |d| {
                let (inner, post) = (online(d)?, post.clone());
                Ok(Arc::new(move |x: &BinStr| inner(x).map(|y| post(y))) as Prepared)
            }),
            offline_calls: self.offline_calls.clone(),
        }
    }
}

impl fmt::Debug for CompiledMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompiledMap(param={}, offline_len={})", self.param.id(), self.offline_len)
    }
}

#[derive(Debug, Clone)]
pub enum ClassClaim {
    PolyComp,
    /// `|g(x)| ≤ bound(|κ(x)|)`.
    Chopped(PolyBound),
    /// `|c(k)| ≤ 2^{bound(|k|)}`.
    ExpComp(PolyBound),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Plain,
    Kernel,
    Normalized,
}

/// A witness that `(problem, map.param)` compiles into `target`.
#[derive(Clone)]
pub struct CompilationScheme {
    pub id: String,
    pub problem: LangRef,
    pub map: CompiledMap,
    pub target: LangRef,
    pub claim: ClassClaim,
    pub kind: SchemeKind,
}

impl CompilationScheme {
    pub fn new(
        id: impl Into<String>,
        problem: LangRef,
        map: CompiledMap,
        target: LangRef,
        claim: ClassClaim,
    ) -> Self {
        CompilationScheme {
            id: id.into(),
            problem,
            map,
            target,
            claim,
            kind: SchemeKind::Plain,
        }
    }

    pub fn param(&self) -> &Parameterization {
        &self.map.param
    }

    pub fn chopped_bound(&self) -> Option<&PolyBound> {
        match &self.claim {
            ClassClaim::Chopped(b) => Some(b),
            _ => None,
        }
    }

    /// `g(x)`.
    pub fn image(&self, x: &BinStr) -> Result<BinStr> {
        self.map.apply(x)
    }

    /// `g(x) ∈ Q′`, malformed images counting as non-members.
    pub fn decide_via(&self, x: &BinStr) -> Result<bool> {
        self.target.member(&self.image(x)?)
    }

    pub fn with_map(&self, id: impl Into<String>, map: CompiledMap) -> Self {
        CompilationScheme {
            id: id.into(),
            map,
            ..self.clone()
        }
    }
}

impl fmt::Debug for CompilationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CompilationScheme({}: {}/{} -> {}, {:?})",
            self.id,
            self.problem.id(),
            self.param().id(),
            self.target.id(),
            self.claim
        )
    }
}

/// Strings whose first bit is 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstBitOne;

impl Language for FirstBitOne {
    fn id(&self) -> &str {
        "first-bit-one"
    }

    fn class_tag(&self) -> ClassTag {
        ClassTag::PTIME
    }

    fn validate(&self, _x: &BinStr) -> bool {
        true
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        meter.tick(1)?;
        Ok(x.bits().first() == Some(&true))
    }
}

/// Composes the online map with `h`, which answers `"1"` for images in the
/// (polynomial-time) target and `"0"` otherwise. The result lands in
/// [`FirstBitOne`] with every output of length exactly one.
pub fn normalize_to_chopped_ptime(scheme: &CompilationScheme) -> Result<CompilationScheme> {
    if scheme.target.class_tag() != ClassTag::PTIME {
        return Err(Error::SchemePrecondition(
            scheme.id.clone(),
            format!("target {} is not tagged PTIME", scheme.target.id()),
        ));
    }
    let online = scheme.map.online_fn();
    let target = scheme.target.clone();
    let map = CompiledMap {
        param: scheme.param().clone(),
        offline: scheme.map.offline_fn(),
        offline_len: scheme.map.offline_len.clone(),
        online: Arc::new(move |d| {
            let (inner, target) = (online(d)?, target.clone());
            Ok(Arc::new(move |x: &BinStr| {
                let y = inner(x)?;
                let mut meter = Meter::new(PER_STRING_STEPS);
                let inside = match target.decide_metered(&y, &mut meter) {
                    Err(Error::MalformedInstance(_)) | Err(Error::MalformedPair) => false,
                    other => other?,
                };
                Ok(BinStr::from_bits(vec![inside]))
            }) as Prepared)
        }),
        offline_calls: Arc::new(AtomicU64::new(0)),
    };
    Ok(CompilationScheme {
        id: format!("{}.normalized", scheme.id.trim_end_matches(".identity")),
        problem: scheme.problem.clone(),
        map,
        target: Arc::new(FirstBitOne),
        claim: ClassClaim::Chopped(PolyBound::of(&[1])),
        kind: SchemeKind::Normalized,
    })
}

/// `{(a, b) : f(a, b) ∈ Q′}` for an online map `f` and target `Q′`.
#[derive(Clone)]
pub struct OnlinePairs {
    id: String,
    online: OnlineFn,
    target: LangRef,
}

impl OnlinePairs {
    pub fn new(id: impl Into<String>, online: OnlineFn, target: LangRef) -> Self {
        OnlinePairs {
            id: id.into(),
            online,
            target,
        }
    }
}

impl Language for OnlinePairs {
    fn id(&self) -> &str {
        &self.id
    }

    fn class_tag(&self) -> ClassTag {
        self.target.class_tag()
    }

    fn validate(&self, x: &BinStr) -> bool {
        decode_pair(x).is_ok()
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        let (a, b) = decode_pair(x)?;
        let y = (self.online)(&a)?(&b)?;
        match self.target.decide_metered(&y, meter) {
            Err(Error::MalformedInstance(_)) | Err(Error::MalformedPair) => Ok(false),
            other => other,
        }
    }
}

/// `x ∈ Q ⟺ (c(κ(x)), x) ∈ pairs`.
#[derive(Clone)]
pub struct ParaWitness {
    pub map: CompiledMap,
    pub pairs: Arc<OnlinePairs>,
}

impl ParaWitness {
    pub fn witness_instance(&self, x: &BinStr) -> Result<BinStr> {
        let k = self.map.param.apply(x)?;
        Ok(encode_pair(&self.map.offline(&k)?, x))
    }

    pub fn decide(&self, x: &BinStr) -> Result<bool> {
        self.pairs.decide(&self.witness_instance(x)?)
    }
}

pub fn extract_para_witness(scheme: &CompilationScheme) -> ParaWitness {
    ParaWitness {
        map: scheme.map.clone(),
        pairs: Arc::new(OnlinePairs::new(
            format!("{}.pairs", scheme.id),
            scheme.map.online_fn(),
            scheme.target.clone(),
        )),
    }
}

/// `x ∈ Q ⟺ (a(un(|x|)), x) ∈ pairs`, with `a` depending on `|x|` only.
#[derive(Clone)]
pub struct AdviceWitness {
    offline: OfflineFn,
    pub advice_len: PolyBound,
    pub pairs: Arc<OnlinePairs>,
}

impl AdviceWitness {
    /// `a(1^n)`; fails on non-unary arguments.
    pub fn advice(&self, unary: &BinStr) -> Result<BinStr> {
        if !unary.is_all_ones() {
            return Err(Error::malformed("advice is indexed by unary strings"));
        }
        (self.offline)(unary)
    }

    pub fn decide(&self, x: &BinStr) -> Result<bool> {
        let a = self.advice(&crate::base::encode_unary(x.len()))?;
        self.pairs.decide(&encode_pair(&a, x))
    }
}

/// For a chopped scheme over the length parameterization: `a(1^n) = c(1^n)`
/// and `P = {(d, x) : f(d, x) ∈ Q′}`.
pub fn chopped_to_advice(scheme: &CompilationScheme) -> Result<AdviceWitness> {
    if scheme.param().id() != "len" {
        return Err(Error::SchemePrecondition(
            scheme.id.clone(),
            format!("parameterization is {}, not len", scheme.param().id()),
        ));
    }
    if scheme.chopped_bound().is_none() {
        return Err(Error::SchemePrecondition(scheme.id.clone(), "no chopped claim".into()));
    }
    Ok(AdviceWitness {
        offline: scheme.map.offline_fn(),
        advice_len: scheme.map.offline_len.clone(),
        pairs: Arc::new(OnlinePairs::new(
            format!("{}.advice", scheme.id),
            scheme.map.online_fn(),
            scheme.target.clone(),
        )),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::encode_unary;
    use crate::problems::{all_strings, Budget, Parity, ThreeSat};

    fn parity_odd(x: &BinStr) -> bool {
        x.bits().iter().filter(|&&b| b).count() % 2 == 1
    }

    #[test]
    fn normalized_parity_outputs_one_bit() {
        let s = scheme_by_id("parity.len.identity").unwrap();
        let n = normalize_to_chopped_ptime(&s).unwrap();
        assert_eq!(n.id, "parity.len.normalized");
        for x in all_strings(0, 4) {
            let y = n.image(&x).unwrap();
            assert_eq!(y.len(), 1);
            assert_eq!(n.decide_via(&x).unwrap(), parity_odd(&x));
        }
        assert_eq!(n.chopped_bound().unwrap().eval(100).unwrap(), 1);
    }

    #[test]
    fn normalizer_needs_ptime_target() {
        let s = scheme_by_id("3sat.nu.dedup").unwrap();
        assert!(matches!(
            normalize_to_chopped_ptime(&s),
            Err(Error::SchemePrecondition(..))
        ));
    }

    #[test]
    fn para_witness_for_parity() {
        let w = extract_para_witness(&scheme_by_id("parity.len.identity").unwrap());
        for x in all_strings(0, 6) {
            assert_eq!(w.decide(&x).unwrap(), parity_odd(&x));
        }
    }

    #[test]
    fn para_witness_for_3sat() {
        let s = scheme_by_id("3sat.nu.dedup").unwrap();
        let w = extract_para_witness(&s);
        for x in ThreeSat.enumerate(&Budget::upto(2).with_clauses(3)).unwrap() {
            assert_eq!(w.decide(&x).unwrap(), ThreeSat.decide(&x).unwrap());
        }
    }

    #[test]
    fn advice_for_parity() {
        let a = chopped_to_advice(&scheme_by_id("parity.len.identity").unwrap()).unwrap();
        for x in all_strings(0, 10) {
            assert_eq!(a.decide(&x).unwrap(), Parity.decide(&x).unwrap());
        }
        assert_eq!(
            a.advice(&encode_unary(3)).unwrap(),
            a.advice(&encode_unary(3)).unwrap()
        );
        assert!(a.advice(&BinStr::parse("10").unwrap()).is_err());
        assert!(chopped_to_advice(&scheme_by_id("3sat.nu.dedup").unwrap()).is_err());
    }

    #[test]
    fn mapped_output_shares_counter() {
        let s = scheme_by_id("parity.len.identity").unwrap();
        let m = s.map.map_output(|mut y| {
            y.push(true);
            y
        });
        let before = s.map.offline_calls();
        assert_eq!(m.apply(&BinStr::parse("1").unwrap()).unwrap().to_string(), "11");
        assert_eq!(s.map.offline_calls(), before + 1);
    }
}
