//! Small pair languages and mixed objects used to exercise the translators.

use std::sync::Arc;

use super::{MixedCWitness, MixedReduction, PairLanguage};
use crate::base::{decode_pair, encode_pair, BinStr, PolyBound, PolyNat};
use crate::error::{Error, Result};
use crate::problems::{all_strings, Budget, ClassTag, InstanceStream, Language, Meter, PairKind, Parity};

type PairPred = Arc<dyn Fn(&BinStr, &BinStr) -> bool + Send + Sync>;

/// A pair language given by a predicate. Every well-formed pair is a valid
/// instance; the grid enumeration takes `|x| ≤ max_size`, `|y| ≤ max_k`.
#[derive(Clone)]
pub struct FnPairs {
    id: String,
    tag: ClassTag,
    pred: PairPred,
}

impl FnPairs {
    pub fn new<P>(id: impl Into<String>, tag: ClassTag, pred: P) -> Self
    where
        P: Fn(&BinStr, &BinStr) -> bool + Send + Sync + 'static,
    {
        FnPairs {
            id: id.into(),
            tag,
            pred: Arc::new(pred),
        }
    }
}

impl Language for FnPairs {
    fn id(&self) -> &str {
        &self.id
    }

    fn class_tag(&self) -> ClassTag {
        self.tag
    }

    fn validate(&self, x: &BinStr) -> bool {
        decode_pair(x).is_ok()
    }

    fn decide_metered(&self, xy: &BinStr, meter: &mut Meter) -> Result<bool> {
        meter.tick(xy.len() as u64 + 1)?;
        let (x, y) = decode_pair(xy)?;
        Ok((self.pred)(&x, &y))
    }

    fn enumerate(&self, budget: &Budget) -> Result<InstanceStream<'_>> {
        if budget.max_size > 16 || budget.max_k > 16 {
            return Err(Error::scale("pair grid beyond 16 bits per component"));
        }
        let (lo, hi, ky) = (budget.min_size, budget.max_size, budget.max_k);
        Ok(Box::new(all_strings(lo, hi).flat_map(move |x| {
            all_strings(0, ky).map(move |y| encode_pair(&x, &y))
        })))
    }
}

fn odd(y: &BinStr) -> bool {
    y.count_ones() % 2 == 1
}

/// Every pair with `|x| ≤ max_x` and `|y| ≤ max_y`.
pub fn pair_grid(max_x: usize, max_y: usize) -> impl Iterator<Item = BinStr> + Send {
    all_strings(0, max_x).flat_map(move |x| all_strings(0, max_y).map(move |y| encode_pair(&x, &y)))
}

/// `B = {(1^m, y) : |y| ≤ m, y has odd parity}`; members have
/// `|(x, y)| = 2m + 1 + |y| ≤ 3m + 1`.
pub fn toy_parity_pairs() -> PairLanguage {
    PairLanguage::new(
        Arc::new(FnPairs::new("toy-parity", ClassTag::PTIME, |x, y| {
            x.is_all_ones() && y.len() <= x.len() && odd(y)
        })),
        Some(PolyNat::of(&[1, 3])),
    )
}

/// `{(1^m, y)}` with no constraint on `y`: no polynomial bounds its slices.
pub fn unbounded_toy_pairs() -> PairLanguage {
    PairLanguage::new(
        Arc::new(FnPairs::new("toy-unbounded", ClassTag::PTIME, |x, _| x.is_all_ones())),
        None,
    )
}

/// `f(x, 1^k) = 1` when `x = 1^m` with `m ≥ k`, else `0`, into
/// `B′ = {(1, y) : y has odd parity}`.
pub fn toy_witness() -> MixedCWitness {
    let target = PairLanguage::new(
        Arc::new(FnPairs::new("toy-flag-parity", ClassTag::PTIME, |b, y| {
            b.bits() == [true] && odd(y)
        })),
        None,
    );
    MixedCWitness::new("toy-parity", PolyBound::of(&[1]), target, |x, k| {
        let inside = x.is_all_ones() && x.len() >= k.len();
        Ok(BinStr::from_bits(vec![inside]))
    })
}

/// CI witnessed by itself: `f(x, 1^k) = x`.
pub fn ci_identity_witness() -> MixedCWitness {
    MixedCWitness::new(
        "ci.identity",
        PolyBound::of(&[0, 1]),
        PairLanguage::cdls(PairKind::Ci),
        |x, _| Ok(x.clone()),
    )
}

/// `{ε} × PARITY` to the toy language: `f₁(x, 1^m) = 1^m` if `x = ε`
/// (else `0`), `f₂` constant `ε`, `g(·, y) = y`.
pub fn eps_parity_reduction() -> MixedReduction {
    let mut source = PairLanguage::new(
        Arc::new(FnPairs::new("eps-parity", ClassTag::PTIME, |x, y| {
            x.is_empty() && odd(y)
        })),
        None,
    );
    source.eps_of = Some(Arc::new(Parity));
    MixedReduction::new(
        "eps-parity.toy",
        source,
        toy_parity_pairs(),
        PolyBound::of(&[1, 1]),
        PolyBound::of(&[0]),
        |x, k| {
            Ok(if x.is_empty() {
                k.clone()
            } else {
                BinStr::from_bits(vec![false])
            })
        },
        |_, _| Ok(BinStr::new()),
        |_, y| Ok(y.clone()),
    )
}
