use std::fmt;
use std::sync::Arc;

use super::{decode_pair, encode_pair, encode_unary, BinStr, PolyNat};
use crate::error::Result;

type ApplyFn = dyn Fn(&BinStr) -> Result<BinStr> + Send + Sync;

/// A named map from instances to parameter values with a declared length
/// polynomial. Two parameterizations are the same iff their ids match.
#[derive(Clone)]
pub struct Parameterization {
    id: String,
    apply: Arc<ApplyFn>,
    declared: PolyNat,
}

impl Parameterization {
    pub fn new<F>(id: impl Into<String>, declared: PolyNat, apply: F) -> Self
    where
        F: Fn(&BinStr) -> Result<BinStr> + Send + Sync + 'static,
    {
        Parameterization {
            id: id.into(),
            apply: Arc::new(apply),
            declared,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn declared_length_poly(&self) -> &PolyNat {
        &self.declared
    }

    pub fn apply(&self, x: &BinStr) -> Result<BinStr> {
        (self.apply)(x)
    }

    /// `len(x) = un(|x|)`.
    pub fn len() -> Self {
        Parameterization::new("len", PolyNat::identity(), |x| Ok(encode_unary(x.len())))
    }

    pub fn pi1() -> Self {
        Parameterization::new("pi1", PolyNat::identity(), |x| Ok(decode_pair(x)?.0))
    }

    pub fn pi2() -> Self {
        Parameterization::new("pi2", PolyNat::identity(), |x| Ok(decode_pair(x)?.1))
    }

    /// `μ(x, y) = (x, un(|y|))`.
    pub fn mu() -> Self {
        Parameterization::new("mu", PolyNat::identity(), |x| {
            let (a, b) = decode_pair(x)?;
            Ok(encode_pair(&a, &encode_unary(b.len())))
        })
    }

    pub fn same_as(&self, other: &Parameterization) -> bool {
        self.id == other.id
    }
}

impl fmt::Debug for Parameterization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Parameterization({})", self.id)
    }
}

/// A finite set of parameter values in listed representation. Ranges of
/// unary numerals are kept symbolic so that large ranges cost nothing until
/// someone walks them; sizes are still those of the listed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSet {
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Listed(Vec<BinStr>),
    UnaryUpTo(usize),
}

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet::new(Vec::new())
    }
}

impl ParamSet {
    pub fn new(mut members: Vec<BinStr>) -> Self {
        members.sort();
        members.dedup();
        ParamSet {
            repr: Repr::Listed(members),
        }
    }

    pub fn singleton(k: BinStr) -> Self {
        ParamSet {
            repr: Repr::Listed(vec![k]),
        }
    }

    /// `{un(0), un(1), ..., un(p)}`.
    pub fn unary_range(p: usize) -> Self {
        ParamSet {
            repr: Repr::UnaryUpTo(p),
        }
    }

    pub fn contains(&self, k: &BinStr) -> bool {
        match &self.repr {
            Repr::Listed(m) => m.binary_search(k).is_ok(),
            Repr::UnaryUpTo(p) => k.len() <= *p && k.is_all_ones(),
        }
    }

    /// Members in sorted order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = BinStr> + '_> {
        match &self.repr {
            Repr::Listed(m) => Box::new(m.iter().cloned()),
            // "" < "1" < "11" < ... is already sorted
            Repr::UnaryUpTo(p) => Box::new((0..=*p).map(encode_unary)),
        }
    }

    pub fn members(&self) -> Vec<BinStr> {
        self.iter().collect()
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Listed(m) => m.len(),
            Repr::UnaryUpTo(p) => p + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Size of the listed representation: every member plus one delimiter.
    pub fn encoded_len(&self) -> u64 {
        match &self.repr {
            Repr::Listed(m) => m.iter().map(|k| k.len() as u64 + 1).sum(),
            Repr::UnaryUpTo(p) => unary_range_encoded_len(*p as u64),
        }
    }

    pub fn union<'a, I: IntoIterator<Item = &'a ParamSet>>(sets: I) -> Self {
        let sets: Vec<&ParamSet> = sets.into_iter().collect();
        let ranges: Option<Vec<usize>> = sets
            .iter()
            .map(|s| match s.repr {
                Repr::UnaryUpTo(p) => Some(p),
                Repr::Listed(_) => None,
            })
            .collect();
        if let Some(p) = ranges.and_then(|r| r.into_iter().max()) {
            return ParamSet::unary_range(p);
        }
        ParamSet::new(sets.iter().flat_map(|s| s.iter()).collect())
    }
}

/// Encoded size of `{un(0), ..., un(p)}` without materializing it.
pub fn unary_range_encoded_len(p: u64) -> u64 {
    (p + 1) * (p + 2) / 2
}
