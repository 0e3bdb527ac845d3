use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 8;
pub const MAGNITUDE_CAP: u64 = 1 << 48;

/// A polynomial with natural coefficients, `coeffs[i]` multiplying `t^i`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyNat {
    coeffs: Vec<u64>,
}

impl PolyNat {
    /// Trailing zero coefficients are trimmed; the zero polynomial keeps `[0]`.
    pub fn new(coeffs: Vec<u64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(Error::DegreeCap(coeffs.len() - 1));
        }
        Ok(PolyNat { coeffs })
    }

    /// Shorthand for literals known to be within the degree cap.
    pub fn of(coeffs: &[u64]) -> Self {
        Self::new(coeffs.to_vec()).expect("literal polynomial within degree cap")
    }

    pub fn constant(c: u64) -> Self {
        Self::of(&[c])
    }

    pub fn identity() -> Self {
        Self::of(&[0, 1])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: u64) -> Result<u64> {
        eval_poly(self, t)
    }

    /// Evaluation that saturates at the magnitude cap instead of failing.
    pub fn eval_saturating(&self, t: u64) -> u64 {
        self.eval(t).unwrap_or(MAGNITUDE_CAP)
    }

    pub fn add(&self, other: &PolyNat) -> Result<PolyNat> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = capped_add(a, b)?;
        }
        PolyNat::new(out)
    }

    pub fn mul(&self, other: &PolyNat) -> Result<PolyNat> {
        let deg = self.degree() + other.degree();
        if deg > MAX_DEGREE {
            return Err(Error::DegreeCap(deg));
        }
        let mut out = vec![0u64; deg + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = capped_add(out[i + j], capped_mul(a, b)?)?;
            }
        }
        PolyNat::new(out)
    }

    /// `self ∘ inner`, i.e. `t ↦ self(inner(t))`.
    pub fn compose(&self, inner: &PolyNat) -> Result<PolyNat> {
        let deg = self.degree() * inner.degree();
        if deg > MAX_DEGREE {
            return Err(Error::DegreeCap(deg));
        }
        // Horner over polynomials
        let mut acc = PolyNat::constant(*self.coeffs.last().unwrap());
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(inner)?.add(&PolyNat::constant(c))?;
        }
        Ok(acc)
    }
}

fn capped_add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b)
        .filter(|&v| v <= MAGNITUDE_CAP)
        .ok_or(Error::Overflow)
}

fn capped_mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b)
        .filter(|&v| v <= MAGNITUDE_CAP)
        .ok_or(Error::Overflow)
}

/// `Σ cᵢ·tⁱ` with every intermediate value checked against 2^48.
pub fn eval_poly(p: &PolyNat, t: u64) -> Result<u64> {
    let mut acc = 0u64;
    for &c in p.coeffs.iter().rev() {
        acc = capped_add(capped_mul(acc, t)?, c)?;
    }
    Ok(acc)
}

impl fmt::Display for PolyNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for PolyNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyNat{self}")
    }
}

/// A monotone bound built from polynomials by sums, products and
/// composition. Composed reductions stack bounds whose expanded degree can
/// pass the cap long before their values at desk-scale arguments do, so the
/// tree is kept symbolic and evaluated directly.
#[derive(Clone)]
pub enum PolyBound {
    Poly(PolyNat),
    Sum(Arc<PolyBound>, Arc<PolyBound>),
    Product(Arc<PolyBound>, Arc<PolyBound>),
    /// `outer(inner(t))`
    Compose(Arc<PolyBound>, Arc<PolyBound>),
}

impl PolyBound {
    pub fn poly(p: PolyNat) -> Self {
        PolyBound::Poly(p)
    }

    pub fn of(coeffs: &[u64]) -> Self {
        PolyBound::Poly(PolyNat::of(coeffs))
    }

    pub fn sum(a: PolyBound, b: PolyBound) -> Self {
        PolyBound::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn product(a: PolyBound, b: PolyBound) -> Self {
        PolyBound::Product(Arc::new(a), Arc::new(b))
    }

    pub fn compose(outer: PolyBound, inner: PolyBound) -> Self {
        PolyBound::Compose(Arc::new(outer), Arc::new(inner))
    }

    pub fn eval(&self, t: u64) -> Result<u64> {
        match self {
            PolyBound::Poly(p) => p.eval(t),
            PolyBound::Sum(a, b) => capped_add(a.eval(t)?, b.eval(t)?),
            PolyBound::Product(a, b) => capped_mul(a.eval(t)?, b.eval(t)?),
            PolyBound::Compose(o, i) => o.eval(i.eval(t)?),
        }
    }

    pub fn eval_saturating(&self, t: u64) -> u64 {
        self.eval(t).unwrap_or(MAGNITUDE_CAP)
    }

    pub fn degree(&self) -> usize {
        match self {
            PolyBound::Poly(p) => p.degree(),
            PolyBound::Sum(a, b) => a.degree().max(b.degree()),
            PolyBound::Product(a, b) => a.degree() + b.degree(),
            PolyBound::Compose(o, i) => o.degree() * i.degree(),
        }
    }

    /// Flattens to a single polynomial; fails with `DegreeCap` when the
    /// expanded degree passes the cap.
    pub fn expand(&self) -> Result<PolyNat> {
        match self {
            PolyBound::Poly(p) => Ok(p.clone()),
            PolyBound::Sum(a, b) => a.expand()?.add(&b.expand()?),
            PolyBound::Product(a, b) => a.expand()?.mul(&b.expand()?),
            PolyBound::Compose(o, i) => o.expand()?.compose(&i.expand()?),
        }
    }
}

impl From<PolyNat> for PolyBound {
    fn from(p: PolyNat) -> Self {
        PolyBound::Poly(p)
    }
}

impl fmt::Display for PolyBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expand() {
            Ok(p) => write!(f, "{p}"),
            Err(_) => match self {
                PolyBound::Poly(p) => write!(f, "{p}"),
                PolyBound::Sum(a, b) => write!(f, "({a} + {b})"),
                PolyBound::Product(a, b) => write!(f, "({a} * {b})"),
                PolyBound::Compose(o, i) => write!(f, "{o}∘{i}"),
            },
        }
    }
}

impl fmt::Debug for PolyBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyBound({self})")
    }
}
