use super::sat::{enumerate_formulas, Cnf3, Lit};
use super::{Budget, ClassTag, InstanceStream, Language, Meter};
use crate::base::{decode_pair, encode_pair, index_width, BinStr, PolyNat};
use crate::error::{Error, Result};

pub const MAX_MODEL_VARS: usize = 16;

/// A repeat-free clause over the variables of a formula, literals strictly
/// increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClauseQuery {
    pub lits: Vec<Lit>,
}

impl ClauseQuery {
    pub fn new(mut lits: Vec<Lit>) -> Self {
        lits.sort();
        lits.dedup();
        ClauseQuery { lits }
    }

    pub fn encode(&self, n: usize) -> BinStr {
        let w = index_width(n);
        let mut out = BinStr::new();
        for l in &self.lits {
            out.push(l.neg);
            out.push_fixed((l.var - 1) as u64, w);
        }
        out
    }

    pub fn decode(y: &BinStr, n: usize) -> Result<ClauseQuery> {
        let w = index_width(n);
        if !y.len().is_multiple_of(1 + w) {
            return Err(Error::malformed("clause: trailing bits"));
        }
        let mut r = y.reader();
        let mut lits = Vec::new();
        while !r.is_done() {
            let neg = r.read_bit().unwrap();
            let idx = r.read_fixed(w).unwrap() as usize;
            if idx >= n {
                return Err(Error::malformed("clause: variable outside the formula"));
            }
            lits.push(Lit {
                var: idx as u32 + 1,
                neg,
            });
        }
        if !lits.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::malformed("clause: literals not strictly increasing"));
        }
        Ok(ClauseQuery { lits })
    }

    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.lits.iter().any(|l| l.eval(assignment))
    }
}

/// Models of `phi` minimal under inclusion of their true sets, ascending as
/// masks (variable 1 is the least significant bit).
pub fn minimal_models(phi: &Cnf3) -> Result<Vec<u64>> {
    let n = phi.num_vars;
    if n > MAX_MODEL_VARS {
        return Err(Error::scale(format!("{n} variables exceed the cap of {MAX_MODEL_VARS}")));
    }
    let models: Vec<u64> = (0..1u64 << n).filter(|&a| phi.satisfied_by(a)).collect();
    Ok(models
        .iter()
        .copied()
        .filter(|&m| !models.iter().any(|&z| z != m && z & m == z))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// Clause inference: `(φ, c)` with `φ ⊨ c`.
    Ci,
    /// Minimal model checking: `(φ, y)` with `y` a minimal model of `φ`.
    Mmc,
    /// Clause minimal inference: every minimal model of `φ` satisfies `c`.
    Cmi,
}

/// The three languages of pairs over 3CNF formulas.
#[derive(Debug, Clone)]
pub struct PairLang {
    kind: PairKind,
}

pub(crate) enum Second {
    Clause(ClauseQuery),
    Assignment(u64),
}

impl PairLang {
    pub fn new(kind: PairKind) -> Self {
        PairLang { kind }
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    /// Bound on `|(x, y)|` for members, as a polynomial in `|x|`.
    pub fn slice_poly(&self) -> PolyNat {
        match self.kind {
            // |y| ≤ 2n·w(n) + 2n ≤ 2|x|² and |(x,y)| = 2|x| + 1 + |y|
            PairKind::Ci | PairKind::Cmi => PolyNat::of(&[1, 2, 2]),
            PairKind::Mmc => PolyNat::of(&[1, 3]),
        }
    }

    pub(crate) fn split(&self, x: &BinStr) -> Result<(Cnf3, Second)> {
        let (a, b) = decode_pair(x)?;
        let phi = Cnf3::decode(&a)?;
        let second = match self.kind {
            PairKind::Mmc => {
                if b.len() != phi.num_vars {
                    return Err(Error::malformed("assignment length differs from variable count"));
                }
                let mask = b
                    .bits()
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (i, &v)| m | (v as u64) << i);
                Second::Assignment(mask)
            }
            _ => Second::Clause(ClauseQuery::decode(&b, phi.num_vars)?),
        };
        Ok((phi, second))
    }

    fn seconds(&self, n: usize) -> Vec<BinStr> {
        match self.kind {
            PairKind::Mmc => (0..1u64 << n)
                .map(|a| (0..n).map(|i| a >> i & 1 == 1).collect())
                .collect(),
            _ => {
                let lits: Vec<Lit> = (1..=n as u32)
                    .flat_map(|v| [Lit::pos(v), Lit::negative(v)])
                    .collect();
                (0u64..1 << lits.len())
                    .map(|s| {
                        let chosen = lits
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| s >> i & 1 == 1)
                            .map(|(_, &l)| l)
                            .collect();
                        ClauseQuery::new(chosen).encode(n)
                    })
                    .collect()
            }
        }
    }
}

impl Language for PairLang {
    fn id(&self) -> &str {
        match self.kind {
            PairKind::Ci => "ci",
            PairKind::Mmc => "mmc",
            PairKind::Cmi => "cmi",
        }
    }

    fn class_tag(&self) -> ClassTag {
        match self.kind {
            PairKind::Ci | PairKind::Mmc => ClassTag::coNP,
            PairKind::Cmi => ClassTag::PiP(2),
        }
    }

    fn validate(&self, x: &BinStr) -> bool {
        self.split(x).is_ok()
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        let (phi, second) = self.split(x)?;
        let n = phi.num_vars;
        if n > MAX_MODEL_VARS {
            return Err(Error::scale(format!("{n} variables exceed the cap of {MAX_MODEL_VARS}")));
        }
        meter.tick((1u64 << n) * (phi.clauses.len() as u64 + 1))?;
        Ok(match (self.kind, second) {
            (PairKind::Ci, Second::Clause(c)) => {
                (0..1u64 << n).all(|a| !phi.satisfied_by(a) || c.satisfied_by(a))
            }
            (PairKind::Mmc, Second::Assignment(y)) => {
                phi.satisfied_by(y)
                    && !(0..1u64 << n).any(|z| z != y && z & y == z && phi.satisfied_by(z))
            }
            (PairKind::Cmi, Second::Clause(c)) => {
                minimal_models(&phi)?.iter().all(|&m| c.satisfied_by(m))
            }
            _ => unreachable!("split matches the kind"),
        })
    }

    /// Formulas from the 3CNF enumeration paired with every admissible
    /// second component.
    fn enumerate(&self, budget: &Budget) -> Result<InstanceStream<'_>> {
        let formulas = enumerate_formulas(budget)?;
        Ok(Box::new(formulas.flat_map(move |phi| {
            let a = phi.encode();
            self.seconds(phi.num_vars)
                .into_iter()
                .map(move |b| encode_pair(&a, &b))
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i32) -> Lit {
        Lit {
            var: v.unsigned_abs(),
            neg: v < 0,
        }
    }

    fn cnf(n: usize, clauses: &[[i32; 3]]) -> Cnf3 {
        Cnf3::new(
            n,
            clauses.iter().map(|c| [lit(c[0]), lit(c[1]), lit(c[2])]).collect(),
        )
        .canonicalize()
    }

    fn clause(n: usize, lits: &[i32]) -> BinStr {
        ClauseQuery::new(lits.iter().map(|&v| lit(v)).collect()).encode(n)
    }

    fn assignment(bits: &str) -> BinStr {
        BinStr::parse(bits).unwrap()
    }

    #[test]
    fn ci_examples() {
        let ci = PairLang::new(PairKind::Ci);
        let phi = cnf(2, &[[1, 1, 1], [-1, 2, 2]]).encode();
        assert!(ci.decide(&encode_pair(&phi, &clause(2, &[2]))).unwrap());
        assert!(!ci.decide(&encode_pair(&phi, &clause(2, &[-2]))).unwrap());
    }

    #[test]
    fn mmc_examples() {
        let mmc = PairLang::new(PairKind::Mmc);
        let phi = cnf(2, &[[1, 2, 2]]).encode();
        assert!(mmc.decide(&encode_pair(&phi, &assignment("10"))).unwrap());
        assert!(!mmc.decide(&encode_pair(&phi, &assignment("11"))).unwrap());
        assert!(!mmc.validate(&encode_pair(&phi, &assignment("1"))));
    }

    #[test]
    fn cmi_examples() {
        let cmi = PairLang::new(PairKind::Cmi);
        let phi = cnf(2, &[[1, 2, 2]]).encode();
        assert!(cmi.decide(&encode_pair(&phi, &clause(2, &[1, 2]))).unwrap());
        assert!(!cmi.decide(&encode_pair(&phi, &clause(2, &[1]))).unwrap());
    }

    #[test]
    fn minimal_model_examples() {
        assert_eq!(minimal_models(&cnf(2, &[[1, 2, 2]])).unwrap(), vec![0b01, 0b10]);
        assert_eq!(
            minimal_models(&cnf(2, &[[1, 1, 1], [2, 2, 2]])).unwrap(),
            vec![0b11]
        );
        assert_eq!(minimal_models(&cnf(1, &[[1, 1, -1]])).unwrap(), vec![0]);
    }

    #[test]
    fn clause_validation() {
        let phi = cnf(2, &[[1, 2, 2]]).encode();
        let ci = PairLang::new(PairKind::Ci);
        // same literals, reversed order
        let mut rev = clause(2, &[1, 2]);
        let bits: Vec<bool> = rev.bits().chunks(2).rev().flatten().copied().collect();
        rev = BinStr::from_bits(bits);
        assert!(!ci.validate(&encode_pair(&phi, &rev)));
        assert!(ci.validate(&encode_pair(&phi, &BinStr::new())));
    }

    #[test]
    fn coherence_over_small_formulas() {
        let budget = Budget::upto(2).with_clauses(3);
        let mmc = PairLang::new(PairKind::Mmc);
        let cmi = PairLang::new(PairKind::Cmi);
        for x in mmc.enumerate(&budget).unwrap() {
            if mmc.decide(&x).unwrap() {
                let (phi, second) = mmc.split(&x).unwrap();
                let Second::Assignment(y) = second else { unreachable!() };
                assert!(phi.satisfied_by(y));
            }
        }
        for x in cmi.enumerate(&budget).unwrap() {
            let (phi, second) = cmi.split(&x).unwrap();
            let Second::Clause(c) = second else { unreachable!() };
            let want = minimal_models(&phi).unwrap().iter().all(|&m| c.satisfied_by(m));
            assert_eq!(cmi.decide(&x).unwrap(), want);
        }
    }

    #[test]
    fn members_respect_slice_polys() {
        let budget = Budget::upto(2).with_clauses(2);
        for kind in [PairKind::Ci, PairKind::Mmc, PairKind::Cmi] {
            let lang = PairLang::new(kind);
            for x in lang.enumerate(&budget).unwrap() {
                let first = decode_pair(&x).unwrap().0.len() as u64;
                assert!(x.len() as u64 <= lang.slice_poly().eval(first).unwrap());
            }
        }
    }
}
