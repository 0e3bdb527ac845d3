use std::fmt;

use itertools::Itertools;

use super::{Budget, ClassTag, InstanceStream, Language, Meter};
use crate::base::{encode_unary, index_width, BinStr, Parameterization, PolyNat};
use crate::error::{Error, Result};

pub const MAX_SAT_VARS: usize = 20;

/// A literal over variable `var` (1-based); orders by variable, positive first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: u32,
    pub neg: bool,
}

impl Lit {
    pub fn pos(var: u32) -> Self {
        Lit { var, neg: false }
    }

    pub fn negative(var: u32) -> Self {
        Lit { var, neg: true }
    }

    /// Truth value under an assignment whose bit `var-1` holds variable `var`.
    #[inline]
    pub fn eval(self, assignment: u64) -> bool {
        ((assignment >> (self.var - 1)) & 1 == 1) != self.neg
    }

    fn write(self, out: &mut BinStr, width: usize) {
        out.push(self.neg);
        out.push_fixed((self.var - 1) as u64, width);
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.neg {
            write!(f, "-{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

pub type Clause = [Lit; 3];

/// A 3CNF formula; clauses are exactly three literals, repetition allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cnf3 {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Self {
        Cnf3 { num_vars, clauses }
    }

    /// Sorts literals and clauses. Does not renumber variables.
    pub fn canonicalize(mut self) -> Self {
        for c in &mut self.clauses {
            c.sort();
        }
        self.clauses.sort();
        self
    }

    /// Canonical form: sorted literals, sorted clause list (repeats allowed),
    /// every variable `1..=num_vars` occurring.
    pub fn is_canonical(&self) -> bool {
        let lits_ok = self
            .clauses
            .iter()
            .all(|c| c.windows(2).all(|w| w[0] <= w[1]) && c.iter().all(|l| self.in_range(*l)));
        lits_ok
            && self.clauses.windows(2).all(|w| w[0] <= w[1])
            && self.occurring_vars() == self.full_mask()
    }

    fn in_range(&self, l: Lit) -> bool {
        l.var >= 1 && (l.var as usize) <= self.num_vars
    }

    fn full_mask(&self) -> u64 {
        if self.num_vars >= 64 {
            u64::MAX
        } else {
            (1u64 << self.num_vars) - 1
        }
    }

    pub fn occurring_vars(&self) -> u64 {
        self.clauses
            .iter()
            .flatten()
            .fold(0u64, |m, l| m | (1u64 << ((l.var - 1) % 64)))
    }

    /// Removes duplicate clauses of a canonical formula.
    pub fn dedup(&self) -> Cnf3 {
        let mut clauses = self.clauses.clone();
        clauses.dedup();
        Cnf3::new(self.num_vars, clauses)
    }

    pub fn encode(&self) -> BinStr {
        let w = index_width(self.num_vars);
        let mut out = BinStr::with_capacity(encoded_len(self.num_vars, self.clauses.len()));
        out.push_ones(self.num_vars);
        out.push(false);
        for l in self.clauses.iter().flatten() {
            l.write(&mut out, w);
        }
        out
    }

    /// Decodes without the canonicality check.
    pub fn decode_raw(x: &BinStr) -> Result<Cnf3> {
        let mut r = x.reader();
        let n = r
            .read_unary()
            .ok_or_else(|| Error::malformed("3cnf: missing variable header"))?;
        let w = index_width(n);
        let per_clause = 3 * (1 + w);
        if !r.remaining().is_multiple_of(per_clause) {
            return Err(Error::malformed("3cnf: trailing bits"));
        }
        let m = r.remaining() / per_clause;
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let mut c = [Lit::pos(1); 3];
            for slot in &mut c {
                let neg = r.read_bit().unwrap();
                let idx = r.read_fixed(w).unwrap() as usize;
                if idx >= n {
                    return Err(Error::malformed("3cnf: variable index out of range"));
                }
                *slot = Lit {
                    var: idx as u32 + 1,
                    neg,
                };
            }
            clauses.push(c);
        }
        Ok(Cnf3::new(n, clauses))
    }

    pub fn decode(x: &BinStr) -> Result<Cnf3> {
        let f = Cnf3::decode_raw(x)?;
        if !f.is_canonical() {
            return Err(Error::malformed("3cnf: not in canonical form"));
        }
        Ok(f)
    }

    /// Per-clause (positive mask, negative mask) pairs for fast evaluation.
    pub fn clause_masks(&self) -> Vec<(u64, u64)> {
        self.clauses
            .iter()
            .map(|c| {
                c.iter().fold((0u64, 0u64), |(p, n), l| {
                    let bit = 1u64 << (l.var - 1);
                    if l.neg {
                        (p, n | bit)
                    } else {
                        (p | bit, n)
                    }
                })
            })
            .collect()
    }

    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment)))
    }
}

/// Length of the encoding of a formula with `n` variables and `m` clauses.
pub fn encoded_len(n: usize, m: usize) -> usize {
    n + 1 + 3 * m * (1 + index_width(n))
}

/// Truth-table satisfiability over clause masks.
pub(crate) fn brute_force_sat(n: usize, masks: &[(u64, u64)], meter: &mut Meter) -> Result<bool> {
    if n > MAX_SAT_VARS {
        return Err(Error::scale(format!("{n} variables exceed the cap of {MAX_SAT_VARS}")));
    }
    let full = (1u64 << n) - 1;
    for a in 0..(1u64 << n) {
        meter.tick(masks.len() as u64 + 1)?;
        if masks.iter().all(|&(p, q)| a & p != 0 || (!a & full) & q != 0) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Every canonical clause over `n` variables, sorted.
pub fn all_clauses(n: usize) -> Vec<Clause> {
    let lits: Vec<Lit> = (1..=n as u32)
        .flat_map(|v| [Lit::pos(v), Lit::negative(v)])
        .collect();
    lits.iter()
        .copied()
        .combinations_with_replacement(3)
        .map(|c| [c[0], c[1], c[2]])
        .sorted()
        .collect()
}

/// 3-SAT.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThreeSat;

impl Language for ThreeSat {
    fn id(&self) -> &str {
        "3sat"
    }

    fn class_tag(&self) -> ClassTag {
        ClassTag::NP
    }

    fn validate(&self, x: &BinStr) -> bool {
        Cnf3::decode(x).is_ok()
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        let f = Cnf3::decode(x)?;
        brute_force_sat(f.num_vars, &f.clause_masks(), meter)
    }

    fn enumerate(&self, budget: &Budget) -> Result<InstanceStream<'_>> {
        Ok(Box::new(
            enumerate_formulas(budget)?.map(|f| f.encode()),
        ))
    }
}

/// Canonical formulas with pairwise distinct clauses, variable counts in the
/// budget's size range and at most `max_clauses` clauses.
pub fn enumerate_formulas(budget: &Budget) -> Result<impl Iterator<Item = Cnf3> + Send> {
    if budget.max_size > 3 && budget.max_clauses.is_none() {
        return Err(Error::scale("3cnf enumeration beyond 3 variables needs a clause cap"));
    }
    let max_clauses = budget.max_clauses;
    Ok(budget.sizes().flat_map(move |n| {
        let clauses = all_clauses(n);
        let full = if n == 0 { 0 } else { (1u64 << n) - 1 };
        let cap = max_clauses.unwrap_or(clauses.len()).min(clauses.len());
        let start = usize::from(n > 0);
        (start..=cap).flat_map(move |size| {
            let clauses = clauses.clone();
            (0..clauses.len())
                .combinations(size)
                .map(move |idx| Cnf3::new(n, idx.iter().map(|&i| clauses[i]).collect()))
                .filter(move |f| f.occurring_vars() == full)
        })
    }))
}

/// `ν(φ)`: the number of variables, in unary.
pub fn nu() -> Parameterization {
    Parameterization::new("nu", PolyNat::identity(), |x| {
        Ok(encode_unary(Cnf3::decode(x)?.num_vars))
    })
}
