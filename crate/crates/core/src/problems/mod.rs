//! Concrete languages: canonical encodings, validity checks, brute-force
//! deciders and bounded instance generators.

mod circuit;
mod graph;
mod hitting;
mod pairs;
mod parity;
mod sat;
pub mod text;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::{BinStr, Parameterization};
use crate::error::{Error, Result};

pub use circuit::{circuit_from_cnf, munu, Circuit, CircuitSat, Gate};
pub use graph::{gamma, ham_path_by_extension, ham_path_by_permutations, Graph, HamPath};
pub use hitting::{candidate_edges, Hypergraph, HittingSet, MAX_HS_VERTICES};
pub use pairs::{minimal_models, ClauseQuery, PairKind, PairLang};
pub use parity::Parity;
pub use sat::{all_clauses, enumerate_formulas, nu, Clause, Cnf3, Lit, ThreeSat, MAX_SAT_VARS};
pub use graph::MAX_HAM_NODES;

pub mod lengths {
    //! Closed-form encoding lengths.
    pub use super::circuit::max_encoded_len as circuit_max_len;
    pub use super::graph::encoded_len as graph_len;
    pub use super::hitting::encoded_len as hypergraph_len;
    pub use super::sat::encoded_len as cnf_len;
}

/// Complexity class of a language, kept as metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    PTIME,
    NP,
    #[allow(non_camel_case_types)]
    coNP,
    SigmaP(u8),
    PiP(u8),
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::PTIME => write!(f, "P"),
            ClassTag::NP => write!(f, "NP"),
            ClassTag::coNP => write!(f, "coNP"),
            ClassTag::SigmaP(i) => write!(f, "Sigma{i}P"),
            ClassTag::PiP(i) => write!(f, "Pi{i}P"),
        }
    }
}

/// Step counter handed to deciders. Running out aborts with `OracleTimeout`.
#[derive(Debug, Clone)]
pub struct Meter {
    left: u64,
}

impl Meter {
    pub fn new(steps: u64) -> Self {
        Meter { left: steps }
    }

    pub fn unlimited() -> Self {
        Meter { left: u64::MAX }
    }

    #[inline]
    pub fn tick(&mut self, n: u64) -> Result<()> {
        match self.left.checked_sub(n) {
            Some(v) => {
                self.left = v;
                Ok(())
            }
            None => Err(Error::OracleTimeout),
        }
    }
}

/// Structural enumeration budget. What "size" means depends on the problem:
/// string length, variables, nodes, gates or vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub min_size: usize,
    pub max_size: usize,
    /// Upper bound on the hitting-set budget, or on the length of the second
    /// component for pair languages.
    pub max_k: usize,
    pub max_clauses: Option<usize>,
}

impl Budget {
    pub fn upto(max_size: usize) -> Self {
        Budget {
            min_size: 0,
            max_size,
            max_k: 0,
            max_clauses: None,
        }
    }

    pub fn exactly(size: usize) -> Self {
        Budget {
            min_size: size,
            ..Budget::upto(size)
        }
    }

    pub fn with_k(mut self, max_k: usize) -> Self {
        self.max_k = max_k;
        self
    }

    pub fn with_clauses(mut self, max_clauses: usize) -> Self {
        self.max_clauses = Some(max_clauses);
        self
    }

    pub fn sizes(&self) -> std::ops::RangeInclusive<usize> {
        self.min_size..=self.max_size
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size {}..={}", self.min_size, self.max_size)?;
        if self.max_k > 0 {
            write!(f, ", k<={}", self.max_k)?;
        }
        if let Some(m) = self.max_clauses {
            write!(f, ", clauses<={m}")?;
        }
        Ok(())
    }
}

pub type InstanceStream<'a> = Box<dyn Iterator<Item = BinStr> + Send + 'a>;

/// A decidable language over binary strings.
pub trait Language: Send + Sync {
    fn id(&self) -> &str;

    fn class_tag(&self) -> ClassTag;

    /// True iff `x` is a canonical encoding of an instance.
    fn validate(&self, x: &BinStr) -> bool;

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool>;

    fn decide(&self, x: &BinStr) -> Result<bool> {
        self.decide_metered(x, &mut Meter::unlimited())
    }

    /// Membership with malformed strings counted as non-members. Scale and
    /// budget errors still propagate.
    fn member(&self, x: &BinStr) -> Result<bool> {
        match self.decide(x) {
            Err(Error::MalformedInstance(_)) | Err(Error::MalformedPair) => Ok(false),
            other => other,
        }
    }

    fn enumerate(&self, _budget: &Budget) -> Result<InstanceStream<'_>> {
        Err(Error::NotEnumerable(self.id().to_string()))
    }
}

pub type LangRef = Arc<dyn Language>;

/// Problem ids understood by [`problem_by_id`].
pub const PROBLEM_IDS: &[&str] = &[
    "parity", "3sat", "hampath", "circuitsat", "2hs", "3hs", "4hs", "ci", "mmc", "cmi",
];

pub fn problem_by_id(id: &str) -> Result<LangRef> {
    Ok(match id {
        "parity" => Arc::new(Parity),
        "3sat" => Arc::new(ThreeSat),
        "hampath" => Arc::new(HamPath),
        "circuitsat" => Arc::new(CircuitSat),
        "ci" => Arc::new(PairLang::new(PairKind::Ci)),
        "mmc" => Arc::new(PairLang::new(PairKind::Mmc)),
        "cmi" => Arc::new(PairLang::new(PairKind::Cmi)),
        _ => match id.strip_suffix("hs").and_then(|d| d.parse::<usize>().ok()) {
            Some(d) if (1..=8).contains(&d) => Arc::new(HittingSet::new(d)),
            _ => {
                return Err(Error::UnknownId {
                    kind: "problem",
                    id: id.to_string(),
                })
            }
        },
    })
}

pub fn param_by_id(id: &str) -> Result<Parameterization> {
    Ok(match id {
        "len" => Parameterization::len(),
        "pi1" => Parameterization::pi1(),
        "pi2" => Parameterization::pi2(),
        "mu" => Parameterization::mu(),
        "gamma" => gamma(),
        "nu" => nu(),
        "munu" => munu(),
        _ => {
            return Err(Error::UnknownId {
                kind: "parameterization",
                id: id.to_string(),
            })
        }
    })
}

/// Every string of length `lo..=hi` in length-then-lexicographic order.
pub fn all_strings(lo: usize, hi: usize) -> impl Iterator<Item = BinStr> + Send {
    let start = (1u64 << lo) - 1;
    let end = (1u64 << (hi + 1)) - 1;
    (start..end).map(BinStr::from_shortlex_index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_all_ids() {
        for id in PROBLEM_IDS {
            assert_eq!(problem_by_id(id).unwrap().id(), *id);
        }
        assert!(problem_by_id("9hs").is_err());
        assert!(problem_by_id("nope").is_err());
        for id in ["len", "pi1", "pi2", "mu", "gamma", "nu", "munu"] {
            assert_eq!(param_by_id(id).unwrap().id(), id);
        }
    }

    #[test]
    fn meter_runs_out() {
        let mut m = Meter::new(3);
        assert!(m.tick(2).is_ok());
        assert_eq!(m.tick(2), Err(Error::OracleTimeout));
    }

    #[test]
    fn string_ranges() {
        assert_eq!(all_strings(0, 4).count(), 31);
        assert_eq!(all_strings(2, 2).count(), 4);
        assert_eq!(all_strings(0, 0).next(), Some(BinStr::new()));
    }
}
