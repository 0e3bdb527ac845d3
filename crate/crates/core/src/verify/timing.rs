use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::BinStr;
use crate::error::{Error, Result};
use crate::problems::{ham_path_by_permutations, Graph, Meter};
use crate::schemes::{query_compiled, CompilationScheme, CompiledArtifact};

/// Seed for every randomized workload.
pub const SEED: u64 = 0xC0DEC;

pub const MIN_QUERIES: usize = 30;
const WARMUPS: usize = 3;
const ROUNDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub scheme: String,
    pub queries: usize,
    /// Median per-query time of the brute-force decider.
    pub baseline_ns: u64,
    /// Median per-query time of compiled lookups.
    pub compiled_ns: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub compile_ms: Option<u64>,
    pub speedup: f64,
}

/// `count` graphs from `G(n, 1/2)`.
pub fn random_graphs(n: usize, count: usize, seed: u64) -> Vec<BinStr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut g = Graph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<bool>() {
                        g.add_edge(u, v);
                    }
                }
            }
            g.encode()
        })
        .collect()
}

/// The literal brute force for a problem: permutation scan for HAM-PATH,
/// the problem's own decider otherwise.
pub fn brute_force(scheme: &CompilationScheme) -> impl Fn(&BinStr) -> Result<bool> + '_ {
    let literal = scheme.problem.id() == "hampath";
    move |x: &BinStr| {
        if literal {
            ham_path_by_permutations(&Graph::decode(x)?, &mut Meter::unlimited())
        } else {
            scheme.problem.decide(x)
        }
    }
}

fn median_round<F: FnMut(&BinStr) -> Result<bool>>(queries: &[BinStr], mut f: F) -> Result<u64> {
    for _ in 0..WARMUPS {
        for q in queries {
            black_box(f(q)?);
        }
    }
    let mut rounds = Vec::with_capacity(ROUNDS);
    for _ in 0..ROUNDS {
        let t = Instant::now();
        for q in queries {
            black_box(f(black_box(q))?);
        }
        rounds.push(t.elapsed().as_nanos() as u64);
    }
    rounds.sort_unstable();
    Ok(rounds[ROUNDS / 2] / queries.len() as u64)
}

/// Times brute force against compiled answers on the same queries, after
/// checking that both agree on every query.
pub fn differential_speed(
    scheme: &CompilationScheme,
    artifact: &CompiledArtifact,
    queries: &[BinStr],
) -> Result<TimingReport> {
    if queries.len() < MIN_QUERIES {
        return Err(Error::InvalidQuerySet(format!(
            "{} queries, at least {MIN_QUERIES} needed",
            queries.len()
        )));
    }
    for q in queries {
        let k = scheme.param().apply(q)?;
        if k != artifact.param_value {
            return Err(Error::ParamMismatch {
                expected: artifact.param_value.to_string(),
                got: k.to_string(),
            });
        }
    }
    let base = brute_force(scheme);
    for q in queries {
        let (want, got) = (base(q)?, query_compiled(artifact, scheme, q)?);
        if want != got {
            return Err(Error::InvalidQuerySet(format!(
                "compiled answer {got} disagrees with brute force {want} on {q}"
            )));
        }
    }
    let baseline_ns = median_round(queries, &base)?;
    let compiled_ns = median_round(queries, |q| query_compiled(artifact, scheme, q))?;
    Ok(TimingReport {
        scheme: scheme.id.clone(),
        queries: queries.len(),
        baseline_ns,
        compiled_ns,
        compile_ms: None,
        speedup: baseline_ns as f64 / compiled_ns.max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::encode_unary;
    use crate::schemes::{compile_chop_table, scheme_by_id, ChopMode};

    #[test]
    fn graphs_are_reproducible() {
        let a = random_graphs(6, 5, SEED);
        assert_eq!(a, random_graphs(6, 5, SEED));
        assert_ne!(a, random_graphs(6, 5, SEED + 1));
        assert!(a.iter().all(|g| Graph::decode(g).unwrap().n == 6));
    }

    #[test]
    fn query_set_checks() {
        let w = scheme_by_id("hampath.gamma.identity").unwrap();
        let qs = random_graphs(5, 40, SEED);
        let a = compile_chop_table(&w, &encode_unary(5), ChopMode::Sparse(qs.clone())).unwrap();
        assert!(matches!(
            differential_speed(&w, &a, &qs[..10]),
            Err(Error::InvalidQuerySet(_))
        ));
        let mut mixed = qs.clone();
        mixed.push(random_graphs(4, 1, SEED).remove(0));
        assert!(matches!(
            differential_speed(&w, &a, &mixed),
            Err(Error::ParamMismatch { .. })
        ));
        let rep = differential_speed(&w, &a, &qs).unwrap();
        assert_eq!(rep.queries, 40);
        assert!(rep.speedup > 0.0);
    }
}
