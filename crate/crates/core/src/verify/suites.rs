//! Named groups of checks, each at two budget levels.

use std::str::FromStr;

use super::{
    mutation_sweep_reduction, mutation_sweep_scheme, mutation_sweep_with, run_checks,
    scan_kernel, verify_agreement, verify_artifact, verify_reduction, verify_reduction_on, verify_scheme,
    verify_scheme_on, flip_output, Failure, KernelScan, RunOptions, VerificationReport, Verdict,
};
use crate::base::{decode_pair, encode_unary, BinStr, PolyNat};
use crate::error::{Error, Result};
use crate::mixed::{
    chopped_to_mixed, ci_identity_witness, eps_parity_reduction, hardness_from_epsilon,
    mixed_reduction_to_polycomp, mixed_to_chopped, pair_grid, slices_to_mu_reduction,
    toy_parity_pairs, toy_witness, PairLanguage,
};
use crate::problems::{all_strings, Budget, Language, PairKind, Parity, ThreeSat};
use crate::reductions::{
    compose_reductions, from_len_characterization, pull_witness, reduction_by_id,
    to_len_characterization, PolyCompReduction, REDUCTION_IDS,
};
use crate::schemes::{
    chopped_to_advice, compile_chop_table, compile_normalized, extract_para_witness, scheme_by_id,
    ChopMode, SCHEME_IDS,
};

pub const SUITES: &[&str] = &["reductions", "compositions", "schemes", "kernels", "mixed", "mutations", "all"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BudgetLevel {
    Small,
    Medium,
}

impl FromStr for BudgetLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" | "1" => Ok(BudgetLevel::Small),
            "medium" | "2" => Ok(BudgetLevel::Medium),
            _ => Err(Error::UnknownId {
                kind: "budget",
                id: s.to_string(),
            }),
        }
    }
}

impl BudgetLevel {
    fn pick<T>(self, small: T, medium: T) -> T {
        match self {
            BudgetLevel::Small => small,
            BudgetLevel::Medium => medium,
        }
    }

    fn sat(self) -> Budget {
        self.pick(Budget::upto(2).with_clauses(3), Budget::upto(2))
    }

    fn graphs(self) -> Budget {
        Budget::upto(self.pick(5, 6))
    }

    fn circuits(self) -> Budget {
        Budget::upto(self.pick(4, 5))
    }

    fn strings(self) -> usize {
        self.pick(8, 12)
    }
}

/// Enumeration budget for the source of a built-in reduction.
pub fn reduction_budget(id: &str, level: BudgetLevel) -> Budget {
    match id {
        "hampath.gamma-len" | "hampath.len-gamma" => level.graphs(),
        "circuit.munu-len" | "circuit.len-munu" => level.circuits(),
        "hs.2-to-3" | "hs.2-to-4" => Budget::upto(level.pick(4, 5)).with_k(3),
        "hs.3-to-4" => Budget::upto(level.pick(3, 5)).with_k(3),
        _ => level.sat(),
    }
}

/// Pairs of built-in reductions that compose end to end.
pub const CHAINS: &[(&str, &str)] = &[
    ("hampath.gamma-len", "hampath.len-gamma"),
    ("3sat.nu-len", "3sat.len-nu"),
    ("3sat.nu-len", "3sat.len-len.lifted"),
    ("3sat.len-nu", "3sat.nu-to-2hs"),
    ("circuit.munu-len", "circuit.len-munu"),
    ("hs.2-to-3", "hs.3-to-4"),
];

pub fn composed(a: &str, b: &str) -> Result<PolyCompReduction> {
    compose_reductions(&reduction_by_id(a)?, &reduction_by_id(b)?)
}

fn reductions(level: BudgetLevel) -> Result<Vec<VerificationReport>> {
    REDUCTION_IDS
        .iter()
        .map(|id| Ok(verify_reduction(&reduction_by_id(id)?, &reduction_budget(id, level))))
        .collect()
}

fn compositions(level: BudgetLevel) -> Result<Vec<VerificationReport>> {
    CHAINS
        .iter()
        .map(|(a, b)| Ok(verify_reduction(&composed(a, b)?, &reduction_budget(a, level))))
        .collect()
}

/// Enumeration budget for the problem of a registered scheme.
pub fn scheme_budget(id: &str, level: BudgetLevel) -> Budget {
    match id {
        "parity.len.identity" | "parity.len.normalized" => Budget::upto(level.strings()),
        "hampath.gamma.identity" => level.graphs(),
        "circuit.munu.identity" => level.circuits(),
        "2hs.pi2.kernel" => Budget::upto(level.pick(4, 6)).with_k(level.pick(3, 4)),
        "3hs.pi2.kernel" => Budget::upto(level.pick(3, 4)).with_k(3),
        _ => level.sat(),
    }
}

fn schemes(level: BudgetLevel) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for id in SCHEME_IDS.iter().filter(|id| !id.contains("kernel")) {
        out.push(verify_scheme(&scheme_by_id(id)?, &scheme_budget(id, level)));
    }

    let parity = scheme_by_id("parity.len.identity")?;
    let n = level.pick(6, 10);
    let a = compile_chop_table(&parity, &encode_unary(n), ChopMode::Literal)?;
    out.push(verify_artifact(&a, &parity, &format!("len {n}"), all_strings(n, n)));

    let normalized = scheme_by_id("parity.len.normalized")?;
    let a = compile_normalized(&normalized, &encode_unary(n))?;
    out.push(verify_artifact(&a, &normalized, &format!("len {n}"), all_strings(n, n)));

    let ham = scheme_by_id("hampath.gamma.identity")?;
    let nodes = level.pick(5, 6);
    let graphs: Vec<BinStr> = ham.problem.enumerate(&Budget::exactly(nodes))?.collect();
    let a = compile_chop_table(&ham, &encode_unary(nodes), ChopMode::Sparse(graphs.clone()))?;
    out.push(verify_artifact(&a, &ham, &format!("{nodes} nodes"), graphs));

    let sat = scheme_by_id("3sat.nu.dedup")?;
    let b = Budget::exactly(level.pick(1, 2)).with_clauses(level.pick(3, 4));
    let formulas: Vec<BinStr> = ThreeSat.enumerate(&b)?.collect();
    let a = compile_chop_table(&sat, &encode_unary(b.max_size), ChopMode::Sparse(formulas.clone()))?;
    out.push(verify_artifact(&a, &sat, &b.to_string(), formulas));

    let advice = chopped_to_advice(&parity)?;
    out.push(verify_agreement(
        "parity.len.identity advice",
        &format!("len<={}", level.strings()),
        all_strings(0, level.strings()),
        |x| Parity.decide(x),
        |x| advice.decide(x),
    ));

    let para = extract_para_witness(&sat);
    let sat_budget = level.sat();
    out.push(verify_agreement(
        "3sat.nu.dedup para witness",
        &sat_budget.to_string(),
        ThreeSat.enumerate(&sat_budget)?,
        |x| ThreeSat.decide(x),
        |x| para.decide(x),
    ));

    let pulled = pull_witness(&reduction_by_id("3sat.len-nu")?, &sat)?;
    out.push(verify_scheme(&pulled, &sat_budget));

    let to_len = to_len_characterization(&ham)?;
    out.push(verify_reduction(&to_len, &level.graphs()));
    out.push(verify_scheme(&from_len_characterization(&to_len)?, &level.graphs()));
    Ok(out)
}

fn kernels(level: BudgetLevel) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for id in ["2hs.pi2.kernel", "3hs.pi2.kernel"] {
        out.push(verify_scheme(&scheme_by_id(id)?, &scheme_budget(id, level)));
    }
    out.push(scan_kernel(KernelScan {
        d: 2,
        max_n: level.pick(4, 6),
        max_k: level.pick(3, 4),
    }));
    out.push(scan_kernel(KernelScan {
        d: 3,
        max_n: level.pick(4, 5),
        max_k: 3,
    }));
    Ok(out)
}

/// `|(x, y)| ≤ p(|x|)` for every member among `instances`.
pub fn slice_report<I>(a: &PairLanguage, p: &PolyNat, budget: &str, instances: I) -> VerificationReport
where
    I: IntoIterator<Item = BinStr>,
{
    run_checks(&format!("{} slices", a.id()), budget, instances, RunOptions::default(), |xy| {
        let mut v = Verdict::default();
        if a.lang.member(xy)? {
            let (x, _) = decode_pair(xy)?;
            let cap = p.eval(x.len() as u64)?;
            v.slack(cap as i64 - xy.len() as i64);
            if xy.len() as u64 > cap {
                v.fail(Failure::new(xy, "slice", cap, xy.len()));
            }
        }
        Ok(v)
    })
}

fn mixed(level: BudgetLevel) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let g = level.pick(4, 6);
    let grid = format!("|x|,|y|<={g}");
    let toy = toy_parity_pairs();
    let toy_scheme = mixed_to_chopped(&toy, &toy_witness())?;
    out.push(verify_scheme_on(&toy_scheme, &grid, pair_grid(g, g), RunOptions::default()));

    let back = chopped_to_mixed(&toy, &toy_scheme)?;
    out.push(verify_agreement(
        &back.id,
        &grid,
        pair_grid(g, g),
        |xy| {
            let (x, y) = decode_pair(xy)?;
            toy.decide_pair(&x, &y)
        },
        |xy| {
            let (x, y) = decode_pair(xy)?;
            back.decide_pair(&x, &y)
        },
    ));

    let ci = PairLanguage::cdls(PairKind::Ci);
    let ci_budget = level.pick(Budget::upto(1), Budget::upto(2).with_clauses(2));
    let ci_scheme = mixed_to_chopped(&ci, &ci_identity_witness())?;
    out.push(verify_scheme(&ci_scheme, &ci_budget));
    out.push(verify_reduction(&slices_to_mu_reduction(&ci)?, &ci_budget));
    out.push(verify_reduction_on(
        &slices_to_mu_reduction(&toy)?,
        &grid,
        pair_grid(g, g),
        RunOptions::default(),
    ));

    let m = eps_parity_reduction();
    let eps_grid = format!("|x|<=2, |y|<={}", level.strings());
    out.push(verify_reduction_on(
        &mixed_reduction_to_polycomp(&m),
        &eps_grid,
        pair_grid(2, level.strings()),
        RunOptions::default(),
    ));
    out.push(verify_reduction_on(
        &hardness_from_epsilon(&m)?,
        &format!("len<={}", level.strings()),
        all_strings(0, level.strings()),
        RunOptions::default(),
    ));

    for kind in [PairKind::Ci, PairKind::Mmc, PairKind::Cmi] {
        let a = PairLanguage::cdls(kind);
        let p = a.slice_poly.clone().expect("shipped pair languages carry a slice bound");
        let xs = a.lang.enumerate(&ci_budget)?;
        out.push(slice_report(&a, &p, &ci_budget.to_string(), xs));
    }
    Ok(out)
}

/// Instances for mutation runs: small enough that four mutants per subject
/// stay cheap, large enough to contain yes- and no-instances.
fn mutation_instances(lang: &dyn Language, budget: &Budget) -> Result<Vec<BinStr>> {
    Ok(lang.enumerate(budget)?.collect())
}

fn mutations() -> Result<Vec<VerificationReport>> {
    let level = BudgetLevel::Small;
    let mut out = Vec::new();
    for id in REDUCTION_IDS {
        let r = reduction_by_id(id)?;
        let b = reduction_budget(id, level);
        let xs = mutation_instances(r.source.problem.as_ref(), &b)?;
        out.push(mutation_sweep_reduction(&r, &b.to_string(), &xs));
    }
    for id in SCHEME_IDS {
        let w = scheme_by_id(id)?;
        let b = scheme_budget(id, level);
        let xs = mutation_instances(w.problem.as_ref(), &b)?;
        out.push(mutation_sweep_scheme(&w, &b.to_string(), &xs));
    }
    let toy_scheme = mixed_to_chopped(&toy_parity_pairs(), &toy_witness())?;
    let grid: Vec<BinStr> = pair_grid(4, 4).collect();
    out.push(mutation_sweep_scheme(&toy_scheme, "|x|,|y|<=4", &grid));

    let m = eps_parity_reduction();
    let eps: Vec<BinStr> = pair_grid(2, 6).collect();
    out.push(mutation_sweep_with(&format!("mutants of {}", m.id), "|x|<=2, |y|<=6", |i| {
        let bad = m.map_g(format!("{}#flip{i}", m.id), flip_output(i));
        verify_reduction_on(
            &mixed_reduction_to_polycomp(&bad),
            "|x|<=2, |y|<=6",
            eps.iter().cloned(),
            RunOptions { stop_at_first: true },
        )
    }));
    Ok(out)
}

/// Runs one named suite; `all` runs every other suite in order.
pub fn run_suite(name: &str, level: BudgetLevel) -> Result<Vec<VerificationReport>> {
    match name {
        "reductions" => reductions(level),
        "compositions" => compositions(level),
        "schemes" => schemes(level),
        "kernels" => kernels(level),
        "mixed" => mixed(level),
        "mutations" => mutations(),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES.iter().filter(|s| **s != "all") {
                out.extend(run_suite(s, level)?);
            }
            Ok(out)
        }
        _ => Err(Error::UnknownId {
            kind: "suite",
            id: name.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_names() {
        assert_eq!("small".parse::<BudgetLevel>().unwrap(), BudgetLevel::Small);
        assert_eq!("2".parse::<BudgetLevel>().unwrap(), BudgetLevel::Medium);
        assert!("huge".parse::<BudgetLevel>().is_err());
        assert!(run_suite("nope", BudgetLevel::Small).is_err());
    }

    #[test]
    fn small_mixed_suite_passes() {
        for r in run_suite("mixed", BudgetLevel::Small).unwrap() {
            assert!(r.passed(), "{r}");
        }
    }
}
