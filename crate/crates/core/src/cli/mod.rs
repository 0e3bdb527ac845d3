//! Command-line surface: `compile`, `query`, `reduce`, `verify`, `bench`.
//!
//! Exit codes: 0 success or YES, 1 NO, 2 usage error, 3 malformed input,
//! 4 verification failure, 5 scale exceeded. Machine-readable output goes to
//! standard output, diagnostics to standard error.

pub mod artifact;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::base::{encode_unary, BinStr};
use crate::error::{Error, Result};
use crate::problems::text::{parse_instance, Format};
use crate::problems::{problem_by_id, Budget};
use crate::reductions::{contract_b_holds, reduction_by_id};
use crate::schemes::{
    compile_chop_table, compile_normalized, query_compiled, scheme_by_id, ChopMode, CompilationScheme,
    CompiledArtifact, SchemeKind,
};
use crate::verify::{differential_speed, random_graphs, run_suite, BudgetLevel, Status, SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_FAIL: i32 = 4;
pub const EXIT_SCALE: i32 = 5;

/// Environment variable capping the worker pool.
pub const THREADS_VAR: &str = "COMPILANCE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "compilance", version, about = "Compile once, query many.")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Literal,
    Sparse,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile one parameter value into an artifact file.
    Compile {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        scheme: String,
        /// Parameter value as a bit string.
        #[arg(long, conflicts_with = "param_of", required_unless_present = "param_of")]
        param: Option<String>,
        /// Instance file whose parameter is compiled.
        #[arg(long)]
        param_of: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "literal")]
        mode: Mode,
        /// Sparse universe: a directory of instance files, or a file of bit strings, one per line.
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer one instance from an artifact; prints YES or NO.
    Query {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        format: Option<String>,
    },
    /// Apply a registered reduction; the image is written as a bit string.
    Reduce {
        #[arg(long)]
        id: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<String>,
        /// Re-check both contracts on this instance against the oracles.
        #[arg(long)]
        check: bool,
    },
    /// Run a verification suite; exit 0 iff every report passes.
    Verify {
        #[arg(long)]
        suite: String,
        /// small (1) or medium (2).
        #[arg(long, default_value = "small")]
        budget: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time brute force against compiled lookups.
    Bench {
        #[arg(long)]
        artifact: PathBuf,
        /// Directory of query instance files.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        queries: Option<PathBuf>,
        /// Draw this many random graphs instead (HAM-PATH artifacts only).
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnknownId { .. } | Error::SchemePrecondition(..) | Error::IncompatibleEndpoints(_) => EXIT_USAGE,
        Error::ScaleExceeded(_)
        | Error::OracleTimeout
        | Error::Overflow
        | Error::DegreeCap(_)
        | Error::OutOfTable { .. } => EXIT_SCALE,
        Error::LengthAuditFailure(_) => EXIT_FAIL,
        _ => EXIT_MALFORMED,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok());
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli.cmd)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn format_arg(f: &Option<String>) -> Result<Option<Format>> {
    f.as_deref().map(str::parse).transpose()
}

fn read_instance(problem_id: &str, path: &Path, format: Option<Format>) -> Result<BinStr> {
    let text = fs::read_to_string(path)?;
    parse_instance(problem_id, &text, format)
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    match path {
        Some(p) => fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Compile {
            problem,
            scheme,
            param,
            param_of,
            mode,
            universe,
            format,
            out,
        } => {
            let w = scheme_by_id(&scheme)?;
            let lang = problem_by_id(&problem)?;
            if lang.id() != w.problem.id() {
                return Err(Error::SchemePrecondition(
                    w.id.clone(),
                    format!("scheme is for {}, not {}", w.problem.id(), lang.id()),
                ));
            }
            let format = format_arg(&format)?;
            let k = match (param, param_of) {
                (Some(k), _) => BinStr::parse(&k)?,
                (None, Some(path)) => w.param().apply(&read_instance(&problem, &path, format)?)?,
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let a = compile(&w, &k, mode, universe.as_deref(), format)?;
            artifact::save(&a, &out)?;
            eprintln!(
                "compiled {} at k = {} ({:?} payload)",
                w.id,
                k,
                a.payload.kind()
            );
            Ok(EXIT_OK)
        }
        Command::Query {
            artifact: path,
            instance,
            format,
        } => {
            let a = artifact::load(&path)?;
            let w = scheme_by_id(&a.scheme_id)?;
            let x = read_instance(&a.problem_id, &instance, format_arg(&format)?)?;
            if query_compiled(&a, &w, &x)? {
                println!("YES");
                Ok(EXIT_OK)
            } else {
                println!("NO");
                Ok(EXIT_NO)
            }
        }
        Command::Reduce {
            id,
            instance,
            out,
            format,
            check,
        } => {
            let r = reduction_by_id(&id)?;
            let x = read_instance(r.source.problem.id(), &instance, format_arg(&format)?)?;
            if !r.source.problem.validate(&x) {
                return Err(Error::malformed(format!("not a {} instance", r.source.problem.id())));
            }
            let y = r.image(&x)?;
            fs::write(&out, format!("{y}\n"))?;
            if !check {
                return Ok(EXIT_OK);
            }
            let k = r.source.param.apply(&x)?;
            let source = r.source.problem.decide(&x)?;
            let target = r.target.problem.member(&y)?;
            let in_s = contract_b_holds(&r, &r.s(&k)?, &y);
            let summary = serde_json::json!({
                "reduction": r.id,
                "source_member": source,
                "target_member": target,
                "contract_a": source == target,
                "contract_b": in_s,
            });
            write_json(&summary, None)?;
            if source != target || !in_s {
                eprintln!("contract violated on this instance");
                return Ok(EXIT_FAIL);
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite, budget, report } => {
            let level: BudgetLevel = budget.parse()?;
            let reports = run_suite(&suite, level)?;
            for r in &reports {
                eprintln!("{r}");
            }
            write_json(&reports, report.as_deref())?;
            let worst = reports.iter().map(|r| r.status).fold(Status::PASS, |acc, s| match (acc, s) {
                (Status::FAIL, _) | (_, Status::FAIL) => Status::FAIL,
                (Status::SCALE_EXCEEDED, _) | (_, Status::SCALE_EXCEEDED) => Status::SCALE_EXCEEDED,
                _ => Status::PASS,
            });
            Ok(match worst {
                Status::PASS => EXIT_OK,
                Status::FAIL => EXIT_FAIL,
                Status::SCALE_EXCEEDED => EXIT_SCALE,
            })
        }
        Command::Bench {
            artifact: path,
            queries,
            random,
            format,
            report,
        } => {
            let a = artifact::load(&path)?;
            let w = scheme_by_id(&a.scheme_id)?;
            let qs = match (queries, random) {
                (Some(dir), _) => {
                    let format = format_arg(&format)?;
                    instance_files(&dir)?
                        .iter()
                        .map(|p| read_instance(&a.problem_id, p, format))
                        .collect::<Result<Vec<_>>>()?
                }
                (None, Some(count)) => {
                    if a.problem_id != "hampath" {
                        return Err(Error::SchemePrecondition(
                            w.id.clone(),
                            "random queries are only drawn for hampath".into(),
                        ));
                    }
                    random_graphs(a.param_value.len(), count, SEED)
                }
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let t = differential_speed(&w, &a, &qs)?;
            eprintln!(
                "{}: brute force {} ns, compiled {} ns, speedup {:.1}x over {} queries",
                t.scheme, t.baseline_ns, t.compiled_ns, t.speedup, t.queries
            );
            write_json(&t, report.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

/// Regular files of a directory, sorted by name.
fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file());
    files.sort();
    Ok(files)
}

/// Default sparse universe: every enumerable instance carrying parameter `k`.
fn structural_universe(w: &CompilationScheme, k: &BinStr) -> Result<Vec<BinStr>> {
    let t = k.len();
    if !k.is_all_ones() {
        return Err(Error::malformed("structural universes need a unary parameter"));
    }
    let budget = match w.param().id() {
        "gamma" | "nu" | "munu" => Budget::exactly(t),
        "pi2" => Budget::upto(4).with_k(t),
        other => {
            return Err(Error::SchemePrecondition(
                w.id.clone(),
                format!("no structural universe for {other}; pass --universe"),
            ))
        }
    };
    let mut out = Vec::new();
    for x in w.problem.enumerate(&budget)? {
        if w.param().apply(&x)? == *k {
            out.push(x);
        }
    }
    Ok(out)
}

fn read_universe(w: &CompilationScheme, path: &Path, format: Option<Format>) -> Result<Vec<BinStr>> {
    if path.is_dir() {
        return instance_files(path)?
            .iter()
            .map(|p| read_instance(w.problem.id(), p, format))
            .collect();
    }
    fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(BinStr::parse)
        .collect()
}

fn compile(
    w: &CompilationScheme,
    k: &BinStr,
    mode: Mode,
    universe: Option<&Path>,
    format: Option<Format>,
) -> Result<CompiledArtifact> {
    if w.kind == SchemeKind::Normalized {
        return compile_normalized(w, k);
    }
    match mode {
        Mode::Literal => compile_chop_table(w, k, ChopMode::Literal),
        Mode::Sparse => {
            let xs = match universe {
                Some(p) => read_universe(w, p, format)?,
                None => structural_universe(w, k)?,
            };
            compile_chop_table(w, k, ChopMode::Sparse(xs))
        }
    }
}

/// `un(n)` as a bit string, for scripts building `--param` values.
pub fn unary_param(n: usize) -> String {
    encode_unary(n).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("compilance").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["frobnicate"]), EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--suite", "nope"]), EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--suite", "mixed", "--budget", "huge"]), EXIT_USAGE);
    }

    #[test]
    fn parity_compile_and_query() {
        let dir = tempfile::tempdir().unwrap();
        let art = dir.path().join("p.cplc");
        let inst = dir.path().join("x.txt");
        fs::write(&inst, "1011\n").unwrap();
        let art_s = art.to_str().unwrap();
        let inst_s = inst.to_str().unwrap();
        let code = run_args(&[
            "compile", "--problem", "parity", "--scheme", "parity.len.identity",
            "--param-of", inst_s, "--out", art_s,
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(run_args(&["query", "--artifact", art_s, "--instance", inst_s]), EXIT_OK);
        fs::write(&inst, "1001\n").unwrap();
        assert_eq!(run_args(&["query", "--artifact", art_s, "--instance", inst_s]), EXIT_NO);
        fs::write(&inst, "10010\n").unwrap();
        assert_eq!(run_args(&["query", "--artifact", art_s, "--instance", inst_s]), EXIT_MALFORMED);
    }

    #[test]
    fn literal_cap_is_a_scale_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("big.cplc");
        let k = unary_param(30);
        let code = run_args(&[
            "compile", "--problem", "parity", "--scheme", "parity.len.identity",
            "--param", &k, "--mode", "literal", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_SCALE);
        assert!(!out.exists());
    }
}
