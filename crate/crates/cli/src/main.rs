//! `permax`: exact permanents, closed-form maxima, extremal families and
//! verification suites for (0,1)-matrices.
//!
//! Exit status: 0 ok, 1 domain error, 2 usage error, 3 verification
//! mismatch.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use permax_core::families::{build_family, FamilyId, FamilySpec};
use permax_core::formulas::{mu_balanced, mu_dispatch, mu_mid, mu_sparse, Coverage, MuValue};
use permax_core::{
    bregman_bound, canonical_form, is_equivalent, is_equivalent_with_transpose, permanent_ryser,
    search, verify_suite, window_table, BinMatrix, Engine, Error, SearchOptions, Suite,
    VerifyLimits,
};

const BUDGET_ENV: &str = "PERMAX_BUDGET";

#[derive(Parser)]
#[command(
    name = "permax",
    version,
    about = "Exact permanents and maximum-permanent (0,1)-matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    #[value(name = "11")]
    Sparse,
    #[value(name = "15")]
    Balanced,
    #[value(name = "16")]
    Mid,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Naive,
    Bnb,
    Hillclimb,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Table1,
    Thm11,
    Thm15,
    Thm16,
    Reg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact permanent of a matrix read from a file or `-` for stdin.
    Per {
        input: String,
        /// Also print the Brègman upper bound (natural log and value).
        #[arg(long)]
        bound: bool,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form maximum permanent for order n with tau zeros.
    Mu {
        n: usize,
        tau: usize,
        #[arg(long, value_enum, default_value = "auto")]
        theorem: TheoremArg,
        /// Block size for the balanced-blocks form (default: smallest valid).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Build a named extremal family member.
    Build {
        family: String,
        n: usize,
        sigma: usize,
        /// Zero to flip for the * families, as `row,col` (zero-based).
        #[arg(long, value_parser = parse_pair)]
        flip: Option<(usize, usize)>,
        /// Block size for K.
        #[arg(long)]
        k: Option<usize>,
        /// Emit the matrix as constructed instead of its canonical form.
        #[arg(long)]
        raw: bool,
        /// Write the JSON sidecar to this path.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Print the sidecar (with the matrix) as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Maximize the permanent over order n with tau zeros.
    Search {
        n: usize,
        tau: usize,
        #[arg(long, value_enum, default_value = "bnb")]
        engine: EngineArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Collect one canonical maximizer per equivalence class.
        #[arg(long)]
        maximizers: bool,
        /// Node cap (restarts for hillclimb); overrides PERMAX_BUDGET.
        #[arg(long)]
        budget: Option<u64>,
        /// Disable bound pruning (bnb only).
        #[arg(long)]
        no_prune: bool,
        /// Include node counts and timing, which vary between runs.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        nmax: Option<usize>,
        /// Hillclimb restarts for the table suite.
        #[arg(long, default_value_t = 1000)]
        restarts: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
    },
    /// Mid-density window table for order n.
    Table {
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical form under row and column permutations.
    Canon { input: String },
    /// Whether two matrices are equal up to row and column permutations.
    Equiv {
        a: String,
        b: String,
        /// Also allow transposition.
        #[arg(long)]
        with_transpose: bool,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected row,col")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x}: {e}"));
    Ok((p(a)?, p(b)?))
}

enum Failure {
    Domain(String),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read_matrix(input: &str) -> Result<BinMatrix, Failure> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(input).map_err(|e| Failure::Domain(format!("{input}: {e}")))?
    };
    Ok(BinMatrix::parse(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Domain(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn env_budget() -> Result<Option<u64>, Failure> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Failure::Domain(format!(
                "{BUDGET_ENV} must be a nonnegative integer, got '{v}'"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn mu_text(v: &MuValue) -> String {
    let mut s = format!(
        "{}\ntheorem: {}\nsigma: {}\n",
        v.integer(),
        v.theorem,
        v.sigma
    );
    if let Some(c) = &v.case {
        s += &format!(
            "case: sigma-2n = {} (mod 3), 3n-sigma {}, k = {}\n",
            c.residue,
            if c.parity_even { "even" } else { "odd" },
            c.k_coeff
        );
    }
    if let Some(d) = &v.derivation {
        s += &format!(
            "blocks: k = {}, x = {}, y = {}, {} x J_{} + {} x J_{}\n",
            d.k_block,
            d.x,
            d.y,
            d.big_blocks,
            d.k_block + 1,
            d.small_blocks,
            d.k_block
        );
    }
    if let Some(e) = v.e {
        s += &format!("e: {e}\n");
    }
    for w in &v.warnings {
        s += &format!("warning: {w}\n");
    }
    s
}

fn cmd_per(input: &str, bound: bool, as_json: bool) -> Outcome {
    let m = read_matrix(input)?;
    let per = permanent_ryser(&m)?;
    let b = bregman_bound(&m);
    if as_json {
        let mut v = json!({ "n": m.order(), "sigma": m.ones_count(), "per": per.to_string() });
        if bound {
            v["bregman_log_bound"] = json!(b.log_value);
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{per}");
        if bound {
            println!(
                "bregman log-bound: {:.6} (bound {:.6})",
                b.log_value,
                b.value_f64()
            );
        }
    }
    Ok(())
}

fn cmd_mu(n: usize, tau: usize, theorem: TheoremArg, k: Option<usize>, as_json: bool) -> Outcome {
    let value = match theorem {
        TheoremArg::Sparse => Coverage::Covered(mu_sparse(n, tau)?),
        TheoremArg::Mid => Coverage::Covered(mu_mid(n, tau)?),
        TheoremArg::Balanced => {
            let sigma = (n * n)
                .checked_sub(tau)
                .ok_or_else(|| Failure::Domain(format!("tau={tau} exceeds n^2")))?;
            let k = match k {
                Some(k) => k,
                None => permax_core::formulas::balanced_block_size(n, sigma).ok_or_else(|| {
                    Failure::Domain(format!(
                        "no block size k satisfies both congruences at n={n}, sigma={sigma}"
                    ))
                })?,
            };
            Coverage::Covered(mu_balanced(n, tau, k)?)
        }
        TheoremArg::Auto => mu_dispatch(n, tau)?,
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        return Ok(());
    }
    match value {
        Coverage::Covered(v) => print!("{}", mu_text(&v)),
        Coverage::NotCovered { reason, .. } => println!("not covered: {reason}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_build(
    family: &str,
    n: usize,
    sigma: usize,
    flip: Option<(usize, usize)>,
    k: Option<usize>,
    raw: bool,
    sidecar: Option<&Path>,
    as_json: bool,
) -> Outcome {
    let id: FamilyId = family.parse()?;
    let mut spec = FamilySpec::new(id, n, sigma);
    spec.flip = flip;
    spec.k_block = k;
    let built = build_family(&spec)?;
    let shown = if raw || n > permax_core::canon::CANON_MAX_ORDER {
        built.clone()
    } else {
        canonical_form(&built)?
    };
    let per = permanent_ryser(&built)?;
    let tau = n * n - sigma;
    let mu = match mu_dispatch(n, tau)? {
        Coverage::Covered(v) => {
            json!({ "value": v.integer().to_string(), "theorem": v.theorem.tag() })
        }
        Coverage::NotCovered { .. } => serde_json::Value::Null,
    };
    let window = if id.is_regular() {
        json!({ "kind": "regular", "degree": id.regular_degree(n) })
    } else if FamilyId::SPARSE.contains(&id) {
        json!({ "kind": "sparse", "sigma_min": n, "sigma_max": 2 * n })
    } else if id == FamilyId::K {
        json!({ "kind": "balanced" })
    } else {
        json!({ "kind": "mid", "sigma_min": 2 * n + 1, "sigma_max": 3 * n })
    };
    let mut side = json!({
        "family": id.name(),
        "n": n,
        "sigma": sigma,
        "per": per.to_string(),
        "mu": mu,
        "valid_window": window,
    });
    if let Some(f) = flip {
        side["flip"] = json!([f.0, f.1]);
    }
    if let Some(p) = sidecar {
        let text = serde_json::to_string_pretty(&side).expect("json") + "\n";
        fs::write(p, text).map_err(|e| Failure::Domain(format!("{}: {e}", p.display())))?;
    }
    if as_json {
        side["matrix"] = json!(shown.to_text().lines().collect::<Vec<_>>());
        println!("{}", serde_json::to_string_pretty(&side).expect("json"));
    } else {
        print!("{}", shown.to_text());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    n: usize,
    tau: usize,
    engine: EngineArg,
    seed: u64,
    shards: usize,
    maximizers: bool,
    budget: Option<u64>,
    no_prune: bool,
    stats: bool,
    as_json: bool,
) -> Outcome {
    let mut opts = SearchOptions::engine(match engine {
        EngineArg::Naive => Engine::Naive,
        EngineArg::Bnb => Engine::Bnb,
        EngineArg::Hillclimb => Engine::Hillclimb,
    })
    .with_seed(seed)
    .with_shards(shards);
    opts.collect_maximizers = maximizers;
    opts.prune = !no_prune;
    opts.budget = match budget {
        Some(b) => Some(b),
        None => env_budget()?,
    };
    let r = search(n, tau, &opts)?;
    if as_json {
        let mut v = serde_json::to_value(&r).expect("json");
        if !stats {
            let obj = v.as_object_mut().expect("object");
            obj.remove("nodes_explored");
            obj.remove("wall_stats");
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        return Ok(());
    }
    let mut out = format!(
        "max_per: {}\nexact: {}\nengine: {}\n",
        r.max_per, r.is_exact, r.engine
    );
    if let Some(c) = r.class_count {
        out += &format!("classes: {c}\n");
    }
    if stats {
        out += &format!(
            "nodes: {}\nelapsed_ms: {:.3}\nshards: {}\n",
            r.nodes_explored, r.wall_stats.elapsed_ms, r.wall_stats.shards
        );
    }
    for m in &r.maximizer_classes {
        out.push('\n');
        out += &m.to_text();
    }
    emit(None, &out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: SuiteArg,
    nmax: Option<usize>,
    restarts: u64,
    seed: u64,
    shards: usize,
    format: Format,
    out: Option<&Path>,
    stats: bool,
) -> Outcome {
    let suite = match suite {
        SuiteArg::Table1 => Suite::Table,
        SuiteArg::Thm11 => Suite::Sparse,
        SuiteArg::Thm15 => Suite::Balanced,
        SuiteArg::Thm16 => Suite::Mid,
        SuiteArg::Reg => Suite::Regular,
    };
    let limits = VerifyLimits {
        nmax,
        restarts,
        seed,
        shards,
        budget: env_budget()?,
        timing: stats,
        ..Default::default()
    };
    let report = verify_suite(suite, &limits)?;
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    emit(out, &text)?;
    if report.has_mismatch() {
        Err(Failure::Mismatch)
    } else {
        Ok(())
    }
}

fn cmd_table(n: usize, format: Format, out: Option<&Path>) -> Outcome {
    let t = window_table(n)?;
    let text = match format {
        Format::Text => t.to_text(),
        Format::Json => t.to_json() + "\n",
        Format::Csv => t.to_csv(),
    };
    emit(out, &text)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Per { input, bound, json } => cmd_per(&input, bound, json),
        Command::Mu {
            n,
            tau,
            theorem,
            k,
            json,
        } => cmd_mu(n, tau, theorem, k, json),
        Command::Build {
            family,
            n,
            sigma,
            flip,
            k,
            raw,
            sidecar,
            json,
        } => cmd_build(&family, n, sigma, flip, k, raw, sidecar.as_deref(), json),
        Command::Search {
            n,
            tau,
            engine,
            seed,
            shards,
            maximizers,
            budget,
            no_prune,
            stats,
            json,
        } => cmd_search(
            n, tau, engine, seed, shards, maximizers, budget, no_prune, stats, json,
        ),
        Command::Verify {
            suite,
            nmax,
            restarts,
            seed,
            shards,
            format,
            out,
            stats,
        } => cmd_verify(
            suite,
            nmax,
            restarts,
            seed,
            shards,
            format,
            out.as_deref(),
            stats,
        ),
        Command::Table { n, format, out } => cmd_table(n, format, out.as_deref()),
        Command::Canon { input } => {
            let m = read_matrix(&input)?;
            emit(None, &canonical_form(&m)?.to_text())
        }
        Command::Equiv {
            a,
            b,
            with_transpose,
        } => {
            let (a, b) = (read_matrix(&a)?, read_matrix(&b)?);
            let eq = if with_transpose {
                is_equivalent_with_transpose(&a, &b)?
            } else {
                is_equivalent(&a, &b)?
            };
            println!("{eq}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch) => {
            eprintln!("verification mismatch");
            ExitCode::from(3)
        }
    }
}
