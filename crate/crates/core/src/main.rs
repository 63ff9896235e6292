use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use shotgun::canon::{ball_codes, read_ball_file, write_ball_codes, write_ball_collection, BallFileError};
use shotgun::graph::{extract_ball, sample_gnp, GnpParams, Graph, GraphError};
use shotgun::harness::{
    run_sweep, summarize, write_csv, write_summary, Mode, PSpec, SweepConfig, Threshold,
};
use shotgun::reconstruct::{reconstruct, Algorithm, BallCollection, Reconstruction};
use shotgun::witness::{
    find_witness, verify_witness, FinderKind, FinderOptions, SwapWitness, VerifyOptions, DEFAULT_BUDGET,
};

const FORMATS: &str = "\
File formats:
  edge list     first line `n m`, then m lines `u v` with 0 <= u < v < n.
  ball file     first line `codes n r` or `full n r`.
                codes: n lines `v r hex`, the canonical code of the r-ball at v.
                full:  per vertex a line `ball v r k m`, then m lines `a b` of
                       local indices; local 0 is the root, locals are ordered
                       by distance from it.
                Lines starting with # and blank lines are ignored.
  witness       TOML with finder, radius, removed, added, actors and a
                [certificate] table (kind, g, g_prime).
  sweep config  TOML with n_values, r, trials, master_seed, a [p] table
                (kind = explicit | exponent | multiplier, values, and for
                multiplier a threshold `function`) and a [mode] table
                (kind = reconstruct with algorithm, or witness with finder).
                Optional: budget, exact_cap, trial_timeout_secs, workers.
  sweep CSV     n,p,r,trial,seed,mode,outcome,max_component,unique_rm1_balls,
                path_pair_count,good_edge_count,elapsed_ms

Exit codes:
  0 success, 1 I/O failure, 2 bad flags or unparsable input,
  3 NOT_APPLICABLE or no witness, 4 INCONSISTENT, 5 witness failed verification.";

#[derive(Parser)]
#[command(name = "shotgun", version, about = "Reconstruct random graphs from their r-balls", after_long_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BallMode {
    Codes,
    Full,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample G(n, p) and write it as an edge list.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the r-balls of every vertex of a graph.
    Balls {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value = "full")]
        mode: BallMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a graph from a full ball file. Prints the outcome tag, then the edge list.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        /// assemble, overlap, two-ball, two-ball-full or hybrid.
        #[arg(long)]
        algo: String,
        /// Edge probability used by hybrid to split degrees.
        #[arg(long)]
        p_hint: Option<f64>,
        /// Also write the edge list here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a graph for a ball-preserving swap that changes the isomorphism class.
    Witness {
        #[arg(long = "in")]
        input: PathBuf,
        /// path-pair, r1, r2 or r3.
        #[arg(long)]
        finder: FinderKind,
        /// Radius for path-pair; the other finders have fixed radius.
        #[arg(long)]
        r: Option<usize>,
        /// Candidate sampler seed; required by r1 and r2.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Edge probability for the degree windows; estimated when absent.
        #[arg(long)]
        p: Option<f64>,
        /// Representatives kept per H_uv class by r3.
        #[arg(long, default_value_t = 8)]
        bucket_size: usize,
        /// Run an exact isomorphism test too when n is at most this.
        #[arg(long, default_value_t = 0)]
        exact_cap: usize,
        /// Witness TOML output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded sweep and write per-trial CSV.
    Sweep {
        /// TOML config; the grid flags below are ignored when given.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated vertex counts.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        /// Comma-separated literal probabilities.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["p_exponent", "p_multiplier"])]
        p: Vec<f64>,
        /// Comma-separated exponents a, with p = n^-a.
        #[arg(long, value_delimiter = ',', conflicts_with = "p_multiplier")]
        p_exponent: Vec<f64>,
        /// Comma-separated multipliers c, with p = c f(n, r).
        #[arg(long, value_delimiter = ',', requires = "threshold")]
        p_multiplier: Vec<f64>,
        /// first-transition, log-over-rn, sqrt-log-over-25n, three-quarter or log-squared.
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Master seed of the sweep.
        #[arg(long)]
        seed: Option<u64>,
        /// reconstruct:<algorithm> or witness:<finder>.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        exact_cap: usize,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Worker threads; overrides the config.
        #[arg(long)]
        workers: Option<usize>,
        /// CSV output; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-cell summary CSV with Wilson intervals.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Write NA in the elapsed_ms column.
        #[arg(long)]
        no_elapsed: bool,
    },
    /// Check a witness against a graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value_t = 0)]
        exact_cap: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

fn io_fail(path: &Path, e: io::Error) -> Failure {
    Failure { code: 1, msg: format!("{}: {e}", path.display()) }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| io_fail(path, e))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    Graph::read_edge_list(open(path)?).map_err(|e| match e {
        GraphError::Io(e) => io_fail(path, e),
        e => usage(format!("{}: {e}", path.display())),
    })
}

/// Runs `f` on a buffered writer for `path`, or on standard output.
fn write_to<F>(path: Option<&Path>, f: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_fail(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| io_fail(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w).and_then(|_| w.flush()).map_err(|e| io_fail(Path::new("<stdout>"), e))
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Gen { n, p, seed, out } => {
            let params = GnpParams::new(n, p, seed).map_err(|e| usage(e.to_string()))?;
            let g = sample_gnp(params);
            write_to(out.as_deref(), |w| g.write_edge_list(w))?;
            Ok(0)
        }
        Cmd::Balls { input, r, mode, out } => {
            let g = read_graph(&input)?;
            write_to(out.as_deref(), |w| match mode {
                BallMode::Codes => write_ball_codes(w, r, &ball_codes(&g, r)),
                BallMode::Full => {
                    let balls: Vec<_> =
                        (0..g.n()).map(|v| extract_ball(&g, v, r).expect("vertex in range")).collect();
                    write_ball_collection(w, r, &balls)
                }
            })?;
            Ok(0)
        }
        Cmd::Reconstruct { input, algo, p_hint, out } => {
            let mut alg: Algorithm = algo.parse().map_err(usage)?;
            if let Algorithm::Hybrid { .. } = alg {
                alg = Algorithm::Hybrid { p_hint };
            }
            let file = read_ball_file(open(&input)?).map_err(|e| match e {
                BallFileError::Io(e) => io_fail(&input, e),
                e => usage(format!("{}: {e}", input.display())),
            })?;
            let bc = BallCollection::from_ball_file(file).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let res = reconstruct(&bc, alg);
            let code = match &res {
                Reconstruction::Exact(_) | Reconstruction::Isomorphic(_) => 0,
                Reconstruction::NotApplicable(_) => 3,
                Reconstruction::Inconsistent(_) => 4,
            };
            write_to(None, |w| {
                writeln!(w, "{}", res.tag())?;
                match (&res, res.graph()) {
                    (_, Some(g)) => g.write_edge_list(w),
                    (r, None) => writeln!(w, "# {}", r.reason().unwrap_or_default()),
                }
            })?;
            if let (Some(path), Some(g)) = (out.as_deref(), res.graph()) {
                write_to(Some(path), |w| g.write_edge_list(w))?;
            }
            Ok(code)
        }
        Cmd::Witness { input, finder, r, seed, budget, p, bucket_size, exact_cap, out } => {
            let r = match (finder, r) {
                (FinderKind::PathPair, Some(r)) if r >= 1 => r,
                (FinderKind::PathPair, _) => return Err(usage("--finder path-pair needs --r of at least 1")),
                (FinderKind::R1, _) => 1,
                (FinderKind::R2, _) => 2,
                (FinderKind::R3, _) => 3,
            };
            let seed = match (finder, seed) {
                (FinderKind::R1 | FinderKind::R2, None) => {
                    return Err(usage(format!("--finder {finder} samples candidates and needs --seed")))
                }
                (_, s) => s.unwrap_or(0),
            };
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return Err(usage(format!("--p {p} outside [0, 1]")));
                }
            }
            let g = read_graph(&input)?;
            let opts = FinderOptions { budget, seed, p, bucket_size };
            let res = find_witness(&g, finder, r, &opts);
            let Some(w) = res.witness else {
                write_to(None, |out| {
                    writeln!(out, "NONE")?;
                    writeln!(out, "# candidates {} rejected {}", res.stats.candidates, res.stats.rejected)
                })?;
                return Ok(3);
            };
            let report = verify_witness(&g, &w, VerifyOptions { exact_cap });
            let valid = report.is_valid();
            write_to(None, |out| {
                writeln!(out, "{}", if valid { "WITNESS_FOUND" } else { "WITNESS_INVALID" })?;
                writeln!(out, "{report}")
            })?;
            if let Some(path) = out.as_deref() {
                write_to(Some(path), |out| out.write_all(w.to_toml().as_bytes()))?;
            }
            Ok(if valid { 0 } else { 5 })
        }
        Cmd::Sweep {
            config,
            n,
            p,
            p_exponent,
            p_multiplier,
            threshold,
            r,
            trials,
            seed,
            mode,
            budget,
            exact_cap,
            timeout,
            workers,
            out,
            summary,
            no_elapsed,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| io_fail(&path, e))?;
                    SweepConfig::from_toml(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                None => {
                    let missing = |flag: &str| usage(format!("sweep needs --config or --{flag}"));
                    let pspec = if !p.is_empty() {
                        PSpec::Explicit { values: p }
                    } else if !p_exponent.is_empty() {
                        PSpec::Exponent { values: p_exponent }
                    } else if !p_multiplier.is_empty() {
                        let t = threshold.ok_or_else(|| missing("threshold"))?;
                        let function: Threshold = toml::Value::String(t.clone())
                            .try_into()
                            .map_err(|_| usage(format!("unknown threshold {t:?}")))?;
                        PSpec::Multiplier { function, values: p_multiplier }
                    } else {
                        return Err(missing("p, --p-exponent or --p-multiplier"));
                    };
                    SweepConfig {
                        n_values: n,
                        p: pspec,
                        r: r.ok_or_else(|| missing("r"))?,
                        trials: trials.ok_or_else(|| missing("trials"))?,
                        master_seed: seed.ok_or_else(|| missing("seed"))?,
                        mode: mode.ok_or_else(|| missing("mode"))?,
                        budget,
                        exact_cap,
                        trial_timeout_secs: timeout,
                        workers: None,
                    }
                }
            };
            if workers.is_some() {
                cfg.workers = workers;
            }
            let records = run_sweep(&cfg).map_err(|e| usage(e.to_string()))?;
            write_to(out.as_deref(), |w| write_csv(w, &records, !no_elapsed))?;
            if let Some(path) = summary.as_deref() {
                write_to(Some(path), |w| write_summary(w, &summarize(&records)))?;
            }
            Ok(0)
        }
        Cmd::Verify { graph, witness, exact_cap } => {
            let g = read_graph(&graph)?;
            let text = std::fs::read_to_string(&witness).map_err(|e| io_fail(&witness, e))?;
            let w = SwapWitness::from_toml(&text).map_err(|e| usage(format!("{}: {e}", witness.display())))?;
            let report = verify_witness(&g, &w, VerifyOptions { exact_cap });
            let valid = report.is_valid();
            write_to(None, |out| {
                writeln!(out, "{}", if valid { "VALID" } else { "INVALID" })?;
                writeln!(out, "{report}")
            })?;
            Ok(if valid { 0 } else { 5 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("shotgun: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
