//! Seeded Monte Carlo sweeps over `(n, p)` grids, per-trial CSV records and
//! per-cell summaries.

mod config;

pub use config::{ConfigError, Mode, PSpec, SweepConfig, Threshold};

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;

use crate::canon::balls_unique;
use crate::graph::{max_component_size, sample_gnp, Graph, GnpParams};
use crate::reconstruct::{reconstruct, Algorithm, BallCollection, Reconstruction};
use crate::witness::{
    count_path_components, find_witness, verify_witness, FinderOptions, SwapWitness, VerifyOptions,
};

pub const CSV_HEADER: &str =
    "n,p,r,trial,seed,mode,outcome,max_component,unique_rm1_balls,path_pair_count,good_edge_count,elapsed_ms";

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Exact,
    Isomorphic,
    NotApplicable,
    Inconsistent,
    WitnessFound,
    None,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [
        Outcome::Exact,
        Outcome::Isomorphic,
        Outcome::NotApplicable,
        Outcome::Inconsistent,
        Outcome::WitnessFound,
        Outcome::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Exact => "EXACT",
            Outcome::Isomorphic => "ISOMORPHIC",
            Outcome::NotApplicable => "NOT_APPLICABLE",
            Outcome::Inconsistent => "INCONSISTENT",
            Outcome::WitnessFound => "WITNESS_FOUND",
            Outcome::None => "NONE",
        }
    }

    /// Counted as a success in summaries.
    pub fn is_success(self) -> bool {
        matches!(self, Outcome::Exact | Outcome::Isomorphic | Outcome::WitnessFound)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub n: usize,
    pub p: f64,
    /// Position of `p` in the config's grid.
    pub p_index: usize,
    pub r: usize,
    pub trial: usize,
    pub seed: u64,
    pub mode: String,
    pub outcome: Outcome,
    /// Set when the trial overran its wall-clock budget; the outcome is then
    /// `Inconsistent`.
    pub timed_out: bool,
    /// Reason attached to `NotApplicable` and `Inconsistent` outcomes.
    pub detail: Option<String>,
    pub max_component: usize,
    /// Whether the `(r-1)`-balls are pairwise distinct; reconstruction with `r >= 2` only.
    pub unique_rm1_balls: Option<bool>,
    /// Components that are paths on `2r + 1` vertices.
    pub path_pair_count: Option<usize>,
    pub good_edge_count: Option<usize>,
    pub witness: Option<SwapWitness>,
    pub elapsed_ms: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial, mixed from the master seed and the trial's coordinates.
pub fn trial_seed(master_seed: u64, n: usize, p_index: usize, trial: usize) -> u64 {
    let mut h = splitmix64(master_seed);
    for x in [n as u64, p_index as u64, trial as u64] {
        h = splitmix64(h ^ x);
    }
    h
}

struct Cell {
    n: usize,
    p: f64,
    p_index: usize,
    trial: usize,
}

/// Runs every trial of `cfg` and returns the records sorted by `(n, p, trial)`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>, ConfigError> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &n in &cfg.n_values {
        for p_index in 0..cfg.p.len() {
            let p = cfg.p.p(p_index, n, cfg.r);
            for trial in 0..cfg.trials {
                cells.push(Cell { n, p, p_index, trial });
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| ConfigError::Invalid(format!("worker pool: {e}")))?;
    let mut records: Vec<SweepRecord> = pool.install(|| cells.par_iter().map(|c| run_trial(cfg, c)).collect());
    records.sort_by_key(|r| (r.n, r.p_index, r.trial));
    Ok(records)
}

fn run_trial(cfg: &SweepConfig, cell: &Cell) -> SweepRecord {
    let seed = trial_seed(cfg.master_seed, cell.n, cell.p_index, cell.trial);
    let mut rec = SweepRecord {
        n: cell.n,
        p: cell.p,
        p_index: cell.p_index,
        r: cfg.r,
        trial: cell.trial,
        seed,
        mode: cfg.mode.label(),
        outcome: Outcome::Inconsistent,
        timed_out: false,
        detail: None,
        max_component: 0,
        unique_rm1_balls: None,
        path_pair_count: None,
        good_edge_count: None,
        witness: None,
        elapsed_ms: 0,
    };
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(|| {
        let g = sample_gnp(GnpParams { n: cell.n, p: cell.p, seed });
        let mut rec = rec.clone();
        execute(cfg, cell.p, seed, &g, &mut rec);
        rec
    }));
    let elapsed = start.elapsed();
    match result {
        Ok(done) => rec = done,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            rec.outcome = Outcome::Inconsistent;
            rec.detail = Some(format!("panic: {msg}"));
        }
    }
    if elapsed.as_secs_f64() > cfg.trial_timeout_secs {
        rec.outcome = Outcome::Inconsistent;
        rec.timed_out = true;
        rec.detail = Some(format!("timed out after {:.1} s", elapsed.as_secs_f64()));
    }
    rec.elapsed_ms = elapsed.as_millis() as u64;
    rec
}

fn execute(cfg: &SweepConfig, p: f64, seed: u64, g: &Graph, rec: &mut SweepRecord) {
    let r = cfg.r;
    rec.max_component = max_component_size(g);
    match &cfg.mode {
        Mode::Reconstruct { .. } => {
            let alg = match cfg.mode.algorithm().expect("validated algorithm") {
                Algorithm::Hybrid { .. } => Algorithm::Hybrid { p_hint: Some(p) },
                a => a,
            };
            if r >= 2 {
                rec.unique_rm1_balls = Some(balls_unique(g, r - 1).0);
            }
            if r >= 1 {
                rec.path_pair_count = Some(count_path_components(g, r));
            }
            let bc = BallCollection::from_graph(g, r);
            let out = reconstruct(&bc, alg);
            rec.outcome = match &out {
                Reconstruction::Exact(h) if h.edge_vec() == g.edge_vec() => Outcome::Exact,
                Reconstruction::Exact(_) => {
                    rec.detail = Some("labelled output differs from the source".into());
                    Outcome::Inconsistent
                }
                Reconstruction::Isomorphic(_) => Outcome::Isomorphic,
                Reconstruction::NotApplicable(s) => {
                    rec.detail = Some(s.clone());
                    Outcome::NotApplicable
                }
                Reconstruction::Inconsistent(s) => {
                    rec.detail = Some(s.clone());
                    Outcome::Inconsistent
                }
            };
        }
        Mode::Witness { finder } => {
            let opts = FinderOptions {
                budget: cfg.budget,
                seed: splitmix64(seed ^ 0xF1ED),
                p: Some(p),
                ..FinderOptions::default()
            };
            let res = find_witness(g, *finder, r, &opts);
            rec.path_pair_count = res.stats.path_components;
            rec.good_edge_count = res.stats.good_edges;
            rec.outcome = match res.witness {
                None => Outcome::None,
                Some(w) => {
                    let report = verify_witness(g, &w, VerifyOptions { exact_cap: cfg.exact_cap });
                    if report.is_valid() {
                        rec.witness = Some(w);
                        Outcome::WitnessFound
                    } else {
                        rec.detail = Some(format!("witness failed verification: {report}"));
                        Outcome::Inconsistent
                    }
                }
            };
        }
    }
}

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "NA".to_string(), |v| v.to_string())
}

/// Writes the header and one row per record. With `with_elapsed` false the
/// `elapsed_ms` column is written as `NA`, which makes reruns byte-comparable.
pub fn write_csv<W: Write>(mut out: W, records: &[SweepRecord], with_elapsed: bool) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let elapsed = if with_elapsed { r.elapsed_ms.to_string() } else { "NA".into() };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            r.r,
            r.trial,
            r.seed,
            r.mode,
            r.outcome,
            r.max_component,
            opt(&r.unique_rm1_balls.map(u8::from)),
            opt(&r.path_pair_count),
            opt(&r.good_edge_count),
            elapsed
        )?;
    }
    Ok(())
}

pub fn csv_string(records: &[SweepRecord], with_elapsed: bool) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records, with_elapsed).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Frequency `k / n` with its Wilson score 95% interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
    pub frequency: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn wilson(successes: usize, trials: usize) -> Proportion {
    assert!(successes <= trials, "{successes} successes in {trials} trials");
    if trials == 0 {
        return Proportion { successes, trials, frequency: 0.0, lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Proportion {
        successes,
        trials,
        frequency: phat,
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

/// Outcome counts of one `(n, p, r, mode)` cell.
#[derive(Clone, Debug)]
pub struct CellSummary {
    pub n: usize,
    pub p: f64,
    pub r: usize,
    pub mode: String,
    pub trials: usize,
    pub counts: Vec<(Outcome, usize)>,
    pub timeouts: usize,
}

impl CellSummary {
    pub fn count(&self, o: Outcome) -> usize {
        self.counts.iter().find(|(x, _)| *x == o).map_or(0, |c| c.1)
    }

    pub fn fraction(&self, o: Outcome) -> Proportion {
        wilson(self.count(o), self.trials)
    }

    /// EXACT, ISOMORPHIC and WITNESS_FOUND together.
    pub fn success(&self) -> Proportion {
        let k = self.counts.iter().filter(|(o, _)| o.is_success()).map(|c| c.1).sum();
        wilson(k, self.trials)
    }
}

/// Groups records by `(n, p, r, mode)` in first-seen order.
pub fn summarize(records: &[SweepRecord]) -> Vec<CellSummary> {
    let mut index: HashMap<(usize, u64, usize, &str), usize> = HashMap::new();
    let mut cells: Vec<CellSummary> = Vec::new();
    for rec in records {
        let key = (rec.n, rec.p.to_bits(), rec.r, rec.mode.as_str());
        let i = *index.entry(key).or_insert_with(|| {
            cells.push(CellSummary {
                n: rec.n,
                p: rec.p,
                r: rec.r,
                mode: rec.mode.clone(),
                trials: 0,
                counts: Outcome::ALL.iter().map(|&o| (o, 0)).collect(),
                timeouts: 0,
            });
            cells.len() - 1
        });
        let cell = &mut cells[i];
        cell.trials += 1;
        cell.timeouts += usize::from(rec.timed_out);
        for c in cell.counts.iter_mut() {
            if c.0 == rec.outcome {
                c.1 += 1;
            }
        }
    }
    cells
}

/// One row per cell: counts per outcome, then the success frequency and its interval.
pub fn write_summary<W: Write>(mut out: W, cells: &[CellSummary]) -> io::Result<()> {
    let names: Vec<String> = Outcome::ALL.iter().map(|o| o.as_str().to_lowercase()).collect();
    writeln!(out, "n,p,r,mode,trials,{},timeouts,success,success_lo,success_hi", names.join(","))?;
    for c in cells {
        let counts: Vec<String> = Outcome::ALL.iter().map(|&o| c.count(o).to_string()).collect();
        let s = c.success();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6}",
            c.n,
            c.p,
            c.r,
            c.mode,
            c.trials,
            counts.join(","),
            c.timeouts,
            s.frequency,
            s.lo,
            s.hi
        )?;
    }
    Ok(())
}
