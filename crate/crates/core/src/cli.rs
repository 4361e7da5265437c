//! Command-line front end. JSON goes to stdout, a one-line human summary
//! to stderr.
//!
//! Exit codes: 0 certified (or a plain report), 2 probabilistic negative,
//! 1 usage, parse or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::degmat::DegreeMatrix;
use crate::dimcalc::{self, DimensionKind};
use crate::field::{PrimeField, DEFAULT_PRIME};
use crate::formmat::FormMatrix;
use crate::idealrank::{hilbert_function, GeneratorSet};
use crate::poly::PolyRing;
use crate::verify::{self, derive_seed, CheckVerdict, Outcome, VerifyConfig, WalkStep};

pub const SEED_ENV: &str = "DETSUM_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_FULL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "detsum", version, about = "Verify sums-of-determinants representations of general forms by exact rank computations mod p")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Prime modulus for all computations.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME)]
    pub prime: u64,
    /// RNG seed (default: random, always echoed). DETSUM_SEED overrides it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random draws before a rank deficiency is reported.
    #[arg(long, global = true, default_value_t = verify::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is a general form of degree tr(A) a sum of s determinants?
    Check {
        file: PathBuf,
        #[arg(long)]
        summands: usize,
        #[arg(long, default_value_t = 4)]
        vars: usize,
        /// Optional degree; rejected unless it equals tr(A).
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Least certified number of summands up to k^(vars-3).
    MinS {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        vars: usize,
    },
    /// Step-by-step check of the spanning property for a (k-1) x k matrix.
    Walkthrough { file: PathBuf },
    /// Dimension counts for 3x3 all-a or k x k linear degree matrices.
    Dims {
        #[arg(long, conflicts_with = "cube", required_unless_present = "cube")]
        linear: Option<usize>,
        #[arg(long)]
        cube: Option<i64>,
        /// Matrix size for --cube.
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Conjectured number of k x k linear determinants.
    Conjecture {
        #[arg(long)]
        k: usize,
    },
    /// Observed vs predicted Hilbert function of the maximal-minor ideal
    /// of a general ternary (k-1) x k matrix.
    Hilbert {
        file: PathBuf,
        #[arg(long)]
        degree: i64,
    },
}

/// Validated run configuration.
#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub field: PrimeField,
    pub seed: u64,
    pub trials: usize,
    pub threads: usize,
}

impl RunConfig {
    pub fn from_args(args: &ConfigArgs) -> Result<Self, String> {
        let field = PrimeField::new(args.prime).map_err(|e| format!("--prime: {e}"))?;
        let env_seed = match std::env::var(SEED_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("{SEED_ENV}: invalid seed {v:?}"))?,
            ),
            Err(_) => None,
        };
        let seed = env_seed.or(args.seed).unwrap_or_else(rand::random);
        if args.trials == 0 {
            return Err("--trials must be at least 1".into());
        }
        let threads = match args.threads {
            Some(0) => return Err("--threads must be at least 1".into()),
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(RunConfig {
            field,
            seed,
            trials: args.trials,
            threads,
        })
    }

    pub fn verify(&self) -> VerifyConfig {
        VerifyConfig::new(self.field, self.seed).with_trials(self.trials)
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CheckOutput {
    pub statement: String,
    pub degree_matrix: Vec<Vec<i64>>,
    pub s: usize,
    pub vars: usize,
    pub d: i64,
    pub outcome: Outcome,
    pub rank: usize,
    pub ambient_dim: usize,
    pub prime: u64,
    pub seed: u64,
    pub trials: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TrialSummary {
    pub outcome: Outcome,
    pub rank: usize,
    pub ambient_dim: usize,
    pub trials: usize,
    /// Seed of the last draw; replays that draw exactly.
    pub trial_seed: u64,
}

impl From<&CheckVerdict> for TrialSummary {
    fn from(v: &CheckVerdict) -> Self {
        TrialSummary {
            outcome: v.outcome,
            rank: v.rank_report.achieved_rank,
            ambient_dim: v.rank_report.ambient_dim,
            trials: v.rank_report.trials_used,
            trial_seed: v.rank_report.seed.unwrap_or_default(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MinSEntry {
    pub s: usize,
    #[serde(flatten)]
    pub result: TrialSummary,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MinSOutput {
    pub statement: String,
    pub degree_matrix: Vec<Vec<i64>>,
    pub vars: usize,
    pub d: i64,
    pub min_s: Option<usize>,
    pub bound: usize,
    pub verdicts: Vec<MinSEntry>,
    pub prime: u64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BlockOutput {
    pub degree_matrix: Vec<Vec<i64>>,
    pub multiplicity: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StepOutput {
    pub label: String,
    pub degree: i64,
    pub blocks: Vec<BlockOutput>,
    pub direct: TrialSummary,
    pub witness_kind: String,
    pub witness: TrialSummary,
}

impl From<&WalkStep> for StepOutput {
    fn from(s: &WalkStep) -> Self {
        StepOutput {
            label: s.label.clone(),
            degree: s.degree,
            blocks: s
                .blocks
                .iter()
                .map(|b| BlockOutput {
                    degree_matrix: b.degree_matrix.to_rows(),
                    multiplicity: b.multiplicity,
                })
                .collect(),
            direct: (&s.direct).into(),
            witness_kind: serde_json::to_value(s.witness.statement)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            witness: (&s.witness).into(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WalkthroughOutput {
    pub statement: String,
    pub degree_matrix: Vec<Vec<i64>>,
    pub k: usize,
    pub diameter: i64,
    pub m: usize,
    pub big_t: i64,
    pub ladder: Vec<Vec<Vec<i64>>>,
    pub steps: Vec<StepOutput>,
    pub all_certified: bool,
    pub prime: u64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ConjectureOutput {
    pub k: usize,
    pub conjecture_s: u64,
    pub expected_s: u64,
    pub theta: i64,
    #[serde(rename = "dim_V")]
    pub dim_v: i64,
    pub below_k: bool,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct HilbertOutput {
    pub statement: String,
    pub degree_matrix: Vec<Vec<i64>>,
    pub degree: i64,
    pub big_t: i64,
    pub hf_observed: u64,
    pub hf_predicted: i64,
    pub agree: bool,
    pub prime: u64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

fn read_matrix(path: &Path) -> Result<DegreeMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    DegreeMatrix::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable output")
}

struct Report {
    json: String,
    summary: String,
    code: i32,
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::CertifiedFull => "certified-full",
        Outcome::ProbablyNotFull => "probably-not-full",
    }
}

fn outcome_code(o: Outcome) -> i32 {
    match o {
        Outcome::CertifiedFull => EXIT_OK,
        Outcome::ProbablyNotFull => EXIT_NOT_FULL,
    }
}

fn execute(command: &Command, cfg: &RunConfig) -> Result<Report, String> {
    let started = Instant::now();
    let elapsed = || started.elapsed().as_millis() as u64;
    let vcfg = cfg.verify();
    match command {
        Command::Check {
            file,
            summands,
            vars,
            degree,
        } => {
            let a = read_matrix(file)?;
            let d = verify::required_degree(&a, *degree).map_err(|e| e.to_string())?;
            let v = verify::check_sum_of_determinants(&vcfg, &a, *summands, *vars).map_err(|e| e.to_string())?;
            let out = CheckOutput {
                statement: "sum-of-determinants".into(),
                degree_matrix: a.to_rows(),
                s: *summands,
                vars: *vars,
                d,
                outcome: v.outcome,
                rank: v.rank_report.achieved_rank,
                ambient_dim: v.rank_report.ambient_dim,
                prime: cfg.field.modulus(),
                seed: cfg.seed,
                trials: v.rank_report.trials_used,
                elapsed_ms: elapsed(),
            };
            Ok(Report {
                summary: format!(
                    "s={} vars={} d={}: {} (rank {}/{})",
                    out.s, out.vars, out.d, outcome_name(out.outcome), out.rank, out.ambient_dim
                ),
                code: outcome_code(v.outcome),
                json: to_json(&out),
            })
        }
        Command::MinS { file, vars } => {
            let a = read_matrix(file)?;
            let r = verify::find_min_s(&vcfg, &a, *vars).map_err(|e| e.to_string())?;
            let out = MinSOutput {
                statement: "min-s".into(),
                degree_matrix: a.to_rows(),
                vars: *vars,
                d: a.trace(),
                min_s: r.min_s,
                bound: r.bound,
                verdicts: r
                    .verdicts
                    .iter()
                    .map(|v| MinSEntry {
                        s: v.s,
                        result: v.into(),
                    })
                    .collect(),
                prime: cfg.field.modulus(),
                seed: cfg.seed,
                elapsed_ms: elapsed(),
            };
            Ok(Report {
                summary: format!(
                    "min s = {} (theorem bound {}; smaller values failed probabilistically)",
                    out.min_s.map_or("none".to_string(), |s| s.to_string()),
                    out.bound
                ),
                code: if out.min_s.is_some() { EXIT_OK } else { EXIT_NOT_FULL },
                json: to_json(&out),
            })
        }
        Command::Walkthrough { file } => {
            let a = read_matrix(file)?;
            let w = verify::lemma_walkthrough(&vcfg, &a).map_err(|e| e.to_string())?;
            let out = WalkthroughOutput {
                statement: "walkthrough".into(),
                degree_matrix: w.degree_matrix.to_rows(),
                k: w.degree_matrix.k(),
                diameter: w.diameter,
                m: w.m,
                big_t: w.big_t,
                ladder: w.ladder.iter().map(DegreeMatrix::to_rows).collect(),
                steps: w.steps.iter().map(StepOutput::from).collect(),
                all_certified: w.all_certified(),
                prime: cfg.field.modulus(),
                seed: cfg.seed,
                elapsed_ms: elapsed(),
            };
            let labels: Vec<&str> = out.steps.iter().map(|s| s.label.as_str()).collect();
            Ok(Report {
                summary: format!("{} steps [{}], all certified: {}", labels.len(), labels.join(" => "), out.all_certified),
                code: if out.all_certified { EXIT_OK } else { EXIT_NOT_FULL },
                json: to_json(&out),
            })
        }
        Command::Dims { linear, cube, k } => {
            let kind = match (linear, cube) {
                (Some(k), None) => DimensionKind::Linear { k: *k },
                (None, Some(a)) => DimensionKind::AllEqual { k: *k, a: *a },
                _ => return Err("pass exactly one of --linear or --cube".into()),
            };
            let r = dimcalc::dimension_report(kind).map_err(|e| e.to_string())?;
            Ok(Report {
                summary: format!("theta={} dim V={} expected s={}", r.theta, r.dim_v, r.expected_s),
                code: EXIT_OK,
                json: to_json(&r),
            })
        }
        Command::Conjecture { k } => {
            let r = dimcalc::dimension_report(DimensionKind::Linear { k: *k }).map_err(|e| e.to_string())?;
            let conjecture_s = r.conjecture_s.expect("linear reports carry the conjecture");
            let out = ConjectureOutput {
                k: *k,
                conjecture_s,
                expected_s: r.expected_s,
                theta: r.theta,
                dim_v: r.dim_v,
                below_k: (conjecture_s as usize) < *k,
            };
            Ok(Report {
                summary: format!("k={k}: conjectured s={conjecture_s}"),
                code: EXIT_OK,
                json: to_json(&out),
            })
        }
        Command::Hilbert { file, degree } => {
            let a = read_matrix(file)?;
            let res = dimcalc::resolution_degrees(&a).map_err(|e| e.to_string())?;
            let big_t = a.big_t().map_err(|e| e.to_string())?;
            let ring = PolyRing::new(cfg.field, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0));
            let g = FormMatrix::random(&ring, &a.order(), &mut rng);
            let minors = g.maximal_minors(&ring).map_err(|e| e.to_string())?;
            let gens = GeneratorSet::new(&ring, minors).map_err(|e| e.to_string())?;
            let observed = hilbert_function(&ring, &gens, *degree) as u64;
            let predicted = dimcalc::plane_hilbert_function(&res, *degree) as i64;
            let agree = observed as i64 == predicted;
            let out = HilbertOutput {
                statement: "hilbert".into(),
                degree_matrix: a.to_rows(),
                degree: *degree,
                big_t,
                hf_observed: observed,
                hf_predicted: predicted,
                agree,
                prime: cfg.field.modulus(),
                seed: cfg.seed,
                elapsed_ms: elapsed(),
            };
            // below T-2 no agreement is claimed
            let code = if agree || *degree < big_t - 2 { EXIT_OK } else { EXIT_NOT_FULL };
            Ok(Report {
                summary: format!("HF({degree}): observed {observed}, predicted {predicted}"),
                code,
                json: to_json(&out),
            })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let cfg = match RunConfig::from_args(&cli.config) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_ERROR;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: thread pool: {e}");
            return EXIT_ERROR;
        }
    };
    match pool.install(|| execute(&cli.command, &cfg)) {
        Ok(report) => {
            let _ = writeln!(out, "{}", report.json);
            let _ = writeln!(err, "{} [prime {}, seed {}]", report.summary, cfg.field.modulus(), cfg.seed);
            report.code
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}
