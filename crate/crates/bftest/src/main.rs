use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bftest::checks::{run_check, CheckId};
use bftest::config::{LearnerKind, TargetKind, TesterId};
use bftest::lb::{self, CayleyParams, LbRow, PisyParams, SumsetParams, SunflowerParams};
use bftest::output::{emit_results, lb_table, sweep_table, write_lb_csv, write_sweep_csv};
use bftest::{run_trials, sweep, ExperimentConfig, HarnessError, Result, SweepSpec, SEED_ENV};
use bftest_core::lowerbounds::AbelianGroup;
use bftest_core::testers::ModelKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bftest", version, about = "Property testers for Boolean functions under classic, active and passive query models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the trials of one experiment.
    Run(RunArgs),
    /// Run one experiment per value of a parameter.
    Sweep(SweepArgs),
    /// Lower-bound experiments.
    Lb {
        #[command(subcommand)]
        exp: LbCommand,
    },
    /// Self-checks against independent computations.
    Oracle(OracleArgs),
}

/// Flags mirroring the keys of the TOML configuration file.
#[derive(Args, Clone, Default)]
struct ConfigFlags {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tester: Option<TesterId>,
    /// Family for learn-verify, e.g. "lin k=2 n=12".
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    target: Option<TargetKind>,
    /// Fixed target descriptor, e.g. "klinear n=10 I=0,3,6".
    #[arg(long)]
    target_fn: Option<String>,
    #[arg(long)]
    learner: Option<LearnerKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    epsilon_lo: Option<f64>,
    #[arg(long)]
    u: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; otherwise the config file's seed, then $BFTEST_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigFlags {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_toml_file(path, env_seed()?)?,
            None => ExperimentConfig {
                seed: env_seed()?.unwrap_or(0),
                ..Default::default()
            },
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = Some(v.clone());
                }
            )*};
        }
        set!(tester, target, learner, n, epsilon, trials, seed);
        set_opt!(family, model, target_fn, k, d, epsilon_lo, u, q, repetitions);
        Ok(cfg)
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn seed_or_env(seed: Option<u64>) -> Result<u64> {
    Ok(match seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    flags: ConfigFlags,
    /// Per-trial CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON summary output.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep file with a [base] table, `param` and `values`.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    flags: ConfigFlags,
    /// Parameter to vary.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LbCommand {
    /// pi_S(y) mean and threshold violations as q varies.
    Pisy {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10,12")]
        q: Vec<usize>,
        #[arg(long, default_value_t = 2500)]
        pool: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[command(flatten)]
        out: LbOut,
    },
    /// Concentration of the number of k-subsets summing to a target.
    Sumset {
        /// "Z2^q" or "ZN".
        #[arg(long, default_value = "Z2^4")]
        group: AbelianGroup,
        #[arg(long, value_delimiter = ',', default_value = "24")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        target: u64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[command(flatten)]
        out: LbOut,
    },
    /// Delta-system search on random families around the threshold.
    Sunflower {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        b: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        size_factor: f64,
        #[arg(long, default_value_t = 1000)]
        families: usize,
        #[command(flatten)]
        out: LbOut,
    },
    /// Total variation of short random walks on a Cayley graph.
    Cayley {
        #[arg(long, default_value = "Z10007")]
        group: AbelianGroup,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[command(flatten)]
        out: LbOut,
    },
}

#[derive(Args)]
struct LbOut {
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    check: CheckId,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn stdout_csv(write: impl FnOnce(&mut csv::Writer<std::io::Stdout>) -> csv::Result<()>) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    write(&mut w).map_err(|source| HarnessError::Csv {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = args.flags.load()?;
    if args.csv.is_some() {
        cfg.csv = args.csv.clone();
    }
    if args.json.is_some() {
        cfg.json = args.json.clone();
    }
    let (plan, results, summary) = run_trials(&cfg)?;
    match &cfg.csv {
        Some(csv) => emit_results(&cfg, &plan, &results, &summary, csv, cfg.json.as_deref())?,
        None => {
            if let Some(json) = &cfg.json {
                bftest::output::write_json(
                    &bftest::output::RunSummary {
                        config: cfg.clone(),
                        plan: plan.clone(),
                        seed: plan.seed,
                        summary: summary.clone(),
                    },
                    json,
                )?;
            }
        }
    }
    let rate = summary.acceptance_rate.map_or("n/a".to_string(), |r| format!("{r:.4}"));
    let iv = summary.interval.map_or("n/a".to_string(), |i| format!("[{:.4}, {:.4}]", i.lo, i.hi));
    println!(
        "{} {} target={:?} n={} trials={} accepted={} rejected={} inconclusive={} acceptance={rate} ci95={iv} mean_queries={:.2}",
        plan.tester,
        plan.model,
        plan.target,
        plan.n,
        summary.trials,
        summary.accepted,
        summary.rejected,
        summary.inconclusive,
        summary.mean_queries
    );
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            toml::from_str::<SweepSpec>(&text).map_err(|source| HarnessError::Toml {
                path: path.clone(),
                source,
            })?
        }
        None => SweepSpec {
            base: args.flags.load()?,
            param: args.param.clone().ok_or_else(|| HarnessError::Config("sweep needs --param or --spec".into()))?,
            values: args.values.clone(),
        },
    };
    let rows = sweep(&spec.configs()?)?;
    match &args.csv {
        Some(p) => write_sweep_csv(&rows, &spec.param, &spec.values, p),
        None => stdout_csv(|w| sweep_table(&rows, &spec.param, &spec.values, w)),
    }
}

fn run_lb(cmd: LbCommand) -> Result<()> {
    let (rows, out): (Vec<LbRow>, LbOut) = match cmd {
        LbCommand::Pisy {
            n,
            k,
            q,
            pool,
            trials,
            samples,
            out,
        } => (
            lb::pisy(&PisyParams {
                n,
                k,
                q_values: q,
                pool,
                trials,
                samples,
                seed: seed_or_env(out.seed)?,
            })?,
            out,
        ),
        LbCommand::Sumset {
            group,
            n,
            k,
            target,
            lambda,
            trials,
            out,
        } => (
            lb::sumset(&SumsetParams {
                group,
                n_values: n,
                k,
                target,
                lambda,
                trials,
                seed: seed_or_env(out.seed)?,
            })?,
            out,
        ),
        LbCommand::Sunflower {
            a,
            b,
            size_factor,
            families,
            out,
        } => (
            lb::sunflower(&SunflowerParams {
                a_values: a,
                b_values: b,
                size_factor,
                families,
                seed: seed_or_env(out.seed)?,
            })?,
            out,
        ),
        LbCommand::Cayley {
            group,
            k,
            d,
            draws,
            out,
        } => (
            lb::cayley(&CayleyParams {
                group,
                k,
                d,
                draws,
                seed: seed_or_env(out.seed)?,
            })?,
            out,
        ),
    };
    match &out.csv {
        Some(p) => write_lb_csv(&rows, p),
        None => stdout_csv(|w| lb_table(&rows, w)),
    }
}

fn run_oracle(args: OracleArgs) -> Result<bool> {
    let report = run_check(args.check, args.trials, seed_or_env(args.seed)?)?;
    let status = if report.passed { "PASS" } else { "FAIL" };
    let name = clap::ValueEnum::to_possible_value(&args.check).expect("named").get_name().to_string();
    println!("{status} {name}");
    for line in &report.details {
        println!("  {line}");
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Sweep(args) => run_sweep(args).map(|_| true),
        Command::Lb { exp } => run_lb(exp).map(|_| true),
        Command::Oracle(args) => run_oracle(args),
    };
    let _ = std::io::stdout().flush();
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
