//! Command-line interface for robust pricing solves.
//!
//! Subcommands: `generate` synthetic instances, `solve` (randomized +
//! deterministic + nominal on one instance), `evaluate` a stored policy,
//! `check-proofness` diagnostics, and `batch` experiment sweeps to CSV.
//!
//! Exit codes: 0 success, 2 parse/config error, 3 cap or limit exceeded,
//! 4 numerical failure.

use clap::{Args, Parser, Subcommand};
use rrpo::analysis::{check_corollary2, check_proofness_conditions};
use rrpo::batch::{evaluate_policy, rows_to_csv, run_batch, BatchConfig, BudgetSweep};
use rrpo::convex::IterTrace;
use rrpo::demand::{DemandFamily, Instance};
use rrpo::generate::{generate_instance, GenerationSpec, ParamRanges};
use rrpo::instance_io::{read_instance, read_policy, write_instance, write_policy, ReportFile};
use rrpo::oracles::PricingMethod;
use rrpo::uncertainty::{DiscreteBudgetSet, L1Set, UncertaintySet};
use rrpo::Error;
use std::path::PathBuf;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "rrpo", about = "Randomized robust price optimization", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct UncertaintyArgs {
    /// Attach or override the uncertainty set: l1 | budget
    #[arg(long)]
    uncertainty: Option<String>,
    /// L1 budget theta.
    #[arg(long)]
    theta: Option<f64>,
    /// Discrete budget Gamma.
    #[arg(long)]
    gamma: Option<usize>,
    /// Lower-bound multiplier for budget sets.
    #[arg(long, default_value_t = 0.7)]
    lo_mult: f64,
    /// Upper-bound multiplier for budget sets.
    #[arg(long, default_value_t = 1.3)]
    hi_mult: f64,
}

impl UncertaintyArgs {
    fn resolve(
        &self,
        instance: &Instance,
        from_file: Option<UncertaintySet>,
    ) -> Result<UncertaintySet, Error> {
        match self.uncertainty.as_deref() {
            None => from_file.ok_or_else(|| {
                Error::InconsistentInputs(
                    "no uncertainty set in the instance file; pass --uncertainty".into(),
                )
            }),
            Some("l1") => {
                let theta = self.theta.ok_or_else(|| {
                    Error::InconsistentInputs("--uncertainty l1 requires --theta".into())
                })?;
                Ok(UncertaintySet::L1(L1Set::new(theta, instance.u0.clone())?))
            }
            Some("budget") => {
                let gamma = self.gamma.ok_or_else(|| {
                    Error::InconsistentInputs("--uncertainty budget requires --gamma".into())
                })?;
                Ok(UncertaintySet::Budget(DiscreteBudgetSet::from_multipliers(
                    gamma,
                    instance.u0.clone(),
                    self.lo_mult,
                    self.hi_mult,
                )?))
            }
            Some("explicit") => from_file
                .filter(|s| matches!(s, UncertaintySet::Explicit(_)))
                .ok_or_else(|| {
                    Error::InconsistentInputs(
                        "explicit sets are read from the instance file".into(),
                    )
                }),
            Some(other) => Err(Error::InconsistentInputs(format!(
                "unknown uncertainty kind {other}"
            ))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance file.
    Generate {
        /// linear | semilog | loglog
        #[arg(long)]
        family: String,
        #[arg(long)]
        products: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated price levels shared by all products.
        #[arg(long, default_value = "1,2,3,4,5")]
        grid: String,
        /// Parameter range preset: convex | discrete
        #[arg(long, default_value = "convex")]
        ranges: String,
        #[command(flatten)]
        uncertainty: UncertaintyArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve nominal, deterministic robust, and randomized robust problems.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        uncertainty: UncertaintyArgs,
        /// enumerate | extreme | local:<restarts>
        #[arg(long, default_value = "enumerate")]
        pricing: String,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write just the policy here.
        #[arg(long)]
        policy_out: Option<PathBuf>,
    },
    /// Evaluate a stored policy's worst case.
    Evaluate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[command(flatten)]
        uncertainty: UncertaintyArgs,
    },
    /// Run the randomization-proofness diagnostics.
    CheckProofness {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        uncertainty: UncertaintyArgs,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Run an experiment sweep and emit CSV.
    Batch {
        /// linear | semilog | loglog
        #[arg(long)]
        family: String,
        /// Comma-separated product counts.
        #[arg(long, default_value = "5")]
        products: String,
        /// Comma-separated L1 budgets.
        #[arg(long)]
        thetas: Option<String>,
        /// Comma-separated discrete budgets.
        #[arg(long)]
        gammas: Option<String>,
        #[arg(long, default_value_t = 24)]
        num_seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// enumerate | extreme | local:<restarts>
        #[arg(long)]
        pricing: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        /// Per-cell wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_family(s: &str) -> Result<DemandFamily, Error> {
    match s {
        "linear" => Ok(DemandFamily::Linear),
        "semilog" => Ok(DemandFamily::SemiLog),
        "loglog" => Ok(DemandFamily::LogLog),
        other => Err(Error::InconsistentInputs(format!(
            "unknown demand family {other}"
        ))),
    }
}

fn parse_pricing(s: &str, seed: u64) -> Result<PricingMethod, Error> {
    if s == "enumerate" {
        Ok(PricingMethod::Enumerate)
    } else if s == "extreme" {
        Ok(PricingMethod::ExtremeLogLog)
    } else if let Some(r) = s.strip_prefix("local:") {
        let restarts: usize = r.parse().map_err(|_| {
            Error::InconsistentInputs(format!("bad restart count in --pricing {s}"))
        })?;
        Ok(PricingMethod::LocalSearch { restarts, seed })
    } else {
        Err(Error::InconsistentInputs(format!(
            "unknown pricing method {s}"
        )))
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| Error::InconsistentInputs(format!("bad {what} entry: {t}")))
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::NumericalFailure(_) => 4,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate {
            family,
            products,
            seed,
            grid,
            ranges,
            uncertainty,
            out,
        } => {
            let family = parse_family(&family)?;
            let ranges = match ranges.as_str() {
                "convex" => ParamRanges::convex_defaults(family),
                "discrete" => ParamRanges::discrete_defaults(family),
                other => {
                    return Err(Error::InconsistentInputs(format!(
                        "unknown ranges preset {other}"
                    )))
                }
            };
            let grid: Vec<f64> = parse_list(&grid, "grid")?;
            let spec = GenerationSpec {
                family,
                products,
                seed,
                ranges,
                grid,
            };
            let instance = generate_instance(&spec)?;
            let set = match uncertainty.uncertainty {
                Some(_) => Some(uncertainty.resolve(&instance, None)?),
                None => None,
            };
            write_instance(&out, &instance, set.as_ref())?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Solve {
            instance,
            uncertainty,
            pricing,
            eps,
            seed,
            time_limit,
            out,
            policy_out,
        } => {
            let (inst, from_file) = read_instance(&instance)?;
            let set = uncertainty.resolve(&inst, from_file)?;
            let pricing = parse_pricing(&pricing, seed)?;
            let limit = time_limit.map(Duration::from_secs_f64);
            let metrics = rrpo::batch::solve_cell(&inst, &set, pricing, eps, limit)?;

            println!("z_n      = {:.6}", metrics.z_n);
            println!("z_rr     = {:.6}", metrics.z_rr);
            println!("z_dr     = {:.6}", metrics.z_dr);
            println!("z_n_wc   = {:.6}", metrics.z_n_wc);
            match metrics.ri_percent {
                Some(ri) => println!("ri       = {ri:.4}%"),
                None => println!("ri       = n/a (z_dr <= 0)"),
            }
            println!("certified = {}", metrics.certified);

            // Re-run the randomized solve to capture policy and trace for
            // the report (solve_cell returns only the metrics row).
            if out.is_some() || policy_out.is_some() {
                let (policy, trace): (rrpo::oracles::RandomizedPolicy, Vec<IterTrace>) =
                    match &set {
                        UncertaintySet::L1(l1) => {
                            let rr = rrpo::convex::solve_rrpo_convex(
                                &inst,
                                l1,
                                &rrpo::convex::RrpoConvexConfig {
                                    eps,
                                    max_iter: 2000,
                                    pricing,
                                    time_limit: limit,
                                },
                            )?;
                            (rr.policy, rr.trace)
                        }
                        UncertaintySet::Budget(b) => {
                            let rr = rrpo::discrete::solve_double_cg(
                                &inst,
                                &rrpo::uncertainty::FiniteSet::Budget(b),
                                &rrpo::discrete::DoubleCgConfig {
                                    eps,
                                    dual_sep: pricing,
                                    time_limit: limit,
                                    ..Default::default()
                                },
                            )?;
                            (rr.policy, rr.trace)
                        }
                        UncertaintySet::Explicit(e) => {
                            let rr = rrpo::discrete::solve_double_cg(
                                &inst,
                                &rrpo::uncertainty::FiniteSet::Explicit(e),
                                &rrpo::discrete::DoubleCgConfig {
                                    eps,
                                    dual_sep: pricing,
                                    time_limit: limit,
                                    ..Default::default()
                                },
                            )?;
                            (rr.policy, rr.trace)
                        }
                    };
                if let Some(path) = &policy_out {
                    write_policy(path, &inst, &policy)?;
                    println!("wrote {}", path.display());
                }
                if let Some(path) = &out {
                    let config = serde_json::json!({
                        "pricing": format!("{pricing:?}"),
                        "eps": eps,
                        "seed": seed,
                        "time_limit": time_limit,
                    });
                    let report =
                        ReportFile::new(&inst, Some(&set), config, metrics, &policy, trace)?;
                    report.write(path)?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(())
        }
        Command::Evaluate {
            instance,
            policy,
            uncertainty,
        } => {
            let (inst, from_file) = read_instance(&instance)?;
            let set = uncertainty.resolve(&inst, from_file)?;
            let pol = read_policy(&policy, &inst)?;
            let eval = evaluate_policy(&inst, &set, &pol)?;
            println!("worst_case       = {:.6}", eval.worst_case);
            println!("nominal_expected = {:.6}", eval.nominal_expected);
            println!("certified        = {}", eval.certified);
            Ok(())
        }
        Command::CheckProofness {
            instance,
            uncertainty,
            tol,
        } => {
            let (inst, from_file) = read_instance(&instance)?;
            let set = uncertainty.resolve(&inst, from_file)?;
            let conditions = check_proofness_conditions(&inst, &set)?;
            println!("concavity conditions: {:?}", conditions.verdict);
            for check in &conditions.evidence {
                println!("  {} = {:.6}", check.name, check.value);
            }
            println!("  note: {}", conditions.notes);
            let argmax = check_corollary2(&inst, &set, tol)?;
            println!("worst-case argmax test: {:?}", argmax.verdict);
            for check in &argmax.evidence {
                println!("  {} = {:.6}", check.name, check.value);
            }
            println!("  note: {}", argmax.notes);
            Ok(())
        }
        Command::Batch {
            family,
            products,
            thetas,
            gammas,
            num_seeds,
            seed,
            pricing,
            eps,
            time_limit,
            out,
        } => {
            let family = parse_family(&family)?;
            let sweep = match (thetas, gammas) {
                (Some(t), None) => BudgetSweep::L1 {
                    thetas: parse_list(&t, "theta")?,
                },
                (None, Some(g)) => BudgetSweep::Discrete {
                    gammas: parse_list(&g, "gamma")?,
                    lo_mult: 0.7,
                    hi_mult: 1.3,
                },
                _ => {
                    return Err(Error::InconsistentInputs(
                        "pass exactly one of --thetas or --gammas".into(),
                    ))
                }
            };
            let mut config = BatchConfig::new(family, sweep);
            config.products = parse_list(&products, "products")?;
            config.seeds = (seed..seed + num_seeds).collect();
            config.eps = eps;
            config.time_limit = time_limit.map(Duration::from_secs_f64);
            if let Some(p) = pricing {
                config.pricing = parse_pricing(&p, seed)?;
            }
            let rows = run_batch(&config)?;
            let csv = rows_to_csv(&rows);
            match out {
                Some(path) => {
                    std::fs::write(&path, &csv)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}
