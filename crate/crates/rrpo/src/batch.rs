//! Batch experiment runner and policy evaluation.
//!
//! A batch is a grid of cells: (products, seed) pairs drawing instances,
//! crossed with a list of uncertainty budgets. Every cell solves the
//! nominal, deterministic robust, and randomized robust problems and emits
//! one CSV row; per-(I, budget) mean rows follow the raw rows. Cells run in
//! parallel, but row order is fixed by the configuration, never by
//! completion order.

use crate::analysis::{compute_metrics, DrpoSolve, MetricsRow, NominalSolve, RrpoSolve};
use crate::convex::{
    solve_drpo_convex, solve_rrpo_convex, DrpoConvexConfig, RrpoConvexConfig, SolveStatus,
};
use crate::demand::{DemandFamily, Instance};
use crate::discrete::{drpo_discrete, solve_double_cg, DoubleCgConfig};
use crate::generate::{generate_instance, GenerationSpec, ParamRanges};
use crate::oracles::{
    worst_case_convex, worst_case_discrete, DiscreteMethod, PricingMethod, RandomizedPolicy,
};
use crate::uncertainty::{DiscreteBudgetSet, FiniteSet, L1Set, Scenario, UncertaintySet};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// The uncertainty model a batch sweeps over.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BudgetSweep {
    /// L1 budgets (theta values).
    L1 { thetas: Vec<f64> },
    /// Discrete budgets (Gamma values) with multiplicative bounds.
    Discrete {
        gammas: Vec<usize>,
        lo_mult: f64,
        hi_mult: f64,
    },
}

/// Batch configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchConfig {
    pub family: DemandFamily,
    pub products: Vec<usize>,
    pub seeds: Vec<u64>,
    pub sweep: BudgetSweep,
    pub ranges: ParamRanges,
    pub grid: Vec<f64>,
    pub pricing: PricingMethod,
    pub eps: f64,
    /// Per-cell wall-clock limit.
    pub time_limit: Option<Duration>,
}

impl BatchConfig {
    pub fn new(family: DemandFamily, sweep: BudgetSweep) -> Self {
        let ranges = match sweep_kind(&sweep) {
            SweepKind::L1 => ParamRanges::convex_defaults(family),
            SweepKind::Discrete => ParamRanges::discrete_defaults(family),
        };
        BatchConfig {
            family,
            products: vec![5],
            seeds: (0..24).collect(),
            sweep,
            ranges,
            grid: GenerationSpec::default_grid(),
            pricing: match family {
                DemandFamily::LogLog => PricingMethod::ExtremeLogLog,
                _ => PricingMethod::Enumerate,
            },
            eps: 1e-6,
            time_limit: None,
        }
    }
}

enum SweepKind {
    L1,
    Discrete,
}

fn sweep_kind(sweep: &BudgetSweep) -> SweepKind {
    match sweep {
        BudgetSweep::L1 { .. } => SweepKind::L1,
        BudgetSweep::Discrete { .. } => SweepKind::Discrete,
    }
}

/// One computed row plus its status.
#[derive(Debug, Clone)]
pub struct BatchRow {
    pub seed: Option<u64>,
    pub metrics: Option<MetricsRow>,
    /// "ok", "mean", or "error: ...".
    pub status: String,
    /// Present on mean rows.
    pub group: Option<(usize, f64)>,
}

/// Solve one (instance, set) cell into the three metric inputs.
pub fn solve_cell(
    instance: &Instance,
    set: &UncertaintySet,
    pricing: PricingMethod,
    eps: f64,
    time_limit: Option<Duration>,
) -> Result<MetricsRow> {
    let budget = match set {
        UncertaintySet::L1(l1) => l1.theta,
        UncertaintySet::Budget(b) => b.gamma_budget as f64,
        UncertaintySet::Explicit(e) => e.members.len() as f64,
    };

    let t0 = Instant::now();
    let nominal_result = crate::oracles::nominal_price_opt(instance, &instance.u0, pricing)?;
    let nominal = NominalSolve {
        p_star: nominal_result.p_star,
        z_n: nominal_result.value,
        seconds: t0.elapsed().as_secs_f64(),
    };

    let (drpo, rrpo) = match set {
        UncertaintySet::L1(l1) => {
            let t1 = Instant::now();
            let dr = solve_drpo_convex(
                instance,
                l1,
                &DrpoConvexConfig {
                    eps,
                    max_inner_iter: 2000,
                    outer: pricing,
                    time_limit,
                },
            )?;
            let drpo = DrpoSolve {
                p_dr: dr.p_dr,
                z_dr: dr.z_dr,
                seconds: t1.elapsed().as_secs_f64(),
                certified: dr.certified,
            };
            let t2 = Instant::now();
            let rr = solve_rrpo_convex(
                instance,
                l1,
                &RrpoConvexConfig {
                    eps,
                    max_iter: 2000,
                    pricing,
                    time_limit,
                },
            )?;
            let rrpo = RrpoSolve {
                policy: rr.policy,
                z_rr: rr.z_rr_upper,
                seconds: t2.elapsed().as_secs_f64(),
                certified: rr.certified && rr.status == SolveStatus::Converged,
            };
            (drpo, rrpo)
        }
        UncertaintySet::Budget(_) | UncertaintySet::Explicit(_) => {
            let finite = match set {
                UncertaintySet::Budget(b) => FiniteSet::Budget(b),
                UncertaintySet::Explicit(e) => FiniteSet::Explicit(e),
                UncertaintySet::L1(_) => unreachable!(),
            };
            let wc_method = discrete_wc_method(&finite);
            let t1 = Instant::now();
            let dr = drpo_discrete(instance, &finite, pricing, wc_method)?;
            let drpo = DrpoSolve {
                p_dr: dr.p_dr,
                z_dr: dr.z_dr,
                seconds: t1.elapsed().as_secs_f64(),
                certified: dr.certified,
            };
            let t2 = Instant::now();
            let rr = solve_double_cg(
                instance,
                &finite,
                &DoubleCgConfig {
                    eps,
                    max_outer: 200,
                    primal_sep: wc_method,
                    dual_sep: pricing,
                    init_prices: None,
                    init_scenarios: None,
                    time_limit,
                },
            )?;
            let rrpo = RrpoSolve {
                policy: rr.policy,
                z_rr: rr.lb,
                seconds: t2.elapsed().as_secs_f64(),
                certified: rr.certified,
            };
            (drpo, rrpo)
        }
    };
    compute_metrics(instance, set, budget, &nominal, &drpo, &rrpo)
}

/// Enumerate when the member count is manageable, otherwise fall back to
/// the flip local search.
fn discrete_wc_method(set: &FiniteSet) -> DiscreteMethod {
    if set.cardinality() <= crate::oracles::SET_ENUM_CAP {
        DiscreteMethod::enumerate()
    } else {
        DiscreteMethod::LocalSearch {
            restarts: 50,
            seed: 0x5eed,
        }
    }
}

/// Run a batch; rows come back in configuration order with per-(I, budget)
/// mean rows appended.
pub fn run_batch(config: &BatchConfig) -> Result<Vec<BatchRow>> {
    let budgets: Vec<f64> = match &config.sweep {
        BudgetSweep::L1 { thetas } => thetas.clone(),
        BudgetSweep::Discrete { gammas, .. } => gammas.iter().map(|&g| g as f64).collect(),
    };
    // One task per (products, seed, budget); instances are drawn per
    // (products, seed) and shared across budgets.
    let mut tasks = Vec::new();
    for &products in &config.products {
        for &seed in &config.seeds {
            for (bi, &budget) in budgets.iter().enumerate() {
                tasks.push((products, seed, bi, budget));
            }
        }
    }
    let rows: Vec<BatchRow> = tasks
        .par_iter()
        .map(|&(products, seed, _bi, budget)| {
            let spec = GenerationSpec {
                family: config.family,
                products,
                seed,
                ranges: config.ranges,
                grid: config.grid.clone(),
            };
            let cell = generate_instance(&spec).and_then(|instance| {
                let set = match &config.sweep {
                    BudgetSweep::L1 { .. } => {
                        UncertaintySet::L1(L1Set::new(budget, instance.u0.clone())?)
                    }
                    BudgetSweep::Discrete {
                        lo_mult, hi_mult, ..
                    } => UncertaintySet::Budget(DiscreteBudgetSet::from_multipliers(
                        budget as usize,
                        instance.u0.clone(),
                        *lo_mult,
                        *hi_mult,
                    )?),
                };
                solve_cell(&instance, &set, config.pricing, config.eps, config.time_limit)
            });
            match cell {
                Ok(metrics) => BatchRow {
                    seed: Some(seed),
                    metrics: Some(metrics),
                    status: "ok".into(),
                    group: None,
                },
                Err(e) => BatchRow {
                    seed: Some(seed),
                    metrics: None,
                    status: format!("error: {e}"),
                    group: Some((products, budget)),
                },
            }
        })
        .collect();

    // Mean rows per (products, budget), in configuration order.
    let mut out = rows;
    for &products in &config.products {
        for &budget in &budgets {
            let group: Vec<&MetricsRow> = out
                .iter()
                .filter_map(|r| r.metrics.as_ref())
                .filter(|m| m.products == products && m.budget == budget)
                .collect();
            if group.is_empty() {
                continue;
            }
            let n = group.len() as f64;
            let mean = |f: &dyn Fn(&MetricsRow) -> f64| group.iter().map(|m| f(m)).sum::<f64>() / n;
            let ri_values: Vec<f64> = group.iter().filter_map(|m| m.ri_percent).collect();
            let mean_ri = if ri_values.is_empty() {
                None
            } else {
                Some(ri_values.iter().sum::<f64>() / ri_values.len() as f64)
            };
            let metrics = MetricsRow {
                products,
                budget,
                t_rr: mean(&|m| m.t_rr),
                z_rr: mean(&|m| m.z_rr),
                e_r_rr_nominal: mean(&|m| m.e_r_rr_nominal),
                t_dr: mean(&|m| m.t_dr),
                z_dr: mean(&|m| m.z_dr),
                ri_percent: mean_ri,
                r_dr_nominal: mean(&|m| m.r_dr_nominal),
                t_n: mean(&|m| m.t_n),
                z_n: mean(&|m| m.z_n),
                z_n_wc: mean(&|m| m.z_n_wc),
                certified: group.iter().all(|m| m.certified),
            };
            out.push(BatchRow {
                seed: None,
                metrics: Some(metrics),
                status: "mean".into(),
                group: Some((products, budget)),
            });
        }
    }
    Ok(out)
}

/// CSV header shared by all batch outputs.
pub const CSV_HEADER: &str =
    "I,budget,t_rr,z_rr,e_r_rr_nominal,t_dr,z_dr,ri_percent,r_dr_nominal,t_n,z_n,z_n_wc,certified,status";

/// Render batch rows (or an empty batch: header only) as CSV.
pub fn rows_to_csv(rows: &[BatchRow]) -> String {
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in rows {
        match &row.metrics {
            Some(m) => {
                let ri = m
                    .ri_percent
                    .map(|v| format!("{v:.6}"))
                    .unwrap_or_default();
                csv.push_str(&format!(
                    "{},{},{:.4},{:.6},{:.6},{:.4},{:.6},{},{:.6},{:.4},{:.6},{:.6},{},{}\n",
                    m.products,
                    m.budget,
                    m.t_rr,
                    m.z_rr,
                    m.e_r_rr_nominal,
                    m.t_dr,
                    m.z_dr,
                    ri,
                    m.r_dr_nominal,
                    m.t_n,
                    m.z_n,
                    m.z_n_wc,
                    m.certified,
                    row.status
                ));
            }
            None => {
                let (products, budget) = row.group.unwrap_or((0, 0.0));
                csv.push_str(&format!(
                    "{products},{budget},,,,,,,,,,,,{}\n",
                    row.status.replace(',', ";")
                ));
            }
        }
    }
    csv
}

/// Result of evaluating a stored policy against an uncertainty set.
#[derive(Debug, Clone)]
pub struct PolicyEvaluation {
    pub worst_case: f64,
    pub u_star: Scenario,
    pub nominal_expected: f64,
    pub certified: bool,
}

/// Worst case of `policy` over `set`, plus its nominal expected revenue.
pub fn evaluate_policy(
    instance: &Instance,
    set: &UncertaintySet,
    policy: &RandomizedPolicy,
) -> Result<PolicyEvaluation> {
    policy
        .validate(instance)
        .map_err(|e| Error::SupportMismatch(e.to_string()))?;
    let nominal_expected =
        policy.expected_revenue(instance, &Scenario::new(instance.u0.clone()))?;
    let (worst_case, u_star, certified) = match set {
        UncertaintySet::L1(l1) => {
            let wc = worst_case_convex(instance, policy, l1, 1e-8, 4000)?;
            (wc.value, Scenario::new(wc.u_star), wc.converged)
        }
        UncertaintySet::Budget(b) => {
            let finite = FiniteSet::Budget(b);
            let wc =
                worst_case_discrete(instance, policy, &finite, discrete_wc_method(&finite))?;
            (wc.value, wc.scenario, wc.certified)
        }
        UncertaintySet::Explicit(e) => {
            let finite = FiniteSet::Explicit(e);
            let wc = worst_case_discrete(instance, policy, &finite, DiscreteMethod::enumerate())?;
            (wc.value, wc.scenario, wc.certified)
        }
    };
    Ok(PolicyEvaluation {
        worst_case,
        u_star,
        nominal_expected,
        certified,
    })
}
