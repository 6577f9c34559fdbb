//! Double column generation for finite price and uncertainty sets.
//!
//! The randomized pricing problem over finite sets is a matrix game, but the
//! payoff matrix (all price vectors against all uncertainty realizations) is
//! far too large to build. The solver therefore alternates between:
//!
//! * a restricted primal pass growing the scenario pool: solve the game on
//!   the current price pool exactly via delayed constraint generation, where
//!   the separation oracle is the discrete worst case of the current policy
//!   (its value is a lower bound on the full game value), and
//! * a restricted dual pass growing the price pool: the mirror image, with
//!   mixture pricing as the separation oracle (its value is an upper bound).
//!
//! The loop stops when the two bounds meet. `full_matrix_lp_oracle` builds
//! the whole payoff matrix and solves the game in one LP; it exists as the
//! ground truth for small instances and for policy recovery elsewhere.

use crate::demand::{revenue_at, Instance, PriceVector};
use crate::lp::{solve_lp, solve_zero_sum_game, LinearProgram, LpStatus, Relation, Sense};
use crate::oracles::{
    for_each_price_vector, mixture_price_opt, nominal_price_opt, worst_case_discrete,
    DiscreteMethod, PricingMethod, RandomizedPolicy,
};
use crate::rng::SplitMix64;
use crate::uncertainty::{FiniteSet, Scenario};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Cap on full payoff matrices (`|prices| * |scenarios|`).
pub const MATRIX_CAP: u128 = 10_000_000;

/// A finitely supported distribution over uncertainty realizations: the
/// adversary's side of the matrix game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualDistribution {
    pub support: Vec<(Scenario, f64)>,
}

impl DualDistribution {
    pub fn normalized(mut self) -> Self {
        self.support.retain(|(_, w)| *w > 1e-12);
        let total: f64 = self.support.iter().map(|(_, w)| w).sum();
        if total > 0.0 {
            for (_, w) in &mut self.support {
                *w /= total;
            }
        }
        self
    }
}

fn scenario_revenue(instance: &Instance, prices: &[f64], s: &Scenario) -> Result<f64> {
    revenue_at(s.family_or(instance.family), prices, &s.params)
}

fn scenario_key(s: &Scenario) -> (Vec<u64>, u8) {
    let fam = match s.family {
        None => 0u8,
        Some(crate::demand::DemandFamily::Linear) => 1,
        Some(crate::demand::DemandFamily::SemiLog) => 2,
        Some(crate::demand::DemandFamily::LogLog) => 3,
    };
    (
        s.params.flatten().iter().map(|v| v.to_bits()).collect(),
        fam,
    )
}

/// Outcome of one restricted-primal pass.
#[derive(Debug, Clone)]
pub struct PrimalCgResult {
    pub z_p: f64,
    pub scenarios_out: Vec<Scenario>,
    pub policy: RandomizedPolicy,
    /// False when the separation oracle was heuristic.
    pub certified: bool,
    pub cuts_added: usize,
}

/// Solve `max_{pi on price_pool} min_{u in set}` by delayed constraint
/// generation over scenarios, starting from `init_scenarios`.
pub fn primal_cg(
    instance: &Instance,
    price_pool: &[PriceVector],
    set: &FiniteSet,
    init_scenarios: &[Scenario],
    sep_method: DiscreteMethod,
    eps_sep: f64,
) -> Result<PrimalCgResult> {
    if price_pool.is_empty() {
        return Err(Error::EmptyInput("primal_cg price pool"));
    }
    if init_scenarios.is_empty() {
        return Err(Error::EmptyInput("primal_cg initial scenarios"));
    }
    let price_values: Vec<Vec<f64>> = price_pool
        .iter()
        .map(|p| instance.prices(p))
        .collect::<Result<_>>()?;
    let mut pool: Vec<Scenario> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for s in init_scenarios {
        if seen.insert(scenario_key(s)) {
            pool.push(s.clone());
        }
    }
    let certified = matches!(sep_method, DiscreteMethod::Enumerate { .. });
    let mut cuts_added = 0usize;
    loop {
        // Restricted game: variables (t, pi).
        let k = price_pool.len();
        let mut obj = vec![0.0; k + 1];
        obj[0] = 1.0;
        let mut lp = LinearProgram::new(Sense::Max, obj);
        lp.free_var(0);
        for s in &pool {
            let mut coeffs = vec![0.0; k + 1];
            coeffs[0] = 1.0;
            for (j, prices) in price_values.iter().enumerate() {
                coeffs[j + 1] = -scenario_revenue(instance, prices, s)?;
            }
            lp.push_row(coeffs, Relation::Le, 0.0);
        }
        let mut simplex = vec![1.0; k + 1];
        simplex[0] = 0.0;
        lp.push_row(simplex, Relation::Eq, 1.0);
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalFailure(format!(
                "restricted primal LP ended {:?}",
                sol.status
            )));
        }
        let t_star = sol.value;
        let policy = RandomizedPolicy {
            support: price_pool
                .iter()
                .cloned()
                .zip(sol.x[1..].iter().cloned())
                .collect(),
        }
        .normalized();

        let sep = worst_case_discrete(instance, &policy, set, sep_method)?;
        if t_star <= sep.value + eps_sep {
            return Ok(PrimalCgResult {
                z_p: t_star,
                scenarios_out: pool,
                policy,
                certified: certified && sep.certified,
                cuts_added,
            });
        }
        if !seen.insert(scenario_key(&sep.scenario)) {
            // The violating scenario is already in the pool: the violation
            // is numerical noise below eps_sep resolution. Stop.
            return Ok(PrimalCgResult {
                z_p: t_star,
                scenarios_out: pool,
                policy,
                certified: certified && sep.certified,
                cuts_added,
            });
        }
        pool.push(sep.scenario);
        cuts_added += 1;
    }
}

/// Outcome of one restricted-dual pass.
#[derive(Debug, Clone)]
pub struct DualCgResult {
    pub z_d: f64,
    pub prices_out: Vec<PriceVector>,
    pub dual: DualDistribution,
    pub certified: bool,
    pub cuts_added: usize,
}

/// Solve `min_{lambda on scenario_pool} max_{p in grid}` by delayed
/// constraint generation over price vectors, starting from `init_prices`.
pub fn dual_cg(
    instance: &Instance,
    scenario_pool: &[Scenario],
    init_prices: &[PriceVector],
    sep_method: PricingMethod,
    eps_sep: f64,
) -> Result<DualCgResult> {
    if scenario_pool.is_empty() {
        return Err(Error::EmptyInput("dual_cg scenario pool"));
    }
    if init_prices.is_empty() {
        return Err(Error::EmptyInput("dual_cg initial prices"));
    }
    let mut pool: Vec<PriceVector> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for p in init_prices {
        if seen.insert(p.levels.clone()) {
            pool.push(p.clone());
        }
    }
    let certified = !matches!(sep_method, PricingMethod::LocalSearch { .. });
    let mut cuts_added = 0usize;
    loop {
        // Restricted game: variables (rho, lambda).
        let k = scenario_pool.len();
        let mut obj = vec![0.0; k + 1];
        obj[0] = 1.0;
        let mut lp = LinearProgram::new(Sense::Min, obj);
        lp.free_var(0);
        for p in &pool {
            let prices = instance.prices(p)?;
            let mut coeffs = vec![0.0; k + 1];
            coeffs[0] = 1.0;
            for (j, s) in scenario_pool.iter().enumerate() {
                coeffs[j + 1] = -scenario_revenue(instance, &prices, s)?;
            }
            lp.push_row(coeffs, Relation::Ge, 0.0);
        }
        let mut simplex = vec![1.0; k + 1];
        simplex[0] = 0.0;
        lp.push_row(simplex, Relation::Eq, 1.0);
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalFailure(format!(
                "restricted dual LP ended {:?}",
                sol.status
            )));
        }
        let rho_star = sol.value;
        let weights: Vec<(f64, Scenario)> = scenario_pool
            .iter()
            .zip(sol.x[1..].iter())
            .map(|(s, &w)| (w.max(0.0), s.clone()))
            .collect();

        let sep = mixture_price_opt(instance, &weights, sep_method)?;
        if sep.value <= rho_star + eps_sep {
            let dual = DualDistribution {
                support: weights.into_iter().map(|(w, s)| (s, w)).collect(),
            }
            .normalized();
            return Ok(DualCgResult {
                z_d: rho_star,
                prices_out: pool,
                dual,
                certified: certified && sep.certified,
                cuts_added,
            });
        }
        if !seen.insert(sep.p_star.levels.clone()) {
            let dual = DualDistribution {
                support: weights.into_iter().map(|(w, s)| (s, w)).collect(),
            }
            .normalized();
            return Ok(DualCgResult {
                z_d: rho_star,
                prices_out: pool,
                dual,
                certified: certified && sep.certified,
                cuts_added,
            });
        }
        pool.push(sep.p_star);
        cuts_added += 1;
    }
}

/// Configuration for [`solve_double_cg`].
#[derive(Debug, Clone)]
pub struct DoubleCgConfig {
    /// Relative termination gap on `ub - lb`.
    pub eps: f64,
    pub max_outer: usize,
    /// Separation method for the primal (worst-case) side.
    pub primal_sep: DiscreteMethod,
    /// Separation method for the dual (pricing) side.
    pub dual_sep: PricingMethod,
    /// Seed price pool; defaults to the nominal-optimal price vector.
    pub init_prices: Option<Vec<PriceVector>>,
    /// Seed scenario pool; defaults to the nominal parameters (budget sets)
    /// or the first member (explicit sets).
    pub init_scenarios: Option<Vec<Scenario>>,
    pub time_limit: Option<Duration>,
}

impl Default for DoubleCgConfig {
    fn default() -> Self {
        DoubleCgConfig {
            eps: 1e-6,
            max_outer: 100,
            primal_sep: DiscreteMethod::enumerate(),
            dual_sep: PricingMethod::Enumerate,
            init_prices: None,
            init_scenarios: None,
            time_limit: None,
        }
    }
}

/// Result of the double column generation solve.
#[derive(Debug, Clone)]
pub struct DoubleCgReport {
    /// Restricted-primal value: a lower bound on the game value.
    pub lb: f64,
    /// Restricted-dual value: an upper bound on the game value.
    pub ub: f64,
    pub policy: RandomizedPolicy,
    pub dual: DualDistribution,
    pub price_pool: Vec<PriceVector>,
    pub scenario_pool: Vec<Scenario>,
    pub outer_iterations: usize,
    pub primal_cuts: usize,
    pub dual_cuts: usize,
    /// True when every separation was exact and the gap closed.
    pub certified: bool,
    pub status: crate::convex::SolveStatus,
    pub wall_time: Duration,
    pub trace: Vec<crate::convex::IterTrace>,
}

/// Solve the randomized robust pricing problem over a finite uncertainty
/// set by alternating restricted primal and dual passes.
pub fn solve_double_cg(
    instance: &Instance,
    set: &FiniteSet,
    config: &DoubleCgConfig,
) -> Result<DoubleCgReport> {
    let start = Instant::now();
    let eps_sep = config.eps / 10.0;

    let mut price_pool: Vec<PriceVector> = match &config.init_prices {
        Some(p) if !p.is_empty() => p.clone(),
        _ => {
            let nominal = nominal_price_opt(instance, &instance.u0, config.dual_sep)?;
            vec![nominal.p_star]
        }
    };
    let mut scenario_pool: Vec<Scenario> = match &config.init_scenarios {
        Some(s) if !s.is_empty() => s.clone(),
        _ => vec![set.seed_member()],
    };

    let mut lb = f64::NEG_INFINITY;
    let mut ub = f64::INFINITY;
    let mut policy = RandomizedPolicy::point_mass(price_pool[0].clone());
    let mut dual = DualDistribution {
        support: vec![(scenario_pool[0].clone(), 1.0)],
    };
    let mut certified = true;
    let mut primal_cuts = 0;
    let mut dual_cuts = 0;
    let mut outer = 0;
    let mut status = crate::convex::SolveStatus::IterationLimit;
    let mut trace = Vec::new();

    while outer < config.max_outer {
        outer += 1;
        let primal = primal_cg(
            instance,
            &price_pool,
            set,
            &scenario_pool,
            config.primal_sep,
            eps_sep,
        )?;
        scenario_pool = primal.scenarios_out;
        lb = primal.z_p;
        policy = primal.policy;
        certified &= primal.certified;
        primal_cuts += primal.cuts_added;

        let dual_pass = dual_cg(
            instance,
            &scenario_pool,
            &price_pool,
            config.dual_sep,
            eps_sep,
        )?;
        price_pool = dual_pass.prices_out;
        ub = dual_pass.z_d;
        dual = dual_pass.dual;
        certified &= dual_pass.certified;
        dual_cuts += dual_pass.cuts_added;

        trace.push(crate::convex::IterTrace {
            iteration: outer,
            lower: lb,
            upper: ub,
        });
        if ub - lb <= config.eps * ub.abs().max(1.0) {
            status = crate::convex::SolveStatus::Converged;
            break;
        }
        if let Some(limit) = config.time_limit {
            if start.elapsed() > limit {
                status = crate::convex::SolveStatus::TimeLimit;
                break;
            }
        }
    }

    Ok(DoubleCgReport {
        lb,
        ub,
        policy,
        dual,
        price_pool,
        scenario_pool,
        outer_iterations: outer,
        primal_cuts,
        dual_cuts,
        certified: certified && status == crate::convex::SolveStatus::Converged,
        status,
        wall_time: start.elapsed(),
        trace,
    })
}

/// Ground-truth matrix game: build the full `|prices| x |scenarios|` payoff
/// matrix and solve it as a single LP.
pub fn full_matrix_lp_oracle(
    instance: &Instance,
    prices: &[PriceVector],
    scenarios: &[Scenario],
) -> Result<(f64, RandomizedPolicy, DualDistribution)> {
    let required = prices.len() as u128 * scenarios.len() as u128;
    if required > MATRIX_CAP {
        return Err(Error::CapExceeded {
            required,
            cap: MATRIX_CAP,
        });
    }
    if prices.is_empty() || scenarios.is_empty() {
        return Err(Error::EmptyInput("full_matrix_lp_oracle pools"));
    }
    let mut payoff = Vec::with_capacity(prices.len());
    for p in prices {
        let pv = instance.prices(p)?;
        let row: Vec<f64> = scenarios
            .iter()
            .map(|s| scenario_revenue(instance, &pv, s))
            .collect::<Result<_>>()?;
        payoff.push(row);
    }
    let game = solve_zero_sum_game(&payoff)?;
    let policy = RandomizedPolicy {
        support: prices
            .iter()
            .cloned()
            .zip(game.row_mixture.iter().cloned())
            .collect(),
    }
    .normalized();
    let dual = DualDistribution {
        support: scenarios
            .iter()
            .cloned()
            .zip(game.col_mixture.iter().cloned())
            .collect(),
    }
    .normalized();
    Ok((game.value, policy, dual))
}

/// Result of the discrete deterministic robust solve.
#[derive(Debug, Clone)]
pub struct DrpoDiscreteResult {
    pub p_dr: PriceVector,
    pub z_dr: f64,
    pub u_wc: Scenario,
    pub certified: bool,
    pub wall_time: Duration,
}

/// Maximize `min_{u in set} R(p, u)` over single price vectors.
///
/// `price_method` drives the outer search (`Enumerate` exact,
/// `ExtremeLogLog` an extreme-vertex restriction, `LocalSearch` the sweep
/// heuristic); `wc_method` drives the inner worst case.
pub fn drpo_discrete(
    instance: &Instance,
    set: &FiniteSet,
    price_method: PricingMethod,
    wc_method: DiscreteMethod,
) -> Result<DrpoDiscreteResult> {
    let start = Instant::now();
    let inner_enumerate = matches!(wc_method, DiscreteMethod::Enumerate { .. })
        || matches!(set, FiniteSet::Explicit(_));
    // Pre-enumerate the members once when the inner solve is exhaustive.
    let members: Option<Vec<(Scenario, Vec<f64>)>> = if inner_enumerate {
        let cap = match wc_method {
            DiscreteMethod::Enumerate { cap } => cap as u128,
            _ => crate::oracles::SET_ENUM_CAP,
        };
        Some(
            set.enumerate(cap)?
                .into_iter()
                .map(|s| (s.clone(), Vec::new()))
                .collect(),
        )
    } else {
        None
    };

    // Inner worst case at resolved prices, abandoning early once the
    // running minimum falls strictly below `abandon_below`.
    let inner = |levels: &[usize],
                 prices: &[f64],
                 abandon_below: Option<f64>|
     -> Result<Option<(f64, Scenario)>> {
        if let Some(members) = &members {
            let mut best: Option<(f64, usize)> = None;
            for (k, (s, _)) in members.iter().enumerate() {
                let v = scenario_revenue(instance, prices, s)?;
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, k));
                }
                if let Some(threshold) = abandon_below {
                    if best.expect("just set").0 < threshold {
                        return Ok(None);
                    }
                }
            }
            let (v, k) = best.expect("nonempty set");
            Ok(Some((v, members[k].0.clone())))
        } else {
            let policy = RandomizedPolicy::point_mass(PriceVector::new(levels.to_vec()));
            let wc = worst_case_discrete(instance, &policy, set, wc_method)?;
            Ok(Some((wc.value, wc.scenario)))
        }
    };

    match price_method {
        PricingMethod::Enumerate | PricingMethod::ExtremeLogLog => {
            let extremes = price_method == PricingMethod::ExtremeLogLog;
            if extremes && instance.family != crate::demand::DemandFamily::LogLog {
                return Err(Error::MethodFamilyMismatch {
                    method: "ExtremeLogLog".into(),
                    family: instance.family.to_string(),
                });
            }
            let count = crate::oracles::enumerate_price_count(instance, extremes);
            if count > crate::oracles::PRICE_ENUM_CAP {
                return Err(Error::CapExceeded {
                    required: count,
                    cap: crate::oracles::PRICE_ENUM_CAP,
                });
            }
            let mut best: Option<(Vec<usize>, f64, Scenario)> = None;
            for_each_price_vector(instance, extremes, |levels, prices| {
                let abandon = best.as_ref().map(|(_, v, _)| *v);
                if let Some((v, s)) = inner(levels, prices, abandon)? {
                    if best.as_ref().is_none_or(|(_, bv, _)| v > *bv) {
                        best = Some((levels.to_vec(), v, s));
                    }
                }
                Ok(())
            })?;
            let (levels, z_dr, u_wc) = best.ok_or(Error::EmptyInput("no price candidates"))?;
            Ok(DrpoDiscreteResult {
                p_dr: PriceVector::new(levels),
                z_dr,
                u_wc,
                certified: inner_enumerate && !extremes,
                wall_time: start.elapsed(),
            })
        }
        PricingMethod::LocalSearch { restarts, seed } => {
            let mut master = SplitMix64::new(seed);
            let mut best: Option<(Vec<usize>, f64, Scenario)> = None;
            for _ in 0..restarts.max(1) {
                let mut rng = master.split();
                let mut levels: Vec<usize> = instance
                    .grids
                    .iter()
                    .map(|g| rng.index(g.len()))
                    .collect();
                let mut prices: Vec<f64> = levels
                    .iter()
                    .zip(&instance.grids)
                    .map(|(&l, g)| g[l])
                    .collect();
                let mut current = inner(&levels, &prices, None)?.expect("unpruned");
                loop {
                    let mut improved = false;
                    for i in 0..instance.products() {
                        let hold = levels[i];
                        let mut best_level = hold;
                        let mut best_val = current.clone();
                        for (lvl, &price) in instance.grids[i].iter().enumerate() {
                            if lvl == hold {
                                continue;
                            }
                            levels[i] = lvl;
                            prices[i] = price;
                            if let Some(v) = inner(&levels, &prices, Some(best_val.0))? {
                                if v.0 > best_val.0 {
                                    best_val = v;
                                    best_level = lvl;
                                }
                            }
                        }
                        levels[i] = best_level;
                        prices[i] = instance.grids[i][best_level];
                        if best_level != hold {
                            current = best_val;
                            improved = true;
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                let better = match &best {
                    None => true,
                    Some((bl, bv, _)) => current.0 > *bv || (current.0 == *bv && levels < *bl),
                };
                if better {
                    best = Some((levels, current.0, current.1));
                }
            }
            let (levels, z_dr, u_wc) = best.ok_or(Error::EmptyInput("no price candidates"))?;
            Ok(DrpoDiscreteResult {
                p_dr: PriceVector::new(levels),
                z_dr,
                u_wc,
                certified: false,
                wall_time: start.elapsed(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::{DemandFamily, ParamVector};
    use crate::uncertainty::{DiscreteBudgetSet, ExplicitSet};

    /// Two linear scenarios on P = {5, 10}: payoff [[25, 15], [0, 20]],
    /// game value 50/3 at pi = (2/3, 1/3).
    fn example_two() -> (Instance, ExplicitSet) {
        let u1 = ParamVector::single(10.0, 1.0);
        let u2 = ParamVector::single(4.0, 0.2);
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![5.0, 10.0]],
            u1.clone(),
        )
        .unwrap();
        let set =
            ExplicitSet::new(vec![Scenario::new(u1), Scenario::new(u2)]).unwrap();
        (inst, set)
    }

    /// Single-product linear with three scenarios on P = {5, 8, 9}: payoff
    /// [[25, 12.5, 13], [16, 17.6, 16], [9, 18.9, 16.2]], value 16 with no
    /// benefit from randomization.
    fn counterexample() -> (Instance, ExplicitSet) {
        let scenarios = vec![
            Scenario::new(ParamVector::single(10.0, 1.0)),
            Scenario::new(ParamVector::single(3.0, 0.1)),
            Scenario::new(ParamVector::single(3.6, 0.2)),
        ];
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![5.0, 8.0, 9.0]],
            ParamVector::single(10.0, 1.0),
        )
        .unwrap();
        (inst, ExplicitSet::new(scenarios).unwrap())
    }

    #[test]
    fn oracle_example_two() {
        let (inst, set) = example_two();
        let prices = vec![PriceVector::new(vec![0]), PriceVector::new(vec![1])];
        let (value, policy, dual) =
            full_matrix_lp_oracle(&inst, &prices, &set.members).unwrap();
        assert!((value - 50.0 / 3.0).abs() < 1e-9);
        assert!((policy.support[0].1 - 2.0 / 3.0).abs() < 1e-9);
        assert!((policy.support[1].1 - 1.0 / 3.0).abs() < 1e-9);
        let weights: Vec<f64> = dual.support.iter().map(|(_, w)| *w).collect();
        assert!((weights[0] - 1.0 / 6.0).abs() < 1e-8);
        assert!((weights[1] - 5.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn oracle_counterexample_value() {
        let (inst, set) = counterexample();
        let prices: Vec<PriceVector> = (0..3).map(|i| PriceVector::new(vec![i])).collect();
        let (value, _, _) = full_matrix_lp_oracle(&inst, &prices, &set.members).unwrap();
        assert!((value - 16.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_one_by_one() {
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![2.0]],
            ParamVector::single(5.0, 1.0),
        )
        .unwrap();
        let prices = vec![PriceVector::new(vec![0])];
        let scenarios = vec![Scenario::new(ParamVector::single(5.0, 1.0))];
        let (value, policy, _) = full_matrix_lp_oracle(&inst, &prices, &scenarios).unwrap();
        assert!((value - 6.0).abs() < 1e-12);
        assert_eq!(policy.support.len(), 1);
    }

    #[test]
    fn primal_cg_example_two() {
        let (inst, set) = example_two();
        let pool = vec![PriceVector::new(vec![0]), PriceVector::new(vec![1])];
        let init = vec![set.members[0].clone()];
        let result = primal_cg(
            &inst,
            &pool,
            &FiniteSet::Explicit(&set),
            &init,
            DiscreteMethod::enumerate(),
            1e-9,
        )
        .unwrap();
        assert!((result.z_p - 50.0 / 3.0).abs() < 1e-9);
        assert_eq!(result.scenarios_out.len(), 2);
        let probs: Vec<f64> = result.policy.support.iter().map(|(_, w)| *w).collect();
        assert!((probs[0] - 2.0 / 3.0).abs() < 1e-9);
        assert!((probs[1] - 1.0 / 3.0).abs() < 1e-9);
        assert!(result.certified);
    }

    #[test]
    fn primal_cg_singleton_set() {
        let (inst, _) = example_two();
        let u = Scenario::new(ParamVector::single(10.0, 1.0));
        let set = ExplicitSet::new(vec![u.clone()]).unwrap();
        let pool = vec![PriceVector::new(vec![0]), PriceVector::new(vec![1])];
        let result = primal_cg(
            &inst,
            &pool,
            &FiniteSet::Explicit(&set),
            &[u],
            DiscreteMethod::enumerate(),
            1e-9,
        )
        .unwrap();
        // Best response to the single scenario: point mass on p = 5.
        assert!((result.z_p - 25.0).abs() < 1e-9);
        assert_eq!(result.policy.support.len(), 1);
        assert_eq!(result.policy.support[0].0.levels, vec![0]);
    }

    #[test]
    fn dual_cg_example_two() {
        let (inst, set) = example_two();
        let init = vec![PriceVector::new(vec![0])];
        let result = dual_cg(
            &inst,
            &set.members,
            &init,
            PricingMethod::Enumerate,
            1e-9,
        )
        .unwrap();
        assert!((result.z_d - 50.0 / 3.0).abs() < 1e-9);
        assert_eq!(result.prices_out.len(), 2);
        let weights: Vec<f64> = result.dual.support.iter().map(|(_, w)| *w).collect();
        assert!((weights[0] - 1.0 / 6.0).abs() < 1e-8);
        assert!((weights[1] - 5.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn double_cg_example_two() {
        let (inst, set) = example_two();
        let report = solve_double_cg(
            &inst,
            &FiniteSet::Explicit(&set),
            &DoubleCgConfig::default(),
        )
        .unwrap();
        assert!(report.certified);
        assert!((report.lb - 50.0 / 3.0).abs() < 1e-9);
        assert!((report.ub - 50.0 / 3.0).abs() < 1e-9);
        let probs: Vec<f64> = report.policy.support.iter().map(|(_, w)| *w).collect();
        assert!((probs[0] - 2.0 / 3.0).abs() < 1e-9);
        assert!((probs[1] - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn double_cg_counterexample() {
        let (inst, set) = counterexample();
        let report = solve_double_cg(
            &inst,
            &FiniteSet::Explicit(&set),
            &DoubleCgConfig::default(),
        )
        .unwrap();
        assert!(report.certified);
        assert!((report.lb - 16.0).abs() < 1e-9);
        assert!((report.ub - 16.0).abs() < 1e-9);
    }

    #[test]
    fn double_cg_bounds_are_monotone() {
        let (inst, set) = counterexample();
        let report = solve_double_cg(
            &inst,
            &FiniteSet::Explicit(&set),
            &DoubleCgConfig::default(),
        )
        .unwrap();
        for w in report.trace.windows(2) {
            assert!(w[1].lower >= w[0].lower - 1e-9);
            assert!(w[1].upper <= w[0].upper + 1e-9);
        }
        for t in &report.trace {
            assert!(t.lower <= t.upper + 1e-9);
        }
    }

    #[test]
    fn drpo_discrete_example_two() {
        let (inst, set) = example_two();
        let result = drpo_discrete(
            &inst,
            &FiniteSet::Explicit(&set),
            PricingMethod::Enumerate,
            DiscreteMethod::enumerate(),
        )
        .unwrap();
        assert_eq!(result.p_dr.levels, vec![0]);
        assert!((result.z_dr - 15.0).abs() < 1e-12);
        assert!(result.certified);
    }

    #[test]
    fn drpo_discrete_counterexample() {
        let (inst, set) = counterexample();
        let result = drpo_discrete(
            &inst,
            &FiniteSet::Explicit(&set),
            PricingMethod::Enumerate,
            DiscreteMethod::enumerate(),
        )
        .unwrap();
        assert_eq!(result.p_dr.levels, vec![1]); // p = 8
        assert!((result.z_dr - 16.0).abs() < 1e-12);
    }

    #[test]
    fn drpo_discrete_gamma_zero_budget() {
        let u0 = ParamVector::single(10.0, 2.0);
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]],
            u0.clone(),
        )
        .unwrap();
        let set = DiscreteBudgetSet::from_multipliers(0, u0, 0.7, 1.3).unwrap();
        let result = drpo_discrete(
            &inst,
            &FiniteSet::Budget(&set),
            PricingMethod::Enumerate,
            DiscreteMethod::enumerate(),
        )
        .unwrap();
        assert_eq!(result.p_dr.levels, vec![1]);
        assert!((result.z_dr - 12.0).abs() < 1e-12);
    }

    #[test]
    fn double_cg_matches_oracle_on_random_instances() {
        let mut rng = SplitMix64::new(20240817);
        for trial in 0..50 {
            let family = match trial % 3 {
                0 => DemandFamily::Linear,
                1 => DemandFamily::SemiLog,
                _ => DemandFamily::LogLog,
            };
            let n = 1 + rng.index(3);
            let mut gamma = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        gamma[i][j] = rng.uniform(-0.3, 0.3);
                    }
                }
            }
            let scale = if family == DemandFamily::Linear { 8.0 } else { 1.0 };
            let u0 = ParamVector::new(
                (0..n).map(|_| rng.uniform(1.0, 3.0) * scale).collect(),
                (0..n).map(|_| rng.uniform(0.3, 1.2)).collect(),
                gamma,
            )
            .unwrap();
            let grids: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let m = 2 + rng.index(2);
                    (0..m).map(|k| 1.0 + k as f64).collect()
                })
                .collect();
            let inst = Instance::new(family, grids, u0.clone()).unwrap();
            let members: Vec<Scenario> = (0..(2 + rng.index(11)))
                .map(|_| {
                    let mut flat = u0.flatten();
                    for v in flat.iter_mut() {
                        *v *= rng.uniform(0.6, 1.4);
                    }
                    Scenario::new(ParamVector::unflatten(n, &flat).unwrap())
                })
                .collect();
            let set = ExplicitSet::new(members).unwrap();

            let report = solve_double_cg(
                &inst,
                &FiniteSet::Explicit(&set),
                &DoubleCgConfig::default(),
            )
            .unwrap();
            assert!(report.certified, "trial {trial} did not converge");

            let mut all_prices = Vec::new();
            for_each_price_vector(&inst, false, |levels, _| {
                all_prices.push(PriceVector::new(levels.to_vec()));
                Ok(())
            })
            .unwrap();
            let (value, _, _) = full_matrix_lp_oracle(&inst, &all_prices, &set.members).unwrap();
            assert!(
                (report.ub - value).abs() <= 1e-7 * value.abs().max(1.0),
                "trial {trial}: double CG {} vs oracle {}",
                report.ub,
                value
            );
        }
    }
}
