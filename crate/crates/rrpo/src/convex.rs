//! RRPO and DRPO solvers for a finite price grid and a convex L1
//! uncertainty set.
//!
//! The randomized problem is solved through its minimax form
//! `min_{u in U} max_{p in P} R(p, u)`: Kelley's cutting-plane method runs
//! on the convex function `phi(u) = max_p R(p, u)`, where each evaluation of
//! `phi` is one call to the pricing oracle and each oracle answer
//! contributes a linearization of `R(p_k, .)` at the current iterate. The
//! randomized policy falls out of the optimal duals of the cut rows,
//! aggregated by originating price vector, and is always re-validated by an
//! independent worst-case solve; if simplex degeneracy makes the duals
//! unusable, the policy is recomputed from the restricted matrix game over
//! the generated price vectors and visited parameter points.
//!
//! The deterministic problem maximizes the per-price worst case over the
//! grid. Candidates are screened cheapest-first: the nominal revenue and a
//! one-coordinate deviation already bound the worst case from above, so
//! most candidates are discarded without touching the cutting-plane solver.

use crate::demand::{
    revenue_at, revenue_gradient_at, DemandFamily, Instance, ParamVector, PriceVector,
};
use crate::lp::{solve_lp, solve_zero_sum_game, LinearProgram, LpStatus, Relation, Sense};
use crate::oracles::{
    nominal_price_opt, worst_case_convex, worst_case_convex_pruned, PricingMethod,
    RandomizedPolicy,
};
use crate::rng::SplitMix64;
use crate::uncertainty::{L1Set, Scenario};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

/// Why a solve stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    TimeLimit,
}

/// One outer iteration of a bounding solve, for reporting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterTrace {
    pub iteration: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Configuration for [`solve_rrpo_convex`].
#[derive(Debug, Clone)]
pub struct RrpoConvexConfig {
    /// Relative termination gap.
    pub eps: f64,
    pub max_iter: usize,
    pub pricing: PricingMethod,
    pub time_limit: Option<Duration>,
}

impl Default for RrpoConvexConfig {
    fn default() -> Self {
        RrpoConvexConfig {
            eps: 1e-6,
            max_iter: 500,
            pricing: PricingMethod::Enumerate,
            time_limit: None,
        }
    }
}

/// Result of the randomized solve over a convex set.
#[derive(Debug, Clone)]
pub struct ConvexSolveReport {
    /// Certified bracket on the optimal worst-case expected revenue.
    pub z_rr_lower: f64,
    pub z_rr_upper: f64,
    pub policy: RandomizedPolicy,
    /// Minimizer of `min_u max_p R(p, u)` found by the cut loop.
    pub u_star: ParamVector,
    /// Independently recomputed worst case of `policy`.
    pub policy_worst_case: f64,
    pub iterations: usize,
    pub cuts: usize,
    pub prices_generated: usize,
    pub status: SolveStatus,
    /// False when the pricing oracle was heuristic.
    pub certified: bool,
    pub wall_time: Duration,
    pub trace: Vec<IterTrace>,
}

fn f64_key(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Solve the randomized robust pricing problem over an L1 set.
pub fn solve_rrpo_convex(
    instance: &Instance,
    set: &L1Set,
    config: &RrpoConvexConfig,
) -> Result<ConvexSolveReport> {
    let start = Instant::now();
    if set.dim() != instance.param_dim() {
        return Err(Error::DimensionMismatch {
            context: "solve_rrpo_convex set",
            expected: instance.param_dim(),
            actual: set.dim(),
        });
    }
    let d = set.dim();
    let certified_oracle = !matches!(config.pricing, PricingMethod::LocalSearch { .. });

    // Trivial set: the problem is the nominal pricing problem.
    if set.theta == 0.0 {
        let best = nominal_price_opt(instance, &set.u0, config.pricing)?;
        let policy = RandomizedPolicy::point_mass(best.p_star);
        return Ok(ConvexSolveReport {
            z_rr_lower: best.value,
            z_rr_upper: best.value,
            policy_worst_case: best.value,
            policy,
            u_star: set.u0.clone(),
            iterations: 0,
            cuts: 0,
            prices_generated: 1,
            status: SolveStatus::Converged,
            certified: best.certified,
            wall_time: start.elapsed(),
            trace: Vec::new(),
        });
    }

    // Master LP: variables u_1..u_d, s_1..s_d, t; min t subject to the L1
    // block and one row per cut `t >= R(p_k, u_k) + g_k . (u - u_k)`.
    let block = set.linear_constraint_block();
    let n_vars = 2 * d + 1;
    let t_col = 2 * d;
    let mut obj = vec![0.0; n_vars];
    obj[t_col] = 1.0;
    let mut master = LinearProgram::new(Sense::Min, obj);
    master.free_var(t_col);
    block.install(&mut master, n_vars);
    let block_rows = master.rows.len();

    // Cut bookkeeping: which price vector produced each cut row, plus a
    // dedup set on (levels, linearization point).
    let mut cut_price: Vec<usize> = Vec::new();
    let mut price_pool: Vec<PriceVector> = Vec::new();
    let mut price_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut seen_cuts: HashSet<(Vec<usize>, Vec<u64>)> = HashSet::new();
    let mut visited_u: Vec<ParamVector> = Vec::new();

    let mut u_current = set.u0.clone();
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut best_u = set.u0.clone();
    let mut status = SolveStatus::IterationLimit;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut final_duals: Vec<f64> = Vec::new();

    while iterations < config.max_iter {
        iterations += 1;
        visited_u.push(u_current.clone());

        // Separation: best-response price vectors at the current iterate.
        // The top responses beyond the maximizer are valid cuts too and
        // save master iterations, so exhaustive oracles return a few.
        let responses = best_responses(instance, &u_current, config.pricing, 4)?;
        let top_value = responses[0].1;
        if top_value < upper {
            upper = top_value;
            best_u = u_current.clone();
        }

        let uf = u_current.flatten();
        for (p_star, value) in &responses {
            let key = (p_star.levels.clone(), f64_key(&uf));
            if seen_cuts.insert(key) {
                let prices = instance.prices(p_star)?;
                let g = revenue_gradient_at(instance.family, &prices, &u_current)?;
                let g_dot_u: f64 = g.iter().zip(&uf).map(|(a, b)| a * b).sum();
                // t - g.u >= value - g.u_k
                let mut coeffs = vec![0.0; n_vars];
                for (c, gi) in coeffs.iter_mut().zip(&g) {
                    *c = -gi;
                }
                coeffs[t_col] = 1.0;
                master.push_row(coeffs, Relation::Ge, value - g_dot_u);
                let idx = *price_index.entry(p_star.levels.clone()).or_insert_with(|| {
                    price_pool.push(p_star.clone());
                    price_pool.len() - 1
                });
                cut_price.push(idx);
            }
        }

        let sol = solve_lp(&master)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalFailure(format!(
                "RRPO master not optimal: {:?}",
                sol.status
            )));
        }
        lower = lower.max(sol.value);
        trace.push(IterTrace {
            iteration: iterations,
            lower,
            upper,
        });
        final_duals = sol.duals.clone();

        let gap = upper - lower;
        if gap <= config.eps * upper.abs().max(1.0) {
            status = SolveStatus::Converged;
            break;
        }
        if let Some(limit) = config.time_limit {
            if start.elapsed() > limit {
                status = SolveStatus::TimeLimit;
                break;
            }
        }
        u_current = ParamVector::unflatten(instance.products(), &sol.x[..d])?;
    }

    // Policy recovery from the duals of the cut rows, aggregated by price.
    let mut weights = vec![0.0; price_pool.len()];
    for (j, &pi) in cut_price.iter().enumerate() {
        let row = block_rows + j;
        if row < final_duals.len() {
            weights[pi] += final_duals[row].max(0.0);
        }
    }
    let policy = RandomizedPolicy {
        support: price_pool
            .iter()
            .cloned()
            .zip(weights.iter().cloned())
            .collect(),
    }
    .normalized();

    // Independent validation; on a miss, rebuild the policy from the
    // restricted matrix game over generated prices and visited scenarios.
    let inner_tol = (config.eps / 10.0).max(1e-12);
    let scale = upper.abs().max(1.0);
    let (policy, policy_wc) = {
        let validated = if policy.support.is_empty() {
            None
        } else {
            let wc = worst_case_convex(instance, &policy, set, inner_tol, 4 * config.max_iter)?;
            let ok = wc.value >= lower - config.eps * scale - wc.gap
                && wc.value <= upper + config.eps * scale;
            if ok {
                Some((policy.clone(), wc.value))
            } else {
                None
            }
        };
        match validated {
            Some(v) => v,
            None => {
                let rebuilt = restricted_game_policy(instance, &price_pool, &visited_u, set)?;
                let wc =
                    worst_case_convex(instance, &rebuilt, set, inner_tol, 4 * config.max_iter)?;
                (rebuilt, wc.value)
            }
        }
    };

    Ok(ConvexSolveReport {
        z_rr_lower: lower,
        z_rr_upper: upper,
        policy,
        u_star: best_u,
        policy_worst_case: policy_wc,
        iterations,
        cuts: cut_price.len(),
        prices_generated: price_pool.len(),
        status,
        certified: certified_oracle && status == SolveStatus::Converged,
        wall_time: start.elapsed(),
        trace,
    })
}

/// The top `k` price vectors by revenue at `u`, best first, ties to the
/// lexicographically smaller level vector. Exhaustive methods return up to
/// `k`; local search returns its single incumbent.
fn best_responses(
    instance: &Instance,
    u: &ParamVector,
    pricing: PricingMethod,
    k: usize,
) -> Result<Vec<(PriceVector, f64)>> {
    match pricing {
        PricingMethod::LocalSearch { .. } => {
            let r = nominal_price_opt(instance, u, pricing)?;
            Ok(vec![(r.p_star, r.value)])
        }
        PricingMethod::Enumerate | PricingMethod::ExtremeLogLog => {
            if pricing == PricingMethod::ExtremeLogLog && instance.family != DemandFamily::LogLog
            {
                return Err(Error::MethodFamilyMismatch {
                    method: "ExtremeLogLog".into(),
                    family: instance.family.to_string(),
                });
            }
            let extremes = pricing == PricingMethod::ExtremeLogLog;
            let count = crate::oracles::enumerate_price_count(instance, extremes);
            if count > crate::oracles::PRICE_ENUM_CAP {
                return Err(Error::CapExceeded {
                    required: count,
                    cap: crate::oracles::PRICE_ENUM_CAP,
                });
            }
            let mut top: Vec<(Vec<usize>, f64)> = Vec::with_capacity(k + 1);
            crate::oracles::for_each_price_vector(instance, extremes, |levels, prices| {
                let v = revenue_at(instance.family, prices, u)?;
                if top.len() < k || v > top.last().expect("nonempty").1 {
                    let pos = top
                        .iter()
                        .position(|(tl, tv)| v > *tv || (v == *tv && levels < tl.as_slice()))
                        .unwrap_or(top.len());
                    top.insert(pos, (levels.to_vec(), v));
                    if top.len() > k {
                        top.pop();
                    }
                }
                Ok(())
            })?;
            Ok(top
                .into_iter()
                .map(|(levels, v)| (PriceVector::new(levels), v))
                .collect())
        }
    }
}

/// Max-min policy of the matrix game restricted to the generated price pool
/// and the parameter points visited by the cut loop (plus the ball center).
fn restricted_game_policy(
    instance: &Instance,
    price_pool: &[PriceVector],
    visited_u: &[ParamVector],
    set: &L1Set,
) -> Result<RandomizedPolicy> {
    if price_pool.is_empty() {
        return Err(Error::NumericalFailure(
            "no price vectors generated for policy recovery".into(),
        ));
    }
    let mut scenarios: Vec<ParamVector> = vec![set.u0.clone()];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(f64_key(&set.u0.flatten()));
    for u in visited_u {
        if seen.insert(f64_key(&u.flatten())) {
            scenarios.push(u.clone());
        }
    }
    let mut payoff = Vec::with_capacity(price_pool.len());
    for p in price_pool {
        let prices = instance.prices(p)?;
        let row: Vec<f64> = scenarios
            .iter()
            .map(|u| revenue_at(instance.family, &prices, u))
            .collect::<Result<_>>()?;
        payoff.push(row);
    }
    let game = solve_zero_sum_game(&payoff)?;
    Ok(RandomizedPolicy {
        support: price_pool
            .iter()
            .cloned()
            .zip(game.row_mixture.iter().cloned())
            .collect(),
    }
    .normalized())
}

/// Configuration for [`solve_drpo_convex`].
#[derive(Debug, Clone)]
pub struct DrpoConvexConfig {
    /// Relative tolerance for the inner worst-case solves.
    pub eps: f64,
    /// Iteration cap for each inner cutting-plane solve.
    pub max_inner_iter: usize,
    /// Outer search over price vectors. `Enumerate` is exact;
    /// `ExtremeLogLog` restricts to extreme price vectors (a heuristic for
    /// the max-min problem, so the result is flagged uncertified);
    /// `LocalSearch` is the coordinate-improvement heuristic.
    pub outer: PricingMethod,
    pub time_limit: Option<Duration>,
}

impl Default for DrpoConvexConfig {
    fn default() -> Self {
        DrpoConvexConfig {
            eps: 1e-6,
            max_inner_iter: 500,
            outer: PricingMethod::Enumerate,
            time_limit: None,
        }
    }
}

/// Result of the deterministic robust solve.
#[derive(Debug, Clone)]
pub struct DrpoResult {
    pub p_dr: PriceVector,
    pub z_dr: f64,
    pub u_wc: ParamVector,
    pub certified: bool,
    pub wall_time: Duration,
}

/// Cheap upper bound on `min_u R(p, u)` used to screen candidates: the
/// nominal value and the value at the strongest single-coordinate deviation
/// suggested by the gradient at the center.
fn cheap_upper_bound(
    instance: &Instance,
    prices: &[f64],
    set: &L1Set,
    nominal_value: f64,
) -> Result<f64> {
    if set.theta == 0.0 {
        return Ok(nominal_value);
    }
    let g = revenue_gradient_at(instance.family, prices, &instance.u0)?;
    let (u_dev, _) = set.linear_min(&g)?;
    let deviated = revenue_at(instance.family, prices, &u_dev)?;
    Ok(nominal_value.min(deviated))
}

/// Maximize the worst-case revenue over single price vectors.
pub fn solve_drpo_convex(
    instance: &Instance,
    set: &L1Set,
    config: &DrpoConvexConfig,
) -> Result<DrpoResult> {
    let start = Instant::now();
    match config.outer {
        PricingMethod::Enumerate | PricingMethod::ExtremeLogLog => {
            let extremes = config.outer == PricingMethod::ExtremeLogLog;
            if extremes && instance.family != DemandFamily::LogLog {
                return Err(Error::MethodFamilyMismatch {
                    method: "ExtremeLogLog".into(),
                    family: instance.family.to_string(),
                });
            }
            // Rank candidates by nominal revenue: the nominal value bounds
            // the worst case from above, so high-nominal candidates are the
            // plausible winners and the rest are screened away.
            let mut candidates = collect_candidates(instance, extremes)?;
            candidates.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.0.cmp(&b.0))
            });
            let mut best: Option<(Vec<usize>, f64, ParamVector)> = None;
            // Worst-case scenarios found for earlier candidates screen later
            // ones: any pooled scenario bounds a candidate's worst case from
            // above with one revenue evaluation.
            let mut scenario_pool: Vec<ParamVector> = Vec::new();
            for (levels, nominal) in candidates {
                if let Some((_, incumbent, _)) = &best {
                    if nominal <= *incumbent {
                        continue;
                    }
                    let prices = instance.prices(&PriceVector::new(levels.clone()))?;
                    let mut screen = nominal;
                    for u in &scenario_pool {
                        screen = screen.min(revenue_at(instance.family, &prices, u)?);
                        if screen <= *incumbent {
                            break;
                        }
                    }
                    if screen <= *incumbent {
                        continue;
                    }
                    if cheap_upper_bound(instance, &prices, set, nominal)? <= *incumbent {
                        continue;
                    }
                }
                if let Some(limit) = config.time_limit {
                    if start.elapsed() > limit {
                        break;
                    }
                }
                let policy = RandomizedPolicy::point_mass(PriceVector::new(levels.clone()));
                let abandon = best.as_ref().map(|(_, v, _)| *v);
                let wc = worst_case_convex_pruned(
                    instance,
                    &policy,
                    set,
                    config.eps,
                    config.max_inner_iter,
                    abandon,
                )?;
                scenario_pool.push(wc.u_star.clone());
                if scenario_pool.len() > 16 {
                    scenario_pool.remove(0);
                }
                if !wc.converged {
                    continue; // abandoned: provably below the incumbent
                }
                let better = match &best {
                    None => true,
                    Some((bl, bv, _)) => wc.value > *bv || (wc.value == *bv && levels < *bl),
                };
                if better {
                    best = Some((levels, wc.value, wc.u_star));
                }
            }
            let (levels, z_dr, u_wc) =
                best.ok_or(Error::EmptyInput("no price candidates"))?;
            Ok(DrpoResult {
                p_dr: PriceVector::new(levels),
                z_dr,
                u_wc,
                certified: !extremes,
                wall_time: start.elapsed(),
            })
        }
        PricingMethod::LocalSearch { restarts, seed } => {
            let mut master = SplitMix64::new(seed);
            let mut best: Option<(Vec<usize>, f64, ParamVector)> = None;
            for _ in 0..restarts.max(1) {
                let mut rng = master.split();
                let mut levels: Vec<usize> = instance
                    .grids
                    .iter()
                    .map(|g| rng.index(g.len()))
                    .collect();
                let eval_full = |lv: &[usize],
                                 abandon: Option<f64>|
                 -> Result<Option<(f64, ParamVector)>> {
                    let policy = RandomizedPolicy::point_mass(PriceVector::new(lv.to_vec()));
                    let wc = worst_case_convex_pruned(
                        instance,
                        &policy,
                        set,
                        config.eps,
                        config.max_inner_iter,
                        abandon,
                    )?;
                    Ok(wc.converged.then_some((wc.value, wc.u_star)))
                };
                let mut current = match eval_full(&levels, None)? {
                    Some(v) => v,
                    None => continue,
                };
                loop {
                    let mut improved = false;
                    for i in 0..instance.products() {
                        let hold = levels[i];
                        let mut best_level = hold;
                        let mut best_val = current.clone();
                        for lvl in 0..instance.grids[i].len() {
                            if lvl == hold {
                                continue;
                            }
                            levels[i] = lvl;
                            if let Some(v) = eval_full(&levels, Some(best_val.0))? {
                                if v.0 > best_val.0 {
                                    best_val = v;
                                    best_level = lvl;
                                }
                            }
                        }
                        levels[i] = best_level;
                        if best_level != hold {
                            current = best_val;
                            improved = true;
                        }
                    }
                    if !improved {
                        break;
                    }
                    if let Some(limit) = config.time_limit {
                        if start.elapsed() > limit {
                            break;
                        }
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
            let (levels, z_dr, u_wc) =
                best.ok_or(Error::EmptyInput("no price candidates"))?;
            Ok(DrpoResult {
                p_dr: PriceVector::new(levels),
                z_dr,
                u_wc,
                certified: false,
                wall_time: start.elapsed(),
            })
        }
    }
}

/// All candidate level vectors with their nominal revenues.
fn collect_candidates(instance: &Instance, extremes: bool) -> Result<Vec<(Vec<usize>, f64)>> {
    let count: u128 = instance
        .grids
        .iter()
        .map(|g| {
            if extremes && g.len() > 1 {
                2u128
            } else {
                g.len() as u128
            }
        })
        .product();
    if count > crate::oracles::PRICE_ENUM_CAP {
        return Err(Error::CapExceeded {
            required: count,
            cap: crate::oracles::PRICE_ENUM_CAP,
        });
    }
    let n = instance.products();
    let choices: Vec<Vec<usize>> = instance
        .grids
        .iter()
        .map(|g| {
            if extremes && g.len() > 1 {
                vec![0, g.len() - 1]
            } else {
                (0..g.len()).collect()
            }
        })
        .collect();
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; n];
    let mut prices = vec![0.0; n];
    loop {
        let levels: Vec<usize> = (0..n).map(|i| choices[i][idx[i]]).collect();
        for i in 0..n {
            prices[i] = instance.grids[i][levels[i]];
        }
        let nominal = revenue_at(instance.family, &prices, &instance.u0)?;
        out.push((levels, nominal));
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Nominal optimum and its worst case over the set (the `Z_N` and `Z_N_WC`
/// columns of the experiment tables).
pub fn nominal_worst_case_convex(
    instance: &Instance,
    set: &L1Set,
    pricing: PricingMethod,
    eps: f64,
    max_iter: usize,
) -> Result<(PriceVector, f64, f64)> {
    let nominal = nominal_price_opt(instance, &instance.u0, pricing)?;
    let policy = RandomizedPolicy::point_mass(nominal.p_star.clone());
    let wc = worst_case_convex(instance, &policy, set, eps, max_iter)?;
    Ok((nominal.p_star, nominal.value, wc.value))
}

/// Expected revenue of `policy` at the nominal parameters.
pub fn nominal_expected_revenue(instance: &Instance, policy: &RandomizedPolicy) -> Result<f64> {
    policy.expected_revenue(instance, &Scenario::new(instance.u0.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::DiscreteMethod;

    fn single_linear() -> Instance {
        Instance::new(
            DemandFamily::Linear,
            vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]],
            ParamVector::single(10.0, 2.0),
        )
        .unwrap()
    }

    #[test]
    fn rrpo_theta_zero_reduces_to_nominal() {
        let inst = single_linear();
        let set = L1Set::new(0.0, inst.u0.clone()).unwrap();
        let report = solve_rrpo_convex(&inst, &set, &RrpoConvexConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!((report.z_rr_upper - 12.0).abs() < 1e-12);
        assert_eq!(report.policy.support.len(), 1);
        assert_eq!(report.policy.support[0].0.levels, vec![1]);
    }

    #[test]
    fn rrpo_linear_single_product_is_randomization_proof() {
        // beta stays nonnegative across the set, and the alpha coordinate
        // dominates the adversary's budget for every grid price, so the
        // randomized and deterministic optima coincide.
        let inst = single_linear();
        let set = L1Set::new(0.5, inst.u0.clone()).unwrap();
        let rr = solve_rrpo_convex(&inst, &set, &RrpoConvexConfig::default()).unwrap();
        assert_eq!(rr.status, SolveStatus::Converged);
        let dr = solve_drpo_convex(&inst, &set, &DrpoConvexConfig::default()).unwrap();
        assert!(
            (rr.z_rr_upper - dr.z_dr).abs() <= 1e-6 * dr.z_dr.abs().max(1.0),
            "rr {} vs dr {}",
            rr.z_rr_upper,
            dr.z_dr
        );
        // Policy worst case sits inside the certified bracket.
        assert!(rr.policy_worst_case >= rr.z_rr_lower - 1e-6);
        assert!(rr.policy_worst_case <= rr.z_rr_upper + 1e-6);
    }

    #[test]
    fn drpo_theta_zero_is_nominal_optimum() {
        let inst = single_linear();
        let set = L1Set::new(0.0, inst.u0.clone()).unwrap();
        let dr = solve_drpo_convex(&inst, &set, &DrpoConvexConfig::default()).unwrap();
        assert_eq!(dr.p_dr.levels, vec![1]);
        assert!((dr.z_dr - 12.0).abs() < 1e-12);
        assert!(dr.certified);
    }

    #[test]
    fn drpo_enumerate_agrees_with_bruteforce_inner() {
        // Semi-log, I = 2: compare the screened enumeration against the
        // naive loop that runs the full inner solve for every candidate.
        let u0 = ParamVector::new(
            vec![2.0, 1.5],
            vec![0.6, 0.4],
            vec![vec![0.0, 0.2], vec![-0.1, 0.0]],
        )
        .unwrap();
        let inst = Instance::new(
            DemandFamily::SemiLog,
            vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]],
            u0.clone(),
        )
        .unwrap();
        let set = L1Set::new(0.4, u0).unwrap();
        let config = DrpoConvexConfig::default();
        let fast = solve_drpo_convex(&inst, &set, &config).unwrap();

        let mut best = f64::NEG_INFINITY;
        let mut best_levels = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let policy = RandomizedPolicy::point_mass(PriceVector::new(vec![a, b]));
                let wc = worst_case_convex(&inst, &policy, &set, 1e-8, 500).unwrap();
                if wc.value > best {
                    best = wc.value;
                    best_levels = vec![a, b];
                }
            }
        }
        assert_eq!(fast.p_dr.levels, best_levels);
        assert!((fast.z_dr - best).abs() <= 1e-5 * best.abs().max(1.0));
    }

    #[test]
    fn rrpo_dominates_drpo_semilog() {
        let u0 = ParamVector::new(
            vec![3.0, 2.5],
            vec![0.9, 1.1],
            vec![vec![0.0, 0.3], vec![-0.2, 0.0]],
        )
        .unwrap();
        let inst = Instance::new(
            DemandFamily::SemiLog,
            vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]; 2],
            u0.clone(),
        )
        .unwrap();
        let set = L1Set::new(0.5, u0).unwrap();
        let rr = solve_rrpo_convex(&inst, &set, &RrpoConvexConfig::default()).unwrap();
        assert_eq!(rr.status, SolveStatus::Converged);
        let dr = solve_drpo_convex(&inst, &set, &DrpoConvexConfig::default()).unwrap();
        assert!(
            rr.z_rr_upper >= dr.z_dr - 1e-6 * dr.z_dr.abs().max(1.0),
            "randomization made things worse: rr {} dr {}",
            rr.z_rr_upper,
            dr.z_dr
        );
    }

    #[test]
    fn example_one_drpo_on_fine_grid() {
        // Two scenarios from different demand families on a fine price grid;
        // the max-min lands near the crossing of the revenue curves.
        let grid: Vec<f64> = (0..=30000).map(|k| 1.0 + k as f64 * 1e-4).collect();
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![grid],
            ParamVector::single(10.0, 2.0),
        )
        .unwrap();
        let set = crate::uncertainty::ExplicitSet::new(vec![
            Scenario::new(ParamVector::single(10.0, 2.0)),
            Scenario::with_family(
                ParamVector::single(10.0f64.ln(), 2.0),
                DemandFamily::LogLog,
            ),
        ])
        .unwrap();
        let result = crate::discrete::drpo_discrete(
            &inst,
            &crate::uncertainty::FiniteSet::Explicit(&set),
            PricingMethod::Enumerate,
            DiscreteMethod::enumerate(),
        )
        .unwrap();
        assert!(
            (result.z_dr - 8.78885).abs() < 1e-3,
            "z_dr = {}",
            result.z_dr
        );
        let p = inst.prices(&result.p_dr).unwrap()[0];
        assert!((p - 1.1378).abs() < 2e-4, "p_dr = {p}");
    }
}
