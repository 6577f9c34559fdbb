//! Separation and inner-problem oracles.
//!
//! Four problems recur throughout the solvers:
//!
//! 1. nominal pricing `max_p R(p, u)` over the price grid,
//! 2. mixture pricing `max_p sum_u lambda_u R(p, u)`,
//! 3. the worst case of a policy over a convex L1 set (Kelley cutting
//!    planes on the convex function `u -> sum_p pi_p R(p, u)`),
//! 4. the worst case of a policy over a finite set (enumeration or a
//!    budget-respecting local search).
//!
//! The log-sum-exp biconjugate identity that licenses the exact conic
//! treatment of pricing for the exponential demand families lives here too,
//! with its analytic maximizer.

use crate::demand::{
    revenue_at, revenue_gradient_at, DemandFamily, Instance, ParamVector, PriceVector,
};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::rng::SplitMix64;
use crate::uncertainty::{FiniteSet, L1Set, Scenario};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default cap on enumerated price vectors.
pub const PRICE_ENUM_CAP: u128 = 20_000_000;
/// Default cap on enumerated uncertainty-set members.
pub const SET_ENUM_CAP: u128 = 1_000_000;

/// How pricing problems are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PricingMethod {
    /// Exhaustive search over the full grid (exact).
    Enumerate,
    /// Enumerate only the 2^I vectors with every product at its lowest or
    /// highest price. Exact for log-log demand, where an optimal solution of
    /// this form always exists, including for mixtures.
    ExtremeLogLog,
    /// Multistart coordinate-improvement heuristic (not certified).
    LocalSearch { restarts: usize, seed: u64 },
}

/// A finitely supported distribution over price vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedPolicy {
    pub support: Vec<(PriceVector, f64)>,
}

impl RandomizedPolicy {
    pub fn point_mass(p: PriceVector) -> Self {
        RandomizedPolicy {
            support: vec![(p, 1.0)],
        }
    }

    /// Check probabilities and support against an instance.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.support.is_empty() {
            return Err(Error::EmptyInput("policy support"));
        }
        let mut total = 0.0;
        for (p, prob) in &self.support {
            instance.prices(p)?;
            if *prob < -1e-12 {
                return Err(Error::InconsistentInputs(format!(
                    "negative policy probability {prob}"
                )));
            }
            total += prob;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InconsistentInputs(format!(
                "policy probabilities sum to {total}, expected 1"
            )));
        }
        for i in 0..self.support.len() {
            for j in i + 1..self.support.len() {
                if self.support[i].0 == self.support[j].0 {
                    return Err(Error::InconsistentInputs(
                        "duplicate price vector in policy support".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Drop zero-probability atoms and rescale to sum exactly one.
    pub fn normalized(mut self) -> Self {
        self.support.retain(|(_, prob)| *prob > 1e-12);
        let total: f64 = self.support.iter().map(|(_, prob)| prob).sum();
        if total > 0.0 {
            for (_, prob) in &mut self.support {
                *prob /= total;
            }
        }
        self
    }

    /// Expected revenue under scenario `u`.
    pub fn expected_revenue(&self, instance: &Instance, scenario: &Scenario) -> Result<f64> {
        let mut acc = 0.0;
        for (p, prob) in &self.support {
            let prices = instance.prices(p)?;
            acc += prob
                * revenue_at(
                    scenario.family_or(instance.family),
                    &prices,
                    &scenario.params,
                )?;
        }
        Ok(acc)
    }
}

/// Result of the log-sum-exp biconjugate evaluation.
#[derive(Debug, Clone)]
pub struct BiconjugateResult {
    pub value: f64,
    pub mu: Vec<f64>,
}

/// Evaluate `log sum_i exp(y_i)` together with the maximizer of its
/// biconjugate representation `max_{mu in simplex} { mu.y - sum mu log mu }`,
/// which is the softmax of `y`.
pub fn logsumexp_biconjugate(y: &[f64]) -> Result<BiconjugateResult> {
    if y.is_empty() {
        return Err(Error::EmptyInput("logsumexp input"));
    }
    let max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = y.iter().map(|v| (v - max).exp()).sum();
    let value = max + sum.ln();
    let mu: Vec<f64> = y.iter().map(|v| (v - max).exp() / sum).collect();
    Ok(BiconjugateResult { value, mu })
}

/// Evaluate `mu . y - sum_i mu_i log mu_i`, with `0 log 0 = 0`.
pub fn entropy_objective(y: &[f64], mu: &[f64]) -> f64 {
    y.iter()
        .zip(mu)
        .map(|(&yi, &mi)| {
            if mi > 0.0 {
                mi * yi - mi * mi.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Outcome of a pricing oracle call.
#[derive(Debug, Clone)]
pub struct PricingResult {
    pub p_star: PriceVector,
    pub value: f64,
    /// True when the method guarantees a global optimum.
    pub certified: bool,
}

/// Weighted scenarios for mixture pricing. Weights must be nonnegative; they
/// need not sum to one.
pub type WeightedScenarios<'a> = &'a [(f64, Scenario)];

fn check_extreme_applicable(instance: &Instance, scenarios: WeightedScenarios) -> Result<()> {
    let ok = instance.family == DemandFamily::LogLog
        && scenarios
            .iter()
            .all(|(_, s)| s.family_or(instance.family) == DemandFamily::LogLog);
    if ok {
        Ok(())
    } else {
        Err(Error::MethodFamilyMismatch {
            method: "ExtremeLogLog".into(),
            family: instance.family.to_string(),
        })
    }
}

fn mixture_value(instance: &Instance, prices: &[f64], scenarios: WeightedScenarios) -> Result<f64> {
    let mut acc = 0.0;
    for (w, s) in scenarios {
        acc += w * revenue_at(s.family_or(instance.family), prices, &s.params)?;
    }
    Ok(acc)
}

/// Iterate level vectors in lexicographic order, calling `visit` with the
/// level vector and resolved prices. `extremes_only` restricts each product
/// to its lowest and highest level.
pub(crate) fn for_each_price_vector<F: FnMut(&[usize], &[f64]) -> Result<()>>(
    instance: &Instance,
    extremes_only: bool,
    mut visit: F,
) -> Result<()> {
    let n = instance.products();
    let choices: Vec<Vec<usize>> = instance
        .grids
        .iter()
        .map(|g| {
            if extremes_only && g.len() > 1 {
                vec![0, g.len() - 1]
            } else {
                (0..g.len()).collect()
            }
        })
        .collect();
    let mut idx = vec![0usize; n];
    let mut levels = vec![0usize; n];
    let mut prices = vec![0.0; n];
    loop {
        for i in 0..n {
            levels[i] = choices[i][idx[i]];
            prices[i] = instance.grids[i][levels[i]];
        }
        visit(&levels, &prices)?;
        // Advance odometer (last coordinate fastest).
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
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

pub(crate) fn enumerate_price_count(instance: &Instance, extremes_only: bool) -> u128 {
    instance
        .grids
        .iter()
        .map(|g| {
            if extremes_only && g.len() > 1 {
                2u128
            } else {
                g.len() as u128
            }
        })
        .product()
}

/// Maximize `sum_u w_u R(p, u)` over the price grid.
///
/// `Enumerate` and `ExtremeLogLog` are exact (the latter only accepted for
/// log-log demand); `LocalSearch` runs the multistart coordinate-improvement
/// heuristic: sweep products in order, trying every grid level for one
/// product while holding the others, repeating sweeps until no improvement,
/// over `restarts` uniform-random starting vectors. Ties always resolve to
/// the lexicographically smallest level vector.
pub fn mixture_price_opt(
    instance: &Instance,
    scenarios: WeightedScenarios,
    method: PricingMethod,
) -> Result<PricingResult> {
    if scenarios.is_empty() {
        return Err(Error::EmptyInput("mixture scenarios"));
    }
    if scenarios.iter().any(|(w, _)| *w < 0.0) {
        return Err(Error::InconsistentInputs(
            "mixture weights must be nonnegative".into(),
        ));
    }
    match method {
        PricingMethod::Enumerate | PricingMethod::ExtremeLogLog => {
            let extremes = method == PricingMethod::ExtremeLogLog;
            if extremes {
                check_extreme_applicable(instance, scenarios)?;
            }
            let count = enumerate_price_count(instance, extremes);
            if count > PRICE_ENUM_CAP {
                return Err(Error::CapExceeded {
                    required: count,
                    cap: PRICE_ENUM_CAP,
                });
            }
            let mut best: Option<(Vec<usize>, f64)> = None;
            for_each_price_vector(instance, extremes, |levels, prices| {
                let v = mixture_value(instance, prices, scenarios)?;
                if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                    best = Some((levels.to_vec(), v));
                }
                Ok(())
            })?;
            let (levels, value) = best.expect("grid is nonempty");
            Ok(PricingResult {
                p_star: PriceVector::new(levels),
                value,
                certified: true,
            })
        }
        PricingMethod::LocalSearch { restarts, seed } => {
            let mut master = SplitMix64::new(seed);
            let mut best: Option<(Vec<usize>, f64)> = None;
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
                let mut current = mixture_value(instance, &prices, scenarios)?;
                loop {
                    let mut improved = false;
                    for i in 0..instance.products() {
                        let mut best_level = levels[i];
                        let mut best_value = current;
                        for (lvl, &price) in instance.grids[i].iter().enumerate() {
                            if lvl == levels[i] {
                                continue;
                            }
                            prices[i] = price;
                            let v = mixture_value(instance, &prices, scenarios)?;
                            if v > best_value || (v == best_value && lvl < best_level) {
                                best_value = v;
                                best_level = lvl;
                            }
                        }
                        if best_level != levels[i] && best_value > current {
                            levels[i] = best_level;
                            current = best_value;
                            improved = true;
                        }
                        prices[i] = instance.grids[i][levels[i]];
                    }
                    if !improved {
                        break;
                    }
                }
                let better = match &best {
                    None => true,
                    Some((bl, bv)) => current > *bv || (current == *bv && levels < *bl),
                };
                if better {
                    best = Some((levels, current));
                }
            }
            let (levels, value) = best.expect("at least one restart");
            Ok(PricingResult {
                p_star: PriceVector::new(levels),
                value,
                certified: false,
            })
        }
    }
}

/// Maximize `R(p, u)` over the price grid; see [`mixture_price_opt`].
pub fn nominal_price_opt(
    instance: &Instance,
    u: &ParamVector,
    method: PricingMethod,
) -> Result<PricingResult> {
    let scenarios = [(1.0, Scenario::new(u.clone()))];
    mixture_price_opt(instance, &scenarios, method)
}

/// Result of a convex worst-case solve.
#[derive(Debug, Clone)]
pub struct ConvexWorstCase {
    pub u_star: ParamVector,
    /// True objective at `u_star` (not the cutting-plane model value).
    pub value: f64,
    /// Certified optimality gap at exit.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f(u) = sum_p pi_p R(p, u)` over an L1 set by Kelley's
/// cutting-plane method.
///
/// Each iteration solves an LP over all accumulated linearizations of `f`
/// (a valid lower bound since `f` is convex in `u` for every family), then
/// evaluates `f` at the LP minimizer (an upper bound) and adds the cut
/// there. Terminates when `upper - lower <= tol * max(1, |upper|)`. Linear
/// demand short-circuits: `f` is affine in `u`, so one closed-form step over
/// the ball is exact.
pub fn worst_case_convex(
    instance: &Instance,
    policy: &RandomizedPolicy,
    set: &L1Set,
    tol: f64,
    max_iter: usize,
) -> Result<ConvexWorstCase> {
    worst_case_convex_pruned(instance, policy, set, tol, max_iter, None)
}

/// [`worst_case_convex`] with an early-exit threshold: once the incumbent
/// upper bound drops below `abandon_below`, the true minimum provably cannot
/// exceed it, so callers scanning for a maximum over many candidate policies
/// can stop this solve early. The returned value is then the incumbent.
pub fn worst_case_convex_pruned(
    instance: &Instance,
    policy: &RandomizedPolicy,
    set: &L1Set,
    tol: f64,
    max_iter: usize,
    abandon_below: Option<f64>,
) -> Result<ConvexWorstCase> {
    policy.validate(instance)?;
    if set.dim() != instance.param_dim() {
        return Err(Error::DimensionMismatch {
            context: "worst_case_convex set",
            expected: instance.param_dim(),
            actual: set.dim(),
        });
    }
    let weighted: Vec<(f64, Vec<f64>)> = policy
        .support
        .iter()
        .map(|(p, prob)| Ok((*prob, instance.prices(p)?)))
        .collect::<Result<_>>()?;
    let family = instance.family;
    let eval = |u: &ParamVector| -> Result<f64> {
        let mut acc = 0.0;
        for (w, prices) in &weighted {
            acc += w * revenue_at(family, prices, u)?;
        }
        Ok(acc)
    };
    let grad = |u: &ParamVector| -> Result<Vec<f64>> {
        let mut g = vec![0.0; instance.param_dim()];
        for (w, prices) in &weighted {
            let gi = revenue_gradient_at(family, prices, u)?;
            for (acc, v) in g.iter_mut().zip(&gi) {
                *acc += w * v;
            }
        }
        Ok(g)
    };

    let f0 = eval(&set.u0)?;
    if set.theta == 0.0 {
        return Ok(ConvexWorstCase {
            u_star: set.u0.clone(),
            value: f0,
            gap: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if family == DemandFamily::Linear {
        // f is affine in u: one exact minimization over the ball.
        let g = grad(&set.u0)?;
        let (u_star, shift) = set.linear_min(&g)?;
        return Ok(ConvexWorstCase {
            u_star,
            value: f0 + shift,
            gap: 0.0,
            iterations: 1,
            converged: true,
        });
    }

    // Kelley loop. Master variables: u_1..u_d, s_1..s_d, z.
    let d = set.dim();
    let block = set.linear_constraint_block();
    let n_vars = 2 * d + 1;
    let z_col = 2 * d;
    let mut obj = vec![0.0; n_vars];
    obj[z_col] = 1.0;
    let mut master = LinearProgram::new(Sense::Min, obj);
    master.free_var(z_col);
    block.install(&mut master, n_vars);

    let mut best_u = set.u0.clone();
    let mut upper = f0;
    let mut lower = f64::NEG_INFINITY;
    let cut_at = |master: &mut LinearProgram, u: &ParamVector, fu: f64| -> Result<()> {
        let g = grad(u)?;
        let uf = u.flatten();
        let g_dot_u: f64 = g.iter().zip(&uf).map(|(a, b)| a * b).sum();
        // z >= fu + g.(u - u_j)  <=>  g.u - z <= g.u_j - fu
        let mut coeffs = vec![0.0; n_vars];
        coeffs[..d].copy_from_slice(&g);
        coeffs[z_col] = -1.0;
        master.push_row(coeffs, Relation::Le, g_dot_u - fu);
        Ok(())
    };
    cut_at(&mut master, &set.u0, f0)?;

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let sol = solve_lp(&master)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalFailure(format!(
                "Kelley master not optimal: {:?}",
                sol.status
            )));
        }
        lower = lower.max(sol.value);
        let u_next = ParamVector::unflatten(instance.products(), &sol.x[..d])?;
        let fu = eval(&u_next)?;
        if fu < upper {
            upper = fu;
            best_u = u_next.clone();
        }
        let gap = upper - lower;
        if gap <= tol * upper.abs().max(1.0) {
            return Ok(ConvexWorstCase {
                u_star: best_u,
                value: upper,
                gap: gap.max(0.0),
                iterations,
                converged: true,
            });
        }
        if let Some(threshold) = abandon_below {
            if upper < threshold {
                return Ok(ConvexWorstCase {
                    u_star: best_u,
                    value: upper,
                    gap: gap.max(0.0),
                    iterations,
                    converged: false,
                });
            }
        }
        cut_at(&mut master, &u_next, fu)?;
    }
    Ok(ConvexWorstCase {
        u_star: best_u,
        value: upper,
        gap: (upper - lower).max(0.0),
        iterations,
        converged: false,
    })
}

/// How discrete worst cases are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscreteMethod {
    Enumerate { cap: u64 },
    LocalSearch { restarts: usize, seed: u64 },
}

impl DiscreteMethod {
    pub fn enumerate() -> Self {
        DiscreteMethod::Enumerate {
            cap: SET_ENUM_CAP as u64,
        }
    }
}

/// Result of a discrete worst-case solve.
#[derive(Debug, Clone)]
pub struct DiscreteWorstCase {
    pub scenario: Scenario,
    pub value: f64,
    pub certified: bool,
}

/// Minimize `sum_p pi_p R(p, u)` over a finite uncertainty set.
///
/// `Enumerate` is exact. `LocalSearch` (budget sets only) walks assignments
/// of coordinates to nominal/upper/lower states under the flip budget:
/// coordinate sweeps trying all three states per coordinate, repeated until
/// no improvement, multistarted. Explicit sets are always enumerated; they
/// are already lists.
pub fn worst_case_discrete(
    instance: &Instance,
    policy: &RandomizedPolicy,
    set: &FiniteSet,
    method: DiscreteMethod,
) -> Result<DiscreteWorstCase> {
    policy.validate(instance)?;
    let eval = |s: &Scenario| policy.expected_revenue(instance, s);
    match (set, method) {
        (FiniteSet::Explicit(_), _) | (_, DiscreteMethod::Enumerate { .. }) => {
            let cap = match method {
                DiscreteMethod::Enumerate { cap } => cap as u128,
                _ => SET_ENUM_CAP,
            };
            let members = set.enumerate(cap)?;
            let mut best: Option<(usize, f64)> = None;
            for (k, s) in members.iter().enumerate() {
                let v = eval(s)?;
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((k, v));
                }
            }
            let (k, value) = best.expect("finite sets are nonempty");
            Ok(DiscreteWorstCase {
                scenario: members[k].clone(),
                value,
                certified: true,
            })
        }
        (FiniteSet::Budget(budget), DiscreteMethod::LocalSearch { restarts, seed }) => {
            let d = budget.dim();
            let u0 = budget.u0.flatten();
            let hi = budget.u_hi.flatten();
            let lo = budget.u_lo.flatten();
            let products = budget.u0.products();
            let gamma = budget.gamma_budget.min(d);
            let assemble = |state: &[i8]| -> Result<Scenario> {
                let mut v = u0.clone();
                for (k, &s) in state.iter().enumerate() {
                    match s {
                        1 => v[k] = hi[k],
                        -1 => v[k] = lo[k],
                        _ => {}
                    }
                }
                Ok(Scenario::new(ParamVector::unflatten(products, &v)?))
            };
            let mut master = SplitMix64::new(seed);
            let mut best: Option<(Scenario, f64)> = None;
            for _ in 0..restarts.max(1) {
                let mut rng = master.split();
                let mut state = vec![0i8; d];
                let mut used = 0usize;
                while used < gamma {
                    let k = rng.index(d);
                    if state[k] == 0 {
                        state[k] = if rng.next_u64() & 1 == 0 { 1 } else { -1 };
                        used += 1;
                    }
                }
                let mut current = eval(&assemble(&state)?)?;
                loop {
                    let mut improved = false;
                    for k in 0..d {
                        let original = state[k];
                        let budget_used = state.iter().filter(|&&s| s != 0).count();
                        let mut best_state = original;
                        let mut best_value = current;
                        for cand in [0i8, 1, -1] {
                            if cand == original {
                                continue;
                            }
                            if cand != 0 && original == 0 && budget_used >= gamma {
                                continue;
                            }
                            state[k] = cand;
                            let v = eval(&assemble(&state)?)?;
                            if v < best_value {
                                best_value = v;
                                best_state = cand;
                            }
                        }
                        state[k] = best_state;
                        if best_state != original {
                            current = best_value;
                            improved = true;
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                let scenario = assemble(&state)?;
                if best.as_ref().is_none_or(|(_, bv)| current < *bv) {
                    best = Some((scenario, current));
                }
            }
            let (scenario, value) = best.expect("at least one restart");
            Ok(DiscreteWorstCase {
                scenario,
                value,
                certified: false,
            })
        }
    }
}
