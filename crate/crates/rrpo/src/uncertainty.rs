//! Uncertainty sets over demand parameters.
//!
//! Three set kinds are supported:
//!
//! * [`L1Set`]: the convex ball of total relative deviation at most `theta`
//!   around the nominal vector, measured coordinate-wise in the flattened
//!   parameter space. Coordinates whose nominal value is exactly zero are
//!   frozen at zero — the relative deviation `(u_k - u0_k)/u0_k` is undefined
//!   there, so the set simply does not move them.
//! * [`DiscreteBudgetSet`]: up to `Gamma` coordinates moved to their
//!   component-wise bound (`u_hi` or `u_lo`), the rest at nominal.
//! * [`ExplicitSet`]: a finite list of scenarios given outright. A scenario
//!   may override the instance's demand family, which is how uncertainty
//!   across model families (one scenario linear, one log-log) is expressed.

use crate::demand::{DemandFamily, ParamVector};
use crate::lp::{LinearProgram, Relation};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A single uncertainty realization: parameters plus an optional demand
/// family override (defaults to the instance's family).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: ParamVector,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<DemandFamily>,
}

impl Scenario {
    pub fn new(params: ParamVector) -> Self {
        Scenario {
            params,
            family: None,
        }
    }

    pub fn with_family(params: ParamVector, family: DemandFamily) -> Self {
        Scenario {
            params,
            family: Some(family),
        }
    }

    pub fn family_or(&self, default: DemandFamily) -> DemandFamily {
        self.family.unwrap_or(default)
    }
}

/// L1 relative-deviation ball around `u0` with budget `theta`.
#[derive(Debug, Clone)]
pub struct L1Set {
    pub theta: f64,
    pub u0: ParamVector,
}

impl L1Set {
    pub fn new(theta: f64, u0: ParamVector) -> Result<Self> {
        if theta.is_nan() || theta < 0.0 || !theta.is_finite() {
            return Err(Error::InvalidInstance(format!(
                "L1 budget theta must be a nonnegative real, got {theta}"
            )));
        }
        Ok(L1Set { theta, u0 })
    }

    pub fn dim(&self) -> usize {
        self.u0.dim()
    }

    /// Indices of flattened coordinates with nonzero nominal value (the
    /// coordinates the set is allowed to move).
    pub fn active_coords(&self) -> Vec<usize> {
        self.u0
            .flatten()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn contains(&self, u: &ParamVector, tol: f64) -> Result<bool> {
        let u0 = self.u0.flatten();
        let uf = u.flatten();
        if uf.len() != u0.len() {
            return Err(Error::DimensionMismatch {
                context: "L1Set::contains",
                expected: u0.len(),
                actual: uf.len(),
            });
        }
        let mut norm = 0.0;
        for (k, (&v, &v0)) in uf.iter().zip(&u0).enumerate() {
            if v0 == 0.0 {
                if v.abs() > tol {
                    return Ok(false);
                }
                let _ = k;
            } else {
                norm += ((v - v0) / v0).abs();
            }
        }
        Ok(norm <= self.theta + tol)
    }

    /// Minimize the affine model `grad . (u - u0)` over the set.
    ///
    /// The optimum concentrates the whole budget on the coordinate with the
    /// largest |grad_k * u0_k| (lowest index on ties), deviating against the
    /// gradient sign. Returns the minimizer and the objective shift
    /// `-theta * max_k |grad_k * u0_k|`.
    pub fn linear_min(&self, grad: &[f64]) -> Result<(ParamVector, f64)> {
        let u0 = self.u0.flatten();
        if grad.len() != u0.len() {
            return Err(Error::DimensionMismatch {
                context: "L1Set::linear_min",
                expected: u0.len(),
                actual: grad.len(),
            });
        }
        let mut best_k = None;
        let mut best_mag = 0.0;
        for (k, (&g, &v0)) in grad.iter().zip(&u0).enumerate() {
            let mag = (g * v0).abs();
            if mag > best_mag {
                best_mag = mag;
                best_k = Some(k);
            }
        }
        let mut out = u0.clone();
        let shift = match best_k {
            Some(k) if self.theta > 0.0 => {
                let s = (grad[k] * u0[k]).signum();
                out[k] = u0[k] * (1.0 - self.theta * s);
                -self.theta * best_mag
            }
            _ => 0.0,
        };
        Ok((
            ParamVector::unflatten(self.u0.products(), &out)?,
            shift,
        ))
    }

    /// The `2d + 1` extreme points of the ball: for each active coordinate,
    /// the full budget deviated down and up, plus the center last.
    pub fn vertex_scenarios(&self) -> Vec<ParamVector> {
        let u0 = self.u0.flatten();
        let products = self.u0.products();
        let mut out = Vec::new();
        for k in self.active_coords() {
            for sign in [-1.0, 1.0] {
                let mut v = u0.clone();
                v[k] = u0[k] * (1.0 + sign * self.theta);
                out.push(ParamVector::unflatten(products, &v).expect("dimension preserved"));
            }
        }
        out.push(self.u0.clone());
        out
    }

    /// Emit the set as LP variables and rows.
    ///
    /// Variables are `u_1..u_d` followed by `s_1..s_d`; rows encode
    /// `s_k >= |(u_k - u0_k)/u0_k|` pairwise plus the budget row
    /// `sum_k s_k <= theta`. Frozen coordinates get equality pins instead.
    pub fn linear_constraint_block(&self) -> LinearConstraintBlock {
        let u0 = self.u0.flatten();
        let d = u0.len();
        let n = 2 * d;
        let mut rows = Vec::new();
        let mut budget_coeffs = vec![0.0; n];
        for (k, &v0) in u0.iter().enumerate() {
            if v0 == 0.0 {
                let mut pin = vec![0.0; n];
                pin[k] = 1.0;
                rows.push((pin, Relation::Eq, 0.0));
                let mut spin = vec![0.0; n];
                spin[d + k] = 1.0;
                rows.push((spin, Relation::Eq, 0.0));
                continue;
            }
            let c = 1.0 / v0;
            // (u_k - u0_k)/u0_k <= s_k  and  -(u_k - u0_k)/u0_k <= s_k
            let mut up = vec![0.0; n];
            up[k] = c;
            up[d + k] = -1.0;
            rows.push((up, Relation::Le, 1.0));
            let mut dn = vec![0.0; n];
            dn[k] = -c;
            dn[d + k] = -1.0;
            rows.push((dn, Relation::Le, -1.0));
            budget_coeffs[d + k] = 1.0;
        }
        rows.push((budget_coeffs, Relation::Le, self.theta));
        LinearConstraintBlock {
            dim: d,
            num_vars: n,
            rows,
        }
    }
}

/// LP encoding of an [`L1Set`]: `num_vars = 2d` variables (`u` then `s`)
/// and the rows over them.
#[derive(Debug, Clone)]
pub struct LinearConstraintBlock {
    pub dim: usize,
    pub num_vars: usize,
    pub rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearConstraintBlock {
    /// Install the block at the front of an LP whose variables are
    /// `u_1..u_d, s_1..s_d, <extra...>`. The `u` variables are freed, the
    /// `s` variables stay at their default `[0, inf)` bounds.
    pub fn install(&self, lp: &mut LinearProgram, total_vars: usize) {
        for k in 0..self.dim {
            lp.free_var(k);
        }
        for (coeffs, rel, rhs) in &self.rows {
            let mut padded = vec![0.0; total_vars];
            padded[..self.num_vars].copy_from_slice(coeffs);
            lp.push_row(padded, *rel, *rhs);
        }
    }
}

/// Discrete budget set: each of up to `gamma_budget` coordinates moved to
/// its upper or lower bound, the rest held at nominal.
#[derive(Debug, Clone)]
pub struct DiscreteBudgetSet {
    pub gamma_budget: usize,
    pub u0: ParamVector,
    pub u_hi: ParamVector,
    pub u_lo: ParamVector,
}

impl DiscreteBudgetSet {
    pub fn new(
        gamma_budget: usize,
        u0: ParamVector,
        u_hi: ParamVector,
        u_lo: ParamVector,
    ) -> Result<Self> {
        let d = u0.dim();
        for (name, v) in [("u_hi", &u_hi), ("u_lo", &u_lo)] {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: match name {
                        "u_hi" => "DiscreteBudgetSet u_hi",
                        _ => "DiscreteBudgetSet u_lo",
                    },
                    expected: d,
                    actual: v.dim(),
                });
            }
        }
        Ok(DiscreteBudgetSet {
            gamma_budget,
            u0,
            u_hi,
            u_lo,
        })
    }

    /// Budget set with multiplicative bounds `lo_mult * u0`, `hi_mult * u0`.
    pub fn from_multipliers(
        gamma_budget: usize,
        u0: ParamVector,
        lo_mult: f64,
        hi_mult: f64,
    ) -> Result<Self> {
        let scale = |m: f64, u: &ParamVector| -> ParamVector {
            ParamVector {
                alpha: u.alpha.iter().map(|v| v * m).collect(),
                beta: u.beta.iter().map(|v| v * m).collect(),
                gamma: u
                    .gamma
                    .iter()
                    .map(|row| row.iter().map(|v| v * m).collect())
                    .collect(),
            }
        };
        let hi = scale(hi_mult, &u0);
        let lo = scale(lo_mult, &u0);
        DiscreteBudgetSet::new(gamma_budget, u0, hi, lo)
    }

    pub fn dim(&self) -> usize {
        self.u0.dim()
    }

    /// `sum_{k=0}^{Gamma} C(d, k) 2^k`.
    pub fn cardinality(&self) -> u128 {
        let d = self.dim() as u128;
        let cap = (self.gamma_budget as u128).min(d);
        let mut total: u128 = 0;
        let mut binom: u128 = 1; // C(d, 0)
        let mut pow2: u128 = 1;
        for k in 0..=cap {
            total = total.saturating_add(binom.saturating_mul(pow2));
            binom = binom.saturating_mul(d - k) / (k + 1);
            pow2 = pow2.saturating_mul(2);
        }
        total
    }

    pub fn contains(&self, u: &ParamVector, tol: f64) -> Result<bool> {
        let d = self.dim();
        let uf = u.flatten();
        if uf.len() != d {
            return Err(Error::DimensionMismatch {
                context: "DiscreteBudgetSet::contains",
                expected: d,
                actual: uf.len(),
            });
        }
        let u0 = self.u0.flatten();
        let hi = self.u_hi.flatten();
        let lo = self.u_lo.flatten();
        let mut flips = 0usize;
        for k in 0..d {
            if (uf[k] - u0[k]).abs() <= tol {
                continue;
            }
            if (uf[k] - hi[k]).abs() <= tol || (uf[k] - lo[k]).abs() <= tol {
                flips += 1;
            } else {
                return Ok(false);
            }
        }
        Ok(flips <= self.gamma_budget)
    }

    /// Enumerate all members in deterministic order: by number of flips,
    /// then lexicographic flip positions, with the upper bound before the
    /// lower bound at each position.
    pub fn enumerate(&self, cap: u128) -> Result<Vec<Scenario>> {
        let card = self.cardinality();
        if card > cap {
            return Err(Error::CapExceeded {
                required: card,
                cap,
            });
        }
        let d = self.dim();
        let u0 = self.u0.flatten();
        let hi = self.u_hi.flatten();
        let lo = self.u_lo.flatten();
        let products = self.u0.products();
        let mut out = Vec::with_capacity(card as usize);
        let gamma = self.gamma_budget.min(d);

        // Iterate k-subsets of coordinates in lexicographic order, then sign
        // patterns counting up with the first position most significant
        // (0 = upper bound, 1 = lower bound).
        out.push(Scenario::new(self.u0.clone()));
        for k in 1..=gamma {
            let mut positions: Vec<usize> = (0..k).collect();
            loop {
                for pattern in 0..(1u64 << k) {
                    let mut v = u0.clone();
                    for (slot, &pos) in positions.iter().enumerate() {
                        let use_lo = (pattern >> (k - 1 - slot)) & 1 == 1;
                        v[pos] = if use_lo { lo[pos] } else { hi[pos] };
                    }
                    out.push(Scenario::new(ParamVector::unflatten(products, &v)?));
                }
                // Advance to the next k-combination.
                let mut i = k;
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if positions[i] < d - k + i {
                        positions[i] += 1;
                        for j in i + 1..k {
                            positions[j] = positions[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// Explicit finite list of scenarios.
#[derive(Debug, Clone)]
pub struct ExplicitSet {
    pub members: Vec<Scenario>,
}

impl ExplicitSet {
    pub fn new(members: Vec<Scenario>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyInput("ExplicitSet must be nonempty"));
        }
        let d = members[0].params.dim();
        if members.iter().any(|s| s.params.dim() != d) {
            return Err(Error::InconsistentInputs(
                "ExplicitSet members have mixed dimensions".into(),
            ));
        }
        Ok(ExplicitSet { members })
    }

    pub fn contains(&self, u: &ParamVector, tol: f64) -> bool {
        let uf = u.flatten();
        self.members.iter().any(|s| {
            let m = s.params.flatten();
            m.len() == uf.len() && m.iter().zip(&uf).all(|(a, b)| (a - b).abs() <= tol)
        })
    }
}

/// Any supported uncertainty set.
#[derive(Debug, Clone)]
pub enum UncertaintySet {
    L1(L1Set),
    Budget(DiscreteBudgetSet),
    Explicit(ExplicitSet),
}

impl UncertaintySet {
    /// Membership within additive tolerance on the defining constraint.
    pub fn contains(&self, u: &ParamVector, tol: f64) -> Result<bool> {
        match self {
            UncertaintySet::L1(s) => s.contains(u, tol),
            UncertaintySet::Budget(s) => s.contains(u, tol),
            UncertaintySet::Explicit(s) => Ok(s.contains(u, tol)),
        }
    }

    /// Borrow as a finite set, when it is one.
    pub fn as_finite(&self) -> Option<FiniteSet<'_>> {
        match self {
            UncertaintySet::L1(_) => None,
            UncertaintySet::Budget(b) => Some(FiniteSet::Budget(b)),
            UncertaintySet::Explicit(e) => Some(FiniteSet::Explicit(e)),
        }
    }
}

/// Any finite uncertainty set (everything except the L1 ball).
#[derive(Debug, Clone)]
pub enum FiniteSet<'a> {
    Budget(&'a DiscreteBudgetSet),
    Explicit(&'a ExplicitSet),
}

impl<'a> FiniteSet<'a> {
    pub fn cardinality(&self) -> u128 {
        match self {
            FiniteSet::Budget(b) => b.cardinality(),
            FiniteSet::Explicit(e) => e.members.len() as u128,
        }
    }

    /// Deterministic enumeration: explicit sets in stored order, budget sets
    /// per [`DiscreteBudgetSet::enumerate`].
    pub fn enumerate(&self, cap: u128) -> Result<Vec<Scenario>> {
        match self {
            FiniteSet::Budget(b) => b.enumerate(cap),
            FiniteSet::Explicit(e) => {
                let card = e.members.len() as u128;
                if card > cap {
                    return Err(Error::CapExceeded {
                        required: card,
                        cap,
                    });
                }
                Ok(e.members.clone())
            }
        }
    }

    /// A deterministic seed member for column generation: the nominal vector
    /// for budget sets, the first member for explicit sets.
    pub fn seed_member(&self) -> Scenario {
        match self {
            FiniteSet::Budget(b) => Scenario::new(b.u0.clone()),
            FiniteSet::Explicit(e) => e.members[0].clone(),
        }
    }
}

/// Default membership tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
