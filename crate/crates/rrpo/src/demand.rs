//! Demand models and revenue evaluation.
//!
//! Three demand families are supported. With `I` products, prices `p` and
//! parameters `u = (alpha, beta, gamma)`:
//!
//! * linear:     `d_i = alpha_i - beta_i p_i + sum_{j != i} gamma_ij p_j`
//! * semi-log:   `d_i = exp(alpha_i - beta_i p_i + sum_{j != i} gamma_ij p_j)`
//! * log-log:    `d_i = exp(alpha_i - beta_i ln p_i + sum_{j != i} gamma_ij ln p_j)`
//!
//! Revenue is `R(p, u) = sum_i p_i d_i(p, u)` in all three cases. Linear
//! demand is deliberately not clamped at zero; the algebra downstream
//! (closed-form worst cases, LP cuts) relies on the unclamped form.
//!
//! The parameter vector also has a flattened coordinate form of dimension
//! `d = I + I^2`: alpha first, then beta, then gamma row-major with the
//! diagonal skipped. The flattened form is what the uncertainty sets and the
//! cutting-plane machinery operate on.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Demand model family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DemandFamily {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "semilog")]
    SemiLog,
    #[serde(rename = "loglog")]
    LogLog,
}

impl std::fmt::Display for DemandFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            DemandFamily::Linear => "linear",
            DemandFamily::SemiLog => "semilog",
            DemandFamily::LogLog => "loglog",
        };
        f.write_str(name)
    }
}

/// Demand model parameters `(alpha, beta, gamma)` for `I` products.
///
/// `gamma` is stored as a full `I x I` matrix whose diagonal is identically
/// zero; the flattened coordinate form skips the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
}

impl ParamVector {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<Vec<f64>>) -> Result<Self> {
        let i = alpha.len();
        if beta.len() != i {
            return Err(Error::DimensionMismatch {
                context: "ParamVector beta",
                expected: i,
                actual: beta.len(),
            });
        }
        if gamma.len() != i || gamma.iter().any(|row| row.len() != i) {
            return Err(Error::DimensionMismatch {
                context: "ParamVector gamma",
                expected: i,
                actual: gamma.len(),
            });
        }
        for (k, row) in gamma.iter().enumerate() {
            if row[k] != 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "gamma diagonal entry ({k},{k}) must be 0, got {}",
                    row[k]
                )));
            }
        }
        Ok(ParamVector { alpha, beta, gamma })
    }

    /// Single-product parameters (no cross terms).
    pub fn single(alpha: f64, beta: f64) -> Self {
        ParamVector {
            alpha: vec![alpha],
            beta: vec![beta],
            gamma: vec![vec![0.0]],
        }
    }

    pub fn products(&self) -> usize {
        self.alpha.len()
    }

    /// Flattened dimension `I + I^2`.
    pub fn dim(&self) -> usize {
        let i = self.products();
        i + i * i
    }

    /// Flatten to coordinates: `alpha_1..alpha_I`, `beta_1..beta_I`, then
    /// `gamma_ij` row-major over `i`, `j != i`.
    pub fn flatten(&self) -> Vec<f64> {
        let i = self.products();
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&self.alpha);
        out.extend_from_slice(&self.beta);
        for a in 0..i {
            for b in 0..i {
                if a != b {
                    out.push(self.gamma[a][b]);
                }
            }
        }
        out
    }

    /// Inverse of [`ParamVector::flatten`] for `I` products.
    pub fn unflatten(products: usize, coords: &[f64]) -> Result<Self> {
        let d = products + products * products;
        if coords.len() != d {
            return Err(Error::DimensionMismatch {
                context: "ParamVector::unflatten",
                expected: d,
                actual: coords.len(),
            });
        }
        let alpha = coords[..products].to_vec();
        let beta = coords[products..2 * products].to_vec();
        let mut gamma = vec![vec![0.0; products]; products];
        let mut k = 2 * products;
        for a in 0..products {
            for b in 0..products {
                if a != b {
                    gamma[a][b] = coords[k];
                    k += 1;
                }
            }
        }
        Ok(ParamVector { alpha, beta, gamma })
    }
}

/// A price vector, stored as per-product indices into the instance's grids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PriceVector {
    pub levels: Vec<usize>,
}

impl PriceVector {
    pub fn new(levels: Vec<usize>) -> Self {
        PriceVector { levels }
    }
}

/// A pricing problem instance: grids of allowable prices and the nominal
/// demand parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub family: DemandFamily,
    /// Allowable price levels per product, strictly increasing, all positive.
    pub grids: Vec<Vec<f64>>,
    /// Nominal parameter vector `u0`.
    pub u0: ParamVector,
}

impl Instance {
    pub fn new(family: DemandFamily, grids: Vec<Vec<f64>>, u0: ParamVector) -> Result<Self> {
        if grids.len() != u0.products() {
            return Err(Error::DimensionMismatch {
                context: "Instance grids",
                expected: u0.products(),
                actual: grids.len(),
            });
        }
        for (i, grid) in grids.iter().enumerate() {
            if grid.is_empty() {
                return Err(Error::InvalidInstance(format!("grid {i} is empty")));
            }
            if grid.iter().any(|&p| p.is_nan() || p <= 0.0 || !p.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "grid {i} has a nonpositive or nonfinite price level"
                )));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInstance(format!(
                    "grid {i} is not strictly increasing"
                )));
            }
        }
        Ok(Instance { family, grids, u0 })
    }

    pub fn products(&self) -> usize {
        self.grids.len()
    }

    /// Flattened parameter dimension `I + I^2`.
    pub fn param_dim(&self) -> usize {
        self.u0.dim()
    }

    /// Resolve a level vector to actual prices.
    pub fn prices(&self, p: &PriceVector) -> Result<Vec<f64>> {
        if p.levels.len() != self.products() {
            return Err(Error::DimensionMismatch {
                context: "PriceVector levels",
                expected: self.products(),
                actual: p.levels.len(),
            });
        }
        p.levels
            .iter()
            .zip(&self.grids)
            .enumerate()
            .map(|(i, (&lvl, grid))| {
                grid.get(lvl).copied().ok_or(Error::InvalidInstance(format!(
                    "level {lvl} out of range for grid {i} (len {})",
                    grid.len()
                )))
            })
            .collect()
    }

    /// Number of price vectors in the full Cartesian grid.
    pub fn grid_size(&self) -> u128 {
        self.grids.iter().map(|g| g.len() as u128).product()
    }
}

fn check_dims(instance: &Instance, prices: &[f64], u: &ParamVector) -> Result<()> {
    let i = instance.products();
    if prices.len() != i {
        return Err(Error::DimensionMismatch {
            context: "demand prices",
            expected: i,
            actual: prices.len(),
        });
    }
    if u.products() != i {
        return Err(Error::DimensionMismatch {
            context: "demand parameters",
            expected: i,
            actual: u.products(),
        });
    }
    Ok(())
}

/// The linear index of `d_i` in `(alpha_i, beta_i, gamma)`, shared by all
/// three families up to the price transform applied to each term.
fn demand_exponent(i: usize, prices: &[f64], u: &ParamVector, log_prices: bool) -> f64 {
    let pi = if log_prices { prices[i].ln() } else { prices[i] };
    let mut acc = u.alpha[i] - u.beta[i] * pi;
    for (j, &pj) in prices.iter().enumerate() {
        if j != i {
            acc += u.gamma[i][j] * if log_prices { pj.ln() } else { pj };
        }
    }
    acc
}

/// Per-product demand at resolved prices.
pub fn demand_at(family: DemandFamily, prices: &[f64], u: &ParamVector) -> Result<Vec<f64>> {
    if family == DemandFamily::LogLog {
        for (i, &p) in prices.iter().enumerate() {
            if p.is_nan() || p <= 0.0 {
                return Err(Error::NonpositivePrice {
                    product: i,
                    price: p,
                });
            }
        }
    }
    let n = prices.len();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let v = match family {
            DemandFamily::Linear => demand_exponent(i, prices, u, false),
            DemandFamily::SemiLog => demand_exponent(i, prices, u, false).exp(),
            DemandFamily::LogLog => demand_exponent(i, prices, u, true).exp(),
        };
        d.push(v);
    }
    Ok(d)
}

/// Per-product demand `d_i(p, u)`.
pub fn demand(instance: &Instance, p: &PriceVector, u: &ParamVector) -> Result<Vec<f64>> {
    let prices = instance.prices(p)?;
    check_dims(instance, &prices, u)?;
    demand_at(instance.family, &prices, u)
}

/// Revenue at resolved prices: `sum_i p_i d_i`.
pub fn revenue_at(family: DemandFamily, prices: &[f64], u: &ParamVector) -> Result<f64> {
    let d = demand_at(family, prices, u)?;
    Ok(prices.iter().zip(&d).map(|(p, di)| p * di).sum())
}

/// Revenue `R(p, u) = sum_i p_i d_i(p, u)`.
pub fn revenue(instance: &Instance, p: &PriceVector, u: &ParamVector) -> Result<f64> {
    let prices = instance.prices(p)?;
    check_dims(instance, &prices, u)?;
    revenue_at(instance.family, &prices, u)
}

/// Gradient of `R(p, .)` with respect to the flattened parameter
/// coordinates, evaluated at `u`.
///
/// For linear demand the gradient is constant in `u`:
/// `dR/dalpha_i = p_i`, `dR/dbeta_i = -p_i^2`, `dR/dgamma_ij = p_i p_j`.
/// For semi-log each of those entries is scaled by `d_i(p, u)`’s exponential
/// factor, and for log-log the price factors inside the beta/gamma entries
/// are replaced by log-prices.
pub fn revenue_gradient_u(instance: &Instance, p: &PriceVector, u: &ParamVector) -> Result<Vec<f64>> {
    let prices = instance.prices(p)?;
    check_dims(instance, &prices, u)?;
    revenue_gradient_at(instance.family, &prices, u)
}

/// Gradient of `R(p, .)` at resolved prices; see [`revenue_gradient_u`].
pub fn revenue_gradient_at(
    family: DemandFamily,
    prices: &[f64],
    u: &ParamVector,
) -> Result<Vec<f64>> {
    let n = prices.len();
    let d = demand_at(family, prices, u)?;
    // Per-term scale: p_i for linear (d enters linearly), p_i * d_i for the
    // exponential families.
    let scale: Vec<f64> = match family {
        DemandFamily::Linear => prices.to_vec(),
        DemandFamily::SemiLog | DemandFamily::LogLog => {
            prices.iter().zip(&d).map(|(p, di)| p * di).collect()
        }
    };
    let log_prices = family == DemandFamily::LogLog;
    let dim = n + n * n;
    let mut g = Vec::with_capacity(dim);
    // alpha block
    g.extend_from_slice(&scale);
    // beta block
    for i in 0..n {
        let pi = if log_prices { prices[i].ln() } else { prices[i] };
        g.push(-scale[i] * pi);
    }
    // gamma block, row-major, diagonal skipped
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let pj = if log_prices { prices[j].ln() } else { prices[j] };
                g.push(scale[i] * pj);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_product_linear() -> (Instance, ParamVector) {
        let u = ParamVector::new(
            vec![10.0, 8.0],
            vec![1.0, 1.0],
            vec![vec![0.0, 0.5], vec![-0.5, 0.0]],
        )
        .unwrap();
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![1.0, 2.0, 3.0], vec![1.0, 3.0]],
            u.clone(),
        )
        .unwrap();
        (inst, u)
    }

    #[test]
    fn linear_demand_hand_example() {
        // p = (2, 3), alpha = (10, 8), beta = (1, 1), gamma12 = 0.5, gamma21 = -0.5
        let (inst, u) = two_product_linear();
        let p = PriceVector::new(vec![1, 1]);
        let d = demand(&inst, &p, &u).unwrap();
        assert!((d[0] - 9.5).abs() < 1e-12);
        assert!((d[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn loglog_demand_example() {
        let u = ParamVector::single(10.0f64.ln(), 2.0);
        let inst = Instance::new(DemandFamily::LogLog, vec![vec![1.0, 2.5]], u.clone()).unwrap();
        let d = demand(&inst, &PriceVector::new(vec![0]), &u).unwrap();
        assert!((d[0] - 10.0).abs() < 1e-9);
        // R2(2.5) = 2.5 * 10 * 2.5^-2 = 4
        let r = revenue(&inst, &PriceVector::new(vec![1]), &u).unwrap();
        assert!((r - 4.0).abs() < 1e-9);
    }

    #[test]
    fn semilog_zero_parameters_give_unit_demand() {
        let u = ParamVector::single(0.0, 0.0);
        let inst = Instance::new(DemandFamily::SemiLog, vec![vec![7.0]], u.clone()).unwrap();
        let d = demand(&inst, &PriceVector::new(vec![0]), &u).unwrap();
        assert_eq!(d[0], 1.0);
    }

    #[test]
    fn revenue_matches_linear_example() {
        // R1(p) = p(10 - 2p): R1(1) = 8, R1(2.5) = 12.5
        let u = ParamVector::single(10.0, 2.0);
        let inst = Instance::new(DemandFamily::Linear, vec![vec![1.0, 2.5]], u.clone()).unwrap();
        assert!((revenue(&inst, &PriceVector::new(vec![0]), &u).unwrap() - 8.0).abs() < 1e-12);
        assert!((revenue(&inst, &PriceVector::new(vec![1]), &u).unwrap() - 12.5).abs() < 1e-12);
    }

    #[test]
    fn zero_parameters_give_zero_revenue() {
        let u = ParamVector::new(vec![0.0, 0.0], vec![0.0, 0.0], vec![vec![0.0; 2]; 2]).unwrap();
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![1.0, 2.0], vec![1.0, 2.0]],
            u.clone(),
        )
        .unwrap();
        assert_eq!(revenue(&inst, &PriceVector::new(vec![1, 0]), &u).unwrap(), 0.0);
    }

    #[test]
    fn linear_gradient_hand_example() {
        // Single product, p = 3: gradient (dR/dalpha, dR/dbeta) = (3, -9).
        let u = ParamVector::single(10.0, 2.0);
        let inst = Instance::new(DemandFamily::Linear, vec![vec![3.0]], u.clone()).unwrap();
        let g = revenue_gradient_u(&inst, &PriceVector::new(vec![0]), &u).unwrap();
        assert_eq!(g.len(), 2);
        assert!((g[0] - 3.0).abs() < 1e-12);
        assert!((g[1] + 9.0).abs() < 1e-12);
    }

    #[test]
    fn semilog_alpha_gradient_equals_revenue() {
        let u = ParamVector::single(1.3, 0.4);
        let inst = Instance::new(DemandFamily::SemiLog, vec![vec![2.0]], u.clone()).unwrap();
        let p = PriceVector::new(vec![0]);
        let g = revenue_gradient_u(&inst, &p, &u).unwrap();
        let r = revenue(&inst, &p, &u).unwrap();
        assert!((g[0] - r).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(2024);
        for trial in 0..100 {
            let family = match trial % 3 {
                0 => DemandFamily::Linear,
                1 => DemandFamily::SemiLog,
                _ => DemandFamily::LogLog,
            };
            let n = 1 + rng.index(3);
            let mut alpha = Vec::new();
            let mut beta = Vec::new();
            let mut gamma = vec![vec![0.0; n]; n];
            for i in 0..n {
                alpha.push(rng.uniform(0.5, 3.0));
                beta.push(rng.uniform(0.2, 1.5));
                for j in 0..n {
                    if i != j {
                        gamma[i][j] = rng.uniform(-0.3, 0.3);
                    }
                }
            }
            let u = ParamVector::new(alpha, beta, gamma).unwrap();
            let prices: Vec<f64> = (0..n).map(|_| rng.uniform(1.0, 5.0)).collect();
            let g = revenue_gradient_at(family, &prices, &u).unwrap();
            let flat = u.flatten();
            let h = 1e-6;
            for k in 0..flat.len() {
                let mut up = flat.clone();
                let mut dn = flat.clone();
                up[k] += h;
                dn[k] -= h;
                let ru = revenue_at(family, &prices, &ParamVector::unflatten(n, &up).unwrap())
                    .unwrap();
                let rd = revenue_at(family, &prices, &ParamVector::unflatten(n, &dn).unwrap())
                    .unwrap();
                let fd = (ru - rd) / (2.0 * h);
                let denom = g[k].abs().max(1.0);
                assert!(
                    (g[k] - fd).abs() / denom < 1e-6,
                    "family {family}, coord {k}: analytic {} vs fd {}",
                    g[k],
                    fd
                );
            }
        }
    }

    #[test]
    fn loglog_rejects_nonpositive_price() {
        let u = ParamVector::single(1.0, 1.0);
        let err = demand_at(DemandFamily::LogLog, &[0.0], &u).unwrap_err();
        assert!(matches!(err, Error::NonpositivePrice { .. }));
    }

    #[test]
    fn gamma_diagonal_must_be_zero() {
        let err = ParamVector::new(vec![1.0], vec![1.0], vec![vec![0.1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
    }

    #[test]
    fn grids_must_increase() {
        let u = ParamVector::single(1.0, 1.0);
        assert!(Instance::new(DemandFamily::Linear, vec![vec![2.0, 2.0]], u.clone()).is_err());
        assert!(Instance::new(DemandFamily::Linear, vec![vec![-1.0, 2.0]], u).is_err());
    }
}
