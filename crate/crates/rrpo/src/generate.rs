//! Synthetic instance generation.
//!
//! Parameters are drawn independently and uniformly from per-family ranges
//! using the pinned splitmix generator, in a fixed order (all alphas, all
//! betas, then gamma row-major with the diagonal skipped), so an instance is
//! fully reproducible from `(spec, seed)` on any platform.

use crate::demand::{DemandFamily, Instance, ParamVector};
use crate::rng::SplitMix64;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Uniform bounds for one parameter block.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }
}

/// Per-parameter uniform ranges.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParamRanges {
    pub alpha: Range,
    pub beta: Range,
    pub gamma: Range,
}

impl ParamRanges {
    /// Ranges used for the convex-set experiment batches.
    pub fn convex_defaults(family: DemandFamily) -> Self {
        match family {
            DemandFamily::Linear => ParamRanges {
                alpha: Range::new(200.0, 300.0),
                beta: Range::new(5.0, 15.0),
                gamma: Range::new(-0.1, 0.1),
            },
            DemandFamily::SemiLog => ParamRanges {
                alpha: Range::new(4.0, 7.0),
                beta: Range::new(1.0, 1.5),
                gamma: Range::new(-0.4, 0.4),
            },
            DemandFamily::LogLog => ParamRanges {
                alpha: Range::new(10.0, 14.0),
                beta: Range::new(1.0, 2.0),
                gamma: Range::new(-0.6, 0.6),
            },
        }
    }

    /// Ranges used for the discrete-budget experiment batches.
    pub fn discrete_defaults(family: DemandFamily) -> Self {
        match family {
            DemandFamily::Linear => ParamRanges {
                alpha: Range::new(100.0, 200.0),
                beta: Range::new(5.0, 15.0),
                gamma: Range::new(-0.1, 0.1),
            },
            DemandFamily::SemiLog => ParamRanges {
                alpha: Range::new(8.0, 10.0),
                beta: Range::new(1.5, 2.0),
                gamma: Range::new(-0.5, 0.5),
            },
            DemandFamily::LogLog => ParamRanges {
                alpha: Range::new(10.0, 14.0),
                beta: Range::new(1.5, 2.0),
                gamma: Range::new(-0.8, 0.8),
            },
        }
    }
}

/// Everything needed to draw one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub family: DemandFamily,
    pub products: usize,
    pub seed: u64,
    pub ranges: ParamRanges,
    /// Price levels, shared by every product.
    pub grid: Vec<f64>,
}

impl GenerationSpec {
    /// The standard five-level grid `{1, 2, 3, 4, 5}`.
    pub fn default_grid() -> Vec<f64> {
        vec![1.0, 2.0, 3.0, 4.0, 5.0]
    }

    pub fn new(family: DemandFamily, products: usize, seed: u64, ranges: ParamRanges) -> Self {
        GenerationSpec {
            family,
            products,
            seed,
            ranges,
            grid: Self::default_grid(),
        }
    }
}

/// Draw an instance. Deterministic per `(spec, seed)`: the generator is
/// splitmix-style and the draw order is alphas, betas, then gamma row-major.
pub fn generate_instance(spec: &GenerationSpec) -> Result<Instance> {
    let n = spec.products;
    let mut rng = SplitMix64::new(spec.seed);
    let mut alpha = Vec::with_capacity(n);
    for _ in 0..n {
        alpha.push(rng.uniform(spec.ranges.alpha.lo, spec.ranges.alpha.hi));
    }
    let mut beta = Vec::with_capacity(n);
    for _ in 0..n {
        beta.push(rng.uniform(spec.ranges.beta.lo, spec.ranges.beta.hi));
    }
    let mut gamma = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                gamma[i][j] = rng.uniform(spec.ranges.gamma.lo, spec.ranges.gamma.hi);
            }
        }
    }
    let u0 = ParamVector::new(alpha, beta, gamma)?;
    Instance::new(spec.family, vec![spec.grid.clone(); n], u0)
}
