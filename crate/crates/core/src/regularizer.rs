//! The grouping term.
//!
//! Every unordered pair of initial points gets a kernel weight from its
//! initial distance `d0`. The term
//!
//! ```text
//! tau(X) = sum over pairs of w * (d0 - d)^2
//! ```
//!
//! penalizes changes to the current distance `d` of nearby pairs, so a point
//! can only move if its neighbourhood moves with it. Weights are computed
//! once from the initial coordinates and never change during a run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grad::PointGradient;
use crate::point_cloud::{euclidean, PointCloud};

/// Gaussian weights below this are dropped.
pub const GAUSSIAN_CUTOFF: f64 = 1e-12;

/// Current distances below this make the gradient undefined.
pub const DEGENERATE_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// 1 within the scale, 0 beyond it.
    #[default]
    Uniform,
    /// `exp(-x^2 / (2 s^2))`.
    Gaussian,
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(Error::InvalidConfig(format!(
                "unknown kernel `{other}` (expected uniform or gaussian)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub scale: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            family: KernelFamily::Uniform,
            scale: 1.0,
        }
    }
}

impl KernelSpec {
    pub fn new(family: KernelFamily, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "kernel scale must be positive, got {scale}"
            )));
        }
        Ok(Self { family, scale })
    }

    pub fn uniform(scale: f64) -> Result<Self> {
        Self::new(KernelFamily::Uniform, scale)
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeInput(x));
    }
    Ok(match spec.family {
        KernelFamily::Uniform => {
            if x <= spec.scale {
                1.0
            } else {
                0.0
            }
        }
        KernelFamily::Gaussian => (-x * x / (2.0 * spec.scale * spec.scale)).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPair {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
    pub initial_distance: f64,
}

/// Kernel weights over initial-point pairs, zero weights omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerWeights {
    num_points: usize,
    pairs: Vec<WeightedPair>,
}

impl RegularizerWeights {
    pub fn pairs(&self) -> &[WeightedPair] {
        &self.pairs
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn check(&self, cloud: &PointCloud) -> Result<()> {
        if cloud.len() != self.num_points {
            return Err(Error::StaleWeights {
                expected: self.num_points,
                found: cloud.len(),
            });
        }
        Ok(())
    }
}

pub fn build_weights(cloud: &PointCloud, spec: &KernelSpec) -> RegularizerWeights {
    let m = cloud.len();
    let mut pairs = Vec::new();
    for i in 0..m {
        let a = cloud.initial_point(i);
        for j in (i + 1)..m {
            let d0 = euclidean(a, cloud.initial_point(j));
            // d0 >= 0, so evaluation cannot fail
            let w = kernel_eval(spec, d0).unwrap_or(0.0);
            let keep = match spec.family {
                KernelFamily::Uniform => w > 0.0,
                KernelFamily::Gaussian => w >= GAUSSIAN_CUTOFF,
            };
            if keep {
                pairs.push(WeightedPair {
                    i,
                    j,
                    weight: w,
                    initial_distance: d0,
                });
            }
        }
    }
    RegularizerWeights {
        num_points: m,
        pairs,
    }
}

pub fn tau(cloud: &PointCloud, weights: &RegularizerWeights) -> Result<f64> {
    weights.check(cloud)?;
    Ok(weights
        .pairs
        .iter()
        .map(|p| {
            let r = p.initial_distance - cloud.distance(p.i, p.j);
            p.weight * r * r
        })
        .sum())
}

/// Exact gradient of [`tau`] with respect to the current coordinates.
pub fn tau_gradient(cloud: &PointCloud, weights: &RegularizerWeights) -> Result<PointGradient> {
    weights.check(cloud)?;
    let n = cloud.dim();
    let mut grad = PointGradient::zeros(cloud.len(), n);
    let mut diff = vec![0.0; n];
    for p in &weights.pairs {
        let (a, b) = (cloud.point(p.i), cloud.point(p.j));
        for k in 0..n {
            diff[k] = a[k] - b[k];
        }
        let d = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
        if d < DEGENERATE_DISTANCE {
            return Err(Error::DegeneratePair(p.i, p.j));
        }
        // d/dx_i of w (d0 - d)^2 = -2 w (d0 - d) (x_i - x_j) / d
        let coef = -2.0 * p.weight * (p.initial_distance - d) / d;
        grad.add_edge(p.i, p.j, coef, &diff);
    }
    Ok(grad)
}
