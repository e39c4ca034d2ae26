//! Thresholded squared-persistence losses on a single diagram.
//!
//! `loss(D) = sum of (q - p)^2 over pairs with q - p > floor`. The two named
//! presets are [`LossSpec::rho0`] (dimension 0, floor 0.10, essential class
//! excluded) and [`LossSpec::rho1`] (dimension 1, floor 0.25).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{PersistenceDiagram, PersistencePair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub target_dimension: usize,
    /// Pairs count only when `death - birth` is strictly greater.
    pub persistence_floor: f64,
    pub exclude_essential: bool,
}

impl LossSpec {
    pub fn new(
        target_dimension: usize,
        persistence_floor: f64,
        exclude_essential: bool,
    ) -> Result<Self> {
        if !(persistence_floor >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "persistence floor must be non-negative, got {persistence_floor}"
            )));
        }
        Ok(Self {
            target_dimension,
            persistence_floor,
            exclude_essential,
        })
    }

    /// Squared persistence of finite components separated by more than 0.10.
    pub fn rho0() -> Self {
        Self {
            target_dimension: 0,
            persistence_floor: 0.10,
            exclude_essential: true,
        }
    }

    /// Squared persistence of loops living longer than 0.25.
    pub fn rho1() -> Self {
        Self {
            target_dimension: 1,
            persistence_floor: 0.25,
            exclude_essential: false,
        }
    }

    /// Whether `pair` contributes to the loss. Fails if it would contribute
    /// an infinite term.
    pub fn includes(&self, pair: &PersistencePair) -> Result<bool> {
        if pair.is_essential() {
            return if self.exclude_essential {
                Ok(false)
            } else {
                Err(Error::InfiniteLoss)
            };
        }
        Ok(pair.death - pair.birth > self.persistence_floor)
    }

    fn check(&self, diagram: &PersistenceDiagram) -> Result<()> {
        if diagram.dimension() != self.target_dimension {
            return Err(Error::DimensionMismatch {
                expected: self.target_dimension,
                found: diagram.dimension(),
            });
        }
        Ok(())
    }
}

impl std::str::FromStr for LossSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho0" => Ok(Self::rho0()),
            "rho1" => Ok(Self::rho1()),
            other => Err(Error::InvalidConfig(format!(
                "unknown loss preset `{other}` (expected rho0 or rho1)"
            ))),
        }
    }
}

pub fn eval_loss(spec: &LossSpec, diagram: &PersistenceDiagram) -> Result<f64> {
    spec.check(diagram)?;
    let mut total = 0.0;
    for pair in diagram.all_pairs() {
        if spec.includes(pair)? {
            let r = pair.death - pair.birth;
            total += r * r;
        }
    }
    Ok(total)
}

/// Derivative of the loss with respect to one pair's birth and death.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDerivative {
    /// Index into [`PersistenceDiagram::all_pairs`].
    pub pair_index: usize,
    pub d_birth: f64,
    pub d_death: f64,
}

/// Derivatives for the included pairs, in diagram order. The threshold is
/// held fixed, so excluded pairs have zero derivative and are omitted.
pub fn loss_pair_derivatives(
    spec: &LossSpec,
    diagram: &PersistenceDiagram,
) -> Result<Vec<PairDerivative>> {
    spec.check(diagram)?;
    let mut out = Vec::new();
    for (pair_index, pair) in diagram.all_pairs().iter().enumerate() {
        if spec.includes(pair)? {
            let r = pair.death - pair.birth;
            out.push(PairDerivative {
                pair_index,
                d_birth: -2.0 * r,
                d_death: 2.0 * r,
            });
        }
    }
    Ok(out)
}
