//! Gradients of the regularized loss with respect to point coordinates.
//!
//! A diagram loss depends on the points only through the birth and death
//! values of its pairs. Each of those values is the length of the longest
//! edge of a critical simplex, so its gradient lives on the two endpoints of
//! that edge: one pair touches at most four points. The grouping term's
//! gradient is added on top, scaled by `lambda`.

use crate::error::{Error, Result};
use crate::losses::{loss_pair_derivatives, LossSpec};
use crate::persistence::{rips_persistence, PersistenceDiagram, PersistencePair};
use crate::point_cloud::{Coords, DistanceMatrix, PointCloud};
use crate::regularizer::{tau, tau_gradient, RegularizerWeights};
use crate::rips::{max_edge_unchecked, RadiusCap, Simplex, MAX_HOMOLOGY_DIM};

/// Critical edges shorter than this have no usable direction.
pub const DEGENERATE_EDGE: f64 = 1e-12;

/// One gradient vector per point, row-major like [`PointCloud::current`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointGradient {
    dim: usize,
    values: Vec<f64>,
}

impl PointGradient {
    pub fn zeros(points: usize, dim: usize) -> Self {
        Self {
            dim,
            values: vec![0.0; points * dim],
        }
    }

    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.len() % dim != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not form rows of {dim}",
                values.len()
            )));
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_points(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Adds `coef * diff` to point `i` and subtracts it from point `j`.
    pub(crate) fn add_edge(&mut self, i: usize, j: usize, coef: f64, diff: &[f64]) {
        let n = self.dim;
        for k in 0..n {
            self.values[i * n + k] += coef * diff[k];
            self.values[j * n + k] -= coef * diff[k];
        }
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &PointGradient, scale: f64) -> Result<()> {
        if other.values.len() != self.values.len() || other.dim != self.dim {
            return Err(Error::ShapeMismatch("gradient shapes differ".into()));
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
        Ok(())
    }

    /// Indices of points with any non-zero component.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_points())
            .filter(|&i| self.point(i).iter().any(|&g| g != 0.0))
            .collect()
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.values
            .iter()
            .position(|g| !g.is_finite())
            .map(|k| k / self.dim)
    }
}

/// How the filtration is built at each evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiltrationParams {
    /// Highest homology dimension computed. Must cover the loss's target.
    pub max_dim: usize,
    pub radius_cap: RadiusCap,
}

impl FiltrationParams {
    /// Just enough dimensions for `loss`, capped at the enclosing radius.
    pub fn for_loss(loss: &LossSpec) -> Self {
        Self {
            max_dim: loss.target_dimension,
            radius_cap: RadiusCap::Enclosing,
        }
    }

    fn validate(&self, loss: &LossSpec) -> Result<()> {
        if self.max_dim > MAX_HOMOLOGY_DIM {
            return Err(Error::DimensionTooLarge(self.max_dim));
        }
        if self.max_dim < loss.target_dimension {
            return Err(Error::InvalidConfig(format!(
                "max_dim {} does not reach the loss dimension {}",
                self.max_dim, loss.target_dimension
            )));
        }
        self.radius_cap.validate()
    }
}

/// What to do with a critical edge of zero length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegenerateEdgePolicy {
    #[default]
    Fail,
    /// Drop that edge's contribution and count it in the report.
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairContribution {
    pub pair: PersistencePair,
    pub included: bool,
    pub d_birth: f64,
    pub d_death: f64,
    /// `None` when the birth simplex is a vertex.
    pub birth_edge: Option<(usize, usize)>,
    pub death_edge: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeLossReport {
    pub total: f64,
    pub rho: f64,
    pub tau: f64,
    pub lambda: f64,
    /// One entry per non-zero-persistence pair of the target diagram.
    pub contributions: Vec<PairContribution>,
    /// Critical edges dropped under [`DegenerateEdgePolicy::Skip`].
    pub skipped_edges: usize,
}

fn critical_edge(simplex: &Simplex, distances: &DistanceMatrix) -> Option<(usize, usize)> {
    (simplex.dim() >= 1).then(|| max_edge_unchecked(simplex.vertices(), distances))
}

struct TopoTerms {
    rho: f64,
    grad: PointGradient,
    contributions: Vec<PairContribution>,
    skipped: usize,
}

fn topo_terms(
    cloud: &PointCloud,
    distances: &DistanceMatrix,
    diagram: &PersistenceDiagram,
    spec: &LossSpec,
    policy: DegenerateEdgePolicy,
) -> Result<TopoTerms> {
    let n = cloud.dim();
    let mut grad = PointGradient::zeros(cloud.len(), n);
    let derivatives = loss_pair_derivatives(spec, diagram)?;
    let mut contributions = Vec::new();
    let mut rho = 0.0;
    let mut skipped = 0;
    let mut diff = vec![0.0; n];
    let mut next = derivatives.iter().peekable();

    for (idx, pair) in diagram.all_pairs().iter().enumerate() {
        let der = next.next_if(|d| d.pair_index == idx);
        if pair.is_zero_persistence() {
            continue;
        }
        let birth_edge = critical_edge(&pair.birth_simplex, distances);
        let death_edge = pair
            .death_simplex
            .as_ref()
            .and_then(|s| critical_edge(s, distances));
        let (d_birth, d_death) = der.map_or((0.0, 0.0), |d| (d.d_birth, d.d_death));
        if der.is_some() {
            let r = pair.death - pair.birth;
            rho += r * r;
            for (edge, coef) in [(birth_edge, d_birth), (death_edge, d_death)] {
                let Some((i, j)) = edge else { continue };
                let (a, b) = (cloud.point(i), cloud.point(j));
                for k in 0..n {
                    diff[k] = a[k] - b[k];
                }
                let len = distances.get(i, j);
                if len < DEGENERATE_EDGE {
                    match policy {
                        DegenerateEdgePolicy::Fail => return Err(Error::DegenerateEdge(i, j)),
                        DegenerateEdgePolicy::Skip => {
                            skipped += 1;
                            continue;
                        }
                    }
                }
                grad.add_edge(i, j, coef / len, &diff);
            }
        }
        contributions.push(PairContribution {
            pair: *pair,
            included: der.is_some(),
            d_birth,
            d_death,
            birth_edge,
            death_edge,
        });
    }
    Ok(TopoTerms {
        rho,
        grad,
        contributions,
        skipped,
    })
}

fn target_diagram<'a>(
    diagrams: &'a [PersistenceDiagram],
    spec: &LossSpec,
) -> Result<&'a PersistenceDiagram> {
    diagrams
        .iter()
        .find(|d| d.dimension() == spec.target_dimension)
        .ok_or(Error::DimensionMismatch {
            expected: spec.target_dimension,
            found: diagrams.len().saturating_sub(1),
        })
}

/// Gradient of the diagram loss alone. `diagrams` must come from the
/// cloud's current coordinates.
pub fn topo_gradient(
    cloud: &PointCloud,
    diagrams: &[PersistenceDiagram],
    spec: &LossSpec,
) -> Result<PointGradient> {
    let distances = cloud.pairwise_distances(Coords::Current);
    let diagram = target_diagram(diagrams, spec)?;
    Ok(topo_terms(cloud, &distances, diagram, spec, DegenerateEdgePolicy::Fail)?.grad)
}

/// Recomputes persistence from the current coordinates and returns the
/// regularized loss `rho + lambda * tau` with its gradient.
pub fn total_loss_and_grad(
    cloud: &PointCloud,
    params: &FiltrationParams,
    spec: &LossSpec,
    weights: &RegularizerWeights,
    lambda: f64,
) -> Result<(CompositeLossReport, PointGradient)> {
    evaluate(
        cloud,
        params,
        spec,
        weights,
        lambda,
        DegenerateEdgePolicy::Fail,
    )
}

/// [`total_loss_and_grad`] with an explicit policy for zero-length critical
/// edges.
pub fn evaluate(
    cloud: &PointCloud,
    params: &FiltrationParams,
    spec: &LossSpec,
    weights: &RegularizerWeights,
    lambda: f64,
    policy: DegenerateEdgePolicy,
) -> Result<(CompositeLossReport, PointGradient)> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    params.validate(spec)?;
    let distances = cloud.pairwise_distances(Coords::Current);
    let diagrams = rips_persistence(&distances, params.max_dim, params.radius_cap)?;
    let diagram = target_diagram(&diagrams, spec)?;
    let topo = topo_terms(cloud, &distances, diagram, spec, policy)?;
    let tau_value = tau(cloud, weights)?;
    let mut grad = topo.grad;
    if lambda != 0.0 {
        grad.add_scaled(&tau_gradient(cloud, weights)?, lambda)?;
    }
    let report = CompositeLossReport {
        total: topo.rho + lambda * tau_value,
        rho: topo.rho,
        tau: tau_value,
        lambda,
        contributions: topo.contributions,
        skipped_edges: topo.skipped,
    };
    Ok((report, grad))
}

/// Loss value and the pairing that produced it, without gradients.
fn loss_and_pairing(
    cloud: &PointCloud,
    params: &FiltrationParams,
    spec: &LossSpec,
    weights: &RegularizerWeights,
    lambda: f64,
) -> Result<(f64, Vec<(Simplex, Option<Simplex>, bool)>)> {
    let distances = cloud.pairwise_distances(Coords::Current);
    let diagrams = rips_persistence(&distances, params.max_dim, params.radius_cap)?;
    let diagram = target_diagram(&diagrams, spec)?;
    let mut rho = 0.0;
    let mut pairing = Vec::with_capacity(diagram.len());
    for p in diagram.all_pairs() {
        let included = spec.includes(p)?;
        if included {
            let r = p.death - p.birth;
            rho += r * r;
        }
        pairing.push((p.birth_simplex, p.death_simplex, included));
    }
    Ok((rho + lambda * tau(cloud, weights)?, pairing))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    /// Over stable coordinates. Relative error is
    /// `|analytic - numeric| / max(1, |analytic|, |numeric|)`.
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    /// Flat coordinate index of the worst stable coordinate.
    pub worst: Option<usize>,
    /// Flat coordinate indices where the pairing changed under `+-h`.
    pub unstable: Vec<usize>,
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

impl FdReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error < tolerance
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / 1f64.max(analytic.abs()).max(numeric.abs())
}

/// Compares the analytic gradient with central differences of the full
/// pipeline, recomputing persistence at every perturbed point.
pub fn finite_difference_check(
    cloud: &PointCloud,
    params: &FiltrationParams,
    spec: &LossSpec,
    weights: &RegularizerWeights,
    lambda: f64,
    h: f64,
) -> Result<FdReport> {
    if !(h > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "step must be positive, got {h}"
        )));
    }
    let (_, grad) = total_loss_and_grad(cloud, params, spec, weights, lambda)?;
    let (_, base_pairing) = loss_and_pairing(cloud, params, spec, weights, lambda)?;
    let analytic = grad.values().to_vec();
    let mut numeric = vec![0.0; analytic.len()];
    let mut unstable = Vec::new();
    let mut probe = cloud.clone();
    let mut max_rel = 0.0;
    let mut max_abs = 0.0;
    let mut worst = None;
    for k in 0..analytic.len() {
        let x = cloud.current()[k];
        probe.current_mut()[k] = x + h;
        let (plus, plus_pairing) = loss_and_pairing(&probe, params, spec, weights, lambda)?;
        probe.current_mut()[k] = x - h;
        let (minus, minus_pairing) = loss_and_pairing(&probe, params, spec, weights, lambda)?;
        probe.current_mut()[k] = x;
        numeric[k] = (plus - minus) / (2.0 * h);
        if plus_pairing != base_pairing || minus_pairing != base_pairing {
            unstable.push(k);
            continue;
        }
        let rel = relative_error(analytic[k], numeric[k]);
        if worst.is_none() || rel > max_rel {
            max_rel = rel;
            worst = Some(k);
        }
        max_abs = f64::max(max_abs, (analytic[k] - numeric[k]).abs());
    }
    Ok(FdReport {
        max_rel_error: max_rel,
        max_abs_error: max_abs,
        worst,
        unstable,
        analytic,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::compute_persistence;
    use crate::regularizer::{build_weights, KernelSpec};
    use crate::rips::build_filtration;
    use approx::assert_relative_eq;

    fn all_pairs_loss() -> LossSpec {
        LossSpec::new(0, 0.0, true).unwrap()
    }

    fn nothing_loss() -> LossSpec {
        LossSpec::new(0, f64::INFINITY, true).unwrap()
    }

    #[test]
    fn two_point_gradient() {
        let c = PointCloud::new(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let f = build_filtration(&c, 0, RadiusCap::Unbounded).unwrap();
        let dg = compute_persistence(&f, 0).unwrap();
        let g = topo_gradient(&c, &dg, &all_pairs_loss()).unwrap();
        assert_relative_eq!(g.point(0)[0], -6.0, epsilon = 1e-12);
        assert_relative_eq!(g.point(0)[1], -8.0, epsilon = 1e-12);
        assert_relative_eq!(g.point(1)[0], 6.0, epsilon = 1e-12);
        assert_relative_eq!(g.point(1)[1], 8.0, epsilon = 1e-12);
    }

    #[test]
    fn nothing_included_is_zero() {
        let c = PointCloud::new(&[[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]]).unwrap();
        let w = build_weights(&c, &KernelSpec::default());
        let params = FiltrationParams::for_loss(&nothing_loss());
        let (report, g) = total_loss_and_grad(&c, &params, &nothing_loss(), &w, 1.0).unwrap();
        assert_eq!(report.total, 0.0);
        assert!(g.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn square_rho1_touches_four_points() {
        let c = PointCloud::new(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let f = build_filtration(&c, 1, RadiusCap::Unbounded).unwrap();
        let dg = compute_persistence(&f, 1).unwrap();
        let g = topo_gradient(&c, &dg, &LossSpec::rho1()).unwrap();
        // birth edge {2,3}; death triangle {0,2,3} has max edge (0,3)
        assert_eq!(g.support(), vec![0, 2, 3]);
        let r = 2f64.sqrt() - 1.0;
        // point 2 only feels the birth edge: -2r * (x2 - x3) / 1
        assert_relative_eq!(g.point(2)[0], 2.0 * r, epsilon = 1e-12);
        assert_eq!(g.point(2)[1], 0.0);
    }

    #[test]
    fn degenerate_edge() {
        let c = PointCloud::new(&[[0.0, 0.0], [1e-13, 0.0]]).unwrap();
        let w = build_weights(&c, &KernelSpec::default());
        let loss = all_pairs_loss();
        let params = FiltrationParams::for_loss(&loss);
        assert_eq!(
            total_loss_and_grad(&c, &params, &loss, &w, 0.0),
            Err(Error::DegenerateEdge(0, 1))
        );
        let (report, g) =
            evaluate(&c, &params, &loss, &w, 0.0, DegenerateEdgePolicy::Skip).unwrap();
        assert_eq!(report.skipped_edges, 1);
        assert!(g.support().is_empty());
    }

    #[test]
    fn rejects_bad_params() {
        let c = PointCloud::new(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let w = build_weights(&c, &KernelSpec::default());
        let params = FiltrationParams {
            max_dim: 0,
            radius_cap: RadiusCap::Enclosing,
        };
        assert!(total_loss_and_grad(&c, &params, &LossSpec::rho1(), &w, 0.0).is_err());
        assert!(total_loss_and_grad(&c, &params, &LossSpec::rho0(), &w, -1.0).is_err());
        assert!(finite_difference_check(&c, &params, &LossSpec::rho0(), &w, 0.0, 0.0).is_err());
    }

    #[test]
    fn two_point_fd() {
        let c = PointCloud::new(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let w = build_weights(&c, &KernelSpec::default());
        let loss = all_pairs_loss();
        let params = FiltrationParams::for_loss(&loss);
        let r = finite_difference_check(&c, &params, &loss, &w, 0.0, 1e-6).unwrap();
        assert!(r.unstable.is_empty());
        assert!(r.max_rel_error < 1e-6, "{r:?}");
    }

    #[test]
    fn tied_edges_are_unstable() {
        let c = PointCloud::new(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let w = build_weights(&c, &KernelSpec::default());
        let params = FiltrationParams::for_loss(&LossSpec::rho0());
        let r = finite_difference_check(&c, &params, &LossSpec::rho0(), &w, 0.0, 1e-6).unwrap();
        assert!(!r.unstable.is_empty());
    }
}
