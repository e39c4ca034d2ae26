//! Adam on point coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grad::{evaluate, DegenerateEdgePolicy, FiltrationParams, PointGradient};
use crate::losses::LossSpec;
use crate::point_cloud::PointCloud;
use crate::regularizer::{build_weights, KernelSpec};
use crate::rips::RadiusCap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub steps: usize,
    /// Coordinates are stored every this many steps, and at the last step.
    /// `0` disables snapshots.
    pub snapshot_interval: usize,
    pub lambda: f64,
    pub kernel: KernelSpec,
    pub loss: LossSpec,
    /// Defaults to the loss's target dimension.
    pub max_dim: Option<usize>,
    pub radius_cap: RadiusCap,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            steps: 500,
            snapshot_interval: 0,
            lambda: 1.0,
            kernel: KernelSpec::default(),
            loss: LossSpec::rho0(),
            max_dim: None,
            radius_cap: RadiusCap::Enclosing,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidConfig(what));
        if !(self.learning_rate > 0.0) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return bad(format!("{name} must lie in [0, 1), got {b}"));
            }
        }
        if !(self.epsilon >= 0.0) {
            return bad(format!("epsilon must be >= 0, got {}", self.epsilon));
        }
        if !(self.lambda >= 0.0) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        KernelSpec::new(self.kernel.family, self.kernel.scale)?;
        LossSpec::new(
            self.loss.target_dimension,
            self.loss.persistence_floor,
            self.loss.exclude_essential,
        )?;
        self.radius_cap.validate()
    }

    pub fn filtration_params(&self) -> FiltrationParams {
        FiltrationParams {
            max_dim: self.max_dim.unwrap_or(self.loss.target_dimension),
            radius_cap: self.radius_cap,
        }
    }
}

/// First and second moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(points: usize, dim: usize) -> Self {
        Self {
            first: vec![0.0; points * dim],
            second: vec![0.0; points * dim],
            t: 0,
        }
    }
}

/// One bias-corrected Adam update of the current coordinates. The cloud is
/// left untouched when the gradient has a non-finite entry.
pub fn adam_step(
    state: &mut AdamState,
    gradient: &PointGradient,
    config: &OptimConfig,
    cloud: &mut PointCloud,
) -> Result<()> {
    let g = gradient.values();
    if g.len() != cloud.current().len() || state.first.len() != g.len() {
        return Err(Error::ShapeMismatch(format!(
            "gradient has {} entries, cloud {}, state {}",
            g.len(),
            cloud.current().len(),
            state.first.len()
        )));
    }
    if let Some(point) = gradient.first_non_finite() {
        return Err(Error::NonFiniteGradient { point });
    }
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - config.beta1.powi(t);
    let c2 = 1.0 - config.beta2.powi(t);
    let x = cloud.current_mut();
    for k in 0..g.len() {
        let m = config.beta1 * state.first[k] + (1.0 - config.beta1) * g[k];
        let v = config.beta2 * state.second[k] + (1.0 - config.beta2) * g[k] * g[k];
        state.first[k] = m;
        state.second[k] = v;
        x[k] -= config.learning_rate * (m / c1) / ((v / c2).sqrt() + config.epsilon);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub loss: f64,
    pub rho: f64,
    pub tau: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

impl TrajectoryRecord {
    /// Whether `loss` equals `rho + lambda * tau` to `rel_tol`.
    pub fn is_consistent(&self, rel_tol: f64) -> bool {
        let expected = self.rho + self.lambda * self.tau;
        (self.loss - expected).abs() <= rel_tol * expected.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    /// The run stopped at `step`; records up to `step - 1` are kept.
    Aborted {
        step: usize,
        error: Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub cloud: PointCloud,
    pub trajectory: Trajectory,
    pub status: RunStatus,
    /// Critical edges dropped because they had zero length.
    pub skipped_edges: usize,
}

/// Runs `config.steps` Adam steps on the regularized loss. Returns whatever
/// was completed even if a step fails; only invalid configurations are
/// reported as `Err`.
pub fn run_optimization(cloud: &PointCloud, config: &OptimConfig) -> Result<RunOutcome> {
    run_optimization_with(cloud, config, |_| {})
}

/// [`run_optimization`] with a callback invoked on every record as it is
/// produced.
pub fn run_optimization_with(
    cloud: &PointCloud,
    config: &OptimConfig,
    mut on_record: impl FnMut(&TrajectoryRecord),
) -> Result<RunOutcome> {
    config.validate()?;
    let params = config.filtration_params();
    let weights = build_weights(cloud, &config.kernel);
    let mut cloud = cloud.clone();
    let mut state = AdamState::new(cloud.len(), cloud.dim());
    let mut trajectory = Trajectory::default();
    let mut status = RunStatus::Completed;
    let mut skipped_edges = 0;

    for step in 0..=config.steps {
        let (report, grad) = match evaluate(
            &cloud,
            &params,
            &config.loss,
            &weights,
            config.lambda,
            DegenerateEdgePolicy::Skip,
        ) {
            Ok(v) => v,
            Err(error) => {
                status = RunStatus::Aborted { step, error };
                break;
            }
        };
        skipped_edges += report.skipped_edges;
        let snapshot = (config.snapshot_interval > 0 && step % config.snapshot_interval == 0)
            || (config.snapshot_interval > 0 && step == config.steps);
        let record = TrajectoryRecord {
            step,
            loss: report.total,
            rho: report.rho,
            tau: report.tau,
            lambda: config.lambda,
            points: snapshot.then(|| cloud.current_rows()),
        };
        on_record(&record);
        trajectory.records.push(record);
        if step == config.steps {
            break;
        }
        if let Err(error) = adam_step(&mut state, &grad, config, &mut cloud) {
            status = RunStatus::Aborted {
                step: step + 1,
                error,
            };
            break;
        }
    }
    Ok(RunOutcome {
        cloud,
        trajectory,
        status,
        skipped_edges,
    })
}
