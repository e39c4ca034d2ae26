mod common;

use common::{perturbed_cloud, random_cloud};
use persgrad::error::Error;
use persgrad::optim::{run_optimization, run_optimization_with, OptimConfig, RunStatus};
use persgrad::regularizer::build_weights;
use persgrad::{total_loss_and_grad, LossSpec, PointCloud};

/// Textbook Adam with bias correction, kept separate from the library's.
struct AdamOracle {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl AdamOracle {
    fn step(&mut self, x: &mut [f64], g: &[f64], cfg: &OptimConfig) {
        self.t += 1;
        for k in 0..x.len() {
            self.m[k] = cfg.beta1 * self.m[k] + (1.0 - cfg.beta1) * g[k];
            self.v[k] = cfg.beta2 * self.v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
            let m_hat = self.m[k] / (1.0 - cfg.beta1.powi(self.t));
            let v_hat = self.v[k] / (1.0 - cfg.beta2.powi(self.t));
            x[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
}

#[test]
fn matches_hand_rolled_adam() {
    let cloud = random_cloud(3, 12, 2);
    let config = OptimConfig {
        steps: 25,
        ..OptimConfig::default()
    };
    let out = run_optimization(&cloud, &config).unwrap();
    assert_eq!(out.status, RunStatus::Completed);

    let weights = build_weights(&cloud, &config.kernel);
    let params = config.filtration_params();
    let mut probe = cloud.clone();
    let mut adam = AdamOracle {
        m: vec![0.0; cloud.current().len()],
        v: vec![0.0; cloud.current().len()],
        t: 0,
    };
    for record in &out.trajectory.records {
        let (report, grad) =
            total_loss_and_grad(&probe, &params, &config.loss, &weights, config.lambda).unwrap();
        assert!((report.total - record.loss).abs() <= 1e-12 * record.loss.abs().max(1.0));
        if record.step < config.steps {
            adam.step(probe.current_mut(), grad.values(), &config);
        }
    }
    for (a, b) in probe.current().iter().zip(out.cloud.current()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn runs_are_bit_identical() {
    let cloud = perturbed_cloud(11, 30, 2, 0.02);
    let config = OptimConfig {
        steps: 40,
        snapshot_interval: 10,
        ..OptimConfig::default()
    };
    let a = run_optimization(&cloud, &config).unwrap();
    let b = run_optimization(&cloud, &config).unwrap();
    assert_eq!(a.trajectory.records.len(), 41);
    for (x, y) in a.trajectory.records.iter().zip(&b.trajectory.records) {
        assert_eq!(x.loss.to_bits(), y.loss.to_bits());
        assert_eq!(x.rho.to_bits(), y.rho.to_bits());
        assert_eq!(x.tau.to_bits(), y.tau.to_bits());
        assert_eq!(x.points, y.points);
    }
    let bits = |c: &PointCloud| c.current().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.cloud), bits(&b.cloud));
}

#[test]
fn initial_coordinates_survive_any_run() {
    let cloud = random_cloud(5, 20, 3);
    for steps in [0, 1, 30] {
        let out = run_optimization(
            &cloud,
            &OptimConfig {
                steps,
                ..OptimConfig::default()
            },
        )
        .unwrap();
        assert_eq!(out.cloud.initial(), cloud.initial());
        if steps == 0 {
            assert_eq!(out.cloud.current(), cloud.current());
        }
    }
}

#[test]
fn records_are_consistent_and_snapshots_land_on_schedule() {
    let cloud = random_cloud(8, 25, 2);
    for lambda in [0.0, 0.5, 2.0] {
        let config = OptimConfig {
            steps: 23,
            snapshot_interval: 5,
            lambda,
            ..OptimConfig::default()
        };
        let mut streamed = Vec::new();
        let out = run_optimization_with(&cloud, &config, |r| streamed.push(r.clone())).unwrap();
        assert_eq!(streamed, out.trajectory.records);
        assert_eq!(out.trajectory.records.len(), 24);
        for (i, r) in out.trajectory.records.iter().enumerate() {
            assert_eq!(r.step, i);
            assert!(r.is_consistent(1e-12));
            let expected = r.rho + lambda * r.tau;
            assert!((r.loss - expected).abs() <= 1e-12 * expected.abs().max(f64::MIN_POSITIVE));
            let snap = i % 5 == 0 || i == 23;
            assert_eq!(r.points.is_some(), snap, "step {i}");
        }
        let last = out.trajectory.records.last().unwrap();
        assert_eq!(last.points.as_ref().unwrap(), &out.cloud.current_rows());
    }
}

#[test]
fn loss_falls_on_a_two_blob_cloud() {
    let cloud = PointCloud::new(&[[0.0, 0.0], [0.05, 0.0], [0.6, 0.0], [0.65, 0.05]]).unwrap();
    let config = OptimConfig {
        steps: 200,
        lambda: 0.0,
        ..OptimConfig::default()
    };
    let out = run_optimization(&cloud, &config).unwrap();
    let first = out.trajectory.records[0].rho;
    let last = out.trajectory.records.last().unwrap().rho;
    assert!(first > 0.2);
    assert!(last < 0.1 * first, "{first} -> {last}");
}

#[test]
fn coincident_weighted_pair_aborts_with_partial_trajectory() {
    let initial = [[0.0, 0.0], [0.5, 0.0], [3.0, 0.0]];
    let current = [[0.0, 0.0], [0.0, 0.0], [3.0, 0.0]];
    let cloud = PointCloud::with_current(&initial, &current).unwrap();
    let config = OptimConfig {
        steps: 10,
        loss: LossSpec::new(0, f64::INFINITY, true).unwrap(),
        ..OptimConfig::default()
    };
    let out = run_optimization(&cloud, &config).unwrap();
    assert!(matches!(
        out.status,
        RunStatus::Aborted {
            step: 0,
            error: Error::DegeneratePair(0, 1)
        }
    ));
    assert!(out.trajectory.records.is_empty());
    assert_eq!(out.cloud.current(), cloud.current());
}

#[test]
fn invalid_configs_are_rejected_up_front() {
    let cloud = random_cloud(1, 5, 2);
    for config in [
        OptimConfig {
            learning_rate: 0.0,
            ..OptimConfig::default()
        },
        OptimConfig {
            beta1: 1.0,
            ..OptimConfig::default()
        },
        OptimConfig {
            lambda: -1.0,
            ..OptimConfig::default()
        },
    ] {
        assert!(matches!(
            run_optimization(&cloud, &config),
            Err(Error::InvalidConfig(_))
        ));
    }
}
