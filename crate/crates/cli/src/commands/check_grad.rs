use persgrad::grad::{finite_difference_check, FdReport};
use persgrad::regularizer::build_weights;
use persgrad::{FiltrationParams, LossSpec, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::library_failure;
use crate::failure::{CliResult, Failure, CHECK_FAILED};
use crate::formats::read_points;
use crate::CheckGradArgs;

fn load(args: &CheckGradArgs, rng: &mut ChaCha8Rng) -> CliResult<PointCloud> {
    let initial = match (&args.input, args.random) {
        (Some(path), _) => read_points(path)?.initial_rows(),
        (None, Some(m)) => (0..m)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect(),
        (None, None) => return Err(Failure::usage("give --input or --random")),
    };
    if !(args.jitter >= 0.0) {
        return Err(Failure::usage(format!(
            "jitter must be >= 0, got {}",
            args.jitter
        )));
    }
    let current: Vec<Vec<f64>> = initial
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| x + args.jitter * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        })
        .collect();
    PointCloud::with_current(&initial, &current).map_err(library_failure)
}

fn describe(k: usize, dim: usize) -> String {
    format!("coordinate {k} (point {}, axis {})", k / dim, k % dim)
}

pub fn check_grad(args: CheckGradArgs) -> CliResult<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let cloud = load(&args, &mut rng)?;
    let model = args.model.resolve()?;
    let loss = if args.regularizer_only {
        LossSpec::new(model.loss.target_dimension, f64::INFINITY, true).map_err(library_failure)?
    } else {
        model.loss
    };
    let params = FiltrationParams {
        max_dim: model.max_dim.unwrap_or(loss.target_dimension),
        radius_cap: model.radius_cap,
    };
    let weights = build_weights(&cloud, &model.kernel);
    let report: FdReport =
        finite_difference_check(&cloud, &params, &loss, &weights, model.lambda, args.h)
            .map_err(library_failure)?;
    let passed = report.passes(args.tolerance);
    let dim = cloud.dim();

    if args.json {
        let value = json!({
            "coordinates": report.analytic.len(),
            "max_rel_error": report.max_rel_error,
            "max_abs_error": report.max_abs_error,
            "worst": report.worst,
            "unstable": report.unstable,
            "h": args.h,
            "tolerance": args.tolerance,
            "passed": passed,
        });
        println!("{value}");
    } else {
        println!(
            "{} points, {} coordinates, h = {:e}, lambda = {}",
            cloud.len(),
            report.analytic.len(),
            args.h,
            model.lambda
        );
        if report.unstable.is_empty() {
            println!("unstable coordinates: none");
        } else {
            println!("unstable coordinates ({}):", report.unstable.len());
            for &k in &report.unstable {
                println!("  {}", describe(k, dim));
            }
        }
        match report.worst {
            Some(k) => println!(
                "max relative error {:e} at {}",
                report.max_rel_error,
                describe(k, dim)
            ),
            None => println!("no stable coordinates to compare"),
        }
        println!("max absolute error {:e}", report.max_abs_error);
        println!(
            "{}: tolerance {:e}",
            if passed { "pass" } else { "FAIL" },
            args.tolerance
        );
    }
    Ok(if passed { 0 } else { CHECK_FAILED })
}
