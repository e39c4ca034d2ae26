use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use persgrad::experiments::{
    distortion, distortion_within, generate, DatasetSpec, GroupLabels, Shape,
};
use persgrad::optim::{run_optimization_with, OptimConfig, RunStatus, TrajectoryRecord};
use persgrad::PointCloud;
use serde_json::{json, Value};

use super::library_failure;
use crate::config::RunConfig;
use crate::failure::{CliResult, ExitCodeExt, Failure, DEGENERATE};
use crate::formats::{
    read_points, sibling_labels, write_json, write_labels, write_points, TrajectoryWriter,
};
use crate::{ModelArgs, OptimizeArgs};

enum Source {
    File(PathBuf),
    Dataset(DatasetSpec),
}

fn dataset(shape: Shape, n: Option<usize>, seed: Option<u64>) -> DatasetSpec {
    let seed = seed.unwrap_or(0);
    match shape {
        Shape::TwoClusters => DatasetSpec::two_clusters(n.unwrap_or(100), seed),
        Shape::Horseshoe => DatasetSpec::horseshoe(n.unwrap_or(300), seed),
    }
}

fn source(args: &OptimizeArgs, file: &RunConfig) -> CliResult<Source> {
    if let Some(path) = &args.input {
        return Ok(Source::File(path.clone()));
    }
    if let Some(shape) = args.shape {
        return Ok(Source::Dataset(dataset(shape, args.n, args.seed)));
    }
    match (&file.input, &file.dataset) {
        (Some(path), None) => Ok(Source::File(path.clone())),
        (None, Some(spec)) => Ok(Source::Dataset(*spec)),
        (Some(_), Some(_)) => Err(Failure::usage(
            "the config names both an input file and a dataset; keep one",
        )),
        (None, None) => Err(Failure::usage(
            "no input: pass --input, --shape, or a config with `input` or `[dataset]`",
        )),
    }
}

/// Defaults, then the config file, then flags.
fn optim_config(args: &OptimizeArgs, file: &RunConfig) -> CliResult<OptimConfig> {
    let mut c = OptimConfig::default();
    let flags = &args.model;
    let merged = ModelArgs {
        loss: flags.loss.clone().or(file.loss.clone()),
        lambda: flags.lambda.or(file.lambda),
        kernel: flags.kernel.or(file.kernel),
        scale: flags.scale.or(file.scale),
        max_dim: flags.max_dim.or(file.max_dim),
        radius_cap: flags.radius_cap.or(file.radius_cap()?),
    };
    let model = merged.resolve()?;
    c.loss = model.loss;
    c.lambda = model.lambda;
    c.kernel = model.kernel;
    c.max_dim = model.max_dim;
    c.radius_cap = model.radius_cap;
    let pick =
        |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
    c.learning_rate = pick(args.lr, file.learning_rate, c.learning_rate);
    c.beta1 = pick(args.beta1, file.beta1, c.beta1);
    c.beta2 = pick(args.beta2, file.beta2, c.beta2);
    c.epsilon = pick(args.epsilon, file.epsilon, c.epsilon);
    c.steps = args.steps.or(file.steps).unwrap_or(c.steps);
    c.snapshot_interval = args
        .snapshot_interval
        .or(file.snapshot_interval)
        .unwrap_or(c.snapshot_interval);
    c.validate().map_err(library_failure)?;
    Ok(c)
}

fn terms(r: &TrajectoryRecord) -> Value {
    json!({ "step": r.step, "loss": r.loss, "rho": r.rho, "tau": r.tau })
}

fn distortions(cloud: &PointCloud, labels: &GroupLabels) -> CliResult<Value> {
    let mut groups: Vec<usize> = labels.0.clone();
    groups.sort_unstable();
    groups.dedup();
    let mut per_group = BTreeMap::new();
    for g in groups {
        per_group.insert(
            g.to_string(),
            distortion_within(cloud, labels, &[g]).map_err(library_failure)?,
        );
    }
    Ok(json!({
        "all": distortion(cloud, labels).map_err(library_failure)?,
        "by_group": per_group,
    }))
}

pub fn optimize(args: OptimizeArgs) -> CliResult<u8> {
    let file = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let source = source(&args, &file)?;
    let config = optim_config(&args, &file)?;
    let out_dir = args
        .output
        .clone()
        .or(file.output.clone())
        .ok_or_else(|| Failure::usage("no output directory: pass --output or set `output`"))?;

    let (cloud, labels, input) = match source {
        Source::File(path) => {
            let cloud = read_points(&path)?;
            let labels = sibling_labels(&path, cloud.len())?;
            (cloud, labels, json!({ "file": path }))
        }
        Source::Dataset(spec) => {
            let (cloud, labels) = generate(&spec).map_err(library_failure)?;
            (cloud, Some(labels), json!({ "dataset": spec }))
        }
    };

    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .or_io()?;
    if let Some(labels) = &labels {
        write_labels(&out_dir.join("labels.csv"), labels)?;
    }
    write_points(&out_dir.join("initial.csv"), &cloud.initial_rows(), false)?;

    let mut writer = TrajectoryWriter::create(&out_dir.join("trajectory.jsonl"))?;
    let mut write_error = None;
    let outcome = run_optimization_with(&cloud, &config, |record| {
        if write_error.is_none() {
            write_error = writer.push(record).err();
        }
    })
    .map_err(library_failure)?;
    if let Some(e) = write_error {
        return Err(e);
    }
    write_points(
        &out_dir.join("final.csv"),
        &outcome.cloud.current_rows(),
        false,
    )?;

    let records = &outcome.trajectory.records;
    let (status, error, aborted_at) = match &outcome.status {
        RunStatus::Completed => ("completed", None, None),
        RunStatus::Aborted { step, error } => ("aborted", Some(error.to_string()), Some(*step)),
    };
    let summary = json!({
        "status": status,
        "error": error,
        "aborted_at_step": aborted_at,
        "records": records.len(),
        "input": input,
        "config": config,
        "initial": records.first().map(terms),
        "final": records.last().map(terms),
        "skipped_edges": outcome.skipped_edges,
        "distortion": labels.as_ref().map(|l| distortions(&outcome.cloud, l)).transpose()?,
    });
    write_json(&out_dir.join("summary.json"), &summary)?;

    if let (Some(first), Some(last)) = (records.first(), records.last()) {
        println!(
            "step {}: loss {:.6e} (rho {:.6e}, tau {:.6e}) -> step {}: loss {:.6e} (rho {:.6e}, tau {:.6e})",
            first.step, first.loss, first.rho, first.tau, last.step, last.loss, last.rho, last.tau
        );
    }
    println!("wrote {}", out_dir.display());
    match outcome.status {
        RunStatus::Completed => Ok(0),
        RunStatus::Aborted { step, error } => {
            eprintln!("run stopped at step {step}: {error}; partial outputs kept");
            Ok(DEGENERATE)
        }
    }
}
