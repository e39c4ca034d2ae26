use std::path::Path;

use anyhow::Context;
use persgrad::experiments::GroupLabels;

use crate::failure::{CliResult, ExitCodeExt, Failure};
use crate::formats::{read_labels, read_points, read_trajectory, sibling_labels};
use crate::svg::{render_frame, ViewBox};
use crate::RenderArgs;

struct Frame {
    name: String,
    title: String,
    points: Vec<Vec<f64>>,
}

fn is_trajectory(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl")
}

pub fn render(args: RenderArgs) -> CliResult<u8> {
    let frames: Vec<Frame> = if is_trajectory(&args.input) {
        read_trajectory(&args.input)?
            .into_iter()
            .filter_map(|r| {
                r.points.map(|points| Frame {
                    name: format!("step_{:05}.svg", r.step),
                    title: format!("step {}", r.step),
                    points,
                })
            })
            .collect()
    } else {
        let cloud = read_points(&args.input)?;
        let stem = args
            .input
            .file_stem()
            .map_or("points".into(), |s| s.to_string_lossy().into_owned());
        vec![Frame {
            name: format!("{stem}.svg"),
            title: stem,
            points: cloud.current_rows(),
        }]
    };
    if frames.is_empty() {
        return Err(Failure::usage(format!(
            "{} has no coordinate snapshots; rerun optimize with --snapshot-interval",
            args.input.display()
        )));
    }
    let count = frames[0].points.len();
    if let Some(bad) = frames.iter().find(|f| f.points.len() != count) {
        return Err(Failure::usage(format!(
            "{} has {} points, expected {count}",
            bad.title,
            bad.points.len()
        )));
    }

    let labels: Option<GroupLabels> = match &args.labels {
        Some(path) => Some(read_labels(path)?),
        None if is_trajectory(&args.input) => {
            let path = args.input.with_file_name("labels.csv");
            if path.exists() {
                Some(read_labels(&path)?)
            } else {
                None
            }
        }
        None => sibling_labels(&args.input, count)?,
    };
    if let Some(l) = &labels {
        if l.len() != count {
            return Err(Failure::usage(format!(
                "{} labels for {count} points",
                l.len()
            )));
        }
    }

    let view = ViewBox::covering(frames.iter().map(|f| f.points.as_slice()));
    let label_slice = labels.as_ref().map(|l| l.0.as_slice());
    let write = |path: &Path, frame: &Frame| {
        let svg = render_frame(&frame.points, label_slice, &view, args.size, &frame.title);
        std::fs::write(path, svg)
            .with_context(|| format!("cannot write {}", path.display()))
            .or_io()
    };
    if frames.len() == 1 && args.output.extension().is_some_and(|e| e == "svg") {
        if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))
                .or_io()?;
        }
        write(&args.output, &frames[0])?;
        println!("wrote {}", args.output.display());
    } else {
        std::fs::create_dir_all(&args.output)
            .with_context(|| format!("cannot create {}", args.output.display()))
            .or_io()?;
        for frame in &frames {
            write(&args.output.join(&frame.name), frame)?;
        }
        println!("wrote {} frames to {}", frames.len(), args.output.display());
    }
    Ok(0)
}
