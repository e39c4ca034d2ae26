use persgrad::experiments::{generate as sample, DatasetSpec, Shape};

use super::library_failure;
use crate::failure::CliResult;
use crate::formats::{labels_path, write_labels, write_points};
use crate::GenerateArgs;

pub fn generate(args: GenerateArgs) -> CliResult<u8> {
    let spec = match args.shape {
        Shape::TwoClusters => DatasetSpec::two_clusters(args.n.unwrap_or(100), args.seed),
        Shape::Horseshoe => DatasetSpec::horseshoe(args.n.unwrap_or(300), args.seed),
    };
    let (cloud, labels) = sample(&spec).map_err(library_failure)?;
    write_points(&args.output, &cloud.current_rows(), args.header)?;
    let labels_file = labels_path(&args.output);
    write_labels(&labels_file, &labels)?;
    println!(
        "wrote {} points to {} and labels to {}",
        cloud.len(),
        args.output.display(),
        labels_file.display()
    );
    Ok(0)
}
