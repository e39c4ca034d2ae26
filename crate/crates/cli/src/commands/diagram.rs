use std::fmt::Write as _;
use std::io::Write as _;

use anyhow::Context;
use persgrad::{rips_persistence, Coords, PersistencePair, Simplex};

use super::library_failure;
use crate::failure::{CliResult, ExitCodeExt};
use crate::formats::read_points;
use crate::{DiagramArgs, DiagramFormat};

pub fn format_value(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        x.to_string()
    }
}

fn vertices(s: &Simplex) -> String {
    let v: Vec<String> = s.vertices().iter().map(usize::to_string).collect();
    v.join(" ")
}

pub fn diagram(args: DiagramArgs) -> CliResult<u8> {
    let cloud = read_points(&args.input)?;
    let distances = cloud.pairwise_distances(Coords::Current);
    let diagrams =
        rips_persistence(&distances, args.max_dim, args.radius_cap).map_err(library_failure)?;

    let mut out = String::new();
    if args.format == DiagramFormat::Csv {
        out.push_str("dimension,birth,death,birth_simplex,death_simplex\n");
    }
    for d in &diagrams {
        let mut pairs: Vec<&PersistencePair> = if args.include_zero {
            d.all_pairs().iter().collect()
        } else {
            d.pairs().collect()
        };
        pairs.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        });
        match args.format {
            DiagramFormat::Text => {
                let listed: Vec<String> = pairs
                    .iter()
                    .map(|p| format!("({}, {})", format_value(p.birth), format_value(p.death)))
                    .collect();
                let _ = write!(out, "dim {}:", d.dimension());
                if !listed.is_empty() {
                    let _ = write!(out, " {}", listed.join(", "));
                }
                out.push('\n');
                for p in &pairs {
                    let _ = writeln!(
                        out,
                        "  ({}, {})  birth {}  death {}",
                        format_value(p.birth),
                        format_value(p.death),
                        p.birth_simplex,
                        p.death_simplex.map_or("-".to_string(), |s| s.to_string())
                    );
                }
            }
            DiagramFormat::Csv => {
                for p in &pairs {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        p.dimension,
                        format_value(p.birth),
                        format_value(p.death),
                        vertices(&p.birth_simplex),
                        p.death_simplex.as_ref().map_or(String::new(), vertices)
                    );
                }
            }
        }
    }
    match &args.output {
        Some(path) => std::fs::write(path, out)
            .with_context(|| format!("cannot write {}", path.display()))
            .or_io()?,
        None => std::io::stdout()
            .write_all(out.as_bytes())
            .context("cannot write to stdout")
            .or_io()?,
    }
    Ok(0)
}
