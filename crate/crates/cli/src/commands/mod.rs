mod check_grad;
mod diagram;
mod generate;
mod optimize;
mod render;

pub use check_grad::check_grad;
pub use diagram::diagram;
pub use generate::generate;
pub use optimize::optimize;
pub use render::render;

use persgrad::{Error, KernelSpec, LossSpec, RadiusCap};

use crate::failure::{Failure, DEGENERATE, USAGE};
use crate::ModelArgs;

/// Degenerate geometry maps to its own exit code; anything else the library
/// rejects is bad input.
pub fn library_failure(error: Error) -> Failure {
    let code = match error {
        Error::DegeneratePair(..) | Error::DegenerateEdge(..) | Error::NonFiniteGradient { .. } => {
            DEGENERATE
        }
        _ => USAGE,
    };
    Failure {
        code,
        error: error.into(),
    }
}

/// Model settings with defaults filled in.
pub struct Model {
    pub loss: LossSpec,
    pub lambda: f64,
    pub kernel: KernelSpec,
    pub max_dim: Option<usize>,
    pub radius_cap: RadiusCap,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<Model, Failure> {
        let loss = match &self.loss {
            Some(name) => name.parse().map_err(library_failure)?,
            None => LossSpec::rho0(),
        };
        let kernel = KernelSpec::new(self.kernel.unwrap_or_default(), self.scale.unwrap_or(1.0))
            .map_err(library_failure)?;
        Ok(Model {
            loss,
            lambda: self.lambda.unwrap_or(1.0),
            kernel,
            max_dim: self.max_dim,
            radius_cap: self.radius_cap.unwrap_or_default(),
        })
    }
}
