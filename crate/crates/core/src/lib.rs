//! Gradient-based optimization of point clouds against persistence-diagram
//! losses, with a kernel-weighted grouping regularizer.
//!
//! The pipeline for one evaluation is:
//!
//! 1. build the Vietoris–Rips filtration of the current points
//!    ([`rips`]),
//! 2. compute persistence pairs with their critical simplices
//!    ([`persistence`]),
//! 3. evaluate a thresholded squared-persistence loss ([`losses`]) and the
//!    grouping term ([`regularizer`]),
//! 4. push the loss derivatives back onto the points through the longest
//!    edge of each critical simplex ([`grad`]).
//!
//! [`optim`] runs Adam over that, and [`experiments`] provides the two
//! synthetic datasets and a distortion metric.
//!
//! ```
//! use persgrad::{experiments, optim::{run_optimization, OptimConfig}};
//!
//! let (cloud, _labels) =
//!     experiments::gen_two_clusters(&experiments::DatasetSpec::two_clusters(20, 1)).unwrap();
//! let config = OptimConfig { steps: 5, ..OptimConfig::default() };
//! let out = run_optimization(&cloud, &config).unwrap();
//! assert_eq!(out.trajectory.records.len(), 6);
//! ```

pub mod error;
pub mod experiments;
pub mod grad;
pub mod losses;
pub mod optim;
pub mod persistence;
pub mod point_cloud;
pub mod regularizer;
pub mod rips;

pub use error::{Error, Result};
pub use grad::{total_loss_and_grad, FiltrationParams, PointGradient};
pub use losses::LossSpec;
pub use persistence::{compute_persistence, rips_persistence, PersistenceDiagram, PersistencePair};
pub use point_cloud::{Coords, DistanceMatrix, PointCloud};
pub use regularizer::{KernelFamily, KernelSpec, RegularizerWeights};
pub use rips::{build_filtration, Filtration, RadiusCap, Simplex};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/filtrations.md")]
    mod filtrations {}
    #[doc = include_str!("../../../book/src/persistence.md")]
    mod persistence {}
    #[doc = include_str!("../../../book/src/gradients.md")]
    mod gradients {}
    #[doc = include_str!("../../../book/src/regularizer.md")]
    mod regularizer {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
