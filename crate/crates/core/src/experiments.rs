//! Synthetic datasets and the group distortion metric.
//!
//! Two shapes are provided: a pair of compact clusters, and a thick circular
//! arc with an opening (a horseshoe). Each point carries the group it was
//! generated in, so the distortion metric can check whether groups moved
//! rigidly without having to recover them by clustering.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::LossSpec;
use crate::persistence::rips_persistence;
use crate::point_cloud::{euclidean, Coords, PointCloud};
use crate::regularizer::KernelSpec;
use crate::rips::RadiusCap;

pub const CLUSTER_A: usize = 0;
pub const CLUSTER_B: usize = 1;
pub const ARM_START: usize = 0;
pub const BODY: usize = 1;
pub const ARM_END: usize = 2;
pub const HORSESHOE_ARMS: [usize; 2] = [ARM_START, ARM_END];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    TwoClusters,
    Horseshoe,
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-clusters" => Ok(Shape::TwoClusters),
            "horseshoe" => Ok(Shape::Horseshoe),
            other => Err(Error::InvalidConfig(format!(
                "unknown shape `{other}` (expected two-clusters or horseshoe)"
            ))),
        }
    }
}

/// Two uniform disks centred at `(-separation / 2, 0)` and
/// `(separation / 2, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoClusterGeometry {
    pub separation: f64,
    pub radius: f64,
}

impl Default for TwoClusterGeometry {
    fn default() -> Self {
        Self {
            separation: 2.0,
            radius: 0.25,
        }
    }
}

/// An annular arc around the origin with its opening centred on the +y axis.
/// Angles are in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HorseshoeGeometry {
    pub radius: f64,
    pub thickness: f64,
    pub opening_deg: f64,
    /// Angular length of each arm group, measured from the arc's ends.
    pub arm_deg: f64,
}

impl Default for HorseshoeGeometry {
    fn default() -> Self {
        Self {
            radius: 1.0,
            thickness: 0.1,
            opening_deg: 60.0,
            arm_deg: 45.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub shape: Shape,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub two_clusters: TwoClusterGeometry,
    #[serde(default)]
    pub horseshoe: HorseshoeGeometry,
}

impl DatasetSpec {
    pub fn two_clusters(n: usize, seed: u64) -> Self {
        Self {
            shape: Shape::TwoClusters,
            n,
            seed,
            two_clusters: TwoClusterGeometry::default(),
            horseshoe: HorseshoeGeometry::default(),
        }
    }

    pub fn horseshoe(n: usize, seed: u64) -> Self {
        Self {
            shape: Shape::Horseshoe,
            ..Self::two_clusters(n, seed)
        }
    }
}

/// Group identifier per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupLabels(pub Vec<usize>);

impl GroupLabels {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, group: usize) -> usize {
        self.0.iter().filter(|&&g| g == group).count()
    }
}

pub fn generate(spec: &DatasetSpec) -> Result<(PointCloud, GroupLabels)> {
    match spec.shape {
        Shape::TwoClusters => gen_two_clusters(spec),
        Shape::Horseshoe => gen_horseshoe(spec),
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidGeometry(msg)
}

pub fn gen_two_clusters(spec: &DatasetSpec) -> Result<(PointCloud, GroupLabels)> {
    let g = spec.two_clusters;
    if spec.n < 2 {
        return Err(invalid(format!("need at least 2 points, got {}", spec.n)));
    }
    if !(g.radius > 0.0 && g.separation > 0.0) {
        return Err(invalid("radius and separation must be positive".into()));
    }
    let grouping_scale = KernelSpec::default().scale;
    if 2.0 * g.radius >= grouping_scale {
        return Err(invalid(format!(
            "cluster diameter {} must stay below the kernel scale {grouping_scale}",
            2.0 * g.radius
        )));
    }
    let floor = LossSpec::rho0().persistence_floor;
    let gap = g.separation - 2.0 * g.radius;
    if gap <= floor {
        return Err(invalid(format!(
            "cluster gap {gap} must exceed the persistence floor {floor}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let first = spec.n / 2;
    let mut points = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for k in 0..spec.n {
        let (cx, label) = if k < first {
            (-g.separation / 2.0, CLUSTER_A)
        } else {
            (g.separation / 2.0, CLUSTER_B)
        };
        let r = g.radius * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        points.push([cx + r * theta.cos(), r * theta.sin()]);
        labels.push(label);
    }
    Ok((PointCloud::new(&points)?, GroupLabels(labels)))
}

pub fn gen_horseshoe(spec: &DatasetSpec) -> Result<(PointCloud, GroupLabels)> {
    let g = spec.horseshoe;
    if spec.n < 2 {
        return Err(invalid(format!("need at least 2 points, got {}", spec.n)));
    }
    if !(g.radius > 0.0 && g.thickness >= 0.0 && g.thickness < 2.0 * g.radius) {
        return Err(invalid(
            "radius must be positive and thickness in [0, 2 * radius)".into(),
        ));
    }
    if !(0.0..360.0).contains(&g.opening_deg) || !(g.arm_deg >= 0.0) {
        return Err(invalid(
            "opening must lie in [0, 360) and arm length >= 0".into(),
        ));
    }
    let start = g.opening_deg / 2.0;
    let span = 360.0 - g.opening_deg;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut points = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let along = span * rng.random::<f64>();
        let r = g.radius + g.thickness * (rng.random::<f64>() - 0.5);
        let phi = (start + along).to_radians();
        points.push([r * phi.sin(), r * phi.cos()]);
        labels.push(if along < g.arm_deg {
            ARM_START
        } else if along > span - g.arm_deg {
            ARM_END
        } else {
            BODY
        });
    }
    let cloud = PointCloud::new(&points)?;

    let floor = LossSpec::rho1().persistence_floor;
    let d = cloud.pairwise_distances(Coords::Initial);
    let diagrams = rips_persistence(&d, 1, RadiusCap::Enclosing)?;
    let best = diagrams[1]
        .pairs()
        .map(|p| p.persistence())
        .fold(0.0, f64::max);
    if best <= floor {
        return Err(invalid(format!(
            "longest loop persistence {best:.4} does not exceed {floor}; \
             try more points, a thinner band or a smaller opening"
        )));
    }
    Ok((cloud, GroupLabels(labels)))
}

/// Root-mean-square change of within-group pairwise distances between the
/// initial and current coordinates, over every group.
pub fn distortion(cloud: &PointCloud, labels: &GroupLabels) -> Result<f64> {
    distortion_of(cloud, labels, |_| true)
}

/// [`distortion`] restricted to pairs inside the listed groups.
pub fn distortion_within(
    cloud: &PointCloud,
    labels: &GroupLabels,
    groups: &[usize],
) -> Result<f64> {
    distortion_of(cloud, labels, |g| groups.contains(&g))
}

fn distortion_of(
    cloud: &PointCloud,
    labels: &GroupLabels,
    keep: impl Fn(usize) -> bool,
) -> Result<f64> {
    if labels.len() != cloud.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} points",
            labels.len(),
            cloud.len()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..cloud.len() {
        let gi = labels.0[i];
        if !keep(gi) {
            continue;
        }
        for j in (i + 1)..cloud.len() {
            if labels.0[j] != gi {
                continue;
            }
            let d0 = euclidean(cloud.initial_point(i), cloud.initial_point(j));
            let r = d0 - cloud.distance(i, j);
            sum += r * r;
            count += 1;
        }
    }
    Ok(if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_clusters_default() {
        let (c, labels) = gen_two_clusters(&DatasetSpec::two_clusters(100, 42)).unwrap();
        assert_eq!(c.len(), 100);
        assert_eq!(labels.count(CLUSTER_A), 50);
        assert_eq!(labels.count(CLUSTER_B), 50);
        for i in 0..100 {
            for j in (i + 1)..100 {
                if labels.0[i] == labels.0[j] {
                    assert!(c.distance(i, j) < 1.0);
                }
            }
        }
        let again = gen_two_clusters(&DatasetSpec::two_clusters(100, 42)).unwrap();
        assert_eq!(again.0, c);
    }

    #[test]
    fn two_clusters_minimal() {
        let (c, labels) = gen_two_clusters(&DatasetSpec::two_clusters(2, 1)).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(labels.0, vec![CLUSTER_A, CLUSTER_B]);
    }

    #[test]
    fn two_clusters_validation() {
        let mut spec = DatasetSpec::two_clusters(10, 0);
        spec.two_clusters.radius = 0.6;
        assert!(matches!(
            gen_two_clusters(&spec),
            Err(Error::InvalidGeometry(_))
        ));
        spec.two_clusters.radius = 0.25;
        spec.two_clusters.separation = 0.55;
        assert!(matches!(
            gen_two_clusters(&spec),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(gen_two_clusters(&DatasetSpec::two_clusters(1, 0)).is_err());
    }

    #[test]
    fn horseshoe_full_circle() {
        let mut spec = DatasetSpec::horseshoe(80, 3);
        spec.horseshoe.opening_deg = 0.0;
        let (c, _) = gen_horseshoe(&spec).unwrap();
        assert_eq!(c.len(), 80);
    }

    #[test]
    fn horseshoe_determinism_and_labels() {
        let spec = DatasetSpec::horseshoe(120, 9);
        let (a, la) = gen_horseshoe(&spec).unwrap();
        let (b, lb) = gen_horseshoe(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(la, lb);
        assert!(la.count(ARM_START) > 0 && la.count(ARM_END) > 0 && la.count(BODY) > 0);
    }

    #[test]
    fn horseshoe_too_sparse() {
        let mut spec = DatasetSpec::horseshoe(6, 0);
        spec.horseshoe.opening_deg = 300.0;
        assert!(matches!(
            gen_horseshoe(&spec),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn distortion_examples() {
        let (mut c, labels) = gen_two_clusters(&DatasetSpec::two_clusters(20, 5)).unwrap();
        assert_eq!(distortion(&c, &labels).unwrap(), 0.0);

        // Translate cluster B.
        let mut moved = c.current().to_vec();
        for i in 0..20 {
            if labels.0[i] == CLUSTER_B {
                moved[2 * i] += 0.7;
                moved[2 * i + 1] -= 0.3;
            }
        }
        c.set_current(&moved).unwrap();
        assert!(distortion(&c, &labels).unwrap() < 1e-12);

        // Scale cluster A about its centroid.
        let idx: Vec<usize> = (0..20).filter(|&i| labels.0[i] == CLUSTER_A).collect();
        let cx = idx.iter().map(|&i| moved[2 * i]).sum::<f64>() / idx.len() as f64;
        let cy = idx.iter().map(|&i| moved[2 * i + 1]).sum::<f64>() / idx.len() as f64;
        for &i in &idx {
            moved[2 * i] = cx + 2.0 * (moved[2 * i] - cx);
            moved[2 * i + 1] = cy + 2.0 * (moved[2 * i + 1] - cy);
        }
        c.set_current(&moved).unwrap();
        assert!(distortion(&c, &labels).unwrap() > 0.0);
        assert!(distortion_within(&c, &labels, &[CLUSTER_B]).unwrap() < 1e-12);
        assert!(distortion(&c, &GroupLabels(vec![0; 3])).is_err());
    }
}
