mod common;

use common::random_cloud;
use persgrad::point_cloud::{Coords, DistanceMatrix};
use persgrad::rips::{build_filtration, build_filtration_from_distances, RadiusCap, Simplex};
use persgrad::PointCloud;
use proptest::prelude::*;

/// Every vertex subset of size 1..=max_vertices, with its diameter, by
/// bitmask enumeration.
fn brute_force(d: &DistanceMatrix, max_vertices: usize, cap: f64) -> Vec<(Vec<usize>, f64)> {
    let m = d.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let verts: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        if verts.len() > max_vertices {
            continue;
        }
        let mut diam: f64 = 0.0;
        for a in 0..verts.len() {
            for b in (a + 1)..verts.len() {
                diam = diam.max(d.get(verts[a], verts[b]));
            }
        }
        if diam <= cap {
            out.push((verts, diam));
        }
    }
    out.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.len().cmp(&b.0.len()))
            .then(a.0.cmp(&b.0))
    });
    out
}

fn as_pairs(f: &persgrad::Filtration) -> Vec<(Vec<usize>, f64)> {
    f.entries()
        .iter()
        .map(|e| (e.simplex.vertices().to_vec(), e.value))
        .collect()
}

#[test]
fn unit_square_matches_enumeration() {
    let sq = PointCloud::new(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
    let d = sq.pairwise_distances(Coords::Current);
    let f = build_filtration(&sq, 2, RadiusCap::Unbounded).unwrap();
    assert_eq!(as_pairs(&f), brute_force(&d, 4, f64::INFINITY));
    let r2 = 2f64.sqrt();
    let count = |dim: usize, v: f64| {
        f.entries()
            .iter()
            .filter(|e| e.simplex.dim() == dim && e.value == v)
            .count()
    };
    assert_eq!(count(0, 0.0), 4);
    assert_eq!(count(1, 1.0), 4);
    assert_eq!(count(1, r2), 2);
    assert_eq!(count(2, r2), 4);
    assert_eq!(count(3, r2), 1);
    assert_eq!(f.len(), 15);

    let f1 = build_filtration(&sq, 1, RadiusCap::Unbounded).unwrap();
    assert_eq!(as_pairs(&f1), brute_force(&d, 3, f64::INFINITY));
}

#[test]
fn random_clouds_match_enumeration() {
    for seed in 0..20 {
        let c = random_cloud(seed, 9, 2);
        let d = c.pairwise_distances(Coords::Current);
        for max_dim in 0..=2 {
            let f = build_filtration(&c, max_dim, RadiusCap::Unbounded).unwrap();
            assert_eq!(as_pairs(&f), brute_force(&d, max_dim + 2, f64::INFINITY));
            let cap = d.enclosing_radius();
            let f = build_filtration(&c, max_dim, RadiusCap::Enclosing).unwrap();
            assert_eq!(as_pairs(&f), brute_force(&d, max_dim + 2, cap));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn faces_come_first(seed in any::<u64>(), m in 1usize..=12, max_dim in 0usize..=2) {
        let c = random_cloud(seed, m, 2);
        let f = build_filtration(&c, max_dim, RadiusCap::Unbounded).unwrap();
        let pos: std::collections::HashMap<Simplex, usize> =
            f.entries().iter().enumerate().map(|(i, e)| (e.simplex, i)).collect();
        for (i, e) in f.entries().iter().enumerate() {
            prop_assert!(e.value >= 0.0);
            if e.simplex.dim() == 0 {
                prop_assert_eq!(e.value, 0.0);
            }
            for face in e.simplex.facets() {
                let j = pos[&face];
                prop_assert!(j < i);
                prop_assert!(f.entries()[j].value <= e.value);
            }
        }
        let again = build_filtration(&c, max_dim, RadiusCap::Unbounded).unwrap();
        prop_assert_eq!(&f, &again);
        let radii = f.radii();
        prop_assert!(radii.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cap_filters_unbounded(seed in any::<u64>(), m in 2usize..=10, frac in 0.05f64..1.0) {
        let c = random_cloud(seed, m, 3);
        let full = build_filtration(&c, 1, RadiusCap::Unbounded).unwrap();
        let r = frac * full.max_radius();
        let capped = build_filtration(&c, 1, RadiusCap::Fixed(r)).unwrap();
        let expected: Vec<_> = full.entries().iter().filter(|e| e.value <= r).copied().collect();
        prop_assert_eq!(capped.entries(), &expected[..]);
    }

    #[test]
    fn distances_scale_and_permute(seed in any::<u64>(), m in 2usize..=10, scale in 0.1f64..10.0) {
        let c = random_cloud(seed, m, 2);
        let d = c.pairwise_distances(Coords::Current);
        for i in 0..m {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..m {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                for k in 0..m {
                    prop_assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-9);
                }
            }
        }
        let scaled: Vec<Vec<f64>> = c.current_rows().iter()
            .map(|p| p.iter().map(|x| x * scale).collect()).collect();
        let ds = PointCloud::new(&scaled).unwrap().pairwise_distances(Coords::Current);
        let perm: Vec<usize> = (0..m).rev().collect();
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| c.current_rows()[i].clone()).collect();
        let dp = PointCloud::new(&permuted).unwrap().pairwise_distances(Coords::Current);
        for i in 0..m {
            for j in 0..m {
                let rel = (ds.get(i, j) - scale * d.get(i, j)).abs();
                prop_assert!(rel <= 1e-12 * scale * d.get(i, j).max(1e-300));
                prop_assert_eq!(dp.get(i, j), d.get(perm[i], perm[j]));
            }
        }
    }
}

#[test]
fn distance_matrix_input_is_validated() {
    assert!(DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    assert!(DistanceMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
    let d = DistanceMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
    let f = build_filtration_from_distances(&d, 0, RadiusCap::Unbounded).unwrap();
    assert_eq!(f.len(), 3);
}
