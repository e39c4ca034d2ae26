//! Persistence diagrams over GF(2).
//!
//! Two routes compute the same pairing:
//!
//! * [`compute_persistence`] reduces the explicit boundary matrix of a
//!   materialized [`Filtration`], with clearing.
//! * [`rips_persistence`] works directly from a distance matrix. It never
//!   materializes the higher simplices and reduces coboundaries instead,
//!   which is what makes a few hundred points times a few hundred
//!   optimizer steps affordable.
//!
//! Both report every pair together with the simplices that created and
//! destroyed it, which is what gradients flow through.

mod rips_engine;

pub use rips_engine::rips_persistence;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::point_cloud::{Coords, PointCloud};
use crate::rips::{filtration_cmp, Filtration, Simplex};

/// One point of a persistence diagram with its critical simplices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dimension: usize,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    pub birth_simplex: Simplex,
    pub death_simplex: Option<Simplex>,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death_simplex.is_none()
    }

    /// Pairs whose birth and death coincide. They carry no topological
    /// information and are hidden by the default diagram view.
    pub fn is_zero_persistence(&self) -> bool {
        self.death == self.birth
    }

    pub fn persistence(&self) -> f64 {
        persistence_of(self)
    }
}

/// `death - birth`, infinite for essential classes.
pub fn persistence_of(pair: &PersistencePair) -> f64 {
    if pair.is_essential() {
        f64::INFINITY
    } else {
        pair.death - pair.birth
    }
}

impl fmt::Display for PersistencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_essential() {
            write!(f, "({}, inf)", self.birth)
        } else {
            write!(f, "({}, {})", self.birth, self.death)
        }
    }
}

/// The multiset of pairs in one homology dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    dimension: usize,
    pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(dimension: usize, pairs: Vec<PersistencePair>) -> Result<Self> {
        if let Some(p) = pairs.iter().find(|p| p.dimension != dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: p.dimension,
            });
        }
        Ok(Self { dimension, pairs })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Every pair, zero-persistence ones included.
    pub fn all_pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    /// The default view: pairs with non-zero persistence.
    pub fn pairs(&self) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(|p| !p.is_zero_persistence())
    }

    pub fn essential(&self) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(|p| p.is_essential())
    }

    /// `(birth, death)` values of the default view, sorted.
    pub fn values(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self.pairs().map(|p| (p.birth, p.death)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn sort_by_birth(&mut self) {
        self.pairs
            .sort_by(|a, b| filtration_cmp(a.birth, &a.birth_simplex, b.birth, &b.birth_simplex));
    }
}

/// Persistence of an explicit filtration for dimensions `0..=max_dim`, by
/// column reduction of the boundary matrix. Columns are reduced from the top
/// dimension down; a simplex found as a pivot has its own column cleared,
/// which leaves the pairing unchanged.
pub fn compute_persistence(
    filtration: &Filtration,
    max_dim: usize,
) -> Result<Vec<PersistenceDiagram>> {
    if max_dim > filtration.max_dim() {
        return Err(Error::InconsistentFiltration(format!(
            "requested dimension {max_dim} but filtration only supports {}",
            filtration.max_dim()
        )));
    }
    let entries = filtration.entries();
    let n = entries.len();
    let top = max_dim + 1;

    let index: HashMap<Simplex, usize> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.simplex, i))
        .collect();
    if index.len() != n {
        return Err(Error::InconsistentFiltration("duplicate simplex".into()));
    }

    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, e) in entries.iter().enumerate() {
        let dim = e.simplex.dim();
        if dim > top {
            continue;
        }
        by_dim[dim].push(j);
        if dim == 0 {
            continue;
        }
        let mut col = Vec::with_capacity(dim + 1);
        for face in e.simplex.facets() {
            match index.get(&face) {
                Some(&i) if i < j => col.push(i),
                Some(_) => {
                    return Err(Error::InconsistentFiltration(format!(
                        "face {face} appears after {}",
                        e.simplex
                    )))
                }
                None => {
                    return Err(Error::InconsistentFiltration(format!(
                        "face {face} of {} is missing",
                        e.simplex
                    )))
                }
            }
        }
        col.sort_unstable();
        columns[j] = col;
    }

    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut cleared = vec![false; n];
    let mut killed_by: Vec<Option<usize>> = vec![None; n];
    let mut is_death = vec![false; n];

    for dim in (1..=top).rev() {
        for &j in &by_dim[dim] {
            if cleared[j] {
                columns[j].clear();
                continue;
            }
            let mut col = std::mem::take(&mut columns[j]);
            while let Some(&low) = col.last() {
                match pivot_owner[low] {
                    Some(k) => col = symmetric_difference(&col, &columns[k]),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivot_owner[low] = Some(j);
                cleared[low] = true;
                killed_by[low] = Some(j);
                is_death[j] = true;
            }
            columns[j] = col;
        }
    }

    let mut diagrams: Vec<PersistenceDiagram> = (0..=max_dim)
        .map(|d| PersistenceDiagram {
            dimension: d,
            pairs: Vec::new(),
        })
        .collect();
    for (i, e) in entries.iter().enumerate() {
        let dim = e.simplex.dim();
        if dim > max_dim || is_death[i] {
            continue;
        }
        let pair = match killed_by[i] {
            Some(j) => PersistencePair {
                dimension: dim,
                birth: e.value,
                death: entries[j].value,
                birth_simplex: e.simplex,
                death_simplex: Some(entries[j].simplex),
            },
            None => PersistencePair {
                dimension: dim,
                birth: e.value,
                death: f64::INFINITY,
                birth_simplex: e.simplex,
                death_simplex: None,
            },
        };
        diagrams[dim].pairs.push(pair);
    }
    for d in &mut diagrams {
        d.sort_by_birth();
    }
    Ok(diagrams)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Zero-dimensional persistence from a minimum spanning tree (Prim's
/// algorithm on the dense distance matrix): one `(0, w)` pair per tree edge
/// plus one essential class.
///
/// Only the `(birth, death)` values are meaningful for comparison. Each
/// finite pair names the vertex Prim attached through that edge, which need
/// not be the vertex the elder rule would pick.
pub fn h0_mst_oracle(cloud: &PointCloud) -> PersistenceDiagram {
    let d = cloud.pairwise_distances(Coords::Current);
    let m = d.len();
    let mut in_tree = vec![false; m];
    let mut best = vec![f64::INFINITY; m];
    let mut parent = vec![0usize; m];
    let mut pairs = vec![PersistencePair {
        dimension: 0,
        birth: 0.0,
        death: f64::INFINITY,
        birth_simplex: Simplex::vertex(0),
        death_simplex: None,
    }];
    in_tree[0] = true;
    for v in 1..m {
        best[v] = d.get(0, v);
    }
    for _ in 1..m {
        let mut next = usize::MAX;
        let mut w = f64::INFINITY;
        for v in 0..m {
            if !in_tree[v] && (next == usize::MAX || best[v] < w) {
                next = v;
                w = best[v];
            }
        }
        in_tree[next] = true;
        pairs.push(PersistencePair {
            dimension: 0,
            birth: 0.0,
            death: w,
            birth_simplex: Simplex::vertex(next),
            death_simplex: Some(Simplex::edge(parent[next], next)),
        });
        for v in 0..m {
            if !in_tree[v] && d.get(next, v) < best[v] {
                best[v] = d.get(next, v);
                parent[v] = next;
            }
        }
    }
    PersistenceDiagram {
        dimension: 0,
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_cloud::DistanceMatrix;
    use crate::rips::{build_filtration, build_filtration_from_distances, RadiusCap};

    fn square() -> PointCloud {
        PointCloud::new(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap()
    }

    #[test]
    fn two_points() {
        let c = PointCloud::new(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let f = build_filtration(&c, 0, RadiusCap::Unbounded).unwrap();
        let dg = compute_persistence(&f, 0).unwrap();
        assert_eq!(dg[0].values(), vec![(0.0, 5.0), (0.0, f64::INFINITY)]);
    }

    #[test]
    fn unit_square() {
        let f = build_filtration(&square(), 1, RadiusCap::Unbounded).unwrap();
        assert_eq!(f.len(), 14);
        let dg = compute_persistence(&f, 1).unwrap();
        assert_eq!(
            dg[0].values(),
            vec![(0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, f64::INFINITY)]
        );
        assert_eq!(dg[1].values(), vec![(1.0, 2f64.sqrt())]);
        let p = dg[1].pairs().next().unwrap();
        // Hand reduction: {0,1,2} and {0,1,3} kill the two diagonals, and
        // {0,2,3} reduces (after adding {0,1,3}) onto the edge {2,3} that
        // closed the square.
        assert_eq!(p.birth_simplex, Simplex::edge(2, 3));
        assert_eq!(p.death_simplex, Some(Simplex::new(&[0, 2, 3]).unwrap()));
    }

    #[test]
    fn equilateral_triangle() {
        let d = DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let f = build_filtration_from_distances(&d, 1, RadiusCap::Unbounded).unwrap();
        let dg = compute_persistence(&f, 1).unwrap();
        assert_eq!(
            dg[0].values(),
            vec![(0.0, 1.0), (0.0, 1.0), (0.0, f64::INFINITY)]
        );
        assert!(dg[1].values().is_empty());
        assert_eq!(dg[1].len(), 1);
        assert!(dg[1].all_pairs()[0].is_zero_persistence());
    }

    #[test]
    fn persistence_values() {
        let mk = |birth: f64, death: f64, dim: usize| PersistencePair {
            dimension: dim,
            birth,
            death,
            birth_simplex: Simplex::vertex(0),
            death_simplex: death.is_finite().then(|| Simplex::edge(0, 1)),
        };
        assert_eq!(persistence_of(&mk(0.0, 5.0, 0)), 5.0);
        let r = persistence_of(&mk(1.0, 2f64.sqrt(), 1));
        assert!((r - 0.41421356237309515).abs() < 1e-15);
        assert_eq!(persistence_of(&mk(0.0, f64::INFINITY, 0)), f64::INFINITY);
    }

    #[test]
    fn mst_oracle_examples() {
        let c = PointCloud::new(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(
            h0_mst_oracle(&c).values(),
            vec![(0.0, 5.0), (0.0, f64::INFINITY)]
        );
        let c = PointCloud::new(&[[0.0], [1.0], [3.0]]).unwrap();
        assert_eq!(
            h0_mst_oracle(&c).values(),
            vec![(0.0, 1.0), (0.0, 2.0), (0.0, f64::INFINITY)]
        );
        let c = PointCloud::new(&[[4.0, 2.0]]).unwrap();
        assert_eq!(h0_mst_oracle(&c).values(), vec![(0.0, f64::INFINITY)]);
    }

    #[test]
    fn inconsistent_filtration() {
        use crate::rips::FiltrationEntry;
        let missing = Filtration::from_entries(
            vec![
                FiltrationEntry {
                    simplex: Simplex::vertex(0),
                    value: 0.0,
                },
                FiltrationEntry {
                    simplex: Simplex::edge(0, 1),
                    value: 1.0,
                },
            ],
            0,
        );
        assert!(matches!(
            compute_persistence(&missing, 0),
            Err(Error::InconsistentFiltration(_))
        ));
        // A face that enters after its coface.
        let late = Filtration::from_entries(
            vec![
                FiltrationEntry {
                    simplex: Simplex::vertex(0),
                    value: 0.0,
                },
                FiltrationEntry {
                    simplex: Simplex::vertex(1),
                    value: 2.0,
                },
                FiltrationEntry {
                    simplex: Simplex::edge(0, 1),
                    value: 1.0,
                },
            ],
            0,
        );
        assert!(matches!(
            compute_persistence(&late, 0),
            Err(Error::InconsistentFiltration(_))
        ));
        let f = build_filtration(&square(), 0, RadiusCap::Unbounded).unwrap();
        assert!(compute_persistence(&f, 1).is_err());
    }

    #[test]
    fn diagram_dimension_tag() {
        let p = PersistencePair {
            dimension: 1,
            birth: 0.0,
            death: 1.0,
            birth_simplex: Simplex::edge(0, 1),
            death_simplex: None,
        };
        assert!(PersistenceDiagram::new(0, vec![p]).is_err());
        assert!(PersistenceDiagram::new(1, vec![p]).is_ok());
    }
}
