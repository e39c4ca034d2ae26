//! Vietoris–Rips filtrations.
//!
//! Every simplex enters the filtration at its diameter, the largest pairwise
//! distance among its vertices. Entries are totally ordered by
//! `(value, dimension, lexicographic vertices)`; the persistence pairing
//! depends on this order, so it is fixed here and used everywhere.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_cloud::{Coords, DistanceMatrix, PointCloud};

/// Largest homology dimension the filtration builder accepts.
pub const MAX_HOMOLOGY_DIM: usize = 3;
const MAX_VERTICES: usize = MAX_HOMOLOGY_DIM + 2;

/// A simplex as a strictly increasing list of point indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Simplex {
    verts: [usize; MAX_VERTICES],
    len: u8,
}

impl Simplex {
    /// Builds a simplex, sorting the vertices. Fails on duplicates, on an
    /// empty list, or on more than five vertices.
    pub fn new(vertices: &[usize]) -> Result<Self> {
        if vertices.is_empty() || vertices.len() > MAX_VERTICES {
            return Err(Error::InvalidSimplex(format!(
                "{} vertices (supported: 1..={MAX_VERTICES})",
                vertices.len()
            )));
        }
        let mut verts = [0; MAX_VERTICES];
        verts[..vertices.len()].copy_from_slice(vertices);
        verts[..vertices.len()].sort_unstable();
        let s = Self {
            verts,
            len: vertices.len() as u8,
        };
        if s.vertices().windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid_simplex(&s, "duplicate vertex"));
        }
        Ok(s)
    }

    pub fn vertex(v: usize) -> Self {
        let mut verts = [0; MAX_VERTICES];
        verts[0] = v;
        Self { verts, len: 1 }
    }

    pub fn edge(a: usize, b: usize) -> Self {
        let mut verts = [0; MAX_VERTICES];
        verts[0] = a.min(b);
        verts[1] = a.max(b);
        Self { verts, len: 2 }
    }

    /// `vertices` must already be strictly increasing.
    pub(crate) fn from_sorted(vertices: &[usize]) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut verts = [0; MAX_VERTICES];
        verts[..vertices.len()].copy_from_slice(vertices);
        Self {
            verts,
            len: vertices.len() as u8,
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.verts[..self.len as usize]
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    /// The codimension-one faces, each obtained by dropping one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.len as usize;
        let count = if n > 1 { n } else { 0 };
        (0..count).map(move |skip| {
            let mut verts = [0; MAX_VERTICES];
            let mut k = 0;
            for (idx, &v) in self.vertices().iter().enumerate() {
                if idx != skip {
                    verts[k] = v;
                    k += 1;
                }
            }
            Simplex {
                verts,
                len: (n - 1) as u8,
            }
        })
    }

    /// The simplex with `v` inserted, keeping the vertices sorted.
    pub(crate) fn with_vertex(&self, v: usize) -> Simplex {
        let n = self.len as usize;
        let mut verts = [0; MAX_VERTICES];
        let mut k = 0;
        let mut placed = false;
        for &u in self.vertices() {
            if !placed && v < u {
                verts[k] = v;
                k += 1;
                placed = true;
            }
            verts[k] = u;
            k += 1;
        }
        if !placed {
            verts[k] = v;
        }
        Simplex {
            verts,
            len: (n + 1) as u8,
        }
    }
}

impl Ord for Simplex {
    /// Lower dimension first, then lexicographic on vertices.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vertices().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Simplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.vertices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Simplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Simplex::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Total filtration order on `(value, simplex)` keys.
#[inline]
pub fn filtration_cmp(a_value: f64, a: &Simplex, b_value: f64, b: &Simplex) -> Ordering {
    a_value.total_cmp(&b_value).then_with(|| a.cmp(b))
}

fn check_simplex(simplex: &Simplex, distances: &DistanceMatrix) -> Result<()> {
    let len = distances.len();
    match simplex.vertices().iter().find(|&&v| v >= len) {
        Some(&index) => Err(Error::IndexOutOfRange { index, len }),
        None => Ok(()),
    }
}

/// Largest pairwise distance among the vertices; 0 for a vertex.
pub fn simplex_diameter(simplex: &Simplex, distances: &DistanceMatrix) -> Result<f64> {
    check_simplex(simplex, distances)?;
    Ok(diameter_unchecked(simplex.vertices(), distances))
}

pub(crate) fn diameter_unchecked(verts: &[usize], distances: &DistanceMatrix) -> f64 {
    let mut best = 0.0_f64;
    for (k, &i) in verts.iter().enumerate() {
        for &j in &verts[k + 1..] {
            best = best.max(distances.get(i, j));
        }
    }
    best
}

/// The vertex pair realizing the diameter. Ties go to the lexicographically
/// smallest pair.
pub fn max_edge(simplex: &Simplex, distances: &DistanceMatrix) -> Result<(usize, usize)> {
    if simplex.dim() == 0 {
        return Err(Error::VertexSimplex);
    }
    check_simplex(simplex, distances)?;
    Ok(max_edge_unchecked(simplex.vertices(), distances))
}

pub(crate) fn max_edge_unchecked(verts: &[usize], distances: &DistanceMatrix) -> (usize, usize) {
    let mut best = (verts[0], verts[1]);
    let mut best_d = f64::NEG_INFINITY;
    // Vertices are sorted, so this visits pairs in lexicographic order and a
    // strict comparison keeps the first maximal one.
    for (k, &i) in verts.iter().enumerate() {
        for &j in &verts[k + 1..] {
            let d = distances.get(i, j);
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Upper bound on the filtration radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RadiusCap {
    Unbounded,
    /// The enclosing radius of the current coordinates.
    #[default]
    Enclosing,
    Fixed(f64),
}

impl RadiusCap {
    pub fn resolve(self, distances: &DistanceMatrix) -> f64 {
        match self {
            RadiusCap::Unbounded => f64::INFINITY,
            RadiusCap::Enclosing => distances.enclosing_radius(),
            RadiusCap::Fixed(r) => r,
        }
    }

    pub(crate) fn validate(self) -> Result<()> {
        match self {
            RadiusCap::Fixed(r) if !(r > 0.0) => Err(Error::InvalidConfig(format!(
                "radius cap must be positive, got {r}"
            ))),
            _ => Ok(()),
        }
    }
}

impl std::str::FromStr for RadiusCap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unbounded" | "inf" => Ok(RadiusCap::Unbounded),
            "enclosing" => Ok(RadiusCap::Enclosing),
            other => {
                let r: f64 = other.parse().map_err(|_| {
                    Error::InvalidConfig(format!(
                        "radius cap must be `enclosing`, `unbounded` or a number, got `{other}`"
                    ))
                })?;
                let cap = RadiusCap::Fixed(r);
                cap.validate()?;
                Ok(cap)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
    max_dim: usize,
    max_radius: f64,
    num_points: usize,
}

impl Filtration {
    /// Builds a filtration from arbitrary entries, sorting them into
    /// filtration order. No face checks are made here; persistence
    /// computation reports inconsistencies.
    pub fn from_entries(mut entries: Vec<FiltrationEntry>, max_dim: usize) -> Self {
        entries.sort_by(|a, b| filtration_cmp(a.value, &a.simplex, b.value, &b.simplex));
        let num_points = entries
            .iter()
            .flat_map(|e| e.simplex.vertices().iter().copied())
            .max()
            .map_or(0, |v| v + 1);
        let max_radius = entries.iter().map(|e| e.value).fold(0.0, f64::max);
        Self {
            entries,
            max_dim,
            max_radius,
            num_points,
        }
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Highest homology dimension this filtration supports. It holds
    /// simplices up to one dimension higher.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// The resolved radius cap (`f64::INFINITY` when unbounded).
    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// The distinct values `r_1 < ... < r_N`.
    pub fn radii(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in &self.entries {
            if out.last() != Some(&e.value) {
                out.push(e.value);
            }
        }
        out
    }
}

/// Builds the Rips filtration of the current coordinates with every simplex
/// of dimension at most `max_dim + 1` whose diameter does not exceed the cap.
pub fn build_filtration(cloud: &PointCloud, max_dim: usize, cap: RadiusCap) -> Result<Filtration> {
    let distances = cloud.pairwise_distances(Coords::Current);
    build_filtration_from_distances(&distances, max_dim, cap)
}

pub fn build_filtration_from_distances(
    distances: &DistanceMatrix,
    max_dim: usize,
    cap: RadiusCap,
) -> Result<Filtration> {
    if max_dim > MAX_HOMOLOGY_DIM {
        return Err(Error::DimensionTooLarge(max_dim));
    }
    cap.validate()?;
    Ok(build_with_radius(
        distances,
        max_dim,
        cap.resolve(distances),
    ))
}

pub(crate) fn build_with_radius(
    distances: &DistanceMatrix,
    max_dim: usize,
    radius: f64,
) -> Filtration {
    let m = distances.len();
    let neighbors = upper_neighbors(distances, radius);
    let mut entries: Vec<FiltrationEntry> = (0..m)
        .map(|v| FiltrationEntry {
            simplex: Simplex::vertex(v),
            value: 0.0,
        })
        .collect();
    let mut clique = Vec::with_capacity(max_dim + 2);
    for v in 0..m {
        clique.clear();
        clique.push(v);
        extend_cliques(
            distances,
            &neighbors,
            &mut clique,
            &neighbors[v],
            0.0,
            max_dim + 2,
            &mut entries,
        );
    }
    entries.sort_by(|a, b| filtration_cmp(a.value, &a.simplex, b.value, &b.simplex));
    Filtration {
        entries,
        max_dim,
        max_radius: radius,
        num_points: m,
    }
}

/// For each vertex, the higher-indexed vertices within `radius`, ascending.
pub(crate) fn upper_neighbors(distances: &DistanceMatrix, radius: f64) -> Vec<Vec<usize>> {
    let m = distances.len();
    (0..m)
        .map(|i| {
            ((i + 1)..m)
                .filter(|&j| distances.get(i, j) <= radius)
                .collect()
        })
        .collect()
}

fn extend_cliques(
    distances: &DistanceMatrix,
    neighbors: &[Vec<usize>],
    clique: &mut Vec<usize>,
    candidates: &[usize],
    value: f64,
    max_vertices: usize,
    out: &mut Vec<FiltrationEntry>,
) {
    if clique.len() == max_vertices {
        return;
    }
    for (k, &c) in candidates.iter().enumerate() {
        let new_value = clique
            .iter()
            .map(|&u| distances.get(u, c))
            .fold(value, f64::max);
        clique.push(c);
        out.push(FiltrationEntry {
            simplex: Simplex::from_sorted(clique),
            value: new_value,
        });
        if clique.len() < max_vertices {
            // Candidates after `c` that are also adjacent to `c`.
            let next: Vec<usize> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|w| neighbors[c].binary_search(w).is_ok())
                .collect();
            if !next.is_empty() {
                extend_cliques(
                    distances,
                    neighbors,
                    clique,
                    &next,
                    new_value,
                    max_vertices,
                    out,
                );
            }
        }
        clique.pop();
    }
}
