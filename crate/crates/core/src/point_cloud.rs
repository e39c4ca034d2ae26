//! Point coordinates and pairwise distances.
//!
//! A [`PointCloud`] keeps two copies of every point: the coordinates being
//! optimized and the frozen coordinates the run started from. Point `i` of
//! one copy always corresponds to point `i` of the other.

use crate::error::{Error, Result};

/// Selects which copy of the coordinates to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coords {
    Current,
    Initial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    current: Vec<f64>,
    initial: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud whose current and initial coordinates are both `points`.
    pub fn new<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let dim = first.as_ref().len();
        if dim == 0 {
            return Err(Error::RaggedDimensions {
                row: 0,
                expected: 1,
                found: 0,
            });
        }
        let mut flat = Vec::with_capacity(points.len() * dim);
        for (row, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::RaggedDimensions {
                    row,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(col) = p.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFiniteCoordinate { row, col });
            }
            flat.extend_from_slice(p);
        }
        Ok(Self {
            dim,
            initial: flat.clone(),
            current: flat,
        })
    }

    /// Builds a cloud whose current coordinates differ from its initial ones.
    pub fn with_current<P: AsRef<[f64]>>(initial: &[P], current: &[P]) -> Result<Self> {
        let mut cloud = Self::new(initial)?;
        let moved = Self::new(current)?;
        if moved.dim != cloud.dim || moved.len() != cloud.len() {
            return Err(Error::ShapeMismatch(format!(
                "initial is {}x{}, current is {}x{}",
                cloud.len(),
                cloud.dim,
                moved.len(),
                moved.dim
            )));
        }
        cloud.current = moved.current;
        Ok(cloud)
    }

    /// Number of points `m`.
    pub fn len(&self) -> usize {
        self.current.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.current.is_empty()
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.current[i * self.dim..(i + 1) * self.dim]
    }

    pub fn initial_point(&self, i: usize) -> &[f64] {
        &self.initial[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self, which: Coords) -> &[f64] {
        match which {
            Coords::Current => &self.current,
            Coords::Initial => &self.initial,
        }
    }

    /// Row-major current coordinates, `len() * dim()` values.
    pub fn current(&self) -> &[f64] {
        &self.current
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn current_rows(&self) -> Vec<Vec<f64>> {
        self.current.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn initial_rows(&self) -> Vec<Vec<f64>> {
        self.initial.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Mutable access to the current coordinates. The initial copy is never
    /// exposed mutably.
    pub fn current_mut(&mut self) -> &mut [f64] {
        &mut self.current
    }

    /// Overwrites the current coordinates, rejecting non-finite values.
    pub fn set_current(&mut self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.current.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                self.current.len(),
                coords.len()
            )));
        }
        if let Some(k) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteCoordinate {
                row: k / self.dim,
                col: k % self.dim,
            });
        }
        self.current.copy_from_slice(coords);
        Ok(())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    pub fn pairwise_distances(&self, which: Coords) -> DistanceMatrix {
        DistanceMatrix::from_flat(self.coords(which), self.dim)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Dense symmetric matrix of Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    m: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    fn from_flat(coords: &[f64], dim: usize) -> Self {
        let m = coords.len() / dim;
        let mut d = vec![0.0; m * m];
        for i in 0..m {
            let a = &coords[i * dim..(i + 1) * dim];
            for j in (i + 1)..m {
                let v = euclidean(a, &coords[j * dim..(j + 1) * dim]);
                d[i * m + j] = v;
                d[j * m + i] = v;
            }
        }
        Self { m, d }
    }

    /// Builds a matrix from a full row-major `m x m` grid. The grid must be
    /// symmetric with a zero diagonal and non-negative finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let mut d = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::RaggedDimensions {
                    row: i,
                    expected: m,
                    found: row.len(),
                });
            }
            d.extend_from_slice(row);
        }
        for i in 0..m {
            for j in 0..m {
                let v = d[i * m + j];
                if !v.is_finite() || v < 0.0 || v != d[j * m + i] || (i == j && v != 0.0) {
                    return Err(Error::ShapeMismatch(format!(
                        "entry ({i}, {j}) = {v} breaks distance matrix invariants"
                    )));
                }
            }
        }
        Ok(Self { m, d })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.m..(i + 1) * self.m]
    }

    /// `min_i max_j d(i, j)`. At this radius one point is adjacent to all
    /// others, so the Rips complex is a cone.
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.m)
            .map(|i| self.row(i).iter().copied().fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }
}
