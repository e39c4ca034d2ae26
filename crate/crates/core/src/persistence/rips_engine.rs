//! Implicit Rips persistence.
//!
//! Dimension 0 is a union-find pass over edges in filtration order using the
//! elder rule. Higher dimensions reduce coboundary columns of the
//! `d`-simplices from youngest to oldest, skipping simplices already known to
//! be deaths one dimension down. The pivot of a coboundary column is its
//! oldest cofacet. The pairs found this way are the pairs of the ordinary
//! boundary reduction; only the work differs. Cofacets are generated on the
//! fly from the distance matrix.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use super::{PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};
use crate::point_cloud::DistanceMatrix;
use crate::rips::{build_with_radius, filtration_cmp, RadiusCap, Simplex, MAX_HOMOLOGY_DIM};

#[derive(Debug, Clone, Copy)]
struct Cell {
    value: f64,
    simplex: Simplex,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        filtration_cmp(self.value, &self.simplex, other.value, &other.simplex)
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Coboundary<'a> {
    distances: &'a DistanceMatrix,
    radius: f64,
}

impl Coboundary<'_> {
    /// Calls `f(k, value)` for every vertex `k` that forms a cofacet with
    /// `cell`, in increasing `k`. Stops early when `f` returns `false`.
    fn scan(&self, cell: &Cell, mut f: impl FnMut(usize, f64) -> bool) {
        let verts = cell.simplex.vertices();
        let mut rows: [&[f64]; 5] = [&[]; 5];
        for (slot, &v) in rows.iter_mut().zip(verts) {
            *slot = self.distances.row(v);
        }
        let rows = &rows[..verts.len()];
        let mut next_member = 0;
        for k in 0..self.distances.len() {
            if next_member < verts.len() && verts[next_member] == k {
                next_member += 1;
                continue;
            }
            let mut value = cell.value;
            let mut inside = true;
            for row in rows {
                let d = row[k];
                if d > self.radius {
                    inside = false;
                    break;
                }
                value = value.max(d);
            }
            if inside && !f(k, value) {
                return;
            }
        }
    }

    fn oldest_for_edge(&self, cell: &Cell) -> Option<Cell> {
        let (i, j) = (cell.simplex.vertices()[0], cell.simplex.vertices()[1]);
        let (ri, rj) = (self.distances.row(i), self.distances.row(j));
        let mut best = f64::INFINITY;
        let mut best_k = usize::MAX;
        for (k, (&a, &b)) in ri.iter().zip(rj).enumerate() {
            let v = a.max(b);
            if v < best && v <= self.radius && k != i && k != j {
                if v <= cell.value {
                    best_k = k;
                    best = cell.value;
                    break;
                }
                best = v;
                best_k = k;
            }
        }
        (best_k != usize::MAX).then(|| Cell {
            value: best.max(cell.value),
            simplex: cell.simplex.with_vertex(best_k),
        })
    }

    fn for_each(&self, cell: &Cell, mut f: impl FnMut(Cell)) {
        self.scan(cell, |k, value| {
            f(Cell {
                value,
                simplex: cell.simplex.with_vertex(k),
            });
            true
        });
    }

    /// The oldest cofacet. For a fixed simplex, adding a smaller vertex gives
    /// a lexicographically smaller cofacet, so ties in value go to the
    /// smallest `k`, and a cofacet with the simplex's own value is final.
    fn oldest(&self, cell: &Cell) -> Option<Cell> {
        if cell.simplex.dim() == 1 {
            return self.oldest_for_edge(cell);
        }
        let mut best: Option<(f64, usize)> = None;
        self.scan(cell, |k, value| {
            if best.is_none_or(|(b, _)| value < b) {
                best = Some((value, k));
            }
            value > cell.value
        });
        best.map(|(value, k)| Cell {
            value,
            simplex: cell.simplex.with_vertex(k),
        })
    }
}

/// Persistence diagrams for dimensions `0..=max_dim` of the Rips filtration
/// over `distances`, capped at `cap`. The result is identical to
/// [`compute_persistence`](super::compute_persistence) on
/// [`build_filtration`](crate::rips::build_filtration) with the same
/// arguments.
pub fn rips_persistence(
    distances: &DistanceMatrix,
    max_dim: usize,
    cap: RadiusCap,
) -> Result<Vec<PersistenceDiagram>> {
    if max_dim > MAX_HOMOLOGY_DIM {
        return Err(Error::DimensionTooLarge(max_dim));
    }
    cap.validate()?;
    let radius = cap.resolve(distances);
    let m = distances.len();

    // Distances are non-negative, so their bit patterns sort like the values.
    let mut keys: Vec<(u64, u32, u32)> = Vec::new();
    for i in 0..m {
        let row = distances.row(i);
        for (j, &d) in row.iter().enumerate().skip(i + 1) {
            if d <= radius {
                keys.push((d.to_bits(), i as u32, j as u32));
            }
        }
    }
    keys.sort_unstable();
    let mut edges: Vec<Cell> = keys
        .into_iter()
        .map(|(bits, i, j)| Cell {
            value: f64::from_bits(bits),
            simplex: Simplex::edge(i as usize, j as usize),
        })
        .collect();

    let mut diagrams = Vec::with_capacity(max_dim + 1);
    let (h0, mut deaths) = zero_dimensional(m, &edges);
    diagrams.push(h0);

    let cob = Coboundary { distances, radius };
    for dim in 1..=max_dim {
        let mut columns: Vec<Cell> = if dim == 1 {
            let mut edges = std::mem::take(&mut edges);
            edges.reverse();
            edges
        } else {
            let mut cells: Vec<Cell> = build_with_radius(distances, dim - 1, radius)
                .entries()
                .iter()
                .filter(|e| e.simplex.dim() == dim)
                .map(|e| Cell {
                    value: e.value,
                    simplex: e.simplex,
                })
                .collect();
            cells.sort_unstable_by(|a, b| b.cmp(a));
            cells
        };
        columns.retain(|c| !deaths.contains(&c.simplex));
        let (diagram, next_deaths) = reduce_coboundaries(dim, &columns, &cob);
        diagrams.push(diagram);
        deaths = next_deaths;
    }
    for d in &mut diagrams {
        d.sort_by_birth();
    }
    Ok(diagrams)
}

fn zero_dimensional(m: usize, edges: &[Cell]) -> (PersistenceDiagram, HashSet<Simplex>) {
    // Each root is the smallest (oldest) vertex of its component.
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut pairs = Vec::with_capacity(m);
    let mut deaths = HashSet::default();
    deaths.reserve(m);
    for e in edges {
        let v = e.simplex.vertices();
        let (a, b) = (find(&mut parent, v[0]), find(&mut parent, v[1]));
        if a == b {
            continue;
        }
        let (elder, younger) = (a.min(b), a.max(b));
        parent[younger] = elder;
        pairs.push(PersistencePair {
            dimension: 0,
            birth: 0.0,
            death: e.value,
            birth_simplex: Simplex::vertex(younger),
            death_simplex: Some(e.simplex),
        });
        deaths.insert(e.simplex);
    }
    for v in 0..m {
        if find(&mut parent, v) == v {
            pairs.push(PersistencePair {
                dimension: 0,
                birth: 0.0,
                death: f64::INFINITY,
                birth_simplex: Simplex::vertex(v),
                death_simplex: None,
            });
        }
    }
    (
        PersistenceDiagram {
            dimension: 0,
            pairs,
        },
        deaths,
    )
}

/// Pops cancelling copies off the top of `heap` and returns the surviving
/// smallest cell, leaving it in place.
fn pivot(heap: &mut BinaryHeap<Reverse<Cell>>) -> Option<Cell> {
    loop {
        let Reverse(top) = heap.pop()?;
        match heap.peek() {
            Some(Reverse(next)) if *next == top => {
                heap.pop();
            }
            _ => {
                heap.push(Reverse(top));
                return Some(top);
            }
        }
    }
}

/// Reduces the coboundary columns of `columns` (already in reverse
/// filtration order, cleared simplices removed).
fn reduce_coboundaries(
    dim: usize,
    columns: &[Cell],
    cob: &Coboundary<'_>,
) -> (PersistenceDiagram, HashSet<Simplex>) {
    // pivot cofacet -> index into `v_columns`
    let mut pivots: HashMap<Simplex, usize> = HashMap::default();
    pivots.reserve(columns.len());
    // cochains whose coboundary has the matching pivot
    let mut v_columns: Vec<Vec<Cell>> = Vec::new();
    let mut pairs = Vec::with_capacity(columns.len());
    let mut deaths = HashSet::default();
    deaths.reserve(columns.len());
    let mut heap = BinaryHeap::new();

    for &col in columns {
        let mut v = Vec::new();
        let pivot = match cob.oldest(&col) {
            None => None,
            Some(oldest) if !pivots.contains_key(&oldest.simplex) => Some(oldest),
            Some(_) => {
                heap.clear();
                v.push(col);
                cob.for_each(&col, |c| heap.push(Reverse(c)));
                loop {
                    let Some(low) = pivot(&mut heap) else {
                        break None;
                    };
                    let Some(&owner) = pivots.get(&low.simplex) else {
                        break Some(low);
                    };
                    for &cell in &v_columns[owner] {
                        v.push(cell);
                        cob.for_each(&cell, |c| heap.push(Reverse(c)));
                    }
                }
            }
        };
        match pivot {
            Some(death) => {
                pivots.insert(death.simplex, v_columns.len());
                if v.is_empty() {
                    v.push(col);
                } else {
                    v = cancel_pairs(v);
                }
                v_columns.push(v);
                deaths.insert(death.simplex);
                pairs.push(PersistencePair {
                    dimension: dim,
                    birth: col.value,
                    death: death.value,
                    birth_simplex: col.simplex,
                    death_simplex: Some(death.simplex),
                });
            }
            None => pairs.push(PersistencePair {
                dimension: dim,
                birth: col.value,
                death: f64::INFINITY,
                birth_simplex: col.simplex,
                death_simplex: None,
            }),
        }
    }
    (
        PersistenceDiagram {
            dimension: dim,
            pairs,
        },
        deaths,
    )
}

/// Sorts `cells` and drops elements that occur an even number of times.
fn cancel_pairs(mut cells: Vec<Cell>) -> Vec<Cell> {
    cells.sort_unstable();
    let mut out: Vec<Cell> = Vec::with_capacity(cells.len());
    for c in cells {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}
