use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Cells per bounding-box diagonal.
const CELLS_PER_DIAGONAL: f64 = 100.0;

/// Uniform-grid index over 3-D points answering exact nearest-point
/// distance queries.
///
/// Queries scan cells in growing Chebyshev shells around the query's cell
/// and stop once no unvisited cell can hold anything closer than the best
/// distance so far.
#[derive(Debug, Clone)]
pub struct GridIndex {
    origin: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    cell_start: Vec<usize>,
    points: Vec<[f64; 3]>,
}

impl GridIndex {
    pub fn new(points: &[[f64; 3]]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("cannot index an empty point set"));
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("reference points must be finite"));
            }
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let diag = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt();
        let cell = if diag > 0.0 { diag / CELLS_PER_DIAGONAL } else { 1.0 };
        let mut dims = [1usize; 3];
        for a in 0..3 {
            dims[a] = (((hi[a] - lo[a]) / cell).floor() as usize + 1).max(1);
        }

        let mut index = GridIndex {
            origin: lo,
            cell,
            dims,
            cell_start: Vec::new(),
            points: Vec::new(),
        };
        let ncells = dims[0] * dims[1] * dims[2];
        let ids: Vec<usize> = points.iter().map(|p| index.flat(index.cell_of(p))).collect();
        let mut counts = vec![0usize; ncells + 1];
        for &id in &ids {
            counts[id + 1] += 1;
        }
        for i in 0..ncells {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut sorted = vec![[0.0; 3]; points.len()];
        for (p, &id) in points.iter().zip(&ids) {
            sorted[fill[id]] = *p;
            fill[id] += 1;
        }
        index.cell_start = counts;
        index.points = sorted;
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn cell_of(&self, p: &[f64; 3]) -> [usize; 3] {
        let mut c = [0usize; 3];
        for a in 0..3 {
            let f = ((p[a] - self.origin[a]) / self.cell).floor();
            c[a] = if f <= 0.0 {
                0
            } else {
                (f as usize).min(self.dims[a] - 1)
            };
        }
        c
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2]
    }

    fn scan_cell(&self, c: [usize; 3], q: &[f64; 3], best: &mut f64) {
        let id = self.flat(c);
        for p in &self.points[self.cell_start[id]..self.cell_start[id + 1]] {
            let d = point_distance(q, p);
            if d < *best {
                *best = d;
            }
        }
    }

    /// Visits every cell at Chebyshev distance exactly `k` from `c`.
    fn scan_shell(&self, c: [usize; 3], k: usize, q: &[f64; 3], best: &mut f64) {
        let range = |a: usize| {
            let lo = c[a].saturating_sub(k);
            let hi = (c[a] + k).min(self.dims[a] - 1);
            (lo, hi)
        };
        let (i0, i1) = range(0);
        let (j0, j1) = range(1);
        let (l0, l1) = range(2);
        let ki = k as isize;
        for i in i0..=i1 {
            let di = (i as isize - c[0] as isize).abs();
            for j in j0..=j1 {
                let dj = (j as isize - c[1] as isize).abs();
                if di == ki || dj == ki {
                    for l in l0..=l1 {
                        self.scan_cell([i, j, l], q, best);
                    }
                } else {
                    if c[2] >= k {
                        self.scan_cell([i, j, c[2] - k], q, best);
                    }
                    if k > 0 && c[2] + k < self.dims[2] {
                        self.scan_cell([i, j, c[2] + k], q, best);
                    }
                }
            }
        }
    }

    /// Lower bound on the distance from `q` to any cell outside the block of
    /// Chebyshev radius `k` around `c`; infinite when that block covers the grid.
    fn outside_bound(&self, c: [usize; 3], k: usize, q: &[f64; 3]) -> f64 {
        let grid_lo = self.origin;
        let grid_hi: [f64; 3] = std::array::from_fn(|a| self.origin[a] + self.dims[a] as f64 * self.cell);
        let mut bound = f64::INFINITY;
        for a in 0..3 {
            if c[a] + k + 1 < self.dims[a] {
                let mut lo = grid_lo;
                lo[a] = self.origin[a] + (c[a] + k + 1) as f64 * self.cell;
                bound = bound.min(box_distance(q, &lo, &grid_hi));
            }
            if c[a] > k {
                let mut hi = grid_hi;
                hi[a] = self.origin[a] + (c[a] - k) as f64 * self.cell;
                bound = bound.min(box_distance(q, &grid_lo, &hi));
            }
        }
        // cell assignment rounds; keep the bound conservative
        bound - 1e-9 * self.cell
    }

    /// Distance from `q` to the nearest indexed point.
    pub fn nearest_distance(&self, q: &[f64; 3]) -> f64 {
        let c = self.cell_of(q);
        let mut best = f64::INFINITY;
        let max_k = self.dims.iter().copied().max().unwrap_or(1);
        for k in 0..=max_k {
            self.scan_shell(c, k, q, &mut best);
            let bound = self.outside_bound(c, k, q);
            if bound.is_infinite() || best <= bound {
                break;
            }
        }
        best
    }
}

#[inline]
fn point_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

fn box_distance(q: &[f64; 3], lo: &[f64; 3], hi: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let d = if q[a] < lo[a] {
            lo[a] - q[a]
        } else if q[a] > hi[a] {
            q[a] - hi[a]
        } else {
            0.0
        };
        s += d * d;
    }
    s.sqrt()
}

/// Sampled undisturbed attractor with a nearest-point index.
#[derive(Debug, Clone)]
pub struct AttractorReference {
    points: TimeSeries,
    index: GridIndex,
}

impl AttractorReference {
    pub fn new(points: TimeSeries) -> Result<Self> {
        if points.dim() != 3 {
            return Err(Error::Dimension {
                expected: 3,
                got: points.dim(),
            });
        }
        let raw: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
        let index = GridIndex::new(&raw)?;
        Ok(AttractorReference { points, index })
    }

    pub fn points(&self) -> &TimeSeries {
        &self.points
    }

    pub fn index(&self) -> &GridIndex {
        &self.index
    }
}

/// Mean over trajectory points of the Euclidean distance to the nearest
/// reference point.
pub fn attractor_distance(trajectory: &TimeSeries, reference: &AttractorReference) -> Result<f64> {
    if trajectory.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: trajectory.dim(),
        });
    }
    if trajectory.is_empty() {
        return Err(Error::Empty("trajectory is empty"));
    }
    let queries: Vec<[f64; 3]> = trajectory.iter().map(|p| [p[0], p[1], p[2]]).collect();
    let minima: Vec<f64> = queries
        .par_iter()
        .map(|q| reference.index.nearest_distance(q))
        .collect();
    // summed in trajectory order so the result does not depend on scheduling
    Ok(minima.iter().sum::<f64>() / minima.len() as f64)
}
