use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Training ranges thinner than this (minor over major principal spread)
/// count as degenerate: the readout has effectively seen a line.
pub const DEGENERATE_ASPECT: f64 = 0.05;

/// How far a disturbance reaches outside the training forcing's range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    /// Smallest factor by which the training hull, scaled about its
    /// centroid, contains every disturbance sample. Infinite when degenerate.
    pub ratio: f64,
    /// Minor/major ratio of the training samples' principal spreads.
    pub aspect: f64,
    pub degenerate: bool,
}

type P2 = [f64; 2];

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull in counter-clockwise order without collinear vertices
/// (Andrew's monotone chain).
fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<P2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Area and area centroid of a counter-clockwise polygon.
fn polygon_centroid(poly: &[P2]) -> (f64, P2) {
    let n = poly.len();
    // shift to the first vertex for accuracy far from the origin
    let o = poly[0];
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = [poly[i][0] - o[0], poly[i][1] - o[1]];
        let b = [poly[(i + 1) % n][0] - o[0], poly[(i + 1) % n][1] - o[1]];
        let c = a[0] * b[1] - b[0] * a[1];
        area2 += c;
        cx += (a[0] + b[0]) * c;
        cy += (a[1] + b[1]) * c;
    }
    let area = area2 / 2.0;
    if area <= 0.0 {
        return (0.0, o);
    }
    (area, [o[0] + cx / (6.0 * area), o[1] + cy / (6.0 * area)])
}

fn principal_aspect(points: &[P2]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let tr = (sxx + syy) / n;
    let det = (sxx * syy - sxy * sxy) / (n * n);
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let major = tr / 2.0 + disc;
    let minor = (tr / 2.0 - disc).max(0.0);
    if major <= 0.0 {
        0.0
    } else {
        (minor / major).sqrt()
    }
}

fn first_two(series: &TimeSeries, what: &str) -> Result<Vec<P2>> {
    if series.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: series.dim(),
        });
    }
    if series.is_empty() {
        return Err(Error::SeriesMismatch(format!("{what} series is empty")));
    }
    Ok(series.iter().map(|s| [s[0], s[1]]).collect())
}

/// Smallest centroid-anchored scaling of the training samples' convex hull
/// that contains every disturbance sample; both series are two-channel.
///
/// A heuristic for extrapolation risk, not a guarantee. Training ranges that
/// are (nearly) collinear get an infinite ratio and the degeneracy flag.
pub fn coverage_ratio(training: &TimeSeries, disturbance: &TimeSeries) -> Result<Coverage> {
    let train = first_two(training, "training")?;
    let dist = first_two(disturbance, "disturbance")?;

    let aspect = principal_aspect(&train);
    let hull = convex_hull(&train);
    let degenerate_result = Coverage {
        ratio: f64::INFINITY,
        aspect,
        degenerate: true,
    };
    if hull.len() < 3 || aspect < DEGENERATE_ASPECT {
        return Ok(degenerate_result);
    }
    let (area, c) = polygon_centroid(&hull);
    if area <= 0.0 {
        return Ok(degenerate_result);
    }

    let target = convex_hull(&dist);
    let support = SupportWalker::new(&target, c);
    let m = hull.len();
    let mut ratio = 0.0f64;
    let mut walker = support;
    for i in 0..m {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        // outward normal of a counter-clockwise edge
        let normal = [b[1] - a[1], a[0] - b[0]];
        let offset = normal[0] * (a[0] - c[0]) + normal[1] * (a[1] - c[1]);
        if offset <= 0.0 {
            return Ok(degenerate_result);
        }
        let reach = walker.support(normal);
        ratio = ratio.max(reach / offset);
    }
    Ok(Coverage {
        ratio,
        aspect,
        degenerate: false,
    })
}

/// Support function of a convex polygon for directions supplied in
/// counter-clockwise order (rotating calipers), relative to `center`.
struct SupportWalker<'a> {
    poly: &'a [P2],
    center: P2,
    at: Option<usize>,
}

impl<'a> SupportWalker<'a> {
    fn new(poly: &'a [P2], center: P2) -> Self {
        SupportWalker { poly, center, at: None }
    }

    fn value(&self, i: usize, n: P2) -> f64 {
        let p = self.poly[i];
        n[0] * (p[0] - self.center[0]) + n[1] * (p[1] - self.center[1])
    }

    fn support(&mut self, n: P2) -> f64 {
        let m = self.poly.len();
        let mut j = match self.at {
            Some(j) => j,
            None => (0..m)
                .max_by(|&a, &b| self.value(a, n).total_cmp(&self.value(b, n)))
                .unwrap(),
        };
        for _ in 0..m {
            let next = (j + 1) % m;
            if self.value(next, n) > self.value(j, n) {
                j = next;
            } else {
                break;
            }
        }
        self.at = Some(j);
        self.value(j, n)
    }
}
