//! Polylines and distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

pub type Point = [f64; 2];

/// Ordered polyline. Closed curves store each vertex once; the closing
/// segment from the last vertex back to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct Curve {
    points: Vec<Point>,
    closed: bool,
}

#[derive(Deserialize)]
struct RawCurve {
    points: Vec<Point>,
    closed: bool,
}

impl TryFrom<RawCurve> for Curve {
    type Error = Error;
    fn try_from(r: RawCurve) -> Result<Self> {
        Curve::new(r.points, r.closed)
    }
}

impl Curve {
    pub fn new(mut points: Vec<Point>, closed: bool) -> Result<Self> {
        if closed && points.len() > 1 && points.first() == points.last() {
            points.pop();
        }
        let min = if closed { 3 } else { 2 };
        if points.len() < min {
            return Err(Error::Curve(format!(
                "need at least {min} points, got {}",
                points.len()
            )));
        }
        if let Some(k) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Curve(format!("repeated point at index {k}")));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Curve("non-finite coordinate".into()));
        }
        Ok(Self { points, closed })
    }

    /// Regular `segments`-gon inscribed in the circle of radius `r`.
    pub fn circle(center: Point, r: f64, segments: usize) -> Result<Self> {
        let pts = (0..segments)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / segments as f64;
                [center[0] + r * t.cos(), center[1] + r * t.sin()]
            })
            .collect();
        Self::new(pts, true)
    }

    pub fn segment(a: Point, b: Point) -> Result<Self> {
        Self::new(vec![a, b], false)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| dist(a, b)).sum()
    }

    pub fn rotated(&self, angle: f64) -> Curve {
        let (s, c) = angle.sin_cos();
        Curve {
            points: self
                .points
                .iter()
                .map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]])
                .collect(),
            closed: self.closed,
        }
    }

    /// Even-odd point-in-polygon test; meaningful for closed curves.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.segments() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance to the nearest point of the polyline, and that point.
    pub fn nearest(&self, p: Point) -> (f64, Point) {
        let mut best = (f64::INFINITY, self.points[0]);
        for (a, b) in self.segments() {
            let q = closest_on_segment(p, a, b);
            let d = dist(p, q);
            if d < best.0 {
                best = (d, q);
            }
        }
        best
    }
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    [a[0] + t * d[0], a[1] + t * d[1]]
}

/// Signed distance to a closed curve sampled on `grid`, positive inside.
pub fn signed_distance(c: &Curve, grid: &GridSpec) -> Result<Field> {
    if !c.is_closed() {
        return Err(Error::Curve(
            "signed distance needs a closed curve".into(),
        ));
    }
    Ok(Field::from_fn(*grid, |x, y| {
        let p = [x, y];
        let (d, _) = c.nearest(p);
        if c.contains(p) {
            d
        } else {
            -d
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> GridSpec {
        GridSpec::new(1.2, 97).unwrap()
    }

    #[test]
    fn circle_signed_distance_at_center_and_outside() {
        let g = grid();
        let c = Curve::circle([0.0, 0.0], 0.5, 720).unwrap();
        let sd = signed_distance(&c, &g).unwrap();
        let h = g.h();
        assert_abs_diff_eq!(sd.at(48, 48), 0.5, epsilon = h);
        let i1 = ((1.0 + 1.2) / h).round() as usize;
        assert_abs_diff_eq!(sd.at(i1, 48), -0.5, epsilon = h);
    }

    #[test]
    fn open_curve_has_no_sign() {
        let c = Curve::segment([0.0, 0.0], [1.0, 0.0]).unwrap();
        assert!(signed_distance(&c, &grid()).is_err());
    }

    #[test]
    fn closed_curve_drops_duplicate_closing_point() {
        let c = Curve::new(vec![[0., 0.], [1., 0.], [0., 1.], [0., 0.]], true).unwrap();
        assert_eq!(c.points().len(), 3);
        assert!(Curve::new(vec![[0., 0.], [0., 0.], [1., 1.]], false).is_err());
    }

    #[test]
    fn square_distance_matches_dense_sampling() {
        let sq = Curve::new(
            vec![[-0.4, -0.3], [0.5, -0.3], [0.5, 0.6], [-0.4, 0.6]],
            true,
        )
        .unwrap();
        let g = GridSpec::new(1.0, 41).unwrap();
        let sd = signed_distance(&sq, &g).unwrap();
        // brute force: min over dense samples along each side (exact for
        // axis-aligned sides once the foot of the perpendicular is sampled)
        let samples: Vec<Point> = sq
            .segments()
            .flat_map(|(a, b)| {
                (0..=9000).map(move |k| {
                    let t = k as f64 / 9000.0;
                    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
                })
            })
            .collect();
        let mut worst: f64 = 0.0;
        for j in 0..g.n {
            for i in 0..g.n {
                let p = g.point(i, j);
                let bf = samples
                    .iter()
                    .map(|&q| dist(p, q))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max((sd.at(i, j).abs() - bf).abs());
            }
        }
        assert!(worst <= 1e-6, "max deviation {worst}");
    }

    #[test]
    fn sign_flips_across_a_segment() {
        let sq = Curve::new(vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]], true)
            .unwrap();
        let g = GridSpec::new(1.0, 40).unwrap();
        let sd = signed_distance(&sq, &g).unwrap();
        // nodes straddling the side x = 0.5 (nodes are at odd multiples of h/2)
        let j = 20;
        let i = (0..g.n - 1)
            .find(|&i| g.coord(i) < 0.5 && g.coord(i + 1) > 0.5)
            .unwrap();
        assert!(sd.at(i, j) > 0.0 && sd.at(i + 1, j) < 0.0);
    }

    #[test]
    fn signed_distance_is_one_lipschitz() {
        let c = Curve::circle([0.1, -0.2], 0.45, 200).unwrap();
        let g = GridSpec::new(1.0, 50).unwrap();
        let sd = signed_distance(&c, &g).unwrap();
        let h = g.h();
        for j in 0..g.n - 1 {
            for i in 0..g.n - 1 {
                assert!((sd.at(i + 1, j) - sd.at(i, j)).abs() <= h * (1.0 + 1e-12));
                assert!((sd.at(i, j + 1) - sd.at(i, j)).abs() <= h * (1.0 + 1e-12));
            }
        }
    }
}
