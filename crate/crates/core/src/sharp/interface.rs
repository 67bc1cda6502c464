//! Parametric segregation patterns and the limiting energy.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{closest_on_segment, dist, Curve, Point};
use crate::quad::GL8;
use crate::tf;

/// A partition of the disk into the component-1 region and the region `A`
/// where component 2 lives (`phi = pi`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InterfaceSpec {
    /// Straight cut through the origin along direction `angle`; `A` is the
    /// side `x . (sin a, -cos a) > 0` (angle `pi/2` puts `A` on `x > 0`).
    Diameter(f64),
    /// `A` is the sector `|arg x| < pi alpha2`, holding mass `alpha2`.
    DiskSector(f64),
    /// Component 1 inside radius `R`, `A` outside.
    Circle(f64),
    /// Increasing radii; bands alternate starting with component 1 in the
    /// central disk, so `A` is the union of odd bands.
    Annuli(Vec<f64>),
    /// Closed curve with `A` inside.
    Polyline(Curve),
}

/// Distance primitive.
#[derive(Debug, Clone, Copy)]
enum Prim {
    Segment(Point, Point),
    Circle(f64),
}

impl Prim {
    fn nearest(&self, p: Point) -> (f64, Point) {
        match *self {
            Prim::Segment(a, b) => {
                let q = closest_on_segment(p, a, b);
                (dist(p, q), q)
            }
            Prim::Circle(r) => {
                let s = p[0].hypot(p[1]);
                let q = if s > 0.0 { [p[0] * r / s, p[1] * r / s] } else { [r, 0.0] };
                ((s - r).abs(), q)
            }
        }
    }
}

/// Long enough to leave every grid box.
const RAY: f64 = 10.0;

impl InterfaceSpec {
    /// The spec realising mass `alpha1` for component 1 with a centred disk.
    pub fn circle_for_mass(alpha1: f64) -> Result<Self> {
        Ok(InterfaceSpec::Circle(tf::mass_radius(alpha1)?))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InterfaceSpec::Diameter(a) if !a.is_finite() => {
                Err(Error::Params("diameter angle must be finite".into()))
            }
            InterfaceSpec::DiskSector(a) if !(*a > 0.0 && *a < 1.0) => Err(Error::Domain {
                what: "sector mass",
                value: *a,
                domain: "(0, 1)",
            }),
            InterfaceSpec::Circle(r) if !(*r > 0.0 && r.is_finite()) => Err(Error::Domain {
                what: "circle radius",
                value: *r,
                domain: "(0, inf)",
            }),
            InterfaceSpec::Annuli(rs) => {
                if rs.is_empty() || !(rs[0] > 0.0) || rs.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Params(
                        "annuli radii must be positive and strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            InterfaceSpec::Polyline(c) if !c.is_closed() => {
                Err(Error::Curve("polyline interface must be closed".into()))
            }
            _ => Ok(()),
        }
    }

    fn prims(&self) -> Vec<Prim> {
        match self {
            InterfaceSpec::Diameter(a) => {
                let d = [a.cos() * RAY, a.sin() * RAY];
                vec![Prim::Segment([-d[0], -d[1]], d)]
            }
            InterfaceSpec::DiskSector(a2) => {
                let t = PI * a2;
                vec![
                    Prim::Segment([0.0, 0.0], [t.cos() * RAY, t.sin() * RAY]),
                    Prim::Segment([0.0, 0.0], [t.cos() * RAY, -t.sin() * RAY]),
                ]
            }
            InterfaceSpec::Circle(r) => vec![Prim::Circle(*r)],
            InterfaceSpec::Annuli(rs) => rs.iter().map(|&r| Prim::Circle(r)).collect(),
            InterfaceSpec::Polyline(c) => c.segments().map(|(a, b)| Prim::Segment(a, b)).collect(),
        }
    }

    /// Whether `p` lies in `A`.
    pub fn in_a(&self, p: Point) -> bool {
        match self {
            InterfaceSpec::Diameter(a) => p[0] * a.sin() - p[1] * a.cos() > 0.0,
            InterfaceSpec::DiskSector(a2) => p[1].atan2(p[0]).abs() < PI * a2,
            InterfaceSpec::Circle(r) => p[0].hypot(p[1]) > *r,
            InterfaceSpec::Annuli(rs) => {
                let s = p[0].hypot(p[1]);
                rs.iter().filter(|&&r| r < s).count() % 2 == 1
            }
            InterfaceSpec::Polyline(c) => c.contains(p),
        }
    }

    /// Signed distance to the interface (positive in `A`) and the nearest
    /// interface point.
    pub fn signed_distance(&self, p: Point) -> (f64, Point) {
        let (d, q) = self
            .prims()
            .iter()
            .map(|pr| pr.nearest(p))
            .fold((f64::INFINITY, p), |best, c| if c.0 < best.0 { c } else { best });
        (if self.in_a(p) { d } else { -d }, q)
    }

    /// Weighted length of each interface component.
    pub fn component_lengths(&self) -> Vec<f64> {
        self.prims()
            .iter()
            .map(|pr| match *pr {
                Prim::Segment(a, b) => tf::segment_weighted_length(a, b),
                Prim::Circle(r) => tf::circle_weighted_length(r),
            })
            .collect()
    }

    /// `int_{interface} rho^{3/2} dH^1`.
    pub fn weighted_length(&self) -> f64 {
        self.component_lengths().into_iter().sum()
    }

    /// `int_A rho`, the component-2 mass of the sharp pattern.
    pub fn mass_a(&self) -> f64 {
        match self {
            InterfaceSpec::Diameter(_) => 0.5,
            InterfaceSpec::DiskSector(a2) => *a2,
            InterfaceSpec::Circle(r) => 1.0 - disk(*r),
            InterfaceSpec::Annuli(rs) => {
                let mut m = 0.0;
                for (k, &r) in rs.iter().enumerate() {
                    let outer = rs.get(k + 1).map_or(1.0, |&s| disk(s));
                    if k % 2 == 0 {
                        m += outer - disk(r);
                    }
                }
                m
            }
            InterfaceSpec::Polyline(c) => polygon_mass(c),
        }
    }

    /// Sample curves of the interface, clipped to the box `[-l, l]^2`.
    pub fn curves(&self, segments: usize) -> Result<Vec<Curve>> {
        let clip = |a: Point, b: Point| -> Result<Curve> {
            let l = tf::tf_lambda();
            let (ra, rb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
            let scale = |p: Point, r: f64| if r > l { [p[0] * l / r, p[1] * l / r] } else { p };
            Curve::segment(scale(a, ra), scale(b, rb))
        };
        self.prims()
            .iter()
            .map(|pr| match *pr {
                Prim::Segment(a, b) => clip(a, b),
                Prim::Circle(r) => Curve::circle([0.0, 0.0], r, segments),
            })
            .collect()
    }
}

fn disk(r: f64) -> f64 {
    tf::mass_disk(r.min(tf::tf_lambda())).unwrap_or(1.0)
}

/// `2 sigma int rho^{3/2}` over the interface of `spec`, summed over its
/// components.
pub fn limit_energy(spec: &InterfaceSpec, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain {
            what: "sigma",
            value: sigma,
            domain: "(0, inf)",
        });
    }
    spec.validate()?;
    Ok(spec.component_lengths().into_iter().map(|l| 2.0 * sigma * l).sum())
}

/// `int rho` over the interior of a closed curve, in polar coordinates:
/// along each ray the indicator flips at edge crossings and the radial
/// integral is exact; the angular integral is Gauss-Legendre on panels
/// between vertex directions.
fn polygon_mass(c: &Curve) -> f64 {
    let l = tf::tf_lambda();
    let prim = |r: f64| {
        let r = r.min(l);
        0.5 * l * l * r * r - 0.25 * r.powi(4)
    };
    let mut cuts: Vec<f64> = c
        .points()
        .iter()
        .map(|p| p[1].atan2(p[0]).rem_euclid(TAU))
        .collect();
    cuts.push(0.0);
    cuts.push(TAU);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    let panels = 16;
    let mut hits = Vec::new();
    for w in cuts.windows(2) {
        let dt = (w[1] - w[0]) / panels as f64;
        for k in 0..panels {
            let mid = w[0] + (k as f64 + 0.5) * dt;
            for &(x, wt) in &GL8 {
                let th = mid + 0.5 * dt * x;
                let e = [th.cos(), th.sin()];
                hits.clear();
                for (a, b) in c.segments() {
                    let d = [b[0] - a[0], b[1] - a[1]];
                    let den = e[0] * d[1] - e[1] * d[0];
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let r = (a[0] * d[1] - a[1] * d[0]) / den;
                    let s = (a[0] * e[1] - a[1] * e[0]) / den;
                    if r > 0.0 && (0.0..1.0).contains(&s) {
                        hits.push(r);
                    }
                }
                hits.sort_by(f64::total_cmp);
                // Parity of crossings ahead decides the status near the origin.
                let mut inside = hits.len() % 2 == 1;
                let mut last = 0.0;
                let mut acc = 0.0;
                for &r in &hits {
                    if inside {
                        acc += prim(r) - prim(last);
                    }
                    inside = !inside;
                    last = r;
                }
                if inside {
                    acc += prim(l) - prim(last);
                }
                total += 0.5 * dt * wt * acc;
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diameter_energy_is_three_halves_sigma() {
        let s = 0.37;
        let e = limit_energy(&InterfaceSpec::Diameter(0.3), s).unwrap();
        assert_abs_diff_eq!(e, 1.5 * s, epsilon = 1e-8);
    }

    #[test]
    fn boundary_circle_costs_nothing() {
        let e = limit_energy(&InterfaceSpec::Circle(tf::tf_lambda()), 1.0).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sector_masses_and_length() {
        let s = InterfaceSpec::DiskSector(0.3);
        assert_eq!(s.mass_a(), 0.3);
        assert_abs_diff_eq!(s.weighted_length(), 0.75, epsilon = 1e-8);
        assert!(s.in_a([0.5, 0.0]) && !s.in_a([-0.5, 0.0]));
    }

    #[test]
    fn annuli_alternate_and_add() {
        let rs = vec![0.3, 0.5, 0.7];
        let a = InterfaceSpec::Annuli(rs.clone());
        assert!(!a.in_a([0.1, 0.0]) && a.in_a([0.4, 0.0]) && !a.in_a([0.6, 0.0]) && a.in_a([0.8, 0.0]));
        let sum: f64 = rs
            .iter()
            .map(|&r| limit_energy(&InterfaceSpec::Circle(r), 0.5).unwrap())
            .sum();
        assert_eq!(limit_energy(&a, 0.5).unwrap(), sum);
        let m = (disk(0.5) - disk(0.3)) + (1.0 - disk(0.7));
        assert_abs_diff_eq!(a.mass_a(), m, epsilon = 1e-15);
    }

    #[test]
    fn circle_for_mass_is_feasible() {
        let c = InterfaceSpec::circle_for_mass(0.3).unwrap();
        assert_abs_diff_eq!(c.mass_a(), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn polygon_mass_matches_closed_forms() {
        // Square that covers the whole disk.
        let sq = Curve::new(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]], true).unwrap();
        assert_abs_diff_eq!(polygon_mass(&sq), 1.0, epsilon = 1e-10);
        // Right half plane clipped by a large rectangle.
        let half = Curve::new(vec![[0.0, -2.0], [2.0, -2.0], [2.0, 2.0], [0.0, 2.0]], true).unwrap();
        assert_abs_diff_eq!(polygon_mass(&half), 0.5, epsilon = 1e-8);
        // Fine polygon approximating a centred circle.
        let r = 0.5;
        let c = Curve::circle([0.0, 0.0], r, 2000).unwrap();
        assert_abs_diff_eq!(polygon_mass(&c), disk(r), epsilon = 1e-5);
    }

    #[test]
    fn signed_distance_sign_and_nearest_point() {
        let d = InterfaceSpec::Diameter(std::f64::consts::FRAC_PI_2);
        let (s, q) = d.signed_distance([0.2, 0.1]);
        assert_abs_diff_eq!(s, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(q[1], 0.1, epsilon = 1e-15);
        assert!(d.signed_distance([-0.2, 0.1]).0 < 0.0);
        let (s, _) = InterfaceSpec::Circle(0.5).signed_distance([0.0, 0.2]);
        assert_abs_diff_eq!(s, -0.3, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(InterfaceSpec::Annuli(vec![0.5, 0.4]).validate().is_err());
        assert!(InterfaceSpec::DiskSector(1.2).validate().is_err());
        assert!(limit_energy(&InterfaceSpec::Circle(0.4), 0.0).is_err());
    }
}
