//! Thomas-Fermi density `rho(x) = max(lambda^2 - |x|^2, 0)` normalised to
//! unit mass, masses of centred disks, and `rho^{3/2}`-weighted lengths.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Curve, Point};

/// Radius of the support; `pi lambda^4 / 2 = 1`.
#[inline]
pub fn tf_lambda() -> f64 {
    (2.0 / PI).powf(0.25)
}

#[inline]
pub fn rho_r2(r2: f64) -> f64 {
    let l = tf_lambda();
    (l * l - r2).max(0.0)
}

#[inline]
pub fn rho(x: f64, y: f64) -> f64 {
    rho_r2(x * x + y * y)
}

#[inline]
pub fn rho_at(p: Point) -> f64 {
    rho(p[0], p[1])
}

/// Value type bundling the density with its radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TFDensity {
    pub lambda: f64,
}

impl Default for TFDensity {
    fn default() -> Self {
        Self {
            lambda: tf_lambda(),
        }
    }
}

impl TFDensity {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.lambda * self.lambda - x * x - y * y).max(0.0)
    }

    pub fn peak(&self) -> f64 {
        self.lambda * self.lambda
    }

    /// `integral of rho^2` over the disk, `2 lambda^2 / 3`.
    pub fn l2_mass(&self) -> f64 {
        2.0 * self.lambda * self.lambda / 3.0
    }
}

/// `integral of rho over B(0, R)` in closed form.
pub fn mass_disk(r: f64) -> Result<f64> {
    let l = tf_lambda();
    if !(0.0..=l).contains(&r) {
        return Err(Error::Domain {
            what: "R",
            value: r,
            domain: "[0, lambda]",
        });
    }
    Ok(PI * (l * l * r * r - 0.5 * r.powi(4)))
}

/// Inverse of [`mass_disk`]: `R = lambda (1 - sqrt(1 - alpha))^{1/2}`.
pub fn mass_radius(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "[0, 1]",
        });
    }
    // 1 - sqrt(1 - a) = a / (1 + sqrt(1 - a)) avoids cancellation near 0
    let s = alpha / (1.0 + (1.0 - alpha).sqrt());
    Ok(tf_lambda() * s.sqrt())
}

/// `integral of rho^{3/2} ds` along the circle `|x| = R`.
pub fn circle_weighted_length(r: f64) -> f64 {
    2.0 * PI * r * rho_r2(r * r).powf(1.5)
}

const REL_TOL: f64 = 1e-8;
const MAX_SUBDIVISIONS: usize = 1 << 22;

/// `integral of rho^{3/2} ds` along a straight segment. The part outside
/// the disk contributes nothing, so the segment is clipped first; the
/// remaining piece is integrated by the composite midpoint rule, doubling
/// the subdivision until the relative change drops below `1e-8`.
pub fn segment_weighted_length(a: Point, b: Point) -> f64 {
    let l2 = tf_lambda().powi(2);
    let d = [b[0] - a[0], b[1] - a[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    if dd == 0.0 {
        return 0.0;
    }
    // |a + t d|^2 = l2  <=>  dd t^2 + 2 (a.d) t + |a|^2 - l2 = 0
    let ad = a[0] * d[0] + a[1] * d[1];
    let c = a[0] * a[0] + a[1] * a[1] - l2;
    let disc = ad * ad - dd * c;
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let t0 = ((-ad - sq) / dd).max(0.0);
    let t1 = ((-ad + sq) / dd).min(1.0);
    if t1 <= t0 {
        return 0.0;
    }
    let len = dd.sqrt();
    let f = |t: f64| rho(a[0] + t * d[0], a[1] + t * d[1]).powf(1.5);
    let midpoint = |m: usize| {
        let w = (t1 - t0) / m as f64;
        (0..m).map(|k| f(t0 + (k as f64 + 0.5) * w)).sum::<f64>() * w * len
    };
    let mut m = 16;
    let mut prev = midpoint(m);
    loop {
        m *= 2;
        let cur = midpoint(m);
        if (cur - prev).abs() <= REL_TOL * cur.abs() || m >= MAX_SUBDIVISIONS {
            return cur;
        }
        prev = cur;
    }
}

/// `integral of rho^{3/2} ds` along a polyline.
pub fn weighted_length(c: &Curve) -> f64 {
    c.segments()
        .map(|(a, b)| segment_weighted_length(a, b))
        .sum()
}
