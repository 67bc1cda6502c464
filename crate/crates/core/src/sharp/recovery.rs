//! Explicit near-optimal pairs for a prescribed sharp pattern.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpe_single::GroundState;
use crate::grid::{integrate, Field};
use crate::params::Params;
use crate::sharp::interface::InterfaceSpec;
use crate::spin::{from_spin, SpinPair, ETA_FLOOR};
use crate::quad::gauss;
use crate::tf;

/// `w_{eps,T}`: floor `m` up to `t_eps = artanh m`, then `tanh t` up to `T`,
/// then the C^1 cubic reaching 1 at `T + 1/T`, then 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub t_big: f64,
    pub m_eps: f64,
    pub t_eps: f64,
    pub rho_local: f64,
}

impl ProfileSpec {
    pub fn new(t_big: f64, m_eps: f64, rho_local: f64) -> Result<Self> {
        if !(t_big > 1.0) {
            return Err(Error::Domain {
                what: "T",
                value: t_big,
                domain: "(1, inf)",
            });
        }
        if !(m_eps > 0.0 && m_eps < t_big.tanh()) {
            return Err(Error::Domain {
                what: "m_eps",
                value: m_eps,
                domain: "(0, tanh T)",
            });
        }
        Ok(Self {
            t_big,
            m_eps,
            t_eps: m_eps.atanh(),
            rho_local,
        })
    }

    /// Hermite data of the matching cubic on `[T, T + 1/T]`.
    fn cubic(&self, t: f64) -> (f64, f64) {
        let (a, d) = (self.t_big, 1.0 / self.t_big);
        let s = (t - a) / d;
        let (y0, m0) = (a.tanh(), 1.0 / a.cosh().powi(2) * d);
        let (h00, h10, h01) = (
            2.0 * s.powi(3) - 3.0 * s * s + 1.0,
            s.powi(3) - 2.0 * s * s + s,
            -2.0 * s.powi(3) + 3.0 * s * s,
        );
        let val = h00 * y0 + h10 * m0 + h01;
        let dh00 = 6.0 * s * s - 6.0 * s;
        let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
        let dh01 = -6.0 * s * s + 6.0 * s;
        (val, (dh00 * y0 + dh10 * m0 + dh01) / d)
    }

    /// Profile value and slope at `t >= 0`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let t = t.abs();
        if t < self.t_eps {
            (self.m_eps, 0.0)
        } else if t <= self.t_big {
            (t.tanh(), 1.0 / t.cosh().powi(2))
        } else if t < self.t_big + 1.0 / self.t_big {
            self.cubic(t)
        } else {
            (1.0, 0.0)
        }
    }

    /// Break points of the piecewise definition.
    pub fn knots(&self) -> [f64; 3] {
        [self.t_eps, self.t_big, self.t_big + 1.0 / self.t_big]
    }
}

/// `max(2, |ln eps|)`.
pub fn default_t(eps: f64) -> f64 {
    eps.ln().abs().max(2.0)
}

/// `m_eps = (g eps^2)^{-1/4}`.
pub fn floor_for(p: &Params) -> f64 {
    p.coupling().powf(-0.25)
}

/// Local density used to scale the profile: `rho` at the nearest interface
/// point, floored at `lambda sqrt(eps)` so the transition stays `O(eps)`
/// wide where the interface meets the condensate edge.
pub fn rho_effective(rho_hat: f64, eps: f64) -> f64 {
    rho_hat.max(tf::tf_lambda() * eps.sqrt())
}

#[derive(Debug, Clone)]
pub struct Recovery {
    pub spin: SpinPair,
    pub u1: Field,
    pub u2: Field,
    pub m_eps: f64,
    pub t_eps: f64,
    pub t_big: f64,
    /// Mass-repair scale and bump amplitude.
    pub scale: f64,
    pub bump: f64,
    pub masses: (f64, f64),
}

/// Build the recovery pair for `spec` on `gs.eta`'s grid.
pub fn build_recovery(spec: &InterfaceSpec, p: &Params, t_big: f64, gs: &GroundState) -> Result<Recovery> {
    p.validate()?;
    spec.validate()?;
    let grid = *gs.eta.grid();
    let eps = p.eps;
    let lam = tf::tf_lambda();
    let m = floor_for(p);
    let base = ProfileSpec::new(t_big, m, lam * lam)?;
    let t_phi = (2.0 / lam).sqrt() * base.t_eps;

    let mut v = Vec::with_capacity(grid.len());
    let mut phi = Vec::with_capacity(grid.len());
    let mut dist = Vec::with_capacity(grid.len());
    for j in 0..grid.n {
        for i in 0..grid.n {
            let x = grid.point(i, j);
            let (d, q) = spec.signed_distance(x);
            let k = (0.5 * rho_effective(tf::rho_at(q), eps)).sqrt();
            v.push(base.eval(k * d.abs() / eps).0);
            phi.push((FRAC_PI_2 * (1.0 + d / (eps * t_phi))).clamp(0.0, PI));
            dist.push(d);
        }
    }
    let v = Field::new(grid, v)?;
    let phi = Field::new(grid, phi)?;

    // Plateau over the bulk of A: zero within `delta` of the interface,
    // one beyond `2 delta`, where `delta` is the profile half-width at the
    // trap centre (shrunk if A is thin).
    let dmax = grid_max_depth(&grid, &dist);
    if !(dmax > 0.0) {
        return Err(Error::Params("region A has no bulk inside the condensate".into()));
    }
    let delta = (eps * base.knots()[2] * 2f64.sqrt() / lam).min(dmax / 3.0);
    let bump = Field::new(
        grid,
        dist.iter()
            .map(|&d| {
                let s = ((d - delta) / delta).clamp(0.0, 1.0);
                s * s * (3.0 - 2.0 * s)
            })
            .collect(),
    )?;

    let e2 = gs.eta.map(|e| e * e);
    let cosp = phi.map(f64::cos);
    let w = |a: &Field, b: &Field, c: bool| {
        let prod = e2.zip_map(a, |e, a| e * a).zip_map(b, |x, b| x * b);
        integrate(&if c { prod.zip_map(&cosp, |x, c| x * c) } else { prod })
    };
    let q = [
        [w(&v, &v, false), w(&v, &bump, false), w(&bump, &bump, false)],
        [w(&v, &v, true), w(&v, &bump, true), w(&bump, &bump, true)],
    ];
    let targets = [1.0, p.alpha1 - p.alpha2()];
    let resid = |c: f64, l: f64| {
        let f = |r: &[f64; 3], t: f64| c * c * r[0] + 2.0 * c * l * r[1] + l * l * r[2] - t;
        [f(&q[0], targets[0]), f(&q[1], targets[1])]
    };
    let (mut c, mut l) = (1.0, 0.0);
    let mut r = resid(c, l);
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut converged = false;
    for _ in 0..100 {
        if norm(r) < 1e-13 {
            converged = true;
            break;
        }
        let jac = |row: &[f64; 3]| [2.0 * c * row[0] + 2.0 * l * row[1], 2.0 * c * row[1] + 2.0 * l * row[2]];
        let (j0, j1) = (jac(&q[0]), jac(&q[1]));
        let det = j0[0] * j1[1] - j0[1] * j1[0];
        if det.abs() < 1e-300 {
            break;
        }
        let dc = (r[0] * j1[1] - r[1] * j0[1]) / det;
        let dl = (j0[0] * r[1] - j1[0] * r[0]) / det;
        let mut t = 1.0;
        loop {
            let trial = resid(c - t * dc, l - t * dl);
            if norm(trial) < norm(r) || t < 1e-8 {
                c -= t * dc;
                l -= t * dl;
                r = trial;
                break;
            }
            t *= 0.5;
        }
    }
    let m1 = 0.5 * (r[0] + targets[0] + r[1] + targets[1]);
    let m2 = 0.5 * (r[0] + targets[0] - r[1] - targets[1]);
    if !converged || !(c > 0.0) {
        return Err(Error::MassRepair {
            m1,
            m2,
            t1: p.alpha1,
            t2: p.alpha2(),
        });
    }
    let v = v.zip_map(&bump, |v, b| c * v + l * b);
    let mask: Vec<bool> = gs.eta.values().iter().map(|&e| e > ETA_FLOOR).collect();
    if v.values().iter().zip(&mask).any(|(&x, &k)| k && x <= 0.0) {
        return Err(Error::MassRepair {
            m1,
            m2,
            t1: p.alpha1,
            t2: p.alpha2(),
        });
    }
    let spin = SpinPair { v, phi, mask };
    let (u1, u2) = from_spin(&spin, gs)?;
    Ok(Recovery {
        spin,
        u1,
        u2,
        m_eps: m,
        t_eps: base.t_eps,
        t_big,
        scale: c,
        bump: l,
        masses: (m1, m2),
    })
}

/// Largest signed distance over nodes inside the condensate.
fn grid_max_depth(grid: &crate::grid::GridSpec, dist: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for j in 0..grid.n {
        for i in 0..grid.n {
            let x = grid.point(i, j);
            if tf::rho_at(x) > 0.0 {
                best = best.max(dist[grid.idx(i, j)]);
            }
        }
    }
    best
}

/// `eps F_eps` of the recovery profile across the vertical diameter,
/// evaluated with `eta^2 = rho` and integrated along each normal line:
/// `int ds int dt [1/2 rho v_t^2 + 1/4 rho^2 (1 - v^2)^2]`, `t = x / eps`.
pub fn transect_energy(eps: f64, g_eps2: f64, t_big: f64) -> Result<f64> {
    let lam = tf::tf_lambda();
    let m = g_eps2.powf(-0.25);
    let prof = ProfileSpec::new(t_big, m, lam * lam)?;
    let knots = prof.knots();
    let line = |s: f64| -> f64 {
        let rs = lam * lam - s * s;
        let k = (0.5 * rho_effective(rs, eps)).sqrt();
        let tmax = rs.max(0.0).sqrt() / eps;
        let dens = |t: f64| {
            let rho = (rs - (eps * t).powi(2)).max(0.0);
            let (v, dv) = prof.eval(k * t);
            0.5 * rho * (k * dv).powi(2) + 0.25 * rho * rho * (1.0 - v * v).powi(2)
        };
        let mut cuts = vec![0.0];
        cuts.extend(knots.iter().map(|&z| (z / k).min(tmax)));
        cuts.push(tmax);
        2.0 * cuts.windows(2).map(|w| gauss(w[0], w[1], 32, &dens)).sum::<f64>()
    };
    Ok(gauss(-FRAC_PI_2, FRAC_PI_2, 64, &|th: f64| lam * th.cos() * line(lam * th.sin())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpe_single::solve_eta;
    use crate::grid::GridSpec;
    use crate::sharp::cell::GROUPED_SIGMA;
    use approx::assert_abs_diff_eq;

    #[test]
    fn profile_is_c1_and_monotone() {
        for &(t_big, m) in &[(2.0, 0.5), (3.0, 0.2), (5.0, 0.05)] {
            let pr = ProfileSpec::new(t_big, m, 1.0).unwrap();
            let [a, b, c] = pr.knots();
            let e = 1e-9;
            assert_abs_diff_eq!(pr.eval(a - e).0, pr.eval(a + e).0, epsilon = 1e-8);
            for z in [b, c] {
                assert_abs_diff_eq!(pr.eval(z - e).0, pr.eval(z + e).0, epsilon = 1e-8);
                assert_abs_diff_eq!(pr.eval(z - e).1, pr.eval(z + e).1, epsilon = 1e-7);
            }
            let mut last = 0.0;
            for k in 0..2000 {
                let (v, _) = pr.eval(k as f64 * 0.005);
                assert!(v >= last - 1e-15 && v <= 1.0);
                last = v;
            }
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(ProfileSpec::new(0.5, 0.1, 1.0).is_err());
        assert!(ProfileSpec::new(2.0, 0.99, 1.0).is_err());
    }

    #[test]
    fn recovery_pair_is_feasible_with_floor() {
        let g = GridSpec::with_default_box(128).unwrap();
        let p = Params::with_coupling(0.1, 40.0, 0.5, g).unwrap().tol(1e-9);
        let gs = solve_eta(&p).unwrap();
        let rec = build_recovery(&InterfaceSpec::Diameter(FRAC_PI_2), &p, default_t(p.eps), &gs).unwrap();
        assert_abs_diff_eq!(rec.masses.0, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(rec.masses.1, 0.5, epsilon = 1e-10);
        let mass1 = integrate(&rec.u1.map(|x| x * x));
        assert_abs_diff_eq!(mass1, 0.5, epsilon = 1e-10);
        let vmin = rec
            .spin
            .v
            .values()
            .iter()
            .zip(&rec.spin.mask)
            .filter(|(_, &k)| k)
            .fold(f64::INFINITY, |a, (&v, _)| a.min(v));
        assert_abs_diff_eq!(vmin, 40f64.powf(-0.25) * rec.scale, epsilon = 1e-12);
    }

    #[test]
    fn circle_recovery_repairs_unequal_masses() {
        let g = GridSpec::with_default_box(96).unwrap();
        let p = Params::with_coupling(0.12, 40.0, 0.3, g).unwrap().tol(1e-9);
        let gs = solve_eta(&p).unwrap();
        let spec = InterfaceSpec::circle_for_mass(0.3).unwrap();
        let rec = build_recovery(&spec, &p, 2.0, &gs).unwrap();
        assert_abs_diff_eq!(integrate(&rec.u1.map(|x| x * x)), 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(integrate(&rec.u2.map(|x| x * x)), 0.7, epsilon = 1e-10);
    }

    #[test]
    fn transect_energy_tends_to_the_diameter_limit() {
        let target = 2.0 * GROUPED_SIGMA * 0.75;
        let eps: f64 = 0.0125;
        let e = transect_energy(eps, eps.powi(-2), default_t(eps)).unwrap();
        assert!((e / target - 1.0).abs() < 0.1, "{e} vs {target}");
        let coarse = transect_energy(0.05, 0.05f64.powi(-2), default_t(0.05)).unwrap();
        assert!((e - target).abs() < (coarse - target).abs());
    }
}
