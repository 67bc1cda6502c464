//! Density/phase variables `(v, phi)` relative to the single-condensate
//! ground state, and the splitting `E_pair = E(eta) + F(v) + G(v, phi)`.
//!
//! With `u1 = eta v cos(phi/2)`, `u2 = eta v sin(phi/2)`, the discrete
//! energies below are the exact edge-sum counterparts of
//! `F = 1/2 int eta^2 |grad v|^2 + 1/(4 eps^2) int eta^4 (1 - v^2)^2` and
//! `G = 1/8 int eta^2 v^2 |grad phi|^2 + g~/8 int eta^4 v^4 sin^2 phi`, so the
//! splitting holds up to `1/(2 eps^2) int eta (v^2 - 1) R`, where `R` is the
//! Euler-Lagrange residual of `eta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Curve;
use crate::gpe_single::GroundState;
use crate::gpe_two::energy_two;
use crate::grid::{integrate, Field};
use crate::params::Params;

/// Nodes with `eta <= ETA_FLOOR` are outside the condensate and carry no
/// meaningful `v`.
pub const ETA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinPair {
    pub v: Field,
    /// In `[0, pi]`.
    pub phi: Field,
    pub mask: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub base: f64,
    pub f_eps: f64,
    pub g_eps: f64,
    pub scaled_excess: f64,
    /// `total - (base + f_eps + g_eps)`.
    pub split_residual: f64,
}

fn check_grid(a: &Field, b: &Field) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::Shape {
            expected: a.grid().len(),
            got: b.grid().len(),
        });
    }
    Ok(())
}

pub fn to_spin(u1: &Field, u2: &Field, gs: &GroundState) -> Result<SpinPair> {
    check_grid(u1, &gs.eta)?;
    check_grid(u2, &gs.eta)?;
    let grid = *gs.eta.grid();
    let n = grid.n;
    let mut v = Vec::with_capacity(grid.len());
    let mut phi = Vec::with_capacity(grid.len());
    let mut mask = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let (a, b, e) = (u1.values()[k], u2.values()[k], gs.eta.values()[k]);
        let r = a.hypot(b);
        let inside = e > ETA_FLOOR;
        if inside && r == 0.0 {
            return Err(Error::SpinUndefined { i: k % n, j: k / n });
        }
        v.push(if e > 0.0 { r / e } else { 1.0 });
        phi.push(if r > 0.0 { 2.0 * b.abs().atan2(a.abs()) } else { 0.0 });
        mask.push(inside);
    }
    Ok(SpinPair {
        v: Field::new(grid, v)?,
        phi: Field::new(grid, phi)?,
        mask,
    })
}

pub fn from_spin(sp: &SpinPair, gs: &GroundState) -> Result<(Field, Field)> {
    check_grid(&sp.v, &gs.eta)?;
    check_grid(&sp.phi, &gs.eta)?;
    let r = gs.eta.zip_map(&sp.v, |e, v| e * v);
    Ok((
        r.zip_map(&sp.phi, |r, p| r * (0.5 * p).cos()),
        r.zip_map(&sp.phi, |r, p| r * (0.5 * p).sin()),
    ))
}

/// `F_eps(v)`.
pub fn f_energy(v: &Field, gs: &GroundState, eps: f64) -> Result<f64> {
    check_grid(v, &gs.eta)?;
    let (e, w) = (gs.eta.values(), v.values());
    let grad = gs.eta.grid().edge_sum(|a, b| e[a] * e[b] * (w[b] - w[a]).powi(2));
    let pot = integrate(&gs.eta.zip_map(v, |e, v| {
        let s = 1.0 - v * v;
        e.powi(4) * s * s
    }));
    Ok(0.5 * grad + pot / (4.0 * eps * eps))
}

/// `G_eps(v, phi)`; needs `g eps^2 > 1`.
pub fn g_energy(sp: &SpinPair, gs: &GroundState, p: &Params) -> Result<f64> {
    if p.coupling() <= 1.0 {
        return Err(Error::Params(format!(
            "g eps^2 = {} must exceed 1",
            p.coupling()
        )));
    }
    check_grid(&sp.v, &gs.eta)?;
    let r = gs.eta.zip_map(&sp.v, |e, v| e * v);
    let (rv, ph) = (r.values(), sp.phi.values());
    let grad = r
        .grid()
        .edge_sum(|a, b| rv[a] * rv[b] * (0.25 * (ph[b] - ph[a])).sin().powi(2));
    let pot = integrate(&r.zip_map(&sp.phi, |r, p| r.powi(4) * p.sin().powi(2)));
    Ok(2.0 * grad + p.g_tilde() / 8.0 * pot)
}

pub fn decompose(u1: &Field, u2: &Field, gs: &GroundState, p: &Params) -> Result<EnergyBreakdown> {
    let sp = to_spin(u1, u2, gs)?;
    let total = energy_two(u1, u2, p);
    let base = gs.energy;
    let f_eps = f_energy(&sp.v, gs, p.eps)?;
    let g_eps = g_energy(&sp, gs, p)?;
    Ok(EnergyBreakdown {
        total,
        base,
        f_eps,
        g_eps,
        scaled_excess: p.eps * (total - base),
        split_residual: total - (base + f_eps + g_eps),
    })
}

/// Minimum of `v` over masked nodes within `width` of `window`.
pub fn interface_min_v(sp: &SpinPair, window: &Curve, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::Domain {
            what: "window width",
            value: width,
            domain: "(0, inf)",
        });
    }
    let grid = *sp.v.grid();
    let mut best = f64::INFINITY;
    for j in 0..grid.n {
        for i in 0..grid.n {
            let k = grid.idx(i, j);
            if !sp.mask[k] {
                continue;
            }
            if window.nearest(grid.point(i, j)).0 <= width {
                best = best.min(sp.v.values()[k]);
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::EmptyWindow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpe_single::solve_eta;
    use crate::grid::GridSpec;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ground(n: usize, eps: f64) -> (GroundState, Params) {
        let p = Params::with_coupling(eps, 40.0, 0.5, GridSpec::with_default_box(n).unwrap())
            .unwrap()
            .tol(1e-10);
        (solve_eta(&p).unwrap(), p)
    }

    #[test]
    fn trivial_spin_values() {
        let (gs, p) = ground(48, 0.2);
        let zero = Field::zeros(p.grid);
        let sp = to_spin(&gs.eta, &zero, &gs).unwrap();
        for k in 0..p.grid.len() {
            if sp.mask[k] {
                assert_abs_diff_eq!(sp.v.values()[k], 1.0, epsilon = 1e-15);
                assert_eq!(sp.phi.values()[k], 0.0);
            }
        }
        let half = gs.eta.map(|e| e / 2f64.sqrt());
        let sp = to_spin(&half, &half, &gs).unwrap();
        for k in 0..p.grid.len() {
            if sp.mask[k] {
                assert_abs_diff_eq!(sp.v.values()[k], 1.0, epsilon = 1e-14);
                assert_abs_diff_eq!(sp.phi.values()[k], FRAC_PI_2, epsilon = 1e-14);
            }
        }
        assert_eq!(f_energy(&sp.v.map(|_| 1.0), &gs, p.eps).unwrap(), 0.0);
    }

    #[test]
    fn from_spin_endpoints() {
        let (gs, p) = ground(32, 0.2);
        let sp = SpinPair {
            v: Field::constant(p.grid, 1.0),
            phi: Field::constant(p.grid, PI),
            mask: vec![true; p.grid.len()],
        };
        let (a, b) = from_spin(&sp, &gs).unwrap();
        assert!(a.max_abs() < 1e-16 * 10.0);
        assert_eq!(b, gs.eta);
    }

    #[test]
    fn zero_density_inside_is_an_error() {
        let (gs, p) = ground(32, 0.2);
        let zero = Field::zeros(p.grid);
        assert!(matches!(to_spin(&zero, &zero, &gs), Err(Error::SpinUndefined { .. })));
    }

    #[test]
    fn constant_v_and_phi_reduce_to_eta_quartic() {
        let (gs, p) = ground(64, 0.2);
        let q = integrate(&gs.eta.map(|e| e.powi(4)));
        let c: f64 = 0.9;
        let f = f_energy(&Field::constant(p.grid, c), &gs, p.eps).unwrap();
        assert_abs_diff_eq!(f, (1.0 - c * c).powi(2) * q / (4.0 * p.eps * p.eps), epsilon = 1e-12 * f);
        let sp = SpinPair {
            v: Field::constant(p.grid, 1.0),
            phi: Field::constant(p.grid, FRAC_PI_2),
            mask: vec![true; p.grid.len()],
        };
        let g = g_energy(&sp, &gs, &p).unwrap();
        assert_abs_diff_eq!(g, p.g_tilde() / 8.0 * q, epsilon = 1e-12 * g);
        let sp0 = SpinPair { phi: Field::zeros(p.grid), ..sp };
        assert_eq!(g_energy(&sp0, &gs, &p).unwrap(), 0.0);
    }

    #[test]
    fn g_energy_rejects_weak_coupling() {
        let (gs, mut p) = ground(32, 0.2);
        p.g = 0.9 / (p.eps * p.eps);
        let sp = to_spin(&gs.eta, &gs.eta, &gs).unwrap();
        assert!(g_energy(&sp, &gs, &p).is_err());
    }

    #[test]
    fn ramp_gradient_part_scales_inversely_with_width() {
        let (gs, mut p) = ground(128, 0.1);
        p.g = 1.0000001 / (p.eps * p.eps);
        let ramp = |w: f64| SpinPair {
            v: Field::constant(p.grid, 1.0),
            phi: Field::from_fn(p.grid, |x, _| (PI * (0.5 + x / w)).clamp(0.0, PI)),
            mask: vec![true; p.grid.len()],
        };
        let g1 = g_energy(&ramp(0.4), &gs, &p).unwrap();
        let g2 = g_energy(&ramp(0.2), &gs, &p).unwrap();
        assert!((g2 / g1 - 2.0).abs() < 0.1, "{}", g2 / g1);
    }

    #[test]
    fn ground_state_split_is_exact() {
        let (gs, p) = ground(64, 0.15);
        let b = decompose(&gs.eta, &Field::zeros(p.grid), &gs, &p).unwrap();
        assert!(b.split_residual.abs() <= 1e-9 * b.total.abs());
        assert_eq!(b.f_eps, 0.0);
        assert_eq!(b.g_eps, 0.0);
    }

    #[test]
    fn rotated_ground_state_split_is_small() {
        let (gs, p) = ground(64, 0.15);
        let th: f64 = 0.3;
        let b = decompose(&gs.eta.map(|e| e * th.cos()), &gs.eta.map(|e| e * th.sin()), &gs, &p)
            .unwrap();
        assert!(b.split_residual.abs() <= 1e-8 * b.total.abs(), "{b:?}");
    }

    #[test]
    fn window_minimum() {
        let (gs, p) = ground(32, 0.2);
        let sp = to_spin(&gs.eta, &Field::zeros(p.grid), &gs).unwrap();
        let seg = Curve::segment([0.0, -0.5], [0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(interface_min_v(&sp, &seg, 0.1).unwrap(), 1.0, epsilon = 1e-14);
        let far = Curve::segment([5.0, 5.0], [5.0, 6.0]).unwrap();
        assert!(matches!(interface_min_v(&sp, &far, 0.1), Err(Error::EmptyWindow)));
    }
}
