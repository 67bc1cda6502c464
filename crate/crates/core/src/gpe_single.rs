//! One-component ground state `eta_eps` by normalised semi-implicit gradient
//! flow, its energy and multiplier, and the property checks that compare it
//! with the Thomas-Fermi profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow;
use crate::grid::{integrate, integrate_product, Field, GridSpec};
use crate::params::Params;
use crate::tf;

#[derive(Debug, Clone)]
pub struct GroundState {
    pub eta: Field,
    pub eps: f64,
    /// Multiplier from `lambda/eps^2 = 2 (E(eta) + (1/4 eps^2) int eta^4)`.
    pub lambda_eps: f64,
    /// Multiplier from the Rayleigh quotient `eps^2 <EL(eta), eta> / int eta^2`.
    pub lambda_quotient: f64,
    pub energy: f64,
    /// Sup-norm of the `eps^2`-scaled Euler-Lagrange residual.
    pub residual: f64,
    pub iters: usize,
}

impl GroundState {
    pub fn grid(&self) -> &GridSpec {
        self.eta.grid()
    }
}

/// `E_eps(eta) = 1/2 int |grad eta|^2 + |x|^2 eta^2 / eps^2 + eta^4 / (2 eps^2)`.
pub fn energy_single(eta: &Field, eps: f64) -> f64 {
    let v = flow::potential(eta.grid());
    scaled_energy(eta.values(), &v, eta.grid(), eps) / (eps * eps)
}

/// `eps^2 E_eps(u)` on raw values.
pub(crate) fn scaled_energy(u: &[f64], v: &[f64], grid: &GridSpec, eps: f64) -> f64 {
    let n = grid.n;
    let mut pot = 0.0;
    for j in 0..n {
        let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for i in 0..n {
            let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let k = j * n + i;
            let u2 = u[k] * u[k];
            row += wi * (0.5 * v[k] * u2 + 0.25 * u2 * u2);
        }
        pot += wj * row;
    }
    let h2 = grid.h() * grid.h();
    let grad = grid.edge_sum(|a, b| (u[b] - u[a]).powi(2));
    0.5 * eps * eps * grad + pot * h2
}

pub(crate) fn mass(u: &[f64], grid: &GridSpec) -> f64 {
    let f = Field::from_vec_unchecked(*grid, u.to_vec());
    integrate_product(&f, &f)
}

pub(crate) fn normalize(u: &mut [f64], grid: &GridSpec, target: f64) {
    let m = mass(u, grid);
    let s = (target / m).sqrt();
    for x in u.iter_mut() {
        *x = x.abs() * s;
    }
}

/// Inner solves only need to be accurate relative to the current outer
/// residual; the stopping test is always evaluated on the iterate itself.
pub(crate) fn cg_rtol(outer_residual: f64) -> f64 {
    (1e-3 * outer_residual).clamp(1e-14, 1e-6)
}
pub(crate) const CG_MAX_ITER: usize = 20_000;
pub(crate) const DT_START: f64 = 1.0;
pub(crate) const DT_MAX: f64 = 1e8;

/// Minimise `E_eps` under `int eta^2 = 1`.
///
/// Each step solves `(I + dt A[eta^n]) eta* = eta^n` with
/// `A[u] = -eps^2 lap + |x|^2 + u^2`, takes `|eta*|` and renormalises.
/// Steps that raise the energy are rejected and retried with a smaller
/// `dt`. Stops once the projected gradient `A eta - mu eta` has sup-norm
/// at most `p.tol`.
pub fn solve_eta(p: &Params) -> Result<GroundState> {
    p.validate_single()?;
    let grid = p.grid;
    let n = grid.n;
    let eps = p.eps;
    if grid.h() > 0.5 * eps {
        log_warn(&format!(
            "grid spacing {:.4} does not resolve eps/2 = {:.4}",
            grid.h(),
            0.5 * eps
        ));
    }
    let c = eps * eps / (grid.h() * grid.h());
    let v = flow::potential(&grid);

    let mut u = initial_eta(&grid);
    normalize(&mut u, &grid, 1.0);
    let mut energy = scaled_energy(&u, &v, &grid, eps);
    let mut dt = DT_START;
    let mut d = vec![0.0; n * n];
    let mut rhs = vec![0.0; n * n];
    let mut next = vec![0.0; n * n];
    let mut residual = f64::INFINITY;

    for it in 0..p.max_iters {
        for k in 0..n * n {
            d[k] = v[k] + u[k] * u[k];
        }
        let mu;
        (mu, residual) = flow::projected_residual(n, c, &d, &u);
        if residual <= p.tol {
            return Ok(finish(u, grid, eps, mu, residual, it));
        }
        loop {
            // (I + dt A) x = u  <=>  (dt c (-h^2 lap) + 1 + dt d) x = u
            let dd: Vec<f64> = d.iter().map(|&dk| 1.0 + dt * dk).collect();
            rhs.copy_from_slice(&u);
            let guess = 1.0 / (1.0 + dt * mu);
            for k in 0..n * n {
                next[k] = u[k] * guess;
            }
            flow::pcg(n, dt * c, &dd, &rhs, &mut next, cg_rtol(residual), CG_MAX_ITER).ok_or(
                Error::NonConvergence {
                    solver: "inner CG",
                    iters: CG_MAX_ITER,
                    residual,
                },
            )?;
            normalize(&mut next, &grid, 1.0);
            let e_new = scaled_energy(&next, &v, &grid, eps);
            if e_new <= energy + 1e-12 * energy.abs().max(1.0) {
                std::mem::swap(&mut u, &mut next);
                energy = e_new;
                dt = (dt * 2.0).min(DT_MAX);
                break;
            }
            dt *= 0.25;
            if dt < 1e-12 {
                return Err(Error::NonConvergence {
                    solver: "solve_eta",
                    iters: it,
                    residual,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        solver: "solve_eta",
        iters: p.max_iters,
        residual,
    })
}

fn finish(u: Vec<f64>, grid: GridSpec, eps: f64, mu: f64, residual: f64, iters: usize) -> GroundState {
    let eta = Field::from_vec_unchecked(grid, u);
    let energy = energy_single(&eta, eps);
    let quartic = integrate(&eta.map(|x| x.powi(4)));
    let lambda_eps = 2.0 * eps * eps * energy + 0.5 * quartic;
    GroundState {
        eta,
        eps,
        lambda_eps,
        lambda_quotient: mu,
        energy,
        residual,
        iters,
    }
}

/// `sqrt(rho)` smoothed by one Jacobi sweep of the discrete Laplace equation.
fn initial_eta(grid: &GridSpec) -> Vec<f64> {
    let n = grid.n;
    let s: Vec<f64> = Field::from_fn(*grid, |x, y| tf::rho(x, y).sqrt()).into_values();
    let mut u = vec![0.0; n * n];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = j * n + i;
            u[k] = 0.25 * (s[k - 1] + s[k + 1] + s[k - n] + s[k + n]);
        }
    }
    u
}

fn log_warn(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Comparison of a ground state with the Thomas-Fermi profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaReport {
    pub eps: f64,
    pub mass: f64,
    /// Radial bins (width h) whose azimuthal mean exceeds the previous bin's
    /// by more than the tolerance.
    pub monotonicity_violations: usize,
    pub monotonicity_tol: f64,
    /// `max |eta - sqrt(rho)|` on `B(0, lambda - eps^0.55)`.
    pub max_dev_sqrt_rho: f64,
    /// `max |eta^2 - rho|` on `B(0, 0.8 lambda)`.
    pub max_dev_density_core: f64,
    /// `max eta` on `|x| >= 1.1 lambda`.
    pub max_outside: f64,
    pub lambda_eps: f64,
    pub lambda_quotient: f64,
    pub dist_to_lambda: f64,
    pub dist_to_lambda_sq: f64,
    pub residual: f64,
    pub energy: f64,
}

pub fn check_eta_properties(gs: &GroundState) -> EtaReport {
    check_eta_properties_with_tol(gs, 1e-6)
}

pub fn check_eta_properties_with_tol(gs: &GroundState, mono_tol: f64) -> EtaReport {
    let grid = *gs.grid();
    let n = grid.n;
    let h = grid.h();
    let l = tf::tf_lambda();
    let eta = gs.eta.values();

    let nbins = (grid.half_width / h).floor() as usize;
    let mut sums = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    let window = l - gs.eps.powf(0.55);
    let (mut dev_sqrt, mut dev_core, mut outside) = (0.0f64, 0.0f64, 0.0f64);
    for j in 0..n {
        for i in 0..n {
            let [x, y] = grid.point(i, j);
            let r = x.hypot(y);
            let e = eta[j * n + i];
            let bin = (r / h) as usize;
            if bin < nbins {
                sums[bin] += e;
                counts[bin] += 1;
            }
            let rho = tf::rho(x, y);
            if r < window {
                dev_sqrt = dev_sqrt.max((e - rho.sqrt()).abs());
            }
            if r < 0.8 * l {
                dev_core = dev_core.max((e * e - rho).abs());
            }
            if r >= 1.1 * l {
                outside = outside.max(e);
            }
        }
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let violations = means.windows(2).filter(|w| w[1] > w[0] + mono_tol).count();

    EtaReport {
        eps: gs.eps,
        mass: integrate_product(&gs.eta, &gs.eta),
        monotonicity_violations: violations,
        monotonicity_tol: mono_tol,
        max_dev_sqrt_rho: dev_sqrt,
        max_dev_density_core: dev_core,
        max_outside: outside,
        lambda_eps: gs.lambda_eps,
        lambda_quotient: gs.lambda_quotient,
        dist_to_lambda: (gs.lambda_eps - l).abs(),
        dist_to_lambda_sq: (gs.lambda_eps - l * l).abs(),
        residual: gs.residual,
        energy: gs.energy,
    }
}
