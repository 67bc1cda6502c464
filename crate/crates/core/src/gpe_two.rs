//! Two-component energy and its minimisation under the two mass constraints.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow;
use crate::gpe_single::{cg_rtol, normalize, scaled_energy, GroundState, CG_MAX_ITER, DT_MAX, DT_START};
use crate::grid::{integrate_product, Field, GridSpec};
use crate::params::Params;
use crate::tf;

/// Starting configuration for [`minimize_two`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitKind {
    /// Component 1 on `x < 0`, component 2 on `x > 0`.
    HalfDisk,
    /// Component 1 inside `|x| < R`, component 2 outside.
    DiskAnnulus(f64),
    Random(u64),
    /// Two grid dumps, component 1 then component 2.
    FromFiles(PathBuf, PathBuf),
}

impl InitKind {
    pub fn label(&self) -> String {
        match self {
            InitKind::HalfDisk => "half_disk".into(),
            InitKind::DiskAnnulus(r) => format!("disk_annulus({r})"),
            InitKind::Random(s) => format!("random({s})"),
            InitKind::FromFiles(a, b) => format!("files({},{})", a.display(), b.display()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CondensatePair {
    pub u1: Field,
    pub u2: Field,
    pub masses: (f64, f64),
    pub energy: f64,
    pub residual: f64,
    pub iters: usize,
}

impl CondensatePair {
    /// `int u1^2 u2^2`.
    pub fn overlap(&self) -> f64 {
        overlap(&self.u1, &self.u2)
    }
}

pub fn overlap(u1: &Field, u2: &Field) -> f64 {
    let a = u1.map(|x| x * x);
    let b = u2.map(|x| x * x);
    integrate_product(&a, &b)
}

/// `E(u1) + E(u2) + (g/2) int u1^2 u2^2`.
pub fn energy_two(u1: &Field, u2: &Field, p: &Params) -> f64 {
    let v = flow::potential(u1.grid());
    scaled_energy_two(u1.values(), u2.values(), &v, u1.grid(), p) / (p.eps * p.eps)
}

fn scaled_energy_two(u1: &[f64], u2: &[f64], v: &[f64], grid: &GridSpec, p: &Params) -> f64 {
    let e1 = scaled_energy(u1, v, grid, p.eps);
    let e2 = scaled_energy(u2, v, grid, p.eps);
    let a = Field::from_vec_unchecked(*grid, u1.iter().zip(u2).map(|(x, y)| x * y).collect());
    (e1 + e2) + 0.5 * p.coupling() * integrate_product(&a, &a)
}

/// `eps (E_pair - E(eta))`.
pub fn scaled_excess(pair: &CondensatePair, gs: &GroundState, p: &Params) -> f64 {
    p.eps * (pair.energy - gs.energy)
}

/// Minimise the two-component energy with `int u_i^2 = alpha_i`.
///
/// Both components take the same semi-implicit step as [`crate::solve_eta`]
/// with the other component frozen, `A_1 = -eps^2 lap + |x|^2 + u1^2 +
/// g eps^2 u2^2` (and symmetrically), followed by `u_i <- |u_i|` and an
/// independent rescaling onto each mass constraint.
pub fn minimize_two(p: &Params, init: &InitKind) -> Result<CondensatePair> {
    p.validate()?;
    let grid = p.grid;
    let (mut u1, mut u2) = initial_pair(&grid, init)?;
    minimize_from(p, &mut u1, &mut u2)
}

/// Continue the flow from a given pair (values are copied).
pub fn minimize_two_from(p: &Params, u1: &Field, u2: &Field) -> Result<CondensatePair> {
    p.validate()?;
    if *u1.grid() != p.grid || *u2.grid() != p.grid {
        return Err(Error::Params("initial fields are not on p.grid".into()));
    }
    let mut a = u1.values().to_vec();
    let mut b = u2.values().to_vec();
    flow::zero_ring(p.grid.n, &mut a);
    flow::zero_ring(p.grid.n, &mut b);
    minimize_from(p, &mut a, &mut b)
}

fn minimize_from(p: &Params, u1: &mut Vec<f64>, u2: &mut Vec<f64>) -> Result<CondensatePair> {
    let grid = p.grid;
    let n = grid.n;
    let (a1, a2) = (p.alpha1, p.alpha2());
    let k = p.coupling();
    let c = p.eps * p.eps / (grid.h() * grid.h());
    let v = flow::potential(&grid);

    normalize(u1, &grid, a1);
    normalize(u2, &grid, a2);
    let mut energy = scaled_energy_two(u1, u2, &v, &grid, p);
    let mut dt = DT_START;
    let len = n * n;
    let (mut d1, mut d2) = (vec![0.0; len], vec![0.0; len]);
    let (mut n1, mut n2) = (vec![0.0; len], vec![0.0; len]);
    let mut residual = f64::INFINITY;

    for it in 0..p.max_iters {
        for q in 0..len {
            let (s1, s2) = (u1[q] * u1[q], u2[q] * u2[q]);
            d1[q] = v[q] + s1 + k * s2;
            d2[q] = v[q] + s2 + k * s1;
        }
        let (mu1, r1) = flow::projected_residual(n, c, &d1, u1);
        let (mu2, r2) = flow::projected_residual(n, c, &d2, u2);
        residual = r1.max(r2);
        if residual <= p.tol {
            return Ok(finish(p, u1, u2, it, residual));
        }
        loop {
            let rtol = cg_rtol(residual);
            step(n, c, dt, &d1, u1, mu1, &mut n1, rtol, residual)?;
            step(n, c, dt, &d2, u2, mu2, &mut n2, rtol, residual)?;
            normalize(&mut n1, &grid, a1);
            normalize(&mut n2, &grid, a2);
            let e_new = scaled_energy_two(&n1, &n2, &v, &grid, p);
            if e_new <= energy + 1e-12 * energy.abs().max(1.0) {
                std::mem::swap(u1, &mut n1);
                std::mem::swap(u2, &mut n2);
                energy = e_new;
                dt = (dt * 2.0).min(DT_MAX);
                break;
            }
            dt *= 0.25;
            if dt < 1e-12 {
                return Err(Error::NonConvergence {
                    solver: "minimize_two",
                    iters: it,
                    residual,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        solver: "minimize_two",
        iters: p.max_iters,
        residual,
    })
}

#[allow(clippy::too_many_arguments)]
fn step(
    n: usize,
    c: f64,
    dt: f64,
    d: &[f64],
    u: &[f64],
    mu: f64,
    out: &mut [f64],
    rtol: f64,
    residual: f64,
) -> Result<()> {
    let dd: Vec<f64> = d.iter().map(|&x| 1.0 + dt * x).collect();
    let guess = 1.0 / (1.0 + dt * mu);
    for (o, &x) in out.iter_mut().zip(u) {
        *o = x * guess;
    }
    flow::pcg(n, dt * c, &dd, u, out, rtol, CG_MAX_ITER)
        .map(|_| ())
        .ok_or(Error::NonConvergence {
            solver: "inner CG",
            iters: CG_MAX_ITER,
            residual,
        })
}

fn finish(p: &Params, u1: &[f64], u2: &[f64], iters: usize, residual: f64) -> CondensatePair {
    let f1 = Field::from_vec_unchecked(p.grid, u1.to_vec());
    let f2 = Field::from_vec_unchecked(p.grid, u2.to_vec());
    let masses = (integrate_product(&f1, &f1), integrate_product(&f2, &f2));
    let energy = energy_two(&f1, &f2, p);
    CondensatePair {
        u1: f1,
        u2: f2,
        masses,
        energy,
        residual,
        iters,
    }
}

/// `0` for `t <= -1`, `1` for `t >= 1`, cubic in between.
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(-1.0, 1.0);
    0.5 + 0.75 * t - 0.25 * t * t * t
}

pub fn initial_pair(grid: &GridSpec, init: &InitKind) -> Result<(Vec<f64>, Vec<f64>)> {
    let w = 4.0 * grid.h();
    let sqrt_rho = |x: f64, y: f64| tf::rho(x, y).sqrt();
    let (mut a, mut b): (Vec<f64>, Vec<f64>) = match init {
        InitKind::HalfDisk => (
            Field::from_fn(*grid, |x, y| sqrt_rho(x, y) * smoothstep(-x / w)).into_values(),
            Field::from_fn(*grid, |x, y| sqrt_rho(x, y) * smoothstep(x / w)).into_values(),
        ),
        InitKind::DiskAnnulus(r) => {
            let r = *r;
            if !(r > 0.0 && r < tf::tf_lambda()) {
                return Err(Error::Domain {
                    what: "DiskAnnulus R",
                    value: r,
                    domain: "(0, lambda)",
                });
            }
            (
                Field::from_fn(*grid, |x, y| sqrt_rho(x, y) * smoothstep((r - x.hypot(y)) / w))
                    .into_values(),
                Field::from_fn(*grid, |x, y| sqrt_rho(x, y) * smoothstep((x.hypot(y) - r) / w))
                    .into_values(),
            )
        }
        InitKind::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let modes: Vec<[f64; 4]> = (0..6)
                .map(|_| {
                    [
                        rng.random_range(-4.0..4.0),
                        rng.random_range(-4.0..4.0),
                        rng.random_range(0.0..std::f64::consts::TAU),
                        rng.random_range(0.2..1.0),
                    ]
                })
                .collect();
            let s = Field::from_fn(*grid, |x, y| {
                modes
                    .iter()
                    .map(|m| m[3] * (m[0] * x + m[1] * y + m[2]).cos())
                    .sum::<f64>()
            });
            (
                Field::from_fn(*grid, sqrt_rho)
                    .zip_map(&s, |r, s| r * (1.0 + 0.8 * s.tanh()))
                    .into_values(),
                Field::from_fn(*grid, sqrt_rho)
                    .zip_map(&s, |r, s| r * (1.0 - 0.8 * s.tanh()))
                    .into_values(),
            )
        }
        InitKind::FromFiles(p1, p2) => {
            let f1 = Field::read_dump(std::fs::File::open(p1)?)?;
            let f2 = Field::read_dump(std::fs::File::open(p2)?)?;
            if f1.grid() != grid || f2.grid() != grid {
                return Err(Error::Params("dumped fields do not match the grid".into()));
            }
            (f1.into_values(), f2.into_values())
        }
    };
    flow::zero_ring(grid.n, &mut a);
    flow::zero_ring(grid.n, &mut b);
    Ok((a, b))
}
