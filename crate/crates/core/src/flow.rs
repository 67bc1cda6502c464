//! Linear algebra behind the semi-implicit gradient flows.
//!
//! Everything works on full `n x n` arrays whose boundary ring is held at
//! zero (homogeneous Dirichlet). Operators are in `eps^2`-scaled form,
//! `A u = -eps^2 lap u + d * u`, with `d` a nodal coefficient.

use crate::grid::GridSpec;

/// `V(x) = |x|^2` sampled on the grid.
pub(crate) fn potential(grid: &GridSpec) -> Vec<f64> {
    let mut v = Vec::with_capacity(grid.len());
    for j in 0..grid.n {
        let y = grid.coord(j);
        for i in 0..grid.n {
            let x = grid.coord(i);
            v.push(x * x + y * y);
        }
    }
    v
}

/// `y = c * (-h^2 lap x) + d * x` on interior nodes; boundary of `y` is zero.
pub(crate) fn apply(n: usize, c: f64, d: &[f64], x: &[f64], y: &mut [f64]) {
    for j in 1..n - 1 {
        let row = j * n;
        for i in 1..n - 1 {
            let k = row + i;
            let lap = 4.0 * x[k] - x[k - 1] - x[k + 1] - x[k - n] - x[k + n];
            y[k] = c * lap + d[k] * x[k];
        }
    }
    for i in 0..n {
        y[i] = 0.0;
        y[(n - 1) * n + i] = 0.0;
        y[i * n] = 0.0;
        y[i * n + n - 1] = 0.0;
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG for `(c (-h^2 lap) + d) x = b` on the interior.
/// `x` holds the initial guess and receives the solution. Returns the
/// iteration count, or `None` if the relative residual never reached `rtol`.
pub(crate) fn pcg(
    n: usize,
    c: f64,
    d: &[f64],
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
) -> Option<usize> {
    let len = n * n;
    let mut r = vec![0.0; len];
    let mut z = vec![0.0; len];
    let mut p = vec![0.0; len];
    let mut q = vec![0.0; len];
    let inv_m: Vec<f64> = d.iter().map(|&dk| 1.0 / (dk + 4.0 * c)).collect();

    apply(n, c, d, x, &mut q);
    for k in 0..len {
        r[k] = b[k] - q[k];
    }
    zero_ring(n, &mut r);
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut rnorm = dot(&r, &r).sqrt();
    if rnorm <= rtol * bnorm {
        return Some(0);
    }
    for k in 0..len {
        z[k] = r[k] * inv_m[k];
    }
    p.copy_from_slice(&z);
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        apply(n, c, d, &p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return None;
        }
        let alpha = rz / pq;
        for k in 0..len {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        rnorm = dot(&r, &r).sqrt();
        if rnorm <= rtol * bnorm {
            return Some(it);
        }
        for k in 0..len {
            z[k] = r[k] * inv_m[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..len {
            p[k] = z[k] + beta * p[k];
        }
    }
    None
}

pub(crate) fn zero_ring(n: usize, v: &mut [f64]) {
    for i in 0..n {
        v[i] = 0.0;
        v[(n - 1) * n + i] = 0.0;
        v[i * n] = 0.0;
        v[i * n + n - 1] = 0.0;
    }
}

/// Projected-gradient data of one component: `mu = <Au, u> / <u, u>` and
/// the sup-norm of `A u - mu u` over interior nodes.
pub(crate) fn projected_residual(n: usize, c: f64, d: &[f64], u: &[f64]) -> (f64, f64) {
    let mut au = vec![0.0; n * n];
    apply(n, c, d, u, &mut au);
    let mu = dot(&au, u) / dot(u, u);
    let mut sup: f64 = 0.0;
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = j * n + i;
            sup = sup.max((au[k] - mu * u[k]).abs());
        }
    }
    (mu, sup)
}
