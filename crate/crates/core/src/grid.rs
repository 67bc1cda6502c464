//! Uniform square grids, nodal fields, trapezoidal quadrature and the
//! finite-difference stencils shared by every energy in the crate.
//!
//! Nodes sit at `x_i = -L + i h`, `y_j = -L + j h` with `h = 2L / (n - 1)`.
//! Values are stored row-major: index `j * n + i`.
//!
//! The discrete Dirichlet energy `integrate(grad_sq(f))` is exactly the
//! edge sum `sum_e w_e (f_b - f_a)^2` (with `w_e = 1/2` on edges lying on
//! the box boundary), whose variational derivative at interior nodes is the
//! five-point Laplacian. Every energy and the gradient-flow solvers rely on
//! that pairing.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if n < Self::MIN_POINTS {
            return Err(Error::Grid(format!("n = {n} < {}", Self::MIN_POINTS)));
        }
        if !(half_width.is_finite() && half_width > tf::tf_lambda()) {
            return Err(Error::Grid(format!(
                "half_width = {half_width} must exceed the Thomas-Fermi radius {}",
                tf::tf_lambda()
            )));
        }
        Ok(Self { half_width, n })
    }

    /// Box `[-1.25 lambda, 1.25 lambda]^2` with `n` points per axis.
    pub fn with_default_box(n: usize) -> Result<Self> {
        Self::new(1.25 * tf::tf_lambda(), n)
    }

    /// Default box with at least `points_per_eps` nodes per healing length,
    /// capped at `n_max`.
    pub fn resolving(eps: f64, points_per_eps: f64, n_max: usize) -> Result<Self> {
        let l = 1.25 * tf::tf_lambda();
        let want = (2.0 * l * points_per_eps / eps).ceil() as usize + 1;
        Self::new(l, want.clamp(Self::MIN_POINTS, n_max.max(Self::MIN_POINTS)))
    }

    #[inline]
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.h()
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(i), self.coord(j)]
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    /// Trapezoidal weight of node `(i, j)`, including the cell area `h^2`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let h = self.h();
        let edge = |k: usize| if k == 0 || k == self.n - 1 { 0.5 } else { 1.0 };
        edge(i) * edge(j) * h * h
    }

    /// Sum `w_e * f(a, b)` over all grid edges `a -> b` (flat indices), with
    /// `w_e = 1/2` for edges lying on the boundary and 1 otherwise.
    pub fn edge_sum(&self, mut f: impl FnMut(usize, usize) -> f64) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for j in 0..n {
            let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            for i in 0..n - 1 {
                let a = j * n + i;
                acc += wj * f(a, a + 1);
            }
        }
        for j in 0..n - 1 {
            for i in 0..n {
                let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                let a = j * n + i;
                acc += wi * f(a, a + n);
            }
        }
        acc
    }
}

/// Scalar samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite value at flat index {k}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.n {
            let y = grid.coord(j);
            for i in 0..grid.n {
                values.push(f(grid.coord(i), y));
            }
        }
        Self { grid, values }
    }

    /// Skips the finiteness check; callers guarantee finite values.
    pub(crate) fn from_vec_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Plain-text dump: header `nx ny L`, then one value per line in
    /// row-major order with 17 significant digits.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::with_capacity(self.values.len() * 25 + 64);
        writeln!(
            buf,
            "{} {} {}",
            self.grid.n,
            self.grid.n,
            fmt_f64(self.grid.half_width)
        )
        .expect("write to String");
        for v in &self.values {
            buf.push_str(&fmt_f64(*v));
            buf.push('\n');
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn read_dump<R: Read>(input: R) -> Result<Field> {
        let reader = BufReader::new(input);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty grid dump".into()))??;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let nx: usize = parts[0]
            .parse()
            .map_err(|e| Error::Parse(format!("nx: {e}")))?;
        let ny: usize = parts[1]
            .parse()
            .map_err(|e| Error::Parse(format!("ny: {e}")))?;
        let l: f64 = parts[2]
            .parse()
            .map_err(|e| Error::Parse(format!("L: {e}")))?;
        if nx != ny {
            return Err(Error::Parse(format!("non-square grid {nx}x{ny}")));
        }
        let grid = GridSpec::new(l, nx)?;
        let mut values = Vec::with_capacity(grid.len());
        for line in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            values.push(
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("value {t:?}: {e}")))?,
            );
        }
        Field::new(grid, values)
    }
}

/// Decimal with 17 significant digits; parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Trapezoidal quadrature over the box.
pub fn integrate(f: &Field) -> f64 {
    let g = f.grid();
    let n = g.n;
    let h2 = g.h() * g.h();
    let vals = f.values();
    let mut total = 0.0;
    for j in 0..n {
        let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        let row = &vals[j * n..(j + 1) * n];
        let inner: f64 = row[1..n - 1].iter().sum();
        total += wj * (inner + 0.5 * (row[0] + row[n - 1]));
    }
    total * h2
}

/// Trapezoidal quadrature of `a * b` without materialising the product.
pub fn integrate_product(a: &Field, b: &Field) -> f64 {
    debug_assert_eq!(a.grid(), b.grid());
    let g = a.grid();
    let n = g.n;
    let (av, bv) = (a.values(), b.values());
    let mut total = 0.0;
    for j in 0..n {
        let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for i in 0..n {
            let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let k = j * n + i;
            row += wi * av[k] * bv[k];
        }
        total += wj * row;
    }
    total * g.h() * g.h()
}

/// `|grad f|^2` per node: along each axis, the mean of the squared forward
/// and backward differences; on the boundary ring the single available
/// one-sided difference is used. Exact for affine fields and second-order
/// accurate for smooth ones.
pub fn grad_sq(f: &Field) -> Field {
    let g = *f.grid();
    let n = g.n;
    let inv_h2 = 1.0 / (g.h() * g.h());
    let v = f.values();
    let mut out = vec![0.0; g.len()];
    for j in 0..n {
        for i in 0..n {
            let k = j * n + i;
            let axis = |prev: Option<usize>, next: Option<usize>| -> f64 {
                match (prev, next) {
                    (Some(p), Some(q)) => {
                        let b = v[k] - v[p];
                        let fw = v[q] - v[k];
                        0.5 * (b * b + fw * fw)
                    }
                    (Some(p), None) => (v[k] - v[p]).powi(2),
                    (None, Some(q)) => (v[q] - v[k]).powi(2),
                    (None, None) => 0.0,
                }
            };
            let gx = axis(
                (i > 0).then(|| k - 1),
                (i + 1 < n).then(|| k + 1),
            );
            let gy = axis(
                (j > 0).then(|| k - n),
                (j + 1 < n).then(|| k + n),
            );
            out[k] = (gx + gy) * inv_h2;
        }
    }
    Field::from_vec_unchecked(g, out)
}

/// Discrete Dirichlet energy `integrate(grad_sq(f))`, computed directly as
/// an edge sum.
pub fn dirichlet(f: &Field) -> f64 {
    let v = f.values();
    f.grid().edge_sum(|a, b| {
        let d = v[b] - v[a];
        d * d
    })
}

/// Five-point Laplacian. Boundary nodes copy the value computed at the
/// nearest interior node.
pub fn laplacian(f: &Field) -> Field {
    let g = *f.grid();
    let n = g.n;
    let inv_h2 = 1.0 / (g.h() * g.h());
    let v = f.values();
    let mut out = vec![0.0; g.len()];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = j * n + i;
            out[k] = (v[k - 1] + v[k + 1] + v[k - n] + v[k + n] - 4.0 * v[k]) * inv_h2;
        }
    }
    for j in 0..n {
        for i in 0..n {
            if g.is_boundary(i, j) {
                let ii = i.clamp(1, n - 2);
                let jj = j.clamp(1, n - 2);
                out[j * n + i] = out[jj * n + ii];
            }
        }
    }
    Field::from_vec_unchecked(g, out)
}
