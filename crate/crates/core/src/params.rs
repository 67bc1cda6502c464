use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 200_000;

/// Physical and numerical parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub eps: f64,
    /// Intercomponent coupling `g_eps`.
    pub g: f64,
    pub alpha1: f64,
    pub grid: GridSpec,
    /// Sup-norm bound on the `eps^2`-scaled projected gradient.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Params {
    pub fn new(eps: f64, g: f64, alpha1: f64, grid: GridSpec) -> Result<Self> {
        let p = Self {
            eps,
            g,
            alpha1,
            grid,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with coupling given through `g eps^2`.
    pub fn with_coupling(eps: f64, g_eps2: f64, alpha1: f64, grid: GridSpec) -> Result<Self> {
        Self::new(eps, g_eps2 / (eps * eps), alpha1, grid)
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    #[inline]
    pub fn alpha2(&self) -> f64 {
        1.0 - self.alpha1
    }

    /// `g eps^2`, the segregation strength.
    #[inline]
    pub fn coupling(&self) -> f64 {
        self.g * self.eps * self.eps
    }

    /// `g~ = g (1 - 1 / (g eps^2))`.
    #[inline]
    pub fn g_tilde(&self) -> f64 {
        self.g * (1.0 - 1.0 / self.coupling())
    }

    pub fn validate_single(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Params(format!("eps = {} must be positive", self.eps)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Params(format!("tol = {} must be positive", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Params("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_single()?;
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::Params(format!("g = {} must be positive", self.g)));
        }
        if self.coupling() <= 1.0 {
            return Err(Error::Params(format!(
                "g eps^2 = {} must exceed 1",
                self.coupling()
            )));
        }
        if !(self.alpha1 > 0.0 && self.alpha1 < 1.0) {
            return Err(Error::Params(format!(
                "alpha1 = {} must lie in (0, 1)",
                self.alpha1
            )));
        }
        Ok(())
    }
}
