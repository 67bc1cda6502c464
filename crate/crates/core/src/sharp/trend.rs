//! Convergence of the scaled excess energy toward the sharp-interface value.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpe_single::solve_eta;
use crate::gpe_two::{minimize_two, InitKind};
use crate::grid::{fmt_f64, Field, GridSpec};
use crate::params::Params;
use crate::sharp::cell::sigma_eff;
use crate::sharp::contour::extract_interface;
use crate::sharp::interface::InterfaceSpec;
use crate::sharp::recovery::{build_recovery, default_t};
use crate::spin::{decompose, interface_min_v, to_spin};
use crate::tf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrendMode {
    Minimizer,
    Recovery,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub eps: f64,
    pub g: f64,
    /// `eps (E_pair - E(eta))`.
    pub excess: f64,
    /// `2 sigma_eff` times the weighted length of the extracted interface.
    pub prediction: f64,
    pub ratio: f64,
    /// Weighted length `int rho^{3/2}` of the extracted interface.
    pub interface_length: f64,
    pub min_v: f64,
    pub n: usize,
    pub split_residual: f64,
}

pub const TREND_HEADER: &str = "eps,g,excess,prediction,ratio,interface_length,min_v";

impl TrendRow {
    pub fn csv(&self) -> String {
        [
            self.eps,
            self.g,
            self.excess,
            self.prediction,
            self.ratio,
            self.interface_length,
            self.min_v,
        ]
        .iter()
        .map(|&x| fmt_f64(x))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Knobs of the trend experiment besides the physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendOptions {
    pub mode: TrendMode,
    /// Grid nodes per healing length.
    pub points_per_eps: f64,
    pub n_max: usize,
}

impl Default for TrendOptions {
    fn default() -> Self {
        Self {
            mode: TrendMode::Minimizer,
            points_per_eps: 5.0,
            n_max: 512,
        }
    }
}

/// Sharp pattern matching a parametric initial guess.
pub fn spec_for_init(init: &InitKind, alpha1: f64) -> Result<InterfaceSpec> {
    match init {
        InitKind::HalfDisk => Ok(InterfaceSpec::Diameter(FRAC_PI_2)),
        InitKind::DiskAnnulus(_) => InterfaceSpec::circle_for_mass(alpha1),
        _ => Err(Error::Params(format!(
            "no sharp pattern corresponds to init {}",
            init.label()
        ))),
    }
}

/// One trend point: solve (or construct) a pair at `p`, split its energy,
/// and compare with the limit energy of its own extracted interface.
pub fn trend_point(init: &InitKind, p: &Params, mode: TrendMode) -> Result<TrendRow> {
    let gs = solve_eta(p)?;
    let (u1, u2): (Field, Field) = match mode {
        TrendMode::Minimizer => {
            let pair = minimize_two(p, init)?;
            (pair.u1, pair.u2)
        }
        TrendMode::Recovery => {
            let spec = spec_for_init(init, p.alpha1)?;
            let rec = build_recovery(&spec, p, default_t(p.eps), &gs)?;
            (rec.u1, rec.u2)
        }
    };
    let b = decompose(&u1, &u2, &gs, p)?;
    let sp = to_spin(&u1, &u2, &gs)?;
    let curves = extract_interface(&sp.phi, FRAC_PI_2)?;
    let wl: f64 = curves.iter().map(tf::weighted_length).sum();
    let prediction = 2.0 * sigma_eff() * wl;
    let min_v = interface_min_v(&sp, &curves[0], 2.0 * p.grid.h())?;
    Ok(TrendRow {
        eps: p.eps,
        g: p.g,
        excess: b.scaled_excess,
        prediction,
        ratio: b.scaled_excess / prediction,
        interface_length: wl,
        min_v,
        n: p.grid.n,
        split_residual: b.split_residual,
    })
}

/// Trend over a decreasing list of `eps` with `g eps^2`, `alpha1` and the
/// tolerances of `p0` held fixed; the grid is refined with `eps`. Points are
/// independent and run in parallel; rows keep the order of `eps_list`.
pub fn gamma_trend(init: &InitKind, eps_list: &[f64], p0: &Params, opts: &TrendOptions) -> Result<Vec<TrendRow>> {
    if eps_list.len() < 3 || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Params(
            "eps_list needs at least 3 strictly decreasing entries".into(),
        ));
    }
    p0.validate()?;
    eps_list
        .par_iter()
        .map(|&eps| {
            let grid = GridSpec::resolving(eps, opts.points_per_eps, opts.n_max)?;
            let p = Params::with_coupling(eps, p0.coupling(), p0.alpha1, grid)?
                .tol(p0.tol)
                .max_iters(p0.max_iters)
                .seed(p0.seed);
            trend_point(init, &p, opts.mode)
        })
        .collect()
}
