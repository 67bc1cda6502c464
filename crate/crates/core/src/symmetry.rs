//! Radial partitions versus the two-sector split of the limiting problem.
//!
//! All energies are in units of `8 sigma`, so nothing here depends on the
//! cell constant. A centred circle enclosing mass `alpha` costs `f(alpha)`,
//! and the diameter costs `3/16`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::fmt_f64;
use crate::sharp::interface::{limit_energy, InterfaceSpec};

/// `(1 - a)^{3/4} (1 - sqrt(1 - a))^{1/2}` on `[0, 1]`; NaN outside.
pub fn f_alpha(alpha: f64) -> f64 {
    if !(0.0..=1.0).contains(&alpha) {
        return f64::NAN;
    }
    let s = 1.0 - alpha;
    s.powf(0.75) * (1.0 - s.sqrt()).sqrt()
}

/// Energy of two half-disks, `3/16`.
pub fn sector_energy() -> f64 {
    3.0 / 16.0
}

/// The sector energy recomputed from the weighted length of a diameter.
pub fn sector_energy_from_length() -> f64 {
    let sigma = 1.0;
    limit_energy(&InterfaceSpec::Diameter(0.0), sigma).expect("valid spec") / (8.0 * sigma)
}

/// Annular masses `beta_1, ..., beta_{2n+1}` from the centre outwards. Odd
/// positions (1-based) belong to component 2, even ones to component 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialConfig {
    betas: Vec<f64>,
}

const MASS_TOL: f64 = 1e-12;

impl RadialConfig {
    pub fn new(betas: Vec<f64>, alpha1: f64) -> Result<Self> {
        if betas.len() < 3 || betas.len() % 2 == 0 {
            return Err(Error::Params(format!(
                "a radial configuration needs 2n + 1 >= 3 masses, got {}",
                betas.len()
            )));
        }
        if betas.iter().any(|&b| !(b >= 0.0)) {
            return Err(Error::Params("annular masses must be nonnegative".into()));
        }
        let even: f64 = betas.iter().skip(1).step_by(2).sum();
        let odd: f64 = betas.iter().step_by(2).sum();
        if (even - alpha1).abs() > MASS_TOL || (odd - (1.0 - alpha1)).abs() > MASS_TOL {
            return Err(Error::Params(format!(
                "component masses {even} and {odd} do not match {alpha1} and {}",
                1.0 - alpha1
            )));
        }
        Ok(Self { betas })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn n(&self) -> usize {
        self.betas.len() / 2
    }

    pub fn alpha1(&self) -> f64 {
        self.betas.iter().skip(1).step_by(2).sum()
    }

    /// Enclosed masses at the `2n` interfaces.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.betas[..self.betas.len() - 1]
            .iter()
            .scan(0.0, |s, &b| {
                *s += b;
                Some(*s)
            })
            .collect()
    }
}

/// `sum_{j=1}^{2n} f(beta_1 + ... + beta_j)`.
pub fn g_n(config: &RadialConfig) -> f64 {
    config
        .partial_sums()
        .into_iter()
        .map(|s| f_alpha(s.min(1.0)))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub alpha1: f64,
    pub sector_energy: f64,
    pub best_radial: f64,
    pub best_config: RadialConfig,
    pub radial_beats_sector: bool,
}

pub const SYMMETRY_HEADER: &str = "alpha1,sector_energy,best_radial,best_n,betas,verdict";

impl SymmetryVerdict {
    pub fn csv(&self) -> String {
        let betas: Vec<String> = self.best_config.betas().iter().map(|&b| fmt_f64(b)).collect();
        format!(
            "{},{},{},{},{},{}",
            fmt_f64(self.alpha1),
            fmt_f64(self.sector_energy),
            fmt_f64(self.best_radial),
            self.best_config.n(),
            betas.join(";"),
            if self.radial_beats_sector { "radial" } else { "non-radial" }
        )
    }
}

/// Minimum of `g_n` over `n = 1..=n_max` with every annular mass a multiple
/// of `alpha_i / grid_steps` for its component.
///
/// Dynamic programming over the cumulative masses `(A, B)` of the two
/// components: an odd band moves `A` up and pays `f(A + B)`, an even band
/// moves `B` up and pays `f(A + B)`. The last band of component 2 is free,
/// so the final state only needs `B = alpha1`.
pub fn best_radial(alpha1: f64, n_max: usize, grid_steps: usize) -> Result<SymmetryVerdict> {
    if !(alpha1 > 0.0 && alpha1 < 1.0) {
        return Err(Error::Domain {
            what: "alpha1",
            value: alpha1,
            domain: "(0, 1)",
        });
    }
    if n_max == 0 || grid_steps == 0 {
        return Err(Error::Params("n_max and grid_steps must be positive".into()));
    }
    let alpha2 = 1.0 - alpha1;
    let s = grid_steps;
    let w = s + 1;
    let mass = |a: usize, b: usize| a as f64 * alpha2 / s as f64 + b as f64 * alpha1 / s as f64;
    let cost: Vec<f64> = (0..w * w).map(|k| f_alpha(mass(k / w, k % w).min(1.0))).collect();

    // value[a * w + b]; parents per layer for reconstruction.
    let mut value = vec![f64::INFINITY; w * w];
    value[0] = 0.0;
    let mut parents: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(n_max);
    let mut best: Option<(f64, usize, usize)> = None; // (value, n, final a)
    for layer in 1..=n_max {
        // Odd band: A' >= A at fixed B.
        let mut odd = vec![f64::INFINITY; w * w];
        let mut odd_from = vec![0usize; w * w];
        for b in 0..w {
            let (mut m, mut arg) = (f64::INFINITY, 0);
            for a in 0..w {
                let k = a * w + b;
                if value[k] < m {
                    m = value[k];
                    arg = a;
                }
                odd[k] = m + cost[k];
                odd_from[k] = arg;
            }
        }
        // Even band: B' >= B at fixed A.
        let mut even = vec![f64::INFINITY; w * w];
        let mut even_from = vec![0usize; w * w];
        for a in 0..w {
            let (mut m, mut arg) = (f64::INFINITY, 0);
            for b in 0..w {
                let k = a * w + b;
                if odd[k] < m {
                    m = odd[k];
                    arg = b;
                }
                even[k] = m + cost[k];
                even_from[k] = arg;
            }
        }
        parents.push((odd_from, even_from));
        for a in 0..w {
            let v = even[a * w + s];
            if best.map_or(true, |(bv, _, _)| v < bv) {
                best = Some((v, layer, a));
            }
        }
        value = even;
    }
    let (best_value, n, mut a) = best.expect("at least one layer");
    // Walk back through the layers of the optimal n.
    let mut b = s;
    let mut cum = Vec::with_capacity(2 * n);
    for layer in (0..n).rev() {
        let (odd_from, even_from) = &parents[layer];
        cum.push((a, b));
        let b_prev = even_from[a * w + b];
        cum.push((a, b_prev));
        let a_prev = odd_from[a * w + b_prev];
        a = a_prev;
        b = b_prev;
    }
    cum.reverse();
    // cum holds (A_j, B_{j-1}) and (A_j, B_j) alternately from the centre.
    let mut betas = cum_to_betas(&cum, alpha1, alpha2, s);
    let odd_used: f64 = betas.iter().step_by(2).sum();
    betas.push((alpha2 - odd_used).max(0.0));
    let config = RadialConfig::new(betas, alpha1)?;
    Ok(SymmetryVerdict {
        alpha1,
        sector_energy: sector_energy(),
        best_radial: best_value,
        best_config: config,
        radial_beats_sector: best_value < sector_energy(),
    })
}

fn cum_to_betas(cum: &[(usize, usize)], alpha1: f64, alpha2: f64, s: usize) -> Vec<f64> {
    // Differences of cumulative masses computed from the cumulative values,
    // so the even bands telescope to exactly alpha1.
    let mut out = Vec::new();
    let (mut pa, mut pb) = (0.0, 0.0);
    for (k, &(a, b)) in cum.iter().enumerate() {
        let (ca, cb) = (a as f64 * alpha2 / s as f64, b as f64 * alpha1 / s as f64);
        out.push(if k % 2 == 0 { ca - pa } else { cb - pb });
        pa = ca;
        pb = cb;
    }
    if let Some(last) = out.iter().skip(1).step_by(2).copied().reduce(|x, y| x + y) {
        let k = out.len() - 1;
        out[k] += alpha1 - last;
    }
    out
}

/// `1 - a*` where `f(a*) = 3/16` on `[1/2, 1)`.
///
/// Below this fraction for either component a centred disk beats the
/// sector split; `f` is checked to be strictly decreasing on the bracket
/// before bisecting.
pub fn delta0() -> f64 {
    let target = sector_energy();
    let samples = 4096;
    let mut prev = f_alpha(0.5);
    for k in 1..samples {
        let x = 0.5 + 0.5 * k as f64 / samples as f64;
        let y = f_alpha(x);
        assert!(y < prev, "f is not decreasing on [1/2, 1) near {x}");
        prev = y;
    }
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_alpha(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    1.0 - 0.5 * (lo + hi)
}

/// `best_radial` over a list of mass fractions, in parallel.
pub fn symmetry_sweep(alphas: &[f64], n_max: usize, grid_steps: usize) -> Result<Vec<SymmetryVerdict>> {
    alphas
        .par_iter()
        .map(|&a| best_radial(a, n_max, grid_steps))
        .collect()
}

/// `count` equally spaced fractions covering `[lo, hi]`.
pub fn alpha_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tf;
    use approx::assert_abs_diff_eq;

    #[test]
    fn f_values() {
        assert_eq!(f_alpha(0.0), 0.0);
        assert_eq!(f_alpha(1.0), 0.0);
        assert_abs_diff_eq!(f_alpha(0.5), 0.3218, epsilon = 1e-4);
        assert!(f_alpha(-0.1).is_nan());
    }

    #[test]
    fn f_is_the_scaled_circle_energy() {
        for a in [0.1, 0.3, 0.5, 0.8] {
            let spec = InterfaceSpec::Circle(tf::mass_radius(a).unwrap());
            let e = limit_energy(&spec, 0.25).unwrap() / 2.0;
            assert_abs_diff_eq!(e, f_alpha(a), epsilon = 1e-12);
        }
    }

    #[test]
    fn sector_crosscheck() {
        assert_eq!(sector_energy(), 0.1875);
        assert_abs_diff_eq!(sector_energy_from_length(), 0.1875, epsilon = 1e-6);
    }

    #[test]
    fn g_one_examples() {
        let a1 = 0.3;
        let c = RadialConfig::new(vec![0.0, a1, 1.0 - a1], a1).unwrap();
        assert_abs_diff_eq!(g_n(&c), f_alpha(a1), epsilon = 1e-15);
        let c = RadialConfig::new(vec![1.0 - a1, a1, 0.0], a1).unwrap();
        assert_abs_diff_eq!(g_n(&c), f_alpha(1.0 - a1), epsilon = 1e-15);
        let c = RadialConfig::new(vec![0.25, 0.5, 0.25], 0.5).unwrap();
        assert_abs_diff_eq!(g_n(&c), 0.2950 + 0.2500, epsilon = 1e-3);
    }

    #[test]
    fn g_one_matches_annuli_limit_energy() {
        let c = RadialConfig::new(vec![0.25, 0.5, 0.25], 0.5).unwrap();
        let radii: Vec<f64> = c.partial_sums().iter().map(|&s| tf::mass_radius(s).unwrap()).collect();
        let e = limit_energy(&InterfaceSpec::Annuli(radii), 1.0).unwrap() / 8.0;
        assert_abs_diff_eq!(e, g_n(&c), epsilon = 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(RadialConfig::new(vec![0.5, 0.5], 0.5).is_err());
        assert!(RadialConfig::new(vec![0.2, 0.6, 0.2], 0.5).is_err());
        assert!(RadialConfig::new(vec![-0.1, 0.5, 0.6], 0.5).is_err());
    }

    #[test]
    fn delta0_value_and_endpoints() {
        let d = delta0();
        assert_abs_diff_eq!(d, 0.1486, epsilon = 1e-3);
        assert_abs_diff_eq!(f_alpha(1.0 - d), 0.1875, epsilon = 1e-6);
        assert!(f_alpha(d) > 0.1875);
    }

    /// Exhaustive enumeration over the same lattice.
    fn brute(alpha1: f64, n_max: usize, s: usize) -> f64 {
        let a2 = 1.0 - alpha1;
        let mut best = f64::INFINITY;
        fn rec(
            j: usize,
            n: usize,
            a: usize,
            b: usize,
            acc: f64,
            s: usize,
            m: &dyn Fn(usize, usize) -> f64,
            best: &mut f64,
        ) {
            if j == n {
                if b == s {
                    *best = best.min(acc);
                }
                return;
            }
            for a2 in a..=s {
                let c1 = acc + f_alpha(m(a2, b).min(1.0));
                for b2 in b..=s {
                    rec(j + 1, n, a2, b2, c1 + f_alpha(m(a2, b2).min(1.0)), s, m, best);
                }
            }
        }
        let m = move |a: usize, b: usize| a as f64 * a2 / s as f64 + b as f64 * alpha1 / s as f64;
        for n in 1..=n_max {
            rec(0, n, 0, 0, 0.0, s, &m, &mut best);
        }
        best
    }

    #[test]
    fn dynamic_programme_matches_enumeration() {
        for &a in &[0.1, 0.35, 0.5, 0.7] {
            for n in 1..=3 {
                let dp = best_radial(a, n, 8).unwrap();
                assert_abs_diff_eq!(dp.best_radial, brute(a, n, 8), epsilon = 1e-14);
                assert_abs_diff_eq!(g_n(&dp.best_config), dp.best_radial, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn balanced_masses_are_not_radial() {
        let v = best_radial(0.5, 2, 200).unwrap();
        assert!(v.best_radial > 0.1875);
        assert!(!v.radial_beats_sector);
    }

    #[test]
    fn extreme_masses_prefer_a_disk() {
        let v = best_radial(0.02, 3, 50).unwrap();
        assert!(v.best_radial < 0.1875);
        assert!(v.radial_beats_sector);
    }

    #[test]
    fn refinement_never_increases_the_minimum() {
        for &a in &[0.2, 0.5] {
            let c = best_radial(a, 2, 50).unwrap().best_radial;
            let f = best_radial(a, 2, 100).unwrap().best_radial;
            assert!(f <= c + 1e-15);
        }
    }

    #[test]
    fn csv_row_has_all_columns() {
        let v = best_radial(0.4, 1, 50).unwrap();
        assert_eq!(v.csv().split(',').count(), SYMMETRY_HEADER.split(',').count());
    }
}
