use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::path::PathBuf;

use rayon::prelude::*;

use condgamma::gpe_single::check_eta_properties_with_tol;
use condgamma::grid::integrate;
use condgamma::sharp::{
    build_recovery, default_t, extract_interface, gamma_trend, limit_energy, sigma_eff, InterfaceSpec, TrendMode,
    TrendOptions, TREND_HEADER,
};
use condgamma::symmetry::{alpha_grid, best_radial, delta0, f_alpha, sector_energy, SYMMETRY_HEADER};
use condgamma::{
    decompose, gpe_two, interface_min_v, minimize_two, solve_eta, tf, EnergyBreakdown, Field,
    GridSpec, InitKind, Params,
};

use crate::config::{Config, ConfigError, Section};
use crate::report::{csv_line, Record, Sink, Value};

/// A run that did not produce a result.
#[derive(Debug, Clone)]
pub struct Failure {
    pub run: String,
    pub error: String,
}

pub type Fatal = Box<dyn std::error::Error>;

pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub seed: Option<u64>,
    pub sink: Sink,
}

#[derive(Debug, Clone, Copy)]
enum Coupling {
    G(f64),
    Scaled(f64),
}

/// Parameters shared by every solver-backed command.
#[derive(Debug, Clone, Copy)]
struct Base {
    eps: f64,
    coupling: Coupling,
    alpha1: f64,
    half_width: Option<f64>,
    n: usize,
    tol: f64,
    max_iters: usize,
    seed: u64,
}

impl Base {
    fn read(s: &Section, seed: Option<u64>) -> Result<Self, ConfigError> {
        let coupling = match (s.get::<f64>("g")?, s.get::<f64>("g_eps2")?) {
            (Some(_), Some(_)) => return Err(ConfigError("give either g or g_eps2, not both".into())),
            (Some(g), None) => Coupling::G(g),
            (None, k) => Coupling::Scaled(k.unwrap_or(40.0)),
        };
        Ok(Self {
            eps: s.get_or("eps", 0.05)?,
            coupling,
            alpha1: s.get_or("alpha1", 0.5)?,
            half_width: s.get("half_width")?,
            n: s.get_or("n", 256)?,
            tol: s.get_or("tol", condgamma::params::DEFAULT_TOL)?,
            max_iters: s.get_or("max_iters", condgamma::params::DEFAULT_MAX_ITERS)?,
            seed: match seed {
                Some(v) => v,
                None => s.get_or("seed", 0)?,
            },
        })
    }

    fn grid(&self) -> condgamma::Result<GridSpec> {
        match self.half_width {
            Some(l) => GridSpec::new(l, self.n),
            None => GridSpec::with_default_box(self.n),
        }
    }

    fn params_on(&self, eps: f64, grid: GridSpec) -> condgamma::Result<Params> {
        let p = match self.coupling {
            Coupling::G(g) => Params::new(eps, g, self.alpha1, grid)?,
            Coupling::Scaled(k) => Params::with_coupling(eps, k, self.alpha1, grid)?,
        };
        Ok(p.tol(self.tol).max_iters(self.max_iters).seed(self.seed))
    }

    fn params(&self, eps: f64) -> condgamma::Result<Params> {
        self.params_on(eps, self.grid()?)
    }
}

fn put_params(r: &mut Record, p: &Params) {
    r.put("eps", p.eps)
        .put("g", p.g)
        .put("g_eps2", p.coupling())
        .put("alpha1", p.alpha1)
        .put("n", p.grid.n)
        .put("half_width", p.grid.half_width)
        .put("tol", p.tol)
        .put("seed", p.seed);
}

fn put_breakdown(r: &mut Record, b: &EnergyBreakdown) {
    r.put("total", b.total)
        .put("base", b.base)
        .put("f_eps", b.f_eps)
        .put("g_eps", b.g_eps)
        .put("scaled_excess", b.scaled_excess)
        .put("split_residual", b.split_residual);
}

fn fail(run: impl Into<String>, e: impl ToString) -> Failure {
    Failure {
        run: run.into(),
        error: e.to_string(),
    }
}

pub fn tf(ctx: &mut Ctx) -> Result<Vec<Failure>, Fatal> {
    let s = ctx.cfg.section("tf");
    let n: usize = s.get_or("n", 512)?;
    s.finish()?;
    let grid = GridSpec::with_default_box(n)?;
    let rho = Field::from_fn(grid, tf::rho);
    let lam = tf::tf_lambda();
    let mut r = Record::new();
    r.put("lambda", lam)
        .put("rho0", tf::rho(0.0, 0.0))
        .put("n", n)
        .put("int_rho", integrate(&rho))
        .put("int_rho2", integrate(&rho.map(|x| x * x)))
        .put("int_rho2_exact", 2.0 * lam * lam / 3.0)
        .put("diameter_weighted_length", InterfaceSpec::Diameter(0.0).weighted_length());
    print!("{}", r.render());
    ctx.sink.record("tf.json", &r)?;
    Ok(Vec::new())
}

pub fn eta(ctx: &mut Ctx) -> Result<Vec<Failure>, Fatal> {
    let s = ctx.cfg.section("eta");
    let base = Base::read(&s, ctx.seed)?;
    let eps_list = s.list::<f64>("eps_list")?.unwrap_or(vec![base.eps]);
    let dump = s.bool_or("dump", true)?;
    let mono_tol: f64 = s.get_or("monotonicity_tol", 1e-6)?;
    s.finish()?;

    let runs: Vec<_> = eps_list
        .par_iter()
        .map(|&eps| {
            let p = base.params(eps)?;
            let gs = solve_eta(&p)?;
            let rep = check_eta_properties_with_tol(&gs, mono_tol);
            Ok::<_, condgamma::Error>((p, gs, rep))
        })
        .collect();

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (eps, run) in eps_list.iter().zip(runs) {
        let (p, gs, rep) = match run {
            Ok(x) => x,
            Err(e) => {
                failures.push(fail(format!("eta[eps={eps}]"), e));
                continue;
            }
        };
        let mut r = Record::new();
        put_params(&mut r, &p);
        r.put("mass", rep.mass)
            .put("energy", gs.energy)
            .put("lambda_eps", gs.lambda_eps)
            .put("lambda_quotient", gs.lambda_quotient)
            .put("dist_to_lambda", rep.dist_to_lambda)
            .put("dist_to_lambda_sq", rep.dist_to_lambda_sq)
            .put("residual", gs.residual)
            .put("iters", gs.iters)
            .put("monotonicity_violations", rep.monotonicity_violations)
            .put("monotonicity_tol", rep.monotonicity_tol)
            .put("max_dev_sqrt_rho", rep.max_dev_sqrt_rho)
            .put("max_dev_density_core", rep.max_dev_density_core)
            .put("max_outside", rep.max_outside);
        ctx.sink.record(&format!("eta_eps{eps}.json"), &r)?;
        if dump {
            ctx.sink.field(&format!("eta_eps{eps}.grid"), &gs.eta)?;
        }
        rows.push(csv_line(&[
            (*eps).into(),
            p.grid.n.into(),
            rep.mass.into(),
            gs.energy.into(),
            gs.lambda_eps.into(),
            gs.residual.into(),
            gs.iters.into(),
            rep.monotonicity_violations.into(),
            rep.max_dev_density_core.into(),
            rep.max_outside.into(),
        ]));
    }
    ctx.sink.csv(
        "eta.csv",
        "eps,n,mass,energy,lambda_eps,residual,iters,monotonicity_violations,max_dev_density_core,max_outside",
        &rows,
    )?;
    Ok(failures)
}

fn parse_init(token: &str, s: &Section, base: &Base) -> Result<(String, InitKind), Fatal> {
    Ok(match token {
        "half_disk" => ("half_disk".into(), InitKind::HalfDisk),
        "disk_annulus" => {
            let r = match s.get::<f64>("radius")? {
                Some(r) => r,
                None => tf::mass_radius(base.alpha1)?,
            };
            ("disk_annulus".into(), InitKind::DiskAnnulus(r))
        }
        "random" => (format!("random{}", base.seed), InitKind::Random(base.seed)),
        "files" => {
            let a: Option<PathBuf> = s.get("u1")?;
            let b: Option<PathBuf> = s.get("u2")?;
            match (a, b) {
                (Some(a), Some(b)) => ("files".into(), InitKind::FromFiles(a, b)),
                _ => return Err(ConfigError("init = files needs u1 and u2".into()).into()),
            }
        }
        other => {
            return Err(ConfigError(format!(
                "unknown init {other:?} (half_disk, disk_annulus, random, files)"
            ))
            .into())
        }
    })
}

pub fn minimize(ctx: &mut Ctx) -> Result<Vec<Failure>, Fatal> {
    let s = ctx.cfg.section("minimize");
    let base = Base::read(&s, ctx.seed)?;
    let tokens = s
        .list::<String>("init")?
        .unwrap_or_else(|| vec!["half_disk".into(), "disk_annulus".into()]);
    let inits = tokens
        .iter()
        .map(|t| parse_init(t, &s, &base))
        .collect::<Result<Vec<_>, _>>()?;
    let dump = s.bool_or("dump", true)?;
    s.finish()?;

    let p = base.params(base.eps)?;
    let gs = match solve_eta(&p) {
        Ok(g) => g,
        Err(e) => return Ok(vec![fail("eta", e)]),
    };
    let runs: Vec<_> = inits
        .par_iter()
        .map(|(_, init)| {
            let pair = minimize_two(&p, init)?;
            let b = decompose(&pair.u1, &pair.u2, &gs, &p)?;
            Ok::<_, condgamma::Error>((pair, b))
        })
        .collect();

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut best: Option<(f64, &str)> = None;
    for ((slug, init), run) in inits.iter().zip(runs) {
        let (pair, b) = match run {
            Ok(x) => x,
            Err(e) => {
                failures.push(fail(format!("minimize[{slug}]"), e));
                continue;
            }
        };
        let mut r = Record::new();
        put_params(&mut r, &p);
        r.put("init", init.label())
            .put("energy", pair.energy)
            .put("overlap", pair.overlap())
            .put("mass1", pair.masses.0)
            .put("mass2", pair.masses.1)
            .put("iters", pair.iters)
            .put("residual", pair.residual);
        put_breakdown(&mut r, &b);
        ctx.sink.record(&format!("minimize_{slug}.json"), &r)?;
        if dump {
            ctx.sink.field(&format!("u1_{slug}.grid"), &pair.u1)?;
            ctx.sink.field(&format!("u2_{slug}.grid"), &pair.u2)?;
        }
        if best.is_none_or(|(e, _)| pair.energy < e) {
            best = Some((pair.energy, slug));
        }
        rows.push(csv_line(&[
            Value::Text(slug.clone()),
            pair.energy.into(),
            pair.overlap().into(),
            pair.masses.0.into(),
            pair.masses.1.into(),
            pair.iters.into(),
            pair.residual.into(),
            b.scaled_excess.into(),
            b.split_residual.into(),
        ]));
    }
    ctx.sink.csv(
        "minimize.csv",
        "init,energy,overlap,mass1,mass2,iters,residual,scaled_excess,split_residual",
        &rows,
    )?;
    if let Some((e, slug)) = best {
        let mut r = Record::new();
        r.put("lowest_init", slug).put("lowest_energy", e).put("converged_runs", rows.len());
        ctx.sink.record("minimize.json", &r)?;
    }
    Ok(failures)
}

pub fn decompose_cmd(ctx: &mut Ctx) -> Result<Vec<Failure>, Fatal> {
    let s = ctx.cfg.section("decompose");
    let base = Base::read(&s, ctx.seed)?;
    let a: PathBuf = s.get("u1")?.ok_or_else(|| ConfigError("[decompose] needs u1".into()))?;
    let b: PathBuf = s.get("u2")?.ok_or_else(|| ConfigError("[decompose] needs u2".into()))?;
    s.finish()?;
    let u1 = Field::read_dump(File::open(&a)?)?;
    let u2 = Field::read_dump(File::open(&b)?)?;
    if u1.grid() != u2.grid() {
        return Err(ConfigError(format!("{} and {} are on different grids", a.display(), b.display())).into());
    }
    // The dumps fix the grid.
    let p = base.params_on(base.eps, *u1.grid())?;
    let run = solve_eta(&p).and_then(|gs| decompose(&u1, &u2, &gs, &p));
    let br = match run {
        Ok(b) => b,
        Err(e) => return Ok(vec![fail("decompose", e)]),
    };
    let mut r = Record::new();
    put_params(&mut r, &p);
    r.put("u1", a.display().to_string())
        .put("u2", b.display().to_string())
        .put("mass1", integrate(&u1.map(|x| x * x)))
        .put("mass2", integrate(&u2.map(|x| x * x)))
        .put("overlap", gpe_two::overlap(&u1, &u2));
    put_breakdown(&mut r, &br);
    ctx.sink.record("decompose.json", &r)?;
    Ok(Vec::new())
}

pub fn gamma(ctx: &mut Ctx) -> Result<Vec<Failure>, Fatal> {
    let s = ctx.cfg.section("gamma");
    let base = Base::read(&s, ctx.seed)?;
    let eps_list = s.list::<f64>("eps_list")?.unwrap_or(vec![0.1, 0.05, 0.025]);
    let mode = match s.get_or::<String>("mode", "minimizer".into())?.as_str() {
        "minimizer" => TrendMode::Minimizer,
        "recovery" => TrendMode::Recovery,
        m => return Err(ConfigError(format!("unknown mode {m:?} (minimizer, recovery)")).into()),
    };
    let token: String = s.get_or("init", "half_disk".into())?;
    let (slug, init) = parse_init(&token, &s, &base)?;
    let defaults = TrendOptions::default();
    let opts = TrendOptions {
        mode,
        points_per_eps: s.get_or("points_per_eps", defaults.points_per_eps)?,
        n_max: s.get_or("n_max", defaults.n_max)?,
    };
    s.finish()?;

    let p0 = base.params(eps_list.first().copied().unwrap_or(base.eps))?;
    let rows = match gamma_trend(&init, &eps_list, &p0, &opts) {
        Ok(r) => r,
        Err(e) => return Ok(vec![fail(format!("gamma[{slug}]"), e)]),
    };
    let lines: Vec<String> = rows.iter().map(|r| r.csv()).collect();
    ctx.sink.csv("gamma.csv", TREND_HEADER, &lines)?;
    let mut r = Record::new();
    r.put("init", slug)
        .put("mode", if mode == TrendMode::Minimizer { "minimizer" } else { "recovery" })
        .put("sigma_eff", sigma_eff())
        .put("g_eps2", p0.coupling())
        .put("alpha1", p0.alpha1);
    for (i, row) in rows.iter().enumerate() {
        r.put(&format!("n_{i}"), row.n).put(&format!("split_residual_{i}"), row.split_residual);
    }
    let (first, last) = (rows[0].ratio, rows[rows.len() - 1].ratio);
    r.put("ratio_first", first)
        .put("ratio_last", last)
        .put("approaches_one", (last - 1.0).abs() < (first - 1.0).abs());
    ctx.sink.record("gamma.json", &r)?;
    Ok(Vec::new())
}

fn parse_interface(s: &Section, alpha1: f64) -> Result<(String, InterfaceSpec), Fatal> {
    let kind: String = s.get_or("interface", "diameter".into())?;
    let spec = match kind.as_str() {
        "diameter" => InterfaceSpec::Diameter(s.get_or("angle", FRAC_PI_2)?),
        "sector" => InterfaceSpec::DiskSector(s.get_or("sector_alpha2", 1.0 - alpha1)?),
        "circle" => match s.get::<f64>("radius")? {
            Some(r) => InterfaceSpec::Circle(r),
            None => InterfaceSpec::circle_for_mass(alpha1)?,
        },
        "annuli" => InterfaceSpec::Annuli(
            s.list::<f64>("radii")?
                .ok_or_else(|| ConfigError("interface = annuli needs radii".into()))?,
        ),
        k => return Err(ConfigError(format!("unknown interface {k:?} (diameter, sector, circle, annuli)")).into()),
    };
    spec.validate()?;
    Ok((kind, spec))
}

pub fn recovery(ctx: &mut Ctx) -> Result<Vec<Failure>, Fatal> {
    let s = ctx.cfg.section("recovery");
    let base = Base::read(&s, ctx.seed)?;
    let (kind, spec) = parse_interface(&s, base.alpha1)?;
    let ks = s.list::<f64>("g_eps2_list")?.unwrap_or(vec![10.0, 40.0, 160.0]);
    let t_big: f64 = s.get_or("t_big", default_t(base.eps))?;
    let dump = s.bool_or("dump", false)?;
    s.finish()?;

    let grid = base.grid()?;
    let gs = match base.params(base.eps).and_then(|p| solve_eta(&p)) {
        Ok(g) => g,
        Err(e) => return Ok(vec![fail("eta", e)]),
    };
    let eps = base.eps;
    let runs: Vec<_> = ks
        .par_iter()
        .map(|&k| {
            let p = Params::with_coupling(eps, k, base.alpha1, grid)?.tol(base.tol);
            let rec = build_recovery(&spec, &p, t_big, &gs)?;
            let b = decompose(&rec.u1, &rec.u2, &gs, &p)?;
            let curves = extract_interface(&rec.spin.phi, FRAC_PI_2)?;
            let min_v = interface_min_v(&rec.spin, &curves[0], 2.0 * grid.h())?;
            Ok::<_, condgamma::Error>((rec, b, min_v))
        })
        .collect();

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut fit = Vec::new();
    for (&k, run) in ks.iter().zip(runs) {
        let (rec, b, min_v) = match run {
            Ok(x) => x,
            Err(e) => {
                failures.push(fail(format!("recovery[g_eps2={k}]"), e));
                continue;
            }
        };
        fit.push((k.ln(), (eps * b.g_eps).ln()));
        rows.push(csv_line(&[
            k.into(),
            rec.m_eps.into(),
            rec.t_eps.into(),
            rec.scale.into(),
            (eps * b.f_eps).into(),
            (eps * b.g_eps).into(),
            b.scaled_excess.into(),
            min_v.into(),
            b.split_residual.into(),
        ]));
        if dump {
            ctx.sink.field(&format!("recovery_v_k{k}.grid"), &rec.spin.v)?;
            ctx.sink.field(&format!("recovery_phi_k{k}.grid"), &rec.spin.phi)?;
        }
    }
    ctx.sink.csv(
        "recovery.csv",
        "g_eps2,m_eps,t_eps,scale,eps_f,eps_g,scaled_excess,min_v,split_residual",
        &rows,
    )?;
    let mut r = Record::new();
    r.put("eps", eps)
        .put("n", grid.n)
        .put("interface", kind)
        .put("t_big", t_big)
        .put("weighted_length", spec.weighted_length())
        .put("limit_energy", limit_energy(&spec, sigma_eff())?)
        .put("sigma_eff", sigma_eff())
        .put("slope_eps_g", slope(&fit));
    ctx.sink.record("recovery.json", &r)?;
    Ok(failures)
}

/// Least-squares slope; NaN with fewer than two points.
fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn symmetry(ctx: &mut Ctx) -> Result<Vec<Failure>, Fatal> {
    let s = ctx.cfg.section("symmetry");
    let alphas = match s.list::<f64>("alphas")? {
        Some(a) => a,
        None => alpha_grid(
            s.get_or("alpha_lo", 0.16)?,
            s.get_or("alpha_hi", 0.84)?,
            s.get_or("count", 69)?,
        ),
    };
    let n_max: usize = s.get_or("n_max", 3)?;
    let steps: usize = s.get_or("steps", 200)?;
    s.finish()?;

    let runs: Vec<_> = alphas.par_iter().map(|&a| best_radial(a, n_max, steps)).collect();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut radial = 0usize;
    for (a, run) in alphas.iter().zip(runs) {
        match run {
            Ok(v) => {
                radial += usize::from(v.radial_beats_sector);
                rows.push(v.csv());
            }
            Err(e) => failures.push(fail(format!("symmetry[alpha1={a}]"), e)),
        }
    }
    ctx.sink.csv("symmetry.csv", SYMMETRY_HEADER, &rows)?;
    let d = delta0();
    let mut r = Record::new();
    r.put("delta0", d)
        .put("f_delta0", f_alpha(d))
        .put("f_one_minus_delta0", f_alpha(1.0 - d))
        .put("sector_energy", sector_energy())
        .put("n_max", n_max)
        .put("steps", steps)
        .put("points", rows.len())
        .put("radial", radial)
        .put("non_radial", rows.len() - radial);
    ctx.sink.record("symmetry.json", &r)?;
    Ok(failures)
}
