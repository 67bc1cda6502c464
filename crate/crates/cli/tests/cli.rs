use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn condgamma(args: &[&str], dir: &Path, env: Option<(&str, &str)>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_condgamma"));
    cmd.args(args).arg("--out").arg(dir).env_remove("CONDGAMMA_THREADS");
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.ini");
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn value(json: &str, key: &str) -> f64 {
    let line = json
        .lines()
        .find(|l| l.trim_start().starts_with(&format!("\"{key}\":")))
        .unwrap_or_else(|| panic!("{key} missing in {json}"));
    line.split(':').nth(1).unwrap().trim().trim_end_matches(',').parse().unwrap()
}

#[test]
fn tf_reports_normalisation() {
    let t = tempfile::tempdir().unwrap();
    let out = condgamma(&["tf"], t.path(), None);
    assert!(out.status.success());
    let json = fs::read_to_string(t.path().join("tf.json")).unwrap();
    assert!((value(&json, "lambda") - 0.893243841738).abs() < 1e-10);
    assert!((value(&json, "int_rho") - 1.0).abs() < 1e-4);
    assert!((value(&json, "int_rho2") - value(&json, "int_rho2_exact")).abs() < 1e-4);
}

#[test]
fn symmetry_sweep_is_deterministic() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), "[symmetry]\ncount = 9\nsteps = 40\n");
    let a = t.path().join("a");
    let b = t.path().join("b");
    assert!(condgamma(&["symmetry", "--config", &cfg, "--threads", "1"], &a, None).status.success());
    assert!(condgamma(&["symmetry", "--config", &cfg], &b, Some(("CONDGAMMA_THREADS", "3"))).status.success());
    let csv = fs::read(a.join("symmetry.csv")).unwrap();
    assert_eq!(csv, fs::read(b.join("symmetry.csv")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",non-radial")));
    let json = fs::read_to_string(a.join("symmetry.json")).unwrap();
    assert!((value(&json, "delta0") - 0.1486).abs() < 1e-3);
}

#[test]
fn extreme_fraction_is_radial() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), "[symmetry]\nalphas = 0.02\nsteps = 50\n");
    assert!(condgamma(&["symmetry", "--config", &cfg], t.path(), None).status.success());
    let csv = fs::read_to_string(t.path().join("symmetry.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",radial"), "{csv}");
}

#[test]
fn minimize_then_decompose() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), "eps = 0.15\nn = 48\n[minimize]\ninit = half_disk, disk_annulus\n");
    let a = t.path().join("a");
    let b = t.path().join("b");
    let out = condgamma(&["minimize", "--config", &cfg, "--threads", "2"], &a, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(condgamma(&["minimize", "--config", &cfg, "--threads", "1"], &b, None).status.success());
    let csv = fs::read(a.join("minimize.csv")).unwrap();
    assert_eq!(csv, fs::read(b.join("minimize.csv")).unwrap());
    let half = fs::read_to_string(a.join("minimize_half_disk.json")).unwrap();
    let disk = fs::read_to_string(a.join("minimize_disk_annulus.json")).unwrap();
    assert!((value(&half, "mass1") - 0.5).abs() < 1e-12);
    assert!(value(&half, "energy") < value(&disk, "energy"));

    let u1 = a.join("u1_half_disk.grid");
    let u2 = a.join("u2_half_disk.grid");
    let cfg2 = write_config(
        t.path(),
        &format!("eps = 0.15\n[decompose]\nu1 = {}\nu2 = {}\n", u1.display(), u2.display()),
    );
    let c = t.path().join("c");
    let out = condgamma(&["decompose", "--config", &cfg2], &c, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dec = fs::read_to_string(c.join("decompose.json")).unwrap();
    assert!((value(&dec, "total") - value(&half, "total")).abs() <= 1e-9 * value(&half, "total"));
    assert!(value(&dec, "split_residual").abs() <= 1e-4 * value(&dec, "total"));
}

#[test]
fn nonconvergence_gives_error_table() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), "[eta]\neps_list = 0.2, 0.15\nn = 32\nmax_iters = 2\n");
    let out = condgamma(&["eta", "--config", &cfg], t.path(), None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("eta[eps=0.2]") && err.contains("eta[eps=0.15]"), "{err}");
    assert!(err.contains("did not converge"));
}

#[test]
fn bad_config_is_a_usage_error() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), "[eta]\nepsilon = 0.1\n");
    assert_eq!(condgamma(&["eta", "--config", &cfg], t.path(), None).status.code(), Some(2));
    let cfg = write_config(t.path(), "[minimize]\ninit = spiral\n");
    assert_eq!(condgamma(&["minimize", "--config", &cfg], t.path(), None).status.code(), Some(2));
    assert_eq!(condgamma(&["nonsense"], t.path(), None).status.code(), Some(2));
}

#[test]
fn gamma_and_recovery_tables() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(
        t.path(),
        "[gamma]\neps_list = 0.2, 0.15, 0.12\nn_max = 64\n[recovery]\neps = 0.1\nn = 96\n",
    );
    let out = condgamma(&["gamma", "--config", &cfg], t.path(), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(t.path().join("gamma.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "eps,g,excess,prediction,ratio,interface_length,min_v");
    assert_eq!(csv.lines().count(), 4);

    let out = condgamma(&["recovery", "--config", &cfg], t.path(), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = fs::read_to_string(t.path().join("recovery.json")).unwrap();
    let s = value(&json, "slope_eps_g");
    assert!(s < 0.0 && s > -0.5, "slope {s}");
    assert_eq!(fs::read_to_string(t.path().join("recovery.csv")).unwrap().lines().count(), 4);
}
