use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localfield")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn write_table(dir: &Path, re: f64) -> String {
    let path = dir.join("table.txt");
    let mut text = String::from("# omega eps_re eps_im\n");
    for i in 0..40 {
        text.push_str(&format!("{} {re} 0\n", 0.1 * 1.2f64.powi(i)));
    }
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn eval_lorentz_positive_transverse_rate() {
    let o = run(&["eval", "--gamma", "0.1", "--r", "20", "--omega", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(num(&column(&text, "gamma_perp")[0]) > 0.0);
}

#[test]
fn eval_vacuum_total_is_one() {
    let o = run(&["eval", "--coupling", "0", "--r", "20", "--omega", "0.7"]);
    let text = stdout(&o);
    assert_eq!(num(&column(&text, "gamma_total")[0]), 1.0);
}

#[test]
fn eval_json() {
    let o = run(&["eval", "--r", "20", "--omega", "0.7", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let total = v["gamma_total"].as_f64().unwrap();
    let sum = v["gamma_perp"].as_f64().unwrap() + v["gamma_par"].as_f64().unwrap();
    assert!((total - sum).abs() <= 1e-12 * total.abs());
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(run(&["eval", "--omega", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--r", "1", "--rbar", "1", "--omega", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--r", "abc", "--omega", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["figures", "--preset", "fig9"]).status.code(), Some(1));
    assert_eq!(run(&["rmin", "--gamma="]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_three() {
    // exact pole of the undamped oscillator
    let o = run(&["eval", "--gamma", "0", "--r", "10", "--omega", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_rows_ordered_and_summed() {
    let o = run(&["sweep", "--gamma", "0.01", "--r", "10", "--omega-steps", "101"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let omegas: Vec<f64> = column(&text, "omega_a").iter().map(|s| num(s)).collect();
    assert_eq!(omegas.len(), 101);
    assert!(omegas.windows(2).all(|w| w[0] < w[1]));
    let perp = column(&text, "gamma_perp");
    let par = column(&text, "gamma_par");
    for (i, total) in column(&text, "gamma_total").iter().enumerate() {
        let sum = num(&perp[i]) + num(&par[i]);
        assert!((num(total) - sum).abs() <= 1e-12 * sum.abs().max(1.0));
    }
}

#[test]
fn rmin_rows() {
    let o = run(&["rmin", "--gamma", "0.01,0.01,0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,r_min,omega_critical,status");
    assert_eq!(lines[1], lines[2]);
    let r = num(&column(&text, "r_min")[0]);
    assert!(r > 10.0 && r < 20.0);
    assert!(lines[3].ends_with("no_sign_change"));
}

#[test]
fn check_reports() {
    let text = stdout(&run(&["check"]));
    assert!(text.contains("classification,strict"));
    let rho = text.lines().find_map(|l| l.strip_prefix("rho,")).unwrap();
    assert!((num(rho) - 0.2116 / 9.0).abs() < 1e-12);

    let o = run(&["check", "--coupling", "3", "--strict"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("classification,violated"));
    assert_eq!(run(&["check", "--coupling", "3"]).status.code(), Some(0));
}

#[test]
fn check_table_kk_offset() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_table(dir.path(), 2.0);
    let o = run(&["check", "--table-file", &path]);
    assert_eq!(o.status.code(), Some(0));
    let kk = stdout(&o).lines().find_map(|l| l.strip_prefix("kk_max_residual,").map(num)).unwrap();
    assert_eq!(kk, 1.0);
}

#[test]
fn table_medium_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_table(dir.path(), 1.0);
    let o = run(&["sweep", "--table-file", &path, "--rbar", "0.5", "--omega-steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(column(&stdout(&o), "gamma_perp").iter().all(|v| (num(v) - 1.0).abs() <= 1e-14));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "gamma = 0.05\nr = 20\nomega = 0.9\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&run(&["eval", "--config", cfg]));
    let direct = stdout(&run(&["eval", "--gamma", "0.05", "--r", "20", "--omega", "0.9"]));
    assert_eq!(from_file, direct);
    let overridden = stdout(&run(&["eval", "--config", cfg, "--omega", "0.8"]));
    assert_eq!(num(&column(&overridden, "omega_a")[0]), 0.8);

    std::fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let bad = dir.path().join("bad.conf");
    assert_eq!(run(&["eval", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let o = run(&["eval", "--r", "20", "--omega", "0.5", "--output", out.to_str().unwrap()]);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().starts_with("omega_a,"));
}

#[test]
fn figure_presets() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().to_str().unwrap();
    assert_eq!(run(&["figures", "--preset", "fig1", "--outdir", outdir]).status.code(), Some(0));
    assert_eq!(run(&["figures", "--preset", "fig3", "--outdir", outdir]).status.code(), Some(0));

    let fig1 = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let series = column(&fig1, "series");
    let perp = column(&fig1, "gamma_perp");
    for name in ["r10", "r20", "r30", "classical"] {
        assert_eq!(series.iter().filter(|s| *s == name).count(), 600);
    }
    assert!(series.iter().zip(&perp).any(|(s, p)| s == "r10" && num(p) < 0.0));
    let classical: Vec<&String> = series.iter().zip(&perp).filter(|(s, _)| *s == "classical").map(|(_, p)| p).collect();
    let cl = column(&fig1, "gamma_cl_perp");
    for (i, s) in series.iter().enumerate().filter(|(_, s)| s.starts_with('r')) {
        let k = i % 600;
        assert_eq!(&cl[i], classical[k], "{s} row {i}");
    }

    let fig3 = std::fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    assert!(column(&fig3, "gamma_perp").iter().all(|p| num(p) >= 0.0));
}
