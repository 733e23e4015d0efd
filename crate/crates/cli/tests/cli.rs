use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gchirp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gchirp")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = gchirp(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(args: &[&str]) -> i32 {
    gchirp(args).status.code().expect("exit code")
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn report(path: &Path) -> HashMap<String, String> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn metric(r: &HashMap<String, String>, key: &str) -> f64 {
    r[key].parse().unwrap_or_else(|_| panic!("{key} = {}", r[key]))
}

fn write_series(path: &Path, header: &str, rows: impl Iterator<Item = (f64, f64)>) {
    let mut text = format!("{header}\n");
    for (t, v) in rows {
        text.push_str(&format!("{t},{v}\n"));
    }
    fs::write(path, text).unwrap();
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn generate_is_deterministic_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.csv"), p(&dir, "b.csv"));
    for out in [&a, &b] {
        ok(&["generate", "--generator", "lolo-sin", "--noise-sigma", "0.05", "--seed", "7", "-o", s(out)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = p(&dir, "c.csv");
    ok(&["generate", "--generator", "lolo-sin", "--noise-sigma", "0.05", "--seed", "8", "-o", s(&c)]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn decompose_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let sig = p(&dir, "sig.csv");
    ok(&["generate", "--generator", "lolo-cubic", "-o", s(&sig)]);
    let (d1, d2) = (p(&dir, "d1"), p(&dir, "d2"));
    for d in [&d1, &d2] {
        ok(&["decompose", "-i", s(&sig), "--max-levels", "2", "--out-dir", s(d)]);
    }
    for f in ["model.json", "model_level_1.json", "ledger.json", "report.csv", "signal.csv", "amplitude.csv"] {
        assert_eq!(fs::read(d1.join(f)).unwrap(), fs::read(d2.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn generator_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "x.csv");
    assert_eq!(code(&["generate", "--generator", "sawtooth", "-o", s(&out)]), 2);
    assert_eq!(code(&["generate", "--generator", "academic", "--noise-sigma", "0.1", "-o", s(&out)]), 2);
    assert_eq!(code(&["generate", "--generator", "academic", "--noise-sigma", "-1", "--seed", "1", "-o", s(&out)]), 2);
}

#[test]
fn zero_signal_exits_2() {
    let dir = TempDir::new().unwrap();
    let sig = p(&dir, "zero.csv");
    write_series(&sig, "t,f", (0..256).map(|n| (n as f64 * 0.1, 0.0)));
    assert_eq!(code(&["decompose", "-i", s(&sig), "--out-dir", s(&p(&dir, "d"))]), 2);
}

#[test]
fn unreadable_input_exits_2_and_unwritable_output_exits_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&["analyze", "-i", s(&p(&dir, "missing.csv")), "-o", s(&p(&dir, "s.csv"))]), 2);
    let bad = p(&dir, "bad.csv");
    fs::write(&bad, "t,f\n0,1\n0.1,oops\n").unwrap();
    assert_eq!(code(&["analyze", "-i", s(&bad), "-o", s(&p(&dir, "s.csv"))]), 2);
    let uneven = p(&dir, "uneven.csv");
    fs::write(&uneven, "t,f\n0,1\n0.1,2\n0.5,3\n").unwrap();
    assert_eq!(code(&["analyze", "-i", s(&uneven), "-o", s(&p(&dir, "s.csv"))]), 2);

    let sig = p(&dir, "sig.csv");
    ok(&["generate", "--generator", "academic", "-o", s(&sig)]);
    let nowhere = dir.path().join("no/such/dir/s.csv");
    assert_eq!(code(&["analyze", "-i", s(&sig), "-o", s(&nowhere)]), 1);
}

#[test]
fn academic_l2_single_level_captures_390_9413() {
    let dir = TempDir::new().unwrap();
    let sig = p(&dir, "academic.csv");
    ok(&["generate", "--generator", "academic", "-o", s(&sig)]);
    let d = p(&dir, "d");
    ok(&[
        "decompose",
        "-i",
        s(&sig),
        "--method",
        "l2",
        "--max-levels",
        "1",
        "--omega-max",
        "2",
        "--n-freq",
        "2048",
        "--out-dir",
        s(&d),
    ]);
    let r = report(&d.join("report.csv"));
    assert_eq!(r["levels"], "1");
    assert_eq!(r["level_0_converged"], "true");
    assert!((metric(&r, "level_0_q_max") - 390.9413).abs() < 1e-3, "{}", r["level_0_q_max"]);
    assert!(metric(&r, "roundtrip_error") < 0.1);

    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("model.json")).unwrap()).unwrap();
    let atom = &model["atoms"][0];
    assert!((atom["omega"].as_f64().unwrap() - 0.897358).abs() < 1e-4);
    assert!(atom["kappa"].as_f64().unwrap().abs() < 1e-9);
    assert!(d.join("history_level_0.csv").exists());
}

#[test]
fn academic_extrema_at_plus_minus_one() {
    let dir = TempDir::new().unwrap();
    let sig = p(&dir, "academic.csv");
    ok(&["generate", "--generator", "academic", "-o", s(&sig)]);
    let ext = p(&dir, "ext.csv");
    ok(&["extrema", "-i", s(&sig), "--omega-max", "2", "--n-freq", "2048", "-o", s(&ext)]);
    let loc = column(&ext, "location");
    let val = column(&ext, "value");
    let i = loc.iter().position(|&w| (w - 1.0).abs() < 1e-3).expect("maximum at 1");
    assert!((val[i] - 13.5).abs() < 1e-3, "A(1) = {}", val[i]);
}

#[test]
fn lolo_cubic_is_recovered_by_two_gaussians() {
    let dir = TempDir::new().unwrap();
    let sig = p(&dir, "lolo.csv");
    ok(&["generate", "--generator", "lolo-cubic", "-o", s(&sig)]);
    assert_eq!(column(&sig, "t").len(), 512);
    let d = p(&dir, "d");
    ok(&["decompose", "-i", s(&sig), "--max-levels", "1", "--prominence", "0.15", "--out-dir", s(&d)]);
    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("model.json")).unwrap()).unwrap();
    assert!(model["center"].is_null());
    let atoms = model["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1, "one ± pair");
    let omega = atoms[0]["omega"].as_f64().unwrap();
    assert!((omega - 0.99).abs() < 0.05, "ω = {omega}");
    let r = report(&d.join("report.csv"));
    assert!(metric(&r, "amplitude_rel_error") < 0.1);

    let log_err = column(&d.join("signal.csv"), "log10_abs_error");
    assert_eq!(log_err.len(), 512);
    assert!(log_err.iter().all(|e| e.is_finite() || *e == f64::NEG_INFINITY));
}

#[test]
fn synthesize_matches_decompose_reconstruction() {
    let dir = TempDir::new().unwrap();
    let sig = p(&dir, "lolo.csv");
    ok(&["generate", "--generator", "lolo-sin", "-o", s(&sig)]);
    let d = p(&dir, "d");
    ok(&["decompose", "-i", s(&sig), "--max-levels", "2", "--out-dir", s(&d)]);
    let out = p(&dir, "syn.csv");
    ok(&[
        "synthesize",
        "--model",
        s(&d.join("model.json")),
        "--model",
        s(&d.join("model_level_1.json")),
        "--like",
        s(&sig),
        "-o",
        s(&out),
    ]);
    let syn = column(&out, "f");
    let rec = column(&d.join("signal.csv"), "model");
    for (a, b) in syn.iter().zip(&rec) {
        assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
    let grid = p(&dir, "grid.csv");
    ok(&[
        "synthesize",
        "--model",
        s(&d.join("model.json")),
        "--t-start",
        "-1",
        "--dt",
        "0.5",
        "--len",
        "5",
        "-o",
        s(&grid),
    ]);
    assert_eq!(column(&grid, "t"), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    assert_eq!(code(&["synthesize", "--model", s(&d.join("model.json")), "-o", s(&grid)]), 2);
}

#[test]
fn roundtrip_of_a_perfect_model_is_at_quadrature_floor() {
    let dir = TempDir::new().unwrap();
    let model = p(&dir, "model.json");
    fs::write(
        &model,
        r#"{"center":{"alpha0":0.3,"sigma0":0.2,"t0":0.5},
            "atoms":[{"alpha":1.0,"omega":1.0,"sigma":0.1,"gamma":0.3,"t":-2.0,"kappa":0.5}]}"#,
    )
    .unwrap();
    let sig = p(&dir, "sig.csv");
    ok(&["synthesize", "--model", s(&model), "--t-start", "-60", "--dt", "0.1", "--len", "1201", "-o", s(&sig)]);
    let rep = p(&dir, "rt.csv");
    let series = p(&dir, "series.csv");
    ok(&["roundtrip", "--model", s(&model), "-i", s(&sig), "-o", s(&rep), "--series", s(&series)]);
    let r = report(&rep);
    assert!(metric(&r, "time_rel_error") <= 1e-6);
    assert!(metric(&r, "freq_rel_error") <= 1e-6);
    assert!(metric(&r, "model_freq_rel_error") <= 1e-6, "{}", r["model_freq_rel_error"]);
    assert_eq!(column(&series, "t").len(), 1201);
}

#[test]
fn roundtrip_rejects_atoms_outside_the_band() {
    let dir = TempDir::new().unwrap();
    let model = p(&dir, "model.json");
    fs::write(
        &model,
        r#"{"center":null,"atoms":[{"alpha":1.0,"omega":6.0,"sigma":0.1,"gamma":0.0,"t":0.0,"kappa":0.0}]}"#,
    )
    .unwrap();
    let sig = p(&dir, "sig.csv");
    ok(&["synthesize", "--model", s(&model), "--t-start", "-20", "--dt", "0.05", "--len", "801", "-o", s(&sig)]);
    assert_eq!(code(&["roundtrip", "--model", s(&model), "-i", s(&sig), "-o", s(&p(&dir, "r.csv"))]), 2);
}

#[test]
fn noisy_source_has_larger_roundtrip_error() {
    let dir = TempDir::new().unwrap();
    let mut errors = Vec::new();
    for (name, noise) in [("clean", "0"), ("noisy", "0.1")] {
        let sig = p(&dir, &format!("{name}.csv"));
        ok(&["generate", "--generator", "lolo-cubic", "--noise-sigma", noise, "--seed", "3", "-o", s(&sig)]);
        let d = p(&dir, name);
        ok(&["decompose", "-i", s(&sig), "--max-levels", "1", "--prominence", "0.15", "--out-dir", s(&d)]);
        let rep = p(&dir, &format!("{name}_rt.csv"));
        ok(&["roundtrip", "--model", s(&d.join("model.json")), "-i", s(&sig), "-o", s(&rep)]);
        errors.push(metric(&report(&rep), "time_rel_error"));
    }
    assert!(errors[1] > errors[0], "noisy {} vs clean {}", errors[1], errors[0]);
}

#[test]
fn detrend_removes_an_exact_polynomial() {
    let dir = TempDir::new().unwrap();
    let input = p(&dir, "prices.csv");
    let poly = |t: f64| 3.0 - 2.0 * t + 0.5 * t * t - 0.1 * t.powi(3) + 0.02 * t.powi(4) - 0.003 * t.powi(5);
    write_series(
        &input,
        "t,price",
        (0..200).map(|n| {
            let t = -3.0 + 0.03 * n as f64;
            (t, poly(t))
        }),
    );
    let out = p(&dir, "detrended.csv");
    ok(&["detrend", "-i", s(&input), "--degree", "5", "-o", s(&out)]);
    let price = column(&out, "price");
    let res = column(&out, "detrended");
    let scale = price.iter().map(|v| v * v).sum::<f64>().sqrt();
    let err = res.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(err <= 1e-8 * scale, "{err}");
    let coeffs: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(p(&dir, "detrended.json")).unwrap()).unwrap();
    assert_eq!(coeffs["coefficients"].as_array().unwrap().len(), 6);
}

#[test]
fn detrend_constant_series_and_bad_degree() {
    let dir = TempDir::new().unwrap();
    let input = p(&dir, "flat.csv");
    write_series(&input, "t,price", (0..50).map(|n| (n as f64, 42.0)));
    let out = p(&dir, "out.csv");
    ok(&["detrend", "-i", s(&input), "--degree", "1", "-o", s(&out), "--coefficients", s(&p(&dir, "c.json"))]);
    assert!(column(&out, "detrended").iter().all(|r| r.abs() < 1e-10));
    assert!(p(&dir, "c.json").exists());
    assert_eq!(code(&["detrend", "-i", s(&input), "--degree", "11", "-o", s(&out)]), 2);

    let short = p(&dir, "short.csv");
    write_series(&short, "t,price", (0..4).map(|n| (n as f64, n as f64)));
    assert_eq!(code(&["detrend", "-i", s(&short), "--degree", "5", "-o", s(&out)]), 2);
}

#[test]
fn detrend_keeps_a_planted_chirp() {
    let dir = TempDir::new().unwrap();
    let input = p(&dir, "series.csv");
    let t: Vec<f64> = (0..1024).map(|n| n as f64 / 1023.0).collect();
    let chirp: Vec<f64> = t.iter().map(|&t| (2.0 * std::f64::consts::PI * (20.0 * t + 30.0 * t * t)).sin()).collect();
    let trend = |t: f64| 100.0 + 40.0 * t - 25.0 * t * t + 8.0 * t.powi(3);
    write_series(&input, "t,price", t.iter().zip(&chirp).map(|(&t, &c)| (t, trend(t) + c)));
    let out = p(&dir, "out.csv");
    ok(&["detrend", "-i", s(&input), "--degree", "5", "-o", s(&out)]);
    let res = column(&out, "detrended");
    let mean = res.iter().sum::<f64>() / res.len() as f64;
    assert!(mean.abs() < 1e-8);
    let dot: f64 = res.iter().zip(&chirp).map(|(a, b)| a * b).sum();
    let corr = dot / (res.iter().map(|v| v * v).sum::<f64>() * chirp.iter().map(|v| v * v).sum::<f64>()).sqrt();
    assert!(corr >= 0.95, "correlation {corr}");
}
