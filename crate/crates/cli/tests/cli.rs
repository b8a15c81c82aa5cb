use std::path::Path;
use std::process::{Command, Output};

use lcsamp_core::{
    count_samples, decimate, gen_fbm, normalize_to_unit_range, quantize, EventTrain, FbmSpec,
    QuantizationConfig,
};

fn lcsamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsamp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constant_signal_gives_one_sample() {
    let o = lcsamp(&["--generator", "constant", "--j", "8", "--M", "4", "sample"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn ramp_count_matches_level_count() {
    let o = lcsamp(&["--generator", "ramp", "--j", "10", "--M", "4", "sample"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "16");
}

#[test]
fn fbm_sample_matches_library_composition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lcsamp(&[
        "--generator", "fbm", "--H", "0.5", "--j", "10", "--M", "4", "--seed", "42", "--out", out,
        "sample",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let path = gen_fbm(&FbmSpec::new(0.5, 10, 42).unwrap()).unwrap();
    let unit = normalize_to_unit_range(&path).signal;
    let train = decimate(&quantize(&unit, QuantizationConfig::new(4).unwrap()).unwrap()).unwrap();
    assert_eq!(stdout(&o).trim(), count_samples(&train).to_string());

    let written = std::fs::read(dir.path().join("events.txt")).unwrap();
    let mut expected = Vec::new();
    train.write_to(&mut expected).unwrap();
    assert_eq!(written, expected);
    let reread = EventTrain::read_from(written.as_slice()).unwrap();
    assert_eq!(reread, train);

    let written_signal = std::fs::read(dir.path().join("signal.txt")).unwrap();
    let mut expected_signal = Vec::new();
    unit.write_to(&mut expected_signal).unwrap();
    assert_eq!(written_signal, expected_signal);
}

#[test]
fn sample_reads_a_generated_signal_file() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("w.txt");
    let sig = sig.to_str().unwrap();
    let g = lcsamp(&["--generator", "weierstrass", "--H", "0.4", "--j", "9", "--out", sig, "generate"]);
    assert!(g.status.success());
    let from_file = lcsamp(&["--M", "5", "sample", "--input", sig]);
    let direct = lcsamp(&["--generator", "weierstrass", "--H", "0.4", "--j", "9", "--M", "5", "sample"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&direct));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "realizations = 2\nnot_a_key = 3\n").unwrap();
    let o = lcsamp(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not_a_key"));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(lcsamp(&["--generator", "noise", "sample"]).status.code(), Some(1));
    assert_eq!(lcsamp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lcsamp(&["--j", "10", "--H-grid", "x", "sweep"]).status.code(), Some(1));
}

#[test]
fn missing_input_exits_three() {
    let o = lcsamp(&["sample", "--input", "/definitely/not/here.txt"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_three() {
    let o = lcsamp(&["--generator", "ramp", "--j", "6", "--out", "/definitely/not/here/s.txt", "generate"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn invalid_hurst_is_a_domain_error() {
    let o = lcsamp(&["--generator", "fbm", "--H", "1.5", "sample"]);
    assert_eq!(o.status.code(), Some(2));
}

fn run_small_sweep(out: &Path) -> Output {
    lcsamp(&[
        "--generator", "fbm", "--j", "8", "--M", "4", "--realizations", "4", "--seed", "7",
        "--out", out.to_str().unwrap(), "sweep", "--H-grid", "0.3,0.6",
    ])
}

#[test]
fn sweep_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run_small_sweep(&a).status.success());
    assert!(run_small_sweep(&b).status.success());
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert_eq!(text.lines().next().unwrap(), "H,j,M,mean_n,std_n,n_worst,log2_mean_n");
    assert_eq!(text.lines().count(), 3);

    let meta = std::fs::read_to_string(dir.path().join("a.csv.meta")).unwrap();
    assert!(meta.contains("master_seed=7"));
    assert!(meta.contains("kappa=0.5"));
    let norm = std::fs::read_to_string(dir.path().join("a.csv.norm.csv")).unwrap();
    assert_eq!(norm.lines().count(), 1 + 2 * 4);
}

#[test]
fn critical_from_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ramp.csv");
    let o = lcsamp(&[
        "--generator", "ramp", "--j", "10", "--M", "4", "--out", csv.to_str().unwrap(),
        "sweep", "--H-grid", "0.05:0.95:0.05",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = lcsamp(&["critical", "--input", csv.to_str().unwrap()]);
    assert!(c.status.success(), "{}", String::from_utf8_lossy(&c.stderr));
    let text = stdout(&c);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,M,H_c,rule,kappa"));
    // 16 samples sit below 0.5 * 1024 at every H.
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&fields[..2], &["10", "4"]);
    assert_eq!(fields[2].parse::<f64>().unwrap(), 0.05);
    assert_eq!(fields[3], "first_H_below_kappa_plateau");
}

#[test]
fn analyze_writes_scale_table() {
    let o = lcsamp(&["--generator", "weierstrass", "--H", "0.5", "--j", "12", "analyze"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("scale_i,radius,modulus,osc_mean,osc_max"));
    assert_eq!(text.lines().count(), 1 + (9 - 2 + 1));
    let err = String::from_utf8_lossy(&o.stderr);
    let alpha: f64 = err
        .split_whitespace()
        .find_map(|t| t.strip_prefix("alpha_hat="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((alpha - 0.5).abs() < 0.1, "alpha {alpha}");
}
