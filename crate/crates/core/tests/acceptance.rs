//! Exit criteria for the toolkit. Runs every criterion, prints one
//! PASS/FAIL line each and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lcsamp_core::regularity::{default_fit_range, sup_distance};
use lcsamp_core::sweep::{detect_critical_h, run_sweep, SweepConfig, SweepRow};
use lcsamp_core::{
    aadc_sample, check_strong_modulus, count_samples, decimate, estimate_holder_exponent,
    gen_fbm, gen_ramp, gen_weierstrass, interpolation_error, normalize_to_unit_range, quantize,
    reconstruct, worst_case_bound, DyadicGrid, FbmSpec, QuantizationConfig, QuantizedSignal,
    UniformSignal, WeierstrassSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn ac1_lossless() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..1000 {
        let j = rng.random_range(0..=12u32);
        let m = rng.random_range(0..=8u32);
        let n = 1usize << j;
        let top = 1i64 << m;
        let mut levels = Vec::with_capacity(n);
        while levels.len() < n {
            let l = rng.random_range(0..top);
            let run = rng.random_range(1..=16usize).min(n - levels.len());
            levels.extend(std::iter::repeat_n(l, run));
        }
        let q = QuantizedSignal::new(
            DyadicGrid::new(j).unwrap(),
            QuantizationConfig::new(m).unwrap(),
            levels,
        )
        .unwrap();
        let back = reconstruct(&decimate(&q).unwrap()).unwrap();
        if back != q {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(10),
        format!("{failures} mismatches in 1000 signals, {elapsed:.2?} (limit 10 s)"),
    )
}

fn ac2_quantization_bound() -> Outcome {
    let mut ok = true;
    let mut worst_gap = 0.0f64;
    let mut min_sup = f64::INFINITY;
    for m in [4u32, 5] {
        let cfg = QuantizationConfig::new(m).unwrap();
        let q = cfg.quantum();
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * m as u64 + seed);
            let v: Vec<f64> = (0..1024).map(|_| rng.random::<f64>()).collect();
            let s = UniformSignal::new(DyadicGrid::new(10).unwrap(), v).unwrap();
            let gap = sup_distance(&s, &quantize(&s, cfg).unwrap().dequantize()).unwrap();
            worst_gap = worst_gap.max(gap / q);
            min_sup = min_sup.min(gap / q);
            ok &= gap <= q && gap > q - q / 64.0;
        }
    }
    outcome(
        ok,
        format!("sup gap / 2^-M in [{min_sup:.5}, {worst_gap:.5}], required (63/64, 1]"),
    )
}

fn ac3_monotone() -> Outcome {
    let ramp = gen_ramp(10).unwrap();
    let mut ok = true;
    let mut bad = Vec::new();
    for m in 0..=12u32 {
        let n = count_samples(&decimate(&quantize(&ramp, QuantizationConfig::new(m).unwrap()).unwrap()).unwrap());
        let expected = (1usize << 10).min(1usize << m);
        if n != expected || ((2..=8).contains(&m) && n != 1 << m) {
            ok = false;
            bad.push((m, n));
        }
    }
    outcome(ok, format!("ramp j=10, M=0..12; mismatches {bad:?}"))
}

fn ac4_worst_case_formula() -> Outcome {
    let mut max_rel = 0.0f64;
    for j in [10u32, 13] {
        for m in [4u32, 5] {
            for i in 1..=50 {
                let h = i as f64 / 50.0;
                let got = worst_case_bound(j, m, h, 1.0).unwrap();
                let expected = 2f64.powi(j as i32) * 1f64.min(2f64.powf(m as f64 - h * j as f64));
                max_rel = max_rel.max((got - expected).abs() / expected);
            }
        }
    }
    outcome(
        max_rel <= 4.0 * f64::EPSILON,
        format!("max relative deviation {max_rel:e} over 200 points"),
    )
}

fn ac5_exponent_recovery() -> Outcome {
    let start = Instant::now();
    let (lo, hi) = default_fit_range(13);
    let w = gen_weierstrass(&WeierstrassSpec::new(0.5, 13, 1e-9).unwrap()).unwrap();
    let alpha_w = estimate_holder_exponent(&w, lo, hi).unwrap().alpha_hat;
    let mean_fbm = (0..100u64)
        .map(|seed| {
            let p = gen_fbm(&FbmSpec::new(0.7, 13, 5000 + seed).unwrap()).unwrap();
            estimate_holder_exponent(&p, lo, hi).unwrap().alpha_hat
        })
        .sum::<f64>()
        / 100.0;
    let elapsed = start.elapsed();
    outcome(
        (alpha_w - 0.5).abs() <= 0.1 && (mean_fbm - 0.7).abs() <= 0.1 && elapsed < Duration::from_secs(60),
        format!("W_0.5: {alpha_w:.4} (0.5 ± 0.1); fBm H=0.7 mean: {mean_fbm:.4} (0.7 ± 0.1); {elapsed:.2?} (limit 60 s)"),
    )
}

fn ac6_interpolation_decay() -> Outcome {
    let mut ok = true;
    let mut report = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        let spec = WeierstrassSpec::new(alpha, 0, 1e-10).unwrap();
        let f = spec.function();
        let js: Vec<f64> = (6..=12).map(f64::from).collect();
        let errs: Vec<f64> = (6..=12u32)
            .map(|j| interpolation_error(&f, j, j + 4).unwrap().log2())
            .collect();
        let s = slope(&js, &errs);
        ok &= (s + alpha).abs() <= 0.15;
        report.push(format!("α={alpha}: {s:.4}"));
    }
    outcome(ok, format!("log2 error slopes {} (−α ± 0.15)", report.join(", ")))
}

fn desk_sweep() -> (Vec<SweepRow>, Duration) {
    let cfg = SweepConfig {
        realizations: 100,
        ..SweepConfig::default()
    };
    let start = Instant::now();
    let rows = run_sweep(&cfg).unwrap().rows;
    (rows, start.elapsed())
}

fn rows_for(rows: &[SweepRow], j: u32, m: u32) -> Vec<SweepRow> {
    rows.iter().filter(|r| r.j == j && r.m == m).copied().collect()
}

fn ac7_critical(rows: &[SweepRow], elapsed: Duration) -> Outcome {
    let targets = [((10, 4), 0.4), ((10, 5), 0.5), ((13, 4), 0.3), ((13, 5), 0.4)];
    let kappa = SweepConfig::default().kappa;
    let mut ok = elapsed < Duration::from_secs(600);
    let mut report = Vec::new();
    for ((j, m), target) in targets {
        let e = detect_critical_h(&rows_for(rows, j, m), kappa).unwrap();
        let hit = e.h_c.is_some_and(|h| (h - target).abs() <= 0.1 + 1e-9);
        ok &= hit;
        report.push(format!("(j={j},M={m}) H_c={:?} target {target}", e.h_c));
    }
    outcome(
        ok,
        format!("{}; kappa={kappa}; sweep {elapsed:.2?} (limit 10 min)", report.join(", ")),
    )
}

fn ac8_two_regimes(rows: &[SweepRow]) -> Outcome {
    let kappa = SweepConfig::default().kappa;
    let mut curve = rows_for(rows, 10, 4);
    curve.sort_by(|a, b| a.hurst.total_cmp(&b.hurst));
    let at = |h: f64| curve.iter().find(|r| (r.hurst - h).abs() < 1e-9).unwrap().mean_n;
    let (low, high) = (at(0.1), at(0.9));
    let h_c = detect_critical_h(&curve, kappa).unwrap().h_c.unwrap_or(1.0);
    let se = |r: &SweepRow| r.std_n / 100f64.sqrt();
    let tail: Vec<&SweepRow> = curve.iter().filter(|r| r.hurst >= h_c - 1e-9).collect();
    let monotone = tail
        .windows(2)
        .all(|w| w[1].mean_n <= w[0].mean_n + (se(w[0]).powi(2) + se(w[1]).powi(2)).sqrt());
    outcome(
        low > 0.8 * 1024.0 && high < 0.5 * 1024.0 && monotone,
        format!(
            "mean_n(0.1)={low:.1} (> 819.2), mean_n(0.9)={high:.1} (< 512), non-increasing beyond H_c={h_c}: {monotone}"
        ),
    )
}

fn ac9_fbm_increments() -> Outcome {
    let lags = [1usize, 2, 4, 8, 16, 32, 64];
    let mut ok = true;
    let mut report = Vec::new();
    for h in [0.5, 0.7, 0.9] {
        let mut sums = [0.0f64; 7];
        let mut counts = [0usize; 7];
        for seed in 0..2000u64 {
            let p = gen_fbm(&FbmSpec::new(h, 10, seed).unwrap()).unwrap();
            let v = p.samples();
            for (li, &lag) in lags.iter().enumerate() {
                sums[li] += (lag..v.len()).map(|k| (v[k] - v[k - lag]).powi(2)).sum::<f64>();
                counts[li] += v.len() - lag;
            }
        }
        let xs: Vec<f64> = lags.iter().map(|&l| (l as f64 / 1024.0).log2()).collect();
        let ys: Vec<f64> = sums.iter().zip(&counts).map(|(s, c)| (s / *c as f64).log2()).collect();
        let s = slope(&xs, &ys);
        ok &= (s - 2.0 * h).abs() <= 0.05;
        report.push(format!("H={h}: {s:.4} (target {})", 2.0 * h));
    }
    outcome(ok, format!("increment-variance slopes {}", report.join(", ")))
}

fn ac10_strong_modulus() -> Outcome {
    let mut ok = true;
    let mut report = Vec::new();
    for alpha in [0.3f64, 0.5, 0.9] {
        let rep = check_strong_modulus(|r| r.powf(alpha), 40).unwrap();
        let c = rep.ratio_sum1.max(rep.ratio_sum2);
        // Closed-form limits of the two geometric sums.
        let lim = (1.0 / (1.0 - 2f64.powf(alpha - 1.0))).max(1.0 / (1.0 - 2f64.powf(-alpha)));
        ok &= c.is_finite() && c <= lim * (1.0 + 1e-9) && rep.passes(c);
        report.push(format!("α={alpha}: C={c:.4} (limit {lim:.4})"));
    }
    let lip = check_strong_modulus(|r| r, 40).unwrap();
    ok &= lip.ratio_sum1 > 20.0;
    outcome(
        ok,
        format!("{}; θ(r)=r ratio_sum1(J_max=40)={}", report.join(", "), lip.ratio_sum1),
    )
}

fn ac11_aadc() -> Outcome {
    let cfg = QuantizationConfig::new(4).unwrap();
    let mut rel: Vec<f64> = (0..100u64)
        .map(|seed| {
            let s = normalize_to_unit_range(&gen_fbm(&FbmSpec::new(0.7, 10, seed).unwrap()).unwrap()).signal;
            let a = count_samples(&aadc_sample(&s, cfg).unwrap()) as f64;
            let p = count_samples(&decimate(&quantize(&s, cfg).unwrap()).unwrap()) as f64;
            (a - p).abs() / p
        })
        .collect();
    rel.sort_by(f64::total_cmp);
    let median = 0.5 * (rel[49] + rel[50]);
    outcome(median < 0.25, format!("median relative count difference {median:.4} (< 0.25)"))
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("AC1 lossless decimation", ac1_lossless()),
        ("AC2 quantization bound", ac2_quantization_bound()),
        ("AC3 monotone worst case", ac3_monotone()),
        ("AC4 worst-case bound formula", ac4_worst_case_formula()),
        ("AC5 exponent recovery", ac5_exponent_recovery()),
        ("AC6 interpolation error decay", ac6_interpolation_decay()),
    ];
    let (rows, elapsed) = desk_sweep();
    results.push(("AC7 critical H reproduction", ac7_critical(&rows, elapsed)));
    results.push(("AC8 two-regime shape", ac8_two_regimes(&rows)));
    results.push(("AC9 fBm statistical validity", ac9_fbm_increments()));
    results.push(("AC10 strong-modulus checks", ac10_strong_modulus()));
    results.push(("AC11 AADC comparability", ac11_aadc()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
