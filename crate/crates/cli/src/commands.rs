use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use lcsamp_core::regularity::{default_fit_range, scale_report, write_scale_csv};
use lcsamp_core::sweep::{
    detect_all, parse_hurst_grid, read_sweep_csv, write_critical_csv, write_sweep_csv,
    SweepOutput,
};
use lcsamp_core::{
    aadc_sample, count_samples, decimate_with, estimate_holder_exponent_with,
    normalize_to_unit_range, quantize, run_sweep, GeneratorKind, KeepPolicy, QuantizationConfig,
    ScaleStatistic, SweepConfig, UniformSignal, WeierstrassSpec,
};

use crate::error::{io_error, CliError};
use crate::Shared;

const DEFAULT_J: u32 = 10;
const DEFAULT_M: u32 = 4;
const DEFAULT_HURST: f64 = 0.5;

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Read the signal from a file instead of generating it.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Quantize the signal as is, without mapping it onto [0, 1].
    #[arg(long)]
    raw: bool,
    /// Use the asynchronous-ADC crossing model instead of floor decimation.
    #[arg(long)]
    aadc: bool,
    /// Which sample of each run to keep.
    #[arg(long, value_parser = ["last", "first"], default_value = "last")]
    policy: String,
    #[arg(long)]
    tail_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Coarsest fitted scale (radius 2^-i_min).
    #[arg(long)]
    i_min: Option<u32>,
    /// Finest fitted scale.
    #[arg(long)]
    i_max: Option<u32>,
    /// Per-scale statistic used by the exponent fit.
    #[arg(long, value_parser = ["mean", "modulus"], default_value = "mean")]
    statistic: String,
    #[arg(long)]
    tail_tol: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct SweepOpts {
    /// H values: comma list or start:stop:step.
    #[arg(long = "H-grid")]
    h_grid: Option<String>,
    /// Skip normalization to [0, 1] before quantizing.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    tail_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    opts: SweepOpts,
    /// Also write a gnuplot script plotting the CSV.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    /// Sweep CSV to analyse; when absent a sweep is run first.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    opts: SweepOpts,
}

fn generator_kind(shared: &Shared) -> Result<GeneratorKind, CliError> {
    match &shared.generator {
        None => Ok(GeneratorKind::Fbm),
        Some(g) => g
            .parse()
            .map_err(|_| CliError::Usage(format!("unknown generator `{g}`"))),
    }
}

fn generated_signal(shared: &Shared, tail_tol: Option<f64>) -> Result<UniformSignal, CliError> {
    let kind = generator_kind(shared)?;
    Ok(kind.generate(
        shared.hurst.unwrap_or(DEFAULT_HURST),
        shared.j.unwrap_or(DEFAULT_J),
        shared.seed.unwrap_or(0),
        tail_tol.unwrap_or(WeierstrassSpec::DEFAULT_TAIL_TOLERANCE),
    )?)
}

fn read_signal(path: &Path) -> Result<UniformSignal, CliError> {
    let file = File::open(path).map_err(io_error(path))?;
    Ok(UniformSignal::read_from(BufReader::new(file))?)
}

fn input_signal(
    shared: &Shared,
    input: &Option<PathBuf>,
    tail_tol: Option<f64>,
) -> Result<UniformSignal, CliError> {
    match input {
        Some(p) => read_signal(p),
        None => generated_signal(shared, tail_tol),
    }
}

/// Runs `f` against the output file, or stdout when no path is given.
fn with_output<F>(path: Option<&Path>, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io_error(p))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(io_error(p))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

pub fn generate(shared: &Shared, tail_tol: Option<f64>) -> Result<(), CliError> {
    let s = generated_signal(shared, tail_tol)?;
    with_output(shared.out.as_deref(), |w| Ok(s.write_to(w)?))
}

pub fn sample(shared: &Shared, args: &SampleArgs) -> Result<(), CliError> {
    let signal = input_signal(shared, &args.input, args.tail_tol)?;
    let input = if args.raw {
        signal
    } else {
        normalize_to_unit_range(&signal).signal
    };
    let cfg = QuantizationConfig::new(shared.m.unwrap_or(DEFAULT_M))?;
    let train = if args.aadc {
        aadc_sample(&input, cfg)?
    } else {
        let policy = match args.policy.as_str() {
            "first" => KeepPolicy::FirstOfRun,
            _ => KeepPolicy::LastOfRun,
        };
        decimate_with(&quantize(&input, cfg)?, policy)?
    };

    if let Some(dir) = &shared.out {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        let signal_path = dir.join("signal.txt");
        let events_path = dir.join("events.txt");
        with_output(Some(&signal_path), |w| Ok(input.write_to(w)?))?;
        with_output(Some(&events_path), |w| Ok(train.write_to(w)?))?;
    }
    println!("{}", count_samples(&train));
    Ok(())
}

pub fn analyze(shared: &Shared, args: &AnalyzeArgs) -> Result<(), CliError> {
    let s = input_signal(shared, &args.input, args.tail_tol)?;
    let (lo, hi) = default_fit_range(s.grid().scale());
    let (i_min, i_max) = (args.i_min.unwrap_or(lo), args.i_max.unwrap_or(hi));
    let statistic = match args.statistic.as_str() {
        "modulus" => ScaleStatistic::UniformModulus,
        _ => ScaleStatistic::MeanOscillation,
    };
    let est = estimate_holder_exponent_with(&s, i_min, i_max, statistic)?;
    let rows = scale_report(&s, i_min, i_max)?;
    with_output(shared.out.as_deref(), |w| Ok(write_scale_csv(&rows, w)?))?;
    eprintln!(
        "alpha_hat={} c_lower={} c_upper={} residual={} fit={}..{} statistic={}",
        est.alpha_hat, est.c_lower, est.c_upper, est.residual, i_min, i_max, args.statistic
    );
    Ok(())
}

fn sweep_config(shared: &Shared, opts: &SweepOpts) -> Result<SweepConfig, CliError> {
    let mut cfg = match &shared.config {
        Some(p) => {
            let file = File::open(p).map_err(io_error(p))?;
            SweepConfig::from_reader(BufReader::new(file))?
        }
        None => SweepConfig::default(),
    };
    if shared.generator.is_some() {
        cfg.generator = generator_kind(shared)?;
    }
    if let Some(h) = shared.hurst {
        cfg.hurst_grid = vec![h];
    }
    if let Some(g) = &opts.h_grid {
        cfg.hurst_grid =
            parse_hurst_grid(g).ok_or_else(|| CliError::Usage(format!("invalid H grid `{g}`")))?;
    }
    if let Some(j) = shared.j {
        cfg.j_list = vec![j];
    }
    if let Some(m) = shared.m {
        cfg.m_list = vec![m];
    }
    if let Some(r) = shared.realizations {
        cfg.realizations = r;
    }
    if let Some(s) = shared.seed {
        cfg.master_seed = s;
    }
    if let Some(k) = shared.kappa {
        cfg.kappa = k;
    }
    if let Some(t) = opts.tail_tol {
        cfg.tail_tolerance = t;
    }
    if opts.raw {
        cfg.normalize = false;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Run settings that the CSV itself does not carry.
fn write_metadata(path: &Path, cfg: &SweepConfig) -> Result<(), CliError> {
    with_output(Some(path), |w| {
        let lines = [
            format!("generator={}", cfg.generator),
            format!("H_grid={}", join(&cfg.hurst_grid)),
            format!("j_list={}", join(&cfg.j_list)),
            format!("M_list={}", join(&cfg.m_list)),
            format!("realizations={}", cfg.effective_realizations()),
            format!("master_seed={}", cfg.master_seed),
            "seed_mixing=splitmix64(splitmix64(master_seed) + (index + 1) * 0x9e3779b97f4a7c15)".into(),
            "rng=ChaCha8 seeded from the realization seed".into(),
            "fbm_method=circulant embedding of fractional Gaussian noise, dense Cholesky fallback".into(),
            format!("normalize={}", cfg.normalize),
            format!("weierstrass_tail_tolerance={}", cfg.tail_tolerance),
            format!("worst_case_C={}", cfg.worst_case_c),
            format!("kappa={}", cfg.kappa),
        ];
        for l in lines {
            writeln!(w, "{l}").map_err(io_error(path))?;
        }
        Ok(())
    })
}

fn write_normalization(path: &Path, out: &SweepOutput) -> Result<(), CliError> {
    with_output(Some(path), |w| {
        writeln!(w, "H,j,realization,seed,min,max").map_err(io_error(path))?;
        for r in &out.normalization {
            writeln!(
                w,
                "{},{},{},{},{:.16e},{:.16e}",
                r.hurst, r.j, r.realization, r.seed, r.min, r.max
            )
            .map_err(io_error(path))?;
        }
        Ok(())
    })
}

fn write_gnuplot(path: &Path, csv: &Path, cfg: &SweepConfig) -> Result<(), CliError> {
    let csv = csv.display();
    let mut script = String::from(
        "set datafile separator ','\nset key autotitle columnhead\nset logscale y 2\nset xlabel 'H'\nset ylabel 'n'\n",
    );
    let mut curves = Vec::new();
    for &j in &cfg.j_list {
        for &m in &cfg.m_list {
            curves.push(format!(
                "'{csv}' using 1:(($2=={j} && $3=={m}) ? $4 : 1/0) with lines title 'j={j} M={m} mean'"
            ));
            curves.push(format!(
                "'{csv}' using 1:(($2=={j} && $3=={m}) ? $6 : 1/0) with lines dashtype 3 title 'j={j} M={m} worst case'"
            ));
        }
    }
    script.push_str("plot ");
    script.push_str(&curves.join(", \\\n     "));
    script.push('\n');
    fs::write(path, script).map_err(io_error(path))
}

pub fn sweep(shared: &Shared, args: &SweepArgs) -> Result<(), CliError> {
    let cfg = sweep_config(shared, &args.opts)?;
    let out = run_sweep(&cfg)?;
    with_output(shared.out.as_deref(), |w| Ok(write_sweep_csv(&out.rows, w)?))?;
    if let Some(p) = &shared.out {
        write_metadata(&sidecar(p, ".meta"), &cfg)?;
        if cfg.normalize && cfg.generator != GeneratorKind::Ramp {
            write_normalization(&sidecar(p, ".norm.csv"), &out)?;
        }
        if let Some(g) = &args.gnuplot {
            write_gnuplot(g, p, &cfg)?;
        }
    } else if args.gnuplot.is_some() {
        return Err(CliError::Usage("--gnuplot needs --out for the CSV it plots".into()));
    }
    Ok(())
}

pub fn critical(shared: &Shared, args: &CriticalArgs) -> Result<(), CliError> {
    let (rows, kappa) = match &args.input {
        Some(p) => {
            let file = File::open(p).map_err(io_error(p))?;
            let kappa = shared.kappa.unwrap_or(lcsamp_core::sweep::DEFAULT_KAPPA);
            (read_sweep_csv(BufReader::new(file))?, kappa)
        }
        None => {
            let cfg = sweep_config(shared, &args.opts)?;
            (run_sweep(&cfg)?.rows, cfg.kappa)
        }
    };
    let entries = detect_all(&rows, kappa)?;
    with_output(shared.out.as_deref(), |w| Ok(write_critical_csv(&entries, w)?))
}
