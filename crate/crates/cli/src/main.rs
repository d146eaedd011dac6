//! `cylwig` — batch front door for the semiclassical-limit experiments:
//! config ingestion, pipeline dispatch, deterministic CSV/JSON emission.
//!
//! Exit codes: 0 all checks passed, 2 a check failed, 1 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use ndarray::{Array1, Array2};
use serde_json::json;

use cylwig_core::bosegas;
use cylwig_core::conevalued::{cp_check, MatrixCylMeasure};
use cylwig_core::cylmeasure::{bochner_pd_check, CylMeasure};
use cylwig_core::fockrep::{FockOracle, FourierGrid};
use cylwig_core::schema::{
    parse_num, parse_nums, parse_points, CpCheckSpec, ExperimentConfig, ExperimentKind,
};
use cylwig_core::semiclassics::{
    classical_kms_check, convolution_limit_check, limit_char, pconv_check, SmoothFn2, Symbol2D,
};

#[derive(Parser)]
#[command(name = "cylwig", version, about = "cylindrical Wigner measure experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct CommonRun {
    /// experiment config (strict JSON)
    #[arg(long)]
    config: PathBuf,
    /// output directory for CSV/JSON artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// worker threads (0 = auto); falls back to CYLWIG_THREADS
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// seed for randomized point sets; recorded in the JSON summary
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// run the experiment described by the config
    Run(CommonRun),
    /// schema + sanity checks only, no numerics
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// pointwise limit extraction (limit-kind config)
    Limit(CommonRun),
    /// ideal Bose gas β-scan
    Bose {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long)]
        beta_min: f64,
        #[arg(long)]
        beta_max: f64,
        #[arg(long)]
        beta_steps: usize,
        /// comma-separated list of h values
        #[arg(long, value_delimiter = ',')]
        h_list: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        f0_threshold: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// tabulate a measure's characteristic function (char-dump config)
    CharDump {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Weyl-relation convergence tables against the truncated oracle
    OracleReport {
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        n_list: Vec<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// block complete-positivity certification (cp-check config)
    CpCheck(CommonRun),
}

/// 17 significant digits, '.' separator, locale-free.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::fs::write(tmp.path(), contents)?;
    tmp.persist(path)
        .map_err(|e| anyhow!("atomic rename failed: {e}"))?;
    Ok(())
}

fn setup_threads(flag: usize) -> Result<()> {
    let n = if flag > 0 {
        flag
    } else {
        std::env::var("CYLWIG_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0)
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool setup")?;
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
    cfg.check_version()?;
    Ok(cfg)
}

/// true = all checks passed (exit 0), false = a check failed (exit 2)
fn dispatch(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<bool> {
    match &cfg.experiment {
        ExperimentKind::Limit(spec) => run_limit(spec, out, seed),
        ExperimentKind::Bose(spec) => {
            let betas = linspace(
                parse_num(&spec.beta_min, "beta_min")?,
                parse_num(&spec.beta_max, "beta_max")?,
                spec.beta_steps,
            )?;
            let h_list = parse_nums(&spec.h_list, "h_list")?;
            run_bose(
                spec.d,
                parse_num(&spec.omega, "omega")?,
                &betas,
                &h_list,
                parse_num(&spec.f0_threshold, "f0_threshold")?,
                out,
            )
        }
        ExperimentKind::Bochner(spec) => {
            let m = spec.measure.build()?;
            let tol = parse_num(&spec.tol, "tol")?;
            if spec.n_points == 0 || spec.n_points > 8 {
                return Err(anyhow!("n_points must be in 1..=8"));
            }
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut all = true;
            let mut rows = Vec::new();
            for set in 0..spec.point_sets {
                let pts: Vec<Vec<f64>> = (0..spec.n_points)
                    .map(|_| {
                        (0..m.space.dim())
                            .map(|_| rng.gen_range(-3.0..3.0))
                            .collect()
                    })
                    .collect();
                let rep = bochner_pd_check(&m, &pts, tol)?;
                all &= rep.passed;
                rows.push(json!({
                    "set": set, "passed": rep.passed,
                    "min_eig": rep.min_eig, "max_eig": rep.max_eig
                }));
            }
            let summary = json!({
                "experiment": "bochner", "seed": seed, "tol": tol,
                "sets": rows, "passed": all
            });
            write_atomic(&out.join("bochner.json"), &serde_json::to_string_pretty(&summary)?)?;
            Ok(all)
        }
        ExperimentKind::QuantizeDemo(spec) => {
            let s = spec.state.build()?;
            let m = spec.measure.build()?;
            let center = parse_nums(&spec.center, "center")?;
            if center.len() != 2 {
                return Err(anyhow!("center must have 2 components"));
            }
            let grid = FourierGrid {
                delta: parse_num(&spec.delta, "delta")?,
                half_points: spec.half_points,
            };
            let sym = Symbol2D::gaussian_bump(
                [center[0], center[1]],
                parse_num(&spec.sigma, "sigma")?,
                grid,
            );
            let h_list = parse_nums(&spec.h_list, "h_list")?;
            let rep = pconv_check(&s, &m, &sym, spec.n_trunc, &h_list)?;
            let mut csv = String::from("h,expectation_re,expectation_im,gap\n");
            for (h, e, gap) in &rep.per_h {
                csv.push_str(&format!("{},{},{},{}\n", fmt(*h), fmt(e.re), fmt(e.im), fmt(*gap)));
            }
            write_atomic(&out.join("quantize_demo.csv"), &csv)?;
            let shrinking = rep.per_h.windows(2).all(|w| w[1].2 <= w[0].2);
            let summary = json!({
                "experiment": "quantize-demo", "seed": seed,
                "classical_re": rep.classical.re, "classical_im": rep.classical.im,
                "extrapolated_gap": rep.extrapolated_gap,
                "monotone_shrinking": shrinking,
                "envelope_ok": rep.envelope_ok,
                "passed": shrinking && rep.envelope_ok
            });
            write_atomic(&out.join("quantize_demo.json"), &serde_json::to_string_pretty(&summary)?)?;
            Ok(shrinking && rep.envelope_ok)
        }
        ExperimentKind::Convolve(spec) => {
            let a = spec.a.build()?;
            let b = spec.b.build()?;
            let pts = parse_points(&spec.points, a.space.dim())?;
            let hs = spec.h_schedule.build()?;
            let tol = parse_num(&spec.tol, "tol")?;
            let ok = convolution_limit_check(&a, &b, &hs, &pts, tol)?;
            let summary = json!({
                "experiment": "convolve", "seed": seed, "tol": tol, "passed": ok
            });
            write_atomic(&out.join("convolve.json"), &serde_json::to_string_pretty(&summary)?)?;
            Ok(ok)
        }
        ExperimentKind::Kms(spec) => {
            let beta = parse_num(&spec.beta, "beta")?;
            let omega = parse_num(&spec.omega, "omega")?;
            let factor = parse_num(&spec.control_factor, "control_factor")?;
            let sp = cylwig_core::PhaseSpace::standard(1);
            let gibbs = CylMeasure::gaussian(
                sp,
                Array1::zeros(2),
                Array2::<f64>::eye(2) / (2.0 * beta * omega),
            )?;
            let ham = SmoothFn2::harmonic(omega);
            let (res, _, _) =
                classical_kms_check(&gibbs, &ham, &SmoothFn2::coord_q(), &SmoothFn2::coord_p(), beta)?;
            let control = CylMeasure::gaussian(
                sp,
                Array1::zeros(2),
                Array2::<f64>::eye(2) / (2.0 * beta * factor * omega),
            )?;
            let (res_ctrl, _, _) =
                classical_kms_check(&control, &ham, &SmoothFn2::coord_q(), &SmoothFn2::coord_p(), beta)?;
            let passed = res <= 1e-8 && res_ctrl >= 1e-2;
            let summary = json!({
                "experiment": "kms", "seed": seed,
                "residual": res, "control_residual": res_ctrl, "passed": passed
            });
            write_atomic(&out.join("kms.json"), &serde_json::to_string_pretty(&summary)?)?;
            Ok(passed)
        }
        ExperimentKind::CpCheck(spec) => run_cp_check(spec, out, seed),
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(hi > lo) {
        return Err(anyhow!("need beta_max > beta_min and beta_steps ≥ 2"));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn run_limit(spec: &cylwig_core::schema::LimitSpec, out: &Path, seed: u64) -> Result<bool> {
    let s = spec.state.build()?;
    let pts = parse_points(&spec.points, s.space.dim())?;
    let hs = spec.h_schedule.build()?;
    let tol = parse_num(&spec.tol, "tol")?;
    let candidate = spec.candidate.as_ref().map(|c| c.build()).transpose()?;
    let rep = limit_char(&s, &pts, &hs, tol, candidate)?;

    let mut csv = String::from("point_id,h,re,im\n");
    for (pid, row) in rep.values.iter().enumerate() {
        for (h, v) in rep.h_schedule.iter().zip(row) {
            csv.push_str(&format!("{pid},{},{},{}\n", fmt(*h), fmt(v.re), fmt(v.im)));
        }
    }
    write_atomic(&out.join("limit_table.csv"), &csv)?;

    let converged = rep.converged.iter().all(|c| *c);
    let fit_ok = rep.limit.is_some() && rep.fit_residual <= tol;
    let mass_ok = rep.mass_defect <= tol.max(1e-10);
    let passed = converged && fit_ok && mass_ok;
    let summary = json!({
        "experiment": "limit", "seed": seed, "tol": tol,
        "fit_kind": rep.fit_kind,
        "fit_residual": rep.fit_residual,
        "mass_defect": rep.mass_defect,
        "max_cauchy_defect": rep.cauchy_defect.iter().cloned().fold(0.0, f64::max),
        "converged": converged,
        "passed": passed
    });
    write_atomic(&out.join("limit_summary.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(passed)
}

fn run_bose(
    d: usize,
    omega: f64,
    betas: &[f64],
    h_list: &[f64],
    f0_threshold: f64,
    out: &Path,
) -> Result<bool> {
    let table = bosegas::scan(d, omega, betas, h_list, f0_threshold)?;
    let mut csv = String::from("d,omega,beta,h,mu_gap,f0,tail,beta_star_flag\n");
    for r in &table.rows {
        let star = table
            .beta_star
            .iter()
            .any(|(h, b)| *h == r.h && *b == Some(r.beta));
        csv.push_str(&format!(
            "{d},{},{},{},{},{},{},{}\n",
            fmt(omega),
            fmt(r.beta),
            fmt(r.h),
            fmt(r.gap),
            fmt(r.f0),
            fmt(r.tail),
            u8::from(star)
        ));
    }
    write_atomic(&out.join("bose_scan.csv"), &csv)?;
    let ok = table.rows.iter().all(|r| r.residual <= 1e-10);
    Ok(ok)
}

fn run_cp_check(spec: &CpCheckSpec, out: &Path, seed: u64) -> Result<bool> {
    let mut terms = Vec::new();
    let mut weights_psd = true;
    for t in &spec.terms {
        let w = t.weight_matrix(spec.k)?;
        weights_psd &= cylwig_core::linalg::pd_check(&w, 1e-12)?.passed;
        terms.push((t.measure.build()?, w));
    }
    // deliberately unchecked: the verdict, not input validation, decides
    let m = MatrixCylMeasure::new_unchecked(spec.k, terms);
    let pts = parse_points(&spec.points, m.terms[0].0.space.dim())?;
    let tol = parse_num(&spec.tol, "tol")?;
    let rep = cp_check(&m, &pts, tol)?;
    let summary = json!({
        "experiment": "cp-check", "seed": seed, "tol": tol,
        "k": spec.k,
        "weights_psd": weights_psd,
        "min_eig": rep.min_eig, "max_eig": rep.max_eig,
        "herm_defect": rep.herm_defect,
        "passed": rep.passed
    });
    write_atomic(&out.join("cp_check.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(rep.passed)
}

fn validate(path: &Path) -> Result<()> {
    let cfg = load_config(path)?;
    match &cfg.experiment {
        ExperimentKind::Limit(spec) => {
            let s = spec.state.build()?;
            parse_points(&spec.points, s.space.dim())?;
            spec.h_schedule.build()?;
            parse_num(&spec.tol, "tol")?;
            if let Some(c) = &spec.candidate {
                c.build()?;
            }
        }
        ExperimentKind::Bose(spec) => {
            let h_list = parse_nums(&spec.h_list, "h_list")?;
            for h in h_list {
                bosegas::GasConfig::new(spec.d, parse_num(&spec.omega, "omega")?, 1.0, h)?;
            }
            linspace(
                parse_num(&spec.beta_min, "beta_min")?,
                parse_num(&spec.beta_max, "beta_max")?,
                spec.beta_steps,
            )?;
        }
        ExperimentKind::Bochner(spec) => {
            spec.measure.build()?;
            parse_num(&spec.tol, "tol")?;
        }
        ExperimentKind::QuantizeDemo(spec) => {
            spec.state.build()?;
            spec.measure.build()?;
            let hs = parse_nums(&spec.h_list, "h_list")?;
            if hs.iter().any(|h| !(*h > 0.0 && *h <= 1.0)) {
                return Err(anyhow!("h_list: every h must lie in (0, 1]"));
            }
        }
        ExperimentKind::Convolve(spec) => {
            let a = spec.a.build()?;
            spec.b.build()?;
            parse_points(&spec.points, a.space.dim())?;
            spec.h_schedule.build()?;
        }
        ExperimentKind::Kms(spec) => {
            let beta = parse_num(&spec.beta, "beta")?;
            let omega = parse_num(&spec.omega, "omega")?;
            if !(beta > 0.0 && omega > 0.0) {
                return Err(anyhow!("beta and omega must be positive"));
            }
        }
        ExperimentKind::CpCheck(spec) => {
            for t in &spec.terms {
                t.measure.build()?;
                t.weight_matrix(spec.k)?;
            }
        }
    }
    Ok(())
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct CharDumpConfig {
    version: String,
    measure: cylwig_core::schema::MeasureSpec,
    points: Vec<Vec<String>>,
}

fn run_char_dump(path: &Path, out: &Path) -> Result<bool> {
    let raw = std::fs::read_to_string(path)?;
    let cfg: CharDumpConfig = serde_json::from_str(&raw)?;
    if cfg.version != cylwig_core::schema::SUPPORTED_VERSION {
        return Err(anyhow!("unsupported config version {:?}", cfg.version));
    }
    let m = cfg.measure.build()?;
    let pts = parse_points(&cfg.points, m.space.dim())?;
    let dim = m.space.dim();
    let mut csv = String::new();
    for i in 0..dim {
        csv.push_str(&format!("x{i},"));
    }
    csv.push_str("re,im\n");
    for p in &pts {
        for c in p {
            csv.push_str(&fmt(*c));
            csv.push(',');
        }
        let v = m.char(p)?;
        csv.push_str(&format!("{},{}\n", fmt(v.re), fmt(v.im)));
    }
    write_atomic(&out.join("char_dump.csv"), &csv)?;
    Ok(true)
}

fn run_oracle_report(n_list: &[usize], out: &Path) -> Result<bool> {
    let grid = cylwig_core::fockrep::standard_pair_grid();
    let mut csv = String::from("N,h,test_id,residual\n");
    let mut pass = true;
    for &n in n_list {
        for (tid, (h, x, y)) in grid.iter().enumerate() {
            let o = FockOracle::new(1, *h, n)?;
            let r = o.weyl_relation_residual(x, y)?;
            csv.push_str(&format!("{n},{},{tid},{}\n", fmt(*h), fmt(r)));
            if n >= 128 {
                pass &= r <= 1e-6;
            }
        }
    }
    write_atomic(&out.join("oracle_report.csv"), &csv)?;
    Ok(pass)
}

fn real_main() -> Result<u8> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run(common) | Cmd::Limit(common) | Cmd::CpCheck(common) => {
            setup_threads(common.threads)?;
            let cfg = load_config(&common.config)?;
            let ok = dispatch(&cfg, &common.out, common.seed)?;
            Ok(if ok { 0 } else { 2 })
        }
        Cmd::Validate { config } => {
            validate(&config)?;
            println!("ok");
            Ok(0)
        }
        Cmd::Bose {
            dim,
            omega,
            beta_min,
            beta_max,
            beta_steps,
            h_list,
            f0_threshold,
            out,
            threads,
        } => {
            setup_threads(threads)?;
            let betas = linspace(beta_min, beta_max, beta_steps)?;
            if h_list.is_empty() {
                return Err(anyhow!("--h-list must not be empty"));
            }
            let ok = run_bose(dim, omega, &betas, &h_list, f0_threshold, &out)?;
            Ok(if ok { 0 } else { 2 })
        }
        Cmd::CharDump { config, out } => {
            let ok = run_char_dump(&config, &out)?;
            Ok(if ok { 0 } else { 2 })
        }
        Cmd::OracleReport { n_list, out } => {
            let ok = run_oracle_report(&n_list, &out)?;
            Ok(if ok { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
