//! Batch command-line front end: every subcommand runs one operation of the
//! laboratory, writes CSV/JSON artifacts into the output directory, and
//! prints a one-line JSON summary to stdout.
//!
//! Exit codes: 0 success, 2 undecided verdicts, 1 errors.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use config::{RunConfig, SCHEMA_VERSION};
use cusplab::geodesic::{clairaut_distance, deviation_scan_from, log_grid};
use cusplab::profiles::ProfileVariant;
use cusplab::report::{csv_document, fmt_float, profile_kv_block};
use cusplab::series::{group_series, parabolic_series, Verdict};
use cusplab::solver::{MeasureStatus, PgcStatus, RegimeType};
use cusplab::transfer::{build_level0, build_level1, power_iterate};
use cusplab::{Regime, Solver};

static DEFAULT_CONFIG_HELP: std::sync::OnceLock<String> = std::sync::OnceLock::new();

fn default_config_help() -> &'static str {
    DEFAULT_CONFIG_HELP.get_or_init(|| {
        let defaults = toml::to_string(&RunConfig::default()).unwrap_or_default();
        format!(
            "Config file (TOML, sectioned key = value); flags override keys.\n\
             Defaults:\n\n{defaults}"
        )
    })
}

#[derive(Parser)]
#[command(
    name = "cusplab",
    about = "Cusp metrics, orbit series and transfer-operator spectra",
    after_long_help = default_config_help()
)]
struct Cli {
    /// Path to the run configuration file.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Profile variant: pure_log | lemma22 | remark24.
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Log-log coefficient of the cusp profile.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Target pinching constant in (0,1).
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Ramp rate (omit to calibrate).
    #[arg(long, global = true)]
    epsilon0: Option<f64>,
    /// Parabolic translation scale.
    #[arg(long, global = true)]
    s_p: Option<f64>,
    /// Hyperbolic translation length per power.
    #[arg(long, global = true)]
    l_h: Option<f64>,
    /// Junction defect.
    #[arg(long = "defect", global = true)]
    c: Option<f64>,
    /// Series truncation for one-letter sums.
    #[arg(long, global = true)]
    series_m: Option<usize>,
    /// Worker threads for grid scans.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan profile curvature over the verification grid.
    CurvatureScan,
    /// Compare geodesic lengths against the model distance 2*height(D).
    GeodesicCheck,
    /// Classify the rank-k lattice series at one exponent.
    ParabolicSeries {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        /// Stripe depth of the metric (overrides model.a).
        #[arg(long)]
        a: Option<f64>,
    },
    /// Two-route group series at one exponent.
    GroupSeries {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 4)]
        k_syllables: usize,
        #[arg(long, default_value_t = 50)]
        m: usize,
        #[arg(long)]
        a: Option<f64>,
    },
    /// Leading eigenvalue of the transfer operator at (a, s).
    Rho {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0)]
        level: u8,
        /// Dump the matrix as CSV triplets (row,col,value).
        #[arg(long)]
        dump_matrix: bool,
    },
    /// Critical exponent at stripe depth a.
    FindDelta {
        #[arg(long)]
        a: f64,
    },
    /// Critical stripe depth a* with rho(a*, 1/2) = 1.
    FindAstar,
    /// Level-0 monotonicity certificate between two depths.
    Monotonicity {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        a_prime: f64,
        #[arg(long, default_value_t = 40)]
        k_max: usize,
    },
    /// Full regime report at one depth ("auto" locates a*).
    Classify {
        #[arg(long, default_value = "auto")]
        a: String,
    },
    /// Regime table over an a-grid around the critical depth.
    Atlas,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, ov: &Overrides) -> anyhow::Result<()> {
    if let Some(v) = &ov.variant {
        cfg.profile.variant = Some(match v.as_str() {
            "pure_log" => ProfileVariant::PureLog,
            "lemma22" => ProfileVariant::Lemma22,
            "remark24" => ProfileVariant::Remark24,
            other => anyhow::bail!("unknown variant {other:?}"),
        });
    }
    if let Some(x) = ov.alpha {
        cfg.profile.alpha = x;
    }
    if let Some(x) = ov.kappa {
        cfg.profile.kappa = x;
    }
    if let Some(x) = ov.epsilon0 {
        cfg.profile.epsilon0 = Some(x);
    }
    if let Some(x) = ov.s_p {
        cfg.model.s_p = x;
    }
    if let Some(x) = ov.l_h {
        cfg.model.l_h = x;
    }
    if let Some(x) = ov.c {
        cfg.model.c = x;
    }
    if let Some(x) = ov.series_m {
        cfg.solver.series_m = x;
    }
    if let Some(x) = ov.threads {
        cfg.solver.threads = x;
    }
    if let Some(x) = &ov.out {
        cfg.output.dir = x.clone();
    }
    cfg.validate()
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    apply_overrides(&mut cfg, &cli.overrides)?;
    let out_dir = PathBuf::from(&cfg.output.dir);
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.solver.threads)
        .build()
        .context("thread pool")?;

    match cli.cmd {
        Command::CurvatureScan => curvature_scan(&cfg, &out_dir, &pool),
        Command::GeodesicCheck => geodesic_check(&cfg, &out_dir, &pool),
        Command::ParabolicSeries { s, rank, a } => parabolic_series_cmd(&cfg, &out_dir, s, rank, a),
        Command::GroupSeries {
            s,
            k_syllables,
            m,
            a,
        } => group_series_cmd(&cfg, &out_dir, s, k_syllables, m, a),
        Command::Rho {
            a,
            s,
            level,
            dump_matrix,
        } => rho_cmd(&cfg, &out_dir, a, s, level, dump_matrix),
        Command::FindDelta { a } => find_delta_cmd(&cfg, &out_dir, a),
        Command::FindAstar => find_astar_cmd(&cfg, &out_dir),
        Command::Monotonicity { a, a_prime, k_max } => {
            monotonicity_cmd(&cfg, &out_dir, a, a_prime, k_max)
        }
        Command::Classify { a } => classify_cmd(&cfg, &out_dir, &a),
        Command::Atlas => atlas_cmd(&cfg, &out_dir, &pool),
    }
}

fn write_artifact(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// JSON artifacts embed the effective configuration for provenance.
fn with_provenance(cfg: &RunConfig, summary: &serde_json::Value) -> serde_json::Value {
    let mut v = summary.clone();
    if let Some(map) = v.as_object_mut() {
        map.insert(
            "config".into(),
            serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null),
        );
    }
    v
}

fn emit(summary: &serde_json::Value) {
    println!("{summary}");
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Converges => "converges",
        Verdict::Diverges => "diverges",
        Verdict::Undecided => "undecided",
    }
}

fn exit_for(verdict: Verdict) -> ExitCode {
    if verdict == Verdict::Undecided {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn curvature_scan(cfg: &RunConfig, out: &Path, pool: &rayon::ThreadPool) -> anyhow::Result<ExitCode> {
    let metric = cfg.metric()?;
    let profile = metric.profile;
    let n = cfg.solver.grid_points;
    let (lo, hi) = (cfg.solver.sigma_min, cfg.solver.sigma_max);
    let grid: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let rows: Vec<Vec<String>> = pool.install(|| {
        grid.par_iter()
            .map(|&sigma| {
                let (u, du, d2u) = profile.eval_u(sigma)?;
                let k = profile.curvature(sigma)?;
                Ok(vec![
                    fmt_float(sigma),
                    fmt_float(u),
                    fmt_float(du),
                    fmt_float(d2u),
                    fmt_float(k),
                ])
            })
            .collect::<cusplab::Result<Vec<_>>>()
    })?;
    let mut k_max = f64::NEG_INFINITY;
    let mut k_min = f64::INFINITY;
    for &sigma in &grid {
        let k = profile.curvature(sigma)?;
        k_max = k_max.max(k);
        k_min = k_min.min(k);
    }
    let mut csv = String::new();
    let _ = writeln!(csv, "# {}", json!({"schema_version": SCHEMA_VERSION, "profile": profile_kv_block(&metric).trim()}));
    csv.push_str(&csv_document(&["sigma", "u", "du", "d2u", "K"], &rows));
    write_artifact(&out.join("curvature_scan.csv"), &csv)?;
    let pinched = k_max <= -(profile.kappa * profile.kappa);
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "curvature-scan",
        "k_max": k_max,
        "k_min": k_min,
        "b_squared": -k_min,
        "kappa_sq": profile.kappa * profile.kappa,
        "pinched": pinched,
    });
    write_artifact(
        &out.join("curvature_scan.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(ExitCode::SUCCESS)
}

fn geodesic_check(cfg: &RunConfig, out: &Path, pool: &rayon::ThreadPool) -> anyhow::Result<ExitCode> {
    let metric = cfg.metric()?;
    let grid = log_grid(cfg.solver.d_min, cfg.solver.d_max, cfg.solver.d_points);
    // rows solved in parallel, ordered by D; the scan reuses the lengths
    let lengths: Vec<f64> = pool.install(|| {
        grid.par_iter()
            .map(|&d| clairaut_distance(&metric, d).map(|s| s.length))
            .collect::<cusplab::Result<Vec<_>>>()
    })?;
    let scan = deviation_scan_from(&metric, &grid, &lengths)?;
    let rows: Vec<Vec<String>> = scan
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_float(r.d),
                fmt_float(r.length),
                fmt_float(r.model),
                fmt_float(r.deviation),
            ]
        })
        .collect();
    let csv = csv_document(&["D", "length", "model", "deviation"], &rows);
    write_artifact(&out.join("geodesic_check.csv"), &csv)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "geodesic-check",
        "max_dev": scan.summary.max_dev,
        "growth_ratio": scan.summary.growth_ratio,
        "bounded": scan.summary.bounded,
    });
    write_artifact(
        &out.join("geodesic_check.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(ExitCode::SUCCESS)
}

fn parabolic_series_cmd(
    cfg: &RunConfig,
    out: &Path,
    s: f64,
    rank: usize,
    a: Option<f64>,
) -> anyhow::Result<ExitCode> {
    let mut metric = cfg.metric()?;
    if let Some(a) = a {
        metric = metric.with_a(a);
    }
    let est = parabolic_series(&metric, rank, s, cfg.solver.series_m)?;
    let header = json!({
        "schema_version": SCHEMA_VERSION,
        "series": "parabolic",
        "rank": rank,
        "a": metric.a,
        "m": est.truncation,
        "profile": profile_kv_block(&metric).trim(),
    });
    let rows = vec![vec![
        fmt_float(est.exponent_in),
        fmt_float(est.partial_sum),
        fmt_float(est.tail_bound),
        verdict_str(est.verdict).to_string(),
    ]];
    let csv = format!(
        "# {header}\n{}",
        csv_document(&["s", "partial_sum", "tail_bound", "verdict"], &rows)
    );
    write_artifact(&out.join("parabolic_series.csv"), &csv)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "parabolic-series",
        "s": s,
        "rank": rank,
        "partial_sum": est.partial_sum,
        "tail_bound": if est.tail_bound.is_finite() { json!(est.tail_bound) } else { json!("inf") },
        "total_estimate": if est.total_estimate().is_finite() { json!(est.total_estimate()) } else { json!("inf") },
        "verdict": verdict_str(est.verdict),
    });
    write_artifact(
        &out.join("parabolic_series.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(exit_for(est.verdict))
}

fn group_series_cmd(
    cfg: &RunConfig,
    out: &Path,
    s: f64,
    k_syllables: usize,
    m: usize,
    a: Option<f64>,
) -> anyhow::Result<ExitCode> {
    let (mut model, h_power) = cfg.calibrated_model()?;
    if let Some(a) = a {
        model = model.at_a(a);
    }
    let g = group_series(&model, s, k_syllables, m)?;
    let est = g.estimate;
    let header = json!({
        "schema_version": SCHEMA_VERSION,
        "series": "group",
        "a": model.metric.a,
        "s_p": model.s_p,
        "l_h": model.l_h,
        "c": model.c,
        "h_power": h_power,
        "k_syllables": k_syllables,
        "m": m,
    });
    let rows = vec![vec![
        fmt_float(s),
        fmt_float(est.partial_sum),
        fmt_float(est.tail_bound),
        verdict_str(est.verdict).to_string(),
    ]];
    let csv = format!(
        "# {header}\n{}",
        csv_document(&["s", "partial_sum", "tail_bound", "verdict"], &rows)
    );
    write_artifact(&out.join("group_series.csv"), &csv)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "group-series",
        "s": s,
        "direct": g.direct,
        "formula": g.formula,
        "pair_ratio": if g.pair_ratio.is_finite() { json!(g.pair_ratio) } else { json!("inf") },
        "verdict": verdict_str(est.verdict),
    });
    write_artifact(
        &out.join("group_series.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(exit_for(est.verdict))
}

fn rho_cmd(
    cfg: &RunConfig,
    out: &Path,
    a: f64,
    s: f64,
    level: u8,
    dump_matrix: bool,
) -> anyhow::Result<ExitCode> {
    let (model, h_power) = cfg.calibrated_model()?;
    let matrix = match level {
        0 => build_level0(&model, a, s, cfg.solver.series_m)?,
        1 => build_level1(&model, a, s, cfg.solver.depth, cfg.solver.exp_m)?,
        other => anyhow::bail!("level must be 0 or 1, got {other}"),
    };
    if dump_matrix {
        let mut rows = Vec::new();
        for r in 0..matrix.n {
            for c in 0..matrix.n {
                let v = matrix.entries[r * matrix.n + c];
                if v != 0.0 {
                    rows.push(vec![r.to_string(), c.to_string(), fmt_float(v)]);
                }
            }
        }
        write_artifact(
            &out.join("transfer_matrix.csv"),
            &csv_document(&["row", "col", "value"], &rows),
        )?;
    }
    let summary = if matrix.infinite {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": "rho",
            "a": a, "s": s, "level": level,
            "rho": "inf",
            "residual": null,
            "iterations": 0,
            "states": matrix.n,
            "h_power": h_power,
        })
    } else {
        let sp = power_iterate(&matrix, if level == 0 { 1e-6 } else { 1e-5 }, 100_000)?;
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": "rho",
            "a": a, "s": s, "level": level,
            "rho": sp.rho,
            "residual": sp.residual,
            "iterations": sp.iterations,
            "states": matrix.n,
            "h_power": h_power,
        })
    };
    write_artifact(&out.join("rho.json"), &format!("{}\n", with_provenance(cfg, &summary)))?;
    emit(&summary);
    Ok(ExitCode::SUCCESS)
}

fn rho_log_csv(solver: &Solver) -> String {
    let rows: Vec<Vec<String>> = solver
        .take_log()
        .iter()
        .map(|r| vec![fmt_float(r.a), fmt_float(r.s), fmt_float(r.rho)])
        .collect();
    csv_document(&["a", "s", "rho"], &rows)
}

fn find_delta_cmd(cfg: &RunConfig, out: &Path, a: f64) -> anyhow::Result<ExitCode> {
    let (model, h_power) = cfg.calibrated_model()?;
    let solver = Solver::new(model, cfg.solver.series_m);
    let delta = solver.find_delta(a)?;
    write_artifact(&out.join("rho_log.csv"), &rho_log_csv(&solver))?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "find-delta",
        "a": a,
        "delta": delta,
        "h_power": h_power,
    });
    write_artifact(
        &out.join("find_delta.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(ExitCode::SUCCESS)
}

fn find_astar_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<ExitCode> {
    let (model, h_power) = cfg.calibrated_model()?;
    let solver = Solver::new(model, cfg.solver.series_m);
    let a_star = solver.find_a_star(cfg.solver.a_max)?;
    let rho = solver
        .rho(a_star, 0.5)
        .finite()
        .unwrap_or(f64::INFINITY);
    write_artifact(&out.join("rho_log.csv"), &rho_log_csv(&solver))?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "find-astar",
        "a_star": a_star,
        "rho_at_half": rho,
        "h_power": h_power,
    });
    write_artifact(
        &out.join("find_astar.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(ExitCode::SUCCESS)
}

fn monotonicity_cmd(
    cfg: &RunConfig,
    out: &Path,
    a: f64,
    a_prime: f64,
    k_max: usize,
) -> anyhow::Result<ExitCode> {
    let (model, _) = cfg.calibrated_model()?;
    let solver = Solver::new(model, cfg.solver.series_m);
    let (c_emp, rho_emp) = solver.monotonicity_certificate(a, a_prime, k_max)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "monotonicity",
        "a": a,
        "a_prime": a_prime,
        "c_emp": c_emp,
        "rho_emp": rho_emp,
    });
    write_artifact(
        &out.join("monotonicity.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(ExitCode::SUCCESS)
}

fn regime_fields(r: &Regime) -> serde_json::Value {
    json!({
        "a": r.a,
        "alpha": r.alpha,
        "delta": r.delta,
        "rho_at_half": if r.rho_at_half.is_finite() { json!(r.rho_at_half) } else { json!("inf") },
        "type": match r.regime_type {
            RegimeType::Convergent => "convergent",
            RegimeType::Divergent => "divergent",
            RegimeType::Undecided => "undecided",
        },
        "pgc": match r.pgc {
            PgcStatus::Holds => "holds",
            PgcStatus::Fails => "fails",
            PgcStatus::Undecided => "undecided",
        },
        "ps_measure": match r.ps_measure {
            MeasureStatus::Finite => "finite",
            MeasureStatus::Infinite => "infinite",
            MeasureStatus::NotApplicable => "n/a",
            MeasureStatus::Undecided => "undecided",
        },
    })
}

fn regime_csv_row(r: &Regime) -> Vec<String> {
    let fields = regime_fields(r);
    vec![
        fmt_float(r.a),
        fmt_float(r.alpha),
        fmt_float(r.delta),
        fmt_float(r.rho_at_half),
        fields["type"].as_str().unwrap().to_string(),
        fields["pgc"].as_str().unwrap().to_string(),
        fields["ps_measure"].as_str().unwrap().to_string(),
    ]
}

const REGIME_HEADER: [&str; 7] = ["a", "alpha", "delta", "rho_at_half", "type", "pgc", "ps_measure"];

fn classify_cmd(cfg: &RunConfig, out: &Path, a_arg: &str) -> anyhow::Result<ExitCode> {
    let (model, h_power) = cfg.calibrated_model()?;
    let solver = Solver::new(model, cfg.solver.series_m);
    let a = if a_arg == "auto" {
        solver.find_a_star(cfg.solver.a_max)?
    } else {
        a_arg
            .parse::<f64>()
            .with_context(|| format!("--a must be a number or \"auto\", got {a_arg:?}"))?
    };
    let (report, alt) = solver.classify_bracket(a)?;
    // regime verdicts across the defect bracket must agree
    let mut undecided = report.undecided();
    if let Some(other) = &alt {
        if other.regime_type != report.regime_type
            || other.pgc != report.pgc
            || other.ps_measure != report.ps_measure
        {
            undecided = true;
        }
    }
    let mut rows = vec![regime_csv_row(&report)];
    if let Some(other) = &alt {
        rows.push(regime_csv_row(other));
    }
    write_artifact(
        &out.join("regimes.csv"),
        &csv_document(&REGIME_HEADER, &rows),
    )?;
    write_artifact(&out.join("rho_log.csv"), &rho_log_csv(&solver))?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "report": regime_fields(&report),
        "defect_bracket": alt.as_ref().map(regime_fields),
        "h_power": h_power,
        "undecided": undecided,
    });
    write_artifact(
        &out.join("classify.json"),
        &format!("{}\n", with_provenance(cfg, &summary)),
    )?;
    emit(&summary);
    Ok(if undecided {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn atlas_cmd(cfg: &RunConfig, out: &Path, pool: &rayon::ThreadPool) -> anyhow::Result<ExitCode> {
    let (model, h_power) = cfg.calibrated_model()?;
    let solver = Solver::new(model, cfg.solver.series_m);
    let a_star = solver.find_a_star(cfg.solver.a_max)?;
    // grid spanning all three regimes, with the critical depth pinned exactly
    let n = cfg.solver.a_grid_points.max(3);
    let hi = (2.0 * a_star).max(a_star + 17.0);
    let mut grid: Vec<f64> = (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect();
    grid.push(a_star);
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let reports: Vec<Regime> = pool.install(|| {
        grid.par_iter()
            .map(|&a| {
                let local = Solver::new(model, cfg.solver.series_m);
                local.classify(a)
            })
            .collect::<cusplab::Result<Vec<_>>>()
    })?;
    let rows: Vec<Vec<String>> = reports.iter().map(regime_csv_row).collect();
    write_artifact(
        &out.join("regime_atlas.csv"),
        &csv_document(&REGIME_HEADER, &rows),
    )?;
    write_artifact(&out.join("rho_log.csv"), &rho_log_csv(&solver))?;
    let undecided = reports.iter().filter(|r| r.undecided()).count();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "atlas",
        "a_star": a_star,
        "rows": reports.len(),
        "undecided_rows": undecided,
        "h_power": h_power,
    });
    write_artifact(&out.join("atlas.json"), &format!("{}\n", with_provenance(cfg, &summary)))?;
    emit(&summary);
    Ok(if undecided > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}
