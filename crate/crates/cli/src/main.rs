//! Command line driver. Every subcommand reads its parameters from flags,
//! falls back to a flat `key=value` config file, then to built in
//! defaults, and emits one JSON or CSV report.
//!
//! Exit codes: 0 success, 2 invalid configuration or unparsable input,
//! 3 the requested quantity does not exist for the given weight (diverging
//! moments, undecidable tails, violated scale hypotheses), 4 the moment
//! budget `--nmax` is too small with the failing recursion level named,
//! 5 a singular observability result under `--require-positive`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use funiq_core::covers::{
    check_cover, greedy_short_cover, regularize_cover, sparsity_estimate, CoverError,
    CoverFamily, GammaDensePlacement,
};
use funiq_core::intervals::{IntervalError, IntervalSet};
use funiq_core::quasianalytic::{default_a, pls_constant, LogScale, QuasiError};
use funiq_core::verify::{
    cantor_mask, gamma_dense_mask, observability_constant, paley_wiener_profile, weighted_energy,
    SigmaMethod, VerifyError,
};
use funiq_core::weights::{MomentSequence, PlsClass, Weight, WeightError};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((output, code)) => {
            if let Err(e) = emit(cli.out.as_deref(), &output) {
                eprintln!("funiq: {e}");
                std::process::exit(2);
            }
            std::process::exit(code);
        }
        Err(f) => {
            eprintln!("funiq: {}", f.msg);
            std::process::exit(f.code);
        }
    }
}

fn emit(out: Option<&Path>, output: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, output),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- errors

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn new(code: i32, msg: impl Into<String>) -> Self {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

type CmdResult<T> = Result<T, Failure>;

impl From<WeightError> for Failure {
    fn from(e: WeightError) -> Self {
        let code = match &e {
            WeightError::InvalidParam(_) => 2,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<QuasiError> for Failure {
    fn from(e: QuasiError) -> Self {
        let code = match &e {
            QuasiError::InvalidParam(_) => 2,
            QuasiError::ExceedsNMax { .. } => 4,
            QuasiError::InvalidWeight => 3,
            QuasiError::Weight(WeightError::InvalidParam(_)) => 2,
            QuasiError::Weight(_) => 3,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Self {
        let code = match &e {
            CoverError::InvalidParam(_) => 2,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        let code = match &e {
            VerifyError::InvalidParam(_) => 2,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<IntervalError> for Failure {
    fn from(e: IntervalError) -> Self {
        Failure::new(2, e.to_string())
    }
}

// ------------------------------------------------------------------- cli

#[derive(Parser)]
#[command(
    name = "funiq",
    version,
    about = "Weight reports, short covers, and observability experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Flat key=value file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Log moments, ratio sums, and the divergence class of a weight.
    WeightReport(WeightReportArgs),
    /// Uniqueness constant for a weight whose logarithmic integral diverges.
    PlsConstant(PlsConstantArgs),
    /// Greedy and regularized short covers of an interval set.
    Cover(CoverArgs),
    /// Shift sampled lower bound for the weighted cover norm.
    Sparsity(SparsityArgs),
    /// Observability sweep over Cantor spectra and gamma dense samples.
    FupExperiment(FupArgs),
    /// Spectral profile with prescribed decay and compact spatial support.
    PaleyWiener(PaleyWienerArgs),
}

#[derive(Args)]
struct WeightReportArgs {
    /// band:EDGE | powerexp:C,ALPHA | endpoint:DELTA,C | tabulated:PATH[,slope=K]
    #[arg(long)]
    weight: Option<String>,
    /// Largest moment order to report.
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Args)]
struct PlsConstantArgs {
    #[arg(long)]
    weight: Option<String>,
    /// Dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Density ratio of the sampling set, in (0, 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Admissible spectral norm ratio, at least 1.
    #[arg(long)]
    cw: Option<f64>,
    /// Scale parameter of the moment tilt; defaults per dimension.
    #[arg(long = "A")]
    a: Option<f64>,
    /// Moment budget.
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    weight: Option<String>,
    /// Interval file, one "a b" pair per line, '#' comments.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Extra shifts for the sparsity sample, comma separated.
    #[arg(long)]
    shifts: Option<String>,
}

#[derive(Args)]
struct SparsityArgs {
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long)]
    shifts: Option<String>,
}

#[derive(Args)]
struct FupArgs {
    /// cantor: sweep spectra 3^kmin ..= 3^kmax; single: one frequency row.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    base: Option<u32>,
    /// Allowed digits of the spectrum mask, comma separated.
    #[arg(long)]
    digits: Option<String>,
    #[arg(long)]
    kmin: Option<u32>,
    #[arg(long)]
    kmax: Option<u32>,
    /// Samples per unit cell of the gamma dense space mask.
    #[arg(long)]
    block: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    /// left | random
    #[arg(long)]
    placement: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// full | iterative | both
    #[arg(long)]
    method: Option<String>,
    /// Exit 5 when any row comes out singular.
    #[arg(long = "require-positive")]
    require_positive: bool,
    /// Grid size for single mode.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Frequency for single mode.
    #[arg(long)]
    freq: Option<usize>,
    /// Space mask stride for single mode.
    #[arg(long)]
    step: Option<usize>,
}

#[derive(Args)]
struct PaleyWienerArgs {
    #[arg(long)]
    weight: Option<String>,
    /// Spatial support radius budget; the profile fits inside three of it.
    #[arg(long)]
    eps: Option<f64>,
    /// First tail factor index.
    #[arg(long)]
    n0: Option<usize>,
    /// Moment budget.
    #[arg(long)]
    nmax: Option<usize>,
    /// Half width of the reported frequency grid.
    #[arg(long = "xi-max")]
    xi_max: Option<f64>,
    /// Grid size; odd values center the grid on zero.
    #[arg(long)]
    points: Option<usize>,
}

// ---------------------------------------------------------------- config

struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> CmdResult<Self> {
        let mut map = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Config(map));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::new(2, format!("config {}: {e}", path.display())))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Failure::new(
                    2,
                    format!("config line {}: expected key=value, got {raw:?}", i + 1),
                ));
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Config(map))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }
}

fn resolve<T>(flag: Option<T>, cfg: &Config, key: &str, default: T) -> CmdResult<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => match cfg.get(key) {
            Some(s) => s
                .parse()
                .map_err(|e| Failure::new(2, format!("config {key} = {s}: {e}"))),
            None => Ok(default),
        },
    }
}

fn resolve_required_str(flag: Option<String>, cfg: &Config, key: &str) -> CmdResult<String> {
    flag.or_else(|| cfg.get(key).map(str::to_string))
        .ok_or_else(|| Failure::new(2, format!("missing required --{key}")))
}

fn resolve_flag(flag: bool, cfg: &Config, key: &str) -> CmdResult<bool> {
    if flag {
        return Ok(true);
    }
    match cfg.get(key) {
        Some(s) => s
            .parse()
            .map_err(|e| Failure::new(2, format!("config {key} = {s}: {e}"))),
        None => Ok(false),
    }
}

// ------------------------------------------------------------- grammars

fn parse_weight(spec: &str) -> CmdResult<Weight> {
    let (family, params) = spec
        .split_once(':')
        .ok_or_else(|| Failure::new(2, format!("weight {spec:?}: expected FAMILY:PARAMS")))?;
    let nums = |s: &str, want: usize| -> CmdResult<Vec<f64>> {
        let vals: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|e| Failure::new(2, format!("weight {spec:?}: {e}")))
            })
            .collect::<CmdResult<_>>()?;
        if vals.len() != want {
            return Err(Failure::new(
                2,
                format!("weight {spec:?}: expected {want} parameters"),
            ));
        }
        Ok(vals)
    };
    let w = match family {
        "band" => Weight::band_limit(nums(params, 1)?[0])?,
        "powerexp" => {
            let v = nums(params, 2)?;
            Weight::power_exp(v[0], v[1])?
        }
        "endpoint" => {
            let v = nums(params, 2)?;
            Weight::end_point(v[0], v[1])?
        }
        "tabulated" => {
            let mut parts = params.split(',');
            let path = parts.next().unwrap_or("").trim();
            if path.is_empty() {
                return Err(Failure::new(2, format!("weight {spec:?}: missing knot file")));
            }
            let mut slope = None;
            for extra in parts {
                let extra = extra.trim();
                match extra.split_once('=') {
                    Some(("slope", v)) => {
                        slope = Some(v.trim().parse().map_err(|e| {
                            Failure::new(2, format!("weight {spec:?}: slope: {e}"))
                        })?);
                    }
                    _ => {
                        return Err(Failure::new(
                            2,
                            format!("weight {spec:?}: unknown option {extra:?}"),
                        ))
                    }
                }
            }
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::new(2, format!("knot file {path}: {e}")))?;
            Weight::tabulated(parse_pairs(&text)?, slope)?
        }
        other => {
            return Err(Failure::new(2, format!("unknown weight family {other:?}")));
        }
    };
    Ok(w)
}

fn parse_pairs(text: &str) -> CmdResult<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Failure::new(
                2,
                format!("line {}: expected two numbers, got {raw:?}", i + 1),
            ));
        };
        let a: f64 = a
            .parse()
            .map_err(|e| Failure::new(2, format!("line {}: {e}", i + 1)))?;
        let b: f64 = b
            .parse()
            .map_err(|e| Failure::new(2, format!("line {}: {e}", i + 1)))?;
        pairs.push((a, b));
    }
    Ok(pairs)
}

fn parse_floats(s: &str) -> CmdResult<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|e| Failure::new(2, format!("shift list: {e}")))
        })
        .collect()
}

fn weight_label(w: &Weight) -> String {
    match w {
        Weight::BandLimit { edge } => format!("band:{edge}"),
        Weight::PowerExp { c, alpha } => format!("powerexp:{c},{alpha}"),
        Weight::EndPoint { delta, c } => format!("endpoint:{delta},{c}"),
        Weight::Tabulated { knots, slope } => match slope {
            Some(k) => format!("tabulated[{} knots, slope {k}]", knots.len()),
            None => format!("tabulated[{} knots]", knots.len()),
        },
    }
}

fn read_target(path: &Path) -> CmdResult<IntervalSet> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("target {}: {e}", path.display())))?;
    Ok(IntervalSet::from_text(&text)?)
}

// --------------------------------------------------------------- output

#[derive(Serialize, Clone, Copy)]
struct LogRecord {
    log_value: f64,
    nesting_flag: bool,
}

impl From<LogScale> for LogRecord {
    fn from(v: LogScale) -> Self {
        LogRecord {
            log_value: v.raw_log(),
            nesting_flag: v.is_nested(),
        }
    }
}

fn to_json<T: Serialize>(report: &T) -> CmdResult<String> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::new(2, format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn fin(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn class_name(c: PlsClass) -> &'static str {
    match c {
        PlsClass::Holds => "holds",
        PlsClass::Fails => "fails",
        PlsClass::Undecidable => "undecidable",
    }
}

// ------------------------------------------------------------- commands

fn run(cli: &Cli) -> CmdResult<(String, i32)> {
    let cfg = Config::load(cli.config.as_deref())?;
    let format = match cli.format {
        Some(f) => f,
        None => match cfg.get("format") {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => {
                return Err(Failure::new(2, format!("config format = {other:?}")));
            }
            None => Format::Json,
        },
    };
    match &cli.cmd {
        Cmd::WeightReport(a) => cmd_weight_report(a, &cfg, format),
        Cmd::PlsConstant(a) => cmd_pls_constant(a, &cfg, format),
        Cmd::Cover(a) => cmd_cover(a, &cfg, format),
        Cmd::Sparsity(a) => cmd_sparsity(a, &cfg, format),
        Cmd::FupExperiment(a) => cmd_fup_experiment(a, &cfg, format),
        Cmd::PaleyWiener(a) => cmd_paley_wiener(a, &cfg, format),
    }
}

#[derive(Serialize)]
struct WeightReport {
    schema: &'static str,
    family: String,
    pls_classification: &'static str,
    n_max: usize,
    /// Envelope log moments `0 ..= n_reached`.
    log_moments: Vec<f64>,
    /// Successive envelope ratios `1 ..= n_reached`.
    mu: Vec<f64>,
    /// First order whose raw moment diverges, when the budget hit one.
    divergent_from: Option<usize>,
    ratio_sum: Option<f64>,
    /// Null when the integral diverges or is undecidable.
    log_integral: Option<f64>,
    /// `integral - ratio_sum` and `ratio_sum + 1 - integral`, both
    /// nonnegative when every quantity is finite and complete.
    sandwich_lower_residual: Option<f64>,
    sandwich_upper_residual: Option<f64>,
    doubling_constant: Option<f64>,
}

fn cmd_weight_report(
    args: &WeightReportArgs,
    cfg: &Config,
    format: Format,
) -> CmdResult<(String, i32)> {
    let w = parse_weight(&resolve_required_str(args.weight.clone(), cfg, "weight")?)?;
    let n_max = resolve(args.nmax, cfg, "nmax", 10usize)?;

    let (log_moments, mu, divergent_from) = match w.moment_sequence(n_max) {
        Ok(seq) => (
            (0..=seq.n_max()).map(|n| seq.log_moment(n)).collect(),
            (1..=seq.n_max()).map(|n| seq.mu(n)).collect(),
            None,
        ),
        Err(WeightError::Divergent { n }) if n >= 2 => {
            let seq = w.moment_sequence(n - 1)?;
            (
                (0..=seq.n_max()).map(|n| seq.log_moment(n)).collect(),
                (1..=seq.n_max()).map(|n| seq.mu(n)).collect(),
                Some(n),
            )
        }
        Err(WeightError::Divergent { n }) => {
            (vec![w.log_moment(0)?.max(0.0)], Vec::new(), Some(n))
        }
        Err(e) => return Err(e.into()),
    };
    let log_moments: Vec<f64> = log_moments;
    let mu: Vec<f64> = mu;
    let class = w.pls_classify();
    let integral = match w.log_integral() {
        Ok(v) => fin(v),
        Err(WeightError::Undecidable) => None,
        Err(e) => return Err(e.into()),
    };
    let ratio_sum = divergent_from
        .is_none()
        .then(|| mu.iter().sum::<f64>());
    let report = WeightReport {
        schema: "funiq.weight-report.v1",
        family: weight_label(&w),
        pls_classification: class_name(class),
        n_max,
        log_moments,
        mu,
        divergent_from,
        ratio_sum,
        log_integral: integral,
        sandwich_lower_residual: match (integral, ratio_sum) {
            (Some(i), Some(s)) => Some(i - s),
            _ => None,
        },
        sandwich_upper_residual: match (integral, ratio_sum) {
            (Some(i), Some(s)) => Some(s + 1.0 - i),
            _ => None,
        },
        doubling_constant: w.doubling_constant(),
    };
    let code = if divergent_from.is_some() || class == PlsClass::Undecidable {
        3
    } else {
        0
    };
    let output = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("n,log_moment,mu\n");
            for (n, lm) in report.log_moments.iter().enumerate() {
                if n == 0 {
                    let _ = writeln!(s, "0,{:.16e},", lm);
                } else {
                    let _ = writeln!(s, "{n},{:.16e},{:.16e}", lm, report.mu[n - 1]);
                }
            }
            s
        }
    };
    Ok((output, code))
}

#[derive(Serialize)]
struct PlsConstantReport {
    schema: &'static str,
    family: String,
    d: usize,
    gamma: f64,
    cw: f64,
    a_used: f64,
    n_max: usize,
    lambda: f64,
    bang_levels: Vec<usize>,
    log_theta: LogRecord,
    log_c: LogRecord,
}

fn cmd_pls_constant(
    args: &PlsConstantArgs,
    cfg: &Config,
    format: Format,
) -> CmdResult<(String, i32)> {
    let w = parse_weight(&resolve_required_str(args.weight.clone(), cfg, "weight")?)?;
    let d = resolve(args.d, cfg, "d", 1usize)?;
    let gamma = resolve(args.gamma, cfg, "gamma", 0.5f64)?;
    let cw = resolve(args.cw, cfg, "cw", 1.0f64)?;
    let a = resolve(args.a, cfg, "A", default_a(d.max(1)))?;
    let n_max = resolve(args.nmax, cfg, "nmax", 4000usize)?;

    let p = pls_constant(&w, d, cw, gamma, a, n_max)?;
    let report = PlsConstantReport {
        schema: "funiq.pls-constant.v1",
        family: weight_label(&w),
        d,
        gamma,
        cw,
        a_used: p.a,
        n_max,
        lambda: p.lambda,
        bang_levels: p.bang_levels.clone(),
        log_theta: p.log_theta.into(),
        log_c: p.log_c.into(),
    };
    let output = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from(
                "d,gamma,cw,a,n_max,lambda,log_c,log_c_nested,log_theta,log_theta_nested,bang_levels\n",
            );
            let levels: Vec<String> = report.bang_levels.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{},{:.16e},{},{}",
                report.d,
                report.gamma,
                report.cw,
                report.a_used,
                report.n_max,
                report.lambda,
                report.log_c.log_value,
                report.log_c.nesting_flag,
                report.log_theta.log_value,
                report.log_theta.nesting_flag,
                levels.join(";"),
            );
            s
        }
    };
    Ok((output, 0))
}

#[derive(Serialize)]
struct ScaleRecord {
    n: u32,
    omega: f64,
    intervals: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct CoverRecord {
    norm: f64,
    total_intervals: usize,
    scales: Vec<ScaleRecord>,
}

impl From<&CoverFamily> for CoverRecord {
    fn from(f: &CoverFamily) -> Self {
        CoverRecord {
            norm: f.norm,
            total_intervals: f.total_intervals(),
            scales: f
                .scales
                .iter()
                .map(|(&n, sc)| ScaleRecord {
                    n,
                    omega: sc.omega,
                    intervals: sc.intervals.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct SparsityRecord {
    value: f64,
    shift: f64,
    status: &'static str,
    shifts_sampled: usize,
}

#[derive(Serialize)]
struct CoverReport {
    schema: &'static str,
    family: String,
    target_components: usize,
    target_measure: f64,
    greedy: CoverRecord,
    regular: CoverRecord,
    /// Regularized interval count stays within seven fold of the greedy
    /// one at every scale.
    seven_fold_card_bound: bool,
    sparsity: SparsityRecord,
}

fn cover_csv(kind: &str, family: &CoverFamily, s: &mut String) {
    for (&n, sc) in &family.scales {
        for (a, b) in &sc.intervals {
            let _ = writeln!(s, "{kind},{n},{:.16e},{:.16e},{:.16e}", sc.omega, a, b);
        }
    }
}

fn cmd_cover(args: &CoverArgs, cfg: &Config, format: Format) -> CmdResult<(String, i32)> {
    let w = parse_weight(&resolve_required_str(args.weight.clone(), cfg, "weight")?)?;
    let target_path = resolve_required_str(
        args.target.as_ref().map(|p| p.display().to_string()),
        cfg,
        "target",
    )?;
    let target = read_target(Path::new(&target_path))?;
    let shifts = parse_floats(&resolve(args.shifts.clone(), cfg, "shifts", String::new())?)?;

    let greedy = greedy_short_cover(&target, &w)?;
    check_cover(&greedy, &target, &w)?;
    let regular = regularize_cover(&target, &w)?;
    check_cover(&regular, &target, &w)?;
    let seven_fold = regular.scales.iter().all(|(n, sc)| {
        greedy
            .scales
            .get(n)
            .is_some_and(|g| sc.intervals.len() <= 7 * g.intervals.len())
    });
    let sparsity = sparsity_estimate(&target, &w, &shifts)?;
    let shifts_sampled = if target.is_empty() {
        1
    } else {
        1 + 2 * target.len() + shifts.len()
    };

    let report = CoverReport {
        schema: "funiq.cover.v1",
        family: weight_label(&w),
        target_components: target.len(),
        target_measure: target.measure(),
        greedy: (&greedy).into(),
        regular: (&regular).into(),
        seven_fold_card_bound: seven_fold,
        sparsity: SparsityRecord {
            value: sparsity.value,
            shift: sparsity.shift,
            status: "LOWER_BOUND",
            shifts_sampled,
        },
    };
    let output = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("kind,n,omega,a,b\n");
            cover_csv("greedy", &greedy, &mut s);
            cover_csv("regular", &regular, &mut s);
            s
        }
    };
    Ok((output, 0))
}

#[derive(Serialize)]
struct SparsityReport {
    schema: &'static str,
    family: String,
    target_components: usize,
    value: f64,
    shift: f64,
    status: &'static str,
    shifts_sampled: usize,
}

fn cmd_sparsity(args: &SparsityArgs, cfg: &Config, format: Format) -> CmdResult<(String, i32)> {
    let w = parse_weight(&resolve_required_str(args.weight.clone(), cfg, "weight")?)?;
    let target_path = resolve_required_str(
        args.target.as_ref().map(|p| p.display().to_string()),
        cfg,
        "target",
    )?;
    let target = read_target(Path::new(&target_path))?;
    let shifts = parse_floats(&resolve(args.shifts.clone(), cfg, "shifts", String::new())?)?;
    let est = sparsity_estimate(&target, &w, &shifts)?;
    let report = SparsityReport {
        schema: "funiq.sparsity.v1",
        family: weight_label(&w),
        target_components: target.len(),
        value: est.value,
        shift: est.shift,
        status: "LOWER_BOUND",
        shifts_sampled: if target.is_empty() {
            1
        } else {
            1 + 2 * target.len() + shifts.len()
        },
    };
    let output = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("value,shift,status,shifts_sampled\n");
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{},{}",
                report.value, report.shift, report.status, report.shifts_sampled
            );
            s
        }
    };
    Ok((output, 0))
}

#[derive(Serialize, Clone)]
struct FupRow {
    n: usize,
    card_q: usize,
    card_e: usize,
    sigma_min: f64,
    /// `1 / sigma_min`; null (JSON) or inf (CSV) on singular rows.
    recovery_constant: f64,
    method: &'static str,
    seed: u64,
    /// JSON only; the CSV stays byte identical across reruns.
    wall_time_ms: f64,
}

#[derive(Serialize)]
struct FupReport {
    schema: &'static str,
    mode: String,
    rows: Vec<FupRow>,
}

fn method_name(m: SigmaMethod) -> &'static str {
    match m {
        SigmaMethod::FullSvd => "full",
        SigmaMethod::Iterative => "iterative",
    }
}

fn parse_methods(s: &str) -> CmdResult<Vec<SigmaMethod>> {
    match s {
        "full" => Ok(vec![SigmaMethod::FullSvd]),
        "iterative" => Ok(vec![SigmaMethod::Iterative]),
        "both" => Ok(vec![SigmaMethod::FullSvd, SigmaMethod::Iterative]),
        other => Err(Failure::new(2, format!("unknown method {other:?}"))),
    }
}

fn fup_row(
    n: usize,
    freqs: &[usize],
    space: &[usize],
    method: SigmaMethod,
    seed: u64,
) -> CmdResult<FupRow> {
    let started = Instant::now();
    let obs = observability_constant(n, freqs, space, method)?;
    let recovery = if obs.singular {
        f64::INFINITY
    } else {
        1.0 / obs.sigma_min
    };
    Ok(FupRow {
        n,
        card_q: freqs.len(),
        card_e: space.len(),
        sigma_min: obs.sigma_min,
        recovery_constant: recovery,
        method: method_name(method),
        seed,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn cmd_fup_experiment(args: &FupArgs, cfg: &Config, format: Format) -> CmdResult<(String, i32)> {
    let mode = resolve(args.mode.clone(), cfg, "mode", "cantor".to_string())?;
    let seed = resolve(args.seed, cfg, "seed", 1u64)?;
    let methods = parse_methods(&resolve(
        args.method.clone(),
        cfg,
        "method",
        "iterative".to_string(),
    )?)?;
    let require_positive = resolve_flag(args.require_positive, cfg, "require-positive")?;

    let rows: Vec<FupRow> = match mode.as_str() {
        "cantor" => {
            let base = resolve(args.base, cfg, "base", 3u32)?;
            let digits: Vec<u32> = resolve(args.digits.clone(), cfg, "digits", "0,2".to_string())?
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|e| Failure::new(2, format!("digit list: {e}")))
                })
                .collect::<CmdResult<_>>()?;
            let kmin = resolve(args.kmin, cfg, "kmin", 3u32)?;
            let kmax = resolve(args.kmax, cfg, "kmax", 6u32)?;
            if kmin > kmax {
                return Err(Failure::new(2, format!("kmin {kmin} above kmax {kmax}")));
            }
            let block = resolve(args.block, cfg, "block", 27usize)?;
            let gamma = resolve(args.gamma, cfg, "gamma", 0.5f64)?;
            let placement = resolve(args.placement.clone(), cfg, "placement", "random".to_string())?;

            let mut jobs = Vec::new();
            for k in kmin..=kmax {
                let n = (base as usize)
                    .checked_pow(k)
                    .ok_or_else(|| Failure::new(2, format!("base^{k} overflows")))?;
                if n % block != 0 {
                    return Err(Failure::new(
                        2,
                        format!("block {block} does not divide N = {n}"),
                    ));
                }
                let freqs: Vec<usize> = cantor_mask(base, &digits, k)?
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &b)| b.then_some(i))
                    .collect();
                let pl = match placement.as_str() {
                    "left" => GammaDensePlacement::Left,
                    "random" => GammaDensePlacement::Random(seed),
                    other => {
                        return Err(Failure::new(2, format!("unknown placement {other:?}")))
                    }
                };
                let space: Vec<usize> = gamma_dense_mask(gamma, block, n / block, pl)?
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &b)| b.then_some(i))
                    .collect();
                for &m in &methods {
                    jobs.push((n, freqs.clone(), space.clone(), m));
                }
            }
            let mut rows = jobs
                .into_par_iter()
                .map(|(n, freqs, space, m)| fup_row(n, &freqs, &space, m, seed))
                .collect::<CmdResult<Vec<_>>>()?;
            rows.sort_by_key(|r| (r.n, r.method));
            rows
        }
        "single" => {
            let n = resolve(args.n, cfg, "N", 256usize)?;
            let freq = resolve(args.freq, cfg, "freq", 1usize)?;
            let step = resolve(args.step, cfg, "step", 3usize)?;
            if step == 0 {
                return Err(Failure::new(2, "step must be positive".to_string()));
            }
            let space: Vec<usize> = (0..n).step_by(step).collect();
            methods
                .iter()
                .map(|&m| fup_row(n, &[freq], &space, m, seed))
                .collect::<CmdResult<Vec<_>>>()?
        }
        other => return Err(Failure::new(2, format!("unknown mode {other:?}"))),
    };

    let singular = rows.iter().any(|r| !r.sigma_min.is_finite() || r.sigma_min <= 0.0);
    let code = if singular && require_positive { 5 } else { 0 };
    let output = match format {
        Format::Json => {
            let report = FupReport {
                schema: "funiq.fup-experiment.v1",
                mode,
                rows,
            };
            to_json(&report)?
        }
        Format::Csv => {
            let mut s = String::from("N,card_q,card_e,sigma_min,recovery_constant,method,seed\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{:.16e},{:.16e},{},{}",
                    r.n, r.card_q, r.card_e, r.sigma_min, r.recovery_constant, r.method, r.seed
                );
            }
            s
        }
    };
    Ok((output, code))
}

#[derive(Serialize)]
struct PaleyWienerReport {
    schema: &'static str,
    family: String,
    eps: f64,
    n0: usize,
    n_max: usize,
    /// The profile vanishes outside three times `eps`.
    support_radius: f64,
    log_amplitude: f64,
    mu_tail_sum: f64,
    log_tail_bound_at_edge: f64,
    energy: f64,
    weighted_energy: Option<f64>,
    xi: Vec<f64>,
    values: Vec<f64>,
}

fn cmd_paley_wiener(
    args: &PaleyWienerArgs,
    cfg: &Config,
    format: Format,
) -> CmdResult<(String, i32)> {
    let w = parse_weight(&resolve_required_str(args.weight.clone(), cfg, "weight")?)?;
    let eps = resolve(args.eps, cfg, "eps", 0.1f64)?;
    let n0 = resolve(args.n0, cfg, "n0", 10usize)?;
    let n_max = resolve(args.nmax, cfg, "nmax", 60usize)?;
    let xi_max = resolve(args.xi_max, cfg, "xi-max", 16384.0f64)?;
    let points = resolve(args.points, cfg, "points", 4097usize)?;
    if points < 2 {
        return Err(Failure::new(2, "points must be at least 2".to_string()));
    }
    if !(xi_max > 0.0) || !xi_max.is_finite() {
        return Err(Failure::new(2, format!("xi-max = {xi_max} must be positive")));
    }

    let seq: MomentSequence = w.moment_sequence(n_max)?;
    let step = 2.0 * xi_max / (points - 1) as f64;
    let xi: Vec<f64> = (0..points).map(|i| -xi_max + step * i as f64).collect();
    let profile = paley_wiener_profile(&seq, eps, n0, &xi)?;
    let energy = weighted_energy(&xi, &profile.values, None)?;
    let weighted = weighted_energy(&xi, &profile.values, Some(&w))?;

    let report = PaleyWienerReport {
        schema: "funiq.paley-wiener.v1",
        family: weight_label(&w),
        eps,
        n0,
        n_max,
        support_radius: 3.0 * eps,
        log_amplitude: profile.log_amplitude,
        mu_tail_sum: profile.mu_tail.iter().sum(),
        log_tail_bound_at_edge: profile.log_tail_bound(xi_max),
        energy,
        weighted_energy: fin(weighted),
        xi,
        values: profile.values,
    };
    let output = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("xi,value\n");
            for (x, v) in report.xi.iter().zip(&report.values) {
                let _ = writeln!(s, "{:.16e},{:.16e}", x, v);
            }
            s
        }
    };
    Ok((output, 0))
}
