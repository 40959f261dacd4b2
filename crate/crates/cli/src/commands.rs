use std::str::FromStr;

use balanced_lab::epsilon::{
    self, balanced_verdict, default_region, epsilon_at, regular_quantization_scan, sample_pairs, BalancedVerdict,
    EpsilonMethod, EpsilonSample, VerdictOptions, NON_CERTIFYING,
};
use balanced_lab::geometry::{curvature_scan, volume_density, xw_grid, CURVATURE_STEP};
use balanced_lab::kernel::{self, estimate_gamma, KernelMethod, DEFAULT_K_MAX};
use balanced_lab::moments::{moment_table, MomentCache};
use balanced_lab::{Completeness, DomainPoint, Error, HartogsProfile, ProfileSource};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{load_config, parse_list, resolve_profile, FileConfig};
use crate::report::{nums, write_csv, write_json, Bound, Coords, Num, SCHEMA};
use crate::{Command, Common, Format, Method, MethodArgs, SamplingArgs};

pub const GAMMA_M_SET: [u32; 3] = [2, 3, 4];
pub const GAMMA_T_GRID: [f64; 3] = [0.25, 0.5, 1.0];
/// Largest γ residual accepted before the closed form is used.
pub const GAMMA_RESIDUAL_LIMIT: f64 = 1e-6;
const KAHLER_GRID: usize = 1000;
const COMPLETENESS_BUDGET: usize = 2_000_000;
const CURVATURE_TOLERANCE: f64 = 1e-3;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Input(m)
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    profile: HartogsProfile,
    file: FileConfig,
    out: String,
    format: Format,
}

fn context(common: &Common) -> Result<Ctx, Failure> {
    let file = match &common.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    let profile = resolve_profile(
        common.profile.as_deref(),
        common.profile_expr.as_deref(),
        common.x0.as_deref(),
        file.profile.as_ref(),
    )?;
    let format = match (common.format, file.format.as_deref()) {
        (Some(f), _) => f,
        (None, None | Some("json")) => Format::Json,
        (None, Some("csv")) => Format::Csv,
        (None, Some(other)) => return Err(Failure::Input(format!("unknown format {other:?}"))),
    };
    let out = common.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| "-".into());
    Ok(Ctx {
        profile,
        file,
        out,
        format,
    })
}

impl Ctx {
    fn emit<T: Serialize>(&self, report: &T) -> Outcome {
        write_json(&self.out, report).map_err(|e| Failure::Input(format!("cannot write {}: {e}", self.out)))
    }

    fn emit_csv(&self, header: &[&str], rows: &[Vec<String>]) -> Outcome {
        write_csv(&self.out, header, rows).map_err(|e| Failure::Input(format!("cannot write {}: {e}", self.out)))
    }

    fn json_only(&self, command: &str) -> Outcome {
        if self.format == Format::Csv {
            return Err(Failure::Input(format!("{command} has no CSV form")));
        }
        Ok(())
    }

    fn info(&self) -> ProfileInfo {
        ProfileInfo::of(&self.profile)
    }
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, Failure> {
    flag.or(file).ok_or_else(|| Failure::Input(format!("missing --{name}")))
}

fn positive(v: f64, name: &str) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Input(format!("--{name} must be positive, got {v}")))
    }
}

#[derive(Serialize)]
struct ProfileInfo {
    name: String,
    source: &'static str,
    x0: Bound,
}

impl ProfileInfo {
    fn of(p: &HartogsProfile) -> Self {
        ProfileInfo {
            name: p.name(),
            source: match p.source() {
                ProfileSource::Builtin(_) => "builtin",
                ProfileSource::Expression(_) => "expression",
                ProfileSource::Parametric(_) => "parametric",
            },
            x0: Bound(p.x0()),
        }
    }
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::CheckKahler { common, grid } => check_kahler(&context(&common)?, grid),
        Command::CheckComplete { common, budget } => check_complete(&context(&common)?, budget),
        Command::Moments { common, m, k_max } => moments(&context(&common)?, m, k_max),
        Command::Gamma {
            common,
            m_set,
            t_grid,
            k_max,
        } => gamma(&context(&common)?, m_set, t_grid, k_max),
        Command::Kernel {
            common,
            m,
            at,
            method,
            tol,
        } => kernel_cmd(&context(&common)?, m, at, &method, tol),
        Command::Epsilon {
            common,
            n,
            m,
            at,
            method,
            samples,
            seed,
        } => epsilon_cmd(&context(&common)?, n, m, at, &method, samples, seed),
        Command::Balanced {
            common,
            n,
            m,
            method,
            sampling,
        } => balanced(&context(&common)?, n, m, &method, &sampling),
        Command::QuantizationScan {
            common,
            n,
            m_from,
            m_to,
            method,
            sampling,
        } => quantization_scan(&context(&common)?, n, m_from, m_to, &method, &sampling),
        Command::Curvature {
            common,
            n,
            grid,
            h,
            tol,
        } => curvature(&context(&common)?, n, grid, h, tol),
        Command::VolumeCheck {
            common,
            n,
            samples,
            seed,
        } => volume_check(&context(&common)?, n, samples, seed),
    }
}

#[derive(Serialize)]
struct KahlerReport {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    grid_size: usize,
    min_g: Num,
    argmin_t: Num,
    decreasing: bool,
    pass: bool,
}

fn check_kahler(ctx: &Ctx, grid: Option<usize>) -> Outcome {
    ctx.json_only("check-kahler")?;
    let grid_size = grid.or(ctx.file.grid).unwrap_or(KAHLER_GRID);
    let k = ctx.profile.kahler_check(grid_size)?;
    ctx.emit(&KahlerReport {
        schema: SCHEMA,
        command: "check-kahler",
        profile: ctx.info(),
        grid_size,
        min_g: Num(k.min_g),
        argmin_t: Num(k.argmin_t),
        decreasing: k.decreasing,
        pass: k.pass,
    })
}

#[derive(Serialize)]
struct CutoffRow {
    cutoff: Num,
    partial: Num,
    increment: Num,
}

#[derive(Serialize)]
struct CompletenessOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    budget: usize,
    verdict: &'static str,
    note: String,
    evaluations: usize,
    trace: Vec<CutoffRow>,
}

fn check_complete(ctx: &Ctx, budget: Option<usize>) -> Outcome {
    ctx.json_only("check-complete")?;
    let budget = budget.or(ctx.file.budget).unwrap_or(COMPLETENESS_BUDGET);
    let r = ctx.profile.completeness_check(budget)?;
    ctx.emit(&CompletenessOut {
        schema: SCHEMA,
        command: "check-complete",
        profile: ctx.info(),
        budget,
        verdict: match r.verdict {
            Completeness::Complete => "complete",
            Completeness::Incomplete => "incomplete",
            Completeness::Inconclusive => "inconclusive",
        },
        note: r.note,
        evaluations: r.evaluations,
        trace: r
            .trace
            .iter()
            .map(|s| CutoffRow {
                cutoff: Num(s.cutoff),
                partial: Num(s.partial),
                increment: Num(s.increment),
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct MomentRow {
    k: usize,
    value: Num,
    abs_error: Num,
}

#[derive(Serialize)]
struct MomentsOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    m: u32,
    moments: Vec<MomentRow>,
}

fn moments(ctx: &Ctx, m: Option<u32>, k_max: Option<u32>) -> Outcome {
    let m = required(m, ctx.file.m, "m")?;
    let k_max = k_max.or(ctx.file.k_max).unwrap_or(12);
    let table = moment_table(&ctx.profile, k_max, m)?;
    let rows: Vec<MomentRow> = table
        .entries
        .iter()
        .enumerate()
        .map(|(k, q)| MomentRow {
            k,
            value: Num(q.value),
            abs_error: Num(q.abs_error_estimate),
        })
        .collect();
    if ctx.format == Format::Csv {
        let csv: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![r.k.to_string(), r.value.text(), r.abs_error.text()])
            .collect();
        return ctx.emit_csv(&["k", "c_k", "err"], &csv);
    }
    ctx.emit(&MomentsOut {
        schema: SCHEMA,
        command: "moments",
        profile: ctx.info(),
        m,
        moments: rows,
    })
}

#[derive(Serialize)]
struct ProbeRow {
    m: u32,
    t: Num,
    gamma: Num,
    residual: Num,
}

#[derive(Serialize)]
struct DroppedProbe {
    m: u32,
    t: Num,
    reason: String,
}

#[derive(Serialize)]
struct GammaOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    m_set: Vec<u32>,
    t_grid: Vec<Num>,
    k_max: u32,
    gamma_hat: Num,
    residual: Num,
    probes: Vec<ProbeRow>,
    dropped: Vec<DroppedProbe>,
}

fn gamma(ctx: &Ctx, m_set: Option<String>, t_grid: Option<String>, k_max: Option<u32>) -> Outcome {
    ctx.json_only("gamma")?;
    let m_set = match m_set {
        Some(s) => parse_list::<u32>(&s, "--m-set")?,
        None => ctx.file.m_set.clone().unwrap_or_else(|| GAMMA_M_SET.to_vec()),
    };
    let t_grid = match t_grid {
        Some(s) => parse_list::<f64>(&s, "--t-grid")?,
        None => ctx.file.t_grid.clone().unwrap_or_else(|| GAMMA_T_GRID.to_vec()),
    };
    let k_max = k_max.or(ctx.file.k_max).unwrap_or(DEFAULT_K_MAX);
    let cache = MomentCache::new(ctx.profile.clone());
    let est = estimate_gamma(&cache, &m_set, &t_grid, k_max)?;
    ctx.emit(&GammaOut {
        schema: SCHEMA,
        command: "gamma",
        profile: ctx.info(),
        t_grid: nums(&t_grid),
        m_set,
        k_max,
        gamma_hat: Num(est.gamma_hat),
        residual: Num(est.residual),
        probes: est
            .probes
            .iter()
            .map(|p| ProbeRow {
                m: p.m,
                t: Num(p.t),
                gamma: Num(p.gamma),
                residual: Num(p.residual),
            })
            .collect(),
        dropped: est
            .dropped
            .iter()
            .map(|(m, t, reason)| DroppedProbe {
                m: *m,
                t: Num(*t),
                reason: reason.clone(),
            })
            .collect(),
    })
}

/// The evaluation method with the γ it uses, estimating γ when needed.
fn resolve_method(ctx: &Ctx, cache: &MomentCache, args: &MethodArgs) -> Result<(EpsilonMethod, Option<f64>), Failure> {
    let method = match (args.method, ctx.file.method.as_deref()) {
        (Some(m), _) => m,
        (None, None | Some("series")) => Method::Series,
        (None, Some("closed-form")) => Method::ClosedForm,
        (None, Some(other)) => return Err(Failure::Input(format!("unknown method {other:?}"))),
    };
    match method {
        Method::Series => Ok((EpsilonMethod::series(), None)),
        Method::ClosedForm => {
            let gamma = match args.gamma.or(ctx.file.gamma) {
                Some(g) => g,
                None => {
                    let est = estimate_gamma(cache, &GAMMA_M_SET, &GAMMA_T_GRID, DEFAULT_K_MAX).map_err(|e| {
                        Failure::Numerical(format!("closed form needs γ and its estimate failed: {e}"))
                    })?;
                    if est.residual > GAMMA_RESIDUAL_LIMIT {
                        return Err(Failure::Numerical(format!(
                            "the moment identity fails for this profile (residual {:e}); use --method series",
                            est.residual
                        )));
                    }
                    est.gamma_hat
                }
            };
            Ok((EpsilonMethod::ClosedForm { gamma }, Some(gamma)))
        }
    }
}

fn method_name(m: KernelMethod) -> &'static str {
    match m {
        KernelMethod::Series => "series",
        KernelMethod::ClosedForm => "closed-form",
    }
}

fn parse_point(flag: Option<String>, file: Option<&Vec<String>>) -> Result<DomainPoint, Failure> {
    let parts: Vec<String> = match (flag, file) {
        (Some(s), _) => s.split(',').map(|p| p.trim().to_string()).collect(),
        (None, Some(v)) => v.clone(),
        (None, None) => return Err(Failure::Input("missing --at".into())),
    };
    let coords = parts
        .iter()
        .map(|p| Complex64::from_str(p).map_err(|_| Failure::Input(format!("--at: cannot parse coordinate {p:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.is_empty() {
        return Err(Failure::Input("--at needs at least one coordinate".into()));
    }
    Ok(DomainPoint::new(coords))
}

#[derive(Serialize)]
struct KernelOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    n: usize,
    m: u32,
    point: Coords,
    x: Num,
    s: Num,
    method: &'static str,
    gamma: Option<Num>,
    value: Num,
    ln_value: Num,
    truncation_bound: Num,
    quadrature_budget: Num,
    error_budget: Num,
    degree: Option<u32>,
}

fn kernel_cmd(ctx: &Ctx, m: Option<u32>, at: Option<String>, args: &MethodArgs, tol: Option<f64>) -> Outcome {
    ctx.json_only("kernel")?;
    let m = required(m, ctx.file.m, "m")?;
    let p = parse_point(at, ctx.file.at.as_ref())?;
    let cache = MomentCache::new(ctx.profile.clone());
    let (method, gamma) = resolve_method(ctx, &cache, args)?;
    let base = KernelOut {
        schema: SCHEMA,
        command: "kernel",
        profile: ctx.info(),
        n: p.dim(),
        m,
        point: Coords(p.coords().to_vec()),
        x: Num(p.x()),
        s: Num(p.s()),
        method: method_name(method.kind()),
        gamma: gamma.map(Num),
        value: Num(0.0),
        ln_value: Num(0.0),
        truncation_bound: Num(0.0),
        quadrature_budget: Num(0.0),
        error_budget: Num(0.0),
        degree: None,
    };
    let out = match method {
        EpsilonMethod::Series { tol: default_tol, degree_cap } => {
            let tol = positive(tol.or(ctx.file.tol).unwrap_or(default_tol), "tol")?;
            let k = kernel::kernel_series(&cache, &p, m, tol, degree_cap)?;
            KernelOut {
                value: Num(k.value),
                ln_value: Num(k.ln_value),
                truncation_bound: Num(k.truncation_bound),
                quadrature_budget: Num(k.quadrature_budget),
                error_budget: Num(k.error_budget()),
                degree: Some(k.degree),
                ..base
            }
        }
        EpsilonMethod::ClosedForm { gamma } => {
            let ln = kernel::ln_kernel_closed(&ctx.profile, &p, m, gamma)?;
            KernelOut {
                value: Num(kernel::kernel_closed(&ctx.profile, &p, m, gamma)?),
                ln_value: Num(ln),
                ..base
            }
        }
    };
    ctx.emit(&out)
}

#[derive(Serialize)]
struct SampleRow {
    x: Num,
    w: Num,
    point: Coords,
    epsilon: Num,
    error_budget: Num,
}

impl SampleRow {
    fn of(s: &EpsilonSample) -> Self {
        SampleRow {
            x: Num(s.x),
            w: Num(s.w),
            point: Coords(s.point.coords().to_vec()),
            epsilon: Num(s.epsilon),
            error_budget: Num(s.error_budget),
        }
    }

    fn csv(&self) -> Vec<String> {
        vec![self.x.text(), self.w.text(), self.epsilon.text(), self.error_budget.text()]
    }
}

#[derive(Serialize)]
struct EpsilonOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    n: usize,
    m: u32,
    method: &'static str,
    gamma: Option<Num>,
    seed: Option<u64>,
    samples: Vec<SampleRow>,
    failures: Vec<String>,
}

fn epsilon_cmd(
    ctx: &Ctx,
    n: Option<usize>,
    m: Option<u32>,
    at: Option<String>,
    args: &MethodArgs,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Outcome {
    let m = required(m, ctx.file.m, "m")?;
    let cache = MomentCache::new(ctx.profile.clone());
    let (method, gamma) = resolve_method(ctx, &cache, args)?;
    let (n, rows, failures, seed) = if at.is_some() || (ctx.file.at.is_some() && samples.is_none()) {
        let p = parse_point(at, ctx.file.at.as_ref())?;
        if let Some(n) = n.or(ctx.file.n) {
            if n != p.dim() {
                return Err(Failure::Input(format!("--n {n} does not match the {}-dimensional --at", p.dim())));
            }
        }
        let s = epsilon_at(&cache, &p, m, method)?;
        (p.dim(), vec![SampleRow::of(&s)], Vec::new(), None)
    } else {
        let n = required(n, ctx.file.n, "n")?;
        let count = samples.or(ctx.file.samples).unwrap_or(16);
        let seed = seed.or(ctx.file.seed).unwrap_or(0);
        let region = default_region(&ctx.profile, &method)?;
        let pairs = sample_pairs(region, n, count, seed);
        let results: Vec<_> = pairs
            .par_iter()
            .map(|&(x, w)| {
                let p = ctx.profile.point_from_xw(x, w, n)?;
                epsilon_at(&cache, &p, m, method)
            })
            .collect();
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for (r, (x, w)) in results.into_iter().zip(pairs) {
            match r {
                Ok(s) => rows.push(SampleRow::of(&s)),
                Err(e @ Error::TrivialSpace { .. }) => return Err(e.into()),
                Err(e) => failures.push(format!("(x = {x}, w = {w}): {e}")),
            }
        }
        (n, rows, failures, Some(seed))
    };
    if ctx.format == Format::Csv {
        let csv: Vec<Vec<String>> = rows.iter().map(SampleRow::csv).collect();
        return ctx.emit_csv(&["x", "w", "epsilon", "error_budget"], &csv);
    }
    ctx.emit(&EpsilonOut {
        schema: SCHEMA,
        command: "epsilon",
        profile: ctx.info(),
        n,
        m,
        method: method_name(method.kind()),
        gamma: gamma.map(Num),
        seed,
        samples: rows,
        failures,
    })
}

fn verdict_options(ctx: &Ctx, method: EpsilonMethod, s: &SamplingArgs) -> Result<VerdictOptions, Failure> {
    let mut opts = VerdictOptions::new(
        method,
        s.samples.or(ctx.file.samples).unwrap_or(64),
        s.seed.or(ctx.file.seed).unwrap_or(0),
    );
    if let Some(tol) = s.tol.or(ctx.file.tol) {
        opts.tol = positive(tol, "tol")?;
    }
    if opts.sample_count == 0 {
        return Err(Failure::Input("--samples must be positive".into()));
    }
    Ok(opts)
}

fn require_kahler(profile: &HartogsProfile) -> Outcome {
    let k = profile.kahler_check(KAHLER_GRID)?;
    if !k.pass {
        return Err(Failure::Input(format!(
            "profile fails the Kähler check (min G = {:e} at t = {})",
            k.min_g, k.argmin_t
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct BalancedOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    n: usize,
    m: u32,
    method: &'static str,
    gamma: Option<Num>,
    seed: u64,
    verdict: &'static str,
    label: &'static str,
    relative_spread: Num,
    constant_estimate: Num,
    tolerance: Num,
    reason: Option<String>,
    samples: Vec<SampleRow>,
    failures: Vec<String>,
}

fn balanced(ctx: &Ctx, n: Option<usize>, m: Option<u32>, args: &MethodArgs, s: &SamplingArgs) -> Outcome {
    ctx.json_only("balanced")?;
    let n = required(n, ctx.file.n, "n")?;
    let m = required(m, ctx.file.m, "m")?;
    require_kahler(&ctx.profile)?;
    let cache = MomentCache::new(ctx.profile.clone());
    let (method, gamma) = if (m as usize) <= n {
        (EpsilonMethod::series(), None)
    } else {
        resolve_method(ctx, &cache, args)?
    };
    let opts = verdict_options(ctx, method, s)?;
    let v = balanced_verdict(&cache, n, m, &opts)?;
    ctx.emit(&BalancedOut {
        schema: SCHEMA,
        command: "balanced",
        profile: ctx.info(),
        n,
        m,
        method: method_name(method.kind()),
        gamma: gamma.map(Num),
        seed: opts.seed,
        verdict: v.verdict.as_str(),
        label: NON_CERTIFYING,
        relative_spread: Num(v.relative_spread),
        constant_estimate: Num(v.constant_estimate),
        tolerance: Num(v.tolerance),
        reason: v.reason.clone(),
        samples: v.samples.iter().map(SampleRow::of).collect(),
        failures: v.failures.clone(),
    })
}

#[derive(Serialize)]
struct VerdictRow {
    m: u32,
    verdict: &'static str,
    label: &'static str,
    relative_spread: Num,
    constant_estimate: Num,
    tolerance: Num,
    reason: Option<String>,
    sample_count: usize,
    failures: Vec<String>,
}

impl VerdictRow {
    fn of(v: &BalancedVerdict) -> Self {
        VerdictRow {
            m: v.m,
            verdict: v.verdict.as_str(),
            label: NON_CERTIFYING,
            relative_spread: Num(v.relative_spread),
            constant_estimate: Num(v.constant_estimate),
            tolerance: Num(v.tolerance),
            reason: v.reason.clone(),
            sample_count: v.samples.len(),
            failures: v.failures.clone(),
        }
    }
}

#[derive(Serialize)]
struct ScanError {
    m: u32,
    message: String,
}

#[derive(Serialize)]
struct ScanOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    n: usize,
    m_from: u32,
    m_to: u32,
    method: &'static str,
    gamma: Option<Num>,
    seed: u64,
    all_balanced: bool,
    verdicts: Vec<VerdictRow>,
    errors: Vec<ScanError>,
}

fn quantization_scan(
    ctx: &Ctx,
    n: Option<usize>,
    m_from: Option<u32>,
    m_to: Option<u32>,
    args: &MethodArgs,
    s: &SamplingArgs,
) -> Outcome {
    ctx.json_only("quantization-scan")?;
    let n = required(n, ctx.file.n, "n")?;
    let m_from = required(m_from, ctx.file.m_from, "m-from")?;
    let m_to = required(m_to, ctx.file.m_to, "m-to")?;
    require_kahler(&ctx.profile)?;
    let cache = MomentCache::new(ctx.profile.clone());
    let (method, gamma) = resolve_method(ctx, &cache, args)?;
    let opts = verdict_options(ctx, method, s)?;
    let scan = regular_quantization_scan(&cache, n, m_from, m_to, &opts);
    ctx.emit(&ScanOut {
        schema: SCHEMA,
        command: "quantization-scan",
        profile: ctx.info(),
        n,
        m_from,
        m_to,
        method: method_name(method.kind()),
        gamma: gamma.map(Num),
        seed: opts.seed,
        all_balanced: scan.all_balanced,
        verdicts: scan.verdicts.iter().map(VerdictRow::of).collect(),
        errors: scan
            .errors
            .iter()
            .map(|(m, message)| ScanError {
                m: *m,
                message: message.clone(),
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct CurvatureRow {
    x: Num,
    w: Num,
    scalar_curvature: Num,
}

#[derive(Serialize)]
struct CurvatureOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    n: usize,
    grid: usize,
    h: Num,
    convention: &'static str,
    ball_value: Num,
    mean: Num,
    spread: Num,
    tolerance: Num,
    constant: bool,
    points: Vec<CurvatureRow>,
    dropped: Vec<String>,
}

fn curvature(ctx: &Ctx, n: Option<usize>, grid: Option<usize>, h: Option<f64>, tol: Option<f64>) -> Outcome {
    let n = required(n, ctx.file.n, "n")?;
    let size = grid.or(ctx.file.grid).unwrap_or(5);
    if size == 0 {
        return Err(Failure::Input("--grid must be positive".into()));
    }
    let h = positive(h.or(ctx.file.h).unwrap_or(CURVATURE_STEP), "h")?;
    let tol = positive(tol.or(ctx.file.tol).unwrap_or(CURVATURE_TOLERANCE), "tol")?;
    let region = default_region(&ctx.profile, &EpsilonMethod::series())?;
    let points = xw_grid(&ctx.profile, n, size, region.x_max, region.w_max)?;
    let scan = curvature_scan(&ctx.profile, &points, h, tol)?;
    let rows: Vec<CurvatureRow> = scan
        .points
        .iter()
        .map(|c| CurvatureRow {
            x: Num(c.x),
            w: Num(c.w),
            scalar_curvature: Num(c.scalar_curvature),
        })
        .collect();
    if ctx.format == Format::Csv {
        let csv: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![r.x.text(), r.w.text(), r.scalar_curvature.text()])
            .collect();
        return ctx.emit_csv(&["x", "w", "scalar_curvature"], &csv);
    }
    ctx.emit(&CurvatureOut {
        schema: SCHEMA,
        command: "curvature",
        profile: ctx.info(),
        n,
        grid: size,
        h: Num(h),
        convention: "R = -ddbar log det g, S = 2 tr(g^-1 R)",
        ball_value: Num(-2.0 * (n * (n + 1)) as f64),
        mean: Num(scan.mean),
        spread: Num(scan.spread),
        tolerance: Num(scan.tolerance),
        constant: scan.constant,
        points: rows,
        dropped: scan.dropped,
    })
}

#[derive(Serialize)]
struct VolumeRow {
    x: Num,
    w: Num,
    det_g: Num,
    closed_form: Num,
    defect: Num,
}

#[derive(Serialize)]
struct VolumeOut {
    schema: &'static str,
    command: &'static str,
    profile: ProfileInfo,
    n: usize,
    seed: u64,
    max_defect: Num,
    points: Vec<VolumeRow>,
    failures: Vec<String>,
}

fn volume_check(ctx: &Ctx, n: Option<usize>, samples: Option<usize>, seed: Option<u64>) -> Outcome {
    let n = required(n, ctx.file.n, "n")?;
    let count = samples.or(ctx.file.samples).unwrap_or(200);
    let seed = seed.or(ctx.file.seed).unwrap_or(0);
    let region = default_region(&ctx.profile, &EpsilonMethod::ClosedForm { gamma: 0.0 })?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut max_defect: f64 = 0.0;
    for (x, w) in epsilon::sample_pairs(region, n, count, seed) {
        let r = ctx
            .profile
            .point_from_xw(x, w, n)
            .and_then(|p| volume_density(&ctx.profile, &p));
        match r {
            Ok(v) => {
                max_defect = max_defect.max(v.defect);
                rows.push(VolumeRow {
                    x: Num(x),
                    w: Num(w),
                    det_g: Num(v.det_g),
                    closed_form: Num(v.closed_form),
                    defect: Num(v.defect),
                });
            }
            Err(e) => failures.push(format!("(x = {x}, w = {w}): {e}")),
        }
    }
    if rows.is_empty() {
        return Err(Failure::Numerical(format!("volume check failed at every point: {}", failures.join("; "))));
    }
    if ctx.format == Format::Csv {
        let csv: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![r.x.text(), r.w.text(), r.det_g.text(), r.closed_form.text(), r.defect.text()])
            .collect();
        return ctx.emit_csv(&["x", "w", "det_g", "closed_form", "defect"], &csv);
    }
    ctx.emit(&VolumeOut {
        schema: SCHEMA,
        command: "volume-check",
        profile: ctx.info(),
        n,
        seed,
        max_defect: Num(max_defect),
        points: rows,
        failures,
    })
}
