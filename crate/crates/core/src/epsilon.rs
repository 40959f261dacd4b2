//! ε-functions `ε_{mg}(z) = e^{-mΦ(z)} K_{mΦ}(z, z)` and balanced verdicts.
//!
//! ε depends on a point only through `(x, w)` because the kernel is invariant
//! under unitary rotations of `(z_1, …, z_{n-1})`. Verdicts therefore sample
//! `(x, w)` from a seeded Halton sequence and lift each pair to
//! `(√x, √(wF(x)), 0, …)`. A verdict is numerical and non-certifying: a finite
//! sample can refute constancy but only support it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{self, require_nontrivial, KernelMethod, MultiIndex, DEFAULT_DEGREE_CAP};
use crate::moments::MomentCache;
use crate::profile::{DomainPoint, HartogsProfile};
use crate::sampling::HaltonSampler;
use crate::special::ln_rising_product;

pub const CLOSED_FORM_TOLERANCE: f64 = 1e-6;
pub const SERIES_TOLERANCE: f64 = 1e-4;
/// Truncation tolerance of the kernel series used for ε.
pub const SERIES_KERNEL_TOLERANCE: f64 = 1e-10;
/// Largest `w` sampled by verdicts.
pub const W_MAX: f64 = 0.9;
/// Infinite `x0` is capped where `F` has fallen to this fraction of `F(0)`.
pub const X_CAP_FLOOR: f64 = 1e-12;

pub const NON_CERTIFYING: &str = "numerical, non-certifying";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonMethod {
    Series { tol: f64, degree_cap: u32 },
    /// Requires the caller to assert the moment identity with this γ.
    ClosedForm { gamma: f64 },
}

impl EpsilonMethod {
    pub fn series() -> Self {
        EpsilonMethod::Series {
            tol: SERIES_KERNEL_TOLERANCE,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    pub fn kind(&self) -> KernelMethod {
        match self {
            EpsilonMethod::Series { .. } => KernelMethod::Series,
            EpsilonMethod::ClosedForm { .. } => KernelMethod::ClosedForm,
        }
    }

    pub fn default_tolerance(&self) -> f64 {
        match self {
            EpsilonMethod::Series { .. } => SERIES_TOLERANCE,
            EpsilonMethod::ClosedForm { .. } => CLOSED_FORM_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSample {
    pub point: DomainPoint,
    pub x: f64,
    pub w: f64,
    pub m: u32,
    pub epsilon: f64,
    pub method: KernelMethod,
    pub error_budget: f64,
}

/// ε at `p` with weight `m`.
pub fn epsilon_at(cache: &MomentCache, p: &DomainPoint, m: u32, method: EpsilonMethod) -> Result<EpsilonSample> {
    let n = p.dim();
    require_nontrivial(m, n)?;
    let profile = cache.profile();
    let (f, d) = profile.guarded(p.x(), p.s())?;
    let ln_weight = m as f64 * d.ln();
    let (epsilon, error_budget) = match method {
        EpsilonMethod::Series { tol, degree_cap } => {
            let k = kernel::kernel_series(cache, p, m, tol, degree_cap)?;
            let eps = (k.ln_value + ln_weight).exp();
            (eps, eps * k.error_budget() / k.value)
        }
        EpsilonMethod::ClosedForm { gamma } => {
            let eps = (kernel::ln_kernel_closed(profile, p, m, gamma)? + ln_weight).exp();
            (eps, 0.0)
        }
    };
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Overflow(format!("ε = {epsilon} at x = {}", p.x())));
    }
    Ok(EpsilonSample {
        point: p.clone(),
        x: p.x(),
        w: p.s() / f,
        m,
        epsilon,
        method: method.kind(),
        error_budget,
    })
}

/// `(m-1)(m-2)⋯(m-n) / π^n`, the ε of `m g_hyp`.
pub fn hyperbolic_constant(m: u32, n: usize) -> Result<f64> {
    require_nontrivial(m, n)?;
    Ok((ln_rising_product((m as usize - n) as u64, m as u64 - 1) - n as f64 * PI.ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Balanced,
    NotBalanced,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Balanced => "balanced",
            Verdict::NotBalanced => "not_balanced",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalancedVerdict {
    pub m: u32,
    pub verdict: Verdict,
    /// `(max - min) / mean` over the samples.
    pub relative_spread: f64,
    pub constant_estimate: f64,
    pub tolerance: f64,
    pub reason: Option<String>,
    pub samples: Vec<EpsilonSample>,
    pub failures: Vec<String>,
}

/// Rectangle `[0, x_max] × [0, w_max]` in `(x, w)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingRegion {
    pub x_max: f64,
    pub w_max: f64,
}

/// Point where `F` has decayed to `X_CAP_FLOOR · F(0)`, by bisection on `ln F`.
pub fn x_cap(profile: &HartogsProfile) -> Result<f64> {
    let (ln_f0, _, _) = profile.log_jet(0.0)?;
    let target = ln_f0 + X_CAP_FLOOR.ln();
    let below = |x: f64| profile.log_jet(x).map(|(l, _, _)| l < target).unwrap_or(true);
    if profile.x0().is_finite() {
        let hi = profile.x0() * (1.0 - 1e-6);
        if !below(hi) {
            return Ok(hi);
        }
    }
    let mut hi = 1.0;
    while !below(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::failure("profile never decays below the x cap floor", None));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Default `(x, w)` region for a method.
///
/// The series needs shells up to roughly `(m + J)·x` in `j_0`, so it samples a
/// smaller `x` range: half of a finite `x0`, or `min(x_cap, 1)` otherwise.
pub fn default_region(profile: &HartogsProfile, method: &EpsilonMethod) -> Result<SamplingRegion> {
    let cap = x_cap(profile)?;
    let x_max = match method {
        EpsilonMethod::ClosedForm { .. } => cap,
        EpsilonMethod::Series { .. } if profile.x0().is_finite() => cap.min(0.5 * profile.x0()),
        EpsilonMethod::Series { .. } => cap.min(1.0),
    };
    Ok(SamplingRegion { x_max, w_max: W_MAX })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictOptions {
    pub method: EpsilonMethod,
    pub sample_count: usize,
    pub tol: f64,
    pub seed: u64,
    /// `None` selects [`default_region`].
    pub region: Option<SamplingRegion>,
}

impl VerdictOptions {
    pub fn new(method: EpsilonMethod, sample_count: usize, seed: u64) -> Self {
        VerdictOptions {
            tol: method.default_tolerance(),
            method,
            sample_count,
            seed,
            region: None,
        }
    }
}

/// The `(x, w)` sample pairs a verdict would evaluate.
pub fn sample_pairs(region: SamplingRegion, n: usize, count: usize, seed: u64) -> Vec<(f64, f64)> {
    HaltonSampler::new(seed)
        .take(count)
        .map(|[u, v]| (u * region.x_max, if n == 1 { 0.0 } else { v * region.w_max }))
        .collect()
}

/// Samples ε for `m g_F` and decides whether it looks constant.
pub fn balanced_verdict(cache: &MomentCache, n: usize, m: u32, opts: &VerdictOptions) -> Result<BalancedVerdict> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if !(opts.tol > 0.0) || opts.sample_count == 0 {
        return Err(Error::InvalidInput("tolerance and sample count must be positive".into()));
    }
    let mut out = BalancedVerdict {
        m,
        verdict: Verdict::NotBalanced,
        relative_spread: 0.0,
        constant_estimate: 0.0,
        tolerance: opts.tol,
        reason: None,
        samples: Vec::new(),
        failures: Vec::new(),
    };
    if (m as usize) <= n {
        out.reason = Some(format!("trivial-space: H is {{0}} for m = {m} <= n = {n}"));
        return Ok(out);
    }
    let profile = cache.profile();
    let region = match opts.region {
        Some(r) => r,
        None => default_region(profile, &opts.method)?,
    };
    let pairs = sample_pairs(region, n, opts.sample_count, opts.seed);
    let results: Vec<Result<EpsilonSample>> = pairs
        .par_iter()
        .map(|&(x, w)| {
            let p = profile.point_from_xw(x, w, n)?;
            epsilon_at(cache, &p, m, opts.method)
        })
        .collect();
    for (r, (x, w)) in results.into_iter().zip(pairs) {
        match r {
            Ok(s) => out.samples.push(s),
            Err(e) => out.failures.push(format!("(x = {x}, w = {w}): {e}")),
        }
    }
    if out.samples.is_empty() {
        out.verdict = Verdict::Inconclusive;
        out.reason = Some("every sample failed".into());
        return Ok(out);
    }
    let (lo, hi, sum) = out.samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, sum), s| {
        (lo.min(s.epsilon), hi.max(s.epsilon), sum + s.epsilon)
    });
    let mean = sum / out.samples.len() as f64;
    out.constant_estimate = mean;
    out.relative_spread = (hi - lo) / mean;
    out.verdict = if out.relative_spread > opts.tol {
        Verdict::NotBalanced
    } else if !out.failures.is_empty() || out.samples.len() < 2 {
        out.reason = Some(format!("{} of {} samples failed", out.failures.len(), pairs_len(&out)));
        Verdict::Inconclusive
    } else {
        Verdict::Balanced
    };
    Ok(out)
}

fn pairs_len(v: &BalancedVerdict) -> usize {
    v.samples.len() + v.failures.len()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationScan {
    pub verdicts: Vec<BalancedVerdict>,
    /// Per-weight errors; the scan continues past them.
    pub errors: Vec<(u32, String)>,
    pub all_balanced: bool,
}

/// One verdict per weight in `m_from..=m_to`.
pub fn regular_quantization_scan(
    cache: &MomentCache,
    n: usize,
    m_from: u32,
    m_to: u32,
    opts: &VerdictOptions,
) -> QuantizationScan {
    let mut verdicts = Vec::new();
    let mut errors = Vec::new();
    for m in m_from..=m_to {
        match balanced_verdict(cache, n, m, opts) {
            Ok(v) => verdicts.push(v),
            Err(e) => errors.push((m, e.to_string())),
        }
    }
    let all_balanced =
        !verdicts.is_empty() && errors.is_empty() && verdicts.iter().all(|v| v.verdict == Verdict::Balanced);
    QuantizationScan {
        verdicts,
        errors,
        all_balanced,
    }
}

/// ε at `p ∈ C^1` recomputed in the gauge `Φ' = Φ - Re(c z_0)/m`.
///
/// The weight becomes `e^{-mΦ} e^{Re(c z_0)}`, under which the monomials are no
/// longer orthogonal. The kernel is rebuilt from the Gram matrix of
/// `1, z, …, z^{basis_size-1}`, expanding `e^{Re(cz)} = |e^{cz/2}|²`, and
/// `e^{-mΦ'} K'` is returned. It agrees with [`epsilon_at`] in the limit.
pub fn gauge_twisted_epsilon(
    cache: &MomentCache,
    p: &DomainPoint,
    m: u32,
    c: Complex64,
    basis_size: usize,
) -> Result<f64> {
    if p.dim() != 1 {
        return Err(Error::InvalidInput("the gauge twist is implemented for n = 1".into()));
    }
    require_nontrivial(m, 1)?;
    let (_, d) = cache.profile().guarded(p.x(), p.s())?;
    let half = c * 0.5;
    const TWIST_TERMS: usize = 48;
    let top = basis_size + TWIST_TERMS;
    let norms = (0..top)
        .map(|r| kernel::ln_monomial_norm(cache, &MultiIndex::new(vec![r as u32]), m, 1).map(f64::exp))
        .collect::<Result<Vec<f64>>>()?;
    // coefficients (c/2)^p / p!
    let mut coef = vec![Complex64::new(1.0, 0.0); top];
    for q in 1..top {
        coef[q] = coef[q - 1] * half / q as f64;
    }
    let mut gram = DMatrix::<Complex64>::zeros(basis_size, basis_size);
    for a in 0..basis_size {
        for b in 0..basis_size {
            // ⟨z^a e^{cz/2}, z^b e^{cz/2}⟩ = Σ_q coef_q conj(coef_{q+a-b}) N_{a+q}
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..TWIST_TERMS {
                let Some(r) = (q + a).checked_sub(b) else { continue };
                if r >= top {
                    break;
                }
                acc += coef[q] * coef[r].conj() * norms[a + q];
            }
            gram[(a, b)] = acc;
        }
    }
    // symmetric diagonal scaling before Cholesky
    let scale: Vec<f64> = (0..basis_size).map(|a| 1.0 / gram[(a, a)].re.sqrt()).collect();
    let scaled = DMatrix::from_fn(basis_size, basis_size, |a, b| gram[(a, b)] * scale[a] * scale[b]);
    let z = p.coords()[0];
    let mut power = Complex64::new(1.0, 0.0);
    let mut e = DVector::<Complex64>::zeros(basis_size);
    for (a, s) in scale.iter().enumerate() {
        e[a] = power * *s;
        power *= z;
    }
    // K = e^* G^{-1} e with G_ab = ⟨e_a, e_b⟩
    let chol = scaled
        .cholesky()
        .ok_or_else(|| Error::failure("twisted Gram matrix is not positive definite", None))?;
    let solved = chol.solve(&e);
    let k: Complex64 = e.iter().zip(solved.iter()).map(|(ei, si)| ei.conj() * si).sum();
    let weight = (m as f64 * d.ln() + (c * z).re).exp();
    Ok(weight * k.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hyperbolic_constants() {
        assert!(rel(hyperbolic_constant(4, 2).unwrap(), 6.0 / (PI * PI)) < 1e-14);
        for n in 1..6usize {
            let fact: f64 = (1..=n).map(|i| i as f64).product();
            assert!(rel(hyperbolic_constant(n as u32 + 1, n).unwrap(), fact / PI.powi(n as i32)) < 1e-13);
        }
        assert!(matches!(hyperbolic_constant(3, 3), Err(Error::TrivialSpace { .. })));
    }

    #[test]
    fn epsilon_reference_values() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        let p = DomainPoint::from_real(&[0.5, 0.3]);
        for method in [EpsilonMethod::series(), EpsilonMethod::ClosedForm { gamma: 0.0 }] {
            let s = epsilon_at(&hc, &p, 4, method).unwrap();
            assert!(rel(s.epsilon, 0.607_927_101_854_026_6) < 1e-9, "{method:?}");
        }
        let sp = HartogsProfile::springer();
        let sc = MomentCache::new(sp.clone());
        let o = epsilon_at(&sc, &DomainPoint::origin(2), 4, EpsilonMethod::series()).unwrap();
        assert!(rel(o.epsilon, 8.0 / (PI * PI)) < 1e-9);
        let half = sp.point_from_xw(0.6, 0.5, 2).unwrap();
        let s = epsilon_at(&sc, &half, 4, EpsilonMethod::series()).unwrap();
        assert!(rel(s.epsilon, 7.0 / (PI * PI)) < 1e-8, "{}", s.epsilon);
        assert!((s.w - 0.5).abs() < 1e-15);
        assert!(matches!(
            epsilon_at(&sc, &half, 2, EpsilonMethod::series()),
            Err(Error::TrivialSpace { .. })
        ));
    }

    #[test]
    fn springer_x_cap() {
        let cap = x_cap(&HartogsProfile::springer()).unwrap();
        assert!((cap - 1e12f64.ln()).abs() < 1e-9);
        assert!(rel(x_cap(&HartogsProfile::hyperbolic()).unwrap(), 1.0 - 1e-6) < 1e-15);
    }

    #[test]
    fn hyperbolic_is_balanced() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        let opts = VerdictOptions::new(EpsilonMethod::ClosedForm { gamma: 0.0 }, 64, 1);
        let v = balanced_verdict(&hc, 2, 4, &opts).unwrap();
        assert_eq!(v.verdict, Verdict::Balanced);
        assert!(rel(v.constant_estimate, 6.0 / (PI * PI)) < 1e-10);
    }

    #[test]
    fn springer_spread_matches_sampled_w_range() {
        let sc = MomentCache::new(HartogsProfile::springer());
        let opts = VerdictOptions::new(EpsilonMethod::ClosedForm { gamma: 1.0 }, 40, 5);
        let v = balanced_verdict(&sc, 2, 4, &opts).unwrap();
        assert_eq!(v.verdict, Verdict::NotBalanced);
        // ε ∝ m - w
        let ws: Vec<f64> = v.samples.iter().map(|s| s.w).collect();
        let (lo, hi) = ws.iter().fold((1.0f64, 0.0f64), |(a, b), &w| (a.min(w), b.max(w)));
        let mean_w = ws.iter().sum::<f64>() / ws.len() as f64;
        let want = (hi - lo) / (4.0 - mean_w);
        assert!(rel(v.relative_spread, want) < 1e-9, "{} vs {want}", v.relative_spread);
    }

    #[test]
    fn trivial_space_is_not_balanced() {
        for profile in [HartogsProfile::hyperbolic(), HartogsProfile::springer()] {
            let cache = MomentCache::new(profile);
            let opts = VerdictOptions::new(EpsilonMethod::series(), 8, 0);
            let v = balanced_verdict(&cache, 2, 2, &opts).unwrap();
            assert_eq!(v.verdict, Verdict::NotBalanced);
            assert!(v.reason.unwrap().starts_with("trivial-space"));
        }
    }

    #[test]
    fn scans() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        let opts = VerdictOptions::new(EpsilonMethod::ClosedForm { gamma: 0.0 }, 16, 2);
        let scan = regular_quantization_scan(&hc, 2, 3, 7, &opts);
        assert!(scan.all_balanced);
        for v in &scan.verdicts {
            assert!(rel(v.constant_estimate, hyperbolic_constant(v.m, 2).unwrap()) < 1e-10);
        }
        let empty = regular_quantization_scan(&hc, 2, 5, 4, &opts);
        assert!(empty.verdicts.is_empty() && !empty.all_balanced);

        let sc = MomentCache::new(HartogsProfile::springer());
        let opts = VerdictOptions::new(EpsilonMethod::series(), 16, 2);
        let scan = regular_quantization_scan(&sc, 2, 3, 6, &opts);
        assert!(scan.verdicts.iter().all(|v| v.verdict == Verdict::NotBalanced));
    }

    #[test]
    fn affine_in_one_minus_w() {
        // ε π^n / ((m-2)⋯(m-n)) = (m - 1) + γ (1 - w)
        let (n, m) = (3usize, 6u32);
        let pw = HartogsProfile::power(2.5).unwrap();
        let gamma = 0.6;
        let cache = MomentCache::new(pw.clone());
        let prod = ln_rising_product((m as usize - n) as u64, m as u64 - 2).exp();
        let pts: Vec<(f64, f64)> = sample_pairs(SamplingRegion { x_max: 0.5, w_max: 0.9 }, n, 30, 3)
            .into_iter()
            .map(|(x, w)| {
                let p = pw.point_from_xw(x, w, n).unwrap();
                let e = epsilon_at(&cache, &p, m, EpsilonMethod::ClosedForm { gamma }).unwrap().epsilon;
                (1.0 - w, e * PI.powi(n as i32) / prod)
            })
            .collect();
        let k = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / k, sy / k);
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        assert!((slope - gamma).abs() < 1e-6 && (intercept - (m as f64 - 1.0)).abs() < 1e-6);
        let worst = pts.iter().map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6);
    }

    #[test]
    fn gauge_twist_leaves_epsilon_unchanged() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        let p = DomainPoint::new(vec![Complex64::new(0.3, -0.2)]);
        let plain = epsilon_at(&hc, &p, 3, EpsilonMethod::series()).unwrap().epsilon;
        let twisted = gauge_twisted_epsilon(&hc, &p, 3, Complex64::new(0.3, 0.2), 60).unwrap();
        assert!((twisted - plain).abs() <= 1e-10 * plain, "{twisted} vs {plain}");
        assert!(gauge_twisted_epsilon(&hc, &DomainPoint::origin(2), 3, Complex64::new(0.1, 0.0), 10).is_err());
    }
}
