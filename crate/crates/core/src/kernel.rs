//! Monomial norms, diagonal reproducing kernels and the γ parameter.
//!
//! For `m > n` the monomials `z^j` are orthogonal in `H_{mΦ_F}` with
//!
//! ```text
//! ‖z^j‖²_m = π^n · j_1!⋯j_{n-1}! (m-n-1)! / (m+|j'|-2)! · c_{j_0}(F^{m+|j'|})
//! ```
//!
//! where `j' = (j_1, …, j_{n-1})`. The series `K = Σ_j |z^j|²/‖z^j‖²_m` is summed
//! by total-degree shell; inside a shell the sum over `j'` with fixed `|j'| = J`
//! collapses by the multinomial theorem to `s^J / J!`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::moments::MomentCache;
use crate::profile::{DomainPoint, HartogsProfile};
use crate::special::{ln_factorial, ln_rising_product, LogAccumulator};

/// Default residual truncation order.
pub const DEFAULT_K_MAX: u32 = 64;
/// Series evaluation refuses points with `w` at or above this value.
pub const SERIES_W_LIMIT: f64 = 0.98;
pub const DEFAULT_DEGREE_CAP: u32 = 4000;
/// A probe is rejected once the residual series decays slower than this ratio.
const RADIUS_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(j: Vec<u32>) -> Self {
        MultiIndex(j)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `j_1 + … + j_{n-1}`.
    pub fn j_tail(&self) -> u32 {
        self.0.iter().skip(1).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    Series,
    ClosedForm,
}

/// A diagonal kernel value with its error budget (absolute, on the same scale).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEvaluation {
    pub value: f64,
    pub ln_value: f64,
    pub truncation_bound: f64,
    pub quadrature_budget: f64,
    /// Last shell degree included (zero for the closed form).
    pub degree: u32,
    pub method: KernelMethod,
}

impl KernelEvaluation {
    pub fn error_budget(&self) -> f64 {
        self.truncation_bound + self.quadrature_budget
    }
}

pub(crate) fn require_nontrivial(m: u32, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if (m as usize) <= n {
        return Err(Error::TrivialSpace { m, n });
    }
    Ok(())
}

/// `ln ‖z^j‖²_m`.
pub fn ln_monomial_norm(cache: &MomentCache, j: &MultiIndex, m: u32, n: usize) -> Result<f64> {
    if j.dim() != n {
        return Err(Error::InvalidInput(format!(
            "multi-index has {} entries, dimension is {n}",
            j.dim()
        )));
    }
    require_nontrivial(m, n)?;
    let tail = j.j_tail();
    let facts: f64 = j.entries().iter().skip(1).map(|&e| ln_factorial(e as u64)).sum();
    let c = cache.log_moment(j.entries()[0], m + tail)?;
    Ok(n as f64 * PI.ln() + facts + ln_factorial((m as usize - n - 1) as u64)
        - ln_factorial((m + tail - 2) as u64)
        + c.ln_value)
}

pub fn monomial_norm(profile: &HartogsProfile, j: &MultiIndex, m: u32, n: usize) -> Result<f64> {
    let cache = MomentCache::new(profile.clone());
    let v = ln_monomial_norm(&cache, j, m, n)?.exp();
    if v == 0.0 || !v.is_finite() {
        return Err(Error::Overflow(format!("monomial norm of {:?} not representable", j.entries())));
    }
    Ok(v)
}

/// `K_{mΦ}(z, z)` by the monomial series.
///
/// Summation stops once two consecutive shells shrink and the geometric tail
/// bound falls below `tol` times the partial sum.
pub fn kernel_series(
    cache: &MomentCache,
    p: &DomainPoint,
    m: u32,
    tol: f64,
    degree_cap: u32,
) -> Result<KernelEvaluation> {
    let n = p.dim();
    require_nontrivial(m, n)?;
    let profile = cache.profile();
    let (f, _) = profile.guarded(p.x(), p.s())?;
    let (x, s) = (p.x(), p.s());
    let w = s / f;
    if w >= SERIES_W_LIMIT {
        return Err(Error::domain(format!(
            "w = {w} >= {SERIES_W_LIMIT}: series tail bound unusable, use the closed form"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("series tolerance must be positive".into()));
    }
    let ln_x = x.ln();
    let ln_s = s.ln();
    let base = n as f64 * PI.ln() + ln_factorial((m as usize - n - 1) as u64);

    let mut total = LogAccumulator::new();
    let mut quad = LogAccumulator::new();
    let mut skipped = LogAccumulator::new();
    let mut prev_shell = f64::NEG_INFINITY;
    let mut shrinking = 0;
    let mut peak_fraction = 0.0;
    for d in 0..=degree_cap {
        // j0 = d when s = 0 or n = 1, j0 = 0 when x = 0
        let first_j0 = if n == 1 || s == 0.0 { d } else { 0 };
        let last_j0 = if x == 0.0 { 0 } else { d };
        let term = |j0: u32| -> Result<(f64, f64)> {
            let tail = d - j0;
            let c = cache.log_moment(j0, m + tail)?;
            let mut lt = ln_factorial((m + tail - 2) as u64) - ln_factorial(tail as u64) - base - c.ln_value;
            if j0 > 0 {
                lt += j0 as f64 * ln_x;
            }
            if tail > 0 {
                lt += tail as f64 * ln_s;
            }
            Ok((lt, c.rel_error))
        };
        let mut shell = LogAccumulator::new();
        if first_j0 <= last_j0 {
            let shell_sum = sum_shell(term, first_j0, last_j0, peak_fraction, d)?;
            if d > 0 {
                peak_fraction = (shell_sum.peak - first_j0) as f64 / d as f64;
            }
            quad.add_log(shell_sum.ln_quad);
            skipped.add_log(shell_sum.ln_skipped);
            shell.add_log(shell_sum.ln_total);
        }
        let ln_shell = shell.ln();
        total.add_log(ln_shell);
        let ratio = if ln_shell == f64::NEG_INFINITY {
            0.0
        } else {
            (ln_shell - prev_shell).exp()
        };
        prev_shell = ln_shell;
        if d == 0 {
            continue;
        }
        shrinking = if ratio < 1.0 { shrinking + 1 } else { 0 };
        let ln_tail = if ratio == 0.0 {
            f64::NEG_INFINITY
        } else {
            ln_shell + ratio.ln() - (1.0 - ratio).ln()
        };
        if shrinking >= 2 && ln_tail <= tol.ln() + total.ln() {
            return finish(total, quad, skipped, ln_tail, d);
        }
    }
    Err(Error::failure(
        format!("kernel series did not converge within degree {degree_cap}"),
        Some(total.ln().exp()),
    ))
}

fn finish(
    total: LogAccumulator,
    quad: LogAccumulator,
    skipped: LogAccumulator,
    ln_tail: f64,
    degree: u32,
) -> Result<KernelEvaluation> {
    let ln_value = total.ln();
    let value = ln_value.exp();
    if !value.is_finite() {
        return Err(Error::Overflow(format!("kernel exp({ln_value}) is not representable")));
    }
    let mut bound = LogAccumulator::new();
    bound.add_log(ln_tail);
    bound.add_log(skipped.ln());
    Ok(KernelEvaluation {
        value,
        ln_value,
        truncation_bound: bound.ln().exp(),
        quadrature_budget: quad.ln().exp(),
        degree,
        method: KernelMethod::Series,
    })
}

/// Terms below this fraction of the running shell maximum end the walk.
const SHELL_CUTOFF: f64 = 1e-18;
/// Consecutive decreasing sub-cutoff terms required before stopping.
const SHELL_RUN: u32 = 4;

struct ShellSum {
    ln_total: f64,
    ln_quad: f64,
    /// Bound on the terms never evaluated.
    ln_skipped: f64,
    peak: u32,
}

/// Sums `exp(term(j))` over `lo..=hi` from the largest term outward.
///
/// The walk starts near `lo + hint·d` and climbs to a local maximum, then
/// extends both ways until the terms fall below [`SHELL_CUTOFF`] times the
/// maximum for [`SHELL_RUN`] decreasing steps. The unevaluated remainder is
/// bounded by the last term times the number of skipped indices.
fn sum_shell<T>(term: T, lo: u32, hi: u32, hint: f64, d: u32) -> Result<ShellSum>
where
    T: Fn(u32) -> Result<(f64, f64)>,
{
    let mut memo: Vec<Option<(f64, f64)>> = vec![None; (hi - lo + 1) as usize];
    let mut at = |j: u32| -> Result<(f64, f64)> {
        let slot = &mut memo[(j - lo) as usize];
        if let Some(v) = *slot {
            return Ok(v);
        }
        let v = term(j)?;
        *slot = Some(v);
        Ok(v)
    };
    let mut peak = ((lo as f64 + hint * d as f64).round() as u32).clamp(lo, hi);
    let mut max = at(peak)?.0;
    loop {
        if peak < hi && at(peak + 1)?.0 > max {
            peak += 1;
        } else if peak > lo && at(peak - 1)?.0 > max {
            peak -= 1;
        } else {
            break;
        }
        max = at(peak)?.0;
    }
    let mut total = LogAccumulator::new();
    let mut quad = LogAccumulator::new();
    let mut skipped = LogAccumulator::new();
    for step in [1i64, -1] {
        let mut j = peak as i64;
        if step < 0 {
            j -= 1;
        }
        let mut prev = f64::INFINITY;
        let mut run = 0;
        while j >= lo as i64 && j <= hi as i64 {
            if run >= SHELL_RUN {
                let remaining = if step > 0 { hi as i64 - j + 1 } else { j - lo as i64 + 1 };
                skipped.add_log(prev + (remaining as f64).ln());
                break;
            }
            let (lt, err) = at(j as u32)?;
            total.add_log(lt);
            if err > 0.0 {
                quad.add_log(lt + err.ln());
            }
            run = if lt < prev && lt < max + SHELL_CUTOFF.ln() { run + 1 } else { 0 };
            prev = lt;
            j += step;
        }
    }
    Ok(ShellSum {
        ln_total: total.ln(),
        ln_quad: quad.ln(),
        ln_skipped: skipped.ln(),
        peak,
    })
}

/// `ln` of the closed-form kernel
/// `(m-2)⋯(m-n) / (π^n D^m) · [m - 1 + (1 - w) γ]`, `D = F(x) - s`.
pub fn ln_kernel_closed(profile: &HartogsProfile, p: &DomainPoint, m: u32, gamma: f64) -> Result<f64> {
    let n = p.dim();
    require_nontrivial(m, n)?;
    let (f, d) = profile.guarded(p.x(), p.s())?;
    let w = p.s() / f;
    let bracket = m as f64 - 1.0 + (1.0 - w) * gamma;
    if !(bracket > 0.0) {
        return Err(Error::domain(format!("m - 1 + (1 - w)γ = {bracket} is not positive")));
    }
    let product = ln_rising_product((m as usize - n) as u64, m as u64 - 2);
    Ok(product - n as f64 * PI.ln() - m as f64 * d.ln() + bracket.ln())
}

pub fn kernel_closed(profile: &HartogsProfile, p: &DomainPoint, m: u32, gamma: f64) -> Result<f64> {
    let v = ln_kernel_closed(profile, p, m, gamma)?.exp();
    if !v.is_finite() {
        return Err(Error::Overflow("closed-form kernel is not representable".into()));
    }
    Ok(v)
}

/// Truncated `Σ_{k≤k_max} t^k / c_k(F^m)` with its geometric tail bound, in log form.
#[derive(Debug, Clone, Copy)]
struct IdentitySum {
    ln_sum: f64,
    ln_tail: f64,
    ln_f: f64,
}

fn identity_sum(cache: &MomentCache, m: u32, t: f64, k_max: u32) -> Result<IdentitySum> {
    if k_max < 2 {
        return Err(Error::InvalidInput("k_max must be at least 2".into()));
    }
    let (ln_f, _, _) = cache.profile().log_jet(t)?;
    let mut acc = LogAccumulator::new();
    let mut terms = [f64::NEG_INFINITY; 2];
    for k in 0..=k_max {
        let c = cache.log_moment(k, m)?;
        let lt = if k == 0 { 0.0 } else { k as f64 * t.ln() } - c.ln_value;
        acc.add_log(lt);
        terms = [terms[1], lt];
    }
    let ln_sum = acc.ln();
    let ln_tail = if t == 0.0 {
        f64::NEG_INFINITY
    } else {
        let ratio = (terms[1] - terms[0]).exp();
        if ratio >= RADIUS_FRACTION {
            return Err(Error::failure(
                format!(
                    "identity series at t = {t} decays with ratio {ratio:.3}: t is too close to the radius of convergence"
                ),
                Some(ln_sum.exp()),
            ));
        }
        terms[1] + ratio.ln() - (1.0 - ratio).ln()
    };
    Ok(IdentitySum { ln_sum, ln_tail, ln_f })
}

fn scaled_defect(sum: &IdentitySum, m: u32, gamma: f64) -> Result<f64> {
    let level = m as f64 - 1.0 + gamma;
    if !(level > 0.0) {
        return Err(Error::domain(format!("m - 1 + γ = {level} is not positive")));
    }
    // target = level · F^{-m}
    let ln_target = level.ln() - m as f64 * sum.ln_f;
    let ratio = (sum.ln_sum - ln_target).exp();
    Ok((ratio - 1.0).abs() + (sum.ln_tail - ln_target).exp())
}

/// Scaled defect `|Σ t^k/c_k(F^m) - (m-1+γ)F^{-m}| / ((m-1+γ)F^{-m})` plus the tail bound.
pub fn englis_residual(cache: &MomentCache, m: u32, t: f64, gamma: f64, k_max: u32) -> Result<f64> {
    let sum = identity_sum(cache, m, t, k_max)?;
    scaled_defect(&sum, m, gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaProbe {
    pub m: u32,
    pub t: f64,
    /// `F(t)^m Σ t^k/c_k - (m - 1)` at this probe.
    pub gamma: f64,
    /// Scaled defect at the fitted γ.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimate {
    pub gamma_hat: f64,
    pub residual: f64,
    pub probes: Vec<GammaProbe>,
    pub dropped: Vec<(u32, f64, String)>,
}

/// Fits γ in `Σ t^k/c_k(F^m) = (m-1+γ) F^{-m}`.
///
/// The identity is affine in γ, so the fit is the mean of the per-probe values.
pub fn estimate_gamma(cache: &MomentCache, m_set: &[u32], t_grid: &[f64], k_max: u32) -> Result<GammaEstimate> {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for &m in m_set {
        for &t in t_grid {
            match identity_sum(cache, m, t, k_max) {
                Ok(sum) => {
                    let g = (sum.ln_sum + m as f64 * sum.ln_f).exp() - (m as f64 - 1.0);
                    kept.push((m, t, g, sum));
                }
                Err(e) => dropped.push((m, t, e.to_string())),
            }
        }
    }
    if kept.is_empty() {
        return Err(Error::failure("every γ probe failed", None));
    }
    let gamma_hat = kept.iter().map(|k| k.2).sum::<f64>() / kept.len() as f64;
    let mut probes = Vec::with_capacity(kept.len());
    let mut residual: f64 = 0.0;
    for (m, t, gamma, sum) in kept {
        let r = scaled_defect(&sum, m, gamma_hat)?;
        residual = residual.max(r);
        probes.push(GammaProbe { m, t, gamma, residual: r });
    }
    Ok(GammaEstimate {
        gamma_hat,
        residual,
        probes,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn pi2() -> f64 {
        PI * PI
    }

    #[test]
    fn reference_norms() {
        let h = HartogsProfile::hyperbolic();
        let a = monomial_norm(&h, &MultiIndex::new(vec![0, 0]), 4, 2).unwrap();
        assert!(rel(a, pi2() / 6.0) < 1e-10);
        let b = monomial_norm(&h, &MultiIndex::new(vec![1, 0]), 4, 2).unwrap();
        assert!(rel(b, pi2() / 24.0) < 1e-10);
        for profile in [HartogsProfile::hyperbolic(), HartogsProfile::springer()] {
            assert!(matches!(
                monomial_norm(&profile, &MultiIndex::new(vec![0, 0]), 2, 2),
                Err(Error::TrivialSpace { m: 2, n: 2 })
            ));
        }
        assert!(matches!(
            monomial_norm(&h, &MultiIndex::new(vec![0]), 4, 2),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn series_reference_values() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        let k = kernel_series(&hc, &DomainPoint::origin(2), 4, 1e-12, 100).unwrap();
        assert!(rel(k.value, 6.0 / pi2()) < 1e-10);
        let p = DomainPoint::from_real(&[0.5, 0.3]);
        let k = kernel_series(&hc, &p, 4, 1e-12, DEFAULT_DEGREE_CAP).unwrap();
        assert!(rel(k.value, 6.0 / (pi2() * 0.66f64.powi(4))) < 1e-9, "{k:?}");
        assert!(k.truncation_bound < 1e-10 * k.value);

        let sc = MomentCache::new(HartogsProfile::springer());
        let k = kernel_series(&sc, &DomainPoint::origin(2), 4, 1e-12, 100).unwrap();
        assert!(rel(k.value, 8.0 / pi2()) < 1e-10);
    }

    #[test]
    fn series_rejects_trivial_space_and_boundary_points() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        assert!(matches!(
            kernel_series(&hc, &DomainPoint::origin(2), 2, 1e-10, 100),
            Err(Error::TrivialSpace { .. })
        ));
        let near = HartogsProfile::hyperbolic().point_from_xw(0.2, 0.985, 2).unwrap();
        assert!(matches!(kernel_series(&hc, &near, 4, 1e-10, 100), Err(Error::Domain(_))));
        let p = HartogsProfile::hyperbolic().point_from_xw(0.5, 0.9, 2).unwrap();
        assert!(matches!(
            kernel_series(&hc, &p, 4, 1e-12, 5),
            Err(Error::NumericalFailure { partial: Some(_), .. })
        ));
    }

    #[test]
    fn closed_form_reference_values() {
        let h = HartogsProfile::hyperbolic();
        let p = DomainPoint::from_real(&[0.5, 0.3]);
        assert!(rel(kernel_closed(&h, &p, 4, 0.0).unwrap(), 6.0 / (pi2() * 0.66f64.powi(4))) < 1e-14);
        assert!(rel(kernel_closed(&h, &DomainPoint::origin(1), 3, 0.0).unwrap(), 2.0 / PI) < 1e-15);
        let sp = HartogsProfile::springer();
        let x: f64 = 0.7;
        let f = (-x).exp();
        let p = sp.point_from_xw(x, 0.5, 2).unwrap();
        let d = f - 0.5 * f;
        let want = 2.0 * 3.5 / (pi2() * d.powi(4));
        assert!(rel(kernel_closed(&sp, &p, 4, 1.0).unwrap(), want) < 1e-13);
        assert!(matches!(kernel_closed(&h, &p, 2, 0.0), Err(Error::TrivialSpace { .. })));
    }

    /// Literal sum over every multi-index of total degree ≤ `cap`.
    fn enumerated_series(profile: &HartogsProfile, p: &DomainPoint, m: u32, cap: u32) -> f64 {
        let n = p.dim();
        let mut total = 0.0;
        let mut j = vec![0u32; n];
        loop {
            let deg: u32 = j.iter().sum();
            if deg <= cap {
                let val: f64 = p
                    .coords()
                    .iter()
                    .zip(&j)
                    .map(|(z, &e)| z.norm_sqr().powi(e as i32))
                    .product();
                if val > 0.0 {
                    let norm = monomial_norm(profile, &MultiIndex::new(j.clone()), m, n).unwrap();
                    total += val / norm;
                }
            }
            // odometer over [0, cap]^n
            let mut i = 0;
            loop {
                if i == n {
                    return total;
                }
                j[i] += 1;
                if j[i] <= cap {
                    break;
                }
                j[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn shell_grouping_matches_literal_enumeration() {
        let sp = HartogsProfile::springer();
        let p = DomainPoint::new(vec![
            Complex64::new(0.2, 0.1),
            Complex64::new(0.15, -0.05),
            Complex64::new(0.0, 0.2),
        ]);
        let literal = enumerated_series(&sp, &p, 5, 14);
        let cache = MomentCache::new(sp);
        let grouped = kernel_series(&cache, &p, 5, 1e-14, 200).unwrap();
        assert!(rel(grouped.value, literal) < 1e-9, "{} vs {literal}", grouped.value);
    }

    #[test]
    fn series_matches_closed_form_in_dimension_one() {
        for (profile, gamma) in [(HartogsProfile::hyperbolic(), 0.0), (HartogsProfile::springer(), 1.0)] {
            let cache = MomentCache::new(profile.clone());
            for x in [0.0f64, 0.1, 0.4] {
                let p = DomainPoint::from_real(&[x.sqrt()]);
                let series = kernel_series(&cache, &p, 3, 1e-12, DEFAULT_DEGREE_CAP).unwrap();
                let closed = kernel_closed(&profile, &p, 3, gamma).unwrap();
                assert!(rel(series.value, closed) < 1e-9, "{} x={x}", profile.name());
            }
        }
    }

    #[test]
    fn residual_reference_values() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        assert!(englis_residual(&hc, 4, 0.5, 0.0, DEFAULT_K_MAX).unwrap() <= 1e-8);
        // Σ t^k/c_k = 48 against 4·16 = 64
        let wrong = englis_residual(&hc, 4, 0.5, 1.0, DEFAULT_K_MAX).unwrap();
        assert!((wrong - 0.25).abs() < 1e-8, "{wrong}");
        let sc = MomentCache::new(HartogsProfile::springer());
        assert!(englis_residual(&sc, 3, 1.0, 1.0, DEFAULT_K_MAX).unwrap() <= 1e-8);
        assert!(matches!(
            englis_residual(&hc, 4, 0.97, 0.0, DEFAULT_K_MAX),
            Err(Error::NumericalFailure { .. })
        ));
    }

    #[test]
    fn gamma_fits() {
        let sc = MomentCache::new(HartogsProfile::springer());
        let g = estimate_gamma(&sc, &[2, 3, 4], &[0.25, 0.5, 1.0], DEFAULT_K_MAX).unwrap();
        assert!((g.gamma_hat - 1.0).abs() <= 1e-4);
        assert!(g.residual <= 1e-6);
        assert_eq!(g.probes.len(), 9);

        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        let g = estimate_gamma(&hc, &[3, 4, 5], &[0.1, 0.3, 0.5], DEFAULT_K_MAX).unwrap();
        assert!(g.gamma_hat.abs() <= 1e-4);

        // (1-x)^ν: Σ t^k/c_k = (m - 1/ν) F^{-m}, so γ = 1 - 1/ν
        let pc = MomentCache::new(HartogsProfile::power(2.5).unwrap());
        let g = estimate_gamma(&pc, &[2, 3, 4], &[0.25, 0.5, 1.0], DEFAULT_K_MAX).unwrap();
        assert!(g.gamma_hat.is_finite() && g.residual >= 0.0);
        assert_eq!(g.dropped.len(), 3, "t = 1 lies outside [0, 1)");
        assert!((g.gamma_hat - 0.6).abs() < 1e-6);
    }

    #[test]
    fn gamma_fails_when_every_probe_fails() {
        let hc = MomentCache::new(HartogsProfile::hyperbolic());
        assert!(estimate_gamma(&hc, &[3], &[1.5, 2.0], DEFAULT_K_MAX).is_err());
    }
}
