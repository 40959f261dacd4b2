//! Hartogs-domain profiles `F` and the pointwise predicates built on them.
//!
//! A profile is a decreasing positive function `F: [0, x0) -> (0, ∞)`. The
//! domain is `D_F = { |z0|² < x0, ‖z‖² < F(|z0|²) }` with Kähler potential
//! `Φ_F = -log(F(|z0|²) - ‖z‖²)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{self, ProfileExpression};
use crate::quadrature::{self, Tolerance};

/// Relative boundary guard: point operations need `F(x) - s >= δ F(x)`.
pub const BOUNDARY_GUARD: f64 = 1e-9;

/// Maps `t` to `(F(t), F'(t))`; used for sources without a second derivative.
pub type FirstOrderFn = Arc<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Hyperbolic,
    Springer,
    Power(f64),
    TruncatedHyperbolic,
    Expression(ProfileExpression),
    FirstOrder(FirstOrderFn),
}

/// Where a profile came from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    Builtin(String),
    Expression(String),
    Parametric(String),
}

impl fmt::Display for ProfileSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSource::Builtin(s) | ProfileSource::Expression(s) | ProfileSource::Parametric(s) => {
                f.write_str(s)
            }
        }
    }
}

/// The profile function of a Hartogs domain.
#[derive(Clone)]
pub struct HartogsProfile {
    kind: Kind,
    x0: f64,
    source: ProfileSource,
}

impl fmt::Debug for HartogsProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HartogsProfile")
            .field("source", &self.source)
            .field("x0", &self.x0)
            .finish()
    }
}

fn check_x0(x0: f64) -> Result<()> {
    if x0 > 0.0 && !x0.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("x0 must be positive, got {x0}")))
    }
}

impl HartogsProfile {
    /// `F(x) = 1 - x` on `[0, 1)`: the complex hyperbolic space.
    pub fn hyperbolic() -> Self {
        HartogsProfile {
            kind: Kind::Hyperbolic,
            x0: 1.0,
            source: ProfileSource::Builtin("hyperbolic".into()),
        }
    }

    /// `F(x) = e^{-x}` on `[0, ∞)`: the Springer domain.
    pub fn springer() -> Self {
        HartogsProfile {
            kind: Kind::Springer,
            x0: f64::INFINITY,
            source: ProfileSource::Builtin("springer".into()),
        }
    }

    /// `F(x) = (1 - x)^ν` on `[0, 1)`.
    pub fn power(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidInput(format!("power exponent must be positive, got {nu}")));
        }
        Ok(HartogsProfile {
            kind: Kind::Power(nu),
            x0: 1.0,
            source: ProfileSource::Parametric(format!("power:{nu}")),
        })
    }

    /// `F(x) = 1 - x` restricted to `[0, x0)` with `x0 < 1`.
    pub fn truncated_hyperbolic(x0: f64) -> Result<Self> {
        check_x0(x0)?;
        if x0 >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "truncated-hyperbolic needs x0 < 1, got {x0}"
            )));
        }
        Ok(HartogsProfile {
            kind: Kind::TruncatedHyperbolic,
            x0,
            source: ProfileSource::Parametric(format!("truncated-hyperbolic:{x0}")),
        })
    }

    pub fn from_expression(expr: ProfileExpression, x0: f64) -> Result<Self> {
        check_x0(x0)?;
        let text = expr.text().to_string();
        Ok(HartogsProfile {
            kind: Kind::Expression(expr),
            x0,
            source: ProfileSource::Expression(text),
        })
    }

    pub fn parse_expression(text: &str, x0: f64) -> Result<Self> {
        Self::from_expression(expr::parse(text)?, x0)
    }

    /// A profile known only through `(F, F')`; `F''` is taken by central differences.
    pub fn from_first_order(label: &str, x0: f64, f: FirstOrderFn) -> Result<Self> {
        check_x0(x0)?;
        Ok(HartogsProfile {
            kind: Kind::FirstOrder(f),
            x0,
            source: ProfileSource::Parametric(label.to_string()),
        })
    }

    /// Looks up a registry name: `hyperbolic`, `springer`, `power:ν`, `truncated-hyperbolic:x0`.
    pub fn builtin(name: &str) -> Result<Self> {
        let unknown = || Error::InvalidInput(format!("unknown builtin profile `{name}`"));
        let param = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad parameter in `{name}`")))
        };
        match name.split_once(':') {
            None => match name {
                "hyperbolic" => Ok(Self::hyperbolic()),
                "springer" => Ok(Self::springer()),
                _ => Err(unknown()),
            },
            Some(("power", p)) => Self::power(param(p)?),
            Some(("truncated-hyperbolic", p)) => Self::truncated_hyperbolic(param(p)?),
            Some(_) => Err(unknown()),
        }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn source(&self) -> &ProfileSource {
        &self.source
    }

    pub fn name(&self) -> String {
        self.source.to_string()
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t < self.x0 {
            Ok(())
        } else {
            Err(Error::domain(format!("t = {t} outside [0, {})", self.x0)))
        }
    }

    /// `(F(t), F'(t), F''(t))` for `t` in `[0, x0)`.
    pub fn jet(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check_t(t)?;
        let jet = self.raw_jet(t)?;
        if !(jet.0 > 0.0) {
            return Err(Error::domain(format!(
                "profile {} is not positive at t = {t} (F = {})",
                self.source, jet.0
            )));
        }
        Ok(jet)
    }

    /// `(ln F, (ln F)', (ln F)'')` at `t`.
    ///
    /// Builtins evaluate this analytically, so it stays finite where `F`
    /// itself underflows. Other sources return `None` once `F(t)` underflows.
    pub fn log_jet_or_underflow(&self, t: f64) -> Result<Option<(f64, f64, f64)>> {
        self.check_t(t)?;
        Ok(Some(match &self.kind {
            Kind::Hyperbolic | Kind::TruncatedHyperbolic => {
                let b = 1.0 - t;
                (b.ln(), -1.0 / b, -1.0 / (b * b))
            }
            Kind::Springer => (-t, -1.0, 0.0),
            Kind::Power(nu) => {
                let b = 1.0 - t;
                (nu * b.ln(), -nu / b, -nu / (b * b))
            }
            _ => {
                let (f, d1, d2) = self.raw_jet(t)?;
                if f == 0.0 {
                    return Ok(None);
                }
                if !(f > 0.0) {
                    return Err(Error::domain(format!(
                        "profile {} is not positive at t = {t} (F = {f})",
                        self.source
                    )));
                }
                let r = d1 / f;
                (f.ln(), r, d2 / f - r * r)
            }
        }))
    }

    pub fn log_jet(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.log_jet_or_underflow(t)?.ok_or_else(|| {
            Error::domain(format!("profile {} underflows at t = {t}", self.source))
        })
    }

    fn raw_jet(&self, t: f64) -> Result<(f64, f64, f64)> {
        Ok(match &self.kind {
            Kind::Hyperbolic | Kind::TruncatedHyperbolic => (1.0 - t, -1.0, 0.0),
            Kind::Springer => {
                let e = (-t).exp();
                (e, -e, e)
            }
            Kind::Power(nu) => {
                let b = 1.0 - t;
                let f = b.powf(*nu);
                (f, -nu * f / b, nu * (nu - 1.0) * f / (b * b))
            }
            Kind::Expression(e) => e.eval_jet2(t)?,
            Kind::FirstOrder(f) => {
                let (v, d1) = f(t)?;
                (v, d1, self.numeric_second_derivative(f, t)?)
            }
        })
    }

    fn numeric_second_derivative(&self, f: &FirstOrderFn, t: f64) -> Result<f64> {
        let h = f64::EPSILON.cbrt() * t.max(1.0);
        let d = |s: f64| f(s).map(|(_, d1)| d1);
        if t - h >= 0.0 && t + h < self.x0 {
            Ok((d(t + h)? - d(t - h)?) / (2.0 * h))
        } else if t - h < 0.0 && t + 2.0 * h < self.x0 {
            Ok((-3.0 * d(t)? + 4.0 * d(t + h)? - d(t + 2.0 * h)?) / (2.0 * h))
        } else if t - 2.0 * h >= 0.0 {
            Ok((3.0 * d(t)? - 4.0 * d(t - h)? + d(t - 2.0 * h)?) / (2.0 * h))
        } else {
            Err(Error::domain(format!("interval too short to difference at t = {t}")))
        }
    }

    /// `G(t) = -(t F'/F)' = -F'/F - t F''/F + t (F'/F)²`.
    pub fn g_of(&self, t: f64) -> Result<f64> {
        let (_, l1, l2) = self.log_jet(t)?;
        Ok(g_from_log_jet(t, l1, l2))
    }

    /// Samples `G` over `[0, x0)` and reports the minimum.
    ///
    /// Infinite `x0` is sampled through `t = u/(1-u)` on a uniform `u` grid.
    pub fn kahler_check(&self, grid_size: usize) -> Result<KahlerCheck> {
        if grid_size < 2 {
            return Err(Error::InvalidInput("grid_size must be at least 2".into()));
        }
        let mut min_g = f64::INFINITY;
        let mut argmin_t = 0.0;
        let mut decreasing = true;
        for i in 0..grid_size {
            let u = i as f64 / grid_size as f64;
            let t = if self.x0.is_infinite() {
                u / (1.0 - u)
            } else {
                u * self.x0
            };
            let Some((_, l1, l2)) = self.log_jet_or_underflow(t)? else {
                continue;
            };
            decreasing &= l1 <= 0.0;
            let g = g_from_log_jet(t, l1, l2);
            if g.is_nan() {
                return Err(Error::Evaluation {
                    at: t,
                    message: "G is NaN".into(),
                });
            }
            if g < min_g {
                min_g = g;
                argmin_t = t;
            }
        }
        Ok(KahlerCheck {
            min_g,
            argmin_t,
            decreasing,
            pass: min_g > 0.0,
        })
    }

    /// `x` and `s = ‖z‖²` of a point, with membership.
    pub fn contains(&self, p: &DomainPoint) -> bool {
        let (x, s) = (p.x(), p.s());
        if !(x >= 0.0 && x < self.x0) {
            return false;
        }
        match self.jet(x) {
            Ok((f, _, _)) => s < f,
            Err(_) => false,
        }
    }

    /// `(F(x), D = F(x) - s)` with the boundary guard enforced.
    pub(crate) fn guarded(&self, x: f64, s: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0 && x < self.x0) {
            return Err(Error::domain(format!("|z0|² = {x} outside [0, {})", self.x0)));
        }
        let (f, _, _) = self.jet(x)?;
        let d = f - s;
        if !(s >= 0.0) || d < BOUNDARY_GUARD * f {
            return Err(Error::domain(format!(
                "point too close to or outside the boundary (F(x) = {f}, ‖z‖² = {s})"
            )));
        }
        Ok((f, d))
    }

    /// `Φ_F(p) = -log(F(|z0|²) - ‖z‖²)`.
    pub fn potential(&self, p: &DomainPoint) -> Result<f64> {
        let (_, d) = self.guarded(p.x(), p.s())?;
        Ok(-d.ln())
    }

    /// `w = ‖z‖² / F(|z0|²)` for a member point.
    pub fn w_of(&self, p: &DomainPoint) -> Result<f64> {
        let (f, _) = self.guarded(p.x(), p.s())?;
        Ok(p.s() / f)
    }

    /// The point `(√x, √(wF(x)), 0, …)` in dimension `n`.
    pub fn point_from_xw(&self, x: f64, w: f64, n: usize) -> Result<DomainPoint> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&w) || (n == 1 && w != 0.0) {
            return Err(Error::domain(format!("w = {w} not admissible for n = {n}")));
        }
        let (f, _, _) = self.jet(x)?;
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[0] = Complex64::new(x.sqrt(), 0.0);
        if n > 1 {
            coords[1] = Complex64::new((w * f).sqrt(), 0.0);
        }
        Ok(DomainPoint::new(coords))
    }

    /// Probes `∫_0^{√x0} √G(u²) du` on cutoffs approaching the endpoint.
    ///
    /// `budget` caps the total number of integrand evaluations.
    pub fn completeness_check(&self, budget: usize) -> Result<CompletenessReport> {
        completeness(self, budget)
    }
}

/// `G = -(ln F)' - t (ln F)''`.
pub(crate) fn g_from_log_jet(t: f64, l1: f64, l2: f64) -> f64 {
    -l1 - t * l2
}

#[derive(Debug, Clone, PartialEq)]
pub struct KahlerCheck {
    pub min_g: f64,
    pub argmin_t: f64,
    /// `F' <= 0` at every sample.
    pub decreasing: bool,
    pub pass: bool,
}

/// A point of `C^n` with its radial invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPoint {
    coords: Vec<Complex64>,
}

impl DomainPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        DomainPoint { coords }
    }

    pub fn from_real(coords: &[f64]) -> Self {
        DomainPoint::new(coords.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn origin(n: usize) -> Self {
        DomainPoint::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `|z0|²`.
    pub fn x(&self) -> f64 {
        self.coords.first().map_or(0.0, |z| z.norm_sqr())
    }

    /// `‖z‖² = Σ_{k≥1} |z_k|²`.
    pub fn s(&self) -> f64 {
        self.coords.iter().skip(1).map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    Incomplete,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffStep {
    pub cutoff: f64,
    pub partial: f64,
    pub increment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub verdict: Completeness,
    pub note: String,
    pub trace: Vec<CutoffStep>,
    pub evaluations: usize,
}

const DIVERGENCE_THRESHOLD: f64 = 1e6;
const DIVERGENCE_RATIO: f64 = 0.5;
const CONVERGED_TAIL: f64 = 1e-10;
/// Shell-ratio floor read as a logarithmic (or stronger) divergence once a
/// finite endpoint is resolved to machine precision.
const RESOLVED_DIVERGENCE_RATIO: f64 = 0.95;
/// Closest relative approach to a finite endpoint; beyond it `F(u²)` loses digits.
const ENDPOINT_RESOLUTION: f64 = 1e-10;

fn completeness(profile: &HartogsProfile, budget: usize) -> Result<CompletenessReport> {
    let integrand = |u: f64| -> Result<f64> {
        let t = u * u;
        let g = profile.g_of(t)?;
        if !(g > 0.0) {
            return Err(Error::domain(format!("G({t}) = {g} is not positive")));
        }
        Ok(g.sqrt())
    };
    let tol = Tolerance::new(1e-12, 1e-9);
    let finite = profile.x0.is_finite();
    let end = profile.x0.sqrt();

    let mut trace: Vec<CutoffStep> = Vec::new();
    let mut evaluations = 0usize;
    let mut lower = 0.0;
    let mut partial = 0.0;
    let mut k = 0i32;
    let finish = |verdict, note: &str, trace, evaluations| {
        Ok(CompletenessReport {
            verdict,
            note: note.to_string(),
            trace,
            evaluations,
        })
    };

    loop {
        let cutoff = if finite {
            end * (1.0 - 0.5f64.powi(k + 1))
        } else {
            2f64.powi(k)
        };
        let resolved = finite
            && (0.5f64.powi(k + 1) < ENDPOINT_RESOLUTION
                || cutoff <= lower
                || cutoff * cutoff >= profile.x0);
        if resolved || k > 1100 {
            let ratio = last_ratio(&trace);
            return if ratio >= RESOLVED_DIVERGENCE_RATIO {
                finish(
                    Completeness::Complete,
                    "increments did not decay before the endpoint was resolved to machine precision",
                    trace,
                    evaluations,
                )
            } else {
                finish(
                    Completeness::Inconclusive,
                    "cutoffs exhausted without a verdict",
                    trace,
                    evaluations,
                )
            };
        }
        if evaluations >= budget {
            return finish(Completeness::Inconclusive, "evaluation budget exhausted", trace, evaluations);
        }
        let r = match quadrature::integrate_with(&integrand, lower, cutoff, tol, budget - evaluations) {
            Ok(r) => r,
            Err(e) if e.is_input_error() && !trace.is_empty() => {
                let note = format!("integrand unavailable beyond u = {lower}: {e}");
                return finish(Completeness::Inconclusive, &note, trace, evaluations);
            }
            Err(Error::NumericalFailure { reason, .. }) => {
                let note = format!("shell [{lower}, {cutoff}] did not converge: {reason}");
                return finish(Completeness::Inconclusive, &note, trace, evaluations);
            }
            Err(e) => return Err(e),
        };
        evaluations += r.evaluations;
        partial += r.value;
        trace.push(CutoffStep {
            cutoff,
            partial,
            increment: r.value,
        });
        let ratio = last_ratio(&trace);
        if partial > DIVERGENCE_THRESHOLD && ratio >= DIVERGENCE_RATIO {
            return finish(Completeness::Complete, "partial integrals diverge", trace, evaluations);
        }
        if trace.len() >= 3 && ratio < 1.0 {
            let inc = r.value;
            let tail = inc * ratio / (1.0 - ratio);
            if tail < CONVERGED_TAIL * partial.max(1.0) {
                return finish(
                    Completeness::Incomplete,
                    "tail contribution below tolerance",
                    trace,
                    evaluations,
                );
            }
        }
        lower = cutoff;
        k += 1;
    }
}

fn last_ratio(trace: &[CutoffStep]) -> f64 {
    match trace {
        [.., a, b] if a.increment > 0.0 => b.increment / a.increment,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn jets_of_builtins() {
        let (f, d1, d2) = HartogsProfile::hyperbolic().jet(0.3).unwrap();
        assert!(rel(f, 0.7) < 1e-15);
        assert_eq!((d1, d2), (-1.0, 0.0));

        let e = (-2.0f64).exp();
        assert_eq!(HartogsProfile::springer().jet(2.0).unwrap(), (e, -e, e));

        assert!(matches!(HartogsProfile::hyperbolic().jet(1.2), Err(Error::Domain(_))));
        assert!(matches!(HartogsProfile::hyperbolic().jet(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn g_reference_values() {
        let h = HartogsProfile::hyperbolic();
        assert!(rel(h.g_of(0.5).unwrap(), 4.0) < 1e-15);
        assert!(rel(h.g_of(0.0).unwrap(), 1.0) < 1e-15);
        for t in [0.0, 1.0, 7.5, 40.0] {
            assert!(rel(HartogsProfile::springer().g_of(t).unwrap(), 1.0) < 1e-15);
        }
    }

    #[test]
    fn g_matches_closed_forms_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = HartogsProfile::hyperbolic();
        let sp = HartogsProfile::springer();
        let pw = HartogsProfile::power(2.5).unwrap();
        for _ in 0..1000 {
            let t: f64 = rng.random_range(0.0..0.999);
            let want = 1.0 / ((1.0 - t) * (1.0 - t));
            assert!(rel(h.g_of(t).unwrap(), want) < 1e-12);
            // G = ν/(1-t)² for (1-t)^ν
            assert!(rel(pw.g_of(t).unwrap(), 2.5 * want) < 1e-12);
            let ts: f64 = rng.random_range(0.0..700.0);
            assert!(rel(sp.g_of(ts).unwrap(), 1.0) < 1e-12);
        }
    }

    #[test]
    fn first_order_source_uses_differences() {
        let f: FirstOrderFn = Arc::new(|t: f64| Ok(((-t).exp(), -(-t).exp())));
        let p = HartogsProfile::from_first_order("exp-first-order", f64::INFINITY, f).unwrap();
        for t in [0.0, 0.5, 3.0] {
            let (_, _, d2) = p.jet(t).unwrap();
            assert!(rel(d2, (-t).exp()) < 1e-9, "t={t}");
            assert!((p.g_of(t).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kahler_check_builtin_and_failing() {
        let h = HartogsProfile::hyperbolic().kahler_check(100).unwrap();
        assert!(h.pass && h.decreasing);
        assert_eq!((h.min_g, h.argmin_t), (1.0, 0.0));
        let s = HartogsProfile::springer().kahler_check(100).unwrap();
        assert!(s.pass);
        assert!((s.min_g - 1.0).abs() < 1e-12);
        let up = HartogsProfile::parse_expression("1 + x", 1.0).unwrap().kahler_check(100).unwrap();
        assert!(!up.pass && !up.decreasing);
        assert!(up.min_g < 0.0);
        assert!(HartogsProfile::hyperbolic().kahler_check(1).is_err());
    }

    #[test]
    fn completeness_verdicts() {
        let h = HartogsProfile::hyperbolic().completeness_check(2_000_000).unwrap();
        assert_eq!(h.verdict, Completeness::Complete, "{}", h.note);
        let s = HartogsProfile::springer().completeness_check(2_000_000).unwrap();
        assert_eq!(s.verdict, Completeness::Complete);
        assert!(s.trace.last().unwrap().partial > 1e6);
        let t = HartogsProfile::truncated_hyperbolic(0.25)
            .unwrap()
            .completeness_check(2_000_000)
            .unwrap();
        assert_eq!(t.verdict, Completeness::Incomplete);
        // ∫_0^{1/2} du/(1-u²) = atanh(1/2)
        let total = t.trace.last().unwrap().partial;
        assert!((total - 0.5f64.atanh()).abs() < 1e-9, "{total}");
    }

    #[test]
    fn completeness_budget_exhaustion_is_inconclusive() {
        let s = HartogsProfile::springer().completeness_check(40).unwrap();
        assert_eq!(s.verdict, Completeness::Inconclusive);
    }

    #[test]
    fn potential_values() {
        let h = HartogsProfile::hyperbolic();
        assert_eq!(h.potential(&DomainPoint::origin(2)).unwrap(), 0.0);
        let p = DomainPoint::from_real(&[0.5, 0.3]);
        assert!(rel(h.potential(&p).unwrap(), -(0.66f64.ln())) < 1e-14);
        let sp = HartogsProfile::springer();
        assert!(rel(sp.potential(&DomainPoint::from_real(&[1.0, 0.0])).unwrap(), 1.0) < 1e-15);
        assert!(matches!(
            h.potential(&DomainPoint::from_real(&[0.9, 0.9])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn membership_examples() {
        let h = HartogsProfile::hyperbolic();
        assert!(h.contains(&DomainPoint::origin(2)));
        assert!(!h.contains(&DomainPoint::from_real(&[0.9, 0.9])));
        // F(100) = e^{-100} ≈ 3.7e-44 < 1e-6
        assert!(!HartogsProfile::springer().contains(&DomainPoint::from_real(&[10.0, 1e-3])));
        assert!(!h.contains(&DomainPoint::from_real(&[1.0, 0.0])));
    }

    #[test]
    fn membership_is_monotone_in_s() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sp = HartogsProfile::springer();
        for _ in 0..500 {
            let x: f64 = rng.random_range(0.0..5.0);
            let f = (-x).exp();
            let s: f64 = rng.random_range(0.0..1.2) * f;
            let member = sp.contains(&DomainPoint::from_real(&[x.sqrt(), s.sqrt()]));
            assert_eq!(member, s < f);
            if member {
                let smaller: f64 = rng.random_range(0.0..1.0) * s;
                assert!(sp.contains(&DomainPoint::from_real(&[x.sqrt(), smaller.sqrt()])));
            }
        }
    }

    #[test]
    fn potential_blows_up_towards_the_boundary() {
        for profile in [HartogsProfile::hyperbolic(), HartogsProfile::springer()] {
            let x: f64 = 0.3;
            let f = profile.jet(x).unwrap().0;
            let mut prev = f64::NEG_INFINITY;
            for k in 1..=29 {
                let s = f * (1.0 - 0.5f64.powi(k));
                let p = DomainPoint::from_real(&[x.sqrt(), s.sqrt()]);
                let v = profile.potential(&p).unwrap();
                assert!(v > prev, "k={k}");
                prev = v;
            }
            // k = 30 puts D/F below the guard
            let s = f * (1.0 - 0.5f64.powi(30));
            let p = DomainPoint::from_real(&[x.sqrt(), s.sqrt()]);
            assert!(matches!(profile.potential(&p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn registry_names() {
        assert_eq!(HartogsProfile::builtin("hyperbolic").unwrap().x0(), 1.0);
        assert!(HartogsProfile::builtin("springer").unwrap().x0().is_infinite());
        assert_eq!(HartogsProfile::builtin("power:2.5").unwrap().name(), "power:2.5");
        assert_eq!(HartogsProfile::builtin("truncated-hyperbolic:0.25").unwrap().x0(), 0.25);
        assert!(HartogsProfile::builtin("x").is_err());
        assert!(HartogsProfile::builtin("power:-1").is_err());
        assert!(HartogsProfile::builtin("truncated-hyperbolic:2").is_err());
    }
}
