//! Moments `c_k(F^m) = ∫_0^{x0} t^k F(t)^m G(t) dt`.
//!
//! High orders over- or underflow in direct form (`c_500(F^500)` is far below
//! `f64::MIN_POSITIVE` for the hyperbolic profile), so moments are computed in
//! log space: the log-integrand is maximised first and `exp(h - h_max)` is
//! integrated on panels split around the peak.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::profile::{g_from_log_jet, HartogsProfile};
use crate::quadrature::{self, QuadratureResult, Tolerance, MAX_PANELS};

/// Default relative tolerance for moments.
pub const MOMENT_TOLERANCE: f64 = 1e-10;

/// `ln c_k(F^m)` with its relative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoment {
    pub ln_value: f64,
    pub rel_error: f64,
    pub evaluations: usize,
}

impl LogMoment {
    pub fn to_result(self) -> Result<QuadratureResult> {
        let value = self.ln_value.exp();
        if value == 0.0 || !value.is_finite() {
            return Err(Error::Overflow(format!(
                "moment exp({}) is not representable",
                self.ln_value
            )));
        }
        Ok(QuadratureResult {
            value,
            abs_error_estimate: value * self.rel_error,
            evaluations: self.evaluations,
        })
    }
}

/// Cached moments `c_k(F^m)`, each computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub m: u32,
    pub entries: Vec<QuadratureResult>,
}

impl MomentTable {
    pub fn get(&self, k: usize) -> Option<&QuadratureResult> {
        self.entries.get(k)
    }

    pub fn k_max(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }
}

struct LogIntegrand<'a> {
    profile: &'a HartogsProfile,
    k: f64,
    m: f64,
    /// Upper end of the integration variable: `x0`, or 1 after `t = v/(1-v)`.
    end: f64,
    mapped: bool,
}

impl LogIntegrand<'_> {
    fn ln_at(&self, v: f64) -> Result<f64> {
        let (t, ln_jac) = if self.mapped {
            (v / (1.0 - v), -2.0 * (1.0 - v).ln())
        } else {
            (v, 0.0)
        };
        if t.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        let Some((ln_f, l1, l2)) = self.profile.log_jet_or_underflow(t)? else {
            return Ok(f64::NEG_INFINITY);
        };
        let g = g_from_log_jet(t, l1, l2);
        if g.is_nan() {
            return Err(Error::Evaluation {
                at: t,
                message: "G is NaN".into(),
            });
        }
        if g <= 0.0 {
            return Err(Error::domain(format!(
                "G({t}) = {g}: profile {} violates the Kähler condition",
                self.profile.name()
            )));
        }
        let power = if self.k == 0.0 { 0.0 } else { self.k * t.ln() };
        Ok(power + self.m * ln_f + g.ln() + ln_jac)
    }

    /// Coarse grid search followed by golden-section refinement.
    fn peak(&self) -> Result<(f64, f64, usize)> {
        const GRID: usize = 64;
        let mut evals = 0;
        let mut best = (f64::NEG_INFINITY, 0usize);
        let nodes: Vec<f64> = (0..GRID).map(|i| self.end * (i as f64 + 0.5) / GRID as f64).collect();
        for (i, &v) in nodes.iter().enumerate() {
            let h = self.ln_at(v)?;
            evals += 1;
            if h > best.0 {
                best = (h, i);
            }
        }
        if best.0 == f64::NEG_INFINITY {
            return Err(Error::failure("moment integrand vanishes on the sample grid", None));
        }
        let i = best.1;
        let mut lo = if i == 0 { 0.0 } else { nodes[i - 1] };
        let mut hi = if i + 1 == GRID { self.end } else { nodes[i + 1] };
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = hi - phi * (hi - lo);
        let mut d = lo + phi * (hi - lo);
        let (mut hc, mut hd) = (self.ln_at(c)?, self.ln_at(d)?);
        evals += 2;
        for _ in 0..60 {
            if hi - lo <= 1e-13 * self.end {
                break;
            }
            if hc >= hd {
                hi = d;
                d = c;
                hd = hc;
                c = hi - phi * (hi - lo);
                hc = self.ln_at(c)?;
            } else {
                lo = c;
                c = d;
                hc = hd;
                d = lo + phi * (hi - lo);
                hd = self.ln_at(d)?;
            }
            evals += 1;
        }
        let (v, h) = if hc >= hd { (c, hc) } else { (d, hd) };
        if h >= best.0 {
            Ok((v, h, evals))
        } else {
            Ok((nodes[i], best.0, evals))
        }
    }

    /// Width of the peak from the curvature of the log-integrand.
    fn width(&self, v: f64, h: f64) -> f64 {
        let fallback = self.end / 64.0;
        let delta = 1e-4 * self.end.min(v.max(1e-3)).min((self.end - v).max(1e-3));
        let (Ok(l), Ok(r)) = (self.ln_at(v - delta), self.ln_at(v + delta)) else {
            return fallback;
        };
        let curv = (l - 2.0 * h + r) / (delta * delta);
        if curv < 0.0 && curv.is_finite() {
            (1.0 / (-curv).sqrt()).min(fallback)
        } else {
            fallback
        }
    }
}

/// `ln c_k(F^m)` with relative tolerance `rel_tol`.
pub fn log_moment(profile: &HartogsProfile, k: u32, m: u32, rel_tol: f64) -> Result<LogMoment> {
    let mapped = profile.x0().is_infinite();
    let ig = LogIntegrand {
        profile,
        k: k as f64,
        m: m as f64,
        end: if mapped { 1.0 } else { profile.x0() },
        mapped,
    };
    let (v_peak, h_max, mut evaluations) = ig.peak()?;
    let sigma = ig.width(v_peak, h_max);
    evaluations += 2;

    let mut cuts = vec![0.0, v_peak - 8.0 * sigma, v_peak, v_peak + 8.0 * sigma, ig.end];
    cuts.retain(|&c| (0.0..=ig.end).contains(&c));
    cuts.dedup();
    let scaled = |v: f64| -> Result<f64> {
        let h = ig.ln_at(v)? - h_max;
        Ok(h.exp())
    };
    let mut total = 0.0;
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let r = quadrature::integrate_with(
            &scaled,
            w[0],
            w[1],
            Tolerance::new(rel_tol * 1e-3, rel_tol),
            MAX_PANELS * 15,
        )?;
        total += r.value;
        err += r.abs_error_estimate;
        evaluations += r.evaluations;
    }
    if !(total > 0.0) {
        return Err(Error::failure(format!("moment c_{k}(F^{m}) is not positive"), Some(total)));
    }
    Ok(LogMoment {
        ln_value: h_max + total.ln(),
        rel_error: err / total,
        evaluations,
    })
}

/// `c_k(F^m)` with the default relative tolerance.
pub fn moment(profile: &HartogsProfile, k: u32, m: u32) -> Result<QuadratureResult> {
    log_moment(profile, k, m, MOMENT_TOLERANCE)?.to_result()
}

/// `c_0 .. c_{k_max}` of `F^m`; the first failing order aborts the table.
pub fn moment_table(profile: &HartogsProfile, k_max: u32, m: u32) -> Result<MomentTable> {
    let entries = (0..=k_max)
        .map(|k| {
            moment(profile, k, m).map_err(|e| {
                Error::failure(format!("moment c_{k}(F^{m}) failed: {e}"), None)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentTable { m, entries })
}

/// Thread-safe memo of log-moments for one profile.
///
/// Results depend only on `(k, m)` and the tolerance, so concurrent fills
/// are deterministic.
#[derive(Debug)]
pub struct MomentCache {
    profile: HartogsProfile,
    rel_tol: f64,
    table: RwLock<HashMap<(u32, u32), Result<LogMoment>>>,
}

impl MomentCache {
    pub fn new(profile: HartogsProfile) -> Self {
        Self::with_tolerance(profile, MOMENT_TOLERANCE)
    }

    pub fn with_tolerance(profile: HartogsProfile, rel_tol: f64) -> Self {
        MomentCache {
            profile,
            rel_tol,
            table: RwLock::new(HashMap::new()),
        }
    }

    pub fn profile(&self) -> &HartogsProfile {
        &self.profile
    }

    pub fn log_moment(&self, k: u32, m: u32) -> Result<LogMoment> {
        if let Some(hit) = self.table.read().expect("moment cache poisoned").get(&(k, m)) {
            return hit.clone();
        }
        let value = log_moment(&self.profile, k, m, self.rel_tol);
        self.table
            .write()
            .expect("moment cache poisoned")
            .insert((k, m), value.clone());
        value
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("moment cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
