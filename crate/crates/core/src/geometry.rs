//! The Kähler metric `g_{αβ̄} = ∂_α ∂_β̄ Φ_F`, its volume element and scalar
//! curvature.
//!
//! With `x = |z_0|²`, `s = Σ_{k≥1} |z_k|²` and `D = F(x) - s` the components are
//!
//! ```text
//! g_{00̄} = Φ_x + x Φ_xx        g_{0k̄} = Φ_xs z̄_0 z_k
//! g_{k0̄} = Φ_xs z_0 z̄_k        g_{kl̄} = Φ_s δ_kl + Φ_ss z̄_k z_l
//! ```
//!
//! where `Φ_x = -F'/D`, `Φ_s = 1/D`, `Φ_xx = -F''/D + F'²/D²`, `Φ_xs = -F'/D²`
//! and `Φ_ss = 1/D²`.
//!
//! Curvature convention: `R_{αβ̄} = -∂_α ∂_β̄ log det g` and `S = 2 tr(g⁻¹ R)`,
//! so the ball of dimension `n` has `S = -2n(n+1)`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profile::{DomainPoint, HartogsProfile};

pub const DEFAULT_STEP: f64 = 1e-4;
/// Step of the `ln G` differences in [`scalar_curvature`], about `ε^{1/6}`.
pub const CURVATURE_STEP: f64 = 2e-3;
/// Stencils must stay this many steps inside the domain.
pub const MARGIN_STEPS: f64 = 4.0;
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub point: DomainPoint,
    pub g: DMatrix<Complex64>,
    pub det_g: f64,
    pub scalar_curvature: Option<f64>,
}

impl MetricSample {
    /// Eigenvalues of the Hermitian matrix `g`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.g.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.g.nrows();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                worst = worst.max((self.g[(a, b)] - self.g[(b, a)].conj()).norm());
            }
        }
        worst
    }
}

struct Radial {
    phi_x: f64,
    phi_s: f64,
    phi_xx: f64,
    phi_xs: f64,
    phi_ss: f64,
}

fn radial(profile: &HartogsProfile, p: &DomainPoint) -> Result<Radial> {
    let (_, d) = profile.guarded(p.x(), p.s())?;
    let (_, d1, d2) = profile.jet(p.x())?;
    Ok(Radial {
        phi_x: -d1 / d,
        phi_s: 1.0 / d,
        phi_xx: -d2 / d + d1 * d1 / (d * d),
        phi_xs: -d1 / (d * d),
        phi_ss: 1.0 / (d * d),
    })
}

/// Hermitian matrix with the radial component structure of `g`.
fn assemble(z: &[Complex64], a: f64, a_x: f64, a_xs: f64, a_s: f64, a_ss: f64) -> DMatrix<Complex64> {
    let n = z.len();
    let x = z[0].norm_sqr();
    DMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => Complex64::new(a + x * a_x, 0.0),
        (0, k) => z[0].conj() * z[k] * a_xs,
        (k, 0) => z[0] * z[k].conj() * a_xs,
        (k, l) => {
            let diag = if k == l { a_s } else { 0.0 };
            z[k].conj() * z[l] * a_ss + diag
        }
    })
}

fn hermitian_det(g: &DMatrix<Complex64>) -> Result<f64> {
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::failure("metric is not positive definite", None))?;
    Ok(chol.l_dirty().diagonal().iter().map(|v| v.norm_sqr()).product())
}

/// The metric at `p`, assembled from the 2-jet of `F`.
pub fn metric_tensor(profile: &HartogsProfile, p: &DomainPoint) -> Result<MetricSample> {
    let r = radial(profile, p)?;
    let g = assemble(p.coords(), r.phi_x, r.phi_xx, r.phi_xs, r.phi_s, r.phi_ss);
    let det_g = hermitian_det(&g)?;
    Ok(MetricSample {
        point: p.clone(),
        g,
        det_g,
        scalar_curvature: None,
    })
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("finite-difference step must be positive, got {h}")));
    }
    Ok(())
}

fn displaced(p: &DomainPoint, k: usize, real: bool, delta: f64) -> DomainPoint {
    let mut c = p.coords().to_vec();
    c[k] += if real {
        Complex64::new(delta, 0.0)
    } else {
        Complex64::new(0.0, delta)
    };
    DomainPoint::new(c)
}

fn check_margin(profile: &HartogsProfile, p: &DomainPoint, h: f64) -> Result<()> {
    for k in 0..p.dim() {
        for real in [true, false] {
            for sign in [1.0, -1.0] {
                let q = displaced(p, k, real, sign * MARGIN_STEPS * h);
                if profile.potential(&q).is_err() {
                    return Err(Error::domain(format!(
                        "point lacks a margin of {} in coordinate {k}",
                        MARGIN_STEPS * h
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Central-difference Wirtinger Hessian `∂_α ∂_β̄ f` with real and imaginary
/// displacements of size `h`.
fn wirtinger_hessian<F>(f: F, p: &DomainPoint, h: f64) -> Result<DMatrix<Complex64>>
where
    F: Fn(&DomainPoint) -> Result<f64>,
{
    let n = p.dim();
    // mixed[(2a + ra, 2b + rb)] = ∂²f / ∂u_a ∂u_b over the real coordinates u
    let mut mixed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for ia in 0..2 * n {
        for ib in ia..2 * n {
            let at = |sa: f64, sb: f64| {
                let q = displaced(p, ia / 2, ia % 2 == 0, sa * h);
                f(&displaced(&q, ib / 2, ib % 2 == 0, sb * h))
            };
            let v = if ia == ib {
                let c = f(p)?;
                let q = |sa: f64| f(&displaced(p, ia / 2, ia % 2 == 0, sa * h));
                (q(1.0)? - 2.0 * c + q(-1.0)?) / (h * h)
            } else {
                (at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h * h)
            };
            mixed[(ia, ib)] = v;
            mixed[(ib, ia)] = v;
        }
    }
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        Complex64::new(
            mixed[(xa, xb)] + mixed[(ya, yb)],
            mixed[(xa, yb)] - mixed[(ya, xb)],
        ) * 0.25
    }))
}

/// Max abs deviation between [`metric_tensor`] and a central-difference
/// Wirtinger Hessian of `Φ_F` with step `h`.
pub fn metric_fd_check(profile: &HartogsProfile, p: &DomainPoint, h: f64) -> Result<f64> {
    check_step(h)?;
    check_margin(profile, p, h)?;
    let analytic = metric_tensor(profile, p)?.g;
    let numeric = wirtinger_hessian(|q| profile.potential(q), p, h)?;
    Ok((analytic - numeric).iter().map(|v| v.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeDensity {
    pub det_g: f64,
    /// `F(x)² G(x) / D^{n+1}`
    pub closed_form: f64,
    pub defect: f64,
}

pub fn volume_density(profile: &HartogsProfile, p: &DomainPoint) -> Result<VolumeDensity> {
    let sample = metric_tensor(profile, p)?;
    let closed_form = ln_det_closed(profile, p)?.exp();
    Ok(VolumeDensity {
        det_g: sample.det_g,
        closed_form,
        defect: (sample.det_g - closed_form).abs() / closed_form,
    })
}

/// `ln(F² G / D^{n+1})`
pub fn ln_det_closed(profile: &HartogsProfile, p: &DomainPoint) -> Result<f64> {
    let (f, d) = profile.guarded(p.x(), p.s())?;
    let g = profile.g_of(p.x())?;
    Ok(2.0 * f.ln() + g.ln() - (p.dim() as f64 + 1.0) * d.ln())
}

/// `(χ', χ'')` for the radial part `χ = 2 ln F + ln G` of `ln det g`.
///
/// `ln F` is differentiated through its jet, `ln G` by central differences in
/// `x` with one Richardson step; near `x = 0` a one-sided stencil is used.
fn chi_derivatives(profile: &HartogsProfile, x: f64, h: f64) -> Result<(f64, f64)> {
    let (_, l1, l2) = profile.log_jet(x)?;
    let hx = h * x.max(1.0);
    if !(x + MARGIN_STEPS * hx < profile.x0()) {
        return Err(Error::domain(format!("x = {x} lacks a margin of {} below x0", MARGIN_STEPS * hx)));
    }
    let ln_g = |t: f64| profile.g_of(t).map(f64::ln);
    let stencil = |h: f64| -> Result<(f64, f64)> {
        if x >= 2.0 * h {
            let (m1, c, p1) = (ln_g(x - h)?, ln_g(x)?, ln_g(x + h)?);
            Ok(((p1 - m1) / (2.0 * h), (p1 - 2.0 * c + m1) / (h * h)))
        } else {
            let v: Vec<f64> = (0..4).map(|k| ln_g(x + k as f64 * h)).collect::<Result<_>>()?;
            Ok((
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h),
                (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h),
            ))
        }
    };
    let (d1h, d2h) = stencil(hx)?;
    let (d1q, d2q) = stencil(0.5 * hx)?;
    let g1 = (4.0 * d1q - d1h) / 3.0;
    let g2 = (4.0 * d2q - d2h) / 3.0;
    Ok((2.0 * l1 + g1, 2.0 * l2 + g2))
}

/// Scalar curvature `S = 2 tr(g⁻¹ R)` at `p`; `ln G` is differenced with step
/// `h·max(1, x)`.
pub fn scalar_curvature(profile: &HartogsProfile, p: &DomainPoint, h: f64) -> Result<f64> {
    check_step(h)?;
    let sample = metric_tensor(profile, p)?;
    let ev = sample.eigenvalues();
    let condition = ev[ev.len() - 1] / ev[0];
    if !(condition <= MAX_CONDITION) {
        return Err(Error::failure(format!("metric condition number {condition:e} exceeds {MAX_CONDITION:e}"), None));
    }
    let (c1, c2) = chi_derivatives(profile, p.x(), h)?;
    let n = p.dim();
    // ln det g = χ(x) - (n+1) ln D, and -∂∂̄ ln D = g
    let r = sample.g.map(|v| v * -(n as f64 + 1.0)) - assemble(p.coords(), c1, c2, 0.0, 0.0, 0.0);
    let inv = sample
        .g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::failure("metric is not positive definite", None))?
        .inverse();
    Ok(2.0 * (inv * r).trace().re)
}

/// [`metric_tensor`] with the scalar curvature filled in.
pub fn metric_with_curvature(profile: &HartogsProfile, p: &DomainPoint, h: f64) -> Result<MetricSample> {
    let mut sample = metric_tensor(profile, p)?;
    sample.scalar_curvature = Some(scalar_curvature(profile, p, h)?);
    Ok(sample)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePoint {
    pub point: DomainPoint,
    pub x: f64,
    pub w: f64,
    pub scalar_curvature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureScan {
    pub constant: bool,
    /// `(max - min) / |mean|`
    pub spread: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub points: Vec<CurvaturePoint>,
    pub dropped: Vec<String>,
}

pub fn curvature_scan(profile: &HartogsProfile, grid: &[DomainPoint], h: f64, tol: f64) -> Result<CurvatureScan> {
    check_step(h)?;
    let results: Vec<Result<CurvaturePoint>> = grid
        .par_iter()
        .map(|p| {
            let s = scalar_curvature(profile, p, h)?;
            Ok(CurvaturePoint {
                point: p.clone(),
                x: p.x(),
                w: profile.w_of(p)?,
                scalar_curvature: s,
            })
        })
        .collect();
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (r, p) in results.into_iter().zip(grid) {
        match r {
            Ok(c) => points.push(c),
            Err(e) => dropped.push(format!("x = {}, s = {}: {e}", p.x(), p.s())),
        }
    }
    if points.is_empty() {
        return Err(Error::failure(
            format!("curvature failed at every grid point ({})", dropped.join("; ")),
            None,
        ));
    }
    let (lo, hi, sum) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, sum), c| {
        (lo.min(c.scalar_curvature), hi.max(c.scalar_curvature), sum + c.scalar_curvature)
    });
    let mean = sum / points.len() as f64;
    let spread = (hi - lo) / mean.abs();
    Ok(CurvatureScan {
        constant: spread <= tol,
        spread,
        mean,
        tolerance: tol,
        points,
        dropped,
    })
}

/// A `size × size` grid over `(0, x_max) × (0, w_max)` at cell centres,
/// lifted to points; for `n = 1` only `w = 0` is used.
pub fn xw_grid(profile: &HartogsProfile, n: usize, size: usize, x_max: f64, w_max: f64) -> Result<Vec<DomainPoint>> {
    let centre = |i: usize| (i as f64 + 0.5) / size as f64;
    let ws: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        (0..size).map(|j| w_max * centre(j)).collect()
    };
    let mut out = Vec::with_capacity(size * ws.len());
    for i in 0..size {
        for &w in &ws {
            out.push(profile.point_from_xw(x_max * centre(i), w, n)?);
        }
    }
    Ok(out)
}
