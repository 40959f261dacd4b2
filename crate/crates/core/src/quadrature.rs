//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are bisected in order of decreasing error estimate until the summed
//! estimate meets the tolerance. Only interior nodes are evaluated, so
//! integrable endpoint singularities need no special handling. A semi-infinite
//! interval `[a, ∞)` is mapped onto `[0, 1)` through `t = a + u/(1-u)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Default panel limit.
pub const MAX_PANELS: usize = 1 << 20;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes, centre last.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Stopping rule: `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub const fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> Result<f64> {
        let v = f(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                at: t,
                message: format!("integrand returned {v}"),
            })
        }
    };
    let fc = eval(centre)?;
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (eval(centre - dx)?, eval(centre + dx)?);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        *slot = (f1, f2);
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let scale = half.abs();
    let (res_k, res_abs, res_asc) = (res_k * scale, res_abs * scale, res_asc * scale);
    let mut err = ((res_k - res_g * scale)).abs();
    // QUADPACK error scaling
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        value: res_k,
        err,
    })
}

/// Integrates `f` over `[a, b]` (`b` may be `+∞`) to `tol · max(1, |value|)`.
///
/// A `NaN` or infinite integrand value is reported as an evaluation error.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_with(&|t| Ok(f(t)), a, b, Tolerance::new(tol, tol), MAX_PANELS * 15)
}

/// Like [`integrate`] with a fallible integrand, an explicit tolerance and an
/// evaluation budget.
pub fn integrate_with<F>(
    f: &F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_evaluations: usize,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(tol.abs >= 0.0 && tol.rel >= 0.0) || (tol.abs == 0.0 && tol.rel == 0.0) {
        return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
    }
    if a.is_nan() || b.is_nan() || !a.is_finite() || b < a {
        return Err(Error::InvalidInput(format!("bad interval [{a}, {b}]")));
    }
    if b.is_infinite() {
        let mapped = |u: f64| -> Result<f64> {
            let r = 1.0 / (1.0 - u);
            let v = f(a + u * r)?;
            // underflowed integrand at huge t: drop the Jacobian
            Ok(if v == 0.0 { 0.0 } else { v * r * r })
        };
        return adaptive(&mapped, 0.0, 1.0, tol, max_evaluations);
    }
    adaptive(f, a, b, tol, max_evaluations)
}

fn adaptive<F>(f: &F, a: f64, b: f64, tol: Tolerance, max_evaluations: usize) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let first = gk15(f, a, b)?;
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.err;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        if error <= tol.target(value) {
            break;
        }
        let fail = |reason: String, value: f64| Err(Error::failure(reason, Some(value)));
        if heap.len() >= MAX_PANELS {
            return fail(format!("panel limit reached (error estimate {error:e})"), value);
        }
        if evaluations + 30 > max_evaluations {
            return fail(format!("evaluation budget exhausted (error estimate {error:e})"), value);
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if worst.b - worst.a <= 1e4 * f64::EPSILON * scale || mid <= worst.a || mid >= worst.b {
            return fail(
                format!(
                    "panel [{}, {}] can no longer be subdivided (error estimate {error:e})",
                    worst.a, worst.b
                ),
                value,
            );
        }
        let left = gk15(f, worst.a, mid)?;
        let right = gk15(f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        // periodic exact re-summation against drift
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.err).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let abs_error_estimate = heap.iter().map(|p| p.err).sum();
    Ok(QuadratureResult {
        value,
        abs_error_estimate,
        evaluations,
    })
}
