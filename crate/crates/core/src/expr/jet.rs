//! Degree-2 truncated Taylor arithmetic.
//!
//! A `Jet2` carries `(f, f', f'')` of a univariate function at a point.
//! Every operation applies the second-order chain rule
//! `(g∘u)'' = g''(u) u'^2 + g'(u) u''`, so results are exact up to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet2 { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Jet2::new(v, 0.0, 0.0)
    }

    /// The identity function evaluated at `x`.
    pub const fn variable(x: f64) -> Self {
        Jet2::new(x, 1.0, 0.0)
    }

    /// Composes a scalar function given by its value and first two derivatives at `self.v`.
    #[inline]
    pub fn compose(self, g: f64, g1: f64, g2: f64) -> Self {
        Jet2::new(g, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    /// Natural log; caller guarantees `v > 0`.
    pub fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.compose(self.v.ln(), r, -r * r)
    }

    /// Square root; caller guarantees `v > 0`.
    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.v))
    }

    /// Integer power, valid for any base (negative exponents need `v != 0`).
    pub fn powi(self, n: i32) -> Self {
        let nf = n as f64;
        let g = self.v.powi(n);
        let g1 = if n == 0 { 0.0 } else { nf * self.v.powi(n - 1) };
        let g2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * self.v.powi(n - 2)
        };
        self.compose(g, g1, g2)
    }

    /// Real power of a positive base.
    pub fn powf(self, a: f64) -> Self {
        let g = self.v.powf(a);
        let g1 = a * g / self.v;
        let g2 = a * (a - 1.0) * g / (self.v * self.v);
        self.compose(g, g1, g2)
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        // u / v = u * (1/v)
        let r = 1.0 / o.v;
        let inv = o.compose(r, -r * r, 2.0 * r * r * r);
        self * inv
    }
}
