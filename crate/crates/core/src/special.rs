//! Log-space factorials and friends.

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln Π_{i=lo}^{hi} i`; zero for an empty range.
pub fn ln_rising_product(lo: u64, hi: u64) -> f64 {
    if hi < lo {
        return 0.0;
    }
    if hi - lo < 32 {
        return (lo..=hi).map(|i| (i as f64).ln()).sum();
    }
    ln_factorial(hi) - ln_factorial(lo.saturating_sub(1))
}

/// Numerically stable `ln(Σ exp(v_i))`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Running sum of positive terms kept as `exp(scale) * acc`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogAccumulator {
    scale: f64,
    acc: f64,
}

impl LogAccumulator {
    pub fn new() -> Self {
        LogAccumulator {
            scale: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    pub fn add_log(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.scale {
            self.acc = self.acc * (self.scale - log_term).exp() + 1.0;
            self.scale = log_term;
        } else {
            self.acc += (log_term - self.scale).exp();
        }
    }

    pub fn ln(&self) -> f64 {
        if self.acc == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.scale + self.acc.ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_factorial(n: u64) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn small_factorials_match_products() {
        for n in 0..=20 {
            let got = ln_factorial(n).exp();
            let want = exact_factorial(n);
            assert!((got - want).abs() <= 1e-13 * want, "n={n}");
        }
    }

    #[test]
    fn large_factorials_do_not_overflow() {
        let v = ln_factorial(500);
        assert!(v.is_finite() && v > 2000.0);
        // Stirling: ln n! ~ n ln n - n + ln(2 pi n)/2
        let n = 500.0f64;
        let stirling = n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln();
        assert!((v - stirling).abs() < 1e-3);
    }

    #[test]
    fn rising_product_matches_factorial_ratio() {
        assert_eq!(ln_rising_product(5, 4), 0.0);
        assert!((ln_rising_product(2, 3) - 6f64.ln()).abs() < 1e-15);
        let long = ln_rising_product(10, 200);
        assert!((long - (ln_factorial(200) - ln_factorial(9))).abs() < 1e-9);
    }

    #[test]
    fn accumulator_matches_log_sum_exp() {
        let vals = [-3.0, 700.0, 699.5, f64::NEG_INFINITY, 1.0];
        let mut acc = LogAccumulator::new();
        for v in vals {
            acc.add_log(v);
        }
        assert!((acc.ln() - log_sum_exp(&vals)).abs() < 1e-12);
        assert_eq!(LogAccumulator::new().ln(), f64::NEG_INFINITY);
    }
}
