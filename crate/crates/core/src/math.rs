//! Thin wrappers over `libm` plus the handful of numeric helpers shared by
//! the estimator and oracle code paths.

/// z-score of the two-sided 95% normal interval.
pub const Z95: f64 = 1.959963984540054;
/// z-score of the two-sided 99% normal interval.
pub const Z99: f64 = 2.5758293035489004;

pub const SQRT3: f64 = 1.7320508075688772;
pub const PI: f64 = core::f64::consts::PI;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// ln Γ(x+1) = ln x! for integer arguments, via Stirling's series with the
/// small-argument range handled by direct products.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut acc = 1.0_f64;
        for k in 2..=n {
            acc *= k as f64;
        }
        ln(acc)
    } else {
        // Stirling with 3 correction terms; absolute error < 1e-12 for n > 20.
        let x = n as f64;
        let x3 = x * x * x;
        (x + 0.5) * ln(x) - x + 0.5 * ln(2.0 * PI) + 1.0 / (12.0 * x) - 1.0 / (360.0 * x3)
            + 1.0 / (1260.0 * x3 * x * x)
    }
}

/// ln C(n, k), stable for the binomial weights used by microcanonical smoothing.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Wilson score interval for a binomial proportion.
///
/// Returns `(p_hat, low, high)`. Chosen over the Wald interval because the
/// near-critical estimates live close to 0 and 1 where Wald coverage
/// collapses.
pub fn wilson_interval(successes: u64, samples: u64, z: f64) -> (f64, f64, f64) {
    debug_assert!(samples > 0);
    let n = samples as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
    // exact endpoints keep "CI excludes 0/1" tests free of rounding noise
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == samples {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (p_hat, low, high)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_products() {
        // 25! = 15511210043330985984000000
        let exact = 15511210043330985984000000.0_f64;
        assert!((ln_factorial(25) - ln(exact)).abs() < 1e-12);
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - ln(120.0)).abs() < 1e-14);
    }

    #[test]
    fn ln_choose_small_cases() {
        assert!((ln_choose(4, 2) - ln(6.0)).abs() < 1e-13);
        assert!((ln_choose(52, 5) - ln(2598960.0)).abs() < 1e-11);
    }

    #[test]
    fn wilson_contains_p_hat() {
        for &(s, n) in &[(0u64, 10u64), (10, 10), (3, 10), (500, 1000), (1, 100000)] {
            let (p, lo, hi) = wilson_interval(s, n, Z95);
            assert!(lo <= p + 1e-15 && p <= hi + 1e-15, "{s}/{n}: {lo} {p} {hi}");
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn wilson_width_shrinks_like_inverse_sqrt() {
        let w = |n: u64| {
            let (_, lo, hi) = wilson_interval(n / 2, n, Z95);
            hi - lo
        };
        let ratio = w(1000) / w(4000);
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
    }
}
