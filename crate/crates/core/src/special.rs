//! Gamma-function helpers: sign-aware log-Gamma, Gamma ratios that stay
//! accurate for large arguments, and binomial coefficients.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this argument the Stirling series is used directly.
const STIRLING_MIN: f64 = 10.0;

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `(ln|Γ(x)|, sign Γ(x))`. Fails at the poles `x = 0, -1, -2, ...`.
pub fn ln_gamma(x: f64) -> Result<(f64, f64)> {
    if is_pole(x) || x.is_nan() {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        // reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let s = (PI * x).sin();
        let (lg, _) = ln_gamma(1.0 - x)?;
        return Ok((PI.ln() - s.abs().ln() - lg, s.signum()));
    }
    if x >= STIRLING_MIN {
        return Ok((stirling_ln_gamma(x), 1.0));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((HALF_LN_2PI + (z + 0.5) * t.ln() - t + acc.ln(), 1.0))
}

/// Tail `ln Γ(z) - [(z - 1/2) ln z - z + ln √(2π)]` of the Stirling series.
fn stirling_correction(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2
            * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))))
}

fn stirling_ln_gamma(z: f64) -> f64 {
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_correction(z)
}

pub fn gamma(x: f64) -> Result<f64> {
    let (lg, sign) = ln_gamma(x)?;
    Ok(sign * lg.exp())
}

/// `1/Γ(x)`, which is zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    match ln_gamma(x) {
        Ok((lg, sign)) => sign * (-lg).exp(),
        Err(_) => 0.0,
    }
}

/// `(ln|Γ(x)/Γ(y)|, sign)`.
///
/// For large arguments the two Stirling expansions are differenced
/// analytically, so the result keeps full relative precision even when
/// `ln Γ` itself is of order `x ln x`.
pub fn ln_gamma_ratio(x: f64, y: f64) -> Result<(f64, f64)> {
    if x >= STIRLING_MIN && y >= STIRLING_MIN {
        let diff = x - y;
        let lead = (x - 0.5) * (diff / y).ln_1p() + diff * y.ln() - diff;
        return Ok((lead + stirling_correction(x) - stirling_correction(y), 1.0));
    }
    let (lx, sx) = ln_gamma(x)?;
    let (ly, sy) = ln_gamma(y)?;
    Ok((lx - ly, sx * sy))
}

/// `Γ(n + a) / Γ(n + b)`.
pub fn gamma_ratio(a: f64, b: f64, n: f64) -> Result<f64> {
    let (l, sign) = ln_gamma_ratio(n + a, n + b)?;
    Ok(sign * l.exp())
}

/// Both sides of
/// `Σ_{i=0}^{n} Γ(i+a)/Γ(i+b) = [Γ(n+a+1)/Γ(n+b) - Γ(a)/Γ(b-1)] / (a-b+1)`.
///
/// The left side is summed term by term using `t_{i+1} = t_i (i+a)/(i+b)`.
pub fn gamma_sum_identity(a: f64, b: f64, n: u64) -> Result<(f64, f64)> {
    if (a - b + 1.0).abs() < 1e-300 {
        return Err(Error::DivisionDomain("a - b + 1 = 0"));
    }
    for arg in [a, b] {
        if is_pole(arg) {
            return Err(Error::GammaPole(arg));
        }
    }
    let mut term = gamma(a)? * recip_gamma(b);
    let mut lhs = term;
    for i in 0..n {
        let i = i as f64;
        term *= (i + a) / (i + b);
        lhs += term;
    }
    let n = n as f64;
    let head = gamma_ratio(a + 1.0, b, n)?;
    let tail = gamma(a)? * recip_gamma(b - 1.0);
    Ok((lhs, (head - tail) / (a - b + 1.0)))
}

pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0).map(|(l, _)| l).unwrap_or(0.0)
    }
}

/// Exact `C(n, k)` when it fits in a `u128`.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral at this point
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// `C(n, k)` as a float, `0` when `k > n`. Exact integer arithmetic where it
/// fits, log-Gamma otherwise.
pub fn binomial(n: u64, k: u64) -> f64 {
    match binomial_exact(n, k) {
        Some(c) => c as f64,
        None => (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_reference_values() {
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-14);
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(-1.5).unwrap(), 4.0 / 3.0 * PI.sqrt()) < 1e-13);
        // ln Γ(100) = ln(99!)
        let exact: f64 = (1..100).map(|k| (k as f64).ln()).sum();
        assert!(rel(ln_gamma(100.0).unwrap().0, exact) < 1e-14);
        assert!(rel(gamma(10.5).unwrap(), 1_133_278.388_948_4) < 1e-12);
    }

    #[test]
    fn poles_are_errors() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-3.0).is_err());
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-2.0), 0.0);
    }

    #[test]
    fn recurrence_across_branches() {
        for &x in &[0.3, 0.9, 1.7, 6.2, 9.5, 9.99, 10.0, 10.01, 37.5, 1234.5] {
            let (a, _) = ln_gamma(x + 1.0).unwrap();
            let (b, _) = ln_gamma(x).unwrap();
            assert!((a - b - x.ln()).abs() < 1e-12 * a.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn ratio_equal_arguments_is_one() {
        assert_eq!(gamma_ratio(2.5, 2.5, 17.0).unwrap(), 1.0);
        assert!((gamma_ratio(0.3, 0.3, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_matches_product() {
        // Γ(n+a)/Γ(n+b) with a - b integer is a finite product
        let (a, b, n) = (3.25, 0.25, 40.0);
        let direct = (n + b) * (n + b + 1.0) * (n + b + 2.0);
        assert!(rel(gamma_ratio(a, b, n).unwrap(), direct) < 1e-14);
        let (a, b, n) = (0.7, 2.7, 3.0);
        let direct = 1.0 / ((n + a) * (n + a + 1.0));
        assert!(rel(gamma_ratio(a, b, n).unwrap(), direct) < 1e-14);
    }

    #[test]
    fn ratio_stirling_limit() {
        let (a, b) = (7.2, 11.8);
        let n = 1e8;
        let scaled = gamma_ratio(a, b, n).unwrap() * n.powf(b - a);
        assert!((scaled - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sum_identity_equal_params() {
        let (lhs, rhs) = gamma_sum_identity(1.5, 1.5, 9).unwrap();
        assert!((lhs - 10.0).abs() < 1e-13);
        assert!((rhs - 10.0).abs() < 1e-12);
    }

    #[test]
    fn sum_identity_fixed_case() {
        let (lhs, rhs) = gamma_sum_identity(2.3, 1.1, 50).unwrap();
        assert!(rel(lhs, rhs) < 1e-10);
        // b = 1 puts Γ(b - 1) on a pole, where its reciprocal vanishes
        let (lhs, rhs) = gamma_sum_identity(3.0, 1.0, 20).unwrap();
        assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn sum_identity_rejects_degenerate() {
        assert!(gamma_sum_identity(1.0, 2.0, 5).is_err());
        assert!(gamma_sum_identity(-1.0, 0.5, 5).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(2, 5), 0.0);
        assert_eq!(binomial(7, 0), 1.0);
        assert_eq!(binomial_exact(64, 32), Some(1_832_624_140_942_590_534));
        let big = binomial(1_000_000, 12);
        let exact_log = ln_factorial(1_000_000) - ln_factorial(12) - ln_factorial(999_988);
        assert!(rel(big.ln(), exact_log) < 1e-12);
    }
}
