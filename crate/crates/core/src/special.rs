//! Log-space factorials.
//!
//! Charge-family coefficients such as `(q + 2r + 1)! / ((q + r)! r!)` overflow
//! `f64` long before the amplitudes they produce do, so every coefficient is
//! assembled from `ln n!` and exponentiated once.

use std::sync::OnceLock;

const TABLE_LEN: usize = 171;

fn table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // n! is exact in f64 up to 22!, and carries one rounding per step beyond.
        let mut out = [0.0; TABLE_LEN];
        let mut fact = 1.0f64;
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            fact *= n as f64;
            *slot = fact.ln();
        }
        out
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return table()[n as usize];
    }
    // Stirling series; the truncation error at n >= 171 is far below f64 resolution.
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// `ln(n!)` for a signed argument; `None` when the argument is negative.
pub fn ln_factorial_signed(n: i64) -> Option<f64> {
    (n >= 0).then(|| ln_factorial(n as u64))
}

/// `sqrt(top! / prod(bottom_i!))` evaluated in log space.
pub fn sqrt_factorial_ratio(top: u64, bottom: &[u64]) -> f64 {
    let mut log = ln_factorial(top);
    for &b in bottom {
        log -= ln_factorial(b);
    }
    (0.5 * log).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials_match_exact_values() {
        let mut exact = 1u128;
        for n in 0..=30u64 {
            if n > 0 {
                exact *= n as u128;
            }
            let rel = (ln_factorial(n) - (exact as f64).ln()).abs();
            assert!(rel < 1e-13, "n = {n}: {rel}");
        }
    }

    #[test]
    fn stirling_branch_is_continuous_with_table() {
        // ln(171!) = ln(170!) + ln(171)
        let lhs = ln_factorial(171);
        let rhs = ln_factorial(170) + 171f64.ln();
        assert!((lhs - rhs).abs() / rhs < 1e-14);
        let lhs = ln_factorial(400);
        let rhs: f64 = (1..=400).map(|k| (k as f64).ln()).sum();
        assert!((lhs - rhs).abs() / rhs < 1e-13);
    }

    #[test]
    fn factorial_ratio_matches_binomial() {
        // sqrt(6! / (3! 3!)) = sqrt(20)
        assert!((sqrt_factorial_ratio(6, &[3, 3]) - 20f64.sqrt()).abs() < 1e-13);
        assert_eq!(ln_factorial_signed(-1), None);
    }
}
