//! ζ(s) rebuilt from the prime-counting integral `exp{s ∫₂^∞ π(x)/(x(xˢ−1)) dx}`.
//!
//! On `[p_k, p_{k+1})` the count is constant and `(1/s)·ln(1 − x⁻ˢ)` is an
//! antiderivative, so the integral up to a cut `X` sums exactly to
//! `−Σ_{p≤X} ln(1 − p⁻ˢ) + π(X)·ln(1 − X⁻ˢ)`. The part beyond `X` is bounded
//! with `π(x) < 1.25506·x/ln x`.

use serde::Serialize;

use super::primes::{shared_sieve, PRIME_MAX};
use crate::error::{Error, Result};

/// Default bound on the neglected tail of the exponent.
pub const DEFAULT_TAIL_TOL: f64 = 2e-7;
const PI_UPPER: f64 = 1.255_06;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerReconstruction {
    pub s: f64,
    pub zeta: f64,
    pub cut: u64,
    /// Bound on the omitted part of the exponent; `zeta` underestimates by at
    /// most a factor `exp(tail_bound)`.
    pub tail_bound: f64,
}

fn tail_bound(s: f64, x: f64) -> f64 {
    PI_UPPER * s * x.powf(1.0 - s) / ((s - 1.0) * x.ln() * (1.0 - x.powf(-s)))
}

/// Reconstructed ζ(s) for `1.5 ≤ s ≤ 6` with the default tail tolerance.
pub fn euler_pi_representation(s: f64) -> Result<f64> {
    Ok(euler_pi_representation_with(s, DEFAULT_TAIL_TOL)?.zeta)
}

pub fn euler_pi_representation_with(s: f64, tail_tol: f64) -> Result<EulerReconstruction> {
    if !(1.5..=6.0).contains(&s) {
        return Err(Error::domain("euler_pi_representation", s, "1.5 <= s <= 6"));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::precondition("euler_pi_representation", "tail tolerance must be positive"));
    }
    let mut cut = 1000.0f64;
    while tail_bound(s, cut) > tail_tol && cut < PRIME_MAX as f64 {
        cut = (cut * 1.5).min(PRIME_MAX as f64);
    }
    let bound = tail_bound(s, cut);
    if bound > tail_tol {
        return Err(Error::TailBound { bound, tol: tail_tol });
    }
    let cut = cut.ceil() as u64;
    let sieve = shared_sieve(cut)?;
    let mut exponent = 0.0;
    let mut count = 0u64;
    for p in sieve.primes().take_while(|&p| p <= cut) {
        exponent -= (-(p as f64).powf(-s)).ln_1p();
        count += 1;
    }
    exponent += count as f64 * (-(cut as f64).powf(-s)).ln_1p();
    Ok(EulerReconstruction {
        s,
        zeta: exponent.exp(),
        cut,
        tail_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basel() {
        let pi = std::f64::consts::PI;
        let r = euler_pi_representation_with(2.0, DEFAULT_TAIL_TOL).unwrap();
        assert!((r.zeta - pi * pi / 6.0).abs() < 1e-6);
        assert!(r.zeta <= pi * pi / 6.0);
        assert!(euler_pi_representation(1.4).is_err());
        assert!(euler_pi_representation(6.5).is_err());
    }

    #[test]
    fn tail_tolerance_is_enforced() {
        assert!(matches!(
            euler_pi_representation_with(1.5, 1e-9),
            Err(Error::TailBound { .. })
        ));
    }
}
