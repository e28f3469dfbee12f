//! The Riemann–Siegel phase `θ(t) = arg Γ(¼ + it/2) − (t/2)·ln π`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `θ(t)` for `t ≥ 1`.
///
/// For `t ≥ 10` the asymptotic series is used with five correction terms
/// beyond `−π/8`; the first omitted term is below `2e-14` there. Smaller `t`
/// go through a shifted Stirling evaluation of `ln Γ`, accurate to ~1e-14.
pub fn theta(t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::domain("theta", t, "t >= 1"));
    }
    Ok(theta_unchecked(t))
}

/// `θ(t)` without the domain check; valid for every `t > 0`.
pub fn theta_unchecked(t: f64) -> f64 {
    if t >= 10.0 {
        let r = 1.0 / t;
        let r2 = r * r;
        let series = r
            * (1.0 / 48.0
                + r2 * (7.0 / 5760.0
                    + r2 * (31.0 / 80640.0 + r2 * (127.0 / 430080.0 + r2 * (511.0 / 1216512.0)))));
        0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0 + series
    } else {
        ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
    }
}

/// `θ'(t)`, used for zero-spacing estimates.
pub fn theta_derivative(t: f64) -> f64 {
    0.5 * (t / (2.0 * PI)).ln()
}

// B_{2k} / (2k (2k − 1)) for k = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Principal-branch-continuous `ln Γ(z)` for `Re z > 0`.
///
/// The imaginary part is the continuous argument obtained from the real
/// axis, which is what `θ` requires.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_heights() {
        assert!(theta(0.5).is_err());
        assert!(theta(1.0).is_ok());
        assert!(theta(f64::NAN).is_err());
    }

    #[test]
    fn branches_agree_at_switch_point() {
        let asym = theta_unchecked(10.0);
        let direct = ln_gamma(Complex64::new(0.25, 5.0)).im - 5.0 * PI.ln();
        assert!((asym - direct).abs() < 1e-12, "{asym} vs {direct}");
    }

    #[test]
    fn ln_gamma_real_values() {
        let g = ln_gamma(Complex64::new(5.0, 0.0));
        assert!((g.re - 24f64.ln()).abs() < 1e-14);
        let half = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
    }
}
