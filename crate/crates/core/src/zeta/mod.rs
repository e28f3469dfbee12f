//! The zeta function on the critical line and on the real axis.
//!
//! `Z(t)` is evaluated by Euler–Maclaurin summation for `10 ≤ t < 50` and by
//! the Riemann–Siegel formula with five correction terms from `t = 50` on.

mod argument;
pub mod euler_maclaurin;
pub mod riemann_siegel;
mod theta;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use argument::{ArgumentSample, ArgumentTrack};
pub use theta::{ln_gamma, theta, theta_derivative, theta_unchecked};

/// Smallest height accepted by [`z_function`].
pub const Z_MIN_HEIGHT: f64 = 10.0;
/// Height at which evaluation switches to Riemann–Siegel.
pub const RIEMANN_SIEGEL_FROM: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RiemannSiegel,
    EulerMaclaurin,
}

/// One evaluation of `Z(t)` and `|ζ(½+it)|²`.
///
/// `z_abs_error` bounds `|Z − Z_exact|` for the method used; `est_abs_error`
/// is the induced bound `2|Z|·e + e²` on `modulus_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSample {
    pub t: f64,
    pub z_value: f64,
    pub modulus_sq: f64,
    pub method: Method,
    pub z_abs_error: f64,
    pub est_abs_error: f64,
}

impl CriticalSample {
    fn new(t: f64, z: f64, method: Method, z_err: f64) -> Self {
        Self {
            t,
            z_value: z,
            modulus_sq: z * z,
            method,
            z_abs_error: z_err,
            est_abs_error: 2.0 * z.abs() * z_err + z_err * z_err,
        }
    }
}

/// `Z(t)` with its error bound and method, without a domain check.
pub(crate) fn z_value_unchecked(t: f64) -> (f64, f64, Method) {
    if t >= RIEMANN_SIEGEL_FROM {
        (
            riemann_siegel::z_riemann_siegel(t),
            riemann_siegel::riemann_siegel_error_bound(t),
            Method::RiemannSiegel,
        )
    } else {
        let (zeta, err) = euler_maclaurin::zeta_critical_em(t);
        let z = (Complex64::from_polar(1.0, theta_unchecked(t)) * zeta).re;
        (z, err + 1e-14 * z.abs().max(1.0), Method::EulerMaclaurin)
    }
}

/// `Z(t)` and `|ζ(½+it)|²` for `t ≥ 10`.
pub fn z_function(t: f64) -> Result<CriticalSample> {
    if !(t >= Z_MIN_HEIGHT) || !t.is_finite() {
        return Err(Error::domain("z_function", t, "t >= 10"));
    }
    let (z, err, method) = z_value_unchecked(t);
    Ok(CriticalSample::new(t, z, method, err))
}

/// `|ζ(½+it)|²` alone, for quadrature inner loops (`t ≥ 10` assumed).
#[inline]
pub fn modulus_sq_unchecked(t: f64) -> f64 {
    let z = z_value_unchecked(t).0;
    z * z
}

/// Evaluates an ascending list of heights in parallel on the current rayon
/// pool. Results are identical to pointwise [`z_function`] calls.
pub fn modulus_sq_batch(ts: &[f64]) -> Result<Vec<CriticalSample>> {
    for (i, &t) in ts.iter().enumerate() {
        if !(t >= Z_MIN_HEIGHT) || !t.is_finite() {
            return Err(Error::InvalidInput {
                op: "modulus_sq_batch",
                index: i,
                message: format!("t = {t} is below 10"),
            });
        }
        if i > 0 && t < ts[i - 1] {
            return Err(Error::InvalidInput {
                op: "modulus_sq_batch",
                index: i,
                message: format!("not ascending: {t} after {}", ts[i - 1]),
            });
        }
    }
    Ok(ts
        .par_iter()
        .with_min_len(1024)
        .map(|&t| {
            let (z, err, method) = z_value_unchecked(t);
            CriticalSample::new(t, z, method, err)
        })
        .collect())
}

/// `ζ(s)` for real `s ≥ 1.1`, absolute error below `1e-10`.
pub fn zeta_real_axis(s: f64) -> Result<f64> {
    if !(s >= 1.1) || !s.is_finite() {
        return Err(Error::domain("zeta_real_axis", s, "s >= 1.1"));
    }
    let (z, _) = euler_maclaurin::zeta_em(Complex64::new(s, 0.0), 20, 14);
    Ok(z.re)
}
