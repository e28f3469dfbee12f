//! Riemann–Siegel main sum and the first five correction terms.
//!
//! The corrections `C₀…C₄` are polynomials in `x = p − ½`, where `p` is the
//! fractional part of `√(t/2π)`. They are derived from the Taylor series of
//! `Ψ(p) = cos(2π(p² − p − 1/16)) / cos(2πp)`, which is entire; the series
//! division is carried out in 640-bit arithmetic once per process and the
//! resulting coefficients are rounded to `f64`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rug::float::Constant;
use rug::Float;

use super::theta::theta_unchecked;

const PREC: u32 = 640;
const SERIES_LEN: usize = 150;
const POLY_LEN: usize = 64;

/// Coefficients of `C_k(x)` in ascending powers of `x`, for `k = 0..=4`.
pub struct CorrectionPolys {
    pub coeffs: [Vec<f64>; 5],
}

/// Taylor coefficients of `Ψ` about `p = ½`.
fn psi_series() -> Vec<Float> {
    let pi = Float::with_val(PREC, Constant::Pi);
    let two_pi = Float::with_val(PREC, &pi * 2u32);
    // numerator: cos(2πx² − 5π/8) = cos(b)cos(2πx²) − sin(b)sin(2πx²), b = −5π/8
    let b = Float::with_val(PREC, &pi * -5i32) / 8u32;
    let (sin_b, cos_b) = b.sin_cos(Float::new(PREC));
    let mut num = vec![Float::new(PREC); SERIES_LEN];
    let mut den = vec![Float::new(PREC); SERIES_LEN];
    // cos(2πx²) and sin(2πx²): powers of (2π)^m x^{2m} / m!
    let mut term = Float::with_val(PREC, 1);
    let mut m = 0usize;
    while 2 * m < SERIES_LEN {
        let c = Float::with_val(PREC, &term);
        let contrib = match m % 4 {
            0 => Float::with_val(PREC, &cos_b * &c),
            1 => -Float::with_val(PREC, &sin_b * &c),
            2 => -Float::with_val(PREC, &cos_b * &c),
            _ => Float::with_val(PREC, &sin_b * &c),
        };
        num[2 * m] = contrib;
        m += 1;
        term *= &two_pi;
        term /= m as u32;
    }
    // cos(2πx) = Σ (−1)^m (2π)^{2m} x^{2m} / (2m)!
    let mut term = Float::with_val(PREC, 1);
    for (k, slot) in den.iter_mut().enumerate() {
        if k % 2 == 0 {
            *slot = if k % 4 == 0 {
                Float::with_val(PREC, &term)
            } else {
                Float::with_val(PREC, -&term)
            };
        }
        term *= &two_pi;
        term /= (k + 1) as u32;
    }
    // Ψ = −num / den
    let mut q: Vec<Float> = Vec::with_capacity(SERIES_LEN);
    for j in 0..SERIES_LEN {
        let mut acc = Float::with_val(PREC, -&num[j]);
        for i in 1..=j {
            if !den[i].is_zero() {
                acc -= Float::with_val(PREC, &den[i] * &q[j - i]);
            }
        }
        acc /= &den[0];
        q.push(acc);
    }
    q
}

/// Coefficients of the `m`-th derivative of a series.
fn derivative(series: &[Float], m: usize) -> Vec<Float> {
    (0..POLY_LEN)
        .map(|j| {
            let mut c = Float::with_val(PREC, &series[j + m]);
            for k in (j + 1)..=(j + m) {
                c *= k as u32;
            }
            c
        })
        .collect()
}

fn combine(series: &[Float], terms: &[(usize, i64, u64, i32)]) -> Vec<f64> {
    // each term: (derivative order, numerator, denominator, power of π in the denominator)
    let pi = Float::with_val(PREC, Constant::Pi);
    let mut out = vec![Float::new(PREC); POLY_LEN];
    for &(order, num, den, pi_pow) in terms {
        let d = derivative(series, order);
        let mut scale = Float::with_val(PREC, num);
        scale /= Float::with_val(PREC, den);
        for _ in 0..pi_pow {
            scale /= &pi;
        }
        for (o, c) in out.iter_mut().zip(d) {
            *o += c * &scale;
        }
    }
    let mut coeffs: Vec<f64> = out.iter().map(|c| c.to_f64()).collect();
    // drop the tail that cannot matter on |x| ≤ ½
    while coeffs.len() > 1 {
        let last = *coeffs.last().unwrap();
        let weight = 0.5f64.powi(coeffs.len() as i32 - 1);
        if (last * weight).abs() < 1e-22 {
            coeffs.pop();
        } else {
            break;
        }
    }
    coeffs
}

fn build() -> CorrectionPolys {
    let psi = psi_series();
    let c0 = combine(&psi, &[(0, 1, 1, 0)]);
    let c1 = combine(&psi, &[(3, -1, 96, 2)]);
    let c2 = combine(&psi, &[(2, 1, 64, 2), (6, 1, 18432, 4)]);
    let c3 = combine(&psi, &[(1, -1, 64, 2), (5, -1, 3840, 4), (9, -1, 5_308_416, 6)]);
    let c4 = combine(
        &psi,
        &[
            (0, 1, 128, 2),
            (4, 19, 24576, 4),
            (8, 11, 5_898_240, 6),
            (12, 1, 2_038_431_744, 8),
        ],
    );
    CorrectionPolys {
        coeffs: [c0, c1, c2, c3, c4],
    }
}

pub fn correction_polys() -> &'static CorrectionPolys {
    static POLYS: OnceLock<CorrectionPolys> = OnceLock::new();
    POLYS.get_or_init(build)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

const TABLE_LEN: usize = 1 << 13;

struct TermTable {
    ln: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

fn term_table() -> &'static TermTable {
    static TABLE: OnceLock<TermTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ln = (0..TABLE_LEN).map(|n| (n.max(1) as f64).ln()).collect();
        let inv_sqrt = (0..TABLE_LEN)
            .map(|n| 1.0 / (n.max(1) as f64).sqrt())
            .collect();
        TermTable { ln, inv_sqrt }
    })
}

/// `Z(t)` by the Riemann–Siegel formula with corrections `C₀…C₄`.
/// Accurate for `t ≳ 50`; no domain check.
pub fn z_riemann_siegel(t: f64) -> f64 {
    let theta = theta_unchecked(t);
    let a = (t / (2.0 * PI)).sqrt();
    let n_terms = a.floor() as usize;
    let p = a - n_terms as f64;
    let table = term_table();
    let mut main = 0.0;
    for n in 1..=n_terms {
        let (ln_n, w) = if n < TABLE_LEN {
            (table.ln[n], table.inv_sqrt[n])
        } else {
            let nf = n as f64;
            (nf.ln(), 1.0 / nf.sqrt())
        };
        main += w * (theta - t * ln_n).cos();
    }
    main *= 2.0;

    let polys = correction_polys();
    let x = p - 0.5;
    let inv_a = 1.0 / a;
    let mut corr = 0.0;
    let mut scale = 1.0;
    for c in &polys.coeffs {
        corr += scale * horner(c, x);
        scale *= inv_a;
    }
    let sign = if n_terms % 2 == 1 { 1.0 } else { -1.0 };
    main + sign * corr / a.sqrt()
}

/// Truncation bound for [`z_riemann_siegel`], of Gabcke's form `c·t^{−11/4}`,
/// plus the rounding allowance of the `f64` main sum. Gabcke's `c = 0.017`
/// holds from `t = 200`; below that `c = 0.05` is used, which covers the
/// observed error against a 256-bit reference with a factor of three.
pub fn riemann_siegel_error_bound(t: f64) -> f64 {
    let n_terms = (t / (2.0 * PI)).sqrt().floor();
    let c = if t >= 200.0 { 0.017 } else { 0.05 };
    c * t.powf(-2.75) + 4.0 * n_terms.sqrt() * t * t.ln() * f64::EPSILON
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_polynomial_matches_closed_form() {
        let polys = correction_polys();
        for i in 0..=40 {
            let x = -0.5 + i as f64 / 40.0;
            if (x.abs() - 0.25).abs() < 1e-3 {
                continue;
            }
            let direct = -(2.0 * PI * x * x - 5.0 * PI / 8.0).cos() / (2.0 * PI * x).cos();
            let poly = horner(&polys.coeffs[0], x);
            assert!((direct - poly).abs() < 1e-13, "x={x}: {direct} vs {poly}");
        }
    }

    #[test]
    fn corrections_are_bounded_on_unit_interval() {
        let polys = correction_polys();
        for (k, c) in polys.coeffs.iter().enumerate() {
            for i in 0..=100 {
                let x = -0.5 + i as f64 / 100.0;
                assert!(horner(c, x).abs() < 1.0, "C{k}({x}) too large");
            }
        }
    }
}
