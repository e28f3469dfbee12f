//! Euler–Maclaurin summation for `ζ(s)` in double precision.

use std::sync::OnceLock;

use num_complex::Complex64;
use rug::{Integer, Rational};

const MAX_TERMS: usize = 30;

/// Bernoulli numbers `B_0..=B_n` by the Akiyama–Tanigawa transform (exact).
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut row: Vec<Rational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(Rational::from((1, (m + 1) as u32)));
        for j in (1..=m).rev() {
            let diff = Rational::from(&row[j - 1] - &row[j]);
            row[j - 1] = diff * Integer::from(j);
        }
        out.push(row[0].clone());
    }
    // the transform yields B_1 = +1/2; the Euler–Maclaurin tail only uses even indices
    out
}

/// `B_{2k} / (2k)!` for `k = 0..MAX_TERMS`, rounded to `f64`.
fn scaled_even_bernoulli() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b = bernoulli_numbers(2 * MAX_TERMS);
        let mut fact = Integer::from(1);
        let mut out = Vec::with_capacity(MAX_TERMS);
        for (i, bi) in b.iter().enumerate() {
            if i > 0 {
                fact *= i as u32;
            }
            if i % 2 == 0 {
                out.push((Rational::from(bi / &fact)).to_f64());
            }
        }
        out
    })
}

/// `ζ(s)` with `n − 1` explicit terms and `m` Bernoulli corrections at `N = n`.
/// Returns the value and a bound of twice the first omitted correction.
pub fn zeta_em(s: Complex64, n: usize, m: usize) -> (Complex64, f64) {
    assert!(n >= 1 && m >= 1 && m < MAX_TERMS);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let n_pow = (-s * nf.ln()).exp();
    sum += n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    let bern = scaled_even_bernoulli();
    let inv_n2 = 1.0 / (nf * nf);
    // rising product s (s+1) … (s+2k−2) times N^{−s−2k+1}
    let mut factor = s * n_pow / nf;
    let mut next = 0.0;
    for k in 1..=m + 1 {
        let term = factor * bern[k];
        if k <= m {
            sum += term;
        } else {
            next = term.norm();
        }
        let kf = k as f64;
        factor *= (s + (2.0 * kf - 1.0)) * (s + 2.0 * kf) * inv_n2;
    }
    (sum, 2.0 * next + 8.0 * f64::EPSILON * sum.norm().max(1.0) * (n as f64).sqrt())
}

/// `ζ(½ + it)` with a cutoff suited to `|t| ≤ ~100`.
pub fn zeta_critical_em(t: f64) -> (Complex64, f64) {
    let n = (t.abs() / 2.0).ceil() as usize + 20;
    zeta_em(Complex64::new(0.5, t), n, 14)
}
