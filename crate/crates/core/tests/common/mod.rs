//! Independent high-precision reference evaluations shared by the integration tests.
//!
//! Everything here runs in 256-bit MPFR arithmetic and shares no code with the
//! library's double-precision engine.
#![allow(dead_code)]

use std::sync::OnceLock;

use rug::float::Constant;
use rug::{Float, Integer, Rational};

pub const PREC: u32 = 256;

fn f(v: f64) -> Float {
    Float::with_val(PREC, v)
}

#[derive(Clone)]
pub struct C {
    pub re: Float,
    pub im: Float,
}

impl C {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }
    pub fn mul(&self, o: &C) -> C {
        let re = Float::with_val(PREC, &self.re * &o.re) - Float::with_val(PREC, &self.im * &o.im);
        let im = Float::with_val(PREC, &self.re * &o.im) + Float::with_val(PREC, &self.im * &o.re);
        C { re, im }
    }
    pub fn add(&self, o: &C) -> C {
        C {
            re: Float::with_val(PREC, &self.re + &o.re),
            im: Float::with_val(PREC, &self.im + &o.im),
        }
    }
    pub fn scale(&self, k: &Float) -> C {
        C {
            re: Float::with_val(PREC, &self.re * k),
            im: Float::with_val(PREC, &self.im * k),
        }
    }
    pub fn div(&self, o: &C) -> C {
        let den = Float::with_val(PREC, o.re.square_ref()) + Float::with_val(PREC, o.im.square_ref());
        let re = (Float::with_val(PREC, &self.re * &o.re) + Float::with_val(PREC, &self.im * &o.im)) / &den;
        let im = (Float::with_val(PREC, &self.im * &o.re) - Float::with_val(PREC, &self.re * &o.im)) / &den;
        C { re, im }
    }
    pub fn ln(&self) -> C {
        let r2 = Float::with_val(PREC, self.re.square_ref()) + Float::with_val(PREC, self.im.square_ref());
        C {
            re: r2.ln() / 2u32,
            im: Float::with_val(PREC, self.im.atan2_ref(&self.re)),
        }
    }
    /// `k^{−s}` for real `k > 0`, `s = σ + it`.
    pub fn real_pow_neg(k: &Float, s: &C) -> C {
        let lk = Float::with_val(PREC, k.ln_ref());
        let modulus = Float::with_val(PREC, -(Float::with_val(PREC, &s.re * &lk))).exp();
        let phase = Float::with_val(PREC, -(Float::with_val(PREC, &s.im * &lk)));
        let (sin, cos) = phase.sin_cos(Float::new(PREC));
        C {
            re: Float::with_val(PREC, &modulus * &cos),
            im: modulus * sin,
        }
    }
}

/// Bernoulli numbers `B_0..=B_160`, cached.
pub fn bernoulli_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| bernoulli(160))
}

/// Bernoulli numbers by `B_m = −1/(m+1) Σ_{k<m} C(m+1, k) B_k`.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::from(1)];
    for m in 1..=n {
        let mut acc = Rational::new();
        for (k, bk) in b.iter().enumerate() {
            let binom = Integer::from(Integer::binomial_u(m as u32 + 1, k as u32));
            acc += Rational::from(bk * &binom);
        }
        b.push(-acc / Integer::from(m + 1));
    }
    b
}

fn smallest_prime_factors(n: usize) -> Vec<usize> {
    let mut spf = vec![0usize; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    spf
}

/// `ζ(s)` by Euler–Maclaurin with `n` explicit terms and `m` corrections.
pub fn zeta(s: &C, n: usize, m: usize) -> C {
    let spf = smallest_prime_factors(n);
    let mut powers: Vec<C> = Vec::with_capacity(n + 1);
    powers.push(C::new(f(0.0), f(0.0)));
    powers.push(C::new(f(1.0), f(0.0)));
    let mut sum = C::new(f(1.0), f(0.0));
    for k in 2..=n {
        let p = spf[k];
        let v = if p == k {
            C::real_pow_neg(&Float::with_val(PREC, k as u32), s)
        } else {
            powers[p].mul(&powers[k / p])
        };
        if k < n {
            sum = sum.add(&v);
        }
        powers.push(v);
    }
    let nf = Float::with_val(PREC, n as u32);
    let n_pow = powers[n].clone();
    let s_minus_1 = C::new(Float::with_val(PREC, &s.re - 1u32), s.im.clone());
    sum = sum.add(&n_pow.scale(&nf).div(&s_minus_1));
    sum = sum.add(&n_pow.scale(&f(0.5)));
    let bern = bernoulli_table();
    let inv_n = Float::with_val(PREC, 1u32) / &nf;
    let inv_n2 = Float::with_val(PREC, inv_n.square_ref());
    let mut factor = s.mul(&n_pow).scale(&inv_n);
    let mut fact = Integer::from(2);
    for j in 1..=m {
        let coef = Float::with_val(PREC, &bern[2 * j]) / Float::with_val(PREC, &fact);
        sum = sum.add(&factor.scale(&coef));
        let a = C::new(Float::with_val(PREC, &s.re + (2 * j - 1) as u32), s.im.clone());
        let b = C::new(Float::with_val(PREC, &s.re + (2 * j) as u32), s.im.clone());
        factor = factor.mul(&a).mul(&b).scale(&inv_n2);
        fact *= ((2 * j + 1) * (2 * j + 2)) as u32;
    }
    sum
}

/// `ζ(½ + it)` with a cutoff adequate for ~50 digits up to `t ≈ 10⁴`.
pub fn zeta_critical(t: f64) -> C {
    let n = (0.64 * (t.abs() + 90.0)) as usize;
    zeta(&C::new(f(0.5), f(t)), n, 45)
}

/// Continuous `Im ln Γ(z)` with `Re z > 0`, by Stirling after shifting to `|z| ≥ 60`.
pub fn ln_gamma(z: &C) -> C {
    let mut w = z.clone();
    let mut shift = C::new(f(0.0), f(0.0));
    loop {
        let r2 = Float::with_val(PREC, w.re.square_ref()) + Float::with_val(PREC, w.im.square_ref());
        if r2 >= 3600u32 {
            break;
        }
        shift = shift.add(&w.ln());
        w.re += 1u32;
    }
    let lw = w.ln();
    let half = C::new(Float::with_val(PREC, &w.re - f(0.5)), w.im.clone());
    let mut out = half.mul(&lw);
    out.re -= &w.re;
    out.im -= &w.im;
    let ln2pi = Float::with_val(PREC, Constant::Pi) * 2u32;
    out.re += ln2pi.ln() / 2u32;
    let bern = bernoulli_table();
    let inv = C::new(f(1.0), f(0.0)).div(&w);
    let inv2 = inv.mul(&inv);
    let mut pow = inv.clone();
    for k in 1..=40usize {
        let coef = Float::with_val(PREC, &bern[2 * k]) / ((2 * k * (2 * k - 1)) as u32);
        out = out.add(&pow.scale(&coef));
        pow = pow.mul(&inv2);
    }
    C::new(
        Float::with_val(PREC, &out.re - &shift.re),
        Float::with_val(PREC, &out.im - &shift.im),
    )
}

/// `θ(t)` at 256 bits.
pub fn theta(t: f64) -> Float {
    let z = C::new(f(0.25), f(t / 2.0));
    let lg = ln_gamma(&z);
    let pi = Float::with_val(PREC, Constant::Pi);
    lg.im - Float::with_val(PREC, pi.ln_ref()) * f(t / 2.0)
}

/// `Z(t) = Re(e^{iθ(t)} ζ(½+it))` at 256 bits.
pub fn z(t: f64) -> Float {
    let zeta = zeta_critical(t);
    let th = theta(t);
    let (sin, cos) = th.sin_cos(Float::new(PREC));
    Float::with_val(PREC, &zeta.re * &cos) - Float::with_val(PREC, &zeta.im * &sin)
}

pub fn z_f64(t: f64) -> f64 {
    z(t).to_f64()
}

/// Zero of the oracle `Z` in a sign-changing bracket, by bisection.
pub fn z_zero(mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = z_f64(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = z_f64(mid);
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zeros of the oracle `Z` in `[a, b]` found by scanning with step `h`.
pub fn z_zeros(a: f64, b: f64, h: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut u = a;
    let mut zu = z_f64(u);
    while u < b {
        let v = (u + h).min(b);
        let zv = z_f64(v);
        if (zu < 0.0) != (zv < 0.0) {
            out.push(z_zero(u, v));
        }
        u = v;
        zu = zv;
    }
    out
}

/// `|ζ(½+it)|²` at 256 bits, rounded.
pub fn modulus_sq(t: f64) -> f64 {
    let zeta = zeta_critical(t);
    (Float::with_val(PREC, zeta.re.square_ref()) + Float::with_val(PREC, zeta.im.square_ref())).to_f64()
}

/// `ζ(s)` for real `s > 1` at 256 bits.
pub fn zeta_real(s: f64) -> f64 {
    let z = zeta(&C::new(f(s), f(0.0)), 40, 30);
    z.re.to_f64()
}

/// `ln Γ(x)` for real `x > 0` at 256 bits.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(&C::new(f(x), f(0.0))).re.to_f64()
}
