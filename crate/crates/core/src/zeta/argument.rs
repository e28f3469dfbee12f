//! Continuous tracking of `S(t) = (1/π)·arg ζ(½+it)` and its integral `S₁(t)`.
//!
//! On the critical line `ζ(½+it) = e^{−iθ(t)} Z(t)` with `Z` real, so the
//! continuous argument equals `−θ(t)` plus `π` times the number of sign
//! changes of `Z` below `t`, up to the constant fixed at the reference point
//! `u = 2`. This gives the identity `S(t) = N(t) − 1 − θ(t)/π`, where `N(t)`
//! counts zeros in `(0, t]`. The tracker scans `Z` with a step well below
//! the mean zero spacing, refines every sign change, and inspects each local
//! minimum of `|Z|` for a hidden pair of close zeros.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::euler_maclaurin::zeta_em;
use super::theta::theta_unchecked;
use super::z_value_unchecked;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::roots::solve_sign_change;

const REFERENCE_U: f64 = 2.0;
const SCAN_START: f64 = 2.0;
const HEAD_END: f64 = 10.0;
const HEAD_BREAKS: [f64; 7] = [0.0, 0.5, 1.0, 2.0, 4.0, 7.0, 10.0];
// relative bracket width at which a zero counts as refined
const ZERO_TOL: f64 = 1e-14;
const DIP_CELLS: usize = 16;

/// `S(t)` and `S₁(t)` at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgumentSample {
    pub t: f64,
    pub s_value: f64,
    pub s1_value: f64,
}

/// Zeros of `Z` up to a height, with `S₁` accumulated at each zero.
#[derive(Debug, Clone)]
pub struct ArgumentTrack {
    t_max: f64,
    step_scale: f64,
    zeros: Vec<f64>,
    // knots[0] = HEAD_END, knots[k] = k-th zero; s1_knots[k] = S₁(knots[k])
    s1_knots: Vec<f64>,
    // last scanned samples (u, Z(u)), kept for seamless extension
    tail: Vec<(f64, f64)>,
    rule: GaussLegendre,
}

fn scan_step(u: f64, step_scale: f64) -> f64 {
    let ratio = u / (2.0 * PI);
    let spacing = if ratio > std::f64::consts::E {
        2.0 * PI / ratio.ln()
    } else {
        2.0 * PI
    };
    (spacing / 8.0).min(0.25) * step_scale
}

fn z_any(u: f64) -> f64 {
    if u >= 10.0 {
        z_value_unchecked(u).0
    } else {
        let (zeta, _) = zeta_em(Complex64::new(0.5, u), 30, 14);
        (Complex64::from_polar(1.0, theta_unchecked(u)) * zeta).re
    }
}

impl ArgumentTrack {
    /// Tracks zeros up to `t_max`. `step_scale ≤ 1` refines the scan step.
    pub fn new(t_max: f64, step_scale: f64) -> Result<Self> {
        if !(step_scale > 0.0 && step_scale <= 1.0) {
            return Err(Error::domain("argument track", step_scale, "0 < step_scale <= 1"));
        }
        check_reference()?;
        let mut track = Self {
            t_max: SCAN_START,
            step_scale,
            zeros: Vec::new(),
            s1_knots: Vec::new(),
            tail: vec![(SCAN_START, z_any(SCAN_START))],
            rule: GaussLegendre::new(10),
        };
        track.s1_knots.push(track.head_integral(HEAD_END));
        track.extend_to(t_max.max(HEAD_END))?;
        Ok(track)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn step_scale(&self) -> f64 {
        self.step_scale
    }

    /// Ordinates of the zeros of `Z` found in `(0, t_max]`.
    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// `N(t)`: zeros in `(0, t]`.
    pub fn zero_count(&self, t: f64) -> usize {
        self.zeros.partition_point(|&g| g <= t)
    }

    /// Continues the scan up to `t_max`.
    pub fn extend_to(&mut self, t_max: f64) -> Result<()> {
        let mut u = self.tail.last().map(|s| s.0).unwrap_or(SCAN_START);
        while u < t_max {
            let h = scan_step(u, self.step_scale);
            let next = (u + h).min(t_max);
            let z = z_any(next);
            self.tail.push((next, z));
            let k = self.tail.len();
            let (u0, z0) = self.tail[k - 2];
            if z0 == 0.0 || z0.signum() != z.signum() {
                let root = if z0 == 0.0 {
                    u0
                } else {
                    solve_sign_change("zero refinement", z_any, u0, next, ZERO_TOL * u0)?
                };
                if self.zeros.last().map_or(true, |&g| root > g) {
                    self.push_zero(root);
                }
            } else if k >= 3 {
                self.inspect_dip(self.tail[k - 3], self.tail[k - 2], self.tail[k - 1])?;
            }
            if self.tail.len() > 3 {
                self.tail.remove(0);
            }
            u = next;
        }
        self.t_max = self.t_max.max(t_max);
        Ok(())
    }

    fn push_zero(&mut self, root: f64) {
        let k = self.zeros.len();
        let start = if k == 0 { HEAD_END } else { self.zeros[k - 1] };
        let s1_start = self.s1_knots[k];
        let value = s1_start + self.segment_integral(k, start, root);
        self.zeros.push(root);
        self.s1_knots.push(value);
    }

    // Looks for hidden zeros between three same-signed samples whose middle
    // one is a local minimum of |Z|: the window is resampled densely, and if
    // that shows no sign change the smallest resampled |Z| is polished by a
    // golden-section search on its two neighbouring cells.
    fn inspect_dip(&mut self, a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Result<()> {
        let sign = b.1.signum();
        let (fa, fb, fc) = (sign * a.1, sign * b.1, sign * c.1);
        if sign != a.1.signum() || sign != c.1.signum() || !(fb < fa && fb < fc) {
            return Ok(());
        }
        let f = |u: f64| sign * z_any(u);
        let h = (c.0 - a.0) / DIP_CELLS as f64;
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(DIP_CELLS + 1);
        pts.push((a.0, fa));
        for i in 1..DIP_CELLS {
            let u = a.0 + i as f64 * h;
            pts.push((u, if u == b.0 { fb } else { f(u) }));
        }
        pts.push((c.0, fc));
        let mut roots = Vec::new();
        for w in pts.windows(2) {
            if w[1].1 < 0.0 && w[0].1 >= 0.0 || w[1].1 >= 0.0 && w[0].1 < 0.0 {
                roots.push(solve_sign_change("zero refinement", z_any, w[0].0, w[1].0, ZERO_TOL * w[0].0)?);
            }
        }
        if roots.is_empty() {
            let i = (1..DIP_CELLS)
                .min_by(|&i, &j| pts[i].1.total_cmp(&pts[j].1))
                .unwrap_or(1);
            let (lo, hi) = (pts[i - 1].0, pts[i + 1].0);
            let (xm, fm) = golden_min(f, lo, hi);
            if fm < 0.0 {
                roots.push(solve_sign_change("zero refinement", z_any, lo, xm, ZERO_TOL * xm)?);
                roots.push(solve_sign_change("zero refinement", z_any, xm, hi, ZERO_TOL * xm)?);
            } else if fm < 1e-10 {
                return Err(Error::TrackingFailure {
                    u: xm,
                    message: "|Z| nearly vanishes without a resolvable sign change".into(),
                });
            }
        }
        // no zero can follow c yet, so the new zeros go straight to the end
        for root in roots {
            if self.zeros.last().map_or(true, |&g| root > g) {
                self.push_zero(root);
            }
        }
        Ok(())
    }

    // ∫ (count − 1 − θ/π) over [a, b] ⊂ [HEAD_END, ∞) with a fixed zero count.
    fn segment_integral(&self, count: usize, a: f64, b: f64) -> f64 {
        let theta_part = self.rule.integrate(a, b, theta_unchecked);
        (count as f64 - 1.0) * (b - a) - theta_part / PI
    }

    // ∫₀ᵗ (−1 − θ/π) for t ≤ HEAD_END, where Z has no zeros.
    fn head_integral(&self, t: f64) -> f64 {
        let mut total = 0.0;
        for w in HEAD_BREAKS.windows(2) {
            if w[0] >= t {
                break;
            }
            let b = w[1].min(t);
            total += self
                .rule
                .integrate(w[0], b, |u| -1.0 - theta_unchecked(u) / PI);
        }
        total
    }

    fn check_range(&self, op: &'static str, t: f64) -> Result<()> {
        if !(t > 0.0 && t <= self.t_max) {
            return Err(Error::domain(op, t, format!("0 < t <= {}", self.t_max)));
        }
        Ok(())
    }

    /// `S(t)` on the continuous branch.
    pub fn s_value(&self, t: f64) -> Result<f64> {
        self.check_range("s_function", t)?;
        Ok(self.zero_count(t) as f64 - 1.0 - theta_unchecked(t) / PI)
    }

    /// `S₁(t) = ∫₀ᵗ S(u) du`.
    pub fn s1_value(&self, t: f64) -> Result<f64> {
        self.check_range("s_function", t)?;
        Ok(self.s1_unchecked(t))
    }

    fn s1_unchecked(&self, t: f64) -> f64 {
        if t <= HEAD_END {
            return self.head_integral(t);
        }
        let k = self.zero_count(t);
        let start = if k == 0 { HEAD_END } else { self.zeros[k - 1] };
        self.s1_knots[k] + self.segment_integral(k, start, t)
    }

    pub fn sample(&self, t: f64) -> Result<ArgumentSample> {
        Ok(ArgumentSample {
            t,
            s_value: self.s_value(t)?,
            s1_value: self.s1_value(t)?,
        })
    }

    /// `∫_a^b |S₁(u)|^{2l} du` for `HEAD_END ≤ a ≤ b ≤ t_max`, exact up to
    /// quadrature rounding on every zero-free piece.
    pub fn s1_moment(&self, a: f64, b: f64, l: u32) -> Result<f64> {
        self.check_range("s1_moment", a)?;
        self.check_range("s1_moment", b)?;
        if a < HEAD_END || a > b {
            return Err(Error::precondition(
                "s1_moment",
                format!("need {HEAD_END} <= a <= b, got [{a}, {b}]"),
            ));
        }
        let first = self.zero_count(a);
        let last = self.zero_count(b);
        let mut edges = vec![a];
        edges.extend_from_slice(&self.zeros[first..last]);
        edges.push(b);
        let mut total = 0.0;
        for (i, w) in edges.windows(2).enumerate() {
            if w[1] <= w[0] {
                continue;
            }
            let count = first + i;
            let start = if count == 0 { HEAD_END } else { self.zeros[count - 1] };
            let base = self.s1_knots[count] + self.segment_integral(count, start, w[0]);
            total += self.rule.integrate(w[0], w[1], |u| {
                let s1 = base + self.segment_integral(count, w[0], u);
                s1.powi(2 * l as i32)
            });
        }
        Ok(total)
    }
}

// Minimum of `f` on `[lo, hi]`, stopping early once `f` turns negative.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < 0.0 || f2 < 0.0 || hi - lo < 1e-13 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 { (x1, f1) } else { (x2, f2) }
}

// At u = 2 the principal argument of ζ(½ + 2i) must equal −π − θ(2) mod 2π,
// which pins the branch constant of S.
fn check_reference() -> Result<()> {
    let (zeta, _) = zeta_em(Complex64::new(0.5, REFERENCE_U), 30, 14);
    let expected = -PI - theta_unchecked(REFERENCE_U);
    let diff = (zeta.arg() - expected).rem_euclid(2.0 * PI);
    let diff = diff.min(2.0 * PI - diff);
    if diff > 1e-8 {
        return Err(Error::TrackingFailure {
            u: REFERENCE_U,
            message: format!("reference argument mismatch {diff:e}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_zeros_are_found() {
        let track = ArgumentTrack::new(40.0, 1.0).unwrap();
        let z = track.zeros();
        assert_eq!(z.len(), 6);
        assert!((z[5] - 37.586178158825671).abs() < 1e-9);
        assert!((z[0] - 14.134725141734693).abs() < 1e-9);
        assert!((z[1] - 21.022039638771555).abs() < 1e-9);
    }

    #[test]
    fn s1_is_continuous_across_zero() {
        let track = ArgumentTrack::new(30.0, 1.0).unwrap();
        let g = track.zeros()[0];
        let left = track.s1_value(g - 1e-9).unwrap();
        let right = track.s1_value(g + 1e-9).unwrap();
        assert!((left - right).abs() < 1e-7);
        let jump = track.s_value(g + 1e-9).unwrap() - track.s_value(g - 1e-9).unwrap();
        assert!((jump - 1.0).abs() < 1e-6);
    }

    #[test]
    fn s1_vanishes_at_origin() {
        let track = ArgumentTrack::new(10.0, 1.0).unwrap();
        assert!(track.s1_value(1e-9).unwrap().abs() < 1e-8);
    }
}
