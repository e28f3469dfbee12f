//! Jacob's ladder `φ₁` and its iterates.
//!
//! `φ₁(T)` is defined operationally as the solution `y > e` of
//!
//! ```text
//! y ln y + (c − ln 2π) y + c₀ = J(T)
//! ```
//!
//! so that `J′ = |ζ|²` gives `φ₁′ = |ζ|² / (ln φ₁ + 1 + c − ln 2π)`. Reverse
//! iterates solve `φ₁(T̂ʳ) = T̂ʳ⁻¹`, which reduces to `J(T̂ʳ) = F(T̂ʳ⁻¹)` and
//! is solved directly on the cumulative grid.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arithmetic::prime_count;
use crate::error::{Error, Result};
use crate::grid::{GridStore, ZetaGrid};
use crate::quadrature::adaptive_gk21;
use crate::roots::solve_increasing;
use crate::zeta::modulus_sq_unchecked;
use crate::{EULER_GAMMA, LN_2PI};

/// Lowest height at which the ladder is evaluated.
pub const LADDER_MIN: f64 = 100.0;
/// Deepest reverse iteration accepted.
pub const MAX_REVERSE_DEPTH: usize = 10;
/// Relative bracket width at which the height solvers stop.
pub const SOLVER_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderConstants {
    pub c: f64,
    /// Additive constant of the representation; its true value is not fixed
    /// here, see [`Ladder::c0_sensitivity`].
    pub c0: f64,
    pub one_minus_c: f64,
}

impl Default for LadderConstants {
    fn default() -> Self {
        Self::with_c0(0.0)
    }
}

impl LadderConstants {
    pub fn with_c0(c0: f64) -> Self {
        Self {
            c: EULER_GAMMA,
            c0,
            one_minus_c: 1.0 - EULER_GAMMA,
        }
    }

    /// `F(y) = y ln y + (c − ln 2π) y + c₀`.
    pub fn representation(&self, y: f64) -> f64 {
        y * y.ln() + (self.c - LN_2PI) * y + self.c0
    }

    /// `F′(y) = ln y + 1 + c − ln 2π`.
    pub fn representation_slope(&self, y: f64) -> f64 {
        y.ln() + 1.0 + self.c - LN_2PI
    }

    /// Inverse of `F` on `y > e`, by Newton iteration from the right (F is
    /// convex and increasing there, so the iterates decrease monotonically).
    pub fn invert(&self, value: f64) -> Result<f64> {
        let e = std::f64::consts::E;
        if !(self.representation(e) <= value) || !value.is_finite() {
            return Err(Error::NoBracket {
                op: "phi1",
                message: format!("J = {value} is below F(e) = {}", self.representation(e)),
            });
        }
        let mut y = e;
        while self.representation(y) < value {
            y *= 2.0;
        }
        for _ in 0..100 {
            let step = (self.representation(y) - value) / self.representation_slope(y);
            let next = (y - step).max(e);
            if (y - next).abs() <= 1e-15 * y {
                y = next;
                break;
            }
            y = next;
        }
        let residual = (self.representation(y) - value).abs() / value.abs().max(1.0);
        if residual > 1e-10 {
            return Err(Error::NonConvergence {
                op: "phi1",
                iterations: 100,
                residual,
            });
        }
        Ok(y)
    }
}

/// Direct iterates `φ₁ᵏ(T)` and reverse iterates `T̂ʳ` from one base height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderTable {
    pub base_t: f64,
    /// `T, φ₁(T), φ₁²(T), …`
    pub forward: Vec<f64>,
    /// `T = T̂⁰ < T̂¹ < …`
    pub reverse: Vec<f64>,
    /// `|φ₁(T̂ʲ) − T̂ʲ⁻¹| / T̂ʲ⁻¹` for each reverse step.
    pub reverse_residuals: Vec<f64>,
    pub solver_tol: f64,
    pub k: usize,
}

/// One level of the gap diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub level: usize,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub prime_count: u64,
    /// `(T̂ʲ − T̂ʲ⁻¹) / ((1 − c)·π(T̂ʲ))`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub base_t: f64,
    pub phi1: f64,
    pub prime_count: u64,
    pub rows: Vec<GapRow>,
    /// `(T − φ₁(T)) / ((1 − c)·π(T))`
    pub descent_ratio: f64,
    /// `(φ₁(T) + (1 − c)·π(T)) / T`
    pub complement_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C0Sensitivity {
    pub t: f64,
    pub c0: f64,
    pub perturbation: f64,
    pub phi1: f64,
    pub phi1_perturbed: f64,
    pub shift: f64,
    /// First-order prediction `−Δc₀ / F′(φ₁)`.
    pub predicted_shift: f64,
}

/// The ladder over a fixed grid.
#[derive(Debug, Clone)]
pub struct Ladder {
    grid: Arc<ZetaGrid>,
    constants: LadderConstants,
}

impl Ladder {
    pub fn new(grid: Arc<ZetaGrid>) -> Self {
        Self::with_constants(grid, LadderConstants::default())
    }

    pub fn with_constants(grid: Arc<ZetaGrid>, constants: LadderConstants) -> Self {
        Self { grid, constants }
    }

    pub fn grid(&self) -> &Arc<ZetaGrid> {
        &self.grid
    }

    pub fn constants(&self) -> &LadderConstants {
        &self.constants
    }

    fn check(&self, op: &'static str, t: f64) -> Result<()> {
        if !(t >= LADDER_MIN) {
            return Err(Error::domain(op, t, "T >= 100"));
        }
        if t > self.grid.t_max() {
            return Err(Error::OutOfRange {
                t,
                t_min: LADDER_MIN,
                t_max: self.grid.t_max(),
            });
        }
        Ok(())
    }

    /// `φ₁(T)` for `100 ≤ T ≤ t_max`.
    pub fn phi1(&self, t: f64) -> Result<f64> {
        self.check("phi1", t)?;
        self.constants.invert(self.grid.j_integral(t)?)
    }

    /// The `y` with `J(y) = target`, searched on the cumulative lattice.
    fn solve_j(&self, target: f64, guess: f64) -> Result<f64> {
        let g = &self.grid;
        let cum = g.cumulative();
        let ts = g.nodes();
        if target > *cum.last().unwrap() {
            return Err(Error::GridExhausted {
                needed: guess.max(g.t_max() * 1.01),
                t_max: g.t_max(),
            });
        }
        // last node with cumulative ≤ target
        let k = cum.partition_point(|&c| c <= target).saturating_sub(1);
        if cum[k] == target || k + 1 == ts.len() {
            return Ok(ts[k]);
        }
        let (a, b) = (ts[k], ts[k + 1]);
        let f = |y: f64| -> Result<f64> { Ok(g.j_integral(y)? - target) };
        solve_increasing("reverse iterate", f, a, b, SOLVER_TOL * b)
    }

    /// `T̂¹ = φ₁⁻¹(T)`.
    pub fn reverse_step(&self, t: f64) -> Result<f64> {
        if !(t >= LADDER_MIN) {
            return Err(Error::domain("reverse_iterate", t, "T >= 100"));
        }
        let guess = t + 4.0 * self.constants.one_minus_c * t / t.ln();
        self.solve_j(self.constants.representation(t), guess)
    }

    /// `T̂⁰ … T̂ʳ` for `1 ≤ r ≤ 10`.
    pub fn reverse_iterate(&self, t: f64, r: usize) -> Result<LadderTable> {
        if r == 0 || r > MAX_REVERSE_DEPTH {
            return Err(Error::domain("reverse_iterate", r as f64, "1 <= r <= 10"));
        }
        let mut reverse = vec![t];
        let mut residuals = Vec::with_capacity(r);
        for _ in 0..r {
            let prev = *reverse.last().unwrap();
            let next = self.reverse_step(prev)?;
            if !(next > prev) {
                return Err(Error::NonConvergence {
                    op: "reverse_iterate",
                    iterations: reverse.len(),
                    residual: next - prev,
                });
            }
            residuals.push((self.phi1(next)? - prev).abs() / prev);
            reverse.push(next);
        }
        Ok(LadderTable {
            base_t: t,
            forward: vec![t],
            reverse,
            reverse_residuals: residuals,
            solver_tol: SOLVER_TOL,
            k: r,
        })
    }

    /// `T, φ₁(T), …, φ₁ᵏ(T)`; every iterate must stay at or above 100.
    pub fn forward_iterate(&self, t: f64, k: usize) -> Result<LadderTable> {
        if k == 0 {
            return Err(Error::domain("forward_iterate", 0.0, "k >= 1"));
        }
        let mut forward = vec![t];
        for _ in 0..k {
            let prev = *forward.last().unwrap();
            if prev < LADDER_MIN {
                return Err(Error::domain(
                    "forward_iterate",
                    prev,
                    "iterate fell below T = 100",
                ));
            }
            forward.push(self.phi1(prev)?);
        }
        if *forward.last().unwrap() < LADDER_MIN {
            return Err(Error::domain(
                "forward_iterate",
                *forward.last().unwrap(),
                "iterate fell below T = 100",
            ));
        }
        Ok(LadderTable {
            base_t: t,
            forward,
            reverse: vec![t],
            reverse_residuals: Vec::new(),
            solver_tol: SOLVER_TOL,
            k,
        })
    }

    /// `Z̃²(t) = |ζ(½+it)|² / (ln φ₁(t) + 1 + c − ln 2π)`, the derivative of `φ₁`.
    pub fn z_tilde_sq(&self, t: f64) -> Result<f64> {
        let phi = self.phi1(t)?;
        Ok(modulus_sq_unchecked(t) / self.constants.representation_slope(phi))
    }

    /// `∫ₐᵇ Z̃²(t) dt` by adaptive Gauss–Kronrod on the grid lattice.
    pub fn z_tilde_sq_integral(&self, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
        self.check("z_tilde_sq_integral", a)?;
        self.check("z_tilde_sq_integral", b)?;
        if a > b {
            return Err(Error::precondition("z_tilde_sq_integral", "a > b"));
        }
        let w = self.grid.base_width();
        let mut breaks = vec![a];
        let mut x = (a / w).floor() * w + w;
        while x < b {
            breaks.push(x);
            x += w;
        }
        breaks.push(b);
        let mut failure = None;
        let r = adaptive_gk21(&breaks, 0.0, rel_tol, 20, |t| match self.z_tilde_sq(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if !r.converged {
            return Err(Error::ToleranceNotMet {
                achieved: r.error / r.value.abs().max(f64::MIN_POSITIVE),
            });
        }
        Ok(r.value)
    }

    /// Gap ratios against exact prime counts along `T̂⁰ … T̂ʳ`.
    pub fn gap_diagnostics(&self, t: f64, r: usize) -> Result<GapReport> {
        let table = self.reverse_iterate(t, r)?;
        let k = self.constants.one_minus_c;
        let mut rows = Vec::with_capacity(r);
        for (j, w) in table.reverse.windows(2).enumerate() {
            let pi = prime_count(w[1])?;
            rows.push(GapRow {
                level: j + 1,
                lower: w[0],
                upper: w[1],
                gap: w[1] - w[0],
                prime_count: pi,
                ratio: (w[1] - w[0]) / (k * pi as f64),
            });
        }
        let phi = self.phi1(t)?;
        let pi_t = prime_count(t)?;
        Ok(GapReport {
            base_t: t,
            phi1: phi,
            prime_count: pi_t,
            rows,
            descent_ratio: (t - phi) / (k * pi_t as f64),
            complement_ratio: (phi + k * pi_t as f64) / t,
        })
    }

    /// Effect on `φ₁(T)` of shifting `c₀` by `perturbation`.
    pub fn c0_sensitivity(&self, t: f64, perturbation: f64) -> Result<C0Sensitivity> {
        let phi = self.phi1(t)?;
        let shifted = LadderConstants::with_c0(self.constants.c0 + perturbation);
        let phi_p = shifted.invert(self.grid.j_integral(t)?)?;
        Ok(C0Sensitivity {
            t,
            c0: self.constants.c0,
            perturbation,
            phi1: phi,
            phi1_perturbed: phi_p,
            shift: phi_p - phi,
            predicted_shift: -perturbation / self.constants.representation_slope(phi),
        })
    }
}

/// Reverse iterates, growing the store's grid until `T̂ʳ` is covered.
pub fn reverse_iterate_extending(
    store: &mut GridStore,
    tol: f64,
    constants: LadderConstants,
    t: f64,
    r: usize,
) -> Result<(LadderTable, Arc<ZetaGrid>)> {
    let mut reach = match store.current() {
        Some(g) if g.tol() <= tol => g.t_max().max(t),
        _ => t,
    };
    loop {
        let grid = store.ensure(reach.max(LADDER_MIN), tol)?;
        let ladder = Ladder::with_constants(grid.clone(), constants);
        match ladder.reverse_iterate(t, r) {
            Err(Error::GridExhausted { needed, .. }) => reach = needed.max(grid.t_max() * 1.05),
            other => return other.map(|table| (table, grid)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representation_inverse() {
        let k = LadderConstants::with_c0(0.7);
        for y in [3.0, 100.0, 12345.6, 1e6] {
            let back = k.invert(k.representation(y)).unwrap();
            assert!((back - y).abs() <= 1e-12 * y, "{y} -> {back}");
        }
        assert!(k.invert(-10.0).is_err());
        assert_eq!(LadderConstants::default().one_minus_c, 1.0 - EULER_GAMMA);
    }

    #[test]
    fn small_grid_ladder() {
        let grid = Arc::new(ZetaGrid::build(400.0, 1e-9).unwrap());
        let ladder = Ladder::new(grid);
        let phi = ladder.phi1(300.0).unwrap();
        assert!(phi < 300.0 && phi > 200.0);
        let table = ladder.reverse_iterate(200.0, 1).unwrap();
        let back = ladder.phi1(table.reverse[1]).unwrap();
        assert!((back - 200.0).abs() <= 1e-9 * 200.0);
        assert!(matches!(
            ladder.reverse_iterate(390.0, 1),
            Err(Error::GridExhausted { .. })
        ));
        assert!(ladder.reverse_iterate(200.0, 0).is_err());
        assert!(ladder.phi1(99.0).is_err());
    }
}
