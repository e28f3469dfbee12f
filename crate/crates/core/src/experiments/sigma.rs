//! The constant `σ(l)` of the `S₁`-weighted increments and the functional built on it.

use rayon::prelude::*;
use serde::Serialize;

use super::{check_positive, check_schedule, params, ConvergenceReport, Lab, Param, ReportRow};
use crate::error::{Error, Result};

/// Highest moment order `l` of `|S₁|^{2l}` at desk scale.
pub const MAX_MOMENT_ORDER: u32 = 3;

/// Per-checkpoint data of the `σ` fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaPoint {
    pub tau: f64,
    pub phi1: f64,
    /// `(1 − c)τ − ∫_{φ₁(τ)}^τ |ζ|²`
    pub zeta_defect: f64,
    /// `(1 − c)·∫_{φ₁(τ)}^τ |S₁|^{2l}`
    pub s1_mass: f64,
    /// `s1_mass / zeta_defect`, the value of `σ` solving the checkpoint alone.
    pub local_sigma: f64,
}

/// Least-squares `σ(l)` over a checkpoint list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub l: u32,
    pub sigma_hat: f64,
    /// `max |local σ − σ̂|` over the checkpoints.
    pub residual_spread: f64,
    pub points: Vec<SigmaPoint>,
}

fn check_order(op: &'static str, l: u32) -> Result<()> {
    if l == 0 || l > MAX_MOMENT_ORDER {
        return Err(Error::precondition(
            op,
            format!("moment order l = {l} outside 1..={MAX_MOMENT_ORDER}"),
        ));
    }
    Ok(())
}

impl Lab {
    /// `T̂²(T₀)`, the threshold of the `S₁`-weighted statements.
    pub fn second_reverse_threshold(&mut self) -> Result<f64> {
        let t0 = self.config().t0;
        let reach = super::reverse_reach(super::reverse_reach(t0, self.one_minus_c()), self.one_minus_c());
        self.with_ladder(reach, |ladder| Ok(ladder.reverse_iterate(t0, 2)?.reverse[2]))
    }

    /// Fits `σ` in `∫_{φ₁(τ)}^τ {σ|ζ|² + (1 − c)|S₁|^{2l}} = (1 − c)στ`.
    ///
    /// Each checkpoint gives `σ·(zeta_defect) = s1_mass`; the fit is
    /// `σ̂ = Σ s1_mass·zeta_defect / Σ zeta_defect²`.
    pub fn estimate_sigma(&mut self, l: u32, taus: &[f64]) -> Result<SigmaEstimate> {
        const OP: &str = "estimate_sigma";
        check_order(OP, l)?;
        check_schedule(OP, taus)?;
        let threshold = self.second_reverse_threshold()?;
        for &tau in taus {
            if !(tau > threshold) {
                return Err(Error::domain(OP, tau, format!("tau > T^2(T0) = {threshold}")));
            }
        }
        let top = *taus.last().unwrap();
        let track = self.track(top)?;
        let k = self.one_minus_c();
        let points = self.with_ladder(top, |ladder| {
            taus.par_iter()
                .map(|&tau| {
                    let phi = ladder.phi1(tau)?;
                    let zeta_defect = k * tau - ladder.grid().j_segment(phi, tau)?;
                    let s1_mass = k * track.s1_moment(phi, tau, l)?;
                    Ok(SigmaPoint {
                        tau,
                        phi1: phi,
                        zeta_defect,
                        s1_mass,
                        local_sigma: s1_mass / zeta_defect,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let dd: f64 = points.iter().map(|p| p.zeta_defect * p.zeta_defect).sum();
        if let Some(p) = points.iter().find(|p| !(p.zeta_defect > 0.0)) {
            return Err(Error::IllConditioned {
                op: OP,
                message: format!("nonpositive zeta defect {} at tau = {}", p.zeta_defect, p.tau),
            });
        }
        let sigma_hat = points.iter().map(|p| p.s1_mass * p.zeta_defect).sum::<f64>() / dd;
        if !(sigma_hat > 0.0 && sigma_hat.is_finite()) {
            return Err(Error::IllConditioned {
                op: OP,
                message: format!("fitted sigma {sigma_hat} is not positive"),
            });
        }
        let residual_spread = points
            .iter()
            .map(|p| (p.local_sigma - sigma_hat).abs())
            .fold(0.0, f64::max);
        Ok(SigmaEstimate {
            l,
            sigma_hat,
            residual_spread,
            points,
        })
    }

    pub(super) fn s1_rows(
        &mut self,
        op: &'static str,
        x: f64,
        l: u32,
        rhos: &[f64],
        sigma: f64,
    ) -> Result<Vec<ReportRow>> {
        check_positive(op, "x", x)?;
        check_positive(op, "sigma", sigma)?;
        check_order(op, l)?;
        check_schedule(op, rhos)?;
        let k = self.one_minus_c();
        let threshold = self.second_reverse_threshold()?;
        let floor = k * sigma * threshold / x;
        for &rho in rhos {
            if !(rho > floor) {
                return Err(Error::domain(
                    op,
                    rho,
                    format!("rho > (1-c)·sigma·T^2(T0)/x = {floor}"),
                ));
            }
        }
        let scale = x / (k * sigma);
        let top = scale * rhos.last().unwrap();
        let track = self.track(top)?;
        self.with_ladder(top, |ladder| {
            rhos.par_iter()
                .map(|&rho| {
                    let u = scale * rho;
                    let phi = ladder.phi1(u)?;
                    let zeta = ladder.grid().j_segment(phi, u)?;
                    let moment = track.s1_moment(phi, u, l)?;
                    let value = (sigma * zeta + k * moment) / rho;
                    Ok(ReportRow::new(rho, value, x, rho.ln().powi(-2))
                        .with("u", u)
                        .with("phi1", phi))
                })
                .collect::<Result<Vec<_>>>()
        })
    }

    /// `(1/ρ)·∫_{φ₁(u)}^u {σ|ζ|² + (1 − c)|S₁|^{2l}}` with `u = xρ/((1 − c)σ)`;
    /// target `x`.
    pub fn s1_functional(
        &mut self,
        x: f64,
        l: u32,
        rhos: &[f64],
        sigma: f64,
    ) -> Result<ConvergenceReport> {
        const OP: &str = "s1_functional";
        let rows = self.s1_rows(OP, x, l, rhos, sigma)?;
        let rho1 = {
            let threshold = self.second_reverse_threshold()?;
            (self.one_minus_c() * sigma / x).powi(2).max(threshold * threshold)
        };
        Ok(ConvergenceReport::new(
            OP,
            params([
                ("x", Param::Real(x)),
                ("l", Param::from(l)),
                ("sigma", Param::Real(sigma)),
                ("rho1", Param::Real(rho1)),
            ]),
            rows,
            self.config().floor,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_guard() {
        let mut lab = Lab::in_memory();
        assert!(matches!(
            lab.estimate_sigma(5, &[1e4]),
            Err(Error::Precondition { .. })
        ));
        assert!(matches!(
            lab.estimate_sigma(0, &[1e4]),
            Err(Error::Precondition { .. })
        ));
        assert!(matches!(
            lab.s1_functional(1.0, 1, &[1e4], -1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn sigma_below_threshold_is_rejected() {
        let mut lab = Lab::in_memory();
        assert!(matches!(
            lab.estimate_sigma(1, &[1e3]),
            Err(Error::Domain { .. })
        ));
    }
}
