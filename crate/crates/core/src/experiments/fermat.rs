//! Limit conditions evaluated on Fermat rationals, with an exact verdict.

use std::fmt;
use std::str::FromStr;

use super::increments::Increment;
use super::{params, ConvergenceReport, ExactVerdict, Lab, Param, Separation};
use crate::arithmetic::FermatRational;
use crate::error::{Error, Result};

/// The functional whose limit at `x = q` is examined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FermatFunctional {
    /// `(1/τ)·{D(T̂¹) − D(T)}`, `T = qτ/(1 − c)`.
    DLinear,
    /// `(1/ln τ)·ln{D(T̂¹) − D(T)}`, `T = τ^q`.
    DLog,
    /// `(1/τ)·∫_T^{T̂¹} |ζ|²`, `T = qτ/(1 − c)`.
    ZetaLinear,
    /// `(1/ln τ)·ln ∫_T^{T̂¹} |ζ|²`, `T = τ^q`.
    ZetaLog,
    /// The `S₁`-weighted functional of order `l` with constant `sigma`.
    S1 { l: u32, sigma: f64 },
}

impl FermatFunctional {
    pub fn id(&self) -> &'static str {
        match self {
            FermatFunctional::DLinear => "d_linear",
            FermatFunctional::DLog => "d_log",
            FermatFunctional::ZetaLinear => "zeta_linear",
            FermatFunctional::ZetaLog => "zeta_log",
            FermatFunctional::S1 { .. } => "s1",
        }
    }
}

impl fmt::Display for FermatFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FermatFunctional {
    type Err = Error;

    /// Parses `d_linear`, `d_log`, `zeta_linear`, `zeta_log` or
    /// `s1:<l>:<sigma>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput {
            op: "fermat functional",
            index: 0,
            message: format!("unknown functional {s:?}"),
        };
        Ok(match s {
            "d_linear" => FermatFunctional::DLinear,
            "d_log" => FermatFunctional::DLog,
            "zeta_linear" => FermatFunctional::ZetaLinear,
            "zeta_log" => FermatFunctional::ZetaLog,
            _ => {
                let mut parts = s.split(':');
                if parts.next() != Some("s1") {
                    return Err(bad());
                }
                let l = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                let sigma = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                if parts.next().is_some() {
                    return Err(bad());
                }
                FermatFunctional::S1 { l, sigma }
            }
        })
    }
}

/// Compares the numeric estimate `v` with the exact rational.
pub(super) fn exact_verdict(fr: &FermatRational, v: f64) -> ExactVerdict {
    let differs = !fr.equals_one();
    let half_gap = fr.gap().to_f64() / 2.0;
    let q = fr.to_f64();
    let numeric_separates = differs && (v - 1.0).abs() > half_gap && (v - q).abs() < half_gap;
    let separation = if !differs {
        Separation::EqualsOne
    } else if numeric_separates {
        Separation::NumericAndExact
    } else {
        Separation::ExactOnly
    };
    ExactVerdict {
        rational: fr.summary(),
        q_differs_from_one: differs,
        numeric_estimate: v,
        numeric_separates,
        separation,
    }
}

impl Lab {
    /// Evaluates `functional` at `x = q` over the checkpoints and attaches the
    /// exact verdict on `q ≠ 1`.
    pub fn fermat_condition_check(
        &mut self,
        fr: &FermatRational,
        taus: &[f64],
        functional: FermatFunctional,
    ) -> Result<ConvergenceReport> {
        const OP: &str = "fermat_condition";
        let q = fr.to_f64();
        let rows = match functional {
            FermatFunctional::DLinear => self.scaled_rows(OP, q, taus, Increment::Divisor)?,
            FermatFunctional::ZetaLinear => self.scaled_rows(OP, q, taus, Increment::Zeta)?,
            FermatFunctional::DLog => self.log_rows(OP, q, taus, Increment::Divisor)?,
            FermatFunctional::ZetaLog => self.log_rows(OP, q, taus, Increment::Zeta)?,
            FermatFunctional::S1 { l, sigma } => self.s1_rows(OP, q, l, taus, sigma)?,
        };
        let mut parameters = params([
            ("rational", Param::Text(fr.label())),
            ("q", Param::Text(fr.value().to_string())),
            ("functional", Param::from(functional.id())),
        ]);
        if let FermatFunctional::S1 { l, sigma } = functional {
            parameters.insert("l".into(), Param::from(l));
            parameters.insert("sigma".into(), Param::Real(sigma));
        }
        debug_assert!(rows.iter().all(|r| r.target == q));
        let estimate = rows.last().map(|r| r.value).unwrap_or(f64::NAN);
        let mut report = ConvergenceReport::new(
            format!("fermat_{}", functional.id()),
            parameters,
            rows,
            self.config().floor,
        );
        report.exact = Some(exact_verdict(fr, estimate));
        Ok(report)
    }
}
