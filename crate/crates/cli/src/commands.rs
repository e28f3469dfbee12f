//! Subcommand implementations.

use std::io::Write;

use serde::Serialize;
use zetaladder::arithmetic::{fermat_rational, FermatRational};
use zetaladder::experiments::{
    write_reports_csv, ConvergenceReport, FermatFunctional, Lab, SigmaEstimate, Verdict,
};
use zetaladder::grid::{BuildInfo, GridStore};
use zetaladder::ladder::{reverse_iterate_extending, LadderConstants};
use zetaladder::zeta::{modulus_sq_batch, z_function, CriticalSample};
use zetaladder::Error;

use crate::config::{OutputFormat, RunConfig};

/// Largest number of samples of one `zeta --range` call.
pub const MAX_SAMPLES: usize = 10_000_000;

/// Checkpoints of `experiment all`, full and `--quick`.
pub const SUITE_TAUS: [f64; 3] = [1e3, 1e4, 1e5];
pub const QUICK_TAUS: [f64; 3] = [1e3, 3e3, 1e4];
pub const SUITE_SIGMA_TAUS: [f64; 4] = [1e4, 2e4, 5e4, 1e5];
pub const QUICK_SIGMA_TAUS: [f64; 3] = [2e3, 5e3, 1e4];
pub const DIRICHLET_TAUS: [f64; 2] = [10.0, 100.0];

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("output: {0}")]
    Output(String),
    #[error("{0} report(s) violated their convergence trend")]
    TrendViolation(usize),
}

pub fn write_rows<T: Serialize, W: Write>(
    rows: &[T],
    format: OutputFormat,
    mut out: W,
) -> Result<(), CommandError> {
    let err = |e: &dyn std::fmt::Display| CommandError::Output(e.to_string());
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row).map_err(|e| err(&e))?;
            }
            w.flush().map_err(|e| err(&e))?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| err(&e))?;
            writeln!(out).map_err(|e| err(&e))?;
        }
    }
    Ok(())
}

/// `zeta --t` or `zeta --range FROM TO --step H`.
pub fn zeta_samples(
    t: Option<f64>,
    range: Option<(f64, f64)>,
    step: f64,
) -> Result<Vec<CriticalSample>, CommandError> {
    match (t, range) {
        (Some(t), None) => Ok(vec![z_function(t)?]),
        (None, Some((from, to))) => {
            if !(step > 0.0 && step.is_finite()) || !(to >= from) {
                return Err(CommandError::Usage(format!(
                    "need FROM <= TO and a positive step, got {from} {to} step {step}"
                )));
            }
            let n = ((to - from) / step).round() as usize + 1;
            if n > MAX_SAMPLES {
                return Err(CommandError::Usage(format!("{n} samples exceed {MAX_SAMPLES}")));
            }
            let ts: Vec<f64> = (0..n).map(|i| from + i as f64 * step).collect();
            Ok(modulus_sq_batch(&ts)?)
        }
        _ => Err(CommandError::Usage("give exactly one of --t or --range".into())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderRow {
    pub direction: &'static str,
    pub level: usize,
    pub value: f64,
    /// `|φ₁(T̂ʳ) − T̂^{r−1}| / T̂^{r−1}` for reverse rows.
    pub residual: Option<f64>,
}

pub fn ladder_rows(
    store: &mut GridStore,
    config: &RunConfig,
    t: f64,
    reverse: Option<usize>,
    forward: Option<usize>,
) -> Result<Vec<LadderRow>, CommandError> {
    let constants = LadderConstants::with_c0(config.c0);
    match (reverse, forward) {
        (Some(r), None) => {
            let (table, _) = reverse_iterate_extending(store, config.tol, constants, t, r)?;
            Ok(table
                .reverse
                .iter()
                .enumerate()
                .map(|(level, &value)| LadderRow {
                    direction: "reverse",
                    level,
                    value,
                    residual: level.checked_sub(1).map(|i| table.reverse_residuals[i]),
                })
                .collect())
        }
        (None, Some(k)) => {
            let grid = store.ensure(t, config.tol)?;
            let ladder = zetaladder::ladder::Ladder::with_constants(grid, constants);
            let table = ladder.forward_iterate(t, k)?;
            Ok(table
                .forward
                .iter()
                .enumerate()
                .map(|(level, &value)| LadderRow {
                    direction: "forward",
                    level,
                    value,
                    residual: None,
                })
                .collect())
        }
        _ => Err(CommandError::Usage("give exactly one of --reverse or --forward".into())),
    }
}

pub fn grid_build(store: &mut GridStore, config: &RunConfig, t_max: f64) -> Result<BuildInfo, CommandError> {
    Ok(store.ensure(t_max, config.tol)?.info().clone())
}

pub fn grid_info(store: &GridStore) -> Result<BuildInfo, CommandError> {
    store
        .current()
        .map(|g| g.info().clone())
        .ok_or_else(|| {
            CommandError::Core(Error::Cache {
                path: store.path().map(|p| p.to_path_buf()).unwrap_or_default(),
                message: "no cached grid".into(),
            })
        })
}

pub fn parse_rational(text: &str) -> Result<FermatRational, CommandError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CommandError::Usage(format!("expected x,y,z,n with natural entries, got {text:?}"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let v: Vec<u64> = parts
        .iter()
        .map(|p| p.parse::<u64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let n = u32::try_from(v[3]).map_err(|_| bad())?;
    Ok(fermat_rational(v[0], v[1], v[2], n)?)
}

/// Experiment selectors of the `experiment` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExperimentId {
    /// Linear increments of J along the ladder.
    Linear,
    /// Divisor increments against J increments.
    Lemma1,
    /// Scaled J increment with target x.
    ScaledZeta,
    /// Scaled divisor increment with target x.
    Lemma3,
    /// Logarithmic functional (add --divisor for D).
    Log,
    /// Fit of sigma(l).
    Sigma,
    /// S1-weighted functional with target x.
    Lemma6,
    /// Divisor condition on a Fermat rational.
    Theorem1,
    /// Logarithmic divisor condition on a Fermat rational.
    Theorem2,
    /// S1-weighted condition on a Fermat rational.
    Theorem3,
    /// Fermat condition with an explicit --functional.
    Fermat,
    /// Product identity L1 L2 = L3.
    Product,
    /// Gamma substitution x = Gamma(x0) or Gamma(Gamma(x0)).
    Gamma,
    /// Substitution x = D(x0).
    Dirichlet,
    /// The whole suite.
    All,
}

#[derive(Debug, Clone)]
pub struct ExperimentParams {
    pub x: f64,
    pub taus: Option<Vec<f64>>,
    pub fr: String,
    pub r: usize,
    pub l: u32,
    pub sigma: Option<f64>,
    pub a: f64,
    pub x0: f64,
    pub depth: u32,
    pub functional: Option<String>,
    pub divisor: bool,
    pub quick: bool,
}

/// Reports of one `experiment` invocation, with the σ fit when one was made.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutput {
    pub reports: Vec<ConvergenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaEstimate>,
}

impl ExperimentOutput {
    pub fn violations(&self) -> usize {
        self.reports
            .iter()
            .filter(|r| r.verdict == Verdict::TrendViolated)
            .count()
    }

    pub fn write<W: Write>(&self, format: OutputFormat, mut out: W) -> Result<(), CommandError> {
        match format {
            OutputFormat::Csv => {
                if self.reports.is_empty() {
                    if let Some(s) = &self.sigma {
                        return write_rows(&s.points, format, out);
                    }
                }
                write_reports_csv(&self.reports, out)?;
            }
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut out, self)
                    .map_err(|e| CommandError::Output(e.to_string()))?;
                writeln!(out).map_err(|e| CommandError::Output(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// One line per report: id, verdict and exact verdict.
    pub fn summary(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .reports
            .iter()
            .map(|r| {
                let mut line = format!("{} [{}]: {}", r.experiment_id, r.params_string(), r.verdict);
                if let Some(e) = &r.exact {
                    line.push_str(&format!("; {e}"));
                }
                line
            })
            .collect();
        if let Some(s) = &self.sigma {
            lines.push(format!(
                "sigma(l={}) = {} (residual spread {})",
                s.l, s.sigma_hat, s.residual_spread
            ));
        }
        lines
    }
}

fn sigma_for(
    lab: &mut Lab,
    p: &ExperimentParams,
    sigma_taus: &[f64],
) -> Result<(f64, Option<SigmaEstimate>), CommandError> {
    match p.sigma {
        Some(s) => Ok((s, None)),
        None => {
            let est = lab.estimate_sigma(p.l, sigma_taus)?;
            Ok((est.sigma_hat, Some(est)))
        }
    }
}

pub fn run_experiment(
    lab: &mut Lab,
    id: ExperimentId,
    p: &ExperimentParams,
) -> Result<ExperimentOutput, CommandError> {
    let (default_taus, sigma_taus) = if p.quick {
        (&QUICK_TAUS[..], &QUICK_SIGMA_TAUS[..])
    } else {
        (&SUITE_TAUS[..], &SUITE_SIGMA_TAUS[..])
    };
    let taus: Vec<f64> = p.taus.clone().unwrap_or_else(|| default_taus.to_vec());
    let one = |report: ConvergenceReport| ExperimentOutput {
        reports: vec![report],
        sigma: None,
    };
    Ok(match id {
        ExperimentId::Linear => one(lab.linear_increment(&taus, p.r)?),
        ExperimentId::Lemma1 => one(lab.divisor_increment(&taus, p.r)?),
        ExperimentId::ScaledZeta => one(lab.scaled_zeta(p.x, &taus)?),
        ExperimentId::Lemma3 => one(lab.scaled_divisor(p.x, &taus)?),
        ExperimentId::Log => one(lab.log_functional(p.x, &taus, p.divisor)?),
        ExperimentId::Sigma => {
            let taus = p.taus.clone().unwrap_or_else(|| sigma_taus.to_vec());
            ExperimentOutput {
                reports: Vec::new(),
                sigma: Some(lab.estimate_sigma(p.l, &taus)?),
            }
        }
        ExperimentId::Lemma6 => {
            let (sigma, est) = sigma_for(lab, p, sigma_taus)?;
            ExperimentOutput {
                reports: vec![lab.s1_functional(p.x, p.l, &taus, sigma)?],
                sigma: est,
            }
        }
        ExperimentId::Theorem1 => {
            let fr = parse_rational(&p.fr)?;
            one(lab.fermat_condition_check(&fr, &taus, FermatFunctional::DLinear)?)
        }
        ExperimentId::Theorem2 => {
            let fr = parse_rational(&p.fr)?;
            let taus = match &p.taus {
                Some(t) => t.clone(),
                None => vec![lab.tau2(fr.to_f64()).ceil()],
            };
            one(lab.fermat_condition_check(&fr, &taus, FermatFunctional::DLog)?)
        }
        ExperimentId::Theorem3 => {
            let fr = parse_rational(&p.fr)?;
            let (sigma, est) = sigma_for(lab, p, sigma_taus)?;
            let f = FermatFunctional::S1 { l: p.l, sigma };
            ExperimentOutput {
                reports: vec![lab.fermat_condition_check(&fr, &taus, f)?],
                sigma: est,
            }
        }
        ExperimentId::Fermat => {
            let fr = parse_rational(&p.fr)?;
            let functional = p
                .functional
                .as_deref()
                .ok_or_else(|| CommandError::Usage("fermat needs --functional".into()))?;
            one(lab.fermat_condition_check(&fr, &taus, functional.parse()?)?)
        }
        ExperimentId::Product => {
            let fr = parse_rational(&p.fr)?;
            one(lab.product_identity(p.a, &fr, &taus)?)
        }
        ExperimentId::Gamma => one(lab.gamma_substitution(p.x0, p.depth, &taus)?),
        ExperimentId::Dirichlet => {
            let taus = p.taus.clone().unwrap_or_else(|| DIRICHLET_TAUS.to_vec());
            one(lab.dirichlet_return(p.x0, &taus)?)
        }
        ExperimentId::All => run_suite(lab, p.quick, p.taus.as_deref())?,
    })
}

/// The full experiment list at explicit checkpoints.
pub fn run_suite(
    lab: &mut Lab,
    quick: bool,
    taus: Option<&[f64]>,
) -> Result<ExperimentOutput, CommandError> {
    let (default_taus, sigma_taus) = if quick {
        (&QUICK_TAUS[..], &QUICK_SIGMA_TAUS[..])
    } else {
        (&SUITE_TAUS[..], &SUITE_SIGMA_TAUS[..])
    };
    let taus = taus.unwrap_or(default_taus);
    let unit = fermat_rational(1, 1, 1, 3)?;
    let near = fermat_rational(6, 8, 9, 3)?;
    let mut reports = vec![
        lab.linear_increment(taus, 1)?,
        lab.divisor_increment(taus, 1)?,
    ];
    for x in [0.5, 1.0, 2.0] {
        reports.push(lab.scaled_zeta(x, taus)?);
        reports.push(lab.scaled_divisor(x, taus)?);
    }
    reports.push(lab.log_functional(1.0, taus, false)?);
    reports.push(lab.log_functional(1.0, taus, true)?);
    reports.push(lab.dirichlet_return(100.0, &DIRICHLET_TAUS)?);
    reports.push(lab.gamma_substitution(3.0, 1, taus)?);
    reports.push(lab.gamma_substitution(2.5, 2, taus)?);
    reports.push(lab.product_identity(2.0, &unit, taus)?);
    let sigma = lab.estimate_sigma(1, sigma_taus)?;
    reports.push(lab.s1_functional(1.0, 1, taus, sigma.sigma_hat)?);
    for fr in [&unit, &near] {
        reports.push(lab.fermat_condition_check(fr, taus, FermatFunctional::DLinear)?);
        reports.push(lab.fermat_condition_check(fr, taus, FermatFunctional::ZetaLinear)?);
        let s1 = FermatFunctional::S1 {
            l: 1,
            sigma: sigma.sigma_hat,
        };
        reports.push(lab.fermat_condition_check(fr, taus, s1)?);
    }
    let tau2 = lab.tau2(near.to_f64()).ceil();
    let mut near_log: Vec<f64> = taus.iter().map(|&t| t.max(tau2)).collect();
    near_log.dedup();
    reports.push(lab.fermat_condition_check(&near, &near_log, FermatFunctional::DLog)?);
    reports.push(lab.fermat_condition_check(&near, &near_log, FermatFunctional::ZetaLog)?);
    Ok(ExperimentOutput {
        reports,
        sigma: Some(sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1,1,1,3").unwrap().to_f64(), 2.0);
        assert!(parse_rational("1,1,3").is_err());
        assert!(parse_rational("3,4,5,2").is_err());
        assert!(parse_rational("a,1,1,3").is_err());
    }

    #[test]
    fn range_sample_count() {
        let rows = zeta_samples(None, Some((100.0, 200.0)), 0.1).unwrap();
        assert_eq!(rows.len(), 1001);
        assert!(rows.windows(2).all(|w| w[0].t < w[1].t));
        assert!(zeta_samples(Some(5.0), None, 0.1).is_err());
        assert!(zeta_samples(None, None, 0.1).is_err());
    }
}
