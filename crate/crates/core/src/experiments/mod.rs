//! Finite-height experiments for the ladder limit statements.
//!
//! Every limit `lim_{τ→∞} F(τ) = target` becomes a [`ConvergenceReport`]: the
//! functional is evaluated at an explicit list of checkpoints and judged by a
//! trend rule (see [`Verdict::assess`]). Statements about Fermat rationals are
//! decided on big integers; the numeric rows only illustrate the approach.
//!
//! All experiments run inside a [`Lab`], which owns the grid store, the
//! operational threshold `T₀` and a lazily extended argument track for `S₁`.

mod fermat;
mod increments;
mod report;
mod sigma;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridStore, ZetaGrid};
use crate::ladder::{Ladder, LadderConstants};
use crate::zeta::ArgumentTrack;

pub use fermat::FermatFunctional;
pub use report::{
    write_reports_csv, ConvergenceReport, EquivalenceWitness, ExactVerdict, Param, ReportRow,
    Separation, Verdict,
};
pub use sigma::{SigmaEstimate, SigmaPoint, MAX_MOMENT_ORDER};

/// Largest height any experiment may touch.
pub const DESK_MAX_HEIGHT: f64 = 1e7;
/// Largest height of the `S₁` argument track.
pub const TRACK_MAX_HEIGHT: f64 = 2e6;
pub const DEFAULT_T0: f64 = 1e3;
pub const DEFAULT_FLOOR: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-6;

/// Numerical settings shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabConfig {
    /// Grid tolerance.
    pub tol: f64,
    /// Threshold above which the asymptotic statements are exercised.
    pub t0: f64,
    /// Deviation below which a report counts as converged.
    pub floor: f64,
    pub constants: LadderConstants,
    /// Scan step scale of the argument track.
    pub track_step: f64,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            t0: DEFAULT_T0,
            floor: DEFAULT_FLOOR,
            constants: LadderConstants::default(),
            track_step: 1.0,
        }
    }
}

impl LabConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= 1e-11 && self.tol <= 1e-3) {
            return Err(Error::domain("lab config", self.tol, "1e-11 <= tol <= 1e-3"));
        }
        if !(self.t0 >= 100.0 && self.t0 <= 1e6) {
            return Err(Error::domain("lab config", self.t0, "100 <= T0 <= 1e6"));
        }
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(Error::domain("lab config", self.floor, "0 < floor < 1"));
        }
        if !self.constants.c0.is_finite() {
            return Err(Error::domain("lab config", self.constants.c0, "finite c0"));
        }
        if !(self.track_step > 0.0 && self.track_step <= 1.0) {
            return Err(Error::domain("lab config", self.track_step, "0 < track_step <= 1"));
        }
        Ok(())
    }
}

/// Shared state of an experiment session.
#[derive(Debug)]
pub struct Lab {
    store: GridStore,
    config: LabConfig,
    track: Option<Arc<ArgumentTrack>>,
}

impl Lab {
    pub fn new(store: GridStore, config: LabConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            store,
            config,
            track: None,
        })
    }

    /// In-memory lab with default settings.
    pub fn in_memory() -> Self {
        Self::new(GridStore::in_memory(), LabConfig::default()).expect("default config is valid")
    }

    pub fn config(&self) -> &LabConfig {
        &self.config
    }

    pub fn store(&self) -> &GridStore {
        &self.store
    }

    pub fn one_minus_c(&self) -> f64 {
        self.config.constants.one_minus_c
    }

    /// Grid covering `height` at the lab tolerance.
    pub fn grid(&mut self, height: f64) -> Result<Arc<ZetaGrid>> {
        check_desk("grid", height)?;
        self.store.ensure(height, self.config.tol)
    }

    pub fn ladder(&mut self, height: f64) -> Result<Ladder> {
        Ok(Ladder::with_constants(self.grid(height)?, self.config.constants))
    }

    /// Runs `f` on a ladder whose grid reaches at least `reach`, extending the
    /// grid whenever `f` runs past its end.
    pub fn with_ladder<R>(&mut self, reach: f64, f: impl Fn(&Ladder) -> Result<R>) -> Result<R> {
        let mut reach = reach;
        loop {
            let ladder = self.ladder(reach)?;
            match f(&ladder) {
                Err(Error::GridExhausted { needed, t_max }) => {
                    reach = needed.max(t_max * 1.05).max(reach * 1.05);
                    if reach > DESK_MAX_HEIGHT {
                        check_desk("ladder", needed)?;
                        reach = DESK_MAX_HEIGHT;
                    }
                }
                other => return other,
            }
        }
    }

    /// Argument track reaching at least `height`.
    pub fn track(&mut self, height: f64) -> Result<Arc<ArgumentTrack>> {
        if !(height <= TRACK_MAX_HEIGHT) {
            return Err(Error::Infeasible {
                op: "argument track",
                message: format!("height {height} exceeds {TRACK_MAX_HEIGHT}"),
            });
        }
        match &mut self.track {
            Some(track) if track.t_max() >= height => Ok(track.clone()),
            Some(track) => {
                // grow geometrically so repeated requests stay cheap
                let target = (height * 1.1).max(track.t_max() * 1.5).min(TRACK_MAX_HEIGHT);
                Arc::make_mut(track).extend_to(target)?;
                Ok(track.clone())
            }
            None => {
                let track = Arc::new(ArgumentTrack::new(
                    (height * 1.1).min(TRACK_MAX_HEIGHT),
                    self.config.track_step,
                )?);
                self.track = Some(track.clone());
                Ok(track)
            }
        }
    }
}

fn check_desk(op: &'static str, height: f64) -> Result<()> {
    if !(height <= DESK_MAX_HEIGHT) {
        return Err(Error::Infeasible {
            op,
            message: format!("height {height:e} exceeds the desk-scale limit {DESK_MAX_HEIGHT:e}"),
        });
    }
    Ok(())
}

/// Checkpoints must be finite, positive and strictly ascending.
fn check_schedule(op: &'static str, taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::precondition(op, "empty checkpoint list"));
    }
    for (i, &t) in taus.iter().enumerate() {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidInput {
                op,
                index: i,
                message: format!("checkpoint {t} is not a positive real"),
            });
        }
        if i > 0 && t <= taus[i - 1] {
            return Err(Error::InvalidInput {
                op,
                index: i,
                message: "checkpoints must be strictly ascending".into(),
            });
        }
    }
    Ok(())
}

fn check_positive(op: &'static str, name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(op, x, format!("{name} > 0")));
    }
    Ok(())
}

/// Height reached by one reverse step from `t`, with margin.
fn reverse_reach(t: f64, one_minus_c: f64) -> f64 {
    t + 1.5 * one_minus_c * t / t.ln() + 10.0
}

fn params<const N: usize>(pairs: [(&str, Param); N]) -> BTreeMap<String, Param> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
