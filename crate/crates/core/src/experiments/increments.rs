//! Ladder increments of `J` and of the divisor sum `D`.

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use super::{
    check_desk, check_positive, check_schedule, params, reverse_reach, ConvergenceReport,
    EquivalenceWitness, Lab, Param, ReportRow,
};
use crate::arithmetic::{divisor_summatory_u64, FermatRational};
use crate::error::{Error, Result};
use crate::ladder::{Ladder, LADDER_MIN, MAX_REVERSE_DEPTH};

/// Which function is incremented over a ladder window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Increment {
    /// `∫ |ζ(½+it)|² dt`
    Zeta,
    /// `D(upper) − D(lower)`
    Divisor,
}

/// `D(x)` as a float; exact below `2⁵³`.
pub(super) fn divisor_sum(x: f64) -> f64 {
    divisor_summatory_u64(x.floor() as u64) as f64
}

impl Increment {
    pub(super) fn over(self, ladder: &Ladder, lo: f64, hi: f64) -> Result<f64> {
        match self {
            Increment::Zeta => ladder.grid().j_segment(lo, hi),
            Increment::Divisor => Ok(divisor_sum(hi) - divisor_sum(lo)),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Increment::Zeta => "zeta",
            Increment::Divisor => "divisor",
        }
    }
}

/// `(lower, upper) = (T, T̂¹)` for a window starting at `T`.
fn window(ladder: &Ladder, t: f64) -> Result<(f64, f64)> {
    Ok((t, ladder.reverse_step(t)?))
}

impl Lab {
    fn reach_after(&self, t: f64, steps: usize) -> f64 {
        (0..steps).fold(t, |h, _| reverse_reach(h, self.one_minus_c()))
    }

    /// `∫_{T̂^{r−1}}^{T̂ʳ} |ζ|²` against `(1 − c)·T̂^{r−1}` for each `T`.
    pub fn linear_increment(&mut self, ts: &[f64], r: usize) -> Result<ConvergenceReport> {
        const OP: &str = "linear_increment";
        check_level(OP, r)?;
        check_heights(OP, ts)?;
        let k = self.one_minus_c();
        let reach = self.reach_after(*ts.last().unwrap(), r);
        let rows = self.with_ladder(reach, |ladder| {
            ts.par_iter()
                .map(|&t| {
                    let table = ladder.reverse_iterate(t, r)?;
                    let (lo, hi) = (table.reverse[r - 1], table.reverse[r]);
                    let value = ladder.grid().j_segment(lo, hi)?;
                    Ok(ReportRow::new(t, value, k * lo, t.powf(-2.0 / 3.0))
                        .with("lower", lo)
                        .with("upper", hi))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(ConvergenceReport::new(
            OP,
            params([("r", Param::Integer(r as i64))]),
            rows,
            self.config().floor,
        ))
    }

    /// `D(T̂ʳ) − D(T̂^{r−1})` against `∫_{T̂^{r−1}}^{T̂ʳ} |ζ|²`. The extra `ratio`
    /// is `|difference|·ln T / T`, the witness of the `O(T/ln T)` remainder.
    pub fn divisor_increment(&mut self, ts: &[f64], r: usize) -> Result<ConvergenceReport> {
        const OP: &str = "divisor_increment";
        check_level(OP, r)?;
        check_heights(OP, ts)?;
        let reach = self.reach_after(*ts.last().unwrap(), r);
        let rows = self.with_ladder(reach, |ladder| {
            ts.par_iter()
                .map(|&t| {
                    let table = ladder.reverse_iterate(t, r)?;
                    let (lo, hi) = (table.reverse[r - 1], table.reverse[r]);
                    let zeta = ladder.grid().j_segment(lo, hi)?;
                    let divisor = Increment::Divisor.over(ladder, lo, hi)?;
                    let difference = divisor - zeta;
                    Ok(ReportRow::new(t, divisor, zeta, 1.0 / t.ln())
                        .with("lower", lo)
                        .with("upper", hi)
                        .with("difference", difference)
                        .with("ratio", difference.abs() * t.ln() / t))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(ConvergenceReport::new(
            OP,
            params([("r", Param::Integer(r as i64))]),
            rows,
            self.config().floor,
        ))
    }

    /// Lower end of the admissible `τ` range for scale `x`: `(1 − c)·T₀/x`.
    pub fn scaled_tau_floor(&self, x: f64) -> f64 {
        self.one_minus_c() * self.config().t0 / x
    }

    /// The squared threshold `τ₁(x) = max{((1 − c)/x)², T₀²}`; recorded, not enforced.
    pub fn tau1(&self, x: f64) -> f64 {
        (self.one_minus_c() / x).powi(2).max(self.config().t0.powi(2))
    }

    pub(super) fn scaled_rows(
        &mut self,
        op: &'static str,
        x: f64,
        taus: &[f64],
        kind: Increment,
    ) -> Result<Vec<ReportRow>> {
        check_positive(op, "x", x)?;
        check_schedule(op, taus)?;
        let floor = self.scaled_tau_floor(x);
        for &tau in taus {
            if !(tau > floor) {
                return Err(Error::domain(
                    op,
                    tau,
                    format!("tau > (1-c)·T0/x = {floor}"),
                ));
            }
        }
        let k = self.one_minus_c();
        let top = x * taus.last().unwrap() / k;
        check_desk(op, top)?;
        self.with_ladder(reverse_reach(top, k), |ladder| {
            taus.par_iter()
                .map(|&tau| {
                    let (lo, hi) = window(ladder, x * tau / k)?;
                    let value = kind.over(ladder, lo, hi)? / tau;
                    Ok(ReportRow::new(tau, value, x, 1.0 / tau.ln())
                        .with("lower", lo)
                        .with("upper", hi))
                })
                .collect::<Result<Vec<_>>>()
        })
    }

    fn scaled_report(
        &mut self,
        id: &'static str,
        x: f64,
        taus: &[f64],
        kind: Increment,
    ) -> Result<ConvergenceReport> {
        let rows = self.scaled_rows(id, x, taus, kind)?;
        Ok(ConvergenceReport::new(
            id,
            params([
                ("x", Param::Real(x)),
                ("t0", Param::Real(self.config().t0)),
                ("tau_floor", Param::Real(self.scaled_tau_floor(x))),
                ("tau1", Param::Real(self.tau1(x))),
            ]),
            rows,
            self.config().floor,
        ))
    }

    /// `(1/τ)·∫_T^{T̂¹} |ζ|²` with `T = xτ/(1 − c)`; target `x`.
    pub fn scaled_zeta(&mut self, x: f64, taus: &[f64]) -> Result<ConvergenceReport> {
        self.scaled_report("scaled_zeta", x, taus, Increment::Zeta)
    }

    /// `(1/τ)·{D(T̂¹) − D(T)}` with `T = xτ/(1 − c)`; target `x`.
    pub fn scaled_divisor(&mut self, x: f64, taus: &[f64]) -> Result<ConvergenceReport> {
        self.scaled_report("scaled_divisor", x, taus, Increment::Divisor)
    }

    /// `τ₂(x) = max{T₀^{1/x}, T₀}`, the least admissible `τ` of the logarithmic form.
    pub fn tau2(&self, x: f64) -> f64 {
        let t0 = self.config().t0;
        t0.powf(1.0 / x).max(t0)
    }

    pub(super) fn log_rows(
        &mut self,
        op: &'static str,
        x: f64,
        taus: &[f64],
        kind: Increment,
    ) -> Result<Vec<ReportRow>> {
        check_positive(op, "x", x)?;
        check_schedule(op, taus)?;
        let tau2 = self.tau2(x);
        for &tau in taus {
            if !(tau >= tau2) {
                return Err(Error::domain(op, tau, format!("tau >= tau2(x) = {tau2}")));
            }
        }
        let top = (x * taus.last().unwrap().ln()).exp();
        let reach = reverse_reach(top, self.one_minus_c());
        if !(reach <= super::DESK_MAX_HEIGHT) {
            return Err(Error::Infeasible {
                op,
                message: format!(
                    "exp(x ln tau) = {top:e} puts the window beyond {:e}",
                    super::DESK_MAX_HEIGHT
                ),
            });
        }
        self.with_ladder(reach, |ladder| {
            taus.par_iter()
                .map(|&tau| {
                    let t = (x * tau.ln()).exp().max(LADDER_MIN);
                    let (lo, hi) = window(ladder, t)?;
                    let increment = kind.over(ladder, lo, hi)?;
                    if !(increment > 0.0) {
                        return Err(Error::precondition(
                            op,
                            format!("increment over [{lo}, {hi}] is not positive"),
                        ));
                    }
                    Ok(ReportRow::new(tau, increment.ln() / tau.ln(), x, 1.0 / tau.ln())
                        .with("lower", lo)
                        .with("upper", hi)
                        .with("increment", increment))
                })
                .collect::<Result<Vec<_>>>()
        })
    }

    /// `(1/ln τ)·ln F` where `F` is the `ζ` or `D` increment over
    /// `[τ^x, (τ^x)^1]`; target `x`.
    pub fn log_functional(
        &mut self,
        x: f64,
        taus: &[f64],
        use_divisor: bool,
    ) -> Result<ConvergenceReport> {
        const OP: &str = "log_functional";
        let kind = if use_divisor {
            Increment::Divisor
        } else {
            Increment::Zeta
        };
        let rows = self.log_rows(OP, x, taus, kind)?;
        Ok(ConvergenceReport::new(
            OP,
            params([
                ("x", Param::Real(x)),
                ("increment", Param::from(kind.label())),
                ("tau2", Param::Real(self.tau2(x))),
            ]),
            rows,
            self.config().floor,
        ))
    }

    /// Finite-height `L₁`, `L₂`, `L₃` for scale `a` and Fermat rational `q`:
    /// rows compare `L₁L₂` against `L₃`.
    pub fn product_identity(
        &mut self,
        a: f64,
        fr: &FermatRational,
        taus: &[f64],
    ) -> Result<ConvergenceReport> {
        const OP: &str = "product_identity";
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::precondition(OP, format!("a = {a} must be positive")));
        }
        let q = fr.to_f64();
        let l1 = self.scaled_rows(OP, a, taus, Increment::Zeta)?;
        let l2 = self.scaled_rows(OP, q, taus, Increment::Zeta)?;
        let l3 = self.scaled_rows(OP, a * q, taus, Increment::Zeta)?;
        let rows: Vec<ReportRow> = taus
            .iter()
            .enumerate()
            .map(|(i, &tau)| {
                let (v1, v2, v3) = (l1[i].value, l2[i].value, l3[i].value);
                ReportRow::new(tau, v1 * v2, v3, 1.0 / tau.ln())
                    .with("L1", v1)
                    .with("L2", v2)
                    .with("L3", v3)
                    .with("abs_gap", (v1 * v2 - v3).abs())
            })
            .collect();
        let last = rows.last().unwrap();
        let (v2, v3, e) = (last.extras["L2"], last.extras["L3"], last.error_scale);
        let equivalence = EquivalenceWitness {
            l2_minus_one: v2 - 1.0,
            l3_minus_a: v3 - a,
            resolvable: (v2 - 1.0).abs() > 2.0 * e * v2 && (v3 - a).abs() > 2.0 * e * v3,
            signs_match: (v2 - 1.0).signum() == (v3 - a).signum(),
        };
        let mut report = ConvergenceReport::new(
            OP,
            params([
                ("a", Param::Real(a)),
                ("rational", Param::Text(fr.label())),
                ("q", Param::Text(fr.value().to_string())),
            ]),
            rows,
            self.config().floor,
        );
        report.equivalence = Some(equivalence);
        Ok(report)
    }

    /// The scaled divisor functional at `x = Γ(x₀)` (`depth` 1) or
    /// `x = Γ(Γ(x₀))` (`depth` 2).
    pub fn gamma_substitution(
        &mut self,
        x0: f64,
        depth: u32,
        taus: &[f64],
    ) -> Result<ConvergenceReport> {
        const OP: &str = "gamma_substitution";
        check_positive(OP, "x0", x0)?;
        if !(1..=2).contains(&depth) {
            return Err(Error::precondition(OP, format!("depth {depth} is not 1 or 2")));
        }
        check_schedule(OP, taus)?;
        let mut x = gamma(x0);
        if depth == 2 && x.is_finite() {
            x = gamma(x);
        }
        let top = x * taus.last().unwrap() / self.one_minus_c();
        if !(x.is_finite() && top <= super::DESK_MAX_HEIGHT) {
            return Err(Error::Infeasible {
                op: OP,
                message: format!("Gamma iterate {x:e} at depth {depth} leaves the desk range"),
            });
        }
        let rows = self.scaled_rows(OP, x, taus, Increment::Divisor)?;
        Ok(ConvergenceReport::new(
            OP,
            params([
                ("x0", Param::Real(x0)),
                ("depth", Param::Integer(depth as i64)),
                ("x", Param::Real(x)),
            ]),
            rows,
            self.config().floor,
        ))
    }

    /// The scaled divisor functional at `x = D(x₀)`.
    pub fn dirichlet_return(&mut self, x0: f64, taus: &[f64]) -> Result<ConvergenceReport> {
        const OP: &str = "dirichlet_return";
        if !(x0 >= 1.0 && x0 <= 1e12) {
            return Err(Error::domain(OP, x0, "1 <= x0 <= 1e12"));
        }
        let x = divisor_sum(x0);
        let rows = self.scaled_rows(OP, x, taus, Increment::Divisor)?;
        Ok(ConvergenceReport::new(
            OP,
            params([("x0", Param::Real(x0)), ("x", Param::Real(x))]),
            rows,
            self.config().floor,
        ))
    }
}

fn check_level(op: &'static str, r: usize) -> Result<()> {
    if r == 0 || r > MAX_REVERSE_DEPTH {
        return Err(Error::precondition(op, format!("level r = {r} outside 1..=10")));
    }
    Ok(())
}

fn check_heights(op: &'static str, ts: &[f64]) -> Result<()> {
    check_schedule(op, ts)?;
    if ts[0] < LADDER_MIN {
        return Err(Error::domain(op, ts[0], "T >= 100"));
    }
    check_desk(op, *ts.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_sum_floors() {
        assert_eq!(divisor_sum(10.9), 27.0);
        assert_eq!(divisor_sum(100.0), 482.0);
    }

    #[test]
    fn guards() {
        let mut lab = Lab::in_memory();
        assert!(matches!(
            lab.linear_increment(&[1e3], 0),
            Err(Error::Precondition { .. })
        ));
        assert!(matches!(lab.scaled_zeta(1.0, &[100.0]), Err(Error::Domain { .. })));
        assert!(matches!(lab.scaled_zeta(-1.0, &[1e3]), Err(Error::Domain { .. })));
        assert!(matches!(
            lab.log_functional(3.0, &[1e4], false),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(lab.log_functional(1.0, &[999.0], false), Err(Error::Domain { .. })));
        assert!(matches!(
            lab.gamma_substitution(10.0, 2, &[1e3]),
            Err(Error::Infeasible { .. })
        ));
        let fr = crate::arithmetic::fermat_rational(1, 1, 1, 3).unwrap();
        assert!(matches!(
            lab.product_identity(0.0, &fr, &[1e3]),
            Err(Error::Precondition { .. })
        ));
        assert_eq!(lab.tau2(0.5), 1e6);
        assert_eq!(lab.tau2(2.0), 1e3);
    }
}
