//! Legendre systems generated by the ladder on `[−1, 1]`.
//!
//! For a depth `p` let `s(t)` be the affine map of `[−1, 1]` onto
//! `[T̂ᵖ, (T+2)̂ᵖ]` and
//!
//! ```text
//! u_p(t)   = φ₁ᵖ(s(t)) − T − 1
//! v_pʳ(t)  = φ₁ʳ(s(t)),   r = 0 … p − 1
//! ```
//!
//! A generated member is `Pₙ(u_{p₁}(u_{p₂}(u_{p₃}(t))))` times the products of
//! `|Z̃|` over the `v`-nodes of each layer. Since `u_p′ = h_p·∏ Z̃²(v_pʳ)` with
//! `h_p = ((T+2)̂ᵖ − T̂ᵖ)/2`, the Gram matrix is
//! `2/(2n+1)·δₙₘ / (h_{p₁} h_{p₂} h_{p₃})`.
//!
//! The affine map is taken as `T̂ᵖ + h_p·(t + 1)`. Read literally with the
//! opposite sign on `T̂ᵖ` it would land at negative heights, where `φ₁` is
//! undefined, and contradict the stated containment `v_pʳ ∈ [T̂ᵖ⁻ʳ, (T+2)̂ᵖ⁻ʳ]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::Ladder;
use crate::quadrature::{adaptive_gk21_vec, legendre_with_derivative};
use crate::roots::solve_sign_change;
use crate::zeta::modulus_sq_unchecked;
use crate::zeta::riemann_siegel::z_riemann_siegel;

/// Deepest generation layer supported.
pub const MAX_DEPTH: usize = 3;
/// Highest Legendre index in a Gram matrix.
pub const MAX_INDEX: usize = 8;
/// Largest base height.
pub const MAX_BASE: f64 = 1e4;
/// Absolute Gram tolerance relative to the smallest expected diagonal entry.
/// The ladder maps carry relative noise near 1e−12, so much tighter targets
/// cannot be met.
pub const GRAM_TOL: f64 = 1e-9;

/// Ladder end points of one layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub depth: usize,
    /// `T̂ᵖ`
    pub lo: f64,
    /// `(T+2)̂ᵖ`
    pub hi: f64,
}

impl Layer {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// `u_p`, the `v`-nodes and the squared weight `∏ Z̃²(v_pʳ)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerPoint {
    pub u: f64,
    pub nodes: Vec<f64>,
    pub weight_sq: f64,
}

/// One factor `|Z̃(v)| = |ζ(½+iv)| / √(ln φ₁(v) + 1 + c − ln 2π)` in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFactor {
    pub layer: usize,
    pub r: usize,
    pub node: f64,
    pub ln_zeta_modulus: f64,
    pub ln_slope_half: f64,
}

/// Cached automorphism values at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismNode {
    pub t: f64,
    /// `u` after each layer, innermost first.
    pub u: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSystem {
    pub base_t: f64,
    pub depths: [usize; 3],
    pub n_max: usize,
    pub layers: [Layer; 3],
    pub automorphism_cache: Vec<AutomorphismNode>,
    /// Every cached `u` lies in `[−1, 1]` and every `v` in its ladder interval.
    pub containment_ok: bool,
    pub gram: Vec<Vec<f64>>,
    /// `2/(2n+1) / ∏ h_p`.
    pub diagonal_expected: Vec<f64>,
    pub quadrature_error: f64,
}

impl GeneratedSystem {
    /// `|Gₙₘ| / √(Gₙₙ Gₘₘ)`.
    pub fn normalized(&self, n: usize, m: usize) -> f64 {
        self.gram[n][m].abs() / (self.gram[n][n] * self.gram[m][m]).sqrt()
    }

    /// Largest normalized off-diagonal entry with `n, m ≤ up_to`.
    pub fn max_off_diagonal(&self, up_to: usize) -> f64 {
        let top = up_to.min(self.n_max);
        let mut worst = 0.0f64;
        for n in 0..=top {
            for m in 0..n {
                worst = worst.max(self.normalized(n, m));
            }
        }
        worst
    }

    /// Writes `n,m,value,normalized` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record(["n", "m", "value", "normalized"]).map_err(ser)?;
        for n in 0..=self.n_max {
            for m in 0..=self.n_max {
                w.write_record([
                    n.to_string(),
                    m.to_string(),
                    format!("{:e}", self.gram[n][m]),
                    format!("{:e}", self.normalized(n, m)),
                ])
                .map_err(ser)?;
            }
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Ladder-generated Legendre systems over one base height.
#[derive(Debug, Clone)]
pub struct Generator {
    ladder: Ladder,
    base_t: f64,
    // T̂⁰…T̂³ and (T+2)̂⁰…(T+2)̂³
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Generator {
    pub fn new(ladder: Ladder, t: f64) -> Result<Self> {
        if !(t >= 100.0 && t <= MAX_BASE) {
            return Err(Error::domain("generated system", t, "100 <= T <= 1e4"));
        }
        let lower = ladder.reverse_iterate(t, MAX_DEPTH)?.reverse;
        let upper = ladder.reverse_iterate(t + 2.0, MAX_DEPTH)?.reverse;
        Ok(Self {
            ladder,
            base_t: t,
            lower,
            upper,
        })
    }

    pub fn base_t(&self) -> f64 {
        self.base_t
    }

    pub fn layer(&self, p: usize) -> Result<Layer> {
        if p > MAX_DEPTH {
            return Err(Error::domain("generated system", p as f64, "depth <= 3"));
        }
        Ok(Layer {
            depth: p,
            lo: self.lower[p],
            hi: self.upper[p],
        })
    }

    /// Evaluates one layer at `t ∈ [−1, 1]`.
    pub fn layer_point(&self, p: usize, t: f64) -> Result<LayerPoint> {
        let layer = self.layer(p)?;
        if p == 0 {
            return Ok(LayerPoint {
                u: t,
                nodes: Vec::new(),
                weight_sq: 1.0,
            });
        }
        let k = self.ladder.constants();
        let mut s = layer.lo + layer.half_width() * (t + 1.0);
        let mut nodes = Vec::with_capacity(p);
        let mut weight_sq = 1.0;
        for _ in 0..p {
            nodes.push(s);
            let phi = self.ladder.phi1(s)?;
            weight_sq *= modulus_sq_unchecked(s) / k.representation_slope(phi);
            s = phi;
        }
        Ok(LayerPoint {
            u: s - self.base_t - 1.0,
            nodes,
            weight_sq,
        })
    }

    /// `u_p(t)`.
    pub fn automorphism_u(&self, p: usize, t: f64) -> Result<f64> {
        check_unit(t)?;
        Ok(self.layer_point(p, t)?.u)
    }

    /// Layers applied innermost first: `p₃`, then `p₂`, then `p₁`.
    fn chain(&self, depths: [usize; 3], t: f64) -> Result<(f64, f64, [LayerPoint; 3])> {
        check_unit(t)?;
        for &p in &depths {
            if p > MAX_DEPTH {
                return Err(Error::domain("generated system", p as f64, "depth <= 3"));
            }
        }
        let inner = self.layer_point(depths[2], t)?;
        let middle = self.layer_point(depths[1], inner.u)?;
        let outer = self.layer_point(depths[0], middle.u)?;
        let weight_sq = inner.weight_sq * middle.weight_sq * outer.weight_sq;
        Ok((outer.u, weight_sq, [inner, middle, outer]))
    }

    /// `Pₙ^{p₁,p₂,p₃}(t)`.
    pub fn generated_function(&self, depths: [usize; 3], n: usize, t: f64) -> Result<f64> {
        if n > MAX_INDEX {
            return Err(Error::domain("generated_function", n as f64, "n <= 8"));
        }
        let (x, w2, _) = self.chain(depths, t)?;
        Ok(legendre_with_derivative(n, x).0 * w2.sqrt())
    }

    /// The weight product at `t` split into `ln|ζ(½+iv)|` and slope factors,
    /// one entry per `v`-node.
    pub fn log_decomposition(&self, depths: [usize; 3], t: f64) -> Result<Vec<LogFactor>> {
        let (_, _, points) = self.chain(depths, t)?;
        let k = self.ladder.constants();
        let mut out = Vec::new();
        // points are innermost first; report layer numbers as 3, 2, 1
        for (i, point) in points.iter().enumerate() {
            for (r, &v) in point.nodes.iter().enumerate() {
                let phi = self.ladder.phi1(v)?;
                out.push(LogFactor {
                    layer: 3 - i,
                    r,
                    node: v,
                    ln_zeta_modulus: 0.5 * modulus_sq_unchecked(v).ln(),
                    ln_slope_half: -0.5 * k.representation_slope(phi).ln(),
                });
            }
        }
        Ok(out)
    }

    /// Points of `[−1, 1]` whose innermost node is a zero of `Z`.
    fn zero_breakpoints(&self, p: usize) -> Result<Vec<f64>> {
        let mut out = vec![-1.0];
        if p > 0 {
            let layer = self.layer(p)?;
            let h = 0.05;
            let mut a = layer.lo;
            let mut za = z_riemann_siegel(a);
            while a < layer.hi {
                let b = (a + h).min(layer.hi);
                let zb = z_riemann_siegel(b);
                if za * zb < 0.0 {
                    let z = solve_sign_change("layer zero", z_riemann_siegel, a, b, 1e-14 * b)?;
                    let t = (z - layer.lo) / layer.half_width() - 1.0;
                    if t > -1.0 && t < 1.0 {
                        out.push(t);
                    }
                }
                a = b;
                za = zb;
            }
        }
        out.push(1.0);
        Ok(out)
    }

    /// Gram matrix of `P₀ … P_{n_max}` generated with the given depths.
    pub fn gram_matrix(&self, depths: [usize; 3], n_max: usize) -> Result<GeneratedSystem> {
        if n_max > MAX_INDEX {
            return Err(Error::domain("gram_matrix", n_max as f64, "n_max <= 8"));
        }
        let layers = [
            self.layer(depths[0])?,
            self.layer(depths[1])?,
            self.layer(depths[2])?,
        ];
        let scale: f64 = layers.iter().map(|l| l.half_width()).product();
        let diagonal_expected: Vec<f64> = (0..=n_max)
            .map(|n| 2.0 / (2 * n + 1) as f64 / scale)
            .collect();
        let pairs: Vec<(usize, usize)> = (0..=n_max)
            .flat_map(|n| (0..=n).map(move |m| (n, m)))
            .collect();
        let breaks = self.zero_breakpoints(depths[2])?;
        let abs_tol = GRAM_TOL * diagonal_expected[n_max];
        let mut failure = None;
        let mut p = vec![0.0; n_max + 1];
        let (values, err, converged) = adaptive_gk21_vec(&breaks, pairs.len(), abs_tol, 14, |t, out| {
            match self.chain(depths, t) {
                Ok((x, w2, _)) => {
                    legendre_all(x, &mut p);
                    for (slot, &(n, m)) in out.iter_mut().zip(&pairs) {
                        *slot = p[n] * p[m] * w2;
                    }
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    out.fill(0.0);
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        // panels at the depth limit are acceptable while the summed estimate meets the target
        if !converged && err > abs_tol {
            return Err(Error::ToleranceNotMet {
                achieved: err / diagonal_expected[n_max],
            });
        }
        let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
        for (&(n, m), v) in pairs.iter().zip(values) {
            gram[n][m] = v;
            gram[m][n] = v;
        }
        let (automorphism_cache, containment_ok) = self.automorphism_table(depths, 201, &layers)?;
        Ok(GeneratedSystem {
            base_t: self.base_t,
            depths,
            n_max,
            layers,
            automorphism_cache,
            containment_ok,
            gram,
            diagonal_expected,
            quadrature_error: err,
        })
    }

    fn automorphism_table(
        &self,
        depths: [usize; 3],
        count: usize,
        layers: &[Layer; 3],
    ) -> Result<(Vec<AutomorphismNode>, bool)> {
        let slack = 1e-9;
        let mut ok = true;
        let mut table = Vec::with_capacity(count);
        for i in 0..count {
            let t = -1.0 + 2.0 * i as f64 / (count - 1) as f64;
            let (_, _, points) = self.chain(depths, t)?;
            let mut us = Vec::with_capacity(3);
            let mut vs = Vec::with_capacity(3);
            for (point, layer) in points.iter().zip(layers.iter().rev()) {
                ok &= point.u.abs() <= 1.0 + slack;
                for (r, &v) in point.nodes.iter().enumerate() {
                    let lo = self.lower[layer.depth - r];
                    let hi = self.upper[layer.depth - r];
                    ok &= v >= lo * (1.0 - slack) && v <= hi * (1.0 + slack);
                }
                us.push(point.u);
                vs.push(point.nodes.clone());
            }
            table.push(AutomorphismNode { t, u: us, v: vs });
        }
        Ok((table, ok))
    }
}

fn check_unit(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0 + 1e-9) {
        return Err(Error::domain("generated system", t, "-1 <= t <= 1"));
    }
    Ok(())
}

/// `P₀(x) … P_N(x)` by the three-term recurrence.
fn legendre_all(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = ((2.0 * nf + 1.0) * x * out[n] - nf * out[n - 1]) / (nf + 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ZetaGrid;
    use std::sync::Arc;

    #[test]
    fn recurrence_matches_single_evaluation() {
        let mut p = vec![0.0; 9];
        for x in [-1.0, -0.3, 0.0, 0.77, 1.0] {
            legendre_all(x, &mut p);
            for (n, v) in p.iter().enumerate() {
                assert!((v - legendre_with_derivative(n, x).0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_depth_is_classical_legendre() {
        let grid = Arc::new(ZetaGrid::build(300.0, 1e-9).unwrap());
        let g = Generator::new(Ladder::new(grid), 150.0).unwrap();
        let sys = g.gram_matrix([0, 0, 0], 4).unwrap();
        for n in 0..=4 {
            assert!((sys.gram[n][n] - 2.0 / (2 * n + 1) as f64).abs() < 1e-12);
        }
        assert!(sys.max_off_diagonal(4) < 1e-14);
        assert_eq!(g.automorphism_u(0, 0.3).unwrap(), 0.3);
    }
}
