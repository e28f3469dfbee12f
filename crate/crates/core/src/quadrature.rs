//! Gauss–Legendre and Gauss–Kronrod rules on finite intervals.

use std::sync::OnceLock;

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        let sign = if n % 2 == 0 && x < 0.0 { -1.0 } else { 1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p - p_prev) / (x * x - 1.0)
    };
    (p, dp)
}

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

/// Shared 20-point rule used for short local integrals.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

// QUADPACK qk21 abscissae (descending, last is the centre) and weights.
const XGK21: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK21: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525452218,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// 10-point Gauss weights for the odd-indexed Kronrod abscissae.
const WG10: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// The 21 Kronrod abscissae on `[a, b]`, in ascending order.
pub fn kronrod21_nodes(a: f64, b: f64) -> [f64; 21] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [0.0; 21];
    for (i, x) in XGK21.iter().enumerate().take(10) {
        out[i] = mid - half * x;
        out[20 - i] = mid + half * x;
    }
    out[10] = mid;
    out
}

/// Combines integrand values at [`kronrod21_nodes`] into `(kronrod, |kronrod - gauss|)`.
pub fn kronrod21_combine(a: f64, b: f64, values: &[f64; 21]) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mut k = WGK21[10] * values[10];
    let mut g = 0.0;
    for i in 0..10 {
        let pair = values[i] + values[20 - i];
        k += WGK21[i] * pair;
        if i % 2 == 1 {
            g += WG10[i / 2] * pair;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// One Gauss–Kronrod 10/21 panel: `(integral, error estimate)`.
pub fn gauss_kronrod21<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> (f64, f64) {
    let nodes = kronrod21_nodes(a, b);
    let mut values = [0.0; 21];
    for (v, x) in values.iter_mut().zip(nodes) {
        *v = f(x);
    }
    kronrod21_combine(a, b, &values)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Adaptive bisection with Gauss–Kronrod 10/21 panels over the given breakpoints.
pub fn adaptive_gk21<F: FnMut(f64) -> f64>(
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
    mut f: F,
) -> Adaptive {
    let mut out = Adaptive {
        value: 0.0,
        error: 0.0,
        panels: 0,
        converged: true,
    };
    let mut stack: Vec<(f64, f64, u32)> = breakpoints
        .windows(2)
        .rev()
        .map(|w| (w[0], w[1], 0))
        .collect();
    let total_width = breakpoints.last().unwrap_or(&0.0) - breakpoints.first().unwrap_or(&0.0);
    while let Some((a, b, depth)) = stack.pop() {
        let (k, err) = gauss_kronrod21(a, b, &mut f);
        let share = if total_width > 0.0 {
            (b - a) / total_width
        } else {
            1.0
        };
        let allowed = (abs_tol * share).max(rel_tol * k.abs());
        if err <= allowed || depth >= max_depth {
            if err > allowed {
                out.converged = false;
            }
            out.value += k;
            out.error += err;
            out.panels += 1;
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        }
    }
    out
}

/// Vector-valued variant: every component shares the panel subdivision.
/// The error test applies to the component-wise maximum.
pub fn adaptive_gk21_vec<F: FnMut(f64, &mut [f64])>(
    breakpoints: &[f64],
    dim: usize,
    abs_tol: f64,
    max_depth: u32,
    mut f: F,
) -> (Vec<f64>, f64, bool) {
    let mut total = vec![0.0; dim];
    let mut err_total = 0.0;
    let mut converged = true;
    let mut buf = vec![0.0; dim];
    let mut values = vec![[0.0; 21]; dim];
    let mut stack: Vec<(f64, f64, u32)> = breakpoints
        .windows(2)
        .rev()
        .map(|w| (w[0], w[1], 0))
        .collect();
    let total_width = breakpoints.last().unwrap_or(&0.0) - breakpoints.first().unwrap_or(&0.0);
    let mut panel = vec![(0.0, 0.0); dim];
    while let Some((a, b, depth)) = stack.pop() {
        for (j, x) in kronrod21_nodes(a, b).into_iter().enumerate() {
            f(x, &mut buf);
            for (d, v) in buf.iter().enumerate() {
                values[d][j] = *v;
            }
        }
        let mut worst = 0.0f64;
        for d in 0..dim {
            panel[d] = kronrod21_combine(a, b, &values[d]);
            worst = worst.max(panel[d].1);
        }
        let allowed = abs_tol * (b - a) / total_width;
        if worst <= allowed || depth >= max_depth {
            if worst > allowed {
                converged = false;
            }
            for d in 0..dim {
                total[d] += panel[d].0;
            }
            err_total += worst;
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        }
    }
    (total, err_total, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(10);
        for k in 0..20 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(k));
            assert!((got - exact).abs() < 1e-14, "k={k}: {got} vs {exact}");
        }
        let w: f64 = rule.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_constants_are_consistent() {
        // Kronrod weights integrate degree <= 31 exactly; embedded Gauss weights degree <= 19.
        for k in (0..=30).step_by(2) {
            let exact = 2.0 / (k as f64 + 1.0);
            let (kr, _) = gauss_kronrod21(-1.0, 1.0, |x| x.powi(k));
            assert!((kr - exact).abs() < 1e-14, "kronrod degree {k}: {kr}");
        }
        let g10 = GaussLegendre::new(10);
        for i in 0..5 {
            let x = XGK21[2 * i + 1];
            let j = g10.nodes().iter().position(|n| (n - x).abs() < 1e-14);
            assert!(j.is_some(), "gauss node {x} missing");
            assert!((g10.weights()[j.unwrap()] - WG10[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        let r = adaptive_gk21(&[-1.0, 1.0], 1e-10, 1e-12, 40, f);
        assert!(r.converged);
        assert!((r.value - exact).abs() / exact < 1e-10);
    }
}
