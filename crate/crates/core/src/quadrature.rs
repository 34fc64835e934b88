//! Quadrature rules: Gauss-Legendre (plain and composite), Gauss-Chebyshev,
//! Chebyshev principal values and panelled rules for oscillatory integrands
//! with decaying envelopes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite {
        a: f64,
        b: f64,
    },
    /// [-1,1] against the weight (1-u^2)^{-1/2}.
    ChebyshevWeighted,
    HalfLine {
        x_max: f64,
    },
    Line {
        half_width: f64,
    },
    /// Counting measure on 0..n (matrix indices).
    Discrete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn integrate_real<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> GridFunction {
        GridFunction {
            values: self.nodes.iter().map(|&x| f(x)).collect(),
            rule: self.clone(),
        }
    }

    pub fn discrete(n: usize) -> Self {
        Self {
            nodes: (0..n).map(|i| i as f64).collect(),
            weights: vec![1.0; n],
            domain: Domain::Discrete,
            order: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub rule: QuadratureRule,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(rule: QuadratureRule, values: Vec<Complex64>) -> Result<Self> {
        if rule.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: rule.len(),
                got: values.len(),
            });
        }
        Ok(Self { rule, values })
    }

    pub fn norm_sq(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.rule.weights)
            .map(|(v, w)| w * v.norm_sqr())
            .sum()
    }
}

/// Nodes and weights of the n-point rule on [-1,1], ascending.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    (x, w)
}

pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return domain("Gauss-Legendre needs n >= 1");
    }
    if !(a < b) {
        return domain(format!("Gauss-Legendre needs a < b, got [{a}, {b}]"));
    }
    let (x, w) = legendre_nodes(n);
    let h = (b - a) / 2.0;
    let c = (a + b) / 2.0;
    Ok(QuadratureRule {
        nodes: x.iter().map(|t| c + h * t).collect(),
        weights: w.iter().map(|t| h * t).collect(),
        domain: Domain::Finite { a, b },
        order: n,
    })
}

/// Gauss-Legendre with `n` nodes on each of the panels delimited by `breaks`.
pub fn composite_from_breaks(breaks: &[f64], n: usize) -> Result<QuadratureRule> {
    if breaks.len() < 2 {
        return domain("composite rule needs at least one panel");
    }
    let (x, w) = legendre_nodes(n);
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * n);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for p in breaks.windows(2) {
        if !(p[0] < p[1]) {
            return domain("panel breaks must increase");
        }
        let h = (p[1] - p[0]) / 2.0;
        let c = (p[0] + p[1]) / 2.0;
        nodes.extend(x.iter().map(|t| c + h * t));
        weights.extend(w.iter().map(|t| h * t));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::Finite {
            a: breaks[0],
            b: *breaks.last().unwrap(),
        },
        order: n,
    })
}

pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, n: usize) -> Result<QuadratureRule> {
    if panels == 0 || !(a < b) {
        return domain("composite rule needs panels >= 1 and a < b");
    }
    let mut breaks: Vec<f64> = (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect();
    breaks[panels] = b;
    composite_from_breaks(&breaks, n)
}

/// Composite rule on [0, X] tagged as a truncated half-line.
pub fn half_line(x_max: f64, panel_width: f64, n: usize) -> Result<QuadratureRule> {
    let panels = (x_max / panel_width).ceil().max(1.0) as usize;
    let mut r = composite_gauss_legendre(0.0, x_max, panels, n)?;
    r.domain = Domain::HalfLine { x_max };
    Ok(r)
}

/// Gauss-Chebyshev rule for the weight (1-u^2)^{-1/2}; nodes stored ascending.
pub fn gauss_chebyshev(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return domain("Gauss-Chebyshev needs n >= 1");
    }
    let nf = n as f64;
    let mut nodes: Vec<f64> = (1..=n)
        .map(|k| (PI * (2.0 * k as f64 - 1.0) / (2.0 * nf)).cos())
        .collect();
    nodes.reverse();
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights: vec![PI / nf; n],
        domain: Domain::ChebyshevWeighted,
        order: n,
    })
}

pub fn integrate(rule: &QuadratureRule, f: &GridFunction) -> Result<Complex64> {
    if f.values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            got: f.values.len(),
        });
    }
    Ok(rule.weights.iter().zip(&f.values).map(|(w, v)| w * v).sum())
}

/// PV integral of f(y)/(y - x0) over [-1,1] by singularity subtraction on the
/// Chebyshev rule: with G(y) = f(y) sqrt(1-y^2),
/// PV = sum_k (pi/n) (G(u_k) - G(x0)) / (u_k - x0).
pub fn principal_value_cheb<F: Fn(f64) -> Complex64>(f: F, x0: f64, n: usize) -> Result<Complex64> {
    if !(x0 > -1.0 && x0 < 1.0) {
        return domain(format!(
            "principal value point must lie in (-1,1), got {x0}"
        ));
    }
    let rule = gauss_chebyshev(n)?;
    let g = |y: f64| f(y) * (1.0 - y * y).sqrt();
    let g0 = g(x0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let d = u - x0;
        if d.abs() < 1e-12 {
            return domain(format!(
                "principal value point {x0} coincides with a node; change n"
            ));
        }
        sum += w * (g(u) - g0) / d;
    }
    Ok(sum)
}

/// Integral over [-V, V] of env(v) cos(phase(v)) with panels no wider than
/// (2 pi / max(1, freq)) / panels_per_period and 10 nodes per panel.
pub fn oscillatory_line(
    envelope: &dyn Fn(f64) -> f64,
    phase: &dyn Fn(f64) -> f64,
    freq: f64,
    half_width: f64,
    panels_per_period: usize,
) -> Result<f64> {
    oscillatory_line_adaptive(
        envelope,
        phase,
        &|_| freq.abs(),
        half_width,
        panels_per_period,
    )
}

/// Symmetric composite rule on [-V, V] whose panels are at most
/// (2 pi / max(1, local_freq)) / panels_per_period wide, 10 nodes each.
pub fn oscillatory_rule(
    local_freq: &dyn Fn(f64) -> f64,
    half_width: f64,
    panels_per_period: usize,
) -> Result<QuadratureRule> {
    if panels_per_period < 4 {
        return domain("oscillatory_line needs at least 4 panels per period");
    }
    if !(half_width > 0.0) {
        return domain("oscillatory_line needs a positive half width");
    }
    // breaks are built on [0, V] and mirrored so the rule is symmetric
    let width = |v: f64| {
        let f = local_freq(v).max(local_freq(-v)).max(1.0);
        2.0 * PI / f / panels_per_period as f64
    };
    let mut half = vec![0.0];
    let mut v = 0.0;
    while v < half_width {
        let w0 = width(v);
        let w = w0.min(width(v + w0)).min(width(v + w0 / 2.0));
        v = (v + w).min(half_width);
        half.push(v);
    }
    let mut breaks: Vec<f64> = half.iter().rev().map(|b| -b).collect();
    breaks.extend_from_slice(&half[1..]);
    composite_from_breaks(&breaks, 10)
}

/// As [`oscillatory_line`], but panel widths follow a local frequency bound.
pub fn oscillatory_line_adaptive(
    envelope: &dyn Fn(f64) -> f64,
    phase: &dyn Fn(f64) -> f64,
    local_freq: &dyn Fn(f64) -> f64,
    half_width: f64,
    panels_per_period: usize,
) -> Result<f64> {
    let rule = oscillatory_rule(local_freq, half_width, panels_per_period)?;
    let mut peak = 0.0f64;
    let mut sum = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let e = envelope(x);
        peak = peak.max(e.abs());
        sum += w * e * phase(x).cos();
    }
    let edge = envelope(-half_width).abs().max(envelope(half_width).abs());
    if edge > 1e-16 * peak {
        return Err(Error::Tail(format!(
            "envelope at the truncation point is {edge:e}, peak {peak:e}"
        )));
    }
    Ok(sum)
}

/// Envelope of a function beyond the truncation point X, used to bound the
/// discarded part of half-line integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// Vanishes beyond X.
    Compact,
    /// |g(y)| <= coeff * y^{-power} for y >= X, power > 0.
    PowerLaw { coeff: f64, power: f64 },
    /// |g(y)| <= coeff * e^{-rate y} for y >= X.
    Exponential { coeff: f64, rate: f64 },
}

impl TailModel {
    /// Bound on |int_X^inf (1/pi) sinc(x-y) g(y) dy| for 0 <= x < X, using
    /// |sinc(x-y)| <= 1/(y-x) and y - x >= y (X-x)/X.
    pub fn sinc_tail_bound(&self, x_max: f64, x: f64) -> f64 {
        let gap = x_max - x;
        if gap <= 0.0 {
            return f64::INFINITY;
        }
        match *self {
            TailModel::Compact => 0.0,
            TailModel::PowerLaw { coeff, power } => {
                coeff * x_max.powf(1.0 - power) / (power * PI * gap)
            }
            TailModel::Exponential { coeff, rate } => {
                coeff * (-rate * x_max).exp() / (rate * PI * gap)
            }
        }
    }
}
