//! Toeplitz operators with arc-indicator symbols, the Möbius map linking them
//! to K, and the basis h_n built from Meixner-Pollaczek polynomials.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::quadrature::{composite_gauss_legendre, QuadratureRule};
use crate::specfun::meixner_pollaczek_seq;
use crate::wiener_hopf::DenseOperator;
use crate::{domain, Bounded, Result};

/// The arc {e^{i phi}: alpha + beta <= phi <= alpha + 2 pi - beta}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl ArcSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..2.0 * PI).contains(&alpha) {
            return domain(format!("alpha must lie in [0, 2pi), got {alpha}"));
        }
        if !(beta > 0.0 && beta < PI) {
            return domain(format!("beta must lie in (0, pi), got {beta}"));
        }
        Ok(Self { alpha, beta })
    }

    /// The arc that makes T(1_A) unitarily equivalent to K through the
    /// Laguerre basis: alpha = 0, tan(beta/2) = 1/2.
    pub fn laguerre() -> Self {
        Self {
            alpha: 0.0,
            beta: 2.0 * 0.5f64.atan(),
        }
    }

    /// Normalized measure 1 - beta/pi.
    pub fn measure(&self) -> f64 {
        1.0 - self.beta / PI
    }

    pub fn contains(&self, phi: f64) -> bool {
        (phi - self.alpha - self.beta).rem_euclid(2.0 * PI) <= 2.0 * PI - 2.0 * self.beta
    }

    pub fn moebius(&self) -> MoebiusMap {
        MoebiusMap {
            alpha: self.alpha,
            tau: (self.beta / 2.0).tan(),
        }
    }
}

/// chi(x) = e^{i alpha} (x - i tau)/(x + i tau), tau = tan(beta/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub alpha: f64,
    pub tau: f64,
}

impl MoebiusMap {
    pub fn apply(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.alpha) * Complex64::new(x, -self.tau)
            / Complex64::new(x, self.tau)
    }

    pub fn inverse(&self, w: Complex64) -> Complex64 {
        let e = Complex64::from_polar(1.0, self.alpha);
        Complex64::new(0.0, self.tau) * (w + e) / (e - w)
    }
}

/// (1/2pi) int_A e^{-ik phi} d phi.
pub fn arc_fourier_coeff(k: i64, arc: &ArcSpec) -> Complex64 {
    if k == 0 {
        return Complex64::new(arc.measure(), 0.0);
    }
    let kf = k as f64;
    -Complex64::from_polar(1.0, -kf * arc.alpha) * (kf * arc.beta).sin() / (PI * kf)
}

pub fn toeplitz_matrix(n: usize, arc: &ArcSpec) -> Result<DenseOperator> {
    if n == 0 {
        return domain("Toeplitz section needs N >= 1");
    }
    let entries = DMatrix::from_fn(n, n, |i, j| arc_fourier_coeff(i as i64 - j as i64, arc));
    let rule = QuadratureRule::discrete(n);
    Ok(DenseOperator {
        row_rule: rule.clone(),
        col_rule: rule,
        entries,
        hermitian: true,
    })
}

/// x = ln(1/s - 1) / (2 pi)
fn mp_variable(s: f64) -> f64 {
    (1.0 / s - 1.0).ln() / (2.0 * PI)
}

/// h_n(s) = e^{in alpha} sqrt(sin beta / pi) (1/s - 1)^{beta/2pi} (1-s)^{-1/2} P_n(x; beta).
pub fn h_basis(n: usize, s: f64, arc: &ArcSpec) -> Result<Complex64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("h_n needs s in (0,1), got {s}"));
    }
    let p = *meixner_pollaczek_seq(n, mp_variable(s), arc.beta)?
        .last()
        .unwrap();
    let mag = (arc.beta.sin() / PI).sqrt() * (1.0 / s - 1.0).powf(arc.beta / (2.0 * PI))
        / (1.0 - s).sqrt()
        * p;
    Ok(Complex64::from_polar(mag, n as f64 * arc.alpha))
}

/// ln(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// int_0^1 s^{k} conj(h_m) h_n ds, k in {0, 1}, after s = 1/(1 + e^{2 pi x}):
/// e^{i(n-m) alpha} int 2 sin(beta) e^{2 beta x} s^{1+k} P_m P_n dx.
/// `nodes_per_unit` Gauss-Legendre nodes on unit panels of [-L, L], with L
/// chosen so that the discarded tail is below 1e-18.
pub fn arc_moment(
    m: usize,
    n: usize,
    arc: &ArcSpec,
    s_power: u32,
    nodes_per_unit: usize,
) -> Result<Bounded<Complex64>> {
    let beta = arc.beta;
    let rate = (2.0 * beta).min(2.0 * PI - 2.0 * beta);
    let deg = (m + n) as i32;
    let bound = |l: f64| {
        2.0 * beta.sin() * (-rate * l).exp() * (2.0 * l + deg as f64 + 2.0).powi(deg) / rate
    };
    let mut l = 10.0;
    while bound(l) > 1e-18 {
        l += 2.0;
    }
    let rule = composite_gauss_legendre(-l, l, (2.0 * l) as usize, nodes_per_unit)?;
    let top = m.max(n);
    let mut sum = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let sp = softplus(2.0 * PI * x);
        let weight = 2.0 * beta.sin() * (2.0 * beta * x - (1.0 + s_power as f64) * sp).exp();
        let p = meixner_pollaczek_seq(top, x, beta)?;
        sum += w * weight * p[m] * p[n];
    }
    let phase = Complex64::from_polar(1.0, (n as f64 - m as f64) * arc.alpha);
    Ok(Bounded {
        value: phase * sum,
        tail_bound: bound(l),
    })
}

/// |c(m-n) - int_0^1 s conj(h_m) h_n ds|.
pub fn spectral_rep_check(m: usize, n: usize, arc: &ArcSpec, nodes_per_unit: usize) -> Result<f64> {
    let mom = arc_moment(m, n, arc, 1, nodes_per_unit)?;
    Ok((arc_fourier_coeff(m as i64 - n as i64, arc) - mom.value).norm())
}

/// |delta_mn - int_0^1 conj(h_m) h_n ds|.
pub fn orthonormality_defect(
    m: usize,
    n: usize,
    arc: &ArcSpec,
    nodes_per_unit: usize,
) -> Result<f64> {
    let mom = arc_moment(m, n, arc, 0, nodes_per_unit)?;
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok((mom.value - delta).norm())
}
