//! Spectral functions q_+(s, x) of K, the diagonalizing transform V and its
//! action on the Laguerre basis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::quadrature::{
    composite_from_breaks, gauss_legendre, half_line, oscillatory_line_adaptive, oscillatory_rule,
    Domain, GridFunction, TailModel,
};
use crate::specfun::laguerre_fn;
use crate::{domain, Bounded, Result};

/// Truncation of the v-line; sech(40) < 1e-16 relative to the peak.
pub const V_HALF_WIDTH: f64 = 80.0;
pub const PANELS_PER_PERIOD: usize = 8;
pub const S_WINDOW: (f64, f64) = (0.01, 0.99);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub s: f64,
    /// ln(1/s - 1) / (2 pi)
    pub a: f64,
    /// pi^{-3/2} / (2 s sqrt(1-s))
    pub prefactor: f64,
}

impl SpectralParameter {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return domain(format!("spectral value must lie in (0,1), got {s}"));
        }
        Ok(Self {
            s,
            a: (1.0 / s - 1.0).ln() / (2.0 * PI),
            prefactor: 0.5 * PI.powf(-1.5) / (s * (1.0 - s).sqrt()),
        })
    }

    /// Amplitude C with |q_+(s, x)| <~ C x^{-1/2}: each endpoint of the
    /// u-integral contributes prefactor sqrt(pi / (2 cosh(pi a))) e^{-pi a/2},
    /// and the sum simplifies to 1/(pi sqrt(s(1-s))).
    pub fn envelope_coeff(&self) -> f64 {
        1.0 / (PI * (self.s * (1.0 - self.s)).sqrt())
    }

    pub fn tail_model(&self) -> TailModel {
        TailModel::PowerLaw {
            coeff: self.envelope_coeff(),
            power: 0.5,
        }
    }
}

/// prefactor * int cos(x tanh(v/2) + a v - shift) sech(v/2)/2 dv
fn v_line(p: &SpectralParameter, x: f64, shift: f64) -> f64 {
    let (a, xa) = (p.a, x.abs());
    let env = |v: f64| 0.5 / (v / 2.0).cosh();
    let freq = move |v: f64| {
        let c = (v / 2.0).cosh();
        xa / (2.0 * c * c) + a.abs()
    };
    let phase = move |v: f64| x * (v / 2.0).tanh() + a * v - shift;
    p.prefactor
        * oscillatory_line_adaptive(&env, &phase, &freq, V_HALF_WIDTH, PANELS_PER_PERIOD)
            .expect("sech envelope is negligible at the truncation point")
}

/// Cosine and sine parts of the v-line integral; the sine part vanishes.
pub fn q_plus_parts(p: &SpectralParameter, x: f64) -> (f64, f64) {
    (v_line(p, x, 0.0), v_line(p, x, PI / 2.0))
}

pub fn q_plus(p: &SpectralParameter, x: f64) -> f64 {
    v_line(p, x, 0.0)
}

/// q_-(s, x) = q_+(1 - s, -x).
pub fn q_minus(s: f64, x: f64) -> Result<f64> {
    Ok(q_plus(&SpectralParameter::new(1.0 - s)?, -x))
}

/// Second route: prefactor * int_0^pi cos(x cos t - 2a ln tan(t/2)) dt on
/// panels halving toward both endpoints.
pub fn q_plus_direct(p: &SpectralParameter, x: f64) -> f64 {
    let max_w = 2.0 * PI / (8.0 * x.abs().max(1.0));
    let mut breaks = vec![0.0];
    let mut t = (PI / 2.0) * 0.5f64.powi(40);
    breaks.push(t);
    while t < PI / 2.0 {
        let next = (2.0 * t).min(t + max_w).min(PI / 2.0);
        breaks.push(next);
        t = next;
    }
    let mirrored: Vec<f64> = breaks.iter().rev().skip(1).map(|b| PI - b).collect();
    breaks.extend(mirrored);
    let rule = composite_from_breaks(&breaks, 20).expect("increasing breaks");
    let a = p.a;
    p.prefactor * rule.integrate_real(|t| (x * t.cos() - 2.0 * a * (t / 2.0).tan().ln()).cos())
}

/// (Vh)(x) = int q_+(s, x) h(s) ds over the window carried by h's rule.
///
/// The s-integral is taken inside the v-line integral: with one v-rule
/// resolving the largest x, G_{+-}(v) = sum_s w prefactor h e^{+-iav} is formed
/// once and (Vh)(x) = (1/2) int sech(v/2)/2 (e^{ix tanh(v/2)} G_+ + e^{-ix tanh(v/2)} G_-) dv.
pub fn apply_v(h: &GridFunction, xs: &[f64]) -> Result<Vec<Complex64>> {
    match h.rule.domain {
        Domain::Finite { a, b } if a >= S_WINDOW.0 && b <= S_WINDOW.1 => {}
        _ => return domain("apply_v needs h on a window [d, 1-d] with d >= 0.01"),
    }
    let params: Vec<SpectralParameter> = h
        .rule
        .nodes
        .iter()
        .map(|&s| SpectralParameter::new(s))
        .collect::<Result<_>>()?;
    let x_top = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let a_top = params.iter().fold(0.0f64, |m, p| m.max(p.a.abs()));
    let freq = move |v: f64| {
        let c = (v / 2.0).cosh();
        x_top / (2.0 * c * c) + a_top
    };
    let rule = oscillatory_rule(&freq, V_HALF_WIDTH, PANELS_PER_PERIOD)?;
    let coef: Vec<Complex64> = params
        .iter()
        .zip(&h.rule.weights)
        .zip(&h.values)
        .map(|((p, &w), &v)| w * p.prefactor * v)
        .collect();
    let sums: Vec<(f64, Complex64, Complex64)> = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(&v, &w)| {
            let (mut gp, mut gm) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for (p, c) in params.iter().zip(&coef) {
                let e = Complex64::from_polar(1.0, p.a * v);
                gp += c * e;
                gm += c * e.conj();
            }
            let weight = w * 0.25 / (v / 2.0).cosh();
            ((v / 2.0).tanh(), weight * gp, weight * gm)
        })
        .collect();
    Ok(xs
        .par_iter()
        .map(|&x| {
            sums.iter()
                .map(|&(th, gp, gm)| {
                    let e = Complex64::from_polar(1.0, x * th);
                    e * gp + e.conj() * gm
                })
                .sum()
        })
        .collect())
}

/// Integration cut-off and tail bound for int_X^inf |q_+ l_n|, using
/// |q_+(y)| <= C y^{-1/2} and |l_n(y)| <= e^{-y/2} (1+y)^n.
fn laguerre_tail(c: f64, n: usize, from: f64) -> f64 {
    let maj = |y: f64| c * y.powf(-0.5) * (-y / 2.0 + n as f64 * (1.0 + y).ln()).exp();
    let r = gauss_legendre(200, from, from + 400.0).expect("finite interval");
    r.integrate_real(maj)
}

/// int_0^X q_+(s, x) l_n(x) dx for each s, which should reproduce h_n(s) at
/// the arc alpha = 0, tan(beta/2) = 1/2.
pub fn apply_v_inverse_on_laguerre(
    n: usize,
    s_values: &[SpectralParameter],
    x_max: f64,
) -> Result<Vec<Bounded<f64>>> {
    if x_max < 200.0 {
        return domain(format!(
            "apply_v_inverse_on_laguerre needs X >= 200, got {x_max}"
        ));
    }
    let mut out = Vec::with_capacity(s_values.len());
    for p in s_values {
        if p.s < S_WINDOW.0 || p.s > S_WINDOW.1 {
            return domain(format!("s = {} outside the window [0.01, 0.99]", p.s));
        }
        let c = p.envelope_coeff();
        // stop where the majorant tail is negligible, but never beyond X
        let mut cut = 20.0f64;
        while cut < x_max && laguerre_tail(c, n, cut) > 1e-18 {
            cut += 10.0;
        }
        let cut = cut.min(x_max);
        let rule = half_line(cut, PI / 4.0, 10)?;
        let value: f64 = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * q_plus(p, x) * laguerre_fn(n, x).expect("x >= 0"))
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        out.push(Bounded {
            value,
            tail_bound: laguerre_tail(c, n, cut),
        });
    }
    Ok(out)
}
