//! Radial blocks of the localization operator: Hankel transforms of
//! half-integer order, the kernels k_{l+1/2}, rank-one Bessel projections and
//! the Bessel series identities behind the block decomposition.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::quadrature::{GridFunction, QuadratureRule};
use crate::specfun::{bessel_half_seq, sinc, HalfIntegerOrder};
use crate::{domain, Result};

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        domain(format!("{what} must be positive, got {x}"))
    }
}

/// J_{l+1/2}(x) for a single l >= -1.
fn bessel_half(l: i32, x: f64) -> Result<f64> {
    Ok(bessel_half_seq(l, x)?[(l + 1) as usize])
}

/// Projection P(2n + i + 1/2) onto (4n + 2i + 1)^{1/2} s^{-1/2} J_{2n+i+1/2}(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselProjectionIndex {
    pub n: usize,
    pub i: usize,
}

impl BesselProjectionIndex {
    pub fn new(n: usize, i: usize) -> Result<Self> {
        if i > 1 {
            return domain(format!("projection parity index must be 0 or 1, got {i}"));
        }
        Ok(Self { n, i })
    }

    /// l with 2n + i + 1/2 = l + 1/2.
    pub fn l(&self) -> i32 {
        (2 * self.n + self.i) as i32
    }

    pub fn order(&self) -> f64 {
        self.l() as f64 + 0.5
    }

    /// (4n + 2i + 1) (rt)^{-1/2} J(r) J(t)
    pub fn kernel(&self, r: f64, t: f64) -> Result<f64> {
        positive(r, "r")?;
        positive(t, "t")?;
        let l = self.l();
        Ok((2 * l + 1) as f64 / (r * t).sqrt() * bessel_half(l, r)? * bessel_half(l, t)?)
    }
}

/// k_{l+1/2}(r,t) = (1/2) sqrt(rt)/(r-t) (J_{l+3/2}(r) J_{l+1/2}(t) - J_{l+1/2}(r) J_{l+3/2}(t)).
///
/// Near the diagonal the limit (t/2)(J_nu^2 + J_{nu+1}^2 - (2nu+1)/t J_nu J_{nu+1})
/// at the midpoint is used.
pub fn k_kernel(l: i32, r: f64, t: f64) -> Result<f64> {
    let order = HalfIntegerOrder::new(l)?;
    positive(r, "r")?;
    positive(t, "t")?;
    if (r - t).abs() <= 1e-6 * r.max(1.0) {
        let m = 0.5 * (r + t);
        let j = bessel_half_seq(l + 1, m)?;
        let (a, b) = (j[(l + 1) as usize], j[(l + 2) as usize]);
        let nu = order.nu();
        return Ok(0.5 * m * (a * a + b * b - (2.0 * nu + 1.0) / m * a * b));
    }
    let jr = bessel_half_seq(l + 1, r)?;
    let jt = bessel_half_seq(l + 1, t)?;
    let (i, k) = ((l + 1) as usize, (l + 2) as usize);
    Ok(0.5 * (r * t).sqrt() / (r - t) * (jr[k] * jt[i] - jr[i] * jt[k]))
}

/// |k_{l+1/2}(r,t) - (1/pi) sinc(r-t) + (1/2) sum_{k<=l} (2k+1)(rt)^{-1/2} J_{k+1/2}(r) J_{k+1/2}(t)|.
pub fn fdpok_residual(l: i32, r: f64, t: f64) -> Result<f64> {
    if l < 0 {
        return domain(format!("finite-rank identity needs l >= 0, got {l}"));
    }
    let k = k_kernel(l, r, t)?;
    let jr = bessel_half_seq(l, r)?;
    let jt = bessel_half_seq(l, t)?;
    let sum: f64 = (0..=l)
        .map(|q| (2 * q + 1) as f64 * jr[(q + 1) as usize] * jt[(q + 1) as usize])
        .sum::<f64>()
        / (r * t).sqrt();
    Ok((k - sinc(r - t) / PI + 0.5 * sum).abs())
}

/// F_l(x, x') = (x x')^{-1/2} J_{l+1/2}(x) J_{l+1/2}(x'), l = 0..=lmax.
fn f_terms(lmax: usize, x: f64, xp: f64) -> Result<Vec<f64>> {
    positive(x, "x")?;
    positive(xp, "x'")?;
    let a = bessel_half_seq(lmax as i32, x)?;
    let b = bessel_half_seq(lmax as i32, xp)?;
    let s = 1.0 / (x * xp).sqrt();
    Ok((0..=lmax).map(|l| s * a[l + 1] * b[l + 1]).collect())
}

/// sum_{l<=L} (2l+1) F_l(x, x'); tends to (2/pi) sinc(x - x').
pub fn gegenbauer_partial_sum(lmax: usize, x: f64, xp: f64) -> Result<f64> {
    Ok(f_terms(lmax, x, xp)?
        .iter()
        .enumerate()
        .map(|(l, f)| (2 * l + 1) as f64 * f)
        .sum())
}

/// Residuals of the even and odd expansions
/// (1/pi)(sinc(x-x') + sinc(x+x')) = sum (4l+1) F_{2l},
/// (1/pi)(sinc(x-x') - sinc(x+x')) = sum (4l+3) F_{2l+1}, with 2l+1 <= 2L+1.
pub fn fagko_parity_check(lmax: usize, x: f64, xp: f64) -> Result<(f64, f64)> {
    let f = f_terms(2 * lmax + 1, x, xp)?;
    let even: f64 = (0..=lmax).map(|l| (4 * l + 1) as f64 * f[2 * l]).sum();
    let odd: f64 = (0..=lmax).map(|l| (4 * l + 3) as f64 * f[2 * l + 1]).sum();
    let (dm, dp) = (sinc(x - xp), sinc(x + xp));
    Ok(((even - (dm + dp) / PI).abs(), (odd - (dm - dp) / PI).abs()))
}

/// sqrt(rt) int_0^1 s J_nu(rs) J_nu(ts) ds in Lommel's closed form, nu = l + 1/2.
pub fn lommel_kernel(l: i32, r: f64, t: f64) -> Result<f64> {
    HalfIntegerOrder::new(l)?;
    positive(r, "r")?;
    positive(t, "t")?;
    if (r - t).abs() <= 1e-6 * r.max(1.0) {
        return domain("Lommel kernel evaluated on the diagonal");
    }
    let jr = bessel_half_seq(l + 1, r)?;
    let jt = bessel_half_seq(l + 1, t)?;
    let (i, k) = ((l + 1) as usize, (l + 2) as usize);
    Ok((r * t).sqrt() * (r * jr[k] * jt[i] - t * jr[i] * jt[k]) / (r * r - t * t))
}

/// |H_{5/2} 1_{[0,1]} H_{5/2} - (H_{1/2} 1_{[0,1]} H_{1/2} - P(3/2))| at (r,t).
pub fn block_five_halves_residual(r: f64, t: f64) -> Result<f64> {
    let p = BesselProjectionIndex::new(0, 1)?;
    Ok((lommel_kernel(2, r, t)? - (lommel_kernel(0, r, t)? - p.kernel(r, t)?)).abs())
}

/// S(z) = sum_{k=n}^{n'} 2(nu+2k)/(ab) J_{nu+2k}(az) J_{nu+2k}(bz)
fn alpha_sum(l: i32, a: f64, b: f64, n: usize, np: usize, z: f64) -> Result<f64> {
    let top = l + 2 * np as i32 + 1;
    let ja = bessel_half_seq(top, a * z)?;
    let jb = bessel_half_seq(top, b * z)?;
    let nu = l as f64 + 0.5;
    Ok((n..=np)
        .map(|k| {
            let idx = (l + 2 * k as i32 + 1) as usize;
            2.0 * (nu + 2.0 * k as f64) / (a * b) * ja[idx] * jb[idx]
        })
        .sum())
}

/// Residual of d/dz S(z) = z (J_{nu+2n-1}(az) J_{nu+2n-1}(bz) - J_{nu+2n'+1}(az) J_{nu+2n'+1}(bz)),
/// with the derivative from a 5-point stencil of step 1e-3. Half-integer nu >= 1/2.
pub fn alpha_identity_check(nu: f64, a: f64, b: f64, n: usize, np: usize, z: f64) -> Result<f64> {
    let l = (nu - 0.5).round();
    if (nu - 0.5 - l).abs() > 1e-12 || l < 0.0 {
        return domain(format!(
            "only half-integer orders nu >= 1/2 are supported, got {nu}"
        ));
    }
    let l = l as i32;
    if a == 0.0 || b == 0.0 {
        return domain("identity needs ab != 0");
    }
    if a < 0.0 || b < 0.0 {
        return domain("identity is evaluated for a, b > 0 only");
    }
    if n > np {
        return domain(format!("need n <= n', got {n} > {np}"));
    }
    positive(z, "z")?;
    let h = 1e-3;
    if z <= 2.0 * h {
        return domain(format!("z must exceed the stencil width {}", 2.0 * h));
    }
    let s = |zz: f64| alpha_sum(l, a, b, n, np, zz);
    let deriv =
        (s(z - 2.0 * h)? - 8.0 * s(z - h)? + 8.0 * s(z + h)? - s(z + 2.0 * h)?) / (12.0 * h);
    let top = l + 2 * np as i32 + 1;
    let ja = bessel_half_seq(top, a * z)?;
    let jb = bessel_half_seq(top, b * z)?;
    let lo = (l + 2 * n as i32 - 1 + 1) as usize;
    let hi = (top + 1) as usize;
    let rhs = z * (ja[lo] * jb[lo] - ja[hi] * jb[hi]);
    Ok((deriv - rhs).abs())
}

/// (H_nu g)(s) = int sqrt(s s') J_nu(s s') g(s') ds' on the rule carried by g,
/// evaluated at `at`.
pub fn hankel_transform(l: i32, g: &GridFunction, at: &[f64]) -> Result<Vec<f64>> {
    HalfIntegerOrder::new(l)?;
    at.par_iter()
        .map(|&s| {
            let mut acc = 0.0;
            for ((&sp, &w), v) in g.rule.nodes.iter().zip(&g.rule.weights).zip(&g.values) {
                let arg = s * sp;
                if arg > 0.0 {
                    acc += w * arg.sqrt() * bessel_half(l, arg)? * v.re;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// max over the grid of |H_nu g - g| for g(s) = s^{nu+1/2} e^{-s^2/2}, nu = l + 1/2.
pub fn hankel_selfreciprocal_check(l: i32, grid: &QuadratureRule) -> Result<f64> {
    let nu = HalfIntegerOrder::new(l)?.nu();
    let s_max = grid.nodes.last().copied().unwrap_or(0.0);
    if s_max < 11.0 {
        return domain(format!(
            "truncation S must be at least 12, grid ends at {s_max}"
        ));
    }
    let g =
        grid.sample(|s| num_complex::Complex64::new(s.powf(nu + 0.5) * (-s * s / 2.0).exp(), 0.0));
    let hg = hankel_transform(l, &g, &grid.nodes)?;
    Ok(hg
        .iter()
        .zip(&g.values)
        .map(|(h, v)| (h - v.re).abs())
        .fold(0.0, f64::max))
}
