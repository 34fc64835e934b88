//! Special functions: sinc kernel, half-integer order Bessel functions,
//! Legendre, Jacobi (0,1), Laguerre functions and Meixner-Pollaczek polynomials.

use std::f64::consts::PI;

use crate::{domain, Result};

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// The convolution kernel (1/pi) sinc(x) of K.
pub fn sinc_kernel(x: f64) -> f64 {
    sinc(x) / PI
}

/// Order nu = l + 1/2 with l >= -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfIntegerOrder {
    l: i32,
}

impl HalfIntegerOrder {
    pub fn new(l: i32) -> Result<Self> {
        if l < -1 {
            return domain(format!("half-integer order needs l >= -1, got {l}"));
        }
        Ok(Self { l })
    }

    pub fn l(self) -> i32 {
        self.l
    }

    pub fn nu(self) -> f64 {
        self.l as f64 + 0.5
    }
}

/// J_{l+1/2}(x) for l = -1, 0, ..., lmax, i.e. `out[l+1]`.
///
/// Upward recurrence while the order stays below x, Miller's downward
/// recurrence otherwise.
pub fn bessel_half_seq(lmax: i32, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!(
            "Bessel argument must be positive and finite, got {x}"
        ));
    }
    if lmax < -1 {
        return domain(format!("lmax must be >= -1, got {lmax}"));
    }
    let len = (lmax + 2) as usize;
    let amp = (2.0 / (PI * x)).sqrt();
    let jm = amp * x.cos();
    let j0 = amp * x.sin();
    let mut out = vec![0.0; len];
    out[0] = jm;
    if len == 1 {
        return Ok(out);
    }
    out[1] = j0;
    if (lmax as f64) <= x {
        for l in 1..=lmax {
            let nu = l as f64 - 0.5;
            let i = (l + 1) as usize;
            out[i] = 2.0 * nu / x * out[i - 1] - out[i - 2];
        }
        return Ok(out);
    }
    let big = lmax.max(x as i32) as f64;
    let start = (big + 20.0 + (40.0 * big).sqrt()) as i32 + 1;
    let mut above = 0.0f64;
    let mut cur = 1e-300f64;
    let mut tmp = vec![0.0; len];
    // cur holds J_{k+1/2}, above holds J_{k+3/2}
    let mut k = start;
    loop {
        if k <= lmax {
            tmp[(k + 1) as usize] = cur;
        }
        if k == -1 {
            break;
        }
        let nu = k as f64 + 0.5;
        let below = 2.0 * nu / x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            above *= s;
            for v in tmp.iter_mut() {
                *v *= s;
            }
        }
    }
    let scale = if jm.abs() > j0.abs() {
        jm / tmp[0]
    } else {
        j0 / tmp[1]
    };
    for (o, t) in out.iter_mut().zip(tmp) {
        *o = t * scale;
    }
    Ok(out)
}

pub fn sph_bessel_j(order: HalfIntegerOrder, x: f64) -> Result<f64> {
    let seq = bessel_half_seq(order.l(), x)?;
    Ok(seq[(order.l() + 1) as usize])
}

/// Spherical Bessel functions j_p(x) = sqrt(pi/(2x)) J_{p+1/2}(x), p = 0..=pmax.
pub fn spherical_j_seq(pmax: usize, x: f64) -> Result<Vec<f64>> {
    let seq = bessel_half_seq(pmax as i32, x)?;
    let f = (PI / (2.0 * x)).sqrt();
    Ok(seq[1..].iter().map(|v| v * f).collect())
}

pub fn legendre_p(l: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// P_l and P_l' together, derivative by P'_{k+1} = P'_{k-1} + (2k+1) P_k.
pub fn legendre_with_derivative(l: usize, x: f64) -> (f64, f64) {
    let mut p = vec![1.0, x];
    let mut dp = vec![0.0, 1.0];
    for k in 1..l {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0));
        dp.push(dp[k - 1] + (2.0 * kf + 1.0) * p[k]);
    }
    (p[l], dp[l])
}

pub fn jacobi_p01(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, (3.0 * x - 1.0) / 2.0);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let k = k as f64;
        let lhs = 2.0 * (k + 1.0) * (k + 2.0) * (2.0 * k + 1.0);
        let c1 = (2.0 * k + 2.0) * ((2.0 * k + 3.0) * (2.0 * k + 1.0) * x - 1.0);
        let c0 = 2.0 * k * (k + 1.0) * (2.0 * k + 3.0);
        let p2 = (c1 * p1 - c0 * p0) / lhs;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Laguerre function l_n(x) = e^{-x/2} L_n(x).
pub fn laguerre_fn(n: usize, x: f64) -> Result<f64> {
    if x < 0.0 {
        return domain(format!("Laguerre function needs x >= 0, got {x}"));
    }
    let (mut l0, mut l1) = (1.0, 1.0 - x);
    let e = (-x / 2.0).exp();
    if n == 0 {
        return Ok(e);
    }
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    Ok(l1 * e)
}

/// Meixner-Pollaczek polynomial P_n^{(1/2)}(x; beta).
pub fn meixner_pollaczek(n: usize, x: f64, beta: f64) -> Result<f64> {
    Ok(*meixner_pollaczek_seq(n, x, beta)?.last().unwrap())
}

/// P_0..=P_n at x.
pub fn meixner_pollaczek_seq(n: usize, x: f64, beta: f64) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta < PI) {
        return domain(format!("beta must lie in (0, pi), got {beta}"));
    }
    let (sb, cb) = beta.sin_cos();
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n == 0 {
        return Ok(p);
    }
    p.push(2.0 * x * sb + cb);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 * (x * sb + (kf + 0.5) * cb) * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    Ok(p)
}
