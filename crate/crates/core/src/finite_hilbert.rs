//! Finite Hilbert transform on [-1,1], its generalized eigenfunctions Q'(t,u),
//! and the intertwiner A with A*A = (I + H)/2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::quadrature::{
    composite_gauss_legendre, gauss_legendre, half_line, principal_value_cheb, GridFunction,
};
use crate::specfun::{legendre_p, spherical_j_seq};
use crate::{domain, Result};

/// Largest |t| for which Q'(t, .) is resolved by the default PV rules.
pub const T_WINDOW: f64 = 0.99;

fn inside(z: f64, what: &str) -> Result<()> {
    if z > -1.0 && z < 1.0 {
        Ok(())
    } else {
        domain(format!("{what} must lie in (-1,1), got {z}"))
    }
}

/// (1/(i pi)) PV int_{-1}^{1} g(y)/(y - x) dy on an n-point Chebyshev rule.
pub fn finite_hilbert_pv<F: Fn(f64) -> Complex64>(g: F, x: f64, n: usize) -> Result<Complex64> {
    inside(x, "x")?;
    Ok(principal_value_cheb(g, x, n)? / Complex64::new(0.0, PI))
}

/// ln((1-z)/(1+z))
fn log_ratio(z: f64) -> f64 {
    (-z).ln_1p() - z.ln_1p()
}

/// Q'(t,u) = (1/pi) (1-t^2)^{-1/2} (1-u^2)^{-1/2} exp((i/2pi) ln((1-t)/(1+t)) ln((1-u)/(1+u))).
pub fn q_prime(t: f64, u: f64) -> Result<Complex64> {
    inside(t, "t")?;
    inside(u, "u")?;
    let modulus = 1.0 / (PI * ((1.0 - t * t) * (1.0 - u * u)).sqrt());
    Ok(Complex64::from_polar(
        modulus,
        log_ratio(t) * log_ratio(u) / (2.0 * PI),
    ))
}

/// max_x |H Q'(t,.)(x) - t Q'(t,x)| / |Q'(t,x)|.
pub fn hilbert_eigen_residual(t: f64, xs: &[f64], n: usize) -> Result<f64> {
    if t.abs() > T_WINDOW {
        return domain(format!(
            "|t| = {} exceeds the resolved window {T_WINDOW}",
            t.abs()
        ));
    }
    let mut worst = 0.0f64;
    for &x in xs {
        let q = q_prime(t, x)?;
        let h = finite_hilbert_pv(|y| q_prime(t, y).unwrap_or_default(), x, n)?;
        worst = worst.max((h - t * q).norm() / q.norm());
    }
    Ok(worst)
}

/// (Uk)(u) = int Q'(t,u) k(t) dt on the rule carried by k.
pub fn apply_u(k: &GridFunction, us: &[f64]) -> Result<Vec<Complex64>> {
    if let Some(&t) = k.rule.nodes.iter().find(|t| t.abs() >= 1.0) {
        return domain(format!("packet node {t} outside (-1,1)"));
    }
    us.par_iter()
        .map(|&u| {
            inside(u, "u")?;
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&t, &w), &v) in k.rule.nodes.iter().zip(&k.rule.weights).zip(&k.values) {
                acc += w * q_prime(t, u)? * v;
            }
            Ok(acc)
        })
        .collect()
}

/// Packet on (-1,1) that is Gaussian in tau = ln((1-t)/(1+t))/(2 pi):
/// k(t) = (1-t^2)^{-1/2} exp(-(tau - center)^2 / (2 width^2)).
pub fn tau_packet(center: f64, width: f64) -> Result<GridFunction> {
    if !(width > 0.0) {
        return domain("packet width must be positive");
    }
    let rule = composite_gauss_legendre(-0.999, 0.999, 200, 10)?;
    Ok(rule.sample(|t| {
        let tau = log_ratio(t) / (2.0 * PI);
        Complex64::new(
            (-(tau - center).powi(2) / (2.0 * width * width)).exp() / (1.0 - t * t).sqrt(),
            0.0,
        )
    }))
}

/// (Uk)(u) sqrt((1-u^2)/2) at u = -tanh(v/2), where ln((1-u)/(1+u)) = v and
/// (1-u^2)^{-1/2} = cosh(v/2) are used directly so that |v| may be large.
fn apply_u_on_line(k: &GridFunction, v: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&t, &w), &val) in k.rule.nodes.iter().zip(&k.rule.weights).zip(&k.values) {
        let phase = log_ratio(t) * v / (2.0 * PI);
        acc += w * Complex64::from_polar(1.0 / (PI * (1.0 - t * t).sqrt()), phase) * val;
    }
    acc * std::f64::consts::FRAC_1_SQRT_2
}

/// max_{i,j} |<U k_i, U k_j> - <k_i, k_j>|, integrating over u through
/// u = -tanh(v/2), du = (1-u^2)/2 dv, on [-v_max, v_max].
pub fn u_isometry_defect(packets: &[GridFunction], v_max: f64) -> Result<f64> {
    if let Some(&t) = packets
        .iter()
        .flat_map(|k| k.rule.nodes.iter())
        .find(|t| t.abs() >= 1.0)
    {
        return domain(format!("packet node {t} outside (-1,1)"));
    }
    let vr = composite_gauss_legendre(-v_max, v_max, (4.0 * v_max).ceil() as usize, 12)?;
    let images: Vec<Vec<Complex64>> = packets
        .iter()
        .map(|k| {
            vr.nodes
                .par_iter()
                .map(|&v| apply_u_on_line(k, v))
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for i in 0..packets.len() {
        for j in 0..packets.len() {
            let lhs: Complex64 = images[i]
                .iter()
                .zip(&images[j])
                .zip(&vr.weights)
                .map(|((a, b), w)| w * a.conj() * b)
                .sum();
            let ki = &packets[i];
            let rhs: Complex64 = ki
                .values
                .iter()
                .zip(&packets[j].values)
                .zip(&ki.rule.weights)
                .map(|((a, b), w)| w * a.conj() * b)
                .sum();
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Both sides of <A P_p, A P_q> = (1/2)(<P_p, P_q> + <P_p, H P_q>).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntertwinerGram {
    /// (2/pi) i^p (-i)^q int_0^X j_p j_q dx
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// (2/pi)/X from |j_p j_q| <= x^{-2}
    pub tail_bound: f64,
}

/// Inner PV on 513 Chebyshev nodes, outer integrals by 300-point Gauss-Legendre;
/// the Fourier side on [0, X] with half-unit panels.
pub fn a_op_gram(p: usize, q: usize, x_max: f64) -> Result<IntertwinerGram> {
    if !(x_max > 0.0) {
        return domain("X must be positive");
    }
    let fr = half_line(x_max, 0.5, 10)?;
    let top = p.max(q);
    let fourier: f64 = fr
        .nodes
        .par_iter()
        .zip(&fr.weights)
        .map(|(&x, &w)| {
            let j = spherical_j_seq(top, x).expect("x > 0");
            w * j[p] * j[q]
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let phase = Complex64::i().powi(p as i32) * (-Complex64::i()).powi(q as i32);
    let lhs = phase * (2.0 / PI) * fourier;

    let outer = gauss_legendre(300, -1.0, 1.0)?;
    let hq = outer
        .nodes
        .par_iter()
        .map(|&x| finite_hilbert_pv(|y| Complex64::new(legendre_p(q, y), 0.0), x, 513))
        .collect::<Result<Vec<_>>>()?;
    let cross: Complex64 = outer
        .nodes
        .iter()
        .zip(&outer.weights)
        .zip(&hq)
        .map(|((&x, &w), h)| w * legendre_p(p, x) * h)
        .sum();
    let diag = if p == q {
        2.0 / (2 * p + 1) as f64
    } else {
        0.0
    };
    Ok(IntertwinerGram {
        lhs,
        rhs: 0.5 * (diag + cross),
        tail_bound: (2.0 / PI) / x_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// PV by excluding (x - eps, x + eps) and integrating the rest in the
    /// variable y = sin(theta), on panels graded toward the excluded gap.
    fn pv_oracle<F: Fn(f64) -> Complex64>(g: F, x: f64, eps: f64) -> Complex64 {
        let (lo, hi) = ((x - eps).asin(), (x + eps).asin());
        let graded = |from: f64, to: f64| {
            let mut b: Vec<f64> = (0..40).map(|k| to + (from - to) * 0.7f64.powi(k)).collect();
            b.push(to);
            if from > to {
                b.reverse();
            }
            crate::quadrature::composite_from_breaks(&b, 20).unwrap()
        };
        let integrand = |th: f64| {
            let y = th.sin();
            g(y) * th.cos() / (y - x)
        };
        let left = graded(-PI / 2.0, lo).integrate_fn(integrand);
        let right = graded(PI / 2.0, hi).integrate_fn(integrand);
        (left + right) / Complex64::new(0.0, PI)
    }

    #[test]
    fn pv_examples() {
        for &x in &[-0.6, 0.0, 0.35] {
            let v = finite_hilbert_pv(|y| c(1.0 / (1.0 - y * y).sqrt()), x, 256).unwrap();
            assert!(v.norm() < 1e-12);
            let o = pv_oracle(|y| c(1.0 / (1.0 - y * y).sqrt()), x, 1e-5);
            assert!(o.norm() < 1e-4, "{o}");
        }
        assert!(finite_hilbert_pv(|_| c(1.0), 0.0, 256).unwrap().norm() < 1e-12);
        let v = finite_hilbert_pv(|y| c(y), 0.0, 4096).unwrap();
        assert!((v - c(2.0) / Complex64::new(0.0, PI)).norm() < 1e-6);
        assert!(finite_hilbert_pv(|y| c(y), 1.0, 64).is_err());
    }

    #[test]
    fn pv_against_log_closed_form() {
        // PV int 1/(y-x) dy = ln((1-x)/(1+x))
        for &x in &[-0.7, 0.1, 0.6] {
            let v = finite_hilbert_pv(|_| c(1.0), x, 4096).unwrap() * Complex64::new(0.0, PI);
            assert!((v.re - log_ratio(x)).abs() < 5e-3);
        }
    }

    #[test]
    fn q_prime_examples() {
        assert!((q_prime(0.0, 0.0).unwrap() - c(1.0 / PI)).norm() < 1e-16);
        for &u in &[-0.9, -0.2, 0.5] {
            let v = q_prime(0.0, u).unwrap();
            assert!((v - c(1.0 / (PI * (1.0 - u * u).sqrt()))).norm() < 1e-15);
        }
        assert!(q_prime(1.0, 0.0).is_err());
        assert!(q_prime(0.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn q_prime_swap_and_modulus(t in -0.99f64..0.99, u in -0.99f64..0.99) {
            let a = q_prime(t, u).unwrap();
            prop_assert_eq!(a, q_prime(u, t).unwrap());
            let m = 1.0 / (PI * ((1.0 - t * t) * (1.0 - u * u)).sqrt());
            prop_assert!((a.norm() - m).abs() <= 1e-13 * m);
        }
    }

    #[test]
    fn eigen_residuals() {
        assert!(hilbert_eigen_residual(0.0, &[0.3], 2048).unwrap() <= 5e-3);
        for &t in &[-0.5, 0.0, 0.5] {
            let r = hilbert_eigen_residual(t, &[-0.7, 0.1, 0.6], 2048).unwrap();
            assert!(r <= 5e-3, "t={t} {r}");
        }
        assert!(hilbert_eigen_residual(0.999, &[0.1], 2048).is_err());
        assert!(hilbert_eigen_residual(-0.999, &[0.1], 2048).is_err());
    }

    #[test]
    fn eigen_residual_matches_oracle_pv() {
        let t = 0.5;
        let x = 0.1;
        let o = pv_oracle(|y| q_prime(t, y).unwrap(), x, 1e-6);
        let q = q_prime(t, x).unwrap();
        assert!((o - t * q).norm() / q.norm() < 5e-3);
    }

    #[test]
    fn u_is_isometric_on_packets() {
        let packets: Vec<GridFunction> = [-0.2, 0.0, 0.2]
            .iter()
            .map(|&c| tau_packet(c, 0.1).unwrap())
            .collect();
        let d = u_isometry_defect(&packets, 60.0).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn intertwiner_examples() {
        let g = a_op_gram(0, 0, 2000.0).unwrap();
        assert!((g.rhs - c(1.0)).norm() < 1e-6);
        let g = a_op_gram(0, 1, 2000.0).unwrap();
        assert!((g.rhs - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-4);
        // nested-quadrature oracle: (1/(2 i pi)) int (2 + x ln((1-x)/(1+x))) dx
        let r = gauss_legendre(200, -1.0, 1.0).unwrap();
        let oracle = r.integrate_real(|x| 2.0 + x * log_ratio(x)) / (2.0 * PI);
        assert!((g.rhs.im + oracle).abs() < 1e-4);
    }

    #[test]
    fn intertwiner_relation() {
        for p in 0..=6 {
            for q in 0..=6 {
                let g = a_op_gram(p, q, 2000.0).unwrap();
                assert!(
                    (g.lhs - g.rhs).norm() <= 1e-4 + g.tail_bound,
                    "({p},{q}) {} {}",
                    g.lhs,
                    g.rhs
                );
            }
        }
    }
}
