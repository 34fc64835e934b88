//! SL(2,R) acting on symbols by fractional linear maps, the unitaries F_A,
//! and weak-form checks of the resulting operator isomorphisms.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::finite_hilbert::finite_hilbert_pv;
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, GridFunction, QuadratureRule};
use crate::specfun::{laguerre_fn, legendre_with_derivative};
use crate::wiener_hopf::{
    discretize_w, gram_k_laguerre, hermitian_eigenvalues, tanh_kernel, SymbolSpec,
};
use crate::{domain, Result};

/// A real 2x2 matrix [[a, b], [c, d]] with determinant 1, normalized so that
/// a > 0, or a = 0 and b > 0 (A and -A act identically on the line).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Element {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sl2Element {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-12 {
            return domain(format!("determinant must be 1, got {det}"));
        }
        Ok(Self { a, b, c, d }.normalized())
    }

    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    /// (1/sqrt 2) [[1, -1], [1, 1]], mapping [-1, 1] onto [infinity, 0].
    pub fn b_map() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: r,
            b: -r,
            c: r,
            d: r,
        }
    }

    /// (1/sqrt 2) [[1-g, 1+g], [-1, 1]], mapping [-1, 1] onto [g, infinity].
    pub fn ray_map(gamma: f64) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: r * (1.0 - gamma),
            b: r * (1.0 + gamma),
            c: -r,
            d: r,
        }
        .normalized()
    }

    fn normalized(self) -> Self {
        if self.a < 0.0 || (self.a == 0.0 && self.b < 0.0) {
            Self {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            self
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
        .normalized()
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
        .normalized()
    }

    pub fn act(&self, x: f64) -> Result<f64> {
        sl2_action(self, x)
    }

    pub fn act_proj(&self, p: ProjPoint) -> ProjPoint {
        match p {
            ProjPoint::Infinity => {
                if self.c == 0.0 {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(self.a / self.c)
                }
            }
            ProjPoint::Finite(x) => {
                let num = self.a * x + self.b;
                let den = self.c * x + self.d;
                let scale = (self.c * x).abs() + self.d.abs();
                if den.abs() <= 1e-15 * scale {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(num / den)
                }
            }
        }
    }
}

/// Point of the real projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjPoint {
    Finite(f64),
    Infinity,
}

impl ProjPoint {
    /// Angle 2 atan(x) in (-pi, pi], with infinity at pi.
    pub fn angle(self) -> f64 {
        match self {
            ProjPoint::Finite(x) => 2.0 * x.atan(),
            ProjPoint::Infinity => std::f64::consts::PI,
        }
    }

    pub fn approx_eq(self, o: Self, tol: f64) -> bool {
        match (self, o) {
            (ProjPoint::Infinity, ProjPoint::Infinity) => true,
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => (a - b).abs() <= tol * (1.0 + a.abs()),
            (ProjPoint::Finite(a), ProjPoint::Infinity)
            | (ProjPoint::Infinity, ProjPoint::Finite(a)) => a.abs() > 1.0 / tol,
        }
    }
}

pub fn sl2_action(m: &Sl2Element, x: f64) -> Result<f64> {
    let den = m.c * x + m.d;
    if den == 0.0 {
        return domain(format!("x = {x} is the pole of the fractional linear map"));
    }
    Ok((m.a * x + m.b) / den)
}

/// (A . kappa)(x) = kappa(A^{-1} x). Arc symbols are mapped in closed form by
/// moving their endpoints; orientation is preserved since det A = 1 > 0.
pub fn transform_symbol(m: &Sl2Element, sym: &SymbolSpec) -> SymbolSpec {
    match sym {
        SymbolSpec::Arc(a) => SymbolSpec::Arc(a.image(m)),
        SymbolSpec::Tanh { .. } => SymbolSpec::Moebius {
            inner: Box::new(sym.clone()),
            map: *m,
        },
        SymbolSpec::Moebius { inner, map } => SymbolSpec::Moebius {
            inner: inner.clone(),
            map: m.compose(map),
        },
    }
}

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<Complex64>,
    /// second derivatives at the knots
    m: Vec<Complex64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[Complex64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(crate::Error::LengthMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if n < 3 {
            return domain("a cubic spline needs at least 3 knots");
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return domain("spline knots must increase");
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut m = vec![zero; n];
        // Thomas algorithm on the interior equations
        let mut diag = vec![0.0; n];
        let mut rhs = vec![zero; n];
        let mut upper = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let lower = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            if i > 1 {
                let f = lower / diag[i - 1];
                diag[i] -= f * upper[i - 1];
                let prev = rhs[i - 1];
                rhs[i] -= f * prev;
            }
        }
        for i in (1..n - 1).rev() {
            let next = if i + 1 < n - 1 { m[i + 1] } else { zero };
            m[i] = (rhs[i] - upper[i] * next) / diag[i];
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    /// None outside [x_0, x_last].
    pub fn eval(&self, t: f64) -> Option<Complex64> {
        let (x, y, m) = (&self.x, &self.y, &self.m);
        if !(t >= x[0] && t <= x[x.len() - 1]) {
            return None;
        }
        let i = match x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= x.len() => x.len() - 2,
            k => k - 1,
        };
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        Some(
            a * y[i]
                + b * y[i + 1]
                + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * (h * h / 6.0),
        )
    }
}

/// F_A f on f's own grid, with the mass of f mapped outside the grid.
#[derive(Debug, Clone)]
pub struct FaImage {
    pub image: GridFunction,
    /// int |f(y)|^2 over source points y with A . y outside the grid range
    pub mass_loss: f64,
}

/// (F_A f)(x) = f(A^{-1} x)/(-cx + a), f interpolated by a natural cubic
/// spline and taken as zero outside its grid.
pub fn f_a_apply(m: &Sl2Element, f: &GridFunction) -> Result<FaImage> {
    let spline = CubicSpline::new(&f.rule.nodes, &f.values)?;
    let inv = m.inverse();
    let (lo, hi) = (f.rule.nodes[0], f.rule.nodes[f.rule.len() - 1]);
    let mut values = Vec::with_capacity(f.rule.len());
    for &x in &f.rule.nodes {
        let den = -m.c * x + m.a;
        if den == 0.0 {
            return domain(format!("grid point {x} is the pole of A^-1"));
        }
        let src = inv.act(x)?;
        values.push(spline.eval(src).unwrap_or_default() / den);
    }
    let mut mass_loss = 0.0;
    for ((&y, &w), v) in f.rule.nodes.iter().zip(&f.rule.weights).zip(&f.values) {
        let lost = match m.act_proj(ProjPoint::Finite(y)) {
            ProjPoint::Finite(t) => t < lo || t > hi,
            ProjPoint::Infinity => true,
        };
        if lost {
            mass_loss += w * v.norm_sqr();
        }
    }
    Ok(FaImage {
        image: GridFunction::new(f.rule.clone(), values)?,
        mass_loss,
    })
}

/// F'_A = F^{-1} F_A F on the Laguerre basis, in closed form:
/// F'_A l_n(t) = kappa omega^n sqrt(lambda) l_n(lambda t) e^{i shift t},
/// where A(i/2) = -shift + i lambda/2, kappa = 1/((d - ic/2) sqrt(lambda))
/// and omega = (d + ic/2)/(d - ic/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPrimeLaguerre {
    pub kappa: Complex64,
    pub omega: Complex64,
    pub lambda: f64,
    pub shift: f64,
}

impl FPrimeLaguerre {
    pub fn new(m: &Sl2Element) -> Self {
        let dm = Complex64::new(m.d, -m.c / 2.0);
        let dp = Complex64::new(m.d, m.c / 2.0);
        let lambda = 1.0 / dp.norm_sqr();
        let x0 = Complex64::new(m.b, m.a / 2.0) / dp;
        Self {
            kappa: 1.0 / (dm * lambda.sqrt()),
            omega: dp / dm,
            lambda,
            shift: -x0.re,
        }
    }

    pub fn eval(&self, n: usize, t: f64) -> Result<Complex64> {
        let l = laguerre_fn(n, self.lambda * t)?;
        Ok(self.kappa
            * self.omega.powi(n as i32)
            * self.lambda.sqrt()
            * l
            * Complex64::from_polar(1.0, self.shift * t))
    }
}

/// (Gamma g)(t) = sqrt(2)/(1-t) g((1+t)/(1-t)), L^2(0,inf) -> L^2(-1,1).
pub fn gamma_map<F: Fn(f64) -> Result<Complex64>>(g: F, t: f64) -> Result<Complex64> {
    if !(t > -1.0 && t < 1.0) {
        return domain(format!("Gamma needs t in (-1,1), got {t}"));
    }
    Ok(2f64.sqrt() / (1.0 - t) * g((1.0 + t) / (1.0 - t))?)
}

/// Both sides of <F' l_m, H_[0,inf) F' l_n> = <l_m, (2K - I) l_n> for F' = F'_B,
/// with H_[0,inf) = Gamma^{-1} H_[-1,1] Gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl CovarianceCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Inner PV on 4001 Chebyshev nodes, outer 400-point Gauss-Legendre.
pub fn covariance_weak_check(m: usize, n: usize) -> Result<CovarianceCheck> {
    let fp = FPrimeLaguerre::new(&Sl2Element::b_map());
    let mapped = |k: usize, t: f64| gamma_map(|x| fp.eval(k, x), t);
    let outer = gauss_legendre(400, -1.0, 1.0)?;
    let h = outer
        .nodes
        .par_iter()
        .map(|&x| finite_hilbert_pv(|y| mapped(n, y).unwrap_or_default(), x, 4001))
        .collect::<Result<Vec<_>>>()?;
    let mut lhs = Complex64::new(0.0, 0.0);
    for ((&x, &w), hv) in outer.nodes.iter().zip(&outer.weights).zip(&h) {
        lhs += w * mapped(m, x)?.conj() * hv;
    }
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok(CovarianceCheck {
        lhs,
        rhs: 2.0 * gram_k_laguerre(m, n, 200)? - delta,
    })
}

/// e_n(t) = sqrt(2n+1) P_n(2t - 1) and its t-derivative.
fn unit_legendre(n: usize, t: f64) -> (f64, f64) {
    let (p, dp) = legendre_with_derivative(n, 2.0 * t - 1.0);
    let s = ((2 * n + 1) as f64).sqrt();
    (s * p, 2.0 * s * dp)
}

/// (Gamma^{-1} e_n)(x) = sqrt(pi) e^{-pi x/2} e_n(e^{-pi x}) and its x-derivative.
fn tanh_side(n: usize, x: f64) -> (f64, f64) {
    let t = (-PI * x).exp();
    let (e, de) = unit_legendre(n, t);
    let pre = PI.sqrt() * (-PI * x / 2.0).exp();
    (pre * e, pre * (-PI / 2.0 * e - PI * t * de))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhConjugation {
    /// <e_m, H_[0,1] e_n> by PV quadrature
    pub lhs: Complex64,
    /// <Gamma^{-1} e_m, W(-tanh) Gamma^{-1} e_n> on [0, 25]
    pub rhs: Complex64,
}

impl TanhConjugation {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// <e_m, H_[0,1] e_n> before hermitian symmetrization: H_[0,1] is H_[-1,1]
/// after y = (1+u)/2, inner PV on 1025 Chebyshev nodes, outer 200-point rule.
fn unit_interval_hilbert(m: usize, n: usize) -> Result<Complex64> {
    let outer = gauss_legendre(200, -1.0, 1.0)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&u, &w) in outer.nodes.iter().zip(&outer.weights) {
        let h = finite_hilbert_pv(
            |v| Complex64::new(unit_legendre(n, (1.0 + v) / 2.0).0, 0.0),
            u,
            1025,
        )?;
        acc += 0.5 * w * unit_legendre(m, (1.0 + u) / 2.0).0 * h;
    }
    Ok(acc)
}

/// Off-diagonal product quadrature of the sinh kernel on composite
/// Gauss-Legendre nodes (16 per half-unit panel), plus the diagonal-cell limit
/// (1/(i pi)) w_j^2 (phi_m' phi_n - phi_m phi_n')/2.
fn tanh_bilinear(m: usize, n: usize, rule: &QuadratureRule) -> Complex64 {
    let a: Vec<(f64, f64)> = rule.nodes.iter().map(|&x| tanh_side(m, x)).collect();
    let b: Vec<(f64, f64)> = rule.nodes.iter().map(|&x| tanh_side(n, x)).collect();
    let (x, w) = (&rule.nodes, &rule.weights);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..x.len() {
        let mut row = Complex64::new(0.0, 0.0);
        for k in 0..x.len() {
            if k != j {
                row += w[k] * tanh_kernel(x[j] - x[k]) * b[k].0;
            }
        }
        acc += w[j] * a[j].0 * row;
        let diag = w[j] * w[j] * 0.5 * (a[j].1 * b[j].0 - a[j].0 * b[j].1);
        acc += Complex64::new(0.0, -diag / PI);
    }
    acc
}

/// Check of H_[0,1] = Gamma W(-tanh) Gamma^{-1} on the unit-interval Legendre
/// basis, both sides made hermitian in (m, n).
pub fn tanh_conjugation_check(m: usize, n: usize) -> Result<TanhConjugation> {
    if m > 8 || n > 8 {
        return domain("tanh conjugation check is set up for m, n <= 8");
    }
    let lhs = 0.5 * (unit_interval_hilbert(m, n)? + unit_interval_hilbert(n, m)?.conj());
    let rule = composite_gauss_legendre(0.0, 25.0, 50, 16)?;
    let rhs = 0.5 * (tanh_bilinear(m, n, &rule) + tanh_bilinear(n, m, &rule).conj());
    Ok(TanhConjugation { lhs, rhs })
}

/// Spectra of the H_[-1,1] Nystrom matrix and of 2K - I on [0, X], with the
/// Kolmogorov distance between their empirical distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBand {
    pub hilbert: Vec<f64>,
    pub two_k_minus_i: Vec<f64>,
    pub ks_distance: f64,
}

impl SpectralBand {
    pub fn contained(&self, eps: f64) -> bool {
        self.hilbert
            .iter()
            .chain(&self.two_k_minus_i)
            .all(|v| v.abs() <= 1.0 + eps)
    }
}

fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |v: &[f64], t: f64| v.partition_point(|&x| x <= t) as f64 / v.len() as f64;
    a.iter()
        .chain(b)
        .map(|&t| (cdf(a, t) - cdf(b, t)).abs())
        .fold(0.0, f64::max)
}

/// H_[-1,1]: entries sqrt(w_j w_k)/(i pi (x_k - x_j)) with zero diagonal on
/// `nodes` Gauss-Legendre points; K: symmetrized sinc Nystrom on [0, X].
pub fn spectral_band(nodes: usize, x_max: f64) -> Result<SpectralBand> {
    let r = gauss_legendre(nodes, -1.0, 1.0)?;
    let h = DMatrix::from_fn(nodes, nodes, |j, k| {
        if j == k {
            Complex64::new(0.0, 0.0)
        } else {
            let s = (r.weights[j] * r.weights[k]).sqrt();
            s / Complex64::new(0.0, PI * (r.nodes[k] - r.nodes[j]))
        }
    });
    let hilbert = hermitian_eigenvalues(h)?;
    let k = discretize_w(
        &SymbolSpec::indicator(),
        &gauss_legendre(nodes, 0.0, x_max)?,
    )?;
    let two_k_minus_i: Vec<f64> = k.eigenvalues()?.iter().map(|v| 2.0 * v - 1.0).collect();
    let ks_distance = ks_distance(&hilbert, &two_k_minus_i);
    Ok(SpectralBand {
        hilbert,
        two_k_minus_i,
        ks_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiener_hopf::ArcSymbol;
    use proptest::prelude::*;

    fn random_sl2(a: f64, b: f64, c: f64) -> Option<Sl2Element> {
        if a.abs() < 0.2 {
            return None;
        }
        Sl2Element::new(a, b, c, (1.0 + b * c) / a).ok()
    }

    #[test]
    fn action_examples() {
        assert_eq!(sl2_action(&Sl2Element::identity(), 3.7).unwrap(), 3.7);
        assert!((sl2_action(&Sl2Element::b_map(), 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(sl2_action(&Sl2Element::b_map(), -1.0).is_err());
        assert!(Sl2Element::new(1.0, 1.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn group_law(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
                     a2 in -3.0f64..3.0, b2 in -3.0f64..3.0, c2 in -3.0f64..3.0, x in -5.0f64..5.0) {
            if let (Some(m), Some(n)) = (random_sl2(a, b, c), random_sl2(a2, b2, c2)) {
                if let (Ok(inner), Ok(direct)) = (n.act(x), m.compose(&n).act(x)) {
                    if let Ok(outer) = m.act(inner) {
                        prop_assert!((outer - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
                    }
                }
                let det = { let p = m.compose(&n); p.a * p.d - p.b * p.c };
                prop_assert!((det - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn symbol_transform_composes(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
                                     a2 in -3.0f64..3.0, b2 in -3.0f64..3.0, c2 in -3.0f64..3.0,
                                     x in -20.0f64..20.0) {
            if let (Some(m), Some(n)) = (random_sl2(a, b, c), random_sl2(a2, b2, c2)) {
                for sym in [SymbolSpec::indicator(), SymbolSpec::sigma(), SymbolSpec::step(0.7, -2.0, 3.0),
                            SymbolSpec::Tanh { sign: -1.0 }] {
                    let two = transform_symbol(&m, &transform_symbol(&n, &sym));
                    let one = transform_symbol(&m.compose(&n), &sym);
                    // skip points within 1e-6 of a jump
                    let near_jump = [x - 1e-6, x + 1e-6].iter().any(|&y| one.eval(y) != one.eval(x));
                    if !near_jump && one.eval(x).is_finite() {
                        prop_assert!((two.eval(x) - one.eval(x)).abs() <= 1e-12);
                    }
                    if let (SymbolSpec::Arc(p), SymbolSpec::Arc(q)) = (&two, &one) {
                        prop_assert!(p.approx_eq(q, 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn symbol_examples() {
        let b = Sl2Element::b_map();
        let img = transform_symbol(&b, &SymbolSpec::sigma());
        assert!(img.approx_eq(&SymbolSpec::neg_sgn(), 1e-12));
        for &x in &[-3.0, -0.2, 0.4, 7.0] {
            assert_eq!(img.eval(x), -x.signum());
        }
        let id = transform_symbol(&Sl2Element::identity(), &SymbolSpec::indicator());
        assert!(id.approx_eq(&SymbolSpec::indicator(), 0.0));
        for &g in &[-2.0, 0.0, 0.5, 3.0] {
            let img = transform_symbol(&Sl2Element::ray_map(g), &SymbolSpec::indicator());
            assert!(
                img.approx_eq(&SymbolSpec::step(g, 0.0, 1.0), 1e-12),
                "gamma={g}"
            );
            // pointwise definition: kappa(A^{-1} x)
            let inv = Sl2Element::ray_map(g).inverse();
            for &x in &[g - 1.5, g + 0.3, g + 10.0] {
                let direct = SymbolSpec::indicator().eval(inv.act(x).unwrap());
                assert_eq!(img.eval(x), direct);
            }
        }
        let arc = ArcSymbol {
            start: ProjPoint::Finite(-1.0),
            end: ProjPoint::Finite(1.0),
            inside: 1.0,
            outside: 0.0,
        };
        assert_eq!(arc.eval(ProjPoint::Infinity), 0.0);
    }

    #[test]
    fn spline_reproduces_cubics() {
        let x: Vec<f64> = (0..30)
            .map(|i| -2.0 + 0.13 * i as f64 + 0.01 * (i % 3) as f64)
            .collect();
        let f = |t: f64| Complex64::new(t.sin(), (2.0 * t).cos());
        let y: Vec<Complex64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for i in 0..200 {
            let t = -1.5 + 2.5 * i as f64 / 200.0;
            assert!((s.eval(t).unwrap() - f(t)).norm() < 2e-4);
        }
        assert!(s.eval(10.0).is_none());
        assert!(CubicSpline::new(&[0.0, 1.0], &y[..2]).is_err());
    }

    fn bump(lo: f64, hi: f64) -> impl Fn(f64) -> Complex64 {
        move |x| {
            let t = (2.0 * x - lo - hi) / (hi - lo);
            if t.abs() < 1.0 {
                Complex64::new((-1.0 / (1.0 - t * t)).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }

    #[test]
    fn f_a_unitarity_and_inverse() {
        let rule = composite_gauss_legendre(-4.0, 4.0, 400, 8).unwrap();
        let f = rule.sample(bump(0.2, 2.0));
        let same = f_a_apply(&Sl2Element::identity(), &f).unwrap();
        assert!(same
            .image
            .values
            .iter()
            .zip(&f.values)
            .all(|(a, b)| (a - b).norm() < 1e-14));
        let b = Sl2Element::b_map();
        let img = f_a_apply(&b, &f).unwrap();
        assert!(img.mass_loss < 1e-14);
        assert!((img.image.norm_sq() / f.norm_sq() - 1.0).abs() < 1e-2);
        let back = f_a_apply(&b.inverse(), &img.image).unwrap();
        let err: f64 = back
            .image
            .values
            .iter()
            .zip(&f.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
        // a bump mapped past the grid edge loses its mass
        let g = rule.sample(bump(-1.5, -0.5));
        let lost = f_a_apply(&b, &g).unwrap();
        assert!(lost.mass_loss > 0.1 * g.norm_sq());
    }

    #[test]
    fn f_prime_closed_form() {
        let b = Sl2Element::b_map();
        let fp = FPrimeLaguerre::new(&b);
        assert!((fp.lambda - 1.6).abs() < 1e-14);
        assert!((fp.shift - 0.6).abs() < 1e-14);
        let kappa = 2f64.sqrt() / (1.6f64.sqrt() * Complex64::new(1.0, -0.5));
        assert!((fp.kappa - kappa).norm() < 1e-14);
        // Fourier side: F_A lf_n(x) = lf_n(A^{-1} x)/(-cx + a) against the
        // numerically transformed closed form
        let inv = b.inverse();
        let rule = composite_gauss_legendre(0.0, 80.0, 160, 16).unwrap();
        for n in 0..4 {
            for &x in &[-2.0, 0.3, 1.7] {
                let direct =
                    crate::wiener_hopf::laguerre_fourier(n, inv.act(x).unwrap()) / (-b.c * x + b.a);
                let numeric = rule
                    .integrate_fn(|t| Complex64::from_polar(1.0, x * t) * fp.eval(n, t).unwrap())
                    / (2.0 * PI).sqrt();
                assert!((direct - numeric).norm() < 1e-10, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn covariance_weak_form() {
        for m in 0..3 {
            for n in 0..3 {
                let c = covariance_weak_check(m, n).unwrap();
                assert!(c.residual() <= 1e-2, "({m},{n}) {} {}", c.lhs, c.rhs);
            }
        }
    }

    /// <e_m, H_[0,1] e_n> = (i/pi) sqrt((2m+1)(2n+1)) (1 - (-1)^{m+n}) / ((m-n)(m+n+1)).
    fn hilbert_closed_form(m: usize, n: usize) -> Complex64 {
        if m == n {
            return Complex64::new(0.0, 0.0);
        }
        let (mf, nf) = (m as f64, n as f64);
        let parity = if (m + n) % 2 == 0 { 0.0 } else { 2.0 };
        Complex64::new(
            0.0,
            ((2.0 * mf + 1.0) * (2.0 * nf + 1.0)).sqrt() * parity
                / ((mf - nf) * (mf + nf + 1.0))
                / PI,
        )
    }

    #[test]
    fn tanh_conjugation() {
        for m in 0..=2 {
            for n in 0..=2 {
                let c = tanh_conjugation_check(m, n).unwrap();
                assert!(c.residual() <= 1e-3, "({m},{n}) {} {}", c.lhs, c.rhs);
                assert!((c.lhs - hilbert_closed_form(m, n)).norm() < 1e-3);
                let t = tanh_conjugation_check(n, m).unwrap();
                assert!((c.lhs - t.lhs.conj()).norm() <= 1e-12);
                assert!((c.rhs - t.rhs.conj()).norm() <= 1e-12);
            }
        }
        assert!(tanh_conjugation_check(9, 0).is_err());
    }

    #[test]
    fn spectral_band_containment() {
        let band = spectral_band(200, 40.0).unwrap();
        assert!(band.contained(0.02));
        assert!(band.hilbert.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn ks_distance_basics() {
        let a = [0.0, 1.0, 2.0];
        assert_eq!(ks_distance(&a, &a), 0.0);
        assert!((ks_distance(&[0.0, 1.0], &[5.0, 6.0]) - 1.0).abs() < 1e-15);
    }
}
