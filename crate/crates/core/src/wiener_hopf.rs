//! The sinc-kernel Wiener-Hopf operator K = W(1_[-1,1]) on the half-line,
//! Nyström discretizations of Wiener-Hopf operators with named symbols and
//! the Laguerre matrix elements of K computed on the Fourier side.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::covariance::{ProjPoint, Sl2Element};
use crate::quadrature::{
    gauss_legendre, half_line, Domain, GridFunction, QuadratureRule, TailModel,
};
use crate::specfun::sinc_kernel;
use crate::spectral_transform::{q_plus, SpectralParameter};
use crate::{domain, Bounded, Error, Result};

/// Piecewise constant symbol on the projective line: `inside` on the arc
/// traversed in the increasing direction from `start` to `end` (passing
/// through infinity if needed), `outside` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSymbol {
    pub start: ProjPoint,
    pub end: ProjPoint,
    pub inside: f64,
    pub outside: f64,
}

impl ArcSymbol {
    pub fn eval(&self, x: ProjPoint) -> f64 {
        let tau = 2.0 * PI;
        let s = self.start.angle();
        let len = (self.end.angle() - s).rem_euclid(tau);
        let off = (x.angle() - s).rem_euclid(tau);
        if off <= len {
            self.inside
        } else {
            self.outside
        }
    }

    /// Representation with inside >= outside (complement arcs swapped).
    pub fn canonical(&self) -> Self {
        if self.inside < self.outside {
            Self {
                start: self.end,
                end: self.start,
                inside: self.outside,
                outside: self.inside,
            }
        } else {
            *self
        }
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        let (a, b) = (self.canonical(), o.canonical());
        (a.inside - b.inside).abs() <= tol
            && (a.outside - b.outside).abs() <= tol
            && a.start.approx_eq(b.start, tol)
            && a.end.approx_eq(b.end, tol)
    }

    pub fn image(&self, m: &Sl2Element) -> Self {
        Self {
            start: m.act_proj(self.start),
            end: m.act_proj(self.end),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    Arc(ArcSymbol),
    /// sign * tanh(x)
    Tanh {
        sign: f64,
    },
    /// x -> inner(map^{-1} x)
    Moebius {
        inner: Box<SymbolSpec>,
        map: Sl2Element,
    },
}

impl SymbolSpec {
    pub fn indicator() -> Self {
        Self::Arc(ArcSymbol {
            start: ProjPoint::Finite(-1.0),
            end: ProjPoint::Finite(1.0),
            inside: 1.0,
            outside: 0.0,
        })
    }

    /// sigma = 2 * 1_[-1,1] - 1, the symbol of 2K - I.
    pub fn sigma() -> Self {
        Self::Arc(ArcSymbol {
            start: ProjPoint::Finite(-1.0),
            end: ProjPoint::Finite(1.0),
            inside: 1.0,
            outside: -1.0,
        })
    }

    pub fn sgn() -> Self {
        Self::Arc(ArcSymbol {
            start: ProjPoint::Finite(0.0),
            end: ProjPoint::Infinity,
            inside: 1.0,
            outside: -1.0,
        })
    }

    pub fn neg_sgn() -> Self {
        Self::Arc(ArcSymbol {
            start: ProjPoint::Finite(0.0),
            end: ProjPoint::Infinity,
            inside: -1.0,
            outside: 1.0,
        })
    }

    /// a on (-inf, gamma), b on [gamma, inf).
    pub fn step(gamma: f64, a: f64, b: f64) -> Self {
        Self::Arc(ArcSymbol {
            start: ProjPoint::Finite(gamma),
            end: ProjPoint::Infinity,
            inside: b,
            outside: a,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_proj(ProjPoint::Finite(x))
    }

    fn eval_proj(&self, x: ProjPoint) -> f64 {
        match self {
            SymbolSpec::Arc(a) => a.eval(x),
            SymbolSpec::Tanh { sign } => match x {
                ProjPoint::Finite(v) => sign * v.tanh(),
                ProjPoint::Infinity => f64::NAN,
            },
            SymbolSpec::Moebius { inner, map } => inner.eval_proj(map.inverse().act_proj(x)),
        }
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        match (self, o) {
            (SymbolSpec::Arc(a), SymbolSpec::Arc(b)) => a.approx_eq(b, tol),
            _ => self == o,
        }
    }
}

/// Nyström matrix M_jk = k(x_j - x_k) w_k on a pair of rules.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub row_rule: QuadratureRule,
    pub col_rule: QuadratureRule,
    pub entries: DMatrix<Complex64>,
    pub hermitian: bool,
}

impl DenseOperator {
    /// sqrt(w_j) M_jk / sqrt(w_k): the same spectrum, symmetric when the
    /// kernel is hermitian.
    pub fn symmetrized(&self) -> DMatrix<Complex64> {
        let n = self.entries.nrows();
        let m = self.entries.ncols();
        DMatrix::from_fn(n, m, |j, k| {
            self.entries[(j, k)] * (self.row_rule.weights[j] / self.col_rule.weights[k]).sqrt()
        })
    }

    pub fn hermitian_defect(&self) -> f64 {
        let s = self.symmetrized();
        (&s - s.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the symmetrized matrix, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return Err(Error::Unsupported(
                "eigenvalues need a hermitian operator".into(),
            ));
        }
        hermitian_eigenvalues(self.symmetrized())
    }
}

pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Unsupported(
            "eigenvalues need a square matrix".into(),
        ));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ev)
}

/// (Kg)(x) restricted to the rule's range [0, X], with the bound on the
/// discarded tail implied by `tail`.
pub fn apply_k(g: &GridFunction, x: f64, tail: TailModel) -> Result<Bounded<Complex64>> {
    let x_max = match g.rule.domain {
        Domain::HalfLine { x_max } => x_max,
        _ => return domain("apply_k needs a function sampled on a truncated half-line rule"),
    };
    if x < 0.0 {
        return domain(format!("apply_k needs x >= 0, got {x}"));
    }
    let value = g
        .rule
        .nodes
        .iter()
        .zip(&g.rule.weights)
        .zip(&g.values)
        .map(|((&y, &w), v)| w * sinc_kernel(x - y) * v)
        .sum();
    Ok(Bounded {
        value,
        tail_bound: tail.sinc_tail_bound(x_max, x),
    })
}

/// Fourier image (2 pi)^{-1/2} i/(x + i/2) ((x - i/2)/(x + i/2))^n of the n-th
/// Laguerre function extended by zero to the line.
pub fn laguerre_fourier(n: usize, x: f64) -> Complex64 {
    let i = Complex64::i();
    let p = Complex64::new(x, 0.5);
    let m = Complex64::new(x, -0.5);
    (2.0 * PI).powf(-0.5) * i / p * (m / p).powi(n as i32)
}

/// <l_m, K l_n> = int_{-1}^{1} conj(lf_m) lf_n du.
pub fn gram_k_laguerre(m: usize, n: usize, quad_order: usize) -> Result<Complex64> {
    if quad_order < 50 {
        return domain(format!(
            "gram_k_laguerre needs quad_order >= 50, got {quad_order}"
        ));
    }
    let r = gauss_legendre(quad_order, -1.0, 1.0)?;
    Ok(r.integrate_fn(|u| laguerre_fourier(m, u).conj() * laguerre_fourier(n, u)))
}

pub fn gram_k_laguerre_matrix(size: usize, quad_order: usize) -> Result<DMatrix<Complex64>> {
    let mut g = DMatrix::zeros(size, size);
    for m in 0..size {
        for n in 0..size {
            g[(m, n)] = gram_k_laguerre(m, n, quad_order)?;
        }
    }
    Ok(g)
}

/// Pointwise convolution kernel of W(symbol), when it has one.
fn pointwise_kernel(symbol: &SymbolSpec) -> Result<Box<dyn Fn(f64) -> Complex64 + Sync>> {
    match symbol {
        SymbolSpec::Arc(a)
            if a.approx_eq(
                &ArcSymbol {
                    start: ProjPoint::Finite(-1.0),
                    end: ProjPoint::Finite(1.0),
                    inside: 1.0,
                    outside: 0.0,
                },
                0.0,
            ) =>
        {
            Ok(Box::new(|d| Complex64::new(sinc_kernel(d), 0.0)))
        }
        SymbolSpec::Arc(a)
            if a.approx_eq(
                &ArcSymbol {
                    start: ProjPoint::Finite(0.0),
                    end: ProjPoint::Infinity,
                    inside: 1.0,
                    outside: -1.0,
                },
                0.0,
            ) =>
        {
            Err(Error::Unsupported(
                "sgn symbols have only a principal-value kernel; use finite_hilbert".into(),
            ))
        }
        SymbolSpec::Tanh { .. } => Err(Error::Unsupported(
            "the tanh kernel is singular on the diagonal; use discretize_w_pv".into(),
        )),
        _ => Err(Error::Unsupported("symbol has no pointwise kernel".into())),
    }
}

fn assemble(
    rule: &QuadratureRule,
    kern: &(dyn Fn(f64, f64) -> Complex64 + Sync),
    hermitian: bool,
) -> Result<DenseOperator> {
    if rule.is_empty() {
        return domain("cannot discretize on an empty rule");
    }
    let (x, w) = (&rule.nodes, &rule.weights);
    let n = rule.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| (0..n).map(|k| kern(x[j], x[k]) * w[k]).collect())
        .collect();
    let entries = DMatrix::from_fn(n, n, |j, k| rows[j][k]);
    Ok(DenseOperator {
        row_rule: rule.clone(),
        col_rule: rule.clone(),
        entries,
        hermitian,
    })
}

pub fn discretize_w(symbol: &SymbolSpec, rule: &QuadratureRule) -> Result<DenseOperator> {
    let kern = pointwise_kernel(symbol)?;
    assemble(rule, &|x, y| kern(x - y), true)
}

/// Nyström matrix for odd kernels singular on the diagonal: the principal
/// value of the diagonal cell vanishes, so the diagonal is set to zero.
pub fn discretize_w_pv(symbol: &SymbolSpec, rule: &QuadratureRule) -> Result<DenseOperator> {
    let sign = match symbol {
        SymbolSpec::Tanh { sign } => *sign,
        _ => {
            return Err(Error::Unsupported(
                "principal-value scheme is implemented for tanh symbols".into(),
            ))
        }
    };
    assemble(
        rule,
        &|x, y| {
            if x == y {
                Complex64::new(0.0, 0.0)
            } else {
                -sign * tanh_kernel(x - y)
            }
        },
        true,
    )
}

/// Kernel 1/(2i sinh(pi x/2)) of W(-tanh).
pub fn tanh_kernel(x: f64) -> Complex64 {
    1.0 / (Complex64::new(0.0, 2.0) * (PI * x / 2.0).sinh())
}

/// Residual of K q_s = s q_s at the points `xs`, q_s = q_+(s, .) sampled on
/// [0, X] with the envelope tail model.
#[derive(Debug, Clone)]
pub struct EigenResidual {
    pub s: f64,
    pub x_max: f64,
    pub sup_q: f64,
    pub points: Vec<(f64, f64, f64)>,
}

impl EigenResidual {
    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn max_tail(&self) -> f64 {
        self.points.iter().map(|p| p.2).fold(0.0, f64::max)
    }

    /// Largest residual minus allowance `rel * sup|q| + tail`; <= 0 means pass.
    pub fn worst_excess(&self, rel: f64) -> f64 {
        self.points
            .iter()
            .map(|p| p.1 - rel * self.sup_q - p.2)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn eigen_residual(s: f64, xs: &[f64], x_max: f64) -> Result<EigenResidual> {
    let p = SpectralParameter::new(s)?;
    let rule = half_line(x_max, PI / 4.0, 10)?;
    let values: Vec<Complex64> = rule
        .nodes
        .par_iter()
        .map(|&y| Complex64::new(q_plus(&p, y), 0.0))
        .collect();
    let sup_q = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let g = GridFunction::new(rule, values)?;
    let tail = p.tail_model();
    let mut points = Vec::with_capacity(xs.len());
    for &x in xs {
        let k = apply_k(&g, x, tail)?;
        let r = (k.value - s * q_plus(&p, x)).norm();
        points.push((x, r, k.tail_bound));
    }
    Ok(EigenResidual {
        s,
        x_max,
        sup_q,
        points,
    })
}
