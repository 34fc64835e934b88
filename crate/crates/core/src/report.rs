//! Named verification suites, JSON reports and CSV curves behind the CLI.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::covariance::{
    covariance_weak_check, f_a_apply, spectral_band, tanh_conjugation_check, transform_symbol,
    ProjPoint, Sl2Element,
};
use crate::finite_hilbert::{
    a_op_gram, finite_hilbert_pv, hilbert_eigen_residual, q_prime, tau_packet, u_isometry_defect,
};
use crate::hankel_reduction::{
    alpha_identity_check, block_five_halves_residual, fagko_parity_check, fdpok_residual,
    gegenbauer_partial_sum, hankel_selfreciprocal_check, k_kernel,
};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, half_line};
use crate::specfun::sinc;
use crate::spectral_transform::{
    apply_v, apply_v_inverse_on_laguerre, q_plus, q_plus_direct, q_plus_parts, SpectralParameter,
    S_WINDOW,
};
use crate::toeplitz_arc::{
    h_basis, orthonormality_defect, spectral_rep_check, toeplitz_matrix, ArcSpec,
};
use crate::wiener_hopf::{discretize_w, eigen_residual, gram_k_laguerre, SymbolSpec};
use crate::{Error, Result};

/// Bumped whenever a default below changes.
pub const DEFAULTS_VERSION: f64 = 1.0;

/// Smallest tolerance an override may set; anything tighter is below the
/// rounding floor of the double-precision sums the checks are built from.
pub const TOLERANCE_FLOOR: f64 = 1e-15;

pub const SUITES: [&str; 9] = [
    "eigen-K",
    "diag-V",
    "laguerre-mp",
    "toeplitz-arc",
    "hilbert-finite",
    "intertwiner-A",
    "hankel-identities",
    "covariance",
    "all",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub anchor: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub tail_bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub parameters: BTreeMap<String, f64>,
    pub wall_time: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// One kind of check: an id prefix, the module function it exercises and the
/// identity it verifies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckFamily {
    pub suite: &'static str,
    pub id: &'static str,
    pub module: &'static str,
    pub description: &'static str,
    pub anchor: &'static str,
}

const fn fam(
    suite: &'static str,
    id: &'static str,
    module: &'static str,
    description: &'static str,
    anchor: &'static str,
) -> CheckFamily {
    CheckFamily {
        suite,
        id,
        module,
        description,
        anchor,
    }
}

pub const CATALOG: &[CheckFamily] = &[
    fam("eigen-K", "eigen-K/residual", "wiener_hopf", "|K q_+(s,.)(x) - s q_+(s,x)| on [0,X]", "K q_+(s,.) = s q_+(s,.)"),
    fam("eigen-K", "eigen-K/nystrom-spectrum", "wiener_hopf", "excursion of sinc Nystrom eigenvalues outside [0,1]", "sigma(K) = [0,1]"),
    fam("diag-V", "diag-V/bessel-anchor", "spectral_transform", "|q_+(1/2,x) - sqrt(2/pi) J_0(x)|", "q_+(1/2,x) = sqrt(2/pi) J_0(x)"),
    fam("diag-V", "diag-V/realness", "spectral_transform", "sine part of the v-line integral", "q_+(s,x) is real"),
    fam("diag-V", "diag-V/two-routes", "spectral_transform", "v-line form against the direct angular form", "q_+(s,x) = n(s) int (1-u^2)^{-1/2} ((1-u)/(1+u))^{ia} e^{ixu} du"),
    fam("diag-V", "diag-V/reflection", "spectral_transform", "|q_-(s,x) - q_+(1-s,-x)|", "q_-(s,x) = q_+(1-s,-x)"),
    fam("diag-V", "diag-V/isometry", "spectral_transform", "| ||Vh||^2 / ||h||^2 - 1 | for a smooth h on [0.01,0.99]", "||Vh|| = ||h||"),
    fam("laguerre-mp", "laguerre-mp/basis-map", "spectral_transform", "|int_0^X q_+(s,x) l_n(x) dx - h_n(s)|", "V^{-1} l_n = h_n"),
    fam("laguerre-mp", "laguerre-mp/gram-vs-arc", "toeplitz_arc", "max |<l_m, K l_n> - int_0^1 s conj(h_m) h_n ds|, m,n <= 6", "<l_m, K l_n> = int_0^1 s conj(h_m(s)) h_n(s) ds"),
    fam("toeplitz-arc", "toeplitz-arc/spectral-rep", "toeplitz_arc", "max |c(m-n) - int_0^1 s conj(h_m) h_n ds|, m,n <= 6", "c(m-n) = int_0^1 s conj(h_m(s)) h_n(s) ds"),
    fam("toeplitz-arc", "toeplitz-arc/orthonormality", "toeplitz_arc", "max |delta_mn - int_0^1 conj(h_m) h_n ds|, m,n <= 6", "int_0^1 conj(h_m(s)) h_n(s) ds = delta_mn"),
    fam("toeplitz-arc", "toeplitz-arc/section-spectrum", "toeplitz_arc", "excursion of N x N section eigenvalues outside [0,1]", "0 <= T(1_A) <= 1"),
    fam("hilbert-finite", "hilbert-finite/pv-identity", "finite_hilbert", "|H (1-y^2)^{-1/2}| at interior points", "PV int_{-1}^1 (1-y^2)^{-1/2} dy/(y-x) = 0"),
    fam("hilbert-finite", "hilbert-finite/eigen", "finite_hilbert", "max_x |H Q'(t,.)(x) - t Q'(t,x)| / |Q'(t,x)|", "H_[-1,1] Q'(t,.) = t Q'(t,.)"),
    fam("hilbert-finite", "hilbert-finite/u-isometry", "finite_hilbert", "max |<U k_i, U k_j> - <k_i, k_j>| over tau-Gaussian packets", "U is unitary on L^2(-1,1)"),
    fam("intertwiner-A", "intertwiner-A/gram", "finite_hilbert", "max |<A P_p, A P_q> - <P_p, (I + H) P_q>/2|, p,q <= 6", "A^*A = (I + H_[-1,1])/2"),
    fam("hankel-identities", "hankel-identities/finite-rank", "hankel_reduction", "finite-rank identity residual on a 5x5 grid", "K_{l+1/2} = K - (1/2) sum_{k<=l} (2k+1) F_k"),
    fam("hankel-identities", "hankel-identities/parity", "hankel_reduction", "even and odd partial sums at L = 40", "sum_l (4l+1) F_2l = (sinc(x-x') + sinc(x+x'))/pi"),
    fam("hankel-identities", "hankel-identities/gegenbauer", "hankel_reduction", "|sum_{l<=60} (2l+1) F_l(1,1) - 2/pi|", "sum_l (2l+1) F_l(x,x') = (2/pi) sinc(x-x')"),
    fam("hankel-identities", "hankel-identities/alpha", "hankel_reduction", "derivative identity with a 5-point stencil, h = 1e-3", "d/dz sum_k 2(nu+2k)/(ab) J_{nu+2k}(az) J_{nu+2k}(bz) = z (J_{nu+2n-1}(az) J_{nu+2n-1}(bz) - J_{nu+2n'+1}(az) J_{nu+2n'+1}(bz))"),
    fam("hankel-identities", "hankel-identities/block-five-halves", "hankel_reduction", "Lommel kernels on a 5x5 off-diagonal grid", "H_{5/2} 1_[0,1] H_{5/2} = H_{1/2} 1_[0,1] H_{1/2} - P(3/2)"),
    fam("hankel-identities", "hankel-identities/self-reciprocal", "hankel_reduction", "||H_nu g - g||_inf, g = s^{nu+1/2} e^{-s^2/2}", "H_nu (s^{nu+1/2} e^{-s^2/2}) = s^{nu+1/2} e^{-s^2/2}"),
    fam("hankel-identities", "hankel-identities/k-kernel-sinc", "hankel_reduction", "|k_{-1/2}(r,t) - sinc(r-t)/pi| on a grid", "k_{-1/2}(r,t) = (1/pi) sinc(r-t)"),
    fam("covariance", "covariance/symbol-exact", "covariance", "endpoint and sample gaps of transformed symbols", "B.(2 1_[-1,1] - 1) = -sgn, A_gamma . 1_[-1,1] = 1_[gamma,inf)"),
    fam("covariance", "covariance/tanh-conjugation", "covariance", "max |<e_m, H_[0,1] e_n> - <G^{-1} e_m, W(-tanh) G^{-1} e_n>|, m,n <= 2", "H_[0,1] = Gamma W(-tanh) Gamma^{-1}"),
    fam("covariance", "covariance/weak-form", "covariance", "max |<F' l_m, H_[0,inf) F' l_n> - <l_m, (2K - I) l_n>|, m,n <= 2", "F'_B (2K - I) F'_B^{-1} = H_[0,inf)"),
    fam("covariance", "covariance/f-a-isometry", "covariance", "| ||F_B f||^2 / ||f||^2 - 1 | for a smooth bump", "F_A is unitary"),
    fam("covariance", "covariance/band-containment", "covariance", "excursion of H_[-1,1] and 2K - I Nystrom spectra outside [-1,1]", "sigma(H_[-1,1]) = sigma(2K - I) = [-1,1]"),
    fam("covariance", "covariance/band-ks", "covariance", "Kolmogorov distance of the two empirical spectral distributions", "H_[-1,1] is unitarily equivalent to 2K - I"),
];

pub fn family(id: &str) -> Option<&'static CheckFamily> {
    CATALOG.iter().find(|f| f.id == id)
}

fn check(
    family_id: &str,
    detail: &str,
    max_error: f64,
    tolerance: f64,
    tail_bound: Option<f64>,
) -> Check {
    let f = family(family_id).expect("check family is catalogued");
    let allowance = tolerance + tail_bound.unwrap_or(0.0);
    Check {
        id: if detail.is_empty() {
            f.id.to_string()
        } else {
            format!("{}[{detail}]", f.id)
        },
        description: f.description.to_string(),
        anchor: f.anchor.to_string(),
        max_error,
        tolerance,
        tail_bound,
        pass: max_error.is_finite() && max_error <= allowance,
    }
}

/// Default parameters of a suite (for "all", the union of every suite).
pub fn defaults(suite: &str) -> Result<BTreeMap<String, f64>> {
    let entries: &[(&str, f64)] = match suite {
        "eigen-K" => &[
            ("X", 400.0),
            ("eigen_rel_tol", 5e-3),
            ("nystrom_X", 40.0),
            ("nystrom_nodes", 200.0),
            ("nystrom_tol", 1e-2),
        ],
        "diag-V" => &[
            ("anchor_tol", 1e-8),
            ("realness_tol", 1e-12),
            ("two_routes_tol", 1e-8),
            ("reflection_tol", 1e-15),
            ("iso_X", 400.0),
            ("iso_tol", 2e-2),
        ],
        "laguerre-mp" => &[
            ("basis_X", 400.0),
            ("basis_tol", 1e-4),
            ("gram_tol", 1e-6),
            ("gram_quad_order", 200.0),
        ],
        "toeplitz-arc" => &[
            ("arc_nodes_per_unit", 40.0),
            ("spectral_rep_tol", 1e-6),
            ("orthonormality_tol", 1e-8),
            ("section_N", 60.0),
            ("section_tol", 1e-10),
        ],
        "hilbert-finite" => &[
            ("pv_nodes", 2048.0),
            ("pv_tol", 1e-12),
            ("hilbert_rel_tol", 5e-3),
            ("u_v_max", 60.0),
            ("u_iso_tol", 1e-6),
        ],
        "intertwiner-A" => &[("intertwiner_X", 2000.0), ("intertwiner_tol", 1e-4)],
        "hankel-identities" => &[
            ("finite_rank_tol", 1e-12),
            ("parity_L", 40.0),
            ("parity_tol", 1e-10),
            ("gegenbauer_L", 60.0),
            ("gegenbauer_tol", 1e-10),
            ("alpha_tol", 1e-8),
            ("block_tol", 1e-10),
            ("hankel_S", 12.0),
            ("hankel_nodes", 400.0),
            ("hankel_tol", 1e-6),
            ("sinc_tol", 1e-14),
        ],
        "covariance" => &[
            ("symbol_tol", 1e-12),
            ("tanh_tol", 1e-3),
            ("weak_tol", 1e-2),
            ("fa_tol", 1e-2),
            ("band_nodes", 200.0),
            ("band_X", 40.0),
            ("band_eps", 2e-2),
            ("ks_tol", 0.1),
        ],
        "all" => {
            let mut all = BTreeMap::new();
            for s in SUITES.iter().filter(|s| **s != "all") {
                all.extend(defaults(s)?);
            }
            return Ok(all);
        }
        other => {
            return Err(Error::Usage(format!(
                "unknown suite '{other}'; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    let mut map: BTreeMap<String, f64> = entries.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    map.insert("defaults_version".into(), DEFAULTS_VERSION);
    Ok(map)
}

fn merge(suite: &str, overrides: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    let mut params = defaults(suite)?;
    for (k, &v) in overrides {
        if k == "defaults_version" || !params.contains_key(k) {
            let keys: Vec<&str> = params
                .keys()
                .map(String::as_str)
                .filter(|k| *k != "defaults_version")
                .collect();
            return Err(Error::Usage(format!(
                "invalid override key '{k}' for suite {suite}; valid keys: {}",
                keys.join(", ")
            )));
        }
        if !v.is_finite() {
            return Err(Error::Usage(format!("override {k} must be finite")));
        }
        if k.ends_with("_tol") && v < TOLERANCE_FLOOR {
            return Err(Error::Usage(format!(
                "tolerance {k} = {v:e} is below machine feasibility: the checked quantities are sums of O(1) double-precision \
                 terms whose rounding alone is about 1e-16 per term, so use {TOLERANCE_FLOOR:e} or more"
            )));
        }
        params.insert(k.clone(), v);
    }
    Ok(params)
}

struct Params<'a>(&'a BTreeMap<String, f64>);

impl Params<'_> {
    fn f(&self, k: &str) -> f64 {
        self.0[k]
    }

    fn n(&self, k: &str) -> Result<usize> {
        let v = self.0[k];
        if v < 1.0 || v.fract() != 0.0 || v > 1e7 {
            return Err(Error::Usage(format!(
                "parameter {k} must be a positive integer, got {v}"
            )));
        }
        Ok(v as usize)
    }
}

/// Runs a suite with its defaults merged with `overrides`; checks are ordered by id.
pub fn run_suite(name: &str, overrides: &BTreeMap<String, f64>) -> Result<VerificationReport> {
    let params = merge(name, overrides)?;
    let start = Instant::now();
    let p = Params(&params);
    let mut checks = Vec::new();
    for suite in SUITES.iter().filter(|s| name == "all" || **s == name) {
        match *suite {
            "eigen-K" => eigen_k(&p, &mut checks)?,
            "diag-V" => diag_v(&p, &mut checks)?,
            "laguerre-mp" => laguerre_mp(&p, &mut checks)?,
            "toeplitz-arc" => toeplitz_arc(&p, &mut checks)?,
            "hilbert-finite" => hilbert_finite(&p, &mut checks)?,
            "intertwiner-A" => intertwiner(&p, &mut checks)?,
            "hankel-identities" => hankel(&p, &mut checks)?,
            "covariance" => covariance(&p, &mut checks)?,
            _ => {}
        }
    }
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(VerificationReport {
        suite: name.to_string(),
        checks,
        parameters: params,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Distance of the sorted eigenvalues from [lo, hi].
fn excursion(ev: &[f64], lo: f64, hi: f64) -> f64 {
    max_of(ev.iter().map(|&v| (lo - v).max(v - hi)))
}

fn eigen_k(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let (x_max, rel) = (p.f("X"), p.f("eigen_rel_tol"));
    for &s in &[0.2, 0.5, 0.8] {
        let r = eigen_residual(s, &[0.5, 1.0, 2.0, 5.0, 10.0], x_max)?;
        for &(x, res, tail) in &r.points {
            out.push(check(
                "eigen-K/residual",
                &format!("s={s},x={x}"),
                res,
                rel * r.sup_q,
                Some(tail),
            ));
        }
    }
    let rule = gauss_legendre(p.n("nystrom_nodes")?, 0.0, p.f("nystrom_X"))?;
    let ev = discretize_w(&SymbolSpec::indicator(), &rule)?.eigenvalues()?;
    out.push(check(
        "eigen-K/nystrom-spectrum",
        "",
        excursion(&ev, 0.0, 1.0),
        p.f("nystrom_tol"),
        None,
    ));
    Ok(())
}

/// J_0(x) = (1/pi) int_0^pi cos(x sin t) dt.
fn bessel_j0(x: f64) -> Result<f64> {
    Ok(gauss_legendre(96, 0.0, PI)?.integrate_real(|t| (x * t.sin()).cos()) / PI)
}

fn diag_v(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let half = SpectralParameter::new(0.5)?;
    let mut worst = 0.0f64;
    for &x in &[0.0, 1.0, 5.0, 10.0] {
        worst = worst.max((q_plus(&half, x) - (2.0 / PI).sqrt() * bessel_j0(x)?).abs());
    }
    out.push(check(
        "diag-V/bessel-anchor",
        "",
        worst,
        p.f("anchor_tol"),
        None,
    ));

    let mut imag = 0.0f64;
    let mut routes = 0.0f64;
    let mut refl = 0.0f64;
    for &s in &[0.2, 0.3, 0.7, 0.9] {
        let sp = SpectralParameter::new(s)?;
        for &x in &[0.0, 1.0, 5.0, 40.0] {
            imag = imag.max(q_plus_parts(&sp, x).1.abs());
        }
        for &x in &[0.0, 1.0, 5.0] {
            routes = routes.max((q_plus(&sp, x) - q_plus_direct(&sp, x)).abs());
            let direct = q_plus(&SpectralParameter::new(1.0 - s)?, x);
            refl = refl.max((crate::spectral_transform::q_minus(s, -x)? - direct).abs());
        }
    }
    out.push(check(
        "diag-V/realness",
        "",
        imag,
        p.f("realness_tol"),
        None,
    ));
    out.push(check(
        "diag-V/two-routes",
        "",
        routes,
        p.f("two_routes_tol"),
        None,
    ));
    out.push(check(
        "diag-V/reflection",
        "",
        refl,
        p.f("reflection_tol"),
        None,
    ));

    // Gaussian in a = ln(1/s - 1)/2pi with a smooth cut at the window edges
    let (lo, hi) = S_WINDOW;
    let a_edge = (1.0 / lo - 1.0).ln() / (2.0 * PI);
    let rule = composite_gauss_legendre(lo, hi, 40, 12)?;
    let h = rule.sample(|s| {
        let a = (1.0 / s - 1.0).ln() / (2.0 * PI);
        let t = a / a_edge;
        let cut = if t.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        };
        Complex64::new(
            (-a * a / 0.125).exp() * cut / (2.0 * PI * s * (1.0 - s)).sqrt(),
            0.0,
        )
    });
    let xs = half_line(p.f("iso_X"), PI / 4.0, 8)?;
    let vh = apply_v(&h, &xs.nodes)?;
    let norm_v: f64 = vh
        .iter()
        .zip(&xs.weights)
        .map(|(v, w)| w * v.norm_sqr())
        .sum();
    out.push(check(
        "diag-V/isometry",
        "",
        (norm_v / h.norm_sq() - 1.0).abs(),
        p.f("iso_tol"),
        None,
    ));
    Ok(())
}

fn laguerre_mp(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let arc = ArcSpec::laguerre();
    let x_max = p.f("basis_X");
    for &s in &[0.2, 0.5, 0.8] {
        let sp = SpectralParameter::new(s)?;
        for n in 0..=5 {
            let v = apply_v_inverse_on_laguerre(n, &[sp], x_max)?[0];
            let err = (Complex64::new(v.value, 0.0) - h_basis(n, s, &arc)?).norm();
            out.push(check(
                "laguerre-mp/basis-map",
                &format!("n={n},s={s}"),
                err,
                p.f("basis_tol"),
                Some(v.tail_bound),
            ));
        }
    }
    let order = p.n("gram_quad_order")?;
    let mut worst = 0.0f64;
    for m in 0..=6 {
        for n in 0..=6 {
            let g = gram_k_laguerre(m, n, order)?;
            let a = crate::toeplitz_arc::arc_moment(m, n, &arc, 1, 40)?.value;
            worst = worst.max((g - a).norm());
        }
    }
    out.push(check(
        "laguerre-mp/gram-vs-arc",
        "",
        worst,
        p.f("gram_tol"),
        None,
    ));
    Ok(())
}

fn toeplitz_arc(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let nodes = p.n("arc_nodes_per_unit")?;
    let arcs = [
        ArcSpec::new(0.0, PI / 2.0)?,
        ArcSpec::new(PI / 4.0, PI / 3.0)?,
        ArcSpec::laguerre(),
    ];
    for arc in &arcs {
        let tag = format!("alpha={:.4},beta={:.4}", arc.alpha, arc.beta);
        let (mut rep, mut orth) = (0.0f64, 0.0f64);
        for m in 0..=6 {
            for n in 0..=6 {
                rep = rep.max(spectral_rep_check(m, n, arc, nodes)?);
                orth = orth.max(orthonormality_defect(m, n, arc, nodes)?);
            }
        }
        out.push(check(
            "toeplitz-arc/spectral-rep",
            &tag,
            rep,
            p.f("spectral_rep_tol"),
            None,
        ));
        out.push(check(
            "toeplitz-arc/orthonormality",
            &tag,
            orth,
            p.f("orthonormality_tol"),
            None,
        ));
        let ev = toeplitz_matrix(p.n("section_N")?, arc)?.eigenvalues()?;
        out.push(check(
            "toeplitz-arc/section-spectrum",
            &tag,
            excursion(&ev, 0.0, 1.0),
            p.f("section_tol"),
            None,
        ));
    }
    Ok(())
}

fn hilbert_finite(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let n = p.n("pv_nodes")?;
    let mut pv = 0.0f64;
    for &x in &[-0.7, 0.1, 0.6] {
        pv = pv.max(
            finite_hilbert_pv(|y| Complex64::new(1.0 / (1.0 - y * y).sqrt(), 0.0), x, n)?.norm(),
        );
    }
    out.push(check(
        "hilbert-finite/pv-identity",
        "",
        pv,
        p.f("pv_tol"),
        None,
    ));
    for &t in &[-0.5, 0.0, 0.5] {
        let r = hilbert_eigen_residual(t, &[-0.7, 0.1, 0.6], n)?;
        out.push(check(
            "hilbert-finite/eigen",
            &format!("t={t}"),
            r,
            p.f("hilbert_rel_tol"),
            None,
        ));
    }
    let packets = [-0.2, 0.0, 0.2]
        .iter()
        .map(|&c| tau_packet(c, 0.1))
        .collect::<Result<Vec<_>>>()?;
    let d = u_isometry_defect(&packets, p.f("u_v_max"))?;
    out.push(check(
        "hilbert-finite/u-isometry",
        "",
        d,
        p.f("u_iso_tol"),
        None,
    ));
    Ok(())
}

fn intertwiner(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let x_max = p.f("intertwiner_X");
    let (mut worst, mut tail) = (0.0f64, 0.0f64);
    for a in 0..=6 {
        for b in 0..=6 {
            let g = a_op_gram(a, b, x_max)?;
            worst = worst.max((g.lhs - g.rhs).norm());
            tail = tail.max(g.tail_bound);
        }
    }
    out.push(check(
        "intertwiner-A/gram",
        "",
        worst,
        p.f("intertwiner_tol"),
        Some(tail),
    ));
    Ok(())
}

fn hankel(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let pts = [0.3, 1.1, 2.5, 6.0, 13.0];
    for l in 0..=2 {
        let mut worst = 0.0f64;
        for &r in &pts {
            for &t in &pts {
                worst = worst.max(fdpok_residual(l, r, t)?);
            }
        }
        out.push(check(
            "hankel-identities/finite-rank",
            &format!("l={l}"),
            worst,
            p.f("finite_rank_tol"),
            None,
        ));
    }
    let lmax = p.n("parity_L")?;
    let mut parity = 0.0f64;
    for &(x, xp) in &[(1.0, 1.5), (2.0, 2.0), (0.5, 3.0), (4.0, 1.2)] {
        let (e, o) = fagko_parity_check(lmax, x, xp)?;
        parity = parity.max(e).max(o);
    }
    out.push(check(
        "hankel-identities/parity",
        "",
        parity,
        p.f("parity_tol"),
        None,
    ));
    let g = (gegenbauer_partial_sum(p.n("gegenbauer_L")?, 1.0, 1.0)? - 2.0 / PI).abs();
    out.push(check(
        "hankel-identities/gegenbauer",
        "",
        g,
        p.f("gegenbauer_tol"),
        None,
    ));
    let mut alpha = 0.0f64;
    for &(nu, a, b, n, np, z) in &[
        (1.5, 1.0, 1.0, 0, 2, 1.0),
        (0.5, 2.0, 0.5, 0, 0, 2.0),
        (2.5, 1.3, 0.7, 1, 3, 4.0),
    ] {
        alpha = alpha.max(alpha_identity_check(nu, a, b, n, np, z)?);
    }
    out.push(check(
        "hankel-identities/alpha",
        "",
        alpha,
        p.f("alpha_tol"),
        None,
    ));
    let bpts = [0.4, 1.3, 2.9, 5.5, 10.0];
    let mut block = 0.0f64;
    for &r in &bpts {
        for &t in &bpts {
            if r != t {
                block = block.max(block_five_halves_residual(r, t)?);
            }
        }
    }
    out.push(check(
        "hankel-identities/block-five-halves",
        "",
        block,
        p.f("block_tol"),
        None,
    ));
    let grid = gauss_legendre(p.n("hankel_nodes")?, 0.0, p.f("hankel_S"))?;
    for l in 0..=3 {
        let r = hankel_selfreciprocal_check(l, &grid)?;
        out.push(check(
            "hankel-identities/self-reciprocal",
            &format!("nu={}", l as f64 + 0.5),
            r,
            p.f("hankel_tol"),
            None,
        ));
    }
    let mut sk = 0.0f64;
    for &r in &pts {
        for &t in &pts {
            sk = sk.max((k_kernel(-1, r, t)? - sinc(r - t) / PI).abs());
        }
    }
    out.push(check(
        "hankel-identities/k-kernel-sinc",
        "",
        sk,
        p.f("sinc_tol"),
        None,
    ));
    Ok(())
}

/// Largest gap between two symbols: endpoint angles and values when both are
/// arcs, plus pointwise differences at `samples`.
fn symbol_gap(a: &SymbolSpec, b: &SymbolSpec, samples: &[f64]) -> f64 {
    let mut gap = max_of(samples.iter().map(|&x| (a.eval(x) - b.eval(x)).abs()));
    if let (SymbolSpec::Arc(x), SymbolSpec::Arc(y)) = (a, b) {
        let (x, y) = (x.canonical(), y.canonical());
        let ang = |p: ProjPoint, q: ProjPoint| {
            let d = (p.angle() - q.angle()).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d)
        };
        gap = gap
            .max(ang(x.start, y.start))
            .max(ang(x.end, y.end))
            .max((x.inside - y.inside).abs())
            .max((x.outside - y.outside).abs());
    } else {
        gap = f64::INFINITY;
    }
    gap
}

fn covariance(p: &Params, out: &mut Vec<Check>) -> Result<()> {
    let samples: Vec<f64> = (0..41).map(|i| -10.0 + 0.5 * i as f64 + 0.013).collect();
    let b = Sl2Element::b_map();
    let mut gap = symbol_gap(
        &transform_symbol(&b, &SymbolSpec::sigma()),
        &SymbolSpec::neg_sgn(),
        &samples,
    );
    gap = gap.max(symbol_gap(
        &transform_symbol(&Sl2Element::identity(), &SymbolSpec::indicator()),
        &SymbolSpec::indicator(),
        &samples,
    ));
    for &g in &[-2.0, 0.0, 0.5, 3.0] {
        let img = transform_symbol(&Sl2Element::ray_map(g), &SymbolSpec::indicator());
        gap = gap.max(symbol_gap(&img, &SymbolSpec::step(g, 0.0, 1.0), &samples));
    }
    out.push(check(
        "covariance/symbol-exact",
        "",
        gap,
        p.f("symbol_tol"),
        None,
    ));

    let (mut tanh, mut weak) = (0.0f64, 0.0f64);
    for m in 0..=2 {
        for n in 0..=2 {
            tanh = tanh.max(tanh_conjugation_check(m, n)?.residual());
            weak = weak.max(covariance_weak_check(m, n)?.residual());
        }
    }
    out.push(check(
        "covariance/tanh-conjugation",
        "",
        tanh,
        p.f("tanh_tol"),
        None,
    ));
    out.push(check(
        "covariance/weak-form",
        "",
        weak,
        p.f("weak_tol"),
        None,
    ));

    let rule = composite_gauss_legendre(-4.0, 4.0, 400, 8)?;
    let f = rule.sample(|x| {
        let t = (2.0 * x - 2.2) / 1.8;
        Complex64::new(
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            },
            0.0,
        )
    });
    let img = f_a_apply(&b, &f)?;
    out.push(check(
        "covariance/f-a-isometry",
        "",
        (img.image.norm_sq() / f.norm_sq() - 1.0).abs(),
        p.f("fa_tol"),
        None,
    ));

    let band = spectral_band(p.n("band_nodes")?, p.f("band_X"))?;
    let ex = excursion(&band.hilbert, -1.0, 1.0).max(excursion(&band.two_k_minus_i, -1.0, 1.0));
    out.push(check(
        "covariance/band-containment",
        "",
        ex,
        p.f("band_eps"),
        None,
    ));
    out.push(check(
        "covariance/band-ks",
        "",
        band.ks_distance,
        p.f("ks_tol"),
        None,
    ));
    Ok(())
}

pub const CURVE_KINDS: [&str; 5] = [
    "q_plus",
    "h_basis",
    "q_prime_modulus",
    "k_kernel",
    "toeplitz_spectrum",
];

fn required(params: &BTreeMap<String, f64>, kind: &str, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::Usage(format!("curve {kind} needs parameter --{key}")))
}

/// Abscissae from..=to in steps of `step` (defaults given per kind).
fn abscissae(params: &BTreeMap<String, f64>, from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    let from = params.get("from").copied().unwrap_or(from);
    let to = params.get("to").copied().unwrap_or(to);
    let step = params.get("step").copied().unwrap_or(step);
    if !(step > 0.0) {
        return Err(Error::Usage(format!("step must be positive, got {step}")));
    }
    if to < from {
        return Ok(Vec::new());
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + step * i as f64).collect())
}

fn arc_param(params: &BTreeMap<String, f64>, kind: &str) -> Result<ArcSpec> {
    ArcSpec::new(
        required(params, kind, "alpha")?,
        required(params, kind, "beta")?,
    )
}

fn integer(v: f64, key: &str) -> Result<i64> {
    if v.fract() != 0.0 {
        return Err(Error::Usage(format!(
            "parameter {key} must be an integer, got {v}"
        )));
    }
    Ok(v as i64)
}

/// Computes a named curve: column names and rows ordered by abscissa.
pub fn curve(
    kind: &str,
    params: &BTreeMap<String, f64>,
) -> Result<(Vec<&'static str>, Vec<Vec<f64>>)> {
    match kind {
        "q_plus" => {
            let p = SpectralParameter::new(required(params, kind, "s")?)?;
            let rows = abscissae(params, 0.0, 20.0, 0.1)?
                .into_iter()
                .map(|x| vec![x, q_plus(&p, x)])
                .collect();
            Ok((vec!["x", "q_plus"], rows))
        }
        "h_basis" => {
            let n = integer(required(params, kind, "n")?, "n")?;
            if n < 0 {
                return Err(Error::Usage("n must be nonnegative".into()));
            }
            let arc = arc_param(params, kind)?;
            let rows = abscissae(params, 0.01, 0.99, 0.01)?
                .into_iter()
                .map(|s| h_basis(n as usize, s, &arc).map(|h| vec![s, h.re, h.im]))
                .collect::<Result<_>>()?;
            Ok((vec!["s", "re", "im"], rows))
        }
        "q_prime_modulus" => {
            let t = required(params, kind, "t")?;
            let rows = abscissae(params, -0.99, 0.99, 0.01)?
                .into_iter()
                .map(|u| q_prime(t, u).map(|q| vec![u, q.norm()]))
                .collect::<Result<_>>()?;
            Ok((vec!["u", "modulus"], rows))
        }
        "k_kernel" => {
            let l = integer(required(params, kind, "l")?, "l")?;
            let t = required(params, kind, "t")?;
            let rows = abscissae(params, 0.1, 20.0, 0.1)?
                .into_iter()
                .map(|r| k_kernel(l as i32, r, t).map(|k| vec![r, k]))
                .collect::<Result<_>>()?;
            Ok((vec!["r", "k"], rows))
        }
        "toeplitz_spectrum" => {
            let n = integer(required(params, kind, "N")?, "N")?;
            if n < 1 {
                return Err(Error::Usage("N must be positive".into()));
            }
            let arc = arc_param(params, kind)?;
            let ev = toeplitz_matrix(n as usize, &arc)?.eigenvalues()?;
            Ok((
                vec!["index", "eigenvalue"],
                ev.into_iter()
                    .enumerate()
                    .map(|(i, v)| vec![i as f64, v])
                    .collect(),
            ))
        }
        other => Err(Error::Usage(format!(
            "unknown curve kind '{other}'; expected one of {}",
            CURVE_KINDS.join(", ")
        ))),
    }
}

/// Writes a curve as CSV with a `#` header naming the columns and parameters;
/// returns the number of data rows.
pub fn emit_curve(kind: &str, params: &BTreeMap<String, f64>, sink: &Path) -> Result<usize> {
    let (columns, rows) = curve(kind, params)?;
    let mut text = format!("# kind={kind}; columns={}", columns.join(","));
    for (k, v) in params {
        text.push_str(&format!("; {k}={v}"));
    }
    text.push('\n');
    for row in &rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", sink.display()));
    std::fs::File::create(sink)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(io)?;
    Ok(rows.len())
}
