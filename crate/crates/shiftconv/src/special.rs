//! Gamma factors and classical Whittaker functions.
//!
//! Provides the completed Gamma factor Γ_R(s) = π^{−s/2} Γ(s/2), the
//! Whittaker function W_{κ,ν}(y) on the parameter domain used throughout
//! the crate (real κ; ν real in (−1/2, 1/2), purely imaginary, or the
//! closed-form line ν = κ − 1/2), both sides of its Mellin-transform
//! identity
//!
//!   ∫_0^∞ e^{−y/2} W_{κ,ν}(y) y^{s−1} dy
//!       = Γ(1/2+s+ν) Γ(1/2+s−ν) / Γ(1+s−κ),
//!
//! an empirical small-y decay check, and the unitarily normalized family
//!
//!   W*_{k/2,ν}(y) = i^{sgn(y)k/2} · W_{sgn(y)k/2,ν}(4π|y|)
//!                   / √(Γ(1/2−ν+sgn(y)k/2) Γ(1/2+ν+sgn(y)k/2)),
//!
//! which is orthonormal on R^× with measure dy/|y| within each parity
//! class.
//!
//! Evaluation strategy for W_{κ,ν}(y): the closed form y^κ e^{−y/2} on
//! the line ±ν = κ − 1/2; otherwise the standard integral representation
//!
//!   W_{κ,ν}(y) = e^{−y/2} y^κ / Γ(ν−κ+1/2)
//!                · ∫_0^∞ e^{−t} t^{ν−κ−1/2} (1 + t/y)^{ν+κ−1/2} dt,
//!
//! valid for Re(ν−κ+1/2) > 0, computed by adaptive Gauss–Kronrod
//! quadrature; and when the representation degenerates (large κ) the
//! three-term upward recurrence in κ,
//!
//!   W_{κ+1,ν}(y) = (y − 2κ) W_{κ,ν}(y)
//!                  + (ν−κ+1/2)(ν+κ−1/2) W_{κ−1,ν}(y),
//!
//! started from two quadrature-evaluated base cases at shifted indices.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// Lanczos coefficients, g = 7, 9 terms. Gives ~1e−13 relative accuracy
/// for moderate arguments, comfortably inside every tolerance here.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Tolerance for "is this complex number effectively real / an integer"
/// decisions in parameter validation.
pub(crate) const PARAM_EPS: f64 = 1.0e-12;

/// Complex Gamma function via the Lanczos approximation, with the
/// reflection formula for Re(z) < 1/2. Poles at nonpositive integers are
/// not trapped here (callers validate first); they surface as ±inf/NaN.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1−z) = π / sin(πz)
        let s = (PI * z).sin();
        PI / (s * gamma(Complex64::new(1.0, 0.0) - z))
    } else {
        let x = z - 1.0;
        let mut t = Complex64::new(LANCZOS[0], 0.0);
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            t += c / (x + i as f64);
        }
        let w = x + 7.5;
        (2.0 * PI).sqrt() * w.powc(x + 0.5) * (-w).exp() * t
    }
}

/// Principal log-Gamma for Re(z) ≥ 1/2 (no reflection needed there).
/// Used where ratios of Gamma values along a contour must not overflow.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= 0.5, "ln_gamma requires Re(z) >= 1/2");
    let x = z - 1.0;
    let mut t = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        t += c / (x + i as f64);
    }
    let w = x + 7.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * w.ln() - w + t.ln()
}

/// True when `z` sits within `PARAM_EPS` of a nonpositive integer on the
/// real axis — i.e. at (or numerically at) a Gamma pole.
pub fn near_gamma_pole(z: Complex64) -> bool {
    if z.im.abs() > PARAM_EPS {
        return false;
    }
    let r = z.re.round();
    r <= 0.0 && (z.re - r).abs() <= PARAM_EPS
}

/// Completed Gamma factor Γ_R(s) = π^{−s/2} Γ(s/2).
///
/// Errors at the poles s ∈ {0, −2, −4, …}.
pub fn gamma_r(s: Complex64) -> Result<Complex64> {
    let half = s / 2.0;
    if near_gamma_pole(half) {
        return Err(Error::Domain(format!(
            "gamma_r pole at s = {s} (nonpositive even integer)"
        )));
    }
    Ok((-half * PI.ln()).exp() * gamma(half))
}

/// log of Γ_R(s) for Re(s) ≥ 1 (principal branch); see [`ln_gamma`].
pub fn ln_gamma_r(s: Complex64) -> Complex64 {
    -s / 2.0 * PI.ln() + ln_gamma(s / 2.0)
}

/// Index pair (κ, ν) of a Whittaker function W_{κ,ν}.
///
/// Supported domain: κ real with Re(κ) ≥ 0, and ν either real in
/// (−1/2, 1/2), purely imaginary, or on the closed-form line ±ν = κ − 1/2.
/// (Internal consumers evaluate negative κ through the same machinery;
/// the public constructor enforces the domain above.)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerParams {
    pub kappa: Complex64,
    pub nu: Complex64,
}

impl WhittakerParams {
    /// Validate and build a parameter pair.
    pub fn new(kappa: Complex64, nu: Complex64) -> Result<Self> {
        if kappa.im.abs() > PARAM_EPS {
            return Err(Error::Domain(format!(
                "Whittaker index kappa must be real, got {kappa}"
            )));
        }
        if kappa.re < -PARAM_EPS {
            return Err(Error::Domain(format!(
                "Whittaker index kappa must be >= 0, got {kappa}"
            )));
        }
        let p = Self { kappa, nu };
        if !p.nu_supported() {
            return Err(Error::Domain(format!(
                "Whittaker order nu = {nu} unsupported: need nu real in (-1/2, 1/2), \
                 purely imaginary, or nu = kappa - 1/2"
            )));
        }
        Ok(p)
    }

    /// Convenience constructor from real κ and real ν.
    pub fn real(kappa: f64, nu: f64) -> Result<Self> {
        Self::new(Complex64::new(kappa, 0.0), Complex64::new(nu, 0.0))
    }

    fn kappa_re(&self) -> f64 {
        self.kappa.re
    }

    /// Whether ν lies on the closed-form line ±ν = κ − 1/2.
    fn closed_form_nu(&self) -> Option<Complex64> {
        let target = self.kappa_re() - 0.5;
        for cand in [self.nu, -self.nu] {
            if (cand - target).norm() <= PARAM_EPS {
                return Some(cand);
            }
        }
        None
    }

    fn nu_supported(&self) -> bool {
        let nu = self.nu;
        nu.re.abs() <= PARAM_EPS
            || (nu.im.abs() <= PARAM_EPS && nu.re.abs() < 0.5 - PARAM_EPS)
            || self.closed_form_nu().is_some()
    }
}

/// Margin on Re(ν−κ+1/2) below which the integral representation is
/// considered too close to its convergence boundary and the recurrence
/// path is taken instead.
const REP_MARGIN: f64 = 0.05;

/// Core evaluator; accepts any real κ (including negative, needed for the
/// normalized family at y < 0).
fn whittaker_w_at(kappa: f64, nu: Complex64, y: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    // Closed form on the line ±ν = κ − 1/2: W = y^κ e^{−y/2}.
    let target = kappa - 0.5;
    for cand in [nu, -nu] {
        if (cand - target).norm() <= PARAM_EPS {
            return Ok(Complex64::new(y.powf(kappa) * (-y / 2.0).exp(), 0.0));
        }
    }

    // W is even in ν; normalize to Re(ν) ≥ 0 so the representation's
    // convergence gap is as large as possible.
    let nu = if nu.re < 0.0 { -nu } else { nu };

    let gap = nu.re - kappa + 0.5;
    if gap > REP_MARGIN {
        return whittaker_integral_rep(kappa, nu, y, cfg);
    }

    // Upward recurrence from a base index κ_b = κ − j placed safely
    // inside the representation's domain.
    let j = (REP_MARGIN - gap).floor() as u32 + 1;
    let kb = kappa - j as f64;
    let mut w_prev = whittaker_integral_rep(kb - 1.0, nu, y, cfg)?;
    let mut w_cur = whittaker_integral_rep(kb, nu, y, cfg)?;
    for step in 0..j {
        let kc = kb + step as f64;
        let next = (y - 2.0 * kc) * w_cur + (nu - kc + 0.5) * (nu + kc - 0.5) * w_prev;
        w_prev = w_cur;
        w_cur = next;
    }
    Ok(w_cur)
}

/// Integral representation, valid for Re(ν−κ+1/2) > 0 (callers keep a
/// margin). The [0,1] piece is regularized by the substitution t = u^p
/// with p chosen so the transformed integrand is C^1 at u = 0.
fn whittaker_integral_rep(
    kappa: f64,
    nu: Complex64,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let a = nu - kappa - 0.5; // exponent of t
    let b = nu + kappa - 0.5; // exponent of (1 + t/y)
    let a1 = a + 1.0;
    debug_assert!(a1.re > 0.0);

    let p = (2.0 / a1.re).ceil().max(1.0);
    let i1 = integrate(
        |u| {
            if u <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let t = u.powf(p);
            let u_pow = ((p * a1 - 1.0) * u.ln()).exp();
            let fac = (b * (t / y).ln_1p()).exp();
            p * (-t).exp() * u_pow * fac
        },
        0.0,
        1.0,
        cfg,
    )?;

    let r = cfg.truncation_radius.clamp(2.0, 700.0);
    let i2 = integrate(
        |t| (-t).exp() * (a * t.ln()).exp() * (b * (t / y).ln_1p()).exp(),
        1.0,
        r,
        cfg,
    )?;

    let pref = (-y / 2.0).exp() * y.powf(kappa) / gamma(nu - kappa + 0.5);
    Ok(pref * (i1 + i2))
}

/// W_{κ,ν}(y) with default quadrature settings.
pub fn whittaker_w(params: &WhittakerParams, y: f64) -> Result<Complex64> {
    whittaker_w_cfg(params, y, &QuadratureConfig::default())
}

/// W_{κ,ν}(y) with caller-supplied quadrature settings.
pub fn whittaker_w_cfg(params: &WhittakerParams, y: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!(
            "Whittaker argument must be positive and finite, got {y}"
        )));
    }
    // Re-run the domain validation so values built via struct literals
    // are still checked.
    let p = WhittakerParams::new(params.kappa, params.nu)?;
    whittaker_w_at(p.kappa_re(), p.nu, y, cfg)
}

/// Right side of the Mellin identity: Γ(1/2+s+ν)Γ(1/2+s−ν)/Γ(1+s−κ).
pub fn whittaker_mellin_rhs(params: &WhittakerParams, s: Complex64) -> Result<Complex64> {
    if s.re <= 0.5 + params.nu.re.abs() {
        return Err(Error::Domain(format!(
            "Mellin variable must satisfy Re(s) > 1/2 + |Re(nu)|, got s = {s}"
        )));
    }
    let denom_arg = 1.0 + s - params.kappa;
    if near_gamma_pole(denom_arg) {
        // A denominator pole makes the transform vanish.
        return Ok(Complex64::new(0.0, 0.0));
    }
    let num = gamma(0.5 + s + params.nu) * gamma(0.5 + s - params.nu);
    Ok(num / gamma(denom_arg))
}

/// Left side of the Mellin identity, computed by direct quadrature of
/// e^{−y/2} W_{κ,ν}(y) y^{s−1} over (0, cfg.truncation_radius].
pub fn whittaker_mellin_lhs(
    params: &WhittakerParams,
    s: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if s.re <= 0.5 + params.nu.re.abs() {
        return Err(Error::Domain(format!(
            "Mellin variable must satisfy Re(s) > 1/2 + |Re(nu)|, got s = {s}"
        )));
    }
    let p = WhittakerParams::new(params.kappa, params.nu)?;
    let kappa = p.kappa_re();
    let nu = p.nu;
    let upper = cfg.truncation_radius.clamp(10.0, 700.0);
    let nan = Complex64::new(f64::NAN, f64::NAN);
    integrate(
        |y| {
            if y <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let w = whittaker_w_at(kappa, nu, y, cfg).unwrap_or(nan);
            (-y / 2.0).exp() * w * ((s - 1.0) * y.ln()).exp()
        },
        0.0,
        upper,
        cfg,
    )
}

/// Empirical small-y decay check: returns
/// sup over the grid of |W_{κ,ν}(y) / Γ(1/2+ν+κ)| / y^{1/2−|Re ν|−ε}.
///
/// A finite return certifies, on the supplied grid, the uniform bound
/// |W/Γ| ≪ y^{1/2−|Re ν|−ε} as y → 0.
pub fn whittaker_bound_check(
    params: &WhittakerParams,
    epsilon: f64,
    y_grid: &[f64],
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::Precondition(format!(
            "bound-check epsilon must be positive, got {epsilon}"
        )));
    }
    let p = WhittakerParams::new(params.kappa, params.nu)?;
    let norm_arg = 0.5 + p.nu + p.kappa;
    if near_gamma_pole(norm_arg) {
        return Err(Error::Domain(format!(
            "normalizer Gamma(1/2+nu+kappa) has a pole at argument {norm_arg}"
        )));
    }
    let norm = gamma(norm_arg).norm();
    let exponent = 0.5 - p.nu.re.abs() - epsilon;
    let cfg = QuadratureConfig::default();
    let mut sup: f64 = 0.0;
    for &y in y_grid {
        if !(y > 0.0 && y <= 1.0) {
            return Err(Error::Precondition(format!(
                "bound-check grid points must lie in (0, 1], got {y}"
            )));
        }
        let w = whittaker_w_at(p.kappa_re(), p.nu, y, &cfg)?;
        sup = sup.max(w.norm() / norm / y.powf(exponent));
    }
    Ok(sup)
}

/// Admissibility of ν for the normalized family at weight k (= 2·k_half):
/// for even k, ν ∈ (1/2 + Z) ∪ iR ∪ (−1/2, 1/2); for odd k, ν ∈ Z ∪ iR.
fn star_nu_admissible(k: i64, nu: Complex64) -> bool {
    if nu.re.abs() <= PARAM_EPS {
        return true; // purely imaginary (or zero)
    }
    if nu.im.abs() > PARAM_EPS {
        return false; // properly complex: never admissible
    }
    let re = nu.re;
    if k % 2 == 0 {
        let doubled = 2.0 * re;
        let is_half_odd = (doubled - doubled.round()).abs() <= 1.0e-9
            && (doubled.round() as i64).rem_euclid(2) == 1;
        is_half_odd || re.abs() < 0.5 - PARAM_EPS
    } else {
        (re - re.round()).abs() <= 1.0e-9
    }
}

/// Normalized Whittaker basis function W*_{k/2,ν}(y) on the punctured
/// real line, with default quadrature settings.
pub fn whittaker_star(k_half: f64, nu: Complex64, y: f64) -> Result<Complex64> {
    whittaker_star_cfg(k_half, nu, y, &QuadratureConfig::default())
}

/// Normalized Whittaker basis function with caller-supplied quadrature
/// settings.
pub fn whittaker_star_cfg(
    k_half: f64,
    nu: Complex64,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let doubled = 2.0 * k_half;
    if (doubled - doubled.round()).abs() > 1.0e-9 {
        return Err(Error::Domain(format!(
            "index must be a half-integer, got {k_half}"
        )));
    }
    let k = doubled.round() as i64;
    if !star_nu_admissible(k, nu) {
        return Err(Error::Domain(format!(
            "order nu = {nu} inadmissible for weight k = {k}"
        )));
    }
    if y == 0.0 || !y.is_finite() {
        return Err(Error::Domain(format!(
            "argument must be nonzero and finite, got {y}"
        )));
    }

    let sgn = if y > 0.0 { 1.0 } else { -1.0 };
    let kappa = sgn * k_half;
    let g1 = 0.5 - nu + kappa;
    let g2 = 0.5 + nu + kappa;
    if near_gamma_pole(g1) || near_gamma_pole(g2) {
        return Err(Error::Domain(format!(
            "degenerate normalization: Gamma pole at {g1} or {g2}"
        )));
    }
    let w = whittaker_w_at(kappa, nu, 4.0 * PI * y.abs(), cfg)?;
    let norm = (gamma(g1) * gamma(g2)).sqrt();
    // i^{sgn(y)·k/2} with the principal branch for half-integer exponents.
    let phase = Complex64::new(0.0, PI / 2.0 * sgn * k_half).exp();
    Ok(phase * w / norm)
}

/// Numeric inner product ⟨W*_{k₁/2,ν}, W*_{k₂/2,ν}⟩ over the punctured
/// line with measure dy/|y|, truncated to |y| ∈ [1e−6, 50].
///
/// For admissible parameters in a common parity class this reproduces
/// δ_{k₁k₂} up to the truncation error (≤ ~2e−5 at these cutoffs).
pub fn whittaker_star_inner_product(
    k1_half: f64,
    k2_half: f64,
    nu: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let (lo, hi) = (1.0e-6_f64, 50.0_f64);
    let nan = Complex64::new(f64::NAN, f64::NAN);
    // Substitute y = ±e^u so the measure dy/|y| becomes du; each
    // half-line contributes one smooth integral over u.
    let mut total = Complex64::new(0.0, 0.0);
    for sign in [1.0_f64, -1.0] {
        total += integrate(
            |u| {
                let y = sign * u.exp();
                let a = whittaker_star_cfg(k1_half, nu, y, cfg).unwrap_or(nan);
                let b = whittaker_star_cfg(k2_half, nu, y, cfg).unwrap_or(nan);
                a * b.conj()
            },
            lo.ln(),
            hi.ln(),
            &QuadratureConfig {
                rel_tol: 1.0e-8,
                abs_tol: 1.0e-10,
                ..cfg.clone()
            },
        )?;
    }
    Ok(total)
}
