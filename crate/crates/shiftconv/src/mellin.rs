//! Constant-coefficient Mellin transforms of theta-weighted coefficient
//! series, in two independent routes, plus the associated Dirichlet
//! series in its convergence region.
//!
//! The object is M(s) = Σ_a p(a)·c(f(a))·|f(a)|^{−(s+k/2−(n−2)/2)} times
//! the Mellin transform in y of e^{−2π f(a) y}·W_{κ,ν}(4π f(a) y) at
//! exponent w = s + k/4 − (n−2)/2. The closed route evaluates each
//! y-integral as (4π f(a))^{−w}·Γ(1/2+w+ν)Γ(1/2+w−ν)/Γ(1+w−κ); the
//! numeric route integrates per lattice value adaptively. Everything is
//! truncated at f(a) ≤ m_cut with an empirical tail bound reported.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::arith::{coeff_from_satake, sym_power_rep, CoeffTable, RepDescriptor};
use crate::error::{Error, Result};
use crate::kahan::KahanComplex;
use crate::lfunc::growth_exponent;
use crate::quadforms::{enumerate_visit, theta_coeffs, QuadraticForm, SphericalPoly};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special::{whittaker_mellin_rhs, whittaker_w_cfg, WhittakerParams};

/// Everything that pins one transform instance: the coefficient system,
/// the lattice data (form and spherical weight), the archimedean
/// parameters, and the Mellin variable.
#[derive(Debug, Clone)]
pub struct MellinSpec {
    pub rep: RepDescriptor,
    pub form: QuadraticForm,
    pub poly: SphericalPoly,
    pub kappa: Complex64,
    pub nu: Complex64,
    pub s: Complex64,
}

impl MellinSpec {
    /// The exponent shift w = s + k/4 − (n−2)/2 carried by the
    /// y-integral.
    pub fn shift_w(&self) -> Complex64 {
        self.s + self.form.k as f64 / 4.0 - (self.rep.degree as f64 - 2.0) / 2.0
    }

    /// The exponent on |f(a)| multiplying the coefficient,
    /// s + k/2 − (n−2)/2.
    pub fn coeff_exponent(&self) -> Complex64 {
        self.s + self.form.k as f64 / 2.0 - (self.rep.degree as f64 - 2.0) / 2.0
    }

    /// Structural checks: matching dimensions, admissible Whittaker
    /// parameters, and the convergence condition Re(w) > −1.
    pub fn validate(&self) -> Result<()> {
        if self.poly.k != self.form.k {
            return Err(Error::Precondition(format!(
                "polynomial in {} variables paired with a {}-variable form",
                self.poly.k, self.form.k
            )));
        }
        WhittakerParams::new(self.kappa, self.nu)?;
        let w = self.shift_w();
        if !(w.re > -1.0) {
            return Err(Error::Domain(format!(
                "need Re(s) + k/4 − (n−2)/2 > −1, got {}",
                w.re
            )));
        }
        Ok(())
    }
}

/// A truncated value together with the bound on what the truncation
/// dropped.
#[derive(Debug, Clone, Copy)]
pub struct MellinValue {
    pub value: Complex64,
    /// Bound on the dropped tail, from the measured growth of the
    /// summed sequence. 0 when the sequence vanishes identically.
    pub tail_bound: f64,
}

/// Tail of Σ_{m > m_cut} g(m)·m^{−e_total} for a nonnegative sequence
/// whose growth is measured empirically on the upper half of the covered
/// range: g(m) ≤ amp·m^θ̂ extrapolated, so the tail is bounded by
/// amp·m_cut^{1+θ̂−e_total}/(e_total − 1 − θ̂).
fn tail_from_growth(g: &[f64], m_cut: usize, e_total: f64) -> Result<f64> {
    let lo = (m_cut / 2).max(2);
    let mut theta = 0.0_f64;
    for m in lo..=m_cut.min(g.len() - 1) {
        if g[m] > 1.0 {
            theta = theta.max(g[m].ln() / (m as f64).ln());
        }
    }
    let mut amp = 0.0_f64;
    for m in 1..=m_cut.min(g.len() - 1) {
        if g[m] > 0.0 {
            amp = amp.max(g[m] / (m as f64).powf(theta));
        }
    }
    if amp == 0.0 {
        return Ok(0.0);
    }
    if e_total <= 1.0 + theta {
        return Err(Error::Domain(format!(
            "series tail diverges: need decay exponent > {:.4}, got {:.4}",
            1.0 + theta,
            e_total
        )));
    }
    Ok(amp * (m_cut as f64).powf(1.0 + theta - e_total) / (e_total - 1.0 - theta))
}

fn check_truncation(table: &CoeffTable, m_cut: usize) -> Result<()> {
    if m_cut < 1 || m_cut > table.bound {
        return Err(Error::Coverage(format!(
            "truncation {m_cut} outside table range 1..={}",
            table.bound
        )));
    }
    Ok(())
}

/// Closed route: the theta-grouped series times the exact Gamma product,
/// M(s) ≈ G(w)·Σ_{m ≤ m_cut} r_{f,p}(m)·c(m)·m^{−(s+k/2−(n−2)/2)}·(4πm)^{−w}
/// with G(w) = Γ(1/2+w+ν)Γ(1/2+w−ν)/Γ(1+w−κ).
///
/// Evaluated in the region Re(w) > 1/2 + |Re ν| where the defining
/// y-integral converges absolutely (the Gamma quotient rejects smaller
/// w); continuation past it is out of scope.
pub fn constant_coeff_mellin_closed(
    spec: &MellinSpec,
    table: &CoeffTable,
    m_cut: usize,
) -> Result<MellinValue> {
    spec.validate()?;
    check_truncation(table, m_cut)?;
    let params = WhittakerParams::new(spec.kappa, spec.nu)?;
    let w = spec.shift_w();
    let gamma_prod = whittaker_mellin_rhs(&params, w)?;
    let e_coeff = spec.coeff_exponent();
    let theta = theta_coeffs(&spec.form, &spec.poly, m_cut)?;

    let mut acc = KahanComplex::new();
    let mut g = vec![0.0; m_cut + 1];
    let four_pi = 4.0 * std::f64::consts::PI;
    for m in 1..=m_cut {
        let r = theta.r[m];
        if r == 0.0 {
            continue;
        }
        let c = table.values[m];
        g[m] = (r * c.norm()).abs();
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let ln_m = (m as f64).ln();
        let factor = (-e_coeff * ln_m).exp() * (-w * (four_pi * m as f64).ln()).exp();
        acc.add(r * c * factor);
    }
    let e_total = e_coeff.re + w.re;
    let tail_raw = tail_from_growth(&g, m_cut, e_total)?;
    Ok(MellinValue {
        value: gamma_prod * acc.value(),
        tail_bound: tail_raw * gamma_prod.norm() * four_pi.powf(-w.re),
    })
}

/// Numeric route: the same truncated sum with each y-integral
/// ∫₀^∞ e^{−2πmy}·W_{κ,ν}(4πmy)·y^{w−1} dy evaluated by adaptive
/// quadrature (cached per distinct lattice value) and the lattice summed
/// point by point, so spherical-weight cancellations happen numerically.
pub fn constant_coeff_mellin_numeric(
    spec: &MellinSpec,
    table: &CoeffTable,
    m_cut: usize,
    cfg: &QuadratureConfig,
) -> Result<MellinValue> {
    spec.validate()?;
    check_truncation(table, m_cut)?;
    let params = WhittakerParams::new(spec.kappa, spec.nu)?;
    let w = spec.shift_w();
    if w.re <= 0.5 + spec.nu.re.abs() {
        return Err(Error::Domain(format!(
            "y-integral requires Re(w) > 1/2 + |Re ν|, got Re(w) = {}",
            w.re
        )));
    }
    let e_coeff = spec.coeff_exponent();
    let four_pi = 4.0 * std::f64::consts::PI;
    let t_radius = cfg.truncation_radius.clamp(40.0, 700.0);

    let mut integrals: BTreeMap<i64, Complex64> = BTreeMap::new();
    let mut err: Option<Error> = None;
    let mut acc = KahanComplex::new();
    enumerate_visit(&spec.form, m_cut as i64, |a, val| {
        if val == 0 || err.is_some() {
            return;
        }
        let p = spec.poly.eval(a);
        if *p.numer() == 0 {
            return;
        }
        let c = table.values[val as usize];
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let integral = match integrals.get(&val) {
            Some(&v) => v,
            None => {
                let mf = val as f64;
                let y_up = t_radius / (four_pi * mf);
                let res = integrate(
                    |y| {
                        if y <= 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        let ww = match whittaker_w_cfg(&params, four_pi * mf * y, cfg) {
                            Ok(v) => v,
                            Err(_) => Complex64::new(f64::NAN, f64::NAN),
                        };
                        (-2.0 * std::f64::consts::PI * mf * y).exp()
                            * ww
                            * ((w - 1.0) * y.ln()).exp()
                    },
                    0.0,
                    y_up,
                    cfg,
                );
                match res {
                    Ok(v) => {
                        integrals.insert(val, v);
                        v
                    }
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                }
            }
        };
        let pf = *p.numer() as f64 / *p.denom() as f64;
        let factor = (-e_coeff * (val as f64).ln()).exp();
        acc.add(c * integral * pf * factor);
    })?;
    if let Some(e) = err {
        return Err(e);
    }

    // Tail estimate shared with the closed route: the integrals are the
    // Gamma product up to quadrature tolerance.
    let gamma_prod = whittaker_mellin_rhs(&params, w)?;
    let theta = theta_coeffs(&spec.form, &spec.poly, m_cut)?;
    let mut g = vec![0.0; m_cut + 1];
    for m in 1..=m_cut {
        g[m] = (theta.r[m] * table.values[m].norm()).abs();
    }
    let tail_raw = tail_from_growth(&g, m_cut, e_coeff.re + w.re)?;
    Ok(MellinValue {
        value: acc.value(),
        tail_bound: tail_raw * gamma_prod.norm() * four_pi.powf(-w.re),
    })
}

/// Both candidate normalizations of the symmetric-square ratio
/// 2·L(2u, Sym²)/ζ(4u) at u = s + 1/2 − shift, for shift = (n−2)/2 and
/// (n−1)/2, evaluated by independent truncated sums (the symmetric-square
/// coefficients from the Satake lift, the denominator by direct zeta
/// summation). Returned side by side so callers can record which one the
/// Gamma-product route matches.
pub fn sym_square_partial(
    rep: &RepDescriptor,
    s: Complex64,
    m_cut: usize,
) -> Result<(Complex64, Complex64)> {
    if rep.degree != 2 {
        return Err(Error::Precondition(format!(
            "symmetric-square ratio expects a degree-2 representation, got degree {}",
            rep.degree
        )));
    }
    if m_cut < 2 {
        return Err(Error::Precondition(format!(
            "truncation {m_cut} leaves nothing to sum"
        )));
    }
    let sym2 = sym_power_rep(rep, 2)?;
    let table = coeff_from_satake(&sym2, m_cut)?;
    let theta = growth_exponent(&table);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (slot, shift) in [(0usize, 0.0f64), (1, 0.5)] {
        let u = s + 0.5 - shift;
        if 2.0 * u.re <= 1.0 + theta || 4.0 * u.re <= 1.0 {
            return Err(Error::Domain(format!(
                "ratio at shift {shift} outside both convergence half-planes: u = {u}"
            )));
        }
        let mut num = KahanComplex::new();
        let mut den = KahanComplex::new();
        for m in 1..=m_cut {
            let ln_m = (m as f64).ln();
            num.add(table.values[m] * (-2.0 * u * ln_m).exp());
            den.add((-4.0 * u * ln_m).exp());
        }
        out[slot] = 2.0 * num.value() / den.value();
    }
    Ok((out[0], out[1]))
}

/// Truncated Dirichlet series D(s) = Σ_{0 < f(a) ≤ m_cut} p(a)·c(f(a))·
/// |f(a)|^{−s}, evaluated through theta coefficients as
/// Σ_m r_{f,p}(m)·c(m)·m^{−s}, with the empirical tail bound.
pub fn dirichlet_series_d(
    table: &CoeffTable,
    form: &QuadraticForm,
    poly: &SphericalPoly,
    s: Complex64,
    m_cut: usize,
) -> Result<MellinValue> {
    check_truncation(table, m_cut)?;
    let theta = theta_coeffs(form, poly, m_cut)?;
    let mut acc = KahanComplex::new();
    let mut g = vec![0.0; m_cut + 1];
    for m in 1..=m_cut {
        let r = theta.r[m];
        if r == 0.0 {
            continue;
        }
        let c = table.values[m];
        g[m] = (r * c.norm()).abs();
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc.add(r * c * (-s * (m as f64).ln()).exp());
    }
    let tail_bound = tail_from_growth(&g, m_cut, s.re)?;
    Ok(MellinValue {
        value: acc.value(),
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::delta_coefficients;
    use approx::assert_relative_eq;
    use num_rational::Rational64;
    use std::sync::Arc;

    fn delta_spec(s: Complex64, kappa: Complex64, nu: Complex64, bound: usize) -> (MellinSpec, CoeffTable) {
        let table = delta_coefficients(bound).unwrap();
        let rep = RepDescriptor::delta(Arc::new(table.clone()));
        let spec = MellinSpec {
            rep,
            form: QuadraticForm::square(),
            poly: SphericalPoly::constant_one(1),
            kappa,
            nu,
            s,
        };
        (spec, table)
    }

    fn one_term_table() -> CoeffTable {
        let mut t = delta_coefficients(4).unwrap();
        for m in 2..=t.bound {
            t.values[m] = Complex64::new(0.0, 0.0);
        }
        t.values[1] = Complex64::new(1.0, 0.0);
        t
    }

    #[test]
    fn closed_route_matches_frozen_value() {
        let (spec, table) = delta_spec(
            Complex64::new(3.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            2000,
        );
        let got = constant_coeff_mellin_closed(&spec, &table, 2000).unwrap();
        assert_relative_eq!(got.value.re, 2.36748204629422081e-3, max_relative = 1e-12);
        assert!(got.value.im.abs() < 1e-18);
        assert!(got.tail_bound < 1e-8, "tail bound {}", got.tail_bound);
    }

    #[test]
    fn numeric_route_agrees_with_closed_route() {
        // Grid over archimedean parameters and s; both routes truncate
        // identically, so the comparison isolates the quadrature.
        let cfg = QuadratureConfig::default();
        for &(kap, nu) in &[
            (Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)),
            (Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)),
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5)),
        ] {
            for &sv in &[2.0, 3.0, 4.5] {
                let (spec, table) = delta_spec(Complex64::new(sv, 0.0), kap, nu, 60);
                let closed = constant_coeff_mellin_closed(&spec, &table, 60).unwrap();
                let numeric = constant_coeff_mellin_numeric(&spec, &table, 60, &cfg).unwrap();
                let rel = (closed.value - numeric.value).norm() / closed.value.norm();
                assert!(
                    rel <= 1e-6,
                    "(κ,ν,s) = ({kap},{nu},{sv}): closed {} vs numeric {} rel {rel:.3e}",
                    closed.value,
                    numeric.value
                );
            }
        }
    }

    #[test]
    fn single_term_reduces_to_whittaker_transform() {
        let table = one_term_table();
        let rep = RepDescriptor::delta(Arc::new(delta_coefficients(4).unwrap()));
        let spec = MellinSpec {
            rep,
            form: QuadraticForm::square(),
            poly: SphericalPoly::constant_one(1),
            kappa: Complex64::new(0.0, 0.0),
            nu: Complex64::new(0.3, 0.0),
            s: Complex64::new(2.5, 0.0),
        };
        let w = spec.shift_w();
        let params = WhittakerParams::new(spec.kappa, spec.nu).unwrap();
        let expected = 2.0
            * (-w * (4.0 * std::f64::consts::PI).ln()).exp()
            * whittaker_mellin_rhs(&params, w).unwrap();
        let cfg = QuadratureConfig::default();
        let numeric = constant_coeff_mellin_numeric(&spec, &table, 1, &cfg).unwrap();
        let closed = constant_coeff_mellin_closed(&spec, &table, 1).unwrap();
        assert!((closed.value - expected).norm() <= 1e-14 * expected.norm());
        assert!(
            (numeric.value - expected).norm() <= 1e-8 * expected.norm(),
            "numeric {} vs {}",
            numeric.value,
            expected
        );
    }

    #[test]
    fn shift_in_s_is_the_gamma_recursion() {
        // On a single-term table the s → s+1 ratio of closed values is
        // (4π)^{−1}·(1/2+w+ν)(1/2+w−ν)/(1+w−κ), the Γ(z+1) = zΓ(z)
        // recursion applied to all three factors.
        let table = one_term_table();
        let rep = RepDescriptor::delta(Arc::new(delta_coefficients(4).unwrap()));
        let kappa = Complex64::new(0.5, 0.0);
        let nu = Complex64::new(0.0, 0.4);
        let mk = |sv: f64| MellinSpec {
            rep: rep.clone(),
            form: QuadraticForm::square(),
            poly: SphericalPoly::constant_one(1),
            kappa,
            nu,
            s: Complex64::new(sv, 0.0),
        };
        let lo = mk(2.0);
        let hi = mk(3.0);
        let w = lo.shift_w();
        let v_lo = constant_coeff_mellin_closed(&lo, &table, 1).unwrap().value;
        let v_hi = constant_coeff_mellin_closed(&hi, &table, 1).unwrap().value;
        let predicted = (0.5 + w + nu) * (0.5 + w - nu) / (1.0 + w - kappa)
            / (4.0 * std::f64::consts::PI);
        assert!(
            (v_hi / v_lo - predicted).norm() <= 1e-12 * predicted.norm(),
            "ratio {} vs {}",
            v_hi / v_lo,
            predicted
        );
    }

    #[test]
    fn odd_spherical_weight_vanishes() {
        // p(a) = a against the even form a²: theta coefficients cancel
        // exactly, so the closed route is an empty sum.
        let (mut spec, table) = delta_spec(
            Complex64::new(3.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            500,
        );
        spec.poly = SphericalPoly::new(1, vec![(vec![1], Rational64::new(1, 1))]).unwrap();
        let closed = constant_coeff_mellin_closed(&spec, &table, 500).unwrap();
        assert_eq!(closed.value, Complex64::new(0.0, 0.0));
        assert_eq!(closed.tail_bound, 0.0);
    }

    #[test]
    fn harmonic_weight_cancels_through_the_quadrature() {
        // p = a² − b² is harmonic for a² + b²; the numeric route sums
        // lattice points individually, so the cancellation is numerical.
        let table = delta_coefficients(400).unwrap();
        let rep = RepDescriptor::delta(Arc::new(table.clone()));
        let spec = MellinSpec {
            rep,
            form: QuadraticForm::from_upper_two_a(2, &[2, 0, 2]).unwrap(),
            poly: SphericalPoly::new(
                2,
                vec![
                    (vec![2, 0], Rational64::new(1, 1)),
                    (vec![0, 2], Rational64::new(-1, 1)),
                ],
            )
            .unwrap(),
            kappa: Complex64::new(0.5, 0.0),
            nu: Complex64::new(0.0, 0.0),
            s: Complex64::new(3.0, 0.0),
        };
        let cfg = QuadratureConfig::default();
        let numeric = constant_coeff_mellin_numeric(&spec, &table, 400, &cfg).unwrap();
        assert!(numeric.value.norm() <= 1e-10, "got {}", numeric.value);
    }

    #[test]
    fn nu_zero_squares_the_numerator_factor() {
        let (spec, _) = delta_spec(
            Complex64::new(3.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            10,
        );
        let w = spec.shift_w();
        let params = WhittakerParams::new(spec.kappa, spec.nu).unwrap();
        let g = whittaker_mellin_rhs(&params, w).unwrap();
        let gm = crate::special::gamma(0.5 + w);
        let expected = gm * gm / crate::special::gamma(1.0 + w - spec.kappa);
        assert!((g - expected).norm() <= 1e-14 * expected.norm());
    }

    #[test]
    fn sym_square_ratios_match_frozen_routes() {
        let table = delta_coefficients(2000).unwrap();
        let rep = RepDescriptor::delta(Arc::new(table.clone()));
        let (r_nm2, r_nm1) = sym_square_partial(&rep, Complex64::new(6.0, 0.0), 40).unwrap();
        assert_relative_eq!(r_nm2.re, 1.99982372538539743, max_relative = 1e-12);
        assert_relative_eq!(r_nm1.re, 1.99964665768060246, max_relative = 1e-12);
        // The lattice route 2·Σ c(a²) a^{−2(s+1/2)} picks out the
        // (n−2)/2 normalization.
        let mut lattice = Complex64::new(0.0, 0.0);
        for a in 1..=44usize {
            lattice += 2.0 * table.values[a * a] * (a as f64).powf(-13.0);
        }
        assert!(
            (lattice - r_nm2).norm() <= 1e-12,
            "lattice {} vs ratio {}",
            lattice,
            r_nm2
        );
        assert!((lattice - r_nm1).norm() > 1e-5);
    }

    #[test]
    fn sym_square_denominator_is_zeta() {
        // ζ(26) by the internal summation: compare against the frozen
        // independent evaluation.
        let mut den = 0.0f64;
        for m in 1..=40usize {
            den += (m as f64).powf(-26.0);
        }
        assert_relative_eq!(den, 1.00000001490155488, max_relative = 1e-8);
    }

    #[test]
    fn sym_square_truncation_is_within_tail() {
        let table = delta_coefficients(200).unwrap();
        let rep = RepDescriptor::delta(Arc::new(table));
        let s = Complex64::new(6.0, 0.0);
        let (a40, _) = sym_square_partial(&rep, s, 40).unwrap();
        let (a80, _) = sym_square_partial(&rep, s, 80).unwrap();
        // Tail at u = 6.5: terms decay like m^{−13}, so doubling the cut
        // moves the ratio by far less than 40^{−12}.
        assert!((a80 - a40).norm() <= 40.0_f64.powf(-11.0));
    }

    #[test]
    fn sym_square_rejects_divergent_s() {
        let table = delta_coefficients(50).unwrap();
        let rep = RepDescriptor::delta(Arc::new(table));
        assert!(matches!(
            sym_square_partial(&rep, Complex64::new(0.0, 0.0), 50),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn dirichlet_series_divisor_anchor() {
        // All-Satake-one coefficients are the divisor function; f = x²
        // gives 2·Σ d(a²) a^{−2s}; at s = 3 the frozen oracle value.
        let rep = RepDescriptor::formal_ones(2);
        let table = coeff_from_satake(&rep, 40_000).unwrap();
        let form = QuadraticForm::square();
        let poly = SphericalPoly::constant_one(1);
        let v = dirichlet_series_d(&table, &form, &poly, Complex64::new(3.0, 0.0), 40_000).unwrap();
        assert!(
            (v.value.re - 2.10535539600255017).abs() <= 1e-10,
            "got {}",
            v.value
        );
    }

    #[test]
    fn dirichlet_series_dual_path_agreement() {
        // Theta route vs direct lattice enumeration, Δ against a² + b².
        let table = delta_coefficients(4000).unwrap();
        let form = QuadraticForm::from_upper_two_a(2, &[2, 0, 2]).unwrap();
        let poly = SphericalPoly::constant_one(2);
        let s = Complex64::new(2.5, 0.0);
        let v = dirichlet_series_d(&table, &form, &poly, s, 4000).unwrap();
        assert_relative_eq!(v.value.re, 3.62136394292776220, max_relative = 1e-13);
        let mut lattice = KahanComplex::new();
        enumerate_visit(&form, 4000, |_, val| {
            if val > 0 {
                lattice.add(table.values[val as usize] * (-s * (val as f64).ln()).exp());
            }
        })
        .unwrap();
        assert!(
            (lattice.value() - v.value).norm() <= 1e-12,
            "lattice {} vs theta {}",
            lattice.value(),
            v.value
        );
    }

    #[test]
    fn dirichlet_series_rejects_uncovered_truncation() {
        let table = delta_coefficients(100).unwrap();
        let form = QuadraticForm::square();
        let poly = SphericalPoly::constant_one(1);
        assert!(matches!(
            dirichlet_series_d(&table, &form, &poly, Complex64::new(3.0, 0.0), 200),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn spec_validation_catches_mismatches() {
        let (mut spec, _) = delta_spec(
            Complex64::new(3.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            10,
        );
        spec.poly = SphericalPoly::constant_one(2);
        assert!(matches!(spec.validate(), Err(Error::Precondition(_))));
        let (mut deep, _) = delta_spec(
            Complex64::new(-3.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            10,
        );
        deep.poly = SphericalPoly::constant_one(1);
        assert!(matches!(deep.validate(), Err(Error::Domain(_))));
    }
}
