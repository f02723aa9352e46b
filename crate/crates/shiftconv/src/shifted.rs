//! Shifted convolution sums and the Fourier-coefficient-extraction
//! identities behind their integral presentations.
//!
//! Three evaluation routes are implemented for the quadratic-form sum
//! Σ_a p(a)·c(f(a)+α)·|f(a)+α|^{−1/2}·W((f(a)+α)/Y): direct lattice
//! enumeration, resummation through theta coefficients, and extraction of
//! a Fourier coefficient of a product of two unit-interval series by
//! equidistant sampling (exact below the alias bound). The linear sum
//! over l₁γ₁ − l₂γ₂ = α is evaluated by a congruence scan. A least-squares
//! fit in (log Y, log |S|) supports growth-exponent experiments.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::arith::CoeffTable;
use crate::error::{Error, Result};
use crate::kahan::{KahanComplex, KahanSum};
use crate::quadforms::{enumerate_visit, QuadraticForm, SphericalPoly, ThetaCoeffs};

/// Smooth weights below this value are treated as zero when deciding
/// which terms of a sum to include.
pub const WEIGHT_FLOOR: f64 = 1.0e-12;

/// Half-width, in units of `width`, of the logarithmic interval on which
/// a Gaussian bump is treated as supported. Chosen slightly above
/// √(2·ln(1/WEIGHT_FLOOR)) ≈ 7.4338, so the value filter — not the
/// interval — decides inclusion.
const GAUSSIAN_SUPPORT_RADIUS: f64 = 7.434;

/// Fraction of the logarithmic half-support occupied by each smooth ramp
/// of the compact plateau.
const RAMP_FRACTION: f64 = 0.25;

/// Shape family of a smooth positive weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFamily {
    /// exp(−(log(y/center))² / (2·width²)); positive everywhere.
    GaussianBump,
    /// Plateau supported in [center/2, 2·center], normalized to unit mass
    /// against dy/y.
    CompactBump,
}

/// Smooth weight on (0, ∞) with bounded derivatives; evaluates to 0 for
/// y ≤ 0 so that sums over shifted values need no sign bookkeeping.
#[derive(Debug, Clone)]
pub struct WeightFn {
    pub family: WeightFamily,
    /// Logarithmic center of the bump.
    pub center: f64,
    /// Logarithmic width (Gaussian family; unused by the compact family).
    pub width: f64,
    /// Divisor making the compact plateau have unit dy/y mass (1 for the
    /// Gaussian family, which is left unnormalized).
    plateau_norm: f64,
}

/// The smooth ramp r(x) = e^{−1/x} / (e^{−1/x} + e^{−1/(1−x)}), extended
/// by 0 for x ≤ 0 and 1 for x ≥ 1; all derivatives vanish at both ends.
fn ramp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

impl WeightFn {
    /// Gaussian bump with the given logarithmic center and width.
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) || !(width > 0.0 && width.is_finite()) {
            return Err(Error::Precondition(format!(
                "gaussian bump needs positive finite center and width, got ({center}, {width})"
            )));
        }
        Ok(WeightFn {
            family: WeightFamily::GaussianBump,
            center,
            width,
            plateau_norm: 1.0,
        })
    }

    /// Compact plateau bump supported in [center/2, 2·center].
    pub fn compact(center: f64) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) {
            return Err(Error::Precondition(format!(
                "compact bump needs a positive finite center, got {center}"
            )));
        }
        // In u = log₂(y/center) the profile is ramp((1−|u|)/RAMP_FRACTION).
        // Its dy/y mass is ln 2·∫_{−1}^{1}: the plateau contributes
        // 2·(1−RAMP_FRACTION) and each ramp RAMP_FRACTION·∫₀¹ r = RAMP_FRACTION/2
        // by the symmetry r(x) + r(1−x) = 1.
        let plateau_norm = LN_2 * (2.0 - RAMP_FRACTION);
        Ok(WeightFn {
            family: WeightFamily::CompactBump,
            center,
            width: 1.0,
            plateau_norm,
        })
    }

    /// Pointwise value; 0 for y ≤ 0.
    pub fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self.family {
            WeightFamily::GaussianBump => {
                let t = (y / self.center).ln() / self.width;
                (-0.5 * t * t).exp()
            }
            WeightFamily::CompactBump => {
                let u = (y / self.center).ln() / LN_2;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    ramp((1.0 - u.abs()) / RAMP_FRACTION) / self.plateau_norm
                }
            }
        }
    }

    /// Value used by summation kernels: the Gaussian family is clipped at
    /// [`WEIGHT_FLOOR`] so sums have finite, reproducible support; the
    /// compact family needs no clipping.
    pub fn effective(&self, y: f64) -> f64 {
        let v = self.eval(y);
        match self.family {
            WeightFamily::GaussianBump if v < WEIGHT_FLOOR => 0.0,
            _ => v,
        }
    }

    /// Interval outside which [`effective`] vanishes.
    ///
    /// [`effective`]: WeightFn::effective
    pub fn support(&self) -> (f64, f64) {
        match self.family {
            WeightFamily::GaussianBump => {
                let r = GAUSSIAN_SUPPORT_RADIUS * self.width;
                (self.center * (-r).exp(), self.center * r.exp())
            }
            WeightFamily::CompactBump => (self.center / 2.0, 2.0 * self.center),
        }
    }
}

fn rational_to_f64(v: num_rational::Rational64) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// Largest shifted value m with nonzero weight W(m/Y), i.e. the coverage
/// the coefficient table must provide.
fn support_ceiling(weight: &WeightFn, big_y: f64) -> i64 {
    let (_, hi) = weight.support();
    (big_y * hi).floor() as i64
}

fn validate_sum_args(alpha: i64, big_y: f64) -> Result<()> {
    if alpha == 0 {
        return Err(Error::Precondition("shift α must be nonzero".into()));
    }
    if !(big_y > 0.0 && big_y.is_finite()) {
        return Err(Error::Precondition(format!(
            "scale Y must be positive and finite, got {big_y}"
        )));
    }
    Ok(())
}

/// Shifted convolution sum over a lattice:
/// Σ_a p(a)·c(f(a)+α)·|f(a)+α|^{−1/2}·W((f(a)+α)/Y), with terms at
/// f(a)+α = 0 skipped and nonpositive shifted values weighted 0.
pub fn quad_shift_sum(
    table: &CoeffTable,
    form: &QuadraticForm,
    poly: &SphericalPoly,
    alpha: i64,
    big_y: f64,
    weight: &WeightFn,
) -> Result<Complex64> {
    validate_sum_args(alpha, big_y)?;
    if poly.k != form.k {
        return Err(Error::Precondition(format!(
            "polynomial in {} variables paired with a {}-variable form",
            poly.k, form.k
        )));
    }
    let v_max = support_ceiling(weight, big_y);
    if v_max > table.bound as i64 {
        return Err(Error::Coverage(format!(
            "weight support reaches shifted value {v_max}, beyond table bound {}",
            table.bound
        )));
    }
    let m_max = v_max - alpha;
    let mut acc = KahanComplex::new();
    if m_max >= 0 {
        enumerate_visit(form, m_max, |a, val| {
            let v = val + alpha;
            if v <= 0 {
                return;
            }
            let w = weight.effective(v as f64 / big_y);
            if w == 0.0 {
                return;
            }
            let p = rational_to_f64(poly.eval(a));
            if p == 0.0 {
                return;
            }
            let c = table.values[v as usize];
            acc.add(c * (p * w / (v as f64).sqrt()));
        })?;
    }
    Ok(acc.value())
}

/// The same sum resummed through theta coefficients:
/// Σ_m r(m)·c(m+α)·|m+α|^{−1/2}·W((m+α)/Y). Agrees with
/// [`quad_shift_sum`] to machine precision when `theta` was built from
/// the same (form, poly) pair.
pub fn quad_shift_sum_via_theta(
    table: &CoeffTable,
    theta: &ThetaCoeffs,
    alpha: i64,
    big_y: f64,
    weight: &WeightFn,
) -> Result<Complex64> {
    validate_sum_args(alpha, big_y)?;
    let v_max = support_ceiling(weight, big_y);
    if v_max > table.bound as i64 {
        return Err(Error::Coverage(format!(
            "weight support reaches shifted value {v_max}, beyond table bound {}",
            table.bound
        )));
    }
    let m_max = v_max - alpha;
    if m_max > theta.bound as i64 {
        return Err(Error::Coverage(format!(
            "weight support needs theta coefficients to {m_max}, beyond bound {}",
            theta.bound
        )));
    }
    let mut acc = KahanComplex::new();
    for m in 0..=m_max.max(-1) {
        let r = theta.r[m as usize];
        if r == 0.0 {
            continue;
        }
        let v = m + alpha;
        if v <= 0 {
            continue;
        }
        let w = weight.effective(v as f64 / big_y);
        if w == 0.0 {
            continue;
        }
        let c = table.values[v as usize];
        acc.add(c * (r * w / (v as f64).sqrt()));
    }
    Ok(acc.value())
}

/// Result of a linear-progression shifted sum.
#[derive(Debug, Clone)]
pub struct LinearShiftSum {
    pub value: Complex64,
    /// Number of pairs (γ₁, γ₂) with nonzero weight product.
    pub term_count: u64,
    /// True when the coprimality hypothesis gcd(l_i, α) = 1 fails for
    /// some i; recorded but not enforced.
    pub hypothesis_violated: bool,
}

/// Pairs (γ₁, γ₂) of positive integers with l₁γ₁ − l₂γ₂ = α and
/// γ₁ ≤ gamma1_max, in increasing γ₁ order. This constraint set is
/// invariant under (l₁, l₂, α) ↦ (t·l₁, t·l₂, t·α).
pub fn constraint_pairs(l1: i64, l2: i64, alpha: i64, gamma1_max: i64) -> Result<Vec<(i64, i64)>> {
    if l1 < 1 || l2 < 1 {
        return Err(Error::Precondition(format!(
            "progression moduli must be positive, got ({l1}, {l2})"
        )));
    }
    if alpha == 0 {
        return Err(Error::Precondition("shift α must be nonzero".into()));
    }
    let mut pairs = Vec::new();
    for g1 in 1..=gamma1_max.max(0) {
        let num = l1 * g1 - alpha;
        if num > 0 && num % l2 == 0 {
            pairs.push((g1, num / l2));
        }
    }
    Ok(pairs)
}

/// Linear shifted convolution sum
/// Σ_{l₁γ₁ − l₂γ₂ = α} c_A(γ₁)·conj(c_B(γ₂))·(γ₁γ₂)^{−1/2}
///   ·W₁(γ₁l₁/Y)·W₂(γ₂l₂/Y),
/// evaluated by scanning γ₁ over the support of W₁ and solving the
/// congruence for γ₂.
pub fn linear_shift_sum(
    table_a: &CoeffTable,
    table_b: &CoeffTable,
    l1: i64,
    l2: i64,
    alpha: i64,
    big_y: f64,
    w1: &WeightFn,
    w2: &WeightFn,
) -> Result<LinearShiftSum> {
    validate_sum_args(alpha, big_y)?;
    let g1_max = support_ceiling(w1, big_y) / l1;
    let g2_max = support_ceiling(w2, big_y) / l2;
    if g1_max > table_a.bound as i64 {
        return Err(Error::Coverage(format!(
            "W₁ support needs γ₁ up to {g1_max}, beyond table bound {}",
            table_a.bound
        )));
    }
    if g2_max > table_b.bound as i64 {
        return Err(Error::Coverage(format!(
            "W₂ support needs γ₂ up to {g2_max}, beyond table bound {}",
            table_b.bound
        )));
    }
    let mut acc = KahanComplex::new();
    let mut term_count = 0u64;
    for (g1, g2) in constraint_pairs(l1, l2, alpha, g1_max)? {
        let wv1 = w1.effective(g1 as f64 * l1 as f64 / big_y);
        if wv1 == 0.0 {
            continue;
        }
        let wv2 = w2.effective(g2 as f64 * l2 as f64 / big_y);
        if wv2 == 0.0 {
            continue;
        }
        let ca = table_a.values[g1 as usize];
        let cb = table_b.values[g2 as usize];
        let scale = wv1 * wv2 / ((g1 as f64) * (g2 as f64)).sqrt();
        acc.add(ca * cb.conj() * scale);
        term_count += 1;
    }
    let gcd = |mut a: i64, mut b: i64| -> i64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.abs()
    };
    Ok(LinearShiftSum {
        value: acc.value(),
        term_count,
        hypothesis_violated: gcd(l1, alpha) != 1 || gcd(l2, alpha) != 1,
    })
}

/// Truncated exponential series Σ_{|γ| ≤ truncation} a_γ·e(γx) on the
/// unit interval, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coeffs: BTreeMap<i64, Complex64>,
    truncation: i64,
}

impl FourierSeries {
    /// Empty series with the given truncation bound.
    pub fn new(truncation: i64) -> Result<Self> {
        if truncation < 0 {
            return Err(Error::Precondition(format!(
                "truncation must be nonnegative, got {truncation}"
            )));
        }
        Ok(FourierSeries {
            coeffs: BTreeMap::new(),
            truncation,
        })
    }

    /// Set the coefficient at frequency γ (dropping exact zeros).
    pub fn insert(&mut self, gamma: i64, value: Complex64) -> Result<()> {
        if gamma.abs() > self.truncation {
            return Err(Error::Precondition(format!(
                "frequency {gamma} exceeds truncation {}",
                self.truncation
            )));
        }
        if value == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&gamma);
        } else {
            self.coeffs.insert(gamma, value);
        }
        Ok(())
    }

    /// Coefficient at frequency γ (0 when absent).
    pub fn coeff(&self, gamma: i64) -> Complex64 {
        self.coeffs
            .get(&gamma)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// All stored (frequency, coefficient) pairs in frequency order.
    pub fn coeffs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&g, &c)| (g, c))
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// True when no coefficient is stored.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The truncation bound M.
    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    /// Direct evaluation Σ a_γ·e(γx).
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = KahanComplex::new();
        for (&g, &c) in &self.coeffs {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * g as f64 * x);
            acc.add(c * phase);
        }
        acc.value()
    }
}

/// Build the unit-interval series of a projected coefficient table:
/// coefficient at γ ∈ [1, M] equal to
/// c(γ)·γ^{−1/2}·exp(2πγ/Y)·W(γ/Y)·shift_factor, zero elsewhere.
///
/// The real exponential exp(2πγ/Y) is the archimedean Whittaker factor at
/// the lowered argument −i/Y; it cancels numerically against the
/// exp(−2πm/Y) decay of the matching theta series (see
/// [`assemble_theta_series`]). The degree n enters the underlying
/// expansion as |γ|^{−(n−1)/2} together with a global |y|-power rescale
/// of (n−2)/2, which combine to the fixed γ^{−1/2} used here; n is
/// accepted to validate that convention.
pub fn assemble_projected_series(
    table: &CoeffTable,
    n: u32,
    weight: &WeightFn,
    big_y: f64,
    truncation: i64,
    shift_factor: Complex64,
) -> Result<FourierSeries> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "projected series needs degree n ≥ 2, got {n}"
        )));
    }
    if !(big_y > 0.0 && big_y.is_finite()) {
        return Err(Error::Precondition(format!(
            "scale Y must be positive and finite, got {big_y}"
        )));
    }
    if truncation < 1 {
        return Err(Error::Precondition(format!(
            "truncation must be at least 1, got {truncation}"
        )));
    }
    if truncation > table.bound as i64 {
        return Err(Error::Coverage(format!(
            "truncation {truncation} exceeds table bound {}",
            table.bound
        )));
    }
    let mut series = FourierSeries::new(truncation)?;
    for g in 1..=truncation {
        let w = weight.effective(g as f64 / big_y);
        if w == 0.0 {
            continue;
        }
        let arch = (2.0 * PI * g as f64 / big_y).exp();
        let c = table.values[g as usize];
        series.insert(g, c * shift_factor * (w * arch / (g as f64).sqrt()))?;
    }
    Ok(series)
}

/// Series with coefficient r(m)·exp(−2πm/Y) at frequency m ∈ [0, truncation]:
/// the unit-interval restriction of a theta function at height 1/Y.
pub fn assemble_theta_series(
    theta: &ThetaCoeffs,
    big_y: f64,
    truncation: i64,
) -> Result<FourierSeries> {
    if !(big_y > 0.0 && big_y.is_finite()) {
        return Err(Error::Precondition(format!(
            "scale Y must be positive and finite, got {big_y}"
        )));
    }
    if truncation < 0 {
        return Err(Error::Precondition(format!(
            "truncation must be nonnegative, got {truncation}"
        )));
    }
    if truncation > theta.bound as i64 {
        return Err(Error::Coverage(format!(
            "truncation {truncation} exceeds theta bound {}",
            theta.bound
        )));
    }
    let mut series = FourierSeries::new(truncation)?;
    for m in 0..=truncation {
        let r = theta.r[m as usize];
        if r == 0.0 {
            continue;
        }
        let decay = (-2.0 * PI * m as f64 / big_y).exp();
        series.insert(m, Complex64::new(r * decay, 0.0))?;
    }
    Ok(series)
}

/// Extract the α-th Fourier coefficient of F·conj(G) two ways:
/// lhs = (1/N)·Σ_{j<N} F(j/N)·conj(G(j/N))·e(−αj/N) by equidistant
/// sampling (exact below the alias bound), and
/// rhs = Σ_m F(m+α)·conj(G(m)) by coefficient convolution.
pub fn fourier_unfold_check(
    f: &FourierSeries,
    g: &FourierSeries,
    alpha: i64,
    n_samples: i64,
) -> Result<(Complex64, Complex64)> {
    let alias_bound = 2 * (f.truncation + g.truncation);
    if n_samples <= alias_bound {
        return Err(Error::Precondition(format!(
            "sampling with N = {n_samples} aliases: need N > 2·(T_F + T_G) = {alias_bound}"
        )));
    }
    let n = n_samples as usize;

    // All sample phases are N-th roots of unity; index arithmetic mod N
    // avoids large-angle trigonometric error.
    let roots: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n_samples as f64))
        .collect();
    let root = |freq: i64, j: i64| -> Complex64 { roots[(freq * j).rem_euclid(n_samples) as usize] };

    let mut lhs_acc = KahanComplex::new();
    for j in 0..n_samples {
        let mut fj = KahanComplex::new();
        for (gamma, c) in f.coeffs() {
            fj.add(c * root(gamma, j));
        }
        let mut gj = KahanComplex::new();
        for (gamma, c) in g.coeffs() {
            gj.add(c * root(gamma, j));
        }
        lhs_acc.add(fj.value() * gj.value().conj() * root(-alpha, j));
    }
    let lhs = lhs_acc.value() / n_samples as f64;

    let mut rhs_acc = KahanComplex::new();
    for (m, gm) in g.coeffs() {
        let fm = f.coeff(m + alpha);
        if fm != Complex64::new(0.0, 0.0) {
            rhs_acc.add(fm * gm.conj());
        }
    }
    Ok((lhs, rhs_acc.value()))
}

/// Least-squares line through (log Y, log |S|).
#[derive(Debug, Clone, Copy)]
pub struct GrowthFit {
    /// Fitted growth exponent.
    pub slope: f64,
    /// Intercept in log coordinates.
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Fit |S(Y)| ≈ e^intercept·Y^slope from measured points (Y, |S(Y)|).
/// Needs at least 4 points with strictly increasing Y and all |S| > 0.
pub fn growth_fit(points: &[(f64, f64)]) -> Result<GrowthFit> {
    if points.len() < 4 {
        return Err(Error::Precondition(format!(
            "growth fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    for win in points.windows(2) {
        if !(win[1].0 > win[0].0) {
            return Err(Error::Precondition(
                "growth fit needs strictly increasing Y values".into(),
            ));
        }
    }
    if points.iter().any(|&(y, s)| !(y > 0.0) || !(s > 0.0)) {
        return Err(Error::Precondition(
            "growth fit needs positive Y and |S| values".into(),
        ));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(y, s)| (y.ln(), s.ln())).collect();
    let mut sx = KahanSum::new();
    let mut sy = KahanSum::new();
    for &(x, y) in &logs {
        sx.add(x);
        sy.add(y);
    }
    let mx = sx.value() / n;
    let my = sy.value() / n;
    let mut sxx = KahanSum::new();
    let mut sxy = KahanSum::new();
    for &(x, y) in &logs {
        sxx.add((x - mx) * (x - mx));
        sxy.add((x - mx) * (y - my));
    }
    if sxx.value() == 0.0 {
        return Err(Error::Precondition(
            "growth fit is degenerate: all Y values coincide in log scale".into(),
        ));
    }
    let slope = sxy.value() / sxx.value();
    let intercept = my - slope * mx;
    let mut srr = KahanSum::new();
    for &(x, y) in &logs {
        let r = y - (intercept + slope * x);
        srr.add(r * r);
    }
    Ok(GrowthFit {
        slope,
        intercept,
        residual: (srr.value() / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::delta_coefficients;
    use crate::quadforms::theta_coeffs;
    use crate::quadrature::{integrate_real, QuadratureConfig};
    use approx::assert_relative_eq;

    fn delta300() -> CoeffTable {
        delta_coefficients(300).unwrap()
    }

    #[test]
    fn gaussian_bump_shape() {
        let w = WeightFn::gaussian(2.0, 0.5).unwrap();
        assert_eq!(w.eval(2.0), 1.0);
        // Symmetric in log y around the center.
        assert_relative_eq!(w.eval(4.0), w.eval(1.0), max_relative = 1e-14);
        assert_eq!(w.eval(0.0), 0.0);
        assert_eq!(w.eval(-3.0), 0.0);
        // The effective value is clipped below the floor...
        let (lo, hi) = w.support();
        assert_eq!(w.effective(hi * 1.01), 0.0);
        assert_eq!(w.effective(lo * 0.99), 0.0);
        // ...but the raw value is still positive there.
        assert!(w.eval(hi * 1.01) > 0.0);
    }

    #[test]
    fn compact_bump_support_and_unit_mass() {
        let w = WeightFn::compact(3.0).unwrap();
        assert_eq!(w.eval(1.5), 0.0);
        assert_eq!(w.eval(6.0), 0.0);
        assert!(w.eval(3.0) > 0.0);
        // Plateau value: the profile is exactly 1/norm on the inner part.
        assert_relative_eq!(w.eval(3.0), 1.0 / (LN_2 * 1.75), max_relative = 1e-14);
        // Unit mass against dy/y.
        let cfg = QuadratureConfig::default();
        let mass = integrate_real(|y| w.eval(y) / y, 1.5, 6.0, &cfg).unwrap();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn weight_constructors_reject_bad_parameters() {
        assert!(WeightFn::gaussian(0.0, 1.0).is_err());
        assert!(WeightFn::gaussian(1.0, -1.0).is_err());
        assert!(WeightFn::compact(-2.0).is_err());
    }

    #[test]
    fn quad_sum_empty_support_is_zero() {
        // Support (0.1, 0.4) contains no positive integer shifted value.
        let t = delta300();
        let w = WeightFn::compact(1.0).unwrap();
        let s = quad_shift_sum(
            &t,
            &QuadraticForm::square(),
            &SphericalPoly::constant_one(1),
            1,
            0.2,
            &w,
        )
        .unwrap();
        assert_eq!(s, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quad_sum_odd_weight_cancels() {
        // p(a) = a is odd while f(a) = a² is even: terms at ±a cancel.
        // Compensated summation visits −a and +a non-adjacently, so the
        // cancellation is exact only up to the last bit of the largest
        // partial sum.
        let t = delta300();
        let w = WeightFn::compact(1.0).unwrap();
        let p_odd = SphericalPoly::new(1, vec![(vec![1], num_rational::Rational64::new(1, 1))])
            .unwrap();
        let s = quad_shift_sum(&t, &QuadraticForm::square(), &p_odd, 1, 100.0, &w).unwrap();
        assert!(s.norm() < 1e-15, "odd-weight sum {s} not at roundoff level");
    }

    #[test]
    fn quad_sum_lattice_and_theta_routes_agree() {
        let t = delta300();
        let form = QuadraticForm::from_upper_two_a(2, &[2, 0, 2]).unwrap();
        let poly = SphericalPoly::constant_one(2);
        let theta = theta_coeffs(&form, &poly, 300).unwrap();
        for &(alpha, y) in &[(1i64, 100.0), (2, 80.0), (-1, 60.0), (5, 40.0)] {
            let w = WeightFn::compact(1.0).unwrap();
            let direct = quad_shift_sum(&t, &form, &poly, alpha, y, &w).unwrap();
            let via = quad_shift_sum_via_theta(&t, &theta, alpha, y, &w).unwrap();
            assert!(
                (direct - via).norm() <= 1e-12 * (1.0 + direct.norm()),
                "α={alpha} Y={y}: {direct} vs {via}"
            );
        }
    }

    #[test]
    fn quad_sum_gaussian_routes_agree() {
        let t = delta300();
        let form = QuadraticForm::square();
        let poly = SphericalPoly::constant_one(1);
        let theta = theta_coeffs(&form, &poly, 300).unwrap();
        // Radius 7.434·0.5 in log y: support ⊂ (0, 41.2); Y = 7 keeps the
        // needed coverage below 289.
        let w = WeightFn::gaussian(1.0, 0.5).unwrap();
        let direct = quad_shift_sum(&t, &form, &poly, 1, 7.0, &w).unwrap();
        let via = quad_shift_sum_via_theta(&t, &theta, 1, 7.0, &w).unwrap();
        assert!((direct - via).norm() <= 1e-12 * (1.0 + direct.norm()));
        assert!(direct.norm() > 0.0);
    }

    #[test]
    fn quad_sum_reports_missing_coverage() {
        let t = delta300();
        let w = WeightFn::gaussian(1.0, 1.0).unwrap(); // support out to e^{7.434}
        let r = quad_shift_sum(
            &t,
            &QuadraticForm::square(),
            &SphericalPoly::constant_one(1),
            1,
            100.0,
            &w,
        );
        assert!(matches!(r, Err(Error::Coverage(_))));
    }

    #[test]
    fn linear_sum_matches_pair_enumeration() {
        let t = delta300();
        for &(l1, l2, alpha) in &[(1i64, 1i64, 1i64), (2, 3, 1), (3, 2, -2), (7, 10, 5)] {
            let w1 = WeightFn::compact(1.0).unwrap();
            let w2 = WeightFn::compact(0.8).unwrap();
            let y = 50.0;
            let got = linear_shift_sum(&t, &t, l1, l2, alpha, y, &w1, &w2).unwrap();
            // Brute force over all pairs below the support bounds.
            let mut want = Complex64::new(0.0, 0.0);
            let mut pairs = 0u64;
            for g1 in 1..=300i64 {
                for g2 in 1..=300i64 {
                    if l1 * g1 - l2 * g2 != alpha {
                        continue;
                    }
                    let wv1 = w1.effective(g1 as f64 * l1 as f64 / y);
                    let wv2 = w2.effective(g2 as f64 * l2 as f64 / y);
                    if wv1 == 0.0 || wv2 == 0.0 {
                        continue;
                    }
                    let term = t.values[g1 as usize] * t.values[g2 as usize].conj()
                        / ((g1 * g2) as f64).sqrt();
                    want += term * wv1 * wv2;
                    pairs += 1;
                }
            }
            assert!(
                (got.value - want).norm() <= 1e-12 * (1.0 + want.norm()),
                "(l1,l2,α)=({l1},{l2},{alpha})"
            );
            assert_eq!(got.term_count, pairs);
        }
    }

    #[test]
    fn linear_sum_disjoint_supports_is_zero() {
        let t = delta300();
        let w1 = WeightFn::compact(1.0).unwrap();
        // W₂ support (γ₂ ∈ (Y/2, 2Y) scaled) pushed far outside the range
        // induced by W₁ and the constraint γ₂ = γ₁ − 1.
        let w2 = WeightFn::compact(0.01).unwrap();
        let got = linear_shift_sum(&t, &t, 1, 1, 1, 50.0, &w1, &w2).unwrap();
        assert_eq!(got.value, Complex64::new(0.0, 0.0));
        assert_eq!(got.term_count, 0);
    }

    #[test]
    fn linear_sum_records_coprimality_hypothesis() {
        let t = delta300();
        let w = WeightFn::compact(1.0).unwrap();
        let ok = linear_shift_sum(&t, &t, 3, 5, 1, 20.0, &w, &w).unwrap();
        assert!(!ok.hypothesis_violated);
        let bad = linear_shift_sum(&t, &t, 2, 5, 4, 20.0, &w, &w).unwrap();
        assert!(bad.hypothesis_violated);
    }

    #[test]
    fn constraint_pairs_scale_invariance() {
        for &(l1, l2, alpha) in &[(1i64, 1i64, 1i64), (2, 3, 1), (4, 6, -2)] {
            let base = constraint_pairs(l1, l2, alpha, 500).unwrap();
            for t in 2..=4 {
                let scaled = constraint_pairs(t * l1, t * l2, t * alpha, 500).unwrap();
                assert_eq!(base, scaled, "t = {t}");
            }
        }
    }

    #[test]
    fn series_respects_truncation_and_eval() {
        let mut s = FourierSeries::new(3).unwrap();
        s.insert(1, Complex64::new(1.0, 0.0)).unwrap();
        s.insert(-2, Complex64::new(0.0, 0.5)).unwrap();
        assert!(s.insert(4, Complex64::new(1.0, 0.0)).is_err());
        // e(γ·0) = 1 for every frequency.
        let at0 = s.eval(0.0);
        assert_relative_eq!(at0.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(at0.im, 0.5, epsilon = 1e-15);
        // Inserting an exact zero removes the entry.
        s.insert(1, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn assembler_single_frequency_table() {
        let mut table = delta300();
        for v in table.values.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        table.values[7] = Complex64::new(1.0, 0.0);
        let w = WeightFn::compact(0.1).unwrap(); // support (0.05, 0.2)·Y = (5, 20)
        let s = assemble_projected_series(&table, 2, &w, 100.0, 200, Complex64::new(1.0, 0.0))
            .unwrap();
        assert_eq!(s.len(), 1);
        let expected = (2.0 * PI * 7.0 / 100.0).exp() * w.eval(0.07) / 7.0_f64.sqrt();
        assert_relative_eq!(s.coeff(7).re, expected, max_relative = 1e-14);
    }

    #[test]
    fn assembler_terms_match_per_term_recomputation() {
        let t = delta300();
        let w = WeightFn::compact(1.0).unwrap();
        let y = 80.0;
        let phase = Complex64::from_polar(1.0, -0.3);
        let s = assemble_projected_series(&t, 2, &w, y, 200, phase).unwrap();
        for (g, c) in s.coeffs() {
            let expect = t.values[g as usize]
                * phase
                * (w.eval(g as f64 / y) * (2.0 * PI * g as f64 / y).exp()
                    / (g as f64).sqrt());
            assert!((c - expect).norm() <= 1e-14 * expect.norm());
        }
        assert!(s.len() > 50);
    }

    #[test]
    fn unfold_trivial_single_frequency() {
        let mut f = FourierSeries::new(2).unwrap();
        f.insert(1, Complex64::new(1.0, 0.0)).unwrap();
        let g = f.clone();
        let (lhs, rhs) = fourier_unfold_check(&f, &g, 0, 16).unwrap();
        assert_relative_eq!(lhs.re, 1.0, epsilon = 1e-13);
        assert_relative_eq!(rhs.re, 1.0, epsilon = 1e-15);
        // Shift with no matching frequency pair.
        let (lhs5, rhs5) = fourier_unfold_check(&f, &g, 5, 32).unwrap();
        assert!(lhs5.norm() < 1e-13);
        assert_eq!(rhs5, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unfold_rejects_aliasing() {
        let f = FourierSeries::new(10).unwrap();
        let g = FourierSeries::new(10).unwrap();
        assert!(fourier_unfold_check(&f, &g, 1, 40).is_err());
        assert!(fourier_unfold_check(&f, &g, 1, 41).is_ok());
    }

    #[test]
    fn unfold_three_way_agreement_small() {
        // F from the projected Δ series, G from the theta series of x²;
        // the extracted coefficient equals the direct shifted sum.
        let t = delta300();
        let alpha = 1i64;
        let y = 80.0;
        let w = WeightFn::compact(1.0).unwrap();
        let shift = Complex64::new((-2.0 * PI * alpha as f64 / y).exp(), 0.0);
        let f = assemble_projected_series(&t, 2, &w, y, 200, shift).unwrap();
        let form = QuadraticForm::square();
        let poly = SphericalPoly::constant_one(1);
        let theta = theta_coeffs(&form, &poly, 200).unwrap();
        let g = assemble_theta_series(&theta, y, 200).unwrap();
        let (lhs, rhs) = fourier_unfold_check(&f, &g, alpha, 1024).unwrap();
        let direct = quad_shift_sum(&t, &form, &poly, alpha, y, &w).unwrap();
        assert!((lhs - rhs).norm() < 1e-10, "lhs {lhs} rhs {rhs}");
        assert!((rhs - direct).norm() < 1e-12, "rhs {rhs} direct {direct}");
        assert!(direct.norm() > 1e-4);
    }

    #[test]
    fn growth_fit_recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0, 10000.0, 100000.0]
            .iter()
            .map(|&y: &f64| (y, 3.0 * y.powf(0.37)))
            .collect();
        let fit = growth_fit(&pts).unwrap();
        assert_relative_eq!(fit.slope, 0.37, epsilon = 1e-10);
        assert_relative_eq!(fit.intercept, 3.0_f64.ln(), epsilon = 1e-9);
        assert!(fit.residual < 1e-12);

        let flat: Vec<(f64, f64)> = (1..=5).map(|k| (k as f64, 5.0)).collect();
        let fit0 = growth_fit(&flat).unwrap();
        assert_relative_eq!(fit0.slope, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn growth_fit_validates_input() {
        assert!(growth_fit(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err()); // too few
        assert!(growth_fit(&[(1.0, 1.0), (1.0, 1.0), (3.0, 1.0), (4.0, 1.0)]).is_err()); // not increasing
        assert!(growth_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err()); // zero |S|
    }
}
