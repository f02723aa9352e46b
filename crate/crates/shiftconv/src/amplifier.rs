//! Amplified second moment over the character group mod q, its exact
//! bookkeeping identities (Plancherel, one-term lower bound, diagonal
//! normalization), and the closed exponent algebra that turns the two
//! competing bounds into a subconvex exponent.
//!
//! Everything here is finite and exact: the moment runs over all φ(q)
//! characters of a small prime modulus, so the asymptotic inequalities
//! become checkable numeric identities at fixed q.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::arith::{all_characters, dirichlet_char, CoeffTable, DirichletChar};
use crate::error::{Error, Result};
use crate::kahan::{KahanComplex, KahanSum};
use crate::shifted::WeightFn;
use crate::special::PARAM_EPS;

type Q = Ratio<i128>;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Parameters of one amplified-moment evaluation.
#[derive(Debug, Clone)]
pub struct AmplifierSpec {
    /// Prime modulus of the twisting characters.
    pub q: u64,
    /// Index of the distinguished character χ the amplifier detects.
    pub chi_index: u64,
    /// Amplifier length: primes are drawn from [L, 2L].
    pub big_l: f64,
    /// Cutoff scale of the coefficient sums.
    pub big_y: f64,
    /// Purely imaginary spectral sample carried as the phase y^{−w}.
    pub w: Complex64,
    /// Smooth cutoff applied at y = γ/Y.
    pub weight: WeightFn,
}

impl AmplifierSpec {
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.q) {
            return Err(Error::Precondition(format!(
                "modulus must be prime, got {}",
                self.q
            )));
        }
        if !(self.big_l >= 2.0) {
            return Err(Error::Precondition(format!(
                "amplifier length must be at least 2, got {}",
                self.big_l
            )));
        }
        if self.big_l < (self.q as f64).ln() {
            return Err(Error::Precondition(format!(
                "amplifier length {} below log q = {:.4}",
                self.big_l,
                (self.q as f64).ln()
            )));
        }
        if !(self.big_y > 0.0 && self.big_y.is_finite()) {
            return Err(Error::Precondition(format!(
                "cutoff scale must be positive, got {}",
                self.big_y
            )));
        }
        if self.w.re.abs() > PARAM_EPS {
            return Err(Error::Precondition(format!(
                "spectral parameter must be purely imaginary, got {}",
                self.w
            )));
        }
        Ok(())
    }
}

/// Primes in [L, 2L] not dividing q, ascending.
pub fn amplifier_primes(big_l: f64, q: u64) -> Result<Vec<u64>> {
    if !(big_l >= 2.0) {
        return Err(Error::Precondition(format!(
            "amplifier length must be at least 2, got {big_l}"
        )));
    }
    let lo = big_l.ceil() as u64;
    let hi = (2.0 * big_l).floor() as u64;
    Ok((lo..=hi)
        .filter(|&p| is_prime(p) && q % p != 0)
        .collect())
}

/// The weighted coefficient sum 𝓛_ξ(w) = Σ_γ c(γ)·ξ(γ)·γ^{−1/2}·
/// weight(γ/Y)·(γ/Y)^{−w} over the weight's support.
pub fn script_l(table: &CoeffTable, xi: &DirichletChar, spec: &AmplifierSpec) -> Result<Complex64> {
    spec.validate()?;
    let (_, hi) = spec.weight.support();
    let gamma_max = (spec.big_y * hi).floor() as usize;
    if gamma_max > table.bound {
        return Err(Error::Coverage(format!(
            "weight support reaches {gamma_max}, table covers {}",
            table.bound
        )));
    }
    let mut acc = KahanComplex::new();
    for gamma in 1..=gamma_max {
        let y = gamma as f64 / spec.big_y;
        let wgt = spec.weight.eval(y);
        if wgt == 0.0 {
            continue;
        }
        let xi_g = xi.eval(gamma as i64);
        if xi_g == Complex64::new(0.0, 0.0) {
            continue;
        }
        let phase = (-spec.w * y.ln()).exp();
        acc.add(table.values[gamma] * xi_g * (wgt / (gamma as f64).sqrt()) * phase);
    }
    Ok(acc.value())
}

/// The amplified second moment
/// 𝒮 = Σ_ξ |Σ_{l ∈ amp} ξ(l)·χ̄(l)|²·|𝓛_ξ(w)|², summed exactly over all
/// φ(q) characters ξ mod q.
pub fn moment_s(table: &CoeffTable, spec: &AmplifierSpec) -> Result<f64> {
    spec.validate()?;
    let chi = dirichlet_char(spec.q, spec.chi_index)?;
    let amp = amplifier_primes(spec.big_l, spec.q)?;
    let mut total = KahanSum::new();
    for xi in all_characters(spec.q)? {
        let mut detect = KahanComplex::new();
        for &l in &amp {
            detect.add(xi.eval(l as i64) * chi.eval(l as i64).conj());
        }
        let weight = detect.value().norm_sqr();
        if weight == 0.0 {
            continue;
        }
        let l_xi = script_l(table, &xi, spec)?;
        total.add(weight * l_xi.norm_sqr());
    }
    Ok(total.value())
}

/// The ξ = χ term of the moment: (#amplifier)²·|𝓛_χ(w)|². Every other
/// term is a nonnegative contribution, so this is an exact lower bound
/// for [`moment_s`].
pub fn one_term_bound(table: &CoeffTable, spec: &AmplifierSpec) -> Result<f64> {
    spec.validate()?;
    let chi = dirichlet_char(spec.q, spec.chi_index)?;
    let amp = amplifier_primes(spec.big_l, spec.q)?;
    let l_chi = script_l(table, &chi, spec)?;
    Ok((amp.len() as f64).powi(2) * l_chi.norm_sqr())
}

/// Both sides of the finite Plancherel identity on (Z/q)^×:
/// Σ_ξ |Σ_x ξ(x)·χ̄(x)·A_x|² = φ(q)·Σ_x |χ̄(x)·A_x|².
pub fn plancherel_check(
    q: u64,
    chi_index: u64,
    inner_values: &BTreeMap<u64, Complex64>,
) -> Result<(f64, f64)> {
    let chi = dirichlet_char(q, chi_index)?;
    for &x in inner_values.keys() {
        if x == 0 || x >= q || gcd(x, q) != 1 {
            return Err(Error::Precondition(format!(
                "residue {x} is not a unit mod {q}"
            )));
        }
    }
    let characters = all_characters(q)?;
    let mut lhs = KahanSum::new();
    for xi in &characters {
        let mut inner = KahanComplex::new();
        for (&x, &a) in inner_values {
            inner.add(xi.eval(x as i64) * chi.eval(x as i64).conj() * a);
        }
        lhs.add(inner.value().norm_sqr());
    }
    let mut rhs = KahanSum::new();
    for (&x, &a) in inner_values {
        rhs.add((chi.eval(x as i64).conj() * a).norm_sqr());
    }
    Ok((lhs.value(), characters.len() as f64 * rhs.value()))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact diagonal of the opened second moment — the l₁γ₁ = l₂γ₂ terms,
/// with absolute values on the coefficients and the unit compact bump as
/// cutoff — divided by its claimed bound q^{1.01}/L. Since the opened
/// moment itself carries the prefactor q^{1.01}/L², the reported ratio
/// is (pair sum)/L: it stays bounded in Y (the l₁ = l₂ block is a
/// scale-invariant dyadic mean-square) and scales like 1/L.
pub fn diagonal_estimate(table: &CoeffTable, q: u64, big_l: f64, big_y: f64) -> Result<f64> {
    if !(big_y > 0.0 && big_y.is_finite()) {
        return Err(Error::Precondition(format!(
            "cutoff scale must be positive, got {big_y}"
        )));
    }
    let amp = amplifier_primes(big_l, q)?;
    if amp.is_empty() {
        return Ok(0.0);
    }
    let weight = WeightFn::compact(1.0)?;
    let (_, hi) = weight.support();
    let needed = (big_y * hi).floor() as usize;
    if needed > table.bound {
        return Err(Error::Coverage(format!(
            "diagonal terms reach coefficient index {needed}, table covers {}",
            table.bound
        )));
    }
    // l₁ = l₂ forces γ₁ = γ₂ with no further reference to l: one dyadic
    // mean-square Σ |c(γ)|²/γ·w(γ/Y)², counted once per amplifier prime.
    let mut same = KahanSum::new();
    for g in 1..=needed {
        let wgt = weight.eval(g as f64 / big_y);
        if wgt == 0.0 {
            continue;
        }
        same.add(table.values[g].norm_sqr() / g as f64 * wgt * wgt);
    }
    let mut diag = KahanSum::new();
    diag.add(amp.len() as f64 * same.value());
    for &l1 in &amp {
        for &l2 in &amp {
            if l1 == l2 {
                continue;
            }
            // Distinct primes are coprime, so l₁γ₁ = l₂γ₂ forces
            // γ₁ = l₂t, γ₂ = l₁t; both must land in the weight support.
            let t_hi = (big_y * hi / l1.max(l2) as f64).floor() as i64;
            let ll = (l1 * l2) as f64;
            for t in 1..=t_hi.max(0) {
                let w1 = weight.eval((l2 * t as u64) as f64 / big_y);
                let w2 = weight.eval((l1 * t as u64) as f64 / big_y);
                if w1 == 0.0 || w2 == 0.0 {
                    continue;
                }
                let mag = table.values[(l2 * t as u64) as usize].norm()
                    * table.values[(l1 * t as u64) as usize].norm();
                diag.add(mag / (ll.sqrt() * t as f64) * w1 * w2);
            }
        }
    }
    Ok(diag.value() / big_l)
}

/// Inputs of the exponent algebra: degree, the bound toward the
/// eigenvalue-uniformity conjecture, and the amplifier-length exponent
/// L = q^u.
#[derive(Debug, Clone, Copy)]
pub struct ExponentInput {
    pub n: u32,
    pub theta0: f64,
    pub u: f64,
    /// Optional secondary aspect exponent carried through reports;
    /// does not enter the q-aspect formulas.
    pub delta0: Option<f64>,
}

impl ExponentInput {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Precondition(format!(
                "degree must be at least 2, got {}",
                self.n
            )));
        }
        if !(0.0..=0.5).contains(&self.theta0) {
            return Err(Error::Precondition(format!(
                "theta0 must lie in [0, 1/2], got {}",
                self.theta0
            )));
        }
        if !(0.0..=1.0).contains(&self.u) {
            return Err(Error::Precondition(format!(
                "u must lie in [0, 1], got {}",
                self.u
            )));
        }
        Ok(())
    }
}

/// The two competing exponents of the squared central value under an
/// amplifier of length q^u, and their maximum:
/// e_diag = (1−u)/2, e_offdiag = (n/4)(1/2+θ₀) + u(5/2+θ₀)/2.
pub fn exponent_calculator(inp: &ExponentInput) -> Result<(f64, f64, f64)> {
    inp.validate()?;
    let e_diag = (1.0 - inp.u) / 2.0;
    let e_offdiag =
        inp.n as f64 / 4.0 * (0.5 + inp.theta0) + inp.u * (2.5 + inp.theta0) / 2.0;
    Ok((e_diag, e_offdiag, e_diag.max(e_offdiag)))
}

/// The balance point of the exponent algebra, in exact rational
/// arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct BalanceReport {
    /// Amplifier exponent equalizing the two bounds, clamped into [0, 1]:
    /// u* = [1 − (n/2)(1/2+θ₀)] / (7/2+θ₀), or 0 when that is negative.
    pub u_star: Q,
    pub e_diag: Q,
    pub e_offdiag: Q,
    /// max of the two at u*.
    pub e_final: Q,
    /// Whether the squared-value exponent at u* is strictly below the
    /// convexity benchmark n/4.
    pub beats_convexity: bool,
    /// For n = 3 only: the alternative balance value (1−6θ₀)/(14−4θ₀)
    /// whose denominator carries the opposite sign of the one solving
    /// e_diag = e_offdiag here; recorded for comparison, not asserted.
    pub alt_u: Option<Q>,
    /// Whether u* and alt_u agree within 1e−12 (None when alt_u is).
    pub matches_alt: Option<bool>,
}

/// Solve e_diag(u) = e_offdiag(u) exactly and report the resulting
/// exponents.
pub fn balance_report(n: u32, theta0: Q) -> Result<BalanceReport> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "degree must be at least 2, got {n}"
        )));
    }
    if theta0 < Q::new(0, 1) || theta0 > Q::new(1, 2) {
        return Err(Error::Precondition(format!(
            "theta0 must lie in [0, 1/2], got {theta0}"
        )));
    }
    let half = Q::new(1, 2);
    let n_q = Q::new(n as i128, 1);
    // (1−u)/2 = (n/4)(1/2+θ₀) + u(5/2+θ₀)/2 ⟺ u(7/2+θ₀) = 1 − (n/2)(1/2+θ₀).
    let numer = Q::new(1, 1) - n_q / 2 * (half + theta0);
    let denom = Q::new(7, 2) + theta0;
    let mut u_star = numer / denom;
    if u_star < Q::new(0, 1) {
        u_star = Q::new(0, 1);
    }
    let e_diag = (Q::new(1, 1) - u_star) / 2;
    let e_offdiag = n_q / 4 * (half + theta0) + u_star * (Q::new(5, 2) + theta0) / 2;
    let e_final = if e_diag > e_offdiag { e_diag } else { e_offdiag };
    let (alt_u, matches_alt) = if n == 3 {
        let alt = (Q::new(1, 1) - Q::new(6, 1) * theta0) / (Q::new(14, 1) - Q::new(4, 1) * theta0);
        let diff = if alt > u_star { alt - u_star } else { u_star - alt };
        (
            Some(alt),
            Some(diff < Q::new(1, 1_000_000_000_000)),
        )
    } else {
        (None, None)
    };
    Ok(BalanceReport {
        u_star,
        e_diag,
        e_offdiag,
        e_final,
        beats_convexity: e_final < n_q / 4,
        alt_u,
        matches_alt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::delta_coefficients;
    use approx::assert_relative_eq;

    fn p7_spec() -> AmplifierSpec {
        AmplifierSpec {
            q: 5,
            chi_index: 2,
            big_l: 10.0,
            big_y: 200.0,
            w: Complex64::new(0.0, 0.5),
            weight: WeightFn::compact(1.0).unwrap(),
        }
    }

    #[test]
    fn amplifier_prime_windows() {
        assert_eq!(amplifier_primes(10.0, 5).unwrap(), vec![11, 13, 17, 19]);
        assert_eq!(amplifier_primes(2.0, 2).unwrap(), vec![3]);
        assert_eq!(amplifier_primes(10.0, 11).unwrap(), vec![13, 17, 19]);
        assert!(amplifier_primes(2.2, 3).unwrap().is_empty());
        assert!(amplifier_primes(1.0, 5).is_err());
    }

    #[test]
    fn moment_matches_frozen_example() {
        let table = delta_coefficients(400).unwrap();
        let spec = p7_spec();
        let chi = dirichlet_char(5, 2).unwrap();
        let l_chi = script_l(&table, &chi, &spec).unwrap();
        assert_relative_eq!(
            l_chi.norm_sqr(),
            2.012233367678574e-3,
            max_relative = 1e-12
        );
        let s = moment_s(&table, &spec).unwrap();
        assert_relative_eq!(s, 3.219573388285719e-2, max_relative = 1e-12);
        let bound = one_term_bound(&table, &spec).unwrap();
        assert!(s >= bound - 1e-12 * s);
        // The four amplifier primes cover all nonzero residues mod 5, so
        // every ξ ≠ χ detector sum vanishes by orthogonality and the
        // one-term bound is exact here.
        assert_relative_eq!(s, bound, max_relative = 1e-12);
    }

    #[test]
    fn script_l_single_term_support() {
        // Narrow the weight onto one coefficient: the sum collapses.
        let table = delta_coefficients(50).unwrap();
        let spec = AmplifierSpec {
            q: 5,
            chi_index: 0,
            big_l: 10.0,
            big_y: 10.0,
            w: Complex64::new(0.0, 0.0),
            weight: WeightFn::gaussian(1.7, 0.001).unwrap(),
        };
        let chi0 = dirichlet_char(5, 0).unwrap();
        let got = script_l(&table, &chi0, &spec).unwrap();
        let y = 17.0 / 10.0;
        let expected = table.values[17] * (spec.weight.eval(y) / 17.0_f64.sqrt());
        assert!((got - expected).norm() <= 1e-15);
    }

    #[test]
    fn script_l_reports_missing_coverage() {
        let table = delta_coefficients(100).unwrap();
        let spec = p7_spec();
        assert!(matches!(
            script_l(&table, &dirichlet_char(5, 2).unwrap(), &spec),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn spec_validation() {
        let ok = p7_spec();
        assert!(ok.validate().is_ok());
        assert!(AmplifierSpec { q: 6, ..ok.clone() }.validate().is_err());
        assert!(AmplifierSpec { big_l: 1.0, ..ok.clone() }.validate().is_err());
        assert!(AmplifierSpec { big_l: 1.55, q: 11, ..ok.clone() }.validate().is_err());
        assert!(
            AmplifierSpec { w: Complex64::new(0.3, 0.0), ..ok }.validate().is_err()
        );
    }

    #[test]
    fn plancherel_single_and_split_residues() {
        let mut inner = BTreeMap::new();
        inner.insert(2u64, Complex64::new(0.7, -0.2));
        let (lhs, rhs) = plancherel_check(5, 1, &inner).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
        inner.insert(3u64, Complex64::new(-1.3, 0.4));
        let (lhs, rhs) = plancherel_check(5, 1, &inner).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        inner.insert(5u64, Complex64::new(1.0, 0.0));
        assert!(plancherel_check(5, 1, &inner).is_err());
    }

    #[test]
    fn diagonal_ratio_is_stable_in_y_and_decreasing_in_l() {
        let table = delta_coefficients(2000).unwrap();
        let r250 = diagonal_estimate(&table, 5, 10.0, 250.0).unwrap();
        let r500 = diagonal_estimate(&table, 5, 10.0, 500.0).unwrap();
        let r1000 = diagonal_estimate(&table, 5, 10.0, 1000.0).unwrap();
        assert!(r250 > 0.0 && r500 > 0.0 && r1000 > 0.0);
        for (a, b) in [(r250, r500), (r500, r1000)] {
            let ratio = a / b;
            assert!(
                (0.5..=2.0).contains(&ratio),
                "instability: {a} vs {b} (ratio {ratio})"
            );
        }
        let r_l20 = diagonal_estimate(&table, 5, 20.0, 500.0).unwrap();
        assert!(r_l20 < r500, "doubling L: {r500} -> {r_l20}");
        // Empty amplifier collapses the sum.
        assert_eq!(diagonal_estimate(&table, 3, 2.2, 500.0).unwrap(), 0.0);
    }

    #[test]
    fn exponent_identities() {
        let theta0 = 7.0 / 64.0;
        let (_, e_off, e_final) = exponent_calculator(&ExponentInput {
            n: 4,
            theta0,
            u: 0.0,
            delta0: None,
        })
        .unwrap();
        assert_eq!(e_off, 39.0 / 64.0);
        assert_eq!(e_final, 39.0 / 64.0);
        let u = 0.25 - theta0 / 2.0;
        let (e_diag, _, _) = exponent_calculator(&ExponentInput {
            n: 3,
            theta0,
            u,
            delta0: None,
        })
        .unwrap();
        assert!((e_diag - (0.375 + theta0 / 4.0)).abs() <= 1e-15);
        let u3 = (1.0 - 6.0 * theta0) / (14.0 - 4.0 * theta0);
        let (e_diag3, _, _) = exponent_calculator(&ExponentInput {
            n: 3,
            theta0,
            u: u3,
            delta0: None,
        })
        .unwrap();
        assert!((e_diag3 - (13.0 + 2.0 * theta0) / (2.0 * (14.0 - 4.0 * theta0))).abs() <= 1e-15);
        assert!(exponent_calculator(&ExponentInput {
            n: 1,
            theta0,
            u: 0.0,
            delta0: None,
        })
        .is_err());
    }

    #[test]
    fn exponent_max_is_piecewise_monotone() {
        let theta0 = 7.0 / 64.0;
        let report = balance_report(3, Q::new(7, 64)).unwrap();
        let u_star = *report.u_star.numer() as f64 / *report.u_star.denom() as f64;
        let mut prev_left = f64::INFINITY;
        let mut prev_right = 0.0f64;
        for i in 0..=20 {
            let u = i as f64 / 20.0;
            let (_, _, e) = exponent_calculator(&ExponentInput {
                n: 3,
                theta0,
                u,
                delta0: None,
            })
            .unwrap();
            if u <= u_star {
                assert!(e <= prev_left + 1e-15);
                prev_left = e;
            } else {
                assert!(e >= prev_right - 1e-15);
                prev_right = e;
            }
        }
    }

    #[test]
    fn balance_points_exact() {
        let t = Q::new(7, 64);
        let r3 = balance_report(3, t).unwrap();
        assert_eq!(r3.u_star, Q::new(1, 42));
        assert_eq!(r3.e_final, Q::new(41, 84));
        assert_eq!(r3.alt_u, Some(Q::new(11, 434)));
        assert_eq!(r3.matches_alt, Some(false));
        assert!(r3.beats_convexity);

        let r4 = balance_report(4, t).unwrap();
        assert_eq!(r4.u_star, Q::new(0, 1));
        assert_eq!(r4.e_final, Q::new(39, 64));
        assert!(r4.beats_convexity);
        assert_eq!(r4.alt_u, None);

        // θ₀ = 0 collapses: e_offdiag(0) = n/8.
        let r0 = balance_report(2, Q::new(0, 1)).unwrap();
        assert_eq!(
            r0.e_offdiag,
            Q::new(1, 4) + r0.u_star * Q::new(5, 4)
        );
        // θ₀ = 1/2, n = 2: balance at u = 0 with e_final = n/4 exactly;
        // convexity is met, not beaten.
        let tie = balance_report(2, Q::new(1, 2)).unwrap();
        assert_eq!(tie.u_star, Q::new(0, 1));
        assert_eq!(tie.e_final, Q::new(1, 2));
        assert!(!tie.beats_convexity);
    }
}
