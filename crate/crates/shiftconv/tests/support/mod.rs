//! Independent recomputation routes shared by the integration tests.
//!
//! Nothing in this module reuses the library's own algorithms: tau
//! values come from Niebur's divisor-sum formula rather than the
//! eta-power convolution, representation numbers from a plain box scan
//! rather than the pruned enumeration tree, Bessel K from its cosh
//! integral, zeta from the accelerated alternating series, and
//! progression pairs from a double loop rather than the congruence
//! solve. Agreement between a library value and one of these routes is
//! therefore evidence, not circularity.
#![allow(dead_code)] // each test binary uses its own subset

use std::sync::{Arc, LazyLock};

use num_complex::Complex64;
use shiftconv::arith::{delta_coefficients, CoeffTable};
use shiftconv::quadforms::QuadraticForm;

/// Full-scale seed table for AFE and growth tests (built once per test
/// binary; the dominant setup cost, a couple of seconds).
pub static DELTA_200K: LazyLock<Arc<CoeffTable>> =
    LazyLock::new(|| Arc::new(delta_coefficients(200_000).expect("seed table builds")));

/// Small seed table for everything that needs only a few thousand terms.
pub static DELTA_4K: LazyLock<Arc<CoeffTable>> =
    LazyLock::new(|| Arc::new(delta_coefficients(4_000).expect("seed table builds")));

/// Sums of divisors sigma_1(1..=n), by sieving.
pub fn sigma1_table(n: usize) -> Vec<i128> {
    let mut sigma = vec![0i128; n + 1];
    for d in 1..=n {
        let mut m = d;
        while m <= n {
            sigma[m] += d as i128;
            m += d;
        }
    }
    sigma
}

/// tau(1..=n) by Niebur's divisor-sum formula
/// tau(n) = n^4 sigma(n) - 24 sum_{i<n} i^2 (35 i^2 - 52 i n + 18 n^2)
///          sigma(i) sigma(n-i),
/// exact in i128. Quadratic in n, so keep n modest.
pub fn tau_niebur(n: usize) -> Vec<i128> {
    let sigma = sigma1_table(n);
    let mut tau = vec![0i128; n + 1];
    for m in 1..=n {
        let mm = m as i128;
        let mut acc = 0i128;
        for i in 1..m {
            let ii = i as i128;
            acc += ii * ii * (35 * ii * ii - 52 * ii * mm + 18 * mm * mm)
                * sigma[i]
                * sigma[m - i];
        }
        tau[m] = mm.pow(4) * sigma[m] - 24 * acc;
    }
    tau
}

/// sigma_11(n) mod p, for the classical congruence check.
pub fn sigma11_mod(n: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for d in 1..=n {
        if n % d == 0 {
            let mut pw = 1u64;
            for _ in 0..11 {
                pw = pw * (d % p) % p;
            }
            acc = (acc + pw) % p;
        }
    }
    acc
}

/// Representation numbers r(0..=m) of a positive-definite form by brute
/// box scan. The box is grown until no boundary point represents a value
/// <= m, which makes the result correct without eigenvalue estimates.
pub fn box_scan_counts(form: &QuadraticForm, m: i64) -> Vec<u64> {
    assert!(m >= 0);
    let k = form.k;
    let mut radius = ((2 * m.max(1)) as f64).sqrt() as i64 + 2;
    loop {
        let mut counts = vec![0u64; m as usize + 1];
        let mut boundary_hit = false;
        let mut x = vec![-radius; k];
        'scan: loop {
            let v = form.value(&x);
            if v <= m {
                if x.iter().any(|&c| c.abs() == radius) {
                    boundary_hit = true;
                } else {
                    counts[v as usize] += 1;
                }
            }
            for i in 0..k {
                if x[i] < radius {
                    x[i] += 1;
                    continue 'scan;
                }
                x[i] = -radius;
            }
            break;
        }
        if !boundary_hit {
            return counts;
        }
        radius *= 2;
    }
}

/// K_nu(y) by the integral over t of exp(-y cosh t) cosh(nu t),
/// composite Simpson on [0, T] with T past the underflow point.
pub fn bessel_k(nu: Complex64, y: f64) -> Complex64 {
    assert!(y > 0.0);
    let t_max = (745.0 / y).max(2.0).acosh() + 1.0;
    let n = 20_000usize; // even
    let h = t_max / n as f64;
    let f = |t: f64| (Complex64::new(nu.re * t, nu.im * t)).cosh() * (-y * t.cosh()).exp();
    let mut acc = f(0.0) + f(t_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

/// zeta(s) for real s != 1 in (0, inf), via the accelerated alternating
/// series (Chebyshev-weighted partial sums of eta, then
/// eta/(1 - 2^{1-s})). About 1.3 digits per term; 60 terms saturate f64.
pub fn zeta_alternating(s: f64) -> f64 {
    let n = 60i32;
    let d0 = (3.0 + 8.0f64.sqrt()).powi(n);
    let d = (d0 + 1.0 / d0) / 2.0;
    let mut b = -1.0f64;
    let mut c = -d;
    let mut eta = 0.0f64;
    for k in 0..n {
        let kf = k as f64;
        c = b - c;
        eta += c * (kf + 1.0).powf(-s);
        b *= 2.0 * (kf + n as f64) * (kf - n as f64) / ((2.0 * kf + 1.0) * (kf + 1.0));
    }
    (eta / d) / (1.0 - 2.0f64.powf(1.0 - s))
}

/// All (g1, g2) with l1*g1 - l2*g2 = alpha, 1 <= g1 <= g1_max, found by
/// the double loop.
pub fn brute_pairs(l1: i64, l2: i64, alpha: i64, g1_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let g2_max = (l1 * g1_max - alpha) / l2 + 1;
    for g1 in 1..=g1_max {
        for g2 in 1..=g2_max.max(0) {
            if l1 * g1 - l2 * g2 == alpha {
                out.push((g1, g2));
            }
        }
    }
    out
}

/// Relative deviation with a floor against zero denominators.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0e-300)
}
