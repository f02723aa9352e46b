//! Positive definite integral quadratic forms, spherical (harmonic)
//! polynomial weights, and theta-series coefficients by bounded lattice
//! enumeration.
//!
//! A form is stored through the integer matrix 2A (symmetric, even
//! diagonal), which is exactly the condition for f(a) = aᵀAa to be
//! integer-valued on Z^k. All form values, bilinear pairings and
//! polynomial weights are computed in exact integer/rational arithmetic;
//! floating point appears only in the squared-completion box bounds that
//! steer the enumeration, and every candidate is re-checked exactly
//! before use.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Ceiling on the number of lattice vectors one enumeration may visit.
pub const ENUM_CEILING: u64 = 10_000_000;

/// Positive definite quadratic form f(a) = aᵀAa on Z^k, integer-valued.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    /// Number of variables.
    pub k: usize,
    /// The integer matrix 2A (symmetric, even diagonal).
    two_a: Vec<Vec<i64>>,
}

impl QuadraticForm {
    /// Build a form from the upper triangle of 2A, row-major:
    /// entries (0,0), (0,1), …, (0,k−1), (1,1), …, (k−1,k−1).
    ///
    /// Validates integrality (even diagonal) and positive definiteness.
    pub fn from_upper_two_a(k: usize, upper: &[i64]) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("form needs at least 1 variable".into()));
        }
        let expected = k * (k + 1) / 2;
        if upper.len() != expected {
            return Err(Error::Precondition(format!(
                "upper triangle of a {k}x{k} matrix has {expected} entries, got {}",
                upper.len()
            )));
        }
        let mut two_a = vec![vec![0i64; k]; k];
        let mut idx = 0;
        for i in 0..k {
            for j in i..k {
                two_a[i][j] = upper[idx];
                two_a[j][i] = upper[idx];
                idx += 1;
            }
        }
        for i in 0..k {
            if two_a[i][i] % 2 != 0 {
                return Err(Error::Precondition(format!(
                    "diagonal entry (2A)_{i}{i} = {} must be even for integer values",
                    two_a[i][i]
                )));
            }
        }
        let form = QuadraticForm { k, two_a };
        form.completion_q()?; // checks positive definiteness
        Ok(form)
    }

    /// The one-variable form f(a) = a².
    pub fn square() -> Self {
        Self::from_upper_two_a(1, &[2]).expect("x^2 is a valid form")
    }

    /// The integer matrix 2A.
    pub fn two_a(&self) -> &[Vec<i64>] {
        &self.two_a
    }

    /// The Gram matrix A as exact rationals.
    pub fn gram(&self) -> Vec<Vec<Rational64>> {
        self.two_a
            .iter()
            .map(|row| row.iter().map(|&e| Rational64::new(e, 2)).collect())
            .collect()
    }

    /// f(a) = aᵀAa, exactly.
    pub fn value(&self, a: &[i64]) -> i64 {
        debug_assert_eq!(a.len(), self.k);
        let mut twice = 0i64;
        for i in 0..self.k {
            twice += self.two_a[i][i] * a[i] * a[i];
            for j in i + 1..self.k {
                twice += 2 * self.two_a[i][j] * a[i] * a[j];
            }
        }
        debug_assert_eq!(twice % 2, 0);
        twice / 2
    }

    /// uᵀ(2A)v: twice the A-bilinear pairing, exactly.
    pub fn bilinear_twice(&self, u: &[i64], v: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..self.k {
            for j in 0..self.k {
                s += u[i] * self.two_a[i][j] * v[j];
            }
        }
        s
    }

    /// Squared-completion coefficients: f(x) = Σ_i q[i][i]·(x_i +
    /// Σ_{j>i} q[i][j] x_j)². Errors unless all pivots are positive.
    fn completion_q(&self) -> Result<Vec<Vec<f64>>> {
        let k = self.k;
        let mut q: Vec<Vec<f64>> = self
            .two_a
            .iter()
            .map(|row| row.iter().map(|&e| e as f64 / 2.0).collect())
            .collect();
        for i in 0..k {
            if q[i][i] <= 0.0 {
                return Err(Error::Precondition(format!(
                    "form is not positive definite (pivot {i} is {})",
                    q[i][i]
                )));
            }
            for j in i + 1..k {
                let t = q[i][j];
                q[j][i] = t; // keep the undivided entry for the update
                q[i][j] = t / q[i][i];
            }
            for l in i + 1..k {
                for m in l..k {
                    q[l][m] -= q[l][i] * q[i][m];
                }
            }
        }
        Ok(q)
    }
}

/// Visit every a ∈ Z^k with f(a) ≤ m (zero vector included), calling
/// `visit(a, f(a))` in a fixed deterministic order. Returns the number of
/// vectors visited. Errors when the visit count would exceed
/// [`ENUM_CEILING`].
pub fn enumerate_visit<F: FnMut(&[i64], i64)>(
    form: &QuadraticForm,
    m: i64,
    mut visit: F,
) -> Result<u64> {
    if m < 0 {
        return Err(Error::Precondition(format!(
            "enumeration bound must be nonnegative, got {m}"
        )));
    }
    let k = form.k;
    let q = form.completion_q()?;

    // Depth-first over coordinates x_{k−1}, …, x_0; at depth i the
    // remaining budget t and the inherited offsets u_i = Σ_{j>i} q[i][j]x_j
    // bound x_i by (x_i + u_i)² ≤ t/q[i][i]. Box bounds carry a 0.5 slack
    // against rounding; the exact integer test at the leaves decides.
    let mut x = vec![0i64; k];
    let mut count: u64 = 0;

    struct Frame {
        hi: i64,
        /// Next x_i to try; starts at the lower end of the admissible range.
        cur: i64,
        budget: f64,
        offset: f64,
    }

    let frame_for = |i: usize, budget: f64, x: &[i64], q: &[Vec<f64>]| -> Frame {
        let mut offset = 0.0;
        for j in i + 1..k {
            offset += q[i][j] * x[j] as f64;
        }
        let half = ((budget + 0.5).max(0.0) / q[i][i]).sqrt();
        let lo = (-half - offset).ceil() as i64;
        let hi = (half - offset).floor() as i64;
        Frame {
            hi,
            cur: lo,
            budget,
            offset,
        }
    };

    let mut stack: Vec<Frame> = Vec::with_capacity(k);
    stack.push(frame_for(k - 1, m as f64, &x, &q));

    while !stack.is_empty() {
        let i = k - stack.len();
        let top = stack.last_mut().expect("stack nonempty");
        if top.cur > top.hi {
            stack.pop();
            continue;
        }
        let xi = top.cur;
        top.cur += 1;
        x[i] = xi;
        let step = xi as f64 + top.offset; // x_i + u_i
        let spent = q[i][i] * step * step;
        let next_budget = top.budget - spent;
        if next_budget < -0.5 {
            continue;
        }
        if i == 0 {
            let val = form.value(&x);
            if val <= m {
                count += 1;
                if count > ENUM_CEILING {
                    return Err(Error::Resource(format!(
                        "enumeration exceeded ceiling of {ENUM_CEILING} vectors"
                    )));
                }
                visit(&x, val);
            }
        } else {
            stack.push(frame_for(i - 1, next_budget, &x, &q));
        }
    }
    Ok(count)
}

/// All representations grouped by value: map f(a) = n ↦ sorted list of
/// vectors a (lexicographic within each group).
pub fn enumerate_reps(
    form: &QuadraticForm,
    m: i64,
) -> Result<BTreeMap<i64, Vec<Vec<i64>>>> {
    let mut groups: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    enumerate_visit(form, m, |a, val| {
        groups.entry(val).or_default().push(a.to_vec());
    })?;
    for vecs in groups.values_mut() {
        vecs.sort();
    }
    Ok(groups)
}

/// Homogeneous polynomial weight with exact rational coefficients, given
/// as a sum of monomial terms (exponent vector, coefficient).
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPoly {
    /// Number of variables (must match the form it is paired with).
    pub k: usize,
    /// Common total degree of all terms.
    pub degree: u32,
    /// Monomials: exponent vector of length k, nonzero coefficient.
    terms: Vec<(Vec<u32>, Rational64)>,
}

impl SphericalPoly {
    /// Build and validate a homogeneous polynomial. Like terms are
    /// combined; zero coefficients dropped. The zero polynomial (no
    /// terms) has degree 0 by convention.
    pub fn new(k: usize, terms: Vec<(Vec<u32>, Rational64)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("polynomial needs k >= 1".into()));
        }
        let mut combined: BTreeMap<Vec<u32>, Rational64> = BTreeMap::new();
        for (expo, coeff) in terms {
            if expo.len() != k {
                return Err(Error::Precondition(format!(
                    "exponent vector length {} does not match k = {k}",
                    expo.len()
                )));
            }
            *combined.entry(expo).or_insert_with(Rational64::zero) += coeff;
        }
        combined.retain(|_, c| !c.is_zero());
        let mut degree: Option<u32> = None;
        for expo in combined.keys() {
            let d: u32 = expo.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(prev) if prev != d => {
                    return Err(Error::Precondition(format!(
                        "polynomial not homogeneous: found degrees {prev} and {d}"
                    )));
                }
                _ => {}
            }
        }
        Ok(SphericalPoly {
            k,
            degree: degree.unwrap_or(0),
            terms: combined.into_iter().collect(),
        })
    }

    /// The constant weight 1 in k variables.
    pub fn constant_one(k: usize) -> Self {
        Self::new(k, vec![(vec![0; k], Rational64::new(1, 1))])
            .expect("constant polynomial is valid")
    }

    /// The monomial terms (sorted by exponent vector).
    pub fn terms(&self) -> &[(Vec<u32>, Rational64)] {
        &self.terms
    }

    /// Exact evaluation at an integer point.
    pub fn eval(&self, a: &[i64]) -> Rational64 {
        debug_assert_eq!(a.len(), self.k);
        let mut total = Rational64::zero();
        for (expo, coeff) in &self.terms {
            let mut mono = 1i64;
            for (x, &e) in a.iter().zip(expo.iter()) {
                mono *= x.pow(e);
            }
            total += *coeff * Rational64::new(mono, 1);
        }
        total
    }

    /// ∂/∂x_v, exactly.
    fn partial(&self, v: usize) -> SphericalPoly {
        let mut terms = Vec::new();
        for (expo, coeff) in &self.terms {
            if expo[v] == 0 {
                continue;
            }
            let mut e = expo.clone();
            e[v] -= 1;
            terms.push((e, *coeff * Rational64::new(expo[v] as i64, 1)));
        }
        SphericalPoly::new(self.k, terms).expect("derivative of homogeneous is homogeneous")
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Exact inverse of a k×k rational matrix by Gauss–Jordan elimination.
fn invert_rational(mat: &[Vec<Rational64>]) -> Result<Vec<Vec<Rational64>>> {
    let k = mat.len();
    let mut a: Vec<Vec<Rational64>> = mat.to_vec();
    let mut inv: Vec<Vec<Rational64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i == j {
                        Rational64::new(1, 1)
                    } else {
                        Rational64::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..k {
        let pivot_row = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Precondition("matrix is singular".into()))?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in 0..k {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for r in 0..k {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col];
            for j in 0..k {
                let ta = a[col][j] * factor;
                a[r][j] -= ta;
                let ti = inv[col][j] * factor;
                inv[r][j] -= ti;
            }
        }
    }
    Ok(inv)
}

/// Exact check that p is harmonic with respect to f: the form-Laplacian
/// Σ_{i,j} (A^{−1})_{ij} ∂_i∂_j p vanishes identically.
pub fn harmonicity_check(form: &QuadraticForm, poly: &SphericalPoly) -> Result<bool> {
    if poly.k != form.k {
        return Err(Error::Precondition(format!(
            "polynomial in {} variables paired with a {}-variable form",
            poly.k, form.k
        )));
    }
    let ainv = invert_rational(&form.gram())?;
    let mut terms: Vec<(Vec<u32>, Rational64)> = Vec::new();
    for i in 0..form.k {
        for j in 0..form.k {
            if ainv[i][j].is_zero() {
                continue;
            }
            let second = poly.partial(i).partial(j);
            for (expo, coeff) in second.terms() {
                terms.push((expo.clone(), *coeff * ainv[i][j]));
            }
        }
    }
    let laplacian = SphericalPoly::new(form.k, terms)?;
    Ok(laplacian.is_zero())
}

/// Theta coefficients r(m) = Σ_{f(a)=m} p(a) for 0 ≤ m ≤ bound,
/// accumulated exactly and converted to f64 once at the end.
#[derive(Debug, Clone)]
pub struct ThetaCoeffs {
    /// Label used in text exports.
    pub label: String,
    /// Largest value index covered.
    pub bound: usize,
    /// r[m] for 0 ≤ m ≤ bound.
    pub r: Vec<f64>,
}

impl ThetaCoeffs {
    /// Serialize in the coefficient-table text format (rows start at
    /// m = 0 here, since theta series have a constant term).
    pub fn export_text(&self) -> String {
        let mut out = String::with_capacity(48 * (self.bound + 1));
        let _ = writeln!(out, "# rep={} degree=0 bound={}", self.label, self.bound);
        for m in 0..=self.bound {
            let _ = writeln!(out, "{} {:.16e} {:.16e}", m, self.r[m], 0.0);
        }
        out
    }
}

/// Compute theta coefficients of (form, poly) up to `bound`.
pub fn theta_coeffs(
    form: &QuadraticForm,
    poly: &SphericalPoly,
    bound: usize,
) -> Result<ThetaCoeffs> {
    if poly.k != form.k {
        return Err(Error::Precondition(format!(
            "polynomial in {} variables paired with a {}-variable form",
            poly.k, form.k
        )));
    }
    let mut exact = vec![Rational64::zero(); bound + 1];
    enumerate_visit(form, bound as i64, |a, val| {
        exact[val as usize] += poly.eval(a);
    })?;
    let r = exact
        .iter()
        .map(|v| *v.numer() as f64 / *v.denom() as f64)
        .collect();
    Ok(ThetaCoeffs {
        label: format!("theta_k{}_deg{}", form.k, poly.degree),
        bound,
        r,
    })
}

/// Integer determinant by cofactor expansion (k ≤ 4 in practice).
fn det_i64(m: &[Vec<i64>]) -> i64 {
    let k = m.len();
    match k {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            let mut det = 0i64;
            for col in 0..k {
                if m[0][col] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i64>> = (1..k)
                    .map(|r| {
                        (0..k)
                            .filter(|&c| c != col)
                            .map(|c| m[r][c])
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1 } else { -1 };
                det += sign * m[0][col] * det_i64(&minor);
            }
            det
        }
    }
}

/// Count integral automorphs U (UᵀAU = A): returns (full count,
/// rotation-only count with det U = +1).
pub fn automorph_count(form: &QuadraticForm) -> Result<(u64, u64)> {
    let k = form.k;
    let diag: Vec<i64> = (0..k).map(|i| form.two_a()[i][i] / 2).collect();
    let max_diag = *diag.iter().max().expect("k >= 1");
    let groups = enumerate_reps(form, max_diag)?;
    let empty: Vec<Vec<i64>> = Vec::new();

    // Column i of an automorph represents diag[i] and pairs with the
    // earlier columns exactly as the Gram matrix dictates.
    let mut full = 0u64;
    let mut rotations = 0u64;
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(k);

    fn dfs(
        form: &QuadraticForm,
        groups: &BTreeMap<i64, Vec<Vec<i64>>>,
        empty: &Vec<Vec<i64>>,
        diag: &[i64],
        chosen: &mut Vec<Vec<i64>>,
        full: &mut u64,
        rotations: &mut u64,
    ) {
        let k = form.k;
        let i = chosen.len();
        if i == k {
            *full += 1;
            // Columns to matrix; det sign classifies rotation vs reflection.
            let mat: Vec<Vec<i64>> = (0..k)
                .map(|r| (0..k).map(|c| chosen[c][r]).collect())
                .collect();
            if det_i64(&mat) == 1 {
                *rotations += 1;
            }
            return;
        }
        for cand in groups.get(&diag[i]).unwrap_or(empty) {
            let ok = (0..i)
                .all(|j| form.bilinear_twice(cand, &chosen[j]) == form.two_a()[i][j]);
            if ok {
                chosen.push(cand.clone());
                dfs(form, groups, empty, diag, chosen, full, rotations);
                chosen.pop();
            }
        }
    }

    dfs(
        form,
        &groups,
        &empty,
        &diag,
        &mut chosen,
        &mut full,
        &mut rotations,
    );
    Ok((full, rotations))
}
