//! Arithmetic engine: normalized Hecke coefficient tables, Satake
//! parameters, symmetric-power lifts, Dirichlet characters and Gauss sums.
//!
//! Coefficients are unitarily normalized: c(1) = 1 and, at every prime,
//! c(p^k) is the complete homogeneous symmetric function h_k of the Satake
//! parameters, so that the degree-n local factor is ∏_i (1 − α_i p^{−s})^{−1}.
//! Tables are dense arrays filled multiplicatively from prime powers via a
//! smallest-prime-factor sieve.
//!
//! The discriminant-form seed is built exactly: the weight-12 cusp
//! coefficients come from eight sparse convolution passes with the cube of
//! the Euler product, Σ_{j≥0} (−1)^j (2j+1) q^{j(j+1)/2}, carried out in
//! 128-bit integers, then normalized by m^{11/2}. No floating-point error
//! enters before the final division.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kahan::{KahanComplex, KahanSum};

/// Hard ceiling on table bounds; requests beyond it are resource errors.
pub const TABLE_CEILING: usize = 1_000_000;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Dense table of normalized coefficients c(m), 1 ≤ m ≤ bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    /// Short label for the generating representation (used in exports).
    pub name: String,
    /// Degree of the generating representation.
    pub degree: u32,
    /// Largest index covered.
    pub bound: usize,
    /// values[m] = c(m); values[0] is unused and fixed to 0.
    pub values: Vec<Complex64>,
}

impl CoeffTable {
    /// c(m) with the sign convention c(−m) = c(m). Errors on m = 0 and on
    /// indices beyond the covered bound.
    pub fn coeff(&self, m: i64) -> Result<Complex64> {
        if m == 0 {
            return Err(Error::Domain("coefficient index 0 is undefined".into()));
        }
        let a = m.unsigned_abs() as usize;
        if a > self.bound {
            return Err(Error::Coverage(format!(
                "coefficient index {m} exceeds table bound {}",
                self.bound
            )));
        }
        Ok(self.values[a])
    }

    /// Serialize to the interchange text format: a header line
    /// `# rep=<name> degree=<n> bound=<M>`, then one `m re im` line per
    /// index at 17 significant digits (bit-exact round-trip).
    pub fn export_text(&self) -> String {
        let mut out = String::with_capacity(48 * (self.bound + 1));
        let _ = writeln!(
            out,
            "# rep={} degree={} bound={}",
            self.name, self.degree, self.bound
        );
        for m in 1..=self.bound {
            let v = self.values[m];
            let _ = writeln!(out, "{} {:.16e} {:.16e}", m, v.re, v.im);
        }
        out
    }

    /// Parse the interchange text format produced by [`export_text`].
    ///
    /// [`export_text`]: CoeffTable::export_text
    pub fn import_text(text: &str) -> Result<CoeffTable> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let parse_field = |line: usize, field: &str, key: &str| -> Result<String> {
            field
                .strip_prefix(&format!("{key}="))
                .map(str::to_owned)
                .ok_or(Error::Parse {
                    line,
                    msg: format!("expected {key}=<value>, got `{field}`"),
                })
        };
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "#" {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be `# rep=<name> degree=<n> bound=<M>`".into(),
            });
        }
        let name = parse_field(1, parts[1], "rep")?;
        let degree: u32 = parse_field(1, parts[2], "degree")?
            .parse()
            .map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad degree: {e}"),
            })?;
        let bound: usize = parse_field(1, parts[3], "bound")?
            .parse()
            .map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad bound: {e}"),
            })?;
        if bound == 0 || bound > TABLE_CEILING {
            return Err(Error::Parse {
                line: 1,
                msg: format!("bound {bound} outside 1..={TABLE_CEILING}"),
            });
        }

        let mut values = vec![Complex64::new(0.0, 0.0); bound + 1];
        let mut expected: usize = 1;
        for (idx, raw) in lines {
            let lineno = idx + 1;
            let mut it = raw.split_whitespace();
            let (m, re, im) = match (it.next(), it.next(), it.next(), it.next()) {
                (Some(m), Some(re), Some(im), None) => (m, re, im),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected `m re im`, got `{raw}`"),
                    })
                }
            };
            let m: usize = m.parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad index: {e}"),
            })?;
            if m != expected {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected index {expected}, got {m}"),
                });
            }
            let re: f64 = re.parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad real part: {e}"),
            })?;
            let im: f64 = im.parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad imaginary part: {e}"),
            })?;
            values[m] = Complex64::new(re, im);
            expected += 1;
        }
        if expected != bound + 1 {
            return Err(Error::Parse {
                line: bound + 1,
                msg: format!("missing rows: stopped before index {expected}"),
            });
        }
        Ok(CoeffTable {
            name,
            degree,
            bound,
            values,
        })
    }
}

/// Weight-12 cusp coefficients tau(1..=bound), exact in i128, via eight
/// sparse convolution passes with the cube of the Euler product.
fn tau_table(bound: usize) -> Vec<i128> {
    // Cube of the Euler product: Σ_{j≥0} (−1)^j (2j+1) q^{j(j+1)/2}.
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    let mut j: usize = 0;
    loop {
        let g = j * (j + 1) / 2;
        if g >= bound {
            break;
        }
        let c = (2 * j + 1) as i128;
        sparse.push((g, if j % 2 == 0 { c } else { -c }));
        j += 1;
    }

    let mut cur = vec![0i128; bound];
    cur[0] = 1;
    for _ in 0..8 {
        let mut nxt = vec![0i128; bound];
        for &(g, h) in &sparse {
            let limit = bound - g;
            for i in 0..limit {
                nxt[g + i] += h * cur[i];
            }
        }
        cur = nxt;
    }
    // cur[n-1] is the q^n coefficient of the weight-12 product.
    cur
}

fn check_bound(bound: usize) -> Result<()> {
    if bound == 0 {
        return Err(Error::Precondition("table bound must be >= 1".into()));
    }
    if bound > TABLE_CEILING {
        return Err(Error::Resource(format!(
            "table bound {bound} exceeds ceiling {TABLE_CEILING}"
        )));
    }
    Ok(())
}

/// Normalized seed coefficients c(m) = tau(m)/m^{11/2} up to `bound`.
pub fn delta_coefficients(bound: usize) -> Result<CoeffTable> {
    check_bound(bound)?;
    let tau = tau_table(bound);
    let mut values = vec![Complex64::new(0.0, 0.0); bound + 1];
    for m in 1..=bound {
        let norm = (m as f64).powf(5.5);
        values[m] = Complex64::new(tau[m - 1] as f64 / norm, 0.0);
    }
    Ok(CoeffTable {
        name: "delta".into(),
        degree: 2,
        bound,
        values,
    })
}

/// Verify, in exact integer arithmetic, that the weight-12 coefficients
/// are multiplicative (τ(mn) = τ(m)τ(n) for every coprime pair with
/// mn ≤ bound) and satisfy the prime-power recursion
/// τ(p^{j+1}) = τ(p)·τ(p^j) − p^{11}·τ(p^{j−1}). Returns the number of
/// coprime pairs and recursion steps checked; any violated identity is
/// an error.
pub fn delta_hecke_verify(bound: usize) -> Result<(u64, u64)> {
    check_bound(bound)?;
    if bound < 4 {
        return Err(Error::Precondition(format!(
            "need bound ≥ 4 to exercise both identities, got {bound}"
        )));
    }
    let tau = tau_table(bound);
    let t = |m: usize| tau[m - 1];
    let mut pairs = 0u64;
    for m in 2..=bound {
        for n in 2..=bound / m {
            if gcd_usize(m, n) != 1 {
                continue;
            }
            if t(m * n) != t(m) * t(n) {
                return Err(Error::Domain(format!(
                    "multiplicativity fails at ({m}, {n})"
                )));
            }
            pairs += 1;
        }
    }
    let mut steps = 0u64;
    // Only primes with p² ≤ bound have prime powers to recurse over;
    // restricting the loop also keeps p^11 inside i128.
    for p in 2..=bound.isqrt() {
        if !(2..p).all(|d| d * d > p || p % d != 0) {
            continue;
        }
        let pk = (p as i128).pow(11);
        let mut power = p;
        while power <= bound / p {
            let next = power * p;
            if t(next) != t(p) * t(power) - pk * t(power / p) {
                return Err(Error::Domain(format!(
                    "prime-power recursion fails at {p}^{}",
                    next.ilog(p)
                )));
            }
            power = next;
            steps += 1;
        }
    }
    Ok((pairs, steps))
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

/// Satake parameters of one local factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SatakeLocal {
    pub prime: u64,
    pub params: Vec<Complex64>,
}

impl SatakeLocal {
    /// |α_1 ⋯ α_n|: modulus of the central-character value; unitary
    /// normalization forces this to 1.
    pub fn product_modulus(&self) -> f64 {
        self.params
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * a)
            .norm()
    }
}

/// Degree-2 Satake pair {α, 1/α} from the prime coefficient: the roots of
/// X² − c(p)X + 1, ordered by nonincreasing modulus (ties keep the
/// `+`-branch root first).
pub fn satake_from_coeff(prime: u64, cp: Complex64) -> SatakeLocal {
    let disc = (cp * cp - 4.0).sqrt();
    let r1 = (cp + disc) / 2.0;
    let r2 = (cp - disc) / 2.0;
    let params = if r1.norm() >= r2.norm() {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    };
    SatakeLocal { prime, params }
}

/// Rule producing the Satake parameters of any prime.
#[derive(Debug, Clone)]
pub enum SatakeSource {
    /// Degree-2 rule reading c(p) from a shared seed table.
    SeedTable(Arc<CoeffTable>),
    /// r-th symmetric power of a degree-2 inner source: parameters
    /// {α^{r−i} β^i : 0 ≤ i ≤ r}.
    SymPower { inner: Box<SatakeSource>, r: u32 },
    /// Every parameter equal to 1 (formal divisor-type series).
    AllOnes { degree: u32 },
}

fn source_local(src: &SatakeSource, p: u64) -> Result<SatakeLocal> {
    match src {
        SatakeSource::SeedTable(table) => {
            let cp = table.coeff(p as i64)?;
            Ok(satake_from_coeff(p, cp))
        }
        SatakeSource::SymPower { inner, r } => {
            let base = source_local(inner, p)?;
            if base.params.len() != 2 {
                return Err(Error::Precondition(format!(
                    "symmetric power requires a degree-2 source, got degree {}",
                    base.params.len()
                )));
            }
            let (alpha, beta) = (base.params[0], base.params[1]);
            let params = (0..=*r)
                .map(|i| alpha.powu(*r - i) * beta.powu(i))
                .collect();
            Ok(SatakeLocal { prime: p, params })
        }
        SatakeSource::AllOnes { degree } => Ok(SatakeLocal {
            prime: p,
            params: vec![Complex64::new(1.0, 0.0); *degree as usize],
        }),
    }
}

/// Standardized description of one representation: degree, conductor,
/// archimedean parameters, and the Satake rule generating its coefficients.
#[derive(Debug, Clone)]
pub struct RepDescriptor {
    pub name: String,
    pub degree: u32,
    pub conductor: u64,
    /// Shift parameters μ_i of the completed-factor product ∏ Γ_R(s ± μ_i).
    pub arch_params: Vec<Complex64>,
    pub selfdual: bool,
    /// Whether the attached Dirichlet series has boundary poles
    /// (divisor-type series); downstream cutoff machinery must then use a
    /// pole-annihilating kernel.
    pub polar: bool,
    pub satake: SatakeSource,
}

/// Archimedean shift parameters of the weight-12 seed.
const SEED_ARCH: [f64; 2] = [11.0 / 2.0, 13.0 / 2.0];

impl RepDescriptor {
    /// The weight-12 seed as a degree-2 descriptor over a shared table.
    pub fn delta(seed: Arc<CoeffTable>) -> Self {
        RepDescriptor {
            name: "delta".into(),
            degree: 2,
            conductor: 1,
            arch_params: SEED_ARCH
                .iter()
                .map(|&m| Complex64::new(m, 0.0))
                .collect(),
            selfdual: true,
            polar: false,
            satake: SatakeSource::SeedTable(seed),
        }
    }

    /// Formal degree-n series with every Satake parameter 1, so that
    /// c(m) is the (n−1)-fold divisor function. Its Dirichlet series is
    /// ζ(s)^n, with a boundary pole: `polar` is set.
    pub fn formal_ones(degree: u32) -> Self {
        RepDescriptor {
            name: "formal_ones".into(),
            degree,
            conductor: 1,
            arch_params: vec![Complex64::new(0.0, 0.0); degree as usize],
            selfdual: true,
            polar: true,
            satake: SatakeSource::AllOnes { degree },
        }
    }

    /// Satake parameters at `p` per this descriptor's rule.
    pub fn satake_local(&self, p: u64) -> Result<SatakeLocal> {
        let loc = source_local(&self.satake, p)?;
        if loc.params.len() != self.degree as usize {
            return Err(Error::Precondition(format!(
                "Satake rule produced degree {} but descriptor says {}",
                loc.params.len(),
                self.degree
            )));
        }
        Ok(loc)
    }

    /// Sanity warnings (not errors): archimedean parameters violating the
    /// spectral-normalization bound Re(μ) ≤ 1/(n²+1), and self-dual
    /// descriptors whose parameter multiset is not closed under
    /// conjugation-negation. Discrete-series parameters (large positive
    /// shifts) trip both by design; the warnings flag that the bound is a
    /// spectral-normalization gate, not a validity condition here.
    pub fn validate(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let lrs = 1.0 / ((self.degree * self.degree + 1) as f64);
        for mu in &self.arch_params {
            if mu.re > lrs + 1.0e-12 {
                warnings.push(format!(
                    "arch param {mu} has Re > 1/(n^2+1) = {lrs:.6} (spectral-normalization bound)"
                ));
            }
        }
        if self.selfdual {
            let closed = self.arch_params.iter().all(|mu| {
                let target = -mu.conj();
                self.arch_params
                    .iter()
                    .any(|cand| (cand - target).norm() < 1.0e-9)
            });
            if !closed {
                warnings.push(
                    "selfdual descriptor: arch params not closed under conjugation-negation"
                        .into(),
                );
            }
        }
        warnings
    }
}

/// r-th symmetric-power lift of a degree-2 descriptor. Archimedean
/// parameters are the multiset {((r−i)μ₁ + iμ₂) : 0 ≤ i ≤ r} over the
/// seed pair (μ₁, μ₂).
pub fn sym_power_rep(seed: &RepDescriptor, r: u32) -> Result<RepDescriptor> {
    if seed.degree != 2 {
        return Err(Error::Precondition(format!(
            "symmetric power expects a degree-2 seed, got degree {}",
            seed.degree
        )));
    }
    if r == 0 {
        return Err(Error::Precondition("symmetric power r must be >= 1".into()));
    }
    if seed.arch_params.len() != 2 {
        return Err(Error::Precondition(
            "degree-2 seed must carry exactly 2 arch params".into(),
        ));
    }
    let (m1, m2) = (seed.arch_params[0], seed.arch_params[1]);
    let arch = (0..=r)
        .map(|i| m1 * ((r - i) as f64) + m2 * (i as f64))
        .collect();
    Ok(RepDescriptor {
        name: format!("sym{r}_{}", seed.name),
        degree: r + 1,
        conductor: seed.conductor,
        arch_params: arch,
        selfdual: seed.selfdual,
        polar: false,
        satake: SatakeSource::SymPower {
            inner: Box::new(seed.satake.clone()),
            r,
        },
    })
}

/// Smallest-prime-factor sieve: spf[m] for 0 ≤ m ≤ n (spf[0] = spf[1] = 0).
fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            for j in (i..=n).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
            }
        }
    }
    spf
}

/// Coefficient table generated from a descriptor's Satake rule: at each
/// prime, c(p^k) is the complete homogeneous symmetric function of the
/// local parameters; composite indices are filled multiplicatively.
pub fn coeff_from_satake(rep: &RepDescriptor, bound: usize) -> Result<CoeffTable> {
    check_bound(bound)?;
    let spf = spf_sieve(bound);
    let mut values = vec![Complex64::new(0.0, 0.0); bound + 1];
    values[1] = Complex64::new(1.0, 0.0);

    // Prime-power columns first.
    for p in 2..=bound {
        if spf[p] != p as u32 {
            continue;
        }
        let loc = rep.satake_local(p as u64)?;
        let mut kmax = 0usize;
        {
            let mut q = p;
            while q <= bound / p {
                q *= p;
                kmax += 1;
            }
            kmax += 1;
        }
        // h_k of the parameter multiset, one parameter at a time:
        // multiplying the generating series by 1/(1 − αX) is the in-place
        // ascending recurrence h[k] += α h[k−1].
        let mut h = vec![Complex64::new(0.0, 0.0); kmax + 1];
        h[0] = Complex64::new(1.0, 0.0);
        for &alpha in &loc.params {
            for k in 1..=kmax {
                let t = alpha * h[k - 1];
                h[k] += t;
            }
        }
        let mut q = p;
        let mut k = 1usize;
        loop {
            values[q] = h[k];
            if q > bound / p {
                break;
            }
            q *= p;
            k += 1;
        }
    }

    // Multiplicative fill for mixed indices, ascending so both factors are
    // already available.
    for m in 2..=bound {
        let p = spf[m] as usize;
        let mut rest = m;
        let mut pk = 1usize;
        while rest % p == 0 {
            rest /= p;
            pk *= p;
        }
        if rest == 1 {
            continue; // pure prime power, already set
        }
        values[m] = values[pk] * values[rest];
    }

    Ok(CoeffTable {
        name: rep.name.clone(),
        degree: rep.degree,
        bound,
        values,
    })
}

/// A Dirichlet character given by its values on residues.
#[derive(Debug, Clone)]
pub struct DirichletChar {
    pub modulus: u64,
    /// Exponent along the fixed generator: χ(g^t) = e(index·t/φ(q)).
    pub index: u64,
    pub order: u64,
    /// χ(−1), as ±1.
    pub parity: i32,
    pub primitive: bool,
    /// values[a] = χ(a) for 0 ≤ a < q.
    values: Vec<Complex64>,
}

impl DirichletChar {
    /// χ(m), reducing m modulo q (χ of anything sharing a factor with q
    /// is 0).
    pub fn eval(&self, m: i64) -> Complex64 {
        let r = m.rem_euclid(self.modulus as i64) as usize;
        self.values[r]
    }

    /// φ(q): the number of characters mod q.
    pub fn group_order(&self) -> u64 {
        self.values
            .iter()
            .filter(|v| v.norm_sqr() > 0.5)
            .count() as u64
    }
}

fn euler_phi(q: u64) -> u64 {
    let mut n = q;
    let mut phi = q;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

fn mul_order(a: u64, q: u64) -> u64 {
    let mut pow = a % q;
    let mut ord = 1;
    while pow != 1 {
        pow = pow * a % q;
        ord += 1;
    }
    ord
}

/// Whether the unit group mod q is cyclic: q ∈ {1, 2, 4, p^e, 2p^e} for odd
/// p. Only the prime-power cases (plus 1 and 2) are supported here; that is
/// all the desk-scale work needs.
fn cyclic_modulus_check(q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if q <= 4 {
        return Ok(());
    }
    let mut n = q;
    let mut distinct_odd = 0;
    if n % 2 == 0 {
        return Err(Error::Domain(format!(
            "modulus {q}: unit group not cyclic (even modulus > 4 unsupported)"
        )));
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            distinct_odd += 1;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        distinct_odd += 1;
    }
    if distinct_odd != 1 {
        return Err(Error::Domain(format!(
            "modulus {q}: unit group not cyclic (needs a single odd prime power)"
        )));
    }
    Ok(())
}

/// Character mod q with the given exponent along the smallest primitive
/// root. Supports q = 1, 2, 4, and odd prime powers.
pub fn dirichlet_char(q: u64, index: u64) -> Result<DirichletChar> {
    cyclic_modulus_check(q)?;
    if q == 1 {
        return Ok(DirichletChar {
            modulus: 1,
            index: 0,
            order: 1,
            parity: 1,
            primitive: true,
            values: vec![Complex64::new(1.0, 0.0)],
        });
    }
    let phi = euler_phi(q);
    let index = index % phi;

    // Smallest primitive root.
    let g = (2..q)
        .find(|&g| gcd(g, q) == 1 && mul_order(g, q) == phi)
        .ok_or_else(|| Error::Domain(format!("no primitive root mod {q}")))?;

    // Discrete-log table along g.
    let mut ind = vec![u64::MAX; q as usize];
    let mut pow = 1u64;
    for e in 0..phi {
        ind[pow as usize] = e;
        pow = pow * g % q;
    }

    let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
    for a in 0..q {
        if gcd(a, q) != 1 {
            continue;
        }
        let e = (index * ind[a as usize]) % phi;
        let angle = 2.0 * std::f64::consts::PI * e as f64 / phi as f64;
        values[a as usize] = Complex64::new(angle.cos(), angle.sin());
    }

    let parity = if values[(q - 1) as usize].re > 0.0 { 1 } else { -1 };

    // Primitivity: trivial on the subgroup 1 + (q/p)Z exactly when the
    // character is induced from the smaller modulus.
    let primitive = if index == 0 {
        false
    } else {
        let p_small = {
            let mut p = 2;
            while q % p != 0 {
                p += 1;
            }
            p
        };
        if q == p_small {
            true // prime modulus: every nonprincipal character is primitive
        } else {
            let a0 = (1 + q / p_small) % q;
            (values[a0 as usize] - Complex64::new(1.0, 0.0)).norm() > 1.0e-9
        }
    };

    Ok(DirichletChar {
        modulus: q,
        index,
        order: phi / gcd(index, phi),
        parity,
        primitive,
        values,
    })
}

/// All φ(q) characters mod q, indexed along the fixed generator.
pub fn all_characters(q: u64) -> Result<Vec<DirichletChar>> {
    cyclic_modulus_check(q)?;
    let phi = if q == 1 { 1 } else { euler_phi(q) };
    (0..phi).map(|i| dirichlet_char(q, i)).collect()
}

/// Gauss sum Σ_{a mod q} χ(a) e(a/q). Requires a primitive character
/// (|g(χ)| = √q then holds).
pub fn gauss_sum(chi: &DirichletChar) -> Result<Complex64> {
    if !chi.primitive {
        return Err(Error::Precondition(format!(
            "Gauss sum requires a primitive character (modulus {}, index {})",
            chi.modulus, chi.index
        )));
    }
    let q = chi.modulus;
    let mut acc = KahanComplex::new();
    for a in 0..q {
        let angle = 2.0 * std::f64::consts::PI * a as f64 / q as f64;
        acc.add(chi.eval(a as i64) * Complex64::new(angle.cos(), angle.sin()));
    }
    Ok(acc.value())
}

/// Partial second-moment sum Σ_{m ≤ Y} |c(m)|².
pub fn rankin_selberg_partial(table: &CoeffTable, y: usize) -> Result<f64> {
    if y == 0 {
        return Err(Error::Precondition("Y must be >= 1".into()));
    }
    if y > table.bound {
        return Err(Error::Coverage(format!(
            "Y = {y} exceeds table bound {}",
            table.bound
        )));
    }
    let mut acc = KahanSum::new();
    for m in 1..=y {
        acc.add(table.values[m].norm_sqr());
    }
    Ok(acc.value())
}
