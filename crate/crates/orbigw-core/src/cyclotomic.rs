//! The cyclotomic field `Q(zeta_{2(n+1)})`, realized as `Q[x] / Phi_{2(n+1)}(x)`.
//!
//! Conventions:
//! * `omega` is the class of `x`, a primitive `2(n+1)`-th root of unity,
//!   thought of as `exp(pi*i/(n+1))`.
//! * `zeta = omega^2` is the primitive `(n+1)`-th root `exp(2*pi*i/(n+1))`.
//! * Half-integer powers of `zeta` mean integer powers of `omega`:
//!   `zeta^(k/2) = omega^k`. Working in the doubled field makes those
//!   honest elements instead of notation.
//!
//! For `n = 0` the modulus is `Phi_2 = x + 1`, so the field degenerates to
//! `Q` with `omega = -1`, and every twisted-sector sum is empty; all formulas
//! remain valid without special-casing.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::{Coeff, Rational};

/// Dense polynomial helpers over the rationals; coefficient `i` multiplies `x^i`.
/// Leading zeros are trimmed so `deg = len - 1` (the zero polynomial is `[]`).
fn poly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    poly_trim(&mut out);
    out
}

/// Exact division with remainder; panics on a zero divisor.
fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut rem: Vec<Rational> = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lead_inv = b[db].inv();
    let mut quo = if rem.len() > db {
        vec![Rational::zero(); rem.len() - db]
    } else {
        Vec::new()
    };
    while rem.len() > db || (db == 0 && !rem.is_empty()) {
        let dr = rem.len() - 1;
        if dr < db {
            break;
        }
        let factor = &rem[dr] * &lead_inv;
        quo[dr - db] = factor.clone();
        for (i, bi) in b.iter().enumerate() {
            let delta = bi * &factor;
            rem[dr - db + i] -= delta;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    poly_trim(&mut quo);
    (quo, rem)
}

/// The `m`-th cyclotomic polynomial, by dividing `x^m - 1` by all lower
/// cyclotomic polynomials at proper divisors of `m`.
fn cyclotomic_poly(m: u32) -> Vec<Rational> {
    assert!(m >= 1);
    if m == 1 {
        return vec![-Rational::one(), Rational::one()];
    }
    let mut num = vec![Rational::zero(); (m + 1) as usize];
    num[0] = -Rational::one();
    num[m as usize] = Rational::one();
    let mut poly = num;
    for d in 1..m {
        if m % d == 0 {
            let (q, r) = poly_divmod(&poly, &cyclotomic_poly(d));
            assert!(r.is_empty(), "cyclotomic division must be exact");
            poly = q;
        }
    }
    poly
}

/// Shared description of the field `Q(omega)` with `omega` a primitive
/// `2(n+1)`-th root of unity.
pub struct FieldContext {
    n: u32,
    root_order: u32,
    modulus: Vec<Rational>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldContext(n={})", self.n)
    }
}

impl FieldContext {
    pub fn new(n: u32) -> Arc<Self> {
        let root_order = 2 * (n + 1);
        let modulus = cyclotomic_poly(root_order);
        Arc::new(FieldContext {
            n,
            root_order,
            modulus,
        })
    }

    /// The orbifold parameter `n` (the cyclic group is `Z_{n+1}`).
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Order of the cyclic group, `n + 1`.
    pub fn group_order(&self) -> u32 {
        self.n + 1
    }

    /// Order of `omega`, i.e. `2(n+1)`.
    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    /// Degree of the field over `Q` (degree of the modulus).
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

/// Element of `Q(omega)`, stored on the power basis `1, omega, ..., omega^(d-1)`.
#[derive(Clone)]
pub struct CyclotomicNumber {
    ctx: Arc<FieldContext>,
    coeffs: Vec<Rational>, // length == ctx.degree()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclotomicError {
    /// The element has a nonzero coordinate outside the rational line.
    NotRational,
    /// Inversion of zero.
    DivisionByZero,
}

impl fmt::Display for CyclotomicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyclotomicError::NotRational => write!(f, "element is not rational"),
            CyclotomicError::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

impl CyclotomicNumber {
    fn from_coeffs(ctx: &Arc<FieldContext>, mut coeffs: Vec<Rational>) -> Self {
        let deg = ctx.degree();
        poly_trim(&mut coeffs);
        if coeffs.len() > deg {
            let (_, rem) = poly_divmod(&coeffs, &ctx.modulus);
            coeffs = rem;
        }
        coeffs.resize(deg, Rational::zero());
        CyclotomicNumber {
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    pub fn zero(ctx: &Arc<FieldContext>) -> Self {
        CyclotomicNumber {
            ctx: Arc::clone(ctx),
            coeffs: vec![Rational::zero(); ctx.degree()],
        }
    }

    pub fn one(ctx: &Arc<FieldContext>) -> Self {
        Self::from_rational(ctx, Rational::one())
    }

    pub fn from_rational(ctx: &Arc<FieldContext>, q: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); ctx.degree()];
        coeffs[0] = q;
        CyclotomicNumber {
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    pub fn from_int(ctx: &Arc<FieldContext>, v: i64) -> Self {
        Self::from_rational(ctx, Rational::from_int(v))
    }

    /// `omega^k` for any integer `k` (reduced modulo the root order).
    pub fn omega_pow(ctx: &Arc<FieldContext>, k: i64) -> Self {
        let order = ctx.root_order() as i64;
        let k = k.rem_euclid(order) as usize;
        let mut mono = vec![Rational::zero(); k + 1];
        mono[k] = Rational::one();
        Self::from_coeffs(ctx, mono)
    }

    /// `zeta^k = omega^(2k)`, the primitive `(n+1)`-th root raised to `k`.
    pub fn zeta_pow(ctx: &Arc<FieldContext>, k: i64) -> Self {
        Self::omega_pow(ctx, 2 * k)
    }

    /// `zeta^(k/2) = omega^k`.
    pub fn zeta_half_pow(ctx: &Arc<FieldContext>, k: i64) -> Self {
        Self::omega_pow(ctx, k)
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    /// Coordinates on the power basis `1, omega, ..., omega^(deg-1)`.
    pub fn coords(&self) -> &[Rational] {
        &self.coeffs
    }

    fn assert_same_ctx(&self, rhs: &Self) {
        assert!(
            self.ctx.n == rhs.ctx.n,
            "mixed cyclotomic field contexts (n={} vs n={})",
            self.ctx.n,
            rhs.ctx.n
        );
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_same_ctx(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicNumber {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.assert_same_ctx(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CyclotomicNumber {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_same_ctx(rhs);
        Self::from_coeffs(&self.ctx, poly_mul(&self.coeffs, &rhs.coeffs))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| -a.clone()).collect();
        CyclotomicNumber {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * q).collect();
        CyclotomicNumber {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against the
    /// modulus (which is irreducible, so any nonzero element is a unit).
    pub fn inv(&self) -> Result<Self, CyclotomicError> {
        if self.is_zero() {
            return Err(CyclotomicError::DivisionByZero);
        }
        // Extended gcd of (self, modulus): track u with u*self = r (mod modulus).
        let mut r0: Vec<Rational> = self.coeffs.clone();
        poly_trim(&mut r0);
        let mut r1 = self.ctx.modulus.clone();
        let mut u0 = vec![Rational::one()];
        let mut u1: Vec<Rational> = Vec::new();
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let qu = poly_mul(&q, &u1);
            let mut nu: Vec<Rational> = Vec::new();
            let len = u0.len().max(qu.len());
            for i in 0..len {
                let a = u0.get(i).cloned().unwrap_or_else(Rational::zero);
                let b = qu.get(i).cloned().unwrap_or_else(Rational::zero);
                nu.push(&a - &b);
            }
            poly_trim(&mut nu);
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = nu;
        }
        // r0 is a nonzero constant gcd; u0 * self == r0 (mod modulus).
        assert!(r0.len() == 1, "modulus must be coprime to nonzero elements");
        let scale = r0[0].inv();
        let coeffs = u0.into_iter().map(|c| &c * &scale).collect();
        Ok(Self::from_coeffs(&self.ctx, coeffs))
    }

    /// Extracts the rational value if the element lies in `Q`.
    pub fn to_rational(&self) -> Result<Rational, CyclotomicError> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Ok(self.coeffs[0].clone())
        } else {
            Err(CyclotomicError::NotRational)
        }
    }

    /// Human-readable form as a polynomial in `w` (omega).
    pub fn format_omega(&self) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = match i {
                0 => format!("{c}"),
                1 => format!("{c}*w"),
                _ => format!("{c}*w^{i}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n && self.coeffs == other.coeffs
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_omega())
    }
}

impl Coeff for CyclotomicNumber {
    fn zero_like(&self) -> Self {
        CyclotomicNumber::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        CyclotomicNumber::one(&self.ctx)
    }
    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale_rat(&self, q: &Rational) -> Self {
        self.scale(q)
    }
}
