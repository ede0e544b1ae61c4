//! Bernoulli numbers, Bernoulli polynomials, and the hyperbolic series built
//! from them, together with the regularized power sums used by the resummed
//! generating functions.
//!
//! Conventions: `B_1 = -1/2` (so `B_m(0) = B_m` for all `m`), and
//!
//! ```text
//! B_m(t)    = sum_j C(m,j) B_j t^(m-j)
//! F(z)      = sum_{k>=1} B_{2k} z^(2k) / (2k)!
//! S(z)      = sinh(z/2) / (z/2) = sum_{k>=0} z^(2k) / (4^k (2k+1)!)
//! intF(z)   = sum_{k>=1} B_{2k} z^(2k) / ((2k) (2k)!)     (so exp(intF) = S)
//! ```

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cyclotomic::{CyclotomicNumber, FieldContext};
use crate::rational::{binomial, factorial, Rational};
use crate::series::{Monomial, Truncation, TruncatedSeries};

/// Precomputed table of Bernoulli numbers `B_0 .. B_max`.
///
/// The table is fixed at construction; asking past the end is a sizing bug at
/// the call site and panics.
pub struct BernoulliCache {
    nums: Vec<Rational>,
}

impl BernoulliCache {
    pub fn new(max_index: u32) -> Self {
        let mut nums: Vec<Rational> = Vec::with_capacity(max_index as usize + 1);
        nums.push(Rational::one());
        for k in 1..=max_index as u64 {
            // B_k = -1/(k+1) * sum_{j<k} C(k+1, j) B_j
            let mut acc = Rational::zero();
            for (j, bj) in nums.iter().enumerate() {
                acc += &binomial(k + 1, j as u64) * bj;
            }
            nums.push(acc / -Rational::from_int(k as i64 + 1));
        }
        BernoulliCache { nums }
    }

    pub fn max_index(&self) -> u32 {
        (self.nums.len() - 1) as u32
    }

    pub fn number(&self, k: u32) -> &Rational {
        self.nums
            .get(k as usize)
            .unwrap_or_else(|| panic!("Bernoulli cache sized to {} but B_{k} requested", self.max_index()))
    }

    /// `B_m(x)` evaluated at a rational point.
    pub fn poly_at(&self, m: u32, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut xpow = Rational::one(); // x^(m-j) built from the top down
        for j in (0..=m).rev() {
            acc += &(&binomial(m as u64, j as u64) * self.number(j)) * &xpow;
            xpow *= x.clone();
        }
        acc
    }

    /// Coefficients of `B_m(x)` as a polynomial in `x` (index = power of `x`).
    pub fn poly_coeffs(&self, m: u32) -> Vec<Rational> {
        let mut out = alloc::vec![Rational::zero(); m as usize + 1];
        for j in 0..=m {
            out[(m - j) as usize] = &binomial(m as u64, j as u64) * self.number(j);
        }
        out
    }
}

/// One-off `B_k` without keeping a cache around.
pub fn bernoulli_number(k: u32) -> Rational {
    BernoulliCache::new(k).number(k).clone()
}

/// `F(z) = sum_{k>=1} B_{2k} z^(2k) / (2k)!` truncated at `zmax`.
pub fn f_series(zmax: u32) -> TruncatedSeries<Rational> {
    let cache = BernoulliCache::new(zmax);
    let trunc = Truncation::z_only(zmax);
    let mut s = TruncatedSeries::zero(trunc, Rational::zero());
    let mut k = 1u32;
    while 2 * k <= zmax {
        let c = cache.number(2 * k) / &factorial(2 * k as u64);
        s.add_term(Monomial::z_pow(2 * k, 0), c);
        k += 1;
    }
    s
}

/// `intF(z) = sum_{k>=1} B_{2k} z^(2k) / ((2k)(2k)!)`, the formal primitive of
/// `F(z)/z`, truncated at `zmax`.
pub fn integral_f_over_z(zmax: u32) -> TruncatedSeries<Rational> {
    let cache = BernoulliCache::new(zmax);
    let trunc = Truncation::z_only(zmax);
    let mut s = TruncatedSeries::zero(trunc, Rational::zero());
    let mut k = 1u32;
    while 2 * k <= zmax {
        let c = cache.number(2 * k) / &(&factorial(2 * k as u64) * &Rational::from_int(2 * k as i64));
        s.add_term(Monomial::z_pow(2 * k, 0), c);
        k += 1;
    }
    s
}

/// `S(a z) = sinh(a z / 2) / (a z / 2)` truncated at `zmax`, for rational `a`.
pub fn s_series_scaled(zmax: u32, a: &Rational) -> TruncatedSeries<Rational> {
    let trunc = Truncation::z_only(zmax);
    let mut s = TruncatedSeries::zero(trunc, Rational::zero());
    let mut apow = Rational::one();
    let mut k = 0u32;
    while 2 * k <= zmax {
        // a^(2k) / (4^k (2k+1)!)
        let denom = &Rational::from_int(4).pow(k as i64) * &factorial(2 * k as u64 + 1);
        s.add_term(Monomial::z_pow(2 * k, 0), &apow / &denom);
        k += 1;
        apow = &apow * &(a * a);
    }
    s
}

/// `S(z)` itself.
pub fn s_series(zmax: u32) -> TruncatedSeries<Rational> {
    s_series_scaled(zmax, &Rational::one())
}

/// Abel-regularized power sum `sum_{d>=1} d^K zeta^(l d)` for `K >= 0` and
/// `1 <= l <= n`:
///
/// ```text
/// regpow(K, l) = -(n+1)^K sum_{c=0}^{n} zeta^(l c) B_{K+1}(c/(n+1)) / (K+1)  -  [K = 0]
/// ```
///
/// The `K = -1` case (a regularized logarithm) is deliberately not defined.
pub fn regularized_power_sum(
    ctx: &Arc<FieldContext>,
    cache: &BernoulliCache,
    k: u32,
    l: u32,
) -> CyclotomicNumber {
    let n = ctx.n();
    assert!(l >= 1 && l <= n, "sector index out of range: l={l}, n={n}");
    let np1 = Rational::from_int(n as i64 + 1);
    let mut acc = CyclotomicNumber::zero(ctx);
    for c in 0..=n {
        let b = cache.poly_at(k + 1, &(Rational::from_int(c as i64) / np1.clone()));
        acc = acc.add(
            &CyclotomicNumber::zeta_pow(ctx, (l as i64) * (c as i64))
                .scale(&(b / Rational::from_int(k as i64 + 1))),
        );
    }
    let mut out = acc.scale(&-np1.pow(k as i64));
    if k == 0 {
        out = out.sub(&CyclotomicNumber::one(ctx));
    }
    out
}

/// `B_m(1-x) = (-1)^m B_m(x)` as an identity of polynomial coefficients.
pub fn check_reflection(cache: &BernoulliCache, m: u32) -> bool {
    let coeffs = cache.poly_coeffs(m);
    // Expand B_m(1-x) = sum_j coeffs[j] (1-x)^j.
    let mut reflected = alloc::vec![Rational::zero(); m as usize + 1];
    for (j, cj) in coeffs.iter().enumerate() {
        for i in 0..=j {
            let sign = if i % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            reflected[i] += &(&binomial(j as u64, i as u64) * cj) * &sign;
        }
    }
    let sign = if m % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    coeffs
        .iter()
        .zip(&reflected)
        .all(|(c, r)| r == &(c * &sign))
}

/// `sum_{k=0}^{m-1} (2m)! / ((2k+1)! (2(m-1-k)+1)!) = 2^(2m-1)`.
pub fn check_odd_binomial_sum(m: u32) -> bool {
    let mut acc = Rational::zero();
    let numer = factorial(2 * m as u64);
    for k in 0..m {
        let d1 = factorial(2 * k as u64 + 1);
        let d2 = factorial(2 * (m - 1 - k) as u64 + 1);
        acc += &numer / &(&d1 * &d2);
    }
    acc == Rational::from_int(2).pow(2 * m as i64 - 1)
}

/// `exp(intF) = S` through the truncation window.
pub fn check_exp_integral_is_s(zmax: u32) -> bool {
    integral_f_over_z(zmax).exp().unwrap() == s_series(zmax)
}
