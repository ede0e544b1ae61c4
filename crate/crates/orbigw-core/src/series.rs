//! Truncated multivariate formal power series over an exact coefficient ring.
//!
//! Variables are a distinguished `z` plus `nvars` variables `x_1..x_nvars`.
//! A monomial `z^e * x^(f_1,...,f_nvars)` is kept iff `e <= zmax` and
//! `f_1 + ... + f_nvars <= xmax`; everything outside that window is dropped
//! eagerly, so all ring operations are exact on the retained window.
//!
//! Coefficients are stored sparsely in a `BTreeMap` keyed by monomial, with
//! zero coefficients removed after every operation; iteration order (and hence
//! any serialization built on it) is therefore deterministic: by `z`-degree,
//! then lexicographically in the `x`-exponents.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::{Coeff, Rational};

/// Truncation window and variable count. Series with different windows do not mix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Truncation {
    pub zmax: u32,
    pub xmax: u32,
    pub nvars: usize,
}

impl Truncation {
    pub fn new(zmax: u32, xmax: u32, nvars: usize) -> Self {
        Truncation { zmax, xmax, nvars }
    }

    /// Single-variable window in `z` only.
    pub fn z_only(zmax: u32) -> Self {
        Truncation {
            zmax,
            xmax: 0,
            nvars: 0,
        }
    }

    fn keeps(&self, m: &Monomial) -> bool {
        m.z <= self.zmax && m.x.iter().sum::<u32>() <= self.xmax
    }
}

/// `z^z * prod_i x_i^(x[i-1])`. Ordering: `z`-degree first, then `x` exponents
/// lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Monomial {
    pub z: u32,
    pub x: Vec<u32>,
}

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial {
            z: 0,
            x: vec![0; nvars],
        }
    }

    pub fn z_pow(e: u32, nvars: usize) -> Self {
        Monomial {
            z: e,
            x: vec![0; nvars],
        }
    }

    /// `x_j` (1-based `j`).
    pub fn x_var(j: usize, nvars: usize) -> Self {
        assert!(j >= 1 && j <= nvars, "variable index out of range");
        let mut x = vec![0; nvars];
        x[j - 1] = 1;
        Monomial { z: 0, x }
    }

    pub fn total_x_degree(&self) -> u32 {
        self.x.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.x.len(), other.x.len());
        Monomial {
            z: self.z + other.z,
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    /// `unit_inverse` needs constant term exactly 1.
    NonUnitConstantTerm,
    /// `exp` needs constant term 0.
    NonzeroConstantTerm,
    /// `log` needs constant term 1.
    LogOfNonUnit,
    /// Substituting a series with nonzero constant term into a variable is
    /// unsound for a truncation (dropped tail would feed back into low order).
    UnsoundSubstitution,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::NonUnitConstantTerm => write!(f, "constant term is not 1"),
            SeriesError::NonzeroConstantTerm => write!(f, "constant term is not 0"),
            SeriesError::LogOfNonUnit => write!(f, "log of a series with constant term != 1"),
            SeriesError::UnsoundSubstitution => {
                write!(f, "substituted series has nonzero constant term")
            }
        }
    }
}

/// Sparse truncated power series with exact coefficients.
#[derive(Clone)]
pub struct TruncatedSeries<C: Coeff> {
    trunc: Truncation,
    proto: C, // an exemplar coefficient, used to mint 0 and 1 in context
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn zero(trunc: Truncation, proto: C) -> Self {
        TruncatedSeries {
            trunc,
            proto: proto.zero_like(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(trunc: Truncation, proto: C) -> Self {
        Self::constant(trunc, proto.one_like())
    }

    pub fn constant(trunc: Truncation, value: C) -> Self {
        let mut s = Self::zero(trunc, value.zero_like());
        s.add_term(Monomial::unit(trunc.nvars), value);
        s
    }

    pub fn monomial(trunc: Truncation, m: Monomial, value: C) -> Self {
        assert_eq!(m.x.len(), trunc.nvars, "monomial arity mismatch");
        let mut s = Self::zero(trunc, value.zero_like());
        s.add_term(m, value);
        s
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn proto(&self) -> &C {
        &self.proto
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `value` to the coefficient of `m`, dropping the term if the sum
    /// vanishes or the monomial is outside the window.
    pub fn add_term(&mut self, m: Monomial, value: C) {
        if value.is_zero() || !self.trunc.keeps(&m) {
            return;
        }
        debug_assert_eq!(m.x.len(), self.trunc.nvars);
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, value);
            }
            Some(old) => {
                let sum = old.add_ref(&value);
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
        }
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.proto.zero_like())
    }

    /// Coefficient of `z^e` in a series without `x`-variables in the monomial.
    pub fn coeff_z(&self, e: u32) -> C {
        self.coeff(&Monomial::z_pow(e, self.trunc.nvars))
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::unit(self.trunc.nvars))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn assert_compatible(&self, rhs: &Self) {
        assert_eq!(self.trunc, rhs.trunc, "mixed series truncations");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.neg_ref());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.trunc, self.proto.clone());
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg_ref());
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_compatible(rhs);
        let mut out = Self::zero(self.trunc, self.proto.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                if !self.trunc.keeps(&m) {
                    continue;
                }
                out.add_term(m, ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.trunc, self.proto.clone());
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.mul_ref(c));
        }
        out
    }

    pub fn scale_rat(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.trunc, self.proto.clone());
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.scale_rat(q));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.trunc, self.proto.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a series with constant term exactly 1.
    pub fn unit_inverse(&self) -> Result<Self, SeriesError> {
        let one = self.proto.one_like();
        if self.constant_term() != one {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        let one_s = Self::one(self.trunc, self.proto.clone());
        let mut inv = one_s.clone();
        // Newton iteration; the error valuation strictly increases, so this
        // terminates once the truncation window is exhausted.
        loop {
            let err = one_s.sub(&self.mul(&inv));
            if err.is_zero() {
                return Ok(inv);
            }
            inv = inv.add(&inv.mul(&err));
        }
    }

    /// `exp` of a series with zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let mut acc = Self::one(self.trunc, self.proto.clone());
        let mut power = Self::one(self.trunc, self.proto.clone());
        let mut k: u64 = 0;
        loop {
            power = power.mul(self);
            if power.is_zero() {
                return Ok(acc);
            }
            k += 1;
            let inv_kfact = Rational::one() / crate::rational::factorial(k);
            acc = acc.add(&power.scale_rat(&inv_kfact));
        }
    }

    /// `log` of a series with constant term exactly 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let one = self.proto.one_like();
        if self.constant_term() != one {
            return Err(SeriesError::LogOfNonUnit);
        }
        let u = self.sub(&Self::one(self.trunc, self.proto.clone()));
        let mut acc = Self::zero(self.trunc, self.proto.clone());
        let mut power = Self::one(self.trunc, self.proto.clone());
        let mut k: u64 = 0;
        loop {
            power = power.mul(&u);
            if power.is_zero() {
                return Ok(acc);
            }
            k += 1;
            let sign = if k % 2 == 1 {
                Rational::one()
            } else {
                -Rational::one()
            };
            acc = acc.add(&power.scale_rat(&(sign / Rational::from_int(k as i64))));
        }
    }

    /// Substitutes series for variables. Entries absent from the map leave the
    /// variable untouched. Every substituted series must have zero constant
    /// term: with a truncated representation, anything else would let the
    /// discarded tail contribute to retained coefficients.
    pub fn substitute(&self, subs: &Substitution<C>) -> Result<Self, SeriesError> {
        for s in subs.z.iter().chain(subs.x.values()) {
            if !s.constant_term().is_zero() {
                return Err(SeriesError::UnsoundSubstitution);
            }
            assert_eq!(s.trunc, self.trunc, "mixed series truncations");
        }
        let mut out = Self::zero(self.trunc, self.proto.clone());
        for (m, c) in &self.terms {
            let mut term = Self::constant(self.trunc, c.clone());
            let mut plain = Monomial::unit(self.trunc.nvars);
            match (&subs.z, m.z) {
                (Some(zs), e) if e > 0 => term = term.mul(&zs.pow(e)),
                _ => plain.z = m.z,
            }
            for (idx, &e) in m.x.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match subs.x.get(&(idx + 1)) {
                    Some(xs) => term = term.mul(&xs.pow(e)),
                    None => plain.x[idx] = e,
                }
            }
            term = term.mul(&Self::monomial(
                self.trunc,
                plain,
                self.proto.one_like(),
            ));
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Partial derivative with respect to `x_j` (1-based `j`).
    pub fn x_derivative(&self, j: usize) -> Self {
        assert!(j >= 1 && j <= self.trunc.nvars, "variable index out of range");
        let mut out = Self::zero(self.trunc, self.proto.clone());
        for (m, c) in &self.terms {
            let e = m.x[j - 1];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.x[j - 1] = e - 1;
            out.add_term(dm, c.scale_rat(&Rational::from_int(e as i64)));
        }
        out
    }

    /// Discards terms outside a new window of the same arity. Only shrinking
    /// makes sense: terms a larger window would have kept are already gone.
    pub fn truncated(&self, trunc: &Truncation) -> Self {
        assert_eq!(trunc.nvars, self.trunc.nvars, "arity mismatch");
        let mut out = Self::zero(*trunc, self.proto.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Applies `f` to every coefficient, producing a series over another ring.
    pub fn map_coeff<D: Coeff>(&self, proto: D, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        let mut out = TruncatedSeries::zero(self.trunc, proto);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl<C: Coeff> PartialEq for TruncatedSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && self.terms == other.terms
    }
}

impl<C: Coeff> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            if m.z > 0 {
                write!(f, "*z^{}", m.z)?;
            }
            for (i, &e) in m.x.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// Assignment of replacement series to variables, for [`TruncatedSeries::substitute`].
pub struct Substitution<C: Coeff> {
    pub z: Option<TruncatedSeries<C>>,
    pub x: BTreeMap<usize, TruncatedSeries<C>>,
}

impl<C: Coeff> Substitution<C> {
    pub fn none() -> Self {
        Substitution {
            z: None,
            x: BTreeMap::new(),
        }
    }

    pub fn for_z(s: TruncatedSeries<C>) -> Self {
        Substitution {
            z: Some(s),
            x: BTreeMap::new(),
        }
    }

    pub fn for_x(j: usize, s: TruncatedSeries<C>) -> Self {
        let mut x = BTreeMap::new();
        x.insert(j, s);
        Substitution { z: None, x }
    }
}
