//! Polynomials in cotangent-line (psi) classes at marked points and half-edges,
//! graded by total degree, plus exact Lagrange interpolation.
//!
//! These polynomials live on a fixed moduli space, so everything above a given
//! total degree (the dimension) is zero; the bound is carried by the value and
//! enforced during multiplication.

use alloc::collections::BTreeMap;
use core::fmt;

use crate::rational::{factorial, Rational};

/// A psi-class variable: either the class at a numbered leg (marked point) or
/// at one of the two ends (0 or 1) of a numbered loop edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum PsiVar {
    Leg(u32),
    Half(u32, u8),
}

/// Monomial in psi variables; only positive exponents are stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct PsiMonomial(pub BTreeMap<PsiVar, u32>);

impl PsiMonomial {
    pub fn one() -> Self {
        PsiMonomial(BTreeMap::new())
    }

    pub fn var(v: PsiVar, e: u32) -> Self {
        let mut m = BTreeMap::new();
        if e > 0 {
            m.insert(v, e);
        }
        PsiMonomial(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn mul(&self, other: &PsiMonomial) -> PsiMonomial {
        let mut out = self.0.clone();
        for (v, e) in &other.0 {
            *out.entry(*v).or_insert(0) += e;
        }
        PsiMonomial(out)
    }
}

/// Rational polynomial in psi classes, truncated at `max_degree`.
#[derive(Clone, PartialEq, Eq)]
pub struct PsiPolynomial {
    max_degree: u32,
    terms: BTreeMap<PsiMonomial, Rational>,
}

impl PsiPolynomial {
    pub fn zero(max_degree: u32) -> Self {
        PsiPolynomial {
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(max_degree: u32) -> Self {
        Self::constant(max_degree, Rational::one())
    }

    pub fn constant(max_degree: u32, c: Rational) -> Self {
        let mut p = Self::zero(max_degree);
        p.add_term(PsiMonomial::one(), c);
        p
    }

    pub fn variable(max_degree: u32, v: PsiVar) -> Self {
        let mut p = Self::zero(max_degree);
        p.add_term(PsiMonomial::var(v, 1), Rational::one());
        p
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: PsiMonomial, c: Rational) {
        if c.is_zero() || m.degree() > self.max_degree {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
        }
    }

    pub fn coeff(&self, m: &PsiMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PsiMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.max_degree, rhs.max_degree, "mixed degree bounds");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.max_degree, rhs.max_degree, "mixed degree bounds");
        let mut out = Self::zero(self.max_degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                if m.degree() > self.max_degree {
                    continue;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * q);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.max_degree);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The degree-`d` homogeneous slice.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.max_degree);
        for (m, c) in &self.terms {
            if m.degree() == d {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Renames variables (used to specialize abstract edge variables to a
    /// concrete loop). The map must be injective on the variables present.
    pub fn rename_vars(&self, f: impl Fn(PsiVar) -> PsiVar) -> Self {
        let mut out = Self::zero(self.max_degree);
        for (m, c) in &self.terms {
            let mut nm = BTreeMap::new();
            for (v, e) in &m.0 {
                let nv = f(*v);
                assert!(
                    nm.insert(nv, *e).is_none(),
                    "variable renaming must be injective"
                );
            }
            out.add_term(PsiMonomial(nm), c.clone());
        }
        out
    }

    /// `exp(c * v)` truncated: `sum_k c^k v^k / k!`.
    pub fn exp_single(max_degree: u32, v: PsiVar, c: &Rational) -> Self {
        let mut out = Self::zero(max_degree);
        let mut cpow = Rational::one();
        for k in 0..=max_degree {
            out.add_term(PsiMonomial::var(v, k), &cpow / &factorial(k as u64));
            cpow = &cpow * c;
        }
        out
    }
}

impl fmt::Debug for PsiPolynomial {
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
            write!(f, "({c})")?;
            for (v, e) in &m.0 {
                match v {
                    PsiVar::Leg(i) => write!(f, "*psi{i}")?,
                    PsiVar::Half(j, s) => write!(f, "*psi[{j}.{s}]")?,
                }
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Exact value at 0 of the unique polynomial of degree `< points.len()`
/// through the given points (abscissas must be distinct).
pub fn lagrange_at_zero(points: &[(i64, Rational)]) -> Rational {
    let mut acc = Rational::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = Rational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            assert!(xi != xj, "duplicate interpolation nodes");
            basis *= Rational::new(-xj, xi - xj);
        }
        acc += &basis * yi;
    }
    acc
}
