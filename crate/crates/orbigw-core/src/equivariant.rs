//! Equivariant scalars `c0 + c1*T` over a cyclotomic field.
//!
//! `T = t1 + t2` is the only combination of the two torus weights that
//! survives in the invariants computed here, and it only ever appears to the
//! first power. The type enforces that: products whose `T`-degree would reach
//! two are rejected, so any attempt to leave the honest value space is caught
//! at the arithmetic level instead of silently truncated.

use alloc::sync::Arc;
use core::fmt;

use crate::cyclotomic::{CyclotomicNumber, FieldContext};
use crate::rational::{Coeff, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivariantError {
    /// The product would contain a `T^2` term.
    DegreeOverflow,
}

impl fmt::Display for EquivariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivariantError::DegreeOverflow => {
                write!(f, "product has T-degree 2, outside the tracked ring")
            }
        }
    }
}

/// `c0 + c1*T` with cyclotomic coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct EquivariantScalar {
    c0: CyclotomicNumber,
    c1: CyclotomicNumber,
}

impl EquivariantScalar {
    pub fn new(c0: CyclotomicNumber, c1: CyclotomicNumber) -> Self {
        EquivariantScalar { c0, c1 }
    }

    pub fn zero(ctx: &Arc<FieldContext>) -> Self {
        EquivariantScalar {
            c0: CyclotomicNumber::zero(ctx),
            c1: CyclotomicNumber::zero(ctx),
        }
    }

    pub fn one(ctx: &Arc<FieldContext>) -> Self {
        EquivariantScalar {
            c0: CyclotomicNumber::one(ctx),
            c1: CyclotomicNumber::zero(ctx),
        }
    }

    /// Embeds a `T`-free scalar.
    pub fn constant(c0: CyclotomicNumber) -> Self {
        let c1 = CyclotomicNumber::zero(c0.context());
        EquivariantScalar { c0, c1 }
    }

    /// `c * T`.
    pub fn t_times(c1: CyclotomicNumber) -> Self {
        let c0 = CyclotomicNumber::zero(c1.context());
        EquivariantScalar { c0, c1 }
    }

    pub fn from_rational(ctx: &Arc<FieldContext>, q: Rational) -> Self {
        Self::constant(CyclotomicNumber::from_rational(ctx, q))
    }

    /// `q * T` for rational `q`.
    pub fn t_times_rational(ctx: &Arc<FieldContext>, q: Rational) -> Self {
        Self::t_times(CyclotomicNumber::from_rational(ctx, q))
    }

    pub fn c0(&self) -> &CyclotomicNumber {
        &self.c0
    }

    pub fn c1(&self) -> &CyclotomicNumber {
        &self.c1
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        self.c0.context()
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        EquivariantScalar {
            c0: self.c0.add(&rhs.c0),
            c1: self.c1.add(&rhs.c1),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        EquivariantScalar {
            c0: self.c0.sub(&rhs.c0),
            c1: self.c1.sub(&rhs.c1),
        }
    }

    pub fn neg(&self) -> Self {
        EquivariantScalar {
            c0: self.c0.neg(),
            c1: self.c1.neg(),
        }
    }

    /// Multiplication, failing if the result would have a `T^2` part.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self, EquivariantError> {
        let t2 = self.c1.mul(&rhs.c1);
        if !t2.is_zero() {
            return Err(EquivariantError::DegreeOverflow);
        }
        Ok(EquivariantScalar {
            c0: self.c0.mul(&rhs.c0),
            c1: self.c0.mul(&rhs.c1).add(&self.c1.mul(&rhs.c0)),
        })
    }

    pub fn scale_cyclotomic(&self, c: &CyclotomicNumber) -> Self {
        EquivariantScalar {
            c0: self.c0.mul(c),
            c1: self.c1.mul(c),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        EquivariantScalar {
            c0: self.c0.scale(q),
            c1: self.c1.scale(q),
        }
    }
}

impl fmt::Debug for EquivariantScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) + ({})*T",
            self.c0.format_omega(),
            self.c1.format_omega()
        )
    }
}

impl Coeff for EquivariantScalar {
    fn zero_like(&self) -> Self {
        EquivariantScalar::zero(self.context())
    }
    fn one_like(&self) -> Self {
        EquivariantScalar::one(self.context())
    }
    fn is_zero(&self) -> bool {
        EquivariantScalar::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.try_mul(rhs)
            .expect("T-degree overflow in ring multiplication")
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale_rat(&self, q: &Rational) -> Self {
        self.scale(q)
    }
}
