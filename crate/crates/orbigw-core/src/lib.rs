//! Exact arithmetic for rubber Gromov-Witten invariants of the orbifolds
//! `[C^2/Z_{n+1}] x P^1` and for the crepant-resolution identities relating
//! them to the `A_n` surface geometry.
//!
//! Everything is computed over exact coefficient rings: arbitrary-precision
//! rationals, cyclotomic fields `Q(zeta_{2(n+1)})`, and a two-dimensional
//! equivariant ring `Q(zeta)[T]/(T^2)` tracking the weight `T = t1 + t2`.
//! There is no floating point anywhere; all verification routes compare
//! exact values for equality.
//!
//! The crate is `no_std` (with `alloc`). IO, serialization and the command
//! line interface live in the companion crate `orbigw-cli`.
//!
//! Module map:
//! * [`rational`] - arbitrary-precision rationals and the coefficient-ring trait.
//! * [`cyclotomic`] - the field `Q(zeta_{2(n+1)})` as `Q[x]/Phi_{2(n+1)}(x)`.
//! * [`equivariant`] - scalars `c0 + c1*T` with degree tracking in `T`.
//! * [`series`] - truncated multivariate formal power series over any coefficient ring.
//! * [`psi`] - polynomials in cotangent (psi) classes and exact Lagrange interpolation.
//! * [`bernoulli`] - Bernoulli numbers/polynomials and the hyperbolic series built from them.
//! * [`partition`] - decorated partitions, monodromy vectors, automorphisms, enumeration.
//! * [`fock`] - the basis change between twisted-sector and fixed-point bases.
//! * [`pixton`] - one-vertex double ramification cycles: r-sampling vs closed form.
//! * [`hodge`] - obstruction ranks and the closed descendent formula in two forms.
//! * [`rubber`] - the rubber invariant dispatcher, main formula, and its raw oracle.
//! * [`crepant`] - resummed closed-form series, change of variables, crepant verification.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bernoulli;
pub mod crepant;
pub mod cyclotomic;
pub mod equivariant;
pub mod fock;
pub mod hodge;
pub mod partition;
pub mod pixton;
pub mod psi;
pub mod rational;
pub mod rubber;
pub mod series;

pub use cyclotomic::{CyclotomicNumber, FieldContext};
pub use equivariant::EquivariantScalar;
pub use rational::{Coeff, Rational};
pub use series::TruncatedSeries;
