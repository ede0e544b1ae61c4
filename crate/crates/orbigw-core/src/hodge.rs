//! Obstruction-bundle ranks, virtual dimensions, and the closed descendent
//! formula for the local orbifold `[C^2/Z_{n+1}]`, in two algebraically
//! distinct forms (a subset sum and a root-of-unity sum) that must agree.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::bernoulli::BernoulliCache;
use crate::cyclotomic::{CyclotomicNumber, FieldContext};
use crate::equivariant::EquivariantScalar;
use crate::rational::{odd_double_factorial, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HodgeError {
    /// The decoration sum is not divisible by `n+1`, so the ranks are not
    /// integers and the moduli problem is empty.
    ParityViolation,
    PreconditionViolation(String),
}

impl fmt::Display for HodgeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HodgeError::ParityViolation => write!(f, "decoration sum is not 0 mod n+1"),
            HodgeError::PreconditionViolation(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

/// Ranks of the two weight pieces of the obstruction bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObstructionRanks {
    pub r1: i64,
    pub r2: i64,
    /// 1 iff every marking is untwisted (the unsupported smooth regime).
    pub delta: u32,
}

/// Whether `delta` is detected from the decorations or pinned to zero (the
/// descendent formula always uses zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMode {
    Auto,
    ForceZero,
}

/// Rank formulas, with decorations given as representatives in `{0..n}`:
///
/// ```text
/// r1 = g - 1 + delta + (sum of decorations)/(n+1)
/// r2 = g - 1 + delta + (sum over nonzero decorations of (n+1-dec))/(n+1)
/// ```
///
/// `r1 + r2 = 2g - 2 + 2*delta + #nontrivial`, each nontrivial decoration
/// contributing exactly 1.
pub fn obstruction_ranks(
    n: u32,
    g: u32,
    decorations: &[u32],
    mode: DeltaMode,
) -> Result<ObstructionRanks, HodgeError> {
    let np1 = (n + 1) as u64;
    debug_assert!(decorations.iter().all(|&d| d <= n));
    let delta = match mode {
        DeltaMode::ForceZero => 0,
        DeltaMode::Auto => u32::from(decorations.iter().all(|&d| d == 0)),
    };
    let sum: u64 = decorations.iter().map(|&d| d as u64).sum();
    if sum % np1 != 0 {
        return Err(HodgeError::ParityViolation);
    }
    let nontrivial = decorations.iter().filter(|&&d| d != 0).count() as i64;
    let r1 = g as i64 - 1 + delta as i64 + (sum / np1) as i64;
    let r2 = g as i64 - 1 + delta as i64 + nontrivial - (sum / np1) as i64;
    Ok(ObstructionRanks { r1, r2, delta })
}

/// Virtual dimension of the relative theory with `r` relative fibers over
/// partitions of `m`: `2g - 2 + p + sum of lengths - (r-2) m`.
pub fn vdim_relative(g: u32, p: usize, lengths: &[usize], r: u32, m: u64) -> i64 {
    2 * g as i64 - 2 + p as i64 + lengths.iter().map(|&l| l as i64).sum::<i64>()
        - (r as i64 - 2) * m as i64
}

/// Rubber dimension `d = 2g - 3 + p + l(mu) + l(nu)` (one less than the
/// two-fiber relative dimension, from quotienting the scaling action).
pub fn rubber_dim(g: u32, p: usize, l_mu: usize, l_nu: usize) -> i64 {
    2 * g as i64 - 3 + p as i64 + l_mu as i64 + l_nu as i64
}

/// One descendent insertion `tau_k(a)` with a nonzero twisted sector `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DescendentInsertion {
    pub k: u32,
    pub a: u32,
}

/// Which algebraic form of the descendent formula to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescendentForm {
    /// Sum over subset splittings `I ⊔ J = [N]`.
    Subset,
    /// Root-of-unity sum over nonzero sectors `l` (the "twisted part").
    Cyclotomic,
}

/// Whether to include the `N = 2` correction term. The two-form oracle keeps
/// it; the elimination identity for rubber invariants is stated without it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionMode {
    Include,
    Omit,
}

fn validate(
    n: u32,
    g: u32,
    insertions: &[DescendentInsertion],
) -> Result<(i64, i64), HodgeError> {
    let np1 = (n + 1) as u64;
    let nn = insertions.len() as i64;
    for ins in insertions {
        if ins.a == 0 || ins.a > n {
            return Err(HodgeError::PreconditionViolation(alloc::format!(
                "sector {} outside 1..={n}",
                ins.a
            )));
        }
    }
    let ksum: u64 = insertions.iter().map(|i| i.k as u64).sum();
    if ksum != g as u64 {
        return Err(HodgeError::PreconditionViolation(String::from(
            "descendent exponents must sum to g",
        )));
    }
    let asum: u64 = insertions.iter().map(|i| i.a as u64).sum();
    if asum % np1 != 0 {
        return Err(HodgeError::PreconditionViolation(String::from(
            "sector sum must vanish mod n+1",
        )));
    }
    let r = 2 * g as i64 - 2 + nn;
    if r < 1 {
        return Err(HodgeError::PreconditionViolation(String::from(
            "total rank must be at least 1",
        )));
    }
    let r1 = g as i64 - 1 + (asum / np1) as i64;
    Ok((r, r1))
}

/// The descendent integral `< prod_j tau_{k_j}(a_j) >_g` of the local orbifold,
/// as a pure `T`-multiple. Requires all sectors nonzero, `sum k_j = g`,
/// `sum a_j = 0 mod n+1`, and total rank `2g
/// - 2 + N >= 1`.
///
/// Subset form:
///
/// ```text
/// T (n+1)^(2g-1) (-1)^(r1) / 2
///   * sum_{I ⊔ J = [N]} [B_r(c(I)/(n+1)) / r] (-1)^|J| / (4^g prod_j (2k_j+1)!!)
/// + [N = 2] * T (n+1)^(2g-1) (-1)^g [sum_c B_{2g}(c/(n+1)) / 2g]
///   / (4^(g-1) prod_{k_j > 0} (2k_j - 1)!!)
/// ```
///
/// with `c(I) = -sum_{i in I} a_i` reduced into `{0..n}` and `r = r1 + r2 =
/// 2g - 2 + N`. The cyclotomic form replaces the subset sum by
/// `(1/(n+1)) sum_{l=1}^{n} sum_{c=0}^{n} zeta^(lc) [B_r(c/(n+1))/r] prod_j (zeta^(l a_j) - 1)`,
/// whose value is rational by Galois invariance.
pub fn descendent_integral(
    ctx: &Arc<FieldContext>,
    g: u32,
    insertions: &[DescendentInsertion],
    form: DescendentForm,
    correction: CorrectionMode,
) -> Result<EquivariantScalar, HodgeError> {
    let n = ctx.n();
    let (r, r1) = validate(n, g, insertions)?;
    let np1 = Rational::from_int(n as i64 + 1);
    let cache = BernoulliCache::new((r as u32).max(2 * g));

    // 1 / (4^g prod (2k_j + 1)!!)
    let mut denom = Rational::from_int(4).pow(g as i64);
    for ins in insertions {
        denom *= odd_double_factorial(2 * ins.k as u64 + 1);
    }
    let sign_r1 = if r1.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    // T (n+1)^(2g-1) (-1)^(r1) / 2 / denom
    let prefactor = &(&np1.pow(2 * g as i64 - 1) * &sign_r1) / &(&Rational::from_int(2) * &denom);

    let main: Rational = match form {
        DescendentForm::Subset => {
            let nn = insertions.len();
            let mut acc = Rational::zero();
            for mask in 0u32..(1 << nn) {
                let mut csum: i64 = 0;
                for (i, ins) in insertions.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        csum -= ins.a as i64;
                    }
                }
                let c = csum.rem_euclid(n as i64 + 1);
                let b = cache.poly_at(r as u32, &(Rational::from_int(c) / np1.clone()));
                let j_odd = (nn as u32 - mask.count_ones()) % 2 == 1;
                if j_odd {
                    acc -= b;
                } else {
                    acc += b;
                }
            }
            acc / Rational::from_int(r)
        }
        DescendentForm::Cyclotomic => {
            let mut acc = CyclotomicNumber::zero(ctx);
            for l in 1..=n as i64 {
                let mut prod = CyclotomicNumber::one(ctx);
                for ins in insertions {
                    let factor = CyclotomicNumber::zeta_pow(ctx, l * ins.a as i64)
                        .sub(&CyclotomicNumber::one(ctx));
                    prod = prod.mul(&factor);
                }
                for c in 0..=n as i64 {
                    let b = cache.poly_at(r as u32, &(Rational::from_int(c) / np1.clone()));
                    let w = CyclotomicNumber::zeta_pow(ctx, l * c)
                        .scale(&(b / Rational::from_int(r)));
                    acc = acc.add(&w.mul(&prod));
                }
            }
            acc = acc.scale(&np1.inv());
            // Galois invariance makes this rational; anything else is a bug.
            acc.to_rational().expect("sector sum must be rational")
        }
    };

    let mut value = &prefactor * &main;

    if correction == CorrectionMode::Include && insertions.len() == 2 {
        // This term only arises for g >= 1 (g = 0 with N = 2 fails r >= 1).
        debug_assert!(g >= 1);
        let mut csum = Rational::zero();
        for c in 0..=n as i64 {
            csum += cache.poly_at(2 * g, &(Rational::from_int(c) / np1.clone()));
        }
        csum = csum / Rational::from_int(2 * g as i64);
        let sign_g = if g % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        let mut corr_denom = Rational::from_int(4).pow(g as i64 - 1);
        for ins in insertions {
            if ins.k > 0 {
                corr_denom *= odd_double_factorial(2 * ins.k as u64 - 1);
            }
        }
        value += &(&(&np1.pow(2 * g as i64 - 1) * &sign_g) * &csum) / &corr_denom;
    }

    Ok(EquivariantScalar::t_times_rational(ctx, value))
}

/// Subset/cyclotomic cross-check on one input.
pub fn descendent_forms_agree(
    ctx: &Arc<FieldContext>,
    g: u32,
    insertions: &[DescendentInsertion],
) -> Result<bool, HodgeError> {
    let a = descendent_integral(ctx, g, insertions, DescendentForm::Subset, CorrectionMode::Include)?;
    let b = descendent_integral(
        ctx,
        g,
        insertions,
        DescendentForm::Cyclotomic,
        CorrectionMode::Include,
    )?;
    Ok(a == b)
}

/// Convenience: the rational coefficient of `T` (every descendent integral is
/// a pure `T`-multiple with rational coefficient).
pub fn descendent_t_coefficient(
    ctx: &Arc<FieldContext>,
    g: u32,
    insertions: &[DescendentInsertion],
    correction: CorrectionMode,
) -> Result<Rational, HodgeError> {
    let v = descendent_integral(ctx, g, insertions, DescendentForm::Subset, correction)?;
    Ok(v.c1().to_rational().expect("subset form is rational"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn ins(pairs: &[(u32, u32)]) -> Vec<DescendentInsertion> {
        pairs.iter().map(|&(k, a)| DescendentInsertion { k, a }).collect()
    }

    #[test]
    fn ranks() {
        let r = obstruction_ranks(1, 1, &[1, 1], DeltaMode::ForceZero).unwrap();
        assert_eq!((r.r1, r.r2, r.delta), (1, 1, 0));
        let r = obstruction_ranks(1, 0, &[1, 1, 1, 1], DeltaMode::ForceZero).unwrap();
        assert_eq!((r.r1, r.r2), (1, 1));
        let r = obstruction_ranks(1, 0, &[], DeltaMode::Auto).unwrap();
        assert_eq!((r.r1, r.r2, r.delta), (0, 0, 1));
        assert_eq!(
            obstruction_ranks(1, 1, &[1], DeltaMode::ForceZero),
            Err(HodgeError::ParityViolation)
        );
        // Total rank: 2g - 2 + 2 delta + #nontrivial.
        for (n, g, decs) in [(2u32, 3u32, alloc::vec![1u32, 2, 1, 2]), (3, 1, alloc::vec![1, 3, 0, 2, 2])] {
            if let Ok(r) = obstruction_ranks(n, g, &decs, DeltaMode::Auto) {
                let nontrivial = decs.iter().filter(|&&d| d != 0).count() as i64;
                assert_eq!(
                    r.r1 + r.r2,
                    2 * g as i64 - 2 + 2 * r.delta as i64 + nontrivial
                );
            }
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(vdim_relative(0, 0, &[1, 1], 2, 7), 0);
        assert_eq!(rubber_dim(0, 0, 1, 1), -1);
        assert_eq!(rubber_dim(1, 0, 1, 1), 1);
        assert_eq!(rubber_dim(0, 1, 1, 1), 0);
    }

    #[test]
    fn quartic_point_insertions() {
        // n=1, g=0, four tau_0(1) insertions: value -T/4.
        let ctx = FieldContext::new(1);
        let v = descendent_integral(
            &ctx,
            0,
            &ins(&[(0, 1), (0, 1), (0, 1), (0, 1)]),
            DescendentForm::Subset,
            CorrectionMode::Include,
        )
        .unwrap();
        assert!(v.c0().is_zero());
        assert_eq!(v.c1().to_rational().unwrap(), Rational::new(-1, 4));
        let w = descendent_integral(
            &ctx,
            0,
            &ins(&[(0, 1), (0, 1), (0, 1), (0, 1)]),
            DescendentForm::Cyclotomic,
            CorrectionMode::Include,
        )
        .unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn two_point_with_correction() {
        // n=1, g=1, insertions tau_1(1) tau_0(1): subset part -T/48,
        // correction -T/12, total -5T/48.
        let ctx = FieldContext::new(1);
        let list = ins(&[(1, 1), (0, 1)]);
        let bare = descendent_t_coefficient(&ctx, 1, &list, CorrectionMode::Omit).unwrap();
        assert_eq!(bare, Rational::new(-1, 48));
        let full = descendent_t_coefficient(&ctx, 1, &list, CorrectionMode::Include).unwrap();
        assert_eq!(full, Rational::new(-5, 48));
        assert!(descendent_forms_agree(&ctx, 1, &list).unwrap());
    }

    #[test]
    fn preconditions() {
        let ctx = FieldContext::new(1);
        // Sector sum odd.
        assert!(descendent_integral(
            &ctx,
            0,
            &ins(&[(0, 1), (0, 1), (0, 1)]),
            DescendentForm::Subset,
            CorrectionMode::Include
        )
        .is_err());
        // k-sum mismatch.
        assert!(descendent_integral(
            &ctx,
            2,
            &ins(&[(0, 1), (0, 1), (0, 1), (0, 1)]),
            DescendentForm::Subset,
            CorrectionMode::Include
        )
        .is_err());
        // g = 0, N = 2: rank 0.
        assert!(descendent_integral(
            &ctx,
            0,
            &ins(&[(0, 1), (0, 1)]),
            DescendentForm::Subset,
            CorrectionMode::Include
        )
        .is_err());
        // Zero sector.
        assert!(descendent_integral(
            &ctx,
            1,
            &ins(&[(1, 0), (0, 1), (0, 1)]),
            DescendentForm::Subset,
            CorrectionMode::Include
        )
        .is_err());
    }

    #[test]
    fn insertion_order_irrelevant() {
        let ctx = FieldContext::new(2);
        let a = ins(&[(1, 1), (0, 2), (1, 1), (0, 2)]);
        let b = ins(&[(0, 2), (1, 1), (0, 2), (1, 1)]);
        let va = descendent_integral(&ctx, 2, &a, DescendentForm::Subset, CorrectionMode::Include)
            .unwrap();
        let vb = descendent_integral(&ctx, 2, &b, DescendentForm::Subset, CorrectionMode::Include)
            .unwrap();
        assert_eq!(va, vb);
        assert!(descendent_forms_agree(&ctx, 2, &a).unwrap());
    }
}
