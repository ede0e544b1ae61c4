//! Basis change between the twisted-sector basis and the fixed-point basis of
//! the resolution, together with the linear change of variables it induces.
//!
//! The whole transform is driven by one `n x n` matrix over `Q(omega)`:
//!
//! ```text
//! c[a,j] = (zeta^(a/2) - zeta^(-a/2)) * zeta^(a j) / (n+1),   a, j in {1..n}
//! ```
//!
//! * Sector insertions map to fixed-point insertions: `e_a -> sum_j c[a,j] w_j`
//!   (with the untwisted `e_0` mapping to the unit class).
//! * The series variables transform by the same matrix:
//!   `y_j = sum_a c[a,j] x_a`.
//! * Partial sums `y_{s->t} = y_s + ... + y_t` ("windows") are what the
//!   resummed generating functions are naturally written in; the key lemma
//!   below rewrites a sector-side linear form as a single signed window.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cyclotomic::{CyclotomicNumber, FieldContext};
use crate::partition::WeightedPartition;
use crate::rational::Rational;

/// `c[a,j]` as above. Requires `1 <= a, j <= n`.
pub fn sector_coeff(ctx: &Arc<FieldContext>, a: u32, j: u32) -> CyclotomicNumber {
    let n = ctx.n();
    assert!(a >= 1 && a <= n && j >= 1 && j <= n, "indices must be in 1..=n");
    let half = CyclotomicNumber::zeta_half_pow(ctx, a as i64)
        .sub(&CyclotomicNumber::zeta_half_pow(ctx, -(a as i64)));
    half.mul(&CyclotomicNumber::zeta_pow(ctx, (a as i64) * (j as i64)))
        .scale(&(Rational::one() / Rational::from_int(n as i64 + 1)))
}

/// `g[a,j]`, the inverse matrix to `c[a,j]`: the unique solution of
/// `sum_a c[a,j] g[a,k] = delta_{jk}`. Telescoping the geometric sums gives
/// the closed form
///
/// ```text
/// g[a,j] = (zeta^(-a j) - 1) / (zeta^(a/2) - zeta^(-a/2))
///        = -sum_{q=1}^{j} zeta^(a(1-2q)/2),
/// ```
///
/// which avoids any division. Requires `1 <= a, j <= n`.
pub fn inverse_sector_coeff(ctx: &Arc<FieldContext>, a: u32, j: u32) -> CyclotomicNumber {
    let n = ctx.n();
    assert!(a >= 1 && a <= n && j >= 1 && j <= n, "indices must be in 1..=n");
    let mut acc = CyclotomicNumber::zero(ctx);
    for q in 1..=j as i64 {
        acc = acc.add(&CyclotomicNumber::zeta_half_pow(ctx, (a as i64) * (1 - 2 * q)));
    }
    acc.neg()
}

/// Coefficients of `y_j` as a linear form in `x_1..x_n` (index `a-1` holds the
/// coefficient of `x_a`).
pub fn y_form(ctx: &Arc<FieldContext>, j: u32) -> Vec<CyclotomicNumber> {
    (1..=ctx.n()).map(|a| sector_coeff(ctx, a, j)).collect()
}

/// Coefficients of the window `y_{s->t} = y_s + ... + y_t` as a linear form in
/// `x_1..x_n`. Requires `1 <= s <= t <= n`.
pub fn window_form(ctx: &Arc<FieldContext>, s: u32, t: u32) -> Vec<CyclotomicNumber> {
    let n = ctx.n();
    assert!(s >= 1 && s <= t && t <= n, "window out of range");
    let mut acc = alloc::vec![CyclotomicNumber::zero(ctx); n as usize];
    for j in s..=t {
        for (a, c) in y_form(ctx, j).into_iter().enumerate() {
            acc[a] = acc[a].add(&c);
        }
    }
    acc
}

/// True iff the `n x n` matrix `c[a,j]` is invertible (exact Gaussian
/// elimination over the cyclotomic field).
pub fn check_matrix_invertible(ctx: &Arc<FieldContext>) -> bool {
    let n = ctx.n() as usize;
    if n == 0 {
        return true; // empty matrix
    }
    let mut rows: Vec<Vec<CyclotomicNumber>> = (1..=n as u32)
        .map(|a| (1..=n as u32).map(|j| sector_coeff(ctx, a, j)).collect())
        .collect();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !rows[r][col].is_zero()) {
            Some(p) => p,
            None => return false,
        };
        rows.swap(col, pivot);
        let inv = rows[col][col].inv().expect("nonzero pivot");
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].mul(&inv);
            for c in col..n {
                let sub = factor.mul(&rows[col][c]);
                rows[r][c] = rows[r][c].sub(&sub);
            }
        }
    }
    true
}

/// Fixed-point label on the resolution: the unit class or one of the `n`
/// exceptional point classes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum AnLabel {
    Unit,
    Point(u32),
}

/// Basis monomial on the fixed-point side: a multiset of `(part size, label)`.
pub type AnBasisKey = Vec<(u64, AnLabel)>;

/// Expansion of a product of sector insertions in the fixed-point basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AnExpansion {
    pub terms: BTreeMap<AnBasisKey, CyclotomicNumber>,
}

fn expand_parts(
    ctx: &Arc<FieldContext>,
    wp: &WeightedPartition,
    entry: &dyn Fn(u32, u32) -> CyclotomicNumber,
) -> AnExpansion {
    let mut terms: BTreeMap<AnBasisKey, CyclotomicNumber> = BTreeMap::new();
    terms.insert(Vec::new(), CyclotomicNumber::one(ctx));
    for part in wp.parts() {
        let mut next: BTreeMap<AnBasisKey, CyclotomicNumber> = BTreeMap::new();
        let options: Vec<(AnLabel, CyclotomicNumber)> = if part.dec == 0 {
            alloc::vec![(AnLabel::Unit, CyclotomicNumber::one(ctx))]
        } else {
            (1..=ctx.n())
                .map(|j| (AnLabel::Point(j), entry(part.dec, j)))
                .collect()
        };
        for (key, coeff) in &terms {
            for (label, c) in &options {
                let mut nk = key.clone();
                nk.push((part.size, *label));
                nk.sort();
                let contrib = coeff.mul(c);
                match next.remove(&nk) {
                    None => {
                        next.insert(nk, contrib);
                    }
                    Some(old) => {
                        let sum = old.add(&contrib);
                        if !sum.is_zero() {
                            next.insert(nk, sum);
                        }
                    }
                }
            }
        }
        terms = next;
    }
    AnExpansion { terms }
}

/// Expands `prod_i p_{size_i}(e_{dec_i})` multilinearly via
/// `e_a -> sum_j c[a,j] w_j` (and `e_0 -> unit`), collapsing equal label
/// multisets by adding coefficients.
pub fn fock_to_an(ctx: &Arc<FieldContext>, wp: &WeightedPartition) -> AnExpansion {
    expand_parts(ctx, wp, &|a, j| sector_coeff(ctx, a, j))
}

/// The contravariant companion of `fock_to_an`, for transporting series
/// *coefficients* instead of states. A generating function
/// `Z = sum_mu Z_mu p_mu` over sector-decorated partitions, rewritten in the
/// fixed-point variables `phat_{d,j} = sum_a c[a,j] p_{d,a}`, has
/// `phat`-coefficients
///
/// ```text
/// [phat_key] Z = sum_mu Z_mu * (coefficient of key in this expansion of mu),
/// ```
///
/// because inverting the variable change expands each twisted part as
/// `p_{d,a} = sum_j g[a,j] phat_{d,j}`. Untwisted parts keep the unit label.
pub fn fock_coefficients_to_an(ctx: &Arc<FieldContext>, wp: &WeightedPartition) -> AnExpansion {
    expand_parts(ctx, wp, &|a, j| inverse_sector_coeff(ctx, a, j))
}

/// The signed window produced by the rewriting lemma for a pair `(b, l)`:
/// `sum_a zeta^(b a + a/2) (zeta^(l a) - 1) x_a` equals
/// `+(n+1) y_{b+1 -> b+l}` when `b + l <= n`, and `-(n+1) y_{b+l-n -> b}`
/// otherwise. Returns `(s, t, sign)`.
pub fn lemma_window(n: u32, b: u32, l: u32) -> (u32, u32, i32) {
    debug_assert!(b <= n && l >= 1 && l <= n);
    if b + l <= n {
        (b + 1, b + l, 1)
    } else {
        (b + l - n, b, -1)
    }
}

/// Verifies the rewriting lemma for every `b in {0..n}`, `l in {1..n}` as an
/// identity of linear forms in `x_1..x_n`.
pub fn check_change_lemma(ctx: &Arc<FieldContext>) -> bool {
    let n = ctx.n();
    for b in 0..=n {
        for l in 1..=n {
            let (s, t, sign) = lemma_window(n, b, l);
            let window = window_form(ctx, s, t);
            let scale = Rational::from_int(sign as i64 * (n as i64 + 1));
            for a in 1..=n {
                let lhs = CyclotomicNumber::zeta_half_pow(
                    ctx,
                    2 * (b as i64) * (a as i64) + a as i64,
                )
                .mul(
                    &CyclotomicNumber::zeta_pow(ctx, (l as i64) * (a as i64))
                        .sub(&CyclotomicNumber::one(ctx)),
                );
                let rhs = window[(a - 1) as usize].scale(&scale);
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Verifies that `(b, l) -> (window, sign)` hits every window `1<=s<=t<=n`
/// exactly twice, once with each sign.
pub fn check_window_bijection(n: u32) -> bool {
    let mut counts: BTreeMap<(u32, u32), (u32, u32)> = BTreeMap::new();
    for b in 0..=n {
        for l in 1..=n {
            let (s, t, sign) = lemma_window(n, b, l);
            if !(1 <= s && s <= t && t <= n) {
                return false;
            }
            let entry = counts.entry((s, t)).or_insert((0, 0));
            if sign > 0 {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    let mut expected = 0u32;
    for ((_, _), (plus, minus)) in &counts {
        if *plus != 1 || *minus != 1 {
            return false;
        }
        expected += 2;
    }
    expected == n * (n + 1)
}

/// `sum_{a=1}^{n} (zeta^(l a) - 1)(zeta^(-l a) - 1) = 2(n+1)` for `l in {1..n}`.
pub fn check_root_pair_sums(ctx: &Arc<FieldContext>) -> bool {
    let n = ctx.n();
    for l in 1..=n {
        let mut acc = CyclotomicNumber::zero(ctx);
        for a in 1..=n as i64 {
            let one = CyclotomicNumber::one(ctx);
            let f1 = CyclotomicNumber::zeta_pow(ctx, l as i64 * a).sub(&one);
            let f2 = CyclotomicNumber::zeta_pow(ctx, -(l as i64) * a).sub(&one);
            acc = acc.add(&f1.mul(&f2));
        }
        if acc.to_rational() != Ok(Rational::from_int(2 * (n as i64 + 1))) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_at_rank_one() {
        // n = 1: c[1,1] = (i - (-i)) * (-1) / 2 = -i.
        let ctx = FieldContext::new(1);
        let c = sector_coeff(&ctx, 1, 1);
        let minus_i = CyclotomicNumber::omega_pow(&ctx, 1).neg();
        assert_eq!(c, minus_i);
        assert_eq!(y_form(&ctx, 1), alloc::vec![minus_i]);
    }

    #[test]
    fn matrix_invertible() {
        for n in 1..=6 {
            let ctx = FieldContext::new(n);
            assert!(check_matrix_invertible(&ctx), "n={n}");
        }
    }

    #[test]
    fn closed_form_inverse_matrix() {
        // n = 1: g[1,1] = -omega^(-1) = i, the reciprocal of c[1,1] = -i.
        let ctx = FieldContext::new(1);
        assert_eq!(
            inverse_sector_coeff(&ctx, 1, 1),
            CyclotomicNumber::omega_pow(&ctx, 1)
        );
        // Two-sided inverse of c[a,j] for small n.
        for n in 1..=5 {
            let ctx = FieldContext::new(n);
            for j in 1..=n {
                for k in 1..=n {
                    let mut acc = CyclotomicNumber::zero(&ctx);
                    for a in 1..=n {
                        acc = acc.add(
                            &sector_coeff(&ctx, a, j).mul(&inverse_sector_coeff(&ctx, a, k)),
                        );
                    }
                    let want = if j == k {
                        CyclotomicNumber::one(&ctx)
                    } else {
                        CyclotomicNumber::zero(&ctx)
                    };
                    assert_eq!(acc, want, "n={n} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn change_lemma_and_bijection() {
        for n in 1..=5 {
            let ctx = FieldContext::new(n);
            assert!(check_change_lemma(&ctx), "lemma fails at n={n}");
            assert!(check_window_bijection(n), "bijection fails at n={n}");
        }
    }

    #[test]
    fn root_pair_sums() {
        for n in 1..=8 {
            let ctx = FieldContext::new(n);
            assert!(check_root_pair_sums(&ctx), "n={n}");
        }
    }

    #[test]
    fn expansion_multilinearity() {
        let ctx = FieldContext::new(1);
        let wp = WeightedPartition::from_pairs(&[(2, 1), (1, 0)], 1);
        let exp = fock_to_an(&ctx, &wp);
        assert_eq!(exp.terms.len(), 1);
        let key: AnBasisKey = alloc::vec![(1, AnLabel::Unit), (2, AnLabel::Point(1))];
        let minus_i = CyclotomicNumber::omega_pow(&ctx, 1).neg();
        assert_eq!(exp.terms.get(&key), Some(&minus_i));

        // Two equal twisted parts at n = 2 collapse into 3 label multisets.
        let ctx2 = FieldContext::new(2);
        let wp2 = WeightedPartition::from_pairs(&[(1, 1), (1, 1)], 2);
        let exp2 = fock_to_an(&ctx2, &wp2);
        assert_eq!(exp2.terms.len(), 3);
        let c11 = sector_coeff(&ctx2, 1, 1);
        let c12 = sector_coeff(&ctx2, 1, 2);
        let mixed: AnBasisKey = alloc::vec![(1, AnLabel::Point(1)), (1, AnLabel::Point(2))];
        assert_eq!(
            exp2.terms.get(&mixed),
            Some(&c11.mul(&c12).scale(&Rational::from_int(2)))
        );
    }
}
