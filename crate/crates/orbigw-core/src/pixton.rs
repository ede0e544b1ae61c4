//! The one-vertex double ramification cycle as a polynomial in psi classes,
//! computed two independent ways: by interpolating the weighted loop-graph
//! sums at finitely many levels `r`, and by a closed Bernoulli-number formula.
//!
//! For integer leg data `a_1..a_N` with zero sum, genus `g`, and `f` loops at
//! the single vertex, the level-`r` stratum sum is
//!
//! ```text
//! (1 / (2^f f! r^f)) * sum over loop weights w in {1..r}^f of
//!   prod_i exp(a_i^2 psi_i) * prod_j E(w_j (r - w_j); psi_h, psi_h')
//! ```
//!
//! with edge factor `E(x; u, v) = (1 - exp(-x (u + v))) / (u + v)
//! = sum_{k>=1} (-1)^(k-1) x^k (u+v)^(k-1) / k!`. Every psi-coefficient is a
//! polynomial in `r`; the cycle is `2^(-g)` times its constant term in `r`,
//! taken on the interior degree `g - f` slice of each stratum.

use alloc::vec::Vec;
use core::fmt;

use crate::bernoulli::BernoulliCache;
use crate::psi::{lagrange_at_zero, PsiMonomial, PsiPolynomial, PsiVar};
use crate::rational::{factorial, positive_compositions, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PixtonError {
    /// Leg data must sum to zero.
    WeightSumNonzero,
    /// Need at least `2g + 3` levels: `2g + 2` to pin a degree `<= 2g + 1`
    /// polynomial plus one to confirm it.
    TooFewSamples { needed: usize, got: usize },
    /// All levels must exceed `2 g max(1, max |a_i|)`.
    SampleBelowFloor { floor: u64, got: u64 },
    /// Two interpolation windows disagreed on a constant term, so the
    /// sampled data is not the restriction of one low-degree polynomial.
    InterpolationUnstable,
}

impl fmt::Display for PixtonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PixtonError::WeightSumNonzero => write!(f, "leg data must sum to zero"),
            PixtonError::TooFewSamples { needed, got } => {
                write!(f, "need at least {needed} levels, got {got}")
            }
            PixtonError::SampleBelowFloor { floor, got } => {
                write!(f, "level {got} does not exceed the floor {floor}")
            }
            PixtonError::InterpolationUnstable => {
                write!(f, "interpolation windows disagree")
            }
        }
    }
}

/// Smallest admissible level minus one: `2 g max(1, max |a_i|)`.
pub fn sample_floor(g: u32, a: &[i64]) -> u64 {
    let amax = a.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0).max(1);
    2 * g as u64 * amax
}

/// The `2g + 3` consecutive levels right above the floor.
pub fn default_sample_levels(g: u32, a: &[i64]) -> Vec<u64> {
    let floor = sample_floor(g, a);
    (floor + 1..=floor + 2 * g as u64 + 3).collect()
}

fn check_leg_sum(a: &[i64]) -> Result<(), PixtonError> {
    if a.iter().sum::<i64>() != 0 {
        return Err(PixtonError::WeightSumNonzero);
    }
    Ok(())
}

/// Averaged edge factor `(1/r) sum_{w=1}^{r} E(w (r - w); u, v)` in the
/// abstract half-edge variables `u = Half(j, 0)`, `v = Half(j, 1)`.
fn edge_sum(r: u64, max_degree: u32, j: u32) -> PsiPolynomial {
    let u = PsiVar::Half(j, 0);
    let v = PsiVar::Half(j, 1);
    let mut out = PsiPolynomial::zero(max_degree);
    let uv = PsiPolynomial::variable(max_degree, u).add(&PsiPolynomial::variable(max_degree, v));
    // Power sums s_k = sum_w (w (r - w))^k, assembled per k.
    for k in 1..=max_degree + 1 {
        let mut s = Rational::zero();
        for w in 1..=r {
            s += Rational::from_int((w * (r - w)) as i64).pow(k as i64);
        }
        if s.is_zero() {
            continue;
        }
        let sign = if k % 2 == 1 { Rational::one() } else { -Rational::one() };
        let c = &(&s * &sign) / &(&factorial(k as u64) * &Rational::from_int(r as i64));
        out = out.add(&uv.pow(k - 1).scale(&c));
    }
    out
}

/// Level-`r` stratum sum with `f` loops, truncated at total psi degree `g`.
/// Legs use `Leg(1)..Leg(N)`, loop `j` uses `Half(j, 0)` and `Half(j, 1)`
/// for `j` in `0..f`.
pub fn pixton_sample(g: u32, a: &[i64], f: u32, r: u64) -> Result<PsiPolynomial, PixtonError> {
    check_leg_sum(a)?;
    assert!(r >= 1, "level must be positive");
    let mut out = PsiPolynomial::one(g);
    for (i, &ai) in a.iter().enumerate() {
        out = out.mul(&PsiPolynomial::exp_single(
            g,
            PsiVar::Leg(i as u32 + 1),
            &Rational::from_int(ai * ai),
        ));
    }
    if f > 0 {
        // Loop weights are independent, so the w-sum factors per edge; the
        // one abstract edge sum is renamed into each loop's variables.
        let model = edge_sum(r, g, 0);
        out = out.mul(&model);
        for j in 1..f {
            out = out.mul(&model.rename_vars(|vvar| match vvar {
                PsiVar::Half(0, side) => PsiVar::Half(j, side),
                other => other,
            }));
        }
    }
    let pref = Rational::one()
        / (&Rational::from_int(2).pow(f as i64) * &factorial(f as u64));
    Ok(out.scale(&pref))
}

fn validate_levels(g: u32, a: &[i64], levels: &[u64]) -> Result<(), PixtonError> {
    let needed = 2 * g as usize + 3;
    if levels.len() < needed {
        return Err(PixtonError::TooFewSamples { needed, got: levels.len() });
    }
    let floor = sample_floor(g, a);
    for &r in levels {
        if r <= floor {
            return Err(PixtonError::SampleBelowFloor { floor, got: r });
        }
    }
    Ok(())
}

/// Monomial-wise constant term in `r` of the degree `g - f` slice of the
/// stratum samples, computed by exact Lagrange interpolation over the first
/// `2g + 2` levels and confirmed against the last `2g + 2`.
fn interpolated_stratum_slice(
    g: u32,
    a: &[i64],
    f: u32,
    levels: &[u64],
) -> Result<PsiPolynomial, PixtonError> {
    validate_levels(g, a, levels)?;
    let window = 2 * g as usize + 2;
    let slice_deg = g - f;
    let samples: Vec<(u64, PsiPolynomial)> = levels
        .iter()
        .map(|&r| Ok((r, pixton_sample(g, a, f, r)?.homogeneous_part(slice_deg))))
        .collect::<Result<_, _>>()?;
    let mut monomials = alloc::collections::BTreeSet::new();
    for (_, s) in &samples {
        for (m, _) in s.terms() {
            monomials.insert(m.clone());
        }
    }
    let mut out = PsiPolynomial::zero(g);
    for m in monomials {
        let points: Vec<(i64, Rational)> = samples
            .iter()
            .map(|(r, s)| (*r as i64, s.coeff(&m)))
            .collect();
        let head = lagrange_at_zero(&points[..window]);
        let tail = lagrange_at_zero(&points[points.len() - window..]);
        if head != tail {
            return Err(PixtonError::InterpolationUnstable);
        }
        out.add_term(m, head);
    }
    Ok(out)
}

/// The `f`-loop stratum contribution to the cycle: `2^(-g)` times the
/// interpolated constant term of the degree `g - f` slice.
pub fn dr_stratum_interpolated(
    g: u32,
    a: &[i64],
    f: u32,
    levels: &[u64],
) -> Result<PsiPolynomial, PixtonError> {
    let slice = interpolated_stratum_slice(g, a, f, levels)?;
    Ok(slice.scale(&Rational::from_int(2).pow(-(g as i64))))
}

/// Closed form of the same stratum:
///
/// ```text
/// ((-1)^f / f!) sum_{M=f}^{g} 2^(-M) (sum_i a_i^2 psi_i)^(g-M) / (2^(g-M) (g-M)!)
///   * sum over m_1 + .. + m_f = M, m_j >= 1, of
///     prod_j B_{2 m_j} sum_{k=0}^{m_j - 1}
///       psi_{h_j}^k psi_{h_j'}^{m_j - 1 - k} / ((2 m_j) k! (m_j - 1 - k)!)
/// ```
///
/// which is homogeneous of degree `g - f` and already carries the `2^(-g)`.
pub fn dr_stratum_closed(g: u32, a: &[i64], f: u32) -> Result<PsiPolynomial, PixtonError> {
    check_leg_sum(a)?;
    let cache = BernoulliCache::new(2 * g);
    let mut leg_linear = PsiPolynomial::zero(g);
    for (i, &ai) in a.iter().enumerate() {
        leg_linear = leg_linear.add(
            &PsiPolynomial::variable(g, PsiVar::Leg(i as u32 + 1))
                .scale(&Rational::from_int(ai * ai)),
        );
    }
    let mut out = PsiPolynomial::zero(g);
    for big_m in f..=g {
        let mut loop_part = PsiPolynomial::zero(g);
        for comp in positive_compositions(big_m, f) {
            let mut term = PsiPolynomial::one(g);
            for (j, &mj) in comp.iter().enumerate() {
                let mut edge = PsiPolynomial::zero(g);
                for k in 0..mj {
                    let den = &(&Rational::from_int(2 * mj as i64) * &factorial(k as u64))
                        * &factorial((mj - 1 - k) as u64);
                    let mono = PsiMonomial::var(PsiVar::Half(j as u32, 0), k)
                        .mul(&PsiMonomial::var(PsiVar::Half(j as u32, 1), mj - 1 - k));
                    let mut term_poly = PsiPolynomial::zero(g);
                    term_poly.add_term(mono, den.inv());
                    edge = edge.add(&term_poly);
                }
                term = term.mul(&edge.scale(&cache.number(2 * mj)));
            }
            loop_part = loop_part.add(&term);
        }
        if loop_part.is_zero() {
            continue;
        }
        let leg_pow = leg_linear.pow(g - big_m);
        let scale = Rational::from_int(2).pow(-(big_m as i64))
            / (&Rational::from_int(2).pow((g - big_m) as i64) * &factorial((g - big_m) as u64));
        out = out.add(&leg_pow.mul(&loop_part).scale(&scale));
    }
    let sign = if f % 2 == 0 { Rational::one() } else { -Rational::one() };
    Ok(out.scale(&(&sign / &factorial(f as u64))))
}

/// Compare the interpolated and closed forms of one stratum.
pub fn dr_stratum_agrees(
    g: u32,
    a: &[i64],
    f: u32,
    levels: &[u64],
) -> Result<bool, PixtonError> {
    let lhs = dr_stratum_interpolated(g, a, f, levels)?;
    let rhs = dr_stratum_closed(g, a, f)?;
    Ok(lhs == rhs)
}

/// Full cycle by interpolation: sum of all strata `f = 0..g`.
pub fn dr_polynomial(g: u32, a: &[i64], levels: &[u64]) -> Result<PsiPolynomial, PixtonError> {
    let mut out = PsiPolynomial::zero(g);
    for f in 0..=g {
        out = out.add(&dr_stratum_interpolated(g, a, f, levels)?);
    }
    Ok(out)
}

/// Full cycle in closed form.
pub fn dr_closed(g: u32, a: &[i64]) -> Result<PsiPolynomial, PixtonError> {
    let mut out = PsiPolynomial::zero(g);
    for f in 0..=g {
        out = out.add(&dr_stratum_closed(g, a, f)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::PsiMonomial;

    #[test]
    fn genus_zero_is_one() {
        let c = dr_closed(0, &[3, -1, -2]).unwrap();
        assert_eq!(c, PsiPolynomial::one(0));
        let p = dr_polynomial(0, &[3, -1, -2], &default_sample_levels(0, &[3, -1, -2])).unwrap();
        assert_eq!(p, c);
    }

    #[test]
    fn one_loop_constant() {
        // g=1, f=1, legs (1,-1): sample constant is (r^2 - 1)/12, so the
        // interpolated constant is -1/12 and the stratum is -1/24.
        let a = [1i64, -1];
        for r in [3u64, 5, 7] {
            let s = pixton_sample(1, &a, 1, r).unwrap();
            let c = s.coeff(&PsiMonomial::one());
            assert_eq!(c, Rational::new((r * r - 1) as i64, 12));
        }
        let levels = default_sample_levels(1, &a);
        let stratum = dr_stratum_interpolated(1, &a, 1, &levels).unwrap();
        assert_eq!(stratum.coeff(&PsiMonomial::one()), Rational::new(-1, 24));
        let closed = dr_stratum_closed(1, &a, 1).unwrap();
        assert_eq!(stratum, closed);
    }

    #[test]
    fn zero_loop_linear_part() {
        // g=1, f=0, legs (1,-1): closed form (psi_1 + psi_2)/2.
        let a = [1i64, -1];
        let closed = dr_stratum_closed(1, &a, 0).unwrap();
        let mut expect = PsiPolynomial::zero(1);
        expect.add_term(PsiMonomial::var(PsiVar::Leg(1), 1), Rational::new(1, 2));
        expect.add_term(PsiMonomial::var(PsiVar::Leg(2), 1), Rational::new(1, 2));
        assert_eq!(closed, expect);
        let interp = dr_stratum_interpolated(1, &a, 0, &default_sample_levels(1, &a)).unwrap();
        assert_eq!(interp, expect);
    }

    #[test]
    fn genus_two_strata_agree() {
        let a = [2i64, -1, -1];
        let levels = default_sample_levels(2, &a);
        for f in 0..=2 {
            assert!(dr_stratum_agrees(2, &a, f, &levels).unwrap(), "stratum f={f}");
        }
    }

    #[test]
    fn level_validation() {
        let a = [1i64, -1];
        assert!(matches!(
            dr_stratum_interpolated(1, &a, 1, &[2, 3, 4, 5, 6]),
            Err(PixtonError::SampleBelowFloor { .. })
        ));
        assert!(matches!(
            dr_stratum_interpolated(1, &a, 1, &[3, 4]),
            Err(PixtonError::TooFewSamples { .. })
        ));
        assert!(matches!(
            pixton_sample(1, &[1, 1], 0, 3),
            Err(PixtonError::WeightSumNonzero)
        ));
    }
}
