//! Rubber invariants of the orbifold `[C^2/Z_{n+1}] x P^1`: case dispatch
//! into the degenerate table, a closed main formula, and an independent raw
//! oracle that re-expands everything through descendent integrals; plus the
//! generating function in `(z, x)` and the three special 3-point reductions.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bernoulli::{s_series, s_series_scaled, BernoulliCache};
use crate::cyclotomic::{CyclotomicNumber, FieldContext};
use crate::equivariant::EquivariantScalar;
use crate::hodge::{
    descendent_t_coefficient, rubber_dim, CorrectionMode, DescendentInsertion,
};
use crate::partition::{parity_holds, MonodromyVector, WeightedPartition};
use crate::rational::{compositions, factorial, positive_compositions, Rational};
use crate::series::{Monomial, Truncation, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RubberError {
    /// `|mu| != |nu|`.
    UnequalSizes,
    /// Rubber dimension `2g - 3 + p + l(mu) + l(nu)` is negative: the moduli
    /// problem is empty of stable objects and no value is defined.
    UnstableConfiguration,
}

impl fmt::Display for RubberError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RubberError::UnequalSizes => write!(f, "partitions have different sizes"),
            RubberError::UnstableConfiguration => write!(f, "negative rubber dimension"),
        }
    }
}

/// Which automorphism count normalizes the invariant: the ordinary partition
/// automorphisms (as in the printed degenerate table) or the decorated ones
/// (forced by the multinomial resummation in the generating-function chain).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutConvention {
    Plain,
    Decorated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RubberBranch {
    /// Decoration/monodromy sum nonzero mod n+1: empty moduli, value 0.
    ParityZero,
    /// Every decoration trivial and no monodromy insertions: this is the
    /// smooth-target regime, which this library does not evaluate.
    SmoothUnsupported,
    /// Dimension-zero shape: one length-2 side with one twisted part against
    /// a single twisted part.
    Degenerate1,
    /// Dimension-zero shape: one fully twisted length-2 side against a single
    /// untwisted part.
    Degenerate2,
    /// Dimension-zero shape: untwisted single part against twisted single
    /// part with one extra monodromy insertion.
    Degenerate3,
    /// All parts twisted on both sides: the closed formula applies.
    MainFormula,
    /// A nontrivial obstruction class vanishes: value exactly 0.
    RankVanishing,
}

impl fmt::Display for RubberBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RubberBranch::ParityZero => "ParityZero",
            RubberBranch::SmoothUnsupported => "SmoothUnsupported",
            RubberBranch::Degenerate1 => "Degenerate1",
            RubberBranch::Degenerate2 => "Degenerate2",
            RubberBranch::Degenerate3 => "Degenerate3",
            RubberBranch::MainFormula => "MainFormula",
            RubberBranch::RankVanishing => "RankVanishing",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RubberResult {
    pub value: EquivariantScalar,
    pub branch: RubberBranch,
}

fn norm_factor(mu: &WeightedPartition, nu: &WeightedPartition, conv: AutConvention) -> Rational {
    match conv {
        AutConvention::Plain => &mu.aut_plain() * &nu.aut_plain(),
        AutConvention::Decorated => &mu.aut_decorated() * &nu.aut_decorated(),
    }
}

/// `[z^{2g}] prod_i S(mu_i z) prod_j S(nu_j z) / S(z)^2`.
fn sigma_coefficient(g: u32, mu_sizes: &[u64], nu_sizes: &[u64]) -> Rational {
    let zmax = 2 * g;
    let mut prod = s_series(zmax)
        .mul(&s_series(zmax))
        .unit_inverse()
        .expect("S(z) has constant term 1");
    for &s in mu_sizes.iter().chain(nu_sizes.iter()) {
        prod = prod.mul(&s_series_scaled(zmax, &Rational::from_int(s as i64)));
    }
    prod.coeff_z(zmax)
}

/// The sector sum
/// `C = sum_{l=1}^{n} sum_{c=0}^{n} zeta^{lc} [B_r(c/(n+1)) / r] prod (zeta^{l dec} - 1)`
/// over every decoration of `mu`, `nu` and every entry of `gamma`;
/// Galois-invariant, hence rational.
fn sector_sum(
    ctx: &Arc<FieldContext>,
    mu: &WeightedPartition,
    nu: &WeightedPartition,
    gamma: &MonodromyVector,
    r: u32,
) -> Rational {
    let n = ctx.n();
    let np1 = Rational::from_int(n as i64 + 1);
    let cache = BernoulliCache::new(r);
    let mut acc = CyclotomicNumber::zero(ctx);
    for l in 1..=n as i64 {
        let mut prod = CyclotomicNumber::one(ctx);
        for dec in mu
            .decorations()
            .iter()
            .chain(nu.decorations().iter())
            .chain(gamma.entries().iter())
        {
            let factor = CyclotomicNumber::zeta_pow(ctx, l * *dec as i64)
                .sub(&CyclotomicNumber::one(ctx));
            prod = prod.mul(&factor);
        }
        for c in 0..=n as i64 {
            let b = cache.poly_at(r, &(Rational::from_int(c) / np1.clone()));
            let w = CyclotomicNumber::zeta_pow(ctx, l * c)
                .scale(&(b / Rational::from_int(r as i64)));
            acc = acc.add(&w.mul(&prod));
        }
    }
    acc.to_rational()
        .expect("sector sum is Galois-invariant, hence rational")
}

/// Post-elimination closed formula, valid when every part of `mu` and `nu`
/// is twisted:
///
/// ```text
/// <mu,nu>_{g,gamma} = (1/(|Aut mu| |Aut nu|)) T (n+1)^(2g-2) (-1)^(r1) / 2
///     * C * [z^(2g)] (prod S(mu_i z) prod S(nu_j z) / S(z)^2)
/// ```
///
/// with `r = r1 + r2 = 2g - 2 + l(mu) + l(nu) + p` and
/// `r1 = g - 1 + (sum of all decorations and monodromies)/(n+1)`. The
/// `S(z)^{-2}` packages the loop strata: `exp(-2 int F(z)/z dz) = S(z)^{-2}`
/// turns the `(f, M)` double sum into one coefficient extraction.
fn main_formula(
    ctx: &Arc<FieldContext>,
    mu: &WeightedPartition,
    nu: &WeightedPartition,
    g: u32,
    gamma: &MonodromyVector,
    conv: AutConvention,
) -> EquivariantScalar {
    let n = ctx.n();
    let np1 = n as u64 + 1;
    let r = 2 * g as i64 - 2 + (mu.len() + nu.len() + gamma.len()) as i64;
    debug_assert!(r >= 1);
    let dec_total = mu.decoration_sum() + nu.decoration_sum() + gamma.sum();
    debug_assert_eq!(dec_total % np1, 0);
    let r1 = g as i64 - 1 + (dec_total / np1) as i64;
    let c_rat = sector_sum(ctx, mu, nu, gamma, r as u32);
    let sigma = sigma_coefficient(g, &mu.sizes(), &nu.sizes());
    let sign = if r1.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    let coeff = &(&(&Rational::from_int(np1 as i64).pow(2 * g as i64 - 2) * &sign)
        * &(&c_rat * &sigma))
        / &(&Rational::from_int(2) * &norm_factor(mu, nu, conv));
    EquivariantScalar::t_times_rational(ctx, coeff)
}

fn degenerate_value(
    ctx: &Arc<FieldContext>,
    mu: &WeightedPartition,
    nu: &WeightedPartition,
    g: u32,
    gamma: &MonodromyVector,
) -> Option<RubberResult> {
    if g != 0 {
        return None;
    }
    let n = ctx.n();
    let np1 = Rational::from_int(n as i64 + 1);
    for (a, b) in [(mu, nu), (nu, mu)] {
        // The printed table divides by ordinary partition automorphisms.
        if gamma.is_empty() && a.len() == 2 && b.len() == 1 {
            let value = (&np1 * &a.aut_plain()).inv();
            if a.len_twisted() == 1 && b.len_twisted() == 1 {
                return Some(RubberResult {
                    value: EquivariantScalar::from_rational(ctx, value),
                    branch: RubberBranch::Degenerate1,
                });
            }
            if a.len_twisted() == 2 && b.len_twisted() == 0 {
                return Some(RubberResult {
                    value: EquivariantScalar::from_rational(ctx, value),
                    branch: RubberBranch::Degenerate2,
                });
            }
        }
        if gamma.len() == 1
            && a.len() == 1
            && b.len() == 1
            && a.len_twisted() == 0
            && b.len_twisted() == 1
        {
            return Some(RubberResult {
                value: EquivariantScalar::from_rational(ctx, np1.inv()),
                branch: RubberBranch::Degenerate3,
            });
        }
    }
    None
}

/// The rubber invariant `<mu, nu>_{g, gamma}`, dispatched through: parity,
/// the unsupported smooth regime, the dimension-zero degenerate table (both
/// orderings tried), the all-twisted main formula, and rank vanishing.
pub fn rubber_invariant(
    ctx: &Arc<FieldContext>,
    mu: &WeightedPartition,
    nu: &WeightedPartition,
    g: u32,
    gamma: &MonodromyVector,
    conv: AutConvention,
) -> Result<RubberResult, RubberError> {
    if mu.size() != nu.size() {
        return Err(RubberError::UnequalSizes);
    }
    let n = ctx.n();
    if !parity_holds(mu, nu, gamma, n) {
        return Ok(RubberResult {
            value: EquivariantScalar::zero(ctx),
            branch: RubberBranch::ParityZero,
        });
    }
    if mu.len_twisted() == 0 && nu.len_twisted() == 0 && gamma.is_empty() {
        return Ok(RubberResult {
            value: EquivariantScalar::zero(ctx),
            branch: RubberBranch::SmoothUnsupported,
        });
    }
    let d = rubber_dim(g, gamma.len(), mu.len(), nu.len());
    if d < 0 {
        return Err(RubberError::UnstableConfiguration);
    }
    if d == 0 {
        if let Some(res) = degenerate_value(ctx, mu, nu, g, gamma) {
            return Ok(res);
        }
    }
    if mu.len_twisted() == mu.len() && nu.len_twisted() == nu.len() {
        return Ok(RubberResult {
            value: main_formula(ctx, mu, nu, g, gamma, conv),
            branch: RubberBranch::MainFormula,
        });
    }
    Ok(RubberResult {
        value: EquivariantScalar::zero(ctx),
        branch: RubberBranch::RankVanishing,
    })
}

/// Memo table for descendent evaluations shared across oracle calls.
#[derive(Default)]
pub struct DescendentCache {
    map: BTreeMap<(u32, Vec<DescendentInsertion>), Rational>,
}

impl DescendentCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(
        &mut self,
        ctx: &Arc<FieldContext>,
        g: u32,
        mut insertions: Vec<DescendentInsertion>,
    ) -> Rational {
        insertions.sort();
        if let Some(v) = self.map.get(&(g, insertions.clone())) {
            return v.clone();
        }
        let v = descendent_t_coefficient(ctx, g, &insertions, CorrectionMode::Omit)
            .expect("oracle terms satisfy the descendent preconditions");
        self.map.insert((g, insertions), v.clone());
        v
    }
}

fn sector_tuples(n: u32, f: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..f {
        let mut next = Vec::new();
        for t in &out {
            for a in 1..=n {
                let mut u = t.clone();
                u.push(a);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn exponent_vectors(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::new();
        for t in &out {
            for c in 0..b {
                let mut u = t.clone();
                u.push(c);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Pre-elimination expansion of the same invariant: genus is traded for `f`
/// nodes carrying monodromy pairs `(alpha, n+1-alpha)`, and every term is a
/// descendent integral of genus `g - f`:
///
/// ```text
/// (1/Norm) sum_f [(-1)^f (n+1)^f / f!] sum_{alpha in {1..n}^f} sum_{M=f}^{g} 2^(-M)
///   sum_{leg exponents k, sum k = g-M} prod mu_i^(2k_i)/(2^(k_i) k_i!) ...
///   sum_{m_1+..+m_f=M} prod_i [B_{2m_i}/(2m_i)] sum_{c_i=0}^{m_i-1} 1/(c_i!(m_i-1-c_i)!)
///   * <tau-insertions>_{g-f}
/// ```
///
/// Requires an all-twisted, parity-correct key of nonnegative dimension.
pub fn rubber_raw_oracle(
    ctx: &Arc<FieldContext>,
    mu: &WeightedPartition,
    nu: &WeightedPartition,
    g: u32,
    gamma: &MonodromyVector,
    conv: AutConvention,
    cache: &mut DescendentCache,
) -> Result<EquivariantScalar, RubberError> {
    if mu.size() != nu.size() {
        return Err(RubberError::UnequalSizes);
    }
    let n = ctx.n();
    assert!(
        mu.len_twisted() == mu.len()
            && nu.len_twisted() == nu.len()
            && parity_holds(mu, nu, gamma, n),
        "raw oracle requires an all-twisted parity-correct key"
    );
    if rubber_dim(g, gamma.len(), mu.len(), nu.len()) < 0 {
        return Err(RubberError::UnstableConfiguration);
    }
    let leg_sizes: Vec<u64> = mu.sizes().into_iter().chain(nu.sizes()).collect();
    let leg_decs: Vec<u32> = mu
        .decorations()
        .into_iter()
        .chain(nu.decorations())
        .collect();
    let bcache = BernoulliCache::new(2 * g);
    let mut total = Rational::zero();
    for f in 0..=g {
        let mut stratum = Rational::zero();
        for alpha in sector_tuples(n, f) {
            for big_m in f..=g {
                for mvec in positive_compositions(big_m, f) {
                    for cvec in exponent_vectors(&mvec) {
                        // Loop weight prod_i B_{2m_i} / ((2m_i) c_i! (m_i-1-c_i)!).
                        let mut loop_weight = Rational::from_int(2).pow(-(big_m as i64));
                        for (i, &mi) in mvec.iter().enumerate() {
                            let ci = cvec[i];
                            loop_weight = &loop_weight
                                * &(bcache.number(2 * mi)
                                    / &(&(&Rational::from_int(2 * mi as i64)
                                        * &factorial(ci as u64))
                                        * &factorial((mi - 1 - ci) as u64)));
                        }
                        for kvec in compositions(g - big_m, leg_sizes.len() as u32) {
                            let mut weight = loop_weight.clone();
                            let mut ins: Vec<DescendentInsertion> = Vec::new();
                            for (i, &k) in kvec.iter().enumerate() {
                                let sz = Rational::from_int(leg_sizes[i] as i64);
                                weight = &weight
                                    * &(&sz.pow(2 * k as i64)
                                        / &(&Rational::from_int(2).pow(k as i64)
                                            * &factorial(k as u64)));
                                ins.push(DescendentInsertion { k, a: leg_decs[i] });
                            }
                            for &gk in gamma.entries() {
                                ins.push(DescendentInsertion { k: 0, a: gk });
                            }
                            for (i, &ai) in alpha.iter().enumerate() {
                                ins.push(DescendentInsertion { k: cvec[i], a: ai });
                                ins.push(DescendentInsertion {
                                    k: mvec[i] - 1 - cvec[i],
                                    a: n + 1 - ai,
                                });
                            }
                            stratum += &weight * &cache.get(ctx, g - f, ins);
                        }
                    }
                }
            }
        }
        let np1_pow = Rational::from_int(n as i64 + 1).pow(f as i64);
        let sign = if f % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        total += &(&(&np1_pow * &sign) / &factorial(f as u64)) * &stratum;
    }
    total = &total / &norm_factor(mu, nu, conv);
    Ok(EquivariantScalar::t_times_rational(ctx, total))
}

/// Why a `(g, gamma)` cell of a generating function could not be filled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GapReason {
    /// Negative rubber dimension.
    Unstable,
    /// All-trivial key: smooth-target regime, out of scope.
    Smooth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesGap {
    pub g: u32,
    pub gamma: MonodromyVector,
    pub reason: GapReason,
}

/// Generating function `Z(z, x) = sum_{g, gamma} (-1)^g z^(2g) x^gamma /
/// gamma! <mu, nu>_{g, gamma}`, truncated at `z^zmax` and total x-degree
/// `xmax`; `gamma!` is the multiset automorphism count. Cells that cannot be
/// evaluated (negative dimension, smooth regime) are returned as gaps.
pub fn rubber_z_series(
    ctx: &Arc<FieldContext>,
    mu: &WeightedPartition,
    nu: &WeightedPartition,
    zmax: u32,
    xmax: u32,
    conv: AutConvention,
) -> Result<(TruncatedSeries<EquivariantScalar>, Vec<SeriesGap>), RubberError> {
    if mu.size() != nu.size() {
        return Err(RubberError::UnequalSizes);
    }
    let n = ctx.n();
    let trunc = Truncation::new(zmax, xmax, n as usize);
    let mut series = TruncatedSeries::zero(trunc.clone(), EquivariantScalar::zero(ctx));
    let mut gaps = Vec::new();
    for g in 0..=zmax / 2 {
        for gamma in crate::partition::monodromy_vectors_up_to(n, xmax as usize) {
            match rubber_invariant(ctx, mu, nu, g, &gamma, conv) {
                Ok(res) => {
                    if res.branch == RubberBranch::SmoothUnsupported {
                        gaps.push(SeriesGap {
                            g,
                            gamma: gamma.clone(),
                            reason: GapReason::Smooth,
                        });
                        continue;
                    }
                    let mut q = gamma.aut().inv();
                    if g % 2 == 1 {
                        q = -q;
                    }
                    series.add_term(gamma_monomial(n, 2 * g, &gamma), res.value.scale(&q));
                }
                Err(RubberError::UnstableConfiguration) => {
                    gaps.push(SeriesGap {
                        g,
                        gamma: gamma.clone(),
                        reason: GapReason::Unstable,
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok((series, gaps))
}

/// Monomial `z^zdeg x_(gamma_1) ... x_(gamma_p)` as exponents.
pub fn gamma_monomial(n: u32, zdeg: u32, gamma: &MonodromyVector) -> Monomial {
    let mut x = vec![0u32; n as usize];
    for &k in gamma.entries() {
        x[(k - 1) as usize] += 1;
    }
    Monomial { z: zdeg, x }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThreePtError {
    /// The third insertion is not one of the three special divisors.
    UnsupportedDivisor,
    UnequalSizes,
    Rubber(RubberError),
}

impl fmt::Display for ThreePtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThreePtError::UnsupportedDivisor => write!(f, "unsupported third insertion"),
            ThreePtError::UnequalSizes => write!(f, "partitions have different sizes"),
            ThreePtError::Rubber(e) => write!(f, "{e}"),
        }
    }
}

/// The three special shapes of the third relative insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivisorKind {
    /// `(1,0)^m`.
    Identity,
    /// `(2,0)(1,0)^(m-2)`.
    SubDivisor,
    /// `(1,k)(1,0)^(m-1)` with `k != 0`.
    Twisted(u32),
}

pub fn classify_divisor(rho: &WeightedPartition, m: u64) -> Result<DivisorKind, ThreePtError> {
    if rho.size() != m || rho.is_empty() {
        return Err(ThreePtError::UnsupportedDivisor);
    }
    let parts = rho.parts();
    if parts.iter().all(|p| p.size == 1 && p.dec == 0) {
        return Ok(DivisorKind::Identity);
    }
    if parts[0].size == 2
        && parts[0].dec == 0
        && parts[1..].iter().all(|p| p.size == 1 && p.dec == 0)
    {
        return Ok(DivisorKind::SubDivisor);
    }
    let twisted: Vec<_> = parts.iter().filter(|p| p.dec != 0).collect();
    if twisted.len() == 1
        && parts.iter().all(|p| p.size == 1)
        && parts.iter().filter(|p| p.dec == 0).count() == parts.len() - 1
    {
        return Ok(DivisorKind::Twisted(twisted[0].dec));
    }
    Err(ThreePtError::UnsupportedDivisor)
}

#[derive(Clone, Debug)]
pub struct ThreePtResult {
    pub kind: DivisorKind,
    pub series: TruncatedSeries<EquivariantScalar>,
    pub gaps: Vec<SeriesGap>,
    /// True when the key lies in the all-trivial smooth regime that this
    /// library deliberately does not evaluate.
    pub smooth_scope_note: bool,
}

/// Genus/monodromy generating function of the 3-point invariant
/// `<mu, nu, rho>` for the three special divisors `rho`:
/// the identity `(1,0)^m` is a pure constant `1/(m(n+1))` on its one
/// nonvanishing shape; `(2,0)(1,0)^(m-2)` multiplies each rubber cell by
/// `2g - 2 + p + l(mu) + l(nu)`; `(1,k)(1,0)^(m-1)` is the rubber series
/// with one extra monodromy insertion `k`, i.e. `dZ/dx_k`.
pub fn gw_threept(
    ctx: &Arc<FieldContext>,
    mu: &WeightedPartition,
    nu: &WeightedPartition,
    rho: &WeightedPartition,
    zmax: u32,
    xmax: u32,
    conv: AutConvention,
) -> Result<ThreePtResult, ThreePtError> {
    let m = mu.size();
    if nu.size() != m {
        return Err(ThreePtError::UnequalSizes);
    }
    let kind = classify_divisor(rho, m)?;
    let n = ctx.n();
    let trunc = Truncation::new(zmax, xmax, n as usize);
    let zero = EquivariantScalar::zero(ctx);
    let smooth_scope_note =
        mu.len_twisted() == 0 && nu.len_twisted() == 0;
    match kind {
        DivisorKind::Identity => {
            let mut series = TruncatedSeries::zero(trunc, zero);
            let nonzero = mu.len() == 1
                && nu.len() == 1
                && mu.len_twisted() == 1
                && nu.len_twisted() == 1
                && parity_holds(mu, nu, &MonodromyVector::empty(), n);
            if nonzero {
                let v = (&Rational::from_int(m as i64) * &Rational::from_int(n as i64 + 1)).inv();
                series.add_term(
                    Monomial::unit(n as usize),
                    EquivariantScalar::from_rational(ctx, v),
                );
            }
            Ok(ThreePtResult {
                kind,
                series,
                gaps: Vec::new(),
                smooth_scope_note,
            })
        }
        DivisorKind::SubDivisor => {
            let (z, gaps) =
                rubber_z_series(ctx, mu, nu, zmax, xmax, conv).map_err(ThreePtError::Rubber)?;
            let mut series = TruncatedSeries::zero(trunc, zero);
            let l_sum = (mu.len() + nu.len()) as i64;
            for (mono, coeff) in z.terms() {
                let factor = mono.z as i64 - 2 + mono.total_x_degree() as i64 + l_sum;
                series.add_term(mono.clone(), coeff.scale(&Rational::from_int(factor)));
            }
            Ok(ThreePtResult {
                kind,
                series,
                gaps,
                smooth_scope_note,
            })
        }
        DivisorKind::Twisted(k) => {
            let mut series = TruncatedSeries::zero(trunc, zero);
            let mut gaps = Vec::new();
            for g in 0..=zmax / 2 {
                for gamma in crate::partition::monodromy_vectors_up_to(n, xmax as usize) {
                    let full = gamma.with_inserted(k);
                    match rubber_invariant(ctx, mu, nu, g, &full, conv)
                        .map_err(ThreePtError::Rubber)?
                    {
                        res if res.branch == RubberBranch::SmoothUnsupported => {
                            gaps.push(SeriesGap {
                                g,
                                gamma: gamma.clone(),
                                reason: GapReason::Smooth,
                            });
                        }
                        res => {
                            let mut q = gamma.aut().inv();
                            if g % 2 == 1 {
                                q = -q;
                            }
                            series.add_term(gamma_monomial(n, 2 * g, &gamma), res.value.scale(&q));
                        }
                    }
                }
            }
            Ok(ThreePtResult {
                kind,
                series,
                gaps,
                smooth_scope_note,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(s: &str, n: u32) -> WeightedPartition {
        WeightedPartition::parse(s, n).unwrap()
    }

    fn mv(s: &str, n: u32) -> MonodromyVector {
        MonodromyVector::parse(s, n).unwrap()
    }

    #[test]
    fn degenerate_table() {
        let ctx = FieldContext::new(1);
        let r = rubber_invariant(
            &ctx,
            &wp("(1,1)(1,1)", 1),
            &wp("(2,0)", 1),
            0,
            &MonodromyVector::empty(),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::Degenerate2);
        assert_eq!(r.value.c0().to_rational().unwrap(), Rational::new(1, 4));
        assert!(r.value.c1().is_zero());

        let r = rubber_invariant(
            &ctx,
            &wp("(1,0)", 1),
            &wp("(1,1)", 1),
            0,
            &mv("1", 1),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::Degenerate3);
        assert_eq!(r.value.c0().to_rational().unwrap(), Rational::new(1, 2));

        // Mixed two-part side against a single twisted part.
        let r = rubber_invariant(
            &ctx,
            &wp("(1,1)(1,0)", 1),
            &wp("(2,1)", 1),
            0,
            &MonodromyVector::empty(),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::Degenerate1);
        assert_eq!(r.value.c0().to_rational().unwrap(), Rational::new(1, 4));
    }

    #[test]
    fn main_formula_values() {
        let ctx = FieldContext::new(1);
        // Genus 1, no insertions: sigma coefficient [z^2](S^2/S^2) = 0.
        let r = rubber_invariant(
            &ctx,
            &wp("(1,1)", 1),
            &wp("(1,1)", 1),
            1,
            &MonodromyVector::empty(),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::MainFormula);
        assert!(r.value.is_zero());

        // Two monodromy insertions at genus 0: -T/4.
        let r = rubber_invariant(
            &ctx,
            &wp("(1,1)", 1),
            &wp("(1,1)", 1),
            0,
            &mv("1,1", 1),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::MainFormula);
        assert_eq!(r.value.c1().to_rational().unwrap(), Rational::new(-1, 4));

        // n = 2 dimension-zero main-formula cell: T/6.
        let ctx2 = FieldContext::new(2);
        let r = rubber_invariant(
            &ctx2,
            &wp("(1,1)", 2),
            &wp("(1,1)", 2),
            0,
            &mv("1", 2),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::MainFormula);
        assert_eq!(r.value.c1().to_rational().unwrap(), Rational::new(1, 6));
    }

    #[test]
    fn parity_vanishing_unstable() {
        let ctx = FieldContext::new(1);
        let r = rubber_invariant(
            &ctx,
            &wp("(1,1)", 1),
            &wp("(1,0)", 1),
            1,
            &MonodromyVector::empty(),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::ParityZero);
        assert!(r.value.is_zero());

        // Untwisted part at positive dimension: exact zero.
        let r = rubber_invariant(
            &ctx,
            &wp("(1,1)(1,0)", 1),
            &wp("(2,1)", 1),
            1,
            &MonodromyVector::empty(),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::RankVanishing);
        assert!(r.value.is_zero());

        assert_eq!(
            rubber_invariant(
                &ctx,
                &wp("(1,1)", 1),
                &wp("(1,1)", 1),
                0,
                &MonodromyVector::empty(),
                AutConvention::Plain,
            ),
            Err(RubberError::UnstableConfiguration)
        );

        let r = rubber_invariant(
            &ctx,
            &wp("(1,0)", 1),
            &wp("(1,0)", 1),
            1,
            &MonodromyVector::empty(),
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.branch, RubberBranch::SmoothUnsupported);

        assert_eq!(
            rubber_invariant(
                &ctx,
                &wp("(1,1)", 1),
                &wp("(1,1)(1,1)", 1),
                0,
                &MonodromyVector::empty(),
                AutConvention::Plain,
            ),
            Err(RubberError::UnequalSizes)
        );
    }

    #[test]
    fn symmetry() {
        let ctx = FieldContext::new(2);
        let mu = wp("(2,1)(1,2)", 2);
        let nu = wp("(1,1)(1,1)(1,1)", 2);
        for g in 0..=2u32 {
            let a = rubber_invariant(&ctx, &mu, &nu, g, &MonodromyVector::empty(), AutConvention::Plain);
            let b = rubber_invariant(&ctx, &nu, &mu, g, &MonodromyVector::empty(), AutConvention::Plain);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn raw_oracle_agrees() {
        let mut cache = DescendentCache::new();
        let ctx = FieldContext::new(1);
        let mu = wp("(1,1)", 1);
        let nu = wp("(1,1)", 1);
        for (g, gamma) in [(1u32, mv("", 1)), (0, mv("1,1", 1)), (2, mv("", 1)), (1, mv("1,1", 1))] {
            let main = rubber_invariant(&ctx, &mu, &nu, g, &gamma, AutConvention::Plain)
                .unwrap()
                .value;
            let raw =
                rubber_raw_oracle(&ctx, &mu, &nu, g, &gamma, AutConvention::Plain, &mut cache)
                    .unwrap();
            assert_eq!(main, raw, "g={g}");
        }

        let ctx2 = FieldContext::new(2);
        let mu = wp("(1,1)(1,1)(1,1)", 2);
        let nu = wp("(2,1)(1,2)", 2);
        // Parity: 3 + 3 = 6 = 0 mod 3.
        for g in 0..=2u32 {
            let main = rubber_invariant(&ctx2, &mu, &nu, g, &MonodromyVector::empty(), AutConvention::Plain)
                .unwrap()
                .value;
            let raw = rubber_raw_oracle(
                &ctx2,
                &mu,
                &nu,
                g,
                &MonodromyVector::empty(),
                AutConvention::Plain,
                &mut cache,
            )
            .unwrap();
            assert_eq!(main, raw, "n=2 g={g}");
        }
    }

    #[test]
    fn z_series_cells() {
        let ctx = FieldContext::new(1);
        let (z, gaps) = rubber_z_series(
            &ctx,
            &wp("(1,1)", 1),
            &wp("(1,1)", 1),
            2,
            2,
            AutConvention::Plain,
        )
        .unwrap();
        // x_1^2 cell: <>_{0,(1,1)} / 2! = -T/8.
        let c = z.coeff(&Monomial { z: 0, x: vec![2] });
        assert_eq!(c.c1().to_rational().unwrap(), Rational::new(-1, 8));
        // z^2 cell is the zero genus-1 invariant.
        assert!(z.coeff(&Monomial { z: 2, x: vec![0] }).is_zero());
        // Constant cell is an unstable gap.
        assert_eq!(
            gaps,
            vec![SeriesGap {
                g: 0,
                gamma: MonodromyVector::empty(),
                reason: GapReason::Unstable
            }]
        );
    }

    #[test]
    fn threept_identity() {
        let ctx = FieldContext::new(1);
        let r = gw_threept(
            &ctx,
            &wp("(2,1)", 1),
            &wp("(2,1)", 1),
            &wp("(1,0)(1,0)", 1),
            0,
            0,
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.kind, DivisorKind::Identity);
        let c = r.series.coeff(&Monomial::unit(1));
        assert_eq!(c.c0().to_rational().unwrap(), Rational::new(1, 4));

        // Parity-incompatible single parts: zero.
        let ctx2 = FieldContext::new(2);
        let r = gw_threept(
            &ctx2,
            &wp("(2,1)", 2),
            &wp("(2,1)", 2),
            &wp("(1,0)(1,0)", 2),
            0,
            0,
            AutConvention::Plain,
        )
        .unwrap();
        assert!(r.series.is_zero());
        // The dual decoration works: 1/(m(n+1)) = 1/6.
        let r = gw_threept(
            &ctx2,
            &wp("(2,1)", 2),
            &wp("(2,2)", 2),
            &wp("(1,0)(1,0)", 2),
            0,
            0,
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(
            r.series.coeff(&Monomial::unit(2)).c0().to_rational().unwrap(),
            Rational::new(1, 6)
        );
    }

    #[test]
    fn threept_subdivisor_and_twisted() {
        let ctx = FieldContext::new(1);
        // Degenerate3-shaped key at m=2 with the sub-divisor: factor 1 times 1/2.
        let r = gw_threept(
            &ctx,
            &wp("(2,0)", 1),
            &wp("(2,1)", 1),
            &wp("(2,0)", 1),
            2,
            2,
            AutConvention::Plain,
        )
        .unwrap();
        assert_eq!(r.kind, DivisorKind::SubDivisor);
        let c = r.series.coeff(&Monomial { z: 0, x: vec![1] });
        assert_eq!(c.c0().to_rational().unwrap(), Rational::new(1, 2));

        // Twisted divisor series = x-derivative of the rubber series.
        let mu = wp("(1,1)", 1);
        let nu = wp("(1,1)", 1);
        let r = gw_threept(&ctx, &mu, &nu, &wp("(1,1)", 1), 4, 2, AutConvention::Plain).unwrap();
        assert_eq!(r.kind, DivisorKind::Twisted(1));
        let (z, _) = rubber_z_series(&ctx, &mu, &nu, 4, 3, AutConvention::Plain).unwrap();
        let dz = z.x_derivative(1).truncated(&Truncation::new(4, 2, 1));
        assert_eq!(r.series, dz);

        assert_eq!(
            classify_divisor(&wp("(2,1)", 1), 2),
            Err(ThreePtError::UnsupportedDivisor)
        );
    }
}
