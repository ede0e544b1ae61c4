//! End-to-end acceptance suite: one test per criterion, each printing a
//! single PASS line on success. Everything is exact; any deviation fails the
//! assertion that reports the offending key.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use orbigw_core::bernoulli::{
    check_exp_integral_is_s, check_odd_binomial_sum, check_reflection, BernoulliCache,
};
use orbigw_core::crepant::{
    check_change_lemma_states, check_degenerate_table, check_y_matrix_inverse, crepant_verify,
};
use orbigw_core::cyclotomic::FieldContext;
use orbigw_core::fock::{check_change_lemma, check_root_pair_sums, check_window_bijection};
use orbigw_core::hodge::{
    descendent_forms_agree, descendent_integral, CorrectionMode, DescendentForm,
    DescendentInsertion,
};
use orbigw_core::partition::{
    all_weighted_partitions, parity_holds, MonodromyVector, WeightedPartition,
};
use orbigw_core::pixton::{default_sample_levels, dr_stratum_agrees};
use orbigw_core::rational::Rational;
use orbigw_core::rubber::{
    gw_threept, rubber_invariant, rubber_raw_oracle, rubber_z_series, AutConvention,
    DescendentCache, DivisorKind, RubberBranch,
};
use orbigw_core::series::Truncation;

/// Deterministic 64-bit generator (SplitMix64), so the random sweep is
/// reproducible byte for byte on every platform.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}

#[test]
fn criterion_1_identity_suite() {
    let start = Instant::now();
    let cache = BernoulliCache::new(14);
    assert_eq!(cache.number(1), &Rational::new(-1, 2));
    for m in 0..=12 {
        assert!(check_reflection(&cache, m), "reflection fails at m={m}");
    }
    // The reflection again, evaluated at the arguments the formulas consume.
    for n in 1..=4i64 {
        for m in 0..=12u32 {
            for c in 0..=n {
                let x = Rational::new(c, n + 1);
                let lhs = cache.poly_at(m, &(&Rational::one() - &x));
                let sign = if m % 2 == 0 { 1 } else { -1 };
                let rhs = &cache.poly_at(m, &x) * &Rational::from_int(sign);
                assert_eq!(lhs, rhs, "reflection value fails at m={m}, c/{}", n + 1);
            }
        }
    }
    for m in 1..=12 {
        assert!(check_odd_binomial_sum(m), "odd factorial sum fails at m={m}");
    }
    assert!(check_exp_integral_is_s(20));
    for n in 1..=8 {
        let ctx = FieldContext::new(n);
        assert!(check_root_pair_sums(&ctx), "root pair sum fails at n={n}");
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 10.0, "identity suite took {secs:.1}s");
    println!("criterion 1 (identity suite): PASS");
}

/// All leg vectors of the given length with entries in `-bound..=bound`
/// summing to zero.
fn zero_sum_vectors(len: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; len];
    fn rec(cur: &mut Vec<i64>, idx: usize, sum: i64, bound: i64, out: &mut Vec<Vec<i64>>) {
        if idx == cur.len() {
            if sum == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let remaining = (cur.len() - idx - 1) as i64 * bound;
        for v in -bound..=bound {
            // Prune branches that can no longer reach zero.
            if (sum + v).abs() > remaining {
                continue;
            }
            cur[idx] = v;
            rec(cur, idx + 1, sum + v, bound, out);
        }
    }
    rec(&mut cur, 0, 0, bound, &mut out);
    out
}

#[test]
fn criterion_2_pixton_oracle() {
    let start = Instant::now();
    let mut checked = 0usize;
    for g in 0..=3u32 {
        for nlegs in 1..=4usize {
            for a in zero_sum_vectors(nlegs, 3) {
                for f in 0..=g {
                    let levels = default_sample_levels(g, &a);
                    let ok = dr_stratum_agrees(g, &a, f, &levels)
                        .unwrap_or_else(|e| panic!("g={g} f={f} a={a:?}: {e:?}"));
                    assert!(ok, "stratum mismatch at g={g} f={f} a={a:?}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000, "sweep too small: {checked}");
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 300.0, "pixton oracle took {secs:.1}s");
    println!("criterion 2 (pixton oracle, {checked} strata): PASS");
}

#[test]
fn criterion_3_descendent_cross_form() {
    let start = Instant::now();

    // Worked value: four tau_0(1) insertions at genus 0, n = 1, in both forms.
    let ctx = FieldContext::new(1);
    let ins: Vec<DescendentInsertion> =
        (0..4).map(|_| DescendentInsertion { k: 0, a: 1 }).collect();
    for form in [DescendentForm::Subset, DescendentForm::Cyclotomic] {
        let v = descendent_integral(&ctx, 0, &ins, form, CorrectionMode::Include).unwrap();
        assert!(v.c0().is_zero());
        assert_eq!(v.c1().to_rational().unwrap(), Rational::new(-1, 4));
    }

    // 200 random valid keys, fixed seed.
    let mut rng = SplitMix64(0x0994_31bd_11e6_a7c3);
    let mut ctxs: BTreeMap<u32, Arc<FieldContext>> = BTreeMap::new();
    let mut checked = 0usize;
    while checked < 200 {
        let n = 1 + rng.below(3) as u32;
        let g = rng.below(4) as u32;
        let nlegs = 1 + rng.below(6) as usize;
        if 2 * g as i64 - 2 + (nlegs as i64) < 1 {
            continue;
        }
        let mut ks = vec![0u32; nlegs];
        for _ in 0..g {
            let slot = rng.below(nlegs as u64) as usize;
            ks[slot] += 1;
        }
        let sectors: Vec<u32> = (0..nlegs).map(|_| 1 + rng.below(n as u64) as u32).collect();
        if sectors.iter().map(|&a| a as u64).sum::<u64>() % (n as u64 + 1) != 0 {
            continue;
        }
        let ins: Vec<DescendentInsertion> = ks
            .iter()
            .zip(&sectors)
            .map(|(&k, &a)| DescendentInsertion { k, a })
            .collect();
        let ctx = ctxs.entry(n).or_insert_with(|| FieldContext::new(n));
        assert!(
            descendent_forms_agree(ctx, g, &ins).unwrap(),
            "forms disagree at n={n} g={g} {ins:?}"
        );
        checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "descendent cross-form took {secs:.1}s");
    println!("criterion 3 (descendent cross-form, {checked} random keys): PASS");
}

#[test]
fn criterion_4_rubber_dual_path() {
    let start = Instant::now();
    let mut checked = 0usize;
    for n in 1..=2u32 {
        let ctx = FieldContext::new(n);
        let mut cache = DescendentCache::new();
        let mut gammas = vec![MonodromyVector::empty()];
        for k in 1..=n {
            gammas.push(MonodromyVector::new(vec![k], n).unwrap());
        }
        for m in 1..=3u64 {
            let parts = all_weighted_partitions(m, n);
            for mu in &parts {
                for nu in &parts {
                    for gamma in &gammas {
                        for g in 0..=2u32 {
                            let Ok(r) =
                                rubber_invariant(&ctx, mu, nu, g, gamma, AutConvention::Plain)
                            else {
                                continue; // unstable keys have no invariant
                            };
                            if r.branch != RubberBranch::MainFormula {
                                continue;
                            }
                            let raw = rubber_raw_oracle(
                                &ctx,
                                mu,
                                nu,
                                g,
                                gamma,
                                AutConvention::Plain,
                                &mut cache,
                            )
                            .unwrap();
                            assert_eq!(
                                r.value,
                                raw,
                                "paths disagree at n={n} g={g} mu={} nu={} gamma={}",
                                mu.format(),
                                nu.format(),
                                gamma.format()
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 100, "sweep too small: {checked}");
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 300.0, "rubber dual path took {secs:.1}s");
    println!("criterion 4 (rubber dual path, {checked} keys): PASS");
}

#[test]
fn criterion_5_crepant_resolution() {
    let start = Instant::now();
    for (n, m, zmax, xmax) in [(1, 1, 6, 3), (1, 2, 4, 3), (1, 3, 4, 2), (2, 1, 4, 2), (2, 2, 4, 2)]
    {
        let ctx = FieldContext::new(n);
        let report = crepant_verify(&ctx, m, zmax, xmax);
        assert!(
            report.passed(),
            "n={n} m={m} zmax={zmax} xmax={xmax}: {} compared, {} equal, mismatches {:?}",
            report.compared,
            report.equal,
            report.mismatches
        );
        assert!(report.compared > 0, "n={n} m={m}: nothing compared");
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 900.0, "crepant verification took {secs:.1}s");
    println!("criterion 5 (crepant resolution, 5 levels): PASS");
}

#[test]
fn criterion_6_special_values() {
    // Identity divisor: <(m,k), (m,k'), (1,0)^m> = 1/(m(n+1)).
    for n in 1..=3u32 {
        let ctx = FieldContext::new(n);
        for m in 1..=4u64 {
            for k in 1..=n {
                let mu = WeightedPartition::from_pairs(&[(m, k)], n);
                let nu = WeightedPartition::from_pairs(&[(m, n + 1 - k)], n);
                let rho = WeightedPartition::from_pairs(&vec![(1, 0); m as usize], n);
                let r = gw_threept(&ctx, &mu, &nu, &rho, 2, 1, AutConvention::Plain).unwrap();
                assert_eq!(r.kind, DivisorKind::Identity);
                let c = r.series.constant_term();
                assert_eq!(
                    c.c0().to_rational().unwrap(),
                    Rational::new(1, (m * (n as u64 + 1)) as i64),
                    "identity divisor at n={n} m={m} k={k}"
                );
                assert!(c.c1().is_zero());
                assert_eq!(r.series.num_terms(), 1, "series must be the bare constant");
            }
        }
    }

    // Degenerate rubber table for every matching shape.
    let mut total = 0usize;
    for n in 1..=3u32 {
        let ctx = FieldContext::new(n);
        let mut per_n = 0usize;
        for m in 1..=3u64 {
            per_n += check_degenerate_table(&ctx, m);
        }
        assert!(per_n > 0, "no degenerate shapes confirmed at n={n}");
        total += per_n;
    }
    println!("criterion 6 (special values, {total} degenerate keys): PASS");
}

#[test]
fn criterion_7_structural_properties() {
    // Change-of-variables lemma sweeps, both the variable and the
    // coefficient form, plus the window bookkeeping and the matrix inverse.
    for n in 1..=5u32 {
        let ctx = FieldContext::new(n);
        assert!(check_change_lemma(&ctx), "variable lemma fails at n={n}");
        assert!(check_window_bijection(n), "window bijection fails at n={n}");
        assert!(check_y_matrix_inverse(&ctx), "matrix inverse fails at n={n}");
        for size in 1..=2 {
            assert!(
                check_change_lemma_states(&ctx, size),
                "coefficient lemma fails at n={n} size={size}"
            );
        }
    }

    // T-rationality, mu <-> nu symmetry, and parity vanishing on a sweep.
    for n in 1..=2u32 {
        let ctx = FieldContext::new(n);
        let mut gammas = vec![MonodromyVector::empty()];
        for k in 1..=n {
            gammas.push(MonodromyVector::new(vec![k], n).unwrap());
        }
        for m in 1..=2u64 {
            let parts = all_weighted_partitions(m, n);
            for mu in &parts {
                for nu in &parts {
                    for gamma in &gammas {
                        for g in 0..=2u32 {
                            let Ok(r) =
                                rubber_invariant(&ctx, mu, nu, g, gamma, AutConvention::Plain)
                            else {
                                continue;
                            };
                            assert!(r.value.c0().to_rational().is_ok(), "irrational constant");
                            assert!(r.value.c1().to_rational().is_ok(), "irrational T part");
                            if !parity_holds(mu, nu, gamma, n) {
                                assert_eq!(r.branch, RubberBranch::ParityZero);
                                assert!(r.value.is_zero(), "parity violation must vanish");
                            }
                            let swapped =
                                rubber_invariant(&ctx, nu, mu, g, gamma, AutConvention::Plain)
                                    .unwrap();
                            assert_eq!(r.value, swapped.value, "mu <-> nu asymmetry");
                        }
                    }
                }
            }
        }
    }

    // Twisted divisor series is the x_k-derivative of the rubber series.
    for n in 1..=2u32 {
        let ctx = FieldContext::new(n);
        let mu = WeightedPartition::from_pairs(&[(1, 1)], n);
        let nu = WeightedPartition::from_pairs(&[(1, n)], n);
        let (z, _) = rubber_z_series(&ctx, &mu, &nu, 4, 3, AutConvention::Plain).unwrap();
        for k in 1..=n {
            let rho = WeightedPartition::from_pairs(&[(1, k)], n);
            let r = gw_threept(&ctx, &mu, &nu, &rho, 4, 2, AutConvention::Plain).unwrap();
            assert_eq!(r.kind, DivisorKind::Twisted(k));
            let dz = z.x_derivative(k as usize).truncated(&Truncation::new(4, 2, n as usize));
            assert_eq!(r.series, dz, "twisted series != derivative at n={n} k={k}");
        }
    }

    println!("criterion 7 (structural properties): PASS");
}
