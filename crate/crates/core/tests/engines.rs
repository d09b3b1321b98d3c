//! Cross-checks between independently derived engines.

use bdlab_core::gaps::{abc_recursion, GapRecursionTable};
use bdlab_core::montecarlo::{run_ensemble, EnsembleConfig, StatisticSet};
use bdlab_core::roots::{aux_root_pgf, closed_form_l, cyclic_root_pgf, AuxRootTable};
use bdlab_core::scalar::ToF64;
use bdlab_core::{pgf_moments, BoundaryMode, Rational, RationalPolynomial};
use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;

/// Permutations of `n` by number of interior valleys, by inserting the
/// largest element: it kills a valley-free slot or splits one.
/// `P(n, k) = (2k + 2) P(n-1, k) + (n - 2k) P(n-1, k-1)`.
fn valley_counts(n_max: usize) -> Vec<Vec<BigInt>> {
    let mut rows = vec![
        vec![BigInt::from(1)],
        vec![BigInt::from(1)],
        vec![BigInt::from(2)],
    ];
    for n in 3..=n_max {
        let prev = &rows[n - 1];
        let mut row = vec![BigInt::from(0); (n - 1) / 2 + 1];
        for (k, slot) in row.iter_mut().enumerate() {
            if let Some(p) = prev.get(k) {
                *slot += p * BigInt::from(2 * k + 2);
            }
            if k >= 1 {
                if let Some(p) = prev.get(k - 1) {
                    *slot += p * BigInt::from(n - 2 * k);
                }
            }
        }
        rows.push(row);
    }
    rows
}

#[test]
fn root_recursion_matches_valley_counts() {
    let rows = valley_counts(90);
    let mut factorial = BigInt::from(1);
    for (k, row) in rows.iter().enumerate().skip(1) {
        factorial *= BigInt::from(k);
        let expected = RationalPolynomial::new(
            row.iter()
                .map(|c| Rational::new(c.clone(), factorial.clone()))
                .collect(),
        );
        assert_eq!(aux_root_pgf(k), expected, "K = {k}");
    }
}

#[test]
fn float_table_tracks_exact_table() {
    let table = AuxRootTable::<f64>::build(80);
    for k in [10usize, 40, 80] {
        let exact = aux_root_pgf(k);
        for (c, f) in exact.coeffs().iter().zip(table.get(k).unwrap().coeffs()) {
            let c = c.to_f64_lossy();
            assert!(
                (c - f).abs() <= 1e-12 * c.abs().max(1e-300),
                "K = {k}: {c} vs {f}"
            );
        }
    }
}

#[test]
fn abc_recursion_matches_gap_table() {
    let table = GapRecursionTable::build(1, 40).unwrap();
    for row in abc_recursion(39).unwrap() {
        assert_eq!(
            row.c,
            table.distribution(row.k + 1).unwrap(),
            "K = {}",
            row.k
        );
    }
}

#[test]
fn monte_carlo_gap_means_match_exact_engine() {
    let width = 14usize;
    let runs = 40_000u64;
    let cfg = EnsembleConfig {
        runs,
        base_seed: 11,
        ..EnsembleConfig::new(
            width,
            BoundaryMode::Cyclic,
            StatisticSet {
                roots: true,
                gaps: vec![1, 2, 3],
                ..StatisticSet::default()
            },
        )
    };
    let out = run_ensemble(&cfg).unwrap();
    // probabilistic: fixed seed, 4.5 standard errors
    let check = |label: &str, sample_mean: f64, pgf: &RationalPolynomial| {
        let m = pgf_moments(pgf).unwrap();
        let se = (m.variance.to_f64_lossy() / runs as f64).sqrt();
        let exact = m.mean.to_f64_lossy();
        assert!(
            (sample_mean - exact).abs() < 4.5 * se,
            "{label}: {sample_mean} vs {exact}"
        );
    };
    check(
        "roots",
        out.roots.unwrap().mean(),
        &cyclic_root_pgf(width).unwrap(),
    );
    for (i, acc) in &out.gaps {
        let pgf = GapRecursionTable::build(*i, width)
            .unwrap()
            .distribution(width)
            .unwrap();
        check(&format!("gap {i}"), acc.mean(), &pgf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_matches_truncated_series(x in 0.01f64..0.35, z in 0.6f64..1.4) {
        let series: f64 = (1..=150)
            .map(|k| {
                let p = aux_root_pgf(k);
                p.coeffs().iter().rev().fold(0.0, |acc, c| acc * z + c.to_f64_lossy()) * x.powi(k as i32)
            })
            .sum();
        let closed = closed_form_l(Complex64::new(x, 0.0), Complex64::new(z, 0.0)).unwrap();
        prop_assert!((series - closed.re).abs() < 1e-9 * series.abs().max(1.0), "{series} vs {closed}");
    }

    #[test]
    fn gap_laws_are_pgfs_with_bounded_support(gap in 1usize..6, extra in 0usize..14) {
        let width = gap + 2 + extra;
        let p = GapRecursionTable::build(gap, width).unwrap().distribution(width).unwrap();
        p.validate_pgf().unwrap();
        // every gap of length i uses i + 1 sites
        prop_assert!(p.degree().unwrap_or(0) <= width / (gap + 1));
    }
}
