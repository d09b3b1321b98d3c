//! Published closed forms for the root and gap statistics.
//!
//! These are the targets that the exact engines are checked against; they
//! are never used to compute anything.
//!
//! Two entries differ from the commonly printed versions and are stored in
//! corrected form:
//!
//! * the mean series for `i = 1` carries a factor `x^3` like the other
//!   rows (without it the series would start at `x^0`);
//! * the second factorial series for `i = 5` has denominator
//!   `(1 - x)^3`, not `(1 - x)^4`.
//!
//! All series are indexed like the interval table: the coefficient of
//! `x^K` describes `D_{i,K+1}`.

use num_bigint::BigInt;

use crate::series::{one_minus_x_pow, RationalFunctionSeries};
use crate::{Rational, RationalPolynomial};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn big(s: &str) -> BigInt {
    s.parse().expect("literal")
}

fn poly(num: &[i64], den: i64) -> RationalPolynomial {
    RationalPolynomial::new(num.iter().map(|&c| q(c, den)).collect())
}

/// `E(R^{[K]}) = K / 3` for `K >= 3`.
pub fn root_mean(width: usize) -> Rational {
    q(width as i64, 3)
}

/// `Var(R^{[K]})`: `0, 2/9, 2/9, 4/15` for `K = 3..=6`, then `2K/45`.
///
/// `K = 4` is often quoted as `1/9`; the law is `z (2 + z) / 3`, whose
/// variance is `2/9`.
pub fn root_variance(width: usize) -> Option<Rational> {
    Some(match width {
        0..=2 => return None,
        3 => q(0, 1),
        4 => q(2, 9),
        5 => q(2, 9),
        6 => q(4, 15),
        k => q(2 * k as i64, 45),
    })
}

/// `Var(sqrt(K) (K / R^{[K]} - 1 - 2))` in the large-`K` limit.
///
/// By the delta method this is `(9 / sqrt K)^2 Var(R^{[K]}) -> 81 * 2/45 = 18/5`;
/// the value `5/18` sometimes quoted is its reciprocal.
pub fn empirical_average_limit_variance() -> f64 {
    18.0 / 5.0
}

/// `E(D_{1,K})`: `2/3` at `K = 4`, then `2K/15`.
pub fn gap1_mean(width: usize) -> Option<Rational> {
    match width {
        4 => Some(q(2, 3)),
        k if k >= 5 => Some(q(2 * k as i64, 15)),
        _ => None,
    }
}

/// `Var(D_{1,K})`: five exceptional values for `K = 4..=8`, then
/// `1772 K / 14175`.
pub fn gap1_variance(width: usize) -> Option<Rational> {
    Some(match width {
        4 => q(8, 9),
        5 => q(2, 9),
        6 => q(24, 25),
        7 => q(184, 225),
        8 => q(1588, 1575),
        k if k >= 9 => q(1772 * k as i64, 14175),
        _ => return None,
    })
}

/// Width from which the linear laws of [`gap_linear_moments`] are stated.
pub const LINEAR_GAP_LAW_FROM: usize = 31;

/// Slopes `(mean / K, variance / K)` of `D_{i,K}` for `2 <= i <= 7`,
/// stated for `K >= 31`.
pub fn gap_linear_moments(gap: usize) -> Option<(Rational, Rational)> {
    let r = |n: &str, d: &str| Rational::new(big(n), big(d));
    Some(match gap {
        2 => (q(1, 9), q(32, 405)),
        3 => (q(2, 35), q(119_732, 2_837_835)),
        4 => (q(1, 45), q(12_154, 637_875)),
        5 => (q(4, 567), r("649555688", "97692469875")),
        6 => (q(1, 525), r("5967328", "3192564375")),
        7 => (q(2, 4455), r("191501338988", "428772250281375")),
        _ => return None,
    })
}

/// `(a_K, b_K, c_K)` for `K = 3..=7`.
pub fn small_abc(k: usize) -> Option<(RationalPolynomial, RationalPolynomial, RationalPolynomial)> {
    Some(match k {
        3 => (
            poly(&[1, -2, 1], 3),
            poly(&[0, 1, -1], 3),
            poly(&[2, 0, 1], 3),
        ),
        4 => (
            RationalPolynomial::zero(),
            poly(&[1, -1], 3),
            poly(&[1, 2], 3),
        ),
        5 => (
            poly(&[0, 2, -4, 2], 15),
            poly(&[3, -3, 2, -2], 15),
            poly(&[7, 6, 0, 2], 15),
        ),
        6 => (
            poly(&[1, -2, 1], 9),
            poly(&[4, 7, -11], 45),
            poly(&[20, 8, 17], 45),
        ),
        7 => (
            poly(&[18, -36, 35, -34, 17], 315),
            poly(&[45, -2, -43, 17, -17], 315),
            poly(&[98, 132, 68, 0, 17], 315),
        ),
        _ => return None,
    })
}

fn series(
    shift: usize,
    num: &[i64],
    scale: i64,
    den: &str,
    power: usize,
) -> RationalFunctionSeries<Rational> {
    let numerator =
        RationalPolynomial::new(num.iter().map(|&c| q(c * scale, 1)).collect()).shift(shift);
    let denominator = one_minus_x_pow::<Rational>(power).scale(&Rational::from_integer(big(den)));
    RationalFunctionSeries::new(numerator, denominator).expect("denominator(0) != 0")
}

fn expand(factors: &[&[i64]]) -> Vec<i64> {
    factors
        .iter()
        .map(|f| crate::poly::Polynomial::new(f.to_vec()))
        .fold(crate::poly::Polynomial::one(), |acc, f| &acc * &f)
        .into_coeffs()
}

/// `sum_{K>=3} E(D_{i,K+1}) x^K` for `1 <= i <= 7`.
pub fn mean_series(gap: usize) -> Option<RationalFunctionSeries<Rational>> {
    Some(match gap {
        1 => series(3, &[5, -5, 1], 2, "15", 2),
        2 => series(4, &[6, -6, 1], 1, "9", 2),
        3 => series(3, &[35, -70, 56, -21, 3], 2, "105", 2),
        4 => series(4, &expand(&[&[3, -3, 1], &[5, -5, 1]]), 1, "45", 2),
        5 => series(5, &[189, -378, 279, -90, 10], 2, "2835", 2),
        6 => series(6, &[70, -140, 100, -30, 3], 1, "1575", 2),
        7 => series(7, &[198, -396, 275, -77, 7], 2, "31185", 2),
        _ => return None,
    })
}

/// `sum_{K>=3} E(D_{i,K+1} (D_{i,K+1} - 1)) x^K` for `1 <= i <= 7`.
pub fn second_factorial_series(gap: usize) -> Option<RationalFunctionSeries<Rational>> {
    Some(match gap {
        1 => series(
            3,
            &[4725, -14175, 19845, -16380, 8595, -2880, 580, -58],
            2,
            "14175",
            3,
        ),
        2 => series(
            5,
            &expand(&[&[15, -15, 6, -1], &[3, -3, 1], &[3, -3, 1]]),
            2,
            "405",
            3,
        ),
        3 => series(
            7,
            &[
                1711710, -5135130, 6786780, -5118113, 2380287, -682864, 111636, -7974,
            ],
            2,
            "14189175",
            3,
        ),
        4 => series(
            9,
            &[15525, -46575, 60255, -43695, 19200, -5100, 752, -47],
            2,
            "637875",
            3,
        ),
        5 => series(
            11,
            &[
                157260285, -471780855, 598855005, -418392270, 173906073, -42827760, 5728788,
                -318266,
            ],
            4,
            "97692469875",
            3,
        ),
        6 => series(
            13,
            &[
                969150, -2907450, 3627930, -2446595, 963525, -220570, 26940, -1347,
            ],
            2,
            "3192564375",
            3,
        ),
        7 => series(
            15,
            &[
                9215899308,
                -27647697924,
                33973625070,
                -22162777791,
                8287091967,
                -1769271504,
                198572308,
                -9026014,
            ],
            2,
            "428772250281375",
            3,
        ),
        _ => return None,
    })
}

/// Human-readable notes on the corrected rows.
pub const CORRECTION_NOTES: [&str; 4] = [
    "limit variance of sqrt(K)(K/R - 3) is 81 * 2/45 = 18/5; the commonly quoted 5/18 is its reciprocal",
    "root variance at K=4 is 2/9 (law z(2+z)/3); the commonly printed 1/9 is inconsistent with it",
    "mean series i=1 uses 2x^3(x^2-5x+5)/(15(1-x)^2); the commonly printed row omits x^3",
    "second factorial series i=5 uses denominator (1-x)^3; the commonly printed (1-x)^4 disagrees for every K >= 12",
];
