use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{from_usize, Scalar};

/// First two moments read off a PGF at `z = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentSummary<T> {
    pub mean: T,
    pub variance: T,
    pub second_factorial_moment: T,
}

impl<T: Scalar> MomentSummary<T> {
    pub fn from_factorial_moments(mean: T, second_factorial_moment: T) -> Self {
        let variance = second_factorial_moment.clone() + mean.clone() - mean.clone() * mean.clone();
        Self {
            mean,
            variance,
            second_factorial_moment,
        }
    }

    /// `E(X^2)`.
    pub fn second_moment(&self) -> T {
        self.second_factorial_moment.clone() + self.mean.clone()
    }
}

/// Mean and variance of the distribution with PGF `p`, computed exactly as
/// `p'(1)` and `p''(1) + p'(1) - p'(1)^2`.
pub fn pgf_moments<T: Scalar>(p: &Polynomial<T>) -> Result<MomentSummary<T>> {
    p.validate_pgf()?;
    Ok(unchecked_moments(p))
}

/// Float variant: accepts `|p(1) - 1| <= tol`.
pub fn pgf_moments_approx(p: &Polynomial<f64>, tol: f64) -> Result<MomentSummary<f64>> {
    if p.coeffs().iter().any(|&c| c < -tol) {
        return Err(Error::NotAPgf("negative coefficient".into()));
    }
    let total = p.evaluate(&1.0);
    if (total - 1.0).abs() > tol {
        return Err(Error::NotAPgf(format!("coefficients sum to {total}")));
    }
    Ok(unchecked_moments(p))
}

pub(crate) fn unchecked_moments<T: Scalar>(p: &Polynomial<T>) -> MomentSummary<T> {
    let mut mean = T::zero();
    let mut fact2 = T::zero();
    for (k, c) in p.coeffs().iter().enumerate().skip(1) {
        mean += c.clone() * from_usize::<T>(k);
        fact2 += c.clone() * from_usize::<T>(k * (k - 1));
    }
    MomentSummary::from_factorial_moments(mean, fact2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, RationalPolynomial};

    #[test]
    fn degenerate_and_bernoulli() {
        let m = pgf_moments(&RationalPolynomial::one()).unwrap();
        assert_eq!(m.mean, Rational::from_integer(0.into()));
        assert_eq!(m.variance, Rational::from_integer(0.into()));

        // (2 + z)/3: Bernoulli(1/3)
        let third = Rational::new(1.into(), 3.into());
        let p = RationalPolynomial::new(vec![
            third.clone() * Rational::from_integer(2.into()),
            third.clone(),
        ]);
        let m = pgf_moments(&p).unwrap();
        assert_eq!(m.mean, third);
        assert_eq!(m.variance, Rational::new(2.into(), 9.into()));
        assert_eq!(m.second_moment(), third);
    }

    #[test]
    fn rejects_unnormalised_input() {
        let p = RationalPolynomial::new(vec![Rational::from_integer(2.into())]);
        assert!(matches!(pgf_moments(&p), Err(Error::NotAPgf(_))));
        assert!(pgf_moments_approx(&Polynomial::new(vec![0.5, 0.4]), 1e-9).is_err());
        let m = pgf_moments_approx(&Polynomial::new(vec![0.5, 0.5]), 1e-12).unwrap();
        assert!((m.variance - 0.25).abs() < 1e-15);
    }
}
