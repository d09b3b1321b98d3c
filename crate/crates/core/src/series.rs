//! Taylor coefficients of rational generating functions.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// `numerator(x) / denominator(x)` as a power series at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunctionSeries<T> {
    numerator: Polynomial<T>,
    denominator: Polynomial<T>,
}

impl<T: Scalar> RationalFunctionSeries<T> {
    pub fn new(numerator: Polynomial<T>, denominator: Polynomial<T>) -> Result<Self> {
        if denominator.coeff(0).is_zero() {
            return Err(Error::domain("denominator vanishes at x = 0"));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> &Polynomial<T> {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial<T> {
        &self.denominator
    }

    /// First `count` Taylor coefficients, via the linear recurrence
    /// `q_0 c_n = p_n - sum_{j>=1} q_j c_{n-j}`.
    pub fn coefficients(&self, count: usize) -> Vec<T> {
        let q = self.denominator.coeffs();
        let q0 = q[0].clone();
        let mut out: Vec<T> = Vec::with_capacity(count);
        for n in 0..count {
            let mut acc = self.numerator.coeff(n);
            for (j, qj) in q.iter().enumerate().skip(1).take(n) {
                acc -= qj.clone() * out[n - j].clone();
            }
            out.push(acc / q0.clone());
        }
        out
    }
}

pub fn series_coefficients<T: Scalar>(f: &RationalFunctionSeries<T>, count: usize) -> Vec<T> {
    f.coefficients(count)
}

/// `(1 - x)^power`.
pub fn one_minus_x_pow<T: Scalar>(power: usize) -> Polynomial<T> {
    let base = Polynomial::new(vec![T::one(), -T::one()]);
    (0..power).fold(Polynomial::one(), |acc, _| &acc * &base)
}
