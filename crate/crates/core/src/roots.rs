//! Exact distribution of the number of roots.
//!
//! `L_K(z)` is the PGF of the root count of the auxiliary process on `K`
//! sites. It satisfies `L_0 = L_1 = L_2 = 1` and, for `K >= 3`,
//!
//! ```text
//! K L_K(z) = 2 L_{K-1}(z) + z * sum_{j=2}^{K-1} L_{j-1}(z) L_{K-j}(z)
//! ```
//!
//! (first particle at an end site, or at an interior site `j` where it
//! becomes a root and splits the strip). The cyclic root count on `K`
//! sites is distributed as one plus the auxiliary count on `K - 1` sites.
//!
//! The bivariate series `L(x, z) = sum_{K>=1} L_K(z) x^K` has the closed
//! form `tan(x s) / (s - tan(x s))` with `s = sqrt(z - 1)`; its dominant
//! pole `rho_0(z) = atan(s) / s` gives `L_K(z) ~ rho_0(z)^{-K-1} / z`.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::moments::{pgf_moments, MomentSummary};
use crate::poly::Polynomial;
use crate::process::check_width;
use crate::scalar::{from_usize, Scalar};
use crate::{Rational, RationalPolynomial};

/// Bottom-up table of `L_0 .. L_{k_max}`.
#[derive(Debug, Clone)]
pub struct AuxRootTable<T> {
    pgfs: Vec<Polynomial<T>>,
}

impl<T: Scalar> AuxRootTable<T> {
    pub fn new() -> Self {
        Self {
            pgfs: vec![Polynomial::one(); 3],
        }
    }

    pub fn build(k_max: usize) -> Self {
        let mut table = Self::new();
        table.extend_to(k_max);
        table
    }

    /// Largest `K` currently stored.
    pub fn k_max(&self) -> usize {
        self.pgfs.len() - 1
    }

    pub fn extend_to(&mut self, k_max: usize) {
        for k in self.pgfs.len()..=k_max {
            let next = self.next_pgf(k);
            self.pgfs.push(next);
        }
    }

    fn next_pgf(&self, k: usize) -> Polynomial<T> {
        let l = &self.pgfs;
        // split pairs (a, k-1-a) for a in 1..=k-2 are symmetric
        let mut split = Polynomial::zero();
        let two = from_usize::<T>(2);
        for a in 1..=(k - 1) / 2 {
            let b = k - 1 - a;
            let factor = if a == b { T::one() } else { two.clone() };
            split.add_scaled(&(&l[a] * &l[b]), &factor);
        }
        let mut out = split.shift(1);
        out.add_scaled(&l[k - 1], &two);
        out.scale(&(T::one() / from_usize::<T>(k)))
    }

    /// `L_K`, if already computed.
    pub fn get(&self, k: usize) -> Option<&Polynomial<T>> {
        self.pgfs.get(k)
    }

    /// PGF of the cyclic root count on `width` sites: `z * L_{width-1}(z)`.
    pub fn cyclic(&self, width: usize) -> Result<Polynomial<T>> {
        check_width(width)?;
        self.get(width - 1)
            .map(|p| p.shift(1))
            .ok_or_else(|| Error::arg(format!("table only reaches K = {}", self.k_max() + 1)))
    }
}

impl<T: Scalar> Default for AuxRootTable<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// `N_K = K! L_K`, which has integer coefficients: multiplying the
/// recursion by `(K-1)!` turns the split term into
/// `binom(K-1, a) N_a N_{K-1-a}`. Avoids rational normalisation entirely.
#[derive(Debug)]
struct RootCountTable {
    counts: Vec<Polynomial<BigInt>>,
    /// Row `K-1` of Pascal's triangle for the last `K` computed.
    binomials: Vec<BigInt>,
    factorials: Vec<BigInt>,
}

impl RootCountTable {
    fn new() -> Self {
        // N_0 = 1, N_1 = 1, N_2 = 2
        Self {
            counts: vec![
                Polynomial::one(),
                Polynomial::one(),
                Polynomial::constant(BigInt::from(2)),
            ],
            binomials: vec![BigInt::one(), BigInt::one()],
            factorials: vec![BigInt::one(), BigInt::one(), BigInt::from(2)],
        }
    }

    fn extend_to(&mut self, k_max: usize) {
        for k in self.counts.len()..=k_max {
            // binomials holds row k-2; advance to row k-1
            let prev = &self.binomials;
            let mut row = Vec::with_capacity(k);
            row.push(BigInt::one());
            row.extend(prev.windows(2).map(|w| &w[0] + &w[1]));
            row.push(BigInt::one());
            self.binomials = row;

            let n = &self.counts;
            let two = BigInt::from(2);
            let mut split = Polynomial::zero();
            for a in 1..=(k - 1) / 2 {
                let b = k - 1 - a;
                let mut weight = self.binomials[a].clone();
                if a != b {
                    weight *= &two;
                }
                split.add_scaled(&(&n[a] * &n[b]), &weight);
            }
            let mut next = split.shift(1);
            next.add_scaled(&n[k - 1], &two);
            self.counts.push(next);
            let f = &self.factorials[k - 1] * BigInt::from(k);
            self.factorials.push(f);
        }
    }

    fn pgf(&self, k: usize) -> RationalPolynomial {
        let f = &self.factorials[k];
        self.counts[k].map(|c| Rational::new(c.clone(), f.clone()))
    }
}

fn shared_table() -> &'static Mutex<RootCountTable> {
    static TABLE: OnceLock<Mutex<RootCountTable>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(RootCountTable::new()))
}

/// `L_K(z)`, the root-count PGF of the auxiliary process on `K` sites.
///
/// Backed by a process-wide memo of integer counts. Note
/// `L_K(0) = 2^{K-1} / K!` for `K >= 2`: the only root-free outcomes are
/// those where every particle lands next to an already covered cell.
pub fn aux_root_pgf(k: usize) -> RationalPolynomial {
    let mut table = shared_table().lock().unwrap_or_else(|e| e.into_inner());
    table.extend_to(k);
    table.pgf(k)
}

/// PGF of the cyclic root count `R^{[K]}`.
pub fn cyclic_root_pgf(width: usize) -> Result<RationalPolynomial> {
    check_width(width)?;
    Ok(aux_root_pgf(width - 1).shift(1))
}

/// Exact mean/variance of the cyclic root count.
pub fn cyclic_root_moments(width: usize) -> Result<MomentSummary<Rational>> {
    pgf_moments(&cyclic_root_pgf(width)?)
}

/// `tan(x s) / s` with `s^2 = w`, stable as `w -> 0`.
fn tan_ratio<T: Float>(x: Complex<T>, w: Complex<T>) -> Complex<T> {
    let small = T::from(1e-6).unwrap();
    if w.norm() < small {
        // x + x^3 w / 3 + 2 x^5 w^2 / 15
        let three = T::from(3.0).unwrap();
        let fifteen = T::from(15.0).unwrap();
        let two = T::from(2.0).unwrap();
        let x2 = x * x;
        x * (Complex::<T>::one() + x2 * w / three + x2 * x2 * w * w * two / fifteen)
    } else {
        let s = w.sqrt();
        (x * s).tan() / s
    }
}

/// Closed form of `sum_{K>=1} L_K(z) x^K` near `(x, z) = (0, 1)`.
///
/// Returns a domain error when `(x, z)` sits on (or numerically next to)
/// a pole, i.e. when `1 - tan(x s)/s` vanishes.
pub fn closed_form_l<T: Float>(x: Complex<T>, z: Complex<T>) -> Result<Complex<T>> {
    if x.is_zero() {
        return Ok(Complex::zero());
    }
    let w = z - Complex::<T>::one();
    let ratio = tan_ratio(x, w);
    let denom = Complex::<T>::one() - ratio;
    let tol = T::epsilon().sqrt();
    if !denom.norm().is_finite() || denom.norm() < tol * (T::one() + ratio.norm()) {
        return Err(Error::domain("closed form evaluated at a pole"));
    }
    Ok(ratio / denom)
}

/// Dominant pole `rho_0(z)` of `x -> L(x, z)` for real `z > 0`, `z != 1`.
pub fn dominant_pole(z: f64) -> Result<f64> {
    if z.is_nan() || z <= 0.0 || z.is_infinite() {
        return Err(Error::domain(format!("dominant pole needs z > 0, got {z}")));
    }
    if z == 1.0 {
        return Err(Error::domain(
            "z = 1 is the removable point; use the exact engine",
        ));
    }
    let s = (z - 1.0).abs().sqrt();
    Ok(if z > 1.0 { s.atan() / s } else { s.atanh() / s })
}

/// Leading asymptotic term `rho_0(z)^{-K-1} / z` of `L_K(z)`.
pub fn asymptotic_root_pgf(z: f64, k: usize) -> Result<f64> {
    let rho = dominant_pole(z)?;
    let exp = i32::try_from(k + 1).map_err(|_| Error::arg("K too large"))?;
    Ok(rho.powi(-exp) / z)
}

/// `rho_0(z)` as the power series `sum_n (-(z-1))^n / (2n+1)`, truncated
/// after `terms` terms. Valid for `|z - 1| < 1`; for `z > 1` the series
/// alternates, so the truncation error is below the first omitted term.
pub fn dominant_pole_series<T: Scalar>(z: &T, terms: usize) -> Result<T> {
    let w = z.clone() - T::one();
    if !(w < T::one() && w > -T::one()) {
        return Err(Error::domain("pole series needs |z - 1| < 1"));
    }
    let neg_w = -w;
    let mut power = T::one();
    let mut sum = T::zero();
    for n in 0..terms {
        sum += power.clone() / from_usize::<T>(2 * n + 1);
        power *= neg_w.clone();
    }
    Ok(sum)
}

/// [`asymptotic_root_pgf`] over any scalar, with `rho_0` from
/// [`dominant_pole_series`]. With exact rationals this separates the
/// asymptotic error from floating-point roundoff.
pub fn asymptotic_root_pgf_series<T: Scalar>(z: &T, k: usize, terms: usize) -> Result<T> {
    if z.is_one() {
        return Err(Error::domain(
            "z = 1 is the removable point; use the exact engine",
        ));
    }
    let rho = dominant_pole_series(z, terms)?;
    let denom = num_traits::pow(rho, k + 1) * z.clone();
    Ok(T::one() / denom)
}
