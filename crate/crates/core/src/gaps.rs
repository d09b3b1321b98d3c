//! Exact distribution of the gap counts `D_{i,K}`.
//!
//! Consider an interval of `k` sites strictly between two roots, whose
//! leftmost `l` and rightmost `r` sites are already covered by particles
//! that are not roots, leaving `m = k - l - r` empty sites. Let `G(l,r,k)`
//! be the PGF in `u` of the number of consecutive-root pairs at distance
//! `i + 1` that this interval eventually contributes. The next empty site
//! to be hit is uniform among the `m`:
//!
//! * the leftmost empty site cannot become a root, giving `G(l+1, r, k)`;
//! * the rightmost likewise gives `G(l, r+1, k)`;
//! * the `j`-th empty site (`2 <= j <= m-1`) becomes a root and splits
//!   the interval into `G(l, 0, l+j-1) * G(0, r, k-l-j)`.
//!
//! With at most two empty sites left no further root can appear and the
//! interval contributes `u^{[k = i]}`. On the cyclic strip the first
//! particle is a root and leaves an interval of `K - 1` sites, so
//! `D_{i,K}` has PGF `G(0, 0, K-1)`.
//!
//! The table stores `m! * G(l,r,k)`, whose coefficients are integer
//! counts of hit orders; the split term then picks up `binom(m-1, j-1)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::moments::{pgf_moments, MomentSummary};
use crate::poly::Polynomial;
use crate::process::check_width;
use crate::{Rational, RationalPolynomial};

type Counts = Polynomial<BigInt>;

/// Default cap on the number of stored coefficients across a table.
pub const DEFAULT_COEFFICIENT_BUDGET: usize = 20_000_000;

/// Memoized `G(l, r, k)` for a fixed gap length, `k <= k_max`.
///
/// Only entries with `l <= r` are stored; the strip is reflection
/// symmetric so `G(l, r, k) = G(r, l, k)`.
#[derive(Debug, Clone)]
pub struct GapRecursionTable {
    gap: usize,
    k_max: usize,
    // layers[k][l][r - l] for l <= r, l + r <= k
    layers: Vec<Vec<Vec<Counts>>>,
    factorials: Vec<BigInt>,
    binomials: Vec<Vec<BigInt>>,
    stored: usize,
}

impl GapRecursionTable {
    pub fn build(gap: usize, k_max: usize) -> Result<Self> {
        Self::build_with_budget(gap, k_max, DEFAULT_COEFFICIENT_BUDGET)
    }

    /// Builds the table, failing once more than `budget` coefficients
    /// would be held. The error reports the entry being computed.
    pub fn build_with_budget(gap: usize, k_max: usize, budget: usize) -> Result<Self> {
        if gap == 0 {
            return Err(Error::arg("gap length i must be at least 1"));
        }
        let mut factorials = vec![BigInt::one()];
        for n in 1..=k_max.max(2) {
            let next = &factorials[n - 1] * BigInt::from(n);
            factorials.push(next);
        }
        let mut binomials: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for n in 1..=k_max {
            let prev = &binomials[n - 1];
            let row = (0..=n)
                .map(|j| match j {
                    0 => BigInt::one(),
                    j if j == n => BigInt::one(),
                    j => &prev[j - 1] + &prev[j],
                })
                .collect();
            binomials.push(row);
        }
        let mut table = Self {
            gap,
            k_max,
            layers: Vec::with_capacity(k_max + 1),
            factorials,
            binomials,
            stored: 0,
        };
        for k in 0..=k_max {
            table.build_layer(k, budget)?;
        }
        Ok(table)
    }

    fn build_layer(&mut self, k: usize, budget: usize) -> Result<()> {
        let mut layer: Vec<Vec<Counts>> = (0..=k / 2)
            .map(|l| vec![Counts::zero(); k - 2 * l + 1])
            .collect();
        // decreasing l + r so both one-sided successors already exist
        for s in (0..=k).rev() {
            for l in 0..=s / 2 {
                let r = s - l;
                let entry = if s + 2 >= k {
                    self.boundary(k, k - s)
                } else {
                    self.interior(&layer, l, r, k)
                };
                self.check_insert(&entry, l, r, k)?;
                self.stored += entry.coeffs().len();
                if self.stored > budget {
                    return Err(Error::TableBudget {
                        budget,
                        frontier: (l, r, k),
                    });
                }
                layer[l][r - l] = entry;
            }
        }
        self.layers.push(layer);
        Ok(())
    }

    fn boundary(&self, k: usize, empty: usize) -> Counts {
        let count = self.factorials[empty].clone();
        Counts::monomial(count, usize::from(k == self.gap))
    }

    fn interior(&self, layer: &[Vec<Counts>], l: usize, r: usize, k: usize) -> Counts {
        let m = k - l - r;
        let same = |a: usize, b: usize| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            &layer[lo][hi - lo]
        };
        let mut acc = same(l + 1, r).clone();
        acc.add_scaled(same(l, r + 1), &BigInt::one());
        for j in 2..m {
            let left = self.stored_entry(l, 0, l + j - 1);
            let right = self.stored_entry(0, r, k - l - j);
            acc.add_scaled(&(left * right), &self.binomials[m - 1][j - 1]);
        }
        acc
    }

    fn check_insert(&self, entry: &Counts, l: usize, r: usize, k: usize) -> Result<()> {
        let m = k - l - r;
        let total: BigInt = entry.coeffs().iter().sum();
        debug_assert!(entry.coeffs().iter().all(|c| *c >= BigInt::zero()));
        if total != self.factorials[m] {
            return Err(Error::NotAPgf(format!(
                "gap table entry ({l}, {r}, {k}) does not sum to 1"
            )));
        }
        Ok(())
    }

    fn stored_entry(&self, l: usize, r: usize, k: usize) -> &Counts {
        let (lo, hi) = if l <= r { (l, r) } else { (r, l) };
        &self.layers[k][lo][hi - lo]
    }

    pub fn gap(&self) -> usize {
        self.gap
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Number of `(l, r, k)` entries represented (both orientations).
    pub fn len(&self) -> usize {
        (0..=self.k_max).map(|k| (k + 1) * (k + 2) / 2).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficients held in memory.
    pub fn stored_coefficients(&self) -> usize {
        self.stored
    }

    fn check_index(&self, l: usize, r: usize, k: usize) -> Result<()> {
        if k > self.k_max || l + r > k {
            return Err(Error::arg(format!(
                "entry ({l}, {r}, {k}) outside table with k_max = {}",
                self.k_max
            )));
        }
        Ok(())
    }

    /// Hit-order counts `m! * G(l, r, k)`.
    pub fn counts(&self, l: usize, r: usize, k: usize) -> Result<&Polynomial<BigInt>> {
        self.check_index(l, r, k)?;
        Ok(self.stored_entry(l, r, k))
    }

    /// `G(l, r, k) = E(u^{D_{l,r,k,i}})`.
    pub fn entry(&self, l: usize, r: usize, k: usize) -> Result<RationalPolynomial> {
        let counts = self.counts(l, r, k)?;
        let denom = &self.factorials[k - l - r];
        Ok(counts.map(|c| Rational::new(c.clone(), denom.clone())))
    }

    /// PGF of `D_{i,K}` on the cyclic strip of width `K <= k_max + 1`.
    pub fn distribution(&self, width: usize) -> Result<RationalPolynomial> {
        check_width(width)?;
        self.check_gap_range(width)?;
        self.entry(0, 0, width - 1)
    }

    pub fn moments(&self, width: usize) -> Result<MomentSummary<Rational>> {
        pgf_moments(&self.distribution(width)?)
    }

    fn check_gap_range(&self, width: usize) -> Result<()> {
        if self.gap >= width {
            return Err(Error::arg(format!(
                "gap length i = {} must be below K = {width}",
                self.gap
            )));
        }
        Ok(())
    }
}

/// Table for gap length `gap` complete up to `k = k_max`.
pub fn gap_pgf_table(gap: usize, k_max: usize) -> Result<GapRecursionTable> {
    if k_max < 3 {
        return Err(Error::arg("k_max must be at least 3"));
    }
    GapRecursionTable::build(gap, k_max)
}

/// PGF of `D_{i,K}`.
pub fn gap_distribution(gap: usize, width: usize) -> Result<RationalPolynomial> {
    check_width(width)?;
    if gap == 0 || gap >= width {
        return Err(Error::arg(format!(
            "gap length must satisfy 1 <= i < K = {width}"
        )));
    }
    GapRecursionTable::build(gap, width - 1)?.distribution(width)
}

/// Exact mean and variance of `D_{i,K}`.
pub fn gap_moments(gap: usize, width: usize) -> Result<MomentSummary<Rational>> {
    pgf_moments(&gap_distribution(gap, width)?)
}

/// Coefficients of the `i = 1` bivariate form: the interval generating
/// function is `(a_K y z + b_K (y + z) + c_K) / ((1 - y)(1 - z))` at `x^K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbcTriple {
    pub k: usize,
    pub a: RationalPolynomial,
    pub b: RationalPolynomial,
    pub c: RationalPolynomial,
}

/// Runs the coupled `a/b/c` recursions for `K = 3..=k_max`.
///
/// `c_K(u)` is the PGF of `D_{1,K+1}`.
pub fn abc_recursion(k_max: usize) -> Result<Vec<AbcTriple>> {
    if k_max < 3 {
        return Err(Error::arg("k_max must be at least 3"));
    }
    let int = |n: i64| Rational::from_integer(BigInt::from(n));
    let poly = |cs: &[i64]| RationalPolynomial::new(cs.iter().map(|&c| int(c)).collect());
    let one_minus_u = poly(&[1, -1]);
    let u = poly(&[0, 1]);
    let zero = RationalPolynomial::zero();

    // index n holds a_n, b_n, c_n; zero below 3
    let mut a = vec![zero.clone(); k_max + 1];
    let mut b = vec![zero.clone(); k_max + 1];
    let mut c = vec![zero.clone(); k_max + 1];

    for k in 2..k_max {
        let conv = |p: &[RationalPolynomial], q: &[RationalPolynomial]| {
            let mut acc = RationalPolynomial::zero();
            for j in 3..=k.saturating_sub(3) {
                acc = &acc + &(&p[j] * &q[k - j]);
            }
            acc
        };
        let bb = conv(&b, &b);
        let bc = conv(&b, &c);
        let cc = conv(&c, &c);

        let mut na = &bb + &(&one_minus_u * &b[k - 1]).scale(&int(2));
        let mut nb = &(&(&a[k] + &b[k]) + &bc) + &(&u * &b[k - 1]);
        nb = &(&nb + &b[k - 2]) + &(&one_minus_u * &c[k - 1]);
        let mut nc = &(&b[k].scale(&int(2)) + &c[k].scale(&int(2))) + &cc;
        nc = &(&nc + &(&u * &c[k - 1]).scale(&int(2))) + &c[k - 2].scale(&int(2));

        match k {
            2 => {
                na = &na + &(&one_minus_u * &one_minus_u);
                nb = &nb + &(&u * &one_minus_u);
                nc = &nc + &poly(&[2, 0, 1]);
            }
            3 => {
                nb = &nb + &one_minus_u;
                nc = &nc + &poly(&[0, 2]);
            }
            4 => nc = &nc + &poly(&[1]),
            _ => {}
        }
        let inv = Rational::new(BigInt::one(), BigInt::from(k + 1));
        a[k + 1] = na.scale(&inv);
        b[k + 1] = nb.scale(&inv);
        c[k + 1] = nc.scale(&inv);
    }

    Ok((3..=k_max)
        .map(|k| AbcTriple {
            k,
            a: a[k].clone(),
            b: b[k].clone(),
            c: c[k].clone(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn rp(num: &[i64], den: i64) -> RationalPolynomial {
        RationalPolynomial::new(num.iter().map(|&c| q(c, den)).collect())
    }

    #[test]
    fn boundary_entries() {
        let t = gap_pgf_table(2, 6).unwrap();
        assert_eq!(t.entry(0, 0, 2).unwrap(), rp(&[0, 1], 1));
        assert_eq!(t.entry(1, 0, 2).unwrap(), rp(&[0, 1], 1));
        assert_eq!(t.entry(1, 1, 2).unwrap(), rp(&[0, 1], 1));
        assert_eq!(t.entry(0, 2, 4).unwrap(), rp(&[1], 1));
        assert_eq!(t.entry(0, 0, 1).unwrap(), rp(&[1], 1));
    }

    #[test]
    fn small_i1_entries_match_the_closed_polynomials() {
        let t = gap_pgf_table(1, 7).unwrap();
        assert_eq!(t.entry(0, 0, 3).unwrap(), rp(&[2, 0, 1], 3));
        assert_eq!(t.entry(0, 0, 4).unwrap(), rp(&[1, 2], 3));
        assert_eq!(gap_distribution(1, 4).unwrap(), rp(&[2, 0, 1], 3));
        assert_eq!(gap_moments(1, 4).unwrap().mean, q(2, 3));
    }

    #[test]
    fn index_and_argument_errors() {
        let t = gap_pgf_table(1, 5).unwrap();
        assert!(t.entry(0, 0, 6).is_err());
        assert!(t.entry(3, 3, 5).is_err());
        assert!(gap_pgf_table(0, 5).is_err());
        assert!(gap_pgf_table(1, 2).is_err());
        assert!(gap_distribution(3, 3).is_err());
        assert!(gap_distribution(0, 5).is_err());
        assert!(t.distribution(8).is_err());
    }

    #[test]
    fn budget_error_reports_frontier() {
        match GapRecursionTable::build_with_budget(1, 30, 50) {
            Err(Error::TableBudget { budget, frontier }) => {
                assert_eq!(budget, 50);
                assert!(frontier.2 <= 30);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn table_invariants() {
        for gap in 1..=4 {
            let t = gap_pgf_table(gap, 18).unwrap();
            for k in 0..=18 {
                for l in 0..=k {
                    for r in 0..=(k - l) {
                        let e = t.entry(l, r, k).unwrap();
                        e.validate_pgf().unwrap();
                        assert_eq!(e, t.entry(r, l, k).unwrap());
                        let bound = k / (gap + 1) + 1;
                        assert!(e.degree().unwrap() <= bound, "({l},{r},{k}) i={gap}");
                        if l + r + 2 >= k {
                            let expected = if k == gap {
                                rp(&[0, 1], 1)
                            } else {
                                rp(&[1], 1)
                            };
                            assert_eq!(e, expected);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn abc_rows_k4_and_k7() {
        let abc = abc_recursion(7).unwrap();
        let row4 = &abc[1];
        assert_eq!(row4.k, 4);
        assert!(row4.a.is_zero());
        assert_eq!(row4.b, rp(&[1, -1], 3));
        assert_eq!(row4.c, rp(&[1, 2], 3));
        assert_eq!(abc[4].c, rp(&[98, 132, 68, 0, 17], 315));
    }

    #[test]
    fn abc_values_at_one_and_degrees() {
        let one = q(1, 1);
        for t in abc_recursion(30).unwrap() {
            assert!(t.a.evaluate(&one).is_zero());
            assert!(t.b.evaluate(&one).is_zero());
            assert!(t.c.evaluate(&one).is_one());
            let k = t.k as i64;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let deg = ((2 * k - 1 - 3 * sign) / 4) as usize;
            assert_eq!(t.c.degree(), Some(deg), "K = {k}");
            assert_eq!(t.b.degree(), Some(deg), "K = {k}");
            if t.k != 4 {
                assert_eq!(t.a.degree(), Some(deg), "K = {k}");
            }
        }
        assert!(abc_recursion(2).is_err());
    }
}
