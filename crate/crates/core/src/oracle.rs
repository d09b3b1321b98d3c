//! Brute-force distributions by enumerating every order of first hits.
//!
//! Each of the `K!` rank vectors is equally likely, and the final root set
//! is a deterministic function of it, so summing over all of them with
//! weight `1/K!` gives exact distributions independent of both the
//! simulator and the generating-function engines.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::{
    check_width, gap_vector, roots_from_permutation, BoundaryMode, FirstHitPermutation,
};
use crate::scalar::fraction_string;
use crate::{Rational, RationalPolynomial};

/// Largest width the enumeration accepts (`10! = 3_628_800` orders).
pub const MAX_ORACLE_WIDTH: usize = 10;

/// Exact law of an integer statistic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub statistic: String,
    pub width: usize,
    pub mode: BoundaryMode,
    pub gap: Option<usize>,
    pub support: BTreeMap<usize, Rational>,
}

impl ExactDistribution {
    fn from_counts(
        statistic: &str,
        width: usize,
        mode: BoundaryMode,
        gap: Option<usize>,
        counts: &[u64],
        total: u64,
    ) -> Self {
        let total = BigInt::from(total);
        let support = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (v, Rational::new(BigInt::from(c), total.clone())))
            .collect();
        Self {
            statistic: statistic.to_string(),
            width,
            mode,
            gap,
            support,
        }
    }

    pub fn probability(&self, value: usize) -> Rational {
        self.support
            .get(&value)
            .cloned()
            .unwrap_or_else(|| Rational::from_integer(BigInt::from(0)))
    }

    /// The same law as a PGF.
    pub fn to_pgf(&self) -> RationalPolynomial {
        let len = self.support.keys().next_back().map_or(0, |&v| v + 1);
        RationalPolynomial::new((0..len).map(|v| self.probability(v)).collect())
    }

    pub fn total_probability(&self) -> Rational {
        self.support.values().cloned().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row {
            value: usize,
            probability: String,
        }
        let rows: Vec<Row> = self
            .support
            .iter()
            .map(|(&value, p)| Row {
                value,
                probability: fraction_string(p),
            })
            .collect();
        serde_json::json!({
            "statistic": self.statistic,
            "K": self.width,
            "mode": self.mode,
            "i": self.gap,
            "support": rows,
        })
    }
}

/// Counts over all `K!` orders: `roots[v]` orders with `v` roots and, in
/// cyclic mode, `gaps[i - 1][v]` orders with `D_{i,K} = v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub width: usize,
    pub mode: BoundaryMode,
    pub orders: u64,
    pub roots: Vec<u64>,
    pub gaps: Vec<Vec<u64>>,
    /// Orders violating `sum_i D_i = R` or `R + sum_i i D_i = K` (always 0).
    pub identity_violations: u64,
}

impl Enumeration {
    fn empty(width: usize, mode: BoundaryMode) -> Self {
        let gaps = match mode {
            BoundaryMode::Cyclic => vec![vec![0; width + 1]; width - 1],
            BoundaryMode::Auxiliary => Vec::new(),
        };
        Self {
            width,
            mode,
            orders: 0,
            roots: vec![0; width + 1],
            gaps,
            identity_violations: 0,
        }
    }

    fn record(&mut self, perm: &FirstHitPermutation) {
        let roots = roots_from_permutation(perm, self.mode);
        self.orders += 1;
        self.roots[roots.len()] += 1;
        if self.mode == BoundaryMode::Cyclic {
            let gaps = gap_vector(&roots).expect("cyclic root sets are never empty");
            for (idx, &c) in gaps.counts().iter().enumerate() {
                self.gaps[idx][c as usize] += 1;
            }
            if gaps.total() != roots.len() || roots.len() + gaps.weighted_total() != self.width {
                self.identity_violations += 1;
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.orders += other.orders;
        self.identity_violations += other.identity_violations;
        for (a, b) in self.roots.iter_mut().zip(&other.roots) {
            *a += b;
        }
        for (ga, gb) in self.gaps.iter_mut().zip(&other.gaps) {
            for (a, b) in ga.iter_mut().zip(gb) {
                *a += b;
            }
        }
        self
    }

    pub fn root_distribution(&self) -> ExactDistribution {
        ExactDistribution::from_counts(
            "roots",
            self.width,
            self.mode,
            None,
            &self.roots,
            self.orders,
        )
    }

    pub fn gap_distribution(&self, gap: usize) -> Result<ExactDistribution> {
        let counts = gap
            .checked_sub(1)
            .and_then(|idx| self.gaps.get(idx))
            .ok_or_else(|| {
                Error::arg(format!(
                    "gap length must satisfy 1 <= i < K = {}",
                    self.width
                ))
            })?;
        Ok(ExactDistribution::from_counts(
            "gap",
            self.width,
            self.mode,
            Some(gap),
            counts,
            self.orders,
        ))
    }
}

fn check_oracle_width(width: usize) -> Result<()> {
    check_width(width)?;
    if width > MAX_ORACLE_WIDTH {
        return Err(Error::Resource(format!(
            "enumeration is capped at K <= {MAX_ORACLE_WIDTH} (K! orders), got K = {width}"
        )));
    }
    Ok(())
}

/// Rearranges `a` into the next permutation in lexicographic order;
/// returns false after the last one.
fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&x| x > a[i]).expect("a[i+1] > a[i]");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// Enumerates all `K!` rank vectors, one worker per leading rank.
pub fn enumerate(width: usize, mode: BoundaryMode) -> Result<Enumeration> {
    check_oracle_width(width)?;
    let result = (1..=width)
        .into_par_iter()
        .map(|lead| {
            let mut acc = Enumeration::empty(width, mode);
            let mut ranks: Vec<usize> = std::iter::once(lead)
                .chain((1..=width).filter(|&r| r != lead))
                .collect();
            let mut perm = FirstHitPermutation::new_unchecked(ranks.clone());
            loop {
                acc.record(&perm);
                if !next_permutation(&mut ranks[1..]) {
                    break;
                }
                perm.ranks_mut().copy_from_slice(&ranks);
            }
            acc
        })
        .reduce(|| Enumeration::empty(width, mode), Enumeration::merge);
    Ok(result)
}

pub fn enumerate_root_distribution(width: usize, mode: BoundaryMode) -> Result<ExactDistribution> {
    Ok(enumerate(width, mode)?.root_distribution())
}

/// Law of `D_{i,K}` on the cyclic strip.
pub fn enumerate_gap_distribution(width: usize, gap: usize) -> Result<ExactDistribution> {
    check_oracle_width(width)?;
    if gap == 0 || gap >= width {
        return Err(Error::arg(format!(
            "gap length must satisfy 1 <= i < K = {width}"
        )));
    }
    enumerate(width, BoundaryMode::Cyclic)?.gap_distribution(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::pgf_moments;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn lexicographic_successor() {
        let mut a = [1, 2, 3];
        let mut seen = vec![a.to_vec()];
        while next_permutation(&mut a) {
            seen.push(a.to_vec());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![1, 3, 2]);
        assert_eq!(seen[5], vec![3, 2, 1]);
    }

    #[test]
    fn width_three_and_four() {
        let d = enumerate_root_distribution(3, BoundaryMode::Cyclic).unwrap();
        assert_eq!(d.probability(1), q(1, 1));

        let m = pgf_moments(
            &enumerate_root_distribution(4, BoundaryMode::Cyclic)
                .unwrap()
                .to_pgf(),
        )
        .unwrap();
        // P(R = 2) = 1/3: the site opposite the first hit must beat both neighbours
        assert_eq!((m.mean, m.variance), (q(4, 3), q(2, 9)));

        let aux = enumerate_root_distribution(3, BoundaryMode::Auxiliary).unwrap();
        assert_eq!(aux.probability(1), q(1, 3));
        assert_eq!(aux.probability(0), q(2, 3));
    }

    #[test]
    fn gap_laws_small() {
        let m = pgf_moments(&enumerate_gap_distribution(4, 1).unwrap().to_pgf()).unwrap();
        assert_eq!(m.mean, q(2, 3));
        let m = pgf_moments(&enumerate_gap_distribution(5, 1).unwrap().to_pgf()).unwrap();
        assert_eq!((m.mean, m.variance), (q(2, 3), q(2, 9)));
    }

    #[test]
    fn guards() {
        assert!(matches!(
            enumerate_root_distribution(11, BoundaryMode::Cyclic),
            Err(Error::Resource(_))
        ));
        assert!(enumerate_gap_distribution(5, 5).is_err());
        assert!(enumerate_root_distribution(2, BoundaryMode::Cyclic).is_err());
    }

    #[test]
    fn probabilities_are_exact_and_identities_hold() {
        for width in 3..=8 {
            let e = enumerate(width, BoundaryMode::Cyclic).unwrap();
            assert_eq!(e.identity_violations, 0);
            let fact: u64 = (1..=width as u64).product();
            assert_eq!(e.orders, fact);
            let d = e.root_distribution();
            assert_eq!(d.total_probability(), q(1, 1));
            for p in d.support.values() {
                assert_eq!(BigInt::from(fact) % p.denom(), BigInt::from(0));
            }
        }
    }
}
