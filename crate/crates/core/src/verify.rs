//! Self-checks that compare the engines with each other, with the
//! enumeration oracle and with the known closed forms.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::closed_forms::{self, LINEAR_GAP_LAW_FROM};
use crate::error::{Error, Result};
use crate::gaps::{abc_recursion, GapRecursionTable};
use crate::oracle::{enumerate, MAX_ORACLE_WIDTH};
use crate::process::{BoundaryMode, MIN_WIDTH};
use crate::roots::{aux_root_pgf, cyclic_root_pgf};
use crate::scalar::fraction_string;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Roots,
    Gaps,
    Tables,
    Oracle,
    All,
}

impl Suite {
    pub fn default_k_max(self) -> usize {
        match self {
            Suite::Roots => 60,
            Suite::Gaps | Suite::Tables => 40,
            Suite::Oracle => 9,
            Suite::All => 40,
        }
    }

    /// Largest `k_max` the suite accepts before refusing as too expensive.
    pub fn k_max_limit(self) -> usize {
        match self {
            Suite::Roots => 400,
            Suite::Gaps | Suite::Tables | Suite::All => 80,
            Suite::Oracle => MAX_ORACLE_WIDTH,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Roots => "roots",
            Suite::Gaps => "gaps",
            Suite::Tables => "tables",
            Suite::Oracle => "oracle",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "roots" => Suite::Roots,
            "gaps" => Suite::Gaps,
            "tables" => Suite::Tables,
            "oracle" => Suite::Oracle,
            "all" => Suite::All,
            _ => {
                return Err(Error::Config(format!(
                    "unknown suite `{s}` (roots|gaps|tables|oracle|all)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// First mismatch, or the range covered.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub k_max: usize,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Collects a check over a range; stops at the first mismatch.
fn check_range<I, F>(name: &str, range: I, mut f: F) -> Check
where
    I: IntoIterator<Item = usize> + Clone + fmt::Debug,
    F: FnMut(usize) -> std::result::Result<(), String>,
{
    let label = format!("{range:?}");
    for k in range {
        if let Err(msg) = f(k) {
            return Check {
                name: name.into(),
                passed: false,
                detail: format!("K = {k}: {msg}"),
            };
        }
    }
    Check {
        name: name.into(),
        passed: true,
        detail: format!("K in {label}"),
    }
}

fn expect_eq(what: &str, got: &Rational, want: &Rational) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "{what} = {}, expected {}",
            fraction_string(got),
            fraction_string(want)
        ))
    }
}

fn q(n: usize, d: usize) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn run_suite(suite: Suite, k_max: Option<usize>) -> Result<VerifyReport> {
    let k_max = k_max.unwrap_or_else(|| suite.default_k_max());
    let min = match suite {
        Suite::Gaps | Suite::Tables | Suite::All => 5,
        _ => MIN_WIDTH,
    };
    if k_max < min {
        return Err(Error::Config(format!(
            "suite {suite} needs kmax >= {min}, got {k_max}"
        )));
    }
    if k_max > suite.k_max_limit() {
        return Err(Error::Resource(format!(
            "suite {suite} is capped at kmax = {}, got {k_max}",
            suite.k_max_limit()
        )));
    }
    let mut checks = Vec::new();
    match suite {
        Suite::Roots => checks.extend(root_checks(k_max)),
        Suite::Gaps => checks.extend(gap_checks(k_max)?),
        Suite::Tables => checks.extend(table_checks(k_max)?),
        Suite::Oracle => checks.extend(oracle_checks(k_max)?),
        Suite::All => {
            checks.extend(root_checks(k_max));
            checks.extend(gap_checks(k_max)?);
            checks.extend(table_checks(k_max)?);
            checks.extend(oracle_checks(k_max.min(Suite::Oracle.default_k_max()))?);
        }
    }
    let notes = closed_forms::CORRECTION_NOTES
        .iter()
        .map(|s| s.to_string())
        .collect();
    Ok(VerifyReport {
        suite,
        k_max,
        checks,
        notes,
    })
}

fn root_checks(k_max: usize) -> Vec<Check> {
    let mut factorial = BigInt::from(2);
    let mut power = BigInt::from(4);
    let mut out = vec![
        check_range("root count: mean K/3 and exact variance", 3..=k_max, |k| {
            let m = crate::roots::cyclic_root_moments(k).map_err(|e| e.to_string())?;
            expect_eq("mean", &m.mean, &closed_forms::root_mean(k))?;
            expect_eq(
                "variance",
                &m.variance,
                &closed_forms::root_variance(k).expect("k >= 3"),
            )
        }),
        check_range("auxiliary law: P(no root) = 2^(K-1)/K!", 3..=k_max, |k| {
            factorial *= BigInt::from(k);
            let want = Rational::new(power.clone(), factorial.clone());
            power *= 2;
            expect_eq("L_K(0)", &aux_root_pgf(k).coeff(0), &want)
        }),
    ];
    out.push(check_range(
        "root PGFs: nonnegative, sum to one, degree floor((K-1)/2)",
        3..=k_max,
        |k| {
            let p = aux_root_pgf(k);
            p.validate_pgf().map_err(|e| e.to_string())?;
            if p.degree() != Some((k - 1) / 2) {
                return Err(format!("degree {:?}", p.degree()));
            }
            let c = cyclic_root_pgf(k).map_err(|e| e.to_string())?;
            c.validate_pgf().map_err(|e| e.to_string())
        },
    ));
    out
}

fn gap_tables(
    k_max: usize,
    gaps: impl IntoIterator<Item = usize>,
) -> Result<Vec<GapRecursionTable>> {
    gaps.into_iter()
        .map(|i| GapRecursionTable::build(i, k_max))
        .collect()
}

fn gap_checks(k_max: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let one = GapRecursionTable::build(1, k_max)?;
    out.push(check_range(
        "unit gaps: mean and variance closed forms",
        4..=k_max,
        |k| {
            let m = one.moments(k).map_err(|e| e.to_string())?;
            expect_eq(
                "mean",
                &m.mean,
                &closed_forms::gap1_mean(k).expect("k >= 4"),
            )?;
            expect_eq(
                "variance",
                &m.variance,
                &closed_forms::gap1_variance(k).expect("k >= 4"),
            )
        },
    ));

    let abc = abc_recursion(k_max - 1)?;
    out.push(check_range(
        "unit gaps: coupled a/b/c recursion agrees with table",
        4..=k_max,
        |k| {
            let c = &abc[k - 4].c;
            if *c == one.distribution(k).map_err(|e| e.to_string())? {
                Ok(())
            } else {
                Err("c_{K-1} differs from the table entry".into())
            }
        },
    ));
    if k_max >= LINEAR_GAP_LAW_FROM {
        let tables = gap_tables(k_max, 2..=7)?;
        for t in &tables {
            let i = t.gap();
            let (mean, var) = closed_forms::gap_linear_moments(i).expect("2..=7");
            out.push(check_range(
                &format!("gaps of length {i}: linear mean and variance"),
                LINEAR_GAP_LAW_FROM..=k_max,
                |k| {
                    let m = t.moments(k).map_err(|e| e.to_string())?;
                    let kq = q(k, 1);
                    expect_eq("mean", &m.mean, &(&mean * &kq))?;
                    expect_eq("variance", &m.variance, &(&var * &kq))
                },
            ));
        }
    }

    let top = k_max.min(25);
    let tables = gap_tables(top, 1..top)?;
    out.push(check_range(
        "identities: sum_i E(D_i) = K/3 and K/3 + sum_i i E(D_i) = K",
        3..=top,
        |k| {
            let mut count = Rational::zero();
            let mut covered = Rational::zero();
            for t in &tables[..k - 1] {
                let m = t.moments(k).map_err(|e| e.to_string())?;
                covered += &m.mean * q(t.gap(), 1);
                count += m.mean;
            }
            expect_eq("sum of means", &count, &q(k, 3))?;
            expect_eq("covered sites", &(covered + q(k, 3)), &q(k, 1))
        },
    ));
    Ok(out)
}

fn table_checks(k_max: usize) -> Result<Vec<Check>> {
    let tables = gap_tables(k_max + 1, 1..=7)?;
    let abc = abc_recursion(7)?;
    let mut out = vec![check_range(
        "coupled a/b/c recursion: listed rows",
        3..=7,
        |k| {
            let (a, b, c) = closed_forms::small_abc(k).expect("3..=7");
            let row = &abc[k - 3];
            if row.a == a && row.b == b && row.c == c {
                Ok(())
            } else {
                Err("row mismatch".into())
            }
        },
    )];
    for t in &tables {
        let i = t.gap();
        let means = closed_forms::mean_series(i)
            .expect("1..=7")
            .coefficients(k_max + 1);
        let second = closed_forms::second_factorial_series(i)
            .expect("1..=7")
            .coefficients(k_max + 1);
        // x^K carries the moment of D_{i,K+1}
        let from = (i + 2).max(3);
        out.push(check_range(
            &format!("gap length {i}: mean and second factorial moment series"),
            from..=k_max,
            |k| {
                let m = t.moments(k + 1).map_err(|e| e.to_string())?;
                expect_eq("mean", &m.mean, &means[k])?;
                expect_eq(
                    "second factorial moment",
                    &m.second_factorial_moment,
                    &second[k],
                )
            },
        ));
    }
    Ok(out)
}

fn oracle_checks(k_max: usize) -> Result<Vec<Check>> {
    let k_max = k_max.min(MAX_ORACLE_WIDTH);
    let gap_tables = gap_tables(k_max.max(3), 1..k_max)?;
    let to_poly = |d: &crate::oracle::ExactDistribution| d.to_pgf();
    let mut out = vec![check_range(
        "enumeration: cyclic root and gap laws",
        3..=k_max,
        |k| {
            let e = enumerate(k, BoundaryMode::Cyclic).map_err(|e| e.to_string())?;
            if e.identity_violations != 0 {
                return Err(format!(
                    "{} orders violate the gap identities",
                    e.identity_violations
                ));
            }
            let engine = cyclic_root_pgf(k).map_err(|e| e.to_string())?;
            if to_poly(&e.root_distribution()) != engine {
                return Err("root law differs".into());
            }
            for t in &gap_tables[..k - 1] {
                let oracle = to_poly(&e.gap_distribution(t.gap()).map_err(|e| e.to_string())?);
                let engine = t.distribution(k).map_err(|e| e.to_string())?;
                if oracle != engine {
                    return Err(format!("gap law i = {} differs", t.gap()));
                }
            }
            Ok(())
        },
    )];
    out.push(check_range(
        "enumeration: auxiliary root law",
        3..=k_max,
        |k| {
            let e = enumerate(k, BoundaryMode::Auxiliary).map_err(|e| e.to_string())?;
            let d = e.root_distribution();
            if !d.total_probability().is_one() {
                return Err("probabilities do not sum to one".into());
            }
            if to_poly(&d) == aux_root_pgf(k) {
                Ok(())
            } else {
                Err("root law differs".into())
            }
        },
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Roots, Suite::Oracle] {
            let r = run_suite(suite, Some(7)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let r = run_suite(Suite::Gaps, Some(12)).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = run_suite(Suite::Tables, Some(14)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.notes.len(), closed_forms::CORRECTION_NOTES.len());
    }

    #[test]
    fn guards() {
        assert!(matches!(
            run_suite(Suite::Oracle, Some(11)),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            run_suite(Suite::Roots, Some(2)),
            Err(Error::Config(_))
        ));
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!("tables".parse::<Suite>().unwrap(), Suite::Tables);
    }
}
