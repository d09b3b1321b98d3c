//! Streaming accumulators and goodness-of-fit statistics.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Moments and unit-bin histogram of an integer statistic. Sums are exact.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IntegerAccumulator {
    pub count: u64,
    sum: i128,
    sum_sq: i128,
    pub histogram: BTreeMap<i64, u64>,
}

impl IntegerAccumulator {
    pub fn push(&mut self, x: i64) {
        self.count += 1;
        self.sum += i128::from(x);
        self.sum_sq += i128::from(x) * i128::from(x);
        *self.histogram.entry(x).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (&v, &c) in &other.histogram {
            *self.histogram.entry(v).or_insert(0) += c;
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as i128;
        // n * sum_sq - sum^2 is exact and non-negative
        let centred = n * self.sum_sq - self.sum * self.sum;
        centred as f64 / (n as f64 * (n - 1) as f64)
    }

    /// Values with multiplicity, expanded from the histogram.
    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.histogram
            .iter()
            .flat_map(|(&v, &c)| std::iter::repeat(v as f64).take(c as usize))
    }
}

/// Moments of a real statistic plus a bounded sample buffer.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RealAccumulator {
    pub count: u64,
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
    #[serde(skip)]
    samples: Vec<f64>,
    capacity: usize,
    /// True once samples were dropped because the buffer was full.
    pub truncated: bool,
}

impl RealAccumulator {
    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            capacity,
            ..Self::default()
        }
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
        if self.samples.len() < self.capacity {
            self.samples.push(x);
        } else {
            self.truncated = true;
        }
    }

    /// Order-sensitive only through floating-point rounding of the sums.
    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
        let room = self.capacity.saturating_sub(self.samples.len());
        self.truncated |= other.truncated || other.samples.len() > room;
        self.samples
            .extend(other.samples.iter().take(room).copied());
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        ((self.sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `bins` equal-width bins over `mean +- 5 sd`: `(lower edge, count)`.
    pub fn histogram(&self, bins: usize) -> Vec<(f64, u64)> {
        let sd = self.variance().sqrt();
        let (lo, hi) = if sd > 0.0 {
            (self.mean() - 5.0 * sd, self.mean() + 5.0 * sd)
        } else {
            (self.mean() - 0.5, self.mean() + 0.5)
        };
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &x in &self.samples {
            let idx = ((x - lo) / width).floor();
            if idx >= 0.0 && (idx as usize) < bins {
                counts[idx as usize] += 1;
            }
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (lo + i as f64 * width, c))
            .collect()
    }
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn check_standardisation(len: usize, sd: f64) -> Result<()> {
    if len == 0 {
        return Err(Error::domain("KS statistic of an empty sample"));
    }
    if sd.is_nan() || sd <= 0.0 || sd.is_infinite() {
        return Err(Error::domain(format!(
            "standard deviation must be positive, got {sd}"
        )));
    }
    Ok(())
}

/// Kolmogorov-Smirnov distance between the empirical law of
/// `(x - mean) / sd` and the standard normal.
pub fn normalized_ks_statistic(samples: &[f64], mean: f64, sd: f64) -> Result<f64> {
    check_standardisation(samples.len(), sd)?;
    let mut z: Vec<f64> = samples.iter().map(|&x| (x - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    Ok(z.iter().enumerate().fold(0.0f64, |d, (i, &zi)| {
        let phi = standard_normal_cdf(zi);
        d.max((i + 1) as f64 / n - phi).max(phi - i as f64 / n)
    }))
}

/// KS distance for an integer-valued statistic against the normal law
/// with half-unit continuity correction: compares `P_n(X <= v)` with
/// `Phi((v + 1/2 - mean) / sd)` at every integer `v` of the sample range.
///
/// The uncorrected distance of a lattice sample is bounded below by half
/// the largest atom, whatever the sample size.
pub fn lattice_ks_statistic(histogram: &BTreeMap<i64, u64>, mean: f64, sd: f64) -> Result<f64> {
    let total: u64 = histogram.values().sum();
    check_standardisation(total as usize, sd)?;
    let (&lo, _) = histogram.first_key_value().expect("non-empty");
    let (&hi, _) = histogram.last_key_value().expect("non-empty");
    let mut cumulative = 0u64;
    let mut d = 0.0f64;
    for v in (lo - 1)..=hi {
        cumulative += histogram.get(&v).copied().unwrap_or(0);
        let empirical = cumulative as f64 / total as f64;
        let normal = standard_normal_cdf((v as f64 + 0.5 - mean) / sd);
        d = d.max((empirical - normal).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn integer_accumulator_merge_matches_sequential() {
        let xs = [3i64, 5, 5, 7, 2, 9, 5];
        let mut whole = IntegerAccumulator::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut a, mut b) = (IntegerAccumulator::default(), IntegerAccumulator::default());
        xs[..3].iter().for_each(|&x| a.push(x));
        xs[3..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a, whole);
        assert!((whole.mean() - 36.0 / 7.0).abs() < 1e-12);
        let mean = 36.0 / 7.0;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / 6.0;
        assert!((whole.variance() - var).abs() < 1e-12);
        assert_eq!(whole.histogram.values().sum::<u64>(), 7);
    }

    #[test]
    fn real_accumulator_buffer_is_bounded() {
        let mut acc = RealAccumulator::with_capacity(3);
        for x in [1.0, 2.0, 3.0, 4.0] {
            acc.push(x);
        }
        assert_eq!(acc.samples(), &[1.0, 2.0, 3.0]);
        assert!(acc.truncated);
        assert!((acc.mean() - 2.5).abs() < 1e-15);
        let total: u64 = acc.histogram(200).iter().map(|&(_, c)| c).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn ks_of_normal_samples_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let normal = Normal::new(3.0, 2.0).unwrap();
        let xs: Vec<f64> = (0..100_000).map(|_| normal.sample(&mut rng)).collect();
        let d = normalized_ks_statistic(&xs, 3.0, 2.0).unwrap();
        assert!(d < 0.01, "KS = {d}");
        // a wrong location is detected
        assert!(normalized_ks_statistic(&xs, 3.5, 2.0).unwrap() > 0.05);
    }

    #[test]
    fn ks_degenerate_inputs() {
        assert!(matches!(
            normalized_ks_statistic(&[1.0, 1.0], 1.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(normalized_ks_statistic(&[], 0.0, 1.0).is_err());
        assert!(lattice_ks_statistic(&BTreeMap::new(), 0.0, 1.0).is_err());
    }

    #[test]
    fn lattice_ks_on_a_binomial() {
        // Binomial(400, 1/2) is very close to normal after continuity correction
        let n = 400u64;
        let mut hist = BTreeMap::new();
        let mut logc = 0.0f64;
        for k in 0..=n {
            if k > 0 {
                logc += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            let p = (logc - n as f64 * 2f64.ln()).exp();
            let c = (p * 1e9).round() as u64;
            if c > 0 {
                hist.insert(k as i64, c);
            }
        }
        let d = lattice_ks_statistic(&hist, 200.0, 10.0).unwrap();
        assert!(d < 0.002, "corrected KS = {d}");
        let raw: Vec<f64> = hist
            .iter()
            .flat_map(|(&v, &c)| std::iter::repeat(v as f64).take((c / 1000) as usize))
            .collect();
        let d_raw = normalized_ks_statistic(&raw, 200.0, 10.0).unwrap();
        assert!(d_raw > 0.015, "uncorrected KS = {d_raw}");
    }
}
