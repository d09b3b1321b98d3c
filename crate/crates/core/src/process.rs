//! The deposition Markov chain on a strip of `K` sites.
//!
//! Sites are labelled `1..=K`. In [`BoundaryMode::Cyclic`] the strip is a
//! discrete torus. In [`BoundaryMode::Auxiliary`] the strip is an interval
//! flanked by two virtual cells `0` and `K + 1` that hold a particle of
//! height 1 from the start; those cells are never stored.
//!
//! A particle dropped on site `k` lands at `1 + max` of the heights over
//! the neighbourhood of `k`. A site therefore becomes a root (holds a
//! particle at height 1) exactly when it is targeted before every other
//! member of its neighbourhood, which is why the final root set only
//! depends on the order of first hits ([`FirstHitPermutation`]).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest strip width accepted anywhere in the crate.
pub const MIN_WIDTH: usize = 3;

/// Upper bound on the number of deposition steps for one height run.
pub const MAX_STEPS: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Cyclic,
    #[serde(rename = "aux")]
    Auxiliary,
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMode::Cyclic => "cyclic",
            BoundaryMode::Auxiliary => "aux",
        })
    }
}

impl FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cyclic" => Ok(BoundaryMode::Cyclic),
            "aux" | "auxiliary" => Ok(BoundaryMode::Auxiliary),
            other => Err(Error::arg(format!(
                "unknown boundary mode {other:?} (expected cyclic or aux)"
            ))),
        }
    }
}

pub(crate) fn check_width(width: usize) -> Result<()> {
    if width < MIN_WIDTH {
        return Err(Error::arg(format!(
            "strip width K must be at least {MIN_WIDTH}, got {width}"
        )));
    }
    Ok(())
}

fn check_site(site: usize, width: usize) -> Result<()> {
    if !(1..=width).contains(&site) {
        return Err(Error::arg(format!("site {site} outside 1..={width}")));
    }
    Ok(())
}

/// Neighbourhood of `site`, always three labels including `site` itself.
///
/// Auxiliary mode can return the virtual labels `0` and `width + 1`.
pub fn neighbor_set(site: usize, width: usize, mode: BoundaryMode) -> Result<[usize; 3]> {
    check_width(width)?;
    check_site(site, width)?;
    Ok(neighbors_unchecked(site, width, mode))
}

#[inline]
fn neighbors_unchecked(site: usize, width: usize, mode: BoundaryMode) -> [usize; 3] {
    match mode {
        BoundaryMode::Cyclic => {
            let left = if site == 1 { width } else { site - 1 };
            let right = if site == width { 1 } else { site + 1 };
            [left, site, right]
        }
        BoundaryMode::Auxiliary => [site - 1, site, site + 1],
    }
}

/// Height configuration after `steps` depositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightField {
    mode: BoundaryMode,
    heights: Vec<u64>,
    steps: u64,
}

impl HeightField {
    /// Flat, empty strip.
    pub fn new(width: usize, mode: BoundaryMode) -> Result<Self> {
        check_width(width)?;
        Ok(Self {
            mode,
            heights: vec![0; width],
            steps: 0,
        })
    }

    /// Builds a field from explicit heights (site 1 first), mostly for tests
    /// and replaying recorded configurations.
    pub fn from_heights(heights: Vec<u64>, mode: BoundaryMode) -> Result<Self> {
        check_width(heights.len())?;
        Ok(Self {
            mode,
            heights,
            steps: 0,
        })
    }

    pub fn width(&self) -> usize {
        self.heights.len()
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Heights of sites `1..=K`, site 1 at index 0.
    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    /// Height at a label, including the virtual auxiliary cells.
    pub fn height(&self, label: usize) -> u64 {
        let width = self.width();
        match self.mode {
            BoundaryMode::Auxiliary if label == 0 || label == width + 1 => 1,
            _ => self.heights[label - 1],
        }
    }

    /// Drops one particle on `target` and returns its landing height.
    pub fn deposit(&mut self, target: usize) -> Result<u64> {
        check_site(target, self.width())?;
        if self.steps >= MAX_STEPS {
            return Err(Error::Resource(format!(
                "a single run is capped at {MAX_STEPS} depositions"
            )));
        }
        Ok(self.deposit_unchecked(target))
    }

    #[inline]
    fn deposit_unchecked(&mut self, target: usize) -> u64 {
        let [a, b, c] = neighbors_unchecked(target, self.width(), self.mode);
        let top = self.height(a).max(self.height(b)).max(self.height(c));
        let landed = top.saturating_add(1);
        self.heights[target - 1] = landed;
        self.steps += 1;
        landed
    }

    /// `(max height, mean height)`.
    pub fn profile_stats(&self) -> (u64, f64) {
        height_profile_stats(self)
    }
}

/// Value-returning form of [`HeightField::deposit`].
pub fn deposit(field: &HeightField, target: usize) -> Result<HeightField> {
    let mut next = field.clone();
    next.deposit(target)?;
    Ok(next)
}

pub fn height_profile_stats(field: &HeightField) -> (u64, f64) {
    let max = field.heights.iter().copied().max().unwrap_or(0);
    let mean = field.heights.iter().map(|&h| h as f64).sum::<f64>() / field.width() as f64;
    (max, mean)
}

/// Rank of each site's first-hit time: `ranks[k - 1]` is the rank of site `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FirstHitPermutation {
    ranks: Vec<usize>,
}

impl FirstHitPermutation {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        check_width(ranks.len())?;
        let mut seen = vec![false; ranks.len()];
        for &r in &ranks {
            if r == 0 || r > ranks.len() || std::mem::replace(&mut seen[r - 1], true) {
                return Err(Error::arg(format!(
                    "ranks must be a permutation of 1..={}",
                    ranks.len()
                )));
            }
        }
        Ok(Self { ranks })
    }

    pub(crate) fn new_unchecked(ranks: Vec<usize>) -> Self {
        Self { ranks }
    }

    /// Uniform permutation via Fisher-Yates.
    pub fn random<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Result<Self> {
        check_width(width)?;
        let mut ranks: Vec<usize> = (1..=width).collect();
        ranks.shuffle(rng);
        Ok(Self { ranks })
    }

    /// First-hit ranks of a target sequence. Sites never targeted are
    /// ranked after all targeted ones, in site order.
    pub fn from_targets(width: usize, targets: &[usize]) -> Result<Self> {
        check_width(width)?;
        let mut ranks = vec![0; width];
        let mut next = 1;
        for &t in targets {
            check_site(t, width)?;
            if ranks[t - 1] == 0 {
                ranks[t - 1] = next;
                next += 1;
            }
        }
        for r in ranks.iter_mut().filter(|r| **r == 0) {
            *r = next;
            next += 1;
        }
        Ok(Self { ranks })
    }

    pub fn width(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub(crate) fn ranks_mut(&mut self) -> &mut [usize] {
        &mut self.ranks
    }
}

/// Final root positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RootSet {
    width: usize,
    mode: BoundaryMode,
    roots: Vec<usize>,
}

impl RootSet {
    /// Validates the structural invariants (sorted, in range, no two
    /// roots adjacent, auxiliary roots away from the pinned cells).
    pub fn new(width: usize, mode: BoundaryMode, roots: Vec<usize>) -> Result<Self> {
        check_width(width)?;
        if roots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("roots must be strictly increasing"));
        }
        if let Some(&r) = roots.iter().find(|&&r| r == 0 || r > width) {
            return Err(Error::arg(format!("root {r} outside 1..={width}")));
        }
        let set = Self { width, mode, roots };
        if let Some((a, b)) = set.adjacent_pair() {
            return Err(Error::arg(format!("roots {a} and {b} are adjacent")));
        }
        if mode == BoundaryMode::Auxiliary && set.roots.iter().any(|&r| r == 1 || r == width) {
            return Err(Error::arg(
                "auxiliary roots cannot touch the pinned boundary",
            ));
        }
        Ok(set)
    }

    fn adjacent_pair(&self) -> Option<(usize, usize)> {
        if let Some(w) = self.roots.windows(2).find(|w| w[1] - w[0] == 1) {
            return Some((w[0], w[1]));
        }
        match (self.mode, self.roots.first(), self.roots.last()) {
            (BoundaryMode::Cyclic, Some(&1), Some(&last)) if last == self.width => Some((last, 1)),
            _ => None,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Root set implied by an order of first hits.
pub fn roots_from_permutation(perm: &FirstHitPermutation, mode: BoundaryMode) -> RootSet {
    let ranks = perm.ranks();
    let width = ranks.len();
    let roots = (1..=width).filter(|&k| is_root(ranks, k, mode)).collect();
    RootSet { width, mode, roots }
}

#[inline]
pub(crate) fn is_root(ranks: &[usize], site: usize, mode: BoundaryMode) -> bool {
    let width = ranks.len();
    let rank = ranks[site - 1];
    match mode {
        BoundaryMode::Cyclic => {
            let left = if site == 1 { width } else { site - 1 };
            let right = if site == width { 1 } else { site + 1 };
            rank < ranks[left - 1] && rank < ranks[right - 1]
        }
        // pinned cells are "hit" before everything
        BoundaryMode::Auxiliary => {
            site != 1 && site != width && rank < ranks[site - 2] && rank < ranks[site]
        }
    }
}

/// Number of roots without materialising the set.
pub(crate) fn count_roots(ranks: &[usize], mode: BoundaryMode) -> usize {
    (1..=ranks.len())
        .filter(|&k| is_root(ranks, k, mode))
        .count()
}

/// `counts[i - 1]` is the number of consecutive-root pairs (including the
/// wrap-around pair) at circular distance `i + 1`, for `i` in `1..K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GapVector {
    width: usize,
    counts: Vec<u32>,
}

impl GapVector {
    pub fn width(&self) -> usize {
        self.width
    }

    /// `D_{i,K}` for `1 <= i < K`; zero outside that range.
    pub fn count(&self, gap: usize) -> u32 {
        gap.checked_sub(1)
            .and_then(|idx| self.counts.get(idx))
            .copied()
            .unwrap_or(0)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of gaps, equal to the number of roots.
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    /// `sum_i i * D_{i,K}`: sites not occupied by roots.
    pub fn weighted_total(&self) -> usize {
        self.counts
            .iter()
            .enumerate()
            .map(|(idx, &c)| (idx + 1) * c as usize)
            .sum()
    }
}

pub fn gap_vector(roots: &RootSet) -> Result<GapVector> {
    if roots.mode != BoundaryMode::Cyclic {
        return Err(Error::WrongMode {
            expected: BoundaryMode::Cyclic,
            found: roots.mode,
        });
    }
    if roots.is_empty() {
        return Err(Error::domain("gap vector of an empty root set"));
    }
    let width = roots.width;
    let mut counts = vec![0u32; width - 1];
    let r = &roots.roots;
    for w in r.windows(2) {
        counts[w[1] - w[0] - 2] += 1;
    }
    // wrap pair: distance K - (r_last - r_first); a lone root sees distance K
    let wrap = width - (r[r.len() - 1] - r[0]);
    counts[wrap - 2] += 1;
    Ok(GapVector { width, counts })
}

/// Runs the chain until every site has been hit at least once, at which
/// point the root set is final. Returns the root set and, in cyclic mode,
/// its gap vector.
pub fn simulate_final_roots<R: Rng + ?Sized>(
    width: usize,
    mode: BoundaryMode,
    rng: &mut R,
) -> Result<(RootSet, Option<GapVector>)> {
    let (_, roots) = simulate_until_covered(width, mode, rng)?;
    let gaps = match mode {
        BoundaryMode::Cyclic => Some(gap_vector(&roots)?),
        BoundaryMode::Auxiliary => None,
    };
    Ok((roots, gaps))
}

/// Full height simulation up to coverage; also returns the final field.
pub fn simulate_until_covered<R: Rng + ?Sized>(
    width: usize,
    mode: BoundaryMode,
    rng: &mut R,
) -> Result<(HeightField, RootSet)> {
    let mut field = HeightField::new(width, mode)?;
    let mut remaining = width;
    let mut is_root = vec![false; width];
    while remaining > 0 {
        let target = rng.random_range(1..=width);
        let first_hit = field.heights[target - 1] == 0;
        let landed = field.deposit_unchecked(target);
        if first_hit {
            remaining -= 1;
            is_root[target - 1] = landed == 1;
        }
    }
    let roots = (1..=width).filter(|&k| is_root[k - 1]).collect();
    Ok((field, RootSet { width, mode, roots }))
}

/// Replays a fixed target sequence with full height updates and returns
/// the sites that ever held a particle at height 1.
pub fn roots_from_targets(width: usize, mode: BoundaryMode, targets: &[usize]) -> Result<RootSet> {
    let mut field = HeightField::new(width, mode)?;
    let mut is_root = vec![false; width];
    for &t in targets {
        if field.deposit(t)? == 1 {
            is_root[t - 1] = true;
        }
    }
    let roots = (1..=width).filter(|&k| is_root[k - 1]).collect();
    Ok(RootSet { width, mode, roots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: [usize; 3]) -> [usize; 3] {
        v.sort_unstable();
        v
    }

    #[test]
    fn neighbourhoods() {
        assert_eq!(
            sorted(neighbor_set(1, 8, BoundaryMode::Cyclic).unwrap()),
            [1, 2, 8]
        );
        assert_eq!(neighbor_set(8, 8, BoundaryMode::Cyclic).unwrap(), [7, 8, 1]);
        for mode in [BoundaryMode::Cyclic, BoundaryMode::Auxiliary] {
            assert_eq!(neighbor_set(5, 10, mode).unwrap(), [4, 5, 6]);
        }
        assert_eq!(
            neighbor_set(8, 8, BoundaryMode::Auxiliary).unwrap(),
            [7, 8, 9]
        );
        assert_eq!(
            neighbor_set(1, 8, BoundaryMode::Auxiliary).unwrap(),
            [0, 1, 2]
        );
    }

    #[test]
    fn neighbourhood_argument_errors() {
        assert!(matches!(
            neighbor_set(0, 8, BoundaryMode::Cyclic),
            Err(Error::InvalidArgument(_))
        ));
        assert!(neighbor_set(9, 8, BoundaryMode::Cyclic).is_err());
        assert!(neighbor_set(1, 2, BoundaryMode::Cyclic).is_err());
    }

    #[test]
    fn deposit_examples() {
        let empty = HeightField::new(5, BoundaryMode::Cyclic).unwrap();
        let f = deposit(&empty, 3).unwrap();
        assert_eq!(f.heights(), &[0, 0, 1, 0, 0]);
        assert_eq!(f.steps(), 1);

        let f = HeightField::from_heights(vec![0, 1, 0, 0, 0], BoundaryMode::Cyclic).unwrap();
        assert_eq!(deposit(&f, 3).unwrap().heights()[2], 2);

        let aux = HeightField::new(5, BoundaryMode::Auxiliary).unwrap();
        assert_eq!(deposit(&aux, 1).unwrap().heights()[0], 2);
        assert_eq!(deposit(&aux, 5).unwrap().heights()[4], 2);
        assert_eq!(deposit(&aux, 3).unwrap().heights()[2], 1);
        assert!(deposit(&aux, 6).is_err());
    }

    #[test]
    fn cyclic_wrap_neighbours_count() {
        let f = HeightField::from_heights(vec![0, 0, 0, 4], BoundaryMode::Cyclic).unwrap();
        assert_eq!(deposit(&f, 1).unwrap().heights()[0], 5);
    }

    #[test]
    fn profile_stats() {
        let f = HeightField::new(4, BoundaryMode::Cyclic).unwrap();
        assert_eq!(height_profile_stats(&f), (0, 0.0));
        let f = HeightField::from_heights(vec![0, 1, 2, 0], BoundaryMode::Cyclic).unwrap();
        assert_eq!(height_profile_stats(&f), (2, 0.75));
    }

    #[test]
    fn permutation_examples() {
        let p = FirstHitPermutation::new(vec![1, 2, 3, 4, 5]).unwrap();
        assert_eq!(
            roots_from_permutation(&p, BoundaryMode::Cyclic).roots(),
            &[1]
        );

        let p = FirstHitPermutation::new(vec![2, 4, 1, 5, 3]).unwrap();
        assert_eq!(
            roots_from_permutation(&p, BoundaryMode::Cyclic).roots(),
            &[1, 3]
        );
        // same order replayed through the height dynamics
        let targets = [3, 1, 5, 2, 4];
        assert_eq!(
            roots_from_targets(5, BoundaryMode::Cyclic, &targets)
                .unwrap()
                .roots(),
            &[1, 3]
        );

        let p = FirstHitPermutation::new(vec![1, 3, 4, 2]).unwrap();
        assert!(roots_from_permutation(&p, BoundaryMode::Auxiliary).is_empty());
        assert!(
            roots_from_targets(4, BoundaryMode::Auxiliary, &[1, 4, 2, 3])
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn permutation_validation() {
        assert!(FirstHitPermutation::new(vec![1, 1, 2]).is_err());
        assert!(FirstHitPermutation::new(vec![0, 1, 2]).is_err());
        assert!(FirstHitPermutation::new(vec![1, 2]).is_err());
        let p = FirstHitPermutation::from_targets(4, &[3, 3, 1]).unwrap();
        assert_eq!(p.ranks(), &[2, 3, 1, 4]);
    }

    #[test]
    fn gap_vector_counts() {
        let g = gap_vector(&RootSet::new(6, BoundaryMode::Cyclic, vec![1, 3, 5]).unwrap()).unwrap();
        assert_eq!(g.counts(), &[3, 0, 0, 0, 0]);

        let g = gap_vector(&RootSet::new(5, BoundaryMode::Cyclic, vec![2]).unwrap()).unwrap();
        assert_eq!(g.counts(), &[0, 0, 0, 1]);

        let g = gap_vector(&RootSet::new(7, BoundaryMode::Cyclic, vec![1, 4]).unwrap()).unwrap();
        assert_eq!((g.count(2), g.count(3)), (1, 1));
        assert_eq!(g.total(), 2);

        let aux = RootSet::new(7, BoundaryMode::Auxiliary, vec![3]).unwrap();
        assert!(matches!(gap_vector(&aux), Err(Error::WrongMode { .. })));
    }

    #[test]
    fn root_set_validation() {
        assert!(RootSet::new(6, BoundaryMode::Cyclic, vec![1, 2]).is_err());
        assert!(RootSet::new(6, BoundaryMode::Cyclic, vec![1, 6]).is_err());
        assert!(RootSet::new(6, BoundaryMode::Auxiliary, vec![1, 6]).is_err());
        assert!(RootSet::new(6, BoundaryMode::Cyclic, vec![3, 1]).is_err());
        assert!(RootSet::new(6, BoundaryMode::Cyclic, vec![7]).is_err());
    }

    #[test]
    fn width_three_cyclic_has_one_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (roots, gaps) = simulate_final_roots(3, BoundaryMode::Cyclic, &mut rng).unwrap();
            assert_eq!(roots.len(), 1);
            assert_eq!(gaps.unwrap().counts(), &[0, 1]);
        }
    }

    /// Visits every permutation of `0..n` (Heap's algorithm); test helper.
    fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
        let mut a: Vec<usize> = (0..n).collect();
        let mut c = vec![0; n];
        f(&a);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                f(&a);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn permutation_path_matches_height_dynamics_exhaustively() {
        for width in 3..=8 {
            for mode in [BoundaryMode::Cyclic, BoundaryMode::Auxiliary] {
                for_each_permutation(width, |order| {
                    let targets: Vec<usize> = order.iter().map(|&s| s + 1).collect();
                    let full = roots_from_targets(width, mode, &targets).unwrap();
                    let perm = FirstHitPermutation::from_targets(width, &targets).unwrap();
                    assert_eq!(
                        full,
                        roots_from_permutation(&perm, mode),
                        "{targets:?} {mode}"
                    );
                });
            }
        }
    }

    fn target_sequence() -> impl Strategy<Value = (usize, Vec<usize>)> {
        (3usize..40).prop_flat_map(|w| (Just(w), proptest::collection::vec(1..=w, 0..400)))
    }

    proptest! {
        #[test]
        fn heights_are_monotone_one_site_per_step((width, targets) in target_sequence()) {
            let mut field = HeightField::new(width, BoundaryMode::Cyclic).unwrap();
            for &t in &targets {
                let before = field.heights().to_vec();
                field.deposit(t).unwrap();
                let changed = before.iter().zip(field.heights()).filter(|(a, b)| a != b).count();
                prop_assert_eq!(changed, 1);
                prop_assert!(before.iter().zip(field.heights()).all(|(a, b)| a <= b));
                prop_assert!(field.heights()[t - 1] > 0);
            }
        }

        #[test]
        fn permutation_equivalence_with_repeated_targets(
            (width, targets) in target_sequence(),
            aux in any::<bool>(),
        ) {
            let mode = if aux { BoundaryMode::Auxiliary } else { BoundaryMode::Cyclic };
            // append a sweep so every site is hit
            let mut all = targets.clone();
            all.extend(1..=width);
            let full = roots_from_targets(width, mode, &all).unwrap();
            let perm = FirstHitPermutation::from_targets(width, &all).unwrap();
            prop_assert_eq!(full, roots_from_permutation(&perm, mode));
        }

        #[test]
        fn root_and_gap_invariants(width in 3usize..300, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let perm = FirstHitPermutation::random(width, &mut rng).unwrap();
            let roots = roots_from_permutation(&perm, BoundaryMode::Cyclic);
            prop_assert!(!roots.is_empty());
            prop_assert!(RootSet::new(width, BoundaryMode::Cyclic, roots.roots().to_vec()).is_ok());
            let gaps = gap_vector(&roots).unwrap();
            prop_assert_eq!(gaps.total(), roots.len());
            prop_assert_eq!(roots.len() + gaps.weighted_total(), width);

            let aux = roots_from_permutation(&perm, BoundaryMode::Auxiliary);
            prop_assert!(RootSet::new(width, BoundaryMode::Auxiliary, aux.roots().to_vec()).is_ok());
        }

        #[test]
        fn full_simulation_invariants(width in 3usize..60, seed in any::<u64>(), aux in any::<bool>()) {
            let mode = if aux { BoundaryMode::Auxiliary } else { BoundaryMode::Cyclic };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (field, roots) = simulate_until_covered(width, mode, &mut rng).unwrap();
            prop_assert!(field.heights().iter().all(|&h| h > 0));
            prop_assert!(RootSet::new(width, mode, roots.roots().to_vec()).is_ok());
            if mode == BoundaryMode::Cyclic {
                prop_assert!(!roots.is_empty());
            }
        }
    }
}
