//! Construction, enumeration, and exact evaluation of optimal n-point
//! quantizers.
//!
//! Level `l` of the construction pairs a cell point with a tail point for
//! every word whose probability weight is `2^-l` (equivalently, whose letters
//! sum to `l`), giving `2^l` points total. An optimal set for `2^l <= n <
//! 2^(l+1)` replaces `n - 2^l` chosen points of the level set by their two
//! refinements. All arithmetic is exact; the closed-form quantization error
//! and the summed construction error must agree to the last bit.

use itertools::Itertools;
use std::fmt;

use crate::error::{Error, Result};
use crate::measure::{cell_centroid, cell_error, cell_interval, moments, tail_centroid, Interval};
use crate::rational::{from_int, pow18_inv, ratio, Rational};
use crate::words::Word;

/// Resource limits for constructions that grow exponentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest level set that may be materialized (`2^depth` points).
    pub depth: u32,
    /// Largest family `enumerate_optimal_sets` may return.
    pub enumeration: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            depth: 20,
            enumeration: 100_000,
        }
    }
}

/// Whether a quantizer point sits at the centroid of a cell or of a tail
/// family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    Cell,
    Tail,
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointKind::Cell => write!(f, "Cell"),
            PointKind::Tail => write!(f, "Tail"),
        }
    }
}

/// A quantizer point together with the construction label it came from.
#[derive(Debug, Clone, Eq)]
pub struct LabeledPoint {
    kind: PointKind,
    word: Word,
    position: Rational,
    /// True when the position was derived from the label by a constructor,
    /// letting consistency checks skip the recomputation.
    derived: bool,
}

impl PartialEq for LabeledPoint {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.word == other.word && self.position == other.position
    }
}

impl LabeledPoint {
    /// The centroid of the cell of `word`.
    pub fn cell(word: Word) -> Self {
        let position = cell_centroid(&word);
        LabeledPoint {
            kind: PointKind::Cell,
            word,
            position,
            derived: true,
        }
    }

    /// The centroid of the tail family of `word`; the empty word has no tail.
    pub fn tail(word: Word) -> Result<Self> {
        let position = tail_centroid(&word)?;
        Ok(LabeledPoint {
            kind: PointKind::Tail,
            word,
            position,
            derived: true,
        })
    }

    /// A point with an arbitrary position, possibly away from its label's
    /// centroid. Exists so the centroid condition can be probed with
    /// perturbed sets; the constructors above are the consistent ones.
    pub fn with_position(kind: PointKind, word: Word, position: Rational) -> Self {
        LabeledPoint {
            kind,
            word,
            position,
            derived: false,
        }
    }

    pub fn kind(&self) -> PointKind {
        self.kind
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn position(&self) -> &Rational {
        &self.position
    }

    /// The centroid its label dictates.
    pub fn derived_position(&self) -> Result<Rational> {
        match self.kind {
            PointKind::Cell => Ok(cell_centroid(&self.word)),
            PointKind::Tail => tail_centroid(&self.word),
        }
    }

    /// True iff the stored position equals the label's centroid.
    pub fn is_consistent(&self) -> bool {
        self.derived
            || self
                .derived_position()
                .map(|p| p == self.position)
                .unwrap_or(false)
    }

    /// The support piece this point quantizes: the cell itself, or the
    /// smallest interval enclosing the tail family (from the first sibling's
    /// left edge to the parent cell's right edge).
    pub fn support(&self) -> Result<Interval> {
        match self.kind {
            PointKind::Cell => Ok(cell_interval(&self.word)),
            PointKind::Tail => {
                let first = self.word.tail_representative(1)?;
                let parent = self.word.drop_last()?;
                Ok(Interval::new(
                    cell_interval(&first).lo().clone(),
                    cell_interval(&parent).hi().clone(),
                ))
            }
        }
    }

    /// The error this point contributes inside its own piece, `p s^2 V`.
    /// Cell and tail pieces of the same word contribute identically.
    pub fn own_error(&self) -> Rational {
        cell_error(&self.word)
    }

    /// The two points replacing this one when it is split: a cell point
    /// appends the letter 1, a tail point advances to its first
    /// representative.
    pub fn successors(&self) -> Result<(LabeledPoint, LabeledPoint)> {
        let word = match self.kind {
            PointKind::Cell => self.word.child(1)?,
            PointKind::Tail => self.word.tail_representative(1)?,
        };
        Ok((LabeledPoint::cell(word.clone()), LabeledPoint::tail(word)?))
    }

    /// Compact label such as `Cell[1,2]`.
    pub fn label(&self) -> String {
        format!("{}{}", self.kind, self.word)
    }
}

/// An ordered set of labeled quantizer points with strictly increasing
/// positions inside the unit interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizerSet {
    points: Vec<LabeledPoint>,
}

impl QuantizerSet {
    pub fn from_points(mut points: Vec<LabeledPoint>) -> Result<Self> {
        points.sort_by(|a, b| a.position.cmp(&b.position));
        for pair in points.windows(2) {
            if pair[0].position == pair[1].position {
                return Err(Error::DuplicatePosition {
                    position: crate::rational::format_rational(&pair[0].position),
                });
            }
        }
        for point in &points {
            if point.position < from_int(0) || point.position > from_int(1) {
                return Err(Error::PositionOutOfRange {
                    position: crate::rational::format_rational(&point.position),
                });
            }
        }
        Ok(QuantizerSet { points })
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Rational> {
        self.points.iter().map(|p| p.position.clone()).collect()
    }

    /// Errors out unless every stored position matches its label.
    fn require_consistent(&self) -> Result<()> {
        for (index, point) in self.points.iter().enumerate() {
            if !point.is_consistent() {
                return Err(Error::InconsistentLabel {
                    index,
                    position: crate::rational::format_rational(&point.position),
                    label: point.label(),
                });
            }
        }
        Ok(())
    }
}

/// The level index of `n`: the unique `l` with `2^l <= n < 2^(l+1)`.
pub fn level_index(n: u64) -> Result<u32> {
    if n < 2 {
        return Err(Error::NTooSmall { n, min: 2 });
    }
    Ok(63 - n.leading_zeros())
}

/// All words whose letters sum to `total`, in lexicographic order.
fn compositions(total: u32) -> Vec<Word> {
    fn fill(total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Word>) {
        if total == 0 {
            out.push(Word::new(prefix.clone()).expect("letters are positive"));
            return;
        }
        for first in 1..=total {
            prefix.push(first);
            fill(total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(total, &mut Vec::new(), &mut out);
    out
}

/// The level-`l` quantizer: cell and tail points for every word with letter
/// sum `l`, sorted by position. Level 0 is the single mean point.
pub fn build_level_set(level: u32) -> Result<QuantizerSet> {
    build_level_set_with_caps(level, &Caps::default())
}

pub fn build_level_set_with_caps(level: u32, caps: &Caps) -> Result<QuantizerSet> {
    if level > caps.depth {
        return Err(Error::DepthCapExceeded {
            level,
            cap: caps.depth,
        });
    }
    if level == 0 {
        return QuantizerSet::from_points(vec![LabeledPoint::cell(Word::empty())]);
    }
    let mut points = Vec::with_capacity(1 << level);
    for word in compositions(level) {
        points.push(LabeledPoint::cell(word.clone()));
        points.push(LabeledPoint::tail(word)?);
    }
    QuantizerSet::from_points(points)
}

/// The special n = 1 case: the mean, with error equal to the variance.
pub fn optimal_one_mean() -> QuantizerSet {
    QuantizerSet::from_points(vec![LabeledPoint::cell(Word::empty())])
        .expect("the single mean point is a valid set")
}

/// Builds the optimal n-set selected by `subset`: indices into the sorted
/// level set choosing which points get replaced by their refinements.
pub fn build_optimal_set(n: u64, subset: &[usize]) -> Result<QuantizerSet> {
    build_optimal_set_with_caps(n, subset, &Caps::default())
}

pub fn build_optimal_set_with_caps(n: u64, subset: &[usize], caps: &Caps) -> Result<QuantizerSet> {
    let level = build_level_set_with_caps(level_index(n)?, caps)?;
    build_optimal_set_from(&level, n, subset)
}

/// Same as [`build_optimal_set`] but reuses an already materialized level
/// set, which callers sweeping many `n` or many subsets should do.
pub fn build_optimal_set_from(
    level: &QuantizerSet,
    n: u64,
    subset: &[usize],
) -> Result<QuantizerSet> {
    let l = level_index(n)?;
    let level_size = 1usize << l;
    if level.len() != level_size {
        return Err(Error::LevelSetSizeMismatch {
            len: level.len(),
            level: l,
        });
    }
    let expected = (n - (1u64 << l)) as usize;
    if subset.len() != expected {
        return Err(Error::SubsetSizeMismatch {
            got: subset.len(),
            expected,
        });
    }
    let mut replace = vec![false; level_size];
    for &index in subset {
        if index >= level_size {
            return Err(Error::SubsetIndexOutOfRange {
                index,
                len: level_size,
            });
        }
        if replace[index] {
            return Err(Error::DuplicateSubsetIndex { index });
        }
        replace[index] = true;
    }

    let mut points = Vec::with_capacity(n as usize);
    for (index, point) in level.points().iter().enumerate() {
        if replace[index] {
            let (cell, tail) = point.successors()?;
            points.push(cell);
            points.push(tail);
        } else {
            points.push(point.clone());
        }
    }
    QuantizerSet::from_points(points)
}

/// Number of distinct optimal n-sets, `C(2^l, n - 2^l)`, saturating at
/// `u128::MAX`.
pub fn optimal_set_count(n: u64) -> Result<u128> {
    let l = level_index(n)?;
    Ok(binomial(1u64 << l, n - (1u64 << l)))
}

fn binomial(m: u64, k: u64) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        // Each partial product is itself a binomial coefficient, so the
        // division is exact.
        c = match c.checked_mul(u128::from(m - k + i)) {
            Some(v) => v / u128::from(i),
            None => return u128::MAX,
        };
    }
    c
}

/// Every optimal n-set, in lexicographic order of the replaced index subset.
pub fn enumerate_optimal_sets(n: u64) -> Result<Vec<QuantizerSet>> {
    enumerate_optimal_sets_with_caps(n, &Caps::default())
}

pub fn enumerate_optimal_sets_with_caps(n: u64, caps: &Caps) -> Result<Vec<QuantizerSet>> {
    let l = level_index(n)?;
    let count = optimal_set_count(n)?;
    if count > u128::from(caps.enumeration) {
        return Err(Error::EnumerationCapExceeded {
            count,
            cap: caps.enumeration,
        });
    }
    let level = build_level_set_with_caps(l, caps)?;
    let k = (n - (1u64 << l)) as usize;
    let mut sets = Vec::with_capacity(count as usize);
    for subset in (0..level.len()).combinations(k) {
        sets.push(build_optimal_set_from(&level, n, &subset)?);
    }
    Ok(sets)
}

/// The exact n-th quantization error.
///
/// For n = 1 this is the variance; for larger n it is the closed form
/// `18^-l / 8 * (2^(l+1) - n + (n - 2^l)/9)` with `l` the level index.
pub fn quantization_error(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::NTooSmall { n, min: 1 });
    }
    if n == 1 {
        return Ok(moments().variance);
    }
    let l = level_index(n)?;
    let kept = from_int(2i64.pow(l + 1)) - from_int(n as i64);
    let refined = from_int(n as i64) - from_int(2i64.pow(l));
    Ok(pow18_inv(u64::from(l)) * ratio(1, 8) * (kept + refined / from_int(9)))
}

/// Exact distortion of a constructed set: the sum of each point's own piece
/// error. Valid because the pieces of a constructed set tile the support and
/// each piece lies inside its point's Voronoi region.
pub fn set_distortion(set: &QuantizerSet) -> Result<Rational> {
    set.require_consistent()?;
    // Piece errors depend only on the letter sum, so bucket equal sums
    // instead of adding the same rational thousands of times.
    let mut groups: std::collections::BTreeMap<u64, (u64, &LabeledPoint)> =
        std::collections::BTreeMap::new();
    for point in set.points() {
        groups
            .entry(point.word().letter_sum())
            .and_modify(|(count, _)| *count += 1)
            .or_insert((1, point));
    }
    let mut total = Rational::from_integer(0.into());
    for (count, representative) in groups.into_values() {
        total += Rational::from_integer(count.into()) * representative.own_error();
    }
    Ok(total)
}

/// Midpoints between consecutive points: the Voronoi cell boundaries.
pub fn voronoi_boundaries(set: &QuantizerSet) -> Vec<Rational> {
    set.points()
        .windows(2)
        .map(|pair| (pair[0].position() + pair[1].position()) / from_int(2))
        .collect()
}

/// A split candidate: which point was refined and the resulting set.
#[derive(Debug, Clone)]
pub struct SplitCandidate {
    pub split_point: LabeledPoint,
    pub set: QuantizerSet,
}

/// All optimal (n+1)-sets reachable from `set` by one split.
///
/// The split targets are the points whose word maximizes `p s^2`, i.e.
/// minimizes the letter sum; every maximizer yields one successor set.
pub fn split_step(set: &QuantizerSet) -> Result<Vec<QuantizerSet>> {
    Ok(split_candidates(set)?
        .into_iter()
        .map(|candidate| candidate.set)
        .collect())
}

pub fn split_candidates(set: &QuantizerSet) -> Result<Vec<SplitCandidate>> {
    set.require_consistent()?;
    let min_sum = set
        .points()
        .iter()
        .map(|p| p.word().letter_sum())
        .min()
        .ok_or(Error::NTooSmall { n: 0, min: 1 })?;

    let mut out = Vec::new();
    for (index, point) in set.points().iter().enumerate() {
        if point.word().letter_sum() != min_sum {
            continue;
        }
        let (cell, tail) = point.successors()?;
        let mut points: Vec<LabeledPoint> = set
            .points()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, p)| p.clone())
            .collect();
        points.push(cell);
        points.push(tail);
        out.push(SplitCandidate {
            split_point: point.clone(),
            set: QuantizerSet::from_points(points)?,
        });
    }
    Ok(out)
}

/// Exact centroid-condition check: every point must be the conditional mean
/// of its own Voronoi region.
///
/// For a labeled set this reduces to two exact comparisons per point: the
/// stored position equals the label's centroid, and the point's support
/// piece fits between the midpoints shared with its neighbors. Containment
/// of each piece in its own Voronoi cell also forces every other piece out
/// of that cell, because the pieces are then separated by the midpoints.
pub fn centroid_condition_check(set: &QuantizerSet) -> Result<bool> {
    if set.is_empty() {
        return Ok(false);
    }
    for point in set.points() {
        if !point.is_consistent() {
            return Ok(false);
        }
    }
    let boundaries = voronoi_boundaries(set);
    for (i, point) in set.points().iter().enumerate() {
        let piece = point.support()?;
        if i > 0 && piece.lo() < &boundaries[i - 1] {
            return Ok(false);
        }
        if i < boundaries.len() && piece.hi() > &boundaries[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{format_rational, ratio};

    fn w(letters: &[u32]) -> Word {
        Word::from_letters(letters)
    }

    fn positions_of(set: &QuantizerSet) -> Vec<Rational> {
        set.positions()
    }

    #[test]
    fn level_index_examples() {
        assert_eq!(level_index(3).unwrap(), 1);
        assert_eq!(level_index(4).unwrap(), 2);
        assert_eq!(level_index(16).unwrap(), 4);
        assert_eq!(level_index(2).unwrap(), 1);
        assert_eq!(level_index(4095).unwrap(), 11);
        assert!(matches!(level_index(1), Err(Error::NTooSmall { .. })));
    }

    #[test]
    fn level_set_examples() {
        let l0 = build_level_set(0).unwrap();
        assert_eq!(positions_of(&l0), vec![ratio(1, 2)]);

        let l1 = build_level_set(1).unwrap();
        assert_eq!(positions_of(&l1), vec![ratio(1, 6), ratio(5, 6)]);
        assert_eq!(l1.points()[0].label(), "Cell[1]");
        assert_eq!(l1.points()[1].label(), "Tail[1]");

        let l2 = build_level_set(2).unwrap();
        assert_eq!(
            positions_of(&l2),
            vec![ratio(1, 18), ratio(5, 18), ratio(13, 18), ratio(17, 18)]
        );
    }

    #[test]
    fn level_set_sizes_are_powers_of_two() {
        for level in 0..=12u32 {
            assert_eq!(build_level_set(level).unwrap().len(), 1 << level);
        }
    }

    #[test]
    fn level_four_follows_the_literal_construction() {
        // The sixteen points include the cell and tail of the single-letter
        // word [4]; the tail label stays [4] even though its position matches
        // the conditional mean beyond cell 4.
        let l4 = build_level_set(4).unwrap();
        assert_eq!(l4.len(), 16);
        let labels: Vec<String> = l4.points().iter().map(|p| p.label()).collect();
        assert!(labels.contains(&"Cell[1,1,1,1]".to_string()));
        assert!(labels.contains(&"Tail[1,3]".to_string()));
        assert!(labels.contains(&"Cell[4]".to_string()));
        assert!(labels.contains(&"Tail[4]".to_string()));
        assert!(!labels.iter().any(|l| l.contains("[5]")));
        let tail4 = l4
            .points()
            .iter()
            .find(|p| p.label() == "Tail[4]")
            .unwrap();
        assert_eq!(tail4.position(), &ratio(161, 162));
    }

    #[test]
    fn depth_cap_is_enforced() {
        let caps = Caps {
            depth: 3,
            ..Caps::default()
        };
        assert!(matches!(
            build_level_set_with_caps(4, &caps),
            Err(Error::DepthCapExceeded { level: 4, cap: 3 })
        ));
    }

    #[test]
    fn optimal_sets_for_three_points() {
        // Splitting the cell point.
        let set = build_optimal_set(3, &[0]).unwrap();
        assert_eq!(
            positions_of(&set),
            vec![ratio(1, 18), ratio(5, 18), ratio(5, 6)]
        );
        // Splitting the tail point.
        let set = build_optimal_set(3, &[1]).unwrap();
        assert_eq!(
            positions_of(&set),
            vec![ratio(1, 6), ratio(13, 18), ratio(17, 18)]
        );
    }

    #[test]
    fn optimal_set_for_five_points_tail_case() {
        let set = build_optimal_set(5, &[1]).unwrap();
        assert_eq!(
            positions_of(&set),
            vec![
                ratio(1, 18),
                ratio(13, 54),
                ratio(17, 54),
                ratio(13, 18),
                ratio(17, 18)
            ]
        );
    }

    #[test]
    fn all_four_five_point_sets_match_the_catalog() {
        let sets = enumerate_optimal_sets(5).unwrap();
        assert_eq!(sets.len(), 4);
        let expected = [
            vec![ratio(1, 54), ratio(5, 54), ratio(5, 18), ratio(13, 18), ratio(17, 18)],
            vec![ratio(1, 18), ratio(13, 54), ratio(17, 54), ratio(13, 18), ratio(17, 18)],
            vec![ratio(1, 18), ratio(5, 18), ratio(37, 54), ratio(41, 54), ratio(17, 18)],
            vec![ratio(1, 18), ratio(5, 18), ratio(13, 18), ratio(49, 54), ratio(53, 54)],
        ];
        for positions in &expected {
            assert!(
                sets.iter().any(|s| &positions_of(s) == positions),
                "missing expected set {positions:?}"
            );
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_optimal_sets(4).unwrap().len(), 1);
        assert_eq!(enumerate_optimal_sets(5).unwrap().len(), 4);
        assert_eq!(enumerate_optimal_sets(6).unwrap().len(), 6);
        assert_eq!(optimal_set_count(6).unwrap(), 6);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let caps = Caps {
            enumeration: 3,
            ..Caps::default()
        };
        let err = enumerate_optimal_sets_with_caps(5, &caps).unwrap_err();
        assert_eq!(
            err,
            Error::EnumerationCapExceeded { count: 4, cap: 3 }
        );
    }

    #[test]
    fn subset_validation() {
        assert!(matches!(
            build_optimal_set(6, &[0, 0]),
            Err(Error::DuplicateSubsetIndex { index: 0 })
        ));
        assert!(matches!(
            build_optimal_set(5, &[9]),
            Err(Error::SubsetIndexOutOfRange { index: 9, len: 4 })
        ));
        assert!(matches!(
            build_optimal_set(5, &[]),
            Err(Error::SubsetSizeMismatch {
                got: 0,
                expected: 1
            })
        ));
    }

    #[test]
    fn quantization_error_golden_values() {
        assert_eq!(quantization_error(1).unwrap(), ratio(1, 8));
        assert_eq!(quantization_error(2).unwrap(), ratio(1, 72));
        assert_eq!(quantization_error(3).unwrap(), ratio(5, 648));
        assert_eq!(quantization_error(4).unwrap(), ratio(1, 648));
        assert_eq!(quantization_error(5).unwrap(), ratio(7, 5832));
        assert_eq!(quantization_error(8).unwrap(), ratio(1, 5832));
    }

    #[test]
    fn set_distortion_matches_formula() {
        let l1 = build_level_set(1).unwrap();
        assert_eq!(set_distortion(&l1).unwrap(), ratio(1, 72));
        let l2 = build_level_set(2).unwrap();
        assert_eq!(set_distortion(&l2).unwrap(), ratio(1, 648));
        for subset in [[0usize], [1usize]] {
            let set = build_optimal_set(3, &subset).unwrap();
            assert_eq!(set_distortion(&set).unwrap(), ratio(5, 648));
        }
    }

    #[test]
    fn set_distortion_rejects_perturbed_labels() {
        let mut points = build_level_set(1).unwrap().points().to_vec();
        points[0] = LabeledPoint::with_position(PointKind::Cell, w(&[1]), ratio(1, 5));
        let set = QuantizerSet::from_points(points).unwrap();
        assert!(matches!(
            set_distortion(&set),
            Err(Error::InconsistentLabel { index: 0, .. })
        ));
        assert!(matches!(
            split_step(&set),
            Err(Error::InconsistentLabel { .. })
        ));
    }

    #[test]
    fn split_step_from_two_means() {
        let successors = split_candidates(&build_level_set(1).unwrap()).unwrap();
        assert_eq!(successors.len(), 2);
        assert_eq!(successors[0].split_point.label(), "Cell[1]");
        assert_eq!(
            positions_of(&successors[0].set),
            vec![ratio(1, 18), ratio(5, 18), ratio(5, 6)]
        );
        assert_eq!(successors[1].split_point.label(), "Tail[1]");
        assert_eq!(
            positions_of(&successors[1].set),
            vec![ratio(1, 6), ratio(13, 18), ratio(17, 18)]
        );
    }

    #[test]
    fn split_step_from_four_means() {
        let successors = split_step(&build_level_set(2).unwrap()).unwrap();
        assert_eq!(successors.len(), 4);
        for set in &successors {
            assert_eq!(set.len(), 5);
            assert_eq!(set_distortion(set).unwrap(), ratio(7, 5832));
        }
    }

    #[test]
    fn split_step_from_three_means_recovers_the_level_set() {
        let three = build_optimal_set(3, &[0]).unwrap();
        let successors = split_step(&three).unwrap();
        // The only maximizer is the surviving level-1 word via its tail point.
        assert_eq!(successors.len(), 1);
        assert_eq!(successors[0], build_level_set(2).unwrap());
        assert_eq!(set_distortion(&successors[0]).unwrap(), ratio(1, 648));
    }

    #[test]
    fn splitting_the_one_mean_gives_the_two_mean_set() {
        let successors = split_step(&optimal_one_mean()).unwrap();
        assert_eq!(successors.len(), 1);
        assert_eq!(successors[0], build_level_set(1).unwrap());
    }

    #[test]
    fn voronoi_boundary_examples() {
        let l1 = build_level_set(1).unwrap();
        assert_eq!(voronoi_boundaries(&l1), vec![ratio(1, 2)]);
        let l2 = build_level_set(2).unwrap();
        assert_eq!(
            voronoi_boundaries(&l2),
            vec![ratio(1, 6), ratio(1, 2), ratio(5, 6)]
        );
        let three = build_optimal_set(3, &[0]).unwrap();
        assert_eq!(
            voronoi_boundaries(&three),
            vec![ratio(1, 6), ratio(5, 9)]
        );
        assert!(voronoi_boundaries(&optimal_one_mean()).is_empty());
    }

    #[test]
    fn centroid_condition_examples() {
        assert!(centroid_condition_check(&build_level_set(1).unwrap()).unwrap());
        assert!(centroid_condition_check(&build_level_set(2).unwrap()).unwrap());
        assert!(centroid_condition_check(&optimal_one_mean()).unwrap());

        // Perturbing one point away from its centroid breaks the condition.
        let mut points = build_level_set(1).unwrap().points().to_vec();
        points[0] = LabeledPoint::with_position(PointKind::Cell, w(&[1]), ratio(1, 5));
        let perturbed = QuantizerSet::from_points(points).unwrap();
        assert!(!centroid_condition_check(&perturbed).unwrap());
    }

    #[test]
    fn points_sit_inside_their_pieces() {
        for level in 0..=6u32 {
            let set = build_level_set(level).unwrap();
            for point in set.points() {
                let piece = point.support().unwrap();
                assert!(
                    piece.contains_strictly(point.position()),
                    "{} at {} outside {piece}",
                    point.label(),
                    format_rational(point.position())
                );
            }
        }
    }

    #[test]
    fn duplicate_positions_are_rejected() {
        let p = LabeledPoint::cell(w(&[1]));
        assert!(matches!(
            QuantizerSet::from_points(vec![p.clone(), p]),
            Err(Error::DuplicatePosition { .. })
        ));
    }

    #[test]
    fn binomial_saturates_instead_of_overflowing() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(32, 16), 601_080_390);
        assert_eq!(binomial(300, 150), u128::MAX);
    }
}
