//! Independent optimality verification.
//!
//! The quantizer module computes exact errors from closed forms. This module
//! checks them without trusting any of that algebra: it collapses the measure
//! to finitely many weighted atoms (tracking exactly how much distortion the
//! collapsing can move), then solves the one-dimensional weighted k-means
//! problem on the atoms to global optimality by dynamic programming. The two
//! routes must land within the certified bound of each other.
//!
//! Atom positions and weights stay exact rationals; only the DP and Lloyd
//! accumulations run in floating point, with compensated summation.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::io;

use crate::error::{Error, Result};
use crate::measure::{cell_centroid, cell_error, tail_centroid};
use crate::quantizer::{
    centroid_condition_check, enumerate_optimal_sets_with_caps, optimal_one_mean,
    optimal_set_count, quantization_error, set_distortion, Caps,
};
use crate::rational::{decimal_approx, format_rational, from_int, to_f64, Rational};
use crate::words::{prob_weight, tail_mass, Word};

/// Default limit on the number of atoms a discretization may produce.
pub const DEFAULT_ATOM_CAP: usize = 1_000_000;

/// Per-coordinate tolerance when matching oracle centroids against an
/// enumerated optimal set.
pub const MATCH_TOLERANCE: f64 = 1e-3;

/// Relative slack allowed on top of the collapse bound for floating-point
/// summation in the DP.
pub const SUMMATION_SLACK: f64 = 1e-12;

/// A weighted point mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub position: Rational,
    pub weight: Rational,
}

/// A finite atomic stand-in for the measure, with a certified bound on how
/// far collapsing the removed detail can shift any distortion value.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
    collapse_bound: Rational,
}

impl DiscreteMeasure {
    /// Wraps explicit atoms (sorted, positive weights, total weight one).
    /// The collapse bound of an as-given measure is zero.
    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms, Rational::from_integer(0.into()))
    }

    fn new(atoms: Vec<Atom>, collapse_bound: Rational) -> Result<Self> {
        let zero = Rational::from_integer(0.into());
        let mut total = zero.clone();
        for pair in atoms.windows(2) {
            if pair[0].position >= pair[1].position {
                return Err(Error::DuplicatePosition {
                    position: format_rational(&pair[1].position),
                });
            }
        }
        for atom in &atoms {
            if atom.weight <= zero {
                return Err(Error::PositionOutOfRange {
                    position: format_rational(&atom.position),
                });
            }
            total += &atom.weight;
        }
        if total != from_int(1) {
            return Err(Error::ParseRational {
                input: format!("atom weights sum to {}", format_rational(&total)),
            });
        }
        Ok(DiscreteMeasure {
            atoms,
            collapse_bound,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn collapse_bound(&self) -> &Rational {
        &self.collapse_bound
    }

    /// Exact weighted mean of the atoms.
    pub fn mean(&self) -> Rational {
        let mut sum = Rational::from_integer(0.into());
        for atom in &self.atoms {
            sum += &atom.position * &atom.weight;
        }
        sum
    }

    /// Plot-ready CSV: one atom per row.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "position_decimal,position_rational,weight_rational")?;
        for atom in &self.atoms {
            writeln!(
                out,
                "{},{},{}",
                decimal_approx(&atom.position),
                format_rational(&atom.position),
                format_rational(&atom.weight)
            )?;
        }
        Ok(())
    }
}

/// Collapses the measure to atoms of weight roughly `epsilon`.
///
/// A word whose cell still carries more than `epsilon` of mass is expanded
/// into explicit children while the children stay above `epsilon`; the
/// infinite rest of its children is lumped into a single atom at the tail
/// centroid of the last explicit child, which preserves the mean exactly.
/// Cells that fall to `epsilon` or below become single atoms at their
/// centroids. Every collapsed piece adds its own within-piece error
/// (`p s^2 V`) to the certified bound.
pub fn discretize(epsilon: &Rational) -> Result<DiscreteMeasure> {
    discretize_with_cap(epsilon, DEFAULT_ATOM_CAP)
}

pub fn discretize_with_cap(epsilon: &Rational, atom_cap: usize) -> Result<DiscreteMeasure> {
    let zero = Rational::from_integer(0.into());
    if epsilon <= &zero || epsilon > &from_int(1) {
        return Err(Error::InvalidEpsilon {
            epsilon: format_rational(epsilon),
        });
    }

    struct Builder<'a> {
        epsilon: &'a Rational,
        atom_cap: usize,
        atoms: Vec<Atom>,
        bound: Rational,
    }

    impl Builder<'_> {
        fn push(&mut self, position: Rational, weight: Rational) -> Result<()> {
            if self.atoms.len() >= self.atom_cap {
                return Err(Error::AtomCapExceeded { cap: self.atom_cap });
            }
            self.atoms.push(Atom { position, weight });
            Ok(())
        }

        /// Expands `word`, which carries more mass than epsilon. Emits atoms
        /// in increasing position order.
        fn expand(&mut self, word: &Word) -> Result<()> {
            let weight = prob_weight(word);
            let heavy = |j: u32| &weight * crate::rational::pow2_inv(u64::from(j)) > *self.epsilon;
            let mut last = 1u32;
            while heavy(last + 1) {
                last += 1;
            }
            for j in 1..=last {
                let child = word.child(j)?;
                if heavy(j) {
                    self.expand(&child)?;
                } else {
                    self.bound += cell_error(&child);
                    self.push(cell_centroid(&child), prob_weight(&child))?;
                }
            }
            let anchor = word.child(last)?;
            self.bound += cell_error(&anchor);
            self.push(tail_centroid(&anchor)?, tail_mass(&anchor)?)?;
            Ok(())
        }
    }

    let mut builder = Builder {
        epsilon,
        atom_cap,
        atoms: Vec::new(),
        bound: zero,
    };
    let root = Word::empty();
    if &prob_weight(&root) > epsilon {
        builder.expand(&root)?;
    } else {
        builder.bound += cell_error(&root);
        builder.push(cell_centroid(&root), prob_weight(&root))?;
    }
    DiscreteMeasure::new(builder.atoms, builder.bound)
}

/// How an oracle result was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ExactDp,
    Lloyd,
}

/// Quantizer found by the oracle on a discrete measure.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub n: usize,
    pub points: Vec<f64>,
    pub distortion: f64,
    pub method: OracleMethod,
    /// Lloyd only: iterations executed.
    pub iterations: Option<usize>,
    /// Lloyd only: empty clusters reseeded along the way.
    pub reseed_events: usize,
    /// Lloyd only: objective after each iteration, for monotonicity checks.
    pub distortion_trace: Vec<f64>,
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Globally optimal 1-D weighted k-means on the atoms, solved by the
/// interval-cost dynamic program over prefix sums. Rows are computed for
/// every cluster count up to `n_max`, so one solver answers all smaller `n`.
pub struct DpSolver {
    atom_count: usize,
    prefix_w: Vec<f64>,
    prefix_wx: Vec<f64>,
    /// `cost[i][j]`: optimal cost of covering atoms `0..=j` with `i+1`
    /// clusters.
    cost: Vec<Vec<f64>>,
    /// `parent[i][j]`: first atom of the last cluster in that optimum.
    parent: Vec<Vec<u32>>,
}

impl DpSolver {
    pub fn new(measure: &DiscreteMeasure, n_max: usize) -> Result<Self> {
        let m = measure.len();
        if n_max == 0 {
            return Err(Error::NTooSmall { n: 0, min: 1 });
        }
        if n_max > m {
            return Err(Error::NExceedsAtoms {
                n: n_max,
                atoms: m,
            });
        }
        let positions: Vec<f64> = measure.atoms().iter().map(|a| to_f64(&a.position)).collect();
        let weights: Vec<f64> = measure.atoms().iter().map(|a| to_f64(&a.weight)).collect();

        let mut prefix_w = Vec::with_capacity(m + 1);
        let mut prefix_wx = Vec::with_capacity(m + 1);
        let mut prefix_wx2 = Vec::with_capacity(m + 1);
        let (mut sw, mut swx, mut swx2) = (
            Compensated::default(),
            Compensated::default(),
            Compensated::default(),
        );
        prefix_w.push(0.0);
        prefix_wx.push(0.0);
        prefix_wx2.push(0.0);
        for i in 0..m {
            sw.add(weights[i]);
            swx.add(weights[i] * positions[i]);
            swx2.add(weights[i] * positions[i] * positions[i]);
            prefix_w.push(sw.value());
            prefix_wx.push(swx.value());
            prefix_wx2.push(swx2.value());
        }

        let interval_cost = |i: usize, j: usize| -> f64 {
            let w = prefix_w[j + 1] - prefix_w[i];
            if w <= 0.0 {
                return 0.0;
            }
            let wx = prefix_wx[j + 1] - prefix_wx[i];
            let wx2 = prefix_wx2[j + 1] - prefix_wx2[i];
            (wx2 - wx * wx / w).max(0.0)
        };

        let mut cost = vec![vec![f64::INFINITY; m]; n_max];
        let mut parent = vec![vec![u32::MAX; m]; n_max];
        for j in 0..m {
            cost[0][j] = interval_cost(0, j);
            parent[0][j] = 0;
        }
        for i in 1..n_max {
            let (done, rest) = cost.split_at_mut(i);
            let prev = done[i - 1].as_slice();
            let row = rest[0].as_mut_slice();
            let parent_row = parent[i].as_mut_slice();
            for j in i..m {
                let pw_end = prefix_w[j + 1];
                let pwx_end = prefix_wx[j + 1];
                let pwx2_end = prefix_wx2[j + 1];
                let mut best = f64::INFINITY;
                let mut best_k = i;
                for k in i..=j {
                    let w = pw_end - prefix_w[k];
                    let wx = pwx_end - prefix_wx[k];
                    let wx2 = pwx2_end - prefix_wx2[k];
                    let tail_cost = (wx2 - wx * wx / w).max(0.0);
                    let candidate = prev[k - 1] + tail_cost;
                    if candidate < best {
                        best = candidate;
                        best_k = k;
                    }
                }
                row[j] = best;
                parent_row[j] = best_k as u32;
            }
        }

        Ok(DpSolver {
            atom_count: m,
            prefix_w,
            prefix_wx,
            cost,
            parent,
        })
    }

    fn cluster_mean(&self, i: usize, j: usize) -> f64 {
        let w = self.prefix_w[j + 1] - self.prefix_w[i];
        let wx = self.prefix_wx[j + 1] - self.prefix_wx[i];
        wx / w
    }

    pub fn max_clusters(&self) -> usize {
        self.cost.len()
    }

    pub fn result(&self, n: usize) -> Result<OracleResult> {
        let m = self.atom_count;
        if n == 0 {
            return Err(Error::NTooSmall { n: 0, min: 1 });
        }
        if n > self.max_clusters() {
            return Err(Error::NExceedsAtoms {
                n,
                atoms: self.max_clusters(),
            });
        }
        let distortion = self.cost[n - 1][m - 1].max(0.0);
        let mut points = vec![0.0; n];
        let mut j = m - 1;
        for i in (0..n).rev() {
            let k = self.parent[i][j] as usize;
            points[i] = self.cluster_mean(k, j);
            if i > 0 {
                j = k - 1;
            }
        }
        Ok(OracleResult {
            n,
            points,
            distortion,
            method: OracleMethod::ExactDp,
            iterations: None,
            reseed_events: 0,
            distortion_trace: Vec::new(),
        })
    }
}

/// One-shot exact DP for a single cluster count.
pub fn kmeans_exact_dp(measure: &DiscreteMeasure, n: usize) -> Result<OracleResult> {
    DpSolver::new(measure, n)?.result(n)
}

/// Seeded Lloyd iteration on the atoms.
///
/// Initial centroids are `n` distinct atoms chosen by a partial Fisher-Yates
/// shuffle driven by ChaCha8 on `seed`. Each iteration assigns atoms to the
/// nearest centroid (ties to the lower index), recenters every cluster at its
/// weighted mean, and reseeds any emptied cluster at the atom currently
/// contributing the largest distortion. Stops when no centroid moves more
/// than `tol` or after `max_iter` iterations.
pub fn lloyd(
    measure: &DiscreteMeasure,
    n: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<OracleResult> {
    let m = measure.len();
    if n == 0 {
        return Err(Error::NTooSmall { n: 0, min: 1 });
    }
    if n > m {
        return Err(Error::NExceedsAtoms { n, atoms: m });
    }
    if max_iter == 0 {
        return Err(Error::ZeroIterations);
    }
    let positions: Vec<f64> = measure.atoms().iter().map(|a| to_f64(&a.position)).collect();
    let weights: Vec<f64> = measure.atoms().iter().map(|a| to_f64(&a.weight)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..m).collect();
    for t in 0..n {
        let r = t + (rng.next_u64() as usize) % (m - t);
        indices.swap(t, r);
    }
    let mut centroids: Vec<f64> = indices[..n].iter().map(|&i| positions[i]).collect();
    centroids.sort_by(f64::total_cmp);

    let assign = |centroids: &[f64], assignment: &mut Vec<usize>| {
        assignment.clear();
        let mut cluster = 0usize;
        for &x in &positions {
            // Advance while the next centroid is strictly closer; an exact
            // midpoint keeps the lower index.
            while cluster + 1 < centroids.len()
                && x - centroids[cluster] > centroids[cluster + 1] - x
            {
                cluster += 1;
            }
            assignment.push(cluster);
        }
    };

    let objective = |centroids: &[f64], assignment: &[usize]| -> f64 {
        let mut total = Compensated::default();
        for i in 0..m {
            let d = positions[i] - centroids[assignment[i]];
            total.add(weights[i] * d * d);
        }
        total.value().max(0.0)
    };

    let mut assignment = Vec::with_capacity(m);
    let mut trace = Vec::new();
    let mut reseed_events = 0usize;
    let mut iterations = 0usize;

    for _ in 0..max_iter {
        iterations += 1;
        assign(&centroids, &mut assignment);

        let mut cluster_w = vec![0.0f64; n];
        let mut cluster_wx = vec![0.0f64; n];
        for i in 0..m {
            cluster_w[assignment[i]] += weights[i];
            cluster_wx[assignment[i]] += weights[i] * positions[i];
        }

        let mut next: Vec<f64> = (0..n)
            .map(|c| {
                if cluster_w[c] > 0.0 {
                    cluster_wx[c] / cluster_w[c]
                } else {
                    f64::NAN
                }
            })
            .collect();

        if next.iter().any(|c| c.is_nan()) {
            // Reseed each empty cluster at the atom with the largest current
            // contribution, skipping atoms already claimed this round.
            let mut claimed = vec![false; m];
            for c in 0..n {
                if !next[c].is_nan() {
                    continue;
                }
                let mut best = None;
                let mut best_contribution = -1.0;
                for i in 0..m {
                    if claimed[i] {
                        continue;
                    }
                    let d = positions[i] - centroids[assignment[i]];
                    let contribution = weights[i] * d * d;
                    if contribution > best_contribution {
                        best_contribution = contribution;
                        best = Some(i);
                    }
                }
                let pick = best.expect("measure has at least n atoms");
                claimed[pick] = true;
                next[c] = positions[pick];
                reseed_events += 1;
            }
            next.sort_by(f64::total_cmp);
            assign(&next, &mut assignment);
        }

        let moved = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        centroids = next;
        assign(&centroids, &mut assignment);
        trace.push(objective(&centroids, &assignment));
        if moved < tol {
            break;
        }
    }

    assign(&centroids, &mut assignment);
    let distortion = objective(&centroids, &assignment);
    Ok(OracleResult {
        n,
        points: centroids,
        distortion,
        method: OracleMethod::Lloyd,
        iterations: Some(iterations),
        reseed_events,
        distortion_trace: trace,
    })
}

/// Side-by-side verdict of the exact construction and the oracle.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub n: u64,
    /// Closed-form quantization error.
    pub exact_error: Rational,
    /// Summed piece errors of the first constructed optimal set.
    pub construction_error: Rational,
    pub centroid_condition_ok: bool,
    /// Number of distinct optimal sets.
    pub set_count: u128,
    /// Distortion of the DP optimum on the discretized measure.
    pub dp_distortion: f64,
    pub collapse_bound: Rational,
    pub atom_count: usize,
    /// Whether the DP distortion lies within collapse bound (plus summation
    /// slack) of the exact error.
    pub bound_satisfied: bool,
    /// Index of the enumerated optimal set the DP centroids match, if any.
    pub matched_set: Option<usize>,
}

impl VerificationReport {
    /// Overall verdict: the construction agrees with the formula, the DP
    /// lands within the certified bound, and its centroids match one of the
    /// enumerated sets.
    pub fn passed(&self) -> bool {
        self.exact_error == self.construction_error
            && self.centroid_condition_ok
            && self.bound_satisfied
            && self.matched_set.is_some()
    }
}

/// Runs the full comparison for one `n`: exact error, constructed set,
/// discretization, exact DP, bound check, and centroid matching.
pub fn compare(n: u64, epsilon: &Rational) -> Result<VerificationReport> {
    compare_with(n, epsilon, &Caps::default(), DEFAULT_ATOM_CAP)
}

pub fn compare_with(
    n: u64,
    epsilon: &Rational,
    caps: &Caps,
    atom_cap: usize,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::NTooSmall { n, min: 1 });
    }
    let exact_error = quantization_error(n)?;
    let (sets, set_count) = if n == 1 {
        (vec![optimal_one_mean()], 1u128)
    } else {
        (
            enumerate_optimal_sets_with_caps(n, caps)?,
            optimal_set_count(n)?,
        )
    };
    let first = &sets[0];
    let construction_error = set_distortion(first)?;
    let centroid_condition_ok = centroid_condition_check(first)?;

    let measure = discretize_with_cap(epsilon, atom_cap)?;
    let dp = kmeans_exact_dp(&measure, n as usize)?;

    let exact_f = to_f64(&exact_error);
    let bound_f = to_f64(measure.collapse_bound());
    let bound_satisfied = (dp.distortion - exact_f).abs() <= bound_f + SUMMATION_SLACK * exact_f;

    let matched_set = sets.iter().position(|set| {
        set.points()
            .iter()
            .zip(&dp.points)
            .all(|(point, &found)| (to_f64(point.position()) - found).abs() <= MATCH_TOLERANCE)
    });

    Ok(VerificationReport {
        n,
        exact_error,
        construction_error,
        centroid_condition_ok,
        set_count,
        dp_distortion: dp.distortion,
        collapse_bound: measure.collapse_bound().clone(),
        atom_count: measure.len(),
        bound_satisfied,
        matched_set,
    })
}
