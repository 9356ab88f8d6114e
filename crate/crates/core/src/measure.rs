//! The self-similar measure: similitudes, cells, centroids, moments, and
//! closed-form distortion integrals, all in exact rational arithmetic.
//!
//! The measure splits the unit interval across infinitely many affine
//! contractions `S_j(x) = x/3^j + 1 - 1/3^(j-1)`, giving the cell of letter
//! `j` the mass `2^-j`. Everything downstream (centroids, distortion) reduces
//! to weights, ratios, and the first two moments, so every function here
//! returns an exact rational and no tolerance appears anywhere in this module.

use num::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{from_int, pow3_inv, ratio, Rational};
use crate::words::{contraction_ratio, prob_weight, tail_mass, Word};

/// Word budget for [`self_similar_integral_check`]: the truncated sum visits
/// `max_letter^k` words.
pub const INTEGRAL_WORD_BUDGET: u64 = 2_000_000;

/// A closed interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True iff `x` is in the open interior.
    pub fn contains_strictly(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/{}, {}/{}]", self.lo.numer(), self.lo.denom(), self.hi.numer(), self.hi.denom())
    }
}

/// Applies the `j`-th similitude `S_j(x) = x/3^j + 1 - 1/3^(j-1)`.
pub fn apply_similitude(j: u32, x: &Rational) -> Rational {
    assert!(j >= 1, "similitude index must be positive");
    let scale = pow3_inv(u64::from(j));
    let translate = from_int(1) - pow3_inv(u64::from(j) - 1);
    scale * x + translate
}

/// Applies the composition indexed by `word`, first letter outermost. The
/// empty word is the identity.
///
/// The composition is affine with ratio `3^-m` (`m` the letter sum), so the
/// translation is folded as an integer over the common denominator `3^m` and
/// only the final fraction is normalized.
pub fn apply_word_map(word: &Word, x: &Rational) -> Rational {
    use num::BigInt;
    // translation = y / p with p = 3^(letters folded so far); prepending
    // letter j maps y/p to (y + p (3^j - 3)) / (p 3^j).
    let mut y = BigInt::from(0u32);
    let mut p = BigInt::from(1u32);
    for &letter in word.letters().iter().rev() {
        let pow = BigInt::from(3u32).pow(letter);
        y += &p * (&pow - BigInt::from(3u32));
        p *= pow;
    }
    Rational::new(x.numer() + x.denom() * y, x.denom() * p)
}

/// The cell of `word`: the image of the unit interval under its map. Its
/// width is the contraction ratio.
pub fn cell_interval(word: &Word) -> Interval {
    Interval::new(
        apply_word_map(word, &from_int(0)),
        apply_word_map(word, &from_int(1)),
    )
}

/// Mean and variance of the measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moments {
    pub mean: Rational,
    pub variance: Rational,
}

impl Moments {
    pub fn second_raw_moment(&self) -> Rational {
        &self.mean * &self.mean + &self.variance
    }
}

/// Sum of the geometric series `sum_{j>=1} r^j = r / (1 - r)` for `|r| < 1`.
fn geometric_sum(r: &Rational) -> Rational {
    assert!(r.abs() < Rational::one());
    r / (Rational::one() - r)
}

/// Exact mean and variance, derived from the self-similarity fixed-point
/// equations rather than hardcoded.
///
/// Pushing the identity `E(f(X)) = sum_j 2^-j E(f(S_j(X)))` through `f(x)=x`
/// and `f(x)=x^2` leaves linear equations in the two moments whose
/// coefficients are geometric sums in 1/6, 1/18, and 1/2.
pub fn moments() -> Moments {
    let g6 = geometric_sum(&ratio(1, 6)); // sum 6^-j   = 1/5
    let g18 = geometric_sum(&ratio(1, 18)); // sum 18^-j = 1/17
    let g2 = geometric_sum(&ratio(1, 2)); // sum 2^-j   = 1

    // E = g6 E + (g2 - 3 g6)  since sum 2^-j (1 - 3^(1-j)) = g2 - 3 g6.
    let mean = (&g2 - from_int(3) * &g6) / (Rational::one() - &g6);

    // E2 = g18 E2 + 2E (g6 - 3 g18) + (g2 - 6 g6 + 9 g18).
    let linear = from_int(2) * &mean * (&g6 - from_int(3) * &g18);
    let constant = &g2 - from_int(6) * &g6 + from_int(9) * &g18;
    let second = (linear + constant) / (Rational::one() - &g18);

    let variance = &second - &mean * &mean;
    Moments { mean, variance }
}

fn variance() -> Rational {
    static VARIANCE: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
    VARIANCE.get_or_init(|| moments().variance).clone()
}

/// Conditional mean of the measure restricted to cells `k, k+1, ...`:
/// `1 - (1/2) 3^-(k-1)`.
pub fn tail_centroid_level(k: u32) -> Rational {
    assert!(k >= 1, "level must be positive");
    from_int(1) - ratio(1, 2) * pow3_inv(u64::from(k) - 1)
}

/// Centroid of the cell of `word`: the image of the mean, `S_word(1/2)`.
pub fn cell_centroid(word: &Word) -> Rational {
    apply_word_map(word, &ratio(1, 2))
}

/// Centroid of the tail family of `word`: the conditional mean of everything
/// under the parent beyond the last letter. Equals the centroid of the first
/// tail representative shifted right by that representative's ratio.
pub fn tail_centroid(word: &Word) -> Result<Rational> {
    let rep = word.tail_representative(1)?;
    Ok(cell_centroid(&rep) + contraction_ratio(&rep))
}

/// Exact distortion of the cell of `word` around an arbitrary point:
/// `p (s^2 V + (centroid - x0)^2)`.
pub fn cell_distortion(word: &Word, x0: &Rational) -> Rational {
    let p = prob_weight(word);
    let s = contraction_ratio(word);
    let offset = cell_centroid(word) - x0;
    p * (&s * &s * variance() + &offset * &offset)
}

/// Within-piece error of the cell of `word` around its own centroid,
/// `p s^2 V`. By the tail identity this is simultaneously the error of the
/// tail family around its centroid. Since `p = 2^-sum` and `s = 3^-sum`,
/// the product collapses to `18^-sum V`.
pub fn cell_error(word: &Word) -> Rational {
    crate::rational::pow18_inv(word.letter_sum()) * variance()
}

/// Exact distortion of the tail family of `word` around an arbitrary point:
/// the tail's own error plus the parallel-axis shift `(x0 - centroid)^2 mass`.
pub fn tail_distortion(word: &Word, x0: &Rational) -> Result<Rational> {
    let centroid = tail_centroid(word)?;
    let mass = tail_mass(word)?;
    let offset = x0 - centroid;
    Ok(cell_error(word) + &offset * &offset * mass)
}

/// Outcome of the truncated self-similarity identity check.
#[derive(Debug, Clone)]
pub struct IntegralCheck {
    /// The integral of the polynomial against the measure, from moments.
    pub lhs: Rational,
    /// The push-forward sum over all words of length `k` with letters up to
    /// `max_letter`.
    pub rhs_truncated: Rational,
    /// Rigorous bound on the omitted tail: omitted mass times the sup of the
    /// integrand on the unit interval.
    pub truncation_bound: Rational,
}

impl IntegralCheck {
    pub fn passes(&self) -> bool {
        (&self.lhs - &self.rhs_truncated).abs() <= self.truncation_bound
    }
}

/// Verifies the self-similarity identity
/// `integral f dP = sum_words p_w integral (f o S_w) dP`
/// for a polynomial `f` of degree at most 2, truncating the sum to letters
/// `1..=max_letter` and certifying the truncation exactly.
pub fn self_similar_integral_check(
    k: u32,
    max_letter: u32,
    poly_coeffs: &[Rational],
) -> Result<IntegralCheck> {
    if poly_coeffs.len() > 3 && poly_coeffs[3..].iter().any(|c| !c.is_zero()) {
        return Err(Error::DegreeTooHigh {
            degree: poly_coeffs.len() - 1,
        });
    }
    assert!(k >= 1 && max_letter >= 1);
    let budget = (u64::from(max_letter) as u128).pow(k);
    if budget > u128::from(INTEGRAL_WORD_BUDGET) {
        return Err(Error::WordBudgetExceeded {
            count: budget,
            cap: INTEGRAL_WORD_BUDGET,
        });
    }

    let coeff = |i: usize| poly_coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
    let (c0, c1, c2) = (coeff(0), coeff(1), coeff(2));
    let m = moments();
    let (e1, e2) = (m.mean.clone(), m.second_raw_moment());

    // integral f dP straight from the moments.
    let lhs = &c0 + &c1 * &e1 + &c2 * &e2;

    // integral (f o S)(x) dP for an affine S(x) = s x + t expands to a
    // quadratic in x; integrate term by term.
    let integral_after = |s: &Rational, t: &Rational| -> Rational {
        let const_term = &c0 + &c1 * t + &c2 * t * t;
        let linear_term = (&c1 + from_int(2) * &c2 * t) * s;
        let quad_term = &c2 * s * s;
        const_term + linear_term * &e1 + quad_term * &e2
    };

    // Walk all words in {1..max_letter}^k, carrying (weight, scale, offset)
    // of the partial composition.
    let mut rhs = Rational::zero();
    let mut stack = vec![(0u32, Rational::one(), Rational::one(), Rational::zero())];
    while let Some((depth, weight, scale, offset)) = stack.pop() {
        if depth == k {
            rhs += weight * integral_after(&scale, &offset);
            continue;
        }
        for letter in (1..=max_letter).rev() {
            let p = crate::rational::pow2_inv(u64::from(letter));
            let s = pow3_inv(u64::from(letter));
            let t = from_int(1) - pow3_inv(u64::from(letter) - 1);
            // Composing previous map A(x) = scale x + offset with S gives
            // A(S(x)) = scale*s x + scale*t + offset.
            stack.push((
                depth + 1,
                &weight * p,
                &scale * &s,
                &scale * &t + &offset,
            ));
        }
    }

    // Omitted words have total mass 1 - (1 - 2^-max_letter)^k; each omitted
    // integral is bounded by sup |f| on [0, 1].
    let kept = Rational::one() - crate::rational::pow2_inv(u64::from(max_letter));
    let mut kept_pow = Rational::one();
    for _ in 0..k {
        kept_pow *= &kept;
    }
    let omitted_mass = Rational::one() - kept_pow;
    let truncation_bound = omitted_mass * poly_sup_abs(&c0, &c1, &c2);

    Ok(IntegralCheck {
        lhs,
        rhs_truncated: rhs,
        truncation_bound,
    })
}

/// Exact sup of `|c0 + c1 x + c2 x^2|` over the unit interval: the max of the
/// endpoint values and, when the vertex falls inside, the vertex value.
fn poly_sup_abs(c0: &Rational, c1: &Rational, c2: &Rational) -> Rational {
    let eval = |x: &Rational| (c0 + c1 * x + c2 * x * x).abs();
    let mut sup = eval(&from_int(0)).max(eval(&from_int(1)));
    if !c2.is_zero() {
        let vertex = -c1 / (from_int(2) * c2);
        if Rational::zero() < vertex && vertex < Rational::one() {
            sup = sup.max(eval(&vertex));
        }
    }
    sup
}
