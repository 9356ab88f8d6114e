//! Finite words over the alphabet of positive integers.
//!
//! A word indexes a composition of similitudes: the letter `j` selects the
//! `j`-th map of the infinite system. Words carry two multiplicative
//! statistics, the probability weight `prob_weight` (product of `2^-letter`)
//! and the contraction ratio `contraction_ratio` (product of `3^-letter`),
//! both of which depend only on the letter sum. The empty word is a
//! first-class value with weight and ratio 1; operations that need to strip
//! the last letter reject it explicitly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{pow2_inv, pow3_inv, Rational};

/// A finite (possibly empty) sequence of positive integer letters.
///
/// The derived ordering is lexicographic with shorter prefixes first, which
/// is the canonical enumeration order used throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, rejecting zero letters.
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        if letters.iter().any(|&l| l == 0) {
            return Err(Error::ZeroLetter);
        }
        Ok(Word(letters))
    }

    /// Convenience constructor for literals; panics on a zero letter.
    pub fn from_letters(letters: &[u32]) -> Self {
        Word::new(letters.to_vec()).expect("letters must be positive")
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Sum of the letters; both weight and ratio are powers of it.
    pub fn letter_sum(&self) -> u64 {
        self.0.iter().map(|&l| u64::from(l)).sum()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Appends a single letter.
    pub fn child(&self, letter: u32) -> Result<Word> {
        if letter == 0 {
            return Err(Error::ZeroLetter);
        }
        let mut letters = self.0.clone();
        letters.push(letter);
        Ok(Word(letters))
    }

    /// The word with its last letter removed; empty input is rejected.
    pub fn drop_last(&self) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(self.0[..self.0.len() - 1].to_vec()))
    }

    /// The word with its first letter removed; empty input is rejected.
    pub fn drop_first(&self) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(self.0[1..].to_vec()))
    }

    /// The `j`-th representative of the tail family: the last letter is
    /// incremented by `j`.
    pub fn tail_representative(&self, j: u32) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        if j == 0 {
            return Err(Error::ZeroLetter);
        }
        let mut letters = self.0.clone();
        let last = letters.last_mut().unwrap();
        *last = last.checked_add(j).ok_or(Error::LetterOverflow)?;
        Ok(Word(letters))
    }
}

/// Probability weight of the cell indexed by `word`: the product of
/// `2^-letter` over its letters, i.e. exactly `2^-letter_sum`. The empty word
/// has weight 1.
pub fn prob_weight(word: &Word) -> Rational {
    pow2_inv(word.letter_sum())
}

/// Contraction ratio of the composed map: the product of `3^-letter`, i.e.
/// `3^-letter_sum`. The empty word has ratio 1.
pub fn contraction_ratio(word: &Word) -> Rational {
    pow3_inv(word.letter_sum())
}

/// Mass of the tail family of `word`: the total weight of the sibling cells
/// beyond its last letter, `sum_{j>=1} prob_weight(tail_representative(word, j))`.
/// The geometric sum collapses to `prob_weight(parent) * 2^-last`, which is
/// exactly `prob_weight(word)`.
pub fn tail_mass(word: &Word) -> Result<Rational> {
    let parent = word.drop_last()?;
    let last = u64::from(word.last().unwrap());
    Ok(prob_weight(&parent) * pow2_inv(last))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, letter) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{letter}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::ParseRational {
            input: s.to_string(),
        };
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|rest| rest.strip_suffix(']'))
            .ok_or_else(err)?;
        let body = body.trim();
        if body.is_empty() {
            return Ok(Word::empty());
        }
        let letters = body
            .split(',')
            .map(|part| part.trim().parse::<u32>().map_err(|_| err()))
            .collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_int, ratio};
    use proptest::prelude::*;

    fn w(letters: &[u32]) -> Word {
        Word::from_letters(letters)
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w(&[1, 2]).concat(&w(&[3])), w(&[1, 2, 3]));
        assert_eq!(Word::empty().concat(&w(&[5])), w(&[5]));
        assert_eq!(w(&[2]).concat(&w(&[1, 1])), w(&[2, 1, 1]));
    }

    #[test]
    fn drop_last_examples() {
        assert_eq!(w(&[1, 1]).drop_last().unwrap(), w(&[1]));
        assert_eq!(w(&[7]).drop_last().unwrap(), Word::empty());
        assert_eq!(w(&[2, 3, 1]).drop_last().unwrap(), w(&[2, 3]));
        assert_eq!(Word::empty().drop_last(), Err(Error::EmptyWord));
    }

    #[test]
    fn tail_representative_examples() {
        assert_eq!(w(&[1]).tail_representative(1).unwrap(), w(&[2]));
        assert_eq!(w(&[1, 1]).tail_representative(1).unwrap(), w(&[1, 2]));
        assert_eq!(w(&[2, 3]).tail_representative(4).unwrap(), w(&[2, 7]));
        assert_eq!(Word::empty().tail_representative(1), Err(Error::EmptyWord));
    }

    #[test]
    fn prob_weight_examples() {
        assert_eq!(prob_weight(&w(&[1, 1])), ratio(1, 4));
        assert_eq!(prob_weight(&Word::empty()), from_int(1));
        assert_eq!(prob_weight(&w(&[2, 3])), ratio(1, 32));
    }

    #[test]
    fn contraction_ratio_examples() {
        assert_eq!(contraction_ratio(&w(&[1])), ratio(1, 3));
        assert_eq!(contraction_ratio(&w(&[1, 2])), ratio(1, 27));
        assert_eq!(contraction_ratio(&Word::empty()), from_int(1));
    }

    #[test]
    fn tail_mass_examples() {
        assert_eq!(tail_mass(&w(&[1])).unwrap(), ratio(1, 2));
        assert_eq!(tail_mass(&w(&[1, 1])).unwrap(), ratio(1, 4));
        // Independent route: sum the geometric tail beyond letter 2 far enough
        // to telescope exactly.
        let direct = tail_mass(&w(&[2])).unwrap();
        let mut summed = Rational::from_integer(0.into());
        for j in 3..=40u64 {
            summed += pow2_inv(j);
        }
        summed += pow2_inv(40); // mass beyond letter 40
        assert_eq!(direct, summed);
        assert_eq!(direct, ratio(1, 4));
    }

    #[test]
    fn zero_letters_rejected() {
        assert_eq!(Word::new(vec![1, 0, 2]), Err(Error::ZeroLetter));
        assert_eq!(w(&[3]).child(0), Err(Error::ZeroLetter));
        assert_eq!(w(&[3]).tail_representative(0), Err(Error::ZeroLetter));
    }

    #[test]
    fn display_and_parse_round_trip() {
        for letters in [vec![], vec![1], vec![1, 2, 1], vec![10, 3]] {
            let word = Word::new(letters).unwrap();
            let text = word.to_string();
            assert_eq!(text.parse::<Word>().unwrap(), word);
        }
        assert_eq!(w(&[1, 2, 1]).to_string(), "[1,2,1]");
        assert_eq!(Word::empty().to_string(), "[]");
        assert!("[1,0]".parse::<Word>().is_err());
        assert!("1,2".parse::<Word>().is_err());
    }

    #[test]
    fn canonical_order_is_prefix_first() {
        let mut words = vec![w(&[2]), w(&[1, 1]), w(&[1]), Word::empty(), w(&[1, 2])];
        words.sort();
        assert_eq!(
            words,
            vec![Word::empty(), w(&[1]), w(&[1, 1]), w(&[1, 2]), w(&[2])]
        );
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        prop::collection::vec(1u32..=8, 0..=8).prop_map(|ls| Word::new(ls).unwrap())
    }

    proptest! {
        #[test]
        fn weight_and_ratio_are_multiplicative(a in word_strategy(), b in word_strategy()) {
            let joined = a.concat(&b);
            prop_assert_eq!(prob_weight(&joined), prob_weight(&a) * prob_weight(&b));
            prop_assert_eq!(contraction_ratio(&joined), contraction_ratio(&a) * contraction_ratio(&b));
        }

        #[test]
        fn tail_representative_scales_weight(a in word_strategy(), j in 1u32..=6) {
            prop_assume!(!a.is_empty());
            let rep = a.tail_representative(j).unwrap();
            prop_assert_eq!(prob_weight(&rep), prob_weight(&a) * pow2_inv(u64::from(j)));
            prop_assert_eq!(contraction_ratio(&rep), contraction_ratio(&a) * pow3_inv(u64::from(j)));
        }

        #[test]
        fn tail_mass_telescopes(a in word_strategy(), depth in 1u32..=6) {
            prop_assume!(!a.is_empty());
            let mut partial = Rational::from_integer(0.into());
            for j in 1..=depth {
                partial += prob_weight(&a.tail_representative(j).unwrap());
            }
            let deepest = a.tail_representative(depth).unwrap();
            partial += tail_mass(&deepest).unwrap();
            prop_assert_eq!(tail_mass(&a).unwrap(), partial);
        }

        #[test]
        fn equal_weight_implies_equal_ratio(a in word_strategy(), b in word_strategy()) {
            if prob_weight(&a) == prob_weight(&b) {
                prop_assert_eq!(contraction_ratio(&a), contraction_ratio(&b));
            }
        }
    }
}
