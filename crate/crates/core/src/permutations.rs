//! Finite-support permutations, Lehmer codes, code scaling and statistics.
//!
//! Permutations of the positive integers with finitely many non-fixed points,
//! stored in one-line notation with the tail of fixed points stripped, so that
//! `S_n` embeds in `S_infinity` and equality is equality of canonical forms.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermutationError {
    /// One-line entries are not a permutation of `1..=k`.
    #[error("one-line notation is not a permutation of 1..=k: {0:?}")]
    InvalidOneline(Vec<usize>),
    /// A code entry exceeds the positions remaining at its step.
    #[error("invalid Lehmer code: entry c_{index} = {value} exceeds the {remaining} remaining positions")]
    InvalidCode {
        index: usize,
        value: usize,
        remaining: usize,
    },
    /// String form could not be parsed.
    #[error("cannot parse permutation from {0:?}")]
    Unparseable(String),
}

/// A permutation of the positive integers with finite support.
///
/// One-line notation, canonical form: the last stored entry is not a fixed
/// point unless the permutation is the identity (stored empty).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    oneline: Vec<usize>,
}

impl Permutation {
    /// The identity permutation.
    pub fn identity() -> Self {
        Permutation {
            oneline: Vec::new(),
        }
    }

    /// Builds a permutation from one-line notation, canonicalizing the tail.
    pub fn from_oneline(word: Vec<usize>) -> Result<Self, PermutationError> {
        let k = word.len();
        let mut seen = vec![false; k];
        for &v in &word {
            if v == 0 || v > k || seen[v - 1] {
                return Err(PermutationError::InvalidOneline(word));
            }
            seen[v - 1] = true;
        }
        let mut oneline = word;
        while let Some(&last) = oneline.last() {
            if last == oneline.len() {
                oneline.pop();
            } else {
                break;
            }
        }
        Ok(Permutation { oneline })
    }

    /// `w(i)`, with the implicit fixed points beyond the stored length.
    pub fn apply(&self, i: usize) -> usize {
        debug_assert!(i >= 1);
        if i <= self.oneline.len() {
            self.oneline[i - 1]
        } else {
            i
        }
    }

    /// Canonical length: the number of stored one-line entries.
    pub fn len(&self) -> usize {
        self.oneline.len()
    }

    /// True for the identity (empty canonical form).
    pub fn is_empty(&self) -> bool {
        self.oneline.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.oneline.is_empty()
    }

    /// One-line entries up to length `n` (padded with fixed points).
    pub fn oneline(&self, n: usize) -> Vec<usize> {
        (1..=n.max(self.len())).map(|i| self.apply(i)).collect()
    }

    /// The longest element `w_0 = (n, n-1, ..., 1)` of `S_n`.
    pub fn longest_element(n: usize) -> Self {
        Permutation::from_oneline((1..=n).rev().collect())
            .expect("decreasing word is a permutation")
    }

    /// Composition `(p . q)(i) = p(q(i))`.
    pub fn compose(&self, q: &Permutation) -> Permutation {
        let n = self.len().max(q.len());
        let word = (1..=n).map(|i| self.apply(q.apply(i))).collect();
        Permutation::from_oneline(word).expect("composition of permutations is a permutation")
    }

    pub fn inverse(&self) -> Permutation {
        let n = self.len();
        let mut word = vec![0; n];
        for i in 1..=n {
            word[self.apply(i) - 1] = i;
        }
        Permutation::from_oneline(word).expect("inverse of a permutation is a permutation")
    }

    /// Lehmer code: entry `i` counts the `j > i` with `w(j) < w(i)`.
    ///
    /// ```
    /// # use schubkit::permutations::Permutation;
    /// let u: Permutation = "14862357".parse().unwrap();
    /// assert_eq!(u.lehmer_code().entries(), &[0, 2, 5, 3]);
    /// ```
    pub fn lehmer_code(&self) -> LehmerCode {
        let w = &self.oneline;
        let entries = (0..w.len())
            .map(|i| (i + 1..w.len()).filter(|&j| w[j] < w[i]).count())
            .collect();
        LehmerCode::new(entries)
    }

    /// Number of inversions `l(w)`.
    pub fn inversions(&self) -> usize {
        self.lehmer_code().entries().iter().sum()
    }

    /// Descent set `{i : w(i) > w(i+1)}`.
    pub fn descents(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&i| self.apply(i) > self.apply(i + 1))
            .collect()
    }

    /// Exceedance set `{i : w(i) > i}`.
    pub fn exceedances(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.apply(i) > i).collect()
    }

    /// Inversions, descents, exceedances and the exceedance range.
    pub fn statistics(&self) -> Statistics {
        let exceedances = self.exceedances();
        let range = match (exceedances.first(), exceedances.last()) {
            (Some(&lo), Some(&hi)) => Some((lo, hi)),
            _ => None,
        };
        Statistics {
            inversions: self.inversions(),
            descents: self.descents(),
            exceedances,
            range,
        }
    }

    /// Code scaling `N * w`: the permutation whose code is `N` times `code(w)`.
    ///
    /// ```
    /// # use schubkit::permutations::Permutation;
    /// let w: Permutation = "2143".parse().unwrap();
    /// assert_eq!(w.stretch(2).lehmer_code().entries(), &[2, 0, 2]);
    /// assert_eq!(w.stretch(3).inversions(), 3 * w.inversions());
    /// ```
    pub fn stretch(&self, n: u64) -> Permutation {
        assert!(n >= 1, "stretch factor must be positive");
        let scaled: Vec<usize> = self
            .lehmer_code()
            .entries()
            .iter()
            .map(|&c| c.checked_mul(n as usize).expect("code entry overflow"))
            .collect();
        LehmerCode::new(scaled).decode()
    }

    /// Sign `(-1)^{l(w)}`: `1` or `-1`.
    pub fn sign(&self) -> i64 {
        if self.inversions().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All elements of `S_n`, in lexicographic order of their length-`n` words.
    pub fn symmetric_group(n: usize) -> Vec<Permutation> {
        if n == 0 {
            return vec![Permutation::identity()];
        }
        (1..=n)
            .permutations(n)
            .map(|word| Permutation::from_oneline(word).expect("valid word"))
            .collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "id");
        }
        if self.oneline.iter().all(|&v| v <= 9) {
            for v in &self.oneline {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.oneline.iter().format(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = PermutationError;

    /// Accepts `"3142"` (single digits) or `"3,1,4,2"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "id" {
            return Ok(Permutation::identity());
        }
        let word: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| PermutationError::Unparseable(s.to_string()))?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| PermutationError::Unparseable(s.to_string()))?
        };
        Permutation::from_oneline(word)
    }
}

/// Inversion table of a permutation: finitely supported naturals, trailing
/// zeros stripped.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LehmerCode {
    entries: Vec<usize>,
}

impl LehmerCode {
    /// Builds a code, stripping trailing zeros.
    pub fn new(mut entries: Vec<usize>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        LehmerCode { entries }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// `c_i`, with trailing zeros implied (1-based `i`).
    pub fn entry(&self, i: usize) -> usize {
        debug_assert!(i >= 1);
        self.entries.get(i - 1).copied().unwrap_or(0)
    }

    /// Sum of the entries; equals `l(w)` of the decoded permutation.
    pub fn weight(&self) -> usize {
        self.entries.iter().sum()
    }

    /// Index of the last nonzero entry, or 0 for the empty code.
    pub fn support_max(&self) -> usize {
        self.entries.len()
    }

    /// Inverse of `lehmer_code`, in the minimal ambient `S_k`.
    ///
    /// The ambient length is the support length plus whatever headroom the
    /// entries demand, so decoding never fails; see [`Permutation::from_code_bounded`]
    /// for reconstruction inside a fixed `S_n`.
    pub fn decode(&self) -> Permutation {
        let k = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, &c)| i + 1 + c)
            .max()
            .unwrap_or(0)
            .max(self.entries.len());
        Permutation::from_code_bounded(&self.entries, k).expect("headroom makes the code valid")
    }
}

impl Permutation {
    /// Greedy reconstruction of the permutation in `S_n` with the given code.
    ///
    /// Fails with `InvalidCode` when some `c_i` exceeds the positions
    /// remaining at step `i`.
    pub fn from_code_bounded(entries: &[usize], n: usize) -> Result<Permutation, PermutationError> {
        let k = n.max(entries.len());
        let mut pool: Vec<usize> = (1..=k).collect();
        let mut word = Vec::with_capacity(k);
        for i in 1..=k {
            let c = entries.get(i - 1).copied().unwrap_or(0);
            if c >= pool.len() {
                return Err(PermutationError::InvalidCode {
                    index: i,
                    value: c,
                    remaining: pool.len(),
                });
            }
            word.push(pool.remove(c));
        }
        Permutation::from_oneline(word)
    }
}

impl fmt::Debug for LehmerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LehmerCode({self})")
    }
}

impl fmt::Display for LehmerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.entries.iter().format(","))
    }
}

impl FromStr for LehmerCode {
    type Err = PermutationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(LehmerCode::new(Vec::new()));
        }
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| PermutationError::Unparseable(s.to_string()))?;
        Ok(LehmerCode::new(entries))
    }
}

/// Basic statistics of a permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statistics {
    pub inversions: usize,
    pub descents: Vec<usize>,
    pub exceedances: Vec<usize>,
    /// `[min Exc(w), max Exc(w)]`, or `None` for the identity.
    pub range: Option<(usize, usize)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn lehmer_code_examples() {
        assert_eq!(
            p("14862357").lehmer_code(),
            LehmerCode::new(vec![0, 2, 5, 3])
        );
        assert_eq!(
            Permutation::identity().lehmer_code(),
            LehmerCode::new(vec![])
        );
        assert_eq!(p("4321").lehmer_code(), LehmerCode::new(vec![3, 2, 1]));
    }

    #[test]
    fn from_code_examples() {
        assert_eq!(LehmerCode::new(vec![0, 2, 5, 3]).decode(), p("14862357"));
        assert_eq!(LehmerCode::new(vec![]).decode(), Permutation::identity());
        // direct greedy reconstruction, checked by the roundtrip below
        let q = LehmerCode::new(vec![3, 0, 1, 0]).decode();
        assert_eq!(q, p("4132"));
        assert_eq!(q.lehmer_code(), LehmerCode::new(vec![3, 0, 1]));
    }

    #[test]
    fn from_code_bounded_rejects_overflow() {
        let err = Permutation::from_code_bounded(&[3, 0, 1], 3).unwrap_err();
        assert!(matches!(
            err,
            PermutationError::InvalidCode {
                index: 1,
                value: 3,
                ..
            }
        ));
        assert_eq!(
            Permutation::from_code_bounded(&[2, 1], 3).unwrap(),
            p("321")
        );
    }

    #[test]
    fn stretch_examples() {
        let w = p("3142");
        assert_eq!(w.stretch(1), w);
        assert_eq!(
            p("2143").stretch(2).lehmer_code(),
            LehmerCode::new(vec![2, 0, 2, 0])
        );
        assert_eq!(
            p("3142").stretch(3).inversions(),
            3 * p("3142").inversions()
        );
    }

    #[test]
    fn stretch_preserves_descents() {
        for w in Permutation::symmetric_group(4) {
            for n in 1..=3 {
                assert_eq!(w.stretch(n).descents(), w.descents(), "w={w} N={n}");
            }
        }
    }

    #[test]
    fn stretch_composes_multiplicatively() {
        for w in Permutation::symmetric_group(4) {
            assert_eq!(w.stretch(2).stretch(3), w.stretch(6));
        }
    }

    #[test]
    fn compose_examples() {
        let q = p("2413");
        assert_eq!(Permutation::identity().compose(&q), q);
        assert_eq!(p("4321").compose(&p("4321")), Permutation::identity());
        assert_eq!(
            Permutation::longest_element(4).compose(&p("2143")),
            p("3412")
        );
    }

    #[test]
    fn longest_element_examples() {
        assert_eq!(Permutation::longest_element(1), Permutation::identity());
        assert_eq!(Permutation::longest_element(4), p("4321"));
        assert_eq!(
            Permutation::longest_element(5).lehmer_code(),
            LehmerCode::new(vec![4, 3, 2, 1])
        );
    }

    #[test]
    fn statistics_examples() {
        let s = p("3142").statistics();
        assert_eq!(s.inversions, 3);
        assert_eq!(s.descents, vec![1, 3]);

        let id = Permutation::identity().statistics();
        assert_eq!(id.inversions, 0);
        assert!(id.descents.is_empty());
        assert!(id.exceedances.is_empty());
        assert_eq!(id.range, None);

        assert_eq!(p("14862357").statistics().inversions, 10);
    }

    #[test]
    fn exceedance_range() {
        let s = p("14862357").statistics();
        assert_eq!(s.exceedances, vec![2, 3, 4]);
        assert_eq!(s.range, Some((2, 4)));
    }

    #[test]
    fn roundtrip_exhaustive_small() {
        for n in 0..=6 {
            for w in Permutation::symmetric_group(n) {
                assert_eq!(w.lehmer_code().decode(), w);
                assert_eq!(w.lehmer_code().weight(), w.inversions());
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("3,1,4,2"), p("3142"));
        assert_eq!(p("3142").to_string(), "3142");
        assert_eq!(Permutation::identity().to_string(), "id");
        assert!("30x".parse::<Permutation>().is_err());
        assert!("1,1".parse::<Permutation>().is_err());
    }

    #[test]
    fn canonical_form_strips_fixed_tail() {
        assert_eq!(p("3412"), p("3,4,1,2,5,6"));
        assert_eq!(p("123"), Permutation::identity());
    }

    #[test]
    fn symmetric_group_sizes_and_signs() {
        assert_eq!(Permutation::symmetric_group(4).len(), 24);
        let total: i64 = Permutation::symmetric_group(4)
            .iter()
            .map(|s| s.sign())
            .sum();
        assert_eq!(total, 0);
        assert_eq!(Permutation::identity().sign(), 1);
        assert_eq!(p("21").sign(), -1);
    }

    proptest! {
        #[test]
        fn code_roundtrip_random(entries in proptest::collection::vec(0usize..7, 0..8)) {
            let code = LehmerCode::new(entries);
            prop_assert_eq!(code.decode().lehmer_code(), code);
        }

        #[test]
        fn inverse_composes_to_identity(n in 1usize..6) {
            for w in Permutation::symmetric_group(n) {
                prop_assert!(w.compose(&w.inverse()).is_identity());
            }
        }
    }
}
