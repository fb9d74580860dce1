//! Pipe dreams, their weights, ladder moves and enumeration.
//!
//! A pipe dream is a set of cross tiles inside the staircase
//! `Delta_n = {(i,j) : i+j <= n+1}` (matrix indexing, 1-based). Pipes enter the
//! top boundary labelled `1..n` left to right; at a cross tile the two strands
//! pass straight through, at an elbow the strand entering from the north turns
//! west and the strand entering from the east turns south. Reading the labels
//! off the left edge top to bottom gives the permutation of the dream.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permutations::Permutation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipeDreamError {
    /// A cross lies outside the staircase `Delta_n`.
    #[error("cross ({0},{1}) outside Delta_{2}")]
    OutsideStaircase(usize, usize, usize),
    /// A ladder move's preconditions fail; reports which condition.
    #[error("ladder move not applicable at ({row},{col}): {reason}")]
    NotApplicable {
        row: usize,
        col: usize,
        reason: &'static str,
    },
}

/// Row weights of a pipe dream: entry `i` is the number of crosses in row `i`.
/// Trailing zeros stripped.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<usize>);

impl WeightVector {
    pub fn new(mut entries: Vec<usize>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        WeightVector(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// Entry at 1-based row `i`, zero beyond the stored length.
    pub fn entry(&self, i: usize) -> usize {
        debug_assert!(i >= 1);
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    /// Total number of crosses.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `self <= other` in the reverse dominance order (tail sums compared).
    pub fn revdom_le(&self, other: &WeightVector) -> bool {
        let k = self.0.len().max(other.0.len());
        let mut tail_self = 0usize;
        let mut tail_other = 0usize;
        for i in (1..=k).rev() {
            tail_self += self.entry(i);
            tail_other += other.entry(i);
            if tail_self > tail_other {
                return false;
            }
        }
        true
    }
}

impl fmt::Debug for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().format(","))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().format(","))
    }
}

/// A set of cross tiles inside `Delta_n`, stored per row as sorted column lists.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PipeDreamRepr", into = "PipeDreamRepr")]
pub struct PipeDream {
    n: usize,
    rows: Vec<Vec<usize>>,
}

/// JSON shape: `{"n": int, "crosses": [[i,j],...]}` with 1-based indices.
#[derive(Serialize, Deserialize)]
struct PipeDreamRepr {
    n: usize,
    crosses: Vec<(usize, usize)>,
}

impl TryFrom<PipeDreamRepr> for PipeDream {
    type Error = PipeDreamError;
    fn try_from(repr: PipeDreamRepr) -> Result<Self, Self::Error> {
        PipeDream::new(repr.n, &repr.crosses)
    }
}

impl From<PipeDream> for PipeDreamRepr {
    fn from(d: PipeDream) -> Self {
        PipeDreamRepr {
            n: d.n,
            crosses: d.crosses(),
        }
    }
}

impl PipeDream {
    /// Builds a pipe dream from a cross set, checking the staircase bound.
    pub fn new(n: usize, crosses: &[(usize, usize)]) -> Result<Self, PipeDreamError> {
        let mut rows = vec![Vec::new(); n];
        for &(i, j) in crosses {
            if i == 0 || j == 0 || i + j > n + 1 {
                return Err(PipeDreamError::OutsideStaircase(i, j, n));
            }
            rows[i - 1].push(j);
        }
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
        }
        Ok(PipeDream { n, rows })
    }

    pub fn empty(n: usize) -> Self {
        PipeDream {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    /// The left-aligned pipe dream for `u`, with weight `code(u)`.
    pub fn bottom(u: &Permutation) -> Self {
        let code = u.lehmer_code();
        let n = u.len();
        let rows = (1..=n).map(|i| (1..=code.entry(i)).collect()).collect();
        PipeDream { n, rows }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.n && self.rows[i - 1].binary_search(&j).is_ok()
    }

    /// All crosses, row-major sorted.
    pub fn crosses(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                out.push((i + 1, j));
            }
        }
        out
    }

    pub fn cross_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Sorted columns of the crosses in row `i` (1-based).
    pub fn row(&self, i: usize) -> &[usize] {
        self.rows.get(i - 1).map(|r| r.as_slice()).unwrap_or(&[])
    }

    /// Number of crosses in each row.
    pub fn weight(&self) -> WeightVector {
        WeightVector::new(self.rows.iter().map(Vec::len).collect())
    }

    fn insert(&mut self, i: usize, j: usize) {
        let row = &mut self.rows[i - 1];
        if let Err(pos) = row.binary_search(&j) {
            row.insert(pos, j);
        }
    }

    fn remove(&mut self, i: usize, j: usize) {
        let row = &mut self.rows[i - 1];
        if let Ok(pos) = row.binary_search(&j) {
            row.remove(pos);
        }
    }

    /// Traces the pipes and reads the permutation off the left edge.
    ///
    /// `reduced` is true iff no pair of pipes crosses more than once. Pipes
    /// `1..=n+1` are traced (a pipe entering beyond column `n+1` cannot meet a
    /// cross), so arbitrary cross sets inside the staircase read a genuine
    /// permutation.
    pub fn read_permutation(&self) -> (Permutation, bool) {
        let labels = self.n + 1;
        let mut exit_row = vec![0usize; labels + 1];
        // cross tile -> (vertical pipe, horizontal pipe)
        let mut passes: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        #[allow(clippy::needless_range_loop)]
        for label in 1..=labels {
            let (mut r, mut c) = (1usize, label);
            let mut heading_south = true;
            loop {
                if c == 0 {
                    unreachable!("pipe escaped through column 0");
                }
                if self.contains(r, c) {
                    let entry = passes.entry((r, c)).or_insert((0, 0));
                    if heading_south {
                        entry.0 = label;
                        r += 1;
                    } else {
                        entry.1 = label;
                        if c == 1 {
                            break;
                        }
                        c -= 1;
                    }
                } else {
                    // elbow: north turns west, east turns south
                    if heading_south {
                        heading_south = false;
                        if c == 1 {
                            break;
                        }
                        c -= 1;
                    } else {
                        heading_south = true;
                        r += 1;
                    }
                }
            }
            exit_row[label] = r;
        }
        // pipes entering beyond column n+1 run straight along their diagonal,
        // so exits of pipes 1..=n+1 fill rows 1..=n+1 exactly
        let mut word = vec![0usize; labels];
        for label in 1..=labels {
            word[exit_row[label] - 1] = label;
        }
        debug_assert!(word.iter().all(|&v| v != 0));
        let perm = Permutation::from_oneline(word).expect("pipe exits are distinct rows");
        let mut pair_seen = HashSet::new();
        let mut reduced = true;
        for &(a, b) in passes.values() {
            debug_assert!(a != 0 && b != 0, "every cross tile carries two pipes");
            if !pair_seen.insert((a.min(b), a.max(b))) {
                reduced = false;
            }
        }
        (perm, reduced)
    }

    /// Ladder move `L_{i,j}`: relocates the cross at `(i,j)` to `(i-m, j+1)`
    /// where rows `i-1..i-m+1` are full in columns `j, j+1` and row `i-m` is
    /// empty in both.
    pub fn ladder_move(&self, i: usize, j: usize) -> Result<PipeDream, PipeDreamError> {
        self.ladder_move_with_rise(i, j).map(|(d, _)| d)
    }

    /// Ladder move that also reports the rise `m`.
    pub fn ladder_move_with_rise(
        &self,
        i: usize,
        j: usize,
    ) -> Result<(PipeDream, usize), PipeDreamError> {
        let fail = |reason| PipeDreamError::NotApplicable {
            row: i,
            col: j,
            reason,
        };
        if !self.contains(i, j) {
            return Err(fail("(a): no cross at (i,j)"));
        }
        if self.contains(i, j + 1) {
            return Err(fail("(a): cross already at (i,j+1)"));
        }
        let mut m = 1;
        loop {
            if m >= i {
                return Err(fail("(b): no empty row pair above"));
            }
            let left = self.contains(i - m, j);
            let right = self.contains(i - m, j + 1);
            match (left, right) {
                (false, false) => break,
                (true, true) => m += 1,
                _ => return Err(fail("(b)/(c): row above has exactly one of the pair")),
            }
        }
        if i - m + j + 1 > self.n + 1 {
            return Err(fail("target outside staircase"));
        }
        let mut next = self.clone();
        next.remove(i, j);
        next.insert(i - m, j + 1);
        Ok((next, m))
    }

    /// Inverse ladder move `L^{-1}_{i,j}`: relocates the cross at `(i,j)` to
    /// `(i+m, j-1)`, mirroring [`PipeDream::ladder_move`].
    pub fn inverse_ladder_move(&self, i: usize, j: usize) -> Result<PipeDream, PipeDreamError> {
        self.inverse_ladder_move_with_drop(i, j).map(|(d, _)| d)
    }

    /// Inverse ladder move that also reports the drop `m`.
    pub fn inverse_ladder_move_with_drop(
        &self,
        i: usize,
        j: usize,
    ) -> Result<(PipeDream, usize), PipeDreamError> {
        let fail = |reason| PipeDreamError::NotApplicable {
            row: i,
            col: j,
            reason,
        };
        if !self.contains(i, j) {
            return Err(fail("(a): no cross at (i,j)"));
        }
        if j < 2 || self.contains(i, j - 1) {
            return Err(fail("(a): column to the left not free"));
        }
        let mut m = 1;
        loop {
            let left = self.contains(i + m, j - 1);
            let right = self.contains(i + m, j);
            match (left, right) {
                (false, false) => break,
                (true, true) => m += 1,
                _ => return Err(fail("(b)/(c): row below has exactly one of the pair")),
            }
        }
        if i + m + j - 1 > self.n + 1 {
            return Err(fail("target outside staircase"));
        }
        let mut next = self.clone();
        next.remove(i, j);
        next.insert(i + m, j - 1);
        Ok((next, m))
    }

    /// ASCII rendering: `+` for crosses, `.` for elbows, one staircase row per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.n {
            let width = self.n + 1 - i;
            let cells = (1..=width)
                .map(|j| if self.contains(i, j) { "+" } else { "." })
                .join(" ");
            out.push_str(&cells);
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for PipeDream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PipeDream(n={}, {:?})", self.n, self.crosses())
    }
}

/// All pipe dreams for `u`: the ladder-move closure of the bottom pipe dream,
/// canonically ordered.
pub fn enumerate_pipe_dreams(u: &Permutation) -> Vec<PipeDream> {
    let bottom = PipeDream::bottom(u);
    let mut seen: HashSet<PipeDream> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(bottom.clone());
    queue.push_back(bottom);
    while let Some(d) = queue.pop_front() {
        for (i, j) in d.crosses() {
            if let Ok(next) = d.ladder_move(i, j) {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    let mut out: Vec<PipeDream> = seen.into_iter().collect();
    out.sort_by_key(PipeDream::crosses);
    out
}

/// The Schubert polynomial of `u` as a weight multiset: weight -> number of
/// pipe dreams with that weight.
pub fn schubert_polynomial(u: &Permutation) -> std::collections::BTreeMap<WeightVector, u64> {
    let mut out = std::collections::BTreeMap::new();
    for d in enumerate_pipe_dreams(u) {
        *out.entry(d.weight()).or_insert(0) += 1;
    }
    out
}

/// Schubert-Kostka number `K_{u,a}`: pipe dreams for `u` with weight `a`.
pub fn schubert_kostka(u: &Permutation, a: &WeightVector) -> u64 {
    if a.total() != u.inversions() {
        return 0;
    }
    enumerate_pipe_dreams(u)
        .iter()
        .filter(|d| &d.weight() == a)
        .count() as u64
}
