//! Ladder indices, ladder sequences, the pipe-dream encoding bijection and
//! the compatibility inequality systems.
//!
//! A ladder index `(i, k_1, ..., k_l)` records a patch of crosses that starts
//! in row `i` and is pushed down `k_1` rows, then `k_2`, and so on; the patch
//! comes to rest in row `|i| = i + k_1 + ... + k_l`. A ladder sequence assigns
//! a patch size to each index. Encoding left-aligns a pipe dream patch by
//! patch (bottom-most, right-most first) and the ladder order on indices is
//! exactly the order in which patches are processed.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permutations::Permutation;
use crate::pipedreams::PipeDream;
use crate::polytopes;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LadderSeqError {
    /// A ladder index lands below the bound `mu`.
    #[error("ladder index {0} lands in row {1}, beyond mu = {2}")]
    IndexOutOfRange(String, usize, usize),
    /// Start row or a displacement is zero, or there are no displacements.
    #[error("malformed ladder index")]
    MalformedIndex,
    /// The pipe dream does not read the stated permutation, or is not reduced.
    #[error("not a reduced pipe dream for the stated permutation")]
    InvalidPipeDream,
    /// A ladder move demanded by the sequence is not applicable.
    #[error("sequence is not compatible: {0}")]
    Incompatible(String),
}

/// A ladder index: start row `i` and displacements `(k_1, ..., k_l)`.
///
/// Ordered by the ladder order: larger start rows first; for equal starts the
/// displacement lists compare entrywise with the smaller entry first, and an
/// index precedes its own proper prefixes.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LadderIndex {
    #[serde(rename = "i")]
    start: usize,
    #[serde(rename = "ks")]
    drops: Vec<usize>,
}

impl LadderIndex {
    pub fn new(start: usize, drops: Vec<usize>) -> Result<Self, LadderSeqError> {
        if start == 0 || drops.is_empty() || drops.contains(&0) {
            return Err(LadderSeqError::MalformedIndex);
        }
        Ok(LadderIndex { start, drops })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn drops(&self) -> &[usize] {
        &self.drops
    }

    /// Number of displacement rounds `l`.
    pub fn rounds(&self) -> usize {
        self.drops.len()
    }

    /// The landing row `|i| = i + k_1 + ... + k_l`.
    pub fn landing(&self) -> usize {
        self.start + self.drops.iter().sum::<usize>()
    }
}

impl Ord for LadderIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        other.start.cmp(&self.start).then_with(|| {
            for (a, b) in self.drops.iter().zip(&other.drops) {
                if a != b {
                    return a.cmp(b);
                }
            }
            other.drops.len().cmp(&self.drops.len())
        })
    }
}

impl PartialOrd for LadderIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LadderIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.drops.iter().format(","))
    }
}

impl fmt::Display for LadderIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.drops.iter().format(","))
    }
}

/// All compositions of `d` into positive parts, in split-mask order.
pub(crate) fn compositions(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![];
    }
    let mut out = Vec::with_capacity(1 << (d - 1));
    for mask in 0u64..(1 << (d - 1)) {
        let mut parts = Vec::new();
        let mut run = 1usize;
        for bit in 0..d - 1 {
            if mask & (1 << bit) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        out.push(parts);
    }
    out
}

/// The set of ladder indices with landing row at most `mu`, sorted ascending
/// in the ladder order.
///
/// ```
/// # use schubkit::ladderseq::ladder_indices;
/// let chain = ladder_indices(4);
/// assert_eq!(chain.len(), 11);
/// assert_eq!(chain[0].to_string(), "(3,1)");
/// assert_eq!(chain[10].to_string(), "(1,3)");
/// ```
pub fn ladder_indices(mu: usize) -> Vec<LadderIndex> {
    let mut out = Vec::new();
    for total in 2..=mu {
        for start in 1..total {
            for drops in compositions(total - start) {
                out.push(LadderIndex { start, drops });
            }
        }
    }
    out.sort();
    out
}

/// Three-way comparison in the ladder order.
pub fn ladder_compare(a: &LadderIndex, b: &LadderIndex) -> Ordering {
    a.cmp(b)
}

/// A sparse natural-valued vector over the ladder indices of `L_mu`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LadderSequence {
    mu: usize,
    entries: BTreeMap<LadderIndex, u64>,
}

impl LadderSequence {
    pub fn zero(mu: usize) -> Self {
        LadderSequence {
            mu,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a sequence, dropping zero entries and checking the index bound.
    pub fn new(
        mu: usize,
        entries: impl IntoIterator<Item = (LadderIndex, u64)>,
    ) -> Result<Self, LadderSeqError> {
        let mut map = BTreeMap::new();
        for (idx, value) in entries {
            if idx.landing() > mu {
                return Err(LadderSeqError::IndexOutOfRange(
                    idx.to_string(),
                    idx.landing(),
                    mu,
                ));
            }
            if value > 0 {
                map.insert(idx, value);
            }
        }
        Ok(LadderSequence { mu, entries: map })
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn get(&self, idx: &LadderIndex) -> u64 {
        self.entries.get(idx).copied().unwrap_or(0)
    }

    /// Nonzero entries in ascending ladder order.
    pub fn entries(&self) -> impl DoubleEndedIterator<Item = (&LadderIndex, u64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// The support `kappa`, in ascending ladder order.
    pub fn support(&self) -> Vec<LadderIndex> {
        self.entries.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Debug for LadderSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LadderSequence(mu={}; ", self.mu)?;
        write!(
            f,
            "{})",
            self.entries
                .iter()
                .map(|(k, v)| format!("x{k}={v}"))
                .format(", ")
        )
    }
}

/// JSON shape: `{"mu": int, "entries": [{"i":..,"ks":[..],"value":..},..]}`.
#[derive(Serialize, Deserialize)]
struct LadderSequenceRepr {
    mu: usize,
    entries: Vec<LadderEntryRepr>,
}

#[derive(Serialize, Deserialize)]
struct LadderEntryRepr {
    i: usize,
    ks: Vec<usize>,
    value: u64,
}

impl Serialize for LadderSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LadderSequenceRepr {
            mu: self.mu,
            entries: self
                .entries
                .iter()
                .map(|(k, &v)| LadderEntryRepr {
                    i: k.start,
                    ks: k.drops.clone(),
                    value: v,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LadderSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = LadderSequenceRepr::deserialize(deserializer)?;
        let entries: Result<Vec<_>, _> = repr
            .entries
            .into_iter()
            .map(|e| LadderIndex::new(e.i, e.ks).map(|idx| (idx, e.value)))
            .collect();
        LadderSequence::new(repr.mu, entries.map_err(serde::de::Error::custom)?)
            .map_err(serde::de::Error::custom)
    }
}

/// Largest index with a nonzero code entry; 0 for the identity.
pub fn mu_of(u: &Permutation) -> usize {
    u.lehmer_code().support_max()
}

/// The `u`-weight of a ladder sequence: entry `j` is `c_j(u)` minus the sum
/// over indices landing in row `j` plus the sum over indices starting there.
///
/// Entries can be negative for sequences outside `Phi_u`; callers check
/// nonnegativity when they need a genuine weight.
pub fn u_weight(x: &LadderSequence, u: &Permutation) -> Vec<i64> {
    let code = u.lehmer_code();
    let mu = x.mu().max(code.support_max());
    let mut out: Vec<i64> = (1..=mu).map(|j| code.entry(j) as i64).collect();
    for (idx, value) in x.entries() {
        out[idx.landing() - 1] -= value as i64;
        out[idx.start() - 1] += value as i64;
    }
    out
}

struct ActivePatch {
    start: usize,
    drops: Vec<usize>,
    size: usize,
    row: usize,
    cols: (usize, usize),
}

/// Encodes a pipe dream for `u` as a ladder sequence.
///
/// Repeatedly takes the bottom-most, right-most patch of non-left-aligned
/// crosses and pushes it down by inverse ladder moves until left-aligned,
/// recording the start row and the displacement history of each patch.
pub fn encode(d: &PipeDream, u: &Permutation) -> Result<LadderSequence, LadderSeqError> {
    let (perm, reduced) = d.read_permutation();
    if perm != *u || !reduced {
        return Err(LadderSeqError::InvalidPipeDream);
    }
    let mu = mu_of(u);
    let mut cur = d.clone();
    let mut entries: BTreeMap<LadderIndex, u64> = BTreeMap::new();
    let mut active: Option<ActivePatch> = None;
    loop {
        // bottom-most row holding a gap followed by a cross, right-most gap
        let mut found = None;
        'rows: for i in (1..=cur.ambient()).rev() {
            for &col in cur.row(i).iter().rev() {
                if col >= 2 && !cur.contains(i, col - 1) {
                    found = Some((i, col - 1));
                    break 'rows;
                }
            }
        }
        let Some((i, j)) = found else { break };
        let mut k = j + 1;
        while cur.contains(i, k + 1) {
            k += 1;
        }
        // push the patch in columns j+1..=k down, leftmost cross first
        let mut drop = 0usize;
        for col in j + 1..=k {
            let (next, m) = cur
                .inverse_ladder_move_with_drop(i, col)
                .expect("encoding algorithm moves apply on reduced pipe dreams");
            debug_assert!(col == j + 1 || m == drop, "patch crosses drop uniformly");
            drop = m;
            cur = next;
        }
        match active.take() {
            Some(mut patch) if patch.row == i && patch.cols == (j + 1, k) => {
                patch.drops.push(drop);
                patch.row = i + drop;
                patch.cols = (j, k - 1);
                active = Some(patch);
            }
            prev => {
                debug_assert!(prev.is_none(), "a patch left-aligns before the next starts");
                active = Some(ActivePatch {
                    start: i,
                    drops: vec![drop],
                    size: k - j,
                    row: i + drop,
                    cols: (j, k - 1),
                });
            }
        }
        let patch = active.as_ref().expect("just set");
        if patch.cols.0 == 1 || cur.contains(patch.row, patch.cols.0 - 1) {
            let patch = active.take().expect("just checked");
            let idx = LadderIndex::new(patch.start, patch.drops)
                .expect("algorithm produces well-formed indices");
            debug_assert!(idx.landing() <= mu, "no cross rests below row mu");
            let stale = entries.insert(idx, patch.size as u64);
            debug_assert!(stale.is_none(), "one patch per index");
        }
    }
    debug_assert!(active.is_none());
    debug_assert_eq!(
        cur,
        PipeDream::bottom(u),
        "encoding ends at the bottom pipe dream"
    );
    LadderSequence::new(mu, entries)
}

/// Decodes a ladder sequence back to a pipe dream for `u`.
///
/// Reads the entries backwards (descending ladder order); an entry of value
/// `v` at index `(i, k_1..k_l)` lifts the right-most `v` crosses of row `|i|`
/// up `k_l` rows, then `k_{l-1}`, ..., then `k_1` rows. Fails with
/// `Incompatible` when a demanded move does not apply or rises by the wrong
/// amount, which signals that the sequence is not `u`-compatible.
pub fn decode(x: &LadderSequence, u: &Permutation) -> Result<PipeDream, LadderSeqError> {
    let mu = mu_of(u);
    if x.mu() != mu {
        return Err(LadderSeqError::Incompatible(format!(
            "sequence bound mu = {} does not match mu(u) = {}",
            x.mu(),
            mu
        )));
    }
    let mut cur = PipeDream::bottom(u);
    for (idx, value) in x.entries().rev() {
        let landing = idx.landing();
        let row = cur.row(landing);
        if (row.len() as u64) < value {
            return Err(LadderSeqError::Incompatible(format!(
                "row {landing} holds {} crosses, {value} required for x{idx}",
                row.len(),
            )));
        }
        let mut cols: Vec<usize> = row[row.len() - value as usize..].to_vec();
        let mut at_row = landing;
        for p in (1..=idx.rounds()).rev() {
            let rise = idx.drops()[p - 1];
            for c in cols.iter_mut().rev() {
                let (next, m) = cur
                    .ladder_move_with_rise(at_row, *c)
                    .map_err(|e| LadderSeqError::Incompatible(format!("x{idx}: {e}")))?;
                if m != rise {
                    return Err(LadderSeqError::Incompatible(format!(
                        "x{idx}: move at ({at_row},{c}) rises {m} rows, {rise} required"
                    )));
                }
                cur = next;
                *c += 1;
            }
            at_row -= rise;
        }
        debug_assert_eq!(at_row, idx.start());
    }
    Ok(cur)
}

/// An affine function of the stretch parameter: `per_n * N + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineN {
    pub per_n: i64,
    pub constant: i64,
}

impl AffineN {
    pub fn eval(&self, n: u64) -> i64 {
        self.per_n * n as i64 + self.constant
    }
}

/// One inequality row `coeffs . x <= rhs_n * N + rhs_const`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SystemRow {
    pub coeffs: Vec<i64>,
    pub rhs_n: i64,
    pub rhs_const: i64,
}

/// A parametric integer system `A x <= N c + b` over ladder-index variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametricSystem {
    pub vars: Vec<LadderIndex>,
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<i64>>,
    #[serde(rename = "c")]
    pub n_coef: Vec<i64>,
    #[serde(rename = "b")]
    pub constant: Vec<i64>,
}

impl ParametricSystem {
    pub(crate) fn from_rows(vars: Vec<LadderIndex>, rows: Vec<SystemRow>) -> Self {
        let mut matrix = Vec::with_capacity(rows.len());
        let mut n_coef = Vec::with_capacity(rows.len());
        let mut constant = Vec::with_capacity(rows.len());
        for row in rows {
            debug_assert_eq!(row.coeffs.len(), vars.len());
            matrix.push(row.coeffs);
            n_coef.push(row.rhs_n);
            constant.push(row.rhs_const);
        }
        ParametricSystem {
            vars,
            matrix,
            n_coef,
            constant,
        }
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }
}

/// Linear-in-x, affine-in-N expression used while assembling systems.
#[derive(Clone)]
struct Expr {
    x: Vec<i64>,
    n: i64,
    k: i64,
}

impl Expr {
    fn affine(dim: usize, a: AffineN) -> Self {
        Expr {
            x: vec![0; dim],
            n: a.per_n,
            k: a.constant,
        }
    }

    fn sub(mut self, other: &Expr) -> Expr {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a -= b;
        }
        self.n -= other.n;
        self.k -= other.k;
        self
    }

    /// Row `self <= 0`, i.e. `x-part <= -n*N - k`.
    fn into_row(self) -> SystemRow {
        SystemRow {
            coeffs: self.x,
            rhs_n: -self.n,
            rhs_const: -self.k,
        }
    }
}

/// Emits the compatibility rows for one permutation block.
///
/// `code[j-1]` is the affine-in-N code entry `c_j` for `j = 1..=mu`; `kappa`
/// must be sorted ascending in the ladder order. Coefficients land in columns
/// `var_offset..var_offset + kappa.len()` of width-`total_vars` rows.
pub(crate) fn compat_rows(
    code: &[AffineN],
    mu: usize,
    kappa: &[LadderIndex],
    var_offset: usize,
    total_vars: usize,
) -> Vec<SystemRow> {
    debug_assert_eq!(code.len(), mu);
    debug_assert!(kappa.windows(2).all(|w| w[0] < w[1]));
    let dim = total_vars;

    // c_j^i: the code entry minus the later indices landing in row j
    let c_j = |t: usize, j: usize| -> Expr {
        let mut e = Expr::affine(dim, code[j - 1]);
        for (s, other) in kappa.iter().enumerate().skip(t + 1) {
            if other.landing() == j {
                e.x[var_offset + s] -= 1;
            }
        }
        e
    };
    // c_i^i: through the least later index with the same start row, when any
    let c_i = |t: usize| -> Expr {
        let idx = &kappa[t];
        match kappa[t + 1..].iter().position(|o| o.start() == idx.start()) {
            None => c_j(t, idx.start()),
            Some(off) => {
                let s = t + 1 + off;
                let iprime = &kappa[s];
                let mut e = c_j(t, iprime.landing());
                e.x[var_offset + s] += 1;
                e.k += iprime.rounds() as i64;
                e
            }
        }
    };

    let mut rows = Vec::new();
    // support condition: x_i >= 1 for i in kappa
    for t in 0..kappa.len() {
        let mut coeffs = vec![0i64; dim];
        coeffs[var_offset + t] = -1;
        rows.push(SystemRow {
            coeffs,
            rhs_n: 0,
            rhs_const: -1,
        });
    }
    // row budgets: indices landing in row j take at most c_j crosses;
    // rows without any landing index are trivially true and omitted
    for j in 1..=mu {
        let mut coeffs = vec![0i64; dim];
        let mut occupied = false;
        for (t, idx) in kappa.iter().enumerate() {
            if idx.landing() == j {
                coeffs[var_offset + t] = 1;
                occupied = true;
            }
        }
        if occupied {
            rows.push(SystemRow {
                coeffs,
                rhs_n: code[j - 1].per_n,
                rhs_const: code[j - 1].constant,
            });
        }
    }
    // per-index move-validity constraints
    for (t, idx) in kappa.iter().enumerate() {
        let rounds = idx.rounds() as i64;
        let landing = idx.landing();
        let mut prefix = idx.start();
        for p in 1..=idx.rounds() {
            let k_p = idx.drops()[p - 1];
            for q in 1..=k_p {
                if q == k_p {
                    // c^i_{prefix} <= c^i_{landing} - x_i + (l - p)
                    let lhs = if p == 1 { c_i(t) } else { c_j(t, prefix) };
                    let mut e = lhs.sub(&c_j(t, landing));
                    e.x[var_offset + t] += 1;
                    e.k -= rounds - p as i64;
                    rows.push(e.into_row());
                } else {
                    // c^i_{prefix+q} >= c^i_{landing} + (l - p + 1)
                    let mut e = c_j(t, landing).sub(&c_j(t, prefix + q));
                    e.k += rounds - p as i64 + 1;
                    rows.push(e.into_row());
                }
            }
            prefix += k_p;
        }
    }
    rows
}

/// The parametric system whose integer points at parameter `N` are exactly
/// the `(kappa, N*u)`-compatible ladder sequences.
pub fn compat_system(
    u: &Permutation,
    kappa: &[LadderIndex],
) -> Result<ParametricSystem, LadderSeqError> {
    let mu = mu_of(u);
    let mut sorted = kappa.to_vec();
    sorted.sort();
    sorted.dedup();
    for idx in &sorted {
        if idx.landing() > mu {
            return Err(LadderSeqError::IndexOutOfRange(
                idx.to_string(),
                idx.landing(),
                mu,
            ));
        }
    }
    let code = u.lehmer_code();
    let affine: Vec<AffineN> = (1..=mu)
        .map(|j| AffineN {
            per_n: code.entry(j) as i64,
            constant: 0,
        })
        .collect();
    let rows = compat_rows(&affine, mu, &sorted, 0, sorted.len());
    Ok(ParametricSystem::from_rows(sorted, rows))
}

/// All support sets admissible under the one-index-per-(start, landing) rule
/// with at most `caps[j-1]` indices landing in row `j`. Each set comes back
/// sorted ascending in the ladder order.
pub(crate) fn admissible_kappas(mu: usize, caps: &[i64]) -> Vec<Vec<LadderIndex>> {
    fn rec(
        groups: &[(usize, Vec<LadderIndex>)],
        g: usize,
        caps: &[i64],
        chosen: &mut Vec<LadderIndex>,
        landing_count: &mut [i64],
        out: &mut Vec<Vec<LadderIndex>>,
    ) {
        if g == groups.len() {
            let mut kappa = chosen.clone();
            kappa.sort();
            out.push(kappa);
            return;
        }
        let (landing, indices) = &groups[g];
        // skip this (start, landing) pair entirely
        rec(groups, g + 1, caps, chosen, landing_count, out);
        if landing_count[*landing] < caps[*landing - 1] {
            landing_count[*landing] += 1;
            for idx in indices {
                chosen.push(idx.clone());
                rec(groups, g + 1, caps, chosen, landing_count, out);
                chosen.pop();
            }
            landing_count[*landing] -= 1;
        }
    }

    let mut groups: Vec<(usize, Vec<LadderIndex>)> = Vec::new();
    for landing in 2..=mu {
        for start in 1..landing {
            let indices = compositions(landing - start)
                .into_iter()
                .map(|drops| LadderIndex { start, drops })
                .collect();
            groups.push((landing, indices));
        }
    }
    let mut out = Vec::new();
    let mut landing_count = vec![0i64; mu + 1];
    rec(
        &groups,
        0,
        caps,
        &mut Vec::new(),
        &mut landing_count,
        &mut out,
    );
    out
}

/// All `u`-compatible ladder sequences: the disjoint union over admissible
/// supports of the integer points of each compatibility system at `N = 1`.
pub fn enumerate_compatible(u: &Permutation) -> Vec<LadderSequence> {
    let mu = mu_of(u);
    let code = u.lehmer_code();
    let caps: Vec<i64> = (1..=mu).map(|j| code.entry(j) as i64).collect();
    let mut out = Vec::new();
    for kappa in admissible_kappas(mu, &caps) {
        let system = compat_system(u, &kappa).expect("admissible kappas are in range");
        let inst = polytopes::instantiate(&system, 1);
        let points =
            polytopes::enumerate_lattice_points(&inst).expect("compatibility systems are bounded");
        for point in points {
            let entries = kappa
                .iter()
                .cloned()
                .zip(point.iter().map(|&v| v as u64))
                .collect::<Vec<_>>();
            let seq = LadderSequence::new(mu, entries).expect("kappa is in range");
            debug_assert_eq!(seq.support(), kappa, "support condition pins kappa");
            out.push(seq);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipedreams;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn idx(start: usize, drops: &[usize]) -> LadderIndex {
        LadderIndex::new(start, drops.to_vec()).unwrap()
    }

    fn running_example_dream() -> PipeDream {
        PipeDream::new(
            8,
            &[
                (1, 3),
                (1, 5),
                (2, 1),
                (2, 3),
                (2, 5),
                (2, 6),
                (3, 1),
                (3, 2),
                (3, 3),
                (4, 1),
            ],
        )
        .unwrap()
    }

    fn running_example_sequence() -> LadderSequence {
        LadderSequence::new(
            4,
            vec![
                (idx(2, &[1]), 2),
                (idx(2, &[2]), 1),
                (idx(1, &[1, 2]), 1),
                (idx(1, &[1]), 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn ladder_indices_mu4_matches_worked_order() {
        let expected = vec![
            idx(3, &[1]),
            idx(2, &[1, 1]),
            idx(2, &[1]),
            idx(2, &[2]),
            idx(1, &[1, 1, 1]),
            idx(1, &[1, 1]),
            idx(1, &[1, 2]),
            idx(1, &[1]),
            idx(1, &[2, 1]),
            idx(1, &[2]),
            idx(1, &[3]),
        ];
        assert_eq!(ladder_indices(4), expected);
    }

    #[test]
    fn ladder_indices_small() {
        assert!(ladder_indices(1).is_empty());
        assert_eq!(ladder_indices(2), vec![idx(1, &[1])]);
    }

    #[test]
    fn ladder_compare_examples() {
        assert_eq!(
            ladder_compare(&idx(3, &[1]), &idx(2, &[1, 1])),
            Ordering::Less
        );
        assert_eq!(
            ladder_compare(&idx(1, &[1, 1, 1]), &idx(1, &[1, 1])),
            Ordering::Less
        );
        assert_eq!(
            ladder_compare(&idx(2, &[2]), &idx(2, &[2])),
            Ordering::Equal
        );
    }

    #[test]
    fn ladder_order_is_total_up_to_mu6() {
        for mu in 1..=6 {
            let all = ladder_indices(mu);
            for (s, a) in all.iter().enumerate() {
                for (t, b) in all.iter().enumerate() {
                    match a.cmp(b) {
                        Ordering::Less => assert!(s < t),
                        Ordering::Equal => assert_eq!(s, t),
                        Ordering::Greater => assert!(s > t),
                    }
                }
            }
        }
    }

    #[test]
    fn u_weight_examples() {
        let u = p("14862357");
        let x = running_example_sequence();
        assert_eq!(u_weight(&x, &u), vec![2, 4, 3, 1]);

        assert_eq!(u_weight(&LadderSequence::zero(4), &u), vec![0, 2, 5, 3]);

        let x = LadderSequence::new(2, vec![(idx(1, &[1]), 1)]).unwrap();
        assert_eq!(u_weight(&x, &p("132")), vec![1, 0]);
    }

    #[test]
    fn encode_running_example() {
        let u = p("14862357");
        let x = encode(&running_example_dream(), &u).unwrap();
        assert_eq!(x, running_example_sequence());
    }

    #[test]
    fn encode_bottom_is_zero() {
        for u in Permutation::symmetric_group(4) {
            let x = encode(&PipeDream::bottom(&u), &u).unwrap();
            assert!(x.is_zero());
        }
    }

    #[test]
    fn encode_single_move_example() {
        let d = PipeDream::new(3, &[(1, 2)]).unwrap();
        let x = encode(&d, &p("132")).unwrap();
        assert_eq!(x, LadderSequence::new(2, vec![(idx(1, &[1]), 1)]).unwrap());
    }

    #[test]
    fn encode_rejects_wrong_permutation() {
        let d = PipeDream::bottom(&p("132"));
        assert_eq!(
            encode(&d, &p("213")).unwrap_err(),
            LadderSeqError::InvalidPipeDream
        );
        // non-reduced input
        let bad = PipeDream::new(2, &[(1, 2), (2, 1)]).unwrap();
        assert_eq!(
            encode(&bad, &Permutation::identity()).unwrap_err(),
            LadderSeqError::InvalidPipeDream
        );
    }

    #[test]
    fn decode_running_example() {
        let u = p("14862357");
        let d = decode(&running_example_sequence(), &u).unwrap();
        assert_eq!(d, running_example_dream());
    }

    #[test]
    fn decode_zero_is_bottom() {
        let u = p("14862357");
        assert_eq!(
            decode(&LadderSequence::zero(4), &u).unwrap(),
            PipeDream::bottom(&u)
        );
    }

    #[test]
    fn decode_incompatible_value() {
        let x = LadderSequence::new(2, vec![(idx(1, &[1]), 2)]).unwrap();
        assert!(matches!(
            decode(&x, &p("132")),
            Err(LadderSeqError::Incompatible(_))
        ));
    }

    #[test]
    fn compat_system_empty_kappa() {
        // empty support: empty system whose sole solution is the zero sequence
        let sys = compat_system(&p("14862357"), &[]).unwrap();
        assert!(sys.vars.is_empty());
        assert_eq!(sys.rows(), 0);
        let inst = polytopes::instantiate(&sys, 1);
        assert_eq!(
            polytopes::enumerate_lattice_points(&inst).unwrap(),
            vec![Vec::<i64>::new()]
        );
    }

    #[test]
    fn compat_system_rejects_out_of_range() {
        let err = compat_system(&p("132"), &[idx(1, &[5])]).unwrap_err();
        assert!(matches!(err, LadderSeqError::IndexOutOfRange(_, 6, 2)));
    }

    #[test]
    fn compat_system_132_forces_interval() {
        // for u = 132 and kappa = {(1,1)}: 1 <= x <= N c_2(u) = N
        let sys = compat_system(&p("132"), &[idx(1, &[1])]).unwrap();
        for n in 1..=4u64 {
            let inst = polytopes::instantiate(&sys, n);
            let points = polytopes::enumerate_lattice_points(&inst).unwrap();
            let values: Vec<i64> = points.iter().map(|pt| pt[0]).collect();
            assert_eq!(values, (1..=n as i64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn compat_system_admits_running_example() {
        let u = p("14862357");
        let x = running_example_sequence();
        let kappa = x.support();
        let sys = compat_system(&u, &kappa).unwrap();
        let inst = polytopes::instantiate(&sys, 1);
        let point: Vec<i64> = kappa.iter().map(|i| x.get(i) as i64).collect();
        for (row, rhs) in inst.matrix.iter().zip(&inst.rhs) {
            let lhs: i64 = row.iter().zip(&point).map(|(a, v)| a * v).sum();
            assert!(lhs <= *rhs, "row {row:?} violated: {lhs} > {rhs}");
        }
        let points = polytopes::enumerate_lattice_points(&inst).unwrap();
        assert!(points.contains(&point));
    }

    #[test]
    fn c_values_of_worked_example() {
        // the worked inequalities for index (1,1,2) pin c_1..c_4 = 3, 1, 5, 3
        let u = p("14862357");
        let x = running_example_sequence();
        let kappa = x.support();
        let code = u.lehmer_code();
        let point: Vec<i64> = kappa.iter().map(|i| x.get(i) as i64).collect();
        let t = kappa.iter().position(|i| *i == idx(1, &[1, 2])).unwrap();
        let c_j_val = |j: usize| -> i64 {
            let mut v = code.entry(j) as i64;
            for (s, other) in kappa.iter().enumerate().skip(t + 1) {
                if other.landing() == j {
                    v -= point[s];
                }
            }
            v
        };
        assert_eq!(c_j_val(2), 1);
        assert_eq!(c_j_val(3), 5);
        assert_eq!(c_j_val(4), 3);
        // kappa^i = {(1,1)}, so c_1 = c_2 + x_{(1,1)} + 1 = 3
        let s = kappa.iter().position(|i| *i == idx(1, &[1])).unwrap();
        assert_eq!(c_j_val(2) + point[s] + 1, 3);
    }

    #[test]
    fn enumerate_compatible_examples() {
        let seqs = enumerate_compatible(&p("132"));
        assert_eq!(seqs.len(), 2);
        assert!(seqs.contains(&LadderSequence::zero(2)));
        assert!(seqs.contains(&LadderSequence::new(2, vec![(idx(1, &[1]), 1)]).unwrap()));

        assert_eq!(enumerate_compatible(&Permutation::identity()).len(), 1);

        let seqs = enumerate_compatible(&p("14862357"));
        assert!(seqs.contains(&running_example_sequence()));
        assert_eq!(
            seqs.len(),
            pipedreams::enumerate_pipe_dreams(&p("14862357")).len()
        );
    }

    #[test]
    fn bijection_small_symmetric_groups() {
        for n in 1..=4 {
            for u in Permutation::symmetric_group(n) {
                let dreams = pipedreams::enumerate_pipe_dreams(&u);
                let mut encoded: Vec<LadderSequence> = dreams
                    .iter()
                    .map(|d| {
                        let x = encode(d, &u).unwrap();
                        assert_eq!(decode(&x, &u).unwrap(), *d, "decode inverts encode");
                        let wt = u_weight(&x, &u);
                        let expect: Vec<i64> =
                            (1..=x.mu()).map(|j| d.weight().entry(j) as i64).collect();
                        assert_eq!(wt, expect, "weight preserved for u={u}");
                        x
                    })
                    .collect();
                encoded.sort();
                assert_eq!(
                    encoded,
                    enumerate_compatible(&u),
                    "image is Phi_u for u={u}"
                );
            }
        }
    }

    #[test]
    fn bijection_s5_complete() {
        for u in Permutation::symmetric_group(5) {
            let dreams = pipedreams::enumerate_pipe_dreams(&u);
            let compatible = enumerate_compatible(&u);
            assert_eq!(dreams.len(), compatible.len(), "u={u}");
            let mut encoded: Vec<LadderSequence> = dreams
                .iter()
                .map(|d| {
                    let x = encode(d, &u).unwrap();
                    assert_eq!(&decode(&x, &u).unwrap(), d);
                    x
                })
                .collect();
            encoded.sort();
            assert_eq!(encoded, compatible, "u={u}");
        }
    }

    #[test]
    fn patch_uniqueness_on_encodings() {
        for u in Permutation::symmetric_group(4) {
            for d in pipedreams::enumerate_pipe_dreams(&u) {
                let x = encode(&d, &u).unwrap();
                let pairs: Vec<(usize, usize)> = x
                    .support()
                    .iter()
                    .map(|i| (i.start(), i.landing()))
                    .collect();
                let mut dedup = pairs.clone();
                dedup.dedup();
                assert_eq!(pairs, dedup, "one patch per (start, landing) pair");
            }
        }
    }

    #[test]
    fn stretch_stability_small() {
        // the same support classes describe PD(N*u), with N only in the bounds
        for u in ["2143", "3142", "1432", "4321", "2413"].map(p) {
            let mu = mu_of(&u);
            let code = u.lehmer_code();
            let caps: Vec<i64> = (1..=mu).map(|j| 3 * code.entry(j) as i64).collect();
            let kappas = admissible_kappas(mu, &caps);
            for n in 1..=3u64 {
                let stretched = u.stretch(n);
                let mut by_support: BTreeMap<Vec<LadderIndex>, Vec<Vec<i64>>> = BTreeMap::new();
                for d in pipedreams::enumerate_pipe_dreams(&stretched) {
                    let x = encode(&d, &stretched).unwrap();
                    let kappa = x.support();
                    let point = kappa.iter().map(|i| x.get(i) as i64).collect();
                    by_support.entry(kappa).or_default().push(point);
                }
                for kappa in &kappas {
                    let sys = compat_system(&u, kappa).unwrap();
                    let inst = polytopes::instantiate(&sys, n);
                    let mut points = polytopes::enumerate_lattice_points(&inst).unwrap();
                    points.sort();
                    let mut expected = by_support.remove(kappa).unwrap_or_default();
                    expected.sort();
                    assert_eq!(points, expected, "u={u} N={n} kappa={kappa:?}");
                }
                assert!(by_support.is_empty(), "every support class is admissible");
            }
        }
    }

    #[test]
    fn sequence_json_roundtrip() {
        let x = running_example_sequence();
        let json = serde_json::to_string(&x).unwrap();
        let back: LadderSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
