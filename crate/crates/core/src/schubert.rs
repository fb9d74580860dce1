//! Schubert coefficients by three independent routes: the divided-difference
//! expansion oracle, the Postnikov-Stanley alternating sum over Schubert-Kostka
//! numbers, and the signed polytope counts for stretched coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ladderseq::{self, AffineN};
use crate::permutations::Permutation;
use crate::pipedreams::{self, WeightVector};
use crate::polytopes::{self, PolytopeError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchubertError {
    /// Leading-term elimination exceeded its iteration cap.
    #[error("Schubert expansion did not terminate within {0} steps")]
    NonTerminating(usize),
    /// An alternating sum produced a negative value; indicates a bug.
    #[error("negative coefficient {0} from an alternating sum")]
    NegativeResult(BigInt),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Method selector for stretched Schubert coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Signed sum of lattice-point counts over `S_mu` (the default).
    Polytope,
    /// Postnikov-Stanley alternating sum on the stretched permutations.
    Ps,
    /// Expansion of the product of the stretched Schubert polynomials.
    Expand,
}

/// An integer polynomial in `x_1, x_2, ...`, stored sparsely by exponent
/// vector (trailing zeros stripped).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Vec<usize>, i64>,
}

fn canon_exp(mut exp: Vec<usize>) -> Vec<usize> {
    while exp.last() == Some(&0) {
        exp.pop();
    }
    exp
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::monomial(vec![], 1)
    }

    pub fn monomial(exp: Vec<usize>, coef: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coef != 0 {
            terms.insert(canon_exp(exp), coef);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, i64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coefficient(&self, exp: &[usize]) -> i64 {
        self.terms
            .get(&canon_exp(exp.to_vec()))
            .copied()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, exp: Vec<usize>, coef: i64) {
        if coef == 0 {
            return;
        }
        match self.terms.entry(canon_exp(exp)) {
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().checked_add(coef).expect("coefficient overflow");
                if sum == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coef);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for (exp, coef) in other.terms() {
            self.add_term(exp.clone(), coef);
        }
    }

    pub fn sub_scaled(&mut self, other: &Polynomial, scale: i64) {
        for (exp, coef) in other.terms() {
            self.add_term(exp.clone(), -coef * scale);
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let len = ea.len().max(eb.len());
                let exp: Vec<usize> = (0..len)
                    .map(|t| ea.get(t).copied().unwrap_or(0) + eb.get(t).copied().unwrap_or(0))
                    .collect();
                out.add_term(exp, ca.checked_mul(cb).expect("coefficient overflow"));
            }
        }
        out
    }

    /// The exponent maximal in reverse-lexicographic order: compare at the
    /// largest index where two exponents differ, larger entry wins.
    pub fn revlex_leading(&self) -> Option<(&Vec<usize>, i64)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| revlex_cmp(a, b))
            .map(|(e, &c)| (e, c))
    }

    /// Divided difference: `(f - s_i f) / (x_i - x_{i+1})`, computed term by
    /// term (always exact).
    pub fn divided_difference(&self, i: usize) -> Polynomial {
        debug_assert!(i >= 1);
        let mut out = Polynomial::zero();
        for (exp, coef) in self.terms() {
            let a = exp.get(i - 1).copied().unwrap_or(0);
            let b = exp.get(i).copied().unwrap_or(0);
            if a == b {
                continue;
            }
            // (x_i^a x_{i+1}^b - x_i^b x_{i+1}^a) / (x_i - x_{i+1})
            //   = sign * x_i^lo x_{i+1}^lo * (homogeneous sum of degree |a-b|-1)
            let (lo, sign) = if a > b { (b, 1) } else { (a, -1) };
            let delta = a.abs_diff(b);
            let mut base = exp.clone();
            if base.len() <= i {
                base.resize(i + 1, 0);
            }
            for t in 0..delta {
                base[i - 1] = lo + delta - 1 - t;
                base[i] = lo + t;
                out.add_term(base.clone(), sign * coef);
            }
        }
        out
    }
}

/// JSON shape: `{"terms": [{"exp": [ints], "coef": int}, ...]}`.
#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<usize>,
    coef: i64,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolynomialRepr {
            terms: self
                .terms()
                .map(|(exp, coef)| TermRepr {
                    exp: exp.clone(),
                    coef,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolynomialRepr::deserialize(deserializer)?;
        let mut poly = Polynomial::zero();
        for term in repr.terms {
            poly.add_term(term.exp, term.coef);
        }
        Ok(poly)
    }
}

fn revlex_cmp(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    let len = a.len().max(b.len());
    for t in (0..len).rev() {
        let va = a.get(t).copied().unwrap_or(0);
        let vb = b.get(t).copied().unwrap_or(0);
        if va != vb {
            return va.cmp(&vb);
        }
    }
    std::cmp::Ordering::Equal
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, coef) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{coef}*x^{exp:?}")?;
        }
        Ok(())
    }
}

/// `S_w` by the divided-difference recursion from `S_{w_0} = x^{rho_n}`.
pub fn schubert_via_divided_differences(w: &Permutation, n: usize) -> Polynomial {
    assert!(w.len() <= n, "w must lie in S_n");
    fn go(word: &mut Vec<usize>, cache: &mut BTreeMap<Vec<usize>, Polynomial>) -> Polynomial {
        if let Some(hit) = cache.get(word) {
            return hit.clone();
        }
        let n = word.len();
        let ascent = (0..n - 1).find(|&i| word[i] < word[i + 1]);
        let poly = match ascent {
            None => {
                // the longest element: x_1^{n-1} x_2^{n-2} ... x_{n-1}
                Polynomial::monomial((1..n).rev().collect(), 1)
            }
            Some(i) => {
                word.swap(i, i + 1);
                let longer = go(word, cache);
                word.swap(i, i + 1);
                longer.divided_difference(i + 1)
            }
        };
        cache.insert(word.clone(), poly.clone());
        poly
    }
    if n == 0 {
        return Polynomial::one();
    }
    let mut word = w.oneline(n);
    go(&mut word, &mut BTreeMap::new())
}

/// The pipe-dream Schubert polynomial (sum of `x^{wt(D)}` over `PD(u)`).
pub fn schubert_polynomial(u: &Permutation) -> Polynomial {
    let mut out = Polynomial::zero();
    for (weight, count) in pipedreams::schubert_polynomial(u) {
        out.add_term(weight.entries().to_vec(), count as i64);
    }
    out
}

/// Expansion of a polynomial in the Schubert basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchubertExpansion {
    coefficients: BTreeMap<Permutation, i64>,
}

impl SchubertExpansion {
    pub fn coefficient(&self, w: &Permutation) -> i64 {
        self.coefficients.get(w).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, i64)> {
        self.coefficients.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

const EXPANSION_CAP: usize = 2_000_000;

/// Expands `p` in the Schubert basis by leading-term elimination: subtract
/// `coef * S_w'` for `w' = code^{-1}` of the reverse-lexicographically
/// maximal exponent until nothing is left.
pub fn expand_in_schubert_basis(p: &Polynomial) -> Result<SchubertExpansion, SchubertError> {
    let mut rest = p.clone();
    let mut coefficients = BTreeMap::new();
    let mut cache: BTreeMap<Permutation, Polynomial> = BTreeMap::new();
    for _ in 0..EXPANSION_CAP {
        let Some((exp, coef)) = rest.revlex_leading() else {
            return Ok(SchubertExpansion { coefficients });
        };
        let w = crate::permutations::LehmerCode::new(exp.clone()).decode();
        let basis = cache
            .entry(w.clone())
            .or_insert_with(|| schubert_polynomial(&w));
        rest.sub_scaled(basis, coef);
        coefficients.insert(w, coef);
    }
    Err(SchubertError::NonTerminating(EXPANSION_CAP))
}

/// `c_{u,v}^w` by expanding `S_u . S_v` in the Schubert basis.
pub fn coefficient_expand(
    u: &Permutation,
    v: &Permutation,
    w: &Permutation,
) -> Result<BigUint, SchubertError> {
    if u.inversions() + v.inversions() != w.inversions() {
        return Ok(BigUint::ZERO);
    }
    let product = schubert_polynomial(u).mul(&schubert_polynomial(v));
    let expansion = expand_in_schubert_basis(&product)?;
    let coef = expansion.coefficient(w);
    if coef < 0 {
        return Err(SchubertError::NegativeResult(coef.into()));
    }
    Ok(BigUint::from(coef as u64))
}

/// Pipe-dream Kostka numbers with a lattice-count fallback for weights that
/// pin the tail of a large permutation.
struct KostkaProvider {
    tables: BTreeMap<Permutation, BTreeMap<WeightVector, u64>>,
}

impl KostkaProvider {
    fn new() -> Self {
        KostkaProvider {
            tables: BTreeMap::new(),
        }
    }

    fn query(&mut self, u: &Permutation, a: &WeightVector) -> u64 {
        if a.total() != u.inversions() {
            return 0;
        }
        let code = u.lehmer_code();
        // last row where the weight differs from the bottom weight
        let mu0 = (1..=code.support_max().max(a.entries().len()))
            .rev()
            .find(|&j| a.entry(j) != code.entry(j))
            .unwrap_or(0);
        let enumeration_cheap = u.len() <= 6 || self.tables.contains_key(u);
        if !enumeration_cheap && mu0 <= 5 {
            return kostka_by_lattice_count(u, a, mu0);
        }
        let table = self
            .tables
            .entry(u.clone())
            .or_insert_with(|| pipedreams::schubert_polynomial(u));
        table.get(a).copied().unwrap_or(0)
    }
}

/// Counts pipe dreams of `u` with weight `a` when `a` agrees with `code(u)`
/// beyond row `mu0`: ladder sequences supported in `L_mu0` whose `u`-weight
/// matches `a` on the first `mu0` rows.
fn kostka_by_lattice_count(u: &Permutation, a: &WeightVector, mu0: usize) -> u64 {
    let code = u.lehmer_code();
    let affine: Vec<AffineN> = (1..=mu0)
        .map(|j| AffineN {
            per_n: 0,
            constant: code.entry(j) as i64,
        })
        .collect();
    let caps: Vec<i64> = affine.iter().map(|c| c.constant).collect();
    let mut total = 0u64;
    for kappa in ladderseq::admissible_kappas(mu0, &caps) {
        let rows = ladderseq::compat_rows(&affine, mu0, &kappa, 0, kappa.len());
        let mut matrix: Vec<Vec<i64>> = Vec::with_capacity(rows.len() + 2 * mu0);
        let mut rhs: Vec<i64> = Vec::with_capacity(rows.len() + 2 * mu0);
        for row in rows {
            matrix.push(row.coeffs);
            rhs.push(row.rhs_n + row.rhs_const);
        }
        // weight equalities: c_j - landing sum + start sum = a_j
        for j in 1..=mu0 {
            let mut coeffs = vec![0i64; kappa.len()];
            for (t, idx) in kappa.iter().enumerate() {
                if idx.landing() == j {
                    coeffs[t] = 1;
                } else if idx.start() == j {
                    coeffs[t] = -1;
                }
            }
            let target = code.entry(j) as i64 - a.entry(j) as i64;
            matrix.push(coeffs.clone());
            rhs.push(target);
            matrix.push(coeffs.iter().map(|&c| -c).collect());
            rhs.push(-target);
        }
        let inst = polytopes::InstantiatedSystem {
            matrix,
            rhs,
            lower: vec![0; kappa.len()],
        };
        let count =
            polytopes::count_lattice_points(&inst).expect("compatibility systems are bounded");
        total += u64::try_from(count).expect("kostka count fits u64");
    }
    total
}

/// `c_{u,v}^w` by the Postnikov-Stanley alternating sum
/// over `sigma` of `K_{u,a} K_{v,b} K_{w_0 w, c}` with `a+b+c = sigma rho_n`.
///
/// Only `sigma` fixing every point beyond the largest nonzero code row can
/// contribute, so the sum runs over that subgroup.
pub fn coefficient_ps(
    u: &Permutation,
    v: &Permutation,
    w: &Permutation,
) -> Result<BigUint, SchubertError> {
    if u.inversions() + v.inversions() != w.inversions() {
        return Ok(BigUint::ZERO);
    }
    let n = u.len().max(v.len()).max(w.len()).max(1);
    let w0 = Permutation::longest_element(n);
    let w3 = w0.compose(w);
    let mu = polytopes::triple_mu(u, v, w);

    let table_u = pipedreams::schubert_polynomial(u);
    let table_v = pipedreams::schubert_polynomial(v);
    let mut kostka = KostkaProvider::new();

    let mut total = BigInt::ZERO;
    for sigma in Permutation::symmetric_group(mu) {
        let sign = sigma.sign();
        let mut sigma_total = BigInt::ZERO;
        for (a, ka) in &table_u {
            for (b, kb) in &table_v {
                let mut c = Vec::with_capacity(n);
                let mut ok = true;
                for j in 1..=n {
                    let r =
                        n as i64 - sigma.apply(j) as i64 - a.entry(j) as i64 - b.entry(j) as i64;
                    if r < 0 {
                        ok = false;
                        break;
                    }
                    c.push(r as usize);
                }
                if !ok {
                    continue;
                }
                let kc = kostka.query(&w3, &WeightVector::new(c));
                if kc > 0 {
                    sigma_total += BigInt::from(*ka) * BigInt::from(*kb) * BigInt::from(kc);
                }
            }
        }
        total += BigInt::from(sign) * sigma_total;
    }
    match total.sign() {
        Sign::Minus => Err(SchubertError::NegativeResult(total)),
        _ => Ok(total.to_biguint().expect("nonnegative")),
    }
}

/// Signed sum of `f_sigma(N)` over `sigma` in `S_mu`.
fn stretched_polytope(
    u: &Permutation,
    v: &Permutation,
    w: &Permutation,
    n: u64,
    threads: usize,
) -> Result<BigUint, SchubertError> {
    let mu = polytopes::triple_mu(u, v, w);
    let sigmas = Permutation::symmetric_group(mu);
    let terms: Vec<Result<BigInt, PolytopeError>> = if threads <= 1 || sigmas.len() <= 1 {
        sigmas
            .iter()
            .map(|sigma| {
                polytopes::f_sigma(u, v, w, sigma, n)
                    .map(|count| BigInt::from(sigma.sign()) * BigInt::from(count))
            })
            .collect()
    } else {
        let workers = threads.min(sigmas.len());
        let slots: Vec<Option<Result<BigInt, PolytopeError>>> =
            (0..sigmas.len()).map(|_| None).collect();
        let jobs = std::sync::Mutex::new((0usize, slots));
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let mine = {
                        let mut guard = jobs.lock().expect("job queue");
                        let next = guard.0;
                        if next >= sigmas.len() {
                            break;
                        }
                        guard.0 += 1;
                        next
                    };
                    let sigma = &sigmas[mine];
                    let term = polytopes::f_sigma(u, v, w, sigma, n)
                        .map(|count| BigInt::from(sigma.sign()) * BigInt::from(count));
                    jobs.lock().expect("job queue").1[mine] = Some(term);
                });
            }
        });
        jobs.into_inner()
            .expect("all workers joined")
            .1
            .into_iter()
            .map(|slot| slot.expect("every job completed"))
            .collect()
    };
    let mut total = BigInt::ZERO;
    for term in terms {
        total += term?;
    }
    match total.sign() {
        Sign::Minus => Err(SchubertError::NegativeResult(total)),
        _ => Ok(total.to_biguint().expect("nonnegative")),
    }
}

/// The stretched Schubert coefficient `c_{N*u, N*v}^{N*w}`.
pub fn stretched_coefficient(
    u: &Permutation,
    v: &Permutation,
    w: &Permutation,
    n: u64,
    method: Method,
) -> Result<BigUint, SchubertError> {
    stretched_coefficient_threaded(u, v, w, n, method, 1)
}

/// As [`stretched_coefficient`], with an explicit worker count for the
/// polytope method's sigma sum. Results are identical for every count.
pub fn stretched_coefficient_threaded(
    u: &Permutation,
    v: &Permutation,
    w: &Permutation,
    n: u64,
    method: Method,
    threads: usize,
) -> Result<BigUint, SchubertError> {
    assert!(n >= 1, "stretch factor must be positive");
    if u.inversions() + v.inversions() != w.inversions() {
        return Ok(BigUint::ZERO);
    }
    match method {
        Method::Polytope => stretched_polytope(u, v, w, n, threads),
        Method::Ps => coefficient_ps(&u.stretch(n), &v.stretch(n), &w.stretch(n)),
        Method::Expand => coefficient_expand(&u.stretch(n), &v.stretch(n), &w.stretch(n)),
    }
}

/// Stretched Schubert-Kostka number `K_{N*u, N a}`.
pub fn stretched_kostka(u: &Permutation, a: &WeightVector, n: u64) -> BigUint {
    assert!(n >= 1, "stretch factor must be positive");
    if a.total() != u.inversions() {
        return BigUint::ZERO;
    }
    let stretched = u.stretch(n);
    let scaled = WeightVector::new(a.entries().iter().map(|&e| e * n as usize).collect());
    let mut provider = KostkaProvider::new();
    BigUint::from(provider.query(&stretched, &scaled))
}
