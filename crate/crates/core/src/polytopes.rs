//! Exact integer-point counting for instantiated systems and assembly of the
//! triple systems whose counts give `f_sigma(N)`.
//!
//! The counting backend is a depth-first enumeration over a variable box
//! obtained by interval propagation, with per-level constraint tightening. It
//! sits behind plain functions so a generating-function counter can replace
//! it later without touching callers.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ladderseq::{
    admissible_kappas, compat_rows, AffineN, LadderIndex, ParametricSystem, SystemRow,
};
use crate::permutations::Permutation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    /// No finite bounding box can be derived for some variable.
    #[error("system is unbounded in variable {0}")]
    Unbounded(usize),
    /// Sigma moves a point beyond the row bound `mu`.
    #[error("sigma moves a point beyond mu = {0}")]
    BadSigma(usize),
    /// A support index lands beyond the row bound `mu`.
    #[error("support index {0} lands beyond mu = {1}")]
    BadKappa(String, usize),
}

/// A concrete integer system `A x <= rhs`, `x >= lower`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstantiatedSystem {
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<i64>>,
    pub rhs: Vec<i64>,
    pub lower: Vec<i64>,
}

/// Substitutes the parameter: `rhs = N c + b`. The matrix does not depend on `N`.
pub fn instantiate(sys: &ParametricSystem, n: u64) -> InstantiatedSystem {
    let rhs = sys
        .n_coef
        .iter()
        .zip(&sys.constant)
        .map(|(&c, &b)| {
            c.checked_mul(n as i64)
                .and_then(|v| v.checked_add(b))
                .expect("rhs overflow")
        })
        .collect();
    InstantiatedSystem {
        matrix: sys.matrix.clone(),
        rhs,
        lower: vec![0; sys.vars.len()],
    }
}

/// Least `x` with `-den_pos * x <= num`, i.e. `x >= -num / den_pos` rounded up.
fn lower_from_negative_row(num: i64, den_pos: i64) -> i64 {
    debug_assert!(den_pos > 0);
    -num.div_euclid(den_pos)
}

/// Per-variable lower and upper bounds.
type VariableBox = (Vec<i64>, Vec<i64>);

/// Derives per-variable bounds by iterated interval propagation.
/// Returns `None` when propagation proves the system empty.
fn propagate_box(sys: &InstantiatedSystem) -> Result<Option<VariableBox>, PolytopeError> {
    let dim = sys.lower.len();
    let mut lo = sys.lower.clone();
    let mut hi: Vec<Option<i64>> = vec![None; dim];
    for _round in 0..64 {
        let mut changed = false;
        for (row, &rhs) in sys.matrix.iter().zip(&sys.rhs) {
            for t in 0..dim {
                let a = row[t];
                if a == 0 {
                    continue;
                }
                let mut bound = rhs;
                let mut indeterminate = false;
                for s in 0..dim {
                    if s == t {
                        continue;
                    }
                    let c = row[s];
                    if c > 0 {
                        bound -= c * lo[s];
                    } else if c < 0 {
                        match hi[s] {
                            Some(h) => bound -= c * h,
                            None => {
                                indeterminate = true;
                                break;
                            }
                        }
                    }
                }
                if indeterminate {
                    continue;
                }
                if a > 0 {
                    let b = bound.div_euclid(a);
                    if hi[t].is_none_or(|h| b < h) {
                        hi[t] = Some(b);
                        changed = true;
                    }
                } else {
                    // a x <= bound with a < 0 lifts the lower bound
                    let b = lower_from_negative_row(bound, -a);
                    if b > lo[t] {
                        lo[t] = b;
                        changed = true;
                    }
                }
            }
        }
        for t in 0..dim {
            if let Some(h) = hi[t] {
                if h < lo[t] {
                    return Ok(None);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut upper = Vec::with_capacity(dim);
    for (t, bound) in hi.iter().enumerate() {
        match bound {
            Some(h) => upper.push(*h),
            None => return Err(PolytopeError::Unbounded(t)),
        }
    }
    Ok(Some((lo, upper)))
}

fn solve(
    sys: &InstantiatedSystem,
    mut collect: Option<&mut Vec<Vec<i64>>>,
) -> Result<BigUint, PolytopeError> {
    let dim = sys.lower.len();
    let Some((lo, hi)) = propagate_box(sys)? else {
        return Ok(BigUint::ZERO);
    };
    let rows = sys.matrix.len();
    // suffix_min[r][t]: least possible contribution of variables t.. to row r
    let mut suffix_min = vec![vec![0i64; dim + 1]; rows];
    for (row, mins) in sys.matrix.iter().zip(&mut suffix_min) {
        for t in (0..dim).rev() {
            let a = row[t];
            let least = if a >= 0 { a * lo[t] } else { a * hi[t] };
            mins[t] = mins[t + 1] + least;
        }
    }

    struct Dfs<'a> {
        sys: &'a InstantiatedSystem,
        lo: Vec<i64>,
        hi: Vec<i64>,
        suffix_min: Vec<Vec<i64>>,
        point: Vec<i64>,
        partial: Vec<i64>,
        count: BigUint,
    }

    impl Dfs<'_> {
        fn run(&mut self, depth: usize, collect: &mut Option<&mut Vec<Vec<i64>>>) {
            let dim = self.lo.len();
            for r in 0..self.sys.matrix.len() {
                if self.partial[r] + self.suffix_min[r][depth] > self.sys.rhs[r] {
                    return;
                }
            }
            if depth == dim {
                self.count += 1u32;
                if let Some(points) = collect {
                    points.push(self.point.clone());
                }
                return;
            }
            // tighten this variable against every row it appears in
            let mut lo_t = self.lo[depth];
            let mut hi_t = self.hi[depth];
            for (r, row) in self.sys.matrix.iter().enumerate() {
                let a = row[depth];
                if a == 0 {
                    continue;
                }
                let residual = self.sys.rhs[r] - self.partial[r] - self.suffix_min[r][depth + 1];
                if a > 0 {
                    hi_t = hi_t.min(residual.div_euclid(a));
                } else {
                    lo_t = lo_t.max(lower_from_negative_row(residual, -a));
                }
            }
            if lo_t > hi_t {
                return;
            }
            if depth + 1 == dim && collect.is_none() {
                // the prune above already validated rows without x_t
                self.count += BigUint::from((hi_t - lo_t + 1) as u64);
                return;
            }
            for v in lo_t..=hi_t {
                self.point[depth] = v;
                for (r, row) in self.sys.matrix.iter().enumerate() {
                    self.partial[r] += row[depth] * v;
                }
                self.run(depth + 1, collect);
                for (r, row) in self.sys.matrix.iter().enumerate() {
                    self.partial[r] -= row[depth] * v;
                }
            }
            self.point[depth] = 0;
        }
    }

    let mut dfs = Dfs {
        sys,
        lo,
        hi,
        suffix_min,
        point: vec![0; dim],
        partial: vec![0; rows],
        count: BigUint::ZERO,
    };
    dfs.run(0, &mut collect);
    Ok(dfs.count)
}

/// Exact number of integer points satisfying all rows and the lower bounds.
pub fn count_lattice_points(sys: &InstantiatedSystem) -> Result<BigUint, PolytopeError> {
    solve(sys, None)
}

/// All integer points, in lexicographic order of the variable vector.
pub fn enumerate_lattice_points(sys: &InstantiatedSystem) -> Result<Vec<Vec<i64>>, PolytopeError> {
    let mut points = Vec::new();
    solve(sys, Some(&mut points))?;
    Ok(points)
}

/// Affine code entries of a plain permutation: `c_j(N*u) = N c_j(u)`.
fn plain_code(u: &Permutation, mu: usize) -> Vec<AffineN> {
    let code = u.lehmer_code();
    (1..=mu)
        .map(|j| AffineN {
            per_n: code.entry(j) as i64,
            constant: 0,
        })
        .collect()
}

/// Affine code entries of `hat w = hat w_0 . (N*w)` inside `S_{Nn}`:
/// `c_j(hat w) = N (n - c_j(w)) - j`.
fn hat_w_code(w: &Permutation, n: usize, mu: usize) -> Vec<AffineN> {
    let code = w.lehmer_code();
    (1..=mu)
        .map(|j| AffineN {
            per_n: (n - code.entry(j)) as i64,
            constant: -(j as i64),
        })
        .collect()
}

/// The three compatibility systems of a `(kappa_1, kappa_2, kappa_3)` class
/// joined with the `2 mu` weight-equality rows, as one parametric system over
/// the concatenated `(x, y, z)` variables.
#[derive(Clone, Debug)]
pub struct TripleSystem {
    pub system: ParametricSystem,
    pub kappas: [Vec<LadderIndex>; 3],
    pub sigma: Permutation,
    pub mu: usize,
}

/// Row bound shared by `u`, `v`, `w`: the largest row with a nonzero code entry.
pub fn triple_mu(u: &Permutation, v: &Permutation, w: &Permutation) -> usize {
    u.lehmer_code()
        .support_max()
        .max(v.lehmer_code().support_max())
        .max(w.lehmer_code().support_max())
}

fn weight_rows(
    codes: &[Vec<AffineN>; 3],
    kappas: [&[LadderIndex]; 3],
    sigma: &Permutation,
    mu: usize,
    ambient: usize,
) -> Vec<SystemRow> {
    let total: usize = kappas.iter().map(|k| k.len()).sum();
    let mut rows = Vec::with_capacity(2 * mu);
    for j in 1..=mu {
        let mut coeffs = vec![0i64; total];
        let mut off = 0;
        for kappa in kappas {
            for (t, idx) in kappa.iter().enumerate() {
                if idx.landing() == j {
                    coeffs[off + t] = 1;
                } else if idx.start() == j {
                    coeffs[off + t] = -1;
                }
            }
            off += kappa.len();
        }
        // sum of landings minus sum of starts = sum_k c_j(block) - N n + sigma(j)
        let rhs_n: i64 = codes.iter().map(|c| c[j - 1].per_n).sum::<i64>() - ambient as i64;
        let rhs_const: i64 =
            codes.iter().map(|c| c[j - 1].constant).sum::<i64>() + sigma.apply(j) as i64;
        rows.push(SystemRow {
            coeffs: coeffs.clone(),
            rhs_n,
            rhs_const,
        });
        rows.push(SystemRow {
            coeffs: coeffs.iter().map(|&a| -a).collect(),
            rhs_n: -rhs_n,
            rhs_const: -rhs_const,
        });
    }
    rows
}

fn merge_blocks(
    codes: &[Vec<AffineN>; 3],
    kappas: [&[LadderIndex]; 3],
    sigma: &Permutation,
    mu: usize,
    ambient: usize,
) -> ParametricSystem {
    let total: usize = kappas.iter().map(|k| k.len()).sum();
    let mut rows = Vec::new();
    let mut off = 0;
    for (code, kappa) in codes.iter().zip(kappas) {
        rows.extend(compat_rows(code, mu, kappa, off, total));
        off += kappa.len();
    }
    rows.extend(weight_rows(codes, kappas, sigma, mu, ambient));
    let vars = kappas.iter().flat_map(|k| k.iter().cloned()).collect();
    ParametricSystem::from_rows(vars, rows)
}

/// Assembles the parametric system for one `(sigma, kappa_1, kappa_2, kappa_3)`
/// class of the triple decomposition.
pub fn triple_system(
    u: &Permutation,
    v: &Permutation,
    w: &Permutation,
    sigma: &Permutation,
    kappa1: &[LadderIndex],
    kappa2: &[LadderIndex],
    kappa3: &[LadderIndex],
) -> Result<TripleSystem, PolytopeError> {
    let mu = triple_mu(u, v, w);
    if sigma.len() > mu {
        return Err(PolytopeError::BadSigma(mu));
    }
    let ambient = u.len().max(v.len()).max(w.len()).max(1);
    let mut kappas = [kappa1.to_vec(), kappa2.to_vec(), kappa3.to_vec()];
    for kappa in &mut kappas {
        kappa.sort();
        kappa.dedup();
        for idx in kappa.iter() {
            if idx.landing() > mu {
                return Err(PolytopeError::BadKappa(idx.to_string(), mu));
            }
        }
    }
    let codes = [
        plain_code(u, mu),
        plain_code(v, mu),
        hat_w_code(w, ambient, mu),
    ];
    let system = merge_blocks(
        &codes,
        [&kappas[0], &kappas[1], &kappas[2]],
        sigma,
        mu,
        ambient,
    );
    Ok(TripleSystem {
        system,
        kappas,
        sigma: sigma.clone(),
        mu,
    })
}

/// Cached per-support data for the triple-sum loop.
struct KappaClass {
    kappa: Vec<LadderIndex>,
    rows: Vec<SystemRow>,
    landing_count: Vec<i64>,
    landing_capsum: Vec<i64>,
    start_count: Vec<i64>,
    start_capsum: Vec<i64>,
}

fn kappa_classes(code: &[AffineN], mu: usize, n: u64) -> Vec<KappaClass> {
    let caps: Vec<i64> = code.iter().map(|c| c.eval(n).max(0)).collect();
    admissible_kappas(mu, &caps)
        .into_iter()
        .map(|kappa| {
            let rows = compat_rows(code, mu, &kappa, 0, kappa.len());
            let mut landing_count = vec![0i64; mu + 1];
            let mut landing_capsum = vec![0i64; mu + 1];
            let mut start_count = vec![0i64; mu + 1];
            let mut start_capsum = vec![0i64; mu + 1];
            for idx in &kappa {
                landing_count[idx.landing()] += 1;
                start_count[idx.start()] += 1;
                start_capsum[idx.start()] += caps[idx.landing() - 1];
            }
            for j in 1..=mu {
                if landing_count[j] > 0 {
                    landing_capsum[j] = caps[j - 1];
                }
            }
            KappaClass {
                kappa,
                rows,
                landing_count,
                landing_capsum,
                start_count,
                start_capsum,
            }
        })
        .collect()
}

/// `f_sigma(N) = |A_sigma^N|`: the number of pipe-dream triples for
/// `(N*u, N*v, hat w_0 (N*w))` whose weights sum to `sigma rho_hat`, computed
/// as a sum of lattice-point counts over admissible support classes.
pub fn f_sigma(
    u: &Permutation,
    v: &Permutation,
    w: &Permutation,
    sigma: &Permutation,
    n: u64,
) -> Result<BigUint, PolytopeError> {
    let mu = triple_mu(u, v, w);
    if sigma.len() > mu {
        return Err(PolytopeError::BadSigma(mu));
    }
    let ambient = u.len().max(v.len()).max(w.len()).max(1);
    let codes = [
        plain_code(u, mu),
        plain_code(v, mu),
        hat_w_code(w, ambient, mu),
    ];
    #[cfg(debug_assertions)]
    {
        // the symbolic code of hat w must agree with the composed permutation
        let hat = Permutation::longest_element(ambient * n as usize).compose(&w.stretch(n));
        let code = hat.lehmer_code();
        for (j, affine) in codes[2].iter().enumerate() {
            debug_assert_eq!(affine.eval(n), code.entry(j + 1) as i64);
        }
    }
    let classes: Vec<Vec<KappaClass>> = codes
        .iter()
        .map(|code| kappa_classes(code, mu, n))
        .collect();

    // weight-equality right-hand sides at this N
    let rhs: Vec<i64> = (1..=mu)
        .map(|j| {
            let per_n: i64 = codes.iter().map(|c| c[j - 1].per_n).sum::<i64>() - ambient as i64;
            let constant: i64 =
                codes.iter().map(|c| c[j - 1].constant).sum::<i64>() + sigma.apply(j) as i64;
            per_n * n as i64 + constant
        })
        .collect();

    let mut total = BigUint::ZERO;
    for c1 in &classes[0] {
        for c2 in &classes[1] {
            'third: for c3 in &classes[2] {
                // cheap box test on each weight-equality row
                for j in 1..=mu {
                    let l_min = c1.landing_count[j] + c2.landing_count[j] + c3.landing_count[j];
                    let l_max = c1.landing_capsum[j] + c2.landing_capsum[j] + c3.landing_capsum[j];
                    let s_min = c1.start_count[j] + c2.start_count[j] + c3.start_count[j];
                    let s_max = c1.start_capsum[j] + c2.start_capsum[j] + c3.start_capsum[j];
                    if rhs[j - 1] < l_min - s_max || rhs[j - 1] > l_max - s_min {
                        continue 'third;
                    }
                }
                total += count_triple_class(&codes, [c1, c2, c3], sigma, mu, ambient, n)?;
            }
        }
    }
    Ok(total)
}

fn count_triple_class(
    codes: &[Vec<AffineN>; 3],
    classes: [&KappaClass; 3],
    sigma: &Permutation,
    mu: usize,
    ambient: usize,
    n: u64,
) -> Result<BigUint, PolytopeError> {
    let total: usize = classes.iter().map(|c| c.kappa.len()).sum();
    let sizes = [
        classes[0].kappa.len(),
        classes[1].kappa.len(),
        classes[2].kappa.len(),
    ];
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    let mut off = 0;
    for (b, class) in classes.iter().enumerate() {
        for row in &class.rows {
            let mut coeffs = vec![0i64; total];
            coeffs[off..off + sizes[b]].copy_from_slice(&row.coeffs);
            matrix.push(coeffs);
            rhs.push(row.rhs_n * n as i64 + row.rhs_const);
        }
        off += sizes[b];
    }
    let kappas = [
        classes[0].kappa.as_slice(),
        classes[1].kappa.as_slice(),
        classes[2].kappa.as_slice(),
    ];
    for row in weight_rows(codes, kappas, sigma, mu, ambient) {
        matrix.push(row.coeffs);
        rhs.push(row.rhs_n * n as i64 + row.rhs_const);
    }
    let inst = InstantiatedSystem {
        matrix,
        rhs,
        lower: vec![0; total],
    };
    count_lattice_points(&inst)
}
