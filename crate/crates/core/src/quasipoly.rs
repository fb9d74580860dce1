//! Detection and representation of eventual quasi-polynomial behavior in
//! exact integer sequences.
//!
//! A fit is a certificate about the supplied data only, never a proof of
//! eventual behavior: output is labelled by the largest argument it was
//! verified against.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuasiPolyError {
    /// No candidate (period, offset, degree) within the caps explains the data.
    #[error(
        "no quasi-polynomial within period <= {max_period}, degree <= {max_degree} fits the data"
    )]
    NoFit {
        max_period: usize,
        max_degree: usize,
    },
    /// Too few data points for every candidate within the caps.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// Evaluation produced a non-integer; indicates a corrupted certificate.
    #[error("evaluation at {0} is not an integer")]
    NonIntegral(u64),
}

/// `f(N) = g_{N mod m}(N)` for all `N >= offset`, with rational-coefficient
/// polynomials `g_0, ..., g_{m-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiPolynomial {
    period: usize,
    offset: u64,
    /// `polys[r]` are the coefficients of `g_r`, low degree first.
    polys: Vec<Vec<BigRational>>,
    degree: usize,
    verified_through: u64,
}

impl QuasiPolynomial {
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest argument the certificate was checked against.
    pub fn verified_through(&self) -> u64 {
        self.verified_through
    }

    pub fn poly(&self, residue: usize) -> &[BigRational] {
        &self.polys[residue]
    }

    /// `g_{N mod m}(N)`, exact; errors if the value is not an integer.
    pub fn evaluate(&self, n: u64) -> Result<BigInt, QuasiPolyError> {
        debug_assert!(
            n >= self.offset,
            "evaluation below the offset is unspecified"
        );
        let residue = (n % self.period as u64) as usize;
        let value = eval_poly(&self.polys[residue], &BigRational::from(BigInt::from(n)));
        if value.is_integer() {
            Ok(value.to_integer())
        } else {
            Err(QuasiPolyError::NonIntegral(n))
        }
    }
}

impl Serialize for QuasiPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("QuasiPolynomial", 4)?;
        s.serialize_field("period", &self.period)?;
        s.serialize_field("offset", &self.offset)?;
        let polys: Vec<Vec<String>> = self
            .polys
            .iter()
            .map(|p| p.iter().map(|c| c.to_string()).collect())
            .collect();
        s.serialize_field("polys", &polys)?;
        s.serialize_field("verified_through", &self.verified_through)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for QuasiPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            period: usize,
            offset: u64,
            polys: Vec<Vec<String>>,
            verified_through: u64,
        }
        let repr = Repr::deserialize(deserializer)?;
        let polys: Result<Vec<Vec<BigRational>>, _> = repr
            .polys
            .iter()
            .map(|p| p.iter().map(|c| c.parse::<BigRational>()).collect())
            .collect();
        let polys = polys.map_err(serde::de::Error::custom)?;
        let degree = polys
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0);
        Ok(QuasiPolynomial {
            period: repr.period,
            offset: repr.offset,
            polys,
            degree,
            verified_through: repr.verified_through,
        })
    }
}

impl fmt::Display for QuasiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "period {} offset {} degree {} (consistent with data through N = {})",
            self.period, self.offset, self.degree, self.verified_through
        )
    }
}

fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Newton interpolation through `points`, returned as monomial coefficients
/// (low degree first) with exact rational arithmetic.
fn newton_interpolate(points: &[(u64, BigInt)]) -> Vec<BigRational> {
    // divided differences
    let xs: Vec<BigRational> = points
        .iter()
        .map(|(x, _)| BigRational::from(BigInt::from(*x)))
        .collect();
    let mut table: Vec<BigRational> = points
        .iter()
        .map(|(_, y)| BigRational::from(y.clone()))
        .collect();
    let mut coeffs_newton = vec![table[0].clone()];
    for order in 1..points.len() {
        for t in 0..points.len() - order {
            let num = table[t + 1].clone() - table[t].clone();
            let den = xs[t + order].clone() - xs[t].clone();
            table[t] = num / den;
        }
        table.truncate(points.len() - order);
        coeffs_newton.push(table[0].clone());
    }
    // expand the Newton form into monomial coefficients
    let mut mono = vec![BigRational::zero(); points.len()];
    let mut basis = vec![BigRational::one()]; // product of (x - x_t)
    for (order, c) in coeffs_newton.iter().enumerate() {
        for (d, b) in basis.iter().enumerate() {
            mono[d] += c * b;
        }
        if order + 1 < points.len() {
            // multiply basis by (x - xs[order])
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (d, b) in basis.iter().enumerate() {
                next[d + 1] += b;
                next[d] -= b * &xs[order];
            }
            basis = next;
        }
    }
    while mono.last().is_some_and(Zero::is_zero) {
        mono.pop();
    }
    if mono.is_empty() {
        mono.push(BigRational::zero());
    }
    mono
}

/// Fits the least (period, then offset, then degree) quasi-polynomial that
/// interpolates and re-verifies on every data point at or beyond the offset.
///
/// `seq` must be defined on a contiguous range `1..=N_max`. Every residue
/// class of a successful candidate retains at least `degree + 2` points, so
/// at least one point per class re-verifies the interpolation.
pub fn fit(
    seq: &BTreeMap<u64, BigInt>,
    max_period: usize,
    max_degree: usize,
) -> Result<QuasiPolynomial, QuasiPolyError> {
    let n_max = match seq.keys().max() {
        Some(&n) => n,
        None => return Err(QuasiPolyError::InsufficientData("empty sequence".into())),
    };
    if seq.len() as u64 != n_max || !(1..=n_max).all(|n| seq.contains_key(&n)) {
        return Err(QuasiPolyError::InsufficientData(format!(
            "sequence must cover 1..={n_max} contiguously"
        )));
    }
    let mut any_candidate = false;
    for period in 1..=max_period {
        for offset in 1..=n_max {
            let mut polys: Vec<Vec<BigRational>> = Vec::with_capacity(period);
            let mut degree = 0usize;
            let mut feasible = true;
            let mut fits = true;
            for residue in 0..period {
                let points: Vec<(u64, BigInt)> = (offset..=n_max)
                    .filter(|n| (*n % period as u64) as usize == residue)
                    .map(|n| (n, seq[&n].clone()))
                    .collect();
                if points.len() < 2 {
                    feasible = false;
                    break;
                }
                let coeffs = newton_interpolate(&points);
                let d = coeffs.len() - 1;
                // demand one spare point beyond the interpolation degree
                if d + 2 > points.len() || d > max_degree {
                    fits = false;
                    break;
                }
                degree = degree.max(d);
                polys.push(coeffs);
            }
            if !feasible {
                continue;
            }
            any_candidate = true;
            if fits {
                return Ok(QuasiPolynomial {
                    period,
                    offset,
                    polys,
                    degree,
                    verified_through: n_max,
                });
            }
        }
    }
    if any_candidate {
        Err(QuasiPolyError::NoFit {
            max_period,
            max_degree,
        })
    } else {
        Err(QuasiPolyError::InsufficientData(format!(
            "no candidate (period <= {max_period}) keeps two points per residue class"
        )))
    }
}

/// A rational generating function `numer(t) / (1 - t^period)^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingFunction {
    /// Coefficients of the numerator, `t^0` first.
    pub numer: Vec<BigInt>,
    /// The base of the denominator factor `1 - t^period`.
    pub period: usize,
    /// The power of the denominator factor.
    pub power: usize,
}

impl Serialize for GeneratingFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GeneratingFunction", 3)?;
        let numer: Vec<String> = self.numer.iter().map(BigInt::to_string).collect();
        s.serialize_field("numer", &numer)?;
        s.serialize_field("period", &self.period)?;
        s.serialize_field("power", &self.power)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for GeneratingFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            numer: Vec<String>,
            period: usize,
            power: usize,
        }
        let repr = Repr::deserialize(deserializer)?;
        let numer: Result<Vec<BigInt>, _> = repr.numer.iter().map(|s| s.parse()).collect();
        Ok(GeneratingFunction {
            numer: numer.map_err(serde::de::Error::custom)?,
            period: repr.period,
            power: repr.power,
        })
    }
}

impl GeneratingFunction {
    /// Series expansion to order `n_max` inclusive: coefficients of
    /// `t^0 .. t^{n_max}`.
    pub fn series(&self, n_max: u64) -> Vec<BigInt> {
        let len = n_max as usize + 1;
        let mut out = vec![BigInt::ZERO; len];
        for (d, c) in self.numer.iter().enumerate() {
            if d < len {
                out[d] += c;
            }
        }
        // repeatedly convolve with 1/(1 - t^period) = sum t^{k period}
        for _ in 0..self.power {
            for d in self.period..len {
                let prev = out[d - self.period].clone();
                out[d] += prev;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.numer.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for GeneratingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .numer
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| match d {
                0 => c.to_string(),
                _ if c.is_one() => format!("t^{d}"),
                _ => format!("{c} t^{d}"),
            })
            .collect();
        write!(f, "({})", terms.join(" + "))?;
        if self.power > 0 {
            if self.period == 1 {
                write!(f, " / (1 - t)^{}", self.power)?;
            } else {
                write!(f, " / (1 - t^{})^{}", self.period, self.power)?;
            }
        }
        Ok(())
    }
}

/// Finite differences of the integer sequence `h(0), h(1), ...`:
/// returns `Delta^k h(0)` for `k = 0..len`.
fn finite_differences(values: &[BigInt]) -> Vec<BigInt> {
    let mut work = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while !work.is_empty() {
        out.push(work[0].clone());
        for t in 0..work.len() - 1 {
            work[t] = &work[t + 1] - &work[t];
        }
        work.pop();
    }
    out
}

/// The generating function `sum_{N >= 1} f(N) t^N` of the certified function:
/// `prefix` supplies the exceptional values below the offset (and must agree
/// with the certificate wherever both are defined).
pub fn generating_function(
    q: &QuasiPolynomial,
    prefix: &BTreeMap<u64, BigInt>,
) -> GeneratingFunction {
    let m = q.period;
    let degree = q.degree;
    let power = degree + 1;
    let mut numer: Vec<BigInt> = Vec::new();
    let mut bump = |d: usize, v: BigInt| {
        if numer.len() <= d {
            numer.resize(d + 1, BigInt::ZERO);
        }
        numer[d] += v;
    };
    // exceptional prefix, multiplied by the full denominator
    let denom_poly = {
        // (1 - y)^power with y = t^m
        let mut coeffs = vec![BigInt::ZERO; power * m + 1];
        let mut binom = BigInt::from(1);
        for k in 0..=power {
            coeffs[k * m] = if k % 2 == 0 {
                binom.clone()
            } else {
                -binom.clone()
            };
            binom = binom * (power - k) / (k + 1);
        }
        coeffs
    };
    for n in 1..q.offset {
        let value = match prefix.get(&n) {
            Some(v) => v.clone(),
            None => panic!("prefix must supply f({n}) below the offset"),
        };
        for (d, c) in denom_poly.iter().enumerate() {
            if !c.is_zero() {
                bump(n as usize + d, c * &value);
            }
        }
    }
    // each residue class contributes t^{N_r} numer_r(t^m) (1 - t^m)^{degree - d_r}
    for residue in 0..m {
        let first = (q.offset..)
            .find(|n| (*n % m as u64) as usize == residue)
            .expect("every residue class appears");
        debug_assert!(
            prefix
                .get(&first)
                .is_none_or(|v| { q.evaluate(first).map(|e| e == *v).unwrap_or(false) }),
            "prefix must agree with the certificate on overlap"
        );
        let coeffs = &q.polys[residue];
        let d_r = coeffs.len() - 1;
        // h(s) = g_r(first + m s), integer valued on s >= 0
        let samples: Vec<BigInt> = (0..=d_r as u64)
            .map(|s| {
                let x = BigRational::from(BigInt::from(first + m as u64 * s));
                let v = eval_poly(coeffs, &x);
                debug_assert!(v.is_integer(), "class polynomial is integer valued");
                v.to_integer()
            })
            .collect();
        let diffs = finite_differences(&samples);
        // sum_s h(s) y^s = sum_k diffs[k] y^k / (1-y)^{k+1}
        //   -> numerator over (1-y)^{power}: diffs[k] y^k (1-y)^{power-1-k}
        for (k, diff) in diffs.iter().enumerate() {
            if diff.is_zero() {
                continue;
            }
            let reps = power - 1 - k;
            let mut binom = BigInt::from(1);
            for s in 0..=reps {
                let signed = if s % 2 == 0 {
                    binom.clone()
                } else {
                    -binom.clone()
                };
                bump(first as usize + (k + s) * m, signed * diff);
                if s < reps {
                    binom = binom * (reps - s) / (s + 1);
                }
            }
        }
    }
    while numer.last().is_some_and(Zero::is_zero) {
        numer.pop();
    }
    GeneratingFunction {
        numer,
        period: m,
        power,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_of(values: &[i64]) -> BTreeMap<u64, BigInt> {
        values
            .iter()
            .enumerate()
            .map(|(t, &v)| (t as u64 + 1, BigInt::from(v)))
            .collect()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn fit_linear() {
        let seq = seq_of(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let q = fit(&seq, 4, 6).unwrap();
        assert_eq!(q.period(), 1);
        assert_eq!(q.offset(), 1);
        assert_eq!(q.degree(), 1);
        assert_eq!(q.poly(0), &[rat(-1), rat(1)]);
        assert_eq!(q.evaluate(100).unwrap(), BigInt::from(99));
    }

    #[test]
    fn fit_constant() {
        let seq = seq_of(&[1, 1, 1, 1, 1, 1]);
        let q = fit(&seq, 3, 3).unwrap();
        assert_eq!((q.period(), q.offset(), q.degree()), (1, 1, 0));
        assert_eq!(q.evaluate(50).unwrap(), BigInt::from(1));
    }

    #[test]
    fn fit_alternating() {
        let seq = seq_of(&[1, 0, 1, 0, 1, 0, 1, 0]);
        let q = fit(&seq, 4, 4).unwrap();
        assert_eq!((q.period(), q.offset(), q.degree()), (2, 1, 0));
        assert_eq!(q.poly(0), &[rat(0)]);
        assert_eq!(q.poly(1), &[rat(1)]);
        assert_eq!(q.evaluate(7).unwrap(), BigInt::from(1));
    }

    #[test]
    fn fit_with_offset() {
        // irregular head, then constant
        let seq = seq_of(&[17, 5, 5, 5, 5, 5]);
        let q = fit(&seq, 3, 3).unwrap();
        assert_eq!((q.period(), q.offset(), q.degree()), (1, 2, 0));
    }

    #[test]
    fn fit_rejects_exponential() {
        let seq = seq_of(&[1, 2, 4, 8, 16, 32, 64, 128]);
        assert!(matches!(fit(&seq, 2, 3), Err(QuasiPolyError::NoFit { .. })));
    }

    #[test]
    fn fit_insufficient_data() {
        let seq = seq_of(&[1]);
        assert!(matches!(
            fit(&seq, 2, 3),
            Err(QuasiPolyError::InsufficientData(_))
        ));
        let gap: BTreeMap<u64, BigInt> = [(1u64, 1), (3u64, 2)]
            .iter()
            .map(|&(n, v)| (n, BigInt::from(v)))
            .collect();
        assert!(matches!(
            fit(&gap, 2, 3),
            Err(QuasiPolyError::InsufficientData(_))
        ));
    }

    #[test]
    fn fit_minimality() {
        // a genuinely period-2 sequence never fits with period 1
        let seq = seq_of(&[1, 3, 1, 3, 1, 3, 1, 3]);
        let q = fit(&seq, 4, 1).unwrap();
        assert_eq!(q.period(), 2);
        // tightening the caps below the certificate leaves nothing
        assert!(matches!(
            fit(&seq, q.period() - 1, 1),
            Err(QuasiPolyError::NoFit { .. })
        ));
        // degree cap 0 with period 1 would have matched a constant; check order:
        let constant = seq_of(&[4, 4, 4, 4, 4, 4]);
        let q = fit(&constant, 4, 4).unwrap();
        assert_eq!((q.period(), q.offset()), (1, 1));
    }

    #[test]
    fn fit_roundtrip_on_data() {
        let seq = seq_of(&[3, 1, 4, 1, 5, 13, 21, 31, 43, 57, 73, 91]);
        // f(N) = N^2 + N + 1 from N = 5 on
        let q = fit(&seq, 3, 4).unwrap();
        for (n, v) in &seq {
            if *n >= q.offset() {
                assert_eq!(q.evaluate(*n).unwrap(), v.clone());
            }
        }
    }

    #[test]
    fn generating_function_linear() {
        let seq = seq_of(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let q = fit(&seq, 2, 3).unwrap();
        let gf = generating_function(&q, &seq);
        // t^2 / (1-t)^2
        assert_eq!(gf.period, 1);
        assert_eq!(gf.power, 2);
        assert_eq!(gf.numer, vec![BigInt::ZERO, BigInt::ZERO, BigInt::from(1)]);
        let series = gf.series(10);
        for n in 1..=10u64 {
            assert_eq!(series[n as usize], BigInt::from(n as i64 - 1), "N={n}");
        }
    }

    #[test]
    fn generating_function_constant_and_zero() {
        let ones = seq_of(&[1, 1, 1, 1, 1]);
        let q = fit(&ones, 2, 2).unwrap();
        let gf = generating_function(&q, &ones);
        assert_eq!((gf.period, gf.power), (1, 1));
        assert_eq!(gf.numer, vec![BigInt::ZERO, BigInt::from(1)]);

        let zeros = seq_of(&[0, 0, 0, 0]);
        let q = fit(&zeros, 2, 2).unwrap();
        let gf = generating_function(&q, &zeros);
        assert!(gf.is_zero());
    }

    #[test]
    fn generating_function_with_prefix_and_period() {
        let values = [9, 0, 1, 0, 1, 0, 1, 0, 1, 0];
        let seq = seq_of(&values);
        let q = fit(&seq, 3, 3).unwrap();
        assert_eq!(q.offset(), 2);
        assert_eq!(q.period(), 2);
        let gf = generating_function(&q, &seq);
        let series = gf.series(values.len() as u64);
        for (t, &v) in values.iter().enumerate() {
            assert_eq!(series[t + 1], BigInt::from(v), "N={}", t + 1);
        }
    }

    #[test]
    fn series_matches_data_generic() {
        let values = [2, 7, 4, 13, 6, 19, 8, 25, 10, 31];
        let seq = seq_of(&values);
        let q = fit(&seq, 4, 3).unwrap();
        let gf = generating_function(&q, &seq);
        let series = gf.series(values.len() as u64);
        for (t, &v) in values.iter().enumerate() {
            assert_eq!(series[t + 1], BigInt::from(v), "N={}", t + 1);
        }
    }

    #[test]
    fn evaluate_integrality_guard() {
        let q = QuasiPolynomial {
            period: 1,
            offset: 1,
            polys: vec![vec![BigRational::new(BigInt::from(1), BigInt::from(2))]],
            degree: 0,
            verified_through: 1,
        };
        assert_eq!(q.evaluate(3).unwrap_err(), QuasiPolyError::NonIntegral(3));
    }

    #[test]
    fn json_roundtrip() {
        let seq = seq_of(&[0, 1, 2, 3, 4, 5]);
        let q = fit(&seq, 2, 2).unwrap();
        let json = serde_json::to_string(&q).unwrap();
        assert!(json.contains("\"period\":1"));
        let back: QuasiPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Sampling a planted quasi-polynomial and fitting recovers a
            /// certificate that reproduces every sampled value.
            #[test]
            fn fit_recovers_planted_values(
                period in 1usize..4,
                coeff_sets in proptest::collection::vec(
                    proptest::collection::vec(-4i64..5, 1..4),
                    1..4,
                ),
            ) {
                let polys: Vec<Vec<i64>> =
                    (0..period).map(|r| coeff_sets[r % coeff_sets.len()].clone()).collect();
                let degree = polys.iter().map(|p| p.len() - 1).max().unwrap();
                let n_max = (period * (degree + 3)) as u64;
                let seq: BTreeMap<u64, BigInt> = (1..=n_max)
                    .map(|n| {
                        let poly = &polys[(n % period as u64) as usize];
                        let mut acc = 0i64;
                        for c in poly.iter().rev() {
                            acc = acc * n as i64 + c;
                        }
                        (n, BigInt::from(acc))
                    })
                    .collect();
                let q = fit(&seq, 4, 4).unwrap();
                prop_assert!(q.period() <= period);
                for (n, value) in &seq {
                    if *n >= q.offset() {
                        prop_assert_eq!(q.evaluate(*n).unwrap(), value.clone());
                    }
                }
                let gf = generating_function(&q, &seq);
                let series = gf.series(n_max);
                for (n, value) in &seq {
                    prop_assert_eq!(&series[*n as usize], value);
                }
            }
        }
    }
}
