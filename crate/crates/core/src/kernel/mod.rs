//! Polarization-kernel validation and analysis.
//!
//! A square GF(2) matrix polarizes if and only if it is invertible and not
//! upper triangular under any column permutation. This module checks both
//! conditions, computes partial distances and the rate of polarization, and
//! provides exact column-weight statistics of Kronecker powers without ever
//! materializing them.

mod bits;

pub use bits::{kron, kron_power, mat_vec_mul, BitMatrix, BitVector};

use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;

/// Largest kernel size accepted by the partial-distance search. The span
/// enumeration costs 2^(l-i) per row, so this caps total work at ~2^20.
pub const MAX_KERNEL_SIZE: usize = 20;

/// Analysis of one candidate kernel.
#[derive(Debug, Clone)]
pub struct KernelReport {
    pub size: usize,
    pub invertible: bool,
    pub upper_triangular_under_column_permutation: bool,
    /// Partial distances D_i; an entry of 0 indicates a dependent row.
    pub partial_distances: Vec<usize>,
    /// E(G) = (1/l) Σ log_l D_i; `None` when the matrix is singular.
    pub rate_of_polarization: Option<f64>,
}

impl KernelReport {
    /// A valid polarization kernel is invertible and not upper triangular
    /// under any column permutation.
    pub fn is_valid_kernel(&self) -> bool {
        self.invertible && !self.upper_triangular_under_column_permutation
    }

    /// key=value lines, one per field.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("size={}\n", self.size));
        s.push_str(&format!("invertible={}\n", self.invertible));
        s.push_str(&format!(
            "upper_triangular_under_column_permutation={}\n",
            self.upper_triangular_under_column_permutation
        ));
        s.push_str(&format!("valid_kernel={}\n", self.is_valid_kernel()));
        s.push_str(&format!(
            "partial_distances={}\n",
            self.partial_distances
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
        match self.rate_of_polarization {
            Some(e) => s.push_str(&format!("rate_of_polarization={}\n", e)),
            None => s.push_str("rate_of_polarization=undefined\n"),
        }
        s
    }

    /// Single CSV row with header.
    pub fn to_csv(&self) -> String {
        let e = self
            .rate_of_polarization
            .map(|v| v.to_string())
            .unwrap_or_else(|| "nan".into());
        format!(
            "size,invertible,ut_under_permutation,valid,partial_distances,rate_of_polarization\n{},{},{},{},{},{}\n",
            self.size,
            self.invertible,
            self.upper_triangular_under_column_permutation,
            self.is_valid_kernel(),
            self.partial_distances
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            e
        )
    }
}

impl fmt::Display for KernelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_key_value())
    }
}

/// GF(2) invertibility via Gaussian elimination.
pub fn is_invertible(m: &BitMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let mut rows: Vec<BitVector> = (0..n).map(|r| m.row(r)).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..n {
            if r != rank && rows[r].get(col) {
                let pivot_row = rows[rank].clone();
                rows[r].xor_assign(&pivot_row);
            }
        }
        rank += 1;
    }
    rank == n
}

/// Whether some column permutation of `m` is upper triangular.
///
/// Column permutation only; row order is fixed. Equivalent to peeling the
/// bottom row (which must have weight <= 1 in the remaining columns) together
/// with the column holding its single entry: sort each column's lowest
/// nonzero-row index ascending and require the j-th smallest to be <= j.
pub fn is_upper_triangular_under_column_permutation(m: &BitMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    // deepest row each column touches (1-based); 0 for a zero column
    let mut deepest: Vec<usize> = (0..n)
        .map(|c| (0..n).rev().find(|&r| m.get(r, c)).map_or(0, |r| r + 1))
        .collect();
    deepest.sort_unstable();
    Ok(deepest.iter().enumerate().all(|(j, &d)| d <= j + 1))
}

/// Partial distances D_i = d_H(g_i, span(g_{i+1}, ..., g_l)), with
/// D_l = w_H(g_l). Computed by exhaustive span enumeration.
pub fn partial_distances(m: &BitMatrix) -> Result<Vec<usize>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let l = m.rows();
    if l > MAX_KERNEL_SIZE {
        return Err(Error::GuardExceeded {
            what: format!("kernel size {}", l),
            limit: MAX_KERNEL_SIZE,
        });
    }
    let rows: Vec<BitVector> = (0..l).map(|r| m.row(r)).collect();
    let mut out = Vec::with_capacity(l);
    for i in 0..l {
        let later = &rows[i + 1..];
        let mut best = usize::MAX;
        // Gray-code walk over all 2^(l-i-1) span elements
        let mut acc = rows[i].clone();
        best = best.min(acc.weight());
        let count = 1u64 << later.len();
        for k in 1..count {
            let bit = k.trailing_zeros() as usize;
            acc.xor_assign(&later[bit]);
            best = best.min(acc.weight());
        }
        out.push(best);
    }
    Ok(out)
}

/// E(G) = (1/l) Σ_{i=1}^{l} log_l D_i. Errors on singular matrices, where a
/// partial distance of zero makes the exponent undefined.
pub fn rate_of_polarization(m: &BitMatrix) -> Result<f64> {
    let d = partial_distances(m)?;
    if d.contains(&0) {
        return Err(Error::Singular);
    }
    let l = d.len() as f64;
    Ok(d.iter().map(|&x| (x as f64).ln() / l.ln()).sum::<f64>() / l)
}

/// Validate a candidate kernel and report everything we know about it.
pub fn validate_kernel(m: &BitMatrix) -> Result<KernelReport> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let invertible = is_invertible(m);
    let ut = is_upper_triangular_under_column_permutation(m)?;
    let partial = partial_distances(m)?;
    let rate = if invertible {
        Some(rate_of_polarization(m)?)
    } else {
        None
    };
    Ok(KernelReport {
        size: m.rows(),
        invertible,
        upper_triangular_under_column_permutation: ut,
        partial_distances: partial,
        rate_of_polarization: rate,
    })
}

/// The block kernel [[I, 0], [I, I]] of even size `l`; every column has
/// weight at most 2, and E = (1/2) log_l 2.
pub fn sparse_kernel(l: usize) -> Result<BitMatrix> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::OddKernelSize(l));
    }
    let h = l / 2;
    let mut m = BitMatrix::zeros(l, l);
    for i in 0..h {
        m.set(i, i, true);
        m.set(h + i, i, true);
        m.set(h + i, h + i, true);
    }
    Ok(m)
}

/// Exact fraction of columns of `g^{⊗n}` with Hamming weight <= `bound`.
///
/// A Kronecker column's weight is the product of the factor-column weights,
/// so the count is a sum over weight-class compositions; the power itself is
/// never materialized. Counts use big integers; the returned fraction is the
/// big-rational count divided by cols^n, rounded to f64.
pub fn light_column_fraction(g: &BitMatrix, n: usize, bound: f64) -> f64 {
    if bound < 1.0 {
        return 0.0;
    }
    let bound_int: u128 = if bound >= u128::MAX as f64 {
        u128::MAX
    } else {
        bound.floor() as u128
    };
    // distinct column weights with multiplicities
    let mut classes: Vec<(u128, u64)> = Vec::new();
    for c in 0..g.cols() {
        let w = g.column_weight(c) as u128;
        match classes.iter_mut().find(|(v, _)| *v == w) {
            Some((_, k)) => *k += 1,
            None => classes.push((w, 1)),
        }
    }
    classes.sort_unstable();

    let mut light = BigUint::zero();
    // enumerate compositions (n_1, ..., n_m) of n over the weight classes
    fn walk(
        classes: &[(u128, u64)],
        idx: usize,
        remaining: usize,
        product: u128,
        ways: BigUint,
        bound: u128,
        light: &mut BigUint,
    ) {
        if product > bound {
            return; // weights never decrease a product (all >= 1)
        }
        if idx == classes.len() {
            if remaining == 0 {
                *light += ways;
            }
            return;
        }
        let (w, k) = classes[idx];
        let mut pw: u128 = 1;
        let mut mult = ways.clone();
        // j columns from this class; ways *= C(remaining, j) * k^j
        let mut choose = BigUint::one();
        for j in 0..=remaining {
            if j > 0 {
                // update choose = C(remaining, j), pw = w^j, mult = ways * choose * k^j
                choose = choose * BigUint::from(remaining - j + 1) / BigUint::from(j);
                pw = pw.saturating_mul(w);
                mult = ways.clone() * &choose * BigUint::from(k).pow(j as u32);
            }
            let new_product = product.saturating_mul(pw);
            walk(
                classes,
                idx + 1,
                remaining - j,
                new_product,
                mult.clone(),
                bound,
                light,
            );
            if new_product > bound && w > 1 {
                break; // larger j only increases the product
            }
        }
    }
    walk(&classes, 0, n, 1, BigUint::one(), bound_int, &mut light);

    let total = BigUint::from(g.cols() as u64).pow(n as u32);
    big_ratio_to_f64(&light, &total)
}

/// light/total as f64, safe for counts far beyond 2^64.
fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // scale so both fit in f64 with full precision
    let nb = num.bits().max(den.bits());
    let shift = nb.saturating_sub(52) as usize;
    let n = (num >> shift).to_u64_digits();
    let d = (den >> shift).to_u64_digits();
    let to_f = |digits: &[u64]| -> f64 {
        digits
            .iter()
            .rev()
            .fold(0.0, |acc, &w| acc * 1.8446744073709552e19 + w as f64)
    };
    to_f(&n) / to_f(&d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g2_is_valid_kernel() {
        let report = validate_kernel(&BitMatrix::g2()).unwrap();
        assert!(report.invertible);
        assert!(!report.upper_triangular_under_column_permutation);
        assert!(report.is_valid_kernel());
        assert_eq!(report.partial_distances, vec![1, 2]);
        assert!((report.rate_of_polarization.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_and_triangular_are_rejected() {
        let id = BitMatrix::identity(2);
        let report = validate_kernel(&id).unwrap();
        assert!(report.invertible);
        assert!(report.upper_triangular_under_column_permutation);
        assert!(!report.is_valid_kernel());
        assert_eq!(report.rate_of_polarization, Some(0.0));

        let ut = BitMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let report = validate_kernel(&ut).unwrap();
        assert!(report.upper_triangular_under_column_permutation);
        assert!(!report.is_valid_kernel());
    }

    #[test]
    fn permutation_matrix_has_rate_zero() {
        let p = BitMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        let report = validate_kernel(&p).unwrap();
        assert_eq!(report.partial_distances, vec![1, 1, 1]);
        assert_eq!(report.rate_of_polarization, Some(0.0));
        assert!(report.upper_triangular_under_column_permutation);
    }

    #[test]
    fn ut_detection_is_column_only() {
        // [[0,1],[1,1]] has no column permutation making it upper triangular:
        // the bottom row has weight 2.
        let m = BitMatrix::from_rows(&[vec![0, 1], vec![1, 1]]).unwrap();
        assert!(!is_upper_triangular_under_column_permutation(&m).unwrap());
    }

    #[test]
    fn block_kernel_analysis() {
        // l = 2 degenerates to G2
        assert_eq!(sparse_kernel(2).unwrap(), BitMatrix::g2());
        assert!(sparse_kernel(3).is_err());

        let k4 = sparse_kernel(4).unwrap();
        let weights: Vec<usize> = (0..4).map(|c| k4.column_weight(c)).collect();
        assert_eq!(weights, vec![2, 2, 1, 1]);
        let report = validate_kernel(&k4).unwrap();
        assert!(report.is_valid_kernel());
        assert_eq!(report.partial_distances, vec![1, 1, 2, 2]);
        assert!((report.rate_of_polarization.unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn partial_distance_guard() {
        let m = BitMatrix::identity(MAX_KERNEL_SIZE + 1);
        assert!(partial_distances(&m).is_err());
        let wide = BitMatrix::zeros(2, 3);
        assert!(partial_distances(&wide).is_err());
        assert!(validate_kernel(&wide).is_err());
    }

    #[test]
    fn block_kernel_power_weight_bound() {
        // columns of the size-4 block kernel's n-fold power stay within
        // 2^n = (4^n)^(1/2)
        let k4 = sparse_kernel(4).unwrap();
        for n in 1..=4usize {
            let big = kron_power(&k4, n);
            let max_w = (0..big.cols()).map(|c| big.column_weight(c)).max().unwrap();
            assert_eq!(max_w, 1 << n);
            assert_eq!(max_w as f64, (big.cols() as f64).sqrt());
        }
    }

    #[test]
    fn singular_matrix_reported() {
        let m = BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        let report = validate_kernel(&m).unwrap();
        assert!(!report.invertible);
        assert!(report.partial_distances.contains(&0));
        assert!(report.rate_of_polarization.is_none());
        assert!(rate_of_polarization(&m).is_err());
    }

    #[test]
    fn light_fraction_basics() {
        let g2 = BitMatrix::g2();
        // columns of G2 have weights 2 and 1
        assert!((light_column_fraction(&g2, 1, 1.0) - 0.5).abs() < 1e-12);
        // permutation kernel: all columns stay weight 1
        let p = BitMatrix::identity(4);
        assert!((light_column_fraction(&p, 5, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn light_fraction_matches_materialized_power() {
        let g2 = BitMatrix::g2();
        for n in 1..=8usize {
            let big = kron_power(&g2, n);
            for bound in [1.0, 2.0, 4.0, 7.5, 16.0] {
                let exact = (0..big.cols())
                    .filter(|&c| (big.column_weight(c) as f64) <= bound)
                    .count() as f64
                    / big.cols() as f64;
                let combinatorial = light_column_fraction(&g2, n, bound);
                assert!(
                    (exact - combinatorial).abs() < 1e-12,
                    "n={} bound={}: {} vs {}",
                    n,
                    bound,
                    exact,
                    combinatorial
                );
            }
        }
        // kernels with two and three distinct column weights
        let k6 = sparse_kernel(6).unwrap();
        let lower =
            BitMatrix::from_rows(&[vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]]).unwrap();
        for k in [&k6, &lower] {
            for n in 1..=4usize {
                let big = kron_power(k, n);
                for bound in [1.0, 2.0, 3.0, 8.0, 11.5] {
                    let exact = (0..big.cols())
                        .filter(|&c| (big.column_weight(c) as f64) <= bound)
                        .count() as f64
                        / big.cols() as f64;
                    assert!((exact - light_column_fraction(k, n, bound)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn light_fraction_vanishes_along_exact_grid() {
        // fraction of columns of G2^{⊗n} below N^0.4, sampled where 0.4n
        // stays on the same side of the floor jumps
        let g2 = BitMatrix::g2();
        let f: Vec<f64> = [10usize, 15, 20, 25]
            .iter()
            .map(|&n| light_column_fraction(&g2, n, (2f64).powf(0.4 * n as f64)))
            .collect();
        for w in f.windows(2) {
            assert!(w[1] < w[0], "expected strictly decreasing: {:?}", f);
        }
    }

    #[test]
    fn g2_power_weight_histogram() {
        // G2^{⊗n} has exactly C(n,i) columns of weight 2^i
        let g2 = BitMatrix::g2();
        for n in 1..=8usize {
            let big = kron_power(&g2, n);
            let mut hist = std::collections::HashMap::new();
            for c in 0..big.cols() {
                *hist.entry(big.column_weight(c)).or_insert(0u64) += 1;
            }
            let mut choose = 1u64;
            for i in 0..=n {
                if i > 0 {
                    choose = choose * (n - i + 1) as u64 / i as u64;
                }
                assert_eq!(hist.get(&(1 << i)).copied().unwrap_or(0), choose);
            }
        }
    }
}
