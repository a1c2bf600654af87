//! Decoder-respecting splitting of generator-matrix columns.
//!
//! A column heavier than the threshold is halved recursively; each half is
//! zero-extended back to full length, and all-zero halves are dropped. The
//! resulting pieces have pairwise disjoint supports and sum to the original
//! column both over GF(2) and over the integers, and the split encoder keeps
//! a recursive successive-cancellation schedule.
//!
//! Piece order is deterministic: for a split, the pieces coming from the tail
//! half (zero-padded at the head) precede those from the head half. Columns
//! of a matrix are processed left to right.

use crate::kernel::{BitMatrix, BitVector};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

/// Largest `n` for which `gamma` will materialize `G2^{⊗n}` column by column.
pub const EXACT_SPLIT_GUARD: usize = 14;

/// Threshold at which splitting stops paying for itself asymptotically:
/// h_b(2/3) - 1/3.
pub const LAMBDA_STAR: f64 = 0.584_962_500_721_156_2;

/// Ordered pieces produced by splitting one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitOutput {
    pub pieces: Vec<BitVector>,
}

impl SplitOutput {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}

/// Split one column vector of power-of-two length.
///
/// Empty output if and only if the input is the zero vector; a vector at or
/// below the threshold passes through unchanged.
pub fn split(v: &BitVector, w_ub: usize) -> Result<SplitOutput> {
    if !v.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(v.len()));
    }
    if w_ub == 0 {
        return Err(Error::InvalidParameter("weight threshold must be >= 1".into()));
    }
    let mut pieces = Vec::new();
    split_rec(v, w_ub, v.len(), 0, &mut pieces);
    Ok(SplitOutput { pieces })
}

/// Recursive splitter working on the window `[offset, offset+len)` of the
/// original vector; emitted pieces are zero-extended to full length.
fn split_rec(full: &BitVector, w_ub: usize, len: usize, offset: usize, out: &mut Vec<BitVector>) {
    let window = full.slice(offset, len);
    let w = window.weight();
    if w == 0 {
        return;
    }
    if w <= w_ub {
        out.push(window.embedded(full.len(), offset));
        return;
    }
    let half = len / 2;
    let head_zero = full.slice(offset, half).is_zero();
    let tail_zero = full.slice(offset + half, half).is_zero();
    // tail-extended pieces first, then head-extended
    if !tail_zero {
        split_rec(full, w_ub, half, offset + half, out);
    }
    if !head_zero {
        split_rec(full, w_ub, half, offset, out);
    }
}

/// Split every column of `m`, concatenating the outputs left to right.
pub fn split_matrix(m: &BitMatrix, w_ub: usize) -> Result<BitMatrix> {
    if !m.rows().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m.rows()));
    }
    let mut cols: Vec<BitVector> = Vec::with_capacity(m.cols());
    for c in 0..m.cols() {
        let out = split(&m.column(c), w_ub)?;
        cols.extend(out.pieces);
    }
    BitMatrix::from_columns(&cols)
}

/// Effective power-of-two threshold: all intermediate weights reached when
/// splitting columns of `G2^{⊗n}` are powers of two, so any `w_ub` behaves
/// like `2^floor(log2 w_ub)`.
pub fn effective_threshold(w_ub: usize) -> usize {
    assert!(w_ub >= 1);
    1 << (usize::BITS - 1 - w_ub.leading_zeros())
}

/// log2 of the effective threshold.
pub fn threshold_exponent(w_ub: usize) -> usize {
    effective_threshold(w_ub).trailing_zeros() as usize
}

/// Number of pieces the splitter produces for the canonical column built from
/// `n_minus` Kronecker factors `[1,1]` and `n_plus` factors `[0,1]`, in any
/// order. Depends only on the two counts.
pub fn piece_count(n_minus: usize, _n_plus: usize, w_ub: usize) -> BigUint {
    let lub = threshold_exponent(w_ub);
    if n_minus <= lub {
        BigUint::one()
    } else {
        BigUint::one() << (n_minus - lub)
    }
}

/// How the rate loss was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMethod {
    /// Materialize `G2^{⊗n}`, split every column, count.
    ExactSplit,
    /// Per-weight-class piece counts with exact big-integer binomials.
    ClosedForm,
}

impl fmt::Display for GammaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaMethod::ExactSplit => write!(f, "exact-split"),
            GammaMethod::ClosedForm => write!(f, "closed-form"),
        }
    }
}

/// Multiplicative rate loss of splitting `G2^{⊗n}`: the split matrix has
/// `N(1+gamma)` columns.
#[derive(Debug, Clone)]
pub struct GammaReport {
    pub n: usize,
    pub w_ub: usize,
    /// log2(w_ub) / n
    pub lambda: f64,
    pub gamma: f64,
    /// exact column count of the split matrix
    pub total_columns: BigUint,
    /// piece count for the canonical weight-2^i column, i = 0..=n
    pub per_weight_counts: Vec<BigUint>,
    pub method: GammaMethod,
}

impl GammaReport {
    /// gamma as an exact pair (total - N, N).
    pub fn gamma_exact(&self) -> (BigUint, BigUint) {
        let n_cols = BigUint::one() << self.n;
        (&self.total_columns - &n_cols, n_cols)
    }
}

/// Rate loss for splitting `G2^{⊗n}` at threshold `w_ub`.
pub fn gamma(n: usize, w_ub: usize, method: GammaMethod) -> Result<GammaReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if w_ub == 0 {
        return Err(Error::InvalidParameter("weight threshold must be >= 1".into()));
    }
    let per_weight_counts: Vec<BigUint> = (0..=n).map(|i| piece_count(i, n - i, w_ub)).collect();
    let total = match method {
        GammaMethod::ClosedForm => {
            // sum over weight classes: C(n,i) columns of weight 2^i
            let mut total = BigUint::zero();
            let mut choose = BigUint::one();
            for i in 0..=n {
                if i > 0 {
                    choose = choose * BigUint::from(n - i + 1) / BigUint::from(i);
                }
                total += &choose * &per_weight_counts[i];
            }
            total
        }
        GammaMethod::ExactSplit => {
            if n > EXACT_SPLIT_GUARD {
                return Err(Error::GuardExceeded {
                    what: format!("exact-split gamma at n={}", n),
                    limit: EXACT_SPLIT_GUARD,
                });
            }
            let g = crate::kernel::kron_power(&BitMatrix::g2(), n);
            let mut total = 0u64;
            for c in 0..g.cols() {
                total += split(&g.column(c), w_ub)?.len() as u64;
            }
            BigUint::from(total)
        }
    };
    let n_cols = BigUint::one() << n;
    let extra = &total - &n_cols;
    let gamma_val = extra.to_f64().unwrap_or(f64::INFINITY) / (1u64 << n) as f64;
    Ok(GammaReport {
        n,
        w_ub,
        lambda: (w_ub as f64).log2() / n as f64,
        gamma: gamma_val,
        total_columns: total,
        per_weight_counts,
        method,
    })
}

/// The rate-loss curve model behind the split analysis, evaluated with a real
/// exponent: gamma(n, lambda) = Σ_{i > nλ} C(n,i) (2^{i-nλ} - 1) / 2^n.
///
/// This is the smooth-in-lambda idealization of [`gamma`], which only sees
/// integer thresholds. Binomials are exact big integers.
pub fn rate_loss_curve(n: usize, lambda: f64) -> f64 {
    let nl = n as f64 * lambda;
    let mut sum = 0.0;
    let mut choose = BigUint::one();
    for i in 0..=n {
        if i > 0 {
            choose = choose * BigUint::from(n - i + 1) / BigUint::from(i);
        }
        if (i as f64) > nl {
            let c = choose.to_f64().unwrap_or(f64::INFINITY);
            sum += c * ((i as f64 - nl).exp2() - 1.0);
        }
    }
    sum / (n as f64).exp2()
}

/// Binary entropy in bits, with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}
