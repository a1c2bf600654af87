//! Exact-rational channels for pinning published decimal values and for
//! small-n bit-channel oracles.
//!
//! Transforms here grow alphabets exponentially and perform no merging; they
//! are intended for n <= 4.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::DiscreteBms;

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Finite BMS channel with exact rational transition probabilities.
#[derive(Debug, Clone)]
pub struct RationalBms {
    pub p0: Vec<BigRational>,
    pub p1: Vec<BigRational>,
}

impl RationalBms {
    pub fn bsc(num: i64, den: i64) -> Self {
        let p = ratio(num, den);
        let q = BigRational::one() - p.clone();
        RationalBms {
            p0: vec![q.clone(), p.clone()],
            p1: vec![p, q],
        }
    }

    pub fn bec(num: i64, den: i64) -> Self {
        let e = ratio(num, den);
        let c = BigRational::one() - e.clone();
        RationalBms {
            p0: vec![c.clone(), e.clone(), BigRational::zero()],
            p1: vec![BigRational::zero(), e, c],
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.p0.len()
    }

    /// Bhattacharyya parameter, evaluated in f64 at the end (the square root
    /// leaves the rationals).
    pub fn bhattacharyya(&self) -> f64 {
        self.p0
            .iter()
            .zip(&self.p1)
            .map(|(a, b)| (rational_to_f64(a) * rational_to_f64(b)).sqrt())
            .sum()
    }

    /// Exact maximum-likelihood bit error probability with ties decided as 0:
    /// decide 0 iff P(y|0) >= P(y|1).
    pub fn ml_error_probability(&self) -> BigRational {
        let half = ratio(1, 2);
        let mut err = BigRational::zero();
        for y in 0..self.alphabet_size() {
            if self.p0[y] < self.p1[y] {
                err += &half * &self.p0[y]; // true 0, decided 1
            }
            if self.p0[y] >= self.p1[y] {
                err += &half * &self.p1[y]; // true 1, decided 0 (incl. ties)
            }
        }
        err
    }

    pub fn to_f64(&self) -> DiscreteBms {
        DiscreteBms::new(
            self.p0.iter().map(rational_to_f64).collect(),
            self.p1.iter().map(rational_to_f64).collect(),
            None,
        )
        .expect("rational channel should stay symmetric in f64")
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer().to_f64().unwrap_or_else(|| {
        if r.numer().is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    });
    let den = r.denom().to_f64().unwrap_or(f64::INFINITY);
    num / den
}

/// Exact minus transform; see the f64 twin for the formula.
pub fn transform_minus(w1: &RationalBms, w2: &RationalBms) -> RationalBms {
    let half = ratio(1, 2);
    let mut p0 = Vec::new();
    let mut p1 = Vec::new();
    for y1 in 0..w1.alphabet_size() {
        for y2 in 0..w2.alphabet_size() {
            p0.push(&half * (&w1.p0[y1] * &w2.p0[y2] + &w1.p1[y1] * &w2.p1[y2]));
            p1.push(&half * (&w1.p1[y1] * &w2.p0[y2] + &w1.p0[y1] * &w2.p1[y2]));
        }
    }
    RationalBms { p0, p1 }
}

/// Exact plus transform; see the f64 twin for the formula.
pub fn transform_plus(w1: &RationalBms, w2: &RationalBms) -> RationalBms {
    let half = ratio(1, 2);
    let mut p0 = Vec::new();
    let mut p1 = Vec::new();
    for y1 in 0..w1.alphabet_size() {
        for y2 in 0..w2.alphabet_size() {
            for u1 in 0..2usize {
                let w1_u2_0 = if u1 == 0 { &w1.p0[y1] } else { &w1.p1[y1] };
                let w1_u2_1 = if u1 == 0 { &w1.p1[y1] } else { &w1.p0[y1] };
                p0.push(&half * w1_u2_0 * &w2.p0[y2]);
                p1.push(&half * w1_u2_1 * &w2.p1[y2]);
            }
        }
    }
    RationalBms { p0, p1 }
}

/// Bit-channel of the sign sequence `signs` over base channel `w`:
/// the transform chain applied left to right, minus for `false`.
pub fn bit_channel(w: &RationalBms, signs: &[bool]) -> RationalBms {
    let mut acc = w.clone();
    for &plus in signs {
        acc = if plus {
            transform_plus(&acc, &acc)
        } else {
            transform_minus(&acc, &acc)
        };
    }
    acc
}

/// The four-symbol channel pair used to show that degrading both transform
/// inputs need not degrade every bit-channel. Alphabet order (a, b, b', a'),
/// involution a<->a', b<->b'.
pub fn remark3_pair() -> (RationalBms, RationalBms) {
    let phi = [3usize, 2, 1, 0];
    let build = |p0: [BigRational; 4]| {
        let p1: Vec<BigRational> = (0..4).map(|y| p0[phi[y]].clone()).collect();
        RationalBms {
            p0: p0.to_vec(),
            p1,
        }
    };
    let w1 = build([ratio(6, 9), ratio(1, 9), ratio(1, 9), ratio(1, 9)]);
    let w2 = build([ratio(5, 11), ratio(4, 11), ratio(1, 11), ratio(1, 11)]);
    (w1, w2)
}
