//! Executable encoder graphs.
//!
//! A graph is a binary tree of blocks. A depth-`d` block maps its `2^d`
//! input lines to output slots through its two depth-`d-1` children followed
//! by one pairing layer: pair `c` takes the upper child's slot `c` and the
//! lower child's slot `c`. The root's pairing layer is level 1 (adjacent to
//! the channel); a block of depth `d` carries level `n - d + 1`.
//!
//! Pair kinds:
//! - `Combine`: the plain butterfly step, left slot `a ^ b`, right slot `b`.
//! - `Split`: the removed-XOR step of the column splitter; the upper value
//!   goes out untouched and the lower value is sent twice.
//! - `AdrsSplit`: the removed XOR is replaced by `a ^ noise`, and two replica
//!   subtrees are attached on fresh channel uses, one carrying the noise bit
//!   and one carrying a duplicate of the lower value. Replicas reproduce the
//!   bit-channel a slot of this depth sees: inside a replica, positions that
//!   decode earlier are pinned to zero and later positions carry fresh noise.
//!
//! Output order: the root's own slots first (split pieces grouped per
//! original column, tail pieces before head pieces), then all replica slots
//! in build order.

mod build;
mod encode;
pub(crate) mod serial;

pub use build::split_plan;
pub use serial::{read_graph, write_graph};

use crate::{Error, Result};

/// Which encoder family a graph realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Standard,
    Drs,
    Adrs,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Standard => write!(f, "standard"),
            Scheme::Drs => write!(f, "drs"),
            Scheme::Adrs => write!(f, "adrs"),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Scheme::Standard),
            "drs" => Ok(Scheme::Drs),
            "adrs" => Ok(Scheme::Adrs),
            other => Err(Error::Parse(format!("unknown scheme '{}'", other))),
        }
    }
}

/// Replica subtree attached at an augmented split: a `2^m`-channel structure
/// carrying one payload bit, where `m` is the prefix length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Replica {
    /// Path signs of the block the split lives in (`true` = plus side);
    /// length = level - 1.
    pub prefix: Vec<bool>,
    /// start within the bypass slot area
    pub slot_start: usize,
    /// start within the global noise-bit array for internal noise
    pub noise_start: usize,
}

impl Replica {
    pub fn slot_count(&self) -> usize {
        1 << self.prefix.len()
    }

    /// Fresh random bits a replica consumes internally: one per minus node of
    /// its recursive layout.
    pub fn noise_count(prefix: &[bool]) -> usize {
        match prefix.split_last() {
            None => 0,
            Some((&plus, rest)) => {
                let sub = Replica::noise_count(rest);
                if plus {
                    2 * sub
                } else {
                    1 + 2 * sub
                }
            }
        }
    }
}

/// One pairing-layer entry. Slot indices are local to the owning block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Pair {
    Combine {
        left: usize,
        right: usize,
    },
    Split {
        tail: usize,
        head: usize,
        right: usize,
    },
    AdrsSplit {
        left: usize,
        right: usize,
        /// global index of the split noise bit
        noise: usize,
        noise_rep: Replica,
        dup_rep: Replica,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum BlockKind {
    Leaf,
    Internal {
        upper: usize,
        lower: usize,
        pairs: Vec<Pair>,
    },
}

/// Column group bookkeeping for split graphs: consecutive slots holding the
/// pieces of one original column, all of the same weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Group {
    pub start: usize,
    pub len: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Block {
    pub depth: usize,
    pub main_slots: usize,
    pub groups: Vec<Group>,
    pub kind: BlockKind,
}

/// An executable encoder: standard polar butterfly, split encoder, or
/// augmented split encoder. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderGraph {
    pub(crate) n: usize,
    pub(crate) scheme: Scheme,
    pub(crate) w_ub: u64,
    pub(crate) seed: u64,
    pub(crate) blocks: Vec<Block>,
    pub(crate) root: usize,
    pub(crate) main_outputs: usize,
    pub(crate) bypass_outputs: usize,
    pub(crate) noise_count: usize,
    pub(crate) split_pair_count: usize,
}

impl EncoderGraph {
    /// Recursion depth; the input length is `2^n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Number of source bits.
    pub fn input_len(&self) -> usize {
        1 << self.n
    }

    /// Total channel uses (output slots).
    pub fn channel_uses(&self) -> usize {
        self.main_outputs + self.bypass_outputs
    }

    /// Weight threshold the graph was built with; `u64::MAX` for standard.
    pub fn w_ub(&self) -> u64 {
        self.w_ub
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Random bits consumed per encode call.
    pub fn noise_bits(&self) -> usize {
        self.noise_count
    }

    /// Number of modified (split) pairing entries; for augmented graphs this
    /// equals the split-plan size.
    pub fn split_pairs(&self) -> usize {
        self.split_pair_count
    }

    pub(crate) fn block(&self, id: usize) -> &Block {
        &self.blocks[id]
    }

    /// Global slot range of a replica.
    pub(crate) fn replica_slots(&self, rep: &Replica) -> std::ops::Range<usize> {
        let start = self.main_outputs + rep.slot_start;
        start..start + rep.slot_count()
    }
}

/// Exact extra channel uses of the augmented scheme:
/// one split pair at level `l` costs `2^l` fresh uses.
pub fn adrs_extra_channel_uses(n: usize, w_ub: u64) -> u128 {
    let n_lub = build::effective_exponent(w_ub);
    let mut extra: u128 = 0;
    for level in 1..=n {
        let suffix = n - level;
        // count suffixes with at least n_lub minus signs
        let mut tail: u128 = 0;
        let mut choose: u128 = 1;
        for k in 0..=suffix {
            if k > 0 {
                choose = choose * (suffix - k + 1) as u128 / k as u128;
            }
            if k >= n_lub {
                tail += choose;
            }
        }
        extra += (1u128 << (level - 1)) * tail * (1u128 << level);
    }
    extra
}

/// Fractional channel-use overhead of the augmented scheme: extra / 2^n.
pub fn adrs_gamma(n: usize, w_ub: u64) -> f64 {
    adrs_extra_channel_uses(n, w_ub) as f64 / (1u128 << n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drs::{gamma, GammaMethod};
    use crate::kernel::{kron_power, mat_vec_mul, BitMatrix, BitVector};
    use rand::{Rng, SeedableRng};

    #[test]
    fn standard_graph_matches_kron_power() {
        for n in 0..=6usize {
            let g = EncoderGraph::standard(n);
            assert_eq!(g.channel_uses(), 1 << n);
            let m = g.generator_matrix();
            assert_eq!(m, kron_power(&BitMatrix::g2(), n));
        }
    }

    #[test]
    fn standard_n3_is_the_printed_matrix() {
        let want = BitMatrix::from_rows(&[
            vec![1, 0, 0, 0, 0, 0, 0, 0],
            vec![1, 1, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 0, 0, 0],
            vec![1, 1, 1, 1, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 1, 0, 0, 0],
            vec![1, 1, 0, 0, 1, 1, 0, 0],
            vec![1, 0, 1, 0, 1, 0, 1, 0],
            vec![1, 1, 1, 1, 1, 1, 1, 1],
        ])
        .unwrap();
        assert_eq!(EncoderGraph::standard(3).generator_matrix(), want);
        // last row of G2^{⊗3} is all ones: encoding e_8 lights every output
        let g = EncoderGraph::standard(3);
        let e8 = BitVector::unit(8, 7);
        assert_eq!(g.encode_seeded(&e8, 0).weight(), 8);
    }

    #[test]
    fn drs_graph_reproduces_split_matrix() {
        for n in 1..=7usize {
            for wexp in 0..=n {
                let w_ub = 1usize << wexp;
                let g = EncoderGraph::drs(n, w_ub as u64);
                let want = crate::drs::split_matrix(
                    &kron_power(&BitMatrix::g2(), n),
                    w_ub,
                )
                .unwrap();
                assert_eq!(
                    g.generator_matrix(),
                    want,
                    "n={} w_ub={}",
                    n,
                    w_ub
                );
                let report = gamma(n, w_ub, GammaMethod::ClosedForm).unwrap();
                assert_eq!(
                    g.channel_uses() as u64,
                    u64::try_from(report.total_columns.clone()).unwrap()
                );
            }
        }
    }

    #[test]
    fn drs_at_high_threshold_is_standard() {
        let a = EncoderGraph::drs(4, 16);
        let b = EncoderGraph::standard(4);
        assert_eq!(a.generator_matrix(), b.generator_matrix());
        assert_eq!(a.channel_uses(), 16);
        assert_eq!(a.split_pairs(), 0);
    }

    #[test]
    fn drs_column_weights_bounded() {
        for n in 1..=8usize {
            for wexp in 0..=n {
                let w_ub = 1u64 << wexp;
                let g = EncoderGraph::drs(n, w_ub);
                let m = g.generator_matrix();
                for c in 0..m.cols() {
                    assert!(m.column_weight(c) as u64 <= w_ub);
                }
            }
        }
    }

    #[test]
    fn graph_encode_equals_matrix_multiply() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6usize {
            for scheme in 0..3usize {
                for wexp in 0..=n {
                    let w_ub = 1u64 << wexp;
                    let g = match scheme {
                        0 => EncoderGraph::standard(n),
                        1 => EncoderGraph::drs(n, w_ub),
                        _ => EncoderGraph::adrs(n, w_ub, 5),
                    };
                    let m = g.generator_matrix();
                    for _ in 0..20 {
                        let mut u = BitVector::zeros(1 << n);
                        for i in 0..(1 << n) {
                            if rng.gen::<bool>() {
                                u.set(i, true);
                            }
                        }
                        let via_matrix = mat_vec_mul(&u, &m).unwrap();
                        let via_graph = g.encode_with_noise(&u, &vec![0; g.noise_bits()]).unwrap();
                        assert_eq!(via_matrix, via_graph);
                    }
                }
            }
        }
    }

    #[test]
    fn adrs_encode_is_affine_in_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = EncoderGraph::adrs(3, 2, 17);
        for _ in 0..50 {
            let mut u = BitVector::zeros(8);
            for i in 0..8 {
                if rng.gen::<bool>() {
                    u.set(i, true);
                }
            }
            let noise: Vec<u8> = (0..g.noise_bits()).map(|_| rng.gen::<bool>() as u8).collect();
            let zero_u = BitVector::zeros(8);
            let mut want = g.encode_with_noise(&u, &vec![0; noise.len()]).unwrap();
            want.xor_assign(&g.encode_with_noise(&zero_u, &noise).unwrap());
            assert_eq!(g.encode_with_noise(&u, &noise).unwrap(), want);
        }
    }

    #[test]
    fn adrs_channel_use_counts() {
        // independent enumeration of split pairs: (-,-,-) at levels 1,2;
        // (-,-,+) and (-,+,-) at level 1; (+,-,-) at level 2:
        // extra = 2 + 4 + 2 + 2 + 4 = 14
        let g = EncoderGraph::adrs(3, 2, 0);
        assert_eq!(g.channel_uses(), 22);
        assert_eq!(g.split_pairs(), 5);
        assert_eq!(adrs_extra_channel_uses(3, 2), 14);

        // single split of the 2x2 kernel: pair becomes 4 uses
        let g = EncoderGraph::adrs(1, 1, 0);
        assert_eq!(g.channel_uses(), 4);
        assert_eq!(g.split_pairs(), 1);

        // no splits at or above 2^n
        let g = EncoderGraph::adrs(3, 8, 0);
        assert_eq!(g.channel_uses(), 8);
        assert_eq!(g.split_pairs(), 0);
        assert_eq!(g.noise_bits(), 0);

        // count formula matches graph construction
        for n in 1..=8usize {
            for wexp in 0..=n {
                let w_ub = 1u64 << wexp;
                let g = EncoderGraph::adrs(n, w_ub, 1);
                let want = (1u128 << n) + adrs_extra_channel_uses(n, w_ub);
                assert_eq!(g.channel_uses() as u128, want, "n={} w={}", n, w_ub);
                let plan = split_plan(n, w_ub);
                assert_eq!(g.split_pairs(), plan.pairs.len());
            }
        }
    }

    #[test]
    fn adrs_column_weights_bounded_with_noise_zeroed() {
        for n in 1..=7usize {
            for wexp in 0..=n {
                let w_ub = 1u64 << wexp;
                let g = EncoderGraph::adrs(n, w_ub, 9);
                let m = g.generator_matrix();
                for c in 0..m.cols() {
                    assert!(
                        m.column_weight(c) as u64 <= w_ub,
                        "n={} w={} col={} weight={}",
                        n,
                        w_ub,
                        c,
                        m.column_weight(c)
                    );
                }
            }
        }
    }

    #[test]
    fn every_input_reaches_an_output() {
        for g in [
            EncoderGraph::standard(4),
            EncoderGraph::drs(4, 2),
            EncoderGraph::adrs(4, 2, 2),
        ] {
            let m = g.generator_matrix();
            for r in 0..m.rows() {
                assert!(m.row_weight(r) >= 1);
            }
        }
    }

    #[test]
    fn plan_matches_piece_counts() {
        // a column splits once per plan pair on its sign sequence
        for n in 1..=8usize {
            for wexp in 0..=n {
                let w_ub = 1u64 << wexp;
                let plan = split_plan(n, w_ub);
                let mut per_signs = vec![0u32; 1 << n];
                for &(level, mask) in &plan.pairs {
                    assert!((1..=n).contains(&level));
                    per_signs[mask as usize] += 1;
                }
                for mask in 0..(1usize << n) {
                    // minus count of the sequence; bit i of mask = plus at position i+1
                    let minus = n - (mask as u64).count_ones() as usize;
                    let want =
                        crate::drs::piece_count(minus, n - minus, w_ub as usize);
                    use num_traits::ToPrimitive;
                    let want = want.to_u64().unwrap();
                    assert_eq!(1u64 << per_signs[mask], want);
                }
            }
        }
    }

    #[test]
    fn adrs_gamma_decreases_on_exact_grid() {
        // lambda = 0.7 with integral n*lambda
        let g10 = adrs_gamma(10, 1 << 7);
        let g20 = adrs_gamma(20, 1 << 14);
        let g30 = adrs_gamma(30, 1 << 21);
        assert!(g20 < g10 && g30 < g20, "{} {} {}", g10, g20, g30);
    }

    #[test]
    fn serialization_round_trip() {
        for g in [
            EncoderGraph::standard(3),
            EncoderGraph::drs(4, 4),
            EncoderGraph::adrs(3, 2, 42),
        ] {
            let text = write_graph(&g);
            let back = read_graph(&text).unwrap();
            assert_eq!(g, back);
        }
    }
}
