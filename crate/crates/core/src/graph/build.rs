//! Graph construction for the three encoder families.

use super::{Block, BlockKind, EncoderGraph, Group, Pair, Replica, Scheme};
use crate::drs::threshold_exponent;

/// The set of pairing-layer entries the splitter removes, as
/// (level, sign mask) pairs. Bit `i` of the mask is 1 when sign `i+1` is
/// plus; a pair `(s, l)` is in the plan when `s_l` is minus and the suffix
/// `s_l..s_n` has more than `log2(effective threshold)` minus signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub n: usize,
    pub w_ub: u64,
    /// log2 of the effective power-of-two threshold
    pub n_lub: usize,
    pub pairs: Vec<(usize, u64)>,
}

impl SplitPlan {
    /// Extra channel uses the augmented scheme pays: 2^level per pair.
    pub fn extra_channel_uses(&self) -> u128 {
        self.pairs.iter().map(|&(l, _)| 1u128 << l).sum()
    }

    /// Render one pair's sign sequence as a `-`/`+` string.
    pub fn signs_string(&self, mask: u64) -> String {
        (0..self.n)
            .map(|i| if mask >> i & 1 == 1 { '+' } else { '-' })
            .collect()
    }
}

/// Enumerate the split plan for `G2^{⊗n}` at threshold `w_ub`.
pub fn split_plan(n: usize, w_ub: u64) -> SplitPlan {
    let n_lub = effective_exponent(w_ub);
    let mut pairs = Vec::new();
    if n <= 63 {
        for mask in 0u64..(1u64 << n) {
            // suffix minus count, scanning levels n down to 1
            let mut suffix_minus = 0usize;
            for level in (1..=n).rev() {
                let plus = mask >> (level - 1) & 1 == 1;
                if !plus {
                    suffix_minus += 1;
                    if suffix_minus > n_lub {
                        pairs.push((level, mask));
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    SplitPlan {
        n,
        w_ub,
        n_lub,
        pairs,
    }
}

pub(crate) fn effective_exponent(w_ub: u64) -> usize {
    if w_ub >= (1u64 << 63) {
        63
    } else {
        threshold_exponent(w_ub as usize)
    }
}

impl EncoderGraph {
    /// Classic `n`-stage butterfly in natural index order.
    pub fn standard(n: usize) -> EncoderGraph {
        let mut g = build_split_tree(n, u64::MAX);
        g.scheme = Scheme::Standard;
        g
    }

    /// Split encoder: the butterfly with every over-weight pairing entry
    /// replaced by a split node, realizing the split generator matrix.
    pub fn drs(n: usize, w_ub: u64) -> EncoderGraph {
        assert!(w_ub >= 1, "weight threshold must be >= 1");
        build_split_tree(n, w_ub)
    }

    /// Augmented split encoder for general symmetric channels: split pairs
    /// get a noise bit and two replica subtrees on fresh channel uses.
    pub fn adrs(n: usize, w_ub: u64, seed: u64) -> EncoderGraph {
        assert!(w_ub >= 1, "weight threshold must be >= 1");
        let mut builder = AdrsBuilder {
            n_lub: effective_exponent(w_ub),
            blocks: Vec::new(),
            bypass: 0,
            noise: 0,
            splits: 0,
        };
        let mut prefix = Vec::new();
        let root = builder.build(n, &mut prefix);
        EncoderGraph {
            n,
            scheme: Scheme::Adrs,
            w_ub,
            seed,
            main_outputs: builder.blocks[root].main_slots,
            bypass_outputs: builder.bypass,
            noise_count: builder.noise,
            split_pair_count: builder.splits,
            blocks: builder.blocks,
            root,
        }
    }
}

/// Shared builder for the standard and split families. A pair is split when
/// doubling its sub-column weight would cross the threshold.
fn build_split_tree(n: usize, w_ub: u64) -> EncoderGraph {
    let mut blocks = Vec::new();
    let mut splits = 0usize;
    let root = build_drs_block(n, w_ub, &mut blocks, &mut splits);
    EncoderGraph {
        n,
        scheme: Scheme::Drs,
        w_ub,
        seed: 0,
        main_outputs: blocks[root].main_slots,
        bypass_outputs: 0,
        noise_count: 0,
        split_pair_count: splits,
        blocks,
        root,
    }
}

fn build_drs_block(
    depth: usize,
    w_ub: u64,
    blocks: &mut Vec<Block>,
    splits: &mut usize,
) -> usize {
    if depth == 0 {
        blocks.push(Block {
            depth: 0,
            main_slots: 1,
            groups: vec![Group {
                start: 0,
                len: 1,
                weight: 1,
            }],
            kind: BlockKind::Leaf,
        });
        return blocks.len() - 1;
    }
    let upper = build_drs_block(depth - 1, w_ub, blocks, splits);
    let lower = build_drs_block(depth - 1, w_ub, blocks, splits);
    let child_slots = blocks[upper].main_slots;
    let child_groups = blocks[upper].groups.clone();
    debug_assert_eq!(child_groups, blocks[lower].groups);

    let mut pairs: Vec<Option<Pair>> = vec![None; child_slots];
    let mut groups = Vec::with_capacity(2 * child_groups.len());
    let mut pos = 0usize;
    // left half: per original column, tail pieces then head pieces
    for g in &child_groups {
        let doubled = g.weight.saturating_mul(2);
        if doubled > w_ub {
            *splits += g.len;
            for (k, c) in (g.start..g.start + g.len).enumerate() {
                pairs[c] = Some(Pair::Split {
                    tail: pos + k,
                    head: pos + g.len + k,
                    right: usize::MAX, // patched below
                });
            }
            groups.push(Group {
                start: pos,
                len: 2 * g.len,
                weight: g.weight,
            });
            pos += 2 * g.len;
        } else {
            for c in g.start..g.start + g.len {
                pairs[c] = Some(Pair::Combine {
                    left: pos,
                    right: usize::MAX,
                });
                groups.push(Group {
                    start: pos,
                    len: 1,
                    weight: doubled,
                });
                pos += 1;
            }
        }
    }
    // right half: pass-throughs of the lower child's slots, in slot order
    let right_start = pos;
    for g in &child_groups {
        groups.push(Group {
            start: right_start + g.start,
            len: g.len,
            weight: g.weight,
        });
    }
    for (c, pair) in pairs.iter_mut().enumerate() {
        match pair.as_mut().expect("every child slot is paired") {
            Pair::Combine { right, .. } | Pair::Split { right, .. } => {
                *right = right_start + c;
            }
            Pair::AdrsSplit { .. } => unreachable!(),
        }
    }
    let main_slots = right_start + child_slots;
    blocks.push(Block {
        depth,
        main_slots,
        groups,
        kind: BlockKind::Internal {
            upper,
            lower,
            pairs: pairs.into_iter().map(Option::unwrap).collect(),
        },
    });
    blocks.len() - 1
}

struct AdrsBuilder {
    n_lub: usize,
    blocks: Vec<Block>,
    bypass: usize,
    noise: usize,
    splits: usize,
}

impl AdrsBuilder {
    /// `prefix` holds the path signs from the root (`true` = plus/lower).
    fn build(&mut self, depth: usize, prefix: &mut Vec<bool>) -> usize {
        if depth == 0 {
            self.blocks.push(Block {
                depth: 0,
                main_slots: 1,
                groups: Vec::new(),
                kind: BlockKind::Leaf,
            });
            return self.blocks.len() - 1;
        }
        prefix.push(false);
        let upper = self.build(depth - 1, prefix);
        prefix.pop();
        prefix.push(true);
        let lower = self.build(depth - 1, prefix);
        prefix.pop();

        let f = self.blocks[upper].main_slots;
        debug_assert_eq!(f, 1 << (depth - 1));
        let mut pairs = Vec::with_capacity(f);
        for c in 0..f {
            // lane `c` of the children carries suffix signs s_{j+1}..s_n with
            // minus count (depth-1) - popcount(c); this pair's own sign is
            // minus, so it splits when 1 + that count exceeds the threshold
            let suffix_minus = (depth - 1) - (c as u64).count_ones() as usize;
            if 1 + suffix_minus > self.n_lub {
                self.splits += 1;
                let noise = self.noise;
                self.noise += 1;
                let noise_rep = self.alloc_replica(prefix);
                let dup_rep = self.alloc_replica(prefix);
                pairs.push(Pair::AdrsSplit {
                    left: c,
                    right: f + c,
                    noise,
                    noise_rep,
                    dup_rep,
                });
            } else {
                pairs.push(Pair::Combine {
                    left: c,
                    right: f + c,
                });
            }
        }
        self.blocks.push(Block {
            depth,
            main_slots: 2 * f,
            groups: Vec::new(),
            kind: BlockKind::Internal {
                upper,
                lower,
                pairs,
            },
        });
        self.blocks.len() - 1
    }

    fn alloc_replica(&mut self, prefix: &[bool]) -> Replica {
        let rep = Replica {
            prefix: prefix.to_vec(),
            slot_start: self.bypass,
            noise_start: self.noise,
        };
        self.bypass += rep.slot_count();
        self.noise += Replica::noise_count(prefix);
        rep
    }
}
