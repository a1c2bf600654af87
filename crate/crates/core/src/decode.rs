//! Successive-cancellation decoders.
//!
//! Two domains:
//! - a three-valued erasure decoder for standard/split graphs over the BEC,
//!   which propagates erasures and never flips a known bit;
//! - an LLR decoder for all graph families, with exact box-plus (no min-sum
//!   approximation) and hard decisions by sign, ties to 0.
//!
//! Noise bits of augmented graphs are never revealed to the decoder; their
//! replicas are combined through the same box-plus/sum recursion, which
//! marginalizes them.

use crate::channels::DiscreteBms;
use crate::graph::{BlockKind, EncoderGraph, Pair, Replica, Scheme};
use crate::kernel::BitVector;
use crate::{Error, Result};
use rand::Rng;

pub use crate::channels::TriSymbol;

/// Output of the erasure decoder.
#[derive(Debug, Clone)]
pub struct BecDecodeOutput {
    /// per-input estimate; may contain erasures
    pub estimates: Vec<TriSymbol>,
    pub op_count: u64,
    /// set when observations contradict each other (impossible on a true BEC)
    pub inconsistent: bool,
}

/// Output of the LLR decoder.
#[derive(Debug, Clone)]
pub struct LlrDecodeOutput {
    pub estimates: Vec<u8>,
    pub op_count: u64,
}

/// Output of a genie-aided LLR decode: every decision is graded against the
/// true message and then corrected before decoding continues.
#[derive(Debug, Clone)]
pub struct GenieDecodeOutput {
    /// per-input: did the decision differ from the truth?
    pub bit_errors: Vec<bool>,
    pub op_count: u64,
}

/// Erasure-domain SC decode. Rejects augmented graphs, whose noise bits have
/// no erasure semantics.
pub fn decode_bec(
    graph: &EncoderGraph,
    frozen: &[bool],
    y: &[TriSymbol],
) -> Result<BecDecodeOutput> {
    if graph.scheme() == Scheme::Adrs {
        return Err(Error::UnsupportedScheme(
            "erasure decoder does not handle augmented graphs".into(),
        ));
    }
    check_lengths(graph, frozen, y.len())?;
    let mut dec = BecDec {
        graph,
        frozen,
        estimates: vec![TriSymbol::Erased; graph.input_len()],
        ops: 0,
        inconsistent: false,
    };
    let root_obs = y.to_vec();
    dec.run(graph_root(graph), root_obs, 0);
    Ok(BecDecodeOutput {
        estimates: dec.estimates,
        op_count: dec.ops,
        inconsistent: dec.inconsistent,
    })
}

/// LLR-domain SC decode for any scheme. `llrs` holds one value per channel
/// use, `ln(P(y|0)/P(y|1))`.
pub fn decode_llr(graph: &EncoderGraph, frozen: &[bool], llrs: &[f64]) -> Result<LlrDecodeOutput> {
    check_lengths(graph, frozen, llrs.len())?;
    let mut dec = LlrDec {
        graph,
        frozen,
        llrs,
        truth: None,
        estimates: vec![0u8; graph.input_len()],
        bit_errors: Vec::new(),
        ops: 0,
    };
    let root = root_llrs(graph, llrs);
    dec.run(graph_root(graph), root, 0);
    Ok(LlrDecodeOutput {
        estimates: dec.estimates,
        op_count: dec.ops,
    })
}

/// Genie-aided LLR decode: grades each bit decision against `truth`, then
/// continues from the truth. Isolates per-bit channels for construction and
/// for bit-channel equivalence checks. All bits are treated as information
/// bits (no frozen set).
pub fn decode_llr_genie(
    graph: &EncoderGraph,
    llrs: &[f64],
    truth: &BitVector,
) -> Result<GenieDecodeOutput> {
    if truth.len() != graph.input_len() {
        return Err(Error::DimensionMismatch("truth length".into()));
    }
    if llrs.len() != graph.channel_uses() {
        return Err(Error::DimensionMismatch("llr vector length".into()));
    }
    let truth_bits = truth.to_bytes();
    let frozen = vec![false; graph.input_len()];
    let mut dec = LlrDec {
        graph,
        frozen: &frozen,
        llrs,
        truth: Some(&truth_bits),
        estimates: vec![0u8; graph.input_len()],
        bit_errors: vec![false; graph.input_len()],
        ops: 0,
    };
    let root = root_llrs(graph, llrs);
    dec.run(graph_root(graph), root, 0);
    Ok(GenieDecodeOutput {
        bit_errors: dec.bit_errors,
        op_count: dec.ops,
    })
}

/// Mean node evaluations per decode over a list of graphs, keyed by source
/// length.
pub fn complexity_profile(
    graphs: &[&EncoderGraph],
    w: &DiscreteBms,
    trials: u64,
    seed: u64,
) -> Vec<(usize, f64)> {
    graphs
        .iter()
        .map(|g| (g.input_len(), mean_op_count(g, w, trials, seed)))
        .collect()
}

/// Mean decoder node evaluations over random transmissions of all-zero-free
/// random messages (no frozen bits) through `w`.
pub fn mean_op_count(graph: &EncoderGraph, w: &DiscreteBms, trials: u64, seed: u64) -> f64 {
    use rand::SeedableRng;
    let frozen = vec![false; graph.input_len()];
    let mut total = 0u64;
    for t in 0..trials {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let mut u = BitVector::zeros(graph.input_len());
        for i in 0..graph.input_len() {
            if rng.gen::<bool>() {
                u.set(i, true);
            }
        }
        let x = graph.encode_rng(&u, &mut rng).unwrap();
        let llrs: Vec<f64> = x
            .iter_bits()
            .map(|b| w.llr(w.sample(b as u8, &mut rng)))
            .collect();
        total += decode_llr(graph, &frozen, &llrs).unwrap().op_count;
    }
    total as f64 / trials as f64
}

fn check_lengths(graph: &EncoderGraph, frozen: &[bool], y_len: usize) -> Result<()> {
    if frozen.len() != graph.input_len() {
        return Err(Error::DimensionMismatch(format!(
            "frozen mask length {} vs {}",
            frozen.len(),
            graph.input_len()
        )));
    }
    if y_len != graph.channel_uses() {
        return Err(Error::DimensionMismatch(format!(
            "received length {} vs {} channel uses",
            y_len,
            graph.channel_uses()
        )));
    }
    Ok(())
}

fn graph_root(graph: &EncoderGraph) -> usize {
    graph.root
}

/// The root block's own observation slice (replica slots are accessed
/// globally by the recursion, not through the root block).
fn root_llrs(graph: &EncoderGraph, llrs: &[f64]) -> Vec<f64> {
    llrs[..graph.main_outputs].to_vec()
}

/// Exact log-domain box-plus with saturation cases.
pub fn boxplus(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if a.is_infinite() {
        return if a > 0.0 { b } else { -b };
    }
    if b.is_infinite() {
        return if b > 0.0 { a } else { -a };
    }
    let sign = a.signum() * b.signum();
    let m = a.abs().min(b.abs());
    sign * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// LLR addition of independent observations; opposite infinities cancel to 0
/// (cannot arise from consistent inputs).
pub fn add_llr(a: f64, b: f64) -> f64 {
    if a.is_infinite() && b.is_infinite() && a.signum() != b.signum() {
        return 0.0;
    }
    a + b
}

struct BecDec<'a> {
    graph: &'a EncoderGraph,
    frozen: &'a [bool],
    estimates: Vec<TriSymbol>,
    ops: u64,
    inconsistent: bool,
}

impl<'a> BecDec<'a> {
    /// Returns re-encoded slot values, merged with direct observations.
    fn run(&mut self, block_id: usize, obs: Vec<TriSymbol>, offset: usize) -> Vec<TriSymbol> {
        let block = self.graph.block(block_id);
        match &block.kind {
            BlockKind::Leaf => {
                self.ops += 1;
                let est = if self.frozen[offset] {
                    if !obs[0].is_erased() && obs[0] != TriSymbol::Zero {
                        self.inconsistent = true;
                    }
                    TriSymbol::Zero
                } else {
                    obs[0]
                };
                self.estimates[offset] = est;
                vec![est]
            }
            BlockKind::Internal {
                upper,
                lower,
                pairs,
            } => {
                let half = 1 << (block.depth - 1);
                // upper pass: the odd-position rules
                let mut up_obs = Vec::with_capacity(pairs.len());
                for pair in pairs {
                    self.ops += 1;
                    up_obs.push(match pair {
                        Pair::Combine { left, right } => obs[*left].xor(obs[*right]),
                        Pair::Split { head, .. } => obs[*head],
                        Pair::AdrsSplit { .. } => unreachable!("rejected above"),
                    });
                }
                let up_vals = self.run(*upper, up_obs, offset);
                // lower pass: the even-position rules, with the decoded upper
                // values as side information
                let mut low_obs = Vec::with_capacity(pairs.len());
                for (c, pair) in pairs.iter().enumerate() {
                    self.ops += 1;
                    low_obs.push(match pair {
                        Pair::Combine { left, right } => {
                            self.even_unsplit(obs[*left], obs[*right], up_vals[c])
                        }
                        Pair::Split { tail, right, .. } => {
                            self.even_split(obs[*tail], obs[*right])
                        }
                        Pair::AdrsSplit { .. } => unreachable!(),
                    });
                }
                let low_vals = self.run(*lower, low_obs, offset + half);
                // re-encode, preferring direct observations where present
                let mut out = vec![TriSymbol::Erased; block.main_slots];
                for (c, pair) in pairs.iter().enumerate() {
                    match pair {
                        Pair::Combine { left, right } => {
                            out[*left] = merge(obs[*left], up_vals[c].xor(low_vals[c]));
                            out[*right] = merge(obs[*right], low_vals[c]);
                        }
                        Pair::Split { tail, head, right } => {
                            out[*tail] = merge(obs[*tail], low_vals[c]);
                            out[*head] = merge(obs[*head], up_vals[c]);
                            out[*right] = merge(obs[*right], low_vals[c]);
                        }
                        Pair::AdrsSplit { .. } => unreachable!(),
                    }
                }
                out
            }
        }
    }

    /// Even index, unsplit pair: recover the pass-through bit from its own
    /// slot or from the XOR slot plus the decoded upper bit; contradictory
    /// non-erased views mark the decode inconsistent.
    fn even_unsplit(&mut self, left: TriSymbol, right: TriSymbol, up: TriSymbol) -> TriSymbol {
        match (right.is_erased(), left.is_erased()) {
            (false, true) => right,
            (false, false) => {
                if !up.is_erased() && left.xor(up) != right {
                    self.inconsistent = true;
                    TriSymbol::Erased
                } else {
                    right
                }
            }
            (true, false) => {
                if up.is_erased() {
                    TriSymbol::Erased
                } else {
                    left.xor(up)
                }
            }
            (true, true) => TriSymbol::Erased,
        }
    }

    /// Even index, split pair: two direct copies must agree.
    fn even_split(&mut self, a: TriSymbol, b: TriSymbol) -> TriSymbol {
        match (a.is_erased(), b.is_erased()) {
            (false, true) => a,
            (true, false) => b,
            (false, false) => {
                if a == b {
                    a
                } else {
                    self.inconsistent = true;
                    TriSymbol::Erased
                }
            }
            (true, true) => TriSymbol::Erased,
        }
    }
}

fn merge(direct: TriSymbol, recomputed: TriSymbol) -> TriSymbol {
    if direct.is_erased() {
        recomputed
    } else {
        direct
    }
}

struct LlrDec<'a> {
    graph: &'a EncoderGraph,
    frozen: &'a [bool],
    /// full channel LLR vector, including replica slots
    llrs: &'a [f64],
    truth: Option<&'a [u8]>,
    estimates: Vec<u8>,
    bit_errors: Vec<bool>,
    ops: u64,
}

impl<'a> LlrDec<'a> {
    /// Returns the re-encoded slot values of the block.
    fn run(&mut self, block_id: usize, llr: Vec<f64>, offset: usize) -> Vec<u8> {
        let block = self.graph.block(block_id);
        match &block.kind {
            BlockKind::Leaf => {
                self.ops += 1;
                let mut est = if self.frozen[offset] {
                    0
                } else {
                    (llr[0] < 0.0) as u8
                };
                if let Some(truth) = self.truth {
                    self.bit_errors[offset] = est != truth[offset];
                    est = truth[offset];
                }
                self.estimates[offset] = est;
                vec![est]
            }
            BlockKind::Internal {
                upper,
                lower,
                pairs,
            } => {
                let half = 1 << (block.depth - 1);
                let mut up_llr = Vec::with_capacity(pairs.len());
                for pair in pairs {
                    self.ops += 1;
                    up_llr.push(match pair {
                        Pair::Combine { left, right } => boxplus(llr[*left], llr[*right]),
                        Pair::Split { head, .. } => llr[*head],
                        Pair::AdrsSplit {
                            left, noise_rep, ..
                        } => {
                            let rep = self.replica_llr(noise_rep);
                            boxplus(llr[*left], rep)
                        }
                    });
                }
                let up_vals = self.run(*upper, up_llr, offset);
                let mut low_llr = Vec::with_capacity(pairs.len());
                for (c, pair) in pairs.iter().enumerate() {
                    self.ops += 1;
                    low_llr.push(match pair {
                        Pair::Combine { left, right } => {
                            let flipped = if up_vals[c] == 1 { -llr[*left] } else { llr[*left] };
                            add_llr(flipped, llr[*right])
                        }
                        Pair::Split { tail, right, .. } => add_llr(llr[*tail], llr[*right]),
                        Pair::AdrsSplit { right, dup_rep, .. } => {
                            let rep = self.replica_llr(dup_rep);
                            add_llr(llr[*right], rep)
                        }
                    });
                }
                let low_vals = self.run(*lower, low_llr, offset + half);
                let mut out = vec![0u8; block.main_slots];
                for (c, pair) in pairs.iter().enumerate() {
                    match pair {
                        Pair::Combine { left, right } => {
                            out[*left] = up_vals[c] ^ low_vals[c];
                            out[*right] = low_vals[c];
                        }
                        Pair::Split { tail, head, right } => {
                            out[*tail] = low_vals[c];
                            out[*head] = up_vals[c];
                            out[*right] = low_vals[c];
                        }
                        Pair::AdrsSplit { left, right, .. } => {
                            // the left slot's true value involves an unknown
                            // noise bit; every consumer of this lane is itself
                            // a split pair, so the value is never XORed in
                            out[*left] = up_vals[c];
                            out[*right] = low_vals[c];
                        }
                    }
                }
                out
            }
        }
    }

    /// LLR of a replica's payload from its channel observations: plus levels
    /// duplicate (sum), minus levels hide behind a fresh unknown (box-plus).
    fn replica_llr(&mut self, rep: &Replica) -> f64 {
        let range = self.graph.replica_slots(rep);
        let slots = &self.llrs[range];
        self.replica_llr_rec(&rep.prefix, slots)
    }

    fn replica_llr_rec(&mut self, prefix: &[bool], slots: &[f64]) -> f64 {
        match prefix.split_last() {
            None => slots[0],
            Some((&plus, rest)) => {
                self.ops += 1;
                let half = slots.len() / 2;
                let a = self.replica_llr_rec(rest, &slots[..half]);
                let b = self.replica_llr_rec(rest, &slots[half..]);
                if plus {
                    add_llr(a, b)
                } else {
                    boxplus(a, b)
                }
            }
        }
    }
}
