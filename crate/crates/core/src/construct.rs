//! Code construction: per-source-bit reliabilities, frozen-set selection, and
//! assembly of a usable code.
//!
//! Over the erasure channel the split graphs admit an exact reliability
//! recursion; every other combination is estimated by genie-aided Monte
//! Carlo, where each decision is graded against the truth and corrected, so
//! each bit's first-error rate is measured in isolation.

use crate::channels::DiscreteBms;
use crate::decode;
use crate::graph::{write_graph, BlockKind, EncoderGraph, Pair, Scheme};
use crate::kernel::BitVector;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// What the numbers in a [`ReliabilityTable`] mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReliabilitySemantics {
    /// exact erasure probability of each bit-channel
    ExactBecErasure,
    /// genie-aided Monte Carlo first-error rate
    McGenieErrorRate,
}

impl std::fmt::Display for ReliabilitySemantics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReliabilitySemantics::ExactBecErasure => write!(f, "exact-bec-erasure"),
            ReliabilitySemantics::McGenieErrorRate => write!(f, "mc-genie-error-rate"),
        }
    }
}

/// Per-source-bit unreliability, lower is better.
#[derive(Debug, Clone)]
pub struct ReliabilityTable {
    pub values: Vec<f64>,
    pub semantics: ReliabilitySemantics,
    /// Monte Carlo sample count; 0 for exact tables.
    pub trials: u64,
    /// 95% confidence radius per value; empty for exact tables.
    pub radius: Vec<f64>,
}

/// Exact per-bit erasure probabilities for standard/split graphs over a BEC.
///
/// Right-to-left recursion from the channel slots toward the sources: a
/// combine pair maps slot erasure rates (a, b) to a+b-ab upstairs and ab
/// downstairs; a split pair passes the head slot upstairs and the product of
/// its two copies downstairs.
pub fn bec_reliabilities(graph: &EncoderGraph, epsilon: f64) -> Result<ReliabilityTable> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidProbability(epsilon));
    }
    if graph.scheme() == Scheme::Adrs {
        return Err(Error::UnsupportedScheme(
            "exact erasure recursion does not handle augmented graphs; use Monte Carlo".into(),
        ));
    }
    let root_eps = vec![epsilon; graph.channel_uses()];
    let mut values = Vec::with_capacity(graph.input_len());
    bec_rec(graph, graph_root(graph), root_eps, &mut values);
    Ok(ReliabilityTable {
        values,
        semantics: ReliabilitySemantics::ExactBecErasure,
        trials: 0,
        radius: Vec::new(),
    })
}

fn graph_root(graph: &EncoderGraph) -> usize {
    graph.root
}

fn bec_rec(graph: &EncoderGraph, block_id: usize, eps: Vec<f64>, out: &mut Vec<f64>) {
    let block = graph.block(block_id);
    match &block.kind {
        BlockKind::Leaf => out.push(eps[0]),
        BlockKind::Internal {
            upper,
            lower,
            pairs,
        } => {
            let mut up_eps = Vec::with_capacity(pairs.len());
            let mut low_eps = Vec::with_capacity(pairs.len());
            for pair in pairs {
                match pair {
                    Pair::Combine { left, right } => {
                        let (a, b) = (eps[*left], eps[*right]);
                        up_eps.push(a + b - a * b);
                        low_eps.push(a * b);
                    }
                    Pair::Split { tail, head, right } => {
                        up_eps.push(eps[*head]);
                        low_eps.push(eps[*tail] * eps[*right]);
                    }
                    Pair::AdrsSplit { .. } => unreachable!("rejected above"),
                }
            }
            bec_rec(graph, *upper, up_eps, out);
            bec_rec(graph, *lower, low_eps, out);
        }
    }
}

/// Genie-aided Monte Carlo reliability estimation for any scheme/channel.
/// Deterministic given the seed, regardless of thread count.
pub fn mc_reliabilities(
    graph: &EncoderGraph,
    w: &DiscreteBms,
    trials: u64,
    seed: u64,
) -> Result<ReliabilityTable> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let n_in = graph.input_len();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; n_in],
            |mut acc, trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                let mut u = BitVector::zeros(n_in);
                for i in 0..n_in {
                    if rng.gen::<bool>() {
                        u.set(i, true);
                    }
                }
                let x = graph.encode_rng(&u, &mut rng).unwrap();
                let llrs: Vec<f64> = x
                    .iter_bits()
                    .map(|b| w.llr(w.sample(b as u8, &mut rng)))
                    .collect();
                let out = decode::decode_llr_genie(graph, &llrs, &u).unwrap();
                for (a, e) in acc.iter_mut().zip(&out.bit_errors) {
                    *a += *e as u64;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n_in],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    let values: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let radius: Vec<f64> = counts
        .iter()
        .map(|&c| {
            let (lo, hi) = crate::sim::wilson_interval(c, trials);
            (hi - lo) / 2.0
        })
        .collect();
    Ok(ReliabilityTable {
        values,
        semantics: ReliabilitySemantics::McGenieErrorRate,
        trials,
        radius,
    })
}

/// Which reliability table ranks the bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrozenRule {
    /// Rank by the unsplit (standard) graph's table and reuse the indices
    /// for the split code. The default.
    MatchStandard,
    /// Rank by the code's own graph table.
    Direct,
}

/// Frozen mask keeping the `k` most reliable indices as information bits;
/// ties break toward the lower index.
pub fn select_frozen(table: &ReliabilityTable, k: usize) -> Result<Vec<bool>> {
    let n = table.values.len();
    if k > n {
        return Err(Error::InvalidParameter(format!("K={} exceeds N={}", k, n)));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        table.values[a]
            .partial_cmp(&table.values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut frozen = vec![true; n];
    for &i in order.iter().take(k) {
        frozen[i] = false;
    }
    Ok(frozen)
}

/// A ready-to-use code: graph, frozen set (frozen bits transmit zero), and
/// the reliability table that selected it.
#[derive(Debug, Clone)]
pub struct PolarBasedCode {
    pub graph: EncoderGraph,
    pub frozen: Vec<bool>,
    pub k: usize,
    pub reliabilities: ReliabilityTable,
    /// target error-decay exponent, recorded for bookkeeping only
    pub beta: Option<f64>,
}

impl PolarBasedCode {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn block_len(&self) -> usize {
        self.graph.channel_uses()
    }

    pub fn rate_raw(&self) -> f64 {
        self.k as f64 / self.graph.input_len() as f64
    }

    pub fn rate_adjusted(&self) -> f64 {
        self.k as f64 / self.graph.channel_uses() as f64
    }

    pub fn info_indices(&self) -> Vec<usize> {
        (0..self.frozen.len()).filter(|&i| !self.frozen[i]).collect()
    }

    /// Spread `k` information bits over the unfrozen positions (frozen bits
    /// zero) and return the full source word.
    pub fn place_message(&self, info: &[u8]) -> Result<BitVector> {
        if info.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "message length {} vs K={}",
                info.len(),
                self.k
            )));
        }
        let mut u = BitVector::zeros(self.graph.input_len());
        for (bit, idx) in info.iter().zip(self.info_indices()) {
            if *bit != 0 {
                u.set(idx, true);
            }
        }
        Ok(u)
    }

    /// Sum of the selected bit reliabilities: the union bound on block error.
    pub fn union_bound(&self) -> f64 {
        self.info_indices()
            .iter()
            .map(|&i| self.reliabilities.values[i])
            .sum()
    }
}

/// Assemble a code. For erasure channels the standard/split reliabilities are
/// exact; augmented graphs and non-erasure channels use genie-aided Monte
/// Carlo with `mc_trials` samples.
#[allow(clippy::too_many_arguments)]
pub fn build_code(
    n: usize,
    w_ub: u64,
    scheme: Scheme,
    channel: &DiscreteBms,
    k: usize,
    rule: FrozenRule,
    seed: u64,
    mc_trials: u64,
) -> Result<PolarBasedCode> {
    let graph = match scheme {
        Scheme::Standard => EncoderGraph::standard(n),
        Scheme::Drs => EncoderGraph::drs(n, w_ub),
        Scheme::Adrs => {
            let mut g = EncoderGraph::adrs(n, w_ub, seed);
            g.seed = seed;
            g
        }
    };
    let ranking_graph = match rule {
        FrozenRule::MatchStandard => EncoderGraph::standard(n),
        FrozenRule::Direct => graph.clone(),
    };
    let table = reliabilities_for(&ranking_graph, channel, seed, mc_trials)?;
    let frozen = select_frozen(&table, k)?;
    Ok(PolarBasedCode {
        graph,
        frozen,
        k,
        reliabilities: table,
        beta: None,
    })
}

/// Exact table when possible, Monte Carlo otherwise.
pub fn reliabilities_for(
    graph: &EncoderGraph,
    channel: &DiscreteBms,
    seed: u64,
    mc_trials: u64,
) -> Result<ReliabilityTable> {
    match channel.bec_epsilon() {
        Some(eps) if graph.scheme() != Scheme::Adrs => bec_reliabilities(graph, eps),
        _ => mc_reliabilities(graph, channel, mc_trials.max(1), seed),
    }
}

pub const CODE_MAGIC: &str = "sparse-polar-code v1";

/// Serialize a code: graph section, frozen mask, reliability table.
pub fn write_code(code: &PolarBasedCode) -> String {
    let mut s = String::new();
    s.push_str(CODE_MAGIC);
    s.push('\n');
    s.push_str(&write_graph(&code.graph));
    s.push_str(&format!("k {}\n", code.k));
    if let Some(beta) = code.beta {
        s.push_str(&format!("beta {}\n", beta));
    }
    let mask: String = code
        .frozen
        .iter()
        .map(|&f| if f { '1' } else { '0' })
        .collect();
    s.push_str(&format!("frozen {}\n", mask));
    s.push_str(&format!(
        "reliability {} {}\n",
        code.reliabilities.semantics, code.reliabilities.trials
    ));
    for (i, v) in code.reliabilities.values.iter().enumerate() {
        let r = code.reliabilities.radius.get(i).copied().unwrap_or(0.0);
        s.push_str(&format!("rel {} {}\n", v, r));
    }
    s.push_str("end-code\n");
    s
}

/// Parse a serialized code.
pub fn read_code(text: &str) -> Result<PolarBasedCode> {
    let mut lines = text.lines();
    let magic = lines
        .next()
        .ok_or_else(|| Error::Parse("empty code file".into()))?;
    if magic.trim() != CODE_MAGIC {
        return Err(Error::Parse(format!("bad magic line '{}'", magic)));
    }
    let graph = crate::graph::serial::read_graph_from_lines(&mut lines)?;
    let mut k = None;
    let mut beta = None;
    let mut frozen: Option<Vec<bool>> = None;
    let mut semantics = ReliabilitySemantics::ExactBecErasure;
    let mut trials = 0u64;
    let mut values = Vec::new();
    let mut radius = Vec::new();
    for line in lines {
        let line = line.trim();
        if line == "end-code" {
            let frozen = frozen.ok_or_else(|| Error::Parse("missing frozen mask".into()))?;
            let k = k.ok_or_else(|| Error::Parse("missing k".into()))?;
            if frozen.len() != graph.input_len() {
                return Err(Error::Parse("frozen mask length mismatch".into()));
            }
            if frozen.iter().filter(|&&f| !f).count() != k {
                return Err(Error::Parse("frozen mask does not match k".into()));
            }
            if values.len() != graph.input_len() {
                return Err(Error::Parse("reliability table length mismatch".into()));
            }
            return Ok(PolarBasedCode {
                graph,
                frozen,
                k,
                reliabilities: ReliabilityTable {
                    values,
                    semantics,
                    trials,
                    radius,
                },
                beta,
            });
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("k") => {
                k = Some(
                    it.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::Parse("bad k".into()))?,
                )
            }
            Some("beta") => {
                beta = it.next().and_then(|t| t.parse().ok());
            }
            Some("frozen") => {
                let mask = it.next().unwrap_or("");
                frozen = Some(
                    mask.chars()
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            other => Err(Error::Parse(format!("bad frozen char '{}'", other))),
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            Some("reliability") => {
                semantics = match it.next() {
                    Some("exact-bec-erasure") => ReliabilitySemantics::ExactBecErasure,
                    Some("mc-genie-error-rate") => ReliabilitySemantics::McGenieErrorRate,
                    other => {
                        return Err(Error::Parse(format!("bad semantics {:?}", other)))
                    }
                };
                trials = it.next().and_then(|t| t.parse().ok()).unwrap_or(0);
            }
            Some("rel") => {
                let v: f64 = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse("bad rel value".into()))?;
                let r: f64 = it.next().and_then(|t| t.parse().ok()).unwrap_or(0.0);
                values.push(v);
                radius.push(r);
            }
            Some(other) => return Err(Error::Parse(format!("unknown code line '{}'", other))),
            None => {}
        }
    }
    Err(Error::Parse("unterminated code section".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::TriSymbol;

    #[test]
    fn standard_depth1_reliabilities() {
        let g = EncoderGraph::standard(1);
        let t = bec_reliabilities(&g, 0.5).unwrap();
        assert!((t.values[0] - 0.75).abs() < 1e-15);
        assert!((t.values[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn split_kernel_reliabilities() {
        // split 2x2 kernel: the upper bit sees one clean observation, the
        // lower bit two
        let g = EncoderGraph::drs(1, 1);
        let t = bec_reliabilities(&g, 0.5).unwrap();
        assert!((t.values[0] - 0.5).abs() < 1e-15);
        assert!((t.values[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn adrs_rejected_by_exact_recursion() {
        let g = EncoderGraph::adrs(2, 1, 0);
        assert!(bec_reliabilities(&g, 0.5).is_err());
    }

    #[test]
    fn split_dominates_standard_small() {
        for n in 1..=8usize {
            let std_g = EncoderGraph::standard(n);
            for eps in [0.1, 0.5, 0.9] {
                let std_t = bec_reliabilities(&std_g, eps).unwrap();
                for wexp in 0..=n {
                    let g = EncoderGraph::drs(n, 1 << wexp);
                    let t = bec_reliabilities(&g, eps).unwrap();
                    for i in 0..(1 << n) {
                        assert!(
                            t.values[i] <= std_t.values[i] + 1e-12,
                            "n={} w=2^{} eps={} bit {}",
                            n,
                            wexp,
                            eps,
                            i
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn mc_matches_exact_on_bec() {
        // a genie-aided decision on an erased bit-channel is a coin flip, so
        // the first-error rate is exactly half the erasure probability
        let g = EncoderGraph::drs(4, 4);
        let w = DiscreteBms::bec(0.4).unwrap();
        let exact = bec_reliabilities(&g, 0.4).unwrap();
        let trials = 20_000u64;
        let mc = mc_reliabilities(&g, &w, trials, 42).unwrap();
        for i in 0..16 {
            let p = exact.values[i] / 2.0;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (mc.values[i] - p).abs() <= 3.0 * sigma + 1e-3,
                "bit {}: mc {} exact erasure/2 {}",
                i,
                mc.values[i],
                p
            );
        }
    }

    #[test]
    fn mc_noiseless_is_zero() {
        let g = EncoderGraph::adrs(2, 1, 5);
        let w = DiscreteBms::bsc(0.0).unwrap();
        let t = mc_reliabilities(&g, &w, 500, 3).unwrap();
        assert!(t.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn frozen_selection() {
        let g = EncoderGraph::standard(1);
        let t = bec_reliabilities(&g, 0.5).unwrap();
        // K = N: nothing frozen
        assert_eq!(select_frozen(&t, 2).unwrap(), vec![false, false]);
        // K = 1: freeze the worse bit (index 0 at 0.75)
        assert_eq!(select_frozen(&t, 1).unwrap(), vec![true, false]);
        assert!(select_frozen(&t, 3).is_err());
    }

    #[test]
    fn selection_rules_coincide_without_splits() {
        let w = DiscreteBms::bec(0.5).unwrap();
        let a = build_code(4, 16, Scheme::Drs, &w, 8, FrozenRule::MatchStandard, 0, 0).unwrap();
        let b = build_code(4, 16, Scheme::Drs, &w, 8, FrozenRule::Direct, 0, 0).unwrap();
        assert_eq!(a.frozen, b.frozen);
    }

    #[test]
    fn determinism_of_mc_tables() {
        let g = EncoderGraph::adrs(3, 2, 7);
        let w = DiscreteBms::bsc(0.1).unwrap();
        let a = mc_reliabilities(&g, &w, 2000, 11).unwrap();
        let b = mc_reliabilities(&g, &w, 2000, 11).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn code_rates_and_round_trip() {
        let w = DiscreteBms::bec(0.5).unwrap();
        let code = build_code(4, 2, Scheme::Drs, &w, 6, FrozenRule::MatchStandard, 0, 0).unwrap();
        assert!((code.rate_raw() - 6.0 / 16.0).abs() < 1e-15);
        assert!(
            (code.rate_adjusted() - 6.0 / code.block_len() as f64).abs() < 1e-15
        );
        assert!(code.rate_adjusted() <= code.rate_raw());
        let text = write_code(&code);
        let back = read_code(&text).unwrap();
        assert_eq!(back.frozen, code.frozen);
        assert_eq!(back.k, code.k);
        assert_eq!(back.graph, code.graph);
        assert_eq!(back.reliabilities.values, code.reliabilities.values);
    }

    #[test]
    fn encode_then_decode_roundtrip_via_code() {
        let w = DiscreteBms::bec(0.3).unwrap();
        let code = build_code(3, 2, Scheme::Drs, &w, 4, FrozenRule::MatchStandard, 0, 0).unwrap();
        let info = [1u8, 0, 1, 1];
        let u = code.place_message(&info).unwrap();
        let x = code.graph.encode_seeded(&u, 0);
        let y: Vec<TriSymbol> = x.iter_bits().map(|b| TriSymbol::from_bit(b as u8)).collect();
        let out = crate::decode::decode_bec(&code.graph, &code.frozen, &y).unwrap();
        for (idx, bit) in code.info_indices().into_iter().zip(info) {
            assert_eq!(out.estimates[idx], TriSymbol::from_bit(bit));
        }
    }
}
