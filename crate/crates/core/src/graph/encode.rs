//! Encoding: evaluate the graph on a source word, plus generator-matrix
//! extraction by encoding unit vectors.

use super::{BlockKind, EncoderGraph, Pair, Replica};
use crate::kernel::{BitMatrix, BitVector};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

impl EncoderGraph {
    /// Encode with explicit noise bits (length must equal `noise_bits()`).
    /// Standard and split graphs take an empty slice.
    pub fn encode_with_noise(&self, u: &BitVector, noise: &[u8]) -> Result<BitVector> {
        if u.len() != self.input_len() {
            return Err(Error::DimensionMismatch(format!(
                "message length {} vs {}",
                u.len(),
                self.input_len()
            )));
        }
        if noise.len() != self.noise_count {
            return Err(Error::DimensionMismatch(format!(
                "noise length {} vs {}",
                noise.len(),
                self.noise_count
            )));
        }
        let input: Vec<u8> = u.iter_bits().map(|b| b as u8).collect();
        let mut bypass = vec![0u8; self.bypass_outputs];
        let main = self.eval_block(self.root, &input, noise, &mut bypass);
        debug_assert_eq!(main.len(), self.main_outputs);
        let mut out = BitVector::zeros(self.channel_uses());
        for (i, &b) in main.iter().chain(bypass.iter()).enumerate() {
            if b != 0 {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Encode, drawing noise bits from the caller's generator.
    pub fn encode_rng<R: Rng + ?Sized>(&self, u: &BitVector, rng: &mut R) -> Result<BitVector> {
        let noise: Vec<u8> = (0..self.noise_count).map(|_| rng.gen::<bool>() as u8).collect();
        self.encode_with_noise(u, &noise)
    }

    /// Deterministic encode: noise bits come from the graph seed and a trial
    /// index, so repeated calls agree across processes.
    pub fn encode_seeded(&self, u: &BitVector, trial: u64) -> BitVector {
        let mut rng = self.noise_rng(trial);
        self.encode_rng(u, &mut rng).expect("length checked by caller")
    }

    /// Per-trial noise stream derived from the stored seed.
    pub fn noise_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    /// The matrix the graph realizes: row `i` is the encoding of the `i`-th
    /// unit vector, with all noise bits forced to zero.
    pub fn generator_matrix(&self) -> BitMatrix {
        let n = self.input_len();
        let noise = vec![0u8; self.noise_count];
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let e = BitVector::unit(n, i);
            rows.push(self.encode_with_noise(&e, &noise).unwrap().to_bytes());
        }
        BitMatrix::from_rows(&rows).unwrap()
    }

    fn eval_block(&self, id: usize, input: &[u8], noise: &[u8], bypass: &mut [u8]) -> Vec<u8> {
        let block = self.block(id);
        match &block.kind {
            BlockKind::Leaf => vec![input[0]],
            BlockKind::Internal {
                upper,
                lower,
                pairs,
            } => {
                let half = input.len() / 2;
                let up = self.eval_block(*upper, &input[..half], noise, bypass);
                let low = self.eval_block(*lower, &input[half..], noise, bypass);
                let mut out = vec![0u8; block.main_slots];
                for (c, pair) in pairs.iter().enumerate() {
                    match pair {
                        Pair::Combine { left, right } => {
                            out[*left] = up[c] ^ low[c];
                            out[*right] = low[c];
                        }
                        Pair::Split { tail, head, right } => {
                            out[*tail] = low[c];
                            out[*head] = up[c];
                            out[*right] = low[c];
                        }
                        Pair::AdrsSplit {
                            left,
                            right,
                            noise: noise_idx,
                            noise_rep,
                            dup_rep,
                        } => {
                            let nb = noise[*noise_idx];
                            out[*left] = up[c] ^ nb;
                            out[*right] = low[c];
                            self.fill_replica(noise_rep, nb, noise, bypass);
                            self.fill_replica(dup_rep, low[c], noise, bypass);
                        }
                    }
                }
                out
            }
        }
    }

    fn fill_replica(&self, rep: &Replica, payload: u8, noise: &[u8], bypass: &mut [u8]) {
        let slots = &mut bypass[rep.slot_start..rep.slot_start + rep.slot_count()];
        let mut cursor = rep.noise_start;
        fill_rec(&rep.prefix, payload, slots, noise, &mut cursor);
        debug_assert_eq!(cursor, rep.noise_start + Replica::noise_count(&rep.prefix));
    }
}

/// Recursive replica layout. The last prefix sign drives the top: a plus
/// level duplicates the payload into both halves (the would-be partner is a
/// pinned zero), a minus level injects a fresh unknown: payload ^ v on one
/// side, v on the other.
fn fill_rec(prefix: &[bool], payload: u8, slots: &mut [u8], noise: &[u8], cursor: &mut usize) {
    match prefix.split_last() {
        None => slots[0] = payload,
        Some((&plus, rest)) => {
            let half = slots.len() / 2;
            let (a, b) = slots.split_at_mut(half);
            if plus {
                fill_rec(rest, payload, a, noise, cursor);
                fill_rec(rest, payload, b, noise, cursor);
            } else {
                let v = noise[*cursor];
                *cursor += 1;
                fill_rec(rest, payload ^ v, a, noise, cursor);
                fill_rec(rest, v, b, noise, cursor);
            }
        }
    }
}
