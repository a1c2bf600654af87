//! Monte Carlo block-error-rate harness.
//!
//! Trials are embarrassingly parallel; each trial derives its own random
//! stream from (master seed, trial index), so scheduling and thread count
//! cannot change any result. Confidence intervals are Wilson at 95%, which
//! stay meaningful at zero observed errors.

use crate::channels::{DiscreteBms, TriSymbol};
use crate::construct::PolarBasedCode;
use crate::decode;
use crate::graph::Scheme;
use crate::kernel::BitVector;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const WILSON_Z: f64 = 1.959_963_984_540_054; // 95%

/// Wilson score interval for `errors` successes in `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (WILSON_Z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One simulated operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub scheme: String,
    pub n: usize,
    pub lambda: f64,
    pub w_ub: u64,
    pub channel: String,
    pub k: usize,
    pub rate_raw: f64,
    pub rate_adjusted: f64,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

/// Short channel tag for result rows.
pub fn channel_tag(w: &DiscreteBms) -> String {
    match w.bec_epsilon() {
        Some(eps) => format!("bec:{}", eps),
        None if w.alphabet_size() == 2 => format!("bsc:{}", w.prob(1, 0)),
        None => format!("bms:{}", w.alphabet_size()),
    }
}

/// Estimate the block error rate of `code` over `w`.
///
/// Each trial draws a uniform message on the information set (frozen bits
/// zero), encodes, samples the channel once per use, decodes, and compares
/// the information bits. A block errs when any information estimate is
/// erased or wrong.
pub fn run_bler(code: &PolarBasedCode, w: &DiscreteBms, trials: u64, seed: u64) -> SimResult {
    let use_erasure_decoder =
        w.bec_epsilon().is_some() && code.graph.scheme() != Scheme::Adrs;
    let info = code.info_indices();
    let errors: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let mut u = BitVector::zeros(code.graph.input_len());
            for &i in &info {
                if rng.gen::<bool>() {
                    u.set(i, true);
                }
            }
            let x = code.graph.encode_rng(&u, &mut rng).unwrap();
            let bad = if use_erasure_decoder {
                let eps = w.bec_epsilon().unwrap();
                let y: Vec<TriSymbol> = x
                    .iter_bits()
                    .map(|b| {
                        if rng.gen::<f64>() < eps {
                            TriSymbol::Erased
                        } else {
                            TriSymbol::from_bit(b as u8)
                        }
                    })
                    .collect();
                let out = decode::decode_bec(&code.graph, &code.frozen, &y).unwrap();
                info.iter().any(|&i| {
                    out.estimates[i].is_erased()
                        || out.estimates[i] != TriSymbol::from_bit(u.get(i) as u8)
                })
            } else {
                let llrs: Vec<f64> = x
                    .iter_bits()
                    .map(|b| w.llr(w.sample(b as u8, &mut rng)))
                    .collect();
                let out = decode::decode_llr(&code.graph, &code.frozen, &llrs).unwrap();
                info.iter().any(|&i| out.estimates[i] != u.get(i) as u8)
            };
            bad as u64
        })
        .sum();
    let (ci_lo, ci_hi) = wilson_interval(errors, trials);
    let n = code.n();
    SimResult {
        scheme: code.graph.scheme().to_string(),
        n,
        // thresholds at or above 2^n mean no splitting; report lambda = 1
        lambda: ((code.graph.w_ub() as f64).log2() / n.max(1) as f64).min(1.0),
        w_ub: code.graph.w_ub(),
        channel: channel_tag(w),
        k: code.k,
        rate_raw: code.rate_raw(),
        rate_adjusted: code.rate_adjusted(),
        trials,
        errors,
        bler: errors as f64 / trials.max(1) as f64,
        ci_lo,
        ci_hi,
        seed,
    }
}

/// Sweep thresholds and dimensions: one result per (lambda, K). The
/// threshold is `2^floor(n*lambda)`; a lambda of 1 is the unsplit code.
#[allow(clippy::too_many_arguments)]
pub fn rate_sweep(
    n: usize,
    lambdas: &[f64],
    w: &DiscreteBms,
    k_grid: &[usize],
    scheme: Scheme,
    rule: crate::construct::FrozenRule,
    trials: u64,
    seed: u64,
) -> Result<Vec<SimResult>> {
    let mut out = Vec::new();
    for &lambda in lambdas {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidProbability(lambda));
        }
        let w_ub = lambda_threshold(n, lambda);
        for &k in k_grid {
            let code = crate::construct::build_code(n, w_ub, scheme, w, k, rule, seed, 50_000)?;
            let mut r = run_bler(&code, w, trials, seed);
            r.lambda = lambda;
            out.push(r);
        }
    }
    Ok(out)
}

/// The documented lambda-to-threshold map: w_ub = 2^floor(n*lambda).
pub fn lambda_threshold(n: usize, lambda: f64) -> u64 {
    1u64 << ((n as f64 * lambda).floor() as u64).min(63)
}

pub const CSV_HEADER: &str =
    "scheme,n,lambda,w_ub,channel,K,rate_raw,rate_adjusted,trials,errors,bler,ci_lo,ci_hi,seed";

/// Stable CSV rendering of a result list.
pub fn export_csv(results: &[SimResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in results {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scheme,
            r.n,
            r.lambda,
            r.w_ub,
            r.channel,
            r.k,
            r.rate_raw,
            r.rate_adjusted,
            r.trials,
            r.errors,
            r.bler,
            r.ci_lo,
            r.ci_hi,
            r.seed
        ));
    }
    s
}

/// Parse [`export_csv`] output back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<SimResult>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("bad CSV header {:?}", other))),
    }
    let mut out = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(Error::Parse(format!("bad CSV row '{}'", line)));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse(format!("bad number '{}'", s)))
        };
        out.push(SimResult {
            scheme: f[0].to_string(),
            n: num(f[1])? as usize,
            lambda: num(f[2])?,
            w_ub: num(f[3])? as u64,
            channel: f[4].to_string(),
            k: num(f[5])? as usize,
            rate_raw: num(f[6])?,
            rate_adjusted: num(f[7])?,
            trials: num(f[8])? as u64,
            errors: num(f[9])? as u64,
            bler: num(f[10])?,
            ci_lo: num(f[11])?,
            ci_hi: num(f[12])?,
            seed: num(f[13])? as u64,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_code, FrozenRule};

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(0, 1000);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(500, 1000);
        assert!(lo < 0.5 && 0.5 < hi);
        // the interval always contains the point estimate
        for (e, t) in [(0u64, 5u64), (1, 7), (3, 9), (999, 1000), (1000, 1000)] {
            let (lo, hi) = wilson_interval(e, t);
            let p = e as f64 / t as f64;
            assert!(lo <= p + 1e-12 && p <= hi + 1e-12, "({}, {})", e, t);
        }
    }

    #[test]
    fn zero_erasure_means_zero_bler() {
        let w = DiscreteBms::bec(0.0).unwrap();
        let code = build_code(4, 4, Scheme::Drs, &w, 10, FrozenRule::MatchStandard, 1, 0).unwrap();
        let r = run_bler(&code, &w, 200, 9);
        assert_eq!(r.errors, 0);
        assert!(r.ci_lo == 0.0);
    }

    #[test]
    fn empty_message_never_errs() {
        let w = DiscreteBms::bec(0.9).unwrap();
        let code = build_code(3, 8, Scheme::Standard, &w, 0, FrozenRule::MatchStandard, 1, 0)
            .unwrap();
        let r = run_bler(&code, &w, 100, 2);
        assert_eq!(r.errors, 0);
    }

    #[test]
    fn frozen_everything_over_bsc() {
        let w = DiscreteBms::bsc(0.2).unwrap();
        let code =
            build_code(3, 8, Scheme::Standard, &w, 0, FrozenRule::MatchStandard, 1, 500).unwrap();
        let r = run_bler(&code, &w, 100, 3);
        assert_eq!(r.errors, 0);
    }

    #[test]
    fn csv_round_trip() {
        assert_eq!(export_csv(&[]), format!("{}\n", CSV_HEADER));
        let w = DiscreteBms::bec(0.5).unwrap();
        let code = build_code(3, 2, Scheme::Drs, &w, 4, FrozenRule::MatchStandard, 7, 0).unwrap();
        let rows = vec![run_bler(&code, &w, 50, 4)];
        let text = export_csv(&rows);
        let back = parse_csv(&text).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn identical_seeds_identical_bytes_across_thread_counts() {
        let w = DiscreteBms::bec(0.5).unwrap();
        let code = build_code(5, 4, Scheme::Drs, &w, 12, FrozenRule::MatchStandard, 3, 0).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| export_csv(&[run_bler(&code, &w, 400, 5)]));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| export_csv(&[run_bler(&code, &w, 400, 5)]));
        assert_eq!(single, many);
    }

    #[test]
    fn degrading_the_channel_degrades_bler() {
        let w_design = DiscreteBms::bec(0.5).unwrap();
        let code =
            build_code(6, 8, Scheme::Drs, &w_design, 28, FrozenRule::MatchStandard, 5, 0).unwrap();
        let trials = 3000;
        let mut prev = run_bler(&code, &DiscreteBms::bec(0.35).unwrap(), trials, 6);
        for eps in [0.45, 0.55, 0.65] {
            let cur = run_bler(&code, &DiscreteBms::bec(eps).unwrap(), trials, 6);
            let sigma = |r: &SimResult| (r.bler * (1.0 - r.bler) / r.trials as f64).sqrt();
            assert!(
                cur.bler + 3.0 * sigma(&cur) + 3.0 * sigma(&prev) >= prev.bler,
                "bler should not drop as erasures increase: {} -> {}",
                prev.bler,
                cur.bler
            );
            prev = cur;
        }
    }

    #[test]
    fn lambda_one_has_no_adjustment() {
        let w = DiscreteBms::bec(0.5).unwrap();
        let rows = rate_sweep(
            4,
            &[1.0],
            &w,
            &[4, 8],
            Scheme::Drs,
            FrozenRule::MatchStandard,
            50,
            1,
        )
        .unwrap();
        for r in rows {
            assert_eq!(r.rate_raw, r.rate_adjusted);
        }
    }
}
