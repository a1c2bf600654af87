//! Versioned text serialization for encoder graphs.
//!
//! Graphs are deterministic functions of (scheme, n, threshold, seed), so the
//! file stores those parameters together with the split plan and structural
//! counts; the reader rebuilds the graph and refuses files whose plan or
//! counts do not match the rebuilt structure.

use super::{split_plan, EncoderGraph, Scheme};
use crate::{Error, Result};

pub const GRAPH_MAGIC: &str = "sparse-polar-graph v1";

/// Render a graph to the versioned text format.
pub fn write_graph(g: &EncoderGraph) -> String {
    let mut s = String::new();
    s.push_str(GRAPH_MAGIC);
    s.push('\n');
    s.push_str(&format!("scheme {}\n", g.scheme()));
    s.push_str(&format!("n {}\n", g.n()));
    if g.w_ub() == u64::MAX {
        s.push_str("wub max\n");
    } else {
        s.push_str(&format!("wub {}\n", g.w_ub()));
    }
    s.push_str(&format!("seed {}\n", g.seed()));
    s.push_str(&format!("channel-uses {}\n", g.channel_uses()));
    s.push_str(&format!("noise-bits {}\n", g.noise_bits()));
    s.push_str(&format!("split-pairs {}\n", g.split_pairs()));
    if g.scheme() != Scheme::Standard {
        let plan = split_plan(g.n(), g.w_ub());
        s.push_str(&format!("plan-size {}\n", plan.pairs.len()));
        for &(level, mask) in &plan.pairs {
            s.push_str(&format!("plan {} {}\n", level, plan.signs_string(mask)));
        }
    }
    s.push_str("end-graph\n");
    s
}

/// Parse the text format and rebuild the graph, validating structure.
pub fn read_graph(text: &str) -> Result<EncoderGraph> {
    let mut lines = text.lines();
    read_graph_from_lines(&mut lines)
}

pub(crate) fn read_graph_from_lines<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
) -> Result<EncoderGraph> {
    let magic = lines
        .next()
        .ok_or_else(|| Error::Parse("empty graph file".into()))?;
    if magic.trim() != GRAPH_MAGIC {
        return Err(Error::Parse(format!("bad magic line '{}'", magic)));
    }
    let mut scheme: Option<Scheme> = None;
    let mut n: Option<usize> = None;
    let mut w_ub: Option<u64> = None;
    let mut seed = 0u64;
    let mut channel_uses: Option<usize> = None;
    let mut noise_bits: Option<usize> = None;
    let mut split_pairs: Option<usize> = None;
    let mut plan_lines: Vec<(usize, String)> = Vec::new();
    for line in lines {
        let line = line.trim();
        if line == "end-graph" {
            let scheme = scheme.ok_or_else(|| Error::Parse("missing scheme".into()))?;
            let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
            let w_ub = w_ub.ok_or_else(|| Error::Parse("missing wub".into()))?;
            let g = match scheme {
                Scheme::Standard => EncoderGraph::standard(n),
                Scheme::Drs => EncoderGraph::drs(n, w_ub),
                Scheme::Adrs => EncoderGraph::adrs(n, w_ub, seed),
            };
            let mut g = g;
            g.seed = seed;
            if let Some(uses) = channel_uses {
                if uses != g.channel_uses() {
                    return Err(Error::Parse(format!(
                        "channel-uses {} does not match rebuilt graph ({})",
                        uses,
                        g.channel_uses()
                    )));
                }
            }
            if let Some(nb) = noise_bits {
                if nb != g.noise_bits() {
                    return Err(Error::Parse("noise-bits mismatch".into()));
                }
            }
            if let Some(sp) = split_pairs {
                if sp != g.split_pairs() {
                    return Err(Error::Parse("split-pairs mismatch".into()));
                }
            }
            if scheme != Scheme::Standard {
                let plan = split_plan(n, w_ub);
                if plan_lines.len() != plan.pairs.len()
                    || plan
                        .pairs
                        .iter()
                        .zip(&plan_lines)
                        .any(|(&(level, mask), (flevel, fsigns))| {
                            level != *flevel || plan.signs_string(mask) != *fsigns
                        })
                {
                    return Err(Error::Parse("split plan does not match parameters".into()));
                }
            }
            return Ok(g);
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("scheme") => {
                scheme = Some(it.next().unwrap_or("").parse()?);
            }
            Some("n") => n = Some(parse_num(it.next())?),
            Some("wub") => {
                let tok = it.next().unwrap_or("");
                w_ub = Some(if tok == "max" {
                    u64::MAX
                } else {
                    tok.parse()
                        .map_err(|_| Error::Parse(format!("bad wub '{}'", tok)))?
                });
            }
            Some("seed") => seed = parse_num(it.next())? as u64,
            Some("channel-uses") => channel_uses = Some(parse_num(it.next())?),
            Some("noise-bits") => noise_bits = Some(parse_num(it.next())?),
            Some("split-pairs") => split_pairs = Some(parse_num(it.next())?),
            Some("plan-size") => {}
            Some("plan") => {
                let level = parse_num(it.next())?;
                let signs = it
                    .next()
                    .ok_or_else(|| Error::Parse("plan line missing signs".into()))?;
                plan_lines.push((level, signs.to_string()));
            }
            Some(other) => return Err(Error::Parse(format!("unknown graph line '{}'", other))),
            None => {}
        }
    }
    Err(Error::Parse("unterminated graph section".into()))
}

fn parse_num(tok: Option<&str>) -> Result<usize> {
    tok.ok_or_else(|| Error::Parse("missing number".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad number".into()))
}
