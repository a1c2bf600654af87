//! Discrete binary-input memoryless symmetric channels.
//!
//! A channel is symmetric when some involution of the output alphabet swaps
//! the roles of the two inputs: P(y|0) = P(phi(y)|1). The binary erasure and
//! binary symmetric channels are special cases. Polarization transforms act
//! on pairs of channels and return channels over product alphabets.
//!
//! Floating-point channels carry a probability-mass merge knob to contain
//! alphabet growth under repeated transforms; an exact rational twin lives in
//! [`rational`] for tests that pin published decimal values.

pub mod rational;

use crate::{Error, Result};
use rand::Rng;

const STOCHASTIC_TOL: f64 = 1e-12;

/// Three-valued symbol for erasure channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriSymbol {
    Zero,
    One,
    Erased,
}

impl TriSymbol {
    pub fn from_bit(b: u8) -> Self {
        if b == 0 {
            TriSymbol::Zero
        } else {
            TriSymbol::One
        }
    }

    pub fn is_erased(self) -> bool {
        self == TriSymbol::Erased
    }

    /// GF(2) addition with erasure absorption: e + b = e.
    pub fn xor(self, other: TriSymbol) -> TriSymbol {
        match (self, other) {
            (TriSymbol::Erased, _) | (_, TriSymbol::Erased) => TriSymbol::Erased,
            (a, b) => TriSymbol::from_bit((a == TriSymbol::One) as u8 ^ (b == TriSymbol::One) as u8),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            TriSymbol::Zero => '0',
            TriSymbol::One => '1',
            TriSymbol::Erased => 'e',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' => Ok(TriSymbol::Zero),
            '1' => Ok(TriSymbol::One),
            'e' | 'E' | '?' => Ok(TriSymbol::Erased),
            other => Err(Error::Parse(format!("bad erasure symbol '{}'", other))),
        }
    }
}

/// Finite-alphabet binary-input symmetric channel.
#[derive(Debug, Clone)]
pub struct DiscreteBms {
    /// P(y|0)
    p0: Vec<f64>,
    /// P(y|1)
    p1: Vec<f64>,
    /// output involution witnessing symmetry
    involution: Vec<usize>,
    /// erasure parameter when this is a BEC over {0, e, 1}
    bec_epsilon: Option<f64>,
}

impl DiscreteBms {
    /// Binary erasure channel over the alphabet {0, e, 1} (in that order),
    /// with the involution swapping 0 and 1 and fixing e.
    pub fn bec(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidProbability(epsilon));
        }
        Ok(DiscreteBms {
            p0: vec![1.0 - epsilon, epsilon, 0.0],
            p1: vec![0.0, epsilon, 1.0 - epsilon],
            involution: vec![2, 1, 0],
            bec_epsilon: Some(epsilon),
        })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(DiscreteBms {
            p0: vec![1.0 - p, p],
            p1: vec![p, 1.0 - p],
            involution: vec![1, 0],
            bec_epsilon: None,
        })
    }

    /// Validate transition rows and a symmetry involution. When `involution`
    /// is `None`, search for one by profile pairing (lowest index first).
    pub fn new(p0: Vec<f64>, p1: Vec<f64>, involution: Option<Vec<usize>>) -> Result<Self> {
        if p0.len() != p1.len() || p0.is_empty() {
            return Err(Error::DimensionMismatch("transition rows".into()));
        }
        for (name, row) in [("P(.|0)", &p0), ("P(.|1)", &p1)] {
            if row.iter().any(|&p| !(0.0..=1.0 + STOCHASTIC_TOL).contains(&p)) {
                return Err(Error::NonStochastic(format!("{} has an entry outside [0,1]", name)));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::NonStochastic(format!("{} sums to {}", name, sum)));
            }
        }
        let involution = match involution {
            Some(phi) => {
                verify_involution(&p0, &p1, &phi)?;
                phi
            }
            None => find_involution(&p0, &p1)?,
        };
        Ok(DiscreteBms {
            p0,
            p1,
            involution,
            bec_epsilon: None,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.p0.len()
    }

    pub fn prob(&self, y: usize, x: u8) -> f64 {
        if x == 0 {
            self.p0[y]
        } else {
            self.p1[y]
        }
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    /// Erasure parameter when the channel was built by [`DiscreteBms::bec`].
    pub fn bec_epsilon(&self) -> Option<f64> {
        self.bec_epsilon
    }

    /// Bhattacharyya parameter Z = Σ_y sqrt(P(y|0) P(y|1)).
    pub fn bhattacharyya(&self) -> f64 {
        self.p0
            .iter()
            .zip(&self.p1)
            .map(|(&a, &b)| (a * b).sqrt())
            .sum()
    }

    /// Symmetric capacity I(W) in bits.
    pub fn capacity(&self) -> f64 {
        let mut sum = 0.0;
        for y in 0..self.alphabet_size() {
            let avg = 0.5 * (self.p0[y] + self.p1[y]);
            for p in [self.p0[y], self.p1[y]] {
                if p > 0.0 {
                    sum += 0.5 * p * (p / avg).log2();
                }
            }
        }
        sum
    }

    /// Log-likelihood ratio ln(P(y|0)/P(y|1)) of one output symbol.
    pub fn llr(&self, y: usize) -> f64 {
        match (self.p0[y] > 0.0, self.p1[y] > 0.0) {
            (true, true) => (self.p0[y] / self.p1[y]).ln(),
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (false, false) => 0.0,
        }
    }

    /// Draw one output symbol for input `x`.
    pub fn sample<R: Rng + ?Sized>(&self, x: u8, rng: &mut R) -> usize {
        let row = if x == 0 { &self.p0 } else { &self.p1 };
        let mut u: f64 = rng.gen();
        for (y, &p) in row.iter().enumerate() {
            if u < p {
                return y;
            }
            u -= p;
        }
        row.len() - 1
    }

    /// Merge output symbols with identical likelihood ratios (within `tol`),
    /// keeping symmetry. Contains alphabet growth under repeated transforms.
    pub fn merged(&self, tol: f64) -> DiscreteBms {
        let n = self.alphabet_size();
        let mut cluster: Vec<usize> = (0..n).collect();
        // group by (p0, p1) proportionality: symbols with the same LLR
        let key = |i: usize| -> (f64, f64) { (self.p0[i], self.p1[i]) };
        let mut reps: Vec<usize> = Vec::new();
        for i in 0..n {
            let (a, b) = key(i);
            let mut assigned = None;
            for &r in &reps {
                let (ra, rb) = key(r);
                // same conditional ratio and comparable mass direction
                let cross = (a * rb - b * ra).abs();
                let scale = (a + b).max(ra + rb).max(1e-300);
                if cross <= tol * scale {
                    assigned = Some(r);
                    break;
                }
            }
            match assigned {
                Some(r) => cluster[i] = r,
                None => {
                    cluster[i] = i;
                    reps.push(i);
                }
            }
        }
        let mut p0 = vec![0.0; reps.len()];
        let mut p1 = vec![0.0; reps.len()];
        let idx_of = |r: usize, reps: &[usize]| reps.iter().position(|&x| x == r).unwrap();
        for i in 0..n {
            let j = idx_of(cluster[i], &reps);
            p0[j] += self.p0[i];
            p1[j] += self.p1[i];
        }
        // rebuild an involution by profile pairing; merging preserves symmetry
        let involution = find_involution(&p0, &p1).unwrap_or_else(|_| (0..p0.len()).collect());
        DiscreteBms {
            p0,
            p1,
            involution,
            bec_epsilon: self.bec_epsilon,
        }
    }
}

fn verify_involution(p0: &[f64], p1: &[f64], phi: &[usize]) -> Result<()> {
    let n = p0.len();
    if phi.len() != n {
        return Err(Error::DimensionMismatch("involution length".into()));
    }
    for y in 0..n {
        if phi[y] >= n || phi[phi[y]] != y {
            return Err(Error::Asymmetric(format!("phi is not an involution at {}", y)));
        }
        if (p0[y] - p1[phi[y]]).abs() > 1e-9 {
            return Err(Error::Asymmetric(format!(
                "P(y|0) != P(phi(y)|1) at y={}",
                y
            )));
        }
    }
    Ok(())
}

/// Search for a symmetry involution: a symbol with profile (a, b) must map to
/// one with profile (b, a). Greedy, lowest indices first.
fn find_involution(p0: &[f64], p1: &[f64]) -> Result<Vec<usize>> {
    let n = p0.len();
    let tol = 1e-9;
    let mut phi = vec![usize::MAX; n];
    for y in 0..n {
        if phi[y] != usize::MAX {
            continue;
        }
        if (p0[y] - p1[y]).abs() <= tol {
            phi[y] = y;
            continue;
        }
        let partner = (y + 1..n).find(|&z| {
            phi[z] == usize::MAX
                && (p0[z] - p1[y]).abs() <= tol
                && (p1[z] - p0[y]).abs() <= tol
        });
        match partner {
            Some(z) => {
                phi[y] = z;
                phi[z] = y;
            }
            None => {
                return Err(Error::Asymmetric(format!(
                    "no involution partner for symbol {}",
                    y
                )))
            }
        }
    }
    Ok(phi)
}

/// Minus (check-node) transform of a channel pair: output alphabet Y1 x Y2,
/// P((y1,y2)|u1) = 1/2 Σ_{u2} W1(y1|u1+u2) W2(y2|u2).
pub fn transform_minus(w1: &DiscreteBms, w2: &DiscreteBms) -> DiscreteBms {
    let (n1, n2) = (w1.alphabet_size(), w2.alphabet_size());
    let mut p0 = Vec::with_capacity(n1 * n2);
    let mut p1 = Vec::with_capacity(n1 * n2);
    let mut involution = Vec::with_capacity(n1 * n2);
    for y1 in 0..n1 {
        for y2 in 0..n2 {
            p0.push(0.5 * (w1.p0[y1] * w2.p0[y2] + w1.p1[y1] * w2.p1[y2]));
            p1.push(0.5 * (w1.p1[y1] * w2.p0[y2] + w1.p0[y1] * w2.p1[y2]));
            // phi((y1,y2)) = (phi1(y1), y2)
            involution.push(w1.involution[y1] * n2 + y2);
        }
    }
    let bec_epsilon = match (w1.bec_epsilon, w2.bec_epsilon) {
        (Some(a), Some(b)) => Some(a + b - a * b),
        _ => None,
    };
    DiscreteBms {
        p0,
        p1,
        involution,
        bec_epsilon,
    }
}

/// Plus (variable-node) transform of a channel pair: output alphabet
/// Y1 x Y2 x X, P((y1,y2,u1)|u2) = 1/2 W1(y1|u1+u2) W2(y2|u2).
pub fn transform_plus(w1: &DiscreteBms, w2: &DiscreteBms) -> DiscreteBms {
    let (n1, n2) = (w1.alphabet_size(), w2.alphabet_size());
    let mut p0 = Vec::with_capacity(n1 * n2 * 2);
    let mut p1 = Vec::with_capacity(n1 * n2 * 2);
    let mut involution = Vec::with_capacity(n1 * n2 * 2);
    for y1 in 0..n1 {
        for y2 in 0..n2 {
            for u1 in 0..2usize {
                // W1(y1 | u1 ^ u2) for u2 = 0, 1
                let w1_u2_0 = if u1 == 0 { w1.p0[y1] } else { w1.p1[y1] };
                let w1_u2_1 = if u1 == 0 { w1.p1[y1] } else { w1.p0[y1] };
                p0.push(0.5 * w1_u2_0 * w2.p0[y2]);
                p1.push(0.5 * w1_u2_1 * w2.p1[y2]);
                // phi((y1,y2,u1)) = (phi1(y1), phi2(y2), u1)
                involution.push((w1.involution[y1] * n2 + w2.involution[y2]) * 2 + u1);
            }
        }
    }
    let bec_epsilon = match (w1.bec_epsilon, w2.bec_epsilon) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    };
    DiscreteBms {
        p0,
        p1,
        involution,
        bec_epsilon,
    }
}

/// Parse a channel spec: `bec <eps>`, `bsc <p>`, or an explicit alphabet
/// given as three lines: two probability rows and involution pairs.
///
/// Explicit form:
/// ```text
/// p0 0.6 0.2 0.2
/// p1 0.2 0.2 0.6
/// phi 2 1 0
/// ```
pub fn parse_channel_spec(text: &str) -> Result<DiscreteBms> {
    let trimmed = text.trim();
    let mut tokens = trimmed.split_whitespace();
    match tokens.next() {
        Some("bec") => {
            let eps: f64 = tokens
                .next()
                .ok_or_else(|| Error::Parse("bec needs a parameter".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad bec parameter".into()))?;
            DiscreteBms::bec(eps)
        }
        Some("bsc") => {
            let p: f64 = tokens
                .next()
                .ok_or_else(|| Error::Parse("bsc needs a parameter".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad bsc parameter".into()))?;
            DiscreteBms::bsc(p)
        }
        Some("p0") => {
            let mut p0 = Vec::new();
            let mut p1 = Vec::new();
            let mut phi: Option<Vec<usize>> = None;
            for line in trimmed.lines() {
                let mut it = line.split_whitespace();
                match it.next() {
                    Some("p0") => p0 = parse_floats(it)?,
                    Some("p1") => p1 = parse_floats(it)?,
                    Some("phi") => {
                        phi = Some(
                            it.map(|t| {
                                t.parse::<usize>()
                                    .map_err(|_| Error::Parse("bad involution index".into()))
                            })
                            .collect::<Result<Vec<_>>>()?,
                        )
                    }
                    Some(other) => {
                        return Err(Error::Parse(format!("unknown channel line '{}'", other)))
                    }
                    None => {}
                }
            }
            DiscreteBms::new(p0, p1, phi)
        }
        other => Err(Error::Parse(format!("unknown channel spec {:?}", other))),
    }
}

fn parse_floats<'a>(it: impl Iterator<Item = &'a str>) -> Result<Vec<f64>> {
    it.map(|t| {
        t.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad float '{}'", t)))
    })
    .collect()
}
