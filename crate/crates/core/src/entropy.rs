//! Shannon entropies over GHZ-basis label distributions, in bits.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::state::GhzDiagonalState;

/// `−Σ p log2 p` with `0 log 0 = 0`.
pub fn shannon_entropy<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

pub fn binary_entropy(q: f64) -> f64 {
    shannon_entropy([q, 1.0 - q])
}

/// `1 − h(q)`, evaluated without cancellation near `q = 1/2`.
///
/// Written as `q log2(2q) + (1−q) log2(2(1−q))`; the `log1p` branch keeps
/// full relative precision when `2q − 1` is tiny.
pub fn binary_capacity(q: f64) -> f64 {
    let term = |x: f64| {
        if x <= 0.0 {
            0.0
        } else if x > 0.25 {
            x * (2.0 * x - 1.0).ln_1p() / std::f64::consts::LN_2
        } else {
            x * (2.0 * x).log2()
        }
    };
    (term(q) + term(1.0 - q)).max(0.0)
}

/// Conditional binary statistics `Σ_x P(x) f(P(Y=1 | x))` given the pairs
/// `(P(x, Y=0), P(x, Y=1))`.
pub(crate) fn conditional<F: Fn(f64) -> f64>(pairs: impl IntoIterator<Item = (f64, f64)>, f: F) -> f64 {
    pairs
        .into_iter()
        .filter(|(a, b)| a + b > 0.0)
        .map(|(a, b)| (a + b) * f(b / (a + b)))
        .sum()
}

/// Marginal and conditional entropies of `(b0, b1, b2) = (p, i1, i2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h_b0: f64,
    pub h_b1: f64,
    pub h_b2: f64,
    pub h_b1_given_b2: f64,
    pub h_b2_given_b1: f64,
    pub i_b1_b2: f64,
    /// `I(b0; b1, b2)`
    pub i_b0_amp: f64,
    /// `H(b0 | b1, b2)`
    pub h_b0_given_amp: f64,
}

/// Joint masses of a three-party state arranged for the entropy formulas.
pub(crate) struct TriMarginals {
    /// `(P(p=0, a), P(p=1, a))` for amplitude pattern `a = 2 i1 + i2`.
    pub phase_by_amp: [(f64, f64); 4],
    /// `P(i1, i2)`
    pub amp: [f64; 4],
}

impl TriMarginals {
    pub fn new(state: &GhzDiagonalState) -> Self {
        let mut phase_by_amp = [(0.0, 0.0); 4];
        let mut amp = [0.0; 4];
        for (a, slot) in phase_by_amp.iter_mut().enumerate() {
            *slot = state.phase_pair(a);
            amp[a] = slot.0 + slot.1;
        }
        Self { phase_by_amp, amp }
    }

    pub fn phase_one(&self) -> f64 {
        self.phase_by_amp.iter().map(|p| p.1).sum()
    }

    /// `P(b_first = 1)`; `first` is 0 for i1 and 1 for i2.
    pub fn amp_one(&self, first: usize) -> f64 {
        (0..4).filter(|a| amp_bit(*a, first)).map(|a| self.amp[a]).sum()
    }

    /// `(P(b_first = x, b_second = 0), P(b_first = x, b_second = 1))` for x = 0, 1.
    pub fn amp_pairs(&self, first: usize) -> [(f64, f64); 2] {
        let second = 1 - first;
        let mut out = [(0.0, 0.0); 2];
        for a in 0..4 {
            let x = amp_bit(a, first) as usize;
            if amp_bit(a, second) {
                out[x].1 += self.amp[a];
            } else {
                out[x].0 += self.amp[a];
            }
        }
        out
    }
}

fn amp_bit(a: usize, which: usize) -> bool {
    (a >> (1 - which)) & 1 == 1
}

pub fn entropy_report(state: &GhzDiagonalState) -> Result<EntropyReport> {
    state.require_parties("entropy_report", 3)?;
    let m = TriMarginals::new(state);
    let h_b0 = binary_entropy(m.phase_one());
    let h_b1 = binary_entropy(m.amp_one(0));
    let h_b2 = binary_entropy(m.amp_one(1));
    let h_b2_given_b1 = conditional(m.amp_pairs(0), binary_entropy);
    let h_b1_given_b2 = conditional(m.amp_pairs(1), binary_entropy);
    let h_b0_given_amp = conditional(m.phase_by_amp, binary_entropy);
    Ok(EntropyReport {
        h_b0,
        h_b1,
        h_b2,
        h_b1_given_b2,
        h_b2_given_b1,
        i_b1_b2: (h_b2 - h_b2_given_b1).max(0.0),
        i_b0_amp: (h_b0 - h_b0_given_amp).max(0.0),
        h_b0_given_amp,
    })
}
