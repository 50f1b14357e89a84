//! Asymptotic yields of multi-party random hashing.
//!
//! Yields are per input state and unclamped: a negative value means the
//! hashing stage consumes more than it produces. The GHZ yields are
//! evaluated in a rearranged form (`1 − H` as a binary divergence) so that
//! their sign stays reliable when the value itself is ~1e-14, which is where
//! recurrence-then-hash thresholds sit.

use serde::{Deserialize, Serialize};

use crate::entropy::{binary_capacity, binary_entropy, conditional, entropy_report, shannon_entropy, EntropyReport, TriMarginals};
use crate::error::{Error, Result};
use crate::state::{GhzDiagonalState, NEG_CLAMP, NORM_TOL};

/// Order in which the two amplitude strings are hashed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmpOrder {
    B1First,
    B2First,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YieldReport {
    pub d_h: f64,
    pub d_h_improved: f64,
    pub entropies: EntropyReport,
    pub chosen_amp_order: AmpOrder,
}

/// Picks whichever algebraically equal form of `1 − cost − h` avoids
/// subtracting nearly equal numbers. `capacity_*` are `1 − h_*`.
fn stable_yield(phase_h: f64, phase_capacity: f64, amp_cost: f64, amp_capacity: f64) -> f64 {
    if phase_h >= 0.5 {
        phase_capacity - amp_cost
    } else {
        amp_capacity - phase_h
    }
}

/// `D_h = 1 − max_{j>0} H(b_j) − H(b_0)` for any party count.
pub fn yield_maneva_smolin(state: &GhzDiagonalState) -> f64 {
    let (zero, one) = state.probs().split_at(state.len() / 2);
    let amp_len = state.amp_len();
    let q0: f64 = one.iter().sum();
    let mut amp_one = vec![0.0; amp_len];
    for (a, (x, y)) in zero.iter().zip(one).enumerate() {
        for (j, slot) in amp_one.iter_mut().enumerate() {
            if (a >> (amp_len - 1 - j)) & 1 == 1 {
                *slot += x + y;
            }
        }
    }
    let amp_h = amp_one.iter().map(|&q| binary_entropy(q)).fold(0.0, f64::max);
    let amp_c = amp_one.iter().map(|&q| binary_capacity(q)).fold(1.0, f64::min);
    stable_yield(binary_entropy(q0), binary_capacity(q0), amp_h, amp_c)
}

/// `D_h' = 1 − max{H(b1), H(b2|b1)} − H(b0) + I(b0; b1, b2)`, maximized over
/// which amplitude string is hashed first. Three parties only.
pub fn yield_improved(state: &GhzDiagonalState) -> Result<YieldReport> {
    let entropies = entropy_report(state)?;
    let m = TriMarginals::new(state);
    let phase_h = conditional(m.phase_by_amp, binary_entropy);
    let phase_c = conditional(m.phase_by_amp, binary_capacity);
    let by_order = |first: usize| {
        let q = m.amp_one(first);
        let pairs = m.amp_pairs(first);
        let cost = binary_entropy(q).max(conditional(pairs, binary_entropy));
        let capacity = binary_capacity(q).min(conditional(pairs, binary_capacity));
        stable_yield(phase_h, phase_c, cost, capacity)
    };
    let (y1, y2) = (by_order(0), by_order(1));
    let (d_h_improved, chosen_amp_order) = if y2 > y1 {
        (y2, AmpOrder::B2First)
    } else {
        (y1, AmpOrder::B1First)
    };
    Ok(YieldReport {
        d_h: yield_maneva_smolin(state),
        d_h_improved,
        entropies,
        chosen_amp_order,
    })
}

/// Joint distribution of a CSS state's syndromes: amplitude (Z-type)
/// eigenvalue bits `b̂` and phase (X-type) eigenvalue bits `p̂`.
///
/// Outcome index is `(b̂ << phase_bits) | p̂`, with `b_1` and `p_1` the most
/// significant bits of their blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeDistribution {
    amp_bits: usize,
    phase_bits: usize,
    probs: Vec<f64>,
}

/// Amplitude-variable count up to which every hashing order is tried.
pub const MAX_ORDERED_AMP_VARS: usize = 4;

impl SyndromeDistribution {
    pub fn new(amp_bits: usize, phase_bits: usize, mut probs: Vec<f64>) -> Result<Self> {
        if amp_bits == 0 || phase_bits == 0 {
            return Err(Error::Domain(
                "syndrome distribution needs at least one amplitude and one phase variable".into(),
            ));
        }
        if amp_bits + phase_bits > 24 {
            return Err(Error::Domain(format!("{} syndrome bits is too many", amp_bits + phase_bits)));
        }
        if probs.len() != 1 << (amp_bits + phase_bits) {
            return Err(Error::DimensionMismatch(format!(
                "{} outcomes for {} syndrome bits",
                probs.len(),
                amp_bits + phase_bits
            )));
        }
        for p in probs.iter_mut() {
            if *p < -NEG_CLAMP || !p.is_finite() {
                return Err(Error::InvalidState(format!("invalid probability {p}")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            amp_bits,
            phase_bits,
            probs,
        })
    }

    /// The GHZ case: `b̂ = (i1, …)`, `p̂ = (p)`.
    pub fn from_ghz(state: &GhzDiagonalState) -> Self {
        let amp_len = state.amp_len();
        let mut probs = vec![0.0; state.len()];
        for (label, p) in state.iter() {
            probs[((label.amp_value() as usize) << 1) | label.phase() as usize] = p;
        }
        Self {
            amp_bits: amp_len,
            phase_bits: 1,
            probs,
        }
    }

    pub fn amp_bits(&self) -> usize {
        self.amp_bits
    }

    pub fn phase_bits(&self) -> usize {
        self.phase_bits
    }

    fn amp_var(&self, i: usize) -> usize {
        self.phase_bits + self.amp_bits - 1 - i
    }

    fn phase_var(&self, j: usize) -> usize {
        self.phase_bits - 1 - j
    }

    /// Entropy of the marginal on the index bits in `mask`.
    fn entropy_of(&self, mask: usize) -> f64 {
        let mut marginal = std::collections::BTreeMap::<usize, f64>::new();
        for (k, &p) in self.probs.iter().enumerate() {
            *marginal.entry(k & mask).or_default() += p;
        }
        shannon_entropy(marginal.into_values())
    }

    /// `H(X | Y)` for disjoint bit masks.
    fn cond_entropy(&self, x: usize, y: usize) -> f64 {
        (self.entropy_of(x | y) - self.entropy_of(y)).max(0.0)
    }

    fn amp_mask(&self) -> usize {
        ((1 << self.amp_bits) - 1) << self.phase_bits
    }

    fn phase_mask(&self) -> usize {
        (1 << self.phase_bits) - 1
    }

    /// Hashing cost of the amplitude strings: the best conditional chain
    /// `max_k H(b_σk | b_σ1 … b_σ(k−1))` over orders σ, or `max_i H(b_i)`
    /// when there are too many variables to enumerate orders.
    fn amp_chain_cost(&self) -> f64 {
        let vars: Vec<usize> = (0..self.amp_bits).map(|i| self.amp_var(i)).collect();
        if vars.len() > MAX_ORDERED_AMP_VARS {
            return vars.iter().map(|&v| self.entropy_of(1 << v)).fold(0.0, f64::max);
        }
        permutations(&vars)
            .into_iter()
            .map(|order| {
                let mut known = 0usize;
                let mut worst: f64 = 0.0;
                for v in order {
                    worst = worst.max(self.cond_entropy(1 << v, known));
                    known |= 1 << v;
                }
                worst
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Hashing yield bound for a CSS state: the better of hashing amplitudes
/// first (conditional-chain refined) and hashing phases first.
pub fn yield_css(joint: &SyndromeDistribution) -> f64 {
    let (amp, phase) = (joint.amp_mask(), joint.phase_mask());
    let worst_phase_given_amp = (0..joint.phase_bits)
        .map(|j| joint.cond_entropy(1 << joint.phase_var(j), amp))
        .fold(0.0, f64::max);
    let amp_first = 1.0 - joint.amp_chain_cost() - worst_phase_given_amp;

    let worst_phase = (0..joint.phase_bits)
        .map(|j| joint.entropy_of(1 << joint.phase_var(j)))
        .fold(0.0, f64::max);
    let worst_amp_given_phase = (0..joint.amp_bits)
        .map(|i| joint.cond_entropy(1 << joint.amp_var(i), phase))
        .fold(0.0, f64::max);
    let phase_first = 1.0 - worst_phase - worst_amp_given_phase;

    amp_first.max(phase_first)
}
