//! GHZ-diagonal states and the stabilizer error-rate parameterization.
//!
//! An `N`-party GHZ-basis state is labelled by one phase bit `p` (the
//! eigenvalue label of `X⊗…⊗X`) and `N − 1` amplitude bits `i_j` (the
//! eigenvalue labels of `Z_1 Z_{j+1}`), with label `1` meaning eigenvalue −1.
//! Probabilities are stored in lexicographic order of `(p, i_1, …, i_{N−1})`,
//! so for three parties index `4p + 2i_1 + i_2`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported party count. Labels pack the amplitude bits into a `u32`.
pub const MAX_PARTIES: usize = 16;

/// Normalization tolerance for constructed states.
pub const NORM_TOL: f64 = 1e-12;

/// Entries in `(-NEG_CLAMP, 0)` are treated as rounding noise and set to zero.
pub const NEG_CLAMP: f64 = 1e-12;

/// One GHZ-basis label: a phase bit and `N − 1` amplitude bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SyndromeLabel {
    phase: bool,
    amp_len: u8,
    amp: u32,
}

impl SyndromeLabel {
    pub fn new(phase: bool, amp: &[bool]) -> Result<Self> {
        if amp.is_empty() || amp.len() >= MAX_PARTIES {
            return Err(Error::DimensionMismatch(format!(
                "amplitude length {} outside 1..{}",
                amp.len(),
                MAX_PARTIES
            )));
        }
        let value = amp.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        Ok(Self {
            phase,
            amp_len: amp.len() as u8,
            amp: value,
        })
    }

    /// Three-party label `(p, i1, i2)`; any nonzero argument counts as 1.
    pub fn tri(p: u8, i1: u8, i2: u8) -> Self {
        Self {
            phase: p != 0,
            amp_len: 2,
            amp: ((i1 != 0) as u32) << 1 | (i2 != 0) as u32,
        }
    }

    /// Label at lexicographic position `index` for `n_parties` parties.
    pub fn from_index(n_parties: usize, index: usize) -> Self {
        debug_assert!((2..=MAX_PARTIES).contains(&n_parties));
        let amp_len = n_parties - 1;
        debug_assert!(index < 1 << n_parties);
        Self {
            phase: (index >> amp_len) & 1 == 1,
            amp_len: amp_len as u8,
            amp: (index & ((1 << amp_len) - 1)) as u32,
        }
    }

    pub(crate) fn from_parts(phase: bool, amp: u32, amp_len: usize) -> Self {
        Self {
            phase,
            amp_len: amp_len as u8,
            amp,
        }
    }

    pub fn index(&self) -> usize {
        ((self.phase as usize) << self.amp_len) | self.amp as usize
    }

    pub fn phase(&self) -> bool {
        self.phase
    }

    pub fn amp_len(&self) -> usize {
        self.amp_len as usize
    }

    pub fn n_parties(&self) -> usize {
        self.amp_len as usize + 1
    }

    /// Amplitude bits packed with `i_1` as the most significant bit.
    pub fn amp_value(&self) -> u32 {
        self.amp
    }

    /// Amplitude bit `i_{j+1}`, i.e. `j = 0` is `i_1`.
    pub fn amp_bit(&self, j: usize) -> bool {
        assert!(j < self.amp_len(), "amplitude bit {j} out of range");
        (self.amp >> (self.amp_len() - 1 - j)) & 1 == 1
    }

    pub fn amp_bits(&self) -> Vec<bool> {
        (0..self.amp_len()).map(|j| self.amp_bit(j)).collect()
    }
}

impl fmt::Display for SyndromeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.", self.phase as u8)?;
        for j in 0..self.amp_len() {
            write!(f, "{}", self.amp_bit(j) as u8)?;
        }
        Ok(())
    }
}

impl FromStr for SyndromeLabel {
    type Err = Error;

    /// Parses the `"p.i1i2…"` form, e.g. `"1.01"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed label {s:?}, expected \"p.i1i2...\""));
        let (phase, amp) = s.split_once('.').ok_or_else(bad)?;
        let phase = match phase {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        let amp = amp
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(phase, &amp)
    }
}

/// A density matrix diagonal in the `N`-party GHZ basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct GhzDiagonalState {
    n_parties: usize,
    probs: Vec<f64>,
}

impl GhzDiagonalState {
    /// Validates and wraps a lexicographically ordered probability vector.
    ///
    /// Entries in `(-1e-12, 0)` are clamped to zero; anything more negative,
    /// a wrong length, or a sum off by more than `1e-12` is rejected.
    pub fn new(n_parties: usize, mut probs: Vec<f64>) -> Result<Self> {
        check_party_count(n_parties)?;
        if probs.len() != 1 << n_parties {
            return Err(Error::InvalidState(format!(
                "{} parties need {} probabilities, got {}",
                n_parties,
                1usize << n_parties,
                probs.len()
            )));
        }
        for (k, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidState(format!("entry {k} is not finite")));
            }
            if *p < 0.0 {
                if *p > -NEG_CLAMP {
                    *p = 0.0;
                } else {
                    return Err(Error::InvalidState(format!(
                        "negative probability {} for label {}",
                        p,
                        SyndromeLabel::from_index(n_parties, k)
                    )));
                }
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { n_parties, probs })
    }

    /// Normalizes nonnegative weights; used by step maps whose outputs are
    /// renormalized by construction.
    pub(crate) fn from_weights(n_parties: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidState("zero total weight".into()));
        }
        Self::new(n_parties, weights.into_iter().map(|w| w / total).collect())
    }

    /// Generalized Werner state with the given fidelity to the cat state.
    pub fn werner(fidelity: f64, n_parties: usize) -> Result<Self> {
        check_party_count(n_parties)?;
        let dim = 1usize << n_parties;
        let min = 1.0 / dim as f64;
        if !(min..=1.0).contains(&fidelity) {
            return Err(Error::OutOfRange {
                what: "fidelity",
                value: fidelity,
                min,
                max: 1.0,
            });
        }
        let rest = (1.0 - fidelity) / (dim - 1) as f64;
        let mut probs = vec![rest; dim];
        probs[0] = fidelity;
        Self::new(n_parties, probs)
    }

    /// The Werner mixing weight `α = (F − 2^−N) / (1 − 2^−N)`.
    pub fn werner_alpha(fidelity: f64, n_parties: usize) -> f64 {
        let floor = 0.5f64.powi(n_parties as i32);
        (fidelity - floor) / (1.0 - floor)
    }

    pub fn pure(n_parties: usize) -> Result<Self> {
        Self::werner(1.0, n_parties)
    }

    pub fn uniform(n_parties: usize) -> Result<Self> {
        check_party_count(n_parties)?;
        let dim = 1usize << n_parties;
        Self::new(n_parties, vec![1.0 / dim as f64; dim])
    }

    /// All mass on a single label.
    pub fn deterministic(label: SyndromeLabel) -> Self {
        let n = label.n_parties();
        let mut probs = vec![0.0; 1 << n];
        probs[label.index()] = 1.0;
        Self { n_parties: n, probs }
    }

    /// Builds a three-party state from the display order
    /// `(p000, p100, p011, p111, p010, p110, p001, p101)`.
    pub fn from_display_order(values: [f64; 8]) -> Result<Self> {
        let mut probs = vec![0.0; 8];
        for (label, v) in DISPLAY_ORDER.iter().zip(values) {
            probs[label.index()] = v;
        }
        Self::new(3, probs)
    }

    pub fn display_order(&self) -> Result<[f64; 8]> {
        self.require_parties("display_order", 3)?;
        Ok(DISPLAY_ORDER.map(|l| self.probs[l.index()]))
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn amp_len(&self) -> usize {
        self.n_parties - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, label: SyndromeLabel) -> f64 {
        assert_eq!(label.n_parties(), self.n_parties, "label party count");
        self.probs[label.index()]
    }

    /// Mass on the all-zero label.
    pub fn fidelity(&self) -> f64 {
        self.probs[0]
    }

    pub fn labels(&self) -> impl Iterator<Item = SyndromeLabel> + '_ {
        (0..self.probs.len()).map(|k| SyndromeLabel::from_index(self.n_parties, k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (SyndromeLabel, f64)> + '_ {
        self.labels().zip(self.probs.iter().copied())
    }

    /// Mass with phase bit 0 and amplitude pattern `amp`, and with phase bit 1.
    pub(crate) fn phase_pair(&self, amp: usize) -> (f64, f64) {
        let half = 1 << self.amp_len();
        (self.probs[amp], self.probs[half + amp])
    }

    pub(crate) fn require_parties(&self, op: &'static str, expected: usize) -> Result<()> {
        if self.n_parties != expected {
            return Err(Error::PartyCount {
                op,
                expected,
                found: self.n_parties,
            });
        }
        Ok(())
    }

    /// Maximum absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n_parties, other.n_parties);
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn check_party_count(n_parties: usize) -> Result<()> {
    if !(2..=MAX_PARTIES).contains(&n_parties) {
        return Err(Error::OutOfRange {
            what: "n_parties",
            value: n_parties as f64,
            min: 2.0,
            max: MAX_PARTIES as f64,
        });
    }
    Ok(())
}

/// Display order of the three-party diagonal.
pub const DISPLAY_ORDER: [SyndromeLabel; 8] = {
    const fn l(p: bool, amp: u32) -> SyndromeLabel {
        SyndromeLabel {
            phase: p,
            amp_len: 2,
            amp,
        }
    }
    [
        l(false, 0b00),
        l(true, 0b00),
        l(false, 0b11),
        l(true, 0b11),
        l(false, 0b10),
        l(true, 0b10),
        l(false, 0b01),
        l(true, 0b01),
    ]
};

/// Interchange form: `{"n_parties": 3, "probs": {"0.00": 0.9, ...}}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    n_parties: usize,
    probs: BTreeMap<String, f64>,
}

impl TryFrom<StateJson> for GhzDiagonalState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        check_party_count(raw.n_parties)?;
        let mut probs = vec![0.0; 1 << raw.n_parties];
        for (key, value) in raw.probs {
            let label: SyndromeLabel = key.parse()?;
            if label.n_parties() != raw.n_parties {
                return Err(Error::Parse(format!(
                    "label {key:?} does not have {} parties",
                    raw.n_parties
                )));
            }
            probs[label.index()] = value;
        }
        Self::new(raw.n_parties, probs)
    }
}

impl From<GhzDiagonalState> for StateJson {
    fn from(state: GhzDiagonalState) -> Self {
        let probs = state.iter().map(|(l, p)| (l.to_string(), p)).collect();
        StateJson {
            n_parties: state.n_parties,
            probs,
        }
    }
}

/// The seven non-trivial elements of the three-party GHZ stabilizer group,
/// each with the label bits `(p, i1, i2)` whose parity gives a −1 outcome.
pub const OBSERVABLES: [(&str, usize); 7] = [
    ("XXX", 0b100),
    ("ZZI", 0b010),
    ("ZIZ", 0b001),
    ("-YYX", 0b110),
    ("IZZ", 0b011),
    ("-YXY", 0b101),
    ("-XYY", 0b111),
];

/// Whether observable `k` reads −1 on a three-party label.
pub fn observable_flips(k: usize, label: SyndromeLabel) -> bool {
    (OBSERVABLES[k].1 & label.index()).count_ones() % 2 == 1
}

/// Error rates `s1…s7` of the observables in [`OBSERVABLES`] order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateVector {
    pub s: [f64; 7],
}

impl ErrorRateVector {
    pub fn new(s: [f64; 7]) -> Result<Self> {
        for (k, v) in s.iter().enumerate() {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::UnphysicalErrorRates(format!(
                    "s{} = {} ({}) is not a probability",
                    k + 1,
                    v,
                    OBSERVABLES[k].0
                )));
            }
        }
        Ok(Self { s })
    }
}

pub fn error_rates_from_diagonal(state: &GhzDiagonalState) -> Result<ErrorRateVector> {
    state.require_parties("error_rates_from_diagonal", 3)?;
    let mut s = [0.0; 7];
    for (k, rate) in s.iter_mut().enumerate() {
        *rate = state
            .iter()
            .filter(|(l, _)| observable_flips(k, *l))
            .map(|(_, p)| p)
            .sum();
    }
    ErrorRateVector::new(s.map(|v: f64| v.clamp(0.0, 1.0)))
}

/// Unchecked inversion: `p_x = (1/8) Σ_m (−1)^{m·x} (1 − 2 s_m)` with `s_0 = 0`.
pub(crate) fn invert_error_rates(s: &[f64; 7]) -> [f64; 8] {
    let mut p = [0.0; 8];
    for (x, px) in p.iter_mut().enumerate() {
        let mut acc = 1.0;
        for (k, &(_, mask)) in OBSERVABLES.iter().enumerate() {
            let sign = if (mask & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * (1.0 - 2.0 * s[k]);
        }
        *px = acc / 8.0;
    }
    p
}

pub fn diagonal_from_error_rates(s: &ErrorRateVector) -> Result<GhzDiagonalState> {
    let mut p = invert_error_rates(&s.s);
    for (x, v) in p.iter_mut().enumerate() {
        if *v < -1e-9 {
            return Err(Error::UnphysicalErrorRates(format!(
                "implied p{} = {}",
                SyndromeLabel::from_index(3, x),
                v
            )));
        }
        *v = v.max(0.0);
    }
    GhzDiagonalState::from_weights(3, p.to_vec())
}
