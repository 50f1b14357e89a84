//! Recurrence steps acting on GHZ-diagonal distributions.
//!
//! Two alphabets exist. The Z-basis alphabet serves conference key
//! agreement: `B` post-selects on amplitude (bit-flip) parities, `P` corrects
//! the phase bit by a three-trio majority vote. The X-basis alphabet serves
//! secret sharing with the roles exchanged: `B'` post-selects on the phase
//! parity and `P'` takes the majority of each amplitude bit.
//!
//! The maps are exact at the distribution level: pairs and triples of trios
//! are treated as independent draws from the current state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{GhzDiagonalState, SyndromeLabel};

/// Multilateral XOR of two labels: the phase propagates from target to
/// control, the amplitude bits from control to target.
///
/// `MXOR[(p, i), (q, j)] = [(p ⊕ q, i), (q, i ⊕ j)]`
pub fn mxor_labels(first: SyndromeLabel, second: SyndromeLabel) -> Result<(SyndromeLabel, SyndromeLabel)> {
    if first.amp_len() != second.amp_len() {
        return Err(Error::DimensionMismatch(format!(
            "MXOR on labels with {} and {} amplitude bits",
            first.amp_len(),
            second.amp_len()
        )));
    }
    let n = first.amp_len();
    Ok((
        SyndromeLabel::from_parts(first.phase() ^ second.phase(), first.amp_value(), n),
        SyndromeLabel::from_parts(second.phase(), first.amp_value() ^ second.amp_value(), n),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepToken {
    B,
    P,
    Bp,
    Pp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alphabet {
    /// `{B, P}`: conference key agreement, final measurement in Z.
    ZBasis,
    /// `{B', P'}`: secret sharing, final measurement in X.
    XBasis,
}

impl Alphabet {
    pub fn tokens(self) -> [StepToken; 2] {
        match self {
            Alphabet::ZBasis => [StepToken::B, StepToken::P],
            Alphabet::XBasis => [StepToken::Bp, StepToken::Pp],
        }
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "zbasis" | "z-basis" | "cka" => Ok(Alphabet::ZBasis),
            "x" | "xbasis" | "x-basis" | "qss" => Ok(Alphabet::XBasis),
            _ => Err(Error::Parse(format!("unknown alphabet {s:?} (expected z or x)"))),
        }
    }
}

impl StepToken {
    pub fn alphabet(self) -> Alphabet {
        match self {
            StepToken::B | StepToken::P => Alphabet::ZBasis,
            StepToken::Bp | StepToken::Pp => Alphabet::XBasis,
        }
    }

    /// Trios consumed per application: pairs for post-selection, triples for
    /// the local parity steps.
    pub fn trio_consumption(self) -> usize {
        match self {
            StepToken::B | StepToken::Bp => 2,
            StepToken::P | StepToken::Pp => 3,
        }
    }

    pub fn apply(self, state: &GhzDiagonalState) -> Result<StepOutcome> {
        match self {
            StepToken::B => step_b(state),
            StepToken::P => step_p(state),
            StepToken::Bp => step_bp(state),
            StepToken::Pp => step_pp(state),
        }
    }
}

impl fmt::Display for StepToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepToken::B => "B",
            StepToken::P => "P",
            StepToken::Bp => "B'",
            StepToken::Pp => "P'",
        })
    }
}

/// An ordered recurrence schedule drawn from a single alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StepSequence {
    tokens: Vec<StepToken>,
}

impl StepSequence {
    pub fn new(tokens: Vec<StepToken>) -> Result<Self> {
        if let Some(first) = tokens.first() {
            if tokens.iter().any(|t| t.alphabet() != first.alphabet()) {
                return Err(Error::MixedAlphabet);
            }
        }
        Ok(Self { tokens })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses either a compact string (`"BBP"`, `"B'B'P'"`, or lowercase
    /// `"bbp"` for the primed steps) or comma-separated tokens
    /// (`"B,P"`, `"Bp,Pp"`).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(',') {
            let tokens = s
                .split(',')
                .map(|t| match t.trim() {
                    "B" => Ok(StepToken::B),
                    "P" => Ok(StepToken::P),
                    "Bp" | "B'" => Ok(StepToken::Bp),
                    "Pp" | "P'" => Ok(StepToken::Pp),
                    _ => Err(Error::InvalidSequence(s.to_string())),
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::new(tokens);
        }
        let mut tokens = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            let primed = chars.peek() == Some(&'\'');
            if primed {
                chars.next();
            }
            let token = match (c, primed) {
                ('B', false) => StepToken::B,
                ('P', false) => StepToken::P,
                ('B', true) | ('b', false) => StepToken::Bp,
                ('P', true) | ('p', false) => StepToken::Pp,
                _ => return Err(Error::InvalidSequence(s.to_string())),
            };
            tokens.push(token);
        }
        Self::new(tokens)
    }

    /// Like [`StepSequence::parse`], but in the X-basis context plain `B`/`P`
    /// characters denote `B'`/`P'`.
    pub fn parse_in(s: &str, alphabet: Alphabet) -> Result<Self> {
        let mut seq = Self::parse(s)?;
        if alphabet == Alphabet::XBasis && seq.alphabet() == Some(Alphabet::ZBasis) {
            for t in &mut seq.tokens {
                *t = match t {
                    StepToken::B => StepToken::Bp,
                    _ => StepToken::Pp,
                };
            }
        }
        match seq.alphabet() {
            Some(a) if a != alphabet => Err(Error::MixedAlphabet),
            _ => Ok(seq),
        }
    }

    pub fn tokens(&self) -> &[StepToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// `None` for the empty sequence.
    pub fn alphabet(&self) -> Option<Alphabet> {
        self.tokens.first().map(|t| t.alphabet())
    }
}

impl fmt::Display for StepSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tokens {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl TryFrom<String> for StepSequence {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<StepSequence> for String {
    fn from(seq: StepSequence) -> Self {
        seq.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepOutcome {
    pub state: GhzDiagonalState,
    pub pass_probability: f64,
    pub trio_consumption: usize,
}

fn split_phase(state: &GhzDiagonalState) -> (&[f64], &[f64]) {
    state.probs().split_at(state.len() / 2)
}

fn post_selected(state: &GhzDiagonalState, weights: Vec<f64>, pass: f64) -> Result<StepOutcome> {
    if !(pass > 0.0) {
        return Err(Error::Degenerate { step_index: 0 });
    }
    let probs = weights.into_iter().map(|w| w / pass).collect();
    Ok(StepOutcome {
        state: GhzDiagonalState::new(state.n_parties(), probs)?,
        pass_probability: pass,
        trio_consumption: 2,
    })
}

/// Bit-flip detection: keep the first trio of a pair iff both trios carry
/// the same amplitude bits. The survivor's phase becomes `p ⊕ q`.
pub fn step_b(state: &GhzDiagonalState) -> Result<StepOutcome> {
    let (zero, one) = split_phase(state);
    let half = zero.len();
    let mut out = vec![0.0; 2 * half];
    let mut pass = 0.0;
    for a in 0..half {
        let (x, y) = (zero[a], one[a]);
        out[a] = x * x + y * y;
        out[half + a] = 2.0 * x * y;
        pass += (x + y) * (x + y);
    }
    post_selected(state, out, pass)
}

/// XOR convolution `(u ⋆ v)[c] = Σ_a u[a] v[a ⊕ c]`.
fn xor_convolve(u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    for (a, &ua) in u.iter().enumerate() {
        if ua == 0.0 {
            continue;
        }
        for (b, &vb) in v.iter().enumerate() {
            out[a ^ b] += ua * vb;
        }
    }
    out
}

/// Phase-error detection: keep the first trio iff both phases agree. The
/// survivor keeps its phase and its amplitude becomes `i ⊕ j`.
pub fn step_bp(state: &GhzDiagonalState) -> Result<StepOutcome> {
    let (zero, one) = split_phase(state);
    let mut out = xor_convolve(zero, zero);
    out.extend(xor_convolve(one, one));
    let (m0, m1): (f64, f64) = (zero.iter().sum(), one.iter().sum());
    post_selected(state, out, m0 * m0 + m1 * m1)
}

/// Phase correction over three trios: the phase of the kept trio becomes
/// the majority of the three phases, the amplitude the XOR of the three.
/// No post-selection.
pub fn step_p(state: &GhzDiagonalState) -> Result<StepOutcome> {
    let (zero, one) = split_phase(state);
    let zz = xor_convolve(zero, zero);
    let oo = xor_convolve(one, one);
    let zzz = xor_convolve(&zz, zero);
    let zzo = xor_convolve(&zz, one);
    let zoo = xor_convolve(&oo, zero);
    let ooo = xor_convolve(&oo, one);
    let half = zero.len();
    let mut out = vec![0.0; 2 * half];
    for c in 0..half {
        out[c] = zzz[c] + 3.0 * zzo[c];
        out[half + c] = 3.0 * zoo[c] + ooo[c];
    }
    Ok(StepOutcome {
        state: GhzDiagonalState::from_weights(state.n_parties(), out)?,
        pass_probability: 1.0,
        trio_consumption: 3,
    })
}

/// Amplitude correction over three trios: each amplitude bit becomes the
/// majority of the three, the phase the XOR of the three. No post-selection.
pub fn step_pp(state: &GhzDiagonalState) -> Result<StepOutcome> {
    let (zero, one) = split_phase(state);
    let half = zero.len();
    let sum: Vec<f64> = zero.iter().zip(one).map(|(a, b)| a + b).collect();
    let diff: Vec<f64> = zero.iter().zip(one).map(|(a, b)| a - b).collect();
    let mut out = vec![0.0; 2 * half];
    // For a fixed amplitude triple the phase parity is even with probability
    // (Σ_a Σ_b Σ_c + Δ_a Δ_b Δ_c) / 2.
    for a in 0..half {
        for b in 0..half {
            let (sab, dab) = (sum[a] * sum[b], diff[a] * diff[b]);
            for c in 0..half {
                let maj = (a & b) | (a & c) | (b & c);
                let (s, d) = (sab * sum[c], dab * diff[c]);
                out[maj] += 0.5 * (s + d);
                out[half + maj] += 0.5 * (s - d);
            }
        }
    }
    Ok(StepOutcome {
        state: GhzDiagonalState::from_weights(state.n_parties(), out)?,
        pass_probability: 1.0,
        trio_consumption: 3,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceOutcome {
    pub state: GhzDiagonalState,
    /// Trios retained per input trio, ignoring the final hashing stage.
    pub survival_factor: f64,
    pub pass_probabilities: Vec<f64>,
}

/// Folds the steps left to right. Each `B`/`B'` retains `P_pass / 2` trios
/// per trio consumed, each `P`/`P'` retains `1/3`.
pub fn apply_sequence(state: &GhzDiagonalState, seq: &StepSequence) -> Result<SequenceOutcome> {
    let mut current = state.clone();
    let mut survival_factor = 1.0;
    let mut pass_probabilities = Vec::with_capacity(seq.len());
    for (k, token) in seq.tokens().iter().enumerate() {
        let outcome = token.apply(&current).map_err(|e| match e {
            Error::Degenerate { .. } => Error::Degenerate { step_index: k },
            other => other,
        })?;
        survival_factor *= outcome.pass_probability / outcome.trio_consumption as f64;
        pass_probabilities.push(outcome.pass_probability);
        current = outcome.state;
    }
    Ok(SequenceOutcome {
        state: current,
        survival_factor,
        pass_probabilities,
    })
}

/// Order of the two post-selections in one recurrence round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuraoPattern {
    /// X-parity check (`B'`) first, then Z-parity check (`B`).
    P1ThenP2,
    /// Z-parity check first.
    P2ThenP1,
}

impl MuraoPattern {
    /// P1 is the X-parity post-selection, the same map as `B'`; P2 is the
    /// Z-parity post-selection, the same map as `B`.
    pub fn steps(self) -> [StepToken; 2] {
        match self {
            MuraoPattern::P1ThenP2 => [StepToken::Bp, StepToken::B],
            MuraoPattern::P2ThenP1 => [StepToken::B, StepToken::Bp],
        }
    }
}

impl FromStr for MuraoPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['+', '_', '-'], "").as_str() {
            "p1p2" | "p1thenp2" => Ok(MuraoPattern::P1ThenP2),
            "p2p1" | "p2thenp1" => Ok(MuraoPattern::P2ThenP1),
            _ => Err(Error::Parse(format!("unknown recurrence pattern {s:?} (expected p1p2 or p2p1)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedTarget,
    FixedPoint,
    MaxRounds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuraoTrajectory {
    /// Fidelity before the first step and after every half-round.
    pub fidelities: Vec<f64>,
    pub converged: bool,
    pub termination: Termination,
}

/// Fidelity change per full round below which the recurrence is stuck.
pub const FIXED_POINT_TOL: f64 = 1e-12;

pub fn murao_recurrence(
    state: &GhzDiagonalState,
    pattern: MuraoPattern,
    max_rounds: usize,
    target_fidelity: f64,
) -> Result<MuraoTrajectory> {
    if max_rounds == 0 {
        return Err(Error::Domain("max_rounds must be at least 1".into()));
    }
    if !(target_fidelity > 0.0 && target_fidelity <= 1.0) {
        return Err(Error::OutOfRange {
            what: "target_fidelity",
            value: target_fidelity,
            min: 0.0,
            max: 1.0,
        });
    }
    let mut fidelities = vec![state.fidelity()];
    let done = |fidelities: Vec<f64>, termination| {
        Ok(MuraoTrajectory {
            fidelities,
            converged: termination == Termination::ReachedTarget,
            termination,
        })
    };
    if state.fidelity() >= target_fidelity {
        return done(fidelities, Termination::ReachedTarget);
    }
    let mut current = state.clone();
    for _ in 0..max_rounds {
        let before = current.fidelity();
        for token in pattern.steps() {
            current = token
                .apply(&current)
                .map_err(|_| Error::Degenerate {
                    step_index: fidelities.len() - 1,
                })?
                .state;
            fidelities.push(current.fidelity());
            if current.fidelity() >= target_fidelity {
                return done(fidelities, Termination::ReachedTarget);
            }
        }
        if (current.fidelity() - before).abs() < FIXED_POINT_TOL {
            return done(fidelities, Termination::FixedPoint);
        }
    }
    done(fidelities, Termination::MaxRounds)
}
