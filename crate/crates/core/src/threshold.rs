//! Fidelity thresholds over the three-party Werner family.

use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{yield_improved, yield_maneva_smolin};
use crate::state::GhzDiagonalState;
use crate::steps::{apply_sequence, murao_recurrence, Alphabet, MuraoPattern, StepSequence, StepToken};

pub const WERNER_MIN: f64 = 0.125;
pub const HASHING_TOLERANCE: f64 = 1e-5;
pub const PROTOCOL_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_MAX_LEN: usize = 5;
pub const MAX_SEARCH_LEN: usize = 12;
pub const MURAO_TARGET: f64 = 0.99;
pub const MURAO_MAX_ROUNDS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HashingMethod {
    ManevaSmolin,
    Improved,
}

impl HashingMethod {
    pub fn yield_of(self, state: &GhzDiagonalState) -> Result<f64> {
        match self {
            HashingMethod::ManevaSmolin => Ok(yield_maneva_smolin(state)),
            HashingMethod::Improved => Ok(yield_improved(state)?.d_h_improved),
        }
    }
}

impl FromStr for HashingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "manevasmolin" | "ms" | "baseline" => Ok(HashingMethod::ManevaSmolin),
            "improved" => Ok(HashingMethod::Improved),
            _ => Err(Error::Parse(format!("unknown hashing method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub threshold_fidelity: f64,
    pub witness_sequence: StepSequence,
    pub yield_at_threshold: f64,
    pub bisection_interval_width: f64,
    /// Predicate value at `threshold ∓ 2 × width`; a clean bracket is `(false, true)`.
    pub below_positive: bool,
    pub above_positive: bool,
}

impl ThresholdResult {
    pub fn bracket_verified(&self) -> bool {
        !self.below_positive && self.above_positive
    }
}

fn werner(f: f64) -> Result<GhzDiagonalState> {
    GhzDiagonalState::werner(f, 3)
}

/// Bisects `[lo, hi]` for the switch of `positive` from false to true.
fn bisect<F: FnMut(f64) -> Result<bool>>(mut lo: f64, mut hi: f64, tol: f64, mut positive: F) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("bisection tolerance must be positive, got {tol}")));
    }
    if positive(lo)? || !positive(hi)? {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

fn clamp_werner(f: f64) -> f64 {
    f.clamp(WERNER_MIN, 1.0)
}

/// Werner fidelity where the plain hashing yield turns positive.
pub fn hashing_threshold(method: HashingMethod, tol: f64) -> Result<ThresholdResult> {
    let mut positive = |f: f64| Ok(method.yield_of(&werner(f)?)? > 0.0);
    let (lo, hi) = bisect(WERNER_MIN, 1.0, tol, &mut positive)?;
    let width = hi - lo;
    Ok(ThresholdResult {
        threshold_fidelity: 0.5 * (lo + hi),
        witness_sequence: StepSequence::empty(),
        yield_at_threshold: method.yield_of(&werner(hi)?)?,
        bisection_interval_width: width,
        below_positive: positive(clamp_werner(lo - 2.0 * width))?,
        above_positive: positive(clamp_werner(hi + 2.0 * width))?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_sequence: StepSequence,
    /// Improved hashing yield of the state after the sequence.
    pub yield_improved: f64,
    pub positive: bool,
    /// `yield_improved × survival_factor`, per input trio.
    pub net_yield: f64,
    pub survival_factor: f64,
    pub sequences_evaluated: usize,
    pub sequences_degenerate: usize,
}

struct Candidate {
    tokens: Vec<StepToken>,
    value: f64,
    survival: f64,
}

fn token_rank(t: StepToken) -> usize {
    match t {
        StepToken::B | StepToken::Bp => 0,
        StepToken::P | StepToken::Pp => 1,
    }
}

/// Positive first, then larger yield, then shorter, then lexicographic
/// with `B` before `P`.
fn better(a: &Candidate, b: &Candidate) -> bool {
    let key = |c: &Candidate| (c.value > 0.0, c.value);
    match key(a).partial_cmp(&key(b)) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => match a.tokens.len().cmp(&b.tokens.len()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a.tokens.iter().map(|&t| token_rank(t)).lt(b.tokens.iter().map(|&t| token_rank(t))),
        },
    }
}

struct Search {
    alphabet: [StepToken; 2],
    max_len: usize,
    tokens: Vec<StepToken>,
    best: Option<Candidate>,
    evaluated: usize,
    degenerate: usize,
}

impl Search {
    fn visit(&mut self, state: &GhzDiagonalState, survival: f64) -> Result<()> {
        self.evaluated += 1;
        let candidate = Candidate {
            tokens: self.tokens.clone(),
            value: yield_improved(state)?.d_h_improved,
            survival,
        };
        if self.best.as_ref().is_none_or(|b| better(&candidate, b)) {
            self.best = Some(candidate);
        }
        if self.tokens.len() == self.max_len {
            return Ok(());
        }
        for token in self.alphabet {
            match token.apply(state) {
                Ok(out) => {
                    self.tokens.push(token);
                    let s = survival * out.pass_probability / out.trio_consumption as f64;
                    self.visit(&out.state, s)?;
                    self.tokens.pop();
                }
                Err(Error::Degenerate { .. }) => {
                    // the whole subtree is unreachable
                    self.degenerate += (1usize << (self.max_len - self.tokens.len())) - 1;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

/// Exhaustive search over all sequences of length `0..=max_len`, each
/// followed by improved hashing.
pub fn sequence_search_state(state: &GhzDiagonalState, alphabet: Alphabet, max_len: usize) -> Result<SearchResult> {
    state.require_parties("sequence_search", 3)?;
    if max_len > MAX_SEARCH_LEN {
        return Err(Error::OutOfRange {
            what: "max_len",
            value: max_len as f64,
            min: 0.0,
            max: MAX_SEARCH_LEN as f64,
        });
    }
    let mut search = Search {
        alphabet: alphabet.tokens(),
        max_len,
        tokens: Vec::with_capacity(max_len),
        best: None,
        evaluated: 0,
        degenerate: 0,
    };
    search.visit(state, 1.0)?;
    let best = search.best.expect("the empty sequence is always evaluated");
    Ok(SearchResult {
        best_sequence: StepSequence::new(best.tokens)?,
        yield_improved: best.value,
        positive: best.value > 0.0,
        net_yield: best.value * best.survival,
        survival_factor: best.survival,
        sequences_evaluated: search.evaluated,
        sequences_degenerate: search.degenerate,
    })
}

pub fn sequence_search(fidelity: f64, alphabet: Alphabet, max_len: usize) -> Result<SearchResult> {
    sequence_search_state(&werner(fidelity)?, alphabet, max_len)
}

/// Re-derives a search result's yield by applying the sequence from scratch.
pub fn reverify(state: &GhzDiagonalState, seq: &StepSequence) -> Result<f64> {
    let out = apply_sequence(state, seq)?;
    Ok(yield_improved(&out.state)?.d_h_improved)
}

/// Lowest Werner fidelity at which some sequence of length `≤ max_len`
/// leaves a state with positive improved hashing yield.
pub fn protocol_threshold(alphabet: Alphabet, max_len: usize, tol: f64) -> Result<ThresholdResult> {
    let mut positive = |f: f64| Ok(sequence_search(f, alphabet, max_len)?.positive);
    let (lo, hi) = bisect(WERNER_MIN, 1.0, tol, &mut positive)?;
    let width = hi - lo;
    let witness = sequence_search(hi, alphabet, max_len)?;
    Ok(ThresholdResult {
        threshold_fidelity: 0.5 * (lo + hi),
        witness_sequence: witness.best_sequence,
        yield_at_threshold: witness.yield_improved,
        bisection_interval_width: width,
        below_positive: positive(clamp_werner(lo - 2.0 * width))?,
        above_positive: positive(clamp_werner(hi + 2.0 * width))?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuraoThreshold {
    pub pattern: MuraoPattern,
    pub threshold_fidelity: f64,
    pub bisection_interval_width: f64,
    pub target_fidelity: f64,
    pub max_rounds: usize,
}

/// Lowest Werner fidelity from which the two-step recurrence reaches
/// `target` within `max_rounds` rounds.
pub fn murao_threshold(pattern: MuraoPattern, target: f64, max_rounds: usize, tol: f64) -> Result<MuraoThreshold> {
    let converges = |f: f64| match murao_recurrence(&werner(f)?, pattern, max_rounds, target) {
        Ok(t) => Ok(t.converged),
        Err(Error::Degenerate { .. }) => Ok(false),
        Err(e) => Err(e),
    };
    let (lo, hi) = bisect(WERNER_MIN, target, tol, converges)?;
    Ok(MuraoThreshold {
        pattern,
        threshold_fidelity: 0.5 * (lo + hi),
        bisection_interval_width: hi - lo,
        target_fidelity: target,
        max_rounds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YieldCurvePoint {
    pub fidelity: f64,
    pub d_h: f64,
    pub d_h_improved: f64,
}

/// Both hashing yields at `points` evenly spaced Werner fidelities spanning
/// `[lo, hi]`.
pub fn yield_curve(lo: f64, hi: f64, points: usize) -> Result<Vec<YieldCurvePoint>> {
    if points < 2 || !(WERNER_MIN..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
        return Err(Error::Domain(format!(
            "need at least 2 points on a sub-interval of [{WERNER_MIN}, 1], got {points} on [{lo}, {hi}]"
        )));
    }
    (0..points)
        .map(|k| {
            let f = lo + (hi - lo) * k as f64 / (points - 1) as f64;
            let r = yield_improved(&werner(f)?)?;
            Ok(YieldCurvePoint {
                fidelity: f,
                d_h: r.d_h,
                d_h_improved: r.d_h_improved,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Source {
    #[serde(rename = "recomputed")]
    Recomputed,
    #[serde(rename = "paper-constant")]
    PaperConstant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEntry {
    pub value: f64,
    pub source: Source,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recomputed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ConstantEntry {
    fn recomputed(value: f64) -> Self {
        Self {
            value,
            source: Source::Recomputed,
            recomputed: None,
            warning: None,
        }
    }

    fn literal(value: f64) -> Self {
        Self {
            value,
            source: Source::PaperConstant,
            recomputed: None,
            warning: None,
        }
    }

    /// A published value checked against our own recomputation.
    fn cross_checked(value: f64, recomputed: f64, tol: f64) -> Self {
        let warning = ((recomputed - value).abs() > tol)
            .then(|| format!("recomputed {recomputed:.4} differs from {value} by more than {tol}"));
        Self {
            value,
            source: Source::PaperConstant,
            recomputed: Some(recomputed),
            warning,
        }
    }
}

pub const BELL_BOUND: f64 = 9.0 / 16.0;
pub const ONE_WAY_NO_GO: f64 = 9.0 / 16.0;
pub const MURAO_P1P2: f64 = 0.4073;
pub const MURAO_P2P1: f64 = 0.3483;
pub const MURAO_WARN_TOL: f64 = 0.002;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub bell_bound: ConstantEntry,
    pub one_way_no_go: ConstantEntry,
    pub murao_p1p2: ConstantEntry,
    pub murao_p2p1: ConstantEntry,
    pub hashing_ms: ConstantEntry,
    pub hashing_improved: ConstantEntry,
    pub cka: ConstantEntry,
    pub qss: ConstantEntry,
}

pub fn report_constants() -> Result<ConstantsReport> {
    let murao = |p| murao_threshold(p, MURAO_TARGET, MURAO_MAX_ROUNDS, PROTOCOL_TOLERANCE).map(|t| t.threshold_fidelity);
    let hashing = |m| hashing_threshold(m, HASHING_TOLERANCE).map(|t| t.threshold_fidelity);
    let protocol = |a| protocol_threshold(a, DEFAULT_MAX_LEN, PROTOCOL_TOLERANCE).map(|t| t.threshold_fidelity);
    Ok(ConstantsReport {
        bell_bound: ConstantEntry::literal(BELL_BOUND),
        one_way_no_go: ConstantEntry::literal(ONE_WAY_NO_GO),
        murao_p1p2: ConstantEntry::cross_checked(MURAO_P1P2, murao(MuraoPattern::P1ThenP2)?, MURAO_WARN_TOL),
        murao_p2p1: ConstantEntry::cross_checked(MURAO_P2P1, murao(MuraoPattern::P2ThenP1)?, MURAO_WARN_TOL),
        hashing_ms: ConstantEntry::recomputed(hashing(HashingMethod::ManevaSmolin)?),
        hashing_improved: ConstantEntry::recomputed(hashing(HashingMethod::Improved)?),
        cka: ConstantEntry::recomputed(protocol(Alphabet::ZBasis)?),
        qss: ConstantEntry::recomputed(protocol(Alphabet::XBasis)?),
    })
}
