//! Monte Carlo prepare-and-measure simulation.
//!
//! Every trio is measured as soon as it is sampled. Protocol decisions
//! (post-selection, parities, key bits) read outcome bits only; the label
//! that generated each record lives in a separate verification layer that
//! re-derives every decision and counts disagreements.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{
    error_rates_from_diagonal, invert_error_rates, observable_flips, ErrorRateVector,
    GhzDiagonalState, SyndromeLabel, OBSERVABLES,
};
use crate::steps::{apply_sequence, mxor_labels, Alphabet, StepSequence, StepToken};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// I.i.d. labels drawn from the state's distribution.
pub fn sample_labels<R: Rng + ?Sized>(state: &GhzDiagonalState, n: usize, rng: &mut R) -> Result<Vec<SyndromeLabel>> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let dist = WeightedIndex::new(state.probs()).map_err(|e| Error::InvalidState(e.to_string()))?;
    let np = state.n_parties();
    Ok((0..n).map(|_| SyndromeLabel::from_index(np, dist.sample(rng))).collect())
}

pub fn sample_labels_seeded(state: &GhzDiagonalState, n: usize, seed: u64) -> Result<Vec<SyndromeLabel>> {
    sample_labels(state, n, &mut rng_from_seed(seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    X,
}

/// One party bit per trio member; bit `k` of `outcomes` belongs to party `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    outcomes: u32,
    n_parties: usize,
    hidden_label: SyndromeLabel,
}

impl MeasurementRecord {
    pub fn outcome(&self, party: usize) -> bool {
        (self.outcomes >> party) & 1 == 1
    }

    pub fn outcomes(&self) -> Vec<bool> {
        (0..self.n_parties).map(|k| self.outcome(k)).collect()
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    /// For verification only.
    pub fn hidden_label(&self) -> SyndromeLabel {
        self.hidden_label
    }

    fn parity(&self) -> bool {
        self.outcomes.count_ones() % 2 == 1
    }
}

/// `M_0` uniform, `M_k = M_0 ⊕ i_k`.
pub fn measure_z<R: Rng + ?Sized>(label: SyndromeLabel, rng: &mut R) -> MeasurementRecord {
    let n = label.n_parties();
    let m0 = rng.random::<bool>() as u32;
    let mut outcomes = m0;
    for k in 1..n {
        outcomes |= (m0 ^ label.amp_bit(k - 1) as u32) << k;
    }
    MeasurementRecord {
        outcomes,
        n_parties: n,
        hidden_label: label,
    }
}

/// All but the last party uniform; the last fixes the total parity to `p`.
pub fn measure_x<R: Rng + ?Sized>(label: SyndromeLabel, rng: &mut R) -> MeasurementRecord {
    let n = label.n_parties();
    let free = rng.random::<u32>() & ((1 << (n - 1)) - 1);
    let last = (free.count_ones() % 2 == 1) ^ label.phase();
    MeasurementRecord {
        outcomes: free | (last as u32) << (n - 1),
        n_parties: n,
        hidden_label: label,
    }
}

pub fn measure<R: Rng + ?Sized>(basis: Basis, label: SyndromeLabel, rng: &mut R) -> MeasurementRecord {
    match basis {
        Basis::Z => measure_z(label, rng),
        Basis::X => measure_x(label, rng),
    }
}

// Protocol layer: outcome bits and broadcast bits only.

/// `B`: each party broadcasts the XOR of its two bits; keep iff all agree.
fn keep_after_b(first: u32, second: u32, n: usize) -> bool {
    let x = first ^ second;
    x == 0 || x == (1 << n) - 1
}

/// `B'`: keep iff the broadcast XORs have even total parity.
fn keep_after_bp(first: u32, second: u32) -> bool {
    (first ^ second).count_ones().is_multiple_of(2)
}

/// `P`/`P'`: each party keeps the parity of its three bits.
fn local_parity(a: u32, b: u32, c: u32) -> u32 {
    a ^ b ^ c
}

// Verification layer: the same decisions from hidden labels.

fn majority(a: bool, b: bool, c: bool) -> bool {
    (a & b) | (a & c) | (b & c)
}

fn hidden_pair(token: StepToken, first: SyndromeLabel, second: SyndromeLabel) -> Result<(bool, SyndromeLabel)> {
    match token {
        StepToken::B => {
            let (kept, target) = mxor_labels(first, second)?;
            Ok((target.amp_value() == 0, kept))
        }
        _ => {
            let (target, kept) = mxor_labels(second, first)?;
            Ok((!target.phase(), kept))
        }
    }
}

fn hidden_triple(token: StepToken, l: [SyndromeLabel; 3]) -> Result<SyndromeLabel> {
    let [a, b, c] = l;
    let amp_len = a.amp_len();
    let (phase, amp): (bool, Vec<bool>) = match token {
        StepToken::P => (
            majority(a.phase(), b.phase(), c.phase()),
            (0..amp_len).map(|j| a.amp_bit(j) ^ b.amp_bit(j) ^ c.amp_bit(j)).collect(),
        ),
        _ => (
            a.phase() ^ b.phase() ^ c.phase(),
            (0..amp_len).map(|j| majority(a.amp_bit(j), b.amp_bit(j), c.amp_bit(j))).collect(),
        ),
    };
    SyndromeLabel::new(phase, &amp)
}

/// Whether a record is consistent with its hidden label.
fn record_matches_label(basis: Basis, r: &MeasurementRecord) -> bool {
    let l = r.hidden_label;
    match basis {
        Basis::Z => (1..r.n_parties).all(|k| r.outcome(0) ^ r.outcome(k) == l.amp_bit(k - 1)),
        Basis::X => r.parity() == l.phase(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepStats {
    pub step: String,
    pub trios_in: usize,
    pub groups_formed: usize,
    pub groups_kept: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub mode: String,
    pub sequence: String,
    pub seed: u64,
    pub n_input: usize,
    pub n_surviving: usize,
    /// Survivors per input trio predicted by the closed-form step maps.
    pub analytic_survival_factor: f64,
    /// Frequencies of survivor hidden labels; absent when nothing survives.
    pub empirical_label_distribution: Option<GhzDiagonalState>,
    pub analytic_prediction: GhzDiagonalState,
    /// Total-variation distance between the two distributions above.
    pub statistical_distance: f64,
    pub step_stats: Vec<StepStats>,
    /// Final outcome bit of each survivor, one `0`/`1` string per party.
    pub key_bits: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_phase_error_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_amplitude_error_rates: Option<Vec<f64>>,
    /// Survivors whose first party's bit differs from the XOR of the others'.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secret_reconstruction_failures: Option<usize>,
    /// Keep/discard or parity decisions where outcome bits and hidden labels disagree.
    pub consistency_violations: usize,
}

impl SimulationReport {
    /// Per-label `(label, empirical, analytic)` rows.
    pub fn label_rows(&self) -> Vec<(SyndromeLabel, f64, f64)> {
        self.analytic_prediction
            .iter()
            .map(|(l, a)| {
                let e = self.empirical_label_distribution.as_ref().map_or(0.0, |d| d.prob(l));
                (l, e, a)
            })
            .collect()
    }
}

fn run_protocol(
    mode: &str,
    basis: Basis,
    state: &GhzDiagonalState,
    seq: &StepSequence,
    n: usize,
    seed: u64,
) -> Result<SimulationReport> {
    let expected = match basis {
        Basis::Z => Alphabet::ZBasis,
        Basis::X => Alphabet::XBasis,
    };
    if seq.alphabet().is_some_and(|a| a != expected) {
        return Err(Error::InvalidSequence(format!(
            "{mode} runs {} steps, got {seq}",
            match expected {
                Alphabet::ZBasis => "B/P",
                Alphabet::XBasis => "B'/P'",
            }
        )));
    }
    let analytic = apply_sequence(state, seq)?;
    let mut rng = rng_from_seed(seed);
    let np = state.n_parties();
    let mut trios: Vec<MeasurementRecord> = sample_labels(state, n, &mut rng)?
        .into_iter()
        .map(|l| measure(basis, l, &mut rng))
        .collect();

    let mut violations = trios.iter().filter(|r| !record_matches_label(basis, r)).count();
    let mut step_stats = Vec::with_capacity(seq.len());
    for (k, &token) in seq.tokens().iter().enumerate() {
        let size = token.trio_consumption();
        if trios.len() < size {
            return Err(Error::Shortfall {
                step_index: k,
                available: trios.len(),
                needed: size,
            });
        }
        trios.shuffle(&mut rng);
        let trios_in = trios.len();
        let mut next = Vec::with_capacity(trios_in / size);
        for group in trios.chunks_exact(size) {
            if size == 2 {
                let (a, b) = (group[0], group[1]);
                let keep = match token {
                    StepToken::B => keep_after_b(a.outcomes, b.outcomes, np),
                    _ => keep_after_bp(a.outcomes, b.outcomes),
                };
                let (hidden_keep, survivor) = hidden_pair(token, a.hidden_label, b.hidden_label)?;
                if keep != hidden_keep {
                    violations += 1;
                }
                if keep {
                    next.push(MeasurementRecord {
                        hidden_label: survivor,
                        ..a
                    });
                }
            } else {
                let [a, b, c] = [group[0], group[1], group[2]];
                let r = MeasurementRecord {
                    outcomes: local_parity(a.outcomes, b.outcomes, c.outcomes),
                    n_parties: np,
                    hidden_label: hidden_triple(token, [a.hidden_label, b.hidden_label, c.hidden_label])?,
                };
                next.push(r);
            }
        }
        violations += next.iter().filter(|r| !record_matches_label(basis, r)).count();
        step_stats.push(StepStats {
            step: token.to_string(),
            trios_in,
            groups_formed: trios_in / size,
            groups_kept: next.len(),
        });
        trios = next;
    }

    let n_surviving = trios.len();
    let mut counts = vec![0usize; state.len()];
    for r in &trios {
        counts[r.hidden_label.index()] += 1;
    }
    let empirical = (n_surviving > 0)
        .then(|| GhzDiagonalState::new(np, counts.iter().map(|&c| c as f64 / n_surviving as f64).collect()))
        .transpose()?;
    let statistical_distance = empirical.as_ref().map_or(1.0, |e| {
        0.5 * e.probs().iter().zip(analytic.state.probs()).map(|(a, b)| (a - b).abs()).sum::<f64>()
    });
    let key_bits = (0..np)
        .map(|k| trios.iter().map(|r| if r.outcome(k) { '1' } else { '0' }).collect())
        .collect();
    let rate = |f: &dyn Fn(&MeasurementRecord) -> bool| {
        if n_surviving == 0 {
            0.0
        } else {
            trios.iter().filter(|r| f(r)).count() as f64 / n_surviving as f64
        }
    };
    let (residual_phase_error_rate, residual_amplitude_error_rates, secret_reconstruction_failures) = match basis {
        Basis::Z => (Some(rate(&|r| r.hidden_label.phase())), None, None),
        Basis::X => (
            None,
            Some((0..np - 1).map(|j| rate(&|r| r.hidden_label.amp_bit(j))).collect()),
            Some(trios.iter().filter(|r| r.parity()).count()),
        ),
    };

    Ok(SimulationReport {
        mode: mode.to_string(),
        sequence: seq.to_string(),
        seed,
        n_input: n,
        n_surviving,
        analytic_survival_factor: analytic.survival_factor,
        empirical_label_distribution: empirical,
        analytic_prediction: analytic.state,
        statistical_distance,
        step_stats,
        key_bits,
        residual_phase_error_rate,
        residual_amplitude_error_rates,
        secret_reconstruction_failures,
        consistency_violations: violations,
    })
}

/// Conference key agreement: Z-basis records and `B`/`P` steps.
pub fn run_cka(state: &GhzDiagonalState, seq: &StepSequence, n: usize, seed: u64) -> Result<SimulationReport> {
    run_protocol("cka", Basis::Z, state, seq, n, seed)
}

/// Secret sharing: X-basis records and `B'`/`P'` steps.
pub fn run_secret_sharing(state: &GhzDiagonalState, seq: &StepSequence, n: usize, seed: u64) -> Result<SimulationReport> {
    run_protocol("qss", Basis::X, state, seq, n, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThirdManReport {
    pub seed: u64,
    pub n: usize,
    pub agreement_rate: f64,
    pub analytic_agreement: f64,
    pub standard_error: f64,
}

/// Alice broadcasts her Z outcome; Bob and Charlie each recover an amplitude
/// bit and agree iff `i1 = i2`.
pub fn run_third_man(state: &GhzDiagonalState, n: usize, seed: u64) -> Result<ThirdManReport> {
    state.require_parties("run_third_man", 3)?;
    let mut rng = rng_from_seed(seed);
    let labels = sample_labels(state, n, &mut rng)?;
    let agree = labels
        .into_iter()
        .map(|l| measure_z(l, &mut rng))
        .filter(|r| {
            let alice = r.outcome(0);
            (r.outcome(1) ^ alice) == (r.outcome(2) ^ alice)
        })
        .count();
    let analytic: f64 = state.iter().filter(|(l, _)| l.amp_bit(0) == l.amp_bit(1)).map(|(_, p)| p).sum();
    Ok(ThirdManReport {
        seed,
        n,
        agreement_rate: agree as f64 / n as f64,
        analytic_agreement: analytic,
        standard_error: (analytic * (1.0 - analytic) / n as f64).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimationReport {
    pub seed: u64,
    pub m: usize,
    /// Test trios assigned to each observable.
    pub counts: [usize; 7],
    pub error_rates: ErrorRateVector,
    /// Binomial standard error of each estimated rate.
    pub standard_errors: [f64; 7],
    pub diagonal: GhzDiagonalState,
    /// Total negative mass removed before renormalizing.
    pub clamp_magnitude: f64,
    pub true_error_rates: ErrorRateVector,
}

/// Measures `m` test trios, split evenly over the seven stabilizer
/// observables, and inverts the observed error rates.
pub fn estimate_from_samples(state: &GhzDiagonalState, m: usize, seed: u64) -> Result<EstimationReport> {
    state.require_parties("estimate_from_samples", 3)?;
    if m < OBSERVABLES.len() {
        return Err(Error::Domain(format!(
            "need at least {} test trios (one per observable), got {m}",
            OBSERVABLES.len()
        )));
    }
    let mut rng = rng_from_seed(seed);
    let labels = sample_labels(state, m, &mut rng)?;
    let counts: [usize; 7] = std::array::from_fn(|k| m / 7 + usize::from(k < m % 7));
    let mut s = [0.0; 7];
    let mut offset = 0;
    for (k, &c) in counts.iter().enumerate() {
        let flips = labels[offset..offset + c].iter().filter(|&&l| observable_flips(k, l)).count();
        s[k] = flips as f64 / c as f64;
        offset += c;
    }
    let standard_errors = std::array::from_fn(|k| (s[k] * (1.0 - s[k]) / counts[k] as f64).sqrt());
    let raw = invert_error_rates(&s);
    let clamp_magnitude: f64 = raw.iter().filter(|&&p| p < 0.0).map(|p| -p).sum();
    let diagonal = GhzDiagonalState::from_weights(3, raw.iter().map(|p| p.max(0.0)).collect())?;
    let error_rates = ErrorRateVector::new(s)?;
    Ok(EstimationReport {
        seed,
        m,
        counts,
        error_rates,
        standard_errors,
        diagonal,
        clamp_magnitude,
        true_error_rates: error_rates_from_diagonal(state)?,
    })
}
