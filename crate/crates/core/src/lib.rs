//! Multi-party GHZ entanglement distillation and the prepare-and-measure
//! protocols built on it.
//!
//! The crate models GHZ-diagonal states, the recurrence steps used for
//! conference key agreement (`B`, `P`) and secret sharing (`B'`, `P'`),
//! hashing yields, the CSS / two-colorable graph state correspondence, a
//! Monte Carlo simulator of the measurement-level protocols, and searches
//! for the fidelity thresholds at which distillation succeeds.

pub mod css;
pub mod density;
pub mod entropy;
pub mod error;
pub mod gf2;
pub mod hashing;
pub mod sim;
pub mod state;
pub mod steps;
pub mod threshold;

pub use entropy::{entropy_report, EntropyReport};
pub use error::{Error, Result};
pub use hashing::{yield_css, yield_improved, yield_maneva_smolin, SyndromeDistribution, YieldReport};
pub use state::{
    diagonal_from_error_rates, error_rates_from_diagonal, ErrorRateVector, GhzDiagonalState, SyndromeLabel,
};
pub use steps::{
    apply_sequence, mxor_labels, murao_recurrence, step_b, step_bp, step_p, step_pp, Alphabet, MuraoPattern,
    StepOutcome, StepSequence, StepToken,
};
