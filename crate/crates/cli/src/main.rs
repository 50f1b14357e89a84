//! `ghzdistill`: yields, thresholds, sequence searches, protocol simulations
//! and CSS/graph conversions for GHZ-diagonal states.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ghz_core::css::{css_to_graph, graph_to_css, validate_css, BipartiteGraph, CssStabilizer, LocalTransformRecord, StabilizerGroup};
use ghz_core::hashing::AmpOrder;
use ghz_core::sim::{estimate_from_samples, run_cka, run_secret_sharing, run_third_man, SimulationReport};
use ghz_core::threshold::{
    hashing_threshold, murao_threshold, protocol_threshold, report_constants, sequence_search_state, yield_curve,
    HashingMethod, DEFAULT_MAX_LEN, HASHING_TOLERANCE, MURAO_MAX_ROUNDS, MURAO_TARGET, PROTOCOL_TOLERANCE, WERNER_MIN,
};
use ghz_core::{
    apply_sequence, yield_css, yield_improved, yield_maneva_smolin, Alphabet, EntropyReport, GhzDiagonalState,
    MuraoPattern, StepSequence, SyndromeDistribution,
};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "ghzdistill", version, about = "GHZ-state distillation yields, thresholds and protocol simulation")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropies and hashing yields of one state.
    Yield(YieldArgs),
    /// Werner-family fidelity threshold of a hashing method, a step alphabet
    /// or a two-step recurrence.
    ///
    /// CSV sidecar columns: fidelity,d_h,d_h_improved.
    Threshold(ThresholdArgs),
    /// Best step sequence (followed by improved hashing) for one state.
    SequenceSearch(SearchArgs),
    /// Monte Carlo run of a prepare-and-measure protocol.
    ///
    /// CSV sidecar columns: label,empirical,analytic (cka, qss) or
    /// observable,estimate,true,std_error (estimate).
    Simulate(SimulateArgs),
    /// Estimate error rates and the diagonal from sampled test trios.
    ///
    /// CSV sidecar columns: observable,estimate,true,std_error.
    Estimate(EstimateArgs),
    /// Convert a CSS stabilizer state to a two-colorable graph state.
    Css2graph(Css2GraphArgs),
    /// Convert a two-colorable graph state to CSS form.
    Graph2css(Graph2CssArgs),
    /// Recompute the headline thresholds next to the published reference values.
    ReportConstants,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateSource {
    /// Werner-family state with this fidelity.
    #[arg(long)]
    werner: Option<f64>,
    /// JSON state file: {"n_parties": 3, "probs": {"0.00": 0.9, ...}}.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Eight comma-separated weights for labels 0.00,1.00,0.11,1.11,0.10,1.10,0.01,1.01.
    #[arg(long, allow_hyphen_values = true)]
    display: Option<String>,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    source: StateSource,
    /// Party count for --werner.
    #[arg(long, default_value_t = 3)]
    parties: usize,
}

#[derive(Args)]
struct YieldArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Apply this step sequence before hashing, e.g. BBP or B'B'.
    #[arg(long)]
    sequence: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    ManevaSmolin,
    Improved,
}

#[derive(Args)]
#[group(id = "target", required = true, multiple = false)]
struct ThresholdTarget {
    /// Plain hashing method.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Step alphabet: z (B, P) or x (B', P').
    #[arg(long)]
    alphabet: Option<Alphabet>,
    /// Two-step recurrence order: p1p2 or p2p1.
    #[arg(long)]
    murao: Option<MuraoPattern>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    target: ThresholdTarget,
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    max_len: usize,
    /// Bisection interval width [default: 1e-5 for hashing, 1e-4 otherwise].
    #[arg(long)]
    tolerance: Option<f64>,
    /// Recurrence target fidelity.
    #[arg(long, default_value_t = MURAO_TARGET)]
    target_fidelity: f64,
    #[arg(long, default_value_t = MURAO_MAX_ROUNDS)]
    max_rounds: usize,
    /// Write a Werner-family yield curve here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    points: usize,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    alphabet: Alphabet,
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    max_len: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cka,
    Qss,
    ThirdMan,
    Estimate,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value = "")]
    sequence: String,
    /// Trios distributed.
    #[arg(long, short, default_value_t = 100_000)]
    n: usize,
    /// Test trios for --mode estimate.
    #[arg(long, short, default_value_t = 70_000)]
    m: usize,
    #[arg(long)]
    seed: u64,
    /// Leave the per-party key strings out of the JSON.
    #[arg(long)]
    omit_key_bits: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, short, default_value_t = 70_000)]
    m: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StabilizerSource {
    /// File with one Pauli string per line; blank lines and `#` comments ignored.
    #[arg(long)]
    stabilizers: Option<PathBuf>,
    /// Comma-separated Pauli strings, e.g. XXX,ZZI,ZIZ.
    #[arg(long)]
    generators: Option<String>,
}

#[derive(Args)]
struct Css2GraphArgs {
    #[command(flatten)]
    source: StabilizerSource,
}

#[derive(Args)]
struct Graph2CssArgs {
    /// Graph JSON: {"left": L, "right": R, "edges": [[u, v], ...]}.
    #[arg(long)]
    graph: PathBuf,
}

/// A failure with a stable class name and exit code.
struct Failure {
    class: &'static str,
    code: u8,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        let (class, code) = match e.kind() {
            std::io::ErrorKind::NotFound => ("file_not_found", 3),
            _ => ("io_error", 8),
        };
        Self {
            class,
            code,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            class: "usage",
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ghz_core::Error> for Failure {
    fn from(e: ghz_core::Error) -> Self {
        use ghz_core::Error::*;
        let (class, code) = match &e {
            Parse(_) | InvalidSequence(_) | MixedAlphabet => ("malformed_input", 4),
            OutOfRange { .. }
            | InvalidState(_)
            | UnphysicalErrorRates(_)
            | InvalidDensityMatrix(_)
            | DimensionMismatch(_)
            | PartyCount { .. } => ("invalid_state", 5),
            NotCss { .. }
            | IncompleteStabilizer { .. }
            | NonCommuting(..)
            | DependentGenerators
            | NotCompleteCssPair(_)
            | InvalidGraph(_) => ("invalid_stabilizer", 6),
            Degenerate { .. } | Shortfall { .. } | Domain(_) => ("computation", 7),
        };
        Self {
            class,
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self {
            class: "malformed_input",
            code: 4,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: &'a str,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, contents: &str) -> Outcome<()> {
    std::fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn load_state(args: &StateArgs) -> Outcome<GhzDiagonalState> {
    let s = &args.source;
    if let Some(f) = s.werner {
        return Ok(GhzDiagonalState::werner(f, args.parties)?);
    }
    if let Some(path) = &s.state {
        return Ok(GhzDiagonalState::from_json_str(&read(path)?)?);
    }
    let text = s.display.as_deref().unwrap_or_default();
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| Failure::from(ghz_core::Error::Parse(format!("{v:?}: {e}")))))
        .collect::<Outcome<Vec<_>>>()?;
    let values: [f64; 8] = values
        .try_into()
        .map_err(|v: Vec<f64>| ghz_core::Error::Parse(format!("--display needs 8 weights, got {}", v.len())))?;
    Ok(GhzDiagonalState::from_display_order(values)?)
}

#[derive(Serialize)]
struct SequenceSummary {
    sequence: StepSequence,
    survival_factor: f64,
    pass_probabilities: Vec<f64>,
}

#[derive(Serialize)]
struct YieldOutput {
    input: GhzDiagonalState,
    #[serde(skip_serializing_if = "Option::is_none")]
    sequence: Option<SequenceSummary>,
    state: GhzDiagonalState,
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    entropies: Option<EntropyReport>,
    d_h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_h_improved: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chosen_amp_order: Option<AmpOrder>,
    yield_css: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    net_yield: Option<f64>,
}

fn cmd_yield(args: &YieldArgs) -> Outcome<serde_json::Value> {
    let input = load_state(&args.state)?;
    let (state, sequence) = match &args.sequence {
        Some(s) => {
            let seq = StepSequence::parse(s)?;
            let out = apply_sequence(&input, &seq)?;
            let summary = SequenceSummary {
                sequence: seq,
                survival_factor: out.survival_factor,
                pass_probabilities: out.pass_probabilities,
            };
            (out.state, Some(summary))
        }
        None => (input.clone(), None),
    };
    let improved = (state.n_parties() == 3).then(|| yield_improved(&state)).transpose()?;
    let best = improved.map_or(yield_maneva_smolin(&state), |r| r.d_h_improved);
    let out = YieldOutput {
        fidelity: state.fidelity(),
        entropies: improved.map(|r| r.entropies),
        d_h: yield_maneva_smolin(&state),
        d_h_improved: improved.map(|r| r.d_h_improved),
        chosen_amp_order: improved.map(|r| r.chosen_amp_order),
        yield_css: yield_css(&SyndromeDistribution::from_ghz(&state)),
        net_yield: sequence.as_ref().map(|s| best * s.survival_factor),
        input,
        sequence,
        state,
    };
    Ok(serde_json::to_value(out)?)
}

fn cmd_threshold(args: &ThresholdArgs) -> Outcome<serde_json::Value> {
    let t = &args.target;
    let value = if let Some(m) = t.method {
        let method = match m {
            MethodArg::ManevaSmolin => HashingMethod::ManevaSmolin,
            MethodArg::Improved => HashingMethod::Improved,
        };
        let r = hashing_threshold(method, args.tolerance.unwrap_or(HASHING_TOLERANCE))?;
        serde_json::json!({ "method": method, "result": r })
    } else if let Some(a) = t.alphabet {
        let r = protocol_threshold(a, args.max_len, args.tolerance.unwrap_or(PROTOCOL_TOLERANCE))?;
        serde_json::json!({ "alphabet": a, "max_len": args.max_len, "result": r })
    } else if let Some(p) = t.murao {
        let r = murao_threshold(p, args.target_fidelity, args.max_rounds, args.tolerance.unwrap_or(PROTOCOL_TOLERANCE))?;
        serde_json::json!({ "result": r })
    } else {
        return Err(Failure::usage("one of --method, --alphabet, --murao is required"));
    };
    if let Some(path) = &args.csv {
        let mut csv = String::from("fidelity,d_h,d_h_improved\n");
        for p in yield_curve(WERNER_MIN, 1.0, args.points)? {
            writeln!(csv, "{},{},{}", p.fidelity, p.d_h, p.d_h_improved).expect("string write");
        }
        write(path, &csv)?;
    }
    Ok(value)
}

fn cmd_search(args: &SearchArgs) -> Outcome<serde_json::Value> {
    let state = load_state(&args.state)?;
    let r = sequence_search_state(&state, args.alphabet, args.max_len)?;
    Ok(serde_json::json!({
        "fidelity": state.fidelity(),
        "alphabet": args.alphabet,
        "max_len": args.max_len,
        "result": r,
    }))
}

fn label_csv(r: &SimulationReport) -> String {
    let mut csv = String::from("label,empirical,analytic\n");
    for (l, e, a) in r.label_rows() {
        writeln!(csv, "{l},{e},{a}").expect("string write");
    }
    csv
}

fn estimate(state: &GhzDiagonalState, m: usize, seed: u64, csv: Option<&Path>) -> Outcome<serde_json::Value> {
    let r = estimate_from_samples(state, m, seed)?;
    if let Some(path) = csv {
        let mut out = String::from("observable,estimate,true,std_error\n");
        for (k, (name, _)) in ghz_core::state::OBSERVABLES.iter().enumerate() {
            writeln!(out, "{name},{},{},{}", r.error_rates.s[k], r.true_error_rates.s[k], r.standard_errors[k])
                .expect("string write");
        }
        write(path, &out)?;
    }
    Ok(serde_json::to_value(r)?)
}

fn cmd_simulate(args: &SimulateArgs) -> Outcome<serde_json::Value> {
    let state = load_state(&args.state)?;
    let run = |alphabet| -> Outcome<SimulationReport> {
        let seq = StepSequence::parse_in(&args.sequence, alphabet)?;
        Ok(match alphabet {
            Alphabet::ZBasis => run_cka(&state, &seq, args.n, args.seed)?,
            Alphabet::XBasis => run_secret_sharing(&state, &seq, args.n, args.seed)?,
        })
    };
    let mut report = match args.mode {
        Mode::Cka => run(Alphabet::ZBasis)?,
        Mode::Qss => run(Alphabet::XBasis)?,
        Mode::ThirdMan => return Ok(serde_json::to_value(run_third_man(&state, args.n, args.seed)?)?),
        Mode::Estimate => return estimate(&state, args.m, args.seed, args.csv.as_deref()),
    };
    if let Some(path) = &args.csv {
        write(path, &label_csv(&report))?;
    }
    if args.omit_key_bits {
        report.key_bits.clear();
    }
    Ok(serde_json::to_value(report)?)
}

fn parse_stabilizers(text: &str) -> Outcome<StabilizerGroup> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or_default().trim())
        .filter(|l| !l.is_empty())
        .collect();
    Ok(StabilizerGroup::from_pauli_strings(&lines)?)
}

#[derive(Serialize)]
struct CssJson {
    n_qubits: usize,
    z_block: Vec<String>,
    x_block: Vec<String>,
    generators: Vec<String>,
}

impl From<&CssStabilizer> for CssJson {
    fn from(c: &CssStabilizer) -> Self {
        let rows = |m: &ghz_core::gf2::BinaryMatrix| {
            m.row_vecs()
                .iter()
                .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
                .collect()
        };
        Self {
            n_qubits: c.n_qubits(),
            z_block: rows(c.z_block()),
            x_block: rows(c.x_block()),
            generators: c.to_group().to_pauli_strings(),
        }
    }
}

#[derive(Serialize)]
struct Conversion {
    css: CssJson,
    graph: BipartiteGraph,
    record: LocalTransformRecord,
}

fn cmd_css2graph(args: &Css2GraphArgs) -> Outcome<serde_json::Value> {
    let group = match (&args.source.stabilizers, &args.source.generators) {
        (Some(path), _) => parse_stabilizers(&read(path)?)?,
        (_, Some(list)) => parse_stabilizers(&list.replace(',', "\n"))?,
        _ => return Err(Failure::usage("one of --stabilizers, --generators is required")),
    };
    let css = validate_css(&group)?;
    let (graph, record) = css_to_graph(&css)?;
    Ok(serde_json::to_value(Conversion {
        css: (&css).into(),
        graph,
        record,
    })?)
}

fn cmd_graph2css(args: &Graph2CssArgs) -> Outcome<serde_json::Value> {
    let graph: BipartiteGraph = serde_json::from_str(&read(&args.graph)?)?;
    let (css, record) = graph_to_css(&graph);
    Ok(serde_json::to_value(Conversion {
        css: (&css).into(),
        graph,
        record,
    })?)
}

fn run(cli: &Cli) -> Outcome<String> {
    let (name, body) = match &cli.command {
        Command::Yield(a) => ("yield", cmd_yield(a)?),
        Command::Threshold(a) => ("threshold", cmd_threshold(a)?),
        Command::SequenceSearch(a) => ("sequence-search", cmd_search(a)?),
        Command::Simulate(a) => ("simulate", cmd_simulate(a)?),
        Command::Estimate(a) => ("estimate", estimate(&load_state(&a.state)?, a.m, a.seed, a.csv.as_deref())?),
        Command::Css2graph(a) => ("css2graph", cmd_css2graph(a)?),
        Command::Graph2css(a) => ("graph2css", cmd_graph2css(a)?),
        Command::ReportConstants => ("report-constants", serde_json::to_value(report_constants()?)?),
    };
    let mut text = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        command: name,
        body,
    })?;
    text.push('\n');
    Ok(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let err = serde_json::json!({ "error": { "class": f.class, "message": f.message } });
            eprintln!("{err}");
            ExitCode::from(f.code)
        }
    }
}
