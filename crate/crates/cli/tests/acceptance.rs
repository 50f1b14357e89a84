//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the console.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ghz_core::css::{css_to_graph, graph_to_css, CssStabilizer};
use ghz_core::gf2::BinaryMatrix;
use ghz_core::sim::{run_cka, run_secret_sharing, SimulationReport};
use ghz_core::threshold::{
    hashing_threshold, murao_threshold, protocol_threshold, HashingMethod, HASHING_TOLERANCE, MURAO_MAX_ROUNDS,
    MURAO_TARGET, PROTOCOL_TOLERANCE,
};
use ghz_core::{
    diagonal_from_error_rates, error_rates_from_diagonal, step_b, step_bp, step_p, step_pp, yield_improved, Alphabet,
    GhzDiagonalState, MuraoPattern, StepSequence,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{name} = {got:.6}, expected {want} ± {tol}"))
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ghzdistill"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn field(v: &Value, path: &[&str]) -> Result<f64, String> {
    path.iter()
        .try_fold(v, |v, k| v.get(k))
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("missing {}", path.join(".")))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_state<R: Rng>(rng: &mut R) -> GhzDiagonalState {
    let w: Vec<f64> = (0..8).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let t: f64 = w.iter().sum();
    GhzDiagonalState::new(3, w.into_iter().map(|x| x / t).collect()).unwrap()
}

fn werner_golden() -> Check {
    let v = cli(&["yield", "--werner", "0.9"])?;
    for (k, want) in [("h_b0", 0.316), ("h_b1", 0.316), ("h_b2", 0.316), ("i_b1_b2", 0.074), ("i_b0_amp", 0.124)] {
        close(k, field(&v, &["entropies", k])?, want, 1e-3)?;
    }
    let (d, di) = (field(&v, &["d_h"])?, field(&v, &["d_h_improved"])?);
    close("d_h", d, 0.368, 1e-3)?;
    close("d_h_improved", di, 0.492, 1e-3)?;
    Ok(format!("D_h={d:.5} D_h'={di:.5}"))
}

fn explicit_diagonal_golden() -> Check {
    let v = cli(&["yield", "--display", "0.9,0.01,0.01,0.01,0.015,0.015,0.02,0.02"])?;
    for (k, want) in [
        ("h_b0", 0.307),
        ("h_b1", 0.286),
        ("h_b2", 0.328),
        ("h_b2_given_b1", 0.288),
        ("h_b0_given_amp", 0.169),
    ] {
        close(k, field(&v, &["entropies", k])?, want, 1e-3)?;
    }
    let (d, di) = (field(&v, &["d_h"])?, field(&v, &["d_h_improved"])?);
    close("d_h", d, 0.365, 1e-3)?;
    close("d_h_improved", di, 0.543, 1e-3)?;
    Ok(format!("D_h={d:.5} D_h'={di:.5}"))
}

fn hashing_thresholds() -> Check {
    let ms = hashing_threshold(HashingMethod::ManevaSmolin, HASHING_TOLERANCE).map_err(|e| e.to_string())?;
    let imp = hashing_threshold(HashingMethod::Improved, HASHING_TOLERANCE).map_err(|e| e.to_string())?;
    close("maneva-smolin", ms.threshold_fidelity, 0.8075, 1e-3)?;
    close("improved", imp.threshold_fidelity, 0.7554, 1e-3)?;
    ensure(ms.bracket_verified() && imp.bracket_verified(), || "bracket not verified".into())?;
    Ok(format!("{:.5} / {:.5}", ms.threshold_fidelity, imp.threshold_fidelity))
}

fn protocol(alphabet: Alphabet, want: f64, witness: &str) -> Check {
    let t = protocol_threshold(alphabet, 5, PROTOCOL_TOLERANCE).map_err(|e| e.to_string())?;
    close("threshold", t.threshold_fidelity, want, 1e-3)?;
    ensure(t.witness_sequence.to_string() == witness, || {
        format!("witness {} instead of {witness}", t.witness_sequence)
    })?;
    ensure(t.bracket_verified(), || "bracket not verified at ±2 widths".into())?;
    Ok(format!("F*={:.5} witness {}", t.threshold_fidelity, t.witness_sequence))
}

fn recurrence() -> Check {
    let t = |p| {
        murao_threshold(p, MURAO_TARGET, MURAO_MAX_ROUNDS, PROTOCOL_TOLERANCE)
            .map(|r| r.threshold_fidelity)
            .map_err(|e| e.to_string())
    };
    let (a, b) = (t(MuraoPattern::P1ThenP2)?, t(MuraoPattern::P2ThenP1)?);
    close("P1+P2", a, 0.4073, 2e-3)?;
    close("P2+P1", b, 0.3483, 2e-3)?;
    Ok(format!("P1+P2 {a:.5} / P2+P1 {b:.5}"))
}

fn ordering() -> Check {
    let v = cli(&["report-constants"])?;
    let cka = field(&v, &["cka", "value"])?;
    let qss = field(&v, &["qss", "value"])?;
    let bell = field(&v, &["bell_bound", "value"])?;
    let no_go = field(&v, &["one_way_no_go", "value"])?;
    ensure(bell == 9.0 / 16.0 && no_go == 9.0 / 16.0, || format!("bounds {bell} / {no_go}"))?;
    ensure(cka < qss && qss < bell, || format!("{cka} < {qss} < {bell} fails"))?;
    for k in ["cka", "qss", "hashing_ms", "hashing_improved"] {
        ensure(v[k]["source"] == "recomputed", || format!("{k} not recomputed"))?;
    }
    Ok(format!("{cka:.5} < {qss:.5} < {bell}"))
}

fn maj(a: usize, b: usize, c: usize) -> usize {
    (a & b) | (a & c) | (b & c)
}

fn oracle_discrepancy(s: &GhzDiagonalState) -> f64 {
    let p = s.probs();
    let (mut b, mut bp, mut pp3, mut ppp) = ([0.0; 8], [0.0; 8], [0.0; 8], [0.0; 8]);
    for x in 0..8 {
        for y in 0..8 {
            let w = p[x] * p[y];
            if x & 3 == y & 3 {
                b[((x ^ y) & 4) | (x & 3)] += w;
            }
            if x & 4 == y & 4 {
                bp[(x & 4) | ((x ^ y) & 3)] += w;
            }
            for z in 0..8 {
                let w3 = w * p[z];
                pp3[(maj(x >> 2, y >> 2, z >> 2) << 2) | ((x ^ y ^ z) & 3)] += w3;
                ppp[((x ^ y ^ z) & 4) | maj(x & 3, y & 3, z & 3)] += w3;
            }
        }
    }
    let diff = |got: &[f64], raw: &[f64; 8], pass: f64| {
        let total: f64 = raw.iter().sum();
        got.iter()
            .zip(raw)
            .map(|(g, r)| (g - r / total).abs())
            .fold((pass - total).abs(), f64::max)
    };
    let ob = step_b(s).unwrap();
    let obp = step_bp(s).unwrap();
    diff(ob.state.probs(), &b, ob.pass_probability)
        .max(diff(obp.state.probs(), &bp, obp.pass_probability))
        .max(diff(step_p(s).unwrap().state.probs(), &pp3, 1.0))
        .max(diff(step_pp(s).unwrap().state.probs(), &ppp, 1.0))
}

fn oracle_equivalence() -> Check {
    let mut r = rng(8);
    let worst = (0..1000).map(|_| oracle_discrepancy(&random_state(&mut r))).fold(0.0, f64::max);
    ensure(worst <= 1e-14, || format!("max discrepancy {worst:e}"))?;
    Ok(format!("1000 states, max discrepancy {worst:.1e}"))
}

fn random_css<R: Rng>(rng: &mut R) -> CssStabilizer {
    let n = rng.random_range(1..=8);
    loop {
        let k = rng.random_range(0..=n);
        let z: Vec<Vec<bool>> = (0..k).map(|_| (0..n).map(|_| rng.random_bool(0.5)).collect()).collect();
        let z = BinaryMatrix::from_rows(n, &z).unwrap();
        if z.rank() != k {
            continue;
        }
        // orthogonal complement by brute force over all 2^n vectors
        let dual: Vec<Vec<bool>> = (0..1usize << n)
            .map(|v| (0..n).map(|q| (v >> q) & 1 == 1).collect::<Vec<_>>())
            .filter(|v| (0..k).all(|r| (0..n).filter(|&q| z.get(r, q) && v[q]).count() % 2 == 0))
            .collect();
        let mut basis: Vec<Vec<bool>> = Vec::new();
        for v in dual {
            let mut trial = basis.clone();
            trial.push(v);
            if BinaryMatrix::from_rows(n, &trial).unwrap().rank() == trial.len() {
                basis = trial;
            }
        }
        return CssStabilizer::new(z, BinaryMatrix::from_rows(n, &basis).unwrap()).unwrap();
    }
}

fn roundtrips() -> Check {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = random_state(&mut r);
        let back = diagonal_from_error_rates(&error_rates_from_diagonal(&s).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst = worst.max(back.max_abs_diff(&s));
    }
    ensure(worst < 1e-14, || format!("error-rate roundtrip off by {worst:e}"))?;
    for i in 0..100 {
        let c = random_css(&mut r);
        let (g, rec) = css_to_graph(&c).map_err(|e| e.to_string())?;
        let mapped = rec.apply(&g.stabilizer_group()).map_err(|e| e.to_string())?;
        ensure(mapped.same_group(&c.to_group()), || format!("instance {i}: groups differ"))?;
        let (back, _) = graph_to_css(&g);
        let mut inverse = vec![0; c.n_qubits()];
        for (j, &q) in rec.qubit_permutation.iter().enumerate() {
            inverse[q] = j;
        }
        ensure(back.permute_qubits(&inverse).unwrap().same_state(&c), || format!("instance {i}: CSS differs"))?;
    }
    Ok(format!("error rates max {worst:.1e}; 100 CSS/graph instances"))
}

fn sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn check_run(name: &str, r: &SimulationReport, pass: f64) -> Result<String, String> {
    ensure(r.consistency_violations == 0, || format!("{name}: {} consistency violations", r.consistency_violations))?;
    let pairs = r.step_stats[0].groups_formed;
    let kept = r.step_stats[0].groups_kept as f64 / pairs as f64;
    ensure((kept - pass).abs() <= 4.0 * sigma(pass, pairs), || format!("{name}: survivor fraction {kept} vs {pass}"))?;
    let good = r
        .label_rows()
        .iter()
        .filter(|(_, e, a)| (e - a).abs() <= 4.0 * sigma(*a, r.n_surviving) + 1e-12)
        .count();
    ensure(good >= 7, || format!("{name}: only {good}/8 labels within 4σ"))?;
    Ok(format!("{name} {good}/8"))
}

fn monte_carlo() -> Check {
    let w = GhzDiagonalState::werner(0.9, 3).unwrap();
    let n = 100_000;
    let mut notes = Vec::new();
    for (name, seq, seed) in [("B", "B", 1), ("BP", "BP", 2)] {
        let r = run_cka(&w, &StepSequence::parse(seq).unwrap(), n, seed).map_err(|e| e.to_string())?;
        notes.push(check_run(name, &r, step_b(&w).unwrap().pass_probability)?);
    }
    for (name, seq, seed) in [("B'", "B'", 3), ("B'P'", "B'P'", 4)] {
        let r = run_secret_sharing(&w, &StepSequence::parse(seq).unwrap(), n, seed).map_err(|e| e.to_string())?;
        notes.push(check_run(name, &r, step_bp(&w).unwrap().pass_probability)?);
    }
    Ok(notes.join(", "))
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ghzdistill-{}-{name}", std::process::id()))
}

fn dominance() -> Check {
    let mut r = rng(11);
    for i in 0..1000 {
        let y = yield_improved(&random_state(&mut r)).map_err(|e| e.to_string())?;
        ensure(y.d_h_improved >= y.d_h - 1e-12, || format!("state {i}: {} < {}", y.d_h_improved, y.d_h))?;
    }
    let csv = temp_path("curve.csv");
    let csv_arg = csv.to_string_lossy().into_owned();
    cli(&["threshold", "--method", "improved", "--csv", &csv_arg, "--points", "100"])?;
    let text = std::fs::read_to_string(&csv).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&csv);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    ensure(rows.len() == 100, || format!("{} curve rows", rows.len()))?;
    for row in &rows {
        ensure(row[2] >= row[1], || format!("curve point F={}: {} < {}", row[0], row[2], row[1]))?;
    }
    Ok("1000 states; 100-point curve pointwise".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Werner F=0.9 golden", Duration::from_millis(100), werner_golden),
        ("explicit diagonal golden", Duration::from_millis(100), explicit_diagonal_golden),
        ("hashing thresholds", Duration::from_secs(1), hashing_thresholds),
        ("conference-key threshold", Duration::from_secs(60), || protocol(Alphabet::ZBasis, 0.3976, "BBBBB")),
        ("secret-sharing threshold", Duration::from_secs(60), || protocol(Alphabet::XBasis, 0.5372, "B'B'B'B'B'")),
        ("recurrence thresholds", Duration::from_secs(10), recurrence),
        ("threshold ordering", Duration::from_secs(60), ordering),
        ("step oracle equivalence", Duration::from_secs(10), oracle_equivalence),
        ("roundtrips", Duration::from_secs(10), roundtrips),
        ("Monte Carlo consistency", Duration::from_secs(30), monte_carlo),
        ("yield dominance", Duration::from_secs(60), dominance),
    ];
    let mut failed = 0;
    for (k, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|d| {
            ensure(elapsed <= limit, || format!("took {elapsed:.2?}, limit {limit:.2?}")).map(|_| d)
        });
        let (status, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(e) => {
                failed += 1;
                ("FAIL", e)
            }
        };
        println!("criterion {:>2} {status} {name} [{:.3} s]: {detail}", k + 1, elapsed.as_secs_f64());
    }
    println!("{}/11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
