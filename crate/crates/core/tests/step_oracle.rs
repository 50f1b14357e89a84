//! The closed-form step maps against brute-force enumeration of every pair
//! or triple of labels, written with plain bit arithmetic on label indices.

mod common;

use ghz_core::{step_b, step_bp, step_p, step_pp, GhzDiagonalState, StepOutcome};

const TOL: f64 = 1e-14;

fn maj(a: usize, b: usize, c: usize) -> usize {
    (a & b) | (a & c) | (b & c)
}

/// Index layout: phase bit above `amp_len` amplitude bits.
struct Layout {
    amp_len: usize,
}

impl Layout {
    fn split(&self, x: usize) -> (usize, usize) {
        (x >> self.amp_len, x & ((1 << self.amp_len) - 1))
    }
    fn join(&self, p: usize, a: usize) -> usize {
        (p << self.amp_len) | a
    }
}

fn normalize(out: Vec<f64>) -> (Vec<f64>, f64) {
    let pass: f64 = out.iter().sum();
    (out.into_iter().map(|w| w / pass).collect(), pass)
}

fn pairs_oracle(s: &GhzDiagonalState, rule: impl Fn(&Layout, usize, usize) -> Option<usize>) -> (Vec<f64>, f64) {
    let l = Layout { amp_len: s.amp_len() };
    let p = s.probs();
    let mut out = vec![0.0; p.len()];
    for x in 0..p.len() {
        for y in 0..p.len() {
            if let Some(z) = rule(&l, x, y) {
                out[z] += p[x] * p[y];
            }
        }
    }
    normalize(out)
}

fn triples_oracle(s: &GhzDiagonalState, rule: impl Fn(&Layout, usize, usize, usize) -> usize) -> Vec<f64> {
    let l = Layout { amp_len: s.amp_len() };
    let p = s.probs();
    let mut out = vec![0.0; p.len()];
    for x in 0..p.len() {
        for y in 0..p.len() {
            for z in 0..p.len() {
                out[rule(&l, x, y, z)] += p[x] * p[y] * p[z];
            }
        }
    }
    out
}

fn b_oracle(s: &GhzDiagonalState) -> (Vec<f64>, f64) {
    pairs_oracle(s, |l, x, y| {
        let ((p, i), (q, j)) = (l.split(x), l.split(y));
        (i == j).then(|| l.join(p ^ q, i))
    })
}

fn bp_oracle(s: &GhzDiagonalState) -> (Vec<f64>, f64) {
    pairs_oracle(s, |l, x, y| {
        let ((p, i), (q, j)) = (l.split(x), l.split(y));
        (p == q).then(|| l.join(p, i ^ j))
    })
}

fn p_oracle(s: &GhzDiagonalState) -> Vec<f64> {
    triples_oracle(s, |l, x, y, z| {
        let ((p, i), (q, j), (r, k)) = (l.split(x), l.split(y), l.split(z));
        l.join(maj(p, q, r), i ^ j ^ k)
    })
}

fn pp_oracle(s: &GhzDiagonalState) -> Vec<f64> {
    triples_oracle(s, |l, x, y, z| {
        let ((p, i), (q, j), (r, k)) = (l.split(x), l.split(y), l.split(z));
        // bitwise majority of the amplitude strings
        l.join(p ^ q ^ r, maj(i, j, k))
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_pair(out: StepOutcome, (probs, pass): (Vec<f64>, f64)) -> f64 {
    max_diff(out.state.probs(), &probs).max((out.pass_probability - pass).abs())
}

fn check_triple(out: StepOutcome, probs: Vec<f64>) -> f64 {
    assert_eq!(out.pass_probability, 1.0);
    max_diff(out.state.probs(), &probs)
}

#[test]
fn closed_forms_match_enumeration_on_random_states() {
    let mut rng = common::rng(0x5eed);
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let s = common::random_state(&mut rng, 3);
        worst[0] = worst[0].max(check_pair(step_b(&s).unwrap(), b_oracle(&s)));
        worst[1] = worst[1].max(check_pair(step_bp(&s).unwrap(), bp_oracle(&s)));
        worst[2] = worst[2].max(check_triple(step_p(&s).unwrap(), p_oracle(&s)));
        worst[3] = worst[3].max(check_triple(step_pp(&s).unwrap(), pp_oracle(&s)));
    }
    for (name, w) in ["B", "B'", "P", "P'"].iter().zip(worst) {
        assert!(w <= TOL, "{name}: max discrepancy {w:e}");
    }
}

#[test]
fn closed_forms_match_enumeration_on_high_fidelity_states() {
    let mut rng = common::rng(17);
    for _ in 0..200 {
        let s = common::high_fidelity_state(&mut rng);
        assert!(check_pair(step_b(&s).unwrap(), b_oracle(&s)) <= TOL);
        assert!(check_pair(step_bp(&s).unwrap(), bp_oracle(&s)) <= TOL);
        assert!(check_triple(step_p(&s).unwrap(), p_oracle(&s)) <= TOL);
        assert!(check_triple(step_pp(&s).unwrap(), pp_oracle(&s)) <= TOL);
    }
}

#[test]
fn four_party_steps_match_enumeration() {
    let mut rng = common::rng(4);
    for _ in 0..100 {
        let s = common::random_state(&mut rng, 4);
        assert!(check_pair(step_b(&s).unwrap(), b_oracle(&s)) <= TOL);
        assert!(check_pair(step_bp(&s).unwrap(), bp_oracle(&s)) <= TOL);
        assert!(check_triple(step_p(&s).unwrap(), p_oracle(&s)) <= TOL);
        assert!(check_triple(step_pp(&s).unwrap(), pp_oracle(&s)) <= TOL);
    }
}

#[test]
fn two_party_steps_match_enumeration() {
    let mut rng = common::rng(2);
    for _ in 0..100 {
        let s = common::random_state(&mut rng, 2);
        assert!(check_pair(step_b(&s).unwrap(), b_oracle(&s)) <= TOL);
        assert!(check_triple(step_pp(&s).unwrap(), pp_oracle(&s)) <= TOL);
    }
}

#[test]
fn phase_majority_on_two_label_mixture() {
    // half the trios carry a phase error: a majority of three is wrong half the time
    let s = GhzDiagonalState::new(3, vec![0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap();
    let out = step_p(&s).unwrap().state;
    assert!((out.probs()[0] - 0.5).abs() < TOL);
    assert!((out.probs()[4] - 0.5).abs() < TOL);
    // one-in-ten phase errors: wrong majority needs two or three of them
    let s = GhzDiagonalState::new(3, vec![0.9, 0.0, 0.0, 0.0, 0.1, 0.0, 0.0, 0.0]).unwrap();
    let out = step_p(&s).unwrap().state;
    assert!((out.probs()[4] - (3.0 * 0.01 * 0.9 + 0.001)).abs() < TOL);
}

#[test]
fn amplitude_majority_is_bitwise() {
    // amplitude patterns 01, 10, 00 in equal parts; each bit is set in only one
    let s = GhzDiagonalState::new(3, vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let out = step_pp(&s).unwrap().state;
    // bit i2 ends up set iff at least two of three draws are 01: 3·(1/3)²·(2/3) + (1/3)³
    let set = 3.0 * (1.0f64 / 9.0) * (2.0 / 3.0) + 1.0 / 27.0;
    let i2_set = out.probs()[1] + out.probs()[3];
    assert!((i2_set - set).abs() < TOL);
    // 11 needs two draws of 01 and two of 10 among three: impossible
    assert_eq!(out.probs()[3], 0.0);
}
