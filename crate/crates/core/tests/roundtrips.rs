mod common;

use ghz_core::css::{css_to_graph, graph_to_css, mxor_css, validate_css, BipartiteGraph, CssStabilizer, SyndromePair};
use ghz_core::gf2::BinaryMatrix;
use ghz_core::{diagonal_from_error_rates, error_rates_from_diagonal, mxor_labels, SyndromeLabel};
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn error_rate_inversion_roundtrip() {
    let mut rng = common::rng(99);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = common::random_state(&mut rng, 3);
        let back = diagonal_from_error_rates(&error_rates_from_diagonal(&s).unwrap()).unwrap();
        worst = worst.max(back.max_abs_diff(&s));
    }
    assert!(worst < 1e-14, "{worst:e}");
}

#[test]
fn error_rates_match_label_sums() {
    // labels written as p.i1i2 whose observable reads −1, listed by hand
    let flipped: [&[&str]; 7] = [
        &["1.00", "1.01", "1.10", "1.11"],
        &["0.10", "0.11", "1.10", "1.11"],
        &["0.01", "0.11", "1.01", "1.11"],
        &["0.10", "0.11", "1.00", "1.01"],
        &["0.01", "0.10", "1.01", "1.10"],
        &["0.01", "0.11", "1.00", "1.10"],
        &["0.01", "0.10", "1.00", "1.11"],
    ];
    let mut rng = common::rng(5);
    for _ in 0..200 {
        let s = common::random_state(&mut rng, 3);
        let rates = error_rates_from_diagonal(&s).unwrap();
        for (k, labels) in flipped.iter().enumerate() {
            let sum: f64 = labels.iter().map(|l| s.prob(l.parse::<SyndromeLabel>().unwrap())).sum();
            assert!((rates.s[k] - sum).abs() < 1e-15, "s{}", k + 1);
        }
    }
}

/// Basis of `{v : m v = 0}` by elimination on the transpose-free system.
fn kernel(m: &[Vec<bool>], n: usize) -> Vec<Vec<bool>> {
    let mut rows: Vec<Vec<bool>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if let Some(p) = (r..rows.len()).find(|&i| rows[i][c]) {
            rows.swap(r, p);
            for i in 0..rows.len() {
                if i != r && rows[i][c] {
                    let src = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(src) {
                        *x ^= y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![false; n];
            v[f] = true;
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = row[f];
            }
            v
        })
        .collect()
}

fn independent_rows<R: Rng>(rng: &mut R, k: usize, n: usize) -> Vec<Vec<bool>> {
    loop {
        let rows: Vec<Vec<bool>> = (0..k).map(|_| (0..n).map(|_| rng.random_bool(0.5)).collect()).collect();
        if BinaryMatrix::from_rows(n, &rows).unwrap().rank() == k {
            return rows;
        }
    }
}

/// Replaces each row by a random combination that keeps the span.
fn scramble<R: Rng>(rng: &mut R, rows: &mut [Vec<bool>]) {
    for _ in 0..rows.len() * 2 {
        let (a, b) = (rng.random_range(0..rows.len()), rng.random_range(0..rows.len()));
        if a != b {
            let src = rows[b].clone();
            for (x, y) in rows[a].iter_mut().zip(src) {
                *x ^= y;
            }
        }
    }
    rows.shuffle(rng);
}

fn random_css<R: Rng>(rng: &mut R) -> CssStabilizer {
    let n = rng.random_range(1..=8);
    let k = rng.random_range(0..=n);
    let z = independent_rows(rng, k, n);
    let mut x = kernel(&z, n);
    scramble(rng, &mut x);
    CssStabilizer::new(BinaryMatrix::from_rows(n, &z).unwrap(), BinaryMatrix::from_rows(n, &x).unwrap()).unwrap()
}

#[test]
fn kernel_oracle_is_orthogonal() {
    let z = vec![vec![true, true, false], vec![true, false, true]];
    assert_eq!(kernel(&z, 3), vec![vec![true, true, true]]);
}

#[test]
fn css_to_graph_roundtrip_on_random_states() {
    let mut rng = common::rng(2024);
    for _ in 0..150 {
        let c = random_css(&mut rng);
        let n = c.n_qubits();
        let (g, rec) = css_to_graph(&c).unwrap();
        assert_eq!(g.n_vertices(), n);
        // the recorded local operations take the graph state to the CSS state
        assert!(rec.apply(&g.stabilizer_group()).unwrap().same_group(&c.to_group()));
        // and the graph's own CSS form is the input with qubits relabelled
        let (back, _) = graph_to_css(&g);
        let mut inverse = vec![0; n];
        for (j, &q) in rec.qubit_permutation.iter().enumerate() {
            inverse[q] = j;
        }
        assert!(back.permute_qubits(&inverse).unwrap().same_state(&c));
    }
}

#[test]
fn graph_to_css_roundtrip_on_random_graphs() {
    let mut rng = common::rng(7);
    for _ in 0..150 {
        let n: usize = rng.random_range(1..=8);
        let left = rng.random_range(0..=n);
        let mut edges = Vec::new();
        for l in 0..left {
            for r in left..n {
                if rng.random_bool(0.5) {
                    edges.push([l, r]);
                }
            }
        }
        let g = BipartiteGraph::from_edges(left, n - left, &edges).unwrap();
        let (c, rec) = graph_to_css(&g);
        assert!(validate_css(&c.to_group()).is_ok());
        assert!(rec.apply(&g.stabilizer_group()).unwrap().same_group(&c.to_group()));
        let (g2, rec2) = css_to_graph(&c).unwrap();
        assert_eq!(g2, g);
        assert_eq!(rec2, rec);
    }
}

#[test]
fn mxor_css_agrees_with_ghz_labels() {
    for x in 0..8 {
        for y in 0..8 {
            let (a, b) = (SyndromeLabel::from_index(3, x), SyndromeLabel::from_index(3, y));
            let pair = |l: SyndromeLabel| SyndromePair::new(l.amp_bits(), vec![l.phase()]);
            let (c, d) = mxor_labels(a, b).unwrap();
            let (e, f) = mxor_css(&pair(a), &pair(b)).unwrap();
            assert_eq!((pair(c), pair(d)), (e, f), "{a} {b}");
        }
    }
}
