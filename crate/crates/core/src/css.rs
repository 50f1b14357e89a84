//! CSS stabilizer states, bipartite graph states, and the local-Clifford map
//! between them.
//!
//! Pauli operators are stored in symplectic form `(x | z)`; signs are dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

/// Independent, pairwise commuting Pauli generators on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    n_qubits: usize,
    /// `k x 2n`, x-part then z-part.
    generators: BinaryMatrix,
}

fn symplectic_product(a: &[bool], b: &[bool], n: usize) -> bool {
    (0..n).fold(false, |acc, q| acc ^ (a[q] & b[n + q]) ^ (a[n + q] & b[q]))
}

impl StabilizerGroup {
    pub fn new(n_qubits: usize, generators: BinaryMatrix) -> Result<Self> {
        if generators.cols() != 2 * n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} symplectic columns for {n_qubits} qubits",
                generators.cols()
            )));
        }
        for i in 0..generators.rows() {
            for j in i + 1..generators.rows() {
                if symplectic_product(generators.row(i), generators.row(j), n_qubits) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        if generators.rank() != generators.rows() {
            return Err(Error::DependentGenerators);
        }
        Ok(Self { n_qubits, generators })
    }

    /// One Pauli string per generator over `{I, X, Y, Z}`; a leading sign is
    /// accepted and ignored.
    pub fn from_pauli_strings<S: AsRef<str>>(strings: &[S]) -> Result<Self> {
        let trimmed: Vec<&str> = strings
            .iter()
            .map(|s| s.as_ref().trim().trim_start_matches(['+', '-']))
            .collect();
        let n = trimmed
            .first()
            .map(|s| s.chars().count())
            .ok_or_else(|| Error::Parse("no generators given".into()))?;
        if n == 0 {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        let rows = trimmed
            .iter()
            .map(|s| {
                if s.chars().count() != n {
                    return Err(Error::Parse(format!("Pauli string {s:?} does not act on {n} qubits")));
                }
                let mut row = vec![false; 2 * n];
                for (q, c) in s.chars().enumerate() {
                    let (x, z) = match c.to_ascii_uppercase() {
                        'I' => (false, false),
                        'X' => (true, false),
                        'Y' => (true, true),
                        'Z' => (false, true),
                        _ => return Err(Error::Parse(format!("'{c}' is not a Pauli operator"))),
                    };
                    row[q] = x;
                    row[n + q] = z;
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, BinaryMatrix::from_rows(2 * n, &rows)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &BinaryMatrix {
        &self.generators
    }

    pub fn to_pauli_strings(&self) -> Vec<String> {
        let n = self.n_qubits;
        (0..self.generators.rows())
            .map(|r| {
                let row = self.generators.row(r);
                (0..n)
                    .map(|q| match (row[q], row[n + q]) {
                        (false, false) => 'I',
                        (true, false) => 'X',
                        (true, true) => 'Y',
                        (false, true) => 'Z',
                    })
                    .collect()
            })
            .collect()
    }

    /// Same group up to generator choice and signs.
    pub fn same_group(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.generators.row_space_eq(&other.generators)
    }
}

/// A complete CSS stabilizer split into its Z-type and X-type generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssStabilizer {
    n_qubits: usize,
    z_block: BinaryMatrix,
    x_block: BinaryMatrix,
}

impl CssStabilizer {
    pub fn new(z_block: BinaryMatrix, x_block: BinaryMatrix) -> Result<Self> {
        let n = z_block.cols();
        if x_block.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "z block acts on {n} qubits, x block on {}",
                x_block.cols()
            )));
        }
        if !z_block.mul(&x_block.transpose())?.is_zero() {
            return Err(Error::NotCompleteCssPair("Z-type and X-type generators anticommute".into()));
        }
        let rank = z_block.rank() + x_block.rank();
        if rank != z_block.rows() + x_block.rows() {
            return Err(Error::DependentGenerators);
        }
        if rank != n {
            return Err(Error::IncompleteStabilizer { rank, n_qubits: n });
        }
        Ok(Self {
            n_qubits: n,
            z_block,
            x_block,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn z_block(&self) -> &BinaryMatrix {
        &self.z_block
    }

    pub fn x_block(&self) -> &BinaryMatrix {
        &self.x_block
    }

    pub fn to_group(&self) -> StabilizerGroup {
        let n = self.n_qubits;
        let z = BinaryMatrix::zeros(self.z_block.rows(), n).hstack(&self.z_block);
        let x = self.x_block.hstack(&BinaryMatrix::zeros(self.x_block.rows(), n));
        let generators = x.and_then(|x| x.vstack(&z?)).expect("blocks share a width");
        StabilizerGroup {
            n_qubits: n,
            generators,
        }
    }

    /// Qubit `j` of the result is qubit `perm[j]` of `self`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n_qubits)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            z_block: self.z_block.select_columns(perm),
            x_block: self.x_block.select_columns(perm),
        })
    }

    pub fn same_state(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits
            && self.z_block.row_space_eq(&other.z_block)
            && self.x_block.row_space_eq(&other.x_block)
    }
}

pub fn validate_css(s: &StabilizerGroup) -> Result<CssStabilizer> {
    let n = s.n_qubits;
    let g = &s.generators;
    let mut z_rows = Vec::new();
    let mut x_rows = Vec::new();
    for r in 0..g.rows() {
        let (x, z) = g.row(r).split_at(n);
        match (x.iter().any(|&b| b), z.iter().any(|&b| b)) {
            (true, true) => return Err(Error::NotCss { index: r }),
            (true, false) => x_rows.push(x.to_vec()),
            _ => z_rows.push(z.to_vec()),
        }
    }
    if g.rows() < n {
        return Err(Error::IncompleteStabilizer {
            rank: g.rows(),
            n_qubits: n,
        });
    }
    CssStabilizer::new(BinaryMatrix::from_rows(n, &z_rows)?, BinaryMatrix::from_rows(n, &x_rows)?)
}

/// Two-colourable graph; left vertices are `0..left`, right vertices
/// `left..left + right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    /// `left x right`
    adjacency: BinaryMatrix,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    left: usize,
    right: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for BipartiteGraph {
    type Error = Error;
    fn try_from(g: GraphJson) -> Result<Self> {
        Self::from_edges(g.left, g.right, &g.edges)
    }
}

impl From<BipartiteGraph> for GraphJson {
    fn from(g: BipartiteGraph) -> Self {
        Self {
            left: g.left_count,
            right: g.right_count,
            edges: g.edges(),
        }
    }
}

impl BipartiteGraph {
    pub fn new(left_count: usize, right_count: usize, adjacency: BinaryMatrix) -> Result<Self> {
        if adjacency.rows() != left_count || adjacency.cols() != right_count {
            return Err(Error::InvalidGraph(format!(
                "adjacency is {}x{}, expected {left_count}x{right_count}",
                adjacency.rows(),
                adjacency.cols()
            )));
        }
        if left_count + right_count == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        Ok(Self {
            left_count,
            right_count,
            adjacency,
        })
    }

    /// Edges as vertex index pairs, in either order.
    pub fn from_edges(left_count: usize, right_count: usize, edges: &[[usize; 2]]) -> Result<Self> {
        let mut adjacency = BinaryMatrix::zeros(left_count, right_count);
        let n = left_count + right_count;
        for &[a, b] in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) uses a vertex ≥ {n}")));
            }
            let (l, r) = if a < b { (a, b) } else { (b, a) };
            if r < left_count || l >= left_count {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) joins two vertices on one side")));
            }
            adjacency.set(l, r - left_count, true);
        }
        Self::new(left_count, right_count, adjacency)
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn n_vertices(&self) -> usize {
        self.left_count + self.right_count
    }

    pub fn adjacency(&self) -> &BinaryMatrix {
        &self.adjacency
    }

    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for l in 0..self.left_count {
            for r in 0..self.right_count {
                if self.adjacency.get(l, r) {
                    out.push([l, self.left_count + r]);
                }
            }
        }
        out
    }

    /// Generators `K_j = X_j Π_{k ~ j} Z_k`.
    pub fn stabilizer_group(&self) -> StabilizerGroup {
        let n = self.n_vertices();
        let mut g = BinaryMatrix::zeros(n, 2 * n);
        for j in 0..n {
            g.set(j, j, true);
        }
        for [l, r] in self.edges() {
            g.set(l, n + r, true);
            g.set(r, n + l, true);
        }
        StabilizerGroup::new(n, g).expect("graph-state generators are valid")
    }
}

/// Local operations taking a graph state to a CSS state: Hadamards on the
/// masked qubits, then qubit `j` relabelled as `qubit_permutation[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalTransformRecord {
    pub hadamard_mask: Vec<bool>,
    pub qubit_permutation: Vec<usize>,
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!("permutation of {} for {n} qubits", perm.len())));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::DimensionMismatch(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

impl LocalTransformRecord {
    pub fn new(hadamard_mask: Vec<bool>, qubit_permutation: Vec<usize>) -> Result<Self> {
        check_permutation(&qubit_permutation, hadamard_mask.len())?;
        Ok(Self {
            hadamard_mask,
            qubit_permutation,
        })
    }

    pub fn apply(&self, group: &StabilizerGroup) -> Result<StabilizerGroup> {
        let n = group.n_qubits;
        if self.hadamard_mask.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "record for {} qubits applied to {n}",
                self.hadamard_mask.len()
            )));
        }
        let g = &group.generators;
        let mut out = BinaryMatrix::zeros(g.rows(), 2 * n);
        for r in 0..g.rows() {
            for j in 0..n {
                let (mut x, mut z) = (g.get(r, j), g.get(r, n + j));
                if self.hadamard_mask[j] {
                    std::mem::swap(&mut x, &mut z);
                }
                let q = self.qubit_permutation[j];
                out.set(r, q, x);
                out.set(r, n + q, z);
            }
        }
        StabilizerGroup::new(n, out)
    }
}

/// Hadamards on the left vertices turn each left generator Z-type and each
/// right generator X-type: `z = [I | A]`, `x = [Aᵀ | I]`.
pub fn graph_to_css(g: &BipartiteGraph) -> (CssStabilizer, LocalTransformRecord) {
    let (l, r) = (g.left_count, g.right_count);
    let z = BinaryMatrix::identity(l).hstack(&g.adjacency);
    let x = g.adjacency.transpose().hstack(&BinaryMatrix::identity(r));
    let css = CssStabilizer::new(z.expect("left rows"), x.expect("right rows")).expect("graph CSS blocks are complete");
    let mask = (0..l + r).map(|v| v < l).collect();
    let record = LocalTransformRecord {
        hadamard_mask: mask,
        qubit_permutation: (0..l + r).collect(),
    };
    (css, record)
}

/// Brings the Z block to `[I | A]` (moving pivot qubits first) and reads off
/// the bipartite graph with adjacency `A`.
pub fn css_to_graph(c: &CssStabilizer) -> Result<(BipartiteGraph, LocalTransformRecord)> {
    let n = c.n_qubits;
    let (reduced, pivots) = c.z_block.rref();
    let k = pivots.len();
    let mut perm = pivots.clone();
    perm.extend((0..n).filter(|q| !pivots.contains(q)));

    let canonical = reduced.select_columns(&perm);
    let a = canonical.select_columns(&(k..n).collect::<Vec<_>>());
    let dual = a.transpose().hstack(&BinaryMatrix::identity(n - k))?;
    if !c.x_block.select_columns(&perm).row_space_eq(&dual) {
        return Err(Error::NotCompleteCssPair(
            "X-type generators do not span the dual of the Z-type code".into(),
        ));
    }
    let graph = BipartiteGraph::new(k, n - k, a)?;
    let record = LocalTransformRecord::new((0..n).map(|v| v < k).collect(), perm)?;
    Ok((graph, record))
}

/// Amplitude (`b̂`) and phase (`p̂`) syndromes of one CSS state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromePair {
    pub amp: Vec<bool>,
    pub phase: Vec<bool>,
}

impl SyndromePair {
    pub fn new(amp: Vec<bool>, phase: Vec<bool>) -> Self {
        Self { amp, phase }
    }
}

fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Bit errors travel from the first state to the second, phase errors from
/// the second to the first.
pub fn mxor_css(first: &SyndromePair, second: &SyndromePair) -> Result<(SyndromePair, SyndromePair)> {
    if first.amp.len() != second.amp.len() || first.phase.len() != second.phase.len() {
        return Err(Error::DimensionMismatch(format!(
            "syndromes of shape ({}, {}) and ({}, {})",
            first.amp.len(),
            first.phase.len(),
            second.amp.len(),
            second.phase.len()
        )));
    }
    Ok((
        SyndromePair::new(first.amp.clone(), xor(&first.phase, &second.phase)),
        SyndromePair::new(xor(&first.amp, &second.amp), second.phase.clone()),
    ))
}
