//! Three-party density matrices and their reduction to GHZ-diagonal form.
//!
//! Computational basis index is `4a + 2b + c` for qubits `(A, B, C)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::state::{GhzDiagonalState, SyndromeLabel};

pub use nalgebra::Complex;
pub type C64 = Complex<f64>;

const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Checks the matrix is Hermitian, unit trace and positive semidefinite,
    /// each to within `1e-10`.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidDensityMatrix(format!(
                "{}x{} is not a square power-of-two matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let skew = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if skew > TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {skew:e})")));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TOL || trace.im.abs() > TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace} is not 1")));
        }
        let hermitian = (&matrix + matrix.adjoint()).scale(0.5);
        let min_eig = hermitian.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { matrix })
    }

    /// `Σ p_l |Ψ_l⟩⟨Ψ_l|` for a three-party diagonal state.
    pub fn from_ghz_diagonal(state: &GhzDiagonalState) -> Result<Self> {
        state.require_parties("from_ghz_diagonal", 3)?;
        let mut m = DMatrix::zeros(8, 8);
        for (label, p) in state.iter() {
            let v = ghz_basis_vector(label);
            m += (&v * v.adjoint()).scale(p);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// The matrix expressed in the GHZ basis, rows/columns in label order.
    pub fn in_ghz_basis(&self) -> Result<DMatrix<C64>> {
        self.require_three()?;
        let u = ghz_basis_unitary();
        Ok(u.adjoint() * &self.matrix * u)
    }

    fn require_three(&self) -> Result<()> {
        if self.dim() != 8 {
            return Err(Error::PartyCount {
                op: "GHZ-basis reduction",
                expected: 3,
                found: self.dim().trailing_zeros() as usize,
            });
        }
        Ok(())
    }
}

/// `|Ψ_{p,i1,i2}⟩ = (|0 i1 i2⟩ + (−1)^p |1 ī1 ī2⟩) / √2`.
pub fn ghz_basis_vector(label: SyndromeLabel) -> DVector<C64> {
    assert_eq!(label.n_parties(), 3, "three-party label required");
    let amp = label.amp_value() as usize;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DVector::zeros(8);
    v[amp] = C64::new(s, 0.0);
    v[4 | (!amp & 0b11)] = C64::new(if label.phase() { -s } else { s }, 0.0);
    v
}

/// Columns are the GHZ basis vectors in label order.
fn ghz_basis_unitary() -> DMatrix<C64> {
    let mut u = DMatrix::zeros(8, 8);
    for k in 0..8 {
        u.set_column(k, &ghz_basis_vector(SyndromeLabel::from_index(3, k)));
    }
    u
}

/// Diagonal of `ρ` in the GHZ basis.
pub fn ghz_basis_projection(rho: &DensityMatrix) -> Result<GhzDiagonalState> {
    rho.require_three()?;
    let weights = (0..8)
        .map(|k| {
            let v = ghz_basis_vector(SyndromeLabel::from_index(3, k));
            let p = (v.adjoint() * rho.matrix() * &v)[(0, 0)].re;
            if p > -TOL { Ok(p.max(0.0)) } else {
                Err(Error::InvalidDensityMatrix(format!("negative GHZ-basis weight {p:e}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GhzDiagonalState::from_weights(3, weights)
}

#[derive(Clone, Copy)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

fn pauli_matrix(p: Pauli) -> DMatrix<C64> {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let entries = match p {
        Pauli::I => [l, o, o, l],
        Pauli::X => [o, l, l, o],
        Pauli::Y => [o, -i, i, o],
        Pauli::Z => [l, o, o, -l],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

fn pauli_string(ops: [Pauli; 3]) -> DMatrix<C64> {
    let [a, b, c] = ops.map(pauli_matrix);
    a.kronecker(&b).kronecker(&c)
}

/// The eight elements of the group generated by `XXX, ZZI, ZIZ`, signs dropped.
pub fn stabilizer_elements() -> [DMatrix<C64>; 8] {
    use Pauli::*;
    [
        [I, I, I],
        [X, X, X],
        [Z, Z, I],
        [Z, I, Z],
        [I, Z, Z],
        [Y, Y, X],
        [Y, X, Y],
        [X, Y, Y],
    ]
    .map(pauli_string)
}

/// Average of `S ρ S†` over the stabilizer group.
pub fn twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    rho.require_three()?;
    let mut acc = DMatrix::zeros(8, 8);
    for s in stabilizer_elements() {
        acc += &s * rho.matrix() * s.adjoint();
    }
    DensityMatrix::new(acc.unscale(8.0))
}
