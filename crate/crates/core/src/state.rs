//! Single- and two-qubit state construction in the Pauli (Bloch) parametrization.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, ComplexMatrix};
use crate::pauli::Pauli;
use crate::tolerance;

/// Bloch vector `(a1, a2, a3)` of a qubit, `rho = (I + a·σ)/2`.
///
/// The upper-left density-matrix entry is `(1 + a3)/2`, so `(0, 0, 1)` is `|0⟩⟨0|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub const ORIGIN: Self = Self([0.0; 3]);

    pub const fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self([a1, a2, a3])
    }

    /// Builds a vector and rejects `|a| > 1` beyond the state tolerance.
    pub fn physical(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let v = Self::new(a1, a2, a3);
        v.check()?;
        Ok(v)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() || n > 1.0 + tolerance::STATE {
            return Err(Error::BlochNorm(n));
        }
        Ok(())
    }

    pub fn is_physical(&self) -> bool {
        self.check().is_ok()
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::from(self.0)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self([v[0], v[1], v[2]])
    }

    /// Euclidean distance, equal to the trace norm of the density-matrix difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }

    pub fn density(&self) -> Result<ComplexMatrix> {
        bloch_to_density(self)
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(a: [f64; 3]) -> Self {
        Self(a)
    }
}

/// `rho = (I + a·σ)/2`.
pub fn bloch_to_density(a: &BlochVector) -> Result<ComplexMatrix> {
    a.check()?;
    Ok(bloch_operator(a))
}

/// `(I + a·σ)/2` without the norm check; linear in `a`, used for basis probing.
pub(crate) fn bloch_operator(a: &BlochVector) -> ComplexMatrix {
    let [a1, a2, a3] = a.0;
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + a3), 0.0),
            c(0.5 * a1, -0.5 * a2),
            c(0.5 * a1, 0.5 * a2),
            c(0.5 * (1.0 - a3), 0.0),
        ],
    )
}

/// Bloch vector `a_k = Tr(rho σ_k)` of a qubit density matrix.
pub fn density_to_bloch(rho: &ComplexMatrix) -> Result<BlochVector> {
    if rho.shape() != (2, 2) {
        return Err(Error::Dimension(format!(
            "expected a 2x2 density matrix, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    linalg::validate_density(rho)?;
    Ok(bloch_components(rho))
}

/// `Tr(rho σ_k)` for k = x, y, z, no validation.
pub(crate) fn bloch_components(rho: &ComplexMatrix) -> BlochVector {
    BlochVector::new(
        (rho[(0, 1)] + rho[(1, 0)]).re,
        (rho[(1, 0)] - rho[(0, 1)]).im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    )
}

/// Gibbs state of `H ∝ σz` as a Bloch vector `(0, 0, r_G)`.
pub fn gibbs_bloch(r_g: f64) -> Result<BlochVector> {
    if !r_g.is_finite() || r_g.abs() > 1.0 {
        return Err(Error::Parameter {
            name: "r_G",
            value: r_g,
            reason: "must satisfy |r_G| <= 1",
        });
    }
    Ok(BlochVector::new(0.0, 0.0, r_g))
}

/// Two-qubit correlation coefficients `c_ij`, `i, j ∈ {x, y, z}` stored 0-based
/// (`c[(0, 2)]` is `c_13`, the coefficient of `σx ⊗ σz`). The first index belongs to the system
/// (left) qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrelationMatrix(pub Matrix3<f64>);

impl CorrelationMatrix {
    pub fn zero() -> Self {
        Self(Matrix3::zeros())
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Self(Matrix3::from_fn(|i, j| rows[i][j]))
    }

    pub fn diagonal(c11: f64, c22: f64, c33: f64) -> Self {
        Self(Matrix3::from_diagonal(&Vector3::new(c11, c22, c33)))
    }

    /// `c_ij = a_i b_j`, the correlations of the product state.
    pub fn product(a: &BlochVector, b: &BlochVector) -> Self {
        Self(a.to_vector() * b.to_vector().transpose())
    }

    /// 1-based accessor matching the `c_ij` labels.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i - 1, j - 1)]
    }

    /// 1-based setter, builder style.
    pub fn with(mut self, i: usize, j: usize, value: f64) -> Self {
        self.0[(i - 1, j - 1)] = value;
        self
    }

    /// `(c21 - c12)/2`, the weight of the `XY - YX` correlation.
    pub fn antisymmetric_xy(&self) -> f64 {
        0.5 * (self.get(2, 1) - self.get(1, 2))
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    /// `(1/4) Σ c_ij σ_i ⊗ σ_j` on two qubits.
    pub fn operator(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4, 4);
        for (i, pi) in Pauli::XYZ.iter().enumerate() {
            for (j, pj) in Pauli::XYZ.iter().enumerate() {
                let cij = self.0[(i, j)];
                if cij != 0.0 {
                    out += kron(&pi.matrix(), &pj.matrix()).scale(0.25 * cij);
                }
            }
        }
        out
    }
}

/// `(1/4)[I⊗I + Σ (a_i σ_i⊗I + b_i I⊗σ_i) + Σ c_ij σ_i⊗σ_j]`, checked for positivity.
pub fn build_two_qubit_state(a: &BlochVector, b: &BlochVector, c: &CorrelationMatrix) -> Result<ComplexMatrix> {
    let id = linalg::identity(2);
    let mut rho = linalg::identity(4).scale(0.25) + c.operator();
    for (k, p) in Pauli::XYZ.iter().enumerate() {
        let m = p.matrix();
        rho += kron(&m, &id).scale(0.25 * a.0[k]);
        rho += kron(&id, &m).scale(0.25 * b.0[k]);
    }
    let min = linalg::eigvalsh(&rho)?.min();
    if min < tolerance::PSD_FLOOR {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(rho)
}

/// Product of single-qubit states given as Bloch vectors, site 0 leftmost.
pub fn product_state(vectors: &[BlochVector]) -> Result<ComplexMatrix> {
    let factors = vectors.iter().map(bloch_to_density).collect::<Result<Vec<_>>>()?;
    Ok(linalg::kron_all(&factors))
}
