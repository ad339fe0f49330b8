//! U(1)-symmetric generators, Hamiltonians and unitaries for `G = Σ_i σz⁽ⁱ⁾`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::pauli::{binomial, Pauli, PauliString};
use crate::tolerance;

/// Largest register accepted by [`random_u1_unitary`].
pub const MAX_RANDOM_QUBITS: usize = 4;

/// A unitary commuting with `G`, with the sizes of its excitation blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct U1Unitary {
    pub matrix: ComplexMatrix,
    pub n_qubits: usize,
    pub block_dims: Vec<usize>,
}

impl U1Unitary {
    /// Wraps `matrix` after checking unitarity and commutation with `G`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n = linalg::qubit_count(&matrix)?;
        if n == 0 {
            return Err(Error::Dimension("U(1) unitary needs at least one qubit".into()));
        }
        let res = linalg::unitarity_residual(&matrix);
        if res > tolerance::STATE {
            return Err(Error::Dimension(format!("matrix is not unitary (residual {res:e})")));
        }
        let comm = linalg::max_abs(&linalg::commutator(&matrix, &generator(n)));
        if comm > tolerance::STATE {
            return Err(Error::Dimension(format!(
                "matrix does not commute with the U(1) generator ({comm:e})"
            )));
        }
        Ok(Self {
            matrix,
            n_qubits: n,
            block_dims: block_dims(n),
        })
    }

    /// `exp(-i H t)` for a Hamiltonian commuting with `G`.
    pub fn evolve(h: &ComplexMatrix, t: f64) -> Result<Self> {
        Self::new(linalg::expm_hermitian(h, t)?)
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// `binom(n, m)` for `m = 0..=n`.
pub fn block_dims(n: usize) -> Vec<usize> {
    (0..=n).map(|m| binomial(n, m) as usize).collect()
}

/// Basis indices with `m` excited sites, in increasing order.
pub fn block_indices(n: usize, m: usize) -> Vec<usize> {
    (0..1usize << n).filter(|i| i.count_ones() as usize == m).collect()
}

/// `Σ_i σz⁽ⁱ⁾`, diagonal with entries `n - 2·popcount(index)`.
pub fn generator(n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |i, _| {
        c(n as f64 - 2.0 * i.count_ones() as f64, 0.0)
    }))
}

fn site_op(n: usize, site: usize, p: Pauli) -> ComplexMatrix {
    PauliString::single(n, site, p).matrix()
}

/// `(σx σx + σy σy)` between two sites.
fn hopping(n: usize, i: usize, j: usize) -> ComplexMatrix {
    site_op(n, i, Pauli::X) * site_op(n, j, Pauli::X) + site_op(n, i, Pauli::Y) * site_op(n, j, Pauli::Y)
}

/// `(h1/2) σz⊗1 + (h2/2) 1⊗σz + (J/2)(XX + YY)`.
pub fn build_xx_hamiltonian_2q(h1: f64, h2: f64, j: f64) -> ComplexMatrix {
    site_op(2, 0, Pauli::Z).scale(h1 / 2.0) + site_op(2, 1, Pauli::Z).scale(h2 / 2.0) + hopping(2, 0, 1).scale(j / 2.0)
}

/// `J Σ_{SE, SR} (XX + YY) + h Σ σz` on sites (S, E, R) = (0, 1, 2). E and R are not coupled.
pub fn build_xx_hamiltonian_3q(h: f64, j: f64) -> ComplexMatrix {
    let zeeman = (0..3).fold(ComplexMatrix::zeros(8, 8), |acc, q| acc + site_op(3, q, Pauli::Z));
    (hopping(3, 0, 1) + hopping(3, 0, 2)).scale(j) + zeeman.scale(h)
}

/// Hamiltonian families that can be assembled by name.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    Xx2q { h1: f64, h2: f64, j: f64 },
    Xx3q { h: f64, j: f64 },
    Custom(ComplexMatrix),
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<ComplexMatrix> {
        match self {
            HamiltonianSpec::Xx2q { h1, h2, j } => Ok(build_xx_hamiltonian_2q(*h1, *h2, *j)),
            HamiltonianSpec::Xx3q { h, j } => Ok(build_xx_hamiltonian_3q(*h, *j)),
            HamiltonianSpec::Custom(m) => {
                linalg::qubit_count(m)?;
                let dev = linalg::hermitian_deviation(m);
                if dev > tolerance::ZERO * linalg::max_abs(m).max(1.0) {
                    return Err(Error::NotHermitian(dev));
                }
                Ok(m.clone())
            }
        }
    }
}

/// General two-qubit U(1) unitary:
/// `e^{iφ0} ⊕ [[e^{-i(α+φ1)} cos(θ/2), -e^{i(φ1-α)} sin(θ/2)], [e^{-i(φ1-α)} sin(θ/2), e^{i(α+φ1)} cos(θ/2)]] ⊕ e^{iφ2}`.
pub fn build_general_u1_2q(phi0: f64, phi1: f64, phi2: f64, alpha: f64, theta: f64) -> U1Unitary {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (s, co) = (theta / 2.0).sin_cos();
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = e(phi0);
    m[(1, 1)] = e(-(alpha + phi1)) * co;
    m[(1, 2)] = -e(phi1 - alpha) * s;
    m[(2, 1)] = e(-(phi1 - alpha)) * s;
    m[(2, 2)] = e(alpha + phi1) * co;
    m[(3, 3)] = e(phi2);
    U1Unitary {
        matrix: m,
        n_qubits: 2,
        block_dims: block_dims(2),
    }
}

/// Haar-random `d x d` unitary: QR of a complex Gaussian matrix with `R`'s diagonal phases removed.
fn haar_block(d: usize, rng: &mut ChaCha20Rng) -> ComplexMatrix {
    let z = DMatrix::<Complex64>::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            c(1.0, 0.0)
        };
        for row in 0..d {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// Block-diagonal unitary with an independent Haar block per excitation number.
pub fn random_u1_unitary(n: usize, seed: u64) -> Result<U1Unitary> {
    if !(1..=MAX_RANDOM_QUBITS).contains(&n) {
        return Err(Error::QubitCount {
            n,
            min: 1,
            max: MAX_RANDOM_QUBITS,
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dim = 1usize << n;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for m in 0..=n {
        let idx = block_indices(n, m);
        let block = haar_block(idx.len(), &mut rng);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                u[(i, j)] = block[(a, b)];
            }
        }
    }
    Ok(U1Unitary {
        matrix: u,
        n_qubits: n,
        block_dims: block_dims(n),
    })
}

/// `‖UG - GU‖_max < tol`. Matrices that are not `2^n x 2^n` are never symmetric.
pub fn is_u1_symmetric(u: &ComplexMatrix, tol: f64) -> bool {
    match linalg::qubit_count(u) {
        Ok(n) if n >= 1 => linalg::max_abs(&linalg::commutator(u, &generator(n))) < tol,
        _ => false,
    }
}
