//! Dense complex linear algebra on small multi-qubit operators.
//!
//! Qubit ordering is fixed crate-wide: site 0 is the leftmost Kronecker factor and the most
//! significant bit of a computational-basis index.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type ComplexMatrix = DMatrix<Complex64>;

/// Largest supported register.
pub const MAX_QUBITS: usize = 6;

pub(crate) const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Number of qubits for a `2^n x 2^n` matrix.
pub fn qubit_count(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dim = m.nrows();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::QubitCount {
            n,
            min: 0,
            max: MAX_QUBITS,
        });
    }
    Ok(n)
}

/// Bit of `site` in basis index `index` of an `n`-qubit register.
#[inline]
pub(crate) fn bit(index: usize, site: usize, n: usize) -> usize {
    (index >> (n - 1 - site)) & 1
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, leftmost first. Empty input gives the 1x1 identity.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues (ascending) and unitary eigenvectors
/// as columns.
pub fn eigh(m: &ComplexMatrix) -> Result<(DVector<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::Dimension("eigh needs a square matrix".into()));
    }
    let scale = max_abs(m).max(1.0);
    let dev = hermitian_deviation(m);
    if dev > tolerance::ZERO * scale {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize so round-off in the input does not leak into the solver.
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = ComplexMatrix::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

pub fn eigvalsh(m: &ComplexMatrix) -> Result<DVector<f64>> {
    eigh(m).map(|(v, _)| v)
}

/// Applies a scalar function to a Hermitian matrix through its spectrum: `V f(Λ) V†`.
pub fn apply_spectral<F>(m: &ComplexMatrix, f: F) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Complex64,
{
    let (values, vectors) = eigh(m)?;
    let n = values.len();
    let mut scaled = vectors.clone();
    for k in 0..n {
        let fk = f(values[k]);
        for r in 0..n {
            scaled[(r, k)] *= fk;
        }
    }
    Ok(scaled * vectors.adjoint())
}

/// `exp(-i H t)` for Hermitian `H`, via eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    apply_spectral(h, |lambda| Complex64::from_polar(1.0, -lambda * t))
}

/// Trace norm of a Hermitian matrix (sum of |eigenvalues|).
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(m)?.iter().map(|v| v.abs()).sum())
}

/// Residual `max |U U† - I|`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    max_abs(&(u * u.adjoint() - identity(u.nrows())))
}

/// Checks Hermiticity, unit trace and positivity within the crate tolerances.
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotDensity("not square".into()));
    }
    let dev = hermitian_deviation(rho);
    if dev > tolerance::STATE {
        return Err(Error::NotDensity(format!("Hermiticity deviation {dev:e}")));
    }
    let tr = trace(rho);
    if (tr - c(1.0, 0.0)).norm() > tolerance::STATE {
        return Err(Error::NotDensity(format!("trace {tr}")));
    }
    let min = eigvalsh(rho)?.min();
    if min < tolerance::PSD_FLOOR {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(())
}

/// Reduced operator on the sites in `keep` (0-based, any order; the result follows ascending site
/// order). Sites not listed are traced out.
pub fn partial_trace(rho: &ComplexMatrix, n_qubits: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = qubit_count(rho)?;
    if n != n_qubits {
        return Err(Error::Dimension(format!(
            "matrix acts on {n} qubits, caller said {n_qubits}"
        )));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::Dimension("keep set is empty".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&s| s >= n) {
        return Err(Error::Dimension(format!("site {bad} out of range for {n} qubits")));
    }
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let reduced_index = |idx: usize| keep.iter().fold(0usize, |acc, &s| (acc << 1) | bit(idx, s, n));
    let env_index = |idx: usize| traced.iter().fold(0usize, |acc, &s| (acc << 1) | bit(idx, s, n));

    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(1 << keep.len(), 1 << keep.len());
    for i in 0..dim {
        let ei = env_index(i);
        let ri = reduced_index(i);
        for j in 0..dim {
            if env_index(j) == ei {
                out[(ri, reduced_index(j))] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Places a single-qubit operator at `site` and an `(n-1)`-qubit operator on the remaining sites
/// (in ascending order), returning the `n`-qubit product operator.
pub fn embed_product(single: &ComplexMatrix, rest: &ComplexMatrix, n: usize, site: usize) -> Result<ComplexMatrix> {
    if single.shape() != (2, 2) {
        return Err(Error::Dimension("single-site factor must be 2x2".into()));
    }
    if site >= n {
        return Err(Error::Dimension(format!("site {site} out of range for {n} qubits")));
    }
    let expected = 1usize << (n - 1);
    if rest.shape() != (expected, expected) {
        return Err(Error::Dimension(format!(
            "remaining-site operator is {}x{}, expected {expected}x{expected}",
            rest.nrows(),
            rest.ncols()
        )));
    }
    let split = |idx: usize| {
        let s = bit(idx, site, n);
        let r = (0..n)
            .filter(|&q| q != site)
            .fold(0usize, |acc, q| (acc << 1) | bit(idx, q, n));
        (s, r)
    };
    let dim = 1usize << n;
    let parts: Vec<(usize, usize)> = (0..dim).map(split).collect();
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        let (si, ri) = parts[i];
        let (sj, rj) = parts[j];
        single[(si, sj)] * rest[(ri, rj)]
    }))
}
