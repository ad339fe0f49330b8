//! Affine qubit maps `a' = τ + T a`: extraction from a global unitary, Choi positivity,
//! class predicates, composition and fixed points.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::state::{bloch_components, bloch_operator, BlochVector};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "AffineRecord", into = "AffineRecord")]
pub struct AffineMap {
    pub tau: Vector3<f64>,
    pub t: Matrix3<f64>,
}

#[derive(Serialize, Deserialize)]
struct AffineRecord {
    tau: [f64; 3],
    #[serde(rename = "T")]
    t: [[f64; 3]; 3],
}

impl From<AffineRecord> for AffineMap {
    fn from(r: AffineRecord) -> Self {
        AffineMap::from_rows(r.tau, r.t)
    }
}

impl From<AffineMap> for AffineRecord {
    fn from(m: AffineMap) -> Self {
        AffineRecord {
            tau: m.tau.into(),
            t: m.rows(),
        }
    }
}

impl AffineMap {
    pub fn new(tau: Vector3<f64>, t: Matrix3<f64>) -> Self {
        Self { tau, t }
    }

    pub fn identity() -> Self {
        Self::new(Vector3::zeros(), Matrix3::identity())
    }

    /// `tau` and row-major `T`.
    pub fn from_rows(tau: [f64; 3], t: [[f64; 3]; 3]) -> Self {
        Self::new(Vector3::from(tau), Matrix3::from_fn(|i, j| t[i][j]))
    }

    /// Phase-covariant form: `T = [[λ c, -λ s, 0], [λ s, λ c, 0], [0, 0, λz]]`, `τ = (0, 0, τz)`
    /// with `(c, s)` the rotation by `phi`.
    pub fn phase_covariant(lambda: f64, lambda_z: f64, tau_z: f64, phi: f64) -> Self {
        let (s, co) = phi.sin_cos();
        Self::from_rows(
            [0.0, 0.0, tau_z],
            [
                [lambda * co, -lambda * s, 0.0],
                [lambda * s, lambda * co, 0.0],
                [0.0, 0.0, lambda_z],
            ],
        )
    }

    /// Rotation of the Bloch sphere about z by `alpha` (the action of `e^{-iασz/2}`).
    pub fn z_rotation(alpha: f64) -> Self {
        Self::phase_covariant(1.0, 1.0, 0.0, alpha)
    }

    /// `T` entry with 1-based indices, as `T_ij`.
    pub fn t_ij(&self, i: usize, j: usize) -> f64 {
        self.t[(i - 1, j - 1)]
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.t[(i, j)]))
    }

    /// `[[1, 0, 0, 0], [τ, T]]`.
    pub fn augmented(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        for i in 0..3 {
            m[(i + 1, 0)] = self.tau[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] = self.t[(i, j)];
            }
        }
        m
    }

    pub fn from_augmented(m: &Matrix4<f64>) -> Self {
        Self::new(
            Vector3::from_fn(|i, _| m[(i + 1, 0)]),
            Matrix3::from_fn(|i, j| m[(i + 1, j + 1)]),
        )
    }

    /// Four CSV lines, one per augmented row, 17 significant digits.
    pub fn to_csv_block(&self) -> String {
        let aug = self.augmented();
        (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| format!("{:.16e}", aug[(i, j)]))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("affine map serializes")
    }

    pub fn max_abs_diff(&self, other: &AffineMap) -> f64 {
        (self.augmented() - other.augmented()).abs().max()
    }

    pub fn apply(&self, a: &BlochVector) -> BlochVector {
        BlochVector::from_vector(&(self.tau + self.t * a.to_vector()))
    }
}

/// Action on the system qubit of `ρ_S ↦ Tr_rest[U (ρ_S ⊗ ρ_rest + χ) U†]`, probed on
/// `a ∈ {0, e1, e2, e3}`.
///
/// `env_state` lives on the non-system sites in ascending order. `chi` is a full `n`-qubit
/// operator; it must be Hermitian and have vanishing partial traces over the system and over
/// the environment, otherwise the reduced states would not be `(I + a·σ)/2 ⊗ ρ_E`-consistent
/// and the map would not be affine in `a`.
pub fn extract_map(
    u: &ComplexMatrix,
    n: usize,
    system_site: usize,
    env_state: &ComplexMatrix,
    chi: Option<&ComplexMatrix>,
) -> Result<AffineMap> {
    let nu = linalg::qubit_count(u)?;
    if nu != n || n < 2 {
        return Err(Error::Dimension(format!(
            "unitary acts on {nu} qubits, expected n = {n} >= 2"
        )));
    }
    if system_site >= n {
        return Err(Error::Dimension(format!("system site {system_site} out of range")));
    }
    let env_dim = 1usize << (n - 1);
    if env_state.shape() != (env_dim, env_dim) {
        return Err(Error::Dimension(format!(
            "environment state must be {env_dim}x{env_dim}"
        )));
    }
    linalg::validate_density(env_state)?;
    if let Some(chi) = chi {
        validate_correlations(chi, n, system_site)?;
    }

    let u_dag = u.adjoint();
    let output = |a: BlochVector| -> Result<Vector3<f64>> {
        let mut rho = linalg::embed_product(&bloch_operator(&a), env_state, n, system_site)?;
        if let Some(chi) = chi {
            rho += chi;
        }
        let evolved = u * rho * &u_dag;
        let reduced = linalg::partial_trace(&evolved, n, &[system_site])?;
        Ok(bloch_components(&reduced).to_vector())
    };

    let tau = output(BlochVector::ORIGIN)?;
    let mut t = Matrix3::zeros();
    for j in 0..3 {
        let mut e = [0.0; 3];
        e[j] = 1.0;
        let col = output(BlochVector(e))? - tau;
        t.set_column(j, &col);
    }
    Ok(AffineMap::new(tau, t))
}

fn validate_correlations(chi: &ComplexMatrix, n: usize, system_site: usize) -> Result<()> {
    let dim = 1usize << n;
    if chi.shape() != (dim, dim) {
        return Err(Error::Dimension(format!("correlation operator must be {dim}x{dim}")));
    }
    let dev = linalg::hermitian_deviation(chi);
    if dev > tolerance::STATE {
        return Err(Error::NotHermitian(dev));
    }
    let env_sites: Vec<usize> = (0..n).filter(|&q| q != system_site).collect();
    let on_system = linalg::max_abs(&linalg::partial_trace(chi, n, &[system_site])?);
    let on_env = linalg::max_abs(&linalg::partial_trace(chi, n, &env_sites)?);
    let residual = on_system.max(on_env);
    if residual > tolerance::STATE {
        return Err(Error::CorrelationsNotAffine(residual));
    }
    Ok(())
}

pub fn apply(m: &AffineMap, a: &BlochVector) -> BlochVector {
    m.apply(a)
}

/// `m2 ∘ m1`: `(τ2 + T2 τ1, T2 T1)`.
pub fn compose(m2: &AffineMap, m1: &AffineMap) -> AffineMap {
    AffineMap::new(m2.tau + m2.t * m1.tau, m2.t * m1.t)
}

/// `[a0, m(a0), ..., m^n(a0)]`.
pub fn iterate(m: &AffineMap, a0: &BlochVector, n: usize) -> Vec<BlochVector> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(*a0);
    for k in 0..n {
        let next = m.apply(&out[k]);
        out.push(next);
    }
    out
}

/// Image of an arbitrary 2x2 operator `X = (x0 I + x·σ)/2` with complex coefficients:
/// `(x0 I + (x0 τ + T x)·σ)/2`.
fn apply_operator(m: &AffineMap, x: &ComplexMatrix) -> ComplexMatrix {
    let x0 = x[(0, 0)] + x[(1, 1)];
    let xv = [
        x[(0, 1)] + x[(1, 0)],
        (x[(0, 1)] - x[(1, 0)]) * c(0.0, 1.0),
        x[(0, 0)] - x[(1, 1)],
    ];
    let y: Vec<_> = (0..3)
        .map(|i| x0 * m.tau[i] + (0..3).map(|j| xv[j] * m.t[(i, j)]).sum::<num_complex::Complex64>())
        .collect();
    let i = c(0.0, 1.0);
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            (x0 + y[2]) * 0.5,
            (y[0] - i * y[1]) * 0.5,
            (y[0] + i * y[1]) * 0.5,
            (x0 - y[2]) * 0.5,
        ],
    )
}

/// `Σ_ij Φ(E_ij) ⊗ E_ij`, i.e. `(Φ ⊗ id)` applied to the unnormalized `Σ |ii⟩⟨jj|`.
pub fn choi_matrix(m: &AffineMap) -> ComplexMatrix {
    let mut choi = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(i, j)] = c(1.0, 0.0);
            choi += linalg::kron(&apply_operator(m, &e), &e);
        }
    }
    choi
}

pub fn choi_min_eigenvalue(m: &AffineMap) -> f64 {
    linalg::eigvalsh(&choi_matrix(m))
        .expect("Choi matrix of a real affine map is Hermitian")
        .min()
}

/// Choi matrix PSD within `tol` and `Tr_out Choi = I`.
pub fn is_cptp(m: &AffineMap, tol: f64) -> bool {
    let choi = choi_matrix(m);
    let tp = linalg::partial_trace(&choi, 2, &[1]).expect("4x4 Choi matrix");
    if linalg::max_abs(&(tp - linalg::identity(2))) > tol.max(tolerance::ZERO) {
        return false;
    }
    match linalg::eigvalsh(&choi) {
        Ok(ev) => ev.min() >= -tol,
        Err(_) => false,
    }
}

/// Complete positivity of the phase-covariant family:
/// `|λz| + |τz| ≤ 1` and `4λ² + τz² ≤ (1 + λz)²`.
pub fn pc_cp_inequalities(lambda: f64, lambda_z: f64, tau_z: f64) -> bool {
    lambda_z.abs() + tau_z.abs() <= 1.0 && 4.0 * lambda * lambda + tau_z * tau_z <= (1.0 + lambda_z).powi(2)
}

/// Commutes with every z rotation: `τx = τy = 0`, `T13 = T23 = T31 = T32 = 0`,
/// `T11 = T22`, `T12 = -T21`.
pub fn is_phase_covariant(m: &AffineMap, tol: f64) -> bool {
    let t = &m.t;
    [
        m.tau[0],
        m.tau[1],
        t[(0, 2)],
        t[(1, 2)],
        t[(2, 0)],
        t[(2, 1)],
        t[(0, 0)] - t[(1, 1)],
        t[(0, 1)] + t[(1, 0)],
    ]
    .iter()
    .all(|v| v.abs() < tol)
}

/// `m(0, 0, r_G) = (0, 0, r_G)`.
pub fn is_gibbs_preserving(m: &AffineMap, r_g: f64, tol: f64) -> Result<bool> {
    let g = crate::state::gibbs_bloch(r_g)?;
    Ok(m.apply(&g).distance(&g) < tol)
}

/// `τ` that makes `T` Gibbs preserving for `r_G`: `(-T13 r_G, -T23 r_G, (1 - T33) r_G)`.
pub fn gibbs_preserving_shift(t: &Matrix3<f64>, r_g: f64) -> Vector3<f64> {
    Vector3::new(-t[(0, 2)] * r_g, -t[(1, 2)] * r_g, (1.0 - t[(2, 2)]) * r_g)
}

pub fn is_unital(m: &AffineMap, tol: f64) -> bool {
    m.tau.norm() < tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub bloch: BlochVector,
    /// `|a| ≤ 1` within the state tolerance.
    pub physical: bool,
}

/// Solves `(I - T) a = τ`.
pub fn fixed_points(m: &AffineMap) -> Result<FixedPoint> {
    let a = Matrix3::identity() - m.t;
    let det = a.determinant();
    if det.abs() <= tolerance::ZERO {
        return Err(Error::FixedPointFamily(det.abs()));
    }
    let x = a.lu().solve(&m.tau).ok_or_else(|| Error::FixedPointFamily(det.abs()))?;
    let bloch = BlochVector::from_vector(&x);
    Ok(FixedPoint {
        bloch,
        physical: bloch.norm() <= 1.0 + tolerance::STATE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapClassification {
    pub cptp: bool,
    pub unital: bool,
    pub phase_covariant: bool,
    /// `r_G` of the z-axis fixed point the map preserves, when there is a unique one.
    pub gibbs_preserving_for: Option<f64>,
    /// Supplied by the caller: whether the map came from an energy-preserving unitary.
    pub energy_preserving_origin: bool,
}

pub fn classify(m: &AffineMap, tol: f64, energy_preserving_origin: bool) -> MapClassification {
    let gibbs_preserving_for = fixed_points(m).ok().and_then(|fp| {
        let [x, y, z] = fp.bloch.0;
        let on_axis = x.abs() < tol && y.abs() < tol && z.abs() <= 1.0;
        (on_axis && is_gibbs_preserving(m, z, tol).unwrap_or(false)).then_some(z)
    });
    MapClassification {
        cptp: is_cptp(m, tol),
        unital: is_unital(m, tol),
        phase_covariant: is_phase_covariant(m, tol),
        gibbs_preserving_for,
        energy_preserving_origin,
    }
}
