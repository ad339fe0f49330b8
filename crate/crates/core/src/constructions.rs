//! Closed-form affine maps of the XX-coupled two- and three-qubit models.
//!
//! All maps are in the physical normalization, i.e. they agree with [`extract_map`] on the
//! corresponding model. The two-qubit models use `H = h1 σz⊗1 + h2 1⊗σz + (J/2)(XX + YY)`;
//! time enters only through `Jt`, `h t`.
//!
//! [`extract_map`]: crate::affine::extract_map

use std::f64::consts::SQRT_2;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::state::{self, BlochVector, CorrelationMatrix};
use crate::tolerance;
use crate::u1::{self, U1Unitary};

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn check_bloch(name: &'static str, b: &BlochVector) -> Result<()> {
    if b.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter {
            name,
            value: f64::NAN,
            reason: "components must be finite",
        });
    }
    b.check()
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value.abs() > 1.0 {
        return Err(Error::Parameter {
            name,
            value,
            reason: "must lie in [-1, 1]",
        });
    }
    Ok(())
}

/// Coupling and local fields of the two-qubit model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitParams {
    pub j: f64,
    pub h1: f64,
    pub h2: f64,
}

impl TwoQubitParams {
    pub fn new(j: f64, h1: f64, h2: f64) -> Self {
        Self { j, h1, h2 }
    }

    /// Equal fields `h1 = h2 = h`.
    pub fn resonant(j: f64, h: f64) -> Self {
        Self::new(j, h, h)
    }

    pub fn h_minus(&self) -> f64 {
        self.h1 - self.h2
    }

    pub fn h_plus(&self) -> f64 {
        self.h1 + self.h2
    }

    pub fn theta(&self) -> f64 {
        self.j.hypot(self.h_minus())
    }

    fn scaled(&self, t: f64) -> Self {
        Self::new(self.j * t, self.h1 * t, self.h2 * t)
    }

    /// `h1 σz⊗1 + h2 1⊗σz + (J/2)(XX + YY)`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        u1::build_xx_hamiltonian_2q(2.0 * self.h1, 2.0 * self.h2, self.j)
    }

    pub fn unitary(&self, t: f64) -> Result<U1Unitary> {
        U1Unitary::evolve(&self.hamiltonian(), t)
    }
}

/// Rotation block shared by the resonant two-qubit maps: `θ = Jt`, `h+ = 2ht`.
struct Resonant {
    s: f64,
    c: f64,
    sh: f64,
    ch: f64,
}

impl Resonant {
    fn new(j: f64, h: f64, t: f64) -> Self {
        let (s, c) = (j * t).sin_cos();
        let (sh, ch) = (2.0 * h * t).sin_cos();
        Self { s, c, sh, ch }
    }

    fn s2(&self) -> f64 {
        2.0 * self.s * self.c
    }

    fn pc_block(&self) -> Matrix3<f64> {
        let (c, sh, ch) = (self.c, self.sh, self.ch);
        Matrix3::new(c * ch, -c * sh, 0.0, c * sh, c * ch, 0.0, 0.0, 0.0, c * c)
    }
}

/// Diagonal environment `(0, 0, b3)` with no initial correlations.
pub fn phi_pc(j: f64, h: f64, b3: f64, t: f64) -> AffineMap {
    let r = Resonant::new(j, h, t);
    AffineMap::new(Vector3::new(0.0, 0.0, b3 * r.s * r.s), r.pc_block())
}

/// Environment with transverse Bloch components; no initial correlations.
pub fn phi_env_coherent(j: f64, h: f64, b: &BlochVector, t: f64) -> AffineMap {
    let r = Resonant::new(j, h, t);
    let [b1, b2, b3] = b.0;
    let mut m = r.pc_block();
    m[(0, 2)] = r.s * (b1 * r.sh + b2 * r.ch);
    m[(1, 2)] = r.s * (b2 * r.sh - b1 * r.ch);
    m[(2, 0)] = -0.5 * b2 * r.s2();
    m[(2, 1)] = 0.5 * b1 * r.s2();
    AffineMap::new(Vector3::new(0.0, 0.0, b3 * r.s * r.s), m)
}

/// Diagonal environment plus correlations `c31 σz⊗σx + c32 σz⊗σy` and the antisymmetric
/// `c_asym (σy⊗σx - σx⊗σy)`, with `c_asym = (c21 - c12)/2`.
pub fn phi_correlated(j: f64, h: f64, b3: f64, c31: f64, c32: f64, c_asym: f64, t: f64) -> AffineMap {
    let r = Resonant::new(j, h, t);
    let tau = Vector3::new(
        r.s * (c31 * r.sh + c32 * r.ch),
        r.s * (c32 * r.sh - c31 * r.ch),
        b3 * r.s * r.s + c_asym * r.s2(),
    );
    AffineMap::new(tau, r.pc_block())
}

/// General two-qubit map with unequal fields, environment `b` and correlation part `chi`
/// (`ρ = ρ_S ⊗ ρ_E + (1/4) Σ χ_ij σ_i⊗σ_j`). Fails when the `a = 0` input state is not positive.
pub fn phi_e_general(p: &TwoQubitParams, b: &BlochVector, chi: &CorrelationMatrix, t: f64) -> Result<AffineMap> {
    check_bloch("b", b)?;
    state::build_two_qubit_state(&BlochVector::ORIGIN, b, chi)?;
    Ok(general_map(&p.scaled(t), b, chi))
}

fn general_map(p: &TwoQubitParams, b: &BlochVector, chi: &CorrelationMatrix) -> AffineMap {
    let (j, hm) = (p.j, p.h_minus());
    let th = p.theta();
    let ct = th.cos();
    let (sh, ch) = p.h_plus().sin_cos();
    let (sc, sc2) = (sinc(th), sinc(th).powi(2));
    let [b1, b2, b3] = b.0;
    let cc = |i, k| chi.get(i, k);

    let tau = Vector3::new(
        j * sc * (cc(3, 1) * sh + cc(3, 2) * ch),
        j * sc * (cc(3, 2) * sh - cc(3, 1) * ch),
        j * j * b3 * sc2 + j * hm * (cc(1, 1) + cc(2, 2)) * sc2 + j * (cc(2, 1) - cc(1, 2)) * sinc(2.0 * th),
    );
    let diag = ct * ch - hm * sc * sh;
    let rot = hm * sc * ch + ct * sh;
    let t = Matrix3::new(
        diag,
        -rot,
        j * sc * (b1 * sh + b2 * ch),
        rot,
        diag,
        j * sc * (b2 * sh - b1 * ch),
        j * b1 * hm * sc2 - j * b2 * ct * sc,
        j * b1 * ct * sc + j * b2 * hm * sc2,
        1.0 - j * j * sc2,
    );
    AffineMap::new(tau, t)
}

/// Gibbs-preserving map from a coherent environment with correlations tuned to cancel the
/// transverse shift. Returns the map and the required correlation part
/// (`c31 = -b1 r_G`, `c32 = -b2 r_G`, `c21 = -c12 = (r_G - b3) tan θ / 2`).
pub fn phi_gp_finetuned(j: f64, h: f64, b: &BlochVector, r_g: f64, t: f64) -> Result<(AffineMap, CorrelationMatrix)> {
    check_bloch("b", b)?;
    check_unit("r_G", r_g)?;
    let theta = j * t;
    let (s, c) = theta.sin_cos();
    if (s * c).abs() < tolerance::ZERO {
        return Err(Error::Parameter {
            name: "theta",
            value: theta,
            reason: "fine-tuning is singular at multiples of pi/2",
        });
    }
    let base = phi_env_coherent(j, h, b, t);
    let [b1, b2, b3] = b.0;
    let c_asym = 0.5 * (r_g - b3) * s / c;
    let chi = CorrelationMatrix::zero()
        .with(3, 1, -b1 * r_g)
        .with(3, 2, -b2 * r_g)
        .with(2, 1, c_asym)
        .with(1, 2, -c_asym);
    let tau = crate::affine::gibbs_preserving_shift(&base.t, r_g);
    Ok((AffineMap::new(tau, base.t), chi))
}

/// Three-qubit model: system S coupled to environment E (`(0, 0, b3)`) and resource R (`f`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeQubitParams {
    pub j: f64,
    pub h: f64,
    pub b3: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

/// Compact coefficients of the three-qubit map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeQubitCoefficients {
    pub s_j: f64,
    pub c_j: f64,
    pub s_2j: f64,
    pub c_2j: f64,
    pub s_4j: f64,
    pub c_4j: f64,
    pub s_2h: f64,
    pub c_2h: f64,
    pub a: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub b1: f64,
    pub b2: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

impl ThreeQubitParams {
    pub fn new(j: f64, h: f64, b3: f64, f: [f64; 3]) -> Result<Self> {
        let p = Self {
            j,
            h,
            b3,
            f1: f[0],
            f2: f[1],
            f3: f[2],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("J", self.j), ("h", self.h)] {
            if !v.is_finite() {
                return Err(Error::Parameter {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
        }
        check_unit("b3", self.b3)?;
        check_bloch("f", &self.resource())
    }

    pub fn resource(&self) -> BlochVector {
        BlochVector::new(self.f1, self.f2, self.f3)
    }

    pub fn environment(&self) -> BlochVector {
        BlochVector::new(0.0, 0.0, self.b3)
    }

    /// `ρ_E ⊗ ρ_R` on sites (1, 2).
    pub fn env_state(&self) -> Result<ComplexMatrix> {
        state::product_state(&[self.environment(), self.resource()])
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        u1::build_xx_hamiltonian_3q(self.h, self.j)
    }

    pub fn unitary(&self, t: f64) -> Result<U1Unitary> {
        U1Unitary::evolve(&self.hamiltonian(), t)
    }

    /// Coefficients at `Jt`, `ht`.
    pub fn coefficients(&self, t: f64) -> ThreeQubitCoefficients {
        let (j, h) = (self.j * t, self.h * t);
        let (s_j, c_j) = (SQRT_2 * j).sin_cos();
        let (s_2j, c_2j) = (2.0 * SQRT_2 * j).sin_cos();
        let (s_4j, c_4j) = (4.0 * SQRT_2 * j).sin_cos();
        let (s_2h, c_2h) = (2.0 * h).sin_cos();
        let bf = self.b3 * self.f3;
        ThreeQubitCoefficients {
            s_j,
            c_j,
            s_2j,
            c_2j,
            s_4j,
            c_4j,
            s_2h,
            c_2h,
            a: 4.0 * (bf + 1.0) * c_2j - (bf - 1.0) * (c_4j + 3.0),
            omega1: self.f1 * s_2h + self.f2 * c_2h,
            omega2: self.f2 * s_2h - self.f1 * c_2h,
            b1: SQRT_2 * self.b3 * s_j.powi(3) * c_j,
            b2: SQRT_2 * s_j * c_j.powi(3),
            phi_plus: c_2h / 8.0,
            phi_minus: s_2h / 8.0,
        }
    }
}

/// Map on S of the three-qubit model after tracing out E and R.
pub fn phi_gp_3qubit(p: &ThreeQubitParams, t: f64) -> Result<AffineMap> {
    p.validate()?;
    let k = p.coefficients(t);
    let tau = Vector3::new(k.b1 * k.omega1, k.b1 * k.omega2, 0.5 * (p.b3 + p.f3) * k.s_2j * k.s_2j);
    let m = Matrix3::new(
        k.a * k.phi_plus,
        -k.a * k.phi_minus,
        k.b2 * k.omega1,
        k.a * k.phi_minus,
        k.a * k.phi_plus,
        k.b2 * k.omega2,
        -p.f2 * k.s_4j / (2.0 * SQRT_2),
        p.f1 * k.s_4j / (2.0 * SQRT_2),
        k.c_2j * k.c_2j,
    );
    Ok(AffineMap::new(tau, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// `b3 · r_G ≥ 0`: no real coupling reaches the target.
    SignConflict,
    /// `|f3| > 1`.
    ResourceNormExceeded,
}

/// Coupling and resource polarization making the three-qubit map Gibbs preserving for `r_G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpSolution {
    pub b3: f64,
    pub r_g: f64,
    /// `arctan(sqrt(-r_G / b3)) / √2`; `None` when the radicand is negative.
    pub j: Option<f64>,
    pub f3: f64,
    pub feasible: bool,
    pub infeasibility: Option<Infeasibility>,
}

impl GpSolution {
    /// Three-qubit parameters with transverse resource components `(f1, f2)`.
    pub fn params(&self, h: f64, f1: f64, f2: f64) -> Result<ThreeQubitParams> {
        let j = match (self.feasible, self.j) {
            (true, Some(j)) => j,
            _ => {
                return Err(Error::Parameter {
                    name: "r_G",
                    value: self.r_g,
                    reason: "constraints are infeasible for this b3",
                })
            }
        };
        ThreeQubitParams::new(j, h, self.b3, [f1, f2, self.f3])
    }
}

pub fn solve_gp_constraints(b3: f64, r_g: f64) -> Result<GpSolution> {
    check_unit("b3", b3)?;
    check_unit("r_G", r_g)?;
    if b3 == 0.0 {
        return Err(Error::Parameter {
            name: "b3",
            value: b3,
            reason: "the coupling condition divides by b3",
        });
    }
    let ratio = -r_g / b3;
    let j = (ratio >= 0.0).then(|| ratio.sqrt().atan() / SQRT_2);
    let f3 = 2.0 * r_g - b3;
    let infeasibility = if b3 * r_g >= 0.0 {
        Some(Infeasibility::SignConflict)
    } else if f3.abs() > 1.0 {
        Some(Infeasibility::ResourceNormExceeded)
    } else {
        None
    };
    Ok(GpSolution {
        b3,
        r_g,
        j,
        f3,
        feasible: infeasibility.is_none(),
        infeasibility,
    })
}

/// Map of the general two-qubit U(1) unitary `build_general_u1_2q(φ0, φ1, φ2, α, θ)` with
/// environment `b` on site 1.
pub fn phi_app_d_general(phi0: f64, phi1: f64, phi2: f64, alpha: f64, theta: f64, b: &BlochVector) -> AffineMap {
    let xi = 0.5 * (2.0 * alpha - phi0 - 2.0 * phi1 + phi2);
    let psi_p = alpha - phi0 + phi1;
    let psi_m = alpha + phi1 + phi2;
    let chi = 0.5 * (phi0 + phi2);
    let (s, c) = (theta / 2.0).sin_cos();
    let (sx, cx) = xi.sin_cos();
    let [b1, b2, b3] = b.0;
    let (s2p, c2p) = (2.0 * phi1).sin_cos();

    let tau = Vector3::new(
        s * chi.sin() * (b1 * sx + b2 * cx),
        s * chi.sin() * (b2 * sx - b1 * cx),
        b3 * s * s,
    );
    let diag = 0.5 * c * ((b3 + 1.0) * psi_p.cos() - (b3 - 1.0) * psi_m.cos());
    let t12 = 0.5 * c * ((b3 - 1.0) * psi_m.sin() - (b3 + 1.0) * psi_p.sin());
    let m = Matrix3::new(
        diag,
        t12,
        s * chi.cos() * (b1 * cx - b2 * sx),
        -t12,
        diag,
        s * chi.cos() * (b1 * sx + b2 * cx),
        -0.5 * theta.sin() * (b1 * c2p + b2 * s2p),
        0.5 * theta.sin() * (b1 * s2p - b2 * c2p),
        c * c,
    );
    AffineMap::new(tau, m)
}

/// Numeric counterpart of the closed forms: extraction on the two-qubit model with
/// `ρ = ρ_S ⊗ ρ_E + χ`.
pub fn extract_two_qubit(p: &TwoQubitParams, b: &BlochVector, chi: &CorrelationMatrix, t: f64) -> Result<AffineMap> {
    let u = p.unitary(t)?;
    let env = b.density()?;
    let chi_op = chi.operator();
    let chi_arg = (linalg::max_abs(&chi_op) > 0.0).then_some(&chi_op);
    crate::affine::extract_map(&u.matrix, 2, 0, &env, chi_arg)
}

/// Numeric counterpart of [`phi_gp_3qubit`].
pub fn extract_three_qubit(p: &ThreeQubitParams, t: f64) -> Result<AffineMap> {
    p.validate()?;
    let u = p.unitary(t)?;
    crate::affine::extract_map(&u.matrix, 3, 0, &p.env_state()?, None)
}
