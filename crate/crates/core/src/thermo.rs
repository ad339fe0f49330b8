//! Relative entropy to the Gibbs state, l1 coherence, trajectories and convergence counts.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::affine::{iterate, AffineMap};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::state::{bloch_operator, gibbs_bloch, BlochVector};

/// Eigenvalues below this count as zero when deciding supports.
const SUPPORT_FLOOR: f64 = 1e-14;

/// `D(ρ‖σ)` in nats; infinite when the support of `ρ` is not contained in that of `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn value(self) -> f64 {
        match self {
            RelativeEntropy::Finite(v) => v,
            RelativeEntropy::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RelativeEntropy::Finite(_))
    }
}

impl fmt::Display for RelativeEntropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelativeEntropy::Finite(v) => write!(f, "{v}"),
            RelativeEntropy::Infinite => f.write_str("inf"),
        }
    }
}

/// `Tr ρ (ln ρ - ln σ)` from the two eigendecompositions, with `0 ln 0 = 0`.
pub fn relative_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<RelativeEntropy> {
    if rho.shape() != sigma.shape() {
        return Err(Error::Dimension("relative entropy of differently sized states".into()));
    }
    linalg::validate_density(rho)?;
    linalg::validate_density(sigma)?;
    let (p, u) = linalg::eigh(rho)?;
    let (q, v) = linalg::eigh(sigma)?;
    // overlap[(i, j)] = |<u_i|v_j>|^2
    let overlap = (u.adjoint() * v).map(|z| z.norm_sqr());

    let mut d = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= SUPPORT_FLOOR {
            continue;
        }
        d += pi * pi.ln();
        for (j, &qj) in q.iter().enumerate() {
            let w = overlap[(i, j)];
            if w <= SUPPORT_FLOOR {
                continue;
            }
            if qj <= SUPPORT_FLOOR {
                return Ok(RelativeEntropy::Infinite);
            }
            d -= pi * w * qj.ln();
        }
    }
    Ok(RelativeEntropy::Finite(d.max(0.0)))
}

/// `D(Φ[ρ(a0)] ‖ ρ_G)` with `ρ_G` the Bloch vector `(0, 0, r_G)`. Infinite values come back as
/// `f64::INFINITY`.
pub fn delta_d(m: &AffineMap, a0: &BlochVector, r_g: f64) -> Result<f64> {
    a0.check()?;
    let gibbs = gibbs_bloch(r_g)?;
    let out = m.apply(a0);
    Ok(relative_entropy(&out.density()?, &gibbs.density()?)?.value())
}

/// `|ρ01| + |ρ10| = sqrt(a1² + a2²)`.
pub fn l1_coherence(a: &BlochVector) -> f64 {
    a.x().hypot(a.y())
}

/// l1 coherence of `a0, m(a0), ..., m^n(a0)`.
pub fn coherence_trajectory(m: &AffineMap, a0: &BlochVector, n: usize) -> Vec<f64> {
    iterate(m, a0, n).iter().map(l1_coherence).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergence {
    pub steps: usize,
    pub converged: bool,
}

/// Smallest `n ≥ 1` with `‖ρ_{n+1} - ρ_n‖_1 < eps`, where `ρ_0 = ρ(a0)`; `n_max` flagged as not
/// converged otherwise.
pub fn convergence_steps(m: &AffineMap, a0: &BlochVector, eps: f64, n_max: usize) -> Result<Convergence> {
    if !(eps > 0.0) {
        return Err(Error::Parameter {
            name: "epsilon",
            value: eps,
            reason: "must be positive",
        });
    }
    if n_max < 1 {
        return Err(Error::Parameter {
            name: "n_max",
            value: n_max as f64,
            reason: "must be at least 1",
        });
    }
    let mut current = m.apply(a0);
    for n in 1..=n_max {
        let next = m.apply(&current);
        let diff = bloch_operator(&next) - bloch_operator(&current);
        if linalg::trace_norm(&diff)? < eps {
            return Ok(Convergence {
                steps: n,
                converged: true,
            });
        }
        current = next;
    }
    Ok(Convergence {
        steps: n_max,
        converged: false,
    })
}

/// Repeated application of a labelled map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<BlochVector>,
    pub map_label: String,
    pub params: BTreeMap<String, f64>,
}

impl Trajectory {
    pub fn generate(
        m: &AffineMap,
        a0: &BlochVector,
        n: usize,
        map_label: impl Into<String>,
        params: BTreeMap<String, f64>,
    ) -> Self {
        Self {
            states: iterate(m, a0, n),
            map_label: map_label.into(),
            params,
        }
    }

    pub fn coherences(&self) -> Vec<f64> {
        self.states.iter().map(l1_coherence).collect()
    }

    /// `step,a1,a2,a3,l1_coherence` rows, no header.
    pub fn csv_rows(&self) -> Vec<String> {
        self.states
            .iter()
            .enumerate()
            .map(|(k, a)| {
                format!(
                    "{k},{:.16e},{:.16e},{:.16e},{:.16e}",
                    a.x(),
                    a.y(),
                    a.z(),
                    l1_coherence(a)
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::phi_pc;
    use nalgebra::{Matrix3, Vector3};
    use std::f64::consts::LN_2;

    fn dm(a: [f64; 3]) -> ComplexMatrix {
        BlochVector(a).density().unwrap()
    }

    /// Both states diagonal: classical KL divergence of `((1±r)/2)`.
    fn diagonal_kl(r: f64, s: f64) -> f64 {
        let (p, q) = ([(1.0 + r) / 2.0, (1.0 - r) / 2.0], [(1.0 + s) / 2.0, (1.0 - s) / 2.0]);
        (0..2).map(|i| p[i] * (p[i] / q[i]).ln()).sum()
    }

    #[test]
    fn relative_entropy_basics() {
        let rho = dm([0.1, -0.2, 0.3]);
        assert!(relative_entropy(&rho, &rho).unwrap().value().abs() < 1e-12);
        let d = relative_entropy(&dm([0.0, 0.0, 1.0]), &dm([0.0; 3])).unwrap();
        assert!((d.value() - LN_2).abs() < 1e-14);
        let d = relative_entropy(&dm([0.0, 0.0, 0.5]), &dm([0.0, 0.0, 0.45])).unwrap();
        assert!((d.value() - diagonal_kl(0.5, 0.45)).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_support() {
        let d = relative_entropy(&dm([0.0, 0.0, 0.5]), &dm([0.0, 0.0, 1.0])).unwrap();
        assert_eq!(d, RelativeEntropy::Infinite);
        let d = relative_entropy(&dm([0.0, 0.0, 1.0]), &dm([0.0, 0.0, 1.0])).unwrap();
        assert!(d.value().abs() < 1e-14);
        // pure state against a pure state it overlaps with
        let d = relative_entropy(&dm([1.0, 0.0, 0.0]), &dm([0.0, 0.0, 1.0])).unwrap();
        assert_eq!(d, RelativeEntropy::Infinite);
        assert!(relative_entropy(&linalg::identity(2), &dm([0.0; 3])).is_err());
    }

    #[test]
    fn delta_d_at_fixed_point() {
        let m = phi_pc(0.5, 0.3, 0.4, 1.0);
        assert!(delta_d(&m, &BlochVector::new(0.0, 0.0, 0.4), 0.4).unwrap() < 1e-12);
        assert!(delta_d(&AffineMap::identity(), &BlochVector::new(0.0, 0.0, -0.3), -0.3).unwrap() < 1e-12);
        assert!(delta_d(&m, &BlochVector::new(0.0, 0.0, -0.9), 0.4).unwrap() > 0.0);
        assert!(delta_d(&m, &BlochVector::new(0.0, 0.0, 0.1), 1.5).is_err());
    }

    #[test]
    fn coherence() {
        assert_eq!(l1_coherence(&BlochVector::new(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(l1_coherence(&BlochVector::new(0.0, 0.0, 1.0)), 0.0);
        let m = phi_pc(0.5, 0.3, 0.4, 1.0);
        let after = l1_coherence(&m.apply(&BlochVector::new(1.0, 0.0, 0.0)));
        assert!((after - 0.5f64.cos().abs()).abs() < 1e-15);
        assert!(coherence_trajectory(&m, &BlochVector::new(0.0, 0.0, 1.0), 10)
            .iter()
            .all(|&c| c == 0.0));
        assert_eq!(
            coherence_trajectory(&AffineMap::identity(), &BlochVector::new(1.0, 0.0, 0.0), 4),
            vec![1.0; 5]
        );
    }

    #[test]
    fn convergence_rules() {
        let a0 = BlochVector::new(0.3, 0.0, 0.2);
        let id = convergence_steps(&AffineMap::identity(), &a0, 1e-8, 50).unwrap();
        assert_eq!(
            id,
            Convergence {
                steps: 1,
                converged: true
            }
        );

        let target = AffineMap::new(Vector3::new(0.0, 0.0, 0.4), Matrix3::zeros());
        let c = convergence_steps(&target, &a0, 1e-8, 50).unwrap();
        assert_eq!(
            c,
            Convergence {
                steps: 1,
                converged: true
            }
        );

        let slow = phi_pc(0.1, 0.0, 0.4, 1.0);
        let c = convergence_steps(&slow, &a0, 1e-8, 5).unwrap();
        assert_eq!(
            c,
            Convergence {
                steps: 5,
                converged: false
            }
        );

        let m = phi_pc(0.7, 0.2, 0.4, 1.0);
        let loose = convergence_steps(&m, &a0, 1e-4, 500).unwrap();
        let tight = convergence_steps(&m, &a0, 1e-10, 500).unwrap();
        assert!(loose.steps <= tight.steps);
        assert!(convergence_steps(&m, &a0, 0.0, 5).is_err());
        assert!(convergence_steps(&m, &a0, 1e-3, 0).is_err());
    }

    #[test]
    fn trajectory_rows() {
        let m = phi_pc(0.7, 0.2, 0.4, 1.0);
        let traj = Trajectory::generate(&m, &BlochVector::new(1.0, 0.0, 0.0), 3, "pc", BTreeMap::new());
        assert_eq!(traj.states.len(), 4);
        assert_eq!(traj.csv_rows().len(), 4);
        assert!(traj.csv_rows()[0].starts_with("0,1.0000000000000000e0,"));
        for k in 0..3 {
            assert_eq!(traj.states[k + 1], m.apply(&traj.states[k]));
        }
    }
}
