//! Brute-force reference implementation used as the oracle in integration tests.
//!
//! Everything here is written directly from the definitions with nalgebra primitives
//! (Kronecker products, the Padé matrix exponential, index loops for partial traces) and
//! shares no code with the library beyond the result types.

#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use qdynmaps::AffineMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn id2() -> M {
    M::identity(2, 2)
}

pub fn sx() -> M {
    M::from_row_slice(2, 2, &[cx(0., 0.), cx(1., 0.), cx(1., 0.), cx(0., 0.)])
}

pub fn sy() -> M {
    M::from_row_slice(2, 2, &[cx(0., 0.), cx(0., -1.), cx(0., 1.), cx(0., 0.)])
}

pub fn sz() -> M {
    M::from_row_slice(2, 2, &[cx(1., 0.), cx(0., 0.), cx(0., 0.), cx(-1., 0.)])
}

pub fn paulis() -> [M; 3] {
    [sx(), sy(), sz()]
}

pub fn kr(ms: &[M]) -> M {
    ms.iter().fold(M::identity(1, 1), |acc, m| acc.kronecker(m))
}

/// `exp(-i H t)` by nalgebra's Padé approximant.
pub fn evolve(h: &M, t: f64) -> M {
    (h * cx(0.0, -t)).exp()
}

pub fn dm(a: [f64; 3]) -> M {
    let p = paulis();
    (id2() + &p[0] * cx(a[0], 0.) + &p[1] * cx(a[1], 0.) + &p[2] * cx(a[2], 0.)) * cx(0.5, 0.)
}

/// `(1/4) Σ c_ij σ_i ⊗ σ_j`, `c` row-major with the system index first.
pub fn chi_op(c: [[f64; 3]; 3]) -> M {
    let p = paulis();
    let mut out = M::zeros(4, 4);
    for i in 0..3 {
        for j in 0..3 {
            out += kr(&[p[i].clone(), p[j].clone()]) * cx(0.25 * c[i][j], 0.);
        }
    }
    out
}

/// Reduced state of the first qubit of an `n`-qubit operator.
pub fn keep_first(rho: &M, n: usize) -> M {
    let d = 1usize << (n - 1);
    let mut out = M::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..d {
                out[(i, j)] += rho[(i * d + k, j * d + k)];
            }
        }
    }
    out
}

pub fn bloch(r: &M) -> Vector3<f64> {
    let p = paulis();
    Vector3::from_fn(|k, _| (r * &p[k]).trace().re)
}

/// System on qubit 0, `env` on the rest, optional full-register correlation operator.
pub fn extract(u: &M, n: usize, env: &M, chi: Option<&M>) -> AffineMap {
    let out = |a: [f64; 3]| {
        let mut rho = kr(&[dm(a), env.clone()]);
        if let Some(c) = chi {
            rho += c;
        }
        bloch(&keep_first(&(u * rho * u.adjoint()), n))
    };
    let tau = out([0.0; 3]);
    let mut t = Matrix3::zeros();
    for j in 0..3 {
        let mut e = [0.0; 3];
        e[j] = 1.0;
        t.set_column(j, &(out(e) - tau));
    }
    AffineMap::new(tau, t)
}

/// `h1 σz⊗1 + h2 1⊗σz + (J/2)(XX + YY)`.
pub fn h_two(h1: f64, h2: f64, j: f64) -> M {
    kr(&[sz(), id2()]) * cx(h1, 0.)
        + kr(&[id2(), sz()]) * cx(h2, 0.)
        + (kr(&[sx(), sx()]) + kr(&[sy(), sy()])) * cx(j / 2.0, 0.)
}

/// `J Σ_{SE, SR} (XX + YY) + h Σ σz` with sites (S, E, R).
pub fn h_three(h: f64, j: f64) -> M {
    let i = id2();
    let hop = |a: usize, b: usize| {
        let mut total = M::zeros(8, 8);
        for p in [sx(), sy()] {
            let mut f = vec![i.clone(), i.clone(), i.clone()];
            f[a] = p.clone();
            f[b] = p;
            total += kr(&f);
        }
        total
    };
    let z = kr(&[sz(), i.clone(), i.clone()]) + kr(&[i.clone(), sz(), i.clone()]) + kr(&[i.clone(), i.clone(), sz()]);
    (hop(0, 1) + hop(0, 2)) * cx(j, 0.) + z * cx(h, 0.)
}

pub fn two_qubit_oracle(j: f64, h1: f64, h2: f64, b: [f64; 3], c: [[f64; 3]; 3], t: f64) -> AffineMap {
    let u = evolve(&h_two(h1, h2, j), t);
    extract(&u, 2, &dm(b), Some(&chi_op(c)))
}

pub fn three_qubit_oracle(j: f64, h: f64, b3: f64, f: [f64; 3], t: f64) -> AffineMap {
    let u = evolve(&h_three(h, j), t);
    extract(&u, 3, &kr(&[dm([0.0, 0.0, b3]), dm(f)]), None)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Random Bloch vector with norm at most `r_max`.
pub fn ball(rng: &mut ChaCha8Rng, r_max: f64) -> [f64; 3] {
    loop {
        let v = [uniform(rng, -1., 1.), uniform(rng, -1., 1.), uniform(rng, -1., 1.)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n <= 1.0 {
            return v.map(|x| x * r_max);
        }
    }
}

pub fn aug_rows(m: &AffineMap) -> [[f64; 4]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| if j == 0 { m.tau[i] } else { m.t[(i, j - 1)] }))
}

pub fn max_diff(a: &AffineMap, b: &AffineMap) -> f64 {
    a.max_abs_diff(b)
}
