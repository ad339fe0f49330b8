//! Pauli strings, the charge `(-1)^(n_x + n_y)`, and decompositions in the `4^n` string basis.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        ComplexMatrix::from_row_slice(2, 2, &entries)
    }

    /// Flips the computational basis state (X and Y do).
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn charge(self) -> i8 {
        if self.flips() {
            -1
        } else {
            1
        }
    }

    /// Matrix element `⟨row| P |row ⊕ flips⟩`.
    fn element(self, row_bit: usize) -> Complex64 {
        match (self, row_bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, 0) => c(1.0, 0.0),
            (Pauli::Z, _) => c(-1.0, 0.0),
            (Pauli::Y, 0) => c(0.0, -1.0),
            (Pauli::Y, _) => c(0.0, 1.0),
        }
    }

    /// Single-site product `self * other = phase * result`.
    pub fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        let i = c(0.0, 1.0);
        match (self, other) {
            (I, p) | (p, I) => (c(1.0, 0.0), p),
            (a, b) if a == b => (c(1.0, 0.0), I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
            _ => unreachable!(),
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(ch: char) -> Result<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::PauliLabel(ch)),
        }
    }
}

/// Tensor product of single-site Paulis, site 0 leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Dimension("Pauli string needs at least one site".into()));
        }
        Ok(Self(ops))
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n.max(1)])
    }

    /// `op` on `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, op: Pauli) -> Self {
        let mut ops = vec![Pauli::I; n.max(1)];
        ops[site] = op;
        Self(ops)
    }

    /// String number `index` in base-4 order (I, X, Y, Z per site, site 0 most significant).
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut ops = vec![Pauli::I; n];
        for op in ops.iter_mut().rev() {
            *op = Pauli::ALL[index % 4];
            index /= 4;
        }
        Self(ops)
    }

    /// All `4^n` strings in base-4 order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |k| Self::from_index(n, k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// `(-1)^(n_x + n_y)`.
    pub fn charge(&self) -> i8 {
        if self.0.iter().filter(|p| p.flips()).count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn flip_mask(&self) -> usize {
        let n = self.0.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0usize, |m, (q, _)| m | 1 << (n - 1 - q))
    }

    /// Nonzero element of row `row`: `(column, value)`.
    fn row_entry(&self, row: usize) -> (usize, Complex64) {
        let n = self.0.len();
        let value = self
            .0
            .iter()
            .enumerate()
            .fold(c(1.0, 0.0), |acc, (q, p)| acc * p.element(linalg::bit(row, q, n)));
        (row ^ self.flip_mask(), value)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.0.len();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for row in 0..dim {
            let (col, v) = self.row_entry(row);
            m[(row, col)] = v;
        }
        m
    }

    /// `Tr(O M)` without materializing `O`.
    pub fn trace_product(&self, m: &ComplexMatrix) -> Complex64 {
        let dim = 1usize << self.0.len();
        (0..dim)
            .map(|row| {
                let (col, v) = self.row_entry(row);
                v * m[(col, row)]
            })
            .sum()
    }

    /// Site-wise product `self * other = phase * string`.
    pub fn mul(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "cannot multiply strings of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        let mut phase = c(1.0, 0.0);
        let ops = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| {
                let (p, r) = a.mul(b);
                phase *= p;
                r
            })
            .collect();
        Ok((phase, PauliString(ops)))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.label()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s.chars().map(Pauli::try_from).collect::<Result<Vec<_>>>()?;
        PauliString::new(ops)
    }
}

/// `(-1)^(n_x + n_y)` of a string.
pub fn charge(s: &PauliString) -> i8 {
    s.charge()
}

/// Sparse expansion `M = Σ α_k O_k`, coefficients with `|α| <= 1e-12` dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

/// JSON record of one term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTermRecord {
    pub string: String,
    pub re: f64,
    pub im: f64,
}

impl PauliDecomposition {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &BTreeMap<PauliString, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        self.terms
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (s, a)| acc + s.matrix() * *a)
    }

    pub fn records(&self) -> Vec<PauliTermRecord> {
        self.terms
            .iter()
            .map(|(s, a)| PauliTermRecord {
                string: s.to_string(),
                re: a.re,
                im: a.im,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.records()).expect("records serialize")
    }

    pub fn from_records(records: &[PauliTermRecord]) -> Result<Self> {
        let mut terms = BTreeMap::new();
        let mut n_qubits = None;
        for r in records {
            let s: PauliString = r.string.parse()?;
            match n_qubits {
                None => n_qubits = Some(s.len()),
                Some(n) if n != s.len() => return Err(Error::Dimension("mixed string lengths in records".into())),
                _ => {}
            }
            terms.insert(s, c(r.re, r.im));
        }
        Ok(Self {
            n_qubits: n_qubits.unwrap_or(1),
            terms,
        })
    }
}

/// Every coefficient `Tr(O_k M)/2^n` in base-4 order, including zeros.
pub fn coefficients(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = linalg::qubit_count(m)?;
    if n == 0 {
        return Err(Error::Dimension("1x1 matrix has no qubits".into()));
    }
    let norm = 1.0 / (1usize << n) as f64;
    Ok(PauliString::all(n).map(|s| s.trace_product(m) * norm).collect())
}

pub fn decompose(m: &ComplexMatrix) -> Result<PauliDecomposition> {
    let n = linalg::qubit_count(m)?;
    let coeffs = coefficients(m)?;
    let terms = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > tolerance::ZERO)
        .map(|(k, a)| (PauliString::from_index(n, k), a))
        .collect();
    Ok(PauliDecomposition { n_qubits: n, terms })
}

/// Decomposition of `U s U†`.
pub fn conjugate_decompose(u: &ComplexMatrix, s: &PauliString) -> Result<PauliDecomposition> {
    let n = linalg::qubit_count(u)?;
    if n != s.len() {
        return Err(Error::Dimension(format!(
            "unitary acts on {n} qubits, string has {} sites",
            s.len()
        )));
    }
    decompose(&(u * s.matrix() * u.adjoint()))
}

/// Number of strings with an even count of X/Y factors: `2^n Σ_j C(n, 2j) = 2^(2n-1)`.
pub fn count_charge_conserving_strings(n: usize) -> Result<u64> {
    if n < 1 {
        return Err(Error::QubitCount { n, min: 1, max: 31 });
    }
    if n > 31 {
        return Err(Error::QubitCount { n, min: 1, max: 31 });
    }
    let even_subsets: u64 = (0..=n / 2).map(|j| binomial(n, 2 * j)).sum();
    Ok((1u64 << n) * even_subsets)
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, max_abs};

    fn s(text: &str) -> PauliString {
        text.parse().unwrap()
    }

    #[test]
    fn charges() {
        assert_eq!(charge(&s("XII")), -1);
        assert_eq!(charge(&s("ZZ")), 1);
        assert_eq!(charge(&s("XY")), 1);
        assert_eq!(charge(&s("IYZ")), -1);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(s("xIz").to_string(), "XIZ");
        assert!(matches!("XA".parse::<PauliString>(), Err(Error::PauliLabel('A'))));
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn string_matrix_matches_kron() {
        for text in ["XYZ", "IZY", "YYX"] {
            let st = s(text);
            let expected = linalg::kron_all(&st.ops().iter().map(|p| p.matrix()).collect::<Vec<_>>());
            assert!(max_abs(&(st.matrix() - expected)) == 0.0, "{text}");
        }
    }

    #[test]
    fn decompose_single_qubit_basics() {
        let half = decompose(&linalg::identity(2).scale(0.5)).unwrap();
        assert_eq!(half.len(), 1);
        assert_eq!(half.coefficient(&s("I")), c(0.5, 0.0));
        let x = decompose(&Pauli::X.matrix()).unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(x.coefficient(&s("X")), c(1.0, 0.0));
    }

    #[test]
    fn decompose_rejects_odd_dimensions() {
        assert!(decompose(&linalg::identity(3)).is_err());
        assert!(decompose(&ComplexMatrix::zeros(2, 4)).is_err());
    }

    #[test]
    fn conjugation_by_identity_and_commuting_unitary() {
        let zi = s("ZI");
        let d = conjugate_decompose(&linalg::identity(4), &zi).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.coefficient(&zi) - c(1.0, 0.0)).norm() < 1e-15);

        let zz = kron(&Pauli::Z.matrix(), &Pauli::Z.matrix());
        let u = linalg::expm_hermitian(&zz, 1.0).unwrap();
        let d = conjugate_decompose(&u, &zi).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.coefficient(&zi) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn xx_conjugation_preserves_charge() {
        let h = kron(&Pauli::X.matrix(), &Pauli::X.matrix()) + kron(&Pauli::Y.matrix(), &Pauli::Y.matrix());
        let u = linalg::expm_hermitian(&h, 0.7).unwrap();
        let d = conjugate_decompose(&u, &s("ZI")).unwrap();
        assert!(d.len() > 1);
        assert!(d.terms().keys().all(|k| k.charge() == 1));
        // XY and YX appear with the ZI/IZ populations
        assert!(d.coefficient(&s("XY")).norm() > 1e-3);
    }

    #[test]
    fn charge_conserving_counts() {
        for n in 1..=4 {
            let enumerated = PauliString::all(n).filter(|p| p.charge() == 1).count() as u64;
            let counted = count_charge_conserving_strings(n).unwrap();
            assert_eq!(enumerated, counted);
            assert_eq!(counted, 1u64 << (2 * n - 1));
            assert_eq!(2 * counted, 1u64 << (2 * n));
        }
        assert_eq!(count_charge_conserving_strings(1).unwrap(), 2);
        assert_eq!(count_charge_conserving_strings(2).unwrap(), 8);
        assert!(count_charge_conserving_strings(0).is_err());
    }

    #[test]
    fn json_records() {
        let d = decompose(&(Pauli::X.matrix() + Pauli::Z.matrix().scale(0.5))).unwrap();
        let json = d.to_json();
        assert_eq!(
            json,
            r#"[{"string":"X","re":1.0,"im":0.0},{"string":"Z","re":0.5,"im":0.0}]"#
        );
        let back: Vec<PauliTermRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(PauliDecomposition::from_records(&back).unwrap(), d);
    }

    #[test]
    fn single_site_products() {
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let (phase, r) = a.mul(b);
                let lhs = a.matrix() * b.matrix();
                assert!(max_abs(&(lhs - r.matrix() * phase)) < 1e-15, "{a:?}{b:?}");
            }
        }
    }
}
