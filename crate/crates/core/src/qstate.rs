//! Dense state vectors, density matrices and the usual measurements on them.
//!
//! Qubits are addressed by 0-based position. Qubit 0 is the leftmost symbol of
//! a ket and the most significant bit of a basis index, so `|0;01;1⟩` on four
//! neurons is index `0b0011`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexAmplitude = Complex64;

/// Tolerance on Σ|amp|² accepted when a state vector is built from raw amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Tolerance for the Hermitian and unit-trace checks on density matrices.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Most negative eigenvalue tolerated in a density matrix.
pub const EIGENVALUE_FLOOR: f64 = -1e-9;

/// Default cap on the number of neurons (qubits) in a network.
pub const DEFAULT_MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Bit position (counted from the least significant end) that holds `qubit`.
#[inline]
pub(crate) fn bit_position(n_qubits: usize, qubit: usize) -> usize {
    n_qubits - 1 - qubit
}

/// Renders a basis index as an MSB-first bitstring of width `n_qubits`.
pub fn basis_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if index >> bit_position(n_qubits, q) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parses an MSB-first bitstring into an integer.
pub fn parse_bits(bits: &str) -> Result<usize> {
    if bits.len() > usize::BITS as usize - 1 {
        return Err(Error::argument(format!("bitstring too long: {bits:?}")));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        other => Err(Error::argument(format!(
            "bitstring {bits:?} contains {other:?}, expected only 0 and 1"
        ))),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes. The length must be a power of two
    /// and the vector must be finite and normalized within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::argument(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::argument("amplitudes must be finite"));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::argument(format!("state is not normalized: Σ|a|² = {norm}")));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(Self { n_qubits, amps })
    }

    /// The computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits >= usize::BITS as usize || index >> n_qubits != 0 {
            return Err(Error::argument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::argument(format!(
                "inner product of {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Computational-basis probabilities, indexed like the amplitudes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            Err(Error::argument(format!(
                "qubit {qubit} out of range for a {}-qubit state",
                self.n_qubits
            )))
        } else {
            Ok(())
        }
    }
}

/// `basis_state(2, "10")` is `|10⟩`, i.e. qubit 0 firing.
pub fn basis_state(n_qubits: usize, bits: &str) -> Result<StateVector> {
    if bits.chars().count() != n_qubits {
        return Err(Error::config(format!(
            "bitstring {bits:?} has length {} but the register has {n_qubits} qubits",
            bits.chars().count()
        )));
    }
    StateVector::basis(n_qubits, parse_bits(bits)?)
}

/// Kronecker product `a ⊗ b`; `a` occupies the leading (most significant) qubits.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    StateVector::from_raw(a.n_qubits + b.n_qubits, amps)
}

/// |⟨a|b⟩|², insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before accepting `entries`.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(entries)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim != entries.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::argument(format!(
                "density matrix must be square with power-of-two size, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            entries,
        })
    }

    /// |ψ⟩⟨ψ|.
    pub fn from_pure(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            n_qubits: state.n_qubits(),
            entries: &v * v.adjoint(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// Largest |ρ_ij − conj(ρ_ji)|.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order. Assumes the matrix is Hermitian.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Largest |ρ_ij − σ_ij|.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "density matrices of different size");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// trace(ρ²).
    pub fn purity(&self) -> f64 {
        // ρ Hermitian ⇒ tr(ρ²) = Σ_ij |ρ_ij|²
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > DENSITY_TOLERANCE {
            return Err(Error::argument(format!("matrix is not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > DENSITY_TOLERANCE {
            return Err(Error::argument(format!("trace is {tr}, expected 1")));
        }
        if let Some(&min) = self.eigenvalues().first() {
            if min < EIGENVALUE_FLOOR {
                return Err(Error::argument(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(())
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The matrix is split into the blocks that its nonzero pattern connects, and
/// each block is diagonalized separately. Householder tridiagonalization can
/// produce NaN on reducible input, so a block that still comes back with NaN
/// is redone with Jacobi rotations.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values = Vec::with_capacity(m.nrows());
    for block in connected_blocks(m) {
        if let [i] = block[..] {
            values.push(m[(i, i)].re);
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| m[(block[i], block[j])]);
        let eig = SymmetricEigen::new(sub.clone()).eigenvalues;
        if eig.iter().all(|v| v.is_finite()) {
            values.extend(eig.iter());
        } else {
            values.extend(jacobi_eigenvalues(sub));
        }
    }
    values.sort_by(f64::total_cmp);
    values
}

/// Index sets of the connected components of the graph with an edge wherever
/// `m[(i, j)] != 0`.
fn connected_blocks(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for i in j + 1..n {
            if m[(i, j)] != ZERO || m[(j, i)] != ZERO {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

/// Cyclic Jacobi for a Hermitian matrix.
fn jacobi_eigenvalues(mut a: DMatrix<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Phase the pair so a_pq is real, then a real rotation.
                let phase = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)] * phase.conj());
                    a[(k, p)] = akp * c - akq * s;
                    a[(k, q)] = akp * s + akq * c;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)] * phase);
                    a[(p, k)] = apk * c - aqk * s;
                    a[(q, k)] = apk * s + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
            }
        }
    }
    (0..n).map(|i| a[(i, i)].re).collect()
}

fn check_qubit_set(n_qubits: usize, qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::argument("qubit set must not be empty"));
    }
    let mut seen = 0u64;
    for &q in qubits {
        if q >= n_qubits {
            return Err(Error::argument(format!(
                "qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        if seen >> q & 1 == 1 {
            return Err(Error::argument(format!("qubit {q} listed twice")));
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// Partial trace onto `keep`. The kept qubits are ordered ascending in the
/// result regardless of the order they are listed in.
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    check_qubit_set(n, keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    let gather = |index: usize, qubits: &[usize]| {
        qubits
            .iter()
            .fold(0usize, |acc, &q| acc << 1 | (index >> bit_position(n, q) & 1))
    };

    // Reshape ψ into M[kept, traced]; ρ = M M†.
    let rows = 1 << kept.len();
    let cols = 1 << traced.len();
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (index, amp) in state.amplitudes().iter().enumerate() {
        m[(gather(index, &kept), gather(index, &traced))] = *amp;
    }
    DensityMatrix::from_matrix_unchecked(&m * m.adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// {|0⟩, |1⟩}
    Computational,
    /// {|+⟩, |−⟩}
    PlusMinus,
}

/// Outcome probabilities for one qubit. `p0` is the |0⟩ (or |+⟩) outcome.
pub fn measure_probabilities(state: &StateVector, qubit: usize, basis: Basis) -> Result<(f64, f64)> {
    state.check_qubit(qubit)?;
    let mask = 1 << bit_position(state.n_qubits(), qubit);
    let amps = state.amplitudes();
    let (mut p0, mut p1) = (0.0, 0.0);
    for i0 in (0..amps.len()).filter(|i| i & mask == 0) {
        let (a0, a1) = (amps[i0], amps[i0 | mask]);
        match basis {
            Basis::Computational => {
                p0 += a0.norm_sqr();
                p1 += a1.norm_sqr();
            }
            Basis::PlusMinus => {
                p0 += 0.5 * (a0 + a1).norm_sqr();
                p1 += 0.5 * (a0 - a1).norm_sqr();
            }
        }
    }
    Ok((p0, p1))
}

/// −Σ λ log₂ λ, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let herm = rho.hermiticity_error();
    if herm > DENSITY_TOLERANCE {
        return Err(Error::argument(format!(
            "entropy of a non-Hermitian matrix (error {herm:e})"
        )));
    }
    Ok(rho
        .eigenvalues()
        .into_iter()
        .map(|l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> StateVector {
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }

    fn bell() -> StateVector {
        StateVector::from_amplitudes(vec![
            c(FRAC_1_SQRT_2, 0.0),
            ZERO,
            ZERO,
            c(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn basis_encoding_is_msb_first() {
        assert_eq!(basis_state(2, "00").unwrap().amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(basis_state(2, "11").unwrap().amplitudes(), &[ZERO, ZERO, ZERO, ONE]);
        assert_eq!(basis_state(2, "10").unwrap().amplitude(2), ONE);
        let ket = basis_state(4, "0000").unwrap();
        assert_eq!(ket.amplitude(0), ONE);
        assert_eq!(basis_label(0b0011, 4), "0011");
    }

    #[test]
    fn basis_state_rejects_length_mismatch() {
        assert!(matches!(basis_state(3, "01"), Err(Error::Config(_))));
        assert!(matches!(basis_state(2, "0x"), Err(Error::Argument(_))));
    }

    #[test]
    fn from_amplitudes_rejects_bad_input() {
        assert!(StateVector::from_amplitudes(vec![ONE, ONE]).is_err());
        assert!(StateVector::from_amplitudes(vec![ONE, ZERO, ZERO]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(f64::NAN, 0.0), ZERO]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let zero = basis_state(1, "0").unwrap();
        let one = basis_state(1, "1").unwrap();
        assert_eq!(tensor(&zero, &one), basis_state(2, "01").unwrap());

        let s = tensor(&plus(), &zero);
        let h = c(FRAC_1_SQRT_2, 0.0);
        assert_eq!(s.amplitudes(), &[h, ZERO, h, ZERO]);
    }

    #[test]
    fn reduced_density_of_bell_pair_is_maximally_mixed() {
        let rho = reduced_density(&bell(), &[0]).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(rho.get(0, 1).norm() < 1e-15);
        rho.validate().unwrap();
    }

    #[test]
    fn reduced_density_of_product_state() {
        let rho = reduced_density(&basis_state(2, "01").unwrap(), &[1]).unwrap();
        assert_eq!(rho.get(1, 1), ONE);
        assert_eq!(rho.get(0, 0), ZERO);
    }

    #[test]
    fn reduced_density_argument_errors() {
        let s = bell();
        assert!(reduced_density(&s, &[]).is_err());
        assert!(reduced_density(&s, &[2]).is_err());
        assert!(reduced_density(&s, &[0, 0]).is_err());
    }

    #[test]
    fn measurement_in_both_bases() {
        let (p0, p1) = measure_probabilities(&plus(), 0, Basis::PlusMinus).unwrap();
        assert!((p0 - 1.0).abs() < 1e-15 && p1.abs() < 1e-15);
        let (p0, p1) = measure_probabilities(&plus(), 0, Basis::Computational).unwrap();
        assert!((p0 - 0.5).abs() < 1e-15 && (p1 - 0.5).abs() < 1e-15);
        assert!(measure_probabilities(&plus(), 1, Basis::Computational).is_err());
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::from_pure(&basis_state(1, "0").unwrap());
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);

        let mixed = DensityMatrix::from_matrix(DMatrix::from_diagonal_element(2, 2, c(0.5, 0.0))).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
        assert!((mixed.purity() - 0.5).abs() < 1e-15);
        assert!((pure.purity() - 1.0).abs() < 1e-15);

        let rho = reduced_density(&bell(), &[1]).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - 1.0).abs() < 1e-12);
    }

    /// `U diag(values) U†` with `U` a product of fixed complex rotations.
    fn with_spectrum(values: &[f64]) -> DMatrix<Complex64> {
        let n = values.len();
        let mut u = DMatrix::<Complex64>::identity(n, n);
        for k in 0..n - 1 {
            let (cs, sn) = (0.3 + 0.1 * k as f64).sin_cos();
            let mut r = DMatrix::<Complex64>::identity(n, n);
            r[(k, k)] = c(cs, 0.0);
            r[(k, k + 1)] = c(0.0, sn);
            r[(k + 1, k)] = c(0.0, sn);
            r[(k + 1, k + 1)] = c(cs, 0.0);
            u = r * u;
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, values.iter().map(|&v| c(v, 0.0))));
        &u * d * u.adjoint()
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let values = [-0.5, 0.0, 0.1, 0.25, 0.25, 2.0];
        let got = jacobi_eigenvalues(with_spectrum(&values));
        let mut got = got;
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(values) {
            assert!((a - b).abs() < 1e-13, "{got:?}");
        }
    }

    #[test]
    fn eigenvalues_of_reducible_matrices_are_finite() {
        // Two 2×2 blocks interleaved with zero rows; this pattern makes the
        // Householder route return NaN.
        let mut m = DMatrix::<Complex64>::zeros(10, 10);
        m[(0, 0)] = c(0.100, 0.0);
        m[(0, 1)] = c(-0.010, 0.108);
        m[(0, 9)] = c(-0.097, -0.289);
        m[(1, 1)] = c(0.119, 0.0);
        m[(1, 9)] = c(-0.304, 0.135);
        m[(9, 9)] = c(0.930, 0.0);
        for (i, j) in [(0, 1), (0, 9), (1, 9)] {
            m[(j, i)] = m[(i, j)].conj();
        }
        let values = hermitian_eigenvalues(&m);
        assert_eq!(values.len(), 10);
        assert!(values.iter().all(|v| v.is_finite()));
        let mut expected = jacobi_eigenvalues(m.clone());
        expected.sort_by(f64::total_cmp);
        for (a, b) in values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let trace: f64 = values.iter().sum();
        assert!((trace - 1.149).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.3, 0.0), ZERO, c(0.5, 0.0)]);
        let rho = DensityMatrix::from_matrix_unchecked(m).unwrap();
        assert!(matches!(von_neumann_entropy(&rho), Err(Error::Argument(_))));
        assert!(rho.validate().is_err());
    }
}
