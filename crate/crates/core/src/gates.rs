//! Single-qubit gates from the four-angle U(2) parametrization, plus the fixed
//! gates the networks use.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{bit_position, ComplexAmplitude, StateVector};

/// The angle tuple `(φ0, φ1, φ2, φ3)` selecting one element of U(2).
///
/// Angles outside `[0, 2π]` are reduced modulo 2π on construction; `2π`
/// itself is kept, since `φ3 = 2π` and `φ3 = 0` give different gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    angles: [f64; 4],
}

fn reduce_angle(x: f64) -> f64 {
    if (0.0..=TAU).contains(&x) {
        x
    } else {
        x.rem_euclid(TAU)
    }
}

impl GateParams {
    /// `(0, 0, 0, 0)`, the identity gate.
    pub const IDENTITY: GateParams = GateParams {
        angles: [0.0, 0.0, 0.0, 0.0],
    };

    /// `(π/2, 0, 3π/2, 2π)`, which evaluates to the NOT gate.
    pub const NOT: GateParams = GateParams {
        angles: [FRAC_PI_2, 0.0, 3.0 * FRAC_PI_2, TAU],
    };

    /// `(π/2, 3π/2, 3π/2, π)`, which evaluates to the Hadamard gate.
    pub const HADAMARD: GateParams = GateParams {
        angles: [FRAC_PI_2, 3.0 * FRAC_PI_2, 3.0 * FRAC_PI_2, PI],
    };

    pub fn new(phi0: f64, phi1: f64, phi2: f64, phi3: f64) -> Result<Self> {
        Self::from_array([phi0, phi1, phi2, phi3])
    }

    pub fn from_array(angles: [f64; 4]) -> Result<Self> {
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::argument(format!("gate angle {bad} is not finite")));
        }
        Ok(Self {
            angles: angles.map(reduce_angle),
        })
    }

    pub fn angles(&self) -> [f64; 4] {
        self.angles
    }

    pub fn phi0(&self) -> f64 {
        self.angles[0]
    }
    pub fn phi1(&self) -> f64 {
        self.angles[1]
    }
    pub fn phi2(&self) -> f64 {
        self.angles[2]
    }
    pub fn phi3(&self) -> f64 {
        self.angles[3]
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    /// Wraps a matrix without checking unitarity; see [`Unitary2::unitarity_error`].
    pub const fn from_rows(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn rows(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &Unitary2) -> Self {
        let (a, b) = (self.m, rhs.m);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m: out }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Frobenius norm of `U†U − I`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().compose(self);
        let mut sum = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                sum += (p.m[i][j] - id).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Largest entrywise distance to `other`.
    pub fn max_deviation(&self, other: &Unitary2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    #[inline]
    fn apply_pair(&self, a0: Complex64, a1: Complex64) -> (Complex64, Complex64) {
        (
            self.m[0][0] * a0 + self.m[0][1] * a1,
            self.m[1][0] * a0 + self.m[1][1] * a1,
        )
    }
}

/// The four-angle U(2) matrix
///
/// ```text
/// e^{iφ0} [  e^{iφ1} cos(φ3/4)   e^{iφ2} sin(φ3/4) ]
///         [ -e^{-iφ2} sin(φ3/4)  e^{-iφ1} cos(φ3/4) ]
/// ```
pub fn u2_from_params(phi: &GateParams) -> Unitary2 {
    let [p0, p1, p2, p3] = phi.angles;
    let (s, c) = (p3 / 4.0).sin_cos();
    Unitary2 {
        m: [
            [Complex64::from_polar(c, p0 + p1), Complex64::from_polar(s, p0 + p2)],
            [-Complex64::from_polar(s, p0 - p2), Complex64::from_polar(c, p0 - p1)],
        ],
    }
}

/// `(ψ_φ(0), ψ_φ(1))`, the image of `|0⟩` under [`u2_from_params`].
pub fn psi_amplitudes(phi: &GateParams) -> (ComplexAmplitude, ComplexAmplitude) {
    let u = u2_from_params(phi);
    (u.m[0][0], u.m[1][0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixedGate {
    Identity,
    Not,
    Hadamard,
}

impl FixedGate {
    pub fn name(self) -> &'static str {
        match self {
            FixedGate::Identity => "identity",
            FixedGate::Not => "not",
            FixedGate::Hadamard => "hadamard",
        }
    }
}

impl std::str::FromStr for FixedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" | "id" | "i" => Ok(FixedGate::Identity),
            "not" | "x" => Ok(FixedGate::Not),
            "hadamard" | "h" => Ok(FixedGate::Hadamard),
            other => Err(Error::argument(format!("unknown gate name {other:?}"))),
        }
    }
}

pub fn fixed_gate(gate: FixedGate) -> Unitary2 {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let m = match gate {
        FixedGate::Identity => [[o, z], [z, o]],
        FixedGate::Not => [[z, o], [o, z]],
        FixedGate::Hadamard => [[h, h], [h, -h]],
    };
    Unitary2 { m }
}

pub(crate) fn apply_single_in_place(amps: &mut [Complex64], n_qubits: usize, gate: &Unitary2, target: usize) {
    let mask = 1usize << bit_position(n_qubits, target);
    for i0 in 0..amps.len() {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        let (b0, b1) = gate.apply_pair(amps[i0], amps[i1]);
        amps[i0] = b0;
        amps[i1] = b1;
    }
}

/// Applies `gate` to qubit `target` (identity elsewhere).
pub fn apply_single(state: &StateVector, gate: &Unitary2, target: usize) -> Result<StateVector> {
    state.check_qubit(target)?;
    let mut out = state.clone();
    apply_single_in_place(out.amplitudes_mut(), state.n_qubits(), gate, target);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::basis_state;

    const EXACT: f64 = 1e-15;

    #[test]
    fn zero_angles_give_identity() {
        let u = u2_from_params(&GateParams::IDENTITY);
        assert!(u.max_deviation(&fixed_gate(FixedGate::Identity)) < EXACT);
    }

    #[test]
    fn derived_not_and_hadamard_params() {
        let not = u2_from_params(&GateParams::NOT);
        assert!(not.max_deviation(&fixed_gate(FixedGate::Not)) < 1e-15, "{not:?}");
        let had = u2_from_params(&GateParams::HADAMARD);
        assert!(had.max_deviation(&fixed_gate(FixedGate::Hadamard)) < 1e-15, "{had:?}");
    }

    #[test]
    fn psi_amplitude_examples() {
        let (a, b) = psi_amplitudes(&GateParams::IDENTITY);
        assert_eq!((a, b), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));

        let (a, b) = psi_amplitudes(&GateParams::new(0.0, 0.0, 0.0, TAU).unwrap());
        assert!(a.norm() < EXACT);
        assert!((b - Complex64::new(-1.0, 0.0)).norm() < EXACT);

        let (a, b) = psi_amplitudes(&GateParams::new(0.0, 0.0, 0.0, PI).unwrap());
        assert!((a - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < EXACT);
        assert!((b - Complex64::new(-FRAC_1_SQRT_2, 0.0)).norm() < EXACT);
    }

    #[test]
    fn angle_reduction_keeps_two_pi() {
        let p = GateParams::new(-FRAC_PI_2, 3.0 * TAU, TAU, TAU).unwrap();
        assert!((p.phi0() - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert!(p.phi1().abs() < 1e-12);
        assert_eq!(p.phi2(), TAU);
        assert_eq!(p.phi3(), TAU);
        assert!(GateParams::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn fixed_gates() {
        let not = fixed_gate(FixedGate::Not);
        assert_eq!(not.entry(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(not.entry(0, 0), Complex64::new(0.0, 0.0));

        let zero = basis_state(1, "0").unwrap();
        let plus = apply_single(&zero, &fixed_gate(FixedGate::Hadamard), 0).unwrap();
        for a in plus.amplitudes() {
            assert!((a - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < EXACT);
        }
        assert_eq!("Hadamard".parse::<FixedGate>().unwrap(), FixedGate::Hadamard);
        assert!("cz".parse::<FixedGate>().is_err());
    }

    #[test]
    fn apply_single_targets_the_leading_qubit() {
        let s = apply_single(&basis_state(2, "00").unwrap(), &fixed_gate(FixedGate::Not), 0).unwrap();
        assert_eq!(s, basis_state(2, "10").unwrap());

        let phi = GateParams::new(0.3, 1.1, 2.0, 4.0).unwrap();
        let (p0, p1) = psi_amplitudes(&phi);
        let s = apply_single(&basis_state(2, "00").unwrap(), &u2_from_params(&phi), 0).unwrap();
        assert!((s.amplitude(0b00) - p0).norm() < EXACT);
        assert!((s.amplitude(0b10) - p1).norm() < EXACT);
        assert_eq!(s.amplitude(0b01), Complex64::new(0.0, 0.0));

        assert!(apply_single(&s, &fixed_gate(FixedGate::Not), 2).is_err());
    }

    #[test]
    fn hadamard_is_an_involution() {
        let h = fixed_gate(FixedGate::Hadamard);
        let phi = GateParams::new(1.0, 2.0, 3.0, 5.0).unwrap();
        let s = apply_single(&basis_state(2, "01").unwrap(), &u2_from_params(&phi), 0).unwrap();
        let back = apply_single(&apply_single(&s, &h, 1).unwrap(), &h, 1).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
