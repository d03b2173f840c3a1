//! Scenario reports that reproduce the network results: the unary truth tables
//! and output kets, the XOR readout neuron, the Hadamard variant, and the
//! complementarity network. Every report is a flat list of numeric assertions.

use std::io;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::BooleanFunction;
use crate::environment::{averaged_density, packet_probability, purity, ModeIndex, WavePacket};
use crate::error::Result;
use crate::gates::{psi_amplitudes, GateParams};
use crate::network::{
    boolean_network_for, builtin, pattern_probability, run_history, verify_truth_table, NetworkSpec,
};
use crate::qstate::{fidelity, reduced_density, von_neumann_entropy, StateVector};
use crate::quadrature::QuadratureGrid;

/// Amplitude agreement required for closed-form output kets.
pub const KET_TOLERANCE: f64 = 1e-12;
/// Probability and fidelity tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;
/// Agreement between the grid average and a 1-D reference integral.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
pub const TRACE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub description: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub records: Vec<Assertion>,
}

impl ScenarioReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            records: Vec::new(),
        }
    }

    /// Records `|expected − observed| ≤ tolerance`.
    pub fn check(&mut self, description: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> bool {
        let pass = (expected - observed).abs() <= tolerance;
        self.records.push(Assertion {
            description: description.into(),
            expected,
            observed,
            tolerance,
            pass,
        });
        pass
    }

    /// Real and imaginary parts as two records.
    pub fn check_complex(&mut self, description: &str, expected: Complex64, observed: Complex64, tolerance: f64) {
        self.check(format!("{description} (re)"), expected.re, observed.re, tolerance);
        self.check(format!("{description} (im)"), expected.im, observed.im, tolerance);
    }

    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.records.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn extend(&mut self, other: ScenarioReport) {
        self.records.extend(other.records);
    }

    pub const CSV_HEADER: [&'static str; 6] = ["scenario", "assertion", "expected", "observed", "tolerance", "pass"];

    /// Writes one CSV row per assertion, without the header.
    pub fn write_csv_rows<W: io::Write>(&self, writer: &mut csv::Writer<W>) -> csv::Result<()> {
        for r in &self.records {
            writer.write_record([
                self.scenario.as_str(),
                r.description.as_str(),
                &r.expected.to_string(),
                &r.observed.to_string(),
                &r.tolerance.to_string(),
                if r.pass { "true" } else { "false" },
            ])?;
        }
        Ok(())
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(Self::CSV_HEADER)?;
        self.write_csv_rows(&mut writer)?;
        writer.flush()?;
        Ok(())
    }
}

/// Uniform angles in `[0, 2π)`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> GateParams {
    let mut draw = || rng.random_range(0.0..std::f64::consts::TAU);
    GateParams::from_array([draw(), draw(), draw(), draw()]).expect("finite angles")
}

/// `samples` reproducible parameter tuples for `seed`.
pub fn seeded_params(seed: u64, samples: usize) -> Vec<GateParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| random_params(&mut rng)).collect()
}

fn fmt_phi(phi: &GateParams) -> String {
    let [a, b, c, d] = phi.angles();
    format!("phi=({a},{b},{c},{d})")
}

/// The four unary functions, each checked on both inputs.
pub fn table1_check() -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("table1");
    for (name, g) in builtin::unary_functions() {
        let verdict = verify_truth_table(&boolean_network_for(&g), &g)?;
        for row in verdict.rows {
            report.check(
                format!("{name}: P(output={} | input={})", row.expected, row.input),
                1.0,
                row.probability,
                PROBABILITY_TOLERANCE,
            );
        }
    }
    Ok(report)
}

/// Output kets of the two-neuron network for the four unary synaptic gates.
pub fn table2_check(phi: &GateParams) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(format!("table2[{}]", fmt_phi(phi)));
    let (p0, p1) = psi_amplitudes(phi);
    // Basis indices of the two branches for each row, ψ(0) branch first.
    let branches = [(0b00, 0b10), (0b00, 0b11), (0b01, 0b10), (0b01, 0b11)];
    for ((name, g), (i0, i1)) in builtin::unary_functions().into_iter().zip(branches) {
        let state = run_history(&builtin::two_neuron(&g), &[*phi], &[0])?;
        let mut expected = [Complex64::new(0.0, 0.0); 4];
        expected[i0] += p0;
        expected[i1] += p1;
        let deviation = state
            .amplitudes()
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        report.check(format!("{name}: max |amplitude - table ket|"), 0.0, deviation, KET_TOLERANCE);
    }
    Ok(report)
}

fn random_function<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> BooleanFunction {
    let table = (0..1usize << m).map(|_| rng.random_range(0..1usize << n)).collect();
    BooleanFunction::new(m, n, table).expect("random table fits")
}

/// Exhaustive and random Boolean functions, each compiled into a two-layer
/// network and compared against a direct table lookup.
pub fn boolean_mn_check(seed: u64, random_samples: usize) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(format!("boolean-mn[seed={seed}]"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families: Vec<(&str, Vec<BooleanFunction>)> = vec![
        (
            "all {0,1}^2->{0,1}",
            (0..16usize)
                .map(|id| BooleanFunction::from_fn(2, 1, |s| id >> s & 1).expect("valid"))
                .collect(),
        ),
        (
            "all {0,1}^3->{0,1}",
            (0..256usize)
                .map(|id| BooleanFunction::from_fn(3, 1, |s| id >> s & 1).expect("valid"))
                .collect(),
        ),
        (
            "random {0,1}^3->{0,1}^3",
            (0..random_samples).map(|_| random_function(3, 3, &mut rng)).collect(),
        ),
    ];
    for (family, functions) in families {
        let mut correct = 0usize;
        let mut shaped = 0usize;
        for g in &functions {
            let net = boolean_network_for(g);
            if net.n_neurons() == g.m() + g.n() && net.hidden_neurons() == 0 {
                shaped += 1;
            }
            if verify_truth_table(&net, g)?.all_pass() {
                correct += 1;
            }
        }
        let total = functions.len() as f64;
        report.check(format!("{family}: functions reproduced"), total, correct as f64, 0.0);
        report.check(format!("{family}: networks with m+n neurons, no hidden"), total, shaped as f64, 0.0);
    }
    Ok(report)
}

/// The readout neuron of the XOR network fires with certainty for every φ.
pub fn xor_reflexivity_check(samples: usize, seed: u64) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(format!("xor[seed={seed},samples={samples}]"));
    let net = builtin::xor_network();

    let ground = run_history(&net, &[GateParams::IDENTITY], &[0])?;
    report.check("phi=0: amplitude of |0;01;1>", 1.0, ground.amplitude(0b0011).re, KET_TOLERANCE);

    let mut min_fire = f64::INFINITY;
    let mut max_off_support = 0.0f64;
    let mut max_branch_dev = 0.0f64;
    for phi in seeded_params(seed, samples) {
        let state = run_history(&net, &[phi], &[0])?;
        min_fire = min_fire.min(pattern_probability(&state, &[3], 1));
        let middle_ok = pattern_probability(&state, &[1, 2], 0b01) + pattern_probability(&state, &[1, 2], 0b10);
        max_off_support = max_off_support.max((1.0 - middle_ok).abs());
        let (p0, p1) = psi_amplitudes(&phi);
        max_branch_dev = max_branch_dev
            .max((state.amplitude(0b0011) - p0).norm())
            .max((state.amplitude(0b1101) - p1).norm());
    }
    report.check("min over samples of P(N4 fires)", 1.0, min_fire, PROBABILITY_TOLERANCE);
    report.check("max middle-layer mass outside {01,10}", 0.0, max_off_support, PROBABILITY_TOLERANCE);
    report.check("max |branch amplitude - psi_phi|", 0.0, max_branch_dev, KET_TOLERANCE);
    Ok(report)
}

fn plus_minus(sign: f64) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_amplitudes(vec![Complex64::new(h, 0.0), Complex64::new(sign * h, 0.0)]).expect("normalized")
}

/// State of `qubit` conditioned on the other qubits reading `rest` (in index
/// order, qubit removed). `None` when that branch has negligible weight.
fn conditional_qubit_state(state: &StateVector, qubit: usize, rest: usize) -> Option<StateVector> {
    let n = state.n_qubits();
    let pos = n - 1 - qubit;
    let low = rest & ((1 << pos) - 1);
    let high = (rest >> pos) << (pos + 1);
    let a0 = state.amplitude(high | low);
    let a1 = state.amplitude(high | 1 << pos | low);
    let weight = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
    (weight > 1e-6).then(|| StateVector::from_amplitudes(vec![a0 / weight, a1 / weight]).expect("normalized"))
}

/// `U_H U_h` readout: N4 ends in |+⟩ or |−⟩ depending on the branch.
pub fn hadamard_variant_check(samples: usize, seed: u64) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(format!("hadamard-variant[seed={seed},samples={samples}]"));
    let net = builtin::hadamard_variant_network();
    let (plus, minus) = (plus_minus(1.0), plus_minus(-1.0));
    let mut min_fidelity = 1.0f64;
    let mut max_fire_dev = 0.0f64;
    let mut max_branch_dev = 0.0f64;
    for phi in seeded_params(seed, samples) {
        let state = run_history(&net, &[phi], &[0])?;
        for (rest, target) in [(0b001, &plus), (0b110, &minus)] {
            if let Some(cond) = conditional_qubit_state(&state, 3, rest) {
                min_fidelity = min_fidelity.min(fidelity(target, &cond)?);
            }
        }
        max_fire_dev = max_fire_dev.max((pattern_probability(&state, &[3], 1) - 0.5).abs());
        let (p0, p1) = psi_amplitudes(&phi);
        max_branch_dev = max_branch_dev
            .max((pattern_probability(&state, &[0, 1, 2], 0b001) - p0.norm_sqr()).abs())
            .max((pattern_probability(&state, &[0, 1, 2], 0b110) - p1.norm_sqr()).abs());
    }
    report.check("min fidelity of N4 with |+>/|-> per branch", 1.0, min_fidelity, PROBABILITY_TOLERANCE);
    report.check("max |P(N4 fires) - 1/2|", 0.0, max_fire_dev, PROBABILITY_TOLERANCE);
    report.check("max |branch weight - |psi_phi|^2|", 0.0, max_branch_dev, PROBABILITY_TOLERANCE);
    Ok(report)
}

/// `[[P(0,+), P(0,−)], [P(1,+), P(1,−)]]` for input read in the computational
/// basis and output in the ± basis.
pub fn joint_plus_minus_distribution(state: &StateVector) -> [[f64; 2]; 2] {
    let a = state.amplitudes();
    let mut out = [[0.0; 2]; 2];
    for (input, row) in out.iter_mut().enumerate() {
        let (x0, x1) = (a[input << 1], a[input << 1 | 1]);
        row[0] = 0.5 * (x0 + x1).norm_sqr();
        row[1] = 0.5 * (x0 - x1).norm_sqr();
    }
    out
}

fn complementarity_into(report: &mut ScenarioReport, phi: &GateParams, label: &str) -> Result<()> {
    let state = run_history(&builtin::complementarity_network(), &[*phi], &[0])?;
    let (p0, p1) = psi_amplitudes(phi);
    let joint = joint_plus_minus_distribution(&state);
    report.check(format!("{label}P(0,+)"), p0.norm_sqr(), joint[0][0], PROBABILITY_TOLERANCE);
    report.check(format!("{label}P(1,-)"), p1.norm_sqr(), joint[1][1], PROBABILITY_TOLERANCE);
    report.check(format!("{label}P(0,-)"), 0.0, joint[0][1], PROBABILITY_TOLERANCE);
    report.check(format!("{label}P(1,+)"), 0.0, joint[1][0], PROBABILITY_TOLERANCE);
    report.check(
        format!("{label}P(output fires)"),
        0.5,
        pattern_probability(&state, &[1], 1),
        PROBABILITY_TOLERANCE,
    );
    for (input, target, name) in [(0, plus_minus(1.0), "+"), (1, plus_minus(-1.0), "-")] {
        if let Some(cond) = conditional_qubit_state(&state, 1, input) {
            report.check(
                format!("{label}fidelity(output | input={input}, |{name}>)"),
                1.0,
                fidelity(&target, &cond)?,
                PROBABILITY_TOLERANCE,
            );
        }
    }
    Ok(())
}

/// The two-neuron network with `S12 = |0⟩⟨0| ⊗ U_H + |1⟩⟨1| ⊗ U_H U_NOT`.
pub fn complementarity_check(phi: &GateParams) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(format!("complementarity[{}]", fmt_phi(phi)));
    complementarity_into(&mut report, phi, "")?;
    Ok(report)
}

/// [`complementarity_check`] over seeded random φ.
pub fn complementarity_sweep(samples: usize, seed: u64) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(format!("complementarity[seed={seed},samples={samples}]"));
    for (k, phi) in seeded_params(seed, samples).iter().enumerate() {
        complementarity_into(&mut report, phi, &format!("sample {k}: "))?;
    }
    Ok(report)
}

/// Entropy in bits of the neurons in `partition`.
pub fn entanglement_report(state: &StateVector, partition: &[usize]) -> Result<f64> {
    von_neumann_entropy(&reduced_density(state, partition)?)
}

/// Composite Simpson rule on `[a, b]` with `intervals` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

/// Environment-averaged CNOT network under the uniform packet, plus
/// time-invariance of a single-mode packet and normalization of a two-mode one.
pub fn averaged_dynamics_check(grid: &QuadratureGrid, times: &[f64]) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(format!("averaged-dynamics[P={}]", grid.points_per_axis()));
    let net: NetworkSpec = builtin::two_neuron(&BooleanFunction::new(1, 1, vec![0, 1])?);
    let tau = std::f64::consts::TAU;
    let fire_ref = simpson(|x| (x / 4.0).sin().powi(2), 0.0, tau, 20_000) / tau;
    let rest_ref = simpson(|x| (x / 4.0).cos().powi(2), 0.0, tau, 20_000) / tau;

    let uniform = [WavePacket::uniform()];
    let single = [WavePacket::single_mode(ModeIndex([1, 0, -2, 1]))];
    let rho_single_0 = averaged_density(&net, &single, &[0], 0.0, grid)?;
    let two_mode = WavePacket::normalized(
        [
            (ModeIndex::ZERO, Complex64::new(1.0, 0.0)),
            (ModeIndex([1, 0, 0, 1]), Complex64::new(0.0, 1.0)),
        ],
        1,
    )?
    .0;

    for &t in times {
        let rho = averaged_density(&net, &uniform, &[0], t, grid)?;
        let d = rho.diagonal();
        report.check(format!("t={t}: trace"), 1.0, rho.trace().re, TRACE_TOLERANCE);
        report.check(format!("t={t}: hermiticity error"), 0.0, rho.hermiticity_error(), 1e-10);
        let min_eig = rho.eigenvalues().first().copied().unwrap_or(0.0).min(0.0);
        report.check(format!("t={t}: negative eigenvalue mass"), 0.0, min_eig, 1e-9);
        report.check(format!("t={t}: mass on |01>,|10>"), 0.0, d[0b01] + d[0b10], 1e-9);
        report.check(format!("t={t}: rho(00,00) vs 1-D integral"), rest_ref, d[0b00], QUADRATURE_TOLERANCE);
        report.check(format!("t={t}: rho(11,11) vs 1-D integral"), fire_ref, d[0b11], QUADRATURE_TOLERANCE);
        report.check(
            format!("t={t}: purity"),
            rest_ref * rest_ref + fire_ref * fire_ref,
            purity(&rho),
            QUADRATURE_TOLERANCE,
        );
        report.check(
            format!("t={t}: entropy of N1 (bits)"),
            1.0,
            von_neumann_entropy(&rho)?,
            QUADRATURE_TOLERANCE,
        );

        let rho_single = averaged_density(&net, &single, &[0], t, grid)?;
        let drift = rho_single.max_abs_diff(&rho_single_0);
        report.check(format!("t={t}: single-mode packet drift"), 0.0, drift, 1e-10);
        report.check(
            format!("t={t}: grid integral of two-mode |Psi|^2"),
            1.0,
            packet_probability(&two_mode, t, grid),
            QUADRATURE_TOLERANCE,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

    #[test]
    fn table2_examples() {
        let r = table2_check(&GateParams::IDENTITY).unwrap();
        assert_eq!(r.records.len(), 4);
        assert!(r.all_pass(), "{r:?}");
        let state = run_history(
            &builtin::two_neuron(&BooleanFunction::new(1, 1, vec![0, 1]).unwrap()),
            &[GateParams::IDENTITY],
            &[0],
        )
        .unwrap();
        assert_eq!(state.amplitude(0), Complex64::new(1.0, 0.0));

        let phi = GateParams::new(0.0, 0.0, 0.0, PI).unwrap();
        assert!(table2_check(&phi).unwrap().all_pass());
        let s = run_history(
            &builtin::two_neuron(&BooleanFunction::new(1, 1, vec![1, 0]).unwrap()),
            &[phi],
            &[0],
        )
        .unwrap();
        assert!((s.amplitude(0b01) - FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((s.amplitude(0b10) + FRAC_1_SQRT_2).norm() < 1e-15);

        let phi = GateParams::new(0.0, 0.0, 0.0, TAU).unwrap();
        assert!(table2_check(&phi).unwrap().all_pass());
        let s = run_history(
            &builtin::two_neuron(&BooleanFunction::new(1, 1, vec![1, 1]).unwrap()),
            &[phi],
            &[0],
        )
        .unwrap();
        assert!((s.amplitude(0b11) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn xor_report_passes_and_is_reproducible() {
        let a = xor_reflexivity_check(20, 7).unwrap();
        assert!(a.all_pass(), "{a:?}");
        assert_eq!(a, xor_reflexivity_check(20, 7).unwrap());
    }

    #[test]
    fn complementarity_examples() {
        let r = complementarity_check(&GateParams::IDENTITY).unwrap();
        assert!(r.all_pass(), "{r:?}");
        // ψ(1) = 0, so only the |+⟩ branch is conditioned on.
        assert_eq!(r.records.iter().filter(|a| a.description.contains("fidelity")).count(), 1);

        let r = complementarity_check(&GateParams::new(0.0, 0.0, 0.0, PI).unwrap()).unwrap();
        let p = |name: &str| r.records.iter().find(|a| a.description == name).unwrap().observed;
        assert!((p("P(0,+)") - 0.5).abs() < 1e-15);
        assert!((p("P(1,-)") - 0.5).abs() < 1e-15);

        let phi = GateParams::new(0.0, 0.0, 0.0, TAU).unwrap();
        let s = run_history(&builtin::complementarity_network(), &[phi], &[0]).unwrap();
        // −|1⟩ ⊗ |−⟩
        assert!((s.amplitude(0b10) + FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((s.amplitude(0b11) - FRAC_1_SQRT_2).norm() < 1e-15);
        assert!(complementarity_check(&phi).unwrap().all_pass());
    }

    #[test]
    fn entanglement_examples() {
        let half_pi = GateParams::new(0.0, 0.0, 0.0, PI).unwrap();
        let bell = run_history(&builtin::two_neuron(&BooleanFunction::new(1, 1, vec![0, 1]).unwrap()), &[half_pi], &[0])
            .unwrap();
        assert!((entanglement_report(&bell, &[0]).unwrap() - 1.0).abs() < 1e-9);

        let neutral = run_history(&builtin::two_neuron(&BooleanFunction::new(1, 1, vec![0, 0]).unwrap()), &[half_pi], &[0])
            .unwrap();
        assert!(entanglement_report(&neutral, &[0]).unwrap().abs() < 1e-9);

        let xor = run_history(&builtin::xor_network(), &[half_pi], &[0]).unwrap();
        assert!((entanglement_report(&xor, &[0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(entanglement_report(&xor, &[3]).unwrap().abs() < 1e-9);
    }

    #[test]
    fn csv_layout() {
        let mut r = ScenarioReport::new("demo");
        r.check("a, with comma", 1.0, 1.0, 0.0);
        r.check("b", 0.0, 0.5, 0.1);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "scenario,assertion,expected,observed,tolerance,pass");
        assert_eq!(lines[1], "demo,\"a, with comma\",1,1,0,true");
        assert_eq!(lines[2], "demo,b,0,0.5,0.1,false");
        assert_eq!((r.passed(), r.failed()), (1, 1));
    }

    #[test]
    fn simpson_is_accurate() {
        let v = simpson(|x| x.sin(), 0.0, PI, 1000);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
