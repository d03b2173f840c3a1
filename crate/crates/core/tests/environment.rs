use proptest::prelude::*;
use quann_core::environment::{averaged_density, averaged_density_direct, packet_probability, purity, ModeIndex, WavePacket};
use quann_core::network::builtin;
use quann_core::{BooleanFunction, Complex64, DensityMatrix, NetworkSpec, QuadratureGrid, SynapticStep};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cnot_net() -> NetworkSpec {
    builtin::two_neuron(&BooleanFunction::new(1, 1, vec![0, 1]).unwrap())
}

fn random_packets(seed: u64, count: usize, n_max: u32) -> Vec<WavePacket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| WavePacket::random(n_max, &mut rng)).collect()
}

fn assert_valid(rho: &DensityMatrix) {
    assert!((rho.trace().re - 1.0).abs() < 1e-9);
    assert!(rho.hermiticity_error() < 1e-10);
    assert!(rho.eigenvalues()[0] >= -1e-9);
}

#[test]
fn factorized_average_matches_literal_sum() {
    let grid = QuadratureGrid::new(4).unwrap();
    let two_input = NetworkSpec::new(
        vec![2, 1],
        vec![SynapticStep::boolean(builtin::xor(), vec![0, 1], vec![2]).unwrap()],
    )
    .unwrap();
    let cases: Vec<(NetworkSpec, Vec<usize>, Vec<WavePacket>)> = vec![
        (cnot_net(), vec![0], random_packets(1, 1, 2)),
        (builtin::xor_network(), vec![0], random_packets(2, 1, 3)),
        (builtin::hadamard_variant_network(), vec![0], random_packets(3, 1, 1)),
        (builtin::complementarity_network(), vec![0], random_packets(4, 1, 2)),
        (two_input, vec![0, 1], random_packets(5, 2, 1)),
    ];
    for (k, (net, inputs, packets)) in cases.iter().enumerate() {
        for t in [0.0, 0.8] {
            let fast = averaged_density(net, packets, inputs, t, &grid).unwrap();
            let slow = averaged_density_direct(net, packets, inputs, t, &grid).unwrap();
            let diff = fast.max_abs_diff(&slow);
            assert!(diff < 1e-12, "case {k}, t={t}: {diff:e}");
            assert_valid(&fast);
        }
    }
}

#[test]
fn refinement_converges() {
    let coarse = QuadratureGrid::new(16).unwrap();
    let fine = QuadratureGrid::new(32).unwrap();
    let nets = [cnot_net(), builtin::xor_network(), builtin::complementarity_network()];
    for (seed, net) in nets.iter().enumerate() {
        for packet in random_packets(seed as u64 + 10, 2, 3) {
            for t in [0.0, 1.3] {
                let a = averaged_density(net, std::slice::from_ref(&packet), &[0], t, &coarse).unwrap();
                let b = averaged_density(net, std::slice::from_ref(&packet), &[0], t, &fine).unwrap();
                let diff = a.max_abs_diff(&b);
                assert!(diff < 1e-6, "net {seed}, t={t}: {diff:e}");
            }
        }
    }
}

#[test]
fn uniform_packet_decoheres_the_cnot_pair() {
    let grid = QuadratureGrid::new(QuadratureGrid::DEFAULT_POINTS).unwrap();
    let rho = averaged_density(&cnot_net(), &[WavePacket::uniform()], &[0], 0.0, &grid).unwrap();
    let p = purity(&rho);
    assert!(p > 0.0 && p < 1.0 - 1e-3, "purity {p}");
    assert!((p - 0.5).abs() < 1e-6);
}

#[test]
fn two_mode_packet_probability_is_conserved() {
    let grid = QuadratureGrid::new(16).unwrap();
    let (packet, _) = WavePacket::normalized(
        [
            (ModeIndex([0, 0, 0, 0]), Complex64::new(1.0, 0.0)),
            (ModeIndex([3, -3, 2, 3]), Complex64::new(0.5, -0.5)),
            (ModeIndex([-1, 2, 0, -3]), Complex64::new(0.0, 2.0)),
        ],
        3,
    )
    .unwrap();
    for t in [0.0, 0.1, 2.5, 40.0] {
        assert!((packet_probability(&packet, t, &grid) - 1.0).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_preserves_coefficient_norm(seed in any::<u64>(), n_max in 0u32..=3, t in -50.0f64..50.0) {
        let packet = &random_packets(seed, 1, n_max)[0];
        let evolved: f64 = packet.evolved_coefficients(t).iter().map(|(_, a)| a.norm_sqr()).sum();
        prop_assert!((evolved - packet.norm_sqr()).abs() < 1e-14);
        prop_assert!((packet.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn averaged_density_is_a_density_matrix(seed in any::<u64>(), t in 0.0f64..10.0) {
        let grid = QuadratureGrid::new(8).unwrap();
        let packets = random_packets(seed, 1, 2);
        let rho = averaged_density(&builtin::xor_network(), &packets, &[0], t, &grid).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(rho.hermiticity_error() < 1e-10);
        prop_assert!(rho.eigenvalues()[0] >= -1e-9);
        // The readout neuron fires on every history, so only odd indices carry weight.
        let d = rho.diagonal();
        prop_assert!(d.iter().step_by(2).sum::<f64>() < 1e-10);
    }
}
