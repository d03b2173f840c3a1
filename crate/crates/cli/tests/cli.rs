use std::path::PathBuf;
use std::process::{Command, Output};

use quann_cli::parse_network_config;
use quann_core::network::builtin;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn quann(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quann"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(out: &Output) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(out.stdout.as_slice())
        .records()
        .collect::<Result<_, _>>()
        .expect("valid CSV")
}

fn header(out: &Output) -> Vec<String> {
    csv::Reader::from_reader(out.stdout.as_slice())
        .headers()
        .unwrap()
        .iter()
        .map(str::to_string)
        .collect()
}

#[test]
fn table2_at_quarter_turn() {
    let out = quann(&["scenario", "table2", "--phi", "0,0,0,3.14159265"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&out), ["scenario", "assertion", "expected", "observed", "tolerance", "pass"]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| &r[5] == "true"));
}

#[test]
fn every_scenario_passes() {
    for name in ["table1", "table2", "boolean-mn", "xor", "hadamard-variant", "complementarity"] {
        let out = quann(&["scenario", name, "--samples", "20", "--seed", "3"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(!rows(&out).is_empty());
    }
    let out = quann(&["scenario", "averaged-dynamics", "--grid", "8", "--t", "0,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn scenario_output_is_deterministic() {
    let a = quann(&["scenario", "xor", "--samples", "30", "--seed", "9"]);
    let b = quann(&["scenario", "xor", "--samples", "30", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn phi_accepts_pi_multiples() {
    let out = quann(&["scenario", "complementarity", "--phi", "0,0,0,2pi", "--phi", "0.5pi,0,-0.5pi,pi"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn run_writes_branches() {
    let net = data("xor_reflexive.net");
    let out = quann(&["run", "--net", net.to_str().unwrap(), "--phi", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&out), ["branch", "re", "im", "probability"]);
    let ground = rows(&out);
    assert_eq!(ground.len(), 1);
    assert_eq!(&ground[0][0], "0;01;1");
    assert_eq!(ground[0][3].parse::<f64>().unwrap(), 1.0);

    let out = quann(&["run", "--net", net.to_str().unwrap(), "--phi", "0,0,0,pi"]);
    let labels: Vec<String> = rows(&out).iter().map(|r| r[0].to_string()).collect();
    assert_eq!(labels, ["0;01;1", "1;10;1"]);
}

#[test]
fn verify_xor_truth_table() {
    let out = quann(&[
        "verify",
        "--net",
        data("xor.net").to_str().unwrap(),
        "--fn",
        data("xor.tt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&out);
    assert_eq!(rows.len(), 4);
    let expected: Vec<&str> = rows.iter().map(|r| r.get(1).unwrap()).collect();
    assert_eq!(expected, ["0", "1", "1", "0"]);
    assert!(rows.iter().all(|r| &r[3] == "true"));
}

#[test]
fn verify_reports_a_wrong_table() {
    let dir = tempfile::tempdir().unwrap();
    let and = dir.path().join("and.tt");
    std::fs::write(&and, "00 -> 0\n01 -> 0\n10 -> 0\n11 -> 1\n").unwrap();
    let out = quann(&["verify", "--net", data("xor.net").to_str().unwrap(), "--fn", and.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let pass: Vec<String> = rows(&out).iter().map(|r| r[3].to_string()).collect();
    assert_eq!(pass, ["true", "false", "false", "false"]);
}

#[test]
fn average_over_three_times() {
    let out = quann(&[
        "average",
        "--net",
        data("cnot.net").to_str().unwrap(),
        "--packet",
        data("uniform.pk").to_str().unwrap(),
        "--t",
        "0,1,2",
        "--grid",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        header(&out),
        ["t", "trace", "rho_0;0", "rho_0;1", "rho_1;0", "rho_1;1", "purity", "entropy"]
    );
    let rows = rows(&out);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let v = |i: usize| r[i].parse::<f64>().unwrap();
        assert!((v(1) - 1.0).abs() < 1e-9);
        assert!((v(2) - 0.5).abs() < 1e-6 && (v(5) - 0.5).abs() < 1e-6);
        assert!((v(6) - 0.5).abs() < 1e-6);
        assert!((v(7) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn average_writes_to_file_and_warns_on_unnormalized_packet() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("avg.csv");
    let out = quann(&[
        "average",
        "--net",
        data("complementarity.net").to_str().unwrap(),
        "--packet",
        data("two_mode.pk").to_str().unwrap(),
        "--nmax",
        "2",
        "--grid",
        "8",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("renormalized"));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn config_and_io_errors_exit_with_two() {
    let missing = quann(&["run", "--net", "/nonexistent/net.toml"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.net");
    std::fs::write(&bad, "layers = [1, 1]\n\n[[step]]\nkind = \"boolean\"\ncontrols = [1]\ntargets = [5]\ntable = \"0->0,1->1\"\n").unwrap();
    let out = quann(&["run", "--net", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line") && stderr.contains("unknown neuron index 5"), "{stderr}");

    let packet = dir.path().join("bad.pk");
    std::fs::write(&packet, "0 0 0 0 1 0\n4 0 0 0 1 0\n").unwrap();
    let out = quann(&[
        "average",
        "--net",
        data("cnot.net").to_str().unwrap(),
        "--packet",
        packet.to_str().unwrap(),
        "--nmax",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let wrong_count = quann(&["run", "--net", data("cnot.net").to_str().unwrap(), "--phi", "0,0,0,0", "--phi", "0,0,0,0"]);
    assert_eq!(wrong_count.status.code(), Some(2));
}

#[test]
fn shipped_configs_match_builtin_networks() {
    let load = |name: &str| parse_network_config(&std::fs::read_to_string(data(name)).unwrap()).unwrap().net;
    assert_eq!(load("xor_reflexive.net"), builtin::xor_network());
    assert_eq!(load("hadamard_variant.net"), builtin::hadamard_variant_network());
    assert_eq!(load("complementarity.net"), builtin::complementarity_network());
}
