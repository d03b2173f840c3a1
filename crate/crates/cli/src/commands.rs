use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use quann_core::analysis::{self, seeded_params, ScenarioReport, TRACE_TOLERANCE};
use quann_core::environment::{averaged_density, WavePacket};
use quann_core::network::verify_truth_table_on;
use quann_core::qstate::basis_label;
use quann_core::{branch_amplitudes, run_history, von_neumann_entropy, BooleanFunction, GateParams, QuadratureGrid};

use crate::angle::parse_phi;
use crate::config::{parse_network_config, ConfigError, NetworkConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{0}")]
    Core(#[from] quann_core::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

/// Whether every assertion in a command held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
}

impl Status {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Passed
        } else {
            Status::Failed
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quann", version, about = "Quantum feedforward neural network simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a built-in scenario and write its assertion report.
    Scenario(ScenarioArgs),
    /// Run one history of a network and write its branch amplitudes.
    Run(RunArgs),
    /// Check that a network computes a truth table.
    Verify(VerifyArgs),
    /// Average a network over environment wave packets.
    Average(AverageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Table1,
    Table2,
    BooleanMn,
    Xor,
    HadamardVariant,
    Complementarity,
    AveragedDynamics,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(value_enum)]
    pub name: ScenarioName,
    /// Gate angles `φ0,φ1,φ2,φ3`; repeat for several tuples. Overrides `--seed`.
    #[arg(long, value_parser = parse_phi, allow_hyphen_values = true)]
    pub phi: Vec<GateParams>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Quadrature points per angle.
    #[arg(long, default_value_t = QuadratureGrid::DEFAULT_POINTS)]
    pub grid: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 3.7], allow_hyphen_values = true)]
    pub t: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Gate angles for each input neuron in order. Drawn from `--seed` when absent.
    #[arg(long, value_parser = parse_phi, allow_hyphen_values = true)]
    pub phi: Vec<GateParams>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Branches with |amplitude| at or below this are omitted.
    #[arg(long, default_value_t = 1e-12)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Truth table file (`input -> output` rows).
    #[arg(long = "fn")]
    pub function: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AverageArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Wave packet file, one per input neuron in order.
    #[arg(long, required = true)]
    pub packet: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0], allow_hyphen_values = true)]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = QuadratureGrid::DEFAULT_POINTS)]
    pub grid: usize,
    /// Mode truncation; packets with larger modes are rejected.
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Scenario(args) => scenario(args),
        Command::Run(args) => run_network(args),
        Command::Verify(args) => verify(args),
        Command::Average(args) => average(args),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_network(path: &Path) -> Result<NetworkConfig, CliError> {
    parse_network_config(&read(path)?).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })
}

fn load_with<T>(path: &Path, parse: impl FnOnce(&str) -> quann_core::Result<T>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        source: match e {
            quann_core::Error::Parse { line, message } => ConfigError { line, message },
            other => ConfigError {
                line: 1,
                message: other.to_string(),
            },
        },
    })
}

fn writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?)),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn finish(mut w: csv::Writer<Box<dyn Write>>, out: Option<&Path>) -> Result<(), CliError> {
    w.flush().map_err(|source| CliError::Io {
        path: out.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    })
}

fn scenario_reports(args: &ScenarioArgs) -> Result<Vec<ScenarioReport>, CliError> {
    let phis = || {
        if args.phi.is_empty() {
            seeded_params(args.seed, args.samples)
        } else {
            args.phi.clone()
        }
    };
    Ok(match args.name {
        ScenarioName::Table1 => vec![analysis::table1_check()?],
        ScenarioName::Table2 => phis().iter().map(analysis::table2_check).collect::<Result<_, _>>()?,
        ScenarioName::BooleanMn => vec![analysis::boolean_mn_check(args.seed, args.samples)?],
        ScenarioName::Xor => vec![analysis::xor_reflexivity_check(args.samples, args.seed)?],
        ScenarioName::HadamardVariant => vec![analysis::hadamard_variant_check(args.samples, args.seed)?],
        ScenarioName::Complementarity if args.phi.is_empty() => {
            vec![analysis::complementarity_sweep(args.samples, args.seed)?]
        }
        ScenarioName::Complementarity => {
            args.phi.iter().map(analysis::complementarity_check).collect::<Result<_, _>>()?
        }
        ScenarioName::AveragedDynamics => {
            let grid = QuadratureGrid::new(args.grid)?;
            vec![analysis::averaged_dynamics_check(&grid, &args.t)?]
        }
    })
}

fn scenario(args: ScenarioArgs) -> Result<Status, CliError> {
    let reports = scenario_reports(&args)?;
    let out = args.out.as_deref();
    let mut w = writer(out)?;
    w.write_record(ScenarioReport::CSV_HEADER)?;
    for report in &reports {
        report.write_csv_rows(&mut w)?;
    }
    finish(w, out)?;
    Ok(Status::from_pass(reports.iter().all(ScenarioReport::all_pass)))
}

/// `0;01;1` style label with `;` between layers.
fn layered_label(index: usize, layers: &[usize]) -> String {
    let bits = basis_label(index, layers.iter().sum());
    let mut out = String::with_capacity(bits.len() + layers.len());
    let mut rest = bits.as_str();
    for (k, &width) in layers.iter().enumerate() {
        if k > 0 {
            out.push(';');
        }
        let (head, tail) = rest.split_at(width);
        out.push_str(head);
        rest = tail;
    }
    out
}

fn run_network(args: RunArgs) -> Result<Status, CliError> {
    let cfg = load_network(&args.net)?;
    let phis = if args.phi.is_empty() {
        seeded_params(args.seed, cfg.inputs.len())
    } else if args.phi.len() == cfg.inputs.len() {
        args.phi
    } else {
        return Err(CliError::Usage(format!(
            "{} --phi values given for {} input neurons",
            args.phi.len(),
            cfg.inputs.len()
        )));
    };
    let state = run_history(&cfg.net, &phis, &cfg.inputs)?;
    let out = args.out.as_deref();
    let mut w = writer(out)?;
    w.write_record(["branch", "re", "im", "probability"])?;
    for b in branch_amplitudes(&state, args.threshold)? {
        w.write_record([
            layered_label(b.index, cfg.net.layers()),
            b.amplitude.re.to_string(),
            b.amplitude.im.to_string(),
            b.amplitude.norm_sqr().to_string(),
        ])?;
    }
    finish(w, out)?;
    Ok(Status::Passed)
}

fn verify(args: VerifyArgs) -> Result<Status, CliError> {
    let cfg = load_network(&args.net)?;
    let g = load_with(&args.function, BooleanFunction::parse)?;
    let report = verify_truth_table_on(&cfg.net, &g, &cfg.inputs, &cfg.net.output_neurons())?;
    let out = args.out.as_deref();
    let mut w = writer(out)?;
    w.write_record(["input", "expected", "probability", "pass"])?;
    for row in &report.rows {
        w.write_record([
            row.input.clone(),
            row.expected.clone(),
            row.probability.to_string(),
            row.pass.to_string(),
        ])?;
    }
    finish(w, out)?;
    Ok(Status::from_pass(report.all_pass()))
}

fn average(args: AverageArgs) -> Result<Status, CliError> {
    let cfg = load_network(&args.net)?;
    if args.packet.len() != cfg.inputs.len() {
        return Err(CliError::Usage(format!(
            "{} --packet files given for {} input neurons",
            args.packet.len(),
            cfg.inputs.len()
        )));
    }
    let mut packets = Vec::with_capacity(args.packet.len());
    for path in &args.packet {
        let (packet, warning) = load_with(path, |text| WavePacket::parse(text, args.nmax))?;
        if let Some(w) = warning {
            eprintln!("warning: {}: {w}", path.display());
        }
        packets.push(packet);
    }
    let grid = QuadratureGrid::new(args.grid)?;
    let n = cfg.net.n_neurons();

    let out = args.out.as_deref();
    let mut w = writer(out)?;
    let mut header = vec!["t".to_string(), "trace".to_string()];
    header.extend((0..1usize << n).map(|i| format!("rho_{}", layered_label(i, cfg.net.layers()))));
    header.extend(["purity".to_string(), "entropy".to_string()]);
    w.write_record(&header)?;

    let mut pass = true;
    for &t in &args.t {
        let rho = averaged_density(&cfg.net, &packets, &cfg.inputs, t, &grid)?;
        let trace = rho.trace().re;
        pass &= (trace - 1.0).abs() <= TRACE_TOLERANCE;
        let mut record = vec![t.to_string(), trace.to_string()];
        record.extend(rho.diagonal().iter().map(f64::to_string));
        record.push(rho.purity().to_string());
        record.push(von_neumann_entropy(&rho)?.to_string());
        w.write_record(&record)?;
    }
    finish(w, out)?;
    Ok(Status::from_pass(pass))
}
