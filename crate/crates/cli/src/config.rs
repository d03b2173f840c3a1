//! Network configuration files.
//!
//! ```toml
//! layers = [1, 2, 1]
//! inputs = [1]
//!
//! [[step]]
//! kind = "boolean"
//! controls = [1]
//! targets = [2, 3]
//! table = "0 -> 01, 1 -> 10"
//!
//! [[step]]
//! kind = "post_unitary"
//! targets = [4]
//! gate = "hadamard"
//! ```
//!
//! Neurons are numbered from 1 in these files. `inputs` defaults to the first
//! layer. A `table` is either one line with rows separated by `,` or `;`, or a
//! multi-line string in the truth-table format.

use std::ops::Range;

use quann_core::gates::fixed_gate;
use quann_core::{BooleanFunction, FixedGate, NetworkSpec, SynapticStep};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

/// A parsed network with 0-based input neurons.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub net: NetworkSpec,
    pub inputs: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    layers: Spanned<Vec<usize>>,
    inputs: Option<Spanned<Vec<usize>>>,
    #[serde(default)]
    step: Vec<Spanned<RawStep>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    kind: StepKind,
    #[serde(default)]
    controls: Vec<usize>,
    targets: Vec<usize>,
    table: Option<Spanned<String>>,
    gate: Option<String>,
    gates: Option<Vec<String>>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum StepKind {
    Boolean,
    PostUnitary,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn of(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].matches('\n').count() + 1
    }

    fn error(&self, span: Range<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.of(span.start),
            message: message.into(),
        }
    }
}

pub fn parse_network_config(text: &str) -> Result<NetworkConfig, ConfigError> {
    let lines = Lines(text);
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map_or(1, |s| lines.of(s.start)),
        message: e.message().trim().to_string(),
    })?;

    let layers_span = raw.layers.span();
    let layers = raw.layers.into_inner();
    if layers.is_empty() || layers.contains(&0) {
        return Err(lines.error(layers_span, "every layer needs at least one neuron"));
    }
    let total: usize = layers.iter().sum();

    let neuron = |label: usize, span: Range<usize>| {
        if (1..=total).contains(&label) {
            Ok(label - 1)
        } else {
            Err(lines.error(span, format!("unknown neuron index {label} (network has {total})")))
        }
    };

    let inputs = match raw.inputs {
        Some(list) => {
            let span = list.span();
            let inputs = list
                .into_inner()
                .into_iter()
                .map(|q| neuron(q, span.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(q) = first_repeat(&inputs) {
                return Err(lines.error(span, format!("input neuron {} listed twice", q + 1)));
            }
            inputs
        }
        None => (0..layers[0]).collect(),
    };

    let mut steps = Vec::with_capacity(raw.step.len());
    for spanned in raw.step {
        let span = spanned.span();
        let step = spanned.into_inner();
        let controls = step
            .controls
            .iter()
            .map(|&q| neuron(q, span.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let targets = step
            .targets
            .iter()
            .map(|&q| neuron(q, span.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let wired: Vec<usize> = controls.iter().chain(&targets).copied().collect();
        if let Some(q) = first_repeat(&wired) {
            return Err(lines.error(span, format!("neuron {} used more than once in this step", q + 1)));
        }
        steps.push(match step.kind {
            StepKind::Boolean => {
                if step.gate.is_some() || step.gates.is_some() {
                    return Err(lines.error(span, "a boolean step takes a `table`, not a gate"));
                }
                let table = step
                    .table
                    .ok_or_else(|| lines.error(span.clone(), "a boolean step needs a `table`"))?;
                let g = parse_table(&lines, &table)?;
                if g.m() != controls.len() || g.n() != targets.len() {
                    return Err(lines.error(
                        span,
                        format!(
                            "table maps {} bits to {}, but the step has {} controls and {} targets",
                            g.m(),
                            g.n(),
                            controls.len(),
                            targets.len()
                        ),
                    ));
                }
                SynapticStep::boolean(g, controls, targets).map_err(|e| lines.error(span, e.to_string()))?
            }
            StepKind::PostUnitary => {
                if !controls.is_empty() {
                    return Err(lines.error(span, "a post_unitary step has no controls"));
                }
                if step.table.is_some() {
                    return Err(lines.error(span, "a post_unitary step takes `gate` or `gates`, not a table"));
                }
                let names = match (step.gate, step.gates) {
                    (Some(name), None) => vec![name; targets.len()],
                    (None, Some(names)) => names,
                    _ => return Err(lines.error(span, "a post_unitary step needs exactly one of `gate` or `gates`")),
                };
                if names.len() != targets.len() {
                    return Err(lines.error(
                        span,
                        format!("{} gates for {} targets", names.len(), targets.len()),
                    ));
                }
                let gates = names
                    .iter()
                    .map(|name| {
                        name.parse::<FixedGate>()
                            .map(fixed_gate)
                            .map_err(|_| lines.error(span.clone(), format!("unknown gate {name:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SynapticStep::post_unitary(gates, targets).map_err(|e| lines.error(span, e.to_string()))?
            }
        });
    }

    let net = NetworkSpec::new(layers, steps).map_err(|e| lines.error(layers_span, e.to_string()))?;
    Ok(NetworkConfig { net, inputs })
}

/// Parses an inline truth table, reporting errors at their line in the file.
fn parse_table(lines: &Lines, table: &Spanned<String>) -> Result<BooleanFunction, ConfigError> {
    let span = table.span();
    let start = lines.of(span.start);
    let literal = lines.0.get(span.clone()).unwrap_or("");
    let content = table.get_ref();
    if !content.contains('\n') {
        let rows = content.replace([',', ';'], "\n");
        return BooleanFunction::parse(&rows).map_err(|e| ConfigError {
            line: start,
            message: format!("truth table: {}", strip_line(&e)),
        });
    }
    // A newline right after the opening quotes is dropped from the value.
    let multiline = literal.starts_with("\"\"\"") || literal.starts_with("'''");
    let skipped = multiline && (literal[3..].starts_with('\n') || literal[3..].starts_with("\r\n"));
    let first = start + usize::from(skipped);
    BooleanFunction::parse(content).map_err(|e| match e {
        quann_core::Error::Parse { line, message } => ConfigError {
            line: first + line - 1,
            message: format!("truth table: {message}"),
        },
        other => ConfigError {
            line: start,
            message: format!("truth table: {other}"),
        },
    })
}

fn strip_line(e: &quann_core::Error) -> String {
    match e {
        quann_core::Error::Parse { message, .. } => message.clone(),
        other => other.to_string(),
    }
}

fn first_repeat(items: &[usize]) -> Option<usize> {
    items
        .iter()
        .enumerate()
        .find(|(k, q)| items[..*k].contains(q))
        .map(|(_, &q)| q)
}
