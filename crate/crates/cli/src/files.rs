//! On-disk JSON formats and their conversions to library types.
//!
//! Systems and controls are JSON objects, lumping matrices are bare nested
//! arrays, trajectories are CSV. serde_json prints floats in shortest
//! round-trip form, so files written here re-parse bit-exactly.

use std::fs;
use std::path::Path;

use lumpsys::{ControlSignal, LtiSystem, Matrix, ReactionNetwork};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    pub r: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_comment: Option<String>,
}

impl SystemFile {
    pub fn from_system(sys: &LtiSystem, k_comment: Option<String>) -> Self {
        SystemFile {
            n: sys.state_dim(),
            r: sys.input_dim(),
            p: sys.output_dim(),
            a: matrix_rows(&sys.a),
            b: matrix_rows(&sys.b),
            c: matrix_rows(&sys.c),
            labels: sys.labels.clone(),
            k_comment,
        }
    }

    pub fn to_system(&self) -> Result<LtiSystem, CliError> {
        let a = nested_matrix("A", &self.a, self.n, self.n)?;
        let b = nested_matrix("B", &self.b, self.n, self.r)?;
        let c = nested_matrix("C", &self.c, self.p, self.n)?;
        let mut sys = LtiSystem::new(a, b, c).map_err(input_error)?;
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return Err(CliError::Input(format!(
                    "labels: expected {} entries, got {}",
                    self.n,
                    labels.len()
                )));
            }
            sys.labels = Some(labels.clone());
        }
        Ok(sys)
    }
}

/// Input signal schema: `{"type": "zero"}`,
/// `{"type": "constant", "value": [...]}`, or
/// `{"type": "piecewise", "times": [...], "values": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ControlFile {
    Zero,
    Constant { value: Vec<f64> },
    Piecewise { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl ControlFile {
    pub fn from_signal(u: &ControlSignal) -> Self {
        match u {
            ControlSignal::Zero => ControlFile::Zero,
            ControlSignal::Constant(value) => ControlFile::Constant {
                value: value.clone(),
            },
            ControlSignal::PiecewiseConstant { times, values } => ControlFile::Piecewise {
                times: times.clone(),
                values: values.clone(),
            },
        }
    }

    pub fn to_signal(&self) -> ControlSignal {
        match self {
            ControlFile::Zero => ControlSignal::Zero,
            ControlFile::Constant { value } => ControlSignal::Constant(value.clone()),
            ControlFile::Piecewise { times, values } => ControlSignal::PiecewiseConstant {
                times: times.clone(),
                values: values.clone(),
            },
        }
    }
}

/// Reaction network schema with species referenced by name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub species: Vec<String>,
    pub reactions: Vec<ReactionFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReactionFile {
    pub from: String,
    pub to: String,
    pub rate: f64,
}

impl NetworkFile {
    pub fn from_network(net: &ReactionNetwork) -> Self {
        NetworkFile {
            species: net.species.clone(),
            reactions: net
                .reactions
                .iter()
                .map(|r| ReactionFile {
                    from: net.species[r.from].clone(),
                    to: net.species[r.to].clone(),
                    rate: r.rate,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub command: String,
    pub inputs: serde_json::Value,
    pub results: serde_json::Value,
    pub tolerances: serde_json::Value,
}

pub fn input_error(e: lumpsys::Error) -> CliError {
    CliError::Input(e.to_string())
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn nested_matrix(name: &str, rows: &[Vec<f64>], want_rows: usize, want_cols: usize) -> Result<Matrix, CliError> {
    if rows.len() != want_rows || rows.iter().any(|r| r.len() != want_cols) {
        return Err(CliError::Input(format!(
            "{name}: expected {want_rows} rows of {want_cols} entries"
        )));
    }
    Matrix::from_rows(rows).map_err(input_error)
}

pub fn read_system(path: &Path) -> Result<SystemFile, CliError> {
    parse_json(path)
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let rows: Vec<Vec<f64>> = parse_json(path)?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::Input(format!(
            "{}: expected a non-empty rectangular array of numbers",
            path.display()
        )));
    }
    Matrix::from_rows(&rows).map_err(input_error)
}

pub fn read_control(path: &Path) -> Result<ControlFile, CliError> {
    parse_json(path)
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = render_json(value)
        .map_err(|e| CliError::Input(format!("serializing {}: {e}", path.display())))?;
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Pretty JSON with scalar-only arrays kept on one line, so matrix rows and
/// state vectors read naturally. Numbers keep serde_json's shortest
/// round-trip form.
pub fn render_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    render(&value, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn render(v: &serde_json::Value, indent: usize, out: &mut String) {
    match v {
        serde_json::Value::Array(items) => {
            if items.iter().all(|i| !(i.is_array() || i.is_object())) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&item.to_string());
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    push_indent(out, indent + 1);
                    render(item, indent + 1, out);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                push_indent(out, indent);
                out.push(']');
            }
        }
        serde_json::Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (key, value)) in map.iter().enumerate() {
                push_indent(out, indent + 1);
                out.push_str(&serde_json::Value::String(key.clone()).to_string());
                out.push_str(": ");
                render(value, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(out, indent);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}
