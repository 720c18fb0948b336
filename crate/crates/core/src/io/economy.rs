//! Economy files: an N×N flow matrix plus agent metadata, in either a
//! human-editable delimiter-separated form or a structured JSON form that
//! also carries the group taxonomy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::{DecompositionError, GroupTree};
use crate::flow::{FlowError, FlowMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoFormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("agent id `{0}` cannot be written in delimiter-separated form")]
    UnwritableAgentId(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Groups(#[from] DecompositionError),
}

/// Input format of an economy file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EconomyFormat {
    /// JSON document with agent metadata and optional group taxonomy.
    Structured,
    /// Comma-separated matrix with an `agent,...` header row.
    DelimiterSeparated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    /// Group labels from outermost to innermost sector, when grouped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_path: Option<Vec<String>>,
}

/// The serialized form of one economy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyFile {
    pub agents: Vec<AgentSpec>,
    /// Row-major flows: `flows[j][k]` moves from agent `j` to agent `k`.
    pub flows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub currency_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_label: Option<String>,
}

impl EconomyFile {
    pub fn from_matrix(m: &FlowMatrix) -> Self {
        Self {
            agents: m
                .agents()
                .iter()
                .map(|id| AgentSpec {
                    id: id.clone(),
                    group_path: None,
                })
                .collect(),
            flows: m.entries().to_vec(),
            currency_label: None,
            period_label: None,
        }
    }

    /// Validates the file and produces the flow matrix, plus the group tree
    /// when any agent carries a group path.
    pub fn to_matrix(&self) -> Result<(FlowMatrix, Option<GroupTree>), IoFormatError> {
        if self.flows.len() != self.agents.len() {
            return Err(IoFormatError::DimensionMismatch(format!(
                "{} flow rows for {} agents",
                self.flows.len(),
                self.agents.len()
            )));
        }
        for (agent, row) in self.agents.iter().zip(&self.flows) {
            if row.len() != self.agents.len() {
                return Err(IoFormatError::DimensionMismatch(format!(
                    "row `{}` has {} entries, expected {}",
                    agent.id,
                    row.len(),
                    self.agents.len()
                )));
            }
        }
        let ids: Vec<String> = self.agents.iter().map(|a| a.id.clone()).collect();
        let matrix = FlowMatrix::new(ids, self.flows.clone())?;
        let tree = if self.agents.iter().any(|a| a.group_path.is_some()) {
            let specs: Vec<(String, Option<Vec<String>>)> = self
                .agents
                .iter()
                .map(|a| (a.id.clone(), a.group_path.clone()))
                .collect();
            Some(GroupTree::from_group_paths(&specs)?)
        } else {
            None
        };
        Ok((matrix, tree))
    }

    pub fn parse(bytes: &[u8], format: EconomyFormat) -> Result<Self, IoFormatError> {
        match format {
            EconomyFormat::Structured => parse_structured(bytes),
            EconomyFormat::DelimiterSeparated => parse_delimited(bytes),
        }
    }

    pub fn write(&self, format: EconomyFormat) -> Result<String, IoFormatError> {
        match format {
            EconomyFormat::Structured => {
                let mut s =
                    serde_json::to_string_pretty(self).expect("economy files always serialize");
                s.push('\n');
                Ok(s)
            }
            EconomyFormat::DelimiterSeparated => self.write_delimited(),
        }
    }

    fn write_delimited(&self) -> Result<String, IoFormatError> {
        let mut out = String::from("agent");
        for agent in &self.agents {
            if agent.id.contains([',', '\n', '\r']) {
                return Err(IoFormatError::UnwritableAgentId(agent.id.clone()));
            }
            out.push(',');
            out.push_str(&agent.id);
        }
        out.push('\n');
        for (agent, row) in self.agents.iter().zip(&self.flows) {
            out.push_str(&agent.id);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Parses and validates an economy in one step.
pub fn load_economy(
    bytes: &[u8],
    format: EconomyFormat,
) -> Result<(FlowMatrix, Option<GroupTree>), IoFormatError> {
    EconomyFile::parse(bytes, format)?.to_matrix()
}

/// Serializes a bare matrix (no taxonomy, no labels).
pub fn write_economy(m: &FlowMatrix, format: EconomyFormat) -> Result<String, IoFormatError> {
    EconomyFile::from_matrix(m).write(format)
}

fn parse_structured(bytes: &[u8]) -> Result<EconomyFile, IoFormatError> {
    serde_json::from_slice(bytes).map_err(|e| IoFormatError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn parse_delimited(bytes: &[u8]) -> Result<EconomyFile, IoFormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IoFormatError::Parse {
        line: 0,
        column: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut lines: Vec<&str> = text.lines().collect();
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    let header = lines.first().ok_or(IoFormatError::Parse {
        line: 1,
        column: 1,
        message: "empty input; expected an `agent,...` header row".into(),
    })?;
    let mut fields = header.split(',');
    if fields.next() != Some("agent") {
        return Err(IoFormatError::Parse {
            line: 1,
            column: 1,
            message: "header row must start with `agent`".into(),
        });
    }
    let ids: Vec<&str> = fields.collect();
    if ids.is_empty() {
        return Err(IoFormatError::Parse {
            line: 1,
            column: 2,
            message: "header row names no agents".into(),
        });
    }
    let n = ids.len();
    if lines.len() - 1 != n {
        return Err(IoFormatError::DimensionMismatch(format!(
            "{} data rows for {} agents",
            lines.len() - 1,
            n
        )));
    }
    let mut flows = Vec::with_capacity(n);
    for (row_index, line) in lines[1..].iter().enumerate() {
        let line_no = row_index + 2;
        let mut fields = line.split(',');
        let row_id = fields.next().unwrap_or("");
        if row_id != ids[row_index] {
            return Err(IoFormatError::Parse {
                line: line_no,
                column: 1,
                message: format!(
                    "row id `{row_id}` does not match header order (expected `{}`)",
                    ids[row_index]
                ),
            });
        }
        let values: Vec<&str> = fields.collect();
        if values.len() != n {
            return Err(IoFormatError::DimensionMismatch(format!(
                "row `{row_id}` has {} entries, expected {n}",
                values.len()
            )));
        }
        let mut row = Vec::with_capacity(n);
        for (col, raw) in values.iter().enumerate() {
            let v: f64 = raw.trim().parse().map_err(|e| IoFormatError::Parse {
                line: line_no,
                column: col + 2,
                message: format!("`{raw}` is not a number: {e}"),
            })?;
            row.push(v);
        }
        flows.push(row);
    }
    Ok(EconomyFile {
        agents: ids
            .into_iter()
            .map(|id| AgentSpec {
                id: id.to_string(),
                group_path: None,
            })
            .collect(),
        flows,
        currency_label: None,
        period_label: None,
    })
}
