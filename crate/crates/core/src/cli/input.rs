//! Parameter files and flag values.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fitting::MomentData;
use crate::theta::{SiegelMatrix, ThetaPoint};

use super::CliError;

/// Contents of a `--params` file. Complex numbers are `[re, im]` pairs and
/// `B` is given row by row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<[f64; 2]>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<Vec<i64>>>,
}

fn input(field: &str, message: impl Into<String>) -> CliError {
    CliError::Input {
        error: "InvalidInput",
        field: Some(field.to_string()),
        message: message.into(),
    }
}

/// Library validation errors, attributed to the field they concern.
fn attribute(field: &str, e: Error) -> CliError {
    let message = match &e {
        Error::NotSymmetric { row, col } => format!("{field} is not symmetric at ({row}, {col})"),
        other => other.to_string(),
    };
    CliError::Input {
        error: e.name(),
        field: Some(field.to_string()),
        message,
    }
}

impl ParamsFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input("params", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            // serde reports unknown keys as "unknown field `x`".
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field"))
                .unwrap_or("params");
            input(field, msg.clone())
        })
    }

    fn matrix(&self) -> Result<SiegelMatrix, CliError> {
        let rows = self.b.as_ref().ok_or_else(|| input("B", "B is required"))?;
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        if let Some(g) = self.g {
            if rows.len() != g {
                return Err(input("B", format!("B has {} rows but g = {g}", rows.len())));
            }
        }
        if rows.is_empty() {
            return Err(input("B", "B is empty"));
        }
        SiegelMatrix::from_rows(&rows).map_err(|e| attribute("B", e))
    }

    /// `(u, B)`; `u` defaults to zero when `require_u` is false.
    pub fn point(&self, require_u: bool) -> Result<ThetaPoint, CliError> {
        let b = self.matrix()?;
        let u: Vec<Complex64> = match &self.u {
            Some(u) => u.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
            None if require_u => return Err(input("u", "u is required")),
            None => vec![Complex64::new(0.0, 0.0); b.dim()],
        };
        if u.len() != b.dim() {
            return Err(input(
                "u",
                format!("u has length {} but g = {}", u.len(), b.dim()),
            ));
        }
        ThetaPoint::new(u, b).map_err(|e| attribute("u", e))
    }

    pub fn points(&self, g: usize) -> Result<Vec<Vec<i64>>, CliError> {
        let pts = self
            .points
            .clone()
            .ok_or_else(|| input("points", "points are required"))?;
        if let Some(bad) = pts.iter().find(|p| p.len() != g) {
            return Err(input(
                "points",
                format!("point {bad:?} does not have length {g}"),
            ));
        }
        Ok(pts)
    }
}

pub fn parse_json_flag<T: serde::de::DeserializeOwned>(
    field: &str,
    text: &str,
) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| input(field, format!("malformed --{field}: {e}")))
}

pub fn moment_data(mu: Vec<f64>, sigma: Vec<Vec<f64>>) -> Result<MomentData, CliError> {
    if sigma.len() != mu.len() || sigma.iter().any(|r| r.len() != mu.len()) {
        return Err(input(
            "sigma",
            "sigma must be a g x g matrix with g = len(mu)",
        ));
    }
    MomentData::new(mu, sigma).map_err(|e| attribute("sigma", e))
}
