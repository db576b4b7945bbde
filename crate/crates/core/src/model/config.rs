use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{make_hardcore, make_pointer_model, make_potts, Fugacity, GibbsModel, ModelError, Temperature};
use crate::graph::Graph;

/// Model family and parameters as written in a config file.
///
/// ```toml
/// model = "potts"
/// q = 7
/// beta = "inf"
/// epsilon = 0.1
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: String,
    #[serde(default)]
    pub q: Option<u32>,
    /// Fugacity as text so fractions (`"1/3"`) and exact decimals survive.
    #[serde(default)]
    pub lambda: Option<NumberText>,
    #[serde(default)]
    pub beta: Option<NumberText>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

/// A number that may be written as a TOML number or a string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Int(i64),
    Float(f64),
    Text(String),
}

impl NumberText {
    fn text(&self) -> String {
        match self {
            NumberText::Int(i) => i.to_string(),
            NumberText::Float(x) => x.to_string(),
            NumberText::Text(s) => s.clone(),
        }
    }
}

/// A validated model selection, independent of any graph.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Potts { q: u32, beta: Temperature },
    Hardcore { lambda: Fugacity },
    Pointer { beta: Temperature },
}

impl ModelConfig {
    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        toml::from_str(text).map_err(|e| ModelError::Config(e.to_string()))
    }

    fn temperature(&self) -> Result<Temperature, ModelError> {
        match (&self.beta, &self.lambda) {
            (Some(_), Some(_)) => Err(ModelError::Config("give either beta or lambda, not both".into())),
            (Some(b), None) => b.text().parse(),
            (None, Some(l)) => Ok(l.text().parse::<Fugacity>()?.beta()),
            (None, None) => Err(ModelError::Config("missing beta or lambda".into())),
        }
    }

    pub fn spec(&self) -> Result<ModelSpec, ModelError> {
        match self.model.as_str() {
            "potts" | "colorings" => {
                let q = self.q.ok_or_else(|| ModelError::Config("potts needs q".into()))?;
                if q == 0 {
                    return Err(ModelError::ZeroColors);
                }
                Ok(ModelSpec::Potts {
                    q,
                    beta: self.temperature()?,
                })
            }
            "hardcore" => {
                let lambda = match (&self.lambda, &self.beta) {
                    (Some(_), Some(_)) => {
                        return Err(ModelError::Config("give either beta or lambda, not both".into()))
                    }
                    (Some(l), None) => l.text().parse()?,
                    (None, Some(b)) => b.text().parse::<Temperature>()?.fugacity()?,
                    (None, None) => return Err(ModelError::Config("missing beta or lambda".into())),
                };
                Ok(ModelSpec::Hardcore { lambda })
            }
            "pointer" => Ok(ModelSpec::Pointer {
                beta: self.temperature()?,
            }),
            other => Err(ModelError::Config(format!("unknown model `{other}`"))),
        }
    }
}

impl ModelSpec {
    pub fn build(&self, graph: Arc<Graph>) -> Result<GibbsModel, ModelError> {
        match self {
            ModelSpec::Potts { q, beta } => make_potts(graph, *q, *beta),
            ModelSpec::Hardcore { lambda } => Ok(make_hardcore(graph, lambda.clone())),
            ModelSpec::Pointer { beta } => make_pointer_model(graph, *beta),
        }
    }
}
