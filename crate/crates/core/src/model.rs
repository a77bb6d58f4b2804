//! Model JSON files: a traversal, its constants and the formulation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::expr::{ExprTree, Token};
use crate::mechanics::{Formulation, StressPredictor};
use crate::{Error, Result};

const BUILTIN: [(&str, &str); 7] = [
    ("eq11", include_str!("../../../data/models/eq11.json")),
    ("eq13", include_str!("../../../data/models/eq13.json")),
    ("eq14", include_str!("../../../data/models/eq14.json")),
    ("omega_eq15", include_str!("../../../data/models/omega_eq15.json")),
    ("kawabata1_eq16", include_str!("../../../data/models/kawabata1_eq16.json")),
    ("kawabata2_eq17", include_str!("../../../data/models/kawabata2_eq17.json")),
    ("kawabata3_eq18", include_str!("../../../data/models/kawabata3_eq18.json")),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub formulation: Formulation,
    pub traversal: Vec<Token>,
    pub constants: Vec<f64>,
    /// Infix rendering; informational only.
    pub display: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<serde_json::Value>,
}

impl ModelFile {
    pub fn from_tree(name: Option<String>, formulation: Formulation, tree: &ExprTree) -> Self {
        ModelFile {
            name,
            formulation,
            traversal: tree.tokens().to_vec(),
            constants: tree.constants().to_vec(),
            display: tree.to_infix(),
            manifest: None,
        }
    }

    pub fn tree(&self) -> Result<ExprTree> {
        ExprTree::new(self.traversal.clone(), self.constants.clone())
    }

    pub fn predictor(&self) -> Result<StressPredictor> {
        StressPredictor::build(&self.tree()?, self.formulation)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(s)?;
        m.predictor()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serialises");
        s.push('\n');
        s
    }

    /// Names of the bundled models.
    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(n, _)| *n).collect()
    }

    /// A bundled model by name, with or without the `.json` suffix.
    pub fn builtin(name: &str) -> Result<Self> {
        let stem = name.trim_end_matches(".json");
        let (_, text) = BUILTIN
            .iter()
            .find(|(n, _)| *n == stem)
            .ok_or_else(|| Error::Parse(format!("no built-in model `{name}`")))?;
        Self::from_json(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
