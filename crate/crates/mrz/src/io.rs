//! JSON formats for trees, variables and chains.
//!
//! ```text
//! tree:     {"levels": [[{"p": 1.0, "parent": -1}], [{"p": 0.5, "parent": 0}, ...], ...]}
//! variable: {"level": 1, "values": [2.0, 0.0]}
//! chain:    {"d": [1.0, 0.5, 0.25]}
//! ```

use std::fs;
use std::path::Path;
use std::sync::Arc;

use mrz_core::counterexample::ChainSpec;
use mrz_core::{Atom, FiltrationTree, RandomVariable, TreeViolation};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDoc {
    pub p: f64,
    pub parent: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub levels: Vec<Vec<AtomDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDoc {
    pub level: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDoc {
    pub d: Vec<f64>,
}

impl TreeDoc {
    pub fn from_tree(tree: &FiltrationTree) -> Self {
        let levels = tree
            .levels()
            .iter()
            .enumerate()
            .map(|(n, level)| {
                level
                    .iter()
                    .map(|a| AtomDoc {
                        p: a.prob,
                        parent: if n == 0 { -1 } else { a.parent as i64 },
                    })
                    .collect()
            })
            .collect();
        Self { levels }
    }

    /// Validates every invariant and reports the first one violated.
    pub fn into_tree(self) -> Result<FiltrationTree, TreeViolation> {
        let mut levels = Vec::with_capacity(self.levels.len());
        for (n, level) in self.levels.into_iter().enumerate() {
            let mut atoms = Vec::with_capacity(level.len());
            for (i, a) in level.into_iter().enumerate() {
                let parent = match (n, a.parent) {
                    (0, -1) => 0,
                    (0, _) | (_, i64::MIN..=-1) => {
                        return Err(TreeViolation::ParentOutOfRange {
                            level: n,
                            atom: i,
                            parent: a.parent.unsigned_abs() as usize,
                        })
                    }
                    (_, p) => p as usize,
                };
                atoms.push(Atom::new(a.p, parent));
            }
            levels.push(atoms);
        }
        FiltrationTree::new(levels)
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> CliResult<T> {
    if text.trim().is_empty() {
        return Err(CliError::Usage(format!("{} is empty", path.display())));
    }
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_tree(text: &str) -> CliResult<FiltrationTree> {
    parse::<TreeDoc>(Path::new("<tree>"), text)?
        .into_tree()
        .map_err(|v| CliError::Check(format!("invalid tree: {v}")))
}

pub fn read_tree(path: &Path) -> CliResult<FiltrationTree> {
    parse::<TreeDoc>(path, &read(path)?)?
        .into_tree()
        .map_err(|v| CliError::Check(format!("{}: invalid tree: {v}", path.display())))
}

pub fn read_variable(path: &Path, tree: Arc<FiltrationTree>) -> CliResult<RandomVariable> {
    let doc: VariableDoc = parse(path, &read(path)?)?;
    RandomVariable::new(tree, doc.level, doc.values)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn read_chain(path: &Path) -> CliResult<ChainSpec> {
    let doc: ChainDoc = parse(path, &read(path)?)?;
    ChainSpec::new(doc.d).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn tree_json(tree: &FiltrationTree) -> String {
    serde_json::to_string_pretty(&TreeDoc::from_tree(tree)).expect("tree documents always serialize")
}

pub fn variable_json(f: &RandomVariable) -> String {
    let doc = VariableDoc {
        level: f.level(),
        values: f.values().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("variable documents always serialize")
}

pub fn chain_json(spec: &ChainSpec) -> String {
    serde_json::to_string_pretty(&ChainDoc { d: spec.probs().to_vec() }).expect("chain documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_round_trip() {
        let mut rng = mrz_core::rng::stream(1, 0);
        let tree = FiltrationTree::random(&mut rng, 4, 3);
        assert_eq!(parse_tree(&tree_json(&tree)).unwrap(), tree);
    }

    #[test]
    fn chain_round_trip() {
        let spec = ChainSpec::dyadic(7).unwrap();
        let doc: ChainDoc = serde_json::from_str(&chain_json(&spec)).unwrap();
        assert_eq!(ChainSpec::new(doc.d).unwrap(), spec);
        let tree = mrz_core::build_chain(&spec).unwrap();
        assert_eq!(parse_tree(&tree_json(&tree)).unwrap(), tree);
    }

    #[test]
    fn names_the_broken_invariant() {
        let text = r#"{"levels": [[{"p": 1.0, "parent": -1}], [{"p": 0.5, "parent": 0}, {"p": 0.4, "parent": 0}]]}"#;
        let err = parse_tree(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("probability-conservation"), "{err}");

        let rootless = r#"{"levels": [[{"p": 1.0, "parent": 0}]]}"#;
        assert!(parse_tree(rootless).unwrap_err().to_string().contains("parent"));
    }

    #[test]
    fn malformed_json_is_a_usage_error() {
        assert_eq!(parse_tree("{").unwrap_err().exit_code(), 1);
        assert_eq!(parse_tree("  ").unwrap_err().exit_code(), 1);
    }
}
