use serde::{Deserialize, Serialize};

use super::tree::tree_digest;
use super::{CartError, Fingerprint, Node, Result, TreeModel, TreeParams};
use crate::ingest::FeatureVector;
use crate::SignalClass;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    params: TreeParams,
    class_order: Vec<SignalClass>,
    nodes: Vec<Node>,
    fingerprint: Fingerprint,
}

/// A model read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub model: TreeModel,
    /// The nodes no longer match the digest recorded at fit time.
    pub fingerprint_mismatch: bool,
}

pub fn save_model(model: &TreeModel) -> String {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        params: model.params,
        class_order: SignalClass::ALL.to_vec(),
        nodes: model.nodes.clone(),
        fingerprint: model.fingerprint.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("model serializes");
    out.push('\n');
    out
}

pub fn load_model(text: &str) -> Result<LoadedModel> {
    let corrupt = |m: String| CartError::CorruptModel(m);
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    match value.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == MODEL_FORMAT_VERSION as u64 => {}
        Some(v) => return Err(corrupt(format!("unsupported format_version {v}"))),
        None => return Err(corrupt("missing format_version".into())),
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
    if file.class_order != SignalClass::ALL {
        return Err(corrupt("class_order must be [\"NLOS\",\"LOS\",\"LOS+NLOS\"]".into()));
    }
    file.params.validate().map_err(|e| corrupt(e.to_string()))?;
    check_structure(&file.nodes, &file.params).map_err(corrupt)?;
    let fingerprint_mismatch = tree_digest(&file.params, &file.nodes) != file.fingerprint.tree_digest;
    Ok(LoadedModel {
        model: TreeModel { params: file.params, nodes: file.nodes, fingerprint: file.fingerprint },
        fingerprint_mismatch,
    })
}

/// Checks pre-order layout, reachable thresholds, depth and leaf invariants.
fn check_structure(nodes: &[Node], params: &TreeParams) -> std::result::Result<(), String> {
    if nodes.is_empty() {
        return Err("no nodes".into());
    }
    struct Walk<'a> {
        nodes: &'a [Node],
        params: &'a TreeParams,
        next: usize,
    }
    impl Walk<'_> {
        fn visit(&mut self, i: usize, depth: u32, bounds: &mut [(f64, f64); 3]) -> std::result::Result<(), String> {
            if i != self.next || i >= self.nodes.len() {
                return Err(format!("node {i} is not in pre-order position {}", self.next));
            }
            self.next += 1;
            match &self.nodes[i] {
                Node::Split { feature, threshold, left, right } => {
                    if self.params.max_depth.is_some_and(|d| depth >= d) {
                        return Err(format!("node {i} splits below max_depth"));
                    }
                    if *feature >= FeatureVector::COUNT {
                        return Err(format!("node {i}: feature index {feature} out of range"));
                    }
                    let (lo, hi) = bounds[*feature];
                    if !(threshold.is_finite() && *threshold > lo && *threshold < hi) {
                        return Err(format!("node {i}: threshold {threshold} leaves a child unreachable"));
                    }
                    if *left != i + 1 {
                        return Err(format!("node {i}: left child must follow its parent"));
                    }
                    bounds[*feature] = (lo, *threshold);
                    self.visit(*left, depth + 1, bounds)?;
                    bounds[*feature] = (*threshold, hi);
                    if *right != self.next {
                        return Err(format!("node {i}: right child {right} out of pre-order"));
                    }
                    self.visit(*right, depth + 1, bounds)?;
                    bounds[*feature] = (lo, hi);
                }
                Node::Leaf { counts, predicted } => {
                    if counts.total() == 0 || counts.total() < self.params.min_samples_leaf as u64 {
                        return Err(format!("leaf {i} holds {} samples", counts.total()));
                    }
                    if *predicted != counts.majority() {
                        return Err(format!("leaf {i} predicts {predicted}, majority is {}", counts.majority()));
                    }
                }
            }
            Ok(())
        }
    }
    let mut w = Walk { nodes, params, next: 0 };
    w.visit(0, 0, &mut [(f64::NEG_INFINITY, f64::INFINITY); 3])?;
    if w.next != nodes.len() {
        return Err(format!("{} unreachable nodes", nodes.len() - w.next));
    }
    Ok(())
}
