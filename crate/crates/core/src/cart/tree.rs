use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::split::best_split_rows;
use super::{CartError, Result, TreeParams};
use crate::ingest::{Dataset, FeatureVector};
use crate::{ClassCounts, SignalClass};

/// One node of the pre-order node array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { counts: ClassCounts, predicted: SignalClass },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    /// SHA-256 over the training samples' features and labels, order-free.
    pub dataset_hash: String,
    pub seed: Option<u64>,
    /// SHA-256 over params and nodes as fitted.
    pub tree_digest: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub(super) params: TreeParams,
    pub(super) nodes: Vec<Node>,
    pub(super) fingerprint: Fingerprint,
}

impl TreeModel {
    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    /// Records the run seed in the fingerprint.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.fingerprint.seed = Some(seed);
        self
    }

    pub fn predict(&self, features: &FeatureVector) -> SignalClass {
        self.predict_row(&features.to_array())
    }

    pub(crate) fn predict_row(&self, row: &[f64; 3]) -> SignalClass {
        route(&self.nodes, row)
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Descends from the root; `<=` goes left.
pub(super) fn route(nodes: &[Node], row: &[f64; 3]) -> SignalClass {
    let mut i = 0;
    loop {
        match &nodes[i] {
            Node::Split { feature, threshold, left, right } => {
                i = if row[*feature] <= *threshold { *left } else { *right };
            }
            Node::Leaf { predicted, .. } => return *predicted,
        }
    }
}

pub(super) fn tree_digest(params: &TreeParams, nodes: &[Node]) -> String {
    let body = serde_json::to_vec(&(params, nodes)).expect("tree serializes");
    hex(&Sha256::digest(body))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Order-independent hash of a dataset's features and labels.
pub fn dataset_fingerprint(dataset: &Dataset) -> String {
    let mut lines: Vec<String> = dataset
        .samples()
        .iter()
        .map(|s| {
            let [a, b, c] = s.features.to_array();
            format!("{:016x}{:016x}{:016x}{}", a.to_bits(), b.to_bits(), c.to_bits(), s.label.index())
        })
        .collect();
    lines.sort_unstable();
    let mut h = Sha256::new();
    for l in &lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    hex(&h.finalize())
}

struct Builder<'a> {
    rows: &'a [[f64; 3]],
    labels: &'a [u8],
    params: &'a TreeParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, indices: &mut [usize], depth: u32) -> usize {
        let mut counts = ClassCounts::default();
        for &i in indices.iter() {
            counts.0[self.labels[i] as usize] += 1;
        }
        let at = self.nodes.len();
        let can_split = self.params.max_depth.is_none_or(|d| depth < d)
            && indices.len() >= self.params.min_samples_split
            && !counts.is_pure();
        let split = if can_split { best_split_rows(self.rows, self.labels, indices, self.params) } else { None };
        let Some(split) = split else {
            self.nodes.push(Node::Leaf { counts, predicted: counts.majority() });
            return at;
        };
        self.nodes.push(Node::Split { feature: split.feature, threshold: split.threshold, left: 0, right: 0 });
        let rows = self.rows;
        let mid = partition(indices, |i| rows[i][split.feature] <= split.threshold);
        let (lo, hi) = indices.split_at_mut(mid);
        let left = self.grow(lo, depth + 1);
        let right = self.grow(hi, depth + 1);
        if let Node::Split { left: l, right: r, .. } = &mut self.nodes[at] {
            *l = left;
            *r = right;
        }
        at
    }
}

fn partition(v: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let mut k = 0;
    for j in 0..v.len() {
        if pred(v[j]) {
            v.swap(k, j);
            k += 1;
        }
    }
    k
}

pub(crate) fn fit_rows(rows: &[[f64; 3]], labels: &[u8], params: &TreeParams) -> Vec<Node> {
    let mut indices: Vec<usize> = (0..rows.len()).collect();
    let mut b = Builder { rows, labels, params, nodes: Vec::new() };
    b.grow(&mut indices, 0);
    b.nodes
}

/// Greedy recursive binary partitioning with Gini impurity.
pub fn fit(dataset: &Dataset, params: &TreeParams) -> Result<TreeModel> {
    params.validate()?;
    if dataset.is_empty() {
        return Err(CartError::EmptyDataset);
    }
    let rows: Vec<[f64; 3]> = dataset.samples().iter().map(|s| s.features.to_array()).collect();
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CartError::InvalidParameter("non-finite feature value".into()));
    }
    let labels: Vec<u8> = dataset.samples().iter().map(|s| s.label.index() as u8).collect();
    let nodes = fit_rows(&rows, &labels, params);
    let fingerprint =
        Fingerprint { dataset_hash: dataset_fingerprint(dataset), seed: None, tree_digest: tree_digest(params, &nodes) };
    Ok(TreeModel { params: *params, nodes, fingerprint })
}
