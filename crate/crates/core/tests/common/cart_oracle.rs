//! Plain greedy Gini tree in f64, checked node by node against the fitted model.

use sigclass::cart::{Node, TreeModel, TreeParams};
use sigclass::ingest::{build_dataset, Dataset, FeatureVector, LabeledSample, Provenance};
use sigclass::{ClassCounts, SignalClass};

const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleNode {
    Leaf { counts: [u64; 3] },
    Split { feature: usize, threshold: f64, left: Box<OracleNode>, right: Box<OracleNode> },
}

fn gini(counts: &[u64; 3]) -> f64 {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn tally(rows: &[([f64; 3], usize)]) -> [u64; 3] {
    let mut c = [0u64; 3];
    for (_, l) in rows {
        c[*l] += 1;
    }
    c
}

pub fn oracle_fit(rows: &[([f64; 3], usize)], params: &TreeParams, depth: u32) -> OracleNode {
    let counts = tally(rows);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    let depth_ok = params.max_depth.is_none_or(|d| depth < d);
    if pure || !depth_ok || rows.len() < params.min_samples_split {
        return OracleNode::Leaf { counts };
    }
    let parent = gini(&counts);
    let n = rows.len() as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    for feature in 0..3 {
        let mut values: Vec<f64> = rows.iter().map(|(x, _)| x[feature]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let threshold = (w[0] + w[1]) / 2.0;
            let (left, right): (Vec<_>, Vec<_>) = rows.iter().cloned().partition(|(x, _)| x[feature] <= threshold);
            if left.len() < params.min_samples_leaf || right.len() < params.min_samples_leaf {
                continue;
            }
            let weighted = (left.len() as f64 * gini(&tally(&left)) + right.len() as f64 * gini(&tally(&right))) / n;
            let decrease = parent - weighted;
            if best.is_none_or(|(b, _, _)| decrease > b + TIE_TOLERANCE) {
                best = Some((decrease, feature, threshold));
            }
        }
    }
    match best {
        Some((decrease, feature, threshold))
            if decrease > TIE_TOLERANCE && decrease >= params.min_impurity_decrease - TIE_TOLERANCE =>
        {
            let (left, right): (Vec<_>, Vec<_>) = rows.iter().cloned().partition(|(x, _)| x[feature] <= threshold);
            OracleNode::Split {
                feature,
                threshold,
                left: Box::new(oracle_fit(&left, params, depth + 1)),
                right: Box::new(oracle_fit(&right, params, depth + 1)),
            }
        }
        _ => OracleNode::Leaf { counts },
    }
}

/// Describes the first difference between the model subtree at `at` and `oracle`.
pub fn compare(nodes: &[Node], at: usize, oracle: &OracleNode) -> Result<(), String> {
    match (&nodes[at], oracle) {
        (Node::Leaf { counts, predicted }, OracleNode::Leaf { counts: oc }) => {
            if counts.0 != *oc {
                return Err(format!("leaf {at}: counts {:?} vs oracle {:?}", counts.0, oc));
            }
            if *predicted != ClassCounts(*oc).majority() {
                return Err(format!("leaf {at}: predicted {predicted:?}"));
            }
            Ok(())
        }
        (Node::Split { feature, threshold, left, right }, OracleNode::Split { feature: of, threshold: ot, left: ol, right: or }) => {
            if feature != of || (threshold - ot).abs() > 1e-12 {
                return Err(format!("node {at}: split ({feature}, {threshold}) vs oracle ({of}, {ot})"));
            }
            compare(nodes, *left, ol)?;
            compare(nodes, *right, or)
        }
        (a, b) => Err(format!("node {at}: model {a:?} vs oracle {b:?}")),
    }
}

pub fn check_model(model: &TreeModel, rows: &[([f64; 3], usize)]) -> Result<(), String> {
    compare(model.nodes(), 0, &oracle_fit(rows, model.params(), 0))
}

pub fn dataset(rows: &[([f64; 3], usize)]) -> Dataset {
    build_dataset(
        rows.iter()
            .enumerate()
            .map(|(i, (x, l))| LabeledSample {
                features: FeatureVector::from_array(*x),
                label: SignalClass::from_index(*l).unwrap(),
                provenance: Provenance { scene_id: "S".into(), epoch: i as f64, sat_id: "G01".into(), lhcp_imputed: false },
            })
            .collect(),
        "T",
    )
}
