//! Decision trees over binary features, split by information gain ratio.
//!
//! Induction follows C4.5 for discrete two-valued attributes: among the
//! admissible splits whose gain is at least the average gain, the highest
//! gain ratio wins, ties going to the lowest feature id. A split is admissible
//! when both branches receive at least `min_leaf` examples.
//!
//! Grown trees are then pruned bottom-up by C4.5's pessimistic error estimate
//! (subtree replacement, confidence factor 0.25): a split is replaced by a
//! leaf when the leaf's estimated errors do not exceed the subtree's by more
//! than 0.1. Subtree raising is not performed. [`TreeConfig::unpruned`] keeps
//! every split.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::typology::Label;

pub const DEFAULT_MIN_LEAF: usize = 2;

/// C4.5 default confidence factor for pessimistic pruning.
pub const DEFAULT_CONFIDENCE: f64 = 0.25;

/// Standard normal quantile at `1 - DEFAULT_CONFIDENCE`.
const Z_DEFAULT_CONFIDENCE: f64 = 0.674_489_750_196_081_7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub min_leaf: usize,
    pub prune: bool,
}

impl TreeConfig {
    pub fn new(min_leaf: usize) -> Self {
        Self {
            min_leaf,
            prune: true,
        }
    }

    pub fn unpruned(min_leaf: usize) -> Self {
        Self {
            min_leaf,
            prune: false,
        }
    }
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self::new(DEFAULT_MIN_LEAF)
    }
}

/// Extra errors C4.5 expects at a leaf covering `n` examples with `e`
/// training errors, at the default confidence factor.
fn added_errors(n: f64, e: f64) -> f64 {
    let cf = DEFAULT_CONFIDENCE;
    if e < 1e-6 {
        n * (1.0 - (cf.ln() / n).exp())
    } else if e < 0.9999 {
        let v0 = n * (1.0 - (cf.ln() / n).exp());
        v0 + e * (added_errors(n, 1.0) - v0)
    } else if e + 0.5 >= n {
        0.67 * (n - e)
    } else {
        let z2 = Z_DEFAULT_CONFIDENCE * Z_DEFAULT_CONFIDENCE;
        let f = e + 0.5;
        let upper = (f + z2 / 2.0 + (z2 * (f * (1.0 - f / n) + z2 / 4.0)).sqrt()) / (n + z2);
        n * upper - e
    }
}

const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub features: Vec<bool>,
    pub class: Label,
}

impl Example {
    pub fn new(features: Vec<bool>, class: Label) -> Self {
        Self { features, class }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreeNode {
    Split {
        feature: usize,
        /// Child for examples lacking the feature.
        absent: usize,
        /// Child for examples having the feature.
        present: usize,
        count: usize,
        gain_ratio: f64,
    },
    Leaf {
        class: Label,
        count: usize,
        errors: usize,
    },
}

/// A root-to-leaf path: conjunction of feature literals implying a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    /// `(feature, required value)` in root-to-leaf order.
    pub conditions: Vec<(usize, bool)>,
    pub class: Label,
    pub support: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    n_features: usize,
    n_examples: usize,
    training_errors: usize,
    min_leaf: usize,
    pruned: bool,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_examples(&self) -> usize {
        self.n_examples
    }

    pub fn min_leaf(&self) -> usize {
        self.min_leaf
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.len() - self.n_leaves()
    }

    /// Misclassified training examples over all training examples.
    pub fn training_error(&self) -> f64 {
        self.training_errors as f64 / self.n_examples as f64
    }

    pub fn training_errors(&self) -> usize {
        self.training_errors
    }

    /// Index of the leaf an example reaches.
    pub fn leaf_index(&self, features: &[bool]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Split {
                    feature,
                    absent,
                    present,
                    ..
                } => at = if features[feature] { present } else { absent },
                TreeNode::Leaf { .. } => return at,
            }
        }
    }

    pub fn predict(&self, features: &[bool]) -> Label {
        match self.nodes[self.leaf_index(features)] {
            TreeNode::Leaf { class, .. } => class,
            TreeNode::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }

    pub fn rules(&self) -> Vec<Rule> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_rules(0, &mut path, &mut out);
        out
    }

    fn collect_rules(&self, at: usize, path: &mut Vec<(usize, bool)>, out: &mut Vec<Rule>) {
        match self.nodes[at] {
            TreeNode::Split {
                feature,
                absent,
                present,
                ..
            } => {
                path.push((feature, true));
                self.collect_rules(present, path, out);
                path.pop();
                path.push((feature, false));
                self.collect_rules(absent, path, out);
                path.pop();
            }
            TreeNode::Leaf {
                class,
                count,
                errors,
            } => out.push(Rule {
                conditions: path.clone(),
                class,
                support: count,
                errors,
            }),
        }
    }

    /// Indented tree followed by the flat rule list.
    pub fn render_text(&self, feature_names: &[String]) -> String {
        let name = |f: usize| feature_names.get(f).cloned().unwrap_or_else(|| format!("f{f}"));
        let mut out = String::new();
        writeln!(
            out,
            "training examples: {}  errors: {}  training error: {:.4}  pruned: {}",
            self.n_examples,
            self.training_errors,
            self.training_error(),
            if self.pruned { "yes" } else { "no" }
        )
        .unwrap();
        writeln!(out).unwrap();
        self.render_node(0, 0, &name, &mut out);
        writeln!(out).unwrap();
        writeln!(out, "rules:").unwrap();
        for rule in self.rules() {
            let lhs = if rule.conditions.is_empty() {
                "(always)".to_string()
            } else {
                rule.conditions
                    .iter()
                    .map(|&(f, v)| format!("{} = {}", name(f), u8::from(v)))
                    .collect::<Vec<_>>()
                    .join(" AND ")
            };
            writeln!(
                out,
                "{lhs} => {}  [support {}, errors {}]",
                rule.class, rule.support, rule.errors
            )
            .unwrap();
        }
        out
    }

    fn render_node(&self, at: usize, depth: usize, name: &dyn Fn(usize) -> String, out: &mut String) {
        let indent = "|   ".repeat(depth);
        match self.nodes[at] {
            TreeNode::Leaf {
                class,
                count,
                errors,
            } => {
                writeln!(out, "{indent}{class} ({count}/{errors})").unwrap();
            }
            TreeNode::Split {
                feature,
                absent,
                present,
                ..
            } => {
                for (value, child) in [(1, present), (0, absent)] {
                    match self.nodes[child] {
                        TreeNode::Leaf {
                            class,
                            count,
                            errors,
                        } => writeln!(
                            out,
                            "{indent}{} = {value}: {class} ({count}/{errors})",
                            name(feature)
                        )
                        .unwrap(),
                        TreeNode::Split { .. } => {
                            writeln!(out, "{indent}{} = {value}:", name(feature)).unwrap();
                            self.render_node(child, depth + 1, name, out);
                        }
                    }
                }
            }
        }
    }

    /// Structured form: node list, feature names, rules and counts.
    pub fn to_json(&self, feature_names: &[String]) -> serde_json::Value {
        serde_json::json!({
            "feature_names": feature_names,
            "n_examples": self.n_examples,
            "training_errors": self.training_errors,
            "training_error": self.training_error(),
            "min_leaf": self.min_leaf,
            "pruned": self.pruned,
            "nodes": self.nodes,
            "rules": self.rules(),
        })
    }
}

fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

struct Builder<'a> {
    examples: &'a [Example],
    classes: Vec<Label>,
    n_features: usize,
    min_leaf: usize,
    prune: bool,
    nodes: Vec<TreeNode>,
}

/// Node index, training errors and pessimistic error estimate of a subtree.
struct Grown {
    at: usize,
    errors: usize,
    estimate: f64,
}

impl Builder<'_> {
    fn class_counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &i in idx {
            let c = self.classes.binary_search(&self.examples[i].class).expect("known class");
            counts[c] += 1;
        }
        counts
    }

    /// Majority class; ties go to the class that sorts first.
    fn majority(&self, counts: &[usize]) -> (Label, usize) {
        let (best, &n) = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("at least one class");
        (self.classes[best], n)
    }

    fn leaf(&mut self, counts: &[usize]) -> Grown {
        let (class, n) = self.majority(counts);
        let count: usize = counts.iter().sum();
        let errors = count - n;
        self.nodes.push(TreeNode::Leaf {
            class,
            count,
            errors,
        });
        Grown {
            at: self.nodes.len() - 1,
            errors,
            estimate: errors as f64 + added_errors(count as f64, errors as f64),
        }
    }

    fn grow(&mut self, idx: Vec<usize>) -> Grown {
        let counts = self.class_counts(&idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || idx.len() < 2 * self.min_leaf {
            return self.leaf(&counts);
        }

        let base = entropy(&counts);
        let total = idx.len() as f64;
        // (feature, gain, gain ratio) for admissible splits.
        let mut candidates = Vec::new();
        for f in 0..self.n_features {
            let (present, absent): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| self.examples[i].features[f]);
            if present.len() < self.min_leaf || absent.len() < self.min_leaf {
                continue;
            }
            let (np, na) = (present.len() as f64, absent.len() as f64);
            let cond = np / total * entropy(&self.class_counts(&present))
                + na / total * entropy(&self.class_counts(&absent));
            let gain = base - cond;
            let split_info = entropy(&[present.len(), absent.len()]);
            candidates.push((f, gain, gain / split_info));
        }
        if candidates.is_empty() {
            return self.leaf(&counts);
        }
        let mean_gain = candidates.iter().map(|c| c.1).sum::<f64>() / candidates.len() as f64;
        let mut best: Option<(usize, f64)> = None;
        for &(f, gain, ratio) in &candidates {
            if gain <= GAIN_EPS || gain < mean_gain - GAIN_EPS {
                continue;
            }
            if best.is_none_or(|(_, r)| ratio > r + GAIN_EPS) {
                best = Some((f, ratio));
            }
        }
        let Some((feature, gain_ratio)) = best else {
            return self.leaf(&counts);
        };

        let (present, absent): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.examples[i].features[feature]);
        let at = self.nodes.len();
        self.nodes.push(TreeNode::Split {
            feature,
            absent: 0,
            present: 0,
            count: idx.len(),
            gain_ratio,
        });
        let p = self.grow(present);
        let a = self.grow(absent);
        if let TreeNode::Split {
            absent, present, ..
        } = &mut self.nodes[at]
        {
            *absent = a.at;
            *present = p.at;
        }
        let subtree = Grown {
            at,
            errors: p.errors + a.errors,
            estimate: p.estimate + a.estimate,
        };
        if self.prune {
            // Children were pushed after `at`, so truncating drops the subtree.
            let (_, n) = self.majority(&counts);
            let leaf_errors = (idx.len() - n) as f64;
            let leaf_estimate = leaf_errors + added_errors(idx.len() as f64, leaf_errors);
            if leaf_estimate <= subtree.estimate + 0.1 {
                self.nodes.truncate(at);
                return self.leaf(&counts);
            }
        }
        subtree
    }
}

/// Learns a pruned tree from labelled binary feature vectors. `min_leaf` is
/// the smallest branch a split may create (values below 1 are treated as 1).
pub fn learn_tree(examples: &[Example], min_leaf: usize) -> Result<DecisionTree> {
    learn_tree_with(examples, &TreeConfig::new(min_leaf))
}

pub fn learn_tree_with(examples: &[Example], config: &TreeConfig) -> Result<DecisionTree> {
    if examples.len() < 2 {
        return Err(Error::Insufficient(format!(
            "decision tree needs at least 2 examples, got {}",
            examples.len()
        )));
    }
    let n_features = examples[0].features.len();
    if n_features == 0 {
        return Err(Error::InvalidArgument("empty feature set".into()));
    }
    if let Some(e) = examples.iter().find(|e| e.features.len() != n_features) {
        return Err(Error::InvalidArgument(format!(
            "feature vectors differ in length ({} vs {n_features})",
            e.features.len()
        )));
    }
    let mut classes: Vec<Label> = examples.iter().map(|e| e.class).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Insufficient(format!(
            "all training examples belong to class {}",
            classes[0]
        )));
    }

    let min_leaf = config.min_leaf.max(1);
    let mut builder = Builder {
        examples,
        classes,
        n_features,
        min_leaf,
        prune: config.prune,
        nodes: Vec::new(),
    };
    let root = builder.grow((0..examples.len()).collect());
    Ok(DecisionTree {
        nodes: builder.nodes,
        n_features,
        n_examples: examples.len(),
        training_errors: root.errors,
        min_leaf,
        pruned: config.prune,
    })
}
