//! Typology induction from eigenvectors: sign classes, decision-tree
//! explanations, cross-prevalence tables and the markedness hierarchy.

mod labeling;
mod markedness;
mod prevalence;
mod tree;

pub use labeling::{
    classify_by_eigenvector, classify_by_sign, classify_components, classify_languages,
    ClassLabeling, Label, Thresholds, DEFAULT_MIN_FREQ, DEFAULT_NEUTRAL_FRACTION,
};
pub use markedness::{
    markedness_hierarchy, markedness_overlap, overlap_with_hierarchy, LanguageOverlap,
    MarkednessReport,
};
pub use prevalence::{
    cross_prevalence, cross_prevalence_via_matrix, CrossPrevalenceTable, PrevalenceCell,
};
pub use tree::{
    learn_tree, learn_tree_with, DecisionTree, Example, Rule, TreeConfig, TreeNode,
    DEFAULT_CONFIDENCE, DEFAULT_MIN_LEAF,
};

use crate::corpus::InventoryCorpus;
use crate::scalar::Scalar;

/// Tree training set from a consonant labeling: positive and negative nodes,
/// plus neutral ones when `include_neutral` is set.
pub fn training_examples<T: Scalar>(
    corpus: &InventoryCorpus,
    labeling: &ClassLabeling<T>,
    include_neutral: bool,
) -> Vec<Example> {
    labeling
        .node_ids
        .iter()
        .zip(&labeling.labels)
        .filter(|(_, &l)| {
            matches!(l, Label::Positive | Label::Negative)
                || (include_neutral && l == Label::Neutral)
        })
        .map(|(&id, &l)| Example::new(corpus.consonants()[id].features.bits().to_vec(), l))
        .collect()
}
