//! Spectral analysis of phoneme co-occurrence networks.
//!
//! The crate turns a phoneme-inventory corpus into a consonant × language
//! incidence matrix, projects it onto consonant and language co-occurrence
//! networks, decomposes those networks, and uses the leading eigenvectors to
//! induce typologies (sign classes, decision-tree explanations, cross-prevalence
//! tables and a markedness hierarchy). A frequency-preserving null model runs
//! the same analysis on randomized inventories as a control.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what the pipeline itself uses. Network weights are kept as
//! exact integers until they are handed to the eigensolver.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod netbuild;
pub mod nullmodel;
pub mod numfmt;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod spectra;
pub mod typology;

pub use corpus::{
    consonant_frequencies, load_corpus, save_corpus, synthesize_corpus, Consonant, FeatureCatalog,
    FeatureVector, FrequencyProfile, InventoryCorpus, Language, SynthConfig,
};
pub use error::{Error, ErrorCategory, Result};
pub use netbuild::{
    build_bipartite, project_langgraph, project_phonet, BipartiteMatrix, CooccurrenceNetwork,
    NetworkKind,
};
pub use nullmodel::{control_report, generate_random_corpus, ControlReport, NullModelConfig};
pub use scalar::Scalar;
pub use spectra::{
    bin_spectrum, eig_symmetric, eig_symmetric_oriented, eigvec_frequency_correlation,
    fit_power_law_tail, frobenius_fraction, BinnedSpectrum, CorrelationResult, PowerLawFit,
    Spectrum, SpectrumEnd,
};
pub use typology::{
    classify_by_eigenvector, classify_languages, cross_prevalence, learn_tree, markedness_overlap,
    ClassLabeling, CrossPrevalenceTable, DecisionTree, Label, MarkednessReport,
};

pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type BinnedSpectrum64 = BinnedSpectrum<f64>;
pub type PowerLawFit64 = PowerLawFit<f64>;
pub type CorrelationResult64 = CorrelationResult<f64>;
pub type ClassLabeling64 = ClassLabeling<f64>;
