//! Frequency-preserving randomized inventories and the control comparison.
//!
//! Each consonant `c` is packed into `f_c` distinct language bins chosen
//! uniformly without replacement (partial Fisher–Yates over the bin indices,
//! see [`crate::rng`]). Replicate `r` of a run with master seed `s` uses the
//! stream seeded by [`crate::rng::derive_seed`]`(s, r)`, so replicates are
//! independent of execution order.

use std::io::Write;

use crate::corpus::{consonant_frequencies, Consonant, FeatureCatalog, InventoryCorpus, Language};
use crate::error::{Error, Result};
use crate::netbuild::{build_bipartite, project_langgraph, project_phonet};
use crate::numfmt::sig12;
use crate::rng;
use crate::spectra::{eig_symmetric_oriented, eigvec_frequency_correlation, DEFAULT_EIG_TOL};
use crate::typology::{
    classify_by_eigenvector, classify_languages, cross_prevalence, learn_tree_with, training_examples,
    Label, TreeConfig, DEFAULT_MIN_FREQ, DEFAULT_MIN_LEAF, DEFAULT_NEUTRAL_FRACTION,
};

pub const DEFAULT_REPLICATES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullModelConfig {
    pub seed: u64,
    pub n_replicates: usize,
    pub source_frequencies: Vec<u64>,
    pub n_languages: usize,
}

impl NullModelConfig {
    pub fn from_corpus(corpus: &InventoryCorpus, seed: u64, n_replicates: usize) -> Self {
        Self {
            seed,
            n_replicates,
            source_frequencies: consonant_frequencies(corpus),
            n_languages: corpus.n_languages(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_languages == 0 {
            return Err(Error::InvalidArgument("null model needs at least one language".into()));
        }
        if let Some((c, f)) = self
            .source_frequencies
            .iter()
            .enumerate()
            .find(|(_, &f)| f > self.n_languages as u64)
        {
            return Err(Error::InvalidArgument(format!(
                "consonant {c} has frequency {f} but there are only {} languages",
                self.n_languages
            )));
        }
        Ok(())
    }

    pub fn replicate_seed(&self, replicate: usize) -> u64 {
        rng::derive_seed(self.seed, replicate as u64)
    }
}

/// One randomized corpus drawn with `config.seed` itself. Languages that
/// receive no consonant are kept.
pub fn generate_random_corpus(
    config: &NullModelConfig,
    catalog: &FeatureCatalog,
    consonants: &[Consonant],
) -> Result<InventoryCorpus> {
    generate_with_seed(config, catalog, consonants, config.seed)
}

/// Replicate `replicate` of a control run.
pub fn generate_replicate(
    config: &NullModelConfig,
    catalog: &FeatureCatalog,
    consonants: &[Consonant],
    replicate: usize,
) -> Result<InventoryCorpus> {
    generate_with_seed(config, catalog, consonants, config.replicate_seed(replicate))
}

fn generate_with_seed(
    config: &NullModelConfig,
    catalog: &FeatureCatalog,
    consonants: &[Consonant],
    seed: u64,
) -> Result<InventoryCorpus> {
    config.validate()?;
    if consonants.len() != config.source_frequencies.len() {
        return Err(Error::InvalidArgument(format!(
            "{} consonants but {} source frequencies",
            consonants.len(),
            config.source_frequencies.len()
        )));
    }
    let mut stream = rng::seeded(seed);
    let mut scratch = Vec::with_capacity(config.n_languages);
    let inventories = crate::corpus::place(
        &mut stream,
        &config.source_frequencies,
        config.n_languages,
        &mut scratch,
    );
    let languages = inventories
        .into_iter()
        .enumerate()
        .map(|(id, inventory)| Language {
            id,
            name: format!("R{id}"),
            inventory,
        })
        .collect();
    InventoryCorpus::with_empty_languages(catalog.clone(), consonants.to_vec(), languages)
}

/// Parameters of the downstream analysis run on each replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    pub min_freq: u64,
    pub neutral_fraction: f64,
    pub eig_tol: f64,
    pub min_leaf: usize,
    pub prune: bool,
    pub include_neutral: bool,
    /// 0-based eigenvector indices examined by the classification experiments.
    pub eigvec_indices: Vec<usize>,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            min_freq: DEFAULT_MIN_FREQ,
            neutral_fraction: DEFAULT_NEUTRAL_FRACTION,
            eig_tol: DEFAULT_EIG_TOL,
            min_leaf: DEFAULT_MIN_LEAF,
            prune: true,
            include_neutral: false,
            eigvec_indices: vec![1, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigvecMetrics {
    /// 0-based eigenvector index.
    pub index: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub n_neutral: usize,
    pub n_excluded: usize,
    pub tree_error: Option<f64>,
    pub n_leaves: Option<usize>,
    pub cross_prevalence: Option<[Option<f64>; 4]>,
    /// Why a metric is missing, if one is.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateMetrics {
    pub replicate: usize,
    pub seed: u64,
    pub empty_languages: usize,
    pub principal_correlation: f64,
    pub eigvecs: Vec<EigvecMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self {
            n,
            mean,
            sd,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlReport {
    pub replicates: Vec<ReplicateMetrics>,
    pub eigvec_indices: Vec<usize>,
}

impl ControlReport {
    pub fn principal_correlation(&self) -> Option<Aggregate> {
        let v: Vec<f64> = self.replicates.iter().map(|r| r.principal_correlation).collect();
        Aggregate::of(&v)
    }

    fn per_eigvec(&self, index: usize, pick: impl Fn(&EigvecMetrics) -> Option<f64>) -> Vec<f64> {
        self.replicates
            .iter()
            .filter_map(|r| r.eigvecs.iter().find(|e| e.index == index).and_then(&pick))
            .collect()
    }

    pub fn tree_error(&self, index: usize) -> Option<Aggregate> {
        Aggregate::of(&self.per_eigvec(index, |e| e.tree_error))
    }

    pub fn write_replicates_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "replicate,seed,empty_languages,principal_correlation,eigvec,n_positive,n_negative,n_neutral,n_excluded,tree_error,n_leaves,lp_cp,lp_cn,ln_cp,ln_cn,note"
        )?;
        let opt = |v: Option<f64>| v.map_or_else(String::new, sig12);
        for r in &self.replicates {
            for e in &r.eigvecs {
                let cp = e.cross_prevalence.unwrap_or([None; 4]);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.replicate,
                    r.seed,
                    r.empty_languages,
                    sig12(r.principal_correlation),
                    e.index + 1,
                    e.n_positive,
                    e.n_negative,
                    e.n_neutral,
                    e.n_excluded,
                    opt(e.tree_error),
                    e.n_leaves.map_or_else(String::new, |n| n.to_string()),
                    opt(cp[0]),
                    opt(cp[1]),
                    opt(cp[2]),
                    opt(cp[3]),
                    e.note.as_deref().unwrap_or("").replace(',', ";"),
                )?;
            }
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let line = |name: &str, agg: Option<Aggregate>| match agg {
            Some(a) => format!(
                "{name}: mean {} sd {} min {} max {} (n = {})",
                sig12(a.mean),
                sig12(a.sd),
                sig12(a.min),
                sig12(a.max),
                a.n
            ),
            None => format!("{name}: undefined"),
        };
        writeln!(out, "replicates: {}", self.replicates.len())?;
        writeln!(out, "{}", line("principal eigenvector vs frequency r", self.principal_correlation()))?;
        for &idx in &self.eigvec_indices {
            writeln!(
                out,
                "{}",
                line(&format!("eigenvector {} tree training error", idx + 1), self.tree_error(idx))
            )?;
            for (k, cell) in ["(L+,C+)", "(L+,C-)", "(L-,C+)", "(L-,C-)"].iter().enumerate() {
                let vals = self.per_eigvec(idx, |e| e.cross_prevalence.and_then(|q| q[k]));
                writeln!(
                    out,
                    "{}",
                    line(&format!("eigenvector {} cross-prevalence {cell}", idx + 1), Aggregate::of(&vals))
                )?;
            }
        }
        Ok(())
    }
}

fn analyze_replicate(
    corpus: &InventoryCorpus,
    params: &PipelineParams,
    replicate: usize,
    seed: u64,
) -> Result<ReplicateMetrics> {
    let a = build_bipartite(corpus);
    let phonet = project_phonet(&a);
    let freq = phonet.removed_diagonal().to_vec();
    let freq_f: Vec<f64> = phonet.removed_diagonal_float();
    let spectrum = eig_symmetric_oriented(phonet.to_float::<f64>().view(), params.eig_tol, &freq_f)?;
    let principal_correlation = eigvec_frequency_correlation(&spectrum, 0, &freq_f)?.r;

    let langgraph = project_langgraph(&a);
    let lang_spectrum = eig_symmetric_oriented(
        langgraph.to_float::<f64>().view(),
        params.eig_tol,
        &langgraph.removed_diagonal_float::<f64>(),
    )?;

    let mut eigvecs = Vec::new();
    for &index in &params.eigvec_indices {
        let mut m = EigvecMetrics {
            index,
            n_positive: 0,
            n_negative: 0,
            n_neutral: 0,
            n_excluded: 0,
            tree_error: None,
            n_leaves: None,
            cross_prevalence: None,
            note: None,
        };
        let labels = match classify_by_eigenvector(
            &spectrum,
            index,
            &freq,
            params.min_freq,
            params.neutral_fraction,
        ) {
            Ok(l) => l,
            Err(e) => {
                m.note = Some(format!("classification: {e}"));
                eigvecs.push(m);
                continue;
            }
        };
        m.n_positive = labels.count(Label::Positive);
        m.n_negative = labels.count(Label::Negative);
        m.n_neutral = labels.count(Label::Neutral);
        m.n_excluded = labels.count(Label::Excluded);
        let tree_config = TreeConfig {
            min_leaf: params.min_leaf,
            prune: params.prune,
        };
        match learn_tree_with(&training_examples(corpus, &labels, params.include_neutral), &tree_config) {
            Ok(tree) => {
                m.tree_error = Some(tree.training_error());
                m.n_leaves = Some(tree.n_leaves());
            }
            Err(e) => m.note = Some(format!("tree: {e}")),
        }
        if index < lang_spectrum.len() {
            if let Ok(lang_labels) = classify_languages(&lang_spectrum, index) {
                let table = cross_prevalence(corpus, &lang_labels, &labels)?;
                m.cross_prevalence = Some(table.quadruple());
            }
        }
        eigvecs.push(m);
    }

    Ok(ReplicateMetrics {
        replicate,
        seed,
        empty_languages: corpus.languages().iter().filter(|l| l.inventory.is_empty()).count(),
        principal_correlation,
        eigvecs,
    })
}

/// Runs the frequency-based correlation and the classification experiments on
/// every replicate of the null model built from `base_corpus`.
pub fn control_report(
    config: &NullModelConfig,
    base_corpus: &InventoryCorpus,
    params: &PipelineParams,
) -> Result<ControlReport> {
    config.validate()?;
    let replicates = (0..config.n_replicates)
        .map(|r| {
            let corpus =
                generate_replicate(config, base_corpus.catalog(), base_corpus.consonants(), r)?;
            analyze_replicate(&corpus, params, r, config.replicate_seed(r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ControlReport {
        replicates,
        eigvec_indices: params.eigvec_indices.clone(),
    })
}
