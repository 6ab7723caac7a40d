//! End-to-end analysis: corpus → networks → spectra → typology → null model,
//! written as a bundle of plain-text artifacts.
//!
//! Every artifact starts with a provenance header (`# ` lines, or a
//! `provenance` object in JSON) carrying the tool version, a hash of the
//! analysis parameters and a hash of the corpus. No timestamps are written,
//! so identical inputs give byte-identical bundles.

use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::corpus::{consonant_frequencies, corpus_to_string, load_corpus, InventoryCorpus};
use crate::error::{Error, Result};
use crate::netbuild::{
    build_bipartite, project_langgraph, project_phonet, BipartiteMatrix, CooccurrenceNetwork,
    NetworkKind,
};
use crate::nullmodel::{control_report, ControlReport, NullModelConfig, PipelineParams};
use crate::numfmt::sig12;
use crate::spectra::{
    bin_spectrum, eig_symmetric_oriented, eigvec_frequency_correlation,
    fit_power_law_tail_offset, frobenius_fractions, ranked_magnitudes, PowerLawFit, Spectrum,
    SpectrumEnd, DEFAULT_BIN_WIDTH, DEFAULT_EIG_TOL, DEFAULT_TOP_K,
};
use crate::typology::{
    classify_by_eigenvector, classify_languages, cross_prevalence, learn_tree_with,
    markedness_overlap, training_examples, ClassLabeling, CrossPrevalenceTable, Label, TreeConfig,
    DEFAULT_MIN_FREQ, DEFAULT_MIN_LEAF, DEFAULT_NEUTRAL_FRACTION,
};

pub const TOOL_NAME: &str = "phonet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const LOCK_FILE: &str = ".phonet.lock";
pub const DEFAULT_OUTPUT_DIR: &str = "phonet-out";
pub const FROBENIUS_K_MAX: usize = 10;
/// 1-based indices of the eigenvectors tabulated against frequency.
pub const EIGVEC_TABLE_INDICES: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus_path: PathBuf,
    pub output_dir: PathBuf,
    pub bin_width: f64,
    pub top_k_fit: usize,
    pub rank_offset: usize,
    pub min_freq: u64,
    pub neutral_fraction: f64,
    pub eig_tol: f64,
    pub seed: u64,
    pub n_replicates: usize,
    pub min_leaf: usize,
    /// C4.5 pessimistic pruning of the learned trees.
    pub prune: bool,
    pub include_neutral: bool,
    /// 1-based eigenvector indices for the classification experiments.
    pub eigvecs: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus_path: PathBuf::new(),
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            bin_width: DEFAULT_BIN_WIDTH,
            top_k_fit: DEFAULT_TOP_K,
            rank_offset: 0,
            min_freq: DEFAULT_MIN_FREQ,
            neutral_fraction: DEFAULT_NEUTRAL_FRACTION,
            eig_tol: DEFAULT_EIG_TOL,
            seed: 0,
            n_replicates: crate::nullmodel::DEFAULT_REPLICATES,
            min_leaf: DEFAULT_MIN_LEAF,
            prune: true,
            include_neutral: false,
            eigvecs: vec![2, 3],
        }
    }
}

fn parse_value<V: std::str::FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Sets one `key = value` option.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "corpus" => self.corpus_path = PathBuf::from(value),
            "out" => self.output_dir = PathBuf::from(value),
            "bin_width" => self.bin_width = parse_value(key, value)?,
            "top_k" => self.top_k_fit = parse_value(key, value)?,
            "rank_offset" => self.rank_offset = parse_value(key, value)?,
            "min_freq" => self.min_freq = parse_value(key, value)?,
            "neutral_fraction" => self.neutral_fraction = parse_value(key, value)?,
            "tol" => self.eig_tol = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "replicates" => self.n_replicates = parse_value(key, value)?,
            "min_leaf" => self.min_leaf = parse_value(key, value)?,
            "prune" => self.prune = parse_value(key, value)?,
            "include_neutral" => self.include_neutral = parse_value(key, value)?,
            "eigvecs" => {
                self.eigvecs = value
                    .split(',')
                    .map(|v| parse_value(key, v.trim()))
                    .collect::<Result<_>>()?
            }
            other => return Err(Error::InvalidArgument(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document; `#` starts a comment line.
    pub fn apply_kv_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("config line {}: expected key = value", lineno + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_kv_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_kv_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return bad(format!("bin width {} must be positive", self.bin_width));
        }
        if self.top_k_fit < 2 {
            return bad(format!("top-k {} must be at least 2", self.top_k_fit));
        }
        if !(self.neutral_fraction > 0.0 && self.neutral_fraction < 1.0) {
            return bad(format!("neutral fraction {} outside (0, 1)", self.neutral_fraction));
        }
        if !(self.eig_tol > 0.0 && self.eig_tol < 1.0) {
            return bad(format!("tolerance {} outside (0, 1)", self.eig_tol));
        }
        if self.n_replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.min_leaf == 0 {
            return bad("min-leaf must be at least 1".into());
        }
        if self.eigvecs.is_empty() || self.eigvecs.contains(&0) {
            return bad("eigenvector indices are 1-based and must be given".into());
        }
        Ok(())
    }

    /// Canonical text of the analysis parameters. Paths and the choice of
    /// examined eigenvectors are left out: they select which artifacts are
    /// produced, not what any artifact contains.
    pub fn canonical_parameters(&self) -> String {
        format!(
            "bin_width = {}\ntop_k = {}\nrank_offset = {}\nmin_freq = {}\nneutral_fraction = {}\ntol = {}\nseed = {}\nreplicates = {}\nmin_leaf = {}\nprune = {}\ninclude_neutral = {}\n",
            sig12(self.bin_width),
            self.top_k_fit,
            self.rank_offset,
            self.min_freq,
            sig12(self.neutral_fraction),
            sig12(self.eig_tol),
            self.seed,
            self.n_replicates,
            self.min_leaf,
            self.prune,
            self.include_neutral,
        )
    }

    pub fn config_hash(&self) -> String {
        short_hash(self.canonical_parameters().as_bytes())
    }

    pub fn pipeline_params(&self) -> PipelineParams {
        PipelineParams {
            min_freq: self.min_freq,
            neutral_fraction: self.neutral_fraction,
            eig_tol: self.eig_tol,
            min_leaf: self.min_leaf,
            prune: self.prune,
            include_neutral: self.include_neutral,
            eigvec_indices: self.eigvecs.iter().map(|k| k - 1).collect(),
        }
    }
}

fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn corpus_hash(corpus: &InventoryCorpus) -> String {
    short_hash(corpus_to_string(corpus).as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub tool_version: String,
    pub config_hash: String,
    pub corpus_hash: String,
}

impl Provenance {
    pub fn new(config: &RunConfig, corpus_hash: String) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            config_hash: config.config_hash(),
            corpus_hash,
        }
    }

    pub fn header(&self) -> String {
        format!(
            "# {TOOL_NAME} {}\n# config-hash {}\n# corpus-hash {}\n",
            self.tool_version, self.config_hash, self.corpus_hash
        )
    }

    /// Recovers the corpus hash from an artifact's header.
    pub fn corpus_hash_in(text: &str) -> Option<String> {
        text.lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix("# corpus-hash "))
            .map(|h| h.trim().to_string())
    }
}

/// Output directory held under a lock file for the lifetime of the value.
pub struct OutputDir {
    dir: PathBuf,
    provenance: Provenance,
    written: Vec<String>,
}

impl OutputDir {
    pub fn open(dir: impl Into<PathBuf>, provenance: Provenance) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let lock = dir.join(LOCK_FILE);
        OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&lock)
            .map_err(|e| Error::io(&lock, e))?;
        Ok(Self {
            dir,
            provenance,
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Writes a text artifact with the provenance header.
    pub fn text(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        out.write_all(self.provenance.header().as_bytes())
            .and_then(|_| body(&mut out))
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: serde_json::Value) -> Result<()> {
        let doc = serde_json::json!({
            "provenance": {
                "tool": TOOL_NAME,
                "version": self.provenance.tool_version,
                "config_hash": self.provenance.config_hash,
                "corpus_hash": self.provenance.corpus_hash,
            },
            "content": value,
        });
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&doc).expect("json serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(self.dir.join(LOCK_FILE));
    }
}

pub struct Networks {
    pub bipartite: BipartiteMatrix,
    pub phonet: CooccurrenceNetwork,
    pub langgraph: CooccurrenceNetwork,
}

pub fn network_file_name(kind: NetworkKind) -> String {
    format!("{kind}_matrix.txt")
}

/// Incidence matrix and both projections, with edge lists and dense dumps.
pub fn stage_build(corpus: &InventoryCorpus, out: &mut OutputDir) -> Result<Networks> {
    let bipartite = build_bipartite(corpus);
    let phonet = project_phonet(&bipartite);
    let langgraph = project_langgraph(&bipartite);

    out.text("corpus_summary.txt", |w| {
        writeln!(w, "languages {}", corpus.n_languages())?;
        writeln!(w, "consonants {}", corpus.n_consonants())?;
        writeln!(w, "features {}", corpus.catalog().count())?;
        writeln!(w, "bipartite_edges {}", bipartite.edge_count())?;
        writeln!(w, "phonet_edges {}", phonet.edge_count())?;
        writeln!(w, "langgraph_edges {}", langgraph.edge_count())?;
        let warnings = corpus.warnings();
        writeln!(w, "warnings {}", warnings.len())?;
        for warning in warnings {
            writeln!(w, "warning {warning}")?;
        }
        Ok(())
    })?;
    out.text("bipartite_edges.txt", |w| {
        writeln!(w, "# consonant_id language_id")?;
        bipartite.write_edge_list(w)
    })?;
    for net in [&phonet, &langgraph] {
        out.text(&format!("{}_edges.txt", net.kind()), |w| {
            writeln!(w, "# i j weight")?;
            net.write_edge_list(w)
        })?;
        out.text(&network_file_name(net.kind()), |w| net.write_dense(w))?;
    }
    Ok(Networks {
        bipartite,
        phonet,
        langgraph,
    })
}

pub fn read_network_file(path: impl AsRef<Path>) -> Result<(CooccurrenceNetwork, Option<String>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let hash = Provenance::corpus_hash_in(&text);
    let net = CooccurrenceNetwork::read_dense(BufReader::new(text.as_bytes()))?;
    Ok((net, hash))
}

/// Oriented spectrum of a network; eigenvectors point along the removed
/// diagonal (consonant frequencies or inventory sizes).
pub fn network_spectrum(net: &CooccurrenceNetwork, tol: f64) -> Result<Spectrum<f64>> {
    eig_symmetric_oriented(net.to_float::<f64>().view(), tol, &net.removed_diagonal_float())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    pub kind: NetworkKind,
    pub order: usize,
    pub max_residual: f64,
    pub frobenius_norm: f64,
    pub sweeps: usize,
    pub degenerate_clusters: usize,
    pub frobenius_fractions: Vec<f64>,
    pub fits: Vec<(SpectrumEnd, std::result::Result<PowerLawFit<f64>, String>)>,
    /// `(1-based index, r)` for the tabulated eigenvectors.
    pub correlations: Vec<(usize, std::result::Result<f64, String>)>,
    pub largest_bin: Option<(f64, f64, usize)>,
}

/// Spectrum tables, histogram, ranked tails with power-law fits, Frobenius
/// fractions and eigenvector-versus-frequency tables for one network.
pub fn stage_spectrum(
    net: &CooccurrenceNetwork,
    config: &RunConfig,
    out: &mut OutputDir,
) -> Result<(Spectrum<f64>, SpectrumSummary)> {
    let kind = net.kind();
    let s = network_spectrum(net, config.eig_tol)?;
    let freq: Vec<f64> = net.removed_diagonal_float();

    out.text(&format!("{kind}_spectrum.csv"), |w| {
        writeln!(w, "index,eigenvalue,residual")?;
        for (k, (&l, &r)) in s.eigenvalues().iter().zip(s.residual_norms()).enumerate() {
            writeln!(w, "{},{},{}", k + 1, sig12(l), sig12(r))?;
        }
        Ok(())
    })?;

    let binned = bin_spectrum(&s, config.bin_width)?;
    out.text(&format!("{kind}_binned.csv"), |w| {
        writeln!(w, "bin_lo,bin_hi,count")?;
        for (lo, hi, c) in binned.bins() {
            writeln!(w, "{},{},{}", sig12(lo), sig12(hi), c)?;
        }
        Ok(())
    })?;
    let largest_bin = binned.bins().max_by(|a, b| a.2.cmp(&b.2).then(b.0.total_cmp(&a.0)));

    let mut fits = Vec::new();
    for end in [SpectrumEnd::Positive, SpectrumEnd::Negative] {
        let ranked = ranked_magnitudes(&s, end);
        out.text(&format!("{kind}_ranked_{end}.csv"), |w| {
            writeln!(w, "rank,abs_eigenvalue,log10_rank,log10_abs_eigenvalue")?;
            for (r, &v) in ranked.iter().enumerate() {
                let rank = (r + 1) as f64;
                writeln!(w, "{},{},{},{}", r + 1, sig12(v), sig12(rank.log10()), sig12(v.log10()))?;
            }
            Ok(())
        })?;
        // Small networks may not have top_k nonzero eigenvalues on an end; the
        // window shrinks to what is available and n_points records it.
        let available = ranked.len().saturating_sub(config.rank_offset);
        let k = config.top_k_fit.min(available);
        let fit = if k >= 2 {
            fit_power_law_tail_offset(&s, end, k, config.rank_offset).map_err(|e| e.to_string())
        } else {
            Err(format!("only {available} nonzero eigenvalues on the {end} end"))
        };
        fits.push((end, fit));
    }
    out.text(&format!("{kind}_powerlaw_fits.csv"), |w| {
        writeln!(w, "end,exponent,intercept,r_squared,n_points,rank_offset,note")?;
        for (end, fit) in &fits {
            match fit {
                Ok(f) => writeln!(
                    w,
                    "{end},{},{},{},{},{},",
                    sig12(f.exponent),
                    sig12(f.intercept),
                    sig12(f.r_squared),
                    f.n_points,
                    f.rank_offset
                )?,
                Err(msg) => writeln!(w, "{end},,,,0,{},{}", config.rank_offset, msg.replace(',', ";"))?,
            }
        }
        Ok(())
    })?;

    let fractions = match frobenius_fractions(&s, FROBENIUS_K_MAX) {
        Ok(f) => f,
        Err(Error::ZeroMatrix(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    out.text(&format!("{kind}_frobenius.csv"), |w| {
        writeln!(w, "k,fraction")?;
        for (k, f) in fractions.iter().enumerate() {
            writeln!(w, "{},{}", k + 1, sig12(*f))?;
        }
        Ok(())
    })?;

    let mut correlations = Vec::new();
    for idx in EIGVEC_TABLE_INDICES {
        if idx > s.len() {
            continue;
        }
        let v = s.eigenvector(idx - 1);
        out.text(&format!("{kind}_eigvec_{idx}.csv"), |w| {
            writeln!(w, "node_id,frequency,component")?;
            for (i, (&c, &f)) in v.iter().zip(net.removed_diagonal()).enumerate() {
                writeln!(w, "{},{},{}", net.node_ids()[i], f, sig12(c))?;
            }
            Ok(())
        })?;
        let r = eigvec_frequency_correlation(&s, idx - 1, &freq)
            .map(|c| c.r)
            .map_err(|e| e.to_string());
        correlations.push((idx, r));
    }

    let summary = SpectrumSummary {
        kind,
        order: s.len(),
        max_residual: s.max_residual(),
        frobenius_norm: s.source_frobenius(),
        sweeps: s.sweeps(),
        degenerate_clusters: s.degenerate_clusters().len(),
        frobenius_fractions: fractions,
        fits,
        correlations,
        largest_bin,
    };
    Ok((s, summary))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    /// 1-based eigenvector index.
    pub eigvec: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub n_neutral: usize,
    pub n_excluded: usize,
    pub tree_error: std::result::Result<f64, String>,
    pub n_leaves: Option<usize>,
    pub n_languages_positive: usize,
    pub n_languages_negative: usize,
    pub cross_prevalence: Option<CrossPrevalenceTable>,
}

pub fn consonant_labels_file(eigvec: usize) -> String {
    format!("labels_consonants_eig{eigvec}.csv")
}

pub fn language_labels_file(eigvec: usize) -> String {
    format!("labels_languages_eig{eigvec}.csv")
}

/// Consonant classes, their decision tree, and language classes for one
/// eigenvector (1-based `eigvec`).
pub fn stage_classify(
    corpus: &InventoryCorpus,
    phonet_spectrum: &Spectrum<f64>,
    lang_spectrum: &Spectrum<f64>,
    config: &RunConfig,
    eigvec: usize,
    out: &mut OutputDir,
) -> Result<(ClassLabeling<f64>, ClassLabeling<f64>, ExperimentSummary)> {
    if eigvec == 0 {
        return Err(Error::InvalidArgument("eigenvector indices are 1-based".into()));
    }
    let freq = consonant_frequencies(corpus);
    let cons = classify_by_eigenvector(
        phonet_spectrum,
        eigvec - 1,
        &freq,
        config.min_freq,
        config.neutral_fraction,
    )?;
    let langs = classify_languages(lang_spectrum, eigvec - 1)?;

    let symbols: Vec<String> = corpus.consonants().iter().map(|c| c.symbol.clone()).collect();
    let names: Vec<String> = corpus.languages().iter().map(|l| l.name.clone()).collect();
    out.text(&consonant_labels_file(eigvec), |w| {
        writeln!(
            w,
            "# eigenvector {eigvec}; MAX+ {}; MAX- {}; neutral fraction {}; min frequency {}",
            cons.thresholds.max_plus.map_or_else(|| "none".into(), sig12),
            cons.thresholds.max_minus.map_or_else(|| "none".into(), sig12),
            sig12(config.neutral_fraction),
            config.min_freq
        )?;
        cons.write_csv(w, &symbols)
    })?;
    out.text(&language_labels_file(eigvec), |w| {
        writeln!(w, "# eigenvector {eigvec}; sign split")?;
        langs.write_csv(w, &names)
    })?;

    let examples = training_examples(corpus, &cons, config.include_neutral);
    let tree = learn_tree_with(
        &examples,
        &TreeConfig {
            min_leaf: config.min_leaf,
            prune: config.prune,
        },
    );
    let feature_names = corpus.catalog().names().to_vec();
    match &tree {
        Ok(t) => {
            out.text(&format!("tree_eig{eigvec}.txt"), |w| {
                w.write_all(t.render_text(&feature_names).as_bytes())
            })?;
            out.json(&format!("tree_eig{eigvec}.json"), t.to_json(&feature_names))?;
        }
        Err(e) => {
            let msg = e.to_string();
            out.text(&format!("tree_eig{eigvec}.txt"), |w| writeln!(w, "no tree: {msg}"))?;
            out.json(
                &format!("tree_eig{eigvec}.json"),
                serde_json::json!({ "error": msg }),
            )?;
        }
    }

    let summary = ExperimentSummary {
        eigvec,
        n_positive: cons.count(Label::Positive),
        n_negative: cons.count(Label::Negative),
        n_neutral: cons.count(Label::Neutral),
        n_excluded: cons.count(Label::Excluded),
        tree_error: tree.as_ref().map(|t| t.training_error()).map_err(|e| e.to_string()),
        n_leaves: tree.as_ref().ok().map(|t| t.n_leaves()),
        n_languages_positive: langs.count(Label::Positive),
        n_languages_negative: langs.count(Label::Negative),
        cross_prevalence: None,
    };
    Ok((cons, langs, summary))
}

/// Cross-prevalence table for one eigenvector's language and consonant classes.
pub fn stage_crossprev(
    corpus: &InventoryCorpus,
    lang_labels: &ClassLabeling<f64>,
    cons_labels: &ClassLabeling<f64>,
    eigvec: usize,
    out: &mut OutputDir,
) -> Result<CrossPrevalenceTable> {
    let table = cross_prevalence(corpus, lang_labels, cons_labels)?;
    out.text(&format!("crossprev_eig{eigvec}.txt"), |w| {
        writeln!(w, "# eigenvector {eigvec}: normalised prevalence of consonant classes in language classes")?;
        w.write_all(table.render().as_bytes())
    })?;
    Ok(table)
}

pub fn stage_overlap(
    corpus: &InventoryCorpus,
    phonet_spectrum: &Spectrum<f64>,
    out: &mut OutputDir,
) -> Result<f64> {
    let report = markedness_overlap(corpus, phonet_spectrum)?;
    out.text("markedness.csv", |w| report.write_csv(w, corpus))?;
    let components = phonet_spectrum.eigenvector(0).to_vec();
    out.text("markedness_hierarchy.csv", |w| {
        report.write_hierarchy_csv(w, corpus, &components)
    })?;
    Ok(report.mean_overlap)
}

pub fn stage_nullmodel(
    corpus: &InventoryCorpus,
    config: &RunConfig,
    out: &mut OutputDir,
) -> Result<ControlReport> {
    let null_config = NullModelConfig::from_corpus(corpus, config.seed, config.n_replicates);
    let report = control_report(&null_config, corpus, &config.pipeline_params())?;
    out.text("nullmodel_replicates.csv", |w| report.write_replicates_csv(w))?;
    out.text("nullmodel_summary.txt", |w| report.write_summary(w))?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n_languages: usize,
    pub n_consonants: usize,
    pub bipartite_edges: usize,
    pub phonet_edges: usize,
    pub langgraph_edges: usize,
    pub phonet: SpectrumSummary,
    pub langgraph: SpectrumSummary,
    pub experiments: Vec<ExperimentSummary>,
    pub markedness_mean: f64,
    pub control: ControlReport,
    pub artifacts: Vec<String>,
}

impl RunSummary {
    pub fn fit(&self, end: SpectrumEnd) -> Option<&PowerLawFit<f64>> {
        self.phonet
            .fits
            .iter()
            .find(|(e, _)| *e == end)
            .and_then(|(_, f)| f.as_ref().ok())
    }

    pub fn principal_correlation(&self) -> Option<f64> {
        self.phonet
            .correlations
            .iter()
            .find(|(i, _)| *i == 1)
            .and_then(|(_, r)| r.as_ref().ok().copied())
    }

    pub fn experiment(&self, eigvec: usize) -> Option<&ExperimentSummary> {
        self.experiments.iter().find(|e| e.eigvec == eigvec)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let opt = |v: &std::result::Result<f64, String>| match v {
            Ok(x) => sig12(*x),
            Err(e) => format!("unavailable ({e})"),
        };
        writeln!(s, "== corpus ==").unwrap();
        writeln!(s, "languages: {}", self.n_languages).unwrap();
        writeln!(s, "consonants: {}", self.n_consonants).unwrap();
        writeln!(s, "language-consonant edges: {}", self.bipartite_edges).unwrap();
        writeln!(s, "PhoNet edges: {}", self.phonet_edges).unwrap();
        writeln!(s, "LangGraph edges: {}", self.langgraph_edges).unwrap();
        for sp in [&self.phonet, &self.langgraph] {
            writeln!(s).unwrap();
            writeln!(s, "== {} spectrum ==", sp.kind).unwrap();
            writeln!(s, "order: {}", sp.order).unwrap();
            writeln!(s, "Frobenius norm: {}", sig12(sp.frobenius_norm)).unwrap();
            writeln!(s, "max residual: {}", sig12(sp.max_residual)).unwrap();
            writeln!(s, "Jacobi sweeps: {}", sp.sweeps).unwrap();
            writeln!(s, "degenerate clusters: {}", sp.degenerate_clusters).unwrap();
            if let Some((lo, hi, c)) = sp.largest_bin {
                writeln!(s, "largest bin: [{}, {}) holds {c}", sig12(lo), sig12(hi)).unwrap();
            }
            for (k, f) in sp.frobenius_fractions.iter().enumerate().take(3) {
                writeln!(s, "Frobenius fraction k={}: {}", k + 1, sig12(*f)).unwrap();
            }
            for (end, fit) in &sp.fits {
                match fit {
                    Ok(f) => writeln!(
                        s,
                        "power-law fit ({end} end): exponent {} R^2 {} over {} points",
                        sig12(f.exponent),
                        sig12(f.r_squared),
                        f.n_points
                    )
                    .unwrap(),
                    Err(e) => writeln!(s, "power-law fit ({end} end): unavailable ({e})").unwrap(),
                }
            }
            for (idx, r) in &sp.correlations {
                writeln!(s, "eigenvector {idx} vs frequency r: {}", opt(r)).unwrap();
            }
        }
        for e in &self.experiments {
            writeln!(s).unwrap();
            writeln!(s, "== eigenvector {} experiments ==", e.eigvec).unwrap();
            writeln!(
                s,
                "consonants: {} positive, {} negative, {} neutral, {} excluded",
                e.n_positive, e.n_negative, e.n_neutral, e.n_excluded
            )
            .unwrap();
            writeln!(s, "tree training error: {}", opt(&e.tree_error)).unwrap();
            if let Some(n) = e.n_leaves {
                writeln!(s, "tree leaves: {n}").unwrap();
            }
            writeln!(
                s,
                "languages: {} positive, {} negative",
                e.n_languages_positive, e.n_languages_negative
            )
            .unwrap();
            if let Some(t) = &e.cross_prevalence {
                let q: Vec<String> = t
                    .quadruple()
                    .iter()
                    .map(|v| v.map_or_else(|| "undefined".into(), sig12))
                    .collect();
                writeln!(
                    s,
                    "cross-prevalence (L+,C+) (L+,C-) (L-,C+) (L-,C-): {}",
                    q.join(" ")
                )
                .unwrap();
            }
        }
        writeln!(s).unwrap();
        writeln!(s, "== markedness ==").unwrap();
        writeln!(s, "mean overlap with hierarchy prefix: {}", sig12(self.markedness_mean)).unwrap();
        writeln!(s).unwrap();
        writeln!(s, "== null model ==").unwrap();
        let mut buf = Vec::new();
        self.control.write_summary(&mut buf).expect("in-memory write");
        s.push_str(&String::from_utf8(buf).expect("utf-8"));
        s
    }
}

/// Runs every stage on the corpus at `config.corpus_path`, writing the bundle
/// to `config.output_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let corpus = load_corpus(&config.corpus_path)?;
    run_pipeline_on(&corpus, config)
}

pub fn run_pipeline_on(corpus: &InventoryCorpus, config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let provenance = Provenance::new(config, corpus_hash(corpus));
    let mut out = OutputDir::open(&config.output_dir, provenance)?;

    let nets = stage_build(corpus, &mut out)?;
    let (phonet_spectrum, phonet) = stage_spectrum(&nets.phonet, config, &mut out)?;
    let (lang_spectrum, langgraph) = stage_spectrum(&nets.langgraph, config, &mut out)?;

    let mut experiments = Vec::new();
    for &k in &config.eigvecs {
        if k > phonet_spectrum.len() || k > lang_spectrum.len() {
            return Err(Error::InvalidArgument(format!(
                "eigenvector {k} requested but the networks have orders {} and {}",
                phonet_spectrum.len(),
                lang_spectrum.len()
            )));
        }
        let (cons, langs, mut summary) =
            stage_classify(corpus, &phonet_spectrum, &lang_spectrum, config, k, &mut out)?;
        summary.cross_prevalence = Some(stage_crossprev(corpus, &langs, &cons, k, &mut out)?);
        experiments.push(summary);
    }

    let markedness_mean = stage_overlap(corpus, &phonet_spectrum, &mut out)?;
    let control = stage_nullmodel(corpus, config, &mut out)?;

    let mut summary = RunSummary {
        n_languages: corpus.n_languages(),
        n_consonants: corpus.n_consonants(),
        bipartite_edges: nets.bipartite.edge_count(),
        phonet_edges: nets.phonet.edge_count(),
        langgraph_edges: nets.langgraph.edge_count(),
        phonet,
        langgraph,
        experiments,
        markedness_mean,
        control,
        artifacts: Vec::new(),
    };
    let rendered = summary.render();
    out.text("summary.txt", |w| w.write_all(rendered.as_bytes()))?;
    summary.artifacts = out.written().to_vec();
    Ok(summary)
}
