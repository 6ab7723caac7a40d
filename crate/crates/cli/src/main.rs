//! `phonet`: spectral analysis of consonant co-occurrence networks.
//!
//! `phonet run` executes the whole pipeline; the other subcommands run one
//! stage each and write the same artifacts the full run would.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phonet_core::corpus::{load_corpus, save_corpus, synthesize_corpus, FrequencyProfile, SynthConfig};
use phonet_core::error::{Error, ErrorCategory, Result};
use phonet_core::pipeline::{
    self, corpus_hash, network_spectrum, read_network_file, run_pipeline, stage_build,
    stage_classify, stage_crossprev, stage_nullmodel, stage_overlap, stage_spectrum, OutputDir,
    Provenance, RunConfig,
};
use phonet_core::typology::ClassLabeling;

#[derive(Parser, Debug)]
#[command(name = "phonet", version, about = "Spectral typology of consonant inventories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every stage and write the full artifact bundle.
    Run {
        #[command(flatten)]
        input: CorpusArg,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Build the incidence matrix and both co-occurrence networks.
    Build {
        #[command(flatten)]
        input: CorpusArg,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Spectrum, histogram, power-law fits and eigenvector tables of a network
    /// file written by `build`.
    Spectrum {
        /// Dense network file (`phonet_matrix.txt` or `langgraph_matrix.txt`).
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Label consonants and languages by one eigenvector and learn the tree.
    Classify {
        #[command(flatten)]
        input: CorpusArg,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Cross-prevalence table from label files written by `classify`.
    Crossprev {
        #[command(flatten)]
        input: CorpusArg,
        /// Language labels CSV.
        #[arg(long)]
        languages: PathBuf,
        /// Consonant labels CSV.
        #[arg(long)]
        consonants: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Overlap of inventories with the principal-eigenvector hierarchy.
    Overlap {
        #[command(flatten)]
        input: CorpusArg,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Frequency-preserving randomized controls.
    Nullmodel {
        #[command(flatten)]
        input: CorpusArg,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Write a synthetic corpus.
    Synth {
        #[arg(long)]
        languages: usize,
        #[arg(long)]
        consonants: usize,
        #[arg(long, default_value_t = 8)]
        features: usize,
        /// `uniform`, `geometric:P` or `explicit:f1,f2,...`.
        #[arg(long, default_value = "uniform")]
        profile: String,
        /// Probability of each feature bit being set.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corpus file to write.
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct CorpusArg {
    /// Corpus file (TOML).
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct AnalysisArgs {
    /// Output directory.
    #[arg(long, env = "PHONET_OUT")]
    out: Option<PathBuf>,
    /// `key = value` file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    bin_width: Option<f64>,
    /// Number of largest-magnitude eigenvalues in each power-law fit.
    #[arg(long)]
    top_k: Option<usize>,
    /// Ranks skipped before the power-law fit window.
    #[arg(long)]
    rank_offset: Option<usize>,
    #[arg(long)]
    min_freq: Option<u64>,
    #[arg(long)]
    neutral_fraction: Option<f64>,
    /// Eigensolver residual tolerance relative to the Frobenius norm.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    min_leaf: Option<usize>,
    /// Keep every split instead of pruning the trees.
    #[arg(long)]
    no_prune: bool,
    /// Train the tree on neutral consonants as a third class.
    #[arg(long)]
    include_neutral: bool,
    /// 1-based eigenvector index; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',')]
    eigvec: Vec<usize>,
}

impl AnalysisArgs {
    fn config(&self, corpus: Option<&Path>) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_kv_file(path)?;
        }
        if let Some(p) = corpus {
            cfg.corpus_path = p.to_path_buf();
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.bin_width {
            cfg.bin_width = v;
        }
        if let Some(v) = self.top_k {
            cfg.top_k_fit = v;
        }
        if let Some(v) = self.rank_offset {
            cfg.rank_offset = v;
        }
        if let Some(v) = self.min_freq {
            cfg.min_freq = v;
        }
        if let Some(v) = self.neutral_fraction {
            cfg.neutral_fraction = v;
        }
        if let Some(v) = self.tol {
            cfg.eig_tol = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.replicates {
            cfg.n_replicates = v;
        }
        if let Some(v) = self.min_leaf {
            cfg.min_leaf = v;
        }
        if self.no_prune {
            cfg.prune = false;
        }
        if self.include_neutral {
            cfg.include_neutral = true;
        }
        if !self.eigvec.is_empty() {
            cfg.eigvecs = self.eigvec.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn require_corpus(cfg: &RunConfig) -> Result<()> {
    if cfg.corpus_path.as_os_str().is_empty() {
        return Err(Error::InvalidArgument(
            "no corpus given (use --corpus or `corpus = ...` in the config file)".into(),
        ));
    }
    Ok(())
}

fn parse_profile(text: &str) -> Result<FrequencyProfile> {
    let bad = || Error::InvalidArgument(format!("unknown frequency profile {text:?}"));
    match text.split_once(':') {
        None if text == "uniform" => Ok(FrequencyProfile::Uniform),
        Some(("geometric", p)) => Ok(FrequencyProfile::Geometric {
            p: p.parse().map_err(|_| bad())?,
        }),
        Some(("explicit", list)) => Ok(FrequencyProfile::Explicit(
            list.split(',')
                .map(|v| v.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?,
        )),
        _ => Err(bad()),
    }
}

fn open_corpus_stage(cfg: &RunConfig) -> Result<(phonet_core::corpus::InventoryCorpus, OutputDir)> {
    require_corpus(cfg)?;
    let corpus = load_corpus(&cfg.corpus_path)?;
    let out = OutputDir::open(&cfg.output_dir, Provenance::new(cfg, corpus_hash(&corpus)))?;
    Ok((corpus, out))
}

fn read_labels(path: &Path, eigvec: usize) -> Result<ClassLabeling<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ClassLabeling::read_csv(BufReader::new(file), eigvec - 1)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { input, analysis } => {
            let cfg = analysis.config(input.corpus.as_deref())?;
            require_corpus(&cfg)?;
            let summary = run_pipeline(&cfg)?;
            print!("{}", summary.render());
            eprintln!("wrote {} artifacts to {}", summary.artifacts.len(), cfg.output_dir.display());
        }
        Command::Build { input, analysis } => {
            let cfg = analysis.config(input.corpus.as_deref())?;
            let (corpus, mut out) = open_corpus_stage(&cfg)?;
            stage_build(&corpus, &mut out)?;
        }
        Command::Spectrum { network, analysis } => {
            let cfg = analysis.config(None)?;
            let (net, hash) = read_network_file(&network)?;
            let hash = hash.unwrap_or_else(|| "unknown".into());
            let mut out = OutputDir::open(&cfg.output_dir, Provenance::new(&cfg, hash))?;
            stage_spectrum(&net, &cfg, &mut out)?;
        }
        Command::Classify { input, analysis } => {
            let cfg = analysis.config(input.corpus.as_deref())?;
            let (corpus, mut out) = open_corpus_stage(&cfg)?;
            let a = phonet_core::netbuild::build_bipartite(&corpus);
            let phonet = network_spectrum(&phonet_core::netbuild::project_phonet(&a), cfg.eig_tol)?;
            let langs = network_spectrum(&phonet_core::netbuild::project_langgraph(&a), cfg.eig_tol)?;
            for &k in &cfg.eigvecs {
                stage_classify(&corpus, &phonet, &langs, &cfg, k, &mut out)?;
            }
        }
        Command::Crossprev {
            input,
            languages,
            consonants,
            analysis,
        } => {
            let cfg = analysis.config(input.corpus.as_deref())?;
            let [k] = cfg.eigvecs[..] else {
                return Err(Error::InvalidArgument(
                    "crossprev takes exactly one --eigvec".into(),
                ));
            };
            let (corpus, mut out) = open_corpus_stage(&cfg)?;
            let langs = read_labels(&languages, k)?;
            let cons = read_labels(&consonants, k)?;
            stage_crossprev(&corpus, &langs, &cons, k, &mut out)?;
        }
        Command::Overlap { input, analysis } => {
            let cfg = analysis.config(input.corpus.as_deref())?;
            let (corpus, mut out) = open_corpus_stage(&cfg)?;
            let a = phonet_core::netbuild::build_bipartite(&corpus);
            let phonet = network_spectrum(&phonet_core::netbuild::project_phonet(&a), cfg.eig_tol)?;
            stage_overlap(&corpus, &phonet, &mut out)?;
        }
        Command::Nullmodel { input, analysis } => {
            let cfg = analysis.config(input.corpus.as_deref())?;
            let (corpus, mut out) = open_corpus_stage(&cfg)?;
            let report = stage_nullmodel(&corpus, &cfg, &mut out)?;
            let mut stdout = std::io::stdout();
            report
                .write_summary(&mut stdout)
                .map_err(|e| Error::io("<stdout>", e))?;
        }
        Command::Synth {
            languages,
            consonants,
            features,
            profile,
            density,
            seed,
            output,
        } => {
            let config = SynthConfig::new(languages, consonants, features, parse_profile(&profile)?, seed)
                .with_feature_density(density);
            let corpus = synthesize_corpus(&config)?;
            save_corpus(&corpus, &output)?;
            eprintln!(
                "wrote {} languages, {} consonants to {}",
                corpus.n_languages(),
                corpus.n_consonants(),
                output.display()
            );
        }
    }
    Ok(())
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Usage => 1,
        ErrorCategory::Data => 2,
        ErrorCategory::Numerical => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: error: {e}", pipeline::TOOL_NAME);
            ExitCode::from(exit_code(e.category()))
        }
    }
}
