//! Phoneme-inventory corpora: feature catalog, consonants, languages.
//!
//! Corpora are stored as TOML with three sections (see `docs/corpus-format.md`):
//!
//! ```toml
//! [features]
//! names = ["labial", "dental", "alveolar"]
//!
//! [[consonants]]
//! id = 0
//! symbol = "p"
//! features = "100"
//!
//! [[languages]]
//! id = 0
//! name = "Lang0"
//! inventory = "0 1"
//! ```

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCatalog {
    names: Vec<String>,
}

impl FeatureCatalog {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Validation("feature catalog is empty".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::Validation(format!("feature #{i} has an empty name")));
            }
            if names[..i].contains(name) {
                return Err(Error::Validation(format!("duplicate feature name {name:?}")));
            }
        }
        Ok(Self { names })
    }

    /// Catalog `f0, f1, …` used by synthesized corpora.
    pub fn numbered(count: usize) -> Result<Self> {
        Self::new((0..count).map(|i| format!("f{i}")))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Binary articulatory feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(Vec<bool>);

impl FeatureVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn parse(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "feature bit string {bits:?} contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Consonant {
    pub id: usize,
    pub symbol: String,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub id: usize,
    pub name: String,
    /// Consonant ids, strictly increasing.
    pub inventory: Vec<usize>,
}

impl Language {
    pub fn contains(&self, consonant: usize) -> bool {
        self.inventory.binary_search(&consonant).is_ok()
    }

    pub fn size(&self) -> usize {
        self.inventory.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusWarning {
    IsolatedConsonant { id: usize, symbol: String },
    EmptyLanguage { id: usize, name: String },
}

impl fmt::Display for CorpusWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusWarning::IsolatedConsonant { id, symbol } => {
                write!(f, "consonant {id} ({symbol}) occurs in no language")
            }
            CorpusWarning::EmptyLanguage { id, name } => {
                write!(f, "language {id} ({name}) has an empty inventory")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InventoryCorpus {
    catalog: FeatureCatalog,
    consonants: Vec<Consonant>,
    languages: Vec<Language>,
}

impl InventoryCorpus {
    /// Builds a validated corpus. Records may arrive in any order; they are
    /// sorted by id, ids must then be contiguous from 0. Inventories are
    /// sorted and must be non-empty and duplicate-free.
    pub fn new(
        catalog: FeatureCatalog,
        consonants: Vec<Consonant>,
        languages: Vec<Language>,
    ) -> Result<Self> {
        Self::build(catalog, consonants, languages, false)
    }

    /// Like [`InventoryCorpus::new`] but keeps languages with empty
    /// inventories; randomized corpora can legitimately produce them.
    pub fn with_empty_languages(
        catalog: FeatureCatalog,
        consonants: Vec<Consonant>,
        languages: Vec<Language>,
    ) -> Result<Self> {
        Self::build(catalog, consonants, languages, true)
    }

    fn build(
        catalog: FeatureCatalog,
        mut consonants: Vec<Consonant>,
        mut languages: Vec<Language>,
        allow_empty: bool,
    ) -> Result<Self> {
        consonants.sort_by_key(|c| c.id);
        for (pos, c) in consonants.iter().enumerate() {
            if c.id != pos {
                let what = if pos > 0 && consonants[pos - 1].id == c.id {
                    "duplicate id"
                } else {
                    "ids must be contiguous from 0"
                };
                return Err(Error::Validation(format!(
                    "consonant {} ({}): {what}",
                    c.id, c.symbol
                )));
            }
            if c.symbol.trim().is_empty() {
                return Err(Error::Validation(format!("consonant {}: empty symbol", c.id)));
            }
            if c.features.len() != catalog.count() {
                return Err(Error::Validation(format!(
                    "consonant {} ({}): feature vector has {} bits, catalog has {} features",
                    c.id,
                    c.symbol,
                    c.features.len(),
                    catalog.count()
                )));
            }
        }

        languages.sort_by_key(|l| l.id);
        for (pos, l) in languages.iter_mut().enumerate() {
            if l.id != pos {
                return Err(Error::Validation(format!(
                    "language {} ({}): duplicate id or ids not contiguous from 0",
                    l.id, l.name
                )));
            }
            if l.inventory.is_empty() && !allow_empty {
                return Err(Error::Validation(format!(
                    "language {} ({}): empty inventory",
                    l.id, l.name
                )));
            }
            for &c in &l.inventory {
                if c >= consonants.len() {
                    return Err(Error::Validation(format!(
                        "language {} ({}): undefined consonant id {c}",
                        l.id, l.name
                    )));
                }
            }
            l.inventory.sort_unstable();
            if let Some(w) = l.inventory.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!(
                    "language {} ({}): consonant id {} listed twice",
                    l.id, l.name, w[0]
                )));
            }
        }

        Ok(Self {
            catalog,
            consonants,
            languages,
        })
    }

    pub fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    pub fn consonants(&self) -> &[Consonant] {
        &self.consonants
    }

    pub fn languages(&self) -> &[Language] {
        &self.languages
    }

    pub fn n_consonants(&self) -> usize {
        self.consonants.len()
    }

    pub fn n_languages(&self) -> usize {
        self.languages.len()
    }

    /// Number of language–consonant incidences.
    pub fn edge_count(&self) -> usize {
        self.languages.iter().map(Language::size).sum()
    }

    pub fn inventory_sizes(&self) -> Vec<u64> {
        self.languages.iter().map(|l| l.size() as u64).collect()
    }

    /// Isolated consonants and empty languages. Neither is an error.
    pub fn warnings(&self) -> Vec<CorpusWarning> {
        let freq = consonant_frequencies(self);
        let mut out: Vec<CorpusWarning> = self
            .consonants
            .iter()
            .filter(|c| freq[c.id] == 0)
            .map(|c| CorpusWarning::IsolatedConsonant {
                id: c.id,
                symbol: c.symbol.clone(),
            })
            .collect();
        out.extend(
            self.languages
                .iter()
                .filter(|l| l.inventory.is_empty())
                .map(|l| CorpusWarning::EmptyLanguage {
                    id: l.id,
                    name: l.name.clone(),
                }),
        );
        out
    }
}

/// `f_c`: number of languages whose inventory contains consonant `c`.
pub fn consonant_frequencies(corpus: &InventoryCorpus) -> Vec<u64> {
    let mut freq = vec![0u64; corpus.n_consonants()];
    for l in corpus.languages() {
        for &c in &l.inventory {
            freq[c] += 1;
        }
    }
    freq
}

#[derive(Debug, Serialize, Deserialize)]
struct CorpusFile {
    features: FeaturesSection,
    #[serde(default)]
    consonants: Vec<ConsonantRecord>,
    #[serde(default)]
    languages: Vec<LanguageRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeaturesSection {
    names: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConsonantRecord {
    id: usize,
    symbol: String,
    features: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LanguageRecord {
    id: usize,
    name: String,
    inventory: String,
}

pub fn parse_corpus(text: &str) -> Result<InventoryCorpus> {
    let file: CorpusFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let catalog = FeatureCatalog::new(file.features.names)?;
    let consonants = file
        .consonants
        .into_iter()
        .map(|r| {
            let features = FeatureVector::parse(&r.features).map_err(|e| {
                Error::Parse(format!("consonant {} ({}): {e}", r.id, r.symbol))
            })?;
            Ok(Consonant {
                id: r.id,
                symbol: r.symbol,
                features,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let languages = file
        .languages
        .into_iter()
        .map(|r| {
            let inventory = r
                .inventory
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::Parse(format!(
                            "language {} ({}): bad consonant id {tok:?}",
                            r.id, r.name
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Language {
                id: r.id,
                name: r.name,
                inventory,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    InventoryCorpus::new(catalog, consonants, languages)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<InventoryCorpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn corpus_to_string(corpus: &InventoryCorpus) -> String {
    let file = CorpusFile {
        features: FeaturesSection {
            names: corpus.catalog.names.clone(),
        },
        consonants: corpus
            .consonants
            .iter()
            .map(|c| ConsonantRecord {
                id: c.id,
                symbol: c.symbol.clone(),
                features: c.features.to_string(),
            })
            .collect(),
        languages: corpus
            .languages
            .iter()
            .map(|l| LanguageRecord {
                id: l.id,
                name: l.name.clone(),
                inventory: l
                    .inventory
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            })
            .collect(),
    };
    toml::to_string(&file).expect("corpus serializes to TOML")
}

pub fn save_corpus(corpus: &InventoryCorpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, corpus_to_string(corpus)).map_err(|e| Error::io(path, e))
}

/// How synthesized consonant frequencies are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyProfile {
    /// Each `f_c` uniform on `1..=n_languages`.
    Uniform,
    /// Each `f_c = min(1 + K, n_languages)` with `K ~ Geometric(p)` counting
    /// failures before the first success.
    Geometric { p: f64 },
    /// Exactly these frequencies, indexed by consonant id.
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_languages: usize,
    pub n_consonants: usize,
    pub n_features: usize,
    pub profile: FrequencyProfile,
    /// Probability that any single feature bit is set.
    pub feature_density: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(
        n_languages: usize,
        n_consonants: usize,
        n_features: usize,
        profile: FrequencyProfile,
        seed: u64,
    ) -> Self {
        Self {
            n_languages,
            n_consonants,
            n_features,
            profile,
            feature_density: 0.3,
            seed,
        }
    }

    pub fn with_feature_density(mut self, density: f64) -> Self {
        self.feature_density = density;
        self
    }
}

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Deterministic synthetic corpus. Frequencies are drawn from the profile,
/// feature bits independently with `feature_density`, and each consonant is
/// then placed into `f_c` distinct languages chosen uniformly. Placements that
/// leave a language empty are redrawn, so frequencies are never altered.
pub fn synthesize_corpus(config: &SynthConfig) -> Result<InventoryCorpus> {
    let SynthConfig {
        n_languages,
        n_consonants,
        n_features,
        ref profile,
        feature_density,
        seed,
    } = *config;
    if n_languages == 0 || n_consonants == 0 || n_features == 0 {
        return Err(Error::InvalidArgument(
            "language, consonant and feature counts must all be at least 1".into(),
        ));
    }
    if !(0.0..=1.0).contains(&feature_density) {
        return Err(Error::InvalidArgument(format!(
            "feature density {feature_density} outside [0, 1]"
        )));
    }

    let mut rng = rng::seeded(seed);
    let freq = draw_frequencies(&mut rng, profile, n_languages, n_consonants)?;
    let total: u64 = freq.iter().sum();
    if total < n_languages as u64 {
        return Err(Error::InvalidArgument(format!(
            "frequencies sum to {total}, fewer than the {n_languages} languages that need a consonant each"
        )));
    }

    let catalog = FeatureCatalog::numbered(n_features)?;
    let consonants: Vec<Consonant> = (0..n_consonants)
        .map(|id| Consonant {
            id,
            symbol: format!("c{id}"),
            features: FeatureVector::new(
                (0..n_features)
                    .map(|_| rng::unit_f64(&mut rng) < feature_density)
                    .collect(),
            ),
        })
        .collect();

    let mut scratch = Vec::with_capacity(n_languages);
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let inventories = place(&mut rng, &freq, n_languages, &mut scratch);
        if inventories.iter().all(|inv| !inv.is_empty()) {
            let languages = inventories
                .into_iter()
                .enumerate()
                .map(|(id, inventory)| Language {
                    id,
                    name: format!("L{id}"),
                    inventory,
                })
                .collect();
            return InventoryCorpus::new(catalog, consonants, languages);
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not place consonants without leaving a language empty in {MAX_PLACEMENT_ATTEMPTS} attempts"
    )))
}

fn draw_frequencies(
    rng: &mut StreamRng,
    profile: &FrequencyProfile,
    n_languages: usize,
    n_consonants: usize,
) -> Result<Vec<u64>> {
    let cap = n_languages as u64;
    match profile {
        FrequencyProfile::Uniform => Ok((0..n_consonants)
            .map(|_| 1 + rng::uniform_below(rng, cap))
            .collect()),
        FrequencyProfile::Geometric { p } => {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "geometric parameter {p} outside (0, 1]"
                )));
            }
            let log_q = (1.0 - p).ln();
            Ok((0..n_consonants)
                .map(|_| {
                    if *p == 1.0 {
                        return 1;
                    }
                    // u in (0, 1]; inverse CDF of the failure count.
                    let u = 1.0 - rng::unit_f64(rng);
                    let failures = (u.ln() / log_q).floor();
                    let f = if failures >= cap as f64 { cap } else { 1 + failures as u64 };
                    f.min(cap)
                })
                .collect())
        }
        FrequencyProfile::Explicit(freq) => {
            if freq.len() != n_consonants {
                return Err(Error::InvalidArgument(format!(
                    "explicit frequency vector has {} entries for {n_consonants} consonants",
                    freq.len()
                )));
            }
            if let Some((c, f)) = freq.iter().enumerate().find(|(_, &f)| f > cap) {
                return Err(Error::InvalidArgument(format!(
                    "explicit frequency {f} of consonant {c} exceeds {n_languages} languages"
                )));
            }
            Ok(freq.clone())
        }
    }
}

/// Packs consonant `c` into `freq[c]` distinct languages.
pub(crate) fn place(
    rng: &mut StreamRng,
    freq: &[u64],
    n_languages: usize,
    scratch: &mut Vec<usize>,
) -> Vec<Vec<usize>> {
    let mut inventories = vec![Vec::new(); n_languages];
    for (c, &f) in freq.iter().enumerate() {
        for l in rng::choose_distinct(rng, n_languages, f as usize, scratch) {
            inventories[l].push(c);
        }
    }
    inventories
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_language_corpus() -> InventoryCorpus {
        let catalog = FeatureCatalog::new(["a", "b"]).unwrap();
        let consonants = vec![
            Consonant {
                id: 0,
                symbol: "p".into(),
                features: FeatureVector::parse("10").unwrap(),
            },
            Consonant {
                id: 1,
                symbol: "t".into(),
                features: FeatureVector::parse("01").unwrap(),
            },
            Consonant {
                id: 2,
                symbol: "k".into(),
                features: FeatureVector::parse("11").unwrap(),
            },
        ];
        let languages = vec![
            Language {
                id: 0,
                name: "A".into(),
                inventory: vec![1, 0],
            },
            Language {
                id: 1,
                name: "B".into(),
                inventory: vec![0],
            },
        ];
        InventoryCorpus::new(catalog, consonants, languages).unwrap()
    }

    #[test]
    fn frequencies_count_languages() {
        let corpus = two_language_corpus();
        assert_eq!(consonant_frequencies(&corpus), vec![2, 1, 0]);
        assert_eq!(corpus.edge_count(), 3);
        assert_eq!(corpus.languages()[0].inventory, vec![0, 1]);
    }

    #[test]
    fn isolated_consonant_is_a_warning() {
        let corpus = two_language_corpus();
        let warnings = corpus.warnings();
        assert_eq!(warnings.len(), 1);
        assert!(matches!(warnings[0], CorpusWarning::IsolatedConsonant { id: 2, .. }));
    }

    #[test]
    fn smallest_legal_corpus() {
        let text = r#"
[features]
names = ["voiced"]

[[consonants]]
id = 0
symbol = "b"
features = "1"

[[languages]]
id = 0
name = "Solo"
inventory = "0"
"#;
        let corpus = parse_corpus(text).unwrap();
        assert_eq!(consonant_frequencies(&corpus), vec![1]);
    }

    #[test]
    fn dangling_consonant_is_named() {
        let text = r#"
[features]
names = ["voiced"]

[[consonants]]
id = 0
symbol = "b"
features = "1"

[[languages]]
id = 0
name = "Broken"
inventory = "0 4"
"#;
        let err = parse_corpus(text).unwrap_err().to_string();
        assert!(err.contains("Broken"), "{err}");
        assert!(err.contains("undefined consonant id 4"), "{err}");
    }

    #[test]
    fn feature_length_mismatch_is_named() {
        let text = r#"
[features]
names = ["voiced", "nasal"]

[[consonants]]
id = 0
symbol = "m"
features = "1"

[[languages]]
id = 0
name = "X"
inventory = "0"
"#;
        let err = parse_corpus(text).unwrap_err().to_string();
        assert!(err.contains("consonant 0 (m)"), "{err}");
    }

    #[test]
    fn duplicate_consonant_id_is_rejected() {
        let text = r#"
[features]
names = ["voiced"]

[[consonants]]
id = 0
symbol = "b"
features = "1"

[[consonants]]
id = 0
symbol = "d"
features = "1"

[[languages]]
id = 0
name = "X"
inventory = "0"
"#;
        let err = parse_corpus(text).unwrap_err().to_string();
        assert!(err.contains("duplicate id"), "{err}");
    }

    #[test]
    fn empty_inventory_rejected_on_load() {
        let text = r#"
[features]
names = ["voiced"]

[[consonants]]
id = 0
symbol = "b"
features = "1"

[[languages]]
id = 0
name = "Mute"
inventory = ""
"#;
        let err = parse_corpus(text).unwrap_err().to_string();
        assert!(err.contains("Mute") && err.contains("empty inventory"), "{err}");
    }

    #[test]
    fn duplicate_inventory_entry_rejected() {
        let catalog = FeatureCatalog::new(["a"]).unwrap();
        let consonants = vec![Consonant {
            id: 0,
            symbol: "p".into(),
            features: FeatureVector::parse("1").unwrap(),
        }];
        let languages = vec![Language {
            id: 0,
            name: "Dup".into(),
            inventory: vec![0, 0],
        }];
        assert!(InventoryCorpus::new(catalog, consonants, languages).is_err());
    }

    #[test]
    fn malformed_toml_is_a_parse_error() {
        assert!(matches!(parse_corpus("[features"), Err(Error::Parse(_))));
    }

    #[test]
    fn catalog_rejects_duplicates_and_blanks() {
        assert!(FeatureCatalog::new(["a", "a"]).is_err());
        assert!(FeatureCatalog::new([""]).is_err());
        assert!(FeatureCatalog::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn round_trip_through_text() {
        let corpus = two_language_corpus();
        let reloaded = parse_corpus(&corpus_to_string(&corpus)).unwrap();
        assert_eq!(reloaded, corpus);
    }

    #[test]
    fn synth_is_deterministic() {
        let cfg = SynthConfig::new(3, 4, 2, FrequencyProfile::Uniform, 7);
        assert_eq!(synthesize_corpus(&cfg).unwrap(), synthesize_corpus(&cfg).unwrap());
    }

    #[test]
    fn synth_explicit_frequencies_exact() {
        let cfg = SynthConfig::new(3, 3, 2, FrequencyProfile::Explicit(vec![3, 2, 1]), 11);
        let corpus = synthesize_corpus(&cfg).unwrap();
        assert_eq!(consonant_frequencies(&corpus), vec![3, 2, 1]);
    }

    #[test]
    fn synth_rejects_wrong_length_profile() {
        let cfg = SynthConfig::new(3, 4, 2, FrequencyProfile::Explicit(vec![3, 2, 1]), 11);
        assert!(matches!(synthesize_corpus(&cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn synth_rejects_frequency_above_language_count() {
        let cfg = SynthConfig::new(2, 1, 1, FrequencyProfile::Explicit(vec![3]), 0);
        assert!(synthesize_corpus(&cfg).is_err());
    }

    #[test]
    fn synth_rejects_zero_counts() {
        let cfg = SynthConfig::new(0, 4, 2, FrequencyProfile::Uniform, 1);
        assert!(synthesize_corpus(&cfg).is_err());
    }
}
