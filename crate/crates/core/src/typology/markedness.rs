use std::io::Write;

use crate::corpus::{consonant_frequencies, InventoryCorpus};
use crate::error::{Error, Result};
use crate::numfmt::sig12;
use crate::scalar::Scalar;
use crate::spectra::Spectrum;

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageOverlap {
    pub language_id: usize,
    pub size: usize,
    /// `|inventory ∩ top_size(hierarchy)|`.
    pub hits: usize,
    /// `hits / size`; `None` for an empty inventory.
    pub overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkednessReport {
    /// Consonant ids from least to most marked.
    pub hierarchy: Vec<usize>,
    pub per_language: Vec<LanguageOverlap>,
    /// Unweighted mean over languages with non-empty inventories.
    pub mean_overlap: f64,
}

impl MarkednessReport {
    pub fn write_csv<W: Write>(&self, out: &mut W, corpus: &InventoryCorpus) -> std::io::Result<()> {
        writeln!(out, "# hierarchy ties: higher frequency first, then lower consonant id")?;
        writeln!(out, "# mean_overlap {}", sig12(self.mean_overlap))?;
        writeln!(out, "language_id,name,size,hits,overlap")?;
        for row in &self.per_language {
            let name = &corpus.languages()[row.language_id].name;
            let overlap = row.overlap.map_or_else(|| "undefined".into(), sig12);
            writeln!(out, "{},{},{},{},{}", row.language_id, name, row.size, row.hits, overlap)?;
        }
        Ok(())
    }

    pub fn write_hierarchy_csv<W: Write>(
        &self,
        out: &mut W,
        corpus: &InventoryCorpus,
        components: &[f64],
    ) -> std::io::Result<()> {
        let freq = consonant_frequencies(corpus);
        writeln!(out, "rank,consonant_id,symbol,frequency,component")?;
        for (rank, &c) in self.hierarchy.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                rank + 1,
                c,
                corpus.consonants()[c].symbol,
                freq[c],
                sig12(components[c])
            )?;
        }
        Ok(())
    }
}

/// Consonants sorted by non-increasing component; ties by higher frequency,
/// then lower id.
pub fn markedness_hierarchy<T: Scalar>(components: &[T], freq: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by(|&a, &b| {
        components[b]
            .partial_cmp(&components[a])
            .expect("finite components")
            .then(freq[b].cmp(&freq[a]))
            .then(a.cmp(&b))
    });
    order
}

/// Overlap of each inventory of size `s` with the first `s` entries of the
/// hierarchy induced by the principal eigenvector of `s`.
pub fn markedness_overlap<T: Scalar>(
    corpus: &InventoryCorpus,
    s: &Spectrum<T>,
) -> Result<MarkednessReport> {
    if s.len() != corpus.n_consonants() {
        return Err(Error::InvalidArgument(format!(
            "spectrum has order {}, corpus has {} consonants",
            s.len(),
            corpus.n_consonants()
        )));
    }
    let components = s.eigenvector(0).to_vec();
    let hierarchy = markedness_hierarchy(&components, &consonant_frequencies(corpus));
    Ok(overlap_with_hierarchy(corpus, hierarchy))
}

pub fn overlap_with_hierarchy(corpus: &InventoryCorpus, hierarchy: Vec<usize>) -> MarkednessReport {
    let mut rank = vec![0usize; hierarchy.len()];
    for (r, &c) in hierarchy.iter().enumerate() {
        rank[c] = r;
    }
    let per_language: Vec<LanguageOverlap> = corpus
        .languages()
        .iter()
        .map(|l| {
            let size = l.size();
            let hits = l.inventory.iter().filter(|&&c| rank[c] < size).count();
            LanguageOverlap {
                language_id: l.id,
                size,
                hits,
                overlap: (size > 0).then(|| hits as f64 / size as f64),
            }
        })
        .collect();
    let defined: Vec<f64> = per_language.iter().filter_map(|o| o.overlap).collect();
    let mean_overlap = if defined.is_empty() {
        f64::NAN
    } else {
        defined.iter().sum::<f64>() / defined.len() as f64
    };
    MarkednessReport {
        hierarchy,
        per_language,
        mean_overlap,
    }
}
