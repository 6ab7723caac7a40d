use std::fmt::Write as _;

use crate::corpus::InventoryCorpus;
use crate::error::{Error, Result};
use crate::netbuild::BipartiteMatrix;
use crate::numfmt::sig12;
use crate::scalar::Scalar;
use crate::typology::{ClassLabeling, Label};

/// `hits / pairs` for one (language class, consonant class) pair, kept as
/// exact counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrevalenceCell {
    /// `Σ_{l ∈ L} |inventory(l) ∩ C|`.
    pub hits: u64,
    /// `|L| · |C|`.
    pub pairs: u64,
}

impl PrevalenceCell {
    /// `None` when either class is empty.
    pub fn value(&self) -> Option<f64> {
        (self.pairs > 0).then(|| self.hits as f64 / self.pairs as f64)
    }
}

/// Normalised prevalence of consonant classes in language classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossPrevalenceTable {
    /// `[language class][consonant class]`, index 0 = positive, 1 = negative.
    cells: [[PrevalenceCell; 2]; 2],
}

const SIDES: [Label; 2] = [Label::Positive, Label::Negative];

fn side(label: Label) -> Result<usize> {
    match label {
        Label::Positive => Ok(0),
        Label::Negative => Ok(1),
        other => Err(Error::InvalidArgument(format!(
            "cross-prevalence is defined for positive/negative classes, not {other}"
        ))),
    }
}

impl CrossPrevalenceTable {
    pub fn cell(&self, languages: Label, consonants: Label) -> Result<PrevalenceCell> {
        Ok(self.cells[side(languages)?][side(consonants)?])
    }

    pub fn value(&self, languages: Label, consonants: Label) -> Result<Option<f64>> {
        Ok(self.cell(languages, consonants)?.value())
    }

    /// `(L+,C+), (L+,C−), (L−,C+), (L−,C−)`.
    pub fn quadruple(&self) -> [Option<f64>; 4] {
        [
            self.cells[0][0].value(),
            self.cells[0][1].value(),
            self.cells[1][0].value(),
            self.cells[1][1].value(),
        ]
    }

    pub fn cells(&self) -> [[PrevalenceCell; 2]; 2] {
        self.cells
    }

    /// Table with both sides swapped, as produced by flipping both eigenvectors.
    pub fn swapped(&self) -> Self {
        let c = self.cells;
        Self {
            cells: [[c[1][1], c[1][0]], [c[0][1], c[0][0]]],
        }
    }

    pub fn render(&self) -> String {
        let fmt = |c: PrevalenceCell| match c.value() {
            Some(v) => format!("{:>18}", sig12(v)),
            None => format!("{:>18}", "undefined"),
        };
        let mut out = String::new();
        writeln!(out, "{:<6}{:>18}{:>18}", "", "C+", "C-").unwrap();
        for (i, lab) in ["L+", "L-"].iter().enumerate() {
            writeln!(out, "{lab:<6}{}{}", fmt(self.cells[i][0]), fmt(self.cells[i][1])).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "{:<6}{:>18}{:>18}", "counts", "C+", "C-").unwrap();
        for (i, lab) in ["L+", "L-"].iter().enumerate() {
            let cell = |c: PrevalenceCell| format!("{:>18}", format!("{}/{}", c.hits, c.pairs));
            writeln!(out, "{lab:<6}{}{}", cell(self.cells[i][0]), cell(self.cells[i][1])).unwrap();
        }
        out
    }
}

fn check_ids(labels: &[usize], bound: usize, what: &str) -> Result<()> {
    match labels.iter().find(|&&id| id >= bound) {
        Some(id) => Err(Error::InvalidArgument(format!(
            "{what} labeling refers to id {id}, corpus has {bound}"
        ))),
        None => Ok(()),
    }
}

/// Cross-prevalence by set intersection over the inventories.
pub fn cross_prevalence<T: Scalar>(
    corpus: &InventoryCorpus,
    lang_labels: &ClassLabeling<T>,
    cons_labels: &ClassLabeling<T>,
) -> Result<CrossPrevalenceTable> {
    check_ids(&lang_labels.node_ids, corpus.n_languages(), "language")?;
    check_ids(&cons_labels.node_ids, corpus.n_consonants(), "consonant")?;
    let mut cells = [[PrevalenceCell { hits: 0, pairs: 0 }; 2]; 2];
    for (li, &lside) in SIDES.iter().enumerate() {
        let langs = lang_labels.members(lside);
        for (ci, &cside) in SIDES.iter().enumerate() {
            let mut in_class = vec![false; corpus.n_consonants()];
            let cons = cons_labels.members(cside);
            for &c in &cons {
                in_class[c] = true;
            }
            let hits = langs
                .iter()
                .map(|&l| {
                    corpus.languages()[l]
                        .inventory
                        .iter()
                        .filter(|&&c| in_class[c])
                        .count() as u64
                })
                .sum();
            cells[li][ci] = PrevalenceCell {
                hits,
                pairs: (langs.len() * cons.len()) as u64,
            };
        }
    }
    Ok(CrossPrevalenceTable { cells })
}

/// Cross-prevalence by summing the incidence-matrix block `A[C, L]`.
pub fn cross_prevalence_via_matrix<T: Scalar>(
    a: &BipartiteMatrix,
    lang_labels: &ClassLabeling<T>,
    cons_labels: &ClassLabeling<T>,
) -> Result<CrossPrevalenceTable> {
    check_ids(&lang_labels.node_ids, a.n_languages(), "language")?;
    check_ids(&cons_labels.node_ids, a.n_consonants(), "consonant")?;
    let entries = a.entries();
    let mut cells = [[PrevalenceCell { hits: 0, pairs: 0 }; 2]; 2];
    for (li, &lside) in SIDES.iter().enumerate() {
        let langs = lang_labels.members(lside);
        for (ci, &cside) in SIDES.iter().enumerate() {
            let cons = cons_labels.members(cside);
            let mut hits = 0u64;
            for &c in &cons {
                for &l in &langs {
                    hits += u64::from(entries[[c, l]]);
                }
            }
            cells[li][ci] = PrevalenceCell {
                hits,
                pairs: (langs.len() * cons.len()) as u64,
            };
        }
    }
    Ok(CrossPrevalenceTable { cells })
}
