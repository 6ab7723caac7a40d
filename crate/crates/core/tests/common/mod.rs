#![allow(dead_code)]

use ndarray::Array2;
use phonet_core::corpus::{Consonant, FeatureCatalog, FeatureVector, InventoryCorpus, Language};
use phonet_core::rng::{seeded, uniform_below, unit_f64, StreamRng};

/// Corpus from a membership matrix `member[l][c]` and per-consonant feature bits.
pub fn corpus_from_membership(
    features: &[Vec<bool>],
    member: &[Vec<bool>],
    allow_empty: bool,
) -> InventoryCorpus {
    let n_features = features.first().map_or(1, |f| f.len());
    let catalog = FeatureCatalog::numbered(n_features).unwrap();
    let consonants = features
        .iter()
        .enumerate()
        .map(|(id, bits)| Consonant {
            id,
            symbol: format!("c{id}"),
            features: FeatureVector::new(bits.clone()),
        })
        .collect();
    let languages = member
        .iter()
        .enumerate()
        .map(|(id, row)| Language {
            id,
            name: format!("L{id}"),
            inventory: row
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(c, _)| c)
                .collect(),
        })
        .collect();
    if allow_empty {
        InventoryCorpus::with_empty_languages(catalog, consonants, languages).unwrap()
    } else {
        InventoryCorpus::new(catalog, consonants, languages).unwrap()
    }
}

/// Random corpus with up to `max_c` consonants and `max_l` languages; every
/// language gets at least one consonant.
pub fn random_corpus(seed: u64, max_c: usize, max_l: usize, n_features: usize) -> InventoryCorpus {
    let mut rng = seeded(seed);
    let n_c = 1 + uniform_below(&mut rng, max_c as u64) as usize;
    let n_l = 1 + uniform_below(&mut rng, max_l as u64) as usize;
    let density = 0.1 + 0.8 * unit_f64(&mut rng);
    let features: Vec<Vec<bool>> = (0..n_c)
        .map(|_| (0..n_features).map(|_| unit_f64(&mut rng) < 0.5).collect())
        .collect();
    let member: Vec<Vec<bool>> = (0..n_l)
        .map(|_| {
            let mut row: Vec<bool> = (0..n_c).map(|_| unit_f64(&mut rng) < density).collect();
            if !row.iter().any(|&b| b) {
                row[uniform_below(&mut rng, n_c as u64) as usize] = true;
            }
            row
        })
        .collect();
    corpus_from_membership(&features, &member, false)
}

/// PhoNet weights by pairwise set intersection over the inventories.
pub fn brute_phonet(corpus: &InventoryCorpus) -> Array2<u64> {
    let n = corpus.n_consonants();
    let mut b = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                b[[i, j]] = corpus
                    .languages()
                    .iter()
                    .filter(|l| l.inventory.contains(&i) && l.inventory.contains(&j))
                    .count() as u64;
            }
        }
    }
    b
}

/// LangGraph weights by pairwise inventory intersection.
pub fn brute_langgraph(corpus: &InventoryCorpus) -> Array2<u64> {
    let langs = corpus.languages();
    let n = langs.len();
    let mut b = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                b[[i, j]] = langs[i]
                    .inventory
                    .iter()
                    .filter(|c| langs[j].inventory.contains(c))
                    .count() as u64;
            }
        }
    }
    b
}

pub fn random_symmetric_int(rng: &mut StreamRng, n: usize, bound: i64) -> Array2<f64> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = uniform_below(rng, (2 * bound + 1) as u64) as i64 - bound;
            m[[i, j]] = v as f64;
            m[[j, i]] = v as f64;
        }
    }
    m
}

/// Standard normal by Box–Muller.
pub fn normal(rng: &mut StreamRng) -> f64 {
    let u1 = 1.0 - unit_f64(rng);
    let u2 = unit_f64(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Pearson correlation computed from scratch.
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn frobenius(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}
