//! The consonant × language incidence matrix and its two one-mode projections.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use ndarray::Array2;

use crate::corpus::InventoryCorpus;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// 0/1 incidence matrix `A` with consonants on rows and languages on columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatrix {
    entries: Array2<u8>,
    consonant_ids: Vec<usize>,
    language_ids: Vec<usize>,
}

impl BipartiteMatrix {
    pub fn entries(&self) -> &Array2<u8> {
        &self.entries
    }

    pub fn consonant_ids(&self) -> &[usize] {
        &self.consonant_ids
    }

    pub fn language_ids(&self) -> &[usize] {
        &self.language_ids
    }

    pub fn n_consonants(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_languages(&self) -> usize {
        self.entries.ncols()
    }

    pub fn contains(&self, consonant: usize, language: usize) -> bool {
        self.entries[[consonant, language]] == 1
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e == 1).count()
    }

    /// Row sums, i.e. consonant frequencies.
    pub fn row_sums(&self) -> Vec<u64> {
        self.entries
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|&e| u64::from(e)).sum())
            .collect()
    }

    /// Column sums, i.e. inventory sizes.
    pub fn col_sums(&self) -> Vec<u64> {
        self.entries
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|&e| u64::from(e)).sum())
            .collect()
    }

    /// `consonant_id language_id` per incidence, row-major.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for ((c, l), &e) in self.entries.indexed_iter() {
            if e == 1 {
                writeln!(out, "{} {}", self.consonant_ids[c], self.language_ids[l])?;
            }
        }
        Ok(())
    }
}

pub fn build_bipartite(corpus: &InventoryCorpus) -> BipartiteMatrix {
    let mut entries = Array2::<u8>::zeros((corpus.n_consonants(), corpus.n_languages()));
    for lang in corpus.languages() {
        for &c in &lang.inventory {
            entries[[c, lang.id]] = 1;
        }
    }
    BipartiteMatrix {
        entries,
        consonant_ids: corpus.consonants().iter().map(|c| c.id).collect(),
        language_ids: corpus.languages().iter().map(|l| l.id).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkKind {
    /// Consonant co-occurrence network, `B = A·Aᵀ − D`.
    Phonet,
    /// Language overlap network, `B′ = Aᵀ·A − D′`.
    Langgraph,
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkKind::Phonet => "phonet",
            NetworkKind::Langgraph => "langgraph",
        })
    }
}

impl FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phonet" => Ok(NetworkKind::Phonet),
            "langgraph" => Ok(NetworkKind::Langgraph),
            other => Err(Error::Parse(format!("unknown network kind {other:?}"))),
        }
    }
}

/// Symmetric, zero-diagonal, integer-weighted adjacency matrix.
///
/// `removed_diagonal` keeps the diagonal of the Gram product that was
/// subtracted: consonant frequencies for PhoNet, inventory sizes for
/// LangGraph. It doubles as the orientation reference for eigenvectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceNetwork {
    weights: Array2<u64>,
    node_ids: Vec<usize>,
    kind: NetworkKind,
    removed_diagonal: Vec<u64>,
}

impl CooccurrenceNetwork {
    pub fn new(
        weights: Array2<u64>,
        node_ids: Vec<usize>,
        kind: NetworkKind,
        removed_diagonal: Vec<u64>,
    ) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::Validation(format!(
                "network matrix is {}x{}, expected square",
                n,
                weights.ncols()
            )));
        }
        if node_ids.len() != n || removed_diagonal.len() != n {
            return Err(Error::Validation(format!(
                "network of order {n} has {} node ids and {} diagonal entries",
                node_ids.len(),
                removed_diagonal.len()
            )));
        }
        for i in 0..n {
            if weights[[i, i]] != 0 {
                return Err(Error::Validation(format!("nonzero diagonal at node {i}")));
            }
            for j in (i + 1)..n {
                if weights[[i, j]] != weights[[j, i]] {
                    return Err(Error::Validation(format!(
                        "asymmetric weights between nodes {i} and {j}"
                    )));
                }
            }
        }
        Ok(Self {
            weights,
            node_ids,
            kind,
            removed_diagonal,
        })
    }

    pub fn weights(&self) -> &Array2<u64> {
        &self.weights
    }

    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn removed_diagonal(&self) -> &[u64] {
        &self.removed_diagonal
    }

    pub fn order(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[[i, j]]
    }

    /// Unordered pairs with positive weight.
    pub fn edge_count(&self) -> usize {
        let n = self.order();
        (0..n)
            .map(|i| ((i + 1)..n).filter(|&j| self.weights[[i, j]] > 0).count())
            .sum()
    }

    /// `Σ_{i<j} w(i, j)`.
    pub fn total_weight(&self) -> u64 {
        let n = self.order();
        (0..n)
            .map(|i| ((i + 1)..n).map(|j| self.weights[[i, j]]).sum::<u64>())
            .sum()
    }

    pub fn to_float<T: Scalar>(&self) -> Array2<T> {
        self.weights.mapv(|w| T::from_u64(w).expect("weight representable"))
    }

    pub fn removed_diagonal_float<T: Scalar>(&self) -> Vec<T> {
        self.removed_diagonal
            .iter()
            .map(|&d| T::from_u64(d).expect("count representable"))
            .collect()
    }

    /// `i j weight` per unordered positive pair, `i < j`, by node id.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let n = self.order();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weights[[i, j]];
                if w > 0 {
                    writeln!(out, "{} {} {}", self.node_ids[i], self.node_ids[j], w)?;
                }
            }
        }
        Ok(())
    }

    /// Dense text form:
    ///
    /// ```text
    /// kind phonet
    /// order 3
    /// ids 0 1 2
    /// diagonal 2 1 1
    /// matrix
    /// 0 1 1
    /// 1 0 0
    /// 1 0 0
    /// ```
    ///
    /// Lines starting with `#` are comments.
    pub fn write_dense<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "kind {}", self.kind)?;
        writeln!(out, "order {}", self.order())?;
        writeln!(out, "ids {}", join(&self.node_ids))?;
        writeln!(out, "diagonal {}", join(&self.removed_diagonal))?;
        writeln!(out, "matrix")?;
        for row in self.weights.rows() {
            writeln!(out, "{}", join(row.iter()))?;
        }
        Ok(())
    }

    pub fn read_dense<R: BufRead>(input: R) -> Result<Self> {
        let mut kind = None;
        let mut order = None;
        let mut ids = None;
        let mut diagonal = None;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut in_matrix = false;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: String| Error::Parse(format!("network line {}: {msg}", lineno + 1));
            if in_matrix {
                rows.push(parse_numbers(line).map_err(at)?);
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match key {
                "kind" => kind = Some(rest.trim().parse::<NetworkKind>()?),
                "order" => {
                    order = Some(
                        rest.trim()
                            .parse::<usize>()
                            .map_err(|e| at(format!("bad order: {e}")))?,
                    )
                }
                "ids" => {
                    ids = Some(
                        parse_numbers(rest)
                            .map_err(at)?
                            .into_iter()
                            .map(|x| x as usize)
                            .collect::<Vec<_>>(),
                    )
                }
                "diagonal" => diagonal = Some(parse_numbers(rest).map_err(at)?),
                "matrix" => in_matrix = true,
                other => return Err(at(format!("unexpected key {other:?}"))),
            }
        }
        let missing = |what: &str| Error::Parse(format!("network file lacks a {what} line"));
        let kind = kind.ok_or_else(|| missing("kind"))?;
        let order = order.ok_or_else(|| missing("order"))?;
        let ids = ids.ok_or_else(|| missing("ids"))?;
        let diagonal = diagonal.ok_or_else(|| missing("diagonal"))?;
        if rows.len() != order || rows.iter().any(|r| r.len() != order) {
            return Err(Error::Parse(format!(
                "network matrix is not {order}x{order}"
            )));
        }
        let weights = Array2::from_shape_fn((order, order), |(i, j)| rows[i][j]);
        Self::new(weights, ids, kind, diagonal)
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_numbers(s: &str) -> std::result::Result<Vec<u64>, String> {
    s.split_whitespace()
        .map(|tok| tok.parse::<u64>().map_err(|_| format!("bad integer {tok:?}")))
        .collect()
}

fn incidence_u64(a: &BipartiteMatrix) -> Array2<u64> {
    a.entries.mapv(u64::from)
}

/// `B = A·Aᵀ − D`: weight `(i, j)` counts languages containing both consonants.
pub fn project_phonet(a: &BipartiteMatrix) -> CooccurrenceNetwork {
    let m = incidence_u64(a);
    let mut weights = m.dot(&m.t());
    let diag = zero_diagonal(&mut weights);
    CooccurrenceNetwork {
        weights,
        node_ids: a.consonant_ids.clone(),
        kind: NetworkKind::Phonet,
        removed_diagonal: diag,
    }
}

/// `B′ = Aᵀ·A − D′`: weight `(l, m)` is the size of the shared inventory.
pub fn project_langgraph(a: &BipartiteMatrix) -> CooccurrenceNetwork {
    let m = incidence_u64(a);
    let mut weights = m.t().dot(&m);
    let diag = zero_diagonal(&mut weights);
    CooccurrenceNetwork {
        weights,
        node_ids: a.language_ids.clone(),
        kind: NetworkKind::Langgraph,
        removed_diagonal: diag,
    }
}

fn zero_diagonal(weights: &mut Array2<u64>) -> Vec<u64> {
    weights
        .diag_mut()
        .iter_mut()
        .map(std::mem::take)
        .collect()
}
