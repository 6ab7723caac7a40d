use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numfmt::sig12;
use crate::scalar::Scalar;
use crate::spectra::Spectrum;

/// Default minimum consonant frequency kept by the eigenvector classifier.
pub const DEFAULT_MIN_FREQ: u64 = 5;

/// Default neutral band, as a fraction of the largest component on each side.
pub const DEFAULT_NEUTRAL_FRACTION: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
    Neutral,
    Excluded,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Neutral => "neutral",
            Label::Excluded => "excluded",
        }
    }

    /// Positive and negative swap; the other labels are unchanged.
    pub fn opposite(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
            other => other,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            "neutral" => Ok(Label::Neutral),
            "excluded" => Ok(Label::Excluded),
            other => Err(Error::Parse(format!("unknown label {other:?}"))),
        }
    }
}

/// Thresholds that produced a labeling. `max_plus` / `max_minus` are `None`
/// when no surviving component has that sign; `fraction` and `min_freq` are
/// `None` for the plain sign split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<T> {
    pub max_plus: Option<T>,
    pub max_minus: Option<T>,
    pub fraction: Option<T>,
    pub min_freq: Option<u64>,
}

/// Per-node class assignment derived from one eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassLabeling<T> {
    pub node_ids: Vec<usize>,
    pub components: Vec<T>,
    pub labels: Vec<Label>,
    pub eigvec_index: usize,
    pub thresholds: Thresholds<T>,
}

impl<T: Scalar> ClassLabeling<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn members(&self, label: Label) -> Vec<usize> {
        self.node_ids
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == label)
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn label_of(&self, node_id: usize) -> Option<Label> {
        self.node_ids
            .iter()
            .position(|&id| id == node_id)
            .map(|i| self.labels[i])
    }

    /// CSV with header `node_id,name,component,label`. `names` is indexed by
    /// node id.
    pub fn write_csv<W: Write>(&self, out: &mut W, names: &[String]) -> std::io::Result<()> {
        writeln!(out, "node_id,name,component,label")?;
        for ((&id, &c), &l) in self.node_ids.iter().zip(&self.components).zip(&self.labels) {
            let name = names.get(id).map(String::as_str).unwrap_or("");
            writeln!(out, "{id},{name},{},{l}", sig12(c.to_f64_lossy()))?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`ClassLabeling::write_csv`]. Threshold
    /// metadata is not stored in the file; only ids, components and labels
    /// are recovered.
    pub fn read_csv<R: BufRead>(input: R, eigvec_index: usize) -> Result<Self> {
        let mut node_ids = Vec::new();
        let mut components = Vec::new();
        let mut labels = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                if line != "node_id,name,component,label" {
                    return Err(Error::Parse(format!("unexpected labeling header {line:?}")));
                }
                header_seen = true;
                continue;
            }
            let bad = || Error::Parse(format!("labeling line {}: {line:?}", lineno + 1));
            // Names may contain commas, so split from both ends.
            let (id, rest) = line.split_once(',').ok_or_else(bad)?;
            let (rest, label) = rest.rsplit_once(',').ok_or_else(bad)?;
            let (_, component) = rest.rsplit_once(',').ok_or_else(bad)?;
            node_ids.push(id.parse::<usize>().map_err(|_| bad())?);
            let c: f64 = component.parse().map_err(|_| bad())?;
            components.push(T::lit(c));
            labels.push(label.parse::<Label>()?);
        }
        Ok(ClassLabeling {
            node_ids,
            components,
            labels,
            eigvec_index,
            thresholds: Thresholds {
                max_plus: None,
                max_minus: None,
                fraction: None,
                min_freq: None,
            },
        })
    }
}

/// Fraction-of-maximum rule applied to raw components.
///
/// Nodes with `freq < min_freq` are excluded. Among the rest, a positive
/// component below `fraction · MAX₊` is neutral, otherwise positive; negative
/// components are handled symmetrically with `MAX₋ = |min component|`.
/// Zero components are neutral.
pub fn classify_components<T: Scalar>(
    components: &[T],
    freq: &[u64],
    min_freq: u64,
    fraction: T,
    eigvec_index: usize,
) -> Result<ClassLabeling<T>> {
    if freq.len() != components.len() {
        return Err(Error::InvalidArgument(format!(
            "frequency vector has length {}, eigenvector has {}",
            freq.len(),
            components.len()
        )));
    }
    if !(fraction > T::zero() && fraction < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "neutral fraction {fraction} outside (0, 1)"
        )));
    }
    let kept: Vec<bool> = freq.iter().map(|&f| f >= min_freq).collect();
    if !kept.iter().any(|&k| k) {
        return Err(Error::Insufficient(format!(
            "every node has frequency below {min_freq}"
        )));
    }
    let survivors = || components.iter().zip(&kept).filter(|(_, &k)| k).map(|(&c, _)| c);
    let max_plus = survivors().filter(|&c| c > T::zero()).fold(None, |m: Option<T>, c| {
        Some(m.map_or(c, |m| m.max(c)))
    });
    let max_minus = survivors().filter(|&c| c < T::zero()).fold(None, |m: Option<T>, c| {
        Some(m.map_or(-c, |m| m.max(-c)))
    });
    if max_plus.is_none() && max_minus.is_none() {
        return Err(Error::Insufficient(
            "all surviving eigenvector components are zero".into(),
        ));
    }

    let labels = components
        .iter()
        .zip(&kept)
        .map(|(&c, &k)| {
            if !k {
                Label::Excluded
            } else if c > T::zero() {
                let max = max_plus.expect("positive component exists");
                if c < fraction * max {
                    Label::Neutral
                } else {
                    Label::Positive
                }
            } else if c < T::zero() {
                let max = max_minus.expect("negative component exists");
                if -c < fraction * max {
                    Label::Neutral
                } else {
                    Label::Negative
                }
            } else {
                Label::Neutral
            }
        })
        .collect();

    Ok(ClassLabeling {
        node_ids: (0..components.len()).collect(),
        components: components.to_vec(),
        labels,
        eigvec_index,
        thresholds: Thresholds {
            max_plus,
            max_minus,
            fraction: Some(fraction),
            min_freq: Some(min_freq),
        },
    })
}

/// Consonant classes from eigenvector `eigvec_index` (0-based) of a PhoNet
/// spectrum. `freq` is aligned with the spectrum's node order.
pub fn classify_by_eigenvector<T: Scalar>(
    s: &Spectrum<T>,
    eigvec_index: usize,
    freq: &[u64],
    min_freq: u64,
    fraction: T,
) -> Result<ClassLabeling<T>> {
    if eigvec_index >= s.len() {
        return Err(Error::InvalidArgument(format!(
            "eigenvector index {eigvec_index} out of range for order {}",
            s.len()
        )));
    }
    let v = s.eigenvector(eigvec_index).to_vec();
    classify_components(&v, freq, min_freq, fraction, eigvec_index)
}

/// Plain sign split: positive, negative, exact zero → neutral.
pub fn classify_by_sign<T: Scalar>(components: &[T], eigvec_index: usize) -> Result<ClassLabeling<T>> {
    if components.iter().all(|&c| c == T::zero()) {
        return Err(Error::Insufficient("all eigenvector components are zero".into()));
    }
    let labels = components
        .iter()
        .map(|&c| {
            if c > T::zero() {
                Label::Positive
            } else if c < T::zero() {
                Label::Negative
            } else {
                Label::Neutral
            }
        })
        .collect();
    let max_plus = components.iter().copied().filter(|&c| c > T::zero()).reduce(T::max);
    let max_minus = components
        .iter()
        .copied()
        .filter(|&c| c < T::zero())
        .map(|c| -c)
        .reduce(T::max);
    Ok(ClassLabeling {
        node_ids: (0..components.len()).collect(),
        components: components.to_vec(),
        labels,
        eigvec_index,
        thresholds: Thresholds {
            max_plus,
            max_minus,
            fraction: None,
            min_freq: None,
        },
    })
}

/// Language classes from eigenvector `eigvec_index` (0-based) of a LangGraph
/// spectrum, by sign alone.
pub fn classify_languages<T: Scalar>(
    s_lang: &Spectrum<T>,
    eigvec_index: usize,
) -> Result<ClassLabeling<T>> {
    if eigvec_index >= s_lang.len() {
        return Err(Error::InvalidArgument(format!(
            "eigenvector index {eigvec_index} out of range for order {}",
            s_lang.len()
        )));
    }
    let v = s_lang.eigenvector(eigvec_index).to_vec();
    classify_by_sign(&v, eigvec_index)
}
