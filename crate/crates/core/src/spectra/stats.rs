use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectra::Spectrum;

/// Fixed-width histogram of eigenvalues over half-open bins `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSpectrum<T> {
    pub bin_width: T,
    /// `counts.len() + 1` edges, the first equal to the smallest eigenvalue.
    pub bin_edges: Vec<T>,
    pub counts: Vec<usize>,
}

impl<T: Scalar> BinnedSpectrum<T> {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> impl Iterator<Item = (T, T, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.bin_edges[i], self.bin_edges[i + 1], c))
    }

    /// Index of the bin holding `value`, if it lies inside the covered range.
    pub fn bin_of(&self, value: T) -> Option<usize> {
        let lo = *self.bin_edges.first()?;
        if value < lo {
            return None;
        }
        let idx = ((value - lo) / self.bin_width).floor().to_usize()?;
        (idx < self.counts.len()).then_some(idx)
    }
}

pub fn bin_values<T: Scalar>(values: &[T], bin_width: T) -> Result<BinnedSpectrum<T>> {
    if !(bin_width > T::zero()) || !bin_width.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bin width {bin_width} must be positive"
        )));
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot bin an empty spectrum".into()));
    }
    let lo = values.iter().copied().fold(T::infinity(), T::min);
    let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
    let n_bins = ((hi - lo) / bin_width).floor().to_usize().unwrap_or(0) + 1;
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let idx = ((v - lo) / bin_width).floor().to_usize().unwrap_or(0);
        counts[idx.min(n_bins - 1)] += 1;
    }
    let bin_edges = (0..=n_bins)
        .map(|i| lo + bin_width * T::from_usize(i).expect("bin index fits"))
        .collect();
    Ok(BinnedSpectrum {
        bin_width,
        bin_edges,
        counts,
    })
}

/// Histogram of the spectrum with bins of `bin_width` starting at `min λ`.
pub fn bin_spectrum<T: Scalar>(s: &Spectrum<T>, bin_width: T) -> Result<BinnedSpectrum<T>> {
    bin_values(s.eigenvalues(), bin_width)
}

/// Share of `Σ λ²` (the squared Frobenius norm) carried by the `k`
/// eigenvalues of largest magnitude.
pub fn frobenius_fraction<T: Scalar>(s: &Spectrum<T>, k: usize) -> Result<T> {
    if k == 0 || k > s.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 1..={}",
            s.len()
        )));
    }
    Ok(frobenius_fractions(s, k)?[k - 1])
}

/// Cumulative fractions for `k = 1..=k_max`.
pub fn frobenius_fractions<T: Scalar>(s: &Spectrum<T>, k_max: usize) -> Result<Vec<T>> {
    let total: T = s.eigenvalues().iter().map(|&l| l * l).sum();
    if total == T::zero() {
        return Err(Error::ZeroMatrix("Frobenius fraction of a zero spectrum"));
    }
    let k_max = k_max.min(s.len());
    let mut acc = T::zero();
    let mut out: Vec<T> = s
        .indices_by_magnitude()
        .into_iter()
        .take(k_max)
        .map(|i| {
            let l = s.eigenvalue(i);
            acc += l * l;
            (acc / total).min(T::one())
        })
        .collect();
    if k_max == s.len() {
        if let Some(last) = out.last_mut() {
            *last = T::one();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumEnd {
    Positive,
    Negative,
}

impl fmt::Display for SpectrumEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumEnd::Positive => "positive",
            SpectrumEnd::Negative => "negative",
        })
    }
}

/// Least-squares line through `(log10 rank, log10 |λ|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit<T> {
    pub exponent: T,
    pub intercept: T,
    pub r_squared: T,
    pub n_points: usize,
    pub end: SpectrumEnd,
    /// Number of leading eigenvalues skipped before the fitted window.
    pub rank_offset: usize,
}

/// `|λ|` of the eigenvalues on one end of the spectrum, largest first.
/// Eigenvalues within the spectrum's zero threshold are dropped.
pub fn ranked_magnitudes<T: Scalar>(s: &Spectrum<T>, end: SpectrumEnd) -> Vec<T> {
    let zero = s.zero_threshold();
    let mut out: Vec<T> = s
        .eigenvalues()
        .iter()
        .copied()
        .filter(|&l| match end {
            SpectrumEnd::Positive => l > zero,
            SpectrumEnd::Negative => l < -zero,
        })
        .map(T::abs)
        .collect();
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    out
}

/// Power-law fit over ranks `1..=top_k` of one end of the spectrum.
pub fn fit_power_law_tail<T: Scalar>(
    s: &Spectrum<T>,
    end: SpectrumEnd,
    top_k: usize,
) -> Result<PowerLawFit<T>> {
    fit_power_law_tail_offset(s, end, top_k, 0)
}

/// As [`fit_power_law_tail`] but skipping the first `rank_offset` eigenvalues;
/// fitted points keep their original ranks `rank_offset + 1 ..`.
pub fn fit_power_law_tail_offset<T: Scalar>(
    s: &Spectrum<T>,
    end: SpectrumEnd,
    top_k: usize,
    rank_offset: usize,
) -> Result<PowerLawFit<T>> {
    let ranked = ranked_magnitudes(s, end);
    if ranked.len() < rank_offset + top_k {
        return Err(Error::Insufficient(format!(
            "{} end has {} nonzero eigenvalues, fit needs {}",
            end,
            ranked.len(),
            rank_offset + top_k
        )));
    }
    let window = &ranked[rank_offset..rank_offset + top_k];
    let ranks: Vec<T> = (rank_offset + 1..=rank_offset + top_k)
        .map(|r| T::from_usize(r).expect("rank fits"))
        .collect();
    let (exponent, intercept, r_squared) = fit_log_log(&ranks, window)?;
    Ok(PowerLawFit {
        exponent,
        intercept,
        r_squared,
        n_points: top_k,
        end,
        rank_offset,
    })
}

/// Ordinary least squares of `log10 y` on `log10 x`. Returns
/// `(slope, intercept, R²)`; `R²` is 1 when `y` is constant and fitted exactly.
pub fn fit_log_log<T: Scalar>(x: &[T], y: &[T]) -> Result<(T, T, T)> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("x and y lengths differ".into()));
    }
    if x.len() < 2 {
        return Err(Error::Insufficient("a line fit needs at least two points".into()));
    }
    if x.iter().chain(y).any(|&v| !(v > T::zero())) {
        return Err(Error::InvalidArgument("log-log fit needs positive data".into()));
    }
    let lx: Vec<T> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.log10()).collect();
    let n = T::from_usize(lx.len()).expect("length fits");
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxx: T = lx.iter().map(|&a| (a - mx) * (a - mx)).sum();
    let sxy: T = lx.iter().zip(&ly).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    if sxx == T::zero() {
        return Err(Error::ZeroVariance("log rank"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: T = ly.iter().map(|&b| (b - my) * (b - my)).sum();
    let ss_res: T = lx
        .iter()
        .zip(&ly)
        .map(|(&a, &b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    let r2 = if ss_tot == T::zero() {
        T::one()
    } else {
        (T::one() - ss_res / ss_tot).max(T::zero()).min(T::one())
    };
    Ok((slope, intercept, r2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult<T> {
    pub r: T,
    pub n: usize,
}

/// Pearson product-moment correlation.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<CorrelationResult<T>> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "correlation inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Insufficient("correlation needs at least two samples".into()));
    }
    let n = T::from_usize(x.len()).expect("length fits");
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == T::zero() {
        return Err(Error::ZeroVariance("first correlation variable"));
    }
    if syy == T::zero() {
        return Err(Error::ZeroVariance("second correlation variable"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one());
    Ok(CorrelationResult { r, n: x.len() })
}

/// Pearson `r` between the components of eigenvector `index` and `freq`.
pub fn eigvec_frequency_correlation<T: Scalar>(
    s: &Spectrum<T>,
    index: usize,
    freq: &[T],
) -> Result<CorrelationResult<T>> {
    if index >= s.len() {
        return Err(Error::InvalidArgument(format!(
            "eigenvector index {index} out of range for order {}",
            s.len()
        )));
    }
    if freq.len() != s.len() {
        return Err(Error::InvalidArgument(format!(
            "frequency vector has length {}, spectrum has order {}",
            freq.len(),
            s.len()
        )));
    }
    let v = s.eigenvector(index).to_vec();
    pearson(&v, freq)
}
