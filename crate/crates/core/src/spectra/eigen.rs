//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.

use std::ops::Range;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Relative tolerance on `|m_ij − m_ji| / ‖M‖_F` accepted as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative gap `/ ‖M‖_F` below which neighbouring eigenvalues are treated as one
/// degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Relative magnitude below which an orientation dot product counts as zero.
pub const ORIENTATION_TOL: f64 = 1e-12;

/// Full eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are stored in descending order of signed value; column `k` of
/// [`Spectrum::eigenvectors`] belongs to eigenvalue `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    eigenvalues: Vec<T>,
    eigenvectors: Array2<T>,
    residual_norms: Vec<T>,
    source_frobenius: T,
    source_trace: T,
    tol: T,
    sweeps: usize,
    degenerate_clusters: Vec<Range<usize>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> T {
        self.eigenvalues[k]
    }

    pub fn eigenvectors(&self) -> &Array2<T> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> ArrayView1<'_, T> {
        self.eigenvectors.column(k)
    }

    /// `‖M·x_k − λ_k·x_k‖₂` per eigenpair, against the input matrix.
    pub fn residual_norms(&self) -> &[T] {
        &self.residual_norms
    }

    pub fn max_residual(&self) -> T {
        self.residual_norms
            .iter()
            .copied()
            .fold(T::zero(), T::max)
    }

    pub fn source_frobenius(&self) -> T {
        self.source_frobenius
    }

    pub fn source_trace(&self) -> T {
        self.source_trace
    }

    pub fn tolerance(&self) -> T {
        self.tol
    }

    /// Magnitude below which an eigenvalue is indistinguishable from zero:
    /// `tol · ‖M‖_F`.
    pub fn zero_threshold(&self) -> T {
        self.tol * self.source_frobenius
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Index ranges of numerically degenerate eigenvalue clusters (size ≥ 2).
    /// Individual eigenvectors inside a cluster are an arbitrary orthonormal
    /// basis of the eigenspace.
    pub fn degenerate_clusters(&self) -> &[Range<usize>] {
        &self.degenerate_clusters
    }

    pub fn is_degenerate(&self, k: usize) -> bool {
        self.degenerate_clusters.iter().any(|r| r.contains(&k))
    }

    /// Indices ordered by `|λ|` descending; ties keep the stored order.
    pub fn indices_by_magnitude(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.eigenvalues[b]
                .abs()
                .partial_cmp(&self.eigenvalues[a].abs())
                .expect("finite eigenvalues")
        });
        idx
    }

    /// Orients every eigenvector so that its dot product with `reference` is
    /// non-negative. When that product is within `1e-12 · ‖reference‖` of zero
    /// the first largest-magnitude component is made positive instead.
    pub fn orient(&mut self, reference: &[T]) -> Result<()> {
        if reference.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "orientation reference has length {}, spectrum has order {}",
                reference.len(),
                self.len()
            )));
        }
        let ref_norm = reference.iter().map(|&r| r * r).sum::<T>().sqrt();
        let cutoff = T::lit(ORIENTATION_TOL) * ref_norm;
        for k in 0..self.len() {
            let dot: T = self
                .eigenvectors
                .column(k)
                .iter()
                .zip(reference)
                .map(|(&x, &r)| x * r)
                .sum();
            let flip = if dot.abs() > cutoff {
                dot < T::zero()
            } else {
                leading_component_negative(self.eigenvectors.column(k))
            };
            if flip {
                self.eigenvectors.column_mut(k).mapv_inplace(|x| -x);
            }
        }
        Ok(())
    }

    /// Copy with every eigenvector negated.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        out.eigenvectors.mapv_inplace(|x| -x);
        out
    }

    /// `Σ λ_k x_k x_kᵀ`.
    pub fn reconstruct(&self) -> Array2<T> {
        let n = self.len();
        let mut m = Array2::<T>::zeros((n, n));
        for k in 0..n {
            let v = self.eigenvectors.column(k);
            let lam = self.eigenvalues[k];
            for i in 0..n {
                let s = lam * v[i];
                for j in 0..n {
                    m[[i, j]] += s * v[j];
                }
            }
        }
        m
    }
}

fn leading_component_negative<T: Scalar>(v: ArrayView1<'_, T>) -> bool {
    let max = v.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    // Near-ties between components resolve to the earliest index.
    let cutoff = max * (T::one() - T::lit(1e-8));
    v.iter()
        .find(|x| x.abs() >= cutoff)
        .is_some_and(|&x| x < T::zero())
}

/// Eigendecomposition of a symmetric matrix.
///
/// Every returned pair satisfies `‖M·x − λ·x‖ ≤ tol · ‖M‖_F`; otherwise the
/// call fails with [`Error::NotConverged`]. Eigenvectors are oriented by the
/// largest-magnitude-component rule; use [`eig_symmetric_oriented`] or
/// [`Spectrum::orient`] to orient against a frequency vector.
pub fn eig_symmetric<T: Scalar>(m: ArrayView2<'_, T>, tol: T) -> Result<Spectrum<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, expected square",
            n,
            m.ncols()
        )));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }

    let frob = m.iter().map(|&x| x * x).sum::<T>().sqrt();
    let sym_cutoff = T::lit(SYMMETRY_TOL).max(T::epsilon() * T::lit(4.0)) * frob;
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (m[[i, j]] - m[[j, i]]).abs();
            if diff > sym_cutoff {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    diff: diff.to_f64_lossy(),
                });
            }
        }
    }

    // Work on the exactly-symmetric part, row-major.
    let half = T::lit(0.5);
    let source = Array2::from_shape_fn((n, n), |(i, j)| half * (m[[i, j]] + m[[j, i]]));
    let mut a: Vec<T> = source.iter().copied().collect();
    // Row k of `vt` is eigenvector k.
    let mut vt = vec![T::zero(); n * n];
    for k in 0..n {
        vt[k * n + k] = T::one();
    }

    let threshold = T::epsilon() * frob;
    let mut sweeps = 0;
    let mut converged = n <= 1;
    while !converged && sweeps < MAX_SWEEPS {
        let off_max = off_diagonal_max(&a, n);
        if off_max <= threshold {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= threshold {
                    continue;
                }
                rotate(&mut a, &mut vt, n, p, q);
            }
        }
    }
    if !converged && off_diagonal_max(&a, n) <= threshold {
        converged = true;
    }

    let raw_values: Vec<T> = (0..n).map(|k| a[k * n + k]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        raw_values[y]
            .partial_cmp(&raw_values[x])
            .expect("finite eigenvalues")
            .then(x.cmp(&y))
    });
    let eigenvalues: Vec<T> = order.iter().map(|&k| raw_values[k]).collect();
    let mut eigenvectors = Array2::from_shape_fn((n, n), |(i, k)| vt[order[k] * n + i]);

    for k in 0..n {
        if leading_component_negative(eigenvectors.column(k)) {
            eigenvectors.column_mut(k).mapv_inplace(|x| -x);
        }
    }

    let residual_norms = residuals(&source, &eigenvalues, &eigenvectors);
    let worst = residual_norms.iter().copied().fold(T::zero(), T::max);
    if !converged || worst > tol * frob {
        return Err(Error::NotConverged {
            sweeps,
            worst_residual: worst.to_f64_lossy(),
        });
    }

    let degenerate_clusters = clusters(&eigenvalues, T::lit(DEGENERACY_TOL) * frob);
    let source_trace = (0..n).map(|i| source[[i, i]]).sum();

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residual_norms,
        source_frobenius: frob,
        source_trace,
        tol,
        sweeps,
        degenerate_clusters,
    })
}

/// [`eig_symmetric`] followed by [`Spectrum::orient`] against `reference`.
pub fn eig_symmetric_oriented<T: Scalar>(
    m: ArrayView2<'_, T>,
    tol: T,
    reference: &[T],
) -> Result<Spectrum<T>> {
    let mut s = eig_symmetric(m, tol)?;
    s.orient(reference)?;
    Ok(s)
}

fn off_diagonal_max<T: Scalar>(a: &[T], n: usize) -> T {
    let mut max = T::zero();
    for p in 0..n {
        for q in (p + 1)..n {
            max = max.max(a[p * n + q].abs());
        }
    }
    max
}

/// Applies the Jacobi rotation that annihilates `a[p][q]`, `p < q`.
fn rotate<T: Scalar>(a: &mut [T], vt: &mut [T], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let two = T::lit(2.0);
    let theta = (aqq - app) / (two * apq);
    let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
        T::one() / (two * theta)
    } else {
        let sign = if theta < T::zero() { -T::one() } else { T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = T::zero();
    a[q * n + p] = T::zero();

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }

    let (row_p, row_q) = {
        let (head, tail) = vt.split_at_mut(q * n);
        (&mut head[p * n..p * n + n], &mut tail[..n])
    };
    for (vp, vq) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let x = *vp;
        let y = *vq;
        *vp = c * x - s * y;
        *vq = s * x + c * y;
    }
}

fn residuals<T: Scalar>(m: &Array2<T>, values: &[T], vectors: &Array2<T>) -> Vec<T> {
    let n = values.len();
    (0..n)
        .map(|k| {
            let v = vectors.column(k);
            (0..n)
                .map(|i| {
                    let mv: T = m.row(i).iter().zip(v.iter()).map(|(&a, &b)| a * b).sum();
                    let r = mv - values[k] * v[i];
                    r * r
                })
                .sum::<T>()
                .sqrt()
        })
        .collect()
}

fn clusters<T: Scalar>(sorted_desc: &[T], gap: T) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted_desc.len() {
        let split = k == sorted_desc.len() || sorted_desc[k - 1] - sorted_desc[k] > gap;
        if split {
            if k - start >= 2 {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn diagonal_matrix() {
        let m = array![[3.0, 0.0], [0.0, 1.0]];
        let s = eig_symmetric(m.view(), 1e-8).unwrap();
        assert_eq!(s.eigenvalues(), &[3.0, 1.0]);
        assert_eq!(s.eigenvector(0).to_vec(), vec![1.0, 0.0]);
        assert_eq!(s.eigenvector(1).to_vec(), vec![0.0, 1.0]);
        assert_eq!(s.sweeps(), 0);
    }

    #[test]
    fn two_by_two_off_diagonal() {
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        let s = eig_symmetric(m.view(), 1e-8).unwrap();
        assert_abs_diff_eq!(s.eigenvalue(0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalue(1), -1.0, epsilon = 1e-15);
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(s.eigenvector(0)[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvector(0)[1], h, epsilon = 1e-15);
    }

    #[test]
    fn three_by_three_known_values() {
        // Eigenvalues 2, 1, 11 with closed-form vectors.
        let m = array![[2.0, 0.0, 0.0], [0.0, 3.0, 4.0], [0.0, 4.0, 9.0]];
        let s = eig_symmetric(m.view(), 1e-10).unwrap();
        assert_abs_diff_eq!(s.eigenvalue(0), 11.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.eigenvalue(1), 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.eigenvalue(2), 1.0, epsilon = 1e-13);
        let d = 1.0 / 5.0f64.sqrt();
        assert_abs_diff_eq!(s.eigenvector(0)[1], d, epsilon = 1e-13);
        assert_abs_diff_eq!(s.eigenvector(0)[2], 2.0 * d, epsilon = 1e-13);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = array![[0.0, 1.0], [2.0, 0.0]];
        assert!(matches!(
            eig_symmetric(m.view(), 1e-8),
            Err(Error::NotSymmetric { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn rejects_non_square_and_bad_tol() {
        let m = ndarray::Array2::<f64>::zeros((2, 3));
        assert!(eig_symmetric(m.view(), 1e-8).is_err());
        let m = ndarray::Array2::<f64>::eye(2);
        assert!(eig_symmetric(m.view(), 0.0).is_err());
    }

    #[test]
    fn zero_matrix_is_fine() {
        let m = ndarray::Array2::<f64>::zeros((3, 3));
        let s = eig_symmetric(m.view(), 1e-8).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 0.0, 0.0]);
        assert_eq!(s.degenerate_clusters().len(), 1);
        assert_eq!(s.degenerate_clusters()[0], 0..3);
    }

    #[test]
    fn identity_is_one_degenerate_cluster() {
        let m = ndarray::Array2::<f64>::eye(4);
        let s = eig_symmetric(m.view(), 1e-8).unwrap();
        assert_eq!(s.degenerate_clusters().len(), 1);
        assert_eq!(s.degenerate_clusters()[0], 0..4);
        assert!(s.is_degenerate(2));
    }

    #[test]
    fn orientation_follows_reference() {
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        let mut s = eig_symmetric(m.view(), 1e-8).unwrap();
        s.orient(&[1.0, 3.0]).unwrap();
        // Second eigenvector (1, -1)/√2 has negative dot with the reference.
        assert!(s.eigenvector(1)[1] > 0.0);
        assert!(s.orient(&[1.0]).is_err());
    }

    #[test]
    fn orientation_falls_back_when_orthogonal() {
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        let mut s = eig_symmetric(m.view(), 1e-8).unwrap();
        s.orient(&[1.0, 1.0]).unwrap();
        // (1, -1)/√2 is orthogonal to (1, 1): first largest component positive.
        assert!(s.eigenvector(1)[0] > 0.0);
    }

    #[test]
    fn single_precision_works() {
        let m = array![[2.0f32, 1.0], [1.0, 2.0]];
        let s = eig_symmetric(m.view(), 1e-5).unwrap();
        assert_abs_diff_eq!(s.eigenvalue(0), 3.0, epsilon = 1e-5);
        assert_abs_diff_eq!(s.eigenvalue(1), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn deterministic() {
        let m = array![[1.0, 2.0, 3.0], [2.0, 3.0, 2.0], [3.0, 2.0, 2.0]];
        let a = eig_symmetric(m.view(), 1e-10).unwrap();
        let b = eig_symmetric(m.view(), 1e-10).unwrap();
        assert_eq!(a, b);
    }
}
