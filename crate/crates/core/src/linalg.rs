//! Dense linear algebra sized for the solver core.
//!
//! Everything in this crate works on matrices of a few hundred rows, so the
//! kernels below are written for clarity over blocking tricks: row-major
//! storage, straight triple loops, and factorizations that fail loudly with
//! the offending index instead of limping on. The eigendecomposition of the
//! second-difference matrix is analytic, which gives the rest of the crate an
//! exactly orthogonal spectral basis to build fractional powers from.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a `rows x cols` matrix with entries `f(i, j)` (zero-based).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec length mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Computes `A^T x` without forming the transpose.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "tr_matvec length mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi != 0.0 {
                for (o, &a) in out.iter_mut().zip(self.row(i)) {
                    *o += xi * a;
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik != 0.0 {
                    let orow = k * other.cols;
                    let out_row = i * other.cols;
                    for j in 0..other.cols {
                        out.data[out_row + j] += aik * other.data[orow + j];
                    }
                }
            }
        }
        out
    }

    /// Gram matrix `A^T A`; exploits symmetry of the result.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut out = DenseMatrix::zeros(n, n);
        for k in 0..self.rows {
            let r = self.row(k);
            for i in 0..n {
                let ri = r[i];
                if ri != 0.0 {
                    for j in i..n {
                        out.data[i * n + j] += ri * r[j];
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[i * n + j] = out.data[j * n + i];
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self + alpha * other`, written into `out` (all same shape).
    pub fn add_scaled_into(&self, other: &DenseMatrix, alpha: f64, out: &mut DenseMatrix) {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.rows, out.rows);
        assert_eq!(self.cols, out.cols);
        for ((o, &a), &b) in out.data.iter_mut().zip(&self.data).zip(&other.data) {
            *o = a + alpha * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|` over all pairs; zero for an exactly symmetric matrix.
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                defect = defect.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        defect
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition of a symmetric matrix: `values[k]` pairs with column `k`
/// of `vectors`, listed in ascending order.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Assembles `V diag(d) V^T` for caller-supplied diagonal entries.
    pub fn assemble_with(&self, diag: &[f64]) -> DenseMatrix {
        let n = self.dim();
        assert_eq!(diag.len(), n);
        let v = &self.vectors;
        let mut out = DenseMatrix::zeros(n, n);
        for k in 0..n {
            let dk = diag[k];
            if dk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v.get(i, k) * dk;
                for j in i..n {
                    out.data[i * n + j] += vik * v.get(j, k);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[i * n + j] = out.data[j * n + i];
            }
        }
        out
    }

    /// Assembles `V diag(f(lambda)) V^T`.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let diag: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.assemble_with(&diag)
    }

    /// Applies `V diag(d) V^T` to a vector without materializing the matrix.
    pub fn apply_with(&self, diag: &[f64], x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(diag.len(), n);
        assert_eq!(x.len(), n);
        // coeffs = V^T x, scaled by the diagonal, then mapped back through V.
        let coeffs = self.vectors.tr_matvec(x);
        let scaled: Vec<f64> = coeffs.iter().zip(diag).map(|(c, d)| c * d).collect();
        self.vectors.matvec(&scaled)
    }
}

/// Analytic eigenpairs of the `m x m` second-difference matrix
/// `tridiag(-1, 2, -1)`:
///
/// ```text
/// lambda_k = 2 - 2 cos(k pi / (m+1)) = 4 sin^2(k pi / (2(m+1)))
/// v_k(j)   = sqrt(2/(m+1)) sin(j k pi / (m+1))
/// ```
///
/// for `k, j = 1..=m`. The sine form of the eigenvalues avoids the
/// cancellation in `2 - 2cos` for small `k`; the two expressions are
/// mathematically identical. The eigenvector matrix is exactly orthogonal
/// (it is its own inverse up to transpose), which downstream code relies on
/// when raising this matrix to fractional powers.
pub fn laplacian_eigen(m: usize) -> Result<SymEigen> {
    if m == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    let denom = (m + 1) as f64;
    let norm = (2.0 / denom).sqrt();
    let values: Vec<f64> = (1..=m)
        .map(|k| {
            let s = (k as f64 * std::f64::consts::PI / (2.0 * denom)).sin();
            4.0 * s * s
        })
        .collect();
    let vectors = DenseMatrix::from_fn(m, m, |j, k| {
        // row j is the grid index, column k the mode index (both 1-based in
        // the formula above).
        let arg = ((j + 1) * (k + 1)) as f64 * std::f64::consts::PI / denom;
        norm * arg.sin()
    });
    Ok(SymEigen { values, vectors })
}

/// Relative asymmetry admitted before `spd_factor` refuses the input.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct SpdFactorization {
    l: DenseMatrix,
}

/// Cholesky factorization without pivoting. Symmetry is checked up front
/// (relative to the largest entry); a non-positive pivot aborts with the
/// index where definiteness failed.
pub fn spd_factor(m: &DenseMatrix) -> Result<SpdFactorization> {
    let n = m.rows();
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    if m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.cols(),
        });
    }
    let scale = m.max_abs();
    let defect = m.symmetry_defect();
    let tol = SYMMETRY_TOL * scale;
    if defect > tol {
        return Err(Error::NotSymmetric { defect, tol });
    }
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m.get(j, j);
        for k in 0..j {
            let ljk = l.get(j, k);
            pivot -= ljk * ljk;
        }
        if pivot <= 0.0 {
            return Err(Error::NotSpd { pivot: j });
        }
        let ljj = pivot.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let mut v = m.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / ljj);
        }
    }
    Ok(SpdFactorization { l })
}

impl SpdFactorization {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `M x = rhs` by forward/back substitution through `L L^T`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let l = &self.l;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let mut v = x[i];
            for k in 0..i {
                v -= l.get(i, k) * x[k];
            }
            x[i] = v / l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            for k in (i + 1)..n {
                v -= l.get(k, i) * x[k];
            }
            x[i] = v / l.get(i, i);
        }
        Ok(x)
    }
}

/// Thin singular value decomposition `M = U diag(sigma) V^T` with singular
/// values sorted in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

const SVD_MAX_SWEEPS: usize = 60;

/// One-sided Jacobi SVD. Plenty at the few-hundred-row scale used here, and
/// it computes small singular values to high relative accuracy, which is what
/// the spectral-filter comparisons need.
pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    if m.rows() < m.cols() {
        // Factor the transpose and swap the roles of U and V.
        let t = svd(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let rows = m.rows();
    let n = m.cols();
    // w holds the working columns; the invariant w = m * v is maintained by
    // applying every rotation to both, so on exit w = u * diag(sigma).
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| (0..rows).map(|i| m.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut converged = false;
    for _sweep in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (a, b, c) = {
                    let (wp, wq) = (&w[p], &w[q]);
                    (dot(wp, wp), dot(wq, wq), dot(wp, wq))
                };
                if c.abs() <= 1e-15 * (a * b).sqrt() || c == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * c);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut w, p, q, cs, sn);
                rotate_pair(&mut v, p, q, cs, sn);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence {
            sweeps: SVD_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|c| norm2(c)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = DenseMatrix::zeros(rows, n);
    let mut vm = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut null_cols = Vec::new();
    for (out_j, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        for i in 0..n {
            vm.set(i, out_j, v[src][i]);
        }
        if s > 0.0 {
            for i in 0..rows {
                u.set(i, out_j, w[src][i] / s);
            }
        } else {
            null_cols.push(out_j);
        }
    }
    if !null_cols.is_empty() {
        complete_orthonormal(&mut u, &null_cols);
    }
    Ok(Svd { u, sigma, v: vm })
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, cs: f64, sn: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = cs * *x - sn * *y;
        let xq = sn * *x + cs * *y;
        *x = xp;
        *y = xq;
    }
}

/// Fills the listed zero columns of `u` with unit vectors orthogonal to all
/// existing columns (Gram-Schmidt against the standard basis). Only exercised
/// for rank-deficient inputs such as the zero matrix.
fn complete_orthonormal(u: &mut DenseMatrix, null_cols: &[usize]) {
    let rows = u.rows();
    let n = u.cols();
    let mut fill = null_cols.iter().copied();
    let Some(mut target) = fill.next() else {
        return;
    };
    for e in 0..rows {
        let mut cand = vec![0.0; rows];
        cand[e] = 1.0;
        // Columns not yet filled are all-zero, so projecting against every
        // column (including the target itself) is a no-op for them.
        for j in 0..n {
            let proj: f64 = (0..rows).map(|i| cand[i] * u.get(i, j)).sum();
            if proj != 0.0 {
                for (i, c) in cand.iter_mut().enumerate() {
                    *c -= proj * u.get(i, j);
                }
            }
        }
        let nrm = norm2(&cand);
        if nrm > 1e-8 {
            for (i, c) in cand.iter().enumerate() {
                u.set(i, target, c / nrm);
            }
            match fill.next() {
                Some(t) => target = t,
                None => return,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(m: usize) -> DenseMatrix {
        DenseMatrix::from_fn(m, m, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn laplacian_eigen_smallest_cases() {
        let e = laplacian_eigen(1).unwrap();
        assert!((e.values[0] - 2.0).abs() < 1e-15);
        assert!((e.vectors.get(0, 0).abs() - 1.0).abs() < 1e-15);

        let e = laplacian_eigen(2).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn laplacian_eigen_rejects_zero_dim() {
        assert!(matches!(
            laplacian_eigen(0),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn laplacian_eigen_residual_and_orthogonality() {
        for m in [3, 17, 120, 500] {
            let e = laplacian_eigen(m).unwrap();
            let t = tridiag(m);
            let lam_max = e.values.last().copied().unwrap();
            for k in 0..m {
                let vk: Vec<f64> = (0..m).map(|j| e.vectors.get(j, k)).collect();
                let tv = t.matvec(&vk);
                let resid = tv
                    .iter()
                    .zip(&vk)
                    .map(|(a, b)| (a - e.values[k] * b).abs())
                    .fold(0.0_f64, f64::max);
                assert!(
                    resid <= 1e-12 * lam_max,
                    "m={m} k={k}: residual {resid:.3e}"
                );
            }
            // V^T V = I to near machine precision.
            let vt_v = e.vectors.transpose().matmul(&e.vectors);
            let mut dev: f64 = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let want = if i == j { 1.0 } else { 0.0 };
                    dev = dev.max((vt_v.get(i, j) - want).abs());
                }
            }
            assert!(dev <= 1e-10, "m={m}: orthogonality defect {dev:.3e}");
        }
    }

    #[test]
    fn eigenvalues_strictly_increasing() {
        let e = laplacian_eigen(40).unwrap();
        for w in e.values.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn spd_factor_identity_and_diagonal() {
        let f = spd_factor(&DenseMatrix::identity(5)).unwrap();
        let x = f.solve(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0, 4.0, 5.0]);

        let mut m = DenseMatrix::zeros(1, 1);
        m.set(0, 0, 4.0);
        let f = spd_factor(&m).unwrap();
        assert_eq!(f.l.get(0, 0), 2.0);
        assert_eq!(f.solve(&[8.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn spd_factor_reports_failing_pivot() {
        let mut m = DenseMatrix::zeros(2, 2);
        m.set(0, 0, 1.0);
        m.set(0, 1, 2.0);
        m.set(1, 0, 2.0);
        m.set(1, 1, 1.0);
        // Eigenvalues 3 and -1: symmetric but indefinite.
        match spd_factor(&m) {
            Err(Error::NotSpd { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected NotSpd, got {other:?}"),
        }
        match spd_factor(&DenseMatrix::zeros(3, 3)) {
            Err(Error::NotSpd { pivot }) => assert_eq!(pivot, 0),
            other => panic!("expected NotSpd, got {other:?}"),
        }
    }

    #[test]
    fn spd_factor_rejects_asymmetric_input() {
        let mut m = DenseMatrix::identity(3);
        m.set(0, 1, 1e-3);
        assert!(matches!(spd_factor(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn spd_solve_residual_on_conditioned_matrix() {
        // Condition number 1e8 by construction: spectral assembly over the
        // exactly orthogonal sine basis with a geometric eigenvalue ladder.
        let m = 12;
        let e = laplacian_eigen(m).unwrap();
        let diag: Vec<f64> = (0..m)
            .map(|k| 10f64.powf(-8.0 * k as f64 / (m - 1) as f64))
            .collect();
        let a = e.assemble_with(&diag);
        let x_true: Vec<f64> = (0..m).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let b = a.matvec(&x_true);
        let f = spd_factor(&a).unwrap();
        let x = f.solve(&b).unwrap();
        let r = a.matvec(&x);
        let resid = r
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        assert!(resid <= 1e-10 * norm2(&b), "residual {resid:.3e}");
    }

    #[test]
    fn svd_diagonal_and_zero() {
        let mut m = DenseMatrix::zeros(2, 2);
        m.set(0, 0, 3.0);
        m.set(1, 1, 1.0);
        let s = svd(&m).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-14);
        assert!((s.sigma[1] - 1.0).abs() < 1e-14);

        let s = svd(&DenseMatrix::zeros(3, 3)).unwrap();
        assert!(s.sigma.iter().all(|&v| v == 0.0));
        check_orthonormal_columns(&s.u);
        check_orthonormal_columns(&s.v);
    }

    #[test]
    fn svd_reconstructs_random_square() {
        let m = pseudo_random_matrix(10, 10, 42);
        let s = svd(&m).unwrap();
        check_reconstruction(&m, &s);
        check_orthonormal_columns(&s.u);
        check_orthonormal_columns(&s.v);
        for w in s.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn svd_handles_rectangular_shapes() {
        for (r, c) in [(7, 4), (4, 7)] {
            let m = pseudo_random_matrix(r, c, 7);
            let s = svd(&m).unwrap();
            assert_eq!(s.u.rows(), r);
            assert_eq!(s.v.rows(), c);
            assert_eq!(s.sigma.len(), r.min(c));
            check_reconstruction(&m, &s);
            check_orthonormal_columns(&s.u);
            check_orthonormal_columns(&s.v);
        }
    }

    #[test]
    fn svd_matches_symmetric_eigen_oracle() {
        // Independent route: singular values are the square roots of the
        // eigenvalues of M^T M, computed with a two-sided Jacobi eigensolver
        // that shares no code with the one-sided SVD above.
        let m = pseudo_random_matrix(9, 9, 1234);
        let s = svd(&m).unwrap();
        let mut evals = jacobi_eigenvalues(&m.gram());
        evals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (sv, ev) in s.sigma.iter().zip(&evals) {
            let want = ev.max(0.0).sqrt();
            assert!(
                (sv - want).abs() <= 1e-8 * s.sigma[0].max(1.0),
                "sigma {sv} vs oracle {want}"
            );
        }
    }

    fn check_reconstruction(m: &DenseMatrix, s: &Svd) {
        let k = s.sigma.len();
        let scale = s.sigma[0].max(1.0);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let mut v = 0.0;
                for l in 0..k {
                    v += s.u.get(i, l) * s.sigma[l] * s.v.get(j, l);
                }
                assert!(
                    (v - m.get(i, j)).abs() <= 1e-8 * scale,
                    "entry ({i},{j}): {v} vs {}",
                    m.get(i, j)
                );
            }
        }
    }

    fn check_orthonormal_columns(m: &DenseMatrix) {
        for a in 0..m.cols() {
            for b in a..m.cols() {
                let d: f64 = (0..m.rows()).map(|i| m.get(i, a) * m.get(i, b)).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() <= 1e-10, "columns {a},{b}: {d}");
            }
        }
    }

    /// Deterministic filler based on a 64-bit mix; good enough to produce
    /// full-rank test matrices without pulling an RNG into this module.
    fn pseudo_random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        DenseMatrix::from_fn(rows, cols, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
    }

    /// Classical two-sided Jacobi for symmetric matrices; returns eigenvalues
    /// in arbitrary order. Test oracle only.
    fn jacobi_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
        let n = m.rows();
        let mut a = m.clone();
        for _ in 0..100 {
            let mut off: f64 = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a.get(i, j).abs());
                }
            }
            if off <= 1e-14 * a.max_abs().max(1e-300) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                }
            }
        }
        (0..n).map(|i| a.get(i, i)).collect()
    }
}
