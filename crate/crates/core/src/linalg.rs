//! Dense row-major matrices and the few factorizations the solvers need.
//!
//! Everything here is written against flat `Vec<f64>` storage so the crate
//! stays `no_std`. The sizes involved are modest (the tall block systems top
//! out at a few hundred columns), so simple Householder QR, Cholesky, and
//! one-sided Jacobi are fast enough and easy to audit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense matrix, row-major: element `(r, c)` lives at `data[r * cols + c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data.
    ///
    /// # Panics
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            out[r] = acc;
        }
        out
    }

    /// `self^T * x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "tr_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let xr = x[r];
            if xr == 0.0 {
                continue;
            }
            let row = self.row(r);
            for (o, a) in out.iter_mut().zip(row.iter()) {
                *o += a * xr;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let v = self.get(r, k);
                if v == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let trow = out.row_mut(r);
                for (t, o) in trow.iter_mut().zip(orow.iter()) {
                    *t += v * o;
                }
            }
        }
        out
    }

    /// Gram matrix `self^T * self`.
    pub fn gram(&self) -> Mat {
        let n = self.cols;
        let mut g = Mat::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let vi = row[i];
                if vi == 0.0 {
                    continue;
                }
                for j in i..n {
                    let val = vi * row[j];
                    g.data[i * n + j] += val;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn frob_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Euclidean norm of a slice.
pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Result of a least-squares solve.
#[derive(Clone, Debug)]
pub struct Lstsq {
    pub solution: Vec<f64>,
    /// Numerical column rank detected during factorization.
    pub rank: usize,
    /// True when the coefficient matrix was not full column rank; the
    /// returned solution is then the minimum-norm minimizer.
    pub rank_deficient: bool,
}

/// Minimum-norm least-squares solution of `a * x ≈ b`.
///
/// Uses column-pivoted Householder QR; when the numerical rank is below the
/// column count, a second orthogonal factorization of the trapezoidal block
/// yields the minimum-norm solution (complete orthogonal decomposition).
pub fn lstsq_min_norm(a: &Mat, b: &[f64]) -> Result<Lstsq> {
    assert_eq!(b.len(), a.rows(), "lstsq rhs length mismatch");
    if !a.is_finite() || !b.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidValue("least-squares system"));
    }
    let m = a.rows();
    let n = a.cols();
    let kmax = m.min(n);

    let mut w = a.clone();
    let mut qtb = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    // Squared column norms of the trailing block, downdated as we go.
    let mut colsq: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w.get(i, j) * w.get(i, j)).sum())
        .collect();
    let mut colsq_ref = colsq.clone();

    // Householder vectors for Q, stored column by column below the diagonal
    // plus an explicit first element and scaling factor.
    let mut hh: Vec<(usize, Vec<f64>, f64)> = Vec::with_capacity(kmax);

    for k in 0..kmax {
        // Pivot: move the trailing column with the largest residual norm to k.
        let (piv, _) = colsq
            .iter()
            .enumerate()
            .skip(k)
            .fold((k, -1.0), |best, (j, &v)| if v > best.1 { (j, v) } else { best });
        if piv != k {
            for i in 0..m {
                let t = w.get(i, k);
                w.set(i, k, w.get(i, piv));
                w.set(i, piv, t);
            }
            perm.swap(k, piv);
            colsq.swap(k, piv);
            colsq_ref.swap(k, piv);
        }

        // Householder reflector for column k.
        let mut v: Vec<f64> = (k..m).map(|i| w.get(i, k)).collect();
        let alpha = norm2(&v);
        if alpha == 0.0 {
            hh.push((k, v, 0.0));
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vsq: f64 = v.iter().map(|x| x * x).sum();
        let beta = if vsq > 0.0 { 2.0 / vsq } else { 0.0 };

        w.set(k, k, -sign * alpha);
        for i in k + 1..m {
            w.set(i, k, 0.0);
        }
        for j in k + 1..n {
            let mut s = 0.0;
            for i in k..m {
                s += v[i - k] * w.get(i, j);
            }
            s *= beta;
            for i in k..m {
                let val = w.get(i, j) - s * v[i - k];
                w.set(i, j, val);
            }
        }
        let mut s = 0.0;
        for i in k..m {
            s += v[i - k] * qtb[i];
        }
        s *= beta;
        for i in k..m {
            qtb[i] -= s * v[i - k];
        }
        hh.push((k, v, beta));

        // Downdate trailing column norms; recompute when cancellation bites.
        for j in k + 1..n {
            let t = w.get(k, j);
            colsq[j] -= t * t;
            if colsq[j] < 0.01 * colsq_ref[j] {
                colsq[j] = (k + 1..m).map(|i| w.get(i, j) * w.get(i, j)).sum();
                colsq_ref[j] = colsq[j];
            }
        }
    }

    // Numerical rank from the pivoted diagonal.
    let r00 = if kmax > 0 { w.get(0, 0).abs() } else { 0.0 };
    let tol = r00 * (m.max(n) as f64) * f64::EPSILON;
    let mut rank = 0;
    for k in 0..kmax {
        if w.get(k, k).abs() > tol {
            rank += 1;
        } else {
            break;
        }
    }

    let mut x = vec![0.0; n];
    if rank == 0 {
        return Ok(Lstsq {
            solution: x,
            rank: 0,
            rank_deficient: n > 0,
        });
    }

    if rank == n {
        // Full column rank: plain back-substitution on R.
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = qtb[i];
            for j in i + 1..n {
                s -= w.get(i, j) * y[j];
            }
            y[i] = s / w.get(i, i);
        }
        for j in 0..n {
            x[perm[j]] = y[j];
        }
        return Ok(Lstsq {
            solution: x,
            rank,
            rank_deficient: false,
        });
    }

    // Rank-deficient: minimum-norm solution of [R11 R12] z = c1 via a second
    // Householder factorization of the transposed trapezoid (n x rank).
    let mut t = Mat::from_fn(n, rank, |i, j| w.get(j, i));
    let mut hh2: Vec<(Vec<f64>, f64)> = Vec::with_capacity(rank);
    for k in 0..rank {
        let mut v: Vec<f64> = (k..n).map(|i| t.get(i, k)).collect();
        let alpha = norm2(&v);
        if alpha == 0.0 {
            hh2.push((v, 0.0));
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vsq: f64 = v.iter().map(|x| x * x).sum();
        let beta = if vsq > 0.0 { 2.0 / vsq } else { 0.0 };
        t.set(k, k, -sign * alpha);
        for i in k + 1..n {
            t.set(i, k, 0.0);
        }
        for j in k + 1..rank {
            let mut s = 0.0;
            for i in k..n {
                s += v[i - k] * t.get(i, j);
            }
            s *= beta;
            for i in k..n {
                let val = t.get(i, j) - s * v[i - k];
                t.set(i, j, val);
            }
        }
        hh2.push((v, beta));
    }
    // Forward-substitute R2^T y = c1 (R2 is the upper triangle of `t`).
    let mut y = vec![0.0; rank];
    for i in 0..rank {
        let mut s = qtb[i];
        for j in 0..i {
            s -= t.get(j, i) * y[j];
        }
        y[i] = s / t.get(i, i);
    }
    // z = Q2 [y; 0]: apply the reflectors in reverse.
    let mut z = vec![0.0; n];
    z[..rank].copy_from_slice(&y);
    for k in (0..rank).rev() {
        let (v, beta) = &hh2[k];
        if *beta == 0.0 {
            continue;
        }
        let mut s = 0.0;
        for i in k..n {
            s += v[i - k] * z[i];
        }
        s *= beta;
        for i in k..n {
            z[i] -= s * v[i - k];
        }
    }
    for j in 0..n {
        x[perm[j]] = z[j];
    }
    drop(hh);
    Ok(Lstsq {
        solution: x,
        rank,
        rank_deficient: true,
    })
}

/// Outcome details of an SPD solve through [`solve_spd_multi`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SpdInfo {
    /// True when a ridge term had to be added to make the factorization work.
    pub ridge_used: bool,
    /// Rough condition estimate from the Cholesky pivots.
    pub cond_estimate: f64,
}

const RIDGE: f64 = 1e-10;
const COND_LIMIT: f64 = 1e12;

fn cholesky(g: &Mat) -> Option<(Mat, f64)> {
    let n = g.rows();
    let mut l = Mat::zeros(n, n);
    let mut min_piv = f64::INFINITY;
    let mut max_piv: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = g.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                let piv = libm::sqrt(s);
                min_piv = min_piv.min(piv);
                max_piv = max_piv.max(piv);
                l.set(i, j, piv);
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    let cond = if min_piv > 0.0 {
        let q = max_piv / min_piv;
        q * q
    } else {
        f64::INFINITY
    };
    Some((l, cond))
}

/// Solves `g * X = rhs` for symmetric positive definite `g` with several
/// right-hand sides (the columns of `rhs`).
///
/// When the factorization fails or the pivot-based condition estimate exceeds
/// `1e12`, a ridge term `1e-10 * I` is added and the solve is retried; the
/// fallback is reported through [`SpdInfo::ridge_used`].
pub fn solve_spd_multi(g: &Mat, rhs: &Mat) -> Result<(Mat, SpdInfo)> {
    assert_eq!(g.rows(), g.cols(), "spd solve expects a square matrix");
    assert_eq!(g.rows(), rhs.rows(), "spd rhs row mismatch");
    let n = g.rows();
    let mut info = SpdInfo::default();

    let fact = match cholesky(g) {
        Some((l, cond)) if cond <= COND_LIMIT => {
            info.cond_estimate = cond;
            Some(l)
        }
        other => {
            if let Some((_, cond)) = other {
                info.cond_estimate = cond;
            } else {
                info.cond_estimate = f64::INFINITY;
            }
            None
        }
    };
    let l = match fact {
        Some(l) => l,
        None => {
            info.ridge_used = true;
            let mut gr = g.clone();
            for i in 0..n {
                let v = gr.get(i, i) + RIDGE;
                gr.set(i, i, v);
            }
            match cholesky(&gr) {
                Some((l, _)) => l,
                None => return Err(Error::InvalidValue("normal equations")),
            }
        }
    };

    let cols = rhs.cols();
    let mut x = Mat::zeros(n, cols);
    let mut col = vec![0.0; n];
    for c in 0..cols {
        for i in 0..n {
            col[i] = rhs.get(i, c);
        }
        // L y = col
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= l.get(i, k) * col[k];
            }
            col[i] = s / l.get(i, i);
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in i + 1..n {
                s -= l.get(k, i) * col[k];
            }
            col[i] = s / l.get(i, i);
        }
        for i in 0..n {
            x.set(i, c, col[i]);
        }
    }
    Ok((x, info))
}

/// Thin singular value decomposition `a = U diag(sigma) V^T`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub v: Mat,
}

/// One-sided Jacobi SVD. Exact enough for condition monitoring and for the
/// pseudo-inverse oracle used in tests; cost is O(n^2 m) per sweep.
pub fn svd_jacobi(a: &Mat) -> Svd {
    if a.rows() < a.cols() {
        let t = svd_jacobi(&a.transpose());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }
    let m = a.rows();
    let n = a.cols();
    let mut w = a.clone();
    let mut v = Mat::identity(n);

    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    app += wp * wp;
                    aqq += wq * wq;
                    apq += wp * wq;
                }
                if apq.abs() <= 1e-15 * libm::sqrt(app * aqq) || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    w.set(i, p, c * wp - s * wq);
                    w.set(i, q, s * wp + c * wq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut sigma: Vec<f64> = (0..n)
        .map(|j| {
            let mut s = 0.0;
            for i in 0..m {
                let x = w.get(i, j);
                s += x * x;
            }
            libm::sqrt(s)
        })
        .collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());

    let mut u = Mat::zeros(m, n);
    let mut vs = Mat::zeros(n, n);
    let mut sig = vec![0.0; n];
    for (newj, &oldj) in order.iter().enumerate() {
        sig[newj] = sigma[oldj];
        if sigma[oldj] > 0.0 {
            for i in 0..m {
                u.set(i, newj, w.get(i, oldj) / sigma[oldj]);
            }
        }
        for i in 0..n {
            vs.set(i, newj, v.get(i, oldj));
        }
    }
    sigma = sig;
    Svd { u, sigma, v: vs }
}

/// Singular values of `a` in non-increasing order.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    svd_jacobi(a).sigma
}

/// Largest eigenvalue of the operator `x -> op(x)` (symmetric PSD), by power
/// iteration from a seeded random start.
pub fn power_iteration_max(
    mut op: impl FnMut(&[f64]) -> Vec<f64>,
    n: usize,
    rng: &mut impl rand::Rng,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let nv = norm2(&v);
    if nv == 0.0 {
        v[0] = 1.0;
    } else {
        for x in &mut v {
            *x /= nv;
        }
    }
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = op(&v);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let new_lambda = dot(&w, &v);
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / nw;
        }
        if (new_lambda - lambda).abs() <= 1e-6 * new_lambda.abs().max(1e-300) {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    lambda.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_mat(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
        use rand::Rng;
        Mat::from_fn(rows, cols, |_, _| rng.gen::<f64>() * 2.0 - 1.0)
    }

    /// SVD-based pseudo-inverse solve, used as an independent oracle.
    fn pinv_solve(a: &Mat, b: &[f64]) -> Vec<f64> {
        let svd = svd_jacobi(a);
        let smax = svd.sigma.first().copied().unwrap_or(0.0);
        let tol = smax * (a.rows().max(a.cols()) as f64) * f64::EPSILON;
        let utb = svd.u.tr_matvec(b);
        let mut y = vec![0.0; svd.sigma.len()];
        for i in 0..svd.sigma.len() {
            if svd.sigma[i] > tol {
                y[i] = utb[i] / svd.sigma[i];
            }
        }
        svd.v.matvec(&y)
    }

    #[test]
    fn lstsq_square_exact() {
        let a = Mat::from_vec(2, 2, vec![2.0, 1.0, 1.0, 3.0]);
        let b = [5.0, 10.0];
        let r = lstsq_min_norm(&a, &b).unwrap();
        assert!(!r.rank_deficient);
        // 2x + y = 5, x + 3y = 10 -> x = 1, y = 3
        assert!((r.solution[0] - 1.0).abs() < 1e-12);
        assert!((r.solution[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_overdetermined_normal_equations_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_mat(12, 5, &mut rng);
            let b: Vec<f64> = (0..12).map(|_| rand::Rng::gen::<f64>(&mut rng)).collect();
            let r = lstsq_min_norm(&a, &b).unwrap();
            assert_eq!(r.rank, 5);
            let res: Vec<f64> = a
                .matvec(&r.solution)
                .iter()
                .zip(b.iter())
                .map(|(p, q)| p - q)
                .collect();
            let grad = a.tr_matvec(&res);
            assert!(norm2(&grad) < 1e-9, "residual not orthogonal: {}", norm2(&grad));
        }
    }

    #[test]
    fn lstsq_rank_deficient_matches_pinv() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            // Duplicate a column to force deficiency.
            let base = random_mat(10, 4, &mut rng);
            let a = Mat::from_fn(10, 5, |i, j| if j < 4 { base.get(i, j) } else { base.get(i, 1) });
            let b: Vec<f64> = (0..10).map(|_| rand::Rng::gen::<f64>(&mut rng)).collect();
            let r = lstsq_min_norm(&a, &b).unwrap();
            assert!(r.rank_deficient);
            assert_eq!(r.rank, 4);
            let oracle = pinv_solve(&a, &b);
            for (x, y) in r.solution.iter().zip(oracle.iter()) {
                assert!((x - y).abs() < 1e-8, "min-norm {x} vs pinv {y}");
            }
        }
    }

    #[test]
    fn lstsq_underdetermined_min_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_mat(3, 7, &mut rng);
        let b: Vec<f64> = vec![1.0, -2.0, 0.5];
        let r = lstsq_min_norm(&a, &b).unwrap();
        assert!(r.rank_deficient);
        let ax = a.matvec(&r.solution);
        for (p, q) in ax.iter().zip(b.iter()) {
            assert!((p - q).abs() < 1e-10);
        }
        let oracle = pinv_solve(&a, &b);
        assert!((norm2(&r.solution) - norm2(&oracle)).abs() < 1e-9);
    }

    #[test]
    fn lstsq_rejects_non_finite() {
        let a = Mat::from_vec(1, 1, vec![f64::NAN]);
        assert!(matches!(
            lstsq_min_norm(&a, &[1.0]),
            Err(Error::InvalidValue(_))
        ));
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (m, n) in [(6, 4), (4, 6), (5, 5)] {
            let a = random_mat(m, n, &mut rng);
            let svd = svd_jacobi(&a);
            let p = m.min(n);
            for i in 0..m {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..p.max(svd.sigma.len()).min(svd.sigma.len()) {
                        s += svd.u.get(i, k) * svd.sigma[k] * svd.v.get(j, k);
                    }
                    assert!((s - a.get(i, j)).abs() < 1e-10);
                }
            }
            for w in svd.sigma.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn spd_solve_and_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_mat(8, 4, &mut rng);
        let g = a.gram();
        let rhs = random_mat(4, 3, &mut rng);
        let (x, info) = solve_spd_multi(&g, &rhs).unwrap();
        assert!(!info.ridge_used);
        let back = g.matmul(&x);
        for i in 0..4 {
            for j in 0..3 {
                assert!((back.get(i, j) - rhs.get(i, j)).abs() < 1e-9);
            }
        }

        // Exactly singular Gram trips the ridge fallback.
        let sing = Mat::from_vec(2, 2, vec![1.0, 1.0, 1.0, 1.0]);
        let rhs = Mat::from_vec(2, 1, vec![1.0, 1.0]);
        let (_, info) = solve_spd_multi(&sing, &rhs).unwrap();
        assert!(info.ridge_used);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_mat(9, 6, &mut rng);
        let smax = singular_values(&a)[0];
        let lam = power_iteration_max(|v| a.tr_matvec(&a.matvec(v)), 6, &mut rng);
        assert!((lam - smax * smax).abs() < 1e-6 * smax * smax);
    }
}
