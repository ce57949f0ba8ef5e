//! PARAFAC factor sets, dense tensors, and CP-ALS decomposition.
//!
//! A rank-`K` PARAFAC model of a `D`-dimensional tensor keeps one factor
//! matrix per mode, `Q_d` of shape `dims[d] x K`, and represents each entry
//! as `sum_k prod_d Q_d(i_d, k)`.
//!
//! Flat indexing is row-major with the last mode fastest. Under that
//! convention `vec(T) = khatri_rao([Q_1, ..., Q_D]) * 1` holds entry for
//! entry, and the mode-`d` matricization is `(khatri_rao of the other
//! factors) * Q_d^T` with the remaining modes keeping their relative order.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{solve_spd_multi, Mat};

/// Hard cap on dense allocations (number of f64 elements, about 2 GiB).
pub const MAX_DENSE_ELEMENTS: u128 = 1 << 28;

/// Row-major flat index of `idx` within `dims` (last mode fastest).
#[inline]
pub fn flatten_index(dims: &[usize], idx: &[usize]) -> usize {
    debug_assert_eq!(dims.len(), idx.len());
    let mut flat = 0;
    for (d, &i) in idx.iter().enumerate() {
        assert!(i < dims[d], "index {} out of range for mode {} (size {})", i, d, dims[d]);
        flat = flat * dims[d] + i;
    }
    flat
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for d in (0..dims.len()).rev() {
        idx[d] = flat % dims[d];
        flat /= dims[d];
    }
    debug_assert_eq!(flat, 0, "flat index out of range");
    idx
}

/// Calls `f(flat, idx)` for every index of `dims` in row-major order.
pub(crate) fn for_each_index(dims: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let len: usize = dims.iter().product();
    if len == 0 {
        return;
    }
    let mut idx = vec![0usize; dims.len()];
    for flat in 0..len {
        f(flat, &idx);
        for d in (0..dims.len()).rev() {
            idx[d] += 1;
            if idx[d] < dims[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn checked_len(dims: &[usize]) -> Result<usize> {
    let mut total: u128 = 1;
    for &d in dims {
        total = total
            .checked_mul(d as u128)
            .ok_or(Error::Capacity { requested: u128::MAX, cap: MAX_DENSE_ELEMENTS })?;
    }
    if total > MAX_DENSE_ELEMENTS {
        return Err(Error::Capacity { requested: total, cap: MAX_DENSE_ELEMENTS });
    }
    Ok(total as usize)
}

/// Dense tensor with row-major flat storage (last mode fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if len != values.len() {
            return Err(Error::ShapeMismatch {
                what: "dense tensor values",
                expected: len,
                got: values.len(),
            });
        }
        Ok(DenseTensor { dims, values })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = checked_len(&dims)?;
        Ok(DenseTensor { dims, values: vec![0.0; len] })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[flatten_index(&self.dims, idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: f64) {
        let p = flatten_index(&self.dims, idx);
        self.values[p] = v;
    }

    pub fn frob_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum())
    }
}

/// The factor matrices of a PARAFAC model.
///
/// When the model represents a finite-horizon value function, the last mode
/// is time with `H + 1` rows and the final row pinned to zero; solvers never
/// update that row, so the value after the final step stays exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSet {
    dims: Vec<usize>,
    rank: usize,
    factors: Vec<Mat>,
}

impl FactorSet {
    /// Wraps factor matrices, inferring `dims` and `rank` from their shapes.
    pub fn new(factors: Vec<Mat>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("factor set needs at least one mode".into()));
        }
        let rank = factors[0].cols();
        if rank == 0 {
            return Err(Error::Invalid("factor rank must be positive".into()));
        }
        let mut dims = Vec::with_capacity(factors.len());
        for (d, f) in factors.iter().enumerate() {
            if f.cols() != rank {
                return Err(Error::ShapeMismatch {
                    what: "factor column count",
                    expected: rank,
                    got: f.cols(),
                });
            }
            if f.rows() == 0 {
                return Err(Error::Invalid(alloc::format!("factor {d} has zero rows")));
            }
            dims.push(f.rows());
        }
        Ok(FactorSet { dims, rank, factors })
    }

    /// Factors with entries drawn i.i.d. uniform on `[0, scale)`.
    pub fn random(dims: &[usize], rank: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let factors = dims
            .iter()
            .map(|&n| Mat::from_fn(n, rank, |_, _| rng.gen::<f64>() * scale))
            .collect();
        FactorSet { dims: dims.to_vec(), rank, factors }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_modes(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, d: usize) -> &Mat {
        &self.factors[d]
    }

    pub fn factor_mut(&mut self, d: usize) -> &mut Mat {
        &mut self.factors[d]
    }

    /// Replaces factor `d`, keeping the shape.
    ///
    /// # Panics
    /// Panics if the replacement shape differs.
    pub fn set_factor(&mut self, d: usize, m: Mat) {
        assert_eq!(m.rows(), self.dims[d], "factor row count change");
        assert_eq!(m.cols(), self.rank, "factor column count change");
        self.factors[d] = m;
    }

    /// Number of free parameters, `(sum_d dims[d]) * rank`.
    pub fn param_count(&self) -> usize {
        self.dims.iter().sum::<usize>() * self.rank
    }

    /// Tensor entry at `idx`: `sum_k prod_d Q_d(idx[d], k)`.
    ///
    /// # Panics
    /// Panics if `idx` has the wrong length or any component is out of range.
    pub fn entry(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.dims.len(), "index arity mismatch");
        let mut total = 0.0;
        for k in 0..self.rank {
            let mut prod = 1.0;
            for (d, &i) in idx.iter().enumerate() {
                prod *= self.factors[d].get(i, k);
            }
            total += prod;
        }
        total
    }

    /// Materializes the full tensor.
    pub fn reconstruct_full(&self) -> Result<DenseTensor> {
        let len = checked_len(&self.dims)?;
        let mut values = vec![0.0; len];
        // Expand one rank-1 term at a time: cheaper than per-entry products
        // and keeps the summation order independent of the entry index.
        let mut buf: Vec<f64> = Vec::new();
        let mut next: Vec<f64> = Vec::new();
        for k in 0..self.rank {
            buf.clear();
            buf.extend((0..self.dims[0]).map(|i| self.factors[0].get(i, k)));
            for d in 1..self.factors.len() {
                next.clear();
                next.reserve(buf.len() * self.dims[d]);
                for &b in &buf {
                    for i in 0..self.dims[d] {
                        next.push(b * self.factors[d].get(i, k));
                    }
                }
                core::mem::swap(&mut buf, &mut next);
            }
            for (v, b) in values.iter_mut().zip(buf.iter()) {
                *v += b;
            }
        }
        DenseTensor::new(self.dims.clone(), values)
    }

    /// Rescales every factor to the geometric mean of the Frobenius norms.
    ///
    /// The represented tensor is unchanged (scale/counter-scale ambiguity of
    /// the PARAFAC model) and exact zero rows stay exactly zero.
    pub fn normalize_factors(&mut self) -> Result<()> {
        let mut norms = Vec::with_capacity(self.factors.len());
        for (d, f) in self.factors.iter().enumerate() {
            let n = f.frob_norm();
            if !(n.is_finite() && n > 1e-150) {
                return Err(Error::DegenerateFactor { mode: d });
            }
            norms.push(n);
        }
        let all_equal = norms.windows(2).all(|w| w[0] == w[1]);
        if all_equal {
            return Ok(());
        }
        let log_target: f64 = norms.iter().map(|&n| libm::log(n)).sum::<f64>() / norms.len() as f64;
        let target = libm::exp(log_target);
        for (f, &n) in self.factors.iter_mut().zip(norms.iter()) {
            f.scale(target / n);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|f| f.is_finite())
    }

    /// Sum of squared Frobenius norms of all factors.
    pub fn total_sq_norm(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| {
                let n = f.frob_norm();
                n * n
            })
            .sum()
    }

    /// Squared Frobenius distance between two factor sets, mode by mode.
    pub fn sq_distance(&self, other: &FactorSet) -> f64 {
        assert_eq!(self.dims, other.dims, "factor set shape mismatch");
        let mut total = 0.0;
        for (a, b) in self.factors.iter().zip(other.factors.iter()) {
            for (x, y) in a.data().iter().zip(b.data().iter()) {
                let d = x - y;
                total += d * d;
            }
        }
        total
    }
}

/// Khatri-Rao product (column-wise Kronecker) of the listed matrices.
///
/// Column `k` of the output is the Kronecker product of the `k`-th columns in
/// listed order, so the row index of later matrices varies fastest.
pub fn khatri_rao(ms: &[&Mat]) -> Result<Mat> {
    let first = ms.first().ok_or_else(|| Error::Invalid("khatri_rao of no matrices".into()))?;
    let k = first.cols();
    for m in ms {
        if m.cols() != k {
            return Err(Error::ShapeMismatch {
                what: "khatri_rao column count",
                expected: k,
                got: m.cols(),
            });
        }
    }
    let mut out = (*first).clone();
    for m in &ms[1..] {
        let rows = out.rows() * m.rows();
        let mut next = Mat::zeros(rows, k);
        for i in 0..out.rows() {
            for j in 0..m.rows() {
                let r = i * m.rows() + j;
                for c in 0..k {
                    next.set(r, c, out.get(i, c) * m.get(j, c));
                }
            }
        }
        out = next;
    }
    Ok(out)
}

/// Flat-index permutation realizing the mode-`d` reordering.
///
/// `map[p]` is the position of the entry at row-major position `p` after
/// reordering so that mode `d` varies slowest while the remaining modes keep
/// their relative row-major order. Reshaping the permuted vector into a
/// matrix with `len / dims[d]` rows (column-major) gives the mode-`d`
/// matricization `(khatri_rao of the other factors) * Q_d^T`.
pub fn mode_permutation(dims: &[usize], d: usize) -> Vec<usize> {
    assert!(d < dims.len(), "mode {} out of range", d);
    let len: usize = dims.iter().product();
    let rest: usize = len / dims[d];
    let mut map = vec![0usize; len];
    for_each_index(dims, |p, idx| {
        let mut flat_rest = 0;
        for (j, (&n, &i)) in dims.iter().zip(idx.iter()).enumerate() {
            if j == d {
                continue;
            }
            flat_rest = flat_rest * n + i;
        }
        map[p] = idx[d] * rest + flat_rest;
    });
    map
}

/// Normalized Frobenius error `||estimate - reference||_F / ||reference||_F`.
pub fn nfe(estimate: &DenseTensor, reference: &DenseTensor) -> Result<f64> {
    if estimate.dims() != reference.dims() {
        return Err(Error::ShapeMismatch {
            what: "nfe operand dims",
            expected: reference.len(),
            got: estimate.len(),
        });
    }
    let rnorm = reference.frob_norm();
    if rnorm == 0.0 {
        return Err(Error::ZeroReference);
    }
    let mut diff = 0.0;
    for (e, r) in estimate.values().iter().zip(reference.values().iter()) {
        let d = e - r;
        diff += d * d;
    }
    Ok(libm::sqrt(diff) / rnorm)
}

/// Options for [`cp_als`].
#[derive(Clone, Debug)]
pub struct CpAlsOptions {
    pub rank: usize,
    pub sweeps: usize,
    pub seed: u64,
    /// Scale of the uniform factor initialization; defaults to `1/sqrt(rank)`.
    pub init_scale: Option<f64>,
}

impl CpAlsOptions {
    pub fn new(rank: usize, sweeps: usize, seed: u64) -> Self {
        CpAlsOptions { rank, sweeps, seed, init_scale: None }
    }
}

/// Result of [`cp_als`].
#[derive(Clone, Debug)]
pub struct CpAls {
    pub factors: FactorSet,
    /// Absolute fit error `||t - reconstruct||_F` after each sweep.
    pub fit_history: Vec<f64>,
    /// True when any mode update needed the ridge fallback of the normal
    /// equations solve.
    pub ridge_applied: bool,
}

/// Matricized-tensor times Khatri-Rao product for mode `d`.
fn mttkrp(t: &DenseTensor, f: &FactorSet, d: usize) -> Mat {
    let k = f.rank();
    let mut out = Mat::zeros(f.dims()[d], k);
    let mut prod = vec![0.0; k];
    for_each_index(t.dims(), |p, idx| {
        let val = t.values()[p];
        if val == 0.0 {
            return;
        }
        prod.iter_mut().for_each(|x| *x = val);
        for (j, &i) in idx.iter().enumerate() {
            if j == d {
                continue;
            }
            let row = f.factor(j).row(i);
            for (x, q) in prod.iter_mut().zip(row.iter()) {
                *x *= q;
            }
        }
        let orow = out.row_mut(idx[d]);
        for (o, x) in orow.iter_mut().zip(prod.iter()) {
            *o += x;
        }
    });
    out
}

fn fit_error(t: &DenseTensor, f: &FactorSet) -> f64 {
    let mut err = 0.0;
    for_each_index(t.dims(), |p, idx| {
        let d = t.values()[p] - f.entry(idx);
        err += d * d;
    });
    libm::sqrt(err)
}

/// Alternating least squares fit of a rank-`K` PARAFAC model.
///
/// Each mode update solves the normal equations `G q = m` where `G` is the
/// Hadamard product of the other factors' Gram matrices; near-singular `G`
/// falls back to a ridge solve, reported in [`CpAls::ridge_applied`].
///
/// When the terminal slice of the last mode is exactly zero (a value-function
/// tensor with its end-of-horizon slice), the corresponding factor row is
/// initialized to zero and every least-squares update reproduces an exact
/// zero row, so the pinned-row convention is preserved automatically.
pub fn cp_als(t: &DenseTensor, opts: &CpAlsOptions) -> Result<CpAls> {
    if opts.rank == 0 {
        return Err(Error::Invalid("cp_als rank must be positive".into()));
    }
    if opts.sweeps == 0 {
        return Err(Error::Invalid("cp_als needs at least one sweep".into()));
    }
    let dims = t.dims().to_vec();
    let k = opts.rank;
    let scale = opts.init_scale.unwrap_or(1.0 / libm::sqrt(k as f64));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut f = FactorSet::random(&dims, k, scale, &mut rng);

    // Detect an all-zero terminal slice of the last mode.
    let last = dims.len() - 1;
    let n_last = dims[last];
    let mut terminal_zero = n_last > 1;
    if terminal_zero {
        for_each_index(&dims, |p, idx| {
            if idx[last] == n_last - 1 && t.values()[p] != 0.0 {
                terminal_zero = false;
            }
        });
    }
    if terminal_zero {
        for c in 0..k {
            f.factor_mut(last).set(n_last - 1, c, 0.0);
        }
    }

    let mut ridge_applied = false;
    let mut fit_history = Vec::with_capacity(opts.sweeps);
    for _ in 0..opts.sweeps {
        for d in 0..dims.len() {
            let m = mttkrp(t, &f, d);
            // Hadamard product of the other Gram matrices.
            let mut g = Mat::from_fn(k, k, |_, _| 1.0);
            for (j, _) in dims.iter().enumerate() {
                if j == d {
                    continue;
                }
                let gj = f.factor(j).gram();
                for (gv, hv) in g.data_mut().iter_mut().zip(gj.data().iter()) {
                    *gv *= hv;
                }
            }
            let (x, info) = solve_spd_multi(&g, &m.transpose())?;
            ridge_applied |= info.ridge_used;
            f.set_factor(d, x.transpose());
        }
        fit_history.push(fit_error(t, &f));
    }

    Ok(CpAls { factors: f, fit_history, ridge_applied })
}
