//! Dense real tensors of order `m` and dimension `n` and the multilinear
//! contractions `T x^m` and `T x^{m-1}`.
//!
//! Entries are stored as the full `n^m` array in row-major order: the first
//! index is the most significant. `T x^{m-1}` leaves the first index free,
//! `(T x^{m-1})_i = sum_{i2..im} t[i, i2, .., im] x_{i2} .. x_{im}`.
//!
//! Most tensors handled by the crate are symmetric. A tensor built through
//! [`Tensor::symmetric`] is checked against [`SYM_TOL`]; [`Tensor::general`]
//! accepts any finite data and is used for asymmetric inputs that must be
//! contracted as given.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Absolute tolerance for accepting input as symmetric.
pub const SYM_TOL: f64 = 1e-10;

/// Default upper bound on the number of stored entries `n^m`.
pub const DEFAULT_SIZE_GUARD: usize = 10_000_000;

static SIZE_GUARD: AtomicUsize = AtomicUsize::new(DEFAULT_SIZE_GUARD);

/// Current entry-count guard applied by every tensor constructor.
pub fn size_guard() -> usize {
    SIZE_GUARD.load(Ordering::Relaxed)
}

/// Overrides the entry-count guard for the whole process.
pub fn set_size_guard(limit: usize) {
    SIZE_GUARD.store(limit.max(1), Ordering::Relaxed);
}

/// Number of entries `n^m`, or an error when it overflows or exceeds the guard.
pub fn entry_count(order: usize, dim: usize) -> Result<usize> {
    let guard = size_guard();
    let mut count: usize = 1;
    for _ in 0..order {
        count = count
            .checked_mul(dim)
            .filter(|&c| c <= guard)
            .ok_or(Error::SizeGuard { order, dim, guard })?;
    }
    Ok(count)
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            carry += (sum - s) + t;
        } else {
            carry += (t - s) + sum;
        }
        sum = s;
    }
    sum + carry
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Componentwise power `x^[r]`. `0^0` is taken as 1.
pub fn pow_vec(x: &[f64], r: usize) -> Vec<f64> {
    x.iter().map(|&xi| xi.powi(r as i32)).collect()
}

/// A dense `m`-th order `n`-dimensional real tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
    symmetric: bool,
}

impl Tensor {
    fn validate(order: usize, dim: usize, data: &[f64]) -> Result<()> {
        if order < 2 {
            return Err(Error::InvalidOrder(order));
        }
        if dim < 1 {
            return Err(Error::InvalidDimension(dim));
        }
        let expected = entry_count(order, dim)?;
        if data.len() != expected {
            return Err(Error::DataLength {
                expected,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("tensor entry #{pos}")));
        }
        Ok(())
    }

    /// Builds a symmetric tensor, rejecting data that is not symmetric to
    /// within [`SYM_TOL`].
    pub fn symmetric(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        Self::validate(order, dim, &data)?;
        let t = Self {
            order,
            dim,
            data,
            symmetric: true,
        };
        let asym = t.asymmetry();
        if asym > SYM_TOL {
            return Err(Error::NotSymmetric {
                max_deviation: asym,
                tol: SYM_TOL,
            });
        }
        Ok(t)
    }

    /// Builds a tensor without any symmetry requirement.
    pub fn general(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        Self::validate(order, dim, &data)?;
        let mut t = Self {
            order,
            dim,
            data,
            symmetric: false,
        };
        t.symmetric = t.asymmetry() <= SYM_TOL;
        Ok(t)
    }

    /// Replaces every entry by its mean over all permutations of its index.
    pub fn symmetrize(order: usize, dim: usize, raw: Vec<f64>) -> Result<Self> {
        Self::validate(order, dim, &raw)?;
        let t = Self {
            order,
            dim,
            data: raw,
            symmetric: false,
        };
        Ok(t.symmetrized())
    }

    /// Symmetric part of `self`.
    pub fn symmetrized(&self) -> Self {
        use std::collections::HashMap;
        let mut groups: HashMap<Vec<usize>, (f64, usize)> = HashMap::new();
        let mut idx = vec![0usize; self.order];
        for &v in &self.data {
            let mut key = idx.clone();
            key.sort_unstable();
            let e = groups.entry(key).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
            self.advance(&mut idx);
        }
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; self.order];
        for _ in 0..self.data.len() {
            let mut key = idx.clone();
            key.sort_unstable();
            let (s, c) = groups[&key];
            data.push(s / c as f64);
            self.advance(&mut idx);
        }
        Self {
            order: self.order,
            dim: self.dim,
            data,
            symmetric: true,
        }
    }

    /// The unit tensor: 1 on the superdiagonal `i1 = .. = im`, 0 elsewhere.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        let len = entry_count(order, dim)?;
        let mut data = vec![0.0; len];
        for i in 0..dim {
            data[Self::diag_offset(order, dim, i)] = 1.0;
        }
        Self::symmetric(order, dim, data)
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = entry_count(order, dim)?;
        Self::symmetric(order, dim, vec![0.0; len])
    }

    fn diag_offset(order: usize, dim: usize, i: usize) -> usize {
        (0..order).fold(0, |acc, _| acc * dim + i)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Linear offset of a multi-index.
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.order);
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    /// Superdiagonal entry `t[i, i, .., i]`.
    pub fn diagonal(&self, i: usize) -> f64 {
        self.data[Self::diag_offset(self.order, self.dim, i)]
    }

    /// Entry `t[i, j, j, .., j]`.
    pub fn row_of_power(&self, i: usize, j: usize) -> f64 {
        let mut off = i;
        for _ in 1..self.order {
            off = off * self.dim + j;
        }
        self.data[off]
    }

    /// Largest deviation `|t[idx] - t[sorted(idx)]|`.
    pub fn asymmetry(&self) -> f64 {
        let mut idx = vec![0usize; self.order];
        let mut worst = 0.0_f64;
        for &v in &self.data {
            let mut key = idx.clone();
            key.sort_unstable();
            worst = worst.max((v - self.get(&key)).abs());
            self.advance(&mut idx);
        }
        worst
    }

    /// Steps a multi-index in storage order.
    fn advance(&self, idx: &mut [usize]) {
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < self.dim {
                return;
            }
            idx[k] = 0;
        }
    }

    /// Entrywise `scale * self`.
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|v| v * scale).collect(),
            symmetric: self.symmetric,
        }
    }

    /// Largest absolute entrywise difference, or `None` for mismatched shapes.
    pub fn max_abs_diff(&self, other: &Tensor) -> Option<f64> {
        if self.order != other.order || self.dim != other.dim {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    fn check_vector(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("contraction vector".into()));
        }
        Ok(())
    }

    /// `T x^{m-1}` without argument checks; `x.len()` must equal `dim`.
    pub(crate) fn apply_m1(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut cur: Vec<f64> = self.data.chunks_exact(n).map(|row| dot(row, x)).collect();
        while cur.len() > n {
            cur = cur.chunks_exact(n).map(|row| dot(row, x)).collect();
        }
        cur
    }

    /// `T x^m` without argument checks.
    pub(crate) fn apply_full(&self, x: &[f64]) -> f64 {
        dot(x, &self.apply_m1(x))
    }

    /// The vector `T x^{m-1}`.
    pub fn contract_m1(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(x)?;
        Ok(self.apply_m1(x))
    }

    /// The homogeneous form `T x^m`.
    pub fn contract_full(&self, x: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        Ok(self.apply_full(x))
    }

    /// Jacobian of `x -> T x^{m-1}` as a row-major `n x n` matrix. Valid for
    /// asymmetric tensors as well; for symmetric ones it equals
    /// `(m-1) T x^{m-2}`.
    pub fn jacobian_m1(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(x)?;
        let n = self.dim;
        let m = self.order;
        let mut jac = vec![0.0; n * n];
        let mut idx = vec![0usize; m];
        for &t in &self.data {
            if t != 0.0 {
                let i = idx[0];
                for p in 1..m {
                    let mut prod = t;
                    for (q, &iq) in idx.iter().enumerate().skip(1) {
                        if q != p {
                            prod *= x[iq];
                        }
                    }
                    jac[i * n + idx[p]] += prod;
                }
            }
            self.advance(&mut idx);
        }
        Ok(jac)
    }

    /// Principal sub-tensor on the index subset `subset` (0-based; order of
    /// the output follows the sorted subset).
    pub fn principal_subtensor(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(&bad) = subset.iter().find(|&&j| j >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.dim,
            });
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let k = sorted.len();
        let len = entry_count(self.order, k)?;
        let mut data = Vec::with_capacity(len);
        let mut local = vec![0usize; self.order];
        let mut global = vec![0usize; self.order];
        for _ in 0..len {
            for (g, &l) in global.iter_mut().zip(&local) {
                *g = sorted[l];
            }
            data.push(self.get(&global));
            for pos in (0..self.order).rev() {
                local[pos] += 1;
                if local[pos] < k {
                    break;
                }
                local[pos] = 0;
            }
        }
        Ok(Self {
            order: self.order,
            dim: k,
            data,
            symmetric: self.symmetric,
        })
    }

    /// Applies the row-major `p x n` matrix `h` along every mode:
    /// `d[i1..im] = sum_j t[j1..jm] h[i1,j1] .. h[im,jm]`.
    pub fn multilinear_transform(&self, h: &[f64], rows: usize) -> Result<Self> {
        let n = self.dim;
        if h.len() != rows * n {
            return Err(Error::DataLength {
                expected: rows * n,
                found: h.len(),
            });
        }
        entry_count(self.order, rows.max(n))?;
        // One mode at a time; the leading axis is transformed and rotated to
        // the back, so after `m` passes the original axis order is restored.
        let mut cur = self.data.clone();
        let mut dims = vec![n; self.order];
        for _ in 0..self.order {
            let lead = dims[0];
            let rest: usize = dims[1..].iter().product();
            let mut next = vec![0.0; rest * rows];
            for r in 0..rest {
                for (i, slot) in next[r * rows..(r + 1) * rows].iter_mut().enumerate() {
                    *slot = compensated_sum((0..lead).map(|j| h[i * n + j] * cur[j * rest + r]));
                }
            }
            cur = next;
            dims.remove(0);
            dims.push(rows);
        }
        let mut out = Self {
            order: self.order,
            dim: rows,
            data: cur,
            symmetric: false,
        };
        out.symmetric = self.symmetric && out.asymmetry() <= SYM_TOL;
        Ok(out)
    }

    /// Heuristic copositivity check over the standard simplex: a regular
    /// grid with `mesh` subdivisions per edge, then projected-gradient
    /// refinement from `restarts` random points. A negative value is a
    /// certificate; anything else is only evidence.
    pub fn copositivity_probe(&self, options: &ProbeOptions) -> Result<CopositivityVerdict> {
        if options.mesh == 0 {
            return Err(Error::InvalidParameter("mesh must be at least 1".into()));
        }
        let form = if self.symmetric {
            self.clone()
        } else {
            self.symmetrized()
        };
        let n = self.dim;
        let points = binomial(options.mesh + n - 1, n - 1);
        if points.is_none_or(|p| p > size_guard() as u128) {
            return Err(Error::SizeGuard {
                order: self.order,
                dim: n,
                guard: size_guard(),
            });
        }
        let scale = form.data.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
        let certify = -1e-12 * scale;

        let mut best_val = f64::INFINITY;
        let mut best_x = vec![0.0; n];
        let mut counts = vec![0usize; n];
        counts[n - 1] = options.mesh;
        loop {
            let x: Vec<f64> = counts.iter().map(|&c| c as f64 / options.mesh as f64).collect();
            let val = form.apply_full(&x);
            if val < best_val {
                best_val = val;
                best_x = x;
            }
            if !next_composition(&mut counts, options.mesh) {
                break;
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        for _ in 0..options.restarts {
            let mut x: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let s: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= s);
            let (val, x) = simplex_descent(&form, x, 200);
            if val < best_val {
                best_val = val;
                best_x = x;
            }
        }
        // Also refine from the best grid point.
        let (val, x) = simplex_descent(&form, best_x.clone(), 200);
        if val < best_val {
            best_val = val;
            best_x = x;
        }

        Ok(if best_val < certify {
            CopositivityVerdict::NotCopositive {
                witness: best_x,
                value: best_val,
            }
        } else if best_val > 0.0 {
            CopositivityVerdict::ProbablyStrictlyCopositive {
                min_value: best_val,
                argmin: best_x,
            }
        } else {
            CopositivityVerdict::ProbablyCopositive {
                min_value: best_val,
                argmin: best_x,
            }
        })
    }
}

/// Settings for [`Tensor::copositivity_probe`].
#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub mesh: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            mesh: 20,
            restarts: 20,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CopositivityVerdict {
    /// `T w^m < 0` at the simplex point `witness`.
    NotCopositive { witness: Vec<f64>, value: f64 },
    /// Smallest observed value on the simplex is strictly positive.
    ProbablyStrictlyCopositive { min_value: f64, argmin: Vec<f64> },
    /// No negative value found, but the minimum observed touches zero.
    ProbablyCopositive { min_value: f64, argmin: Vec<f64> },
}

impl CopositivityVerdict {
    pub fn is_certified_not_copositive(&self) -> bool {
        matches!(self, Self::NotCopositive { .. })
    }

    pub fn is_probably_strictly_copositive(&self) -> bool {
        matches!(self, Self::ProbablyStrictlyCopositive { .. })
    }

    pub fn min_value(&self) -> f64 {
        match self {
            Self::NotCopositive { value, .. } => *value,
            Self::ProbablyStrictlyCopositive { min_value, .. }
            | Self::ProbablyCopositive { min_value, .. } => *min_value,
        }
    }
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Next composition of `total` into `counts.len()` nonnegative parts, in
/// odometer order over all but the last part.
fn next_composition(counts: &mut [usize], total: usize) -> bool {
    let n = counts.len();
    if n == 1 {
        return false;
    }
    let mut k = n - 2;
    loop {
        counts[k] += 1;
        let s: usize = counts[..n - 1].iter().sum();
        if s <= total {
            counts[n - 1] = total - s;
            return true;
        }
        counts[k] = 0;
        if k == 0 {
            return false;
        }
        k -= 1;
    }
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - 1.0) / (k as f64 + 1.0);
        if s - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Projected gradient descent of a symmetric form over the simplex with
/// backtracking. Returns the final value and point.
fn simplex_descent(form: &Tensor, mut x: Vec<f64>, iters: usize) -> (f64, Vec<f64>) {
    let m = form.order as f64;
    let mut val = form.apply_full(&x);
    let mut step = 1.0;
    for _ in 0..iters {
        let grad: Vec<f64> = form.apply_m1(&x).into_iter().map(|g| m * g).collect();
        let mut accepted = false;
        while step > 1e-14 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
            let cand = project_simplex(&trial);
            let cval = form.apply_full(&cand);
            if cval < val {
                x = cand;
                val = cval;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (val, x)
}
