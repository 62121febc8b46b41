//! Dense multi-index storage and the two primitives everything else is built
//! on: index contraction and symmetrization.
//!
//! A [`DenseTensor`] of rank `r` in dimension `d` stores all `d^r` components
//! row-major (last index fastest). Every axis carries a [`Variance`] flag so
//! contractions can refuse to pair two upper (or two lower) indices.

mod metric;

pub use metric::{invert_metric, invert_metric_with_tol, MetricInput, MetricState, SINGULAR_TOL};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GravError, Result};

/// Default absolute tolerance for floating comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default cap on the rank of a contraction result.
pub const DEFAULT_RANK_CAP: usize = 8;

/// Output sizes above this are filled in parallel.
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variance {
    Upper,
    Lower,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Upper => Variance::Lower,
            Variance::Lower => Variance::Upper,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

/// Writes the multi-index of `flat` into `out` (row-major, last index fastest).
#[inline]
pub(crate) fn unravel(mut flat: usize, dim: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

#[inline]
pub(crate) fn ravel(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

impl DenseTensor {
    pub fn zeros(dim: usize, variance: &[Variance]) -> Self {
        let len = dim.pow(variance.len() as u32);
        Self {
            dim,
            variance: variance.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_fn(dim: usize, variance: &[Variance], f: impl Fn(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dim, variance);
        let mut idx = vec![0; variance.len()];
        for flat in 0..t.data.len() {
            unravel(flat, dim, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn from_data(dim: usize, variance: &[Variance], data: Vec<f64>) -> Result<Self> {
        let expected = dim.pow(variance.len() as u32);
        if data.len() != expected {
            return Err(GravError::ShapeMismatch(format!(
                "rank-{} tensor in d={} needs {} components, got {}",
                variance.len(),
                dim,
                expected,
                data.len()
            )));
        }
        Ok(Self {
            dim,
            variance: variance.to_vec(),
            data,
        })
    }

    /// Rank-2 tensor from a row-major nested array.
    pub fn from_rows(rows: &[Vec<f64>], variance: [Variance; 2]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(GravError::ShapeMismatch("matrix rows must all have length d".into()));
        }
        Self::from_data(dim, &variance, rows.iter().flatten().copied().collect())
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            dim: 1,
            variance: Vec::new(),
            data: vec![value],
        }
    }

    /// Mixed Kronecker delta δ^a_b.
    pub fn kronecker(dim: usize) -> Self {
        Self::from_fn(dim, &[Variance::Upper, Variance::Lower], |i| {
            if i[0] == i[1] {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        ravel(idx, self.dim)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// Sets `[a, b]` and `[b, a]` of a rank-2 tensor.
    pub fn set_sym(&mut self, a: usize, b: usize, value: f64) {
        self.set(&[a, b], value);
        self.set(&[b, a], value);
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let rank = self.rank();
        let dim = self.dim;
        (0..self.data.len()).map(move |flat| {
            let mut idx = vec![0; rank];
            unravel(flat, dim, &mut idx);
            idx
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= factor);
        out
    }

    /// `alpha * self + beta * other`; shapes and variances must match.
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(Self {
            dim: self.dim,
            variance: self.variance.clone(),
            data,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(GravError::ShapeMismatch(format!(
                "d={} {:?} vs d={} {:?}",
                self.dim, self.variance, other.dim, other.variance
            )));
        }
        Ok(())
    }

    /// Reorders axes: axis `i` of the result is axis `perm[i]` of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Self> {
        let rank = self.rank();
        if perm.len() != rank || !perm.iter().copied().sorted().eq(0..rank) {
            return Err(GravError::ShapeMismatch(format!("{perm:?} is not a permutation of 0..{rank}")));
        }
        let variance: Vec<_> = perm.iter().map(|&p| self.variance[p]).collect();
        Ok(Self::from_fn(self.dim, &variance, |idx| {
            let mut s = vec![0; rank];
            for (i, &p) in perm.iter().enumerate() {
                s[p] = idx[i];
            }
            self.get(&s)
        }))
    }

    /// Flat CSV: an `index` column holding the index tuple, then `value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (flat, idx) in self.indices().enumerate() {
            let label = idx.iter().map(|i| i.to_string()).join(" ");
            out.push_str(&format!("\"{}\",{:.17e}\n", label, self.data[flat]));
        }
        out
    }
}

/// Contracts the axis pairs `(axis of a, axis of b)`. Result axes are the
/// free axes of `a` followed by the free axes of `b`, each in original order.
pub fn contract(a: &DenseTensor, b: &DenseTensor, axis_pairs: &[(usize, usize)]) -> Result<DenseTensor> {
    contract_with_cap(a, b, axis_pairs, DEFAULT_RANK_CAP)
}

pub fn contract_with_cap(
    a: &DenseTensor,
    b: &DenseTensor,
    axis_pairs: &[(usize, usize)],
    rank_cap: usize,
) -> Result<DenseTensor> {
    if a.dim != b.dim {
        return Err(GravError::ShapeMismatch(format!("dimensions {} and {} differ", a.dim, b.dim)));
    }
    for &(i, j) in axis_pairs {
        if i >= a.rank() || j >= b.rank() {
            return Err(GravError::ShapeMismatch(format!("axis pair ({i}, {j}) out of range")));
        }
        if a.variance[i] == b.variance[j] {
            return Err(GravError::VarianceMismatch(format!(
                "axis {i} of a and axis {j} of b are both {:?}",
                a.variance[i]
            )));
        }
    }
    if !axis_pairs.iter().map(|p| p.0).all_unique() || !axis_pairs.iter().map(|p| p.1).all_unique() {
        return Err(GravError::ShapeMismatch("an axis appears in more than one pair".into()));
    }
    let rank = a.rank() + b.rank() - 2 * axis_pairs.len();
    if rank > rank_cap {
        return Err(GravError::RankOverflow { rank, cap: rank_cap });
    }

    let dim = a.dim;
    let free_a: Vec<usize> = (0..a.rank()).filter(|i| !axis_pairs.iter().any(|p| p.0 == *i)).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|j| !axis_pairs.iter().any(|p| p.1 == *j)).collect();
    let variance: Vec<Variance> = free_a
        .iter()
        .map(|&i| a.variance[i])
        .chain(free_b.iter().map(|&j| b.variance[j]))
        .collect();

    let n_sum = dim.pow(axis_pairs.len() as u32);
    let out_len = dim.pow(rank as u32);

    let element = |flat: usize| -> f64 {
        let mut out_idx = vec![0; rank];
        unravel(flat, dim, &mut out_idx);
        let mut ia = vec![0; a.rank()];
        let mut ib = vec![0; b.rank()];
        for (k, &i) in free_a.iter().enumerate() {
            ia[i] = out_idx[k];
        }
        for (k, &j) in free_b.iter().enumerate() {
            ib[j] = out_idx[free_a.len() + k];
        }
        let mut sum_idx = vec![0; axis_pairs.len()];
        let mut acc = 0.0;
        for s in 0..n_sum {
            unravel(s, dim, &mut sum_idx);
            for (p, &(i, j)) in axis_pairs.iter().enumerate() {
                ia[i] = sum_idx[p];
                ib[j] = sum_idx[p];
            }
            acc += a.data[ravel(&ia, dim)] * b.data[ravel(&ib, dim)];
        }
        acc
    };

    let data: Vec<f64> = if out_len * n_sum >= PARALLEL_THRESHOLD {
        (0..out_len).into_par_iter().map(element).collect()
    } else {
        (0..out_len).map(element).collect()
    };
    DenseTensor::from_data(dim, &variance, data)
}

/// Averages `a` over all permutations of the listed axes.
pub fn symmetrize(a: &DenseTensor, axes: &[usize]) -> Result<DenseTensor> {
    if axes.iter().any(|&i| i >= a.rank()) || !axes.iter().all_unique() {
        return Err(GravError::ShapeMismatch(format!("bad axis set {axes:?}")));
    }
    if let Some(&first) = axes.first() {
        if axes.iter().any(|&i| a.variance[i] != a.variance[first]) {
            return Err(GravError::VarianceMismatch("symmetrized axes must share variance".into()));
        }
    }
    if axes.len() < 2 {
        return Ok(a.clone());
    }
    let perms: Vec<Vec<usize>> = axes.iter().copied().permutations(axes.len()).collect();
    let weight = 1.0 / perms.len() as f64;
    let rank = a.rank();
    let mut out = DenseTensor::zeros(a.dim, &a.variance);
    let mut idx = vec![0; rank];
    let mut src = vec![0; rank];
    for flat in 0..out.data.len() {
        unravel(flat, a.dim, &mut idx);
        let mut acc = 0.0;
        for perm in &perms {
            src.copy_from_slice(&idx);
            for (slot, &axis) in axes.iter().enumerate() {
                src[axis] = idx[perm[slot]];
            }
            acc += a.get(&src);
        }
        out.data[flat] = acc * weight;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use Variance::{Lower, Upper};

    fn random(dim: usize, variance: &[Variance], rng: &mut ChaCha8Rng) -> DenseTensor {
        let n = dim.pow(variance.len() as u32);
        DenseTensor::from_data(dim, variance, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn kronecker_acts_as_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random(4, &[Upper], &mut rng);
        let delta = DenseTensor::kronecker(4);
        let out = contract(&delta, &v, &[(1, 0)]).unwrap();
        assert!(out.max_abs_diff(&v).unwrap() < 1e-15);
    }

    #[test]
    fn rank3_double_contraction_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = 4;
        let a = random(d, &[Upper, Lower, Upper], &mut rng);
        let b = random(d, &[Upper, Lower, Lower], &mut rng);
        // a^i_j^k b^l_m_n with j<->l, k<->n
        let out = contract(&a, &b, &[(1, 0), (2, 2)]).unwrap();
        assert_eq!(out.rank(), 2);
        assert_eq!(out.variance(), &[Upper, Lower]);
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for m in 0..d {
                let mut acc = 0.0;
                for j in 0..d {
                    for k in 0..d {
                        acc += a.get(&[i, j, k]) * b.get(&[j, m, k]);
                    }
                }
                worst = worst.max((acc - out.get(&[i, m])).abs());
            }
        }
        assert!(worst < 1e-13, "{worst}");
    }

    #[test]
    fn contraction_rejects_same_variance() {
        let a = DenseTensor::zeros(3, &[Upper]);
        let b = DenseTensor::zeros(3, &[Upper]);
        assert!(matches!(contract(&a, &b, &[(0, 0)]), Err(GravError::VarianceMismatch(_))));
    }

    #[test]
    fn contraction_rank_cap() {
        let a = DenseTensor::zeros(2, &[Upper; 3]);
        let b = DenseTensor::zeros(2, &[Lower; 3]);
        let err = contract_with_cap(&a, &b, &[], 4).unwrap_err();
        assert!(matches!(err, GravError::RankOverflow { rank: 6, cap: 4 }));
    }

    #[test]
    fn symmetrize_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(3, &[Lower, Lower], &mut rng);
        let s = symmetrize(&a, &[0, 1]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = 0.5 * (a.get(&[i, j]) + a.get(&[j, i]));
                assert!((s.get(&[i, j]) - expected).abs() < 1e-15);
            }
        }
        // already symmetric input is unchanged
        assert!(symmetrize(&s, &[0, 1]).unwrap().max_abs_diff(&s).unwrap() < 1e-15);
        // antisymmetric input vanishes
        let anti = a.lin_comb(1.0, &a.permute_axes(&[1, 0]).unwrap(), -1.0).unwrap();
        assert!(symmetrize(&anti, &[0, 1]).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn symmetrize_rejects_mixed_variance() {
        let a = DenseTensor::zeros(3, &[Upper, Lower]);
        assert!(matches!(symmetrize(&a, &[0, 1]), Err(GravError::VarianceMismatch(_))));
    }

    #[test]
    fn csv_has_header_and_all_rows() {
        let t = DenseTensor::kronecker(2);
        let csv = t.to_csv();
        assert!(csv.starts_with("index,value\n"));
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.contains("\"1 1\",1.0"));
    }

    proptest::proptest! {
        #[test]
        fn contraction_is_bilinear(seed in 0u64..500, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random(3, &[Upper, Upper], &mut rng);
            let b = random(3, &[Upper, Upper], &mut rng);
            let c = random(3, &[Lower, Upper], &mut rng);
            let lhs = contract(&a.lin_comb(alpha, &b, beta).unwrap(), &c, &[(1, 0)]).unwrap();
            let ra = contract(&a, &c, &[(1, 0)]).unwrap();
            let rb = contract(&b, &c, &[(1, 0)]).unwrap();
            let rhs = ra.lin_comb(alpha, &rb, beta).unwrap();
            proptest::prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        }

        #[test]
        fn symmetrize_is_a_projection(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random(3, &[Upper, Upper, Upper], &mut rng);
            let once = symmetrize(&a, &[0, 2]).unwrap();
            let twice = symmetrize(&once, &[0, 2]).unwrap();
            proptest::prop_assert!(once.max_abs_diff(&twice).unwrap() < 1e-13);
        }
    }
}
