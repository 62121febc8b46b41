//! Sparse complex operators on grid wave functions and the banded solver
//! behind the Cayley step.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GravError, Result};

/// Row-compressed sparse matrix; each row holds (column, value) sorted by
/// column.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    n: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl OperatorMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, rows: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| Complex64::new(1.0, 0.0)).collect())
    }

    pub fn diagonal(values: Vec<Complex64>) -> Self {
        let n = values.len();
        let rows = values.into_iter().enumerate().map(|(i, v)| if v == Complex64::new(0.0, 0.0) { vec![] } else { vec![(i, v)] }).collect();
        Self { n, rows }
    }

    /// Builds from unordered triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in triplets {
            *acc[i].entry(j).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let rows = acc.into_iter().map(|r| r.into_iter().filter(|(_, v)| v.norm() != 0.0).collect()).collect();
        Self { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i].iter().find(|(c, _)| *c == j).map_or(Complex64::new(0.0, 0.0), |(_, v)| *v)
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(psi.len(), self.n, "operator and wave function sizes differ");
        self.rows.par_iter().map(|r| r.iter().map(|(j, v)| v * psi[*j]).sum()).collect()
    }

    fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, *v)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { n: self.n, rows: self.rows.iter().map(|r| r.iter().map(|(j, v)| (*j, v * c)).collect()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_triplets(self.n, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// self · other
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .par_iter()
            .map(|r| {
                let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
                for (k, a) in r {
                    for (j, b) in &other.rows[*k] {
                        *acc.entry(*j).or_insert(Complex64::new(0.0, 0.0)) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| v.norm() != 0.0).collect()
            })
            .collect();
        Self { n: self.n, rows }
    }

    /// [self, other]
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.n, self.triplets().map(|(i, j, v)| (j, i, v.conj())))
    }

    /// max |A − A†| over entries. The grid inner product has a uniform
    /// weight, so this is the self-adjointness defect.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |i − j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.triplets().map(|(i, j, _)| i.abs_diff(j)).max().unwrap_or(0)
    }
}

/// LU factors of a banded matrix without pivoting. Adequate for the Cayley
/// matrices 1 ± iαĤ, whose Hermitian part is the identity when Ĥ is
/// self-adjoint.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    bw: usize,
    /// row i, column j stored at band[i][j + bw − i]
    band: Vec<Vec<Complex64>>,
}

impl BandedLu {
    pub fn factor(a: &OperatorMatrix) -> Result<Self> {
        let n = a.dim();
        let bw = a.bandwidth();
        let width = 2 * bw + 1;
        let mut band = vec![vec![Complex64::new(0.0, 0.0); width]; n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                band[i][j + bw - i] = *v;
            }
        }
        for k in 0..n {
            let pivot = band[k][bw];
            if pivot.norm() < 1e-300 {
                return Err(GravError::Unstable(format!("zero pivot at row {k} in banded factorization")));
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let l = band[i][k + bw - i] / pivot;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                band[i][k + bw - i] = l;
                for j in k + 1..=last {
                    let u = band[k][j + bw - k];
                    band[i][j + bw - i] -= l * u;
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let (n, bw) = (self.n, self.bw);
        let mut x = b.to_vec();
        for i in 0..n {
            let first = i.saturating_sub(bw);
            let mut s = x[i];
            for k in first..i {
                s -= self.band[i][k + bw - i] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let last = (i + bw).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=last {
                s -= self.band[i][j + bw - i] * x[j];
            }
            x[i] = s / self.band[i][bw];
        }
        x
    }
}
