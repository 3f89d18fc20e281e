use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;
use sprs::{CsMat, TriMat};

use super::HilbertSpace;
use crate::{Error, Result, C64};

/// Sparse operator acting on a [`HilbertSpace`], stored in CSR form.
///
/// Exact zeros are dropped after every operation, so the stored pattern is
/// canonical and structural comparisons are meaningful.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    space: HilbertSpace,
    entries: CsMat<C64>,
}

fn pruned(m: &CsMat<C64>) -> CsMat<C64> {
    let (rows, cols) = m.shape();
    let mut indptr = Vec::with_capacity(rows + 1);
    let mut indices = Vec::with_capacity(m.nnz());
    let mut data = Vec::with_capacity(m.nnz());
    indptr.push(0);
    let csr;
    let m = if m.is_csr() {
        m
    } else {
        csr = m.to_csr();
        &csr
    };
    for row in m.outer_iterator() {
        let mut entries: Vec<(usize, C64)> = row
            .iter()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|(j, v)| (j, *v))
            .collect();
        entries.sort_unstable_by_key(|e| e.0);
        for (j, v) in entries {
            indices.push(j);
            data.push(v);
        }
        indptr.push(indices.len());
    }
    CsMat::new((rows, cols), indptr, indices, data)
}

impl OperatorMatrix {
    fn wrap(space: HilbertSpace, m: CsMat<C64>) -> Self {
        Self {
            space,
            entries: pruned(&m),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: other.space.to_string(),
            });
        }
        Ok(())
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let n = space.total_dim();
        Self {
            space: space.clone(),
            entries: CsMat::zero((n, n)),
        }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        Self {
            space: space.clone(),
            entries: CsMat::eye(space.total_dim()),
        }
    }

    /// Builds an operator from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(space: &HilbertSpace, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        let n = space.total_dim();
        let mut tri = TriMat::new((n, n));
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) outside dimension {n}"
                )));
            }
            tri.add_triplet(i, j, v);
        }
        Ok(Self::wrap(space.clone(), tri.to_csr()))
    }

    pub fn from_dense(space: &HilbertSpace, m: &Mat<C64>) -> Result<Self> {
        let n = space.total_dim();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "dense matrix is {}x{}, space has dimension {n}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut trips = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    trips.push((i, j, v));
                }
            }
        }
        Self::from_triplets(space, &trips)
    }

    /// Lifts a single-mode matrix given as triplets to the full space.
    pub fn embed(space: &HilbertSpace, label: &str, local: &[(usize, usize, C64)]) -> Result<Self> {
        let mode = space.mode_index(label)?;
        let d = space.dims()[mode];
        let mut factors: Vec<CsMat<C64>> = space.dims().iter().map(|&k| CsMat::eye(k)).collect();
        let mut tri = TriMat::new((d, d));
        for &(i, j, v) in local {
            if i >= d || j >= d {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) outside truncation {d} of mode `{label}`"
                )));
            }
            tri.add_triplet(i, j, v);
        }
        factors[mode] = tri.to_csr();
        let mut acc = factors[0].clone();
        for f in &factors[1..] {
            acc = sprs::kronecker_product(acc.view(), f.view());
        }
        Ok(Self::wrap(space.clone(), acc))
    }

    /// Annihilation operator `a|n> = sqrt(n)|n-1>`, hard-truncated at the top level.
    pub fn annihilation(space: &HilbertSpace, label: &str) -> Result<Self> {
        let d = space.dim_of(label)?;
        let local: Vec<_> = (1..d)
            .map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0)))
            .collect();
        Self::embed(space, label, &local)
    }

    pub fn creation(space: &HilbertSpace, label: &str) -> Result<Self> {
        Ok(Self::annihilation(space, label)?.dagger())
    }

    pub fn number(space: &HilbertSpace, label: &str) -> Result<Self> {
        let d = space.dim_of(label)?;
        let local: Vec<_> = (1..d).map(|n| (n, n, C64::new(n as f64, 0.0))).collect();
        Self::embed(space, label, &local)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CsMat<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn nnz(&self) -> usize {
        self.entries.nnz()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries.get(row, col).copied().unwrap_or_default()
    }

    /// Iterates over stored `(row, col, value)` entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.entries.iter().map(|(v, (i, j))| (i, j, *v))
    }

    pub fn dagger(&self) -> Self {
        let t = self.entries.transpose_view().to_csr();
        Self::wrap(self.space.clone(), t.map(|v| v.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::wrap(self.space.clone(), self.entries.transpose_view().to_csr())
    }

    pub fn conj(&self) -> Self {
        Self::wrap(self.space.clone(), self.entries.map(|v| v.conj()))
    }

    pub fn scale(&self, z: impl Into<C64>) -> Self {
        let z = z.into();
        Self::wrap(self.space.clone(), self.entries.map(|v| v * z))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::wrap(
            self.space.clone(),
            &self.entries + &other.entries,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::wrap(
            self.space.clone(),
            &self.entries - &other.entries,
        ))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::wrap(
            self.space.clone(),
            &self.entries * &other.entries,
        ))
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// `max |A_ij - conj(A_ji)| / max |A_ij|`, zero for the zero operator.
    pub fn hermiticity_deviation(&self) -> f64 {
        let scale = self
            .entries
            .data()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let diff = &self.entries - &self.dagger().entries;
        diff.data().iter().fold(0.0f64, |m, v| m.max(v.norm())) / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(
            x.len(),
            self.dim(),
            "vector length does not match operator dimension"
        );
        self.entries
            .outer_iterator()
            .map(|row| row.iter().map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// Dense product `self * x`.
    pub fn left_mul(&self, x: &Mat<C64>) -> Mat<C64> {
        let n = self.dim();
        assert_eq!(x.nrows(), n, "dense operand has wrong row count");
        let mut out = Mat::zeros(n, x.ncols());
        for col in 0..x.ncols() {
            let xc = x.col(col);
            for (i, row) in self.entries.outer_iterator().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, v) in row.iter() {
                    acc += v * xc[j];
                }
                out[(i, col)] = acc;
            }
        }
        out
    }

    /// Dense product `x * self^dagger`.
    pub fn right_mul_adjoint(&self, x: &Mat<C64>) -> Mat<C64> {
        self.left_mul(&x.adjoint().to_owned()).adjoint().to_owned()
    }

    /// Largest singular value estimated by power iteration on `A^dagger A`.
    pub fn norm_estimate(&self, iterations: usize) -> f64 {
        let n = self.dim();
        let adj = self.dagger();
        let mut v: Vec<C64> = (0..n)
            .map(|k| C64::new(1.0 + (k % 7) as f64 * 0.1, 0.0))
            .collect();
        let mut est = 0.0;
        for _ in 0..iterations {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|z| *z /= norm);
            let w = adj.apply(&self.apply(&v));
            est = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().sqrt();
            v = w;
        }
        est
    }
}

impl PartialEq for OperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.entries == other.entries
    }
}

macro_rules! panicking_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&OperatorMatrix> for &OperatorMatrix {
            type Output = OperatorMatrix;
            /// Panics if the operands act on different spaces.
            fn $m(self, rhs: &OperatorMatrix) -> OperatorMatrix {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<OperatorMatrix> for OperatorMatrix {
            type Output = OperatorMatrix;
            fn $m(self, rhs: OperatorMatrix) -> OperatorMatrix {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&OperatorMatrix> for OperatorMatrix {
            type Output = OperatorMatrix;
            fn $m(self, rhs: &OperatorMatrix) -> OperatorMatrix {
                (&self).$m(rhs)
            }
        }
        impl $tr<OperatorMatrix> for &OperatorMatrix {
            type Output = OperatorMatrix;
            fn $m(self, rhs: OperatorMatrix) -> OperatorMatrix {
                self.$m(&rhs)
            }
        }
    };
}

panicking_binop!(Add, add, try_add);
panicking_binop!(Sub, sub, try_sub);
panicking_binop!(Mul, mul, try_mul);

impl Mul<&OperatorMatrix> for f64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

impl Mul<OperatorMatrix> for f64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

impl Mul<&OperatorMatrix> for C64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

impl Mul<OperatorMatrix> for C64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale(-1.0)
    }
}

impl Neg for OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale(-1.0)
    }
}
