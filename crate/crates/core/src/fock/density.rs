use faer::{Mat, Side};

use super::{HilbertSpace, OperatorMatrix};
use crate::{Error, Result, C64};

/// Acceptance thresholds applied when a [`DensityMatrix`] is validated.
#[derive(Clone, Copy, Debug)]
pub struct StateTolerances {
    /// Bound on `max |rho - rho^dagger|` relative to `max |rho|`.
    pub hermiticity: f64,
    /// Bound on `|tr rho - 1|`.
    pub trace: f64,
    /// Most negative eigenvalue tolerated.
    pub min_eigenvalue: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-8,
            min_eigenvalue: -1e-8,
        }
    }
}

/// Dense density matrix on a [`HilbertSpace`].
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    space: HilbertSpace,
    data: Mat<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity with default tolerances.
    pub fn new(space: &HilbertSpace, data: Mat<C64>) -> Result<Self> {
        Self::with_tolerances(space, data, &StateTolerances::default())
    }

    pub fn with_tolerances(
        space: &HilbertSpace,
        data: Mat<C64>,
        tol: &StateTolerances,
    ) -> Result<Self> {
        let rho = Self::new_unchecked(space, data)?;
        let herm = rho.hermiticity_error();
        if herm > tol.hermiticity {
            return Err(Error::InvalidState(format!("Hermiticity error {herm:.3e}")));
        }
        let tr = rho.trace();
        if (tr - 1.0).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = rho.min_eigenvalue();
        if min < tol.min_eigenvalue {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(rho)
    }

    /// Wraps a matrix of the right shape without checking the state conditions.
    pub fn new_unchecked(space: &HilbertSpace, data: Mat<C64>) -> Result<Self> {
        let n = space.total_dim();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, space {space} has dimension {n}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self {
            space: space.clone(),
            data,
        })
    }

    /// Product Fock state `|n_1, ..., n_k><n_1, ..., n_k|`.
    pub fn fock(space: &HilbertSpace, occupations: &[usize]) -> Result<Self> {
        let idx = space.index_of(occupations)?;
        let n = space.total_dim();
        let data = Mat::from_fn(n, n, |i, j| {
            if i == idx && j == idx {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Self {
            space: space.clone(),
            data,
        })
    }

    /// Pure state from (not necessarily normalized) amplitudes.
    pub fn pure(space: &HilbertSpace, amplitudes: &[C64]) -> Result<Self> {
        let n = space.total_dim();
        if amplitudes.len() != n {
            return Err(Error::InvalidState(format!(
                "expected {n} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidState(
                "state vector has zero or non-finite norm".into(),
            ));
        }
        let data = Mat::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / norm2);
        Ok(Self {
            space: space.clone(),
            data,
        })
    }

    /// Diagonal state of a single mode with the given populations, normalized.
    pub fn diagonal(space: &HilbertSpace, populations: &[f64]) -> Result<Self> {
        let n = space.total_dim();
        if populations.len() != n {
            return Err(Error::InvalidState(format!(
                "expected {n} populations, got {}",
                populations.len()
            )));
        }
        if populations.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidState(
                "populations must be finite and non-negative".into(),
            ));
        }
        let total: f64 = populations.iter().sum();
        if total == 0.0 {
            return Err(Error::InvalidState("populations sum to zero".into()));
        }
        let data = Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(populations[i] / total, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Self {
            space: space.clone(),
            data,
        })
    }

    /// `self ⊗ other`; the mode labels must be disjoint.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let modes = self
            .space
            .labels()
            .iter()
            .zip(self.space.dims())
            .chain(other.space.labels().iter().zip(other.space.dims()))
            .map(|(l, &d)| (l.clone(), d));
        let space = HilbertSpace::new(modes)?;
        let m = other.dim();
        let data = Mat::from_fn(self.dim() * m, self.dim() * m, |i, j| {
            self.data[(i / m, j / m)] * other.data[(i % m, j % m)]
        });
        Ok(Self { space, data })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[(i, i)]).sum()
    }

    /// `max |rho - rho^dagger| / max |rho|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut scale = 0.0f64;
        let mut dev = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                scale = scale.max(self.data[(i, j)].norm());
                dev = dev.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            dev / scale
        }
    }

    /// Replaces the matrix by its Hermitian part.
    pub fn symmetrize(&mut self) {
        let n = self.dim();
        for j in 0..n {
            for i in 0..=j {
                let v = 0.5 * (self.data[(i, j)] + self.data[(j, i)].conj());
                self.data[(i, j)] = v;
                self.data[(j, i)] = v.conj();
            }
        }
    }

    /// Divides by the trace.
    pub fn normalize(&mut self) -> Result<()> {
        let tr = self.trace();
        if tr.norm() == 0.0 || !tr.is_finite() {
            return Err(Error::InvalidState(format!(
                "cannot normalize matrix with trace {tr}"
            )));
        }
        let inv = tr.inv();
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                self.data[(i, j)] *= inv;
            }
        }
        Ok(())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Reduced state of the listed modes (kept in their original order).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let sub = self.space.subspace(keep)?;
        let kept: Vec<usize> = sub
            .labels()
            .iter()
            .map(|l| self.space.mode_index(l))
            .collect::<Result<_>>()?;
        let n = self.dim();
        // Split each basis index into its kept and traced parts.
        let mut groups: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut traced_dim = 1;
        let traced: Vec<usize> = (0..self.space.num_modes())
            .filter(|k| !kept.contains(k))
            .collect();
        for &k in &traced {
            traced_dim *= self.space.dims()[k];
        }
        groups.resize(traced_dim, Vec::new());
        for idx in 0..n {
            let occ = self.space.occupations(idx);
            let mut ki = 0;
            for &k in &kept {
                ki = ki * self.space.dims()[k] + occ[k];
            }
            let mut ti = 0;
            for &k in &traced {
                ti = ti * self.space.dims()[k] + occ[k];
            }
            groups[ti].push((ki, idx));
        }
        let m = sub.total_dim();
        let mut out = Mat::<C64>::zeros(m, m);
        for g in &groups {
            for &(ki, i) in g {
                for &(kj, j) in g {
                    out[(ki, kj)] += self.data[(i, j)];
                }
            }
        }
        Ok(Self {
            space: sub,
            data: out,
        })
    }

    /// Diagonal of the reduced state of one mode.
    pub fn populations(&self, label: &str) -> Result<Vec<f64>> {
        let red = self.partial_trace(&[label])?;
        Ok((0..red.dim()).map(|i| red.data[(i, i)].re).collect())
    }

    /// `tr(rho O)`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        if op.space() != &self.space {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: op.space().to_string(),
            });
        }
        Ok(op.iter().map(|(i, j, v)| v * self.data[(j, i)]).sum())
    }

    /// `1/2 sum |eig(rho - sigma)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if other.space != self.space {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: other.space.to_string(),
            });
        }
        let diff = &self.data - &other.data;
        Ok(0.5
            * hermitian_eigenvalues(&diff)
                .iter()
                .map(|e| e.abs())
                .sum::<f64>())
    }

    /// Column-stacked vectorization, `vec[i + j n] = rho[i, j]`.
    pub fn to_vec(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n * n).map(|k| self.data[(k % n, k / n)]).collect()
    }

    /// Inverse of [`DensityMatrix::to_vec`], unchecked.
    pub fn from_vec(space: &HilbertSpace, v: &[C64]) -> Result<Self> {
        let n = space.total_dim();
        if v.len() != n * n {
            return Err(Error::InvalidState(format!(
                "vector of length {} does not match dimension {n}",
                v.len()
            )));
        }
        Self::new_unchecked(space, Mat::from_fn(n, n, |i, j| v[i + j * n]))
    }
}

fn hermitian_eigenvalues(m: &Mat<C64>) -> Vec<f64> {
    let n = m.nrows();
    let h = Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    h.self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigensolver failed to converge")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fock_state_is_valid() {
        let s = HilbertSpace::new([("a", 2), ("c", 3)]).unwrap();
        let rho = DensityMatrix::fock(&s, &[1, 2]).unwrap();
        assert_abs_diff_eq!(rho.trace().re, 1.0);
        assert_eq!(rho.populations("c").unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(rho.populations("a").unwrap(), vec![0.0, 1.0]);
        DensityMatrix::new(&s, rho.clone().into_matrix()).unwrap();
    }

    #[test]
    fn validation_rejects_bad_states() {
        let s = HilbertSpace::single("a", 2).unwrap();
        let c = |re: f64| C64::new(re, 0.0);
        let nonherm = Mat::from_fn(2, 2, |i, j| {
            if i == 0 && j == 1 {
                c(0.3)
            } else if i == j {
                c(0.5)
            } else {
                c(0.0)
            }
        });
        assert!(DensityMatrix::new(&s, nonherm).is_err());
        let badtrace = Mat::from_fn(2, 2, |i, j| if i == j { c(0.6) } else { c(0.0) });
        assert!(DensityMatrix::new(&s, badtrace).is_err());
        let negative = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                c(if i == 0 { 1.2 } else { -0.2 })
            } else {
                c(0.0)
            }
        });
        assert!(DensityMatrix::new(&s, negative).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let sa = HilbertSpace::single("a", 2).unwrap();
        let sc = HilbertSpace::single("c", 3).unwrap();
        let ra = DensityMatrix::pure(&sa, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let rc = DensityMatrix::diagonal(&sc, &[0.2, 0.5, 0.3]).unwrap();
        let prod = ra.tensor(&rc).unwrap();
        let back = prod.partial_trace(&["a"]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(
                    (back.element(i, j) - ra.element(i, j)).norm(),
                    0.0,
                    epsilon = 1e-15
                );
            }
        }
        let pc = prod.populations("c").unwrap();
        assert_abs_diff_eq!(pc[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let s = HilbertSpace::single("a", 3).unwrap();
        let r0 = DensityMatrix::fock(&s, &[0]).unwrap();
        let r1 = DensityMatrix::fock(&s, &[1]).unwrap();
        assert_abs_diff_eq!(r0.trace_distance(&r1).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r0.trace_distance(&r0).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn expectation_of_number() {
        let s = HilbertSpace::single("c", 4).unwrap();
        let rho = DensityMatrix::diagonal(&s, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let n = OperatorMatrix::number(&s, "c").unwrap();
        assert_abs_diff_eq!(
            rho.expectation(&n).unwrap().re,
            0.2 + 0.6 + 1.2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn vec_roundtrip_is_column_stacked() {
        let s = HilbertSpace::single("a", 2).unwrap();
        let rho = DensityMatrix::pure(&s, &[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        let v = rho.to_vec();
        assert_eq!(v[1], rho.element(1, 0));
        assert_eq!(v[2], rho.element(0, 1));
        let back = DensityMatrix::from_vec(&s, &v).unwrap();
        assert_eq!(back.element(1, 0), rho.element(1, 0));
    }
}
