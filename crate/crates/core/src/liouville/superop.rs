use std::ops::Add;

use faer::Mat;
use sprs::CsMat;

use crate::fock::{DensityMatrix, HilbertSpace, OperatorMatrix};
use crate::{Error, Result, C64};

/// Relative tolerance used to accept a Hamiltonian as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// One term `rate * (J rho P^dagger - 1/2 {P^dagger J, rho})` of a Lindbladian.
///
/// Ordinary channels have `J == P`; a correlated decay of two modes is split
/// into the two mixed terms `(o1, o2)` and `(o2, o1)`.
#[derive(Clone, Debug)]
pub struct Channel {
    pub jump: OperatorMatrix,
    pub partner: OperatorMatrix,
    pub rate: f64,
}

/// Liouvillian acting on column-stacked density matrices.
///
/// Besides the sparse `N x N` matrix (`N = dim^2`), superoperators built from
/// Hamiltonians and channels keep those terms; the preconditioned Krylov solver
/// works directly with them.
#[derive(Clone, Debug)]
pub struct Superoperator {
    space: HilbertSpace,
    matrix: CsMat<C64>,
    hamiltonian: Option<OperatorMatrix>,
    channels: Vec<Channel>,
    structured: bool,
}

fn kron(a: &CsMat<C64>, b: &CsMat<C64>) -> CsMat<C64> {
    sprs::kronecker_product(a.view(), b.view())
}

fn csr(op: &OperatorMatrix) -> CsMat<C64> {
    op.matrix().clone()
}

fn scaled(m: &CsMat<C64>, z: C64) -> CsMat<C64> {
    m.map(|v| v * z)
}

impl Superoperator {
    /// Wraps a raw `dim^2 x dim^2` matrix. Such operators have no Lindblad terms
    /// attached and cannot use the Krylov solver.
    pub fn from_matrix(space: &HilbertSpace, matrix: CsMat<C64>) -> Result<Self> {
        let n2 = space.total_dim() * space.total_dim();
        if matrix.shape() != (n2, n2) {
            return Err(Error::InvalidParameter(format!(
                "superoperator shape {:?} does not match space dimension {}",
                matrix.shape(),
                space.total_dim()
            )));
        }
        Ok(Self {
            space: space.clone(),
            matrix: matrix.to_csr(),
            hamiltonian: None,
            channels: Vec::new(),
            structured: false,
        })
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        let n2 = space.total_dim() * space.total_dim();
        Self {
            space: space.clone(),
            matrix: CsMat::zero((n2, n2)),
            hamiltonian: None,
            channels: Vec::new(),
            structured: true,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CsMat<C64> {
        &self.matrix
    }

    /// Side length `dim^2` of the matrix.
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn hamiltonian(&self) -> Option<&OperatorMatrix> {
        self.hamiltonian.as_ref()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Whether the Hamiltonian and channels are known.
    pub fn is_structured(&self) -> bool {
        self.structured
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: other.space.to_string(),
            });
        }
        let hamiltonian = match (&self.hamiltonian, &other.hamiltonian) {
            (Some(a), Some(b)) => Some(a.try_add(b)?),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        let mut channels = self.channels.clone();
        channels.extend(other.channels.iter().cloned());
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
            hamiltonian,
            channels,
            structured: self.structured && other.structured,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: scaled(&self.matrix, C64::new(factor, 0.0)),
            hamiltonian: self.hamiltonian.as_ref().map(|h| h.scale(factor)),
            channels: self
                .channels
                .iter()
                .map(|c| Channel {
                    jump: c.jump.clone(),
                    partner: c.partner.clone(),
                    rate: c.rate * factor,
                })
                .collect(),
            structured: self.structured,
        }
    }

    /// `L vec`.
    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(
            x.len(),
            self.size(),
            "vector length does not match superoperator"
        );
        self.matrix
            .outer_iterator()
            .map(|row| row.iter().map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `L(rho)` as a dense matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<Mat<C64>> {
        if rho.space() != &self.space {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: rho.space().to_string(),
            });
        }
        let n = self.space.total_dim();
        let y = self.apply_vec(&rho.to_vec());
        Ok(Mat::from_fn(n, n, |i, j| y[i + j * n]))
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.matrix
            .outer_iterator()
            .map(|row| row.iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `||L vec(rho)|| / (||L||_inf ||vec(rho)||)`.
    pub fn relative_residual(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.space() != &self.space {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: rho.space().to_string(),
            });
        }
        let x = rho.to_vec();
        let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let r = self.apply_vec(&x);
        let rn = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = self.norm_inf() * xn;
        Ok(if scale == 0.0 { rn } else { rn / scale })
    }

    /// `max_k |sum_j L[(j,j), k]| / ||L||_inf`; zero for a trace-preserving map.
    pub fn trace_preservation_error(&self) -> f64 {
        let n = self.space.total_dim();
        let mut cols = vec![C64::new(0.0, 0.0); self.size()];
        for j in 0..n {
            let row = j + j * n;
            if let Some(r) = self.matrix.outer_view(row) {
                for (k, v) in r.iter() {
                    cols[k] += v;
                }
            }
        }
        let worst = cols.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = self.norm_inf();
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }
}

impl Add for Superoperator {
    type Output = Superoperator;
    /// Panics if the operands act on different spaces.
    fn add(self, rhs: Superoperator) -> Superoperator {
        self.try_add(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add<&Superoperator> for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

/// `rho -> -i [H, rho]`, i.e. `-i (I ⊗ H - H^T ⊗ I)`.
pub fn hamiltonian_superop(h: &OperatorMatrix) -> Result<Superoperator> {
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let id: CsMat<C64> = CsMat::eye(h.dim());
    let hm = csr(h);
    let left = kron(&id, &hm);
    let right = kron(&csr(&h.transpose()), &id);
    let matrix = scaled(&(&left - &right), C64::new(0.0, -1.0));
    Ok(Superoperator {
        space: h.space().clone(),
        matrix,
        hamiltonian: Some(h.clone()),
        channels: Vec::new(),
        structured: true,
    })
}

fn channel_matrix(jump: &OperatorMatrix, partner: &OperatorMatrix, rate: f64) -> CsMat<C64> {
    let id: CsMat<C64> = CsMat::eye(jump.dim());
    let m = partner.dagger() * jump;
    let sandwich = kron(&csr(&partner.conj()), &csr(jump));
    let left = kron(&id, &csr(&m));
    let right = kron(&csr(&m.transpose()), &id);
    let half = C64::new(0.5, 0.0);
    let total = &(&sandwich - &scaled(&left, half)) - &scaled(&right, half);
    scaled(&total, C64::new(rate, 0.0))
}

fn check_rate(rate: f64) -> Result<()> {
    if !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite rate {rate}")));
    }
    Ok(())
}

/// `rate * D[o]`, with `D[o] rho = o rho o^dagger - 1/2 {o^dagger o, rho}`.
pub fn dissipator_superop(o: &OperatorMatrix, rate: f64) -> Result<Superoperator> {
    check_rate(rate)?;
    if rate < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "negative dissipation rate {rate}"
        )));
    }
    Ok(Superoperator {
        space: o.space().clone(),
        matrix: channel_matrix(o, o, rate),
        hamiltonian: None,
        channels: vec![Channel {
            jump: o.clone(),
            partner: o.clone(),
            rate,
        }],
        structured: true,
    })
}

/// Correlated decay
/// `rate * (o1 rho o2^dagger + o2 rho o1^dagger - 1/2 {o2^dagger o1 + o1^dagger o2, rho})`.
///
/// The rate may have either sign; positivity of the full Lindbladian is the
/// caller's responsibility.
pub fn cross_dissipator_superop(
    o1: &OperatorMatrix,
    o2: &OperatorMatrix,
    rate: f64,
) -> Result<Superoperator> {
    check_rate(rate)?;
    if o1.space() != o2.space() {
        return Err(Error::SpaceMismatch {
            left: o1.space().to_string(),
            right: o2.space().to_string(),
        });
    }
    let matrix = &channel_matrix(o1, o2, rate) + &channel_matrix(o2, o1, rate);
    Ok(Superoperator {
        space: o1.space().clone(),
        matrix,
        hamiltonian: None,
        channels: vec![
            Channel {
                jump: o1.clone(),
                partner: o2.clone(),
                rate,
            },
            Channel {
                jump: o2.clone(),
                partner: o1.clone(),
                rate,
            },
        ],
        structured: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dense_lindblad(h: &Mat<C64>, jumps: &[(Mat<C64>, f64)], rho: &Mat<C64>) -> Mat<C64> {
        let mi = C64::new(0.0, -1.0);
        let mut out = (h * rho - rho * h) * faer::Scale(mi);
        for (o, r) in jumps {
            let od = o.adjoint().to_owned();
            let m = &od * o;
            let term = o * rho * &od - (&m * rho + rho * &m) * faer::Scale(C64::new(0.5, 0.0));
            out += term * faer::Scale(C64::new(*r, 0.0));
        }
        out
    }

    fn test_state(n: usize) -> Mat<C64> {
        Mat::from_fn(n, n, |i, j| {
            C64::new(
                1.0 / (1.0 + i as f64 + j as f64),
                0.1 * (i as f64 - j as f64),
            )
        })
    }

    #[test]
    fn matches_dense_reference() {
        let s = HilbertSpace::new([("a", 2), ("c", 3)]).unwrap();
        let a = OperatorMatrix::annihilation(&s, "a").unwrap();
        let c = OperatorMatrix::annihilation(&s, "c").unwrap();
        let h = (&a.dagger() * &c)
            + (&c.dagger() * &a)
            + 0.7 * &OperatorMatrix::number(&s, "c").unwrap();
        let l = hamiltonian_superop(&h).unwrap()
            + dissipator_superop(&c, 0.3).unwrap()
            + dissipator_superop(&a.dagger(), 0.2).unwrap();
        let rho = test_state(6);
        let reference = dense_lindblad(
            &h.to_dense(),
            &[(c.to_dense(), 0.3), (a.dagger().to_dense(), 0.2)],
            &rho,
        );
        let r = DensityMatrix::new_unchecked(&s, rho).unwrap();
        let got = l.apply(&r).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_abs_diff_eq!(
                    (got[(i, j)] - reference[(i, j)]).norm(),
                    0.0,
                    epsilon = 1e-13
                );
            }
        }
        assert!(l.trace_preservation_error() < 1e-15);
        assert_eq!(l.channels().len(), 2);
    }

    #[test]
    fn decay_of_single_excitation() {
        let s = HilbertSpace::single("a", 3).unwrap();
        let a = OperatorMatrix::annihilation(&s, "a").unwrap();
        let l = dissipator_superop(&a, 2.0).unwrap();
        let rho = DensityMatrix::fock(&s, &[1]).unwrap();
        let d = l.apply(&rho).unwrap();
        assert_abs_diff_eq!(d[(0, 0)].re, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(1, 1)].re, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn cross_dissipator_reduces_to_plain() {
        let s = HilbertSpace::single("a", 4).unwrap();
        let a = OperatorMatrix::annihilation(&s, "a").unwrap();
        let cross = cross_dissipator_superop(&a, &a, 0.75).unwrap();
        let plain = dissipator_superop(&a, 1.0).unwrap().scale(1.5);
        let diff = cross.matrix() - plain.matrix();
        assert!(diff.data().iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let s = HilbertSpace::single("a", 3).unwrap();
        let a = OperatorMatrix::annihilation(&s, "a").unwrap();
        assert!(matches!(
            hamiltonian_superop(&a),
            Err(Error::NotHermitian { .. })
        ));
        assert!(dissipator_superop(&a, -1.0).is_err());
        assert!(dissipator_superop(&a, f64::NAN).is_err());
    }
}
