//! Lyapunov-preconditioned GMRES for the steady state.
//!
//! Writing the Lindbladian as `L(X) = K X + X K^dagger + sum_c r_c J_c X P_c^dagger`
//! with `K = -iH - 1/2 sum_c r_c P_c^dagger J_c`, the steady state is a fixed
//! point of `T(X) = -Kinv(sum_c r_c J_c X P_c^dagger)`, where `Kinv` inverts the
//! Lyapunov map `X -> K X + X K^dagger` through the eigendecomposition of `K`.
//! GMRES then solves `(I - T) X + u tr(X) = u` for a fixed positive `u`, whose
//! unique solution is the trace-one steady state.
//!
//! Every operator application costs a few dense `dim x dim` products instead of
//! touching the `dim^2 x dim^2` Liouvillian, which keeps memory and time low for
//! the four-mode models.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use super::Superoperator;
use crate::fock::OperatorMatrix;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions {
    /// GMRES restart length.
    pub restart: usize,
    /// Relative residual of the preconditioned system.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            restart: 60,
            tol: 1e-13,
            max_iterations: 3000,
        }
    }
}

pub(crate) struct KrylovSolution {
    pub rho: Mat<C64>,
    pub iterations: usize,
}

struct Preconditioned<'a> {
    v: Mat<C64>,
    v_adj: Mat<C64>,
    vinv: Mat<C64>,
    vinv_adj: Mat<C64>,
    eig: Vec<C64>,
    channels: Vec<(&'a OperatorMatrix, &'a OperatorMatrix, f64)>,
}

impl Preconditioned<'_> {
    fn lyapunov_inverse(&self, c: &Mat<C64>) -> Mat<C64> {
        let n = c.nrows();
        let mut y = &self.vinv * c * &self.vinv_adj;
        for j in 0..n {
            let dj = self.eig[j].conj();
            for i in 0..n {
                y[(i, j)] /= self.eig[i] + dj;
            }
        }
        &self.v * y * &self.v_adj
    }

    fn fixed_point_map(&self, x: &Mat<C64>) -> Mat<C64> {
        let n = x.nrows();
        let mut acc = Mat::<C64>::zeros(n, n);
        for (jump, partner, rate) in &self.channels {
            let jx = jump.left_mul(x);
            let term = partner.right_mul_adjoint(&jx);
            acc += term * faer::Scale(C64::new(-*rate, 0.0));
        }
        self.lyapunov_inverse(&acc)
    }
}

fn inner(a: &Mat<C64>, b: &Mat<C64>) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        let (ca, cb) = (a.col(j), b.col(j));
        for i in 0..a.nrows() {
            s += ca[i].conj() * cb[i];
        }
    }
    s
}

fn norm(a: &Mat<C64>) -> f64 {
    inner(a, a).re.sqrt()
}

fn trace(a: &Mat<C64>) -> C64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// Solves for the steady state; `seed` is the positive matrix `u` of the
/// bordered system. Returns an unnormalized solution.
pub(crate) fn solve(
    l: &Superoperator,
    seed: &Mat<C64>,
    opts: &KrylovOptions,
) -> Result<KrylovSolution> {
    if !l.is_structured() {
        return Err(Error::Singular(
            "Krylov solver needs the Hamiltonian and channels of the Liouvillian".into(),
        ));
    }
    let space = l.space();
    let n = space.total_dim();
    let mut g = OperatorMatrix::zeros(space);
    for c in l.channels() {
        g = g.try_add(&(c.partner.dagger() * &c.jump).scale(c.rate))?;
    }
    if g.hermiticity_deviation() > 1e-10 {
        return Err(Error::Singular(
            "channel anticommutator terms are not Hermitian".into(),
        ));
    }
    let mut k = g.to_dense() * faer::Scale(C64::new(-0.5, 0.0));
    if let Some(h) = l.hamiltonian() {
        k += h.to_dense() * faer::Scale(C64::new(0.0, -1.0));
    }
    let evd = k
        .eigen()
        .map_err(|e| Error::Singular(format!("eigendecomposition failed: {e:?}")))?;
    let v = evd.U().to_owned();
    let eig: Vec<C64> = (0..n).map(|i| evd.S()[i]).collect();
    if let Some(d) = eig.iter().find(|d| !(d.re < 0.0) || !d.is_finite()) {
        return Err(Error::Singular(format!(
            "effective Hamiltonian has an undamped eigenvalue {d}"
        )));
    }
    let vinv = v.partial_piv_lu().inverse();
    if !(0..n).all(|j| (0..n).all(|i| vinv[(i, j)].is_finite())) {
        return Err(Error::Singular("eigenvector basis is singular".into()));
    }
    let pre = Preconditioned {
        v_adj: v.adjoint().to_owned(),
        vinv_adj: vinv.adjoint().to_owned(),
        v,
        vinv,
        eig,
        channels: l
            .channels()
            .iter()
            .map(|c| (&c.jump, &c.partner, c.rate))
            .collect(),
    };
    let apply = |x: &Mat<C64>| -> Mat<C64> {
        let t = pre.fixed_point_map(x);
        x - t + seed * faer::Scale(trace(x))
    };

    let m = opts.restart.max(1);
    let bnorm = norm(seed);
    let mut x = Mat::<C64>::zeros(n, n);
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        let r0 = seed - apply(&x);
        let beta = norm(&r0);
        if beta / bnorm < opts.tol {
            return Ok(KrylovSolution { rho: x, iterations });
        }
        let mut basis = vec![r0 * faer::Scale(C64::new(1.0 / beta, 0.0))];
        let mut h = vec![vec![C64::new(0.0, 0.0); m]; m + 1];
        let mut cs = vec![C64::new(0.0, 0.0); m];
        let mut sn = vec![C64::new(0.0, 0.0); m];
        let mut gvec = vec![C64::new(0.0, 0.0); m + 1];
        gvec[0] = C64::new(beta, 0.0);
        let mut used = 0;
        for kk in 0..m {
            iterations += 1;
            let mut w = apply(&basis[kk]);
            for (i, vi) in basis.iter().enumerate() {
                let hik = inner(vi, &w);
                h[i][kk] = hik;
                w -= vi * faer::Scale(hik);
            }
            let hn = norm(&w);
            h[kk + 1][kk] = C64::new(hn, 0.0);
            for i in 0..kk {
                let t = cs[i].conj() * h[i][kk] + sn[i].conj() * h[i + 1][kk];
                h[i + 1][kk] = -sn[i] * h[i][kk] + cs[i] * h[i + 1][kk];
                h[i][kk] = t;
            }
            let (a, b) = (h[kk][kk], h[kk + 1][kk]);
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if r == 0.0 {
                break;
            }
            cs[kk] = a / r;
            sn[kk] = b / r;
            h[kk][kk] = C64::new(r, 0.0);
            h[kk + 1][kk] = C64::new(0.0, 0.0);
            gvec[kk + 1] = -sn[kk] * gvec[kk];
            gvec[kk] = cs[kk].conj() * gvec[kk];
            used = kk + 1;
            if gvec[kk + 1].norm() / bnorm < opts.tol
                || hn == 0.0
                || iterations >= opts.max_iterations
            {
                break;
            }
            basis.push(w * faer::Scale(C64::new(1.0 / hn, 0.0)));
        }
        if used == 0 {
            break;
        }
        let mut y = vec![C64::new(0.0, 0.0); used];
        for i in (0..used).rev() {
            let mut t = gvec[i];
            for j in i + 1..used {
                t -= h[i][j] * y[j];
            }
            y[i] = t / h[i][i];
        }
        for (vi, yi) in basis.iter().zip(&y) {
            x += vi * faer::Scale(*yi);
        }
    }
    let r0 = seed - apply(&x);
    let final_residual = norm(&r0) / bnorm;
    if final_residual < opts.tol {
        return Ok(KrylovSolution { rho: x, iterations });
    }
    Err(Error::NotConverged {
        iterations,
        residual: final_residual,
    })
}
