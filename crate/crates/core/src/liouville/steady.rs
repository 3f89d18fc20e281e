use std::fmt;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::dense::null_vector;
use super::krylov::{self, KrylovOptions};
use super::Superoperator;
use crate::fock::DensityMatrix;
use crate::{Error, Result, C64};

/// Steady-state algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverMethod {
    /// Direct for small systems, Krylov otherwise; falls back on failure.
    Auto,
    /// Sparse LU with one population equation replaced by the trace condition.
    Direct,
    /// Dense null vector by complete-pivoting elimination; small systems only.
    Dense,
    /// Lyapunov-preconditioned GMRES.
    Krylov,
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Auto => "auto",
            Self::Direct => "direct",
            Self::Dense => "dense",
            Self::Krylov => "krylov",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SolverMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "direct" => Ok(Self::Direct),
            "dense" => Ok(Self::Dense),
            "krylov" => Ok(Self::Krylov),
            other => Err(Error::InvalidParameter(format!(
                "unknown solver method `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyStateOptions {
    pub method: SolverMethod,
    /// Bound on the relative residual `||L rho|| / (||L|| ||rho||)`.
    pub tol: f64,
    /// Solve a second, differently pinned system and require the same answer.
    pub degeneracy_check: bool,
    /// Also run the dense oracle (when small enough) and report the trace distance.
    pub cross_check: bool,
    /// Largest `dim^2` handled by the dense route.
    pub dense_limit: usize,
    /// Largest `dim^2` for which `Auto` picks the direct route.
    pub direct_limit: usize,
    pub krylov: KrylovOptions,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::Auto,
            tol: 1e-9,
            degeneracy_check: true,
            cross_check: false,
            dense_limit: 4096,
            direct_limit: 5000,
            krylov: KrylovOptions::default(),
        }
    }
}

/// Diagnostics of a steady-state solve.
#[derive(Clone, Debug)]
pub struct SolverReport {
    /// Method that produced the state.
    pub method: SolverMethod,
    pub residual: f64,
    /// Hermiticity error before the final symmetrization.
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// `|tr rho - 1|` of the raw solution after normalization.
    pub trace_error: f64,
    /// GMRES iterations, when applicable.
    pub iterations: Option<usize>,
    /// Trace distance between the two pinned solutions.
    pub degeneracy_distance: Option<f64>,
    /// Trace distance to the dense oracle.
    pub cross_check_distance: Option<f64>,
    /// Notes about fallbacks taken.
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub report: SolverReport,
}

/// Threshold on the trace distance between two pinnings beyond which the
/// steady state is declared non-unique.
const DEGENERACY_THRESHOLD: f64 = 1e-6;

fn population_rows(l: &Superoperator) -> Vec<(usize, f64)> {
    let n = l.space().total_dim();
    let mut rows: Vec<(usize, f64)> = (0..n)
        .map(|j| {
            let k = j + j * n;
            (k, l.matrix().get(k, k).map_or(0.0, |v| v.norm()))
        })
        .collect();
    // Largest diagonal first; ties broken by index for determinism.
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    rows
}

/// Solves `L' x = e_k` where row `k` (a population row) of `L` is replaced by
/// the trace functional.
fn solve_pinned(l: &Superoperator, row: usize) -> Result<Vec<C64>> {
    let n = l.space().total_dim();
    let size = l.size();
    let mut trips = Vec::with_capacity(l.nnz() + n);
    for (i, r) in l.matrix().outer_iterator().enumerate() {
        if i == row {
            continue;
        }
        for (j, v) in r.iter() {
            trips.push(Triplet::new(i, j, *v));
        }
    }
    for j in 0..n {
        trips.push(Triplet::new(row, j + j * n, C64::new(1.0, 0.0)));
    }
    let a = SparseColMat::<usize, C64>::try_new_from_triplets(size, size, &trips)
        .map_err(|e| Error::Singular(format!("cannot assemble pinned system: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
    let mut rhs = Mat::<C64>::zeros(size, 1);
    rhs[(row, 0)] = C64::new(1.0, 0.0);
    lu.solve_in_place(rhs.as_mut());
    let x: Vec<C64> = (0..size).map(|i| rhs[(i, 0)]).collect();
    if x.iter().any(|z| !z.is_finite()) {
        return Err(Error::Singular(
            "sparse LU produced non-finite entries".into(),
        ));
    }
    Ok(x)
}

fn to_state(l: &Superoperator, x: &[C64]) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::from_vec(l.space(), x)?;
    rho.normalize()?;
    Ok(rho)
}

struct Raw {
    rho: DensityMatrix,
    method: SolverMethod,
    iterations: Option<usize>,
    degeneracy_distance: Option<f64>,
}

fn direct(l: &Superoperator, opts: &SteadyStateOptions) -> Result<Raw> {
    let rows = population_rows(l);
    let rho = to_state(l, &solve_pinned(l, rows[0].0)?)?;
    let mut degeneracy_distance = None;
    if opts.degeneracy_check && rows.len() > 1 {
        let other = to_state(l, &solve_pinned(l, rows[1].0)?)?;
        let d = rho.trace_distance(&other)?;
        if d > DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateNullSpace(format!(
                "solutions pinned on different population rows differ by trace distance {d:.3e}"
            )));
        }
        degeneracy_distance = Some(d);
    }
    Ok(Raw {
        rho,
        method: SolverMethod::Direct,
        iterations: None,
        degeneracy_distance,
    })
}

fn dense(l: &Superoperator, opts: &SteadyStateOptions) -> Result<Raw> {
    let size = l.size();
    if size > opts.dense_limit {
        return Err(Error::Singular(format!(
            "dense route limited to dim^2 <= {}, got {size}",
            opts.dense_limit
        )));
    }
    let mut a = vec![C64::new(0.0, 0.0); size * size];
    for (v, (i, j)) in l.matrix().iter() {
        a[i * size + j] = *v;
    }
    let nv = null_vector(a, size);
    // Relative pivot sizes; the threshold reflects double precision at these sizes.
    if size > 1 && nv.second_last_pivot < 1e-11 {
        return Err(Error::DegenerateNullSpace(format!(
            "two negligible pivots ({:.3e}, {:.3e})",
            nv.second_last_pivot, nv.last_pivot
        )));
    }
    let rho = to_state(l, &nv.vector)?;
    Ok(Raw {
        rho,
        method: SolverMethod::Dense,
        iterations: None,
        degeneracy_distance: None,
    })
}

fn identity_seed(n: usize, weighted: bool) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if weighted {
            C64::new((1.0 + i as f64 / n as f64) / n as f64, 0.0)
        } else {
            C64::new(1.0 / n as f64, 0.0)
        }
    })
}

fn krylov(l: &Superoperator, opts: &SteadyStateOptions) -> Result<Raw> {
    let n = l.space().total_dim();
    let sol = krylov::solve(l, &identity_seed(n, false), &opts.krylov)?;
    let mut iterations = sol.iterations;
    let rho = to_state(
        l,
        &DensityMatrix::new_unchecked(l.space(), sol.rho)?.to_vec(),
    )?;
    let mut degeneracy_distance = None;
    if opts.degeneracy_check {
        let alt = krylov::solve(l, &identity_seed(n, true), &opts.krylov)?;
        iterations += alt.iterations;
        let other = to_state(
            l,
            &DensityMatrix::new_unchecked(l.space(), alt.rho)?.to_vec(),
        )?;
        let d = rho.trace_distance(&other)?;
        if d > DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateNullSpace(format!(
                "solutions with different bordering differ by trace distance {d:.3e}"
            )));
        }
        degeneracy_distance = Some(d);
    }
    Ok(Raw {
        rho,
        method: SolverMethod::Krylov,
        iterations: Some(iterations),
        degeneracy_distance,
    })
}

/// Unique trace-one `rho` with `L(rho) = 0`.
pub fn steady_state(l: &Superoperator, opts: &SteadyStateOptions) -> Result<SteadyState> {
    let size = l.size();
    let mut notes = Vec::new();
    let raw = match opts.method {
        SolverMethod::Direct => direct(l, opts)?,
        SolverMethod::Dense => dense(l, opts)?,
        SolverMethod::Krylov => krylov(l, opts)?,
        SolverMethod::Auto => {
            let prefer_krylov = l.is_structured() && size > opts.direct_limit;
            let first = if prefer_krylov {
                krylov(l, opts)
            } else {
                direct(l, opts)
            };
            match first {
                Ok(r) => r,
                Err(e @ Error::DegenerateNullSpace(_)) => return Err(e),
                Err(e) => {
                    notes.push(format!("primary route failed ({e}); falling back"));
                    if prefer_krylov {
                        direct(l, opts)?
                    } else if size <= opts.dense_limit {
                        dense(l, opts)?
                    } else if l.is_structured() {
                        krylov(l, opts)?
                    } else {
                        return Err(e);
                    }
                }
            }
        }
    };
    let Raw {
        mut rho,
        method,
        iterations,
        degeneracy_distance,
    } = raw;
    let trace_error = (rho.trace() - 1.0).norm();
    let hermiticity_error = rho.hermiticity_error();
    rho.symmetrize();
    let residual = l.relative_residual(&rho)?;
    if !(residual <= opts.tol) {
        return Err(Error::ResidualTooLarge {
            residual,
            tol: opts.tol,
        });
    }
    let cross_check_distance =
        if opts.cross_check && size <= opts.dense_limit && method != SolverMethod::Dense {
            let mut oracle = dense(l, opts)?.rho;
            oracle.symmetrize();
            Some(rho.trace_distance(&oracle)?)
        } else {
            None
        };
    let min_eigenvalue = rho.min_eigenvalue();
    Ok(SteadyState {
        rho,
        report: SolverReport {
            method,
            residual,
            hermiticity_error,
            min_eigenvalue,
            trace_error,
            iterations,
            degeneracy_distance,
            cross_check_distance,
            notes,
        },
    })
}
