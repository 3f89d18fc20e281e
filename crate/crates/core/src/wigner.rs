//! Wigner functions of single-mode states.
//!
//! Quadratures are `q = (c + c^dagger)/sqrt 2` and `p = -i (c - c^dagger)/sqrt 2`,
//! normalized so that `∫∫ W dq dp = 1` and `|W| <= 1/pi`. The Fock-basis kernel
//! for `m >= n` is
//!
//! ```text
//! K_mn = (-1)^n / pi * sqrt(n!/m!) * (sqrt2 (q - i p))^(m-n) * L_n^(m-n)(2 r^2) * exp(-r^2)
//! ```
//!
//! with `K_nm = conj(K_mn)` and `W = sum_mn rho_mn K_mn`.

use std::f64::consts::PI;

use crate::fock::DensityMatrix;
use crate::{Error, Result, C64};

/// Largest Fock index accepted by the kernels.
pub const MAX_FOCK: usize = 30;

/// Generalized Laguerre polynomial `L_n^(alpha)(x)` by three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Wigner function of the Fock state `|n>`.
pub fn wigner_fock(n: usize, q: f64, p: f64) -> Result<f64> {
    if n > MAX_FOCK {
        return Err(Error::InvalidParameter(format!(
            "Fock index {n} above the supported maximum {MAX_FOCK}"
        )));
    }
    let r2 = q * q + p * p;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign / PI * laguerre(n, 0.0, 2.0 * r2) * (-r2).exp())
}

fn check_single_mode(rho: &DensityMatrix) -> Result<usize> {
    if rho.space().num_modes() != 1 {
        return Err(Error::InvalidState(format!(
            "Wigner function needs a single-mode state, got {}; trace out the other modes first",
            rho.space()
        )));
    }
    let d = rho.dim();
    if d > MAX_FOCK + 1 {
        return Err(Error::InvalidParameter(format!(
            "dimension {d} above the supported maximum {}",
            MAX_FOCK + 1
        )));
    }
    Ok(d)
}

/// Kernel rows for one phase-space point: `k[m - n][n] = K_mn` for `m >= n`.
fn kernels(d: usize, q: f64, p: f64) -> Vec<Vec<C64>> {
    let r2 = q * q + p * p;
    let x = 2.0 * r2;
    let gauss = (-r2).exp() / PI;
    let z = C64::new(q, -p) * std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d);
    for diff in 0..d {
        let alpha = diff as f64;
        let len = d - diff;
        let mut row = Vec::with_capacity(len);
        // prefactor for n: sqrt(n!/(n+diff)!) z^diff, updated as n grows
        let mut pref = C64::new(gauss, 0.0);
        for j in 1..=diff {
            pref *= z / (j as f64).sqrt();
        }
        let (mut l_prev, mut l_cur) = (0.0, 1.0);
        for n in 0..len {
            if n > 0 {
                let m = n + diff;
                pref *= ((n as f64) / (m as f64)).sqrt();
                let k = (n - 1) as f64;
                let next = if n == 1 {
                    1.0 + alpha - x
                } else {
                    ((2.0 * k + 1.0 + alpha - x) * l_cur - (k + alpha) * l_prev) / (k + 1.0)
                };
                l_prev = l_cur;
                l_cur = next;
            }
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            row.push(pref * (sign * l_cur));
        }
        out.push(row);
    }
    out
}

fn kernel_sum(rho: &DensityMatrix, d: usize, q: f64, p: f64) -> C64 {
    let k = kernels(d, q, p);
    let mut w = C64::new(0.0, 0.0);
    for m in 0..d {
        for n in 0..d {
            let kmn = if m >= n {
                k[m - n][n]
            } else {
                k[n - m][m].conj()
            };
            w += rho.element(m, n) * kmn;
        }
    }
    w
}

/// Full complex kernel sum; the imaginary part vanishes for Hermitian `rho`.
pub fn wigner_value_complex(rho: &DensityMatrix, q: f64, p: f64) -> Result<C64> {
    let d = check_single_mode(rho)?;
    Ok(kernel_sum(rho, d, q, p))
}

pub fn wigner_value(rho: &DensityMatrix, q: f64, p: f64) -> Result<f64> {
    Ok(wigner_value_complex(rho, q, p)?.re)
}

/// Phase-space grid specification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub q_range: (f64, f64),
    pub p_range: (f64, f64),
    /// Points per axis, end points included.
    pub points: usize,
    /// Largest accepted `|∫∫ W - 1|`.
    pub norm_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::square(5.0, 201)
    }
}

impl GridSpec {
    pub const DEFAULT_NORM_TOL: f64 = 1e-3;

    /// `[-half_width, half_width]^2` with `points` per axis.
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            q_range: (-half_width, half_width),
            p_range: (-half_width, half_width),
            points,
            norm_tol: Self::DEFAULT_NORM_TOL,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if !ok(self.q_range) || !ok(self.p_range) || self.points < 2 {
            return Err(Error::Grid(format!("invalid grid {self:?}")));
        }
        Ok(())
    }
}

fn axis((a, b): (f64, f64), points: usize) -> Vec<f64> {
    let h = (b - a) / (points - 1) as f64;
    (0..points).map(|i| a + h * i as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub q_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// `values[iq * p_axis.len() + ip]`
    pub values: Vec<f64>,
    pub cell_area: f64,
}

impl WignerGrid {
    pub fn get(&self, iq: usize, ip: usize) -> f64 {
        self.values[iq * self.p_axis.len() + ip]
    }

    /// `sum W * cell_area`
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area
    }

    pub fn normalization_error(&self) -> f64 {
        (self.integral() - 1.0).abs()
    }

    /// Value at the grid point nearest to `(q, p)`.
    pub fn nearest(&self, q: f64, p: f64) -> f64 {
        let idx = |ax: &[f64], v: f64| {
            let h = ax[1] - ax[0];
            (((v - ax[0]) / h).round().max(0.0) as usize).min(ax.len() - 1)
        };
        self.get(idx(&self.q_axis, q), idx(&self.p_axis, p))
    }

    fn spacing(&self) -> (f64, f64) {
        (
            self.q_axis[1] - self.q_axis[0],
            self.p_axis[1] - self.p_axis[0],
        )
    }
}

/// Wigner function of a single-mode state on a uniform grid.
///
/// Fails with [`Error::Grid`] when the grid integral deviates from one by more
/// than `spec.norm_tol`.
pub fn wigner_grid(rho: &DensityMatrix, spec: &GridSpec) -> Result<WignerGrid> {
    let d = check_single_mode(rho)?;
    spec.validate()?;
    let q_axis = axis(spec.q_range, spec.points);
    let p_axis = axis(spec.p_range, spec.points);
    let mut values = Vec::with_capacity(q_axis.len() * p_axis.len());
    for &q in &q_axis {
        for &p in &p_axis {
            let k = kernels(d, q, p);
            let mut w = 0.0;
            for (diff, row) in k.iter().enumerate() {
                for (n, kmn) in row.iter().enumerate() {
                    let term = rho.element(n + diff, n) * kmn;
                    w += if diff == 0 { term.re } else { 2.0 * term.re };
                }
            }
            values.push(w);
        }
    }
    let cell_area = (q_axis[1] - q_axis[0]) * (p_axis[1] - p_axis[0]);
    let grid = WignerGrid {
        q_axis,
        p_axis,
        values,
        cell_area,
    };
    let err = grid.normalization_error();
    if !(err <= spec.norm_tol) {
        return Err(Error::Grid(format!(
            "grid integral deviates from one by {err:.3e} (tolerance {:.1e}); widen or refine the grid",
            spec.norm_tol
        )));
    }
    Ok(grid)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativityMetrics {
    pub min_value: f64,
    pub min_location: (f64, f64),
    /// `∫∫ max(-W, 0) dq dp` by the grid quadrature.
    pub negative_volume: f64,
}

pub fn negativity_metrics(w: &WignerGrid) -> NegativityMetrics {
    let np = w.p_axis.len();
    let (imin, &min_value) = w
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid has at least four points");
    let negative_volume = w.values.iter().map(|v| (-v).max(0.0)).sum::<f64>() * w.cell_area;
    NegativityMetrics {
        min_value,
        min_location: (w.q_axis[imin / np], w.p_axis[imin % np]),
        negative_volume,
    }
}

fn cubic_weights(t: f64) -> [f64; 4] {
    // Catmull-Rom
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

fn interpolate(w: &WignerGrid, q: f64, p: f64) -> f64 {
    let (hq, hp) = w.spacing();
    let fq = (q - w.q_axis[0]) / hq;
    let fp = (p - w.p_axis[0]) / hp;
    let (iq, ip) = (fq.floor() as isize, fp.floor() as isize);
    let (wq, wp) = (cubic_weights(fq - iq as f64), cubic_weights(fp - ip as f64));
    let (nq, np) = (w.q_axis.len() as isize, w.p_axis.len() as isize);
    let mut acc = 0.0;
    for (a, wa) in wq.iter().enumerate() {
        let i = (iq + a as isize - 1).clamp(0, nq - 1) as usize;
        for (b, wb) in wp.iter().enumerate() {
            let j = (ip + b as isize - 1).clamp(0, np - 1) as usize;
            acc += wa * wb * w.get(i, j);
        }
    }
    acc
}

/// Largest spread of `W` over angle on circles about the origin.
///
/// Circles are sampled every grid spacing out to 80% of the half-width, each
/// with 72 angles, using bicubic interpolation.
pub fn symmetry_residual(w: &WignerGrid) -> Result<f64> {
    let (q0, q1) = (w.q_axis[0], *w.q_axis.last().expect("non-empty axis"));
    let (p0, p1) = (w.p_axis[0], *w.p_axis.last().expect("non-empty axis"));
    let (hq, hp) = w.spacing();
    let tol = 1e-9 * (q1 - q0);
    if (q0 + q1).abs() > tol || (p0 + p1).abs() > tol {
        return Err(Error::Grid(
            "symmetry residual needs a grid centred at the origin".into(),
        ));
    }
    let half = q1.min(p1);
    let h = hq.max(hp);
    let n_radii = (0.8 * half / h).floor() as usize;
    let angles = 72;
    let mut worst = 0.0f64;
    for k in 1..=n_radii {
        let r = k as f64 * h;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for a in 0..angles {
            let th = 2.0 * PI * a as f64 / angles as f64;
            let v = interpolate(w, r * th.cos(), r * th.sin());
            lo = lo.min(v);
            hi = hi.max(v);
        }
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::HilbertSpace;
    use approx::assert_abs_diff_eq;

    fn fock(d: usize, n: usize) -> DensityMatrix {
        DensityMatrix::fock(&HilbertSpace::single("c", d).unwrap(), &[n]).unwrap()
    }

    #[test]
    fn laguerre_closed_forms() {
        for x in [0.0, 0.3, 1.7, 5.0] {
            assert_abs_diff_eq!(laguerre(1, 0.0, x), 1.0 - x, epsilon = 1e-14);
            assert_abs_diff_eq!(
                laguerre(2, 0.0, x),
                0.5 * (x * x - 4.0 * x + 2.0),
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(
                laguerre(2, 1.0, x),
                0.5 * (x * x - 6.0 * x + 6.0),
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(laguerre(1, 3.0, x), 4.0 - x, epsilon = 1e-14);
        }
        // L_n(0) = 1 for every n
        assert_abs_diff_eq!(laguerre(30, 0.0, 0.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fock_values() {
        assert_abs_diff_eq!(wigner_fock(0, 0.0, 0.0).unwrap(), 1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(
            wigner_fock(1, 0.0, 0.0).unwrap(),
            -1.0 / PI,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(wigner_fock(2, 0.0, 0.0).unwrap(), 1.0 / PI, epsilon = 1e-15);
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(wigner_fock(1, s, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(wigner_fock(31, 0.0, 0.0).is_err());
    }

    #[test]
    fn kernel_sum_reduces_to_fock() {
        for n in 0..5 {
            let rho = fock(6, n);
            for (q, p) in [(0.0, 0.0), (0.4, -1.1), (2.0, 0.5)] {
                assert_abs_diff_eq!(
                    wigner_value(&rho, q, p).unwrap(),
                    wigner_fock(n, q, p).unwrap(),
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn multimode_rejected() {
        let s = HilbertSpace::new([("a", 2), ("c", 3)]).unwrap();
        let rho = DensityMatrix::fock(&s, &[0, 0]).unwrap();
        assert!(wigner_value(&rho, 0.0, 0.0).is_err());
        assert!(wigner_grid(&rho, &GridSpec::default()).is_err());
    }

    #[test]
    fn coarse_grid_reported() {
        let spec = GridSpec::square(1.0, 11);
        assert!(matches!(
            wigner_grid(&fock(3, 0), &spec),
            Err(Error::Grid(_))
        ));
    }

    #[test]
    fn off_centre_grid_rejected() {
        let spec = GridSpec {
            q_range: (-4.0, 6.0),
            p_range: (-5.0, 5.0),
            points: 51,
            norm_tol: 1e-3,
        };
        let g = wigner_grid(&fock(2, 0), &spec).unwrap();
        assert!(symmetry_residual(&g).is_err());
    }
}
