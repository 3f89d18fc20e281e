use super::Superoperator;
use crate::fock::DensityMatrix;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from `||L||` when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            initial_step: None,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn symmetrize_vec(x: &mut [C64], n: usize) {
    for j in 0..n {
        for i in 0..=j {
            let v = 0.5 * (x[i + j * n] + x[j + i * n].conj());
            x[i + j * n] = v;
            x[j + i * n] = v.conj();
        }
    }
}

/// Integrates `d rho/dt = L rho` from `rho0` over `[0, t_final]` with an
/// adaptive Dormand-Prince scheme, symmetrizing after every accepted step.
pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_final: f64,
    opts: &EvolveOptions,
) -> Result<DensityMatrix> {
    if rho0.space() != l.space() {
        return Err(Error::SpaceMismatch {
            left: l.space().to_string(),
            right: rho0.space().to_string(),
        });
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "invalid final time {t_final}"
        )));
    }
    let n = l.space().total_dim();
    let size = l.size();
    let mut x = rho0.to_vec();
    if t_final == 0.0 {
        return DensityMatrix::from_vec(l.space(), &x);
    }
    let lnorm = l.norm_inf().max(1e-300);
    let mut h = opts.initial_step.unwrap_or(0.01 / lnorm).min(t_final);
    let h_min = 1e-14 * t_final.max(1.0 / lnorm);
    let mut t = 0.0;
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); size]; 7];
    k[0] = l.apply_vec(&x);
    let mut stage = vec![C64::new(0.0, 0.0); size];
    let mut steps = 0;
    while t < t_final {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps { steps, t });
        }
        steps += 1;
        let last = t + h >= t_final;
        if last {
            h = t_final - t;
        }
        for s in 1..7 {
            for (idx, out) in stage.iter_mut().enumerate() {
                let mut acc = x[idx];
                for (m, km) in k.iter().enumerate().take(s) {
                    if A[s][m] != 0.0 {
                        acc += km[idx] * (h * A[s][m]);
                    }
                }
                *out = acc;
            }
            k[s] = l.apply_vec(&stage);
        }
        // stage now holds the 5th-order solution (FSAL row equals B5).
        let mut err = 0.0f64;
        for idx in 0..size {
            let mut e = C64::new(0.0, 0.0);
            for m in 0..7 {
                e += k[m][idx] * (h * (B5[m] - B4[m]));
            }
            let sc = opts.atol + opts.rtol * x[idx].norm().max(stage[idx].norm());
            err = err.max(e.norm() / sc);
        }
        if err <= 1.0 {
            t = if last { t_final } else { t + h };
            x.copy_from_slice(&stage);
            symmetrize_vec(&mut x, n);
            k[0] = l.apply_vec(&x);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < h_min && t < t_final {
            return Err(Error::StepSizeUnderflow { t, h });
        }
    }
    DensityMatrix::from_vec(l.space(), &x)
}
