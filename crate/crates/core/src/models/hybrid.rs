//! Hybridization of two tunnel-coupled cavities and the drive amplitudes.

use crate::{Error, Result, C64};

/// Parameters of the two physical cavities, the auxiliary cavity and the
/// mechanical oscillator, all in one rate unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawOptomechParams {
    pub omega1: f64,
    pub omega2: f64,
    /// Tunneling rate `J` between the physical cavities.
    pub tunneling: f64,
    pub g1: f64,
    pub g2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Extra decay that couples to the `a-` mode only.
    pub kappa_minus_ext: f64,
    pub g3: f64,
    pub kappa3: f64,
    pub omega_m: f64,
    pub gamma: f64,
    pub n_th: f64,
    /// Drive amplitude of the `a-` mode.
    pub drive_down: f64,
    /// Drive amplitude of the auxiliary mode.
    pub drive_up: f64,
}

/// Hybridized optical modes `a+`, `a-` and their couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridModes {
    pub r: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub g_pp: f64,
    pub g_mm: f64,
    pub g_pm: f64,
    pub kappa_plus: f64,
    /// Includes the extrinsic part.
    pub kappa_minus: f64,
    pub kappa_pm: f64,
}

/// Mean cavity amplitudes and the resulting enhanced couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveParams {
    pub abar_minus: C64,
    pub abar_3: C64,
    /// `|g+- abar_minus|`
    pub coupling_down: f64,
    /// `|g3 abar_3|`
    pub coupling_up: f64,
    /// Phase of `g+- abar_minus`, dropped when the coupling is made real.
    pub phase_down: f64,
    /// Phase of `g3 abar_3`, dropped likewise.
    pub phase_up: f64,
}

pub fn derive_effective_modes(p: &RawOptomechParams) -> Result<HybridModes> {
    let delta = p.omega2 - p.omega1;
    if delta == 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate cavities (omega1 == omega2) leave the mixing ratio undefined".into(),
        ));
    }
    if !delta.is_finite() || !p.tunneling.is_finite() {
        return Err(Error::InvalidParameter(
            "cavity frequencies and tunneling must be finite".into(),
        ));
    }
    let x = 2.0 * p.tunneling / delta;
    let r = x / (1.0 + delta.signum() * (1.0 + x * x).sqrt());
    let split = (delta * delta + 4.0 * p.tunneling * p.tunneling).sqrt();
    let norm = 1.0 + r * r;
    Ok(HybridModes {
        r,
        omega_plus: 0.5 * (p.omega1 + p.omega2 + split),
        omega_minus: 0.5 * (p.omega1 + p.omega2 - split),
        g_pp: (r * r * p.g1 + p.g2) / norm,
        g_mm: (p.g1 + r * r * p.g2) / norm,
        g_pm: r * (p.g1 - p.g2) / norm,
        kappa_plus: (r * r * p.kappa1 + p.kappa2) / norm,
        kappa_minus: (p.kappa1 + r * r * p.kappa2) / norm + p.kappa_minus_ext,
        kappa_pm: r * (p.kappa1 - p.kappa2) / norm,
    })
}

/// `|r|` that cancels `g--`, i.e. `sqrt(|g1 / g2|)`.
pub fn choose_r_for_zero_gmm(g1: f64, g2: f64) -> Result<f64> {
    if !(g1 * g2 < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "g1 and g2 must have opposite signs, got {g1} and {g2}"
        )));
    }
    if g1.abs() == g2.abs() {
        return Err(Error::InvalidParameter(
            "|g1| == |g2| forces |r| = 1 and g++ = 0".into(),
        ));
    }
    Ok((g1 / g2).abs().sqrt())
}

/// Tunneling rate that realizes mixing ratio `r` at detuning `delta = omega2 - omega1`.
///
/// Inverts the mixing-ratio definition: `J / delta = r / (1 - r^2)`; the sign of
/// `delta` selects `|r| < 1` (positive) or `|r| > 1` (negative).
pub fn tunneling_for_ratio(r: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 || r.abs() == 1.0 {
        return Err(Error::InvalidParameter(
            "need delta != 0 and |r| != 1".into(),
        ));
    }
    if (r.abs() < 1.0) != (delta > 0.0) && r != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "|r| = {} is not reachable with delta = {delta}",
            r.abs()
        )));
    }
    Ok(delta * r / (1.0 - r * r))
}

/// Physical-cavity frequencies and tunneling recovered from the hybrid modes,
/// `(omega1, omega2, J)`.
pub fn reverse_transform(r: f64, omega_plus: f64, omega_minus: f64) -> (f64, f64, f64) {
    let norm = 1.0 + r * r;
    (
        (omega_plus * r * r + omega_minus) / norm,
        (omega_plus + omega_minus * r * r) / norm,
        r * (omega_plus - omega_minus) / norm,
    )
}

pub fn derive_drive_params(p: &RawOptomechParams, modes: &HybridModes) -> Result<DriveParams> {
    if !(modes.kappa_minus > 0.0) || !(p.kappa3 > 0.0) {
        return Err(Error::InvalidParameter(
            "drive amplitudes need kappa_minus > 0 and kappa3 > 0".into(),
        ));
    }
    let abar_minus = C64::new(p.drive_down, 0.0) / C64::new(modes.kappa_minus / 2.0, p.omega_m);
    let abar_3 = C64::new(p.drive_up, 0.0) / C64::new(p.kappa3 / 2.0, -p.omega_m);
    let down = abar_minus * modes.g_pm;
    let up = abar_3 * p.g3;
    Ok(DriveParams {
        abar_minus,
        abar_3,
        coupling_down: down.norm(),
        coupling_up: up.norm(),
        phase_down: down.arg(),
        phase_up: up.arg(),
    })
}
