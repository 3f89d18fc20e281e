use faer::Mat;

use super::optomech::EffectiveParams;
use crate::fock::{DensityMatrix, HilbertSpace, OperatorMatrix};
use crate::{Error, Result, C64};

/// Spectral-norm estimate of the generator above which the second-order
/// expansion is flagged.
pub const GENERATOR_NORM_WARN: f64 = 0.3;

/// The four coefficients of the photon-phonon normal-mode generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorCoefficients {
    /// `a^dagger c - c^dagger a`
    pub beam_splitter: f64,
    /// `a^dagger c^dagger - c a`
    pub two_mode: f64,
    /// `a^dagger^2 - a^2`
    pub photon_squeeze: f64,
    /// `c^dagger^2 - c^2`
    pub phonon_squeeze: f64,
}

impl GeneratorCoefficients {
    pub fn new(eff: &EffectiveParams) -> Result<Self> {
        let g = eff.coupling_down;
        let dp = eff.delta_plus;
        let wm = eff.derived().omega_m_bar;
        let den = dp * dp - wm * wm;
        let scale = dp.abs().max(wm.abs()).max(f64::MIN_POSITIVE);
        if den.abs() <= 1e-12 * scale * scale
            || dp.abs() <= 1e-12 * scale
            || wm.abs() <= 1e-12 * scale
        {
            return Err(Error::InvalidParameter(format!(
                "resonant denominator in the normal-mode generator (delta_plus = {dp}, omega_m_bar = {wm})"
            )));
        }
        Ok(Self {
            beam_splitter: g / (dp + wm),
            two_mode: g / (dp - wm),
            photon_squeeze: g * g * wm / (2.0 * dp * den),
            phonon_squeeze: -g * g * dp / (2.0 * wm * den),
        })
    }
}

/// Anti-Hermitian generator `eta` of the transformation to weakly mixed
/// photon-phonon normal modes, expanded to second order in `G_down / omega_m`.
pub fn normal_mode_generator(
    eff: &EffectiveParams,
    space: &HilbertSpace,
    photon: &str,
    phonon: &str,
) -> Result<OperatorMatrix> {
    let k = GeneratorCoefficients::new(eff)?;
    let a = OperatorMatrix::annihilation(space, photon)?;
    let c = OperatorMatrix::annihilation(space, phonon)?;
    let (ad, cd) = (a.dagger(), c.dagger());
    let eta = (&ad * &c - &cd * &a).scale(k.beam_splitter)
        + (&ad * &cd - &c * &a).scale(k.two_mode)
        + (&ad * &ad - &a * &a).scale(k.photon_squeeze)
        + (&cd * &cd - &c * &c).scale(k.phonon_squeeze);
    Ok(eta)
}

/// `chi = rho - [eta, rho] + 1/2 [eta, [eta, rho]]`.
///
/// The result is not projected onto the physical cone; its trace equals that
/// of `rho` up to round-off.
pub fn back_transform(rho: &DensityMatrix, eta: &OperatorMatrix) -> Result<DensityMatrix> {
    if rho.space() != eta.space() {
        return Err(Error::SpaceMismatch {
            left: rho.space().to_string(),
            right: eta.space().to_string(),
        });
    }
    let norm = eta.norm_estimate(50);
    if norm > GENERATOR_NORM_WARN {
        log::warn!("generator norm {norm:.3} exceeds {GENERATOR_NORM_WARN}; second-order back-transform is inaccurate");
    }
    // eta is anti-Hermitian, so X eta = -(X eta^dagger).
    let comm = |x: &Mat<C64>| -> Mat<C64> { eta.left_mul(x) + eta.right_mul_adjoint(x) };
    let first = comm(rho.matrix());
    let second = comm(&first);
    let chi = rho.matrix() - &first + second * faer::Scale(C64::new(0.5, 0.0));
    DensityMatrix::new_unchecked(rho.space(), chi)
}

/// Phonon occupation probabilities: the diagonal of the reduced state of `phonon`.
pub fn phonon_populations(chi: &DensityMatrix, phonon: &str) -> Result<Vec<f64>> {
    chi.populations(phonon)
}

/// Diagonal elements of the back-transformed state that pick up corrections
/// proportional to `rho_00,1`.
///
/// `chi_kk,nn` with `k` photons and `n` phonons. The two-mode-squeezing term
/// carries the matrix element `<1,2| a^dagger c^dagger |0,1> = sqrt 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalCorrections {
    pub chi_00_11: f64,
    pub chi_11_00: f64,
    pub chi_11_22: f64,
}

pub fn diagonal_corrections(
    eff: &EffectiveParams,
    rho_00_1: f64,
    rho_11_0: f64,
) -> Result<DiagonalCorrections> {
    let k = GeneratorCoefficients::new(eff)?;
    let b2 = k.beam_splitter * k.beam_splitter;
    let t2 = 2.0 * k.two_mode * k.two_mode;
    Ok(DiagonalCorrections {
        chi_00_11: rho_00_1 * (1.0 - b2 - t2),
        chi_11_00: rho_11_0 + rho_00_1 * b2,
        chi_11_22: rho_00_1 * t2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::optomech::ideal_detuning;
    use approx::assert_abs_diff_eq;

    fn eff(ratio: f64) -> EffectiveParams {
        let om = 200.0;
        EffectiveParams {
            g_pp: 10.0,
            g_mm: 0.0,
            g_pm: 10.0,
            g3: 0.0,
            kappa_plus: 1.0,
            kappa_minus: 50.0,
            kappa_pm: 0.0,
            kappa3: 50.0,
            omega_m: om,
            gamma: 0.0,
            n_th: 0.0,
            coupling_down: ratio * om,
            coupling_up: 0.0,
            delta_plus: -2.0 * om,
            modes: None,
            drive: None,
        }
    }

    #[test]
    fn coefficients_at_twice_omega() {
        let k = GeneratorCoefficients::new(&eff(0.1)).unwrap();
        assert_abs_diff_eq!(k.beam_splitter, -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(k.two_mode, -0.1 / 3.0, epsilon = 1e-15);
        let mut e = eff(0.1);
        e.delta_plus = -e.omega_m;
        assert!(GeneratorCoefficients::new(&e).is_err());
        e.delta_plus = ideal_detuning(e.omega_m, e.coupling_down, 0.0).unwrap();
        assert!(GeneratorCoefficients::new(&e).is_ok());
    }

    #[test]
    fn generator_is_anti_hermitian() {
        let s = HilbertSpace::new([("a+", 3), ("c", 6)]).unwrap();
        let eta = normal_mode_generator(&eff(0.1), &s, "a+", "c").unwrap();
        let sum = &eta + &eta.dagger();
        assert_eq!(
            sum.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max),
            0.0
        );
        let zero = normal_mode_generator(&eff(0.0), &s, "a+", "c").unwrap();
        assert_eq!(zero.nnz(), 0);
    }

    #[test]
    fn zero_generator_is_identity() {
        let s = HilbertSpace::new([("a+", 2), ("c", 5)]).unwrap();
        let rho = DensityMatrix::fock(&s, &[0, 1]).unwrap();
        let chi = back_transform(&rho, &OperatorMatrix::zeros(&s)).unwrap();
        assert_eq!(chi.trace_distance(&rho).unwrap(), 0.0);
    }

    #[test]
    fn literal_leading_correction() {
        let d = diagonal_corrections(&eff(0.1), 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(d.chi_11_00, 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(d.chi_11_22, 2.0 * 0.01 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            d.chi_00_11 + d.chi_11_00 + d.chi_11_22,
            1.0,
            epsilon = 1e-15
        );
    }
}
