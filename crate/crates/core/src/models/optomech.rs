use super::generic::GenericParams;
use super::hybrid::{
    derive_drive_params, derive_effective_modes, DriveParams, HybridModes, RawOptomechParams,
};
use crate::fock::{HilbertSpace, OperatorMatrix};
use crate::liouville::{
    cross_dissipator_superop, dissipator_superop, hamiltonian_superop, Superoperator,
};
use crate::{Error, Result};

/// Mode labels of the four-mode model, in tensor order.
pub const FULL_MODES: [&str; 4] = ["a+", "a-", "a3", "c"];
/// Mode labels of the reduced two-mode model.
pub const REDUCED_MODES: [&str; 2] = ["a+", "c"];
/// Default truncations for [`FULL_MODES`].
pub const DEFAULT_FULL_DIMS: [usize; 4] = [3, 3, 2, 7];

/// Optomechanical model parameters in the hybridized, displaced frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveParams {
    pub g_pp: f64,
    /// Coupling inside the `a-` mode; zero for the intended design.
    pub g_mm: f64,
    pub g_pm: f64,
    pub g3: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub kappa_pm: f64,
    pub kappa3: f64,
    pub omega_m: f64,
    pub gamma: f64,
    pub n_th: f64,
    /// Enhanced coupling `G_down` of `a+` to the mechanics.
    pub coupling_down: f64,
    /// Enhanced coupling `G_up` of the auxiliary mode to the mechanics.
    pub coupling_up: f64,
    /// Detuning `Delta_+` of the `a+` mode in the rotating frame.
    pub delta_plus: f64,
    /// Hybridization data when derived from physical cavities.
    pub modes: Option<HybridModes>,
    /// Drive data when derived from drive amplitudes.
    pub drive: Option<DriveParams>,
}

/// Rates and frequencies derived from [`EffectiveParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedRates {
    pub gamma_down_th: f64,
    pub gamma_up_th: f64,
    pub omega_m_bar: f64,
    pub gamma_down_bar: f64,
    pub gamma_up_bar: f64,
    /// `Gamma = 4 g+-^2 / kappa-`
    pub conversion_rate: f64,
    /// `Gamma_down = (g+- / 2 omega_m)^2 kappa-`
    pub pair_loss_rate: f64,
    /// `Lambda = g+-^2 / (2 omega_m)`
    pub cross_kerr: f64,
    pub omega_m_tilde: f64,
    pub delta_plus_tilde: f64,
    /// `g++ G_down / (Delta_+ + omega_m_bar)`, the unapproximated two-phonon coupling.
    pub g_tilde_exact: f64,
}

/// Detuning that makes the dressed `a+` resonance sit at twice the dressed
/// mechanical frequency.
pub fn ideal_detuning(omega_m: f64, coupling_down: f64, coupling_up: f64) -> Result<f64> {
    if !(omega_m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega_m must be positive, got {omega_m}"
        )));
    }
    let d = coupling_down / omega_m;
    let u = coupling_up / omega_m;
    Ok(-2.0 * omega_m * (1.0 - 5.0 / 3.0 * d * d + 0.5 * u * u))
}

impl EffectiveParams {
    /// Derives everything from the physical parameters; `Delta_+` is the ideal detuning.
    pub fn from_raw(p: &RawOptomechParams) -> Result<Self> {
        let modes = derive_effective_modes(p)?;
        let drive = derive_drive_params(p, &modes)?;
        let eff = Self {
            g_pp: modes.g_pp,
            g_mm: modes.g_mm,
            g_pm: modes.g_pm,
            g3: p.g3,
            kappa_plus: modes.kappa_plus,
            kappa_minus: modes.kappa_minus,
            kappa_pm: modes.kappa_pm,
            kappa3: p.kappa3,
            omega_m: p.omega_m,
            gamma: p.gamma,
            n_th: p.n_th,
            coupling_down: drive.coupling_down,
            coupling_up: drive.coupling_up,
            delta_plus: ideal_detuning(p.omega_m, drive.coupling_down, drive.coupling_up)?,
            modes: Some(modes),
            drive: Some(drive),
        };
        eff.validate()?;
        Ok(eff)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("g_pp", self.g_pp),
            ("g_mm", self.g_mm),
            ("g_pm", self.g_pm),
            ("g3", self.g3),
            ("kappa_pm", self.kappa_pm),
            ("delta_plus", self.delta_plus),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        let nonneg = [
            ("kappa_plus", self.kappa_plus),
            ("gamma", self.gamma),
            ("n_th", self.n_th),
            ("coupling_down", self.coupling_down),
            ("coupling_up", self.coupling_up),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        let positive = [
            ("omega_m", self.omega_m),
            ("kappa_minus", self.kappa_minus),
            ("kappa3", self.kappa3),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedRates {
        let (om, gd, gu) = (self.omega_m, self.coupling_down, self.coupling_up);
        let gamma_down_th = self.gamma * (self.n_th + 1.0);
        let gamma_up_th = self.gamma * self.n_th;
        let omega_m_bar = om + gu * gu / (2.0 * om);
        let dp = self.delta_plus;
        let den = dp * dp - omega_m_bar * omega_m_bar;
        DerivedRates {
            gamma_down_th,
            gamma_up_th,
            omega_m_bar,
            gamma_down_bar: gamma_down_th + (gu / (2.0 * om)).powi(2) * self.kappa3,
            gamma_up_bar: gamma_up_th + 4.0 * gu * gu / self.kappa3,
            conversion_rate: 4.0 * self.g_pm * self.g_pm / self.kappa_minus,
            pair_loss_rate: (self.g_pm / (2.0 * om)).powi(2) * self.kappa_minus,
            cross_kerr: self.g_pm * self.g_pm / (2.0 * om),
            omega_m_tilde: omega_m_bar + 2.0 * gd * gd * dp / den,
            delta_plus_tilde: dp - 2.0 * gd * gd * omega_m_bar / den,
            g_tilde_exact: self.g_pp * gd / (dp + omega_m_bar),
        }
    }
}

/// Generic-model rates implied by the optomechanical parameters.
pub fn map_to_generic(eff: &EffectiveParams, dims: [usize; 2]) -> Result<GenericParams> {
    eff.validate()?;
    let (om, gd, gu) = (eff.omega_m, eff.coupling_down, eff.coupling_up);
    Ok(GenericParams {
        g_tilde: -eff.g_pp * gd / om,
        conversion_rate: 4.0 * eff.g_pm * eff.g_pm / eff.kappa_minus,
        kappa: eff.kappa_plus,
        gamma_down: eff.gamma * (eff.n_th + 1.0)
            + gu * gu * eff.kappa3 / (2.0 * om).powi(2)
            + gd * gd * eff.kappa_plus / (om * om),
        gamma_up: eff.gamma * eff.n_th
            + 4.0 * gu * gu / eff.kappa3
            + gd * gd * eff.kappa_plus / (3.0 * om).powi(2),
        dims,
    })
}

fn x_quadrature(c: &OperatorMatrix) -> OperatorMatrix {
    c + &c.dagger()
}

/// Four-mode Liouvillian on `[a+, a-, a3, c]`.
///
/// The `g--` term is included whenever it is non-zero; the cross-decay terms
/// `kappa+-` only when `include_cross_kappa` is set.
pub fn build_full(
    eff: &EffectiveParams,
    dims: [usize; 4],
    include_cross_kappa: bool,
) -> Result<Superoperator> {
    eff.validate()?;
    if dims[0] < 2 || dims[1] < 2 || dims[2] < 2 || dims[3] < 5 {
        return Err(Error::InvalidParameter(format!(
            "full model needs optical dims >= 2 and mechanical dim >= 5, got {dims:?}"
        )));
    }
    let s = HilbertSpace::new(FULL_MODES.into_iter().zip(dims))?;
    let ap = OperatorMatrix::annihilation(&s, "a+")?;
    let am = OperatorMatrix::annihilation(&s, "a-")?;
    let a3 = OperatorMatrix::annihilation(&s, "a3")?;
    let c = OperatorMatrix::annihilation(&s, "c")?;
    let n = |o: &OperatorMatrix| o.dagger() * o;
    let coupling = x_quadrature(&ap).scale(eff.coupling_down)
        + x_quadrature(&a3).scale(eff.coupling_up)
        + n(&ap).scale(eff.g_pp)
        + n(&am).scale(eff.g_mm)
        + (&ap.dagger() * &am + &am.dagger() * &ap).scale(eff.g_pm)
        + n(&a3).scale(eff.g3);
    let h = n(&ap).scale(-eff.delta_plus)
        + (n(&c) + n(&am) - n(&a3)).scale(eff.omega_m)
        + &x_quadrature(&c) * &coupling;
    let mut l = hamiltonian_superop(&h)?
        + dissipator_superop(&ap, eff.kappa_plus)?
        + dissipator_superop(&am, eff.kappa_minus)?
        + dissipator_superop(&a3, eff.kappa3)?
        + dissipator_superop(&c, eff.gamma * (eff.n_th + 1.0))?
        + dissipator_superop(&c.dagger(), eff.gamma * eff.n_th)?;
    if include_cross_kappa && eff.kappa_pm != 0.0 {
        l = l + cross_dissipator_superop(&am, &ap, eff.kappa_pm)?;
    }
    Ok(l)
}

/// Optional terms of the reduced model that are normally dropped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReducedOptions {
    /// Adds `Gamma_down D[c a+]`.
    pub include_pair_loss: bool,
    /// Adds the cross-Kerr term `Lambda c^dagger c a+^dagger a+`.
    pub include_cross_kerr: bool,
}

/// Two-mode Liouvillian on `[a+, c]` with the `a-` and `a3` modes eliminated.
pub fn build_reduced(
    eff: &EffectiveParams,
    dims: [usize; 2],
    opts: ReducedOptions,
) -> Result<Superoperator> {
    eff.validate()?;
    if dims[0] < 2 || dims[1] < 5 {
        return Err(Error::InvalidParameter(format!(
            "reduced model needs dims of at least [2, 5], got {dims:?}"
        )));
    }
    let d = eff.derived();
    let s = HilbertSpace::new(REDUCED_MODES.into_iter().zip(dims))?;
    let ap = OperatorMatrix::annihilation(&s, "a+")?;
    let c = OperatorMatrix::annihilation(&s, "c")?;
    let np = ap.dagger() * &ap;
    let nc = c.dagger() * &c;
    let xc = x_quadrature(&c);
    let mut h = np.scale(-eff.delta_plus)
        + nc.scale(d.omega_m_bar)
        + (&xc * &x_quadrature(&ap)).scale(eff.coupling_down)
        + (&xc * &np).scale(eff.g_pp);
    if opts.include_cross_kerr {
        h = h + (&nc * &np).scale(d.cross_kerr);
    }
    let mut l = hamiltonian_superop(&h)?
        + dissipator_superop(&ap, eff.kappa_plus)?
        + dissipator_superop(&c, d.gamma_down_bar)?
        + dissipator_superop(&c.dagger(), d.gamma_up_bar)?
        + dissipator_superop(&(&c.dagger() * &ap), d.conversion_rate)?;
    if opts.include_pair_loss {
        l = l + dissipator_superop(&(&c * &ap), d.pair_loss_rate)?;
    }
    Ok(l)
}
