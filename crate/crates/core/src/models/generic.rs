use faer::Mat;

use crate::fock::{DensityMatrix, HilbertSpace, OperatorMatrix};
use crate::liouville::{dissipator_superop, hamiltonian_superop, Superoperator};
use crate::{Error, Result, C64};

/// Mode labels of the generic model.
pub const GENERIC_MODES: [&str; 2] = ["a", "c"];

/// Parameters of the generic two-mode model
/// `H = g (a^dagger c^2 + c^dagger^2 a)` with dissipators
/// `Gamma D[c^dagger a] + kappa D[a] + gamma_down D[c] + gamma_up D[c^dagger]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenericParams {
    /// Two-phonon coupling `g~`.
    pub g_tilde: f64,
    /// `Gamma`, rate of the correlated photon-to-phonon process `c^dagger a`.
    pub conversion_rate: f64,
    /// Decay rate of mode `a`.
    pub kappa: f64,
    pub gamma_down: f64,
    pub gamma_up: f64,
    /// Truncations `[dim_a, dim_c]`.
    pub dims: [usize; 2],
}

/// The three small ratios that define the stabilization regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeRatios {
    /// `kappa / Gamma`
    pub kappa_over_conversion: f64,
    /// `gamma_down / gamma_up`
    pub down_over_up: f64,
    /// `gamma_up / min(4 g~^2 / Gamma, Gamma)`
    pub up_over_bound: f64,
}

impl RegimeRatios {
    pub const DEFAULT_THRESHOLD: f64 = 0.2;

    pub fn named(&self) -> [(&'static str, f64); 3] {
        [
            ("kappa/Gamma", self.kappa_over_conversion),
            ("gamma_down/gamma_up", self.down_over_up),
            ("gamma_up/min(4 g_tilde^2/Gamma, Gamma)", self.up_over_bound),
        ]
    }

    /// Names of the ratios at or above `threshold`.
    pub fn violations(&self, threshold: f64) -> Vec<&'static str> {
        self.named()
            .into_iter()
            .filter(|(_, v)| !(*v < threshold))
            .map(|(n, _)| n)
            .collect()
    }

    pub fn max(&self) -> f64 {
        self.kappa_over_conversion
            .max(self.down_over_up)
            .max(self.up_over_bound)
    }
}

impl GenericParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("g_tilde", self.g_tilde),
            ("conversion_rate", self.conversion_rate),
            ("kappa", self.kappa),
            ("gamma_down", self.gamma_down),
            ("gamma_up", self.gamma_up),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
            if name != "g_tilde" && v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.dims[0] < 2 || self.dims[1] < 4 {
            return Err(Error::InvalidParameter(format!(
                "generic model needs dims of at least [2, 4], got {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    pub fn regime(&self) -> RegimeRatios {
        let bound =
            (4.0 * self.g_tilde * self.g_tilde / self.conversion_rate).min(self.conversion_rate);
        RegimeRatios {
            kappa_over_conversion: self.kappa / self.conversion_rate,
            down_over_up: self.gamma_down / self.gamma_up,
            up_over_bound: self.gamma_up / bound,
        }
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new([
            (GENERIC_MODES[0], self.dims[0]),
            (GENERIC_MODES[1], self.dims[1]),
        ])
    }
}

pub fn build_generic(p: &GenericParams) -> Result<Superoperator> {
    p.validate()?;
    let s = p.space()?;
    let a = OperatorMatrix::annihilation(&s, "a")?;
    let c = OperatorMatrix::annihilation(&s, "c")?;
    let ad = a.dagger();
    let cd = c.dagger();
    let h = (&ad * &c * &c + &cd * &cd * &a).scale(p.g_tilde);
    Ok(hamiltonian_superop(&h)?
        + dissipator_superop(&(&cd * &a), p.conversion_rate)?
        + dissipator_superop(&a, p.kappa)?
        + dissipator_superop(&c, p.gamma_down)?
        + dissipator_superop(&cd, p.gamma_up)?)
}

/// Lowest-order ratios of the perturbative steady state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticRatios {
    /// `rho_00,0 / rho_00,1`
    pub r000: f64,
    /// `rho_00,2 / rho_00,1`
    pub r002: f64,
    /// `rho_00,3 / rho_00,1`
    pub r003: f64,
    /// `rho_11,0 / rho_00,1`
    pub r110: f64,
    /// `rho_11,1 / rho_00,2`
    pub r111: f64,
    /// `rho_10,0 / rho_00,2`
    pub r100: C64,
    /// `rho_10,1 / rho_00,2`
    pub r101: C64,
}

/// Perturbative steady state of the generic model, truncated at three phonons.
///
/// Naming: `rho_kk',n` multiplies `|k><k'| ⊗ |n><n|` for `k = k'`; the two
/// coherences are `rho_10,0` on `|1><0| ⊗ |0><2|` and `rho_10,1` on
/// `|1><0| ⊗ |1><3|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticSolution {
    pub ratios: AnalyticRatios,
    pub rho_00_0: f64,
    pub rho_00_1: f64,
    pub rho_00_2: f64,
    pub rho_00_3: f64,
    pub rho_11_0: f64,
    pub rho_11_1: f64,
    pub rho_10_0: C64,
    pub rho_10_1: C64,
    /// Phonon populations `P_0..P_3`.
    pub populations: [f64; 4],
}

pub fn analytic_generic_steady(p: &GenericParams) -> Result<AnalyticSolution> {
    if !(p.conversion_rate > 0.0) {
        return Err(Error::InvalidParameter(
            "analytic solution needs Gamma > 0".into(),
        ));
    }
    if p.g_tilde == 0.0 || !p.g_tilde.is_finite() {
        return Err(Error::InvalidParameter(
            "analytic solution needs a finite non-zero g_tilde".into(),
        ));
    }
    if !(p.gamma_up > 0.0) {
        return Err(Error::InvalidParameter(
            "analytic solution needs gamma_up > 0".into(),
        ));
    }
    let gamma = p.conversion_rate;
    let up = p.gamma_up;
    let x = p.g_tilde / gamma;
    let x2 = x * x;
    let s = up * gamma / (4.0 * p.g_tilde * p.g_tilde);

    let r000 = p.gamma_down / up + 2.0 * p.kappa / gamma;
    let r002 = s + 2.0 * up / gamma;
    let r003 = s * s * (1.0 + 6.0 * x2 + 64.0 * x2 * x2);
    let r110 = 2.0 * up / gamma;
    let r111 = up / gamma * (1.5 + 4.0 * x2 / (1.0 + 8.0 * x2));
    let r100 = C64::new(0.0, -2.0 * 2f64.sqrt() * x / (1.0 + 8.0 * x2));
    let bracket = r003 / r002 + 2.0 * up * (1.0 - 2.0 * x2) / (gamma * (1.0 + 8.0 * x2));
    let r101 = C64::new(0.0, -6.0 * x / (1.0 + 6.0 * x2) * bracket);

    let rho_00_1 = 1.0 / (1.0 + r000 + r002 + r003 + r110 + r111 * r002);
    let rho_00_0 = r000 * rho_00_1;
    let rho_00_2 = r002 * rho_00_1;
    let rho_00_3 = r003 * rho_00_1;
    let rho_11_0 = r110 * rho_00_1;
    let rho_11_1 = r111 * rho_00_2;
    Ok(AnalyticSolution {
        ratios: AnalyticRatios {
            r000,
            r002,
            r003,
            r110,
            r111,
            r100,
            r101,
        },
        rho_00_0,
        rho_00_1,
        rho_00_2,
        rho_00_3,
        rho_11_0,
        rho_11_1,
        rho_10_0: r100 * rho_00_2,
        rho_10_1: r101 * rho_00_2,
        populations: [rho_00_0 + rho_11_0, rho_00_1 + rho_11_1, rho_00_2, rho_00_3],
    })
}

impl AnalyticSolution {
    /// Sum of the diagonal coefficients; one by construction.
    pub fn trace(&self) -> f64 {
        self.rho_00_0
            + self.rho_00_1
            + self.rho_00_2
            + self.rho_00_3
            + self.rho_11_0
            + self.rho_11_1
    }

    /// Embeds the ansatz in a two-mode space (photon mode first), without
    /// positivity checks.
    pub fn to_density(
        &self,
        space: &HilbertSpace,
        photon: &str,
        phonon: &str,
    ) -> Result<DensityMatrix> {
        let (dp, dc) = (space.dim_of(photon)?, space.dim_of(phonon)?);
        if space.num_modes() != 2 || dp < 2 || dc < 4 {
            return Err(Error::InvalidParameter(format!(
                "ansatz needs a two-mode space with dims of at least [2, 4], got {space}"
            )));
        }
        let idx = |k: usize, n: usize| -> Result<usize> {
            let mut occ = [0, 0];
            occ[space.mode_index(photon)?] = k;
            occ[space.mode_index(phonon)?] = n;
            space.index_of(&occ)
        };
        let dim = space.total_dim();
        let mut m = Mat::<C64>::zeros(dim, dim);
        let re = |v: f64| C64::new(v, 0.0);
        for (n, v) in [self.rho_00_0, self.rho_00_1, self.rho_00_2, self.rho_00_3]
            .into_iter()
            .enumerate()
        {
            m[(idx(0, n)?, idx(0, n)?)] = re(v);
        }
        m[(idx(1, 0)?, idx(1, 0)?)] = re(self.rho_11_0);
        m[(idx(1, 1)?, idx(1, 1)?)] = re(self.rho_11_1);
        for (v, n, n2) in [(self.rho_10_0, 0, 2), (self.rho_10_1, 1, 3)] {
            let (i, j) = (idx(1, n)?, idx(0, n2)?);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        DensityMatrix::new_unchecked(space, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn regime() -> GenericParams {
        GenericParams {
            g_tilde: 2.0,
            conversion_rate: 10.0,
            kappa: 0.05,
            gamma_down: 0.002,
            gamma_up: 0.02,
            dims: [3, 8],
        }
    }

    #[test]
    fn literal_ratios() {
        let sol = analytic_generic_steady(&regime()).unwrap();
        assert_relative_eq!(sol.ratios.r000, 0.11, max_relative = 1e-12);
        assert_relative_eq!(sol.ratios.r002, 0.0125 + 0.004, max_relative = 1e-12);
        assert_relative_eq!(
            sol.ratios.r003,
            0.0125f64.powi(2) * 1.3424,
            max_relative = 1e-12
        );
        assert_relative_eq!(sol.trace(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            sol.populations.iter().sum::<f64>(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            sol.populations[1],
            sol.rho_00_1 + sol.rho_11_1,
            max_relative = 1e-15
        );
    }

    #[test]
    fn no_loss_no_ground_population() {
        let mut p = regime();
        p.gamma_down = 0.0;
        p.kappa = 0.0;
        assert_eq!(analytic_generic_steady(&p).unwrap().ratios.r000, 0.0);
    }

    #[test]
    fn oracle_preconditions() {
        let mut p = regime();
        p.conversion_rate = 0.0;
        assert!(analytic_generic_steady(&p).is_err());
        let mut p = regime();
        p.g_tilde = 0.0;
        assert!(analytic_generic_steady(&p).is_err());
    }

    #[test]
    fn regime_flags() {
        let r = regime().regime();
        assert_relative_eq!(r.kappa_over_conversion, 0.005);
        assert_relative_eq!(r.down_over_up, 0.1);
        assert_relative_eq!(r.up_over_bound, 0.02 / 1.6);
        assert!(r.violations(0.2).is_empty());
        assert_eq!(r.violations(0.05), vec!["gamma_down/gamma_up"]);
    }

    #[test]
    fn builder_rejects_small_dims() {
        let mut p = regime();
        p.dims = [2, 3];
        assert!(build_generic(&p).is_err());
        p.dims = [2, 4];
        assert!(build_generic(&p).is_ok());
    }

    #[test]
    fn ansatz_embedding() {
        let p = regime();
        let sol = analytic_generic_steady(&p).unwrap();
        let rho = sol.to_density(&p.space().unwrap(), "a", "c").unwrap();
        assert_relative_eq!(rho.trace().re, 1.0, max_relative = 1e-12);
        let pc = rho.populations("c").unwrap();
        for (num, ana) in pc.iter().zip(sol.populations) {
            assert_relative_eq!(*num, ana, max_relative = 1e-12);
        }
        assert!(rho.hermiticity_error() < 1e-15);
    }
}
