use fockstab::fock::DensityMatrix;
use fockstab::liouville::{steady_state, SolverReport, SteadyState};
use fockstab::models::{
    analytic_generic_steady, map_to_generic, DerivedRates, GenericParams, RegimeRatios,
};
use fockstab::wigner::{
    negativity_metrics, symmetry_residual, wigner_grid, wigner_value, GridSpec, NegativityMetrics,
    WignerGrid,
};
use fockstab::C64;
use rayon::prelude::*;

use crate::config::{ModelSpec, SolverSettings};
use crate::CliError;

/// Label of the mechanical mode in every model.
pub const PHONON: &str = "c";
/// Truncation used when an optomechanical scenario is mapped onto the generic model.
const ORACLE_DIMS: [usize; 2] = [3, 8];

pub fn solve(spec: &ModelSpec, solver: &SolverSettings) -> Result<SteadyState, CliError> {
    let l = spec.build().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(steady_state(&l, &solver.options())?)
}

#[derive(Clone, Debug)]
pub struct WignerSummary {
    pub grid: WignerGrid,
    pub metrics: NegativityMetrics,
    pub symmetry_residual: f64,
}

/// One analytic coefficient next to its numeric counterpart.
#[derive(Clone, Debug)]
pub struct OracleRow {
    pub name: String,
    pub analytic: C64,
    pub numeric: C64,
}

impl OracleRow {
    pub fn relative_error(&self) -> f64 {
        (self.numeric - self.analytic).norm() / self.analytic.norm()
    }
}

#[derive(Clone, Debug)]
pub struct OracleComparison {
    /// Parameters the closed form was evaluated at.
    pub params: GenericParams,
    pub rows: Vec<OracleRow>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub spec: ModelSpec,
    pub state: DensityMatrix,
    pub rho_mech: DensityMatrix,
    pub populations: Vec<f64>,
    pub nbar: f64,
    pub report: SolverReport,
    /// Exact `W(0,0)` of the mechanical state.
    pub w00: f64,
    pub wigner: Option<WignerSummary>,
    pub regime: Option<RegimeRatios>,
    pub derived: Option<DerivedRates>,
    pub oracle: Option<OracleComparison>,
}

/// Steady state and all derived quantities of one scenario.
pub fn analyze(
    spec: &ModelSpec,
    solver: &SolverSettings,
    grid: Option<&GridSpec>,
) -> Result<Analysis, CliError> {
    let ss = solve(spec, solver)?;
    let rho_mech = ss.rho.partial_trace(&[PHONON])?;
    let populations: Vec<f64> = (0..rho_mech.dim())
        .map(|n| rho_mech.element(n, n).re)
        .collect();
    let nbar = populations
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum();
    let w00 = wigner_value(&rho_mech, 0.0, 0.0)?;
    let wigner = match grid {
        Some(g) => {
            let grid = wigner_grid(&rho_mech, g)?;
            let metrics = negativity_metrics(&grid);
            let symmetry_residual = symmetry_residual(&grid)?;
            Some(WignerSummary {
                grid,
                metrics,
                symmetry_residual,
            })
        }
        None => None,
    };
    let generic = match spec {
        ModelSpec::Generic(p) => Some(*p),
        ModelSpec::Reduced { eff, .. } | ModelSpec::Full { eff, .. } => {
            map_to_generic(eff, ORACLE_DIMS).ok()
        }
    };
    let oracle = generic.and_then(|p| oracle_comparison(spec, &p, &ss.rho, &populations));
    Ok(Analysis {
        spec: *spec,
        state: ss.rho,
        rho_mech,
        populations,
        nbar,
        report: ss.report,
        w00,
        wigner,
        regime: generic.map(|p| p.regime()),
        derived: spec.effective().map(|e| e.derived()),
        oracle,
    })
}

/// Numeric values of the coefficients of the perturbative ansatz, read from a
/// generic-model steady state (photon mode first).
pub fn ansatz_coefficients(rho: &DensityMatrix) -> Result<[(&'static str, C64); 8], CliError> {
    let s = rho.space();
    let el = |(k, n): (usize, usize), (k2, n2): (usize, usize)| -> Result<C64, CliError> {
        Ok(rho.element(s.index_of(&[k, n])?, s.index_of(&[k2, n2])?))
    };
    Ok([
        ("rho_00_0", el((0, 0), (0, 0))?),
        ("rho_00_1", el((0, 1), (0, 1))?),
        ("rho_00_2", el((0, 2), (0, 2))?),
        ("rho_00_3", el((0, 3), (0, 3))?),
        ("rho_11_0", el((1, 0), (1, 0))?),
        ("rho_11_1", el((1, 1), (1, 1))?),
        ("rho_10_0", el((1, 0), (0, 2))?),
        ("rho_10_1", el((1, 1), (0, 3))?),
    ])
}

/// Approximate population ratios `P0/P1` and `P2/P1` of the generic model.
pub fn ratio_formulas(p: &GenericParams) -> (f64, f64) {
    let p0p1 = p.gamma_down / p.gamma_up + 2.0 * p.kappa / p.conversion_rate;
    let p2p1 = p.gamma_up * p.conversion_rate / (4.0 * p.g_tilde * p.g_tilde)
        + 2.0 * p.gamma_up / p.conversion_rate;
    (p0p1, p2p1)
}

fn oracle_comparison(
    spec: &ModelSpec,
    p: &GenericParams,
    rho: &DensityMatrix,
    pops: &[f64],
) -> Option<OracleComparison> {
    let a = analytic_generic_steady(p).ok()?;
    let re = |v: f64| C64::new(v, 0.0);
    let mut rows = Vec::new();
    if let ModelSpec::Generic(_) = spec {
        let analytic = [
            re(a.rho_00_0),
            re(a.rho_00_1),
            re(a.rho_00_2),
            re(a.rho_00_3),
            re(a.rho_11_0),
            re(a.rho_11_1),
            a.rho_10_0,
            a.rho_10_1,
        ];
        for ((name, numeric), analytic) in ansatz_coefficients(rho).ok()?.into_iter().zip(analytic)
        {
            rows.push(OracleRow {
                name: name.into(),
                analytic,
                numeric,
            });
        }
    }
    for (n, &pa) in a.populations.iter().enumerate() {
        rows.push(OracleRow {
            name: format!("P{n}"),
            analytic: re(pa),
            numeric: re(pops.get(n).copied().unwrap_or(0.0)),
        });
    }
    if pops.len() > 2 && pops[1] > 0.0 {
        let (p0p1, p2p1) = ratio_formulas(p);
        rows.push(OracleRow {
            name: "P0/P1".into(),
            analytic: re(p0p1),
            numeric: re(pops[0] / pops[1]),
        });
        rows.push(OracleRow {
            name: "P2/P1".into(),
            analytic: re(p2p1),
            numeric: re(pops[2] / pops[1]),
        });
    }
    Some(OracleComparison { params: *p, rows })
}

/// Population shift when one mode's truncation is doubled.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceEntry {
    pub label: String,
    pub dims: Vec<usize>,
    pub max_dp: f64,
}

pub fn max_population_shift(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|n| (a.get(n).copied().unwrap_or(0.0) - b.get(n).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Doubles each truncation in turn and compares the phonon populations with `base`.
pub fn convergence_study(
    spec: &ModelSpec,
    labels: &[&str],
    solver: &SolverSettings,
    base: &[f64],
) -> Result<Vec<ConvergenceEntry>, CliError> {
    let dims = spec.dims();
    (0..dims.len())
        .into_par_iter()
        .map(|i| {
            let mut d = dims.clone();
            d[i] *= 2;
            let ss = solve(&spec.with_dims(&d), solver)?;
            let pops = ss.rho.populations(PHONON)?;
            Ok(ConvergenceEntry {
                label: labels[i].to_string(),
                dims: d,
                max_dp: max_population_shift(base, &pops),
            })
        })
        .collect()
}
