use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fockstab::liouville::SolverReport;

use crate::config::Scenario;
use crate::run::{Analysis, ConvergenceEntry};
use crate::CliError;

/// Ratios above this value are flagged in the report.
pub const REGIME_FLAG: f64 = 0.2;

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn populations_csv(pops: &[f64]) -> String {
    let mut s = String::from("n,P\n");
    for (n, p) in pops.iter().enumerate() {
        let _ = writeln!(s, "{n},{}", num(*p));
    }
    s
}

pub fn rho_csv(a: &Analysis) -> String {
    let mut s = String::from("row,col,re,im\n");
    let d = a.rho_mech.dim();
    for i in 0..d {
        for j in 0..d {
            let v = a.rho_mech.element(i, j);
            let _ = writeln!(s, "{i},{j},{},{}", num(v.re), num(v.im));
        }
    }
    s
}

pub fn wigner_csv(a: &Analysis) -> Option<String> {
    let w = &a.wigner.as_ref()?.grid;
    let mut s = String::from("q,p,W\n");
    for (iq, q) in w.q_axis.iter().enumerate() {
        for (ip, p) in w.p_axis.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", num(*q), num(*p), num(w.get(iq, ip)));
        }
    }
    Some(s)
}

fn solver_section(s: &mut String, r: &SolverReport) {
    let _ = writeln!(s, "[solver]");
    let _ = writeln!(s, "method = {}", r.method);
    let _ = writeln!(s, "residual = {:.3e}", r.residual);
    let _ = writeln!(s, "hermiticity_error = {:.3e}", r.hermiticity_error);
    let _ = writeln!(s, "min_eigenvalue = {:.3e}", r.min_eigenvalue);
    let _ = writeln!(s, "trace_error = {:.3e}", r.trace_error);
    if let Some(it) = r.iterations {
        let _ = writeln!(s, "iterations = {it}");
    }
    if let Some(d) = r.degeneracy_distance {
        let _ = writeln!(s, "degeneracy_distance = {d:.3e}");
    }
    if let Some(d) = r.cross_check_distance {
        let _ = writeln!(s, "cross_check_distance = {d:.3e}");
    }
    for note in &r.notes {
        let _ = writeln!(s, "note: {note}");
    }
}

/// Human-readable summary of a run.
pub fn report(
    scenario: &Scenario,
    a: &Analysis,
    convergence: Option<&[ConvergenceEntry]>,
) -> String {
    let mut s = String::new();
    let labels = scenario.model.labels();
    let dims: Vec<String> = labels
        .iter()
        .zip(&scenario.dims)
        .map(|(l, d)| format!("{l}:{d}"))
        .collect();
    let _ = writeln!(s, "model = {}", scenario.model);
    let _ = writeln!(s, "dims = {}", dims.join(","));
    let _ = writeln!(s);

    let _ = writeln!(s, "[parameters]");
    for (k, v) in &scenario.params {
        let _ = writeln!(s, "{k} = {v}");
    }
    if let Some(eff) = a.spec.effective() {
        let _ = writeln!(s);
        let _ = writeln!(s, "[effective]");
        for (k, v) in [
            ("g_pp", eff.g_pp),
            ("g_mm", eff.g_mm),
            ("g_pm", eff.g_pm),
            ("kappa_plus", eff.kappa_plus),
            ("kappa_minus", eff.kappa_minus),
            ("kappa_pm", eff.kappa_pm),
            ("coupling_down", eff.coupling_down),
            ("coupling_up", eff.coupling_up),
            ("delta_plus", eff.delta_plus),
        ] {
            let _ = writeln!(s, "{k} = {v:.6}");
        }
    }
    if let Some(d) = &a.derived {
        let _ = writeln!(s);
        let _ = writeln!(s, "[derived]");
        for (k, v) in [
            ("conversion_rate (Gamma)", d.conversion_rate),
            ("pair_loss_rate", d.pair_loss_rate),
            ("cross_kerr", d.cross_kerr),
            ("gamma_down_th", d.gamma_down_th),
            ("gamma_up_th", d.gamma_up_th),
            ("omega_m_bar", d.omega_m_bar),
            ("gamma_down_bar", d.gamma_down_bar),
            ("gamma_up_bar", d.gamma_up_bar),
            ("omega_m_tilde", d.omega_m_tilde),
            ("delta_plus_tilde", d.delta_plus_tilde),
            ("g_tilde_exact", d.g_tilde_exact),
        ] {
            let _ = writeln!(s, "{k} = {v:.6}");
        }
    }
    if let Some(o) = &a.oracle {
        let p = &o.params;
        let _ = writeln!(s);
        let _ = writeln!(s, "[generic mapping]");
        for (k, v) in [
            ("g_tilde", p.g_tilde),
            ("conversion_rate", p.conversion_rate),
            ("kappa", p.kappa),
            ("gamma_down", p.gamma_down),
            ("gamma_up", p.gamma_up),
        ] {
            let _ = writeln!(s, "{k} = {v:.6}");
        }
    }

    let _ = writeln!(s);
    let _ = writeln!(s, "[regime]");
    match &a.regime {
        Some(r) => {
            for (name, v) in r.named() {
                let flag = if v > REGIME_FLAG {
                    "  FLAG: above 0.2"
                } else {
                    ""
                };
                let _ = writeln!(s, "{name} = {v:.4e}{flag}");
            }
        }
        None => {
            let _ = writeln!(
                s,
                "unavailable: the parameters do not map onto the generic model"
            );
        }
    }

    let _ = writeln!(s);
    solver_section(&mut s, &a.report);

    let _ = writeln!(s);
    let _ = writeln!(s, "[mechanics]");
    for (n, p) in a.populations.iter().enumerate() {
        let _ = writeln!(s, "P{n} = {p:.6}");
    }
    let _ = writeln!(s, "nbar = {:.6}", a.nbar);
    let sign = if a.w00 < 0.0 {
        "negative"
    } else {
        "non-negative"
    };
    let _ = writeln!(s, "W(0,0) = {:.6e} ({sign})", a.w00);
    if let Some(w) = &a.wigner {
        let (q, p) = w.metrics.min_location;
        let _ = writeln!(
            s,
            "W_min = {:.6e} at (q, p) = ({q:.4}, {p:.4})",
            w.metrics.min_value
        );
        let _ = writeln!(s, "negative_volume = {:.6e}", w.metrics.negative_volume);
        let _ = writeln!(s, "symmetry_residual = {:.3e}", w.symmetry_residual);
        let _ = writeln!(
            s,
            "grid_normalization_error = {:.3e}",
            w.grid.normalization_error()
        );
    }

    if let Some(o) = &a.oracle {
        let _ = writeln!(s);
        let _ = writeln!(s, "[oracle]");
        let _ = writeln!(
            s,
            "{:<10} {:>24} {:>24} {:>10}",
            "quantity", "analytic", "numeric", "rel_err"
        );
        for row in &o.rows {
            let _ = writeln!(
                s,
                "{:<10} {:>24} {:>24} {:>10.3e}",
                row.name,
                format!("{:.4e}{:+.4e}i", row.analytic.re, row.analytic.im),
                format!("{:.4e}{:+.4e}i", row.numeric.re, row.numeric.im),
                row.relative_error()
            );
        }
    }

    if let Some(entries) = convergence {
        let _ = writeln!(s);
        let _ = writeln!(s, "[convergence]");
        let th = scenario.solver.convergence_threshold;
        for e in entries {
            let status = if e.max_dp > th { "NOT CONVERGED" } else { "ok" };
            let _ = writeln!(
                s,
                "double {} -> {:?}: max |dP| = {:.3e} ({status})",
                e.label, e.dims, e.max_dp
            );
        }
    }
    s
}
