use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::Scenario;
use crate::output::{num, populations_csv, rho_csv, write_atomic};
use crate::run::{analyze, convergence_study, Analysis};
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `P0..P3`; zero where the truncation is smaller.
    pub populations: [f64; 4],
    pub nbar: f64,
    pub w00: f64,
    pub residual: f64,
    /// Largest population shift over all single-mode doublings.
    pub max_dp: Option<f64>,
}

/// Parses `v1,v2,...`; an empty string gives no values.
pub fn parse_values(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Config(format!("--values: '{v}' is not a number")))
        })
        .collect()
}

fn current_value(base: &Scenario, axis: &str) -> f64 {
    match axis.strip_prefix("dims.") {
        Some(label) => {
            let idx = base.model.labels().iter().position(|l| *l == label);
            idx.map_or(1.0, |i| base.dims[i] as f64)
        }
        None => base.params.get(axis).copied().unwrap_or(0.0),
    }
}

fn point(
    base: &Scenario,
    axis: &str,
    value: f64,
    convergence: bool,
) -> Result<(SweepRow, Analysis), CliError> {
    let mut sc = base.clone();
    sc.set_axis(axis, value)?;
    let spec = sc
        .model_spec()
        .map_err(|e| CliError::Config(format!("{axis} = {value}: {e}")))?;
    let a = analyze(&spec, &sc.solver, None).map_err(|e| match e {
        CliError::Solver(msg) => CliError::Solver(format!("{axis} = {value}: {msg}")),
        other => other,
    })?;
    let max_dp = if convergence {
        let entries = convergence_study(&spec, sc.model.labels(), &sc.solver, &a.populations)?;
        Some(entries.iter().map(|e| e.max_dp).fold(0.0, f64::max))
    } else {
        None
    };
    let mut populations = [0.0; 4];
    for (dst, src) in populations.iter_mut().zip(&a.populations) {
        *dst = *src;
    }
    let row = SweepRow {
        value,
        populations,
        nbar: a.nbar,
        w00: a.w00,
        residual: a.report.residual,
        max_dp,
    };
    Ok((row, a))
}

/// Solves every point in parallel; rows come back in the order of `values`.
/// With `out`, each point's populations and mechanical density matrix are
/// written to `out/point-NNN/`.
pub fn run_sweep(
    base: &Scenario,
    axis: &str,
    values: &[f64],
    convergence: bool,
    out: Option<&Path>,
) -> Result<Vec<SweepRow>, CliError> {
    base.clone().set_axis(axis, current_value(base, axis))?;
    values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let (row, a) = point(base, axis, v, convergence)?;
            if let Some(dir) = out {
                let dir = dir.join(format!("point-{i:03}"));
                write_atomic(
                    &dir.join("populations.csv"),
                    &populations_csv(&a.populations),
                )?;
                write_atomic(&dir.join("rho_mech.csv"), &rho_csv(&a))?;
            }
            Ok(row)
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow], convergence: bool) -> String {
    let mut s = String::from("value,P0,P1,P2,P3,nbar,W00,residual");
    s.push_str(if convergence { ",max_dP\n" } else { "\n" });
    for r in rows {
        let _ = write!(s, "{}", num(r.value));
        for p in r.populations {
            let _ = write!(s, ",{}", num(p));
        }
        let _ = write!(s, ",{},{},{}", num(r.nbar), num(r.w00), num(r.residual));
        if convergence {
            let _ = write!(s, ",{}", num(r.max_dp.unwrap_or(f64::NAN)));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse() {
        assert_eq!(parse_values("1, 2.5,3e-2").unwrap(), vec![1.0, 2.5, 0.03]);
        assert!(parse_values("").unwrap().is_empty());
        assert!(parse_values("1,x").is_err());
    }

    #[test]
    fn empty_sweep_has_header_only() {
        assert_eq!(
            sweep_csv(&[], false),
            "value,P0,P1,P2,P3,nbar,W00,residual\n"
        );
        assert_eq!(
            sweep_csv(&[], true),
            "value,P0,P1,P2,P3,nbar,W00,residual,max_dP\n"
        );
    }
}
