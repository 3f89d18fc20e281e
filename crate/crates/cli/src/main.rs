use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fockstab_cli::config::{preset, Scenario};
use fockstab_cli::output::{populations_csv, report, rho_csv, wigner_csv, write_atomic};
use fockstab_cli::run::{analyze, convergence_study};
use fockstab_cli::sweep::{parse_values, run_sweep, sweep_csv};
use fockstab_cli::CliError;

#[derive(Parser)]
#[command(
    name = "fockstab",
    version,
    about = "Steady states of dissipatively stabilized phonon Fock states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write populations, density matrix, Wigner grid and report.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Skip the Wigner grid.
        #[arg(long)]
        no_wigner: bool,
    },
    /// Solve a scenario for each value of one parameter and write sweep.csv.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Parameter name, or `dims.<mode>` for a truncation.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario (fig3ab or fig3cd).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct Common {
    /// Output directory; overrides `output_dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Truncation overrides, e.g. `a+:3,a-:3,a3:2,c:7`.
    #[arg(long)]
    dims: Option<String>,
    /// Include the a+/a- cross-dissipator (full model).
    #[arg(long)]
    cross_kappa: bool,
    /// Repeat each solve with every truncation doubled in turn.
    #[arg(long)]
    convergence: bool,
    /// Exit with status 3 when the convergence check fails.
    #[arg(long)]
    strict: bool,
}

fn load(source: &Source, common: &Common) -> Result<Scenario, CliError> {
    let mut sc = match (&source.config, &source.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            Scenario::parse(&text, &path.display().to_string())?
        }
        (None, Some(name)) => Scenario::parse(preset(name)?, name)?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    if let Some(out) = &common.out {
        sc.output_dir = out.clone();
    }
    if common.cross_kappa {
        sc.options.cross_kappa = true;
    }
    if let Some(d) = &common.dims {
        sc.override_dims(d)?;
    }
    sc.validate()?;
    Ok(sc)
}

fn convergence_failure(max_dp: f64, threshold: f64, strict: bool) -> Result<(), CliError> {
    if max_dp > threshold {
        let msg = format!(
            "max |dP_n| = {max_dp:.3e} exceeds {threshold:.1e} when a truncation is doubled"
        );
        log::warn!("{msg}");
        if strict {
            return Err(CliError::Convergence(msg));
        }
    }
    Ok(())
}

fn simulate(source: &Source, common: &Common, no_wigner: bool) -> Result<(), CliError> {
    let mut sc = load(source, common)?;
    if no_wigner {
        sc.wigner.enabled = false;
    }
    let spec = sc.model_spec()?;
    let grid = sc.wigner.enabled.then(|| sc.wigner.grid_spec());
    let a = analyze(&spec, &sc.solver, grid.as_ref())?;
    let conv = if common.convergence {
        Some(convergence_study(
            &spec,
            sc.model.labels(),
            &sc.solver,
            &a.populations,
        )?)
    } else {
        None
    };

    let dir = &sc.output_dir;
    write_atomic(
        &dir.join("populations.csv"),
        &populations_csv(&a.populations),
    )?;
    write_atomic(&dir.join("rho_mech.csv"), &rho_csv(&a))?;
    if let Some(w) = wigner_csv(&a) {
        write_atomic(&dir.join("wigner.csv"), &w)?;
    }
    write_atomic(&dir.join("report.txt"), &report(&sc, &a, conv.as_deref()))?;

    let p1 = a.populations.get(1).copied().unwrap_or(0.0);
    println!(
        "P1 = {p1:.6}, W(0,0) = {:.6e}, residual = {:.3e}",
        a.w00, a.report.residual
    );
    println!("wrote {}", dir.display());
    if let Some(entries) = conv {
        let worst = entries.iter().map(|e| e.max_dp).fold(0.0, f64::max);
        println!("convergence: max |dP_n| = {worst:.3e}");
        convergence_failure(worst, sc.solver.convergence_threshold, common.strict)?;
    }
    Ok(())
}

fn sweep(source: &Source, common: &Common, axis: &str, values: &str) -> Result<(), CliError> {
    let sc = load(source, common)?;
    let values = parse_values(values)?;
    let rows = run_sweep(&sc, axis, &values, common.convergence, Some(&sc.output_dir))?;
    let path = sc.output_dir.join("sweep.csv");
    write_atomic(&path, &sweep_csv(&rows, common.convergence))?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    if common.convergence {
        let worst = rows.iter().filter_map(|r| r.max_dp).fold(0.0, f64::max);
        convergence_failure(worst, sc.solver.convergence_threshold, common.strict)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors share exit status 1 with config errors; 2 means solver failure
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate {
            source,
            common,
            no_wigner,
        } => simulate(source, common, *no_wigner),
        Command::Sweep {
            source,
            common,
            axis,
            values,
        } => sweep(source, common, axis, values),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
