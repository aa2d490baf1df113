//! `holesim` — command-line front end for the photon-hole interference
//! simulator.
//!
//! Subcommands map onto the library entry points: `run` executes one
//! scenario, `scan-phase` sweeps the source phase and fits the coincidence
//! fringe, `bell` runs the interferometric Bell stage, and `tpa-compare`
//! contrasts the interference route with the idealized two-photon absorber.
//! Every subcommand accepts `--config FILE`; command-line flags override
//! config-file values.
//!
//! Exit codes: 0 on success, 2 for configuration/usage errors (including
//! those detected mid-run, such as an out-of-range parameter), 1 for runtime
//! failures such as unwritable output files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use holesim::{
    fit_fringe, normalize_angle, phase_scan, read_config_file, run_scenario, tpa_compare,
    ExperimentConfig, RunMode, Scenario, ScenarioResult, SimError, VisibilityReport,
};

#[derive(Parser)]
#[command(
    name = "holesim",
    about = "Amplitude-level simulator of photon holes carved by two-photon interference",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args)]
struct Common {
    /// Configuration file (key = value lines); defaults apply when absent.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its summary; optionally export files.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scenario to run (fig3a, fig3b, fig3c, fig3d, bell).
        #[arg(long, value_name = "NAME")]
        scenario: Option<Scenario>,
        /// Number of pulses in the train.
        #[arg(long, value_name = "N")]
        pulses: Option<u64>,
        /// Random seed.
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Write the coincidence histogram here and the summary to `<PATH>.summary`.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Exact probability propagation instead of Monte Carlo sampling.
        #[arg(long)]
        exact: bool,
    },
    /// Sweep the source phase over one period and fit the coincidence fringe.
    ScanPhase {
        #[command(flatten)]
        common: Common,
        /// Number of evenly spaced phases in [0, 2*pi).
        #[arg(long, value_name = "N", default_value_t = 16,
              value_parser = clap::value_parser!(u32).range(4..=4096))]
        points: u32,
        /// Exact probability propagation instead of Monte Carlo sampling.
        #[arg(long)]
        exact: bool,
    },
    /// Run the unbalanced-interferometer Bell stage and print CHSH results.
    Bell {
        #[command(flatten)]
        common: Common,
        /// Interferometer path difference in whole pulse periods.
        #[arg(long, value_name = "K")]
        delay_pulses: Option<u32>,
        /// Local analyzer phase on side A, degrees.
        #[arg(long, value_name = "DEG")]
        phase_a: Option<f64>,
        /// Local analyzer phase on side B, degrees.
        #[arg(long, value_name = "DEG")]
        phase_b: Option<f64>,
    },
    /// Compare the interference route against the idealized absorber route.
    TpaCompare {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<ExperimentConfig, SimError> {
    match &common.config {
        Some(path) => read_config_file(path),
        None => Ok(ExperimentConfig::default()),
    }
}

/// Configuration-class errors exit with 2; anything else is a runtime error.
fn exit_code_for(err: &SimError) -> u8 {
    match err {
        SimError::Config { .. }
        | SimError::BadParameter { .. }
        | SimError::BadTruncation { .. }
        | SimError::BadBinning { .. }
        | SimError::BadDelay { .. }
        | SimError::CoherentTail { .. }
        | SimError::JitterUnsupported
        | SimError::WrongEntryPoint(..) => 2,
        _ => 1,
    }
}

fn print_run(result: &ScenarioResult, out: Option<&PathBuf>) -> Result<(), SimError> {
    if let Some(path) = out {
        if let Some(hist) = &result.histogram {
            holesim::export_histogram(hist, path)?;
        }
        let mut summary_path = path.clone();
        summary_path.as_mut_os_string().push(".summary");
        holesim::write_summary(result, &summary_path)?;
    }
    print!("{}", holesim::format_summary(result));
    Ok(())
}

fn cmd_run(
    common: &Common,
    scenario: Option<Scenario>,
    pulses: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    exact: bool,
) -> Result<(), SimError> {
    let mut cfg = load_config(common)?;
    if let Some(s) = scenario {
        cfg.scenario = s;
    }
    if let Some(n) = pulses {
        cfg.n_pulses = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if exact {
        cfg.mode = RunMode::Exact;
    }
    let result = run_scenario(&cfg)?;
    print_run(&result, out.as_ref())
}

fn cmd_scan_phase(common: &Common, points: u32, exact: bool) -> Result<(), SimError> {
    let mut cfg = load_config(common)?;
    cfg.scenario = Scenario::PhaseScan;
    if exact {
        cfg.mode = RunMode::Exact;
    }
    let phis: Vec<f64> =
        (0..points).map(|i| 2.0 * std::f64::consts::PI * i as f64 / points as f64).collect();
    let scan = phase_scan(&cfg, &phis)?;

    println!("# scenario = phase_scan");
    println!("# mode = {}", cfg.mode);
    println!("phi_rad,p_both");
    for &(phi, p) in &scan {
        println!("{phi},{p}");
    }
    let xs: Vec<f64> = scan.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = scan.iter().map(|s| s.1).collect();
    let fit = fit_fringe(&xs, &ys)?;
    let report = VisibilityReport::from_fringe_fit(&fit);
    println!("# fit: p(phi) = mean * [1 + visibility * cos(phi + offset)]");
    println!("fit_mean = {}", fit.mean);
    println!("fit_visibility = {}", report.visibility);
    println!("fit_offset_rad = {}", normalize_angle(fit.phase));
    println!("fit_residual_rms = {}", fit.residual_rms);
    Ok(())
}

fn cmd_bell(
    common: &Common,
    delay_pulses: Option<u32>,
    phase_a: Option<f64>,
    phase_b: Option<f64>,
) -> Result<(), SimError> {
    let mut cfg = load_config(common)?;
    cfg.scenario = Scenario::Bell;
    if let Some(k) = delay_pulses {
        cfg.delay_pulses = k;
    }
    if let Some(a) = phase_a {
        cfg.phase_a_deg = a;
    }
    if let Some(b) = phase_b {
        cfg.phase_b_deg = b;
    }
    let result = run_scenario(&cfg)?;
    print_run(&result, None)
}

fn cmd_tpa_compare(common: &Common) -> Result<(), SimError> {
    let cfg = load_config(common)?;
    let cmp = tpa_compare(&cfg)?;
    println!("# scenario = tpa_compare");
    println!("p_both_interference = {}", cmp.interference.p_both);
    println!("p_both_absorber = {}", cmp.absorber.p_both);
    println!("p_both_baseline = {}", cmp.baseline_p_both);
    println!("removed_mass = {}", cmp.removed_mass);
    println!("marginal_tv_a = {}", cmp.marginal_tv_a);
    println!("marginal_tv_b = {}", cmp.marginal_tv_b);
    for (route, report) in
        [("interference", &cmp.interference), ("absorber", &cmp.absorber)]
    {
        for (side, beam) in [("a", &report.beam_a), ("b", &report.beam_b)] {
            println!("mean_{side}_{route} = {}", beam.mean);
            println!("g2_{side}_{route} = {}", beam.g2);
            println!("tv_poisson_{side}_{route} = {}", beam.tv_poisson);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { common, scenario, pulses, seed, out, exact } => {
            cmd_run(common, *scenario, *pulses, *seed, out.clone(), *exact)
        }
        Command::ScanPhase { common, points, exact } => cmd_scan_phase(common, *points, *exact),
        Command::Bell { common, delay_pulses, phase_a, phase_b } => {
            cmd_bell(common, *delay_pulses, *phase_a, *phase_b)
        }
        Command::TpaCompare { common } => cmd_tpa_compare(common),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if let SimError::WrongEntryPoint(name, _) = &err {
                let hint = match *name {
                    "phase_scan" => "scan-phase",
                    "tpa_compare" => "tpa-compare",
                    other => other,
                };
                eprintln!("hint: use the `{hint}` subcommand for this scenario");
            }
            ExitCode::from(exit_code_for(&err))
        }
    }
}
