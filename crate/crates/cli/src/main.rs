use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dispcancel::output::{
    fig3_csv, fig3_json, format_float, slice_csv, summaries_csv, summaries_json, trace_csv,
};
use dispcancel::scenarios::parse_values;
use dispcancel::{
    reproduce_fig3, run_bk7_beta, run_classical_scan, run_inequality_check, run_quantum_correlation,
    run_sweep, CliError, OutputFormat, OutputSink, RunSummary, ScenarioConfig, SweepParameter,
    EXIT_USAGE,
};

/// Simulates dispersion cancellation in classical second-harmonic delay
/// scans and in entangled photon-pair coincidences.
#[derive(Debug, Parser)]
#[command(name = "dispcancel", version)]
struct Cli {
    /// Scenario configuration file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key; repeatable (e.g. --set beta2=0).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Directory receiving all output files.
    #[arg(long, global = true, default_value = "dispcancel-out")]
    out: PathBuf,
    /// Summary table format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Both)]
    format: OutputFormat,
    /// Print the built-in default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical SHG delay scan with Gaussian fit.
    ClassicalScan,
    /// Two-photon coincidence distribution with opposite dispersion.
    QuantumCorrelation,
    /// Repeat a scenario over a list of values of one parameter.
    Sweep {
        /// beta (sets beta1=v, beta2=-v), sigma_c_ratio or mono_fwhm.
        #[arg(long)]
        param: String,
        /// Comma-separated values, run in the order given.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Nonlocal variance bound: configured pump versus a separable state.
    InequalityCheck,
    /// Classical scans for (0,0), (850,0), (0,-850) and (850,-850) fs².
    ReproduceFig3,
    /// Group-delay dispersion of BK7 glass, e.g. `bk7-beta 38.65mm @807nm`.
    Bk7Beta {
        #[arg(required = true, num_args = 1..)]
        args: Vec<String>,
    },
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::parse(&text)?
        }
        None => ScenarioConfig::default(),
    };
    for assignment in &cli.overrides {
        config.apply_override(assignment)?;
    }
    config.validate()?;
    Ok(config)
}

fn report(summary: &RunSummary) {
    println!(
        "{}: fitted FWHM {} fs, closed form {} fs, variance {} fs^2, bound {} fs^2, violated {}",
        summary.scenario,
        format_float(summary.fitted_fwhm_fs),
        format_float(summary.closed_form_fwhm_fs),
        format_float(summary.variance_fs2),
        format_float(summary.bound_fs2),
        summary.violated
    );
    eprintln!("{}: wall time {:.1} ms", summary.scenario, summary.wall_time_ms);
}

fn write_summaries(sink: &OutputSink, stem: &str, summaries: &[RunSummary]) -> Result<(), CliError> {
    sink.write_table(stem, || summaries_csv(summaries), || summaries_json(summaries))?;
    summaries.iter().for_each(report);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.print_defaults {
        print!("{}", ScenarioConfig::defaults_text());
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage(
            "no subcommand given; see --help".to_string(),
        ));
    };
    if let Command::Bk7Beta { args } = command {
        let result = run_bk7_beta(args)?;
        println!(
            "beta = {} fs^2 for {} mm of BK7 at {} nm",
            format_float(result.beta_fs2),
            result.length_mm,
            result.wavelength_nm
        );
        return Ok(());
    }

    let config = load_config(&cli)?;
    // validate sweep arguments before touching the filesystem
    let sweep = match command {
        Command::Sweep { param, values } => Some((param.parse::<SweepParameter>()?, parse_values(values)?)),
        _ => None,
    };
    let sink = OutputSink::new(&cli.out, cli.format)?;
    match command {
        Command::ClassicalScan => {
            let (trace, summary) = run_classical_scan(&config)?;
            sink.write("classical_scan_trace.csv", &trace_csv(&trace))?;
            sink.write("classical_scan_config.txt", &config.to_text())?;
            write_summaries(&sink, "classical_scan_summary", &[summary])?;
        }
        Command::QuantumCorrelation => {
            let (dist, summary) = run_quantum_correlation(&config)?;
            sink.write("quantum_correlation_slice.csv", &slice_csv(&dist))?;
            sink.write("quantum_correlation_config.txt", &config.to_text())?;
            write_summaries(&sink, "quantum_correlation_summary", &[summary])?;
        }
        Command::Sweep { .. } => {
            let (parameter, values) = sweep.expect("parsed above");
            let summaries = run_sweep(&config, parameter, &values)?;
            sink.write(&format!("sweep_{}_config.txt", parameter.name()), &config.to_text())?;
            write_summaries(&sink, &format!("sweep_{}_summary", parameter.name()), &summaries)?;
        }
        Command::InequalityCheck => {
            let summaries = run_inequality_check(&config)?;
            sink.write("inequality_check_config.txt", &config.to_text())?;
            write_summaries(&sink, "inequality_check_summary", &summaries)?;
        }
        Command::ReproduceFig3 => {
            let panels = reproduce_fig3(&config)?;
            for panel in &panels {
                sink.write(&format!("fig3_{}_trace.csv", panel.label), &trace_csv(&panel.trace))?;
            }
            sink.write("fig3_config.txt", &config.to_text())?;
            sink.write_table("fig3_summary", || fig3_csv(&panels), || fig3_json(&panels))?;
            for panel in &panels {
                report(&panel.summary);
                println!(
                    "  ({}) measured in the laboratory: {} fs; {}",
                    panel.label,
                    format_float(panel.measured_fwhm_fs),
                    panel.note
                );
            }
        }
        Command::Bk7Beta { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dispcancel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
