use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dnstrip::eigensolve::Verdict;
use dnstrip::scenario::{
    preset, run_scenario, run_sweep, validate, write_outputs, write_sweep_csv, Scenario, Task, ValidateOptions,
    PRESET_NAMES,
};

/// Spectral lab for curved planar strips with Dirichlet/Neumann boundaries.
#[derive(Parser)]
#[command(name = "dnstrip", version, arg_required_else_help = true)]
struct Cli {
    /// Print an embedded preset scenario as JSON and exit.
    #[arg(long, value_name = "NAME")]
    dump_preset: Option<String>,

    /// Maximum number of worker threads.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Exit with status 2 when a bound-state verdict is inconclusive.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Detect bound states below the threshold (plus any other tasks listed in the scenario).
    Solve(ScenarioArgs),
    /// Search for a variational certificate of a bound state.
    Certify(ScenarioArgs),
    /// Transverse eigenvalue table and the non-existence certificate.
    Transverse(ScenarioArgs),
    /// Run the invariant suite and print a pass/fail table.
    Validate(ValidateArgs),
    /// Detection and certification over a grid of (c, d, s0).
    Sweep(ScenarioArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Embedded scenario name.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Output directory (default: out/<scenario name>).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Only run checks whose name contains this string.
    #[arg(long)]
    filter: Option<String>,

    #[arg(long, hide = true)]
    corrupt_bessel_table: bool,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario> {
        match (&self.config, &self.preset) {
            (Some(path), _) => Scenario::load(path).with_context(|| format!("loading {}", path.display())),
            (None, Some(name)) => Ok(preset(name)?),
            (None, None) => bail!(
                "either --config or --preset is required (presets: {})",
                PRESET_NAMES.join(", ")
            ),
        }
    }

    fn out_dir(&self, sc: &Scenario) -> PathBuf {
        self.out.clone().unwrap_or_else(|| Path::new("out").join(&sc.name))
    }
}

fn scenario_command(args: &ScenarioArgs, tasks: &[Task], strict: bool) -> Result<ExitCode> {
    let sc = args.scenario()?;
    let out = args.out_dir(&sc);
    let started = Instant::now();
    let run = run_scenario(&sc, tasks)?;
    write_outputs(&sc, &sc.strip()?, &run, &out, started.elapsed())
        .with_context(|| format!("writing artifacts to {}", out.display()))?;

    let r = &run.report;
    println!("scenario   {}", sc.name);
    println!("threshold  {:.12}", r.geometry.threshold);
    if let Some(b) = &r.verdicts.bound_state {
        println!(
            "bracket    dirichlet {:.12}  neumann {:.12}  (extrapolated)",
            b.extrapolated_dirichlet, b.extrapolated_neumann
        );
        println!("verdict    {} (margin {:.3e})", b.verdict.as_str(), b.margin);
        if let Some(rec) = &b.recommendation {
            println!("           {rec}");
        }
    }
    if let Some(c) = &r.verdicts.certificate {
        println!(
            "certify    {}: q = {:.6e} at sigma = {:e}{}",
            c.kind.as_str(),
            c.q_value,
            c.sigma,
            if c.found { " (certificate)" } else { " (no certificate)" }
        );
    }
    if let Some(t) = &r.verdicts.transverse {
        println!("transverse {}", t.verdict);
    }
    for c in r.verdicts.consistency.iter().filter(|c| !c.pass) {
        println!("warning    {} failed: {}", c.name, c.detail);
    }
    println!("output     {}", out.display());

    if strict && r.verdict() == Some(Verdict::Inconclusive) {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_command(args: &ScenarioArgs, strict: bool) -> Result<ExitCode> {
    let sc = args.scenario()?;
    let out = args.out_dir(&sc);
    fs::create_dir_all(&out)?;
    let rows = run_sweep(&sc)?;
    let path = out.join("sweep.csv");
    write_sweep_csv(&rows, fs::File::create(&path)?)?;
    for r in &rows {
        println!("c={:<8} d={:<6} s0={:<6} {}", r.c, r.d, r.s0, r.verdict);
    }
    println!("output     {}", path.display());
    if strict && rows.iter().any(|r| r.verdict == Verdict::Inconclusive.as_str()) {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    if let Some(name) = &cli.dump_preset {
        println!("{}", preset(name)?.to_json());
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        bail!("no subcommand given");
    };
    match command {
        Command::Solve(a) => {
            let sc = a.scenario()?;
            let mut tasks = sc.tasks.clone();
            if !tasks.contains(&Task::Solve) {
                tasks.insert(0, Task::Solve);
            }
            scenario_command(&a, &tasks, cli.strict)
        }
        Command::Certify(a) => scenario_command(&a, &[Task::Certify], cli.strict),
        Command::Transverse(a) => scenario_command(&a, &[Task::Transverse], cli.strict),
        Command::Sweep(a) => sweep_command(&a, cli.strict),
        Command::Validate(a) => {
            let table = validate(&ValidateOptions {
                filter: a.filter,
                corrupt_bessel_table: a.corrupt_bessel_table,
            });
            print!("{}", table.render());
            if table.rows.is_empty() {
                bail!("no check matches the filter");
            }
            if !table.all_pass() {
                eprintln!("failed: {}", table.failures().join(", "));
                return Ok(ExitCode::FAILURE);
            }
            println!("all {} checks passed", table.rows.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
