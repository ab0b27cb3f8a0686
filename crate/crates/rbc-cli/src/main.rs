use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rbc_sim::calibrate::{calibrate, Targets};
use rbc_sim::scenario::{
    evaluate, load_scenario, load_sweep, run_sweep_with, write_outputs, EvalMode,
    OutputFormat, Row, Scenario, SolveCache,
};

/// Resonant beam link simulator.
#[derive(Parser, Debug)]
#[command(name = "rbc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a single operating point.
    Run {
        #[command(flatten)]
        common: Common,
        /// Override the scenario's channel mode.
        #[arg(long)]
        channel: Option<EvalMode>,
        /// Also write the result table here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Evaluate every point of a parameter sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Sweep file; repeat to run several against one solve cache.
        #[arg(long, required = true)]
        sweep: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        /// Solve every point independently.
        #[arg(long)]
        no_cache: bool,
    },
    /// Parse and check files without solving.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        sweep: Option<PathBuf>,
    },
    /// Refit the focal length, R_o, eta_e and the crystal beam radius.
    Calibrate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Override the grid size.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Override the seed of the initial field.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> rbc_sim::Result<Scenario> {
        let mut s = load_scenario(&self.scenario)?;
        if let Some(n) = self.grid_n {
            s = s.with_grid_n(n)?;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s.validate(&self.scenario.display().to_string())?;
        Ok(s)
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.6}"))
}

fn print_row(r: &Row) {
    println!("eta_direct  {}", fmt_opt(r.eta_direct));
    println!("eta_irs     {}", fmt_opt(r.eta_irs));
    println!("P_o         {} W", fmt_opt(r.p_o));
    println!("P_o_2v      {} W", fmt_opt(r.p_o_2v));
    println!("P_oc_d      {} W", fmt_opt(r.p_oc_d));
    println!("P_oc_i      {} W", fmt_opt(r.p_oc_i));
    println!("gamma_opt   {}", fmt_opt(r.gamma_opt));
    println!("P_oc        {} W", fmt_opt(r.p_oc));
    println!("SNR         {} dB", fmt_opt(r.snr_db));
    println!("SE          {} bit/s/Hz", fmt_opt(r.se_bps_hz));
    println!("status      {}", r.status);
}

fn execute(cmd: Command) -> rbc_sim::Result<ExitCode> {
    match cmd {
        Command::Run {
            common,
            channel,
            out,
            format,
        } => {
            let s = common.load()?;
            let mode = channel.unwrap_or(s.mode);
            let mut row = evaluate(&s, mode, &SolveCache::new())?;
            row.sweep_value = s.distance;
            print_row(&row);
            if let Some(dir) = out {
                for p in write_outputs(
                    std::slice::from_ref(&row),
                    "z (m)",
                    &[],
                    &dir,
                    &stem(&common.scenario),
                    format,
                )? {
                    eprintln!("wrote {}", p.display());
                }
            }
            Ok(if row.is_ok() {
                ExitCode::SUCCESS
            } else {
                eprintln!("solver did not converge: {}", row.status);
                ExitCode::from(2)
            })
        }
        Command::Sweep {
            common,
            sweep,
            out,
            format,
            no_cache,
        } => {
            let s = common.load()?;
            let specs = sweep
                .iter()
                .map(|p| load_sweep(p).map(|spec| (p, spec)))
                .collect::<rbc_sim::Result<Vec<_>>>()?;
            for (_, spec) in &specs {
                spec.check_against(&s)?;
            }
            let cache = SolveCache::new();
            for (path, spec) in &specs {
                let rows = run_sweep_with(&s, spec, (!no_cache).then_some(&cache))?;
                let failed = rows.iter().filter(|r| !r.is_ok()).count();
                for p in write_outputs(
                    &rows,
                    spec.variable.label(),
                    &spec.columns,
                    &out,
                    &stem(path),
                    format,
                )? {
                    eprintln!("wrote {}", p.display());
                }
                if failed > 0 {
                    eprintln!(
                        "{}: {failed} of {} points did not finish cleanly",
                        path.display(),
                        rows.len()
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario, sweep } => {
            let s = load_scenario(&scenario)?;
            print!("{s}");
            if let Some(path) = sweep {
                let spec = load_sweep(&path)?;
                spec.check_against(&s)?;
                println!(
                    "sweep           {} from {} to {} ({} points), channel {}",
                    spec.variable, spec.start, spec.stop, spec.count, spec.channel
                );
            }
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate { common } => {
            let s = common.load()?;
            let candidates: Vec<f64> = (50..=95).map(|k| k as f64 / 100.0).collect();
            let c = calibrate(&s, &Targets::default(), (0.0499, 0.04999), &candidates)?;
            println!("focal           {:.9} m", c.focal);
            println!("R_o             {}", c.r_o);
            println!("eta_e           {:.8}", c.eta_e);
            println!("shg beam radius {:.6e} m", c.shg_beam_radius);
            println!("doubled misfit  {:.3}", c.doubled_misfit);
            println!("eta direct/irs  {:.5} / {:.5}", c.eta_direct, c.eta_irs);
            println!("P_o direct/irs  {:.3} / {:.3} W", c.p_o_direct, c.p_o_irs);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
