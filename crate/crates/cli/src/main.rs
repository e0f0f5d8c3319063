use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use cilab::harness::{run, Mode, RunConfig, Task};

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TaskArg {
    Init,
    Iterate,
    Galerkin,
    DemoNonuniqueness,
    Diagnose,
    ScheduleReport,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Init => Task::Init,
            TaskArg::Iterate => Task::Iterate,
            TaskArg::Galerkin => Task::Galerkin,
            TaskArg::DemoNonuniqueness => Task::DemoNonuniqueness,
            TaskArg::Diagnose => Task::Diagnose,
            TaskArg::ScheduleReport => Task::ScheduleReport,
        }
    }
}

/// Convex-integration laboratory batch driver.
///
/// Exits with status 0 iff every asserted check passes, 1 if one fails and 2 on errors.
/// CI_LAB_THREADS caps the worker threads.
#[derive(Parser, Debug)]
#[command(name = "ci-lab", version)]
struct Cli {
    /// Pipeline to run; overrides `task` in the config file.
    task: TaskArg,
    #[arg(long)]
    config: PathBuf,
    /// Refuse infeasible schedules and assert every estimate.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    seed: Option<u64>,
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CI_LAB_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("CI_LAB_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("CI_LAB_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let mut cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    cfg.task = cli.task.into();
    if cli.strict {
        cfg.mode = Mode::Strict;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match run(&cfg) {
        Ok(summary) => {
            for c in &summary.check {
                let tag = match (c.pass, c.asserted) {
                    (true, _) => "ok  ",
                    (false, true) => "FAIL",
                    (false, false) => "warn",
                };
                println!("{tag} {:<44} {:>12.4e} (bound {:.4e})", c.name, c.value, c.bound);
            }
            for n in &summary.notes {
                println!("note: {n}");
            }
            println!("summary: {}", cfg.output_path(&cfg.output.summary).display());
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} asserted check(s) failed", summary.failed_asserted().len());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
