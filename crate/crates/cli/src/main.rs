use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use narx_upso_cli::args::{Cli, Command};
use narx_upso_cli::commands::{cmd_generate, cmd_identify, cmd_report, cmd_sweep, cmd_validate};

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { system, n, seed, out } => {
            let (csv, json) = cmd_generate(&system, n, seed, out.as_deref())?;
            println!("{}\n{}", csv.display(), json.display());
        }
        Command::Identify(args) => {
            let cfg = args.resolve()?;
            let (dir, reports) = cmd_identify(&cfg, cli.workers)?;
            let best = narx_upso_cli::commands::best_run(&reports).expect("nonempty");
            println!("{}: J = {} [{}]", dir.join("summary.json").display(), best.criterion, best.best_terms.join(", "));
        }
        Command::Report { runs, truth, alpha, out } => {
            let r = cmd_report(&runs, truth.as_deref(), alpha, out.as_deref())?;
            if let Some(t) = r.outcomes {
                println!(
                    "exact {} over {} under1 {} under2 {}",
                    t.exact_fitting, t.over_fitting, t.under_fitting_1, t.under_fitting_2
                );
            }
        }
        Command::Sweep { run, u_f, rg, k } => {
            let mut cfg = run.resolve()?;
            if let Some(v) = u_f {
                cfg.sweep.u_f = v;
            }
            if let Some(v) = rg {
                cfg.sweep.rg = v;
            }
            if let Some(v) = k {
                cfg.sweep.k = v;
            }
            for row in cmd_sweep(&cfg, cli.workers)? {
                println!("u_f={} rg={} mean_J={}", row.u_f, row.rg, row.mean_j);
            }
        }
        Command::Validate { runs, max_lag, out } => {
            let report = cmd_validate(&runs, max_lag, out.as_deref())?;
            for s in &report.series {
                let verdict = if s.passes(report.band) { "pass" } else { "fail" };
                println!("{} {} ({} of {} lags outside ±{:.4})", s.test.label(), verdict, s.excursions(report.band), s.values.len(), report.band);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
