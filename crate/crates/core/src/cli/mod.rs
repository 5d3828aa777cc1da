//! The `ruler` command line: scenario configuration, artifacts and verification.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage or configuration error,
//! 3 numerical non-convergence (truncation or aliasing).

pub mod config;
pub mod output;
pub mod spec;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::coherence::{
    coherence_report, default_directions, gamma_mixed_with, marginal_gamma, prob_mixed,
};
use crate::error::{Error, Result};
use crate::fock::MixedState;
use config::{Figure, OutputKind, RouteArg, ScenarioConfig, Suite};
use output::{field_table, figure1_data, figure2_data, figure2_table, num, write_file, Table};
use spec::StateSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ruler",
    version,
    about = "Phase-space coherence and outcome statistics of displacement rulers",
    after_help = "State specs: vacuum | number:<n> | squeezed:<lambda> | mix:<w1>*<spec1>,<w2>*<spec2>\n\
                  Tolerances: --tolerance.<name> <value> (e.g. --tolerance.theorem 1e-4)\n\
                  Without a subcommand the `outputs` listed in the config file are produced."
)]
struct Cli {
    /// Probe state
    #[arg(long, global = true)]
    probe: Option<StateSpec>,
    /// Tick state (`Π₀ = ρ/π`)
    #[arg(long, global = true)]
    tick: Option<StateSpec>,
    /// Half-width L of the square phase-space grid
    #[arg(long, global = true)]
    grid_extent: Option<f64>,
    /// Samples M per axis (even)
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Fock cutoff N
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Scenario file (TOML); flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mutual coherence function on the grid (gamma.csv)
    Gamma {
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
    },
    /// Outcome statistics p(mu) on the grid (prob.csv)
    Prob,
    /// Coherence time, resolution and route diagnostics (metrics.json)
    Metrics,
    /// Gamma integrated over tau_y (marginal.csv)
    Marginal,
    /// Run a verification suite (verify_<suite>.json)
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
    },
    /// Plot-ready figure data (figure1.csv, figure2.csv)
    Figures {
        #[arg(long, value_enum)]
        which: Option<Figure>,
    },
}

/// Splits `--tolerance.<name> <value>` and `--tolerance.<name>=<value>` off the argument list.
fn extract_tolerances(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, f64)>)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tolerance.") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::input(format!("--tolerance.{spec} needs a value")))?;
                (spec.to_string(), v)
            }
        };
        let value: f64 = value
            .parse()
            .map_err(|_| Error::input(format!("--tolerance.{name}: `{value}` is not a number")))?;
        tols.push((name, value));
    }
    Ok((rest, tols))
}

fn build_config(cli: &Cli, tols: &[(String, f64)]) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(p) = &cli.probe {
        cfg.probe = p.clone();
    }
    if let Some(t) = &cli.tick {
        cfg.tick = t.clone();
    }
    if let Some(e) = cli.grid_extent {
        cfg.grid.extent = e;
    }
    if let Some(m) = cli.grid_points {
        cfg.grid.points = m;
    }
    if let Some(n) = cli.cutoff {
        cfg.cutoff = n;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    for (name, v) in tols {
        cfg.tolerance.set(name, *v)?;
    }
    match &cli.command {
        Some(Command::Gamma { route: Some(r) }) => cfg.route = *r,
        Some(Command::Verify { suite: Some(s) }) => cfg.suite = *s,
        Some(Command::Figures { which: Some(w) }) => cfg.figures = *w,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args` (program name first), runs the requested work and returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let (args, tols) = match extract_tolerances(args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match build_config(&cli, &tols) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let tasks: Vec<OutputKind> = match &cli.command {
        Some(Command::Gamma { .. }) => vec![OutputKind::Gamma],
        Some(Command::Prob) => vec![OutputKind::Prob],
        Some(Command::Metrics) => vec![OutputKind::Metrics],
        Some(Command::Marginal) => vec![OutputKind::Marginal],
        Some(Command::Verify { .. }) => vec![OutputKind::Verify],
        Some(Command::Figures { .. }) => vec![OutputKind::Figures],
        None => cfg.outputs.clone(),
    };
    if tasks.is_empty() {
        eprintln!("error: nothing to do; give a subcommand or list `outputs` in the config file (see --help)");
        return EXIT_USAGE;
    }

    let mut code = EXIT_OK;
    for task in tasks {
        match execute(task, &cfg) {
            Ok(true) => {}
            Ok(false) => code = EXIT_VERIFY,
            Err(e) => {
                eprintln!("error: {e}");
                return if e.is_numerical() {
                    EXIT_NUMERICAL
                } else {
                    EXIT_USAGE
                };
            }
        }
    }
    code
}

fn states(cfg: &ScenarioConfig) -> Result<(MixedState, MixedState)> {
    Ok((cfg.probe.state(cfg.cutoff)?, cfg.tick.state(cfg.cutoff)?))
}

fn artifact(cfg: &ScenarioConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

/// Returns `Ok(false)` when a verification suite fails.
fn execute(task: OutputKind, cfg: &ScenarioConfig) -> Result<bool> {
    let grid = cfg.grid()?;
    match task {
        OutputKind::Gamma => {
            let (rho, tick) = states(cfg)?;
            let g = gamma_mixed_with(&rho, &tick, &grid, cfg.route.into())?;
            let path = artifact(cfg, "gamma.csv");
            field_table(
                &g,
                cfg.cutoff,
                vec!["tau_x", "tau_y", "re_gamma", "im_gamma"],
            )
            .write(&path)?;
            announce(&path);
        }
        OutputKind::Prob => {
            let (rho, tick) = states(cfg)?;
            let p = prob_mixed(&rho, &tick, &grid)?;
            let mut t = Table::for_grid(cfg.cutoff, &grid, vec!["mu_x", "mu_y", "p"]);
            let m = grid.points();
            for ix in 0..m {
                for iy in 0..m {
                    t.rows.push(vec![
                        num(grid.coord(ix)),
                        num(grid.coord(iy)),
                        num(p.at(ix, iy).re),
                    ]);
                }
            }
            let path = artifact(cfg, "prob.csv");
            t.write(&path)?;
            announce(&path);
        }
        OutputKind::Metrics => {
            let (rho, tick) = states(cfg)?;
            let rep = coherence_report(&rho, &tick, &grid, &default_directions())?;
            let path = artifact(cfg, "metrics.json");
            write_file(
                &path,
                &(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"),
            )?;
            print_metrics(cfg, &rep);
            announce(&path);
        }
        OutputKind::Marginal => {
            let (rho, tick) = states(cfg)?;
            let g = gamma_mixed_with(&rho, &tick, &grid, cfg.route.into())?;
            let marg = marginal_gamma(&g)?;
            let mut t = Table::for_grid(
                cfg.cutoff,
                &grid,
                vec!["tau_x", "re_gamma_marginal", "im_gamma_marginal"],
            );
            for (i, v) in marg.iter().enumerate() {
                t.rows.push(vec![num(grid.coord(i)), num(v.re), num(v.im)]);
            }
            let path = artifact(cfg, "marginal.csv");
            t.write(&path)?;
            announce(&path);
        }
        OutputKind::Verify => {
            let rep = verify::run_suite(cfg.suite, cfg)?;
            let mut stdout = std::io::stdout().lock();
            for c in &rep.checks {
                let _ = writeln!(
                    stdout,
                    "{} {:<40} {:>12.4e} (bound {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.bound
                );
            }
            let failed = rep.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(stdout, "{} checks, {} failed", rep.checks.len(), failed);
            drop(stdout);
            let name = serde_json::to_value(cfg.suite).expect("suite serializes");
            let path = artifact(
                cfg,
                &format!("verify_{}.json", name.as_str().unwrap_or("suite")),
            );
            write_file(
                &path,
                &(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"),
            )?;
            announce(&path);
            return Ok(rep.passed);
        }
        OutputKind::Figures => {
            if matches!(cfg.figures, Figure::One | Figure::All) {
                let fig = figure1_data(&grid, cfg.cutoff)?;
                let path = artifact(cfg, "figure1.csv");
                fig.table(cfg.cutoff).write(&path)?;
                announce(&path);
            }
            if matches!(cfg.figures, Figure::Two | Figure::All) {
                let rows = figure2_data(8, cfg.cutoff)?;
                let path = artifact(cfg, "figure2.csv");
                figure2_table(&rows, cfg.cutoff).write(&path)?;
                announce(&path);
            }
        }
    }
    Ok(true)
}

fn print_metrics(cfg: &ScenarioConfig, r: &crate::coherence::CoherenceReport) {
    let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.6e}"));
    println!(
        "probe {}  tick {}  cutoff {}  grid L={} M={}",
        cfg.probe,
        cfg.tick,
        r.cutoff,
        r.grid.extent(),
        r.grid.points()
    );
    println!("{:<34} {:>14}", "metric", "value");
    println!("{:<34} {:>14.6e}", "tau_c (characteristic route)", r.tau_c);
    println!("{:<34} {:>14.6e}", "tau_c (wigner route)", r.tau_c_wigner);
    println!("{:<34} {:>14.6e}", "delta_beta", r.delta_beta);
    println!(
        "{:<34} {:>14.6e}",
        "tau_c * delta_beta * pi^2",
        r.product * std::f64::consts::PI.powi(2)
    );
    println!("{:<34} {:>14.6e}", "integral of p", r.normalization);
    println!(
        "{:<34} {:>14.6e}",
        "max |gamma_wigner - gamma_char|", r.gamma_route_gap
    );
    println!(
        "{:<34} {:>14}",
        "max |p_direct - FT[gamma]|",
        opt(r.theorem_gap)
    );
    println!(
        "{:<34} {:>14}",
        "max |p - pi gamma|",
        opt(r.proportionality_gap)
    );
    for d in &r.directional {
        println!(
            "{:<34} {:>14.6e}   (2/pi) n^T C n = {}   2 n^T C n / moment = {}",
            format!("T_c(n = [{:.3}, {:.3}])", d.n[0], d.n[1]),
            d.moment,
            opt(d.covariance_form),
            opt(d.unscaled_over_moment)
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn tolerance_flags_are_extracted() {
        let (rest, tols) = extract_tolerances(s(&[
            "ruler",
            "--tolerance.theorem",
            "1e-4",
            "verify",
            "--tolerance.shift=2e-6",
        ]))
        .unwrap();
        assert_eq!(rest, s(&["ruler", "verify"]));
        assert_eq!(
            tols,
            vec![("theorem".to_string(), 1e-4), ("shift".to_string(), 2e-6)]
        );
        assert!(extract_tolerances(s(&["ruler", "--tolerance.theorem"])).is_err());
        assert!(extract_tolerances(s(&["ruler", "--tolerance.theorem", "abc"])).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["ruler"]), EXIT_USAGE);
        assert_eq!(run(["ruler", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["ruler", "gamma", "--probe", "photon:3"]), EXIT_USAGE);
        assert_eq!(run(["ruler", "gamma", "--grid-points", "15"]), EXIT_USAGE);
        assert_eq!(
            run(["ruler", "verify", "--tolerance.nothing", "1"]),
            EXIT_USAGE
        );
        assert_eq!(run(["ruler", "--help"]), EXIT_OK);
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("s.toml");
        std::fs::write(
            &cfg_path,
            "probe = \"number:1\"\ncutoff = 30\n[grid]\npoints = 32\n",
        )
        .unwrap();
        let cli = Cli::try_parse_from(s(&[
            "ruler",
            "--config",
            cfg_path.to_str().unwrap(),
            "--cutoff",
            "40",
            "gamma",
            "--route",
            "wigner",
        ]))
        .unwrap();
        let cfg = build_config(&cli, &[("routes".into(), 1e-3)]).unwrap();
        assert_eq!(cfg.probe, StateSpec::Number(1));
        assert_eq!(cfg.cutoff, 40);
        assert_eq!(cfg.grid.points, 32);
        assert_eq!(cfg.route, RouteArg::Wigner);
        assert_eq!(cfg.tolerance.routes, 1e-3);
    }
}
