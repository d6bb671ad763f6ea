//! Command-line front end: `solve`, `converge` and `diagnose`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use meshfd::atlas::{atlas_diagnostics, DiagnosticsReport};
use meshfd::solver::SolveMethod;

use crate::config::ExperimentConfig;
use crate::convergence::{convergence_study, records_to_csv, ConvergenceRecord};
use crate::error::HarnessError;
use crate::output::write_atomic;
use crate::pipeline::{build_cover, build_kernel, build_nodes, run_solve, ResultBundle};

#[derive(Debug, Parser)]
#[command(name = "meshfd", version, about = "Kernel-based finite differences on spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the manufactured problem once and write results.json.
    Solve(RunArgs),
    /// Sweep the node counts of `convergence.n` and write convergence.csv.
    Converge(RunArgs),
    /// Build the atlas only and report its diagnostics.
    Diagnose(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// dense-qr or normal-cg.
    #[arg(long, value_parser = parse_method)]
    pub solver: Option<SolveMethod>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Seed for random node sets.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    pub print_config: bool,
}

fn parse_method(s: &str) -> Result<SolveMethod, String> {
    s.parse().map_err(|e: meshfd::Error| e.to_string())
}

impl RunArgs {
    fn effective_config(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None if self.print_config => ExperimentConfig::default(),
            None => return Err(HarnessError::Usage("--config <FILE> is required".into())),
        };
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        if let Some(m) = self.solver {
            cfg.solver.method = m;
        }
        if let Some(t) = self.tol {
            cfg.solver.tol = t;
        }
        if let Some(k) = self.max_iter {
            cfg.solver.max_iter = k;
        }
        if let Some(s) = self.seed {
            cfg.nodes.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code: 0 on success, 1 on a pipeline error,
/// 2 on a usage error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let (args, kind) = match &command {
        Command::Solve(a) => (a, "solve"),
        Command::Converge(a) => (a, "converge"),
        Command::Diagnose(a) => (a, "diagnose"),
    };
    let cfg = args.effective_config()?;
    if args.print_config {
        write!(stdout, "{}", cfg.to_toml())?;
        return Ok(());
    }
    match kind {
        "solve" => solve(&cfg, stdout),
        "converge" => converge(&cfg, stdout),
        _ => diagnose(&cfg, stdout),
    }
}

fn solve(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let run = run_solve(cfg)?;
    let dir = &cfg.output.dir;
    write_json(&dir.join("results.json"), &ResultBundle::new(cfg, &run))?;
    write_json(&dir.join("diagnostics.json"), &run.diagnostics)?;
    let r = &run.solved.report;
    writeln!(stdout, "n          {}", run.nodes.len())?;
    writeln!(stdout, "patches    {}", run.solved.atlas.len())?;
    writeln!(stdout, "h_A        {:.6e}", run.h_a())?;
    writeln!(stdout, "max error  {:.6e}", run.max_error)?;
    writeln!(stdout, "rms error  {:.6e}", run.rms_error)?;
    writeln!(stdout, "residual   {:.6e}", r.residual_norm)?;
    writeln!(stdout, "solver     {} ({} iterations, converged: {})", r.method, r.iterations, r.converged)?;
    writeln!(stdout, "wrote      {}", dir.join("results.json").display())?;
    Ok(())
}

#[derive(serde::Serialize)]
struct ConvergenceBundle<'a> {
    config: &'a ExperimentConfig,
    records: &'a [ConvergenceRecord],
    error: Option<String>,
}

fn converge(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let study = convergence_study(cfg, &cfg.convergence.n);
    let dir = &cfg.output.dir;
    let csv = records_to_csv(&study.records);
    write_atomic(&dir.join("convergence.csv"), csv.as_bytes())?;
    let bundle = ConvergenceBundle {
        config: cfg,
        records: &study.records,
        error: study.error.as_ref().map(|e| e.to_string()),
    };
    write_json(&dir.join("results.json"), &bundle)?;
    write!(stdout, "{csv}")?;
    match study.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn diagnose(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let nodes = build_nodes(cfg)?;
    let psi = build_kernel(cfg)?;
    let atlas = build_cover(cfg, &nodes)?;
    let report = atlas_diagnostics(&atlas, &nodes, cfg.atlas.order, Some(&psi));
    write_json(&cfg.output.dir.join("diagnostics.json"), &report)?;
    render_table(&report, stdout)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3e}"))
}

fn render_table(report: &DiagnosticsReport, out: &mut dyn Write) -> std::io::Result<()> {
    let g = &report.global;
    writeln!(out, "n={} m={} order={} h_A={:.4e} delta={:.4e} q={:.1} mu={} nu={}", g.n, g.m, g.order, g.h_a, g.delta, g.q, g.mu, g.nu)?;
    writeln!(
        out,
        "all overlaps determining: {}  max Lebesgue bound: {}  max Gram condition: {}",
        g.all_overlaps_determining,
        fmt_opt(g.max_lebesgue_upper_bound_sampled),
        fmt_opt(g.max_gram_condition)
    )?;
    writeln!(out, "{:>6} {:>6} {:>10} {:>10} {:>5} {:>9} {:>10} {:>10}", "patch", "n_l", "radius", "h_l", "det", "overlaps", "lebesgue", "cond")?;
    for p in &report.patches {
        let det = p.determining.as_ref().map_or("-", |d| if d.pass { "yes" } else { "no" });
        let failing = p.overlaps.iter().filter(|o| !o.determining.pass).count();
        writeln!(
            out,
            "{:>6} {:>6} {:>10.4e} {:>10.4e} {:>5} {:>9} {:>10} {:>10}",
            p.index,
            p.n_local,
            p.radius,
            p.h,
            det,
            format!("{}/{}", p.overlaps.len() - failing, p.overlaps.len()),
            fmt_opt(p.lebesgue_upper_bound_sampled),
            fmt_opt(p.gram_condition)
        )?;
    }
    Ok(())
}

fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())?;
    Ok(())
}
