//! Nodes → atlas → assembly → least-squares solve.

use meshfd::assembly::{assemble_global, rhs_from_function, AssemblyOptions, GlobalLeastSquares};
use meshfd::atlas::{atlas_diagnostics, build_atlas, Atlas, DiagnosticsReport};
use meshfd::geometry::{fibonacci_nodes, random_nodes, NodeSet};
use meshfd::kernels::{apply_operator, ZonalProfile};
use meshfd::solver::{solve_least_squares, SolveReport};
use serde::Serialize;

use crate::config::{ExperimentConfig, NodeKind};
use crate::error::{HarnessError, Stage, StageExt};
use crate::manufactured::manufactured_problem;

pub fn build_nodes(config: &ExperimentConfig) -> Result<NodeSet<f64>, HarnessError> {
    let dim = config.manifold()?;
    match config.nodes.kind {
        NodeKind::Fibonacci => fibonacci_nodes(config.nodes.n, dim),
        NodeKind::Random => random_nodes(config.nodes.n, dim, config.nodes.seed),
    }
    .stage(Stage::Nodes)
}

/// The zonal kernel of the configuration, checked against the operator order.
pub fn build_kernel(config: &ExperimentConfig) -> Result<ZonalProfile<f64>, HarnessError> {
    let phi = config.radial_profile().stage(Stage::Kernel)?;
    let psi = ZonalProfile::from_radial(&phi);
    let op = config.operator().stage(Stage::Kernel)?;
    apply_operator(&psi, &op).stage(Stage::Kernel)?;
    Ok(psi)
}

pub fn build_cover(config: &ExperimentConfig, nodes: &NodeSet<f64>) -> Result<Atlas<f64>, HarnessError> {
    build_atlas(nodes, &config.atlas_params()).stage(Stage::Atlas)
}

/// Assembled system and its least-squares solution.
#[derive(Debug, Clone)]
pub struct Solved {
    pub atlas: Atlas<f64>,
    pub system: GlobalLeastSquares<f64>,
    pub report: SolveReport<f64>,
}

/// Runs atlas construction, assembly and the solve for given right-hand side
/// values at the nodes.
pub fn solve_with_rhs(config: &ExperimentConfig, nodes: &NodeSet<f64>, f_values: &[f64]) -> Result<Solved, HarnessError> {
    let psi = build_kernel(config)?;
    let atlas = build_cover(config, nodes)?;
    solve_on_atlas(config, nodes, atlas, &psi, f_values)
}

pub fn solve_on_atlas(
    config: &ExperimentConfig,
    nodes: &NodeSet<f64>,
    atlas: Atlas<f64>,
    psi: &ZonalProfile<f64>,
    f_values: &[f64],
) -> Result<Solved, HarnessError> {
    let op = config.operator().stage(Stage::Config)?;
    let system =
        assemble_global(&atlas, nodes, psi, &op, f_values, &AssemblyOptions::default()).stage(Stage::Assembly)?;
    let report = solve_least_squares(&system, &config.solver_options()).stage(Stage::Solve)?;
    Ok(Solved { atlas, system, report })
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub nodes: NodeSet<f64>,
    pub solved: Solved,
    /// `max_j |u(x_j) − û_j|`
    pub max_error: f64,
    pub rms_error: f64,
    pub diagnostics: DiagnosticsReport,
}

impl RunOutcome {
    pub fn h_a(&self) -> f64 {
        self.solved.atlas.stats().h
    }
}

/// Full manufactured-solution run for one configuration.
pub fn run_solve(config: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    config.validate()?;
    let problem = manufactured_problem(config)?;
    let nodes = build_nodes(config)?;
    let psi = build_kernel(config)?;
    let atlas = build_cover(config, &nodes)?;
    let f = rhs_from_function(|x| problem.f(x), &nodes).stage(Stage::Assembly)?;
    let solved = solve_on_atlas(config, &nodes, atlas, &psi, &f)?;
    let errors: Vec<f64> =
        nodes.points().iter().zip(solved.report.solution.iter()).map(|(x, u)| (problem.u(x) - u).abs()).collect();
    let max_error = errors.iter().cloned().fold(0.0, f64::max);
    let rms_error = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    let diagnostics = atlas_diagnostics(&solved.atlas, &nodes, config.atlas.order, Some(&psi));
    Ok(RunOutcome { nodes, solved, max_error, rms_error, diagnostics })
}

#[derive(Debug, Serialize)]
pub struct AtlasSummary {
    pub m: usize,
    pub h_a: f64,
    pub mu: usize,
    pub nu: usize,
    pub delta: f64,
    pub q: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub method: String,
    pub converged: bool,
    pub iterations: usize,
    pub residual_norm: f64,
    pub per_block_residuals: Vec<f64>,
    pub rows: usize,
    pub nnz: usize,
    pub max_patch_condition: f64,
}

/// Serializable record of one run.
#[derive(Debug, Serialize)]
pub struct ResultBundle<'a> {
    pub config: &'a ExperimentConfig,
    pub n: usize,
    pub max_node_error: f64,
    pub rms_node_error: f64,
    pub atlas: AtlasSummary,
    pub solve: SolveSummary,
    pub solution: Vec<f64>,
}

impl<'a> ResultBundle<'a> {
    pub fn new(config: &'a ExperimentConfig, run: &RunOutcome) -> Self {
        let s = run.solved.atlas.stats();
        let r = &run.solved.report;
        ResultBundle {
            config,
            n: run.nodes.len(),
            max_node_error: run.max_error,
            rms_node_error: run.rms_error,
            atlas: AtlasSummary {
                m: run.solved.atlas.len(),
                h_a: s.h,
                mu: s.covering,
                nu: s.max_patch_size,
                delta: s.separation,
                q: s.quasi_uniformity,
            },
            solve: SolveSummary {
                method: r.method.to_string(),
                converged: r.converged,
                iterations: r.iterations,
                residual_norm: r.residual_norm,
                per_block_residuals: r.per_block_residuals.clone(),
                rows: run.solved.system.nrows(),
                nnz: run.solved.system.matrix().nnz(),
                max_patch_condition: run.solved.system.conditions().iter().cloned().fold(0.0, f64::max),
            },
            solution: r.solution.iter().cloned().collect(),
        }
    }
}
