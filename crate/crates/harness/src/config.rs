//! Experiment configuration, read from and written to TOML.

use std::path::{Path, PathBuf};

use meshfd::atlas::AtlasParams;
use meshfd::geometry::{HarmonicIndex, ManifoldDim, Trig};
use meshfd::kernels::{gaussian_profile, matern_profile, wendland_profile, EllipticOperator, RadialProfile};
use meshfd::solver::{SolveMethod, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Stage, StageExt};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Sphere dimension: 1 (circle) or 2.
    pub dim: usize,
    pub operator: OperatorSpec,
    pub kernel: KernelSpec,
    pub nodes: NodeSpec,
    pub atlas: AtlasSpec,
    pub solution: Vec<SolutionTerm>,
    pub solver: SolverSpec,
    pub convergence: ConvergenceSpec,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorSpec {
    pub kappa: u32,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Wendland { ell: u32, eps: f64 },
    Matern { nu: f64, eps: f64 },
    Gaussian { eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Fibonacci,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodeSpec {
    pub kind: NodeKind,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtlasSpec {
    pub patch_size: usize,
    pub overlap: f64,
    pub order: usize,
}

/// Harmonic order: an integer `m` on S², or `"cos"`/`"sin"` on S¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HarmonicOrder {
    Sphere(i32),
    Circle(Trig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionTerm {
    pub l: u32,
    pub m: HarmonicOrder,
    pub coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub method: SolveMethod,
    pub tol: f64,
    /// Iteration cap for normal-cg; 0 means ten times the number of unknowns.
    pub max_iter: usize,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceSpec {
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dim: 2,
            operator: OperatorSpec::default(),
            kernel: KernelSpec::Wendland { ell: 3, eps: 1.0 },
            nodes: NodeSpec::default(),
            atlas: AtlasSpec::default(),
            solution: vec![SolutionTerm { l: 2, m: HarmonicOrder::Sphere(1), coeff: 1.0 }],
            solver: SolverSpec::default(),
            convergence: ConvergenceSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

impl Default for OperatorSpec {
    fn default() -> Self {
        OperatorSpec { kappa: 1, alpha: 1.0 }
    }
}

impl Default for NodeSpec {
    fn default() -> Self {
        NodeSpec { kind: NodeKind::Fibonacci, n: 2000, seed: 0 }
    }
}

impl Default for AtlasSpec {
    fn default() -> Self {
        AtlasSpec { patch_size: 30, overlap: 1.5, order: 4 }
    }
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec { method: SolveMethod::NormalCg, tol: 1e-10, max_iter: 0, parallel: false }
    }
}

impl Default for ConvergenceSpec {
    fn default() -> Self {
        ConvergenceSpec { n: vec![500, 2000, 8000] }
    }
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: PathBuf::from("out") }
    }
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

impl ExperimentConfig {
    /// Parses TOML; unknown or mistyped keys are reported by name.
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| usage(format!("malformed config: {}", e.message().trim())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn manifold(&self) -> Result<ManifoldDim, HarnessError> {
        ManifoldDim::new(self.dim).map_err(|_| usage(format!("dim: expected 1 or 2, got {}", self.dim)))
    }

    /// Checks everything that can be checked without running the pipeline.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let dim = self.manifold()?;
        self.operator().map_err(|e| usage(format!("operator: {e}")))?;
        self.radial_profile().map_err(|e| usage(format!("kernel: {e}")))?;
        if self.nodes.n == 0 {
            return Err(usage("nodes.n: must be positive"));
        }
        if self.solution.is_empty() {
            return Err(usage("solution: at least one term is required"));
        }
        for (k, term) in self.solution.iter().enumerate() {
            let idx = term.index(dim).map_err(|e| usage(format!("solution[{k}]: {e}")))?;
            idx.validate().map_err(|e| usage(format!("solution[{k}]: {e}")))?;
            if !term.coeff.is_finite() {
                return Err(usage(format!("solution[{k}].coeff: must be finite")));
            }
        }
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) {
            return Err(usage("solver.tol: must lie in (0, 1)"));
        }
        if self.atlas.patch_size == 0 || self.atlas.order == 0 {
            return Err(usage("atlas: patch_size and order must be positive"));
        }
        if !(self.atlas.overlap > 1.0) {
            return Err(usage("atlas.overlap: must exceed 1"));
        }
        if self.convergence.n.windows(2).any(|w| w[0] >= w[1]) {
            return Err(usage("convergence.n: must be strictly increasing"));
        }
        Ok(())
    }

    pub fn operator(&self) -> meshfd::Result<EllipticOperator<f64>> {
        let dim = ManifoldDim::new(self.dim)?;
        EllipticOperator::new(self.operator.kappa, self.operator.alpha, dim)
    }

    pub fn radial_profile(&self) -> meshfd::Result<RadialProfile<f64>> {
        match self.kernel {
            KernelSpec::Wendland { ell, eps } => wendland_profile(ell, eps),
            KernelSpec::Matern { nu, eps } => matern_profile(nu, eps),
            KernelSpec::Gaussian { eps } => gaussian_profile(eps),
        }
    }

    pub fn atlas_params(&self) -> AtlasParams {
        AtlasParams { patch_size: self.atlas.patch_size, overlap: self.atlas.overlap, order: self.atlas.order }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            method: self.solver.method,
            rel_tol: self.solver.tol,
            max_iter: (self.solver.max_iter > 0).then_some(self.solver.max_iter),
            parallel: self.solver.parallel,
        }
    }

    /// Harmonic indices of the solution terms.
    pub fn harmonic_indices(&self) -> Result<Vec<HarmonicIndex>, HarnessError> {
        let dim = self.manifold()?;
        self.solution.iter().map(|t| t.index(dim).stage(Stage::Config)).collect()
    }
}

impl SolutionTerm {
    pub fn index(&self, dim: ManifoldDim) -> meshfd::Result<HarmonicIndex> {
        match (dim, self.m) {
            (ManifoldDim::Sphere, HarmonicOrder::Sphere(m)) => Ok(HarmonicIndex::Sphere { l: self.l, m }),
            (ManifoldDim::Circle, HarmonicOrder::Circle(trig)) => Ok(HarmonicIndex::Circle { l: self.l, trig }),
            (ManifoldDim::Sphere, HarmonicOrder::Circle(_)) => {
                Err(meshfd::Error::InvalidArgument("m must be an integer on S²".into()))
            }
            (ManifoldDim::Circle, HarmonicOrder::Sphere(_)) => {
                Err(meshfd::Error::InvalidArgument("m must be \"cos\" or \"sin\" on S¹".into()))
            }
        }
    }
}
