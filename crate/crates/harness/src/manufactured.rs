use meshfd::geometry::{eigenfunction, Eigenfunction, SpherePoint};
use meshfd::kernels::EllipticOperator;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Stage, StageExt};

/// `u = Σ c_k e_k` for eigenfunctions `e_k`, with the exact right-hand side
/// `f = L u = Σ c_k (λ_k + α)^κ e_k`.
#[derive(Debug, Clone)]
pub struct ManufacturedProblem {
    terms: Vec<(Eigenfunction<f64>, f64)>,
    op: EllipticOperator<f64>,
}

impl ManufacturedProblem {
    pub fn new(op: EllipticOperator<f64>, terms: Vec<(Eigenfunction<f64>, f64)>) -> Self {
        ManufacturedProblem { terms, op }
    }

    pub fn terms(&self) -> &[(Eigenfunction<f64>, f64)] {
        &self.terms
    }

    pub fn operator(&self) -> &EllipticOperator<f64> {
        &self.op
    }

    pub fn u(&self, x: &SpherePoint<f64>) -> f64 {
        self.terms.iter().map(|(e, c)| c * e.eval(x)).sum()
    }

    pub fn f(&self, x: &SpherePoint<f64>) -> f64 {
        self.terms.iter().map(|(e, c)| c * self.op.symbol(e.eigenvalue()) * e.eval(x)).sum()
    }
}

pub fn manufactured_problem(config: &ExperimentConfig) -> Result<ManufacturedProblem, HarnessError> {
    let dim = config.manifold()?;
    let op = config.operator().stage(Stage::Config)?;
    if config.solution.is_empty() {
        return Err(HarnessError::Usage("solution: at least one term is required".into()));
    }
    let terms = config
        .harmonic_indices()?
        .into_iter()
        .zip(&config.solution)
        .map(|(idx, t)| eigenfunction(dim, idx).map(|e| (e, t.coeff)))
        .collect::<meshfd::Result<Vec<_>>>()
        .stage(Stage::Config)?;
    Ok(ManufacturedProblem { terms, op })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{HarmonicOrder, SolutionTerm};
    use meshfd::geometry::{fibonacci_nodes, ManifoldDim, Trig};

    fn config(dim: usize, kappa: u32, alpha: f64, term: SolutionTerm) -> ExperimentConfig {
        let mut c = ExperimentConfig { dim, solution: vec![term], ..Default::default() };
        c.operator.kappa = kappa;
        c.operator.alpha = alpha;
        c
    }

    #[test]
    fn constant_solution() {
        let p = manufactured_problem(&config(2, 1, 1.0, SolutionTerm { l: 0, m: HarmonicOrder::Sphere(0), coeff: 2.0 }))
            .unwrap();
        let nodes = fibonacci_nodes::<f64>(10, ManifoldDim::Sphere).unwrap();
        for x in nodes.points() {
            assert!((p.f(x) - p.u(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn degree_one_on_sphere() {
        let p = manufactured_problem(&config(2, 1, 1.0, SolutionTerm { l: 1, m: HarmonicOrder::Sphere(0), coeff: 1.0 }))
            .unwrap();
        let nodes = fibonacci_nodes::<f64>(10, ManifoldDim::Sphere).unwrap();
        for x in nodes.points() {
            assert!((p.f(x) - 3.0 * p.u(x)).abs() < 1e-14);
            // Y₁⁰ = √(3/4π) z
            assert!((p.u(x) - (3.0 / (4.0 * std::f64::consts::PI)).sqrt() * x.coords()[2]).abs() < 1e-14);
        }
    }

    #[test]
    fn squared_operator_on_circle() {
        let term = SolutionTerm { l: 2, m: HarmonicOrder::Circle(Trig::Cos), coeff: 1.0 };
        let p = manufactured_problem(&config(1, 2, 0.5, term)).unwrap();
        let x = SpherePoint::from_angle(0.3);
        assert!((p.f(&x) - 20.25 * p.u(&x)).abs() < 1e-13);
    }
}
