//! Convergence sweeps over node counts.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::pipeline::run_solve;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub h_a: f64,
    pub max_err: f64,
    pub rms_err: f64,
    pub residual: f64,
    /// Observed order against the previous row.
    pub est_order: Option<f64>,
    pub theory_order: f64,
}

pub const CSV_HEADER: &str = "n,h_A,max_err,rms_err,residual,est_order,theory_order";

/// `r₀ = max{0, ⌊d/2⌋ − 2κ + 1}`
pub fn r0(d: usize, kappa: u32) -> i64 {
    ((d / 2) as i64 - 2 * kappa as i64 + 1).max(0)
}

/// Exponent `s − 2κ − d − r₀` of the max-norm error bound.
pub fn theory_order(d: usize, kappa: u32, s: f64) -> f64 {
    s - 2.0 * kappa as f64 - d as f64 - r0(d, kappa) as f64
}

/// `log(e_prev / e) / log(h_prev / h)`
pub fn estimated_order(e_prev: f64, e: f64, h_prev: f64, h: f64) -> f64 {
    (e_prev / e).ln() / (h_prev / h).ln()
}

/// Records gathered so far and the error that stopped the sweep, if any.
#[derive(Debug)]
pub struct StudyOutcome {
    pub records: Vec<ConvergenceRecord>,
    pub error: Option<HarnessError>,
}

/// Runs the manufactured problem for each node count in `n_list`, keeping
/// every other setting of `base` fixed.
pub fn convergence_study(base: &ExperimentConfig, n_list: &[usize]) -> StudyOutcome {
    let mut records: Vec<ConvergenceRecord> = Vec::new();
    if n_list.len() < 2 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        let error = HarnessError::Usage("convergence.n: need at least two strictly increasing node counts".into());
        return StudyOutcome { records, error: Some(error) };
    }
    let theory = match base.radial_profile() {
        Ok(phi) => theory_order(base.dim, base.operator.kappa, phi.native_smoothness(meshfd_dim(base.dim))),
        Err(e) => return StudyOutcome { records, error: Some(HarnessError::Usage(format!("kernel: {e}"))) },
    };
    for &n in n_list {
        let mut cfg = base.clone();
        cfg.nodes.n = n;
        let run = match run_solve(&cfg) {
            Ok(r) => r,
            Err(e) => return StudyOutcome { records, error: Some(e) },
        };
        let h = run.h_a();
        let est_order = records.last().map(|p| estimated_order(p.max_err, run.max_error, p.h_a, h));
        records.push(ConvergenceRecord {
            n,
            h_a: h,
            max_err: run.max_error,
            rms_err: run.rms_error,
            residual: run.solved.report.residual_norm,
            est_order,
            theory_order: theory,
        });
    }
    StudyOutcome { records, error: None }
}

fn meshfd_dim(d: usize) -> meshfd::geometry::ManifoldDim {
    meshfd::geometry::ManifoldDim::new(d).unwrap_or(meshfd::geometry::ManifoldDim::Sphere)
}

pub fn records_to_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let est = r.est_order.map_or_else(String::new, |v| v.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.h_a, r.max_err, r.rms_err, r.residual, est, r.theory_order
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_errors_with_halving_h_is_first_order() {
        assert!((estimated_order(0.4, 0.2, 0.1, 0.05) - 1.0).abs() < 1e-15);
        assert!((estimated_order(1.0, 0.25, 2.0, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exponent_arithmetic() {
        assert_eq!(r0(2, 1), 0);
        assert_eq!(r0(1, 1), 0);
        assert_eq!(r0(3, 1), 0);
        assert_eq!(r0(2, 2), 0);
        assert_eq!(theory_order(2, 1, 6.0), 2.0);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            ConvergenceRecord { n: 10, h_a: 0.5, max_err: 0.1, rms_err: 0.05, residual: 1.0, est_order: None, theory_order: 0.5 },
            ConvergenceRecord { n: 40, h_a: 0.25, max_err: 0.05, rms_err: 0.02, residual: 2.0, est_order: Some(1.0), theory_order: 0.5 },
        ];
        assert_eq!(
            records_to_csv(&rows),
            "n,h_A,max_err,rms_err,residual,est_order,theory_order\n10,0.5,0.1,0.05,1,,0.5\n40,0.25,0.05,0.02,2,1,0.5\n"
        );
    }

    #[test]
    fn short_sweep_is_rejected() {
        let out = convergence_study(&ExperimentConfig::default(), &[100]);
        assert!(out.records.is_empty());
        assert_eq!(out.error.unwrap().exit_code(), 2);
    }
}
