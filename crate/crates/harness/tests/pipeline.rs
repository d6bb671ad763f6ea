use meshfd::geometry::Trig;
use meshfd::kernels::{apply_operator, cross_gram};
use meshfd::solver::SolveMethod;
use meshfd_harness::config::{HarmonicOrder, KernelSpec, SolutionTerm};
use meshfd_harness::pipeline::{build_cover, build_kernel, build_nodes, solve_on_atlas, solve_with_rhs};
use meshfd_harness::{manufactured_problem, run_solve, ExperimentConfig};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle_cosine(n: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.dim = 1;
    cfg.nodes.n = n;
    cfg.solution = vec![SolutionTerm { l: 1, m: HarmonicOrder::Circle(Trig::Cos), coeff: 1.0 }];
    cfg
}

#[test]
fn four_nodes_on_circle_single_patch() {
    let mut cfg = circle_cosine(4);
    cfg.atlas.patch_size = 4;
    cfg.atlas.overlap = 2.0;
    // a flat Gaussian leaves almost no weight on the harmonics aliased onto cos θ
    cfg.kernel = KernelSpec::Gaussian { eps: 0.02 };
    cfg.solver.method = SolveMethod::DenseQr;
    let run = run_solve(&cfg).unwrap();
    assert_eq!(run.solved.atlas.len(), 1);
    assert_eq!(run.solved.system.nrows(), 4);
    assert!(run.max_error <= 1e-6, "max error {:e}", run.max_error);
}

#[test]
fn adding_zero_to_the_data_changes_nothing() {
    let mut cfg = ExperimentConfig::default();
    cfg.nodes.n = 400;
    let nodes = build_nodes(&cfg).unwrap();
    let p = manufactured_problem(&cfg).unwrap();
    let f: Vec<f64> = nodes.points().iter().map(|x| p.f(x)).collect();
    let g: Vec<f64> = f.iter().map(|v| v + 0.0).collect();
    let a = solve_with_rhs(&cfg, &nodes, &f).unwrap().report.solution;
    let b = solve_with_rhs(&cfg, &nodes, &g).unwrap().report.solution;
    assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));

    let r1 = run_solve(&cfg).unwrap();
    let r2 = run_solve(&cfg).unwrap();
    assert_eq!(r1.max_error.to_bits(), r2.max_error.to_bits());
}

/// Kernel sums whose centers are seen by every patch they touch are
/// reproduced exactly by the overdetermined system.
#[test]
fn exact_on_global_kernel_sums() {
    let mut cfg = ExperimentConfig::default();
    cfg.nodes.n = 500;
    let eps = 6.0;
    cfg.kernel = KernelSpec::Wendland { ell: 3, eps };
    let nodes = build_nodes(&cfg).unwrap();
    let atlas = build_cover(&cfg, &nodes).unwrap();
    let pts = nodes.points();
    // centers whose support meets only patches that contain them
    let support = 1.0 / eps;
    let centers: Vec<usize> = (0..nodes.len())
        .filter(|&k| {
            atlas.patches().iter().all(|p| {
                p.contains(k) || p.indices().iter().all(|&j| (pts[j].xyz() - pts[k].xyz()).norm() >= support)
            })
        })
        .collect();
    assert!(centers.len() >= 20, "only {} admissible centers", centers.len());

    let psi = build_kernel(&cfg).unwrap();
    let psi_l = apply_operator(&psi, &cfg.operator().unwrap()).unwrap();
    let cpts: Vec<_> = centers.iter().map(|&k| pts[k]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = DVector::from_fn(centers.len(), |_, _| rng.random_range(-1.0..1.0));
    let u = cross_gram(pts, &cpts, &psi) * &c;
    let f = cross_gram(pts, &cpts, &psi_l) * &c;

    cfg.solver.tol = 1e-13;
    let solved = solve_on_atlas(&cfg, &nodes, atlas, &psi, f.as_slice()).unwrap();
    let max_cond = solved.system.conditions().iter().cloned().fold(0.0, f64::max);
    let err = (&solved.report.solution - &u).amax();
    assert!(err <= 1e-8 * max_cond * u.amax(), "error {err:e}, max cond {max_cond:e}");
}

#[test]
fn stage_is_named_on_failure() {
    let mut cfg = ExperimentConfig::default();
    cfg.kernel = KernelSpec::Wendland { ell: 1, eps: 1.0 };
    let err = run_solve(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let msg = err.to_string();
    assert!(msg.starts_with("kernel stage failed") && msg.contains("smoothness"), "{msg}");
}

#[test]
fn sphere_solution_improves_with_refinement() {
    let mut cfg = ExperimentConfig::default();
    cfg.nodes.n = 300;
    let coarse = run_solve(&cfg).unwrap();
    cfg.nodes.n = 1200;
    let fine = run_solve(&cfg).unwrap();
    assert!(fine.max_error < coarse.max_error);
    assert!(fine.h_a() < coarse.h_a());
    assert!(coarse.rms_error <= coarse.max_error);
}
