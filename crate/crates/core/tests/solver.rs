use meshfd::assembly::{assemble_global, rhs_from_function, AssemblyOptions, GlobalLeastSquares};
use meshfd::atlas::{build_atlas, Atlas, AtlasParams};
use meshfd::geometry::{eigenfunction, fibonacci_nodes, HarmonicIndex, ManifoldDim};
use meshfd::kernels::{wendland_profile, zonal_from_radial, EllipticOperator};
use meshfd::solver::{block_residuals, lsq_dense_qr, lsq_normal_cg, solve_least_squares, SolveMethod, SolverOptions};
use meshfd::sparse::CsrMatrix;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sparse(rows: usize, cols: usize, seed: u64) -> CsrMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::new();
    for j in 0..cols {
        // A dominant entry per column keeps the matrix well conditioned and of full rank.
        t.push((j, j, 4.0 + rng.random_range(0.0..1.0)));
    }
    for _ in 0..rows * 4 {
        t.push((rng.random_range(0..rows), rng.random_range(0..cols), rng.random_range(-1.0..1.0)));
    }
    CsrMatrix::from_triplets(rows, cols, &t).unwrap()
}

fn pipeline(n: usize) -> GlobalLeastSquares<f64> {
    let dim = ManifoldDim::Sphere;
    let nodes = fibonacci_nodes::<f64>(n, dim).unwrap();
    let atlas = build_atlas(&nodes, &AtlasParams::defaults(dim)).unwrap();
    let op = EllipticOperator::new(1, 1.0, dim).unwrap();
    let psi = zonal_from_radial(&wendland_profile(3, 1.0).unwrap(), 3).unwrap();
    let y = eigenfunction::<f64>(dim, HarmonicIndex::Sphere { l: 2, m: 1 }).unwrap();
    let f = rhs_from_function(|x| op.symbol(y.eigenvalue()) * y.eval(x), &nodes).unwrap();
    assemble_global(&atlas, &nodes, &psi, &op, &f, &AssemblyOptions::default()).unwrap()
}

#[test]
fn random_sparse_systems_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let a = random_sparse(200, 100, 1);
    let f = DVector::from_fn(200, |_, _| rng.random_range(-1.0..1.0));
    let x = lsq_dense_qr(&a, &f).unwrap();
    let cg = lsq_normal_cg(&a, &f, 1e-12, 1000, false).unwrap();
    assert!(cg.converged);
    assert!((&x - &cg.solution).amax() <= 1e-8 * x.amax());
}

#[test]
fn pipeline_system_agrees_and_is_optimal() {
    let sys = pipeline(500);
    let qr = solve_least_squares(&sys, &SolverOptions { method: SolveMethod::DenseQr, ..Default::default() }).unwrap();
    let cg_opts = SolverOptions { rel_tol: 1e-12, ..Default::default() };
    let cg = solve_least_squares(&sys, &cg_opts).unwrap();
    assert!(cg.converged);
    let diff = (&qr.solution - &cg.solution).amax();
    assert!(diff <= 1e-8 * qr.solution.amax(), "difference {diff}");

    // Normal-equation residual at the converged iterate.
    let a = sys.matrix();
    let f = DVector::from_column_slice(sys.rhs());
    let at = a.transpose();
    let grad = at.mul_vec(&(a.mul_vec(&cg.solution) - &f)).norm();
    assert!(grad <= 1e-12 * at.mul_vec(&f).norm());

    // Block decomposition of the residual.
    let sum: f64 = cg.per_block_residuals.iter().map(|r| r * r).sum();
    assert!((sum - cg.residual_norm.powi(2)).abs() <= 1e-10 * sum);

    // No nearby point does better.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = qr.residual_norm;
    let step = 1e-3 * qr.solution.norm();
    for _ in 0..20 {
        let mut dir = DVector::from_fn(sys.ncols(), |_, _| rng.random_range(-1.0..1.0));
        dir /= dir.norm();
        let moved = (a.mul_vec(&(&qr.solution + dir * step)) - &f).norm();
        assert!(moved >= base - 1e-9 * f.norm());
    }
}

#[test]
fn square_system_is_solved_exactly() {
    let dim = ManifoldDim::Sphere;
    let nodes = fibonacci_nodes::<f64>(40, dim).unwrap();
    let atlas = Atlas::single_patch(&nodes);
    let op = EllipticOperator::new(1, 1.0, dim).unwrap();
    let psi = zonal_from_radial(&wendland_profile(3, 1.0).unwrap(), 3).unwrap();
    let f: Vec<f64> = (0..40).map(|j| (j as f64).sin()).collect();
    let sys = assemble_global(&atlas, &nodes, &psi, &op, &f, &AssemblyOptions::default()).unwrap();
    let rep = solve_least_squares(&sys, &SolverOptions { method: SolveMethod::DenseQr, ..Default::default() }).unwrap();
    let fnorm = DVector::from_vec(f).norm();
    assert!(rep.residual_norm <= 1e-10 * fnorm);
    assert!(rep.per_block_residuals.iter().all(|&r| r <= 1e-10 * fnorm));
}

#[test]
fn block_residuals_match_direct_recomputation() {
    let sys = pipeline(500);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = DVector::from_fn(sys.ncols(), |_, _| rng.random_range(-1.0..1.0));
    let blocks = block_residuals(&sys, &u).unwrap();
    let mut r = sys.rhs().iter().map(|v| -v).collect::<Vec<f64>>();
    for (i, j, v) in sys.matrix().triplets() {
        r[i] += v * u[j];
    }
    let direct: f64 = r.iter().map(|v| v * v).sum();
    let sum: f64 = blocks.iter().map(|b| b * b).sum();
    assert!((sum - direct).abs() <= 1e-12 * direct);
}

#[test]
fn solves_are_deterministic() {
    let sys = pipeline(500);
    for method in [SolveMethod::DenseQr, SolveMethod::NormalCg] {
        let opts = SolverOptions { method, ..Default::default() };
        let a = solve_least_squares(&sys, &opts).unwrap();
        let b = solve_least_squares(&sys, &opts).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.iterations, b.iterations);
    }
    let par = SolverOptions { parallel: true, ..Default::default() };
    let a = solve_least_squares(&sys, &par).unwrap();
    let b = solve_least_squares(&sys, &par).unwrap();
    assert_eq!(a.solution, b.solution);
}
