use meshfd::atlas::{
    atlas_diagnostics, build_atlas, covering_number, determining_set_check, lebesgue_upper_bound, Atlas, AtlasParams,
};
use meshfd::geometry::{chart_map, fibonacci_nodes, geodesic_distance, random_nodes, ManifoldDim, NodeSet, SpherePoint};

fn brute_force_covering(atlas: &Atlas<f64>) -> usize {
    let ps = atlas.patches();
    let mut best = 0;
    for a in ps {
        let mut count = 0;
        for b in ps {
            if geodesic_distance(a.center(), b.center()) < a.radius() + b.radius() {
                count += 1;
            }
        }
        best = best.max(count);
    }
    best
}

fn sphere_fixture(n: usize) -> (NodeSet<f64>, Atlas<f64>) {
    let nodes = fibonacci_nodes(n, ManifoldDim::Sphere).unwrap();
    let atlas = build_atlas(&nodes, &AtlasParams { patch_size: 30, overlap: 1.5, order: 4 }).unwrap();
    (nodes, atlas)
}

#[test]
fn fibonacci_2000_cover() {
    let (nodes, atlas) = sphere_fixture(2000);
    let mut count = vec![0usize; nodes.len()];
    for p in atlas.patches() {
        for (j, x) in nodes.points().iter().enumerate() {
            let inside = geodesic_distance(p.center(), x) <= p.radius();
            assert_eq!(inside, p.contains(j));
            count[j] += inside as usize;
        }
    }
    // Caps sized by the equal-area radius keep μ small; double coverage of
    // every node would need caps large enough to push μ past 12.
    assert!(count.iter().all(|&c| c >= 1));
    assert!(count.iter().filter(|&&c| c >= 2).count() > nodes.len() * 9 / 10);
    let mu = covering_number(&atlas);
    assert_eq!(mu, brute_force_covering(&atlas));
    assert!(mu <= 12, "covering number {mu}");
}

#[test]
fn fibonacci_2000_diagnostics_match_recomputation() {
    let (nodes, atlas) = sphere_fixture(2000);
    let report = atlas_diagnostics(&atlas, &nodes, 4, None);
    assert_eq!(report.global.mu, covering_number(&atlas));
    assert!(report.global.delta > 0.0 && !report.global.degenerate_separation);
    for pr in &report.patches {
        let p = atlas.patch(pr.index);
        assert!(pr.determining.unwrap().pass);
        for o in &pr.overlaps {
            let q = atlas.patch(o.neighbor);
            let shared: Vec<usize> = (0..nodes.len())
                .filter(|&j| {
                    let x = nodes.point(j);
                    geodesic_distance(p.center(), x) <= p.radius() && geodesic_distance(q.center(), x) <= q.radius()
                })
                .collect();
            assert_eq!(o.shared_nodes, shared.len());
            let pts: Vec<Vec<f64>> =
                shared.iter().map(|&j| chart_map(p.center(), nodes.point(j)).unwrap().as_slice().to_vec()).collect();
            assert_eq!(o.determining.pass, determining_set_check(&pts, 2, 4).pass);
            if let Some(b) = o.lebesgue_upper_bound_sampled {
                assert!(b >= 1.0);
            }
        }
    }
}

#[test]
fn separation_is_bounded_by_patch_chart_distances() {
    let nodes = random_nodes::<f64>(1500, ManifoldDim::Sphere, 11).unwrap();
    let atlas = build_atlas(&nodes, &AtlasParams::defaults(ManifoldDim::Sphere)).unwrap();
    let s = atlas.stats();
    for p in atlas.patches() {
        let pts = p.chart_points();
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                assert!(s.separation <= pts[a].distance(&pts[b]) / 2.0);
            }
        }
    }
    assert!(s.quasi_uniformity >= 1.0);
}

/// Frozen bounds for Fibonacci nodes with ν* = 30, β = 1.5.
#[test]
fn statistics_scale_with_node_count() {
    let mut prev: Option<f64> = None;
    for n in [500, 2000, 8000] {
        let (_, atlas) = sphere_fixture(n);
        let s = *atlas.stats();
        let mu = covering_number(&atlas);
        if let Some(h) = prev {
            let ratio = h / s.h;
            assert!((1.6..=2.4).contains(&ratio), "h ratio {ratio}");
        }
        prev = Some(s.h);
        assert!(mu <= 12);
        assert!(s.max_patch_size <= 90);
        assert!(s.quasi_uniformity <= 1000.0);
    }
}

#[test]
fn single_patch_diagnostics() {
    let nodes = fibonacci_nodes::<f64>(4, ManifoldDim::Circle).unwrap();
    let atlas = build_atlas(&nodes, &AtlasParams { patch_size: 4, overlap: 2.0, order: 4 }).unwrap();
    let report = atlas_diagnostics(&atlas, &nodes, 4, None);
    assert_eq!(report.global.mu, 1);
    assert_eq!(report.patches.len(), 1);
    assert_eq!(report.patches[0].n_local, 4);
}

#[test]
fn duplicate_nodes_give_zero_separation() {
    let p = SpherePoint::new(ManifoldDim::Sphere, &[0.0, 0.0, 1.0]).unwrap();
    let q = SpherePoint::new(ManifoldDim::Sphere, &[1.0, 0.0, 0.0]).unwrap();
    let nodes = NodeSet::new_unchecked(ManifoldDim::Sphere, vec![p, p, q], None).unwrap();
    let atlas = Atlas::single_patch(&nodes);
    let report = atlas_diagnostics(&atlas, &nodes, 2, None);
    assert_eq!(report.global.delta, 0.0);
    assert!(report.global.degenerate_separation);
}

#[test]
fn lebesgue_bounds_never_below_one() {
    let (nodes, atlas) = sphere_fixture(800);
    for l in 0..atlas.len() {
        for q in atlas.neighbors(l) {
            let shared = atlas.overlap(l, q);
            if let Ok(b) = lebesgue_upper_bound(atlas.patch(l), &nodes, &shared, 2, 64) {
                assert!(b >= 1.0 - 1e-12);
            }
        }
    }
}
