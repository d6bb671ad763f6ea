use rayon::prelude::*;
use serde::Serialize;

use super::polyfit::{ball_samples, determining_set_check_scaled, lebesgue_bound_at, DeterminingSet};
use super::{covering_number, Atlas, Patch};
use crate::error::{Error, Result};
use crate::geometry::{chart_map, NodeSet, SpherePoint};
use crate::kernels::{gram, ZonalProfile};
use crate::linalg::spd_condition;
use crate::scalar::Real;

/// Sampled polynomial-reproduction bound over the chart disk of `patch` for
/// the nodes `neighbor_indices` (typically an overlap `X_p ∩ X_ℓ`).
///
/// Each sample gives a certified upper bound on the Lebesgue function at that
/// point; the maximum over `sample_count` samples is a lower estimate of the
/// supremum of those upper bounds.
pub fn lebesgue_upper_bound<T: Real>(
    patch: &Patch<T>,
    nodes: &NodeSet<T>,
    neighbor_indices: &[usize],
    order: usize,
    sample_count: usize,
) -> Result<T> {
    if patch.is_global() {
        return Err(Error::Domain("the whole-sphere patch has no chart".into()));
    }
    let d = nodes.dim().d();
    let points = neighbor_indices
        .iter()
        .map(|&j| chart_map(patch.center(), nodes.point(j)))
        .collect::<Result<Vec<_>>>()?;
    lebesgue_bound_at(&points, d, order, &ball_samples(d, patch.radius(), sample_count))
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapReport {
    pub neighbor: usize,
    pub shared_nodes: usize,
    pub determining: DeterminingSet,
    /// Largest sampled ℓ¹ reproduction norm (an upper bound on the Lebesgue
    /// function at each sample); absent when the overlap is not determining.
    pub lebesgue_upper_bound_sampled: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatchReport {
    pub index: usize,
    pub n_local: usize,
    pub radius: f64,
    pub h: f64,
    /// Determining-set status of the whole patch; absent for the whole-sphere patch.
    pub determining: Option<DeterminingSet>,
    pub overlaps: Vec<OverlapReport>,
    /// Largest overlap bound, absent if any overlap fails.
    pub lebesgue_upper_bound_sampled: Option<f64>,
    /// 1-norm condition number of the local Gram matrix, when a kernel is
    /// supplied. Infinite if the Gram matrix is not numerically positive definite.
    pub gram_condition: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalReport {
    pub n: usize,
    pub m: usize,
    pub order: usize,
    pub h_a: f64,
    pub delta: f64,
    pub q: f64,
    pub mu: usize,
    pub nu: usize,
    /// Set when δ = 0: coincident nodes or a node on a cap boundary.
    pub degenerate_separation: bool,
    pub all_overlaps_determining: bool,
    pub max_lebesgue_upper_bound_sampled: Option<f64>,
    pub max_gram_condition: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub global: GlobalReport,
    pub patches: Vec<PatchReport>,
}

fn patch_report<T: Real>(
    atlas: &Atlas<T>,
    nodes: &NodeSet<T>,
    l: usize,
    order: usize,
    kernel: Option<&ZonalProfile<T>>,
) -> PatchReport {
    let p = atlas.patch(l);
    let d = nodes.dim().d();
    let determining = (!p.is_global()).then(|| determining_set_check_scaled(p.chart_points(), d, order, p.radius()));
    let mut overlaps = Vec::new();
    if !p.is_global() {
        let samples = ball_samples(d, p.radius(), super::DEFAULT_LEBESGUE_SAMPLES);
        for q in atlas.neighbors(l).into_iter().filter(|&q| q != l) {
            let shared = atlas.overlap(l, q);
            let points: Vec<_> = shared
                .iter()
                .map(|&j| p.chart_points()[p.indices().binary_search(&j).expect("shared node in patch")])
                .collect();
            let check = determining_set_check_scaled(&points, d, order, p.radius());
            let bound = if check.pass {
                lebesgue_bound_at(&points, d, order, &samples).ok().map(|b| b.as_f64())
            } else {
                None
            };
            overlaps.push(OverlapReport {
                neighbor: q,
                shared_nodes: shared.len(),
                determining: check,
                lebesgue_upper_bound_sampled: bound,
            });
        }
    }
    let lebesgue = overlaps
        .iter()
        .map(|o| o.lebesgue_upper_bound_sampled)
        .try_fold(None::<f64>, |acc, b| b.map(|b| Some(acc.map_or(b, |a: f64| a.max(b)))))
        .flatten();
    let gram_condition = kernel.map(|psi| {
        let pts: Vec<SpherePoint<T>> = p.indices().iter().map(|&j| *nodes.point(j)).collect();
        spd_condition(&gram(&pts, psi)).map_or(f64::INFINITY, |c| c.as_f64())
    });
    PatchReport {
        index: l,
        n_local: p.len(),
        radius: p.radius().as_f64(),
        h: p.diameter().as_f64(),
        determining,
        overlaps,
        lebesgue_upper_bound_sampled: lebesgue,
        gram_condition,
    }
}

/// Per-patch and global checks of the cover: patch sizes, determining sets of
/// every patch and overlap at `order`, sampled Lebesgue bounds, optional Gram
/// conditioning, and the atlas statistics. Failures are reported, not raised.
pub fn atlas_diagnostics<T: Real>(
    atlas: &Atlas<T>,
    nodes: &NodeSet<T>,
    order: usize,
    kernel: Option<&ZonalProfile<T>>,
) -> DiagnosticsReport {
    let patches: Vec<PatchReport> = (0..atlas.len())
        .into_par_iter()
        .map(|l| patch_report(atlas, nodes, l, order, kernel))
        .collect();
    let s = atlas.stats();
    let all_overlaps_determining = patches.iter().all(|p| p.overlaps.iter().all(|o| o.determining.pass));
    let max_lebesgue = if patches.iter().all(|p| p.is_global_or_bounded()) {
        patches.iter().filter_map(|p| p.lebesgue_upper_bound_sampled).reduce(f64::max)
    } else {
        None
    };
    let max_gram_condition = patches.iter().filter_map(|p| p.gram_condition).reduce(f64::max);
    DiagnosticsReport {
        global: GlobalReport {
            n: nodes.len(),
            m: atlas.len(),
            order,
            h_a: s.h.as_f64(),
            delta: s.separation.as_f64(),
            q: s.quasi_uniformity.as_f64(),
            mu: covering_number(atlas),
            nu: s.max_patch_size,
            degenerate_separation: s.separation <= T::zero(),
            all_overlaps_determining,
            max_lebesgue_upper_bound_sampled: max_lebesgue,
            max_gram_condition,
        },
        patches,
    }
}

impl PatchReport {
    fn is_global_or_bounded(&self) -> bool {
        self.determining.is_none() || self.lebesgue_upper_bound_sampled.is_some()
    }
}
