//! Overlapping cap covers of a node set.

mod diagnostics;
mod polyfit;

pub use diagnostics::{atlas_diagnostics, lebesgue_upper_bound, DiagnosticsReport, GlobalReport, OverlapReport, PatchReport};
pub use polyfit::{
    ball_samples, determining_set_check, determining_set_check_scaled, lebesgue_bound_at, monomial_exponents,
    polynomial_space_dim, vandermonde, DeterminingSet, RANK_TOLERANCE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{chart_map, fibonacci_points, geodesic_distance, ChartPoint, ManifoldDim, NodeSet, SpherePoint};
use crate::scalar::Real;

/// Growth factor applied to a patch radius that is too small.
pub const RADIUS_GROWTH: f64 = 1.3;
/// Maximum number of radius growth steps per patch.
pub const MAX_GROWTH_STEPS: usize = 6;
/// Relative width of the band above an accepted radius searched for a gap
/// between node distances, so that no node sits right on a cap boundary.
pub const BOUNDARY_BAND: f64 = 0.05;
/// Default number of Lebesgue-function samples per chart disk.
pub const DEFAULT_LEBESGUE_SAMPLES: usize = 256;

/// Cap-cover construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtlasParams {
    /// Target number of nodes per patch.
    pub patch_size: usize,
    /// Overlap factor applied to the coarse fill-distance estimate, > 1.
    pub overlap: f64,
    /// Polynomial order enforced on each patch by the determining-set check.
    pub order: usize,
}

impl AtlasParams {
    pub fn defaults(dim: ManifoldDim) -> Self {
        let patch_size = match dim {
            ManifoldDim::Circle => 10,
            ManifoldDim::Sphere => 30,
        };
        AtlasParams { patch_size, overlap: 1.5, order: 4 }
    }
}

/// Geodesic cap with the nodes it contains and their chart images.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch<T: Real> {
    index: usize,
    center: SpherePoint<T>,
    radius: T,
    indices: Vec<usize>,
    chart_points: Vec<ChartPoint<T>>,
    global: bool,
}

impl<T: Real> Patch<T> {
    fn cap(index: usize, center: SpherePoint<T>, radius: T, nodes: &NodeSet<T>) -> Result<Self> {
        let indices: Vec<usize> = (0..nodes.len())
            .filter(|&j| geodesic_distance(&center, nodes.point(j)) <= radius)
            .collect();
        let chart_points = indices
            .iter()
            .map(|&j| chart_map(&center, nodes.point(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Patch { index, center, radius, indices, chart_points, global: false })
    }

    fn whole_sphere(nodes: &NodeSet<T>) -> Self {
        let center = *nodes.point(0);
        Patch {
            index: 0,
            center,
            radius: T::pi(),
            indices: (0..nodes.len()).collect(),
            chart_points: Vec::new(),
            global: true,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn center(&self) -> &SpherePoint<T> {
        &self.center
    }

    /// Geodesic radius; π for the single patch covering the whole sphere.
    pub fn radius(&self) -> T {
        self.radius
    }

    /// Sorted indices of the nodes inside the cap.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Chart images of the patch nodes, aligned with [`Patch::indices`].
    /// Empty for the whole-sphere patch, which has no single chart.
    pub fn chart_points(&self) -> &[ChartPoint<T>] {
        &self.chart_points
    }

    /// True for the single patch that covers the whole sphere.
    pub fn is_global(&self) -> bool {
        self.global
    }

    /// Diameter of the chart image, `2 · radius`.
    pub fn diameter(&self) -> T {
        self.radius + self.radius
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    /// Separation of the patch nodes: the smaller of the distance to the cap
    /// boundary and half the minimum pairwise chart distance.
    fn separation(&self, nodes: &NodeSet<T>) -> T {
        let two = T::lit(2.0);
        let mut best = T::max_value().unwrap_or_else(|| T::lit(f64::MAX));
        if self.global {
            for (a, &i) in self.indices.iter().enumerate() {
                for &j in &self.indices[a + 1..] {
                    best = best.min(geodesic_distance(nodes.point(i), nodes.point(j)) / two);
                }
            }
            return best;
        }
        for (a, p) in self.chart_points.iter().enumerate() {
            best = best.min(self.radius - p.norm());
            for q in &self.chart_points[a + 1..] {
                best = best.min(p.distance(q) / two);
            }
        }
        best.max(T::zero())
    }
}

/// Summary quantities of an atlas on a node set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtlasStats<T: Real> {
    /// Largest chart diameter h_A.
    pub h: T,
    /// Covering number μ_A.
    pub covering: usize,
    /// Largest patch size ν.
    pub max_patch_size: usize,
    /// Atlas separation δ; zero for coincident nodes or nodes on a cap boundary.
    pub separation: T,
    /// Quasi-uniformity ratio h_A / δ (infinite when δ = 0).
    pub quasi_uniformity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atlas<T: Real> {
    dim: ManifoldDim,
    node_count: usize,
    patches: Vec<Patch<T>>,
    stats: AtlasStats<T>,
}

impl<T: Real> Atlas<T> {
    /// One patch holding every node, for which the global system is square.
    pub fn single_patch(nodes: &NodeSet<T>) -> Self {
        Self::finish(nodes, vec![Patch::whole_sphere(nodes)])
    }

    /// Atlas from explicit caps. Every cap must contain a node and every node
    /// must be covered; radii lie in (0, π).
    pub fn from_caps(nodes: &NodeSet<T>, centers: &[SpherePoint<T>], radii: &[T]) -> Result<Self> {
        if centers.len() != radii.len() || centers.is_empty() {
            return Err(Error::invalid("need one radius per center and at least one cap"));
        }
        let mut patches = Vec::with_capacity(centers.len());
        for (l, (c, &r)) in centers.iter().zip(radii).enumerate() {
            if c.dim() != nodes.dim() {
                return Err(Error::invalid(format!("center {l} is on the wrong sphere")));
            }
            if !(r > T::zero() && r < T::pi()) {
                return Err(Error::AtlasConstruction { patch: l, reason: "radius outside (0, π)".into() });
            }
            let p = Patch::cap(l, *c, r, nodes)?;
            if p.is_empty() {
                return Err(Error::AtlasConstruction { patch: l, reason: "cap contains no node".into() });
            }
            patches.push(p);
        }
        check_coverage(nodes, &patches)?;
        Ok(Self::finish(nodes, patches))
    }

    fn finish(nodes: &NodeSet<T>, patches: Vec<Patch<T>>) -> Self {
        let h = patches.iter().map(|p| p.diameter()).fold(T::zero(), |a, b| a.max(b));
        let covering = covering_count(&patches);
        let max_patch_size = patches.iter().map(|p| p.len()).max().unwrap_or(0);
        let separation = patches
            .iter()
            .map(|p| p.separation(nodes))
            .fold(T::max_value().unwrap_or_else(|| T::lit(f64::MAX)), |a, b| a.min(b));
        let quasi_uniformity = if separation > T::zero() { h / separation } else { T::lit(f64::INFINITY) };
        Atlas {
            dim: nodes.dim(),
            node_count: nodes.len(),
            stats: AtlasStats { h, covering, max_patch_size, separation, quasi_uniformity },
            patches,
        }
    }

    pub fn dim(&self) -> ManifoldDim {
        self.dim
    }

    /// Number of nodes the atlas was built on.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn patches(&self) -> &[Patch<T>] {
        &self.patches
    }

    pub fn patch(&self, l: usize) -> &Patch<T> {
        &self.patches[l]
    }

    pub fn stats(&self) -> &AtlasStats<T> {
        &self.stats
    }

    /// Indices of the patches whose caps intersect patch `l`, including `l`.
    pub fn neighbors(&self, l: usize) -> Vec<usize> {
        let a = &self.patches[l];
        (0..self.patches.len()).filter(|&p| caps_intersect(a, &self.patches[p])).collect()
    }

    /// Sorted node indices shared by patches `l` and `p`.
    pub fn overlap(&self, l: usize, p: usize) -> Vec<usize> {
        let (a, b) = (&self.patches[l].indices, &self.patches[p].indices);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// For every node, the patches containing it.
    pub fn patches_of_nodes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count];
        for (l, p) in self.patches.iter().enumerate() {
            for &j in &p.indices {
                out[j].push(l);
            }
        }
        out
    }
}

fn caps_intersect<T: Real>(a: &Patch<T>, b: &Patch<T>) -> bool {
    a.global || b.global || geodesic_distance(&a.center, &b.center) < a.radius + b.radius
}

fn covering_count<T: Real>(patches: &[Patch<T>]) -> usize {
    patches
        .iter()
        .map(|a| patches.iter().filter(|b| caps_intersect(a, b)).count())
        .max()
        .unwrap_or(0)
}

/// Largest number of caps meeting any one cap, itself included.
pub fn covering_number<T: Real>(atlas: &Atlas<T>) -> usize {
    covering_count(&atlas.patches)
}

fn check_coverage<T: Real>(nodes: &NodeSet<T>, patches: &[Patch<T>]) -> Result<()> {
    let mut covered = vec![false; nodes.len()];
    for p in patches {
        for &j in &p.indices {
            covered[j] = true;
        }
    }
    let Some(j) = covered.iter().position(|c| !c) else {
        return Ok(());
    };
    // Blame the cap whose center is closest to the stray node.
    let x = nodes.point(j);
    let patch = (0..patches.len())
        .min_by(|&a, &b| {
            let da = geodesic_distance(&patches[a].center, x) - patches[a].radius;
            let db = geodesic_distance(&patches[b].center, x) - patches[b].radius;
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    Err(Error::AtlasConstruction { patch, reason: format!("node {j} is not covered by any patch") })
}

/// Covers `nodes` with `ceil(n / patch_size)` caps centered at Fibonacci
/// points. Each radius starts at `overlap · c_d · m^(-1/d)` (c₁ = π, c₂ = 2)
/// and grows by [`RADIUS_GROWTH`] until the cap holds `patch_size` nodes that
/// determine polynomials of order `params.order`.
pub fn build_atlas<T: Real>(nodes: &NodeSet<T>, params: &AtlasParams) -> Result<Atlas<T>> {
    let dim = nodes.dim();
    let d = dim.d();
    if params.order == 0 {
        return Err(Error::invalid("polynomial order must be at least 1"));
    }
    let needed = polynomial_space_dim(d, params.order);
    if params.patch_size < needed {
        return Err(Error::invalid(format!(
            "patch size {} is below the {needed} points needed for order {}",
            params.patch_size, params.order
        )));
    }
    if !(params.overlap > 1.0) || !params.overlap.is_finite() {
        return Err(Error::invalid(format!("overlap factor must exceed 1, got {}", params.overlap)));
    }
    let n = nodes.len();
    let m = n.div_ceil(params.patch_size);
    if m == 1 {
        return Ok(Atlas::single_patch(nodes));
    }
    let coarse = match dim {
        ManifoldDim::Circle => std::f64::consts::PI / m as f64,
        ManifoldDim::Sphere => 2.0 / (m as f64).sqrt(),
    };
    let r0 = T::lit(params.overlap * coarse);
    let limit = T::frac_pi_2();
    let centers: Vec<SpherePoint<T>> = fibonacci_points(m, dim);
    let mut patches = Vec::with_capacity(m);
    for (l, c) in centers.into_iter().enumerate() {
        let mut radius = r0;
        let mut step = 0;
        loop {
            if radius >= limit {
                return Err(Error::AtlasConstruction {
                    patch: l,
                    reason: format!("radius {:.4} reached the π/2 cap", radius.as_f64()),
                });
            }
            let p = Patch::cap(l, c, radius, nodes)?;
            let ok = p.len() >= params.patch_size
                && determining_set_check_scaled(&p.chart_points, d, params.order, radius).pass;
            if ok {
                let centered = boundary_in_gap(&c, nodes, radius);
                if centered >= limit {
                    patches.push(p);
                } else {
                    patches.push(Patch::cap(l, c, centered, nodes)?);
                }
                break;
            }
            if step == MAX_GROWTH_STEPS {
                return Err(Error::AtlasConstruction {
                    patch: l,
                    reason: format!(
                        "{} nodes after {MAX_GROWTH_STEPS} growth steps (need {} forming a determining set)",
                        p.len(),
                        params.patch_size
                    ),
                });
            }
            radius *= T::lit(RADIUS_GROWTH);
            step += 1;
        }
    }
    check_coverage(nodes, &patches)?;
    Ok(Atlas::finish(nodes, patches))
}

/// Moves a radius up to the middle of the widest gap between consecutive node
/// distances within `[radius, (1 + BOUNDARY_BAND) radius]`, counting the last
/// node inside and the first node beyond the band.
fn boundary_in_gap<T: Real>(center: &SpherePoint<T>, nodes: &NodeSet<T>, radius: T) -> T {
    let top = radius * T::lit(1.0 + BOUNDARY_BAND);
    let mut inside = T::zero();
    let mut beyond: Option<T> = None;
    let mut band = Vec::new();
    for x in nodes.points() {
        let d = geodesic_distance(center, x);
        if d <= radius {
            inside = inside.max(d);
        } else if d <= top {
            band.push(d);
        } else {
            beyond = Some(beyond.map_or(d, |b: T| b.min(d)));
        }
    }
    band.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut seq = vec![inside];
    seq.extend(band);
    seq.push(beyond.unwrap_or(top));
    let two = T::lit(2.0);
    let (lo, hi) = seq
        .windows(2)
        .map(|w| (w[0], w[1]))
        .fold((seq[0], seq[1]), |best, cur| if cur.1 - cur.0 > best.1 - best.0 { cur } else { best });
    (lo + hi) / two
}
