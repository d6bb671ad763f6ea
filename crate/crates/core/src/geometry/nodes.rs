use std::io::{BufRead, Write};

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{geodesic_distance, ManifoldDim, SpherePoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Geodesic distance below which two nodes count as duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-14;

/// Ordered set of distinct nodes on S^d.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<T: Real> {
    dim: ManifoldDim,
    points: Vec<SpherePoint<T>>,
    seed: Option<u64>,
}

impl<T: Real> NodeSet<T> {
    /// Validates that the set is nonempty, lives on `dim` and has no duplicates.
    pub fn new(dim: ManifoldDim, points: Vec<SpherePoint<T>>, seed: Option<u64>) -> Result<Self> {
        let set = Self::new_unchecked(dim, points, seed)?;
        if let Some((first, second)) = find_duplicate(&set.points) {
            return Err(Error::DuplicateNodes { first, second });
        }
        Ok(set)
    }

    /// Like [`NodeSet::new`] but accepts duplicate points, for degenerate
    /// fixtures fed to the diagnostics.
    pub fn new_unchecked(dim: ManifoldDim, points: Vec<SpherePoint<T>>, seed: Option<u64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("node set must contain at least one point"));
        }
        if let Some(i) = points.iter().position(|p| p.dim() != dim) {
            return Err(Error::invalid(format!("node {i} does not lie on S^{}", dim.d())));
        }
        Ok(NodeSet { dim, points, seed })
    }

    pub fn dim(&self) -> ManifoldDim {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpherePoint<T>] {
        &self.points
    }

    pub fn point(&self, j: usize) -> &SpherePoint<T> {
        &self.points[j]
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Writes the set as CSV: a `# sphere d=.. n=.. seed=..` header, then one
    /// `x,y[,z]` row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(out, "# sphere d={} n={} seed={}", self.dim.d(), self.len(), seed)?;
        for p in &self.points {
            let row: Vec<String> = p.coords().iter().map(|c| format!("{}", c.as_f64())).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, message: "empty input".into() })?;
        let (dim, n, seed) = parse_header(&header?)?;
        let mut points = Vec::with_capacity(n);
        for (idx, line) in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let coords = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map(T::lit))
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
            let p = SpherePoint::new(dim, &coords)
                .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
            points.push(p);
        }
        if points.len() != n {
            return Err(Error::Parse {
                line: 1,
                message: format!("header declares n={n} but {} rows were read", points.len()),
            });
        }
        NodeSet::new(dim, points, seed)
    }
}

fn parse_header(header: &str) -> Result<(ManifoldDim, usize, Option<u64>)> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let rest = header
        .trim()
        .strip_prefix("# sphere")
        .ok_or_else(|| bad(format!("expected '# sphere' header, got {header:?}")))?;
    let (mut d, mut n, mut seed) = (None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| bad(format!("malformed field {field:?}")))?;
        match key {
            "d" => d = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "n" => n = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "seed" => {
                seed = Some(match value {
                    "none" => None,
                    s => Some(s.parse::<u64>().map_err(|e| bad(e.to_string()))?),
                })
            }
            other => return Err(bad(format!("unknown header field {other:?}"))),
        }
    }
    let dim = ManifoldDim::new(d.ok_or_else(|| bad("missing d".into()))?).map_err(|e| bad(e.to_string()))?;
    Ok((dim, n.ok_or_else(|| bad("missing n".into()))?, seed.flatten()))
}

fn find_duplicate<T: Real>(points: &[SpherePoint<T>]) -> Option<(usize, usize)> {
    let tol = T::lit(DUPLICATE_TOLERANCE);
    // Only nearly parallel pairs can be duplicates; skip the atan2 otherwise.
    let near = T::one() - T::lit(1e-8);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].dot(&points[j]) > near && geodesic_distance(&points[i], &points[j]) < tol {
                return Some((i, j));
            }
        }
    }
    None
}

/// Deterministic quasi-uniform nodes: equal angles `2πj/n` on S¹, the
/// golden-angle Fibonacci lattice `z_j = 1 - (2j+1)/n` on S².
pub fn fibonacci_nodes<T: Real>(n: usize, dim: ManifoldDim) -> Result<NodeSet<T>> {
    if n < 2 {
        return Err(Error::invalid(format!("fibonacci_nodes needs n >= 2, got {n}")));
    }
    Ok(NodeSet { dim, points: fibonacci_points(n, dim), seed: None })
}

/// Lattice points without the `n >= 2` restriction (a single point sits at
/// angle 0 on S¹ and at the equator on S²).
pub(crate) fn fibonacci_points<T: Real>(n: usize, dim: ManifoldDim) -> Vec<SpherePoint<T>> {
    let nf = T::from_count(n);
    match dim {
        ManifoldDim::Circle => (0..n)
            .map(|j| SpherePoint::from_angle(T::two_pi() * T::from_count(j) / nf))
            .collect(),
        ManifoldDim::Sphere => {
            let golden = T::pi() * (T::lit(3.0) - T::lit(5.0).sqrt());
            (0..n)
                .map(|j| {
                    let jf = T::from_count(j);
                    let z = T::one() - (T::lit(2.0) * jf + T::one()) / nf;
                    let rho = (T::one() - z * z).max(T::zero()).sqrt();
                    let phi = golden * jf;
                    SpherePoint::from_unit_unchecked(Vector3::new(rho * phi.cos(), rho * phi.sin(), z), dim)
                })
                .collect()
        }
    }
}

/// `n` i.i.d. uniform points from normalized Gaussian vectors drawn with a
/// ChaCha8 generator seeded by `seed`.
pub fn random_nodes<T: Real>(n: usize, dim: ManifoldDim, seed: u64) -> Result<NodeSet<T>> {
    if n < 2 {
        return Err(Error::invalid(format!("random_nodes needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let coords: Vec<T> = (0..dim.ambient())
            .map(|_| T::lit(StandardNormal.sample(&mut rng)))
            .collect();
        if let Ok(p) = SpherePoint::new(dim, &coords) {
            points.push(p);
        }
    }
    NodeSet::new(dim, points, Some(seed))
}

/// Half the minimum pairwise geodesic distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation<T> {
    pub value: T,
    /// First duplicate pair found, if any (the value is then zero).
    pub duplicate: Option<(usize, usize)>,
}

pub fn separation_distance<T: Real>(points: &[SpherePoint<T>]) -> Result<Separation<T>> {
    if points.len() < 2 {
        return Err(Error::invalid("separation distance needs at least two points"));
    }
    let mut min_chord2 = T::max_value().unwrap();
    for i in 0..points.len() {
        let pi = points[i].xyz();
        for p in &points[i + 1..] {
            let c2 = (pi - p.xyz()).norm_squared();
            if c2 < min_chord2 {
                min_chord2 = c2;
            }
        }
    }
    // chord c and angle θ are related by c = 2 sin(θ/2)
    let angle = T::lit(2.0) * (min_chord2.sqrt() / T::lit(2.0)).min(T::one()).asin();
    if angle < T::lit(DUPLICATE_TOLERANCE) {
        return Ok(Separation { value: T::zero(), duplicate: find_duplicate(points) });
    }
    Ok(Separation { value: angle / T::lit(2.0), duplicate: None })
}
