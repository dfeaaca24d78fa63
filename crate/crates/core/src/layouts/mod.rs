//! 2D graph drawings.
//!
//! A drawing assigns every vertex a position in the plane. Algorithms:
//! force-directed ([`layout_fr`]), LinLog energy ([`layout_linlog`]), stress
//! majorization ([`layout_stress`]), classical metric MDS
//! ([`layout_classical_mds`]), Laplacian spectral ([`layout_spectral`]), a
//! uniform-random baseline, and import of externally computed coordinates.

mod eigen;
mod fr;
mod linlog;
mod mds;
mod spectral;
mod stress;

pub use fr::layout_fr;
pub use linlog::layout_linlog;
pub use mds::layout_classical_mds;
pub use spectral::{layout_spectral, SpectralInfo};
pub use stress::{layout_stress, layout_stress_traced, stress_value};

use std::ops::{Add, Mul, Sub};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{ClusterLabeling, Graph};
use crate::scalar::{cast, Scalar};

/// A position in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<F> {
    /// Horizontal coordinate.
    pub x: F,
    /// Vertical coordinate.
    pub y: F,
}

impl<F: Scalar> Point<F> {
    /// Construct a point.
    pub fn new(x: F, y: F) -> Self {
        Self { x, y }
    }

    /// Dot product.
    pub fn dot(self, other: Self) -> F {
        self.x * other.x + self.y * other.y
    }

    /// Euclidean norm.
    pub fn norm(self) -> F {
        self.dot(self).sqrt()
    }

    /// Euclidean distance to `other`.
    pub fn dist(self, other: Self) -> F {
        (self - other).norm()
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist_sq(self, other: Self) -> F {
        let d = self - other;
        d.dot(d)
    }

    /// Whether both coordinates are finite.
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<F: Scalar> Add for Point<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<F: Scalar> Sub for Point<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<F: Scalar> Mul<F> for Point<F> {
    type Output = Self;
    fn mul(self, rhs: F) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

/// A drawing: one position per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout<F: Scalar> {
    positions: Vec<Point<F>>,
}

impl<F: Scalar> Layout<F> {
    /// Build a layout, checking that all coordinates are finite and that at
    /// least two positions are distinct once there are two or more vertices
    /// (a fully collapsed drawing carries no geometric information).
    pub fn new(positions: Vec<Point<F>>) -> Result<Self> {
        for (v, p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::invalid(
                    "positions",
                    format!("non-finite coordinate for vertex {v}"),
                ));
            }
        }
        if positions.len() >= 2 && positions.iter().all(|p| *p == positions[0]) {
            return Err(Error::invalid(
                "positions",
                "all positions coincide".to_string(),
            ));
        }
        Ok(Self { positions })
    }

    /// Number of positioned vertices.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    /// Whether the layout has no vertices.
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// All positions, indexed by vertex.
    pub fn positions(&self) -> &[Point<F>] {
        &self.positions
    }

    /// Position of vertex `v`.
    pub fn get(&self, v: usize) -> Point<F> {
        self.positions[v]
    }

    /// Axis-aligned bounding box as `(min, max)`, or `None` when empty.
    pub fn bounding_box(&self) -> Option<(Point<F>, Point<F>)> {
        let first = *self.positions.first()?;
        let mut min = first;
        let mut max = first;
        for p in &self.positions {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Some((min, max))
    }

    /// Length of the longer bounding-box side (0 when degenerate).
    pub fn bbox_max_side(&self) -> F {
        match self.bounding_box() {
            Some((min, max)) => (max.x - min.x).max(max.y - min.y),
            None => F::zero(),
        }
    }

    /// Bounding-box diagonal length (0 when degenerate).
    pub fn bbox_diagonal(&self) -> F {
        match self.bounding_box() {
            Some((min, max)) => (max - min).norm(),
            None => F::zero(),
        }
    }

    /// Layout shifted by `offset`.
    pub fn translated(&self, offset: Point<F>) -> Self {
        Self {
            positions: self.positions.iter().map(|&p| p + offset).collect(),
        }
    }

    /// Layout scaled about the origin by `factor`.
    pub fn scaled(&self, factor: F) -> Self {
        Self {
            positions: self.positions.iter().map(|&p| p * factor).collect(),
        }
    }

    /// Layout rotated about the origin by `angle` radians.
    pub fn rotated(&self, angle: F) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self {
            positions: self
                .positions
                .iter()
                .map(|&p| Point::new(p.x * cos - p.y * sin, p.x * sin + p.y * cos))
                .collect(),
        }
    }

    /// Layout mirrored across the y-axis.
    pub fn reflected(&self) -> Self {
        Self {
            positions: self
                .positions
                .iter()
                .map(|&p| Point::new(-p.x, p.y))
                .collect(),
        }
    }

    /// Positions for a subset of vertices (ascending original ids), e.g. the
    /// vertices kept by a largest-connected-component extraction.
    pub fn restricted_to(&self, kept: &[u32]) -> Result<Self> {
        Self::new(kept.iter().map(|&v| self.positions[v as usize]).collect())
    }
}

/// Tuning knobs shared by the iterative layout algorithms.
///
/// `max_iterations` and `convergence_tol` govern the force/stress loops; the
/// eigenvector-based layouts (MDS, spectral) use a fixed internal tolerance of
/// 1e-9 with an iteration cap of 10·n instead, which is tight enough that
/// exposing it has no observable effect.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LayoutConfig<F> {
    /// Iteration cap for force/stress loops.
    pub max_iterations: usize,
    /// Relative-change threshold that stops iteration early.
    pub convergence_tol: F,
    /// Seed recorded alongside the layout; callers derive their RNG from it.
    pub seed: u64,
    /// Initial Fruchterman–Reingold temperature (max displacement per step,
    /// in drawing units); cools linearly to zero over `max_iterations`.
    pub fr_cooling: F,
    /// Exponent `q` in the stress weights `w_ij = d_ij^q`.
    pub stress_weight_exponent: F,
    /// Initial LinLog gradient step; adapted multiplicatively as descent
    /// succeeds or backtracks.
    pub linlog_step: F,
}

impl<F: Scalar> Default for LayoutConfig<F> {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            convergence_tol: cast(1e-7),
            seed: 0,
            fr_cooling: cast(0.1),
            stress_weight_exponent: cast(-2.0),
            linlog_step: F::one(),
        }
    }
}

impl<F: Scalar> LayoutConfig<F> {
    /// Check that the knobs are usable.
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        if !self.convergence_tol.is_finite() || self.convergence_tol <= F::zero() {
            return Err(Error::invalid("convergence_tol", "must be positive and finite"));
        }
        if !self.fr_cooling.is_finite() || self.fr_cooling <= F::zero() {
            return Err(Error::invalid("fr_cooling", "must be positive and finite"));
        }
        if !self.stress_weight_exponent.is_finite() {
            return Err(Error::invalid("stress_weight_exponent", "must be finite"));
        }
        if !self.linlog_step.is_finite() || self.linlog_step <= F::zero() {
            return Err(Error::invalid("linlog_step", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Place every vertex i.i.d. uniformly in the unit square.
///
/// The baseline drawing: it carries no structure, so scores against it
/// estimate the chance level of the whole pipeline.
pub fn layout_random<F: Scalar, R: Rng>(g: &Graph, rng: &mut R) -> Layout<F> {
    let n = g.vertex_count();
    loop {
        let positions: Vec<Point<F>> = (0..n)
            .map(|_| {
                Point::new(
                    rng.gen_range(F::zero()..F::one()),
                    rng.gen_range(F::zero()..F::one()),
                )
            })
            .collect();
        // A collision of every point is measure-zero but would violate the
        // layout invariant; redraw in that case.
        if let Ok(layout) = Layout::new(positions) {
            return layout;
        }
    }
}

/// Draw each cluster as a tight blob on its own grid cell.
///
/// Cluster `c` is centred on an integer grid (`ceil(sqrt(k))` columns, unit
/// spacing) and its members are scattered uniformly in a disc of radius
/// `spread` around the centre. With `spread` well below 0.5 the clusters are
/// perfectly separated, which makes this the idealized drawing: geometric
/// clustering recovers the ground truth exactly.
pub fn ideal_grid_layout<F: Scalar, R: Rng>(
    labeling: &ClusterLabeling,
    spread: F,
    rng: &mut R,
) -> Result<Layout<F>> {
    if spread.is_nan() || spread < F::zero() || spread >= cast(0.5) {
        return Err(Error::invalid("spread", "must lie in [0, 0.5)"));
    }
    let k = labeling.cluster_count();
    let side = (k as f64).sqrt().ceil() as usize;
    let centers: Vec<Point<F>> = (0..k)
        .map(|c| {
            Point::new(
                F::from_usize(c % side).expect("grid index fits scalar"),
                F::from_usize(c / side).expect("grid index fits scalar"),
            )
        })
        .collect();
    let tau: F = cast(std::f64::consts::TAU);
    let positions = labeling
        .labels()
        .iter()
        .map(|&c| {
            let angle = rng.gen_range(F::zero()..tau);
            let radius = spread * rng.gen_range(F::zero()..F::one()).sqrt();
            let (sin, cos) = angle.sin_cos();
            centers[c as usize] + Point::new(cos * radius, sin * radius)
        })
        .collect();
    Layout::new(positions)
}

/// Serialize a layout as `vertex x y` lines.
///
/// Coordinates are printed in the shortest decimal form that parses back to
/// the identical value, so export → import is exact.
pub fn export_layout<F: Scalar>(layout: &Layout<F>) -> String {
    let mut out = String::new();
    for (v, p) in layout.positions().iter().enumerate() {
        out.push_str(&format!("{v} {x} {y}\n", x = p.x, y = p.y));
    }
    out
}

/// Parse a layout from `vertex x y` text.
///
/// The file must cover vertices `0..n` exactly once, where `n` is the number
/// of coordinate lines; order does not matter. `#` comments and blank lines
/// are ignored.
pub fn import_layout<F: Scalar>(text: &str) -> Result<Layout<F>> {
    let mut entries: Vec<(usize, u32, F, F)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::parse(
                idx + 1,
                format!("expected `vertex x y`, got {line:?}"),
            ));
        }
        let vertex = tokens[0]
            .parse::<u32>()
            .map_err(|_| Error::parse(idx + 1, format!("expected a vertex id, got {:?}", tokens[0])))?;
        let mut coords = [F::zero(); 2];
        for (slot, token) in coords.iter_mut().zip(&tokens[1..]) {
            let value = token
                .parse::<f64>()
                .map_err(|_| Error::parse(idx + 1, format!("expected a coordinate, got {token:?}")))?;
            if !value.is_finite() {
                return Err(Error::parse(
                    idx + 1,
                    format!("non-finite coordinate {token:?}"),
                ));
            }
            *slot = cast(value);
        }
        entries.push((idx + 1, vertex, coords[0], coords[1]));
    }
    let n = entries.len();
    let mut positions = vec![None; n];
    for (line, vertex, x, y) in entries {
        if vertex as usize >= n {
            return Err(Error::parse(
                line,
                format!("vertex {vertex} out of range for a file with {n} coordinate lines"),
            ));
        }
        if positions[vertex as usize].replace(Point::new(x, y)).is_some() {
            return Err(Error::parse(line, format!("vertex {vertex} listed twice")));
        }
    }
    Layout::new(positions.into_iter().map(|p| p.expect("coverage checked")).collect())
}

/// Load a layout file.
pub fn load_layout<F: Scalar>(path: impl AsRef<Path>) -> Result<Layout<F>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    import_layout(&text).map_err(|e| e.with_file(path))
}

/// Save a layout to a file.
pub fn save_layout<F: Scalar>(layout: &Layout<F>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, export_layout(layout)).map_err(|e| Error::io(path, e))
}
