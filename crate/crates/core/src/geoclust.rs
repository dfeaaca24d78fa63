//! Geometric clustering of a drawing with k-means.
//!
//! The positions of a drawing are partitioned into `k` clusters (k taken
//! from the ground truth) by Lloyd's algorithm with k-means++ seeding and
//! multiple restarts. Everything depends only on relative distances, so the
//! resulting labeling is invariant under translation, rotation, reflection,
//! and uniform scaling of the drawing.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::ClusterLabeling;
use crate::layouts::{Layout, Point};
use crate::scalar::{cast, Scalar};
use crate::seed::rng_from;

/// k-means tuning knobs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KMeansConfig<F> {
    /// Number of clusters.
    pub k: usize,
    /// Independent restarts; the run with the lowest objective wins.
    pub restarts: usize,
    /// Lloyd iteration cap per restart.
    pub max_iterations: usize,
    /// Convergence threshold on centroid movement, relative to the
    /// bounding-box diagonal of the input points (which keeps the whole
    /// procedure similarity-invariant).
    pub tol: F,
    /// Master seed; restart `r` runs on a sub-stream derived from it.
    pub seed: u64,
}

impl<F: Scalar> KMeansConfig<F> {
    /// Config with the default restart count (10), iteration cap (300),
    /// and tolerance (1e-6 of the bounding-box diagonal).
    pub fn new(k: usize) -> Self {
        Self {
            k,
            restarts: 10,
            max_iterations: 300,
            tol: cast(1e-6),
            seed: 0,
        }
    }

    /// Same config with a different seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Check that the knobs are usable.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        if !self.tol.is_finite() || self.tol <= F::zero() {
            return Err(Error::invalid("tol", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Outcome of a k-means run.
#[derive(Debug, Clone)]
pub struct KMeansResult<F> {
    /// Cluster assignment of every point.
    pub labeling: ClusterLabeling,
    /// Sum of squared distances to the assigned centroids.
    pub objective: F,
    /// Objective after each Lloyd iteration of the winning restart
    /// (non-increasing).
    pub objective_trace: Vec<F>,
    /// Index of the restart that produced the result.
    pub restart: usize,
}

fn count_distinct<F: Scalar>(points: &[Point<F>]) -> usize {
    let mut sorted: Vec<(F, F)> = points.iter().map(|p| (p.x, p.y)).collect();
    sorted.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite coordinates")
            .then(a.1.partial_cmp(&b.1).expect("finite coordinates"))
    });
    sorted.dedup();
    sorted.len()
}

/// k-means++ seeding: the first centroid is uniform over the points, each
/// following one is drawn with probability proportional to its squared
/// distance from the nearest centroid chosen so far.
pub fn kmeanspp_seed<F: Scalar, R: Rng>(
    points: &Layout<F>,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Point<F>>> {
    let n = points.len();
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if k > n {
        return Err(Error::TooFew {
            context: "k-means++ seeding",
            minimum: k,
            unit: "points",
            actual: n,
        });
    }
    let distinct = count_distinct(points.positions());
    if k > distinct {
        return Err(Error::NotEnoughDistinctPoints { k, distinct });
    }

    let mut centroids = Vec::with_capacity(k);
    centroids.push(points.get(rng.gen_range(0..n)));
    let mut nearest_sq: Vec<F> = points
        .positions()
        .iter()
        .map(|p| p.dist_sq(centroids[0]))
        .collect();

    while centroids.len() < k {
        let total: F = nearest_sq.iter().copied().sum();
        // total > 0 is guaranteed: fewer centroids than distinct points.
        let target = rng.gen_range(F::zero()..F::one()) * total;
        let mut acc = F::zero();
        let mut chosen = None;
        for (i, &w) in nearest_sq.iter().enumerate() {
            if w <= F::zero() {
                continue;
            }
            acc += w;
            if acc > target {
                chosen = Some(i);
                break;
            }
        }
        // Rounding can leave acc slightly below target at the end; take the
        // last positive-weight point in that case.
        let chosen = match chosen {
            Some(i) => i,
            None => nearest_sq
                .iter()
                .rposition(|&w| w > F::zero())
                .expect("some point has positive distance"),
        };
        let c = points.get(chosen);
        centroids.push(c);
        for (w, p) in nearest_sq.iter_mut().zip(points.positions()) {
            let d = p.dist_sq(c);
            if d < *w {
                *w = d;
            }
        }
    }
    Ok(centroids)
}

fn nearest_centroid<F: Scalar>(p: Point<F>, centroids: &[Point<F>]) -> usize {
    let mut best = 0;
    let mut best_d = p.dist_sq(centroids[0]);
    for (c, &centroid) in centroids.iter().enumerate().skip(1) {
        let d = p.dist_sq(centroid);
        // Strict < breaks ties toward the lowest centroid index.
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// One restart's outcome: assignment, final objective, objective trace.
type LloydOutcome<F> = (Vec<u32>, F, Vec<F>);

fn lloyd_run<F: Scalar, R: Rng>(
    points: &Layout<F>,
    cfg: &KMeansConfig<F>,
    rng: &mut R,
) -> Result<LloydOutcome<F>> {
    let n = points.len();
    let k = cfg.k;
    let move_tol = cfg.tol * points.bbox_diagonal();

    let mut centroids = kmeanspp_seed(points, k, rng)?;
    let mut assignment: Vec<u32> = vec![0; n];
    let mut trace = Vec::new();
    let mut objective = F::zero();

    for _ in 0..cfg.max_iterations {
        // Assign every point to its nearest centroid.
        for (a, &p) in assignment.iter_mut().zip(points.positions()) {
            *a = nearest_centroid(p, &centroids) as u32;
        }

        // Repair empty clusters by stealing, for each, the point farthest
        // from its assigned centroid (only from clusters that can spare one).
        let mut sizes = vec![0usize; k];
        for &a in &assignment {
            sizes[a as usize] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let mut farthest: Option<(usize, F)> = None;
            for (i, &p) in points.positions().iter().enumerate() {
                let cluster = assignment[i] as usize;
                if sizes[cluster] < 2 {
                    continue;
                }
                let d = p.dist_sq(centroids[cluster]);
                let better = match farthest {
                    Some((_, best)) => d > best,
                    None => true,
                };
                if better {
                    farthest = Some((i, d));
                }
            }
            let (steal, _) = farthest.expect("n ≥ k leaves a stealable point");
            sizes[assignment[steal] as usize] -= 1;
            assignment[steal] = empty as u32;
            sizes[empty] += 1;
            // The empty cluster's stand-in centroid is the stolen point, so
            // the objective cannot increase from this repair.
            centroids[empty] = points.get(steal);
        }

        // Recompute centroids as cluster means.
        let mut sums = vec![Point::<F>::default(); k];
        for (&a, &p) in assignment.iter().zip(points.positions()) {
            sums[a as usize] = sums[a as usize] + p;
        }
        let mut max_move = F::zero();
        for c in 0..k {
            let mean = sums[c] * (F::one() / F::from_usize(sizes[c]).expect("size fits scalar"));
            max_move = max_move.max(mean.dist(centroids[c]));
            centroids[c] = mean;
        }

        objective = assignment
            .iter()
            .zip(points.positions())
            .map(|(&a, &p)| p.dist_sq(centroids[a as usize]))
            .sum();
        trace.push(objective);

        if max_move <= move_tol {
            break;
        }
    }
    Ok((assignment, objective, trace))
}

/// Cluster the points of a drawing into `cfg.k` groups.
///
/// Runs `cfg.restarts` independent Lloyd descents (k-means++ seeded, empty
/// clusters repaired, assignment ties broken toward the lowest centroid
/// index) and returns the run with the smallest objective. Restart `r` is
/// seeded from a master value drawn once from `rng`, so parallel and serial
/// execution produce identical results.
pub fn kmeans<F: Scalar, R: Rng>(
    points: &Layout<F>,
    cfg: &KMeansConfig<F>,
    rng: &mut R,
) -> Result<KMeansResult<F>> {
    cfg.validate()?;
    let n = points.len();
    if n < cfg.k {
        return Err(Error::TooFew {
            context: "k-means",
            minimum: cfg.k,
            unit: "points",
            actual: n,
        });
    }
    let master: u64 = rng.gen();

    let runs: Vec<Result<LloydOutcome<F>>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| lloyd_run(points, cfg, &mut rng_from(master, r as u64)))
        .collect();

    let mut best: Option<(usize, LloydOutcome<F>)> = None;
    for (r, run) in runs.into_iter().enumerate() {
        let run = run?;
        let replace = match &best {
            Some((_, (_, obj, _))) => run.1 < *obj,
            None => true,
        };
        if replace {
            best = Some((r, run));
        }
    }
    let (restart, (assignment, objective, trace)) = best.expect("restarts ≥ 1");

    // Every cluster is non-empty (repair step), so ids are dense after the
    // first-appearance remap; remapping also makes the labeling independent
    // of centroid numbering.
    let raw: Vec<u64> = assignment.iter().map(|&a| a as u64).collect();
    Ok(KMeansResult {
        labeling: ClusterLabeling::from_assignments(&raw)?,
        objective,
        objective_trace: trace,
        restart,
    })
}
