//! Stress-majorization layout.
//!
//! Minimizes `Σ_{i<j} w_ij (‖x_i−x_j‖ − d_ij)²` over drawings, where `d_ij`
//! are graph-theoretic distances and `w_ij = d_ij^q` (default `q = −2`). Each
//! sweep moves every vertex to the minimizer of its local majorizing
//! function, which makes the stress non-increasing from sweep to sweep.

use rand::Rng;

use crate::dist::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{cast, cast_usize, Scalar};

use super::{Layout, LayoutConfig, Point};

/// Weighted stress of a set of positions against target distances.
pub fn stress_value<F: Scalar>(
    positions: &[Point<F>],
    d: &DistanceMatrix,
    weight_exponent: F,
) -> F {
    let n = positions.len();
    let mut total = F::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let target = cast_usize::<F>(d.get(i, j) as usize);
            let weight = target.powf(weight_exponent);
            let diff = positions[i].dist(positions[j]) - target;
            total += weight * diff * diff;
        }
    }
    total
}

fn majorize<F: Scalar, R: Rng>(
    g: &Graph,
    d: &DistanceMatrix,
    cfg: &LayoutConfig<F>,
    rng: &mut R,
    record_trace: bool,
) -> Result<(Layout<F>, Vec<F>)> {
    cfg.validate()?;
    let n = g.vertex_count();
    if n != d.n() {
        return Err(Error::SizeMismatch {
            context: "stress layout",
            left: n,
            right: d.n(),
        });
    }
    if n <= 1 {
        let pos = vec![Point::default(); n];
        return Ok((Layout::new(pos)?, Vec::new()));
    }

    // Random start spread over the distance scale, so initial geometry is
    // roughly the right size.
    let scale = cast_usize::<F>(d.max_hops().max(1) as usize);
    let mut pos: Vec<Point<F>> = (0..n)
        .map(|_| {
            Point::new(
                rng.gen_range(F::zero()..F::one()) * scale,
                rng.gen_range(F::zero()..F::one()) * scale,
            )
        })
        .collect();

    let q = cfg.stress_weight_exponent;
    let weights: Vec<F> = {
        // Row-major w_ij table; diagonal unused.
        let mut w = vec![F::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w[i * n + j] = cast_usize::<F>(d.get(i, j) as usize).powf(q);
                }
            }
        }
        w
    };

    let tiny: F = cast(1e-12);
    let tau: F = cast(std::f64::consts::TAU);
    let mut trace = Vec::new();
    let mut previous = stress_value(&pos, d, q);
    if record_trace {
        trace.push(previous);
    }

    for _ in 0..cfg.max_iterations {
        for i in 0..n {
            let mut numerator = Point::<F>::default();
            let mut denominator = F::zero();
            for j in 0..n {
                if j == i {
                    continue;
                }
                let w = weights[i * n + j];
                let target = cast_usize::<F>(d.get(i, j) as usize);
                let delta = pos[i] - pos[j];
                let dist = delta.norm();
                let direction = if dist > tiny {
                    delta * (F::one() / dist)
                } else {
                    // Coincident pair: aim the restoring displacement in a
                    // random direction.
                    let angle = rng.gen_range(F::zero()..tau);
                    let (sin, cos) = angle.sin_cos();
                    Point::new(cos, sin)
                };
                numerator = numerator + (pos[j] + direction * target) * w;
                denominator += w;
            }
            pos[i] = numerator * (F::one() / denominator);
        }

        let current = stress_value(&pos, d, q);
        if record_trace {
            trace.push(current);
        }
        let converged = (previous - current).abs() <= cfg.convergence_tol * previous.max(tiny);
        previous = current;
        if converged {
            break;
        }
    }

    Ok((Layout::new(pos)?, trace))
}

/// SMACOF stress-majorization layout from all-pairs graph distances.
pub fn layout_stress<F: Scalar, R: Rng>(
    g: &Graph,
    d: &DistanceMatrix,
    cfg: &LayoutConfig<F>,
    rng: &mut R,
) -> Result<Layout<F>> {
    majorize(g, d, cfg, rng, false).map(|(layout, _)| layout)
}

/// Like [`layout_stress`], additionally returning the stress after the
/// initial placement and after every sweep (a non-increasing sequence).
pub fn layout_stress_traced<F: Scalar, R: Rng>(
    g: &Graph,
    d: &DistanceMatrix,
    cfg: &LayoutConfig<F>,
    rng: &mut R,
) -> Result<(Layout<F>, Vec<F>)> {
    majorize(g, d, cfg, rng, true)
}
