//! LinLog energy layout.
//!
//! The node-repulsion LinLog model scores a drawing by
//! `Σ_{(u,v)∈E} ‖x_u−x_v‖ − Σ_{u<v} ln ‖x_u−x_v‖`: linear attraction along
//! edges, logarithmic repulsion between all pairs. Its minima place densely
//! connected groups tightly together while pushing groups apart, which is
//! why it separates clusters so well.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{cast, Scalar};

use super::{layout_random, Layout, LayoutConfig, Point};

/// Floor on pairwise distances inside energy/gradient evaluation, keeping
/// `ln d` and `1/d` finite while coincident points get pushed apart.
const DIST_FLOOR: f64 = 1e-9;

fn energy<F: Scalar>(g: &Graph, pos: &[Point<F>]) -> F {
    let floor: F = cast(DIST_FLOOR);
    let n = pos.len();
    let mut e = F::zero();
    for &(u, v) in g.edges() {
        e += pos[u as usize].dist(pos[v as usize]).max(floor);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            e -= pos[i].dist(pos[j]).max(floor).ln();
        }
    }
    e
}

fn gradient<F: Scalar>(g: &Graph, pos: &[Point<F>], grad: &mut [Point<F>]) {
    let floor: F = cast(DIST_FLOOR);
    let n = pos.len();
    for g in grad.iter_mut() {
        *g = Point::default();
    }
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        let delta = pos[u] - pos[v];
        let d = delta.norm().max(floor);
        let pull = delta * (F::one() / d);
        grad[u] = grad[u] + pull;
        grad[v] = grad[v] - pull;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = pos[i] - pos[j];
            let d = delta.norm().max(floor);
            let push = delta * (F::one() / (d * d));
            grad[i] = grad[i] - push;
            grad[j] = grad[j] + push;
        }
    }
}

/// Minimize the LinLog energy by gradient descent with backtracking.
///
/// Starts from a random drawing, takes steps of size `cfg.linlog_step`
/// (halved until the energy decreases, grown again after successful steps),
/// and stops when the relative energy improvement falls below
/// `cfg.convergence_tol` or `cfg.max_iterations` is reached. The all-pairs
/// repulsion term requires a connected graph; components would otherwise
/// drift apart without bound.
pub fn layout_linlog<F: Scalar, R: Rng>(
    g: &Graph,
    cfg: &LayoutConfig<F>,
    rng: &mut R,
) -> Result<Layout<F>> {
    cfg.validate()?;
    if g.vertex_count() >= 2 && !g.is_connected() {
        let (components, _) = g.connected_components();
        return Err(Error::Disconnected {
            components,
            context: "LinLog layout",
        });
    }
    let n = g.vertex_count();
    let start: Layout<F> = layout_random(g, rng);
    if n <= 1 {
        return Ok(start);
    }

    let mut pos = start.positions().to_vec();
    let mut grad = vec![Point::<F>::default(); n];
    let mut step = cfg.linlog_step;
    let mut current = energy(g, &pos);
    // Sufficient-decrease slope for the backtracking test.
    let armijo: F = cast(1e-4);
    let grow: F = cast(1.2);
    let half: F = cast(0.5);

    for _ in 0..cfg.max_iterations {
        gradient(g, &pos, &mut grad);
        let grad_sq: F = grad.iter().map(|p| p.dot(*p)).sum();
        if grad_sq.sqrt() < cfg.convergence_tol {
            break;
        }

        let mut halvings = 0;
        let accepted = loop {
            let candidate: Vec<Point<F>> =
                pos.iter().zip(&grad).map(|(&p, &d)| p - d * step).collect();
            let e = energy(g, &candidate);
            if e.is_finite() && e <= current - armijo * step * grad_sq {
                break Some((candidate, e));
            }
            step *= half;
            halvings += 1;
            if halvings >= 60 {
                break None;
            }
        };
        let Some((candidate, e)) = accepted else {
            return Err(Error::Numerical {
                context: "LinLog descent",
                message: "no decreasing step found after 60 halvings".to_string(),
            });
        };

        let improvement = (current - e).abs();
        pos = candidate;
        current = e;
        step *= grow;
        if improvement <= cfg.convergence_tol * current.abs().max(F::one()) {
            break;
        }
    }

    Layout::new(pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

    #[test]
    fn k2_equilibrium_distance_is_one() {
        // Energy d − ln d is minimized at d = 1.
        let g = Graph::complete(2);
        let cfg = LayoutConfig::<f64>::default();
        let l = layout_linlog(&g, &cfg, &mut rng_from(21, 0)).unwrap();
        let d = l.get(0).dist(l.get(1));
        assert!((d - 1.0).abs() < 1e-3, "K2 distance {d} should be ≈ 1");
    }

    #[test]
    fn energy_decreases_from_start() {
        let g = Graph::complete(6);
        let cfg = LayoutConfig::<f64>::default();
        let start: Layout<f64> = layout_random(&g, &mut rng_from(9, 0));
        let done = layout_linlog(&g, &cfg, &mut rng_from(9, 0)).unwrap();
        assert!(energy(&g, done.positions()) < energy(&g, start.positions()));
    }

    #[test]
    fn bridged_cliques_separate() {
        // Two K4s joined by one edge (0..4 and 4..8 ranges).
        let mut edges = Vec::new();
        for i in 0..4u32 {
            for j in (i + 1)..4 {
                edges.push((i, j));
                edges.push((i + 4, j + 4));
            }
        }
        edges.push((3, 4));
        let g = Graph::new(8, edges).unwrap();
        let cfg = LayoutConfig::<f64>::default();
        let l = layout_linlog(&g, &cfg, &mut rng_from(13, 0)).unwrap();

        let mut mean_intra = 0.0f64;
        let mut mean_cross = 0.0f64;
        let (mut intra_count, mut cross_count) = (0, 0);
        for i in 0..8usize {
            for j in (i + 1)..8 {
                let d = l.get(i).dist(l.get(j));
                if (i < 4) == (j < 4) {
                    mean_intra += d;
                    intra_count += 1;
                } else {
                    mean_cross += d;
                    cross_count += 1;
                }
            }
        }
        mean_intra /= intra_count as f64;
        mean_cross /= cross_count as f64;
        assert!(
            mean_intra < mean_cross,
            "mean intra {mean_intra} should be below mean cross {mean_cross}"
        );
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let cfg = LayoutConfig::<f64>::default();
        assert!(matches!(
            layout_linlog(&g, &cfg, &mut rng_from(1, 0)),
            Err(Error::Disconnected { .. })
        ));
    }
}
