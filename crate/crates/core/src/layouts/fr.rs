//! Fruchterman–Reingold force-directed layout.

use rand::Rng;

use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::{cast, cast_usize, Scalar};

use super::{layout_random, Layout, LayoutConfig, Point};

fn random_unit<F: Scalar, R: Rng>(rng: &mut R) -> Point<F> {
    let tau: F = cast(std::f64::consts::TAU);
    let angle = rng.gen_range(F::zero()..tau);
    let (sin, cos) = angle.sin_cos();
    Point::new(cos, sin)
}

/// Force simulation in the unit square: every pair repels with `k²/d`,
/// every edge attracts with `d²/k`, where `k = sqrt(area/n)` is the ideal
/// edge length. Per-step movement is capped by a temperature that cools
/// linearly from `cfg.fr_cooling` to zero; iteration stops early once the
/// largest movement drops below `cfg.convergence_tol`.
///
/// Coincident vertices are pushed apart in a random direction drawn from
/// `rng`, so the output is deterministic for a fixed RNG state.
pub fn layout_fr<F: Scalar, R: Rng>(
    g: &Graph,
    cfg: &LayoutConfig<F>,
    rng: &mut R,
) -> Result<Layout<F>> {
    cfg.validate()?;
    let n = g.vertex_count();
    let start: Layout<F> = layout_random(g, rng);
    if n <= 1 {
        return Ok(start);
    }
    let mut pos = start.positions().to_vec();

    let k = (F::one() / cast_usize::<F>(n)).sqrt();
    let tiny: F = cast(1e-12);
    let max_iter = cfg.max_iterations;
    let mut disp = vec![Point::<F>::default(); n];

    for iter in 0..max_iter {
        let temp = cfg.fr_cooling * cast_usize::<F>(max_iter - iter) / cast_usize::<F>(max_iter);
        for d in disp.iter_mut() {
            *d = Point::default();
        }

        for i in 0..n {
            for j in (i + 1)..n {
                let delta = pos[i] - pos[j];
                let dist = delta.norm();
                let dir = if dist > tiny {
                    delta * (F::one() / dist)
                } else {
                    random_unit(rng)
                };
                let force = k * k / dist.max(tiny);
                disp[i] = disp[i] + dir * force;
                disp[j] = disp[j] - dir * force;
            }
        }

        for &(u, v) in g.edges() {
            let (u, v) = (u as usize, v as usize);
            let delta = pos[u] - pos[v];
            let dist = delta.norm();
            let dir = if dist > tiny {
                delta * (F::one() / dist)
            } else {
                random_unit(rng)
            };
            let force = dist * dist / k;
            disp[u] = disp[u] - dir * force;
            disp[v] = disp[v] + dir * force;
        }

        let mut max_move = F::zero();
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = d.norm();
            if len > tiny {
                let step = len.min(temp);
                *p = *p + *d * (step / len);
                max_move = max_move.max(step);
            }
        }
        if max_move < cfg.convergence_tol {
            break;
        }
    }

    match Layout::new(pos.clone()) {
        Ok(layout) => Ok(layout),
        // Unreachable in practice (repulsion keeps points apart); fall back
        // to a jittered copy rather than reporting a phantom error.
        Err(_) => {
            let jitter = k * cast::<F>(1e-3);
            for p in pos.iter_mut() {
                *p = *p + random_unit(rng) * jitter;
            }
            Layout::new(pos)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

    #[test]
    fn k2_settles_near_ideal_length() {
        let g = Graph::complete(2);
        let cfg = LayoutConfig::<f64>::default();
        let l = layout_fr(&g, &cfg, &mut rng_from(11, 0)).unwrap();
        let d = l.get(0).dist(l.get(1));
        let k = (1.0f64 / 2.0).sqrt();
        assert!(
            (d - k).abs() <= 0.2 * k,
            "K2 distance {d} not within 20% of ideal length {k}"
        );
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let g = Graph::star(8);
        let cfg = LayoutConfig::<f64>::default();
        let a = layout_fr(&g, &cfg, &mut rng_from(3, 1)).unwrap();
        let b = layout_fr(&g, &cfg, &mut rng_from(3, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bridged_triangles_stay_locally_tight() {
        // Two triangles joined by a single edge: vertices of the same
        // triangle should end up mutually closer than cross pairs.
        let g = Graph::new(
            6,
            vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)],
        )
        .unwrap();
        let cfg = LayoutConfig::<f64>::default();
        let l = layout_fr(&g, &cfg, &mut rng_from(5, 2)).unwrap();
        let groups = [[0usize, 1, 2], [3, 4, 5]];
        let mut max_intra = 0.0f64;
        for group in &groups {
            for (a, i) in group.iter().enumerate() {
                for j in &group[a + 1..] {
                    max_intra = max_intra.max(l.get(*i).dist(l.get(*j)));
                }
            }
        }
        // Compare against cross pairs that exclude the bridge endpoints
        // (2,3), which legitimately sit close together.
        let mut min_cross = f64::INFINITY;
        for i in [0usize, 1] {
            for j in [4usize, 5] {
                min_cross = min_cross.min(l.get(i).dist(l.get(j)));
            }
        }
        assert!(
            max_intra < min_cross,
            "intra {max_intra} should be below cross {min_cross}"
        );
    }
}
