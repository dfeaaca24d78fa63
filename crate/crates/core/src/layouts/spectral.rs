//! Spectral layout from Laplacian eigenvectors.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{cast, cast_usize, Scalar};

use super::eigen::{eigen_tol, power_iteration};
use super::{Layout, LayoutConfig, Point};

/// Eigenvalue diagnostics attached to a spectral layout.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpectralInfo<F> {
    /// Second-smallest Laplacian eigenvalue (algebraic connectivity).
    pub lambda2: F,
    /// Third-smallest Laplacian eigenvalue.
    pub lambda3: F,
    /// Whether λ2 ≈ λ3, in which case the coordinate pair is only defined up
    /// to a rotation of the shared eigenspace (the returned basis is still
    /// orthonormal).
    pub degenerate_pair: bool,
}

/// Coordinates from the Laplacian eigenvectors for the second- and
/// third-smallest eigenvalues.
///
/// Works on the shifted operator `M = cI − L` with `c = 2·max_degree + 1`,
/// whose dominant eigenvectors (after deflating the all-ones vector) are
/// exactly the wanted small-eigenvalue vectors of `L`; plain power iteration
/// then applies. The `+ 1` keeps the shift *strictly* above the spectrum:
/// at `c = 2·max_degree` exactly (attained by bipartite regular graphs, e.g.
/// a single edge) the wanted vector would sit in `M`'s null space and power
/// iteration would collapse onto rounding noise. Deterministic — fixed start
/// vectors, no RNG.
pub fn layout_spectral<F: Scalar>(
    g: &Graph,
    cfg: &LayoutConfig<F>,
) -> Result<(Layout<F>, SpectralInfo<F>)> {
    cfg.validate()?;
    let n = g.vertex_count();
    if n >= 2 && !g.is_connected() {
        let (components, _) = g.connected_components();
        return Err(Error::Disconnected {
            components,
            context: "spectral layout",
        });
    }
    if n <= 1 {
        let info = SpectralInfo {
            lambda2: F::zero(),
            lambda3: F::zero(),
            degenerate_pair: false,
        };
        return Ok((Layout::new(vec![Point::default(); n])?, info));
    }

    let shift = cast_usize::<F>(2 * g.max_degree().max(1) + 1);
    // M v = c·v − L·v, applied through adjacency lists: O(n + m).
    let apply = |v: &[F], out: &mut [F]| {
        for i in 0..n {
            let degree = cast_usize::<F>(g.degree(i));
            let mut neighbor_sum = F::zero();
            for &w in g.neighbors(i) {
                neighbor_sum += v[w as usize];
            }
            out[i] = shift * v[i] - (degree * v[i] - neighbor_sum);
        }
    };

    let ones: Vec<F> = {
        let value = (F::one() / cast_usize::<F>(n)).sqrt();
        vec![value; n]
    };
    let tol = eigen_tol::<F>();
    let cap = 10 * n;

    let (m2, v2) = power_iteration(apply, n, &[ones.as_slice()], tol, cap, 0x51);
    let lambda2 = shift - m2;
    if n == 2 {
        // Only one non-trivial eigenvector exists; the drawing is a line.
        let positions = (0..n).map(|i| Point::new(v2[i], F::zero())).collect();
        let info = SpectralInfo {
            lambda2,
            lambda3: lambda2,
            degenerate_pair: false,
        };
        return Ok((Layout::new(positions)?, info));
    }
    let (m3, v3) = power_iteration(apply, n, &[ones.as_slice(), v2.as_slice()], tol, cap, 0x52);
    let lambda3 = shift - m3;

    let degenerate_pair = (lambda3 - lambda2).abs() <= cast::<F>(1e-6) * lambda2.abs().max(F::one());
    let positions = (0..n).map(|i| Point::new(v2[i], v3[i])).collect();
    let info = SpectralInfo {
        lambda2,
        lambda3,
        degenerate_pair,
    };
    Ok((Layout::new(positions)?, info))
}
