//! Classical (metric) multidimensional scaling from graph distances.

use crate::dist::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{cast, cast_usize, Scalar};

use super::eigen::{eigen_tol, power_iteration};
use super::{Layout, LayoutConfig, Point};

/// Classical scaling: double-center the squared-distance matrix into the
/// Gram matrix `B = −½ J D² J`, take its top two eigenpairs by power
/// iteration with deflation, and scale each eigenvector by the square root
/// of its eigenvalue. Deterministic — the start vectors are fixed.
///
/// A non-positive leading eigenvalue means the distances carry no usable
/// geometry and is reported as an error; a negative *second* eigenvalue just
/// collapses the drawing onto a line.
pub fn layout_classical_mds<F: Scalar>(
    g: &Graph,
    d: &DistanceMatrix,
    cfg: &LayoutConfig<F>,
) -> Result<Layout<F>> {
    cfg.validate()?;
    let n = g.vertex_count();
    if n != d.n() {
        return Err(Error::SizeMismatch {
            context: "classical MDS",
            left: n,
            right: d.n(),
        });
    }
    if n <= 1 {
        return Layout::new(vec![Point::default(); n]);
    }

    // Double centering of the squared distances.
    let nf = cast_usize::<F>(n);
    let mut squared = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let hops = cast_usize::<F>(d.get(i, j) as usize);
            squared[i * n + j] = hops * hops;
        }
    }
    let row_means: Vec<F> = (0..n)
        .map(|i| squared[i * n..(i + 1) * n].iter().copied().sum::<F>() / nf)
        .collect();
    let grand_mean = row_means.iter().copied().sum::<F>() / nf;
    let half: F = cast(0.5);
    let mut gram = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            gram[i * n + j] = -half * (squared[i * n + j] - row_means[i] - row_means[j] + grand_mean);
        }
    }

    let apply = |v: &[F], out: &mut [F]| {
        for i in 0..n {
            let row = &gram[i * n..(i + 1) * n];
            out[i] = row.iter().zip(v).map(|(&m, &x)| m * x).sum();
        }
    };

    let tol = eigen_tol::<F>();
    let cap = 10 * n;
    let (lambda1, v1) = power_iteration(apply, n, &[], tol, cap, 0xD1);
    if lambda1 <= F::zero() {
        return Err(Error::Numerical {
            context: "classical MDS",
            message: format!("leading eigenvalue {lambda1} is not positive"),
        });
    }
    let (lambda2, v2) = power_iteration(apply, n, &[v1.as_slice()], tol, cap, 0xD2);

    let s1 = lambda1.sqrt();
    let s2 = if lambda2 > F::zero() {
        lambda2.sqrt()
    } else {
        F::zero()
    };
    let positions = (0..n)
        .map(|i| Point::new(v1[i] * s1, v2[i] * s2))
        .collect();
    Layout::new(positions)
}
