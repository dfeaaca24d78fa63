//! Power iteration with deflation, shared by the MDS and spectral layouts.

use crate::scalar::{cast, Scalar};
use crate::seed::splitmix64;

/// Fixed pseudo-random start vector in `[-0.5, 0.5)^n`.
///
/// Deterministic by construction, and with no structure that could leave it
/// orthogonal to the wanted eigenvector of a symmetric graph matrix.
pub(super) fn deterministic_start<F: Scalar>(n: usize, salt: u64) -> Vec<F> {
    (0..n)
        .map(|i| {
            let bits = splitmix64(salt.wrapping_mul(0x9E37_79B9).wrapping_add(i as u64));
            cast::<F>((bits >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        })
        .collect()
}

fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<F: Scalar>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

/// Remove the components of `v` along each (unit-norm) vector in `basis`.
fn project_out<F: Scalar>(v: &mut [F], basis: &[&[F]]) {
    for b in basis {
        let coeff = dot(v, b);
        for (vi, &bi) in v.iter_mut().zip(*b) {
            *vi -= coeff * bi;
        }
    }
}

/// Convergence tolerance: the spec'd 1e-9, loosened only as far as the
/// scalar's own precision requires (relevant for `f32`).
pub(super) fn eigen_tol<F: Scalar>() -> F {
    cast::<F>(1e-9).max(F::epsilon() * cast(8.0))
}

/// Dominant eigenpair of a symmetric operator restricted to the complement
/// of `orthogonal_to` (unit vectors), by power iteration.
///
/// Runs until the relative residual `‖Av − λv‖/‖Av‖` drops below `tol` or
/// `cap` iterations pass, whichever is first; at the cap the current estimate
/// is returned (good enough for the eigenspace-degenerate cases, where the
/// Rayleigh quotient converges even though the vector may keep rotating).
pub(super) fn power_iteration<F: Scalar>(
    apply: impl Fn(&[F], &mut [F]),
    n: usize,
    orthogonal_to: &[&[F]],
    tol: F,
    cap: usize,
    salt: u64,
) -> (F, Vec<F>) {
    let tiny: F = cast(1e-300);
    let mut v = deterministic_start::<F>(n, salt);
    project_out(&mut v, orthogonal_to);
    let len = norm(&v);
    if len < tiny {
        // Start vector swallowed by the projection (essentially impossible
        // with the pseudo-random start); fall back to a different stream.
        v = deterministic_start::<F>(n, salt ^ 0xABCD_EF12);
        project_out(&mut v, orthogonal_to);
    }
    let len = norm(&v);
    for x in v.iter_mut() {
        *x /= len;
    }

    let mut w = vec![F::zero(); n];
    let mut lambda = F::zero();
    for _ in 0..cap {
        apply(&v, &mut w);
        project_out(&mut w, orthogonal_to);
        lambda = dot(&v, &w);
        let mut residual = F::zero();
        for (&wi, &vi) in w.iter().zip(&v) {
            let r = wi - lambda * vi;
            residual += r * r;
        }
        let wlen = norm(&w);
        if wlen < tiny {
            // The operator annihilates v: eigenvalue 0 on this subspace.
            return (F::zero(), v);
        }
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / wlen;
        }
        if residual.sqrt() <= tol * wlen {
            break;
        }
    }
    (lambda, v)
}
