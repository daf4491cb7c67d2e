//! Small dense and tridiagonal linear-algebra kernels: Sturm-sequence
//! bisection and inverse iteration for symmetric tridiagonal eigenpairs,
//! a complex tridiagonal solver for Crank-Nicolson steps, and a cyclic
//! Jacobi eigensolver for the small bound-subspace Hamiltonians.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
/// below `x`, by counting sign agreements in the Sturm sequence.
pub fn sturm_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        if q == 0.0 {
            q = 1e-300;
        }
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The k-th (ascending, 0-based) eigenvalue by bisection on the Sturm count.
pub fn bisect_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer representable
        }
        if sturm_count_below(diag, off, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve a general real tridiagonal system with partial pivoting.
///
/// Needed by inverse iteration, where the matrix is near-singular by
/// construction. `sub`, `diag`, `sup` are the three bands; `rhs` is
/// overwritten with the solution.
pub fn tridiag_solve_pivoting(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    let mut b = diag.to_vec();
    let mut c = vec![0.0; n]; // superdiagonal after elimination
    let mut d = vec![0.0; n]; // fill-in band two above the diagonal
    c[..n - 1].copy_from_slice(&sup[..n - 1]);
    for i in 0..n - 1 {
        let a_next = sub[i];
        if a_next.abs() > b[i].abs() {
            // swap rows i and i+1
            rhs.swap(i, i + 1);
            let (bi, ci, di) = (b[i], c[i], d[i]);
            b[i] = a_next;
            c[i] = b[i + 1];
            d[i] = if i + 2 < n { c[i + 1] } else { 0.0 };
            b[i + 1] = ci - (bi / b[i]) * c[i];
            if i + 2 < n {
                c[i + 1] = di - (bi / b[i]) * d[i];
            }
            let m = bi / a_next;
            rhs[i + 1] -= m * rhs[i];
        } else {
            if b[i] == 0.0 {
                b[i] = 1e-300;
            }
            let m = a_next / b[i];
            b[i + 1] -= m * c[i];
            if i + 2 < n {
                c[i + 1] -= m * d[i];
            }
            rhs[i + 1] -= m * rhs[i];
        }
    }
    if b[n - 1] == 0.0 {
        b[n - 1] = 1e-300;
    }
    rhs[n - 1] /= b[n - 1];
    if n >= 2 {
        rhs[n - 2] = (rhs[n - 2] - c[n - 2] * rhs[n - 1]) / b[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - c[i] * rhs[i + 1] - d[i] * rhs[i + 2]) / b[i];
    }
    Ok(())
}

/// Inverse iteration for the eigenvector of the symmetric tridiagonal
/// (diag, off) at eigenvalue `lambda`, re-orthogonalized against the
/// already-found `previous` vectors each sweep. Seeded deterministically.
pub fn inverse_iteration(
    diag: &[f64],
    off: &[f64],
    lambda: f64,
    previous: &[Array1<f64>],
) -> Result<Array1<f64>> {
    let n = diag.len();
    let scale: f64 = diag.iter().fold(0.0f64, |m, &d| m.max(d.abs()))
        + off.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    // small shift off the exact eigenvalue keeps the solve finite
    let shifted: Vec<f64> = diag
        .iter()
        .map(|&d| d - lambda - 1e-12 * scale)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut prev_residual = f64::INFINITY;
    for _ in 0..20 {
        tridiag_solve_pivoting(off, &shifted, off, &mut v)?;
        // project out earlier eigenvectors (guards close eigenvalues)
        for p in previous {
            let dot: f64 = p.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            for (vi, pi) in v.iter_mut().zip(p.iter()) {
                *vi -= dot * pi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Spectrum(format!(
                "inverse iteration broke down at lambda = {lambda}"
            )));
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        let residual = residual_norm(diag, off, lambda, &v);
        if residual < 1e-12 * scale {
            break;
        }
        if residual >= prev_residual && residual < 1e-9 * scale {
            break; // stagnated at an acceptable level
        }
        prev_residual = residual;
    }
    Ok(Array1::from_vec(v))
}

fn residual_norm(diag: &[f64], off: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - lambda) * v[i];
        if i > 0 {
            r += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += off[i] * v[i + 1];
        }
        acc += r * r;
    }
    acc.sqrt()
}

/// Thomas solve for a complex tridiagonal system with constant
/// off-diagonal `off` (the Crank-Nicolson left-hand matrix is diagonally
/// dominant with O(1) entries, so no pivoting and plain reciprocal
/// division are safe). Overwrites `rhs` with the solution; `scratch`
/// must have the same length.
pub fn thomas_const_off(diag: &[C64], off: C64, rhs: &mut [C64], scratch: &mut [C64]) {
    #[inline(always)]
    fn recip(z: C64) -> C64 {
        z.conj() / z.norm_sqr()
    }
    let n = diag.len();
    let mut inv = recip(diag[0]);
    scratch[0] = off * inv;
    rhs[0] *= inv;
    for i in 1..n {
        inv = recip(diag[i] - off * scratch[i - 1]);
        scratch[i] = off * inv;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) * inv;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= scratch[i] * next;
    }
}

/// Eigen-decomposition of a small real symmetric matrix by cyclic Jacobi
/// rotations. Returns ascending eigenvalues and the matching eigenvector
/// columns.
pub fn jacobi_eigh(mat: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols());
    let mut a = mat.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&a)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap());
    let vals = Array1::from_iter(idx.iter().map(|&i| a[[i, i]]));
    let mut vecs = Array2::<f64>::zeros((n, n));
    for (col, &i) in idx.iter().enumerate() {
        for k in 0..n {
            vecs[[k, col]] = v[[k, i]];
        }
    }
    (vals, vecs)
}

fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
