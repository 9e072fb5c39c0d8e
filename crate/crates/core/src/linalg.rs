//! Small dense kernels and matrix-free Krylov solvers for Hermitian
//! operators: symmetric tridiagonal eigensolver, restarted Lanczos for the
//! lowest eigenpair and Krylov approximation of `exp(-i t H) v`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // Float is redundant when std is linked
use num_traits::{Float, Zero};

use crate::{Error, Result};

type C64 = Complex64;

/// A Hermitian linear map applied without materializing its matrix.
pub trait HermitianOperator {
    fn dim(&self) -> usize;

    /// Writes `H x` into `y` (overwriting it).
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

/// `<a|b>` (conjugate-linear in `a`).
#[inline]
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::zero(), |acc, (x, y)| acc + x.conj() * y)
}

#[inline]
pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [C64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// Eigen-decomposition of the real symmetric tridiagonal matrix with
/// diagonal `diag` and super-diagonal `off` (`off.len() + 1 == diag.len()`)
/// by implicit QL iteration.
///
/// Returns eigenvalues in ascending order and the eigenvector matrix in
/// row-major layout; column `j` is the eigenvector of eigenvalue `j`.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    debug_assert_eq!(off.len() + 1, n);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NotConverged {
                        what: "tridiagonal QL",
                        residual: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let row = k * n;
                        h = z[row + i + 1];
                        z[row + i + 1] = s * z[row + i] + c * h;
                        z[row + i] = c * z[row + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&j| d[j]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + new_j] = z[k * n + old_j];
        }
    }
    Ok((values, vectors))
}

/// Lowest eigenpair with its explicit residual `‖Hv − λv‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Required explicit residual norm.
    pub tol: f64,
    /// Krylov basis size per restart cycle.
    pub max_basis: usize,
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_basis: 64,
            max_restarts: 200,
        }
    }
}

/// Restarted Lanczos with full reorthogonalization. Each cycle restarts from
/// the current Ritz vector for the smallest Ritz value.
pub fn lanczos_lowest<O: HermitianOperator + ?Sized>(
    op: &O,
    start: &[C64],
    opts: &LanczosOptions,
) -> Result<EigenPair> {
    let n = op.dim();
    if n == 0 || start.len() != n {
        return Err(Error::InvalidArgument("start vector does not match operator".into()));
    }
    let m_max = opts.max_basis.max(2).min(n);
    let mut x = start.to_vec();
    let nx = norm(&x);
    if nx == 0.0 || !nx.is_finite() {
        return Err(Error::InvalidArgument("start vector must be nonzero".into()));
    }
    scale(1.0 / nx, &mut x);

    let mut w = vec![C64::zero(); n];
    let mut last_residual = f64::INFINITY;
    for _ in 0..opts.max_restarts.max(1) {
        let mut basis: Vec<Vec<C64>> = vec![x.clone()];
        let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
        let mut betas: Vec<f64> = Vec::with_capacity(m_max);
        let mut spectral_scale: f64 = 0.0;
        let (theta, coeffs) = loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            let alpha = dot(&basis[j], &w).re;
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                }
            }
            let beta = norm(&w);
            alphas.push(alpha);
            spectral_scale = spectral_scale.max(alpha.abs() + beta);

            let (vals, vecs) = tridiagonal_eigen(&alphas, &betas)?;
            let m = alphas.len();
            let coeffs: Vec<f64> = (0..m).map(|k| vecs[k * m]).collect();
            let estimate = beta * coeffs[m - 1].abs();
            let breakdown = beta <= 1e-13 * spectral_scale.max(1.0);
            if estimate <= 0.25 * opts.tol || breakdown || m == m_max {
                break (vals[0], coeffs);
            }
            betas.push(beta);
            let mut next = w.clone();
            scale(1.0 / beta, &mut next);
            basis.push(next);
        };

        x.iter_mut().for_each(|z| *z = C64::zero());
        for (v, &c) in basis.iter().zip(&coeffs) {
            axpy(C64::new(c, 0.0), v, &mut x);
        }
        let nx = norm(&x);
        scale(1.0 / nx, &mut x);

        op.apply(&x, &mut w);
        axpy(C64::new(-theta, 0.0), &x, &mut w);
        last_residual = norm(&w);
        if last_residual <= opts.tol {
            return Ok(EigenPair {
                value: theta,
                vector: x,
                residual: last_residual,
            });
        }
    }
    Err(Error::NotConverged {
        what: "Lanczos ground state",
        residual: last_residual,
    })
}

/// Lowest eigenpair of a dense Hermitian matrix.
pub fn dense_lowest(matrix: DMatrix<C64>) -> EigenPair {
    let n = matrix.nrows();
    let eig = nalgebra::linalg::SymmetricEigen::new(matrix.clone());
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("matrix has at least one row");
    let col = eig.eigenvectors.column(idx);
    let mut vector: Vec<C64> = col.iter().copied().collect();
    let nv = norm(&vector);
    scale(1.0 / nv, &mut vector);
    let residual = {
        let v = nalgebra::DVector::from_column_slice(&vector);
        let r = &matrix * &v - v * C64::new(value, 0.0);
        r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    };
    debug_assert_eq!(vector.len(), n);
    EigenPair {
        value,
        vector,
        residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpmOptions {
    /// Target norm error of the propagated vector.
    pub tol: f64,
    /// Krylov dimension per substep; longer times are split into substeps.
    pub max_krylov_dim: usize,
    pub max_substeps: usize,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_krylov_dim: 60,
            max_substeps: 10_000,
        }
    }
}

/// `exp(-i t H) v` by Lanczos projection with adaptive substepping.
///
/// For a Krylov space of dimension `m` the a-posteriori error of a step of
/// length `tau` is estimated by `beta_m |e_m^T exp(-i tau T_m) e_1|`; a step
/// is accepted when that estimate is at most `tol * tau / |t|`.
pub fn krylov_expm<O: HermitianOperator + ?Sized>(
    op: &O,
    t: f64,
    v: &[C64],
    opts: &ExpmOptions,
) -> Result<Vec<C64>> {
    let n = op.dim();
    if v.len() != n {
        return Err(Error::InvalidArgument("vector does not match operator".into()));
    }
    let v_norm = norm(v);
    if t == 0.0 || v_norm == 0.0 {
        return Ok(v.to_vec());
    }
    let total = t.abs();
    let sign = t.signum();
    // keep the Krylov basis under about 2^24 amplitudes
    let m_cap = opts.max_krylov_dim.min((1usize << 24) / n).max(8).min(n);

    let mut cur = v.to_vec();
    let mut done = 0.0;
    let mut w = vec![C64::zero(); n];
    let mut substeps = 0;
    while done < total {
        substeps += 1;
        if substeps > opts.max_substeps {
            return Err(Error::NotConverged {
                what: "Krylov exponential (substep budget)",
                residual: total - done,
            });
        }
        let remaining = total - done;
        let cur_norm = norm(&cur);
        scale(1.0 / cur_norm, &mut cur);

        let mut basis: Vec<Vec<C64>> = vec![core::mem::take(&mut cur)];
        let mut alphas: Vec<f64> = Vec::with_capacity(m_cap);
        let mut betas: Vec<f64> = Vec::with_capacity(m_cap);
        let mut spectral_scale: f64 = 0.0;
        let (tau, coeffs) = loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            let alpha = dot(&basis[j], &w).re;
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
            let beta = norm(&w);
            alphas.push(alpha);
            spectral_scale = spectral_scale.max(alpha.abs() + beta);
            let breakdown = beta <= 1e-13 * spectral_scale.max(1.0);

            let (vals, vecs) = tridiagonal_eigen(&alphas, &betas)?;
            let m = alphas.len();
            let propagate = |tau: f64| -> Vec<C64> {
                // y = S exp(-i sign tau Theta) S^T e1
                let phases: Vec<C64> = (0..m)
                    .map(|k| C64::from_polar(vecs[k], -sign * tau * vals[k]))
                    .collect();
                (0..m)
                    .map(|r| (0..m).map(|k| phases[k] * vecs[r * m + k]).sum())
                    .collect()
            };
            let error = |y: &[C64]| if breakdown { 0.0 } else { beta * y[m - 1].norm() };

            let y = propagate(remaining);
            if error(&y) <= opts.tol * remaining / total {
                break (remaining, y);
            }
            if m == m_cap {
                // largest acceptable sub-step by bisection
                let mut lo = 0.0;
                let mut hi = remaining;
                let mut best = None;
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    let y = propagate(mid);
                    if error(&y) <= opts.tol * mid / total {
                        lo = mid;
                        best = Some((mid, y));
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-3 * hi {
                        break;
                    }
                }
                match best {
                    Some(found) if found.0 > total * 1e-12 => break found,
                    _ => {
                        return Err(Error::NotConverged {
                            what: "Krylov exponential",
                            residual: error(&propagate(remaining)),
                        })
                    }
                }
            }
            betas.push(beta);
            let mut next = w.clone();
            scale(1.0 / beta, &mut next);
            basis.push(next);
        };

        cur = vec![C64::zero(); n];
        for (b, c) in basis.iter().zip(&coeffs) {
            axpy(c * cur_norm, b, &mut cur);
        }
        done += tau;
    }
    let out_norm = norm(&cur);
    scale(v_norm / out_norm, &mut cur);
    Ok(cur)
}
