//! One-sided Jacobi SVD and budgeted truncation.

use super::matrix::DenseMatrix;
use super::real::Real;
use crate::error::{Error, Result};

/// `A = U diag(S) Vᵀ` with `U: m x r`, `V: n x r`.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    pub v: DenseMatrix<T>,
    /// Sum of squared singular values that were dropped.
    pub discarded: T,
}

const MAX_SWEEPS: usize = 80;

/// Full thin SVD with singular values in descending order.
pub fn svd<T: Real>(a: &DenseMatrix<T>) -> Result<Svd<T>> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u, discarded: t.discarded });
    }
    let (m, n) = (a.rows(), a.cols());
    let zero = a.data()[0].zero_like();
    let one = zero.one_like();
    let eps = zero.from_f64_like(2f64.powi(-(zero.bits() as i32)));
    // Rounding in a column dot product grows with its length.
    let tol = eps.clone() * &zero.from_f64_like(m as f64);
    let mut frob = zero.clone();
    for x in a.data() {
        frob.add_mul(x, x);
    }
    let negligible = frob * &eps * &eps;
    // Column-major working copies.
    let mut u: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { one.clone() } else { zero.clone() }).collect())
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        // squared column norms, refreshed every sweep and updated in place
        // after each rotation
        let mut norms: Vec<T> = u
            .iter()
            .map(|col| {
                let mut s = zero.clone();
                for x in col {
                    s.add_mul(x, x);
                }
                s
            })
            .collect();
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta) = (norms[p].clone(), norms[q].clone());
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let mut gamma = zero.clone();
                for (x, y) in u[p].iter().zip(&u[q]) {
                    gamma.add_mul(x, y);
                }
                if gamma.is_zero() || gamma.abs() <= tol.clone() * (alpha.clone() * &beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - &alpha) / (gamma.clone() + &gamma);
                let root = (one.clone() + zeta.clone() * &zeta).sqrt();
                let t = if zeta >= zero {
                    one.clone() / (zeta.clone() + &root)
                } else {
                    -(one.clone() / (root - &zeta))
                };
                let c = one.clone() / (one.clone() + t.clone() * &t).sqrt();
                let s = c.clone() * &t;
                rotate(&mut u, p, q, &c, &s);
                rotate(&mut v, p, q, &c, &s);
                let shift = t * &gamma;
                norms[p] -= &shift;
                norms[q] += &shift;
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NonConvergence { what: "Jacobi SVD sweeps".into(), iterations: MAX_SWEEPS });
    }

    let mut sig: Vec<(T, usize)> = u
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let mut s = zero.clone();
            for x in col {
                s.add_mul(x, x);
            }
            (s.sqrt(), j)
        })
        .collect();
    sig.sort_by(|a, b| b.0.total_cmp_f(&a.0).then(a.1.cmp(&b.1)));

    let mut ud = Vec::with_capacity(m * n);
    let mut vd = Vec::with_capacity(n * n);
    for i in 0..m {
        for (s, j) in &sig {
            ud.push(if s.is_zero() { zero.clone() } else { u[*j][i].clone() / s });
        }
    }
    for i in 0..n {
        for (_, j) in &sig {
            vd.push(v[*j][i].clone());
        }
    }
    Ok(Svd {
        u: DenseMatrix::from_vec(m, n, ud)?,
        s: sig.into_iter().map(|(s, _)| s).collect(),
        v: DenseMatrix::from_vec(n, n, vd)?,
        discarded: zero,
    })
}

fn rotate<T: Real>(cols: &mut [Vec<T>], p: usize, q: usize, c: &T, s: &T) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let nx = c.clone() * &*x - s.clone() * &*y;
        let ny = s.clone() * &*x + c.clone() * &*y;
        *x = nx;
        *y = ny;
    }
}

/// Smallest-rank factorization whose dropped `σ²` sum to at most `budget`.
/// Exact zero singular values are always dropped; at least one is kept.
pub fn svd_truncate<T: Real>(a: &DenseMatrix<T>, budget: &T) -> Result<Svd<T>> {
    let full = svd(a)?;
    let zero = budget.zero_like();
    if *budget < zero {
        return Err(Error::InvalidParameter("truncation budget must be nonnegative".into()));
    }
    let mut nonzero = full.s.iter().take_while(|s| !s.is_zero()).count().max(1);
    nonzero = nonzero.min(full.s.len());
    // Tail sums from the end.
    let mut keep = nonzero;
    let mut tail = zero.clone();
    while keep > 1 {
        let mut next = tail.clone();
        next.add_mul(&full.s[keep - 1], &full.s[keep - 1]);
        if next > *budget {
            break;
        }
        tail = next;
        keep -= 1;
    }
    Ok(truncate_to(full, keep, tail))
}

fn truncate_to<T: Real>(full: Svd<T>, keep: usize, discarded: T) -> Svd<T> {
    let (m, n) = (full.u.rows(), full.v.rows());
    let r = full.s.len();
    let mut ud = Vec::with_capacity(m * keep);
    for i in 0..m {
        ud.extend_from_slice(&full.u.row(i)[..keep]);
    }
    let mut vd = Vec::with_capacity(n * keep);
    for i in 0..n {
        vd.extend_from_slice(&full.v.row(i)[..keep]);
    }
    debug_assert!(keep <= r);
    Svd {
        u: DenseMatrix::from_vec(m, keep, ud).expect("shape"),
        s: full.s.into_iter().take(keep).collect(),
        v: DenseMatrix::from_vec(n, keep, vd).expect("shape"),
        discarded,
    }
}

impl<T: Real> Svd<T> {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for j in 0..us.cols() {
                us[(i, j)] *= &self.s[j];
            }
        }
        us.matmul(&self.v.transpose()).expect("shape")
    }
}
