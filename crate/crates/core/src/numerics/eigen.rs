//! Nonsymmetric dense eigensolver.
//!
//! Eigenvalues come from a Householder reduction to upper Hessenberg form
//! followed by Francis double-shift QR sweeps (the EISPACK `orthes`/`hqr`
//! pair). Left and right eigenvectors of the requested leading real
//! eigenvalues are then obtained by inverse iteration on `A - λI` and
//! `Aᵀ - λI`. Everything is generic over [`Real`], so the same code runs in
//! `f64` and in any MPFR precision.

use std::cmp::Ordering;

use super::matrix::{dot, matvec, norm_inf_vec, vecmat, DenseMatrix};
use super::real::Real;
use crate::error::{Error, Result};

/// One eigenvalue, with vectors when it is real.
#[derive(Clone, Debug)]
pub struct EigenPair<T> {
    pub value: T,
    /// Imaginary part; zero for real eigenvalues.
    pub imag: T,
    pub right: Option<Vec<T>>,
    pub left: Option<Vec<T>>,
}

impl<T: Real> EigenPair<T> {
    pub fn is_complex(&self) -> bool {
        !self.imag.is_zero()
    }

    pub fn modulus(&self) -> T {
        (self.value.clone() * &self.value + self.imag.clone() * &self.imag).sqrt()
    }
}

/// Leading eigenpairs sorted by descending modulus.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub pairs: Vec<EigenPair<T>>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        self.pairs.iter().map(|p| p.value.clone()).collect()
    }

    pub fn right_vectors(&self) -> Vec<Option<&Vec<T>>> {
        self.pairs.iter().map(|p| p.right.as_ref()).collect()
    }

    pub fn left_vectors(&self) -> Vec<Option<&Vec<T>>> {
        self.pairs.iter().map(|p| p.left.as_ref()).collect()
    }

    /// Real eigenvalues only, in order.
    pub fn real_values(&self) -> Vec<T> {
        self.pairs.iter().filter(|p| !p.is_complex()).map(|p| p.value.clone()).collect()
    }
}

/// Iteration controls for [`eig_dense_with`].
#[derive(Clone, Copy, Debug)]
pub struct EigenConfig {
    /// QR sweeps allowed per eigenvalue.
    pub max_sweeps_per_value: usize,
    pub inverse_iterations: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { max_sweeps_per_value: 60, inverse_iterations: 8 }
    }
}

/// The `k` leading eigenpairs of a square matrix.
pub fn eig_dense<T: Real>(m: &DenseMatrix<T>, k: usize) -> Result<EigenDecomposition<T>> {
    eig_dense_with(m, k, &EigenConfig::default())
}

pub fn eig_dense_with<T: Real>(
    m: &DenseMatrix<T>,
    k: usize,
    cfg: &EigenConfig,
) -> Result<EigenDecomposition<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if k > n {
        return Err(Error::InvalidParameter(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    let values = eigenvalues(m, cfg)?;
    let bits = m.data()[0].bits();
    let tol = m.data()[0].from_f64_like(2f64.powf(-(bits as f64) / 2.0));
    let norm = m.norm_inf();
    let scale_tol = tol.clone() * &norm.clone().max_of(m.data()[0].one_like());
    let mt = m.transpose();

    let mut pairs = Vec::with_capacity(k);
    for (re, im) in values.into_iter().take(k) {
        // Imaginary parts at rounding level are treated as a split real pair.
        let complex = im.abs() > scale_tol;
        if complex {
            pairs.push(EigenPair { value: re, imag: im, right: None, left: None });
            continue;
        }
        let right = inverse_iteration(m, &re, None, cfg.inverse_iterations)?;
        let left = inverse_iteration(&mt, &re, None, cfg.inverse_iterations)?;
        let imag = re.zero_like();
        pairs.push(EigenPair { value: re, imag, right: Some(right), left: Some(left) });
    }
    Ok(EigenDecomposition { pairs })
}

/// All eigenvalues as `(re, im)`, sorted by descending modulus with ties
/// broken by real then imaginary part.
pub fn eigenvalues<T: Real>(m: &DenseMatrix<T>, cfg: &EigenConfig) -> Result<Vec<(T, T)>> {
    let n = m.rows();
    let mut h = m.clone();
    hessenberg(&mut h);
    let (mut wr, mut wi) = hqr(&mut h, cfg.max_sweeps_per_value * n.max(1))?;
    let mut order: Vec<usize> = (0..n).collect();
    let moduli: Vec<T> = (0..n)
        .map(|i| (wr[i].clone() * &wr[i] + wi[i].clone() * &wi[i]).sqrt())
        .collect();
    order.sort_by(|&a, &b| {
        moduli[b]
            .total_cmp_f(&moduli[a])
            .then_with(|| wr[b].total_cmp_f(&wr[a]))
            .then_with(|| wi[b].total_cmp_f(&wi[a]))
    });
    let zero = m.data()[0].zero_like();
    Ok(order
        .into_iter()
        .map(|i| {
            (
                std::mem::replace(&mut wr[i], zero.clone()),
                std::mem::replace(&mut wi[i], zero.clone()),
            )
        })
        .collect())
}

/// Reduce to upper Hessenberg form by Householder similarity transforms.
pub(crate) fn hessenberg<T: Real>(h: &mut DenseMatrix<T>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let zero = h.data()[0].zero_like();
    let mut ort = vec![zero.clone(); n];
    let high = n - 1;
    for m in 1..high {
        let mut scale = zero.clone();
        for i in m..=high {
            scale += h[(i, m - 1)].abs();
        }
        if scale.is_zero() {
            continue;
        }
        let mut hh = zero.clone();
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)].clone() / &scale;
            hh.add_mul(&ort[i], &ort[i]);
        }
        let mut g = hh.sqrt();
        if ort[m] > zero {
            g = -g;
        }
        hh.sub_mul(&ort[m], &g);
        ort[m] -= &g;

        for j in m..n {
            let mut f = zero.clone();
            for i in (m..=high).rev() {
                f.add_mul(&ort[i], &h[(i, j)]);
            }
            f /= &hh;
            for i in m..=high {
                h[(i, j)].sub_mul(&f, &ort[i]);
            }
        }
        for i in 0..=high {
            let mut f = zero.clone();
            for j in (m..=high).rev() {
                f.add_mul(&ort[j], &h[(i, j)]);
            }
            f /= &hh;
            for j in m..=high {
                h[(i, j)].sub_mul(&f, &ort[j]);
            }
        }
        ort[m] *= &scale;
        h[(m, m - 1)] = scale * &g;
        for i in (m + 1)..=high {
            h[(i, m - 1)] = zero.clone();
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted double QR.
fn hqr<T: Real>(h: &mut DenseMatrix<T>, max_sweeps: usize) -> Result<(Vec<T>, Vec<T>)> {
    let nn = h.rows();
    let zero = h.data()[0].zero_like();
    let one = zero.one_like();
    let bits = zero.bits();
    let eps = zero.from_f64_like(2f64.powi(-(bits as i32)));
    let mut wr = vec![zero.clone(); nn];
    let mut wi = vec![zero.clone(); nn];
    if nn == 1 {
        wr[0] = h[(0, 0)].clone();
        return Ok((wr, wi));
    }

    let mut norm = zero.clone();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }
    if norm.is_zero() {
        return Ok((wr, wi));
    }

    let half = zero.from_f64_like(0.5);
    let mut n = nn as isize - 1;
    let mut exshift = zero.clone();
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);
    let mut iter = 0usize;
    let mut total = 0usize;

    while n >= 0 {
        let nu = n as usize;
        // Small subdiagonal element.
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s.is_zero() {
                s = norm.clone();
            }
            // The absolute test is still backward stable and lets clusters
            // of tiny eigenvalues (defective zero blocks) deflate.
            let sub = h[(l, l - 1)].abs();
            if sub < eps.clone() * &s || sub < eps.clone() * &norm {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root.
            h[(nu, nu)] += &exshift;
            wr[nu] = h[(nu, nu)].clone();
            wi[nu] = zero.clone();
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // Two roots.
            w = h[(nu, nu - 1)].clone() * &h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)].clone() - &h[(nu, nu)]) * &half;
            q = p.clone() * &p + &w;
            z = q.abs().sqrt();
            h[(nu, nu)] += &exshift;
            h[(nu - 1, nu - 1)] += &exshift;
            x = h[(nu, nu)].clone();
            if q >= zero {
                z = if p >= zero { p.clone() + &z } else { p.clone() - &z };
                wr[nu - 1] = x.clone() + &z;
                wr[nu] = wr[nu - 1].clone();
                if !z.is_zero() {
                    wr[nu] = x.clone() - w.clone() / &z;
                }
                wi[nu - 1] = zero.clone();
                wi[nu] = zero.clone();
            } else {
                wr[nu - 1] = x.clone() + &p;
                wr[nu] = x.clone() + &p;
                wi[nu - 1] = z.clone();
                wi[nu] = -z.clone();
            }
            n -= 2;
            iter = 0;
        } else {
            // Shift.
            x = h[(nu, nu)].clone();
            y = zero.clone();
            w = zero.clone();
            if l < nu {
                y = h[(nu - 1, nu - 1)].clone();
                w = h[(nu, nu - 1)].clone() * &h[(nu - 1, nu)];
            }
            if iter > 0 && iter % 20 == 10 {
                exshift += &x;
                for i in 0..=nu {
                    h[(i, i)] -= &x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = zero.from_f64_like(0.75) * &s;
                y = x.clone();
                w = zero.from_f64_like(-0.4375) * &s * &s;
            }
            if iter > 0 && iter % 20 == 0 {
                s = (y.clone() - &x) * &half;
                s = s.clone() * &s + &w;
                if s > zero {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x.clone() - w.clone() / ((y.clone() - &x) * &half + &s);
                    for i in 0..=nu {
                        h[(i, i)] -= &s;
                    }
                    exshift += &s;
                    x = zero.from_f64_like(0.964);
                    y = x.clone();
                    w = x.clone();
                }
            }
            iter += 1;
            total += 1;
            if total > max_sweeps {
                return Err(Error::NonConvergence {
                    what: "shifted QR eigenvalue sweeps".into(),
                    iterations: total,
                });
            }

            // Two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)].clone();
                r = x.clone() - &z;
                s = y.clone() - &z;
                p = (r.clone() * &s - &w) / &h[(m + 1, m)] + &h[(m, m + 1)];
                q = h[(m + 1, m + 1)].clone() - &z - &r - &s;
                r = h[(m + 2, m + 1)].clone();
                s = p.abs() + q.abs() + r.abs();
                p /= &s;
                q /= &s;
                r /= &s;
                if m == l {
                    break;
                }
                let lhs = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let rhs = eps.clone()
                    * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                h[(i, i - 2)] = zero.clone();
                if i > m + 2 {
                    h[(i, i - 3)] = zero.clone();
                }
            }

            // Double QR step on rows l..=n, columns m..=n.
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)].clone();
                    q = h[(k + 1, k - 1)].clone();
                    r = if notlast { h[(k + 2, k - 1)].clone() } else { zero.clone() };
                    x = p.abs() + q.abs() + r.abs();
                    if x.is_zero() {
                        k += 1;
                        continue;
                    }
                    p /= &x;
                    q /= &x;
                    r /= &x;
                } else {
                    x = one.clone();
                }
                s = (p.clone() * &p + q.clone() * &q + r.clone() * &r).sqrt();
                if p < zero {
                    s = -s;
                }
                if !s.is_zero() {
                    if k != m {
                        h[(k, k - 1)] = -(s.clone() * &x);
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)].clone();
                    }
                    p += &s;
                    x = p.clone() / &s;
                    y = q.clone() / &s;
                    z = r.clone() / &s;
                    q /= &p;
                    r /= &p;

                    for j in k..=nu {
                        let mut pp = h[(k, j)].clone();
                        pp.add_mul(&q, &h[(k + 1, j)]);
                        if notlast {
                            pp.add_mul(&r, &h[(k + 2, j)]);
                            h[(k + 2, j)].sub_mul(&pp, &z);
                        }
                        h[(k, j)].sub_mul(&pp, &x);
                        h[(k + 1, j)].sub_mul(&pp, &y);
                    }
                    let imax = nu.min(k + 3);
                    for i in l..=imax {
                        let mut pp = x.clone() * &h[(i, k)];
                        pp.add_mul(&y, &h[(i, k + 1)]);
                        if notlast {
                            pp.add_mul(&z, &h[(i, k + 2)]);
                            h[(i, k + 2)].sub_mul(&pp, &r);
                        }
                        h[(i, k)] -= &pp;
                        h[(i, k + 1)].sub_mul(&pp, &q);
                    }
                }
                k += 1;
            }
        }
    }
    Ok((wr, wi))
}

/// LU factorisation with partial pivoting of `A - shift·I`; near-zero
/// pivots are replaced by `floor` so that shifts at exact eigenvalues
/// stay solvable.
struct ShiftedLu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> ShiftedLu<T> {
    fn new(a: &DenseMatrix<T>, shift: &T, floor: &T) -> Self {
        let n = a.rows();
        let mut lu: Vec<T> = a.data().to_vec();
        for i in 0..n {
            lu[i * n + i] -= shift;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut piv = col;
            let mut best = lu[col * n + col].abs();
            for row in (col + 1)..n {
                let v = lu[row * n + col].abs();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if piv != col {
                for j in 0..n {
                    lu.swap(col * n + j, piv * n + j);
                }
                perm.swap(col, piv);
            }
            if lu[col * n + col].abs() < *floor {
                lu[col * n + col] = floor.clone();
            }
            let pivot = lu[col * n + col].clone();
            for row in (col + 1)..n {
                let factor = lu[row * n + col].clone() / &pivot;
                if factor.is_zero() {
                    lu[row * n + col] = factor;
                    continue;
                }
                for j in (col + 1)..n {
                    let (upper, lower) = lu.split_at_mut(row * n);
                    lower[j].sub_mul(&factor, &upper[col * n + j]);
                }
                lu[row * n + col] = factor;
            }
        }
        Self { n, lu, perm }
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let (head, tail) = x.split_at_mut(i);
                tail[0].sub_mul(&self.lu[i * n + j], &head[j]);
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let (head, tail) = x.split_at_mut(j);
                head[i].sub_mul(&self.lu[i * n + j], &tail[0]);
            }
            x[i] /= &self.lu[i * n + i];
        }
        x
    }
}

/// Eigenvector of `a` for the (approximate) eigenvalue `lambda` by inverse
/// iteration. Normalised to unit max-norm with the first significant
/// component positive.
pub fn inverse_iteration<T: Real>(
    a: &DenseMatrix<T>,
    lambda: &T,
    start: Option<&[T]>,
    iterations: usize,
) -> Result<Vec<T>> {
    let n = a.rows();
    let zero = a.data()[0].zero_like();
    let bits = zero.bits();
    let norm = a.norm_inf().max_of(zero.one_like());
    let eps = zero.from_f64_like(2f64.powi(-(bits as i32)));
    let floor = eps.clone() * &norm;
    let tol = zero.from_f64_like(2f64.powf(-(bits as f64) / 2.0)) * &norm;
    let lu = ShiftedLu::new(a, lambda, &floor);

    let mut x: Vec<T> = match start {
        Some(s) => s.to_vec(),
        None => (0..n)
            .map(|i| zero.from_f64_like(1.0 + ((i * 7919) % 101) as f64 / 257.0))
            .collect(),
    };
    normalize_max(&mut x);
    for _ in 0..iterations.max(1) {
        let mut y = lu.solve(&x);
        if !normalize_max(&mut y) {
            return Err(Error::Numeric("inverse iteration collapsed to zero".into()));
        }
        x = y;
        let ax = matvec(a, &x)?;
        let mut res = zero.clone();
        for (u, v) in ax.iter().zip(&x) {
            let mut d = u.clone();
            d.sub_mul(lambda, v);
            res = res.max_of(d.abs());
        }
        if res <= tol {
            break;
        }
    }
    sign_convention(&mut x);
    Ok(x)
}

/// Orthonormal basis of the invariant subspace of `a` belonging to a
/// cluster of eigenvalues near `lambda`, by block inverse iteration from
/// the given start vectors. Columns that collapse are refilled from
/// `refill`.
pub fn block_inverse_iteration<T: Real>(
    a: &DenseMatrix<T>,
    lambda: &T,
    starts: Vec<Vec<T>>,
    iterations: usize,
    mut refill: impl FnMut() -> Vec<T>,
) -> Result<Vec<Vec<T>>> {
    let zero = a.data()[0].zero_like();
    let bits = zero.bits();
    let norm = a.norm_inf().max_of(zero.one_like());
    let floor = zero.from_f64_like(2f64.powi(-(bits as i32))) * &norm;
    let lu = ShiftedLu::new(a, lambda, &floor);
    let mut basis = orthonormalize(starts, &mut refill)?;
    for _ in 0..iterations.max(1) {
        let next: Vec<Vec<T>> = basis.iter().map(|x| lu.solve(x)).collect();
        basis = orthonormalize(next, &mut refill)?;
    }
    Ok(basis)
}

/// Modified Gram-Schmidt, applied twice per vector.
fn orthonormalize<T: Real>(vs: Vec<Vec<T>>, refill: &mut impl FnMut() -> Vec<T>) -> Result<Vec<Vec<T>>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut x = v;
        let mut accepted = false;
        for _attempt in 0..4 {
            let scale = norm_inf_vec(&x);
            if !scale.is_finite() {
                return Err(Error::Numeric("non-finite vector in block inverse iteration".into()));
            }
            if !scale.is_zero() {
                for xi in x.iter_mut() {
                    *xi /= &scale;
                }
                let before = dot(&x, &x).sqrt();
                for _ in 0..2 {
                    for q in &out {
                        let c = dot(q, &x);
                        for (xi, qi) in x.iter_mut().zip(q) {
                            xi.sub_mul(&c, qi);
                        }
                    }
                }
                let after = dot(&x, &x).sqrt();
                let tol = before.from_f64_like(2f64.powf(-(before.bits() as f64) / 2.0)) * &before;
                if after > tol {
                    for xi in x.iter_mut() {
                        *xi /= &after;
                    }
                    accepted = true;
                    break;
                }
            }
            x = refill();
        }
        if !accepted {
            return Err(Error::Numeric("could not extend orthonormal basis".into()));
        }
        out.push(x);
    }
    Ok(out)
}

/// Solves `A x = b` by partial-pivot LU; errors when `A` is numerically
/// singular.
pub fn solve_linear<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot solve {}x{} system with rhs of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let zero = a.data()[0].zero_like();
    let eps = zero.from_f64_like(2f64.powi(-(zero.bits() as i32)));
    let norm = a.norm_inf();
    let floor = eps * &norm * &zero.from_f64_like(a.rows() as f64);
    let lu = ShiftedLu::new(a, &zero, &floor);
    for i in 0..lu.n {
        if lu.lu[i * lu.n + i] == floor {
            return Err(Error::Numeric("singular linear system".into()));
        }
    }
    Ok(lu.solve(b))
}

fn normalize_max<T: Real>(v: &mut [T]) -> bool {
    let m = norm_inf_vec(v);
    if m.is_zero() || !m.is_finite() {
        return false;
    }
    for x in v.iter_mut() {
        *x /= &m;
    }
    true
}

/// First component above rounding level made positive.
pub fn sign_convention<T: Real>(v: &mut [T]) {
    let m = norm_inf_vec(v);
    let thresh = m.clone() * &m.from_f64_like(2f64.powf(-(m.bits() as f64) / 2.0));
    if let Some(first) = v.iter().find(|x| x.abs() > thresh) {
        if *first < first.zero_like() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// `max_i |(A v - λ v)_i|` and `max_i |(wᵀA - λ wᵀ)_i|`.
pub fn residuals<T: Real>(a: &DenseMatrix<T>, lambda: &T, right: &[T], left: &[T]) -> Result<(T, T)> {
    let av = matvec(a, right)?;
    let wa = vecmat(left, a)?;
    let mut rr = lambda.zero_like();
    for (u, v) in av.iter().zip(right) {
        let mut d = u.clone();
        d.sub_mul(lambda, v);
        rr = rr.max_of(d.abs());
    }
    let mut rl = lambda.zero_like();
    for (u, w) in wa.iter().zip(left) {
        let mut d = u.clone();
        d.sub_mul(lambda, w);
        rl = rl.max_of(d.abs());
    }
    Ok((rr, rl))
}

/// Orders eigenvalues the same way [`eigenvalues`] does.
pub fn compare_desc<T: Real>(a: &T, b: &T) -> Ordering {
    b.abs().total_cmp_f(&a.abs()).then_with(|| b.total_cmp_f(a))
}

/// Biorthogonal overlap `wᵀv`.
pub fn overlap<T: Real>(left: &[T], right: &[T]) -> T {
    dot(left, right)
}
