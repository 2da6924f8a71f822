use super::matrix::DenseMatrix;
use super::real::Real;

/// Thin Householder QR of an `m x n` matrix: `A = Q R` with `Q` of shape
/// `m x k`, `R` of shape `k x n`, `k = min(m, n)`. The diagonal of `R` is
/// made nonnegative.
pub fn thin_qr<T: Real>(a: &DenseMatrix<T>) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    let zero = a.data()[0].zero_like();
    let mut r = a.clone();
    let mut vs: Vec<Vec<T>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut norm = zero.clone();
        for i in j..m {
            norm.add_mul(&r[(i, j)], &r[(i, j)]);
        }
        let norm = norm.sqrt();
        let mut v: Vec<T> = (j..m).map(|i| r[(i, j)].clone()).collect();
        if norm.is_zero() {
            vs.push(Vec::new());
            continue;
        }
        let alpha = if v[0] > zero { -norm.clone() } else { norm.clone() };
        v[0] -= &alpha;
        let mut vnorm = zero.clone();
        for x in &v {
            vnorm.add_mul(x, x);
        }
        if vnorm.is_zero() {
            vs.push(Vec::new());
            continue;
        }
        let two = zero.from_f64_like(2.0);
        let scale = two / vnorm;
        for col in j..n {
            let mut s = zero.clone();
            for (t, x) in v.iter().enumerate() {
                s.add_mul(x, &r[(j + t, col)]);
            }
            s *= &scale;
            for (t, x) in v.iter().enumerate() {
                r[(j + t, col)].sub_mul(&s, x);
            }
        }
        let mut vv = v;
        let sq = scale.sqrt();
        for x in vv.iter_mut() {
            *x *= &sq;
        }
        vs.push(vv);
    }
    // Accumulate Q = H_0 H_1 ... H_{k-1} applied to the first k unit columns.
    let mut q = DenseMatrix::from_vec(m, k, vec![zero.clone(); m * k]).expect("shape");
    for i in 0..k {
        q[(i, i)] = zero.one_like();
    }
    for j in (0..k).rev() {
        let v = &vs[j];
        if v.is_empty() {
            continue;
        }
        for col in 0..k {
            let mut s = zero.clone();
            for (t, x) in v.iter().enumerate() {
                s.add_mul(x, &q[(j + t, col)]);
            }
            for (t, x) in v.iter().enumerate() {
                q[(j + t, col)].sub_mul(&s, x);
            }
        }
    }
    let mut rr = DenseMatrix::from_vec(k, n, vec![zero.clone(); k * n]).expect("shape");
    for i in 0..k {
        for j in i..n {
            rr[(i, j)] = r[(i, j)].clone();
        }
    }
    for i in 0..k {
        if rr[(i, i)] < zero {
            for j in i..n {
                rr[(i, j)] = -rr[(i, j)].clone();
            }
            for row in 0..m {
                q[(row, i)] = -q[(row, i)].clone();
            }
        }
    }
    (q, rr)
}

/// Thin LQ, `A = L Q` with `Q` having orthonormal rows.
pub fn thin_lq<T: Real>(a: &DenseMatrix<T>) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let (q, r) = thin_qr(&a.transpose());
    (r.transpose(), q.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{BigFloat, PrecisionContext};

    #[test]
    fn reconstructs_and_is_orthonormal() {
        let ctx = PrecisionContext::new(128).unwrap();
        let rows: Vec<Vec<BigFloat>> = (0..5)
            .map(|i| (0..3).map(|j| ctx.real(((i * 3 + j * 7) % 5) as f64 - 1.5)).collect())
            .collect();
        let a = DenseMatrix::from_rows(rows).unwrap();
        let (q, r) = thin_qr(&a);
        assert_eq!((q.rows(), q.cols(), r.rows(), r.cols()), (5, 3, 3, 3));
        assert!(q.matmul(&r).unwrap().max_abs_diff(&a).unwrap().to_f64() < 1e-35);
        let qtq = q.transpose().matmul(&q).unwrap();
        let id = DenseMatrix::identity(&ctx, 3);
        assert!(qtq.max_abs_diff(&id).unwrap().to_f64() < 1e-35);
    }

    #[test]
    fn lq_of_wide_matrix() {
        let ctx = PrecisionContext::double();
        let a = DenseMatrix::<f64>::from_f64_rows(&ctx, &[&[1.0, 2.0, 3.0], &[0.0, 1.0, 4.0]]).unwrap();
        let (l, q) = thin_lq(&a);
        assert_eq!((l.rows(), l.cols(), q.rows(), q.cols()), (2, 2, 2, 3));
        assert!(l.matmul(&q).unwrap().max_abs_diff(&a).unwrap() < 1e-14);
    }
}
