//! Hamming-sector transfer matrices of the all-to-all model.

use rug::Integer;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::{DenseMatrix, PrecisionContext, Real};

fn check_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("number of sites must be even and positive, got {n}")));
    }
    Ok(())
}

fn factorials(n: usize) -> Vec<Integer> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(Integer::from(1));
    for i in 1..=n {
        let next = Integer::from(&f[i - 1] * i as u64);
        f.push(next);
    }
    f
}

fn powers<T: Real>(x: &T, max: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = x.one_like();
    for _ in 0..=max {
        out.push(acc.clone());
        acc *= x;
    }
    out
}

/// Gate layer averaged over uniformly random perfect matchings.
///
/// A column `S` splits into `n0` pairs `00`, `n1` mixed pairs and `n2`
/// pairs `11`; mixed pairs go to `00`, stay mixed or go to `11` with
/// weights `q²α/(q²+1)`, `1-α`, `α/(q²+1)`. Combinatorial factors are
/// exact integers, so nothing cancels at large `N`. The matrix does not
/// depend on `β`.
pub fn reduced_gate_matrix<T: Real>(ctx: &PrecisionContext, n: usize, q: u32, alpha: &T) -> Result<DenseMatrix<T>> {
    check_even(n)?;
    let half = n / 2;
    let q2: T = ctx.real((q as f64) * (q as f64));
    let den = q2.clone() + ctx.one::<T>();
    let pa = alpha.clone() * &q2 / &den;
    let pb = ctx.one::<T>() - alpha;
    let pc = alpha.clone() / &den;
    let (pwa, pwb, pwc) = (powers(&pa, half), powers(&pb, n), powers(&pc, half));
    let fact = factorials(n);

    // g[n1][k]: mixed pairs n1 -> total output weight k
    let mut g: Vec<Vec<T>> = Vec::with_capacity(half + 1);
    for n1 in 0..=half {
        let mut row = vec![ctx.zero::<T>(); 2 * n1 + 1];
        for c in 0..=n1 {
            for b in 0..=(n1 - c) {
                let a = n1 - b - c;
                let mult = Integer::from(&fact[n1] / &fact[a]) / &fact[b] / &fact[c];
                let mut term: T = ctx.int(&mult);
                term *= &pwa[a];
                term *= &pwb[b];
                term *= &pwc[c];
                row[b + 2 * c] += term;
            }
        }
        g.push(row);
    }

    let mut data = vec![ctx.zero::<T>(); (n + 1) * (n + 1)];
    for s in 0..=n {
        let binom = Integer::from(&fact[n] / &fact[s]) / &fact[n - s];
        let binom_t: T = ctx.int(&binom);
        for n2 in 0..=(s / 2) {
            let n1 = s - 2 * n2;
            if n1 + n2 > half {
                continue;
            }
            let n0 = half - n1 - n2;
            let mult = Integer::from(&fact[half] / &fact[n0]) / &fact[n1] / &fact[n2];
            let weight: T = ctx.int::<T>(&(mult << n1 as u32)) / &binom_t;
            for (k, gk) in g[n1].iter().enumerate() {
                let sp = k + 2 * n2;
                data[sp * (n + 1) + s].add_mul(&weight, gk);
            }
        }
    }
    DenseMatrix::from_vec(n + 1, n + 1, data)
}

/// `N_{S',S} = C(S,S') (1-γ)^{S'} γ^{S-S'}`
pub fn reduced_noise_matrix<T: Real>(ctx: &PrecisionContext, n: usize, gamma: &T) -> Result<DenseMatrix<T>> {
    check_even(n)?;
    if *gamma < ctx.zero::<T>() || *gamma > ctx.one::<T>() {
        return Err(Error::InvalidParameter(format!("gamma {} outside [0, 1]", gamma.to_f64())));
    }
    let keep = powers(&(ctx.one::<T>() - gamma), n);
    let decay = powers(gamma, n);
    let fact = factorials(n);
    let mut data = vec![ctx.zero::<T>(); (n + 1) * (n + 1)];
    for s in 0..=n {
        for sp in 0..=s {
            let binom = Integer::from(&fact[s] / &fact[sp]) / &fact[s - sp];
            let mut x: T = ctx.int(&binom);
            x *= &keep[sp];
            x *= &decay[s - sp];
            data[sp * (n + 1) + s] = x;
        }
    }
    DenseMatrix::from_vec(n + 1, n + 1, data)
}

/// `T_red = N_red · M_red` together with its factors.
#[derive(Clone, Debug)]
pub struct ReducedTransfer<T> {
    pub n: usize,
    pub q: u32,
    pub alpha: T,
    pub gamma: T,
    pub m_red: DenseMatrix<T>,
    pub n_red: DenseMatrix<T>,
    pub t_red: DenseMatrix<T>,
}

impl<T: Real> ReducedTransfer<T> {
    pub fn new(params: &ModelParams<T>, n: usize) -> Result<Self> {
        let ctx = &params.ctx;
        let m_red = reduced_gate_matrix(ctx, n, params.q, &params.alpha)?;
        let n_red = reduced_noise_matrix(ctx, n, &params.gamma)?;
        let t_red = if params.gamma.is_zero() { m_red.clone() } else { n_red.matmul(&m_red)? };
        Ok(Self { n, q: params.q, alpha: params.alpha.clone(), gamma: params.gamma.clone(), m_red, n_red, t_red })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dense::{a2a_dense_transfer, project_to_sectors};
    use crate::numerics::BigFloat;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn close(a: &BigFloat, b: f64) -> bool {
        (a.to_f64() - b).abs() < 1e-60
    }

    #[test]
    fn two_site_haar_columns() {
        let c = ctx();
        let m = reduced_gate_matrix::<BigFloat>(&c, 2, 2, &c.one()).unwrap();
        let want = [[1.0, 0.8, 0.0], [0.0, 0.0, 0.0], [0.0, 0.2, 1.0]];
        for (i, row) in want.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert!(close(&m[(i, j)], x), "M[{i},{j}]");
            }
        }
    }

    #[test]
    fn four_site_single_swap_column() {
        let c = ctx();
        let m = reduced_gate_matrix::<BigFloat>(&c, 4, 2, &c.one()).unwrap();
        assert!(close(&m[(0, 1)], 0.8));
        assert!(close(&m[(2, 1)], 0.2));
        assert!(close(&m[(1, 1)], 0.0));
    }

    #[test]
    fn noise_matrix_examples() {
        let c = ctx();
        let n = reduced_noise_matrix::<BigFloat>(&c, 2, &c.ratio(1, 2)).unwrap();
        assert!(close(&n[(0, 2)], 0.25) && close(&n[(1, 2)], 0.5) && close(&n[(2, 2)], 0.25));
        let n = reduced_noise_matrix::<BigFloat>(&c, 6, &c.one()).unwrap();
        for s in 0..=6 {
            assert!(close(&n[(0, s)], 1.0));
        }
        let n = reduced_noise_matrix::<BigFloat>(&c, 6, &c.zero()).unwrap();
        assert_eq!(n, DenseMatrix::identity(&c, 7));
    }

    #[test]
    fn columns_sum_to_one() {
        let c = ctx();
        for alpha in [0.0, 0.3, 1.0, 10.0 / 9.0] {
            let p = ModelParams::<BigFloat>::a2a(&c, 2, c.real(alpha), c.real(0.07)).unwrap();
            let t = ReducedTransfer::new(&p, 30).unwrap();
            for s in t.t_red.column_sums() {
                assert!((s.to_f64() - 1.0).abs() < 1e-60);
            }
        }
    }

    #[test]
    fn matches_matching_average() {
        let c = ctx();
        for n in [4usize, 6] {
            let p = ModelParams::<BigFloat>::a2a(&c, 2, c.real(0.7), c.real(0.11)).unwrap();
            let dense = a2a_dense_transfer(n, &p).unwrap();
            let (proj, spread) = project_to_sectors(&dense, n);
            assert!(spread.to_f64() < 1e-60);
            let red = ReducedTransfer::new(&p, n).unwrap();
            assert!(proj.max_abs_diff(&red.t_red).unwrap().to_f64() < 1e-60);
        }
    }

    #[test]
    fn qudit_dimension_three() {
        let c = PrecisionContext::double();
        let p = ModelParams::<f64>::a2a(&c, 3, 1.0, 0.05).unwrap();
        let dense = a2a_dense_transfer(4, &p).unwrap();
        let (proj, _) = project_to_sectors(&dense, 4);
        let red = ReducedTransfer::new(&p, 4).unwrap();
        assert!(proj.max_abs_diff(&red.t_red).unwrap() < 1e-13);
    }
}
