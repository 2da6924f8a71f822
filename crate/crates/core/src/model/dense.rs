//! Brute-force evolution over all `2^N` configurations. Site `i` is bit `i`
//! of the configuration index.

use super::params::{
    initial_site_weights, observables_from_sectors, single_site_n, two_site_m, ModelParams, Observables,
};
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, PrecisionContext, Real};

pub const ORACLE_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState<T> {
    n: usize,
    weights: Vec<T>,
}

fn check_sites(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("number of sites must be even and positive, got {n}")));
    }
    if n > limit {
        return Err(Error::OracleLimit { limit, requested: n });
    }
    Ok(())
}

impl<T: Real> DenseState<T> {
    pub fn initial(ctx: &PrecisionContext, n: usize, q: u32) -> Result<Self> {
        check_sites(n, ORACLE_LIMIT)?;
        let w = initial_site_weights::<T>(ctx, q);
        Ok(Self::product(n, &w))
    }

    /// Same product weights on every site.
    pub fn product(n: usize, w: &[T; 2]) -> Self {
        let weights = (0..1usize << n)
            .map(|idx| {
                let mut x = w[0].one_like();
                for i in 0..n {
                    x *= &w[(idx >> i) & 1];
                }
                x
            })
            .collect();
        Self { n, weights }
    }

    pub fn from_weights(n: usize, weights: Vec<T>) -> Result<Self> {
        check_sites(n, ORACLE_LIMIT)?;
        if weights.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!("{} weights for {n} sites", weights.len())));
        }
        Ok(Self { n, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `p_S = Σ_{|σ|=S} p(σ)`
    pub fn sector_weights(&self) -> Vec<T> {
        let mut out = vec![self.weights[0].zero_like(); self.n + 1];
        for (idx, w) in self.weights.iter().enumerate() {
            out[idx.count_ones() as usize] += w;
        }
        out
    }

    pub fn observables(&self, ctx: &PrecisionContext, q: u32) -> Observables<T> {
        observables_from_sectors(ctx, q, &self.sector_weights())
    }

    /// Contraction with a product covector.
    pub fn contract(&self, site: &[T; 2]) -> T {
        let mut acc = self.weights[0].zero_like();
        for (idx, w) in self.weights.iter().enumerate() {
            let mut x = w.clone();
            for i in 0..self.n {
                x *= &site[(idx >> i) & 1];
            }
            acc += x;
        }
        acc
    }

    pub fn apply_two_site(&mut self, i: usize, j: usize, m: &DenseMatrix<T>) {
        let (bi, bj) = (1usize << i, 1usize << j);
        let zero = self.weights[0].zero_like();
        for base in 0..self.weights.len() {
            if base & (bi | bj) != 0 {
                continue;
            }
            // local index 2σ_i + σ_j
            let idx = [base, base | bj, base | bi, base | bi | bj];
            let input: Vec<T> = idx.iter().map(|&k| self.weights[k].clone()).collect();
            for (r, &k) in idx.iter().enumerate() {
                let mut acc = zero.clone();
                for (c, x) in input.iter().enumerate() {
                    acc.add_mul(&m[(r, c)], x);
                }
                self.weights[k] = acc;
            }
        }
    }

    pub fn apply_single_site(&mut self, i: usize, m: &DenseMatrix<T>) {
        let b = 1usize << i;
        for base in 0..self.weights.len() {
            if base & b != 0 {
                continue;
            }
            let (x0, x1) = (self.weights[base].clone(), self.weights[base | b].clone());
            let mut y0 = m[(0, 0)].clone() * &x0;
            y0.add_mul(&m[(0, 1)], &x1);
            let mut y1 = m[(1, 0)].clone() * &x0;
            y1.add_mul(&m[(1, 1)], &x1);
            self.weights[base] = y0;
            self.weights[base | b] = y1;
        }
    }
}

fn check_pairing(n: usize, pairing: &[(usize, usize)]) -> Result<()> {
    let mut used = vec![false; n];
    for &(i, j) in pairing {
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidParameter(format!("invalid pair ({i}, {j}) on {n} sites")));
        }
        for s in [i, j] {
            if used[s] {
                return Err(Error::InvalidParameter(format!("site {s} appears in two pairs")));
            }
            used[s] = true;
        }
    }
    Ok(())
}

/// One layer: `M` on every pair, then `N(γ)` on every site touched by a gate.
pub fn dense_layer<T: Real>(
    state: &DenseState<T>,
    pairing: &[(usize, usize)],
    params: &ModelParams<T>,
) -> Result<DenseState<T>> {
    check_pairing(state.n, pairing)?;
    let m = two_site_m(params);
    let nm = single_site_n(&params.gamma)?;
    let mut out = state.clone();
    for &(i, j) in pairing {
        out.apply_two_site(i, j, &m);
    }
    if !params.gamma.is_zero() {
        for &(i, j) in pairing {
            out.apply_single_site(i, &nm);
            out.apply_single_site(j, &nm);
        }
    }
    Ok(out)
}

/// Brickwork pairs: even parity `(0,1),(2,3),…`; odd parity `(1,2),(3,4),…`.
pub fn brickwork_pairing(n: usize, parity: usize) -> Vec<(usize, usize)> {
    let start = parity % 2;
    (start..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect()
}

/// All `(n-1)!!` perfect matchings of `n` sites.
pub fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let first = rest[0];
        for k in 1..rest.len() {
            let mut next: Vec<usize> = rest[1..].to_vec();
            let partner = next.remove(k - 1);
            cur.push((first, partner));
            rec(&next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let sites: Vec<usize> = (0..n).collect();
    rec(&sites, &mut Vec::new(), &mut out);
    out
}

/// Dense matrix of a linear map on configuration space, one column per
/// basis configuration.
pub fn transfer_from_map<T: Real>(
    ctx: &PrecisionContext,
    n: usize,
    mut map: impl FnMut(&DenseState<T>) -> Result<DenseState<T>>,
) -> Result<DenseMatrix<T>> {
    check_sites(n, ORACLE_LIMIT)?;
    let dim = 1usize << n;
    let mut data = vec![ctx.zero::<T>(); dim * dim];
    for col in 0..dim {
        let mut w = vec![ctx.zero::<T>(); dim];
        w[col] = ctx.one();
        let out = map(&DenseState { n, weights: w })?;
        for (row, x) in out.weights.into_iter().enumerate() {
            data[row * dim + col] = x;
        }
    }
    DenseMatrix::from_vec(dim, dim, data)
}

/// All-to-all layer averaged uniformly over perfect matchings.
pub fn a2a_dense_transfer<T: Real>(n: usize, params: &ModelParams<T>) -> Result<DenseMatrix<T>> {
    check_sites(n, 8)?;
    let matchings = perfect_matchings(n);
    let count: T = params.ctx.real(matchings.len() as f64);
    transfer_from_map(&params.ctx, n, |s| {
        let mut acc = vec![params.ctx.zero::<T>(); s.weights.len()];
        for m in &matchings {
            let out = dense_layer(s, m, params)?;
            for (a, x) in acc.iter_mut().zip(out.weights) {
                *a += x;
            }
        }
        for a in acc.iter_mut() {
            *a /= &count;
        }
        Ok(DenseState { n, weights: acc })
    })
}

/// One brickwork layer of the given parity.
pub fn brickwork_layer_transfer<T: Real>(
    n: usize,
    parity: usize,
    params: &ModelParams<T>,
) -> Result<DenseMatrix<T>> {
    let pairs = brickwork_pairing(n, parity);
    transfer_from_map(&params.ctx, n, |s| dense_layer(s, &pairs, params))
}

/// One brickwork period, odd layer after even layer.
pub fn brickwork_period_transfer<T: Real>(n: usize, params: &ModelParams<T>) -> Result<DenseMatrix<T>> {
    let even = brickwork_layer_transfer(n, 0, params)?;
    let odd = brickwork_layer_transfer(n, 1, params)?;
    odd.matmul(&even)
}

/// Project a permutation-symmetric dense transfer onto Hamming sectors:
/// `T_red[S', S] = Σ_{|σ'|=S'} T(σ', σ_S)` with `σ_S` the lowest-index
/// configuration of weight `S`. Also returns the largest discrepancy seen
/// over other representatives of each sector.
pub fn project_to_sectors<T: Real>(t: &DenseMatrix<T>, n: usize) -> (DenseMatrix<T>, T) {
    let dim = 1usize << n;
    let zero = t.data()[0].zero_like();
    let mut red = vec![zero.clone(); (n + 1) * (n + 1)];
    let mut seen = vec![false; n + 1];
    let mut spread = zero.clone();
    for col in 0..dim {
        let s = col.count_ones() as usize;
        let mut column = vec![zero.clone(); n + 1];
        for row in 0..dim {
            column[row.count_ones() as usize] += &t[(row, col)];
        }
        if !seen[s] {
            seen[s] = true;
            for (sp, x) in column.into_iter().enumerate() {
                red[sp * (n + 1) + s] = x;
            }
        } else {
            for (sp, x) in column.iter().enumerate() {
                spread = spread.max_of((x.clone() - &red[sp * (n + 1) + s]).abs());
            }
        }
    }
    (DenseMatrix::from_vec(n + 1, n + 1, red).expect("shape"), spread)
}

/// Per-site covector as a dense covector on configuration space.
pub fn product_covector<T: Real>(n: usize, site: &[T; 2]) -> Vec<T> {
    DenseState::product(n, site).weights
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::BigFloat;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn single_gate_from_initial_state() {
        let c = ctx();
        let p = ModelParams::<BigFloat>::haar(&c, 2, c.zero()).unwrap();
        let s = DenseState::initial(&c, 2, 2).unwrap();
        let out = dense_layer(&s, &[(0, 1)], &p).unwrap();
        let ps = out.sector_weights();
        assert!((ps[0].to_f64() - 0.8).abs() < 1e-70);
        assert!(ps[1].to_f64().abs() < 1e-70);
        assert!((ps[2].to_f64() - 0.2).abs() < 1e-70);
    }

    #[test]
    fn trivial_params_leave_state_unchanged() {
        let c = ctx();
        let p = ModelParams::<BigFloat>::new(&c, 2, c.zero(), c.zero(), c.zero()).unwrap();
        let s = DenseState::initial(&c, 4, 2).unwrap();
        let out = dense_layer(&s, &brickwork_pairing(4, 0), &p).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn overlapping_pairs_rejected() {
        let c = ctx();
        let p = ModelParams::<BigFloat>::haar(&c, 2, c.zero()).unwrap();
        let s = DenseState::initial(&c, 4, 2).unwrap();
        assert!(dense_layer(&s, &[(0, 1), (1, 2)], &p).is_err());
    }

    #[test]
    fn oracle_limit_enforced() {
        let c = ctx();
        assert!(matches!(DenseState::<BigFloat>::initial(&c, 12, 2), Err(Error::OracleLimit { .. })));
        assert!(DenseState::<BigFloat>::initial(&c, 3, 2).is_err());
    }

    #[test]
    fn matchings_count() {
        assert_eq!(perfect_matchings(2).len(), 1);
        assert_eq!(perfect_matchings(4).len(), 3);
        assert_eq!(perfect_matchings(6).len(), 15);
        assert_eq!(brickwork_pairing(6, 0), vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(brickwork_pairing(6, 1), vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn layer_trace_and_metastable_decay() {
        let c = ctx();
        let gamma: BigFloat = c.real(0.1);
        let p = ModelParams::<BigFloat>::haar(&c, 2, gamma.clone()).unwrap();
        let t = brickwork_period_transfer(4, &p).unwrap();
        for s in t.column_sums() {
            assert!((s.to_f64() - 1.0).abs() < 1e-70);
        }
        // Noise-only layer on |S⟩ read out by ⟨S|, normalised by ⟨S|S⟩.
        let n = 6;
        let mut s = DenseState::<BigFloat>::from_weights(n, vec![c.zero(); 1 << n]).unwrap();
        s.weights[(1 << n) - 1] = c.one();
        let nm = single_site_n(&gamma).unwrap();
        for i in 0..n {
            s.apply_single_site(i, &nm);
        }
        let fs = super::super::params::ObservableKind::FidelityS.site_vector::<BigFloat>(&c, 2);
        let ratio = s.contract(&fs) / c.real::<BigFloat>(2f64.powi(n as i32));
        let eps = gamma.clone() * c.ratio::<BigFloat>(3, 4);
        let want = (c.one::<BigFloat>() - eps).powi(n as i32);
        assert!((ratio - want).abs().to_f64() < 1e-70);
    }
}
