//! Matrix-product representation of `p(σ)`.
//!
//! Tensors hold `p̃(σ) = q^{|σ|} p(σ)`, the coefficients in the site basis
//! `{I/q², SWAP/q²}`. In this basis both vacua are unit product states and
//! every observable covector has entries of modulus at most one, so a
//! truncation that is small relative to the state norm is small for every
//! observable.

use crate::error::{Error, Result};
use crate::model::dense::{DenseState, ORACLE_LIMIT};
use crate::model::params::{initial_site_weights, Observables};
use crate::numerics::{svd_truncate, thin_lq, thin_qr, DenseMatrix, PrecisionContext, Real};

/// Rank-3 site tensor, index `(a, s, b)` stored at `(2a + s)·right + b`.
/// Read row-major it is both the `2l × r` and the `l × 2r` reshaping.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor<T> {
    pub left: usize,
    pub right: usize,
    pub data: Vec<T>,
}

impl<T: Real> SiteTensor<T> {
    fn product(w: &[T; 2]) -> Self {
        Self { left: 1, right: 1, data: vec![w[0].clone(), w[1].clone()] }
    }

    fn as_left(&self) -> DenseMatrix<T> {
        DenseMatrix::from_vec(2 * self.left, self.right, self.data.clone()).expect("shape")
    }

    fn as_right(&self) -> DenseMatrix<T> {
        DenseMatrix::from_vec(self.left, 2 * self.right, self.data.clone()).expect("shape")
    }

    fn from_left(m: DenseMatrix<T>) -> Self {
        let (rows, right) = (m.rows(), m.cols());
        Self { left: rows / 2, right, data: m.into_data() }
    }

    fn from_right(m: DenseMatrix<T>) -> Self {
        let (left, cols) = (m.rows(), m.cols());
        Self { left, right: cols / 2, data: m.into_data() }
    }

    fn get(&self, a: usize, s: usize, b: usize) -> &T {
        &self.data[(2 * a + s) * self.right + b]
    }
}

/// Truncation settings.
#[derive(Clone, Debug)]
pub struct MpsConfig<T> {
    /// Discarded `σ²` per SVD, relative to the squared norm.
    pub trunc_budget: T,
    pub max_bond: usize,
}

impl<T: Real> MpsConfig<T> {
    pub const DEFAULT_MAX_BOND: usize = 256;

    /// Time evolution: `1e-30` in extended precision, `1e-24` in double
    /// precision. Observables near `q^-N` sit far below the state norm, so
    /// the double-precision budget is kept near `ε_mach²`.
    pub fn for_context(ctx: &PrecisionContext) -> Self {
        let budget = if ctx.bits() <= PrecisionContext::DOUBLE_BITS { 1e-24 } else { 1e-30 };
        Self { trunc_budget: ctx.real(budget), max_bond: Self::DEFAULT_MAX_BOND }
    }

    /// Krylov iteration: only the leading eigenvalues matter, so double
    /// precision uses the looser `1e-12`.
    pub fn for_krylov(ctx: &PrecisionContext) -> Self {
        let budget = if ctx.bits() <= PrecisionContext::DOUBLE_BITS { 1e-12 } else { 1e-30 };
        Self { trunc_budget: ctx.real(budget), max_bond: Self::DEFAULT_MAX_BOND }
    }

    pub fn with_budget(mut self, budget: T) -> Self {
        self.trunc_budget = budget;
        self
    }
}

#[derive(Clone, Debug)]
pub struct MpsState<T> {
    pub n: usize,
    pub q: u32,
    pub sites: Vec<SiteTensor<T>>,
    pub config: MpsConfig<T>,
    /// Sum of relative discarded weights over all truncations so far.
    pub accumulated_discard: T,
    /// Orthogonality center, if the state is in mixed canonical form.
    center: Option<usize>,
}

fn check_sites(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("number of sites must be even and at least 2, got {n}")));
    }
    Ok(())
}

impl<T: Real> MpsState<T> {
    /// Product state with per-site weights `w` in the rescaled basis.
    pub fn product_rescaled(ctx: &PrecisionContext, n: usize, q: u32, w: &[T; 2], config: MpsConfig<T>) -> Result<Self> {
        check_sites(n)?;
        Ok(Self {
            n,
            q,
            sites: vec![SiteTensor::product(w); n],
            config,
            accumulated_discard: ctx.zero(),
            center: None,
        })
    }

    /// Product state with per-site weights `w` on `(I/q², SWAP/q)`.
    pub fn product(ctx: &PrecisionContext, n: usize, q: u32, w: &[T; 2], config: MpsConfig<T>) -> Result<Self> {
        let qf: T = ctx.real(q as f64);
        Self::product_rescaled(ctx, n, q, &[w[0].clone(), w[1].clone() * &qf], config)
    }

    pub fn initial(ctx: &PrecisionContext, n: usize, q: u32, config: MpsConfig<T>) -> Result<Self> {
        Self::product(ctx, n, q, &initial_site_weights(ctx, q), config)
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.n - 1].iter().map(|s| s.right).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    pub fn center(&self) -> Option<usize> {
        self.center
    }

    fn zero(&self) -> T {
        self.sites[0].data[0].zero_like()
    }

    /// Multiplies the state by `c`.
    pub fn scale(&mut self, c: &T) {
        let site = self.center.unwrap_or(0);
        for x in &mut self.sites[site].data {
            *x *= c;
        }
    }

    /// Right-canonical form with the center on site 0.
    pub fn right_canonicalize(&mut self) {
        for i in (1..self.n).rev() {
            let (l, q) = thin_lq(&self.sites[i].as_right());
            self.sites[i] = SiteTensor::from_right(q);
            let prev = self.sites[i - 1].as_left().matmul(&l).expect("shape");
            self.sites[i - 1] = SiteTensor::from_left(prev);
        }
        self.center = Some(0);
    }

    /// Shifts the center from `i` to `i + 1` by a QR step.
    pub fn move_center_right(&mut self, i: usize) {
        debug_assert_eq!(self.center, Some(i));
        let (q, r) = thin_qr(&self.sites[i].as_left());
        self.sites[i] = SiteTensor::from_left(q);
        let next = r.matmul(&self.sites[i + 1].as_right()).expect("shape");
        self.sites[i + 1] = SiteTensor::from_right(next);
        self.center = Some(i + 1);
    }

    /// Squared norm, read off the center tensor.
    pub fn norm_sqr(&self) -> T {
        match self.center {
            Some(c) => {
                let mut acc = self.zero();
                for x in &self.sites[c].data {
                    acc.add_mul(x, x);
                }
                acc
            }
            None => self.inner(self),
        }
    }

    /// Applies the 4×4 matrix `g` (index `2s_i + s_{i+1}`) to sites
    /// `(i, i+1)` and splits with a budgeted SVD. The center must be on
    /// `i`; it ends on `i + 1`.
    pub fn apply_pair(&mut self, i: usize, g: &DenseMatrix<T>) -> Result<()> {
        if self.center != Some(i) {
            return Err(Error::InvalidParameter(format!("center must be on site {i} before a pair update")));
        }
        let (l, r) = (self.sites[i].left, self.sites[i + 1].right);
        let theta = self.sites[i].as_left().matmul(&self.sites[i + 1].as_right())?;
        let zero = self.zero();
        let mut out = vec![zero.clone(); 4 * l * r];
        for a in 0..l {
            for b in 0..r {
                let input: [&T; 4] = [
                    &theta[(2 * a, b)],
                    &theta[(2 * a, r + b)],
                    &theta[(2 * a + 1, b)],
                    &theta[(2 * a + 1, r + b)],
                ];
                for (row, slot) in [(0usize, (0usize, 0usize)), (1, (0, 1)), (2, (1, 0)), (3, (1, 1))] {
                    let mut acc = zero.clone();
                    for (col, x) in input.iter().enumerate() {
                        acc.add_mul(&g[(row, col)], x);
                    }
                    out[(2 * a + slot.0) * 2 * r + slot.1 * r + b] = acc;
                }
            }
        }
        let theta = DenseMatrix::from_vec(2 * l, 2 * r, out)?;
        self.split(i, theta)
    }

    /// SVD-splits a `2l × 2r` block over sites `(i, i+1)`.
    fn split(&mut self, i: usize, theta: DenseMatrix<T>) -> Result<()> {
        let mut norm = self.zero();
        for x in theta.data() {
            norm.add_mul(x, x);
        }
        if norm.is_zero() {
            // exact zero: keep a rank-one zero state
            let (l, r) = (theta.rows() / 2, theta.cols() / 2);
            let mut u = vec![norm.clone(); 2 * l];
            u[0] = norm.one_like();
            self.sites[i] = SiteTensor { left: l, right: 1, data: u };
            self.sites[i + 1] = SiteTensor { left: 1, right: r, data: vec![norm; 2 * r] };
            self.center = Some(i + 1);
            return Ok(());
        }
        let budget = self.config.trunc_budget.clone() * &norm;
        let svd = svd_truncate(&theta, &budget)?;
        let k = svd.rank();
        if k > self.config.max_bond {
            return Err(Error::BondCapExceeded { bond: i, required: k, cap: self.config.max_bond });
        }
        self.accumulated_discard += svd.discarded.clone() / &norm;
        let mut sv = svd.v.transpose();
        for (a, s) in svd.s.iter().enumerate() {
            for j in 0..sv.cols() {
                sv[(a, j)] *= s;
            }
        }
        self.sites[i] = SiteTensor::from_left(svd.u);
        self.sites[i + 1] = SiteTensor::from_right(sv);
        self.center = Some(i + 1);
        Ok(())
    }

    /// Budgeted recompression: right-canonical sweep, then SVD splits
    /// from left to right.
    pub fn compress(&mut self) -> Result<()> {
        self.compress_with_floor(None)
    }

    fn compress_with_floor(&mut self, floor: Option<&T>) -> Result<()> {
        self.right_canonicalize();
        for i in 0..self.n - 1 {
            self.split_center(i, floor)?;
        }
        Ok(())
    }

    /// Truncates bond `i` with the center on site `i` and every site to its
    /// right right-orthonormal, so only the `2l × r` center matrix needs an
    /// SVD. Moves the center to `i + 1`.
    fn split_center(&mut self, i: usize, floor: Option<&T>) -> Result<()> {
        let m = self.sites[i].as_left();
        let mut norm = self.zero();
        for x in m.data() {
            norm.add_mul(x, x);
        }
        if norm.is_zero() {
            let (l, r) = (self.sites[i].left, self.sites[i + 1].right);
            let mut u = vec![norm.clone(); 2 * l];
            u[0] = norm.one_like();
            self.sites[i] = SiteTensor { left: l, right: 1, data: u };
            self.sites[i + 1] = SiteTensor { left: 1, right: r, data: vec![norm; 2 * r] };
            self.center = Some(i + 1);
            return Ok(());
        }
        let mut budget = self.config.trunc_budget.clone() * &norm;
        if let Some(f) = floor {
            budget = budget.max_of(f.clone());
        }
        let svd = svd_truncate(&m, &budget)?;
        let k = svd.rank();
        if k > self.config.max_bond {
            return Err(Error::BondCapExceeded { bond: i, required: k, cap: self.config.max_bond });
        }
        self.accumulated_discard += svd.discarded.clone() / &norm;
        let mut sv = svd.v.transpose();
        for (a, s) in svd.s.iter().enumerate() {
            for j in 0..sv.cols() {
                sv[(a, j)] *= s;
            }
        }
        self.sites[i] = SiteTensor::from_left(svd.u);
        let next = sv.matmul(&self.sites[i + 1].as_right())?;
        self.sites[i + 1] = SiteTensor::from_right(next);
        self.center = Some(i + 1);
        Ok(())
    }

    /// Contraction with the product covector `site` (rescaled basis).
    pub fn contract(&self, site: &[T; 2]) -> T {
        let mut env = vec![self.zero().one_like()];
        for t in &self.sites {
            let mut next = vec![self.zero(); t.right];
            for (a, e) in env.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                for (s, w) in site.iter().enumerate() {
                    let ew = e.clone() * w;
                    for (b, nb) in next.iter_mut().enumerate() {
                        nb.add_mul(&ew, t.get(a, s, b));
                    }
                }
            }
            env = next;
        }
        env.swap_remove(0)
    }

    /// `⟨Πa - Πb|p̃⟩`, accumulated as a bond-two recursion so that the
    /// difference is never formed from two nearly equal totals.
    pub fn contract_difference(&self, a: &[T; 2], b: &[T; 2]) -> T {
        let zero = self.zero();
        let d: [T; 2] = [a[0].clone() - &b[0], a[1].clone() - &b[1]];
        let mut env_b = vec![zero.one_like()];
        let mut env_d = vec![zero.clone()];
        for t in &self.sites {
            let mut nb = vec![zero.clone(); t.right];
            let mut nd = vec![zero.clone(); t.right];
            for al in 0..t.left {
                for s in 0..2 {
                    let wb = env_b[al].clone() * &b[s];
                    let mut wd = env_d[al].clone() * &a[s];
                    wd.add_mul(&env_b[al], &d[s]);
                    for be in 0..t.right {
                        let x = t.get(al, s, be);
                        nb[be].add_mul(&wb, x);
                        nd[be].add_mul(&wd, x);
                    }
                }
            }
            env_b = nb;
            env_d = nd;
        }
        env_d.swap_remove(0)
    }

    /// Trace, fidelity, XEB and the shifted quantities `χ = q^N X - 1`,
    /// `f = q^N F - 1`, the latter two as difference contractions
    /// (`⟨q^N P| - ⟨1|` and `⟨q^N S| - ⟨1|`).
    pub fn observables(&self, ctx: &PrecisionContext) -> Observables<T> {
        let one: T = ctx.one();
        let qf: T = ctx.real(self.q as f64);
        let inv = one.clone() / &qf;
        let trace_site = [one.clone(), inv.clone()];
        let trace = self.contract(&trace_site);
        let chi = self.contract_difference(&[one.clone(), one.clone()], &trace_site);
        let shifted_fidelity = self.contract_difference(&[one.clone(), qf.clone()], &trace_site);
        let qn = qf.powi(self.n as i32);
        let xeb = (chi.clone() + &trace) / &qn;
        let fidelity = (shifted_fidelity.clone() + &trace) / &qn;
        Observables { trace, fidelity, xeb, chi, shifted_fidelity }
    }

    /// Euclidean overlap `Σ_σ a(σ) b(σ)` in the rescaled basis.
    pub fn inner(&self, other: &Self) -> T {
        let zero = self.zero();
        let mut env = vec![zero.one_like()];
        let mut lb = 1;
        for (x, y) in self.sites.iter().zip(&other.sites) {
            // tmp[a'][s][b] = Σ_b env[a'][b] y[b][s][...]: contract in two steps
            let mut tmp = vec![zero.clone(); x.left * 2 * y.right];
            for a in 0..x.left {
                for c in 0..lb {
                    let e = &env[a * lb + c];
                    if e.is_zero() {
                        continue;
                    }
                    for s in 0..2 {
                        for d in 0..y.right {
                            tmp[(a * 2 + s) * y.right + d].add_mul(e, y.get(c, s, d));
                        }
                    }
                }
            }
            let mut next = vec![zero.clone(); x.right * y.right];
            for a in 0..x.left {
                for s in 0..2 {
                    for b in 0..x.right {
                        let xv = x.get(a, s, b);
                        if xv.is_zero() {
                            continue;
                        }
                        for d in 0..y.right {
                            next[b * y.right + d].add_mul(xv, &tmp[(a * 2 + s) * y.right + d]);
                        }
                    }
                }
            }
            env = next;
            lb = y.right;
        }
        env.swap_remove(0)
    }

    /// `ca·a + cb·b` by direct-sum embedding, then recompression.
    pub fn combine(ca: &T, a: &Self, cb: &T, b: &Self) -> Result<Self> {
        Self::combine_with_floor(ca, a, cb, b, None)
    }

    /// [`Self::combine`] where singular weight below `floor` is always
    /// dropped. Useful when the sum cancels: the relative budget alone
    /// would then keep the rounding noise of the inputs.
    pub fn combine_with_floor(ca: &T, a: &Self, cb: &T, b: &Self, floor: Option<&T>) -> Result<Self> {
        if a.n != b.n || a.q != b.q {
            return Err(Error::DimensionMismatch("states on different chains".into()));
        }
        let zero = a.zero();
        let n = a.n;
        let mut sites = Vec::with_capacity(n);
        for i in 0..n {
            let (x, y) = (&a.sites[i], &b.sites[i]);
            let left = if i == 0 { 1 } else { x.left + y.left };
            let right = if i == n - 1 { 1 } else { x.right + y.right };
            let mut data = vec![zero.clone(); left * 2 * right];
            let (yl_off, yr_off) = (if i == 0 { 0 } else { x.left }, if i == n - 1 { 0 } else { x.right });
            for al in 0..x.left {
                for s in 0..2 {
                    for be in 0..x.right {
                        let mut v = x.get(al, s, be).clone();
                        if i == 0 {
                            v *= ca;
                        }
                        data[(2 * al + s) * right + be] += v;
                    }
                }
            }
            for al in 0..y.left {
                for s in 0..2 {
                    for be in 0..y.right {
                        let mut v = y.get(al, s, be).clone();
                        if i == 0 {
                            v *= cb;
                        }
                        data[(2 * (al + yl_off) + s) * right + be + yr_off] += v;
                    }
                }
            }
            sites.push(SiteTensor { left, right, data });
        }
        let mut out = Self {
            n,
            q: a.q,
            sites,
            config: a.config.clone(),
            accumulated_discard: a.accumulated_discard.clone().max_of(b.accumulated_discard.clone()),
            center: None,
        };
        out.compress_with_floor(floor)?;
        Ok(out)
    }

    /// Full weight vector `p(σ)` in the original basis, site `i` on bit `i`.
    pub fn to_dense(&self, ctx: &PrecisionContext) -> Result<DenseState<T>> {
        if self.n > ORACLE_LIMIT {
            return Err(Error::OracleLimit { limit: ORACLE_LIMIT, requested: self.n });
        }
        let qinv: T = ctx.one::<T>() / &ctx.real::<T>(self.q as f64);
        let zero = self.zero();
        let mut weights = Vec::with_capacity(1 << self.n);
        for idx in 0..1usize << self.n {
            let mut env = vec![zero.one_like()];
            for (i, t) in self.sites.iter().enumerate() {
                let s = (idx >> i) & 1;
                let mut next = vec![zero.clone(); t.right];
                for (a, e) in env.iter().enumerate() {
                    for (b, nb) in next.iter_mut().enumerate() {
                        nb.add_mul(e, t.get(a, s, b));
                    }
                }
                if s == 1 {
                    for x in &mut next {
                        *x *= &qinv;
                    }
                }
                env = next;
            }
            weights.push(env.swap_remove(0));
        }
        DenseState::from_weights(self.n, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::BigFloat;

    fn cfg(ctx: &PrecisionContext) -> MpsConfig<BigFloat> {
        MpsConfig::for_context(ctx)
    }

    #[test]
    fn initial_product_observables() {
        let c = PrecisionContext::default();
        let s = MpsState::<BigFloat>::initial(&c, 8, 2, cfg(&c)).unwrap();
        assert_eq!(s.bond_dims(), vec![1; 7]);
        let o = s.observables(&c);
        assert!((o.trace.to_f64() - 1.0).abs() < 1e-70);
        assert!((o.fidelity.to_f64() - 1.0).abs() < 1e-70);
        let d = DenseState::<BigFloat>::initial(&c, 8, 2).unwrap().observables(&c, 2);
        assert!((o.chi.clone() - &d.chi).abs().to_f64() < 1e-70);
        assert!((o.shifted_fidelity.clone() - &d.shifted_fidelity).abs().to_f64() < 1e-60);
    }

    #[test]
    fn dense_round_trip() {
        let c = PrecisionContext::default();
        let s = MpsState::<BigFloat>::initial(&c, 4, 2, cfg(&c)).unwrap();
        let d = s.to_dense(&c).unwrap();
        let want = DenseState::<BigFloat>::initial(&c, 4, 2).unwrap();
        for (a, b) in d.weights().iter().zip(want.weights()) {
            assert!((a.clone() - b).abs().to_f64() < 1e-70);
        }
    }

    #[test]
    fn combine_and_inner() {
        let c = PrecisionContext::default();
        let a = MpsState::<BigFloat>::product_rescaled(&c, 6, 2, &[c.one(), c.zero()], cfg(&c)).unwrap();
        let b = MpsState::<BigFloat>::product_rescaled(&c, 6, 2, &[c.zero(), c.one()], cfg(&c)).unwrap();
        let s = MpsState::combine(&c.real(3.0), &a, &c.real(-2.0), &b).unwrap();
        assert_eq!(s.max_bond_dim(), 2);
        assert!((s.inner(&s).to_f64() - 13.0).abs() < 1e-60);
        assert!((s.norm_sqr().to_f64() - 13.0).abs() < 1e-60);
        assert!((s.inner(&a).to_f64() - 3.0).abs() < 1e-60);
        // a + a stays rank one
        let t = MpsState::combine(&c.one(), &a, &c.one(), &a).unwrap();
        assert_eq!(t.max_bond_dim(), 1);
    }

    #[test]
    fn canonical_moves_keep_the_state() {
        let c = PrecisionContext::new(128).unwrap();
        let a = MpsState::<BigFloat>::product_rescaled(&c, 4, 2, &[c.real(0.3), c.real(0.7)], cfg(&c)).unwrap();
        let b = MpsState::<BigFloat>::product_rescaled(&c, 4, 2, &[c.real(0.9), c.real(-0.2)], cfg(&c)).unwrap();
        let mut s = MpsState::combine(&c.one(), &a, &c.one(), &b).unwrap();
        let before = s.inner(&a);
        s.right_canonicalize();
        s.move_center_right(0);
        s.move_center_right(1);
        assert!((s.inner(&a) - &before).abs().to_f64() < 1e-35);
        assert!((s.norm_sqr() - &s.inner(&s)).abs().to_f64() < 1e-35);
    }
}
