//! Arnoldi iteration with MPS basis vectors on the one-period transfer map.
//!
//! Fixed points known in closed form are locked and projected out
//! obliquely: `|I⟩` with the trace covector always, `|S⟩` with the
//! fidelity covector when `γ = 0`. Both covectors are left-invariant, so
//! the complement they cut out is invariant and the Krylov space stays in
//! it up to truncation.

use super::state::{MpsConfig, MpsState};
use super::tebd::{apply_period, rescaled_pair_update, BrickworkSpec};
use crate::error::{Error, Result};
use crate::model::params::ModelParams;
use crate::numerics::eigen::{eigenvalues, EigenConfig};
use crate::numerics::{Complex, DenseMatrix, PrecisionContext, Real};

#[derive(Clone, Debug)]
pub struct KrylovConfig {
    pub subspace_dim: usize,
    /// Start vector: product of `(1, δ)` on `(I/q², SWAP/q)`.
    pub start_delta: f64,
    pub max_restarts: usize,
    /// Residual of the leading Ritz pair, relative to its modulus.
    pub residual_tol: f64,
    /// Whether running out of restarts is an error. When off, the last
    /// Ritz values are returned and [`KrylovSpectrum::converged`] is unset.
    pub require_convergence: bool,
}

impl KrylovConfig {
    pub fn for_context(ctx: &PrecisionContext) -> Self {
        let residual_tol = if ctx.bits() <= PrecisionContext::DOUBLE_BITS { 1e-6 } else { 1e-10 };
        Self { subspace_dim: 20, start_delta: 1e-3, max_restarts: 10, residual_tol, require_convergence: true }
    }

    fn check(&self, n_eigs: usize) -> Result<()> {
        if self.subspace_dim < n_eigs + 2 {
            return Err(Error::InvalidParameter(format!(
                "Krylov dimension {} must be at least n_eigs + 2 = {}",
                self.subspace_dim,
                n_eigs + 2
            )));
        }
        if !(self.start_delta > 0.0) {
            return Err(Error::InvalidParameter("start vector mixing must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RitzValue<T> {
    /// Per-period value `(re, im)`.
    pub re: T,
    pub im: T,
    /// Per-layer modulus `|θ|^{1/2}`; the period map covers two layers.
    pub per_layer: T,
    /// `‖T x - θ x‖` estimate for the unit Ritz vector.
    pub residual: T,
    /// A closed-form fixed point rather than a Ritz value.
    pub locked: bool,
}

#[derive(Clone, Debug)]
pub struct KrylovSpectrum<T> {
    pub n_sites: usize,
    pub values: Vec<RitzValue<T>>,
    pub restarts: usize,
    pub subspace_dim: usize,
    pub max_bond: usize,
    /// Leading residual within tolerance, or an invariant subspace found.
    pub converged: bool,
}

impl<T: Real> KrylovSpectrum<T> {
    /// Leading Ritz value outside the locked vacua.
    pub fn leading_gap(&self) -> Option<&RitzValue<T>> {
        self.values.iter().find(|v| !v.locked)
    }
}

struct Deflation<T> {
    rights: Vec<MpsState<T>>,
    lefts: Vec<[T; 2]>,
    /// Inverse of `G_ab = ⟨ℓ_a|r_b⟩`.
    gram_inv: Vec<Vec<T>>,
}

impl<T: Real> Deflation<T> {
    fn new(ctx: &PrecisionContext, params: &ModelParams<T>, n: usize, mps: &MpsConfig<T>) -> Result<Self> {
        let one: T = ctx.one();
        let inv = one.clone() / &ctx.real::<T>(params.q as f64);
        let vac_i = MpsState::product_rescaled(ctx, n, params.q, &[one.clone(), ctx.zero()], mps.clone())?;
        let mut rights = vec![vac_i];
        let mut lefts = vec![[one.clone(), inv.clone()]];
        if params.is_noiseless() {
            rights.push(MpsState::product_rescaled(ctx, n, params.q, &[ctx.zero(), one.clone()], mps.clone())?);
            lefts.push([inv, one.clone()]);
        }
        let g: Vec<Vec<T>> = lefts.iter().map(|l| rights.iter().map(|r| r.contract(l)).collect()).collect();
        let gram_inv = if g.len() == 1 {
            vec![vec![one / &g[0][0]]]
        } else {
            let det = g[0][0].clone() * &g[1][1] - g[0][1].clone() * &g[1][0];
            vec![
                vec![g[1][1].clone() / &det, -(g[0][1].clone() / &det)],
                vec![-(g[1][0].clone() / &det), g[0][0].clone() / &det],
            ]
        };
        Ok(Self { rights, lefts, gram_inv })
    }

    fn project(&self, v: MpsState<T>, floor: Option<&T>) -> Result<MpsState<T>> {
        let o: Vec<T> = self.lefts.iter().map(|l| v.contract(l)).collect();
        let mut out = v;
        let one = o[0].one_like();
        for (b, r) in self.rights.iter().enumerate() {
            let mut c = o[0].zero_like();
            for (a, oa) in o.iter().enumerate() {
                c.add_mul(&self.gram_inv[b][a], oa);
            }
            if !c.is_zero() {
                out = MpsState::combine_with_floor(&one, &out, &-c, r, floor)?;
            }
        }
        Ok(out)
    }
}

fn normalized<T: Real>(mut v: MpsState<T>) -> Result<(MpsState<T>, T)> {
    let norm = v.norm_sqr().sqrt();
    if norm.is_zero() {
        return Err(Error::Numeric("Krylov vector vanished".into()));
    }
    v.scale(&(norm.one_like() / &norm));
    Ok((v, norm))
}

fn orth_tolerance<T: Real>(ctx: &PrecisionContext, mps: &MpsConfig<T>, n: usize) -> f64 {
    let trunc = (mps.trunc_budget.to_f64() * n as f64).sqrt();
    (1e4 * trunc).max(1e3 * ctx.half_tolerance()).min(0.1)
}

/// Ritz vector of `h` for `re + i·im` by complex inverse iteration.
fn ritz_vector<T: Real>(h: &DenseMatrix<T>, re: &T, im: &T) -> Vec<Complex<T>> {
    let m = h.rows();
    let zero = re.zero_like();
    let shift = Complex::new(re.clone(), im.clone());
    let floor = h.norm_inf().max_of(zero.one_like()) * &zero.from_f64_like(2f64.powi(-(zero.bits() as i32)));
    // LU with partial pivoting of H - θ
    let mut a: Vec<Vec<Complex<T>>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let x = Complex::real(h[(i, j)].clone());
                    if i == j {
                        x - shift.clone()
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let mut perm: Vec<usize> = (0..m).collect();
    for k in 0..m {
        let p = (k..m).max_by(|&x, &y| a[x][k].norm_sqr().total_cmp_f(&a[y][k].norm_sqr())).unwrap_or(k);
        a.swap(k, p);
        perm.swap(k, p);
        if a[k][k].abs() < floor {
            a[k][k] = Complex::real(floor.clone());
        }
        for i in (k + 1)..m {
            let f = a[i][k].div(&a[k][k]);
            for j in k..m {
                let t = f.clone() * a[k][j].clone();
                a[i][j] = a[i][j].clone() - t;
            }
            a[i][k] = f;
        }
    }
    let solve = |b: &[Complex<T>]| -> Vec<Complex<T>> {
        let mut y: Vec<Complex<T>> = perm.iter().map(|&i| b[i].clone()).collect();
        for i in 0..m {
            for j in 0..i {
                let t = a[i][j].clone() * y[j].clone();
                y[i] = y[i].clone() - t;
            }
        }
        for i in (0..m).rev() {
            for j in (i + 1)..m {
                let t = a[i][j].clone() * y[j].clone();
                y[i] = y[i].clone() - t;
            }
            y[i] = y[i].div(&a[i][i]);
        }
        y
    };
    let mut x: Vec<Complex<T>> =
        (0..m).map(|i| Complex::real(zero.from_f64_like(1.0 + ((i * 7919) % 101) as f64 / 257.0))).collect();
    for _ in 0..6 {
        let y = solve(&x);
        let mut norm = zero.clone();
        for v in &y {
            norm += v.norm_sqr();
        }
        let norm = norm.sqrt();
        x = y.iter().map(|v| v.scale(&(zero.one_like() / &norm))).collect();
    }
    x
}

/// `|β y_m| / ‖y‖` for a unit Ritz vector `y`.
fn residual_of<T: Real>(y: &[Complex<T>], beta: &T) -> T {
    y[y.len() - 1].abs() * &beta.abs()
}

/// Leading eigenvalues of the brickwork period map, with the vacua
/// reported first as locked values.
pub fn krylov_leading_eigs<T: Real>(
    spec: BrickworkSpec,
    params: &ModelParams<T>,
    cfg: &KrylovConfig,
    mps: &MpsConfig<T>,
    n_eigs: usize,
) -> Result<KrylovSpectrum<T>> {
    cfg.check(n_eigs)?;
    let ctx = &params.ctx;
    let n = spec.n;
    let g = rescaled_pair_update(params)?;
    let defl = Deflation::new(ctx, params, n, mps)?;
    let orth_tol = orth_tolerance(ctx, mps, n);
    let one: T = ctx.one();

    let mut locked = Vec::new();
    for r in &defl.rights {
        let mut tr = r.clone();
        apply_period(&mut tr, &g)?;
        let diff = MpsState::combine(&one, &tr, &-one.clone(), r)?;
        locked.push(RitzValue {
            re: one.clone(),
            im: ctx.zero(),
            per_layer: one.clone(),
            residual: diff.norm_sqr().sqrt(),
            locked: true,
        });
    }

    let qf: T = ctx.real(params.q as f64);
    let start = MpsState::product_rescaled(ctx, n, params.q, &[one.clone(), ctx.real::<T>(cfg.start_delta) * &qf], mps.clone())?;
    let mut start = defl.project(start, None)?;
    let mut restarts = 0;
    let mut max_bond = 1;
    loop {
        let (v0, _) = normalized(start)?;
        let k = cfg.subspace_dim;
        let mut basis = vec![v0];
        let mut h = vec![vec![ctx.zero::<T>(); k]; k + 1];
        let mut m = k;
        let mut invariant = false;
        let mut last_beta = ctx.zero::<T>();
        for j in 0..k {
            let mut w = basis[j].clone();
            apply_period(&mut w, &g)?;
            // truncation is measured against ‖T v_j‖, not the residual
            let w_norm2 = w.norm_sqr();
            let floor = mps.trunc_budget.clone() * &w_norm2;
            let noise = floor.sqrt();
            let mut w = defl.project(w, Some(&floor))?;
            for _ in 0..2 {
                for (i, vi) in basis.iter().enumerate() {
                    let c = vi.inner(&w);
                    if c.abs() <= noise {
                        continue;
                    }
                    h[i][j] += &c;
                    w = MpsState::combine_with_floor(&one, &w, &-c, vi, Some(&floor))?;
                }
            }
            let beta = w.norm_sqr().sqrt();
            max_bond = max_bond.max(w.max_bond_dim());
            last_beta = beta.clone();
            let hnorm = h.iter().take(j + 1).fold(ctx.zero::<T>(), |acc, row| acc.max_of(row[j].abs()));
            if beta.to_f64() <= 1e3 * ctx.half_tolerance() * hnorm.to_f64().max(1.0) {
                m = j + 1;
                invariant = true;
                break;
            }
            let mut worst = 0.0f64;
            for vi in &basis {
                worst = worst.max((vi.inner(&w) / &beta).abs().to_f64());
            }
            if worst > orth_tol {
                return Err(Error::LostOrthogonality { overlap: worst });
            }
            h[j + 1][j] = beta.clone();
            w.scale(&(one.clone() / &beta));
            basis.push(w);
        }
        let hm = DenseMatrix::from_rows(h[..m].iter().map(|row| row[..m].to_vec()).collect())?;
        let beta = if invariant { last_beta } else { h[m][m - 1].clone() };
        let values = eigenvalues(&hm, &EigenConfig::default())?;
        let scale = hm.norm_inf().to_f64().max(1.0);
        let mut ritz = Vec::new();
        let mut wanted = Vec::new();
        for (re, mut im) in values.into_iter().take(n_eigs) {
            if im.abs().to_f64() <= 1e3 * ctx.half_tolerance() * scale {
                im = ctx.zero();
            }
            let y = ritz_vector(&hm, &re, &im);
            let residual = residual_of(&y, &beta);
            let modulus = (re.clone() * &re + im.clone() * &im).sqrt();
            wanted.push(y);
            ritz.push(RitzValue { per_layer: modulus.sqrt(), re, im, residual, locked: false });
        }
        let lead = ritz.first().ok_or_else(|| Error::Numeric("empty Krylov space".into()))?;
        let lead_mod = lead.per_layer.clone() * &lead.per_layer;
        let converged = lead.residual.to_f64() <= cfg.residual_tol * lead_mod.to_f64().max(f64::MIN_POSITIVE);
        if converged || invariant || restarts >= cfg.max_restarts {
            if !converged && !invariant && cfg.require_convergence {
                return Err(Error::NonConvergence {
                    what: format!("leading Ritz residual {:e} after {} restarts", lead.residual.to_f64(), restarts),
                    iterations: restarts,
                });
            }
            locked.extend(ritz);
            return Ok(KrylovSpectrum {
                n_sites: n,
                values: locked,
                restarts,
                subspace_dim: k,
                max_bond,
                converged: converged || invariant,
            });
        }
        // restart from the real span of the wanted Ritz vectors
        let mut y = vec![ctx.zero::<T>(); m];
        for yv in &wanted {
            for (acc, c) in y.iter_mut().zip(yv) {
                *acc += c.re.clone() + &c.im;
            }
        }
        let mut next = basis[0].clone();
        next.scale(&y[0]);
        for (yi, vi) in y.iter().zip(&basis).skip(1) {
            next = MpsState::combine(&one, &next, yi, vi)?;
        }
        start = defl.project(next, None)?;
        restarts += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dense::brickwork_period_transfer;
    use crate::numerics::BigFloat;

    #[test]
    fn noiseless_has_two_locked_vacua() {
        let c = PrecisionContext::new(128).unwrap();
        let p = ModelParams::<BigFloat>::haar(&c, 2, c.zero()).unwrap();
        let mps = MpsConfig::for_context(&c).with_budget(c.real(1e-24));
        let k = krylov_leading_eigs(BrickworkSpec::new(6).unwrap(), &p, &KrylovConfig::for_context(&c), &mps, 3).unwrap();
        let locked: Vec<_> = k.values.iter().filter(|v| v.locked).collect();
        assert_eq!(locked.len(), 2);
        for v in locked {
            assert!(v.residual.to_f64() < 1e-30);
        }
    }

    #[test]
    fn ritz_values_match_dense_spectrum() {
        let c = PrecisionContext::new(128).unwrap();
        let p = ModelParams::<BigFloat>::new(&c, 2, c.real(0.7), c.real(0.44), c.zero()).unwrap();
        let n = 8;
        let mps = MpsConfig::for_context(&c).with_budget(c.real(1e-26));
        let cfg = KrylovConfig { residual_tol: 1e-10, ..KrylovConfig::for_context(&c) };
        let k = krylov_leading_eigs(BrickworkSpec::new(n).unwrap(), &p, &cfg, &mps, 2).unwrap();
        let t = brickwork_period_transfer(n, &p).unwrap();
        let dense = eigenvalues(&t, &EigenConfig::default()).unwrap();
        let lead = k.leading_gap().unwrap();
        let best = dense
            .iter()
            .map(|(re, im)| (re.clone() - &lead.re).abs().to_f64() + (im.clone() - &lead.im).abs().to_f64())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-8, "closest dense eigenvalue is {best:e} away");
    }
}
