use super::transfer::ReducedTransfer;
use crate::error::{Error, Result};
use crate::model::params::{observables_from_sectors, ModelParams, Observables};
use crate::model::spectrum::reduced_initial;
use crate::model::trace::DecayTrace;
use crate::noise::NoiseStatParams;
use crate::numerics::{matvec, DenseMatrix, PrecisionContext, Real};

/// Sector totals `p_S = Σ_{|σ|=S} p(σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState<T> {
    pub n: usize,
    pub q: u32,
    pub p: Vec<T>,
}

impl<T: Real> ReducedState<T> {
    pub fn initial(ctx: &PrecisionContext, n: usize, q: u32) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("number of sites must be even and positive, got {n}")));
        }
        Ok(Self { n, q, p: reduced_initial(ctx, n, q) })
    }

    pub fn trace(&self) -> T {
        let mut t = self.p[0].zero_like();
        for x in &self.p {
            t += x;
        }
        t
    }

    pub fn observables(&self, ctx: &PrecisionContext) -> Observables<T> {
        observables_from_sectors(ctx, self.q, &self.p)
    }

    pub fn step(&self, t: &DenseMatrix<T>) -> Result<Self> {
        Ok(Self { n: self.n, q: self.q, p: matvec(t, &self.p)? })
    }
}

/// Observables at depths `0..=depth` under repeated application of `t`.
/// Checks trace conservation to `2^(-bits/2)` after every layer.
pub fn run_observables<T: Real>(
    ctx: &PrecisionContext,
    n: usize,
    q: u32,
    t: &DenseMatrix<T>,
    depth: usize,
) -> Result<Vec<Observables<T>>> {
    let tol = ctx.half_tolerance();
    let mut state = ReducedState::<T>::initial(ctx, n, q)?;
    let mut out = Vec::with_capacity(depth + 1);
    for d in 0..=depth {
        let obs = state.observables(ctx);
        let drift = (obs.trace.to_f64() - 1.0).abs();
        if drift > tol {
            return Err(Error::Numeric(format!("trace drifted by {drift:e} at depth {d}")));
        }
        out.push(obs);
        if d < depth {
            state = state.step(t)?;
        }
    }
    Ok(out)
}

/// Noisy run with its `γ = 0` reference and, if requested, the run with
/// noise on both copies (`γ → γ₂`, unital channels only).
pub fn evolve<T: Real>(
    params: &ModelParams<T>,
    n: usize,
    depth: usize,
    two_copy: Option<&NoiseStatParams<T>>,
) -> Result<DecayTrace<T>> {
    let ctx = &params.ctx;
    let noisy_t = ReducedTransfer::new(params, n)?;
    let noisy = run_observables(ctx, n, params.q, &noisy_t.t_red, depth)?;
    let noiseless = if params.is_noiseless() {
        noisy.clone()
    } else {
        run_observables(ctx, n, params.q, &noisy_t.m_red, depth)?
    };
    let both = match two_copy {
        None => None,
        Some(ns) => {
            let p2 = two_copy_params(params, ns)?;
            let t2 = ReducedTransfer::new(&p2, n)?;
            Some(run_observables(ctx, n, params.q, &t2.t_red, depth)?)
        }
    };
    DecayTrace::build(ctx, params.q, n, &noisy, &noiseless, both.as_deref())
}

/// Parameters for the two-copy-noise run: `γ` replaced by `γ₂`.
pub fn two_copy_params<T: Real>(params: &ModelParams<T>, noise: &NoiseStatParams<T>) -> Result<ModelParams<T>> {
    if !noise.is_unital() {
        return Err(Error::OutOfScope(format!(
            "two-copy evolution with non-unital noise (delta2 = {}) is not supported",
            noise.delta2.to_f64()
        )));
    }
    if noise.q != params.q {
        return Err(Error::DimensionMismatch(format!(
            "noise channel acts on q = {} but the circuit has q = {}",
            noise.q, params.q
        )));
    }
    params.with_gamma(noise.gamma2.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{stat_params_from_kraus, KrausChannel};
    use crate::numerics::BigFloat;

    #[test]
    fn noiseless_fidelity_is_one() {
        let c = PrecisionContext::default();
        let p = ModelParams::<BigFloat>::haar(&c, 2, c.zero()).unwrap();
        let tr = evolve(&p, 20, 30, None).unwrap();
        for r in &tr.rows {
            assert!((r.fidelity.to_f64() - 1.0).abs() < 1e-60);
            assert!((r.chi_b.as_ref().unwrap().to_f64() - 1.0).abs() < 1e-60);
        }
    }

    #[test]
    fn initial_row() {
        let c = PrecisionContext::default();
        let p = ModelParams::<BigFloat>::haar(&c, 2, c.real(0.01)).unwrap();
        let tr = evolve(&p, 2, 3, None).unwrap();
        assert!((tr.rows[0].chi.to_f64() - 7.0 / 9.0).abs() < 1e-60);
        assert!((tr.rows[0].z.to_f64() - (16.0 / 9.0) / 4.0).abs() < 1e-60);
    }

    #[test]
    fn amplitude_damping_two_copy_is_out_of_scope() {
        let c = PrecisionContext::double();
        let ch = KrausChannel::<f64>::amplitude_damping(&c, &0.1).unwrap();
        let ns = stat_params_from_kraus(&ch);
        let p = ModelParams::<f64>::haar(&c, 2, ns.gamma1).unwrap();
        assert!(matches!(evolve(&p, 10, 5, Some(&ns)), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn depolarizing_two_copy_columns() {
        let c = PrecisionContext::double();
        let ch = KrausChannel::<f64>::depolarizing(&c, 2, &0.02).unwrap();
        let ns = stat_params_from_kraus(&ch);
        let p = ModelParams::<f64>::haar(&c, 2, ns.gamma1).unwrap();
        let tr = evolve(&p, 10, 8, Some(&ns)).unwrap();
        let p2 = p.with_gamma(ns.gamma2).unwrap();
        let direct = evolve(&p2, 10, 8, None).unwrap();
        for (a, b) in tr.rows.iter().zip(&direct.rows) {
            let (purity, collision) = a.two_copy.unwrap();
            assert!((purity - b.fidelity).abs() < 1e-14);
            let x = (b.chi + 1.0) / 1024.0;
            assert!((collision - x).abs() < 1e-14);
        }
    }
}
