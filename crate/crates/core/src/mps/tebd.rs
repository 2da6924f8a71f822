//! Brickwork TEBD on the rescaled MPS.

use super::state::{MpsConfig, MpsState};
use crate::error::{Error, Result};
use crate::model::dense::brickwork_pairing;
use crate::model::params::{single_site_n, two_site_m, ModelParams, Observables};
use crate::model::trace::DecayTrace;
use crate::numerics::{DenseMatrix, PrecisionContext, Real};

/// Open chain of `n` sites. Even layers pair `(0,1),(2,3),…`, odd layers
/// `(1,2),(3,4),…`; on odd layers sites `0` and `n-1` idle without noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BrickworkSpec {
    pub n: usize,
}

impl BrickworkSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("number of sites must be even and at least 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn pairs(&self, parity: usize) -> Vec<(usize, usize)> {
        brickwork_pairing(self.n, parity)
    }

    /// Parity of layer `d` (counted from one).
    pub fn parity_of_layer(d: usize) -> usize {
        (d + 1) % 2
    }
}

/// Gate followed by noise on both sites, conjugated into the rescaled
/// basis: `(Ñ⊗Ñ) D M D⁻¹` with `D = diag(1, q, q, q²)`.
pub fn rescaled_pair_update<T: Real>(params: &ModelParams<T>) -> Result<DenseMatrix<T>> {
    let ctx = &params.ctx;
    let qf: T = ctx.real(params.q as f64);
    let m = two_site_m(params);
    let scale = |k: usize| -> T {
        let w = (k >> 1) + (k & 1);
        qf.powi(w as i32)
    };
    let mut g = m.clone();
    for r in 0..4 {
        for c in 0..4 {
            g[(r, c)] = m[(r, c)].clone() * &scale(r) / &scale(c);
        }
    }
    if params.gamma.is_zero() {
        return Ok(g);
    }
    let n1 = single_site_n(&params.gamma)?;
    // Ñ = diag(1, q) N diag(1, 1/q)
    let mut nt = n1.clone();
    nt[(0, 1)] = n1[(0, 1)].clone() / &qf;
    let mut nn = DenseMatrix::zeros(ctx, 4, 4);
    for r in 0..4 {
        for c in 0..4 {
            nn[(r, c)] = nt[(r >> 1, c >> 1)].clone() * &nt[(r & 1, c & 1)];
        }
    }
    nn.matmul(&g)
}

/// One brickwork layer of the given parity; the input is left untouched.
pub fn tebd_layer<T: Real>(state: &MpsState<T>, parity: usize, params: &ModelParams<T>) -> Result<MpsState<T>> {
    let g = rescaled_pair_update(params)?;
    let mut out = state.clone();
    apply_layer(&mut out, parity, &g)?;
    Ok(out)
}

/// In-place layer with a precomputed pair update.
pub fn apply_layer<T: Real>(state: &mut MpsState<T>, parity: usize, g: &DenseMatrix<T>) -> Result<()> {
    state.right_canonicalize();
    let spec = BrickworkSpec::new(state.n)?;
    for (i, _) in spec.pairs(parity) {
        while state.center() != Some(i) {
            let c = state.center().expect("canonical");
            state.move_center_right(c);
        }
        state.apply_pair(i, g)?;
    }
    Ok(())
}

/// One period: even layer, then odd layer.
pub fn apply_period<T: Real>(state: &mut MpsState<T>, g: &DenseMatrix<T>) -> Result<()> {
    apply_layer(state, 0, g)?;
    apply_layer(state, 1, g)
}

/// Per-depth bookkeeping of one run.
#[derive(Clone, Debug)]
pub struct LayerRecord<T> {
    pub observables: Observables<T>,
    pub accumulated_discard: T,
    pub max_bond: usize,
}

/// Observables at depths `0..=depth`, layer `d` having parity
/// [`BrickworkSpec::parity_of_layer`].
pub fn run_layers<T: Real>(
    ctx: &PrecisionContext,
    params: &ModelParams<T>,
    n: usize,
    depth: usize,
    config: MpsConfig<T>,
) -> Result<Vec<LayerRecord<T>>> {
    let g = rescaled_pair_update(params)?;
    let mut state = MpsState::initial(ctx, n, params.q, config)?;
    let mut out = Vec::with_capacity(depth + 1);
    for d in 0..=depth {
        out.push(LayerRecord {
            observables: state.observables(ctx),
            accumulated_discard: state.accumulated_discard.clone(),
            max_bond: state.max_bond_dim(),
        });
        if d < depth {
            apply_layer(&mut state, BrickworkSpec::parity_of_layer(d + 1), &g)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Evolution1d<T> {
    pub trace: DecayTrace<T>,
    pub noisy: Vec<LayerRecord<T>>,
    pub noiseless: Vec<LayerRecord<T>>,
}

/// Noisy brickwork run with its `γ = 0` reference, run side by side.
pub fn evolve_1d<T: Real>(params: &ModelParams<T>, n: usize, depth: usize, config: MpsConfig<T>) -> Result<Evolution1d<T>> {
    let ctx = &params.ctx;
    let reference = params.noiseless();
    let (noisy, noiseless) = if params.is_noiseless() {
        let r = run_layers(ctx, params, n, depth, config)?;
        (r.clone(), r)
    } else {
        let (a, b) = rayon::join(
            || run_layers(ctx, params, n, depth, config.clone()),
            || run_layers(ctx, &reference, n, depth, config.clone()),
        );
        (a?, b?)
    };
    let obs: Vec<Observables<T>> = noisy.iter().map(|r| r.observables.clone()).collect();
    let obs0: Vec<Observables<T>> = noiseless.iter().map(|r| r.observables.clone()).collect();
    let trace = DecayTrace::build(ctx, params.q, n, &obs, &obs0, None)?;
    Ok(Evolution1d { trace, noisy, noiseless })
}
