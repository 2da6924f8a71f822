//! Reduced spectra, the gap `Λ_g`, and the critical noise strength.

use std::fmt;
use std::str::FromStr;

use super::transfer::{reduced_gate_matrix, ReducedTransfer};
use crate::error::{Error, Result};
use crate::model::params::ModelParams;
use crate::model::spectrum::{spectrum_and_couplings, CouplingConstants, SectorLabel, SpectralProblem, SpectrumResult};
use crate::noise::gamma_from_epsilon;
use crate::numerics::eigen::{eigenvalues, EigenConfig};
use crate::numerics::{linear_fit, LinearFit, PrecisionContext, Real};

/// Sizes used for the `1/N` extrapolation of the gap.
pub const DEFAULT_EXTRAPOLATION_SIZES: [usize; 5] = [20, 40, 60, 80, 100];

/// Eigenvalues closer than this to one count as fixed points.
fn unit_tol(ctx: &PrecisionContext) -> f64 {
    (1e3 * ctx.half_tolerance()).max(1e-60)
}

/// Leading `k` eigenpairs of `T_red` with sector labels and couplings.
pub fn reduced_spectrum<T: Real>(
    transfer: &ReducedTransfer<T>,
    ctx: &PrecisionContext,
    k: usize,
) -> Result<(SpectrumResult<T>, CouplingConstants<T>)> {
    if k > transfer.n + 1 {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds N + 1 = {}", transfer.n + 1)));
    }
    let prob = SpectralProblem::reduced(ctx, transfer.t_red.clone(), transfer.n, transfer.q)?;
    spectrum_and_couplings(&prob, k)
}

/// Largest real eigenvalue of the noiseless reduced transfer below one.
pub fn noiseless_gap<T: Real>(ctx: &PrecisionContext, alpha: &T, q: u32, n: usize) -> Result<T> {
    let m = reduced_gate_matrix(ctx, n, q, alpha)?;
    let tol = unit_tol(ctx);
    let values = eigenvalues(&m, &EigenConfig::default())?;
    let scale = 1e3 * ctx.half_tolerance();
    values
        .into_iter()
        .find(|(re, im)| im.abs().to_f64() <= scale && re.to_f64() < 1.0 - tol)
        .map(|(re, _)| re)
        .ok_or_else(|| Error::Numeric(format!("no real eigenvalue below one at N = {n}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalMode {
    /// `-ln(1 - α + 2α/(q²+1))`
    Analytic,
    /// `-ln Λ_g` from the `1/N` extrapolation of the noiseless spectrum.
    Numeric,
}

impl FromStr for CriticalMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "numeric" => Ok(Self::Numeric),
            _ => Err(Error::Parse(format!("unknown method '{s}', expected analytic or numeric"))),
        }
    }
}

impl fmt::Display for CriticalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Numeric => "numeric",
        })
    }
}

/// Predicted infinite-size gap `1 - α + 2α/(q²+1)`.
pub fn predicted_gap<T: Real>(ctx: &PrecisionContext, alpha: &T, q: u32) -> T {
    let q2p1: T = ctx.real((q as f64) * (q as f64) + 1.0);
    ctx.one::<T>() - alpha + alpha.clone() * &ctx.real::<T>(2.0) / &q2p1
}

/// `(εN)_c = -ln Λ_g`.
pub fn critical_point<T: Real>(ctx: &PrecisionContext, alpha: &T, q: u32, mode: CriticalMode) -> Result<T> {
    let lambda = match mode {
        CriticalMode::Analytic => predicted_gap(ctx, alpha, q),
        CriticalMode::Numeric => gap_extrapolation(ctx, alpha, q, &DEFAULT_EXTRAPOLATION_SIZES)?.intercept(),
    };
    if lambda <= ctx.zero::<T>() {
        return Err(Error::Numeric(format!("gap {} is not positive", lambda.to_f64())));
    }
    Ok(-lambda.ln())
}

/// Number of largest sizes entering the extrapolating fit.
pub const ASYMPTOTIC_FIT_POINTS: usize = 3;

#[derive(Clone, Debug)]
pub struct GapExtrapolation<T> {
    pub sizes: Vec<usize>,
    pub gaps: Vec<T>,
    /// `Λ_g(N) ≈ intercept + slope / N` over the largest
    /// [`ASYMPTOTIC_FIT_POINTS`] sizes.
    pub fit: LinearFit<T>,
    /// The same fit over every size. Curvature in `1/N` biases its
    /// intercept low when small sizes are included.
    pub fit_all: LinearFit<T>,
}

impl<T: Real> GapExtrapolation<T> {
    pub fn intercept(&self) -> T {
        self.fit.intercept.clone()
    }
}

pub fn gap_extrapolation<T: Real>(
    ctx: &PrecisionContext,
    alpha: &T,
    q: u32,
    sizes: &[usize],
) -> Result<GapExtrapolation<T>> {
    if sizes.len() < ASYMPTOTIC_FIT_POINTS {
        return Err(Error::InvalidParameter(format!(
            "extrapolation needs at least {ASYMPTOTIC_FIT_POINTS} sizes, got {}",
            sizes.len()
        )));
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut gaps = Vec::with_capacity(sorted.len());
    let mut xs = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        gaps.push(noiseless_gap(ctx, alpha, q, n)?);
        xs.push(ctx.one::<T>() / &ctx.real::<T>(n as f64));
    }
    let fit_all = linear_fit(&xs, &gaps)?;
    let tail = sorted.len().saturating_sub(ASYMPTOTIC_FIT_POINTS);
    let fit = linear_fit(&xs[tail..], &gaps[tail..])?;
    Ok(GapExtrapolation { sizes: sorted, gaps, fit, fit_all })
}

/// The two spectral branches at one noise strength.
#[derive(Clone, Debug)]
pub struct KinkPoint<T> {
    pub eps_n: T,
    pub lambda_g: T,
    pub lambda_v: T,
}

#[derive(Clone, Debug)]
pub struct KinkResult<T> {
    pub eps_n: T,
    pub points: Vec<KinkPoint<T>>,
}

/// `Λ_g` and `Λ_v` of the noisy reduced transfer at `εN`.
pub fn branches<T: Real>(ctx: &PrecisionContext, n: usize, q: u32, alpha: &T, eps_n: &T) -> Result<KinkPoint<T>> {
    let eps = eps_n.clone() / &ctx.real::<T>(n as f64);
    let gamma = gamma_from_epsilon(&eps, q)?;
    let params = ModelParams::a2a(ctx, q, alpha.clone(), gamma)?;
    let t = ReducedTransfer::new(&params, n)?;
    let (spec, _) = reduced_spectrum(&t, ctx, n + 1)?;
    let tol = unit_tol(ctx);
    let pick = |label| {
        spec.leading_below_one(label, tol)
            .map(|e| e.value.clone())
            .ok_or_else(|| Error::Numeric(format!("no {label} eigenvalue at epsN = {}", eps_n.to_f64())))
    };
    Ok(KinkPoint { eps_n: eps_n.clone(), lambda_g: pick(SectorLabel::Low)?, lambda_v: pick(SectorLabel::Extensive)? })
}

/// Noise strength where the extensive branch `Λ_v` crosses the
/// low-weight branch `Λ_g`: bracketed on the grid, then bisected.
pub fn kink_locator<T: Real>(ctx: &PrecisionContext, n: usize, q: u32, alpha: &T, grid: &[T]) -> Result<KinkResult<T>> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("kink search needs at least two grid points".into()));
    }
    let points: Vec<KinkPoint<T>> = grid.iter().map(|e| branches(ctx, n, q, alpha, e)).collect::<Result<_>>()?;
    let sign = |p: &KinkPoint<T>| p.lambda_v > p.lambda_g;
    let idx = (0..points.len() - 1)
        .find(|&i| sign(&points[i]) != sign(&points[i + 1]))
        .ok_or_else(|| Error::Numeric("no branch crossing inside the grid".into()))?;
    let (mut lo, mut hi) = (points[idx].eps_n.clone(), points[idx + 1].eps_n.clone());
    let lo_sign = sign(&points[idx]);
    let two: T = ctx.real(2.0);
    for _ in 0..40 {
        let mid = (lo.clone() + &hi) / &two;
        let p = branches(ctx, n, q, alpha, &mid)?;
        if sign(&p) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi.clone() - &lo).to_f64().abs() < 1e-7 {
            break;
        }
    }
    Ok(KinkResult { eps_n: (lo + &hi) / &two, points })
}
