//! `-ln Λ_g` along lines of the gate region.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::krylov::{krylov_leading_eigs, KrylovConfig};
use super::state::MpsConfig;
use super::tebd::BrickworkSpec;
use crate::error::{Error, Result};
use crate::model::params::ModelParams;
use crate::numerics::{PrecisionContext, Real};

/// Lines through the `(α, β)` region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateLine {
    /// `β = 1 - q²α/(q²+1)`, the fSim(π/2, φ) family.
    Upper,
    /// `β = -α/(q²+1)`, the fSim(0, φ) family.
    Lower,
    /// `β = 0`
    Zero,
}

impl GateLine {
    pub fn beta<T: Real>(self, ctx: &PrecisionContext, q: u32, alpha: &T) -> T {
        let q2: T = ctx.real((q * q) as f64);
        let den = q2.clone() + ctx.one::<T>();
        match self {
            GateLine::Upper => ctx.one::<T>() - alpha.clone() * &q2 / &den,
            GateLine::Lower => -(alpha.clone() / &den),
            GateLine::Zero => ctx.zero(),
        }
    }
}

impl FromStr for GateLine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(Self::Upper),
            "lower" => Ok(Self::Lower),
            "zero" => Ok(Self::Zero),
            _ => Err(Error::Parse(format!("unknown gate line '{s}', expected upper, lower or zero"))),
        }
    }
}

impl fmt::Display for GateLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Upper => "upper",
            Self::Lower => "lower",
            Self::Zero => "zero",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow<T> {
    pub alpha: T,
    pub beta: T,
    /// Per-layer `Λ_g`.
    pub lambda_g: Option<T>,
    /// `-ln Λ_g`
    pub critical: Option<T>,
    /// False when the Ritz residual stayed above tolerance.
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepTable<T> {
    pub line: GateLine,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepTable<T> {
    /// Whether the successful rows are nondecreasing in `α` up to `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        let vals: Vec<f64> = self.rows.iter().filter_map(|r| r.critical.as_ref().map(|x| x.to_f64())).collect();
        vals.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Largest decrease between consecutive successful rows.
    pub fn worst_decrease(&self) -> f64 {
        let vals: Vec<f64> = self.rows.iter().filter_map(|r| r.critical.as_ref().map(|x| x.to_f64())).collect();
        vals.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }
}

/// Per-layer `Λ_g` at `γ = 0` for one gate, and whether it converged.
pub fn gap_1d<T: Real>(params: &ModelParams<T>, n: usize, cfg: &KrylovConfig, mps: &MpsConfig<T>) -> Result<(T, bool)> {
    let noiseless = params.noiseless();
    let spec = krylov_leading_eigs(BrickworkSpec::new(n)?, &noiseless, cfg, mps, 1)?;
    spec.leading_gap()
        .map(|v| (v.per_layer.clone(), spec.converged))
        .ok_or_else(|| Error::Numeric("no Ritz value outside the vacua".into()))
}

/// Sweeps `α` along `line`; failures are recorded per row.
pub fn critical_sweep_1d<T: Real>(
    ctx: &PrecisionContext,
    line: GateLine,
    alphas: &[T],
    q: u32,
    n: usize,
    cfg: &KrylovConfig,
    mps: &MpsConfig<T>,
) -> SweepTable<T> {
    let rows = alphas
        .par_iter()
        .map(|alpha| {
            let beta = line.beta(ctx, q, alpha);
            let result = ModelParams::new(ctx, q, alpha.clone(), beta.clone(), ctx.zero())
                .and_then(|p| gap_1d(&p, n, cfg, mps));
            match result {
                Ok((g, converged)) => SweepRow {
                    alpha: alpha.clone(),
                    beta,
                    critical: Some(-g.ln()),
                    lambda_g: Some(g),
                    converged,
                    error: None,
                },
                Err(e) => SweepRow {
                    alpha: alpha.clone(),
                    beta,
                    lambda_g: None,
                    critical: None,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    SweepTable { line, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_betas() {
        let c = PrecisionContext::double();
        assert!((GateLine::Upper.beta(&c, 2, &(10.0 / 9.0)) - 1.0 / 9.0).abs() < 1e-15);
        assert!((GateLine::Lower.beta(&c, 2, &1.0) + 0.2).abs() < 1e-15);
        assert_eq!(GateLine::Zero.beta(&c, 2, &0.7), 0.0);
        assert_eq!("upper".parse::<GateLine>().unwrap(), GateLine::Upper);
        assert!("middle".parse::<GateLine>().is_err());
    }

    #[test]
    fn out_of_region_point_is_reported() {
        let c = PrecisionContext::double();
        let mps = MpsConfig::for_context(&c);
        let t = critical_sweep_1d(&c, GateLine::Zero, &[5.0], 2, 6, &KrylovConfig::for_context(&c), &mps);
        assert!(t.rows[0].error.is_some());
    }
}
