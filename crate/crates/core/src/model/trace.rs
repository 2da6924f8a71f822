//! Per-depth observable records shared by the all-to-all and 1D engines.

use super::params::{q_powers, Observables};
use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};

/// Relative change below which consecutive decay rates count as flat.
pub const PLATEAU_REL_TOL: f64 = 1e-4;
/// Consecutive flat layers needed to declare a plateau.
pub const PLATEAU_RUN: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow<T> {
    pub depth: usize,
    pub fidelity: T,
    pub chi: T,
    /// `χ/χ₀`; undefined when `χ₀ = 0`.
    pub chi_b: Option<T>,
    /// Noiseless collision probability `(1 + χ₀)/q^N`.
    pub z: T,
    /// `f = q^N F - 1`
    pub shifted_fidelity: T,
    /// `ln(χ(d+1)/χ(d))`; absent on the last row.
    pub dlnchi: Option<T>,
    pub trace: T,
    /// Purity and collision probability with noise on both copies.
    pub two_copy: Option<(T, T)>,
}

#[derive(Clone, Debug)]
pub struct DecayTrace<T> {
    pub n_sites: usize,
    pub q: u32,
    pub rows: Vec<DecayRow<T>>,
    /// First depth where `χ ≤ 0` cut the record short.
    pub truncated_at: Option<usize>,
    /// First depth starting a run of flat decay rates.
    pub plateau_onset: Option<usize>,
}

impl<T: Real> DecayTrace<T> {
    /// Builds the record from observables at depths `0..`. `noiseless`
    /// must be at least as long as `noisy`; `two_copy`, when given, holds
    /// the observables of the `γ₂` run.
    pub fn build(
        ctx: &PrecisionContext,
        q: u32,
        n: usize,
        noisy: &[Observables<T>],
        noiseless: &[Observables<T>],
        two_copy: Option<&[Observables<T>]>,
    ) -> Result<Self> {
        if noiseless.len() < noisy.len() || two_copy.is_some_and(|t| t.len() < noisy.len()) {
            return Err(Error::DimensionMismatch("reference runs shorter than the noisy run".into()));
        }
        let qn = q_powers::<T>(ctx, q, n)[n].clone();
        let one: T = ctx.one();
        let mut rows: Vec<DecayRow<T>> = Vec::with_capacity(noisy.len());
        let mut truncated_at = None;
        for (d, o) in noisy.iter().enumerate() {
            if o.chi <= ctx.zero::<T>() {
                truncated_at = Some(d);
                break;
            }
            let chi0 = &noiseless[d].chi;
            let chi_b = if chi0.is_zero() { None } else { Some(o.chi.clone() / chi0) };
            rows.push(DecayRow {
                depth: d,
                fidelity: o.fidelity.clone(),
                chi: o.chi.clone(),
                chi_b,
                z: (one.clone() + chi0) / &qn,
                shifted_fidelity: o.shifted_fidelity.clone(),
                dlnchi: None,
                trace: o.trace.clone(),
                two_copy: two_copy.map(|t| (t[d].fidelity.clone(), t[d].xeb.clone())),
            });
        }
        for d in 0..rows.len().saturating_sub(1) {
            let r = (rows[d + 1].chi.clone() / &rows[d].chi).ln();
            rows[d].dlnchi = Some(r);
        }
        let plateau_onset = plateau_onset(&rows);
        Ok(Self { n_sites: n, q, rows, truncated_at, plateau_onset })
    }

    /// Last available decay rate.
    pub fn terminal_dlnchi(&self) -> Option<&T> {
        self.rows.iter().rev().find_map(|r| r.dlnchi.as_ref())
    }

    pub fn is_plateaued(&self) -> bool {
        self.plateau_onset.is_some()
    }
}

fn plateau_onset<T: Real>(rows: &[DecayRow<T>]) -> Option<usize> {
    let rates: Vec<f64> = rows.iter().filter_map(|r| r.dlnchi.as_ref().map(|x| x.to_f64())).collect();
    let mut run = 0;
    for d in 1..rates.len() {
        let scale = rates[d].abs().max(f64::MIN_POSITIVE);
        if (rates[d] - rates[d - 1]).abs() < PLATEAU_REL_TOL * scale {
            run += 1;
            if run >= PLATEAU_RUN {
                return Some(d - PLATEAU_RUN);
            }
        } else {
            run = 0;
        }
    }
    None
}
