use crate::error::{Error, Result};
use crate::gates::{region_check, GateStatParams, Region};
use crate::numerics::{check_context, DenseMatrix, PrecisionContext, Real};

/// Parameters of the transfer matrix `T(α, β, γ)` at qudit dimension `q`.
#[derive(Clone, Debug)]
pub struct ModelParams<T> {
    pub q: u32,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub ctx: PrecisionContext,
}

impl<T: Real> ModelParams<T> {
    pub fn new(ctx: &PrecisionContext, q: u32, alpha: T, beta: T, gamma: T) -> Result<Self> {
        check_context::<T>(ctx)?;
        for x in [&alpha, &beta, &gamma] {
            crate::numerics::check_precision(ctx, x)?;
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!("qudit dimension must be at least 2, got {q}")));
        }
        if gamma < ctx.zero::<T>() || gamma > ctx.one::<T>() {
            return Err(Error::InvalidParameter(format!("gamma {} outside [0, 1]", gamma.to_f64())));
        }
        let tol: T = ctx.real(crate::gates::REGION_TOL);
        if alpha < -tol.clone() {
            return Err(Error::InvalidParameter("alpha must be nonnegative".into()));
        }
        if q == 2 {
            if alpha > ctx.ratio::<T>(10, 9) + &tol {
                return Err(Error::InvalidParameter("alpha exceeds 10/9".into()));
            }
            let gp = GateStatParams::new(alpha.clone(), beta.clone(), q);
            if let Region::Outside(cs) = region_check(&gp) {
                let names: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                return Err(Error::InvalidParameter(format!(
                    "(alpha, beta) = ({}, {}) violates {}",
                    alpha.to_f64(),
                    beta.to_f64(),
                    names.join(", ")
                )));
            }
        }
        Ok(Self { q, alpha, beta, gamma, ctx: *ctx })
    }

    pub fn from_gate(ctx: &PrecisionContext, gate: &GateStatParams<T>, gamma: T) -> Result<Self> {
        Self::new(ctx, gate.q, gate.alpha.clone(), gate.beta.clone(), gamma)
    }

    /// Haar gates with noise `γ`.
    pub fn haar(ctx: &PrecisionContext, q: u32, gamma: T) -> Result<Self> {
        Self::new(ctx, q, ctx.one(), ctx.zero(), gamma)
    }

    /// All-to-all runs only see `α`; `β` is put on the realizable floor
    /// `-α/(q²+1)`.
    pub fn a2a(ctx: &PrecisionContext, q: u32, alpha: T, gamma: T) -> Result<Self> {
        let q2p1: T = ctx.real((q * q + 1) as f64);
        let beta = -(alpha.clone() / q2p1);
        Self::new(ctx, q, alpha, beta, gamma)
    }

    pub fn with_gamma(&self, gamma: T) -> Result<Self> {
        Self::new(&self.ctx, self.q, self.alpha.clone(), self.beta.clone(), gamma)
    }

    pub fn noiseless(&self) -> Self {
        Self { gamma: self.ctx.zero(), ..self.clone() }
    }

    pub fn qf(&self) -> T {
        self.ctx.real(self.q as f64)
    }

    pub fn is_noiseless(&self) -> bool {
        self.gamma.is_zero()
    }
}

/// Two-site gate update in basis order `{00, 01, 10, 11}`, columns are
/// inputs.
pub fn two_site_m<T: Real>(p: &ModelParams<T>) -> DenseMatrix<T> {
    let ctx = &p.ctx;
    let q2: T = ctx.real((p.q * p.q) as f64);
    let denom = q2.clone() + ctx.one::<T>();
    let to_i = p.alpha.clone() * &q2 / &denom;
    let to_s = p.alpha.clone() / &denom;
    let stay = ctx.one::<T>() - &p.alpha - &p.beta;
    let z: T = ctx.zero();
    let o: T = ctx.one();
    DenseMatrix::from_vec(
        4,
        4,
        vec![
            o.clone(), to_i.clone(), to_i, z.clone(),
            z.clone(), stay.clone(), p.beta.clone(), z.clone(),
            z.clone(), p.beta.clone(), stay, z.clone(),
            z.clone(), to_s.clone(), to_s, o,
        ],
    )
    .expect("4x4")
}

/// `[[1, γ], [0, 1-γ]]`
pub fn single_site_n<T: Real>(gamma: &T) -> Result<DenseMatrix<T>> {
    if *gamma < gamma.zero_like() || *gamma > gamma.one_like() {
        return Err(Error::InvalidParameter(format!("gamma {} outside [0, 1]", gamma.to_f64())));
    }
    Ok(crate::noise::single_site_update(gamma))
}

/// Per-site weights `(q/(q+1), 1/(q+1))` of a pure product state.
pub fn initial_site_weights<T: Real>(ctx: &PrecisionContext, q: u32) -> [T; 2] {
    let qp1 = (q + 1) as i64;
    [ctx.ratio(q as i64, qp1), ctx.ratio(1, qp1)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservableKind {
    Trace,
    XebP,
    FidelityS,
}

impl ObservableKind {
    /// Per-site covector `(w0, w1)`.
    pub fn site_vector<T: Real>(self, ctx: &PrecisionContext, q: u32) -> [T; 2] {
        let qf: T = ctx.real(q as f64);
        let inv = ctx.one::<T>() / &qf;
        match self {
            ObservableKind::Trace => [ctx.one(), ctx.one()],
            ObservableKind::XebP => [inv, ctx.one()],
            ObservableKind::FidelityS => [inv, qf],
        }
    }
}

/// Observables of one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Observables<T> {
    pub trace: T,
    /// `F = ⟨S|ρ⟩`
    pub fidelity: T,
    /// `X = ⟨P|ρ⟩`
    pub xeb: T,
    /// `χ = q^N X - 1`
    pub chi: T,
    /// `f = q^N F - 1`
    pub shifted_fidelity: T,
}

impl<T: Real> Observables<T> {
    /// `χ_B = χ / χ₀` against the noiseless XEB `χ₀` at equal depth.
    pub fn chi_b(&self, chi_noiseless: &T) -> T {
        self.chi.clone() / chi_noiseless
    }

    /// White-noise coefficient `a = (q^N F - 1)/(q^{2N} - 1)`.
    pub fn white_noise_coefficient(&self, ctx: &PrecisionContext, q: u32, n: usize) -> T {
        let q2n: T = ctx.real::<T>(q as f64).powi(2 * n as i32);
        self.shifted_fidelity.clone() / (q2n - ctx.one::<T>())
    }
}

/// Powers `q^0 .. q^max`.
pub fn q_powers<T: Real>(ctx: &PrecisionContext, q: u32, max: usize) -> Vec<T> {
    let qf: T = ctx.real(q as f64);
    let mut out = Vec::with_capacity(max + 1);
    let mut x: T = ctx.one();
    for _ in 0..=max {
        out.push(x.clone());
        x *= &qf;
    }
    out
}

/// Observables of a Hamming-symmetric summary `p_S`. `χ` and `f` are
/// accumulated as `Σ_{S≥1} p_S (q^S - 1)` and `Σ_{S≥1} p_S (q^{2S} - 1)`,
/// which equal the defining expressions when the trace is one and avoid
/// the cancellation in `q^N X - 1`.
pub fn observables_from_sectors<T: Real>(ctx: &PrecisionContext, q: u32, p: &[T]) -> Observables<T> {
    let n = p.len() - 1;
    let pw = q_powers::<T>(ctx, q, 2 * n);
    let one: T = ctx.one();
    let mut trace: T = ctx.zero();
    let mut chi: T = ctx.zero();
    let mut fs: T = ctx.zero();
    for (s, ps) in p.iter().enumerate() {
        trace += ps;
        if s > 0 {
            chi.add_mul(ps, &(pw[s].clone() - &one));
            fs.add_mul(ps, &(pw[2 * s].clone() - &one));
        }
    }
    let qn = pw[n].clone();
    let xeb = (chi.clone() + &trace) / &qn;
    let fidelity = (fs.clone() + &trace) / &qn;
    Observables { trace, fidelity, xeb, chi, shifted_fidelity: fs }
}
