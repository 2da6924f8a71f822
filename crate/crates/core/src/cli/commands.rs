//! Subcommand bodies, generic over the scalar type.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Geometry, RunConfig};
use super::output::{num, opt_num, ResultTable};
use crate::a2a::critical::{branches, predicted_gap, DEFAULT_EXTRAPOLATION_SIZES};
use crate::a2a::evolve::{run_observables, two_copy_params};
use crate::a2a::{evolve, gap_extrapolation, reduced_spectrum, CriticalMode, ReducedTransfer};
use crate::error::{Error, Result};
use crate::gates::{parse_real, resolve_gate};
use crate::model::dense::{a2a_dense_transfer, brickwork_pairing, project_to_sectors};
use crate::model::trace::DecayTrace;
use crate::model::{dense_layer, DenseState, ModelParams, Observables, ORACLE_LIMIT};
use crate::mps::{
    apply_layer, critical_sweep_1d, evolve_1d, krylov_leading_eigs, rescaled_pair_update, run_layers, BrickworkSpec,
    GateLine, KrylovConfig, MpsConfig, MpsState,
};
use crate::noise::{gamma_from_epsilon, stat_params_from_kraus, NoiseStatParams};
use crate::numerics::{DenseMatrix, PrecisionContext, Real};

/// Real from a decimal literal or a ratio `a/b`.
pub fn real_text<T: Real>(ctx: &PrecisionContext, s: &str) -> Result<T> {
    match s.split_once('/') {
        Some((a, b)) => {
            let den: T = parse_real(ctx, b.trim())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(parse_real::<T>(ctx, a.trim())? / &den)
        }
        None => parse_real(ctx, s),
    }
}

/// Noise of a run: `γ` per site, plus the channel summary when a channel
/// (rather than `εN`) was given.
pub struct NoiseSetting<T> {
    pub gamma: T,
    pub channel: Option<NoiseStatParams<T>>,
}

pub fn noise_setting<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig, eps_n: Option<&str>) -> Result<NoiseSetting<T>> {
    let (n, q) = (cfg.sites(), cfg.q());
    if let Some(e) = eps_n.or(cfg.eps_n.as_deref()) {
        let eps = real_text::<T>(ctx, e)? / &ctx.real::<T>(n as f64);
        return Ok(NoiseSetting { gamma: gamma_from_epsilon(&eps, q)?, channel: None });
    }
    match &cfg.noise {
        Some(spec) => {
            let ns = stat_params_from_kraus(&spec.build::<T>(ctx, q)?);
            Ok(NoiseSetting { gamma: ns.gamma1.clone(), channel: Some(ns) })
        }
        None => Ok(NoiseSetting { gamma: ctx.zero(), channel: None }),
    }
}

/// Model parameters for the configured geometry. All-to-all runs keep
/// only `α` of the gate.
pub fn model_params<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig, gamma: T) -> Result<ModelParams<T>> {
    let gate = resolve_gate::<T>(ctx, &cfg.gate(), cfg.q())?;
    match cfg.geometry() {
        Geometry::AllToAll => ModelParams::a2a(ctx, cfg.q(), gate.params.alpha, gamma),
        Geometry::Chain => ModelParams::from_gate(ctx, &gate.params, gamma),
    }
}

/// Truncation settings; `krylov` selects the eigensolver default budget.
pub fn mps_config<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig, krylov: bool) -> Result<MpsConfig<T>> {
    let mut m = if krylov { MpsConfig::for_krylov(ctx) } else { MpsConfig::for_context(ctx) };
    if let Some(t) = &cfg.trunc {
        m.trunc_budget = real_text(ctx, t)?;
    }
    if let Some(b) = cfg.bond_cap {
        m.max_bond = b;
    }
    Ok(m)
}

/// Krylov settings of the command line. Clustered spectra (iSWAP-like
/// gates) stall individual residuals, so results are reported with their
/// residual instead of failing.
pub fn krylov_config(ctx: &PrecisionContext, cfg: &RunConfig) -> KrylovConfig {
    let mut k = KrylovConfig { require_convergence: false, ..KrylovConfig::for_context(ctx) };
    if let Some(d) = cfg.krylov_dim {
        k.subspace_dim = d;
    }
    if let Some(r) = cfg.restarts {
        k.max_restarts = r;
    }
    k
}

pub fn gate_info<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig) -> Result<ResultTable> {
    let info = resolve_gate::<T>(ctx, &cfg.gate(), cfg.q())?;
    let gao = info.gao();
    let mut fields = vec![("gate", cfg.gate().to_string())];
    if let Some(c) = &info.canonical {
        fields.push(("c1", num(ctx, &c.c1)));
        fields.push(("c2", num(ctx, &c.c2)));
        fields.push(("c3", num(ctx, &c.c3)));
    }
    if let Some(inv) = &info.invariants {
        fields.push(("abs_g1", num(ctx, &inv.abs_g1)));
        fields.push(("g2", num(ctx, &inv.g2)));
    }
    fields.extend([
        ("alpha", num(ctx, &info.params.alpha)),
        ("beta", num(ctx, &info.params.beta)),
        ("D", num(ctx, &gao.d)),
        ("R", num(ctx, &gao.r)),
        ("eta", num(ctx, &gao.eta)),
        ("region", info.region().to_string()),
    ]);
    Ok(ResultTable::record(fields))
}

pub fn noise_info<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig) -> Result<ResultTable> {
    let spec = cfg.noise.clone().ok_or_else(|| Error::InvalidParameter("noise-info needs a noise spec".into()))?;
    let ns = stat_params_from_kraus(&spec.build::<T>(ctx, cfg.q())?);
    Ok(ResultTable::record(vec![
        ("noise", spec.to_string()),
        ("r", num(ctx, &ns.r)),
        ("u", num(ctx, &ns.u)),
        ("mu", num(ctx, &ns.mu)),
        ("gamma1", num(ctx, &ns.gamma1)),
        ("gamma2", num(ctx, &ns.gamma2)),
        ("delta2", num(ctx, &ns.delta2)),
        ("epsilon", num(ctx, &ns.epsilon)),
    ]))
}

/// Decay record of one run in either geometry, with the 1D truncation
/// bookkeeping when it applies.
pub struct EvolveRun<T> {
    pub trace: DecayTrace<T>,
    /// `(accumulated discard, max bond)` per depth, 1D only.
    pub mps: Option<Vec<(T, usize)>>,
}

pub fn run_evolve<T: Real>(
    ctx: &PrecisionContext,
    cfg: &RunConfig,
    noise: &NoiseSetting<T>,
    two_copy: bool,
) -> Result<EvolveRun<T>> {
    let (n, depth) = (cfg.sites(), cfg.depth());
    let params = model_params(ctx, cfg, noise.gamma.clone())?;
    let channel = if two_copy {
        Some(noise.channel.as_ref().ok_or_else(|| {
            Error::InvalidParameter("the two-copy columns need a noise channel, not eps_n".into())
        })?)
    } else {
        None
    };
    match cfg.geometry() {
        Geometry::AllToAll => Ok(EvolveRun { trace: evolve(&params, n, depth, channel)?, mps: None }),
        Geometry::Chain => {
            let mps = mps_config(ctx, cfg, false)?;
            // reject non-unital two-copy requests before the expensive runs
            let p2 = channel.map(|ns| two_copy_params(&params, ns)).transpose()?;
            let ev = evolve_1d(&params, n, depth, mps.clone())?;
            let trace = match p2 {
                None => ev.trace,
                Some(p2) => {
                    let both = run_layers(ctx, &p2, n, depth, mps)?;
                    let obs: Vec<Observables<T>> = ev.noisy.iter().map(|r| r.observables.clone()).collect();
                    let obs0: Vec<Observables<T>> = ev.noiseless.iter().map(|r| r.observables.clone()).collect();
                    let obs2: Vec<Observables<T>> = both.into_iter().map(|r| r.observables).collect();
                    DecayTrace::build(ctx, params.q, n, &obs, &obs0, Some(&obs2))?
                }
            };
            let book = ev.noisy.iter().map(|r| (r.accumulated_discard.clone(), r.max_bond)).collect();
            Ok(EvolveRun { trace, mps: Some(book) })
        }
    }
}

pub fn cmd_evolve<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig) -> Result<ResultTable> {
    let noise = noise_setting::<T>(ctx, cfg, None)?;
    let two_copy = cfg.two_copy.unwrap_or(false);
    let run = run_evolve(ctx, cfg, &noise, two_copy)?;
    let mut cols = vec!["d", "F", "chi", "chi_B", "Z", "f", "dlnchi"];
    if two_copy {
        cols.extend(["purity", "collision"]);
    }
    if run.mps.is_some() {
        cols.extend(["discarded", "max_bond"]);
    }
    let mut t = ResultTable::new(&cols);
    for (i, r) in run.trace.rows.iter().enumerate() {
        let mut row = vec![
            r.depth.to_string(),
            num(ctx, &r.fidelity),
            num(ctx, &r.chi),
            opt_num(ctx, r.chi_b.as_ref()),
            num(ctx, &r.z),
            num(ctx, &r.shifted_fidelity),
            opt_num(ctx, r.dlnchi.as_ref()),
        ];
        if two_copy {
            let (p, c) = r.two_copy.as_ref().map(|(p, c)| (num(ctx, p), num(ctx, c))).unwrap_or_default();
            row.extend([p, c]);
        }
        if let Some(book) = &run.mps {
            row.extend([num(ctx, &book[i].0), book[i].1.to_string()]);
        }
        t.push(row);
    }
    Ok(t)
}

/// The `εN` values of a grid command: the grid, else the single `eps_n`,
/// else one point at the configured noise (empty label).
fn eps_points(cfg: &RunConfig) -> Vec<Option<String>> {
    match (&cfg.eps_grid, &cfg.eps_n) {
        (Some(g), _) => g.iter().cloned().map(Some).collect(),
        (None, Some(e)) => vec![Some(e.clone())],
        (None, None) => vec![None],
    }
}

pub fn cmd_spectrum<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig) -> Result<ResultTable> {
    let (n, k) = (cfg.sites(), cfg.eigs());
    let points = eps_points(cfg);
    let mut t = ResultTable::new(&[
        "eps_n",
        "index",
        "Lambda",
        "Lambda_imag",
        "per_layer",
        "sector_label",
        "c_F",
        "c_chi",
        "residual",
    ]);
    let blocks: Vec<Result<Vec<Vec<String>>>> = points
        .par_iter()
        .map(|e| {
            let noise = noise_setting::<T>(ctx, cfg, e.as_deref())?;
            let params = model_params(ctx, cfg, noise.gamma)?;
            let label = e.clone().unwrap_or_default();
            let mut rows = Vec::new();
            match cfg.geometry() {
                Geometry::AllToAll => {
                    let tr = ReducedTransfer::new(&params, n)?;
                    let (spec, c) = reduced_spectrum(&tr, ctx, k.min(n + 1))?;
                    for (i, entry) in spec.entries.iter().enumerate() {
                        rows.push(vec![
                            label.clone(),
                            i.to_string(),
                            num(ctx, &entry.value),
                            num(ctx, &entry.imag),
                            num(ctx, &entry.value),
                            entry.label.map(|l| l.to_string()).unwrap_or_default(),
                            opt_num(ctx, c.fidelity[i].as_ref()),
                            opt_num(ctx, c.chi[i].as_ref()),
                            String::new(),
                        ]);
                    }
                }
                Geometry::Chain => {
                    let spec = krylov_leading_eigs(
                        BrickworkSpec::new(n)?,
                        &params,
                        &krylov_config(ctx, cfg),
                        &mps_config(ctx, cfg, true)?,
                        k,
                    )?;
                    for (i, v) in spec.values.iter().enumerate() {
                        rows.push(vec![
                            label.clone(),
                            i.to_string(),
                            num(ctx, &v.re),
                            num(ctx, &v.im),
                            num(ctx, &v.per_layer),
                            if v.locked { "vacuum".into() } else { "ritz".into() },
                            String::new(),
                            String::new(),
                            num(ctx, &v.residual),
                        ]);
                    }
                }
            }
            Ok(rows)
        })
        .collect();
    for b in blocks {
        for row in b? {
            t.push(row);
        }
    }
    Ok(t)
}

/// Default `α` grid: `0, 0.1, …, 1` and the top of the range.
pub fn default_alphas(q: u32) -> Vec<String> {
    let mut v: Vec<String> = (0..=10).map(|i| format!("{}", i as f64 / 10.0)).collect();
    let q2 = q * q;
    v.push(format!("{}/{}", q2 + 1, q2));
    v
}

pub fn cmd_critical<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig) -> Result<ResultTable> {
    let q = cfg.q();
    let texts = cfg.alphas.clone().unwrap_or_else(|| default_alphas(q));
    let alphas: Vec<T> = texts.iter().map(|s| real_text(ctx, s)).collect::<Result<_>>()?;
    let mut t = ResultTable::new(&["alpha", "beta", "lambda_g", "epsN_c", "status"]);
    match cfg.geometry() {
        Geometry::AllToAll => {
            let mode = cfg.method.unwrap_or(CriticalMode::Analytic);
            let rows: Vec<Vec<String>> = alphas
                .par_iter()
                .map(|a| {
                    let lambda = match mode {
                        CriticalMode::Analytic => Ok(predicted_gap(ctx, a, q)),
                        CriticalMode::Numeric => {
                            gap_extrapolation(ctx, a, q, &DEFAULT_EXTRAPOLATION_SIZES).map(|g| g.intercept())
                        }
                    };
                    match lambda {
                        Ok(l) if l > ctx.zero::<T>() => {
                            let c = -l.ln();
                            vec![num(ctx, a), String::new(), num(ctx, &l), num(ctx, &c), "ok".into()]
                        }
                        Ok(l) => vec![
                            num(ctx, a),
                            String::new(),
                            num(ctx, &l),
                            String::new(),
                            "gap not positive".into(),
                        ],
                        Err(e) => vec![num(ctx, a), String::new(), String::new(), String::new(), e.to_string()],
                    }
                })
                .collect();
            for r in rows {
                t.push(r);
            }
        }
        Geometry::Chain => {
            let line = cfg.line.unwrap_or(GateLine::Upper);
            let table = critical_sweep_1d(
                ctx,
                line,
                &alphas,
                q,
                cfg.sites(),
                &krylov_config(ctx, cfg),
                &mps_config(ctx, cfg, true)?,
            );
            for r in table.rows {
                t.push(vec![
                    num(ctx, &r.alpha),
                    num(ctx, &r.beta),
                    opt_num(ctx, r.lambda_g.as_ref()),
                    opt_num(ctx, r.critical.as_ref()),
                    match (r.error, r.converged) {
                        (Some(e), _) => e,
                        (None, true) => "ok".into(),
                        (None, false) => "unconverged".into(),
                    },
                ]);
            }
        }
    }
    Ok(t)
}

pub fn cmd_sweep<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig) -> Result<ResultTable> {
    let grid: Vec<String> = cfg
        .eps_grid
        .clone()
        .unwrap_or_else(|| (1..=10).map(|i| format!("{}", i as f64 / 5.0)).collect());
    let n = cfg.sites();
    let mut t = ResultTable::new(&[
        "eps_n",
        "gamma",
        "depth_reached",
        "plateau_onset",
        "terminal_dlnchi",
        "ln_lambda1",
        "final_F",
        "status",
    ]);
    let rows: Vec<Vec<String>> = grid
        .par_iter()
        .map(|e| {
            let out = (|| -> Result<Vec<String>> {
                let noise = noise_setting::<T>(ctx, cfg, Some(e))?;
                let run = run_evolve(ctx, cfg, &noise, false)?;
                let ln_l1 = match cfg.geometry() {
                    Geometry::AllToAll => {
                        let eps_n: T = real_text(ctx, e)?;
                        let alpha = model_params(ctx, cfg, ctx.zero::<T>())?.alpha;
                        let b = branches(ctx, n, cfg.q(), &alpha, &eps_n)?;
                        let white = (ctx.one::<T>() - eps_n / &ctx.real::<T>(n as f64)).powi(n as i32);
                        Some(b.lambda_g.max_of(white).ln())
                    }
                    Geometry::Chain => None,
                };
                let last = run.trace.rows.last().ok_or_else(|| Error::Numeric("empty decay record".into()))?;
                Ok(vec![
                    e.clone(),
                    num(ctx, &noise.gamma),
                    last.depth.to_string(),
                    run.trace.plateau_onset.map(|d| d.to_string()).unwrap_or_default(),
                    opt_num(ctx, run.trace.terminal_dlnchi()),
                    opt_num(ctx, ln_l1.as_ref()),
                    num(ctx, &last.fidelity),
                    "ok".into(),
                ])
            })();
            out.unwrap_or_else(|err| {
                let mut r = vec![e.clone()];
                r.extend(std::iter::repeat(String::new()).take(6));
                r.push(err.to_string());
                r
            })
        })
        .collect();
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

/// One line of the oracle report.
#[derive(Clone, Debug)]
pub struct OracleCheck {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

/// `target`, loosened to what the working precision can deliver.
fn precision_tol(ctx: &PrecisionContext, target: f64) -> f64 {
    target.max(1e6 * 2f64.powi(-(ctx.bits() as i32)))
}

fn max_diff<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| (x.clone() - y).abs().to_f64()).fold(0.0, f64::max)
}

fn obs_diff<T: Real>(a: &Observables<T>, b: &Observables<T>) -> f64 {
    [(&a.trace, &b.trace), (&a.fidelity, &b.fidelity), (&a.chi, &b.chi)]
        .iter()
        .map(|(x, y)| ((*x).clone() - *y).abs().to_f64())
        .fold(0.0, f64::max)
}

/// Random `(α, β, γ)` inside the qubit region, by rejection.
pub fn random_params<T: Real>(ctx: &PrecisionContext, rng: &mut ChaCha8Rng) -> ModelParams<T> {
    let unit = |rng: &mut ChaCha8Rng| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    loop {
        let alpha = unit(rng) * 10.0 / 9.0;
        let lo = -alpha / 5.0;
        let beta = lo + unit(rng) * (1.0 - 4.0 * alpha / 5.0 - lo);
        let gamma = unit(rng) * 0.3;
        if let Ok(p) = ModelParams::new(ctx, 2, ctx.real(alpha), ctx.real(beta), ctx.real(gamma)) {
            return p;
        }
    }
}

fn a2a_oracle_dev<T: Real>(params: &ModelParams<T>, n: usize) -> Result<f64> {
    let red = ReducedTransfer::new(params, n)?;
    let (proj, spread) = project_to_sectors(&a2a_dense_transfer(n, params)?, n);
    Ok(max_diff(&red.t_red, &proj).max(spread.to_f64()))
}

fn chain_oracle_dev<T: Real>(params: &ModelParams<T>, n: usize, layers: usize, mps: &MpsConfig<T>) -> Result<f64> {
    let ctx = &params.ctx;
    let g = rescaled_pair_update(params)?;
    let mut s = MpsState::initial(ctx, n, params.q, mps.clone())?;
    let mut d = DenseState::<T>::initial(ctx, n, params.q)?;
    let mut worst = 0.0f64;
    for layer in 1..=layers {
        let parity = BrickworkSpec::parity_of_layer(layer);
        apply_layer(&mut s, parity, &g)?;
        d = dense_layer(&d, &brickwork_pairing(n, parity), params)?;
        worst = worst.max(obs_diff(&s.observables(ctx), &d.observables(ctx, params.q)));
    }
    Ok(worst)
}

/// Dense brute force against the production engines at small `N`.
pub fn oracle_checks<T: Real>(ctx: &PrecisionContext, cfg: &RunConfig) -> Result<Vec<OracleCheck>> {
    let n = cfg.sites();
    let noise = noise_setting::<T>(ctx, cfg, None)?;
    let params = model_params(ctx, cfg, noise.gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let mut out = Vec::new();
    match cfg.geometry() {
        Geometry::AllToAll => {
            if n > 8 {
                return Err(Error::OracleLimit { limit: 8, requested: n });
            }
            let tol = precision_tol(ctx, 1e-25);
            out.push(OracleCheck { name: "reduced_vs_dense".into(), deviation: a2a_oracle_dev(&params, n)?, tolerance: tol });
            let mut worst = 0.0f64;
            for _ in 0..3 {
                worst = worst.max(a2a_oracle_dev(&random_params::<T>(ctx, &mut rng), n)?);
            }
            out.push(OracleCheck { name: "reduced_vs_dense_random".into(), deviation: worst, tolerance: tol });
            // the projected dense transfer must not see β
            let a = &params.alpha;
            let mut mats = Vec::new();
            for line in [GateLine::Lower, GateLine::Zero, GateLine::Upper] {
                let p = ModelParams::new(ctx, params.q, a.clone(), line.beta(ctx, params.q, a), params.gamma.clone());
                if let Ok(p) = p {
                    mats.push(project_to_sectors(&a2a_dense_transfer(n, &p)?, n).0);
                }
            }
            let spread = mats.windows(2).map(|w| max_diff(&w[0], &w[1])).fold(0.0, f64::max);
            out.push(OracleCheck { name: "beta_independence".into(), deviation: spread, tolerance: tol });
            let t0 = ReducedTransfer::new(&params.noiseless(), n)?;
            let obs = run_observables(ctx, n, params.q, &t0.t_red, cfg.depth().min(200))?;
            let drift = obs.iter().map(|o| (o.fidelity.clone() - &ctx.one::<T>()).abs().to_f64()).fold(0.0, f64::max);
            out.push(OracleCheck {
                name: "noiseless_fidelity_drift".into(),
                deviation: drift,
                tolerance: precision_tol(ctx, 1e-30),
            });
        }
        Geometry::Chain => {
            if n > ORACLE_LIMIT {
                return Err(Error::OracleLimit { limit: ORACLE_LIMIT, requested: n });
            }
            let mps = mps_config(ctx, cfg, false)?;
            let layers = cfg.depth.unwrap_or(20);
            let tol = precision_tol(ctx, 1e-12);
            out.push(OracleCheck {
                name: "mps_vs_dense".into(),
                deviation: chain_oracle_dev(&params, n, layers, &mps)?,
                tolerance: tol,
            });
            let mut worst = 0.0f64;
            for _ in 0..3 {
                worst = worst.max(chain_oracle_dev(&random_params::<T>(ctx, &mut rng), n, layers.min(8), &mps)?);
            }
            out.push(OracleCheck { name: "mps_vs_dense_random".into(), deviation: worst, tolerance: tol });
            let book = run_layers(ctx, &params.noiseless(), n, layers, mps)?;
            let drift = book
                .iter()
                .map(|r| (r.observables.fidelity.clone() - &ctx.one::<T>()).abs().to_f64())
                .fold(0.0, f64::max);
            out.push(OracleCheck { name: "noiseless_fidelity_drift".into(), deviation: drift, tolerance: tol });
        }
    }
    Ok(out)
}

pub fn oracle_table(checks: &[OracleCheck]) -> ResultTable {
    let mut t = ResultTable::new(&["check", "max_deviation", "tolerance", "status"]);
    for c in checks {
        t.push(vec![
            c.name.clone(),
            format!("{:e}", c.deviation),
            format!("{:e}", c.tolerance),
            if c.passed() { "PASS".into() } else { "FAIL".into() },
        ]);
    }
    t
}
