//! Two-qubit gate invariants and the gate parameters (α, β) of the
//! statistical model.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, Complex, PrecisionContext, Real};

/// `exp(-i/2 (c1 XX + c2 YY + c3 ZZ))` up to single-qubit dressing.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalGate<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
}

/// Makhlin local invariants, `|G1|` and the real `G2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateInvariants<T> {
    pub abs_g1: T,
    pub g2: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateStatParams<T> {
    pub alpha: T,
    pub beta: T,
    pub q: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaoBasisParams<T> {
    pub d: T,
    pub r: T,
    pub eta: T,
}

/// The three inequalities bounding single-gate parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `β ≥ -α/5`
    SwapFloor,
    /// `β ≤ 1 - 4α/5`
    SwapCeiling,
    /// `β + α/5 ≤ (β + α/2)²`
    Quadratic,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::SwapFloor => "beta>=-alpha/5",
            Constraint::SwapCeiling => "beta<=1-4alpha/5",
            Constraint::Quadratic => "beta+alpha/5<=(beta+alpha/2)^2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    OnBoundary(Vec<Constraint>),
    Outside(Vec<Constraint>),
}

impl Region {
    pub fn is_allowed(&self) -> bool {
        !matches!(self, Region::Outside(_))
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |cs: &[Constraint]| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
        match self {
            Region::Interior => f.write_str("interior"),
            Region::OnBoundary(cs) => write!(f, "on_boundary({})", join(cs)),
            Region::Outside(cs) => write!(f, "outside({})", join(cs)),
        }
    }
}

pub const REGION_TOL: f64 = 1e-12;

pub fn invariants_from_canonical<T: Real>(g: &CanonicalGate<T>) -> GateInvariants<T> {
    let two = g.c1.from_f64_like(2.0);
    let x = (g.c1.clone() * &two).cos();
    let y = (g.c2.clone() * &two).cos();
    let z = (g.c3.clone() * &two).cos();
    let mut pairs = x.clone() * &y;
    pairs.add_mul(&y, &z);
    pairs.add_mul(&z, &x);
    let quarter = x.from_f64_like(0.25);
    let abs_g1 = (x.one_like() + pairs) * &quarter;
    GateInvariants { abs_g1, g2: x + y + z }
}

fn magic_basis<T: Real>(ctx: &PrecisionContext) -> CMatrix<T> {
    let h: T = ctx.one::<T>() / ctx.real::<T>(2.0).sqrt();
    let c = |re: f64, im: f64| Complex::new(h.clone() * ctx.real::<T>(re), h.clone() * ctx.real::<T>(im));
    CMatrix::from_vec(
        4,
        vec![
            c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0),
            c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.0),
            c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0),
        ],
    )
    .expect("4x4")
}

/// Deviation `max |U†U - I|`.
pub fn unitarity_deviation<T: Real>(u: &CMatrix<T>) -> T {
    let x = u.get(0, 0).re.clone();
    u.adjoint().matmul(u).max_abs_diff(&CMatrix::identity_like(&x, u.dim()))
}

/// Makhlin invariants of an arbitrary 4x4 unitary via the magic basis.
pub fn invariants_from_unitary<T: Real>(u: &CMatrix<T>) -> Result<GateInvariants<T>> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("two-qubit gate must be 4x4, got {0}x{0}", u.dim())));
    }
    let dev = unitarity_deviation(u).to_f64();
    if !(dev <= 1e-12) {
        return Err(Error::NonUnitary { deviation: dev });
    }
    let ctx = u.get(0, 0).re.context();
    let q = magic_basis::<T>(&ctx);
    let ub = q.adjoint().matmul(u).matmul(&q);
    let m = ub.transpose().matmul(&ub);
    let det = u.det();
    let tr = m.trace();
    let tr2 = tr.clone() * tr.clone();
    let trm2 = m.matmul(&m).trace();
    let g1 = tr2.div(&det.scale(&ctx.real(16.0)));
    let g2 = (tr2 - trm2).div(&det.scale(&ctx.real(4.0)));
    Ok(GateInvariants { abs_g1: g1.abs(), g2: g2.re })
}

impl<T: Real> GateStatParams<T> {
    /// Haar-random two-qudit gates, valid for every `q`.
    pub fn haar(ctx: &PrecisionContext, q: u32) -> Self {
        Self { alpha: ctx.one(), beta: ctx.zero(), q }
    }

    pub fn new(alpha: T, beta: T, q: u32) -> Self {
        Self { alpha, beta, q }
    }
}

pub fn stat_params_from_invariants<T: Real>(inv: &GateInvariants<T>) -> GateStatParams<T> {
    let ctx = inv.abs_g1.context();
    let one: T = ctx.one();
    let alpha = (one - &inv.abs_g1) * ctx.ratio::<T>(10, 9);
    let mut beta = ctx.ratio::<T>(-1, 18) - inv.g2.clone() / ctx.real::<T>(6.0);
    beta.add_mul(&ctx.ratio(5, 9), &inv.abs_g1);
    GateStatParams { alpha, beta, q: 2 }
}

pub fn fsim_params<T: Real>(theta: &T, phi: &T) -> GateStatParams<T> {
    let ctx = theta.context();
    let c2 = (theta.clone() * ctx.real::<T>(2.0)).cos();
    let c4 = (theta.clone() * ctx.real::<T>(4.0)).cos();
    let cp = phi.cos();
    let c2cp = c2.clone() * &cp;
    let alpha = (ctx.real::<T>(5.0) - &c4 - c2cp.clone() * ctx.real::<T>(4.0)) * ctx.ratio::<T>(5, 36);
    let beta = (ctx.real::<T>(11.0) + c4 * ctx.real::<T>(5.0) - c2 * ctx.real::<T>(24.0)
        + c2cp * ctx.real::<T>(20.0)
        - cp * ctx.real::<T>(12.0))
        / ctx.real::<T>(72.0);
    GateStatParams { alpha, beta, q: 2 }
}

pub fn pe_params<T: Real>(phi: &T) -> GateStatParams<T> {
    let ctx = phi.context();
    let c4 = (phi.clone() * ctx.real::<T>(4.0)).cos();
    GateStatParams {
        alpha: ctx.ratio(10, 9),
        beta: (c4 * ctx.real::<T>(3.0) - ctx.one::<T>()) / ctx.real::<T>(18.0),
        q: 2,
    }
}

/// Canonical angles of `PE(φ)`.
pub fn pe_canonical<T: Real>(phi: &T) -> CanonicalGate<T> {
    let ctx = phi.context();
    let half_pi = ctx.pi::<T>() / ctx.real::<T>(2.0);
    CanonicalGate {
        c1: half_pi.clone(),
        c2: phi.clone() * ctx.real::<T>(2.0) - &half_pi,
        c3: ctx.zero(),
    }
}

/// Composition with a SWAP: `β → 1 - α - β`.
pub fn swap_compose<T: Real>(p: &GateStatParams<T>) -> GateStatParams<T> {
    GateStatParams {
        alpha: p.alpha.clone(),
        beta: p.alpha.one_like() - &p.alpha - &p.beta,
        q: p.q,
    }
}

/// Entangling power `2(1 - |G1|)/9`.
pub fn entangling_power<T: Real>(inv: &GateInvariants<T>) -> T {
    (inv.abs_g1.one_like() - &inv.abs_g1) * inv.abs_g1.from_f64_like(2.0) / inv.abs_g1.from_f64_like(9.0)
}

/// Classify against the single-gate region with tolerance [`REGION_TOL`].
pub fn region_check<T: Real>(p: &GateStatParams<T>) -> Region {
    let one = p.alpha.one_like();
    let five = p.alpha.from_f64_like(5.0);
    let tol = p.alpha.from_f64_like(REGION_TOL);
    // Each slack is >= 0 inside.
    let floor = p.beta.clone() + p.alpha.clone() / &five;
    let ceiling = one - p.alpha.clone() * p.alpha.from_f64_like(4.0) / &five - &p.beta;
    let half = p.beta.clone() + p.alpha.clone() / p.alpha.from_f64_like(2.0);
    let quad = half.clone() * &half - &floor;
    let mut on = Vec::new();
    let mut out = Vec::new();
    for (slack, c) in [
        (floor, Constraint::SwapFloor),
        (ceiling, Constraint::SwapCeiling),
        (quad, Constraint::Quadratic),
    ] {
        if slack < -tol.clone() {
            out.push(c);
        } else if slack.abs() <= tol {
            on.push(c);
        }
    }
    if !out.is_empty() {
        Region::Outside(out)
    } else if !on.is_empty() {
        Region::OnBoundary(on)
    } else {
        Region::Interior
    }
}

pub fn gao_basis<T: Real>(p: &GateStatParams<T>) -> GaoBasisParams<T> {
    let ctx = p.alpha.context();
    let q2: T = ctx.real((p.q as f64) * (p.q as f64));
    let denom = q2.clone() + ctx.one::<T>();
    let d = p.alpha.clone() * &q2 / &denom + &p.beta;
    let eta = q2 - ctx.one::<T>();
    let r = p.alpha.clone() * &eta / denom;
    GaoBasisParams { d, r, eta }
}

/// A single fixed gate whose statistical parameters equal the Haar
/// average, `(α, β) = (1, 0)`.
pub fn haar_lookalike_gate<T: Real>(ctx: &PrecisionContext) -> CanonicalGate<T> {
    let pi: T = ctx.pi();
    let c2 = -(ctx.ratio::<T>(2, 3).sqrt().atan()) / ctx.real::<T>(2.0);
    CanonicalGate {
        c1: pi.clone() / ctx.real::<T>(4.0),
        c3: pi / ctx.real::<T>(2.0) + &c2,
        c2,
    }
}

// Named unitaries.

fn cmat<T: Real>(ctx: &PrecisionContext, entries: [(f64, f64); 16]) -> CMatrix<T> {
    CMatrix::from_vec(4, entries.iter().map(|&(r, i)| Complex::new(ctx.real(r), ctx.real(i))).collect())
        .expect("4x4")
}

pub fn cnot_unitary<T: Real>(ctx: &PrecisionContext) -> CMatrix<T> {
    let (o, l) = ((0.0, 0.0), (1.0, 0.0));
    cmat(ctx, [l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o])
}

pub fn swap_unitary<T: Real>(ctx: &PrecisionContext) -> CMatrix<T> {
    let (o, l) = ((0.0, 0.0), (1.0, 0.0));
    cmat(ctx, [l, o, o, o, o, o, l, o, o, l, o, o, o, o, o, l])
}

pub fn iswap_unitary<T: Real>(ctx: &PrecisionContext) -> CMatrix<T> {
    let (o, l, i) = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0));
    cmat(ctx, [l, o, o, o, o, o, i, o, o, i, o, o, o, o, o, l])
}

pub fn fsim_unitary<T: Real>(theta: &T, phi: &T) -> CMatrix<T> {
    let z = theta.zero_like();
    let c = Complex::real(theta.cos());
    let s = Complex::new(z.clone(), -theta.sin());
    let o = Complex::zero_like(&z);
    let one = Complex::one_like(&z);
    let e = Complex::cis(&-phi.clone());
    CMatrix::from_vec(
        4,
        vec![
            one, o.clone(), o.clone(), o.clone(),
            o.clone(), c.clone(), s.clone(), o.clone(),
            o.clone(), s, c, o.clone(),
            o.clone(), o.clone(), o, e,
        ],
    )
    .expect("4x4")
}

fn pauli_exp<T: Real>(theta: &T, pauli: usize) -> CMatrix<T> {
    // exp(-iθ/2 P⊗P) = cos(θ/2) I - i sin(θ/2) P⊗P
    let half = theta.clone() / theta.from_f64_like(2.0);
    let (c, s) = (half.cos(), half.sin());
    let z = theta.zero_like();
    let p = pauli_pair(&z, pauli);
    let mut out = CMatrix::identity_like(&z, 4).scale(&Complex::real(c));
    out = out.add(&p.scale(&Complex::new(z, -s)));
    out
}

fn pauli_pair<T: Real>(z: &T, which: usize) -> CMatrix<T> {
    let o = Complex::zero_like(z);
    let one = Complex::one_like(z);
    let i = Complex::new(z.zero_like(), z.one_like());
    let p = match which {
        0 => vec![o.clone(), one.clone(), one, o],
        1 => vec![o.clone(), -i.clone(), i, o],
        _ => vec![one.clone(), o.clone(), o, -one],
    };
    let p = CMatrix::from_vec(2, p).expect("2x2");
    p.kron(&p)
}

pub fn canonical_unitary<T: Real>(g: &CanonicalGate<T>) -> CMatrix<T> {
    pauli_exp(&g.c1, 0).matmul(&pauli_exp(&g.c2, 1)).matmul(&pauli_exp(&g.c3, 2))
}

/// Gate description accepted on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum GateSpec {
    Haar,
    Cnot,
    Swap,
    Iswap,
    Cz,
    Fsim(String, String),
    Pe(String),
    Canonical(String, String, String),
    Params(String, String),
    File(String),
}

impl GateSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("unrecognised gate spec '{s}'"));
        Ok(match parts.as_slice() {
            ["haar"] => GateSpec::Haar,
            ["cnot"] => GateSpec::Cnot,
            ["swap"] => GateSpec::Swap,
            ["iswap"] => GateSpec::Iswap,
            ["cz"] => GateSpec::Cz,
            ["fsim", t, p] => GateSpec::Fsim(t.to_string(), p.to_string()),
            ["pe", p] => GateSpec::Pe(p.to_string()),
            ["canonical", a, b, c] => GateSpec::Canonical(a.to_string(), b.to_string(), c.to_string()),
            ["params", a, b] => GateSpec::Params(a.to_string(), b.to_string()),
            ["file", rest @ ..] if !rest.is_empty() => GateSpec::File(rest.join(":")),
            _ if Path::new(s).is_file() => GateSpec::File(s.to_string()),
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSpec::Haar => f.write_str("haar"),
            GateSpec::Cnot => f.write_str("cnot"),
            GateSpec::Swap => f.write_str("swap"),
            GateSpec::Iswap => f.write_str("iswap"),
            GateSpec::Cz => f.write_str("cz"),
            GateSpec::Fsim(t, p) => write!(f, "fsim:{t}:{p}"),
            GateSpec::Pe(p) => write!(f, "pe:{p}"),
            GateSpec::Canonical(a, b, c) => write!(f, "canonical:{a}:{b}:{c}"),
            GateSpec::Params(a, b) => write!(f, "params:{a}:{b}"),
            GateSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

/// Everything known about a resolved gate.
#[derive(Clone, Debug)]
pub struct GateInfo<T> {
    pub canonical: Option<CanonicalGate<T>>,
    pub invariants: Option<GateInvariants<T>>,
    pub params: GateStatParams<T>,
}

impl<T: Real> GateInfo<T> {
    pub fn gao(&self) -> GaoBasisParams<T> {
        gao_basis(&self.params)
    }

    pub fn region(&self) -> Region {
        region_check(&self.params)
    }
}

pub(crate) fn parse_real<T: Real>(ctx: &PrecisionContext, s: &str) -> Result<T> {
    let v = T::parse(ctx, s).ok_or_else(|| Error::Parse(format!("not a number: '{s}'")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("not a finite number: '{s}'")));
    }
    Ok(v)
}

/// Resolve a gate spec at qudit dimension `q`. Only Haar gates are defined
/// for `q != 2`.
pub fn resolve_gate<T: Real>(ctx: &PrecisionContext, spec: &GateSpec, q: u32) -> Result<GateInfo<T>> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("qudit dimension must be at least 2, got {q}")));
    }
    if q != 2 && !matches!(spec, GateSpec::Haar | GateSpec::Params(..)) {
        return Err(Error::InvalidParameter(format!("gate '{spec}' is only defined for qubits")));
    }
    let from_canon = |c: CanonicalGate<T>| {
        let inv = invariants_from_canonical(&c);
        let params = stat_params_from_invariants(&inv);
        GateInfo { canonical: Some(c), invariants: Some(inv), params }
    };
    let half_pi = || ctx.pi::<T>() / ctx.real::<T>(2.0);
    Ok(match spec {
        GateSpec::Haar => GateInfo { canonical: None, invariants: None, params: GateStatParams::haar(ctx, q) },
        GateSpec::Cnot => from_canon(CanonicalGate { c1: half_pi(), c2: ctx.zero(), c3: ctx.zero() }),
        GateSpec::Swap => from_canon(CanonicalGate { c1: half_pi(), c2: half_pi(), c3: half_pi() }),
        GateSpec::Iswap => from_canon(CanonicalGate { c1: half_pi(), c2: half_pi(), c3: ctx.zero() }),
        GateSpec::Cz => {
            let (t, p) = (ctx.zero::<T>(), ctx.pi::<T>());
            let inv = invariants_from_unitary(&fsim_unitary(&t, &p))?;
            GateInfo { canonical: None, invariants: Some(inv), params: fsim_params(&t, &p) }
        }
        GateSpec::Fsim(t, p) => {
            let (t, p) = (parse_real::<T>(ctx, t)?, parse_real::<T>(ctx, p)?);
            let inv = invariants_from_unitary(&fsim_unitary(&t, &p))?;
            GateInfo { canonical: None, invariants: Some(inv), params: fsim_params(&t, &p) }
        }
        GateSpec::Pe(p) => {
            let p = parse_real::<T>(ctx, p)?;
            let c = pe_canonical(&p);
            let inv = invariants_from_canonical(&c);
            GateInfo { canonical: Some(c), invariants: Some(inv), params: pe_params(&p) }
        }
        GateSpec::Canonical(a, b, c) => from_canon(CanonicalGate {
            c1: parse_real(ctx, a)?,
            c2: parse_real(ctx, b)?,
            c3: parse_real(ctx, c)?,
        }),
        GateSpec::Params(a, b) => GateInfo {
            canonical: None,
            invariants: None,
            params: GateStatParams { alpha: parse_real(ctx, a)?, beta: parse_real(ctx, b)?, q },
        },
        GateSpec::File(path) => {
            let u = read_unitary::<T>(ctx, Path::new(path))?;
            let inv = invariants_from_unitary(&u)?;
            let params = stat_params_from_invariants(&inv);
            GateInfo { canonical: None, invariants: Some(inv), params }
        }
    })
}

/// Reads `n*n` lines of `re im` into a complex matrix, inferring `n`.
pub fn read_complex_matrix<T: Real>(ctx: &PrecisionContext, text: &str) -> Result<CMatrix<T>> {
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (re, im) = match (it.next(), it.next(), it.next()) {
            (Some(r), Some(i), None) => (r, i),
            (Some(r), None, None) => (r, "0"),
            _ => return Err(Error::Parse(format!("expected 're im', got '{line}'"))),
        };
        entries.push(Complex::new(parse_real(ctx, re)?, parse_real(ctx, im)?));
    }
    let n = (entries.len() as f64).sqrt().round() as usize;
    CMatrix::from_vec(n, entries)
        .filter(|m| m.dim() * m.dim() > 0)
        .ok_or_else(|| Error::Parse("entry count is not a perfect square".into()))
}

pub fn read_unitary<T: Real>(ctx: &PrecisionContext, path: &Path) -> Result<CMatrix<T>> {
    let text = std::fs::read_to_string(path)?;
    let u = read_complex_matrix(ctx, &text)?;
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("gate file holds a {0}x{0} matrix, need 4x4", u.dim())));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::BigFloat;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn close(a: &BigFloat, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn table_invariants_from_canonical() {
        let c = ctx();
        let hp = c.pi::<BigFloat>() / c.real::<BigFloat>(2.0);
        let z: BigFloat = c.zero();
        let cnot = invariants_from_canonical(&CanonicalGate { c1: hp.clone(), c2: z.clone(), c3: z.clone() });
        assert!(close(&cnot.abs_g1, 0.0, 1e-60) && close(&cnot.g2, 1.0, 1e-60));
        let swap = invariants_from_canonical(&CanonicalGate { c1: hp.clone(), c2: hp.clone(), c3: hp });
        assert!(close(&swap.abs_g1, 1.0, 1e-60) && close(&swap.g2, -3.0, 1e-60));
        let id = invariants_from_canonical(&CanonicalGate { c1: z.clone(), c2: z.clone(), c3: z });
        assert!(close(&id.abs_g1, 1.0, 1e-60) && close(&id.g2, 3.0, 1e-60));
    }

    #[test]
    fn unitary_invariants() {
        let c = ctx();
        let cnot = invariants_from_unitary(&cnot_unitary::<BigFloat>(&c)).unwrap();
        assert!(close(&cnot.abs_g1, 0.0, 1e-60) && close(&cnot.g2, 1.0, 1e-60));
        let isw = invariants_from_unitary(&iswap_unitary::<BigFloat>(&c)).unwrap();
        assert!(close(&isw.abs_g1, 0.0, 1e-60) && close(&isw.g2, -1.0, 1e-60));
    }

    #[test]
    fn rejects_nonunitary() {
        let c = PrecisionContext::double();
        let mut u = cnot_unitary::<f64>(&c);
        u.set(0, 0, Complex::new(1.1, 0.0));
        assert!(matches!(invariants_from_unitary(&u), Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn table_stat_params() {
        let c = ctx();
        let p = stat_params_from_invariants(&GateInvariants { abs_g1: c.zero::<BigFloat>(), g2: c.one() });
        assert!(close(&p.alpha, 10.0 / 9.0, 1e-60) && close(&p.beta, -2.0 / 9.0, 1e-60));
        let p = stat_params_from_invariants(&GateInvariants { abs_g1: c.zero::<BigFloat>(), g2: c.real(-1.0) });
        assert!(close(&p.alpha, 10.0 / 9.0, 1e-60) && close(&p.beta, 1.0 / 9.0, 1e-60));
    }

    #[test]
    fn fsim_rows() {
        let c = ctx();
        let phi: BigFloat = c.real(0.7);
        let hp = c.pi::<BigFloat>() / c.real::<BigFloat>(2.0);
        let cp = 0.7f64.cos();
        let p = fsim_params(&hp, &phi);
        assert!(close(&p.alpha, 5.0 * (1.0 + cp) / 9.0, 1e-15));
        assert!(close(&p.beta, (5.0 - 4.0 * cp) / 9.0, 1e-15));
        let p = fsim_params(&c.zero(), &phi);
        assert!(close(&p.alpha, 5.0 * (1.0 - cp) / 9.0, 1e-15));
        assert!(close(&p.beta, -(1.0 - cp) / 9.0, 1e-15));
        // Sycamore-like point.
        let p = fsim_params(&hp, &(c.pi::<BigFloat>() / c.real::<BigFloat>(6.0)));
        let r3 = 3f64.sqrt() / 2.0;
        assert!(close(&p.alpha, 5.0 * (1.0 + r3) / 9.0, 1e-15));
        assert!(close(&p.beta, (5.0 - 4.0 * r3) / 9.0, 1e-15));
        assert!(close(&p.alpha, 1.0366808, 1e-7) && close(&p.beta, 0.1706554, 1e-7));
    }

    #[test]
    fn pe_rows() {
        let c = ctx();
        let p = pe_params(&c.zero::<BigFloat>());
        assert!(close(&p.alpha, 10.0 / 9.0, 1e-60) && close(&p.beta, 1.0 / 9.0, 1e-60));
        let quarter_pi = c.pi::<BigFloat>() / c.real::<BigFloat>(4.0);
        assert!(close(&pe_params(&quarter_pi).beta, -2.0 / 9.0, 1e-60));
        for phi in [0.1, 0.5, 1.3] {
            let inv = invariants_from_canonical(&pe_canonical(&c.real::<BigFloat>(phi)));
            assert!(close(&inv.abs_g1, 0.0, 1e-60));
            assert!(close(&inv.g2, -(4.0 * phi).cos(), 1e-15));
        }
    }

    #[test]
    fn swap_composition() {
        let c = ctx();
        let haar = GateStatParams::<BigFloat>::haar(&c, 2);
        assert_eq!(swap_compose(&haar), haar);
        let id = GateStatParams::new(c.zero::<BigFloat>(), c.zero(), 2);
        let sw = swap_compose(&id);
        assert!(close(&sw.beta, 1.0, 0.0));
        let cp = 0.4f64.cos();
        let p = swap_compose(&fsim_params(&c.zero::<BigFloat>(), &c.real(0.4)));
        assert!(close(&p.beta, (5.0 + 4.0 * cp) / 9.0, 1e-15));
    }

    #[test]
    fn regions() {
        let c = ctx();
        let isw = GateStatParams::new(c.ratio::<BigFloat>(10, 9), c.ratio(1, 9), 2);
        assert_eq!(region_check(&isw), Region::OnBoundary(vec![Constraint::SwapCeiling]));
        let f0 = fsim_params(&c.zero::<BigFloat>(), &c.real(1.1));
        assert!(matches!(region_check(&f0), Region::OnBoundary(ref v) if v.contains(&Constraint::SwapFloor)));
        let bad = GateStatParams::new(c.one::<BigFloat>(), c.real(0.5), 2);
        assert!(matches!(region_check(&bad), Region::Outside(ref v) if v.contains(&Constraint::SwapCeiling)));
        assert_eq!(region_check(&GateStatParams::<BigFloat>::haar(&c, 2)), Region::Interior);
    }

    #[test]
    fn gao_rows() {
        let c = ctx();
        let g = gao_basis(&GateStatParams::<BigFloat>::haar(&c, 2));
        assert!(close(&g.r, 0.6, 1e-60) && close(&g.d, 0.8, 1e-60) && close(&g.eta, 3.0, 0.0));
        let g = gao_basis(&GateStatParams::new(c.zero::<BigFloat>(), c.one(), 2));
        assert!(close(&g.r, 0.0, 0.0) && close(&g.d, 1.0, 0.0));
        let g = gao_basis(&GateStatParams::new(c.ratio::<BigFloat>(10, 9), c.ratio(-2, 9), 2));
        assert!(close(&g.r, 2.0 / 3.0, 1e-60) && close(&g.d, 2.0 / 3.0, 1e-60));
    }

    #[test]
    fn haar_lookalike() {
        let c = ctx();
        let g = haar_lookalike_gate::<BigFloat>(&c);
        let inv = invariants_from_canonical(&g);
        assert!(close(&inv.abs_g1, 0.1, 1e-60));
        let p = stat_params_from_invariants(&inv);
        assert!(close(&p.alpha, 1.0, 1e-60) && close(&p.beta, 0.0, 1e-60));
        assert_eq!(region_check(&p), Region::Interior);
        let via_u = invariants_from_unitary(&canonical_unitary(&g)).unwrap();
        assert!(close(&via_u.abs_g1, 0.1, 1e-60));
    }

    #[test]
    fn spec_parsing_and_resolution() {
        let c = ctx();
        assert_eq!(GateSpec::parse("fsim:1.5:0.5").unwrap(), GateSpec::Fsim("1.5".into(), "0.5".into()));
        assert!(GateSpec::parse("toffoli").is_err());
        let cz = resolve_gate::<BigFloat>(&c, &GateSpec::Cz, 2).unwrap();
        assert!(close(&cz.params.alpha, 10.0 / 9.0, 1e-60) && close(&cz.params.beta, -2.0 / 9.0, 1e-60));
        let inv = cz.invariants.unwrap();
        assert!(close(&inv.abs_g1, 0.0, 1e-60) && close(&inv.g2, 1.0, 1e-60));
        assert!(resolve_gate::<BigFloat>(&c, &GateSpec::Cnot, 3).is_err());
        assert!(resolve_gate::<BigFloat>(&c, &GateSpec::Haar, 3).is_ok());
    }

    #[test]
    fn unitary_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("iswap.txt");
        let text = "1 0\n0 0\n0 0\n0 0\n0 0\n0 0\n0 1\n0 0\n0 0\n0 1\n0 0\n0 0\n0 0\n0 0\n0 0\n1 0\n";
        std::fs::write(&path, text).unwrap();
        let c = ctx();
        let info = resolve_gate::<BigFloat>(&c, &GateSpec::parse(path.to_str().unwrap()).unwrap(), 2).unwrap();
        assert!(close(&info.params.beta, 1.0 / 9.0, 1e-60));
    }
}
