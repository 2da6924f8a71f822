//! Single-qudit channels and the noise parameters of the statistical model.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gates::{parse_real, read_complex_matrix};
use crate::numerics::{CMatrix, Complex, DenseMatrix, PrecisionContext, Real};

/// A CPTP map in Kraus form.
#[derive(Clone, Debug)]
pub struct KrausChannel<T> {
    q: u32,
    kraus_ops: Vec<CMatrix<T>>,
}

pub const COMPLETENESS_TOL: f64 = 1e-12;

impl<T: Real> KrausChannel<T> {
    pub fn new(kraus_ops: Vec<CMatrix<T>>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("a channel needs at least one Kraus operator".into()))?;
        let q = first.dim();
        if q < 2 {
            return Err(Error::InvalidParameter("qudit dimension must be at least 2".into()));
        }
        if kraus_ops.iter().any(|k| k.dim() != q) {
            return Err(Error::DimensionMismatch("Kraus operators of different sizes".into()));
        }
        let x = first.get(0, 0).re.clone();
        let mut sum = CMatrix::zeros_like(&x, q);
        for k in &kraus_ops {
            sum = sum.add(&k.adjoint().matmul(k));
        }
        let dev = sum.max_abs_diff(&CMatrix::identity_like(&x, q)).to_f64();
        if !(dev <= COMPLETENESS_TOL) {
            return Err(Error::IncompleteChannel { deviation: dev });
        }
        Ok(Self { q: q as u32, kraus_ops })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn kraus_ops(&self) -> &[CMatrix<T>] {
        &self.kraus_ops
    }

    fn zero(&self) -> T {
        self.kraus_ops[0].get(0, 0).re.zero_like()
    }

    /// `N(ρ) = Σ K ρ K†`
    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros_like(&self.zero(), rho.dim());
        for k in &self.kraus_ops {
            out = out.add(&k.matmul(rho).matmul(&k.adjoint()));
        }
        out
    }

    pub fn identity(ctx: &PrecisionContext, q: u32) -> Self {
        let x: T = ctx.zero();
        Self { q, kraus_ops: vec![CMatrix::identity_like(&x, q as usize)] }
    }

    /// `ρ → (1-p) ρ + p I/q`, built from the `q²` Weyl operators.
    pub fn depolarizing(ctx: &PrecisionContext, q: u32, p: &T) -> Result<Self> {
        let qq = (q * q) as f64;
        let max = qq / (qq - 1.0);
        if *p < ctx.zero::<T>() || *p > ctx.real::<T>(max) {
            return Err(Error::InvalidParameter(format!("depolarizing strength must lie in [0, {max}]")));
        }
        let n = q as usize;
        let x: T = ctx.zero();
        let q2: T = ctx.real(qq);
        let mut ops = Vec::with_capacity(n * n);
        let two_pi_over_q = ctx.pi::<T>() * ctx.real::<T>(2.0) / ctx.real::<T>(q as f64);
        for a in 0..n {
            for b in 0..n {
                let w = if a == 0 && b == 0 {
                    (ctx.one::<T>() - p.clone() * (q2.clone() - ctx.one::<T>()) / &q2).sqrt()
                } else {
                    (p.clone() / &q2).sqrt()
                };
                // X^a Z^b
                let mut m = CMatrix::zeros_like(&x, n);
                for col in 0..n {
                    let row = (col + a) % n;
                    let phase = Complex::cis(&(two_pi_over_q.clone() * ctx.real::<T>((b * col) as f64)));
                    m.set(row, col, phase.scale(&w));
                }
                ops.push(m);
            }
        }
        Self::new(ops)
    }

    /// `ρ → (1-p) ρ + p diag(ρ)`.
    pub fn dephasing(ctx: &PrecisionContext, q: u32, p: &T) -> Result<Self> {
        if *p < ctx.zero::<T>() || *p > ctx.one::<T>() {
            return Err(Error::InvalidParameter("dephasing strength must lie in [0, 1]".into()));
        }
        let n = q as usize;
        let x: T = ctx.zero();
        let mut ops = vec![CMatrix::identity_like(&x, n).scale(&Complex::real((ctx.one::<T>() - p).sqrt()))];
        for k in 0..n {
            let mut m = CMatrix::zeros_like(&x, n);
            m.set(k, k, Complex::real(p.sqrt()));
            ops.push(m);
        }
        Self::new(ops)
    }

    /// Qubit amplitude damping with decay probability `eta`.
    pub fn amplitude_damping(ctx: &PrecisionContext, eta: &T) -> Result<Self> {
        if *eta < ctx.zero::<T>() || *eta > ctx.one::<T>() {
            return Err(Error::InvalidParameter("damping probability must lie in [0, 1]".into()));
        }
        let x: T = ctx.zero();
        let mut k0 = CMatrix::zeros_like(&x, 2);
        k0.set(0, 0, Complex::one_like(&x));
        k0.set(1, 1, Complex::real((ctx.one::<T>() - eta).sqrt()));
        let mut k1 = CMatrix::zeros_like(&x, 2);
        k1.set(0, 1, Complex::real(eta.sqrt()));
        Self::new(vec![k0, k1])
    }
}

/// Channel summary and the derived update parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseStatParams<T> {
    pub q: u32,
    /// Average infidelity.
    pub r: T,
    /// Unitarity.
    pub u: T,
    /// Nonunitality.
    pub mu: T,
    pub y1: T,
    pub y2: T,
    pub gamma1: T,
    pub gamma2: T,
    pub delta2: T,
    pub epsilon: T,
}

impl<T: Real> NoiseStatParams<T> {
    pub fn is_unital(&self) -> bool {
        self.delta2.is_zero() || self.delta2.abs().to_f64() <= COMPLETENESS_TOL
    }
}

fn swap_operator<T: Real>(x: &T, q: usize) -> CMatrix<T> {
    let mut s = CMatrix::zeros_like(x, q * q);
    for i in 0..q {
        for j in 0..q {
            s.set(i * q + j, j * q + i, Complex::one_like(x));
        }
    }
    s
}

pub fn stat_params_from_kraus<T: Real>(ch: &KrausChannel<T>) -> NoiseStatParams<T> {
    let q = ch.q as usize;
    let x = ch.zero();
    let ctx = x.context();
    let swap = swap_operator(&x, q);
    let id = CMatrix::identity_like(&x, q);

    // One copy noisy: Σ_a (K_a ⊗ I) SWAP (K_a ⊗ I)†
    let mut n1 = CMatrix::zeros_like(&x, q * q);
    for k in ch.kraus_ops() {
        let kk = k.kron(&id);
        n1 = n1.add(&kk.matmul(&swap).matmul(&kk.adjoint()));
    }
    let y1 = n1.matmul(&swap).trace().re;

    // Both copies noisy: Σ_ab (K_a ⊗ K_b) SWAP (K_a ⊗ K_b)†
    let mut n2 = CMatrix::zeros_like(&x, q * q);
    for a in ch.kraus_ops() {
        for b in ch.kraus_ops() {
            let kk = a.kron(b);
            n2 = n2.add(&kk.matmul(&swap).matmul(&kk.adjoint()));
        }
    }
    let y2 = n2.matmul(&swap).trace().re;

    let qf: T = ctx.real(q as f64);
    let q2 = qf.clone() * &qf;
    let q2m1 = q2.clone() - ctx.one::<T>();
    let mixed = id.scale(&Complex::real(ctx.one::<T>() / &qf));
    let out = ch.apply(&mixed);
    let purity = out.matmul(&out).trace().re;
    let mu = q2.clone() * purity - &qf;

    let r = (q2.clone() - &y1) / (qf.clone() * (qf.clone() + ctx.one::<T>()));
    let u = (y2.clone() - ctx.one::<T>() + &mu) / &q2m1;
    let gamma1 = qf.clone() * &r / (qf.clone() - ctx.one::<T>());
    let gamma2 = ctx.one::<T>() - &u + mu.clone() / &q2m1;
    let delta2 = mu.clone() / (qf.clone() * &q2m1);
    let epsilon = (ctx.one::<T>() - ctx.one::<T>() / &q2) * &gamma1;
    NoiseStatParams { q: ch.q, r, u, mu, y1, y2, gamma1, gamma2, delta2, epsilon }
}

/// `Tr(N₁(I/q²) SWAP)`, which equals `1/q` for every channel.
pub fn identity_component_overlap<T: Real>(ch: &KrausChannel<T>) -> T {
    let q = ch.q as usize;
    let x = ch.zero();
    let ctx = x.context();
    let swap = swap_operator(&x, q);
    let id = CMatrix::identity_like(&x, q);
    let scale = Complex::real(ctx.one::<T>() / ctx.real::<T>((q * q) as f64));
    let mut n1 = CMatrix::zeros_like(&x, q * q);
    for k in ch.kraus_ops() {
        let kk = k.kron(&id);
        n1 = n1.add(&kk.matmul(&CMatrix::identity_like(&x, q * q)).matmul(&kk.adjoint()));
    }
    n1.scale(&scale).matmul(&swap).trace().re
}

/// `[[1, γ], [0, 1-γ]]` in the `{I/q², SWAP/q}` basis.
pub fn single_site_update<T: Real>(gamma: &T) -> DenseMatrix<T> {
    let one = gamma.one_like();
    let zero = gamma.zero_like();
    DenseMatrix::from_vec(2, 2, vec![one.clone(), gamma.clone(), zero, one - gamma]).expect("2x2")
}

pub fn one_copy_update<T: Real>(p: &NoiseStatParams<T>) -> DenseMatrix<T> {
    single_site_update(&p.gamma1)
}

/// `[[1-δ₂, γ₂], [δ₂, 1-γ₂]]`
pub fn two_copy_update<T: Real>(p: &NoiseStatParams<T>) -> DenseMatrix<T> {
    let one = p.gamma2.one_like();
    DenseMatrix::from_vec(
        2,
        2,
        vec![one.clone() - &p.delta2, p.gamma2.clone(), p.delta2.clone(), one - &p.gamma2],
    )
    .expect("2x2")
}

/// `γ = ε / (1 - q⁻²)`
pub fn gamma_from_epsilon<T: Real>(epsilon: &T, q: u32) -> Result<T> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("qudit dimension must be at least 2, got {q}")));
    }
    let q2 = epsilon.from_f64_like((q as f64) * (q as f64));
    let factor = epsilon.one_like() - epsilon.one_like() / q2;
    if *epsilon < epsilon.zero_like() || *epsilon > factor {
        return Err(Error::InvalidParameter(format!(
            "error rate {} outside [0, 1 - q^-2]",
            epsilon.to_f64()
        )));
    }
    Ok(epsilon.clone() / factor)
}

/// Channel description accepted on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSpec {
    Ident,
    Depol(String),
    Dephase(String),
    AmpDamp(String),
    Kraus(String),
}

impl ChannelSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        Ok(match (head, rest) {
            ("ident", "") => ChannelSpec::Ident,
            ("depol", p) if !p.is_empty() => ChannelSpec::Depol(p.into()),
            ("dephase", p) if !p.is_empty() => ChannelSpec::Dephase(p.into()),
            ("ampdamp", p) if !p.is_empty() => ChannelSpec::AmpDamp(p.into()),
            ("kraus", f) if !f.is_empty() => ChannelSpec::Kraus(f.into()),
            (h, _) if h.starts_with("leak") => {
                return Err(Error::OutOfScope("leakage channels are not supported".into()))
            }
            _ => return Err(Error::Parse(format!("unrecognised noise spec '{s}'"))),
        })
    }

    pub fn build<T: Real>(&self, ctx: &PrecisionContext, q: u32) -> Result<KrausChannel<T>> {
        match self {
            ChannelSpec::Ident => Ok(KrausChannel::identity(ctx, q)),
            ChannelSpec::Depol(p) => KrausChannel::depolarizing(ctx, q, &parse_real(ctx, p)?),
            ChannelSpec::Dephase(p) => KrausChannel::dephasing(ctx, q, &parse_real(ctx, p)?),
            ChannelSpec::AmpDamp(e) => {
                if q != 2 {
                    return Err(Error::InvalidParameter("amplitude damping is defined for qubits".into()));
                }
                KrausChannel::amplitude_damping(ctx, &parse_real(ctx, e)?)
            }
            ChannelSpec::Kraus(path) => {
                let ch = read_kraus(ctx, Path::new(path))?;
                if ch.q() != q {
                    return Err(Error::DimensionMismatch(format!(
                        "Kraus file has qudit dimension {}, run uses {q}",
                        ch.q()
                    )));
                }
                Ok(ch)
            }
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Ident => f.write_str("ident"),
            ChannelSpec::Depol(p) => write!(f, "depol:{p}"),
            ChannelSpec::Dephase(p) => write!(f, "dephase:{p}"),
            ChannelSpec::AmpDamp(e) => write!(f, "ampdamp:{e}"),
            ChannelSpec::Kraus(p) => write!(f, "kraus:{p}"),
        }
    }
}

/// Kraus operators as blank-line separated blocks of `q²` lines `re im`.
pub fn parse_kraus<T: Real>(ctx: &PrecisionContext, text: &str) -> Result<KrausChannel<T>> {
    let mut ops = Vec::new();
    for block in text.split("\n\n").map(str::trim).filter(|b| !b.is_empty()) {
        ops.push(read_complex_matrix::<T>(ctx, block)?);
    }
    KrausChannel::new(ops)
}

pub fn read_kraus<T: Real>(ctx: &PrecisionContext, path: &Path) -> Result<KrausChannel<T>> {
    parse_kraus(ctx, &std::fs::read_to_string(path)?)
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
    fn identity_channel() {
        let c = ctx();
        let p = stat_params_from_kraus(&KrausChannel::<BigFloat>::identity(&c, 2));
        assert!(close(&p.r, 0.0, 1e-70) && close(&p.u, 1.0, 1e-70) && close(&p.mu, 0.0, 1e-70));
        assert!(close(&p.gamma1, 0.0, 1e-70) && close(&p.gamma2, 0.0, 1e-70) && close(&p.delta2, 0.0, 1e-70));
        let m = two_copy_update(&p);
        assert!(m.max_abs_diff(&DenseMatrix::identity(&c, 2)).unwrap().to_f64() < 1e-70);
    }

    #[test]
    fn depolarizing_qubit() {
        let c = ctx();
        let pr: BigFloat = c.real(0.01);
        let ch = KrausChannel::depolarizing(&c, 2, &pr).unwrap();
        // Independent closed form: Y1 = Σ|Tr K|², Y2 = Σ|Tr(K_a K_b†)|².
        let mut y1 = 0.0;
        let mut y2 = 0.0;
        for a in ch.kraus_ops() {
            y1 += a.trace().norm_sqr().to_f64();
            for b in ch.kraus_ops() {
                y2 += a.matmul(&b.adjoint()).trace().norm_sqr().to_f64();
            }
        }
        let p = stat_params_from_kraus(&ch);
        assert!(close(&p.y1, 4.0 - 3.0 * 0.01, 1e-15) && close(&p.y1, y1, 1e-14));
        assert!(close(&p.y2, y2, 1e-14));
        assert!(close(&p.r, 0.005, 1e-15) && close(&p.gamma1, 0.01, 1e-15));
        assert!(close(&p.epsilon, 0.0075, 1e-15));
        assert!(close(&p.mu, 0.0, 1e-60));
        let m = one_copy_update(&p);
        assert!(close(&m[(0, 1)], 0.01, 1e-15) && close(&m[(1, 1)], 0.99, 1e-15));
    }

    #[test]
    fn amplitude_damping_nonunitality() {
        let c = ctx();
        let ch = KrausChannel::amplitude_damping(&c, &c.real::<BigFloat>(0.1)).unwrap();
        let p = stat_params_from_kraus(&ch);
        assert!(close(&p.mu, 0.02, 1e-15));
        assert!(close(&p.delta2, 0.02 / 6.0, 1e-15));
        assert!(!p.is_unital());
        let m = two_copy_update(&p);
        assert!(close(&m[(1, 0)], 0.02 / 6.0, 1e-15));
    }

    #[test]
    fn identity_component_is_trivial() {
        let c = ctx();
        for ch in [
            KrausChannel::amplitude_damping(&c, &c.real::<BigFloat>(0.3)).unwrap(),
            KrausChannel::depolarizing(&c, 2, &c.real::<BigFloat>(0.2)).unwrap(),
        ] {
            assert!(close(&identity_component_overlap(&ch), 0.5, 1e-60));
        }
    }

    #[test]
    fn gamma_conversion() {
        assert_eq!(gamma_from_epsilon(&0.0f64, 2).unwrap(), 0.0);
        assert!((gamma_from_epsilon(&0.03f64, 2).unwrap() - 0.04).abs() < 1e-15);
        assert!((gamma_from_epsilon(&0.75f64, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(gamma_from_epsilon(&0.8f64, 2).is_err());
        assert!(gamma_from_epsilon(&-0.1f64, 2).is_err());
    }

    #[test]
    fn rejects_incomplete_channel() {
        let k = CMatrix::identity_like(&0.0f64, 2).scale(&Complex::real(0.9));
        assert!(matches!(KrausChannel::new(vec![k]), Err(Error::IncompleteChannel { .. })));
    }

    #[test]
    fn spec_strings() {
        assert_eq!(ChannelSpec::parse("depol:0.01").unwrap(), ChannelSpec::Depol("0.01".into()));
        assert!(matches!(ChannelSpec::parse("leakage:0.1"), Err(Error::OutOfScope(_))));
        assert!(ChannelSpec::parse("bitflip").is_err());
    }

    #[test]
    fn dephasing_is_unital_and_qutrit_depolarizing_works() {
        let c = ctx();
        let p = stat_params_from_kraus(&KrausChannel::dephasing(&c, 2, &c.real::<BigFloat>(0.2)).unwrap());
        assert!(close(&p.mu, 0.0, 1e-60));
        let ch = KrausChannel::depolarizing(&c, 3, &c.real::<BigFloat>(0.3)).unwrap();
        let p = stat_params_from_kraus(&ch);
        // r = p (q-1)/q for depolarizing, so γ₁ = p.
        assert!(close(&p.gamma1, 0.3, 1e-15));
        assert!(close(&p.mu, 0.0, 1e-50));
    }

    #[test]
    fn kraus_text_roundtrip() {
        let c = ctx();
        let s = (0.9f64).sqrt();
        let t = (0.1f64).sqrt();
        let text = format!("{s} 0\n0 0\n0 0\n{s} 0\n\n0 0\n{t} 0\n{t} 0\n0 0\n");
        let ch = parse_kraus::<BigFloat>(&c, &text).unwrap();
        assert_eq!(ch.q(), 2);
        assert_eq!(ch.kraus_ops().len(), 2);
    }
}
