//! Leading eigenpairs of a transfer matrix and the coupling constants of
//! the observables to each eigenvector.
//!
//! Couplings use biorthogonal left eigenvectors: with `⟨w_a|v_b⟩ = δ_ab`
//! an observable evolves as `O(d) = Σ_a ⟨O|v_a⟩⟨w_a|ρ₀⟩ Λ_a^d`. Clusters of
//! (numerically) degenerate eigenvalues are resolved as a block; inside a
//! block the basis is chosen to diagonalise the Hamming-weight operator so
//! that the two vacua at `γ = 0` come out as separate vectors.

use std::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{product_covector, DenseState, ORACLE_LIMIT};
use super::params::{initial_site_weights, q_powers, ObservableKind};
use crate::error::{Error, Result};
use crate::numerics::eigen::{block_inverse_iteration, eigenvalues, solve_linear, EigenConfig};
use crate::numerics::{dot, eig_dense, matvec, vecmat, DenseMatrix, PrecisionContext, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorLabel {
    /// Mean Hamming weight at most `N/2`: excitations of the `|𝕀⟩` vacuum.
    Low,
    /// Mean Hamming weight above `N/2`: built on the `|𝕊⟩` vacuum.
    Extensive,
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SectorLabel::Low => "low",
            SectorLabel::Extensive => "extensive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SpectralEntry<T> {
    pub value: T,
    /// Zero unless the eigenvalue belongs to a complex pair.
    pub imag: T,
    /// Right eigenvector, unit max-norm.
    pub right: Option<Vec<T>>,
    /// Left eigenvector with `⟨left|right⟩ = 1`.
    pub left: Option<Vec<T>>,
    /// Mean Hamming weight `⟨left|H|right⟩` in the biorthogonal pairing.
    pub mean_weight: Option<T>,
    pub label: Option<SectorLabel>,
}

impl<T: Real> SpectralEntry<T> {
    pub fn is_complex(&self) -> bool {
        !self.imag.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumResult<T> {
    pub n_sites: usize,
    /// Sorted by descending modulus.
    pub entries: Vec<SpectralEntry<T>>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn values(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }

    /// Largest real eigenvalue strictly below `1 - tol` with the given label.
    pub fn leading_below_one(&self, label: SectorLabel, tol: f64) -> Option<&SpectralEntry<T>> {
        self.entries.iter().find(|e| {
            !e.is_complex() && e.label == Some(label) && e.value.to_f64() < 1.0 - tol
        })
    }

    /// Largest real eigenvalue strictly below `1 - tol`.
    pub fn leading_nontrivial(&self, tol: f64) -> Option<&SpectralEntry<T>> {
        self.entries.iter().find(|e| !e.is_complex() && e.value.to_f64() < 1.0 - tol)
    }
}

/// Per-eigenvector couplings, aligned with [`SpectrumResult::entries`].
/// `None` for complex eigenvalues.
#[derive(Clone, Debug)]
pub struct CouplingConstants<T> {
    pub fidelity: Vec<Option<T>>,
    pub chi: Vec<Option<T>>,
    pub trace: Vec<Option<T>>,
    pub xeb: Vec<Option<T>>,
    /// `⟨𝕊|v⟩⟨v|ρ₀⟩/⟨v|v⟩` with the right vector standing in for the left
    /// one. Does not reconstruct `F(d)` for a nonsymmetric transfer but
    /// isolates the overlap `⟨𝕊|v⟩`.
    pub fidelity_self_dual: Vec<Option<T>>,
}

impl<T: Real> CouplingConstants<T> {
    /// `Σ_a c_a Λ_a^d` over the real entries.
    pub fn reconstruct(spec: &SpectrumResult<T>, coeffs: &[Option<T>], depth: u32) -> T {
        let mut acc = spec.entries[0].value.zero_like();
        for (e, c) in spec.entries.iter().zip(coeffs) {
            if let Some(c) = c {
                acc.add_mul(c, &e.value.powi(depth as i32));
            }
        }
        acc
    }
}

/// A transfer matrix together with everything needed to couple it to the
/// observables: the initial vector, the three covectors, and the Hamming
/// weight of each basis element.
#[derive(Clone, Debug)]
pub struct SpectralProblem<T> {
    pub transfer: DenseMatrix<T>,
    pub initial: Vec<T>,
    pub trace: Vec<T>,
    pub xeb: Vec<T>,
    pub fidelity: Vec<T>,
    pub weights: Vec<usize>,
    pub n_sites: usize,
    pub q: u32,
}

impl<T: Real> SpectralProblem<T> {
    /// Dense transfer over all `2^N` configurations.
    pub fn dense(ctx: &PrecisionContext, transfer: DenseMatrix<T>, n: usize, q: u32) -> Result<Self> {
        if n > ORACLE_LIMIT {
            return Err(Error::OracleLimit { limit: ORACLE_LIMIT, requested: n });
        }
        if transfer.rows() != 1 << n || !transfer.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "dense transfer of shape {}x{} for {n} sites",
                transfer.rows(),
                transfer.cols()
            )));
        }
        let initial = DenseState::<T>::initial(ctx, n, q)?.weights().to_vec();
        let cov = |k: ObservableKind| product_covector(n, &k.site_vector::<T>(ctx, q));
        Ok(Self {
            transfer,
            initial,
            trace: cov(ObservableKind::Trace),
            xeb: cov(ObservableKind::XebP),
            fidelity: cov(ObservableKind::FidelityS),
            weights: (0..1usize << n).map(|i| i.count_ones() as usize).collect(),
            n_sites: n,
            q,
        })
    }

    /// Transfer acting on Hamming-sector totals `p_S`.
    pub fn reduced(ctx: &PrecisionContext, transfer: DenseMatrix<T>, n: usize, q: u32) -> Result<Self> {
        if transfer.rows() != n + 1 || !transfer.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "reduced transfer of shape {}x{} for {n} sites",
                transfer.rows(),
                transfer.cols()
            )));
        }
        let initial = reduced_initial(ctx, n, q);
        let cov = |k: ObservableKind| reduced_covector(ctx, n, &k.site_vector::<T>(ctx, q));
        Ok(Self {
            transfer,
            initial,
            trace: cov(ObservableKind::Trace),
            xeb: cov(ObservableKind::XebP),
            fidelity: cov(ObservableKind::FidelityS),
            weights: (0..=n).collect(),
            n_sites: n,
            q,
        })
    }
}

/// `p_S = C(N,S) a^{N-S} b^S` for the product initial state.
pub fn reduced_initial<T: Real>(ctx: &PrecisionContext, n: usize, q: u32) -> Vec<T> {
    let w = initial_site_weights::<T>(ctx, q);
    let mut out = Vec::with_capacity(n + 1);
    let mut binom = rug::Integer::from(1);
    for s in 0..=n {
        let c: T = ctx.int(&binom);
        out.push(c * &w[0].powi((n - s) as i32) * &w[1].powi(s as i32));
        binom *= (n - s) as u64;
        binom /= (s + 1) as u64;
    }
    out
}

/// Covector value on sector `S`: `w0^{N-S} w1^S`.
pub fn reduced_covector<T: Real>(ctx: &PrecisionContext, n: usize, site: &[T; 2]) -> Vec<T> {
    let _ = ctx;
    (0..=n).map(|s| site[0].powi((n - s) as i32) * &site[1].powi(s as i32)).collect()
}

/// Leading `k` eigenpairs of a dense `2^N` transfer with couplings.
pub fn dense_spectrum_and_couplings<T: Real>(
    ctx: &PrecisionContext,
    transfer: DenseMatrix<T>,
    n: usize,
    q: u32,
    k: usize,
) -> Result<(SpectrumResult<T>, CouplingConstants<T>)> {
    spectrum_and_couplings(&SpectralProblem::dense(ctx, transfer, n, q)?, k)
}

/// Leading `k` eigenpairs (extended so that no degenerate cluster is cut)
/// with labels and couplings.
pub fn spectrum_and_couplings<T: Real>(
    prob: &SpectralProblem<T>,
    k: usize,
) -> Result<(SpectrumResult<T>, CouplingConstants<T>)> {
    let t = &prob.transfer;
    let dim = t.rows();
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter(format!("requested {k} eigenpairs of a {dim}x{dim} transfer")));
    }
    let zero = t.data()[0].zero_like();
    let bits = zero.bits();
    let scale = t.norm_inf().max_of(zero.one_like());
    let cluster_tol = zero.from_f64_like(2f64.powf(-(bits as f64) / 2.0)) * &scale;
    let cfg = EigenConfig::default();
    let all = eigenvalues(t, &cfg)?;

    // Group into clusters: complex values stand alone, real values within
    // `cluster_tol` of the cluster's first member join it.
    let mut clusters: Vec<(Vec<usize>, bool)> = Vec::new();
    for (i, (re, im)) in all.iter().enumerate() {
        let complex = im.abs() > cluster_tol;
        if let Some((members, false)) = clusters.last_mut() {
            if !complex && (all[members[0]].0.clone() - re).abs() <= cluster_tol {
                members.push(i);
                continue;
            }
        }
        clusters.push((vec![i], complex));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let seed_zero = zero.clone();
    let mut random_vec = move || -> Vec<T> {
        (0..dim)
            .map(|_| seed_zero.from_f64_like((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5))
            .collect()
    };
    let tt = t.transpose();

    let mut entries = Vec::new();
    let mut cf = Vec::new();
    let mut cchi = Vec::new();
    let mut ctr = Vec::new();
    let mut cx = Vec::new();
    let mut csd = Vec::new();
    let qn: T = q_powers::<T>(&t.data()[0].context(), prob.q, prob.n_sites)[prob.n_sites].clone();
    for (members, complex) in clusters {
        if entries.len() >= k {
            break;
        }
        if complex {
            let (re, im) = all[members[0]].clone();
            entries.push(SpectralEntry { value: re, imag: im, right: None, left: None, mean_weight: None, label: None });
            for c in [&mut cf, &mut cchi, &mut ctr, &mut cx, &mut csd] {
                c.push(None);
            }
            continue;
        }
        let m = members.len();
        let mut shift = zero.clone();
        for &i in &members {
            shift += &all[i].0;
        }
        shift /= &zero.from_f64_like(m as f64);

        let mut rstarts = vec![prob.initial.clone()];
        let mut lstarts = vec![prob.fidelity.clone(), prob.trace.clone()];
        while rstarts.len() < m {
            rstarts.push(random_vec());
        }
        while lstarts.len() < m {
            lstarts.push(random_vec());
        }
        rstarts.truncate(m);
        lstarts.truncate(m);
        let v = block_inverse_iteration(t, &shift, rstarts, 4, &mut random_vec)?;
        let w = block_inverse_iteration(&tt, &shift, lstarts, 4, &mut random_vec)?;
        let v = hamming_rotate(&v, &w, &prob.weights)?;
        let w = biorthonormal_left(&v, &w)?;
        for (mut right, mut left) in v.into_iter().zip(w) {
            // unit max-norm, first significant entry positive
            let mut big = zero.clone();
            let mut first_sign_neg = None;
            let thresh = crate::numerics::norm_inf_vec(&right) * &zero.from_f64_like(2f64.powf(-(bits as f64) / 2.0));
            for x in &right {
                if first_sign_neg.is_none() && x.abs() > thresh {
                    first_sign_neg = Some(*x < zero);
                }
                big = big.max_of(x.abs());
            }
            let factor = if first_sign_neg == Some(true) { -big } else { big };
            for x in right.iter_mut() {
                *x /= &factor;
            }
            for x in left.iter_mut() {
                *x *= &factor;
            }
            let tv = matvec(t, &right)?;
            let value = dot(&left, &tv);
            let mut mean = zero.clone();
            for ((x, y), &h) in right.iter().zip(&left).zip(&prob.weights) {
                mean.add_mul(&(x.clone() * y), &zero.from_f64_like(h as f64));
            }
            // Copy-swap doublets at γ = 0 sit exactly on N/2; they count as low.
            let half = prob.n_sites as f64 / 2.0;
            let label = if mean.to_f64() <= half * (1.0 + 1e-9) { SectorLabel::Low } else { SectorLabel::Extensive };
            let proj = dot(&left, &prob.initial);
            let c_tr = dot(&prob.trace, &right) * &proj;
            let c_x = dot(&prob.xeb, &right) * &proj;
            let c_f = dot(&prob.fidelity, &right) * &proj;
            cchi.push(Some(qn.clone() * &c_x - &c_tr));
            ctr.push(Some(c_tr));
            cx.push(Some(c_x));
            let sd = dot(&prob.fidelity, &right) * &dot(&right, &prob.initial) / &dot(&right, &right);
            csd.push(Some(sd));
            cf.push(Some(c_f));
            entries.push(SpectralEntry {
                value,
                imag: zero.clone(),
                right: Some(right),
                left: Some(left),
                mean_weight: Some(mean),
                label: Some(label),
            });
        }
    }
    // Rayleigh refinement can reorder values inside a cluster.
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&entries[a], &entries[b]);
        let ma = (ea.value.clone() * &ea.value + ea.imag.clone() * &ea.imag).sqrt();
        let mb = (eb.value.clone() * &eb.value + eb.imag.clone() * &eb.imag).sqrt();
        mb.total_cmp_f(&ma).then_with(|| eb.value.total_cmp_f(&ea.value))
    });
    let pick = |v: &[Option<T>]| order.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
    let couplings = CouplingConstants { fidelity: pick(&cf), chi: pick(&cchi), trace: pick(&ctr), xeb: pick(&cx), fidelity_self_dual: pick(&csd) };
    let entries = order.iter().map(|&i| entries[i].clone()).collect();
    Ok((SpectrumResult { n_sites: prob.n_sites, entries }, couplings))
}

/// Rotates a right basis `V` of an invariant subspace so that it
/// diagonalises the compression `(WᵀV)⁻¹ Wᵀ H V` of the Hamming-weight
/// operator `H`. Left unchanged when that compression has repeated or
/// complex eigenvalues.
fn hamming_rotate<T: Real>(v: &[Vec<T>], w: &[Vec<T>], weights: &[usize]) -> Result<Vec<Vec<T>>> {
    let m = v.len();
    if m == 1 {
        return Ok(v.to_vec());
    }
    let zero = v[0][0].zero_like();
    let hv: Vec<Vec<T>> = v
        .iter()
        .map(|x| x.iter().zip(weights).map(|(a, &h)| a.clone() * &zero.from_f64_like(h as f64)).collect())
        .collect();
    let g = gram(w, v);
    let wh = gram(w, &hv);
    // C = G⁻¹ (WᵀHV), column by column
    let mut cdata = vec![zero.clone(); m * m];
    for j in 0..m {
        let col = solve_linear(&g, &wh.column(j))?;
        for i in 0..m {
            cdata[i * m + j] = col[i].clone();
        }
    }
    let c = DenseMatrix::from_vec(m, m, cdata)?;
    let dec = match eig_dense(&c, m) {
        Ok(d) => d,
        Err(_) => return Ok(v.to_vec()),
    };
    let tol = 1e-6 * (1.0 + c.norm_inf().to_f64());
    for (i, p) in dec.pairs.iter().enumerate() {
        if p.is_complex() || p.right.is_none() {
            return Ok(v.to_vec());
        }
        for q in &dec.pairs[..i] {
            if (p.value.clone() - &q.value).abs().to_f64() < tol {
                return Ok(v.to_vec());
            }
        }
    }
    Ok(dec
        .pairs
        .iter()
        .map(|p| {
            let y = p.right.as_ref().expect("checked");
            let mut out = vec![zero.clone(); v[0].len()];
            for (yj, vj) in y.iter().zip(v) {
                for (o, x) in out.iter_mut().zip(vj) {
                    o.add_mul(yj, x);
                }
            }
            out
        })
        .collect())
}

/// `G[i][j] = ⟨a_i|b_j⟩`
fn gram<T: Real>(a: &[Vec<T>], b: &[Vec<T>]) -> DenseMatrix<T> {
    let data = a.iter().flat_map(|x| b.iter().map(move |y| dot(x, y))).collect();
    DenseMatrix::from_vec(a.len(), b.len(), data).expect("shape")
}

/// Left basis `W' = W G⁻ᵀ` with `W'ᵀV = I`.
fn biorthonormal_left<T: Real>(v: &[Vec<T>], w: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let m = v.len();
    let zero = v[0][0].zero_like();
    // Rows of G⁻¹ give the combination coefficients: W' = W (G⁻¹)ᵀ, so
    // w'_j = Σ_i (G⁻¹)_{j i} w_i.
    let gt = gram(w, v).transpose();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut e = vec![zero.clone(); m];
        e[j] = zero.one_like();
        // (G⁻¹)_{j,·} = column j of G⁻ᵀ = solution of Gᵀ x = e_j
        let coef = solve_linear(&gt, &e)?;
        let mut wj = vec![zero.clone(); w[0].len()];
        for (ci, wi) in coef.iter().zip(w) {
            for (o, x) in wj.iter_mut().zip(wi) {
                o.add_mul(ci, x);
            }
        }
        out.push(wj);
    }
    Ok(out)
}

/// Left-eigenvector residual `max |wᵀT - λwᵀ|` for diagnostics.
pub fn left_residual<T: Real>(t: &DenseMatrix<T>, value: &T, left: &[T]) -> Result<T> {
    let wt = vecmat(left, t)?;
    let mut r = value.zero_like();
    for (a, b) in wt.iter().zip(left) {
        let mut d = a.clone();
        d.sub_mul(value, b);
        r = r.max_of(d.abs());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::dense::{a2a_dense_transfer, dense_layer, brickwork_pairing, brickwork_period_transfer};
    use super::super::params::ModelParams;
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::double()
    }

    #[test]
    fn noiseless_two_vacua() {
        let c = ctx();
        let p = ModelParams::<f64>::haar(&c, 2, 0.0).unwrap();
        let t = a2a_dense_transfer(4, &p).unwrap();
        let (spec, _) = dense_spectrum_and_couplings(&c, t, 4, 2, 2).unwrap();
        assert!((spec.entries[0].value - 1.0).abs() < 1e-10);
        assert!((spec.entries[1].value - 1.0).abs() < 1e-10);
        let mut labels: Vec<_> = spec.entries[..2].iter().map(|e| e.label.unwrap()).collect();
        labels.sort_by_key(|l| *l == SectorLabel::Extensive);
        assert_eq!(labels, vec![SectorLabel::Low, SectorLabel::Extensive]);
        for e in &spec.entries[..2] {
            let r = e.right.as_ref().unwrap();
            let nonzero = r.iter().filter(|x| x.abs() > 1e-8).count();
            assert_eq!(nonzero, 1, "vacuum should be a single configuration: {r:?}");
        }
    }

    #[test]
    fn noisy_unique_fixed_point_with_trace_left_vector() {
        let c = ctx();
        let p = ModelParams::<f64>::haar(&c, 2, 0.05).unwrap();
        let t = a2a_dense_transfer(4, &p).unwrap();
        let (spec, cpl) = dense_spectrum_and_couplings(&c, t, 4, 2, 3).unwrap();
        assert!((spec.entries[0].value - 1.0).abs() < 1e-10);
        assert!(spec.entries[1].value < 1.0 - 1e-6);
        let left = spec.entries[0].left.as_ref().unwrap();
        for x in left {
            assert!((x - left[0]).abs() < 1e-8);
        }
        assert!((cpl.trace[0].unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn couplings_reconstruct_evolution() {
        let c = ctx();
        let p = ModelParams::<f64>::haar(&c, 2, 0.08).unwrap();
        let n = 4;
        let t = a2a_dense_transfer(n, &p).unwrap();
        let (spec, cpl) = dense_spectrum_and_couplings(&c, t.clone(), n, 2, 1 << n).unwrap();
        assert!(spec.entries.iter().all(|e| !e.is_complex()));
        let mut rho = DenseState::<f64>::initial(&c, n, 2).unwrap().weights().to_vec();
        let tol = 2f64.powf(-53.0 / 4.0);
        for d in 0..=20u32 {
            let st = DenseState::from_weights(n, rho.clone()).unwrap();
            let obs = st.observables(&c, 2);
            let f = CouplingConstants::reconstruct(&spec, &cpl.fidelity, d);
            let chi = CouplingConstants::reconstruct(&spec, &cpl.chi, d);
            assert!((f - obs.fidelity).abs() < tol, "F at d={d}");
            assert!((chi - obs.chi).abs() < tol, "chi at d={d}");
            rho = matvec(&t, &rho).unwrap();
        }
    }

    #[test]
    fn brickwork_period_fixed_points() {
        let c = ctx();
        let p = ModelParams::<f64>::haar(&c, 2, 0.0).unwrap();
        let t = brickwork_period_transfer(6, &p).unwrap();
        let (spec, _) = dense_spectrum_and_couplings(&c, t, 6, 2, 3).unwrap();
        assert!((spec.entries[1].value - 1.0).abs() < 1e-9);
        assert!(spec.entries[2].value < 1.0 - 1e-6);
        let _ = (dense_layer::<f64>, brickwork_pairing);
    }

    #[test]
    fn noiseless_fidelity_decouples_from_decaying_modes() {
        let c = ctx();
        let p = ModelParams::<f64>::haar(&c, 2, 0.0).unwrap();
        for n in [4usize, 6] {
            let t = a2a_dense_transfer(n, &p).unwrap();
            let (spec, cpl) = dense_spectrum_and_couplings(&c, t, n, 2, 6).unwrap();
            let mut total = 0.0;
            for (e, cf) in spec.entries.iter().zip(&cpl.fidelity) {
                if e.value < 1.0 - 1e-8 {
                    assert!(cf.unwrap().abs() < 1e-12);
                } else {
                    total += cf.unwrap();
                }
            }
            assert!((total - 1.0).abs() < 1e-12);
            let g = spec.leading_nontrivial(1e-8).unwrap();
            assert_eq!(g.label, Some(SectorLabel::Low));
        }
    }
}
