//! The limit engine: samples the normalized commutators `D_j` along a net,
//! decides convergence, and (optionally) accelerates the `O(1/l_j)` tail by
//! linear extrapolation in `1/l_j`.
//!
//! The engine is generic over a [`MixingSpace`]: the sparse regular
//! representation and the dense matrix scenarios plug in the same way. Also
//! here: the dense closed forms those scenarios and the identity suites rely
//! on (Cesàro means, the compressed conjugate operator and its integral
//! commutator form).

use nalgebra::DVector;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::group::{DivergentNet, GroupElement};
use crate::operator::{commutator, pi_of_h, unitary_power, Operator, C64};
use crate::parallel;
use crate::quadrature::gauss_legendre_01;
use crate::representation::FlowScenario;

/// What a scenario must provide for limit estimation and verification.
pub trait MixingSpace: Sync {
    /// Vector representation (sparse probe map or dense column).
    type V: Clone + Send + Sync;

    fn net(&self) -> &DivergentNet;
    fn probe_ids(&self) -> &[String];
    fn probes(&self) -> &[Self::V];

    /// `D_j v = (1/l_j) [A, U(x_j)] U(x_j)^-1 v`.
    fn d_sample(&self, j: usize, v: &Self::V) -> Result<Self::V>;

    /// The conjugate operator `A` itself (for certified-bound terms).
    fn conjugate_apply(&self, v: &Self::V) -> Result<Self::V>;

    /// Matrix coefficient `<phi, U(x_j) psi>`.
    fn coefficient(&self, phi: &Self::V, j: usize, psi: &Self::V) -> Result<C64>;

    /// Inner product, conjugate-linear in the first slot.
    fn inner(&self, a: &Self::V, b: &Self::V) -> C64;

    fn lincomb(&self, terms: &[(C64, &Self::V)]) -> Result<Self::V>;

    /// Mass clipped by the truncation when translating `psi` by `x_j`
    /// (zero for dense scenarios).
    fn translate_loss(&self, j: usize, psi: &Self::V) -> Result<f64>;

    /// 2-norm of the conjugate operator when it is bounded (dense
    /// scenarios); `None` for unbounded multipliers.
    fn conjugate_norm(&self) -> Option<f64> {
        None
    }

    fn norm(&self, v: &Self::V) -> f64 {
        self.inner(v, v).re.max(0.0).sqrt()
    }

    fn sub(&self, a: &Self::V, b: &Self::V) -> Result<Self::V> {
        self.lincomb(&[(C64::new(1.0, 0.0), a), (C64::new(-1.0, 0.0), b)])
    }
}

/// Public name for a single commutator sample.
pub fn d_direct<S: MixingSpace>(space: &S, j: usize, v: &S::V) -> Result<S::V> {
    space.d_sample(j, v)
}

/// Convergence policy for [`estimate_limit`].
#[derive(Debug, Clone, Copy)]
pub struct LimitSettings {
    /// Residual threshold.
    pub eps_conv: f64,
    /// How many trailing residuals must sit below the threshold.
    pub tail: usize,
    /// Extrapolate linearly in `1/l_j` before measuring convergence.
    pub richardson: bool,
}

impl Default for LimitSettings {
    fn default() -> Self {
        LimitSettings { eps_conv: 1e-8, tail: 3, richardson: false }
    }
}

/// Per-probe sampling record.
#[derive(Debug, Clone)]
pub struct ProbeTrace<V> {
    pub id: String,
    /// Raw samples `D_j phi`.
    pub samples: Vec<V>,
    /// Extrapolated sequence if enabled (same length; first entry = raw).
    pub extrapolated: Option<Vec<V>>,
    /// `|seq_j - seq_last|` where `seq` is the judged sequence.
    pub residuals: Vec<f64>,
    /// `|samples_j - limit|` — the deviation surrogate used in certified
    /// bounds.
    pub deviations: Vec<f64>,
    pub limit: V,
    pub converged: bool,
}

/// Limit data for the whole probe family.
#[derive(Debug, Clone)]
pub struct LimitEstimate<V> {
    pub traces: Vec<ProbeTrace<V>>,
    pub converged_all: bool,
    pub settings: LimitSettings,
}

/// Samples `D_j` on every probe along the net and estimates the strong
/// limit per probe. Needs at least `tail + 1` net points.
pub fn estimate_limit<S: MixingSpace>(
    space: &S,
    settings: &LimitSettings,
) -> Result<LimitEstimate<S::V>> {
    let net_len = space.net().len();
    let need = settings.tail + 1;
    if net_len < need {
        return Err(Error::TooFewSamples { got: net_len, need });
    }
    if settings.tail == 0 {
        return Err(Error::TooFewSamples { got: net_len, need: 1 });
    }
    let ids = space.probe_ids().to_vec();
    let probes = space.probes().to_vec();
    let lengths = space.net().lengths.clone();
    let indexed: Vec<(String, S::V)> = ids.into_iter().zip(probes).collect();

    let traces = parallel::try_map(&indexed, |(id, phi)| {
        let mut samples = Vec::with_capacity(net_len);
        for j in 0..net_len {
            samples.push(space.d_sample(j, phi)?);
        }
        let extrapolated = if settings.richardson {
            Some(richardson_sequence(space, &samples, &lengths)?)
        } else {
            None
        };
        let seq: &Vec<S::V> = extrapolated.as_ref().unwrap_or(&samples);
        let limit = seq.last().unwrap().clone();
        let mut residuals = Vec::with_capacity(net_len);
        for v in seq {
            residuals.push(space.norm(&space.sub(v, &limit)?));
        }
        let mut deviations = Vec::with_capacity(net_len);
        for v in &samples {
            deviations.push(space.norm(&space.sub(v, &limit)?));
        }
        let converged = residuals[net_len - 1 - settings.tail..net_len - 1]
            .iter()
            .all(|&r| r <= settings.eps_conv);
        Ok(ProbeTrace {
            id: id.clone(),
            samples,
            extrapolated,
            residuals,
            deviations,
            limit,
            converged,
        })
    })?;

    let converged_all = traces.iter().all(|t| t.converged);
    Ok(LimitEstimate { traces, converged_all, settings: *settings })
}

/// `E_j = (l_j D_j - l_{j-1} D_{j-1}) / (l_j - l_{j-1})`, `E_0 = D_0`.
/// Kills an additive `K/l_j` error term exactly.
fn richardson_sequence<S: MixingSpace>(
    space: &S,
    samples: &[S::V],
    lengths: &[f64],
) -> Result<Vec<S::V>> {
    let mut out = Vec::with_capacity(samples.len());
    out.push(samples[0].clone());
    for j in 1..samples.len() {
        let dl = lengths[j] - lengths[j - 1];
        let a = C64::new(lengths[j] / dl, 0.0);
        let b = C64::new(-lengths[j - 1] / dl, 0.0);
        out.push(space.lincomb(&[(a, &samples[j]), (b, &samples[j - 1])])?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// dense closed forms
// ---------------------------------------------------------------------------

/// `(1/|n|) [A, U^n] U^-n phi` for a dense power scenario.
pub fn d_direct_power(
    u: &Operator,
    a: &Operator,
    n: i64,
    phi: &DVector<C64>,
) -> Result<DVector<C64>> {
    if n == 0 {
        return Err(Error::Unsupported("commutator sample at n = 0".into()));
    }
    let un = unitary_power(u, n)?;
    let uninv = un.adjoint();
    let direct = a.apply(phi)?;
    let conjugated = un.apply(&a.apply(&uninv.apply(phi)?)?)?;
    let inv_len = Complex::new(1.0 / n.unsigned_abs() as f64, 0.0);
    Ok((direct - conjugated).map(|z| z * inv_len))
}

/// Cesàro mean `(1/N) sum_{m<N} U^m ([A,U]U^-1) U^-m phi`, computed
/// literally term by term. Telescoping makes it equal `d_direct_power` with
/// `n = N` — a strong cross-check on the powering and commutator code.
pub fn cesaro_form(
    u: &Operator,
    a: &Operator,
    n: u32,
    phi: &DVector<C64>,
) -> Result<DVector<C64>> {
    if n == 0 {
        return Err(Error::Unsupported("Cesàro mean of length 0".into()));
    }
    let b = commutator(a, u)?.mul(&u.adjoint())?;
    let mut acc = DVector::<C64>::zeros(phi.len());
    for m in 0..n as i64 {
        let um = unitary_power(u, m)?;
        let uminv = um.adjoint();
        acc += um.apply(&b.apply(&uminv.apply(phi)?)?)?;
    }
    let inv_n = Complex::new(1.0 / n as f64, 0.0);
    Ok(acc.map(|z| z * inv_n))
}

/// `Atilde = Pi(H) A Pi(H)^*` with `Pi(H) = prod_k (H_k + i)^-1`.
/// Returns the operator and its raw hermiticity residual (before the exact
/// symmetrization done by the hermitian constructor).
pub fn build_atilde(flow: &FlowScenario) -> Result<(Operator, f64)> {
    let pi = pi_of_h(flow.gens())?;
    let raw = pi.mul(flow.conjugate())?.mul(&pi.adjoint())?;
    let residual = raw.sub(&raw.adjoint())?.max_norm();
    let op = Operator::hermitian(raw.matrix().clone(), "Atilde")?;
    Ok((op, residual))
}

/// Gauss–Legendre approximation of
/// `D(x) = (1/ell) \int_0^1 e^{-is x·H} Pi [i x·H, A] Pi^* e^{is x·H} ds`.
pub fn integral_operator(
    flow: &FlowScenario,
    x: &GroupElement,
    ell: f64,
    nodes: usize,
) -> Result<Operator> {
    if !(ell > 0.0) {
        return Err(Error::Unsupported(format!("integral form needs ell > 0, got {ell}")));
    }
    let xh = flow.x_dot_h(x)?;
    let pi = pi_of_h(flow.gens())?;
    let core = pi
        .mul(&commutator(&xh.scale(C64::new(0.0, 1.0)), flow.conjugate())?)?
        .mul(&pi.adjoint())?;
    let (s_nodes, weights) = gauss_legendre_01(nodes);
    let n = flow.space_dim();
    let mut acc = nalgebra::DMatrix::<C64>::zeros(n, n);
    for (&s, &w) in s_nodes.iter().zip(&weights) {
        let left = crate::operator::unitary_exp(&xh, s)?;
        let right = left.adjoint();
        let term = left.mul(&core)?.mul(&right)?;
        acc += term.matrix().map(|z| z * C64::new(w / ell, 0.0));
    }
    Operator::general(acc, format!("D_int({x})"))
}

/// `integral_operator` applied to a vector.
pub fn integral_form(
    flow: &FlowScenario,
    x: &GroupElement,
    ell: f64,
    nodes: usize,
    phi: &DVector<C64>,
) -> Result<DVector<C64>> {
    integral_operator(flow, x, ell, nodes)?.apply(phi)
}

/// Residual of the exact finite-dimensional identity
/// `[Atilde, U(x)] = ell · D(x) U(x)`; what remains is pure quadrature
/// error, so it must shrink as `nodes` grows.
pub fn check_atilde_identity(
    flow: &FlowScenario,
    x: &GroupElement,
    ell: f64,
    nodes: usize,
) -> Result<f64> {
    let (atilde, _) = build_atilde(flow)?;
    let u = flow.unitary(x)?;
    let lhs = commutator(&atilde, &u)?;
    let d = integral_operator(flow, x, ell, nodes)?;
    let rhs = d.mul(&u)?.scale(C64::new(ell, 0.0));
    Ok(lhs.sub(&rhs)?.max_norm())
}

/// Rank-one-parameter form of the same integral: for `x = (t)` substitute
/// `sigma = s t`, giving `(1/|t|) \int_0^t e^{-i sigma H} Pi [iH, A] Pi^*
/// e^{i sigma H} d sigma`. Must agree with `integral_operator` at the same
/// node count.
pub fn integral_operator_d1(flow: &FlowScenario, t: f64, nodes: usize) -> Result<Operator> {
    if flow.group_dim() != 1 {
        return Err(Error::Unsupported(format!(
            "one-parameter form on a rank-{} flow",
            flow.group_dim()
        )));
    }
    if t == 0.0 {
        return Err(Error::Unsupported("one-parameter form at t = 0".into()));
    }
    let h = &flow.gens()[0];
    let pi = pi_of_h(flow.gens())?;
    let core = pi
        .mul(&commutator(&h.scale(C64::new(0.0, 1.0)), flow.conjugate())?)?
        .mul(&pi.adjoint())?;
    let (s_nodes, weights) = gauss_legendre_01(nodes);
    let n = flow.space_dim();
    let mut acc = nalgebra::DMatrix::<C64>::zeros(n, n);
    for (&s, &w) in s_nodes.iter().zip(&weights) {
        let sigma = s * t;
        let left = crate::operator::unitary_exp(h, sigma)?;
        let right = left.adjoint();
        let term = left.mul(&core)?.mul(&right)?;
        // d sigma = t ds; prefactor 1/|t| leaves sign(t) * w
        acc += term.matrix().map(|z| z * C64::new(w * t.signum(), 0.0));
    }
    Operator::general(acc, format!("D_int1({t})"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{random_hermitian, random_unitary, unitary_exp};
    use nalgebra::DVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_vector(n: usize, seed: u64) -> DVector<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DVector::from_fn(n, |_, _| {
            C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
        })
    }

    fn vec_max(v: &DVector<C64>) -> f64 {
        v.iter().fold(0.0f64, |a, z| a.max(z.norm()))
    }

    #[test]
    fn cesaro_equals_direct_sample() {
        for seed in 0..5u64 {
            let dim = 6;
            let u = random_unitary(dim, 100 + seed).unwrap();
            let a = random_hermitian(dim, 200 + seed).unwrap();
            let phi = random_vector(dim, 300 + seed);
            for n in [1u32, 2, 7, 16] {
                let ces = cesaro_form(&u, &a, n, &phi).unwrap();
                let dir = d_direct_power(&u, &a, n as i64, &phi).unwrap();
                let dev = vec_max(&(ces - dir));
                assert!(dev < 1e-12, "seed {seed} n {n}: dev {dev}");
            }
        }
    }

    #[test]
    fn atilde_is_hermitian_and_bounded() {
        let dim = 8;
        let h = random_hermitian(dim, 1).unwrap();
        let a = random_hermitian(dim, 2).unwrap();
        let flow = FlowScenario::new(vec![h], a.clone()).unwrap();
        let (atilde, residual) = build_atilde(&flow).unwrap();
        assert!(residual < 1e-13, "hermiticity residual {residual}");
        // |Pi| <= 1, so |Atilde| <= |A|
        assert!(atilde.two_norm().unwrap() <= a.two_norm().unwrap() + 1e-12);
    }

    #[test]
    fn atilde_identity_residual_decreases_with_nodes() {
        let dim = 6;
        let h = random_hermitian(dim, 3).unwrap();
        let a = random_hermitian(dim, 4).unwrap();
        let flow = FlowScenario::new(vec![h], a).unwrap();
        // moderate oscillation: quadrature error visible at 8 nodes, tiny at 32
        let x = GroupElement::Point(vec![6.0]);
        let r8 = check_atilde_identity(&flow, &x, 6.0, 8).unwrap();
        let r32 = check_atilde_identity(&flow, &x, 6.0, 32).unwrap();
        assert!(
            r32 < r8 * 1e-3,
            "expected sharp decrease: r8 {r8:.3e}, r32 {r32:.3e}"
        );
        assert!(r32 < 1e-10, "r32 {r32:.3e}");
    }

    #[test]
    fn one_parameter_form_matches_general_form() {
        let dim = 6;
        let h = random_hermitian(dim, 5).unwrap();
        let a = random_hermitian(dim, 6).unwrap();
        let flow = FlowScenario::new(vec![h], a).unwrap();
        for t in [0.8, -2.5, 4.0] {
            let general = integral_operator(
                &flow,
                &GroupElement::Point(vec![t]),
                t.abs(),
                24,
            )
            .unwrap();
            let d1 = integral_operator_d1(&flow, t, 24).unwrap();
            let dev = general.sub(&d1).unwrap().max_norm();
            assert!(dev < 1e-12, "t {t}: dev {dev}");
        }
    }

    #[test]
    fn integral_identity_holds_in_two_parameters() {
        let dim = 5;
        // commuting pair from one seeded eigenbasis
        let v = random_unitary(dim, 7).unwrap();
        let spectrum1: Vec<f64> = vec![0.3, -1.1, 0.6, 1.4, -0.2];
        let spectrum2: Vec<f64> = vec![-0.5, 0.9, 0.1, -1.3, 0.7];
        let diag = |s: &Vec<f64>| {
            nalgebra::DMatrix::<C64>::from_fn(dim, dim, |i, j| {
                if i == j {
                    C64::new(s[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        };
        let h1 = Operator::hermitian(
            v.matrix() * diag(&spectrum1) * v.matrix().adjoint(),
            "h1",
        )
        .unwrap();
        let h2 = Operator::hermitian(
            v.matrix() * diag(&spectrum2) * v.matrix().adjoint(),
            "h2",
        )
        .unwrap();
        let a = random_hermitian(dim, 8).unwrap();
        let flow = FlowScenario::new(vec![h1, h2], a).unwrap();
        let x = GroupElement::Point(vec![2.0, -1.5]);
        let ell = (2.0f64 * 2.0 + 1.5 * 1.5).sqrt();
        let r = check_atilde_identity(&flow, &x, ell, 48).unwrap();
        assert!(r < 1e-11, "residual {r}");
    }

    #[test]
    fn flow_unitary_matches_exponent_sum() {
        let dim = 4;
        let h = random_hermitian(dim, 9).unwrap();
        let a = random_hermitian(dim, 10).unwrap();
        let flow = FlowScenario::new(vec![h.clone()], a).unwrap();
        let u = flow.unitary(&GroupElement::Point(vec![3.0])).unwrap();
        let want = unitary_exp(&h, 3.0).unwrap();
        assert!(u.sub(&want).unwrap().max_norm() < 1e-13);
    }
}
