//! Turns limit estimates into a certification verdict: compresses the
//! estimated `D` onto the probe span, splits kernel from co-kernel, tabulates
//! coefficient decay against certified bounds, and issues per-pair verdicts.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::limit::{LimitEstimate, MixingSpace};
use crate::operator::{max_norm, Operator, C64};
use crate::parallel;

/// Numerical proximity to the co-kernel span required before a mixing
/// verdict may be issued for a probe.
pub const EPS_SPAN: f64 = 1e-8;

/// Gram–Schmidt pivot floor: probes must be independent beyond this.
pub const PIVOT_FLOOR: f64 = 1e-10;

/// Thresholds the verdict logic runs on.
#[derive(Debug, Clone, Copy)]
pub struct VerifierSettings {
    /// Eigenvalues of the compressed `D` with `|lambda| <= eps_ker` count as
    /// kernel.
    pub eps_ker: f64,
    /// Tail coefficients at or below this magnitude support mixing.
    pub eps_mix: f64,
    /// Tail coefficients at or above this magnitude witness non-mixing.
    pub eps_witness: f64,
}

impl Default for VerifierSettings {
    fn default() -> Self {
        VerifierSettings { eps_ker: 1e-6, eps_mix: 1e-8, eps_witness: 1e-3 }
    }
}

/// The estimated limit operator compressed to the orthonormalized probe
/// span, with its spectral split.
#[derive(Debug, Clone)]
pub struct CompressedD {
    pub digest: String,
    pub ids: Vec<String>,
    /// `M_ab = <q_a, D q_b>` after exact symmetrization.
    pub matrix: DMatrix<C64>,
    /// `|M - M^*|` before symmetrization.
    pub hermiticity: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
    pub eps_ker: f64,
    /// Indices into `eigenvalues` with `|lambda| <= eps_ker`.
    pub kernel: Vec<usize>,
    /// Upper-triangular coordinates: `phi_i = sum_a q_a R[(a, i)]`.
    probe_coords: DMatrix<C64>,
}

impl CompressedD {
    pub fn span_dim(&self) -> usize {
        self.ids.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// Norm of the kernel component of (normalized) probe `i`; small means
    /// the probe lies in the co-kernel span.
    pub fn kernel_component(&self, i: usize) -> f64 {
        let m = self.span_dim();
        let y = self.probe_coords.column(i);
        let ny = y.norm();
        let z = self.eigenvectors.adjoint() * y;
        let mut acc = 0.0;
        for &k in &self.kernel {
            acc += z[k].norm_sqr();
        }
        debug_assert!(self.kernel.len() <= m);
        if ny == 0.0 {
            0.0
        } else {
            acc.sqrt() / ny
        }
    }
}

/// Orthonormalizes the probes, pushes the estimated limits through the same
/// combination, and diagonalizes the resulting span matrix.
pub fn compress_d<S: MixingSpace>(
    space: &S,
    est: &LimitEstimate<S::V>,
    digest: &str,
    eps_ker: f64,
) -> Result<CompressedD> {
    let probes = space.probes();
    let ids = space.probe_ids().to_vec();
    let m = probes.len();
    if m == 0 || est.traces.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} probes against {} limit traces",
            m,
            est.traces.len()
        )));
    }
    let one = C64::new(1.0, 0.0);

    // modified Gram–Schmidt, applied in lockstep to probes and their limits
    let mut q: Vec<S::V> = Vec::with_capacity(m);
    let mut dq: Vec<S::V> = Vec::with_capacity(m);
    let mut coords = DMatrix::<C64>::zeros(m, m);
    for i in 0..m {
        let mut v = probes[i].clone();
        let mut dv = est.traces[i].limit.clone();
        for a in 0..q.len() {
            let c = space.inner(&q[a], &v);
            coords[(a, i)] = c;
            v = space.lincomb(&[(one, &v), (-c, &q[a])])?;
            dv = space.lincomb(&[(one, &dv), (-c, &dq[a])])?;
        }
        let pivot = space.norm(&v);
        if pivot <= PIVOT_FLOOR {
            return Err(Error::DegenerateProbes { index: i, pivot });
        }
        coords[(i, i)] = C64::new(pivot, 0.0);
        let inv = C64::new(1.0 / pivot, 0.0);
        q.push(space.lincomb(&[(inv, &v)])?);
        dq.push(space.lincomb(&[(inv, &dv)])?);
    }

    let mut mat = DMatrix::<C64>::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            mat[(a, b)] = space.inner(&q[a], &dq[b]);
        }
    }
    let hermiticity = max_norm(&(&mat - mat.adjoint()));
    let sym = Operator::hermitian((&mat + mat.adjoint()).map(|z| z * 0.5), "D|span")?;
    let spec = sym.spectral()?;
    let kernel: Vec<usize> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.abs() <= eps_ker)
        .map(|(k, _)| k)
        .collect();

    Ok(CompressedD {
        digest: digest.to_string(),
        ids,
        matrix: sym.matrix().clone(),
        hermiticity,
        eigenvalues: spec.eigenvalues.clone(),
        eigenvectors: spec.basis.clone(),
        eps_ker,
        kernel,
        probe_coords: coords,
    })
}

/// One decay observation: the certified pair is `(D phi_i, psi_k)`; the raw
/// pair `(phi_i, psi_k)` feeds the witness logic.
#[derive(Debug, Clone)]
pub struct DecayRow {
    /// 1-based net position.
    pub j: usize,
    pub ell: f64,
    pub phi: String,
    pub psi: String,
    /// `|<D phi_i, U(x_j) psi_k>|`
    pub coeff_abs: f64,
    /// `dev_j(i) + (|A phi_i| + |A psi_k|) / l_j`, with `dev_j` the distance
    /// from the j-th sample to the estimated limit.
    pub bound: f64,
    /// `|<phi_i, U(x_j) psi_k>|`
    pub raw_abs: f64,
    /// truncation clip when translating `psi_k` by `x_j`
    pub loss: f64,
}

#[derive(Debug, Clone)]
pub struct DecaySet {
    pub digest: String,
    pub rows: Vec<DecayRow>,
    pub net_len: usize,
    pub pair_count: usize,
}

/// Certified bound for a single `(probe, psi, j)` triple.
pub fn certified_bound<S: MixingSpace>(
    space: &S,
    est: &LimitEstimate<S::V>,
    phi_index: usize,
    psi_index: usize,
    j: usize,
) -> Result<f64> {
    let probes = space.probes();
    let dev = est.traces[phi_index].deviations[j];
    let a_phi = space.norm(&space.conjugate_apply(&probes[phi_index])?);
    let a_psi = space.norm(&space.conjugate_apply(&probes[psi_index])?);
    let psi_norm = space.norm(&probes[psi_index]);
    let phi_norm = space.norm(&probes[phi_index]);
    Ok(dev * psi_norm + (a_phi * psi_norm + phi_norm * a_psi) / space.net().lengths[j])
}

/// Tabulates `|<D phi, U(x_j) psi>|` against the certified bound and the raw
/// coefficients for every probe pair and net point.
pub fn decay_table<S: MixingSpace>(
    space: &S,
    est: &LimitEstimate<S::V>,
    digest: &str,
) -> Result<DecaySet> {
    let probes = space.probes();
    let ids = space.probe_ids();
    let m = probes.len();
    let net_len = space.net().len();

    // |A phi| per probe, shared across pairs
    let mut a_norms = Vec::with_capacity(m);
    let mut norms = Vec::with_capacity(m);
    for p in probes {
        a_norms.push(space.norm(&space.conjugate_apply(p)?));
        norms.push(space.norm(p));
    }

    let pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..m).map(move |k| (i, k))).collect();
    let chunks = parallel::try_map(&pairs, |&(i, k)| {
        let mut rows = Vec::with_capacity(net_len);
        for j in 0..net_len {
            let ell = space.net().lengths[j];
            let coeff_abs = space
                .coefficient(&est.traces[i].limit, j, &probes[k])?
                .norm();
            let raw_abs = space.coefficient(&probes[i], j, &probes[k])?.norm();
            let bound = est.traces[i].deviations[j] * norms[k]
                + (a_norms[i] * norms[k] + norms[i] * a_norms[k]) / ell;
            let loss = space.translate_loss(j, &probes[k])?;
            rows.push(DecayRow {
                j: j + 1,
                ell,
                phi: ids[i].clone(),
                psi: ids[k].clone(),
                coeff_abs,
                bound,
                raw_abs,
                loss,
            });
        }
        Ok(rows)
    })?;

    Ok(DecaySet {
        digest: digest.to_string(),
        rows: chunks.into_iter().flatten().collect(),
        net_len,
        pair_count: m * m,
    })
}

/// Verdict for one probe pair or a whole scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    MixingAlongNet,
    NonMixingWitness,
    NoConclusion,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::MixingAlongNet => "mixing-along-net",
            Verdict::NonMixingWitness => "non-mixing-witness",
            Verdict::NoConclusion => "no-conclusion",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PairVerdict {
    pub phi: String,
    pub psi: String,
    pub verdict: Verdict,
    pub tail_raw_max: f64,
    pub tail_raw_min: f64,
    /// Kernel component of the phi-side probe.
    pub kernel_component: f64,
}

/// Applies the decision rules pair by pair. All inputs must carry the same
/// scenario digest.
pub fn verdict(
    compressed: &CompressedD,
    decay: &DecaySet,
    converged_all: bool,
    tail: usize,
    settings: &VerifierSettings,
) -> Result<(Vec<PairVerdict>, Verdict)> {
    if compressed.digest != decay.digest {
        return Err(Error::DigestMismatch {
            a: compressed.digest.clone(),
            b: decay.digest.clone(),
        });
    }
    let m = compressed.ids.len();
    let net_len = decay.net_len;
    if decay.rows.len() != m * m * net_len {
        return Err(Error::DimensionMismatch(format!(
            "decay table has {} rows, expected {}",
            decay.rows.len(),
            m * m * net_len
        )));
    }
    let tail = tail.min(net_len);
    let mut pairs = Vec::with_capacity(m * m);
    for i in 0..m {
        let kc = compressed.kernel_component(i);
        for k in 0..m {
            let base = (i * m + k) * net_len;
            let tail_rows = &decay.rows[base + net_len - tail..base + net_len];
            let tail_raw_max =
                tail_rows.iter().map(|r| r.raw_abs).fold(0.0f64, f64::max);
            let tail_raw_min =
                tail_rows.iter().map(|r| r.raw_abs).fold(f64::INFINITY, f64::min);
            let verdict = if tail_raw_min >= settings.eps_witness {
                Verdict::NonMixingWitness
            } else if converged_all && kc <= EPS_SPAN && tail_raw_max <= settings.eps_mix {
                Verdict::MixingAlongNet
            } else {
                Verdict::NoConclusion
            };
            pairs.push(PairVerdict {
                phi: compressed.ids[i].clone(),
                psi: compressed.ids[k].clone(),
                verdict,
                tail_raw_max,
                tail_raw_min,
                kernel_component: kc,
            });
        }
    }
    let overall = if pairs.iter().any(|p| p.verdict == Verdict::NonMixingWitness) {
        Verdict::NonMixingWitness
    } else if !pairs.is_empty() && pairs.iter().all(|p| p.verdict == Verdict::MixingAlongNet) {
        Verdict::MixingAlongNet
    } else {
        Verdict::NoConclusion
    };
    Ok((pairs, overall))
}

/// Convergence-residual row for rendering.
#[derive(Debug, Clone)]
pub struct DjRow {
    pub j: usize,
    pub ell: f64,
    pub probe: String,
    pub residual: f64,
}

/// Full certification record for one scenario run.
#[derive(Debug, Clone)]
pub struct MixingReport {
    pub digest: String,
    pub net_lengths: Vec<f64>,
    pub span_dim: usize,
    pub hermiticity: f64,
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    pub converged_all: bool,
    /// `(probe id, converged, last residual before the final point)`
    pub probe_convergence: Vec<(String, bool, f64)>,
    pub dj_rows: Vec<DjRow>,
    pub decay: DecaySet,
    pub pair_verdicts: Vec<PairVerdict>,
    pub overall: Verdict,
    /// Max truncation clip observed anywhere in the decay table.
    pub boundary_loss: f64,
    /// `(center, max |lambda - center|)` when the spectrum clusters at one
    /// point within 1e-6.
    pub cluster: Option<(f64, f64)>,
    /// 2-norm of the conjugate operator for dense scenarios.
    pub conjugate_norm: Option<f64>,
    pub eps_conv: f64,
    pub tail: usize,
    pub richardson: bool,
    pub eps_ker: f64,
    pub eps_mix: f64,
    pub eps_witness: f64,
}

/// Detects a single-point spectral cluster (width 1e-6), snapping the
/// center to an integer when it is within 1e-6 of one.
pub fn spectral_cluster(eigenvalues: &[f64]) -> Option<(f64, f64)> {
    if eigenvalues.is_empty() {
        return None;
    }
    let mid = eigenvalues[eigenvalues.len() / 2];
    let center = if (mid - mid.round()).abs() <= 1e-6 { mid.round() } else { mid };
    let spread = eigenvalues
        .iter()
        .map(|l| (l - center).abs())
        .fold(0.0f64, f64::max);
    if spread <= 1e-6 {
        Some((center, spread))
    } else {
        None
    }
}

/// Runs the whole verification stage on a finished limit estimate.
pub fn assemble_report<S: MixingSpace>(
    space: &S,
    est: &LimitEstimate<S::V>,
    digest: &str,
    settings: &VerifierSettings,
    conjugate_norm: Option<f64>,
) -> Result<MixingReport> {
    let compressed = compress_d(space, est, digest, settings.eps_ker)?;
    let decay = decay_table(space, est, digest)?;
    let (pair_verdicts, overall) = verdict(
        &compressed,
        &decay,
        est.converged_all,
        est.settings.tail,
        settings,
    )?;

    let net_len = space.net().len();
    let mut dj_rows = Vec::with_capacity(est.traces.len() * net_len);
    for t in &est.traces {
        for j in 0..net_len {
            dj_rows.push(DjRow {
                j: j + 1,
                ell: space.net().lengths[j],
                probe: t.id.clone(),
                residual: t.residuals[j],
            });
        }
    }
    let probe_convergence = est
        .traces
        .iter()
        .map(|t| (t.id.clone(), t.converged, t.residuals[net_len - 2]))
        .collect();
    let boundary_loss = decay.rows.iter().map(|r| r.loss).fold(0.0f64, f64::max);
    let cluster = spectral_cluster(&compressed.eigenvalues);

    Ok(MixingReport {
        digest: digest.to_string(),
        net_lengths: space.net().lengths.clone(),
        span_dim: compressed.span_dim(),
        hermiticity: compressed.hermiticity,
        eigenvalues: compressed.eigenvalues.clone(),
        kernel_dim: compressed.kernel_dim(),
        converged_all: est.converged_all,
        probe_convergence,
        dj_rows,
        decay,
        pair_verdicts,
        overall,
        boundary_loss,
        cluster,
        conjugate_norm,
        eps_conv: est.settings.eps_conv,
        tail: est.settings.tail,
        richardson: est.settings.richardson,
        eps_ker: settings.eps_ker,
        eps_mix: settings.eps_mix,
        eps_witness: settings.eps_witness,
    })
}
