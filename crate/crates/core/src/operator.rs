//! Dense operators on finite-dimensional Hilbert spaces.
//!
//! Every spectral function (unitary exponential, resolvent, regularized
//! commutator approximant) routes through one Hermitian eigendecomposition
//! with a reconstruction guard, so a failed factorization can never leak
//! silently into a certification report.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Tolerance for declared structure flags (hermitian/unitary), scaled by
/// `1 + max_norm`.
pub const FLAG_TOL: f64 = 1e-12;
/// Pairwise commutation tolerance for flow generator families.
pub const COMMUTE_TOL: f64 = 1e-10;
/// Reconstruction allowance for the eigensolver, scaled by `n (1 + |M|)`.
/// Clustered spectra legitimately cost a few orders over machine epsilon;
/// the guard only has to catch structural misuse, which lands far above.
pub const EIGEN_TOL: f64 = 1e-10;
/// Minimal distance from a resolvent point to the spectrum.
pub const RESOLVENT_GAP: f64 = 1e-8;

/// Eigendata of a Hermitian operator: real eigenvalues ascending, columns of
/// `basis` the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: DMatrix<C64>,
}

impl SpectralDecomposition {
    /// Builds `V f(Lambda) V^*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let n = self.eigenvalues.len();
        let mut scaled = self.basis.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let flam = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= flam;
            }
        }
        &scaled * self.basis.adjoint()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Entrywise max-modulus norm.
pub fn max_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// A dense operator with validated structure flags.
#[derive(Debug, Clone)]
pub struct Operator {
    mat: DMatrix<C64>,
    hermitian: bool,
    unitary: bool,
    tag: String,
    spectral: OnceLock<Arc<SpectralDecomposition>>,
}

impl Operator {
    /// Wraps a matrix with no structure claims.
    pub fn general(mat: DMatrix<C64>, tag: impl Into<String>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Operator { mat, hermitian: false, unitary: false, tag: tag.into(), spectral: OnceLock::new() })
    }

    /// Validates `M = M^*` within `FLAG_TOL`, then symmetrizes exactly so the
    /// flag is true in arithmetic, not only up to tolerance.
    pub fn hermitian(mat: DMatrix<C64>, tag: impl Into<String>) -> Result<Self> {
        let mut op = Operator::general(mat, tag)?;
        let scale = 1.0 + max_norm(&op.mat);
        let dev = max_norm(&(&op.mat - op.mat.adjoint()));
        if dev > FLAG_TOL * scale {
            return Err(Error::FlagViolated(format!(
                "'{}' declared hermitian, |M - M*| = {dev:.3e}",
                op.tag
            )));
        }
        op.mat = (&op.mat + op.mat.adjoint()).map(|z| z * 0.5);
        op.hermitian = true;
        Ok(op)
    }

    /// Validates `M^* M = I` within `FLAG_TOL`.
    pub fn unitary(mat: DMatrix<C64>, tag: impl Into<String>) -> Result<Self> {
        let op = Operator::general(mat, tag)?;
        let n = op.dim();
        let dev = max_norm(&(op.mat.adjoint() * &op.mat - DMatrix::<C64>::identity(n, n)));
        if dev > FLAG_TOL * n as f64 {
            return Err(Error::FlagViolated(format!(
                "'{}' declared unitary, |M*M - I| = {dev:.3e}",
                op.tag
            )));
        }
        Ok(Operator { unitary: true, ..op })
    }

    pub fn identity(n: usize) -> Self {
        Operator {
            mat: DMatrix::identity(n, n),
            hermitian: true,
            unitary: true,
            tag: "I".into(),
            spectral: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "'{}' is {}-dim, '{}' is {}-dim",
                self.tag,
                self.dim(),
                other.tag,
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        let mut op = Operator::general(&self.mat * &other.mat, format!("{}·{}", self.tag, other.tag))?;
        op.unitary = self.unitary && other.unitary;
        Ok(op)
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        let mut op = Operator::general(&self.mat + &other.mat, format!("{}+{}", self.tag, other.tag))?;
        op.hermitian = self.hermitian && other.hermitian;
        Ok(op)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        let mut op = Operator::general(&self.mat - &other.mat, format!("{}-{}", self.tag, other.tag))?;
        op.hermitian = self.hermitian && other.hermitian;
        Ok(op)
    }

    pub fn scale(&self, c: C64) -> Operator {
        let mut op = Operator::general(self.mat.map(|z| z * c), self.tag.clone()).unwrap();
        op.hermitian = self.hermitian && c.im == 0.0;
        op
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            mat: self.mat.adjoint(),
            hermitian: self.hermitian,
            unitary: self.unitary,
            tag: format!("{}*", self.tag),
            spectral: OnceLock::new(),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {}-dim operator '{}'",
                v.len(),
                self.dim(),
                self.tag
            )));
        }
        Ok(&self.mat * v)
    }

    pub fn max_norm(&self) -> f64 {
        max_norm(&self.mat)
    }

    /// Operator 2-norm. Hermitian: spectral radius. General: largest singular
    /// value via the Hermitian square.
    pub fn two_norm(&self) -> Result<f64> {
        if self.hermitian {
            let s = self.spectral()?;
            Ok(s.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs())))
        } else {
            let sq = Operator::hermitian(self.mat.adjoint() * &self.mat, format!("{}*{}", self.tag, self.tag))?;
            let s = sq.spectral()?;
            Ok(s.max_eigenvalue().max(0.0).sqrt())
        }
    }

    /// Memoized guarded eigendecomposition; Hermitian operators only.
    pub fn spectral(&self) -> Result<Arc<SpectralDecomposition>> {
        if !self.hermitian {
            return Err(Error::Unsupported(format!(
                "spectral decomposition of non-hermitian operator '{}'",
                self.tag
            )));
        }
        if let Some(s) = self.spectral.get() {
            return Ok(s.clone());
        }
        let n = self.dim();
        let eig = self.mat.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut basis = DMatrix::<C64>::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            basis.set_column(col, &eig.eigenvectors.column(i));
        }
        let decomp = SpectralDecomposition { eigenvalues, basis };
        let recon = decomp.apply_function(|l| C64::new(l, 0.0));
        let residual = max_norm(&(&recon - &self.mat));
        let limit = n as f64 * EIGEN_TOL * (1.0 + self.max_norm());
        if residual > limit {
            return Err(Error::SpectralGuard { residual, limit });
        }
        let arc = Arc::new(decomp);
        let _ = self.spectral.set(arc.clone());
        Ok(self.spectral.get().unwrap().clone())
    }

    /// `V f(Lambda) V^*` with explicit result flags.
    pub fn map_spectrum(
        &self,
        f: impl Fn(f64) -> C64,
        tag: impl Into<String>,
        hermitian: bool,
        unitary: bool,
    ) -> Result<Operator> {
        let s = self.spectral()?;
        let mat = s.apply_function(f);
        let mut op = Operator::general(mat, tag)?;
        if hermitian {
            // re-validate rather than trust the caller
            op = Operator::hermitian(op.mat, op.tag)?;
        }
        op.unitary = unitary;
        Ok(op)
    }
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    let mut c = ab.sub(&ba)?;
    c.tag = format!("[{},{}]", a.tag(), b.tag());
    c.hermitian = false;
    c.unitary = false;
    Ok(c)
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_exp(h: &Operator, t: f64) -> Result<Operator> {
    if !h.is_hermitian() {
        return Err(Error::Unsupported(format!(
            "unitary exponential of non-hermitian '{}'",
            h.tag()
        )));
    }
    let op = h.map_spectrum(
        |l| (C64::new(0.0, -t * l)).exp(),
        format!("exp(-i{t}·{})", h.tag()),
        false,
        true,
    )?;
    Ok(op)
}

/// `U^n` by binary powering; negative powers use the adjoint.
pub fn unitary_power(u: &Operator, n: i64) -> Result<Operator> {
    if !u.is_unitary() {
        return Err(Error::Unsupported(format!("power of non-unitary '{}'", u.tag())));
    }
    let dim = u.dim();
    if n == 0 {
        return Ok(Operator::identity(dim));
    }
    let mut base = if n < 0 { u.adjoint() } else { u.clone() };
    let mut reps = n.unsigned_abs();
    let mut acc: Option<Operator> = None;
    while reps > 0 {
        if reps & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.mul(&base)?,
            });
        }
        reps >>= 1;
        if reps > 0 {
            base = base.mul(&base)?;
        }
    }
    let mut out = acc.unwrap();
    out.tag = format!("{}^{}", u.tag(), n);
    out.unitary = true;
    Ok(out)
}

/// Conjugation flow `W_t(S) = exp(itA) S exp(-itA)`.
pub fn conjugation_flow(s: &Operator, a: &Operator, t: f64) -> Result<Operator> {
    let left = unitary_exp(a, -t)?;
    let right = unitary_exp(a, t)?;
    let prod = left.mul(s)?.mul(&right)?;
    let tag = format!("W_{t}({})", s.tag());
    let mut out = if s.is_hermitian() {
        Operator::hermitian(prod.mat, tag)?
    } else {
        prod.with_tag(tag)
    };
    out.unitary = s.is_unitary();
    Ok(out)
}

/// Bounded approximant `A_eps = (exp(i eps A) - 1) / (i eps)`.
pub fn a_epsilon(a: &Operator, eps: f64) -> Result<Operator> {
    if eps == 0.0 {
        return Err(Error::Unsupported("a_epsilon at eps = 0".into()));
    }
    a.map_spectrum(
        |l| ((C64::new(0.0, eps * l)).exp() - C64::new(1.0, 0.0)) / C64::new(0.0, eps),
        format!("A_eps({eps})"),
        false,
        false,
    )
}

/// `(H - z)^-1` with a spectral-gap guard.
pub fn resolvent(h: &Operator, z: C64) -> Result<Operator> {
    let s = h.spectral()?;
    let gap = s
        .eigenvalues
        .iter()
        .map(|&l| (C64::new(l, 0.0) - z).norm())
        .fold(f64::INFINITY, f64::min);
    if gap < RESOLVENT_GAP {
        return Err(Error::SingularResolvent { gap });
    }
    h.map_spectrum(
        |l| C64::new(1.0, 0.0) / (C64::new(l, 0.0) - z),
        format!("({}-z)^-1", h.tag()),
        false,
        false,
    )
}

/// One row of a regularized-commutator convergence check.
#[derive(Debug, Clone)]
pub struct Com1Row {
    pub eps: f64,
    pub residual: f64,
    pub ratio: f64,
}

/// Result of `check_com1`: the residual `r(eps)` must shrink linearly, i.e.
/// `r(eps)/eps` stays within a factor of 2 across the scanned epsilons.
#[derive(Debug, Clone)]
pub struct Com1Report {
    pub rows: Vec<Com1Row>,
    pub stable: bool,
    pub c_estimate: f64,
}

/// Compares `[iS, A_eps]` against `[iS, A]` over a list of epsilons.
pub fn check_com1(s: &Operator, a: &Operator, eps_list: &[f64]) -> Result<Com1Report> {
    if eps_list.is_empty() {
        return Err(Error::Unsupported("check_com1 with no epsilons".into()));
    }
    let i = C64::new(0.0, 1.0);
    let target = commutator(&s.scale(i), a)?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let aeps = a_epsilon(a, eps)?;
        let approx = commutator(&s.scale(i), &aeps)?;
        let residual = approx.sub(&target)?.max_norm();
        rows.push(Com1Row { eps, residual, ratio: residual / eps });
    }
    // commuting pair: residuals at rounding level, slope is meaningless
    let tiny = rows.iter().all(|r| r.residual < 1e-13);
    let (stable, c_estimate) = if tiny {
        (true, 0.0)
    } else {
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        (lo > 0.0 && hi / lo <= 2.0, hi)
    };
    Ok(Com1Report { rows, stable, c_estimate })
}

/// Residual of the resolvent commutation identity
/// `[(H-z)^-1, A] = -(H-z)^-1 [H, A] (H-z)^-1`.
pub fn check_com2(h: &Operator, a: &Operator, z: C64) -> Result<f64> {
    let r = resolvent(h, z)?;
    let lhs = commutator(&r, a)?;
    let rhs = r.mul(&commutator(h, a)?)?.mul(&r)?.scale(C64::new(-1.0, 0.0));
    Ok(lhs.sub(&rhs)?.max_norm())
}

/// `Pi(H) = (H_1 + i)^-1 ... (H_d + i)^-1` for pairwise commuting Hermitian
/// `H_k`; the commutation check makes the ordering immaterial.
pub fn pi_of_h(hs: &[Operator]) -> Result<Operator> {
    if hs.is_empty() {
        return Err(Error::Unsupported("pi_of_h on empty family".into()));
    }
    for h in hs {
        if !h.is_hermitian() {
            return Err(Error::Unsupported(format!(
                "pi_of_h needs hermitian generators, '{}' is not",
                h.tag()
            )));
        }
    }
    for i in 0..hs.len() {
        for j in (i + 1)..hs.len() {
            let scale = 1.0 + hs[i].max_norm() * hs[j].max_norm();
            let residual = commutator(&hs[i], &hs[j])?.max_norm();
            if residual > COMMUTE_TOL * scale {
                return Err(Error::NonCommuting { i, j, residual });
            }
        }
    }
    let z = C64::new(0.0, -1.0); // (H + i)^-1 = (H - (-i))^-1
    let mut acc = resolvent(&hs[0], z)?;
    for h in &hs[1..] {
        acc = acc.mul(&resolvent(h, z)?)?;
    }
    Ok(acc.with_tag("Pi(H)"))
}

/// Seeded Hermitian matrix with entries of modulus O(1), normalized to unit
/// 2-norm.
pub fn random_hermitian(dim: usize, seed: u64) -> Result<Operator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        }
    }
    let sym = (&m + m.adjoint()).map(|z| z * 0.5);
    let op = Operator::hermitian(sym, format!("H(seed={seed})"))?;
    let norm = op.two_norm()?;
    if norm == 0.0 {
        return Ok(op);
    }
    Operator::hermitian(op.matrix().map(|z| z / norm), format!("H(seed={seed})"))
}

/// Seeded unitary `exp(-i H)` with `H` as above.
pub fn random_unitary(dim: usize, seed: u64) -> Result<Operator> {
    let h = random_hermitian(dim, seed)?;
    let u = unitary_exp(&h, 1.0)?;
    Ok(u.with_tag(format!("U(seed={seed})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat2(a: C64, b: C64, c: C64, d: C64) -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn hermitian_flag_is_enforced() {
        let good = mat2(re(1.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), re(2.0));
        assert!(Operator::hermitian(good, "h").is_ok());
        let bad = mat2(re(1.0), re(1.0), re(0.0), re(1.0));
        assert!(matches!(Operator::hermitian(bad, "h"), Err(Error::FlagViolated(_))));
    }

    #[test]
    fn commutator_of_pauli_matrices() {
        // [sx, sy] = 2i sz
        let sx = Operator::hermitian(mat2(re(0.0), re(1.0), re(1.0), re(0.0)), "sx").unwrap();
        let sy = Operator::hermitian(
            mat2(re(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), re(0.0)),
            "sy",
        )
        .unwrap();
        let c = commutator(&sx, &sy).unwrap();
        let expected = mat2(C64::new(0.0, 2.0), re(0.0), re(0.0), C64::new(0.0, -2.0));
        assert!(max_norm(&(c.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn spectral_reconstructs_and_sorts() {
        let h = random_hermitian(8, 5).unwrap();
        let s = h.spectral().unwrap();
        for w in s.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let recon = s.apply_function(re);
        assert!(max_norm(&(&recon - h.matrix())) < 1e-12);
    }

    #[test]
    fn exp_of_diagonal_is_entrywise() {
        let h = Operator::hermitian(mat2(re(1.0), re(0.0), re(0.0), re(-2.0)), "h").unwrap();
        let u = unitary_exp(&h, 0.5).unwrap();
        let want = mat2(
            (C64::new(0.0, -0.5)).exp(),
            re(0.0),
            re(0.0),
            (C64::new(0.0, 1.0)).exp(),
        );
        assert!(max_norm(&(u.matrix() - want)) < 1e-15);
        assert!(u.is_unitary());
    }

    #[test]
    fn unitary_power_matches_scaled_exponent() {
        let u = random_unitary(6, 11).unwrap();
        let h = random_hermitian(6, 11).unwrap();
        let u5 = unitary_power(&u, 5).unwrap();
        let direct = unitary_exp(&h, 5.0).unwrap();
        assert!(max_norm(&(u5.matrix() - direct.matrix())) < 1e-12);
        let um3 = unitary_power(&u, -3).unwrap();
        let direct = unitary_exp(&h, -3.0).unwrap();
        assert!(max_norm(&(um3.matrix() - direct.matrix())) < 1e-12);
    }

    #[test]
    fn resolvent_matches_inverse() {
        let h = random_hermitian(5, 3).unwrap();
        let z = C64::new(0.0, -1.0);
        let r = resolvent(&h, z).unwrap();
        let n = h.dim();
        let prod = (h.matrix() - DMatrix::<C64>::identity(n, n).map(|e| e * z)) * r.matrix();
        assert!(max_norm(&(&prod - DMatrix::<C64>::identity(n, n))) < 1e-12);
    }

    #[test]
    fn resolvent_on_spectrum_is_refused() {
        let h = Operator::hermitian(mat2(re(1.0), re(0.0), re(0.0), re(2.0)), "h").unwrap();
        assert!(matches!(
            resolvent(&h, re(1.0)),
            Err(Error::SingularResolvent { .. })
        ));
    }

    #[test]
    fn a_epsilon_converges_linearly() {
        let a = random_hermitian(6, 9).unwrap();
        let s = random_hermitian(6, 10).unwrap();
        let rep = check_com1(&s, &a, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
        assert!(rep.stable, "ratios: {:?}", rep.rows);
        // residual itself must shrink by ~10x per step
        for w in rep.rows.windows(2) {
            assert!(w[1].residual < w[0].residual * 0.2);
        }
    }

    #[test]
    fn com1_short_circuits_commuting_pair() {
        let a = random_hermitian(4, 2).unwrap();
        let rep = check_com1(&a, &a, &[1e-1, 1e-2]).unwrap();
        assert!(rep.stable);
        assert_eq!(rep.c_estimate, 0.0);
    }

    #[test]
    fn com2_identity_holds() {
        let h = random_hermitian(7, 20).unwrap();
        let a = random_hermitian(7, 21).unwrap();
        let r = check_com2(&h, &a, C64::new(0.0, -1.0)).unwrap();
        assert!(r < 1e-13, "residual {r}");
    }

    #[test]
    fn pi_rejects_noncommuting_family() {
        let h1 = random_hermitian(4, 30).unwrap();
        let h2 = random_hermitian(4, 31).unwrap();
        assert!(matches!(
            pi_of_h(&[h1, h2]),
            Err(Error::NonCommuting { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn pi_of_commuting_diagonals() {
        let h1 = Operator::hermitian(mat2(re(1.0), re(0.0), re(0.0), re(2.0)), "h1").unwrap();
        let h2 = Operator::hermitian(mat2(re(-1.0), re(0.0), re(0.0), re(3.0)), "h2").unwrap();
        let p = pi_of_h(&[h1, h2]).unwrap();
        let one = re(1.0);
        let want = mat2(
            one / (re(1.0) + C64::i()) * (one / (re(-1.0) + C64::i())),
            re(0.0),
            re(0.0),
            one / (re(2.0) + C64::i()) * (one / (re(3.0) + C64::i())),
        );
        assert!(max_norm(&(p.matrix() - want)) < 1e-14);
    }

    #[test]
    fn conjugation_flow_preserves_hermiticity() {
        let s = random_hermitian(5, 40).unwrap();
        let a = random_hermitian(5, 41).unwrap();
        let w = conjugation_flow(&s, &a, 0.7).unwrap();
        assert!(w.is_hermitian());
        let dev = max_norm(&(w.matrix() - &w.matrix().adjoint()));
        assert!(dev < 1e-12);
        // flow preserves the spectrum: check trace of squares
        let t1: C64 = (s.matrix() * s.matrix()).trace();
        let t2: C64 = (w.matrix() * w.matrix()).trace();
        assert!((t1 - t2).norm() < 1e-12);
    }

    #[test]
    fn two_norm_of_known_matrix() {
        let m = Operator::general(mat2(re(0.0), re(3.0), re(0.0), re(0.0)), "n").unwrap();
        assert!((m.two_norm().unwrap() - 3.0).abs() < 1e-13);
    }
}
