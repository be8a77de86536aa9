//! Left regular representation on a truncated group ball, plus the dense
//! flow representation of `R^d`.
//!
//! Sparse probe vectors live on `{ l(g) <= R }`. Translations, the length
//! multiplier and the normalized commutator have closed forms there; every
//! operation that would be clipped by the truncation either reports the
//! dropped mass or refuses outright (safe-core precondition), so results
//! inside the safe core are exact.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{DivergentNet, GroupElement, GroupKind, GroupSpec, LengthFunction};
use crate::operator::{commutator, Operator, C64, COMMUTE_TOL};

/// Truncated carrier `l^2({ base length <= radius })` of the left regular
/// representation. The ball is never materialized; membership is tested by
/// length.
#[derive(Debug, Clone)]
pub struct RegularSpace {
    spec: GroupSpec,
    length: LengthFunction,
    radius: f64,
}

/// Membership slack for float-valued base lengths.
const BALL_TOL: f64 = 1e-9;

impl RegularSpace {
    pub fn new(length: LengthFunction, radius: f64) -> Result<Self> {
        let spec = *length.spec();
        if matches!(spec.kind, GroupKind::Euclidean { .. }) {
            return Err(Error::Unsupported(
                "regular representation on a continuous group".into(),
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::InfeasibleRadius { requested: radius, minimal: 1.0 });
        }
        Ok(RegularSpace { spec, length, radius })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn length(&self) -> &LengthFunction {
        &self.length
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, g: &GroupElement) -> Result<bool> {
        Ok(self.length.base_eval(g)? <= self.radius + BALL_TOL)
    }

    /// Ball basis in canonical order; feasible for small radii only.
    pub fn ball_basis(&self) -> Result<Vec<GroupElement>> {
        let r = self.radius.floor() as u64;
        let all = self.spec.enumerate_ball(r)?;
        // adapters may shrink the word ball
        let mut out = Vec::with_capacity(all.len());
        for g in all {
            if self.contains(&g)? {
                out.push(g);
            }
        }
        Ok(out)
    }
}

/// Largest admissible probe support radius so that every net translate stays
/// inside the ball.
pub fn safe_core_radius(space: &RegularSpace, net: &DivergentNet) -> Result<f64> {
    let mut reach = 0.0f64;
    for x in &net.elements {
        reach = reach.max(space.length().base_eval(x)?);
    }
    let core = space.radius() - reach;
    if core < 0.0 {
        return Err(Error::InfeasibleRadius {
            requested: space.radius(),
            minimal: reach,
        });
    }
    Ok(core)
}

/// Finitely supported vector on the truncated ball. Inner products are
/// conjugate-linear in the first argument. Exact zeros are pruned so the
/// support (and its radius) is meaningful.
#[derive(Debug, Clone)]
pub struct ProbeVector {
    entries: BTreeMap<GroupElement, C64>,
    support_radius: f64,
}

impl ProbeVector {
    fn from_map(space: &RegularSpace, entries: BTreeMap<GroupElement, C64>) -> Result<Self> {
        let mut radius = 0.0f64;
        for g in entries.keys() {
            if !space.contains(g)? {
                return Err(Error::GroupMismatch(format!(
                    "support point {g} outside the radius-{} ball",
                    space.radius()
                )));
            }
            radius = radius.max(space.length().base_eval(g)?);
        }
        Ok(ProbeVector { entries, support_radius: radius })
    }

    pub fn zero() -> Self {
        ProbeVector { entries: BTreeMap::new(), support_radius: 0.0 }
    }

    pub fn delta(space: &RegularSpace, g: GroupElement) -> Result<Self> {
        space.spec().validate(&g)?;
        let mut m = BTreeMap::new();
        m.insert(g, C64::new(1.0, 0.0));
        Self::from_map(space, m)
    }

    /// Normalized indicator of the radius-`r` ball.
    pub fn ball_indicator(space: &RegularSpace, r: u64) -> Result<Self> {
        let mut m = BTreeMap::new();
        for g in space.spec().enumerate_ball(r)? {
            if space.contains(&g)? {
                m.insert(g, C64::new(1.0, 0.0));
            }
        }
        let mut v = Self::from_map(space, m)?;
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::GroupMismatch("empty ball indicator".into()));
        }
        v.scale_mut(C64::new(1.0 / n, 0.0));
        Ok(v)
    }

    pub fn from_entries(
        space: &RegularSpace,
        entries: impl IntoIterator<Item = (GroupElement, C64)>,
    ) -> Result<Self> {
        let mut m = BTreeMap::new();
        for (g, a) in entries {
            space.spec().validate(&g)?;
            if m.insert(g, a).is_some() {
                return Err(Error::GroupMismatch("duplicate support point".into()));
            }
        }
        m.retain(|_, a| *a != C64::new(0.0, 0.0));
        Self::from_map(space, m)
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &C64)> {
        self.entries.iter()
    }

    pub fn coeff(&self, g: &GroupElement) -> C64 {
        self.entries.get(g).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &ProbeVector) -> C64 {
        // iterate the sparser side
        let (small, big, conj_small) = if self.entries.len() <= other.entries.len() {
            (&self.entries, &other.entries, true)
        } else {
            (&other.entries, &self.entries, false)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (g, a) in small {
            if let Some(b) = big.get(g) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    pub fn scale_mut(&mut self, c: C64) {
        if c == C64::new(0.0, 0.0) {
            self.entries.clear();
            self.support_radius = 0.0;
            return;
        }
        for a in self.entries.values_mut() {
            *a *= c;
        }
    }

    pub fn scaled(&self, c: C64) -> ProbeVector {
        let mut v = self.clone();
        v.scale_mut(c);
        v
    }

    /// Entrywise division by a real scalar. Division (not multiplication by
    /// the reciprocal) so that integer-valued quotients stay exact.
    pub fn unscale_mut(&mut self, d: f64) {
        for a in self.entries.values_mut() {
            *a /= d;
        }
    }

    /// `sum c_k v_k`; support radius is recomputed from surviving entries.
    pub fn lincomb(terms: &[(C64, &ProbeVector)], length: &LengthFunction) -> Result<ProbeVector> {
        let mut m: BTreeMap<GroupElement, C64> = BTreeMap::new();
        for (c, v) in terms {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            for (g, a) in &v.entries {
                *m.entry(g.clone()).or_insert(C64::new(0.0, 0.0)) += c * a;
            }
        }
        m.retain(|_, a| *a != C64::new(0.0, 0.0));
        let mut radius = 0.0f64;
        for g in m.keys() {
            radius = radius.max(length.base_eval(g)?);
        }
        Ok(ProbeVector { entries: m, support_radius: radius })
    }

    pub fn sub(&self, other: &ProbeVector, length: &LengthFunction) -> Result<ProbeVector> {
        Self::lincomb(
            &[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)],
            length,
        )
    }
}

/// Result of pushing a vector through a truncated translation.
#[derive(Debug, Clone)]
pub struct AppliedProbe {
    pub vector: ProbeVector,
    /// `l^2` mass of the entries clipped by the truncation.
    pub dropped: f64,
}

/// `U(x) phi = phi(x^-1 ·)`: translates support by `x`, clipping at the ball
/// boundary and reporting the clipped mass.
pub fn regular_apply(space: &RegularSpace, x: &GroupElement, phi: &ProbeVector) -> Result<AppliedProbe> {
    let spec = space.spec();
    spec.validate(x)?;
    let mut m = BTreeMap::new();
    let mut dropped_sq = 0.0;
    let mut radius = 0.0f64;
    for (g, a) in phi.iter() {
        let moved = spec.product(x, g)?;
        if space.contains(&moved)? {
            radius = radius.max(space.length().base_eval(&moved)?);
            m.insert(moved, *a);
        } else {
            dropped_sq += a.norm_sqr();
        }
    }
    Ok(AppliedProbe {
        vector: ProbeVector { entries: m, support_radius: radius },
        dropped: dropped_sq.sqrt(),
    })
}

/// Which multiplication operator plays the conjugate role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplier {
    /// Multiplication by the base length `l(g)`.
    Length,
    /// Multiplication by the (signed) coordinate; rank-1 lattice only.
    Position,
}

impl Multiplier {
    /// Length uses the composed value: the conjugate operator and the net
    /// normalizer must come from the same length function for the
    /// normalized commutator to have its clean limit.
    pub fn value(&self, space: &RegularSpace, g: &GroupElement) -> Result<f64> {
        match self {
            Multiplier::Length => space.length().eval(g),
            Multiplier::Position => match (space.spec().kind, g) {
                (GroupKind::Lattice { dim: 1 }, GroupElement::Lattice(v)) => Ok(v[0] as f64),
                _ => Err(Error::Unsupported(
                    "position multiplier needs the rank-1 lattice".into(),
                )),
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Multiplier::Length => "length",
            Multiplier::Position => "position",
        }
    }
}

/// `A phi` for the diagonal multiplier `A`.
pub fn apply_multiplier(space: &RegularSpace, m: Multiplier, phi: &ProbeVector) -> Result<ProbeVector> {
    let mut out = BTreeMap::new();
    let mut radius = 0.0f64;
    for (g, a) in phi.iter() {
        let v = m.value(space, g)?;
        let scaled = a * C64::new(v, 0.0);
        if scaled != C64::new(0.0, 0.0) {
            radius = radius.max(space.length().base_eval(g)?);
            out.insert(g.clone(), scaled);
        }
    }
    Ok(ProbeVector { entries: out, support_radius: radius })
}

/// Closed form of `([A, U(x)] U(x)^-1) phi = (m(g) - m(x^-1 g)) phi(g)`.
/// Exact on the safe core; refuses outside it because the truncation would
/// clip the intermediate translate.
pub fn regular_commutator(
    space: &RegularSpace,
    m: Multiplier,
    x: &GroupElement,
    phi: &ProbeVector,
) -> Result<ProbeVector> {
    let spec = space.spec();
    spec.validate(x)?;
    let step = space.length().base_eval(x)?;
    if phi.support_radius() + step > space.radius() + BALL_TOL {
        return Err(Error::SafeCore {
            support: phi.support_radius(),
            step,
            radius: space.radius(),
        });
    }
    let xinv = spec.inverse(x)?;
    let mut out = BTreeMap::new();
    let mut radius = 0.0f64;
    for (g, a) in phi.iter() {
        let here = m.value(space, g)?;
        let there = m.value(space, &spec.product(&xinv, g)?)?;
        let scaled = a * C64::new(here - there, 0.0);
        if scaled != C64::new(0.0, 0.0) {
            radius = radius.max(space.length().base_eval(g)?);
            out.insert(g.clone(), scaled);
        }
    }
    Ok(ProbeVector { entries: out, support_radius: radius })
}

/// Matrix coefficient `<phi, U(x) psi>`. Exact: entries clipped by the
/// truncation cannot overlap `phi`, whose support already lies in the ball.
pub fn coefficient(
    space: &RegularSpace,
    phi: &ProbeVector,
    x: &GroupElement,
    psi: &ProbeVector,
) -> Result<C64> {
    let spec = space.spec();
    spec.validate(x)?;
    let mut acc = C64::new(0.0, 0.0);
    for (h, b) in psi.iter() {
        let moved = spec.product(x, h)?;
        let a = phi.coeff(&moved);
        if a != C64::new(0.0, 0.0) {
            acc += a.conj() * b;
        }
    }
    Ok(acc)
}

/// Dense truncated translation matrix on the ball basis (small radii only).
/// Columns of dropped translates are zero, so this is a partial isometry,
/// not a unitary — useful as an oracle for the sparse path.
pub fn matrix_rep(space: &RegularSpace, x: &GroupElement) -> Result<(Vec<GroupElement>, Operator)> {
    let basis = space.ball_basis()?;
    let spec = space.spec();
    spec.validate(x)?;
    let n = basis.len();
    let index: BTreeMap<&GroupElement, usize> =
        basis.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut mat = DMatrix::<C64>::zeros(n, n);
    for (j, g) in basis.iter().enumerate() {
        let moved = spec.product(x, g)?;
        if let Some(&i) = index.get(&moved) {
            mat[(i, j)] = C64::new(1.0, 0.0);
        }
    }
    Ok((basis, Operator::general(mat, format!("U({x})"))?))
}

/// Dense diagonal multiplier on the ball basis.
pub fn matrix_multiplier(space: &RegularSpace, m: Multiplier) -> Result<(Vec<GroupElement>, Operator)> {
    let basis = space.ball_basis()?;
    let n = basis.len();
    let mut mat = DMatrix::<C64>::zeros(n, n);
    for (i, g) in basis.iter().enumerate() {
        mat[(i, i)] = C64::new(m.value(space, g)?, 0.0);
    }
    Ok((basis, Operator::hermitian(mat, format!("A[{}]", m.name()))?))
}

/// Commuting Hermitian generator family for the flow representation
/// `U(x) = exp(-i x·H)` of `R^d`, plus the Hermitian conjugate operator.
#[derive(Debug, Clone)]
pub struct FlowScenario {
    gens: Vec<Operator>,
    conjugate: Operator,
}

impl FlowScenario {
    pub fn new(gens: Vec<Operator>, conjugate: Operator) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Unsupported("flow needs at least one generator".into()));
        }
        let dim = conjugate.dim();
        for (k, h) in gens.iter().enumerate() {
            if !h.is_hermitian() {
                return Err(Error::Unsupported(format!("flow generator {k} not hermitian")));
            }
            if h.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator {k} is {}-dim, conjugate is {dim}-dim",
                    h.dim()
                )));
            }
        }
        if !conjugate.is_hermitian() {
            return Err(Error::Unsupported("flow conjugate operator not hermitian".into()));
        }
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                let scale = 1.0 + gens[i].max_norm() * gens[j].max_norm();
                let residual = commutator(&gens[i], &gens[j])?.max_norm();
                if residual > COMMUTE_TOL * scale {
                    return Err(Error::NonCommuting { i, j, residual });
                }
            }
        }
        Ok(FlowScenario { gens, conjugate })
    }

    pub fn gens(&self) -> &[Operator] {
        &self.gens
    }

    pub fn conjugate(&self) -> &Operator {
        &self.conjugate
    }

    pub fn group_dim(&self) -> usize {
        self.gens.len()
    }

    pub fn space_dim(&self) -> usize {
        self.conjugate.dim()
    }

    fn coords<'a>(&self, x: &'a GroupElement) -> Result<&'a [f64]> {
        match x {
            GroupElement::Point(p) if p.len() == self.gens.len() => Ok(p),
            _ => Err(Error::GroupMismatch(format!(
                "flow over R^{} fed element {x}",
                self.gens.len()
            ))),
        }
    }

    /// `x·H = sum_k x_k H_k`.
    pub fn x_dot_h(&self, x: &GroupElement) -> Result<Operator> {
        let p = self.coords(x)?;
        let n = self.space_dim();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (xk, h) in p.iter().zip(&self.gens) {
            acc += h.matrix().map(|z| z * C64::new(*xk, 0.0));
        }
        Operator::hermitian(acc, format!("x·H at {x}"))
    }

    /// `U(x) = exp(-i x·H)`.
    pub fn unitary(&self, x: &GroupElement) -> Result<Operator> {
        let xh = self.x_dot_h(x)?;
        crate::operator::unitary_exp(&xh, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::NetStrategy;
    use crate::operator::random_hermitian;

    fn z2_space(radius: f64) -> RegularSpace {
        let spec = GroupSpec::lattice(2);
        RegularSpace::new(LengthFunction::word(spec).unwrap(), radius).unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn translation_preserves_norm_inside_core() {
        let space = z2_space(8.0);
        let phi = ProbeVector::ball_indicator(&space, 2).unwrap();
        let x = GroupElement::Lattice(vec![3, 1]);
        let moved = regular_apply(&space, &x, &phi).unwrap();
        assert_eq!(moved.dropped, 0.0);
        assert!((moved.vector.norm() - phi.norm()).abs() < 1e-15);
    }

    #[test]
    fn translation_reports_clipped_mass() {
        let space = z2_space(2.0);
        let phi = ProbeVector::delta(&space, GroupElement::Lattice(vec![2, 0])).unwrap();
        let x = GroupElement::Lattice(vec![1, 0]);
        let moved = regular_apply(&space, &x, &phi).unwrap();
        assert_eq!(moved.vector.support_len(), 0);
        assert!((moved.dropped - 1.0).abs() < 1e-15);
    }

    #[test]
    fn commutator_closed_form_matches_dense_oracle() {
        // sparse closed form vs literal A U - U A U^-1 ... on the dense ball
        let space = z2_space(4.0);
        let x = GroupElement::Lattice(vec![1, 1]);
        let (basis, u) = matrix_rep(&space, &x).unwrap();
        let (_, a) = matrix_multiplier(&space, Multiplier::Length).unwrap();
        let uinv = matrix_rep(&space, &space.spec().inverse(&x).unwrap()).unwrap().1;
        // B = A - U A U^-1 restricted to the safe core
        let b = a
            .sub(&u.mul(&a).unwrap().mul(&uinv).unwrap())
            .unwrap();
        let phi = ProbeVector::ball_indicator(&space, 2).unwrap();
        let sparse = regular_commutator(&space, Multiplier::Length, &x, &phi).unwrap();
        for (i, g) in basis.iter().enumerate() {
            let mut dense_val = C64::new(0.0, 0.0);
            for (j, h) in basis.iter().enumerate() {
                dense_val += b.matrix()[(i, j)] * phi.coeff(h);
            }
            assert!(
                (dense_val - sparse.coeff(g)).norm() < 1e-14,
                "mismatch at {g}: dense {dense_val}, sparse {}",
                sparse.coeff(g)
            );
        }
    }

    #[test]
    fn commutator_outside_safe_core_is_refused() {
        let space = z2_space(3.0);
        let phi = ProbeVector::ball_indicator(&space, 2).unwrap();
        let x = GroupElement::Lattice(vec![2, 0]);
        assert!(matches!(
            regular_commutator(&space, Multiplier::Length, &x, &phi),
            Err(Error::SafeCore { .. })
        ));
    }

    #[test]
    fn commutator_values_are_length_differences() {
        let space = z2_space(10.0);
        let g = GroupElement::Lattice(vec![1, 0]);
        let phi = ProbeVector::delta(&space, g.clone()).unwrap();
        let x = GroupElement::Lattice(vec![3, 3]);
        let out = regular_commutator(&space, Multiplier::Length, &x, &phi).unwrap();
        // l(g) - l(x^-1 g) = 1 - l(-2, -3) = 1 - 5 = -4
        assert_eq!(out.coeff(&g), re(-4.0));
    }

    #[test]
    fn coefficient_matches_dense_oracle() {
        let space = z2_space(3.0);
        let x = GroupElement::Lattice(vec![1, -1]);
        let (basis, u) = matrix_rep(&space, &x).unwrap();
        let phi = ProbeVector::ball_indicator(&space, 1).unwrap();
        let psi = ProbeVector::delta(&space, GroupElement::Lattice(vec![0, 1])).unwrap();
        let sparse = coefficient(&space, &phi, &x, &psi).unwrap();
        let mut dense = C64::new(0.0, 0.0);
        for (i, gi) in basis.iter().enumerate() {
            for (j, gj) in basis.iter().enumerate() {
                dense += phi.coeff(gi).conj() * u.matrix()[(i, j)] * psi.coeff(gj);
            }
        }
        assert!((sparse - dense).norm() < 1e-14);
    }

    #[test]
    fn coefficient_is_exactly_zero_beyond_support_reach() {
        let space = z2_space(12.0);
        let phi = ProbeVector::ball_indicator(&space, 2).unwrap();
        let psi = ProbeVector::ball_indicator(&space, 1).unwrap();
        // l(x) = 4 > 2 + 1
        let x = GroupElement::Lattice(vec![2, 2]);
        assert_eq!(coefficient(&space, &phi, &x, &psi).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn safe_core_radius_accounts_for_longest_net_point() {
        let space = z2_space(10.0);
        let l = space.length().clone();
        let net = crate::group::make_net(
            &l,
            &NetStrategy::Ray { step: GroupElement::Lattice(vec![1, 1]), count: 4 },
        )
        .unwrap();
        assert_eq!(safe_core_radius(&space, &net).unwrap(), 2.0);
        let small = z2_space(6.0);
        assert!(matches!(
            safe_core_radius(&small, &net),
            Err(Error::InfeasibleRadius { .. })
        ));
    }

    #[test]
    fn flow_rejects_noncommuting_generators() {
        let h1 = random_hermitian(4, 1).unwrap();
        let h2 = random_hermitian(4, 2).unwrap();
        let a = random_hermitian(4, 3).unwrap();
        assert!(matches!(
            FlowScenario::new(vec![h1, h2], a),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn flow_unitary_is_multiplicative_along_commuting_steps() {
        let h = random_hermitian(5, 4).unwrap();
        let a = random_hermitian(5, 5).unwrap();
        let flow = FlowScenario::new(vec![h], a).unwrap();
        let x = GroupElement::Point(vec![0.7]);
        let y = GroupElement::Point(vec![1.4]);
        let ux = flow.unitary(&x).unwrap();
        let uy = flow.unitary(&y).unwrap();
        let uxy = flow.unitary(&GroupElement::Point(vec![2.1])).unwrap();
        let dev = ux.mul(&uy).unwrap().sub(&uxy).unwrap().max_norm();
        assert!(dev < 1e-12, "dev {dev}");
    }
}
