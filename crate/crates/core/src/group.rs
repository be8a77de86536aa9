//! Groups, length functions and divergent nets.
//!
//! Three group families are supported: integer lattices `Z^d`, free groups
//! `F_r` on reduced words, and Euclidean spaces `R^d`. Elements are plain
//! data with a total order (floats via `total_cmp`) so that probe maps and
//! report tables iterate deterministically.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Which group a spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// `Z^d` with the standard generators `±e_i`.
    Lattice { dim: usize },
    /// Free group of the given rank on reduced words.
    Free { rank: usize },
    /// `(R^d, +)`.
    Euclidean { dim: usize },
}

/// A group together with its generating data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    pub kind: GroupKind,
}

/// Group element. Free-group words are reduced sequences of letters
/// `±k` (`k = 1..=rank`, negative = inverse); the reduction invariant
/// `w[i] != -w[i+1]` is maintained by every constructor here.
#[derive(Debug, Clone)]
pub enum GroupElement {
    Lattice(Vec<i64>),
    Word(Vec<i32>),
    Point(Vec<f64>),
}

impl GroupElement {
    fn rank(&self) -> u8 {
        match self {
            GroupElement::Lattice(_) => 0,
            GroupElement::Word(_) => 1,
            GroupElement::Point(_) => 2,
        }
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for GroupElement {}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        use GroupElement::*;
        match (self, other) {
            (Lattice(a), Lattice(b)) => {
                let la: i64 = a.iter().map(|c| c.abs()).sum();
                let lb: i64 = b.iter().map(|c| c.abs()).sum();
                la.cmp(&lb).then_with(|| a.cmp(b))
            }
            (Word(a), Word(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (Point(a), Point(b)) => {
                a.len().cmp(&b.len()).then_with(|| {
                    for (x, y) in a.iter().zip(b.iter()) {
                        let c = x.total_cmp(y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                })
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u8(self.rank());
        match self {
            GroupElement::Lattice(v) => v.hash(state),
            GroupElement::Word(w) => w.hash(state),
            GroupElement::Point(p) => {
                for x in p {
                    state.write_u64(x.to_bits());
                }
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Lattice(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            GroupElement::Word(w) => {
                if w.is_empty() {
                    return write!(f, "e");
                }
                for &l in w {
                    let idx = (l.unsigned_abs() - 1) as u8;
                    let base = if l > 0 { b'a' } else { b'A' };
                    write!(f, "{}", (base + idx) as char)?;
                }
                Ok(())
            }
            GroupElement::Point(p) => {
                write!(f, "(")?;
                for (i, c) in p.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Concatenate-and-cancel for free-group words.
pub fn reduce_word(letters: impl IntoIterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl GroupSpec {
    pub fn lattice(dim: usize) -> Self {
        GroupSpec { kind: GroupKind::Lattice { dim } }
    }

    pub fn free(rank: usize) -> Self {
        GroupSpec { kind: GroupKind::Free { rank } }
    }

    pub fn euclidean(dim: usize) -> Self {
        GroupSpec { kind: GroupKind::Euclidean { dim } }
    }

    /// Short code used in scenario digests, e.g. `z2`, `f2`, `r3`.
    pub fn code(&self) -> String {
        match self.kind {
            GroupKind::Lattice { dim } => format!("z{dim}"),
            GroupKind::Free { rank } => format!("f{rank}"),
            GroupKind::Euclidean { dim } => format!("r{dim}"),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Lattice { dim } => GroupElement::Lattice(vec![0; dim]),
            GroupKind::Free { .. } => GroupElement::Word(Vec::new()),
            GroupKind::Euclidean { dim } => GroupElement::Point(vec![0.0; dim]),
        }
    }

    /// Standard generators. Empty for `R^d`, which has no finite generating set.
    pub fn generators(&self) -> Vec<GroupElement> {
        match self.kind {
            GroupKind::Lattice { dim } => (0..dim)
                .map(|i| {
                    let mut v = vec![0i64; dim];
                    v[i] = 1;
                    GroupElement::Lattice(v)
                })
                .collect(),
            GroupKind::Free { rank } => {
                (1..=rank as i32).map(|k| GroupElement::Word(vec![k])).collect()
            }
            GroupKind::Euclidean { .. } => Vec::new(),
        }
    }

    /// Checks that `x` is a well-formed element of this group.
    pub fn validate(&self, x: &GroupElement) -> Result<()> {
        match (self.kind, x) {
            (GroupKind::Lattice { dim }, GroupElement::Lattice(v)) => {
                if v.len() == dim {
                    Ok(())
                } else {
                    Err(Error::GroupMismatch(format!(
                        "lattice element has {} coordinates, group is Z^{dim}",
                        v.len()
                    )))
                }
            }
            (GroupKind::Free { rank }, GroupElement::Word(w)) => {
                for (i, &l) in w.iter().enumerate() {
                    if l == 0 || l.unsigned_abs() as usize > rank {
                        return Err(Error::GroupMismatch(format!(
                            "letter {l} at position {i} outside alphabet of F_{rank}"
                        )));
                    }
                    if i + 1 < w.len() && w[i + 1] == -l {
                        return Err(Error::GroupMismatch(format!(
                            "word not reduced at position {i}"
                        )));
                    }
                }
                Ok(())
            }
            (GroupKind::Euclidean { dim }, GroupElement::Point(p)) => {
                if p.len() != dim {
                    return Err(Error::GroupMismatch(format!(
                        "point has {} coordinates, group is R^{dim}",
                        p.len()
                    )));
                }
                if p.iter().any(|c| !c.is_finite()) {
                    return Err(Error::GroupMismatch("non-finite coordinate".into()));
                }
                Ok(())
            }
            _ => Err(Error::GroupMismatch(format!(
                "element {x} does not belong to group {}",
                self.code()
            ))),
        }
    }

    pub fn product(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(match (x, y) {
            (GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                GroupElement::Lattice(a.iter().zip(b).map(|(p, q)| p + q).collect())
            }
            (GroupElement::Word(a), GroupElement::Word(b)) => {
                GroupElement::Word(reduce_word(a.iter().chain(b.iter()).copied()))
            }
            (GroupElement::Point(a), GroupElement::Point(b)) => {
                GroupElement::Point(a.iter().zip(b).map(|(p, q)| p + q).collect())
            }
            _ => unreachable!("validated above"),
        })
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement> {
        self.validate(x)?;
        Ok(match x {
            GroupElement::Lattice(a) => GroupElement::Lattice(a.iter().map(|c| -c).collect()),
            GroupElement::Word(w) => GroupElement::Word(w.iter().rev().map(|l| -l).collect()),
            GroupElement::Point(p) => GroupElement::Point(p.iter().map(|c| -c).collect()),
        })
    }

    /// `x^n` for integer `n` (negative exponents via the inverse).
    pub fn pow(&self, x: &GroupElement, n: i64) -> Result<GroupElement> {
        self.validate(x)?;
        if n == 0 {
            return Ok(self.identity());
        }
        let (base, reps) = if n < 0 { (self.inverse(x)?, -n) } else { (x.clone(), n) };
        match &base {
            GroupElement::Lattice(a) => {
                Ok(GroupElement::Lattice(a.iter().map(|c| c * reps).collect()))
            }
            GroupElement::Point(p) => {
                Ok(GroupElement::Point(p.iter().map(|c| c * reps as f64).collect()))
            }
            GroupElement::Word(_) => {
                let mut acc = base.clone();
                for _ in 1..reps {
                    acc = self.product(&acc, &base)?;
                }
                Ok(acc)
            }
        }
    }

    /// Word length with respect to the standard generators. Discrete kinds only.
    pub fn word_length(&self, x: &GroupElement) -> Result<u64> {
        self.validate(x)?;
        match x {
            GroupElement::Lattice(v) => Ok(v.iter().map(|c| c.unsigned_abs()).sum()),
            GroupElement::Word(w) => Ok(w.len() as u64),
            GroupElement::Point(_) => {
                Err(Error::Unsupported("word length on a Euclidean group".into()))
            }
        }
    }

    /// Factors `x` into a minimal sequence of generators/inverses
    /// (product in order equals `x`, count equals the word length).
    pub fn word_decompose(&self, x: &GroupElement) -> Result<Vec<GroupElement>> {
        self.validate(x)?;
        match x {
            GroupElement::Lattice(v) => {
                let dim = v.len();
                let mut out = Vec::new();
                for (i, &c) in v.iter().enumerate() {
                    let mut step = vec![0i64; dim];
                    step[i] = c.signum();
                    for _ in 0..c.unsigned_abs() {
                        out.push(GroupElement::Lattice(step.clone()));
                    }
                }
                Ok(out)
            }
            GroupElement::Word(w) => {
                Ok(w.iter().map(|&l| GroupElement::Word(vec![l])).collect())
            }
            GroupElement::Point(_) => {
                Err(Error::Unsupported("word decomposition on a Euclidean group".into()))
            }
        }
    }

    /// All elements of word length at most `radius`, sorted by `(length, lex)`.
    pub fn enumerate_ball(&self, radius: u64) -> Result<Vec<GroupElement>> {
        match self.kind {
            GroupKind::Lattice { dim } => {
                let r = radius as i64;
                let mut out = Vec::new();
                let mut coords = vec![-r; dim];
                loop {
                    let l1: i64 = coords.iter().map(|c| c.abs()).sum();
                    if l1 <= r {
                        out.push(GroupElement::Lattice(coords.clone()));
                    }
                    // odometer over the cube [-r, r]^d
                    let mut i = 0;
                    loop {
                        if i == dim {
                            out.sort();
                            return Ok(out);
                        }
                        coords[i] += 1;
                        if coords[i] <= r {
                            break;
                        }
                        coords[i] = -r;
                        i += 1;
                    }
                }
            }
            GroupKind::Free { rank } => {
                let letters: Vec<i32> =
                    (1..=rank as i32).flat_map(|k| [k, -k]).collect();
                let mut out = vec![GroupElement::Word(Vec::new())];
                let mut level: Vec<Vec<i32>> = vec![Vec::new()];
                for _ in 0..radius {
                    let mut next = Vec::with_capacity(level.len() * (2 * rank - 1).max(1));
                    for w in &level {
                        for &l in &letters {
                            if w.last() == Some(&-l) {
                                continue;
                            }
                            let mut nw = w.clone();
                            nw.push(l);
                            next.push(nw);
                        }
                    }
                    out.extend(next.iter().cloned().map(GroupElement::Word));
                    level = next;
                }
                out.sort();
                Ok(out)
            }
            GroupKind::Euclidean { .. } => {
                Err(Error::Unsupported("ball enumeration on a Euclidean group".into()))
            }
        }
    }

    /// Seeded element sampler used by the axiom checker and identity suites.
    pub fn sample_elements(&self, count: usize, seed: u64) -> Vec<GroupElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_one(&mut rng)).collect()
    }

    fn sample_one(&self, rng: &mut ChaCha8Rng) -> GroupElement {
        match self.kind {
            GroupKind::Lattice { dim } => {
                GroupElement::Lattice((0..dim).map(|_| rng.gen_range(-20..=20)).collect())
            }
            GroupKind::Free { rank } => {
                let len = rng.gen_range(0..=10);
                let mut w: Vec<i32> = Vec::with_capacity(len);
                for _ in 0..len {
                    loop {
                        let k = rng.gen_range(1..=rank as i32);
                        let l = if rng.gen_bool(0.5) { k } else { -k };
                        if w.last() != Some(&-l) {
                            w.push(l);
                            break;
                        }
                    }
                }
                GroupElement::Word(w)
            }
            GroupKind::Euclidean { dim } => {
                GroupElement::Point((0..dim).map(|_| rng.gen_range(-10.0..=10.0)).collect())
            }
        }
    }
}

/// Proper monotone maps that may be post-composed with a base length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProperMap {
    Identity,
    /// `t -> sqrt(1 + t^2) - 1`
    SqrtShift,
    /// `t -> t^p`, `0 < p <= 2`
    Power(f64),
}

impl ProperMap {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            ProperMap::Identity => t,
            ProperMap::SqrtShift => (1.0 + t * t).sqrt() - 1.0,
            ProperMap::Power(p) => t.powf(*p),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ProperMap::Identity => "id".into(),
            ProperMap::SqrtShift => "sqrt1p".into(),
            ProperMap::Power(p) => format!("pow{p}"),
        }
    }
}

/// Base metric a length function is built from.
#[derive(Clone)]
pub enum LengthBase {
    /// Word length w.r.t. the standard generators (discrete kinds).
    Word,
    /// Euclidean norm (for `R^d`).
    Euclidean,
    /// Validated pseudo-metric adapter; stores `x -> d(e, x)`.
    Adapter { name: String, eval: Arc<dyn Fn(&GroupElement) -> f64 + Send + Sync> },
}

impl fmt::Debug for LengthBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthBase::Word => write!(f, "Word"),
            LengthBase::Euclidean => write!(f, "Euclidean"),
            LengthBase::Adapter { name, .. } => write!(f, "Adapter({name})"),
        }
    }
}

/// A length function on a fixed group: a base metric plus an optional
/// proper post-composition. The composition affects `eval` (used to
/// normalize commutators along nets); `base_eval` stays raw.
#[derive(Debug, Clone)]
pub struct LengthFunction {
    spec: GroupSpec,
    base: LengthBase,
    compose: ProperMap,
}

impl LengthFunction {
    pub fn word(spec: GroupSpec) -> Result<Self> {
        match spec.kind {
            GroupKind::Euclidean { .. } => {
                Err(Error::Unsupported("word length on a Euclidean group".into()))
            }
            _ => Ok(LengthFunction { spec, base: LengthBase::Word, compose: ProperMap::Identity }),
        }
    }

    pub fn euclidean(spec: GroupSpec) -> Result<Self> {
        match spec.kind {
            GroupKind::Euclidean { .. } => Ok(LengthFunction {
                spec,
                base: LengthBase::Euclidean,
                compose: ProperMap::Identity,
            }),
            _ => Err(Error::Unsupported("Euclidean norm on a discrete group".into())),
        }
    }

    pub fn with_compose(mut self, map: ProperMap) -> Result<Self> {
        if let ProperMap::Power(p) = map {
            if !(p > 0.0 && p <= 2.0) {
                return Err(Error::Unsupported(format!(
                    "power map exponent {p} outside (0, 2]"
                )));
            }
        }
        self.compose = map;
        Ok(self)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn compose(&self) -> ProperMap {
        self.compose
    }

    pub fn base_name(&self) -> String {
        match &self.base {
            LengthBase::Word => "word".into(),
            LengthBase::Euclidean => "euclid".into(),
            LengthBase::Adapter { name, .. } => format!("adapter:{name}"),
        }
    }

    /// Raw base length, before post-composition.
    pub fn base_eval(&self, x: &GroupElement) -> Result<f64> {
        self.spec.validate(x)?;
        match &self.base {
            LengthBase::Word => Ok(self.spec.word_length(x)? as f64),
            LengthBase::Euclidean => match x {
                GroupElement::Point(p) => {
                    Ok(p.iter().map(|c| c * c).sum::<f64>().sqrt())
                }
                _ => Err(Error::GroupMismatch("Euclidean norm of a discrete element".into())),
            },
            LengthBase::Adapter { eval, .. } => Ok(eval(x)),
        }
    }

    /// Composed length `f(base(x))` — the value used to normalize nets.
    pub fn eval(&self, x: &GroupElement) -> Result<f64> {
        Ok(self.compose.value(self.base_eval(x)?))
    }
}

/// A strictly length-increasing sequence heading to infinity.
#[derive(Debug, Clone)]
pub struct DivergentNet {
    pub elements: Vec<GroupElement>,
    /// Composed lengths, strictly increasing and positive.
    pub lengths: Vec<f64>,
}

impl DivergentNet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// How to lay out net points.
#[derive(Debug, Clone)]
pub enum NetStrategy {
    /// `step^j` for `j = 1..=count`.
    Ray { step: GroupElement, count: usize },
    /// `step^(2^(j-1))` for `j = 1..=count`.
    Geometric { step: GroupElement, count: usize },
    /// Explicit list, validated.
    Custom(Vec<GroupElement>),
}

/// Builds a net and checks divergence: composed lengths must be positive
/// and strictly increasing.
pub fn make_net(length: &LengthFunction, strategy: &NetStrategy) -> Result<DivergentNet> {
    let spec = length.spec();
    let elements: Vec<GroupElement> = match strategy {
        NetStrategy::Ray { step, count } => {
            if *count == 0 {
                return Err(Error::NetConstruction("ray with zero points".into()));
            }
            (1..=*count as i64).map(|j| spec.pow(step, j)).collect::<Result<_>>()?
        }
        NetStrategy::Geometric { step, count } => {
            if *count == 0 {
                return Err(Error::NetConstruction("geometric net with zero points".into()));
            }
            if *count > 32 {
                return Err(Error::NetConstruction("geometric net longer than 32 points".into()));
            }
            (0..*count as u32)
                .map(|j| spec.pow(step, 1i64 << j))
                .collect::<Result<_>>()?
        }
        NetStrategy::Custom(list) => {
            if list.is_empty() {
                return Err(Error::NetConstruction("empty custom net".into()));
            }
            for x in list {
                spec.validate(x)?;
            }
            list.clone()
        }
    };
    let mut lengths = Vec::with_capacity(elements.len());
    for x in &elements {
        lengths.push(length.eval(x)?);
    }
    if lengths[0] <= 0.0 {
        return Err(Error::NetConstruction(format!(
            "first net point {} has non-positive length {}",
            elements[0], lengths[0]
        )));
    }
    for w in lengths.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::NetConstruction(format!(
                "lengths not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(DivergentNet { elements, lengths })
}

/// Outcome of sampling the length-function axioms.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub group: String,
    pub base: String,
    pub samples: usize,
    /// `|l(e)|`
    pub l1_abs: f64,
    /// max over samples of `|l(x^-1) - l(x)|`
    pub l2_max: f64,
    pub l2_witness: Option<GroupElement>,
    /// max over sample pairs of `l(xy) - l(x) - l(y)`, clamped at 0
    pub l3_max: f64,
    pub l3_witness: Option<(GroupElement, GroupElement)>,
    /// `(radius, ball size)` for discrete kinds; empty for `R^d`
    pub ball_sizes: Vec<(u64, usize)>,
    pub properness_ok: bool,
    pub properness_note: String,
}

impl AxiomReport {
    /// No violation above `tol` and the properness probe passed.
    pub fn clean(&self, tol: f64) -> bool {
        self.l1_abs <= tol && self.l2_max <= tol && self.l3_max <= tol && self.properness_ok
    }
}

/// Samples (L1)-(L3) on seeded pairs and probes (L4) by ball counting
/// (discrete) or ray coercivity (Euclidean).
pub fn check_length_axioms(
    length: &LengthFunction,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let spec = *length.spec();
    let e = spec.identity();
    let l1_abs = length.eval(&e)?.abs();

    let xs = spec.sample_elements(samples, seed);
    let ys = spec.sample_elements(samples, seed.wrapping_add(0x9e3779b97f4a7c15));

    let mut l2_max = 0.0f64;
    let mut l2_witness = None;
    let mut l3_max = 0.0f64;
    let mut l3_witness = None;
    for (x, y) in xs.iter().zip(ys.iter()) {
        let lx = length.eval(x)?;
        let linv = length.eval(&spec.inverse(x)?)?;
        let d2 = (lx - linv).abs();
        if d2 > l2_max {
            l2_max = d2;
            l2_witness = Some(x.clone());
        }
        let ly = length.eval(y)?;
        let lxy = length.eval(&spec.product(x, y)?)?;
        let d3 = lxy - lx - ly;
        if d3 > l3_max {
            l3_max = d3;
            l3_witness = Some((x.clone(), y.clone()));
        }
    }

    let mut ball_sizes = Vec::new();
    if !matches!(spec.kind, GroupKind::Euclidean { .. }) {
        for r in 1..=5u64 {
            ball_sizes.push((r, spec.enumerate_ball(r)?.len()));
        }
    }

    let (properness_ok, properness_note) = probe_properness(length)?;

    Ok(AxiomReport {
        group: spec.code(),
        base: format!("{}∘{}", length.compose().name(), length.base_name()),
        samples,
        l1_abs,
        l2_max,
        l2_witness,
        l3_max,
        l3_witness,
        ball_sizes,
        properness_ok,
        properness_note,
    })
}

/// (L4) probe. Discrete: the count of elements with composed length below a
/// fixed witness level must stabilize as word balls grow; a pseudo-metric
/// collapsing infinitely many elements keeps the count growing. Euclidean:
/// lengths along coordinate rays must keep increasing.
fn probe_properness(length: &LengthFunction) -> Result<(bool, String)> {
    let spec = *length.spec();
    match spec.kind {
        GroupKind::Euclidean { dim } => {
            for i in 0..dim {
                let mut prev = 0.0;
                for &t in &[10.0, 100.0, 1000.0] {
                    let mut p = vec![0.0; dim];
                    p[i] = t;
                    let v = length.eval(&GroupElement::Point(p))?;
                    if v <= prev + 1e-9 {
                        return Ok((
                            false,
                            format!("length stalls along ray e_{i} at scale {t}: {v}"),
                        ));
                    }
                    prev = v;
                }
            }
            Ok((true, "strictly increasing along coordinate rays".into()))
        }
        _ => {
            let sphere1 = spec.enumerate_ball(1)?;
            let mut level = 0.0f64;
            for x in &sphere1 {
                level = level.max(length.eval(x)?);
            }
            let witness_level = 1.0 + level;
            let radii = [2u64, 4, 6, 8];
            let mut counts = Vec::new();
            for &r in &radii {
                let ball = spec.enumerate_ball(r)?;
                let mut c = 0usize;
                for x in &ball {
                    if length.eval(x)? <= witness_level {
                        c += 1;
                    }
                }
                counts.push((r, c));
            }
            let n = counts.len();
            if counts[n - 1].1 > counts[n - 2].1 {
                return Ok((
                    false,
                    format!(
                        "sub-level set |l <= {witness_level}| keeps growing: {} at radius {}, {} at radius {}",
                        counts[n - 2].1,
                        counts[n - 2].0,
                        counts[n - 1].1,
                        counts[n - 1].0
                    ),
                ));
            }
            Ok((
                true,
                format!(
                    "sub-level set |l <= {witness_level}| stabilizes at {} inside radius {}",
                    counts[n - 1].1,
                    counts[n - 1].0
                ),
            ))
        }
    }
}

/// A symmetric pseudo-metric supplied by the caller.
#[derive(Clone)]
pub struct PseudoMetric {
    pub name: String,
    pub eval: Arc<dyn Fn(&GroupElement, &GroupElement) -> f64 + Send + Sync>,
}

impl PseudoMetric {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&GroupElement, &GroupElement) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PseudoMetric { name: name.into(), eval: Arc::new(eval) }
    }
}

/// Turns a left-invariant pseudo-metric into a length function
/// `l(x) = d(e, x)` after validating the axioms on seeded samples;
/// rejects with a witness if any check fails.
pub fn length_from_pseudometric(
    spec: GroupSpec,
    metric: &PseudoMetric,
    samples: usize,
    seed: u64,
) -> Result<LengthFunction> {
    let e = spec.identity();
    let name = metric.name.clone();
    let eval = metric.eval.clone();
    let candidate = LengthFunction {
        spec,
        base: LengthBase::Adapter {
            name: name.clone(),
            eval: Arc::new(move |x: &GroupElement| eval(&e, x)),
        },
        compose: ProperMap::Identity,
    };
    let tol = 1e-9;
    let report = check_length_axioms(&candidate, samples, seed)?;
    if report.l1_abs > tol {
        return Err(Error::AdapterRejected { axiom: "(L1)", witness: format!("l(e) = {}", report.l1_abs) });
    }
    if report.l2_max > tol {
        let w = report.l2_witness.map(|x| x.to_string()).unwrap_or_default();
        return Err(Error::AdapterRejected {
            axiom: "(L2)",
            witness: format!("x = {w}, |l(x^-1) - l(x)| = {:.3e}", report.l2_max),
        });
    }
    if report.l3_max > tol {
        let w = report
            .l3_witness
            .map(|(x, y)| format!("x = {x}, y = {y}"))
            .unwrap_or_default();
        return Err(Error::AdapterRejected {
            axiom: "(L3)",
            witness: format!("{w}, excess = {:.3e}", report.l3_max),
        });
    }
    // left-invariance spot check: d(x, y) must equal d(e, x^-1 y)
    let xs = spec.sample_elements(samples.min(64), seed ^ 0x5bf0_3635);
    let ys = spec.sample_elements(samples.min(64), seed ^ 0x94d0_49bb);
    let e = spec.identity();
    for (x, y) in xs.iter().zip(ys.iter()) {
        let direct = (metric.eval)(x, y);
        let translated = (metric.eval)(&e, &spec.product(&spec.inverse(x)?, y)?);
        if (direct - translated).abs() > tol {
            return Err(Error::AdapterRejected {
                axiom: "left-invariance",
                witness: format!(
                    "x = {x}, y = {y}: d(x,y) = {direct}, d(e,x^-1 y) = {translated}"
                ),
            });
        }
    }
    if !report.properness_ok {
        return Err(Error::AdapterRejected {
            axiom: "(L4)",
            witness: report.properness_note,
        });
    }
    Ok(candidate)
}
