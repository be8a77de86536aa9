//! Scenario configuration, construction and the end-to-end pipeline.
//!
//! A scenario file (TOML) picks a group, a length function, a net, a probe
//! family and tolerance overrides. Building it yields one of two
//! [`MixingSpace`] implementations: the sparse regular representation or a
//! dense matrix representation (integer powers of a seeded unitary, or a
//! commuting flow with the compressed conjugate operator).

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::{
    make_net, DivergentNet, GroupElement, GroupKind, GroupSpec, LengthFunction, NetStrategy,
    ProperMap,
};
use crate::limit::{
    build_atilde, check_atilde_identity, estimate_limit, LimitSettings, MixingSpace,
};
use crate::operator::{random_hermitian, unitary_exp, unitary_power, Operator, C64};
use crate::representation::{
    apply_multiplier, coefficient as regular_coefficient, regular_apply, regular_commutator,
    safe_core_radius, FlowScenario, Multiplier, ProbeVector, RegularSpace,
};
use crate::verifier::{assemble_report, MixingReport, VerifierSettings};

// ---------------------------------------------------------------------------
// configuration schema
// ---------------------------------------------------------------------------

/// A net step / element literal: a word like `"aB"`, integer coordinates, or
/// real coordinates.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StepSpec {
    Word(String),
    Ints(Vec<i64>),
    Floats(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    pub name: String,
    /// `regular` | `power` | `flow`
    pub kind: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    7
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    /// `lattice` | `free` | `euclidean`
    pub kind: String,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LengthBlock {
    /// `word` | `euclidean`; default picked from the group kind
    #[serde(default)]
    pub base: Option<String>,
    /// `id` | `sqrt1p` | `pow`
    #[serde(default)]
    pub compose: Option<String>,
    #[serde(default)]
    pub power: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceBlock {
    pub radius: f64,
    /// `length` | `position`
    #[serde(default)]
    pub multiplier: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetBlock {
    /// `ray` | `geometric` | `custom`
    pub strategy: String,
    #[serde(default)]
    pub step: Option<StepSpec>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub elements: Option<Vec<StepSpec>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbesBlock {
    /// `ball_deltas` | `deltas` | `indicator` | `eigenvectors` | `random`
    pub kind: String,
    #[serde(default)]
    pub radius: Option<u64>,
    #[serde(default)]
    pub list: Option<Vec<StepSpec>>,
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LimitsBlock {
    #[serde(default)]
    pub eps_conv: Option<f64>,
    #[serde(default)]
    pub tail: Option<usize>,
    #[serde(default)]
    pub richardson: Option<bool>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifierBlock {
    #[serde(default)]
    pub eps_ker: Option<f64>,
    #[serde(default)]
    pub eps_mix: Option<f64>,
    #[serde(default)]
    pub eps_witness: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DenseBlock {
    #[serde(default)]
    pub dim: Option<usize>,
    /// Gauss–Legendre nodes for flow diagnostics.
    #[serde(default)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioBlock,
    pub group: GroupBlock,
    #[serde(default)]
    pub length: Option<LengthBlock>,
    #[serde(default)]
    pub space: Option<SpaceBlock>,
    pub net: NetBlock,
    pub probes: ProbesBlock,
    #[serde(default)]
    pub limits: Option<LimitsBlock>,
    #[serde(default)]
    pub verifier: Option<VerifierBlock>,
    #[serde(default)]
    pub dense: Option<DenseBlock>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("toml", e.to_string()))
    }
}

/// `"aB"` -> `[1, -2]`.
pub fn parse_word(s: &str) -> Result<Vec<i32>> {
    let mut out = Vec::with_capacity(s.len());
    for ch in s.chars() {
        if ch == 'e' && s.len() == 1 {
            return Ok(Vec::new());
        }
        let l = match ch {
            'a'..='z' => (ch as u8 - b'a') as i32 + 1,
            'A'..='Z' => -((ch as u8 - b'A') as i32 + 1),
            _ => {
                return Err(Error::config("net", format!("bad word character '{ch}'")));
            }
        };
        out.push(l);
    }
    Ok(crate::group::reduce_word(out))
}

fn element_from_step(spec: &GroupSpec, step: &StepSpec, block: &str) -> Result<GroupElement> {
    let el = match (spec.kind, step) {
        (GroupKind::Lattice { .. }, StepSpec::Ints(v)) => GroupElement::Lattice(v.clone()),
        (GroupKind::Free { .. }, StepSpec::Word(w)) => GroupElement::Word(parse_word(w)?),
        (GroupKind::Euclidean { .. }, StepSpec::Floats(v)) => GroupElement::Point(v.clone()),
        (GroupKind::Euclidean { .. }, StepSpec::Ints(v)) => {
            GroupElement::Point(v.iter().map(|&c| c as f64).collect())
        }
        _ => {
            return Err(Error::config(
                block,
                format!("step literal does not match group {}", spec.code()),
            ));
        }
    };
    spec.validate(&el)
        .map_err(|e| Error::config(block, e.to_string()))?;
    Ok(el)
}

fn group_from_block(b: &GroupBlock) -> Result<GroupSpec> {
    match b.kind.as_str() {
        "lattice" => {
            let dim = b.dim.ok_or_else(|| Error::config("group", "lattice needs dim"))?;
            if dim == 0 || dim > 8 {
                return Err(Error::config("group", format!("lattice dim {dim} out of 1..=8")));
            }
            Ok(GroupSpec::lattice(dim))
        }
        "free" => {
            let rank = b.rank.ok_or_else(|| Error::config("group", "free needs rank"))?;
            if rank == 0 || rank > 6 {
                return Err(Error::config("group", format!("free rank {rank} out of 1..=6")));
            }
            Ok(GroupSpec::free(rank))
        }
        "euclidean" => {
            let dim = b.dim.ok_or_else(|| Error::config("group", "euclidean needs dim"))?;
            if dim == 0 || dim > 8 {
                return Err(Error::config("group", format!("euclidean dim {dim} out of 1..=8")));
            }
            Ok(GroupSpec::euclidean(dim))
        }
        other => Err(Error::config("group", format!("unknown group kind '{other}'"))),
    }
}

fn length_from_block(spec: GroupSpec, b: &Option<LengthBlock>) -> Result<LengthFunction> {
    let block = b.clone().unwrap_or_default();
    let base = block.base.unwrap_or_else(|| {
        if matches!(spec.kind, GroupKind::Euclidean { .. }) {
            "euclidean".into()
        } else {
            "word".into()
        }
    });
    let l = match base.as_str() {
        "word" => LengthFunction::word(spec),
        "euclidean" => LengthFunction::euclidean(spec),
        other => {
            return Err(Error::config("length", format!("unknown base '{other}'")));
        }
    }
    .map_err(|e| Error::config("length", e.to_string()))?;
    let compose = match block.compose.as_deref().unwrap_or("id") {
        "id" => ProperMap::Identity,
        "sqrt1p" => ProperMap::SqrtShift,
        "pow" => {
            let p = block
                .power
                .ok_or_else(|| Error::config("length", "compose = \"pow\" needs power"))?;
            ProperMap::Power(p)
        }
        other => {
            return Err(Error::config("length", format!("unknown compose '{other}'")));
        }
    };
    l.with_compose(compose).map_err(|e| Error::config("length", e.to_string()))
}

fn net_from_block(spec: &GroupSpec, length: &LengthFunction, b: &NetBlock) -> Result<DivergentNet> {
    let strategy = match b.strategy.as_str() {
        "ray" | "geometric" => {
            let step = b
                .step
                .as_ref()
                .ok_or_else(|| Error::config("net", format!("{} strategy needs step", b.strategy)))?;
            let count = b
                .count
                .ok_or_else(|| Error::config("net", format!("{} strategy needs count", b.strategy)))?;
            let el = element_from_step(spec, step, "net")?;
            if b.strategy == "ray" {
                NetStrategy::Ray { step: el, count }
            } else {
                NetStrategy::Geometric { step: el, count }
            }
        }
        "custom" => {
            let els = b
                .elements
                .as_ref()
                .ok_or_else(|| Error::config("net", "custom strategy needs elements"))?;
            let list = els
                .iter()
                .map(|s| element_from_step(spec, s, "net"))
                .collect::<Result<Vec<_>>>()?;
            NetStrategy::Custom(list)
        }
        other => {
            return Err(Error::config("net", format!("unknown strategy '{other}'")));
        }
    };
    make_net(length, &strategy)
}

// ---------------------------------------------------------------------------
// the two mixing spaces
// ---------------------------------------------------------------------------

/// Sparse regular-representation scenario.
pub struct RegularMixingSpace {
    space: RegularSpace,
    multiplier: Multiplier,
    net: DivergentNet,
    ids: Vec<String>,
    probes: Vec<ProbeVector>,
}

impl RegularMixingSpace {
    pub fn new(
        space: RegularSpace,
        multiplier: Multiplier,
        net: DivergentNet,
        ids: Vec<String>,
        mut probes: Vec<ProbeVector>,
    ) -> Result<Self> {
        if probes.is_empty() || probes.len() != ids.len() {
            return Err(Error::config("probes", "empty or mismatched probe family"));
        }
        let core = safe_core_radius(&space, &net)?;
        for (id, p) in ids.iter().zip(probes.iter_mut()) {
            let n = p.norm();
            if n == 0.0 {
                return Err(Error::config("probes", format!("probe {id} is zero")));
            }
            p.scale_mut(C64::new(1.0 / n, 0.0));
            if p.support_radius() > core + 1e-9 {
                return Err(Error::SafeCore {
                    support: p.support_radius(),
                    step: space.radius() - core,
                    radius: space.radius(),
                });
            }
        }
        Ok(RegularMixingSpace { space, multiplier, net, ids, probes })
    }

    pub fn space(&self) -> &RegularSpace {
        &self.space
    }
}

impl MixingSpace for RegularMixingSpace {
    type V = ProbeVector;

    fn net(&self) -> &DivergentNet {
        &self.net
    }

    fn probe_ids(&self) -> &[String] {
        &self.ids
    }

    fn probes(&self) -> &[ProbeVector] {
        &self.probes
    }

    fn d_sample(&self, j: usize, v: &ProbeVector) -> Result<ProbeVector> {
        let x = &self.net.elements[j];
        let ell = self.net.lengths[j];
        let mut out = regular_commutator(&self.space, self.multiplier, x, v)?;
        out.unscale_mut(ell);
        Ok(out)
    }

    fn conjugate_apply(&self, v: &ProbeVector) -> Result<ProbeVector> {
        apply_multiplier(&self.space, self.multiplier, v)
    }

    fn coefficient(&self, phi: &ProbeVector, j: usize, psi: &ProbeVector) -> Result<C64> {
        regular_coefficient(&self.space, phi, &self.net.elements[j], psi)
    }

    fn inner(&self, a: &ProbeVector, b: &ProbeVector) -> C64 {
        a.inner(b)
    }

    fn lincomb(&self, terms: &[(C64, &ProbeVector)]) -> Result<ProbeVector> {
        ProbeVector::lincomb(terms, self.space.length())
    }

    fn translate_loss(&self, j: usize, psi: &ProbeVector) -> Result<f64> {
        Ok(regular_apply(&self.space, &self.net.elements[j], psi)?.dropped)
    }
}

/// How the dense scenario represents the group.
enum DenseRep {
    /// `U(n) = U0^n` over the rank-1 lattice.
    Power { u0: Operator },
    /// `U(x) = exp(-i x·H)` over `R^d`.
    Flow(FlowScenario),
}

/// Dense matrix scenario; net unitaries are cached at build time.
pub struct MatrixMixingSpace {
    #[allow(dead_code)]
    rep: DenseRep,
    conjugate: Operator,
    conjugate_norm: f64,
    net: DivergentNet,
    u_at: Vec<Operator>,
    u_at_adj: Vec<Operator>,
    ids: Vec<String>,
    probes: Vec<DVector<C64>>,
}

impl MatrixMixingSpace {
    fn new(
        rep: DenseRep,
        conjugate: Operator,
        net: DivergentNet,
        ids: Vec<String>,
        mut probes: Vec<DVector<C64>>,
    ) -> Result<Self> {
        if probes.is_empty() || probes.len() != ids.len() {
            return Err(Error::config("probes", "empty or mismatched probe family"));
        }
        for (id, p) in ids.iter().zip(probes.iter_mut()) {
            let n = p.norm();
            if n == 0.0 {
                return Err(Error::config("probes", format!("probe {id} is zero")));
            }
            *p /= C64::new(n, 0.0);
        }
        let mut u_at = Vec::with_capacity(net.len());
        for x in &net.elements {
            let u = match &rep {
                DenseRep::Power { u0 } => match x {
                    GroupElement::Lattice(v) if v.len() == 1 => unitary_power(u0, v[0])?,
                    _ => {
                        return Err(Error::GroupMismatch(format!(
                            "power scenario net element {x} is not a rank-1 lattice point"
                        )));
                    }
                },
                DenseRep::Flow(f) => f.unitary(x)?,
            };
            u_at.push(u);
        }
        let u_at_adj = u_at.iter().map(|u| u.adjoint()).collect();
        let conjugate_norm = conjugate.two_norm()?;
        Ok(MatrixMixingSpace {
            rep,
            conjugate,
            conjugate_norm,
            net,
            u_at,
            u_at_adj,
            ids,
            probes,
        })
    }

    pub fn conjugate(&self) -> &Operator {
        &self.conjugate
    }
}

impl MixingSpace for MatrixMixingSpace {
    type V = DVector<C64>;

    fn net(&self) -> &DivergentNet {
        &self.net
    }

    fn probe_ids(&self) -> &[String] {
        &self.ids
    }

    fn probes(&self) -> &[DVector<C64>] {
        &self.probes
    }

    fn d_sample(&self, j: usize, v: &DVector<C64>) -> Result<DVector<C64>> {
        let ell = self.net.lengths[j];
        let direct = self.conjugate.apply(v)?;
        let back = self.u_at_adj[j].apply(v)?;
        let mid = self.conjugate.apply(&back)?;
        let conjugated = self.u_at[j].apply(&mid)?;
        Ok((direct - conjugated).map(|z| z / ell))
    }

    fn conjugate_apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        self.conjugate.apply(v)
    }

    fn coefficient(&self, phi: &DVector<C64>, j: usize, psi: &DVector<C64>) -> Result<C64> {
        Ok(phi.dotc(&self.u_at[j].apply(psi)?))
    }

    fn inner(&self, a: &DVector<C64>, b: &DVector<C64>) -> C64 {
        a.dotc(b)
    }

    fn lincomb(&self, terms: &[(C64, &DVector<C64>)]) -> Result<DVector<C64>> {
        if terms.is_empty() {
            return Err(Error::DimensionMismatch("empty linear combination".into()));
        }
        let mut acc = DVector::<C64>::zeros(terms[0].1.len());
        for (c, v) in terms {
            if v.len() != acc.len() {
                return Err(Error::DimensionMismatch("mixed vector lengths".into()));
            }
            acc.axpy(*c, v, C64::new(1.0, 0.0));
        }
        Ok(acc)
    }

    fn translate_loss(&self, _j: usize, _psi: &DVector<C64>) -> Result<f64> {
        Ok(0.0)
    }

    fn conjugate_norm(&self) -> Option<f64> {
        Some(self.conjugate_norm)
    }
}

// ---------------------------------------------------------------------------
// building
// ---------------------------------------------------------------------------

/// A fully validated scenario, ready to run.
pub enum BuiltScenario {
    Regular(RegularMixingSpace),
    Dense(MatrixMixingSpace),
}

pub struct Scenario {
    pub name: String,
    pub digest: String,
    pub built: BuiltScenario,
    pub limit_settings: LimitSettings,
    pub verifier_settings: VerifierSettings,
    /// `(label, value)` diagnostics rendered into the report.
    pub diagnostics: Vec<(String, String)>,
}

fn limit_settings(b: &Option<LimitsBlock>) -> LimitSettings {
    let d = LimitSettings::default();
    let b = b.clone().unwrap_or_default();
    LimitSettings {
        eps_conv: b.eps_conv.unwrap_or(d.eps_conv),
        tail: b.tail.unwrap_or(d.tail),
        richardson: b.richardson.unwrap_or(d.richardson),
    }
}

fn verifier_settings(b: &Option<VerifierBlock>) -> VerifierSettings {
    let d = VerifierSettings::default();
    let b = b.clone().unwrap_or_default();
    VerifierSettings {
        eps_ker: b.eps_ker.unwrap_or(d.eps_ker),
        eps_mix: b.eps_mix.unwrap_or(d.eps_mix),
        eps_witness: b.eps_witness.unwrap_or(d.eps_witness),
    }
}

fn step_desc(s: &StepSpec) -> String {
    match s {
        StepSpec::Word(w) => w.clone(),
        StepSpec::Ints(v) => v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_"),
        StepSpec::Floats(v) => v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_"),
    }
}

fn lattice_id(g: &GroupElement) -> String {
    match g {
        GroupElement::Lattice(v) => {
            v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_")
        }
        GroupElement::Word(_) => g.to_string(),
        GroupElement::Point(p) => {
            p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_")
        }
    }
}

fn build_regular_probes(
    space: &RegularSpace,
    b: &ProbesBlock,
) -> Result<(Vec<String>, Vec<ProbeVector>)> {
    match b.kind.as_str() {
        "ball_deltas" => {
            let r = b
                .radius
                .ok_or_else(|| Error::config("probes", "ball_deltas needs radius"))?;
            let mut ids = Vec::new();
            let mut probes = Vec::new();
            for g in space.spec().enumerate_ball(r)? {
                if space.contains(&g)? {
                    ids.push(format!("d[{}]", lattice_id(&g)));
                    probes.push(ProbeVector::delta(space, g)?);
                }
            }
            Ok((ids, probes))
        }
        "deltas" => {
            let list = b
                .list
                .as_ref()
                .ok_or_else(|| Error::config("probes", "deltas needs list"))?;
            let mut ids = Vec::new();
            let mut probes = Vec::new();
            for s in list {
                let g = element_from_step(space.spec(), s, "probes")?;
                ids.push(format!("d[{}]", lattice_id(&g)));
                probes.push(ProbeVector::delta(space, g)?);
            }
            Ok((ids, probes))
        }
        "indicator" => {
            let r = b
                .radius
                .ok_or_else(|| Error::config("probes", "indicator needs radius"))?;
            Ok((
                vec![format!("ind[{r}]")],
                vec![ProbeVector::ball_indicator(space, r)?],
            ))
        }
        other => Err(Error::config(
            "probes",
            format!("probe kind '{other}' not available on a regular scenario"),
        )),
    }
}

fn build_dense_probes(
    basis: &Operator,
    dim: usize,
    b: &ProbesBlock,
    seed: u64,
) -> Result<(Vec<String>, Vec<DVector<C64>>)> {
    match b.kind.as_str() {
        "eigenvectors" => {
            let count = b.count.unwrap_or(dim).min(dim);
            if count == 0 {
                return Err(Error::config("probes", "eigenvectors count must be >= 1"));
            }
            let mut ids = Vec::new();
            let mut probes = Vec::new();
            for k in 0..count {
                ids.push(format!("eig[{k}]"));
                probes.push(DVector::from_iterator(
                    dim,
                    basis.matrix().column(k).iter().copied(),
                ));
            }
            Ok((ids, probes))
        }
        "random" => {
            let count = b
                .count
                .ok_or_else(|| Error::config("probes", "random needs count"))?;
            if count == 0 {
                return Err(Error::config("probes", "random count must be >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x70b3_95ab);
            let mut ids = Vec::new();
            let mut probes = Vec::new();
            for k in 0..count {
                ids.push(format!("rnd[{k}]"));
                probes.push(DVector::from_fn(dim, |_, _| {
                    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
                }));
            }
            Ok((ids, probes))
        }
        other => Err(Error::config(
            "probes",
            format!("probe kind '{other}' not available on a dense scenario"),
        )),
    }
}

/// Builds and validates a scenario from its parsed config.
pub fn build(config: &ScenarioConfig) -> Result<Scenario> {
    let spec = group_from_block(&config.group)?;
    let length = length_from_block(spec, &config.length)?;
    let limit_settings = limit_settings(&config.limits);
    let verifier_settings = verifier_settings(&config.verifier);
    let seed = config.scenario.seed;
    let mut diagnostics: Vec<(String, String)> = Vec::new();

    let built = match config.scenario.kind.as_str() {
        "regular" => {
            if matches!(spec.kind, GroupKind::Euclidean { .. }) {
                return Err(Error::config(
                    "scenario",
                    "regular scenarios need a discrete group",
                ));
            }
            let space_block = config
                .space
                .as_ref()
                .ok_or_else(|| Error::config("space", "regular scenarios need [space]"))?;
            let multiplier = match space_block.multiplier.as_deref().unwrap_or("length") {
                "length" => Multiplier::Length,
                "position" => Multiplier::Position,
                other => {
                    return Err(Error::config("space", format!("unknown multiplier '{other}'")));
                }
            };
            let space = RegularSpace::new(length.clone(), space_block.radius)?;
            if multiplier == Multiplier::Position {
                // defined for Z with the identity composition only
                multiplier
                    .value(&space, &spec.identity())
                    .map_err(|e| Error::config("space", e.to_string()))?;
                if length.compose() != ProperMap::Identity {
                    return Err(Error::config(
                        "space",
                        "position multiplier requires compose = \"id\"",
                    ));
                }
            }
            let net = net_from_block(&spec, &length, &config.net)?;
            let (ids, probes) = build_regular_probes(&space, &config.probes)?;
            BuiltScenario::Regular(RegularMixingSpace::new(space, multiplier, net, ids, probes)?)
        }
        "power" => {
            if spec.kind != (GroupKind::Lattice { dim: 1 }) {
                return Err(Error::config(
                    "scenario",
                    "power scenarios run over the rank-1 lattice",
                ));
            }
            let dense = config.dense.clone().unwrap_or_default();
            let dim = dense.dim.unwrap_or(8);
            if dim < 2 || dim > 64 {
                return Err(Error::config("dense", format!("dim {dim} out of 2..=64")));
            }
            let h0 = random_hermitian(dim, seed)?;
            let u0 = unitary_exp(&h0, 1.0)?;
            let a = random_hermitian(dim, seed.wrapping_add(1))?;
            let net = net_from_block(&spec, &length, &config.net)?;
            let (ids, probes) = build_dense_probes(
                &Operator::general(h0.spectral()?.basis.clone(), "eigenbasis")?,
                dim,
                &config.probes,
                seed,
            )?;
            BuiltScenario::Dense(MatrixMixingSpace::new(
                DenseRep::Power { u0 },
                a,
                net,
                ids,
                probes,
            )?)
        }
        "flow" => {
            let d = match spec.kind {
                GroupKind::Euclidean { dim } => dim,
                _ => {
                    return Err(Error::config("scenario", "flow scenarios need a Euclidean group"));
                }
            };
            let dense = config.dense.clone().unwrap_or_default();
            let dim = dense.dim.unwrap_or(8);
            if dim < 2 || dim > 64 {
                return Err(Error::config("dense", format!("dim {dim} out of 2..=64")));
            }
            let nodes = dense.nodes.unwrap_or(32);
            if nodes < 2 || nodes > 256 {
                return Err(Error::config("dense", format!("nodes {nodes} out of 2..=256")));
            }
            // commuting generators from one seeded eigenbasis
            let basis = crate::operator::random_unitary(dim, seed)?;
            let mut gens = Vec::with_capacity(d);
            for k in 0..d {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    seed.wrapping_mul(1000).wrapping_add(k as u64),
                );
                let diag: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
                for (i, &l) in diag.iter().enumerate() {
                    m[(i, i)] = C64::new(l, 0.0);
                }
                let h = Operator::hermitian(
                    basis.matrix() * m * basis.matrix().adjoint(),
                    format!("H{k}"),
                )?;
                gens.push(h);
            }
            let a = random_hermitian(dim, seed.wrapping_add(7))?;
            let flow = FlowScenario::new(gens, a)?;
            let (atilde, herm_residual) = build_atilde(&flow)?;
            diagnostics.push((
                "atilde hermiticity residual".into(),
                format!("{herm_residual:.3e}"),
            ));
            let net = net_from_block(&spec, &length, &config.net)?;
            // quadrature testimony at the shortest net point, where the
            // oscillation is mild enough for the configured node count
            let x0 = net.elements[0].clone();
            let ell0 = net.lengths[0];
            let r_lo = check_atilde_identity(&flow, &x0, ell0, nodes)?;
            let r_hi = check_atilde_identity(&flow, &x0, ell0, nodes * 2)?;
            diagnostics.push((
                format!("atilde identity residual at {x0} (GL{nodes})"),
                format!("{r_lo:.3e}"),
            ));
            diagnostics.push((
                format!("atilde identity residual at {x0} (GL{})", nodes * 2),
                format!("{r_hi:.3e}"),
            ));
            let (ids, probes) = build_dense_probes(&basis, dim, &config.probes, seed)?;
            BuiltScenario::Dense(MatrixMixingSpace::new(
                DenseRep::Flow(flow),
                atilde,
                net,
                ids,
                probes,
            )?)
        }
        other => {
            return Err(Error::config("scenario", format!("unknown kind '{other}'")));
        }
    };

    let digest = digest_string(config, &limit_settings, &verifier_settings);
    Ok(Scenario {
        name: config.scenario.name.clone(),
        digest,
        built,
        limit_settings,
        verifier_settings,
        diagnostics,
    })
}

fn digest_string(c: &ScenarioConfig, ls: &LimitSettings, vs: &VerifierSettings) -> String {
    let group = match c.group.kind.as_str() {
        "free" => format!("f{}", c.group.rank.unwrap_or(0)),
        "lattice" => format!("z{}", c.group.dim.unwrap_or(0)),
        _ => format!("r{}", c.group.dim.unwrap_or(0)),
    };
    let lb = c.length.clone().unwrap_or_default();
    let length = format!(
        "{}∘{}",
        lb.compose.unwrap_or_else(|| "id".into()),
        lb.base.unwrap_or_else(|| "auto".into())
    );
    let net = format!(
        "{}:{}x{}",
        c.net.strategy,
        c.net.step.as_ref().map(step_desc).unwrap_or_else(|| "-".into()),
        c.net
            .count
            .map(|n| n.to_string())
            .unwrap_or_else(|| c.net.elements.as_ref().map(|e| e.len()).unwrap_or(0).to_string()),
    );
    let probes = format!(
        "{}:{}",
        c.probes.kind,
        c.probes
            .radius
            .map(|r| r.to_string())
            .or_else(|| c.probes.count.map(|n| n.to_string()))
            .unwrap_or_else(|| c.probes.list.as_ref().map(|l| l.len()).unwrap_or(0).to_string()),
    );
    format!(
        "{name}|{kind}|{group}|{length}|net={net}|probes={probes}|seed={seed}|conv={eps_conv:e}/{tail}|rich={rich}|ker={eps_ker:e}|mix={eps_mix:e}|wit={eps_witness:e}",
        name = c.scenario.name,
        kind = c.scenario.kind,
        seed = c.scenario.seed,
        eps_conv = ls.eps_conv,
        tail = ls.tail,
        rich = if ls.richardson { "on" } else { "off" },
        eps_ker = vs.eps_ker,
        eps_mix = vs.eps_mix,
        eps_witness = vs.eps_witness,
    )
}

/// Full pipeline result.
pub struct PipelineOutput {
    pub report: MixingReport,
    pub diagnostics: Vec<(String, String)>,
}

/// Estimates limits and assembles the verification report.
pub fn run_pipeline(s: &Scenario) -> Result<PipelineOutput> {
    let report = match &s.built {
        BuiltScenario::Regular(space) => {
            let est = estimate_limit(space, &s.limit_settings)?;
            assemble_report(space, &est, &s.digest, &s.verifier_settings, space.conjugate_norm())?
        }
        BuiltScenario::Dense(space) => {
            let est = estimate_limit(space, &s.limit_settings)?;
            assemble_report(space, &est, &s.digest, &s.verifier_settings, space.conjugate_norm())?
        }
    };
    Ok(PipelineOutput { report, diagnostics: s.diagnostics.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::Verdict;

    #[test]
    fn parse_word_handles_case_and_identity() {
        assert_eq!(parse_word("aB").unwrap(), vec![1, -2]);
        assert_eq!(parse_word("e").unwrap(), Vec::<i32>::new());
        assert_eq!(parse_word("aA").unwrap(), Vec::<i32>::new());
        assert!(parse_word("a1").is_err());
    }

    fn mini_z_shift() -> ScenarioConfig {
        ScenarioConfig::from_toml_str(
            r#"
            [scenario]
            name = "mini_shift"
            kind = "regular"

            [group]
            kind = "lattice"
            dim = 1

            [space]
            radius = 14.0
            multiplier = "position"

            # lengths 2..12: the tail outruns the probe reach r_phi + r_psi = 4,
            # so tail coefficients vanish identically
            [net]
            strategy = "ray"
            step = [2]
            count = 6

            [probes]
            kind = "ball_deltas"
            radius = 2
        "#,
        )
        .unwrap()
    }

    #[test]
    fn shift_scenario_yields_identity_limit_exactly() {
        let s = build(&mini_z_shift()).unwrap();
        let out = run_pipeline(&s).unwrap();
        let r = &out.report;
        assert!(r.converged_all);
        // every residual is literally zero
        for row in &r.dj_rows {
            assert_eq!(row.residual, 0.0, "probe {} j {}", row.probe, row.j);
        }
        for l in &r.eigenvalues {
            assert!((l - 1.0).abs() < 1e-12, "eigenvalue {l}");
        }
        assert_eq!(r.kernel_dim, 0);
        assert_eq!(r.overall, Verdict::MixingAlongNet);
        // certified bound dominates in every row
        for row in &r.decay.rows {
            assert!(
                row.coeff_abs <= row.bound,
                "row j={} {}/{}: {} > {}",
                row.j,
                row.phi,
                row.psi,
                row.coeff_abs,
                row.bound
            );
        }
    }

    #[test]
    fn config_errors_name_their_block() {
        let mut c = mini_z_shift();
        c.net.strategy = "spiral".into();
        match build(&c) {
            Err(Error::Config { block, .. }) => assert_eq!(block, "net"),
            Err(other) => panic!("expected config error, got {other}"),
            Ok(_) => panic!("expected config error, got a scenario"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r = ScenarioConfig::from_toml_str(
            r#"
            [scenario]
            name = "x"
            kind = "regular"
            typo_field = 3

            [group]
            kind = "lattice"
            dim = 1

            [net]
            strategy = "ray"

            [probes]
            kind = "ball_deltas"
        "#,
        );
        assert!(matches!(r, Err(Error::Config { .. })));
    }

    #[test]
    fn infeasible_radius_is_refused() {
        let mut c = mini_z_shift();
        c.space.as_mut().unwrap().radius = 5.0;
        // net reaches 12, ball radius 5: no safe core at all
        assert!(matches!(build(&c), Err(Error::InfeasibleRadius { .. })));
    }

    #[test]
    fn probes_outside_safe_core_are_refused() {
        let mut c = mini_z_shift();
        c.probes.radius = Some(8);
        // core = 14 - 12 = 2 < 8
        assert!(matches!(build(&c), Err(Error::SafeCore { .. })));
    }

    fn mini_power() -> ScenarioConfig {
        ScenarioConfig::from_toml_str(
            r#"
            [scenario]
            name = "mini_power"
            kind = "power"
            seed = 11

            [group]
            kind = "lattice"
            dim = 1

            [net]
            strategy = "geometric"
            step = [1]
            count = 8

            [probes]
            kind = "eigenvectors"

            [dense]
            dim = 6

            [limits]
            eps_conv = 0.05

            [verifier]
            eps_ker = 0.05
        "#,
        )
        .unwrap()
    }

    #[test]
    fn power_scenario_shrinks_into_kernel() {
        let s = build(&mini_power()).unwrap();
        let out = run_pipeline(&s).unwrap();
        let r = &out.report;
        // |lambda| <= 2 |A| / l_last
        let bound = 2.0 * r.conjugate_norm.unwrap() / r.net_lengths.last().unwrap();
        for l in &r.eigenvalues {
            assert!(l.abs() <= bound, "eigenvalue {l} above {bound}");
        }
        assert_eq!(r.kernel_dim, r.span_dim);
        assert_eq!(r.overall, Verdict::NonMixingWitness);
        // diagonal pairs carry modulus-one coefficients
        for p in &r.pair_verdicts {
            if p.phi == p.psi {
                assert!(p.tail_raw_min > 0.999, "pair {} min {}", p.phi, p.tail_raw_min);
            }
        }
    }

    #[test]
    fn flow_scenario_builds_with_diagnostics() {
        let c = ScenarioConfig::from_toml_str(
            r#"
            [scenario]
            name = "mini_flow"
            kind = "flow"
            seed = 3

            [group]
            kind = "euclidean"
            dim = 2

            # tail residuals obey 2 |A~| (1/l_{j-1} + 1/l_j); ten doubling
            # steps push the last three under eps_conv by a safe margin
            [net]
            strategy = "geometric"
            step = [1.0, 0.5]
            count = 10

            [probes]
            kind = "eigenvectors"

            [dense]
            dim = 5
            nodes = 32

            [limits]
            eps_conv = 0.05

            [verifier]
            eps_ker = 0.05
        "#,
        )
        .unwrap();
        let s = build(&c).unwrap();
        assert!(s.diagnostics.len() >= 3);
        let out = run_pipeline(&s).unwrap();
        assert_eq!(out.report.overall, Verdict::NonMixingWitness);
        assert!(out.report.converged_all);
    }
}
