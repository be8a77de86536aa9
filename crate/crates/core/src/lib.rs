//! Numerical certification of strong mixing for unitary group
//! representations.
//!
//! The pipeline: pick a group with a proper length function, walk a
//! divergent net `x_j`, sample the normalized commutators
//! `D_j = (1/l(x_j)) [A, U(x_j)] U(x_j)^-1` against a probe family,
//! estimate the strong limit `D`, split the probe span into kernel and
//! co-kernel of `D`, and verify that matrix coefficients `<phi, U(x_j) psi>`
//! decay at the certified rate for probes in the co-kernel — or exhibit a
//! concrete witness that they do not decay at all.

pub mod error;
pub mod group;
pub mod limit;
pub mod operator;
pub mod parallel;
pub mod quadrature;
pub mod representation;
pub mod scenario;
pub mod verifier;

pub use error::{Error, Result};
pub use group::{
    check_length_axioms, length_from_pseudometric, make_net, AxiomReport, DivergentNet,
    GroupElement, GroupKind, GroupSpec, LengthFunction, NetStrategy, ProperMap, PseudoMetric,
};
pub use limit::{
    build_atilde, cesaro_form, check_atilde_identity, d_direct, d_direct_power, estimate_limit,
    integral_form, integral_operator, integral_operator_d1, LimitEstimate, LimitSettings,
    MixingSpace, ProbeTrace,
};
pub use operator::{
    a_epsilon, check_com1, check_com2, commutator, conjugation_flow, pi_of_h, random_hermitian,
    random_unitary, resolvent, unitary_exp, unitary_power, Com1Report, Operator,
    SpectralDecomposition, C64,
};
pub use representation::{
    apply_multiplier, coefficient, matrix_multiplier, matrix_rep, regular_apply,
    regular_commutator, safe_core_radius, AppliedProbe, FlowScenario, Multiplier, ProbeVector,
    RegularSpace,
};
pub use scenario::{
    build, run_pipeline, BuiltScenario, MatrixMixingSpace, PipelineOutput, RegularMixingSpace,
    Scenario, ScenarioConfig,
};
pub use verifier::{
    assemble_report, certified_bound, compress_d, decay_table, spectral_cluster, verdict,
    CompressedD, DecayRow, DecaySet, MixingReport, PairVerdict, Verdict, VerifierSettings,
};
