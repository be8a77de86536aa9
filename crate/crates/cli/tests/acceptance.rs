//! End-to-end acceptance suite: one test per certification guarantee the
//! project ships. Each test prints a single PASS line (visible with
//! `--nocapture`); a failure pinpoints the guarantee that broke.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use mixcert_core::{
    build, build_atilde, cesaro_form, check_atilde_identity, check_com1, check_com2,
    check_length_axioms, d_direct_power, integral_operator, integral_operator_d1, random_hermitian,
    random_unitary, run_pipeline, BuiltScenario, FlowScenario, GroupElement, GroupSpec,
    LengthFunction, MixingReport, MixingSpace, Operator, ScenarioConfig, Verdict, C64,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run_scenario(name: &str) -> MixingReport {
    let text = std::fs::read_to_string(config_path(name)).unwrap();
    let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
    let scenario = build(&cfg).unwrap();
    run_pipeline(&scenario).unwrap().report
}

fn unit_probe(dim: usize, seed: u64) -> DVector<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::<C64>::zeros(dim);
    for i in 0..dim {
        v[i] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.map(|z| z / C64::new(norm, 0.0))
}

fn commuting_flow(dim: usize, d: usize, seed: u64) -> FlowScenario {
    let q = random_unitary(dim, seed).unwrap();
    let mut gens = Vec::new();
    for k in 0..d {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(k as u64));
        let mut diag = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            diag[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        }
        let h = q
            .mul(&Operator::general(diag, "diag").unwrap())
            .unwrap()
            .mul(&q.adjoint())
            .unwrap();
        gens.push(Operator::hermitian(h.matrix().clone(), format!("H{k}")).unwrap());
    }
    let a = random_hermitian(dim, seed.wrapping_add(7)).unwrap();
    FlowScenario::new(gens, a).unwrap()
}

#[test]
fn criterion_01_lattice_regular_limit_is_minus_one() {
    let start = Instant::now();
    let r = run_scenario("z2_regular.toml");
    for l in &r.eigenvalues {
        assert!((l + 1.0).abs() <= 1e-9, "eigenvalue {l} strays from -1");
    }
    assert!(!r.pair_verdicts.is_empty());
    for p in &r.pair_verdicts {
        assert_eq!(p.verdict, Verdict::MixingAlongNet, "pair ({}, {})", p.phi, p.psi);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("[acceptance] 01 lattice regular limit = -1, all pairs mixing: PASS");
}

#[test]
fn criterion_02_free_group_regular_limit_is_minus_one() {
    let start = Instant::now();
    let r = run_scenario("f2_regular.toml");
    for l in &r.eigenvalues {
        assert!((l + 1.0).abs() <= 1e-9, "eigenvalue {l} strays from -1");
    }
    assert_eq!(r.overall, Verdict::MixingAlongNet);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("[acceptance] 02 free-group regular limit = -1: PASS");
}

#[test]
fn criterion_03_shift_scenario_is_exact() {
    let r = run_scenario("z_shift.toml");
    for l in &r.eigenvalues {
        assert!((l - 1.0).abs() <= 1e-12, "eigenvalue {l} strays from +1");
    }
    for row in &r.dj_rows {
        assert_eq!(row.residual, 0.0, "probe {} at j = {}", row.probe, row.j);
    }
    assert!(!r.decay.rows.is_empty());
    for row in &r.decay.rows {
        assert!(
            row.coeff_abs <= row.bound,
            "bound violated at j = {} ({}, {}): {} > {}",
            row.j,
            row.phi,
            row.psi,
            row.coeff_abs,
            row.bound
        );
    }
    println!("[acceptance] 03 shift scenario: D = +I exactly, bound dominates: PASS");
}

#[test]
fn criterion_04_cesaro_mean_telescopes() {
    for k in 0..20u64 {
        let dim = 2 + (k as usize * 3) % 15; // 2..=16
        let n = 1 + ((k * 5) % 32) as u32; // 1..=32
        let u = random_unitary(dim, 1000 + k).unwrap();
        let a = random_hermitian(dim, 2000 + k).unwrap();
        let phi = unit_probe(dim, 3000 + k);
        let lhs = cesaro_form(&u, &a, n, &phi).unwrap();
        let rhs = d_direct_power(&u, &a, n as i64, &phi).unwrap();
        let dev = (lhs - rhs).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(dev <= 1e-12, "trial {k} (dim {dim}, N {n}): deviation {dev}");
    }
    println!("[acceptance] 04 Cesàro mean equals direct commutator over 20 trials: PASS");
}

#[test]
fn criterion_05_smoothing_identities_hold() {
    let eps_list = [1e-1, 1e-2, 1e-3, 1e-4];
    for dim in [4usize, 8, 16] {
        let s = random_hermitian(dim, 600 + dim as u64).unwrap();
        let a = random_hermitian(dim, 700 + dim as u64).unwrap();
        let rep = check_com1(&s, &a, &eps_list).unwrap();
        assert!(rep.stable, "dim {dim}: smoothing residual not linear in eps");
        let res = check_com2(&s, &a, C64::new(0.0, 1.0)).unwrap();
        assert!(res <= 1e-10, "dim {dim}: resolvent commutation residual {res}");
    }
    println!("[acceptance] 05 smoothed-commutator and resolvent identities: PASS");
}

#[test]
fn criterion_06_compressed_conjugate_machinery() {
    for dim in [8usize, 16] {
        let flow = commuting_flow(dim, 2, 60 + dim as u64);
        let (_, raw) = build_atilde(&flow).unwrap();
        assert!(raw <= 1e-10, "dim {dim}: hermiticity residual {raw}");
        let x = GroupElement::Point(vec![54.0, 45.0]);
        let ell = (54.0f64 * 54.0 + 45.0 * 45.0).sqrt();
        let r32 = check_atilde_identity(&flow, &x, ell, 32).unwrap();
        let r64 = check_atilde_identity(&flow, &x, ell, 64).unwrap();
        assert!(r64 < r32, "dim {dim}: node doubling did not shrink {r32} -> {r64}");
        assert!(r64 <= 1e-8, "dim {dim}: 64-node residual {r64}");
    }
    let flow = commuting_flow(10, 1, 80);
    let t = 2.5;
    let general = integral_operator(&flow, &GroupElement::Point(vec![t]), t, 24).unwrap();
    let reduced = integral_operator_d1(&flow, t, 24).unwrap();
    let dev = general.sub(&reduced).unwrap().max_norm();
    assert!(dev <= 1e-10, "one-parameter form deviates by {dev}");
    println!("[acceptance] 06 compressed-conjugate integral identities: PASS");
}

#[test]
fn criterion_07_bounded_scenarios_witness_non_mixing() {
    for name in ["finite_dim.toml", "flow_d1.toml", "flow_d2.toml"] {
        let r = run_scenario(name);
        let a_norm = r.conjugate_norm.expect("dense scenario has a bounded conjugate");
        let bound = 2.0 * a_norm / r.net_lengths.last().unwrap();
        for l in &r.eigenvalues {
            assert!(l.abs() <= bound, "{name}: eigenvalue {l} above 2|A|/l = {bound}");
        }
        assert_eq!(r.overall, Verdict::NonMixingWitness, "{name}");
    }
    println!("[acceptance] 07 bounded scenarios collapse into the kernel with witnesses: PASS");
}

#[test]
fn criterion_08_coefficients_vanish_beyond_reach() {
    for name in ["z2_regular.toml", "f2_regular.toml", "z_shift.toml"] {
        let text = std::fs::read_to_string(config_path(name)).unwrap();
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        let scenario = build(&cfg).unwrap();
        let space = match &scenario.built {
            BuiltScenario::Regular(s) => s,
            BuiltScenario::Dense(_) => panic!("{name} should be a regular scenario"),
        };
        let probes = space.probes();
        let lengths = &space.net().lengths;
        let mut checked = 0usize;
        for phi in probes {
            for psi in probes {
                let reach = phi.support_radius() + psi.support_radius();
                for (j, ell) in lengths.iter().enumerate() {
                    if *ell > reach {
                        let c = space.coefficient(phi, j, psi).unwrap();
                        assert_eq!(c, C64::new(0.0, 0.0), "{name}: j = {}, reach {reach}", j + 1);
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 0, "{name}: no out-of-reach pairs exercised");
    }
    println!("[acceptance] 08 coefficients are exact zeros beyond the support reach: PASS");
}

#[test]
fn criterion_09_length_axioms_sampled_clean() {
    for (label, length) in [
        ("z1", LengthFunction::word(GroupSpec::lattice(1)).unwrap()),
        ("z2", LengthFunction::word(GroupSpec::lattice(2)).unwrap()),
        ("f2", LengthFunction::word(GroupSpec::free(2)).unwrap()),
    ] {
        let rep = check_length_axioms(&length, 1000, 7).unwrap();
        assert_eq!(rep.l1_abs, 0.0, "{label}");
        assert_eq!(rep.l2_max, 0.0, "{label}");
        assert_eq!(rep.l3_max, 0.0, "{label}");
        assert!(rep.properness_ok, "{label}: {}", rep.properness_note);
        if label == "z2" {
            assert_eq!(&rep.ball_sizes[..2], &[(1, 5), (2, 13)]);
        }
    }
    println!("[acceptance] 09 length axioms clean over 1000 samples per group: PASS");
}

#[test]
fn criterion_10_certify_runs_byte_identically() {
    let bin = env!("CARGO_BIN_EXE_mixcert");
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for (out, threads) in [(&out_a, "1"), (&out_b, "4")] {
        let status = Command::new(bin)
            .args(["certify", "--config"])
            .arg(config_path("f2_regular.toml"))
            .arg("--out")
            .arg(out)
            .env("MIXCERT_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["report.txt", "spectrum.csv", "dj_residuals.csv", "decay.csv"] {
        let a = std::fs::read(out_a.join(file)).unwrap();
        let b = std::fs::read(out_b.join(file)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{file} differs between runs");
    }
    println!("[acceptance] 10 certify output is byte-identical across runs: PASS");
}
