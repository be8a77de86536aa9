//! Self-contained identity suite over randomized operator families.
//!
//! Every check compares two independent computations of the same quantity,
//! so a failure localizes a defect instead of merely flagging "numbers moved".

use mixcert_core::{
    build_atilde, cesaro_form, check_atilde_identity, check_com1, check_com2, d_direct_power,
    integral_operator, integral_operator_d1, random_hermitian, random_unitary, FlowScenario,
    GroupElement, Operator, C64,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const COM2_TOL: f64 = 1e-10;
const CESARO_TOL: f64 = 1e-12;
const HERM_TOL: f64 = 1e-10;
const INTEGRAL_TOL: f64 = 1e-8;
const D1_TOL: f64 = 1e-10;

struct Line {
    label: String,
    detail: String,
    pass: bool,
}

fn random_probe(dim: usize, seed: u64) -> DVector<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::<C64>::zeros(dim);
    for i in 0..dim {
        v[i] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.map(|z| z / C64::new(norm, 0.0))
}

fn vec_max(v: &DVector<C64>) -> f64 {
    v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn flow_fixture(dim: usize, d: usize, seed: u64) -> Result<FlowScenario, mixcert_core::Error> {
    // Commuting hermitian generators: shared random eigenbasis, independent
    // real spectra. The conjugate operator is deliberately unrelated.
    let q = random_unitary(dim, seed)?;
    let mut gens = Vec::with_capacity(d);
    for k in 0..d {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(k as u64));
        let mut diag = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            diag[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        }
        let h = q.mul(&Operator::general(diag, "diag")?)?.mul(&q.adjoint())?;
        gens.push(Operator::hermitian(h.matrix().clone(), format!("H{k}"))?);
    }
    let a = random_hermitian(dim, seed.wrapping_add(7))?;
    FlowScenario::new(gens, a)
}

fn check_lines(seed: u64, max_dim: usize) -> Result<Vec<Line>, mixcert_core::Error> {
    let mut lines = Vec::new();
    let dims: Vec<usize> = [4usize, 8, 12]
        .into_iter()
        .filter(|d| *d <= max_dim)
        .collect();

    // 1. smoothed-commutator residual is linear in eps
    let eps_list = [1e-1, 1e-2, 1e-3, 1e-4];
    for &dim in &dims {
        let s = random_hermitian(dim, seed.wrapping_add(dim as u64))?;
        let a = random_hermitian(dim, seed.wrapping_add(100 + dim as u64))?;
        let rep = check_com1(&s, &a, &eps_list)?;
        let drift = rep
            .rows
            .iter()
            .map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max)
            / rep
                .rows
                .iter()
                .map(|r| r.ratio)
                .fold(f64::INFINITY, f64::min);
        lines.push(Line {
            label: format!("smoothed commutator linear in eps (dim {dim})"),
            detail: format!("ratio spread {drift:.3e}, C ~ {:.3e}", rep.c_estimate),
            pass: rep.stable,
        });
    }

    // 2. resolvent commutation identity [R, A] = -R [S, A] R
    for &dim in &dims {
        let s = random_hermitian(dim, seed.wrapping_add(dim as u64))?;
        let a = random_hermitian(dim, seed.wrapping_add(100 + dim as u64))?;
        let res = check_com2(&s, &a, C64::new(0.0, 1.0))?;
        lines.push(Line {
            label: format!("resolvent commutation (dim {dim})"),
            detail: format!("residual {res:.3e}"),
            pass: res <= COM2_TOL,
        });
    }

    // 3. Cesàro telescoping against the direct normalized commutator
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let cap = max_dim.min(16).max(2);
    for k in 0..20u64 {
        let dim = rng.gen_range(2..=cap);
        let n = rng.gen_range(1..=32u32);
        let u = random_unitary(dim, seed.wrapping_add(500 + k))?;
        let a = random_hermitian(dim, seed.wrapping_add(700 + k))?;
        let phi = random_probe(dim, seed.wrapping_add(900 + k));
        let lhs = cesaro_form(&u, &a, n, &phi)?;
        let rhs = d_direct_power(&u, &a, n as i64, &phi)?;
        worst = worst.max(vec_max(&(lhs - rhs)));
    }
    lines.push(Line {
        label: "Cesàro mean telescopes to the direct form (20 trials)".into(),
        detail: format!("max deviation {worst:.3e}"),
        pass: worst <= CESARO_TOL,
    });

    // 4. compressed conjugate is hermitian and norm-contractive
    for d in [1usize, 2] {
        let dim = max_dim.min(12).max(3);
        let flow = flow_fixture(dim, d, seed.wrapping_add(40 + d as u64))?;
        let (atilde, raw) = build_atilde(&flow)?;
        let shrink = atilde.two_norm()? <= flow.conjugate().two_norm()? + 1e-12;
        lines.push(Line {
            label: format!("compressed conjugate hermitian (rank {d})"),
            detail: format!("raw residual {raw:.3e}"),
            pass: raw <= HERM_TOL && shrink,
        });
    }

    // 5. integral identity [Atilde, U(x)] = ell D(x) U(x); the residual is
    //    pure quadrature error, so doubling the node count must shrink it
    //    and 64 nodes must resolve it below INTEGRAL_TOL.
    {
        let dim = max_dim.min(8).max(3);
        let flow = flow_fixture(dim, 2, seed.wrapping_add(60))?;
        // phases of order |x| ~ 70 defeat 32 nodes outright while 64 nodes
        // still land at the float floor, so the decrease is structural
        let x = GroupElement::Point(vec![54.0, 45.0]);
        let ell = (54.0f64 * 54.0 + 45.0 * 45.0).sqrt();
        let r32 = check_atilde_identity(&flow, &x, ell, 32)?;
        let r64 = check_atilde_identity(&flow, &x, ell, 64)?;
        lines.push(Line {
            label: "integral commutator identity (node doubling)".into(),
            detail: format!("residual {r32:.3e} -> {r64:.3e}"),
            pass: r64 < r32 && r64 <= INTEGRAL_TOL,
        });
    }

    // 6. rank-one substitution form agrees with the general integral
    {
        let dim = max_dim.min(10).max(3);
        let flow = flow_fixture(dim, 1, seed.wrapping_add(80))?;
        let t = 2.5;
        let x = GroupElement::Point(vec![t]);
        let general = integral_operator(&flow, &x, t, 24)?;
        let reduced = integral_operator_d1(&flow, t, 24)?;
        let dev = general.sub(&reduced)?.max_norm();
        lines.push(Line {
            label: "one-parameter substitution form".into(),
            detail: format!("deviation {dev:.3e}"),
            pass: dev <= D1_TOL,
        });
    }

    Ok(lines)
}

pub fn run_identities(seed: u64, max_dim: usize) -> i32 {
    if !(4..=64).contains(&max_dim) {
        eprintln!("error: --max-dim must lie in 4..=64, got {max_dim}");
        return 2;
    }
    println!("operator identity suite (seed {seed}, max dim {max_dim})");
    let lines = match check_lines(seed, max_dim) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: identity suite aborted: {e}");
            return 1;
        }
    };
    let mut failed = 0usize;
    for line in &lines {
        println!(
            "  {:<52} {:<38} {}",
            line.label,
            line.detail,
            if line.pass { "PASS" } else { "FAIL" }
        );
        if !line.pass {
            failed += 1;
        }
    }
    println!(
        "summary: {} / {} identity checks hold",
        lines.len() - failed,
        lines.len()
    );
    if failed == 0 {
        0
    } else {
        1
    }
}
