//! Length-axiom runner: checks (L1)-(L4) for a built-in group, or drives a
//! pseudo-metric adapter through admission and reports the rejection witness.

use mixcert_core::{
    check_length_axioms, length_from_pseudometric, AxiomReport, Error, GroupSpec, LengthFunction,
    PseudoMetric,
};

const AXIOM_TOL: f64 = 1e-9;

fn word_metric(spec: GroupSpec, scale: f64) -> PseudoMetric {
    PseudoMetric::new(format!("word/{}", 1.0 / scale), move |x, y| {
        let step = spec
            .product(&spec.inverse(x).expect("same group"), y)
            .expect("same group");
        spec.word_length(&step).expect("same group") as f64 * scale
    })
}

fn build_length(kind: &str, samples: usize, seed: u64) -> Result<LengthFunction, Error> {
    // Plain kinds: z<d>, f<r>, r<d>. Adapter demos exercise the admission
    // path, including ones designed to be turned away.
    match kind {
        "z2-scaled" => {
            let spec = GroupSpec::lattice(2);
            length_from_pseudometric(spec, &word_metric(spec, 0.5), samples, seed)
        }
        "z2-flat" => {
            let spec = GroupSpec::lattice(2);
            let flat = PseudoMetric::new("flat", |_, _| 0.0);
            length_from_pseudometric(spec, &flat, samples, seed)
        }
        "r2-squared" => {
            let spec = GroupSpec::euclidean(2);
            let sq = PseudoMetric::new("euclid^2", |x, y| {
                use mixcert_core::GroupElement::Point;
                match (x, y) {
                    (Point(a), Point(b)) => a
                        .iter()
                        .zip(b)
                        .map(|(u, v)| (u - v) * (u - v))
                        .sum::<f64>(),
                    _ => f64::NAN,
                }
            });
            length_from_pseudometric(spec, &sq, samples, seed)
        }
        _ => {
            let (head, tail) = kind.split_at(1.min(kind.len()));
            let n: usize = tail.parse().map_err(|_| {
                Error::Unsupported(format!("unknown group kind '{kind}'"))
            })?;
            match head {
                "z" if (1..=8).contains(&n) => LengthFunction::word(GroupSpec::lattice(n)),
                "f" if (1..=6).contains(&n) => LengthFunction::word(GroupSpec::free(n)),
                "r" if (1..=8).contains(&n) => LengthFunction::euclidean(GroupSpec::euclidean(n)),
                _ => Err(Error::Unsupported(format!("unknown group kind '{kind}'"))),
            }
        }
    }
}

fn print_report(rep: &AxiomReport, seed: u64) -> bool {
    println!(
        "length axiom check: group {}, base {}, {} samples, seed {seed}",
        rep.group, rep.base, rep.samples
    );
    let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
    println!(
        "  (L1) |l(e)| = {:.3e}  {}",
        rep.l1_abs,
        mark(rep.l1_abs <= AXIOM_TOL)
    );
    print!("  (L2) max |l(x^-1) - l(x)| = {:.3e}", rep.l2_max);
    if rep.l2_max > AXIOM_TOL {
        if let Some(w) = &rep.l2_witness {
            print!("  witness x = {w}");
        }
    }
    println!("  {}", mark(rep.l2_max <= AXIOM_TOL));
    print!("  (L3) max subadditivity excess = {:.3e}", rep.l3_max);
    if rep.l3_max > AXIOM_TOL {
        if let Some((x, y)) = &rep.l3_witness {
            print!("  witness (x, y) = ({x}, {y})");
        }
    }
    println!("  {}", mark(rep.l3_max <= AXIOM_TOL));
    println!(
        "  (L4) proper: {}  {}",
        rep.properness_note,
        mark(rep.properness_ok)
    );
    if !rep.ball_sizes.is_empty() {
        let sizes: Vec<String> = rep
            .ball_sizes
            .iter()
            .map(|(r, n)| format!("|B_{r}| = {n}"))
            .collect();
        println!("  balls: {}", sizes.join(", "));
    }
    rep.clean(AXIOM_TOL)
}

pub fn run_axioms(kind: &str, samples: usize, seed: u64) -> i32 {
    if samples == 0 {
        eprintln!("error: --samples must be positive");
        return 2;
    }
    let length = match build_length(kind, samples, seed) {
        Ok(l) => l,
        Err(Error::AdapterRejected { axiom, witness }) => {
            println!("adapter rejected: axiom {axiom} fails");
            println!("  witness: {witness}");
            return 1;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let rep = match check_length_axioms(&length, samples, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: axiom check aborted: {e}");
            return 2;
        }
    };
    if print_report(&rep, seed) {
        println!("all axioms hold");
        0
    } else {
        println!("violations found");
        1
    }
}
