//! Shared fixtures for the benchmark suite.

use mixcert_core::{build, Scenario, ScenarioConfig};

/// Lattice regular scenario sized for quick iteration.
pub fn bench_regular(radius: f64, net_count: usize, probe_radius: u64) -> Scenario {
    let text = format!(
        r#"
        [scenario]
        name = "bench_z2"
        kind = "regular"

        [group]
        kind = "lattice"
        dim = 2

        [space]
        radius = {radius}

        [net]
        strategy = "ray"
        step = [1, 1]
        count = {net_count}

        [probes]
        kind = "ball_deltas"
        radius = {probe_radius}

        [limits]
        richardson = true
    "#
    );
    build(&ScenarioConfig::from_toml_str(&text).unwrap()).unwrap()
}

/// Dense power scenario of the given dimension.
pub fn bench_power(dim: usize, net_count: usize) -> Scenario {
    let text = format!(
        r#"
        [scenario]
        name = "bench_power"
        kind = "power"
        seed = 11

        [group]
        kind = "lattice"
        dim = 1

        [net]
        strategy = "geometric"
        step = [1]
        count = {net_count}

        [probes]
        kind = "eigenvectors"

        [dense]
        dim = {dim}

        [limits]
        eps_conv = 0.05

        [verifier]
        eps_ker = 0.05
    "#
    );
    build(&ScenarioConfig::from_toml_str(&text).unwrap()).unwrap()
}
