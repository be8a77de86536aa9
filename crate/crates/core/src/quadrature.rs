//! Gauss–Legendre nodes on [0, 1].
//!
//! Nodes are roots of P_n found by Newton iteration from the Chebyshev
//! initial guess; the recurrence also yields P_n' for the weights. For the
//! node counts used here (<= 128) the iteration converges to machine
//! precision in a handful of steps and is fully deterministic.

/// Returns `(nodes, weights)` on `[0, 1]`, nodes ascending,
/// `sum(weights) = 1`.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && n <= 512, "node count {n} out of range");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // root of P_n near cos(pi (k + 3/4) / (n + 1/2)), descending in k
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        // on [-1, 1]: w = 2 / ((1 - x^2) P_n'(x)^2)
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - k] = 0.5 * (x + 1.0);
        weights[n - 1 - k] = 0.5 * w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
