//! Deterministic text/CSV rendering of certification reports.
//!
//! All floats use `{:.16e}` (17 significant digits) so files are
//! byte-identical across runs and thread settings. Writes go through a
//! temp-file-and-rename so a crashed run never leaves a half-written report.

use std::fs;
use std::io;
use std::path::Path;

use mixcert_core::{MixingReport, Verdict};

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Short float for prose lines.
fn fmt_s(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn atomic_write(path: &Path, content: &str) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    fs::write(&tmp_path, content)?;
    fs::rename(&tmp_path, path)
}

pub fn spectrum_csv(r: &MixingReport) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, l) in r.eigenvalues.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f(*l)));
    }
    out
}

pub fn dj_residuals_csv(r: &MixingReport) -> String {
    let mut out = String::from("j,ell,probe_id,residual\n");
    for row in &r.dj_rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.j,
            fmt_f(row.ell),
            row.probe,
            fmt_f(row.residual)
        ));
    }
    out
}

pub fn decay_csv(r: &MixingReport) -> String {
    let mut out = String::from("j,ell,phi_id,psi_id,coeff_abs,certified_bound\n");
    for row in &r.decay.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.j,
            fmt_f(row.ell),
            row.phi,
            row.psi,
            fmt_f(row.coeff_abs),
            fmt_f(row.bound)
        ));
    }
    out
}

fn cluster_label(center: f64) -> String {
    if center == center.round() {
        format!("{}", center as i64)
    } else {
        format!("{center:.6}")
    }
}

pub fn report_text(
    name: &str,
    r: &MixingReport,
    diagnostics: &[(String, String)],
) -> String {
    let mut s = String::new();
    s.push_str("mixing certification report\n");
    s.push_str("===========================\n");
    s.push_str(&format!("scenario: {name}\n"));
    s.push_str(&format!("digest: {}\n\n", r.digest));

    let first = r.net_lengths.first().copied().unwrap_or(0.0);
    let last = r.net_lengths.last().copied().unwrap_or(0.0);
    s.push_str(&format!(
        "net: {} points, lengths {} .. {}\n",
        r.net_lengths.len(),
        first,
        last
    ));
    s.push_str(&format!("probe span dimension: {}\n", r.span_dim));
    let n_conv = r.probe_convergence.iter().filter(|(_, c, _)| *c).count();
    s.push_str(&format!(
        "converged: {} ({} / {} probes; eps_conv = {:e}, tail window = {}, richardson = {})\n",
        if r.converged_all { "yes" } else { "no" },
        n_conv,
        r.probe_convergence.len(),
        r.eps_conv,
        r.tail,
        if r.richardson { "on" } else { "off" }
    ));
    if !r.converged_all {
        let mut shown = 0;
        for (id, conv, res) in &r.probe_convergence {
            if !conv && shown < 8 {
                s.push_str(&format!("  not converged: {id} (residual {})\n", fmt_s(*res)));
                shown += 1;
            }
        }
    }
    s.push_str(&format!(
        "compressed D hermiticity residual: {}\n\n",
        fmt_s(r.hermiticity)
    ));

    s.push_str(&format!("spectrum ({} eigenvalues, ascending):\n", r.eigenvalues.len()));
    if let (Some(lo), Some(hi)) = (r.eigenvalues.first(), r.eigenvalues.last()) {
        s.push_str(&format!("  lambda_min = {}\n", fmt_f(*lo)));
        s.push_str(&format!("  lambda_max = {}\n", fmt_f(*hi)));
    }
    match r.cluster {
        Some((center, spread)) => {
            s.push_str(&format!(
                "  cluster: D ≈ {} (max deviation {})\n",
                cluster_label(center),
                fmt_s(spread)
            ));
        }
        None => s.push_str("  no single-point cluster\n"),
    }
    s.push_str(&format!(
        "kernel: dim {} (eps_ker = {:e})\n",
        r.kernel_dim, r.eps_ker
    ));
    s.push_str(&format!("co-kernel: dim {}\n\n", r.span_dim - r.kernel_dim));

    let tail_raw = r
        .pair_verdicts
        .iter()
        .map(|p| p.tail_raw_max)
        .fold(0.0f64, f64::max);
    let dominated = r
        .decay
        .rows
        .iter()
        .filter(|row| row.coeff_abs <= row.bound)
        .count();
    let tail_certified = {
        let n = r.decay.net_len;
        let t = r.tail.min(n);
        r.decay
            .rows
            .iter()
            .filter(|row| row.j > n - t)
            .map(|row| row.coeff_abs)
            .fold(0.0f64, f64::max)
    };
    s.push_str(&format!(
        "decay: {} pairs x {} net points\n",
        r.decay.pair_count, r.decay.net_len
    ));
    s.push_str(&format!(
        "  tail max |<phi, U(x_j) psi>| = {}\n",
        fmt_f(tail_raw)
    ));
    s.push_str(&format!(
        "  tail max |<D phi, U(x_j) psi>| = {}\n",
        fmt_f(tail_certified)
    ));
    s.push_str(&format!(
        "  certified bound dominates the measured coefficient in {} / {} rows\n",
        dominated,
        r.decay.rows.len()
    ));
    s.push_str(
        "  note: bounds use the empirically certified surrogate |D_j phi - D phi| for the limit deviation\n",
    );
    s.push_str(&format!(
        "boundary loss (max truncation clip): {}\n",
        fmt_f(r.boundary_loss)
    ));
    match r.conjugate_norm {
        Some(n) => s.push_str(&format!("conjugate operator 2-norm: {}\n\n", fmt_f(n))),
        None => s.push_str("conjugate operator: unbounded multiplier\n\n"),
    }

    let count = |v: Verdict| r.pair_verdicts.iter().filter(|p| p.verdict == v).count();
    s.push_str("verdicts (phi in the co-kernel span tested against every psi):\n");
    s.push_str(&format!(
        "  mixing-along-net: {}\n",
        count(Verdict::MixingAlongNet)
    ));
    s.push_str(&format!(
        "  non-mixing-witness: {}\n",
        count(Verdict::NonMixingWitness)
    ));
    s.push_str(&format!(
        "  no-conclusion: {}\n",
        count(Verdict::NoConclusion)
    ));
    if let Some(w) = r
        .pair_verdicts
        .iter()
        .find(|p| p.verdict == Verdict::NonMixingWitness)
    {
        s.push_str(&format!(
            "  witness pair: ({}, {}) with tail |coefficient| >= {}\n",
            w.phi,
            w.psi,
            fmt_s(w.tail_raw_min)
        ));
    }
    s.push_str(&format!("overall: {}\n", r.overall));
    s.push_str("(conclusions apply along the tested net only)\n");

    if !diagnostics.is_empty() {
        s.push_str("\ndiagnostics:\n");
        for (k, v) in diagnostics {
            s.push_str(&format!("  {k}: {v}\n"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_exponent_style() {
        assert_eq!(fmt_f(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f(-1.0), "-1.0000000000000000e0");
        assert_eq!(fmt_f(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join("mixcert-render-test");
        let path = dir.join("f.txt");
        atomic_write(&path, "one").unwrap();
        atomic_write(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        std::fs::remove_dir_all(&dir).ok();
    }
}
