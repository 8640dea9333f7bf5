//! Fixed-layout text rendering of a [`Report`].

use std::fmt::Write;

use densig_core::{Complex64, ComplexMatrix, TeleportOutcome};

use crate::run::{AnalysisSection, ComparisonSection, Report, Section, TeleportSection};

/// Values that would print as zero are printed as positive zero.
fn clean(x: f64) -> f64 {
    if x.abs() < 5e-7 {
        0.0
    } else {
        x
    }
}

pub fn fmt_real(x: f64) -> String {
    format!("{:.6}", clean(x))
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", clean(z.re), clean(z.im))
}

fn write_matrix(out: &mut String, m: &ComplexMatrix, indent: &str) {
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|z| fmt_complex(*z)).collect();
        let _ = writeln!(out, "{indent}{}", row.join(" "));
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_analysis(out: &mut String, a: &AnalysisSection) {
    let _ = writeln!(out, "== analyze {} (line {}) ==", a.target, a.line);
    let _ = writeln!(out, "dims: n={} m={}  basis: {}", a.n, a.m, a.basis_label);
    let _ = writeln!(out, "blocks:");
    for (idx, block) in a.blocks.iter().enumerate() {
        let _ = writeln!(out, "  rho[{},{}]:", idx / a.n, idx % a.n);
        write_matrix(out, block, "    ");
    }
    let order: Vec<String> = (0..a.n * a.n)
        .map(|k| format!("{}{}", k / a.n, k % a.n))
        .collect();
    let _ = writeln!(
        out,
        "X matrix ({0}x{0}, order {1}):",
        a.n * a.n,
        order.join(" ")
    );
    write_matrix(out, &a.x, "  ");
    let eig: Vec<String> = a.eigenvalues.iter().map(|v| fmt_real(*v)).collect();
    let _ = writeln!(out, "eigenvalues: {}", eig.join(" "));
    let _ = writeln!(out, "rank tolerance: {:e}", a.rank_tol);
    let _ = writeln!(
        out,
        "product: {} (rank={}, purity={})",
        yes_no(a.is_product),
        a.rank,
        fmt_real(a.purity)
    );
    let _ = writeln!(
        out,
        "product_test: {} (deviation={})",
        yes_no(a.product_test),
        fmt_real(a.deviation)
    );
    let _ = writeln!(
        out,
        "verdicts agree: {}",
        yes_no(a.is_product == a.product_test)
    );
}

fn write_outcomes(out: &mut String, outcomes: &[TeleportOutcome]) {
    for o in outcomes {
        let _ = writeln!(
            out,
            "outcome {}: p={}",
            o.outcome_index,
            fmt_real(o.probability)
        );
        match &o.post_state_b {
            Some(rho) => {
                write_matrix(out, rho.matrix(), "  ");
                let coh = densig_core::coherence_info(rho).unwrap_or(0.0);
                let _ = writeln!(out, "  coherence={}", fmt_real(coh));
            }
            None => {
                let _ = writeln!(out, "  (no post-measurement state)");
            }
        }
    }
}

fn write_teleport(out: &mut String, t: &TeleportSection) {
    let _ = writeln!(
        out,
        "== teleport {} with c1={} c2={} (line {}) ==",
        t.target,
        fmt_complex(t.c1),
        fmt_complex(t.c2),
        t.line
    );
    write_outcomes(out, &t.outcomes);
}

fn write_comparison(out: &mut String, c: &ComparisonSection) {
    let cmp = &c.comparison;
    let _ = writeln!(
        out,
        "== compare c1={} c2={} (line {}) ==",
        fmt_complex(cmp.input.c1()),
        fmt_complex(cmp.input.c2()),
        c.line
    );
    let _ = writeln!(out, "-- classical_corr --");
    write_outcomes(out, &cmp.classical);
    let _ = writeln!(out, "-- bell --");
    write_outcomes(out, &cmp.bell);
    let _ = writeln!(
        out,
        "coherence classical={} bell={}",
        fmt_real(cmp.classical_coherence),
        fmt_real(cmp.bell_coherence)
    );
}

pub fn render_report(report: &Report) -> String {
    let mut out = String::new();
    let v = &report.validation;
    let _ = writeln!(out, "== validation ==");
    let _ = writeln!(out, "statements: {}", v.statements);
    if v.dims.is_empty() {
        let _ = writeln!(out, "dims: 2 2 (default)");
    } else {
        let dims: Vec<String> = v.dims.iter().map(|(n, m)| format!("{n} {m}")).collect();
        let _ = writeln!(out, "dims: {}", dims.join(", "));
    }
    let _ = writeln!(
        out,
        "kets: {}",
        if v.kets.is_empty() {
            "-".to_string()
        } else {
            v.kets.join(" ")
        }
    );
    let _ = writeln!(
        out,
        "rhos: {}",
        if v.rhos.is_empty() {
            "-".to_string()
        } else {
            v.rhos.join(" ")
        }
    );
    let _ = writeln!(out, "actions: {}", v.actions);
    let _ = writeln!(out, "status: ok");

    for section in &report.sections {
        out.push('\n');
        match section {
            Section::Analysis(a) => write_analysis(&mut out, a),
            Section::Teleport(t) => write_teleport(&mut out, t),
            Section::Comparison(c) => write_comparison(&mut out, c),
        }
    }
    out
}
