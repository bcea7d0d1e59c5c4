//! Acceptance run at full scale. Prints one PASS/FAIL line per criterion.
//!
//! The (5,3) spectral roundtrip needs a 12^8 grid, which does not fit in
//! the memory of a typical machine; it is reported as FAIL with the
//! memory figures and does not fail the test. Everything else must pass.

use std::io::Write;
use std::time::Instant;

use lightray::grid::Weight;
use lightray::multiplier::{estimate_log_constant_22, log_constant_22, Signature};
use lightray::verify::*;

const SEED: u64 = DEFAULT_SEED;

struct Line {
    id: usize,
    passed: bool,
    required: bool,
}

/// Written past the test harness capture so the lines show in a normal run.
fn emit(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn sig(a: usize, b: usize) -> Signature {
    Signature::new(a, b).unwrap()
}

fn report(id: usize, ok: bool, secs: f64, limit: f64, detail: String) -> bool {
    let passed = ok && secs <= limit;
    emit(&format!(
        "criterion {id:>2}: {} {detail} [{secs:.1}s, limit {limit:.0}s]",
        if passed { "PASS" } else { "FAIL" }
    ));
    passed
}

fn c1() -> bool {
    let t = Instant::now();
    let e = closed_vs_quadrature_error().unwrap();
    report(1, e <= 1e-8, t.elapsed().as_secs_f64(), 10.0, format!("closed vs quadrature max rel {e:.3e} (tol 1e-8)"))
}

fn c2() -> bool {
    let t = Instant::now();
    let e = cone_continuity_error(1e-6).unwrap();
    report(2, e <= 1e-3, t.elapsed().as_secs_f64(), 1.0, format!("cone continuity rel {e:.3e} (tol 1e-3)"))
}

fn c3() -> bool {
    let t = Instant::now();
    let est = estimate_log_constant_22(1e-10).unwrap();
    let e = (est.value / log_constant_22() - 1.0).abs();
    report(
        3,
        e <= 5e-3,
        t.elapsed().as_secs_f64(),
        1.0,
        format!("log constant {:.8} vs 8 pi, rel {e:.3e} (tol 5e-3)", est.value),
    )
}

fn c4() -> bool {
    let t = Instant::now();
    let e = slice_gaussian_error(&SliceParams::for_scale(Scale::Full), SEED).unwrap();
    report(4, e <= 5e-3, t.elapsed().as_secs_f64(), 120.0, format!("hyperplane slice residual {e:.3e} (tol 5e-3)"))
}

fn c5() -> bool {
    let t = Instant::now();
    let r = adjointness(&AdjointParams::for_scale(Scale::Full), SEED).unwrap();
    report(
        5,
        r.rel_error <= 0.01,
        t.elapsed().as_secs_f64(),
        300.0,
        format!("<Lf,phi> = {:.8}, <f,L'phi> = {:.8}, rel {:.3e} (tol 1e-2)", r.lhs, r.rhs, r.rel_error),
    )
}

fn c6() -> bool {
    let t = Instant::now();
    let e = normal_two_routes_error(&NormalParams::for_scale(Scale::Full)).unwrap();
    report(6, e <= 0.02, t.elapsed().as_secs_f64(), 600.0, format!("two-route sup deviation {e:.4} (tol 0.02)"))
}

/// Returns (criterion passed, attainable parts passed).
fn c7() -> (bool, bool) {
    let t = Instant::now();
    let mut all = true;
    let mut attainable = true;
    let mut parts = Vec::new();
    for (a, b) in [(2, 2), (2, 3), (3, 3), (4, 3), (5, 3)] {
        let s = sig(a, b);
        let n = roundtrip_size(s, 12, 0.7);
        let e = roundtrip_spectral_error(s, n, SEED).unwrap();
        if n < 12 {
            all = false;
            let need = 12f64.powi(s.dim() as i32) * ROUNDTRIP_BYTES_PER_POINT as f64 / 1e9;
            let have = mem_available().unwrap_or(0) as f64 / 1e9;
            parts.push(format!(
                "{s}: FAIL needs ~{need:.1} GB for 12^{}, {have:.1} GB available; at {n}^{} error {e:.2e}",
                s.dim(),
                s.dim()
            ));
        } else {
            let ok = e <= 1e-10;
            all &= ok;
            attainable &= ok;
            parts.push(format!("{s}: {e:.2e}"));
        }
    }
    let q = roundtrip_quadrature_error(&QuadRoundtripParams::for_scale(Scale::Full)).unwrap();
    let ok = q <= 0.1;
    all &= ok;
    attainable &= ok;
    let secs = t.elapsed().as_secs_f64();
    let passed = report(
        7,
        all,
        secs,
        900.0,
        format!("spectral (tol 1e-10) [{}]; quadrature interior L2 {q:.4} (tol 0.1)", parts.join("; ")),
    );
    (passed, attainable && secs <= 900.0)
}

fn c8() -> bool {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (a, b) in [(3, 3), (5, 3), (2, 3)] {
        let s = puiseux_summary(a, b).unwrap();
        worst = worst.max(s.max_rel_error);
        parts.push(format!("({a},{b}) {:.2e}", s.max_rel_error));
    }
    let sym = symbol_dictionary_error().unwrap();
    report(
        8,
        worst <= 0.02 && sym <= 0.02,
        t.elapsed().as_secs_f64(),
        30.0,
        format!("Puiseux coefficients {} ; symbols {sym:.2e} (tol 0.02)", parts.join(", ")),
    )
}

fn c9() -> bool {
    let t = Instant::now();
    let mk = minkowski_nullspace_max(SEED, 1000).unwrap();
    let i22 = pseudo_inf(sig(2, 2), PSEUDO_KAPPA_GAP_22, 2000).unwrap();
    let i33 = pseudo_inf(sig(3, 3), 0.0, 2000).unwrap();
    report(
        9,
        mk == 0.0 && i22 >= 0.1 && i33 >= 0.1,
        t.elapsed().as_secs_f64(),
        10.0,
        format!(
            "Minkowski timelike max |p| = {mk}; inf |xi|p (2,2) |kappa-1| >= {PSEUDO_KAPPA_GAP_22}: {i22:.4}, (3,3): {i33:.4}"
        ),
    )
}

fn c10() -> bool {
    let t = Instant::now();
    let r22 = stability_ratio(sig(2, 2), Weight::H1_22, &StabilityParams::for_scale(Scale::Full, sig(2, 2)), SEED)
        .unwrap();
    let r33 =
        stability_ratio(sig(3, 3), Weight::H1, &StabilityParams::for_scale(Scale::Full, sig(3, 3)), SEED).unwrap();
    report(
        10,
        r22 <= 50.0 && r33 <= 50.0,
        t.elapsed().as_secs_f64(),
        300.0,
        format!("max/min ratio (2,2) {r22:.4}, (3,3) {r33:.4} (tol 50)"),
    )
}

#[test]
fn acceptance_criteria() {
    let mut lines = Vec::new();
    for (id, f) in [(1, c1 as fn() -> bool), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6)] {
        lines.push(Line {
            id,
            passed: f(),
            required: true,
        });
    }
    let (p7, attainable7) = c7();
    lines.push(Line {
        id: 7,
        passed: p7,
        required: false,
    });
    for (id, f) in [(8, c8 as fn() -> bool), (9, c9), (10, c10)] {
        lines.push(Line {
            id,
            passed: f(),
            required: true,
        });
    }
    let passed = lines.iter().filter(|l| l.passed).count();
    emit(&format!("acceptance: {passed}/{} criteria pass", lines.len()));
    let broken: Vec<usize> = lines.iter().filter(|l| l.required && !l.passed).map(|l| l.id).collect();
    assert!(broken.is_empty(), "criteria failed: {broken:?}");
    assert!(attainable7, "criterion 7 failed on a part that fits in memory");
}
