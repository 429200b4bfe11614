//! The acceptance gate: every property suite at its required tolerance.
//!
//! Thresholds are restated here so a loosened library constant cannot slip
//! through. Runs without the libtest harness so the per-suite lines are
//! always printed.

use regdae::verify::{run_suite, PropertyReport, Suite, VerifyOptions};

fn required(suite: Suite) -> &'static [(&'static str, f64)] {
    match suite {
        Suite::Spectrum => &[("oracle_distance", 1e-7)],
        Suite::IvSpectrum => &[("spectral_distance", 1e-8), ("intertwining_relative", 1e-10)],
        Suite::Strong => &[("equation_residual_relative", 1e-9), ("iv_distance_relative", 1e-9)],
        Suite::Mild => &[("integrated_identity_scaled", 1e-7), ("null_space_trajectory", 1e-12)],
        Suite::Coincidence => &[("trajectory_distance", 1e-9)],
        Suite::Duality => &[("duality_relative", 1e-8)],
        Suite::Laplace => &[("transform_residual", 1e-6), ("transform_residual_rho_plus_one", 1e-6)],
        Suite::Dichotomy => &[
            ("verdict_matches", 0.0),
            ("projector_idempotence", 1e-10),
            ("projector_commutator", 1e-10),
            ("invariance_residual", 1e-9),
            ("stable_envelope_ratio", 1.01),
            ("unstable_envelope_ratio", 1.01),
        ],
        Suite::Negative => &[
            ("is_regular_false", 0.0),
            ("factorization_refused", 0.0),
            ("spectrum_refused", 0.0),
            ("classify_refused", 0.0),
        ],
        Suite::Resolvent => &[("far_over_near", 4.0)],
    }
}

fn line(index: usize, r: &PropertyReport) -> String {
    let worst: Vec<String> =
        r.worst.iter().map(|m| format!("{}={:.3e} (<= {:e})", m.name, m.value, m.threshold)).collect();
    format!(
        "[{}] {:>2} {:<12} {} instances  {}",
        if r.passed { "PASS" } else { "FAIL" },
        index,
        r.suite.name(),
        r.instances,
        worst.join(", ")
    )
}

fn main() {
    let opts = VerifyOptions::default();
    let mut failures = Vec::new();
    for (k, suite) in Suite::ALL.into_iter().enumerate() {
        let report = run_suite(suite, &opts).expect("suite ran");
        println!("{}", line(k + 1, &report));
        for (id, e) in &report.errors {
            println!("       instance {id}: {e}");
        }
        for &(name, limit) in required(suite) {
            let m = report.worst.iter().find(|m| m.name == name);
            match m {
                Some(m) if m.threshold <= limit => {}
                Some(m) => failures.push(format!("{suite}: {name} threshold {} is looser than {limit}", m.threshold)),
                None if report.instances > 0 && report.errors.len() < report.instances => {
                    failures.push(format!("{suite}: {name} not measured"))
                }
                None => {}
            }
        }
        if !report.passed {
            failures.push(format!("{suite}: failed on instances {:?}", report.failed_ids));
        }
    }
    if !failures.is_empty() {
        for f in &failures {
            eprintln!("{f}");
        }
        std::process::exit(1);
    }
    println!("acceptance: all {} suites passed", Suite::ALL.len());
}
