//! Exit gate: every acceptance criterion at its stated tolerance, one line
//! per criterion. Criteria run one after another in a single test so the
//! runtime limits are not distorted by concurrently running tests.

use std::time::{Duration, Instant};

use lizkit::verify::{run_group, CheckResult, VerifyOptions};

struct Criterion {
    id: u32,
    title: &'static str,
    group: &'static str,
    /// Row filter within the group.
    rows: &'static [&'static str],
    limit: Option<Duration>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "operator round trip", group: "roundtrip", rows: &[], limit: Some(Duration::from_secs(1)) },
    Criterion { id: 2, title: "projector algebra", group: "projector", rows: &[], limit: None },
    Criterion { id: 3, title: "atomic M-norm", group: "mnorm", rows: &[], limit: None },
    Criterion { id: 4, title: "Fourier slice theorem", group: "slice", rows: &[], limit: Some(Duration::from_secs(10)) },
    Criterion { id: 5, title: "filtered inversion", group: "fbp", rows: &[], limit: None },
    Criterion { id: 6, title: "growth bounds", group: "growth", rows: &[], limit: None },
    Criterion { id: 7, title: "corrected-kernel decay", group: "decay", rows: &[], limit: None },
    Criterion { id: 8, title: "representer recovery", group: "recovery", rows: &[], limit: Some(Duration::from_secs(30)) },
    Criterion { id: 9, title: "ReLU oracle equivalence", group: "oracle", rows: &[], limit: Some(Duration::from_secs(60)) },
    Criterion { id: 10, title: "seminorm cross-check", group: "seminorm", rows: &["seminorm.single_atom"], limit: None },
    Criterion { id: 11, title: "sparsity bound", group: "sparsity", rows: &[], limit: None },
];

fn describe(rows: &[CheckResult]) -> String {
    rows.iter()
        .map(|r| format!("{}={:.3e}/{:.1e}", r.name, r.measured, r.tolerance))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
fn acceptance_criteria() {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let mut rows = Vec::new();
        let outcome = run_group(c.group, &opts, &mut rows);
        let elapsed = start.elapsed();
        if !c.rows.is_empty() {
            rows.retain(|r| c.rows.contains(&r.name.as_str()));
        }
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let pass = outcome.is_ok() && !rows.is_empty() && rows.iter().all(|r| r.passed) && in_time;
        let limit = c.limit.map(|l| format!(" limit {l:?}")).unwrap_or_default();
        let detail = match &outcome {
            Ok(()) => describe(&rows),
            Err(e) => format!("error: {e}"),
        };
        println!(
            "criterion {:>2} {:<26} {} ({:.2?}{}) {}",
            c.id,
            c.title,
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            limit,
            detail
        );
        if !pass {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
