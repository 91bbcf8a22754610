//! One PASS/FAIL line per acceptance criterion.

use std::process::ExitCode;
use std::time::Instant;

use ckylab::verify::{self, Check, Suite, SuiteReport, VerifyOptions};

fn line(id: &str, title: &str, checks: &[&Check]) -> bool {
    let ok = !checks.is_empty() && checks.iter().all(|c| c.passed);
    println!("{} {id}: {title} ({} checks)", if ok { "PASS" } else { "FAIL" }, checks.len());
    for c in checks.iter().filter(|c| !c.passed) {
        println!("    failed: {} {}", c.name, c.detail);
    }
    ok
}

fn select(reports: &[SuiteReport], suite: Suite, pred: impl Fn(&Check) -> bool) -> Vec<&Check> {
    reports
        .iter()
        .filter(|r| r.suite == suite)
        .flat_map(|r| &r.checks)
        .filter(|c| pred(c))
        .collect()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let reports = verify::run(Suite::All, &VerifyOptions::default());
    let elapsed = start.elapsed().as_secs_f64();
    let geometry = |c: &Check| c.name.ends_with("strict geometry");
    let mut strict: Vec<&Check> = select(&reports, Suite::Tables, geometry);
    strict.extend(select(&reports, Suite::Grs, geometry));

    let results = [
        line("1", "classified 1-dim-center families", &select(&reports, Suite::Tables, |c| !geometry(c))),
        line("2", "g_{r,s} degree 2 and 3 spaces", &select(&reports, Suite::Grs, |c| !geometry(c))),
        line("3", "strictness geometry", &strict),
        line("4", "negative results", &select(&reports, Suite::Negative, |_| true)),
        line("5", "central extension consistency", &select(&reports, Suite::Extensions, |_| true)),
        line("6", "basis changes", &select(&reports, Suite::Basis, |_| true)),
        line("7", "holonomy dimension 10", &select(&reports, Suite::Holonomy, |_| true)),
        line("8", "property suites", &select(&reports, Suite::Properties, |_| true)),
        line("8b", "structural identities", &select(&reports, Suite::Identities, |_| true)),
    ];
    let fast = elapsed < 60.0;
    println!("{} 9: verify all under 60 s ({elapsed:.2} s)", if fast { "PASS" } else { "FAIL" });
    if results.iter().all(|&ok| ok) && fast {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
