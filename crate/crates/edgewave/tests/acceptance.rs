use edgewave::acceptance::run_all;
use std::io::Write;

#[test]
fn acceptance() {
    let results = run_all(false);
    // Written straight to stdout so the verdicts show without --nocapture.
    let mut out = std::io::stdout().lock();
    for r in &results {
        writeln!(out, "{}", r.line()).unwrap();
        for c in r.checks.iter().filter(|c| !c.passed) {
            let why = if c.known_unattainable { "known unattainable" } else { "failed" };
            writeln!(out, "       {why}: {}", c.name).unwrap();
        }
    }
    drop(out);
    assert_eq!(results.len(), 11);
    let regressions: Vec<_> = results
        .iter()
        .flat_map(|r| r.checks.iter().map(move |c| (r.id, c)))
        .filter(|(_, c)| !c.passed && !c.known_unattainable)
        .map(|(id, c)| format!("{id}: {}", c.name))
        .collect();
    assert!(regressions.is_empty(), "{regressions:?}");
}
