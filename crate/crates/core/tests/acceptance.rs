use std::io::Write;

use dturan::acceptance::run_all;

#[test]
fn acceptance_suite() {
    let results = run_all();
    // written past the harness capture so the lines show in plain `cargo test` runs
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for r in &results {
        writeln!(out, "{r}").unwrap();
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
