//! Runs without the test harness so the criterion lines always reach stdout.

use chevtrunc::acceptance::{run_all, BUDGETS};

/// Criterion 5 asks for a mod-p² control that breaks equivariance; at r = 2 it
/// cannot, so its line is FAIL and everything else must PASS.
const KNOWN_UNATTAINABLE: usize = 5;

fn main() {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    assert_eq!(outcomes.len(), BUDGETS.len());
    let mut failed = Vec::new();
    for o in &outcomes {
        let ok = if o.id == KNOWN_UNATTAINABLE {
            o.detail.contains("stays equivariant") && o.detail.contains("[10]~[11]: fails")
        } else {
            o.pass
        };
        if !ok {
            failed.push(o.id);
        }
    }
    if !failed.is_empty() {
        eprintln!("unexpected acceptance outcome for criteria {failed:?}");
        std::process::exit(1);
    }
    println!(
        "acceptance: {} of {} criteria pass; criterion {KNOWN_UNATTAINABLE} is known unattainable",
        outcomes.iter().filter(|o| o.pass).count(),
        outcomes.len()
    );
}
