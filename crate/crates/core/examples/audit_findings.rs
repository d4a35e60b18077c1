//! Regenerates `findings/closed_form_audit.json`.
//!
//! cargo run -p libration --release --example audit_findings

use libration::squeezing::audit::{run_audit, summarize};
use libration::Execution;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let evals = run_audit(Execution::Parallel)?;
    let file = summarize(&evals);
    for f in &file.findings {
        println!(
            "{:<30} {:>4} probes  {:>4} mismatches  max rel err {:.3e}",
            f.form.name(),
            f.probes_evaluated,
            f.mismatches,
            f.max_rel_error
        );
    }
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/findings/closed_form_audit.json");
    std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    println!("wrote {path}");
    Ok(())
}
