//! The acceptance suite: runs every verification gate and prints one
//! pass/fail line per criterion. `cargo test` exercises the quick scale;
//! set SPHERE_SPLIT_ACCEPTANCE_SCALE=full (or use the CLI `verify
//! --scale full`) for the stated full replicate counts. Tolerances are
//! identical at both scales.

use sphere_split::verify::{run_all, Scale, VerifyConfig};

#[test]
fn acceptance_criteria() {
    let scale = match std::env::var("SPHERE_SPLIT_ACCEPTANCE_SCALE").as_deref() {
        Ok("full") => Scale::Full,
        _ => Scale::Quick,
    };
    let master_seed = std::env::var("SPHERE_SPLIT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(2026);
    let cfg = VerifyConfig { scale, master_seed };
    let results = run_all(&cfg).expect("verification suite runs to completion");
    let mut failures = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {}  {}", r.id, r.description);
        println!("       {}", r.detail);
        if !r.passed {
            failures.push(format!("{}: {}", r.id, r.detail));
        }
    }
    println!(
        "{}/{} gates passed (scale {:?}, seed {master_seed})",
        results.len() - failures.len(),
        results.len(),
        scale
    );
    assert!(
        failures.is_empty(),
        "failed gates:\n{}",
        failures.join("\n")
    );
}
