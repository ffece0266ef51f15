//! Bounded exploration and classification of communicating state
//! machines, including the flooding pair that is 1-synchronisable yet
//! exceeds every channel bound.
//!
//! ```bash
//! cargo run -p chanres --example csm_exploration
//! ```

use chanres::csm::{classify_csm, CsmBounds};
use chanres::text::parse_csm_file;

fn main() {
    for name in ["fig1", "c5", "c6"] {
        let path = format!("{}/fixtures/{name}.csm", env!("CARGO_MANIFEST_DIR"));
        let (_, csm) = parse_csm_file(&std::fs::read_to_string(path).unwrap()).unwrap();
        let bounds = CsmBounds::default();
        let (verdicts, exploration) = classify_csm(&csm, &bounds);

        println!("== {name}.csm");
        println!(
            "   {} configurations, {} finite traces, {} lassos",
            exploration.configurations.len(),
            exploration.finite_traces.len(),
            exploration.lassos.len()
        );
        if let Some(lasso) = exploration.lassos.iter().next() {
            println!("   sample lasso: {lasso}");
        }
        for v in &verdicts {
            println!("   {v}");
        }
        match csm.find_deadlock(bounds.depth, bounds.channel_cap) {
            Some((_, trace)) => println!("   deadlock after: {trace}"),
            None => println!("   no deadlock within bounds"),
        }
        println!();
    }
}
