//! The fixture landscape: four basic MSCs separating the three channel
//! restrictions from one another.
//!
//! ```bash
//! cargo run -p chanres --example restriction_landscape
//! ```

use chanres::restrictions::{half_duplex_violation, min_existential_bound, min_sync_k, trivial_bound};
use chanres::text::parse_bmsc_file;

fn main() {
    println!("{:8} {:>12} {:>8} {:>8}", "fixture", "half-duplex", "min B", "min k");
    for name in ["h2", "h3", "h4", "h5"] {
        let path = format!("{}/fixtures/{name}.bmsc", env!("CARGO_MANIFEST_DIR"));
        let (_, m) = parse_bmsc_file(&std::fs::read_to_string(path).unwrap()).unwrap();
        let hd = half_duplex_violation(&m).is_none();
        let bound = min_existential_bound(&m, trivial_bound(&m))
            .map(|b| b.bound.to_string())
            .unwrap_or_else(|| "-".into());
        let k = min_sync_k(&m)
            .map(|(k, _)| k.to_string())
            .unwrap_or_else(|| "never".into());
        println!("{name:8} {hd:>12} {bound:>8} {k:>8}");
    }

    // The decomposition witness for the ring.
    let path = format!("{}/fixtures/h5.bmsc", env!("CARGO_MANIFEST_DIR"));
    let (_, ring) = parse_bmsc_file(&std::fs::read_to_string(path).unwrap()).unwrap();
    let (k, d) = min_sync_k(&ring).unwrap();
    println!("\nring decomposes into {k}-exchanges:");
    for seg in &d.segments {
        let sends: Vec<String> = seg.sends.iter().map(|n| ring.label(*n).to_string()).collect();
        let recvs: Vec<String> = seg.receives.iter().map(|n| ring.label(*n).to_string()).collect();
        println!("  [{} | {}]", sends.join(" "), recvs.join(" "));
    }
}
