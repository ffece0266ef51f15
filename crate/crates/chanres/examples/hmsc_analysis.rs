//! HMSC paths, bounded languages, and the vertex-local restriction
//! checks.
//!
//! ```bash
//! cargo run -p chanres --example hmsc_analysis
//! ```

use chanres::hmsc::HmscPath;
use chanres::text::parse_hmsc_file;

fn main() {
    let path = format!("{}/fixtures/fig1.hmsc", env!("CARGO_MANIFEST_DIR"));
    let (name, h) = parse_hmsc_file(&std::fs::read_to_string(path).unwrap()).unwrap();
    println!("hmsc {name}: {} vertices, valid: {}", h.vertex_count(), h.validate().is_ok());

    println!("maximal paths within four vertices:");
    for p in h.paths(4) {
        match p {
            HmscPath::Finite(vs) => {
                let names: Vec<&str> = vs.iter().map(|v| h.vertex_name(*v)).collect();
                println!("  finite: {}", names.join(" -> "));
            }
            HmscPath::Lasso { stem, cycle } => {
                let s: Vec<&str> = stem.iter().map(|v| h.vertex_name(*v)).collect();
                let c: Vec<&str> = cycle.iter().map(|v| h.vertex_name(*v)).collect();
                println!("  lasso:  {} ({})^ω", s.join(" -> "), c.join(" -> "));
            }
        }
    }

    let lang = h.language(8, 10_000).unwrap();
    println!("complete words up to length 8:");
    for w in &lang.words {
        println!("  {w}");
    }
    println!("{} unrolled-lasso prefixes", lang.prefixes.len());

    for v in h.classify() {
        println!("{v}");
    }
}
