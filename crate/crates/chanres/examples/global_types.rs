//! Parsing global types and enumerating their bounded languages.
//!
//! ```bash
//! cargo run -p chanres --example global_types
//! ```

use chanres::globaltype::GlobalType;

fn main() {
    let g = GlobalType::parse("rec t . ( P->Q:cons . t + P->Q:nil . Q->P:ack . end )").unwrap();
    println!("type: {g}");
    println!("subterms:");
    for t in g.subterms() {
        println!("  {t}");
    }

    let lang = g.language(10);
    println!("finite words up to length 10:");
    for w in &lang.finite {
        println!("  {w}");
    }
    println!("lassos:");
    for l in &lang.lassos {
        println!("  {l}");
    }

    // Ill-formed types are rejected with a reason.
    for bad in ["rec t . t", "( P->Q:m . end + P->Q:m . end )", "loop"] {
        println!("{bad:40} -> {}", GlobalType::parse(bad).unwrap_err());
    }
}
