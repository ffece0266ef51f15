//! Turning a global type into an HMSC and checking the embedding at
//! bounded word length.
//!
//! ```bash
//! cargo run -p chanres --example translate_type
//! ```

use chanres::globaltype::GlobalType;
use chanres::text::write_hmsc_file;
use chanres::translate::{fuse_empty_vertices, translate, verify_translation_default};

fn main() {
    let g = GlobalType::parse("rec t . ( P->Q:cons . t + P->Q:nil . Q->P:ack . end )").unwrap();
    let out = translate(&g);
    println!("vertex map:");
    for (vertex, origin) in &out.vertex_map {
        println!("  {vertex}: {origin:?}");
    }
    println!("\n{}", write_hmsc_file("list_protocol", &out.hmsc));

    let check = verify_translation_default(&g, 10).unwrap();
    println!("bounded inclusion holds:  {}", check.inclusion_failures.is_empty());
    println!("closure equality holds:   {}", check.closure_equal);

    // Every translated type satisfies all three restrictions.
    println!("half-duplex:              {}", out.hmsc.half_duplex().holds);
    println!("existential bound:        {}", out.hmsc.existential_bound().0);
    println!("1-synchronisable:         {}", out.hmsc.k_synchronisable(1).holds);

    let fused = fuse_empty_vertices(&out.hmsc);
    println!(
        "fused: {} vertices (from {})",
        fused.vertex_count(),
        out.hmsc.vertex_count()
    );
}
