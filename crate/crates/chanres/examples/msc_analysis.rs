//! Building prefix MSCs from words, enumerating linearizations, and
//! concatenating charts.
//!
//! ```bash
//! cargo run -p chanres --example msc_analysis
//! ```

use chanres::msc::{concat, msc_of, Bmsc};
use chanres::text::parse_word;

fn main() {
    // Two crossing messages: both sends happen before either receive.
    let word = parse_word("P>Q!m Q>P!m P>Q?m Q>P?m").unwrap();
    let m = msc_of(&word).unwrap();
    println!("nodes: {}, matched pairs: {}", m.node_count(), m.matching().len());
    println!("linearizations ({} total):", m.count_linearizations());
    for lin in m.linearizations(usize::MAX) {
        println!("  {lin}");
    }
    println!("causal delivery: {}", m.satisfies_causal_delivery());

    // Concatenation sequences each process across charts.
    let loop_chart = Bmsc::try_from(msc_of(&parse_word("P>Q!cons P>Q?cons").unwrap()).unwrap()).unwrap();
    let exit_chart = msc_of(&parse_word("P>Q!nil P>Q?nil Q>P!ack Q>P?ack").unwrap()).unwrap();
    let protocol = concat(&loop_chart, &exit_chart);
    println!(
        "one loop iteration then exit: {} nodes, {} linearizations",
        protocol.node_count(),
        protocol.count_linearizations()
    );

    // A prefix MSC keeps unmatched sends.
    let partial = msc_of(&parse_word("P>Q!m Q>P!m").unwrap()).unwrap();
    println!("unmatched sends: {}", partial.unmatched_sends().len());
}
