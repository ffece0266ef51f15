//! Adjacent-event swaps no FIFO observer can detect, and closures of
//! word sets under them.
//!
//! ```bash
//! cargo run -p chanres --example indistinguishability
//! ```

use std::collections::BTreeSet;

use chanres::indist::{closure, equiv_mod_indist, one_step_neighbors};
use chanres::restrictions::classify_word;
use chanres::text::parse_word;

fn main() {
    let word = parse_word("P>Q!m1 P>Q?m1 R>S!m2 R>S?m2").unwrap();
    println!("word: {word}");
    println!("one-step neighbours:");
    for n in one_step_neighbors(&word) {
        println!("  {n}");
    }

    let closed = closure(&BTreeSet::from([word.clone()]), 10_000).unwrap();
    println!("closure ({} words):", closed.len());
    for w in &closed {
        println!("  {w}");
    }

    // Every member classifies identically.
    let reference = classify_word(&word, 8).unwrap();
    assert!(closed.iter().all(|w| classify_word(w, 8).unwrap() == reference));
    println!("all closure members classify identically: true");

    // Swapping two independent sends is invisible.
    let a = BTreeSet::from([parse_word("P>Q!a R>S!b").unwrap()]);
    let b = BTreeSet::from([parse_word("R>S!b P>Q!a").unwrap()]);
    println!(
        "send swap indistinguishable: {}",
        equiv_mod_indist(&a, &b, 1000).unwrap()
    );
}
