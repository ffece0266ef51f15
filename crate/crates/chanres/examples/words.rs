//! Words and the word-level channel predicates.
//!
//! ```bash
//! cargo run -p chanres --example words
//! ```

use chanres::events::{ChannelId, Lasso, ProcessId, Projection, Word, DEFAULT_UNROLL};
use chanres::text::parse_word;

fn main() {
    let word = parse_word("P>Q!cons P>Q?cons P>Q!nil P>Q?nil Q>P!ack Q>P?ack").unwrap();
    println!("word:              {word}");
    println!("channel-compliant: {}", word.is_channel_compliant());
    println!("complete:          {:?}", word.is_complete().unwrap());
    println!("half-duplex:       {}", word.is_half_duplex());
    println!("1-bounded:         {}", word.is_b_bounded(1));

    let q = Projection::OnProcess(ProcessId::new("Q"));
    println!("Q's events:        {}", word.project(&q));
    let chan = ChannelId::new(ProcessId::new("P"), ProcessId::new("Q"));
    println!("sends on P>Q:      {}", word.project(&Projection::SendsOn(chan)));

    println!("matching:          {:?}", word.matching().unwrap());

    // Two processes flooding their channels, never receiving: an
    // infinite word represented as a lasso. It is complete (infinite)
    // but exceeds every channel bound.
    let flood = Lasso::new(Word::empty(), parse_word("P>Q!m Q>P!m").unwrap());
    println!("lasso:             {flood}");
    println!("lasso complete:    {}", flood.is_complete(DEFAULT_UNROLL));
    println!("lasso 9-bounded:   {}", flood.is_b_bounded(9, DEFAULT_UNROLL));
}
