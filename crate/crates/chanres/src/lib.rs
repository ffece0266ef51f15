//! Channel-restriction analyses for asynchronous message-passing
//! protocols over reliable point-to-point FIFO channels.
//!
//! The crate models protocol behaviour in five related formalisms and
//! decides (or semi-decides, for state machines) three restrictions on
//! channel usage for each: half-duplex communication, existential
//! channel bounds, and `k`-synchronisability.
//!
//! - [`events`]: send/receive alphabets, words, projections, and the
//!   word-level predicates; eventually periodic infinite words as
//!   [`events::Lasso`]s.
//! - [`msc`]: prefix message sequence charts, the unique MSC of a
//!   compliant word, linearization enumeration, and concatenation.
//! - [`restrictions`]: minimal existential bound, `k`-exchange
//!   decompositions, half-duplex violations, and verdict types.
//! - [`indist`]: the adjacent-swap indistinguishability relation and
//!   closures of word sets under it.
//! - [`globaltype`]: global types with sender-driven choice and guarded
//!   recursion, their bounded languages.
//! - [`hmsc`]: high-level MSCs, bounded language generation, and
//!   vertex-local restriction analyses.
//! - [`translate`]: the construction of an HMSC from a global type and
//!   its bounded correctness check.
//! - [`csm`]: communicating state machines, bounded exploration, and
//!   trace classification.
//! - [`text`]: parsers and writers for the `.gt`, `.bmsc`, `.hmsc`, and
//!   `.csm` file formats and the word syntax.
//! - [`report`]: the JSON report schema used by the `chanres` binary.
//! - [`sampling`]: seeded generators backing the randomized
//!   property-test drivers.
//!
//! Every value is immutable after construction and every analysis is a
//! pure function, so all of it can be used concurrently.
//!
//! The `examples/` directory holds one runnable example per capability:
//!
//! ```bash
//! cargo run -p chanres --example words
//! cargo run -p chanres --example msc_analysis
//! cargo run -p chanres --example restriction_landscape
//! cargo run -p chanres --example indistinguishability
//! cargo run -p chanres --example global_types
//! cargo run -p chanres --example translate_type
//! cargo run -p chanres --example hmsc_analysis
//! cargo run -p chanres --example csm_exploration
//! ```

pub mod csm;
pub mod events;
pub mod globaltype;
pub mod hmsc;
pub mod indist;
pub mod msc;
pub mod report;
pub mod restrictions;
pub mod sampling;
pub mod text;
pub mod translate;

pub use events::{ChannelId, Event, EventKind, Lasso, Message, ProcessId, Word};
pub use msc::{Bmsc, PrefixMsc};
pub use restrictions::{Property, RestrictionVerdict, Witness};
