//! The indistinguishability relation on finite words: adjacent-event
//! swaps that no process and no FIFO point-to-point channel can detect,
//! and the closure of word sets under them.
//!
//! Four swap rules apply to an adjacent pair, each symmetric:
//!
//! 1. two sends by distinct senders;
//! 2. two receives by distinct receivers;
//! 3. a send and a receive on different channels whose acting
//!    processes differ;
//! 4. a send and a receive on the same channel, provided the channel
//!    is non-empty before the pair (the receive then consumes an
//!    earlier message, not the adjacent send's).

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::events::{Event, Word};

/// Default node budget for closure computations.
pub const DEFAULT_CLOSURE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("closure exceeded the budget of {budget} words")]
pub struct BudgetExceeded {
    pub budget: usize,
}

/// Whether the adjacent pair `x y` (with `prefix` before it) may be
/// transposed. The rules are symmetric, so this is orientation-free.
fn swappable(prefix: &[Event], x: &Event, y: &Event) -> bool {
    use crate::events::EventKind::{Receive, Send};
    match (x.kind, y.kind) {
        (Send, Send) => x.from != y.from,
        (Receive, Receive) => x.to != y.to,
        (Send, Receive) | (Receive, Send) => {
            let (send, receive) = if x.is_send() { (x, y) } else { (y, x) };
            if send.channel() == receive.channel() {
                // Same channel: legal only when the channel already
                // holds a message before this pair.
                let chan = send.channel();
                let sends = prefix
                    .iter()
                    .filter(|e| e.is_send() && e.channel() == chan)
                    .count();
                let recvs = prefix
                    .iter()
                    .filter(|e| e.is_receive() && e.channel() == chan)
                    .count();
                sends > recvs
            } else {
                // Different channels: the acting processes must differ.
                send.from != receive.to
            }
        }
    }
}

/// All words reachable from `w` by one legal adjacent transposition.
pub fn one_step_neighbors(w: &Word) -> BTreeSet<Word> {
    let events = w.events();
    let mut out = BTreeSet::new();
    for i in 0..events.len().saturating_sub(1) {
        if swappable(&events[..i], &events[i], &events[i + 1]) {
            let mut swapped = events.to_vec();
            swapped.swap(i, i + 1);
            out.insert(Word::new(swapped));
        }
    }
    out
}

/// Saturates a finite set of words under one-step swaps via BFS.
/// Fails loudly when the closure grows past `budget`.
pub fn closure(words: &BTreeSet<Word>, budget: usize) -> Result<BTreeSet<Word>, BudgetExceeded> {
    let mut seen: BTreeSet<Word> = words.clone();
    let mut queue: VecDeque<Word> = words.iter().cloned().collect();
    while let Some(w) = queue.pop_front() {
        for n in one_step_neighbors(&w) {
            if seen.insert(n.clone()) {
                if seen.len() > budget {
                    return Err(BudgetExceeded { budget });
                }
                queue.push_back(n);
            }
        }
    }
    Ok(seen)
}

/// Language equality modulo indistinguishability: the closures agree.
pub fn equiv_mod_indist(
    l1: &BTreeSet<Word>,
    l2: &BTreeSet<Word>,
    budget: usize,
) -> Result<bool, BudgetExceeded> {
    Ok(closure(l1, budget)? == closure(l2, budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::Projection;
    use crate::msc::msc_of;
    use crate::text::parse_word;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    fn set(words: &[&str]) -> BTreeSet<Word> {
        words.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn independent_sends_swap() {
        let n = one_step_neighbors(&w("P>Q!a R>S!b"));
        assert!(n.contains(&w("R>S!b P>Q!a")));
    }

    #[test]
    fn same_sender_sends_do_not_swap() {
        // Both sends are performed by P; no rule applies.
        let n = one_step_neighbors(&w("P>Q!a P>R!b"));
        assert!(n.is_empty());
    }

    #[test]
    fn send_before_own_receive_does_not_swap() {
        // The channel is empty before the pair, so the receive consumes
        // exactly the adjacent send.
        let n = one_step_neighbors(&w("P>Q!a P>Q?a"));
        assert!(n.is_empty());
    }

    #[test]
    fn buffered_channel_allows_send_receive_swap() {
        // One message is already in flight, so the receive takes that
        // one and commutes with the fresh send.
        let word = w("P>Q!a P>Q!b P>Q?a");
        let n = one_step_neighbors(&word);
        assert!(n.contains(&w("P>Q!a P>Q?a P>Q!b")));
        // Symmetric direction.
        let back = one_step_neighbors(&w("P>Q!a P>Q?a P>Q!b"));
        assert!(back.contains(&word));
    }

    #[test]
    fn send_and_receive_of_same_actor_do_not_swap() {
        // Q receives and Q sends: same process, order observable.
        let n = one_step_neighbors(&w("P>Q?a Q>R!b"));
        assert!(n.is_empty());
    }

    #[test]
    fn neighbors_preserve_per_process_projections() {
        for text in [
            "P>Q!a R>S!b P>Q?a R>S?b",
            "P>Q!a P>Q!b P>Q?a P>Q?b",
            "P>Q!m Q>P!m P>Q?m Q>P?m",
        ] {
            let word = w(text);
            for n in one_step_neighbors(&word) {
                for p in word.processes() {
                    let sel = Projection::OnProcess(p.clone());
                    assert_eq!(word.project(&sel), n.project(&sel), "{text} vs {n}");
                }
            }
        }
    }

    #[test]
    fn neighbors_preserve_compliance_and_msc() {
        for text in [
            "P>Q!a R>S!b P>Q?a R>S?b",
            "P>Q!a P>Q!b P>Q?a P>Q?b",
            "P>Q!m Q>P!m P>Q?m Q>P?m",
            "P>Q!m Q>R!m P>Q?m Q>R?m",
        ] {
            let word = w(text);
            let m = msc_of(&word).unwrap();
            for n in one_step_neighbors(&word) {
                assert!(n.is_channel_compliant(), "{text} -> {n}");
                assert!(m.is_isomorphic(&msc_of(&n).unwrap()), "{text} -> {n}");
            }
        }
    }

    #[test]
    fn closure_of_two_independent_messages() {
        // Oracle: the closure must be every interleaving that keeps each
        // send before its own receive, i.e. every linearization of the
        // underlying MSC. Two disjoint matched pairs give six.
        let word = w("P>Q!m P>Q?m R>S!m R>S?m");
        let cl = closure(&BTreeSet::from([word.clone()]), 10_000).unwrap();
        let m = msc_of(&word).unwrap();
        let lins: BTreeSet<Word> = m.linearizations(usize::MAX).into_iter().collect();
        assert_eq!(lins.len(), 6);
        assert_eq!(cl, lins);
    }

    #[test]
    fn closure_of_singleton_event() {
        let cl = closure(&set(&["P>Q!m"]), 10).unwrap();
        assert_eq!(cl, set(&["P>Q!m"]));
    }

    #[test]
    fn closure_budget_fails_loudly() {
        let err = closure(&set(&["P>Q!m P>Q?m R>S!m R>S?m"]), 3).unwrap_err();
        assert_eq!(err.budget, 3);
    }

    #[test]
    fn equiv_mod_indist_examples() {
        assert!(equiv_mod_indist(
            &set(&["P>Q!a R>S!b"]),
            &set(&["R>S!b P>Q!a"]),
            1000
        )
        .unwrap());
        assert!(!equiv_mod_indist(&set(&["P>Q!a P>Q?a"]), &set(&["P>Q!b P>Q?b"]), 1000).unwrap());
    }
}
