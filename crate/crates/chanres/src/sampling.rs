//! Seeded random generators for words, MSCs, global types, and HMSCs.
//! Used by the property-test drivers; all outputs are valid by
//! construction for their respective well-formedness notions.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::events::{ChannelId, Event, Message, ProcessId, Word};
use crate::globaltype::{Branch, GlobalType, TypeVar};
use crate::hmsc::Hmsc;
use crate::msc::{msc_of, Bmsc, PrefixMsc};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn default_processes(n: usize) -> Vec<ProcessId> {
    ["P", "Q", "R", "S"][..n.clamp(2, 4)]
        .iter()
        .map(|s| ProcessId::new(*s))
        .collect()
}

fn default_messages(n: usize) -> Vec<Message> {
    ["a", "b", "c"][..n.clamp(1, 3)]
        .iter()
        .map(|s| Message::new(*s))
        .collect()
}

/// A random channel-compliant word of exactly `len` events: each step
/// either opens a fresh send or receives some channel's head.
pub fn compliant_word(rng: &mut ChaCha8Rng, processes: usize, messages: usize, len: usize) -> Word {
    let procs = default_processes(processes);
    let msgs = default_messages(messages);
    let mut queues: Vec<(ChannelId, Vec<Message>)> = Vec::new();
    let mut events = Vec::new();
    for _ in 0..len {
        let receivable: Vec<usize> = queues
            .iter()
            .enumerate()
            .filter(|(_, (_, q))| !q.is_empty())
            .map(|(i, _)| i)
            .collect();
        let do_receive = !receivable.is_empty() && rng.gen_bool(0.5);
        if do_receive {
            let &qi = receivable.choose(rng).unwrap();
            let (chan, q) = &mut queues[qi];
            let msg = q.remove(0);
            events.push(Event::receive(&chan.from, &chan.to, &msg));
        } else {
            let from = procs.choose(rng).unwrap().clone();
            let to = loop {
                let cand = procs.choose(rng).unwrap().clone();
                if cand != from {
                    break cand;
                }
            };
            let msg = msgs.choose(rng).unwrap().clone();
            let chan = ChannelId::new(from.clone(), to.clone());
            events.push(Event::send(&from, &to, &msg));
            match queues.iter_mut().find(|(c, _)| *c == chan) {
                Some((_, q)) => q.push(msg),
                None => queues.push((chan, vec![msg])),
            }
        }
    }
    Word::new(events)
}

/// A random valid prefix MSC with at most `max_nodes` nodes.
pub fn prefix_msc(rng: &mut ChaCha8Rng, processes: usize, max_nodes: usize) -> PrefixMsc {
    let len = rng.gen_range(0..=max_nodes);
    msc_of(&compliant_word(rng, processes, 2, len)).expect("generated words are compliant")
}

/// A random complete BMSC: a compliant word extended with the receives
/// that drain every channel.
pub fn bmsc(rng: &mut ChaCha8Rng, processes: usize, max_nodes: usize) -> Bmsc {
    let len = rng.gen_range(0..=(max_nodes / 2));
    let base = compliant_word(rng, processes, 2, len);
    let mut events = base.events().to_vec();
    let mut queues: Vec<(ChannelId, Vec<Message>)> = Vec::new();
    for e in &events {
        match queues.iter_mut().find(|(c, _)| *c == e.channel()) {
            Some((_, q)) => {
                if e.is_send() {
                    q.push(e.msg.clone());
                } else {
                    q.remove(0);
                }
            }
            None => {
                if e.is_send() {
                    queues.push((e.channel(), vec![e.msg.clone()]));
                }
            }
        }
    }
    for (chan, q) in queues {
        for msg in q {
            events.push(Event::receive(&chan.from, &chan.to, &msg));
        }
    }
    let m = msc_of(&Word::new(events)).expect("drained word is compliant");
    Bmsc::try_from(m).expect("drained word is complete")
}

/// A random well-formed global type within the given shape bounds.
pub fn global_type(
    rng: &mut ChaCha8Rng,
    max_depth: usize,
    processes: usize,
    max_branches: usize,
) -> GlobalType {
    let procs = default_processes(processes);
    let msgs = default_messages(3);
    let mut binder_count = 0usize;
    build(rng, max_depth, &procs, &msgs, max_branches, &mut Vec::new(), &mut binder_count)
}

fn build(
    rng: &mut ChaCha8Rng,
    depth: usize,
    procs: &[ProcessId],
    msgs: &[Message],
    max_branches: usize,
    guarded_vars: &mut Vec<(TypeVar, bool)>,
    binder_count: &mut usize,
) -> GlobalType {
    let available_var = guarded_vars.iter().any(|(_, guarded)| *guarded);
    let roll = rng.gen_range(0..100);
    if depth == 0 || roll < 20 {
        if available_var && rng.gen_bool(0.6) {
            let vars: Vec<TypeVar> = guarded_vars
                .iter()
                .filter(|(_, g)| *g)
                .map(|(v, _)| v.clone())
                .collect();
            return GlobalType::Var(vars.choose(rng).unwrap().clone());
        }
        return GlobalType::End;
    }
    if roll < 40 && depth >= 2 {
        let var = TypeVar::new(format!("t{}", *binder_count));
        *binder_count += 1;
        guarded_vars.push((var.clone(), false));
        let body = build(rng, depth - 1, procs, msgs, max_branches, guarded_vars, binder_count);
        guarded_vars.pop();
        // A binder whose body cannot mention it stays harmless; keep it.
        return GlobalType::Rec(var, Box::new(body));
    }
    // A choice guards every binder in scope for its continuations.
    let sender = procs.choose(rng).unwrap().clone();
    let mut options: Vec<(ProcessId, Message)> = Vec::new();
    for p in procs.iter().filter(|p| **p != sender) {
        for m in msgs {
            options.push((p.clone(), m.clone()));
        }
    }
    options.shuffle(rng);
    let n = rng.gen_range(1..=max_branches.min(options.len()));
    let previously: Vec<(TypeVar, bool)> = guarded_vars.clone();
    for (_, g) in guarded_vars.iter_mut() {
        *g = true;
    }
    let branches = options
        .into_iter()
        .take(n)
        .map(|(receiver, message)| Branch {
            receiver,
            message,
            continuation: Box::new(build(
                rng,
                depth - 1,
                procs,
                msgs,
                max_branches,
                guarded_vars,
                binder_count,
            )),
        })
        .collect();
    *guarded_vars = previously;
    GlobalType::Choice { sender, branches }
}

/// A random valid HMSC: every vertex reachable and completable.
pub fn hmsc(rng: &mut ChaCha8Rng, max_vertices: usize, max_nodes: usize) -> Hmsc {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let vertices: Vec<(String, Bmsc)> = (0..n)
        .map(|i| (format!("v{i}"), bmsc(rng, 3, max_nodes)))
        .collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    // A random tree over the vertices keeps everything reachable.
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        edges.push((format!("v{parent}"), format!("v{i}")));
    }
    for _ in 0..n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let e = (format!("v{a}"), format!("v{b}"));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    // Sinks become terminal so every vertex can complete a path.
    let mut terminals: Vec<String> = (0..n)
        .filter(|i| !edges.iter().any(|(a, _)| *a == format!("v{i}")))
        .map(|i| format!("v{i}"))
        .collect();
    if terminals.is_empty() {
        terminals.push(format!("v{}", rng.gen_range(0..n)));
    }
    let h = Hmsc::from_parts(vertices, edges, "v0".to_string(), terminals)
        .expect("generated vertices are consistent");
    debug_assert!(h.validate().is_ok());
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_are_compliant() {
        let mut r = rng(7);
        for _ in 0..50 {
            let w = compliant_word(&mut r, 3, 2, 10);
            assert!(w.is_channel_compliant());
            assert_eq!(w.len(), 10);
        }
    }

    #[test]
    fn bmscs_are_complete() {
        let mut r = rng(8);
        for _ in 0..50 {
            let b = bmsc(&mut r, 3, 8);
            assert!(b.is_complete());
        }
    }

    #[test]
    fn global_types_are_well_formed() {
        let mut r = rng(9);
        for _ in 0..100 {
            let g = global_type(&mut r, 5, 4, 3);
            assert!(
                crate::globaltype::check_well_formed(&g).is_ok(),
                "{g}"
            );
            // The printed form parses back to the same tree.
            assert_eq!(GlobalType::parse(&g.to_string()).unwrap(), g);
        }
    }

    #[test]
    fn hmscs_validate() {
        let mut r = rng(10);
        for _ in 0..30 {
            let h = hmsc(&mut r, 5, 6);
            assert!(h.validate().is_ok());
        }
    }
}
