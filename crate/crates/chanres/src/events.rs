//! Event alphabet, words, projections, and word-level channel predicates.
//!
//! A distributed execution is a word over send and receive events. Each
//! event names the channel it acts on (`from -> to`) and the message value.
//! The predicates in this module classify arbitrary words: channel
//! compliance (receives follow FIFO sends), completeness (all sends
//! matched), `B`-boundedness, and the half-duplex condition. Infinite
//! words are represented by [`Lasso`] (an eventually periodic word) and
//! checked on bounded unrollings plus per-cycle balance certificates.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Default unrolling depth used when checking predicates on lassos.
pub const DEFAULT_UNROLL: u32 = 3;

/// A process name. Non-empty; unique within one model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProcessId(String);

impl ProcessId {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "process name must be non-empty");
        ProcessId(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProcessId {
    fn from(s: &str) -> Self {
        ProcessId::new(s)
    }
}

impl From<&ProcessId> for ProcessId {
    fn from(p: &ProcessId) -> Self {
        p.clone()
    }
}

/// A message value. Non-empty; drawn from the finite set used by a model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Message(String);

impl Message {
    pub fn new(label: impl Into<String>) -> Self {
        let label = label.into();
        assert!(!label.is_empty(), "message label must be non-empty");
        Message(label)
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Message {
    fn from(s: &str) -> Self {
        Message::new(s)
    }
}

impl From<&Message> for Message {
    fn from(m: &Message) -> Self {
        m.clone()
    }
}

/// A directed point-to-point channel between two distinct processes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ChannelId {
    pub from: ProcessId,
    pub to: ProcessId,
}

impl ChannelId {
    pub fn new(from: ProcessId, to: ProcessId) -> Self {
        assert!(from != to, "channel endpoints must differ");
        ChannelId { from, to }
    }

    /// The channel in the opposite direction.
    pub fn reversed(&self) -> ChannelId {
        ChannelId {
            from: self.to.clone(),
            to: self.from.clone(),
        }
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EventKind {
    Send,
    Receive,
}

/// One send or receive event. `from` and `to` are the channel endpoints;
/// the acting process is `from` for sends and `to` for receives.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Event {
    pub from: ProcessId,
    pub to: ProcessId,
    pub kind: EventKind,
    pub msg: Message,
}

impl Event {
    pub fn send(from: impl Into<ProcessId>, to: impl Into<ProcessId>, msg: impl Into<Message>) -> Self {
        Self::new(EventKind::Send, from.into(), to.into(), msg.into())
    }

    pub fn receive(
        from: impl Into<ProcessId>,
        to: impl Into<ProcessId>,
        msg: impl Into<Message>,
    ) -> Self {
        Self::new(EventKind::Receive, from.into(), to.into(), msg.into())
    }

    fn new(kind: EventKind, from: ProcessId, to: ProcessId, msg: Message) -> Self {
        assert!(from != to, "sender and receiver must differ");
        Event { from, to, kind, msg }
    }

    /// The process performing this event: the sender of a send, the
    /// receiver of a receive.
    pub fn acting(&self) -> &ProcessId {
        match self.kind {
            EventKind::Send => &self.from,
            EventKind::Receive => &self.to,
        }
    }

    pub fn channel(&self) -> ChannelId {
        ChannelId {
            from: self.from.clone(),
            to: self.to.clone(),
        }
    }

    pub fn is_send(&self) -> bool {
        self.kind == EventKind::Send
    }

    pub fn is_receive(&self) -> bool {
        self.kind == EventKind::Receive
    }

    /// The matching event on the other side of the channel.
    pub fn counterpart(&self) -> Event {
        Event {
            from: self.from.clone(),
            to: self.to.clone(),
            kind: match self.kind {
                EventKind::Send => EventKind::Receive,
                EventKind::Receive => EventKind::Send,
            },
            msg: self.msg.clone(),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            EventKind::Send => '!',
            EventKind::Receive => '?',
        };
        write!(f, "{}>{}{}{}", self.from, self.to, op, self.msg)
    }
}

/// Selects a subsequence of a word: the events of one process, or the
/// sends/receives of one channel.
#[derive(Debug, Clone)]
pub enum Projection {
    OnProcess(ProcessId),
    SendsOn(ChannelId),
    ReceivesOn(ChannelId),
}

impl Projection {
    pub fn matches(&self, e: &Event) -> bool {
        match self {
            Projection::OnProcess(p) => e.acting() == p,
            Projection::SendsOn(c) => e.is_send() && e.from == c.from && e.to == c.to,
            Projection::ReceivesOn(c) => e.is_receive() && e.from == c.from && e.to == c.to,
        }
    }
}

/// A finite sequence of events.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Event>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word is not channel-compliant at position {position} ({event})")]
    NotChannelCompliant { position: usize, event: Event },
}

impl Word {
    pub fn new(events: Vec<Event>) -> Self {
        Word(events)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut events = self.0.clone();
        events.extend(other.0.iter().cloned());
        Word(events)
    }

    /// All processes occurring in this word as a channel endpoint.
    pub fn processes(&self) -> Vec<ProcessId> {
        let mut out: Vec<ProcessId> = Vec::new();
        for e in &self.0 {
            for p in [&e.from, &e.to] {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
        out.sort();
        out
    }

    /// The subsequence of events selected by `sel`, order preserved.
    pub fn project(&self, sel: &Projection) -> Word {
        Word(self.0.iter().filter(|e| sel.matches(e)).cloned().collect())
    }

    /// The message values of the events, in order.
    pub fn values(&self) -> Vec<&Message> {
        self.0.iter().map(|e| &e.msg).collect()
    }

    /// A word is channel-compliant if on every channel, at every prefix,
    /// the received values form a prefix of the sent values. Equivalent
    /// to simulating FIFO queues: every receive must pop the current
    /// head of its channel.
    pub fn is_channel_compliant(&self) -> bool {
        self.compliance_violation().is_none()
    }

    /// Position (0-based) and event of the first compliance violation.
    pub fn compliance_violation(&self) -> Option<(usize, &Event)> {
        let mut queues: BTreeMap<ChannelId, std::collections::VecDeque<&Message>> = BTreeMap::new();
        for (i, e) in self.0.iter().enumerate() {
            let q = queues.entry(e.channel()).or_default();
            match e.kind {
                EventKind::Send => q.push_back(&e.msg),
                EventKind::Receive => match q.pop_front() {
                    Some(head) if *head == e.msg => {}
                    _ => return Some((i, e)),
                },
            }
        }
        None
    }

    /// A channel-compliant finite word is complete when the send and
    /// receive values match on every channel, i.e. all queues drain.
    pub fn is_complete(&self) -> Result<bool, WordError> {
        let mut queues: BTreeMap<ChannelId, std::collections::VecDeque<&Message>> = BTreeMap::new();
        for (i, e) in self.0.iter().enumerate() {
            let q = queues.entry(e.channel()).or_default();
            match e.kind {
                EventKind::Send => q.push_back(&e.msg),
                EventKind::Receive => match q.pop_front() {
                    Some(head) if *head == e.msg => {}
                    _ => {
                        return Err(WordError::NotChannelCompliant {
                            position: i,
                            event: e.clone(),
                        })
                    }
                },
            }
        }
        Ok(queues.values().all(|q| q.is_empty()))
    }

    /// FIFO matching of send positions to receive positions (0-based).
    /// The k-th send on a channel is matched by the k-th receive on the
    /// same channel, when it exists.
    pub fn matching(&self) -> Result<BTreeMap<usize, usize>, WordError> {
        if let Some((i, e)) = self.compliance_violation() {
            return Err(WordError::NotChannelCompliant {
                position: i,
                event: e.clone(),
            });
        }
        let mut pending: BTreeMap<ChannelId, std::collections::VecDeque<usize>> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for (i, e) in self.0.iter().enumerate() {
            let q = pending.entry(e.channel()).or_default();
            match e.kind {
                EventKind::Send => q.push_back(i),
                EventKind::Receive => {
                    let send = q.pop_front().expect("compliant word has matching send");
                    out.insert(send, i);
                }
            }
        }
        Ok(out)
    }

    /// True if every prefix keeps every channel's occupancy
    /// (sends minus receives) at or below `bound`.
    pub fn is_b_bounded(&self, bound: u32) -> bool {
        let mut counts: BTreeMap<ChannelId, i64> = BTreeMap::new();
        for e in &self.0 {
            let c = counts.entry(e.channel()).or_insert(0);
            match e.kind {
                EventKind::Send => *c += 1,
                EventKind::Receive => *c -= 1,
            }
            if *c > i64::from(bound) {
                return false;
            }
        }
        true
    }

    /// Maximum per-channel occupancy reached at any prefix, ignoring
    /// negative balances of non-compliant words.
    pub fn max_channel_occupancy(&self) -> u32 {
        let mut counts: BTreeMap<ChannelId, i64> = BTreeMap::new();
        let mut max = 0i64;
        for e in &self.0 {
            let c = counts.entry(e.channel()).or_insert(0);
            match e.kind {
                EventKind::Send => *c += 1,
                EventKind::Receive => *c -= 1,
            }
            max = max.max(*c);
        }
        u32::try_from(max.max(0)).unwrap_or(u32::MAX)
    }

    /// Half-duplex check: at every prefix and for every pair of
    /// processes, at least one of the two opposite channels has equal
    /// send and receive value sequences (i.e. is empty).
    pub fn is_half_duplex(&self) -> bool {
        self.half_duplex_violation().is_none()
    }

    /// Position (0-based) of the first prefix end at which some pair of
    /// opposite channels are both non-equal, with the offending channel.
    pub fn half_duplex_violation(&self) -> Option<(usize, ChannelId)> {
        // Literal reading: track sent and received value sequences per
        // channel; "empty" means the sequences are equal.
        let mut sent: BTreeMap<ChannelId, Vec<&Message>> = BTreeMap::new();
        let mut received: BTreeMap<ChannelId, Vec<&Message>> = BTreeMap::new();
        let empty: Vec<&Message> = Vec::new();
        for (i, e) in self.0.iter().enumerate() {
            let chan = e.channel();
            match e.kind {
                EventKind::Send => sent.entry(chan.clone()).or_default().push(&e.msg),
                EventKind::Receive => received.entry(chan.clone()).or_default().push(&e.msg),
            }
            // Only the pair {from, to} touched by this event can change.
            let rev = chan.reversed();
            let fwd_eq = sent.get(&chan).unwrap_or(&empty) == received.get(&chan).unwrap_or(&empty);
            let rev_eq = sent.get(&rev).unwrap_or(&empty) == received.get(&rev).unwrap_or(&empty);
            if !fwd_eq && !rev_eq {
                return Some((i, chan));
            }
        }
        None
    }

    /// The word extended with receives for every in-flight message, in
    /// FIFO order per channel. On a channel-compliant word the result
    /// is complete.
    pub fn drained(&self) -> Word {
        let mut queues: BTreeMap<ChannelId, std::collections::VecDeque<Message>> = BTreeMap::new();
        for e in &self.0 {
            let q = queues.entry(e.channel()).or_default();
            match e.kind {
                EventKind::Send => q.push_back(e.msg.clone()),
                EventKind::Receive => {
                    q.pop_front();
                }
            }
        }
        let mut events = self.0.clone();
        for (chan, q) in queues {
            for msg in q {
                events.push(Event::receive(&chan.from, &chan.to, &msg));
            }
        }
        Word(events)
    }

    /// Per-channel send/receive balance over the whole word.
    pub fn channel_balance(&self) -> BTreeMap<ChannelId, i64> {
        let mut counts: BTreeMap<ChannelId, i64> = BTreeMap::new();
        for e in &self.0 {
            let c = counts.entry(e.channel()).or_insert(0);
            match e.kind {
                EventKind::Send => *c += 1,
                EventKind::Receive => *c -= 1,
            }
        }
        counts
    }

    /// Number of send events per channel.
    pub fn sends_per_channel(&self) -> BTreeMap<ChannelId, u32> {
        let mut counts: BTreeMap<ChannelId, u32> = BTreeMap::new();
        for e in self.0.iter().filter(|e| e.is_send()) {
            *counts.entry(e.channel()).or_insert(0) += 1;
        }
        counts
    }

    pub fn send_count(&self) -> usize {
        self.0.iter().filter(|e| e.is_send()).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromIterator<Event> for Word {
    fn from_iter<T: IntoIterator<Item = Event>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Finite representation `stem · cycle^ω` of an eventually periodic
/// infinite word. The cycle is never empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lasso {
    stem: Word,
    cycle: Word,
}

impl Lasso {
    pub fn new(stem: Word, cycle: Word) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
        Lasso { stem, cycle }
    }

    pub fn stem(&self) -> &Word {
        &self.stem
    }

    pub fn cycle(&self) -> &Word {
        &self.cycle
    }

    /// The finite prefix `stem · cycle^n`.
    pub fn unroll(&self, n: u32) -> Word {
        let mut events = self.stem.0.clone();
        for _ in 0..n {
            events.extend(self.cycle.0.iter().cloned());
        }
        Word(events)
    }

    /// Compliance checked on unrollings. A cycle that consumes more
    /// than it produces on some channel will fail at a deep enough
    /// unrolling; checking at `unroll + 1` iterations plus the
    /// per-channel balance certificate covers the periodic cases.
    pub fn is_channel_compliant(&self, unroll: u32) -> bool {
        if !self.unroll(unroll + 1).is_channel_compliant() {
            return false;
        }
        self.cycle.channel_balance().values().all(|b| *b >= 0)
    }

    /// An infinite word is complete whenever it is channel-compliant.
    pub fn is_complete(&self, unroll: u32) -> bool {
        self.is_channel_compliant(unroll)
    }

    /// `B`-boundedness of the infinite word: any channel with positive
    /// per-cycle balance eventually exceeds every bound; otherwise the
    /// occupancy pattern is periodic and the unrollings decide.
    pub fn is_b_bounded(&self, bound: u32, unroll: u32) -> bool {
        if self.cycle.channel_balance().values().any(|b| *b > 0) {
            return false;
        }
        self.unroll(unroll + 1).is_b_bounded(bound)
    }

    /// Half-duplex on unrollings; `None` when the verdict is only valid
    /// up to the unrolling bound, `Some(true/false)` when certified.
    /// A violation in a prefix is definitive; a positive verdict is
    /// definitive only when the cycle leaves all channel balances at
    /// zero (the queue pattern then repeats).
    pub fn half_duplex_certified(&self, unroll: u32) -> (bool, bool) {
        let holds = self.unroll(unroll + 1).is_half_duplex();
        if !holds {
            return (false, true);
        }
        let stable = self.cycle.channel_balance().values().all(|b| *b == 0);
        (true, stable)
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})^ω", self.stem, self.cycle)
    }
}
