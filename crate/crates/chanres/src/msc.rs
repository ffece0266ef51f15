//! Prefix message sequence charts: event nodes with per-process total
//! orders and an injective partial send→receive matching.
//!
//! The induced partial order `≤` (process order plus send-before-receive,
//! closed reflexively and transitively) is materialized as a reachability
//! matrix when an MSC is built, since every analysis queries it
//! repeatedly. A [`Bmsc`] is a prefix MSC whose matching is total.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;

use serde::Serialize;
use thiserror::Error;

use crate::events::{ChannelId, Event, ProcessId, Word, WordError};

/// Maximum node count supported by the bitmask-based order matrix.
pub const MAX_NODES: usize = 128;

/// Index of an event node within one MSC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MscViolation {
    #[error("matched pair {send}→{receive} has incompatible labels")]
    IncompatibleLabels { send: NodeId, receive: NodeId },
    #[error("node {node} is not a send/receive pair endpoint of the right kind")]
    WrongKind { node: NodeId },
    #[error("receive {receive} is matched by more than one send")]
    MatchingNotInjective { receive: NodeId },
    #[error("receive {receive} is not in the image of the matching")]
    OrphanReceive { receive: NodeId },
    #[error("the induced order has a cycle through {node}")]
    OrderCycle { node: NodeId },
    #[error("degenerate: equal-labelled sends {first} and {second} cross")]
    Degenerate { first: NodeId, second: NodeId },
    #[error("FIFO order violated on channel {channel}")]
    FifoViolation { channel: ChannelId },
    #[error("too many nodes: {count} exceeds the supported {MAX_NODES}")]
    TooManyNodes { count: usize },
}

/// Outcome of validating MSC parts; empty means all invariants hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<MscViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Mutable staging area for assembling an MSC; [`MscBuilder::build`]
/// validates and freezes it.
#[derive(Debug, Clone, Default)]
pub struct MscBuilder {
    nodes: Vec<Event>,
    rows: BTreeMap<ProcessId, Vec<NodeId>>,
    matching: BTreeMap<NodeId, NodeId>,
}

impl MscBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a process row, possibly left empty.
    pub fn add_row(&mut self, p: ProcessId) {
        self.rows.entry(p).or_default();
    }

    pub fn has_row(&self, p: &ProcessId) -> bool {
        self.rows.contains_key(p)
    }

    /// Appends an event node at the end of its acting process's row.
    pub fn push_event(&mut self, e: Event) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.rows.entry(e.acting().clone()).or_default().push(id);
        self.nodes.push(e);
        id
    }

    pub fn add_match(&mut self, send: NodeId, receive: NodeId) {
        self.matching.insert(send, receive);
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.nodes.len() > MAX_NODES {
            violations.push(MscViolation::TooManyNodes {
                count: self.nodes.len(),
            });
            return ValidationReport { violations };
        }
        // Matching links sends to receives of the same channel/message.
        let mut matched_receives: BTreeSet<NodeId> = BTreeSet::new();
        for (&s, &r) in &self.matching {
            let (es, er) = (&self.nodes[s.0], &self.nodes[r.0]);
            if !es.is_send() || !er.is_receive() {
                violations.push(MscViolation::WrongKind {
                    node: if es.is_send() { r } else { s },
                });
                continue;
            }
            if es.channel() != er.channel() || es.msg != er.msg {
                violations.push(MscViolation::IncompatibleLabels { send: s, receive: r });
            }
            if !matched_receives.insert(r) {
                violations.push(MscViolation::MatchingNotInjective { receive: r });
            }
        }
        // Every receive is in the image of the matching.
        for (i, e) in self.nodes.iter().enumerate() {
            if e.is_receive() && !matched_receives.contains(&NodeId(i)) {
                violations.push(MscViolation::OrphanReceive { receive: NodeId(i) });
            }
        }
        // Acyclicity of the induced order.
        if !violations.iter().any(|v| matches!(v, MscViolation::WrongKind { .. })) {
            if let Some(node) = self.find_cycle() {
                violations.push(MscViolation::OrderCycle { node });
            }
        }
        // Degeneracy: equal-labelled sends of one process whose receives
        // appear in the opposite order.
        for (&s1, &r1) in &self.matching {
            for (&s2, &r2) in &self.matching {
                if s1 == s2 {
                    continue;
                }
                let (e1, e2) = (&self.nodes[s1.0], &self.nodes[s2.0]);
                if e1 != e2 {
                    continue;
                }
                let row = &self.rows[e1.acting()];
                let (p1, p2) = (row.iter().position(|n| *n == s1), row.iter().position(|n| *n == s2));
                let rrow = &self.rows[self.nodes[r1.0].acting()];
                let (q1, q2) = (rrow.iter().position(|n| *n == r1), rrow.iter().position(|n| *n == r2));
                if let (Some(p1), Some(p2), Some(q1), Some(q2)) = (p1, p2, q1, q2) {
                    if p1 < p2 && q2 <= q1 {
                        violations.push(MscViolation::Degenerate { first: s1, second: s2 });
                    }
                }
            }
        }
        // FIFO per channel: matched sends precede unmatched ones, and the
        // matched sends map order-isomorphically onto the channel's
        // receives in the receiver's row order.
        let mut channels: BTreeSet<ChannelId> = BTreeSet::new();
        for e in &self.nodes {
            channels.insert(e.channel());
        }
        for chan in channels {
            let sends: Vec<NodeId> = self
                .rows
                .get(&chan.from)
                .map(|row| {
                    row.iter()
                        .copied()
                        .filter(|n| {
                            let e = &self.nodes[n.0];
                            e.is_send() && e.channel() == chan
                        })
                        .collect()
                })
                .unwrap_or_default();
            let receives: Vec<NodeId> = self
                .rows
                .get(&chan.to)
                .map(|row| {
                    row.iter()
                        .copied()
                        .filter(|n| {
                            let e = &self.nodes[n.0];
                            e.is_receive() && e.channel() == chan
                        })
                        .collect()
                })
                .unwrap_or_default();
            let matched: Vec<NodeId> = sends
                .iter()
                .copied()
                .map(|s| self.matching.get(&s).copied())
                .take_while(|r| r.is_some())
                .map(|r| r.unwrap())
                .collect();
            let tail_unmatched = sends[matched.len()..]
                .iter()
                .all(|s| !self.matching.contains_key(s));
            if !tail_unmatched || matched != receives {
                violations.push(MscViolation::FifoViolation { channel: chan });
            }
        }
        violations.dedup();
        ValidationReport { violations }
    }

    fn direct_successors(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let row = &self.rows[self.nodes[n.0].acting()];
        if let Some(pos) = row.iter().position(|x| *x == n) {
            if pos + 1 < row.len() {
                out.push(row[pos + 1]);
            }
        }
        if let Some(&r) = self.matching.get(&n) {
            out.push(r);
        }
        out
    }

    fn find_cycle(&self) -> Option<NodeId> {
        // Kahn's algorithm; any node left over sits on a cycle.
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for i in 0..n {
            for s in self.direct_successors(NodeId(i)) {
                indeg[s.0] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|i| indeg[*i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for s in self.direct_successors(NodeId(i)) {
                indeg[s.0] -= 1;
                if indeg[s.0] == 0 {
                    queue.push(s.0);
                }
            }
        }
        if seen == n {
            None
        } else {
            (0..n).find(|i| indeg[*i] > 0).map(NodeId)
        }
    }

    /// Validates and freezes the MSC, materializing the order matrix.
    pub fn build(self) -> Result<PrefixMsc, ValidationReport> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(report);
        }
        let n = self.nodes.len();
        // Reverse topological DP for the reachability closure.
        let mut order = vec![0u128; n];
        let mut indeg = vec![0usize; n];
        for i in 0..n {
            for s in self.direct_successors(NodeId(i)) {
                indeg[s.0] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|i| indeg[*i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(i) = stack.pop() {
            topo.push(i);
            for s in self.direct_successors(NodeId(i)) {
                indeg[s.0] -= 1;
                if indeg[s.0] == 0 {
                    stack.push(s.0);
                }
            }
        }
        for &i in topo.iter().rev() {
            let mut mask = 1u128 << i;
            for s in self.direct_successors(NodeId(i)) {
                mask |= order[s.0];
            }
            order[i] = mask;
        }
        // Direct dependencies for linear-extension enumeration.
        let mut deps = vec![0u128; n];
        for i in 0..n {
            for s in self.direct_successors(NodeId(i)) {
                deps[s.0] |= 1u128 << i;
            }
        }
        let matched_send = self.matching.iter().map(|(s, r)| (*r, *s)).collect();
        Ok(PrefixMsc {
            nodes: self.nodes,
            rows: self.rows,
            matching: self.matching,
            matched_send,
            order,
            deps,
        })
    }
}

/// A validated prefix MSC. Immutable; all analyses are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMsc {
    nodes: Vec<Event>,
    rows: BTreeMap<ProcessId, Vec<NodeId>>,
    matching: BTreeMap<NodeId, NodeId>,
    matched_send: BTreeMap<NodeId, NodeId>,
    order: Vec<u128>,
    deps: Vec<u128>,
}

/// Canonical form used to decide isomorphism: per-process label rows
/// plus the matching expressed in (process, row index) coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalMsc {
    pub rows: BTreeMap<ProcessId, Vec<Event>>,
    pub matching: BTreeSet<((ProcessId, usize), (ProcessId, usize))>,
}

impl PrefixMsc {
    pub fn empty() -> Self {
        MscBuilder::new().build().expect("empty MSC is valid")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn label(&self, n: NodeId) -> &Event {
        &self.nodes[n.0]
    }

    pub fn rows(&self) -> &BTreeMap<ProcessId, Vec<NodeId>> {
        &self.rows
    }

    pub fn processes(&self) -> Vec<ProcessId> {
        self.rows.keys().cloned().collect()
    }

    pub fn matching(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.matching
    }

    pub fn matched_receive(&self, send: NodeId) -> Option<NodeId> {
        self.matching.get(&send).copied()
    }

    pub fn matched_send(&self, receive: NodeId) -> Option<NodeId> {
        self.matched_send.get(&receive).copied()
    }

    pub fn send_nodes(&self) -> Vec<NodeId> {
        self.node_ids().filter(|n| self.label(*n).is_send()).collect()
    }

    pub fn receive_nodes(&self) -> Vec<NodeId> {
        self.node_ids().filter(|n| self.label(*n).is_receive()).collect()
    }

    pub fn unmatched_sends(&self) -> Vec<NodeId> {
        self.send_nodes()
            .into_iter()
            .filter(|s| !self.matching.contains_key(s))
            .collect()
    }

    /// Total matching means the MSC is complete (a BMSC when finite).
    pub fn is_complete(&self) -> bool {
        self.unmatched_sends().is_empty()
    }

    /// The induced partial order `a ≤ b`.
    pub fn leq(&self, a: NodeId, b: NodeId) -> bool {
        self.order[a.0] & (1u128 << b.0) != 0
    }

    /// Direct prerequisites of a node as a bitmask: its row predecessor
    /// and, for receives, the matching send.
    pub fn deps_mask(&self, n: NodeId) -> u128 {
        self.deps[n.0]
    }

    /// The word labelling a node sequence.
    pub fn word_of(&self, order: &[NodeId]) -> Word {
        order.iter().map(|n| self.nodes[n.0].clone()).collect()
    }

    /// Visits linear extensions of the order in lexicographic node-id
    /// order until the visitor breaks or the space is exhausted.
    pub fn for_each_linearization<B>(
        &self,
        mut visit: impl FnMut(&[NodeId]) -> std::ops::ControlFlow<B>,
    ) -> Option<B> {
        let n = self.nodes.len();
        let mut current: Vec<NodeId> = Vec::with_capacity(n);
        fn go<B>(
            m: &PrefixMsc,
            executed: u128,
            current: &mut Vec<NodeId>,
            visit: &mut impl FnMut(&[NodeId]) -> std::ops::ControlFlow<B>,
        ) -> Option<B> {
            if current.len() == m.nodes.len() {
                return match visit(current) {
                    std::ops::ControlFlow::Break(b) => Some(b),
                    std::ops::ControlFlow::Continue(()) => None,
                };
            }
            for i in 0..m.nodes.len() {
                let bit = 1u128 << i;
                if executed & bit != 0 || m.deps[i] & !executed != 0 {
                    continue;
                }
                current.push(NodeId(i));
                if let Some(b) = go(m, executed | bit, current, visit) {
                    return Some(b);
                }
                current.pop();
            }
            None
        }
        go(self, 0, &mut current, &mut visit)
    }

    /// Up to `limit` linearizations as words, in deterministic order.
    pub fn linearizations(&self, limit: usize) -> Vec<Word> {
        let mut out = Vec::new();
        self.for_each_linearization(|order| {
            out.push(self.word_of(order));
            if out.len() >= limit {
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        });
        out
    }

    /// Counts linear extensions, memoized on the executed-set ideal.
    pub fn count_linearizations(&self) -> u128 {
        fn go(m: &PrefixMsc, executed: u128, memo: &mut HashMap<u128, u128>) -> u128 {
            if executed.count_ones() as usize == m.nodes.len() {
                return 1;
            }
            if let Some(&c) = memo.get(&executed) {
                return c;
            }
            let mut total = 0u128;
            for i in 0..m.nodes.len() {
                let bit = 1u128 << i;
                if executed & bit == 0 && m.deps[i] & !executed == 0 {
                    total += go(m, executed | bit, memo);
                }
            }
            memo.insert(executed, total);
            total
        }
        go(self, 0, &mut HashMap::new())
    }

    /// Membership test: is `w` a linearization of this MSC? Greedy
    /// simulation works because equal-labelled nodes of one MSC always
    /// belong to one process and are therefore totally ordered.
    pub fn contains_linearization(&self, w: &Word) -> bool {
        if w.len() != self.nodes.len() {
            return false;
        }
        let mut executed = 0u128;
        for e in w.events() {
            let mut found = false;
            for i in 0..self.nodes.len() {
                let bit = 1u128 << i;
                if executed & bit == 0 && self.nodes[i] == *e && self.deps[i] & !executed == 0 {
                    executed |= bit;
                    found = true;
                    break;
                }
            }
            if !found {
                return false;
            }
        }
        true
    }

    /// Canonical form for isomorphism checks.
    pub fn canonical(&self) -> CanonicalMsc {
        let coordinate = |n: NodeId| {
            let p = self.nodes[n.0].acting().clone();
            let idx = self.rows[&p].iter().position(|x| *x == n).unwrap();
            (p, idx)
        };
        CanonicalMsc {
            rows: self
                .rows
                .iter()
                .map(|(p, row)| (p.clone(), row.iter().map(|n| self.nodes[n.0].clone()).collect()))
                .collect(),
            matching: self
                .matching
                .iter()
                .map(|(s, r)| (coordinate(*s), coordinate(*r)))
                .collect(),
        }
    }

    pub fn is_isomorphic(&self, other: &PrefixMsc) -> bool {
        self.canonical() == other.canonical()
    }

    /// Causal delivery: some linearization orders the receives of any
    /// two order-related same-channel sends consistently (or leaves the
    /// later send unmatched). Every valid finite prefix MSC satisfies
    /// this; the search exists as an executable oracle.
    pub fn satisfies_causal_delivery(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        self.for_each_linearization(|order| {
            if self.causal_delivery_holds_on(order) {
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        })
        .is_some()
    }

    fn causal_delivery_holds_on(&self, order: &[NodeId]) -> bool {
        // Matching is recomputed from the word, per the definition.
        let word = self.word_of(order);
        let wmatch = match word.matching() {
            Ok(m) => m,
            Err(_) => return false,
        };
        for (i, &a) in order.iter().enumerate() {
            for (j, &b) in order.iter().enumerate() {
                if i == j || !self.leq(a, b) {
                    continue;
                }
                let (ea, eb) = (&self.nodes[a.0], &self.nodes[b.0]);
                if !ea.is_send() || !eb.is_send() || ea.channel() != eb.channel() {
                    continue;
                }
                match (wmatch.get(&i), wmatch.get(&j)) {
                    (_, None) => {}
                    (Some(&ri), Some(&rj)) => {
                        if !self.leq(order[ri], order[rj]) {
                            return false;
                        }
                    }
                    (None, Some(_)) => return false,
                }
            }
        }
        true
    }
}

/// Builds the unique prefix MSC whose linearizations include `w`.
/// Undefined (an error) when `w` is not channel-compliant.
pub fn msc_of(w: &Word) -> Result<PrefixMsc, WordError> {
    let matching = w.matching()?;
    let mut builder = MscBuilder::new();
    let ids: Vec<NodeId> = w.events().iter().map(|e| builder.push_event(e.clone())).collect();
    for (s, r) in matching {
        builder.add_match(ids[s], ids[r]);
    }
    Ok(builder.build().expect("msc of a compliant word is valid"))
}

/// Concatenation `m1 · m2`: per process, all nodes of `m1` happen before
/// all nodes of `m2`. Requires the left operand to be complete.
pub fn concat(m1: &Bmsc, m2: &PrefixMsc) -> PrefixMsc {
    let mut builder = MscBuilder::new();
    let mut map1: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut map2: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for p in m1.processes() {
        builder.add_row(p);
    }
    for p in m2.processes() {
        builder.add_row(p);
    }
    // Per-process interleaving: m1's row first, then m2's row. Pushing
    // row by row preserves each process's order.
    let procs: BTreeSet<ProcessId> = m1.processes().into_iter().chain(m2.processes()).collect();
    for p in procs {
        if let Some(row) = m1.rows().get(&p) {
            for &n in row {
                map1.insert(n, builder.push_event(m1.label(n).clone()));
            }
        }
        if let Some(row) = m2.rows().get(&p) {
            for &n in row {
                map2.insert(n, builder.push_event(m2.label(n).clone()));
            }
        }
    }
    for (s, r) in m1.matching() {
        builder.add_match(map1[s], map1[r]);
    }
    for (s, r) in m2.matching() {
        builder.add_match(map2[s], map2[r]);
    }
    builder
        .build()
        .expect("concatenation of valid MSCs is valid")
}

/// A basic MSC: finite node set and total matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bmsc(PrefixMsc);

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("MSC has unmatched sends and is not basic")]
pub struct NotBasic;

impl Bmsc {
    pub fn empty() -> Self {
        Bmsc(PrefixMsc::empty())
    }

    /// The two-node BMSC of a single message exchange.
    pub fn single_message(from: &ProcessId, to: &ProcessId, msg: &crate::events::Message) -> Self {
        let mut b = MscBuilder::new();
        let s = b.push_event(Event::send(from, to, msg));
        let r = b.push_event(Event::receive(from, to, msg));
        b.add_match(s, r);
        Bmsc(b.build().expect("single exchange is valid"))
    }

    pub fn as_prefix(&self) -> &PrefixMsc {
        &self.0
    }

    pub fn into_prefix(self) -> PrefixMsc {
        self.0
    }
}

impl TryFrom<PrefixMsc> for Bmsc {
    type Error = NotBasic;

    fn try_from(m: PrefixMsc) -> Result<Self, NotBasic> {
        if m.is_complete() {
            Ok(Bmsc(m))
        } else {
            Err(NotBasic)
        }
    }
}

impl Deref for Bmsc {
    type Target = PrefixMsc;

    fn deref(&self) -> &PrefixMsc {
        &self.0
    }
}
