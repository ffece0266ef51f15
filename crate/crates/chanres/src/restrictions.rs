//! Channel-restriction analyses on prefix MSCs and words: minimal
//! existential channel bound, k-synchronous decompositions, and the
//! half-duplex condition, together with the verdict types shared by the
//! reporting layer.
//!
//! The searches run over the ideal lattice of the MSC order: a state is
//! the set of already-executed nodes, which fixes every channel's
//! occupancy regardless of execution order. Failed states are memoized.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::events::{ChannelId, Word, WordError};
use crate::msc::{msc_of, NodeId, PrefixMsc};

/// One `k`-exchange: a block of at most `k` sends followed by at most
/// `k` receives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exchange {
    pub sends: Vec<NodeId>,
    pub receives: Vec<NodeId>,
}

/// A split of a linearization into `k`-exchanges where every matched
/// send/receive pair sits inside one exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeDecomposition {
    pub k: u32,
    pub segments: Vec<Exchange>,
}

impl ExchangeDecomposition {
    /// The linearization induced by concatenating the segments.
    pub fn linearization(&self) -> Vec<NodeId> {
        self.segments
            .iter()
            .flat_map(|s| s.sends.iter().chain(s.receives.iter()).copied())
            .collect()
    }
}

/// Checks both decomposition conditions from first principles; used to
/// revalidate every decomposition the search returns.
pub fn validate_decomposition(
    m: &PrefixMsc,
    d: &ExchangeDecomposition,
) -> Result<(), String> {
    let order = d.linearization();
    if order.len() != m.node_count() {
        return Err(format!(
            "decomposition covers {} of {} nodes",
            order.len(),
            m.node_count()
        ));
    }
    // The concatenation must be a linear extension of the MSC order.
    let mut executed = 0u128;
    for n in &order {
        if executed & (1u128 << n.0) != 0 {
            return Err(format!("node {n} repeated"));
        }
        if m.deps_mask(*n) & !executed != 0 {
            return Err(format!("node {n} executed before its prerequisites"));
        }
        executed |= 1u128 << n.0;
    }
    // Segment shape and matched-pair co-residence.
    for (i, seg) in d.segments.iter().enumerate() {
        if seg.sends.is_empty() && seg.receives.is_empty() {
            return Err(format!("segment {i} is empty"));
        }
        if seg.sends.len() > d.k as usize || seg.receives.len() > d.k as usize {
            return Err(format!("segment {i} exceeds k = {}", d.k));
        }
        for s in &seg.sends {
            if !m.label(*s).is_send() {
                return Err(format!("node {s} is not a send"));
            }
        }
        for r in &seg.receives {
            if !m.label(*r).is_receive() {
                return Err(format!("node {r} is not a receive"));
            }
            let s = m.matched_send(*r).expect("receives are matched");
            if !seg.sends.contains(&s) {
                return Err(format!("pair {s}→{r} split across segments"));
            }
        }
        for s in &seg.sends {
            if let Some(r) = m.matched_receive(*s) {
                if !seg.receives.contains(&r) {
                    return Err(format!("pair {s}→{r} split across segments"));
                }
            }
        }
    }
    Ok(())
}

/// A minimal-bound result: the bound together with a witness
/// linearization that attains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundWitness {
    pub bound: u32,
    pub witness: Word,
}

/// Smallest `B ≤ max_b` such that some linearization of `m` keeps every
/// channel at or below `B` messages, with the lexicographically least
/// witness (by node id). `None` if no such bound exists within `max_b`.
pub fn min_existential_bound(m: &PrefixMsc, max_b: u32) -> Option<BoundWitness> {
    for bound in 0..=max_b {
        if let Some(order) = bounded_linearization(m, bound) {
            return Some(BoundWitness {
                bound,
                witness: m.word_of(&order),
            });
        }
    }
    None
}

/// A trivially sufficient bound: scheduling sends eagerly never exceeds
/// the per-channel send count.
pub fn trivial_bound(m: &PrefixMsc) -> u32 {
    let mut per_channel: BTreeMap<ChannelId, u32> = BTreeMap::new();
    for s in m.send_nodes() {
        *per_channel.entry(m.label(s).channel()).or_insert(0) += 1;
    }
    per_channel.values().copied().max().unwrap_or(0)
}

fn bounded_linearization(m: &PrefixMsc, bound: u32) -> Option<Vec<NodeId>> {
    let n = m.node_count();
    let mut occupancy: BTreeMap<ChannelId, i64> = BTreeMap::new();
    let mut current = Vec::with_capacity(n);
    let mut dead: HashSet<u128> = HashSet::new();

    fn go(
        m: &PrefixMsc,
        bound: u32,
        executed: u128,
        occupancy: &mut BTreeMap<ChannelId, i64>,
        current: &mut Vec<NodeId>,
        dead: &mut HashSet<u128>,
    ) -> bool {
        if current.len() == m.node_count() {
            return true;
        }
        if dead.contains(&executed) {
            return false;
        }
        for i in 0..m.node_count() {
            let bit = 1u128 << i;
            if executed & bit != 0 || m.deps_mask(NodeId(i)) & !executed != 0 {
                continue;
            }
            let e = m.label(NodeId(i));
            let chan = e.channel();
            let delta = if e.is_send() { 1 } else { -1 };
            let next = occupancy.get(&chan).copied().unwrap_or(0) + delta;
            if next > i64::from(bound) {
                continue;
            }
            *occupancy.entry(chan.clone()).or_insert(0) += delta;
            current.push(NodeId(i));
            if go(m, bound, executed | bit, occupancy, current, dead) {
                return true;
            }
            current.pop();
            *occupancy.get_mut(&chan).unwrap() -= delta;
        }
        dead.insert(executed);
        false
    }

    if go(m, bound, 0, &mut occupancy, &mut current, &mut dead) {
        Some(current)
    } else {
        None
    }
}

/// Searches for a split of some linearization into `k`-exchanges with
/// matched pairs co-resident. The decomposition is revalidated before
/// being returned.
pub fn is_k_synchronous(m: &PrefixMsc, k: u32) -> Option<ExchangeDecomposition> {
    assert!(k >= 1, "k must be positive");
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    struct SegState {
        executed: u128,
        seg_sends: u128,
        seg_recvs: u128,
        receiving: bool,
    }

    struct Search<'a> {
        m: &'a PrefixMsc,
        k: usize,
        dead: HashSet<SegState>,
        segments: Vec<Exchange>,
        cur_sends: Vec<NodeId>,
        cur_recvs: Vec<NodeId>,
    }

    impl Search<'_> {
        fn closeable(&self, seg_recvs: u128) -> bool {
            for s in &self.cur_sends {
                if let Some(r) = self.m.matched_receive(*s) {
                    if seg_recvs & (1u128 << r.0) == 0 {
                        return false;
                    }
                }
            }
            true
        }

        fn go(&mut self, st: SegState) -> bool {
            let full = self.m.node_count() == (st.executed.count_ones() as usize);
            if full {
                if self.cur_sends.is_empty() && self.cur_recvs.is_empty() {
                    return true;
                }
                if self.closeable(st.seg_recvs) {
                    self.segments.push(Exchange {
                        sends: std::mem::take(&mut self.cur_sends),
                        receives: std::mem::take(&mut self.cur_recvs),
                    });
                    return true;
                }
                return false;
            }
            if self.dead.contains(&st) {
                return false;
            }
            // Extend the current segment: sends only before the first
            // receive, receives only of sends in this segment.
            for i in 0..self.m.node_count() {
                let bit = 1u128 << i;
                if st.executed & bit != 0 || self.m.deps_mask(NodeId(i)) & !st.executed != 0 {
                    continue;
                }
                let e = self.m.label(NodeId(i));
                if e.is_send() {
                    if st.receiving || self.cur_sends.len() >= self.k {
                        continue;
                    }
                    self.cur_sends.push(NodeId(i));
                    let next = SegState {
                        executed: st.executed | bit,
                        seg_sends: st.seg_sends | bit,
                        ..st
                    };
                    if self.go(next) {
                        return true;
                    }
                    self.cur_sends.pop();
                } else {
                    if self.cur_recvs.len() >= self.k {
                        continue;
                    }
                    let s = self.m.matched_send(NodeId(i)).expect("matched receive");
                    if st.seg_sends & (1u128 << s.0) == 0 {
                        continue;
                    }
                    self.cur_recvs.push(NodeId(i));
                    let next = SegState {
                        executed: st.executed | bit,
                        seg_recvs: st.seg_recvs | bit,
                        receiving: true,
                        ..st
                    };
                    if self.go(next) {
                        return true;
                    }
                    self.cur_recvs.pop();
                }
            }
            // Close the segment and start a fresh one.
            if (!self.cur_sends.is_empty() || !self.cur_recvs.is_empty())
                && self.closeable(st.seg_recvs)
            {
                let saved_sends = std::mem::take(&mut self.cur_sends);
                let saved_recvs = std::mem::take(&mut self.cur_recvs);
                self.segments.push(Exchange {
                    sends: saved_sends,
                    receives: saved_recvs,
                });
                let next = SegState {
                    executed: st.executed,
                    seg_sends: 0,
                    seg_recvs: 0,
                    receiving: false,
                };
                if self.go(next) {
                    return true;
                }
                let seg = self.segments.pop().unwrap();
                self.cur_sends = seg.sends;
                self.cur_recvs = seg.receives;
            }
            self.dead.insert(st);
            false
        }
    }

    let mut search = Search {
        m,
        k: k as usize,
        dead: HashSet::new(),
        segments: Vec::new(),
        cur_sends: Vec::new(),
        cur_recvs: Vec::new(),
    };
    let start = SegState {
        executed: 0,
        seg_sends: 0,
        seg_recvs: 0,
        receiving: false,
    };
    if search.go(start) {
        let d = ExchangeDecomposition {
            k,
            segments: search.segments,
        };
        validate_decomposition(m, &d).expect("search returned an invalid decomposition");
        Some(d)
    } else {
        None
    }
}

/// Smallest `k` admitting a `k`-exchange decomposition. Absence is
/// definitive: segments never need more sends than the MSC has, so no
/// `k` beyond the send count can help.
pub fn min_sync_k(m: &PrefixMsc) -> Option<(u32, ExchangeDecomposition)> {
    let max_k = m.send_nodes().len().max(1) as u32;
    for k in 1..=max_k {
        if let Some(d) = is_k_synchronous(m, k) {
            return Some((k, d));
        }
    }
    None
}

/// A pair of opposite-direction messages that some linearization keeps
/// in flight simultaneously.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OppositePair {
    pub first_send: NodeId,
    pub first_receive: Option<NodeId>,
    pub second_send: NodeId,
    pub second_receive: Option<NodeId>,
}

/// Decides whether some linearization of `m` violates half-duplex.
///
/// Rule: sends `s1` on channel `c` and `s2` on the reverse channel
/// violate half-duplex exactly when neither receive is forced before
/// the other send, i.e. `¬(r1 ≤ s2)` and `¬(r2 ≤ s1)` (an unmatched
/// send counts as never received). The down-closure of `{s1, s2}` then
/// linearizes into a prefix with both channels non-empty; conversely a
/// violating prefix exhibits such a pair because prefixes are
/// down-closed. The exhaustive oracle in the test suite checks this
/// rule against all linearizations.
pub fn half_duplex_violation(m: &PrefixMsc) -> Option<OppositePair> {
    let sends = m.send_nodes();
    for &s1 in &sends {
        for &s2 in &sends {
            if s2.0 <= s1.0 {
                continue;
            }
            let c1 = m.label(s1).channel();
            let c2 = m.label(s2).channel();
            if c2 != c1.reversed() {
                continue;
            }
            let r1 = m.matched_receive(s1);
            let r2 = m.matched_receive(s2);
            let r1_blocks = r1.map(|r| m.leq(r, s2)).unwrap_or(false);
            let r2_blocks = r2.map(|r| m.leq(r, s1)).unwrap_or(false);
            if !r1_blocks && !r2_blocks {
                return Some(OppositePair {
                    first_send: s1,
                    first_receive: r1,
                    second_send: s2,
                    second_receive: r2,
                });
            }
        }
    }
    None
}

/// Classification of one word under the three restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordClassification {
    pub half_duplex: bool,
    /// Smallest existential bound within `max_b`, if any.
    pub min_bound: Option<u32>,
    /// Smallest `k`; `None` means not synchronisable for any `k`.
    pub min_sync_k: Option<u32>,
}

/// Classifies a single channel-compliant word: half-duplex directly on
/// the word, boundedness and synchronisability through its MSC.
pub fn classify_word(w: &Word, max_b: u32) -> Result<WordClassification, WordError> {
    let m = msc_of(w)?;
    Ok(WordClassification {
        half_duplex: w.is_half_duplex(),
        min_bound: min_existential_bound(&m, max_b).map(|b| b.bound),
        min_sync_k: min_sync_k(&m).map(|(k, _)| k),
    })
}

// ---------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------

/// The restriction a verdict talks about, with its parameter when one
/// was established (`None` when the property fails for every value).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Property {
    HalfDuplex,
    ExistentiallyBounded { bound: Option<u32> },
    Synchronisable { k: Option<u32> },
}

/// A node reference in witness output: 1-based position within its
/// process row, plus the label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeRef {
    pub process: String,
    pub position: usize,
    pub label: String,
}

impl NodeRef {
    pub fn new(m: &PrefixMsc, n: NodeId) -> Self {
        let e = m.label(n);
        let p = e.acting();
        let position = m.rows()[p].iter().position(|x| *x == n).unwrap() + 1;
        NodeRef {
            process: p.name().to_string(),
            position,
            label: e.to_string(),
        }
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A word exhibiting or refuting the property.
    Word { word: String },
    /// A linearization attaining a channel bound.
    BoundedLinearization { bound: u32, word: String },
    /// A `k`-exchange decomposition, segments as label lists.
    Decomposition {
        k: u32,
        segments: Vec<ExchangeLabels>,
    },
    /// Two opposite-direction messages that can be in flight at once.
    OppositePair {
        first_send: NodeRef,
        second_send: NodeRef,
    },
    /// An HMSC vertex on which a per-vertex check failed or succeeded.
    Vertex {
        vertex: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        inner: Option<Box<Witness>>,
    },
    /// A repeatable cycle that only produces on some channel, pumping
    /// its occupancy beyond every bound.
    PumpingCycle {
        stem: String,
        cycle: String,
        channel: String,
    },
    /// A reachable configuration (deadlock reports).
    Configuration {
        states: BTreeMap<String, String>,
        queues: BTreeMap<String, Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeLabels {
    pub sends: Vec<String>,
    pub receives: Vec<String>,
}

impl ExchangeLabels {
    pub fn new(m: &PrefixMsc, seg: &Exchange) -> Self {
        ExchangeLabels {
            sends: seg.sends.iter().map(|n| m.label(*n).to_string()).collect(),
            receives: seg.receives.iter().map(|n| m.label(*n).to_string()).collect(),
        }
    }
}

/// Outcome of one property check. `bounded_claim` marks verdicts that
/// are only valid up to an exploration bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionVerdict {
    pub property: Property,
    pub holds: bool,
    pub bounded_claim: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl fmt::Display for RestrictionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.property {
            Property::HalfDuplex => "half-duplex".to_string(),
            Property::ExistentiallyBounded { bound: Some(b) } => format!("existentially {b}-bounded"),
            Property::ExistentiallyBounded { bound: None } => "existentially bounded".to_string(),
            Property::Synchronisable { k: Some(k) } => format!("{k}-synchronisable"),
            Property::Synchronisable { k: None } => "synchronisable".to_string(),
        };
        let mark = if self.holds { "yes" } else { "no" };
        let scope = if self.bounded_claim { " (up to bound)" } else { "" };
        write!(f, "{name}: {mark}{scope}")
    }
}

/// Classifies a prefix MSC definitively under all three restrictions.
pub fn classify_msc(m: &PrefixMsc, max_b: u32) -> Vec<RestrictionVerdict> {
    let mut verdicts = Vec::new();
    match half_duplex_violation(m) {
        None => verdicts.push(RestrictionVerdict {
            property: Property::HalfDuplex,
            holds: true,
            bounded_claim: false,
            witness: None,
        }),
        Some(pair) => verdicts.push(RestrictionVerdict {
            property: Property::HalfDuplex,
            holds: false,
            bounded_claim: false,
            witness: Some(Witness::OppositePair {
                first_send: NodeRef::new(m, pair.first_send),
                second_send: NodeRef::new(m, pair.second_send),
            }),
        }),
    }
    match min_existential_bound(m, max_b) {
        Some(bw) => verdicts.push(RestrictionVerdict {
            property: Property::ExistentiallyBounded { bound: Some(bw.bound) },
            holds: true,
            bounded_claim: false,
            witness: Some(Witness::BoundedLinearization {
                bound: bw.bound,
                word: bw.witness.to_string(),
            }),
        }),
        None => verdicts.push(RestrictionVerdict {
            property: Property::ExistentiallyBounded { bound: None },
            holds: false,
            // Definitive only when the search covered the trivial bound.
            bounded_claim: max_b < trivial_bound(m),
            witness: None,
        }),
    }
    match min_sync_k(m) {
        Some((k, d)) => verdicts.push(RestrictionVerdict {
            property: Property::Synchronisable { k: Some(k) },
            holds: true,
            bounded_claim: false,
            witness: Some(Witness::Decomposition {
                k,
                segments: d.segments.iter().map(|s| ExchangeLabels::new(m, s)).collect(),
            }),
        }),
        None => verdicts.push(RestrictionVerdict {
            property: Property::Synchronisable { k: None },
            holds: false,
            bounded_claim: false,
            witness: None,
        }),
    }
    verdicts
}
