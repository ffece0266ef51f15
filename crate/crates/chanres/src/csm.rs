//! Communicating state machines: one finite state machine per process,
//! exchanging messages over reliable point-to-point FIFO channels.
//!
//! Exploration enumerates runs up to a depth bound, capping queue
//! lengths. Finite maximal traces end with every machine in a final
//! state (queue contents are reported alongside; they need not be
//! empty). Infinite behaviour is reported as lassos backed by one of
//! two certificates: an exact configuration revisit, or a control-state
//! revisit whose cycle consumes no messages (such a cycle runs forever
//! unconditionally). Cycles that forever ignore an available message
//! some idle process could receive are not reported: no fair scheduling
//! produces them, and including them would misclassify systems whose
//! receives merely lag behind their sends.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::events::{ChannelId, Event, Lasso, Message, ProcessId, Word};
use crate::msc::{msc_of, PrefixMsc};
use crate::restrictions::{
    min_existential_bound, min_sync_k, Property, RestrictionVerdict, Witness,
};
use thiserror::Error;

/// Index of a state within one machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// A transition action: an event of the owning process, or an internal
/// step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Event(Event),
    Epsilon,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Event(e) => write!(f, "{e}"),
            Action::Epsilon => f.write_str("eps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub action: Action,
    pub to: StateId,
}

/// One process's finite state machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMachine {
    state_names: Vec<String>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    transitions: Vec<Transition>,
}

impl StateMachine {
    /// Builds a machine from state names; states are declared implicitly
    /// by mention, in first-mention order.
    pub fn from_named_parts(
        initial: String,
        finals: Vec<String>,
        transitions: Vec<(String, Action, String)>,
    ) -> Result<StateMachine, String> {
        let mut state_names: Vec<String> = Vec::new();
        let intern = |n: &str, state_names: &mut Vec<String>| -> StateId {
            if let Some(i) = state_names.iter().position(|x| x == n) {
                StateId(i)
            } else {
                state_names.push(n.to_string());
                StateId(state_names.len() - 1)
            }
        };
        let initial = intern(&initial, &mut state_names);
        let finals = finals
            .iter()
            .map(|n| intern(n, &mut state_names))
            .collect::<BTreeSet<_>>();
        let transitions = transitions
            .into_iter()
            .map(|(a, action, b)| Transition {
                from: intern(&a, &mut state_names),
                action,
                to: intern(&b, &mut state_names),
            })
            .collect();
        Ok(StateMachine {
            state_names,
            initial,
            finals,
            transitions,
        })
    }

    /// A linear machine running through the given actions once.
    pub fn linear(actions: Vec<Action>) -> StateMachine {
        let n = actions.len();
        StateMachine {
            state_names: (0..=n).map(|i| format!("s{i}")).collect(),
            initial: StateId(0),
            finals: BTreeSet::from([StateId(n)]),
            transitions: actions
                .into_iter()
                .enumerate()
                .map(|(i, action)| Transition {
                    from: StateId(i),
                    action,
                    to: StateId(i + 1),
                })
                .collect(),
        }
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.0]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals.contains(&s)
    }

    pub fn transitions_from(&self, s: StateId) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.from == s)
    }
}

/// A communicating state machine: one machine per process.
#[derive(Debug, Clone)]
pub struct Csm {
    processes: Vec<ProcessId>,
    machines: Vec<StateMachine>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("process {0} has no transition labelled {1}")]
    NoSuchTransition(ProcessId, Event),
    #[error("receive {0} is blocked (empty channel or head mismatch)")]
    BlockedReceive(Event),
}

/// A global state: per-process control states plus FIFO channel
/// contents (empty queues are not stored).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub states: Vec<StateId>,
    pub queues: BTreeMap<ChannelId, Vec<Message>>,
}

impl Configuration {
    fn queue_head(&self, chan: &ChannelId) -> Option<&Message> {
        self.queues.get(chan).and_then(|q| q.first())
    }

    fn queue_len(&self, chan: &ChannelId) -> usize {
        self.queues.get(chan).map_or(0, Vec::len)
    }
}

/// Outcome of bounded exploration.
#[derive(Debug, Clone, Default)]
pub struct ExplorationResult {
    pub configurations: BTreeSet<Configuration>,
    /// Finite maximal traces (every machine final), with the channel
    /// contents left over at the end.
    pub finite_traces: BTreeMap<Word, BTreeMap<ChannelId, Vec<Message>>>,
    pub lassos: BTreeSet<Lasso>,
    /// Lassos whose cycle only produces on some channel: repeating the
    /// cycle pumps that channel past every bound.
    pub pumping_lassos: BTreeSet<(Lasso, ChannelId)>,
    pub depth_hit: bool,
    /// Channels whose queues hit the cap: unbounded-growth candidates.
    pub cap_hit_channels: BTreeSet<ChannelId>,
}

impl Csm {
    pub fn new(machines: Vec<(ProcessId, StateMachine)>) -> Result<Csm, String> {
        if machines.len() < 2 {
            return Err("a communicating state machine needs at least two processes".into());
        }
        let processes: Vec<ProcessId> = machines.iter().map(|(p, _)| p.clone()).collect();
        for (owner, m) in &machines {
            for t in &m.transitions {
                if let Action::Event(e) = &t.action {
                    if e.acting() != owner {
                        return Err(format!(
                            "machine {owner} carries an action of process {}",
                            e.acting()
                        ));
                    }
                    let peer = if e.is_send() { &e.to } else { &e.from };
                    if !processes.contains(peer) {
                        return Err(format!("machine {owner} references unknown process {peer}"));
                    }
                }
            }
        }
        Ok(Csm {
            processes,
            machines: machines.into_iter().map(|(_, m)| m).collect(),
        })
    }

    pub fn processes(&self) -> &[ProcessId] {
        &self.processes
    }

    pub fn machine(&self, p: &ProcessId) -> Option<&StateMachine> {
        self.processes.iter().position(|x| x == p).map(|i| &self.machines[i])
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration {
            states: self.machines.iter().map(|m| m.initial).collect(),
            queues: BTreeMap::new(),
        }
    }

    pub fn all_final(&self, c: &Configuration) -> bool {
        self.machines
            .iter()
            .zip(&c.states)
            .all(|(m, s)| m.is_final(*s))
    }

    /// Enabled transitions as (process index, transition index), in
    /// deterministic order.
    pub fn enabled(&self, c: &Configuration) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (pi, m) in self.machines.iter().enumerate() {
            for (ti, t) in m.transitions_from(c.states[pi]) {
                let ok = match &t.action {
                    Action::Epsilon => true,
                    Action::Event(e) if e.is_send() => true,
                    Action::Event(e) => c.queue_head(&e.channel()) == Some(&e.msg),
                };
                if ok {
                    out.push((pi, ti));
                }
            }
        }
        out
    }

    /// Applies a transition; the caller guarantees enabledness.
    pub fn apply(&self, c: &Configuration, pi: usize, ti: usize) -> Configuration {
        let t = &self.machines[pi].transitions[ti];
        let mut next = c.clone();
        next.states[pi] = t.to;
        if let Action::Event(e) = &t.action {
            let chan = e.channel();
            if e.is_send() {
                next.queues.entry(chan).or_default().push(e.msg.clone());
            } else {
                let q = next.queues.get_mut(&chan).expect("enabled receive");
                q.remove(0);
                if q.is_empty() {
                    next.queues.remove(&chan);
                }
            }
        }
        next
    }

    /// Fires the first declared transition labelled with `e`, checking
    /// the FIFO discipline for receives.
    pub fn step(&self, c: &Configuration, e: &Event) -> Result<Configuration, StepError> {
        let p = e.acting();
        let pi = self
            .processes
            .iter()
            .position(|x| x == p)
            .ok_or_else(|| StepError::NoSuchTransition(p.clone(), e.clone()))?;
        let m = &self.machines[pi];
        let mut found = false;
        for (ti, t) in m.transitions_from(c.states[pi]) {
            if t.action == Action::Event(e.clone()) {
                found = true;
                if e.is_receive() && c.queue_head(&e.channel()) != Some(&e.msg) {
                    continue;
                }
                return Ok(self.apply(c, pi, ti));
            }
        }
        if found {
            Err(StepError::BlockedReceive(e.clone()))
        } else {
            Err(StepError::NoSuchTransition(p.clone(), e.clone()))
        }
    }

    /// Depth-bounded run enumeration. `depth` counts all steps
    /// (including internal ones); queues never grow past `channel_cap`.
    pub fn explore(&self, depth: usize, channel_cap: usize) -> ExplorationResult {
        struct Walk<'a> {
            csm: &'a Csm,
            cap: usize,
            result: ExplorationResult,
            // Per-path history: configurations, cumulative trace
            // lengths, and the acting process of each step.
            configs: Vec<Configuration>,
            trace: Vec<Event>,
            trace_lens: Vec<usize>,
            actors: Vec<usize>,
        }

        impl Walk<'_> {
            fn visit(&mut self, remaining: usize) {
                let current = self.configs.last().unwrap().clone();
                self.result.configurations.insert(current.clone());
                if self.csm.all_final(&current) {
                    self.result
                        .finite_traces
                        .insert(Word::new(self.trace.clone()), current.queues.clone());
                }
                self.detect_lassos();
                if remaining == 0 {
                    if !self.enabled_with_cap(&current).is_empty() {
                        self.result.depth_hit = true;
                    }
                    return;
                }
                for (pi, ti) in self.enabled_with_cap(&current) {
                    let t = &self.csm.machines[pi].transitions[ti];
                    let next = self.csm.apply(&current, pi, ti);
                    let event = match &t.action {
                        Action::Event(e) => Some(e.clone()),
                        Action::Epsilon => None,
                    };
                    if let Some(e) = &event {
                        self.trace.push(e.clone());
                    }
                    self.configs.push(next);
                    self.trace_lens.push(self.trace.len());
                    self.actors.push(pi);
                    self.visit(remaining - 1);
                    self.actors.pop();
                    self.trace_lens.pop();
                    self.configs.pop();
                    if event.is_some() {
                        self.trace.pop();
                    }
                }
            }

            fn enabled_with_cap(&mut self, c: &Configuration) -> Vec<(usize, usize)> {
                let mut out = Vec::new();
                for (pi, ti) in self.csm.enabled(c) {
                    let t = &self.csm.machines[pi].transitions[ti];
                    if let Action::Event(e) = &t.action {
                        if e.is_send() && c.queue_len(&e.channel()) >= self.cap {
                            self.result.cap_hit_channels.insert(e.channel());
                            continue;
                        }
                    }
                    out.push((pi, ti));
                }
                out
            }

            fn detect_lassos(&mut self) {
                let j = self.configs.len() - 1;
                let current = &self.configs[j];
                for i in 0..j {
                    let earlier = &self.configs[i];
                    if earlier.states != current.states {
                        continue;
                    }
                    let stem_events = &self.trace[..self.trace_lens[i]];
                    let cycle_events = &self.trace[self.trace_lens[i]..self.trace_lens[j]];
                    if cycle_events.is_empty() {
                        continue;
                    }
                    // Keep one representative per infinite word: a power
                    // of a shorter cycle and a stem already ending in
                    // the cycle both denote a lasso reported elsewhere.
                    if !is_primitive(cycle_events) || stem_events.ends_with(cycle_events) {
                        continue;
                    }
                    let full_revisit = earlier == current;
                    let consumes_nothing = cycle_events.iter().all(Event::is_send);
                    if !full_revisit && !consumes_nothing {
                        continue;
                    }
                    if self.starved_receive(i, j, cycle_events) {
                        continue;
                    }
                    let stem = Word::new(stem_events.to_vec());
                    let cycle = Word::new(cycle_events.to_vec());
                    let lasso = Lasso::new(stem, cycle.clone());
                    if consumes_nothing {
                        if let Some(e) = cycle.events().iter().find(|e| e.is_send()) {
                            self.result
                                .pumping_lassos
                                .insert((lasso.clone(), e.channel()));
                        }
                    }
                    self.result.lassos.insert(lasso);
                }
            }

            /// True when some process idle across the cycle has a receive
            /// transition that the repeating cycle keeps enabled forever.
            fn starved_receive(&self, i: usize, j: usize, cycle_events: &[Event]) -> bool {
                let start = &self.configs[i];
                for (pi, machine) in self.csm.machines.iter().enumerate() {
                    if self.actors[i..j].contains(&pi) {
                        continue;
                    }
                    let owner = &self.csm.processes[pi];
                    for (_, t) in machine.transitions_from(start.states[pi]) {
                        let e = match &t.action {
                            Action::Event(e) if e.is_receive() => e,
                            _ => continue,
                        };
                        let chan = e.channel();
                        // The head this process would see from the next
                        // iteration on: the queue head at cycle start, or
                        // the first message the cycle itself appends.
                        // Only the owner consumes from its incoming
                        // channels, and it is idle.
                        debug_assert_eq!(e.acting(), owner);
                        let head = start
                            .queue_head(&chan)
                            .or_else(|| {
                                cycle_events
                                    .iter()
                                    .find(|x| x.is_send() && x.channel() == chan)
                                    .map(|x| &x.msg)
                            });
                        if head == Some(&e.msg) {
                            return true;
                        }
                    }
                }
                false
            }
        }

        fn is_primitive(cycle: &[Event]) -> bool {
            let n = cycle.len();
            for d in 1..n {
                if n.is_multiple_of(d) && cycle.chunks(d).all(|c| c == &cycle[..d]) {
                    return false;
                }
            }
            true
        }

        let mut walk = Walk {
            csm: self,
            cap: channel_cap,
            result: ExplorationResult::default(),
            configs: vec![self.initial_configuration()],
            trace: Vec::new(),
            trace_lens: vec![0],
            actors: Vec::new(),
        };
        walk.visit(depth);
        walk.result
    }

    /// Breadth-first deadlock search over distinct configurations: a
    /// reachable configuration with no enabled transition that is not
    /// all-final-with-empty-queues.
    pub fn find_deadlock(
        &self,
        depth: usize,
        channel_cap: usize,
    ) -> Option<(Configuration, Word)> {
        let initial = self.initial_configuration();
        let mut seen = BTreeSet::from([initial.clone()]);
        let mut queue = VecDeque::from([(initial, Word::empty(), 0usize)]);
        while let Some((c, trace, steps)) = queue.pop_front() {
            let enabled = self.enabled(&c);
            if enabled.is_empty() && !(self.all_final(&c) && c.queues.is_empty()) {
                return Some((c, trace));
            }
            if steps >= depth {
                continue;
            }
            for (pi, ti) in enabled {
                let t = &self.machines[pi].transitions[ti];
                if let Action::Event(e) = &t.action {
                    if e.is_send() && c.queue_len(&e.channel()) >= channel_cap {
                        continue;
                    }
                }
                let next = self.apply(&c, pi, ti);
                if seen.insert(next.clone()) {
                    let trace = match &t.action {
                        Action::Event(e) => {
                            let mut events = trace.events().to_vec();
                            events.push(e.clone());
                            Word::new(events)
                        }
                        Action::Epsilon => trace.clone(),
                    };
                    queue.push_back((next, trace, steps + 1));
                }
            }
        }
        None
    }

    /// Renders a configuration for reports.
    pub fn describe(&self, c: &Configuration) -> (BTreeMap<String, String>, BTreeMap<String, Vec<String>>) {
        let states = self
            .processes
            .iter()
            .zip(&c.states)
            .map(|(p, s)| {
                let m = self.machine(p).unwrap();
                (p.name().to_string(), m.state_name(*s).to_string())
            })
            .collect();
        let queues = c
            .queues
            .iter()
            .map(|(chan, q)| {
                (
                    chan.to_string(),
                    q.iter().map(|m| m.label().to_string()).collect(),
                )
            })
            .collect();
        (states, queues)
    }
}

/// Per-process projection of a complete MSC: each process follows its
/// row, all states final at the end.
pub fn project_bmsc(m: &PrefixMsc) -> Result<Csm, String> {
    if !m.is_complete() {
        return Err("projection requires a complete MSC".into());
    }
    let machines = m
        .rows()
        .iter()
        .map(|(p, row)| {
            let actions = row
                .iter()
                .map(|n| Action::Event(m.label(*n).clone()))
                .collect();
            (p.clone(), StateMachine::linear(actions))
        })
        .collect();
    Csm::new(machines)
}

/// Exploration bounds for classification.
#[derive(Debug, Clone, Copy)]
pub struct CsmBounds {
    pub depth: usize,
    pub channel_cap: usize,
    pub max_b: u32,
    pub unroll: u32,
}

impl Default for CsmBounds {
    fn default() -> Self {
        CsmBounds {
            depth: 12,
            channel_cap: 6,
            max_b: 6,
            unroll: 3,
        }
    }
}

/// Classifies every explored maximal and lasso trace. Violations are
/// definitive; positive verdicts are claims up to the bounds.
pub fn classify_csm(csm: &Csm, bounds: &CsmBounds) -> (Vec<RestrictionVerdict>, ExplorationResult) {
    let exploration = csm.explore(bounds.depth, bounds.channel_cap);
    let words: Vec<&Word> = exploration.finite_traces.keys().collect();
    let unrollings: Vec<Word> = exploration
        .lassos
        .iter()
        .flat_map(|l| (1..=bounds.unroll).map(move |n| l.unroll(n)))
        .collect();

    let mut verdicts = Vec::new();

    // Half-duplex: a violating explored word is definitive. Witnesses
    // prefer the shortest violating word.
    let mut hd_witness: Option<&Word> = None;
    for w in words.iter().copied().chain(unrollings.iter()) {
        if !w.is_half_duplex() {
            let better = hd_witness.is_none_or(|prev| {
                (w.len(), w) < (prev.len(), prev)
            });
            if better {
                hd_witness = Some(w);
            }
        }
    }
    verdicts.push(match hd_witness {
        Some(w) => RestrictionVerdict {
            property: Property::HalfDuplex,
            holds: false,
            bounded_claim: false,
            witness: Some(Witness::Word { word: w.to_string() }),
        },
        None => RestrictionVerdict {
            property: Property::HalfDuplex,
            holds: true,
            bounded_claim: true,
            witness: None,
        },
    });

    // Existential boundedness: a producing-only cycle is a definitive
    // refutation for every bound; otherwise take the maximum of the
    // per-word minima, a claim up to the bounds.
    if let Some((lasso, chan)) = exploration.pumping_lassos.iter().next() {
        verdicts.push(RestrictionVerdict {
            property: Property::ExistentiallyBounded { bound: None },
            holds: false,
            bounded_claim: false,
            witness: Some(Witness::PumpingCycle {
                stem: lasso.stem().to_string(),
                cycle: lasso.cycle().to_string(),
                channel: chan.to_string(),
            }),
        });
    } else {
        // Reported lassos leave every channel balance at zero, so the
        // infinite word eventually receives everything a truncation
        // leaves in flight. Draining the unrolling before measuring
        // avoids charging those in-flight messages as permanent.
        let drained: Vec<Word> = unrollings.iter().map(Word::drained).collect();
        let mut worst: Option<u32> = Some(0);
        let mut offender: Option<&Word> = None;
        for w in words.iter().copied().chain(drained.iter()) {
            let m = msc_of(w).expect("explored traces are compliant");
            match min_existential_bound(&m, bounds.max_b) {
                Some(bw) => {
                    if let Some(cur) = worst {
                        worst = Some(cur.max(bw.bound));
                    }
                }
                None => {
                    worst = None;
                    offender = Some(w);
                    break;
                }
            }
        }
        verdicts.push(match worst {
            Some(b) => RestrictionVerdict {
                property: Property::ExistentiallyBounded { bound: Some(b) },
                holds: true,
                bounded_claim: true,
                witness: None,
            },
            None => RestrictionVerdict {
                property: Property::ExistentiallyBounded { bound: None },
                holds: false,
                // The bound search stopped at max_b, so this is only a
                // refutation within the explored budget.
                bounded_claim: true,
                witness: offender.map(|w| Witness::Word { word: w.to_string() }),
            },
        });
    }

    // Synchronisability: a trace with no decomposition is definitive.
    let mut worst_k: Option<u32> = Some(1);
    let mut offender: Option<&Word> = None;
    for w in words.iter().copied().chain(unrollings.iter()) {
        let m = msc_of(w).expect("explored traces are compliant");
        match min_sync_k(&m) {
            Some((k, _)) => {
                if let Some(cur) = worst_k {
                    worst_k = Some(cur.max(k));
                }
            }
            None => {
                worst_k = None;
                offender = Some(w);
                break;
            }
        }
    }
    verdicts.push(match worst_k {
        Some(k) => RestrictionVerdict {
            property: Property::Synchronisable { k: Some(k) },
            holds: true,
            bounded_claim: true,
            witness: None,
        },
        None => RestrictionVerdict {
            property: Property::Synchronisable { k: None },
            holds: false,
            bounded_claim: false,
            witness: offender.map(|w| Witness::Word { word: w.to_string() }),
        },
    });

    (verdicts, exploration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_bmsc_file, parse_csm_file, parse_word};

    fn fixture(name: &str) -> Csm {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        parse_csm_file(&std::fs::read_to_string(path).unwrap()).unwrap().1
    }

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn step_semantics() {
        let csm = fixture("c5.csm");
        let c0 = csm.initial_configuration();
        let c1 = csm.step(&c0, &Event::send("P", "Q", "m")).unwrap();
        assert_eq!(
            c1.queues
                .get(&crate::events::ChannelId::new("P".into(), "Q".into()))
                .map(Vec::len),
            Some(1)
        );
        assert!(matches!(
            csm.step(&c0, &Event::receive("P", "Q", "m")),
            Err(StepError::NoSuchTransition(_, _))
        ));

        let csm = fixture("fig1.csm");
        let c0 = csm.initial_configuration();
        assert!(matches!(
            csm.step(&c0, &Event::receive("P", "Q", "cons")),
            Err(StepError::BlockedReceive(_))
        ));
        let c1 = csm.step(&c0, &Event::send("P", "Q", "cons")).unwrap();
        let c2 = csm.step(&c1, &Event::receive("P", "Q", "cons")).unwrap();
        assert!(c2.queues.is_empty());
    }

    #[test]
    fn explore_trivial_final_csm() {
        let csm = Csm::new(vec![
            ("P".into(), StateMachine::linear(vec![])),
            ("Q".into(), StateMachine::linear(vec![])),
        ])
        .unwrap();
        let r = csm.explore(4, 2);
        assert_eq!(r.finite_traces.len(), 1);
        assert!(r.finite_traces.contains_key(&Word::empty()));
        assert!(r.lassos.is_empty());
    }

    #[test]
    fn explore_fig1() {
        let csm = fixture("fig1.csm");
        let r = csm.explore(8, 4);
        assert!(r
            .finite_traces
            .contains_key(&w("P>Q!nil P>Q?nil Q>P!ack Q>P?ack")));
        assert!(r
            .finite_traces
            .contains_key(&w("P>Q!cons P>Q?cons P>Q!nil P>Q?nil Q>P!ack Q>P?ack")));
        // Every finite maximal trace drains the queues (the ack framing
        // forces it).
        for (trace, queues) in &r.finite_traces {
            assert!(trace.is_channel_compliant());
            assert!(queues.is_empty(), "{trace}");
        }
        // The steady cons loop is a configuration-revisit lasso; the
        // starved pure-send cons cycle is not reported.
        assert!(r.lassos.contains(&Lasso::new(Word::empty(), w("P>Q!cons P>Q?cons"))));
        assert!(!r.lassos.contains(&Lasso::new(Word::empty(), w("P>Q!cons"))));
        assert!(r.pumping_lassos.is_empty());
    }

    #[test]
    fn explore_flooding_pair() {
        let csm = fixture("c5.csm");
        let r = csm.explore(6, 3);
        // Unreceived interleavings are maximal finite traces with
        // non-empty queues.
        assert!(r.finite_traces.contains_key(&w("P>Q!m Q>P!m")));
        let queues = &r.finite_traces[&w("P>Q!m Q>P!m")];
        assert_eq!(queues.len(), 2);
        // Both pure-send loops are genuine lassos (no receiver exists).
        assert!(r.lassos.contains(&Lasso::new(Word::empty(), w("P>Q!m"))));
        assert!(r.lassos.contains(&Lasso::new(Word::empty(), w("Q>P!m"))));
        assert!(!r.pumping_lassos.is_empty());
        assert!(!r.cap_hit_channels.is_empty());
    }

    #[test]
    fn classify_c5() {
        let csm = fixture("c5.csm");
        let (verdicts, _) = classify_csm(&csm, &CsmBounds::default());
        let hd = &verdicts[0];
        assert!(!hd.holds && !hd.bounded_claim);
        assert_eq!(
            hd.witness,
            Some(Witness::Word { word: "P>Q!m Q>P!m".into() })
        );
        let exb = &verdicts[1];
        assert!(!exb.holds && !exb.bounded_claim);
        assert!(matches!(exb.witness, Some(Witness::PumpingCycle { .. })));
        let sync = &verdicts[2];
        assert!(sync.holds && sync.bounded_claim);
        assert_eq!(sync.property, Property::Synchronisable { k: Some(1) });
    }

    #[test]
    fn classify_c6() {
        let csm = fixture("c6.csm");
        let (verdicts, _) = classify_csm(&csm, &CsmBounds::default());
        assert!(verdicts[0].holds && verdicts[0].bounded_claim);
        assert!(!verdicts[1].holds && !verdicts[1].bounded_claim);
        assert!(verdicts[2].holds && verdicts[2].bounded_claim);
    }

    #[test]
    fn classify_fig1() {
        let csm = fixture("fig1.csm");
        let (verdicts, _) = classify_csm(&csm, &CsmBounds::default());
        assert!(verdicts[0].holds, "half-duplex");
        assert_eq!(
            verdicts[1].property,
            Property::ExistentiallyBounded { bound: Some(1) }
        );
        assert!(verdicts[1].holds);
        assert_eq!(verdicts[2].property, Property::Synchronisable { k: Some(1) });
        assert!(verdicts[2].holds);
    }

    #[test]
    fn deadlock_detection() {
        // Two machines each waiting to receive first.
        let csm = Csm::new(vec![
            (
                "P".into(),
                StateMachine::linear(vec![Action::Event(Event::receive("Q", "P", "m"))]),
            ),
            (
                "Q".into(),
                StateMachine::linear(vec![Action::Event(Event::receive("P", "Q", "m"))]),
            ),
        ])
        .unwrap();
        let (config, trace) = csm.find_deadlock(4, 2).unwrap();
        assert!(trace.is_empty());
        assert_eq!(config, csm.initial_configuration());

        assert!(fixture("fig1.csm").find_deadlock(10, 4).is_none());
        assert!(fixture("c4.csm").find_deadlock(10, 4).is_none());
    }

    #[test]
    fn projection_language_matches_msc() {
        let path = format!("{}/fixtures/h2.bmsc", env!("CARGO_MANIFEST_DIR"));
        let (_, m) = parse_bmsc_file(&std::fs::read_to_string(path).unwrap()).unwrap();
        let csm = project_bmsc(&m).unwrap();
        let r = csm.explore(10, 4);
        let traces: BTreeSet<Word> = r.finite_traces.keys().cloned().collect();
        let lins: BTreeSet<Word> = m.linearizations(usize::MAX).into_iter().collect();
        assert_eq!(traces, lins);
    }

    #[test]
    fn explored_traces_are_compliant_and_swap_closed() {
        for name in ["fig1.csm", "c4.csm", "c5.csm"] {
            let csm = fixture(name);
            let r = csm.explore(7, 3);
            let traces: BTreeSet<&Word> = r.finite_traces.keys().collect();
            for t in &traces {
                assert!(t.is_channel_compliant(), "{name}: {t}");
                for n in crate::indist::one_step_neighbors(t) {
                    assert!(
                        r.finite_traces.contains_key(&n),
                        "{name}: {t} ~ {n} missing"
                    );
                }
            }
        }
    }

    #[test]
    fn projection_of_empty_msc_needs_rows() {
        let (_, m) = crate::text::parse_bmsc_file("bmsc e { P : ; Q : ; }").unwrap();
        let csm = project_bmsc(&m).unwrap();
        let r = csm.explore(2, 2);
        assert_eq!(r.finite_traces.len(), 1);
    }
}
