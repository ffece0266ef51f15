//! High-level MSCs: a finite graph whose vertices carry complete basic
//! MSCs. The language is every linearization of the BMSC concatenation
//! along maximal initial paths (finite paths ending in a terminal
//! vertex, or infinite paths represented as lassos).
//!
//! The three restriction checks decompose vertex-locally: a
//! concatenation orders each process's events across vertices, so
//! cross-vertex message pairs can never overlap. The bounded-language
//! oracle tests validate that reduction.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::events::Word;
use crate::msc::{concat, Bmsc};
use crate::restrictions::{
    half_duplex_violation, is_k_synchronous, min_existential_bound, min_sync_k, trivial_bound,
    NodeRef, Property, RestrictionVerdict, Witness,
};

/// Index of a vertex within one HMSC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// A finite graph of BMSC-labelled vertices.
#[derive(Debug, Clone)]
pub struct Hmsc {
    names: Vec<String>,
    labels: Vec<Bmsc>,
    edges: BTreeSet<(VertexId, VertexId)>,
    initial: VertexId,
    terminals: BTreeSet<VertexId>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HmscViolation {
    #[error("vertex {0} is not reachable from the initial vertex")]
    Unreachable(String),
    #[error("vertex {0} cannot be completed to a maximal path")]
    Incompletable(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HmscValidationReport {
    pub violations: Vec<HmscViolation>,
}

impl HmscValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for HmscValidationReport {
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

/// An initial path: finite (ending in a terminal) or lasso-shaped.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum HmscPath {
    Finite(Vec<VertexId>),
    Lasso {
        stem: Vec<VertexId>,
        cycle: Vec<VertexId>,
    },
}

/// Bounded language of an HMSC: complete words from finite maximal
/// paths, plus unrolled-lasso words that are prefixes of infinite
/// behaviours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HmscLanguage {
    pub words: BTreeSet<Word>,
    pub prefixes: BTreeSet<Word>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("language enumeration exceeded the budget of {budget} words")]
pub struct LanguageBudget {
    pub budget: usize,
}

impl Hmsc {
    /// Builds an HMSC from named parts, resolving vertex references.
    pub fn from_parts(
        vertices: Vec<(String, Bmsc)>,
        edges: Vec<(String, String)>,
        initial: String,
        terminals: Vec<String>,
    ) -> Result<Hmsc, String> {
        let names: Vec<String> = vertices.iter().map(|(n, _)| n.clone()).collect();
        let labels: Vec<Bmsc> = vertices.into_iter().map(|(_, b)| b).collect();
        let resolve = |n: &str| -> Result<VertexId, String> {
            names
                .iter()
                .position(|x| x == n)
                .map(VertexId)
                .ok_or_else(|| format!("unknown vertex {n}"))
        };
        let initial = resolve(&initial)?;
        let terminals = terminals
            .iter()
            .map(|n| resolve(n))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let edges = edges
            .iter()
            .map(|(a, b)| Ok((resolve(a)?, resolve(b)?)))
            .collect::<Result<BTreeSet<_>, String>>()?;
        Ok(Hmsc {
            names,
            labels,
            edges,
            initial,
            terminals,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.names.len()).map(VertexId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn label(&self, v: VertexId) -> &Bmsc {
        &self.labels[v.0]
    }

    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.terminals.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.edges
            .range((v, VertexId(0))..=(v, VertexId(usize::MAX)))
            .map(|(_, b)| *b)
    }

    /// Checks reachability from the initial vertex and completability of
    /// every vertex to a maximal path (a terminal or a cycle ahead).
    pub fn validate(&self) -> HmscValidationReport {
        let mut violations = Vec::new();
        let reachable = self.reachable_from(self.initial);
        for v in self.vertex_ids() {
            if !reachable.contains(&v) {
                violations.push(HmscViolation::Unreachable(self.names[v.0].clone()));
            }
        }
        // A vertex can be completed when it reaches a terminal vertex or
        // some vertex lying on a cycle.
        let on_cycle: BTreeSet<VertexId> = self
            .vertex_ids()
            .filter(|v| {
                self.successors(*v)
                    .any(|s| s == *v || self.reachable_from(s).contains(v))
            })
            .collect();
        for v in self.vertex_ids() {
            if !reachable.contains(&v) {
                continue;
            }
            let ahead = self.reachable_from(v);
            let ok = ahead.iter().any(|u| self.terminals.contains(u) || on_cycle.contains(u));
            if !ok {
                violations.push(HmscViolation::Incompletable(self.names[v.0].clone()));
            }
        }
        HmscValidationReport { violations }
    }

    fn reachable_from(&self, start: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for s in self.successors(v) {
                if seen.insert(s) {
                    queue.push_back(s);
                }
            }
        }
        seen
    }

    /// Enumerates maximal initial paths: finite ones ending in a
    /// terminal and lasso paths, both within `max_vertices` vertices.
    pub fn paths(&self, max_vertices: usize) -> Vec<HmscPath> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.initial];
        self.paths_walk(&mut stack, max_vertices, &mut out);
        out.into_iter().collect()
    }

    fn paths_walk(
        &self,
        path: &mut Vec<VertexId>,
        max_vertices: usize,
        out: &mut BTreeSet<HmscPath>,
    ) {
        let current = *path.last().unwrap();
        if self.terminals.contains(&current) {
            out.insert(HmscPath::Finite(path.clone()));
        }
        for (i, v) in path.iter().enumerate().take(path.len() - 1) {
            if *v == current {
                out.insert(HmscPath::Lasso {
                    stem: path[..i].to_vec(),
                    cycle: path[i..path.len() - 1].to_vec(),
                });
            }
        }
        if path.len() >= max_vertices {
            return;
        }
        for s in self.successors(current) {
            path.push(s);
            self.paths_walk(path, max_vertices, out);
            path.pop();
        }
    }

    /// The BMSC of a finite path: left fold of concatenation over the
    /// vertex labels.
    pub fn msc_of_path(&self, path: &[VertexId]) -> Bmsc {
        let mut acc = Bmsc::empty();
        for v in path {
            acc = Bmsc::try_from(concat(&acc, self.labels[v.0].as_prefix()))
                .expect("concatenation of complete MSCs is complete");
        }
        acc
    }

    /// Every linearization of every finite maximal path with at most
    /// `max_len` events, plus bounded lasso unrollings in `prefixes`.
    pub fn language(&self, max_len: usize, budget: usize) -> Result<HmscLanguage, LanguageBudget> {
        let mut words = BTreeSet::new();
        // Finite maximal paths with at most max_len events. Zero-event
        // cycles are pruned: revisiting a vertex at unchanged event
        // count cannot produce new words.
        let mut path = vec![self.initial];
        self.language_walk(&mut path, max_len, budget, &mut words)?;

        let mut prefixes = BTreeSet::new();
        for (stem, cycle) in self.simple_lassos() {
            let cycle_nodes: usize = cycle.iter().map(|v| self.labels[v.0].node_count()).sum();
            if cycle_nodes == 0 {
                continue;
            }
            let mut unrolled = stem.clone();
            loop {
                unrolled.extend(cycle.iter().copied());
                let m = self.msc_of_path(&unrolled);
                if m.node_count() > max_len {
                    break;
                }
                for w in m.linearizations(budget.saturating_sub(prefixes.len()) + 1) {
                    prefixes.insert(w);
                }
                if prefixes.len() > budget {
                    return Err(LanguageBudget { budget });
                }
            }
        }
        Ok(HmscLanguage { words, prefixes })
    }

    /// Lassos whose stem and cycle visit each vertex at most once;
    /// every cycle is reached through some simple stem, so these cover
    /// all cycles of the graph.
    fn simple_lassos(&self) -> Vec<(Vec<VertexId>, Vec<VertexId>)> {
        let mut out = BTreeSet::new();
        let mut path = vec![self.initial];
        self.simple_lasso_walk(&mut path, &mut out);
        out.into_iter().collect()
    }

    fn simple_lasso_walk(
        &self,
        path: &mut Vec<VertexId>,
        out: &mut BTreeSet<(Vec<VertexId>, Vec<VertexId>)>,
    ) {
        let current = *path.last().unwrap();
        for s in self.successors(current) {
            if let Some(i) = path.iter().position(|v| *v == s) {
                out.insert((path[..i].to_vec(), path[i..].to_vec()));
            } else {
                path.push(s);
                self.simple_lasso_walk(path, out);
                path.pop();
            }
        }
    }

    fn language_walk(
        &self,
        path: &mut Vec<VertexId>,
        max_len: usize,
        budget: usize,
        words: &mut BTreeSet<Word>,
    ) -> Result<(), LanguageBudget> {
        let current = *path.last().unwrap();
        let node_count: usize = path.iter().map(|v| self.labels[v.0].node_count()).sum();
        if node_count > max_len {
            return Ok(());
        }
        if self.terminals.contains(&current) {
            let m = self.msc_of_path(path);
            for w in m.linearizations(budget - words.len() + 1) {
                words.insert(w);
            }
            if words.len() > budget {
                return Err(LanguageBudget { budget });
            }
        }
        // Prune repeated (vertex, count) states along the path: the
        // vertices in between carried no events, so every completion
        // repeats words already generated from the first occurrence.
        let mut acc = 0usize;
        for v in path.iter().take(path.len() - 1) {
            acc += self.labels[v.0].node_count();
            if *v == current && acc == node_count {
                return Ok(());
            }
        }
        for s in self.successors(current) {
            path.push(s);
            self.language_walk(path, max_len, budget, words)?;
            path.pop();
        }
        Ok(())
    }

    /// `k`-synchronisability reduces to every vertex BMSC being
    /// `k`-synchronous.
    pub fn k_synchronisable(&self, k: u32) -> RestrictionVerdict {
        for v in self.vertex_ids() {
            if is_k_synchronous(self.labels[v.0].as_prefix(), k).is_none() {
                return RestrictionVerdict {
                    property: Property::Synchronisable { k: Some(k) },
                    holds: false,
                    bounded_claim: false,
                    witness: Some(Witness::Vertex {
                        vertex: self.names[v.0].clone(),
                        inner: None,
                    }),
                };
            }
        }
        RestrictionVerdict {
            property: Property::Synchronisable { k: Some(k) },
            holds: true,
            bounded_claim: false,
            witness: None,
        }
    }

    /// A channel bound sufficient for the whole language: the maximum
    /// of the per-vertex minimal bounds (per-vertex schedules drain all
    /// channels between vertices). Returns the bound and the vertex
    /// attaining it.
    pub fn existential_bound(&self) -> (u32, Option<VertexId>) {
        let mut best = (0u32, None);
        for v in self.vertex_ids() {
            let m = self.labels[v.0].as_prefix();
            let bound = min_existential_bound(m, trivial_bound(m))
                .expect("every finite MSC has a bounded schedule")
                .bound;
            if bound > best.0 {
                best = (bound, Some(v));
            }
        }
        best
    }

    /// Half-duplex reduces to the per-vertex message-pair rule:
    /// concatenation sequences each process across vertices, so a
    /// violating pair must sit inside one vertex.
    pub fn half_duplex(&self) -> RestrictionVerdict {
        for v in self.vertex_ids() {
            let m = self.labels[v.0].as_prefix();
            if let Some(pair) = half_duplex_violation(m) {
                return RestrictionVerdict {
                    property: Property::HalfDuplex,
                    holds: false,
                    bounded_claim: false,
                    witness: Some(Witness::Vertex {
                        vertex: self.names[v.0].clone(),
                        inner: Some(Box::new(Witness::OppositePair {
                            first_send: NodeRef::new(m, pair.first_send),
                            second_send: NodeRef::new(m, pair.second_send),
                        })),
                    }),
                };
            }
        }
        RestrictionVerdict {
            property: Property::HalfDuplex,
            holds: true,
            bounded_claim: false,
            witness: None,
        }
    }

    /// All three restriction verdicts; the synchronisability verdict
    /// carries the minimal `k` over the whole HMSC.
    pub fn classify(&self) -> Vec<RestrictionVerdict> {
        let mut verdicts = vec![self.half_duplex()];
        let (bound, vertex) = self.existential_bound();
        verdicts.push(RestrictionVerdict {
            property: Property::ExistentiallyBounded { bound: Some(bound) },
            holds: true,
            bounded_claim: false,
            witness: vertex.map(|v| Witness::Vertex {
                vertex: self.names[v.0].clone(),
                inner: None,
            }),
        });
        // Minimal k over all vertices, or a definitive failure.
        let mut min_k = 1u32;
        let mut verdict = None;
        for v in self.vertex_ids() {
            match min_sync_k(self.labels[v.0].as_prefix()) {
                Some((k, _)) => min_k = min_k.max(k),
                None => {
                    verdict = Some(RestrictionVerdict {
                        property: Property::Synchronisable { k: None },
                        holds: false,
                        bounded_claim: false,
                        witness: Some(Witness::Vertex {
                            vertex: self.names[v.0].clone(),
                            inner: None,
                        }),
                    });
                    break;
                }
            }
        }
        verdicts.push(verdict.unwrap_or(RestrictionVerdict {
            property: Property::Synchronisable { k: Some(min_k) },
            holds: true,
            bounded_claim: false,
            witness: None,
        }));
        verdicts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indist::{closure, one_step_neighbors};
    use crate::text::{parse_hmsc_file, parse_word};

    fn fixture(name: &str) -> Hmsc {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        parse_hmsc_file(&std::fs::read_to_string(path).unwrap()).unwrap().1
    }

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn fig1_validates() {
        assert!(fixture("fig1.hmsc").validate().is_ok());
    }

    #[test]
    fn unreachable_and_incompletable_vertices_reported() {
        let h = Hmsc::from_parts(
            vec![
                ("a".into(), Bmsc::empty()),
                ("b".into(), Bmsc::empty()),
                ("c".into(), Bmsc::empty()),
            ],
            vec![("a".into(), "b".into())],
            "a".into(),
            vec![],
        )
        .unwrap();
        let report = h.validate();
        assert!(report
            .violations
            .contains(&HmscViolation::Unreachable("c".into())));
        // b has no way to reach a terminal or a cycle.
        assert!(report
            .violations
            .contains(&HmscViolation::Incompletable("b".into())));
    }

    #[test]
    fn fig1_paths() {
        let h = fixture("fig1.hmsc");
        let paths = h.paths(4);
        let finite: Vec<_> = paths
            .iter()
            .filter(|p| matches!(p, HmscPath::Finite(_)))
            .collect();
        // v0 v2, v0 v1 v2, v0 v1 v1 v2.
        assert_eq!(finite.len(), 3);
        assert!(paths.iter().any(|p| matches!(p, HmscPath::Lasso { .. })));
    }

    #[test]
    fn single_terminal_initial_vertex() {
        let h = Hmsc::from_parts(
            vec![("v".into(), Bmsc::empty())],
            vec![],
            "v".into(),
            vec!["v".into()],
        )
        .unwrap();
        assert!(h.validate().is_ok());
        assert_eq!(h.paths(3), vec![HmscPath::Finite(vec![VertexId(0)])]);
        let lang = h.language(6, 1000).unwrap();
        assert_eq!(lang.words, BTreeSet::from([Word::empty()]));
    }

    #[test]
    fn cycle_without_terminal_yields_only_lassos() {
        let h = Hmsc::from_parts(
            vec![
                ("a".into(), Bmsc::empty()),
                ("b".into(), Bmsc::empty()),
            ],
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
            "a".into(),
            vec![],
        )
        .unwrap();
        assert!(h.validate().is_ok());
        let paths = h.paths(5);
        assert!(paths.iter().all(|p| matches!(p, HmscPath::Lasso { .. })));
        assert!(!paths.is_empty());
    }

    #[test]
    fn msc_of_path_matches_protocol() {
        let h = fixture("fig1.hmsc");
        // v0 (empty) -> v1 (cons) -> v2 (nil/ack).
        let m = h.msc_of_path(&[VertexId(0), VertexId(1), VertexId(2)]);
        assert_eq!(m.node_count(), 6);
        assert!(m.contains_linearization(&w(
            "P>Q!cons P>Q?cons P>Q!nil P>Q?nil Q>P!ack Q>P?ack"
        )));
    }

    #[test]
    fn fig1_language_matches_type_closure() {
        let h = fixture("fig1.hmsc");
        let lang = h.language(8, 100_000).unwrap();
        let g = crate::globaltype::GlobalType::parse(
            "rec t . ( P->Q:cons . t + P->Q:nil . Q->P:ack . end )",
        )
        .unwrap();
        let type_words = g.language(8).finite;
        let closed = closure(&type_words, 100_000).unwrap();
        assert_eq!(lang.words, closed);
        // Lasso prefixes include the pure cons unrollings.
        assert!(lang.prefixes.contains(&w("P>Q!cons P>Q?cons")));
    }

    #[test]
    fn language_is_closed_under_swaps() {
        for name in ["fig1.hmsc", "h7.hmsc", "h6.hmsc"] {
            let h = fixture(name);
            let lang = h.language(8, 100_000).unwrap();
            for word in &lang.words {
                for n in one_step_neighbors(word) {
                    assert!(lang.words.contains(&n), "{name}: {word} ~ {n}");
                }
            }
        }
    }

    #[test]
    fn language_words_are_complete(){
        let h = fixture("h7.hmsc");
        let lang = h.language(8, 100_000).unwrap();
        assert!(!lang.words.is_empty());
        for word in &lang.words {
            assert!(word.is_channel_compliant());
            assert_eq!(word.is_complete(), Ok(true));
        }
    }

    #[test]
    fn fig1_classification() {
        let h = fixture("fig1.hmsc");
        assert!(h.half_duplex().holds);
        assert_eq!(h.existential_bound().0, 1);
        assert!(h.k_synchronisable(1).holds);
    }

    #[test]
    fn h1_bound_is_two() {
        let h = fixture("h1.hmsc");
        assert_eq!(h.existential_bound().0, 2);
    }

    #[test]
    fn h7_classification() {
        let h = fixture("h7.hmsc");
        assert!(h.half_duplex().holds);
        assert_eq!(h.existential_bound().0, 1);
        assert!(h.k_synchronisable(1).holds);
    }

    #[test]
    fn embedded_landscape_vertices() {
        // An HMSC around the crossing-pair BMSC is 2- but not
        // 1-synchronisable and not half-duplex.
        let (_, m) = crate::text::parse_bmsc_file(
            &std::fs::read_to_string(format!(
                "{}/fixtures/h2.bmsc",
                env!("CARGO_MANIFEST_DIR")
            ))
            .unwrap(),
        )
        .unwrap();
        let h = Hmsc::from_parts(
            vec![("v".into(), Bmsc::try_from(m).unwrap())],
            vec![],
            "v".into(),
            vec!["v".into()],
        )
        .unwrap();
        assert!(!h.k_synchronisable(1).holds);
        assert!(h.k_synchronisable(2).holds);
        assert!(!h.half_duplex().holds);
    }

    #[test]
    fn vertex_local_rules_agree_with_bounded_language_oracle() {
        // Word-level classification over the bounded language must agree
        // with the vertex-local decisions. The bound must cover h1's
        // single maximal path (twelve events).
        for name in ["fig1.hmsc", "h6.hmsc", "h7.hmsc", "h1.hmsc"] {
            let h = fixture(name);
            let lang = h.language(12, 100_000).unwrap();
            let hd = h.half_duplex().holds;
            let all_words_hd = lang
                .words
                .iter()
                .chain(lang.prefixes.iter())
                .all(|w| w.is_half_duplex());
            assert_eq!(hd, all_words_hd, "{name} half-duplex");
            let (bound, _) = h.existential_bound();
            for word in lang.words.iter() {
                let m = crate::msc::msc_of(word).unwrap();
                let b = min_existential_bound(&m, bound).expect("within hmsc bound");
                assert!(b.bound <= bound, "{name}: {word}");
            }
        }
    }
}
