//! Global types: sender-driven choice over message exchanges with
//! guarded tail recursion.
//!
//! Each syntactic exchange `P->Q:m` contributes the adjacent event pair
//! `P>Q!m P>Q?m` to the type language, so type words are complete and
//! channel-compliant by construction. Infinite executions are exposed
//! as lassos over the recursion structure.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::events::{Event, Lasso, Message, ProcessId, Word};

/// A recursion variable; binders are globally distinct within a type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeVar(String);

impl TypeVar {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "type variable must be non-empty");
        TypeVar(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TypeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One alternative of a choice: an exchange followed by a continuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub receiver: ProcessId,
    pub message: Message,
    pub continuation: Box<GlobalType>,
}

/// Global type syntax tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GlobalType {
    /// Protocol end.
    End,
    /// Recursion variable occurrence.
    Var(TypeVar),
    /// Guarded recursion binder.
    Rec(TypeVar, Box<GlobalType>),
    /// Sender-driven choice; a single branch is a plain exchange prefix.
    Choice {
        sender: ProcessId,
        branches: Vec<Branch>,
    },
}

impl GlobalType {
    /// Parses the concrete syntax; see [`crate::text::parse_global_type`].
    pub fn parse(input: &str) -> Result<GlobalType, crate::text::ParseError> {
        crate::text::parse_global_type(input)
    }

    /// All syntactic subterms including the term itself, deduplicated
    /// structurally, in pre-order.
    pub fn subterms(&self) -> Vec<GlobalType> {
        let mut out: Vec<GlobalType> = Vec::new();
        fn walk(t: &GlobalType, out: &mut Vec<GlobalType>) {
            if !out.contains(t) {
                out.push(t.clone());
            }
            match t {
                GlobalType::End | GlobalType::Var(_) => {}
                GlobalType::Rec(_, body) => walk(body, out),
                GlobalType::Choice { branches, .. } => {
                    for b in branches {
                        walk(&b.continuation, out);
                    }
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// The bounded type language: maximal finite words up to `max_len`
    /// plus one lasso per simple unfolding cycle.
    pub fn language(&self, max_len: usize) -> TypeLanguage {
        let mut finite = BTreeSet::new();
        let mut lassos = BTreeSet::new();

        // Finite executions: unfold recursion, prune past max_len.
        // Guardedness makes every unfolding add at least two events.
        fn finite_walk<'a>(
            t: &'a GlobalType,
            root: &'a GlobalType,
            events: &mut Vec<Event>,
            max_len: usize,
            out: &mut BTreeSet<Word>,
        ) {
            if events.len() > max_len {
                return;
            }
            match t {
                GlobalType::End => {
                    if events.len() <= max_len {
                        out.insert(Word::new(events.clone()));
                    }
                }
                GlobalType::Var(v) => {
                    let rec = find_rec(root, v).expect("well-formed type binds every variable");
                    finite_walk(rec, root, events, max_len, out);
                }
                GlobalType::Rec(_, body) => finite_walk(body, root, events, max_len, out),
                GlobalType::Choice { sender, branches } => {
                    for b in branches {
                        events.push(Event::send(sender, &b.receiver, &b.message));
                        events.push(Event::receive(sender, &b.receiver, &b.message));
                        finite_walk(&b.continuation, root, events, max_len, out);
                        events.pop();
                        events.pop();
                    }
                }
            }
        }

        // Lassos: walk without unfolding; a variable occurrence closes
        // the cycle opened at its binder.
        fn lasso_walk(
            t: &GlobalType,
            events: &mut Vec<Event>,
            marks: &mut Vec<(TypeVar, usize)>,
            out: &mut BTreeSet<Lasso>,
        ) {
            match t {
                GlobalType::End => {}
                GlobalType::Var(v) => {
                    if let Some((_, at)) = marks.iter().rev().find(|(m, _)| m == v) {
                        let stem = Word::new(events[..*at].to_vec());
                        let cycle = Word::new(events[*at..].to_vec());
                        out.insert(Lasso::new(stem, cycle));
                    }
                }
                GlobalType::Rec(v, body) => {
                    marks.push((v.clone(), events.len()));
                    lasso_walk(body, events, marks, out);
                    marks.pop();
                }
                GlobalType::Choice { sender, branches } => {
                    for b in branches {
                        events.push(Event::send(sender, &b.receiver, &b.message));
                        events.push(Event::receive(sender, &b.receiver, &b.message));
                        lasso_walk(&b.continuation, events, marks, out);
                        events.pop();
                        events.pop();
                    }
                }
            }
        }

        let mut events = Vec::new();
        finite_walk(self, self, &mut events, max_len, &mut finite);
        let mut events = Vec::new();
        let mut marks = Vec::new();
        lasso_walk(self, &mut events, &mut marks, &mut lassos);
        TypeLanguage { finite, lassos }
    }
}

fn find_rec<'a>(t: &'a GlobalType, var: &TypeVar) -> Option<&'a GlobalType> {
    match t {
        GlobalType::Rec(v, body) => {
            if v == var {
                Some(body)
            } else {
                find_rec(body, var)
            }
        }
        GlobalType::Choice { branches, .. } => {
            branches.iter().find_map(|b| find_rec(&b.continuation, var))
        }
        _ => None,
    }
}

/// Bounded view of a type's executions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeLanguage {
    /// Maximal words reaching `end`, length at most the requested bound.
    pub finite: BTreeSet<Word>,
    /// One lasso per simple recursion cycle.
    pub lassos: BTreeSet<Lasso>,
}

impl fmt::Display for GlobalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalType::End => f.write_str("end"),
            GlobalType::Var(v) => write!(f, "{v}"),
            GlobalType::Rec(v, body) => write!(f, "rec {v} . {body}"),
            GlobalType::Choice { sender, branches } => {
                let one = |f: &mut fmt::Formatter<'_>, b: &Branch| {
                    write!(f, "{}->{}:{} . {}", sender, b.receiver, b.message, b.continuation)
                };
                if branches.len() == 1 {
                    one(f, &branches[0])
                } else {
                    f.write_str("( ")?;
                    for (i, b) in branches.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" + ")?;
                        }
                        one(f, b)?;
                    }
                    f.write_str(" )")
                }
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WellFormedError {
    #[error("unguarded recursion through variable `{0}`")]
    UnguardedRecursion(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("duplicate recursion binder `{0}`")]
    DuplicateBinder(String),
    #[error("branches {0} and {1} of a choice are not distinguishable")]
    IndistinguishableBranches(usize, usize),
    #[error("choice branches use different senders")]
    MixedSenders,
    #[error("a process cannot message itself")]
    SelfMessage,
    #[error("a choice must have at least one branch")]
    EmptyChoice,
}

/// Checks guardedness, binding discipline, and branch distinguishability.
pub fn check_well_formed(g: &GlobalType) -> Result<(), WellFormedError> {
    let mut binders = BTreeSet::new();
    collect_binders(g, &mut binders)?;
    walk(g, &mut Vec::new(), &mut BTreeSet::new())?;
    return Ok(());

    fn collect_binders(
        g: &GlobalType,
        seen: &mut BTreeSet<TypeVar>,
    ) -> Result<(), WellFormedError> {
        match g {
            GlobalType::Rec(v, body) => {
                if !seen.insert(v.clone()) {
                    return Err(WellFormedError::DuplicateBinder(v.name().to_string()));
                }
                collect_binders(body, seen)
            }
            GlobalType::Choice { branches, .. } => {
                for b in branches {
                    collect_binders(&b.continuation, seen)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn walk(
        g: &GlobalType,
        scope: &mut Vec<TypeVar>,
        unguarded: &mut BTreeSet<TypeVar>,
    ) -> Result<(), WellFormedError> {
        match g {
            GlobalType::End => Ok(()),
            GlobalType::Var(v) => {
                if !scope.contains(v) {
                    return Err(WellFormedError::UnboundVariable(v.name().to_string()));
                }
                if unguarded.contains(v) {
                    return Err(WellFormedError::UnguardedRecursion(v.name().to_string()));
                }
                Ok(())
            }
            GlobalType::Rec(v, body) => {
                scope.push(v.clone());
                unguarded.insert(v.clone());
                let r = walk(body, scope, unguarded);
                scope.pop();
                unguarded.remove(v);
                r
            }
            GlobalType::Choice { sender, branches } => {
                if branches.is_empty() {
                    return Err(WellFormedError::EmptyChoice);
                }
                for (i, a) in branches.iter().enumerate() {
                    if a.receiver == *sender {
                        return Err(WellFormedError::SelfMessage);
                    }
                    for (j, b) in branches.iter().enumerate().skip(i + 1) {
                        if a.receiver == b.receiver && a.message == b.message {
                            return Err(WellFormedError::IndistinguishableBranches(i, j));
                        }
                    }
                }
                // A message prefix guards every enclosing binder.
                let mut inner = BTreeSet::new();
                for b in branches {
                    walk(&b.continuation, scope, &mut inner)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_word;

    fn gt(s: &str) -> GlobalType {
        GlobalType::parse(s).unwrap()
    }

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    const FIG1: &str = "rec t . ( P->Q:cons . t + P->Q:nil . Q->P:ack . end )";

    #[test]
    fn parse_print_identity() {
        for text in [
            "end",
            "P->Q:m . end",
            FIG1,
            "rec t . P->Q:m . t",
            "( P->Q:a . end + P->R:b . R->Q:c . end )",
        ] {
            let g = gt(text);
            assert_eq!(gt(&g.to_string()), g, "{text}");
        }
    }

    #[test]
    fn rejects_malformed_types() {
        assert!(GlobalType::parse("rec t . t").is_err());
        assert!(GlobalType::parse("( P->Q:m . end + P->Q:m . end )").is_err());
        assert!(GlobalType::parse("t").is_err());
        assert!(GlobalType::parse("rec t . rec t . P->Q:m . t").is_err());
        assert!(GlobalType::parse("rec t . rec u . t").is_err());
        assert!(GlobalType::parse("P->P:m . end").is_err());
    }

    #[test]
    fn nested_recursion_guarded_by_outer_message_is_fine() {
        assert!(GlobalType::parse("rec t . P->Q:m . rec u . ( Q->P:a . u + Q->P:b . t )").is_ok());
    }

    #[test]
    fn subterm_enumeration() {
        assert_eq!(gt("end").subterms(), vec![GlobalType::End]);
        // The binder, the sum, the variable, the ack exchange, and end.
        assert_eq!(gt(FIG1).subterms().len(), 5);
        // rec, singleton sum, variable.
        assert_eq!(gt("rec t . P->Q:m . t").subterms().len(), 3);
    }

    #[test]
    fn shared_continuations_deduplicate() {
        let g = gt("( P->Q:a . end + P->Q:b . end )");
        // The sum and a single shared end.
        assert_eq!(g.subterms().len(), 2);
    }

    #[test]
    fn fig1_language() {
        let lang = gt(FIG1).language(8);
        assert!(lang.finite.contains(&w("P>Q!nil P>Q?nil Q>P!ack Q>P?ack")));
        assert!(lang
            .finite
            .contains(&w("P>Q!cons P>Q?cons P>Q!nil P>Q?nil Q>P!ack Q>P?ack")));
        // Zero, one, and two cons iterations fit in eight events.
        assert_eq!(lang.finite.len(), 3);
        assert_eq!(
            lang.lassos,
            BTreeSet::from([Lasso::new(Word::empty(), w("P>Q!cons P>Q?cons"))])
        );
    }

    #[test]
    fn end_language_is_epsilon() {
        let lang = gt("end").language(4);
        assert_eq!(lang.finite, BTreeSet::from([Word::empty()]));
        assert!(lang.lassos.is_empty());
    }

    #[test]
    fn sequential_exchanges_single_word() {
        let lang = gt("P->Q:m1 . R->S:m2 . end").language(8);
        assert_eq!(
            lang.finite,
            BTreeSet::from([w("P>Q!m1 P>Q?m1 R>S!m2 R>S?m2")])
        );
    }

    #[test]
    fn type_words_are_complete_and_adjacent() {
        let lang = gt(FIG1).language(12);
        for word in &lang.finite {
            assert!(word.is_channel_compliant());
            assert_eq!(word.is_complete(), Ok(true));
            // Every send is immediately followed by its receive.
            for pair in word.events().chunks(2) {
                assert!(pair[0].is_send());
                assert_eq!(pair[1], pair[0].counterpart());
            }
        }
    }

    #[test]
    fn nested_recursion_lassos() {
        let g = gt("rec t . P->Q:a . rec u . ( Q->P:b . u + Q->P:c . t )");
        let lang = g.language(6);
        let expected: BTreeSet<Lasso> = BTreeSet::from([
            Lasso::new(w("P>Q!a P>Q?a"), w("Q>P!b Q>P?b")),
            Lasso::new(Word::empty(), w("P>Q!a P>Q?a Q>P!c Q>P?c")),
        ]);
        assert_eq!(lang.lassos, expected);
    }

    #[test]
    fn language_oracle_by_direct_enumeration() {
        // Independent oracle: enumerate executions breadth-first over a
        // worklist instead of the recursive walk.
        let g = gt(FIG1);
        let max_len = 10;
        let mut expected: BTreeSet<Word> = BTreeSet::new();
        let mut frontier: Vec<(GlobalType, Vec<Event>)> = vec![(g.clone(), Vec::new())];
        while let Some((t, events)) = frontier.pop() {
            if events.len() > max_len {
                continue;
            }
            match &t {
                GlobalType::End => {
                    expected.insert(Word::new(events));
                }
                GlobalType::Var(v) => {
                    let body = find_rec(&g, v).unwrap().clone();
                    frontier.push((body, events));
                }
                GlobalType::Rec(_, body) => frontier.push(((**body).clone(), events)),
                GlobalType::Choice { sender, branches } => {
                    for b in branches {
                        let mut ev = events.clone();
                        ev.push(Event::send(sender, &b.receiver, &b.message));
                        ev.push(Event::receive(sender, &b.receiver, &b.message));
                        frontier.push(((*b.continuation).clone(), ev));
                    }
                }
            }
        }
        assert_eq!(g.language(max_len).finite, expected);
    }
}
