//! Translation of global types into HMSCs.
//!
//! Vertices are the syntactic subterms of the type plus one vertex per
//! choice branch. Branch vertices carry the two-node BMSC of their
//! exchange; every other vertex carries the empty BMSC. Edges unfold
//! recursion (binder to body, variable back to binder) and route each
//! choice through its branch vertices into the continuations. The
//! initial vertex is the whole type; `end` (when present) is terminal.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::events::Word;
use crate::globaltype::{GlobalType, TypeLanguage};
use crate::hmsc::Hmsc;
use crate::indist::{closure, BudgetExceeded, DEFAULT_CLOSURE_BUDGET};
use crate::msc::Bmsc;

/// Where an HMSC vertex came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VertexOrigin {
    /// A syntactic subterm (printed in the type grammar).
    Subterm { term: String },
    /// Branch `index` (1-based) of a choice subterm.
    Branch { choice: String, index: usize },
}

/// The constructed HMSC plus the vertex provenance map.
#[derive(Debug, Clone)]
pub struct TranslationOutput {
    pub hmsc: Hmsc,
    pub vertex_map: BTreeMap<String, VertexOrigin>,
}

/// Builds the HMSC of a well-formed global type. Structurally equal
/// subterms share one vertex; distinct binders keep every recursion
/// unfolding separate.
pub fn translate(g: &GlobalType) -> TranslationOutput {
    let subterms = g.subterms();
    let mut names: Vec<String> = Vec::new();
    let mut labels: Vec<Bmsc> = Vec::new();
    let mut map: BTreeMap<String, VertexOrigin> = BTreeMap::new();
    let mut subterm_vertex: BTreeMap<&GlobalType, String> = BTreeMap::new();

    // Hashing on the printed form keeps vertex identity structural.
    let mut printed: BTreeMap<String, &GlobalType> = BTreeMap::new();
    for t in &subterms {
        printed.insert(t.to_string(), t);
    }

    let fresh = |names: &mut Vec<String>| {
        let name = format!("v{}", names.len());
        names.push(name.clone());
        name
    };

    // Subterm vertices in pre-order; branch vertices directly after
    // their choice vertex.
    let mut branch_vertex: BTreeMap<(String, usize), String> = BTreeMap::new();
    for t in &subterms {
        let name = fresh(&mut names);
        labels.push(Bmsc::empty());
        map.insert(name.clone(), VertexOrigin::Subterm { term: t.to_string() });
        subterm_vertex.insert(t, name.clone());
        if let GlobalType::Choice { sender, branches } = t {
            for (j, b) in branches.iter().enumerate() {
                let bname = fresh(&mut names);
                labels.push(Bmsc::single_message(sender, &b.receiver, &b.message));
                map.insert(
                    bname.clone(),
                    VertexOrigin::Branch {
                        choice: t.to_string(),
                        index: j + 1,
                    },
                );
                branch_vertex.insert((t.to_string(), j), bname);
            }
        }
    }

    let vertex_of = |t: &GlobalType| -> String {
        subterm_vertex
            .get(t)
            .cloned()
            .expect("every subterm has a vertex")
    };

    let mut edges: Vec<(String, String)> = Vec::new();
    for t in &subterms {
        match t {
            GlobalType::End => {}
            GlobalType::Var(v) => {
                // The (unique) binder for this variable.
                let binder = subterms
                    .iter()
                    .find(|s| matches!(s, GlobalType::Rec(b, _) if b == v))
                    .expect("well-formed type binds every variable");
                edges.push((vertex_of(t), vertex_of(binder)));
            }
            GlobalType::Rec(_, body) => {
                edges.push((vertex_of(t), vertex_of(body)));
            }
            GlobalType::Choice { branches, .. } => {
                for (j, b) in branches.iter().enumerate() {
                    let bname = branch_vertex[&(t.to_string(), j)].clone();
                    edges.push((vertex_of(t), bname.clone()));
                    edges.push((bname, vertex_of(&b.continuation)));
                }
            }
        }
    }

    let initial = vertex_of(&subterms[0]);
    let terminals: Vec<String> = subterms
        .iter()
        .filter(|t| matches!(t, GlobalType::End))
        .map(vertex_of)
        .collect();

    let vertices = names
        .iter()
        .cloned()
        .zip(labels)
        .collect::<Vec<(String, Bmsc)>>();
    let hmsc = Hmsc::from_parts(vertices, edges, initial, terminals)
        .expect("construction references only declared vertices");
    TranslationOutput { hmsc, vertex_map: map }
}

/// Optional post-pass: contracts non-terminal empty-BMSC vertices with
/// a single successor. Preserves the language; off by default.
pub fn fuse_empty_vertices(h: &Hmsc) -> Hmsc {
    let mut redirect: BTreeMap<String, String> = BTreeMap::new();
    for v in h.vertex_ids() {
        let succs: Vec<_> = h.successors(v).collect();
        let terminal = h.terminals().any(|t| t == v);
        if h.label(v).node_count() == 0
            && succs.len() == 1
            && succs[0] != v
            && !terminal
        {
            redirect.insert(
                h.vertex_name(v).to_string(),
                h.vertex_name(succs[0]).to_string(),
            );
        }
    }
    let resolve = |name: &str| -> String {
        let mut n = name.to_string();
        let mut hops = 0;
        while let Some(next) = redirect.get(&n) {
            n = next.clone();
            hops += 1;
            if hops > redirect.len() {
                break;
            }
        }
        n
    };
    let vertices: Vec<(String, Bmsc)> = h
        .vertex_ids()
        .filter(|v| !redirect.contains_key(h.vertex_name(*v)))
        .map(|v| (h.vertex_name(v).to_string(), h.label(v).clone()))
        .collect();
    let edges: Vec<(String, String)> = h
        .edges()
        .filter(|(a, _)| !redirect.contains_key(h.vertex_name(*a)))
        .map(|(a, b)| (h.vertex_name(a).to_string(), resolve(h.vertex_name(b))))
        .collect();
    let initial = resolve(h.vertex_name(h.initial()));
    let terminals: Vec<String> = h.terminals().map(|t| h.vertex_name(t).to_string()).collect();
    Hmsc::from_parts(vertices, edges, initial, terminals).expect("fusing preserves structure")
}

/// Outcome of the bounded translation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationCheck {
    pub max_len: usize,
    /// Type words missing from the HMSC language, if any.
    pub inclusion_failures: Vec<String>,
    /// Whether the closures of both bounded languages coincide.
    pub closure_equal: bool,
    /// A word separating the closures, if any.
    pub closure_counterexample: Option<String>,
}

impl TranslationCheck {
    pub fn passed(&self) -> bool {
        self.inclusion_failures.is_empty() && self.closure_equal
    }
}

/// Checks, at bounded length, that the type language embeds into the
/// HMSC language and that both have the same closure under
/// indistinguishability.
pub fn verify_translation(
    g: &GlobalType,
    max_len: usize,
    budget: usize,
) -> Result<TranslationCheck, BudgetExceeded> {
    let TypeLanguage { finite, .. } = g.language(max_len);
    let out = translate(g);
    let hlang = out
        .hmsc
        .language(max_len, budget)
        .map_err(|e| BudgetExceeded { budget: e.budget })?;
    let inclusion_failures: Vec<String> = finite
        .iter()
        .filter(|w| !hlang.words.contains(w))
        .map(|w| w.to_string())
        .collect();
    let type_closure = closure(&finite, budget)?;
    let hmsc_closure = closure(&hlang.words, budget)?;
    let closure_equal = type_closure == hmsc_closure;
    let closure_counterexample = if closure_equal {
        None
    } else {
        type_closure
            .symmetric_difference(&hmsc_closure)
            .next()
            .map(Word::to_string)
    };
    Ok(TranslationCheck {
        max_len,
        inclusion_failures,
        closure_equal,
        closure_counterexample,
    })
}

/// Convenience wrapper with the default closure budget.
pub fn verify_translation_default(
    g: &GlobalType,
    max_len: usize,
) -> Result<TranslationCheck, BudgetExceeded> {
    verify_translation(g, max_len, DEFAULT_CLOSURE_BUDGET)
}
