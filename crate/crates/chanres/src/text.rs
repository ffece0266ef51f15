//! Text formats: word literals, global types (`.gt`), basic and prefix
//! MSCs (`.bmsc`), HMSCs (`.hmsc`), and communicating state machines
//! (`.csm`), with positioned parse diagnostics.
//!
//! Word syntax: `P>Q!m` is a send on channel P→Q, `P>Q?m` the matching
//! receive (performed by Q); events are whitespace-separated and the
//! empty word prints as `ε`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::csm::{Action, Csm, StateMachine};
use crate::events::{ChannelId, Event, Message, ProcessId, Word};
use crate::globaltype::{Branch, GlobalType, TypeVar};
use crate::hmsc::Hmsc;
use crate::msc::{Bmsc, MscBuilder, NodeId, PrefixMsc};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

// ---------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(usize),
    Arrow,  // ->
    Gt,     // >
    Bang,   // !
    Query,  // ?
    Colon,
    Semi,
    Dot,
    Plus,
    Equals,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Number(n) => write!(f, "number `{n}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Query => f.write_str("`?`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Lexer {
    fn new(input: &str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let mut line = 1usize;
        let mut col = 1usize;
        let mut chars = input.chars().peekable();
        while let Some(&c) = chars.peek() {
            let (tline, tcol) = (line, col);
            let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
                let c = chars.next().unwrap();
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                c
            };
            if c.is_whitespace() {
                bump(&mut chars);
                continue;
            }
            if c == '#' {
                // line comment
                while let Some(&c) = chars.peek() {
                    bump(&mut chars);
                    if c == '\n' {
                        break;
                    }
                }
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(s), tline, tcol));
                continue;
            }
            if c.is_ascii_digit() {
                let mut n = 0usize;
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        n = n * 10 + (bump(&mut chars) as usize - '0' as usize);
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Number(n), tline, tcol));
                continue;
            }
            let tok = match c {
                '-' => {
                    bump(&mut chars);
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars);
                        Tok::Arrow
                    } else {
                        return Err(ParseError::new(tline, tcol, "expected `->`"));
                    }
                }
                '>' => {
                    bump(&mut chars);
                    Tok::Gt
                }
                '!' => {
                    bump(&mut chars);
                    Tok::Bang
                }
                '?' => {
                    bump(&mut chars);
                    Tok::Query
                }
                ':' => {
                    bump(&mut chars);
                    Tok::Colon
                }
                ';' => {
                    bump(&mut chars);
                    Tok::Semi
                }
                '.' => {
                    bump(&mut chars);
                    Tok::Dot
                }
                '+' => {
                    bump(&mut chars);
                    Tok::Plus
                }
                '=' => {
                    bump(&mut chars);
                    Tok::Equals
                }
                '{' => {
                    bump(&mut chars);
                    Tok::LBrace
                }
                '}' => {
                    bump(&mut chars);
                    Tok::RBrace
                }
                '(' => {
                    bump(&mut chars);
                    Tok::LParen
                }
                ')' => {
                    bump(&mut chars);
                    Tok::RParen
                }
                other => {
                    return Err(ParseError::new(
                        tline,
                        tcol,
                        format!("unexpected character `{other}`"),
                    ))
                }
            };
            toks.push((tok, tline, tcol));
        }
        toks.push((Tok::Eof, line, col));
        Ok(Lexer { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(l, c, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.err(format!("expected identifier, found {other}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            other => Err(self.err(format!("expected `{kw}`, found {other}"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        match *self.peek() {
            Tok::Number(n) => {
                self.next();
                Ok(n)
            }
            ref other => Err(self.err(format!("expected number, found {other}"))),
        }
    }
}

// ---------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------

/// Parses the whitespace-separated word syntax; `ε` or an empty string
/// denotes the empty word.
pub fn parse_word(input: &str) -> Result<Word, ParseError> {
    let trimmed = input.trim();
    if trimmed.is_empty() || trimmed == "ε" {
        return Ok(Word::empty());
    }
    let mut lex = Lexer::new(trimmed)?;
    let mut events = Vec::new();
    while *lex.peek() != Tok::Eof {
        let from = lex.ident()?;
        lex.expect(Tok::Gt)?;
        let to = lex.ident()?;
        let kind = lex.next();
        let msg = lex.ident()?;
        if from == to {
            return Err(lex.err("sender and receiver must differ"));
        }
        let event = match kind {
            Tok::Bang => Event::send(from.as_str(), to.as_str(), msg.as_str()),
            Tok::Query => Event::receive(from.as_str(), to.as_str(), msg.as_str()),
            other => return Err(lex.err(format!("expected `!` or `?`, found {other}"))),
        };
        events.push(event);
    }
    Ok(Word::new(events))
}

// ---------------------------------------------------------------------
// Global types
// ---------------------------------------------------------------------

/// Parses the global-type grammar: `end`, `rec t . G`, `P->Q:m . G`,
/// sums `( b1 + b2 + ... )`, and recursion variables. Well-formedness
/// (guardedness, binding, branch distinguishability) is checked after
/// parsing and reported with positions where possible.
pub fn parse_global_type(input: &str) -> Result<GlobalType, ParseError> {
    let mut lex = Lexer::new(input)?;
    let g = parse_type(&mut lex)?;
    lex.expect(Tok::Eof)?;
    crate::globaltype::check_well_formed(&g)
        .map_err(|e| ParseError::new(0, 0, e.to_string()))?;
    Ok(g)
}

fn parse_type(lex: &mut Lexer) -> Result<GlobalType, ParseError> {
    match lex.peek().clone() {
        Tok::LParen => {
            lex.next();
            let mut branches = vec![parse_branch(lex)?];
            while *lex.peek() == Tok::Plus {
                lex.next();
                branches.push(parse_branch(lex)?);
            }
            lex.expect(Tok::RParen)?;
            let sender = branches[0].0.clone();
            for (s, _, _, _) in &branches {
                if *s != sender {
                    return Err(lex.err(format!(
                        "all branches of a choice must share one sender (found `{sender}` and `{s}`)"
                    )));
                }
            }
            Ok(GlobalType::Choice {
                sender,
                branches: branches
                    .into_iter()
                    .map(|(_, receiver, message, cont)| Branch {
                        receiver,
                        message,
                        continuation: Box::new(cont),
                    })
                    .collect(),
            })
        }
        Tok::Ident(s) if s == "end" => {
            lex.next();
            Ok(GlobalType::End)
        }
        Tok::Ident(s) if s == "rec" => {
            lex.next();
            let var = lex.ident()?;
            lex.expect(Tok::Dot)?;
            let body = parse_type(lex)?;
            Ok(GlobalType::Rec(TypeVar::new(var), Box::new(body)))
        }
        Tok::Ident(_) => {
            if *lex.peek2() == Tok::Arrow {
                let (sender, receiver, message, cont) = parse_branch(lex)?;
                Ok(GlobalType::Choice {
                    sender,
                    branches: vec![Branch {
                        receiver,
                        message,
                        continuation: Box::new(cont),
                    }],
                })
            } else {
                let var = lex.ident()?;
                Ok(GlobalType::Var(TypeVar::new(var)))
            }
        }
        other => Err(lex.err(format!("expected a global type, found {other}"))),
    }
}

fn parse_branch(lex: &mut Lexer) -> Result<(ProcessId, ProcessId, Message, GlobalType), ParseError> {
    let sender = lex.ident()?;
    lex.expect(Tok::Arrow)?;
    let receiver = lex.ident()?;
    if sender == receiver {
        return Err(lex.err("sender and receiver must differ"));
    }
    lex.expect(Tok::Colon)?;
    let message = lex.ident()?;
    lex.expect(Tok::Dot)?;
    let cont = parse_type(lex)?;
    Ok((
        ProcessId::new(sender),
        ProcessId::new(receiver),
        Message::new(message),
        cont,
    ))
}

// ---------------------------------------------------------------------
// BMSC / prefix MSC files
// ---------------------------------------------------------------------

/// Parses a named `bmsc <name> { ... }` block. The result may be a
/// prefix MSC (unmatched sends allowed) even though the keyword says
/// `bmsc`; use [`Bmsc::try_from`] to insist on completeness.
pub fn parse_bmsc_file(input: &str) -> Result<(String, PrefixMsc), ParseError> {
    let mut lex = Lexer::new(input)?;
    lex.keyword("bmsc")?;
    let name = lex.ident()?;
    let msc = parse_bmsc_block(&mut lex)?;
    lex.expect(Tok::Eof)?;
    Ok((name, msc))
}

/// Parses the `{ msg ... ; P : ... ; }` body shared by standalone and
/// inline BMSC blocks.
fn parse_bmsc_block(lex: &mut Lexer) -> Result<PrefixMsc, ParseError> {
    lex.expect(Tok::LBrace)?;
    struct MsgDecl {
        channel: ChannelId,
        msg: Message,
        line: usize,
        col: usize,
    }
    let mut msgs: BTreeMap<usize, MsgDecl> = BTreeMap::new();
    while lex.at_keyword("msg") {
        let (line, col) = lex.here();
        lex.next();
        let id = lex.number()?;
        lex.expect(Tok::Colon)?;
        let from = lex.ident()?;
        lex.expect(Tok::Arrow)?;
        let to = lex.ident()?;
        if from == to {
            return Err(lex.err("sender and receiver must differ"));
        }
        lex.expect(Tok::Colon)?;
        let m = lex.ident()?;
        lex.expect(Tok::Semi)?;
        if msgs
            .insert(
                id,
                MsgDecl {
                    channel: ChannelId::new(ProcessId::new(from), ProcessId::new(to)),
                    msg: Message::new(m),
                    line,
                    col,
                },
            )
            .is_some()
        {
            return Err(ParseError::new(line, col, format!("duplicate msg id {id}")));
        }
    }
    // Process rows: each row is a sequence of !k / ?k references.
    let mut builder = MscBuilder::new();
    let mut send_nodes: BTreeMap<usize, NodeId> = BTreeMap::new();
    let mut recv_nodes: BTreeMap<usize, NodeId> = BTreeMap::new();
    while *lex.peek() != Tok::RBrace {
        let (line, col) = lex.here();
        let proc_name = lex.ident()?;
        let proc = ProcessId::new(proc_name.clone());
        lex.expect(Tok::Colon)?;
        if builder.has_row(&proc) {
            return Err(ParseError::new(line, col, format!("duplicate row for process {proc_name}")));
        }
        builder.add_row(proc.clone());
        while *lex.peek() != Tok::Semi {
            let op = lex.next();
            let (rline, rcol) = lex.here();
            let id = lex.number()?;
            let decl = msgs.get(&id).ok_or_else(|| {
                ParseError::new(rline, rcol, format!("msg {id} not declared"))
            })?;
            match op {
                Tok::Bang => {
                    if decl.channel.from != proc {
                        return Err(ParseError::new(
                            rline,
                            rcol,
                            format!("msg {id} is sent by {}, not {proc_name}", decl.channel.from),
                        ));
                    }
                    let node = builder.push_event(Event::send(
                        &decl.channel.from,
                        &decl.channel.to,
                        &decl.msg,
                    ));
                    if send_nodes.insert(id, node).is_some() {
                        return Err(ParseError::new(rline, rcol, format!("msg {id} sent twice")));
                    }
                }
                Tok::Query => {
                    if decl.channel.to != proc {
                        return Err(ParseError::new(
                            rline,
                            rcol,
                            format!("msg {id} is received by {}, not {proc_name}", decl.channel.to),
                        ));
                    }
                    let node = builder.push_event(Event::receive(
                        &decl.channel.from,
                        &decl.channel.to,
                        &decl.msg,
                    ));
                    if recv_nodes.insert(id, node).is_some() {
                        return Err(ParseError::new(rline, rcol, format!("msg {id} received twice")));
                    }
                }
                other => {
                    return Err(lex.err(format!("expected `!` or `?`, found {other}")));
                }
            }
        }
        lex.expect(Tok::Semi)?;
    }
    lex.expect(Tok::RBrace)?;
    for (id, decl) in &msgs {
        let send = send_nodes.get(id).ok_or_else(|| {
            ParseError::new(decl.line, decl.col, format!("msg {id} is never sent"))
        })?;
        if let Some(recv) = recv_nodes.get(id) {
            builder.add_match(*send, *recv);
        }
    }
    builder
        .build()
        .map_err(|report| ParseError::new(0, 0, format!("invalid MSC: {report}")))
}

/// Renders a prefix MSC as a single-line `bmsc { ... }` block body used
/// inside HMSC files.
fn write_bmsc_block(m: &PrefixMsc) -> String {
    let mut parts: Vec<String> = Vec::new();
    // Message ids in send-node order.
    let mut ids: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut decls = Vec::new();
    let matching = m.matching();
    for (k, node) in m.send_nodes().iter().enumerate() {
        let e = m.label(*node);
        ids.insert(*node, k + 1);
        decls.push(format!("msg {} : {} -> {} : {} ;", k + 1, e.from, e.to, e.msg));
    }
    parts.extend(decls);
    for (proc, row) in m.rows() {
        let mut items = Vec::new();
        for node in row {
            let e = m.label(*node);
            if e.is_send() {
                items.push(format!("!{}", ids[node]));
            } else {
                let send = matching
                    .iter()
                    .find(|(_, r)| **r == *node)
                    .map(|(s, _)| *s)
                    .expect("receive node has a matching send");
                items.push(format!("?{}", ids[&send]));
            }
        }
        parts.push(format!("{} : {} ;", proc, items.join(" ")));
    }
    if parts.is_empty() {
        "bmsc { }".to_string()
    } else {
        format!("bmsc {{ {} }}", parts.join(" "))
    }
}

// ---------------------------------------------------------------------
// HMSC files
// ---------------------------------------------------------------------

/// Parses an `hmsc <name> { ... }` file. Vertex labels must be complete
/// (every declared message received).
pub fn parse_hmsc_file(input: &str) -> Result<(String, Hmsc), ParseError> {
    let mut lex = Lexer::new(input)?;
    lex.keyword("hmsc")?;
    let name = lex.ident()?;
    lex.expect(Tok::LBrace)?;
    let mut initial: Option<String> = None;
    let mut terminals: Vec<String> = Vec::new();
    let mut vertices: Vec<(String, Bmsc)> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    loop {
        if *lex.peek() == Tok::RBrace {
            lex.next();
            break;
        }
        let (line, col) = lex.here();
        if lex.at_keyword("initial") {
            lex.next();
            let v = lex.ident()?;
            lex.expect(Tok::Semi)?;
            if initial.replace(v).is_some() {
                return Err(ParseError::new(line, col, "duplicate initial declaration"));
            }
        } else if lex.at_keyword("terminal") {
            lex.next();
            while let Tok::Ident(_) = lex.peek() {
                terminals.push(lex.ident()?);
            }
            lex.expect(Tok::Semi)?;
        } else if lex.at_keyword("vertex") {
            lex.next();
            let v = lex.ident()?;
            lex.expect(Tok::Equals)?;
            lex.keyword("bmsc")?;
            let msc = parse_bmsc_block(&mut lex)?;
            lex.expect(Tok::Semi)?;
            let bmsc = Bmsc::try_from(msc).map_err(|_| {
                ParseError::new(line, col, format!("vertex {v}: unmatched send in HMSC vertex"))
            })?;
            if vertices.iter().any(|(n, _)| *n == v) {
                return Err(ParseError::new(line, col, format!("duplicate vertex {v}")));
            }
            vertices.push((v, bmsc));
        } else if lex.at_keyword("edge") {
            lex.next();
            let a = lex.ident()?;
            lex.expect(Tok::Arrow)?;
            let b = lex.ident()?;
            lex.expect(Tok::Semi)?;
            edges.push((a, b));
        } else {
            return Err(lex.err(format!(
                "expected `initial`, `terminal`, `vertex`, or `edge`, found {}",
                lex.peek()
            )));
        }
    }
    lex.expect(Tok::Eof)?;
    let initial = initial.ok_or_else(|| ParseError::new(0, 0, "missing initial declaration"))?;
    let hmsc = Hmsc::from_parts(vertices, edges, initial, terminals)
        .map_err(|e| ParseError::new(0, 0, e))?;
    Ok((name, hmsc))
}

/// Writes an HMSC in the canonical `.hmsc` file format. The output
/// re-parses to an identical structure.
pub fn write_hmsc_file(name: &str, h: &Hmsc) -> String {
    let mut out = String::new();
    out.push_str(&format!("hmsc {name} {{\n"));
    out.push_str(&format!("  initial {} ;\n", h.vertex_name(h.initial())));
    for v in h.terminals() {
        out.push_str(&format!("  terminal {} ;\n", h.vertex_name(v)));
    }
    for v in h.vertex_ids() {
        out.push_str(&format!(
            "  vertex {} = {} ;\n",
            h.vertex_name(v),
            write_bmsc_block(h.label(v))
        ));
    }
    for (a, b) in h.edges() {
        out.push_str(&format!("  edge {} -> {} ;\n", h.vertex_name(a), h.vertex_name(b)));
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------
// CSM files
// ---------------------------------------------------------------------

/// Parses a `csm <name> { machine P { ... } ... }` file. Transition
/// actions are written from the owning machine's point of view:
/// `! Q m` sends `m` to `Q`, `? Q m` receives `m` from `Q`, `eps` is
/// an internal step.
pub fn parse_csm_file(input: &str) -> Result<(String, Csm), ParseError> {
    let mut lex = Lexer::new(input)?;
    lex.keyword("csm")?;
    let name = lex.ident()?;
    lex.expect(Tok::LBrace)?;
    let mut machines: Vec<(ProcessId, StateMachine)> = Vec::new();
    while lex.at_keyword("machine") {
        lex.next();
        let (line, col) = lex.here();
        let owner = ProcessId::new(lex.ident()?);
        if machines.iter().any(|(p, _)| *p == owner) {
            return Err(ParseError::new(line, col, format!("duplicate machine {owner}")));
        }
        lex.expect(Tok::LBrace)?;
        let mut initial: Option<String> = None;
        let mut finals: Vec<String> = Vec::new();
        let mut transitions: Vec<(String, Action, String)> = Vec::new();
        loop {
            if *lex.peek() == Tok::RBrace {
                lex.next();
                break;
            }
            if lex.at_keyword("initial") {
                let (line, col) = lex.here();
                lex.next();
                let s = lex.ident()?;
                lex.expect(Tok::Semi)?;
                if initial.replace(s).is_some() {
                    return Err(ParseError::new(line, col, "duplicate initial declaration"));
                }
                continue;
            }
            if lex.at_keyword("final") {
                lex.next();
                while let Tok::Ident(_) = lex.peek() {
                    finals.push(lex.ident()?);
                }
                lex.expect(Tok::Semi)?;
                continue;
            }
            let src = lex.ident()?;
            lex.expect(Tok::Arrow)?;
            let dst = lex.ident()?;
            lex.expect(Tok::Colon)?;
            let action = match lex.next() {
                Tok::Bang => {
                    let peer = lex.ident()?;
                    let msg = lex.ident()?;
                    if peer == owner.name() {
                        return Err(lex.err("a machine cannot send to itself"));
                    }
                    Action::Event(Event::send(&owner, peer.as_str(), msg.as_str()))
                }
                Tok::Query => {
                    let peer = lex.ident()?;
                    let msg = lex.ident()?;
                    if peer == owner.name() {
                        return Err(lex.err("a machine cannot receive from itself"));
                    }
                    Action::Event(Event::receive(peer.as_str(), &owner, msg.as_str()))
                }
                Tok::Ident(s) if s == "eps" => Action::Epsilon,
                other => {
                    return Err(lex.err(format!("expected `!`, `?`, or `eps`, found {other}")))
                }
            };
            lex.expect(Tok::Semi)?;
            transitions.push((src, action, dst));
        }
        let initial = initial
            .ok_or_else(|| ParseError::new(line, col, format!("machine {owner}: missing initial")))?;
        let machine = StateMachine::from_named_parts(initial, finals, transitions)
            .map_err(|e| ParseError::new(line, col, e))?;
        machines.push((owner, machine));
    }
    lex.expect(Tok::RBrace)?;
    lex.expect(Tok::Eof)?;
    Csm::new(machines).map_err(|e| ParseError::new(0, 0, e)).map(|c| (name, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_roundtrip() {
        let word = parse_word("P>Q!m P>Q?m Q>P!ack").unwrap();
        assert_eq!(word.to_string(), "P>Q!m P>Q?m Q>P!ack");
        assert_eq!(parse_word("ε").unwrap(), Word::empty());
        assert_eq!(parse_word("  ").unwrap(), Word::empty());
        assert_eq!(Word::empty().to_string(), "ε");
    }

    #[test]
    fn word_rejects_self_channel() {
        assert!(parse_word("P>P!m").is_err());
    }

    #[test]
    fn word_reports_position() {
        let err = parse_word("P>Q!m P>Q m").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.col > 1);
    }

    #[test]
    fn bmsc_roundtrip_via_block_writer() {
        let (name, msc) = parse_bmsc_file(
            "bmsc pair {\n  msg 1 : P -> Q : m ;\n  msg 2 : Q -> P : m ;\n  P : !1 ?2 ;\n  Q : !2 ?1 ;\n}",
        )
        .unwrap();
        assert_eq!(name, "pair");
        assert_eq!(msc.node_count(), 4);
        let block = write_bmsc_block(&msc);
        let mut lex = Lexer::new(&block[5..]).unwrap(); // skip "bmsc "
        let reparsed = parse_bmsc_block(&mut lex).unwrap();
        assert!(msc.is_isomorphic(&reparsed));
    }

    #[test]
    fn bmsc_rejects_wrong_row() {
        let err = parse_bmsc_file("bmsc x { msg 1 : P -> Q : m ; P : !1 ?1 ; Q : ; }").unwrap_err();
        assert!(err.message.contains("received by"));
    }

    #[test]
    fn bmsc_unmatched_send_is_prefix_msc() {
        let (_, msc) = parse_bmsc_file("bmsc x { msg 1 : P -> Q : m ; P : !1 ; Q : ; }").unwrap();
        assert_eq!(msc.unmatched_sends().len(), 1);
        assert!(Bmsc::try_from(msc).is_err());
    }

    #[test]
    fn global_type_examples() {
        let g = parse_global_type("rec t . ( P->Q:cons . t + P->Q:nil . Q->P:ack . end )").unwrap();
        assert_eq!(
            g.to_string(),
            "rec t . ( P->Q:cons . t + P->Q:nil . Q->P:ack . end )"
        );
        assert!(parse_global_type("rec t . t").is_err());
        assert!(parse_global_type("( P->Q:m . end + P->Q:m . end )").is_err());
    }

    #[test]
    fn csm_file_parses() {
        let (name, csm) = parse_csm_file(
            "csm demo {\n machine P { initial s0 ; final s1 ;\n   s0 -> s1 : ! Q m ;\n   s0 -> s0 : eps ;\n }\n machine Q { initial t0 ; final t1 ;\n   t0 -> t1 : ? P m ;\n }\n}",
        )
        .unwrap();
        assert_eq!(name, "demo");
        assert_eq!(csm.processes().len(), 2);
    }
}
