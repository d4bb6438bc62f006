//! Text formats for grammars, nets and transition partitions.
//!
//! Grammar files:
//!
//! ```text
//! type: cf                  # optional: gs | cf, inferred when absent
//! nonterminals: S A
//! terminals: a b
//! start: S
//! capacity: S=1 A=*         # omitted entries are unbounded
//! rules:
//!   r1: S -> a A b;
//!   r2: A -> ~;             # ~ is the empty word
//! matrices:                 # optional, makes the grammar regulated
//!   m1: (r1);
//!   m2: (r2);
//! mode: vector              # matrix | vector | semi-matrix
//! index: 3                  # optional index restriction
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::grammar::{Bound, CapacityFunction, Grammar, GrammarSpec, RuleSpec};
use crate::petri::{CapacityAssignment, Marking, PetriNet};
use crate::regulated::{ControlMode, Matrix, RegulatedGrammar, Restriction};

/// Section names of the grammar format; labels must avoid them.
pub const SECTION_KEYS: [&str; 9] = [
    "type",
    "nonterminals",
    "terminals",
    "start",
    "capacity",
    "rules",
    "matrices",
    "mode",
    "index",
];

/// Everything a grammar file declares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarFile {
    pub grammar: Grammar,
    /// All-unbounded when the file has no `capacity:` section.
    pub capacity: CapacityFunction,
    pub capacity_declared: bool,
    pub regulated: Option<RegulatedGrammar>,
}

impl GrammarFile {
    pub fn plain(grammar: Grammar, capacity: Option<CapacityFunction>) -> GrammarFile {
        GrammarFile {
            capacity_declared: capacity.is_some(),
            capacity: capacity.unwrap_or_else(|| CapacityFunction::unbounded(&grammar)),
            grammar,
            regulated: None,
        }
    }

    pub fn regulated(g: RegulatedGrammar) -> GrammarFile {
        let (capacity, declared) = match g.restriction() {
            Restriction::Capacity(k) => (k.clone(), true),
            _ => (CapacityFunction::unbounded(g.base()), false),
        };
        GrammarFile {
            grammar: g.base().clone(),
            capacity,
            capacity_declared: declared,
            regulated: Some(g),
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
enum Section {
    None,
    Nonterminals,
    Terminals,
    Capacity,
    Rules,
    Matrices,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Splits `key: rest` when `key` is one of `keys`.
fn header<'a>(line: &'a str, keys: &[&str]) -> Option<(&'a str, &'a str)> {
    let (k, rest) = line.split_once(':')?;
    let k = k.trim();
    keys.contains(&k).then_some((k, rest.trim()))
}

fn parse_bound(v: &str, line: usize) -> Result<Bound, ParseError> {
    if v == "*" {
        return Ok(Bound::Unbounded);
    }
    match v.parse::<u32>() {
        Ok(0) => Err(ParseError::new(line, "capacity must be at least 1")),
        Ok(k) => Ok(Bound::Finite(k)),
        Err(_) => Err(ParseError::new(line, format!("bad capacity `{v}`"))),
    }
}

fn parse_entry(tok: &str, line: usize) -> Result<(String, &str), ParseError> {
    match tok.rsplit_once('=') {
        Some((name, v)) if !name.is_empty() && !v.is_empty() => Ok((name.to_owned(), v)),
        _ => Err(ParseError::new(line, format!("expected name=value, got `{tok}`"))),
    }
}

/// Collects `label: body;` statements that may span lines.
struct Statements {
    buf: String,
    start: usize,
    done: Vec<(usize, String)>,
}

impl Statements {
    fn new() -> Statements {
        Statements {
            buf: String::new(),
            start: 0,
            done: Vec::new(),
        }
    }

    fn push(&mut self, text: &str, line: usize) {
        let mut rest = text;
        while !rest.trim().is_empty() {
            if self.buf.trim().is_empty() {
                self.start = line;
            }
            match rest.find(';') {
                Some(i) => {
                    self.buf.push_str(&rest[..i]);
                    self.done.push((self.start, std::mem::take(&mut self.buf)));
                    rest = &rest[i + 1..];
                }
                None => {
                    self.buf.push_str(rest);
                    self.buf.push(' ');
                    rest = "";
                }
            }
        }
    }

    fn finish(self) -> Result<Vec<(usize, String)>, ParseError> {
        if !self.buf.trim().is_empty() {
            return Err(ParseError::new(self.start, "statement is missing its `;`"));
        }
        Ok(self.done)
    }
}

fn split_label(stmt: &str, line: usize) -> Result<(String, &str), ParseError> {
    let (label, body) = stmt
        .split_once(':')
        .ok_or_else(|| ParseError::new(line, "expected `label: ...`"))?;
    let label = label.trim();
    if label.is_empty() || label.contains(char::is_whitespace) {
        return Err(ParseError::new(line, format!("bad label `{label}`")));
    }
    Ok((label.to_owned(), body))
}

fn parse_rule(stmt: &str, line: usize) -> Result<RuleSpec, ParseError> {
    let (label, body) = split_label(stmt, line)?;
    let toks: Vec<&str> = body.split_whitespace().collect();
    let arrow = toks
        .iter()
        .position(|&t| t == "->")
        .ok_or_else(|| ParseError::new(line, format!("rule {label} has no `->`")))?;
    let lhs: Vec<String> = toks[..arrow].iter().map(|s| s.to_string()).collect();
    let rhs_toks = &toks[arrow + 1..];
    let rhs: Vec<String> = if rhs_toks == ["~"] {
        Vec::new()
    } else if rhs_toks.is_empty() {
        return Err(ParseError::new(line, format!("rule {label}: empty rhs must be written `~`")));
    } else if rhs_toks.contains(&"~") {
        return Err(ParseError::new(line, format!("rule {label}: `~` must stand alone")));
    } else {
        rhs_toks.iter().map(|s| s.to_string()).collect()
    };
    Ok(RuleSpec { label, lhs, rhs })
}

fn parse_matrix(stmt: &str, line: usize) -> Result<(String, Vec<String>), ParseError> {
    let (label, body) = split_label(stmt, line)?;
    let body = body.trim();
    let inner = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| ParseError::new(line, format!("matrix {label}: expected `(r1, r2, ...)`")))?;
    let rules: Vec<String> = inner
        .split(',')
        .map(|r| r.trim().to_owned())
        .filter(|r| !r.is_empty())
        .collect();
    Ok((label, rules))
}

fn line_of_symbol(text: &str, name: &str) -> usize {
    text.lines()
        .position(|l| strip_comment(l).split_whitespace().any(|t| t == name || t.starts_with(&format!("{name}="))))
        .map_or(1, |i| i + 1)
}

/// Parses a grammar file.
pub fn parse_grammar(text: &str) -> Result<GrammarFile, ParseError> {
    let keys = SECTION_KEYS;
    let mut section = Section::None;
    let mut kind: Option<bool> = None;
    let mut nts = Vec::new();
    let mut ts = Vec::new();
    let mut start: Option<String> = None;
    let mut caps: Option<Vec<(String, Bound, usize)>> = None;
    let mut rules = Statements::new();
    let mut matrices = Statements::new();
    let mut has_matrices = false;
    let mut mode: Option<ControlMode> = None;
    let mut index: Option<usize> = None;
    let mut seen = HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (body, hdr) = match header(line, &keys) {
            // a rule whose label happens to be a keyword still has an arrow
            Some(_) if section == Section::Rules && line.contains("->") => (line, None),
            Some((k, rest)) => {
                if !seen.insert(k) {
                    return Err(ParseError::new(ln, format!("section `{k}` repeated")));
                }
                (rest, Some(k))
            }
            None => (line, None),
        };
        if let Some(k) = hdr {
            section = Section::None;
            match k {
                "type" => {
                    kind = Some(match body {
                        "cf" => true,
                        "gs" => false,
                        _ => return Err(ParseError::new(ln, format!("unknown type `{body}`"))),
                    });
                    continue;
                }
                "start" => {
                    let toks: Vec<&str> = body.split_whitespace().collect();
                    if toks.len() != 1 {
                        return Err(ParseError::new(ln, "start takes one symbol"));
                    }
                    start = Some(toks[0].to_owned());
                    continue;
                }
                "mode" => {
                    mode = Some(body.parse().map_err(|e: String| ParseError::new(ln, e))?);
                    continue;
                }
                "index" => {
                    index = Some(
                        body.parse()
                            .map_err(|_| ParseError::new(ln, format!("bad index `{body}`")))?,
                    );
                    continue;
                }
                "nonterminals" => section = Section::Nonterminals,
                "terminals" => section = Section::Terminals,
                "capacity" => {
                    section = Section::Capacity;
                    caps = Some(Vec::new());
                }
                "rules" => section = Section::Rules,
                "matrices" => {
                    section = Section::Matrices;
                    has_matrices = true;
                }
                _ => unreachable!(),
            }
        }
        match section {
            Section::None => {
                if !body.is_empty() {
                    return Err(ParseError::new(ln, format!("unexpected `{body}`")));
                }
            }
            Section::Nonterminals => nts.extend(body.split_whitespace().map(str::to_owned)),
            Section::Terminals => ts.extend(body.split_whitespace().map(str::to_owned)),
            Section::Capacity => {
                for tok in body.split_whitespace() {
                    let (name, v) = parse_entry(tok, ln)?;
                    let b = parse_bound(v, ln)?;
                    caps.as_mut().unwrap().push((name, b, ln));
                }
            }
            Section::Rules => rules.push(body, ln),
            Section::Matrices => matrices.push(body, ln),
        }
    }

    let start = start.ok_or_else(|| ParseError::new(1, "missing `start:`"))?;
    let rule_specs = rules
        .finish()?
        .into_iter()
        .map(|(ln, s)| parse_rule(&s, ln).map(|r| (ln, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let rule_lines: Vec<usize> = rule_specs.iter().map(|(l, _)| *l).collect();
    let mut spec = GrammarSpec {
        nonterminals: nts,
        terminals: ts,
        start,
        rules: rule_specs.into_iter().map(|(_, r)| r).collect(),
        context_free: false,
    };
    spec = match kind {
        Some(cf) => spec.context_free(cf),
        None => spec.infer_context_free(),
    };
    let report = crate::grammar::validate_grammar(&spec);
    if let Some(v) = report.violations.first() {
        let ln = violation_line(text, &spec, &rule_lines, v);
        return Err(ParseError::new(ln, v.to_string()));
    }
    let grammar = spec.build().map_err(|e| ParseError::new(1, e.to_string()))?;

    let capacity = match &caps {
        Some(entries) => {
            let mut seen = HashSet::new();
            for (name, _, ln) in entries {
                if !seen.insert(name) {
                    return Err(ParseError::new(*ln, format!("capacity of {name} given twice")));
                }
                if !grammar.sym(name).is_some_and(|s| s.is_nonterminal()) {
                    return Err(ParseError::new(*ln, format!("capacity for undeclared nonterminal {name}")));
                }
            }
            CapacityFunction::from_named(&grammar, entries.iter().map(|(n, b, _)| (n.as_str(), *b)))
                .map_err(|e| ParseError::new(1, e.to_string()))?
        }
        None => CapacityFunction::unbounded(&grammar),
    };

    let regulated = if has_matrices {
        if !grammar.is_context_free() {
            return Err(ParseError::new(
                line_of_key(text, "matrices"),
                "matrices need a context-free grammar",
            ));
        }
        let restriction = match (index, caps.is_some()) {
            (Some(_), true) => {
                return Err(ParseError::new(
                    line_of_key(text, "index"),
                    "a regulated grammar takes either `capacity:` or `index:`",
                ))
            }
            (Some(k), false) => Restriction::Index(k),
            (None, true) => Restriction::Capacity(capacity.clone()),
            (None, false) => Restriction::None,
        };
        let mut ms = Vec::new();
        for (ln, s) in matrices.finish()? {
            let (label, labels) = parse_matrix(&s, ln)?;
            if labels.is_empty() {
                return Err(ParseError::new(ln, format!("matrix {label} is empty")));
            }
            let rules = labels
                .iter()
                .map(|r| {
                    grammar
                        .rule_by_label(r)
                        .ok_or_else(|| ParseError::new(ln, format!("matrix {label}: unknown rule {r}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            ms.push((ln, Matrix { label, rules }));
        }
        let mut labels = HashSet::new();
        for (ln, m) in &ms {
            if !labels.insert(m.label.clone()) {
                return Err(ParseError::new(*ln, format!("matrix label {} used twice", m.label)));
            }
        }
        let g = RegulatedGrammar::new(
            grammar.clone(),
            ms.into_iter().map(|(_, m)| m).collect(),
            mode.unwrap_or(ControlMode::Matrix),
            restriction,
        )
        .map_err(|e| ParseError::new(1, e.to_string()))?;
        Some(g)
    } else {
        if mode.is_some() {
            return Err(ParseError::new(line_of_key(text, "mode"), "`mode:` without `matrices:`"));
        }
        if index.is_some() {
            return Err(ParseError::new(line_of_key(text, "index"), "`index:` without `matrices:`"));
        }
        None
    };

    Ok(GrammarFile {
        grammar,
        capacity,
        capacity_declared: caps.is_some(),
        regulated,
    })
}

fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| strip_comment(l).trim_start().starts_with(&format!("{key}:")))
        .map_or(1, |i| i + 1)
}

fn violation_line(
    text: &str,
    spec: &GrammarSpec,
    rule_lines: &[usize],
    v: &crate::grammar::Violation,
) -> usize {
    use crate::grammar::Violation as V;
    let rule_line = |label: &str| {
        spec.rules
            .iter()
            .position(|r| r.label == label)
            .map_or(1, |i| rule_lines[i])
    };
    match v {
        V::DuplicateSymbol(n) | V::SharedSymbol(n) => line_of_symbol(text, n),
        V::EmptySymbolName => 1,
        V::StartNotNonterminal(_) => line_of_key(text, "start"),
        V::DuplicateLabel(l) => {
            let mut hits = spec.rules.iter().enumerate().filter(|(_, r)| &r.label == l);
            hits.nth(1).map_or(1, |(i, _)| rule_lines[i])
        }
        V::EmptyLhs(label)
        | V::TerminalInLhs { label, .. }
        | V::LhsTooLong { label, .. }
        | V::UndeclaredSymbol { label, .. } => rule_line(label),
    }
}

fn rhs_text(rhs: &[String]) -> String {
    if rhs.is_empty() {
        "~".to_owned()
    } else {
        rhs.join(" ")
    }
}

/// Prints a grammar file; `parse_grammar` reads it back unchanged.
pub fn print_grammar(f: &GrammarFile) -> String {
    let g = &f.grammar;
    let spec = g.to_spec();
    let mut out = String::new();
    let _ = writeln!(out, "type: {}", if g.is_context_free() { "cf" } else { "gs" });
    let _ = writeln!(out, "nonterminals: {}", spec.nonterminals.join(" "));
    let _ = writeln!(out, "terminals: {}", spec.terminals.join(" "));
    let _ = writeln!(out, "start: {}", spec.start);
    let index = match f.regulated.as_ref().map(|r| r.restriction()) {
        Some(Restriction::Index(k)) => Some(*k),
        _ => None,
    };
    if f.capacity_declared && index.is_none() {
        let entries: Vec<String> = g
            .nonterminals()
            .map(|a| format!("{}={}", g.name(a), f.capacity.get(a)))
            .collect();
        let _ = writeln!(out, "capacity: {}", entries.join(" "));
    }
    out.push_str("rules:\n");
    for r in &spec.rules {
        let _ = writeln!(out, "  {}: {} -> {};", r.label, r.lhs.join(" "), rhs_text(&r.rhs));
    }
    if let Some(rg) = &f.regulated {
        out.push_str("matrices:\n");
        for m in rg.matrices() {
            let labels: Vec<&str> = m.rules.iter().map(|&r| g.rule(r).label.as_str()).collect();
            let _ = writeln!(out, "  {}: ({});", m.label, labels.join(", "));
        }
        let _ = writeln!(out, "mode: {}", rg.mode());
        if let Some(k) = index {
            let _ = writeln!(out, "index: {k}");
        }
    }
    out
}

/// A net together with its markings and capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetFile {
    pub net: PetriNet,
    pub marking: Marking,
    pub capacity: Option<CapacityAssignment>,
    pub final_marking: Option<Marking>,
}

/// Parses the net format (`places:`, `transitions:`, `arcs:`, `marking:`,
/// `capacity:`, `final:`).
pub fn parse_net(text: &str) -> Result<NetFile, ParseError> {
    let keys = ["places", "transitions", "arcs", "marking", "capacity", "final"];
    #[derive(PartialEq)]
    enum S {
        None,
        Places,
        Transitions,
        Arcs,
        Marking,
        Capacity,
        Final,
    }
    let mut section = S::None;
    let mut places = Vec::new();
    let mut transitions = Vec::new();
    let mut arcs = Statements::new();
    let mut marking = Vec::new();
    let mut caps: Option<Vec<(String, Bound, usize)>> = None;
    let mut fin: Option<Vec<(String, u32, usize)>> = None;
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut body = line;
        if let Some((k, rest)) = header(line, &keys) {
            if !seen.insert(k) {
                return Err(ParseError::new(ln, format!("section `{k}` repeated")));
            }
            body = rest;
            section = match k {
                "places" => S::Places,
                "transitions" => S::Transitions,
                "arcs" => S::Arcs,
                "marking" => S::Marking,
                "capacity" => {
                    caps = Some(Vec::new());
                    S::Capacity
                }
                "final" => {
                    fin = Some(Vec::new());
                    S::Final
                }
                _ => unreachable!(),
            };
        }
        let count = |tok: &str| -> Result<(String, u32), ParseError> {
            let (n, v) = parse_entry(tok, ln)?;
            let k = v
                .parse()
                .map_err(|_| ParseError::new(ln, format!("bad token count `{v}`")))?;
            Ok((n, k))
        };
        match section {
            S::None => return Err(ParseError::new(ln, format!("unexpected `{body}`"))),
            S::Places => places.extend(body.split_whitespace().map(str::to_owned)),
            S::Transitions => transitions.extend(body.split_whitespace().map(str::to_owned)),
            S::Arcs => arcs.push(body, ln),
            S::Marking => {
                for tok in body.split_whitespace() {
                    let (n, k) = count(tok)?;
                    marking.push((n, k, ln));
                }
            }
            S::Final => {
                for tok in body.split_whitespace() {
                    let (n, k) = count(tok)?;
                    fin.as_mut().unwrap().push((n, k, ln));
                }
            }
            S::Capacity => {
                for tok in body.split_whitespace() {
                    let (n, v) = parse_entry(tok, ln)?;
                    let b = parse_bound(v, ln)?;
                    caps.as_mut().unwrap().push((n, b, ln));
                }
            }
        }
    }
    let mut net = PetriNet::new(places, transitions).map_err(|e| ParseError::new(1, e.to_string()))?;
    for (ln, stmt) in arcs.finish()? {
        let toks: Vec<&str> = stmt.split_whitespace().collect();
        let (from, to, w) = match toks.as_slice() {
            [a, "->", b] => (*a, *b, 1),
            [a, "->", b, "@", w] => (
                *a,
                *b,
                w.parse::<u32>()
                    .map_err(|_| ParseError::new(ln, format!("bad weight `{w}`")))?,
            ),
            _ => return Err(ParseError::new(ln, "expected `x -> y;` or `x -> y @ w;`")),
        };
        let res = match (net.place_index(from), net.transition_index(to), net.transition_index(from), net.place_index(to)) {
            (Some(p), Some(t), _, _) => net.add_input(p, t, w),
            (_, _, Some(t), Some(p)) => net.add_output(t, p, w),
            _ => {
                return Err(ParseError::new(
                    ln,
                    format!("arc {from} -> {to} must join a declared place and transition"),
                ))
            }
        };
        res.map_err(|e| ParseError::new(ln, e.to_string()))?;
    }
    let place = |n: &str, ln: usize| {
        net.place_index(n)
            .ok_or_else(|| ParseError::new(ln, format!("unknown place {n}")))
    };
    let mut m = net.zero_marking();
    for (n, k, ln) in &marking {
        m.0[place(n, *ln)?] = *k;
    }
    let capacity = match caps {
        Some(entries) => {
            let mut c = CapacityAssignment::unbounded(&net);
            for (n, b, ln) in &entries {
                c.0[place(n, *ln)?] = *b;
            }
            Some(c)
        }
        None => None,
    };
    let final_marking = match fin {
        Some(entries) => {
            let mut f = net.zero_marking();
            for (n, k, ln) in &entries {
                f.0[place(n, *ln)?] = *k;
            }
            Some(f)
        }
        None => None,
    };
    Ok(NetFile {
        net,
        marking: m,
        capacity,
        final_marking,
    })
}

pub fn print_net(f: &NetFile) -> String {
    let n = &f.net;
    let mut out = String::new();
    let _ = writeln!(out, "places: {}", n.places().join(" "));
    let _ = writeln!(out, "transitions: {}", n.transitions().join(" "));
    out.push_str("arcs:\n");
    for t in 0..n.transitions().len() {
        for &(p, w) in n.inputs(t) {
            let _ = write!(out, "  {} -> {}", n.places()[p], n.transitions()[t]);
            if w != 1 {
                let _ = write!(out, " @ {w}");
            }
            out.push_str(";\n");
        }
        for &(p, w) in n.outputs(t) {
            let _ = write!(out, "  {} -> {}", n.transitions()[t], n.places()[p]);
            if w != 1 {
                let _ = write!(out, " @ {w}");
            }
            out.push_str(";\n");
        }
    }
    let entries = |m: &Marking| -> String {
        m.0.iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(p, k)| format!("{}={}", n.places()[p], k))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "marking: {}", entries(&f.marking));
    if let Some(c) = &f.capacity {
        let caps: Vec<String> = c
            .0
            .iter()
            .enumerate()
            .map(|(p, b)| format!("{}={}", n.places()[p], b))
            .collect();
        let _ = writeln!(out, "capacity: {}", caps.join(" "));
    }
    if let Some(m) = &f.final_marking {
        let _ = writeln!(out, "final: {}", entries(m));
    }
    out
}

/// A transition partition: `part: T1 = r0 r1 r2;`.
pub fn parse_partition(text: &str) -> Result<Vec<(String, Vec<String>)>, ParseError> {
    let mut stmts = Statements::new();
    for (i, raw) in text.lines().enumerate() {
        stmts.push(strip_comment(raw), i + 1);
    }
    let mut parts = Vec::new();
    for (ln, s) in stmts.finish()? {
        let body = s
            .trim()
            .strip_prefix("part:")
            .ok_or_else(|| ParseError::new(ln, "expected `part: NAME = labels;`"))?;
        let (name, labels) = body
            .split_once('=')
            .ok_or_else(|| ParseError::new(ln, "expected `part: NAME = labels;`"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(ParseError::new(ln, "part needs a name"));
        }
        parts.push((
            name.to_owned(),
            labels.split_whitespace().map(str::to_owned).collect(),
        ));
    }
    Ok(parts)
}

pub fn print_partition(parts: &[(String, Vec<String>)]) -> String {
    parts
        .iter()
        .map(|(n, ls)| format!("part: {} = {};\n", n, ls.join(" ")))
        .collect()
}
