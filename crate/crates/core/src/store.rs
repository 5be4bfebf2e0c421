//! Embedded triple store.
//!
//! Triples are kept in an ordered set, so duplicates collapse and iteration is
//! deterministic. Queries are conjunctions of triple patterns evaluated by a
//! nested-loop join; the result is a sorted, duplicate-free list of bindings.
//!
//! Persistence uses a line-oriented N-Triples subset:
//!
//! ```text
//! # comment
//! <ferrari> <hasFacet> "brand=ferrari" .
//! <a> <knows> <b> .
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("query has no patterns")]
    EmptyQuery,
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Iri,
    Literal,
    Variable,
}

/// An IRI, literal or query variable. IRIs are opaque strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    kind: TermKind,
    text: String,
}

impl Term {
    pub fn iri(text: impl Into<String>) -> Self {
        Term { kind: TermKind::Iri, text: text.into() }
    }

    pub fn literal(text: impl Into<String>) -> Self {
        Term { kind: TermKind::Literal, text: text.into() }
    }

    /// A query variable. A leading `?` is stripped.
    pub fn var(name: impl Into<String>) -> Self {
        let name = name.into();
        let name = name.strip_prefix('?').map(str::to_owned).unwrap_or(name);
        Term { kind: TermKind::Variable, text: name }
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_variable(&self) -> bool {
        self.kind == TermKind::Variable
    }

    fn check_ground(&self) -> Result<()> {
        if self.text.trim().is_empty() {
            return Err(StoreError::MalformedTerm("empty term text".into()));
        }
        if self.is_variable() {
            return Err(StoreError::MalformedTerm(format!(
                "variable ?{} in a stored triple",
                self.text
            )));
        }
        Ok(())
    }
}

// Ordered by text first so binding sets sort by their bound texts.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.text.cmp(&other.text).then(self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TermKind::Iri => write!(f, "<{}>", escape_iri(&self.text)),
            TermKind::Literal => write!(f, "\"{}\"", escape_literal(&self.text)),
            TermKind::Variable => write!(f, "?{}", self.text),
        }
    }
}

/// A ground fact. Subject and predicate are IRIs, the object an IRI or literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self> {
        let t = Triple { subject, predicate, object };
        t.validate()?;
        Ok(t)
    }

    /// Shorthand for a triple whose three positions are IRIs.
    pub fn iris(s: &str, p: &str, o: &str) -> Result<Self> {
        Self::new(Term::iri(s), Term::iri(p), Term::iri(o))
    }

    /// Shorthand for `<s> <p> "o"`.
    pub fn with_literal(s: &str, p: &str, o: &str) -> Result<Self> {
        Self::new(Term::iri(s), Term::iri(p), Term::literal(o))
    }

    pub fn validate(&self) -> Result<()> {
        self.subject.check_ground()?;
        self.predicate.check_ground()?;
        self.object.check_ground()?;
        if self.subject.kind != TermKind::Iri {
            return Err(StoreError::MalformedTerm("subject must be an IRI".into()));
        }
        if self.predicate.kind != TermKind::Iri {
            return Err(StoreError::MalformedTerm("predicate must be an IRI".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple in which any position may be a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl TriplePattern {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        TriplePattern { subject, predicate, object }
    }

    fn positions(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    /// Variable names in order of first appearance.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.positions()
            .into_iter()
            .filter(|t| t.is_variable())
            .map(|t| t.text())
    }
}

pub type Binding = BTreeMap<String, Term>;

/// Query answers: duplicate-free, sorted by bound term texts in variable-name order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingSet {
    pub variables: Vec<String>,
    pub rows: Vec<Binding>,
}

impl BindingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Binding> {
        self.rows.iter()
    }
}

/// Set of triples with a revision counter that advances on every effective mutation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleStore {
    triples: BTreeSet<Triple>,
    revision: u64,
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Inserts `t`. Returns whether the triple was new; the revision only
    /// advances in that case.
    pub fn insert(&mut self, t: Triple) -> Result<bool> {
        t.validate()?;
        let added = self.triples.insert(t);
        if added {
            self.revision += 1;
        }
        Ok(added)
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) -> Result<usize> {
        let mut added = 0;
        for t in triples {
            if self.insert(t)? {
                added += 1;
            }
        }
        Ok(added)
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        let removed = self.triples.remove(t);
        if removed {
            self.revision += 1;
        }
        removed
    }

    /// Removes every triple matching the optional positions.
    pub fn remove_matching(
        &mut self,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
    ) -> usize {
        let doomed: Vec<Triple> = self.matching(subject, predicate, object).cloned().collect();
        for t in &doomed {
            self.triples.remove(t);
        }
        if !doomed.is_empty() {
            self.revision += 1;
        }
        doomed.len()
    }

    /// Triples agreeing with every `Some` position.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&'a Term>,
        predicate: Option<&'a Term>,
        object: Option<&'a Term>,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples.iter().filter(move |t| {
            subject.is_none_or(|s| &t.subject == s)
                && predicate.is_none_or(|p| &t.predicate == p)
                && object.is_none_or(|o| &t.object == o)
        })
    }

    /// Objects of `<subject> <predicate> ?o`.
    pub fn objects<'a>(&'a self, subject: &str, predicate: &str) -> Vec<&'a Term> {
        let s = Term::iri(subject);
        let p = Term::iri(predicate);
        self.triples
            .iter()
            .filter(|t| t.subject == s && t.predicate == p)
            .map(|t| &t.object)
            .collect()
    }

    /// Subjects of `?s <predicate> ?o` for any object.
    pub fn subjects_with(&self, predicate: &str) -> BTreeSet<&str> {
        let p = Term::iri(predicate);
        self.triples
            .iter()
            .filter(|t| t.predicate == p)
            .map(|t| t.subject.text())
            .collect()
    }

    /// Evaluates a conjunctive query. Shared variable names join.
    pub fn query(&self, patterns: &[TriplePattern]) -> Result<BindingSet> {
        if patterns.is_empty() {
            return Err(StoreError::EmptyQuery);
        }
        let mut variables: Vec<String> = Vec::new();
        for p in patterns {
            for v in p.variables() {
                if !variables.iter().any(|x| x == v) {
                    variables.push(v.to_owned());
                }
            }
        }

        let mut partial: Vec<Binding> = vec![Binding::new()];
        for pattern in patterns {
            let mut next = Vec::new();
            for binding in &partial {
                for t in &self.triples {
                    if let Some(extended) = unify(pattern, t, binding) {
                        next.push(extended);
                    }
                }
            }
            if next.is_empty() {
                return Ok(BindingSet { variables, rows: Vec::new() });
            }
            partial = next;
        }

        let rows: BTreeSet<Vec<Term>> = partial
            .into_iter()
            .map(|b| {
                let mut sorted: Vec<String> = variables.clone();
                sorted.sort();
                sorted.iter().map(|v| b[v].clone()).collect()
            })
            .collect();
        let mut names = variables.clone();
        names.sort();
        let rows = rows
            .into_iter()
            .map(|values| names.iter().cloned().zip(values).collect())
            .collect();
        Ok(BindingSet { variables, rows })
    }

    pub fn persist(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        self.write_ntriples(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn write_ntriples<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for t in &self.triples {
            writeln!(out, "{t}")?;
        }
        Ok(())
    }

    pub fn to_ntriples(&self) -> String {
        let mut buf = Vec::new();
        self.write_ntriples(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serialized triples are UTF-8")
    }

    pub fn restore(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_ntriples(&text)
    }

    pub fn from_ntriples(text: &str) -> Result<Self> {
        let mut store = TripleStore::new();
        for t in parse_ntriples(text)? {
            store.insert(t)?;
        }
        Ok(store)
    }
}

fn unify(pattern: &TriplePattern, t: &Triple, binding: &Binding) -> Option<Binding> {
    let mut out = binding.clone();
    for (p, v) in pattern.positions().into_iter().zip([&t.subject, &t.predicate, &t.object]) {
        if p.is_variable() {
            match out.get(p.text()) {
                Some(bound) if bound != v => return None,
                Some(_) => {}
                None => {
                    out.insert(p.text().to_owned(), v.clone());
                }
            }
        } else if p != v {
            return None;
        }
    }
    Some(out)
}

/// Parses the N-Triples subset, reporting 1-based line numbers on failure.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| StoreError::Parse { line: line_no, message };
        let mut cursor = Cursor { rest: line };
        let s = cursor.term().map_err(err)?;
        let p = cursor.term().map_err(err)?;
        let o = cursor.term().map_err(err)?;
        cursor.skip_ws();
        if cursor.rest != "." {
            return Err(err(format!("expected terminating '.', found {:?}", cursor.rest)));
        }
        let t = Triple::new(s, p, o).map_err(|e| err(e.to_string()))?;
        out.push(t);
    }
    Ok(out)
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn term(&mut self) -> std::result::Result<Term, String> {
        self.skip_ws();
        let mut chars = self.rest.char_indices();
        match chars.next() {
            Some((_, '<')) => {
                let end = self.rest.find('>').ok_or("unterminated IRI")?;
                let body = &self.rest[1..end];
                if body.chars().any(char::is_whitespace) {
                    return Err("whitespace inside IRI".into());
                }
                self.rest = &self.rest[end + 1..];
                Ok(Term::iri(unescape(body)?))
            }
            Some((_, '"')) => {
                let mut escaped = false;
                let mut end = None;
                for (i, c) in chars {
                    if escaped {
                        escaped = false;
                    } else if c == '\\' {
                        escaped = true;
                    } else if c == '"' {
                        end = Some(i);
                        break;
                    }
                }
                let end = end.ok_or("unterminated literal")?;
                let body = &self.rest[1..end];
                self.rest = &self.rest[end + 1..];
                Ok(Term::literal(unescape(body)?))
            }
            Some((_, c)) => Err(format!("unexpected character {c:?}")),
            None => Err("missing term".into()),
        }
    }
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn escape_iri(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c == '>' || c == '<' || c == '\\' || c == '"' || c.is_whitespace() || c.is_control() {
            let code = c as u32;
            if code > 0xFFFF {
                out.push_str(&format!("\\U{code:08X}"));
            } else {
                out.push_str(&format!("\\u{code:04X}"));
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn unescape(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            Some('"') => out.push('"'),
            Some('\\') => out.push('\\'),
            Some(u @ ('u' | 'U')) => {
                let width = if u == 'u' { 4 } else { 8 };
                let hex: String = chars.by_ref().take(width).collect();
                if hex.len() != width {
                    return Err("truncated unicode escape".into());
                }
                let code = u32::from_str_radix(&hex, 16).map_err(|_| "bad unicode escape")?;
                out.push(char::from_u32(code).ok_or("invalid code point")?);
            }
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}
