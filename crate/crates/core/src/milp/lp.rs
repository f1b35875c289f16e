//! A small subset of the CPLEX LP text format: one objective, named linear
//! rows, bounds, binaries and general integers.
//!
//! Grammar accepted by [`LpModel::parse`] (whitespace-insensitive,
//! `\` starts a comment that runs to end of line):
//!
//! ```text
//! model    := ("Minimize" | "Minimise") objname ":" terms
//!             ("Subject To" | "st") row*
//!             ["Bounds" bound*] ["Binaries" name*] ["Generals" name*] "End"
//! row      := name ":" terms ("<=" | ">=" | "=") signed
//! terms    := term ("+" | "-") term ...  with term := [number] name
//! bound    := signed "<=" name "<=" signed | name ("<=" | ">=" | "=") signed
//!           | name "free"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Writer line width target; terms are never split.
const WRAP: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, values: &BTreeMap<String, f64>) -> f64 {
        self.terms.iter().map(|(c, v)| c * values.get(v).copied().unwrap_or(0.0)).sum()
    }

    /// Amount by which the row is violated at `values` (0 when satisfied).
    pub fn violation(&self, values: &BTreeMap<String, f64>) -> f64 {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    /// Comment lines written before the objective.
    pub header: Vec<String>,
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<Row>,
    /// Explicit bounds; variables not listed default to `[0, inf)`.
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

struct Wrapper {
    out: String,
    line: usize,
}

impl Wrapper {
    fn start(&mut self, head: &str) {
        self.out.push(' ');
        self.out.push_str(head);
        self.line = head.len() + 1;
    }

    fn piece(&mut self, p: &str) {
        if self.line + 1 + p.len() > WRAP && self.line > 1 {
            self.out.push_str("\n  ");
            self.line = 2;
        } else {
            self.out.push(' ');
            self.line += 1;
        }
        self.out.push_str(p);
        self.line += p.len();
    }

    fn end(&mut self) {
        self.out.push('\n');
        self.line = 0;
    }

    fn terms(&mut self, terms: &[(f64, String)]) {
        for (i, (c, v)) in terms.iter().enumerate() {
            let sign = if c.is_sign_negative() { "-" } else { "+" };
            let mag = fmt_num(c.abs());
            let p = if i == 0 && sign == "+" { format!("{mag} {v}") } else { format!("{sign} {mag} {v}") };
            self.piece(&p);
        }
    }
}

impl LpModel {
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut vars: BTreeSet<&str> = BTreeSet::new();
        vars.extend(self.objective.iter().map(|(_, v)| v.as_str()));
        for r in &self.rows {
            vars.extend(r.terms.iter().map(|(_, v)| v.as_str()));
        }
        vars.extend(self.bounds.keys().map(String::as_str));
        vars.extend(self.binaries.iter().map(String::as_str));
        vars.extend(self.generals.iter().map(String::as_str));
        vars
    }

    pub fn objective_value(&self, values: &BTreeMap<String, f64>) -> f64 {
        self.objective.iter().map(|(c, v)| c * values.get(v).copied().unwrap_or(0.0)).sum()
    }

    /// Rows, bounds and integrality violated at `values` beyond `tol`.
    /// Variables absent from `values` are taken as zero.
    pub fn check_point(&self, values: &BTreeMap<String, f64>, tol: f64) -> Vec<String> {
        let mut bad = Vec::new();
        for r in &self.rows {
            let v = r.violation(values);
            if v > tol {
                bad.push(format!("{}: violated by {v}", r.name));
            }
        }
        for name in self.variables() {
            let x = values.get(name).copied().unwrap_or(0.0);
            let (lo, hi) = self.bounds.get(name).copied().unwrap_or((0.0, f64::INFINITY));
            if x < lo - tol || x > hi + tol {
                bad.push(format!("{name} = {x} outside [{lo}, {hi}]"));
            }
        }
        for name in self.binaries.iter().chain(&self.generals) {
            let x = values.get(name).copied().unwrap_or(0.0);
            if (x - x.round()).abs() > tol {
                bad.push(format!("{name} = {x} is not integral"));
            }
        }
        for name in &self.binaries {
            let x = values.get(name).copied().unwrap_or(0.0);
            if !(-tol..=1.0 + tol).contains(&x) {
                bad.push(format!("{name} = {x} is not binary"));
            }
        }
        bad
    }

    pub fn to_lp_string(&self) -> String {
        let mut w = Wrapper { out: String::new(), line: 0 };
        for h in &self.header {
            let _ = writeln!(w.out, "\\ {h}");
        }
        w.out.push_str("Minimize\n");
        w.start("obj:");
        w.terms(&self.objective);
        w.end();
        w.out.push_str("Subject To\n");
        for r in &self.rows {
            w.start(&format!("{}:", r.name));
            w.terms(&r.terms);
            w.piece(r.sense.as_str());
            w.piece(&fmt_num(r.rhs));
            w.end();
        }
        w.out.push_str("Bounds\n");
        for (name, &(lo, hi)) in &self.bounds {
            let line = if lo == hi {
                format!(" {name} = {}", fmt_num(lo))
            } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                format!(" {name} free")
            } else {
                format!(" {} <= {name} <= {}", fmt_num(lo), fmt_num(hi))
            };
            w.out.push_str(&line);
            w.out.push('\n');
        }
        for (title, names) in [("Binaries", &self.binaries), ("Generals", &self.generals)] {
            w.out.push_str(title);
            w.out.push('\n');
            w.line = 0;
            for n in names {
                if w.line == 0 {
                    w.start(n);
                } else {
                    w.piece(n);
                }
            }
            if w.line > 0 {
                w.end();
            }
        }
        w.out.push_str("End\n");
        w.out
    }

    pub fn parse(text: &str) -> Result<LpModel> {
        Parser::new(text)?.model()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Colon,
    Plus,
    Minus,
    Cmp(Sense),
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '[' | ']')
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut toks = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let code = line.split('\\').next().unwrap_or("");
        let chars: Vec<char> = code.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if is_name_start(c) {
                let s = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                toks.push((Tok::Word(chars[s..i].iter().collect()), line_no));
            } else if c.is_ascii_digit() || c == '.' {
                let s = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    let mut k = i + 1;
                    if k < chars.len() && matches!(chars[k], '+' | '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        i = k;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[s..i].iter().collect();
                let v = s.parse::<f64>().map_err(|_| Error::ModelParse { line: line_no, message: format!("bad number `{s}`") })?;
                toks.push((Tok::Num(v), line_no));
            } else {
                let next = chars.get(i + 1).copied();
                let (t, len) = match (c, next) {
                    (':', _) => (Tok::Colon, 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    ('<', Some('=')) => (Tok::Cmp(Sense::Le), 2),
                    ('>', Some('=')) => (Tok::Cmp(Sense::Ge), 2),
                    ('=', Some('<')) => (Tok::Cmp(Sense::Le), 2),
                    ('=', Some('>')) => (Tok::Cmp(Sense::Ge), 2),
                    ('<', _) => (Tok::Cmp(Sense::Le), 1),
                    ('>', _) => (Tok::Cmp(Sense::Ge), 1),
                    ('=', _) => (Tok::Cmp(Sense::Eq), 1),
                    _ => return Err(Error::ModelParse { line: line_no, message: format!("unexpected character `{c}`") }),
                };
                toks.push((t, line_no));
                i += len;
            }
        }
    }
    Ok(toks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    SubjectTo,
    Bounds,
    Binaries,
    Generals,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |t| t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::ModelParse { line: self.line(), message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Result<Tok> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.0.clone())
            }
            None => self.err("unexpected end of model (missing `End`?)"),
        }
    }

    /// Section keyword at the cursor, consuming it.
    fn section(&mut self) -> Option<Section> {
        let Some(Tok::Word(w)) = self.peek() else { return None };
        let w = w.to_ascii_lowercase();
        let sec = match w.as_str() {
            "subject" => {
                if let Some((Tok::Word(to), _)) = self.toks.get(self.pos + 1) {
                    if to.eq_ignore_ascii_case("to") {
                        self.pos += 2;
                        return Some(Section::SubjectTo);
                    }
                }
                return None;
            }
            "st" | "s.t." => Section::SubjectTo,
            "bounds" | "bound" => Section::Bounds,
            "binaries" | "binary" | "bin" => Section::Binaries,
            "generals" | "general" | "gen" => Section::Generals,
            "end" => Section::End,
            _ => return None,
        };
        // A row may legitimately be called `end:`; only treat the word as a
        // keyword when no colon follows.
        if matches!(self.toks.get(self.pos + 1), Some((Tok::Colon, _))) {
            return None;
        }
        self.pos += 1;
        Some(sec)
    }

    fn signed_number(&mut self) -> Result<f64> {
        let mut sign = 1.0;
        loop {
            match self.next()? {
                Tok::Plus => {}
                Tok::Minus => sign = -sign,
                Tok::Num(v) => return Ok(sign * v),
                Tok::Word(w) if w.eq_ignore_ascii_case("inf") || w.eq_ignore_ascii_case("infinity") => {
                    return Ok(sign * f64::INFINITY)
                }
                t => return self.err(format!("expected a number, found {t:?}")),
            }
        }
    }

    /// Linear terms up to (not including) a comparison or section keyword.
    fn terms(&mut self) -> Result<Vec<(f64, String)>> {
        let mut terms = Vec::new();
        loop {
            let mut sign = 1.0;
            let mut saw_sign = false;
            while let Some(Tok::Plus | Tok::Minus) = self.peek() {
                if self.next()? == Tok::Minus {
                    sign = -sign;
                }
                saw_sign = true;
            }
            match self.peek() {
                Some(Tok::Num(_)) => {
                    let Tok::Num(c) = self.next()? else { unreachable!() };
                    match self.next()? {
                        Tok::Word(v) => terms.push((sign * c, v)),
                        t => return self.err(format!("expected a variable after {c}, found {t:?}")),
                    }
                }
                Some(Tok::Word(_)) if !self.at_row_or_section() => {
                    let Tok::Word(v) = self.next()? else { unreachable!() };
                    terms.push((sign, v));
                }
                _ if saw_sign => return self.err("dangling sign"),
                _ => return Ok(terms),
            }
        }
    }

    /// True at `name :` or a section keyword.
    fn at_row_or_section(&self) -> bool {
        match (self.toks.get(self.pos), self.toks.get(self.pos + 1)) {
            (Some((Tok::Word(_), _)), Some((Tok::Colon, _))) => true,
            (Some((Tok::Word(w), _)), _) => {
                let w = w.to_ascii_lowercase();
                matches!(w.as_str(), "subject" | "st" | "bounds" | "bound" | "binaries" | "binary" | "bin" | "generals" | "general" | "gen" | "end")
            }
            _ => false,
        }
    }

    fn model(mut self) -> Result<LpModel> {
        let mut m = LpModel::default();
        match self.next()? {
            Tok::Word(w) if w.eq_ignore_ascii_case("minimize") || w.eq_ignore_ascii_case("minimise") || w.eq_ignore_ascii_case("min") => {}
            t => return self.err(format!("expected `Minimize`, found {t:?}")),
        }
        if let (Some((Tok::Word(_), _)), Some((Tok::Colon, _))) = (self.toks.get(self.pos), self.toks.get(self.pos + 1)) {
            self.pos += 2;
        }
        m.objective = self.terms()?;
        let mut sec = match self.section() {
            Some(Section::SubjectTo) => Section::SubjectTo,
            _ => return self.err("expected `Subject To`"),
        };
        loop {
            if let Some(s) = self.section() {
                if s == Section::End {
                    if self.pos != self.toks.len() {
                        return self.err("content after `End`");
                    }
                    return Ok(m);
                }
                sec = s;
                continue;
            }
            match sec {
                Section::SubjectTo => {
                    let name = match (self.next()?, self.next()?) {
                        (Tok::Word(n), Tok::Colon) => n,
                        _ => return self.err("expected a row name followed by `:`"),
                    };
                    let terms = self.terms()?;
                    let sense = match self.next()? {
                        Tok::Cmp(s) => s,
                        t => return self.err(format!("row {name}: expected a comparison, found {t:?}")),
                    };
                    let rhs = self.signed_number()?;
                    m.rows.push(Row { name, terms, sense, rhs });
                }
                Section::Bounds => self.bound(&mut m)?,
                Section::Binaries | Section::Generals => match self.next()? {
                    Tok::Word(n) => {
                        if sec == Section::Binaries {
                            m.binaries.push(n)
                        } else {
                            m.generals.push(n)
                        }
                    }
                    t => return self.err(format!("expected a variable name, found {t:?}")),
                },
                Section::End => unreachable!(),
            }
        }
    }

    fn bound(&mut self, m: &mut LpModel) -> Result<()> {
        let cur = |m: &LpModel, n: &str| m.bounds.get(n).copied().unwrap_or((0.0, f64::INFINITY));
        if let Some(Tok::Word(w)) = self.peek() {
            if !(w.eq_ignore_ascii_case("inf") || w.eq_ignore_ascii_case("infinity")) {
                let Tok::Word(name) = self.next()? else { unreachable!() };
                if let Some(Tok::Word(f)) = self.peek() {
                    if f.eq_ignore_ascii_case("free") {
                        self.pos += 1;
                        m.bounds.insert(name, (f64::NEG_INFINITY, f64::INFINITY));
                        return Ok(());
                    }
                }
                let sense = match self.next()? {
                    Tok::Cmp(s) => s,
                    t => return self.err(format!("bound on {name}: expected a comparison, found {t:?}")),
                };
                let v = self.signed_number()?;
                let (lo, hi) = cur(m, &name);
                let b = match sense {
                    Sense::Eq => (v, v),
                    Sense::Le => (lo, v),
                    Sense::Ge => (v, hi),
                };
                m.bounds.insert(name, b);
                return Ok(());
            }
        }
        let lo = self.signed_number()?;
        if !matches!(self.next()?, Tok::Cmp(Sense::Le)) {
            return self.err("expected `<=` in a two-sided bound");
        }
        let name = match self.next()? {
            Tok::Word(n) => n,
            t => return self.err(format!("expected a variable name, found {t:?}")),
        };
        let hi = if matches!(self.peek(), Some(Tok::Cmp(Sense::Le))) {
            self.pos += 1;
            self.signed_number()?
        } else {
            cur(m, &name).1
        };
        m.bounds.insert(name, (lo, hi));
        Ok(())
    }
}
