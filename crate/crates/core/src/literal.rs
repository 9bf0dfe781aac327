//! Text literals for every value kind, with positioned errors.
//!
//! Rationals are `-inf | inf | <int> | <int>/<int>`. Printers emit the
//! canonical form, which parses back to an equal value.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::b2::Bit;
use crate::carrier::FiniteSet;
use crate::catalog::{BinarySequence, CofiniteSet, ElementarySet};
use crate::derivable::{AxisBox, BoxUnion, LocallyFiniteSet};
use crate::interval::IntervalUnion;
use crate::rational::{ExtRational, Rational};
use crate::set_ring::{FiniteUniverse, SubsetMask};
use crate::step::{BinaryStepFunction, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiteralError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: {message}")]
    Semantic { line: usize, col: usize, message: String },
}

/// A character cursor that tracks line and column.
pub(crate) struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0, line: 1 }
    }

    fn on_line(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    pub(crate) fn syntax(&self, message: impl Into<String>) -> LiteralError {
        LiteralError::Syntax { line: self.line, col: self.col(), message: message.into() }
    }

    fn semantic_at(&self, pos: usize, message: impl Into<String>) -> LiteralError {
        let col = self.text[..pos].chars().count() + 1;
        LiteralError::Semantic { line: self.line, col, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), LiteralError> {
        if self.eat(c) { Ok(()) } else { Err(self.syntax(format!("expected `{c}`"))) }
    }

    pub(crate) fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(word) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_word(&mut self, word: &str) -> Result<(), LiteralError> {
        if self.eat_word(word) { Ok(()) } else { Err(self.syntax(format!("expected `{word}`"))) }
    }

    pub(crate) fn finish(&mut self) -> Result<(), LiteralError> {
        if self.at_end() { Ok(()) } else { Err(self.syntax("unexpected trailing input")) }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| &self.text[start..self.pos])
    }

    fn int(&mut self) -> Result<i128, LiteralError> {
        self.skip_ws();
        let start = self.pos;
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let Some(d) = self.digits() else {
            self.pos = start;
            return Err(self.syntax("expected an integer"));
        };
        let v: i128 = d.parse().map_err(|_| self.semantic_at(start, "integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    pub(crate) fn natural(&mut self) -> Result<u64, LiteralError> {
        self.skip_ws();
        let start = self.pos;
        let Some(d) = self.digits() else {
            return Err(self.syntax("expected a natural number"));
        };
        d.parse().map_err(|_| self.semantic_at(start, "natural number out of range"))
    }

    pub(crate) fn rational(&mut self) -> Result<Rational, LiteralError> {
        self.skip_ws();
        let start = self.pos;
        let n = self.int()?;
        if self.peek() == Some('/') {
            self.pos += 1;
            let dpos = self.pos;
            if self.peek() == Some('-') {
                return Err(self.syntax("denominator must be a positive integer"));
            }
            let d = self.int()?;
            if d == 0 {
                return Err(self.semantic_at(dpos, "zero denominator"));
            }
            let _ = start;
            return Ok(Rational::new(n, d));
        }
        Ok(Rational::from_integer(n))
    }

    pub(crate) fn ext(&mut self) -> Result<ExtRational, LiteralError> {
        if self.eat_word("-inf") {
            return Ok(ExtRational::NegInf);
        }
        if self.eat_word("inf") || self.eat_word("+inf") {
            return Ok(ExtRational::PosInf);
        }
        self.rational().map(ExtRational::Finite)
    }

    pub(crate) fn bit(&mut self) -> Result<Bit, LiteralError> {
        if self.eat('0') {
            Ok(Bit::ZERO)
        } else if self.eat('1') {
            Ok(Bit::ONE)
        } else {
            Err(self.syntax("expected 0 or 1"))
        }
    }

    /// `[a,b)`
    pub(crate) fn interval(&mut self) -> Result<(ExtRational, ExtRational), LiteralError> {
        self.expect('[')?;
        let a = self.ext()?;
        self.expect(',')?;
        let b = self.ext()?;
        self.expect(')')?;
        Ok((a, b))
    }

    /// Comma-separated rationals that stop at whitespace-separated keywords.
    fn rational_list(&mut self, what: &str) -> Result<Vec<(usize, Rational)>, LiteralError> {
        let mut out = Vec::new();
        self.skip_ws();
        if !self.starts_number() {
            return Ok(out);
        }
        loop {
            self.skip_ws();
            let at = self.pos;
            out.push((at, self.rational()?));
            if !self.eat(',') {
                break;
            }
            if !self.starts_number_after_ws() {
                return Err(self.syntax(format!("expected a {what} after `,`")));
            }
        }
        Ok(out)
    }

    fn starts_number(&self) -> bool {
        let mut cs = self.rest().chars();
        match cs.next() {
            Some(c) if c.is_ascii_digit() => true,
            Some('-') => cs.next().is_some_and(|c| c.is_ascii_digit()),
            _ => false,
        }
    }

    fn starts_number_after_ws(&mut self) -> bool {
        self.skip_ws();
        self.starts_number()
    }

    fn natural_list(&mut self) -> Result<Vec<(usize, u64)>, LiteralError> {
        let mut out = Vec::new();
        self.skip_ws();
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Ok(out);
        }
        loop {
            self.skip_ws();
            let at = self.pos;
            out.push((at, self.natural()?));
            if !self.eat(',') {
                break;
            }
        }
        Ok(out)
    }
}

fn distinct<T: Ord + Clone + fmt::Display>(
    cur: &Cursor<'_>,
    items: Vec<(usize, T)>,
    what: &str,
) -> Result<BTreeSet<T>, LiteralError> {
    let mut out = BTreeSet::new();
    for (at, x) in items {
        if !out.insert(x.clone()) {
            return Err(cur.semantic_at(at, format!("duplicate {what} {x}")));
        }
    }
    Ok(out)
}

pub fn parse_rational(text: &str) -> Result<Rational, LiteralError> {
    let mut c = Cursor::new(text);
    let r = c.rational()?;
    c.finish()?;
    Ok(r)
}

pub fn parse_ext(text: &str) -> Result<ExtRational, LiteralError> {
    let mut c = Cursor::new(text);
    let r = c.ext()?;
    c.finish()?;
    Ok(r)
}

/// One `[a,b)`, kept as written (reversed endpoints mean [[a,b))).
pub fn parse_single_interval(text: &str) -> Result<(ExtRational, ExtRational), LiteralError> {
    let mut c = Cursor::new(text);
    let iv = c.interval()?;
    c.finish()?;
    Ok(iv)
}

/// Whitespace-separated `[a,b)` pieces, united; `{}` is the empty set.
pub fn parse_interval_union(text: &str) -> Result<IntervalUnion, LiteralError> {
    let mut c = Cursor::new(text);
    if c.eat('{') {
        c.expect('}')?;
        c.finish()?;
        return Ok(IntervalUnion::empty());
    }
    let mut raw = Vec::new();
    loop {
        raw.push(c.interval()?);
        if c.at_end() {
            break;
        }
    }
    Ok(IntervalUnion::union_of(&raw))
}

/// `points=r1,r2,...`, the prefix being optional; `{}` or nothing is empty.
pub fn parse_points(text: &str) -> Result<FiniteSet<Rational>, LiteralError> {
    let mut c = Cursor::new(text);
    c.eat_word("points=");
    if c.eat('{') {
        c.expect('}')?;
        c.finish()?;
        return Ok(FiniteSet::empty());
    }
    let items = c.rational_list("point")?;
    c.finish()?;
    Ok(FiniteSet(distinct(&c, items, "support point")?))
}

/// Points of R^n: bare rationals for n = 1, tuples `(x,y,...)` otherwise.
pub fn parse_point_tuples(text: &str) -> Result<FiniteSet<Point>, LiteralError> {
    let mut c = Cursor::new(text);
    c.eat_word("points=");
    if c.eat('{') {
        c.expect('}')?;
        c.finish()?;
        return Ok(FiniteSet::empty());
    }
    let mut items = Vec::new();
    let mut dim: Option<usize> = None;
    if !c.at_end() {
        loop {
            c.skip_ws();
            let at = c.pos;
            let p = if c.eat('(') {
                let mut coords = vec![c.rational()?];
                while c.eat(',') {
                    coords.push(c.rational()?);
                }
                c.expect(')')?;
                Point(coords)
            } else {
                Point(vec![c.rational()?])
            };
            match dim {
                None => dim = Some(p.dim()),
                Some(d) if d != p.dim() => {
                    return Err(c.semantic_at(at, format!("point of dimension {} among dimension {d}", p.dim())));
                }
                _ => {}
            }
            items.push((at, p));
            if !c.eat(',') {
                break;
            }
        }
    }
    c.finish()?;
    Ok(FiniteSet(distinct(&c, items, "support point")?))
}

pub fn print_points(p: &FiniteSet<Rational>) -> String {
    let items: Vec<String> = p.iter().map(|x| ExtRational::Finite(*x).to_string()).collect();
    format!("points={}", items.join(","))
}

pub fn print_point_tuples(p: &FiniteSet<Point>) -> String {
    let items: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("points={}", items.join(","))
}

/// `init=<0|1>; toggles=r1,r2,...`; repeated toggles cancel in pairs.
pub fn parse_stepfn(text: &str) -> Result<BinaryStepFunction, LiteralError> {
    let mut c = Cursor::new(text);
    c.expect_word("init=")?;
    let v0 = c.bit()?;
    c.expect(';')?;
    c.expect_word("toggles=")?;
    let toggles = c.rational_list("toggle")?;
    c.finish()?;
    Ok(BinaryStepFunction::normalize(v0, toggles.into_iter().map(|(_, t)| t)))
}

/// `seq tail=<0|1> flips=k1,k2,...`: the indices where the sequence
/// differs from its tail value.
pub fn parse_sequence(text: &str) -> Result<BinarySequence, LiteralError> {
    let mut c = Cursor::new(text);
    c.expect_word("seq")?;
    c.expect_word("tail=")?;
    let tail = c.bit()?;
    let flips = if c.eat_word("flips=") { c.natural_list()? } else { Vec::new() };
    c.finish()?;
    Ok(BinarySequence::from_flips(tail, distinct(&c, flips, "index")?))
}

/// `cofinite missing=r1,r2,...`
pub fn parse_cofinite(text: &str) -> Result<CofiniteSet, LiteralError> {
    let mut c = Cursor::new(text);
    c.expect_word("cofinite")?;
    let missing = if c.eat_word("missing=") { c.rational_list("point")? } else { Vec::new() };
    c.finish()?;
    Ok(CofiniteSet::new(distinct(&c, missing, "point")?))
}

/// `sring open=(a,b),(c,d) points=r1,...`: the Δ of the open intervals and
/// the points.
pub fn parse_sring(text: &str) -> Result<ElementarySet, LiteralError> {
    let mut c = Cursor::new(text);
    c.expect_word("sring")?;
    let mut opens = Vec::new();
    if c.eat_word("open=") && c.eat('(') {
        loop {
            let a = c.rational()?;
            c.expect(',')?;
            let b = c.rational()?;
            c.expect(')')?;
            opens.push((a, b));
            if !c.eat(',') {
                break;
            }
            c.expect('(')?;
        }
    }
    let points = if c.eat_word("points=") { c.rational_list("point")? } else { Vec::new() };
    c.finish()?;
    let points: Vec<Rational> = points.into_iter().map(|(_, p)| p).collect();
    Ok(ElementarySet::from_parts(&opens, &points))
}

/// `[a1,b1)x[a2,b2)...` boxes, whitespace-separated and united; `{}` is
/// empty and has dimension 0 until fixed with [`BoxUnion::with_dim`].
pub fn parse_box_union(text: &str) -> Result<BoxUnion, LiteralError> {
    let mut c = Cursor::new(text);
    if c.eat('{') {
        c.expect('}')?;
        c.finish()?;
        return Ok(BoxUnion::empty(0));
    }
    let mut boxes = Vec::new();
    let mut dim: Option<usize> = None;
    while !c.at_end() {
        let at = c.pos;
        let mut sides = Vec::new();
        loop {
            let side_at = c.pos;
            let (a, b) = c.interval()?;
            match (a, b) {
                (ExtRational::Finite(a), ExtRational::Finite(b)) => sides.push((a, b)),
                _ => return Err(c.semantic_at(side_at, "box sides must be bounded")),
            }
            if !c.eat('x') {
                break;
            }
        }
        match dim {
            None => dim = Some(sides.len()),
            Some(d) if d != sides.len() => {
                return Err(c.semantic_at(at, format!("box of dimension {} among dimension {d}", sides.len())));
            }
            _ => {}
        }
        if let Some(b) = AxisBox::new(&sides) {
            boxes.push(b);
        }
    }
    let dim = dim.ok_or_else(|| c.syntax("expected a box or `{}`"))?;
    Ok(BoxUnion::new(dim, boxes).expect("dimensions checked"))
}

/// `lattice scale=<q> offset=(o1,...)` or a finite point list; an empty
/// list has dimension 0.
pub fn parse_locfin(text: &str) -> Result<LocallyFiniteSet, LiteralError> {
    let mut c = Cursor::new(text);
    if !c.eat_word("lattice") {
        let pts = parse_point_tuples(text)?;
        let dim = pts.iter().next().map_or(0, Point::dim);
        return Ok(LocallyFiniteSet::finite(dim, pts.0).expect("dimensions checked"));
    }
    c.expect_word("scale=")?;
    let at = c.pos;
    let scale = c.rational()?;
    c.expect_word("offset=")?;
    c.expect('(')?;
    let mut offset = vec![c.rational()?];
    while c.eat(',') {
        offset.push(c.rational()?);
    }
    c.expect(')')?;
    c.finish()?;
    LocallyFiniteSet::lattice(scale, offset).map_err(|_| c.semantic_at(at, "lattice scale must be positive"))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn subset_line(universe: &FiniteUniverse, line: usize, text: &str) -> Result<SubsetMask, LiteralError> {
    let c = Cursor::on_line(text, line);
    let t = text.trim();
    if t == "{}" {
        return Ok(universe.empty());
    }
    let mut seen = BTreeSet::new();
    let mut labels = Vec::new();
    for tok in t.split_whitespace() {
        let at = text.find(tok).unwrap_or(0);
        if universe.index_of(tok).is_err() {
            return Err(c.semantic_at(at, format!("`{tok}` is not in the universe")));
        }
        if !seen.insert(tok) {
            return Err(c.semantic_at(at, format!("label `{tok}` repeated")));
        }
        labels.push(tok);
    }
    universe.subset(labels).map_err(|e| c.semantic_at(0, e.to_string()))
}

fn universe_line(text: &str) -> Result<(FiniteUniverse, usize), LiteralError> {
    let mut lines = content_lines(text);
    let Some((line, first)) = lines.next() else {
        return Err(LiteralError::Syntax { line: 1, col: 1, message: "expected `universe:` line".into() });
    };
    let mut c = Cursor::on_line(first, line);
    c.expect_word("universe:")?;
    let labels: Vec<&str> = c.rest().split_whitespace().collect();
    let u = FiniteUniverse::new(labels).map_err(|e| c.semantic_at(c.pos, e.to_string()))?;
    Ok((u, line))
}

/// Family file: `universe: a b c` then one subset per line.
pub fn parse_family(text: &str) -> Result<(FiniteUniverse, Vec<SubsetMask>), LiteralError> {
    let (u, first) = universe_line(text)?;
    let mut out = Vec::new();
    for (line, l) in content_lines(text).filter(|(n, _)| *n != first) {
        out.push(subset_line(&u, line, l)?);
    }
    Ok((u, out))
}

pub fn print_family(u: &FiniteUniverse, members: &[SubsetMask]) -> String {
    let mut s = format!("universe: {}\n", u.labels().join(" "));
    for m in members {
        s.push_str(&render_line(u, *m));
        s.push('\n');
    }
    s
}

fn render_line(u: &FiniteUniverse, m: SubsetMask) -> String {
    let labels = u.labels_of(m);
    if labels.is_empty() { "{}".to_string() } else { labels.join(" ") }
}

/// Tabulated set function: a family file with ` = 0|1` on every subset line.
pub fn parse_tabfn(text: &str) -> Result<(FiniteUniverse, Vec<(SubsetMask, Bit)>), LiteralError> {
    let (u, first) = universe_line(text)?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, l) in content_lines(text).filter(|(n, _)| *n != first) {
        let Some(eq) = l.rfind('=') else {
            let c = Cursor { text: l, pos: l.len(), line };
            return Err(c.syntax("expected ` = 0|1`"));
        };
        let mask = subset_line(&u, line, &l[..eq])?;
        let mut c = Cursor { text: l, pos: eq + 1, line };
        let b = c.bit()?;
        c.finish()?;
        if !seen.insert(mask) {
            return Err(Cursor::on_line(l, line).semantic_at(0, format!("subset {} listed twice", u.render(mask))));
        }
        out.push((mask, b));
    }
    Ok((u, out))
}

pub fn print_tabfn(u: &FiniteUniverse, values: &[(SubsetMask, Bit)]) -> String {
    let mut s = format!("universe: {}\n", u.labels().join(" "));
    for (m, b) in values {
        s.push_str(&format!("{} = {b}\n", render_line(u, *m)));
    }
    s
}
