//! Text front end: the Conway families used by the knot tables, the
//! structured s-expression grammar, and the dot-word symmetry normalizer.
//!
//! Structured grammar:
//!
//! ```text
//! knot    := "(closure" tangle ")" | tangle
//! tangle  := slope | "(leaf" slope ")"
//!          | "(typeI" slope slope ")" | "(typeII" slope tangle ")"
//!          | "(typeIII" tangle tangle ")"
//!          | "(braid" letter* tangle ")"      letter := H+ | H- | V+ | V-
//!          | "(sym" (h|v|r|mirror|diag0) tangle ")"
//! slope   := integer | integer "/" integer
//! ```
//!
//! Conway families: `.w`, `.w.w`, `.w.w.w`, `.w.w.w.w`, `.w.(pair)`,
//! `.(pair).w`, `(pair)(pair)`, `(pair)1(pair)` where `pair` is
//! `a,b`, `a,b+`, `a,b-` and may be mirrored as `-(…)`. Words juxtapose
//! digits ("210" is [2,1,0]); with whitespace each token is one entry.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::slopes::{cf_canonical_positive, cf_eval, ContinuedFraction, ExtRational};
use crate::tangles::{BraidLetter, BraidWord, Knot, SquareTangle, Symmetry, TangleError, TangleExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("family hypothesis fails: {0}")]
    Family(String),
}

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Result<T, NotationError> {
    Err(NotationError::Syntax { pos, msg: msg.into() })
}

impl From<TangleError> for NotationError {
    fn from(e: TangleError) -> Self {
        NotationError::Family(e.to_string())
    }
}

/// A pair `(a,b)` with its decoration and mirror sign.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairSpec {
    pub a: ExtRational,
    pub b: ExtRational,
    pub mirrored: bool,
    /// +1 for `b+`, −1 for `b-`
    pub dec: i8,
}

impl PairSpec {
    /// Slot values (1/a, 1/b + dec), negated when mirrored.
    pub fn slots(&self) -> (ExtRational, ExtRational) {
        let s1 = self.a.recip();
        let s2 = self.b.recip().add_int(&BigInt::from(self.dec));
        if self.mirrored {
            (s1.neg(), s2.neg())
        } else {
            (s1, s2)
        }
    }
}

impl fmt::Display for PairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dec = match self.dec {
            1 => "+",
            -1 => "-",
            _ => "",
        };
        let body = format!("({},{}{dec})", word_text(&self.a), word_text(&self.b));
        if self.mirrored {
            write!(f, "-{body}")
        } else {
            write!(f, "{body}")
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConwayWord {
    /// `.a.b.c.d`, padded with 1s
    Dot([ExtRational; 4]),
    /// `.a.(b,c)`, or `.(b,c).a` when `pair_first`
    DotPair { a: ExtRational, pair: PairSpec, pair_first: bool },
    /// `(a,b)(c,d)`
    PairPair(PairSpec, PairSpec),
    /// `(a,b)1(c,d)`
    PairOnePair(PairSpec, PairSpec),
}

/// Digits of the canonical word for a rational entry.
pub fn word_text(x: &ExtRational) -> String {
    let (neg, ax) = if x.is_negative() { ("-", x.neg()) } else { ("", x.clone()) };
    let Ok(cf) = cf_canonical_positive(&ax) else {
        return x.to_string();
    };
    let sep = if cf.entries.iter().any(|e| *e > BigInt::from(9)) { " " } else { "" };
    let digits: Vec<String> = cf.entries.iter().map(|e| e.to_string()).collect();
    format!("{neg}{}", digits.join(sep))
}

impl fmt::Display for ConwayWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConwayWord::Dot(e) => write!(f, "{}", dot_word_text(e)),
            ConwayWord::DotPair { a, pair, pair_first: false } => write!(f, ".{}.({pair})", word_text(a)),
            ConwayWord::DotPair { a, pair, pair_first: true } => write!(f, ".({pair}).{}", word_text(a)),
            ConwayWord::PairPair(x, y) => write!(f, "{x}{y}"),
            ConwayWord::PairOnePair(x, y) => write!(f, "{x}1{y}"),
        }
    }
}

/// `.a.b.c.d` with trailing `.1` entries dropped (at least one kept).
pub fn dot_word_text(e: &[ExtRational; 4]) -> String {
    let one = ExtRational::integer(1);
    let mut n = 4;
    while n > 1 && e[n - 1] == one {
        n -= 1;
    }
    e[..n].iter().map(|x| format!(".{}", word_text(x))).collect()
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        let chars = text.trim().chars().map(|c| if c == '−' { '-' } else { c }).collect();
        Cursor { chars, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), NotationError> {
        if self.eat(c) {
            Ok(())
        } else {
            syntax(self.pos, format!("expected '{c}'"))
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.chars.len()
    }
}

/// A word: digits (one entry each), or whitespace-separated integer tokens,
/// with an optional leading minus negating the value. Stops at `stops`.
fn parse_word(cur: &mut Cursor, stops: &[char]) -> Result<ExtRational, NotationError> {
    let start = cur.pos;
    let mut raw = String::new();
    while let Some(c) = cur.peek() {
        if stops.contains(&c) && !(c == '-' && raw.trim().is_empty()) {
            break;
        }
        raw.push(c);
        cur.pos += 1;
    }
    let text = raw.trim();
    if text.is_empty() {
        return syntax(start, "empty word");
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, text),
    };
    let entries: Vec<BigInt> = if body.contains(char::is_whitespace) {
        let mut v = Vec::new();
        for tok in body.split_whitespace() {
            match tok.parse::<BigInt>() {
                Ok(x) => v.push(x),
                Err(_) => return syntax(start, format!("bad entry '{tok}'")),
            }
        }
        v
    } else {
        let mut v = Vec::new();
        for c in body.chars() {
            match c.to_digit(10) {
                Some(d) => v.push(BigInt::from(d)),
                None => return syntax(start, format!("unexpected '{c}' in word")),
            }
        }
        v
    };
    if entries.is_empty() {
        return syntax(start, "empty word");
    }
    let value = cf_eval(&ContinuedFraction::new(entries));
    Ok(if neg { value.neg() } else { value })
}

/// `(a,b[+|-])` or `-(a,b[+|-])`
fn parse_pair(cur: &mut Cursor) -> Result<PairSpec, NotationError> {
    let mirrored = if cur.peek() == Some('-') && cur.peek_at(1) == Some('(') {
        cur.pos += 1;
        true
    } else {
        false
    };
    cur.expect('(')?;
    parse_pair_body(cur, mirrored)
}

/// `a,b[+|-])`, consuming the closing parenthesis.
fn parse_pair_body(cur: &mut Cursor, mirrored: bool) -> Result<PairSpec, NotationError> {
    let a = parse_word(cur, &[',', ')'])?;
    cur.expect(',')?;
    let b_start = cur.pos;
    let Some(b_end) = (b_start..cur.chars.len()).find(|&i| cur.chars[i] == ')') else {
        return syntax(cur.pos, "unterminated pair");
    };
    let last = (b_start..b_end).rev().find(|&i| !cur.chars[i].is_whitespace());
    let dec = match last {
        Some(i) if cur.chars[i] == '+' => 1,
        Some(i) if cur.chars[i] == '-' && cur.chars[b_start..i].iter().any(|c| c.is_ascii_digit()) => -1,
        _ => 0,
    };
    let word_end = if dec != 0 { last.expect("decoration") } else { b_end };
    let mut sub = Cursor { chars: cur.chars[..word_end].to_vec(), pos: b_start };
    let b = parse_word(&mut sub, &[])?;
    cur.pos = b_end;
    cur.expect(')')?;
    Ok(PairSpec { a, b, mirrored, dec })
}

/// A dot segment `(a,b)` or `(-(a,b))`.
fn parse_dot_pair(cur: &mut Cursor) -> Result<PairSpec, NotationError> {
    cur.expect('(')?;
    if cur.peek() == Some('-') && cur.peek_at(1) == Some('(') {
        let p = parse_pair(cur)?;
        cur.expect(')')?;
        Ok(p)
    } else {
        parse_pair_body(cur, false)
    }
}

fn dot_segment_is_pair(cur: &Cursor) -> bool {
    cur.peek() == Some('(')
}

pub fn parse_conway(text: &str) -> Result<ConwayWord, NotationError> {
    let mut cur = Cursor::new(text);
    if cur.done() {
        return syntax(0, "empty input");
    }
    if cur.peek() == Some('.') {
        let mut words = Vec::new();
        let mut pair: Option<(usize, PairSpec)> = None;
        while cur.eat('.') {
            if dot_segment_is_pair(&cur) {
                let at = cur.pos;
                let p = parse_dot_pair(&mut cur)?;
                if pair.is_some() {
                    return syntax(at, "at most one pair in a dot word");
                }
                pair = Some((words.len(), p));
            } else {
                words.push(parse_word(&mut cur, &['.'])?);
            }
        }
        if !cur.done() {
            return syntax(cur.pos, "trailing input");
        }
        return match pair {
            None => {
                if words.len() > 4 {
                    return syntax(0, "more than four dot entries");
                }
                let mut e = [1, 1, 1, 1].map(ExtRational::integer);
                for (i, w) in words.into_iter().enumerate() {
                    e[i] = w;
                }
                Ok(ConwayWord::Dot(e))
            }
            Some((at, p)) if words.len() == 1 => {
                Ok(ConwayWord::DotPair { a: words.pop().expect("one"), pair: p, pair_first: at == 0 })
            }
            Some(_) => syntax(0, "a dot word with a pair takes exactly one other entry"),
        };
    }
    let first = parse_pair(&mut cur)?;
    let joined = cur.peek() == Some('1');
    if joined {
        cur.pos += 1;
    }
    let second = parse_pair(&mut cur)?;
    if !cur.done() {
        return syntax(cur.pos, "trailing input");
    }
    Ok(if joined { ConwayWord::PairOnePair(first, second) } else { ConwayWord::PairPair(first, second) })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FamilyForm {
    Square(SquareTangle),
    Composite(Knot),
}

impl FamilyForm {
    pub fn knot(&self) -> Result<Knot, TangleError> {
        match self {
            FamilyForm::Square(s) => s.to_knot(),
            FamilyForm::Composite(k) => Ok(k.clone()),
        }
    }
}

fn slot_ok(x: ExtRational, what: &str) -> Result<ExtRational, NotationError> {
    if x.is_integer() || x.is_infinite() {
        Err(NotationError::Family(format!("{what} gives the integral slot {x}")))
    } else {
        Ok(x)
    }
}

/// {a,b,c,d} ↦ S(−1/(c+1), a/(a+1); 1/(b+1), −d/(d+1))
pub fn dot_square(e: &[ExtRational; 4]) -> Result<SquareTangle, NotationError> {
    let one = BigInt::from(1);
    let [a, b, c, d] = e;
    let frac = |x: &ExtRational| x.add_int(&one).recip().neg().add_int(&one);
    let s = SquareTangle::filled(
        slot_ok(c.add_int(&one).recip().neg(), "entry c")?,
        slot_ok(frac(a), "entry a")?,
        slot_ok(b.add_int(&one).recip(), "entry b")?,
        slot_ok(frac(d).neg(), "entry d")?,
    );
    Ok(s)
}

pub fn family_square_form(w: &ConwayWord) -> Result<FamilyForm, NotationError> {
    match w {
        ConwayWord::Dot(e) => Ok(FamilyForm::Square(dot_square(e)?)),
        ConwayWord::PairPair(x, y) => {
            let (s1, s2) = x.slots();
            let (t1, t2) = y.slots();
            Ok(FamilyForm::Square(SquareTangle::filled(
                slot_ok(s1.neg(), "first pair")?,
                slot_ok(s2.neg(), "first pair")?,
                slot_ok(t1, "second pair")?,
                slot_ok(t2, "second pair")?,
            )))
        }
        ConwayWord::PairOnePair(x, y) => {
            let one = BigInt::from(1);
            let side = |p: &PairSpec| {
                let u = p.a.recip();
                let v = p.b.add_int(&one).recip().add_int(&BigInt::from(p.dec));
                if p.mirrored {
                    (u.neg(), v.neg())
                } else {
                    (u, v)
                }
            };
            let (s1, s2) = side(x);
            let (t1, t2) = side(y);
            Ok(FamilyForm::Square(SquareTangle::filled(
                slot_ok(s1, "first pair")?,
                slot_ok(s2, "first pair")?,
                slot_ok(t1, "second pair")?,
                slot_ok(t2, "second pair")?,
            )))
        }
        ConwayWord::DotPair { a, pair, pair_first } => {
            let one = BigInt::from(1);
            let alpha = slot_ok(a.add_int(&one).recip().neg().add_int(&one), "entry a")?;
            let beta = ExtRational::new(-1, 2).expect("nonzero");
            let (s1, s2) = pair.slots();
            let mut gamma = slot_ok(s1.neg(), "pair")?;
            let mut delta = slot_ok(s2.neg().add_int(&-one), "pair")?;
            if *pair_first {
                std::mem::swap(&mut gamma, &mut delta);
            }
            let inner = TangleExpr::sym(Symmetry::R, TangleExpr::type_one(gamma, delta)?);
            let root = TangleExpr::type_three(
                TangleExpr::type_two(beta, inner)?,
                TangleExpr::sym(Symmetry::R, TangleExpr::type_one(alpha, ExtRational::new(-1, 2).expect("nonzero"))?),
            );
            let k = Knot::new(root);
            Ok(FamilyForm::Composite(if *pair_first { k.mirror() } else { k }))
        }
    }
}

struct SexpParser {
    cur: Cursor,
}

impl SexpParser {
    fn skip_ws(&mut self) {
        while self.cur.peek().is_some_and(char::is_whitespace) {
            self.cur.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<(usize, String), NotationError> {
        self.skip_ws();
        let start = self.cur.pos;
        let mut s = String::new();
        while let Some(c) = self.cur.peek() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            s.push(c);
            self.cur.pos += 1;
        }
        if s.is_empty() {
            return syntax(start, "expected an atom");
        }
        Ok((start, s))
    }

    fn slope(&mut self) -> Result<ExtRational, NotationError> {
        let (at, s) = self.atom()?;
        s.parse().or_else(|_| syntax(at, format!("bad slope '{s}'")))
    }

    fn close(&mut self) -> Result<(), NotationError> {
        self.skip_ws();
        self.cur.expect(')')
    }

    fn tangle(&mut self) -> Result<TangleExpr, NotationError> {
        self.skip_ws();
        if !self.cur.eat('(') {
            return Ok(TangleExpr::Leaf(self.slope()?));
        }
        let (at, head) = self.atom()?;
        let t = match head.as_str() {
            "leaf" => TangleExpr::Leaf(self.slope()?),
            "typeI" => {
                let a = self.slope()?;
                let b = self.slope()?;
                TangleExpr::type_one(a, b).or_else(|e| syntax(at, e.to_string()))?
            }
            "typeII" => {
                let g = self.slope()?;
                let inner = self.tangle()?;
                TangleExpr::type_two(g, inner).or_else(|e| syntax(at, e.to_string()))?
            }
            "typeIII" => {
                let l = self.tangle()?;
                let r = self.tangle()?;
                TangleExpr::type_three(l, r)
            }
            "braid" => {
                let mut letters = Vec::new();
                loop {
                    self.skip_ws();
                    let save = self.cur.pos;
                    if self.cur.peek() == Some('(') {
                        break;
                    }
                    let (_, tok) = self.atom()?;
                    match BraidLetter::from_token(&tok) {
                        Some(l) => letters.push(l),
                        None => {
                            self.cur.pos = save;
                            break;
                        }
                    }
                }
                TangleExpr::braid(BraidWord(letters), self.tangle()?)
            }
            "sym" => {
                let (sat, name) = self.atom()?;
                let s = Symmetry::from_name(&name).map_or_else(|| syntax(sat, format!("unknown symmetry '{name}'")), Ok)?;
                TangleExpr::sym(s, self.tangle()?)
            }
            other => return syntax(at, format!("unknown form '{other}'")),
        };
        self.close()?;
        Ok(t)
    }

    fn knot(&mut self) -> Result<Knot, NotationError> {
        self.skip_ws();
        let save = self.cur.pos;
        if self.cur.eat('(') {
            let (_, head) = self.atom()?;
            if head == "closure" {
                let t = self.tangle()?;
                self.close()?;
                return Ok(Knot::new(t));
            }
        }
        self.cur.pos = save;
        Ok(Knot::new(self.tangle()?))
    }
}

fn looks_structured(text: &str) -> bool {
    let t = text.trim_start();
    match t.strip_prefix('(') {
        Some(rest) => rest.trim_start().starts_with(|c: char| c.is_ascii_alphabetic()),
        None => t.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '−') && !t.contains('('),
    }
}

/// A structured tree, without closing it.
pub fn parse_tangle(text: &str) -> Result<TangleExpr, NotationError> {
    let mut p = SexpParser { cur: Cursor::new(text) };
    let t = p.tangle()?;
    p.skip_ws();
    if !p.cur.done() {
        return syntax(p.cur.pos, "trailing input");
    }
    Ok(t)
}

/// Structured grammar or one of the Conway families. A bare tangle is
/// closed.
pub fn parse(text: &str) -> Result<Knot, NotationError> {
    if looks_structured(text) {
        let mut p = SexpParser { cur: Cursor::new(text) };
        let k = p.knot()?;
        p.skip_ws();
        if !p.cur.done() {
            return syntax(p.cur.pos, "trailing input");
        }
        return Ok(k);
    }
    let w = parse_conway(text)?;
    Ok(family_square_form(&w)?.knot()?)
}

pub fn serialize(k: &Knot) -> String {
    k.to_string()
}

/// Canonical dot word: the least entry tuple in the orbit, with the sign
/// relating it to the input. Sign +1 wins when both signs reach the least
/// tuple.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DotNormal {
    pub entries: [ExtRational; 4],
    pub sign: i8,
}

/// The sixteen D8 images (with the sign relating each to the input) plus
/// the all-reciprocal move.
pub fn dot_orbit(w: &[ExtRational; 4]) -> Vec<([ExtRational; 4], i8)> {
    let recips = w.clone().map(|x| x.recip());
    let mut out = Vec::with_capacity(16);
    for (base, s0) in [(w.clone(), 1i8), (recips, -1)] {
        let mut cur = base;
        let mut sg = s0;
        for _ in 0..4 {
            let mut rev = cur.clone();
            rev.reverse();
            out.push((cur.clone(), sg));
            out.push((rev, -sg));
            cur.rotate_left(1);
            sg = -sg;
        }
    }
    out
}

pub fn dot_word_normalize(w: &[ExtRational; 4]) -> DotNormal {
    let orbit = dot_orbit(w);
    let least = orbit.iter().map(|(e, _)| e).min().expect("non-empty").clone();
    let sign = if orbit.iter().any(|(e, s)| *e == least && *s == 1) { 1 } else { -1 };
    DotNormal { entries: least, sign }
}

/// The orbit member written as in the knot tables: shortest text, then
/// fewest entries below 1, then the greatest text. Returns its sign
/// relative to `w`.
pub fn dot_word_display(w: &[ExtRational; 4]) -> (String, i8) {
    let one = ExtRational::integer(1);
    let key = |e: &[ExtRational; 4], t: &str| (t.len(), e.iter().filter(|x| **x < one).count());
    let mut best: Option<((usize, usize), String, i8)> = None;
    for (e, s) in dot_orbit(w) {
        if !e.iter().all(|x| x.is_positive() && !x.is_infinite()) {
            continue;
        }
        let t = dot_word_text(&e);
        let k = key(&e, &t);
        let better = match &best {
            None => true,
            Some((bk, bt, bs)) => k < *bk || (k == *bk && (t > *bt || (t == *bt && s > *bs))),
        };
        if better {
            best = Some((k, t, s));
        }
    }
    best.map_or_else(|| (dot_word_text(w), 1), |(_, t, s)| (t, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slopes::q;
    use crate::tangles::square_normalize;

    fn square(text: &str) -> SquareTangle {
        match family_square_form(&parse_conway(text).unwrap()).unwrap() {
            FamilyForm::Square(s) => s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn family_examples() {
        assert_eq!(parse_conway(".2.2").unwrap(), ConwayWord::Dot([q(2, 1), q(2, 1), q(1, 1), q(1, 1)]));
        assert_eq!(square(".2.2.1.1"), SquareTangle::filled(q(-1, 2), q(2, 3), q(1, 3), q(-1, 2)));
        assert_eq!(square("(3,2)1(3,2)"), SquareTangle::filled(q(1, 3), q(1, 3), q(1, 3), q(1, 3)));
        assert_eq!(square("(3,2)(3,2)"), SquareTangle::filled(q(-1, 3), q(-1, 2), q(1, 3), q(1, 2)));
        assert_eq!(square("(3,2)(21,2)"), SquareTangle::filled(q(-1, 3), q(-1, 2), q(2, 3), q(1, 2)));
    }

    #[test]
    fn dot_pair_composite() {
        let FamilyForm::Composite(k) = family_square_form(&parse_conway(".2.(3,2)").unwrap()).unwrap() else {
            panic!()
        };
        let TangleExpr::TypeIII(l, r) = &k.root else { panic!() };
        let TangleExpr::TypeII(b, inner) = &**l else { panic!() };
        assert_eq!(*b, q(-1, 2));
        assert_eq!(**inner, TangleExpr::sym(Symmetry::R, TangleExpr::TypeI(q(-1, 3), q(-3, 2))));
        assert_eq!(**r, TangleExpr::sym(Symmetry::R, TangleExpr::TypeI(q(2, 3), q(-1, 2))));
    }

    #[test]
    fn words_and_decorations() {
        assert_eq!(parse_conway(".210.2.2").unwrap(), ConwayWord::Dot([q(2, 3), q(2, 1), q(2, 1), q(1, 1)]));
        assert_eq!(parse_conway(".2 13.2").unwrap(), ConwayWord::Dot([q(27, 2), q(2, 1), q(1, 1), q(1, 1)]));
        let ConwayWord::PairPair(x, y) = parse_conway("(3,2+)−(21,2-)").unwrap() else { panic!() };
        assert_eq!((x.dec, x.mirrored), (1, false));
        assert_eq!((y.dec, y.mirrored, y.a.clone()), (-1, true, q(3, 2)));
        let ConwayWord::DotPair { pair, .. } = parse_conway(".2.(-(3,2))").unwrap() else { panic!() };
        assert!(pair.mirrored);
        let ConwayWord::DotPair { pair, .. } = parse_conway(".2.(-3,2)").unwrap() else { panic!() };
        assert_eq!((pair.a.clone(), pair.mirrored), (q(-3, 1), false));
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["", ".2.", "(3,2)", "(3,2)(3", ".2.2.2.2.2", "(closure (typeI 1 1/2))", "(frob 1)", ".2x"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
        assert!(matches!(parse(".0"), Err(NotationError::Family(_))));
        assert!(matches!(parse(".(3"), Err(NotationError::Syntax { .. })));
    }

    #[test]
    fn structured_round_trip() {
        let text = "(closure (typeIII (typeII 1/2 (braid H+ V- (typeI -1/3 -3/2))) (sym r (leaf 5/7))))";
        let k = parse(text).unwrap();
        assert_eq!(serialize(&k), text);
        assert_eq!(parse("(typeI 1/2 1/3)").unwrap(), Knot::new(TangleExpr::TypeI(q(1, 2), q(1, 3))));
        assert_eq!(parse_tangle("3/5").unwrap(), TangleExpr::Leaf(q(3, 5)));
    }

    #[test]
    fn dot_symmetries() {
        let w = |a: i64, b: i64, c: i64, d: i64| [a, b, c, d].map(ExtRational::integer);
        let n1 = dot_word_normalize(&w(1, 2, 2, 1));
        let n2 = dot_word_normalize(&w(2, 2, 1, 1));
        assert_eq!(n1.entries, n2.entries);
        assert_eq!(n1.sign * n2.sign, 1);
        // rotation carries a sign
        let x = [q(3, 1), q(2, 1), q(1, 2), q(1, 1)];
        let rot = [q(2, 1), q(1, 2), q(1, 1), q(3, 1)];
        assert!(dot_orbit(&x).contains(&(rot, -1)));
        let rec = x.clone().map(|v| v.recip());
        assert!(dot_orbit(&x).contains(&(rec, -1)));
        assert_eq!(dot_word_text(&w(2, 2, 1, 1)), ".2.2");
        assert_eq!(dot_word_text(&[q(2, 3), q(2, 1), q(2, 1), q(1, 1)]), ".210.2.2");
    }

    #[test]
    fn dot_square_is_defined_on_orbits() {
        let x = [q(3, 1), q(2, 1), q(1, 2), q(1, 1)];
        for (e, _) in dot_orbit(&x) {
            assert!(square_normalize(&dot_square(&e).unwrap()).is_ok());
        }
    }
}
