//! Ket notation for Fock states.
//!
//! ```text
//! expr    := sum ;
//! sum     := ("+"|"-")? product (("+"|"-") product)* ;
//! product := coeff? factor+ ("^" integer)? ;
//! factor  := ket | "(" sum ")" ;
//! coeff   := number | "sqrt(" number ")" | number "*" "sqrt(" number ")"
//!          | "[" signed "," signed "]" ;
//! ket     := "|" digits "," digits ">" ;
//! ```
//!
//! Digits in a ket are per-mode occupations, Alice's before the comma and
//! Bob's after it. Adjacent factors are composed on fresh modes, and `^k`
//! composes `k` fresh copies of the whole product, coefficient included. `[re,im]` is a
//! complex coefficient `re + i im`. Whitespace is ignored.

use std::fmt::Write as _;

use crate::bipartite::ModePartition;
use crate::error::{Error, Result};
use crate::fock::{compose, Amplitude, FockState, Statistics};

/// Upper bound on the mode count of a parsed state.
pub const MAX_MODES: usize = 256;
/// Upper bound on the term count of any intermediate state.
pub const MAX_TERMS: usize = 1_000_000;
/// Upper bound on parenthesis nesting.
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    pub alice: Vec<u8>,
    pub bob: Vec<u8>,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Ket(Ket),
    Group(Sum),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub coeff: Amplitude,
    pub factors: Vec<Factor>,
    pub exponent: u32,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sum {
    pub terms: Vec<Product>,
}

/// Parsed but not yet evaluated expression.
#[derive(Debug, Clone, PartialEq)]
pub struct StateExpression {
    pub source: String,
    pub ast: Sum,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

fn syntax<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Syntax {
        offset,
        message: message.into(),
    })
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn describe(&mut self) -> String {
        match self.peek() {
            Some(c) if c.is_ascii_graphic() => format!("'{}'", c as char),
            Some(c) => format!("byte 0x{c:02x}"),
            None => "end of input".into(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.describe();
            syntax(self.pos, format!("expected '{}', found {found}", c as char))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self, signed: bool) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut end = self.pos;
        let at = |i: usize| self.src.get(i).copied();
        if signed && matches!(at(end), Some(b'+' | b'-')) {
            end += 1;
        }
        let mantissa_start = end;
        while matches!(at(end), Some(b'0'..=b'9')) {
            end += 1;
        }
        if at(end) == Some(b'.') {
            end += 1;
            while matches!(at(end), Some(b'0'..=b'9')) {
                end += 1;
            }
        }
        if end == mantissa_start || &self.src[mantissa_start..end] == b"." {
            return syntax(start, "expected a number");
        }
        if matches!(at(end), Some(b'e' | b'E')) {
            let mut e = end + 1;
            if matches!(at(e), Some(b'+' | b'-')) {
                e += 1;
            }
            let digits = e;
            while matches!(at(e), Some(b'0'..=b'9')) {
                e += 1;
            }
            if e == digits {
                return syntax(e, "expected exponent digits");
            }
            end = e;
        }
        let text = std::str::from_utf8(&self.src[start..end]).expect("ascii");
        let value: f64 = text
            .parse()
            .or_else(|_| syntax(start, format!("invalid number '{text}'")))?;
        if !value.is_finite() {
            return syntax(start, format!("number '{text}' is not finite"));
        }
        self.pos = end;
        Ok(value)
    }

    fn sqrt_arg(&mut self) -> Result<f64> {
        self.expect(b'(')?;
        let at = self.pos;
        let v = self.number(false)?;
        self.expect(b')')?;
        if v < 0.0 {
            return syntax(at, "square root of a negative number");
        }
        Ok(v.sqrt())
    }

    fn coeff(&mut self) -> Result<Option<Amplitude>> {
        match self.peek() {
            Some(b'0'..=b'9' | b'.') => {
                let v = self.number(false)?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    if !self.eat_keyword("sqrt") {
                        let found = self.describe();
                        return syntax(self.pos, format!("expected 'sqrt', found {found}"));
                    }
                    Ok(Some(Amplitude::new(v * self.sqrt_arg()?, 0.0)))
                } else {
                    Ok(Some(Amplitude::new(v, 0.0)))
                }
            }
            Some(b's') => {
                if !self.eat_keyword("sqrt") {
                    return syntax(self.pos, "expected 'sqrt'");
                }
                Ok(Some(Amplitude::new(self.sqrt_arg()?, 0.0)))
            }
            Some(b'[') => {
                self.pos += 1;
                let re = self.number(true)?;
                self.expect(b',')?;
                let im = self.number(true)?;
                self.expect(b']')?;
                Ok(Some(Amplitude::new(re, im)))
            }
            _ => Ok(None),
        }
    }

    fn digits(&mut self) -> Result<Vec<u8>> {
        self.skip_ws();
        let mut out = Vec::new();
        loop {
            match self.src.get(self.pos) {
                Some(&c @ b'0'..=b'9') => {
                    out.push(c - b'0');
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
        if out.is_empty() {
            let found = self.describe();
            return syntax(self.pos, format!("expected occupation digits, found {found}"));
        }
        if out.len() > MAX_MODES {
            return Err(Error::TooLarge(format!("more than {MAX_MODES} modes in one ket")));
        }
        Ok(out)
    }

    fn ket(&mut self) -> Result<Ket> {
        self.skip_ws();
        let offset = self.pos;
        self.expect(b'|')?;
        let alice = self.digits()?;
        self.expect(b',')?;
        let bob = self.digits()?;
        self.expect(b'>')?;
        Ok(Ket { alice, bob, offset })
    }

    fn factor(&mut self) -> Result<Factor> {
        self.skip_ws();
        Ok(match self.peek() {
            Some(b'|') => Factor::Ket(self.ket()?),
            Some(b'(') => {
                if self.depth >= MAX_DEPTH {
                    return syntax(self.pos, format!("nesting deeper than {MAX_DEPTH}"));
                }
                self.pos += 1;
                self.depth += 1;
                let inner = self.sum()?;
                self.depth -= 1;
                self.expect(b')')?;
                Factor::Group(inner)
            }
            _ => {
                let found = self.describe();
                return syntax(self.pos, format!("expected a ket or '(', found {found}"));
            }
        })
    }

    fn exponent(&mut self) -> Result<u32> {
        let mut exponent = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let start = self.pos;
            while matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            if text.is_empty() {
                let found = self.describe();
                return syntax(at, format!("expected an integer exponent, found {found}"));
            }
            exponent = match text.parse::<u32>() {
                Ok(e) if e >= 1 => e,
                Ok(_) => return syntax(at, "exponent must be at least 1"),
                Err(_) => return Err(Error::TooLarge(format!("exponent {text}"))),
            };
        }
        Ok(exponent)
    }

    fn product(&mut self) -> Result<Product> {
        self.skip_ws();
        let offset = self.pos;
        let coeff = self.coeff()?.unwrap_or(Amplitude::new(1.0, 0.0));
        let mut factors = vec![self.factor()?];
        while matches!(self.peek(), Some(b'|' | b'(')) {
            factors.push(self.factor()?);
        }
        let exponent = self.exponent()?;
        Ok(Product {
            coeff,
            factors,
            exponent,
            offset,
        })
    }

    fn sum(&mut self) -> Result<Sum> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                sign = -1.0;
            }
            _ => {}
        }
        loop {
            let mut p = self.product()?;
            p.coeff *= sign;
            terms.push(p);
            match self.peek() {
                Some(b'+') => sign = 1.0,
                Some(b'-') => sign = -1.0,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(Sum { terms })
    }
}

/// Parses `text` without evaluating it.
pub fn parse_expression(text: &str) -> Result<StateExpression> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    if p.peek().is_none() {
        return syntax(p.pos, "empty expression");
    }
    let ast = p.sum()?;
    if p.peek().is_some() {
        let found = p.describe();
        return syntax(p.pos, format!("unexpected {found}"));
    }
    Ok(StateExpression {
        source: text.to_owned(),
        ast,
    })
}

type Evaluated = (FockState, ModePartition);

fn check_size(s: &Evaluated) -> Result<()> {
    if s.0.mode_count() > MAX_MODES {
        return Err(Error::TooLarge(format!("more than {MAX_MODES} modes")));
    }
    if s.0.len() > MAX_TERMS {
        return Err(Error::TooLarge(format!("more than {MAX_TERMS} terms")));
    }
    Ok(())
}

fn compose_checked(a: &Evaluated, b: &Evaluated) -> Result<Evaluated> {
    if a.0.mode_count() + b.0.mode_count() > MAX_MODES {
        return Err(Error::TooLarge(format!("more than {MAX_MODES} modes")));
    }
    if a.0.len().saturating_mul(b.0.len()) > MAX_TERMS {
        return Err(Error::TooLarge(format!("more than {MAX_TERMS} terms")));
    }
    let out = compose(&a.0, a.1, &b.0, b.1)?;
    check_size(&out)?;
    Ok(out)
}

fn eval_ket(k: &Ket, stats: Statistics) -> Result<Evaluated> {
    let mut occ = k.alice.clone();
    occ.extend_from_slice(&k.bob);
    let modes = occ.len();
    let s = FockState::new(stats, modes, [(occ, Amplitude::new(1.0, 0.0))])?;
    Ok((s, ModePartition::new(k.alice.len(), modes)?))
}

fn eval_factor(f: &Factor, stats: Statistics) -> Result<Evaluated> {
    match f {
        Factor::Ket(k) => eval_ket(k, stats),
        Factor::Group(g) => eval_sum(g, stats),
    }
}

fn eval_product(p: &Product, stats: Statistics) -> Result<Evaluated> {
    let mut base = eval_factor(&p.factors[0], stats)?;
    for f in &p.factors[1..] {
        base = compose_checked(&base, &eval_factor(f, stats)?)?;
    }
    base.0 = base.0.scale(p.coeff);
    let mut acc = base.clone();
    for _ in 1..p.exponent {
        acc = compose_checked(&acc, &base)?;
    }
    Ok(acc)
}

fn eval_sum(s: &Sum, stats: Statistics) -> Result<Evaluated> {
    let mut acc = eval_product(&s.terms[0], stats)?;
    for t in &s.terms[1..] {
        let next = eval_product(t, stats)?;
        let (want, got) = (
            (acc.1.alice_modes(), acc.1.bob_modes()),
            (next.1.alice_modes(), next.1.bob_modes()),
        );
        if want != got {
            return Err(Error::ArityMismatch {
                expected: want,
                found: got,
                offset: t.offset,
            });
        }
        acc.0 = acc.0.add(&next.0)?;
        check_size(&acc)?;
    }
    Ok(acc)
}

impl StateExpression {
    pub fn evaluate(&self, stats: Statistics) -> Result<(FockState, ModePartition)> {
        eval_sum(&self.ast, stats)
    }
}

/// Parses and evaluates ket notation into a state and its partition.
pub fn parse_state(text: &str, stats: Statistics) -> Result<(FockState, ModePartition)> {
    parse_expression(text)?.evaluate(stats)
}

fn write_real(out: &mut String, v: f64, first: bool) {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        out.push('-');
    } else if !first {
        out.push('+');
    }
    let a = v.abs();
    if a != 1.0 {
        let _ = write!(out, "{a}");
    }
}

/// Canonical text form: terms in lexicographic occupation order, shortest
/// round-trip decimals, the zero state as `0`.
pub fn format_state(s: &FockState, p: ModePartition) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (occ, amp)) in s.terms().enumerate() {
        if amp.im == 0.0 {
            write_real(&mut out, amp.re, i == 0);
        } else {
            if i > 0 {
                out.push('+');
            }
            let _ = write!(out, "[{},{}]", amp.re, amp.im);
        }
        let (a, b) = occ.split(p.alice_modes());
        out.push('|');
        for n in a {
            let _ = write!(out, "{n}");
        }
        out.push(',');
        for n in b {
            let _ = write!(out, "{n}");
        }
        out.push('>');
    }
    out
}
