//! Text form of field elements.
//!
//! Output: terms in ascending graded-lex order joined by `+`, e.g. `1+t`, `t1*t2^2`,
//! `(1+w)*t`. A non-polynomial value prints as `(num)/(den)`. Input accepts any
//! expression over integers, `w`, `t`/`t1..tr`, `+ - * / ^` and parentheses.

use super::{Field, Poly, RatFn};
use crate::error::FieldError;

fn format_coeff(field: &Field, c: u32) -> (String, bool) {
    let gf = field.gf();
    if gf.degree() == 1 {
        return (c.to_string(), true);
    }
    let parts: Vec<String> = gf
        .digits(c)
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0)
        .map(|(i, &a)| {
            let wpow = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            match (i, a) {
                (0, _) => a.to_string(),
                (_, 1) => wpow,
                _ => format!("{a}*{wpow}"),
            }
        })
        .collect();
    let simple = parts.len() == 1;
    (parts.join("+"), simple)
}

fn format_poly(field: &Field, p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<String> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = field.var_name(i);
                    if e == 1 { name } else { format!("{name}^{e}") }
                })
                .collect();
            let (cs, simple) = format_coeff(field, *c);
            if vars.is_empty() {
                cs
            } else if *c == 1 {
                vars.join("*")
            } else if simple {
                format!("{cs}*{}", vars.join("*"))
            } else {
                format!("({cs})*{}", vars.join("*"))
            }
        })
        .collect();
    terms.join("+")
}

pub(super) fn format(field: &Field, a: &RatFn) -> String {
    if a.den.is_one() {
        format_poly(field, &a.num)
    } else {
        format!("({})/({})", format_poly(field, &a.num), format_poly(field, &a.den))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, FieldError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| FieldError::Parse(format!("number too large: {text}")))?;
            out.push(Tok::Num(n));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(FieldError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a Field,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFn, FieldError> {
        let k = self.field;
        let mut acc = if self.eat('-') { k.neg(&self.term()?) } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = k.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = k.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFn, FieldError> {
        let k = self.field;
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = k.mul(&acc, &self.power()?);
            } else if self.eat('/') {
                acc = k.div(&acc, &self.power()?)?;
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                // juxtaposition, e.g. `2t` or `(1+t)(1+t)`
                acc = k.mul(&acc, &self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<RatFn, FieldError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    let e = i64::try_from(e).map_err(|_| FieldError::Parse("exponent too large".into()))?;
                    self.field.powi(&base, if neg { -e } else { e })
                }
                other => Err(FieldError::Parse(format!("expected exponent, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RatFn, FieldError> {
        let k = self.field;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(k.from_int((n % k.p() as u64) as i64))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.ident(&name)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(FieldError::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(k.neg(&self.power()?))
            }
            other => Err(FieldError::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn ident(&self, name: &str) -> Result<RatFn, FieldError> {
        let k = self.field;
        if name == "w" {
            return k.generator().ok_or_else(|| FieldError::Parse("w requires d > 1".into()));
        }
        if name == "t" && k.r() == 1 {
            return Ok(k.var(0));
        }
        if let Some(idx) = name.strip_prefix('t').and_then(|s| s.parse::<usize>().ok()) {
            if idx >= 1 && idx <= k.r() {
                return Ok(k.var(idx - 1));
            }
        }
        Err(FieldError::Parse(format!("unknown symbol {name} for {k:?}")))
    }
}

pub(super) fn parse(field: &Field, s: &str) -> Result<RatFn, FieldError> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(FieldError::Parse("empty input".into()));
    }
    let mut parser = Parser { field, toks, pos: 0 };
    let value = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(FieldError::Parse(format!("trailing input in {s:?}")));
    }
    Ok(value)
}
