use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// `A`, `k`, `K`, `G` (value group with `∞`) and `R_n`; `R_1` is `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Ring,
    Residue,
    Field,
    Value,
    Quotient(u32),
}

impl Sort {
    pub fn quotient(n: u32) -> Sort {
        if n == 1 {
            Sort::Residue
        } else {
            Sort::Quotient(n)
        }
    }

    pub fn parse(s: &str) -> Result<Sort> {
        match s {
            "A" => Ok(Sort::Ring),
            "k" => Ok(Sort::Residue),
            "K" => Ok(Sort::Field),
            "G" => Ok(Sort::Value),
            _ => s
                .strip_prefix('R')
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&n| n >= 1)
                .map(Sort::quotient)
                .ok_or_else(|| Error::SortError(format!("unknown sort {s}"))),
        }
    }

    fn is_ring(self) -> bool {
        !matches!(self, Sort::Value)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Ring => write!(f, "A"),
            Sort::Residue => write!(f, "k"),
            Sort::Field => write!(f, "K"),
            Sort::Value => write!(f, "G"),
            Sort::Quotient(n) => write!(f, "R{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var { name: String, sort: Sort },
    Zero(Sort),
    One(Sort),
    Infinity,
    /// Literal element; `parts` are digit strings, an integer for `G`, and for `K` the
    /// valuation followed by unit digits.
    Lit { sort: Sort, parts: Vec<String> },
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Res(Box<Term>),
    ResN(u32, Box<Term>),
    Lambda { b: Vec<Term>, alpha: Box<Term> },
    Val(Box<Term>),
    Ac(u32, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Theta(Vec<Term>),
    Le(Term, Term),
    Lt(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

fn sort_err(msg: String) -> Error {
    Error::SortError(msg)
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var { name: name.to_string(), sort }
    }

    /// Sort of a well-sorted term.
    pub fn sort(&self) -> Result<Sort> {
        let same = |a: &Term, b: &Term, op: &str| -> Result<Sort> {
            let (sa, sb) = (a.sort()?, b.sort()?);
            if sa != sb {
                return Err(sort_err(format!("{op} of {sa} and {sb}")));
            }
            Ok(sa)
        };
        let expect = |t: &Term, want: Sort, op: &str| -> Result<()> {
            let s = t.sort()?;
            if s != want {
                return Err(sort_err(format!("{op} expects {want}, got {s}")));
            }
            Ok(())
        };
        match self {
            Term::Var { sort, .. } | Term::Zero(sort) | Term::Lit { sort, .. } => Ok(*sort),
            Term::One(sort) if sort.is_ring() => Ok(*sort),
            Term::One(sort) => Err(sort_err(format!("no constant 1 in {sort}"))),
            Term::Infinity => Ok(Sort::Value),
            Term::Add(a, b) | Term::Sub(a, b) => same(a, b, "sum"),
            Term::Mul(a, b) => {
                let s = same(a, b, "product")?;
                if !s.is_ring() {
                    return Err(sort_err("product in G".into()));
                }
                Ok(s)
            }
            Term::Neg(a) => a.sort(),
            Term::Res(a) => expect(a, Sort::Ring, "res").map(|_| Sort::Residue),
            Term::ResN(n, a) => {
                if *n == 0 {
                    return Err(sort_err("r_0 is not a symbol".into()));
                }
                expect(a, Sort::Ring, "r_n").map(|_| Sort::quotient(*n))
            }
            Term::Lambda { b, alpha } => {
                for x in b {
                    expect(x, Sort::Ring, "S_r")?;
                }
                expect(alpha, Sort::Residue, "S_r")?;
                Ok(Sort::Ring)
            }
            Term::Val(a) => expect(a, Sort::Field, "v").map(|_| Sort::Value),
            Term::Ac(n, a) => {
                if *n == 0 {
                    return Err(sort_err("ac_0 is not a symbol".into()));
                }
                expect(a, Sort::Field, "ac_n").map(|_| Sort::quotient(*n))
            }
        }
    }

    fn uses_enrichment(&self) -> bool {
        match self {
            Term::Lambda { .. } => true,
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => a.uses_enrichment() || b.uses_enrichment(),
            Term::Neg(a) | Term::Res(a) | Term::ResN(_, a) | Term::Val(a) | Term::Ac(_, a) => a.uses_enrichment(),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> Result<BTreeMap<String, Sort>> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out)?;
        Ok(out)
    }

    fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) -> Result<()> {
        match self {
            Term::Var { name, sort } => {
                if let Some(prev) = out.insert(name.clone(), *sort) {
                    if prev != *sort {
                        return Err(sort_err(format!("variable {name} used at sorts {prev} and {sort}")));
                    }
                }
            }
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out)?;
                b.collect_vars(out)?;
            }
            Term::Neg(a) | Term::Res(a) | Term::ResN(_, a) | Term::Val(a) | Term::Ac(_, a) => a.collect_vars(out)?,
            Term::Lambda { b, alpha } => {
                for x in b {
                    x.collect_vars(out)?;
                }
                alpha.collect_vars(out)?;
            }
            _ => {}
        }
        Ok(())
    }
}

impl Formula {
    /// Checks well-sortedness.
    pub fn check(&self) -> Result<()> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Eq(a, b) => {
                let (sa, sb) = (a.sort()?, b.sort()?);
                if sa != sb {
                    return Err(sort_err(format!("equation between {sa} and {sb}")));
                }
                Ok(())
            }
            Formula::Theta(args) => {
                for a in args {
                    if a.sort()? != Sort::Ring {
                        return Err(sort_err("Theta takes arguments of sort A".into()));
                    }
                }
                Ok(())
            }
            Formula::Le(a, b) | Formula::Lt(a, b) => {
                if a.sort()? != Sort::Value || b.sort()? != Sort::Value {
                    return Err(sort_err("order is only defined on G".into()));
                }
                Ok(())
            }
            Formula::Not(f) => f.check(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|f| f.check()),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.check()?;
                b.check()
            }
        }
        .and_then(|_| self.free_vars().map(|_| ()))
    }

    /// Whether `Θ_r` or `S_r` occurs.
    pub fn uses_enrichment(&self) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Theta(_) => true,
            Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) => a.uses_enrichment() || b.uses_enrichment(),
            Formula::Not(f) => f.uses_enrichment(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.uses_enrichment()),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.uses_enrichment() || b.uses_enrichment(),
        }
    }

    pub fn free_vars(&self) -> Result<BTreeMap<String, Sort>> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out)?;
        Ok(out)
    }

    fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) -> Result<()> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) => {
                a.collect_vars(out)?;
                b.collect_vars(out)
            }
            Formula::Theta(args) => args.iter().try_for_each(|a| a.collect_vars(out)),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out)?;
                b.collect_vars(out)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var { name, sort } => write!(f, "{name}:{sort}"),
            Term::Zero(s) => write!(f, "(zero {s})"),
            Term::One(s) => write!(f, "(one {s})"),
            Term::Infinity => write!(f, "(inf)"),
            Term::Lit { sort, parts } => {
                write!(f, "(lit {sort}")?;
                for p in parts {
                    if *sort == Sort::Value || (*sort == Sort::Field && p == &parts[0]) {
                        write!(f, " {p}")?;
                    } else {
                        write!(f, " \"{p}\"")?;
                    }
                }
                write!(f, ")")
            }
            Term::Add(a, b) => write!(f, "(+ {a} {b})"),
            Term::Sub(a, b) => write!(f, "(- {a} {b})"),
            Term::Mul(a, b) => write!(f, "(* {a} {b})"),
            Term::Neg(a) => write!(f, "(- {a})"),
            Term::Res(a) => write!(f, "(res {a})"),
            Term::ResN(n, a) => write!(f, "(r {n} {a})"),
            Term::Lambda { b, alpha } => {
                write!(f, "(S")?;
                for x in b {
                    write!(f, " {x}")?;
                }
                write!(f, " {alpha})")
            }
            Term::Val(a) => write!(f, "(v {a})"),
            Term::Ac(n, a) => write!(f, "(ac {n} {a})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[String]| {
            write!(f, "({head}")?;
            for i in items {
                write!(f, " {i}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Theta(args) => list(f, "Theta", &args.iter().map(|a| a.to_string()).collect::<Vec<_>>()),
            Formula::Le(a, b) => write!(f, "(<= {a} {b})"),
            Formula::Lt(a, b) => write!(f, "(< {a} {b})"),
            Formula::Not(x) => write!(f, "(not {x})"),
            Formula::And(fs) => list(f, "and", &fs.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
            Formula::Or(fs) => list(f, "or", &fs.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
            Formula::Implies(a, b) => write!(f, "(-> {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(<-> {a} {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum SExpr {
    Atom(String),
    Str(String),
    List(Vec<SExpr>),
}

fn tokenize(src: &str) -> Result<Vec<SExpr>> {
    fn parse_list(chars: &mut std::iter::Peekable<std::str::Chars<'_>>, depth: usize) -> Result<Vec<SExpr>> {
        let mut items = Vec::new();
        loop {
            match chars.peek().copied() {
                None if depth == 0 => return Ok(items),
                None => return Err(Error::Syntax("unbalanced parenthesis".into())),
                Some(c) if c.is_whitespace() => {
                    chars.next();
                }
                Some('(') => {
                    chars.next();
                    items.push(SExpr::List(parse_list(chars, depth + 1)?));
                }
                Some(')') => {
                    chars.next();
                    if depth == 0 {
                        return Err(Error::Syntax("unexpected ')'".into()));
                    }
                    return Ok(items);
                }
                Some('"') => {
                    chars.next();
                    let mut s = String::new();
                    loop {
                        match chars.next() {
                            Some('"') => break,
                            Some(c) => s.push(c),
                            None => return Err(Error::Syntax("unterminated string".into())),
                        }
                    }
                    items.push(SExpr::Str(s));
                }
                Some(_) => {
                    let mut s = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                            break;
                        }
                        s.push(c);
                        chars.next();
                    }
                    items.push(SExpr::Atom(s));
                }
            }
        }
    }
    parse_list(&mut src.chars().peekable(), 0)
}

fn single(src: &str) -> Result<SExpr> {
    let mut items = tokenize(src)?;
    if items.len() != 1 {
        return Err(Error::Syntax(format!("expected one expression, found {}", items.len())));
    }
    Ok(items.pop().unwrap())
}

fn level(e: &SExpr) -> Result<u32> {
    match e {
        SExpr::Atom(a) => a.parse().map_err(|_| Error::Syntax(format!("expected a level, got {a}"))),
        _ => Err(Error::Syntax("expected a level".into())),
    }
}

fn term(e: &SExpr) -> Result<Term> {
    match e {
        SExpr::Str(s) => Err(Error::Syntax(format!("bare string \"{s}\"; use (lit ...)"))),
        SExpr::Atom(a) => {
            let (name, sort) = a
                .split_once(':')
                .ok_or_else(|| Error::Syntax(format!("variable {a} needs a sort annotation like {a}:A")))?;
            if name.is_empty() {
                return Err(Error::Syntax("empty variable name".into()));
            }
            Ok(Term::var(name, Sort::parse(sort)?))
        }
        SExpr::List(items) => {
            let Some(SExpr::Atom(head)) = items.first() else {
                return Err(Error::Syntax("expected an operator".into()));
            };
            let args = &items[1..];
            let arity = |n: usize| -> Result<()> {
                if args.len() != n {
                    return Err(Error::Syntax(format!("{head} takes {n} arguments")));
                }
                Ok(())
            };
            let boxed = |i: usize| -> Result<Box<Term>> { Ok(Box::new(term(&args[i])?)) };
            match head.as_str() {
                "forall" | "exists" => Err(Error::Syntax("quantifiers are not supported".into())),
                "+" => arity(2).and_then(|_| Ok(Term::Add(boxed(0)?, boxed(1)?))),
                "*" => arity(2).and_then(|_| Ok(Term::Mul(boxed(0)?, boxed(1)?))),
                "-" if args.len() == 1 => Ok(Term::Neg(boxed(0)?)),
                "-" => arity(2).and_then(|_| Ok(Term::Sub(boxed(0)?, boxed(1)?))),
                "zero" | "one" => {
                    arity(1)?;
                    let SExpr::Atom(s) = &args[0] else { return Err(Error::Syntax("expected a sort".into())) };
                    let sort = Sort::parse(s)?;
                    Ok(if head == "zero" { Term::Zero(sort) } else { Term::One(sort) })
                }
                "inf" => arity(0).map(|_| Term::Infinity),
                "lit" => {
                    let Some(SExpr::Atom(s)) = args.first() else {
                        return Err(Error::Syntax("lit needs a sort".into()));
                    };
                    let parts = args[1..]
                        .iter()
                        .map(|p| match p {
                            SExpr::Atom(a) | SExpr::Str(a) => Ok(a.clone()),
                            SExpr::List(_) => Err(Error::Syntax("literal parts are strings".into())),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if parts.is_empty() {
                        return Err(Error::Syntax("empty literal".into()));
                    }
                    Ok(Term::Lit { sort: Sort::parse(s)?, parts })
                }
                "res" => arity(1).and_then(|_| Ok(Term::Res(boxed(0)?))),
                "r" => arity(2).and_then(|_| Ok(Term::ResN(level(&args[0])?, boxed(1)?))),
                "v" => arity(1).and_then(|_| Ok(Term::Val(boxed(0)?))),
                "ac" => arity(2).and_then(|_| Ok(Term::Ac(level(&args[0])?, boxed(1)?))),
                "S" => {
                    let (alpha, b) = args.split_last().ok_or_else(|| Error::Syntax("S needs a residue argument".into()))?;
                    Ok(Term::Lambda { b: b.iter().map(term).collect::<Result<_>>()?, alpha: Box::new(term(alpha)?) })
                }
                other => Err(Error::Syntax(format!("unknown function symbol {other}"))),
            }
        }
    }
}

fn formula(e: &SExpr) -> Result<Formula> {
    match e {
        SExpr::Atom(a) if a == "true" => Ok(Formula::True),
        SExpr::Atom(a) if a == "false" => Ok(Formula::False),
        SExpr::List(items) => {
            let Some(SExpr::Atom(head)) = items.first() else {
                return Err(Error::Syntax("expected a connective or relation".into()));
            };
            let args = &items[1..];
            let two = |what: &str| -> Result<()> {
                if args.len() != 2 {
                    return Err(Error::Syntax(format!("{what} takes 2 arguments")));
                }
                Ok(())
            };
            match head.as_str() {
                "forall" | "exists" => Err(Error::Syntax("quantifiers are not supported".into())),
                "=" => two("=").and_then(|_| Ok(Formula::Eq(term(&args[0])?, term(&args[1])?))),
                "<=" => two("<=").and_then(|_| Ok(Formula::Le(term(&args[0])?, term(&args[1])?))),
                "<" => two("<").and_then(|_| Ok(Formula::Lt(term(&args[0])?, term(&args[1])?))),
                "Theta" => Ok(Formula::Theta(args.iter().map(term).collect::<Result<_>>()?)),
                "not" => {
                    if args.len() != 1 {
                        return Err(Error::Syntax("not takes 1 argument".into()));
                    }
                    Ok(Formula::Not(Box::new(formula(&args[0])?)))
                }
                "and" => Ok(Formula::And(args.iter().map(formula).collect::<Result<_>>()?)),
                "or" => Ok(Formula::Or(args.iter().map(formula).collect::<Result<_>>()?)),
                "->" => two("->").and_then(|_| Ok(Formula::Implies(Box::new(formula(&args[0])?), Box::new(formula(&args[1])?)))),
                "<->" => two("<->").and_then(|_| Ok(Formula::Iff(Box::new(formula(&args[0])?), Box::new(formula(&args[1])?)))),
                other => Err(Error::Syntax(format!("unknown relation or connective {other}"))),
            }
        }
        other => Err(Error::Syntax(format!("expected a formula, got {other:?}"))),
    }
}

/// Parses and sort-checks a term.
pub fn parse_term(src: &str) -> Result<Term> {
    let t = term(&single(src)?)?;
    t.sort()?;
    Ok(t)
}

/// Parses and sort-checks a quantifier-free formula; quantifiers are a syntax error.
pub fn parse_formula(src: &str) -> Result<Formula> {
    let f = formula(&single(src)?)?;
    f.check()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for src in [
            "(= (res (* x:A y:A)) (* (res x:A) (res y:A)))",
            "(Theta x:A (lit A \"t\" \"0\"))",
            "(-> (Theta x:A) (= (res (S x:A a:k)) a:k))",
            "(<= (v z:K) (+ (v w:K) (lit G 2)))",
            "(= (ac 2 z:K) (r 2 y:A))",
            "(or true (not false))",
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn rejects() {
        assert!(matches!(parse_formula("(forall x:A (= x:A x:A))"), Err(Error::Syntax(_))));
        assert!(matches!(parse_formula("(= x:A a:k)"), Err(Error::SortError(_))));
        assert!(matches!(parse_formula("(= (res a:k) a:k)"), Err(Error::SortError(_))));
        assert!(matches!(parse_formula("(= x:A x:k)"), Err(Error::SortError(_))));
        assert!(matches!(parse_formula("(= x y)"), Err(Error::Syntax(_))));
        assert!(matches!(parse_formula("(= x:A (zero A)"), Err(Error::Syntax(_))));
        assert_eq!(parse_term("(r 1 x:A)").unwrap().sort().unwrap(), Sort::Residue);
    }

    #[test]
    fn enrichment_detection() {
        assert!(parse_formula("(= (S x:A a:k) y:A)").unwrap().uses_enrichment());
        assert!(!parse_formula("(= (res x:A) a:k)").unwrap().uses_enrichment());
    }
}
