//! Text syntax for field elements and ideals.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | atom
//! atom  := INT | 'w' | 'delta' | 'eps' | '(' INT ',' INT ')' | '(' expr ')'
//! ```
//!
//! `w` is the second integral basis element, `delta` the totally positive
//! generator of the different and `eps` the totally positive fundamental
//! unit. `(a,b)` is `a + b w`. Examples: `3+2*w`, `1/delta`, `(2,1)/5`.
//!
//! Ideals are either an element (the principal ideal it generates, with `1`
//! the unit ideal) or `hnf:a,b,c` for the lattice `a Z + (b + c w) Z`.

use rug::Integer;

use crate::error::{Error, Result};
use crate::field::{FElement, RealQuadraticField};
use crate::ideals::{FractionalIdeal, IdealHNF};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(Integer),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Int(t.parse().map_err(|_| Error::Parse(t.clone()))?));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' in \"{s}\"")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    f: &'a RealQuadraticField,
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in \"{}\"", self.pos, self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<FElement> {
        let mut x = self.term()?;
        loop {
            if self.eat('+') {
                x = &x + &self.term()?;
            } else if self.eat('-') {
                x = &x - &self.term()?;
            } else {
                return Ok(x);
            }
        }
    }

    fn term(&mut self) -> Result<FElement> {
        let mut x = self.unary()?;
        loop {
            if self.eat('*') {
                x = &x * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(self.err("division by zero"));
                }
                x = x.div(&d)?;
            } else {
                return Ok(x);
            }
        }
    }

    fn unary(&mut self) -> Result<FElement> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        self.atom()
    }

    fn int(&mut self) -> Result<Integer> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    fn atom(&mut self) -> Result<FElement> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(self.f.int(n).to_f())
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "w" => Ok(self.f.omega().to_f()),
                    "delta" => Ok(self.f.require_delta()?.to_f()),
                    "eps" => Ok(self.f.eps_plus().to_f()),
                    _ => Err(self.err(&format!("unknown name '{id}'"))),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                // (a,b) pair, else a parenthesized expression
                let save = self.pos;
                if let Ok(a) = self.int() {
                    if self.eat(',') {
                        let b = self.int()?;
                        self.expect(')')?;
                        return Ok(self.f.elem(a, b).to_f());
                    }
                }
                self.pos = save;
                let x = self.expr()?;
                self.expect(')')?;
                Ok(x)
            }
            _ => Err(self.err("expected a value")),
        }
    }
}

/// Parses a field element.
pub fn parse_element(f: &RealQuadraticField, s: &str) -> Result<FElement> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let mut p = Parser { f, toks, pos: 0, src: s };
    let x = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(x)
}

/// Parses an integral ideal.
pub fn parse_ideal(f: &RealQuadraticField, s: &str) -> Result<IdealHNF> {
    if let Some(rest) = s.trim().strip_prefix("hnf:") {
        let parts: Vec<i128> = rest
            .split(',')
            .map(|t| t.trim().parse::<i128>().map_err(|_| Error::Parse(format!("bad HNF entry '{t}'"))))
            .collect::<Result<_>>()?;
        let [a, b, c] = parts[..] else {
            return Err(Error::Parse(format!("HNF needs three entries, got \"{rest}\"")));
        };
        return IdealHNF::from_hnf(f, a, b, c);
    }
    let x = parse_element(f, s)?;
    let o = x.to_o().map_err(|_| Error::NotIntegral(x.to_string()))?;
    IdealHNF::principal(&o)
}

/// Parses a fractional ideal as the principal ideal of an element.
pub fn parse_fractional_ideal(f: &RealQuadraticField, s: &str) -> Result<FractionalIdeal> {
    if s.trim().starts_with("hnf:") {
        return Ok(FractionalIdeal::integral(parse_ideal(f, s)?));
    }
    FractionalIdeal::principal(&parse_element(f, s)?)
}
