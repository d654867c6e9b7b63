//! Text syntax for formulas.
//!
//! ```text
//! formula   := iff
//! iff       := implies [ "<->" iff ]
//! implies   := or [ "->" implies ]
//! or        := and { "|" and }
//! and       := unary { "&" unary }
//! unary     := "!" unary | quantified | primary
//! quantified:= ("forall" | "exists") var+ "." formula
//! primary   := "(" formula ")" | atom
//! atom      := NAME "(" var { "," var } ")"
//!            | var ("=" | "≈" | "<" | ">") var
//! ```
//!
//! A quantifier body extends as far right as possible. Unicode aliases
//! `∀ ∃ ¬ ∧ ∨ → ↔` are accepted on input, as is `~` for `≈`; `x > y` is
//! parsed as `y < x`. Identifiers are ASCII letters, digits, `_` and `'`,
//! starting with a letter or `_`.

use crate::formula::Formula;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at {pos}: {message}")]
pub struct ParseError {
    /// Character offset into the input.
    pub pos: usize,
    pub message: String,
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Eq,
    Lt,
    Gt,
    Approx,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Approx => "`≈`".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => toks.push((pos, Tok::LParen)),
            ')' => toks.push((pos, Tok::RParen)),
            ',' => toks.push((pos, Tok::Comma)),
            '.' => toks.push((pos, Tok::Dot)),
            '!' | '¬' => toks.push((pos, Tok::Bang)),
            '&' | '∧' => toks.push((pos, Tok::Amp)),
            '|' | '∨' => toks.push((pos, Tok::Pipe)),
            '→' => toks.push((pos, Tok::Arrow)),
            '↔' => toks.push((pos, Tok::DArrow)),
            '∀' => toks.push((pos, Tok::Forall)),
            '∃' => toks.push((pos, Tok::Exists)),
            '=' => toks.push((pos, Tok::Eq)),
            '≈' | '~' => toks.push((pos, Tok::Approx)),
            '>' => toks.push((pos, Tok::Gt)),
            '<' => {
                // `<->` must win over `<`.
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    toks.push((pos, Tok::DArrow));
                    i += 3;
                    continue;
                }
                toks.push((pos, Tok::Lt));
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((pos, Tok::Arrow));
                    i += 2;
                    continue;
                }
                return err(pos, "stray `-`; expected `->`");
            }
            c if is_ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_continue(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word),
                };
                toks.push((pos, tok));
                i = j;
                continue;
            }
            other => return err(pos, format!("unexpected character `{other}`")),
        }
        i += 1;
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.at += 1;
                Ok(())
            }
            Some(t) => err(self.pos(), format!("expected {what}, found {}", t.describe())),
            None => err(self.pos(), format!("expected {what}, found end of input")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies_expr()?;
        if self.peek() == Some(&Tok::DArrow) {
            self.at += 1;
            let rhs = self.formula()?;
            return Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implies_expr(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_expr()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.at += 1;
            let rhs = self.implies_expr()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.at += 1;
            let rhs = self.and_expr()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.at += 1;
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.at += 1;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Forall) | Some(Tok::Exists) => self.quantified(),
            _ => self.primary(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let quant = self.bump().unwrap();
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) => {
                    if let Some(Tok::Ident(v)) = self.bump() {
                        vars.push(v);
                    }
                    // Optional comma between bound variables.
                    if self.peek() == Some(&Tok::Comma) {
                        self.at += 1;
                    }
                }
                Some(Tok::Dot) => break,
                _ => {
                    return err(
                        self.pos(),
                        "expected a variable or `.` in quantifier prefix",
                    )
                }
            }
        }
        if vars.is_empty() {
            return err(self.pos(), "quantifier binds no variables");
        }
        self.expect(&Tok::Dot, "`.`")?;
        let body = self.formula()?;
        Ok(match quant {
            Tok::Forall => Formula::Forall(vars, Box::new(body)),
            _ => Formula::Exists(vars, Box::new(body)),
        })
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.formula()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(_)) => self.atom(),
            Some(t) => err(
                self.pos(),
                format!("expected a formula, found {}", t.describe()),
            ),
            None => err(self.pos(), "expected a formula, found end of input"),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                if let Some(Tok::Ident(s)) = self.bump() {
                    Ok(s)
                } else {
                    unreachable!()
                }
            }
            Some(t) => err(self.pos(), format!("expected {what}, found {}", t.describe())),
            None => err(self.pos(), format!("expected {what}, found end of input")),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let name = self.ident("a relation or variable name")?;
        match self.peek() {
            Some(Tok::LParen) => {
                self.at += 1;
                let mut args = vec![self.ident("a variable")?];
                while self.peek() == Some(&Tok::Comma) {
                    self.at += 1;
                    args.push(self.ident("a variable")?);
                }
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Formula::Atom(name, args))
            }
            Some(Tok::Eq) => {
                self.at += 1;
                let rhs = self.ident("a variable")?;
                Ok(Formula::Equal(name, rhs))
            }
            Some(Tok::Approx) => {
                self.at += 1;
                let rhs = self.ident("a variable")?;
                Ok(Formula::Atom("≈".into(), vec![name, rhs]))
            }
            Some(Tok::Lt) => {
                self.at += 1;
                let rhs = self.ident("a variable")?;
                Ok(Formula::Atom("<".into(), vec![name, rhs]))
            }
            Some(Tok::Gt) => {
                self.at += 1;
                let rhs = self.ident("a variable")?;
                Ok(Formula::Atom("<".into(), vec![rhs, name]))
            }
            Some(t) => err(
                self.pos(),
                format!(
                    "expected `(`, `=`, `≈`, `<` or `>` after `{name}`, found {}",
                    t.describe()
                ),
            ),
            None => err(
                self.pos(),
                format!("expected `(`, `=`, `≈`, `<` or `>` after `{name}`"),
            ),
        }
    }
}

/// Parses a formula from its text form.
pub fn parse(input: &str) -> Result<Formula, ParseError> {
    let toks = lex(input)?;
    let end = input.chars().count();
    let mut p = Parser { toks, at: 0, end };
    let f = p.formula()?;
    match p.peek() {
        None => Ok(f),
        Some(t) => err(p.pos(), format!("trailing {}", t.describe())),
    }
}
