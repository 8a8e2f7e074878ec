//! Valence and arity strings.
//!
//! ```text
//! arity   := '(' [valence {',' valence}] ';' valence ')'
//! valence := '(' int ',' int ')' | '(' '[' names ']' ',' '[' names ']' ')'
//! ```
//!
//! A numeric valence `(n,m)` uses a single default colour.

use std::fmt;

use coprop::coa::{Arity, CValence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset of the offending character.
    pub pos: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at column {}: expected {}", self.pos + 1, self.expected)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    colour: Option<&'a str>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn fail<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError { pos: self.pos, expected: expected.to_string() })
    }

    fn eat(&mut self, c: char) -> PResult<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.fail(&format!("'{c}'"))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '*' || c == '\'')).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn number(&mut self) -> PResult<usize> {
        let start = self.pos;
        let w = self.word();
        w.parse().or_else(|_| {
            self.pos = start;
            self.skip_ws();
            self.fail("a number")
        })
    }

    fn names(&mut self) -> PResult<Vec<String>> {
        self.eat('[')?;
        let mut out = Vec::new();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let w = self.word();
            if w.is_empty() {
                return self.fail("a colour name");
            }
            out.push(w.to_string());
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return self.fail("',' or ']'"),
            }
        }
    }

    fn valence(&mut self) -> PResult<CValence> {
        self.eat('(')?;
        if self.peek() == Some('[') {
            let inputs = self.names()?;
            self.eat(',')?;
            let outputs = self.names()?;
            self.eat(')')?;
            return Ok(CValence { inputs, outputs });
        }
        let start = self.pos;
        let n = self.number()?;
        self.eat(',')?;
        let m = self.number()?;
        self.eat(')')?;
        match self.colour {
            Some(c) => Ok(CValence::mono(c, n, m)),
            None => {
                self.pos = start;
                self.fail("a valence with named colours ('[...]'), since several colours are in use")
            }
        }
    }

    fn arity(&mut self) -> PResult<Arity> {
        self.eat('(')?;
        let mut nodes = Vec::new();
        if self.peek() != Some(';') {
            loop {
                nodes.push(self.valence()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(';') => break,
                    _ => return self.fail("',' or ';'"),
                }
            }
        }
        self.eat(';')?;
        let residue = self.valence()?;
        self.eat(')')?;
        Ok(Arity::new(nodes, residue))
    }

    fn end(&mut self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.fail("end of input"),
        }
    }
}

/// Parses an arity; numeric valences use `colour`, which must then be given.
pub fn parse_arity(src: &str, colour: Option<&str>) -> Result<Arity, ParseError> {
    let mut p = Parser { src, pos: 0, colour };
    let a = p.arity()?;
    p.end()?;
    Ok(a)
}

pub fn parse_valence(src: &str, colour: Option<&str>) -> Result<CValence, ParseError> {
    let mut p = Parser { src, pos: 0, colour };
    let v = p.valence()?;
    p.end()?;
    Ok(v)
}
