//! Group words over single-letter generator names, e.g. `(cb^-1)^5`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad word {src:?} at byte {at}: {msg}")]
pub struct WordError {
    pub src: String,
    pub at: usize,
    pub msg: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Letter {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Letter {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}{}", self.gen, if self.inverse { "'" } else { "" })
    }
}

pub type Word = Vec<Letter>;

pub fn invert(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// A relator `base^exponent`, kept in the power form it was written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub source: String,
    pub base: Word,
    pub exponent: u32,
}

impl Relator {
    /// The literal expansion `base base ... base`.
    pub fn letters(&self) -> Word {
        let mut out = Vec::with_capacity(self.base.len() * self.exponent as usize);
        for _ in 0..self.exponent {
            out.extend_from_slice(&self.base);
        }
        out
    }

    /// Exponent sum of each generator over the expanded word.
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut sums = vec![0i64; generators];
        for l in self.letters() {
            sums[l.gen] += l.sign();
        }
        sums
    }

    pub fn parse(src: &str, generators: &[String]) -> Result<Relator, WordError> {
        let mut p = WordParser {
            src,
            pos: 0,
            generators,
        };
        let items = p.sequence()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        match items.as_slice() {
            [(inner, e)] if *e != 0 => {
                let base = if *e > 0 { inner.clone() } else { invert(inner) };
                Ok(Relator {
                    source: src.to_string(),
                    base,
                    exponent: e.unsigned_abs(),
                })
            }
            _ => Ok(Relator {
                source: src.to_string(),
                base: expand(&items),
                exponent: 1,
            }),
        }
    }
}

fn expand(items: &[(Word, i32)]) -> Word {
    let mut out = Vec::new();
    for (w, e) in items {
        let piece = if *e < 0 { invert(w) } else { w.clone() };
        for _ in 0..e.unsigned_abs() {
            out.extend_from_slice(&piece);
        }
    }
    out
}

struct WordParser<'a> {
    src: &'a str,
    pos: usize,
    generators: &'a [String],
}

impl WordParser<'_> {
    fn error(&self, msg: &str) -> WordError {
        WordError {
            src: self.src.to_string(),
            at: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace() || c == '*') {
            self.pos += 1;
        }
    }

    /// Items of a sequence with their (possibly negative) exponents.
    fn sequence(&mut self) -> Result<Vec<(Word, i32)>, WordError> {
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            let word = match self.peek() {
                Some('(') => {
                    self.pos += 1;
                    let inner = self.sequence()?;
                    self.skip_ws();
                    if self.peek() != Some(')') {
                        return Err(self.error("expected ')'"));
                    }
                    self.pos += 1;
                    expand(&inner)
                }
                Some(c) if c.is_alphabetic() => {
                    let name = c.to_string();
                    let gen = self
                        .generators
                        .iter()
                        .position(|g| *g == name)
                        .ok_or_else(|| self.error(&format!("unknown generator {name:?}")))?;
                    self.pos += c.len_utf8();
                    vec![Letter::new(gen, false)]
                }
                _ => return Ok(items),
            };
            let exp = self.exponent()?;
            items.push((word, exp));
        }
    }

    fn exponent(&mut self) -> Result<i32, WordError> {
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let e: i32 = self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("expected an integer exponent"))?;
        Ok(if neg { -e } else { e })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens() -> Vec<String> {
        ["a", "b", "c"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn power_forms() {
        let r = Relator::parse("(cb^-1)^5", &gens()).unwrap();
        assert_eq!(r.exponent, 5);
        assert_eq!(r.base, vec![Letter::new(2, false), Letter::new(1, true)]);
        assert_eq!(r.letters().len(), 10);
        assert_eq!(r.exponent_sums(3), vec![0, -5, 5]);

        let r = Relator::parse("a^6", &gens()).unwrap();
        assert_eq!((r.base.len(), r.exponent), (1, 6));

        let r = Relator::parse("(a * b)^3", &gens()).unwrap();
        assert_eq!(r.exponent_sums(3), vec![3, 3, 0]);
    }

    #[test]
    fn plain_words_and_negative_powers() {
        let r = Relator::parse("a b A", &["a".into(), "b".into(), "A".into()]).unwrap();
        assert_eq!(r.exponent, 1);
        assert_eq!(r.base.len(), 3);

        let r = Relator::parse("(ab)^-2", &gens()).unwrap();
        assert_eq!(r.exponent, 2);
        assert_eq!(r.base, vec![Letter::new(1, true), Letter::new(0, true)]);
    }

    #[test]
    fn errors() {
        assert!(Relator::parse("d^2", &gens()).is_err());
        assert!(Relator::parse("(ab^2", &gens()).is_err());
        assert!(Relator::parse("a^", &gens()).is_err());
        assert!(Relator::parse("a)", &gens()).is_err());
    }
}
