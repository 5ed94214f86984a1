//! Generator words: formal products of powers of integer polynomials in `A`.
//!
//! Textual grammar (whitespace is ignored):
//!
//! ```text
//! word     := factor ( '*'? factor )*
//! factor   := atom ( '^' exponent )?
//! atom     := 'A' | 'E' | '(' poly ')'
//! exponent := '-'? digits | '{' '-'? digits '}'
//! poly     := ( '+' | '-' )? pterm ( ( '+' | '-' ) pterm )*
//! pterm    := digits ( '*'? mono )? | mono
//! mono     := 'A' ( '^' digits )? | 'E'
//! ```
//!
//! `E` is the identity, so `(A-E)^2*A^-2` is `(t - 1)^2` at `A` times `A^-2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};
use crate::exact::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WordFactor {
    pub poly: IntPoly,
    pub exponent: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GeneratorWord {
    pub factors: Vec<WordFactor>,
}

impl GeneratorWord {
    pub fn identity() -> Self {
        GeneratorWord::default()
    }

    pub fn factor(poly: IntPoly, exponent: i32) -> Self {
        GeneratorWord {
            factors: vec![WordFactor { poly, exponent }],
        }
    }

    pub fn then(mut self, poly: IntPoly, exponent: i32) -> Self {
        self.factors.push(WordFactor { poly, exponent });
        self
    }
}

/// Evaluates a word at `a`. Negative exponents need `|det| = 1` factors.
pub fn eval_word(w: &GeneratorWord, a: &IntMatrix) -> Result<IntMatrix> {
    let mut acc = IntMatrix::identity();
    for f in &w.factors {
        let base = a.eval_poly(&f.poly)?;
        let power = base.pow(f.exponent).map_err(|e| match e {
            Error::Evaluation(m) => Error::Evaluation(format!("factor ({}): {m}", poly_text(&f.poly))),
            other => other,
        })?;
        acc = acc.checked_mul(&power)?;
    }
    Ok(acc)
}

fn poly_text(p: &IntPoly) -> String {
    if p.is_zero() {
        return "0*E".into();
    }
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push(if c.is_negative() { '-' } else { '+' });
        }
        let mono = match k {
            0 => "E".to_string(),
            1 => "A".to_string(),
            _ => format!("A^{k}"),
        };
        if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag}*{mono}"));
        }
    }
    out
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "E");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|fac| {
                let atom = if fac.poly == IntPoly::var() {
                    "A".to_string()
                } else if fac.poly == IntPoly::one() {
                    "E".to_string()
                } else {
                    format!("({})", poly_text(&fac.poly))
                };
                if fac.exponent == 1 {
                    atom
                } else {
                    format!("{atom}^{}", fac.exponent)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            src,
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("word `{}`: {what} at position {}", self.src, self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("ascii digits"))
    }

    fn exponent(&mut self) -> Result<i32> {
        let braced = self.eat('{');
        let neg = self.eat('-');
        let v = self.digits()?;
        if braced && !self.eat('}') {
            return Err(self.err("expected `}`"));
        }
        let v: i32 = v.try_into().map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn mono(&mut self) -> Result<IntPoly> {
        if self.eat('A') {
            let k = if self.eat('^') {
                let d = self.digits()?;
                usize::try_from(d).map_err(|_| self.err("power out of range"))?
            } else {
                1
            };
            Ok(IntPoly::monomial(BigInt::one(), k))
        } else if self.eat('E') {
            Ok(IntPoly::one())
        } else {
            Err(self.err("expected `A` or `E`"))
        }
    }

    fn pterm(&mut self) -> Result<IntPoly> {
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let c = self.digits()?;
            let explicit = self.eat('*');
            if explicit || matches!(self.peek(), Some('A') | Some('E')) {
                return Ok(self.mono()?.scale(&c));
            }
            return Ok(IntPoly::constant(c));
        }
        self.mono()
    }

    fn poly(&mut self) -> Result<IntPoly> {
        let mut neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        let mut acc = IntPoly::zero();
        loop {
            let t = self.pterm()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<WordFactor> {
        let poly = if self.eat('(') {
            let p = self.poly()?;
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            p
        } else if self.eat('A') {
            IntPoly::var()
        } else if self.eat('E') {
            IntPoly::one()
        } else {
            return Err(self.err("expected `A`, `E` or `(`"));
        };
        let exponent = if self.eat('^') { self.exponent()? } else { 1 };
        Ok(WordFactor { poly, exponent })
    }

    fn word(&mut self) -> Result<GeneratorWord> {
        let mut factors = vec![self.factor()?];
        while self.peek().is_some() {
            self.eat('*');
            factors.push(self.factor()?);
        }
        Ok(GeneratorWord { factors })
    }
}

impl FromStr for GeneratorWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        if p.peek().is_none() {
            return Err(p.err("empty word"));
        }
        p.word()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{companion, CompanionSpec};

    fn a1() -> IntMatrix {
        companion(CompanionSpec::new(1, -3, 0, 4))
    }

    #[test]
    fn parses_paper_words() {
        let w: GeneratorWord = "(A-E)^2*A^-2".parse().unwrap();
        assert_eq!(w.factors.len(), 2);
        assert_eq!(w.factors[0].poly, IntPoly::from_i64(&[-1, 1]));
        assert_eq!(w.factors[0].exponent, 2);
        assert_eq!(w.factors[1].exponent, -2);
        let juxta: GeneratorWord = "(A - E)^{2} A^{-2}".parse().unwrap();
        assert_eq!(w, juxta);
        let poly: GeneratorWord = "(2A^2 - 3*A + E)".parse().unwrap();
        assert_eq!(poly.factors[0].poly, IntPoly::from_i64(&[1, -3, 2]));
    }

    #[test]
    fn display_round_trip() {
        for s in ["A^-2", "(A-E)^2*A^-2", "(A-E)^2*(A+E)*A^-2", "(A+E)*A^-1", "E", "(-A^3+2*A-E)^3"] {
            let w: GeneratorWord = s.parse().unwrap();
            let again: GeneratorWord = w.to_string().parse().unwrap();
            assert_eq!(w, again, "{s}");
            assert_eq!(again.to_string(), w.to_string());
        }
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "B", "(A-E", "A^", "A^{2", "A**A"] {
            assert!(s.parse::<GeneratorWord>().is_err(), "{s}");
        }
    }

    #[test]
    fn evaluation_examples() {
        let b11 = eval_word(&"A^-2".parse().unwrap(), &a1()).unwrap();
        assert_eq!(b11.det_i128().unwrap(), 1);
        let id = eval_word(&"(A-E)^0".parse().unwrap(), &a1()).unwrap();
        assert_eq!(id, IntMatrix::identity());
        let a2 = companion(CompanionSpec::new(1, -4, 1, 4));
        let b23 = eval_word(&"(A+E)*A^-1".parse().unwrap(), &a2).unwrap();
        assert!(b23.commutes_with(&a2).unwrap());
        assert_eq!(b23.det_i128().unwrap(), 1);
    }

    #[test]
    fn non_unimodular_inverse_fails() {
        // det(A_1 - E) = chi(1) = -1 but det(A_1 + E) = chi(-1) = 1 ... use 2A
        let w: GeneratorWord = "(2*A)^-1".parse().unwrap();
        assert!(matches!(eval_word(&w, &a1()), Err(Error::Evaluation(_))));
    }
}
