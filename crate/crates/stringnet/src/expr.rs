//! Parser/evaluator for the complex scalar expressions used in category data
//! files: decimal literals, `sqrt(..)`, `exp(..)`, `i`, `pi`, `+ - * /` and
//! parentheses. Everything evaluates to a double-precision complex number at
//! load time, e.g. `1/sqrt(2)*exp(i*pi*7/12)` or `(1-sqrt(3))/4*exp(i*pi*1/6)`.

use crate::C64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("unexpected character '{0}' at position {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("expected '{0}' at position {1}")]
    Expected(char, usize),
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("trailing input at position {0}")]
    Trailing(usize),
}

/// Evaluate an expression to a complex double.
pub fn eval(src: &str) -> Result<C64, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut p = Parser { src: &chars, pos: 0 };
    let v = p.sum()?;
    p.skip_ws();
    if p.pos != chars.len() {
        return Err(ExprError::Trailing(p.pos));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [char],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        match self.bump() {
            Some(x) if x == c => Ok(()),
            Some(_) => Err(ExprError::Expected(c, self.pos - 1)),
            None => Err(ExprError::UnexpectedEnd),
        }
    }

    fn sum(&mut self) -> Result<C64, ExprError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc += self.product()?;
                }
                Some('-') | Some('\u{2212}') => {
                    self.bump();
                    acc -= self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<C64, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc *= self.unary()?;
                }
                Some('/') => {
                    self.bump();
                    acc /= self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<C64, ExprError> {
        match self.peek() {
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.bump();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<C64, ExprError> {
        match self.peek() {
            None => Err(ExprError::UnexpectedEnd),
            Some('(') => {
                self.bump();
                let v = self.sum()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(ExprError::UnexpectedChar(c, self.pos)),
        }
    }

    fn number(&mut self) -> Result<C64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == '.')
        {
            self.pos += 1;
        }
        // exponent suffix like 1.5e-3 (but not the bare word "e")
        if self.pos < self.src.len()
            && (self.src[self.pos] == 'e' || self.src[self.pos] == 'E')
            && self.pos + 1 < self.src.len()
            && (self.src[self.pos + 1].is_ascii_digit()
                || self.src[self.pos + 1] == '+'
                || self.src[self.pos + 1] == '-')
        {
            self.pos += 2;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let s: String = self.src[start..self.pos].iter().collect();
        s.parse::<f64>()
            .map(C64::from)
            .map_err(|_| ExprError::UnexpectedChar(self.src[start], start))
    }

    fn ident(&mut self) -> Result<C64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name: String = self.src[start..self.pos].iter().collect();
        match name.as_str() {
            "i" => Ok(C64::new(0.0, 1.0)),
            "pi" => Ok(C64::from(std::f64::consts::PI)),
            "sqrt" => {
                self.expect('(')?;
                let v = self.sum()?;
                self.expect(')')?;
                Ok(v.sqrt())
            }
            "exp" => {
                self.expect('(')?;
                let v = self.sum()?;
                self.expect(')')?;
                Ok(v.exp())
            }
            other => Err(ExprError::UnknownFunction(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, re: f64, im: f64) {
        assert!((a.re - re).abs() < 1e-14 && (a.im - im).abs() < 1e-14, "{a}");
    }

    #[test]
    fn literals_and_arithmetic() {
        close(eval("1").unwrap(), 1.0, 0.0);
        close(eval("1+2*3").unwrap(), 7.0, 0.0);
        close(eval("(1+2)*3").unwrap(), 9.0, 0.0);
        close(eval("-1/2").unwrap(), -0.5, 0.0);
        close(eval("1.5e-3").unwrap(), 0.0015, 0.0);
    }

    #[test]
    fn roots_and_phases() {
        close(eval("sqrt(3)").unwrap(), 3f64.sqrt(), 0.0);
        close(eval("1+sqrt(3)").unwrap(), 1.0 + 3f64.sqrt(), 0.0);
        let c = eval("exp(i*pi*7/12)").unwrap();
        let want = C64::from_polar(1.0, 7.0 * std::f64::consts::PI / 12.0);
        close(c, want.re, want.im);
        let c = eval("exp(-i*pi*5/6)").unwrap();
        let want = C64::from_polar(1.0, -5.0 * std::f64::consts::PI / 6.0);
        close(c, want.re, want.im);
    }

    #[test]
    fn composite_entries() {
        let c = eval("1/sqrt(2)*exp(i*pi*7/12)").unwrap();
        let want = C64::from_polar(1.0 / 2f64.sqrt(), 7.0 * std::f64::consts::PI / 12.0);
        close(c, want.re, want.im);
        let c = eval("-(1/2)*(exp(i*pi*1/6)-1)").unwrap();
        let e = C64::from_polar(1.0, std::f64::consts::PI / 6.0);
        let want = -(e - 1.0) / 2.0;
        close(c, want.re, want.im);
    }

    #[test]
    fn errors() {
        assert!(eval("sqrt(").is_err());
        assert!(eval("1+*2").is_err());
        assert!(eval("foo(1)").is_err());
        assert!(eval("1 2").is_err());
    }
}
