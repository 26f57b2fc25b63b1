//! Polynomial expressions over Q: `y^2 - x^3 + x`, `-y`, `2*x*x_σ`, `(x + 1)^2`, `1/2*x`.

use c2alg::poly::RatPoly;
use c2alg::scalar::Rational;
use num_bigint::BigInt;

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
}

pub fn parse_poly(text: &str, names: &[String]) -> Result<RatPoly, String> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, names };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(format!("unexpected '{}' at offset {}", p.chars[p.pos], p.pos));
    }
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

impl Parser<'_> {
    fn n(&self) -> usize {
        self.names.len()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
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

    fn expr(&mut self) -> Result<RatPoly, String> {
        let mut acc = if self.eat('-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatPoly, String> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<RatPoly, String> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let digits = self.digits();
            let e: u32 = digits.parse().map_err(|_| format!("bad exponent at offset {}", self.pos))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn atom(&mut self) -> Result<RatPoly, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(format!("missing ')' at offset {}", self.pos));
                }
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().parse().unwrap();
                let mut q = Rational::from_integer(num);
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let d = self.digits();
                    let den: BigInt = d.parse().map_err(|_| format!("bad denominator at offset {}", self.pos))?;
                    if den == BigInt::from(0) {
                        return Err("division by zero".into());
                    }
                    q /= Rational::from_integer(den);
                }
                Ok(RatPoly::constant(self.n(), q))
            }
            Some(c) if is_ident_start(c) => {
                let start = self.pos;
                while self.pos < self.chars.len() && is_ident(self.chars[self.pos]) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.names.iter().position(|s| *s == name) {
                    Some(i) => Ok(RatPoly::var(self.n(), i)),
                    None => Err(format!("unknown variable '{}'", name)),
                }
            }
            Some(c) => Err(format!("unexpected '{}' at offset {}", c, self.pos)),
            None => Err("unexpected end of expression".into()),
        }
    }
}
