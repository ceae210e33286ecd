use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::{LaurentPolynomial, Monomial};
use crate::error::LaurentError;

fn write_monomial(out: &mut String, exps: &[i32]) -> bool {
    let mut first = true;
    for (k, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(&format!("x{}", k + 1));
        if e != 1 {
            out.push_str(&format!("^{e}"));
        }
    }
    !first
}

impl fmt::Display for LaurentPolynomial {
    /// Canonical rendering as one fraction over a monomial, e.g.
    /// `(x1 + x2 + 1)/(x1*x2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let numer = self.numerator_terms();
        let mut s = String::new();
        for (idx, (m, c)) in numer.iter().enumerate() {
            if idx == 0 {
                if c.is_negative() {
                    s.push('-');
                }
            } else if c.is_negative() {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let abs = c.abs();
            if m.is_one() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&abs.to_string());
                    s.push('*');
                }
                write_monomial(&mut s, m.exponents());
            }
        }
        let d = self.denominator_monomial().expect("nonzero");
        if d.is_one() {
            return f.write_str(&s);
        }
        if numer.len() > 1 {
            s = format!("({s})");
        }
        let mut den = String::new();
        write_monomial(&mut den, d.exponents());
        let factors = d.exponents().iter().filter(|&&e| e != 0).count();
        if factors > 1 {
            write!(f, "{s}/({den})")
        } else {
            write!(f, "{s}/{den}")
        }
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPolynomial({self})")
    }
}

/// Parses renderings of the form produced by `Display`. Also accepts negative
/// exponents and `*` between a coefficient and its monomial.
pub fn parse(nvars: usize, text: &str) -> Result<LaurentPolynomial, LaurentError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, nvars };
    p.skip_ws();
    let numer = if p.peek() == Some(b'(') { p.group()? } else { p.sum()? };
    p.skip_ws();
    let poly = if p.eat(b'/') {
        p.skip_ws();
        let den = p.group()?;
        if !den.is_monomial() || !numer.is_monomial() && p.s.first() != Some(&b'(') {
            return Err(p.err("denominator must be a single monomial"));
        }
        numer.exact_div(&den)?
    } else {
        numer
    };
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> LaurentError {
        LaurentError::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn group(&mut self) -> Result<LaurentPolynomial, LaurentError> {
        self.skip_ws();
        if self.eat(b'(') {
            let v = self.sum()?;
            self.skip_ws();
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            Ok(v)
        } else {
            self.term()
        }
    }

    fn sum(&mut self) -> Result<LaurentPolynomial, LaurentError> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negative = self.eat(b'-');
        loop {
            let t = self.term()?;
            terms.push(if negative { t.neg() } else { t });
            self.skip_ws();
            if self.eat(b'+') {
                negative = false;
            } else if self.eat(b'-') {
                negative = true;
            } else {
                break;
            }
        }
        let mut acc = LaurentPolynomial::zero(self.nvars);
        for t in terms {
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    fn number(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn term(&mut self) -> Result<LaurentPolynomial, LaurentError> {
        self.skip_ws();
        let negative = self.eat(b'-');
        self.skip_ws();
        let mut coef = BigInt::one();
        let mut exps = vec![0i32; self.nvars];
        let mut any = false;
        if let Some(c) = self.number() {
            coef = c;
            any = true;
            self.skip_ws();
            if !self.eat(b'*') {
                return Ok(self.finish(negative, coef, exps));
            }
            self.skip_ws();
        }
        loop {
            if !self.eat(b'x') {
                if any {
                    return Err(self.err("expected variable"));
                }
                return Err(self.err("expected term"));
            }
            any = true;
            let idx = self
                .number()
                .and_then(|v| v.to_usize())
                .filter(|&v| v >= 1 && v <= self.nvars)
                .ok_or_else(|| self.err("bad variable index"))?;
            let mut e = 1i32;
            if self.eat(b'^') {
                let neg = self.eat(b'-');
                let v = self
                    .number()
                    .and_then(|v| v.to_i32())
                    .ok_or_else(|| self.err("bad exponent"))?;
                e = if neg { -v } else { v };
            }
            exps[idx - 1] += e;
            self.skip_ws();
            if !self.eat(b'*') {
                break;
            }
            self.skip_ws();
        }
        Ok(self.finish(negative, coef, exps))
    }

    fn finish(&self, negative: bool, coef: BigInt, exps: Vec<i32>) -> LaurentPolynomial {
        let c = if negative { -coef } else { coef };
        LaurentPolynomial::monomial(self.nvars, Monomial::new(exps), c)
    }
}

