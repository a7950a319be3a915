//! Function specs: sums of monomials in `x` (or `x1..xn`) with integer, rational or
//! braced element-literal coefficients, e.g. `3*x^2 - 1/2*x + {p=3:12}` or `x1*x2 + 2*x2^3`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::ultrametric::{parse_element, FieldDescriptor, Lfe};

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

struct Lexer<'a> {
    s: &'a [u8],
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
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

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| perr(start, "expected a number"))
    }

    fn bignum(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| perr(start, "expected a number"))
    }
}

/// Parsed term: coefficient and exponent per variable index (1-based; `x` is `x1`).
enum Coeff {
    Rational(BigInt, BigInt),
    Literal(Lfe),
}

struct Term {
    negative: bool,
    coeff: Coeff,
    powers: Vec<(usize, u32)>,
}

fn parse_terms(src: &str, field: FieldDescriptor, prec: i64) -> Result<Vec<Term>> {
    let mut lx = Lexer { s: src.as_bytes(), src, pos: 0 };
    let mut terms = Vec::new();
    if lx.peek().is_none() {
        return Err(perr(0, "empty function spec"));
    }
    loop {
        let mut negative = false;
        if terms.is_empty() {
            negative = lx.eat(b'-');
        } else if lx.eat(b'-') {
            negative = true;
        } else if !lx.eat(b'+') {
            return Err(perr(lx.pos, "expected '+' or '-'"));
        }
        let mut coeff = None;
        let mut powers = Vec::new();
        loop {
            match lx.peek() {
                Some(c) if c.is_ascii_digit() => {
                    if coeff.is_some() {
                        return Err(perr(lx.pos, "second coefficient in one term"));
                    }
                    let a = lx.bignum()?;
                    let b = if lx.eat(b'/') {
                        let at = lx.pos;
                        let b = lx.bignum()?;
                        if b == BigInt::from(0) {
                            return Err(perr(at, "zero denominator"));
                        }
                        b
                    } else {
                        BigInt::from(1)
                    };
                    coeff = Some(Coeff::Rational(a, b));
                }
                Some(b'{') => {
                    if coeff.is_some() {
                        return Err(perr(lx.pos, "second coefficient in one term"));
                    }
                    let open = lx.pos;
                    let close = src[open..].find('}').ok_or_else(|| perr(open, "unterminated literal"))? + open;
                    let lit = parse_element(&src[open + 1..close], prec).map_err(|e| match e {
                        Error::Parse { pos, msg } => perr(open + 1 + pos, msg),
                        other => other,
                    })?;
                    if lit.field() != field {
                        return Err(perr(open, format!("literal lives in {} but the spec is over {field}", lit.field())));
                    }
                    coeff = Some(Coeff::Literal(lit));
                    lx.pos = close + 1;
                }
                Some(b'x') => {
                    lx.pos += 1;
                    let var = match lx.s.get(lx.pos) {
                        Some(c) if c.is_ascii_digit() => {
                            let at = lx.pos;
                            let v = lx.number()? as usize;
                            if v == 0 {
                                return Err(perr(at, "variables are numbered from x1"));
                            }
                            v
                        }
                        _ => 1,
                    };
                    let e = if lx.eat(b'^') { lx.number()? as u32 } else { 1 };
                    powers.push((var, e));
                }
                Some(c) => return Err(perr(lx.pos, format!("unexpected '{}'", c as char))),
                None => return Err(perr(lx.pos, "unexpected end of input")),
            }
            if !lx.eat(b'*') {
                break;
            }
        }
        terms.push(Term { negative, coeff: coeff.unwrap_or(Coeff::Rational(1.into(), 1.into())), powers });
        if lx.peek().is_none() {
            return Ok(terms);
        }
    }
}

/// Parses a spec into a polynomial over `field` in `dim` variables, or in as many as the spec
/// mentions when `dim` is `None`.
pub fn parse_poly(src: &str, field: FieldDescriptor, dim: Option<usize>, prec: i64) -> Result<MPoly<Lfe>> {
    let terms = parse_terms(src, field, prec)?;
    let used = terms.iter().flat_map(|t| t.powers.iter().map(|&(v, _)| v)).max().unwrap_or(1);
    let nvars = dim.unwrap_or(used);
    if used > nvars {
        return Err(perr(0, format!("spec uses x{used} but the domain has dimension {nvars}")));
    }
    let mut poly = MPoly::zero(nvars);
    for t in terms {
        let mut c = match t.coeff {
            Coeff::Rational(a, b) => Lfe::from_rational(field, &a, &b, prec)?,
            Coeff::Literal(l) => l,
        };
        if t.negative {
            c = -&c;
        }
        let mut exps = vec![0u32; nvars];
        for (v, e) in t.powers {
            exps[v - 1] += e;
        }
        poly.add_term(exps, c);
    }
    Ok(poly)
}

/// Integer coefficients `c_0..c_d` of a univariate spec.
pub fn parse_int_poly(src: &str) -> Result<Vec<i64>> {
    let terms = parse_terms(src, FieldDescriptor::padic(2)?, 8)?;
    let mut out: Vec<i64> = Vec::new();
    for t in terms {
        let Coeff::Rational(a, b) = t.coeff else {
            return Err(perr(0, "integer coefficients expected"));
        };
        if b != BigInt::from(1) {
            return Err(perr(0, "integer coefficients expected"));
        }
        let a: i64 = a.try_into().map_err(|_| perr(0, "coefficient too large"))?;
        if t.powers.iter().any(|&(v, _)| v != 1) {
            return Err(perr(0, "univariate spec expected"));
        }
        let d = t.powers.iter().map(|&(_, e)| e).sum::<u32>() as usize;
        if out.len() <= d {
            out.resize(d + 1, 0);
        }
        out[d] += if t.negative { -a } else { a };
    }
    Ok(out)
}
