//! Textual element literals: `p=3:…d2d1d0` (rightmost digit is d0) and `p=2,u=1:c0+c1*t+…`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{FieldDescriptor, Lfe};
use crate::error::{Error, Result};

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn header(s: &str) -> Result<(Vec<(String, u32)>, &str)> {
    let colon = s.find(':').ok_or_else(|| perr(0, "missing ':' after field header"))?;
    let mut kv = Vec::new();
    for (i, part) in s[..colon].split(',').enumerate() {
        let (k, v) = part.trim().split_once('=').ok_or_else(|| perr(i, format!("expected key=value, got '{part}'")))?;
        let v: u32 = v.trim().parse().map_err(|_| perr(i, format!("bad number '{v}'")))?;
        kv.push((k.trim().to_string(), v));
    }
    Ok((kv, &s[colon + 1..]))
}

fn lookup(kv: &[(String, u32)], key: &str) -> Option<u32> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
}

/// Parses either literal family. The precision of a p-adic literal is its digit count
/// unless `prec` asks for more (missing high digits are then zero).
pub fn parse_element(s: &str, prec: i64) -> Result<Lfe> {
    let (kv, body) = header(s.trim())?;
    let p = lookup(&kv, "p").ok_or_else(|| perr(0, "missing p"))?;
    match lookup(&kv, "u") {
        Some(u) => parse_laurent_body(FieldDescriptor::laurent(p, u)?, body, prec),
        None => parse_padic_body(FieldDescriptor::padic(p)?, body, prec),
    }
}

fn parse_padic_body(field: FieldDescriptor, body: &str, prec: i64) -> Result<Lfe> {
    let body = body.trim().trim_start_matches('…').trim_start_matches("...");
    let digits: Vec<u32> = if body.contains(',') {
        body.split(',')
            .enumerate()
            .map(|(i, d)| d.trim().parse().map_err(|_| perr(i, format!("bad digit '{d}'"))))
            .collect::<Result<_>>()?
    } else {
        body.chars().enumerate().map(|(i, c)| c.to_digit(10).ok_or_else(|| perr(i, format!("bad digit '{c}'")))).collect::<Result<_>>()?
    };
    if digits.is_empty() {
        return Err(perr(0, "no digits"));
    }
    if let Some(i) = digits.iter().position(|&d| d >= field.p) {
        return Err(perr(i, format!("digit {} out of range for p={}", digits[i], field.p)));
    }
    let mut n = BigInt::zero();
    for &d in &digits {
        n = n * field.p + d;
    }
    Ok(Lfe::from_bigint(field, &n, prec.max(digits.len() as i64)))
}

fn parse_laurent_body(field: FieldDescriptor, body: &str, prec: i64) -> Result<Lfe> {
    let q = field.q() as u32;
    let mut terms: Vec<(i64, u32)> = Vec::new();
    let mut cap = prec;
    let body: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    for raw in body.split('+') {
        let term = raw.trim();
        let here = pos;
        pos += raw.len() + 1;
        if term.is_empty() {
            return Err(perr(here, "empty term"));
        }
        if let Some(inner) = term.strip_prefix("O(").and_then(|t| t.strip_suffix(')')) {
            let e = inner.strip_prefix("t^").map(|e| e.parse::<i64>()).unwrap_or(Ok(1));
            cap = e.map_err(|_| perr(here, "bad O-term"))?;
            continue;
        }
        let (c, e) = match term.split_once('t') {
            None => (term, "0"),
            Some((c, e)) => {
                let c = c.trim_end_matches('*');
                let e = if e.is_empty() { "1" } else { e.trim_start_matches('^') };
                (if c.is_empty() { "1" } else { c }, e)
            }
        };
        let c: u32 = c.parse().map_err(|_| perr(here, format!("bad coefficient '{c}'")))?;
        let e: i64 = e.parse().map_err(|_| perr(here, format!("bad exponent '{e}'")))?;
        if c >= q {
            return Err(perr(here, format!("coefficient {c} not in F_{q}")));
        }
        terms.push((e, c));
    }
    let start = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
    if cap <= start {
        return Ok(Lfe::zero_mod(field, cap));
    }
    let mut coeffs = vec![0u32; (cap - start) as usize];
    let f = super::fq::ctx(field.p, field.u)?;
    for (e, c) in terms {
        if e < cap {
            let i = (e - start) as usize;
            coeffs[i] = f.add(coeffs[i], c);
        }
    }
    Ok(Lfe::from_series(field, start, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padic_literal_is_little_endian_from_the_right() {
        let x = parse_element("p=3:…120", 3).unwrap();
        // digits d2 d1 d0 = 1 2 0 → 9 + 6 = 15
        let f = FieldDescriptor::padic(3).unwrap();
        assert_eq!(x, Lfe::from_int(f, 15, 3));
        assert!(parse_element("p=3:…130", 3).is_err());
    }

    #[test]
    fn laurent_literal() {
        let x = parse_element("p=2,u=1:1+1*t+t^3", 8).unwrap();
        assert_eq!(x.series_coeffs(4).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(x.precision(), Some(8));
        let y = parse_element("p=2,u=1:1+O(t^2)", 8).unwrap();
        assert_eq!(y.precision(), Some(2));
    }

    #[test]
    fn literal_round_trip_through_display() {
        let x = parse_element("p=5:…3410", 4).unwrap();
        assert_eq!(parse_element(&x.to_literal(), 4).unwrap(), x);
    }
}
