use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::fq;
use crate::error::{Error, Result};

/// Default truncation order for Laurent series and p-adic numbers.
pub const DEFAULT_PRECISION: i64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Padic,
    Laurent,
}

/// Which locally compact field an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    pub family: Family,
    pub p: u32,
    /// Extension degree of the residue field (always 1 for ℚ_p).
    pub u: u32,
}

impl FieldDescriptor {
    pub fn padic(p: u32) -> Result<Self> {
        if !super::is_prime(p as u64) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(FieldDescriptor { family: Family::Padic, p, u: 1 })
    }

    pub fn laurent(p: u32, u: u32) -> Result<Self> {
        fq::ctx(p, u)?;
        Ok(FieldDescriptor { family: Family::Laurent, p, u })
    }

    /// Size of the residue field.
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.u)
    }

    /// Characteristic of the field (0 for ℚ_p).
    pub fn characteristic(&self) -> u32 {
        match self.family {
            Family::Padic => 0,
            Family::Laurent => self.p,
        }
    }

    pub fn fq(&self) -> std::sync::Arc<fq::FqCtx> {
        fq::ctx(self.p, self.u).expect("descriptor validated at construction")
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Padic => write!(f, "Q_{}", self.p),
            Family::Laurent => write!(f, "F_{}^{}((t))", self.p, self.u),
        }
    }
}

/// A value of the normalized absolute value `|x| = p^(-v)`, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Norm {
    pub p: u32,
    /// `None` encodes the norm of zero.
    pub exp: Option<i64>,
}

impl Norm {
    pub fn zero(p: u32) -> Self {
        Norm { p, exp: None }
    }

    /// `p^(-v)`.
    pub fn from_valuation(p: u32, v: i64) -> Self {
        Norm { p, exp: Some(v) }
    }

    pub fn one(p: u32) -> Self {
        Norm::from_valuation(p, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.exp.is_none()
    }

    pub fn to_f64(&self) -> f64 {
        match self.exp {
            None => 0.0,
            Some(v) => (self.p as f64).powi(-(v as i32)),
        }
    }

    pub fn max(self, other: Norm) -> Norm {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn mul(self, other: Norm) -> Norm {
        match (self.exp, other.exp) {
            (Some(a), Some(b)) => Norm::from_valuation(self.p, a + b),
            _ => Norm::zero(self.p),
        }
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Norm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.exp, other.exp) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(v) => write!(f, "{}^{}", self.p, -v),
        }
    }
}

#[derive(Debug, Clone)]
enum Digits {
    /// Unit part of a p-adic number, reduced modulo p^(prec - val).
    Int(BigUint),
    /// Laurent coefficients from the leading exponent, encoded in 𝔽_q.
    Ser(Vec<u32>),
}

#[derive(Debug, Clone)]
enum Kind {
    ExactZero,
    /// `π^val · unit`, known modulo `π^prec`. When `val == prec` the value is an inexact zero.
    Approx {
        val: i64,
        prec: i64,
        unit: Digits,
    },
}

/// Truncated element of ℚ_p or 𝔽_{p^u}((θ)) in the capped absolute precision model.
#[derive(Debug, Clone)]
pub struct LocalFieldElement {
    field: FieldDescriptor,
    kind: Kind,
}

pub type Lfe = LocalFieldElement;

fn pow_p(p: u32, k: i64) -> BigUint {
    BigUint::from(p).pow(k.max(0) as u32)
}

impl LocalFieldElement {
    pub fn zero(field: FieldDescriptor) -> Self {
        LocalFieldElement { field, kind: Kind::ExactZero }
    }

    /// The inexact zero `O(π^prec)`.
    pub fn zero_mod(field: FieldDescriptor, prec: i64) -> Self {
        let unit = match field.family {
            Family::Padic => Digits::Int(BigUint::zero()),
            Family::Laurent => Digits::Ser(Vec::new()),
        };
        LocalFieldElement { field, kind: Kind::Approx { val: prec, prec, unit } }
    }

    pub fn one(field: FieldDescriptor, prec: i64) -> Self {
        Self::from_int(field, 1, prec)
    }

    /// The uniformizer π (p for ℚ_p, θ for Laurent series).
    pub fn uniformizer(field: FieldDescriptor, prec: i64) -> Self {
        Self::one(field, prec - 1).shift(1)
    }

    pub fn from_int(field: FieldDescriptor, n: i64, prec: i64) -> Self {
        Self::from_bigint(field, &BigInt::from(n), prec)
    }

    pub fn from_bigint(field: FieldDescriptor, n: &BigInt, prec: i64) -> Self {
        match field.family {
            Family::Padic => {
                if prec <= 0 {
                    return Self::zero_mod(field, prec);
                }
                let m = BigInt::from(pow_p(field.p, prec));
                let r = n.mod_floor(&m).to_biguint().expect("nonnegative residue");
                Self::from_int_digits(field, 0, prec, r)
            }
            Family::Laurent => {
                let c = n.mod_floor(&BigInt::from(field.p)).to_u32().unwrap_or(0);
                if prec <= 0 {
                    return Self::zero_mod(field, prec);
                }
                let mut coeffs = vec![0u32; prec as usize];
                coeffs[0] = c;
                Self::from_series(field, 0, coeffs)
            }
        }
    }

    /// `p^val · r` known modulo `p^prec`, normalizing any extra factors of p out of `r`.
    fn from_int_digits(field: FieldDescriptor, val: i64, prec: i64, r: BigUint) -> Self {
        let mut r = r % pow_p(field.p, prec - val);
        let mut val = val;
        if r.is_zero() {
            return Self::zero_mod(field, prec);
        }
        let pb = BigUint::from(field.p);
        while (&r % &pb).is_zero() {
            r /= &pb;
            val += 1;
        }
        LocalFieldElement { field, kind: Kind::Approx { val, prec, unit: Digits::Int(r) } }
    }

    /// Laurent series `Σ coeffs[i] θ^(start + i)` known modulo `θ^(start + len)`.
    pub fn from_series(field: FieldDescriptor, start: i64, coeffs: Vec<u32>) -> Self {
        let prec = start + coeffs.len() as i64;
        match coeffs.iter().position(|&c| c != 0) {
            None => Self::zero_mod(field, prec),
            Some(i) => {
                LocalFieldElement { field, kind: Kind::Approx { val: start + i as i64, prec, unit: Digits::Ser(coeffs[i..].to_vec()) } }
            }
        }
    }

    /// `n / d` to absolute precision `prec` (for Laurent fields the integers reduce mod p).
    pub fn from_rational(field: FieldDescriptor, n: &BigInt, d: &BigInt, prec: i64) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let pb = BigInt::from(field.p);
        let (mut vd, mut dd) = (0i64, d.clone());
        while field.family == Family::Padic && (&dd % &pb).is_zero() {
            dd /= &pb;
            vd += 1;
        }
        let work = prec + 2 * vd + 1;
        let num = Self::from_bigint(field, n, work);
        let den = Self::from_bigint(field, d, work);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(num.checked_div(&den)?.with_precision_cap(prec))
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::ExactZero)
    }

    /// True for exact zeros and for values known only to be `O(π^prec)`.
    pub fn is_zero(&self) -> bool {
        match &self.kind {
            Kind::ExactZero => true,
            Kind::Approx { val, prec, .. } => val >= prec,
        }
    }

    /// Valuation; `None` for the exact zero. Inexact zeros report their precision.
    pub fn valuation(&self) -> Option<i64> {
        match &self.kind {
            Kind::ExactZero => None,
            Kind::Approx { val, .. } => Some(*val),
        }
    }

    /// Absolute precision; `None` for exact zero.
    pub fn precision(&self) -> Option<i64> {
        match &self.kind {
            Kind::ExactZero => None,
            Kind::Approx { prec, .. } => Some(*prec),
        }
    }

    /// Precision used when this element seeds a constant.
    pub fn working_precision(&self) -> i64 {
        self.precision().unwrap_or(DEFAULT_PRECISION)
    }

    pub fn norm(&self) -> Norm {
        if self.is_zero() {
            Norm::zero(self.field.p)
        } else {
            Norm::from_valuation(self.field.p, self.valuation().expect("nonzero"))
        }
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.valuation() == Some(0)
    }

    /// Multiplication by `π^k`.
    pub fn shift(&self, k: i64) -> Self {
        match &self.kind {
            Kind::ExactZero => self.clone(),
            Kind::Approx { val, prec, unit } => {
                LocalFieldElement { field: self.field, kind: Kind::Approx { val: val + k, prec: prec + k, unit: unit.clone() } }
            }
        }
    }

    /// Lowers the precision to at most `cap`.
    pub fn with_precision_cap(&self, cap: i64) -> Self {
        match &self.kind {
            Kind::ExactZero => Self::zero_mod(self.field, cap),
            Kind::Approx { val, prec, unit } => {
                if *prec <= cap {
                    return self.clone();
                }
                if *val >= cap {
                    return Self::zero_mod(self.field, cap);
                }
                let unit = match unit {
                    Digits::Int(r) => Digits::Int(r % pow_p(self.field.p, cap - val)),
                    Digits::Ser(c) => Digits::Ser(c[..(cap - val) as usize].to_vec()),
                };
                LocalFieldElement { field: self.field, kind: Kind::Approx { val: *val, prec: cap, unit } }
            }
        }
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DescriptorMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    /// Coefficient of `π^i` in the canonical expansion (digits for ℚ_p).
    pub fn digit(&self, i: i64) -> u32 {
        match &self.kind {
            Kind::ExactZero => 0,
            Kind::Approx { val, prec, unit } => {
                if i < *val || i >= *prec {
                    return 0;
                }
                match unit {
                    Digits::Int(r) => {
                        let s = r / pow_p(self.field.p, i - val) % BigUint::from(self.field.p);
                        s.to_u32().unwrap_or(0)
                    }
                    Digits::Ser(c) => c[(i - val) as usize],
                }
            }
        }
    }

    /// Integer representative in `[0, p^k)` of an element of ℤ_p modulo `p^k`.
    pub fn residue_bigint(&self, k: i64) -> Result<BigUint> {
        if self.field.family != Family::Padic {
            return Err(Error::InvalidArgument("integer residue of a Laurent element".into()));
        }
        match &self.kind {
            Kind::ExactZero => Ok(BigUint::zero()),
            Kind::Approx { val, prec, unit } => {
                if *prec < k {
                    return Err(Error::PrecisionExhausted(format!("need {k} digits, have {prec}")));
                }
                if *val < 0 {
                    return Err(Error::InvalidArgument("negative valuation".into()));
                }
                if val >= &k {
                    return Ok(BigUint::zero());
                }
                let Digits::Int(r) = unit else { unreachable!() };
                Ok((r * pow_p(self.field.p, *val)) % pow_p(self.field.p, k))
            }
        }
    }

    /// Signed integer closest to zero representing this element modulo `p^prec`.
    pub fn to_bigint_balanced(&self) -> Option<BigInt> {
        let prec = self.precision()?;
        let r = BigInt::from(self.residue_bigint(prec).ok()?);
        let m = BigInt::from(pow_p(self.field.p, prec));
        if &r * 2 > m {
            Some(r - m)
        } else {
            Some(r)
        }
    }

    /// Coefficients `c_0..c_{k-1}` of a Laurent element of nonnegative valuation.
    pub fn series_coeffs(&self, k: i64) -> Result<Vec<u32>> {
        if let Some(prec) = self.precision() {
            if prec < k {
                return Err(Error::PrecisionExhausted(format!("need {k} terms, have {prec}")));
            }
        }
        if let Some(v) = self.valuation() {
            if v < 0 && !self.is_zero() {
                return Err(Error::InvalidArgument("negative valuation".into()));
            }
        }
        Ok((0..k).map(|i| self.digit(i)).collect())
    }

    fn aligned_int(&self, base: i64, top: i64) -> BigUint {
        match &self.kind {
            Kind::ExactZero => BigUint::zero(),
            Kind::Approx { val, unit: Digits::Int(r), .. } => {
                if *val >= top {
                    BigUint::zero()
                } else {
                    (r * pow_p(self.field.p, val - base)) % pow_p(self.field.p, top - base)
                }
            }
            _ => unreachable!(),
        }
    }

    fn aligned_ser(&self, base: i64, top: i64) -> Vec<u32> {
        let mut out = vec![0u32; (top - base).max(0) as usize];
        if let Kind::Approx { val, unit: Digits::Ser(c), .. } = &self.kind {
            for (i, &d) in c.iter().enumerate() {
                let e = val + i as i64;
                if e >= base && e < top {
                    out[(e - base) as usize] = d;
                }
            }
        }
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let (pa, pb) = (self.precision(), other.precision());
        let prec = match (pa, pb) {
            (None, None) => return Ok(self.clone()),
            (None, Some(_)) => return Ok(other.clone()),
            (Some(_), None) => return Ok(self.clone()),
            (Some(a), Some(b)) => a.min(b),
        };
        let base = self.valuation().unwrap().min(other.valuation().unwrap()).min(prec);
        if base >= prec {
            return Ok(Self::zero_mod(self.field, prec));
        }
        match self.field.family {
            Family::Padic => {
                let s = self.aligned_int(base, prec) + other.aligned_int(base, prec);
                Ok(Self::from_int_digits(self.field, base, prec, s))
            }
            Family::Laurent => {
                let f = self.field.fq();
                let a = self.aligned_ser(base, prec);
                let b = other.aligned_ser(base, prec);
                let c = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
                Ok(Self::from_series(self.field, base, c))
            }
        }
    }

    pub fn checked_neg(&self) -> Self {
        match &self.kind {
            Kind::ExactZero => self.clone(),
            Kind::Approx { val, prec, unit } => {
                if val >= prec {
                    return self.clone();
                }
                let unit = match unit {
                    Digits::Int(r) => {
                        let m = pow_p(self.field.p, prec - val);
                        Digits::Int((&m - r) % &m)
                    }
                    Digits::Ser(c) => {
                        let f = self.field.fq();
                        Digits::Ser(c.iter().map(|&x| f.neg(x)).collect())
                    }
                };
                LocalFieldElement { field: self.field, kind: Kind::Approx { val: *val, prec: *prec, unit } }
            }
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.checked_neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let (Kind::Approx { val: va, prec: pa, unit: ua }, Kind::Approx { val: vb, prec: pb, unit: ub }) = (&self.kind, &other.kind) else {
            return Ok(Self::zero(self.field));
        };
        let val = va + vb;
        let prec = (va + pb).min(vb + pa);
        if val >= prec {
            return Ok(Self::zero_mod(self.field, prec));
        }
        let rel = prec - val;
        match (ua, ub) {
            (Digits::Int(a), Digits::Int(b)) => {
                let r = (a * b) % pow_p(self.field.p, rel);
                Ok(Self::from_int_digits(self.field, val, prec, r))
            }
            (Digits::Ser(a), Digits::Ser(b)) => {
                let f = self.field.fq();
                let n = rel as usize;
                let mut c = vec![0u32; n];
                for (i, &x) in a.iter().enumerate().take(n) {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in b.iter().enumerate().take(n - i) {
                        if y != 0 {
                            c[i + j] = f.add(c[i + j], f.mul(x, y));
                        }
                    }
                }
                Ok(Self::from_series(self.field, val, c))
            }
            _ => unreachable!(),
        }
    }

    /// Inverse of a unit.
    ///
    /// Units congruent to 1 use the geometric series `1 + Σ (1-a)^l`; other units are
    /// first scaled by the inverse of their leading digit.
    pub fn inv_unit(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = self.valuation().unwrap();
        if v != 0 {
            return Err(Error::NonUnit(v));
        }
        let prec = self.precision().unwrap();
        match self.field.family {
            Family::Padic => {
                let m = pow_p(self.field.p, prec);
                let a = BigInt::from(self.residue_bigint(prec)?);
                let r = if a.mod_floor(&BigInt::from(self.field.p)).is_one() {
                    self.geometric_inverse()?
                } else {
                    let g = a.extended_gcd(&BigInt::from(m.clone()));
                    let x = g.x.mod_floor(&BigInt::from(m));
                    Self::from_bigint(self.field, &x, prec)
                };
                Ok(r)
            }
            Family::Laurent => {
                let f = self.field.fq();
                let c0 = self.digit(0);
                let c0inv = f.inv(c0).ok_or(Error::DivisionByZero)?;
                let scale = Self::from_series(self.field, 0, {
                    let mut c = vec![0u32; prec as usize];
                    c[0] = c0inv;
                    c
                });
                let normalized = self.checked_mul(&scale)?;
                normalized.geometric_inverse()?.checked_mul(&scale)
            }
        }
    }

    /// `a^{-1} = Σ_{l≥0} (1-a)^l` for `|a - 1| < 1`.
    fn geometric_inverse(&self) -> Result<Self> {
        let prec = self.precision().unwrap();
        let one = Self::one(self.field, prec);
        let y = one.checked_sub(self)?;
        let mut acc = one.clone();
        let mut term = one;
        if y.is_zero() {
            return Ok(acc);
        }
        let vy = y.valuation().unwrap().max(1);
        for _ in 0..(prec / vy + 1) {
            term = term.checked_mul(&y)?;
            if term.is_zero() {
                break;
            }
            acc = acc.checked_add(&term)?;
        }
        Ok(acc.with_precision_cap(prec))
    }

    /// Division; consumes `valuation(other)` units of precision budget.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = other.valuation().unwrap();
        let unit = other.shift(-v).inv_unit()?;
        Ok(self.checked_mul(&unit)?.shift(-v))
    }

    pub fn pow(&self, e: u32) -> Self {
        let prec = self.working_precision();
        let mut acc = Self::one(self.field, prec.max(1));
        if e == 0 {
            return acc;
        }
        let mut base = self.clone();
        let mut e = e;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { base.clone() } else { &acc * &base };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Equality modulo `π^k`.
    pub fn eq_mod(&self, other: &Self, k: i64) -> bool {
        match self.checked_sub(other) {
            Ok(d) => d.is_zero() || d.valuation().unwrap() >= k,
            Err(_) => false,
        }
    }

    /// Digits `d_0..d_{k-1}` as literal text in the crate's textual format.
    pub fn to_literal(&self) -> String {
        let p = self.field.p;
        match self.field.family {
            Family::Padic => {
                let body = match &self.kind {
                    Kind::ExactZero => "0".to_string(),
                    Kind::Approx { val, prec, .. } => {
                        let lo = (*val).min(0);
                        let digits: Vec<String> = (lo..*prec).rev().map(|i| self.digit(i).to_string()).collect();
                        let sep = if p > 10 { "," } else { "" };
                        let mut s = format!("…{}", digits.join(sep));
                        if lo < 0 {
                            s.push_str(&format!("e{lo}"));
                        }
                        s
                    }
                };
                format!("p={p}:{body}")
            }
            Family::Laurent => {
                let f = self.field.fq();
                let mut terms = Vec::new();
                if let Kind::Approx { val, prec, .. } = &self.kind {
                    for i in *val..*prec {
                        let c = self.digit(i);
                        if c == 0 {
                            continue;
                        }
                        let cs = if self.field.u == 1 { c.to_string() } else { format!("{:?}", f.coefficients(c)) };
                        terms.push(match i {
                            0 => cs,
                            1 => format!("{cs}*t"),
                            _ => format!("{cs}*t^{i}"),
                        });
                    }
                    terms.push(format!("O(t^{prec})"));
                } else {
                    terms.push("0".into());
                }
                format!("p={p},u={}:{}", self.field.u, terms.join("+"))
            }
        }
    }
}

impl PartialEq for LocalFieldElement {
    /// Equality at the common precision of both operands.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.checked_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for LocalFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.family == Family::Padic {
            if let Some(n) = self.to_bigint_balanced() {
                if n.abs() < BigInt::from(1_000_000u32) && self.valuation().map_or(true, |v| v >= 0) {
                    return write!(f, "{n} + O({}^{})", self.field.p, self.precision().unwrap());
                }
            }
        }
        write!(f, "{}", self.to_literal())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a LocalFieldElement> for &'a LocalFieldElement {
            type Output = LocalFieldElement;
            /// Panics on descriptor mismatch; use the `checked_*` form to get an error instead.
            fn $m(self, rhs: &'a LocalFieldElement) -> LocalFieldElement {
                self.$checked(rhs).expect("descriptor mismatch")
            }
        }
        impl $tr for LocalFieldElement {
            type Output = LocalFieldElement;
            fn $m(self, rhs: LocalFieldElement) -> LocalFieldElement {
                (&self).$checked(&rhs).expect("descriptor mismatch")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &LocalFieldElement {
    type Output = LocalFieldElement;
    fn neg(self) -> LocalFieldElement {
        self.checked_neg()
    }
}

impl Neg for LocalFieldElement {
    type Output = LocalFieldElement;
    fn neg(self) -> LocalFieldElement {
        self.checked_neg()
    }
}
