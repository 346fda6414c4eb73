//! Outward-rounded rational intervals enclosing tower elements.
//!
//! Used only for ordering decisions; equality with zero is always decided
//! symbolically first.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::field::{Fe, Rational, Repr, Symbol, SymbolKind};
use super::roots::qpoly_eval;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 64;
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(r: Rational) -> Interval {
        Interval { lo: r.clone(), hi: r }
    }

    pub fn new(lo: Rational, hi: Rational) -> Interval {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    /// Rounds outward to multiples of `2^-bits`.
    pub fn round(&self, bits: u32) -> Interval {
        let scale = Rational::from_integer(BigInt::one() << bits);
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        Interval { lo, hi }
    }

    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

impl Add<&Interval> for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub<&Interval> for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul<&Interval> for &Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

fn symbol_interval(sym: &Symbol, bits: u32) -> Interval {
    match sym.kind() {
        SymbolKind::Transcendental => Interval::new(sym.seed() - sym.radius(), sym.seed() + sym.radius()),
        SymbolKind::Algebraic { minpoly } => {
            let mut cache = sym.refined.lock().expect("symbol cache poisoned");
            if let Some((_, (lo, hi))) = cache.range(bits..).next() {
                return Interval::new(lo.clone(), hi.clone());
            }
            let (_, (lo0, hi0)) = cache.range(..bits).next_back().expect("isolating interval");
            let (mut lo, mut hi) = (lo0.clone(), hi0.clone());
            let target = Rational::new(BigInt::one(), BigInt::one() << bits);
            let slo = qpoly_eval(minpoly, &lo).is_positive();
            let two = Rational::from_integer(BigInt::from(2));
            while &hi - &lo > target {
                let mid = (&lo + &hi) / &two;
                let v = qpoly_eval(minpoly, &mid);
                if v.is_zero() {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                if v.is_positive() == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cache.insert(bits, (lo.clone(), hi.clone()));
            Interval::new(lo, hi)
        }
    }
}

fn horner(coeffs: &[Fe], x: &Interval, bits: u32) -> Option<Interval> {
    let mut acc = Interval::point(Rational::zero());
    for c in coeffs.iter().rev() {
        acc = (&(&acc * x) + &eval_at(c, bits)?).round(bits);
    }
    Some(acc)
}

/// Enclosure at a fixed working precision; `None` when a denominator's
/// enclosure straddles zero.
fn eval_at(e: &Fe, bits: u32) -> Option<Interval> {
    match &e.0 {
        Repr::Rat(r) => Some(Interval::point(r.clone())),
        Repr::Trans { sym, num, den } => {
            let s = symbol_interval(sym, bits);
            let n = horner(num, &s, bits)?;
            let d = horner(den, &s, bits)?;
            Some((&n * &d.recip()?).round(bits))
        }
        Repr::Alg { sym, coeffs } => {
            let s = symbol_interval(sym, bits + 8);
            horner(coeffs, &s, bits)
        }
    }
}

/// Enclosure of `e`, escalating precision when a denominator cannot be
/// separated from zero.
pub fn eval_interval(e: &Fe, bits: u32) -> Result<Interval> {
    let mut b = bits.max(16);
    loop {
        if let Some(iv) = eval_at(e, b) {
            return Ok(iv);
        }
        if b >= DEFAULT_PRECISION_CAP {
            return Err(Error::PrecisionExhausted { bits: b });
        }
        b = (b * 2).min(DEFAULT_PRECISION_CAP);
    }
}

/// Certified sign, doubling precision up to `cap` bits.
pub fn sign(e: &Fe, cap: u32) -> Result<Ordering> {
    if e.is_zero() {
        return Ok(Ordering::Equal);
    }
    if let Some(r) = e.as_rational() {
        return Ok(r.cmp(&Rational::zero()));
    }
    let mut b = DEFAULT_PRECISION;
    loop {
        if let Some(s) = eval_at(e, b).and_then(|iv| iv.sign()) {
            return Ok(s);
        }
        if b >= cap {
            return Err(Error::PrecisionExhausted { bits: cap });
        }
        b = (b * 2).min(cap);
    }
}

pub fn compare(a: &Fe, b: &Fe, cap: u32) -> Result<Ordering> {
    sign(&(a - b), cap)
}

/// Floor of `e` when it can be certified.
pub fn floor(e: &Fe, cap: u32) -> Result<BigInt> {
    if let Some(r) = e.as_rational() {
        return Ok(r.floor().to_integer());
    }
    let mut b = DEFAULT_PRECISION;
    loop {
        if let Some(iv) = eval_at(e, b) {
            let lo = iv.lo.floor().to_integer();
            let hi = iv.hi.floor().to_integer();
            // an exact integer value would make the floor undecidable from
            // the enclosure alone, but it is a rational and handled above
            if lo == hi {
                return Ok(lo);
            }
        }
        if b >= cap {
            return Err(Error::PrecisionExhausted { bits: cap });
        }
        b = (b * 2).min(cap);
    }
}

/// Decimal approximation for display; not used in any decision.
pub fn approx_string(e: &Fe, digits: usize) -> String {
    let bits = (digits as f64 * 3.33) as u32 + 16;
    match eval_interval(e, bits) {
        Ok(iv) => format_decimal(&iv.midpoint(), digits),
        Err(_) => "?".to_string(),
    }
}

pub fn format_decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = (&a * Rational::from_integer(scale.clone())).round().to_integer();
    let int = &scaled / &scale;
    let frac = &scaled % &scale;
    let mut s = format!("{}{}", if neg && !scaled.is_zero() { "-" } else { "" }, int);
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
    }
    s
}
