//! Exact arithmetic in a tower `Q(s_1, ..., s_k)`.
//!
//! Each adjoined symbol adds one layer on top of the field generated by the
//! previous ones. A transcendental layer stores a reduced fraction `num/den`
//! of polynomials in the symbol (coprime, `den` monic); an algebraic layer
//! stores a polynomial reduced modulo the monic minimal polynomial. Every
//! element is kept at the lowest layer that can hold it, so structural
//! equality is field equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::panic::{self, AssertUnwindSafe};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::upoly::{self, UPoly};
use crate::error::{Error, Result};

pub type Rational = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Transcendental,
    /// Monic minimal polynomial over Q, ascending coefficients.
    Algebraic { minpoly: Vec<Rational> },
}

#[derive(Debug)]
pub struct Symbol {
    name: String,
    level: usize,
    kind: SymbolKind,
    seed: Rational,
    radius: Rational,
    /// Isolating interval for algebraic symbols, refined lazily and keyed by
    /// the precision it satisfies.
    pub(crate) refined: Mutex<BTreeMap<u32, (Rational, Rational)>>,
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.name == other.name
    }
}

impl Eq for Symbol {}

impl Symbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// One-based position in the tower.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn seed(&self) -> &Rational {
        &self.seed
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn minpoly(&self) -> Option<&[Rational]> {
        match &self.kind {
            SymbolKind::Algebraic { minpoly } => Some(minpoly),
            SymbolKind::Transcendental => None,
        }
    }

    /// Rational stand-in for a transcendental symbol: its seed rounded to a
    /// prime denominator, offset by the level so distinct symbols differ.
    pub(crate) fn specialization_point(&self) -> Rational {
        let den = BigInt::from(1009);
        let n = (&self.seed * Rational::from_integer(den.clone())).round().to_integer();
        Rational::new(n + BigInt::from(self.level as i64 + 1), den)
    }

    fn minpoly_fe(&self) -> UPoly {
        self.minpoly()
            .expect("algebraic symbol")
            .iter()
            .map(|c| Fe::rat(c.clone()))
            .collect()
    }
}

/// The ordered list of adjoined symbols.
#[derive(Clone, Debug, Default)]
pub struct Tower {
    symbols: Vec<Arc<Symbol>>,
}

impl Tower {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn symbols(&self) -> &[Arc<Symbol>] {
        &self.symbols
    }

    pub fn get(&self, name: &str) -> Option<Fe> {
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .map(|s| Fe::generator(s.clone()))
    }

    fn check_name(&self, name: &str) -> Result<()> {
        if self.symbols.iter().any(|s| s.name == name) {
            return Err(Error::InvalidConstant(format!("`{name}` declared twice")));
        }
        if matches!(name, "x" | "y" | "X" | "Y" | "Z") {
            return Err(Error::InvalidConstant(format!("`{name}` is reserved for a variable")));
        }
        Ok(())
    }

    pub fn declare_transcendental(&mut self, name: &str, approx: &str) -> Result<Fe> {
        self.check_name(name)?;
        let (seed, radius) = parse_decimal(approx)?;
        let sym = Arc::new(Symbol {
            name: name.to_string(),
            level: self.symbols.len() + 1,
            kind: SymbolKind::Transcendental,
            seed,
            radius,
            refined: Mutex::new(BTreeMap::new()),
        });
        self.symbols.push(sym.clone());
        Ok(Fe::generator(sym))
    }

    /// `minpoly` is ascending; it is made monic here. The approximation picks
    /// which real root the symbol denotes.
    pub fn declare_algebraic(&mut self, name: &str, minpoly: &[Rational], approx: &str) -> Result<Fe> {
        self.check_name(name)?;
        let mut mp: Vec<Rational> = minpoly.to_vec();
        while mp.last().is_some_and(Zero::is_zero) {
            mp.pop();
        }
        if mp.len() < 3 {
            return Err(Error::InvalidConstant(format!(
                "minimal polynomial of `{name}` must have degree at least 2"
            )));
        }
        let lc = mp.last().unwrap().clone();
        for c in mp.iter_mut() {
            *c = &*c / &lc;
        }
        if !super::roots::rational_roots(&mp).is_empty() {
            return Err(Error::InvalidConstant(format!(
                "minimal polynomial of `{name}` has a rational root"
            )));
        }
        if super::roots::qpoly_gcd(&mp, &super::roots::qpoly_derivative(&mp)).len() > 1 {
            return Err(Error::InvalidConstant(format!(
                "minimal polynomial of `{name}` is not squarefree"
            )));
        }
        let (seed, radius) = parse_decimal(approx)?;
        let (lo, hi) = super::roots::isolate_near(&mp, &seed, &radius).ok_or_else(|| {
            Error::InvalidConstant(format!(
                "approximation of `{name}` does not single out one real root of its minimal polynomial"
            ))
        })?;
        let mut refined = BTreeMap::new();
        refined.insert(0, (lo, hi));
        let sym = Arc::new(Symbol {
            name: name.to_string(),
            level: self.symbols.len() + 1,
            kind: SymbolKind::Algebraic { minpoly: mp },
            seed,
            radius,
            refined: Mutex::new(refined),
        });
        self.symbols.push(sym.clone());
        Ok(Fe::generator(sym))
    }
}

/// Decimal literal to an exact rational plus one unit of its last digit.
pub fn parse_decimal(text: &str) -> Result<(Rational, Rational)> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::InvalidConstant(format!("`{text}` is not a decimal number")));
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().unwrap() / 10;
    let scale = BigInt::from(10).pow(frac_part.len() as u32);
    let mut value = Rational::new(digits, scale.clone());
    if neg {
        value = -value;
    }
    let radius = Rational::new(BigInt::one(), scale);
    Ok((value, radius))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fe(pub(crate) Repr);

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Repr {
    Rat(Rational),
    Trans { sym: Arc<Symbol>, num: UPoly, den: UPoly },
    Alg { sym: Arc<Symbol>, coeffs: UPoly },
}

/// Panic payload raised when an algebraic layer meets a zero divisor.
/// [`guard`] turns it back into [`Error::NonInvertible`].
#[derive(Debug)]
pub struct NonInvertiblePanic(pub String);

/// Runs `f`, converting a non-invertibility panic from deep inside the field
/// arithmetic into an error value.
pub fn guard<T>(f: impl FnOnce() -> Result<T>) -> Result<T> {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(payload) => match payload.downcast::<NonInvertiblePanic>() {
            Ok(p) => Err(Error::NonInvertible { symbol: p.0 }),
            Err(other) => panic::resume_unwind(other),
        },
    }
}

impl Fe {
    pub fn zero() -> Fe {
        Fe(Repr::Rat(Rational::zero()))
    }

    pub fn one() -> Fe {
        Fe(Repr::Rat(Rational::one()))
    }

    pub fn from_int(n: i64) -> Fe {
        Fe(Repr::Rat(Rational::from_integer(BigInt::from(n))))
    }

    pub fn rat(r: Rational) -> Fe {
        Fe(Repr::Rat(r))
    }

    pub fn frac(n: i64, d: i64) -> Fe {
        Fe::rat(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn generator(sym: Arc<Symbol>) -> Fe {
        let x = vec![Fe::zero(), Fe::one()];
        match sym.kind {
            SymbolKind::Transcendental => Fe(Repr::Trans { sym, num: x, den: vec![Fe::one()] }),
            SymbolKind::Algebraic { .. } => Fe(Repr::Alg { sym, coeffs: x }),
        }
    }

    /// Builds `num/den` in the layer of `sym` and normalizes it. Coefficients
    /// must live strictly below that layer.
    pub fn trans_fraction(sym: Arc<Symbol>, num: UPoly, den: UPoly) -> Result<Fe> {
        assert!(matches!(sym.kind, SymbolKind::Transcendental));
        let mut d = den;
        upoly::trim(&mut d);
        if d.is_empty() {
            return Err(Error::DivisionByZero);
        }
        guard(|| Ok(trans_normalize(sym, num, d)))
    }

    /// Builds `sum coeffs[i] * sym^i` reduced modulo the minimal polynomial.
    pub fn alg_poly(sym: Arc<Symbol>, coeffs: UPoly) -> Fe {
        assert!(matches!(sym.kind, SymbolKind::Algebraic { .. }));
        alg_reduce(sym, coeffs)
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_one())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Layer index; 0 for rationals.
    pub fn level(&self) -> usize {
        match &self.0 {
            Repr::Rat(_) => 0,
            Repr::Trans { sym, .. } | Repr::Alg { sym, .. } => sym.level,
        }
    }

    pub fn top_symbol(&self) -> Option<&Arc<Symbol>> {
        match &self.0 {
            Repr::Rat(_) => None,
            Repr::Trans { sym, .. } | Repr::Alg { sym, .. } => Some(sym),
        }
    }

    /// Rough bit size, used to pick cheap pivots.
    pub fn size(&self) -> usize {
        match &self.0 {
            Repr::Rat(r) => (r.numer().bits() + r.denom().bits()) as usize,
            Repr::Trans { num, den, .. } => {
                16 + num.iter().chain(den.iter()).map(Fe::size).sum::<usize>()
            }
            Repr::Alg { coeffs, .. } => 16 + coeffs.iter().map(Fe::size).sum::<usize>(),
        }
    }

    pub fn try_inv(&self) -> Result<Fe> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        guard(|| Ok(self.inv()))
    }

    /// Multiplicative inverse. Panics on zero; panics with
    /// [`NonInvertiblePanic`] when an algebraic layer is not a field.
    pub fn inv(&self) -> Fe {
        match &self.0 {
            Repr::Rat(r) => {
                assert!(!r.is_zero(), "division by zero in the coefficient field");
                Fe::rat(r.recip())
            }
            Repr::Trans { sym, num, den } => {
                let li = num.last().unwrap().inv();
                trans_unchecked(sym.clone(), upoly::scale(den, &li), upoly::scale(num, &li))
            }
            Repr::Alg { sym, coeffs } => {
                let (g, s) = upoly::half_xgcd(coeffs, &sym.minpoly_fe());
                if g.len() != 1 {
                    panic::panic_any(NonInvertiblePanic(sym.name.clone()));
                }
                alg_reduce(sym.clone(), s)
            }
        }
    }

    pub fn pow(&self, mut e: u32) -> Fe {
        let mut base = self.clone();
        let mut acc = Fe::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// A square root inside the tower when one is easy to certify: rational
    /// squares, and rational multiples of a declared square root.
    pub fn sqrt_in_tower(&self, tower_syms: &[Arc<Symbol>]) -> Option<Fe> {
        let r = self.as_rational()?;
        if r.is_zero() {
            return Some(Fe::zero());
        }
        if let Some(s) = rational_sqrt(r) {
            return Some(Fe::rat(s));
        }
        for sym in tower_syms {
            if let Some(mp) = sym.minpoly() {
                if mp.len() == 3 && mp[1].is_zero() {
                    let k = -&mp[0];
                    if let Some(q) = rational_sqrt(&(r / &k)) {
                        return Some(&Fe::rat(q) * &Fe::generator(sym.clone()));
                    }
                }
            }
        }
        None
    }

    /// Image under the ring map sending every transcendental symbol to a
    /// fixed rational near its seed; algebraic layers are kept. `None` when a
    /// denominator vanishes at that point.
    pub fn specialize_transcendentals(&self) -> Option<Fe> {
        match &self.0 {
            Repr::Rat(_) => Some(self.clone()),
            Repr::Alg { sym, coeffs } => {
                let c: Option<UPoly> = coeffs.iter().map(Fe::specialize_transcendentals).collect();
                Some(alg_unchecked(sym.clone(), c?))
            }
            Repr::Trans { sym, num, den } => {
                let at = Fe::rat(sym.specialization_point());
                let eval = |p: &UPoly| -> Option<Fe> {
                    let mut acc = Fe::zero();
                    for c in p.iter().rev() {
                        acc = &(&acc * &at) + &c.specialize_transcendentals()?;
                    }
                    Some(acc)
                };
                let d = eval(den)?;
                if d.is_zero() {
                    return None;
                }
                Some(&eval(num)? / &d)
            }
        }
    }

    fn components_into(vals: &[Fe], out: &mut Vec<Vec<Rational>>) {
        let top = vals.iter().filter_map(Fe::top_symbol).max_by_key(|s| s.level).cloned();
        let Some(sym) = top else {
            out.push(vals.iter().map(|v| v.as_rational().unwrap().clone()).collect());
            return;
        };
        match sym.kind {
            SymbolKind::Transcendental => {
                let parts: Vec<(UPoly, UPoly)> = vals
                    .iter()
                    .map(|v| match &v.0 {
                        Repr::Trans { sym: s, num, den } if s.level == sym.level => (num.clone(), den.clone()),
                        _ => (vec![v.clone()], vec![Fe::one()]),
                    })
                    .collect();
                let mut lcm = vec![Fe::one()];
                for (_, d) in &parts {
                    let g = upoly::gcd(&lcm, d);
                    lcm = upoly::mul(&lcm, &upoly::div_exact(d, &g));
                }
                let scaled: Vec<UPoly> =
                    parts.iter().map(|(n, d)| upoly::mul(n, &upoly::div_exact(&lcm, d))).collect();
                let deg = scaled.iter().map(Vec::len).max().unwrap_or(0);
                for k in 0..deg {
                    let col: Vec<Fe> = scaled.iter().map(|p| p.get(k).cloned().unwrap_or_else(Fe::zero)).collect();
                    Fe::components_into(&col, out);
                }
            }
            SymbolKind::Algebraic { ref minpoly } => {
                let n = minpoly.len() - 1;
                for k in 0..n {
                    let col: Vec<Fe> = vals
                        .iter()
                        .map(|v| match &v.0 {
                            Repr::Alg { sym: s, coeffs } if s.level == sym.level => {
                                coeffs.get(k).cloned().unwrap_or_else(Fe::zero)
                            }
                            _ if k == 0 => v.clone(),
                            _ => Fe::zero(),
                        })
                        .collect();
                    Fe::components_into(&col, out);
                }
            }
        }
    }
}

/// For a vector `v` over the tower, rational vectors `w_1..w_m` such that for
/// every rational `t`, `sum v_i t^i = 0` iff `sum w_{j,i} t^i = 0` for all `j`.
pub fn rational_components(v: &[Fe]) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    Fe::components_into(v, &mut out);
    out
}

pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

fn trans_unchecked(sym: Arc<Symbol>, mut num: UPoly, den: UPoly) -> Fe {
    upoly::trim(&mut num);
    if num.is_empty() {
        return Fe::zero();
    }
    if num.len() == 1 && upoly::is_one(&den) {
        return num.pop().unwrap();
    }
    Fe(Repr::Trans { sym, num, den })
}

fn trans_normalize(sym: Arc<Symbol>, mut num: UPoly, mut den: UPoly) -> Fe {
    upoly::trim(&mut num);
    upoly::trim(&mut den);
    assert!(!den.is_empty(), "zero denominator");
    if num.is_empty() {
        return Fe::zero();
    }
    if den.len() > 1 {
        let g = upoly::gcd(&num, &den);
        if g.len() > 1 {
            num = upoly::div_exact(&num, &g);
            den = upoly::div_exact(&den, &g);
        }
    }
    let lc = den.last().unwrap().clone();
    if !lc.is_one() {
        let li = lc.inv();
        num = upoly::scale(&num, &li);
        den = upoly::scale(&den, &li);
    }
    trans_unchecked(sym, num, den)
}

fn alg_unchecked(sym: Arc<Symbol>, mut coeffs: UPoly) -> Fe {
    upoly::trim(&mut coeffs);
    match coeffs.len() {
        0 => Fe::zero(),
        1 => coeffs.pop().unwrap(),
        _ => Fe(Repr::Alg { sym, coeffs }),
    }
}

fn alg_reduce(sym: Arc<Symbol>, coeffs: UPoly) -> Fe {
    let mp = sym.minpoly_fe();
    let r = if coeffs.len() >= mp.len() { upoly::rem(&coeffs, &mp) } else { coeffs };
    alg_unchecked(sym, r)
}

fn add_const(top: &Fe, c: &Fe) -> Fe {
    if c.is_zero() {
        return top.clone();
    }
    match &top.0 {
        Repr::Trans { sym, num, den } => {
            let n = upoly::add(num, &upoly::scale(den, c));
            trans_unchecked(sym.clone(), n, den.clone())
        }
        Repr::Alg { sym, coeffs } => {
            let mut v = coeffs.clone();
            v[0] = &v[0] + c;
            alg_unchecked(sym.clone(), v)
        }
        Repr::Rat(_) => unreachable!(),
    }
}

fn mul_const(top: &Fe, c: &Fe) -> Fe {
    if c.is_zero() {
        return Fe::zero();
    }
    if c.is_one() {
        return top.clone();
    }
    match &top.0 {
        Repr::Trans { sym, num, den } => Fe(Repr::Trans { sym: sym.clone(), num: upoly::scale(num, c), den: den.clone() }),
        Repr::Alg { sym, coeffs } => Fe(Repr::Alg { sym: sym.clone(), coeffs: upoly::scale(coeffs, c) }),
        Repr::Rat(_) => unreachable!(),
    }
}

fn add_fe(a: &Fe, b: &Fe) -> Fe {
    if let (Repr::Rat(x), Repr::Rat(y)) = (&a.0, &b.0) {
        return Fe::rat(x + y);
    }
    let (la, lb) = (a.level(), b.level());
    if la > lb {
        return add_const(a, b);
    }
    if lb > la {
        return add_const(b, a);
    }
    match (&a.0, &b.0) {
        (Repr::Trans { sym, num: n1, den: d1 }, Repr::Trans { num: n2, den: d2, .. }) => {
            if d1 == d2 {
                if upoly::is_one(d1) {
                    trans_unchecked(sym.clone(), upoly::add(n1, n2), d1.clone())
                } else {
                    trans_normalize(sym.clone(), upoly::add(n1, n2), d1.clone())
                }
            } else {
                let n = upoly::add(&upoly::mul(n1, d2), &upoly::mul(n2, d1));
                trans_normalize(sym.clone(), n, upoly::mul(d1, d2))
            }
        }
        (Repr::Alg { sym, coeffs: c1 }, Repr::Alg { coeffs: c2, .. }) => alg_unchecked(sym.clone(), upoly::add(c1, c2)),
        _ => unreachable!("mismatched layers"),
    }
}

fn mul_fe(a: &Fe, b: &Fe) -> Fe {
    if let (Repr::Rat(x), Repr::Rat(y)) = (&a.0, &b.0) {
        return Fe::rat(x * y);
    }
    let (la, lb) = (a.level(), b.level());
    if la > lb {
        return mul_const(a, b);
    }
    if lb > la {
        return mul_const(b, a);
    }
    match (&a.0, &b.0) {
        (Repr::Trans { sym, num: n1, den: d1 }, Repr::Trans { num: n2, den: d2, .. }) => {
            if upoly::is_one(d1) && upoly::is_one(d2) {
                trans_unchecked(sym.clone(), upoly::mul(n1, n2), d1.clone())
            } else {
                // cross-cancel so the product is already reduced
                let g1 = upoly::gcd(n1, d2);
                let g2 = upoly::gcd(n2, d1);
                let (n1, d2) = if g1.len() > 1 { (upoly::div_exact(n1, &g1), upoly::div_exact(d2, &g1)) } else { (n1.clone(), d2.clone()) };
                let (n2, d1) = if g2.len() > 1 { (upoly::div_exact(n2, &g2), upoly::div_exact(d1, &g2)) } else { (n2.clone(), d1.clone()) };
                let num = upoly::mul(&n1, &n2);
                let den = upoly::mul(&d1, &d2);
                let lc = den.last().unwrap().clone();
                if lc.is_one() {
                    trans_unchecked(sym.clone(), num, den)
                } else {
                    let li = lc.inv();
                    trans_unchecked(sym.clone(), upoly::scale(&num, &li), upoly::scale(&den, &li))
                }
            }
        }
        (Repr::Alg { sym, coeffs: c1 }, Repr::Alg { coeffs: c2, .. }) => alg_reduce(sym.clone(), upoly::mul(c1, c2)),
        _ => unreachable!("mismatched layers"),
    }
}

fn neg_fe(a: &Fe) -> Fe {
    match &a.0 {
        Repr::Rat(r) => Fe::rat(-r),
        Repr::Trans { sym, num, den } => Fe(Repr::Trans { sym: sym.clone(), num: upoly::neg(num), den: den.clone() }),
        Repr::Alg { sym, coeffs } => Fe(Repr::Alg { sym: sym.clone(), coeffs: upoly::neg(coeffs) }),
    }
}

impl Add<&Fe> for &Fe {
    type Output = Fe;
    fn add(self, rhs: &Fe) -> Fe {
        add_fe(self, rhs)
    }
}

impl Sub<&Fe> for &Fe {
    type Output = Fe;
    fn sub(self, rhs: &Fe) -> Fe {
        add_fe(self, &neg_fe(rhs))
    }
}

impl Mul<&Fe> for &Fe {
    type Output = Fe;
    fn mul(self, rhs: &Fe) -> Fe {
        mul_fe(self, rhs)
    }
}

impl Div<&Fe> for &Fe {
    type Output = Fe;
    fn div(self, rhs: &Fe) -> Fe {
        mul_fe(self, &rhs.inv())
    }
}

impl Neg for &Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        neg_fe(self)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Fe> for Fe {
            type Output = Fe;
            fn $m(self, rhs: Fe) -> Fe {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Fe> for Fe {
            type Output = Fe;
            fn $m(self, rhs: &Fe) -> Fe {
                (&self).$m(rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        neg_fe(&self)
    }
}

impl AddAssign<&Fe> for Fe {
    fn add_assign(&mut self, rhs: &Fe) {
        *self = add_fe(self, rhs);
    }
}

impl SubAssign<&Fe> for Fe {
    fn sub_assign(&mut self, rhs: &Fe) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Fe> for Fe {
    fn mul_assign(&mut self, rhs: &Fe) {
        *self = mul_fe(self, rhs);
    }
}

impl From<i64> for Fe {
    fn from(n: i64) -> Fe {
        Fe::from_int(n)
    }
}

impl From<Rational> for Fe {
    fn from(r: Rational) -> Fe {
        Fe::rat(r)
    }
}

impl From<BigInt> for Fe {
    fn from(n: BigInt) -> Fe {
        Fe::rat(Rational::from_integer(n))
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when the rendering is a single signed product with no `+`/`-`
/// between terms, so it can be used as a factor without parentheses.
pub(crate) fn is_atomic_text(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut depth = 0i32;
    for ch in body.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' | '/' if depth == 0 => return false,
            _ => {}
        }
    }
    true
}

/// Renders `sum c_k name^k` in descending powers with no spaces.
pub(crate) fn render_upoly(coeffs: &[Fe], name: &str) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let power = match k {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{k}"),
        };
        push_term(&mut out, c, &power);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Appends `c*mono` to a running sum, handling signs and parentheses.
pub(crate) fn push_term(out: &mut String, c: &Fe, mono: &str) {
    let first = out.is_empty();
    if let Some(r) = c.as_rational() {
        let neg = r.is_negative();
        let a = r.abs();
        if neg {
            out.push('-');
        } else if !first {
            out.push('+');
        }
        if mono.is_empty() {
            out.push_str(&fmt_rational(&a));
        } else if a.is_one() {
            out.push_str(mono);
        } else {
            out.push_str(&fmt_rational(&a));
            out.push('*');
            out.push_str(mono);
        }
        return;
    }
    let text = c.to_string();
    if mono.is_empty() {
        if !first && !text.starts_with('-') {
            out.push('+');
        }
        out.push_str(&text);
        return;
    }
    if !first {
        out.push('+');
    }
    if is_atomic_text(&text) && !text.starts_with('-') {
        out.push_str(&text);
    } else {
        out.push('(');
        out.push_str(&text);
        out.push(')');
    }
    out.push('*');
    out.push_str(mono);
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(r) => f.write_str(&fmt_rational(r)),
            Repr::Trans { sym, num, den } => {
                let n = render_upoly(num, &sym.name);
                if upoly::is_one(den) {
                    f.write_str(&n)
                } else {
                    let d = render_upoly(den, &sym.name);
                    let n = if is_atomic_text(&n) { n } else { format!("({n})") };
                    let d = if is_atomic_text(&d) && !d.contains('*') { d } else { format!("({d})") };
                    write!(f, "{n}/{d}")
                }
            }
            Repr::Alg { sym, coeffs } => f.write_str(&render_upoly(coeffs, &sym.name)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower() -> (Tower, Fe, Fe) {
        let mut t = Tower::new();
        let pi = t.declare_transcendental("pi", "3.14159265358979323846264338327950288419716939937510").unwrap();
        let r2 = t
            .declare_algebraic("r2", &[Rational::from_integer((-2).into()), Rational::zero(), Rational::one()], "1.41421356")
            .unwrap();
        (t, pi, r2)
    }

    #[test]
    fn rational_normalizes() {
        assert_eq!(Fe::frac(2, 4), Fe::frac(1, 2));
        assert_eq!(Fe::frac(2, 4).to_string(), "1/2");
    }

    #[test]
    fn algebraic_square_collapses() {
        let (_, _, r2) = tower();
        assert_eq!(&r2 * &r2, Fe::from_int(2));
    }

    #[test]
    fn transcendental_fraction_cancels() {
        let (_, pi, _) = tower();
        let num = &(&pi * &pi) - &Fe::one();
        let den = &pi - &Fe::one();
        assert_eq!(&num / &den, &pi + &Fe::one());
    }

    #[test]
    fn mixed_inverse_round_trips() {
        let (_, pi, r2) = tower();
        let e = &(&Fe::from_int(3) + &(&Fe::from_int(4) * &pi)) + &r2;
        let inv = e.try_inv().unwrap();
        assert!((&e * &inv).is_one());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(Fe::zero().try_inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn rendering_is_compact() {
        let (_, pi, r2) = tower();
        let e = &(&Fe::from_int(4) + &(&Fe::from_int(8) * &r2)) / &pi;
        assert_eq!(e.to_string(), "(8/pi)*r2+4/pi");
        let d = &Fe::from_int(4) + &(&Fe::from_int(8) * &r2);
        assert_eq!(d.to_string(), "8*r2+4");
    }

    #[test]
    fn non_invertible_layer_is_reported() {
        let mut t = Tower::new();
        let r2 = t
            .declare_algebraic("r2", &[Rational::from_integer((-2).into()), Rational::zero(), Rational::one()], "1.414")
            .unwrap();
        // s^2 - 8 splits over Q(r2); s - 2*r2 is a zero divisor
        let s = t
            .declare_algebraic("s", &[Rational::from_integer((-8).into()), Rational::zero(), Rational::one()], "2.828")
            .unwrap();
        let zd = &s - &(&Fe::from_int(2) * &r2);
        assert!(matches!(zd.try_inv(), Err(Error::NonInvertible { .. })));
    }

    #[test]
    fn components_split_by_symbol() {
        let (_, pi, r2) = tower();
        // (1 + pi) t + r2 : rational roots must kill every component
        let v = vec![r2.clone(), &Fe::one() + &pi];
        let comps = rational_components(&v);
        assert!(comps.len() >= 2);
    }

    #[test]
    fn sqrt_in_tower_finds_multiples_of_declared_roots() {
        let (t, _, r2) = tower();
        let s = Fe::from_int(8).sqrt_in_tower(t.symbols()).unwrap();
        assert_eq!(s, &Fe::from_int(2) * &r2);
        assert!(Fe::from_int(3).sqrt_in_tower(t.symbols()).is_none());
    }
}
