//! Roots of univariate polynomials and linear factors of binary forms.
//!
//! Rational roots are found exactly: a tower polynomial vanishes at a
//! rational `t` iff every rational component does, so the candidates are the
//! rational roots of the gcd of those components. Integer roots of the monic
//! transform are isolated with Sturm sequences.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{rational_components, Fe, Rational, Symbol};
use super::poly::Poly;
use super::upoly::{self, UPoly};

pub type QPoly = Vec<Rational>;

fn qtrim(v: &mut QPoly) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

pub fn qpoly_derivative(p: &[Rational]) -> QPoly {
    let mut out: QPoly = p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(BigInt::from(i))).collect();
    qtrim(&mut out);
    out
}

pub fn qpoly_divrem(a: &[Rational], b: &[Rational]) -> (QPoly, QPoly) {
    let mut r = a.to_vec();
    qtrim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &b[db];
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &c * bj;
        }
        q[k] = c;
        r.pop();
        qtrim(&mut r);
    }
    qtrim(&mut q);
    (q, r)
}

/// Monic gcd; empty when both are zero.
pub fn qpoly_gcd(a: &[Rational], b: &[Rational]) -> QPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    qtrim(&mut x);
    qtrim(&mut y);
    while !y.is_empty() {
        let r = qpoly_divrem(&x, &y).1;
        x = y;
        y = r;
    }
    if let Some(lc) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &lc;
        }
    }
    x
}

pub fn qpoly_eval(p: &[Rational], t: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm chain of a squarefree polynomial.
pub fn sturm_chain(p: &[Rational]) -> Vec<QPoly> {
    let mut chain = vec![p.to_vec(), qpoly_derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = qpoly_divrem(&chain[n - 2], &chain[n - 1]).1;
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[QPoly], t: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = sign_of(&qpoly_eval(p, t));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in `(lo, hi]`.
pub fn count_roots(chain: &[QPoly], lo: &Rational, hi: &Rational) -> usize {
    sign_changes(chain, lo).saturating_sub(sign_changes(chain, hi))
}

fn squarefree(p: &[Rational]) -> QPoly {
    let g = qpoly_gcd(p, &qpoly_derivative(p));
    if g.len() <= 1 {
        p.to_vec()
    } else {
        qpoly_divrem(p, &g).0
    }
}

fn to_integer_coeffs(p: &[Rational]) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|c| c / &g).collect()
    }
}

/// Distinct rational roots, ascending.
pub fn rational_roots(p: &[Rational]) -> Vec<Rational> {
    let mut p = p.to_vec();
    qtrim(&mut p);
    if p.len() < 2 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    let lead_zeros = p.iter().take_while(|c| c.is_zero()).count();
    if lead_zeros > 0 {
        roots.push(Rational::zero());
        p.drain(..lead_zeros);
    }
    if p.len() >= 2 {
        let sf = squarefree(&p);
        let ints = to_integer_coeffs(&sf);
        let n = ints.len() - 1;
        let an = ints[n].clone();
        // monic transform: s = an * t
        let mut h: Vec<Rational> = Vec::with_capacity(n + 1);
        for (i, c) in ints.iter().enumerate() {
            if i == n {
                h.push(Rational::one());
            } else {
                h.push(Rational::from_integer(c * an.pow((n - 1 - i) as u32)));
            }
        }
        let bound = h.iter().map(|c| c.abs().to_integer()).max().unwrap() + BigInt::one();
        let chain = sturm_chain(&h);
        let mut found = Vec::new();
        isolate_integers(&chain, &h, -bound.clone() - BigInt::one(), bound, &mut found);
        for s in found {
            roots.push(Rational::new(s, an.clone()));
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn isolate_integers(chain: &[QPoly], h: &[Rational], lo: BigInt, hi: BigInt, out: &mut Vec<BigInt>) {
    let c = count_roots(chain, &Rational::from_integer(lo.clone()), &Rational::from_integer(hi.clone()));
    if c == 0 {
        return;
    }
    if &hi - &lo == BigInt::one() {
        if qpoly_eval(h, &Rational::from_integer(hi.clone())).is_zero() {
            out.push(hi);
        }
        return;
    }
    let mid = (&lo + &hi).div_floor(&BigInt::from(2));
    isolate_integers(chain, h, lo, mid.clone(), out);
    isolate_integers(chain, h, mid, hi, out);
}

/// An interval around `seed` holding exactly one real root, widening the
/// radius tenfold until one is found.
pub fn isolate_near(p: &[Rational], seed: &Rational, radius: &Rational) -> Option<(Rational, Rational)> {
    let sf = squarefree(p);
    let chain = sturm_chain(&sf);
    let ten = Rational::from_integer(BigInt::from(10));
    let mut r = radius.clone();
    for _ in 0..40 {
        let lo = seed - &r;
        let hi = seed + &r;
        match count_roots(&chain, &lo, &hi) {
            0 => r = &r * &ten,
            1 => return Some((lo, hi)),
            _ => return None,
        }
    }
    None
}

/// Roots of a tower polynomial found exactly, with multiplicities, and the
/// cofactor whose roots could not be expressed in the tower.
#[derive(Clone, Debug)]
pub struct UnivariateRoots {
    pub roots: Vec<(Fe, u32)>,
    pub residual: UPoly,
}

pub fn roots_in_field(p: &[Fe], symbols: &[Arc<Symbol>]) -> UnivariateRoots {
    let mut rest = p.to_vec();
    upoly::trim(&mut rest);
    let mut roots: Vec<(Fe, u32)> = Vec::new();
    if rest.len() < 2 {
        return UnivariateRoots { roots, residual: rest };
    }
    let comps = rational_components(&rest);
    let mut g: QPoly = Vec::new();
    for c in &comps {
        g = qpoly_gcd(&g, c);
    }
    for r in rational_roots(&g) {
        let lin = vec![Fe::rat(-r.clone()), Fe::one()];
        let m = strip_factor(&mut rest, &lin);
        if m > 0 {
            roots.push((Fe::rat(r), m));
        }
    }
    match rest.len() {
        2 => {
            let r = -&(&rest[0] / &rest[1]);
            roots.push((r, 1));
            rest = vec![rest[1].clone()];
        }
        3 => {
            let m = upoly::monic(&rest);
            let b = &m[1];
            let c = &m[0];
            let disc = &(b * b) - &(&Fe::from_int(4) * c);
            if let Some(s) = disc.sqrt_in_tower(symbols) {
                let half = Fe::frac(1, 2);
                let r1 = &(&(-b) + &s) * &half;
                let r2 = &(&(-b) - &s) * &half;
                if r1 == r2 {
                    roots.push((r1, 2));
                } else {
                    roots.push((r1, 1));
                    roots.push((r2, 1));
                }
                rest = vec![rest[2].clone()];
            }
        }
        _ => {}
    }
    UnivariateRoots { roots, residual: rest }
}

fn strip_factor(p: &mut UPoly, f: &[Fe]) -> u32 {
    let mut m = 0;
    loop {
        if p.len() < f.len() {
            return m;
        }
        let (q, r) = upoly::divrem(p, f);
        if !r.is_empty() {
            return m;
        }
        *p = q;
        m += 1;
    }
}

/// A point of P^1 normalized to `(1 : t)` or `(0 : 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum P1Point {
    Affine(Fe),
    Infinite,
}

#[derive(Clone, Debug)]
pub struct LinearFactors {
    pub points: Vec<(P1Point, u32)>,
    /// Product of the factors that are not linear over the tower.
    pub residual: Poly,
}

/// Linear factors of a binary form `B(u, v)`: a point `(1 : t)` stands for
/// the factor `v - t u`, the point `(0 : 1)` for `u`.
pub fn linear_point_factors(b: &Poly, symbols: &[Arc<Symbol>]) -> LinearFactors {
    assert_eq!(b.nvars(), 2);
    if b.is_zero() {
        return LinearFactors { points: Vec::new(), residual: b.clone() };
    }
    let mut points = Vec::new();
    let ku = b.min_exponent(0).unwrap_or(0);
    if ku > 0 {
        points.push((P1Point::Infinite, ku));
    }
    let deg = b.total_degree().unwrap();
    // B(1, t), ascending in t
    let mut uni = vec![Fe::zero(); (deg + 1) as usize];
    for (m, c) in b.terms() {
        uni[m.0[1] as usize] = c.clone();
    }
    let found = roots_in_field(&uni, symbols);
    let mut affine: Vec<(P1Point, u32)> = found.roots.into_iter().map(|(t, m)| (P1Point::Affine(t), m)).collect();
    affine.sort_by(|a, b| cmp_points(&a.0, &b.0));
    points.extend(affine);
    let rdeg = found.residual.len().saturating_sub(1) as u32;
    let mut residual = Poly::zero(2);
    for (k, c) in found.residual.iter().enumerate() {
        residual.add_term(super::poly::Monomial(vec![rdeg - k as u32, k as u32]), c.clone());
    }
    LinearFactors { points, residual }
}

/// Deterministic order: `(0:1)` first, then by affine coordinate. Rationals
/// compare numerically; other elements by a numeric enclosure and then text.
pub fn cmp_points(a: &P1Point, b: &P1Point) -> Ordering {
    match (a, b) {
        (P1Point::Infinite, P1Point::Infinite) => Ordering::Equal,
        (P1Point::Infinite, _) => Ordering::Less,
        (_, P1Point::Infinite) => Ordering::Greater,
        (P1Point::Affine(x), P1Point::Affine(y)) => cmp_fe_total(x, y),
    }
}

pub fn cmp_fe_total(x: &Fe, y: &Fe) -> Ordering {
    if x == y {
        return Ordering::Equal;
    }
    if let (Some(a), Some(b)) = (x.as_rational(), y.as_rational()) {
        return a.cmp(b);
    }
    match super::interval::sign(&(x - y), 256) {
        Ok(o) => o,
        Err(_) => x.to_string().cmp(&y.to_string()),
    }
}
