//! Dense univariate polynomials over [`Fe`], coefficients in ascending order.
//! Used for the tower layers and for one-variable root extraction.

use super::field::Fe;

pub type UPoly = Vec<Fe>;

pub fn trim(v: &mut UPoly) {
    while v.last().is_some_and(Fe::is_zero) {
        v.pop();
    }
}

pub fn degree(v: &[Fe]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

pub fn add(a: &[Fe], b: &[Fe]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    trim(&mut out);
    out
}

pub fn neg(a: &[Fe]) -> UPoly {
    a.iter().map(|c| -c).collect()
}

pub fn sub(a: &[Fe], b: &[Fe]) -> UPoly {
    add(a, &neg(b))
}

pub fn scale(a: &[Fe], c: &Fe) -> UPoly {
    if c.is_zero() {
        return Vec::new();
    }
    if c.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x * c).collect()
}

pub fn mul(a: &[Fe], b: &[Fe]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Fe::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(a: &[Fe], b: &[Fe]) -> (UPoly, UPoly) {
    let db = b.len().checked_sub(1).expect("division by the zero polynomial");
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lc_inv = b[db].inv();
    let mut q = vec![Fe::zero(); r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] * &lc_inv;
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                r[k + j] = &r[k + j] - &(&c * bj);
            }
        }
        q[k] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(a: &[Fe], b: &[Fe]) -> UPoly {
    divrem(a, b).1
}

pub fn monic(a: &[Fe]) -> UPoly {
    match a.last() {
        None => Vec::new(),
        Some(lc) if lc.is_one() => a.to_vec(),
        Some(lc) => scale(a, &lc.inv()),
    }
}

/// Monic gcd; empty when both inputs are zero.
pub fn gcd(a: &[Fe], b: &[Fe]) -> UPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// Returns `(g, s)` with `s*a ≡ g (mod b)` and `g` monic.
pub fn half_xgcd(a: &[Fe], b: &[Fe]) -> (UPoly, UPoly) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0 = vec![Fe::one()];
    let mut s1: UPoly = Vec::new();
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    match r0.last() {
        None => (Vec::new(), Vec::new()),
        Some(lc) => {
            let li = lc.inv();
            (scale(&r0, &li), scale(&s0, &li))
        }
    }
}

pub fn div_exact(a: &[Fe], b: &[Fe]) -> UPoly {
    let (q, r) = divrem(a, b);
    debug_assert!(r.is_empty(), "inexact univariate division");
    q
}

pub fn eval(a: &[Fe], x: &Fe) -> Fe {
    let mut acc = Fe::zero();
    for c in a.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn derivative(a: &[Fe]) -> UPoly {
    let mut out: UPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * &Fe::from_int(i as i64))
        .collect();
    trim(&mut out);
    out
}

pub fn is_one(a: &[Fe]) -> bool {
    a.len() == 1 && a[0].is_one()
}
