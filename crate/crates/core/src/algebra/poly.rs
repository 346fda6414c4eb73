//! Sparse multivariate polynomials over the tower, terms kept in
//! graded-lex order (total degree first, then lexicographic with the first
//! variable largest).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;

use super::field::{push_term, Fe};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Fe>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Fe) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Fe::one())
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, Fe::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Fe) -> Poly {
        let mut p = Poly::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Fe)>) -> Poly {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Fe)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: Fe) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> Fe {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(Fe::zero)
    }

    pub fn constant_term(&self) -> Fe {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Fe)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Fe {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Fe::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading().map(|(m, _)| m.degree())
    }

    /// Lowest total degree of a term (the multiplicity at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn min_exponent(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.order() == self.total_degree()
    }

    pub fn homogeneous_part(&self, k: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Terms of total degree at most `k`.
    pub fn truncate(&self, k: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Fe) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Scales so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv()),
        }
    }

    pub fn mul_monomial(&self, exps: &[u32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial(m.0.iter().zip(exps).map(|(a, b)| a + b).collect()), c.clone()))
                .collect(),
        }
    }

    /// Divides by `var^k`; `None` unless every term is divisible.
    pub fn div_var_power(&self, var: usize, k: u32) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.0[var] < k {
                return None;
            }
            let mut e = m.0.clone();
            e[var] -= k;
            terms.insert(Monomial(e), c.clone());
        }
        Some(Poly { nvars: self.nvars, terms })
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
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

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m.0[var];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[var] -= 1;
            out.add_term(Monomial(e), c * &Fe::from_int(k as i64));
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Fe) -> Fe) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Applies an injective-or-not exponent map, merging collisions.
    pub fn map_exponents(&self, nvars: usize, f: impl Fn(&[u32]) -> Vec<u32>) -> Poly {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            out.add_term(Monomial(f(&m.0)), c.clone());
        }
        out
    }

    /// Composition: variable `i` replaced by `images[i]`.
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(Poly::nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars()), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Replaces `var` by `var + shift` (a Taylor shift).
    pub fn shift_var(&self, var: usize, shift: &Fe) -> Poly {
        if shift.is_zero() {
            return self.clone();
        }
        let maxk = self.degree_in(var).unwrap_or(0) as usize;
        let mut spow = vec![Fe::one()];
        for i in 1..=maxk {
            let next = &spow[i - 1] * shift;
            spow.push(next);
        }
        let binom = binomials(maxk);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let j = m.0[var] as usize;
            for k in 0..=j {
                let mut e = m.0.clone();
                e[var] = k as u32;
                let coef = &(c * &spow[j - k]) * &Fe::from(binom[j][k].clone());
                out.add_term(Monomial(e), coef);
            }
        }
        out
    }

    /// Sets `var` to the constant `value`, keeping the variable slot.
    pub fn specialize(&self, var: usize, value: &Fe) -> Poly {
        let mut out = Poly::zero(self.nvars);
        let mut cache: BTreeMap<u32, Fe> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.0[var];
            let p = cache.entry(k).or_insert_with(|| value.pow(k)).clone();
            let mut e = m.0.clone();
            e[var] = 0;
            out.add_term(Monomial(e), c * &p);
        }
        out
    }

    /// Drops variable `var` after setting it to 1.
    pub fn dehomogenize(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.remove(var);
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Inserts a new last variable making every term have degree `d`.
    pub fn homogenize(&self, d: u32) -> Poly {
        let mut out = Poly::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let deg = m.degree();
            assert!(deg <= d, "homogenizing below the degree");
            let mut e = m.0.clone();
            e.push(d - deg);
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Reorders/embeds variables: old variable `i` becomes `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Coefficients with respect to `var`; each keeps all variable slots.
    pub fn coeffs_in(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.0[var];
            let mut e = m.0.clone();
            e[var] = 0;
            out.entry(k).or_insert_with(|| Poly::zero(self.nvars)).add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Dense univariate coefficients for a polynomial in `var` only.
    pub fn to_univariate(&self, var: usize) -> Vec<Fe> {
        let d = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Fe::zero(); if self.is_zero() { 0 } else { d + 1 }];
        for (m, c) in &self.terms {
            debug_assert!(m.0.iter().enumerate().all(|(i, &k)| i == var || k == 0));
            out[m.0[var] as usize] = c.clone();
        }
        out
    }

    pub fn from_univariate(nvars: usize, var: usize, coeffs: &[Fe]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[var] = k as u32;
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn eval(&self, point: &[Fe]) -> Fe {
        let mut acc = Fe::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    t = &t * &point[i].pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Exact quotient, or `None` when `g` does not divide `self`.
    pub fn exact_divide(&self, g: &Poly) -> Option<Poly> {
        assert!(!g.is_zero(), "division by the zero polynomial");
        let (gm, gc) = g.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let gi = gc.inv();
        let mut r = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if rm.0.iter().zip(&gm.0).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<u32> = rm.0.iter().zip(&gm.0).map(|(a, b)| a - b).collect();
            let c = &rc * &gi;
            r = &r - &g.mul_monomial(&e).scale(&c);
            q.add_term(Monomial(e), c);
        }
        Some(q)
    }

    /// Text with `names[i]` for variable `i`, leading term first, no spaces.
    pub fn render(&self, names: &[&str]) -> String {
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].to_string() } else { format!("{}^{}", names[i], k) })
                .collect();
            push_term(&mut out, c, &mono.join("*"));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

pub(crate) fn binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut t = vec![vec![BigInt::one()]];
    for i in 1..=n {
        let prev = &t[i - 1];
        let mut row = vec![BigInt::one(); i + 1];
        for k in 1..i {
            row[k] = &prev[k - 1] + &prev[k];
        }
        t.push(row);
    }
    t
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.map_coeffs(|c| -c)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let e: Vec<u32> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(e), c1 * c2);
            }
        }
        out
    }
}

macro_rules! owned_poly_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_poly_ops!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Poly, Poly) {
        (Poly::var(2, 0), Poly::var(2, 1))
    }

    #[test]
    fn grlex_leading_term() {
        let (x, y) = xy();
        let p = &(&x.pow(2) + &y.pow(3)) + &(&x * &y);
        assert_eq!(p.leading().unwrap().0 .0, vec![0, 3]);
        let q = &x.pow(2) + &(&x * &y);
        assert_eq!(q.leading().unwrap().0 .0, vec![2, 0]);
    }

    #[test]
    fn exact_division() {
        let (x, y) = xy();
        let f = &x - &y;
        let g = &x + &y;
        let p = &f * &g;
        assert_eq!(p.exact_divide(&f).unwrap(), g);
        assert!(p.exact_divide(&(&x + &Poly::one(2))).is_none());
    }

    #[test]
    fn shift_matches_compose() {
        let (x, y) = xy();
        let p = &(&x.pow(3) * &y.pow(2)) - &y.pow(4).scale(&Fe::from_int(5));
        let s = Fe::frac(3, 2);
        let shifted = p.shift_var(1, &s);
        let composed = p.compose(&[x.clone(), &y + &Poly::constant(2, s)]);
        assert_eq!(shifted, composed);
    }

    #[test]
    fn render_graded_lex() {
        let (x, y) = xy();
        let p = &(&x.pow(4) - &y) + &Poly::constant(2, Fe::frac(-1, 2));
        assert_eq!(p.render(&["x", "y"]), "x^4-y-1/2");
    }
}
