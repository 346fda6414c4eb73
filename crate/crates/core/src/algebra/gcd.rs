//! Multivariate gcd (recursive primitive remainder sequences) and
//! resultants (fraction-free determinant of the Sylvester matrix).

use super::field::Fe;
use super::poly::Poly;
use super::upoly;

fn main_var(f: &Poly, g: &Poly) -> Option<usize> {
    (0..f.nvars()).rev().find(|&v| f.degree_in(v).unwrap_or(0) > 0 || g.degree_in(v).unwrap_or(0) > 0)
}

/// Content with respect to `v`: gcd of the coefficients in `v`.
pub fn content(f: &Poly, v: usize) -> Poly {
    let mut c = Poly::zero(f.nvars());
    for coef in f.coeffs_in(v).values() {
        c = gcd(&c, coef);
        if c.is_constant() && !c.is_zero() {
            return Poly::one(f.nvars());
        }
    }
    c
}

fn primitive_part(f: &Poly, v: usize) -> Poly {
    if f.is_zero() {
        return f.clone();
    }
    let c = content(f, v);
    f.exact_divide(&c).expect("content divides")
}

/// Pseudo-remainder of `a` by `b` in the variable `v`.
pub fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v).unwrap();
    let cb = b.coeffs_in(v);
    let lcb = cb[&db].clone();
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let dr = r.degree_in(v).unwrap();
        if dr < db {
            return r;
        }
        let lcr = r.coeffs_in(v).remove(&dr).unwrap();
        let mut shift = vec![0; a.nvars()];
        shift[v] = dr - db;
        r = &(&r * &lcb) - &(&b.mul_monomial(&shift) * &lcr);
    }
}

/// Greatest common divisor, normalized to a monic graded-lex leading term.
/// `gcd(0, 0) = 0`.
pub fn gcd(f: &Poly, g: &Poly) -> Poly {
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let n = f.nvars();
    let Some(v) = main_var(f, g) else {
        return Poly::one(n);
    };
    if f.is_constant() || g.is_constant() {
        return Poly::one(n);
    }
    let cf = content(f, v);
    let cg = content(g, v);
    let c = gcd(&cf, &cg);
    let mut a = f.exact_divide(&cf).unwrap();
    let mut b = g.exact_divide(&cg).unwrap();
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    let h = loop {
        if b.is_zero() {
            break primitive_part(&a, v);
        }
        if b.degree_in(v) == Some(0) {
            break Poly::one(n);
        }
        let r = prem(&a, &b, v);
        a = b;
        b = primitive_part(&r, v);
    };
    (&c * &h).monic()
}

fn specialize_symbols(f: &Poly) -> Option<Poly> {
    let mut out = Poly::zero(f.nvars());
    for (m, c) in f.terms() {
        out.add_term(m.clone(), c.specialize_transcendentals()?);
    }
    Some(out)
}

fn univariate_specialization_coprime(f: &Poly, g: &Poly, keep: usize, fix: usize) -> Option<bool> {
    // leading coefficients in `keep` must survive both specializations, so
    // any common factor maps to a common factor of the same degree
    let (sf, sg) = (specialize_symbols(f)?, specialize_symbols(g)?);
    if sf.degree_in(keep) != f.degree_in(keep) || sg.degree_in(keep) != g.degree_in(keep) {
        return None;
    }
    let (f, g) = (&sf, &sg);
    let lf = f.coeffs_in(keep).into_iter().next_back()?.1;
    let lg = g.coeffs_in(keep).into_iter().next_back()?.1;
    // a line through a common zero gives a spurious factor, so a few lines
    // are tried; one coprime specialization is a certificate
    let mut tried = 0;
    for c in 1..64i64 {
        let val = Fe::from_int(c);
        if lf.specialize(fix, &val).is_zero() || lg.specialize(fix, &val).is_zero() {
            continue;
        }
        let uf = f.specialize(fix, &val).to_univariate(keep);
        let ug = g.specialize(fix, &val).to_univariate(keep);
        if upoly::gcd(&uf, &ug).len() <= 1 {
            return Some(true);
        }
        tried += 1;
        if tried == 4 {
            break;
        }
    }
    None
}

/// Coprimality, with a cheap certificate for bivariate inputs: if the
/// specializations at generic lines are coprime in each variable, no common
/// factor exists. Falls back to the full gcd otherwise.
pub fn is_coprime(f: &Poly, g: &Poly) -> bool {
    if f.is_zero() || g.is_zero() {
        return f.is_constant() && !f.is_zero() || g.is_constant() && !g.is_zero();
    }
    if f.nvars() == 2 {
        let fast_y = if f.degree_in(1) > Some(0) && g.degree_in(1) > Some(0) {
            univariate_specialization_coprime(f, g, 1, 0)
        } else {
            Some(true)
        };
        let fast_x = if f.degree_in(0) > Some(0) && g.degree_in(0) > Some(0) {
            univariate_specialization_coprime(f, g, 0, 1)
        } else {
            Some(true)
        };
        if fast_y == Some(true) && fast_x == Some(true) {
            return true;
        }
    }
    gcd(f, g).is_constant()
}

/// Resultant of `f` and `g` with respect to `v`.
pub fn resultant(f: &Poly, g: &Poly, v: usize) -> Poly {
    let n = f.nvars();
    if f.is_zero() || g.is_zero() {
        return Poly::zero(n);
    }
    let m = f.degree_in(v).unwrap() as usize;
    let k = g.degree_in(v).unwrap() as usize;
    if m == 0 {
        return f.pow(k as u32);
    }
    if k == 0 {
        return g.pow(m as u32);
    }
    let cf = f.coeffs_in(v);
    let cg = g.coeffs_in(v);
    let get = |c: &std::collections::BTreeMap<u32, Poly>, i: usize| c.get(&(i as u32)).cloned().unwrap_or_else(|| Poly::zero(n));
    let size = m + k;
    let mut mat: Vec<Vec<Poly>> = vec![vec![Poly::zero(n); size]; size];
    for r in 0..k {
        for i in 0..=m {
            mat[r][r + i] = get(&cf, m - i);
        }
    }
    for r in 0..m {
        for i in 0..=k {
            mat[k + r][r + i] = get(&cg, k - i);
        }
    }
    bareiss_det(mat)
}

/// Fraction-free determinant.
pub fn bareiss_det(mut mat: Vec<Vec<Poly>>) -> Poly {
    let size = mat.len();
    if size == 0 {
        return Poly::one(0);
    }
    let n = mat[0][0].nvars();
    let mut sign = false;
    let mut prev = Poly::one(n);
    for kk in 0..size {
        if mat[kk][kk].is_zero() {
            let Some(p) = (kk + 1..size).find(|&r| !mat[r][kk].is_zero()) else {
                return Poly::zero(n);
            };
            mat.swap(kk, p);
            sign = !sign;
        }
        for i in kk + 1..size {
            for j in kk + 1..size {
                let t = &(&mat[kk][kk] * &mat[i][j]) - &(&mat[i][kk] * &mat[kk][j]);
                mat[i][j] = t.exact_divide(&prev).expect("Bareiss step is exact");
            }
            mat[i][kk] = Poly::zero(n);
        }
        prev = mat[kk][kk].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    if sign {
        -&det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Poly, Poly) {
        (Poly::var(2, 0), Poly::var(2, 1))
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let (x, y) = xy();
        let common = &(&x.pow(2) - &y) + &Poly::one(2);
        let f = &common * &(&x + &y);
        let g = &common * &(&x - &y.pow(2));
        assert_eq!(gcd(&f, &g), common.monic());
        assert!(!is_coprime(&f, &g));
        assert!(is_coprime(&(&x + &y), &(&x - &y.pow(2))));
    }

    #[test]
    fn resultant_of_line_and_parabola() {
        let (x, y) = xy();
        // Res_y(y - x^2, y - 1) = 1 - x^2 up to sign
        let r = resultant(&(&y - &x.pow(2)), &(&y - &Poly::one(2)), 1);
        let expect = &Poly::one(2) - &x.pow(2);
        assert!(r == expect || r == -&expect);
    }
}
