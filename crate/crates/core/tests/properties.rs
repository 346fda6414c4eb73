use dpwai_core::algebra::gcd::gcd;
use dpwai_core::algebra::linalg::{nullspace, rank};
use dpwai_core::algebra::{Fe, Poly, Tower};
use dpwai_core::blowup::{curve_strict_transform, pull_back_curve, Direction};
use dpwai_core::generator::default_tower;
use dpwai_core::input::{parse, parse_poly};
use dpwai_core::reduction::{continued_fraction, digits_u64, prox_of};
use proptest::prelude::*;

fn tower() -> Tower {
    default_tower()
}

/// `a + b pi + c r2 + d pi r2`, optionally over `e + pi`.
fn element(t: &Tower, c: &[i64; 5], divide: bool) -> Fe {
    let pi = t.get("pi").unwrap();
    let r2 = t.get("r2").unwrap();
    let num = &(&(&Fe::from_int(c[0]) + &(&Fe::from_int(c[1]) * &pi)) + &(&Fe::from_int(c[2]) * &r2))
        + &(&(&Fe::from_int(c[3]) * &pi) * &r2);
    if divide {
        &num * &(&Fe::from_int(c[4]) + &pi).inv()
    } else {
        num
    }
}

fn coeffs() -> impl Strategy<Value = [i64; 5]> {
    prop::array::uniform5(-6i64..=6)
}

/// Polynomial in `x, y` with small rational coefficients, total degree <= 3.
fn small_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..=3, 0u32..=3), -5i64..=5, 1i64..=3), 1..6).prop_map(|terms| {
        Poly::from_terms(
            2,
            terms.into_iter().filter(|((i, j), _, _)| i + j <= 3).map(|((i, j), n, d)| (vec![i, j], Fe::frac(n, d))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_is_distributive(a in coeffs(), b in coeffs(), c in coeffs(), da: bool) {
        let t = tower();
        let (a, b, c) = (element(&t, &a, da), element(&t, &b, false), element(&t, &c, true));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn nonzero_elements_invert(a in coeffs(), div: bool) {
        let t = tower();
        let a = element(&t, &a, div);
        prop_assume!(!a.is_zero());
        prop_assert!((&a * &a.inv()).is_one());
    }

    #[test]
    fn product_divides_back(f in small_poly(), g in small_poly()) {
        prop_assume!(!g.is_zero());
        prop_assert_eq!((&f * &g).exact_divide(&g), Some(f));
    }

    #[test]
    fn rendered_polynomials_parse_back(f in small_poly(), c in coeffs()) {
        let t = tower();
        let f = f.scale(&element(&t, &c, false));
        let text = f.render(&["x", "y"]);
        prop_assert_eq!(parse_poly(&text, &t).unwrap(), f);
    }

    #[test]
    fn common_factor_divides_gcd(f in small_poly(), g in small_poly(), h in small_poly()) {
        prop_assume!(!f.is_zero() && !g.is_zero() && h.total_degree().unwrap_or(0) > 0);
        let d = gcd(&(&f * &h), &(&g * &h));
        prop_assert!(d.exact_divide(&h).is_some());
    }

    #[test]
    fn nullspace_is_annihilated(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 5), 0..5)) {
        let m: Vec<Vec<Fe>> = rows.iter().map(|r| r.iter().map(|&x| Fe::from_int(x)).collect()).collect();
        let ns = nullspace(&m, 5);
        prop_assert_eq!(rank(&m) + ns.len(), 5);
        for v in &ns {
            for row in &m {
                let dot = row.iter().zip(v).fold(Fe::zero(), |acc, (a, b)| &acc + &(a * b));
                prop_assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn strict_transform_factors_total_transform(f in small_poly(), slope in -3i64..=3, vertical: bool) {
        let f = &f - &Poly::constant(2, f.constant_term());
        prop_assume!(!f.is_zero());
        let dir = if vertical { Direction::Vertical } else { Direction::Slope(Fe::from_int(slope)) };
        let (strict, m) = curve_strict_transform(&f, &dir);
        prop_assert_eq!(pull_back_curve(&f, &dir), strict.mul_monomial(&[m, 0]));
        prop_assert!(strict.order().unwrap_or(0) <= m);
    }

    #[test]
    fn cf_digits_rebuild_fraction(p in 1i64..=500, q in 1i64..=500) {
        let cf = continued_fraction(&Fe::frac(p, q), 64, 4096).unwrap();
        prop_assert!(cf.terminated);
        let digits = digits_u64(&cf);
        let (mut n, mut d) = (i128::from(*digits.last().unwrap()), 1i128);
        for &a in digits.iter().rev().skip(1) {
            (n, d) = (i128::from(a) * n + d, n);
        }
        prop_assert_eq!(Fe::frac(n as i64, d as i64), Fe::frac(p, q));
    }

    #[test]
    fn prox_of_fraction_satisfies_proximity_equalities(p in 1u64..=500, q in 1u64..=500) {
        let cf = continued_fraction(&Fe::frac(p as i64, q as i64), 64, 4096).unwrap();
        let prox = prox_of(&digits_u64(&cf), true);
        let m = prox.multiplicities.clone().unwrap();
        let g = num_gcd(p, q);
        prop_assert_eq!(m.iter().map(|x| x * x).sum::<u64>(), (p / g) * (q / g));
        for i in 0..m.len() - 1 {
            let s: u64 = (i + 1..m.len()).filter(|&j| prox.prefix.proximate_to[j].contains(&i)).map(|j| m[j]).sum();
            prop_assert_eq!(s, m[i]);
        }
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { num_gcd(b, a % b) }
}

#[test]
fn document_render_is_a_fixed_point() {
    for text in [
        "const pi: transcendental ~ 3.14159265358979323846; form { a = pi*x; b = y; }",
        "system { dx = x; dy = -y; }",
        "const r2: algebraic t^2-2 ~ 1.41421356; system { dx = r2*x^2 - y/3; dy = (1+r2)*x*y; } options { cf_depth = 9; }",
    ] {
        let doc = parse(text).unwrap();
        let once = doc.render();
        let again = parse(&once).unwrap();
        assert_eq!(again.render(), once);
        assert_eq!(again.system().unwrap(), doc.system().unwrap());
    }
}
