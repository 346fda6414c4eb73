//! Vector fields with prescribed first integrals `prod f_i^{alpha_i}`, and
//! random curves with one place at infinity.

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::gcd::{gcd, is_coprime};
use crate::algebra::roots::{linear_point_factors, P1Point};
use crate::algebra::{interval, Fe, Poly, Tower};
use crate::blowup::{curve_strict_transform, Direction};
use crate::cluster::local_equation;
use crate::error::{Error, Result};
use crate::projective::{AffineSystem, InfinityPoint};

#[derive(Clone, Debug, PartialEq)]
pub struct DpwaiSpec {
    /// Affine equations `f_i(x, y)`.
    pub curves: Vec<Poly>,
    pub alpha: Vec<Fe>,
}

/// Are `f` and `g` equal up to a scalar and an additive constant?
fn same_pencil_member(f: &Poly, g: &Poly) -> bool {
    let strip = |p: &Poly| {
        let c = p.constant_term();
        let q = p - &Poly::constant(2, c);
        if q.is_zero() {
            q
        } else {
            q.monic()
        }
    };
    strip(f) == strip(g)
}

impl DpwaiSpec {
    pub fn new(curves: Vec<Poly>, alpha: Vec<Fe>, symbols: &Tower) -> Result<DpwaiSpec> {
        if curves.len() < 2 || curves.len() != alpha.len() {
            return Err(Error::InvalidSpec("need at least two curves, one exponent each".into()));
        }
        for a in &alpha {
            if interval::sign(a, interval::DEFAULT_PRECISION_CAP)? != Ordering::Greater {
                return Err(Error::InvalidSpec(format!("exponent {a} is not positive")));
            }
        }
        for (i, f) in curves.iter().enumerate() {
            if f.total_degree().unwrap_or(0) == 0 {
                return Err(Error::InvalidSpec(format!("curve {} is constant", i + 1)));
            }
            if !check_one_place(&f.homogenize(f.total_degree().unwrap()), symbols)? {
                return Err(Error::InvalidSpec(format!("curve {} has more than one place at infinity", i + 1)));
            }
            for g in &curves[..i] {
                if same_pencil_member(f, g) {
                    return Err(Error::InvalidSpec(format!("curve {} differs from an earlier one by a constant", i + 1)));
                }
            }
        }
        Ok(DpwaiSpec { curves, alpha })
    }
}

/// `a = sum alpha_i prod_{j != i} f_j df_i/dx`, `b` likewise with `d/dy`;
/// the system is the dual of `a dx + b dy`.
pub fn build_form(spec: &DpwaiSpec) -> Result<AffineSystem> {
    let r = spec.curves.len();
    let mut a = Poly::zero(2);
    let mut b = Poly::zero(2);
    for i in 0..r {
        let mut others = Poly::one(2);
        for (j, f) in spec.curves.iter().enumerate() {
            if j != i {
                others = &others * f;
            }
        }
        let w = others.scale(&spec.alpha[i]);
        a = &a + &(&w * &spec.curves[i].derivative(0));
        b = &b + &(&w * &spec.curves[i].derivative(1));
    }
    if !is_coprime(&a, &b) {
        let g = gcd(&a, &b);
        a = a.exact_divide(&g).expect("gcd divides");
        b = b.exact_divide(&g).expect("gcd divides");
    }
    AffineSystem::from_form(&a, &b)
}

fn is_squarefree(f: &Poly) -> bool {
    let (fx, fy) = (f.derivative(0), f.derivative(1));
    if (!fx.is_zero() && is_coprime(f, &fx)) || (!fy.is_zero() && is_coprime(f, &fy)) {
        return true;
    }
    gcd(&gcd(f, &fx), &fy).is_constant()
}

/// Does the projective curve `F = 0` meet `Z = 0` at a single point, where
/// it is reduced and has one branch?
pub fn check_one_place(form: &Poly, tower: &Tower) -> Result<bool> {
    let symbols = tower.symbols();
    if form.is_constant() {
        return Ok(false);
    }
    if !is_squarefree(&form.dehomogenize(2)) {
        return Ok(false);
    }
    let at_infinity = form.specialize(2, &Fe::zero()).dehomogenize(2);
    if at_infinity.is_zero() {
        // the line at infinity is a component
        return Ok(false);
    }
    let lf = linear_point_factors(&at_infinity, symbols);
    if !lf.residual.is_constant() {
        return Err(Error::UnsupportedAlgebraicPoint {
            context: "curve at infinity".into(),
            residual: lf.residual.render(&["X", "Y"]),
        });
    }
    let [(point, mult)] = lf.points.as_slice() else {
        return Ok(false);
    };
    let root = InfinityPoint { point: point.clone(), multiplicity: *mult };
    let mut germ = local_equation(form, &root);
    // each step either reaches a smooth point or strictly lowers the
    // multiplicity sum, so the bound is generous
    for _ in 0..10_000 {
        let m = germ.order().unwrap_or(0);
        if m <= 1 {
            return Ok(m == 1);
        }
        let cone = germ.homogeneous_part(m);
        let tangents = linear_point_factors(&cone, symbols);
        if !tangents.residual.is_constant() {
            // conjugate tangents: more than one branch
            return Ok(false);
        }
        let [(dir, _)] = tangents.points.as_slice() else {
            return Ok(false);
        };
        let dir = match dir {
            P1Point::Affine(t) => Direction::Slope(t.clone()),
            P1Point::Infinite => Direction::Vertical,
        };
        germ = curve_strict_transform(&germ, &dir).0;
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `y - r(x)` with `deg r = degree`.
    Graph { degree: u32 },
    /// `y^n - x^m` plus monomials strictly below the Newton segment.
    Quasi { n: u32, m: u32 },
}

fn small_rational(rng: &mut ChaCha8Rng) -> Fe {
    let num = rng.gen_range(-3i64..=3);
    let den = rng.gen_range(1i64..=2);
    Fe::frac(num, den)
}

fn nonzero_small(rng: &mut ChaCha8Rng) -> Fe {
    loop {
        let c = small_rational(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// A curve of the family, with small random rational coefficients.
pub fn random_one_place_curve(family: Family, rng: &mut ChaCha8Rng) -> Poly {
    let mut terms = Vec::new();
    match family {
        Family::Graph { degree } => {
            terms.push((vec![0, 1], Fe::one()));
            terms.push((vec![degree, 0], -&nonzero_small(rng)));
            for i in 0..degree {
                if rng.gen_bool(0.5) {
                    terms.push((vec![i, 0], -&small_rational(rng)));
                }
            }
        }
        Family::Quasi { n, m } => {
            assert!(m > n && n >= 2 && num_integer::gcd(n, m) == 1, "unsupported exponents");
            terms.push((vec![0, n], Fe::one()));
            terms.push((vec![m, 0], -&nonzero_small(rng)));
            for i in 0..m {
                for j in 0..n {
                    if n * i + m * j < n * m && rng.gen_bool(0.3) {
                        terms.push((vec![i, j], small_rational(rng)));
                    }
                }
            }
        }
    }
    Poly::from_terms(2, terms)
}

/// Exponent menu; every spec uses the transcendental symbol at least once.
fn exponent_choices(tower: &Tower) -> (Vec<Fe>, Fe) {
    let pi = tower.get("pi").expect("generator tower declares pi");
    let mut menu = vec![Fe::one(), Fe::from_int(2), Fe::frac(1, 2), Fe::frac(3, 2), &pi + &Fe::one()];
    if let Some(r2) = tower.get("r2") {
        menu.push(r2.clone());
        menu.push(&r2 + &Fe::one());
    }
    (menu, pi)
}

/// A random valid spec with two or three curves; families and exponents
/// depend only on the seed.
pub fn random_spec(seed: u64, tower: &Tower) -> Result<DpwaiSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (menu, pi) = exponent_choices(tower);
    for _ in 0..64 {
        let r = rng.gen_range(2..=3usize);
        let curves: Vec<Poly> = (0..r)
            .map(|_| {
                let fam = match rng.gen_range(0..4u32) {
                    0 | 1 => Family::Graph { degree: rng.gen_range(1..=3) },
                    2 => Family::Quasi { n: 2, m: 3 },
                    _ => Family::Quasi { n: 2, m: 5 },
                };
                random_one_place_curve(fam, &mut rng)
            })
            .collect();
        let mut alpha: Vec<Fe> = (0..r).map(|_| menu[rng.gen_range(0..menu.len())].clone()).collect();
        let k = rng.gen_range(0..r);
        alpha[k] = pi.clone();
        match DpwaiSpec::new(curves, alpha, tower) {
            Ok(spec) if build_form(&spec).is_ok() => return Ok(spec),
            Ok(_) | Err(Error::InvalidSpec(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidSpec(format!("no valid spec found for seed {seed}")))
}

/// The tower used by generated specs: `pi` and `r2 = sqrt 2`.
pub fn default_tower() -> Tower {
    use crate::algebra::Rational;
    let mut t = Tower::new();
    t.declare_transcendental("pi", "3.14159265358979323846264338327950288419716939937510582097494459")
        .expect("valid declaration");
    let two = Rational::from_integer(2.into());
    t.declare_algebraic(
        "r2",
        &[-two, Rational::from_integer(0.into()), Rational::from_integer(1.into())],
        "1.41421356237309504880168872420969807856967187537694807317667973",
    )
    .expect("valid declaration");
    t
}
