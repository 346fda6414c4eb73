//! Planar systems, their projective 1-forms and the singular points on the
//! line at infinity.

use std::sync::Arc;

use crate::algebra::gcd::{gcd, is_coprime};
use crate::algebra::roots::{linear_point_factors, P1Point};
use crate::algebra::{Fe, Poly, Symbol};
use crate::error::{Error, Result};

/// `dx/dt = p`, `dy/dt = q`, with `gcd(p, q) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSystem {
    pub p: Poly,
    pub q: Poly,
    pub degree: u32,
}

impl AffineSystem {
    pub fn new(p: Poly, q: Poly) -> Result<AffineSystem> {
        assert!(p.nvars() == 2 && q.nvars() == 2);
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidSystem("both components vanish".into()));
        }
        let degree = p.total_degree().unwrap_or(0).max(q.total_degree().unwrap_or(0));
        if degree == 0 {
            return Err(Error::InvalidSystem("constant vector field".into()));
        }
        if !is_coprime(&p, &q) {
            let g = gcd(&p, &q);
            return Err(Error::NotCoprime { factor: g.render(&["x", "y"]) });
        }
        Ok(AffineSystem { p, q, degree })
    }

    /// The system dual to `a dx + b dy`: the form is `p dy - q dx`, so
    /// `p = b` and `q = -a`.
    pub fn from_form(a: &Poly, b: &Poly) -> Result<AffineSystem> {
        AffineSystem::new(b.clone(), -a)
    }

    /// The 1-form `a dx + b dy` whose kernel is the vector field.
    pub fn form(&self) -> (Poly, Poly) {
        (-&self.q, self.p.clone())
    }

    /// `X(f) = p f_x + q f_y`.
    pub fn apply(&self, f: &Poly) -> Poly {
        &(&self.p * &f.derivative(0)) + &(&self.q * &f.derivative(1))
    }

    /// Polynomial cofactor `k` with `X(f) = k f`, if `f` is invariant.
    pub fn cofactor(&self, f: &Poly) -> Option<Poly> {
        self.apply(f).exact_divide(f)
    }

    pub fn render(&self) -> (String, String) {
        (self.p.render(&["x", "y"]), self.q.render(&["x", "y"]))
    }
}

/// `Omega = P (Y dZ - Z dY) + Q (Z dX - X dZ) + R (X dY - Y dX)`, with
/// `P, Q, R` homogeneous of degree `d` in `(X, Y, Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveOneForm {
    pub p: Poly,
    pub q: Poly,
    pub r: Poly,
    pub degree: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Chart {
    /// `Z = 1`, coordinates `(x, y)`.
    Z,
    /// `X = 1`, coordinates `(y, z)`.
    X,
    /// `Y = 1`, coordinates `(x, z)`.
    Y,
}

impl Chart {
    pub fn coordinate_names(self) -> [&'static str; 2] {
        match self {
            Chart::Z => ["x", "y"],
            Chart::X => ["y", "z"],
            Chart::Y => ["x", "z"],
        }
    }
}

pub fn projectivize(s: &AffineSystem) -> ProjectiveOneForm {
    let d = s.degree;
    ProjectiveOneForm { p: s.p.homogenize(d), q: s.q.homogenize(d), r: Poly::zero(3), degree: d }
}

impl ProjectiveOneForm {
    fn restrict(poly: &Poly, chart: Chart) -> Poly {
        // dehomogenize the chart variable, keeping the remaining two in order
        match chart {
            Chart::Z => poly.dehomogenize(2),
            Chart::X => poly.dehomogenize(0),
            Chart::Y => poly.dehomogenize(1),
        }
    }

    /// Coefficients `(a, b)` of `a du + b dv` in the chart coordinates.
    pub fn affinize_at(&self, chart: Chart) -> (Poly, Poly) {
        let p = Self::restrict(&self.p, chart);
        let q = Self::restrict(&self.q, chart);
        let r = Self::restrict(&self.r, chart);
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        match chart {
            // -(Q - yR) dx + (P - xR) dy
            Chart::Z => (&(&v * &r) - &q, &p - &(&u * &r)),
            // (zP - R) dy + (Q - yP) dz
            Chart::X => (&(&v * &p) - &r, &q - &(&u * &p)),
            // (R - zQ) dx + (xQ - P) dz
            Chart::Y => (&r - &(&v * &q), &(&u * &q) - &p),
        }
    }

    /// `Y P(X,Y,0) - X Q(X,Y,0)` as a binary form in `(X, Y)`; its roots are
    /// the singular points at infinity.
    pub fn infinity_form(&self) -> Poly {
        let restrict = |f: &Poly| f.specialize(2, &Fe::zero()).dehomogenize(2);
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        &(&y * &restrict(&self.p)) - &(&x * &restrict(&self.q))
    }
}

/// A singular point `(X : Y : 0)`; `Affine(t)` is `(1 : t : 0)` and
/// `Infinite` is `(0 : 1 : 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InfinityPoint {
    pub point: P1Point,
    pub multiplicity: u32,
}

impl InfinityPoint {
    pub fn chart(&self) -> Chart {
        match self.point {
            P1Point::Affine(_) => Chart::X,
            P1Point::Infinite => Chart::Y,
        }
    }

    pub fn label(&self) -> String {
        match &self.point {
            P1Point::Infinite => "(0:1:0)".to_string(),
            P1Point::Affine(t) => format!("(1:{t}:0)"),
        }
    }

    /// Local 1-form at the point, centered at the origin; the line at
    /// infinity is the second coordinate axis `v = 0`.
    pub fn local_form(&self, omega: &ProjectiveOneForm) -> (Poly, Poly) {
        let (a, b) = omega.affinize_at(self.chart());
        match &self.point {
            P1Point::Infinite => (a, b),
            P1Point::Affine(t) => (a.shift_var(0, t), b.shift_var(0, t)),
        }
    }
}

pub fn singular_points_at_infinity(omega: &ProjectiveOneForm, symbols: &[Arc<Symbol>]) -> Result<Vec<InfinityPoint>> {
    let c = omega.infinity_form();
    if c.is_zero() {
        return Err(Error::DegenerateInfinity);
    }
    let lf = linear_point_factors(&c, symbols);
    if !lf.residual.is_constant() {
        return Err(Error::UnsupportedAlgebraicPoint {
            context: "singular points at infinity".into(),
            residual: lf.residual.render(&["X", "Y"]),
        });
    }
    Ok(lf.points.into_iter().map(|(point, multiplicity)| InfinityPoint { point, multiplicity }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Poly, Poly) {
        (Poly::var(2, 0), Poly::var(2, 1))
    }

    #[test]
    fn saddle_round_trip() {
        let (x, y) = xy();
        let s = AffineSystem::new(x.clone(), -&y).unwrap();
        let omega = projectivize(&s);
        let (a, b) = omega.affinize_at(Chart::Z);
        // x dy + y dx
        assert_eq!(a, y);
        assert_eq!(b, x);
    }

    #[test]
    fn saddle_points_at_infinity() {
        let (x, y) = xy();
        let s = AffineSystem::new(x.clone(), -&y).unwrap();
        let pts = singular_points_at_infinity(&projectivize(&s), &[]).unwrap();
        let labels: Vec<String> = pts.iter().map(InfinityPoint::label).collect();
        assert_eq!(labels, vec!["(0:1:0)", "(1:0:0)"]);
    }

    #[test]
    fn radial_field_is_degenerate() {
        let (x, y) = xy();
        let s = AffineSystem::new(x, y).unwrap();
        assert_eq!(singular_points_at_infinity(&projectivize(&s), &[]), Err(Error::DegenerateInfinity));
    }

    #[test]
    fn rotation_needs_complex_points() {
        let (x, y) = xy();
        let s = AffineSystem::new(y, -&x).unwrap();
        assert!(matches!(
            singular_points_at_infinity(&projectivize(&s), &[]),
            Err(Error::UnsupportedAlgebraicPoint { .. })
        ));
    }

    #[test]
    fn cofactor_of_invariant_line() {
        let (x, y) = xy();
        let s = AffineSystem::new(x.clone(), -&y).unwrap();
        assert_eq!(s.cofactor(&x), Some(Poly::one(2)));
        assert!(s.cofactor(&(&x + &y)).is_none());
    }

    #[test]
    fn common_factor_rejected() {
        let (x, y) = xy();
        let f = &x + &y;
        assert!(matches!(AffineSystem::new(&f * &x, &f * &y), Err(Error::NotCoprime { .. })));
    }
}
