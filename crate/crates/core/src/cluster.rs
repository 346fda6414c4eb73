//! Clusters of infinitely near points with virtual multiplicities, their
//! numerical invariants and the linear systems of curves through them.

use serde::Serialize;

use crate::algebra::linalg::{nullspace, rref};
use crate::algebra::roots::P1Point;
use crate::algebra::{Fe, Poly};
use crate::blowup::{Configuration, Direction};
use crate::projective::InfinityPoint;

/// A chain of infinitely near points from a root to a maximal point, with
/// virtual multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub points: Vec<usize>,
    pub m: Vec<u32>,
}

/// `m_Q = 1` at the last point and `m_P = sum m_R` over the later chain
/// points `R` proximate to `P`.
pub fn chain_multiplicities(config: &Configuration, chain: &[usize]) -> Vec<u32> {
    assert!(!chain.is_empty(), "empty chain");
    let n = chain.len();
    let mut m = vec![0u32; n];
    m[n - 1] = 1;
    for i in (0..n - 1).rev() {
        m[i] = (i + 1..n).filter(|&j| config.get(chain[j]).proximate_to.contains(&chain[i])).map(|j| m[j]).sum();
    }
    m
}

/// `d = sum m_P` over the chain points on the strict transform of the line
/// at infinity, and `I = d^2 - sum m_P^2`.
pub fn d_and_i(config: &Configuration, chain: &[usize], m: &[u32]) -> (u32, i64) {
    let d: u32 = chain.iter().zip(m).filter(|(&p, _)| config.get(p).on_line).map(|(_, &mp)| mp).sum();
    let sq: i64 = m.iter().map(|&x| i64::from(x) * i64::from(x)).sum();
    (d, i64::from(d) * i64::from(d) - sq)
}

impl Cluster {
    /// The chain ending at `maximal`, with multiplicities from the m_K rule.
    pub fn along_chain(config: &Configuration, maximal: usize) -> Cluster {
        let points = config.chain(maximal);
        let m = chain_multiplicities(config, &points);
        Cluster { points, m }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn maximal(&self) -> usize {
        *self.points.last().expect("nonempty cluster")
    }

    pub fn invariants(&self, config: &Configuration) -> (u32, i64) {
        d_and_i(config, &self.points, &self.m)
    }
}

/// Local equation at a singular point at infinity of a form `F(X, Y, Z)`;
/// the coordinates match [`InfinityPoint::local_form`].
pub fn local_equation(form: &Poly, root: &InfinityPoint) -> Poly {
    match &root.point {
        P1Point::Infinite => form.dehomogenize(1),
        P1Point::Affine(t) => form.dehomogenize(0).shift_var(0, t),
    }
}

/// `x^{-m} f(phi(x, t))` in the chart of `dir`; `None` when `f` does not
/// have order at least `m`.
pub fn virtual_transform(f: &Poly, dir: &Direction, m: u32) -> Option<Poly> {
    if f.is_zero() {
        return Some(f.clone());
    }
    if f.order()? < m {
        return None;
    }
    let total = match dir {
        Direction::Slope(_) => f.map_exponents(2, |e| vec![e[0] + e[1], e[1]]),
        Direction::Vertical => f.map_exponents(2, |e| vec![e[0] + e[1], e[0]]),
    };
    let g = total.div_var_power(0, m)?;
    Some(match dir {
        Direction::Slope(t) => g.shift_var(1, t),
        Direction::Vertical => g,
    })
}

/// Forms of degree `d` in `X, Y, Z`, in a fixed order.
pub fn form_monomials(d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push(vec![i, j, d - i - j]);
        }
    }
    out
}

fn combine(basis: &[Vec<Fe>], monos: &[Vec<u32>]) -> Vec<Poly> {
    basis
        .iter()
        .map(|v| Poly::from_terms(3, monos.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), c.clone()))))
        .collect()
}

fn jet_rows(locals: &[Poly], m: u32) -> Vec<Vec<Fe>> {
    let mut rows = Vec::new();
    for k in 0..m {
        for i in 0..=k {
            let e = [i, k - i];
            rows.push(locals.iter().map(|g| g.coeff(&e)).collect());
        }
    }
    rows
}

/// Result of imposing a cluster on forms of a given degree.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub degree: u32,
    /// Conditions on the coefficients of a generic form, ordered as
    /// [`form_monomials`].
    pub conditions: Vec<Vec<Fe>>,
    /// Basis of the forms passing virtually through the cluster.
    pub basis: Vec<Poly>,
}

impl LinearSystem {
    /// Projective dimension; `-1` for the empty system.
    pub fn dimension(&self) -> i64 {
        self.basis.len() as i64 - 1
    }

    pub fn unique_member(&self) -> Option<&Poly> {
        match self.basis.as_slice() {
            [f] => Some(f),
            _ => None,
        }
    }
}

/// Imposes virtual passage point by point. The forms surviving the first
/// `k` points have genuine polynomial transforms at the next one, so each
/// step only reads jets of honest polynomials.
pub fn linear_system(degree: u32, cluster: &Cluster, config: &Configuration, roots: &[InfinityPoint]) -> LinearSystem {
    let monos = form_monomials(degree);
    let n = monos.len();
    let root = &roots[config.get(cluster.points[0]).root];
    // rows of `basis` are coefficient vectors over `monos`, kept reduced so
    // the pivot entries are coordinates on the span
    let mut basis: Vec<Vec<Fe>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Fe::one() } else { Fe::zero() }).collect()).collect();
    let mut locals: Vec<Poly> = combine(&basis, &monos).iter().map(|f| local_equation(f, root)).collect();
    let mut conditions = Vec::new();
    for (k, &pid) in cluster.points.iter().enumerate() {
        if k > 0 {
            let dir = config.get(pid).direction.clone().expect("non-root point has a direction");
            let m_prev = cluster.m[k - 1];
            locals = locals
                .iter()
                .map(|g| virtual_transform(g, &dir, m_prev).expect("surviving forms pass virtually"))
                .collect();
        }
        let rows = jet_rows(&locals, cluster.m[k]);
        let mut pivots = basis.clone();
        let pcols = rref(&mut pivots);
        debug_assert_eq!(pcols.len(), basis.len());
        for row in &rows {
            // a row over the basis is lifted through the pivot coordinates
            let mut lifted = vec![Fe::zero(); n];
            for (b, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    lifted[pcols[b]] = c.clone();
                }
            }
            if lifted.iter().any(|c| !c.is_zero()) {
                conditions.push(lifted);
            }
        }
        let kernel = nullspace(&rows, basis.len());
        let new_basis: Vec<Vec<Fe>> = kernel
            .iter()
            .map(|w| {
                let mut v = vec![Fe::zero(); n];
                for (wb, row) in w.iter().zip(&basis) {
                    if wb.is_zero() {
                        continue;
                    }
                    for (vj, rj) in v.iter_mut().zip(row) {
                        if !rj.is_zero() {
                            *vj += &(wb * rj);
                        }
                    }
                }
                v
            })
            .collect();
        let new_locals: Vec<Poly> = kernel
            .iter()
            .map(|w| {
                let mut acc = Poly::zero(2);
                for (wb, g) in w.iter().zip(&locals) {
                    if !wb.is_zero() {
                        acc = &acc + &g.scale(wb);
                    }
                }
                acc
            })
            .collect();
        // re-reduce so pivot coordinates stay meaningful
        let mut reduced = new_basis.clone();
        rref(&mut reduced);
        let relocal: Vec<Poly> = if reduced == new_basis {
            new_locals
        } else {
            let stacked: Vec<Poly> = combine(&reduced, &monos);
            stacked
                .iter()
                .map(|f| transform_along(f, cluster, config, root, k).expect("member of the span"))
                .collect()
        };
        basis = reduced;
        locals = relocal;
        if basis.is_empty() {
            break;
        }
    }
    let basis_forms = combine(&basis, &monos).into_iter().map(|f| normalize_form(&f)).collect();
    LinearSystem { degree, conditions, basis: basis_forms }
}

/// Virtual transform of `form` at the `upto`-th chain point.
fn transform_along(form: &Poly, cluster: &Cluster, config: &Configuration, root: &InfinityPoint, upto: usize) -> Option<Poly> {
    let mut g = local_equation(form, root);
    for k in 1..=upto {
        let dir = config.get(cluster.points[k]).direction.clone()?;
        g = virtual_transform(&g, &dir, cluster.m[k - 1])?;
    }
    Some(g)
}

/// Does `form` pass virtually through the cluster? Runs the recursion on
/// the single form, independently of any matrix.
pub fn passes_virtually(form: &Poly, cluster: &Cluster, config: &Configuration, roots: &[InfinityPoint]) -> bool {
    let root = &roots[config.get(cluster.points[0]).root];
    let mut g = local_equation(form, root);
    for k in 0..cluster.len() {
        if k > 0 {
            let Some(dir) = config.get(cluster.points[k]).direction.clone() else {
                return false;
            };
            match virtual_transform(&g, &dir, cluster.m[k - 1]) {
                Some(h) => g = h,
                None => return false,
            }
        }
        if !g.is_zero() && g.order().unwrap_or(0) < cluster.m[k] {
            return false;
        }
    }
    true
}

/// `deg^2 - sum m^2 = -1` and `deg = sum` of the multiplicities at points
/// on the line at infinity.
pub fn cluster_identities_hold(form: &Poly, cluster: &Cluster, config: &Configuration) -> bool {
    let deg = i64::from(form.total_degree().unwrap_or(0));
    let (d, _) = cluster.invariants(config);
    let sq: i64 = cluster.m.iter().map(|&x| i64::from(x) * i64::from(x)).sum();
    deg * deg - sq == -1 && deg == i64::from(d)
}

/// Scales a form so its graded-lex leading coefficient is 1.
pub fn normalize_form(f: &Poly) -> Poly {
    if f.is_zero() {
        f.clone()
    } else {
        f.monic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{ChildPoint, LocalOneForm};
    use std::collections::BTreeSet;

    fn child(dir: Direction, prox: &[usize], on_line: bool) -> ChildPoint {
        ChildPoint {
            direction: dir,
            form: LocalOneForm::new(Poly::zero(2), Poly::zero(2)),
            proximate_to: prox.iter().copied().collect::<BTreeSet<_>>(),
            on_line,
        }
    }

    fn root_at_y() -> Vec<InfinityPoint> {
        vec![InfinityPoint { point: P1Point::Infinite, multiplicity: 1 }]
    }

    #[test]
    fn free_chain_has_unit_multiplicities() {
        let mut c = Configuration::default();
        let r = c.add_root(0);
        let a = c.add_child(r, &child(Direction::Slope(Fe::zero()), &[r], false));
        let b = c.add_child(a, &child(Direction::Slope(Fe::one()), &[a], false));
        assert_eq!(chain_multiplicities(&c, &c.chain(b)), vec![1, 1, 1]);
    }

    #[test]
    fn line_cluster_invariants() {
        let mut c = Configuration::default();
        let r = c.add_root(0);
        let k = Cluster::along_chain(&c, r);
        assert_eq!(k.m, vec![1]);
        assert_eq!(k.invariants(&c), (1, 0));
    }

    #[test]
    fn one_point_condition() {
        let mut c = Configuration::default();
        let r = c.add_root(0);
        let k = Cluster::along_chain(&c, r);
        let ls = linear_system(1, &k, &c, &root_at_y());
        assert_eq!(ls.conditions.len(), 1);
        // lines through (0:1:0) are aX + cZ
        assert_eq!(ls.dimension(), 1);
        // the condition is the Y coefficient
        assert!(ls.conditions[0][1].is_one());
    }

    #[test]
    fn double_point_gives_three_conditions() {
        let mut c = Configuration::default();
        let r = c.add_root(0);
        let k = Cluster { points: vec![r], m: vec![2] };
        let ls = linear_system(2, &k, &c, &root_at_y());
        assert_eq!(ls.conditions.len(), 3);
        assert_eq!(ls.dimension(), 2);
    }

    #[test]
    fn line_through_point_and_direction() {
        // (0:1:0) and the tangent direction of X = 0 there
        let mut c = Configuration::default();
        let r = c.add_root(0);
        let a = c.add_child(r, &child(Direction::Vertical, &[r], false));
        let k = Cluster::along_chain(&c, a);
        assert_eq!(k.m, vec![1, 1]);
        let ls = linear_system(1, &k, &c, &root_at_y());
        assert_eq!(ls.dimension(), 0);
        assert_eq!(ls.unique_member().unwrap(), &Poly::var(3, 0));
        assert!(passes_virtually(&Poly::var(3, 0), &k, &c, &root_at_y()));
        assert!(!passes_virtually(&Poly::var(3, 2), &k, &c, &root_at_y()));
        assert!(cluster_identities_hold(&Poly::var(3, 0), &k, &c));
    }
}
