//! The candidate-curve algorithm over the line at infinity, the exponent
//! solve for a Darboux first integral and the description of the infinite
//! chains of the extended reduction.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::field::is_atomic_text;
use crate::algebra::gcd::resultant;
use crate::algebra::linalg::nullspace;
use crate::algebra::{guard, interval, Fe, Poly, Symbol};
use crate::blowup::Configuration;
use crate::cluster::{linear_system, Cluster};
use crate::error::{Error, Result};
use crate::projective::{projectivize, AffineSystem};
use crate::reduction::{
    continued_fraction, digits_u64, divisor_ratio, extended_step, seidenberg_over_infinity, CfExpansion, InfinityReduction,
    ProxPrefix, ReductionOptions, SimpleKind, SingularityClass, Stage,
};

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Cap on blown-up plus extension points.
    pub budget_points: usize,
    pub cf_depth: usize,
    /// Largest interval precision, in bits.
    pub precision_cap: u32,
    /// Worker threads for the independent linear systems; results are
    /// merged in a fixed order.
    pub jobs: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { budget_points: 500, cf_depth: 12, precision_cap: interval::DEFAULT_PRECISION_CAP, jobs: 1 }
    }
}

/// Where the algorithm gave up with its `0` output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZeroStage {
    /// No qualifying extension over a maximal resolved point.
    Extension,
    /// Some maximal point has `I != -1`.
    SelfIntersection,
    /// A linear system is not a single curve.
    LinearSystem,
    /// A candidate curve is not invariant.
    Invariance,
    /// The cofactors admit no nontrivial relation.
    Exponents,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroOutcome {
    pub stage: ZeroStage,
    pub reason: String,
}

/// A maximal point of the final configuration with its cluster data.
#[derive(Clone, Debug)]
pub struct MaximalPoint {
    pub id: usize,
    pub cluster: Cluster,
    pub d: u32,
    pub i: i64,
    /// Projective dimension of the linear system, once computed.
    pub dimension: Option<i64>,
    /// Unique member `F(X, Y, Z)`, when the system is a single curve.
    pub curve: Option<Poly>,
}

#[derive(Clone, Debug)]
pub struct DarbouxIntegral {
    pub curves: Vec<Poly>,
    pub cofactors: Vec<Poly>,
    /// First nonzero entry 1.
    pub ray: Vec<Fe>,
    /// The ray rescaled so every entry is a single symbol or rational, when
    /// such a rescaling exists; otherwise equal to `ray`.
    pub display: Vec<Fe>,
    /// Every entry certified positive by intervals.
    pub positive: bool,
    /// `sum lambda_i k_i` is the zero polynomial.
    pub verified: bool,
}

impl DarbouxIntegral {
    /// `(f_1)^l_1 * ...`, omitting exponents equal to 1.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (f, l) in self.curves.iter().zip(&self.display) {
            let base = format!("({})", f.render(&["x", "y"]));
            if l.is_one() {
                parts.push(base);
            } else {
                let e = l.to_string();
                let bare = e.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                let e = if bare { e } else { format!("({e})") };
                parts.push(format!("{base}^{e}"));
            }
        }
        parts.join(" * ")
    }
}

/// Chain of the extended reduction beyond a maximal point, described by the
/// ratio `delta_i / alpha_i`.
#[derive(Clone, Debug)]
pub struct ChainDescriptor {
    pub s_id: usize,
    pub ratio: Fe,
    /// Ratio read from the linear part of the reduced form at the point.
    pub local_ratio: Option<Fe>,
    pub cf: Option<CfExpansion>,
    pub prox: Option<ProxPrefix>,
    pub rational: bool,
}

#[derive(Clone, Debug)]
pub struct ExtendedReport {
    /// Affine intersection numbers; the diagonal is zero and unused.
    pub rho: Vec<Vec<u32>>,
    pub delta: Vec<Fe>,
    pub chains: Vec<ChainDescriptor>,
    /// No `delta_i / alpha_i` is rational.
    pub irrational_ratios: bool,
}

/// Everything computed for one system, kept even when the output is `0`.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub system: AffineSystem,
    /// Resolution over infinity followed by the extension points.
    pub reduction: InfinityReduction,
    pub omega_prime: BTreeSet<usize>,
    pub omega: BTreeSet<usize>,
    /// Ids of `omega` in display order (`P_1, P_2, ...`).
    pub numbering: Vec<usize>,
    pub maximal: Vec<MaximalPoint>,
    pub curves: Vec<Poly>,
    pub integral: Option<DarbouxIntegral>,
    pub extended: Option<ExtendedReport>,
    pub zero: Option<ZeroOutcome>,
}

impl Analysis {
    /// Positive exponents, verified, and no rational chain ratio.
    pub fn is_dpwai(&self) -> bool {
        match (&self.integral, &self.extended) {
            (Some(i), Some(e)) => i.verified && i.positive && e.irrational_ratios,
            _ => false,
        }
    }

    /// 1-based display label of a point of `omega`.
    pub fn label(&self, id: usize) -> Option<usize> {
        self.numbering.iter().position(|&p| p == id).map(|k| k + 1)
    }
}

fn is_positive_irrational(class: SingularityClass) -> bool {
    class == SingularityClass::Simple(SimpleKind::PositiveIrrational)
}

fn chain_i(config: &Configuration, id: usize) -> i64 {
    let k = Cluster::along_chain(config, id);
    k.invariants(config).1
}

fn truncate(red: &mut InfinityReduction, len: usize) {
    red.config.points.truncate(len);
    red.records.truncate(len);
}

/// Grows the chains of free positive irrational points while `I >= -1`.
fn extend_from_seeds(
    red: &mut InfinityReduction,
    seeds: &[usize],
    symbols: &[Arc<Symbol>],
    opts: &AnalysisOptions,
) -> Result<BTreeSet<usize>> {
    let mut added = BTreeSet::new();
    let mut stack: Vec<usize> = seeds.iter().rev().copied().collect();
    added.extend(seeds.iter().copied());
    while let Some(p) = stack.pop() {
        if red.records.len() >= opts.budget_points {
            return Err(Error::BudgetExceeded { limit: opts.budget_points });
        }
        let form = red.records[p].form.clone();
        let (mult, dicritical, kept) = extended_step(&form, p, symbols, opts.precision_cap)?;
        let mut next = Vec::new();
        for (child, class) in kept {
            let mark = red.records.len();
            let id = red.push(p, &child, class, Stage::Extension);
            if red.point(id).is_free() && chain_i(&red.config, id) >= -1 {
                next.push(id);
            } else {
                truncate(red, mark);
            }
        }
        if !next.is_empty() {
            red.records[p].blowup = Some((mult, dicritical));
        }
        for id in next.into_iter().rev() {
            added.insert(id);
            stack.push(id);
        }
    }
    Ok(added)
}

/// Display order: depth first from the roots, satellite children before
/// free ones.
pub fn number_points(config: &Configuration, omega: &BTreeSet<usize>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut roots: Vec<usize> = omega.iter().copied().filter(|&p| config.get(p).parent.is_none()).collect();
    roots.sort_by_key(|&p| config.get(p).root);
    fn visit(config: &Configuration, omega: &BTreeSet<usize>, p: usize, out: &mut Vec<usize>) {
        out.push(p);
        let mut kids: Vec<usize> = config.children(p).into_iter().filter(|c| omega.contains(c)).collect();
        kids.sort_by_key(|&c| (!config.get(c).is_satellite(), c));
        for c in kids {
            visit(config, omega, c, out);
        }
    }
    for r in roots {
        visit(config, omega, r, &mut out);
    }
    out
}

/// The candidate-curve algorithm: returns the analysis with `curves`
/// filled, or with `zero` set.
pub fn candidate_curves(system: &AffineSystem, symbols: &[Arc<Symbol>], opts: &AnalysisOptions) -> Result<Analysis> {
    let omega_form = projectivize(system);
    let ropts = ReductionOptions { budget_points: opts.budget_points, precision_cap: opts.precision_cap };
    let mut red = seidenberg_over_infinity(&omega_form, symbols, &ropts)?;
    let omega_prime = red.omega_prime();

    // seeds: reduced points left by the resolution that already qualify
    let seeds: Vec<usize> = (0..red.records.len())
        .filter(|&p| red.records[p].stage == Stage::Frontier)
        .filter(|&p| is_positive_irrational(red.records[p].class) && red.point(p).is_free())
        .filter(|&p| chain_i(&red.config, p) >= -1)
        .collect();
    let extension = extend_from_seeds(&mut red, &seeds, symbols, opts)?;

    let mut analysis = Analysis {
        system: system.clone(),
        reduction: red,
        omega_prime: omega_prime.clone(),
        omega: BTreeSet::new(),
        numbering: Vec::new(),
        maximal: Vec::new(),
        curves: Vec::new(),
        integral: None,
        extended: None,
        zero: None,
    };
    let config = &analysis.reduction.config;

    let mut omega: BTreeSet<usize> = omega_prime.union(&extension).copied().collect();
    for q in config.maximal_points(&omega_prime) {
        let covered = extension.iter().any(|&p| config.is_infinitely_near(p, q));
        if !covered && !analysis.reduction.records[q].is_dicritical() {
            analysis.omega = omega;
            analysis.numbering = number_points(config, &analysis.omega);
            let label = analysis.label(q).unwrap_or(0);
            analysis.zero = Some(ZeroOutcome {
                stage: ZeroStage::Extension,
                reason: format!("no free positive irrational point with I >= -1 over P{label}"),
            });
            return Ok(analysis);
        }
    }
    if omega.is_empty() {
        analysis.zero =
            Some(ZeroOutcome { stage: ZeroStage::Extension, reason: "no point over the line at infinity qualifies".into() });
        return Ok(analysis);
    }
    // parents of seeds belong to the resolution already; keep omega closed
    let closure: Vec<usize> = omega.iter().flat_map(|&p| config.chain(p)).collect();
    omega.extend(closure);
    analysis.numbering = number_points(config, &omega);
    let mut maximal_ids = config.maximal_points(&omega);
    maximal_ids.sort_by_key(|&p| analysis.numbering.iter().position(|&q| q == p));
    analysis.omega = omega;

    for &s in &maximal_ids {
        let cluster = Cluster::along_chain(config, s);
        let (d, i) = cluster.invariants(config);
        analysis.maximal.push(MaximalPoint { id: s, cluster, d, i, dimension: None, curve: None });
    }
    if let Some(bad) = analysis.maximal.iter().find(|m| m.i != -1) {
        analysis.zero = Some(ZeroOutcome {
            stage: ZeroStage::SelfIntersection,
            reason: format!("I = {} at P{}", bad.i, analysis.label(bad.id).unwrap_or(0)),
        });
        return Ok(analysis);
    }
    let roots = &analysis.reduction.roots;
    let config = &analysis.reduction.config;
    let solve = |mp: &MaximalPoint| {
        let ls = linear_system(mp.d, &mp.cluster, config, roots);
        (ls.dimension(), ls.unique_member().cloned())
    };
    let solved: Vec<(i64, Option<Poly>)> = if opts.jobs <= 1 || analysis.maximal.len() <= 1 {
        analysis.maximal.iter().map(solve).collect()
    } else {
        let chunk = analysis.maximal.len().div_ceil(opts.jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = analysis
                .maximal
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(solve).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p))).collect()
        })
    };
    for (mp, (dim, curve)) in analysis.maximal.iter_mut().zip(solved) {
        mp.dimension = Some(dim);
        mp.curve = curve;
    }
    if let Some(bad) = analysis.maximal.iter().find(|m| m.curve.is_none()) {
        analysis.zero = Some(ZeroOutcome {
            stage: ZeroStage::LinearSystem,
            reason: format!(
                "linear system of degree {} at P{} has projective dimension {}",
                bad.d,
                analysis.label(bad.id).unwrap_or(0),
                bad.dimension.unwrap_or(-1)
            ),
        });
        return Ok(analysis);
    }
    analysis.curves = analysis.maximal.iter().map(|m| m.curve.as_ref().unwrap().dehomogenize(2).monic()).collect();
    Ok(analysis)
}

/// Nullspace of the cofactor coefficients, as a ray whose first nonzero
/// entry is 1, with a positivity certificate when one can be found.
pub fn solve_exponents(cofactors: &[Poly], cap: u32) -> Option<(Vec<Fe>, bool)> {
    let r = cofactors.len();
    let mut monos: BTreeSet<Vec<u32>> = BTreeSet::new();
    for k in cofactors {
        monos.extend(k.terms().map(|(m, _)| m.0.clone()));
    }
    let rows: Vec<Vec<Fe>> = monos.iter().map(|m| cofactors.iter().map(|k| k.coeff(m)).collect()).collect();
    let basis = nullspace(&rows, r);
    if basis.is_empty() {
        return None;
    }
    let positive = |v: &Vec<Fe>| v.iter().all(|x| matches!(interval::sign(x, cap), Ok(Ordering::Greater)));
    match basis.iter().find(|v| positive(v)) {
        Some(v) => Some((v.clone(), true)),
        None => Some((basis[0].clone(), false)),
    }
}

/// Rescales the ray by the inverse of one of its entries so that every
/// entry renders as a single term, when possible.
pub fn display_ray(ray: &[Fe]) -> Vec<Fe> {
    for pivot in ray.iter().filter(|x| !x.is_zero()) {
        let inv = pivot.inv();
        let scaled: Vec<Fe> = ray.iter().map(|x| x * &inv).collect();
        if scaled.iter().all(|x| x.is_rational() || is_atomic_text(&x.to_string())) {
            return scaled;
        }
    }
    ray.to_vec()
}

fn shear(f: &Poly, c: i64) -> Poly {
    let x = Poly::var(2, 0);
    let y = Poly::var(2, 1);
    f.compose(&[&x + &y.scale(&Fe::from_int(c)), y])
}

fn y_leading_is_constant(f: &Poly) -> bool {
    f.coeffs_in(1).into_iter().next_back().is_some_and(|(_, c)| c.is_constant())
}

fn affine_intersection(f: &Poly, g: &Poly, c: i64) -> Option<u32> {
    let (fs, gs) = (shear(f, c), shear(g, c));
    if !y_leading_is_constant(&fs) || !y_leading_is_constant(&gs) {
        return None;
    }
    let res = resultant(&fs, &gs, 1);
    if res.is_zero() {
        return None;
    }
    res.degree_in(0)
}

/// Number of affine intersections of two coprime curves, counted with
/// multiplicity: the degree of a resultant after a shear `x -> x + c y`
/// that makes both leading coefficients in `y` constant, confirmed by a
/// second shear.
pub fn intersection_number(f: &Poly, g: &Poly) -> Result<u32> {
    let mut found: Vec<u32> = Vec::new();
    let mut attempts = 0u32;
    for c in 1..64i64 {
        let Some(n) = affine_intersection(f, g, c) else {
            continue;
        };
        attempts += 1;
        if found.contains(&n) {
            return Ok(n);
        }
        found.push(n);
        if attempts >= 5 {
            break;
        }
    }
    Err(Error::ShearFailure { attempts })
}

pub fn rho_matrix(curves: &[Poly]) -> Result<Vec<Vec<u32>>> {
    let r = curves.len();
    let mut rho = vec![vec![0u32; r]; r];
    for i in 0..r {
        for j in i + 1..r {
            let n = intersection_number(&curves[i], &curves[j])?;
            rho[i][j] = n;
            rho[j][i] = n;
        }
    }
    Ok(rho)
}

/// `delta_i = sum_{j != i} alpha_j rho_ji`.
pub fn deltas(rho: &[Vec<u32>], alpha: &[Fe]) -> Vec<Fe> {
    (0..alpha.len())
        .map(|i| {
            let mut acc = Fe::zero();
            for (j, a) in alpha.iter().enumerate() {
                if j != i {
                    acc += &(a * &Fe::from(i64::from(rho[j][i])));
                }
            }
            acc
        })
        .collect()
}

fn extended_report(analysis: &Analysis, integral: &DarbouxIntegral, opts: &AnalysisOptions) -> Result<ExtendedReport> {
    let rho = rho_matrix(&integral.curves)?;
    let delta = deltas(&rho, &integral.display);
    let mut chains = Vec::new();
    let mut irrational = true;
    for (i, mp) in analysis.maximal.iter().enumerate() {
        let ratio = &delta[i] / &integral.display[i];
        let rational = ratio.is_rational();
        irrational &= !rational;
        let local_ratio = divisor_ratio(&analysis.reduction.records[mp.id].form);
        let cf = match interval::sign(&ratio, opts.precision_cap) {
            Ok(Ordering::Greater) => Some(continued_fraction(&ratio, opts.cf_depth, opts.precision_cap)?),
            _ => None,
        };
        let prox = cf.as_ref().map(|c| ProxPrefix::from_digits(&digits_u64(c)));
        chains.push(ChainDescriptor { s_id: mp.id, ratio, local_ratio, cf, prox, rational });
    }
    Ok(ExtendedReport { rho, delta, chains, irrational_ratios: irrational })
}

/// Candidate curves, cofactors, exponents and the chain report; algorithmic
/// failures are recorded in `zero`, hard failures are errors.
pub fn first_integral(system: &AffineSystem, symbols: &[Arc<Symbol>], opts: &AnalysisOptions) -> Result<Analysis> {
    guard(|| {
        let mut analysis = candidate_curves(system, symbols, opts)?;
        if analysis.zero.is_some() {
            return Ok(analysis);
        }
        let mut cofactors = Vec::new();
        for (k, f) in analysis.curves.iter().enumerate() {
            match system.cofactor(f) {
                Some(c) => cofactors.push(c),
                None => {
                    analysis.zero = Some(ZeroOutcome {
                        stage: ZeroStage::Invariance,
                        reason: format!("candidate {} = {} is not invariant", k + 1, f.render(&["x", "y"])),
                    });
                    return Ok(analysis);
                }
            }
        }
        let Some((ray, positive)) = solve_exponents(&cofactors, opts.precision_cap) else {
            analysis.zero =
                Some(ZeroOutcome { stage: ZeroStage::Exponents, reason: "cofactors are linearly independent".into() });
            return Ok(analysis);
        };
        let mut sum = Poly::zero(2);
        for (l, k) in ray.iter().zip(&cofactors) {
            sum = &sum + &k.scale(l);
        }
        let display = display_ray(&ray);
        let integral =
            DarbouxIntegral { curves: analysis.curves.clone(), cofactors, ray, display, positive, verified: sum.is_zero() };
        analysis.extended = Some(extended_report(&analysis, &integral, opts)?);
        analysis.integral = Some(integral);
        Ok(analysis)
    })
}

/// Ids of `omega` with the labels used for display, as a map.
pub fn labels(analysis: &Analysis) -> BTreeMap<usize, usize> {
    analysis.numbering.iter().enumerate().map(|(k, &p)| (p, k + 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Poly, Poly) {
        (Poly::var(2, 0), Poly::var(2, 1))
    }

    fn p(text: &str) -> Poly {
        crate::input::parse_poly(text, &crate::algebra::Tower::new()).unwrap()
    }

    #[test]
    fn saddle_exponents() {
        let (x, y) = xy();
        let s = AffineSystem::new(x.clone(), -&y).unwrap();
        let ks = vec![s.cofactor(&x).unwrap(), s.cofactor(&y).unwrap()];
        let (ray, positive) = solve_exponents(&ks, 256).unwrap();
        assert_eq!(ray, vec![Fe::one(), Fe::one()]);
        assert!(positive);
    }

    #[test]
    fn independent_cofactors_have_no_ray() {
        let ks = vec![Poly::one(2), Poly::var(2, 0)];
        assert!(solve_exponents(&ks, 256).is_none());
        let ks = vec![Poly::one(2), Poly::one(2).scale(&Fe::from_int(2))];
        let (ray, positive) = solve_exponents(&ks, 256).unwrap();
        assert_eq!(ray, vec![Fe::one(), Fe::frac(-1, 2)]);
        assert!(!positive);
    }

    #[test]
    fn intersection_numbers_of_three_curves() {
        let f = [p("x^4-y"), p("x^3+y"), p("y^2+x")];
        let rho = rho_matrix(&f).unwrap();
        assert_eq!(rho, vec![vec![0, 4, 8], vec![4, 0, 6], vec![8, 6, 0]]);
    }

    #[test]
    fn resultant_degree_matches_hand_count() {
        // Res_y(x^4 - y, x^3 + y) = -(x^4 + x^3) without any shear
        let r = resultant(&p("x^4-y"), &p("x^3+y"), 1);
        assert_eq!(r.degree_in(0), Some(4));
        assert_eq!(intersection_number(&p("x"), &p("y")).unwrap(), 1);
    }

    #[test]
    fn saddle_is_integrable_but_not_dpwai() {
        let (x, y) = xy();
        let s = AffineSystem::new(x, -&y).unwrap();
        let a = first_integral(&s, &[], &AnalysisOptions::default()).unwrap();
        assert!(a.zero.is_none(), "{:?}", a.zero);
        let i = a.integral.as_ref().unwrap();
        assert!(i.verified);
        assert_eq!(i.render(), "(x) * (y)");
        assert!(!a.is_dpwai());
    }
}
