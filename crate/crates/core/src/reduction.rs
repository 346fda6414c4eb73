//! Classification of reduced singularities, resolution over the line at
//! infinity, and the chains governed by positive irrational eigenvalue
//! ratios.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::field::rational_sqrt;
use crate::algebra::interval;
use crate::algebra::{Fe, Poly, Symbol};
use crate::blowup::{blow_up, ChildPoint, Configuration, Direction, InfPoint, LocalOneForm};
use crate::error::{Error, Result};
use crate::projective::{singular_points_at_infinity, InfinityPoint, ProjectiveOneForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SimpleKind {
    /// One zero and one nonzero eigenvalue.
    ZeroEigenvalue,
    /// Eigenvalue ratio negative or non-real.
    NegativeOrComplex,
    /// Eigenvalue ratio a positive irrational.
    PositiveIrrational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SingularityClass {
    NonSingular,
    Simple(SimpleKind),
    /// Needs further blow-ups: multiplicity at least 2, nilpotent linear
    /// part, or a positive rational eigenvalue ratio.
    Ordinary,
}

impl SingularityClass {
    pub fn is_simple(self) -> bool {
        matches!(self, SingularityClass::Simple(_))
    }

    pub fn label(self) -> &'static str {
        match self {
            SingularityClass::NonSingular => "non-singular",
            SingularityClass::Simple(SimpleKind::ZeroEigenvalue) => "simple/zero-eigenvalue",
            SingularityClass::Simple(SimpleKind::NegativeOrComplex) => "simple/negative-or-complex",
            SingularityClass::Simple(SimpleKind::PositiveIrrational) => "simple/positive-irrational",
            SingularityClass::Ordinary => "ordinary",
        }
    }
}

/// Linear part `M` of the dual vector field `(b, -a)`.
pub fn linear_part(form: &LocalOneForm) -> [[Fe; 2]; 2] {
    let (a, b) = (&form.a, &form.b);
    [[b.coeff(&[1, 0]), b.coeff(&[0, 1])], [-&a.coeff(&[1, 0]), -&a.coeff(&[0, 1])]]
}

pub fn classify(form: &LocalOneForm, cap: u32) -> Result<SingularityClass> {
    if !form.is_singular() {
        return Ok(SingularityClass::NonSingular);
    }
    if form.multiplicity() >= 2 {
        return Ok(SingularityClass::Ordinary);
    }
    let m = linear_part(form);
    let trace = &m[0][0] + &m[1][1];
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    if det.is_zero() {
        return Ok(if trace.is_zero() {
            SingularityClass::Ordinary
        } else {
            SingularityClass::Simple(SimpleKind::ZeroEigenvalue)
        });
    }
    // the ratio r of eigenvalues satisfies r + 1/r + 2 = s
    let s = &(&trace * &trace) / &det;
    let four = Fe::from_int(4);
    if let Some(sr) = s.as_rational() {
        let disc = sr * (sr - four.as_rational().unwrap());
        if disc.is_negative() {
            return Ok(SingularityClass::Simple(SimpleKind::NegativeOrComplex));
        }
        let two = Fe::from_int(2);
        if rational_sqrt(&disc).is_some() {
            return Ok(if sr > two.as_rational().unwrap() {
                SingularityClass::Ordinary
            } else {
                SingularityClass::Simple(SimpleKind::NegativeOrComplex)
            });
        }
        return Ok(if sr > four.as_rational().unwrap() {
            SingularityClass::Simple(SimpleKind::PositiveIrrational)
        } else {
            SingularityClass::Simple(SimpleKind::NegativeOrComplex)
        });
    }
    Ok(match interval::sign(&(&s - &four), cap)? {
        Ordering::Greater => SingularityClass::Simple(SimpleKind::PositiveIrrational),
        _ => SingularityClass::Simple(SimpleKind::NegativeOrComplex),
    })
}

/// `lambda_E / lambda_other` at a point on the divisor `x = 0`, when the
/// divisor direction is an eigenvector with nonzero complementary eigenvalue.
pub fn divisor_ratio(form: &LocalOneForm) -> Option<Fe> {
    if form.multiplicity() != 1 {
        return None;
    }
    let m = linear_part(form);
    if !m[0][1].is_zero() || m[0][0].is_zero() {
        return None;
    }
    Some(&m[1][1] / &m[0][0])
}

#[derive(Clone, Debug, PartialEq)]
pub struct CfExpansion {
    pub digits: Vec<BigInt>,
    /// The expansion ended exactly (rational input).
    pub terminated: bool,
    /// Stopped early because a digit could not be certified.
    pub precision_limited: bool,
}

/// Certified continued-fraction digits: the partial quotient is kept exact
/// in the tower and each floor is read from an enclosure.
pub fn continued_fraction(x: &Fe, depth: usize, cap: u32) -> Result<CfExpansion> {
    let mut digits = Vec::new();
    let mut cur = x.clone();
    for _ in 0..depth {
        let c = match interval::floor(&cur, cap) {
            Ok(c) => c,
            Err(Error::PrecisionExhausted { .. }) if !digits.is_empty() => {
                return Ok(CfExpansion { digits, terminated: false, precision_limited: true });
            }
            Err(e) => return Err(e),
        };
        let rest = &cur - &Fe::from(c.clone());
        digits.push(c);
        if rest.is_zero() {
            return Ok(CfExpansion { digits, terminated: true, precision_limited: false });
        }
        cur = rest.try_inv()?;
    }
    Ok(CfExpansion { digits, terminated: false, precision_limited: false })
}

/// The combinatorial chain determined by a list of partial quotients: a
/// point with ratio above 1 is followed by a free point, a point with ratio
/// below 1 by a satellite. Indices are chain positions starting at 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProxPrefix {
    pub digits: Vec<u64>,
    /// `proximate_to[i]` lists earlier chain positions; position 0 is
    /// proximate to the point before the chain, which is not listed.
    pub proximate_to: Vec<Vec<usize>>,
}

impl ProxPrefix {
    pub fn from_digits(digits: &[u64]) -> ProxPrefix {
        let n: usize = digits.iter().map(|&c| c as usize).sum();
        // positions that start a group other than the first
        let mut group_start = BTreeSet::new();
        let mut acc = 0usize;
        for (g, &c) in digits.iter().enumerate() {
            if g >= 1 {
                group_start.insert(acc);
            }
            acc += c as usize;
        }
        // each point carries its newest divisor `e` and the other branch `o`
        // (None is the separatrix that started the chain)
        let mut e: Vec<Option<usize>> = vec![None];
        let mut o: Vec<Option<usize>> = vec![None];
        let mut proximate_to = vec![Vec::new()];
        for i in 1..n {
            let parent = i - 1;
            let (ne, no) = if group_start.contains(&parent) { (Some(parent), e[parent]) } else { (Some(parent), o[parent]) };
            let mut prox: Vec<usize> = [ne, no].into_iter().flatten().collect();
            prox.sort_unstable();
            prox.dedup();
            proximate_to.push(prox);
            e.push(ne);
            o.push(no);
        }
        ProxPrefix { digits: digits.to_vec(), proximate_to }
    }

    pub fn len(&self) -> usize {
        self.proximate_to.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proximate_to.is_empty()
    }

    /// Multiplicity weights of the groups: `r_0 = 1`, `r_1 = beta - c_0`,
    /// `r_{k+1} = r_{k-1} - c_k r_k`.
    pub fn group_weights(beta: &Fe, digits: &[u64]) -> Vec<Fe> {
        let mut out = vec![Fe::one()];
        if digits.is_empty() {
            return out;
        }
        out.push(beta - &Fe::from(digits[0] as i64));
        for k in 1..digits.len().saturating_sub(1) {
            let next = &out[k - 1] - &(&Fe::from(digits[k] as i64) * &out[k]);
            out.push(next);
        }
        out
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=LR;\n  node [shape=circle];\n");
        for i in 0..self.len() {
            s.push_str(&format!("  Q{i};\n"));
        }
        for i in 1..self.len() {
            s.push_str(&format!("  Q{} -> Q{i};\n", i - 1));
            for &p in &self.proximate_to[i] {
                if p + 1 != i {
                    s.push_str(&format!("  Q{p} -> Q{i} [style=dotted, arrowhead=none];\n"));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Chain data of a positive number given by its partial quotients: the
/// proximity prefix and, for a terminated expansion of `p/q`, the
/// multiplicity sequence read from the Euclidean remainders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProxOf {
    pub prefix: ProxPrefix,
    pub multiplicities: Option<Vec<u64>>,
    /// `(p, q)` when the expansion terminated.
    pub fraction: Option<(u64, u64)>,
}

/// Folds partial quotients back into a reduced fraction.
pub fn fold_digits(digits: &[u64]) -> Option<(u64, u64)> {
    let (&last, rest) = digits.split_last()?;
    let (mut p, mut q) = (last, 1u64);
    for &c in rest.iter().rev() {
        let np = c.checked_mul(p)?.checked_add(q)?;
        q = p;
        p = np;
    }
    Some((p, q))
}

/// Multiplicities of the chain of `p/q` with `m_0 = q`: each remainder of
/// the Euclidean algorithm repeated by its quotient.
pub fn euclid_multiplicities(p: u64, q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut a, mut b) = (p, q);
    while b > 0 {
        for _ in 0..a / b {
            out.push(b);
        }
        (a, b) = (b, a % b);
    }
    out
}

pub fn prox_of(digits: &[u64], terminated: bool) -> ProxOf {
    let prefix = ProxPrefix::from_digits(digits);
    let fraction = if terminated { fold_digits(digits) } else { None };
    let multiplicities = fraction.map(|(p, q)| euclid_multiplicities(p, q));
    ProxOf { prefix, multiplicities, fraction }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    /// Blown up during the resolution over infinity.
    Resolved,
    /// Reduced point left by the resolution.
    Frontier,
    /// Point added along a positive irrational chain.
    Extension,
}

#[derive(Clone, Debug)]
pub struct PointRecord {
    pub form: LocalOneForm,
    pub class: SingularityClass,
    pub stage: Stage,
    /// Filled once the point has been blown up.
    pub blowup: Option<(u32, bool)>,
}

impl PointRecord {
    pub fn multiplicity(&self) -> u32 {
        self.form.multiplicity()
    }

    pub fn is_dicritical(&self) -> bool {
        matches!(self.blowup, Some((_, true)))
    }
}

#[derive(Clone, Debug)]
pub struct InfinityReduction {
    pub roots: Vec<InfinityPoint>,
    pub config: Configuration,
    pub records: Vec<PointRecord>,
}

impl InfinityReduction {
    pub fn point(&self, id: usize) -> &InfPoint {
        self.config.get(id)
    }

    pub fn omega_prime(&self) -> BTreeSet<usize> {
        (0..self.records.len()).filter(|&i| self.records[i].stage == Stage::Resolved).collect()
    }

    pub fn blown_up_count(&self) -> usize {
        self.records.iter().filter(|r| r.blowup.is_some()).count()
    }

    pub(crate) fn push(&mut self, parent: usize, child: &ChildPoint, class: SingularityClass, stage: Stage) -> usize {
        let id = self.config.add_child(parent, child);
        self.records.push(PointRecord { form: child.form.clone(), class, stage, blowup: None });
        id
    }
}

pub struct ReductionOptions {
    pub budget_points: usize,
    pub precision_cap: u32,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions { budget_points: 500, precision_cap: interval::DEFAULT_PRECISION_CAP }
    }
}

/// Blows up every non-reduced singular point lying over the line at
/// infinity until only reduced points remain.
pub fn seidenberg_over_infinity(
    omega: &ProjectiveOneForm,
    symbols: &[Arc<Symbol>],
    opts: &ReductionOptions,
) -> Result<InfinityReduction> {
    let roots = singular_points_at_infinity(omega, symbols)?;
    let mut red = InfinityReduction { roots: roots.clone(), config: Configuration::default(), records: Vec::new() };
    let mut stack = Vec::new();
    for (ri, root) in roots.iter().enumerate() {
        let (a, b) = root.local_form(omega);
        let mut form = LocalOneForm::new(a, b);
        form.infinity = Some(Poly::var(2, 1));
        let class = classify(&form, opts.precision_cap)?;
        let id = red.config.add_root(ri);
        red.records.push(PointRecord { form, class, stage: Stage::Frontier, blowup: None });
        stack.push(id);
    }
    stack.reverse();
    while let Some(id) = stack.pop() {
        if red.records[id].class.is_simple() || red.records[id].class == SingularityClass::NonSingular {
            continue;
        }
        if red.blown_up_count() >= opts.budget_points {
            return Err(Error::BudgetExceeded { limit: opts.budget_points });
        }
        let bu = blow_up(&red.records[id].form, id, symbols)?;
        red.records[id].stage = Stage::Resolved;
        red.records[id].blowup = Some((bu.multiplicity, bu.dicritical));
        let mut new_ids = Vec::new();
        for child in &bu.children {
            let class = classify(&child.form, opts.precision_cap)?;
            new_ids.push(red.push(id, child, class, Stage::Frontier));
        }
        for cid in new_ids.into_iter().rev() {
            stack.push(cid);
        }
    }
    Ok(red)
}

/// Multiplicity, dicriticity and the kept children of one chain blow-up.
pub type StepOutcome = (u32, bool, Vec<(ChildPoint, SingularityClass)>);

/// One blow-up of a chain point; returns the children that are reduced with
/// a positive irrational ratio, already classified.
pub fn extended_step(
    form: &LocalOneForm,
    id: usize,
    symbols: &[Arc<Symbol>],
    cap: u32,
) -> Result<StepOutcome> {
    let bu = blow_up(form, id, symbols)?;
    let mut kept = Vec::new();
    for child in bu.children {
        let class = classify(&child.form, cap)?;
        if class == SingularityClass::Simple(SimpleKind::PositiveIrrational) {
            kept.push((child, class));
        }
    }
    Ok((bu.multiplicity, bu.dicritical, kept))
}

/// Follows the positive irrational chain from a point for `steps` blow-ups,
/// returning each new point's proximity set relative to the chain.
pub fn follow_chain(
    start: &LocalOneForm,
    steps: usize,
    symbols: &[Arc<Symbol>],
    cap: u32,
) -> Result<Vec<(Direction, Vec<usize>)>> {
    let mut out = Vec::new();
    let mut form = start.clone();
    let base = 1_000_000usize;
    for k in 0..steps {
        let (_, _, kept) = extended_step(&form, base + k, symbols, cap)?;
        let Some((child, _)) = kept.into_iter().next() else {
            break;
        };
        let prox: Vec<usize> = child.proximate_to.iter().filter(|&&p| p >= base).map(|&p| p - base).collect();
        out.push((child.direction.clone(), prox));
        form = child.form;
    }
    Ok(out)
}

pub fn digits_u64(cf: &CfExpansion) -> Vec<u64> {
    cf.digits.iter().map(|d| if d.is_negative() || d.is_zero() { 0 } else { u64::try_from(d).unwrap_or(u64::MAX) }).collect()
}
