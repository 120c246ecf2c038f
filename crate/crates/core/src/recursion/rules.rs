//! Rewrite rules: the topological recursion relation for a psi class at a
//! line-constrained end, and the string, dilaton and divisor equations.

use thiserror::Error;

use super::combination::{LinearCombination, Term};
use crate::exact::int_value;
use crate::invariant::{classify, Codim, Insertion, Invariant, InvariantShape};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule} does not apply to {invariant}")]
pub struct ShapeViolation {
    pub rule: &'static str,
    pub invariant: Invariant,
}

fn violation(rule: &'static str, inv: &Invariant) -> ShapeViolation {
    ShapeViolation { rule, invariant: inv.clone() }
}

/// One raw summand of the splitting sum: `eps + zeta = 2`, `d1 + d2 = d`,
/// and the point insertions (by index into the point list) on the side of
/// the line-constrained end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndex {
    pub epsilon: u32,
    pub zeta: u32,
    pub d1: u32,
    pub d2: u32,
    pub left_points: Vec<usize>,
}

/// Full index set of the splitting sum before any dimension pruning.
///
/// `roles` names the two point insertions that stay on the far side. Order:
/// epsilon ascending, then `d1` ascending, then subsets by bitmask.
pub fn splitting_terms(point_count: usize, degree: u32, roles: (usize, usize)) -> Vec<SplitIndex> {
    assert!(roles.0 != roles.1 && roles.0 < point_count && roles.1 < point_count, "bad roles");
    let free: Vec<usize> = (0..point_count).filter(|&k| k != roles.0 && k != roles.1).collect();
    let mut out = Vec::new();
    for epsilon in 0..=2 {
        for d1 in 0..=degree {
            for mask in 0u32..(1 << free.len()) {
                let left_points =
                    free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &k)| k).collect();
                out.push(SplitIndex { epsilon, zeta: 2 - epsilon, d1, d2: degree - d1, left_points });
            }
        }
    }
    out
}

/// `tau_0(c)`: no psi class, codimension `c`.
fn codim_end(c: u32) -> Insertion {
    Insertion::new(0, Codim::from_value(c).expect("codimension at most 2"))
}

fn point_insertions(inv: &Invariant) -> Vec<Insertion> {
    inv.insertions().iter().copied().filter(|i| i.codim == Codim::Point).collect()
}

/// Recursion relation with the first two point insertions (canonical order)
/// in the distinguished roles.
pub fn apply_trr(inv: &Invariant) -> Result<LinearCombination, ShapeViolation> {
    apply_trr_with_roles(inv, (0, 1))
}

/// `<tau_1(1) prod tau_r(2)>_d = sum <tau_0(eps) tau_0(1) prod_I>_{d1} <tau_0(zeta) prod_J>_{d2}
///   + 3 <tau_0(2) prod tau_r(2)>_d`.
///
/// Summands where a factor fails the dimension condition are dropped.
/// Summands with an unstable degree-0 factor are kept; they evaluate to zero.
pub fn apply_trr_with_roles(inv: &Invariant, roles: (usize, usize)) -> Result<LinearCombination, ShapeViolation> {
    if classify(inv) != Ok(InvariantShape::TrrHead) {
        return Err(violation("trr", inv));
    }
    let points = point_insertions(inv);
    if roles.0 == roles.1 || roles.0 >= points.len() || roles.1 >= points.len() {
        return Err(violation("trr", inv));
    }
    let mut lc = LinearCombination::new();
    for split in splitting_terms(points.len(), inv.degree(), roles) {
        let mut is_left = vec![false; points.len()];
        split.left_points.iter().for_each(|&k| is_left[k] = true);
        let left = Invariant::new(
            split.d1,
            [codim_end(split.epsilon), Insertion::line(0)]
                .into_iter()
                .chain(points.iter().zip(&is_left).filter(|(_, &l)| l).map(|(p, _)| *p)),
        );
        let right = Invariant::new(
            split.d2,
            std::iter::once(codim_end(split.zeta))
                .chain(points.iter().zip(&is_left).filter(|(_, &l)| !l).map(|(p, _)| *p)),
        );
        if left.dimension_balance() != 0 || right.dimension_balance() != 0 {
            continue;
        }
        lc.add(Term::new(int_value(1), [left, right]));
    }
    let three = Invariant::new(inv.degree(), std::iter::once(Insertion::point(0)).chain(points.iter().copied()));
    lc.add(Term::new(int_value(3), [three]));
    Ok(lc)
}

/// Removes one `tau_0(0)` and lowers each remaining positive psi power in turn.
pub fn apply_string(inv: &Invariant) -> Result<LinearCombination, ShapeViolation> {
    let rest = inv.without(Insertion::free(0)).ok_or_else(|| violation("string", inv))?;
    let mut lc = LinearCombination::new();
    for (k, ins) in rest.insertions().iter().enumerate() {
        if let Some(lower) = ins.lowered() {
            lc.add(Term::new(int_value(1), [rest.replaced(k, lower)]));
        }
    }
    Ok(lc)
}

/// Removes one `tau_1(0)`: coefficient `n + 3d - 2`, where `n` counts the
/// remaining marked ends and `3d` the non-contracted ends, which are ends of
/// the underlying abstract curve as well.
pub fn apply_dilaton(inv: &Invariant) -> Result<LinearCombination, ShapeViolation> {
    let rest = inv.without(Insertion::free(1)).ok_or_else(|| violation("dilaton", inv))?;
    if rest.degree() == 0 && rest.len() < 3 {
        return Ok(LinearCombination::new());
    }
    let coefficient = rest.len() as i64 + 3 * i64::from(rest.degree()) - 2;
    let mut lc = LinearCombination::new();
    lc.add_product(coefficient, [rest]);
    Ok(lc)
}

/// Removes one `tau_0(1)`: `d <rest>` plus, for each remaining `tau_a(1)`
/// with `a >= 1`, the term with it replaced by `tau_{a-1}(2)`. Point
/// insertions contribute nothing (a line meets a point in codimension 3).
pub fn apply_divisor(inv: &Invariant) -> Result<LinearCombination, ShapeViolation> {
    if inv.count(Codim::Free) > 0 {
        return Err(violation("divisor", inv));
    }
    let rest = inv.without(Insertion::line(0)).ok_or_else(|| violation("divisor", inv))?;
    if rest.degree() == 0 && rest.len() < 3 {
        return Ok(LinearCombination::new());
    }
    let mut lc = LinearCombination::new();
    lc.add_product(i64::from(rest.degree()), [rest.clone()]);
    for (k, ins) in rest.insertions().iter().enumerate() {
        if ins.codim == Codim::Line && ins.psi >= 1 {
            lc.add_product(1, [rest.replaced(k, Insertion::point(ins.psi - 1))]);
        }
    }
    Ok(lc)
}
