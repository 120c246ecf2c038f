//! Descendant invariants `<prod tau_a(b)>_d`, their canonical form, the
//! dimension condition and the shape classifier used by the recursion.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Codimension of the incidence object a marked end is required to meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Codim {
    /// The whole plane: no incidence condition.
    Free = 0,
    /// A tropical line.
    Line = 1,
    /// A point.
    Point = 2,
}

impl Codim {
    pub fn value(self) -> u32 {
        self as u32
    }

    pub fn from_value(v: u32) -> Option<Codim> {
        match v {
            0 => Some(Codim::Free),
            1 => Some(Codim::Line),
            2 => Some(Codim::Point),
            _ => None,
        }
    }
}

/// One marked-end condition `tau_psi(codim)`.
///
/// The derived order compares codimension first, then psi power; the
/// canonical form of an invariant lists insertions in descending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Insertion {
    pub codim: Codim,
    pub psi: u32,
}

impl Insertion {
    pub const fn new(psi: u32, codim: Codim) -> Self {
        Insertion { codim, psi }
    }

    pub const fn free(psi: u32) -> Self {
        Insertion::new(psi, Codim::Free)
    }

    pub const fn line(psi: u32) -> Self {
        Insertion::new(psi, Codim::Line)
    }

    pub const fn point(psi: u32) -> Self {
        Insertion::new(psi, Codim::Point)
    }

    pub fn lowered(self) -> Option<Insertion> {
        self.psi.checked_sub(1).map(|psi| Insertion { psi, ..self })
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau_{}({})", self.psi, self.codim.value())
    }
}

/// A degree together with a multiset of insertions.
///
/// Values are always held in canonical form, so derived equality and hashing
/// are multiset equality and can key the memo cache directly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Invariant {
    degree: u32,
    insertions: Vec<Insertion>,
}

impl Invariant {
    /// Builds the canonical invariant for an arbitrary insertion list.
    pub fn new(degree: u32, insertions: impl IntoIterator<Item = Insertion>) -> Self {
        let mut insertions: Vec<Insertion> = insertions.into_iter().collect();
        insertions.sort_unstable_by(|a, b| b.cmp(a));
        Invariant { degree, insertions }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    pub fn len(&self) -> usize {
        self.insertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
    }

    pub fn count(&self, codim: Codim) -> usize {
        self.insertions.iter().filter(|i| i.codim == codim).count()
    }

    pub fn contains(&self, ins: Insertion) -> bool {
        self.insertions.contains(&ins)
    }

    pub fn total_psi(&self) -> u64 {
        self.insertions.iter().map(|i| u64::from(i.psi)).sum()
    }

    /// Returns the canonical-form equivalent. Invariants are stored
    /// canonically, so this is a clone; it exists so callers can state intent.
    pub fn canonicalize(&self) -> Invariant {
        Invariant::new(self.degree, self.insertions.iter().copied())
    }

    /// Removes one copy of `ins`, or returns `None` when absent.
    pub fn without(&self, ins: Insertion) -> Option<Invariant> {
        let pos = self.insertions.iter().position(|&i| i == ins)?;
        let mut rest = self.insertions.clone();
        rest.remove(pos);
        Some(Invariant::new(self.degree, rest))
    }

    /// Replaces the insertion at `index` (in canonical order) with `ins`.
    pub fn replaced(&self, index: usize, ins: Insertion) -> Invariant {
        let mut rest = self.insertions.clone();
        rest[index] = ins;
        Invariant::new(self.degree, rest)
    }

    /// `(l + m + n + 3d - 1) - (m + 2n + sum of psi powers)`; zero exactly
    /// when the defining intersection product is zero-dimensional.
    pub fn dimension_balance(&self) -> i64 {
        let dim = self.insertions.len() as i64 + 3 * i64::from(self.degree) - 1;
        let codim: i64 = self.insertions.iter().map(|i| i64::from(i.codim.value()) + i64::from(i.psi)).sum();
        dim - codim
    }

    pub fn classify(&self) -> Result<InvariantShape, ShapeError> {
        classify(self)
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::grammar::format_invariant(self))
    }
}

/// Which rule the recursion engine dispatches an invariant to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvariantShape {
    PureTauPoint,
    TrrHead,
    StringHead,
    DilatonHead,
    DivisorHead,
    DegreeZero,
    Unstable,
    DimensionInvalid,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("unsupported shape {invariant}: {reason}")]
    Unsupported { invariant: Invariant, reason: String },
}

impl ShapeError {
    fn unsupported(inv: &Invariant, reason: &str) -> Self {
        ShapeError::Unsupported { invariant: inv.clone(), reason: reason.to_string() }
    }
}

/// Classifies an invariant.
///
/// Precedence: DimensionInvalid, Unstable, DegreeZero (degree 0 with exactly
/// three insertions), StringHead, DilatonHead, DivisorHead, TrrHead,
/// DegreeZero (any remaining degree 0), PureTauPoint. Three-point degree-0
/// invariants are initial conditions; the string, dilaton and divisor
/// equations only hold when the invariant left after removing an end is
/// stable, so they must not be applied there.
pub fn classify(inv: &Invariant) -> Result<InvariantShape, ShapeError> {
    if inv.dimension_balance() != 0 {
        return Ok(InvariantShape::DimensionInvalid);
    }
    if inv.degree() == 0 && inv.len() < 3 {
        return Ok(InvariantShape::Unstable);
    }
    if inv.degree() == 0 && inv.len() == 3 {
        return Ok(InvariantShape::DegreeZero);
    }
    if inv.contains(Insertion::free(0)) {
        return Ok(InvariantShape::StringHead);
    }
    if inv.contains(Insertion::free(1)) {
        return Ok(InvariantShape::DilatonHead);
    }
    let free = inv.count(Codim::Free);
    if inv.contains(Insertion::line(0)) && free == 0 {
        return Ok(InvariantShape::DivisorHead);
    }
    if free > 0 {
        return Err(ShapeError::unsupported(inv, "unconstrained end with psi power >= 2"));
    }
    let lines: Vec<&Insertion> = inv.insertions().iter().filter(|i| i.codim == Codim::Line).collect();
    if lines.iter().any(|l| l.psi >= 2) {
        return Err(ShapeError::unsupported(inv, "psi power >= 2 at a line-constrained end"));
    }
    if lines.len() > 1 {
        return Err(ShapeError::unsupported(inv, "more than one line-constrained end alongside a psi class at a line"));
    }
    if lines.len() == 1 {
        // remaining insertions are all point conditions here
        if inv.count(Codim::Point) >= 2 {
            return Ok(InvariantShape::TrrHead);
        }
        return Err(ShapeError::unsupported(
            inv,
            "psi class at a line-constrained end needs at least two point conditions",
        ));
    }
    if inv.degree() == 0 {
        return Ok(InvariantShape::DegreeZero);
    }
    Ok(InvariantShape::PureTauPoint)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(d: u32, ins: &[(u32, u32)]) -> Invariant {
        Invariant::new(d, ins.iter().map(|&(a, b)| Insertion::new(a, Codim::from_value(b).unwrap())))
    }

    #[test]
    fn canonical_order_points_first_descending_psi() {
        let i = inv(2, &[(1, 2), (1, 1), (1, 2)]);
        assert_eq!(i.insertions(), &[Insertion::point(1), Insertion::point(1), Insertion::line(1)]);
        let j = inv(1, &[(0, 2), (0, 2)]);
        assert_eq!(j, j.canonicalize());
    }

    #[test]
    fn balance_examples() {
        assert_eq!(inv(2, &[(1, 1), (1, 2), (1, 2)]).dimension_balance(), 0);
        assert_eq!(inv(1, &[(0, 2), (0, 2)]).dimension_balance(), 0);
        assert_eq!(inv(1, &[(0, 2)]).dimension_balance(), 1);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&inv(2, &[(1, 1), (1, 2), (1, 2)])), Ok(InvariantShape::TrrHead));
        assert_eq!(classify(&inv(0, &[(0, 0), (0, 1)])), Ok(InvariantShape::Unstable));
        assert_eq!(classify(&inv(2, &[(0, 2); 5])), Ok(InvariantShape::PureTauPoint));
        assert_eq!(classify(&inv(0, &[(0, 0), (0, 1), (0, 1)])), Ok(InvariantShape::DegreeZero));
        assert_eq!(classify(&inv(1, &[(0, 2)])), Ok(InvariantShape::DimensionInvalid));
    }

    #[test]
    fn classify_unsupported() {
        // tau_2 at a line
        assert!(classify(&inv(2, &[(2, 1), (1, 2), (0, 2)])).is_err());
        // psi at a line next to another line
        assert!(classify(&inv(2, &[(1, 1), (0, 1), (0, 2), (0, 2), (1, 2)])).is_ok());
        let two_lines = inv(2, &[(1, 1), (1, 1), (0, 2), (0, 2), (0, 2)]);
        assert_eq!(two_lines.dimension_balance(), 0);
        assert!(classify(&two_lines).is_err());
        // single point next to a psi line
        let lone = inv(1, &[(1, 1), (0, 2)]);
        assert_eq!(lone.dimension_balance(), 0);
        assert!(classify(&lone).is_err());
    }
}
