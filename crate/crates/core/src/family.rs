//! The invariants covered by the engine-equivalence sweep.

use num_traits::Zero;

use crate::exact::Value;
use crate::invariant::{Codim, Insertion, Invariant};
use crate::recursion::{BaseProvider, BaseUnavailable, Engine, EngineError};

/// Every zero-dimensional invariant of degree at most `max_degree` with at
/// most `max_insertions` insertions and at most one line condition, whose
/// psi power is at most 1. Free ends and point conditions may carry any psi
/// power the dimension allows.
pub fn sweep_family(max_degree: u32, max_insertions: usize) -> Vec<Invariant> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        for n in 0..=max_insertions {
            // sum of codim + psi over the insertions
            let Some(target) = (n + 3 * d as usize).checked_sub(1) else { continue };
            let alpha = alphabet(target);
            multisets(&alpha, n, target, alpha.len(), &mut Vec::new(), &mut |ins| {
                let inv = Invariant::new(d, ins.iter().copied());
                debug_assert_eq!(inv.dimension_balance(), 0);
                out.push(inv);
            });
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The same family restricted to unconstrained ends with psi power at most 1,
/// which is the range the string and dilaton equations can reach.
pub fn first_descendant_family(max_degree: u32, max_insertions: usize) -> Vec<Invariant> {
    sweep_family(max_degree, max_insertions)
        .into_iter()
        .filter(|inv| inv.insertions().iter().all(|i| i.codim != Codim::Free || i.psi <= 1))
        .collect()
}

/// Placeholder base values: reachability does not depend on them.
struct ZeroBase;

impl BaseProvider for ZeroBase {
    fn base(&self, _: &Invariant) -> Result<Value, BaseUnavailable> {
        Ok(Value::zero())
    }

    fn tag(&self) -> &str {
        "zero"
    }
}

/// Whether the recursion rules reduce `inv` to base values without meeting
/// an unsupported shape.
pub fn rule_reachable(inv: &Invariant) -> bool {
    !matches!(Engine::new(ZeroBase).value(inv), Err(EngineError::Unsupported(_) | EngineError::DimensionInvalid(..)))
}

/// The members of [`sweep_family`] the recursion rules reach.
pub fn reachable_family(max_degree: u32, max_insertions: usize) -> Vec<Invariant> {
    let mut fam = sweep_family(max_degree, max_insertions);
    let engine = Engine::new(ZeroBase);
    fam.retain(|inv| !matches!(engine.value(inv), Err(EngineError::Unsupported(_))));
    fam
}

/// Insertions of weight at most `max_weight`; multisets are built from
/// non-increasing indices into this list.
fn alphabet(max_weight: usize) -> Vec<Insertion> {
    let mut a = Vec::new();
    for c in [Codim::Free, Codim::Line, Codim::Point] {
        let top = if c == Codim::Line { 1 } else { max_weight.saturating_sub(c.value() as usize) };
        for psi in 0..=top as u32 {
            if (c.value() + psi) as usize <= max_weight {
                a.push(Insertion::new(psi, c));
            }
        }
    }
    a
}

fn multisets(
    alpha: &[Insertion],
    n: usize,
    target: usize,
    end: usize,
    cur: &mut Vec<Insertion>,
    emit: &mut impl FnMut(&[Insertion]),
) {
    if n == 0 {
        if target == 0 {
            emit(cur);
        }
        return;
    }
    for (k, ins) in alpha[..end].iter().enumerate() {
        let w = (ins.codim.value() + ins.psi) as usize;
        if w > target || (ins.codim == Codim::Line && cur.iter().any(|i| i.codim == Codim::Line)) {
            continue;
        }
        cur.push(*ins);
        multisets(alpha, n - 1, target - w, k + 1, cur, emit);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_invariant;

    #[test]
    fn family_contents() {
        let fam = sweep_family(2, 7);
        let first = first_descendant_family(2, 7);
        assert!(first.len() < fam.len());
        assert!(fam.contains(&parse_invariant("<tau_2(0) tau_0(2)>_1").unwrap()));
        assert!(!first.contains(&parse_invariant("<tau_2(0) tau_0(2)>_1").unwrap()));
        for s in ["<tau_1(1) tau_1(2)^2>_2", "<tau_0(2)^5>_2", "<tau_1(0) tau_0(2)^2>_1", "<tau_1(1) tau_0(2)^4>_2"] {
            assert!(fam.contains(&parse_invariant(s).unwrap()), "{s}");
        }
        for inv in &fam {
            assert_eq!(inv.dimension_balance(), 0);
            assert!(inv.len() <= 7 && inv.degree() <= 2);
            assert!(inv.count(Codim::Line) <= 1);
            assert!(inv.insertions().iter().all(|i| i.codim != Codim::Line || i.psi <= 1));
        }
    }

    #[test]
    fn reachability() {
        assert!(rule_reachable(&parse_invariant("<tau_1(1) tau_1(2)^2>_2").unwrap()));
        assert!(!rule_reachable(&parse_invariant("<tau_1(1) tau_0(2)>_1").unwrap()));
        assert!(!rule_reachable(&parse_invariant("<tau_2(0) tau_0(2)>_1").unwrap()));
        // reached only through a sub-invariant outside the rules
        let reach = reachable_family(2, 7);
        assert!(reach.iter().all(rule_reachable));
        assert_eq!((reach.len(), sweep_family(2, 7).len()), (661, 2399));
    }
}
