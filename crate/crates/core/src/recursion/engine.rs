use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use thiserror::Error;

use super::combination::LinearCombination;
use super::rules::{apply_dilaton, apply_divisor, apply_string, apply_trr};
use super::trace::{Rule, TraceNode};
use crate::exact::{int_value, Value};
use crate::invariant::{classify, Codim, Invariant, InvariantShape, ShapeError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no base value for {invariant}: {reason}")]
pub struct BaseUnavailable {
    pub invariant: Invariant,
    pub reason: String,
}

/// Source of values for pure point invariants with psi classes.
pub trait BaseProvider: Send + Sync {
    fn base(&self, inv: &Invariant) -> Result<Value, BaseUnavailable>;

    /// Engine tag recorded next to values this provider supplied.
    fn tag(&self) -> &str;
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("{0} is not zero-dimensional (balance {1})")]
    DimensionInvalid(Invariant, i64),
    #[error(transparent)]
    Unsupported(#[from] ShapeError),
    #[error(transparent)]
    BaseUnavailable(#[from] BaseUnavailable),
    #[error("recursion revisited {0}")]
    Cycle(Invariant),
}

/// Get-or-compute map from canonical invariants to values and traces.
///
/// Concurrent reducers may both compute a missing key; the results are
/// equal, so whichever insert lands last is kept.
#[derive(Debug, Default)]
pub struct MemoCache {
    map: RwLock<HashMap<Invariant, Arc<TraceNode>>>,
}

impl MemoCache {
    pub fn new() -> Self {
        MemoCache::default()
    }

    pub fn get(&self, inv: &Invariant) -> Option<Arc<TraceNode>> {
        self.map.read().expect("memo lock").get(inv).cloned()
    }

    fn insert(&self, inv: Invariant, node: Arc<TraceNode>) {
        self.map.write().expect("memo lock").insert(inv, node);
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().expect("memo lock").clear();
    }

    /// Snapshot of cached values.
    pub fn entries(&self) -> Vec<(Invariant, Value)> {
        let mut v: Vec<_> =
            self.map.read().expect("memo lock").iter().map(|(k, n)| (k.clone(), n.value.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

/// Degree-0 and unstable values: unstable is zero; three ends with no psi
/// and total codimension two give one; any other degree-0 invariant is zero.
/// Returns `None` for invariants that go to the provider.
pub fn base_value(inv: &Invariant) -> Option<(Value, Rule)> {
    match classify(inv) {
        Ok(InvariantShape::Unstable) | Ok(InvariantShape::DimensionInvalid) => {
            Some((Value::zero(), Rule::ConventionZero))
        }
        Ok(InvariantShape::DegreeZero) => {
            let codim: u32 = inv.insertions().iter().map(|i| i.codim.value()).sum();
            if inv.len() == 3 && inv.total_psi() == 0 && codim == 2 {
                Some((Value::one(), Rule::Base))
            } else {
                Some((Value::zero(), Rule::ConventionZero))
            }
        }
        _ => None,
    }
}

/// The recursion engine: a provider plus a memo cache.
pub struct Engine<P: BaseProvider> {
    provider: P,
    cache: MemoCache,
}

impl<P: BaseProvider> Engine<P> {
    pub fn new(provider: P) -> Self {
        Engine { provider, cache: MemoCache::new() }
    }

    pub fn provider(&self) -> &P {
        &self.provider
    }

    pub fn cache(&self) -> &MemoCache {
        &self.cache
    }

    /// Value of a zero-dimensional invariant with its derivation.
    pub fn reduce(&self, inv: &Invariant) -> Result<(Value, Arc<TraceNode>), EngineError> {
        let balance = inv.dimension_balance();
        if balance != 0 {
            return Err(EngineError::DimensionInvalid(inv.clone(), balance));
        }
        classify(inv)?;
        let node = self.node(inv, &mut Vec::new())?;
        Ok((node.value.clone(), node))
    }

    pub fn value(&self, inv: &Invariant) -> Result<Value, EngineError> {
        self.reduce(inv).map(|(v, _)| v)
    }

    fn node(&self, inv: &Invariant, path: &mut Vec<Invariant>) -> Result<Arc<TraceNode>, EngineError> {
        if let Some(hit) = self.cache.get(inv) {
            return Ok(hit);
        }
        if path.contains(inv) {
            return Err(EngineError::Cycle(inv.clone()));
        }
        let node = if let Some((value, rule)) = base_value(inv) {
            TraceNode::leaf(inv.clone(), rule, value)
        } else {
            let shape = classify(inv)?;
            let (rule, lc) = match shape {
                InvariantShape::StringHead => (Rule::String, apply_string(inv)),
                InvariantShape::DilatonHead => (Rule::Dilaton, apply_dilaton(inv)),
                InvariantShape::DivisorHead => (Rule::Divisor, apply_divisor(inv)),
                InvariantShape::TrrHead => (Rule::Trr, apply_trr(inv)),
                InvariantShape::PureTauPoint => {
                    debug_assert_eq!(inv.count(Codim::Point), inv.len());
                    let value = self.provider.base(inv)?;
                    return Ok(self.store(inv, TraceNode::leaf(inv.clone(), Rule::Base, value)));
                }
                _ => unreachable!("base_value covers {shape:?}"),
            };
            let lc = lc.expect("classifier and rule preconditions agree");
            path.push(inv.clone());
            let children = self.expand(&lc, path);
            path.pop();
            let children = children?;
            let value = children.iter().fold(Value::zero(), |acc, c| acc + &c.value);
            TraceNode { invariant: Some(inv.clone()), rule, coefficient: Value::one(), value, children }
        };
        Ok(self.store(inv, node))
    }

    fn expand(&self, lc: &LinearCombination, path: &mut Vec<Invariant>) -> Result<Vec<Arc<TraceNode>>, EngineError> {
        let mut out = Vec::with_capacity(lc.len());
        for term in lc.terms() {
            let mut factors = Vec::with_capacity(term.factors.len());
            let mut value = term.coefficient.clone();
            for f in &term.factors {
                let child = self.node(f, path)?;
                value *= &child.value;
                factors.push(child);
            }
            out.push(Arc::new(TraceNode {
                invariant: None,
                rule: Rule::Product,
                coefficient: term.coefficient.clone(),
                value,
                children: factors,
            }));
        }
        Ok(out)
    }

    fn store(&self, inv: &Invariant, node: TraceNode) -> Arc<TraceNode> {
        let node = Arc::new(node);
        self.cache.insert(inv.clone(), node.clone());
        node
    }
}

/// Provider for engines that only need rule-reachable values; every pure
/// point request fails.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoBase;

impl BaseProvider for NoBase {
    fn base(&self, inv: &Invariant) -> Result<Value, BaseUnavailable> {
        Err(BaseUnavailable { invariant: inv.clone(), reason: "no provider configured".into() })
    }

    fn tag(&self) -> &str {
        "none"
    }
}

/// Fixed values, e.g. for tests or a hand-written table.
#[derive(Clone, Debug, Default)]
pub struct MapProvider {
    pub values: HashMap<Invariant, Value>,
}

impl MapProvider {
    pub fn with(mut self, inv: Invariant, v: i64) -> Self {
        self.values.insert(inv, int_value(v));
        self
    }
}

impl BaseProvider for MapProvider {
    fn base(&self, inv: &Invariant) -> Result<Value, BaseUnavailable> {
        self.values
            .get(inv)
            .cloned()
            .ok_or_else(|| BaseUnavailable { invariant: inv.clone(), reason: "not in table".into() })
    }

    fn tag(&self) -> &str {
        "table"
    }
}

impl<T: BaseProvider + ?Sized> BaseProvider for &T {
    fn base(&self, inv: &Invariant) -> Result<Value, BaseUnavailable> {
        (**self).base(inv)
    }

    fn tag(&self) -> &str {
        (**self).tag()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_invariant;

    fn p(s: &str) -> Invariant {
        parse_invariant(s).unwrap()
    }

    fn known_bases() -> MapProvider {
        MapProvider::default().with(p("<tau_0(2) tau_1(2)^2>_2"), 1)
    }

    #[test]
    fn headline_with_table_base() {
        let engine = Engine::new(known_bases());
        let (v, trace) = engine.reduce(&p("<tau_1(1) tau_1(2)^2>_2")).unwrap();
        assert_eq!(v, int_value(3));
        assert!(trace.is_consistent());
        let zero = trace.find(&p("<tau_0(0) tau_0(1)>_0")).unwrap();
        assert_eq!(zero.value, Value::zero());
        assert_eq!(zero.rule, Rule::ConventionZero);
    }

    #[test]
    fn degree_zero_conventions() {
        assert_eq!(base_value(&p("<tau_0(0) tau_0(1)>_0")).unwrap().0, Value::zero());
        assert_eq!(base_value(&p("<tau_0(0) tau_0(1)^2>_0")).unwrap().0, Value::one());
        assert_eq!(base_value(&p("<tau_0(0)^2 tau_0(2)>_0")).unwrap().0, Value::one());
        assert_eq!(base_value(&p("<tau_1(0) tau_0(0)^2>_0")).unwrap().0, Value::zero());
        assert!(base_value(&p("<tau_0(2)^5>_2")).is_none());
    }

    #[test]
    fn missing_base_is_reported() {
        let engine = Engine::new(NoBase);
        let err = engine.reduce(&p("<tau_1(1) tau_1(2)^2>_2")).unwrap_err();
        assert!(matches!(err, EngineError::BaseUnavailable(b) if b.invariant == p("<tau_0(2) tau_1(2)^2>_2")));
    }

    #[test]
    fn top_level_guards() {
        let engine = Engine::new(NoBase);
        assert!(matches!(engine.reduce(&p("<tau_0(2)>_1")), Err(EngineError::DimensionInvalid(_, 1))));
        assert!(matches!(engine.reduce(&p("<tau_2(1) tau_1(2) tau_0(2)>_2")), Err(EngineError::Unsupported(_))));
    }

    #[test]
    fn warm_cache_matches_cold() {
        let engine = Engine::new(known_bases());
        let inv = p("<tau_1(1) tau_1(2)^2>_2");
        let (cold, t1) = engine.reduce(&inv).unwrap();
        let (warm, t2) = engine.reduce(&inv).unwrap();
        assert_eq!(cold, warm);
        assert_eq!(t1.to_json(), t2.to_json());
    }

    #[test]
    fn trace_json_round_trip() {
        let engine = Engine::new(known_bases());
        let (_, t) = engine.reduce(&p("<tau_1(1) tau_1(2)^2>_2")).unwrap();
        let back = TraceNode::from_json(&t.to_json()).unwrap();
        assert_eq!(&back, t.as_ref());
    }
}
