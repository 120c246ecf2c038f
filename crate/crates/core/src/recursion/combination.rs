use num_traits::Zero;

use crate::exact::Value;
use crate::invariant::Invariant;

/// `coefficient * prod factors`. Factors are kept sorted so that equal
/// multisets compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Value,
    pub factors: Vec<Invariant>,
}

impl Term {
    pub fn new(coefficient: Value, factors: impl IntoIterator<Item = Invariant>) -> Self {
        let mut factors: Vec<Invariant> = factors.into_iter().collect();
        factors.sort();
        Term { coefficient, factors }
    }
}

/// A formal sum of terms with exact coefficients. Terms with identical
/// factor multisets are merged on insertion; zero terms are dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearCombination {
    terms: Vec<Term>,
}

impl LinearCombination {
    pub fn new() -> Self {
        LinearCombination::default()
    }

    pub fn single(coefficient: Value, factor: Invariant) -> Self {
        let mut lc = LinearCombination::new();
        lc.add(Term::new(coefficient, [factor]));
        lc
    }

    pub fn add(&mut self, term: Term) {
        assert!(!term.factors.is_empty(), "a term needs at least one factor");
        if let Some(existing) = self.terms.iter_mut().find(|t| t.factors == term.factors) {
            existing.coefficient += term.coefficient;
        } else {
            self.terms.push(term);
        }
        self.terms.retain(|t| !t.coefficient.is_zero());
    }

    pub fn add_product(&mut self, coefficient: i64, factors: impl IntoIterator<Item = Invariant>) {
        self.add(Term::new(Value::from_integer(coefficient.into()), factors));
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient_of(&self, factors: &[Invariant]) -> Value {
        let mut key = factors.to_vec();
        key.sort();
        self.terms.iter().find(|t| t.factors == key).map(|t| t.coefficient.clone()).unwrap_or_else(Value::zero)
    }

    /// Evaluates with a value for each factor.
    pub fn evaluate<E>(&self, mut value: impl FnMut(&Invariant) -> Result<Value, E>) -> Result<Value, E> {
        let mut total = Value::zero();
        for t in &self.terms {
            let mut prod = t.coefficient.clone();
            for f in &t.factors {
                prod *= value(f)?;
            }
            total += prod;
        }
        Ok(total)
    }
}

impl FromIterator<Term> for LinearCombination {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        let mut lc = LinearCombination::new();
        for t in iter {
            lc.add(t);
        }
        lc
    }
}
