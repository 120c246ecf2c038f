use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value as Json};

use crate::exact::{format_value, parse_value, Value};
use crate::grammar::parse_invariant;
use crate::invariant::Invariant;

/// Rule tag of a trace node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    String,
    Dilaton,
    Divisor,
    Trr,
    Base,
    ConventionZero,
    /// One summand `coefficient * prod children` of a rule's right-hand side.
    Product,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::String => "string",
            Rule::Dilaton => "dilaton",
            Rule::Divisor => "divisor",
            Rule::Trr => "trr",
            Rule::Base => "base",
            Rule::ConventionZero => "convention-zero",
            Rule::Product => "product",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        [Rule::String, Rule::Dilaton, Rule::Divisor, Rule::Trr, Rule::Base, Rule::ConventionZero, Rule::Product]
            .into_iter()
            .find(|r| r.name() == name)
    }

    pub fn is_leaf(self) -> bool {
        matches!(self, Rule::Base | Rule::ConventionZero)
    }
}

/// Derivation tree.
///
/// An invariant node carries the rule applied to it; its children are
/// product nodes, one per term of the right-hand side, whose children are
/// again invariant nodes. Subtrees are shared between repeated factors.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceNode {
    pub invariant: Option<Invariant>,
    pub rule: Rule,
    pub coefficient: Value,
    pub value: Value,
    pub children: Vec<Arc<TraceNode>>,
}

impl TraceNode {
    pub fn leaf(invariant: Invariant, rule: Rule, value: Value) -> Self {
        TraceNode { invariant: Some(invariant), rule, coefficient: Value::one(), value, children: Vec::new() }
    }

    /// Recomputes this node's value from its children (leaves return their own value).
    pub fn recompute(&self) -> Value {
        match self.rule {
            Rule::Base | Rule::ConventionZero => self.value.clone(),
            Rule::Product => self.children.iter().fold(self.coefficient.clone(), |acc, c| acc * &c.value),
            _ => self.children.iter().fold(Value::zero(), |acc, c| acc + &c.value),
        }
    }

    /// True when every internal node's value matches its children.
    pub fn is_consistent(&self) -> bool {
        self.recompute() == self.value && self.children.iter().all(|c| c.is_consistent())
    }

    /// Depth-first visit of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a TraceNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// Finds the first invariant node for `inv`.
    pub fn find(&self, inv: &Invariant) -> Option<&TraceNode> {
        let mut hit = None;
        self.walk(&mut |n| {
            if hit.is_none() && n.invariant.as_ref() == Some(inv) {
                hit = Some(n);
            }
        });
        hit
    }

    /// Longest chain of invariant nodes from the root.
    pub fn invariant_paths(&self) -> Vec<Vec<Invariant>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_paths(self, &mut path, &mut out);
        out
    }

    pub fn to_json(&self) -> Json {
        json!({
            "invariant": self.invariant.as_ref().map(|i| i.to_string()),
            "rule": self.rule.name(),
            "coefficient": format_value(&self.coefficient),
            "value": format_value(&self.value),
            "children": self.children.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(j: &Json) -> Option<TraceNode> {
        let invariant = match j.get("invariant")? {
            Json::Null => None,
            Json::String(s) => Some(parse_invariant(s).ok()?),
            _ => return None,
        };
        let children = j
            .get("children")?
            .as_array()?
            .iter()
            .map(|c| TraceNode::from_json(c).map(Arc::new))
            .collect::<Option<Vec<_>>>()?;
        Some(TraceNode {
            invariant,
            rule: Rule::from_name(j.get("rule")?.as_str()?)?,
            coefficient: parse_value(j.get("coefficient")?.as_str()?)?,
            value: parse_value(j.get("value")?.as_str()?)?,
            children,
        })
    }
}

fn collect_paths(node: &TraceNode, path: &mut Vec<Invariant>, out: &mut Vec<Vec<Invariant>>) {
    let pushed = node.invariant.clone().map(|i| path.push(i)).is_some();
    if node.children.is_empty() {
        out.push(path.clone());
    }
    for c in &node.children {
        collect_paths(c, path, out);
    }
    if pushed {
        path.pop();
    }
}
