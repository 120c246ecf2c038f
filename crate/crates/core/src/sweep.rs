//! Engine equivalence and configuration independence over a family.

use crate::enumerate::{evaluate_seeded, OracleOptions, OracleProvider};
use crate::exact::{format_value, Value};
use crate::invariant::Invariant;
use crate::par::Execution;
use crate::recursion::{Engine, EngineError};

/// What happened to one invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Both engines agree on every seed.
    Equal(Value),
    /// The oracle gives different values on different seeds.
    SeedDependent(Vec<(u64, Value)>),
    /// The oracle could not evaluate the invariant.
    OracleFailed(String),
    /// The recursion rules do not reach the invariant.
    OutsideRules { oracle: Value, reason: String },
    /// The recursion fails for another reason (a base value is missing).
    RecursionFailed { oracle: Value, error: String },
    /// Both engines produce values and they differ.
    Mismatch { seed: u64, oracle: Value, recursion: Value },
}

impl Outcome {
    pub fn is_equal(&self) -> bool {
        matches!(self, Outcome::Equal(_))
    }

    pub fn describe(&self) -> String {
        match self {
            Outcome::Equal(v) => format_value(v),
            Outcome::SeedDependent(vs) => {
                let parts: Vec<String> = vs.iter().map(|(s, v)| format!("seed {s}: {}", format_value(v))).collect();
                format!("seed dependent ({})", parts.join(", "))
            }
            Outcome::OracleFailed(e) => format!("oracle failed: {e}"),
            Outcome::OutsideRules { oracle, reason } => {
                format!("oracle {} but recursion unsupported: {reason}", format_value(oracle))
            }
            Outcome::RecursionFailed { oracle, error } => {
                format!("oracle {} but recursion failed: {error}", format_value(oracle))
            }
            Outcome::Mismatch { seed, oracle, recursion } => {
                format!("seed {seed}: oracle {} vs recursion {}", format_value(oracle), format_value(recursion))
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub seeds: Vec<u64>,
    pub results: Vec<(Invariant, Outcome)>,
}

impl SweepReport {
    pub fn equal(&self) -> usize {
        self.results.iter().filter(|(_, o)| o.is_equal()).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &(Invariant, Outcome)> {
        self.results.iter().filter(|(_, o)| !o.is_equal())
    }

    /// Engine equivalence holds on every invariant.
    pub fn holds(&self) -> bool {
        self.failures().next().is_none()
    }

    /// Invariants where both engines gave a value and the values differ.
    pub fn value_mismatches(&self) -> usize {
        self.results.iter().filter(|(_, o)| matches!(o, Outcome::Mismatch { .. })).count()
    }

    pub fn seed_dependent(&self) -> usize {
        self.results.iter().filter(|(_, o)| matches!(o, Outcome::SeedDependent(_))).count()
    }

    pub fn outside_rules(&self) -> usize {
        self.results.iter().filter(|(_, o)| matches!(o, Outcome::OutsideRules { .. })).count()
    }
}

/// Evaluates every invariant of `family` with the oracle on each seed and
/// with the recursion engine backed by the oracle on the same seed.
pub fn equivalence_sweep(family: &[Invariant], seeds: &[u64], execution: Execution) -> SweepReport {
    assert!(!seeds.is_empty(), "a sweep needs at least one seed");
    // the outer map carries the parallelism
    let opts = OracleOptions { execution: Execution::Sequential, ..OracleOptions::default() };
    let engines: Vec<(u64, Engine<OracleProvider>)> =
        seeds.iter().map(|&s| (s, Engine::new(OracleProvider { seed: s, options: opts }))).collect();
    let results = execution.map(family, |inv| (inv.clone(), check_one(inv, &engines, &opts)));
    SweepReport { seeds: seeds.to_vec(), results }
}

fn check_one(inv: &Invariant, engines: &[(u64, Engine<OracleProvider>)], opts: &OracleOptions) -> Outcome {
    let mut values = Vec::with_capacity(engines.len());
    for (seed, _) in engines {
        match evaluate_seeded(inv, *seed, opts) {
            Ok((v, _)) => values.push((*seed, v)),
            Err(e) => return Outcome::OracleFailed(e.to_string()),
        }
    }
    if values.iter().any(|(_, v)| *v != values[0].1) {
        return Outcome::SeedDependent(values);
    }
    let oracle = values[0].1.clone();
    for (seed, engine) in engines {
        match engine.value(inv) {
            Ok(r) if r == oracle => {}
            Ok(recursion) => return Outcome::Mismatch { seed: *seed, oracle, recursion },
            Err(EngineError::Unsupported(e)) => {
                let reason = match e {
                    crate::invariant::ShapeError::Unsupported { invariant, reason } => format!("{invariant}: {reason}"),
                };
                return Outcome::OutsideRules { oracle, reason };
            }
            Err(e) => return Outcome::RecursionFailed { oracle, error: e.to_string() },
        }
    }
    Outcome::Equal(oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_invariant;

    #[test]
    fn small_sweep() {
        let fam: Vec<Invariant> = ["<tau_0(2)^2>_1", "<tau_1(1) tau_1(2)^2>_2", "<tau_1(1) tau_0(2)>_1"]
            .iter()
            .map(|s| parse_invariant(s).unwrap())
            .collect();
        let report = equivalence_sweep(&fam, &[1, 2], Execution::default());
        assert_eq!(report.equal(), 2);
        assert_eq!(report.outside_rules(), 1);
        assert_eq!(report.value_mismatches(), 0);
        assert!(!report.holds());
    }
}
