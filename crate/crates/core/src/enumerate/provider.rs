use super::oracle::{evaluate_seeded, OracleOptions};
use crate::exact::Value;
use crate::invariant::Invariant;
use crate::recursion::{BaseProvider, BaseUnavailable};

/// Base values counted by the oracle on the configuration drawn from `seed`.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleProvider {
    pub seed: u64,
    pub options: OracleOptions,
}

impl OracleProvider {
    pub fn new(seed: u64) -> Self {
        OracleProvider { seed, options: OracleOptions::default() }
    }
}

impl BaseProvider for OracleProvider {
    fn base(&self, inv: &Invariant) -> Result<Value, BaseUnavailable> {
        evaluate_seeded(inv, self.seed, &self.options)
            .map(|(v, _)| v)
            .map_err(|e| BaseUnavailable { invariant: inv.clone(), reason: e.to_string() })
    }

    fn tag(&self) -> &str {
        "oracle"
    }
}
