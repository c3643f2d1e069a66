//! Work caps for the operations that can blow up combinatorially.

/// Size caps shared by the expensive operations.
///
/// Defaults are deliberately conservative: the toolkit targets desk-scale
/// inputs, and every cap can be raised explicitly (from the CLI via
/// `--max-carrier`, `--max-universe`, `--max-model`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest carrier a constructed algebra (product, quotient input) may
    /// have.
    pub max_carrier: usize,
    /// Largest carrier for which the full congruence lattice is enumerated.
    pub max_lattice_carrier: usize,
    /// Cap on term-universe size and on free-algebra construction (both the
    /// number of assignments and the number of discovered elements).
    pub max_universe: usize,
    /// Default bound for countermodel enumeration.
    pub max_model_size: usize,
    /// Generic work budget (axiom instantiations, model tables scanned,
    /// section-search nodes).
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_carrier: 64,
            max_lattice_carrier: 8,
            max_universe: 20_000,
            max_model_size: 3,
            max_steps: 10_000_000,
        }
    }
}
