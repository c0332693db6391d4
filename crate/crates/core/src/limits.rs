/// Enumeration caps shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest poset built by products and grids.
    pub max_elements: usize,
    /// Largest ground set whose sublattices are enumerated one by one.
    pub exhaustive_sublattices: usize,
    /// Largest strategy-profile space scanned for equilibria.
    pub max_profiles: usize,
    /// Largest contract set whose allocations are enumerated for stability.
    pub stable_set_contracts: usize,
    /// Largest contract set whose availability pairs are scanned exhaustively.
    pub characterization_contracts: usize,
    /// Largest per-agent contract set for exhaustive axiom checks.
    pub axiom_exhaustive: usize,
    /// Most divisions (or hospitals) in a quota-based choice rule.
    pub max_divisions: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_elements: 1024,
            exhaustive_sublattices: 12,
            max_profiles: 1_000_000,
            stable_set_contracts: 10,
            characterization_contracts: 6,
            axiom_exhaustive: 12,
            max_divisions: 12,
        }
    }
}
