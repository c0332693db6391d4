//! Many-to-one matching with contracts when firms and workers choose through
//! choice correspondences.
//!
//! Sets of contracts are `u64` masks over the contract indices of a
//! [`ContractUniverse`]; each agent's [`ChoiceRule`] sees only its own
//! contracts, numbered locally. Preferences between sets are the revealed
//! comparisons "`A ⪰_a B` iff `A_a ∈ C_a(A_a ∪ B_a)`".
//!
//! Stable allocations are found as fixed points of the availability operator
//! `T(X′, X″) = (T₁(X″), T₂(X′))`, where `X′` is what firms may pick from and
//! `X″` is what workers may pick from.

mod constraints;
mod gallery;
mod rules;

pub use constraints::{
    claim_equivalence, constraints_cs, constraints_to_contracts, contracts_to_matching, matching_to_contracts,
    weak_stable_solve, weakly_stable, weakly_stable_set, ConstraintsCs, ConstraintsMarket, Matching,
};
pub use gallery::{check_gallery, gallery, Fact as GalleryFact, MatchingInstance, GALLERY_NAMES};
pub use rules::{
    audit, bits, full_mask, more_permissive, Audit, AuditOptions, Axiom, AxiomWitness, ChoiceRule, DefaultChoice,
    Feasibility, Permissiveness, MAX_AGENT_CONTRACTS,
};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fixedpoint::{iterate_system, lift_system, Direction, OrderedCorrespondence, SelectionPolicy, Trace};
use crate::limits::Limits;

pub type ContractSet = u64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Contract {
    pub label: String,
    pub firm: usize,
    pub worker: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    Firm(usize),
    Worker(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Firms,
    Workers,
}

/// Contracts with their firm and worker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractUniverse {
    contracts: Vec<Contract>,
    firms: Vec<String>,
    workers: Vec<String>,
    firm_contracts: Vec<Vec<usize>>,
    worker_contracts: Vec<Vec<usize>>,
}

impl ContractUniverse {
    pub fn new(firms: Vec<String>, workers: Vec<String>, contracts: Vec<Contract>) -> Result<Self> {
        if contracts.len() > 64 {
            return Err(Error::SizeLimit {
                what: "contracts".into(),
                size: contracts.len(),
                cap: 64,
            });
        }
        let mut seen = BTreeSet::new();
        for names in [&firms, &workers] {
            let mut local = BTreeSet::new();
            for n in names {
                if !local.insert(n) {
                    return Err(Error::DuplicateLabel(n.clone()));
                }
            }
        }
        let mut firm_contracts = vec![Vec::new(); firms.len()];
        let mut worker_contracts = vec![Vec::new(); workers.len()];
        for (i, c) in contracts.iter().enumerate() {
            if !seen.insert(&c.label) {
                return Err(Error::DuplicateLabel(c.label.clone()));
            }
            if c.firm >= firms.len() || c.worker >= workers.len() {
                return Err(Error::Invalid(format!("contract {} names an unknown agent", c.label)));
            }
            firm_contracts[c.firm].push(i);
            worker_contracts[c.worker].push(i);
        }
        Ok(ContractUniverse {
            contracts,
            firms,
            workers,
            firm_contracts,
            worker_contracts,
        })
    }

    /// Builds contracts from `(label, firm name, worker name)` triples.
    pub fn from_names<S: AsRef<str>>(firms: &[S], workers: &[S], contracts: &[(S, S, S)]) -> Result<Self> {
        let firms: Vec<String> = firms.iter().map(|s| s.as_ref().to_string()).collect();
        let workers: Vec<String> = workers.iter().map(|s| s.as_ref().to_string()).collect();
        let find = |names: &[String], n: &str| {
            names
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::UnknownLabel(n.to_string()))
        };
        let contracts = contracts
            .iter()
            .map(|(l, f, w)| {
                Ok(Contract {
                    label: l.as_ref().to_string(),
                    firm: find(&firms, f.as_ref())?,
                    worker: find(&workers, w.as_ref())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ContractUniverse::new(firms, workers, contracts)
    }

    pub fn len(&self) -> usize {
        self.contracts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contracts.is_empty()
    }

    pub fn contracts(&self) -> &[Contract] {
        &self.contracts
    }

    pub fn firms(&self) -> &[String] {
        &self.firms
    }

    pub fn workers(&self) -> &[String] {
        &self.workers
    }

    pub fn all(&self) -> ContractSet {
        full_mask(self.len())
    }

    pub fn agents(&self) -> impl Iterator<Item = Agent> + '_ {
        (0..self.firms.len())
            .map(Agent::Firm)
            .chain((0..self.workers.len()).map(Agent::Worker))
    }

    /// Contracts of `agent`, in local order.
    pub fn contracts_of(&self, agent: Agent) -> &[usize] {
        match agent {
            Agent::Firm(f) => &self.firm_contracts[f],
            Agent::Worker(w) => &self.worker_contracts[w],
        }
    }

    pub fn agent_name(&self, agent: Agent) -> &str {
        match agent {
            Agent::Firm(f) => &self.firms[f],
            Agent::Worker(w) => &self.workers[w],
        }
    }

    pub fn mask_of(&self, agent: Agent) -> ContractSet {
        self.contracts_of(agent).iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn localize(&self, agent: Agent, set: ContractSet) -> u64 {
        self.contracts_of(agent)
            .iter()
            .enumerate()
            .fold(0, |m, (k, &i)| if set >> i & 1 == 1 { m | 1 << k } else { m })
    }

    pub fn globalize(&self, agent: Agent, local: u64) -> ContractSet {
        self.contracts_of(agent)
            .iter()
            .enumerate()
            .fold(0, |m, (k, &i)| if local >> k & 1 == 1 { m | 1 << i } else { m })
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.contracts.iter().position(|c| c.label == label)
    }

    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<ContractSet> {
        labels.iter().try_fold(0, |m, l| {
            self.index_of(l.as_ref())
                .map(|i| m | 1 << i)
                .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string()))
        })
    }

    pub fn labels(&self, set: ContractSet) -> Vec<String> {
        bits(set).map(|i| self.contracts[i].label.clone()).collect()
    }

    /// `{x, y}` rendering of a contract set.
    pub fn format(&self, set: ContractSet) -> String {
        format!("{{{}}}", self.labels(set).join(", "))
    }

    /// Worker holding more than one contract of `set`, if any.
    pub fn overloaded_worker(&self, set: ContractSet) -> Option<usize> {
        (0..self.workers.len()).find(|&w| (set & self.mask_of(Agent::Worker(w))).count_ones() > 1)
    }

    pub fn is_allocation(&self, set: ContractSet) -> bool {
        set & !self.all() == 0 && self.overloaded_worker(set).is_none()
    }
}

/// A contract universe with a choice rule for every agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Economy {
    universe: ContractUniverse,
    firm_rules: Vec<ChoiceRule>,
    worker_rules: Vec<ChoiceRule>,
}

impl Economy {
    /// Worker rules are checked for unit demand on every offer set (up to 12
    /// contracts per worker).
    pub fn new(universe: ContractUniverse, firm_rules: Vec<ChoiceRule>, worker_rules: Vec<ChoiceRule>) -> Result<Self> {
        if firm_rules.len() != universe.firms.len() || worker_rules.len() != universe.workers.len() {
            return Err(Error::RuleDomain(format!(
                "{} firm and {} worker rules for {} firms and {} workers",
                firm_rules.len(),
                worker_rules.len(),
                universe.firms.len(),
                universe.workers.len()
            )));
        }
        let e = Economy {
            universe,
            firm_rules,
            worker_rules,
        };
        for a in e.universe.agents() {
            let n = e.universe.contracts_of(a).len();
            if e.rule(a).size() != n {
                return Err(Error::RuleDomain(format!(
                    "rule of {} covers {} contracts, agent has {n}",
                    e.universe.agent_name(a),
                    e.rule(a).size()
                )));
            }
            if let Agent::Worker(_) = a {
                if n <= 12 {
                    if let Some(s) = (0..=full_mask(n)).find(|&s| e.rule(a).choose(s).iter().any(|y| y.count_ones() > 1)) {
                        return Err(Error::RuleDomain(format!(
                            "worker {} chooses several contracts from {}",
                            e.universe.agent_name(a),
                            e.universe.format(e.universe.globalize(a, s))
                        )));
                    }
                }
            }
        }
        Ok(e)
    }

    pub fn universe(&self) -> &ContractUniverse {
        &self.universe
    }

    pub fn rule(&self, agent: Agent) -> &ChoiceRule {
        match agent {
            Agent::Firm(f) => &self.firm_rules[f],
            Agent::Worker(w) => &self.worker_rules[w],
        }
    }

    /// The same economy with one rule swapped.
    pub fn with_rule(&self, agent: Agent, rule: ChoiceRule) -> Result<Economy> {
        let mut firm_rules = self.firm_rules.clone();
        let mut worker_rules = self.worker_rules.clone();
        match agent {
            Agent::Firm(f) => firm_rules[f] = rule,
            Agent::Worker(w) => worker_rules[w] = rule,
        }
        Economy::new(self.universe.clone(), firm_rules, worker_rules)
    }

    /// The economy after `agent` leaves: it rejects every contract.
    pub fn without(&self, agent: Agent) -> Result<Economy> {
        let n = self.universe.contracts_of(agent).len();
        self.with_rule(agent, ChoiceRule::reject_all(n))
    }

    pub fn choice(&self, agent: Agent, set: ContractSet) -> Vec<ContractSet> {
        let local = self.universe.localize(agent, set);
        let mut out: Vec<ContractSet> = self
            .rule(agent)
            .choose(local)
            .into_iter()
            .map(|y| self.universe.globalize(agent, y))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn rejection(&self, agent: Agent, set: ContractSet) -> Vec<ContractSet> {
        let own = set & self.universe.mask_of(agent);
        let mut out: Vec<ContractSet> = self.choice(agent, set).into_iter().map(|y| own & !y).collect();
        out.sort_unstable();
        out
    }

    /// Whether `agent` weakly prefers `a` to `b`.
    pub fn prefers(&self, agent: Agent, a: ContractSet, b: ContractSet) -> bool {
        let m = self.universe.mask_of(agent);
        let (a, b) = (a & m, b & m);
        self.choice(agent, a | b).contains(&a)
    }

    pub fn strictly_prefers(&self, agent: Agent, a: ContractSet, b: ContractSet) -> bool {
        self.prefers(agent, a, b) && !self.prefers(agent, b, a)
    }

    /// Contracts whose worker strictly prefers them to what the worker holds
    /// in `z`.
    pub fn upgrades(&self, z: ContractSet) -> ContractSet {
        (0..self.universe.len())
            .filter(|&i| {
                let w = Agent::Worker(self.universe.contracts[i].worker);
                self.strictly_prefers(w, 1 << i, z)
            })
            .fold(0, |m, i| m | 1 << i)
    }

    pub fn individually_rational(&self, z: ContractSet) -> bool {
        self.universe
            .agents()
            .all(|a| self.choice(a, z).contains(&(z & self.universe.mask_of(a))))
    }

    fn check_allocation(&self, z: ContractSet) -> Result<()> {
        if z & !self.universe.all() != 0 {
            return Err(Error::Invalid(format!("set {z:#b} uses unknown contracts")));
        }
        match self.universe.overloaded_worker(z) {
            Some(w) => Err(Error::Allocation(self.universe.workers[w].clone())),
            None => Ok(()),
        }
    }

    /// Individually rational and no firm would rather pick from `Z`
    /// together with the contracts workers would upgrade to.
    pub fn is_stable(&self, z: ContractSet) -> Result<bool> {
        self.check_allocation(z)?;
        if !self.individually_rational(z) {
            return Ok(false);
        }
        let offer = z | self.upgrades(z);
        Ok((0..self.universe.firms.len()).all(|f| {
            let a = Agent::Firm(f);
            self.choice(a, offer).contains(&(z & self.universe.mask_of(a)))
        }))
    }

    /// Individually rational and no firm strictly prefers some allocation
    /// whose new contracts are all upgrades for their workers.
    pub fn is_alt_stable(&self, z: ContractSet) -> Result<bool> {
        self.check_allocation(z)?;
        if !self.individually_rational(z) {
            return Ok(false);
        }
        let up = self.upgrades(z);
        for f in 0..self.universe.firms.len() {
            let a = Agent::Firm(f);
            let m = self.universe.mask_of(a);
            let zf = z & m;
            let pool = (z | up) & m;
            let blocked = submask_iter(pool)
                .filter(|&y| self.universe.is_allocation(y) && y & !zf & !up == 0)
                .any(|y| self.strictly_prefers(a, y, zf));
            if blocked {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every stable allocation, by enumeration.
    pub fn stable_set(&self, limits: &Limits) -> Result<Vec<ContractSet>> {
        let n = self.universe.len();
        if n > limits.stable_set_contracts {
            return Err(Error::SizeLimit {
                what: "contracts for stable-set enumeration".into(),
                size: n,
                cap: limits.stable_set_contracts,
            });
        }
        let mut out = Vec::new();
        for z in 0..=self.universe.all() {
            if self.universe.is_allocation(z) && self.is_stable(z)? {
                out.push(z);
            }
        }
        Ok(out)
    }

    /// Stable allocations every worker weakly prefers to every other stable
    /// allocation.
    pub fn worker_optimal(&self, stable: &[ContractSet]) -> Vec<ContractSet> {
        let workers = self.universe.workers.len();
        stable
            .iter()
            .copied()
            .filter(|&z| {
                stable
                    .iter()
                    .all(|&o| (0..workers).all(|w| self.prefers(Agent::Worker(w), z, o)))
            })
            .collect()
    }

    /// All unions of one chosen set per agent of `side`.
    pub fn side_choice(&self, side: Side, set: ContractSet) -> Vec<ContractSet> {
        let agents: Vec<Agent> = match side {
            Side::Firms => (0..self.universe.firms.len()).map(Agent::Firm).collect(),
            Side::Workers => (0..self.universe.workers.len()).map(Agent::Worker).collect(),
        };
        let mut acc = vec![0u64];
        for a in agents {
            let fam = self.choice(a, set);
            if fam == [0] {
                continue;
            }
            acc = acc.iter().flat_map(|&u| fam.iter().map(move |&y| u | y)).collect();
        }
        acc.sort_unstable();
        acc.dedup();
        acc
    }

    /// `T₁(X″)`: complements of the workers' joint rejections from `X″`.
    pub fn t1(&self, workers_avail: ContractSet) -> Vec<ContractSet> {
        let rest = self.universe.all() & !workers_avail;
        let mut out: Vec<_> = self
            .side_choice(Side::Workers, workers_avail)
            .into_iter()
            .map(|c| rest | c)
            .collect();
        out.sort_unstable();
        out
    }

    /// `T₂(X′)`: complements of the firms' joint rejections from `X′`.
    pub fn t2(&self, firms_avail: ContractSet) -> Vec<ContractSet> {
        let rest = self.universe.all() & !firms_avail;
        let mut out: Vec<_> = self
            .side_choice(Side::Firms, firms_avail)
            .into_iter()
            .map(|c| rest | c)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn t_apply(&self, s: &TState) -> Vec<TState> {
        let a = self.t1(s.workers_avail);
        let b = self.t2(s.firms_avail);
        a.iter()
            .flat_map(|&x| {
                b.iter().map(move |&y| TState {
                    firms_avail: x,
                    workers_avail: y,
                })
            })
            .collect()
    }

    pub fn is_t_fixed_point(&self, s: &TState) -> bool {
        self.t1(s.workers_avail).contains(&s.firms_avail) && self.t2(s.firms_avail).contains(&s.workers_avail)
    }

    /// Every fixed point of `T`, in ascending order.
    pub fn t_fixed_points(&self, limits: &Limits) -> Result<Vec<TState>> {
        let n = self.universe.len();
        if n > limits.characterization_contracts {
            return Err(Error::SizeLimit {
                what: "contracts for the fixed-point scan".into(),
                size: n,
                cap: limits.characterization_contracts,
            });
        }
        let mut out = Vec::new();
        for x2 in 0..=self.universe.all() {
            for x1 in self.t1(x2) {
                if self.t2(x1).contains(&x2) {
                    out.push(TState {
                        firms_avail: x1,
                        workers_avail: x2,
                    });
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Every agent's rule audited against `axiom`; the first failure is
    /// returned with the agent.
    pub fn audit_all(&self, axiom: Axiom, opts: &AuditOptions) -> Result<Option<(Agent, Audit)>> {
        for a in self.universe.agents() {
            let r = audit(self.rule(a), axiom, opts)?;
            if !r.holds {
                return Ok(Some((a, r)));
            }
        }
        Ok(None)
    }

    /// Fails unless every rule satisfies Sen's α and weak substitutability.
    pub fn check_hypotheses(&self, opts: &AuditOptions) -> Result<()> {
        for axiom in [Axiom::SenAlpha, Axiom::WeakSubstitutes] {
            if let Some((a, r)) = self.audit_all(axiom, opts)? {
                return Err(Error::Hypothesis(format!(
                    "{} of {} fails: {}",
                    axiom.name(),
                    self.universe.agent_name(a),
                    self.describe_witness(a, r.witness)
                )));
            }
        }
        Ok(())
    }

    pub fn describe_witness(&self, agent: Agent, w: Option<AxiomWitness>) -> String {
        match w {
            None => "no witness".into(),
            Some(w) => {
                let g = |m| self.universe.format(self.universe.globalize(agent, m));
                format!("set {} at offer {} against {}", g(w.set), g(w.offer), g(w.other))
            }
        }
    }
}

fn submask_iter(m: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// Contracts available to firms (`X′`) and to workers (`X″`). States are
/// ordered by `X′` growing and `X″` shrinking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TState {
    pub firms_avail: ContractSet,
    pub workers_avail: ContractSet,
}

impl TState {
    pub fn leq(&self, other: &TState) -> bool {
        self.firms_avail & !other.firms_avail == 0 && other.workers_avail & !self.workers_avail == 0
    }

    /// The allocation read off a fixed point.
    pub fn allocation(&self) -> ContractSet {
        self.firms_avail & self.workers_avail
    }
}

/// `T` as an ordered correspondence on availability pairs.
pub struct TMap<'a> {
    pub economy: &'a Economy,
}

impl OrderedCorrespondence for TMap<'_> {
    type Point = TState;

    fn point_leq(&self, a: &TState, b: &TState) -> bool {
        a.leq(b)
    }

    fn image(&self, x: &TState) -> Vec<TState> {
        let mut v = self.economy.t_apply(x);
        v.sort();
        v
    }

    fn describe(&self, x: &TState) -> String {
        let u = &self.economy.universe;
        format!("({}, {})", u.format(x.firms_avail), u.format(x.workers_avail))
    }
}

/// Monotonicity of `T` over adjacent availability pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TMonotonicity {
    pub upper: bool,
    pub lower: bool,
    /// States `s ≤ t` where a direction fails.
    pub witness: Option<(TState, TState)>,
}

/// Checks upper and lower weak set monotonicity of `T`. Both orders are
/// transitive and `T` splits into `T₁` and `T₂`, so one-contract steps in
/// each coordinate suffice.
pub fn t_monotone_check(economy: &Economy, limits: &Limits) -> Result<TMonotonicity> {
    let n = economy.universe.len();
    if n > limits.characterization_contracts {
        return Err(Error::SizeLimit {
            what: "contracts for the monotonicity scan".into(),
            size: n,
            cap: limits.characterization_contracts,
        });
    }
    let all = economy.universe.all();
    let sub = |a: u64, b: u64| a & !b == 0;
    let (mut upper, mut lower, mut witness) = (true, true, None);
    for s in 0..=all {
        for c in bits(all & !s) {
            let big = s | 1 << c;
            // T₁ grows (⊆) as X″ shrinks; T₂ shrinks (⊇ order) as X′ grows.
            let checks = [
                (economy.t1(big), economy.t1(s), true),
                (economy.t2(s), economy.t2(big), false),
            ];
            for (lo, hi, first) in checks {
                let le = |a: u64, b: u64| if first { sub(a, b) } else { sub(b, a) };
                let u = lo.iter().all(|&a| hi.iter().any(|&b| le(a, b)));
                let l = hi.iter().all(|&b| lo.iter().any(|&a| le(a, b)));
                if (!u || !l) && witness.is_none() {
                    witness = Some(if first {
                        (
                            TState { firms_avail: 0, workers_avail: big },
                            TState { firms_avail: 0, workers_avail: s },
                        )
                    } else {
                        (
                            TState { firms_avail: s, workers_avail: all },
                            TState { firms_avail: big, workers_avail: all },
                        )
                    });
                }
                upper &= u;
                lower &= l;
            }
        }
    }
    Ok(TMonotonicity { upper, lower, witness })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSolution {
    pub allocation: ContractSet,
    pub fixed_point: TState,
    pub trace: Trace<TState>,
}

/// Walks `T` upward from `(∅, X)` under the least-index policy and reads the
/// allocation off the fixed point reached.
pub fn stable_solve(economy: &Economy, opts: &AuditOptions) -> Result<StableSolution> {
    economy.check_hypotheses(opts)?;
    let start = TState {
        firms_avail: 0,
        workers_avail: economy.universe.all(),
    };
    let sys = TMap { economy };
    let trace = iterate_system(&sys, &start, &SelectionPolicy::LeastIndex, Direction::Up)?;
    let fp = trace
        .fixed_point
        .ok_or_else(|| Error::TheoremViolation(format!("upward walk on T stalled at {}", sys.describe(trace.steps.last().unwrap()))))?;
    let z = fp.allocation();
    let verified = economy.side_choice(Side::Firms, fp.firms_avail).contains(&z)
        && economy.side_choice(Side::Workers, fp.workers_avail).contains(&z)
        && economy.is_stable(z)?;
    if !verified {
        return Err(Error::TheoremViolation(format!(
            "fixed point {} yields unstable {}",
            sys.describe(&fp),
            economy.universe.format(z)
        )));
    }
    Ok(StableSolution {
        allocation: z,
        fixed_point: fp,
        trace,
    })
}

/// The fixed point of `T` that corresponds to a stable allocation.
pub fn state_of(economy: &Economy, z: ContractSet) -> TState {
    let up = economy.upgrades(z);
    TState {
        firms_avail: z | up,
        workers_avail: economy.universe.all() & !up,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationReport {
    pub fixed_points: Vec<TState>,
    pub stable: Vec<ContractSet>,
    /// Every fixed point yields a stable allocation chosen by both sides.
    pub fixed_points_give_stable: bool,
    /// Every stable allocation comes from the fixed point `(Z ∪ U, X \ U)`.
    pub stable_give_fixed_points: bool,
    /// The allocations read off the fixed points are exactly the stable ones.
    pub images_match: bool,
}

impl CharacterizationReport {
    pub fn holds(&self) -> bool {
        self.fixed_points_give_stable
            && self.stable_give_fixed_points
            && self.images_match
            && self.fixed_points.is_empty() == self.stable.is_empty()
    }
}

/// Compares the fixed points of `T` with the stable allocations, both found
/// by enumeration.
pub fn characterization_check(economy: &Economy, limits: &Limits) -> Result<CharacterizationReport> {
    let fixed_points = economy.t_fixed_points(limits)?;
    let stable = economy.stable_set(limits)?;
    let mut fixed_points_give_stable = true;
    let mut images = BTreeSet::new();
    for fp in &fixed_points {
        let z = fp.allocation();
        images.insert(z);
        let ok = economy.universe.is_allocation(z)
            && economy.side_choice(Side::Firms, fp.firms_avail).contains(&z)
            && economy.side_choice(Side::Workers, fp.workers_avail).contains(&z)
            && economy.is_stable(z)?;
        fixed_points_give_stable &= ok;
    }
    let stable_give_fixed_points = stable.iter().all(|&z| fixed_points.binary_search(&state_of(economy, z)).is_ok());
    let images_match = images.into_iter().eq(stable.iter().copied());
    Ok(CharacterizationReport {
        fixed_points,
        stable,
        fixed_points_give_stable,
        stable_give_fixed_points,
        images_match,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CsDirection {
    /// From a stable allocation of the first economy to one of the second.
    Forward,
    /// From a stable allocation of the second economy to one of the first.
    Backward,
}

/// `first` is stable in the first economy and `second` in the second; firms
/// weakly prefer `first` and workers weakly prefer `second`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsWitness {
    pub direction: CsDirection,
    pub first: ContractSet,
    pub second: ContractSet,
}

/// Checks the comparative-statics hypotheses: identical contracts, Sen's α
/// and weak substitutes everywhere, each worker's rule in `g` more
/// permissive than in `g2`, each firm's rule in `g2` more permissive than in
/// `g`.
pub fn check_cs_hypotheses(g: &Economy, g2: &Economy, opts: &AuditOptions) -> Result<()> {
    if g.universe != g2.universe {
        return Err(Error::Hypothesis("the two economies have different contracts".into()));
    }
    g.check_hypotheses(opts)?;
    g2.check_hypotheses(opts)?;
    for a in g.universe.agents() {
        let (loose, tight) = match a {
            Agent::Worker(_) => (g.rule(a), g2.rule(a)),
            Agent::Firm(_) => (g2.rule(a), g.rule(a)),
        };
        let p = more_permissive(loose, tight, opts)?;
        if !p.holds {
            return Err(Error::Hypothesis(format!(
                "permissiveness fails for {} at offer {}",
                g.universe.agent_name(a),
                g.universe
                    .format(g.universe.globalize(a, p.witness.unwrap_or_default()))
            )));
        }
    }
    Ok(())
}

/// For every stable allocation of `g` finds a stable allocation of `g2`
/// that every firm likes weakly less and every worker weakly more (by the
/// rules of the economy they are compared in), and conversely from `g2`
/// back to `g`. Workers get more permissive in `g`, firms in `g2`.
pub fn matching_cs(g: &Economy, g2: &Economy, limits: &Limits, opts: &AuditOptions) -> Result<Vec<CsWitness>> {
    check_cs_hypotheses(g, g2, opts)?;
    let u = &g.universe;
    let mut out = Vec::new();
    let compare = |z: ContractSet, z2: ContractSet, direction| -> Result<CsWitness> {
        let firms_ok = (0..u.firms.len()).all(|f| g.prefers(Agent::Firm(f), z, z2));
        let workers_ok = (0..u.workers.len()).all(|w| g2.prefers(Agent::Worker(w), z2, z));
        let stable_ok = g.is_stable(z)? && g2.is_stable(z2)?;
        if !(firms_ok && workers_ok && stable_ok) {
            return Err(Error::TheoremViolation(format!(
                "{} and {} are not ordered as predicted",
                u.format(z),
                u.format(z2)
            )));
        }
        Ok(CsWitness {
            direction,
            first: z,
            second: z2,
        })
    };
    for z in g.stable_set(limits)? {
        let fp = lift_system(&TMap { economy: g2 }, &state_of(g, z), Direction::Down)?;
        out.push(compare(z, fp.allocation(), CsDirection::Forward)?);
    }
    for z2 in g2.stable_set(limits)? {
        let fp = lift_system(&TMap { economy: g }, &state_of(g2, z2), Direction::Up)?;
        out.push(compare(fp.allocation(), z2, CsDirection::Backward)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
