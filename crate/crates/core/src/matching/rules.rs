//! Choice rules over one agent's own contracts, and the revealed-preference
//! audits run on them.
//!
//! Contracts of an agent are numbered `0..size` locally and sets of them are
//! bit masks. Families of chosen sets are sorted and free of duplicates.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest number of contracts one agent may hold.
pub const MAX_AGENT_CONTRACTS: usize = 63;

/// Bit mask with the low `size` bits set.
pub fn full_mask(size: usize) -> u64 {
    if size >= 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

fn canonical(mut family: Vec<u64>) -> Vec<u64> {
    family.sort_unstable();
    family.dedup();
    family
}

/// What an explicit table chooses from offer sets it does not list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefaultChoice {
    /// The whole offer set.
    Everything,
    /// Only the empty set.
    Nothing,
    /// Each single offered contract (the empty set when nothing is offered).
    AnySingle,
}

/// Feasible count vectors of a quota rule, given by their maximal elements.
/// The zero vector is always feasible and feasibility is closed downward.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Feasibility {
    dims: usize,
    maxima: Vec<Vec<u32>>,
}

fn leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn maximal_vectors(mut vs: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    vs.sort();
    vs.dedup();
    let keep: Vec<bool> = vs
        .iter()
        .map(|v| !vs.iter().any(|u| u != v && leq(v, u)))
        .collect();
    vs.into_iter().zip(keep).filter(|(_, k)| *k).map(|(v, _)| v).collect()
}

impl Feasibility {
    pub fn new(dims: usize, maxima: Vec<Vec<u32>>) -> Result<Self> {
        if let Some(bad) = maxima.iter().find(|m| m.len() != dims) {
            return Err(Error::Invalid(format!(
                "feasible vector {bad:?} has {} entries, expected {dims}",
                bad.len()
            )));
        }
        Ok(Feasibility {
            dims,
            maxima: maximal_vectors(maxima),
        })
    }

    /// Every count vector up to `caps` is feasible.
    pub fn unconstrained(caps: &[u32]) -> Self {
        Feasibility {
            dims: caps.len(),
            maxima: vec![caps.to_vec()],
        }
    }

    /// Collects the maximal vectors `w ≤ caps` accepted by a downward-closed
    /// predicate. Fails if the predicate is not downward closed or rejects 0.
    pub fn from_predicate(caps: &[u32], pred: impl Fn(&[u32]) -> bool) -> Result<Self> {
        let mut all = Vec::new();
        let mut w = vec![0u32; caps.len()];
        loop {
            if pred(&w) {
                all.push(w.clone());
            }
            let mut i = 0;
            while i < w.len() && w[i] == caps[i] {
                w[i] = 0;
                i += 1;
            }
            if i == w.len() {
                break;
            }
            w[i] += 1;
        }
        if !pred(&vec![0; caps.len()]) {
            return Err(Error::Invalid("the zero vector must be feasible".into()));
        }
        let set: BTreeSet<Vec<u32>> = all.iter().cloned().collect();
        for v in &all {
            for i in 0..v.len() {
                if v[i] > 0 {
                    let mut u = v.clone();
                    u[i] -= 1;
                    if !set.contains(&u) {
                        return Err(Error::Invalid(format!(
                            "feasibility is not downward closed: {v:?} allowed but {u:?} not"
                        )));
                    }
                }
            }
        }
        Ok(Feasibility {
            dims: caps.len(),
            maxima: maximal_vectors(all),
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn maxima(&self) -> &[Vec<u32>] {
        &self.maxima
    }

    pub fn allows(&self, w: &[u32]) -> bool {
        w.iter().all(|&x| x == 0) || self.maxima.iter().any(|m| leq(w, m))
    }

    /// Maximal feasible vectors below `w`.
    pub fn quasi_choice(&self, w: &[u32]) -> Vec<Vec<u32>> {
        let mut cands: Vec<Vec<u32>> = self
            .maxima
            .iter()
            .map(|m| m.iter().zip(w).map(|(a, b)| *a.min(b)).collect())
            .collect();
        cands.push(vec![0; self.dims]);
        maximal_vectors(cands)
    }

    /// Whether every vector feasible under `other` is feasible here.
    pub fn contains(&self, other: &Feasibility) -> bool {
        other.maxima.iter().all(|m| self.allows(m))
    }
}

/// A choice correspondence over `size` local contracts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChoiceRule {
    /// Listed offer sets map to their families; others fall back to `default`.
    Table {
        size: usize,
        entries: BTreeMap<u64, Vec<u64>>,
        default: DefaultChoice,
    },
    /// Unit demand: every undominated option among the offered contracts and
    /// the outside option. Index `size` of `better` stands for the outside
    /// option; `better[a][b]` means `a` is strictly preferred to `b`.
    PartialOrder { size: usize, better: Vec<Vec<bool>> },
    /// Divisions with ranked acceptable contracts and a feasibility constraint
    /// on how many each division hires. Contracts outside every list are
    /// unacceptable.
    Quota {
        size: usize,
        groups: Vec<Vec<usize>>,
        feasibility: Feasibility,
    },
}

impl ChoiceRule {
    pub fn table(size: usize, entries: BTreeMap<u64, Vec<u64>>, default: DefaultChoice) -> Result<Self> {
        check_size(size)?;
        let full = full_mask(size);
        let mut clean = BTreeMap::new();
        for (offer, family) in entries {
            if !is_subset(offer, full) {
                return Err(Error::RuleDomain(format!("offer set {offer:#b} uses unknown contracts")));
            }
            if family.is_empty() {
                return Err(Error::RuleDomain(format!("offer set {offer:#b} has no chosen set")));
            }
            if let Some(y) = family.iter().find(|&&y| !is_subset(y, offer)) {
                return Err(Error::RuleDomain(format!(
                    "chosen set {y:#b} is not inside offer set {offer:#b}"
                )));
            }
            clean.insert(offer, canonical(family));
        }
        Ok(ChoiceRule::Table {
            size,
            entries: clean,
            default,
        })
    }

    /// Builds a table from a function over every offer set.
    pub fn tabulate(size: usize, mut f: impl FnMut(u64) -> Vec<u64>) -> Result<Self> {
        check_size(size)?;
        if size > 20 {
            return Err(Error::SizeLimit {
                what: "tabulated rule".into(),
                size,
                cap: 20,
            });
        }
        let entries = (0..=full_mask(size)).map(|s| (s, f(s))).collect();
        ChoiceRule::table(size, entries, DefaultChoice::Nothing)
    }

    pub fn reject_all(size: usize) -> Self {
        ChoiceRule::Table {
            size,
            entries: BTreeMap::new(),
            default: DefaultChoice::Nothing,
        }
    }

    /// Unit demand from a strict partial order given as `(better, worse)`
    /// pairs, `None` being the outside option. The order is closed
    /// transitively; a cycle is an error.
    pub fn partial_order(size: usize, pairs: &[(Option<usize>, Option<usize>)]) -> Result<Self> {
        check_size(size)?;
        let n = size + 1;
        let idx = |o: Option<usize>| -> Result<usize> {
            match o {
                None => Ok(size),
                Some(i) if i < size => Ok(i),
                Some(i) => Err(Error::RuleDomain(format!("contract {i} out of range {size}"))),
            }
        };
        let mut better = vec![vec![false; n]; n];
        for &(a, b) in pairs {
            better[idx(a)?][idx(b)?] = true;
        }
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if better[i][k] {
                    for j in 0..n {
                        if better[k][j] {
                            better[i][j] = true;
                        }
                    }
                }
            }
        }
        let name = |i: usize| if i == size { "outside option".to_string() } else { i.to_string() };
        if let Some(i) = (0..n).find(|&i| better[i][i]) {
            let j = (0..n).find(|&j| j != i && better[i][j] && better[j][i]).unwrap_or(i);
            return Err(Error::Cycle(name(i), name(j)));
        }
        Ok(ChoiceRule::PartialOrder { size, better })
    }

    /// Unit demand from a strict ranking of the acceptable contracts; all
    /// others rank below the outside option.
    pub fn ranking(size: usize, acceptable: &[usize]) -> Result<Self> {
        check_unique(size, acceptable)?;
        let mut pairs = Vec::new();
        for w in acceptable.windows(2) {
            pairs.push((Some(w[0]), Some(w[1])));
        }
        if let Some(&last) = acceptable.last() {
            pairs.push((Some(last), None));
        }
        for i in (0..size).filter(|i| !acceptable.contains(i)) {
            pairs.push((None, Some(i)));
        }
        ChoiceRule::partial_order(size, &pairs)
    }

    /// Takes the `capacity` best acceptable contracts offered.
    pub fn responsive(size: usize, acceptable: &[usize], capacity: u32) -> Result<Self> {
        ChoiceRule::quota(size, vec![acceptable.to_vec()], Feasibility::unconstrained(&[capacity]))
    }

    pub fn quota(size: usize, groups: Vec<Vec<usize>>, feasibility: Feasibility) -> Result<Self> {
        check_size(size)?;
        if feasibility.dims() != groups.len() {
            return Err(Error::RuleDomain(format!(
                "{} divisions but feasibility over {} counts",
                groups.len(),
                feasibility.dims()
            )));
        }
        let flat: Vec<usize> = groups.iter().flatten().copied().collect();
        check_unique(size, &flat)?;
        Ok(ChoiceRule::Quota {
            size,
            groups,
            feasibility,
        })
    }

    pub fn size(&self) -> usize {
        match self {
            ChoiceRule::Table { size, .. } | ChoiceRule::PartialOrder { size, .. } | ChoiceRule::Quota { size, .. } => {
                *size
            }
        }
    }

    /// The chosen family from `offer`; contracts beyond `size` are ignored.
    pub fn choose(&self, offer: u64) -> Vec<u64> {
        let offer = offer & full_mask(self.size());
        match self {
            ChoiceRule::Table { entries, default, .. } => match entries.get(&offer) {
                Some(f) => f.clone(),
                None => match default {
                    DefaultChoice::Everything => vec![offer],
                    DefaultChoice::Nothing => vec![0],
                    DefaultChoice::AnySingle if offer == 0 => vec![0],
                    DefaultChoice::AnySingle => bits(offer).map(|i| 1u64 << i).collect(),
                },
            },
            ChoiceRule::PartialOrder { size, better } => {
                let opts: Vec<usize> = bits(offer).chain(std::iter::once(*size)).collect();
                let out = opts
                    .iter()
                    .filter(|&&o| !opts.iter().any(|&p| better[p][o]))
                    .map(|&o| if o == *size { 0 } else { 1u64 << o })
                    .collect();
                canonical(out)
            }
            ChoiceRule::Quota { groups, feasibility, .. } => {
                let offered: Vec<Vec<usize>> = groups
                    .iter()
                    .map(|g| g.iter().copied().filter(|&i| offer >> i & 1 == 1).collect())
                    .collect();
                let w: Vec<u32> = offered.iter().map(|g| g.len() as u32).collect();
                let out = feasibility
                    .quasi_choice(&w)
                    .iter()
                    .map(|v| {
                        offered
                            .iter()
                            .zip(v)
                            .flat_map(|(g, &k)| g[..k as usize].iter())
                            .fold(0u64, |m, &i| m | 1 << i)
                    })
                    .collect();
                canonical(out)
            }
        }
    }

    pub fn reject(&self, offer: u64) -> Vec<u64> {
        let offer = offer & full_mask(self.size());
        canonical(self.choose(offer).into_iter().map(|y| offer & !y).collect())
    }
}

fn check_size(size: usize) -> Result<()> {
    if size > MAX_AGENT_CONTRACTS {
        return Err(Error::SizeLimit {
            what: "contracts of one agent".into(),
            size,
            cap: MAX_AGENT_CONTRACTS,
        });
    }
    Ok(())
}

fn check_unique(size: usize, list: &[usize]) -> Result<()> {
    check_size(size)?;
    let mut seen = 0u64;
    for &i in list {
        if i >= size {
            return Err(Error::RuleDomain(format!("contract {i} out of range {size}")));
        }
        if seen >> i & 1 == 1 {
            return Err(Error::RuleDomain(format!("contract {i} listed twice")));
        }
        seen |= 1 << i;
    }
    Ok(())
}

/// Indices of the set bits of `m`, ascending.
pub fn bits(m: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| m >> i & 1 == 1)
}

/// Submasks of `m`, including `0` and `m`.
fn submasks(m: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    SenAlpha,
    SenBeta,
    Warp,
    Warni,
    /// Rejections weakly set monotone (upper and lower) in the offer set.
    WeakSubstitutes,
    /// Rejections strong set monotone in the offer set.
    StrongSubstitutes,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::SenAlpha => "SenAlpha",
            Axiom::SenBeta => "SenBeta",
            Axiom::Warp => "WARP",
            Axiom::Warni => "WARNI",
            Axiom::WeakSubstitutes => "WeakSubstitutes",
            Axiom::StrongSubstitutes => "StrongSubstitutes",
        }
    }

    pub fn parse(s: &str) -> Option<Axiom> {
        [
            Axiom::SenAlpha,
            Axiom::SenBeta,
            Axiom::Warp,
            Axiom::Warni,
            Axiom::WeakSubstitutes,
            Axiom::StrongSubstitutes,
        ]
        .into_iter()
        .find(|a| a.name().eq_ignore_ascii_case(s))
    }
}

/// A violation: `set` is (or is not) chosen or rejected at `offer` in a way
/// the axiom forbids given what happens at `other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AxiomWitness {
    pub offer: u64,
    pub other: u64,
    pub set: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Audit {
    pub holds: bool,
    pub witness: Option<AxiomWitness>,
    pub checked: u64,
    pub total: u64,
    pub exhaustive: bool,
}

/// Exhaustive up to `exhaustive_cap` contracts, otherwise `samples` seeded
/// random cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditOptions {
    pub exhaustive_cap: usize,
    pub samples: u64,
    pub seed: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            exhaustive_cap: 12,
            samples: 20_000,
            seed: 0,
        }
    }
}

struct Tabled<'a> {
    rule: &'a ChoiceRule,
    table: Option<Vec<Vec<u64>>>,
}

impl Tabled<'_> {
    fn choose(&self, s: u64) -> Vec<u64> {
        match &self.table {
            Some(t) => t[s as usize].clone(),
            None => self.rule.choose(s),
        }
    }

    fn reject(&self, s: u64) -> Vec<u64> {
        canonical(self.choose(s).into_iter().map(|y| s & !y).collect())
    }
}

fn pairs_total(size: usize) -> u64 {
    3u64.saturating_pow(size as u32)
}

/// Checks one axiom on a rule.
pub fn audit(rule: &ChoiceRule, axiom: Axiom, opts: &AuditOptions) -> Result<Audit> {
    let size = rule.size();
    let exhaustive = size <= opts.exhaustive_cap;
    if !exhaustive && opts.samples == 0 {
        return Err(Error::BudgetExceeded {
            checked: 0,
            total: pairs_total(size),
        });
    }
    let tabled = Tabled {
        rule,
        table: exhaustive.then(|| (0..=full_mask(size)).map(|s| rule.choose(s)).collect()),
    };
    if axiom == Axiom::Warp {
        let a = audit(rule, Axiom::SenAlpha, opts)?;
        if !a.holds {
            return Ok(a);
        }
        let b = audit(rule, Axiom::SenBeta, opts)?;
        return Ok(Audit {
            checked: a.checked + b.checked,
            total: a.total + b.total,
            ..b
        });
    }
    let full = full_mask(size);
    let total = match axiom {
        Axiom::WeakSubstitutes => (size as u64) << size.min(63),
        _ => pairs_total(size),
    };
    let mut checked = 0u64;
    let mut witness = None;
    if exhaustive {
        match axiom {
            Axiom::WeakSubstitutes => {
                'outer: for s in 0..=full {
                    for c in bits(full & !s) {
                        checked += 1;
                        if let Some(w) = ws_step(&tabled, s, s | 1 << c) {
                            witness = Some(w);
                            break 'outer;
                        }
                    }
                }
            }
            Axiom::Warni => {
                let table = tabled.table.as_ref().unwrap();
                let mut chosen_at: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
                for (s, fam) in table.iter().enumerate() {
                    for &z in fam {
                        chosen_at.entry(z).or_default().push(s as u64);
                    }
                }
                'outer: for s in 0..=full {
                    for z in submasks(s) {
                        checked += 1;
                        if let Some(w) = warni_case(table, &chosen_at, s, z) {
                            witness = Some(w);
                            break 'outer;
                        }
                    }
                }
            }
            _ => {
                'outer: for big in 0..=full {
                    for small in submasks(big) {
                        checked += 1;
                        if let Some(w) = nested_case(&tabled, axiom, small, big) {
                            witness = Some(w);
                            break 'outer;
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.samples {
            let big = rng.gen::<u64>() & full;
            let small = rng.gen::<u64>() & big;
            checked += 1;
            let w = match axiom {
                Axiom::WeakSubstitutes => {
                    let free: Vec<usize> = bits(full & !small).collect();
                    if free.is_empty() {
                        continue;
                    }
                    let c = free[rng.gen_range(0..free.len())];
                    ws_step(&tabled, small, small | 1 << c)
                }
                Axiom::Warni => warni_sampled(&tabled, big, small, &mut rng),
                _ => nested_case(&tabled, axiom, small, big),
            };
            if w.is_some() {
                witness = w;
                break;
            }
        }
    }
    Ok(Audit {
        holds: witness.is_none(),
        witness,
        checked,
        total,
        exhaustive,
    })
}

fn nested_case(t: &Tabled, axiom: Axiom, small: u64, big: u64) -> Option<AxiomWitness> {
    let w = |set| {
        Some(AxiomWitness {
            offer: small,
            other: big,
            set,
        })
    };
    match axiom {
        Axiom::SenAlpha => {
            let cs = t.choose(small);
            t.choose(big)
                .into_iter()
                .find(|&y| is_subset(y, small) && cs.binary_search(&y).is_err())
                .and_then(w)
        }
        Axiom::SenBeta => {
            let cs = t.choose(small);
            let cb = t.choose(big);
            if cs.iter().any(|y| cb.binary_search(y).is_ok()) {
                cs.into_iter().find(|y| cb.binary_search(y).is_err()).and_then(w)
            } else {
                None
            }
        }
        Axiom::StrongSubstitutes => {
            let rs = t.reject(small);
            let rb = t.reject(big);
            for &a in &rs {
                for &b in &rb {
                    if rb.binary_search(&(a | b)).is_err() {
                        return w(a | b);
                    }
                    if rs.binary_search(&(a & b)).is_err() {
                        return w(a & b);
                    }
                }
            }
            None
        }
        _ => unreachable!("not a nested-pair axiom"),
    }
}

fn ws_step(t: &Tabled, small: u64, big: u64) -> Option<AxiomWitness> {
    let rs = t.reject(small);
    let rb = t.reject(big);
    let w = |set| AxiomWitness {
        offer: small,
        other: big,
        set,
    };
    if let Some(&a) = rs.iter().find(|&&a| !rb.iter().any(|&b| is_subset(a, b))) {
        return Some(w(a));
    }
    rb.iter().find(|&&b| !rs.iter().any(|&a| is_subset(a, b))).map(|&b| w(b))
}

fn warni_case(table: &[Vec<u64>], chosen_at: &BTreeMap<u64, Vec<u64>>, s: u64, z: u64) -> Option<AxiomWitness> {
    let here = &table[s as usize];
    if here.binary_search(&z).is_ok() {
        return None;
    }
    let places = chosen_at.get(&z)?;
    let mut other = 0;
    for &y in here {
        other = *places.iter().find(|&&p| is_subset(y, p))?;
    }
    Some(AxiomWitness { offer: s, other, set: z })
}

fn warni_sampled(t: &Tabled, s: u64, z: u64, rng: &mut ChaCha8Rng) -> Option<AxiomWitness> {
    let here = t.choose(s);
    if here.binary_search(&z).is_ok() {
        return None;
    }
    let full = full_mask(t.rule.size());
    let mut other = 0;
    for &y in &here {
        // Z ∈ C(X″) with Y ⊆ X″ is searched among a few supersets of Y ∪ Z.
        let base = y | z;
        let found = (0..16).map(|_| base | (rng.gen::<u64>() & full)).chain([base, full]).find(|&p| {
            t.choose(p).binary_search(&z).is_ok()
        })?;
        other = found;
    }
    Some(AxiomWitness { offer: s, other, set: z })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permissiveness {
    pub holds: bool,
    /// Offer set where the rejections of the first rule are not below.
    pub witness: Option<u64>,
    pub checked: u64,
    pub total: u64,
    pub exhaustive: bool,
}

/// Whether `a` is weakly more permissive than `b`: at every offer set the
/// rejections of `a` are weak-set below those of `b`.
pub fn more_permissive(a: &ChoiceRule, b: &ChoiceRule, opts: &AuditOptions) -> Result<Permissiveness> {
    if a.size() != b.size() {
        return Err(Error::Invalid(format!(
            "rules over {} and {} contracts cannot be compared",
            a.size(),
            b.size()
        )));
    }
    let size = a.size();
    let full = full_mask(size);
    let total = 1u64 << size.min(63);
    let exhaustive = size <= opts.exhaustive_cap;
    let below = |s: u64| {
        let ra = a.reject(s);
        let rb = b.reject(s);
        ra.iter().all(|&x| rb.iter().any(|&y| is_subset(x, y))) && rb.iter().all(|&y| ra.iter().any(|&x| is_subset(x, y)))
    };
    let offers: Box<dyn Iterator<Item = u64>> = if exhaustive {
        Box::new(0..=full)
    } else {
        if opts.samples == 0 {
            return Err(Error::BudgetExceeded { checked: 0, total });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        Box::new((0..opts.samples).map(move |_| rng.gen::<u64>() & full))
    };
    let mut checked = 0;
    let mut witness = None;
    for s in offers {
        checked += 1;
        if !below(s) {
            witness = Some(s);
            break;
        }
    }
    Ok(Permissiveness {
        holds: witness.is_none(),
        witness,
        checked,
        total,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> u64 {
        ix.iter().fold(0, |m, &i| m | 1 << i)
    }

    fn opts() -> AuditOptions {
        AuditOptions::default()
    }

    #[test]
    fn empty_offer_chooses_empty_set() {
        let rules = [
            ChoiceRule::reject_all(3),
            ChoiceRule::table(3, BTreeMap::new(), DefaultChoice::AnySingle).unwrap(),
            ChoiceRule::ranking(3, &[2, 0]).unwrap(),
            ChoiceRule::responsive(3, &[1, 2], 2).unwrap(),
        ];
        for r in &rules {
            assert_eq!(r.choose(0), vec![0]);
            assert_eq!(r.reject(0), vec![0]);
        }
    }

    #[test]
    fn indifferent_single_slot() {
        let r = ChoiceRule::table(3, BTreeMap::new(), DefaultChoice::AnySingle).unwrap();
        assert_eq!(r.choose(set(&[0, 1])), vec![set(&[0]), set(&[1])]);
        assert_eq!(r.reject(set(&[0, 1])), vec![set(&[0]), set(&[1])]);
        assert!(audit(&r, Axiom::WeakSubstitutes, &opts()).unwrap().holds);
        assert!(audit(&r, Axiom::SenAlpha, &opts()).unwrap().holds);
        let strong = audit(&r, Axiom::StrongSubstitutes, &opts()).unwrap();
        assert!(!strong.holds);
    }

    #[test]
    fn ranking_picks_best_acceptable() {
        let r = ChoiceRule::ranking(4, &[2, 0]).unwrap();
        assert_eq!(r.choose(set(&[0, 1, 2])), vec![set(&[2])]);
        assert_eq!(r.choose(set(&[1, 3])), vec![0]);
        assert!(audit(&r, Axiom::Warp, &opts()).unwrap().holds);
    }

    #[test]
    fn incomparable_options_are_both_chosen() {
        // 0 and 1 acceptable and unranked, 2 below the outside option.
        let r = ChoiceRule::partial_order(3, &[(Some(0), None), (Some(1), None), (None, Some(2))]).unwrap();
        assert_eq!(r.choose(set(&[0, 1, 2])), vec![set(&[0]), set(&[1])]);
        assert_eq!(r.choose(set(&[2])), vec![0]);
        // the outside option is undominated when nothing is ranked against it
        let free = ChoiceRule::partial_order(1, &[]).unwrap();
        assert_eq!(free.choose(1), vec![0, 1]);
    }

    #[test]
    fn cyclic_order_is_rejected() {
        let e = ChoiceRule::partial_order(2, &[(Some(0), Some(1)), (Some(1), Some(0))]).unwrap_err();
        assert!(matches!(e, Error::Cycle(..)));
    }

    #[test]
    fn responsive_rule_satisfies_warp_and_substitutes() {
        let r = ChoiceRule::responsive(5, &[3, 1, 4, 0], 2).unwrap();
        assert_eq!(r.choose(full_mask(5)), vec![set(&[1, 3])]);
        for ax in [Axiom::Warp, Axiom::WeakSubstitutes, Axiom::Warni] {
            assert!(audit(&r, ax, &opts()).unwrap().holds, "{ax:?}");
        }
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let bad = BTreeMap::from([(set(&[0]), vec![set(&[1])])]);
        assert!(matches!(
            ChoiceRule::table(2, bad, DefaultChoice::Nothing),
            Err(Error::RuleDomain(_))
        ));
        let empty = BTreeMap::from([(set(&[0]), vec![])]);
        assert!(ChoiceRule::table(2, empty, DefaultChoice::Nothing).is_err());
        assert!(ChoiceRule::responsive(2, &[0, 0], 1).is_err());
    }

    #[test]
    fn complements_fail_weak_substitutes() {
        // contract 0 is taken only together with 1
        let r = ChoiceRule::tabulate(2, |s| vec![if s == 0b11 { 0b11 } else { s & 0b10 }]).unwrap();
        let a = audit(&r, Axiom::WeakSubstitutes, &opts()).unwrap();
        assert!(!a.holds);
        let w = a.witness.unwrap();
        assert_eq!((w.offer, w.other, w.set), (0b01, 0b11, 0b01));
    }

    #[test]
    fn multidivision_budget_rule() {
        // division 0 ranks contract 0; division 1 ranks 2 above 1; one hire in total
        let f = Feasibility::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let r = ChoiceRule::quota(3, vec![vec![0], vec![2, 1]], f).unwrap();
        assert_eq!(r.choose(set(&[0, 1])), vec![set(&[0]), set(&[1])]);
        assert_eq!(r.choose(set(&[0, 1, 2])), vec![set(&[0]), set(&[2])]);
        assert!(audit(&r, Axiom::SenAlpha, &opts()).unwrap().holds);
        let beta = audit(&r, Axiom::SenBeta, &opts()).unwrap();
        assert!(!beta.holds);
        assert!(!audit(&r, Axiom::Warp, &opts()).unwrap().holds);
        assert!(audit(&r, Axiom::WeakSubstitutes, &opts()).unwrap().holds);
    }

    #[test]
    fn feasibility_from_predicate() {
        let f = Feasibility::from_predicate(&[2, 2], |w| w.iter().sum::<u32>() <= 2).unwrap();
        assert_eq!(f.maxima(), &[vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert!(f.allows(&[1, 0]) && !f.allows(&[2, 1]));
        assert_eq!(f.quasi_choice(&[2, 1]), vec![vec![1, 1], vec![2, 0]]);
        let g = Feasibility::from_predicate(&[2, 2], |w| w.iter().sum::<u32>() <= 3).unwrap();
        assert!(g.contains(&f) && !f.contains(&g));
        assert!(Feasibility::from_predicate(&[2], |w| w[0] != 1).is_err());
    }

    #[test]
    fn relaxed_budget_is_more_permissive() {
        let tight = Feasibility::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let loose = Feasibility::new(2, vec![vec![1, 1]]).unwrap();
        let groups = vec![vec![0], vec![2, 1]];
        let a = ChoiceRule::quota(3, groups.clone(), loose).unwrap();
        let b = ChoiceRule::quota(3, groups, tight).unwrap();
        assert!(more_permissive(&a, &b, &opts()).unwrap().holds);
        let back = more_permissive(&b, &a, &opts()).unwrap();
        assert!(!back.holds && back.exhaustive);
    }

    #[test]
    fn sampling_reports_partial_coverage() {
        let r = ChoiceRule::responsive(14, &[0, 1, 2, 3], 2).unwrap();
        let o = AuditOptions {
            exhaustive_cap: 12,
            samples: 500,
            seed: 7,
        };
        let a = audit(&r, Axiom::SenAlpha, &o).unwrap();
        assert!(a.holds && !a.exhaustive);
        assert_eq!(a.checked, 500);
        assert!(a.total > a.checked);
        let none = AuditOptions { samples: 0, ..o };
        assert!(matches!(audit(&r, Axiom::SenAlpha, &none), Err(Error::BudgetExceeded { .. })));
    }
}
