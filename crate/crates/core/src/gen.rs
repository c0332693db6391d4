//! Seeded random instances for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::choice::ObjectiveTable;
use crate::fixedpoint::Correspondence;
use crate::matching::{
    audit, full_mask, Agent, AuditOptions, Axiom, ChoiceRule, Contract, ContractUniverse, DefaultChoice, Economy,
    Feasibility,
};
use crate::order::{FinitePoset, Subset};
use crate::Q;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Random order on `0..n` compatible with the index order; each pair
/// `i < j` is related with probability `density` before closure.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FinitePoset {
    let pairs: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(density))
        .collect();
    FinitePoset::from_relation(names(n), pairs).expect("index order is acyclic")
}

/// Random lattice on `n` elements: a bounded random order, redrawn until
/// every pair has a join and a meet.
pub fn random_lattice<R: Rng>(rng: &mut R, n: usize) -> FinitePoset {
    if n <= 2 {
        return FinitePoset::chain(n);
    }
    loop {
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
        pairs.extend((1..n - 1).map(|i| (i, n - 1)));
        for i in 1..n - 1 {
            for j in i + 1..n - 1 {
                if rng.gen_bool(0.35) {
                    pairs.push((i, j));
                }
            }
        }
        let p = FinitePoset::from_relation(names(n), pairs).expect("index order is acyclic");
        if p.is_lattice() {
            return p;
        }
    }
}

/// Integer-valued table with entries in `lo..=hi`; narrow ranges force ties.
pub fn random_table<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> ObjectiveTable {
    ObjectiveTable::new((0..n).map(|_| Q::from_integer(rng.gen_range(lo..=hi))).collect())
}

pub fn random_subset<R: Rng>(rng: &mut R, n: usize, nonempty: bool) -> Subset {
    loop {
        let s = Subset::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        if !(nonempty && s.is_empty() && n > 0) {
            return s;
        }
    }
}

/// How a random correspondence is made monotone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Closure {
    None,
    /// `F(x) = ∪_{z ≤ x} F₀(z)`, which is upper weak set monotone.
    Up,
    /// `F(x) = ∪_{z ≥ x} F₀(z)`, which is lower weak set monotone.
    Down,
}

fn close(p: &FinitePoset, base: &[Subset], closure: Closure) -> Vec<Subset> {
    let n = p.len();
    (0..n)
        .map(|x| {
            let from = match closure {
                Closure::None => return base[x].clone(),
                Closure::Up => p.down_set(x),
                Closure::Down => p.up_set(x),
            };
            from.iter().fold(p.empty_set(), |acc, z| acc.union(&base[z]))
        })
        .collect()
}

pub fn random_correspondence<R: Rng>(rng: &mut R, p: &FinitePoset, closure: Closure) -> Correspondence {
    let n = p.len();
    let base: Vec<Subset> = (0..n).map(|_| random_subset(rng, n, true)).collect();
    Correspondence::new(p, close(p, &base, closure)).expect("nonempty images")
}

fn pick<R: Rng>(rng: &mut R, s: &Subset) -> usize {
    let v = s.to_vec();
    v[rng.gen_range(0..v.len())]
}

/// A correspondence that dominates `f` pointwise in the upper weak set order:
/// every image point of `f` gets a point above it, plus random extras, and
/// the result is closed as in [`Closure::Up`].
pub fn raise_upper<R: Rng>(rng: &mut R, p: &FinitePoset, f: &Correspondence) -> Correspondence {
    let n = p.len();
    let base: Vec<Subset> = (0..n)
        .map(|x| {
            let mut s = random_subset(rng, n, false);
            for y in f.image(x).iter() {
                s.insert(pick(rng, &p.up_set(y)));
            }
            s
        })
        .collect();
    Correspondence::new(p, close(p, &base, Closure::Up)).expect("nonempty images")
}

/// A correspondence that dominates `f` pointwise in the lower weak set order:
/// each image is a nonempty set of points lying above some image point of `f`.
pub fn raise_lower<R: Rng>(rng: &mut R, p: &FinitePoset, f: &Correspondence) -> Correspondence {
    let n = p.len();
    let images = (0..n)
        .map(|x| {
            let above = f.image(x).iter().fold(p.empty_set(), |acc, y| acc.union(&p.up_set(y)));
            let mut s = above.intersection(&random_subset(rng, n, false));
            if s.is_empty() {
                s.insert(pick(rng, &above));
            }
            s
        })
        .collect();
    Correspondence::new(p, images).expect("nonempty images")
}

/// Random strict partial order over `size` contracts and the outside option,
/// as a unit-demand rule.
pub fn random_unit_demand<R: Rng>(rng: &mut R, size: usize) -> ChoiceRule {
    let mut opts: Vec<Option<usize>> = (0..size).map(Some).chain([None]).collect();
    opts.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..opts.len() {
        for j in i + 1..opts.len() {
            if rng.gen_bool(0.6) {
                pairs.push((opts[i], opts[j]));
            }
        }
    }
    ChoiceRule::partial_order(size, &pairs).expect("shuffled order is acyclic")
}

/// Random division structure: contracts spread over up to three ranked
/// lists (some left unacceptable) and up to three maximal hiring vectors.
pub fn random_quota<R: Rng>(rng: &mut R, size: usize) -> ChoiceRule {
    let k = rng.gen_range(1..=3);
    let mut groups = vec![Vec::new(); k];
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(rng);
    for i in order {
        if !rng.gen_bool(0.15) {
            groups[rng.gen_range(0..k)].push(i);
        }
    }
    let maxima = (0..rng.gen_range(1..=3))
        .map(|_| groups.iter().map(|g| rng.gen_range(0..=g.len() as u32)).collect())
        .collect();
    let f = Feasibility::new(k, maxima).expect("vectors have one entry per division");
    ChoiceRule::quota(size, groups, f).expect("each contract listed once")
}

/// Random firm rule satisfying Sen's α and weak substitutes: responsive,
/// quota-based, unit demand from a partial order, indifferent single slot,
/// or (for at most three contracts) a filtered random table.
pub fn random_substitutable_rule<R: Rng>(rng: &mut R, size: usize) -> ChoiceRule {
    let opts = AuditOptions::default();
    match rng.gen_range(0..5) {
        0 => {
            let mut acc: Vec<usize> = (0..size).filter(|_| rng.gen_bool(0.8)).collect();
            acc.shuffle(rng);
            ChoiceRule::responsive(size, &acc, rng.gen_range(1..=size.max(1) as u32)).expect("distinct contracts")
        }
        1 => random_quota(rng, size),
        2 => random_unit_demand(rng, size),
        3 => ChoiceRule::table(size, Default::default(), DefaultChoice::AnySingle).expect("empty table"),
        _ => {
            if size <= 3 {
                for _ in 0..400 {
                    let r = ChoiceRule::tabulate(size, |s| {
                        let subs: Vec<u64> = (0..=s).filter(|t| t & !s == 0).collect();
                        let mut fam: Vec<u64> = subs.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
                        if fam.is_empty() {
                            fam.push(subs[rng.gen_range(0..subs.len())]);
                        }
                        fam
                    })
                    .expect("sets drawn inside the offer");
                    let ok = [Axiom::SenAlpha, Axiom::WeakSubstitutes]
                        .iter()
                        .all(|&a| audit(&r, a, &opts).map(|x| x.holds).unwrap_or(false));
                    if ok {
                        return r;
                    }
                }
            }
            random_quota(rng, size)
        }
    }
}

/// Rule choosing the best subsets of the offer under random utilities over
/// all admissible subsets (ties allowed), so it satisfies WARP. The empty set
/// must be admissible.
pub fn random_warp_rule<R: Rng>(rng: &mut R, size: usize, admissible: impl Fn(u64) -> bool) -> ChoiceRule {
    let util: Vec<u32> = (0..=full_mask(size)).map(|_| rng.gen_range(0..4)).collect();
    ChoiceRule::tabulate(size, |s| {
        let subs: Vec<u64> = (0..=s).filter(|&t| t & !s == 0 && admissible(t)).collect();
        let best = subs.iter().map(|&t| util[t as usize]).max().unwrap_or(0);
        subs.into_iter().filter(|&t| util[t as usize] == best).collect()
    })
    .expect("sets drawn inside the offer")
}

fn random_universe<R: Rng>(rng: &mut R, max_contracts: usize) -> ContractUniverse {
    let nf = rng.gen_range(1..=2);
    let nw = rng.gen_range(2..=4);
    let m = rng.gen_range(1..=max_contracts);
    let contracts = (0..m)
        .map(|i| Contract {
            label: format!("x{i}"),
            firm: rng.gen_range(0..nf),
            worker: rng.gen_range(0..nw),
        })
        .collect();
    let firms = (0..nf).map(|i| format!("f{i}")).collect();
    let workers = (0..nw).map(|i| format!("w{i}")).collect();
    ContractUniverse::new(firms, workers, contracts).expect("labels are distinct")
}

/// Economy with up to `max_contracts` contracts whose rules all satisfy
/// Sen's α and weak substitutes.
pub fn random_economy<R: Rng>(rng: &mut R, max_contracts: usize) -> Economy {
    let u = random_universe(rng, max_contracts);
    let firms = (0..u.firms().len())
        .map(|f| random_substitutable_rule(rng, u.contracts_of(Agent::Firm(f)).len()))
        .collect();
    let workers = (0..u.workers().len())
        .map(|w| random_unit_demand(rng, u.contracts_of(Agent::Worker(w)).len()))
        .collect();
    Economy::new(u, firms, workers).expect("rules sized to their agents")
}

/// Economy whose firms choose by WARP rules and never pick two contracts
/// with the same worker.
pub fn random_warp_economy<R: Rng>(rng: &mut R, max_contracts: usize) -> Economy {
    let u = random_universe(rng, max_contracts);
    let firms = (0..u.firms().len())
        .map(|f| {
            let own = u.contracts_of(Agent::Firm(f)).to_vec();
            let admissible = |t: u64| u.is_allocation(u.globalize(Agent::Firm(f), t));
            random_warp_rule(rng, own.len(), admissible)
        })
        .collect();
    let workers = (0..u.workers().len())
        .map(|w| random_unit_demand(rng, u.contracts_of(Agent::Worker(w)).len()))
        .collect();
    Economy::new(u, firms, workers).expect("rules sized to their agents")
}
