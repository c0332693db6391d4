//! Small economies whose choice rules separate the axioms and stability
//! notions, with the facts they are known to exhibit.

use std::collections::BTreeMap;

use super::rules::{audit, AuditOptions, Axiom, ChoiceRule, DefaultChoice, Feasibility};
use super::{Agent, ContractUniverse, Economy};
use crate::error::{Error, Result};
use crate::fixedpoint::FactCheck;
use crate::limits::Limits;

pub const GALLERY_NAMES: [&str; 4] = [
    "multidivision-budget",
    "indifferent-single-slot",
    "warni-counterexample",
    "alternative-stability",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fact {
    Choice {
        agent: Agent,
        offer: Vec<String>,
        chosen: Vec<Vec<String>>,
    },
    Rejection {
        agent: Agent,
        offer: Vec<String>,
        rejected: Vec<Vec<String>>,
    },
    Axiom {
        agent: Agent,
        axiom: Axiom,
        holds: bool,
    },
    StableSet(Vec<Vec<String>>),
    WorkerOptimal(Vec<Vec<String>>),
    Stable {
        allocation: Vec<String>,
        stable: bool,
        alt_stable: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingInstance {
    pub name: String,
    pub description: String,
    pub economy: Economy,
    pub facts: Vec<Fact>,
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn fam(v: &[&[&str]]) -> Vec<Vec<String>> {
    v.iter().map(|s| strs(s)).collect()
}

/// One firm `f`; contract `c` is with worker `w_c`, who prefers it to
/// staying unmatched.
fn one_firm(labels: &[&str], firm_rule: ChoiceRule) -> Result<Economy> {
    let workers: Vec<String> = labels.iter().map(|l| format!("w_{l}")).collect();
    let triples: Vec<(String, String, String)> = labels
        .iter()
        .zip(&workers)
        .map(|(l, w)| (l.to_string(), "f".to_string(), w.clone()))
        .collect();
    let universe = ContractUniverse::from_names(&["f".to_string()], &workers, &triples)?;
    let worker_rules = labels
        .iter()
        .map(|_| ChoiceRule::ranking(1, &[0]))
        .collect::<Result<Vec<_>>>()?;
    Economy::new(universe, vec![firm_rule], worker_rules)
}

pub fn gallery(name: &str) -> Result<MatchingInstance> {
    let f = Agent::Firm(0);
    let (description, economy, facts) = match name {
        "multidivision-budget" => {
            // divisions d1 = {a}, d2 = {b, c} with c ranked first; one hire in total
            let feas = Feasibility::new(2, vec![vec![1, 0], vec![0, 1]])?;
            let rule = ChoiceRule::quota(3, vec![vec![0], vec![2, 1]], feas)?;
            (
                "two divisions sharing a budget of one hire; division 2 ranks c above b",
                one_firm(&["a", "b", "c"], rule)?,
                vec![
                    Fact::Choice {
                        agent: f,
                        offer: strs(&["a", "b"]),
                        chosen: fam(&[&["a"], &["b"]]),
                    },
                    Fact::Choice {
                        agent: f,
                        offer: strs(&["a", "b", "c"]),
                        chosen: fam(&[&["a"], &["c"]]),
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::SenAlpha,
                        holds: true,
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::SenBeta,
                        holds: false,
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::Warp,
                        holds: false,
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::WeakSubstitutes,
                        holds: true,
                    },
                ],
            )
        }
        "indifferent-single-slot" => {
            let rule = ChoiceRule::table(3, BTreeMap::new(), DefaultChoice::AnySingle)?;
            (
                "one position, the firm is indifferent among three workers",
                one_firm(&["x", "y", "z"], rule)?,
                vec![
                    Fact::Choice {
                        agent: f,
                        offer: strs(&["x", "y"]),
                        chosen: fam(&[&["x"], &["y"]]),
                    },
                    Fact::Rejection {
                        agent: f,
                        offer: strs(&["x", "y"]),
                        rejected: fam(&[&["x"], &["y"]]),
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::WeakSubstitutes,
                        holds: true,
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::StrongSubstitutes,
                        holds: false,
                    },
                    Fact::StableSet(fam(&[&["x"], &["y"], &["z"]])),
                    Fact::WorkerOptimal(vec![]),
                ],
            )
        }
        "warni-counterexample" => {
            let pairs = [0b000011u64, 0b001100, 0b110000];
            let rule = ChoiceRule::tabulate(6, |s| {
                let mut out: Vec<u64> = (0..6).filter(|i| s >> i & 1 == 1).map(|i| 1 << i).collect();
                for k in 0..3 {
                    let (p, blocker) = (pairs[k], pairs[(k + 1) % 3]);
                    if s & p == p && s & blocker != blocker {
                        out.push(p);
                    }
                }
                if out.is_empty() {
                    out.push(0);
                }
                out
            })?;
            let x1 = vec!["x1".to_string(), "x2".to_string()];
            (
                "pairs {x1,x2}, {x3,x4}, {x5,x6} each chosen unless the next pair is fully offered; singletons always",
                one_firm(&["x1", "x2", "x3", "x4", "x5", "x6"], rule)?,
                vec![
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::SenAlpha,
                        holds: true,
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::Warni,
                        holds: false,
                    },
                    Fact::Choice {
                        agent: f,
                        offer: strs(&["x1", "x2", "x3"]),
                        chosen: vec![x1, strs(&["x1"]), strs(&["x2"]), strs(&["x3"])],
                    },
                ],
            )
        }
        "alternative-stability" => {
            let (x, y, z) = (1u64, 2u64, 4u64);
            let entries = BTreeMap::from([
                (x | y | z, vec![x]),
                (x | y, vec![x, y]),
                (x | z, vec![x]),
                (y | z, vec![y]),
                (x, vec![x]),
                (y, vec![y]),
                (z, vec![z]),
            ]);
            let rule = ChoiceRule::table(3, entries, DefaultChoice::Nothing)?;
            (
                "a firm that takes x from {x,y,z} but is indifferent between x and y",
                one_firm(&["x", "y", "z"], rule)?,
                vec![
                    Fact::Stable {
                        allocation: strs(&["y"]),
                        stable: false,
                        alt_stable: true,
                    },
                    Fact::Stable {
                        allocation: strs(&["x"]),
                        stable: true,
                        alt_stable: true,
                    },
                    Fact::Choice {
                        agent: f,
                        offer: strs(&["x", "y", "z"]),
                        chosen: fam(&[&["x"]]),
                    },
                    Fact::Axiom {
                        agent: f,
                        axiom: Axiom::Warp,
                        holds: false,
                    },
                ],
            )
        }
        _ => return Err(Error::UnknownGalleryName(name.to_string())),
    };
    Ok(MatchingInstance {
        name: name.to_string(),
        description: description.to_string(),
        economy,
        facts,
    })
}

fn render(sets: &[Vec<String>]) -> String {
    let parts: Vec<String> = sets.iter().map(|s| format!("{{{}}}", s.join(", "))).collect();
    format!("[{}]", parts.join(", "))
}

/// Recomputes every fact of an instance.
pub fn check_gallery(inst: &MatchingInstance, limits: &Limits) -> Result<Vec<FactCheck>> {
    let e = &inst.economy;
    let u = e.universe();
    let family = |v: Vec<u64>| render(&v.into_iter().map(|s| u.labels(s)).collect::<Vec<_>>());
    let canon = |sets: &[Vec<String>]| -> Result<String> {
        let mut masks = sets.iter().map(|s| u.set_of(s)).collect::<Result<Vec<_>>>()?;
        masks.sort_unstable();
        Ok(family(masks))
    };
    let opts = AuditOptions {
        exhaustive_cap: limits.axiom_exhaustive,
        ..AuditOptions::default()
    };
    let mut out = Vec::new();
    for fact in &inst.facts {
        let (name, expected, observed) = match fact {
            Fact::Choice { agent, offer, chosen } => (
                format!("choice of {} from {{{}}}", u.agent_name(*agent), offer.join(", ")),
                canon(chosen)?,
                family(e.choice(*agent, u.set_of(offer)?)),
            ),
            Fact::Rejection { agent, offer, rejected } => (
                format!("rejection of {} from {{{}}}", u.agent_name(*agent), offer.join(", ")),
                canon(rejected)?,
                family(e.rejection(*agent, u.set_of(offer)?)),
            ),
            Fact::Axiom { agent, axiom, holds } => (
                format!("{} of {}", axiom.name(), u.agent_name(*agent)),
                holds.to_string(),
                audit(e.rule(*agent), *axiom, &opts)?.holds.to_string(),
            ),
            Fact::StableSet(sets) => ("stable allocations".into(), canon(sets)?, family(e.stable_set(limits)?)),
            Fact::WorkerOptimal(sets) => (
                "worker-optimal stable allocations".into(),
                canon(sets)?,
                family(e.worker_optimal(&e.stable_set(limits)?)),
            ),
            Fact::Stable {
                allocation,
                stable,
                alt_stable,
            } => {
                let z = u.set_of(allocation)?;
                (
                    format!("{{{}}} stable / alt-stable", allocation.join(", ")),
                    format!("{stable} / {alt_stable}"),
                    format!("{} / {}", e.is_stable(z)?, e.is_alt_stable(z)?),
                )
            }
        };
        out.push(FactCheck {
            fact: name,
            expected,
            observed,
        });
    }
    Ok(out)
}
