use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gen::{random_economy, random_quota, random_warp_economy};

fn limits() -> Limits {
    Limits::default()
}

fn opts() -> AuditOptions {
    AuditOptions::default()
}

fn single_pair() -> Economy {
    let u = ContractUniverse::from_names(&["f"], &["w"], &[("x", "f", "w")]).unwrap();
    Economy::new(
        u,
        vec![ChoiceRule::responsive(1, &[0], 1).unwrap()],
        vec![ChoiceRule::ranking(1, &[0]).unwrap()],
    )
    .unwrap()
}

/// One firm with three workers, each worker on one contract.
fn three_workers(firm: ChoiceRule) -> Economy {
    let u = ContractUniverse::from_names(
        &["f"],
        &["a", "b", "c"],
        &[("x", "f", "a"), ("y", "f", "b"), ("z", "f", "c")],
    )
    .unwrap();
    let w = (0..3).map(|_| ChoiceRule::ranking(1, &[0]).unwrap()).collect();
    Economy::new(u, vec![firm], w).unwrap()
}

#[test]
fn mutually_acceptable_pair_is_matched() {
    let e = single_pair();
    let sol = stable_solve(&e, &opts()).unwrap();
    assert_eq!(sol.allocation, 1);
    assert_eq!(e.stable_set(&limits()).unwrap(), vec![1]);
}

#[test]
fn empty_allocation_is_stable_when_everyone_rejects() {
    let e = single_pair().without(Agent::Firm(0)).unwrap().without(Agent::Worker(0)).unwrap();
    assert!(e.is_stable(0).unwrap());
    assert!(e.is_alt_stable(0).unwrap());
    assert_eq!(e.stable_set(&limits()).unwrap(), vec![0]);
}

#[test]
fn overloaded_worker_is_not_an_allocation() {
    let u = ContractUniverse::from_names(&["f", "g"], &["w"], &[("x", "f", "w"), ("y", "g", "w")]).unwrap();
    let e = Economy::new(
        u,
        vec![ChoiceRule::responsive(1, &[0], 1).unwrap(); 2],
        vec![ChoiceRule::ranking(2, &[1, 0]).unwrap()],
    )
    .unwrap();
    assert!(matches!(e.is_stable(0b11), Err(Error::Allocation(w)) if w == "w"));
    assert_eq!(e.stable_set(&limits()).unwrap(), vec![0b10]);
}

#[test]
fn worker_rules_must_have_unit_demand() {
    let u = ContractUniverse::from_names(&["f", "g"], &["w"], &[("x", "f", "w"), ("y", "g", "w")]).unwrap();
    let greedy = ChoiceRule::table(2, BTreeMap::new(), DefaultChoice::Everything).unwrap();
    let e = Economy::new(u, vec![ChoiceRule::reject_all(1); 2], vec![greedy]);
    assert!(matches!(e, Err(Error::RuleDomain(_))));
}

#[test]
fn gallery_facts_hold() {
    for name in GALLERY_NAMES {
        let inst = gallery(name).unwrap();
        for fact in check_gallery(&inst, &limits()).unwrap() {
            assert!(fact.holds(), "{name}: {fact:?}");
        }
    }
    assert!(matches!(gallery("nope"), Err(Error::UnknownGalleryName(_))));
}

#[test]
fn alternative_stability_gap() {
    let e = gallery("alternative-stability").unwrap().economy;
    let y = e.universe().set_of(&["y"]).unwrap();
    assert_eq!(e.upgrades(y), e.universe().set_of(&["x", "z"]).unwrap());
    assert!(!e.is_stable(y).unwrap());
    assert!(e.is_alt_stable(y).unwrap());
}

#[test]
fn indifferent_firm_has_monotone_t() {
    let e = gallery("indifferent-single-slot").unwrap().economy;
    let m = t_monotone_check(&e, &limits()).unwrap();
    assert!(m.upper && m.lower && m.witness.is_none());
    let r = characterization_check(&e, &limits()).unwrap();
    assert!(r.holds());
    assert_eq!(r.stable.len(), 3);
}

#[test]
fn t_monotone_by_brute_force_on_state_pairs() {
    // every comparable pair of states, not just one-contract steps
    let e = gallery("indifferent-single-slot").unwrap().economy;
    let all = e.universe().all();
    let states: Vec<TState> = (0..=all)
        .flat_map(|a| {
            (0..=all).map(move |b| TState {
                firms_avail: a,
                workers_avail: b,
            })
        })
        .collect();
    let leq = |a: &TState, b: &TState| a.leq(b);
    for s in &states {
        let is = e.t_apply(s);
        for t in states.iter().filter(|t| s.leq(t)) {
            let it = e.t_apply(t);
            assert!(is.iter().all(|a| it.iter().any(|b| leq(a, b))));
            assert!(it.iter().all(|b| is.iter().any(|a| leq(a, b))));
        }
    }
}

#[test]
fn complements_break_monotonicity_and_solving() {
    // the firm takes x only together with y
    let rule = ChoiceRule::tabulate(3, |s| vec![if s & 0b011 == 0b011 { s & 0b011 } else { s & 0b110 & !0b010 }]).unwrap();
    let e = three_workers(rule);
    let m = t_monotone_check(&e, &limits()).unwrap();
    assert!(!(m.upper && m.lower));
    assert!(m.witness.is_some());
    assert!(matches!(stable_solve(&e, &opts()), Err(Error::Hypothesis(_))));
}

#[test]
fn start_state_has_an_image_above_it() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let e = random_economy(&mut rng, 6);
        let start = TState {
            firms_avail: 0,
            workers_avail: e.universe().all(),
        };
        assert!(e.t_apply(&start).iter().any(|s| start.leq(s)));
    }
}

#[test]
fn random_substitutable_economies() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let e = random_economy(&mut rng, 6);
        e.check_hypotheses(&opts()).unwrap();
        let r = characterization_check(&e, &limits()).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(!r.stable.is_empty());
        let sol = stable_solve(&e, &opts()).unwrap();
        assert!(r.stable.contains(&sol.allocation));
        assert!(sol.trace.steps.len() <= 2 * e.universe().len() + 1);
        let m = t_monotone_check(&e, &limits()).unwrap();
        assert!(m.upper && m.lower);
    }
}

#[test]
fn warp_firms_make_both_stability_notions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let e = random_warp_economy(&mut rng, 5);
        for z in 0..=e.universe().all() {
            if e.universe().is_allocation(z) {
                assert_eq!(e.is_stable(z).unwrap(), e.is_alt_stable(z).unwrap());
            }
        }
    }
}

#[test]
fn stability_implies_alt_stability() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let e = random_economy(&mut rng, 6);
        for z in e.stable_set(&limits()).unwrap() {
            assert!(e.is_alt_stable(z).unwrap());
        }
    }
}

#[test]
fn blair_order_is_reflexive_on_rational_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let e = random_economy(&mut rng, 6);
        for z in 0..=e.universe().all() {
            for a in e.universe().agents() {
                let own = z & e.universe().mask_of(a);
                assert_eq!(e.prefers(a, z, z), e.choice(a, z).contains(&own));
            }
        }
    }
}

#[test]
fn warni_implies_sen_alpha_on_random_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut with_warni = 0;
    for _ in 0..400 {
        let rule = ChoiceRule::tabulate(3, |s| {
            let subs: Vec<u64> = (0..=s).filter(|t| t & !s == 0).collect();
            let mut f: Vec<u64> = subs.iter().copied().filter(|_| rand::Rng::gen_bool(&mut rng, 0.35)).collect();
            if f.is_empty() {
                f.push(s);
            }
            f
        })
        .unwrap();
        if audit(&rule, Axiom::Warni, &opts()).unwrap().holds {
            with_warni += 1;
            assert!(audit(&rule, Axiom::SenAlpha, &opts()).unwrap().holds);
        }
    }
    assert!(with_warni > 0);
}

#[test]
fn quota_rules_are_alpha_and_substitutable() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let size = rand::Rng::gen_range(&mut rng, 0..=7);
        let r = random_quota(&mut rng, size);
        for ax in [Axiom::SenAlpha, Axiom::WeakSubstitutes] {
            assert!(audit(&r, ax, &opts()).unwrap().holds, "{ax:?} {r:?}");
        }
    }
}

#[test]
fn identical_economies_pair_each_allocation_with_itself() {
    let e = gallery("indifferent-single-slot").unwrap().economy;
    let ws = matching_cs(&e, &e, &limits(), &opts()).unwrap();
    assert_eq!(ws.len(), 6);
    assert!(ws.iter().all(|w| w.first == w.second));
}

fn check_cs(g: &Economy, g2: &Economy) -> Vec<CsWitness> {
    let ws = matching_cs(g, g2, &limits(), &opts()).unwrap();
    let u = g.universe();
    for w in &ws {
        assert!(g.is_stable(w.first).unwrap() && g2.is_stable(w.second).unwrap());
        for f in 0..u.firms().len() {
            assert!(g.prefers(Agent::Firm(f), w.first, w.second));
        }
        for k in 0..u.workers().len() {
            assert!(g2.prefers(Agent::Worker(k), w.second, w.first));
        }
    }
    let forward: BTreeSet<_> = ws.iter().filter(|w| w.direction == CsDirection::Forward).map(|w| w.first).collect();
    assert_eq!(forward.into_iter().collect::<Vec<_>>(), g.stable_set(&limits()).unwrap());
    ws
}

#[test]
fn worker_exit_and_firm_entry() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let e = random_economy(&mut rng, 6);
        for w in 0..e.universe().workers().len() {
            check_cs(&e, &e.without(Agent::Worker(w)).unwrap());
        }
        for f in 0..e.universe().firms().len() {
            check_cs(&e.without(Agent::Firm(f)).unwrap(), &e);
        }
    }
}

#[test]
fn exit_in_the_wrong_direction_is_refused() {
    let e = single_pair();
    let gone = e.without(Agent::Worker(0)).unwrap();
    assert!(matches!(matching_cs(&gone, &e, &limits(), &opts()), Err(Error::Hypothesis(_))));
}

#[test]
fn relaxing_a_hiring_budget_helps_workers() {
    // division 1 ranks x; division 2 ranks z above y
    let groups = vec![vec![0], vec![2, 1]];
    let tight = Feasibility::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
    let loose = Feasibility::new(2, vec![vec![1, 1]]).unwrap();
    let g = three_workers(ChoiceRule::quota(3, groups.clone(), tight).unwrap());
    let g2 = three_workers(ChoiceRule::quota(3, groups, loose).unwrap());
    let ws = check_cs(&g, &g2);
    let u = g.universe();
    assert_eq!(g2.stable_set(&limits()).unwrap(), vec![u.set_of(&["x", "z"]).unwrap()]);
    assert!(ws.iter().any(|w| w.second.count_ones() > w.first.count_ones()));
}

#[test]
fn stable_set_respects_its_cap() {
    let mut l = limits();
    l.stable_set_contracts = 2;
    let e = gallery("indifferent-single-slot").unwrap().economy;
    assert!(matches!(e.stable_set(&l), Err(Error::SizeLimit { .. })));
}
