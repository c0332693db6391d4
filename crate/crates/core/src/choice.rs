//! Maximizers of objective tables, and the dominance relations between two
//! tables that decide how maximizer sets move when one table replaces another.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::order::{FinitePoset, SetOrder, Subset};
use crate::Q;

/// Exact value of every element of a poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectiveTable {
    values: Vec<Q>,
}

impl ObjectiveTable {
    pub fn new(values: Vec<Q>) -> Self {
        ObjectiveTable { values }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> Q) -> Self {
        ObjectiveTable {
            values: (0..n).map(f).collect(),
        }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        ObjectiveTable { values: vec![c; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    fn check(&self, p: &FinitePoset) -> Result<()> {
        if self.len() != p.len() {
            return Err(Error::Invalid(format!(
                "table has {} values for {} elements",
                self.len(),
                p.len()
            )));
        }
        Ok(())
    }

    fn max_over(&self, s: &Subset) -> Option<Q> {
        s.iter().map(|i| self.values[i]).max()
    }
}

impl Index<usize> for ObjectiveTable {
    type Output = Q;

    fn index(&self, i: usize) -> &Q {
        &self.values[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DominanceKind {
    SingleCrossing,
    MS,
    Weak,
    WeakInterval,
    Interval,
    QSInterval,
}

impl DominanceKind {
    pub const ALL: [DominanceKind; 6] = [
        DominanceKind::SingleCrossing,
        DominanceKind::MS,
        DominanceKind::Weak,
        DominanceKind::WeakInterval,
        DominanceKind::Interval,
        DominanceKind::QSInterval,
    ];

    fn needs_lattice(self) -> bool {
        !matches!(self, DominanceKind::SingleCrossing | DominanceKind::QSInterval)
    }
}

/// Which subsets of the ground set a comparative-statics claim ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Sublattices,
    Subintervals,
}

/// A constraint set on which the maximizers fail to move as claimed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub set: Subset,
    pub argmax_u: Subset,
    pub argmax_v: Subset,
}

/// `M_S(f)`: the maximizers of `f` over `s`.
pub fn argmax(p: &FinitePoset, s: &Subset, f: &ObjectiveTable) -> Result<Subset> {
    f.check(p)?;
    let best = f.max_over(s).ok_or(Error::EmptyDomain)?;
    Ok(p.subset(s.iter().filter(|&i| f[i] == best)))
}

/// `lhs ≥ rhs ⇒ clhs ≥ crhs` together with `lhs > rhs ⇒ clhs > crhs`.
fn implies(lhs: Q, rhs: Q, clhs: Q, crhs: Q) -> bool {
    (lhs < rhs || clhs >= crhs) && (lhs <= rhs || clhs > crhs)
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

/// `f(x″) − f(x′∧x″) ≥ (>) 0 ⇒ f(x′∨x″) − f(x′) ≥ (>) 0` for all pairs.
pub fn quasi_supermodular(p: &FinitePoset, f: &ObjectiveTable) -> Result<bool> {
    p.require_lattice()?;
    f.check(p)?;
    Ok(pairs(p.len()).all(|(a, b)| {
        let (m, j) = (p.try_meet(a, b).unwrap(), p.try_join(a, b).unwrap());
        implies(f[b], f[m], f[j], f[a])
    }))
}

/// Whenever `x′` is best on `[x′∧x″, x′]`:
/// `f(x′) ≥ (>) f(x′∧x″) ⇒ f(x′∨x″) ≥ (>) f(x″)`.
pub fn i_quasi_supermodular(p: &FinitePoset, f: &ObjectiveTable) -> Result<bool> {
    p.require_lattice()?;
    f.check(p)?;
    Ok(pairs(p.len()).all(|(a, b)| {
        let (m, j) = (p.try_meet(a, b).unwrap(), p.try_join(a, b).unwrap());
        let best = p.closed_interval(m, a).iter().all(|x| f[a] >= f[x]);
        !best || implies(f[a], f[m], f[j], f[b])
    }))
}

/// Whether `v` dominates `u` in the given sense. Pairs with `x″ ≤ x′` are exempt.
pub fn dominates(p: &FinitePoset, kind: DominanceKind, v: &ObjectiveTable, u: &ObjectiveTable) -> Result<bool> {
    u.check(p)?;
    v.check(p)?;
    if kind.needs_lattice() {
        p.require_lattice()?;
    }
    let n = p.len();
    let jm = |a, b| (p.meet(a, b).unwrap(), p.join(a, b).unwrap());
    // Both interval kinds only constrain pairs where x″ is u-best and x′ is
    // v-best on J(x′, x″).
    let interval_side = |a: usize, b: usize| {
        let (m, j) = jm(a, b);
        p.closed_interval(m, j).iter().all(|x| u[b] >= u[x] && v[a] >= v[x])
    };
    let ok = match kind {
        DominanceKind::SingleCrossing => pairs(n)
            .filter(|&(a, b)| p.lt(a, b))
            .all(|(a, b)| implies(u[b], u[a], v[b], v[a])),
        DominanceKind::MS => {
            dominates(p, DominanceKind::SingleCrossing, v, u)?
                && quasi_supermodular(p, u)?
                && quasi_supermodular(p, v)?
        }
        DominanceKind::Weak => pairs(n).filter(|&(a, b)| !p.leq(b, a)).all(|(a, b)| {
            let (m, j) = jm(a, b);
            implies(u[b], u[m].max(u[a]), v[b].max(v[j]), v[a])
        }),
        DominanceKind::WeakInterval => pairs(n)
            .filter(|&(a, b)| !p.leq(b, a) && interval_side(a, b))
            .all(|(a, b)| {
                let (m, j) = jm(a, b);
                let hu = u.max_over(&p.closed_interval(m, a)).unwrap();
                let cv = v.max_over(&p.closed_interval(b, j)).unwrap();
                implies(u[b], hu, cv, v[a])
            }),
        DominanceKind::Interval => pairs(n)
            .filter(|&(a, b)| !p.leq(b, a) && interval_side(a, b))
            .all(|(a, b)| {
                let (m, j) = jm(a, b);
                implies(u[b], u[m], v[j], v[a])
            }),
        DominanceKind::QSInterval => pairs(n)
            .filter(|&(a, b)| p.lt(a, b) && p.closed_interval(a, b).iter().all(|x| u[b] >= u[x]))
            .all(|(a, b)| implies(u[b], u[a], v[b], v[a])),
    };
    Ok(ok)
}

/// Constraint sets of a family in canonical order. Sublattices are listed
/// exhaustively up to `exhaustive_cap` elements; above that the four-point
/// sets `{x′, x″, x′∧x″, x′∨x″}` stand in for them.
pub fn family_members(p: &FinitePoset, family: Family, exhaustive_cap: usize) -> Result<Vec<Subset>> {
    p.require_lattice()?;
    match family {
        Family::Subintervals => Ok(p.subintervals()),
        Family::Sublattices if p.len() <= exhaustive_cap => p.sublattices(exhaustive_cap),
        Family::Sublattices => {
            let n = p.len();
            let mut seen = std::collections::HashSet::new();
            let mut out = Vec::new();
            for (a, b) in pairs(n).filter(|&(a, b)| a < b) {
                let s = p.subset([a, b, p.meet(a, b).unwrap(), p.join(a, b).unwrap()]);
                if seen.insert(s.clone()) {
                    out.push(s);
                }
            }
            Ok(out)
        }
    }
}

/// First constraint set `S` in the family on which `M_S(u) ≤ M_S(v)` fails in
/// the given set order (`Weak` or `Strong`), if any.
///
/// At most `budget` sets are examined; a larger family without a witness in
/// the examined prefix yields [`Error::BudgetExceeded`].
pub fn wmcs_witness_search(
    p: &FinitePoset,
    v: &ObjectiveTable,
    u: &ObjectiveTable,
    family: Family,
    order: SetOrder,
    exhaustive_cap: usize,
    budget: u64,
) -> Result<Option<Witness>> {
    let members = family_members(p, family, exhaustive_cap)?;
    let total = members.len() as u64;
    for (k, s) in members.into_iter().enumerate() {
        if k as u64 >= budget {
            return Err(Error::BudgetExceeded { checked: k as u64, total });
        }
        let mu = argmax(p, &s, u)?;
        let mv = argmax(p, &s, v)?;
        if !p.set_dominates(&mv, &mu, order)? {
            return Ok(Some(Witness {
                set: s,
                argmax_u: mu,
                argmax_v: mv,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn quarter_grid() -> FinitePoset {
        let axis: Vec<String> = (0..5).map(|i| q(i, 4).to_string()).collect();
        FinitePoset::grid(&[axis.clone(), axis], 64).unwrap()
    }

    fn sum_distance(p: &FinitePoset, t: Q) -> ObjectiveTable {
        ObjectiveTable::from_fn(p.len(), |k| {
            let s = q((k / 5) as i64, 4) + q((k % 5) as i64, 4) - t;
            -(s * s)
        })
    }

    #[test]
    fn argmax_basics() {
        let p = FinitePoset::chain(4);
        let c = ObjectiveTable::constant(4, q(1, 1));
        assert_eq!(argmax(&p, &p.full_set(), &c).unwrap(), p.full_set());
        assert_eq!(argmax(&p, &p.empty_set(), &c), Err(Error::EmptyDomain));
    }

    #[test]
    fn argmax_on_anti_diagonal() {
        let g = quarter_grid();
        let u = sum_distance(&g, q(1, 2));
        let m = argmax(&g, &g.full_set(), &u).unwrap();
        assert_eq!(g.format_subset(&m), "{(0,1/2), (1/4,1/4), (1/2,0)}");
    }

    #[test]
    fn argmax_of_piecewise_table_on_chain() {
        let p = FinitePoset::chain_of((0..5).map(|i| q(i, 4).to_string()).collect()).unwrap();
        let u1 = ObjectiveTable::from_fn(5, |i| {
            let x = q(i as i64, 4);
            if x < q(1, 2) {
                q(2, 1) - x
            } else {
                q(3, 1) - x
            }
        });
        assert_eq!(argmax(&p, &p.full_set(), &u1).unwrap(), p.subset([2]));
    }

    #[test]
    fn quasi_supermodularity_examples() {
        let d = FinitePoset::chain(2).product(&FinitePoset::chain(2), 64).unwrap();
        // diamond bot, l, r, top = (0,0), (0,1), (1,0), (1,1)
        let bad = ObjectiveTable::new(vec![q(0, 1), q(1, 1), q(1, 1), q(0, 1)]);
        assert!(!quasi_supermodular(&d, &bad).unwrap());
        let sup = ObjectiveTable::new(vec![q(0, 1), q(1, 1), q(1, 1), q(3, 1)]);
        assert!(quasi_supermodular(&d, &sup).unwrap());
        let c = FinitePoset::chain(5);
        let any = ObjectiveTable::new([3, 1, 4, 1, 5].iter().map(|&k| q(k, 1)).collect());
        assert!(quasi_supermodular(&c, &any).unwrap());
        assert_eq!(quasi_supermodular(&FinitePoset::antichain(2), &sup), Err(Error::NotLattice));
    }

    #[test]
    fn every_kind_is_reflexive() {
        let g = quarter_grid();
        let u = sum_distance(&g, q(1, 3));
        for kind in DominanceKind::ALL {
            // MS and Interval also ask maximizers to be closed under ∨ and ∧,
            // which this concave table breaks on J((1/4,0), (0,1/4)).
            let expected = !matches!(kind, DominanceKind::MS | DominanceKind::Interval);
            assert_eq!(dominates(&g, kind, &u, &u).unwrap(), expected, "{kind:?}");
        }
        let modular = ObjectiveTable::from_fn(g.len(), |k| q((k / 5 + 2 * (k % 5)) as i64, 1));
        for kind in DominanceKind::ALL {
            assert!(dominates(&g, kind, &modular, &modular).unwrap(), "{kind:?}");
        }
    }

    #[test]
    fn shifted_target_on_quarter_grid() {
        let g = quarter_grid();
        let u = sum_distance(&g, q(1, 4));
        let v = sum_distance(&g, q(3, 4));
        assert!(dominates(&g, DominanceKind::WeakInterval, &v, &u).unwrap());
        assert!(!dominates(&g, DominanceKind::Weak, &v, &u).unwrap());
        let w = wmcs_witness_search(&g, &v, &u, Family::Sublattices, SetOrder::Weak, 12, u64::MAX)
            .unwrap()
            .expect("witness");
        assert_eq!(w.set.len(), 4);
        assert_eq!(w.argmax_u.len(), 1);
        assert_eq!(w.argmax_v.len(), 1);
        let (xu, xv) = (w.argmax_u.first().unwrap(), w.argmax_v.first().unwrap());
        assert!(!g.comparable(xu, xv));
        assert!(g.is_sublattice(&w.set).unwrap());
        assert!(wmcs_witness_search(&g, &v, &u, Family::Subintervals, SetOrder::Weak, 12, u64::MAX)
            .unwrap()
            .is_none());
    }

    #[test]
    fn budget_is_reported() {
        let g = quarter_grid();
        let u = sum_distance(&g, q(1, 4));
        let err = wmcs_witness_search(&g, &u, &u, Family::Subintervals, SetOrder::Weak, 12, 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { checked: 10, .. }));
    }

    // Brute-force reading of "maximizers move up on every member of the family".
    fn moves_up(p: &FinitePoset, v: &ObjectiveTable, u: &ObjectiveTable, sets: &[Subset], order: SetOrder) -> bool {
        sets.iter().all(|s| {
            let mu = argmax(p, s, u).unwrap();
            let mv = argmax(p, s, v).unwrap();
            p.set_dominates(&mv, &mu, order).unwrap()
        })
    }

    #[test]
    fn characterizations_on_random_lattices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..120 {
            let n = 2 + rand::Rng::gen_range(&mut rng, 0..7);
            let p = gen::random_lattice(&mut rng, n);
            let u = gen::random_table(&mut rng, n, 0, 3);
            let v = gen::random_table(&mut rng, n, 0, 3);
            let subl = p.sublattices(12).unwrap();
            let ints = p.subintervals();
            assert_eq!(
                dominates(&p, DominanceKind::Weak, &v, &u).unwrap(),
                moves_up(&p, &v, &u, &subl, SetOrder::Weak)
            );
            assert_eq!(
                dominates(&p, DominanceKind::WeakInterval, &v, &u).unwrap(),
                moves_up(&p, &v, &u, &ints, SetOrder::Weak)
            );
            assert_eq!(
                dominates(&p, DominanceKind::Interval, &v, &u).unwrap(),
                moves_up(&p, &v, &u, &ints, SetOrder::Strong)
            );
        }
    }

    fn arb_instance() -> impl Strategy<Value = (FinitePoset, ObjectiveTable, ObjectiveTable)> {
        (any::<u64>(), 1usize..8).prop_map(|(seed, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = gen::random_lattice(&mut rng, n);
            let u = gen::random_table(&mut rng, n, 0, 3);
            let v = gen::random_table(&mut rng, n, 0, 3);
            (p, u, v)
        })
    }

    proptest! {
        #[test]
        fn dominance_implications((p, u, v) in arb_instance()) {
            let d = |k| dominates(&p, k, &v, &u).unwrap();
            if d(DominanceKind::MS) { prop_assert!(d(DominanceKind::Weak)); }
            if d(DominanceKind::Weak) { prop_assert!(d(DominanceKind::WeakInterval)); }
            if d(DominanceKind::Interval) { prop_assert!(d(DominanceKind::WeakInterval)); }
            if d(DominanceKind::MS) { prop_assert!(d(DominanceKind::SingleCrossing)); }
        }

        #[test]
        fn qs_interval_with_i_quasi_supermodularity_moves_strongly((p, u, v) in arb_instance()) {
            let qs = dominates(&p, DominanceKind::QSInterval, &v, &u).unwrap();
            let iq = i_quasi_supermodular(&p, &u).unwrap() || i_quasi_supermodular(&p, &v).unwrap();
            if qs && iq {
                prop_assert!(moves_up(&p, &v, &u, &p.subintervals(), SetOrder::Strong));
            }
        }

        #[test]
        fn chains_collapse_the_hierarchy(seed in any::<u64>(), n in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = FinitePoset::chain(n);
            let u = gen::random_table(&mut rng, n, 0, 3);
            let v = gen::random_table(&mut rng, n, 0, 3);
            let d = |k| dominates(&p, k, &v, &u).unwrap();
            prop_assert_eq!(d(DominanceKind::Weak), d(DominanceKind::SingleCrossing));
            prop_assert_eq!(d(DominanceKind::WeakInterval), d(DominanceKind::Interval));
        }

        #[test]
        fn argmax_nonempty_and_optimal((p, u, _v) in arb_instance(), mask in 1u64..256) {
            let s = Subset::from_mask(p.len(), mask);
            prop_assume!(!s.is_empty());
            let m = argmax(&p, &s, &u).unwrap();
            prop_assert!(!m.is_empty() && m.is_subset(&s));
            for x in s.iter() {
                prop_assert!(m.iter().all(|y| u[y] >= u[x]));
            }
        }
    }
}
