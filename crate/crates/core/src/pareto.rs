//! Pareto optimal choice of a group in which every member has an objective
//! table, plus the dominance conditions under which the Pareto set moves up
//! in the weak set order.

use crate::choice::{self, DominanceKind, ObjectiveTable};
use crate::error::{Error, Result};
use crate::order::{FinitePoset, SetOrder, Subset};
use crate::Q;

/// One objective table per agent, all over the same ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityProfile {
    tables: Vec<ObjectiveTable>,
}

impl UtilityProfile {
    pub fn new(tables: Vec<ObjectiveTable>) -> Result<Self> {
        let Some(first) = tables.first() else {
            return Err(Error::Invalid("a profile needs at least one agent".into()));
        };
        if tables.iter().any(|t| t.len() != first.len()) {
            return Err(Error::Invalid("tables of one profile must have equal length".into()));
        }
        Ok(UtilityProfile { tables })
    }

    pub fn agents(&self) -> usize {
        self.tables.len()
    }

    /// Number of alternatives.
    pub fn elements(&self) -> usize {
        self.tables[0].len()
    }

    pub fn table(&self, i: usize) -> &ObjectiveTable {
        &self.tables[i]
    }

    pub fn tables(&self) -> &[ObjectiveTable] {
        &self.tables
    }

    fn check(&self, p: &FinitePoset) -> Result<()> {
        if self.elements() != p.len() {
            return Err(Error::Invalid(format!(
                "profile has {} values per agent for {} elements",
                self.elements(),
                p.len()
            )));
        }
        Ok(())
    }

    /// `{y : u_j(y) ≥ u_j(x)}` over the agents `j` accepted by `keep`.
    fn no_worse(&self, x: usize, keep: impl Fn(usize) -> bool) -> Subset {
        Subset::from_indices(
            self.elements(),
            (0..self.elements()).filter(|&y| {
                self.tables
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| keep(j))
                    .all(|(_, t)| t[y] >= t[x])
            }),
        )
    }
}

/// Every agent weakly prefers `y` to `x` and some agent strictly.
pub fn pareto_dominates(u: &UtilityProfile, y: usize, x: usize) -> bool {
    u.tables.iter().all(|t| t[y] >= t[x]) && u.tables.iter().any(|t| t[y] > t[x])
}

/// `P(u)`: alternatives no alternative of the ground set Pareto dominates.
pub fn pareto_set(p: &FinitePoset, u: &UtilityProfile) -> Result<Subset> {
    u.check(p)?;
    if u.agents() == 1 {
        return choice::argmax(p, &p.full_set(), &u.tables[0]);
    }
    let n = p.len();
    Ok(p.subset((0..n).filter(|&x| !(0..n).any(|y| pareto_dominates(u, y, x)))))
}

/// A Pareto optimal alternative that every agent likes at least as much as
/// `x`, found by maximizing one agent at a time over the alternatives no
/// agent likes less than the current point.
pub fn dominating_chain(p: &FinitePoset, u: &UtilityProfile, x: usize) -> Result<usize> {
    u.check(p)?;
    if pareto_set(p, u)?.contains(x) {
        return Ok(x);
    }
    let mut current = x;
    for i in 0..u.agents() {
        let feasible = u.no_worse(current, |_| true);
        current = choice::argmax(p, &feasible, &u.tables[i])?
            .first()
            .expect("argmax over a nonempty set");
    }
    Ok(current)
}

/// `x ∈ ∩_i Φ_i(x)` where `Φ_i(x)` maximizes `u_i` over the alternatives that
/// every other agent likes at least as much as `x`.
pub fn phi_membership(p: &FinitePoset, u: &UtilityProfile, x: usize) -> Result<bool> {
    u.check(p)?;
    for i in 0..u.agents() {
        let others = u.no_worse(x, |j| j != i);
        if !choice::argmax(p, &others, &u.tables[i])?.contains(x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weight vectors for nested weighted-sum maximization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSequence {
    steps: Vec<Vec<Q>>,
}

impl WeightSequence {
    /// Checks: at most one step per agent, nonnegative nonzero steps, and a
    /// strictly positive last step.
    pub fn new(steps: Vec<Vec<Q>>, agents: usize) -> Result<Self> {
        let zero = Q::from_integer(0);
        let bad = |why: &str| Err(Error::Invalid(format!("weight sequence: {why}")));
        if steps.is_empty() || steps.len() > agents {
            return bad("needs between 1 and one step per agent");
        }
        for w in &steps {
            if w.len() != agents {
                return bad("every step needs one weight per agent");
            }
            if w.iter().any(|&x| x < zero) || w.iter().all(|&x| x == zero) {
                return bad("steps must be nonnegative and nonzero");
            }
        }
        if steps.last().unwrap().iter().any(|&x| x <= zero) {
            return bad("the last step must be strictly positive");
        }
        Ok(WeightSequence { steps })
    }

    pub fn steps(&self) -> &[Vec<Q>] {
        &self.steps
    }
}

/// `X^T` where `X^0 = X` and `X^t` maximizes `Σ_i φ^t_i u_i` over `X^{t−1}`.
pub fn sequential_weighted_max(p: &FinitePoset, u: &UtilityProfile, w: &WeightSequence) -> Result<Subset> {
    u.check(p)?;
    if w.steps[0].len() != u.agents() {
        return Err(Error::Invalid("weights and profile disagree on the number of agents".into()));
    }
    let mut current = p.full_set();
    for phi in &w.steps {
        let sum = ObjectiveTable::from_fn(p.len(), |x| {
            phi.iter().zip(&u.tables).map(|(&a, t)| a * t[x]).sum()
        });
        current = choice::argmax(p, &current, &sum)?;
    }
    Ok(current)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileDominance {
    SingleCrossing,
    IncreasingDifferences,
}

/// Agent by agent: `v_i` single-crossing dominates `u_i`, or
/// `v_i(x′) − v_i(x) ≥ u_i(x′) − u_i(x)` for every `x′ > x`.
pub fn profile_dominates(
    p: &FinitePoset,
    kind: ProfileDominance,
    v: &UtilityProfile,
    u: &UtilityProfile,
) -> Result<bool> {
    u.check(p)?;
    v.check(p)?;
    if u.agents() != v.agents() {
        return Err(Error::Invalid("profiles have different numbers of agents".into()));
    }
    let n = p.len();
    for (vi, ui) in v.tables.iter().zip(&u.tables) {
        let ok = match kind {
            ProfileDominance::SingleCrossing => choice::dominates(p, DominanceKind::SingleCrossing, vi, ui)?,
            ProfileDominance::IncreasingDifferences => (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| p.lt(a, b))
                .all(|(a, b)| vi[b] - vi[a] >= ui[b] - ui[a]),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f(x ∨ x′) − f(x) ≥ f(x′) − f(x ∧ x′)` for all pairs.
pub fn supermodular(p: &FinitePoset, f: &ObjectiveTable) -> Result<bool> {
    p.require_lattice()?;
    let n = p.len();
    Ok((0..n).all(|a| {
        (0..n).all(|b| {
            let (j, m) = (p.join(a, b).unwrap(), p.meet(a, b).unwrap());
            f[j] - f[a] >= f[b] - f[m]
        })
    }))
}

pub fn supermodular_profile(p: &FinitePoset, u: &UtilityProfile) -> Result<bool> {
    u.check(p)?;
    for t in &u.tables {
        if !supermodular(p, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParetoComparison {
    pub pareto_u: Subset,
    pub pareto_v: Subset,
    pub weak: bool,
    pub strong: Option<bool>,
    /// A Pareto point of one profile with no comparable mate in the other.
    pub witness: Option<usize>,
    /// Set when the hypotheses only mirror a continuum result on a grid.
    pub empirical: bool,
}

/// Whether `P(v) ≥ws P(u)`, after checking the hypothesis of `kind`.
///
/// Single-crossing dominance needs a totally ordered ground set. Increasing
/// differences needs a lattice and supermodular profiles; on finite grids that
/// result is only an analogue of a convex-domain statement, so the comparison
/// is flagged `empirical`.
pub fn pareto_wmcs_check(
    p: &FinitePoset,
    v: &UtilityProfile,
    u: &UtilityProfile,
    kind: ProfileDominance,
) -> Result<ParetoComparison> {
    match kind {
        ProfileDominance::SingleCrossing => {
            if !p.is_chain() {
                return Err(Error::Hypothesis("ground set is not totally ordered".into()));
            }
        }
        ProfileDominance::IncreasingDifferences => {
            p.require_lattice()?;
            if !supermodular_profile(p, u)? || !supermodular_profile(p, v)? {
                return Err(Error::Hypothesis("profiles are not supermodular".into()));
            }
        }
    }
    if !profile_dominates(p, kind, v, u)? {
        return Err(Error::Hypothesis(format!("profile dominance {kind:?} fails")));
    }
    let pu = pareto_set(p, u)?;
    let pv = pareto_set(p, v)?;
    let no_upper = pu.iter().find(|&x| !pv.iter().any(|y| p.leq(x, y)));
    let no_lower = pv.iter().find(|&y| !pu.iter().any(|x| p.leq(x, y)));
    let strong = if p.is_lattice() {
        Some(p.set_dominates(&pv, &pu, SetOrder::Strong)?)
    } else {
        None
    };
    Ok(ParetoComparison {
        weak: no_upper.is_none() && no_lower.is_none(),
        witness: no_upper.or(no_lower),
        strong,
        pareto_u: pu,
        pareto_v: pv,
        empirical: kind == ProfileDominance::IncreasingDifferences,
    })
}

/// The grid `{0, 1/steps, …, 1}²` with the coordinates of every element.
pub fn unit_square_grid(steps: i64, cap: usize) -> Result<(FinitePoset, Vec<(Q, Q)>)> {
    if steps < 1 {
        return Err(Error::Invalid("grid needs at least one step per axis".into()));
    }
    let axis: Vec<Q> = (0..=steps).map(|i| Q::new(i, steps)).collect();
    let names: Vec<String> = axis.iter().map(|q| q.to_string()).collect();
    let p = FinitePoset::grid(&[names.clone(), names], cap)?;
    let m = axis.len();
    let coords = (0..p.len()).map(|k| (axis[k / m], axis[k % m])).collect();
    Ok((p, coords))
}

/// Two divisions choosing a point `(x, y)`: division 1 targets `(2ωᴬ, ωᴮ)`,
/// division 2 targets `(ωᴬ, 2ωᴮ)`, both with squared-distance losses.
pub fn two_division_profile(coords: &[(Q, Q)], omega: (Q, Q)) -> UtilityProfile {
    let two = Q::from_integer(2);
    let loss = |(x, y): (Q, Q), (tx, ty): (Q, Q)| -((x - tx) * (x - tx)) - (y - ty) * (y - ty);
    let u1 = ObjectiveTable::new(coords.iter().map(|&c| loss(c, (two * omega.0, omega.1))).collect());
    let u2 = ObjectiveTable::new(coords.iter().map(|&c| loss(c, (omega.0, two * omega.1))).collect());
    UtilityProfile::new(vec![u1, u2]).expect("two equal-length tables")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn quarter_chain() -> FinitePoset {
        FinitePoset::chain_of((0..5).map(|i| q(i, 4).to_string()).collect()).unwrap()
    }

    fn profile(fs: &[&dyn Fn(Q) -> Q]) -> UtilityProfile {
        UtilityProfile::new(
            fs.iter()
                .map(|f| ObjectiveTable::from_fn(5, |i| f(q(i as i64, 4))))
                .collect(),
        )
        .unwrap()
    }

    fn piecewise_profiles() -> (UtilityProfile, UtilityProfile) {
        let (h, r) = (q(1, 2), q(1, 4));
        let u1 = move |x: Q| if x < h { q(2, 1) - x } else { q(3, 1) - x };
        let u2 = |x: Q| q(1, 1) - x;
        let v1 = move |x: Q| if x < r { x } else if x < h { h - x } else { h + x };
        let v2 = move |x: Q| if x < r { x } else if x < h { h - x } else { r * (x - h) };
        (profile(&[&u1, &u2]), profile(&[&v1, &v2]))
    }

    // Independent Pareto oracle: keep x unless some y is no worse for all and better for one.
    fn oracle_pareto(u: &UtilityProfile) -> Vec<usize> {
        let n = u.elements();
        (0..n)
            .filter(|&x| {
                !(0..n).any(|y| {
                    let ge = u.tables().iter().all(|t| t[y] >= t[x]);
                    let gt = u.tables().iter().any(|t| t[y] > t[x]);
                    ge && gt
                })
            })
            .collect()
    }

    #[test]
    fn piecewise_chain_example() {
        let p = quarter_chain();
        let (u, v) = piecewise_profiles();
        assert_eq!(p.format_subset(&pareto_set(&p, &u).unwrap()), "{0, 1/2}");
        assert_eq!(p.format_subset(&pareto_set(&p, &v).unwrap()), "{1/4, 1}");
        assert!(profile_dominates(&p, ProfileDominance::SingleCrossing, &v, &u).unwrap());
        let cmp = pareto_wmcs_check(&p, &v, &u, ProfileDominance::SingleCrossing).unwrap();
        assert!(cmp.weak);
        assert_eq!(cmp.strong, Some(false));
        assert_eq!(dominating_chain(&p, &u, 3).unwrap(), 2);
        assert!(!phi_membership(&p, &u, 1).unwrap());
    }

    #[test]
    fn single_agent_is_argmax() {
        let p = FinitePoset::chain(4);
        let t = ObjectiveTable::new([1, 3, 3, 0].iter().map(|&k| q(k, 1)).collect());
        let u = UtilityProfile::new(vec![t.clone()]).unwrap();
        assert_eq!(pareto_set(&p, &u).unwrap(), choice::argmax(&p, &p.full_set(), &t).unwrap());
        assert!(phi_membership(&p, &u, 1).unwrap());
    }

    #[test]
    fn opposed_agents_make_everything_optimal() {
        let p = FinitePoset::chain(5);
        let up = ObjectiveTable::from_fn(5, |i| q(i as i64, 1));
        let down = ObjectiveTable::from_fn(5, |i| q(-(i as i64), 1));
        let u = UtilityProfile::new(vec![up, down]).unwrap();
        assert_eq!(pareto_set(&p, &u).unwrap(), p.full_set());
        for x in 0..5 {
            assert_eq!(dominating_chain(&p, &u, x).unwrap(), x);
        }
    }

    #[test]
    fn weight_sequences_are_validated() {
        assert!(WeightSequence::new(vec![vec![q(1, 1), q(0, 1)]], 2).is_err());
        assert!(WeightSequence::new(vec![vec![q(0, 1), q(0, 1)], vec![q(1, 1), q(1, 1)]], 2).is_err());
        assert!(WeightSequence::new(vec![vec![q(1, 1); 2]; 3], 2).is_err());
        assert!(WeightSequence::new(vec![vec![q(1, 1), q(0, 1)], vec![q(1, 1), q(1, 1)]], 2).is_ok());
    }

    #[test]
    fn identical_agents_with_equal_weights() {
        let p = FinitePoset::chain(4);
        let t = ObjectiveTable::new([2, 0, 2, 1].iter().map(|&k| q(k, 1)).collect());
        let u = UtilityProfile::new(vec![t.clone(), t.clone()]).unwrap();
        let w = WeightSequence::new(vec![vec![q(1, 2), q(1, 2)]], 2).unwrap();
        assert_eq!(
            sequential_weighted_max(&p, &u, &w).unwrap(),
            choice::argmax(&p, &p.full_set(), &t).unwrap()
        );
    }

    #[test]
    fn shifted_division_targets_on_twelfth_grid() {
        let (p, coords) = unit_square_grid(12, 1024).unwrap();
        let u = two_division_profile(&coords, (q(1, 4), q(1, 4)));
        let v = two_division_profile(&coords, (q(1, 3), q(1, 3)));
        assert!(profile_dominates(&p, ProfileDominance::IncreasingDifferences, &v, &u).unwrap());
        assert!(supermodular_profile(&p, &u).unwrap() && supermodular_profile(&p, &v).unwrap());
        let cmp = pareto_wmcs_check(&p, &v, &u, ProfileDominance::IncreasingDifferences).unwrap();
        assert_eq!(cmp.pareto_u.to_vec(), oracle_pareto(&u));
        assert_eq!(cmp.pareto_v.to_vec(), oracle_pareto(&v));
        assert!(cmp.weak && cmp.empirical);
        assert_eq!(cmp.strong, Some(false));
        // The continuum frontiers are the segments between the two targets.
        for (pu, omega) in [(&cmp.pareto_u, q(1, 4)), (&cmp.pareto_v, q(1, 3))] {
            for k in 0..=12 {
                let x = q(k, 12);
                if x >= omega && x <= q(2, 1) * omega {
                    let y = q(3, 1) * omega - x;
                    let idx = coords.iter().position(|&c| c == (x, y));
                    if let Some(i) = idx {
                        assert!(pu.contains(i), "segment point ({x},{y}) missing");
                    }
                }
            }
        }
        // Positive-weight maximizers are Pareto optimal here too.
        for (a, b) in [(1, 1), (1, 3), (3, 1), (2, 5)] {
            let w = WeightSequence::new(vec![vec![q(a, 1), q(b, 1)]], 2).unwrap();
            assert!(sequential_weighted_max(&p, &u, &w).unwrap().is_subset(&cmp.pareto_u));
        }
    }

    #[test]
    fn hypotheses_are_enforced() {
        let g = FinitePoset::chain(2).product(&FinitePoset::chain(2), 64).unwrap();
        let t = UtilityProfile::new(vec![ObjectiveTable::constant(4, q(0, 1))]).unwrap();
        assert!(matches!(
            pareto_wmcs_check(&g, &t, &t, ProfileDominance::SingleCrossing),
            Err(Error::Hypothesis(_))
        ));
    }

    fn arb_profile() -> impl Strategy<Value = (FinitePoset, UtilityProfile, u64)> {
        (any::<u64>(), 1usize..9, 1usize..4).prop_map(|(seed, n, agents)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = gen::random_poset(&mut rng, n, 0.3);
            let u = UtilityProfile::new((0..agents).map(|_| gen::random_table(&mut rng, n, 0, 3)).collect()).unwrap();
            (p, u, seed)
        })
    }

    proptest! {
        #[test]
        fn pareto_matches_oracle_and_phi((p, u, _) in arb_profile()) {
            let ps = pareto_set(&p, &u).unwrap();
            prop_assert_eq!(ps.to_vec(), oracle_pareto(&u));
            prop_assert!(!ps.is_empty());
            for x in 0..p.len() {
                prop_assert_eq!(phi_membership(&p, &u, x).unwrap(), ps.contains(x));
            }
        }

        #[test]
        fn chain_reaches_a_dominating_optimum((p, u, _) in arb_profile()) {
            let ps = pareto_set(&p, &u).unwrap();
            for x in 0..p.len() {
                let y = dominating_chain(&p, &u, x).unwrap();
                prop_assert!(ps.contains(y));
                if ps.contains(x) {
                    prop_assert_eq!(y, x);
                } else {
                    prop_assert!(pareto_dominates(&u, y, x));
                }
            }
        }

        #[test]
        fn nested_weighted_maxima_are_optimal((p, u, seed) in arb_profile()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let agents = u.agents();
            let steps = rng.gen_range(1..=agents);
            let mut ws: Vec<Vec<Q>> = (0..steps - 1)
                .map(|_| {
                    let mut w: Vec<Q> = (0..agents).map(|_| q(rng.gen_range(0..3), 1)).collect();
                    w[rng.gen_range(0..agents)] = q(1, 1);
                    w
                })
                .collect();
            ws.push((0..agents).map(|_| q(rng.gen_range(1..4), 1)).collect());
            let w = WeightSequence::new(ws, agents).unwrap();
            let x = sequential_weighted_max(&p, &u, &w).unwrap();
            prop_assert!(x.is_subset(&pareto_set(&p, &u).unwrap()));
        }
    }
}
