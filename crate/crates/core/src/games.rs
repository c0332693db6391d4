//! Finite normal-form games given by best-response correspondences.
//!
//! Profiles are vectors of strategy indices and are numbered in mixed radix
//! with player 0 most significant. Each player's best responses are tabulated
//! once per opponent profile, so classification, equilibrium scans and
//! best-response walks never rebuild them.

use std::fmt;

use crate::choice::{self, ObjectiveTable};
use crate::error::{Error, Result};
use crate::fixedpoint::{lift_system, Direction, OrderedCorrespondence};
use crate::limits::Limits;
use crate::order::{FinitePoset, SetOrder, Subset};
use crate::pareto::{self, UtilityProfile};
use crate::Q;

/// Sizes of the factors of a product space, first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileSpace {
    sizes: Vec<usize>,
}

impl ProfileSpace {
    pub fn new(sizes: Vec<usize>) -> Self {
        ProfileSpace { sizes }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of profiles, or `None` on overflow.
    pub fn count(&self) -> Option<usize> {
        self.sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s))
    }

    pub fn decode(&self, mut k: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &s) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = k % s;
            k /= s;
        }
        out
    }

    pub fn encode(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.sizes).fold(0, |acc, (&x, &s)| acc * s + x)
    }

    /// The space of every factor except `i`.
    pub fn without(&self, i: usize) -> ProfileSpace {
        let mut sizes = self.sizes.clone();
        sizes.remove(i);
        ProfileSpace { sizes }
    }
}

/// Removes entry `i` of a profile.
pub fn opponents(profile: &[usize], i: usize) -> Vec<usize> {
    let mut out = profile.to_vec();
    out.remove(i);
    out
}

/// How one player's best responses are produced, one entry per opponent
/// profile in the opponents' mixed-radix order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BestResponseRule {
    /// Maximizers of a payoff table over the player's strategies.
    Utility(Vec<ObjectiveTable>),
    /// Pareto optimal strategies for the player's sub-agents.
    Pareto(Vec<UtilityProfile>),
    Explicit(Vec<Subset>),
}

#[derive(Clone, Debug)]
pub struct Game {
    players: Vec<String>,
    strategies: Vec<FinitePoset>,
    rules: Vec<BestResponseRule>,
    responses: Vec<Vec<Subset>>,
    space: ProfileSpace,
}

impl Game {
    pub fn new(players: Vec<String>, strategies: Vec<FinitePoset>, rules: Vec<BestResponseRule>) -> Result<Self> {
        if players.is_empty() || players.len() != strategies.len() || players.len() != rules.len() {
            return Err(Error::Invalid(
                "a game needs one strategy set and one rule per player".into(),
            ));
        }
        if let Some(i) = strategies.iter().position(FinitePoset::is_empty) {
            return Err(Error::Invalid(format!("player {} has no strategies", players[i])));
        }
        let space = ProfileSpace::new(strategies.iter().map(FinitePoset::len).collect());
        let mut responses = Vec::with_capacity(players.len());
        for (i, rule) in rules.iter().enumerate() {
            let s = &strategies[i];
            let opp = space
                .without(i)
                .count()
                .ok_or_else(|| Error::Invalid("opponent space overflows".into()))?;
            let len = match rule {
                BestResponseRule::Utility(t) => t.len(),
                BestResponseRule::Pareto(u) => u.len(),
                BestResponseRule::Explicit(b) => b.len(),
            };
            if len != opp {
                return Err(Error::Invalid(format!(
                    "player {} has {len} best-response entries for {opp} opponent profiles",
                    players[i]
                )));
            }
            let table: Vec<Subset> = match rule {
                BestResponseRule::Utility(ts) => ts.iter().map(|t| choice::argmax(s, &s.full_set(), t)).collect::<Result<_>>()?,
                BestResponseRule::Pareto(us) => us.iter().map(|u| pareto::pareto_set(s, u)).collect::<Result<_>>()?,
                BestResponseRule::Explicit(bs) => {
                    if let Some(k) = bs.iter().position(|b| b.is_empty() || b.universe() != s.len()) {
                        return Err(Error::Invalid(format!(
                            "best response of {} to opponent profile {k} is empty or sized wrongly",
                            players[i]
                        )));
                    }
                    bs.clone()
                }
            };
            responses.push(table);
        }
        Ok(Game {
            players,
            strategies,
            rules,
            responses,
            space,
        })
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn strategies(&self, i: usize) -> &FinitePoset {
        &self.strategies[i]
    }

    pub fn rule(&self, i: usize) -> &BestResponseRule {
        &self.rules[i]
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    /// `B_i(s_{−i})` for the opponent profile `opp`.
    pub fn best_response(&self, i: usize, opp: &[usize]) -> &Subset {
        &self.responses[i][self.space.without(i).encode(opp)]
    }

    /// Best responses of `i` indexed by opponent-profile number.
    pub fn response_table(&self, i: usize) -> &[Subset] {
        &self.responses[i]
    }

    /// Payoff of player `i` at a profile, for utility-based players.
    pub fn payoff(&self, i: usize, profile: &[usize]) -> Option<Q> {
        match &self.rules[i] {
            BestResponseRule::Utility(ts) => {
                let k = self.space.without(i).encode(&opponents(profile, i));
                Some(ts[k][profile[i]])
            }
            _ => None,
        }
    }

    pub fn profile_leq(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter()
            .zip(b)
            .zip(&self.strategies)
            .all(|((&x, &y), s)| s.leq(x, y))
    }

    pub fn is_nash(&self, profile: &[usize]) -> bool {
        (0..self.player_count()).all(|i| self.best_response(i, &opponents(profile, i)).contains(profile[i]))
    }

    pub fn profile_label(&self, profile: &[usize]) -> String {
        let parts: Vec<&str> = profile
            .iter()
            .zip(&self.strategies)
            .map(|(&x, s)| s.label(x))
            .collect();
        format!("({})", parts.join(", "))
    }

    fn profile_count(&self, limits: &Limits) -> Result<usize> {
        let total = self.space.count().unwrap_or(usize::MAX);
        if total > limits.max_profiles {
            return Err(Error::SizeLimit {
                what: "strategy profile space".into(),
                size: total,
                cap: limits.max_profiles,
            });
        }
        Ok(total)
    }

    fn opponent_leq(&self, i: usize, a: &[usize], b: &[usize]) -> bool {
        let mut s = self.strategies.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, s)| s);
        a.iter().zip(b).all(|(&x, &y)| s.next().unwrap().leq(x, y))
    }
}

/// The joint best-response correspondence `F(s) = Π_i B_i(s_{−i})`.
pub struct JointResponse<'a> {
    pub game: &'a Game,
}

impl OrderedCorrespondence for JointResponse<'_> {
    type Point = Vec<usize>;

    fn point_leq(&self, a: &Vec<usize>, b: &Vec<usize>) -> bool {
        self.game.profile_leq(a, b)
    }

    fn image(&self, x: &Vec<usize>) -> Vec<Vec<usize>> {
        let factors: Vec<Vec<usize>> = (0..self.game.player_count())
            .map(|i| self.game.best_response(i, &opponents(x, i)).to_vec())
            .collect();
        let space = ProfileSpace::new(factors.iter().map(Vec::len).collect());
        (0..space.count().expect("image fits in memory"))
            .map(|k| {
                space
                    .decode(k)
                    .iter()
                    .zip(&factors)
                    .map(|(&j, f)| f[j])
                    .collect()
            })
            .collect()
    }

    fn describe(&self, x: &Vec<usize>) -> String {
        self.game.profile_label(x)
    }
}

/// Membership of a game in the upper and lower complementarity classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WscClass {
    /// Per player: best responses upper weak set monotone in opponents.
    pub br_uws: Vec<bool>,
    pub br_lws: Vec<bool>,
    /// A profile from which every player has a best response weakly above.
    pub start_plus: Option<Vec<usize>>,
    /// A profile from which every player has a best response weakly below.
    pub start_minus: Option<Vec<usize>>,
    pub in_g_plus: bool,
    pub in_g_minus: bool,
    /// First monotonicity failure found, if any.
    pub witness: Option<String>,
}

/// Whether `B_i(b) ≥order B_i(a)` for every opponent pair `a ≤ b`; on
/// failure returns the offending pair.
pub fn best_response_monotone(game: &Game, i: usize, order: SetOrder) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let opp = game.space.without(i);
    let n = opp.count().unwrap_or(usize::MAX);
    let s = &game.strategies[i];
    let profiles: Vec<Vec<usize>> = (0..n).map(|k| opp.decode(k)).collect();
    for (ka, a) in profiles.iter().enumerate() {
        for (kb, b) in profiles.iter().enumerate() {
            if ka != kb
                && game.opponent_leq(i, a, b)
                && !s.set_dominates(&game.responses[i][kb], &game.responses[i][ka], order)?
            {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

fn find_start(game: &Game, total: usize, dir: Direction) -> Option<Vec<usize>> {
    let ok = |s: &[usize]| {
        (0..game.player_count()).all(|i| {
            let st = &game.strategies[i];
            let near = match dir {
                Direction::Up => st.up_set(s[i]),
                Direction::Down => st.down_set(s[i]),
            };
            game.best_response(i, &opponents(s, i)).meets(&near)
        })
    };
    let order: Box<dyn Iterator<Item = usize>> = match dir {
        Direction::Up => Box::new(0..total),
        Direction::Down => Box::new((0..total).rev()),
    };
    order.map(|k| game.space.decode(k)).find(|s| ok(s))
}

pub fn classify_wsc(game: &Game, limits: &Limits) -> Result<WscClass> {
    let total = game.profile_count(limits)?;
    let mut witness = None;
    let mut check = |order: SetOrder| -> Result<Vec<bool>> {
        (0..game.player_count())
            .map(|i| {
                let fail = best_response_monotone(game, i, order)?;
                if let (Some((a, b)), None) = (&fail, &witness) {
                    witness = Some(format!(
                        "{}: best responses to {:?} and {:?} are not {:?}-ordered",
                        game.players[i], a, b, order
                    ));
                }
                Ok(fail.is_none())
            })
            .collect()
    };
    let br_uws = check(SetOrder::Upper)?;
    let br_lws = check(SetOrder::Lower)?;
    let start_plus = find_start(game, total, Direction::Up);
    let start_minus = find_start(game, total, Direction::Down);
    Ok(WscClass {
        in_g_plus: br_uws.iter().all(|&b| b) && start_plus.is_some(),
        in_g_minus: br_lws.iter().all(|&b| b) && start_minus.is_some(),
        br_uws,
        br_lws,
        start_plus,
        start_minus,
        witness,
    })
}

/// Every pure Nash equilibrium in profile order. An empty result for a game in
/// either complementarity class is reported as [`Error::TheoremViolation`].
pub fn nash_set(game: &Game, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    let total = game.profile_count(limits)?;
    let eq: Vec<Vec<usize>> = (0..total)
        .map(|k| game.space.decode(k))
        .filter(|s| game.is_nash(s))
        .collect();
    if eq.is_empty() {
        let class = classify_wsc(game, limits)?;
        if class.in_g_plus || class.in_g_minus {
            return Err(Error::TheoremViolation(
                "game with weak strategic complementarities has no equilibrium".into(),
            ));
        }
    }
    Ok(eq)
}

/// An equilibrium reached by a best-response walk from `start`, without
/// enumerating the profile space.
pub fn equilibrium_by_iteration(game: &Game, start: &[usize], dir: Direction) -> Result<Vec<usize>> {
    lift_system(&JointResponse { game }, &start.to_vec(), dir)
}

/// Whether `upper ≥order lower` for sets of profiles.
pub fn profiles_dominate(game: &Game, upper: &[Vec<usize>], lower: &[Vec<usize>], order: SetOrder) -> Result<bool> {
    let uws = || lower.iter().all(|x| upper.iter().any(|y| game.profile_leq(x, y)));
    let lws = || upper.iter().all(|y| lower.iter().any(|x| game.profile_leq(x, y)));
    match order {
        SetOrder::Upper => Ok(uws()),
        SetOrder::Lower => Ok(lws()),
        SetOrder::Weak => Ok(uws() && lws()),
        SetOrder::Strong => Err(Error::Invalid("profile sets are compared in weak orders only".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NashComparison {
    pub eq: Vec<Vec<usize>>,
    pub eq_prime: Vec<Vec<usize>>,
    pub holds: bool,
    /// Upward lifts of equilibria of the first game into the second.
    pub upper_lifts: Vec<(Vec<usize>, Vec<usize>)>,
    /// Downward lifts of equilibria of the second game into the first.
    pub lower_lifts: Vec<(Vec<usize>, Vec<usize>)>,
}

/// `Eq(game′) ≥mode Eq(game)` after checking, for the upper half, that
/// `game′` is in `G₊` with `B′ ≥uws B` pointwise, and for the lower half that
/// `game` is in `G₋` with `B′ ≥lws B` pointwise. Every equilibrium on the
/// source side is lifted by a best-response walk.
pub fn nash_compare(game: &Game, game_prime: &Game, mode: SetOrder, limits: &Limits) -> Result<NashComparison> {
    if game.space != game_prime.space {
        return Err(Error::Hypothesis("the games have different profile spaces".into()));
    }
    let (upper, lower) = match mode {
        SetOrder::Upper => (true, false),
        SetOrder::Lower => (false, true),
        SetOrder::Weak => (true, true),
        SetOrder::Strong => return Err(Error::Invalid("equilibria are compared in weak orders only".into())),
    };
    for (half, order) in [(upper, SetOrder::Upper), (lower, SetOrder::Lower)] {
        if !half {
            continue;
        }
        let (class, which) = if order == SetOrder::Upper {
            (classify_wsc(game_prime, limits)?.in_g_plus, "the second game is not in G+")
        } else {
            (classify_wsc(game, limits)?.in_g_minus, "the first game is not in G-")
        };
        if !class {
            return Err(Error::Hypothesis(which.into()));
        }
        for i in 0..game.player_count() {
            let s = &game.strategies[i];
            for (k, (b, bp)) in game.responses[i].iter().zip(&game_prime.responses[i]).enumerate() {
                if !s.set_dominates(bp, b, order)? {
                    return Err(Error::Hypothesis(format!(
                        "best responses of {} to opponent profile {:?} are not {order:?}-ordered",
                        game.players[i],
                        game.space.without(i).decode(k)
                    )));
                }
            }
        }
    }
    let eq = nash_set(game, limits)?;
    let eq_prime = nash_set(game_prime, limits)?;
    let mut upper_lifts = Vec::new();
    let mut lower_lifts = Vec::new();
    if upper {
        if eq.is_empty() {
            return Err(Error::Hypothesis("the first game has no equilibrium".into()));
        }
        for e in &eq {
            upper_lifts.push((e.clone(), equilibrium_by_iteration(game_prime, e, Direction::Up)?));
        }
    }
    if lower {
        if eq_prime.is_empty() {
            return Err(Error::Hypothesis("the second game has no equilibrium".into()));
        }
        for e in &eq_prime {
            lower_lifts.push((e.clone(), equilibrium_by_iteration(game, e, Direction::Down)?));
        }
    }
    let holds = profiles_dominate(game, &eq_prime, &eq, mode)?;
    if !holds {
        return Err(Error::TheoremViolation(format!(
            "equilibrium sets are not {mode:?}-ordered although every hypothesis holds"
        )));
    }
    Ok(NashComparison {
        eq,
        eq_prime,
        holds,
        upper_lifts,
        lower_lifts,
    })
}

/// Whether `u_i(s_i, ·)` is weakly increasing in the opponents' strategies;
/// `None` for players without payoffs.
pub fn payoff_monotonic(game: &Game, i: usize) -> Option<bool> {
    let BestResponseRule::Utility(ts) = &game.rules[i] else {
        return None;
    };
    let opp = game.space.without(i);
    let n = ts.len();
    Some((0..n).all(|a| {
        (0..n).all(|b| {
            let (pa, pb) = (opp.decode(a), opp.decode(b));
            !game.opponent_leq(i, &pa, &pb) || (0..game.strategies[i].len()).all(|x| ts[a][x] <= ts[b][x])
        })
    }))
}

/// Per-firm production cost as a function of quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cost {
    /// `C(q) = c·q`.
    Linear(Q),
    /// Increasing convex cost given at the listed quantities only.
    Table(Vec<(Q, Q)>),
}

impl Cost {
    pub fn eval(&self, q: Q) -> Result<Q> {
        match self {
            Cost::Linear(c) => Ok(c * q),
            Cost::Table(rows) => rows
                .iter()
                .find(|(x, _)| *x == q)
                .map(|&(_, c)| c)
                .ok_or_else(|| Error::Invalid(format!("cost is not tabulated at quantity {q}"))),
        }
    }

    fn validate(&self) -> Result<()> {
        let zero = Q::from_integer(0);
        match self {
            Cost::Linear(c) if *c < zero => Err(Error::Invalid("marginal cost must be nonnegative".into())),
            Cost::Linear(_) => Ok(()),
            Cost::Table(rows) => {
                if rows.iter().any(|&(q, c)| q < zero || c < zero) {
                    return Err(Error::Invalid("cost table entries must be nonnegative".into()));
                }
                if rows.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 > w[1].1) {
                    return Err(Error::Invalid(
                        "cost table must list increasing quantities with nondecreasing costs".into(),
                    ));
                }
                let slopes: Vec<Q> = rows.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
                if slopes.windows(2).any(|s| s[0] > s[1]) {
                    return Err(Error::Invalid("cost table is not convex".into()));
                }
                Ok(())
            }
        }
    }
}

/// Price competition on finite grids with tabulated demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BertrandSpec {
    grids: Vec<Vec<Q>>,
    /// `demand[i][k]` is firm `i`'s demand at the price profile numbered `k`.
    demand: Vec<Vec<Q>>,
    costs: Vec<Cost>,
    space: ProfileSpace,
}

impl BertrandSpec {
    /// Evaluates `demand(i, prices)` at every price profile.
    pub fn from_fn(grids: Vec<Vec<Q>>, costs: Vec<Cost>, demand: impl Fn(usize, &[Q]) -> Q) -> Result<Self> {
        let zero = Q::from_integer(0);
        if grids.is_empty() || grids.len() != costs.len() {
            return Err(Error::Invalid("one price grid and one cost per firm".into()));
        }
        for g in &grids {
            if g.is_empty() || g.windows(2).any(|w| w[0] >= w[1]) || g[0] < zero {
                return Err(Error::Invalid(
                    "price grids must be nonempty, nonnegative and strictly increasing".into(),
                ));
            }
        }
        for c in &costs {
            c.validate()?;
        }
        let space = ProfileSpace::new(grids.iter().map(Vec::len).collect());
        let total = space.count().ok_or_else(|| Error::Invalid("price space overflows".into()))?;
        let demand: Vec<Vec<Q>> = (0..grids.len())
            .map(|i| {
                (0..total)
                    .map(|k| {
                        let prices: Vec<Q> = space.decode(k).iter().zip(&grids).map(|(&j, g)| g[j]).collect();
                        demand(i, &prices)
                    })
                    .collect()
            })
            .collect();
        if demand.iter().flatten().any(|&d| d < zero) {
            return Err(Error::Invalid("demand must be nonnegative".into()));
        }
        for (i, c) in costs.iter().enumerate() {
            for &d in &demand[i] {
                c.eval(d)?;
            }
        }
        Ok(BertrandSpec {
            grids,
            demand,
            costs,
            space,
        })
    }

    pub fn firms(&self) -> usize {
        self.grids.len()
    }

    pub fn grid(&self, i: usize) -> &[Q] {
        &self.grids[i]
    }

    pub fn cost(&self, i: usize) -> &Cost {
        &self.costs[i]
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    /// Demand of firm `i` at a profile of grid indices.
    pub fn demand(&self, i: usize, profile: &[usize]) -> Q {
        self.demand[i][self.space.encode(profile)]
    }

    pub fn prices(&self, profile: &[usize]) -> Vec<Q> {
        profile.iter().zip(&self.grids).map(|(&j, g)| g[j]).collect()
    }

    /// `U_i = p_i·D_i − C_i(D_i)`.
    pub fn profit(&self, i: usize, profile: &[usize]) -> Q {
        let d = self.demand(i, profile);
        let c = self.costs[i].eval(d).expect("validated at construction");
        self.grids[i][profile[i]] * d - c
    }

    fn describe(&self, profile: &[usize]) -> String {
        let ps: Vec<String> = self.prices(profile).iter().map(Q::to_string).collect();
        format!("({})", ps.join(", "))
    }

    fn with_own(&self, i: usize, profile: &[usize], own: usize) -> Vec<usize> {
        let mut p = profile.to_vec();
        p[i] = own;
        p
    }

    fn all_profiles(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.space.count().unwrap()).map(|k| self.space.decode(k))
    }
}

/// Each firm's demand is `1/k` when it is one of `k` firms quoting the lowest
/// price and zero otherwise; costs are `c_i·q`.
pub fn pure_bertrand(grids: Vec<Vec<Q>>, costs: Vec<Q>) -> Result<BertrandSpec> {
    for (g, c) in grids.iter().zip(&costs) {
        if let Some(&top) = g.last() {
            if *c > top {
                return Err(Error::Invalid(format!("marginal cost {c} exceeds the highest price {top}")));
            }
        }
    }
    BertrandSpec::from_fn(grids, costs.into_iter().map(Cost::Linear).collect(), |i, prices| {
        let low = *prices.iter().min().unwrap();
        if prices[i] == low {
            Q::new(1, prices.iter().filter(|&&p| p == low).count() as i64)
        } else {
            Q::from_integer(0)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DemandReport {
    pub d1_checked: u64,
    pub d2_checked: u64,
}

/// Substitutes condition (own demand falls with own price and rises with
/// rivals' prices) and the elasticity condition
/// `D(p′ᵢ,p₋ᵢ)·D(pᵢ,p′₋ᵢ) ≤ D(p′ᵢ,p′₋ᵢ)·D(pᵢ,p₋ᵢ)` for `pᵢ < p′ᵢ`,
/// `p₋ᵢ < p′₋ᵢ` and `D(pᵢ,p₋ᵢ) > 0`.
pub fn validate_demand(spec: &BertrandSpec) -> Result<DemandReport> {
    let zero = Q::from_integer(0);
    let mut report = DemandReport {
        d1_checked: 0,
        d2_checked: 0,
    };
    let violation = |axiom: &str, at: String| Error::DemandAxiomViolation {
        axiom: axiom.into(),
        at,
    };
    for p in spec.all_profiles() {
        for i in 0..spec.firms() {
            let d = spec.demand(i, &p);
            for j in 0..spec.firms() {
                if p[j] + 1 == spec.grids[j].len() {
                    continue;
                }
                let q = spec.with_own(j, &p, p[j] + 1);
                let dq = spec.demand(i, &q);
                report.d1_checked += 1;
                let bad = if i == j { dq > d } else { dq < d };
                if bad {
                    return Err(violation(
                        "D1",
                        format!("firm {i} between {} and {}", spec.describe(&p), spec.describe(&q)),
                    ));
                }
            }
        }
    }
    for i in 0..spec.firms() {
        let opp = spec.space.without(i);
        let opp_profiles: Vec<Vec<usize>> = (0..opp.count().unwrap()).map(|k| opp.decode(k)).collect();
        let full = |own: usize, o: &[usize]| {
            let mut p = o.to_vec();
            p.insert(i, own);
            p
        };
        for a in &opp_profiles {
            for b in &opp_profiles {
                if a == b || !a.iter().zip(b).all(|(x, y)| x <= y) {
                    continue;
                }
                for lo in 0..spec.grids[i].len() {
                    let base = spec.demand(i, &full(lo, a));
                    if base == zero {
                        continue;
                    }
                    for hi in lo + 1..spec.grids[i].len() {
                        report.d2_checked += 1;
                        let lhs = spec.demand(i, &full(hi, a)) * spec.demand(i, &full(lo, b));
                        let rhs = spec.demand(i, &full(hi, b)) * base;
                        if lhs > rhs {
                            return Err(violation(
                                "D2",
                                format!(
                                    "firm {i} at prices {} → {} against rivals {} → {}",
                                    spec.describe(&full(lo, a)),
                                    spec.describe(&full(hi, a)),
                                    spec.describe(&full(lo, b)),
                                    spec.describe(&full(hi, b)),
                                ),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The payoff game of a price competition: prices on chains, best responses
/// maximize profit.
pub fn bertrand_build(spec: &BertrandSpec) -> Result<Game> {
    let n = spec.firms();
    let strategies: Vec<FinitePoset> = spec
        .grids
        .iter()
        .map(|g| FinitePoset::chain_of(g.iter().map(Q::to_string).collect()))
        .collect::<Result<_>>()?;
    let rules = (0..n)
        .map(|i| {
            let opp = spec.space.without(i);
            let tables = (0..opp.count().unwrap())
                .map(|k| {
                    let o = opp.decode(k);
                    ObjectiveTable::from_fn(spec.grids[i].len(), |own| {
                        let mut p = o.clone();
                        p.insert(i, own);
                        spec.profit(i, &p)
                    })
                })
                .collect();
            BestResponseRule::Utility(tables)
        })
        .collect();
    Game::new((0..n).map(|i| format!("firm {i}")).collect(), strategies, rules)
}

/// Whether every firm's best responses are lower weak set monotone in the
/// rivals' prices.
pub fn bertrand_br_monotone(spec: &BertrandSpec) -> Result<bool> {
    let game = bertrand_build(spec)?;
    for i in 0..spec.firms() {
        if best_response_monotone(&game, i, SetOrder::Lower)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `tilde` faces weakly more inelastic demand than `spec` (positive
/// demand stays positive and own-price demand ratios rise) and weakly higher
/// marginal costs at every pair of achievable quantities.
pub fn bertrand_shift_holds(spec: &BertrandSpec, tilde: &BertrandSpec) -> Result<()> {
    let zero = Q::from_integer(0);
    if spec.grids != tilde.grids {
        return Err(Error::Hypothesis("the two markets use different price grids".into()));
    }
    for i in 0..spec.firms() {
        for p in spec.all_profiles() {
            let d = spec.demand(i, &p);
            if d == zero {
                continue;
            }
            let dt = tilde.demand(i, &p);
            if dt == zero {
                return Err(Error::Hypothesis(format!(
                    "firm {i} loses all demand at {}",
                    spec.describe(&p)
                )));
            }
            for hi in p[i] + 1..spec.grids[i].len() {
                let q = spec.with_own(i, &p, hi);
                if spec.demand(i, &q) * dt > tilde.demand(i, &q) * d {
                    return Err(Error::Hypothesis(format!(
                        "firm {i}: demand does not become more inelastic between {} and {}",
                        spec.describe(&p),
                        spec.describe(&q)
                    )));
                }
            }
        }
        let mut qs: Vec<Q> = spec.demand[i].iter().chain(&tilde.demand[i]).copied().collect();
        qs.sort();
        qs.dedup();
        for (a, &q) in qs.iter().enumerate() {
            for &q2 in &qs[a + 1..] {
                let c = spec.costs[i].eval(q2).and_then(|x| Ok(x - spec.costs[i].eval(q)?));
                let ct = tilde.costs[i].eval(q2).and_then(|x| Ok(x - tilde.costs[i].eval(q)?));
                match (c, ct) {
                    (Ok(c), Ok(ct)) if c <= ct => {}
                    (Ok(_), Ok(_)) => {
                        return Err(Error::Hypothesis(format!(
                            "firm {i}: marginal cost falls between quantities {q} and {q2}"
                        )))
                    }
                    _ => {
                        return Err(Error::Hypothesis(format!(
                            "firm {i}: costs are not tabulated at quantities {q} and {q2}"
                        )))
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayoffComparison {
    /// Equilibrium profits of the firm, ascending and deduplicated.
    pub profits: Vec<Q>,
    pub profits_tilde: Vec<Q>,
    /// Every profit in `tilde` has a profit in `spec` weakly below it.
    pub holds: bool,
}

/// Equilibrium profits of `firm` in the two markets when `tilde` has weakly
/// higher linear costs and weakly higher demand, more inelastic in own price,
/// and `firm`'s own cost is unchanged.
pub fn bertrand_payoff_compare(
    spec: &BertrandSpec,
    tilde: &BertrandSpec,
    firm: usize,
    limits: &Limits,
) -> Result<PayoffComparison> {
    if firm >= spec.firms() {
        return Err(Error::Invalid(format!("no firm {firm}")));
    }
    bertrand_shift_holds(spec, tilde)?;
    for i in 0..spec.firms() {
        match (&spec.costs[i], &tilde.costs[i]) {
            (Cost::Linear(c), Cost::Linear(ct)) if c <= ct => {}
            _ => {
                return Err(Error::Hypothesis(format!(
                    "firm {i}: costs must be linear and weakly higher in the second market"
                )))
            }
        }
        if spec.demand[i].iter().zip(&tilde.demand[i]).any(|(d, dt)| d > dt) {
            return Err(Error::Hypothesis(format!("firm {i}: demand falls in the second market")));
        }
    }
    if spec.costs[firm] != tilde.costs[firm] {
        return Err(Error::Hypothesis(format!("firm {firm}'s own cost changes")));
    }
    let profits = |s: &BertrandSpec| -> Result<Vec<Q>> {
        let mut out: Vec<Q> = nash_set(&bertrand_build(s)?, limits)?
            .iter()
            .map(|e| s.profit(firm, e))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    };
    let base = profits(spec)?;
    let shifted = profits(tilde)?;
    let holds = shifted.iter().all(|t| base.iter().any(|b| b <= t));
    Ok(PayoffComparison {
        profits: base,
        profits_tilde: shifted,
        holds,
    })
}

/// `n` firms, each with two divisions choosing a point of the grid
/// `{0, 1/steps, …, 1}²` and targeting the rivals' average plus `theta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeautyContestSpec {
    pub n: usize,
    pub steps: i64,
    pub theta: (Q, Q),
}

impl fmt::Display for BeautyContestSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} step=1/{} θ=({}, {})", self.n, self.steps, self.theta.0, self.theta.1)
    }
}

/// Best responses are the Pareto sets of the two divisions given
/// `ω_i = (mean of rivals' x + θᴬ, mean of rivals' y + θᴮ)`.
pub fn beauty_contest_build(spec: &BeautyContestSpec, limits: &Limits) -> Result<Game> {
    if spec.n < 2 {
        return Err(Error::Invalid("a beauty contest needs at least two players".into()));
    }
    let (grid, coords) = pareto::unit_square_grid(spec.steps, limits.max_elements)?;
    let space = ProfileSpace::new(vec![grid.len(); spec.n]);
    match space.count() {
        Some(c) if c <= limits.max_profiles => {}
        other => {
            return Err(Error::SizeLimit {
                what: "beauty contest profile space".into(),
                size: other.unwrap_or(usize::MAX),
                cap: limits.max_profiles,
            })
        }
    }
    let opp = space.without(0);
    let rivals = Q::from_integer(spec.n as i64 - 1);
    let profiles: Vec<UtilityProfile> = (0..opp.count().unwrap())
        .map(|k| {
            let o = opp.decode(k);
            let sx: Q = o.iter().map(|&j| coords[j].0).sum();
            let sy: Q = o.iter().map(|&j| coords[j].1).sum();
            let omega = (sx / rivals + spec.theta.0, sy / rivals + spec.theta.1);
            pareto::two_division_profile(&coords, omega)
        })
        .collect();
    Game::new(
        (0..spec.n).map(|i| format!("firm {i}")).collect(),
        vec![grid; spec.n],
        vec![BestResponseRule::Pareto(profiles); spec.n],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    fn grid(n: i64) -> Vec<Q> {
        (0..=n).map(q).collect()
    }

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn profile_space_round_trips() {
        let s = ProfileSpace::new(vec![3, 2, 4]);
        assert_eq!(s.count(), Some(24));
        for k in 0..24 {
            assert_eq!(s.encode(&s.decode(k)), k);
        }
        assert_eq!(s.decode(5), vec![0, 1, 1]);
        assert_eq!(s.without(1).sizes(), &[3, 4]);
    }

    #[test]
    fn one_player_best_response_is_global_argmax() {
        let s = FinitePoset::chain(4);
        let t = ObjectiveTable::new(vec![q(1), q(3), q(3), q(0)]);
        let g = Game::new(vec!["a".into()], vec![s.clone()], vec![BestResponseRule::Utility(vec![t])]).unwrap();
        assert_eq!(g.best_response(0, &[]), &s.subset([1, 2]));
        assert_eq!(nash_set(&g, &limits()).unwrap(), vec![vec![1], vec![2]]);
    }

    #[test]
    fn singleton_strategies_are_in_both_classes() {
        let s = FinitePoset::chain(1);
        let b = BestResponseRule::Explicit(vec![s.full_set()]);
        let g = Game::new(vec!["a".into(), "b".into()], vec![s.clone(), s], vec![b.clone(), b]).unwrap();
        let c = classify_wsc(&g, &limits()).unwrap();
        assert!(c.in_g_plus && c.in_g_minus);
        assert_eq!(nash_set(&g, &limits()).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn dominant_strategies_form_the_equilibrium() {
        let s = FinitePoset::chain(3);
        let dominant = |x: usize| BestResponseRule::Explicit(vec![s.subset([x]); 3]);
        let g = Game::new(
            vec!["a".into(), "b".into()],
            vec![s.clone(), s.clone()],
            vec![dominant(2), dominant(0)],
        )
        .unwrap();
        assert_eq!(nash_set(&g, &limits()).unwrap(), vec![vec![2, 0]]);
    }

    fn brute_force_best_response(spec: &BertrandSpec, i: usize, opp: &[usize]) -> Vec<usize> {
        let full = |own: usize| {
            let mut p = opp.to_vec();
            p.insert(i, own);
            p
        };
        let m = spec.grid(i).len();
        let best = (0..m).map(|x| spec.profit(i, &full(x))).max().unwrap();
        (0..m).filter(|&x| spec.profit(i, &full(x)) == best).collect()
    }

    #[test]
    fn pure_bertrand_best_response_matches_direct_evaluation() {
        let spec = pure_bertrand(vec![grid(5), grid(5)], vec![q(2), q(2)]).unwrap();
        let game = bertrand_build(&spec).unwrap();
        // Against a rival at 4, undercutting to 3 and splitting at 4 both earn 1.
        assert_eq!(game.best_response(0, &[4]).to_vec(), vec![3, 4]);
        for i in 0..2 {
            for pj in 0..6 {
                assert_eq!(game.best_response(i, &[pj]).to_vec(), brute_force_best_response(&spec, i, &[pj]));
            }
        }
    }

    #[test]
    fn pure_bertrand_equilibria_match_profile_scan() {
        let spec = pure_bertrand(vec![grid(5), grid(5)], vec![q(2), q(2)]).unwrap();
        let game = bertrand_build(&spec).unwrap();
        let mut oracle = Vec::new();
        for a in 0..6 {
            for b in 0..6 {
                let p = [a, b];
                let stable = (0..2).all(|i| {
                    let here = spec.profit(i, &p);
                    (0..6).all(|dev| {
                        let mut d = p;
                        d[i] = dev;
                        spec.profit(i, &d) <= here
                    })
                });
                if stable {
                    oracle.push(p.to_vec());
                }
            }
        }
        assert_eq!(nash_set(&game, &limits()).unwrap(), oracle);
        assert_eq!(oracle, vec![vec![2, 2], vec![3, 3], vec![4, 4]]);
    }

    #[test]
    fn pure_bertrand_is_lower_but_not_upper_complementary() {
        let spec = pure_bertrand(vec![grid(5), grid(5)], vec![q(2), q(2)]).unwrap();
        let report = validate_demand(&spec).unwrap();
        assert!(report.d1_checked > 0 && report.d2_checked > 0);
        assert!(bertrand_br_monotone(&spec).unwrap());
        let c = classify_wsc(&bertrand_build(&spec).unwrap(), &limits()).unwrap();
        assert!(c.in_g_minus);
        assert!(!c.in_g_plus);
        assert!(c.br_uws.iter().all(|&b| !b));
    }

    #[test]
    fn demand_rising_in_own_price_fails_substitutes_condition() {
        let spec = BertrandSpec::from_fn(vec![grid(2), grid(2)], vec![Cost::Linear(q(0)); 2], |i, p| p[i]).unwrap();
        let err = validate_demand(&spec).unwrap_err();
        assert!(matches!(err, Error::DemandAxiomViolation { ref axiom, .. } if axiom == "D1"));
    }

    fn elasticity_oracle(spec: &BertrandSpec) -> bool {
        let g: Vec<usize> = (0..spec.grid(0).len()).collect();
        let d = |i: usize, own: usize, other: usize| {
            let p = if i == 0 { [own, other] } else { [other, own] };
            spec.demand(i, &p)
        };
        let zero = Q::from_integer(0);
        (0..2).all(|i| {
            let d1 = g.iter().all(|&a| {
                g.iter().all(|&b| {
                    g.iter().all(|&a2| a2 < a || d(i, a2, b) <= d(i, a, b))
                        && g.iter().all(|&b2| b2 < b || d(i, a, b2) >= d(i, a, b))
                })
            });
            d1 && g.iter().all(|&a| {
                g.iter().all(|&a2| {
                    g.iter().all(|&b| {
                        g.iter().all(|&b2| {
                            !(a < a2 && b < b2 && d(i, a, b) > zero)
                                || d(i, a2, b) / d(i, a, b) <= d(i, a2, b2) / d(i, a, b2)
                        })
                    })
                })
            })
        })
    }

    #[test]
    fn tabulated_demand_validation_matches_direct_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut passes = 0;
        for _ in 0..300 {
            // Logit-like shares with random integer attractions.
            let w: Vec<Vec<i64>> = (0..2).map(|_| (0..4).map(|_| rng.gen_range(1..6)).collect()).collect();
            let outside = rng.gen_range(0..3);
            let spec = BertrandSpec::from_fn(vec![grid(3), grid(3)], vec![Cost::Linear(q(0)); 2], |i, p| {
                let own = w[i][p[i].to_integer() as usize];
                let other = w[1 - i][p[1 - i].to_integer() as usize];
                let attract = |x: i64| Q::new(1, x);
                attract(own) / (attract(own) + attract(other) + q(outside))
            })
            .unwrap();
            let ok = validate_demand(&spec).is_ok();
            passes += ok as usize;
            assert_eq!(ok, elasticity_oracle(&spec));
        }
        assert!(passes > 0);
    }

    #[test]
    fn cost_tables_must_be_convex_and_cover_demand() {
        let convex = Cost::Table(vec![(q(0), q(0)), (q(1), q(1)), (q(2), q(3))]);
        assert!(convex.validate().is_ok());
        let concave = Cost::Table(vec![(q(0), q(0)), (q(1), q(2)), (q(2), q(3))]);
        assert!(concave.validate().is_err());
        let partial = Cost::Table(vec![(q(0), q(0))]);
        assert!(pure_bertrand(vec![grid(2), grid(2)], vec![q(0), q(0)]).is_ok());
        assert!(BertrandSpec::from_fn(vec![grid(2), grid(2)], vec![partial.clone(), partial], |_, _| q(1)).is_err());
    }

    fn cost_raise() -> (BertrandSpec, BertrandSpec) {
        (
            pure_bertrand(vec![grid(10), grid(10)], vec![q(2), q(2)]).unwrap(),
            pure_bertrand(vec![grid(10), grid(10)], vec![q(2), q(4)]).unwrap(),
        )
    }

    #[test]
    fn raising_a_rival_cost_raises_equilibria_and_profits() {
        let (spec, tilde) = cost_raise();
        bertrand_shift_holds(&spec, &tilde).unwrap();
        let g = bertrand_build(&spec).unwrap();
        let gt = bertrand_build(&tilde).unwrap();
        let cmp = nash_compare(&g, &gt, SetOrder::Lower, &limits()).unwrap();
        assert!(cmp.holds);
        for (from, to) in &cmp.lower_lifts {
            assert!(g.profile_leq(to, from) && g.is_nash(to));
        }
        let pay = bertrand_payoff_compare(&spec, &tilde, 0, &limits()).unwrap();
        assert!(pay.holds);
        // Firm 0's profits recomputed from the equilibrium scan.
        let direct: Vec<Q> = nash_set(&gt, &limits()).unwrap().iter().map(|e| tilde.profit(0, e)).collect();
        assert!(direct.iter().all(|t| pay.profits.iter().any(|b| b <= t)));
        assert!(matches!(
            bertrand_payoff_compare(&spec, &tilde, 1, &limits()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn identical_markets_compare_trivially() {
        let (spec, _) = cost_raise();
        let pay = bertrand_payoff_compare(&spec, &spec, 0, &limits()).unwrap();
        assert!(pay.holds);
        assert_eq!(pay.profits, pay.profits_tilde);
    }

    #[test]
    fn undercut_rival_below_cost_gets_nothing() {
        let spec = pure_bertrand(vec![grid(10), grid(10)], vec![q(0), q(4)]).unwrap();
        let eq = nash_set(&bertrand_build(&spec).unwrap(), &limits()).unwrap();
        assert!(!eq.is_empty());
        for e in &eq {
            for i in 0..2 {
                let Cost::Linear(c) = spec.cost(i) else { unreachable!() };
                if spec.demand(i, e) > q(0) {
                    assert!(spec.prices(e)[i] >= *c, "{e:?}");
                }
            }
        }
        // A firm may sit below its cost when it sells nothing.
        assert!(eq.contains(&vec![1, 2]));
    }

    fn beauty(theta: (Q, Q), steps: i64) -> Game {
        beauty_contest_build(&BeautyContestSpec { n: 2, steps, theta }, &limits()).unwrap()
    }

    #[test]
    fn beauty_contest_best_responses_are_pareto_sets() {
        let g = beauty((q(0), q(0)), 2);
        let (p, coords) = pareto::unit_square_grid(2, 64).unwrap();
        assert_eq!(g.space().count(), Some(81));
        for k in 0..9 {
            let (x, y) = coords[k];
            let u = pareto::two_division_profile(&coords, (x, y));
            let oracle: Vec<usize> = (0..9)
                .filter(|&a| !(0..9).any(|b| pareto::pareto_dominates(&u, b, a)))
                .collect();
            assert_eq!(g.best_response(0, &[k]).to_vec(), oracle);
            assert_eq!(g.best_response(1, &[k]), &pareto::pareto_set(&p, &u).unwrap());
        }
        assert!(!nash_set(&g, &limits()).unwrap().is_empty());
    }

    #[test]
    fn beauty_contest_is_complementary_and_shifts_up() {
        let g = beauty((q(0), q(0)), 4);
        let gp = beauty((Q::new(1, 4), Q::new(1, 4)), 4);
        for game in [&g, &gp] {
            let c = classify_wsc(game, &limits()).unwrap();
            assert!(c.in_g_plus && c.in_g_minus);
        }
        let cmp = nash_compare(&g, &gp, SetOrder::Weak, &limits()).unwrap();
        assert_eq!(cmp.eq.len(), 17);
        assert_eq!(cmp.eq_prime.len(), 1);
        let oracle: Vec<Vec<usize>> = (0..625)
            .map(|k| vec![k / 25, k % 25])
            .filter(|s| gp.is_nash(s))
            .collect();
        assert_eq!(cmp.eq_prime, oracle);
        assert!(profiles_dominate(&g, &cmp.eq_prime, &cmp.eq, SetOrder::Weak).unwrap());
    }

    #[test]
    fn large_theta_pushes_targets_to_the_corner() {
        let g = beauty((q(2), q(2)), 2);
        let top = 8;
        for k in 0..9 {
            assert_eq!(g.best_response(0, &[k]).to_vec(), vec![top]);
        }
        assert_eq!(nash_set(&g, &limits()).unwrap(), vec![vec![top, top]]);
    }

    #[test]
    fn symmetric_beauty_contest_has_symmetric_equilibria() {
        let g = beauty((Q::new(1, 4), Q::new(1, 4)), 2);
        let eq = nash_set(&g, &limits()).unwrap();
        for e in &eq {
            assert!(eq.contains(&vec![e[1], e[0]]));
        }
    }

    #[test]
    fn profile_cap_is_enforced() {
        let tight = Limits {
            max_profiles: 10,
            ..Limits::default()
        };
        let spec = BeautyContestSpec {
            n: 2,
            steps: 2,
            theta: (q(0), q(0)),
        };
        assert!(matches!(beauty_contest_build(&spec, &tight), Err(Error::SizeLimit { .. })));
    }

    /// Two players on chains whose best responses are up-closures of random
    /// seeds, hence upper weak set monotone.
    fn random_monotone_game<R: Rng>(rng: &mut R, m: usize) -> Game {
        let s = FinitePoset::chain(m);
        let rule = |rng: &mut R| {
            let seeds: Vec<Subset> = (0..m).map(|_| crate::gen::random_subset(rng, m, true)).collect();
            let closed = (0..m)
                .map(|k| (0..=k).fold(s.empty_set(), |acc, j| acc.union(&seeds[j])))
                .collect();
            BestResponseRule::Explicit(closed)
        };
        let rules = vec![rule(rng), rule(rng)];
        Game::new(vec!["a".into(), "b".into()], vec![s.clone(), s], rules).unwrap()
    }

    #[test]
    fn complementary_games_have_equilibria() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = rng.gen_range(1..6);
            let g = random_monotone_game(&mut rng, m);
            let c = classify_wsc(&g, &limits()).unwrap();
            assert!(c.in_g_plus);
            let eq = nash_set(&g, &limits()).unwrap();
            assert!(!eq.is_empty());
            let start = c.start_plus.unwrap();
            let e = equilibrium_by_iteration(&g, &start, Direction::Up).unwrap();
            assert!(eq.contains(&e) && g.profile_leq(&start, &e));
        }
    }

    /// Utility game on chains with `u_i = a·s_i·s_j − b_i(s_i) + c·s_j`,
    /// which has increasing differences and is increasing in the rival.
    fn supermodular_game(m: usize, a: i64, own: &[Vec<i64>], c: i64) -> Game {
        let s = FinitePoset::chain(m);
        let rules = (0..2)
            .map(|i| {
                BestResponseRule::Utility(
                    (0..m)
                        .map(|sj| {
                            ObjectiveTable::from_fn(m, |si| {
                                q(a * si as i64 * sj as i64 - own[i][si] + c * sj as i64)
                            })
                        })
                        .collect(),
                )
            })
            .collect();
        Game::new(vec!["a".into(), "b".into()], vec![s.clone(), s], rules).unwrap()
    }

    proptest! {
        #[test]
        fn equilibrium_payoffs_rise_with_the_equilibria(
            m in 2usize..5,
            a in 0i64..3,
            c in 0i64..3,
            own in proptest::collection::vec(proptest::collection::vec(-4i64..5, 4), 2),
            shift in proptest::collection::vec(0i64..3, 4),
        ) {
            let g = supermodular_game(m, a, &own, c);
            // Lowering the own-strategy cost by an increasing amount raises
            // the returns to higher strategies.
            let lowered: Vec<Vec<i64>> = own
                .iter()
                .map(|row| row.iter().enumerate().map(|(k, &x)| x - shift[..=k].iter().sum::<i64>()).collect())
                .collect();
            let gp = supermodular_game(m, a, &lowered, c);
            let cmp = nash_compare(&g, &gp, SetOrder::Weak, &limits());
            prop_assume!(cmp.is_ok());
            let cmp = cmp.unwrap();
            for i in 0..2 {
                prop_assert_eq!(payoff_monotonic(&gp, i), Some(true));
                let pay = |game: &Game, eq: &[Vec<usize>]| -> Vec<Q> { eq.iter().map(|e| game.payoff(i, e).unwrap()).collect() };
                let hi = pay(&gp, &cmp.eq_prime);
                let lo = pay(&gp, &cmp.eq);
                prop_assert!(lo.iter().all(|x| hi.iter().any(|y| x <= y)));
                prop_assert!(hi.iter().all(|y| lo.iter().any(|x| x <= y)));
            }
        }

        #[test]
        fn joint_best_response_fixed_points_are_the_equilibria(seed in any::<u64>(), m in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_monotone_game(&mut rng, m);
            let sys = JointResponse { game: &g };
            let eq = nash_set(&g, &limits()).unwrap();
            for k in 0..m * m {
                let s = g.space().decode(k);
                prop_assert_eq!(sys.image(&s).contains(&s), eq.contains(&s));
            }
        }
    }
}
