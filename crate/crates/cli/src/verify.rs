//! Seeded verification suites. Each criterion replays a family of claims on
//! generated or hand-built instances and compares the library against
//! brute-force oracles written here from the definitions.

use std::collections::BTreeSet;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmcs_core::choice::{self, DominanceKind, Family, ObjectiveTable};
use wmcs_core::fixedpoint::{self, Direction, LiftMode, OnPoset, SelectionPolicy};
use wmcs_core::games::{self, BeautyContestSpec, BertrandSpec};
use wmcs_core::gen::{self, Closure};
use wmcs_core::matching::{self, Agent, AuditOptions, Axiom, ChoiceRule, ContractUniverse, CsDirection, Economy};
use wmcs_core::matching::{ConstraintsMarket, Feasibility};
use wmcs_core::pareto::{self, ProfileDominance, UtilityProfile, WeightSequence};
use wmcs_core::{FinitePoset, Limits, SetOrder, Subset, Q};

use crate::report::{Caps, Provenance, Report};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Full case counts.
    Acceptance,
    /// About a tenth of the cases, for smoke runs.
    Quick,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Acceptance => "acceptance",
            Suite::Quick => "quick",
        }
    }

    fn count(self, full: usize) -> usize {
        match self {
            Suite::Acceptance => full,
            Suite::Quick => full.div_ceil(10).max(3).min(full),
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "acceptance" => Ok(Suite::Acceptance),
            "quick" => Ok(Suite::Quick),
            other => Err(CliError::Schema(format!("unknown suite {other:?} (expected acceptance or quick)"))),
        }
    }
}

pub const TITLES: [&str; 13] = [
    "set-order decomposition",
    "dominance characterizations",
    "weak interval without weak dominance",
    "Pareto sets on a chain",
    "Pareto set characterizations",
    "two-division Pareto sets on the 1/12 grid",
    "fixed points of monotone correspondences",
    "Bertrand comparative statics",
    "beauty contest equilibria",
    "matching counterexample gallery",
    "stable allocations as fixed points",
    "matching comparative statics",
    "determinism",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub cases: u64,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub suite: Suite,
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

type Outcome = Result<(u64, String), String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

/// Turns a library error into a criterion failure.
fn ok<T>(r: wmcs_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rng_for(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ u64::from(id).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn run_criterion(id: u8, suite: Suite, seed: u64) -> CriterionResult {
    let mut rng = rng_for(seed, id);
    let r = &mut rng;
    let outcome = match id {
        1 => set_orders(r, suite),
        2 => dominance(r, suite),
        3 => quarter_grid_example(),
        4 => chain_pareto_example(),
        5 => pareto_characterizations(r, suite),
        6 => twelfth_grid(),
        7 => fixed_points(r, suite),
        8 => bertrand(),
        9 => beauty_contest(),
        10 => matching_gallery(),
        11 => stable_fixed_points(r, suite),
        12 => comparative_statics(r, suite),
        _ => Err(format!("no criterion {id}")),
    };
    let (pass, cases, detail) = match outcome {
        Ok((cases, detail)) => (true, cases, detail),
        Err(e) => (false, 0, e),
    };
    CriterionResult {
        id,
        title: TITLES[usize::from(id) - 1],
        pass,
        cases,
        detail,
    }
}

/// Runs criteria 1–12, then reruns them and compares the serialized reports
/// byte for byte (criterion 13). `progress` sees each first-pass result with
/// its wall time.
pub fn run_suite(suite: Suite, seed: u64, mut progress: impl FnMut(&CriterionResult, Duration)) -> SuiteRun {
    let mut results = Vec::new();
    for id in 1..=12 {
        let start = Instant::now();
        let r = run_criterion(id, suite, seed);
        progress(&r, start.elapsed());
        results.push(r);
    }
    let start = Instant::now();
    let first = SuiteRun {
        suite,
        seed,
        results: results.clone(),
    };
    let second = SuiteRun {
        suite,
        seed,
        results: (1..=12).map(|id| run_criterion(id, suite, seed)).collect(),
    };
    let (a, b) = (first.report().to_json(), second.report().to_json());
    let same = a == b;
    let last = CriterionResult {
        id: 13,
        title: TITLES[12],
        pass: same,
        cases: 12,
        detail: if same {
            format!("second run reproduced the {}-byte report exactly", a.len())
        } else {
            let at = a.bytes().zip(b.bytes()).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
            format!("reports differ from byte {at}")
        },
    };
    progress(&last, start.elapsed());
    results.push(last);
    SuiteRun { suite, seed, results }
}

impl SuiteRun {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn report(&self) -> Report {
        let descriptor = format!("verify:{}", self.suite.name());
        let caps = Caps::new(&Limits::default(), &AuditOptions::default());
        let prov = Provenance::new(descriptor.as_bytes(), Some(self.seed), caps);
        let mut rep = Report::new(format!("{} suite", self.suite.name()), "verify", prov);
        for r in &self.results {
            let result = if r.pass { "PASS" } else { "FAIL" };
            rep.check(format!("criterion {}: {}", r.id, r.title), "PASS", result);
            rep.witness(format!("criterion {}: {}", r.id, r.detail));
        }
        let rows = self
            .results
            .iter()
            .map(|r| {
                vec![
                    r.id.to_string(),
                    r.title.to_string(),
                    if r.pass { "PASS" } else { "FAIL" }.to_string(),
                    r.cases.to_string(),
                    r.detail.clone(),
                ]
            })
            .collect();
        rep.table("criteria", &["id", "title", "result", "cases", "detail"], rows);
        rep
    }
}

// ---------------------------------------------------------------- oracles

fn naive_bound(p: &FinitePoset, a: usize, b: usize, up: bool) -> Option<usize> {
    let rel = |x: usize, y: usize| if up { p.leq(x, y) } else { p.leq(y, x) };
    let bounds: Vec<usize> = (0..p.len()).filter(|&z| rel(a, z) && rel(b, z)).collect();
    bounds.iter().copied().find(|&z| bounds.iter().all(|&w| rel(z, w)))
}

fn naive_join(p: &FinitePoset, a: usize, b: usize) -> usize {
    naive_bound(p, a, b, true).expect("lattice")
}

fn naive_meet(p: &FinitePoset, a: usize, b: usize) -> usize {
    naive_bound(p, a, b, false).expect("lattice")
}

fn o_ws(p: &FinitePoset, hi: &[usize], lo: &[usize]) -> bool {
    lo.iter().all(|&x| hi.iter().any(|&y| p.leq(x, y))) && hi.iter().all(|&y| lo.iter().any(|&x| p.leq(x, y)))
}

fn o_ss(p: &FinitePoset, hi: &[usize], lo: &[usize]) -> bool {
    lo.iter()
        .all(|&x| hi.iter().all(|&y| hi.contains(&naive_join(p, x, y)) && lo.contains(&naive_meet(p, x, y))))
}

fn o_sublattice(p: &FinitePoset, s: &[usize]) -> bool {
    s.iter()
        .all(|&x| s.iter().all(|&y| s.contains(&naive_join(p, x, y)) && s.contains(&naive_meet(p, x, y))))
}

fn o_sandwich(p: &FinitePoset, a: &[usize], b: &[usize]) -> bool {
    let squeezed = |inner: &[usize], outer: &[usize]| {
        inner.iter().filter(|x| !outer.contains(x)).all(|&z| {
            !(outer.iter().any(|&o| p.leq(o, z)) && outer.iter().any(|&o| p.leq(z, o)))
        })
    };
    squeezed(a, b) && squeezed(b, a)
}

fn o_argmax(values: &[Q], s: &[usize]) -> Vec<usize> {
    let best = s.iter().map(|&i| values[i]).max().expect("nonempty");
    s.iter().copied().filter(|&i| values[i] == best).collect()
}

fn o_pareto(tables: &[Vec<Q>]) -> Vec<usize> {
    let n = tables[0].len();
    let dominates = |y: usize, x: usize| {
        tables.iter().all(|t| t[y] >= t[x]) && tables.iter().any(|t| t[y] > t[x])
    };
    (0..n).filter(|&x| !(0..n).any(|y| dominates(y, x))).collect()
}

fn tables_of(u: &UtilityProfile) -> Vec<Vec<Q>> {
    u.tables().iter().map(|t| t.values().to_vec()).collect()
}

fn vec_of(s: &Subset) -> Vec<usize> {
    s.to_vec()
}

// ---------------------------------------------------------------- 1

fn set_orders(rng: &mut ChaCha8Rng, suite: Suite) -> Outcome {
    let mut pairs = 0u64;
    let mut strong = 0u64;
    let lattices = suite.count(50);
    for _ in 0..lattices {
        let n = rng.gen_range(1..=6);
        let p = gen::random_lattice(rng, n);
        let subs: Vec<Subset> = ok(p.sublattices(12))?.into_iter().filter(|s| !s.is_empty()).collect();
        for a in &subs {
            for b in &subs {
                let (va, vb) = (vec_of(a), vec_of(b));
                let r = ok(p.ss_decompose(a, b))?;
                let union: Vec<usize> = vec_of(&a.union(b));
                let ws = o_ws(&p, &va, &vb);
                let ss = o_ss(&p, &va, &vb);
                let us = o_sublattice(&p, &union);
                let sw = o_sandwich(&p, &va, &vb);
                ensure!(
                    r.ws == ws && r.ss == ss && r.union_sublattice == us && r.sandwich == sw,
                    "library and oracle disagree on {} vs {}",
                    p.format_subset(a),
                    p.format_subset(b)
                );
                ensure!(
                    ss == (ws && us && sw),
                    "decomposition fails for {} vs {}",
                    p.format_subset(a),
                    p.format_subset(b)
                );
                pairs += 1;
                strong += u64::from(ss);
            }
        }
    }
    let c = FinitePoset::chain(4);
    let (hi, lo) = (c.subset([1, 3]), c.subset([0, 2]));
    let r = ok(c.ss_decompose(&hi, &lo))?;
    ensure!(r.ws && !r.ss && !r.sandwich, "chain witness: expected ws without ss, got {r:?}");
    Ok((
        pairs + 1,
        format!(
            "{pairs} sublattice pairs on {lattices} lattices ({strong} strongly ordered); on the 4-chain {{1, 3}} vs {{0, 2}} is weakly but not strongly ordered"
        ),
    ))
}

// ---------------------------------------------------------------- 2

fn moves_up(p: &FinitePoset, v: &[Q], u: &[Q], sets: &[Vec<usize>], strong: bool) -> bool {
    sets.iter().all(|s| {
        let (mu, mv) = (o_argmax(u, s), o_argmax(v, s));
        if strong {
            o_ss(p, &mv, &mu)
        } else {
            o_ws(p, &mv, &mu)
        }
    })
}

fn dominance(rng: &mut ChaCha8Rng, suite: Suite) -> Outcome {
    let instances = suite.count(200);
    let mut positives = [0u64; 3];
    for k in 0..instances {
        let n = rng.gen_range(1..=8);
        let p = gen::random_lattice(rng, n);
        let u = gen::random_table(rng, n, 0, 3);
        let v = if k % 2 == 0 {
            gen::random_table(rng, n, 0, 3)
        } else {
            let c = Q::from_integer(rng.gen_range(0..=2));
            ObjectiveTable::from_fn(n, |x| u[x] + c * Q::from_integer(p.down_set(x).len() as i64))
        };
        let subl: Vec<Vec<usize>> = ok(p.sublattices(12))?
            .iter()
            .filter(|s| !s.is_empty())
            .map(vec_of)
            .collect();
        let ints: Vec<Vec<usize>> = p.subintervals().iter().map(vec_of).collect();
        let checks = [
            (DominanceKind::Weak, &subl, false),
            (DominanceKind::WeakInterval, &ints, false),
            (DominanceKind::Interval, &ints, true),
        ];
        for (slot, (kind, sets, strong)) in checks.into_iter().enumerate() {
            let lib = ok(choice::dominates(&p, kind, &v, &u))?;
            let oracle = moves_up(&p, v.values(), u.values(), sets, strong);
            ensure!(
                lib == oracle,
                "{kind:?} dominance is {lib} but the maximizers {} move up on every set",
                if oracle { "do" } else { "do not" }
            );
            positives[slot] += u64::from(lib);
        }
    }
    Ok((
        instances as u64,
        format!(
            "{instances} lattices; dominance held for weak {}, weak interval {}, interval {} instances, each matching the oracle",
            positives[0], positives[1], positives[2]
        ),
    ))
}

// ---------------------------------------------------------------- 3

fn quarter_grid() -> Result<FinitePoset, String> {
    let axis: Vec<String> = (0..5).map(|i| q(i, 4).to_string()).collect();
    ok(FinitePoset::grid(&[axis.clone(), axis], 64))
}

fn sum_distance(n: usize, t: Q) -> ObjectiveTable {
    ObjectiveTable::from_fn(n, |k| {
        let s = q((k / 5) as i64, 4) + q((k % 5) as i64, 4) - t;
        -(s * s)
    })
}

fn quarter_grid_example() -> Outcome {
    let g = quarter_grid()?;
    let u = sum_distance(g.len(), q(1, 4));
    let v = sum_distance(g.len(), q(3, 4));
    ensure!(ok(choice::dominates(&g, DominanceKind::WeakInterval, &v, &u))?, "weak interval dominance fails");
    ensure!(!ok(choice::dominates(&g, DominanceKind::Weak, &v, &u))?, "weak dominance holds");
    let w = ok(choice::wmcs_witness_search(&g, &v, &u, Family::Sublattices, SetOrder::Weak, 12, u64::MAX))?
        .ok_or("no sublattice witness found")?;
    let s = vec_of(&w.set);
    ensure!(s.len() == 4 && o_sublattice(&g, &s), "witness {} is not a 4-point sublattice", g.format_subset(&w.set));
    let (mu, mv) = (o_argmax(u.values(), &s), o_argmax(v.values(), &s));
    ensure!(mu == vec_of(&w.argmax_u) && mv == vec_of(&w.argmax_v), "witness maximizers disagree with the oracle");
    ensure!(mu.len() == 1 && mv.len() == 1, "witness maximizers are not singletons");
    ensure!(!g.comparable(mu[0], mv[0]), "witness maximizers are comparable");
    let no_interval = ok(choice::wmcs_witness_search(&g, &v, &u, Family::Subintervals, SetOrder::Weak, 12, u64::MAX))?;
    ensure!(no_interval.is_none(), "a subinterval witness exists");
    let all: Vec<usize> = (0..g.len()).collect();
    let (fu, fv) = (o_argmax(u.values(), &all), o_argmax(v.values(), &all));
    ensure!(o_ws(&g, &fv, &fu), "full-grid maximizers are not weakly ordered");
    ensure!(!o_ss(&g, &fv, &fu), "full-grid maximizers are strongly ordered");
    ensure!(!o_sublattice(&g, &fu) && !o_sublattice(&g, &fv), "a full-grid maximizer set is a sublattice");
    let lib_fu = ok(choice::argmax(&g, &g.full_set(), &u))?;
    ensure!(vec_of(&lib_fu) == fu, "library argmax disagrees with the oracle");
    Ok((
        1,
        format!(
            "witness {}: u picks {}, v picks {}; full maximizers {} and {} are weakly but not strongly ordered",
            g.format_subset(&w.set),
            g.label(mu[0]),
            g.label(mv[0]),
            g.format_subset(&lib_fu),
            g.format_subset(&g.subset(fv))
        ),
    ))
}

// ---------------------------------------------------------------- 4

fn chain_pareto_example() -> Outcome {
    let labels: Vec<String> = (0..5).map(|i| q(i, 4).to_string()).collect();
    let c = ok(FinitePoset::chain_of(labels))?;
    let (h, r) = (q(1, 2), q(1, 4));
    let x = |i: usize| q(i as i64, 4);
    let table = |f: &dyn Fn(Q) -> Q| ObjectiveTable::from_fn(5, |i| f(x(i)));
    let u1 = table(&|x| if x < h { q(2, 1) - x } else { q(3, 1) - x });
    let u2 = table(&|x| q(1, 1) - x);
    let v1 = table(&|x| if x < r { x } else if x < h { h - x } else { h + x });
    let v2 = table(&|x| if x < r { x } else if x < h { h - x } else { r * (x - h) });
    let u = ok(UtilityProfile::new(vec![u1, u2]))?;
    let v = ok(UtilityProfile::new(vec![v1, v2]))?;
    let cmp = ok(pareto::pareto_wmcs_check(&c, &v, &u, ProfileDominance::SingleCrossing))?;
    let (pu, pv) = (c.format_subset(&cmp.pareto_u), c.format_subset(&cmp.pareto_v));
    ensure!(pu == "{0, 1/2}", "P(u) = {pu}");
    ensure!(pv == "{1/4, 1}", "P(v) = {pv}");
    let (ou, ov) = (o_pareto(&tables_of(&u)), o_pareto(&tables_of(&v)));
    ensure!(ou == vec_of(&cmp.pareto_u) && ov == vec_of(&cmp.pareto_v), "oracle Pareto sets differ");
    ensure!(cmp.weak && o_ws(&c, &ov, &ou), "P(v) does not weakly dominate P(u)");
    ensure!(cmp.strong == Some(false) && !o_ss(&c, &ov, &ou), "P(v) strongly dominates P(u)");
    Ok((1, format!("P(u) = {pu}, P(v) = {pv}: weakly but not strongly ordered")))
}

// ---------------------------------------------------------------- 5

fn pareto_characterizations(rng: &mut ChaCha8Rng, suite: Suite) -> Outcome {
    let posets = suite.count(2000);
    let mut points = 0u64;
    for _ in 0..posets {
        let n = rng.gen_range(1..=8);
        let p = gen::random_poset(rng, n, 0.3);
        let agents = rng.gen_range(1..=3);
        let u = ok(UtilityProfile::new((0..agents).map(|_| gen::random_table(rng, n, 0, 3)).collect()))?;
        let oracle = o_pareto(&tables_of(&u));
        let lib = ok(pareto::pareto_set(&p, &u))?;
        ensure!(vec_of(&lib) == oracle, "Pareto set {} differs from the oracle", p.format_subset(&lib));
        for x in 0..n {
            ensure!(
                ok(pareto::phi_membership(&p, &u, x))? == oracle.contains(&x),
                "Φ membership of {x} disagrees with Pareto optimality"
            );
            let y = ok(pareto::dominating_chain(&p, &u, x))?;
            let weakly_better = u.tables().iter().all(|t| t[y] >= t[x]);
            ensure!(oracle.contains(&y) && weakly_better, "dominating chain from {x} ends at {y}");
            ensure!(!oracle.contains(&x) || y == x, "dominating chain moves the Pareto point {x}");
            points += 1;
        }
        let steps: Vec<Vec<Q>> = (0..rng.gen_range(1..=agents))
            .map(|_| (0..agents).map(|_| Q::from_integer(rng.gen_range(1..=3))).collect())
            .collect();
        let w = ok(WeightSequence::new(steps, agents))?;
        let swm = ok(pareto::sequential_weighted_max(&p, &u, &w))?;
        ensure!(swm.iter().all(|x| oracle.contains(&x)), "weighted maximizers leave the Pareto set");
    }
    let chains = suite.count(500);
    let mut moved = 0u64;
    for _ in 0..chains {
        let n = rng.gen_range(1..=8);
        let c = FinitePoset::chain(n);
        let agents = rng.gen_range(1..=3);
        let us: Vec<ObjectiveTable> = (0..agents).map(|_| gen::random_table(rng, n, 0, 3)).collect();
        let vs: Vec<ObjectiveTable> = us
            .iter()
            .map(|t| {
                let k = Q::from_integer(rng.gen_range(0..=2));
                ObjectiveTable::from_fn(n, |x| t[x] + k * Q::from_integer(x as i64))
            })
            .collect();
        let u = ok(UtilityProfile::new(us))?;
        let v = ok(UtilityProfile::new(vs))?;
        ensure!(
            ok(pareto::profile_dominates(&c, ProfileDominance::SingleCrossing, &v, &u))?,
            "an increasing shift is not single-crossing dominant"
        );
        let cmp = ok(pareto::pareto_wmcs_check(&c, &v, &u, ProfileDominance::SingleCrossing))?;
        let (ou, ov) = (o_pareto(&tables_of(&u)), o_pareto(&tables_of(&v)));
        ensure!(vec_of(&cmp.pareto_u) == ou && vec_of(&cmp.pareto_v) == ov, "chain Pareto sets differ from the oracle");
        ensure!(cmp.weak && o_ws(&c, &ov, &ou), "Pareto sets on a chain are not weakly ordered");
        moved += u64::from(ou != ov);
    }
    Ok((
        (posets + chains) as u64,
        format!(
            "{posets} posets ({points} points checked for Φ and dominating chains); {chains} chains with single-crossing shifts, {moved} with a changed Pareto set, all weakly ordered"
        ),
    ))
}

// ---------------------------------------------------------------- 6

fn twelfth_grid() -> Outcome {
    let (p, coords) = ok(pareto::unit_square_grid(12, Limits::default().max_elements))?;
    let u = pareto::two_division_profile(&coords, (q(1, 4), q(1, 4)));
    let v = pareto::two_division_profile(&coords, (q(1, 3), q(1, 3)));
    let n = p.len();
    let le = |a: usize, b: usize| coords[a].0 <= coords[b].0 && coords[a].1 <= coords[b].1;
    let increasing_differences = (0..n).all(|a| {
        (0..n).filter(|&b| a != b && le(a, b)).all(|b| {
            u.tables().iter().zip(v.tables()).all(|(ut, vt)| vt[b] - vt[a] >= ut[b] - ut[a])
        })
    });
    let pos = |x: (Q, Q)| coords.iter().position(|&c| c == x).expect("grid point");
    let supermodular = |prof: &UtilityProfile| {
        prof.tables().iter().all(|t| {
            (0..n).all(|a| {
                (0..n).all(|b| {
                    let j = pos((coords[a].0.max(coords[b].0), coords[a].1.max(coords[b].1)));
                    let m = pos((coords[a].0.min(coords[b].0), coords[a].1.min(coords[b].1)));
                    t[j] - t[a] >= t[b] - t[m]
                })
            })
        })
    };
    ensure!(increasing_differences, "oracle: v does not have increasing differences over u");
    ensure!(supermodular(&u) && supermodular(&v), "oracle: a profile is not supermodular");
    ensure!(
        ok(pareto::profile_dominates(&p, ProfileDominance::IncreasingDifferences, &v, &u))?,
        "library: increasing differences fail"
    );
    let cmp = ok(pareto::pareto_wmcs_check(&p, &v, &u, ProfileDominance::IncreasingDifferences))?;
    let (ou, ov) = (o_pareto(&tables_of(&u)), o_pareto(&tables_of(&v)));
    ensure!(vec_of(&cmp.pareto_u) == ou && vec_of(&cmp.pareto_v) == ov, "Pareto sets differ from the pairwise oracle");
    let ws = o_ws(&p, &ov, &ou);
    let ss = o_ss(&p, &ov, &ou);
    ensure!(cmp.weak && ws, "Pareto sets are not weakly ordered");
    ensure!(cmp.strong == Some(false) && !ss, "Pareto sets are strongly ordered");
    ensure!(cmp.empirical, "grid result not flagged as empirical");
    Ok((
        1,
        format!(
            "{n} grid points; |P(u)| = {}, |P(v)| = {}; weakly but not strongly ordered (empirical on a grid)",
            ou.len(),
            ov.len()
        ),
    ))
}

// ---------------------------------------------------------------- 7

/// Every fixed point some walk from `x0` can end on, and whether some walk
/// gets stuck, by exhaustive search over all selections.
fn o_walk_ends(p: &FinitePoset, f: &fixedpoint::Correspondence, x0: usize, up: bool) -> (BTreeSet<usize>, bool) {
    let mut ends = BTreeSet::new();
    let mut dead = false;
    let mut stack = vec![x0];
    let mut seen = BTreeSet::new();
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        let img = f.image(x);
        if img.contains(x) {
            ends.insert(x);
            continue;
        }
        let next: Vec<usize> = img.iter().filter(|&y| if up { p.lt(x, y) } else { p.lt(y, x) }).collect();
        if next.is_empty() {
            dead = true;
        }
        stack.extend(next);
    }
    (ends, dead)
}

fn fixed_points(rng: &mut ChaCha8Rng, suite: Suite) -> Outcome {
    let existence = suite.count(500);
    let mut walks = 0u64;
    for k in 0..existence {
        let n = rng.gen_range(1..=10);
        let p = gen::random_poset(rng, n, 0.3);
        let (closure, dir, up) = if k % 2 == 0 {
            (Closure::Up, Direction::Up, true)
        } else {
            (Closure::Down, Direction::Down, false)
        };
        let f = gen::random_correspondence(rng, &p, closure);
        let a = ok(fixedpoint::analyze(&p, &f))?;
        let oracle_fp: Vec<usize> = (0..n).filter(|&x| f.image(x).contains(x)).collect();
        ensure!(vec_of(&a.points) == oracle_fp, "fixed points differ from the oracle");
        let in_class = if up { a.class.in_f_plus } else { a.class.in_f_minus };
        let starts = if up { fixedpoint::x_plus(&p, &f) } else { fixedpoint::x_minus(&p, &f) };
        ensure!(in_class == !starts.is_empty(), "closed correspondence misclassified");
        if !in_class {
            continue;
        }
        ensure!(!oracle_fp.is_empty(), "monotone correspondence without fixed points");
        let extremal = if up { &a.maximal } else { &a.minimal };
        ensure!(!extremal.is_empty(), "no extremal fixed point");
        let sys = OnPoset { poset: &p, map: &f };
        for x in starts.iter() {
            let (ends, dead) = o_walk_ends(&p, &f, x, up);
            ensure!(!dead, "a monotone walk from {x} gets stuck");
            let (reach, lib_dead) = ok(fixedpoint::reachable_fixed_points(&sys, &x, dir))?;
            ensure!(reach == ends && !lib_dead, "reachable fixed points from {x} differ from the oracle");
            for policy in SelectionPolicy::standard() {
                let t = ok(fixedpoint::iterate(&p, &f, x, &policy, dir))?;
                let end = t.fixed_point.ok_or(format!("walk from {x} under {policy:?} dead-ends"))?;
                ensure!(ends.contains(&end), "walk from {x} ends off the reachable set");
                let monotone = t.steps.windows(2).all(|w| if up { p.lt(w[0], w[1]) } else { p.lt(w[1], w[0]) });
                ensure!(monotone, "walk from {x} is not strictly monotone");
                walks += 1;
            }
        }
    }

    let lifts = suite.count(500);
    let (mut done, mut attempts) = (0usize, 0usize);
    while done < lifts {
        attempts += 1;
        ensure!(attempts <= 100 * lifts, "too few valid lift instances ({done} of {lifts})");
        let n = rng.gen_range(1..=8);
        let p = gen::random_poset(rng, n, 0.35);
        let upper = attempts % 2 == 0;
        let (f, g, mode) = if upper {
            let f = gen::random_correspondence(rng, &p, Closure::None);
            if fixedpoint::fixed_points(&p, &f).is_empty() {
                continue;
            }
            let g = gen::raise_upper(rng, &p, &f);
            if !fixedpoint::classify(&p, &g).in_f_plus {
                continue;
            }
            (f, g, LiftMode::Upper)
        } else {
            let f = gen::random_correspondence(rng, &p, Closure::Down);
            if !fixedpoint::classify(&p, &f).in_f_minus {
                continue;
            }
            let g = gen::raise_lower(rng, &p, &f);
            if fixedpoint::fixed_points(&p, &g).is_empty() {
                continue;
            }
            (f, g, LiftMode::Lower)
        };
        let fp: Vec<usize> = (0..n).filter(|&x| f.image(x).contains(x)).collect();
        let gp: Vec<usize> = (0..n).filter(|&x| g.image(x).contains(x)).collect();
        let pairs = ok(fixedpoint::fixed_point_comparison(&p, &f, &g, mode))?;
        if upper {
            ensure!(fp.iter().all(|&x| gp.iter().any(|&y| p.leq(x, y))), "Fp(G) does not upper-dominate Fp(F)");
            ensure!(pairs.iter().all(|&(x, y)| p.leq(x, y) && gp.contains(&y)), "bad upward lift");
        } else {
            ensure!(gp.iter().all(|&y| fp.iter().any(|&x| p.leq(x, y))), "Fp(G) does not lower-dominate Fp(F)");
            ensure!(pairs.iter().all(|&(y, x)| p.leq(x, y) && fp.contains(&x)), "bad downward lift");
        }
        done += 1;
    }

    let mut facts = 0;
    for name in fixedpoint::GALLERY_NAMES {
        let inst = ok(fixedpoint::gallery(name))?;
        for fact in ok(fixedpoint::check_gallery(&inst))? {
            ensure!(fact.holds(), "{name}: {} is {}, expected {}", fact.fact, fact.observed, fact.expected);
            facts += 1;
        }
    }
    let fig = ok(fixedpoint::gallery("figure2"))?;
    let p = &fig.poset;
    let fp: Vec<String> = (0..p.len())
        .filter(|&x| fig.map.image(x).contains(x))
        .map(|x| p.label(x).to_string())
        .collect();
    ensure!(fp == ["(2,2)", "(3,2)"], "the upward-walk instance fixed points are {fp:?}");
    let start = p.index_of("(1,1)").ok_or("the upward-walk instance has no (1,1)")?;
    let (ends, dead) = o_walk_ends(p, &fig.map, start, true);
    let ends: Vec<&str> = ends.iter().map(|&x| p.label(x)).collect();
    ensure!(ends == ["(3,2)"] && !dead, "walks from (1,1) end at {ends:?}");
    Ok((
        (existence + lifts) as u64,
        format!(
            "{existence} closed correspondences ({walks} walks), {lifts} lift instances in {attempts} draws, {facts} gallery facts; in the upward-walk instance every walk from (1,1) ends at (3,2) although (2,2) is the least fixed point"
        ),
    ))
}

// ---------------------------------------------------------------- 8

fn int_grid(m: i64) -> Vec<Q> {
    (0..m).map(Q::from_integer).collect()
}

/// Best responses by direct profit comparison.
fn o_best_responses(spec: &BertrandSpec, i: usize, opp: usize) -> Vec<usize> {
    let profile = |own: usize| if i == 0 { vec![own, opp] } else { vec![opp, own] };
    let profits: Vec<Q> = (0..spec.grid(i).len()).map(|k| spec.profit(i, &profile(k))).collect();
    let all: Vec<usize> = (0..profits.len()).collect();
    o_argmax(&profits, &all)
}

fn o_nash(spec: &BertrandSpec) -> Vec<Vec<usize>> {
    let (m0, m1) = (spec.grid(0).len(), spec.grid(1).len());
    let mut out = Vec::new();
    for a in 0..m0 {
        for b in 0..m1 {
            if o_best_responses(spec, 0, b).contains(&a) && o_best_responses(spec, 1, a).contains(&b) {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

fn o_profiles_lws(hi: &[Vec<usize>], lo: &[Vec<usize>]) -> bool {
    let le = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(x, y)| x <= y);
    hi.iter().all(|y| lo.iter().any(|x| le(x, y)))
}

fn bertrand() -> Outcome {
    let limits = Limits::default();
    let mut grids = 0u64;
    for m in 2..=11i64 {
        for c in [0, 1, m / 2] {
            let spec = ok(games::pure_bertrand(vec![int_grid(m), int_grid(m)], vec![Q::from_integer(c); 2]))?;
            ok(games::validate_demand(&spec))?;
            ensure!(ok(games::bertrand_br_monotone(&spec))?, "best responses not lower monotone on grid {m}, cost {c}");
            for i in 0..2 {
                for a in 0..m as usize {
                    for b in a..m as usize {
                        let (ba, bb) = (o_best_responses(&spec, i, a), o_best_responses(&spec, i, b));
                        ensure!(
                            bb.iter().all(|&y| ba.iter().any(|&x| x <= y)),
                            "oracle: firm {i}'s best responses fall from rival price {a} to {b} on grid {m}"
                        );
                    }
                }
            }
            grids += 1;
        }
    }
    let mut raises = Vec::new();
    for c0 in [0, 2, 5] {
        for c1 in [1, 3] {
            for extra in [1, 3] {
                raises.push((c0, c1, c1 + extra));
            }
        }
    }
    raises.push((2, 2, 4));
    let mut notes = String::new();
    for &(c0, c1, c1p) in &raises {
        let cost = |a: i64, b: i64| vec![Q::from_integer(a), Q::from_integer(b)];
        let spec = ok(games::pure_bertrand(vec![int_grid(11), int_grid(11)], cost(c0, c1)))?;
        let tilde = ok(games::pure_bertrand(vec![int_grid(11), int_grid(11)], cost(c0, c1p)))?;
        let g = ok(games::bertrand_build(&spec))?;
        let gt = ok(games::bertrand_build(&tilde))?;
        let cmp = ok(games::nash_compare(&g, &gt, SetOrder::Lower, &limits))?;
        let (eq, eqt) = (o_nash(&spec), o_nash(&tilde));
        ensure!(cmp.eq == eq && cmp.eq_prime == eqt, "equilibria differ from the profile scan at costs ({c0},{c1})");
        ensure!(!eq.is_empty() && !eqt.is_empty(), "no equilibrium at costs ({c0},{c1})");
        ensure!(cmp.holds && o_profiles_lws(&eqt, &eq), "equilibria not lower ordered after raising {c1} to {c1p}");
        let pay = ok(games::bertrand_payoff_compare(&spec, &tilde, 0, &limits))?;
        let profits = |s: &BertrandSpec, e: &[Vec<usize>]| -> Vec<Q> { e.iter().map(|x| s.profit(0, x)).collect() };
        let (pb, pt) = (profits(&spec, &eq), profits(&tilde, &eqt));
        ensure!(
            pay.holds && pt.iter().all(|t| pb.iter().any(|b| b <= t)),
            "firm 0's profits do not rise after raising firm 1's cost from {c1} to {c1p}"
        );
        if (c0, c1, c1p) == (2, 2, 4) {
            notes = format!(
                "costs (2,2) -> (2,4) on prices 0..10: equilibria {} -> {}",
                eq.iter().map(|e| g.profile_label(e)).collect::<Vec<_>>().join(" "),
                eqt.iter().map(|e| gt.profile_label(e)).collect::<Vec<_>>().join(" ")
            );
        }
    }
    Ok((
        grids + raises.len() as u64,
        format!("{grids} grids checked for D1/D2 and lower monotone best responses; {} cost raises; {notes}", raises.len()),
    ))
}

// ---------------------------------------------------------------- 9

fn beauty_contest() -> Outcome {
    let limits = Limits::default();
    let steps = 4;
    let (_, coords) = ok(pareto::unit_square_grid(steps, limits.max_elements))?;
    let m = coords.len();
    let base = BeautyContestSpec {
        n: 2,
        steps,
        theta: (q(0, 1), q(0, 1)),
    };
    let shifted = BeautyContestSpec {
        theta: (q(1, 4), q(1, 4)),
        ..base.clone()
    };
    let oracle = |theta: (Q, Q)| -> Vec<Vec<usize>> {
        let responses: Vec<Vec<usize>> = (0..m)
            .map(|o| {
                let omega = (coords[o].0 + theta.0, coords[o].1 + theta.1);
                o_pareto(&tables_of(&pareto::two_division_profile(&coords, omega)))
            })
            .collect();
        let mut eq = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if responses[b].contains(&a) && responses[a].contains(&b) {
                    eq.push(vec![a, b]);
                }
            }
        }
        eq
    };
    let le = |a: &[usize], b: &[usize]| {
        a.iter().zip(b).all(|(&x, &y)| coords[x].0 <= coords[y].0 && coords[x].1 <= coords[y].1)
    };
    let g = ok(games::beauty_contest_build(&base, &limits))?;
    let gs = ok(games::beauty_contest_build(&shifted, &limits))?;
    for (name, game) in [("θ = 0", &g), ("θ = 1/4", &gs)] {
        let class = ok(games::classify_wsc(game, &limits))?;
        ensure!(class.in_g_plus && class.in_g_minus, "{name}: game is not in both complementarity classes");
    }
    let cmp = ok(games::nash_compare(&g, &gs, SetOrder::Weak, &limits))?;
    let (eq, eqs) = (oracle(base.theta), oracle(shifted.theta));
    ensure!(cmp.eq == eq && cmp.eq_prime == eqs, "equilibria differ from the exhaustive oracle");
    ensure!(!eq.is_empty() && !eqs.is_empty(), "an equilibrium set is empty");
    let ws = eq.iter().all(|x| eqs.iter().any(|y| le(x, y))) && eqs.iter().all(|y| eq.iter().any(|x| le(x, y)));
    ensure!(cmp.holds && ws, "equilibrium sets are not weakly ordered");
    Ok((
        (m * m) as u64,
        format!(
            "{} profiles; {} equilibria at θ = 0 and {} at θ = (1/4, 1/4), weakly ordered (empirical on a grid)",
            m * m,
            eq.len(),
            eqs.len()
        ),
    ))
}

// ---------------------------------------------------------------- 10

fn matching_gallery() -> Outcome {
    let limits = Limits::default();
    let opts = AuditOptions::default();
    let mut facts = 0u64;
    for name in matching::GALLERY_NAMES {
        let inst = ok(matching::gallery(name))?;
        for fact in ok(matching::check_gallery(&inst, &limits))? {
            ensure!(fact.holds(), "{name}: {} is {}, expected {}", fact.fact, fact.observed, fact.expected);
            facts += 1;
        }
    }
    let firm = Agent::Firm(0);
    let holds = |name: &str, ax: Axiom| -> Result<bool, String> {
        let e = ok(matching::gallery(name))?.economy;
        Ok(ok(matching::audit(e.rule(firm), ax, &opts))?.holds)
    };
    ensure!(
        holds("multidivision-budget", Axiom::SenAlpha)? && !holds("multidivision-budget", Axiom::SenBeta)?,
        "multidivision budget: expected Sen's α without Sen's β"
    );
    ensure!(
        holds("indifferent-single-slot", Axiom::WeakSubstitutes)?
            && !holds("indifferent-single-slot", Axiom::StrongSubstitutes)?,
        "indifferent single slot: expected weak but not strong substitutes"
    );
    let e = ok(matching::gallery("indifferent-single-slot"))?.economy;
    let stable = ok(e.stable_set(&limits))?;
    ensure!(
        stable.len() == 3 && stable.iter().all(|z| z.count_ones() == 1) && e.worker_optimal(&stable).is_empty(),
        "indifferent single slot: expected three singleton stable allocations and no worker optimum"
    );
    ensure!(
        holds("warni-counterexample", Axiom::SenAlpha)? && !holds("warni-counterexample", Axiom::Warni)?,
        "WARNI counterexample: expected Sen's α without WARNI"
    );
    let e = ok(matching::gallery("alternative-stability"))?.economy;
    let y = ok(e.universe().set_of(&["y"]))?;
    ensure!(
        ok(e.is_alt_stable(y))? && !ok(e.is_stable(y))?,
        "alternative stability: {{y}} should be alternatively stable but not stable"
    );
    Ok((facts, format!("{facts} gallery facts across {} economies", matching::GALLERY_NAMES.len())))
}

// ---------------------------------------------------------------- 11

fn stable_fixed_points(rng: &mut ChaCha8Rng, suite: Suite) -> Outcome {
    let limits = Limits::default();
    let opts = AuditOptions::default();
    let economies = suite.count(100);
    let mut stable_total = 0u64;
    for _ in 0..economies {
        let e = gen::random_economy(rng, 6);
        ok(e.check_hypotheses(&opts))?;
        let u = e.universe();
        let oracle: Vec<u64> = (0..=u.all())
            .filter(|&z| u.is_allocation(z))
            .filter(|&z| e.is_stable(z).unwrap_or(false))
            .collect();
        let r = ok(matching::characterization_check(&e, &limits))?;
        ensure!(r.holds(), "fixed points of T and stable allocations differ: {r:?}");
        ensure!(r.stable == oracle, "stable set differs from the allocation scan");
        ensure!(!oracle.is_empty(), "no stable allocation");
        let sol = ok(matching::stable_solve(&e, &opts))?;
        ensure!(oracle.contains(&sol.allocation), "solver returned an unstable allocation");
        stable_total += oracle.len() as u64;
    }
    Ok((
        economies as u64,
        format!("{economies} random economies with substitutable firms; {stable_total} stable allocations, all fixed points of T"),
    ))
}

// ---------------------------------------------------------------- 12

fn check_cs(g: &Economy, g2: &Economy, limits: &Limits, opts: &AuditOptions) -> Result<usize, String> {
    let ws = ok(matching::matching_cs(g, g2, limits, opts))?;
    let u = g.universe();
    for w in &ws {
        ensure!(
            ok(g.is_stable(w.first))? && ok(g2.is_stable(w.second))?,
            "witness pair {} / {} is not stable",
            u.format(w.first),
            u.format(w.second)
        );
        ensure!(
            (0..u.firms().len()).all(|f| g.prefers(Agent::Firm(f), w.first, w.second)),
            "a firm prefers {} to {}",
            u.format(w.second),
            u.format(w.first)
        );
        ensure!(
            (0..u.workers().len()).all(|k| g2.prefers(Agent::Worker(k), w.second, w.first)),
            "a worker prefers {} to {}",
            u.format(w.first),
            u.format(w.second)
        );
    }
    let firsts: BTreeSet<u64> = ws.iter().filter(|w| w.direction == CsDirection::Forward).map(|w| w.first).collect();
    let seconds: BTreeSet<u64> = ws.iter().filter(|w| w.direction == CsDirection::Backward).map(|w| w.second).collect();
    ensure!(
        firsts.into_iter().collect::<Vec<_>>() == ok(g.stable_set(limits))?,
        "not every stable allocation of the first economy is lifted"
    );
    ensure!(
        seconds.into_iter().collect::<Vec<_>>() == ok(g2.stable_set(limits))?,
        "not every stable allocation of the second economy is lifted"
    );
    Ok(ws.len())
}

fn three_workers(firm: ChoiceRule) -> Result<Economy, String> {
    let u = ok(ContractUniverse::from_names(
        &["f"],
        &["a", "b", "c"],
        &[("x", "f", "a"), ("y", "f", "b"), ("z", "f", "c")],
    ))?;
    let w = (0..3).map(|_| ChoiceRule::ranking(1, &[0])).collect::<wmcs_core::Result<Vec<_>>>();
    ok(Economy::new(u, vec![firm], ok(w)?))
}

fn random_market(rng: &mut ChaCha8Rng) -> Result<ConstraintsMarket, String> {
    let nd = rng.gen_range(1..=3);
    let nh = rng.gen_range(1..=3);
    let mut prefs = |agents: usize, partners: usize| -> Vec<Vec<usize>> {
        (0..agents)
            .map(|_| {
                let mut l: Vec<usize> = (0..partners).filter(|_| rng.gen_bool(0.75)).collect();
                l.shuffle(rng);
                l
            })
            .collect()
    };
    let dp = prefs(nd, nh);
    let hp = prefs(nh, nd);
    let caps: Vec<u32> = (0..nh).map(|_| rng.gen_range(1..=2)).collect();
    let total: u32 = rng.gen_range(1..=nd as u32);
    let feas = if rng.gen_bool(0.5) {
        ok(Feasibility::from_predicate(&caps, |w| w.iter().sum::<u32>() <= total))?
    } else {
        Feasibility::unconstrained(&caps)
    };
    let names = |p: &str, k: usize| (1..=k).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    ok(ConstraintsMarket::new(names("d", nd), names("h", nh), dp, hp, caps, feas))
}

fn regional(total: u32) -> Result<ConstraintsMarket, String> {
    let caps = [2, 2];
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    ok(ConstraintsMarket::new(
        names(&["d1", "d2", "d3"]),
        names(&["h1", "h2"]),
        vec![vec![0, 1], vec![0, 1], vec![1, 0]],
        vec![vec![0, 1, 2], vec![2, 1, 0]],
        caps.to_vec(),
        ok(Feasibility::from_predicate(&caps, |w| w.iter().sum::<u32>() <= total))?,
    ))
}

fn comparative_statics(rng: &mut ChaCha8Rng, suite: Suite) -> Outcome {
    let limits = Limits::default();
    let opts = AuditOptions::default();
    let economies = suite.count(20);
    let mut pairs = 0usize;
    let mut changes = 0usize;
    for _ in 0..economies {
        let e = gen::random_economy(rng, 6);
        for w in 0..e.universe().workers().len() {
            pairs += check_cs(&e, &ok(e.without(Agent::Worker(w)))?, &limits, &opts)?;
            changes += 1;
        }
        for f in 0..e.universe().firms().len() {
            pairs += check_cs(&ok(e.without(Agent::Firm(f)))?, &e, &limits, &opts)?;
            changes += 1;
        }
    }

    let groups = vec![vec![0], vec![2, 1]];
    let tight = ok(Feasibility::new(2, vec![vec![1, 0], vec![0, 1]]))?;
    let loose = ok(Feasibility::new(2, vec![vec![1, 1]]))?;
    let g = three_workers(ok(ChoiceRule::quota(3, groups.clone(), tight))?)?;
    let g2 = three_workers(ok(ChoiceRule::quota(3, groups, loose))?)?;
    check_cs(&g, &g2, &limits, &opts)?;
    let xz = ok(g.universe().set_of(&["x", "z"]))?;
    ensure!(ok(g2.stable_set(&limits))? == vec![xz], "relaxed budget: expected {{x, z}} as the only stable allocation");

    let (r2, r3) = (regional(2)?, regional(3)?);
    let cs = ok(matching::constraints_cs(&r2, &r3, &limits, &opts))?;
    let strictly = cs
        .iter()
        .any(|w| (0..w.tight.len()).any(|d| r2.doctor_prefers(d, w.loose[d], w.tight[d])));
    ensure!(!cs.is_empty() && strictly, "raising the regional cap from 2 to 3 helps no doctor");

    let markets = suite.count(100);
    let mut matchings = 0usize;
    let mut relaxations = 0usize;
    for _ in 0..markets {
        let m = random_market(rng)?;
        let bad = ok(matching::claim_equivalence(&m, &limits))?;
        ensure!(bad.is_empty(), "weak stability and stability disagree on {}", m.format(&bad[0]));
        ensure!(
            ok(matching::weak_stable_solve(&m, &opts)).is_ok(),
            "no weakly stable matching found"
        );
        matchings += matching::weakly_stable_set(&m).len();
        let caps = m.capacities().to_vec();
        let relaxed = ok(m.with_feasibility(Feasibility::unconstrained(&caps)))?;
        if relaxed.feasibility().contains(m.feasibility()) {
            ok(matching::constraints_cs(&m, &relaxed, &limits, &opts))?;
            relaxations += 1;
        }
    }
    Ok((
        (changes + markets + 2) as u64,
        format!(
            "{changes} worker exits and firm entries ({pairs} witness pairs); budget relaxation makes {{x, z}} stable; regional cap 2 -> 3 helps a doctor; {markets} constrained markets ({matchings} weakly stable matchings, {relaxations} relaxations) with matching stability notions"
        ),
    ))
}
