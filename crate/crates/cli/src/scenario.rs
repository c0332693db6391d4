//! Scenario files: schema, validation and dispatch to the core analyses.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer};
use serde_json::Value;
use wmcs_core::choice::{self, DominanceKind, Family, ObjectiveTable};
use wmcs_core::fixedpoint::{self, Correspondence, Direction, LiftMode, OnPoset, SelectionPolicy};
use wmcs_core::games::{self, BeautyContestSpec};
use wmcs_core::matching::{
    self as cons, audit, Agent, AuditOptions, Axiom, ChoiceRule, ConstraintsMarket, ContractSet, ContractUniverse,
    CsDirection, DefaultChoice, Economy, Feasibility, Matching,
};
use wmcs_core::pareto::{self, ProfileDominance, UtilityProfile};
use wmcs_core::{Error, FinitePoset, Limits, SetOrder, Q};

use crate::report::{Caps, Provenance, Report};
use crate::{env_limits, CliError, Result};

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

/// A rational written as an integer or as a `"p/q"` string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rat(pub Q);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(Rat(Q::from_integer(i))),
            Repr::Text(s) => s
                .trim()
                .parse::<Q>()
                .map(Rat)
                .map_err(|_| serde::de::Error::custom(format!("not a rational: {s:?}"))),
        }
    }
}

fn rats(v: &[Rat]) -> Vec<Q> {
    v.iter().map(|r| r.0).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Order,
    Choice,
    Pareto,
    Fixedpoint,
    Game,
    Matching,
    Constraints,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Order => "order",
            Kind::Choice => "choice",
            Kind::Pareto => "pareto",
            Kind::Fixedpoint => "fixedpoint",
            Kind::Game => "game",
            Kind::Matching => "matching",
            Kind::Constraints => "constraints",
        }
    }
}

/// Per-scenario overrides of the enumeration caps.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapOverrides {
    pub max_elements: Option<usize>,
    pub exhaustive_sublattices: Option<usize>,
    pub max_profiles: Option<usize>,
    pub stable_set_contracts: Option<usize>,
    pub characterization_contracts: Option<usize>,
    pub axiom_exhaustive: Option<usize>,
    pub max_divisions: Option<usize>,
    pub audit_samples: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    pub description: Option<String>,
    pub kind: Kind,
    pub payload: Value,
    pub seed: Option<u64>,
    #[serde(default)]
    pub caps: CapOverrides,
    /// Verdict name to expected value; every key must name a verdict.
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

impl Scenario {
    /// Caps after scenario overrides, then the environment.
    pub fn limits(&self) -> Result<(Limits, AuditOptions)> {
        let d = Limits::default();
        let c = &self.caps;
        let limits = env_limits(Limits {
            max_elements: c.max_elements.unwrap_or(d.max_elements),
            exhaustive_sublattices: c.exhaustive_sublattices.unwrap_or(d.exhaustive_sublattices),
            max_profiles: c.max_profiles.unwrap_or(d.max_profiles),
            stable_set_contracts: c.stable_set_contracts.unwrap_or(d.stable_set_contracts),
            characterization_contracts: c.characterization_contracts.unwrap_or(d.characterization_contracts),
            axiom_exhaustive: c.axiom_exhaustive.unwrap_or(d.axiom_exhaustive),
            max_divisions: c.max_divisions.unwrap_or(d.max_divisions),
        })?;
        let opts = AuditOptions {
            exhaustive_cap: limits.axiom_exhaustive,
            samples: c.audit_samples.unwrap_or(AuditOptions::default().samples),
            seed: self.seed.unwrap_or(0),
        };
        Ok((limits, opts))
    }
}

pub fn parse(bytes: &[u8]) -> Result<Scenario> {
    serde_json::from_slice(bytes).map_err(|e| schema(e.to_string()))
}

fn payload<T: DeserializeOwned>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| schema(format!("payload: {e}")))
}

pub fn run_file(path: &Path) -> Result<Report> {
    run_bytes(&std::fs::read(path)?)
}

pub fn run_bytes(bytes: &[u8]) -> Result<Report> {
    let sc = parse(bytes)?;
    let (limits, opts) = sc.limits()?;
    let prov = Provenance::new(bytes, sc.seed, Caps::new(&limits, &opts));
    let title = sc.name.clone().unwrap_or_else(|| format!("{} scenario", sc.kind.name()));
    let mut rep = Report::new(title, sc.kind.name(), prov);
    if let Some(d) = &sc.description {
        rep.witness(format!("description: {d}"));
    }
    let ctx = Ctx { limits, opts };
    match sc.kind {
        Kind::Order => run_order(&payload(&sc.payload)?, &ctx, &mut rep)?,
        Kind::Choice => run_choice(&payload(&sc.payload)?, &ctx, &mut rep)?,
        Kind::Pareto => run_pareto(&payload(&sc.payload)?, &ctx, &mut rep)?,
        Kind::Fixedpoint => run_fixedpoint(&payload(&sc.payload)?, &ctx, &mut rep)?,
        Kind::Game => run_game(&payload(&sc.payload)?, &ctx, &mut rep)?,
        Kind::Matching => run_matching(&payload(&sc.payload)?, &ctx, &mut rep)?,
        Kind::Constraints => run_constraints(&payload(&sc.payload)?, &ctx, &mut rep)?,
    }
    apply_expectations(&mut rep, &sc.expect)?;
    Ok(rep)
}

fn apply_expectations(rep: &mut Report, expect: &BTreeMap<String, Value>) -> Result<()> {
    for (name, want) in expect {
        let want = match want {
            Value::String(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            other => return Err(schema(format!("expected value for {name:?} must be a string, number or bool, got {other}"))),
        };
        let v = rep
            .verdicts
            .iter_mut()
            .find(|v| &v.name == name)
            .ok_or_else(|| schema(format!("expect names unknown verdict {name:?}")))?;
        v.pass = Some(v.value == want);
        v.expected = Some(want);
    }
    Ok(())
}

struct Ctx {
    limits: Limits,
    opts: AuditOptions,
}

// ---------------------------------------------------------------- posets

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PosetSpec {
    Chain(Vec<String>),
    Grid(Vec<Vec<String>>),
    /// `{0, 1/n, …, 1}²`
    UnitSquare(i64),
    Relation {
        elements: Vec<String>,
        #[serde(default)]
        order: Vec<(String, String)>,
    },
}

struct Ground {
    poset: FinitePoset,
    coords: Option<Vec<(Q, Q)>>,
}

impl PosetSpec {
    fn build(&self, limits: &Limits) -> Result<Ground> {
        let cap = limits.max_elements;
        let check = |n: usize| -> Result<()> {
            if n > cap {
                return Err(Error::SizeLimit {
                    what: "poset".into(),
                    size: n,
                    cap,
                }
                .into());
            }
            Ok(())
        };
        Ok(match self {
            PosetSpec::Chain(labels) => {
                check(labels.len())?;
                Ground {
                    poset: FinitePoset::chain_of(labels.clone())?,
                    coords: None,
                }
            }
            PosetSpec::Grid(axes) => Ground {
                poset: FinitePoset::grid(axes, cap)?,
                coords: None,
            },
            PosetSpec::UnitSquare(steps) => {
                let (poset, coords) = pareto::unit_square_grid(*steps, cap)?;
                Ground {
                    poset,
                    coords: Some(coords),
                }
            }
            PosetSpec::Relation { elements, order } => {
                check(elements.len())?;
                Ground {
                    poset: FinitePoset::from_label_pairs(elements.clone(), order)?,
                    coords: None,
                }
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TableSpec {
    /// One value per element, in element order.
    Values(Vec<Rat>),
    ByLabel(BTreeMap<String, Rat>),
}

impl TableSpec {
    fn build(&self, p: &FinitePoset) -> Result<ObjectiveTable> {
        match self {
            TableSpec::Values(v) => {
                if v.len() != p.len() {
                    return Err(schema(format!("table has {} values for {} elements", v.len(), p.len())));
                }
                Ok(ObjectiveTable::new(rats(v)))
            }
            TableSpec::ByLabel(m) => {
                if let Some(k) = m.keys().find(|k| p.index_of(k).is_none()) {
                    return Err(Error::UnknownLabel(k.clone()).into());
                }
                let values = p
                    .labels()
                    .iter()
                    .map(|l| m.get(l).map(|r| r.0).ok_or_else(|| schema(format!("table has no value for {l}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ObjectiveTable::new(values))
            }
        }
    }
}

fn index(p: &FinitePoset, label: &str) -> Result<usize> {
    p.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()).into())
}

// ---------------------------------------------------------------- order

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderPayload {
    poset: PosetSpec,
    upper: Vec<String>,
    lower: Vec<String>,
}

fn run_order(pl: &OrderPayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let p = pl.poset.build(&ctx.limits)?.poset;
    let upper = p.subset_of_labels(&pl.upper)?;
    let lower = p.subset_of_labels(&pl.lower)?;
    rep.verdict("elements", p.len());
    rep.verdict("lattice", p.is_lattice());
    rep.verdict("upper", p.format_subset(&upper));
    rep.verdict("lower", p.format_subset(&lower));
    if p.is_lattice() {
        let r = p.ss_decompose(&upper, &lower)?;
        rep.verdict("uws", r.uws);
        rep.verdict("lws", r.lws);
        rep.verdict("ws", r.ws);
        rep.verdict("ss", r.ss);
        rep.verdict("union_sublattice", r.union_sublattice);
        rep.verdict("sandwich", r.sandwich);
        rep.verdict("upper_sublattice", p.is_sublattice(&upper)?);
        rep.verdict("lower_sublattice", p.is_sublattice(&lower)?);
    } else {
        let uws = p.set_dominates(&upper, &lower, SetOrder::Upper)?;
        let lws = p.set_dominates(&upper, &lower, SetOrder::Lower)?;
        rep.verdict("uws", uws);
        rep.verdict("lws", lws);
        rep.verdict("ws", uws && lws);
        rep.verdict("ss", "n/a (not a lattice)");
        rep.verdict("sandwich", p.sandwich(&upper, &lower));
    }
    Ok(())
}

// ---------------------------------------------------------------- choice

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoicePayload {
    poset: PosetSpec,
    u: TableSpec,
    v: TableSpec,
}

pub fn kind_name(kind: DominanceKind) -> &'static str {
    match kind {
        DominanceKind::SingleCrossing => "single_crossing",
        DominanceKind::MS => "ms",
        DominanceKind::Weak => "weak",
        DominanceKind::WeakInterval => "weak_interval",
        DominanceKind::Interval => "interval",
        DominanceKind::QSInterval => "qs_interval",
    }
}

fn run_choice(pl: &ChoicePayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let p = pl.poset.build(&ctx.limits)?.poset;
    let u = pl.u.build(&p)?;
    let v = pl.v.build(&p)?;
    let lattice = p.is_lattice();
    rep.verdict("lattice", lattice);
    for kind in DominanceKind::ALL {
        let name = format!("dominance.{}", kind_name(kind));
        match choice::dominates(&p, kind, &v, &u) {
            Ok(b) => rep.verdict(name, b),
            Err(Error::NotLattice) | Err(Error::MissingJoin(..)) => rep.verdict(name, "n/a (not a lattice)"),
            Err(e) => return Err(e.into()),
        }
    }
    let full = p.full_set();
    let mu = choice::argmax(&p, &full, &u)?;
    let mv = choice::argmax(&p, &full, &v)?;
    rep.verdict("argmax_u", p.format_subset(&mu));
    rep.verdict("argmax_v", p.format_subset(&mv));
    rep.verdict("argmax.ws", p.set_dominates(&mv, &mu, SetOrder::Weak)?);
    if lattice {
        rep.verdict("argmax.ss", p.set_dominates(&mv, &mu, SetOrder::Strong)?);
        rep.verdict("argmax_u.sublattice", p.is_sublattice(&mu)?);
        rep.verdict("argmax_v.sublattice", p.is_sublattice(&mv)?);
        let searches = [
            ("wmcs.sublattices", Family::Sublattices, SetOrder::Weak),
            ("wmcs.subintervals", Family::Subintervals, SetOrder::Weak),
            ("smcs.subintervals", Family::Subintervals, SetOrder::Strong),
        ];
        for (name, family, order) in searches {
            let w = choice::wmcs_witness_search(&p, &v, &u, family, order, ctx.limits.exhaustive_sublattices, u64::MAX)?;
            match w {
                None => rep.verdict(name, "holds"),
                Some(w) => {
                    rep.verdict(name, "fails");
                    rep.witness(format!(
                        "{name}: on {} the maximizers are {} under u and {} under v",
                        p.format_subset(&w.set),
                        p.format_subset(&w.argmax_u),
                        p.format_subset(&w.argmax_v)
                    ));
                }
            }
        }
        if p.len() > ctx.limits.exhaustive_sublattices {
            rep.witness(format!(
                "wmcs.sublattices: {} elements exceed the exhaustive cap of {}, so only the sets {{x, y, x∧y, x∨y}} were searched",
                p.len(),
                ctx.limits.exhaustive_sublattices
            ));
        }
    }
    let rows = (0..p.len())
        .map(|i| {
            vec![
                p.label(i).to_string(),
                u[i].to_string(),
                v[i].to_string(),
                mu.contains(i).to_string(),
                mv.contains(i).to_string(),
            ]
        })
        .collect();
    rep.table("objectives", &["element", "u", "v", "argmax_u", "argmax_v"], rows);
    Ok(())
}

// ---------------------------------------------------------------- pareto

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ProfileSpec {
    Tables(Vec<TableSpec>),
    /// The two-division loss profile at `ω`; needs a `unit_square` poset.
    TwoDivision((Rat, Rat)),
}

impl ProfileSpec {
    fn build(&self, g: &Ground) -> Result<UtilityProfile> {
        match self {
            ProfileSpec::Tables(ts) => {
                let tables = ts.iter().map(|t| t.build(&g.poset)).collect::<Result<Vec<_>>>()?;
                Ok(UtilityProfile::new(tables)?)
            }
            ProfileSpec::TwoDivision((a, b)) => {
                let coords = g
                    .coords
                    .as_ref()
                    .ok_or_else(|| schema("two_division profiles need a unit_square poset"))?;
                Ok(pareto::two_division_profile(coords, (a.0, b.0)))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DominanceName {
    SingleCrossing,
    IncreasingDifferences,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParetoPayload {
    poset: PosetSpec,
    u: ProfileSpec,
    v: Option<ProfileSpec>,
    dominance: Option<DominanceName>,
}

fn run_pareto(pl: &ParetoPayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let g = pl.poset.build(&ctx.limits)?;
    let p = &g.poset;
    let u = pl.u.build(&g)?;
    let v = pl.v.as_ref().map(|v| v.build(&g)).transpose()?;
    if v.as_ref().is_some_and(|v| v.agents() != u.agents()) {
        return Err(schema("u and v must have the same number of agents"));
    }
    let pu = pareto::pareto_set(p, &u)?;
    rep.verdict("agents", u.agents());
    rep.verdict("pareto_u", p.format_subset(&pu));
    let mut pv_set = None;
    if let Some(v) = &v {
        let pv = pareto::pareto_set(p, v)?;
        rep.verdict("pareto_v", p.format_subset(&pv));
        rep.verdict("profile.single_crossing", pareto::profile_dominates(p, ProfileDominance::SingleCrossing, v, &u)?);
        if p.is_lattice() {
            rep.verdict(
                "profile.increasing_differences",
                pareto::profile_dominates(p, ProfileDominance::IncreasingDifferences, v, &u)?,
            );
            rep.verdict("supermodular_u", pareto::supermodular_profile(p, &u)?);
            rep.verdict("supermodular_v", pareto::supermodular_profile(p, v)?);
        }
        pv_set = Some(pv);
    }
    if let Some(kind) = pl.dominance {
        let v = v.as_ref().ok_or_else(|| schema("dominance needs both u and v"))?;
        let kind = match kind {
            DominanceName::SingleCrossing => ProfileDominance::SingleCrossing,
            DominanceName::IncreasingDifferences => ProfileDominance::IncreasingDifferences,
        };
        let cmp = pareto::pareto_wmcs_check(p, v, &u, kind)?;
        rep.verdict("pareto.ws", cmp.weak);
        rep.verdict("pareto.ss", cmp.strong.map_or("n/a (not a lattice)".to_string(), |b| b.to_string()));
        rep.verdict("empirical", cmp.empirical);
        if let Some(x) = cmp.witness {
            rep.witness(format!("{} has no comparable Pareto point on the other side", p.label(x)));
        }
    }
    let rows = (0..p.len())
        .map(|i| {
            let mut row = vec![p.label(i).to_string(), pu.contains(i).to_string()];
            if let Some(pv) = &pv_set {
                row.push(pv.contains(i).to_string());
            }
            row
        })
        .collect();
    if pv_set.is_some() {
        rep.table("pareto", &["element", "pareto_u", "pareto_v"], rows);
    } else {
        rep.table("pareto", &["element", "pareto_u"], rows);
    }
    Ok(())
}

// ---------------------------------------------------------------- fixed points

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DirName {
    #[default]
    Up,
    Down,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PolicySpec {
    LeastIndex,
    GreatestIndex,
    MinimalPoint,
    MaximalPoint,
    Scripted(Vec<usize>),
}

impl PolicySpec {
    fn policy(&self) -> SelectionPolicy {
        match self {
            PolicySpec::LeastIndex => SelectionPolicy::LeastIndex,
            PolicySpec::GreatestIndex => SelectionPolicy::GreatestIndex,
            PolicySpec::MinimalPoint => SelectionPolicy::MinimalPoint,
            PolicySpec::MaximalPoint => SelectionPolicy::MaximalPoint,
            PolicySpec::Scripted(s) => SelectionPolicy::Scripted(s.clone()),
        }
    }
}

pub fn policy_name(p: &SelectionPolicy) -> String {
    match p {
        SelectionPolicy::LeastIndex => "least_index".into(),
        SelectionPolicy::GreatestIndex => "greatest_index".into(),
        SelectionPolicy::MinimalPoint => "minimal_point".into(),
        SelectionPolicy::MaximalPoint => "maximal_point".into(),
        SelectionPolicy::Scripted(s) => format!("scripted{s:?}"),
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LiftName {
    Upper,
    Lower,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixedpointPayload {
    gallery: Option<String>,
    poset: Option<PosetSpec>,
    map: Option<BTreeMap<String, Vec<String>>>,
    start: Option<String>,
    #[serde(default)]
    direction: DirName,
    policies: Option<Vec<PolicySpec>>,
    map_prime: Option<BTreeMap<String, Vec<String>>>,
    lift: Option<LiftName>,
}

fn correspondence(p: &FinitePoset, map: &BTreeMap<String, Vec<String>>) -> Result<Correspondence> {
    let images: Vec<(String, Vec<String>)> = map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    Ok(Correspondence::from_labels(p, &images)?)
}

fn run_fixedpoint(pl: &FixedpointPayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let (p, f) = match (&pl.gallery, &pl.poset, &pl.map) {
        (Some(name), None, None) => {
            let inst = fixedpoint::gallery(name)?;
            rep.witness(format!("{}: {}", inst.name, inst.description));
            for fact in fixedpoint::check_gallery(&inst)? {
                rep.check(format!("fact: {}", fact.fact), fact.expected, fact.observed);
            }
            (inst.poset, inst.map)
        }
        (None, Some(poset), Some(map)) => {
            let p = poset.build(&ctx.limits)?.poset;
            let f = correspondence(&p, map)?;
            (p, f)
        }
        _ => return Err(schema("fixedpoint payload needs either gallery or both poset and map")),
    };
    let a = fixedpoint::analyze(&p, &f)?;
    rep.verdict("uws", a.class.uws);
    rep.verdict("lws", a.class.lws);
    rep.verdict("ss", a.class.ss.map_or("n/a (not a lattice)".to_string(), |b| b.to_string()));
    rep.verdict("x_plus", p.format_subset(&fixedpoint::x_plus(&p, &f)));
    rep.verdict("x_minus", p.format_subset(&fixedpoint::x_minus(&p, &f)));
    rep.verdict("in_f_plus", a.class.in_f_plus);
    rep.verdict("in_f_minus", a.class.in_f_minus);
    rep.verdict("fixed_points", p.format_subset(&a.points));
    rep.verdict("minimal", p.format_subset(&a.minimal));
    rep.verdict("maximal", p.format_subset(&a.maximal));

    let dir = match pl.direction {
        DirName::Up => Direction::Up,
        DirName::Down => Direction::Down,
    };
    if let Some(start) = &pl.start {
        let x0 = index(&p, start)?;
        let sys = OnPoset { poset: &p, map: &f };
        let (reach, dead) = fixedpoint::reachable_fixed_points(&sys, &x0, dir)?;
        rep.verdict("reachable", p.format_subset(&p.subset(reach)));
        rep.verdict("dead_end", dead);
        let policies: Vec<SelectionPolicy> = match &pl.policies {
            Some(ps) => ps.iter().map(PolicySpec::policy).collect(),
            None => SelectionPolicy::standard().to_vec(),
        };
        let mut rows = Vec::new();
        for policy in &policies {
            let name = policy_name(policy);
            let trace = fixedpoint::iterate(&p, &f, x0, policy, dir)?;
            for (k, &x) in trace.steps.iter().enumerate() {
                rows.push(vec![name.clone(), k.to_string(), p.label(x).to_string()]);
            }
            let end = trace.fixed_point.map_or("dead end".to_string(), |x| p.label(x).to_string());
            rep.verdict(format!("walk.{name}"), end);
        }
        rep.table("traces", &["policy", "step", "point"], rows);
    } else if pl.policies.is_some() {
        return Err(schema("policies need a start point"));
    }

    if let Some(map_prime) = &pl.map_prime {
        let g = correspondence(&p, map_prime)?;
        let mode = match pl.lift.unwrap_or(LiftName::Upper) {
            LiftName::Upper => LiftMode::Upper,
            LiftName::Lower => LiftMode::Lower,
        };
        let lifts = fixedpoint::fixed_point_comparison(&p, &f, &g, mode)?;
        let fp_prime = fixedpoint::fixed_points(&p, &g);
        rep.verdict("fixed_points_prime", p.format_subset(&fp_prime));
        let order = match mode {
            LiftMode::Upper => SetOrder::Upper,
            LiftMode::Lower => SetOrder::Lower,
        };
        let name = if mode == LiftMode::Upper { "comparison.uws" } else { "comparison.lws" };
        rep.verdict(name, p.set_dominates(&fp_prime, &a.points, order)?);
        for (x, y) in lifts {
            rep.witness(format!("lift {} -> {}", p.label(x), p.label(y)));
        }
    } else if pl.lift.is_some() {
        return Err(schema("lift needs map_prime"));
    }
    Ok(())
}

// ---------------------------------------------------------------- games

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum GamePayload {
    Bertrand(BertrandPayload),
    BeautyContest(BeautyPayload),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BertrandPayload {
    grids: Vec<Vec<Rat>>,
    costs: Vec<Rat>,
    costs_prime: Option<Vec<Rat>>,
    #[serde(default)]
    profit_firm: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeautyPayload {
    n: usize,
    steps: i64,
    theta: (Rat, Rat),
    theta_prime: Option<(Rat, Rat)>,
}

fn run_game(pl: &GamePayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    match pl {
        GamePayload::Bertrand(b) => run_bertrand(b, ctx, rep),
        GamePayload::BeautyContest(b) => run_beauty(b, ctx, rep),
    }
}

fn profiles(g: &games::Game, eq: &[Vec<usize>]) -> String {
    let parts: Vec<String> = eq.iter().map(|e| g.profile_label(e)).collect();
    format!("[{}]", parts.join(", "))
}

fn run_bertrand(b: &BertrandPayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let grids: Vec<Vec<Q>> = b.grids.iter().map(|g| rats(g)).collect();
    let spec = games::pure_bertrand(grids.clone(), rats(&b.costs))?;
    match games::validate_demand(&spec) {
        Ok(d) => {
            rep.verdict("demand", "D1 and D2 hold");
            rep.witness(format!("demand conditions checked on {} and {} cases", d.d1_checked, d.d2_checked));
        }
        Err(e @ Error::DemandAxiomViolation { .. }) => rep.verdict("demand", e),
        Err(e) => return Err(e.into()),
    }
    let g = games::bertrand_build(&spec)?;
    rep.verdict("br.lws_monotone", games::bertrand_br_monotone(&spec)?);
    let class = games::classify_wsc(&g, &ctx.limits)?;
    rep.verdict("in_g_plus", class.in_g_plus);
    rep.verdict("in_g_minus", class.in_g_minus);
    let eq = games::nash_set(&g, &ctx.limits)?;
    rep.verdict("equilibria", profiles(&g, &eq));
    let mut rows = Vec::new();
    let firms = spec.firms();
    for e in &eq {
        let mut row: Vec<String> = spec.prices(e).iter().map(|q| q.to_string()).collect();
        row.extend((0..firms).map(|i| spec.profit(i, e).to_string()));
        rows.push(row);
    }
    let header: Vec<String> = (0..firms)
        .map(|i| format!("price_{i}"))
        .chain((0..firms).map(|i| format!("profit_{i}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    rep.table("equilibria", &header, rows);
    if let Some(cp) = &b.costs_prime {
        let tilde = games::pure_bertrand(grids, rats(cp))?;
        let gt = games::bertrand_build(&tilde)?;
        let cmp = games::nash_compare(&g, &gt, SetOrder::Lower, &ctx.limits)?;
        rep.verdict("equilibria_prime", profiles(&gt, &cmp.eq_prime));
        rep.verdict("comparison.lws", cmp.holds);
        for (from, to) in &cmp.lower_lifts {
            rep.witness(format!("lift {} -> {}", gt.profile_label(from), g.profile_label(to)));
        }
        let pay = games::bertrand_payoff_compare(&spec, &tilde, b.profit_firm, &ctx.limits)?;
        let fmt = |v: &[Q]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ");
        rep.verdict("profits", format!("[{}]", fmt(&pay.profits)));
        rep.verdict("profits_prime", format!("[{}]", fmt(&pay.profits_tilde)));
        rep.verdict("profit_comparison", pay.holds);
    }
    Ok(())
}

fn run_beauty(b: &BeautyPayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let spec = BeautyContestSpec {
        n: b.n,
        steps: b.steps,
        theta: (b.theta.0 .0, b.theta.1 .0),
    };
    let g = games::beauty_contest_build(&spec, &ctx.limits)?;
    let class = games::classify_wsc(&g, &ctx.limits)?;
    rep.verdict("in_g_plus", class.in_g_plus);
    rep.verdict("in_g_minus", class.in_g_minus);
    let eq = games::nash_set(&g, &ctx.limits)?;
    rep.verdict("equilibria.count", eq.len());
    let rows = eq
        .iter()
        .map(|e| e.iter().map(|&s| g.strategies(0).label(s).to_string()).collect())
        .collect();
    let header: Vec<String> = (0..b.n).map(|i| format!("firm_{i}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    rep.table("equilibria", &header, rows);
    if let Some(tp) = &b.theta_prime {
        let spec_p = BeautyContestSpec {
            theta: (tp.0 .0, tp.1 .0),
            ..spec
        };
        let gp = games::beauty_contest_build(&spec_p, &ctx.limits)?;
        let cmp = games::nash_compare(&g, &gp, SetOrder::Weak, &ctx.limits)?;
        rep.verdict("equilibria_prime.count", cmp.eq_prime.len());
        rep.verdict("equilibria_prime", profiles(&gp, &cmp.eq_prime));
        rep.verdict("comparison.ws", cmp.holds);
        rep.verdict("empirical", true);
    }
    Ok(())
}

// ---------------------------------------------------------------- matching

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DefaultName {
    Everything,
    Nothing,
    AnySingle,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    offer: Vec<String>,
    chosen: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RuleSpec {
    /// Unit demand, best first; unlisted contracts are unacceptable.
    Ranking(Vec<String>),
    Responsive {
        acceptable: Vec<String>,
        capacity: u32,
    },
    /// Ranked divisions with a joint cap given by maximal count vectors
    /// (`maxima`) or independent per-division caps (`caps`).
    Quota {
        groups: Vec<Vec<String>>,
        maxima: Option<Vec<Vec<u32>>>,
        caps: Option<Vec<u32>>,
    },
    Table {
        #[serde(default)]
        entries: Vec<TableEntry>,
        default: DefaultName,
    },
    /// `(better, worse)` pairs; `null` is the outside option.
    PartialOrder(Vec<(Option<String>, Option<String>)>),
    RejectAll,
}

fn agent_by_name(u: &ContractUniverse, name: &str) -> Result<Agent> {
    let firm = u.firms().iter().position(|f| f == name).map(Agent::Firm);
    let worker = u.workers().iter().position(|w| w == name).map(Agent::Worker);
    match (firm, worker) {
        (Some(_), Some(_)) => Err(schema(format!("{name:?} names both a firm and a worker"))),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => Err(Error::UnknownLabel(name.to_string()).into()),
    }
}

impl RuleSpec {
    fn build(&self, u: &ContractUniverse, agent: Agent) -> Result<ChoiceRule> {
        let own = u.contracts_of(agent);
        let size = own.len();
        let local = |label: &str| -> Result<usize> {
            let g = u.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            own.iter().position(|&c| c == g).ok_or_else(|| {
                schema(format!("contract {label} does not belong to {}", u.agent_name(agent)))
            })
        };
        let locals = |ls: &[String]| ls.iter().map(|l| local(l)).collect::<Result<Vec<_>>>();
        let mask = |ls: &[String]| -> Result<u64> { Ok(locals(ls)?.into_iter().fold(0, |m, i| m | 1 << i)) };
        Ok(match self {
            RuleSpec::Ranking(ls) => ChoiceRule::ranking(size, &locals(ls)?)?,
            RuleSpec::Responsive { acceptable, capacity } => {
                ChoiceRule::responsive(size, &locals(acceptable)?, *capacity)?
            }
            RuleSpec::Quota { groups, maxima, caps } => {
                let groups = groups.iter().map(|g| locals(g)).collect::<Result<Vec<_>>>()?;
                let feas = match (maxima, caps) {
                    (Some(m), None) => Feasibility::new(groups.len(), m.clone())?,
                    (None, Some(c)) => Feasibility::unconstrained(c),
                    _ => return Err(schema("quota rules take exactly one of maxima and caps")),
                };
                ChoiceRule::quota(size, groups, feas)?
            }
            RuleSpec::Table { entries, default } => {
                let mut map = BTreeMap::new();
                for e in entries {
                    let chosen = e.chosen.iter().map(|c| mask(c)).collect::<Result<Vec<_>>>()?;
                    if map.insert(mask(&e.offer)?, chosen).is_some() {
                        return Err(schema(format!("offer {{{}}} listed twice", e.offer.join(", "))));
                    }
                }
                let default = match default {
                    DefaultName::Everything => DefaultChoice::Everything,
                    DefaultName::Nothing => DefaultChoice::Nothing,
                    DefaultName::AnySingle => DefaultChoice::AnySingle,
                };
                ChoiceRule::table(size, map, default)?
            }
            RuleSpec::PartialOrder(pairs) => {
                let opt = |o: &Option<String>| o.as_deref().map(local).transpose();
                let pairs = pairs
                    .iter()
                    .map(|(a, b)| Ok((opt(a)?, opt(b)?)))
                    .collect::<Result<Vec<_>>>()?;
                ChoiceRule::partial_order(size, &pairs)?
            }
            RuleSpec::RejectAll => ChoiceRule::reject_all(size),
        })
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Modification {
    /// Agents whose rules become "reject everything".
    #[serde(default)]
    remove: Vec<String>,
    #[serde(default)]
    rules: BTreeMap<String, RuleSpec>,
}

impl Modification {
    fn apply(&self, e: &Economy) -> Result<Economy> {
        let u = e.universe();
        let mut out = e.clone();
        for name in &self.remove {
            out = out.without(agent_by_name(u, name)?)?;
        }
        for (name, spec) in &self.rules {
            let a = agent_by_name(u, name)?;
            out = out.with_rule(a, spec.build(u, a)?)?;
        }
        Ok(out)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareSpec {
    #[serde(default)]
    first: Modification,
    #[serde(default)]
    second: Modification,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatchingPayload {
    gallery: Option<String>,
    firms: Option<Vec<String>>,
    workers: Option<Vec<String>>,
    /// `[label, firm, worker]`
    contracts: Option<Vec<(String, String, String)>>,
    rules: Option<BTreeMap<String, RuleSpec>>,
    #[serde(default)]
    check: Vec<Vec<String>>,
    compare: Option<CompareSpec>,
}

fn build_economy(pl: &MatchingPayload) -> Result<Economy> {
    let (Some(firms), Some(workers), Some(contracts), Some(rules)) = (&pl.firms, &pl.workers, &pl.contracts, &pl.rules)
    else {
        return Err(schema("matching payload needs either gallery or firms, workers, contracts and rules"));
    };
    let u = ContractUniverse::from_names(firms, workers, contracts)?;
    if let Some(k) = rules.keys().find(|k| agent_by_name(&u, k).is_err()) {
        return Err(schema(format!("rule for unknown agent {k:?}")));
    }
    let rule_for = |a: Agent| -> Result<ChoiceRule> {
        let name = u.agent_name(a);
        rules
            .get(name)
            .ok_or_else(|| schema(format!("no rule for {name}")))?
            .build(&u, a)
    };
    let firm_rules = (0..firms.len()).map(|i| rule_for(Agent::Firm(i))).collect::<Result<Vec<_>>>()?;
    let worker_rules = (0..workers.len()).map(|i| rule_for(Agent::Worker(i))).collect::<Result<Vec<_>>>()?;
    Ok(Economy::new(u, firm_rules, worker_rules)?)
}

fn family(u: &ContractUniverse, sets: &[ContractSet]) -> String {
    let parts: Vec<String> = sets.iter().map(|&s| u.format(s)).collect();
    format!("[{}]", parts.join(", "))
}

const AXIOMS: [Axiom; 6] = [
    Axiom::SenAlpha,
    Axiom::SenBeta,
    Axiom::Warp,
    Axiom::Warni,
    Axiom::WeakSubstitutes,
    Axiom::StrongSubstitutes,
];

fn run_matching(pl: &MatchingPayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let e = match &pl.gallery {
        Some(name) => {
            if pl.firms.is_some() || pl.workers.is_some() || pl.contracts.is_some() || pl.rules.is_some() {
                return Err(schema("a gallery economy takes no firms, workers, contracts or rules"));
            }
            let inst = cons::gallery(name)?;
            rep.witness(format!("{}: {}", inst.name, inst.description));
            for fact in cons::check_gallery(&inst, &ctx.limits)? {
                rep.check(format!("fact: {}", fact.fact), fact.expected, fact.observed);
            }
            inst.economy
        }
        None => build_economy(pl)?,
    };
    let u = e.universe();
    rep.verdict("contracts", u.len());
    for f in 0..u.firms().len() {
        let a = Agent::Firm(f);
        for ax in AXIOMS {
            let r = audit(e.rule(a), ax, &ctx.opts)?;
            rep.verdict(format!("{}.{}", u.agent_name(a), ax.name()), r.holds);
            if !r.exhaustive {
                rep.witness(format!(
                    "{} of {}: sampled {} of {} cases",
                    ax.name(),
                    u.agent_name(a),
                    r.checked,
                    r.total
                ));
            }
            if !r.holds {
                rep.witness(format!("{} of {}: {}", ax.name(), u.agent_name(a), e.describe_witness(a, r.witness)));
            }
        }
    }
    let hyp = e.check_hypotheses(&ctx.opts);
    match &hyp {
        Ok(()) => rep.verdict("hypotheses", "hold"),
        Err(Error::Hypothesis(m)) => rep.verdict("hypotheses", format!("fail: {m}")),
        Err(other) => return Err(other.clone().into()),
    }
    let stable = e.stable_set(&ctx.limits)?;
    rep.verdict("stable_set", family(u, &stable));
    rep.verdict("stable_set.size", stable.len());
    rep.verdict("worker_optimal", family(u, &e.worker_optimal(&stable)));
    if u.len() <= ctx.limits.characterization_contracts {
        let c = cons::characterization_check(&e, &ctx.limits)?;
        rep.verdict("characterization", if c.holds() { "holds" } else { "fails" });
        let m = cons::t_monotone_check(&e, &ctx.limits)?;
        rep.verdict("t_monotone", m.upper && m.lower);
    } else {
        let msg = format!("skipped ({} contracts above the cap of {})", u.len(), ctx.limits.characterization_contracts);
        rep.verdict("characterization", &msg);
        rep.verdict("t_monotone", &msg);
    }
    if hyp.is_ok() {
        let sol = cons::stable_solve(&e, &ctx.opts)?;
        rep.verdict("solve", u.format(sol.allocation));
        rep.verdict("solve.in_stable_set", stable.contains(&sol.allocation));
        rep.verdict("solve.steps", sol.trace.steps.len());
    } else {
        rep.verdict("solve", "skipped (hypotheses fail)");
    }
    for labels in &pl.check {
        let z = u.set_of(labels)?;
        let name = u.format(z);
        rep.verdict(format!("stable {name}"), e.is_stable(z)?);
        rep.verdict(format!("alt_stable {name}"), e.is_alt_stable(z)?);
    }
    rep.table("stable_set", &["allocation"], stable.iter().map(|&z| vec![u.format(z)]).collect());
    if let Some(cmp) = &pl.compare {
        let g = cmp.first.apply(&e)?;
        let g2 = cmp.second.apply(&e)?;
        let ws = cons::matching_cs(&g, &g2, &ctx.limits, &ctx.opts)?;
        let count = |d: CsDirection| ws.iter().filter(|w| w.direction == d).count();
        rep.verdict("cs.first_stable", family(u, &g.stable_set(&ctx.limits)?));
        rep.verdict("cs.second_stable", family(u, &g2.stable_set(&ctx.limits)?));
        rep.verdict("cs.forward", count(CsDirection::Forward));
        rep.verdict("cs.backward", count(CsDirection::Backward));
        let rows = ws
            .iter()
            .map(|w| vec![format!("{:?}", w.direction).to_lowercase(), u.format(w.first), u.format(w.second)])
            .collect();
        rep.table("comparative_statics", &["direction", "first", "second"], rows);
    }
    Ok(())
}

// ---------------------------------------------------------------- constraints

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum FeasSpec {
    /// Only the hospital capacities bind.
    Unconstrained,
    /// At most this many doctors in total.
    Total(u32),
    /// Maximal feasible count vectors, one entry per hospital.
    Maxima(Vec<Vec<u32>>),
}

impl FeasSpec {
    fn build(&self, caps: &[u32]) -> Result<Feasibility> {
        Ok(match self {
            FeasSpec::Unconstrained => Feasibility::unconstrained(caps),
            FeasSpec::Total(t) => Feasibility::from_predicate(caps, |w| w.iter().sum::<u32>() <= *t)?,
            FeasSpec::Maxima(m) => Feasibility::new(caps.len(), m.clone())?,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintsPayload {
    doctors: Vec<String>,
    hospitals: Vec<String>,
    doctor_prefs: BTreeMap<String, Vec<String>>,
    hospital_prefs: BTreeMap<String, Vec<String>>,
    capacities: BTreeMap<String, u32>,
    feasibility: FeasSpec,
    relaxed: Option<FeasSpec>,
}

fn lookup(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownLabel(name.to_string()).into())
}

fn pref_lists(
    agents: &[String],
    partners: &[String],
    prefs: &BTreeMap<String, Vec<String>>,
) -> Result<Vec<Vec<usize>>> {
    if let Some(k) = prefs.keys().find(|k| !agents.contains(k)) {
        return Err(Error::UnknownLabel(k.clone()).into());
    }
    agents
        .iter()
        .map(|a| {
            prefs
                .get(a)
                .map_or(Ok(Vec::new()), |l| l.iter().map(|p| lookup(partners, p)).collect())
        })
        .collect()
}

fn matchings(m: &ConstraintsMarket, ms: &[Matching]) -> String {
    let parts: Vec<String> = ms.iter().map(|mu| m.format(mu)).collect();
    format!("[{}]", parts.join("; "))
}

fn run_constraints(pl: &ConstraintsPayload, ctx: &Ctx, rep: &mut Report) -> Result<()> {
    let caps = pl
        .hospitals
        .iter()
        .map(|h| pl.capacities.get(h).copied().ok_or_else(|| schema(format!("no capacity for {h}"))))
        .collect::<Result<Vec<_>>>()?;
    if let Some(k) = pl.capacities.keys().find(|k| !pl.hospitals.contains(k)) {
        return Err(Error::UnknownLabel(k.clone()).into());
    }
    let market = ConstraintsMarket::new(
        pl.doctors.clone(),
        pl.hospitals.clone(),
        pref_lists(&pl.doctors, &pl.hospitals, &pl.doctor_prefs)?,
        pref_lists(&pl.hospitals, &pl.doctors, &pl.hospital_prefs)?,
        caps.clone(),
        pl.feasibility.build(&caps)?,
    )?;
    let ws = cons::weakly_stable_set(&market);
    rep.verdict("weakly_stable", matchings(&market, &ws));
    rep.verdict("weakly_stable.size", ws.len());
    let bad = cons::claim_equivalence(&market, &ctx.limits)?;
    rep.verdict("claim", if bad.is_empty() { "holds".to_string() } else { format!("fails on {}", matchings(&market, &bad)) });
    let mu = cons::weak_stable_solve(&market, &ctx.opts)?;
    rep.verdict("solve", market.format(&mu));
    if let Some(relaxed) = &pl.relaxed {
        let loose = market.with_feasibility(relaxed.build(&caps)?)?;
        let ws2 = cons::weakly_stable_set(&loose);
        rep.verdict("relaxed.weakly_stable", matchings(&loose, &ws2));
        let cs = cons::constraints_cs(&market, &loose, &ctx.limits, &ctx.opts)?;
        let improves = cs
            .iter()
            .any(|w| (0..w.tight.len()).any(|d| market.doctor_prefers(d, w.loose[d], w.tight[d])));
        rep.verdict("relaxed.some_doctor_strictly_better", improves);
        let rows = cs
            .iter()
            .map(|w| vec![format!("{:?}", w.direction).to_lowercase(), market.format(&w.tight), market.format(&w.loose)])
            .collect();
        rep.table("comparative_statics", &["direction", "tight", "loose"], rows);
    }
    Ok(())
}
