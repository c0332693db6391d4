//! Fixed points of correspondences on finite posets.
//!
//! A [`Correspondence`] maps each element to a nonempty subset. [`classify`]
//! reports its monotonicity flags, [`fixed_points`] scans for `x ∈ F(x)`,
//! [`iterate`] climbs (or descends) through comparable image points until it
//! lands on a fixed point, and [`cs_lift`] turns a fixed point of one
//! correspondence into a comparable fixed point of a dominating one.
//!
//! Iteration is written against [`OrderedCorrespondence`] so that the
//! strategy-profile and availability-pair correspondences of the game and
//! matching modules reuse it without materializing their (large) posets.

use std::collections::BTreeSet;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::order::{FinitePoset, SetOrder, Subset};

/// A set-valued self-map together with the order of its domain.
pub trait OrderedCorrespondence {
    type Point: Clone + Eq + Ord + Debug;

    fn point_leq(&self, a: &Self::Point, b: &Self::Point) -> bool;

    /// Image of `x`, in a fixed canonical order.
    fn image(&self, x: &Self::Point) -> Vec<Self::Point>;

    fn describe(&self, x: &Self::Point) -> String {
        format!("{x:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// How the next point is picked among the comparable image points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SelectionPolicy {
    LeastIndex,
    GreatestIndex,
    /// First candidate not above another candidate.
    MinimalPoint,
    /// First candidate not below another candidate.
    MaximalPoint,
    /// Positions into the canonical candidate list, one per step; once the
    /// script runs out the first candidate is taken.
    Scripted(Vec<usize>),
}

impl SelectionPolicy {
    pub fn standard() -> [SelectionPolicy; 4] {
        [
            SelectionPolicy::LeastIndex,
            SelectionPolicy::GreatestIndex,
            SelectionPolicy::MinimalPoint,
            SelectionPolicy::MaximalPoint,
        ]
    }
}

/// Points visited by an iteration. `fixed_point` is `None` when the last
/// point has no comparable image point and is not fixed (a dead end).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace<P> {
    pub steps: Vec<P>,
    pub fixed_point: Option<P>,
}

fn comparable<C: OrderedCorrespondence>(sys: &C, from: &C::Point, to: &C::Point, dir: Direction) -> bool {
    match dir {
        Direction::Up => sys.point_leq(from, to),
        Direction::Down => sys.point_leq(to, from),
    }
}

fn select<C: OrderedCorrespondence>(
    sys: &C,
    candidates: &[C::Point],
    policy: &SelectionPolicy,
    step: usize,
) -> Result<usize> {
    let below = |a: &C::Point, b: &C::Point| a != b && sys.point_leq(a, b);
    Ok(match policy {
        SelectionPolicy::LeastIndex => 0,
        SelectionPolicy::GreatestIndex => candidates.len() - 1,
        SelectionPolicy::MinimalPoint => candidates
            .iter()
            .position(|c| !candidates.iter().any(|d| below(d, c)))
            .expect("finite sets have minimal points"),
        SelectionPolicy::MaximalPoint => candidates
            .iter()
            .position(|c| !candidates.iter().any(|d| below(c, d)))
            .expect("finite sets have maximal points"),
        SelectionPolicy::Scripted(script) => match script.get(step) {
            None => 0,
            Some(&k) if k < candidates.len() => k,
            Some(&k) => {
                return Err(Error::Invalid(format!(
                    "scripted choice {k} at step {step} but only {} candidates",
                    candidates.len()
                )))
            }
        },
    })
}

/// Moves from `x0` to a comparable image point until the current point lies
/// in its own image. Each move is strict, so the walk ends on a finite domain.
pub fn iterate_system<C: OrderedCorrespondence>(
    sys: &C,
    x0: &C::Point,
    policy: &SelectionPolicy,
    dir: Direction,
) -> Result<Trace<C::Point>> {
    let first = sys.image(x0);
    if !first.iter().any(|y| comparable(sys, x0, y, dir)) {
        return Err(Error::NotInXPlus(sys.describe(x0)));
    }
    let mut steps = vec![x0.clone()];
    loop {
        let x = steps.last().unwrap().clone();
        let img = sys.image(&x);
        if img.contains(&x) {
            return Ok(Trace {
                steps,
                fixed_point: Some(x),
            });
        }
        let candidates: Vec<C::Point> = img.into_iter().filter(|y| comparable(sys, &x, y, dir)).collect();
        if candidates.is_empty() {
            return Ok(Trace {
                steps,
                fixed_point: None,
            });
        }
        let k = select(sys, &candidates, policy, steps.len() - 1)?;
        steps.push(candidates[k].clone());
    }
}

/// Every fixed point some selection rule reaches from `x0`, plus whether
/// some selection runs into a dead end.
pub fn reachable_fixed_points<C: OrderedCorrespondence>(
    sys: &C,
    x0: &C::Point,
    dir: Direction,
) -> Result<(BTreeSet<C::Point>, bool)> {
    if !sys.image(x0).iter().any(|y| comparable(sys, x0, y, dir)) {
        return Err(Error::NotInXPlus(sys.describe(x0)));
    }
    let mut seen = BTreeSet::new();
    let mut found = BTreeSet::new();
    let mut dead_end = false;
    let mut stack = vec![x0.clone()];
    while let Some(x) = stack.pop() {
        if !seen.insert(x.clone()) {
            continue;
        }
        let img = sys.image(&x);
        if img.contains(&x) {
            found.insert(x);
            continue;
        }
        let before = stack.len();
        stack.extend(img.into_iter().filter(|y| comparable(sys, &x, y, dir)));
        dead_end |= stack.len() == before;
    }
    Ok((found, dead_end))
}

/// Runs the least-index walk from `x_star` and insists it ends on a fixed point.
pub fn lift_system<C: OrderedCorrespondence>(sys: &C, x_star: &C::Point, dir: Direction) -> Result<C::Point> {
    let trace = iterate_system(sys, x_star, &SelectionPolicy::LeastIndex, dir)?;
    trace.fixed_point.ok_or_else(|| {
        Error::TheoremViolation(format!(
            "walk from {} stalls at {}",
            sys.describe(x_star),
            sys.describe(trace.steps.last().unwrap())
        ))
    })
}

/// Nonempty-valued self-map on the elements of one poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    images: Vec<Subset>,
}

impl Correspondence {
    pub fn new(p: &FinitePoset, images: Vec<Subset>) -> Result<Self> {
        if images.len() != p.len() {
            return Err(Error::Invalid(format!(
                "{} images for {} elements",
                images.len(),
                p.len()
            )));
        }
        if let Some(x) = images.iter().position(Subset::is_empty) {
            return Err(Error::Invalid(format!("image of {} is empty", p.label(x))));
        }
        Ok(Correspondence { images })
    }

    pub fn from_fn(p: &FinitePoset, f: impl Fn(usize) -> Subset) -> Result<Self> {
        Self::new(p, (0..p.len()).map(f).collect())
    }

    /// Builds images from label lists; unlisted elements are an error.
    pub fn from_labels<S: AsRef<str>>(p: &FinitePoset, images: &[(S, Vec<S>)]) -> Result<Self> {
        let mut out = vec![None; p.len()];
        for (x, ys) in images {
            let i = p
                .index_of(x.as_ref())
                .ok_or_else(|| Error::UnknownLabel(x.as_ref().to_string()))?;
            out[i] = Some(p.subset_of_labels(ys)?);
        }
        let images = out
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Error::Invalid(format!("no image for {}", p.label(i)))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, images)
    }

    pub fn identity(p: &FinitePoset) -> Self {
        Correspondence {
            images: (0..p.len()).map(|i| Subset::singleton(p.len(), i)).collect(),
        }
    }

    pub fn constant(p: &FinitePoset, s: &Subset) -> Result<Self> {
        Self::new(p, vec![s.clone(); p.len()])
    }

    pub fn image(&self, x: usize) -> &Subset {
        &self.images[x]
    }

    pub fn images(&self) -> &[Subset] {
        &self.images
    }
}

/// A correspondence viewed through the [`OrderedCorrespondence`] interface.
pub struct OnPoset<'a> {
    pub poset: &'a FinitePoset,
    pub map: &'a Correspondence,
}

impl OrderedCorrespondence for OnPoset<'_> {
    type Point = usize;

    fn point_leq(&self, a: &usize, b: &usize) -> bool {
        self.poset.leq(*a, *b)
    }

    fn image(&self, x: &usize) -> Vec<usize> {
        self.map.image(*x).to_vec()
    }

    fn describe(&self, x: &usize) -> String {
        self.poset.label(*x).to_string()
    }
}

/// Monotonicity flags of a correspondence. `ss` is `None` on non-lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneClass {
    pub uws: bool,
    pub lws: bool,
    pub ss: Option<bool>,
    pub x_plus_nonempty: bool,
    pub x_minus_nonempty: bool,
    pub in_f_plus: bool,
    pub in_f_minus: bool,
}

/// `X₊ = {x : some y ≥ x lies in F(x)}`
pub fn x_plus(p: &FinitePoset, f: &Correspondence) -> Subset {
    p.subset((0..p.len()).filter(|&x| f.image(x).meets(&p.up_set(x))))
}

/// `X₋ = {x : some y ≤ x lies in F(x)}`
pub fn x_minus(p: &FinitePoset, f: &Correspondence) -> Subset {
    p.subset((0..p.len()).filter(|&x| f.image(x).meets(&p.down_set(x))))
}

/// Whether `F(b)` dominates `F(a)` in `order` for every `a ≤ b`.
pub fn monotone_in(p: &FinitePoset, f: &Correspondence, order: SetOrder) -> Result<bool> {
    for a in 0..p.len() {
        for b in p.up_set(a).iter() {
            if !p.set_dominates(f.image(b), f.image(a), order)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn classify(p: &FinitePoset, f: &Correspondence) -> MonotoneClass {
    let uws = monotone_in(p, f, SetOrder::Upper).expect("no joins needed");
    let lws = monotone_in(p, f, SetOrder::Lower).expect("no joins needed");
    let ss = p
        .is_lattice()
        .then(|| monotone_in(p, f, SetOrder::Strong).expect("lattice"));
    let x_plus_nonempty = !x_plus(p, f).is_empty();
    let x_minus_nonempty = !x_minus(p, f).is_empty();
    MonotoneClass {
        uws,
        lws,
        ss,
        x_plus_nonempty,
        x_minus_nonempty,
        in_f_plus: uws && x_plus_nonempty,
        in_f_minus: lws && x_minus_nonempty,
    }
}

/// `Fp(F) = {x : x ∈ F(x)}`
pub fn fixed_points(p: &FinitePoset, f: &Correspondence) -> Subset {
    p.subset((0..p.len()).filter(|&x| f.image(x).contains(x)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointAnalysis {
    pub class: MonotoneClass,
    pub points: Subset,
    pub maximal: Subset,
    pub minimal: Subset,
}

/// Fixed points with their extremal elements. A monotone correspondence
/// without fixed points is reported as a [`Error::TheoremViolation`].
pub fn analyze(p: &FinitePoset, f: &Correspondence) -> Result<FixedPointAnalysis> {
    let class = classify(p, f);
    let points = fixed_points(p, f);
    if (class.in_f_plus || class.in_f_minus) && points.is_empty() {
        return Err(Error::TheoremViolation(
            "monotone correspondence without fixed points".into(),
        ));
    }
    Ok(FixedPointAnalysis {
        maximal: p.maximal_points(&points),
        minimal: p.minimal_points(&points),
        class,
        points,
    })
}

/// Walk from `x0`; fails with [`Error::NotInXPlus`] if no image point of
/// `x0` is comparable in the walking direction, and with
/// [`Error::TheoremViolation`] if a correspondence classified as monotone in
/// that direction stalls.
pub fn iterate(
    p: &FinitePoset,
    f: &Correspondence,
    x0: usize,
    policy: &SelectionPolicy,
    dir: Direction,
) -> Result<Trace<usize>> {
    let trace = iterate_system(&OnPoset { poset: p, map: f }, &x0, policy, dir)?;
    if trace.fixed_point.is_none() {
        let class = classify(p, f);
        let monotone = match dir {
            Direction::Up => class.uws,
            Direction::Down => class.lws,
        };
        if monotone {
            return Err(Error::TheoremViolation(format!(
                "monotone walk stalls at {}",
                p.label(*trace.steps.last().unwrap())
            )));
        }
    }
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiftMode {
    Upper,
    Lower,
}

/// Comparable fixed point of the other correspondence.
///
/// `Upper`: `x_star` is a fixed point of `f`, `f_prime` is upper monotone and
/// `f_prime(x) ≥uws f(x)` everywhere; returns a fixed point of `f_prime`
/// above `x_star`. `Lower`: `x_star` is a fixed point of `f_prime`, `f` is
/// lower monotone and `f_prime(x) ≥lws f(x)` everywhere; returns a fixed
/// point of `f` below `x_star`.
pub fn cs_lift(
    p: &FinitePoset,
    f: &Correspondence,
    f_prime: &Correspondence,
    x_star: usize,
    mode: LiftMode,
) -> Result<usize> {
    check_lift(p, f, f_prime, mode)?;
    let (source, target, order, dir) = match mode {
        LiftMode::Upper => (f, f_prime, SetOrder::Upper, Direction::Up),
        LiftMode::Lower => (f_prime, f, SetOrder::Lower, Direction::Down),
    };
    if !source.image(x_star).contains(x_star) {
        return Err(Error::Hypothesis(format!("{} is not a fixed point", p.label(x_star))));
    }
    debug_assert!(p.set_dominates(f_prime.image(x_star), f.image(x_star), order)?);
    lift_system(&OnPoset { poset: p, map: target }, &x_star, dir)
}

fn check_lift(p: &FinitePoset, f: &Correspondence, f_prime: &Correspondence, mode: LiftMode) -> Result<()> {
    let (order, class_ok) = match mode {
        LiftMode::Upper => (SetOrder::Upper, classify(p, f_prime).in_f_plus),
        LiftMode::Lower => (SetOrder::Lower, classify(p, f).in_f_minus),
    };
    if !class_ok {
        return Err(Error::Hypothesis(match mode {
            LiftMode::Upper => "the dominating correspondence is not upper monotone".into(),
            LiftMode::Lower => "the dominated correspondence is not lower monotone".into(),
        }));
    }
    for x in 0..p.len() {
        if !p.set_dominates(f_prime.image(x), f.image(x), order)? {
            return Err(Error::Hypothesis(format!("images are not ordered at {}", p.label(x))));
        }
    }
    Ok(())
}

/// Lifts every fixed point across and reports whether the fixed-point sets
/// are ordered: `Fp(f_prime) ≥uws Fp(f)` (upper) or `≥lws` (lower).
pub fn fixed_point_comparison(
    p: &FinitePoset,
    f: &Correspondence,
    f_prime: &Correspondence,
    mode: LiftMode,
) -> Result<Vec<(usize, usize)>> {
    let sources = match mode {
        LiftMode::Upper => fixed_points(p, f),
        LiftMode::Lower => fixed_points(p, f_prime),
    };
    if sources.is_empty() {
        return Err(Error::Hypothesis("no fixed point to lift".into()));
    }
    sources
        .iter()
        .map(|x| Ok((x, cs_lift(p, f, f_prime, x, mode)?)))
        .collect()
}

pub const GALLERY_NAMES: [&str; 5] = [
    "swap-no-xplus",
    "three-point-no-uws",
    "lws-no-minimal-discrete-analogue",
    "figure2",
    "figure3-supp",
];

/// A walk whose possible end points are stated in advance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationFact {
    pub start: String,
    pub direction: Direction,
    /// Fixed points reachable under some selection; no selection dead-ends.
    pub reachable: Vec<String>,
    /// Policies and the fixed point each one ends on.
    pub policy_ends: Vec<(SelectionPolicy, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedFacts {
    pub fixed_points: Vec<String>,
    pub minimal: Vec<String>,
    pub maximal: Vec<String>,
    pub uws: bool,
    pub lws: bool,
    pub x_plus_nonempty: bool,
    pub x_minus_nonempty: bool,
    pub iteration: Option<IterationFact>,
}

#[derive(Clone, Debug)]
pub struct GalleryInstance {
    pub name: String,
    pub description: String,
    pub poset: FinitePoset,
    pub map: Correspondence,
    pub expected: ExpectedFacts,
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// One of the named instances in [`GALLERY_NAMES`].
pub fn gallery(name: &str) -> Result<GalleryInstance> {
    let pairs = |xs: &[(&str, &[&str])]| -> Vec<(String, Vec<String>)> {
        xs.iter().map(|(x, ys)| (x.to_string(), strings(ys))).collect()
    };
    let (description, poset, images, expected) = match name {
        "swap-no-xplus" => (
            "two incomparable points mapped onto each other: no point can move up",
            FinitePoset::from_relation(strings(&["(0,1)", "(1,0)"]), [])?,
            pairs(&[("(0,1)", &["(1,0)"]), ("(1,0)", &["(0,1)"])]),
            ExpectedFacts {
                fixed_points: vec![],
                minimal: vec![],
                maximal: vec![],
                uws: true,
                lws: true,
                x_plus_nonempty: false,
                x_minus_nonempty: false,
                iteration: None,
            },
        ),
        "three-point-no-uws" => (
            "bottom point with two incomparable successors that point at each other",
            FinitePoset::from_label_pairs(
                strings(&["(0,0)", "(0,1)", "(1,0)"]),
                &[("(0,0)", "(0,1)"), ("(0,0)", "(1,0)")],
            )?,
            pairs(&[
                ("(0,0)", &["(0,1)", "(1,0)"]),
                ("(0,1)", &["(1,0)"]),
                ("(1,0)", &["(0,1)"]),
            ]),
            ExpectedFacts {
                fixed_points: vec![],
                minimal: vec![],
                maximal: vec![],
                uws: false,
                lws: true,
                x_plus_nonempty: true,
                x_minus_nonempty: false,
                iteration: None,
            },
        ),
        "lws-no-minimal-discrete-analogue" => {
            let chain = strings(&["0", "1/4", "1/2", "3/4", "1"]);
            let images = vec![
                ("0".to_string(), strings(&["1/2", "3/4", "1"])),
                ("1/4".to_string(), strings(&["1/4", "1/2", "3/4", "1"])),
                ("1/2".to_string(), strings(&["1/2", "3/4", "1"])),
                ("3/4".to_string(), strings(&["3/4", "1"])),
                ("1".to_string(), strings(&["1"])),
            ];
            (
                "F(x) = [x, 1] for x > 0 and F(0) = [1/2, 1] on a five-point chain: upper but not lower monotone, yet a least fixed point exists",
                FinitePoset::chain_of(chain)?,
                images,
                ExpectedFacts {
                    fixed_points: strings(&["1/4", "1/2", "3/4", "1"]),
                    minimal: strings(&["1/4"]),
                    maximal: strings(&["1"]),
                    uws: true,
                    lws: false,
                    x_plus_nonempty: true,
                    x_minus_nonempty: true,
                    iteration: Some(IterationFact {
                        start: "0".into(),
                        direction: Direction::Up,
                        reachable: strings(&["1/2", "3/4", "1"]),
                        policy_ends: vec![
                            (SelectionPolicy::LeastIndex, "1/2".into()),
                            (SelectionPolicy::GreatestIndex, "1".into()),
                        ],
                    }),
                },
            )
        }
        "figure2" => (
            "correspondence on {1,2,3}×{1,2} whose least fixed point (2,2) no upward walk from (1,1) reaches",
            FinitePoset::grid(&[strings(&["1", "2", "3"]), strings(&["1", "2"])], 64)?,
            pairs(&[
                ("(1,1)", &["(1,2)", "(2,1)"]),
                ("(2,1)", &["(1,2)", "(3,2)"]),
                ("(1,2)", &["(2,1)", "(3,2)"]),
                ("(2,2)", &["(2,2)", "(3,2)"]),
                ("(3,1)", &["(3,2)"]),
                ("(3,2)", &["(3,2)"]),
            ]),
            ExpectedFacts {
                fixed_points: strings(&["(2,2)", "(3,2)"]),
                minimal: strings(&["(2,2)"]),
                maximal: strings(&["(3,2)"]),
                uws: true,
                lws: true,
                x_plus_nonempty: true,
                x_minus_nonempty: true,
                iteration: Some(IterationFact {
                    start: "(1,1)".into(),
                    direction: Direction::Up,
                    reachable: strings(&["(3,2)"]),
                    policy_ends: SelectionPolicy::standard()
                        .into_iter()
                        .map(|p| (p, "(3,2)".to_string()))
                        .collect(),
                }),
            },
        ),
        "figure3-supp" => (
            "correspondence on {1,2}² where the walk from (1,1) ends on either fixed point depending on the selection",
            FinitePoset::grid(&[strings(&["1", "2"]), strings(&["1", "2"])], 64)?,
            pairs(&[
                ("(1,1)", &["(1,2)", "(2,1)"]),
                ("(2,1)", &["(2,1)", "(2,2)"]),
                ("(1,2)", &["(2,2)"]),
                ("(2,2)", &["(2,2)"]),
            ]),
            ExpectedFacts {
                fixed_points: strings(&["(2,1)", "(2,2)"]),
                minimal: strings(&["(2,1)"]),
                maximal: strings(&["(2,2)"]),
                uws: true,
                lws: true,
                x_plus_nonempty: true,
                x_minus_nonempty: true,
                iteration: Some(IterationFact {
                    start: "(1,1)".into(),
                    direction: Direction::Up,
                    reachable: strings(&["(2,1)", "(2,2)"]),
                    policy_ends: vec![
                        (SelectionPolicy::MinimalPoint, "(2,2)".into()),
                        (SelectionPolicy::Scripted(vec![0, 0]), "(2,2)".into()),
                        (SelectionPolicy::Scripted(vec![1]), "(2,1)".into()),
                    ],
                }),
            },
        ),
        other => return Err(Error::UnknownGalleryName(other.to_string())),
    };
    let map = Correspondence::from_labels(&poset, &images)?;
    Ok(GalleryInstance {
        name: name.to_string(),
        description: description.to_string(),
        poset,
        map,
        expected,
    })
}

/// One checked statement about a gallery instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactCheck {
    pub fact: String,
    pub expected: String,
    pub observed: String,
}

impl FactCheck {
    pub fn holds(&self) -> bool {
        self.expected == self.observed
    }
}

/// Recomputes every expected fact of a gallery instance.
pub fn check_gallery(inst: &GalleryInstance) -> Result<Vec<FactCheck>> {
    let p = &inst.poset;
    let f = &inst.map;
    let e = &inst.expected;
    let class = classify(p, f);
    let fp = fixed_points(p, f);
    let labels = |s: &Subset| s.iter().map(|i| p.label(i).to_string()).collect::<Vec<_>>();
    let mut out = Vec::new();
    let mut fact = |name: &str, expected: String, observed: String| {
        out.push(FactCheck {
            fact: name.to_string(),
            expected,
            observed,
        })
    };
    fact("fixed points", format!("{:?}", e.fixed_points), format!("{:?}", labels(&fp)));
    fact("minimal fixed points", format!("{:?}", e.minimal), format!("{:?}", labels(&p.minimal_points(&fp))));
    fact("maximal fixed points", format!("{:?}", e.maximal), format!("{:?}", labels(&p.maximal_points(&fp))));
    fact("upper weak set monotone", e.uws.to_string(), class.uws.to_string());
    fact("lower weak set monotone", e.lws.to_string(), class.lws.to_string());
    fact("X+ nonempty", e.x_plus_nonempty.to_string(), class.x_plus_nonempty.to_string());
    fact("X- nonempty", e.x_minus_nonempty.to_string(), class.x_minus_nonempty.to_string());
    if let Some(it) = &e.iteration {
        let start = p
            .index_of(&it.start)
            .ok_or_else(|| Error::UnknownLabel(it.start.clone()))?;
        let sys = OnPoset { poset: p, map: f };
        let (reach, dead) = reachable_fixed_points(&sys, &start, it.direction)?;
        let reach: Vec<String> = reach.iter().map(|&i| p.label(i).to_string()).collect();
        fact(
            &format!("fixed points reachable from {}", it.start),
            format!("{:?}", it.reachable),
            format!("{reach:?}"),
        );
        fact("some walk dead-ends", false.to_string(), dead.to_string());
        for (policy, end) in &it.policy_ends {
            let trace = iterate(p, f, start, policy, it.direction)?;
            let observed = trace.fixed_point.map_or("dead end".to_string(), |x| p.label(x).to_string());
            fact(&format!("walk from {} under {policy:?}", it.start), end.clone(), observed);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, Closure};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_everything_fixed() {
        let p = FinitePoset::chain(4);
        let f = Correspondence::identity(&p);
        assert_eq!(x_plus(&p, &f), p.full_set());
        assert_eq!(x_minus(&p, &f), p.full_set());
        assert_eq!(fixed_points(&p, &f), p.full_set());
        let t = iterate(&p, &f, 2, &SelectionPolicy::LeastIndex, Direction::Up).unwrap();
        assert_eq!(t.steps, vec![2]);
        assert_eq!(t.fixed_point, Some(2));
    }

    #[test]
    fn constant_map_is_monotone() {
        let p = FinitePoset::chain(2).product(&FinitePoset::chain(2), 64).unwrap();
        let f = Correspondence::constant(&p, &p.subset([1, 2])).unwrap();
        let c = classify(&p, &f);
        assert!(c.uws && c.lws);
        assert_eq!(c.ss, Some(false));
    }

    #[test]
    fn every_gallery_instance_matches() {
        for name in GALLERY_NAMES {
            let inst = gallery(name).unwrap();
            for check in check_gallery(&inst).unwrap() {
                assert!(check.holds(), "{name}: {check:?}");
            }
        }
        assert!(matches!(gallery("nope"), Err(Error::UnknownGalleryName(_))));
    }

    #[test]
    fn walk_from_outside_x_plus_is_rejected() {
        let inst = gallery("swap-no-xplus").unwrap();
        let err = iterate(&inst.poset, &inst.map, 0, &SelectionPolicy::LeastIndex, Direction::Up).unwrap_err();
        assert!(matches!(err, Error::NotInXPlus(_)));
    }

    #[test]
    fn non_monotone_walk_reports_dead_end() {
        let inst = gallery("three-point-no-uws").unwrap();
        let t = iterate(&inst.poset, &inst.map, 0, &SelectionPolicy::LeastIndex, Direction::Up).unwrap();
        assert_eq!(t.steps, vec![0, 1]);
        assert_eq!(t.fixed_point, None);
    }

    #[test]
    fn lifting_the_least_fixed_point_of_the_upward_walk_instance() {
        let inst = gallery("figure2").unwrap();
        let p = &inst.poset;
        let top = p.index_of("(3,2)").unwrap();
        let shifted = Correspondence::constant(p, &p.subset([top])).unwrap();
        let low = p.index_of("(2,2)").unwrap();
        assert_eq!(cs_lift(p, &inst.map, &shifted, low, LiftMode::Upper).unwrap(), top);
        assert_eq!(cs_lift(p, &inst.map, &inst.map, low, LiftMode::Upper).unwrap(), low);
        let err = cs_lift(p, &inst.map, &shifted, 0, LiftMode::Upper).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn existence_on_random_monotone_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tested = 0;
        while tested < 200 {
            let n = 1 + rand::Rng::gen_range(&mut rng, 0..10);
            let p = gen::random_poset(&mut rng, n, 0.3);
            let closure = if tested % 2 == 0 { Closure::Up } else { Closure::Down };
            let f = gen::random_correspondence(&mut rng, &p, closure);
            let a = analyze(&p, &f).unwrap();
            if !(a.class.in_f_plus || a.class.in_f_minus) {
                continue;
            }
            tested += 1;
            assert!(!a.points.is_empty());
            if a.class.in_f_plus {
                for x in x_plus(&p, &f).iter() {
                    let t = iterate(&p, &f, x, &SelectionPolicy::LeastIndex, Direction::Up).unwrap();
                    assert!(t.fixed_point.is_some());
                    assert!(t.steps.windows(2).all(|w| p.lt(w[0], w[1])));
                }
            }
            if let Some(true) = a.class.ss {
                assert!(a.class.uws && a.class.lws);
            }
        }
    }

    proptest! {
        #[test]
        fn upper_lift_reaches_above(seed in any::<u64>(), n in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = gen::random_poset(&mut rng, n, 0.35);
            let f = gen::random_correspondence(&mut rng, &p, Closure::None);
            let fp = fixed_points(&p, &f);
            prop_assume!(!fp.is_empty());
            let g = gen::raise_upper(&mut rng, &p, &f);
            prop_assume!(classify(&p, &g).in_f_plus);
            let gp = fixed_points(&p, &g);
            prop_assert!(p.set_dominates(&gp, &fp, SetOrder::Upper).unwrap());
            for (x, y) in fixed_point_comparison(&p, &f, &g, LiftMode::Upper).unwrap() {
                prop_assert!(p.leq(x, y) && gp.contains(y));
            }
        }

        #[test]
        fn lower_lift_reaches_below(seed in any::<u64>(), n in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = gen::random_poset(&mut rng, n, 0.35);
            let f = gen::random_correspondence(&mut rng, &p, Closure::Down);
            prop_assume!(classify(&p, &f).in_f_minus);
            let g = gen::raise_lower(&mut rng, &p, &f);
            let gp = fixed_points(&p, &g);
            prop_assume!(!gp.is_empty());
            let fp = fixed_points(&p, &f);
            prop_assert!(p.set_dominates(&gp, &fp, SetOrder::Lower).unwrap());
            for (y, x) in fixed_point_comparison(&p, &f, &g, LiftMode::Lower).unwrap() {
                prop_assert!(p.leq(x, y) && fp.contains(x));
            }
        }

        #[test]
        fn reachable_set_covers_every_policy(seed in any::<u64>(), n in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = gen::random_poset(&mut rng, n, 0.35);
            let f = gen::random_correspondence(&mut rng, &p, Closure::Up);
            let sys = OnPoset { poset: &p, map: &f };
            for x in x_plus(&p, &f).iter() {
                let (reach, _) = reachable_fixed_points(&sys, &x, Direction::Up).unwrap();
                for policy in SelectionPolicy::standard() {
                    if let Some(end) = iterate_system(&sys, &x, &policy, Direction::Up).unwrap().fixed_point {
                        prop_assert!(reach.contains(&end));
                    }
                }
            }
        }
    }
}
