//! Finite partially ordered sets, lattice operations and the set orders built
//! on top of them.
//!
//! A [`FinitePoset`] keeps, for every element, the bitset of elements above it
//! and the bitset of elements below it, so a comparison is one bit lookup.
//! [`Subset`] is a bitset over the element indices of one poset; every other
//! module refers to elements by these indices.

use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A set of element indices of one poset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(FixedBitSet);

impl Subset {
    pub fn empty(n: usize) -> Self {
        Subset(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Subset(bits)
    }

    pub fn singleton(n: usize, i: usize) -> Self {
        let mut s = Subset::empty(n);
        s.insert(i);
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Subset::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds the subset whose members are the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Subset::from_indices(n, (0..n.min(64)).filter(|i| mask >> i & 1 == 1))
    }

    /// Size of the ground set this subset lives in.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false);
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut bits = self.0.clone();
        bits.union_with(&other.0);
        Subset(bits)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut bits = self.0.clone();
        bits.intersect_with(&other.0);
        Subset(bits)
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut bits = self.0.clone();
        bits.difference_with(&other.0);
        Subset(bits)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn meets(&self, other: &Subset) -> bool {
        !self.0.is_disjoint(&other.0)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The four set orders compared by [`FinitePoset::set_dominates`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetOrder {
    Upper,
    Lower,
    Weak,
    Strong,
}

/// Outcome of comparing two sets in every set order, together with the three
/// structural properties whose conjunction characterizes the strong set order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetOrderReport {
    pub uws: bool,
    pub lws: bool,
    pub ws: bool,
    pub ss: bool,
    pub union_sublattice: bool,
    pub sandwich: bool,
}

struct Bounds {
    join: Vec<Option<usize>>,
    meet: Vec<Option<usize>>,
}

/// A finite partial order stored as its full comparison matrix.
#[derive(Clone)]
pub struct FinitePoset {
    labels: Vec<String>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    bounds: OnceLock<std::sync::Arc<Bounds>>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinitePoset")
            .field("labels", &self.labels)
            .finish_non_exhaustive()
    }
}

impl FinitePoset {
    /// Builds the reflexive-transitive closure of the given `a ≤ b` facts.
    pub fn from_relation(
        labels: Vec<String>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        check_labels(&labels)?;
        let n = labels.len();
        let mut up: Vec<FixedBitSet> = (0..n)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert(i);
                row
            })
            .collect();
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("pair ({a}, {b}) out of range")));
            }
            up[a].insert(b);
        }
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for a in 0..n {
            for b in up[a].ones() {
                if b != a && up[b].contains(a) {
                    return Err(Error::Cycle(labels[a].clone(), labels[b].clone()));
                }
            }
        }
        Ok(Self::from_up_rows(labels, up))
    }

    /// Same as [`from_relation`](Self::from_relation) with facts given by label.
    pub fn from_label_pairs<S: AsRef<str>>(labels: Vec<String>, pairs: &[(S, S)]) -> Result<Self> {
        let lookup = |s: &str| {
            labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::UnknownLabel(s.to_string()))
        };
        let idx = pairs
            .iter()
            .map(|(a, b)| Ok((lookup(a.as_ref())?, lookup(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_relation(labels, idx)
    }

    /// Closure of the relation `leq(i, j)`.
    pub fn from_leq_fn(labels: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = labels.len();
        let pairs: Vec<_> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && leq(i, j))
            .collect();
        Self::from_relation(labels, pairs)
    }

    /// Total order in the given label order.
    pub fn chain_of(labels: Vec<String>) -> Result<Self> {
        check_labels(&labels)?;
        let n = labels.len();
        let up = (0..n)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert_range(i..);
                row
            })
            .collect();
        Ok(Self::from_up_rows(labels, up))
    }

    /// Chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        Self::chain_of((0..n).map(|i| i.to_string()).collect()).expect("distinct labels")
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relation((0..n).map(|i| i.to_string()).collect(), []).expect("no relations")
    }

    /// Product order on pairs; element `(a, b)` has index `a * |q| + b`.
    pub fn product(&self, other: &FinitePoset, cap: usize) -> Result<Self> {
        let (n, m) = (self.len(), other.len());
        let size = n.saturating_mul(m);
        if size > cap {
            return Err(Error::SizeLimit {
                what: "product poset".into(),
                size,
                cap,
            });
        }
        let labels = (0..size)
            .map(|k| format!("({},{})", self.labels[k / m], other.labels[k % m]))
            .collect();
        let up = (0..size)
            .map(|k| {
                let mut row = FixedBitSet::with_capacity(size);
                for a in self.up[k / m].ones() {
                    for b in other.up[k % m].ones() {
                        row.insert(a * m + b);
                    }
                }
                row
            })
            .collect();
        Ok(Self::from_up_rows(labels, up))
    }

    /// Product of chains. Axis `0` is the most significant digit of the index
    /// and labels read `(a,b,…)`; a single axis yields a plain chain.
    pub fn grid(axes: &[Vec<String>], cap: usize) -> Result<Self> {
        if axes.len() == 1 {
            return Self::chain_of(axes[0].clone());
        }
        let size = axes.iter().fold(1usize, |acc, a| acc.saturating_mul(a.len()));
        if size > cap {
            return Err(Error::SizeLimit {
                what: "grid".into(),
                size,
                cap,
            });
        }
        let coords: Vec<Vec<usize>> = (0..size).map(|k| mixed_radix(k, axes)).collect();
        let labels = coords
            .iter()
            .map(|c| {
                let parts: Vec<&str> = c.iter().zip(axes).map(|(&i, a)| a[i].as_str()).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let up = coords
            .iter()
            .map(|c| {
                let mut row = FixedBitSet::with_capacity(size);
                for (k, d) in coords.iter().enumerate() {
                    if c.iter().zip(d).all(|(a, b)| a <= b) {
                        row.insert(k);
                    }
                }
                row
            })
            .collect();
        Ok(Self::from_up_rows(labels, up))
    }

    fn from_up_rows(labels: Vec<String>, up: Vec<FixedBitSet>) -> Self {
        let n = labels.len();
        let mut down: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for (a, row) in up.iter().enumerate() {
            for b in row.ones() {
                down[b].insert(a);
            }
        }
        FinitePoset {
            labels,
            up,
            down,
            bounds: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn is_chain(&self) -> bool {
        (0..self.len()).all(|a| (0..a).all(|b| self.comparable(a, b)))
    }

    /// `{x : x ≥ a}`
    pub fn up_set(&self, a: usize) -> Subset {
        Subset(self.up[a].clone())
    }

    /// `{x : x ≤ a}`
    pub fn down_set(&self, a: usize) -> Subset {
        Subset(self.down[a].clone())
    }

    pub fn empty_set(&self) -> Subset {
        Subset::empty(self.len())
    }

    pub fn full_set(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset(&self, indices: impl IntoIterator<Item = usize>) -> Subset {
        Subset::from_indices(self.len(), indices)
    }

    /// Subset from labels, failing on an unknown label.
    pub fn subset_of_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset> {
        let mut s = self.empty_set();
        for l in labels {
            let i = self
                .index_of(l.as_ref())
                .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string()))?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn format_subset(&self, s: &Subset) -> String {
        let parts: Vec<&str> = s.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn bounds(&self) -> &Bounds {
        self.bounds.get_or_init(|| {
            let n = self.len();
            let mut join = vec![None; n * n];
            let mut meet = vec![None; n * n];
            for a in 0..n {
                for b in a..n {
                    let j = least(&self.up[a], &self.up[b], &self.up);
                    let m = least(&self.down[a], &self.down[b], &self.down);
                    join[a * n + b] = j;
                    join[b * n + a] = j;
                    meet[a * n + b] = m;
                    meet[b * n + a] = m;
                }
            }
            std::sync::Arc::new(Bounds { join, meet })
        })
    }

    /// Least upper bound, if it exists.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        self.bounds().join[a * self.len() + b]
    }

    /// Greatest lower bound, if it exists.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.bounds().meet[a * self.len() + b]
    }

    pub fn try_join(&self, a: usize, b: usize) -> Result<usize> {
        self.join(a, b).ok_or_else(|| self.missing(a, b))
    }

    pub fn try_meet(&self, a: usize, b: usize) -> Result<usize> {
        self.meet(a, b).ok_or_else(|| self.missing(a, b))
    }

    fn missing(&self, a: usize, b: usize) -> Error {
        Error::MissingJoin(self.labels[a].clone(), self.labels[b].clone())
    }

    pub fn is_lattice(&self) -> bool {
        let b = self.bounds();
        b.join.iter().all(Option::is_some) && b.meet.iter().all(Option::is_some)
    }

    pub fn require_lattice(&self) -> Result<()> {
        if self.is_lattice() {
            Ok(())
        } else {
            Err(Error::NotLattice)
        }
    }

    /// Whether `s` is closed under the joins and meets of the whole poset.
    pub fn is_sublattice(&self, s: &Subset) -> Result<bool> {
        for a in s.iter() {
            for b in s.iter().filter(|&b| b > a) {
                if !s.contains(self.try_join(a, b)?) || !s.contains(self.try_meet(a, b)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `[lo, hi] = {x : lo ≤ x ≤ hi}`, empty when `lo ≰ hi`.
    pub fn closed_interval(&self, lo: usize, hi: usize) -> Subset {
        let mut bits = self.up[lo].clone();
        bits.intersect_with(&self.down[hi]);
        Subset(bits)
    }

    /// `J(a, b) = [a ∧ b, a ∨ b]`, the smallest subinterval containing both.
    pub fn interval(&self, a: usize, b: usize) -> Result<Subset> {
        Ok(self.closed_interval(self.try_meet(a, b)?, self.try_join(a, b)?))
    }

    /// All nonempty subintervals `[a, b]` with `a ≤ b`, ordered by `(a, b)`.
    pub fn subintervals(&self) -> Vec<Subset> {
        let n = self.len();
        (0..n)
            .flat_map(|a| self.up[a].ones().map(move |b| (a, b)))
            .map(|(a, b)| self.closed_interval(a, b))
            .collect()
    }

    /// Every nonempty sublattice, in increasing bitmask order.
    pub fn sublattices(&self, cap: usize) -> Result<Vec<Subset>> {
        let n = self.len();
        if n > cap || n >= 64 {
            return Err(Error::SizeLimit {
                what: "sublattice enumeration".into(),
                size: n,
                cap: cap.min(63),
            });
        }
        self.require_lattice()?;
        let b = self.bounds();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << n) {
            let closed = (0..n).filter(|i| mask >> i & 1 == 1).all(|i| {
                (0..i).filter(|j| mask >> j & 1 == 1).all(|j| {
                    let jn = b.join[i * n + j].expect("lattice");
                    let mt = b.meet[i * n + j].expect("lattice");
                    mask >> jn & 1 == 1 && mask >> mt & 1 == 1
                })
            });
            if closed {
                out.push(Subset::from_mask(n, mask));
            }
        }
        Ok(out)
    }

    /// Whether `upper` dominates `lower` in the requested set order.
    ///
    /// Empty operands follow the vacuous reading of each definition, so
    /// `∅ ≥ws ∅` holds and the strong order holds whenever either side is empty.
    pub fn set_dominates(&self, upper: &Subset, lower: &Subset, order: SetOrder) -> Result<bool> {
        Ok(match order {
            SetOrder::Upper => lower.iter().all(|x| upper.0.ones().any(|y| self.leq(x, y))),
            SetOrder::Lower => upper.iter().all(|y| lower.0.ones().any(|x| self.leq(x, y))),
            SetOrder::Weak => {
                self.set_dominates(upper, lower, SetOrder::Upper)?
                    && self.set_dominates(upper, lower, SetOrder::Lower)?
            }
            SetOrder::Strong => {
                for x in lower.iter() {
                    for y in upper.iter() {
                        if !upper.contains(self.try_join(x, y)?) || !lower.contains(self.try_meet(x, y)?)
                        {
                            return Ok(false);
                        }
                    }
                }
                true
            }
        })
    }

    /// A point of one set lying between two points of the other set belongs to it.
    pub fn sandwich(&self, a: &Subset, b: &Subset) -> bool {
        let squeezed = |inner: &Subset, outer: &Subset| {
            inner
                .difference(outer)
                .iter()
                .all(|x| !(self.down_set(x).meets(outer) && self.up_set(x).meets(outer)))
        };
        squeezed(a, b) && squeezed(b, a)
    }

    /// Compares `upper` and `lower` in every set order and checks that the
    /// strong order agrees with weak order + union sublattice + sandwich.
    pub fn ss_decompose(&self, upper: &Subset, lower: &Subset) -> Result<SetOrderReport> {
        let uws = self.set_dominates(upper, lower, SetOrder::Upper)?;
        let lws = self.set_dominates(upper, lower, SetOrder::Lower)?;
        let ss = self.set_dominates(upper, lower, SetOrder::Strong)?;
        let union_sublattice = self.is_sublattice(&upper.union(lower))?;
        let sandwich = self.sandwich(upper, lower);
        let report = SetOrderReport {
            uws,
            lws,
            ws: uws && lws,
            ss,
            union_sublattice,
            sandwich,
        };
        let decomposed = report.ws && union_sublattice && sandwich;
        if decomposed && !ss {
            return Err(Error::TheoremViolation(format!(
                "{} and {} are weakly ordered with sublattice union and sandwich, but not strongly ordered",
                self.format_subset(upper),
                self.format_subset(lower)
            )));
        }
        let proper = !upper.is_empty()
            && !lower.is_empty()
            && self.is_sublattice(upper)?
            && self.is_sublattice(lower)?;
        if proper && ss && !decomposed {
            return Err(Error::TheoremViolation(format!(
                "{} strongly dominates {} without the decomposition",
                self.format_subset(upper),
                self.format_subset(lower)
            )));
        }
        Ok(report)
    }

    pub fn maximal_points(&self, s: &Subset) -> Subset {
        s.iter()
            .filter(|&x| s.iter().all(|y| !self.lt(x, y)))
            .fold(self.empty_set(), |mut acc, x| {
                acc.insert(x);
                acc
            })
    }

    pub fn minimal_points(&self, s: &Subset) -> Subset {
        s.iter()
            .filter(|&x| s.iter().all(|y| !self.lt(y, x)))
            .fold(self.empty_set(), |mut acc, x| {
                acc.insert(x);
                acc
            })
    }

    /// Given `s1 ≥ws s` and `t1 ≥ws t`, whether `s1 ∪ t1 ≥ws s ∪ t`.
    pub fn ws_union_property(&self, s1: &Subset, s: &Subset, t1: &Subset, t: &Subset) -> Result<bool> {
        if !self.set_dominates(s1, s, SetOrder::Weak)? || !self.set_dominates(t1, t, SetOrder::Weak)? {
            return Err(Error::Hypothesis("operands are not weakly set ordered".into()));
        }
        self.set_dominates(&s1.union(t1), &s.union(t), SetOrder::Weak)
    }

    /// Given `s1 ≥ss s` and `t1 ≥ss t`, whether `s1 ∩ t1 ≥ss s ∩ t`.
    pub fn ss_intersection_property(
        &self,
        s1: &Subset,
        s: &Subset,
        t1: &Subset,
        t: &Subset,
    ) -> Result<bool> {
        if !self.set_dominates(s1, s, SetOrder::Strong)? || !self.set_dominates(t1, t, SetOrder::Strong)? {
            return Err(Error::Hypothesis("operands are not strongly set ordered".into()));
        }
        self.set_dominates(&s1.intersection(t1), &s.intersection(t), SetOrder::Strong)
    }
}

/// Union of the images of the members of `s`.
pub fn image(images: &[Subset], s: &Subset, codomain_len: usize) -> Subset {
    s.iter()
        .fold(Subset::empty(codomain_len), |acc, x| acc.union(&images[x]))
}

/// Given a weak set monotone map `images: domain ⇉ codomain` and
/// `s1 ≥ws s` in the domain, whether the images keep the weak set order.
pub fn image_ws_monotone(
    domain: &FinitePoset,
    codomain: &FinitePoset,
    images: &[Subset],
    s1: &Subset,
    s: &Subset,
) -> Result<bool> {
    if images.len() != domain.len() {
        return Err(Error::Invalid("one image per domain element expected".into()));
    }
    for a in 0..domain.len() {
        for b in domain.up_set(a).iter() {
            if !codomain.set_dominates(&images[b], &images[a], SetOrder::Weak)? {
                return Err(Error::Hypothesis(format!(
                    "map is not weak set monotone at {} ≤ {}",
                    domain.label(a),
                    domain.label(b)
                )));
            }
        }
    }
    if !domain.set_dominates(s1, s, SetOrder::Weak)? {
        return Err(Error::Hypothesis("operands are not weakly set ordered".into()));
    }
    let n = codomain.len();
    codomain.set_dominates(&image(images, s1, n), &image(images, s, n), SetOrder::Weak)
}

fn least(a: &FixedBitSet, b: &FixedBitSet, rows: &[FixedBitSet]) -> Option<usize> {
    let mut common = a.clone();
    common.intersect_with(b);
    common.ones().find(|&c| common.is_subset(&rows[c]))
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Digits of `k` in the mixed radix given by the axis lengths, most significant first.
pub fn mixed_radix<T>(mut k: usize, axes: &[Vec<T>]) -> Vec<usize> {
    let mut digits = vec![0; axes.len()];
    for (d, axis) in digits.iter_mut().zip(axes).rev() {
        *d = k % axis.len();
        k /= axis.len();
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn diamond() -> FinitePoset {
        FinitePoset::from_label_pairs(
            labels(&["bot", "l", "r", "top"]),
            &[("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")],
        )
        .unwrap()
    }

    fn two_by_two() -> FinitePoset {
        FinitePoset::chain(2).product(&FinitePoset::chain(2), 64).unwrap()
    }

    // Reachability by repeated relaxation, independent of the bitset closure.
    fn naive_leq(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            r[a][b] = true;
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if r[i][k] && r[k][j] && !r[i][j] {
                            r[i][j] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return r;
            }
        }
    }

    fn naive_join(p: &FinitePoset, a: usize, b: usize) -> Option<usize> {
        let ub: Vec<usize> = (0..p.len()).filter(|&c| p.leq(a, c) && p.leq(b, c)).collect();
        let least: Vec<usize> = ub.iter().copied().filter(|&c| ub.iter().all(|&d| p.leq(c, d))).collect();
        (least.len() == 1).then(|| least[0])
    }

    #[test]
    fn chain_from_relation() {
        let p = FinitePoset::from_relation(labels(&["0", "1", "2", "3"]), [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(p.is_chain());
        assert!(p.leq(0, 3));
        assert_eq!(p.join(1, 3), Some(3));
        assert_eq!(p.meet(1, 3), Some(1));
    }

    #[test]
    fn cycle_and_duplicate_rejected() {
        let err = FinitePoset::from_relation(labels(&["a", "b"]), [(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::Cycle(..)));
        let err = FinitePoset::from_relation(labels(&["a", "a"]), []).unwrap_err();
        assert_eq!(err, Error::DuplicateLabel("a".into()));
        let err = FinitePoset::from_label_pairs(labels(&["a"]), &[("a", "z")]).unwrap_err();
        assert_eq!(err, Error::UnknownLabel("z".into()));
    }

    #[test]
    fn product_of_three_and_two() {
        let p = FinitePoset::chain_of(labels(&["1", "2", "3"]))
            .unwrap()
            .product(&FinitePoset::chain_of(labels(&["1", "2"])).unwrap(), 64)
            .unwrap();
        assert_eq!(p.len(), 6);
        let i = |s: &str| p.index_of(s).unwrap();
        assert!(p.leq(i("(1,2)"), i("(2,2)")));
        assert!(!p.comparable(i("(1,2)"), i("(2,1)")));
        assert_eq!(p.join(i("(1,2)"), i("(2,1)")), Some(i("(2,2)")));
        assert!(matches!(
            FinitePoset::chain(9).product(&FinitePoset::chain(9), 64),
            Err(Error::SizeLimit { size: 81, .. })
        ));
    }

    #[test]
    fn grid_matches_iterated_product() {
        let axes = vec![labels(&["0", "1"]), labels(&["0", "1", "2"])];
        let g = FinitePoset::grid(&axes, 64).unwrap();
        let p = FinitePoset::chain(2).product(&FinitePoset::chain(3), 64).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(g.leq(a, b), p.leq(a, b));
            }
        }
        assert_eq!(g.label(5), "(1,2)");
    }

    #[test]
    fn diamond_and_antichain_bounds() {
        let d = diamond();
        assert_eq!(d.join(1, 2), Some(3));
        assert_eq!(d.meet(1, 2), Some(0));
        assert!(d.is_lattice());
        let a = FinitePoset::antichain(2);
        assert_eq!(a.join(0, 1), None);
        assert!(!a.is_lattice());
        assert!(matches!(a.interval(0, 1), Err(Error::MissingJoin(..))));
        assert!(matches!(a.is_sublattice(&a.full_set()), Err(Error::MissingJoin(..))));
    }

    #[test]
    fn interval_and_sublattice() {
        let g = two_by_two();
        assert_eq!(g.interval(2, 1).unwrap(), g.full_set());
        assert!(!g.is_sublattice(&g.subset([1, 2])).unwrap());
        assert!(g.is_sublattice(&g.subset([0, 1])).unwrap());
        assert_eq!(g.closed_interval(1, 2), g.empty_set());
    }

    #[test]
    fn chain_sets_weak_but_not_strong() {
        let c = FinitePoset::chain(4);
        let (hi, lo) = (c.subset([1, 3]), c.subset([0, 2]));
        let r = c.ss_decompose(&hi, &lo).unwrap();
        assert!(r.ws && !r.ss && !r.sandwich && r.union_sublattice);
    }

    #[test]
    fn shifted_interval_is_not_dominated() {
        let c = FinitePoset::chain(4);
        let (low_interval, high_interval) = (c.subset(0..=2), c.subset(1..=3));
        assert!(!c.set_dominates(&low_interval, &high_interval, SetOrder::Weak).unwrap());
        assert!(c.set_dominates(&high_interval, &low_interval, SetOrder::Strong).unwrap());
    }

    #[test]
    fn empty_set_conventions() {
        let c = FinitePoset::chain(3);
        let e = c.empty_set();
        let s = c.subset([1]);
        assert!(c.set_dominates(&e, &e, SetOrder::Weak).unwrap());
        assert!(c.set_dominates(&s, &e, SetOrder::Strong).unwrap());
        assert!(c.set_dominates(&e, &s, SetOrder::Strong).unwrap());
        assert!(!c.set_dominates(&e, &s, SetOrder::Upper).unwrap());
    }

    #[test]
    fn extremal_points() {
        let c = FinitePoset::chain(4);
        let s = c.subset([0, 2, 3]);
        assert_eq!(c.maximal_points(&s), c.subset([3]));
        assert_eq!(c.minimal_points(&s), c.subset([0]));
        let a = FinitePoset::antichain(3);
        assert_eq!(a.maximal_points(&a.full_set()), a.full_set());
        assert_eq!(a.minimal_points(&a.full_set()), a.full_set());
    }

    #[test]
    fn image_of_linear_map_is_weak_but_not_strong() {
        // (x1, x2) on {1,2}² mapped to 2 x1 + x2 on the chain 3..=6.
        let axis = labels(&["1", "2"]);
        let dom = FinitePoset::grid(&[axis.clone(), axis], 64).unwrap();
        let cod = FinitePoset::chain_of(labels(&["3", "4", "5", "6"])).unwrap();
        let images: Vec<Subset> = (0..4)
            .map(|k| {
                let (x1, x2) = (k / 2 + 1, k % 2 + 1);
                Subset::singleton(4, 2 * x1 + x2 - 3)
            })
            .collect();
        let s = dom.subset_of_labels(&["(1,1)", "(2,1)"]).unwrap();
        let t = dom.subset_of_labels(&["(1,2)", "(2,2)"]).unwrap();
        assert!(dom.set_dominates(&t, &s, SetOrder::Strong).unwrap());
        assert!(image_ws_monotone(&dom, &cod, &images, &t, &s).unwrap());
        let (fs, ft) = (image(&images, &s, 4), image(&images, &t, 4));
        assert_eq!(cod.format_subset(&fs), "{3, 5}");
        assert_eq!(cod.format_subset(&ft), "{4, 6}");
        assert!(!cod.set_dominates(&ft, &fs, SetOrder::Strong).unwrap());
    }

    #[test]
    fn sublattices_of_diamond() {
        let d = diamond();
        let subs = d.sublattices(12).unwrap();
        // every singleton, every comparable pair (5), the two 3-chains, the whole diamond
        assert_eq!(subs.len(), 4 + 5 + 2 + 1);
        assert!(!subs.contains(&d.subset([1, 2])));
    }

    fn arb_relation() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..9).prop_flat_map(|n| {
            let pairs = proptest::collection::vec((0..n, 0..n), 0..12)
                .prop_map(|v| v.into_iter().filter(|(a, b)| a < b).collect::<Vec<_>>());
            (Just(n), pairs)
        })
    }

    proptest! {
        #[test]
        #[allow(clippy::needless_range_loop)]
        fn closure_matches_naive_reachability((n, pairs) in arb_relation()) {
            let p = FinitePoset::from_relation((0..n).map(|i| i.to_string()).collect(), pairs.clone()).unwrap();
            let r = naive_leq(n, &pairs);
            for a in 0..n {
                for b in 0..n {
                    prop_assert_eq!(p.leq(a, b), r[a][b]);
                    prop_assert_eq!(p.join(a, b), naive_join(&p, a, b));
                }
            }
        }

        #[test]
        fn weak_order_is_reflexive_and_transitive(
            (n, pairs) in arb_relation(),
            masks in proptest::collection::vec(1u64..512, 3),
        ) {
            let p = FinitePoset::from_relation((0..n).map(|i| i.to_string()).collect(), pairs).unwrap();
            let sets: Vec<Subset> = masks.iter().map(|&m| Subset::from_mask(n, m)).filter(|s| !s.is_empty()).collect();
            for s in &sets {
                prop_assert!(p.set_dominates(s, s, SetOrder::Weak).unwrap());
            }
            if sets.len() == 3 {
                let (a, b, c) = (&sets[0], &sets[1], &sets[2]);
                if p.set_dominates(a, b, SetOrder::Weak).unwrap() && p.set_dominates(b, c, SetOrder::Weak).unwrap() {
                    prop_assert!(p.set_dominates(a, c, SetOrder::Weak).unwrap());
                }
            }
        }

        #[test]
        fn maximal_points_are_undominated((n, pairs) in arb_relation(), mask in 0u64..512) {
            let p = FinitePoset::from_relation((0..n).map(|i| i.to_string()).collect(), pairs).unwrap();
            let s = Subset::from_mask(n, mask);
            let max = p.maximal_points(&s);
            prop_assert_eq!(max.is_empty(), s.is_empty());
            for x in s.iter() {
                prop_assert!(max.iter().any(|m| p.leq(x, m)));
            }
        }
    }
}
