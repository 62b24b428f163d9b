//! Pre-actions `(X_1, X_2, tau)` of an amalgam `Gamma_1 *_Sigma Gamma_2` and
//! their free globalization.
//!
//! `X_j` is a finite set of free `Gamma_j`-orbits and `tau` sends finitely many
//! `Sigma_1`-orbits of `X_1` onto `Sigma_2`-orbits of `X_2`. In the free
//! globalization a copy of the positive translation pre-action hangs at every
//! `Sigma_1`-orbit of `X_1` outside the domain, and a copy of the negative one
//! at every `Sigma_2`-orbit of `X_2` outside the range. A copy point is a group
//! element `w g` and is addressed by the coset word `w` of its orbit, so the
//! globalization is a pure function of the core.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::amalgam_words::{enumerate_nontrivial, AmalgamNormalForm, AmalgamWord};
use crate::base_groups::{AmalgamBaseData, GroupElement, Presentation, Side};
use crate::graphs::{EdgeId, Graph, VertexId};
use crate::preaction_hnn::parse_pair;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreActionError {
    #[error("{0} is outside the domain")]
    OutsideDomain(String),
    #[error("malformed point {0}")]
    Malformed(String),
    #[error("invalid pre-action: {0}")]
    Invalid(Report),
    #[error("side-{side} orbit {orbit} is used by the table but missing from the orbit set")]
    OrbitSetMisses { side: Side, orbit: u64 },
    #[error("unknown tau key {0}")]
    UnknownKey(String),
    #[error("{0} does not start in the opposite factor")]
    WrongFactorClass(String),
    #[error("edge {position} does not continue the path")]
    NotAPath { position: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("presentation mismatch: expected `{expected}`, found `{found}`")]
    PresentationMismatch { expected: String, found: String },
}

macro_rules! core_point {
    ($name:ident, $side:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            pub orbit: u64,
            pub element: GroupElement,
        }

        impl $name {
            pub const SIDE: Side = $side;

            pub fn new(orbit: u64, element: GroupElement) -> Self {
                $name { orbit, element }
            }

            /// Parse `(o,e)`.
            pub fn parse(text: &str, data: &AmalgamBaseData) -> Option<Self> {
                let (o, e) = parse_pair(text)?;
                Some($name { orbit: o.parse().ok()?, element: data.factor($side).element(e.parse().ok()?) })
            }

            pub fn act(self, g: GroupElement) -> Self {
                $name { orbit: self.orbit, element: self.element.mul(g) }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "({},{})", self.orbit, self.element)
            }
        }
    };
}

core_point!(Point1, Side::One, "A point of a core `Gamma_1`-orbit of `X_1`.");
core_point!(Point2, Side::Two, "A point of a core `Gamma_2`-orbit of `X_2`.");

/// An orbit of an attached translation copy. The copy is glued along the
/// `Sigma`-orbit of `(anchor, rep)` on side `glued`; `word` alternates, starts
/// in the other factor, and the orbit is the coset `word Gamma_j` with `j`
/// opposite to the last letter (opposite to `glued` when `word` is empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CopyOrbit {
    pub glued: Side,
    pub anchor: u64,
    pub rep: GroupElement,
    pub word: Vec<(Side, GroupElement)>,
}

impl CopyOrbit {
    fn key(&self) -> (Side, u64, GroupElement, usize, &[(Side, GroupElement)]) {
        (self.glued, self.anchor, self.rep, self.word.len(), &self.word)
    }

    /// The factor acting on this orbit.
    pub fn side(&self) -> Side {
        match self.word.last() {
            Some(&(s, _)) => s.other(),
            None => self.glued.other(),
        }
    }

    /// The copy orbit one step closer to the anchor, if any.
    pub fn parent(&self) -> Option<CopyOrbit> {
        (!self.word.is_empty()).then(|| CopyOrbit { word: self.word[..self.word.len() - 1].to_vec(), ..self.clone() })
    }

    fn word_text(&self) -> String {
        AmalgamWord::new(self.word.clone()).to_string()
    }
}

impl Ord for CopyOrbit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for CopyOrbit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    Core,
    Globalization(CopyOrbit),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Core => write!(f, "core"),
            Provenance::Globalization(c) => {
                write!(f, "glob glued={} anchor={} rep={} word=\"{}\"", c.glued, c.anchor, c.rep, c.word_text())
            }
        }
    }
}

/// An orbit of one side of the globalized space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AOrbit {
    Core(u64),
    Copy(CopyOrbit),
}

impl fmt::Display for AOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AOrbit::Core(o) => write!(f, "o{o}"),
            AOrbit::Copy(c) => write!(f, "o{}|{}@{}|{}", c.anchor, c.rep, c.glued, c.word_text()),
        }
    }
}

/// A point of `X_1` or `X_2` in the globalized space.
pub trait SidePoint: Clone + Eq + fmt::Display {
    const SIDE: Side;
    fn from_parts(orbit: AOrbit, element: GroupElement) -> Self;
    fn orbit(&self) -> &AOrbit;
    fn element(&self) -> GroupElement;
}

macro_rules! glob_point {
    ($name:ident, $core:ident, $side:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            pub orbit: AOrbit,
            pub element: GroupElement,
        }

        impl $name {
            pub fn core(orbit: u64, element: GroupElement) -> Self {
                $name { orbit: AOrbit::Core(orbit), element }
            }

            pub fn as_core(&self) -> Option<$core> {
                match self.orbit {
                    AOrbit::Core(o) => Some($core::new(o, self.element)),
                    AOrbit::Copy(_) => None,
                }
            }

            pub fn act(&self, g: GroupElement) -> Self {
                $name { orbit: self.orbit.clone(), element: self.element.mul(g) }
            }

            pub fn vertex(&self) -> AVertex {
                AVertex { side: $side, orbit: self.orbit.clone() }
            }
        }

        impl SidePoint for $name {
            const SIDE: Side = $side;

            fn from_parts(orbit: AOrbit, element: GroupElement) -> Self {
                $name { orbit, element }
            }

            fn orbit(&self) -> &AOrbit {
                &self.orbit
            }

            fn element(&self) -> GroupElement {
                self.element
            }
        }

        impl From<$core> for $name {
            fn from(p: $core) -> Self {
                $name::core(p.orbit, p.element)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "({},{})", self.orbit, self.element)
            }
        }
    };
}

glob_point!(X1Point, Point1, Side::One, "A point of the globalized `X_1`.");
glob_point!(X2Point, Point2, Side::Two, "A point of the globalized `X_2`.");

/// A point on either side.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnyPoint {
    One(X1Point),
    Two(X2Point),
}

impl AnyPoint {
    pub fn vertex(&self) -> AVertex {
        match self {
            AnyPoint::One(p) => p.vertex(),
            AnyPoint::Two(p) => p.vertex(),
        }
    }
}

/// Side-agnostic point used internally.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Raw {
    side: Side,
    orbit: AOrbit,
    element: GroupElement,
}

impl Raw {
    fn of<P: SidePoint>(p: &P) -> Raw {
        Raw { side: P::SIDE, orbit: p.orbit().clone(), element: p.element() }
    }

    fn typed<P: SidePoint>(self) -> P {
        debug_assert_eq!(self.side, P::SIDE);
        P::from_parts(self.orbit, self.element)
    }

    fn act(mut self, g: GroupElement) -> Raw {
        self.element = self.element.mul(g);
        self
    }

    fn any(self) -> AnyPoint {
        match self.side {
            Side::One => AnyPoint::One(self.typed()),
            Side::Two => AnyPoint::Two(self.typed()),
        }
    }
}

/// A vertex of the Bass-Serre graph: an orbit of `X_1` or of `X_2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AVertex {
    pub side: Side,
    pub orbit: AOrbit,
}

impl fmt::Display for AVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.orbit)
    }
}

/// A directed edge: the `Sigma_j`-orbit of `(orbit, rep)` in `X_j`. Edges on
/// side 1 are the positive ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AEdge {
    pub side: Side,
    pub orbit: AOrbit,
    pub rep: GroupElement,
}

impl AEdge {
    pub fn source(&self) -> AVertex {
        AVertex { side: self.side, orbit: self.orbit.clone() }
    }
}

impl fmt::Display for AEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.side, self.orbit, self.rep)
    }
}

/// One crossing between `X_1` and `X_2` during an evaluation: `x1 tau = x2`,
/// used forwards or backwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub x1: X1Point,
    pub x2: X2Point,
    pub forward: bool,
}

impl TraceStep {
    /// The point whose `tau` value the step relies on.
    pub fn tau_point(&self) -> &X1Point {
        &self.x1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownOrbit { side: Side, orbit: u64 },
    WrongGroup(String),
    NotAFunction { key: Point1, first: Point2, second: Point2 },
    NotInjective { first: Point1, second: Point1 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownOrbit { side, orbit } => write!(f, "side-{side} orbit {orbit} is not declared"),
            Violation::WrongGroup(p) => write!(f, "point {p} is not in its factor"),
            Violation::NotAFunction { key, first, second } => {
                write!(f, "key {key} has two images {first} and {second}")
            }
            Violation::NotInjective { first, second } => {
                write!(f, "keys {first} and {second} have images in the same Sigma_2-orbit")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let v: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", v.join("; "))
    }
}

type Key = (u64, GroupElement);
type Normalized = (BTreeMap<Key, Point2>, BTreeMap<Key, (Key, GroupElement)>);

/// `Sigma` element `s` in side `from` coordinates, moved to the other side.
fn transfer(data: &AmalgamBaseData, s: GroupElement, from: Side) -> GroupElement {
    match from {
        Side::One => data.theta().apply_unchecked(s),
        Side::Two => data.theta().apply_inv_unchecked(s),
    }
}

/// A normal-form tail (`Sigma_1` coordinates) as an element of `Gamma_side`.
fn tail_on(data: &AmalgamBaseData, tail: GroupElement, side: Side) -> GroupElement {
    match side {
        Side::One => tail,
        Side::Two => transfer(data, tail, Side::One),
    }
}

/// Check `key -> image` pairs; keys need not be representatives.
pub fn check_preaction(
    data: &AmalgamBaseData,
    orbits1: &BTreeSet<u64>,
    orbits2: &BTreeSet<u64>,
    entries: &[(Point1, Point2)],
) -> Report {
    normalize_entries(data, orbits1, orbits2, entries).1
}

fn normalize_entries(
    data: &AmalgamBaseData,
    orbits1: &BTreeSet<u64>,
    orbits2: &BTreeSet<u64>,
    entries: &[(Point1, Point2)],
) -> (Normalized, Report) {
    let mut report = Report::default();
    let mut table: BTreeMap<Key, Point2> = BTreeMap::new();
    let mut reverse: BTreeMap<Key, (Key, GroupElement)> = BTreeMap::new();
    for &(k, img) in entries {
        let mut ok = true;
        for (side, orbit, element, ids) in [(Side::One, k.orbit, k.element, orbits1), (Side::Two, img.orbit, img.element, orbits2)] {
            if element.group() != data.factor(side) {
                report.violations.push(Violation::WrongGroup(format!("({orbit},{element})")));
                ok = false;
            } else if !ids.contains(&orbit) {
                report.violations.push(Violation::UnknownOrbit { side, orbit });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let (c, s) = data.sigma(Side::One).decompose_unchecked(k.element);
        let image = img.act(transfer(data, s, Side::One).inv());
        let key = (k.orbit, c);
        if let Some(&prev) = table.get(&key) {
            if prev != image {
                report.violations.push(Violation::NotAFunction { key: Point1::new(k.orbit, c), first: prev, second: image });
            }
            continue;
        }
        let (c2, s0) = data.sigma(Side::Two).decompose_unchecked(image.element);
        let rkey = (image.orbit, c2);
        if let Some(&(other, _)) = reverse.get(&rkey) {
            report.violations.push(Violation::NotInjective {
                first: Point1::new(other.0, other.1),
                second: Point1::new(k.orbit, c),
            });
            continue;
        }
        table.insert(key, image);
        reverse.insert(rkey, (key, s0));
    }
    ((table, reverse), report)
}

/// A pre-action of an amalgam on finitely many free orbits per side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreActionAmalgam {
    data: AmalgamBaseData,
    orbits1: BTreeMap<u64, Provenance>,
    orbits2: BTreeMap<u64, Provenance>,
    table: BTreeMap<Key, Point2>,
    reverse: BTreeMap<Key, (Key, GroupElement)>,
}

impl PreActionAmalgam {
    pub fn new(
        data: AmalgamBaseData,
        orbits1: BTreeMap<u64, Provenance>,
        orbits2: BTreeMap<u64, Provenance>,
        entries: &[(Point1, Point2)],
    ) -> Result<Self, PreActionError> {
        let ids1: BTreeSet<u64> = orbits1.keys().copied().collect();
        let ids2: BTreeSet<u64> = orbits2.keys().copied().collect();
        let ((table, reverse), report) = normalize_entries(&data, &ids1, &ids2, entries);
        if !report.is_valid() {
            return Err(PreActionError::Invalid(report));
        }
        Ok(PreActionAmalgam { data, orbits1, orbits2, table, reverse })
    }

    pub fn empty(data: AmalgamBaseData, n1: u64, n2: u64) -> Self {
        let core = |n: u64| (0..n).map(|o| (o, Provenance::Core)).collect();
        PreActionAmalgam { data, orbits1: core(n1), orbits2: core(n2), table: BTreeMap::new(), reverse: BTreeMap::new() }
    }

    /// `k` orbits of `X_1` and `k - 1` of `X_2` alternating in a chain:
    /// `(i,1) tau = (i,1)` and `(i+1,c_1) tau = (i,c_2)` with `c_j` the least
    /// nontrivial representatives.
    pub fn chain(data: AmalgamBaseData, k: u64) -> Self {
        let k = k.max(1);
        let c1 = least_nontrivial(&data, Side::One);
        let c2 = least_nontrivial(&data, Side::Two);
        let (e1, e2) = (data.factor(Side::One).identity(), data.factor(Side::Two).identity());
        let mut entries = Vec::new();
        for i in 0..k - 1 {
            entries.push((Point1::new(i, e1), Point2::new(i, e2)));
            entries.push((Point1::new(i + 1, c1), Point2::new(i, c2)));
        }
        let core = |n: u64| (0..n).map(|o| (o, Provenance::Core)).collect();
        PreActionAmalgam::new(data, core(k), core(k - 1), &entries).expect("a chain is a valid pre-action")
    }

    /// The translation pre-action of `Gamma` restricted to the ball of radius
    /// `radius` around the vertex `Gamma_1` of its Bass-Serre tree.
    pub fn translation_truncation(data: AmalgamBaseData, radius: usize) -> Self {
        let base = PreActionAmalgam::empty(data, 1, 0);
        let w = base.globalization().window(&[AVertex { side: Side::One, orbit: AOrbit::Core(0) }], radius);
        base.promote(&w.vertices).0
    }

    pub fn data(&self) -> &AmalgamBaseData {
        &self.data
    }

    pub fn orbits(&self, side: Side) -> &BTreeMap<u64, Provenance> {
        match side {
            Side::One => &self.orbits1,
            Side::Two => &self.orbits2,
        }
    }

    fn orbits_mut(&mut self, side: Side) -> &mut BTreeMap<u64, Provenance> {
        match side {
            Side::One => &mut self.orbits1,
            Side::Two => &mut self.orbits2,
        }
    }

    pub fn orbit_ids(&self, side: Side) -> BTreeSet<u64> {
        self.orbits(side).keys().copied().collect()
    }

    pub fn next_orbit_id(&self, side: Side) -> u64 {
        self.orbits(side).keys().next_back().map_or(0, |o| o + 1)
    }

    /// `(key, image)` pairs with keys at `C_1` representatives.
    pub fn entries(&self) -> Vec<(Point1, Point2)> {
        self.table.iter().map(|(&(o, c), &img)| (Point1::new(o, c), img)).collect()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn contains_key(&self, orbit: u64, rep: GroupElement) -> bool {
        self.table.contains_key(&(orbit, rep))
    }

    pub fn contains_range_key(&self, orbit: u64, rep: GroupElement) -> bool {
        self.reverse.contains_key(&(orbit, rep))
    }

    /// Every `Sigma_1`-orbit of `X_1` and `Sigma_2`-orbit of `X_2` is covered.
    pub fn is_global(&self) -> bool {
        self.table.len() == self.orbits1.len() * self.data.coset_reps(Side::One).len()
            && self.reverse.len() == self.orbits2.len() * self.data.coset_reps(Side::Two).len()
    }

    /// `tau` (from side 1) or `tau^-1` (from side 2) on a core point.
    fn core_cross(&self, side: Side, orbit: u64, element: GroupElement) -> Option<(u64, GroupElement)> {
        let (c, s) = self.data.sigma(side).decompose_unchecked(element);
        match side {
            Side::One => {
                let img = self.table.get(&(orbit, c))?;
                Some((img.orbit, img.element.mul(transfer(&self.data, s, Side::One))))
            }
            Side::Two => {
                let &((o, c1), s0) = self.reverse.get(&(orbit, c))?;
                Some((o, c1.mul(transfer(&self.data, s0.inv().mul(s), Side::Two))))
            }
        }
    }

    fn check_point(&self, side: Side, orbit: u64, element: GroupElement) -> Result<(), PreActionError> {
        if element.group() != self.data.factor(side) || !self.orbits(side).contains_key(&orbit) {
            return Err(PreActionError::Malformed(format!("({orbit},{element}) on side {side}")));
        }
        Ok(())
    }

    pub fn tau_eval(&self, x: Point1) -> Result<Point2, PreActionError> {
        self.check_point(Side::One, x.orbit, x.element)?;
        let (o, e) = self.core_cross(Side::One, x.orbit, x.element).ok_or_else(|| PreActionError::OutsideDomain(x.to_string()))?;
        Ok(Point2::new(o, e))
    }

    pub fn tau_inv_eval(&self, x: Point2) -> Result<Point1, PreActionError> {
        self.check_point(Side::Two, x.orbit, x.element)?;
        let (o, e) = self.core_cross(Side::Two, x.orbit, x.element).ok_or_else(|| PreActionError::OutsideDomain(x.to_string()))?;
        Ok(Point1::new(o, e))
    }

    fn partial_eval(&self, side: Side, x: Key, letters: &[(Side, GroupElement)], tail: GroupElement) -> Option<Key> {
        let (mut cur, mut p) = (side, x);
        for &(s, c) in letters {
            if s != cur {
                p = self.core_cross(cur, p.0, p.1)?;
                cur = s;
            }
            p.1 = p.1.mul(c);
        }
        if cur != side {
            p = self.core_cross(cur, p.0, p.1)?;
        }
        Some((p.0, p.1.mul(tail_on(&self.data, tail, side))))
    }

    /// The partial action of `Gamma` on `X_1`: `Gamma_1` letters act directly,
    /// `Gamma_2` letters as `tau g tau^-1`. `None` where a crossing is undefined.
    pub fn action_eval_side1(&self, x: Point1, g: &AmalgamNormalForm) -> Option<Point1> {
        self.partial_eval(Side::One, (x.orbit, x.element), g.syllables(), g.tail()).map(|(o, e)| Point1::new(o, e))
    }

    /// The partial action of `Gamma` on `X_2`.
    pub fn action_eval_side2(&self, x: Point2, g: &AmalgamNormalForm) -> Option<Point2> {
        self.partial_eval(Side::Two, (x.orbit, x.element), g.syllables(), g.tail()).map(|(o, e)| Point2::new(o, e))
    }

    /// Bass-Serre graph on the given core orbits.
    pub fn bass_serre_graph(&self, ids1: &BTreeSet<u64>, ids2: &BTreeSet<u64>) -> Result<Window, PreActionError> {
        for (&(o, _), img) in &self.table {
            if !ids1.contains(&o) {
                return Err(PreActionError::OrbitSetMisses { side: Side::One, orbit: o });
            }
            if !ids2.contains(&img.orbit) {
                return Err(PreActionError::OrbitSetMisses { side: Side::Two, orbit: img.orbit });
            }
        }
        let mut w = Window::default();
        for (side, ids) in [(Side::One, ids1), (Side::Two, ids2)] {
            for &o in ids {
                w.add_vertex(AVertex { side, orbit: AOrbit::Core(o) });
            }
        }
        for (&(o, c), img) in &self.table {
            let e = AEdge { side: Side::One, orbit: AOrbit::Core(o), rep: c };
            let back = AEdge {
                side: Side::Two,
                orbit: AOrbit::Core(img.orbit),
                rep: self.data.sigma(Side::Two).rep(img.element),
            };
            w.add_edge(e, back);
        }
        Ok(w)
    }

    /// Keep only the listed `tau` keys (`C_1` representatives).
    pub fn restrict_to_edges(&self, keys: &BTreeSet<Point1>) -> Result<Self, PreActionError> {
        for k in keys {
            if !self.table.contains_key(&(k.orbit, k.element)) {
                return Err(PreActionError::UnknownKey(k.to_string()));
            }
        }
        let entries: Vec<_> = self.entries().into_iter().filter(|(k, _)| keys.contains(k)).collect();
        PreActionAmalgam::new(self.data.clone(), self.orbits1.clone(), self.orbits2.clone(), &entries)
    }

    pub fn with_fresh_orbit(&self, side: Side, provenance: Provenance) -> (Self, u64) {
        let id = self.next_orbit_id(side);
        let mut out = self.clone();
        out.orbits_mut(side).insert(id, provenance);
        (out, id)
    }

    pub fn with_entry(&self, key: Point1, image: Point2) -> Result<Self, PreActionError> {
        let mut entries = self.entries();
        entries.push((key, image));
        PreActionAmalgam::new(self.data.clone(), self.orbits1.clone(), self.orbits2.clone(), &entries)
    }

    pub fn globalization(&self) -> LazyGlobalization<'_> {
        LazyGlobalization { base: self }
    }

    /// Move the given copy orbits and their ancestors into the core, with new
    /// ids in copy-orbit order on each side. The free globalization is
    /// unchanged.
    pub fn promote(&self, targets: &[AVertex]) -> (Self, BTreeMap<CopyOrbit, u64>) {
        let mut todo: BTreeSet<CopyOrbit> = BTreeSet::new();
        for t in targets {
            if let AOrbit::Copy(c) = &t.orbit {
                let mut cur = Some(c.clone());
                while let Some(c) = cur {
                    if !todo.insert(c.clone()) {
                        break;
                    }
                    cur = c.parent();
                }
            }
        }
        let mut out = self.clone();
        let mut ids = BTreeMap::new();
        for c in &todo {
            let (next, id) = out.with_fresh_orbit(c.side(), Provenance::Globalization(c.clone()));
            out = next;
            ids.insert(c.clone(), id);
        }
        let glob = self.globalization();
        let rename = |o: &AOrbit| match o {
            AOrbit::Core(o) => Some(*o),
            AOrbit::Copy(c) => ids.get(c).copied(),
        };
        let mut entries = self.entries();
        let sources = self
            .orbits1
            .keys()
            .map(|&o| AOrbit::Core(o))
            .chain(todo.iter().filter(|c| c.side() == Side::One).cloned().map(AOrbit::Copy));
        for src in sources {
            let new_src = rename(&src).expect("source is in the new core");
            for c in self.data.coset_reps(Side::One) {
                if matches!(src, AOrbit::Core(_)) && self.table.contains_key(&(new_src, c)) {
                    continue;
                }
                let img = glob.tau(&X1Point { orbit: src.clone(), element: c });
                if let Some(o) = rename(&img.orbit) {
                    entries.push((Point1::new(new_src, c), Point2::new(o, img.element)));
                }
            }
        }
        let out = PreActionAmalgam::new(self.data.clone(), out.orbits1, out.orbits2, &entries)
            .expect("promotion preserves validity");
        (out, ids)
    }

    /// Re-address a point of this globalization in the globalization of
    /// `promoted = self.promote(..)`.
    pub fn translate<P: SidePoint>(&self, promoted: &PreActionAmalgam, ids: &BTreeMap<CopyOrbit, u64>, p: &P) -> P {
        match p.orbit() {
            AOrbit::Core(_) => p.clone(),
            AOrbit::Copy(c) => match ids.get(c) {
                Some(&o) => P::from_parts(AOrbit::Core(o), p.element()),
                None => {
                    let gl = promoted.globalization();
                    let start = Raw { side: c.glued, orbit: AOrbit::Core(c.anchor), element: c.rep };
                    let mut letters = c.word.clone();
                    letters.push((P::SIDE, p.element()));
                    gl.land(gl.walk(start, &letters), P::SIDE).typed()
                }
            },
        }
    }

    /// Header, one line per entry, one line per orbit with its side.
    pub fn serialize(&self) -> String {
        let mut s = format!("preaction {}\n", self.data.config());
        for (k, img) in self.entries() {
            s.push_str(&format!("{k} -> {img}\n"));
        }
        for side in [Side::One, Side::Two] {
            for (o, p) in self.orbits(side) {
                s.push_str(&format!("orbit {side} {o} {p}\n"));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, PreActionError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let perr = |line: usize, reason: &str| PreActionError::Parse { line: line + 1, reason: reason.to_string() };
        let (n, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let cfg = header.strip_prefix("preaction ").ok_or_else(|| perr(n, "expected `preaction <presentation>`"))?;
        let data = match Presentation::parse(cfg) {
            Ok(Presentation::Amalgam(d)) => d,
            Ok(other) => {
                return Err(PreActionError::PresentationMismatch {
                    expected: "an amalgam presentation".into(),
                    found: other.config(),
                })
            }
            Err(e) => return Err(perr(n, &e.to_string())),
        };
        let mut entries = Vec::new();
        let (mut orbits1, mut orbits2) = (BTreeMap::new(), BTreeMap::new());
        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("orbit ") {
                let mut parts = rest.splitn(3, ' ');
                let (side, id, prov) = match (parts.next(), parts.next(), parts.next()) {
                    (Some(s), Some(i), Some(p)) => (s, i, p),
                    _ => return Err(perr(n, "expected `orbit <side> <id> <provenance>`")),
                };
                let id: u64 = id.parse().map_err(|_| perr(n, "bad orbit id"))?;
                let prov = parse_provenance(prov, &data).ok_or_else(|| perr(n, "bad provenance"))?;
                if let Provenance::Globalization(c) = &prov {
                    if c.side().to_string() != side {
                        return Err(perr(n, "provenance is on the other side"));
                    }
                }
                match side {
                    "1" => orbits1.insert(id, prov),
                    "2" => orbits2.insert(id, prov),
                    _ => return Err(perr(n, "side must be 1 or 2")),
                };
            } else {
                let (k, img) = line.split_once("->").ok_or_else(|| perr(n, "expected `(o,e) -> (o,e)`"))?;
                let k = Point1::parse(k, &data).ok_or_else(|| perr(n, "bad key point"))?;
                let img = Point2::parse(img, &data).ok_or_else(|| perr(n, "bad image point"))?;
                entries.push((k, img));
            }
        }
        PreActionAmalgam::new(data, orbits1, orbits2, &entries)
    }
}

fn least_nontrivial(data: &AmalgamBaseData, side: Side) -> GroupElement {
    data.coset_reps(side).into_iter().find(|c| !c.is_identity()).unwrap_or_else(|| data.factor(side).identity())
}

fn parse_provenance(text: &str, data: &AmalgamBaseData) -> Option<Provenance> {
    if text == "core" {
        return Some(Provenance::Core);
    }
    let rest = text.strip_prefix("glob glued=")?;
    let (glued, rest) = rest.split_once(" anchor=")?;
    let (anchor, rest) = rest.split_once(" rep=")?;
    let (rep, rest) = rest.split_once(" word=")?;
    let word = rest.strip_prefix('"')?.strip_suffix('"')?;
    let glued = match glued {
        "1" => Side::One,
        "2" => Side::Two,
        _ => return None,
    };
    let word = AmalgamWord::parse(word, data).ok()?.letters;
    let mut expect = glued.other();
    for &(s, c) in &word {
        if s != expect || c.is_identity() || data.sigma(s).rep(c) != c {
            return None;
        }
        expect = s.other();
    }
    let rep = data.factor(glued).element(rep.parse().ok()?);
    if data.sigma(glued).rep(rep) != rep {
        return None;
    }
    Some(Provenance::Globalization(CopyOrbit { glued, anchor: anchor.parse().ok()?, rep, word }))
}

/// The free globalization of an amalgam pre-action, evaluated on demand.
#[derive(Debug, Clone, Copy)]
pub struct LazyGlobalization<'a> {
    base: &'a PreActionAmalgam,
}

impl<'a> LazyGlobalization<'a> {
    pub fn base(&self) -> &'a PreActionAmalgam {
        self.base
    }

    fn data(&self) -> &'a AmalgamBaseData {
        &self.base.data
    }

    /// `tau` from side 1, `tau^-1` from side 2.
    fn cross(&self, p: &Raw) -> Raw {
        let data = self.data();
        let (j, k) = (p.side, p.side.other());
        match &p.orbit {
            AOrbit::Core(o) => {
                if let Some((o2, e2)) = self.base.core_cross(j, *o, p.element) {
                    return Raw { side: k, orbit: AOrbit::Core(o2), element: e2 };
                }
                let (c, s) = data.sigma(j).decompose_unchecked(p.element);
                let root = CopyOrbit { glued: j, anchor: *o, rep: c, word: Vec::new() };
                Raw { side: k, orbit: AOrbit::Copy(root), element: transfer(data, s, j) }
            }
            AOrbit::Copy(co) => {
                let (c, s) = data.sigma(j).decompose_unchecked(p.element);
                let moved = transfer(data, s, j);
                let mut word = co.word.clone();
                let element = if !c.is_identity() {
                    word.push((j, c));
                    moved
                } else {
                    match word.pop() {
                        Some((_, last)) => last.mul(moved),
                        None => moved,
                    }
                };
                if word.is_empty() && co.glued == k {
                    Raw { side: k, orbit: AOrbit::Core(co.anchor), element: co.rep.mul(element) }
                } else {
                    Raw { side: k, orbit: AOrbit::Copy(CopyOrbit { word, ..co.clone() }), element }
                }
            }
        }
    }

    fn walk(&self, mut p: Raw, letters: &[(Side, GroupElement)]) -> Raw {
        for &(s, c) in letters {
            if s != p.side {
                p = self.cross(&p);
            }
            p = p.act(c);
        }
        p
    }

    fn land(&self, p: Raw, side: Side) -> Raw {
        if p.side == side {
            p
        } else {
            self.cross(&p)
        }
    }

    pub fn is_core(&self, o: &AOrbit) -> bool {
        matches!(o, AOrbit::Core(_))
    }

    pub fn tau(&self, p: &X1Point) -> X2Point {
        self.cross(&Raw::of(p)).typed()
    }

    pub fn tau_inv(&self, p: &X2Point) -> X1Point {
        self.cross(&Raw::of(p)).typed()
    }

    /// `x g` under the induced action on the side of `x`.
    pub fn eval<P: SidePoint>(&self, x: &P, g: &AmalgamNormalForm) -> P {
        let p = self.land(self.walk(Raw::of(x), g.syllables()), P::SIDE);
        p.act(tail_on(self.data(), g.tail(), P::SIDE)).typed()
    }

    pub fn eval_word<P: SidePoint>(&self, x: &P, w: &AmalgamWord) -> P {
        self.land(self.walk(Raw::of(x), &w.letters), P::SIDE).typed()
    }

    /// [`Self::eval`] on `X_1`, recording every crossing.
    pub fn eval_trace(&self, x: &X1Point, g: &AmalgamNormalForm) -> (X1Point, Vec<TraceStep>) {
        let mut trace = Vec::new();
        let mut record = |from: &Raw, to: &Raw| {
            let step = match from.side {
                Side::One => TraceStep { x1: from.clone().typed(), x2: to.clone().typed(), forward: true },
                Side::Two => TraceStep { x1: to.clone().typed(), x2: from.clone().typed(), forward: false },
            };
            trace.push(step);
        };
        let mut p = Raw::of(x);
        for &(s, c) in g.syllables() {
            if s != p.side {
                let q = self.cross(&p);
                record(&p, &q);
                p = q;
            }
            p = p.act(c);
        }
        if p.side != Side::One {
            let q = self.cross(&p);
            record(&p, &q);
            p = q;
        }
        (p.act(g.tail()).typed(), trace)
    }

    fn edge_of(&self, p: &Raw) -> AEdge {
        AEdge { side: p.side, orbit: p.orbit.clone(), rep: self.data().sigma(p.side).rep(p.element) }
    }

    /// The edge `p Sigma_j` at a point of `X_j`.
    pub fn edge_at<P: SidePoint>(&self, p: &P) -> AEdge {
        self.edge_of(&Raw::of(p))
    }

    fn cross_edge(&self, e: &AEdge) -> Raw {
        self.cross(&Raw { side: e.side, orbit: e.orbit.clone(), element: e.rep })
    }

    pub fn range(&self, e: &AEdge) -> AVertex {
        let q = self.cross_edge(e);
        AVertex { side: q.side, orbit: q.orbit }
    }

    pub fn antipode(&self, e: &AEdge) -> AEdge {
        self.edge_of(&self.cross_edge(e))
    }

    /// All edges with source `v`, by coset representative.
    pub fn star(&self, v: &AVertex) -> Vec<AEdge> {
        self.data()
            .coset_reps(v.side)
            .into_iter()
            .map(|c| AEdge { side: v.side, orbit: v.orbit.clone(), rep: c })
            .collect()
    }

    pub fn is_frontier(&self, e: &AEdge) -> bool {
        self.is_core(&e.orbit) && !self.is_core(&self.range(e).orbit)
    }

    /// `path_{j,x}(g)` for `x` in `X_j` and `g` starting in the other factor:
    /// the edge `x Sigma_j`, then one edge per syllable.
    pub fn path<P: SidePoint>(&self, x: &P, g: &AmalgamNormalForm) -> Result<Vec<AEdge>, PreActionError> {
        if g.syllables().first().map(|s| s.0) != Some(P::SIDE.other()) {
            return Err(PreActionError::WrongFactorClass(g.to_string()));
        }
        let mut p = Raw::of(x);
        let mut out = Vec::with_capacity(g.len() + 1);
        out.push(self.edge_of(&p));
        p = self.cross(&p);
        for &(_, c) in g.syllables() {
            let q = p.act(c);
            out.push(self.edge_of(&q));
            p = self.cross(&q);
        }
        Ok(out)
    }

    /// The syllables whose path from `x` crosses `edges` (the first edge must
    /// be `x Sigma_j`), and the point reached. Inverse of [`Self::path`].
    pub fn syllables_along<P: SidePoint>(
        &self,
        x: &P,
        edges: &[AEdge],
    ) -> Result<(Vec<(Side, GroupElement)>, AnyPoint), PreActionError> {
        let p = Raw::of(x);
        match edges.first() {
            Some(e) if *e == self.edge_of(&p) => {}
            _ => return Err(PreActionError::NotAPath { position: 0 }),
        }
        let (out, end) = self.follow_raw(self.cross(&p), &edges[1..], 1)?;
        Ok((out, end.any()))
    }

    /// The syllables that walk from `x` across `edges`, each edge starting at
    /// the current orbit, and the point reached.
    pub fn follow<P: SidePoint>(&self, x: &P, edges: &[AEdge]) -> Result<(Vec<(Side, GroupElement)>, AnyPoint), PreActionError> {
        let (out, end) = self.follow_raw(Raw::of(x), edges, 0)?;
        Ok((out, end.any()))
    }

    fn follow_raw(&self, mut p: Raw, edges: &[AEdge], offset: usize) -> Result<(Vec<(Side, GroupElement)>, Raw), PreActionError> {
        let mut out = Vec::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            if e.side != p.side || e.orbit != p.orbit {
                return Err(PreActionError::NotAPath { position: k + offset });
            }
            let c = self.data().sigma(p.side).rep(p.element.inv().mul(e.rep));
            out.push((p.side, c));
            p = self.cross(&p.act(c));
        }
        Ok((out, p))
    }

    /// Ball of radius `radius` around `seeds`, as an induced subgraph.
    pub fn window(&self, seeds: &[AVertex], radius: usize) -> Window {
        let mut w = Window::default();
        let mut queue = VecDeque::new();
        for s in seeds {
            if w.vertex(s).is_none() {
                w.add_vertex(s.clone());
                queue.push_back((s.clone(), 0usize));
            }
        }
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for e in self.star(&v) {
                let r = self.range(&e);
                if w.vertex(&r).is_none() {
                    w.add_vertex(r.clone());
                    queue.push_back((r, d + 1));
                }
            }
        }
        for v in w.vertices.clone() {
            if v.side != Side::One {
                continue;
            }
            for e in self.star(&v) {
                if w.vertex(&self.range(&e)).is_some() {
                    let back = self.antipode(&e);
                    w.add_edge(e, back);
                }
            }
        }
        w
    }

    pub fn core_vertices(&self) -> Vec<AVertex> {
        [Side::One, Side::Two]
            .into_iter()
            .flat_map(|side| self.base.orbits(side).keys().map(move |&o| AVertex { side, orbit: AOrbit::Core(o) }))
            .collect()
    }

    /// The core graph plus one leaf per frontier edge.
    pub fn core_window(&self) -> Window {
        self.window(&self.core_vertices(), 1)
    }

    /// First point `(o,1) w` of `X_1`, over `w` in enumeration order (identity
    /// first) and core orbits, moved by every element of `elements`.
    pub fn faithfulness_witness(&self, elements: &[AmalgamNormalForm], search: usize) -> Option<X1Point> {
        let data = self.data();
        let mut candidates = vec![AmalgamNormalForm::identity(data)];
        candidates.extend(enumerate_nontrivial(data, search));
        let id = data.factor(Side::One).identity();
        for w in &candidates {
            for &o in self.base.orbits1.keys() {
                let v = self.eval(&X1Point::core(o, id), w);
                if elements.iter().all(|g| self.eval(&v, g) != v) {
                    return Some(v);
                }
            }
        }
        None
    }
}

/// A finite piece of an amalgam Bass-Serre graph with its edges named.
#[derive(Debug, Clone, Default)]
pub struct Window {
    pub graph: Graph,
    pub vertices: Vec<AVertex>,
    index: BTreeMap<AVertex, VertexId>,
    edges: BTreeMap<AEdge, EdgeId>,
    names: Vec<AEdge>,
}

impl Window {
    fn add_vertex(&mut self, v: AVertex) -> VertexId {
        let id = self.graph.add_vertex(v.to_string());
        self.index.insert(v.clone(), id);
        self.vertices.push(v);
        id
    }

    fn add_edge(&mut self, e: AEdge, back: AEdge) {
        let s = self.index[&e.source()];
        let r = self.index[&back.source()];
        let id = self.graph.add_edge(s, r).expect("endpoints exist");
        self.edges.insert(e.clone(), id);
        self.edges.insert(back.clone(), id + 1);
        self.names.push(e);
        self.names.push(back);
    }

    pub fn vertex(&self, v: &AVertex) -> Option<VertexId> {
        self.index.get(v).copied()
    }

    pub fn edge_id(&self, e: &AEdge) -> Option<EdgeId> {
        self.edges.get(e).copied()
    }

    pub fn edge(&self, id: EdgeId) -> &AEdge {
        &self.names[id]
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.graph.to_dot(name)
    }
}

/// A random transitive pre-action with `n1` and `n2` core orbits and about
/// `extra` entries beyond a spanning tree.
pub fn sample_transitive<R: Rng>(data: &AmalgamBaseData, n1: u64, n2: u64, extra: usize, rng: &mut R) -> PreActionAmalgam {
    let reps1 = data.coset_reps(Side::One);
    let reps2 = data.coset_reps(Side::Two);
    let n1 = n1.max(1);
    let mut p = PreActionAmalgam::empty(data.clone(), n1, n2);
    let try_add = |p: &mut PreActionAmalgam, a: u64, b: u64, rng: &mut R| -> bool {
        let c1 = reps1[rng.gen_range(0..reps1.len())];
        let c2 = reps2[rng.gen_range(0..reps2.len())];
        if p.contains_key(a, c1) || p.contains_range_key(b, c2) {
            return false;
        }
        match p.with_entry(Point1::new(a, c1), Point2::new(b, c2)) {
            Ok(q) => {
                *p = q;
                true
            }
            Err(_) => false,
        }
    };
    // vertices in the order 1:0, 2:0, 1:1, 2:1, ... each joined to an earlier
    // vertex of the other side
    let mut order: Vec<(Side, u64)> = Vec::new();
    for i in 0..n1.max(n2) {
        if i < n1 {
            order.push((Side::One, i));
        }
        if i < n2 {
            order.push((Side::Two, i));
        }
    }
    for (idx, &(side, o)) in order.iter().enumerate().skip(1) {
        let earlier: Vec<u64> = order[..idx].iter().filter(|v| v.0 != side).map(|v| v.1).collect();
        for _ in 0..64 {
            let other = earlier[rng.gen_range(0..earlier.len())];
            let (a, b) = if side == Side::One { (o, other) } else { (other, o) };
            if try_add(&mut p, a, b, rng) {
                break;
            }
        }
    }
    for _ in 0..extra {
        if n2 == 0 {
            break;
        }
        let a = rng.gen_range(0..n1);
        let b = rng.gen_range(0..n2);
        try_add(&mut p, a, b, rng);
    }
    p
}
