//! Pre-actions `(X, tau)` of `HNN(H, Sigma, theta)` and their free
//! globalization.
//!
//! A pre-action stores a finite set of free `H`-orbits (the core) and one
//! `tau` value per `Sigma`-orbit in the domain. The free globalization is
//! evaluated lazily: at every `Sigma`-orbit outside the domain hangs a copy of
//! the positive translation pre-action, at every `theta(Sigma)`-orbit outside
//! the range a copy of the negative one. A point in a copy is addressed by its
//! anchor and a reduced coset word, so evaluation is a pure function of the
//! core and needs no allocation state.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::base_groups::{GroupElement, HnnBaseData, Presentation};
use crate::graphs::{EdgeId, Graph, VertexId};
use crate::hnn_words::{reduce, HnnLetter, HnnNormalForm, HnnWord, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreActionError {
    #[error("{0} is outside the domain")]
    OutsideDomain(String),
    #[error("malformed point {0}")]
    Malformed(String),
    #[error("invalid pre-action: {0}")]
    Invalid(Report),
    #[error("orbit {0} is used by the table but missing from the orbit set")]
    OrbitSetMisses(u64),
    #[error("unknown tau key {0}")]
    UnknownKey(String),
    #[error("element {0} lies in the base group")]
    InBase(String),
    #[error("edge {position} does not continue the path")]
    NotAPath { position: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("presentation mismatch: expected `{expected}`, found `{found}`")]
    PresentationMismatch { expected: String, found: String },
}

/// A point of a core orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub orbit: u64,
    pub element: GroupElement,
}

impl Point {
    pub fn new(orbit: u64, element: GroupElement) -> Self {
        Point { orbit, element }
    }

    /// Parse `(o,e)`.
    pub fn parse(text: &str, data: &HnnBaseData) -> Option<Point> {
        let (o, e) = parse_pair(text)?;
        Some(Point { orbit: o.parse().ok()?, element: data.element(e.parse().ok()?) })
    }

    pub fn act(self, h: GroupElement) -> Point {
        Point { orbit: self.orbit, element: self.element.mul(h) }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.orbit, self.element)
    }
}

pub(crate) fn parse_pair(text: &str) -> Option<(&str, &str)> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim(), b.trim()))
}

/// The orbit of a point in an attached translation copy. `word` is the
/// reduced coset word from the anchor point; it starts with `(1, sign)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CopyOrbit {
    pub anchor: u64,
    pub sign: Sign,
    pub rep: GroupElement,
    pub word: Vec<(GroupElement, Sign)>,
}

impl CopyOrbit {
    fn key(&self) -> (u64, Sign, GroupElement, usize, &[(GroupElement, Sign)]) {
        (self.anchor, self.sign, self.rep, self.word.len(), &self.word)
    }

    /// The copy orbit one step closer to the anchor, if any.
    pub fn parent(&self) -> Option<CopyOrbit> {
        (self.word.len() > 1).then(|| CopyOrbit { word: self.word[..self.word.len() - 1].to_vec(), ..self.clone() })
    }

    fn word_text(&self) -> String {
        let id = self.rep.group().identity();
        HnnNormalForm::from_syllables(self.word.clone(), id).to_string()
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

/// Where an orbit of the core came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    Core,
    Globalization(CopyOrbit),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Core => write!(f, "core"),
            Provenance::Globalization(c) => write!(
                f,
                "glob anchor={} sign={} rep={} word=\"{}\"",
                c.anchor,
                sign_char(c.sign),
                c.rep,
                c.word_text()
            ),
        }
    }
}

fn sign_char(s: Sign) -> char {
    match s {
        Sign::Pos => '+',
        Sign::Neg => '-',
    }
}

/// An orbit of the globalized space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GOrbit {
    Core(u64),
    Copy(CopyOrbit),
}

impl fmt::Display for GOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GOrbit::Core(o) => write!(f, "o{o}"),
            GOrbit::Copy(c) => write!(f, "o{}|{}{}|{}", c.anchor, c.rep, sign_char(c.sign), c.word_text()),
        }
    }
}

/// A point of the globalized space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GPoint {
    pub orbit: GOrbit,
    pub element: GroupElement,
}

impl GPoint {
    pub fn core(orbit: u64, element: GroupElement) -> Self {
        GPoint { orbit: GOrbit::Core(orbit), element }
    }

    pub fn as_core(&self) -> Option<Point> {
        match self.orbit {
            GOrbit::Core(o) => Some(Point::new(o, self.element)),
            GOrbit::Copy(_) => None,
        }
    }

    pub fn act(&self, h: GroupElement) -> GPoint {
        GPoint { orbit: self.orbit.clone(), element: self.element.mul(h) }
    }
}

impl From<Point> for GPoint {
    fn from(p: Point) -> Self {
        GPoint::core(p.orbit, p.element)
    }
}

impl fmt::Display for GPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.orbit, self.element)
    }
}

/// A directed edge of the Bass-Serre graph: the `Sigma`-orbit (positive) or
/// `theta(Sigma)`-orbit (negative) with representative `rep` in `orbit`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GEdge {
    pub orbit: GOrbit,
    pub rep: GroupElement,
    pub sign: Sign,
}

impl fmt::Display for GEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}{}", self.orbit, self.rep, sign_char(self.sign))
    }
}

/// One `tau^{+-1}` application during an evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub argument: GPoint,
    pub sign: Sign,
    pub result: GPoint,
}

impl TraceStep {
    /// The point whose `tau` value the step relies on.
    pub fn tau_point(&self) -> &GPoint {
        match self.sign {
            Sign::Pos => &self.argument,
            Sign::Neg => &self.result,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownOrbit(u64),
    WrongGroup(String),
    /// Two entries on the same `Sigma`-orbit that disagree.
    NotAFunction { key: Point, first: Point, second: Point },
    /// Two `Sigma`-orbits sent to the same `theta(Sigma)`-orbit.
    NotInjective { first: Point, second: Point },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownOrbit(o) => write!(f, "orbit {o} is not declared"),
            Violation::WrongGroup(p) => write!(f, "point {p} is not in the base group"),
            Violation::NotAFunction { key, first, second } => {
                write!(f, "key {key} has two images {first} and {second}")
            }
            Violation::NotInjective { first, second } => {
                write!(f, "keys {first} and {second} have images in the same theta(Sigma)-orbit")
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

/// Check a list of `key -> image` pairs; keys need not be representatives.
pub fn check_preaction(data: &HnnBaseData, orbits: &BTreeSet<u64>, entries: &[(Point, Point)]) -> Report {
    normalize_entries(data, orbits, entries).1
}

type Normalized = (BTreeMap<Key, Point>, BTreeMap<Key, (Key, GroupElement)>);

fn normalize_entries(data: &HnnBaseData, orbits: &BTreeSet<u64>, entries: &[(Point, Point)]) -> (Normalized, Report) {
    let mut report = Report::default();
    let mut table: BTreeMap<Key, Point> = BTreeMap::new();
    let mut reverse: BTreeMap<Key, (Key, GroupElement)> = BTreeMap::new();
    for &(k, img) in entries {
        let mut ok = true;
        for p in [k, img] {
            if p.element.group() != data.base() {
                report.violations.push(Violation::WrongGroup(p.to_string()));
                ok = false;
            } else if !orbits.contains(&p.orbit) {
                report.violations.push(Violation::UnknownOrbit(p.orbit));
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let (c, s) = data.sigma().decompose_unchecked(k.element);
        let image = img.act(data.theta().apply_unchecked(s).inv());
        let key = (k.orbit, c);
        if let Some(&prev) = table.get(&key) {
            if prev != image {
                report.violations.push(Violation::NotAFunction { key: Point::new(k.orbit, c), first: prev, second: image });
            }
            continue;
        }
        let (cm, s0) = data.theta_sigma().decompose_unchecked(image.element);
        let rkey = (image.orbit, cm);
        if let Some(&(other, _)) = reverse.get(&rkey) {
            report.violations.push(Violation::NotInjective {
                first: Point::new(other.0, other.1),
                second: Point::new(k.orbit, c),
            });
            continue;
        }
        table.insert(key, image);
        reverse.insert(rkey, (key, s0));
    }
    ((table, reverse), report)
}

/// A pre-action of an HNN extension on finitely many free `H`-orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreActionHnn {
    data: HnnBaseData,
    orbits: BTreeMap<u64, Provenance>,
    table: BTreeMap<Key, Point>,
    reverse: BTreeMap<Key, (Key, GroupElement)>,
}

impl PreActionHnn {
    pub fn new(
        data: HnnBaseData,
        orbits: BTreeMap<u64, Provenance>,
        entries: &[(Point, Point)],
    ) -> Result<Self, PreActionError> {
        let ids: BTreeSet<u64> = orbits.keys().copied().collect();
        let ((table, reverse), report) = normalize_entries(&data, &ids, entries);
        if !report.is_valid() {
            return Err(PreActionError::Invalid(report));
        }
        Ok(PreActionHnn { data, orbits, table, reverse })
    }

    /// `n` core orbits and empty `tau`.
    pub fn empty(data: HnnBaseData, n: u64) -> Self {
        let orbits = (0..n).map(|o| (o, Provenance::Core)).collect();
        PreActionHnn { data, orbits, table: BTreeMap::new(), reverse: BTreeMap::new() }
    }

    /// `k` core orbits joined in a chain by `(i,1) tau = (i+1,1)`.
    pub fn chain(data: HnnBaseData, k: u64) -> Self {
        let id = data.identity();
        let entries: Vec<_> = (1..k).map(|i| (Point::new(i - 1, id), Point::new(i, id))).collect();
        let orbits = (0..k.max(1)).map(|o| (o, Provenance::Core)).collect();
        PreActionHnn::new(data, orbits, &entries).expect("a chain is a valid pre-action")
    }

    /// The translation pre-action of `Gamma` restricted to the ball of radius
    /// `radius` around `H` in its Bass-Serre tree.
    pub fn translation_truncation(data: HnnBaseData, radius: usize) -> Self {
        let base = PreActionHnn::empty(data, 1);
        let w = base.globalization().window(&[GOrbit::Core(0)], radius);
        base.promote(&w.vertices).0
    }

    pub fn data(&self) -> &HnnBaseData {
        &self.data
    }

    pub fn orbits(&self) -> &BTreeMap<u64, Provenance> {
        &self.orbits
    }

    pub fn orbit_ids(&self) -> BTreeSet<u64> {
        self.orbits.keys().copied().collect()
    }

    pub fn next_orbit_id(&self) -> u64 {
        self.orbits.keys().next_back().map_or(0, |o| o + 1)
    }

    /// `(key, image)` pairs with keys at `C+` representatives.
    pub fn entries(&self) -> Vec<(Point, Point)> {
        self.table.iter().map(|(&(o, c), &img)| (Point::new(o, c), img)).collect()
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

    /// Every `Sigma`-orbit and `theta(Sigma)`-orbit of the core is covered.
    pub fn is_global(&self) -> bool {
        let n = self.orbits.len();
        self.table.len() == n * self.data.coset_reps_pos().len() && self.reverse.len() == n * self.data.coset_reps_neg().len()
    }

    fn check_point(&self, x: Point) -> Result<(), PreActionError> {
        if x.element.group() != self.data.base() || !self.orbits.contains_key(&x.orbit) {
            return Err(PreActionError::Malformed(x.to_string()));
        }
        Ok(())
    }

    pub fn tau_eval(&self, x: Point) -> Result<Point, PreActionError> {
        self.check_point(x)?;
        let (c, s) = self.data.sigma().decompose_unchecked(x.element);
        match self.table.get(&(x.orbit, c)) {
            Some(img) => Ok(img.act(self.data.theta().apply_unchecked(s))),
            None => Err(PreActionError::OutsideDomain(x.to_string())),
        }
    }

    pub fn tau_inv_eval(&self, x: Point) -> Result<Point, PreActionError> {
        self.check_point(x)?;
        let (cm, s) = self.data.theta_sigma().decompose_unchecked(x.element);
        match self.reverse.get(&(x.orbit, cm)) {
            Some(&((o, c), s0)) => {
                let sigma = self.data.theta().apply_inv_unchecked(s0.inv().mul(s));
                Ok(Point::new(o, c.mul(sigma)))
            }
            None => Err(PreActionError::OutsideDomain(x.to_string())),
        }
    }

    fn tau_step(&self, x: Point, sign: Sign) -> Option<Point> {
        match sign {
            Sign::Pos => self.tau_eval(x).ok(),
            Sign::Neg => self.tau_inv_eval(x).ok(),
        }
    }

    /// The partial action `alpha_tau`: `None` where some `tau` step is undefined.
    pub fn partial_action_eval(&self, x: Point, g: &HnnNormalForm) -> Option<Point> {
        let mut p = x;
        for &(c, s) in g.syllables() {
            p = self.tau_step(p.act(c), s)?;
        }
        Some(p.act(g.tail()))
    }

    /// Partial evaluation of a raw word, letter by letter.
    pub fn partial_word_eval(&self, x: Point, w: &HnnWord) -> Option<Point> {
        let mut p = x;
        for l in &w.letters {
            p = match *l {
                HnnLetter::Base(h) => p.act(h),
                HnnLetter::Stable(s) => self.tau_step(p, s)?,
            };
        }
        Some(p)
    }

    /// Bass-Serre graph on the given core orbits.
    pub fn bass_serre_graph(&self, orbit_set: &BTreeSet<u64>) -> Result<Window, PreActionError> {
        for (&(o, _), img) in &self.table {
            for x in [o, img.orbit] {
                if !orbit_set.contains(&x) {
                    return Err(PreActionError::OrbitSetMisses(x));
                }
            }
        }
        let mut w = Window::default();
        for &o in orbit_set {
            w.add_vertex(GOrbit::Core(o));
        }
        for (&(o, c), img) in &self.table {
            let e = GEdge { orbit: GOrbit::Core(o), rep: c, sign: Sign::Pos };
            let back = GEdge {
                orbit: GOrbit::Core(img.orbit),
                rep: self.data.theta_sigma().rep(img.element),
                sign: Sign::Neg,
            };
            w.add_edge(e, back);
        }
        Ok(w)
    }

    /// Keep only the listed `tau` keys (`C+` representatives).
    pub fn restrict_to_edges(&self, keys: &BTreeSet<Point>) -> Result<Self, PreActionError> {
        for k in keys {
            if !self.table.contains_key(&(k.orbit, k.element)) {
                return Err(PreActionError::UnknownKey(k.to_string()));
            }
        }
        let entries: Vec<_> = self.entries().into_iter().filter(|(k, _)| keys.contains(k)).collect();
        PreActionHnn::new(self.data.clone(), self.orbits.clone(), &entries)
    }

    /// Add an orbit with the next free id.
    pub fn with_fresh_orbit(&self, provenance: Provenance) -> (Self, u64) {
        let id = self.next_orbit_id();
        let mut out = self.clone();
        out.orbits.insert(id, provenance);
        (out, id)
    }

    /// Add one entry `key tau = image` (the key need not be a representative).
    pub fn with_entry(&self, key: Point, image: Point) -> Result<Self, PreActionError> {
        let mut entries = self.entries();
        entries.push((key, image));
        PreActionHnn::new(self.data.clone(), self.orbits.clone(), &entries)
    }

    pub fn globalization(&self) -> LazyGlobalization<'_> {
        LazyGlobalization { base: self }
    }

    /// Move the given copy orbits, and every copy orbit between them and
    /// their anchors, into the core. New ids follow the copy-orbit order. The
    /// result has the same free globalization; the map sends each promoted
    /// orbit to its new id.
    pub fn promote(&self, targets: &[GOrbit]) -> (Self, BTreeMap<CopyOrbit, u64>) {
        let mut todo: BTreeSet<CopyOrbit> = BTreeSet::new();
        for t in targets {
            if let GOrbit::Copy(c) = t {
                let mut cur = Some(c.clone());
                while let Some(c) = cur {
                    if !todo.insert(c.clone()) {
                        break;
                    }
                    cur = c.parent();
                }
            }
        }
        let mut next = self.next_orbit_id();
        let mut ids = BTreeMap::new();
        let mut orbits = self.orbits.clone();
        for c in &todo {
            ids.insert(c.clone(), next);
            orbits.insert(next, Provenance::Globalization(c.clone()));
            next += 1;
        }
        let glob = self.globalization();
        let rename = |o: &GOrbit| match o {
            GOrbit::Core(o) => Some(*o),
            GOrbit::Copy(c) => ids.get(c).copied(),
        };
        let mut entries = self.entries();
        let sources = self.orbits.keys().map(|&o| GOrbit::Core(o)).chain(todo.iter().cloned().map(GOrbit::Copy));
        for src in sources {
            let new_src = rename(&src).expect("source is in the new core");
            for c in self.data.coset_reps_pos() {
                if self.table.contains_key(&(new_src, c)) && matches!(src, GOrbit::Core(_)) {
                    continue;
                }
                let img = glob.tau(&GPoint { orbit: src.clone(), element: c });
                if let Some(o) = rename(&img.orbit) {
                    entries.push((Point::new(new_src, c), Point::new(o, img.element)));
                }
            }
        }
        let out = PreActionHnn::new(self.data.clone(), orbits, &entries).expect("promotion preserves validity");
        (out, ids)
    }

    /// Re-address a point of this pre-action's globalization in the
    /// globalization of `promoted = self.promote(..)`.
    pub fn translate(&self, promoted: &PreActionHnn, ids: &BTreeMap<CopyOrbit, u64>, p: &GPoint) -> GPoint {
        match &p.orbit {
            GOrbit::Core(_) => p.clone(),
            GOrbit::Copy(c) => match ids.get(c) {
                Some(&o) => GPoint::core(o, p.element),
                None => {
                    let g = HnnNormalForm::from_syllables(c.word.clone(), p.element);
                    promoted.globalization().eval(&GPoint::core(c.anchor, c.rep), &g)
                }
            },
        }
    }

    /// Line-oriented text: header, one line per entry, one line per orbit.
    pub fn serialize(&self) -> String {
        let mut s = format!("preaction {}\n", self.data.config());
        for (k, img) in self.entries() {
            s.push_str(&format!("{k} -> {img}\n"));
        }
        for (o, p) in &self.orbits {
            s.push_str(&format!("orbit {o} {p}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, PreActionError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let perr = |line: usize, reason: &str| PreActionError::Parse { line: line + 1, reason: reason.to_string() };
        let (n, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let cfg = header.strip_prefix("preaction ").ok_or_else(|| perr(n, "expected `preaction <presentation>`"))?;
        let data = match Presentation::parse(cfg) {
            Ok(Presentation::Hnn(d)) => d,
            Ok(other) => {
                return Err(PreActionError::PresentationMismatch { expected: "an HNN presentation".into(), found: other.config() })
            }
            Err(e) => return Err(perr(n, &e.to_string())),
        };
        let mut entries = Vec::new();
        let mut orbits = BTreeMap::new();
        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("orbit ") {
                let (id, prov) = rest.split_once(' ').ok_or_else(|| perr(n, "expected `orbit <id> <provenance>`"))?;
                let id: u64 = id.parse().map_err(|_| perr(n, "bad orbit id"))?;
                let prov = parse_provenance(prov, &data).ok_or_else(|| perr(n, "bad provenance"))?;
                orbits.insert(id, prov);
            } else {
                let (k, img) = line.split_once("->").ok_or_else(|| perr(n, "expected `(o,e) -> (o,e)`"))?;
                let k = Point::parse(k, &data).ok_or_else(|| perr(n, "bad key point"))?;
                let img = Point::parse(img, &data).ok_or_else(|| perr(n, "bad image point"))?;
                entries.push((k, img));
            }
        }
        PreActionHnn::new(data, orbits, &entries)
    }
}

fn parse_provenance(text: &str, data: &HnnBaseData) -> Option<Provenance> {
    if text == "core" {
        return Some(Provenance::Core);
    }
    let rest = text.strip_prefix("glob anchor=")?;
    let (anchor, rest) = rest.split_once(" sign=")?;
    let (sign, rest) = rest.split_once(" rep=")?;
    let (rep, rest) = rest.split_once(" word=")?;
    let word = rest.strip_prefix('"')?.strip_suffix('"')?;
    let sign = match sign {
        "+" => Sign::Pos,
        "-" => Sign::Neg,
        _ => return None,
    };
    let nf = reduce(&HnnWord::parse(word, data).ok()?, data);
    if !nf.tail().is_identity() || nf.is_path_type() != Some(sign) {
        return None;
    }
    Some(Provenance::Globalization(CopyOrbit {
        anchor: anchor.parse().ok()?,
        sign,
        rep: data.element(rep.parse().ok()?),
        word: nf.syllables().to_vec(),
    }))
}

/// Right-multiply the coset word `word * h` by `t^sign`; returns the new tail.
fn push_stable(word: &mut Vec<(GroupElement, Sign)>, h: GroupElement, sign: Sign, data: &HnnBaseData) -> GroupElement {
    let (sub, map): (_, fn(&HnnBaseData, GroupElement) -> GroupElement) = match sign {
        Sign::Pos => (data.sigma(), |d, s| d.theta().apply_unchecked(s)),
        Sign::Neg => (data.theta_sigma(), |d, s| d.theta().apply_inv_unchecked(s)),
    };
    let (c, s) = sub.decompose_unchecked(h);
    let moved = map(data, s);
    if c.is_identity() && word.last().map(|l| l.1) == Some(sign.flip()) {
        let (cn, _) = word.pop().expect("checked nonempty");
        return cn.mul(moved);
    }
    word.push((c, sign));
    moved
}

/// The free globalization of a pre-action, evaluated on demand.
#[derive(Debug, Clone, Copy)]
pub struct LazyGlobalization<'a> {
    base: &'a PreActionHnn,
}

impl<'a> LazyGlobalization<'a> {
    pub fn base(&self) -> &'a PreActionHnn {
        self.base
    }

    fn data(&self) -> &'a HnnBaseData {
        &self.base.data
    }

    pub fn is_core(&self, o: &GOrbit) -> bool {
        matches!(o, GOrbit::Core(_))
    }

    pub fn tau(&self, p: &GPoint) -> GPoint {
        self.step(p, Sign::Pos)
    }

    pub fn tau_inv(&self, p: &GPoint) -> GPoint {
        self.step(p, Sign::Neg)
    }

    pub fn step(&self, p: &GPoint, sign: Sign) -> GPoint {
        let data = self.data();
        match &p.orbit {
            GOrbit::Core(o) => {
                let x = Point::new(*o, p.element);
                if let Some(y) = self.base.tau_step(x, sign) {
                    return y.into();
                }
                let mut word = Vec::new();
                let (rep, _) = match sign {
                    Sign::Pos => data.sigma().decompose_unchecked(p.element),
                    Sign::Neg => data.theta_sigma().decompose_unchecked(p.element),
                };
                let tail = push_stable(&mut word, rep.inv().mul(p.element), sign, data);
                GPoint { orbit: GOrbit::Copy(CopyOrbit { anchor: *o, sign, rep, word }), element: tail }
            }
            GOrbit::Copy(c) => {
                let mut word = c.word.clone();
                let tail = push_stable(&mut word, p.element, sign, data);
                if word.is_empty() {
                    GPoint::core(c.anchor, c.rep.mul(tail))
                } else {
                    GPoint { orbit: GOrbit::Copy(CopyOrbit { word, ..c.clone() }), element: tail }
                }
            }
        }
    }

    pub fn eval(&self, x: &GPoint, g: &HnnNormalForm) -> GPoint {
        let mut p = x.clone();
        for &(c, s) in g.syllables() {
            p = self.step(&p.act(c), s);
        }
        p.act(g.tail())
    }

    pub fn eval_word(&self, x: &GPoint, w: &HnnWord) -> GPoint {
        let mut p = x.clone();
        for l in &w.letters {
            p = match *l {
                HnnLetter::Base(h) => p.act(h),
                HnnLetter::Stable(s) => self.step(&p, s),
            };
        }
        p
    }

    pub fn eval_trace(&self, x: &GPoint, g: &HnnNormalForm) -> (GPoint, Vec<TraceStep>) {
        let mut p = x.clone();
        let mut trace = Vec::with_capacity(g.len());
        for &(c, s) in g.syllables() {
            let argument = p.act(c);
            let result = self.step(&argument, s);
            trace.push(TraceStep { argument, sign: s, result: result.clone() });
            p = result;
        }
        (p.act(g.tail()), trace)
    }

    /// The edge at `p` of the given sign: `p Sigma` or `p theta(Sigma)`.
    pub fn edge_at(&self, p: &GPoint, sign: Sign) -> GEdge {
        let rep = match sign {
            Sign::Pos => self.data().sigma().rep(p.element),
            Sign::Neg => self.data().theta_sigma().rep(p.element),
        };
        GEdge { orbit: p.orbit.clone(), rep, sign }
    }

    pub fn range(&self, e: &GEdge) -> GOrbit {
        self.step(&GPoint { orbit: e.orbit.clone(), element: e.rep }, e.sign).orbit
    }

    pub fn antipode(&self, e: &GEdge) -> GEdge {
        let q = self.step(&GPoint { orbit: e.orbit.clone(), element: e.rep }, e.sign);
        self.edge_at(&q, e.sign.flip())
    }

    /// All edges with source `o`: positive ones by `C+`, then negative by `C-`.
    pub fn star(&self, o: &GOrbit) -> Vec<GEdge> {
        let data = self.data();
        let pos = data.coset_reps_pos().into_iter().map(|c| GEdge { orbit: o.clone(), rep: c, sign: Sign::Pos });
        let neg = data.coset_reps_neg().into_iter().map(|c| GEdge { orbit: o.clone(), rep: c, sign: Sign::Neg });
        pos.chain(neg).collect()
    }

    /// An edge from the core to a copy.
    pub fn is_frontier(&self, e: &GEdge) -> bool {
        self.is_core(&e.orbit) && !self.is_core(&self.range(e))
    }

    /// `path_x(g)`: the edge crossed by each syllable of `g`.
    pub fn path(&self, x: &GPoint, g: &HnnNormalForm) -> Result<Vec<GEdge>, PreActionError> {
        if g.is_empty() {
            return Err(PreActionError::InBase(g.to_string()));
        }
        let mut p = x.clone();
        let mut out = Vec::with_capacity(g.len());
        for &(c, s) in g.syllables() {
            let q = p.act(c);
            out.push(self.edge_at(&q, s));
            p = self.step(&q, s);
        }
        Ok(out)
    }

    /// Syllables `(c_i, e_i)` whose path from `x` crosses `edges`, and the end
    /// point. Inverse of [`Self::path`] on reduced paths.
    pub fn syllables_along(&self, x: &GPoint, edges: &[GEdge]) -> Result<(Vec<(GroupElement, Sign)>, GPoint), PreActionError> {
        let mut p = x.clone();
        let mut out = Vec::with_capacity(edges.len());
        for (position, e) in edges.iter().enumerate() {
            if e.orbit != p.orbit {
                return Err(PreActionError::NotAPath { position });
            }
            let sub = match e.sign {
                Sign::Pos => self.data().sigma(),
                Sign::Neg => self.data().theta_sigma(),
            };
            let c = sub.rep(p.element.inv().mul(e.rep));
            out.push((c, e.sign));
            p = self.step(&p.act(c), e.sign);
        }
        Ok((out, p))
    }

    /// Ball of radius `radius` around `seeds` in the Bass-Serre graph of the
    /// globalization, as an induced subgraph.
    pub fn window(&self, seeds: &[GOrbit], radius: usize) -> Window {
        let mut w = Window::default();
        let mut queue = VecDeque::new();
        for s in seeds {
            if w.vertex(s).is_none() {
                w.add_vertex(s.clone());
                queue.push_back((s.clone(), 0usize));
            }
        }
        while let Some((o, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for e in self.star(&o) {
                let r = self.range(&e);
                if w.vertex(&r).is_none() {
                    w.add_vertex(r.clone());
                    queue.push_back((r, d + 1));
                }
            }
        }
        for v in w.vertices.clone() {
            for e in self.star(&v).into_iter().filter(|e| e.sign == Sign::Pos) {
                if w.vertex(&self.range(&e)).is_some() {
                    let back = self.antipode(&e);
                    w.add_edge(e, back);
                }
            }
        }
        w
    }

    /// The core graph plus one leaf per frontier edge.
    pub fn core_window(&self) -> Window {
        let seeds: Vec<GOrbit> = self.base.orbits.keys().map(|&o| GOrbit::Core(o)).collect();
        self.window(&seeds, 1)
    }

    /// First point `(o,1) * w`, over words `w` in enumeration order (identity
    /// first) and core orbits, moved by every element of `elements`.
    pub fn faithfulness_witness(&self, elements: &[HnnNormalForm], search: usize) -> Option<GPoint> {
        let data = self.data();
        let mut candidates = vec![HnnNormalForm::identity(data)];
        candidates.extend(crate::hnn_words::enumerate_nontrivial(data, search));
        for w in &candidates {
            for &o in self.base.orbits.keys() {
                let v = self.eval(&GPoint::core(o, data.identity()), w);
                if elements.iter().all(|g| self.eval(&v, g) != v) {
                    return Some(v);
                }
            }
        }
        None
    }
}

/// A finite piece of a Bass-Serre graph with its edges named.
#[derive(Debug, Clone, Default)]
pub struct Window {
    pub graph: Graph,
    pub vertices: Vec<GOrbit>,
    index: BTreeMap<GOrbit, VertexId>,
    edges: BTreeMap<GEdge, EdgeId>,
    names: Vec<GEdge>,
}

impl Window {
    fn add_vertex(&mut self, o: GOrbit) -> VertexId {
        let v = self.graph.add_vertex(o.to_string());
        self.index.insert(o.clone(), v);
        self.vertices.push(o);
        v
    }

    fn add_edge(&mut self, e: GEdge, back: GEdge) {
        let s = self.index[&e.orbit];
        let r = self.index[&back.orbit];
        let id = self.graph.add_edge(s, r).expect("endpoints exist");
        self.edges.insert(e.clone(), id);
        self.edges.insert(back.clone(), id + 1);
        self.names.push(e);
        self.names.push(back);
    }

    pub fn vertex(&self, o: &GOrbit) -> Option<VertexId> {
        self.index.get(o).copied()
    }

    pub fn edge_id(&self, e: &GEdge) -> Option<EdgeId> {
        self.edges.get(e).copied()
    }

    pub fn edge(&self, id: EdgeId) -> &GEdge {
        &self.names[id]
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.graph.to_dot(name)
    }
}

/// A random transitive pre-action on `n` core orbits with about `extra`
/// entries beyond a spanning tree. Always non-global for `|C+| != |C-|`.
pub fn sample_transitive<R: Rng>(data: &HnnBaseData, n: u64, extra: usize, rng: &mut R) -> PreActionHnn {
    let pos = data.coset_reps_pos();
    let neg = data.coset_reps_neg();
    let mut p = PreActionHnn::empty(data.clone(), n.max(1));
    let try_add = |p: &mut PreActionHnn, a: u64, b: u64, rng: &mut R| -> bool {
        let c = pos[rng.gen_range(0..pos.len())];
        let cm = neg[rng.gen_range(0..neg.len())];
        if p.contains_key(a, c) || p.contains_range_key(b, cm) {
            return false;
        }
        match p.with_entry(Point::new(a, c), Point::new(b, cm)) {
            Ok(q) => {
                *p = q;
                true
            }
            Err(_) => false,
        }
    };
    for i in 1..n {
        for _ in 0..64 {
            let j = rng.gen_range(0..i);
            let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            if try_add(&mut p, a, b, rng) {
                break;
            }
        }
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n.max(1));
        let b = rng.gen_range(0..n.max(1));
        try_add(&mut p, a, b, rng);
    }
    p
}
