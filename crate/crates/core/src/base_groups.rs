//! Base data for HNN extensions and amalgams.
//!
//! Only cyclic groups ship: the integers (for Baumslag-Solitar groups) and
//! `Z/p` (for amalgam factors). Every subgroup is cyclic and described by a
//! non-negative step `d`, meaning the subgroup `dZ` (or `dZ/pZ`). Coset
//! representatives are the least non-negative residues `0..d`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group mismatch: {0} vs {1}")]
    Mismatch(Group, Group),
    #[error("{element} is not in the subgroup {subgroup}")]
    NotInSubgroup { element: GroupElement, subgroup: Subgroup },
    #[error("Baumslag-Solitar parameters must be nonzero (got m={m}, n={n})")]
    ZeroParameter { m: i64, n: i64 },
    #[error("invalid cyclic order {0}")]
    BadOrder(u64),
    #[error("invalid amalgam data: {0}")]
    BadAmalgam(String),
    #[error("cannot parse presentation {0:?}: expected `bs m=<int> n=<int>` or `amalgam zmod <p> <q>`")]
    BadConfig(String),
}

/// Which concrete group a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Integers,
    Cyclic(u64),
}

/// Instance tag: the kind plus a slot distinguishing the roles of two
/// isomorphic groups (the factors of `Z/3 * Z/3`, say).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Group {
    pub kind: GroupKind,
    pub slot: u8,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Integers => write!(f, "Z[{}]", self.slot),
            GroupKind::Cyclic(p) => write!(f, "Z/{}[{}]", p, self.slot),
        }
    }
}

impl Group {
    pub fn integers(slot: u8) -> Self {
        Group { kind: GroupKind::Integers, slot }
    }

    pub fn cyclic(p: u64, slot: u8) -> Result<Self, GroupError> {
        if p == 0 || p > i64::MAX as u64 {
            return Err(GroupError::BadOrder(p));
        }
        Ok(Group { kind: GroupKind::Cyclic(p), slot })
    }

    pub fn order(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Integers => None,
            GroupKind::Cyclic(p) => Some(p),
        }
    }

    /// Canonical element with the given integer value.
    pub fn element(&self, value: i64) -> GroupElement {
        let value = match self.kind {
            GroupKind::Integers => value,
            GroupKind::Cyclic(p) => value.rem_euclid(p as i64),
        };
        GroupElement { group: *self, value }
    }

    pub fn identity(&self) -> GroupElement {
        self.element(0)
    }
}

/// An element of a shipped group, always in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    group: Group,
    value: i64,
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl GroupElement {
    pub fn group(&self) -> Group {
        self.group
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn is_identity(&self) -> bool {
        self.value == 0
    }

    /// Checked group operation.
    pub fn op(self, rhs: GroupElement) -> Result<GroupElement, GroupError> {
        if self.group != rhs.group {
            return Err(GroupError::Mismatch(self.group, rhs.group));
        }
        Ok(self.mul(rhs))
    }

    pub fn inv(self) -> GroupElement {
        self.group.element(-self.value)
    }

    /// Unchecked product, for callers that already guarantee a common group.
    pub(crate) fn mul(self, rhs: GroupElement) -> GroupElement {
        debug_assert_eq!(self.group, rhs.group, "mixed groups in product");
        match self.group.kind {
            GroupKind::Integers => self.group.element(self.value + rhs.value),
            GroupKind::Cyclic(p) => {
                let p = p as i128;
                let v = (self.value as i128 + rhs.value as i128).rem_euclid(p);
                GroupElement { group: self.group, value: v as i64 }
            }
        }
    }
}

/// The cyclic subgroup generated by `step` (step 0 is the trivial subgroup of
/// `Z`; in `Z/p` the step is normalised to a divisor of `p`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subgroup {
    group: Group,
    step: u64,
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}", self.step, self.group)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Subgroup {
    pub fn new(group: Group, generator: i64) -> Self {
        let g = generator.unsigned_abs();
        let step = match group.kind {
            GroupKind::Integers => g,
            GroupKind::Cyclic(p) => gcd(g % p, p),
        };
        Subgroup { group, step }
    }

    pub fn whole(group: Group) -> Self {
        Subgroup::new(group, 1)
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn contains(&self, h: GroupElement) -> bool {
        h.group == self.group
            && if self.step == 0 {
                h.value == 0
            } else {
                h.value.rem_euclid(self.step as i64) == 0
            }
    }

    pub fn is_whole(&self) -> bool {
        self.step == 1
    }

    pub fn is_trivial(&self) -> bool {
        match self.group.kind {
            GroupKind::Integers => self.step == 0,
            GroupKind::Cyclic(p) => self.step == p,
        }
    }

    /// Number of left cosets, `None` when infinite.
    pub fn index(&self) -> Option<u64> {
        if self.step == 0 {
            self.group.order()
        } else {
            Some(self.step)
        }
    }

    /// Order of the subgroup, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        match self.group.kind {
            GroupKind::Integers => (self.step == 0).then_some(1),
            GroupKind::Cyclic(p) => Some(p / self.step),
        }
    }

    /// Coset representatives in enumeration order (identity first).
    ///
    /// Only defined for finite index; the trivial subgroup of `Z` has none
    /// to list.
    pub fn coset_reps(&self) -> Vec<GroupElement> {
        match self.index() {
            Some(k) => (0..k as i64).map(|v| self.group.element(v)).collect(),
            None => Vec::new(),
        }
    }

    /// `h = rep * sigma` with `rep` a coset representative and `sigma` in the
    /// subgroup.
    pub fn decompose(&self, h: GroupElement) -> Result<(GroupElement, GroupElement), GroupError> {
        if h.group != self.group {
            return Err(GroupError::Mismatch(h.group, self.group));
        }
        Ok(self.decompose_unchecked(h))
    }

    pub(crate) fn decompose_unchecked(&self, h: GroupElement) -> (GroupElement, GroupElement) {
        let modulus = match (self.step, self.group.kind) {
            (0, GroupKind::Integers) => return (h, self.group.identity()),
            (0, GroupKind::Cyclic(p)) => p,
            (s, _) => s,
        };
        let rep = self.group.element(h.value.rem_euclid(modulus as i64));
        (rep, rep.inv().mul(h))
    }

    pub fn rep(&self, h: GroupElement) -> GroupElement {
        self.decompose_unchecked(h).0
    }
}

/// The isomorphism `src_gen * q -> dst_gen * q` between two cyclic subgroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Theta {
    domain: Subgroup,
    codomain: Subgroup,
    src_gen: i64,
    dst_gen: i64,
}

impl Theta {
    pub fn domain(&self) -> Subgroup {
        self.domain
    }

    pub fn codomain(&self) -> Subgroup {
        self.codomain
    }

    fn quotient(x: i64, gen: i64) -> i64 {
        if gen == 0 {
            0
        } else {
            x / gen
        }
    }

    pub fn apply(&self, s: GroupElement) -> Result<GroupElement, GroupError> {
        if !self.domain.contains(s) {
            return Err(GroupError::NotInSubgroup { element: s, subgroup: self.domain });
        }
        Ok(self.apply_unchecked(s))
    }

    pub fn apply_inv(&self, s: GroupElement) -> Result<GroupElement, GroupError> {
        if !self.codomain.contains(s) {
            return Err(GroupError::NotInSubgroup { element: s, subgroup: self.codomain });
        }
        Ok(self.apply_inv_unchecked(s))
    }

    pub(crate) fn apply_unchecked(&self, s: GroupElement) -> GroupElement {
        let q = Self::quotient(s.value, self.src_gen);
        self.codomain.group.element(q.wrapping_mul(self.dst_gen))
    }

    pub(crate) fn apply_inv_unchecked(&self, s: GroupElement) -> GroupElement {
        let q = Self::quotient(s.value, self.dst_gen);
        self.domain.group.element(q.wrapping_mul(self.src_gen))
    }
}

/// Which family an HNN presentation belongs to; only Baumslag-Solitar ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HnnFamily {
    BaumslagSolitar { m: i64, n: i64 },
}

/// `(H, Sigma, theta)` for `HNN(H, Sigma, theta)`, with transversals `C+` of
/// `Sigma` and `C-` of `theta(Sigma)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HnnBaseData {
    family: HnnFamily,
    base: Group,
    theta: Theta,
}

/// `BS(m, n) = HNN(Z, nZ, nq -> mq)`.
pub fn make_bs_presentation(m: i64, n: i64) -> Result<HnnBaseData, GroupError> {
    if m == 0 || n == 0 {
        return Err(GroupError::ZeroParameter { m, n });
    }
    let base = Group::integers(0);
    let theta = Theta {
        domain: Subgroup::new(base, n),
        codomain: Subgroup::new(base, m),
        src_gen: n,
        dst_gen: m,
    };
    Ok(HnnBaseData { family: HnnFamily::BaumslagSolitar { m, n }, base, theta })
}

impl HnnBaseData {
    pub fn family(&self) -> HnnFamily {
        self.family
    }

    pub fn base(&self) -> Group {
        self.base
    }

    pub fn sigma(&self) -> Subgroup {
        self.theta.domain
    }

    pub fn theta_sigma(&self) -> Subgroup {
        self.theta.codomain
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn theta_apply(&self, s: GroupElement) -> Result<GroupElement, GroupError> {
        self.theta.apply(s)
    }

    pub fn theta_inv_apply(&self, s: GroupElement) -> Result<GroupElement, GroupError> {
        self.theta.apply_inv(s)
    }

    pub fn element(&self, v: i64) -> GroupElement {
        self.base.element(v)
    }

    pub fn identity(&self) -> GroupElement {
        self.base.identity()
    }

    /// `h = c * sigma` with `c` in `C+` and `sigma` in `Sigma`.
    pub fn coset_decompose_pos(&self, h: GroupElement) -> Result<(GroupElement, GroupElement), GroupError> {
        self.sigma().decompose(h)
    }

    /// `h = c * s` with `c` in `C-` and `s` in `theta(Sigma)`.
    pub fn coset_decompose_neg(&self, h: GroupElement) -> Result<(GroupElement, GroupElement), GroupError> {
        self.theta_sigma().decompose(h)
    }

    pub fn coset_reps_pos(&self) -> Vec<GroupElement> {
        self.sigma().coset_reps()
    }

    pub fn coset_reps_neg(&self) -> Vec<GroupElement> {
        self.theta_sigma().coset_reps()
    }

    pub fn is_ascending(&self) -> bool {
        self.sigma().is_whole() || self.theta_sigma().is_whole()
    }

    /// Config string, e.g. `bs m=2 n=3`.
    pub fn config(&self) -> String {
        match self.family {
            HnnFamily::BaumslagSolitar { m, n } => format!("bs m={m} n={n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmalgamFamily {
    /// `Z/p * Z/q` with trivial amalgamated subgroup.
    ZmodFreeProduct { p: u64, q: u64 },
    /// `Z/p *_{Z/s} Z/q`, amalgamating the subgroups of order `s`.
    Zmod { p: u64, q: u64, s: u64 },
}

/// `(Gamma_1, Gamma_2, Sigma_1, Sigma_2, theta)` for `Gamma_1 *_Sigma Gamma_2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmalgamBaseData {
    family: AmalgamFamily,
    theta: Theta,
}

/// `Z/p * Z/q`.
pub fn zmod_free_product(p: u64, q: u64) -> Result<AmalgamBaseData, GroupError> {
    zmod_amalgam(p, q, 1).map(|mut a| {
        a.family = AmalgamFamily::ZmodFreeProduct { p, q };
        a
    })
}

/// `Z/p *_{Z/s} Z/q`, where `s` divides both `p` and `q`.
pub fn zmod_amalgam(p: u64, q: u64, s: u64) -> Result<AmalgamBaseData, GroupError> {
    if s == 0 || !p.is_multiple_of(s) || !q.is_multiple_of(s) {
        return Err(GroupError::BadAmalgam(format!("{s} must divide {p} and {q}")));
    }
    let g1 = Group::cyclic(p, 1)?;
    let g2 = Group::cyclic(q, 2)?;
    let (st1, st2) = ((p / s) as i64, (q / s) as i64);
    let theta = Theta {
        domain: Subgroup::new(g1, st1),
        codomain: Subgroup::new(g2, st2),
        src_gen: st1,
        dst_gen: st2,
    };
    Ok(AmalgamBaseData { family: AmalgamFamily::Zmod { p, q, s }, theta })
}

impl AmalgamBaseData {
    pub fn family(&self) -> AmalgamFamily {
        self.family
    }

    pub fn factor(&self, side: Side) -> Group {
        self.sigma(side).group()
    }

    pub fn sigma(&self, side: Side) -> Subgroup {
        match side {
            Side::One => self.theta.domain,
            Side::Two => self.theta.codomain,
        }
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    /// Convert a `Sigma` element from one side's coordinates to the other's.
    pub fn transfer(&self, s: GroupElement, from: Side) -> Result<GroupElement, GroupError> {
        match from {
            Side::One => self.theta.apply(s),
            Side::Two => self.theta.apply_inv(s),
        }
    }

    pub fn coset_reps(&self, side: Side) -> Vec<GroupElement> {
        self.sigma(side).coset_reps()
    }

    pub fn coset_decompose(&self, side: Side, h: GroupElement) -> Result<(GroupElement, GroupElement), GroupError> {
        self.sigma(side).decompose(h)
    }

    pub fn index(&self, side: Side) -> u64 {
        self.sigma(side).index().unwrap_or(u64::MAX)
    }

    /// Nontrivial and at least one side of index at least 3.
    pub fn is_nondegenerate(&self) -> bool {
        let (i1, i2) = (self.index(Side::One), self.index(Side::Two));
        i1 >= 2 && i2 >= 2 && (i1 >= 3 || i2 >= 3)
    }

    pub fn config(&self) -> String {
        match self.family {
            AmalgamFamily::ZmodFreeProduct { p, q } => format!("amalgam zmod {p} {q}"),
            AmalgamFamily::Zmod { p, q, s } => format!("amalgam zmod {p} {q} over {s}"),
        }
    }
}

/// A factor of an amalgam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A parsed presentation config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Presentation {
    Hnn(HnnBaseData),
    Amalgam(AmalgamBaseData),
}

impl Presentation {
    /// Parse `bs m=<int> n=<int>`, `amalgam zmod <p> <q>` or
    /// `amalgam zmod <p> <q> over <s>`.
    pub fn parse(text: &str) -> Result<Presentation, GroupError> {
        let bad = || GroupError::BadConfig(text.to_string());
        let toks: Vec<&str> = text.split_whitespace().collect();
        match toks.as_slice() {
            ["bs", a, b] => {
                let (m, n) = match (kv(a), kv(b)) {
                    (Some(("m", m)), Some(("n", n))) | (Some(("n", n)), Some(("m", m))) => (m, n),
                    _ => return Err(bad()),
                };
                Ok(Presentation::Hnn(make_bs_presentation(m, n)?))
            }
            ["amalgam", "zmod", p, q] => {
                let (p, q) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
                Ok(Presentation::Amalgam(zmod_free_product(p, q)?))
            }
            ["amalgam", "zmod", p, q, "over", s] => {
                let p = p.parse().map_err(|_| bad())?;
                let q = q.parse().map_err(|_| bad())?;
                let s = s.parse().map_err(|_| bad())?;
                Ok(Presentation::Amalgam(zmod_amalgam(p, q, s)?))
            }
            _ => Err(bad()),
        }
    }

    pub fn config(&self) -> String {
        match self {
            Presentation::Hnn(d) => d.config(),
            Presentation::Amalgam(d) => d.config(),
        }
    }
}

fn kv(tok: &str) -> Option<(&str, i64)> {
    let (k, v) = tok.split_once('=')?;
    Some((k, v.parse().ok()?))
}
